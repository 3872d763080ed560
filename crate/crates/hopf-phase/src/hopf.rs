//! The Hopf bundle S^3 -> CP^1 with its canonical (Berry-Simon) connection:
//! sections, transition function, chart connection forms, fundamental
//! vector fields and the horizontal/vertical split of tangent vectors.
//!
//! Real tangent vectors to S^3 are stored as the pair (v1, v2) of complex
//! components; the conjugate components are implied, which keeps every
//! stored vector automatically real.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{s3_from_angles, S3Point};

/// Tangency tolerance: |Re<z, v>| must stay below this.
pub const TANGENCY_TOL: f64 = 1e-10;
/// A homogeneous coordinate below this modulus is outside its chart.
pub const CHART_TOL: f64 = 1e-12;

/// A point of CP^1 held as a canonical unit representative: the
/// largest-modulus coordinate is made real and positive, so equal classes
/// compare equal componentwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CP1Point {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl CP1Point {
    /// Canonicalize an arbitrary nonzero representative.
    pub fn new(z1: Complex64, z2: Complex64) -> Result<Self> {
        let n = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
        if n < CHART_TOL {
            return Err(Error::DomainViolation(
                "(0, 0) does not represent a point of CP^1".into(),
            ));
        }
        let pivot = if z1.norm() >= z2.norm() { z1 } else { z2 };
        let scale = pivot.conj() / (pivot.norm() * n);
        Ok(Self {
            z1: z1 * scale,
            z2: z2 * scale,
        })
    }

    /// Componentwise distance between canonical representatives.
    pub fn distance(&self, other: &Self) -> f64 {
        ((self.z1 - other.z1).norm_sqr() + (self.z2 - other.z2).norm_sqr()).sqrt()
    }
}

/// Bundle projection: forget the fiber phase.
pub fn hopf_map(p: S3Point) -> CP1Point {
    CP1Point::new(p.z1, p.z2).expect("S^3 point is nonzero")
}

/// Local section sigma_i of the bundle: the unit representative whose i-th
/// coordinate is real positive.
pub fn section(chart: u8, p: &CP1Point) -> Result<S3Point> {
    let pivot = match chart {
        1 => p.z1,
        2 => p.z2,
        _ => return Err(Error::Config(format!("chart must be 1 or 2, got {chart}"))),
    };
    if pivot.norm() < CHART_TOL {
        return Err(Error::ChartDomain {
            chart,
            modulus: pivot.norm(),
        });
    }
    let n = (p.z1.norm_sqr() + p.z2.norm_sqr()).sqrt();
    let s = pivot.conj() / pivot.norm(); // |z_i| / z_i
    Ok(S3Point {
        z1: p.z1 * s / n,
        z2: p.z2 * s / n,
    })
}

/// Transition function psi_12 = (z1/|z1|)(z2/|z2|)^{-1} on the chart overlap.
pub fn transition(p: &CP1Point) -> Result<Complex64> {
    if p.z1.norm() < CHART_TOL {
        return Err(Error::ChartDomain {
            chart: 1,
            modulus: p.z1.norm(),
        });
    }
    if p.z2.norm() < CHART_TOL {
        return Err(Error::ChartDomain {
            chart: 2,
            modulus: p.z2.norm(),
        });
    }
    let u1 = p.z1 / p.z1.norm();
    let u2 = p.z2 / p.z2.norm();
    Ok(u1 * u2.conj())
}

/// A real tangent vector of S^3 at `base`, in complex components.
#[derive(Debug, Clone, Copy)]
pub struct TangentS3 {
    pub base: S3Point,
    pub v1: Complex64,
    pub v2: Complex64,
}

impl TangentS3 {
    /// Validate tangency Re<z, v> = 0.
    pub fn try_new(base: S3Point, v1: Complex64, v2: Complex64) -> Result<Self> {
        let radial = base.inner(v1, v2).re;
        if radial.abs() > TANGENCY_TOL {
            return Err(Error::TangencyViolation(radial));
        }
        Ok(Self { base, v1, v2 })
    }

    pub(crate) fn new_unchecked(base: S3Point, v1: Complex64, v2: Complex64) -> Self {
        Self { base, v1, v2 }
    }

    pub fn norm(&self) -> f64 {
        (self.v1.norm_sqr() + self.v2.norm_sqr()).sqrt()
    }

    /// Push the vector along the right action by a unit complex number.
    pub fn right_mul(&self, s: Complex64) -> Self {
        Self {
            base: self.base.right_mul(s),
            v1: self.v1 * s,
            v2: self.v2 * s,
        }
    }
}

/// Canonical connection omega(v) = i Im<z, v>, purely imaginary by
/// construction. Tangency is enforced when the `TangentS3` is built.
pub fn canonical_connection(v: &TangentS3) -> Complex64 {
    Complex64::new(0.0, v.base.inner(v.v1, v.v2).im)
}

/// Chart connection form omega_i evaluated on a curve velocity.
///
/// `p` is the canonical representative and `dp` the velocity of any smooth
/// C^2-lift of the curve through it; the form only sees d(arg z_i), so the
/// lift does not matter.
pub fn chart_connection(chart: u8, p: &CP1Point, dp: (Complex64, Complex64)) -> Result<Complex64> {
    let n2 = p.z1.norm_sqr() + p.z2.norm_sqr();
    let darg1_scaled = (p.z1.conj() * dp.0).im; // |z1|^2 d(arg z1)
    let darg2_scaled = (p.z2.conj() * dp.1).im;
    let im = match chart {
        1 => {
            if p.z1.norm() < CHART_TOL {
                return Err(Error::ChartDomain {
                    chart,
                    modulus: p.z1.norm(),
                });
            }
            (darg2_scaled - p.z2.norm_sqr() / p.z1.norm_sqr() * darg1_scaled) / n2
        }
        2 => {
            if p.z2.norm() < CHART_TOL {
                return Err(Error::ChartDomain {
                    chart,
                    modulus: p.z2.norm(),
                });
            }
            -(p.z1.norm_sqr() / p.z2.norm_sqr() * darg2_scaled - darg1_scaled) / n2
        }
        _ => return Err(Error::Config(format!("chart must be 1 or 2, got {chart}"))),
    };
    Ok(Complex64::new(0.0, im))
}

/// Fundamental vector field A* = z A of the right U(1) action, for A in
/// u(1) (purely imaginary).
pub fn fundamental_vector(a: Complex64, p: S3Point) -> TangentS3 {
    debug_assert!(a.re.abs() <= 1e-12, "u(1) elements are purely imaginary");
    TangentS3::new_unchecked(p, p.z1 * a, p.z2 * a)
}

/// Split a tangent vector into (horizontal, vertical): the vertical part is
/// the fundamental vector of omega(v), the horizontal remainder sits in the
/// kernel of omega.
pub fn split(v: &TangentS3) -> (TangentS3, TangentS3) {
    let a = canonical_connection(v);
    let vertical = fundamental_vector(a, v.base);
    let horizontal = TangentS3::new_unchecked(v.base, v.v1 - vertical.v1, v.v2 - vertical.v2);
    (horizontal, vertical)
}

/// Coordinate vector fields at (phi, theta, beta) as C^2 velocities.
pub fn coordinate_fields(
    phi: f64,
    theta: f64,
    beta: f64,
) -> Result<(S3Point, [(Complex64, Complex64); 3])> {
    let p = s3_from_angles(phi, theta, beta)?;
    let i = Complex64::i();
    let d_phi = (0.5 * i * p.z1, 0.5 * i * p.z2);
    let d_theta = (0.5 * i * p.z1, -0.5 * i * p.z2);
    let (n1, n2) = (p.z1.norm(), p.z2.norm());
    if n1 < 1e-9 || n2 < 1e-9 {
        return Err(Error::DegenerateFrame(n1.min(n2)));
    }
    let d_beta = (-(n2 / (2.0 * n1)) * p.z1, (n1 / (2.0 * n2)) * p.z2);
    Ok((p, [d_phi, d_theta, d_beta]))
}

/// Verify the angle-coordinate basis against the connection: the two
/// horizontal combinations are annihilated and the vertical generator
/// 2 d_phi satisfies omega = i. Returns the worst residual.
pub fn angle_basis_check(phi: f64, theta: f64, beta: f64) -> Result<f64> {
    let (p, [d_phi, d_theta, d_beta]) = coordinate_fields(phi, theta, beta)?;
    let cb = beta.cos();
    let h1 = TangentS3::new_unchecked(p, d_theta.0 - cb * d_phi.0, d_theta.1 - cb * d_phi.1);
    let h2 = TangentS3::new_unchecked(p, d_beta.0, d_beta.1);
    let vert = TangentS3::new_unchecked(p, 2.0 * d_phi.0, 2.0 * d_phi.1);
    let r1 = canonical_connection(&h1).norm();
    let r2 = canonical_connection(&h2).norm();
    let r3 = (canonical_connection(&vert) - Complex64::i()).norm();
    Ok(r1.max(r2).max(r3))
}
