//! Points and frames on the unit spheres S^2 and S^3, the Gauss map, the
//! moving frame and its connection matrix.
//!
//! `theta` is carried on the whole real line (never wrapped mod 2*pi) so the
//! winding count theta(1)/2*pi stays readable. Frames at the poles are
//! rejected; pole-touching motions go through the regularization module
//! before anything frame-based sees them.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Unit-norm tolerance for points of S^2 and S^3.
pub const UNIT_TOL: f64 = 1e-12;
/// Orthonormality / right-handedness tolerance for moving frames.
pub const FRAME_TOL: f64 = 1e-10;
/// Below this value of sin(beta) the local frame is considered degenerate.
pub const FRAME_DEGENERACY: f64 = 1e-9;
/// Slack allowed on the beta in [0, pi] precondition.
pub const BETA_SLACK: f64 = 1e-9;

pub(crate) mod vec3 {
    pub type V3 = [f64; 3];

    pub fn dot(a: V3, b: V3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    pub fn cross(a: V3, b: V3) -> V3 {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    pub fn norm(a: V3) -> f64 {
        dot(a, a).sqrt()
    }

    pub fn sub(a: V3, b: V3) -> V3 {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    pub fn add(a: V3, b: V3) -> V3 {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    pub fn scale(a: V3, s: f64) -> V3 {
        [a[0] * s, a[1] * s, a[2] * s]
    }

    pub fn normalize(a: V3) -> V3 {
        scale(a, 1.0 / norm(a))
    }
}

use vec3::V3;

/// A point of the unit two-sphere embedded in R^3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    /// Build from coordinates, checking the unit-norm invariant.
    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if (n2 - 1.0).abs() > 3.0 * UNIT_TOL {
            return Err(Error::DomainViolation(format!(
                "not a unit vector: |p|^2 - 1 = {:.3e}",
                n2 - 1.0
            )));
        }
        Ok(Self { x, y, z })
    }

    pub(crate) fn v3(self) -> V3 {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Self) -> f64 {
        vec3::dot(self.v3(), other.v3())
    }

    pub fn cross(self, other: Self) -> V3 {
        vec3::cross(self.v3(), other.v3())
    }
}

/// A point of S^3 as a unit vector in C^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S3Point {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl S3Point {
    pub fn try_new(z1: Complex64, z2: Complex64) -> Result<Self> {
        let n2 = z1.norm_sqr() + z2.norm_sqr();
        if (n2 - 1.0).abs() > 3.0 * UNIT_TOL {
            return Err(Error::DomainViolation(format!(
                "not on S^3: |z|^2 - 1 = {:.3e}",
                n2 - 1.0
            )));
        }
        Ok(Self { z1, z2 })
    }

    pub fn norm_sqr(self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }

    /// Hermitian inner product <self, other> = conj(z1) w1 + conj(z2) w2.
    pub fn inner(self, w1: Complex64, w2: Complex64) -> Complex64 {
        self.z1.conj() * w1 + self.z2.conj() * w2
    }

    /// Right action of a unit complex number on the fiber.
    pub fn right_mul(self, s: Complex64) -> Self {
        Self {
            z1: self.z1 * s,
            z2: self.z2 * s,
        }
    }
}

/// Angle coordinates: unwrapped contact angle, tilt in [0, pi], unwrapped
/// fiber coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angles {
    pub theta: f64,
    pub beta: f64,
    pub phi: f64,
}

impl Angles {
    pub fn try_new(theta: f64, beta: f64, phi: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self { theta, beta, phi })
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(-BETA_SLACK..=std::f64::consts::PI + BETA_SLACK).contains(&beta) {
        return Err(Error::DomainViolation(format!(
            "beta = {beta} outside [0, pi]"
        )));
    }
    Ok(())
}

/// Right-handed orthonormal frame at a point of S^2; `e3` is the base point.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub e1: SpherePoint,
    pub e2: SpherePoint,
    pub e3: SpherePoint,
}

impl Frame {
    /// Validate orthonormality and right-handedness to `FRAME_TOL`.
    pub fn try_new(e1: SpherePoint, e2: SpherePoint, e3: SpherePoint) -> Result<Self> {
        let f = Self { e1, e2, e3 };
        let es = [e1.v3(), e2.v3(), e3.v3()];
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = vec3::dot(es[i], es[j]);
                if (got - want).abs() > FRAME_TOL {
                    return Err(Error::DomainViolation(format!(
                        "frame not orthonormal: e{}.e{} = {got}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let handed = vec3::sub(vec3::cross(es[0], es[1]), es[2]);
        if vec3::norm(handed) > FRAME_TOL {
            return Err(Error::DomainViolation(
                "frame not right-handed: e1 x e2 != e3".into(),
            ));
        }
        Ok(f)
    }
}

/// The Gauss vector g(theta, beta) = (sin b cos t, sin b sin t, cos b).
pub fn gauss_vector(theta: f64, beta: f64) -> Result<SpherePoint> {
    check_beta(beta)?;
    let (sb, cb) = (beta.sin(), beta.cos());
    let (st, ct) = (theta.sin(), theta.cos());
    Ok(SpherePoint {
        x: sb * ct,
        y: sb * st,
        z: cb,
    })
}

/// East/north/sky frame at g(theta, beta); degenerate at the poles.
pub fn local_frame(theta: f64, beta: f64) -> Result<Frame> {
    check_beta(beta)?;
    let sb = beta.sin();
    if sb < FRAME_DEGENERACY {
        return Err(Error::DegenerateFrame(sb));
    }
    let cb = beta.cos();
    let (st, ct) = (theta.sin(), theta.cos());
    let e1 = SpherePoint {
        x: -st,
        y: ct,
        z: 0.0,
    };
    let e2 = SpherePoint {
        x: -cb * ct,
        y: -cb * st,
        z: sb,
    };
    let e3 = SpherePoint {
        x: sb * ct,
        y: sb * st,
        z: cb,
    };
    Ok(Frame { e1, e2, e3 })
}

/// Connection matrix of the moving frame evaluated on the displacement
/// (dtheta, dbeta): antisymmetric, with
/// w12 = -cos(beta) dtheta, w13 = sin(beta) dtheta, w23 = -dbeta.
pub fn connection_matrix(_theta: f64, beta: f64, dtheta: f64, dbeta: f64) -> [[f64; 3]; 3] {
    let w12 = -beta.cos() * dtheta;
    let w13 = beta.sin() * dtheta;
    let w23 = -dbeta;
    [[0.0, w12, w13], [-w12, 0.0, w23], [-w13, -w23, 0.0]]
}

/// S^3 point from angle coordinates:
/// z1 = e^{i(phi+theta)/2} cos(beta/2), z2 = e^{i(phi-theta)/2} sin(beta/2).
pub fn s3_from_angles(phi: f64, theta: f64, beta: f64) -> Result<S3Point> {
    check_beta(beta)?;
    let half = 0.5 * beta;
    let z1 = Complex64::from_polar(half.cos(), 0.5 * (phi + theta));
    let z2 = Complex64::from_polar(half.sin(), 0.5 * (phi - theta));
    Ok(S3Point { z1, z2 })
}

/// Validate the connection matrix against finite differences of the frame
/// along a sampled (theta, beta) path: the first-order prediction
/// e_i(k+1) ~ e_i(k) + sum_j w_ji e_j(k) must miss by O(h^2).
///
/// Note the index order: the displayed matrix satisfies
/// d e_i = sum_j w_ji e_j for the frame of `local_frame`.
pub fn finite_rotation_check(frames: &[Frame], angles: &[(f64, f64)]) -> Result<f64> {
    if frames.len() != angles.len() || frames.len() < 2 {
        return Err(Error::InvalidGrid(
            "frame path and angle path must have equal length >= 2".into(),
        ));
    }
    let mut worst = 0.0f64;
    for k in 0..frames.len() - 1 {
        let (t0, b0) = angles[k];
        let (t1, b1) = angles[k + 1];
        let w = connection_matrix(t0, b0, t1 - t0, b1 - b0);
        let e = [frames[k].e1.v3(), frames[k].e2.v3(), frames[k].e3.v3()];
        let enext = [
            frames[k + 1].e1.v3(),
            frames[k + 1].e2.v3(),
            frames[k + 1].e3.v3(),
        ];
        for i in 0..3 {
            let mut pred = e[i];
            for j in 0..3 {
                pred = vec3::add(pred, vec3::scale(e[j], w[j][i]));
            }
            let res = vec3::norm(vec3::sub(enext[i], pred));
            worst = worst.max(res);
        }
    }
    Ok(worst)
}
