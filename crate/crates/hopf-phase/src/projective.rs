//! The explicit diffeomorphism between S^2 and CP^1, plus the chart atlas
//! of CP^1. This is the bridge that lets the Gauss curve on the sphere be
//! read as the base curve of the Hopf bundle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::SpherePoint;
use crate::hopf::{CP1Point, CHART_TOL};

/// Affine chart value of a CP^1 point: chart 1 reads z2/z1, chart 2 reads
/// z1/z2; the transition on the overlap is z -> 1/z.
pub fn chart(chart_id: u8, p: &CP1Point) -> Result<Complex64> {
    match chart_id {
        1 => {
            if p.z1.norm() < CHART_TOL {
                return Err(Error::ChartDomain {
                    chart: 1,
                    modulus: p.z1.norm(),
                });
            }
            Ok(p.z2 / p.z1)
        }
        2 => {
            if p.z2.norm() < CHART_TOL {
                return Err(Error::ChartDomain {
                    chart: 2,
                    modulus: p.z2.norm(),
                });
            }
            Ok(p.z1 / p.z2)
        }
        _ => Err(Error::Config(format!(
            "chart must be 1 or 2, got {chart_id}"
        ))),
    }
}

/// h: S^2 -> CP^1. The branch switches at the equator so each formula stays
/// far from its singular denominator.
pub fn sphere_to_cp1(p: SpherePoint) -> CP1Point {
    let one = Complex64::new(1.0, 0.0);
    if p.z >= 0.0 {
        let w = Complex64::new(p.x, -p.y) / (1.0 + p.z);
        CP1Point::new(one, w).expect("nonzero representative")
    } else {
        let w = Complex64::new(p.x, p.y) / (1.0 - p.z);
        CP1Point::new(w, one).expect("nonzero representative")
    }
}

/// h^{-1}: CP^1 -> S^2, using whichever chart holds the larger coordinate.
pub fn cp1_to_sphere(p: &CP1Point) -> SpherePoint {
    if p.z1.norm() >= p.z2.norm() {
        let w = p.z2 / p.z1;
        let d = 1.0 + w.norm_sqr();
        SpherePoint {
            x: 2.0 * w.re / d,
            y: -2.0 * w.im / d,
            z: (1.0 - w.norm_sqr()) / d,
        }
    } else {
        let w = p.z1 / p.z2;
        let d = 1.0 + w.norm_sqr();
        SpherePoint {
            x: 2.0 * w.re / d,
            y: 2.0 * w.im / d,
            z: (w.norm_sqr() - 1.0) / d,
        }
    }
}
