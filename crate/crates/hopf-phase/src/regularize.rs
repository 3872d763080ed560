//! Pole regularization: clamp beta to [eps, pi - eps] so the Gauss curve
//! dodges the poles, and recover the geometric phase as the eps -> 0 limit
//! of the line integral along the clamped curve.
//!
//! Winding indices are only ever computed on the clamped curve; the raw
//! curve may sit exactly on a pole and carries no index information there.

use std::f64::consts::{FRAC_PI_8, PI};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::motion::{AngleEval, SampledPath};
use crate::quad;

/// A sampled path together with its pole-clamped tilt.
#[derive(Debug, Clone)]
pub struct RegularizedPath {
    pub epsilon: f64,
    pub base: SampledPath,
    pub beta_eps: Vec<f64>,
}

fn clamp3(beta: f64, eps: f64) -> f64 {
    if beta <= eps {
        eps
    } else if beta >= PI - eps {
        PI - eps
    } else {
        beta
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < FRAC_PI_8) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    Ok(())
}

/// Clamp the tilt of a sampled path, the three-case cut-off.
pub fn clamp(path: &SampledPath, epsilon: f64) -> Result<RegularizedPath> {
    check_eps(epsilon)?;
    let beta_eps = path.beta.iter().map(|&b| clamp3(b, epsilon)).collect();
    Ok(RegularizedPath {
        epsilon,
        base: path.clone(),
        beta_eps,
    })
}

/// Evaluator of the clamped motion: beta replaced by its clamp, dbeta zero
/// wherever the clamp is active.
struct ClampedEval {
    inner: Arc<dyn AngleEval>,
    eps: f64,
}

impl AngleEval for ClampedEval {
    fn theta(&self, t: f64) -> f64 {
        self.inner.theta(t)
    }
    fn beta(&self, t: f64) -> f64 {
        clamp3(self.inner.beta(t), self.eps)
    }
    fn dtheta(&self, t: f64) -> f64 {
        self.inner.dtheta(t)
    }
    fn dbeta(&self, t: f64) -> f64 {
        let b = self.inner.beta(t);
        if b <= self.eps || b >= PI - self.eps {
            0.0
        } else {
            self.inner.dbeta(t)
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

impl RegularizedPath {
    /// True where the clamp replaced the raw tilt.
    pub fn clamped_mask(&self) -> Vec<bool> {
        self.base
            .beta
            .iter()
            .map(|&b| b <= self.epsilon || b >= PI - self.epsilon)
            .collect()
    }

    /// View the regularized motion as an ordinary sampled path. Clamp
    /// engage/release nodes are flagged as corners so quadratures drop to
    /// trapezoid across the kink.
    pub fn as_path(&self) -> SampledPath {
        let mask = self.clamped_mask();
        let mut p = self.base.clone();
        p.beta = self.beta_eps.clone();
        for (k, &clamped) in mask.iter().enumerate() {
            if clamped {
                p.dbeta[k] = 0.0;
            }
        }
        let mut corners = p.corners.clone();
        for k in 0..mask.len() - 1 {
            if mask[k] != mask[k + 1] {
                corners.push(k);
                corners.push(k + 1);
            }
        }
        corners.sort_unstable();
        corners.dedup();
        p.corners = corners;
        // swap in the clamped evaluator so one-step integrators see the
        // same motion between nodes
        let eval = Arc::new(ClampedEval {
            inner: self.base.eval_arc(),
            eps: self.epsilon,
        });
        SampledPath { eval, ..p }
    }

    /// Line integral of -cos(beta_eps) dtheta along the clamped curve.
    pub fn line_integral(&self) -> f64 {
        let p = self.as_path();
        let f: Vec<f64> = p
            .beta
            .iter()
            .zip(&p.dtheta)
            .map(|(&b, &dth)| -(b.cos() * dth))
            .collect();
        quad::integrate(&f, p.h(), &p.corners)
    }
}

/// Per-epsilon line integrals and their extrapolated limit.
///
/// The clamp contribution vanishes as a power of eps whose exponent depends
/// on how the tilt meets the cut (eps^2 for a flat floor, eps^(5/2) for a
/// transversal touch), so the limit is taken by geometric continuation of
/// the last three rungs with the observed ratio.
pub fn regularized_phase(path: &SampledPath, epsilons: &[f64]) -> Result<(Vec<(f64, f64)>, f64)> {
    if epsilons.is_empty() {
        return Err(Error::EpsilonOutOfRange(f64::NAN));
    }
    for w in epsilons.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::Config(format!(
                "epsilon ladder must decrease: {} then {}",
                w[0], w[1]
            )));
        }
    }
    let mut values = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        check_eps(eps)?;
        values.push((eps, clamp(path, eps)?.line_integral()));
    }
    Ok((values.clone(), extrapolate(&values)))
}

fn extrapolate(values: &[(f64, f64)]) -> f64 {
    let last = values[values.len() - 1].1;
    if values.len() < 3 {
        return last;
    }
    let v1 = values[values.len() - 3].1;
    let v2 = values[values.len() - 2].1;
    let d1 = v2 - v1;
    let d2 = last - v2;
    // converged, or not geometrically decaying: take the last rung
    if d2.abs() < 1e-13 || d1.abs() <= d2.abs() {
        return last;
    }
    let ratio = d2 / d1;
    last + d2 * ratio / (1.0 - ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::{make_motion, sample, Family};
    use crate::phase::geometric_phase;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, TAU};

    const LADDER: [f64; 4] = [0.08, 0.04, 0.02, 0.01];

    fn path(family: Family, turns: i64, n: usize) -> SampledPath {
        sample(&make_motion(family, turns, 1.0, 1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn clamp_floor_for_flat_motion() {
        let p = path(Family::ConstantTilt { beta0: 0.0 }, 1, 256);
        let r = clamp(&p, 0.01).unwrap();
        assert!(r.beta_eps.iter().all(|&b| b == 0.01));
    }

    #[test]
    fn clamp_noop_away_from_poles() {
        let p = path(Family::ConstantTilt { beta0: FRAC_PI_2 }, 1, 256);
        let r = clamp(&p, 0.1).unwrap();
        assert_eq!(r.beta_eps, p.beta);
    }

    #[test]
    fn clamp_flat_floor_over_pole_crossing() {
        // sweep down to the pole: the clamped tilt has a flat floor there
        let p = path(
            Family::TiltSweep {
                beta0: 0.5,
                beta1: 0.0,
            },
            1,
            512,
        );
        let r = clamp(&p, 0.05).unwrap();
        let floor: Vec<usize> = (0..=512).filter(|&k| r.beta_eps[k] == 0.05).collect();
        assert!(floor.len() > 2, "expected a clamped interval");
        // contiguous interval around t = 1/2
        assert!(floor.windows(2).all(|w| w[1] == w[0] + 1));
        assert!(floor.contains(&256));
    }

    #[test]
    fn clamp_is_idempotent() {
        let p = path(
            Family::Wobble {
                beta0: 0.3,
                amplitude: 0.29,
                frequency: 2,
            },
            1,
            512,
        );
        let r1 = clamp(&p, 0.07).unwrap();
        let r2 = clamp(&r1.as_path(), 0.07).unwrap();
        assert_eq!(r1.beta_eps, r2.beta_eps);
    }

    #[test]
    fn smaller_eps_touches_fewer_nodes() {
        let p = path(
            Family::Wobble {
                beta0: 0.3,
                amplitude: 0.29,
                frequency: 2,
            },
            1,
            512,
        );
        let coarse = clamp(&p, 0.08).unwrap();
        let fine = clamp(&p, 0.02).unwrap();
        for k in 0..=512 {
            if coarse.beta_eps[k] == p.beta[k] {
                assert_eq!(fine.beta_eps[k], p.beta[k]);
            }
        }
    }

    #[test]
    fn eps_out_of_range() {
        let p = path(Family::ConstantTilt { beta0: 1.0 }, 1, 256);
        assert!(matches!(clamp(&p, 0.0), Err(Error::EpsilonOutOfRange(_))));
        assert!(matches!(clamp(&p, 0.5), Err(Error::EpsilonOutOfRange(_))));
    }

    #[test]
    fn latitude_every_rung_gives_the_phase() {
        let p = path(Family::ConstantTilt { beta0: FRAC_PI_3 }, 1, 512);
        let (values, limit) = regularized_phase(&p, &LADDER).unwrap();
        for (_, v) in values {
            assert!((v + std::f64::consts::PI).abs() < 1e-12);
        }
        assert!((limit + std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn flat_disc_rungs_match_cos_eps() {
        let p = path(Family::ConstantTilt { beta0: 0.0 }, 1, 512);
        let (values, limit) = regularized_phase(&p, &LADDER).unwrap();
        for (eps, v) in values {
            assert!((v + TAU * eps.cos()).abs() < 1e-12, "eps {eps} gave {v}");
        }
        assert!((limit + TAU).abs() < 1e-7, "limit {limit}");
        assert!((limit - geometric_phase(&p)).abs() < 1e-6);
    }

    #[test]
    fn limit_matches_raw_phase_on_builtin_families() {
        let cases = vec![
            Family::ConstantTilt { beta0: FRAC_PI_3 },
            Family::ConstantTilt { beta0: 0.0 },
            Family::Wobble {
                beta0: FRAC_PI_2,
                amplitude: FRAC_PI_3,
                frequency: 2,
            },
            Family::TiltSweep {
                beta0: 0.4,
                beta1: 0.0,
            },
        ];
        for family in cases {
            let p = path(family, 1, 8192);
            let raw = geometric_phase(&p);
            let (_, limit) = regularized_phase(&p, &LADDER).unwrap();
            assert!((limit - raw).abs() < 1e-6, "limit {limit} vs raw {raw}");
        }
    }

    #[test]
    fn rung_errors_shrink_second_order_in_eps() {
        // pole-touching sweep: the clamp is active, so rung values move
        let p = path(
            Family::TiltSweep {
                beta0: 0.5,
                beta1: 0.0,
            },
            1,
            8192,
        );
        let (values, _) = regularized_phase(&p, &[0.1, 0.05, 0.025]).unwrap();
        let raw = geometric_phase(&p);
        let e: Vec<f64> = values.iter().map(|(_, v)| (v - raw).abs()).collect();
        let r1 = e[0] / e[1];
        let r2 = e[1] / e[2];
        assert!(r1 > 2.5 && r2 > 2.5, "ratios {r1} {r2} (want near 4)");
    }

    #[test]
    fn ladder_must_decrease() {
        let p = path(Family::ConstantTilt { beta0: 1.0 }, 1, 256);
        assert!(regularized_phase(&p, &[0.01, 0.02]).is_err());
    }
}
