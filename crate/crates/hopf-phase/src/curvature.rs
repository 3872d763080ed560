//! Arclength reparameterization of the Gauss curve, the compass angle of
//! its velocity against the east frame leg, geodesic curvature, and the
//! turning-number identity delta_g = 2 pi (1 - I+) + loop integral of
//! kappa_g ds.
//!
//! Sign conventions follow the frame machinery of `geometry`: the compass
//! angle phi_c solves cos(phi_c) = -sin(beta) dtheta/ds and sin(phi_c) =
//! dbeta/ds, so a latitude traversed eastward carries the constant compass
//! angle pi, and kappa_g ds = d phi_c - cos(beta) dtheta.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::vec3::{self, V3};
use crate::lift::LiftedPath;
use crate::motion::SampledPath;
use crate::quad::{self, principal_angle};
use crate::regularize;
use crate::topology;

/// Nodes slower than this are treated as stationary.
pub const SPEED_FLOOR: f64 = 1e-9;

/// Arclength data of one sampled Gauss curve.
#[derive(Debug, Clone)]
pub struct ArclengthPath {
    /// Cumulative length per node; s[0] = 0, s[N] = total.
    pub s: Vec<f64>,
    /// Total length L of the curve.
    pub total: f64,
    /// |g'(t)| per node.
    pub speed: Vec<f64>,
    /// True where the Gauss vector is (numerically) at rest.
    pub stationary: Vec<bool>,
}

/// Compass angle and geodesic curvature per node.
#[derive(Debug, Clone)]
pub struct CompassProfile {
    /// Unwrapped compass angle phi_c.
    pub phi_c: Vec<f64>,
    /// Geodesic curvature; zero at stationary nodes (and excluded from
    /// loop quadratures there, where ds = 0 anyway).
    pub kappa_g: Vec<f64>,
}

/// Cumulative arclength by quadrature of sqrt(sin^2(beta) theta'^2 + beta'^2).
pub fn arclength(path: &SampledPath) -> Result<ArclengthPath> {
    let speed: Vec<f64> = (0..=path.n())
        .map(|k| {
            let sb = path.beta[k].sin();
            ((sb * path.dtheta[k]).powi(2) + path.dbeta[k].powi(2)).sqrt()
        })
        .collect();
    let s = quad::cumulative(&speed, path.h(), &path.corners);
    let total = s[path.n()];
    if total < 1e-9 {
        return Err(Error::DegenerateCurve(total));
    }
    let stationary = speed.iter().map(|&v| v < SPEED_FLOOR).collect();
    Ok(ArclengthPath {
        s,
        total,
        speed,
        stationary,
    })
}

/// Unwrapped compass angle per node. Stationary stretches hold the last
/// moving value; leading stationary nodes take the first.
pub fn compass_angle(path: &SampledPath) -> Result<Vec<f64>> {
    let arc = arclength(path)?;
    let n = path.n();
    let mut phi = vec![f64::NAN; n + 1];
    let mut prev: Option<f64> = None;
    #[allow(clippy::needless_range_loop)]
    for k in 0..=n {
        if arc.stationary[k] {
            if let Some(p) = prev {
                phi[k] = p;
            }
            continue;
        }
        let raw = path.dbeta[k].atan2(-path.beta[k].sin() * path.dtheta[k]);
        let val = match prev {
            None => raw,
            Some(p) => {
                let step = principal_angle(raw - p);
                if step.abs() > FRAC_PI_2 {
                    return Err(Error::CompassJump {
                        node: k,
                        jump: step,
                    });
                }
                p + step
            }
        };
        phi[k] = val;
        prev = Some(val);
    }
    let first = phi
        .iter()
        .copied()
        .find(|v| v.is_finite())
        .ok_or(Error::DegenerateCurve(0.0))?;
    for v in phi.iter_mut() {
        if v.is_nan() {
            *v = first;
        } else {
            break;
        }
    }
    Ok(phi)
}

/// Compass angle and formula-route geodesic curvature,
/// kappa_g = (d phi_c/dt - cos(beta) dtheta/dt) / (ds/dt).
pub fn geodesic_curvature(path: &SampledPath) -> Result<CompassProfile> {
    let arc = arclength(path)?;
    let phi_c = compass_angle(path)?;
    let n = path.n();
    let h = path.h();
    let mut kappa = vec![0.0; n + 1];
    for k in 0..=n {
        if arc.stationary[k] {
            continue;
        }
        let dphi = if k == 0 {
            (phi_c[1] - phi_c[0]) / h
        } else if k == n {
            (phi_c[n] - phi_c[n - 1]) / h
        } else {
            (phi_c[k + 1] - phi_c[k - 1]) / (2.0 * h)
        };
        kappa[k] = (dphi - path.beta[k].cos() * path.dtheta[k]) / arc.speed[k];
    }
    Ok(CompassProfile {
        phi_c,
        kappa_g: kappa,
    })
}

/// Second-kind geodesic curvature: the curve's second arclength derivative
/// dotted with the compass normal nu = -sin(phi_c) e1 + cos(phi_c) e2,
/// both sides discretized from the sampled points.
pub fn curvature_by_finite_differences(path: &SampledPath) -> Result<Vec<f64>> {
    let arc = arclength(path)?;
    let phi_c = compass_angle(path)?;
    let curve = topology::gauss_curve(path);
    let n = path.n();
    let mut kappa = vec![0.0; n + 1];
    for k in 1..n {
        if arc.stationary[k] {
            continue;
        }
        let sm = arc.s[k] - arc.s[k - 1];
        let sp = arc.s[k + 1] - arc.s[k];
        if sm < 1e-12 || sp < 1e-12 {
            continue;
        }
        let gm = curve[k - 1].v3();
        let g0 = curve[k].v3();
        let gp = curve[k + 1].v3();
        let second = vec3::scale(
            vec3::sub(
                vec3::scale(vec3::sub(gp, g0), 1.0 / sp),
                vec3::scale(vec3::sub(g0, gm), 1.0 / sm),
            ),
            2.0 / (sm + sp),
        );
        kappa[k] = vec3::dot(second, compass_normal(path, k, phi_c[k]));
    }
    kappa[0] = kappa[1];
    kappa[n] = kappa[n - 1];
    Ok(kappa)
}

fn compass_normal(path: &SampledPath, k: usize, phi_c: f64) -> V3 {
    let (theta, beta) = (path.theta[k], path.beta[k]);
    let (st, ct) = (theta.sin(), theta.cos());
    let (sb, cb) = (beta.sin(), beta.cos());
    let e1 = [-st, ct, 0.0];
    let e2 = [-cb * ct, -cb * st, sb];
    vec3::add(vec3::scale(e1, -phi_c.sin()), vec3::scale(e2, phi_c.cos()))
}

/// Loop integral of kappa_g ds, skipping stationary nodes (ds = 0 there).
pub fn total_curvature(path: &SampledPath, profile: &CompassProfile) -> Result<f64> {
    let arc = arclength(path)?;
    let integrand: Vec<f64> = (0..=path.n())
        .map(|k| {
            if arc.stationary[k] {
                0.0
            } else {
                profile.kappa_g[k] * arc.speed[k]
            }
        })
        .collect();
    Ok(quad::integrate(&integrand, path.h(), &path.corners))
}

/// Results of the index-curvature identity check.
#[derive(Debug, Clone)]
pub struct CorollaryCheck {
    pub delta_g: f64,
    pub i_plus: u8,
    pub i_minus: u8,
    pub total_kappa: f64,
    pub compass_turn: f64,
    /// |RHS - delta_g| for the three equivalent right-hand sides
    /// 2 pi (I+ - 1) + K, 2 pi (1 - I-) + K, pi (I+ - I-) + K.
    pub residuals: [f64; 3],
}

/// Check delta_g = 2 pi (I+ - 1) + loop kappa_g ds on the regularized curve
/// at the smallest ladder rung, with the extrapolated regularized phase.
///
/// The identity combines the running-phase relation delta_g(t) = phi_c(0) -
/// phi_c(t) + int kappa_g ds with the turning count phi_c(1) - phi_c(0) =
/// 2 pi (1 - I+); all three right-hand sides agree identically under
/// I+ + I- = 2. Table motions with corners are excluded; the turning-number
/// argument needs a smooth curve.
pub fn corollary_check(path: &SampledPath, eps_ladder: &[f64]) -> Result<CorollaryCheck> {
    if !path.corners.is_empty() {
        return Err(Error::CornersUnsupported);
    }
    let (_, delta_g) = regularize::regularized_phase(path, eps_ladder)?;
    let eps_min = *eps_ladder.last().unwrap();
    let reg = regularize::clamp(path, eps_min)?.as_path();

    let curve = topology::gauss_curve(&reg);
    let poly = topology::best_chart_projection(&curve)?;
    if let Some((i, j)) = topology::find_self_intersection(&poly) {
        return Err(Error::NotSimple(i, j));
    }
    let (i_plus, i_minus) = topology::pole_indices(&curve)?;

    let profile = geodesic_curvature(&reg)?;
    let total_kappa = total_curvature(&reg, &profile)?;
    let compass_turn = profile.phi_c[reg.n()] - profile.phi_c[0];

    let rhs = [
        TAU * (i_plus as f64 - 1.0) + total_kappa,
        TAU * (1.0 - i_minus as f64) + total_kappa,
        PI * (i_plus as f64 - i_minus as f64) + total_kappa,
    ];
    Ok(CorollaryCheck {
        delta_g,
        i_plus,
        i_minus,
        total_kappa,
        compass_turn,
        residuals: [
            (rhs[0] - delta_g).abs(),
            (rhs[1] - delta_g).abs(),
            (rhs[2] - delta_g).abs(),
        ],
    })
}

/// Residuals of the horizontal-lift relation d phi = -d phi_c + kappa_g ds.
#[derive(Debug, Clone)]
pub struct LemmaOmegaCheck {
    /// Worst per-step mismatch of the three-term balance.
    pub per_step: f64,
    /// Worst node mismatch of the integrated form
    /// delta_g(t) = phi_c(0) - phi_c(t) + int_0^{s(t)} kappa_g ds.
    pub global: f64,
}

/// Verify, along a lifted smooth motion, that the fiber coordinate moves by
/// -d phi_c + kappa_g ds per step, and its integrated (running phase) form
/// at every node.
pub fn lemma_omega_check(path: &SampledPath, lifted: &LiftedPath) -> Result<LemmaOmegaCheck> {
    if !path.corners.is_empty() {
        return Err(Error::CornersUnsupported);
    }
    let arc = arclength(path)?;
    let profile = geodesic_curvature(path)?;
    let n = path.n();
    let h = path.h();

    let mut per_step = 0.0f64;
    for k in 0..n {
        let dphi_fiber = lifted.phi[k + 1] - lifted.phi[k];
        let dphi_c = profile.phi_c[k + 1] - profile.phi_c[k];
        let kds = 0.5
            * h
            * (profile.kappa_g[k] * arc.speed[k] + profile.kappa_g[k + 1] * arc.speed[k + 1]);
        per_step = per_step.max((dphi_fiber + dphi_c - kds).abs());
    }

    let kappa_integrand: Vec<f64> = (0..=n)
        .map(|k| {
            if arc.stationary[k] {
                0.0
            } else {
                profile.kappa_g[k] * arc.speed[k]
            }
        })
        .collect();
    let kappa_cum = quad::cumulative(&kappa_integrand, h, &path.corners);
    let running = crate::phase::running_geometric_phase(path);
    let mut global = 0.0f64;
    for k in 0..=n {
        let rhs = profile.phi_c[0] - profile.phi_c[k] + kappa_cum[k];
        global = global.max((running[k] - rhs).abs());
    }
    Ok(LemmaOmegaCheck { per_step, global })
}
