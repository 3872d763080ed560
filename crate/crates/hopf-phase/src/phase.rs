//! Dynamical and geometric phases of one motion cycle.
//!
//! The geometric phase is the line integral
//!     delta_g = -int_0^1 cos(beta(t)) theta'(t) dt,
//! reported as a real number, never reduced mod 2*pi: the winding part of
//! the answer lives in the covering space of U(1) and reduction would
//! destroy it.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::motion::SampledPath;
use crate::quad;

/// Phases of one cycle, plus the running geometric phase per grid node.
#[derive(Debug, Clone)]
pub struct PhaseResult {
    pub delta_d: f64,
    pub delta_g: f64,
    pub delta_total: f64,
    pub running_delta_g: Vec<f64>,
}

impl PhaseResult {
    pub fn compute(path: &SampledPath, a: f64, b: f64) -> Result<Self> {
        let n = path.closure_winding()?;
        let delta_d = dynamical_phase(a, b, n)?;
        let delta_g = geometric_phase(path);
        let running_delta_g = running_geometric_phase(path);
        Ok(Self {
            delta_d,
            delta_g,
            delta_total: delta_d + delta_g,
            running_delta_g,
        })
    }
}

/// Rolling contribution 2*pi*n*a/b.
pub fn dynamical_phase(a: f64, b: f64, n: i64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::NonPositiveRadius {
            name: "a",
            value: a,
        });
    }
    if b.is_nan() || b <= 0.0 {
        return Err(Error::NonPositiveRadius {
            name: "b",
            value: b,
        });
    }
    Ok(TAU * n as f64 * a / b)
}

fn integrand(path: &SampledPath) -> Vec<f64> {
    path.beta
        .iter()
        .zip(&path.dtheta)
        .map(|(&b, &dth)| -(b.cos() * dth))
        .collect()
}

/// Composite-Simpson value of -int cos(beta) dtheta over the cycle.
pub fn geometric_phase(path: &SampledPath) -> f64 {
    quad::integrate(&integrand(path), path.h(), &path.corners)
}

/// Cumulative quadrature: node k holds -int_0^{t_k} cos(beta) theta' dt.
pub fn running_geometric_phase(path: &SampledPath) -> Vec<f64> {
    quad::cumulative(&integrand(path), path.h(), &path.corners)
}
