//! Closed motions of the rolling disc: analytic families, tabulated motions,
//! and sampling to a uniform grid with derivatives.
//!
//! A motion is the pair t in [0,1] -> (theta(t), beta(t)) with theta
//! unwrapped and beta in [0, pi]. Closure demands theta(1) - theta(0) =
//! 2*pi*n for an integer n (the winding count) and beta(1) = beta(0).

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::BETA_SLACK;

/// Minimum interval count for a sampled path.
pub const MIN_GRID: usize = 256;
/// Default grid: 1e-8-level quadrature on smooth families at trivial cost.
pub const DEFAULT_GRID: usize = 8192;
/// Endpoint tolerance for closure checks on tabulated motions.
pub const CLOSURE_TOL: f64 = 1e-9;

/// Pointwise access to a motion and its derivative, at arbitrary t in [0,1].
///
/// One-step integrators evaluate between grid nodes through this trait, so
/// implementations must stay consistent with the sampled arrays.
pub trait AngleEval: Send + Sync {
    fn theta(&self, t: f64) -> f64;
    fn beta(&self, t: f64) -> f64;
    fn dtheta(&self, t: f64) -> f64;
    fn dbeta(&self, t: f64) -> f64;

    /// Interior times where the derivative may jump.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Piecewise-linear tabulated motion: rows (t, theta, beta) with strictly
/// increasing t spanning [0, 1].
#[derive(Debug, Clone)]
pub struct MotionTable {
    rows: Vec<(f64, f64, f64)>,
}

impl MotionTable {
    pub fn new(rows: Vec<(f64, f64, f64)>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Config("motion table needs at least two rows".into()));
        }
        if (rows[0].0).abs() > CLOSURE_TOL || (rows[rows.len() - 1].0 - 1.0).abs() > CLOSURE_TOL {
            return Err(Error::Config(
                "motion table must span t = 0 to t = 1".into(),
            ));
        }
        for w in rows.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Config(format!(
                    "table t values must be strictly increasing: {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(t, _, beta) in &rows {
            if !(-BETA_SLACK..=PI + BETA_SLACK).contains(&beta) {
                return Err(Error::DomainViolation(format!(
                    "table beta = {beta} at t = {t} outside [0, pi]"
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Parse the plain-text format: one record per line, `t theta beta` in
    /// radians; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Config(format!(
                    "line {}: expected `t theta beta`, got {} fields",
                    lineno + 1,
                    fields.len()
                )));
            }
            let mut vals = [0.0; 3];
            for (i, f) in fields.iter().enumerate() {
                vals[i] = f.parse::<f64>().map_err(|e| {
                    Error::Config(format!("line {}: bad number {f:?}: {e}", lineno + 1))
                })?;
            }
            rows.push((vals[0], vals[1], vals[2]));
        }
        Self::new(rows)
    }

    /// Winding count implied by the theta column (nearest integer).
    pub fn winding(&self) -> f64 {
        (self.rows[self.rows.len() - 1].1 - self.rows[0].1) / TAU
    }

    fn segment(&self, t: f64) -> usize {
        // last i with rows[i].0 <= t, capped to the final segment
        match self.rows.binary_search_by(|r| r.0.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.rows.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.rows.len() - 2),
        }
    }

    fn value(&self, t: f64, pick: impl Fn(&(f64, f64, f64)) -> f64) -> f64 {
        let i = self.segment(t);
        let (t0, t1) = (self.rows[i].0, self.rows[i + 1].0);
        let (v0, v1) = (pick(&self.rows[i]), pick(&self.rows[i + 1]));
        v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
    }

    fn slope(&self, t: f64, pick: impl Fn(&(f64, f64, f64)) -> f64) -> f64 {
        let i = self.segment(t);
        let (t0, t1) = (self.rows[i].0, self.rows[i + 1].0);
        (pick(&self.rows[i + 1]) - pick(&self.rows[i])) / (t1 - t0)
    }
}

/// Built-in motion families.
///
/// Analytic families share theta(t) = 2*pi*n*t; only theta(1) = 2*pi*n
/// matters for the phases, so the uniform profile is the canonical choice.
#[derive(Debug, Clone)]
pub enum Family {
    /// beta held constant at `beta0`.
    ConstantTilt { beta0: f64 },
    /// beta(t) = beta0 + amplitude * sin(2 pi frequency t).
    Wobble {
        beta0: f64,
        amplitude: f64,
        frequency: u32,
    },
    /// beta ramps beta0 -> beta1 -> beta0 through a smooth cosine,
    /// beta(t) = beta0 + (beta1 - beta0)(1 - cos 2 pi t)/2; may touch a pole.
    TiltSweep { beta0: f64, beta1: f64 },
    /// Piecewise-linear interpolation of a table.
    PiecewiseLinearTable(MotionTable),
}

/// A validated motion: family, winding count and the two disc radii.
#[derive(Debug, Clone)]
pub struct MotionSpec {
    pub family: Family,
    pub turns: i64,
    pub a: f64,
    pub b: f64,
}

/// Validate a motion: positive radii, beta within [0, pi] for the whole
/// cycle, and the closure condition.
pub fn make_motion(family: Family, turns: i64, a: f64, b: f64) -> Result<MotionSpec> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::NonPositiveRadius {
            name: "a",
            value: a,
        });
    }
    if !b.is_finite() || b <= 0.0 {
        return Err(Error::NonPositiveRadius {
            name: "b",
            value: b,
        });
    }
    match &family {
        Family::ConstantTilt { beta0 } => {
            check_band("beta0", *beta0)?;
        }
        Family::Wobble {
            beta0,
            amplitude,
            frequency,
        } => {
            if *frequency == 0 {
                return Err(Error::DomainViolation(
                    "wobble frequency must be a positive integer".into(),
                ));
            }
            check_band("beta0", *beta0)?;
            // extremes of beta0 + A sin(.) over a cycle
            check_band("beta min", beta0 - amplitude.abs())?;
            check_band("beta max", beta0 + amplitude.abs())?;
        }
        Family::TiltSweep { beta0, beta1 } => {
            check_band("beta0", *beta0)?;
            check_band("beta1", *beta1)?;
        }
        Family::PiecewiseLinearTable(table) => {
            let w = table.winding();
            if (w - w.round()).abs() > CLOSURE_TOL {
                return Err(Error::ClosureViolation(format!(
                    "theta(1) - theta(0) = {:.6} * 2pi is not an integer number of turns",
                    w
                )));
            }
            if w.round() as i64 != turns {
                return Err(Error::ClosureViolation(format!(
                    "table winds {} turns but the spec says {}",
                    w.round(),
                    turns
                )));
            }
            let db = table.rows[table.rows.len() - 1].2 - table.rows[0].2;
            if db.abs() > CLOSURE_TOL {
                return Err(Error::ClosureViolation(format!(
                    "beta(1) - beta(0) = {db:.3e}"
                )));
            }
        }
    }
    Ok(MotionSpec {
        family,
        turns,
        a,
        b,
    })
}

fn check_band(name: &str, beta: f64) -> Result<()> {
    if !(-BETA_SLACK..=PI + BETA_SLACK).contains(&beta) {
        return Err(Error::DomainViolation(format!(
            "{name} = {beta} leaves [0, pi]"
        )));
    }
    Ok(())
}

impl AngleEval for MotionSpec {
    fn theta(&self, t: f64) -> f64 {
        match &self.family {
            Family::PiecewiseLinearTable(tab) => tab.value(t, |r| r.1),
            _ => TAU * self.turns as f64 * t,
        }
    }

    fn beta(&self, t: f64) -> f64 {
        match &self.family {
            Family::ConstantTilt { beta0 } => *beta0,
            Family::Wobble {
                beta0,
                amplitude,
                frequency,
            } => beta0 + amplitude * (TAU * *frequency as f64 * t).sin(),
            Family::TiltSweep { beta0, beta1 } => {
                beta0 + (beta1 - beta0) * 0.5 * (1.0 - (TAU * t).cos())
            }
            Family::PiecewiseLinearTable(tab) => tab.value(t, |r| r.2),
        }
    }

    fn dtheta(&self, t: f64) -> f64 {
        match &self.family {
            Family::PiecewiseLinearTable(tab) => tab.slope(t, |r| r.1),
            _ => TAU * self.turns as f64,
        }
    }

    fn dbeta(&self, t: f64) -> f64 {
        match &self.family {
            Family::ConstantTilt { .. } => 0.0,
            Family::Wobble {
                amplitude,
                frequency,
                ..
            } => {
                let w = TAU * *frequency as f64;
                amplitude * w * (w * t).cos()
            }
            Family::TiltSweep { beta0, beta1 } => (beta1 - beta0) * PI * (TAU * t).sin(),
            Family::PiecewiseLinearTable(tab) => tab.slope(t, |r| r.2),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match &self.family {
            Family::PiecewiseLinearTable(tab) => tab.rows[1..tab.rows.len() - 1]
                .iter()
                .map(|r| r.0)
                .collect(),
            _ => Vec::new(),
        }
    }
}

/// A motion discretized on the uniform grid t_k = k/N, with derivatives.
///
/// Immutable after construction; the embedded evaluator serves one-step
/// integrators that need values between nodes.
#[derive(Clone)]
pub struct SampledPath {
    pub t: Vec<f64>,
    pub theta: Vec<f64>,
    pub beta: Vec<f64>,
    pub dtheta: Vec<f64>,
    pub dbeta: Vec<f64>,
    /// Grid nodes nearest to a derivative jump, sorted.
    pub corners: Vec<usize>,
    pub(crate) breakpoints: Vec<f64>,
    pub(crate) eval: Arc<dyn AngleEval>,
}

impl std::fmt::Debug for SampledPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledPath")
            .field("nodes", &self.t.len())
            .field("corners", &self.corners)
            .finish()
    }
}

impl SampledPath {
    /// Interval count N.
    pub fn n(&self) -> usize {
        self.t.len() - 1
    }

    /// Grid spacing 1/N.
    pub fn h(&self) -> f64 {
        1.0 / self.n() as f64
    }

    pub fn eval(&self) -> &dyn AngleEval {
        self.eval.as_ref()
    }

    pub fn eval_arc(&self) -> Arc<dyn AngleEval> {
        Arc::clone(&self.eval)
    }

    /// Exact interior times where the motion derivative may jump.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Discretize an arbitrary evaluator. Derivative arrays come straight
    /// from the evaluator except around breakpoints, where one-sided value
    /// differences keep each side of a corner on its own branch.
    pub fn from_eval(eval: Arc<dyn AngleEval>, n: usize) -> Result<Self> {
        if n < MIN_GRID {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_GRID} intervals, got {n}"
            )));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "interval count must be even for Simpson pairing, got {n}"
            )));
        }
        let h = 1.0 / n as f64;
        let t: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
        let theta: Vec<f64> = t.iter().map(|&tk| eval.theta(tk)).collect();
        let beta: Vec<f64> = t.iter().map(|&tk| eval.beta(tk)).collect();
        for (k, &b) in beta.iter().enumerate() {
            if !(-BETA_SLACK..=PI + BETA_SLACK).contains(&b) {
                return Err(Error::DomainViolation(format!(
                    "beta = {b} at t = {} leaves [0, pi]",
                    t[k]
                )));
            }
        }

        let breakpoints = eval.breakpoints();
        let (dtheta, dbeta) = if breakpoints.is_empty() {
            (
                t.iter().map(|&tk| eval.dtheta(tk)).collect(),
                t.iter().map(|&tk| eval.dbeta(tk)).collect(),
            )
        } else {
            (
                side_aware_derivatives(&theta, h, &breakpoints),
                side_aware_derivatives(&beta, h, &breakpoints),
            )
        };

        let mut corners: Vec<usize> = breakpoints
            .iter()
            .map(|&bp| ((bp * n as f64).round() as usize).clamp(1, n - 1))
            .collect();
        corners.sort_unstable();
        corners.dedup();

        Ok(Self {
            t,
            theta,
            beta,
            dtheta,
            dbeta,
            corners,
            breakpoints,
            eval,
        })
    }

    /// The same motion traversed backwards: arrays are exact mirrors, so
    /// quadratures negate exactly.
    pub fn reversed(&self) -> Self {
        let flip = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
        let neg = |v: &[f64]| v.iter().rev().map(|x| -x).collect::<Vec<_>>();
        let n = self.n();
        Self {
            t: self.t.clone(),
            theta: flip(&self.theta),
            beta: flip(&self.beta),
            dtheta: neg(&self.dtheta),
            dbeta: neg(&self.dbeta),
            corners: {
                let mut c: Vec<usize> = self.corners.iter().map(|&k| n - k).collect();
                c.sort_unstable();
                c
            },
            breakpoints: {
                let mut b: Vec<f64> = self.breakpoints.iter().map(|&x| 1.0 - x).collect();
                b.sort_by(|p, q| p.partial_cmp(q).unwrap());
                b
            },
            eval: Arc::new(Reversed(Arc::clone(&self.eval))),
        }
    }

    /// Closure check per (T); returns the winding count.
    pub fn closure_winding(&self) -> Result<i64> {
        let dth = self.theta[self.n()] - self.theta[0];
        let turns = dth / TAU;
        if (turns - turns.round()).abs() * TAU > CLOSURE_TOL {
            return Err(Error::NotClosed(format!(
                "theta(1) - theta(0) = {turns:.9} * 2pi"
            )));
        }
        let db = self.beta[self.n()] - self.beta[0];
        if db.abs() > CLOSURE_TOL {
            return Err(Error::NotClosed(format!("beta(1) - beta(0) = {db:.3e}")));
        }
        Ok(turns.round() as i64)
    }
}

fn side_aware_derivatives(values: &[f64], h: f64, breakpoints: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    let has_bp = |lo: f64, hi: f64| breakpoints.iter().any(|&bp| bp > lo && bp < hi);
    (0..=n)
        .map(|k| {
            let tk = k as f64 * h;
            let left = if k > 0 {
                Some((values[k] - values[k - 1]) / h)
            } else {
                None
            };
            let right = if k < n {
                Some((values[k + 1] - values[k]) / h)
            } else {
                None
            };
            // half a node of slack so a breakpoint lands "at" its node
            let bp_left = k > 0 && has_bp(tk - h, tk - 0.5 * h);
            let bp_right = k < n && has_bp(tk + 0.5 * h, tk + h);
            let bp_at = has_bp(tk - 0.5 * h - f64::EPSILON, tk + 0.5 * h + f64::EPSILON);
            match (left, right) {
                (Some(l), Some(r)) => {
                    if bp_at || (bp_left && bp_right) {
                        0.5 * (l + r)
                    } else if bp_left {
                        r
                    } else if bp_right {
                        l
                    } else {
                        0.5 * (l + r)
                    }
                }
                (Some(l), None) => l,
                (None, Some(r)) => r,
                (None, None) => 0.0,
            }
        })
        .collect()
}

/// Discretize a validated motion on `n` intervals.
pub fn sample(spec: &MotionSpec, n: usize) -> Result<SampledPath> {
    SampledPath::from_eval(Arc::new(spec.clone()), n)
}

/// Largest per-interval slope of each angle: an upper estimate of the
/// Lipschitz constants of the sampled motion.
pub fn lipschitz_estimate(path: &SampledPath) -> (f64, f64) {
    let h = path.h();
    let mut c_theta = 0.0f64;
    let mut c_beta = 0.0f64;
    for k in 0..path.n() {
        c_theta = c_theta.max(((path.theta[k + 1] - path.theta[k]) / h).abs());
        c_beta = c_beta.max(((path.beta[k + 1] - path.beta[k]) / h).abs());
    }
    (c_theta, c_beta)
}

/// The same loop on a smoothly warped clock: t is precomposed with the
/// strictly increasing bijection u(t) = t - strength sin(2 pi t) / 2 pi,
/// valid for |strength| < 1. Line-integral phases are invariant under this.
pub struct Reparameterized {
    pub inner: Arc<dyn AngleEval>,
    pub strength: f64,
}

impl Reparameterized {
    fn u(&self, t: f64) -> f64 {
        t - self.strength / TAU * (TAU * t).sin()
    }
    fn du(&self, t: f64) -> f64 {
        1.0 - self.strength * (TAU * t).cos()
    }
}

impl AngleEval for Reparameterized {
    fn theta(&self, t: f64) -> f64 {
        self.inner.theta(self.u(t))
    }
    fn beta(&self, t: f64) -> f64 {
        self.inner.beta(self.u(t))
    }
    fn dtheta(&self, t: f64) -> f64 {
        self.inner.dtheta(self.u(t)) * self.du(t)
    }
    fn dbeta(&self, t: f64) -> f64 {
        self.inner.dbeta(self.u(t)) * self.du(t)
    }
}

/// Time reversal of an evaluator.
pub struct Reversed(pub Arc<dyn AngleEval>);

impl AngleEval for Reversed {
    fn theta(&self, t: f64) -> f64 {
        self.0.theta(1.0 - t)
    }
    fn beta(&self, t: f64) -> f64 {
        self.0.beta(1.0 - t)
    }
    fn dtheta(&self, t: f64) -> f64 {
        -self.0.dtheta(1.0 - t)
    }
    fn dbeta(&self, t: f64) -> f64 {
        -self.0.dbeta(1.0 - t)
    }
    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.0.breakpoints().iter().map(|&x| 1.0 - x).collect();
        b.sort_by(|p, q| p.partial_cmp(q).unwrap());
        b
    }
}

/// Two loops run back to back on a halved clock. The second loop's theta is
/// shifted so the contact angle stays continuous at the junction.
pub struct Concatenated {
    first: Arc<dyn AngleEval>,
    second: Arc<dyn AngleEval>,
    theta_shift: f64,
}

impl Concatenated {
    pub fn new(first: Arc<dyn AngleEval>, second: Arc<dyn AngleEval>) -> Self {
        let theta_shift = first.theta(1.0) - second.theta(0.0);
        Self {
            first,
            second,
            theta_shift,
        }
    }
}

impl AngleEval for Concatenated {
    fn theta(&self, t: f64) -> f64 {
        if t <= 0.5 {
            self.first.theta(2.0 * t)
        } else {
            self.theta_shift + self.second.theta(2.0 * t - 1.0)
        }
    }
    fn beta(&self, t: f64) -> f64 {
        if t <= 0.5 {
            self.first.beta(2.0 * t)
        } else {
            self.second.beta(2.0 * t - 1.0)
        }
    }
    fn dtheta(&self, t: f64) -> f64 {
        if t <= 0.5 {
            2.0 * self.first.dtheta(2.0 * t)
        } else {
            2.0 * self.second.dtheta(2.0 * t - 1.0)
        }
    }
    fn dbeta(&self, t: f64) -> f64 {
        if t <= 0.5 {
            2.0 * self.first.dbeta(2.0 * t)
        } else {
            2.0 * self.second.dbeta(2.0 * t - 1.0)
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .first
            .breakpoints()
            .iter()
            .map(|&x| 0.5 * x)
            .chain(std::iter::once(0.5))
            .chain(self.second.breakpoints().iter().map(|&x| 0.5 + 0.5 * x))
            .collect();
        b.sort_by(|p, q| p.partial_cmp(q).unwrap());
        b
    }
}
