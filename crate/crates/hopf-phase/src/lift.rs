//! Horizontal lift of the Gauss curve to S^3, parallel displacement,
//! holonomy, and the identity between the running geometric phase and the
//! fiber coordinate of the lift.
//!
//! The primary lift integrates the scalar fiber ODE phi' = -cos(beta)
//! theta' with the classical fourth-order one-step method; an embedded C^2
//! integration of the horizontal vector field cross-checks the connection
//! machinery end to end. A Levi-Civita transport oracle on S^2 gives an
//! independent mod-2*pi reference.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::vec3::{self, V3};
use crate::geometry::{s3_from_angles, S3Point};
use crate::hopf::{canonical_connection, TangentS3};
use crate::motion::{Concatenated, SampledPath};
use crate::phase;

/// Horizontal lift of one motion: fiber coordinate per node (unwrapped),
/// the lifted S^3 points, and diagnostics of the two integration routes.
#[derive(Debug, Clone)]
pub struct LiftedPath {
    /// Fiber coordinate phi(t_k) from the scalar angle ODE.
    pub phi: Vec<f64>,
    /// Lift points reconstructed from the angles.
    pub s3: Vec<S3Point>,
    /// Fiber coordinate recovered from the embedded C^2 integration.
    pub phi_embedded: Vec<f64>,
    /// Max |omega(z')| over interior nodes, z' by a fourth-order stencil.
    pub horizontality_residual: f64,
    /// Largest per-step norm deviation of the embedded lift before its
    /// renormalization.
    pub unit_drift: f64,
}

impl LiftedPath {
    /// Worst disagreement of the two integration routes on phi.
    pub fn route_mismatch(&self) -> f64 {
        self.phi
            .iter()
            .zip(&self.phi_embedded)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Nudge a stage time off a derivative jump, into the step's interior, so
/// one-sided pieces integrate with their own branch values.
fn stage_time(t: f64, toward: f64, breakpoints: &[f64]) -> f64 {
    if breakpoints.iter().any(|&b| (b - t).abs() < 1e-13) {
        t + (toward - t) * 1e-9
    } else {
        t
    }
}

/// One classical fourth-order step for the scalar quadrature ODE
/// phi' = f(t); the stage structure collapses to Simpson with a midpoint.
fn rk4_quadrature_step(f: &dyn Fn(f64) -> f64, t0: f64, t1: f64, breakpoints: &[f64]) -> f64 {
    let h = t1 - t0;
    let k1 = f(stage_time(t0, t1, breakpoints));
    let kmid = f(t0 + 0.5 * h);
    let k4 = f(stage_time(t1, t0, breakpoints));
    h / 6.0 * (k1 + 4.0 * kmid + k4)
}

/// Sub-steps of one grid interval split at motion breakpoints, so the
/// integrator restarts at table corners.
fn substeps(t0: f64, t1: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&b| b > t0 && b < t1)
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut lo = t0;
    for c in cuts {
        out.push((lo, c));
        lo = c;
    }
    out.push((lo, t1));
    out
}

/// Horizontal vector field on S^3 over the motion, expressed from the
/// current point; annihilated by the connection wherever |z| = 1.
///
/// The phase of the smaller coordinate is always reconstructed from the
/// larger one through the fiber relation arg z1 - arg z2 = theta, so the
/// field stays smooth where a coordinate vanishes at a pole and every
/// division has a divisor of at least 1/sqrt(2).
fn horizontal_velocity(
    z: (Complex64, Complex64),
    theta: f64,
    dtheta: f64,
    dbeta: f64,
) -> (Complex64, Complex64) {
    let (z1, z2) = z;
    let (n1, n2) = (z1.norm(), z2.norm());
    let cos_beta = z1.norm_sqr() - z2.norm_sqr();
    let i = Complex64::i();
    let (u1, u2) = if n2 <= n1 {
        let u1 = z1 / n1;
        (u1, u1 * Complex64::from_polar(1.0, -theta))
    } else {
        let u2 = z2 / n2;
        (u2 * Complex64::from_polar(1.0, theta), u2)
    };
    (
        0.5 * i * dtheta * (1.0 - cos_beta) * z1 - 0.5 * dbeta * n2 * u1,
        -0.5 * i * dtheta * (1.0 + cos_beta) * z2 + 0.5 * dbeta * n1 * u2,
    )
}

/// Lift the motion horizontally starting at fiber coordinate `phi0`.
pub fn horizontal_lift(path: &SampledPath, phi0: f64) -> Result<LiftedPath> {
    let n = path.n();
    let eval = path.eval_arc();
    let f = |t: f64| -eval.beta(t).cos() * eval.dtheta(t);
    let bps = path.breakpoints().to_vec();

    // scalar angle ODE; integrate from zero so a shifted start point moves
    // every node by exactly the shift
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    let mut cur = 0.0;
    for k in 0..n {
        for (a, b) in substeps(path.t[k], path.t[k + 1], &bps) {
            cur += rk4_quadrature_step(&f, a, b, &bps);
        }
        cum.push(cur);
    }
    let phi: Vec<f64> = cum.iter().map(|c| c + phi0).collect();

    let s3: Vec<S3Point> = (0..=n)
        .map(|k| s3_from_angles(phi[k], path.theta[k], path.beta[k]))
        .collect::<Result<_>>()?;

    // embedded C^2 integration of the horizontal field
    let start = s3[0];
    let mut z = (start.z1, start.z2);
    let mut unit_drift = 0.0f64;
    let mut embedded_points = Vec::with_capacity(n + 1);
    embedded_points.push(z);
    for k in 0..n {
        for (a, b) in substeps(path.t[k], path.t[k + 1], &bps) {
            let h = b - a;
            let deriv = |t: f64, y: (Complex64, Complex64)| {
                horizontal_velocity(y, eval.theta(t), eval.dtheta(t), eval.dbeta(t))
            };
            let k1 = deriv(stage_time(a, b, &bps), z);
            let y2 = (z.0 + 0.5 * h * k1.0, z.1 + 0.5 * h * k1.1);
            let k2 = deriv(a + 0.5 * h, y2);
            let y3 = (z.0 + 0.5 * h * k2.0, z.1 + 0.5 * h * k2.1);
            let k3 = deriv(a + 0.5 * h, y3);
            let y4 = (z.0 + h * k3.0, z.1 + h * k3.1);
            let k4 = deriv(stage_time(b, a, &bps), y4);
            z = (
                z.0 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                z.1 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            );
            let norm = (z.0.norm_sqr() + z.1.norm_sqr()).sqrt();
            unit_drift = unit_drift.max((norm - 1.0).abs());
            z = (z.0 / norm, z.1 / norm);
        }
        embedded_points.push(z);
    }

    // unwrap the embedded fiber coordinate against the zero-phi reference
    let mut phi_embedded = Vec::with_capacity(n + 1);
    let mut prev = phi0;
    #[allow(clippy::needless_range_loop)]
    for k in 0..=n {
        let reference = s3_from_angles(0.0, path.theta[k], path.beta[k])?;
        let u = reference.inner(embedded_points[k].0, embedded_points[k].1);
        // u = e^{i phi/2}
        let half = prev * 0.5;
        let delta = (u * Complex64::from_polar(1.0, -half)).arg();
        let val = prev + 2.0 * delta;
        phi_embedded.push(val);
        prev = val;
    }

    // horizontality of the reconstructed lift by a fourth-order stencil
    let h = path.h();
    let mut residual = 0.0f64;
    for k in 2..n.saturating_sub(1) {
        if path
            .corners
            .iter()
            .any(|&c| (c as i64 - k as i64).abs() <= 2)
        {
            continue;
        }
        let d1 =
            (-s3[k + 2].z1 + 8.0 * s3[k + 1].z1 - 8.0 * s3[k - 1].z1 + s3[k - 2].z1) / (12.0 * h);
        let d2 =
            (-s3[k + 2].z2 + 8.0 * s3[k + 1].z2 - 8.0 * s3[k - 1].z2 + s3[k - 2].z2) / (12.0 * h);
        let v = TangentS3::new_unchecked(s3[k], d1, d2);
        residual = residual.max(canonical_connection(&v).norm());
    }

    Ok(LiftedPath {
        phi,
        s3,
        phi_embedded,
        horizontality_residual: residual,
        unit_drift,
    })
}

/// Holonomy of the closed motion: the U(1) element exp(i (phi(1) - phi(0))).
pub fn holonomy(path: &SampledPath) -> Result<Complex64> {
    path.closure_winding()?;
    let lift = horizontal_lift(path, 0.0)?;
    Ok(Complex64::from_polar(1.0, lift.phi[path.n()] - lift.phi[0]))
}

/// Max node residual between the running geometric phase and the fiber
/// coordinate increment of the lift.
pub fn fiber_coordinate_check(path: &SampledPath) -> Result<f64> {
    let lift = horizontal_lift(path, 0.0)?;
    let running = phase::running_geometric_phase(path);
    Ok(running
        .iter()
        .zip(&lift.phi)
        .map(|(r, p)| (r - (p - lift.phi[0])).abs())
        .fold(0.0, f64::max))
}

/// Residuals of the holonomy homomorphism: |tau(c2 o c1) - tau(c1) tau(c2)|
/// and |tau(c1^{-1} o c1) - 1|, for loops sharing a base point.
pub fn holonomy_homomorphism_check(path1: &SampledPath, path2: &SampledPath) -> Result<(f64, f64)> {
    let g1 = crate::geometry::gauss_vector(path1.theta[0], path1.beta[0])?;
    let g2 = crate::geometry::gauss_vector(path2.theta[0], path2.beta[0])?;
    let dist = vec3::norm(vec3::sub(g1.v3(), g2.v3()));
    if dist > 1e-9 {
        return Err(Error::BasePointMismatch(dist));
    }
    let n = path1.n().max(path2.n());
    let tau1 = holonomy(path1)?;
    let tau2 = holonomy(path2)?;

    let concat = SampledPath::from_eval(
        std::sync::Arc::new(Concatenated::new(path1.eval_arc(), path2.eval_arc())),
        2 * n,
    )?;
    let tau_concat = holonomy(&concat)?;
    let r_product = (tau_concat - tau1 * tau2).norm();

    let back_and_forth = SampledPath::from_eval(
        std::sync::Arc::new(Concatenated::new(
            path1.eval_arc(),
            std::sync::Arc::new(crate::motion::Reversed(path1.eval_arc())),
        )),
        2 * n,
    )?;
    let r_inverse = (holonomy(&back_and_forth)? - Complex64::new(1.0, 0.0)).norm();
    Ok((r_product, r_inverse))
}

/// Levi-Civita parallel transport of a unit tangent vector around the Gauss
/// curve: v' = -(v . g') g, integrated fourth order with per-step
/// renormalization and re-projection. Returns the signed rotation angle of
/// the returned vector against the start vector, measured in the initial
/// tangent plane; congruent to delta_g mod 2*pi.
pub fn transport_oracle(path: &SampledPath) -> Result<f64> {
    path.closure_winding()?;
    let eval = path.eval_arc();
    let g = |t: f64| -> V3 {
        let (theta, beta) = (eval.theta(t), eval.beta(t));
        let (sb, cb) = (beta.sin(), beta.cos());
        [sb * theta.cos(), sb * theta.sin(), cb]
    };
    let dg = |t: f64| -> V3 {
        let (theta, beta) = (eval.theta(t), eval.beta(t));
        let (dth, dbe) = (eval.dtheta(t), eval.dbeta(t));
        let (sb, cb) = (beta.sin(), beta.cos());
        let (st, ct) = (theta.sin(), theta.cos());
        [
            cb * ct * dbe - sb * st * dth,
            cb * st * dbe + sb * ct * dth,
            -sb * dbe,
        ]
    };

    // start vector: the east frame leg at t = 0
    let frame = crate::geometry::local_frame(path.theta[0], path.beta[0])?;
    let v0 = frame.e1.v3();
    let g0 = frame.e3.v3();

    let deriv = |t: f64, v: V3| -> V3 { vec3::scale(g(t), -vec3::dot(v, dg(t))) };
    let mut v = v0;
    let bps = path.breakpoints().to_vec();
    for k in 0..path.n() {
        for (a, b) in substeps(path.t[k], path.t[k + 1], &bps) {
            let h = b - a;
            let k1 = deriv(stage_time(a, b, &bps), v);
            let k2 = deriv(a + 0.5 * h, vec3::add(v, vec3::scale(k1, 0.5 * h)));
            let k3 = deriv(a + 0.5 * h, vec3::add(v, vec3::scale(k2, 0.5 * h)));
            let k4 = deriv(stage_time(b, a, &bps), vec3::add(v, vec3::scale(k3, h)));
            let step = vec3::add(vec3::add(k1, vec3::scale(vec3::add(k2, k3), 2.0)), k4);
            v = vec3::add(v, vec3::scale(step, h / 6.0));
            // re-project to the tangent plane and renormalize
            let gb = g(b);
            v = vec3::sub(v, vec3::scale(gb, vec3::dot(v, gb)));
            v = vec3::normalize(v);
        }
    }
    let sin_part = vec3::dot(v, vec3::cross(g0, v0));
    let cos_part = vec3::dot(v, v0);
    Ok(sin_part.atan2(cos_part))
}
