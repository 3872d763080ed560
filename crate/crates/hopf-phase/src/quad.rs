//! Quadrature on the uniform grid: composite Simpson over pairs of
//! intervals, a quadratic half-rule for the odd cumulative nodes, and a
//! trapezoid fallback on interval pairs that contain a corner node.

/// Deterministic pairwise summation. The reduction tree depends only on the
/// slice length, so sums are bit-stable across runs and, for mirrored input
/// of power-of-two length, exactly antisymmetric.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    match x.len() {
        0 => 0.0,
        1 => x[0],
        2 => x[0] + x[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
        }
    }
}

fn is_corner(corners: &[usize], node: usize) -> bool {
    corners.binary_search(&node).is_ok()
}

/// Integral over one pair of intervals [2j, 2j+2]: returns the two
/// half-integrals (first half, second half).
///
/// Smooth pair: Simpson split with the quadratic interpolant,
///   h/12 (5 f0 + 8 f1 - f2) and h/12 (-f0 + 8 f1 + 5 f2);
/// the halves add up to the classic h/3 (f0 + 4 f1 + f2).
/// A corner strictly inside the pair forces trapezoid halves.
fn pair_halves(f0: f64, f1: f64, f2: f64, h: f64, corner_inside: bool) -> (f64, f64) {
    if corner_inside {
        (0.5 * h * (f0 + f1), 0.5 * h * (f1 + f2))
    } else {
        (
            h / 12.0 * (5.0 * f0 + 8.0 * f1 - f2),
            h / 12.0 * (-f0 + 8.0 * f1 + 5.0 * f2),
        )
    }
}

/// Symmetric single value for a pair: written so that reversing and negating
/// the samples negates the result exactly in floating point.
fn pair_total(f0: f64, f1: f64, f2: f64, h: f64, corner_inside: bool) -> f64 {
    if corner_inside {
        0.5 * h * ((f0 + f1) + (f1 + f2))
    } else {
        h / 3.0 * ((f0 + f2) + 4.0 * f1)
    }
}

/// Composite integral of samples `f` over a uniform grid of spacing `h`.
/// `corners` lists node indices (sorted) where the integrand may kink.
///
/// Panics if the interval count is odd; sampled paths enforce even N.
pub fn integrate(f: &[f64], h: f64, corners: &[usize]) -> f64 {
    assert!(
        f.len() >= 3 && f.len() % 2 == 1,
        "need an even interval count"
    );
    let pairs: Vec<f64> = (0..f.len() / 2)
        .map(|j| {
            let k = 2 * j;
            let corner = is_corner(corners, k + 1);
            pair_total(f[k], f[k + 1], f[k + 2], h, corner)
        })
        .collect();
    pairwise_sum(&pairs)
}

/// Cumulative integral: node k holds the integral of `f` from node 0 to k.
pub fn cumulative(f: &[f64], h: f64, corners: &[usize]) -> Vec<f64> {
    assert!(
        f.len() >= 3 && f.len() % 2 == 1,
        "need an even interval count"
    );
    let mut out = Vec::with_capacity(f.len());
    out.push(0.0);
    let mut acc = 0.0;
    for j in 0..f.len() / 2 {
        let k = 2 * j;
        let corner = is_corner(corners, k + 1);
        let (a, b) = pair_halves(f[k], f[k + 1], f[k + 2], h, corner);
        acc += a;
        out.push(acc);
        acc += b;
        out.push(acc);
    }
    out
}

/// Distance between two angles on the circle, in [0, pi].
pub fn mod_2pi_distance(a: f64, b: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let d = (a - b).rem_euclid(tau);
    d.min(tau - d)
}

/// Principal value in (-pi, pi].
pub fn principal_angle(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut d = a.rem_euclid(tau);
    if d > std::f64::consts::PI {
        d -= tau;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample(f: impl Fn(f64) -> f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| f(k as f64 / n as f64)).collect()
    }

    #[test]
    fn integrates_cubic_exactly() {
        // Simpson is exact on cubics.
        let n = 16;
        let f = sample(|t| 2.0 * t * t * t - t * t + 3.0 * t - 1.0, n);
        let got = integrate(&f, 1.0 / n as f64, &[]);
        assert!((got - (0.5 - 1.0 / 3.0 + 1.5 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn fourth_order_on_smooth_integrand() {
        let exact = 1.0 - (1.0f64).cos();
        let err = |n: usize| {
            let f = sample(|t| t.sin(), n);
            (integrate(&f, 1.0 / n as f64, &[]) - exact).abs()
        };
        let ratio = err(16) / err(32);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn cumulative_matches_total_and_starts_at_zero() {
        let n = 64;
        let f = sample(|t| (2.0 * PI * t).cos() + 0.3, n);
        let cum = cumulative(&f, 1.0 / n as f64, &[]);
        assert_eq!(cum[0], 0.0);
        let total = integrate(&f, 1.0 / n as f64, &[]);
        assert!((cum[n] - total).abs() < 1e-14);
    }

    #[test]
    fn corner_fallback_keeps_accuracy() {
        // kink at node 33 of 64, strictly inside a Simpson pair
        let kink = 33.0 / 64.0;
        let exact = (kink * kink + (1.0 - kink) * (1.0 - kink)) / 2.0;
        let f = sample(|t| (t - kink).abs(), 64);
        // trapezoid on the corner pair is exact for a piecewise-linear
        // integrand; without the corner flag Simpson misfits the kink
        let flagged = integrate(&f, 1.0 / 64.0, &[33]);
        assert!((flagged - exact).abs() < 1e-15);
        let unflagged = integrate(&f, 1.0 / 64.0, &[]);
        assert!((unflagged - exact).abs() > 1e-7);
    }

    #[test]
    fn reversal_negates_total_exactly() {
        let n = 256; // power of two so the pairwise tree mirrors onto itself
        let f = sample(|t| (7.3 * t).sin() * (1.0 + t), n);
        let rev: Vec<f64> = f.iter().rev().map(|v| -v).collect();
        let a = integrate(&f, 1.0 / n as f64, &[]);
        let b = integrate(&rev, 1.0 / n as f64, &[]);
        assert_eq!(a, -b);
    }

    #[test]
    fn mod_2pi_distance_wraps() {
        assert!(mod_2pi_distance(0.1, 0.1 + 4.0 * PI) < 1e-12);
        assert!((mod_2pi_distance(-PI, PI) - 0.0).abs() < 1e-12);
        assert!((mod_2pi_distance(0.0, PI) - PI).abs() < 1e-12);
    }
}
