//! Acceptance suite: every exit criterion of the build, one test each,
//! each printing its own pass/fail line. Run with
//!
//!     cargo test --test acceptance -- --nocapture
//!
//! Tolerances are pinned in the assertions; nothing here is calibrated at
//! run time.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hopf_phase::curvature;
use hopf_phase::geometry::{gauss_vector, s3_from_angles, S3Point};
use hopf_phase::hopf::{
    canonical_connection, chart_connection, fundamental_vector, split, transition, CP1Point,
    TangentS3,
};
use hopf_phase::lift;
use hopf_phase::motion::{make_motion, sample, Family, MotionTable, SampledPath};
use hopf_phase::phase;
use hopf_phase::projective::{chart, cp1_to_sphere, sphere_to_cp1};
use hopf_phase::quad::mod_2pi_distance;
use hopf_phase::regularize;
use hopf_phase::report;
use hopf_phase::topology;

const GRID: usize = 8192;
const LATITUDES: [f64; 5] = [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2, 2.0 * PI / 3.0];
const EPS_LADDER: [f64; 4] = [0.08, 0.04, 0.02, 0.01];

fn latitude(beta0: f64) -> SampledPath {
    let m = make_motion(Family::ConstantTilt { beta0 }, 1, 1.0, 1.0).unwrap();
    sample(&m, GRID).unwrap()
}

fn wobble(beta0: f64, amplitude: f64, frequency: u32) -> SampledPath {
    let m = make_motion(
        Family::Wobble {
            beta0,
            amplitude,
            frequency,
        },
        1,
        1.0,
        1.0,
    )
    .unwrap();
    sample(&m, GRID).unwrap()
}

fn wobble_instances() -> Vec<(SampledPath, f64)> {
    // closed form: delta_g = -2 pi cos(beta0) J0(amplitude)
    [
        (FRAC_PI_3, FRAC_PI_6, 1u32),
        (FRAC_PI_2, FRAC_PI_4, 2),
        (2.0 * PI / 5.0, PI / 8.0, 3),
    ]
    .into_iter()
    .map(|(b0, amp, m)| {
        let exact = -TAU * b0.cos() * bessel_j0(amp);
        (wobble(b0, amp, m), exact)
    })
    .collect()
}

/// Series oracle for J0, plenty accurate for |x| <= 1.
fn bessel_j0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        term *= -q / ((k * k) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// Every built-in family shape, for the "all families" criteria.
fn family_zoo() -> Vec<(&'static str, SampledPath)> {
    let mut zoo: Vec<(&'static str, SampledPath)> = vec![
        ("latitude pi/3", latitude(FRAC_PI_3)),
        ("latitude pi/2", latitude(FRAC_PI_2)),
        ("latitude 2pi/3", latitude(2.0 * PI / 3.0)),
        ("flat coin", latitude(0.0)),
        ("wobble m=1", wobble(FRAC_PI_3, FRAC_PI_6, 1)),
        ("wobble m=2", wobble(FRAC_PI_2, FRAC_PI_4, 2)),
        ("tilt sweep", {
            let m = make_motion(
                Family::TiltSweep {
                    beta0: 0.3,
                    beta1: 2.5,
                },
                1,
                1.0,
                1.0,
            )
            .unwrap();
            sample(&m, GRID).unwrap()
        }),
        ("tilt sweep pole touch", {
            let m = make_motion(
                Family::TiltSweep {
                    beta0: 0.4,
                    beta1: 0.0,
                },
                1,
                1.0,
                1.0,
            )
            .unwrap();
            sample(&m, GRID).unwrap()
        }),
        ("table diamond", {
            let table = MotionTable::new(vec![
                (0.0, 0.0, 1.3),
                (0.25, FRAC_PI_2, 1.1),
                (0.5, PI, 1.3),
                (0.75, 1.5 * PI, 1.5),
                (1.0, TAU, 1.3),
            ])
            .unwrap();
            let m = make_motion(Family::PiecewiseLinearTable(table), 1, 1.0, 1.0).unwrap();
            sample(&m, GRID).unwrap()
        }),
    ];
    zoo.shrink_to_fit();
    zoo
}

fn verdict(criterion: &str, ok: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_01_latitude_family_exactness() {
    let mut worst = 0.0f64;
    for beta0 in LATITUDES {
        let got = phase::geometric_phase(&latitude(beta0));
        worst = worst.max((got + TAU * beta0.cos()).abs());
    }
    verdict(
        "1 latitude line-integral exactness",
        worst < 1e-9,
        &format!("max |delta_g + 2 pi cos b0| = {worst:.3e}"),
    );
}

#[test]
fn criterion_02_main_theorem() {
    let mut paths: Vec<SampledPath> = LATITUDES.iter().map(|&b| latitude(b)).collect();
    paths.extend(wobble_instances().into_iter().map(|(p, _)| p));
    let mut worst = 0.0f64;
    let mut worst_algebra = 0.0f64;
    for p in &paths {
        let chk = topology::main_theorem_check(p, 0.01).unwrap();
        for r in chk.residuals {
            worst = worst.max(r);
        }
        // the three expressions collapse to one number under the exact
        // complement relations A- = 4 pi - A+, I- = 2 - I+
        let a_minus = 2.0 * TAU - chk.a_plus;
        let i_minus = 2 - chk.i_plus;
        let e1 = chk.a_plus - TAU * chk.i_plus as f64;
        let e2 = -a_minus + TAU * i_minus as f64;
        let e3 = 0.5 * (chk.a_plus - a_minus) - PI * (chk.i_plus as f64 - i_minus as f64);
        worst_algebra = worst_algebra.max((e1 - e2).abs()).max((e1 - e3).abs());
    }
    verdict(
        "2 main theorem area-index identity",
        worst < 2e-3 && worst_algebra < 1e-12,
        &format!("max residual {worst:.3e}, algebraic spread {worst_algebra:.3e}"),
    );
}

#[test]
fn criterion_03_holonomy() {
    let mut worst_tau = 0.0f64;
    let mut worst_route = 0.0f64;
    let mut worst_drift = 0.0f64;
    let mut worst_base = 0.0f64;
    for (name, p) in family_zoo() {
        let delta_g = phase::geometric_phase(&p);
        let tau = lift::holonomy(&p).unwrap();
        let d = (tau - Complex64::from_polar(1.0, delta_g)).norm();
        worst_tau = worst_tau.max(d);

        let l = lift::horizontal_lift(&p, 0.0).unwrap();
        let n = p.n();
        worst_route = worst_route.max((l.phi[n] - l.phi_embedded[n]).abs());
        worst_drift = worst_drift.max(l.unit_drift);

        // lifted points sit over the Gauss curve under the diffeomorphism
        for k in [0usize, n / 3, n / 2, n - 1] {
            let down = cp1_to_sphere(&hopf_phase::hopf::hopf_map(l.s3[k]));
            let g = gauss_vector(p.theta[k], p.beta[k]).unwrap();
            let err =
                ((down.x - g.x).powi(2) + (down.y - g.y).powi(2) + (down.z - g.z).powi(2)).sqrt();
            worst_base = worst_base.max(err);
        }
        assert!(worst_tau.is_finite(), "{name}");
    }
    verdict(
        "3 holonomy tau = exp(i delta_g)",
        worst_tau < 1e-8 && worst_route < 1e-8 && worst_drift < 1e-10 && worst_base < 1e-9,
        &format!(
            "max |tau - exp(i dg)| = {worst_tau:.3e}, route gap {worst_route:.3e}, drift {worst_drift:.3e}, base gap {worst_base:.3e}"
        ),
    );
}

#[test]
fn criterion_04_fiber_coordinate() {
    let mut worst = 0.0f64;
    for (_, p) in family_zoo() {
        worst = worst.max(lift::fiber_coordinate_check(&p).unwrap());
    }
    verdict(
        "4 fiber coordinate matches running phase",
        worst < 1e-8,
        &format!("max node residual {worst:.3e}"),
    );
}

#[test]
fn criterion_05_covering_space_distinction() {
    let m = make_motion(Family::ConstantTilt { beta0: 0.0 }, 1, 1.0, 1.0).unwrap();
    let cfg = report::config_for(m, "flat-coin");
    let rep = report::run(&cfg).unwrap();
    let line = rep.route("line_integral").unwrap().value().unwrap();
    let reg = rep.route("regularized_limit").unwrap().value().unwrap();
    let tau_gap = (rep.tau - Complex64::new(1.0, 0.0)).norm();
    let text = report::render_text(&rep);
    let shows_both = text.contains("delta_g_line_integral=") && text.contains("tau_re=");
    verdict(
        "5 covering space distinction on the flat coin",
        (line + TAU).abs() < 1e-8 && (reg + TAU).abs() < 1e-6 && tau_gap < 1e-8 && shows_both,
        &format!("delta_g(line) = {line:.9}, delta_g(reg) = {reg:.9}, |tau - 1| = {tau_gap:.3e}"),
    );
}

#[test]
fn criterion_06_curvature_corollary() {
    let mut worst = 0.0f64;
    for beta0 in LATITUDES {
        if beta0 == 0.0 {
            continue;
        }
        let chk = curvature::corollary_check(&latitude(beta0), &EPS_LADDER).unwrap();
        // the chain is fully closed form on a latitude
        assert_eq!(chk.i_plus, 1);
        assert!(
            (chk.total_kappa + TAU * beta0.cos()).abs() < 1e-6,
            "loop kappa ds = {} vs -2 pi cos b0",
            chk.total_kappa
        );
        for r in chk.residuals {
            worst = worst.max(r);
        }
    }
    for (p, _) in wobble_instances() {
        let chk = curvature::corollary_check(&p, &EPS_LADDER).unwrap();
        for r in chk.residuals {
            worst = worst.max(r);
        }
    }
    verdict(
        "6 index-curvature corollary",
        worst < 1e-4,
        &format!("max residual {worst:.3e}"),
    );
}

#[test]
fn criterion_07_connection_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut worst_fund = 0.0f64;
    let mut worst_invariance = 0.0f64;
    let mut worst_split_rec = 0.0f64;
    let mut worst_split_horiz = 0.0f64;

    let random_point = |rng: &mut ChaCha8Rng| -> S3Point {
        let phi: f64 = rng.random_range(0.0..TAU);
        let theta: f64 = rng.random_range(0.0..TAU);
        let beta: f64 = rng.random_range(0.05..PI - 0.05);
        s3_from_angles(phi, theta, beta).unwrap()
    };

    for _ in 0..100 {
        let p = random_point(&mut rng);
        // omega(A*) = A
        let a = Complex64::new(0.0, rng.random_range(-2.0..2.0));
        let fv = fundamental_vector(a, p);
        worst_fund = worst_fund.max((canonical_connection(&fv) - a).norm());

        // random tangent: radial part removed from a random ambient vector
        let w1 = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let w2 = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let radial = p.inner(w1, w2).re;
        let v = TangentS3::try_new(p, w1 - radial * p.z1, w2 - radial * p.z2).unwrap();

        // right-invariance
        let s = Complex64::from_polar(1.0, rng.random_range(0.0..TAU));
        let moved = v.right_mul(s);
        worst_invariance =
            worst_invariance.max((canonical_connection(&moved) - canonical_connection(&v)).norm());

        // split: exact reconstruction, horizontal annihilated
        let (h, vert) = split(&v);
        worst_split_rec = worst_split_rec
            .max(((h.v1 + vert.v1) - v.v1).norm() + ((h.v2 + vert.v2) - v.v2).norm());
        worst_split_horiz = worst_split_horiz.max(canonical_connection(&h).norm());
    }

    // gauge relation omega_2 - omega_1 = psi_12^{-1} d psi_12 along random
    // overlap curves, by central differences
    let mut worst_gauge = 0.0f64;
    for _ in 0..20 {
        let a1 = Complex64::new(rng.random_range(0.3..1.0), rng.random_range(-0.5..0.5));
        let a2 = Complex64::new(rng.random_range(0.3..1.0), rng.random_range(-0.5..0.5));
        let b1 = Complex64::new(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4));
        let b2 = Complex64::new(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4));
        let curve = |t: f64| CP1Point::new(a1 + b1 * t, a2 + b2 * (1.3 * t).sin()).unwrap();
        let h = 1e-6;
        for k in 1..8 {
            let t = k as f64 / 8.0;
            let (pm, p0, pp) = (curve(t - h), curve(t), curve(t + h));
            let dp = ((pp.z1 - pm.z1) / (2.0 * h), (pp.z2 - pm.z2) / (2.0 * h));
            let w1 = chart_connection(1, &p0, dp).unwrap();
            let w2 = chart_connection(2, &p0, dp).unwrap();
            let dpsi = (transition(&pp).unwrap() - transition(&pm).unwrap()) / (2.0 * h);
            let rel = transition(&p0).unwrap().conj() * dpsi;
            worst_gauge = worst_gauge.max(((w2 - w1) - rel).norm());
        }
    }

    verdict(
        "7 connection axioms",
        worst_fund < 1e-14
            && worst_invariance < 1e-12
            && worst_split_rec < 1e-14
            && worst_split_horiz < 1e-12
            && worst_gauge < 1e-8,
        &format!(
            "omega(A*) {worst_fund:.3e}, invariance {worst_invariance:.3e}, split {worst_split_rec:.3e}/{worst_split_horiz:.3e}, gauge {worst_gauge:.3e}"
        ),
    );
}

#[test]
fn criterion_08_diffeomorphism_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAB5EED);
    let mut worst_round = 0.0f64;
    for _ in 0..1000 {
        let z: f64 = rng.random_range(-1.0 + 1e-9..1.0 - 1e-9);
        let t: f64 = rng.random_range(0.0..TAU);
        let r = (1.0 - z * z).sqrt();
        let p = hopf_phase::geometry::SpherePoint::try_new(r * t.cos(), r * t.sin(), z).unwrap();
        let q = cp1_to_sphere(&sphere_to_cp1(p));
        worst_round = worst_round
            .max(((q.x - p.x).powi(2) + (q.y - p.y).powi(2) + (q.z - p.z).powi(2)).sqrt());
    }
    let mut worst_angular = 0.0f64;
    for _ in 0..500 {
        let theta: f64 = rng.random_range(-6.0..6.0);
        let beta: f64 = rng.random_range(1e-3..2.5);
        let got = chart(1, &sphere_to_cp1(gauss_vector(theta, beta).unwrap())).unwrap();
        let want = Complex64::from_polar((0.5 * beta).tan(), -theta);
        worst_angular = worst_angular.max((got - want).norm());
    }
    verdict(
        "8 sphere <-> CP1 round trip",
        worst_round < 1e-12 && worst_angular < 1e-12,
        &format!("round trip {worst_round:.3e}, angular chart {worst_angular:.3e}"),
    );
}

#[test]
fn criterion_09_transport_oracle() {
    let mut worst = 0.0f64;
    for beta0 in LATITUDES {
        let p = latitude(beta0);
        let angle = lift::transport_oracle(&p).unwrap();
        worst = worst.max(mod_2pi_distance(angle, phase::geometric_phase(&p)));
    }
    for (p, _) in wobble_instances() {
        let angle = lift::transport_oracle(&p).unwrap();
        worst = worst.max(mod_2pi_distance(angle, phase::geometric_phase(&p)));
    }
    verdict(
        "9 Levi-Civita transport congruence",
        worst < 1e-5,
        &format!("max mod-2pi distance {worst:.3e}"),
    );
}

/// Latitude loop on an exponential clock u(t) = (e^{at} - 1)/(e^a - 1):
/// strictly increasing, u(0) = 0, u(1) = 1, same closed-form phase. The
/// integrand const * e^{at} defeats every polynomial and full-period
/// harmonic exactness, so quadrature errors follow their textbook h^4 law.
struct ExpWarpLatitude {
    beta0: f64,
    a: f64,
}

impl hopf_phase::motion::AngleEval for ExpWarpLatitude {
    fn theta(&self, t: f64) -> f64 {
        TAU * ((self.a * t).exp() - 1.0) / (self.a.exp() - 1.0)
    }
    fn beta(&self, _t: f64) -> f64 {
        self.beta0
    }
    fn dtheta(&self, t: f64) -> f64 {
        TAU * self.a * (self.a * t).exp() / (self.a.exp() - 1.0)
    }
    fn dbeta(&self, _t: f64) -> f64 {
        0.0
    }
}

#[test]
fn criterion_10_convergence_orders() {
    // reparameterized latitude: same closed form, non-constant integrand
    let exact = -TAU * FRAC_PI_3.cos();
    let warped = |n: usize| -> SampledPath {
        SampledPath::from_eval(
            Arc::new(ExpWarpLatitude {
                beta0: FRAC_PI_3,
                a: 4.0,
            }),
            n,
        )
        .unwrap()
    };

    let quad_err = |n: usize| (phase::geometric_phase(&warped(n)) - exact).abs();
    let lift_err = |n: usize| {
        let p = warped(n);
        let l = lift::horizontal_lift(&p, 0.0).unwrap();
        (l.phi[n] - exact).abs()
    };

    let (q1, q2) = (quad_err(256), quad_err(512));
    let (l1, l2) = (lift_err(256), lift_err(512));
    let quad_ratio = q1 / q2;
    let lift_ratio = l1 / l2;
    // errors must sit above round-off for the ratios to mean anything
    let measurable = q1 > 1e-12 && l1 > 1e-12;
    verdict(
        "10 convergence orders",
        measurable && quad_ratio >= 8.0 && lift_ratio >= 8.0,
        &format!(
            "Simpson {q1:.3e}->{q2:.3e} (x{quad_ratio:.1}), lift {l1:.3e}->{l2:.3e} (x{lift_ratio:.1})"
        ),
    );
}

#[test]
fn regularized_limits_agree_across_families() {
    // supporting check used by several criteria: the eps ladder limit
    // reproduces the raw phase on every built-in family
    let mut worst = 0.0f64;
    for (_, p) in family_zoo() {
        let raw = phase::geometric_phase(&p);
        let (_, limit) = regularize::regularized_phase(&p, &EPS_LADDER).unwrap();
        worst = worst.max((limit - raw).abs());
    }
    assert!(worst < 1e-6, "worst regularized-limit gap {worst:.3e}");
}
