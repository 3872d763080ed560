//! Property tests for the structural invariants: clamp behaviour, phase
//! antisymmetry, chart round trips, and winding arithmetic.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use hopf_phase::geometry::{gauss_vector, s3_from_angles, SpherePoint};
use hopf_phase::hopf::hopf_map;
use hopf_phase::motion::{make_motion, sample, Family};
use hopf_phase::phase::geometric_phase;
use hopf_phase::projective::{cp1_to_sphere, sphere_to_cp1};
use hopf_phase::regularize::clamp;
use hopf_phase::topology::winding_number;

fn wobble_strategy() -> impl Strategy<Value = (f64, f64, u32, i64)> {
    (
        0.3f64..PI - 0.3,
        0.0f64..0.28,
        1u32..4,
        prop_oneof![Just(-2i64), Just(-1), Just(1), Just(2)],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clamp_idempotent_and_monotone((beta0, amp, freq, turns) in wobble_strategy(),
                                     eps_idx in 0usize..3) {
        let ladder = [0.08, 0.04, 0.02];
        let eps = ladder[eps_idx];
        let m = make_motion(Family::Wobble { beta0, amplitude: amp, frequency: freq }, turns, 1.0, 1.0).unwrap();
        let p = sample(&m, 256).unwrap();
        let once = clamp(&p, eps).unwrap();
        let twice = clamp(&once.as_path(), eps).unwrap();
        prop_assert_eq!(&once.beta_eps, &twice.beta_eps);
        // a smaller cut-off leaves untouched at least the nodes the larger one left
        let finer = clamp(&p, eps * 0.5).unwrap();
        for k in 0..once.beta_eps.len() {
            if once.beta_eps[k] == p.beta[k] {
                prop_assert_eq!(finer.beta_eps[k], p.beta[k]);
            }
        }
    }

    #[test]
    fn reversal_negates_phase_exactly((beta0, amp, freq, turns) in wobble_strategy()) {
        let m = make_motion(Family::Wobble { beta0, amplitude: amp, frequency: freq }, turns, 1.0, 1.0).unwrap();
        let p = sample(&m, 1024).unwrap();
        let r = p.reversed();
        prop_assert_eq!(geometric_phase(&p), -geometric_phase(&r));
    }

    #[test]
    fn sphere_chart_round_trip(z in -0.999999f64..0.999999, t in 0.0f64..TAU) {
        let r = (1.0 - z * z).sqrt();
        let p = SpherePoint::try_new(r * t.cos(), r * t.sin(), z).unwrap();
        let q = cp1_to_sphere(&sphere_to_cp1(p));
        let err = ((q.x - p.x).powi(2) + (q.y - p.y).powi(2) + (q.z - p.z).powi(2)).sqrt();
        prop_assert!(err < 1e-12, "round trip error {}", err);
    }

    #[test]
    fn fiber_projection_matches_gauss(phi in 0.0f64..TAU, theta in -8.0f64..8.0, beta in 0.0f64..PI) {
        let z = s3_from_angles(phi, theta, beta).unwrap();
        let down = cp1_to_sphere(&hopf_map(z));
        let g = gauss_vector(theta, beta).unwrap();
        let err = ((down.x - g.x).powi(2) + (down.y - g.y).powi(2) + (down.z - g.z).powi(2)).sqrt();
        prop_assert!(err < 1e-10, "projection gap {}", err);
    }

    #[test]
    fn winding_arithmetic(radii in proptest::collection::vec(0.2f64..2.0, 8..40),
                          px in -0.15f64..0.15, py in -0.15f64..0.15) {
        // star-shaped polygon around the origin: winding +-1 around any
        // interior point near the center
        let n = radii.len();
        let poly: Vec<Complex64> = radii
            .iter()
            .enumerate()
            .map(|(k, &r)| Complex64::from_polar(r, TAU * k as f64 / n as f64))
            .collect();
        let p = Complex64::new(px, py);
        let w = winding_number(&poly, p);
        prop_assume!(w.is_ok());
        let w = w.unwrap();
        prop_assert_eq!(w, 1);
        let reversed: Vec<Complex64> = poly.iter().rev().copied().collect();
        prop_assert_eq!(winding_number(&reversed, p).unwrap(), -1);
        let doubled: Vec<Complex64> = poly.iter().chain(poly.iter()).copied().collect();
        prop_assert_eq!(winding_number(&doubled, p).unwrap(), 2);
    }
}
