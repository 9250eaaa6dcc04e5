use canonsys_core::potential::{random_canonical_potential, random_potential, PotentialConfig};
use canonsys_core::{GaugeAngle, Mat2, PotentialSpec, ScalarFunction, TrigPoly};
use proptest::prelude::*;
use std::f64::consts::PI;

fn grid() -> impl Iterator<Item = f64> {
    (0..64).map(|i| PI * i as f64 / 64.0)
}

fn coeffs(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 0..=max)
}

fn trig_poly() -> impl Strategy<Value = ScalarFunction> {
    (-2.0..2.0f64, coeffs(4), coeffs(4))
        .prop_map(|(a0, c, s)| ScalarFunction::TrigPoly(TrigPoly::new(a0, c, s)))
}

fn scalar_function() -> impl Strategy<Value = ScalarFunction> {
    prop_oneof![
        (-3.0..3.0f64).prop_map(ScalarFunction::Constant),
        trig_poly(),
        prop::collection::vec(-2.0..2.0f64, 2..40)
            .prop_map(|v| ScalarFunction::samples(v).unwrap()),
    ]
}

fn spec() -> impl Strategy<Value = PotentialSpec> {
    (scalar_function(), scalar_function(), scalar_function())
        .prop_map(|(a, b, c)| PotentialSpec::new(a, b, c))
}

fn canonical() -> impl Strategy<Value = PotentialSpec> {
    (trig_poly(), trig_poly()).prop_map(|(d, q)| PotentialSpec::canonical(d, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn shift_evaluates_at_offset(s in spec(), tau in -4.0..4.0f64, z in 0.0..PI) {
        let tol = if s.is_absolutely_continuous() { 1e-12 } else { 1e-8 };
        let scale = 1.0 + s.evaluate(z + tau).max_abs();
        prop_assert!((s.shift(tau).evaluate(z) - s.evaluate(z + tau)).max_abs() <= tol * scale);
    }

    #[test]
    fn evaluation_is_periodic_and_symmetric(s in spec(), z in -5.0..5.0f64) {
        let (a, b) = (s.evaluate(z), s.evaluate(z + PI));
        prop_assert!((a - b).max_abs() <= 1e-12 * (1.0 + a.max_abs()));
        prop_assert_eq!(a.m[0][1], a.m[1][0]);
    }

    #[test]
    fn gauge_rotation_round_trip(s in canonical(), omega in -3.0..3.0f64) {
        let back = s.gauge_rotate(omega).unwrap().gauge_rotate(-omega).unwrap();
        for z in grid() {
            let scale = 1.0 + s.evaluate(z).max_abs();
            prop_assert!((back.evaluate(z) - s.evaluate(z)).max_abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn gauge_rotation_is_conjugation(s in canonical(), omega in -3.0..3.0f64) {
        // e^{2 J omega} Q equals e^{J omega} Q e^{-J omega} for traceless symmetric Q.
        let r = s.gauge_rotate(omega).unwrap();
        for z in grid() {
            let q = s.evaluate(z);
            let expect = Mat2::rotation(2.0 * omega) * q;
            prop_assert!((r.evaluate(z) - expect).max_abs() <= 1e-12 * (1.0 + q.max_abs()));
        }
    }

    #[test]
    fn canonical_form_anticommutes_with_j(s in canonical()) {
        prop_assert!(s.is_canonical_form(1e-12));
        for z in grid() {
            let q = s.evaluate(z);
            prop_assert!((Mat2::J * q + q * Mat2::J).max_abs() <= 1e-12 * (1.0 + q.max_abs()));
        }
    }

    #[test]
    fn trace_split_reassembles(seed in any::<u64>()) {
        let s = random_potential(seed, 4);
        let split = s.trace_split().unwrap();
        prop_assert!(split.tilde.is_canonical_form(1e-10));
        let h = match &split.gauge {
            GaugeAngle::Profile(h) => h.clone(),
            GaugeAngle::Constant(w) => ScalarFunction::Constant(*w),
        };
        prop_assert!(h.evaluate(0.0).abs() <= 1e-12 && h.evaluate(PI).abs() <= 1e-12);
        prop_assert!((split.shift_constant - split.p.mean()).abs() <= 1e-12);
        for z in grid() {
            let q = s.evaluate(z);
            let p = split.p.evaluate(z);
            let rebuilt = Mat2::rotation(h.evaluate(z)) * split.tilde.evaluate(z) * Mat2::rotation(-h.evaluate(z))
                + Mat2::scalar(p);
            prop_assert!((rebuilt - q).max_abs() <= 1e-10 * (1.0 + q.max_abs()), "z = {}", z);
        }
    }

    #[test]
    fn config_round_trip_is_bit_exact(s in spec()) {
        let text = serde_json::to_string(&s.to_json_value()).unwrap();
        let back = PotentialSpec::from_json_str(&text).unwrap();
        prop_assert_eq!(back.to_json_value(), s.to_json_value());
        for z in grid() {
            prop_assert_eq!(back.evaluate(z), s.evaluate(z));
        }
    }

    #[test]
    fn scalar_identity_predicate(p in trig_poly(), eps in 1e-6..1.0f64) {
        prop_assert!(PotentialSpec::scalar(p.clone()).is_scalar_identity(1e-12));
        let bumped = PotentialSpec::new(p.clone(), p, ScalarFunction::Constant(eps));
        prop_assert!(!bumped.is_scalar_identity(eps / 2.0));
    }
}

#[test]
fn random_potentials_are_reproducible() {
    assert_eq!(random_potential(11, 4), random_potential(11, 4));
    assert_ne!(random_potential(11, 4), random_potential(12, 4));
    let c = random_canonical_potential(5, 2);
    assert!(c.is_canonical_form(0.0));
    let cfg: PotentialConfig = serde_json::from_value(c.to_json_value()).unwrap();
    assert_eq!(PotentialSpec::try_from(cfg).unwrap(), c);
}
