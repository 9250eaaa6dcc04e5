//! Seeded random trigonometric-polynomial potentials.

use super::{PotentialSpec, ScalarFunction, TrigPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coefficients uniform in `[-1, 1]`, degree uniform in `1..=max_degree`.
pub fn random_trig_poly<R: Rng>(rng: &mut R, max_degree: usize) -> TrigPoly {
    let degree = rng.gen_range(1..=max_degree.max(1));
    let mut draw = |n: usize| {
        (0..n)
            .map(|_| rng.gen_range(-1.0..=1.0))
            .collect::<Vec<f64>>()
    };
    let a0 = draw(1)[0];
    let cos = draw(degree);
    let sin = draw(degree);
    TrigPoly::new(a0, cos, sin)
}

/// A general symmetric potential with three independent random entries.
pub fn random_potential(seed: u64, max_degree: usize) -> PotentialSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q1 = random_trig_poly(&mut rng, max_degree);
    let q2 = random_trig_poly(&mut rng, max_degree);
    let q = random_trig_poly(&mut rng, max_degree);
    PotentialSpec::new(q1.into(), q2.into(), q.into())
}

/// A traceless potential `[[d, q], [q, -d]]`.
pub fn random_canonical_potential(seed: u64, max_degree: usize) -> PotentialSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = random_trig_poly(&mut rng, max_degree);
    let q = random_trig_poly(&mut rng, max_degree);
    PotentialSpec::canonical(ScalarFunction::TrigPoly(d), ScalarFunction::TrigPoly(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        assert_eq!(random_potential(7, 4), random_potential(7, 4));
        assert_ne!(random_potential(7, 4), random_potential(8, 4));
    }

    #[test]
    fn coefficients_in_range() {
        for seed in 0..20 {
            let (q1, _, _) = random_potential(seed, 4).into_entries();
            let t = q1.as_trig_poly().unwrap();
            assert!(t.degree() >= 1 && t.degree() <= 4);
            assert!(t
                .cos
                .iter()
                .chain(&t.sin)
                .chain([&t.a0])
                .all(|c| c.abs() <= 1.0));
        }
        assert!(random_canonical_potential(3, 2).tags().is_canonical_form);
    }
}
