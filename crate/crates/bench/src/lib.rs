//! Shared fixtures for the benchmarks.

use canonsys_core::potential::random_potential;
use canonsys_core::{PotentialSpec, ScalarFunction};

/// Named potentials covering the constant, scalar and general cases.
pub fn fixtures() -> Vec<(&'static str, PotentialSpec)> {
    vec![
        ("zero", PotentialSpec::zero()),
        ("off_diagonal", PotentialSpec::constant(0.0, 0.0, 1.0)),
        (
            "scalar_cosine",
            PotentialSpec::scalar(ScalarFunction::trig1(1.0, 1.0, 0.0)),
        ),
        ("random_deg4", random_potential(20_240_601, 4)),
    ]
}

/// `n` evenly spaced points of `[a, b]`.
pub fn lambda_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n.max(2) - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = lambda_grid(-2.0, 2.0, 5);
        assert_eq!(g, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(fixtures().len(), 4);
    }
}
