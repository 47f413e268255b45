//! Seeded random streams and simplex samplers shared by the verifiers and
//! the Monte Carlo code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent counter-based stream `stream` of the master `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point of the standard simplex `{y ≥ 0, Σy = 1}` (flat Dirichlet).
pub fn flat_dirichlet<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// All points of the standard simplex with coordinates in `(1/n)ℤ`.
pub fn simplex_grid(m: usize, n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut parts = vec![0usize; m];
    compositions(n, 0, &mut parts, &mut out, n);
    out
}

fn compositions(left: usize, at: usize, parts: &mut [usize], out: &mut Vec<Vec<f64>>, n: usize) {
    if at + 1 == parts.len() {
        parts[at] = left;
        out.push(parts.iter().map(|&p| p as f64 / n as f64).collect());
        return;
    }
    for k in 0..=left {
        parts[at] = k;
        compositions(left - k, at + 1, parts, out, n);
    }
}

/// Number of grid points `C(n + m - 1, m - 1)`.
pub fn simplex_grid_size(m: usize, n: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 1..m as u64 {
        c = c * (n as u64 + i) / i;
    }
    c
}

/// Largest grid resolution whose point count does not exceed `budget`.
pub fn grid_resolution_for(m: usize, budget: usize) -> usize {
    let mut n = 1;
    while simplex_grid_size(m, n + 1) <= budget as u64 {
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts_match_binomial() {
        for m in 2..6 {
            for n in 1..8 {
                let g = simplex_grid(m, n);
                assert_eq!(g.len() as u64, simplex_grid_size(m, n));
                for p in &g {
                    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dirichlet_points_lie_on_simplex() {
        let mut rng = stream_rng(3, 0);
        for _ in 0..100 {
            let p = flat_dirichlet(&mut rng, 5);
            assert!(p.iter().all(|&v| v >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream_rng(7, 1).gen();
        let b: u64 = stream_rng(7, 1).gen();
        let c: u64 = stream_rng(7, 2).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn resolution_respects_budget() {
        let n = grid_resolution_for(5, 100_000);
        assert!(simplex_grid_size(5, n) <= 100_000);
        assert!(simplex_grid_size(5, n + 1) > 100_000);
    }
}
