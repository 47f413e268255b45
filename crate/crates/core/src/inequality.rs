//! The singularity criterion and numerical checks of the inequalities
//! behind it.
//!
//! The verifiers sample deterministically (grid plus seeded random points)
//! and record every violation instead of failing on the first one.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::map_indexed;
use crate::polygon::SymmetricPolygon;
use crate::sampling::{flat_dirichlet, grid_resolution_for, simplex_grid, stream_rng};

/// Slack allowed against the strict criterion.
pub const STRICT_TOL: f64 = 1e-12;
/// Slack allowed when checking an inequality on a sample point.
pub const VERIFY_TOL: f64 = 1e-9;
const EQUALITY_TOL: f64 = 1e-12;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Singular,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub sigma: f64,
    /// `threshold − sigma`.
    pub margin: f64,
    pub verdict: Verdict,
    pub lengths: Vec<f64>,
    /// The bound `sigma` is compared with: 1, or 1/2 for reflection groups.
    pub threshold: f64,
}

impl CriterionReport {
    pub(crate) fn new(sigma: f64, threshold: f64, lengths: Vec<f64>) -> Self {
        let verdict = if sigma < threshold - STRICT_TOL {
            Verdict::Singular
        } else {
            Verdict::Inconclusive
        };
        CriterionReport { sigma, margin: threshold - sigma, verdict, lengths, threshold }
    }

    pub fn is_singular(&self) -> bool {
        self.verdict == Verdict::Singular
    }
}

/// `Σ 1/(1+e^ℓ)`.
pub fn sigma_of_lengths(lengths: &[f64]) -> f64 {
    lengths.iter().map(|&l| logistic_tail(l)).sum()
}

/// `1/(1+e^x)` without overflow for large `x`.
pub fn logistic_tail(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Singular when `Σ 1/(1+e^ℓ) < 1`.
pub fn criterion(lengths: &[f64]) -> CriterionReport {
    CriterionReport::new(sigma_of_lengths(lengths), 1.0, lengths.to_vec())
}

/// Criterion on the translation lengths of the side pairings.
pub fn polygon_criterion(polygon: &SymmetricPolygon) -> CriterionReport {
    let lengths: Vec<f64> = crate::polygon::side_pairings(polygon)
        .iter()
        .map(|g| g.translation_length().expect("pairings preserve orientation"))
        .collect();
    criterion(&lengths)
}

/// `2(m−1)/(m(m−2))`.
pub fn collar_threshold(m: usize) -> Result<f64> {
    if m < 3 {
        return Err(Error::InvalidDimension { m });
    }
    let m = m as f64;
    Ok(2.0 * (m - 1.0) / (m * (m - 2.0)))
}

/// True when some `sinh(a_i)` is at most the collar threshold, which
/// already forces singularity.
pub fn collar_quick_test(apothems: &[f64], m: usize) -> Result<bool> {
    let bound = collar_threshold(m)? * (1.0 + STRICT_TOL);
    Ok(apothems.iter().any(|a| a.sinh() <= bound))
}

/// `Σ arccos(z_i z_{i+1})` and `Σ z_i` for `z_i = tanh(a_i)`.
pub fn constraint_chain(polygon: &SymmetricPolygon) -> (f64, f64) {
    let z = polygon.tanh_apothems();
    (cyclic_arccos_sum(&z), z.iter().sum())
}

/// A point where a checked inequality failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub point: Vec<f64>,
    pub value: f64,
    pub detail: String,
}

/// A known equality point and what was found there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityCase {
    pub point: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptReport {
    /// Smallest value of the checked quantity seen on the sample.
    pub minimum_found: f64,
    pub argmin: Vec<f64>,
    pub samples_used: usize,
    pub violations: Vec<Violation>,
    pub equality_cases_checked: Vec<EqualityCase>,
    /// The quantity must stay at or above this value.
    pub target: f64,
}

impl OptReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.equality_cases_checked.iter().all(|e| e.holds)
    }
}

/// `Σ arccos(x_i x_{i+1})`, indices mod `m`.
pub fn cyclic_arccos_sum(x: &[f64]) -> f64 {
    let m = x.len();
    (0..m).map(|i| (x[i] * x[(i + 1) % m]).clamp(-1.0, 1.0).acos()).sum()
}

/// `Δ_i = x_i + x_{i+1} − x_i x_{i+1}`.
pub fn deltas(x: &[f64]) -> Vec<f64> {
    let m = x.len();
    (0..m)
        .map(|i| {
            let (a, b) = (x[i], x[(i + 1) % m]);
            a + b - a * b
        })
        .collect()
}

/// Both sides of `Σ √Δ_i ≥ √(4 + 3 Σ x_i x_{i+1})`.
pub fn sqrt_bound_sides(x: &[f64]) -> (f64, f64) {
    let m = x.len();
    let lhs = deltas(x).iter().map(|d| d.max(0.0).sqrt()).sum();
    let s: f64 = (0..m).map(|i| x[i] * x[(i + 1) % m]).sum();
    (lhs, (4.0 + 3.0 * s).sqrt())
}

/// `(2/π)·arccos(1−x) − (2/3)√x − x/3`.
pub fn scalar_gap_arccos(x: f64) -> f64 {
    2.0 / PI * (1.0 - x).clamp(-1.0, 1.0).acos() - 2.0 / 3.0 * x.sqrt() - x / 3.0
}

/// `(2/3)√(4+3x) + (2−x)/3 − 2`.
pub fn scalar_gap_sqrt(x: f64) -> f64 {
    2.0 / 3.0 * (4.0 + 3.0 * x).sqrt() + (2.0 - x) / 3.0 - 2.0
}

/// Evaluation of one sample point: the checked quantity and any failures.
struct PointCheck {
    value: f64,
    violations: Vec<Violation>,
}

#[derive(Default)]
struct Accumulator {
    minimum: f64,
    argmin: Vec<f64>,
    samples: usize,
    violations: Vec<Violation>,
}

impl Accumulator {
    fn new() -> Self {
        Accumulator { minimum: f64::INFINITY, ..Default::default() }
    }

    fn push(&mut self, point: &[f64], check: PointCheck) {
        self.samples += 1;
        if check.value < self.minimum {
            self.minimum = check.value;
            self.argmin = point.to_vec();
        }
        self.violations.extend(check.violations);
    }

    fn merge(&mut self, other: Accumulator) {
        self.samples += other.samples;
        if other.minimum < self.minimum {
            self.minimum = other.minimum;
            self.argmin = other.argmin;
        }
        self.violations.extend(other.violations);
    }
}

/// Evaluates `check` on the simplex grid and on `budget` flat-Dirichlet
/// points, mapped through `transform`. Random points are drawn in chunks
/// with streams keyed by chunk index, so the result does not depend on the
/// number of workers.
fn sweep_simplex<F>(m: usize, budget: usize, seed: u64, transform: fn(Vec<f64>) -> Vec<f64>, check: F) -> Accumulator
where
    F: Fn(&[f64]) -> PointCheck + Sync,
{
    let grid = simplex_grid(m, grid_resolution_for(m, budget));
    let grid_chunks = grid.len().div_ceil(CHUNK);
    let parts = map_indexed(grid_chunks, |c| {
        let mut acc = Accumulator::new();
        for y in &grid[c * CHUNK..((c + 1) * CHUNK).min(grid.len())] {
            let x = transform(y.clone());
            acc.push(&x, check(&x));
        }
        acc
    });
    let random_chunks = budget.div_ceil(CHUNK);
    let random_parts = map_indexed(random_chunks, |c| {
        let mut rng = stream_rng(seed, c as u64);
        let mut acc = Accumulator::new();
        for _ in c * CHUNK..((c + 1) * CHUNK).min(budget) {
            let x = transform(flat_dirichlet(&mut rng, m));
            acc.push(&x, check(&x));
        }
        acc
    });
    let mut total = Accumulator::new();
    for part in parts.into_iter().chain(random_parts) {
        total.merge(part);
    }
    total
}

fn finish(acc: Accumulator, equality: Vec<EqualityCase>, target: f64) -> OptReport {
    OptReport {
        minimum_found: acc.minimum,
        argmin: acc.argmin,
        samples_used: acc.samples,
        violations: acc.violations,
        equality_cases_checked: equality,
        target,
    }
}

fn check_m(m: usize) -> Result<()> {
    if m < 3 {
        return Err(Error::InvalidDimension { m });
    }
    Ok(())
}

/// `Σ arccos(x_i x_{i+1}) ≥ π` on `{0 ≤ x_i ≤ 1, Σ x_i = m−1}`, with
/// equality exactly when one coordinate vanishes.
pub fn verify_arccos_bound(m: usize, budget: usize, seed: u64) -> Result<OptReport> {
    check_m(m)?;
    let complement = |y: Vec<f64>| y.into_iter().map(|v| 1.0 - v).collect();
    let acc = sweep_simplex(m, budget, seed, complement, |x| {
        let mut violations = Vec::new();
        for i in 0..m {
            let arg = x[i] * x[(i + 1) % m];
            if !(-1.0 - EQUALITY_TOL..=1.0 + EQUALITY_TOL).contains(&arg) {
                violations.push(Violation {
                    point: x.to_vec(),
                    value: arg,
                    detail: format!("arccos argument {i} outside [-1, 1]"),
                });
            }
        }
        let value = cyclic_arccos_sum(x);
        if value < PI - VERIFY_TOL {
            violations.push(Violation {
                point: x.to_vec(),
                value,
                detail: "arccos sum below π".into(),
            });
        }
        PointCheck { value, violations }
    });
    let equality = (0..m)
        .map(|j| {
            let mut x = vec![1.0; m];
            x[j] = 0.0;
            let lhs = cyclic_arccos_sum(&x);
            EqualityCase { holds: (lhs - PI).abs() <= EQUALITY_TOL, point: x, lhs, rhs: PI }
        })
        .collect();
    Ok(finish(acc, equality, PI))
}

/// `Σ √Δ_i ≥ √(4 + 3 Σ x_i x_{i+1})` on the standard simplex, together with
/// `Δ_i ≥ max(x_i, x_{i+1})` and `√Δ_i √Δ_{i+2} ≥ 2 x_{i+1} x_{i+2}`.
/// The reported quantity is the gap `lhs − rhs`.
pub fn verify_sqrt_bound(m: usize, budget: usize, seed: u64) -> Result<OptReport> {
    check_m(m)?;
    let acc = sweep_simplex(m, budget, seed, |y| y, |x| {
        let mut violations = Vec::new();
        let d = deltas(x);
        for i in 0..m {
            let j = (i + 1) % m;
            if d[i] < x[i].max(x[j]) - EQUALITY_TOL {
                violations.push(Violation {
                    point: x.to_vec(),
                    value: d[i],
                    detail: format!("Δ_{i} below max(x_{i}, x_{j})"),
                });
            }
            let k = (i + 2) % m;
            let cs = d[i].sqrt() * d[k].sqrt() - 2.0 * x[j] * x[k];
            if cs < -EQUALITY_TOL {
                violations.push(Violation {
                    point: x.to_vec(),
                    value: cs,
                    detail: format!("√Δ_{i}·√Δ_{k} below 2·x_{j}·x_{k}"),
                });
            }
        }
        let (lhs, rhs) = sqrt_bound_sides(x);
        let value = lhs - rhs;
        if value < -VERIFY_TOL {
            violations.push(Violation { point: x.to_vec(), value, detail: "Σ√Δ below bound".into() });
        }
        PointCheck { value, violations }
    });
    let mut points: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let mut x = vec![0.0; m];
            x[j] = 1.0;
            x
        })
        .collect();
    if m == 3 {
        points.push(vec![1.0 / 3.0; 3]);
    }
    let equality = points
        .into_iter()
        .map(|x| {
            let (lhs, rhs) = sqrt_bound_sides(&x);
            EqualityCase { holds: (lhs - rhs).abs() <= EQUALITY_TOL, point: x, lhs, rhs }
        })
        .collect();
    Ok(finish(acc, equality, 0.0))
}

/// The two one-variable bounds on a uniform grid of `budget` points in
/// `[0, 1]`: equality exactly at the endpoints named by the lemma and a
/// strictly positive gap everywhere else. The reported quantity is the
/// smaller of the two gaps.
pub fn verify_scalar_bounds(budget: usize) -> Result<OptReport> {
    if budget < 2 {
        return Err(Error::InvalidArgument("scalar grid needs at least 2 points".into()));
    }
    let mut acc = Accumulator::new();
    for j in 0..budget {
        let x = j as f64 / (budget - 1) as f64;
        let (g1, g2) = (scalar_gap_arccos(x), scalar_gap_sqrt(x));
        let mut violations = Vec::new();
        let mut flag = |gap: f64, equality_here: bool, name: &str| {
            let ok = if equality_here { gap.abs() <= EQUALITY_TOL } else { gap > 0.0 && gap >= -1e-10 };
            if !ok {
                violations.push(Violation {
                    point: vec![x],
                    value: gap,
                    detail: format!("{name} at x = {x}"),
                });
            }
        };
        flag(g1, j == 0 || j == budget - 1, "arccos bound");
        flag(g2, j == 0, "sqrt bound");
        acc.push(&[x], PointCheck { value: g1.min(g2), violations });
    }
    let case = |x: f64, lhs: f64, rhs: f64| EqualityCase {
        point: vec![x],
        lhs,
        rhs,
        holds: (lhs - rhs).abs() <= EQUALITY_TOL,
    };
    let lhs1 = |x: f64| 2.0 / PI * (1.0 - x).acos();
    let rhs1 = |x: f64| 2.0 / 3.0 * x.sqrt() + x / 3.0;
    let lhs2 = |x: f64| 2.0 / 3.0 * (4.0 + 3.0 * x).sqrt() + (2.0 - x) / 3.0;
    let equality = vec![
        case(0.0, lhs1(0.0), rhs1(0.0)),
        case(1.0, lhs1(1.0), rhs1(1.0)),
        case(0.0, lhs2(0.0), 2.0),
    ];
    Ok(finish(acc, equality, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{build, PolygonSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn sigma_examples() {
        let octagon = vec![2.0 * (1.0 + 2f64.sqrt()).acosh(); 8];
        // e^ℓ = (c + √(c²−1))² with c = 1 + √2
        let c = 1.0 + 2f64.sqrt();
        let closed = 8.0 / (1.0 + (c + (c * c - 1.0).sqrt()).powi(2));
        assert_abs_diff_eq!(sigma_of_lengths(&octagon), closed, epsilon = 1e-14);
        assert_abs_diff_eq!(closed, 0.35928112, epsilon = 1e-8);
        assert_eq!(sigma_of_lengths(&[]), 0.0);
        assert_eq!(sigma_of_lengths(&[0.0; 6]), 3.0);
        assert_abs_diff_eq!(logistic_tail(800.0), 0.0, epsilon = 1e-300);
        assert_abs_diff_eq!(logistic_tail(-800.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn criterion_examples() {
        let r = criterion(&vec![2.0 * (1.0 + 2f64.sqrt()).acosh(); 8]);
        assert!(r.is_singular());
        assert_abs_diff_eq!(r.margin, 1.0 - 0.35928112, epsilon = 1e-8);
        for m in 2..6 {
            let l = ((2 * m - 1) as f64).ln();
            let r = criterion(&vec![l; 2 * m]);
            assert_abs_diff_eq!(r.sigma, 1.0, epsilon = 1e-14);
            assert_eq!(r.verdict, Verdict::Inconclusive);
        }
        // right-angled octagon: e^{ℓ/2} = cos(π/4)/sin(π/8) + sqrt(...)
        let c: f64 = (PI / 4.0).cos() / (PI / 8.0).sin();
        let l = 2.0 * c.acosh();
        assert_abs_diff_eq!(l, 2.4484524, epsilon = 1e-7);
        let r = criterion(&[l; 8]);
        assert_abs_diff_eq!(r.sigma, 0.6364143, epsilon = 1e-7);
        assert!(r.is_singular());
    }

    #[test]
    fn collar_examples() {
        assert_abs_diff_eq!(collar_threshold(3).unwrap(), 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(collar_threshold(4).unwrap(), 0.75, epsilon = 1e-15);
        assert!(collar_quick_test(&[2f64.ln(), 3.0, 3.0, 3.0], 4).unwrap());
        let a = (1.0 + 2f64.sqrt()).acosh();
        assert_abs_diff_eq!(a.sinh(), 2.1973682, epsilon = 1e-7);
        assert!(!collar_quick_test(&[a; 4], 4).unwrap());
        assert!(matches!(collar_quick_test(&[1.0], 2), Err(Error::InvalidDimension { m: 2 })));
    }

    #[test]
    fn arccos_examples() {
        assert_abs_diff_eq!(cyclic_arccos_sum(&[0.0, 1.0, 1.0]), PI, epsilon = 1e-15);
        let v = cyclic_arccos_sum(&[2.0 / 3.0; 3]);
        assert_abs_diff_eq!(v, 3.0 * (4.0f64 / 9.0).acos(), epsilon = 1e-15);
        assert_abs_diff_eq!(v, 3.3307270, epsilon = 1e-7);
        assert_abs_diff_eq!(cyclic_arccos_sum(&[0.75; 4]), 3.8935596, epsilon = 1e-7);
    }

    #[test]
    fn sqrt_examples() {
        let (l, r) = sqrt_bound_sides(&[1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(l, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r, 2.0, epsilon = 1e-15);
        let (l, r) = sqrt_bound_sides(&[1.0 / 3.0; 3]);
        assert_abs_diff_eq!(l, 5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r, 5f64.sqrt(), epsilon = 1e-15);
        let (l, r) = sqrt_bound_sides(&[0.25; 4]);
        assert_abs_diff_eq!(l, 2.6457513, epsilon = 1e-7);
        assert_abs_diff_eq!(r, 2.1794495, epsilon = 1e-7);
    }

    #[test]
    fn scalar_examples() {
        assert_eq!(scalar_gap_arccos(0.0), 0.0);
        assert_abs_diff_eq!(scalar_gap_arccos(1.0), 0.0, epsilon = 1e-15);
        assert_eq!(scalar_gap_sqrt(0.0), 0.0);
        assert_abs_diff_eq!(scalar_gap_sqrt(1.0) + 2.0, 2.0 / 3.0 * 7f64.sqrt() + 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(scalar_gap_sqrt(1.0) + 2.0, 2.0971675, epsilon = 1e-7);
    }

    #[test]
    fn verifiers_pass() {
        for m in 3..=5 {
            let r = verify_arccos_bound(m, 5000, 1).unwrap();
            assert!(r.passed(), "{:?}", r.violations.first());
            assert!(r.minimum_found >= PI - 1e-9);
            assert_eq!(r.equality_cases_checked.len(), m);
            let r = verify_sqrt_bound(m, 5000, 1).unwrap();
            assert!(r.passed(), "{:?}", r.violations.first());
        }
        let r = verify_scalar_bounds(10_000).unwrap();
        assert!(r.passed(), "{:?}", r.violations.first());
        assert_eq!(r.samples_used, 10_000);
    }

    #[test]
    fn verifier_reports_are_seed_deterministic() {
        let a = verify_arccos_bound(4, 9000, 7).unwrap();
        let b = verify_arccos_bound(4, 9000, 7).unwrap();
        assert_eq!(a, b);
        let c = crate::with_threads(Some(1), || verify_arccos_bound(4, 9000, 7).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn constraint_chain_on_acute_polygons() {
        let p = build(&PolygonSpec::uniform(4, Some(2))).unwrap();
        let (s, z) = constraint_chain(&p);
        assert!(s <= PI + 1e-12);
        assert!(z > 3.0);
        assert!(polygon_criterion(&p).is_singular());
    }
}
