//! Reflection groups generated by the side reflections of a centrally
//! symmetric polygon whose angles are all of the form π/k.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::freewalk::{MeasureKind, StepDistribution};
use crate::hyperbolic::Isometry;
use crate::inequality::{sigma_of_lengths, CriterionReport};
use crate::polygon::{build_with_vertex_angles, SymmetricPolygon};

/// Tolerance for recognising `γ_i = π/k_i`.
pub const SUBMULTIPLE_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-14;

/// A polygon whose vertex angles are `π/k_i`, `k_i ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoxeterPolygon {
    polygon: SymmetricPolygon,
    k_values: Vec<u32>,
}

impl CoxeterPolygon {
    /// Recognises the integers `k_i` from the built angles.
    pub fn new(polygon: SymmetricPolygon) -> Result<Self> {
        let m = polygon.m();
        let mut k_values = Vec::with_capacity(2 * m);
        for (i, &g) in polygon.vertex_angles().iter().enumerate() {
            let k = (PI / g).round();
            if !(k >= 2.0) || (g - PI / k).abs() >= SUBMULTIPLE_TOL {
                return Err(Error::AngleNotSubmultiple { index: i, angle: g });
            }
            k_values.push(k as u32);
        }
        k_values.extend_from_within(..m);
        Ok(CoxeterPolygon { polygon, k_values })
    }

    /// Builds the polygon with angles `π/k_i` for the given apothem weights.
    pub fn build(weights: &[f64], k_values: &[u32]) -> Result<Self> {
        if let Some(i) = k_values.iter().position(|&k| k < 2) {
            return Err(Error::AngleNotSubmultiple {
                index: i,
                angle: PI / k_values[i].max(1) as f64,
            });
        }
        let gamma: Vec<f64> = k_values.iter().map(|&k| PI / k as f64).collect();
        Self::new(build_with_vertex_angles(weights, &gamma)?)
    }

    /// Regular `2m`-gon with every angle `π/k`.
    pub fn regular(m: usize, k: u32) -> Result<Self> {
        Self::build(&vec![1.0; m], &vec![k; m])
    }

    pub fn polygon(&self) -> &SymmetricPolygon {
        &self.polygon
    }

    pub fn m(&self) -> usize {
        self.polygon.m()
    }

    /// `k_0..k_{2m-1}` with `k_{i+m} = k_i`.
    pub fn k_values(&self) -> &[u32] {
        &self.k_values
    }
}

/// Random Coxeter polygon with `k_i ∈ {2, …, 5}` and log-uniform apothem
/// weights in `[1/2, 2]`, retrying degenerate draws.
pub fn random_coxeter_polygon<R: Rng + ?Sized>(rng: &mut R, m: usize, tries: usize) -> Result<CoxeterPolygon> {
    let mut last = Error::InvalidArgument("no attempts made".into());
    for _ in 0..tries {
        let k: Vec<u32> = (0..m).map(|_| rng.gen_range(2..=5)).collect();
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(-2f64.ln()..2f64.ln()).exp()).collect();
        match CoxeterPolygon::build(&w, &k) {
            Ok(p) => return Ok(p),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Reflections `r_0..r_{2m-1}` in the side geodesics.
pub fn reflections(polygon: &CoxeterPolygon) -> Vec<Isometry> {
    polygon.polygon.sides().iter().map(Isometry::reflection).collect()
}

/// `ℓ(r_i r_{i+m})` for `i < m`.
pub fn opposite_translation_lengths(polygon: &CoxeterPolygon) -> Vec<f64> {
    let r = reflections(polygon);
    let m = polygon.m();
    (0..m)
        .map(|i| {
            r[i].compose(&r[i + m])
                .translation_length()
                .expect("two reflections preserve orientation")
        })
        .collect()
}

/// `μ(r_i) = μ(r_{i+m})` for every `i`.
pub fn geometric_symmetry_check(mu: &StepDistribution) -> Result<bool> {
    Ok(asymmetric_index(mu)?.is_none())
}

fn asymmetric_index(mu: &StepDistribution) -> Result<Option<usize>> {
    if mu.kind() != MeasureKind::Involutive {
        return Err(Error::WrongKind("reflection walks need an involutive measure".into()));
    }
    let m = mu.m();
    Ok((0..m).find(|&i| (mu.prob(i) - mu.prob(i + m)).abs() > SYMMETRY_TOL))
}

/// Singular when `Σ_{i<m} 1/(1 + e^{ℓ(r_i r_{i+m})/2}) < 1/2`.
pub fn coxeter_criterion(polygon: &CoxeterPolygon, mu: &StepDistribution) -> Result<CriterionReport> {
    if let Some(i) = asymmetric_index(mu)? {
        return Err(Error::NotGeometricallySymmetric { index: i, opposite: i + mu.m() });
    }
    if mu.m() != polygon.m() {
        return Err(Error::SymbolMismatch { expected: 2 * polygon.m(), found: mu.symbols() });
    }
    let lengths = opposite_translation_lengths(polygon);
    let halves: Vec<f64> = lengths.iter().map(|l| l / 2.0).collect();
    Ok(CriterionReport::new(sigma_of_lengths(&halves), 0.5, lengths))
}
