//! Random walks `w_n = g_1 g_2 ⋯ g_n` on groups of disk isometries:
//! reproducible simulation, drift, entropy of convolution powers, empirical
//! boundary law and a dimension summary.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freewalk::{MeasureKind, StepDistribution};
use crate::hyperbolic::{wrap_tau, Isometry, IsometryKey};
use crate::inequality::{polygon_criterion, CriterionReport};
use crate::parallel::map_indexed;
use crate::polygon::{side_pairings, SymmetricPolygon};
use crate::sampling::stream_rng;

const RESCALE_EVERY: usize = 32;
/// Resolution of the canonical matrix keys identifying group elements.
pub const KEY_RESOLUTION: f64 = 1e-9;
pub const MAX_PRODUCTS: u64 = 10_000_000;
/// Radius `|w_n o|` beyond which the boundary angle is considered settled.
pub const QUALITY_RADIUS: f64 = 0.99;
pub const QUALITY_FRACTION: f64 = 0.95;
const Z95: f64 = 1.959963984540054;

/// An isometry `e^L · [[a, b], [b̄, ā]]` kept with a separate log scale so
/// that long products do not overflow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledIsometry {
    pub log_scale: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub reverses: bool,
}

impl ScaledIsometry {
    pub const IDENTITY: ScaledIsometry = ScaledIsometry {
        log_scale: 0.0,
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        reverses: false,
    };

    fn mul(&mut self, g: &Isometry) {
        let raw = Isometry::from_entries(self.a, self.b, self.reverses).compose_raw(g);
        self.a = raw.a();
        self.b = raw.b();
        self.reverses = raw.reverses();
    }

    fn rescale(&mut self) {
        let s = self.a.norm();
        if s > 1.0 {
            self.a /= s;
            self.b /= s;
            self.log_scale += s.ln();
        }
    }

    /// `ln |a|` of the unit-determinant representative.
    pub fn log_abs_a(&self) -> f64 {
        self.log_scale + self.a.norm().ln()
    }

    /// `d(o, g o) = 2 arccosh |a|`.
    pub fn distance(&self) -> f64 {
        if self.log_scale == 0.0 {
            return self.to_unscaled().origin_displacement();
        }
        let l = self.log_abs_a().max(0.0);
        2.0 * (l + (1.0 + (-(-2.0 * l).exp_m1()).sqrt()).ln())
    }

    /// Argument of `g(o)` in `[0, 2π)`.
    pub fn boundary_angle(&self) -> f64 {
        let t = wrap_tau(self.b.arg() + self.a.arg());
        if TAU - t < 1e-12 {
            0.0
        } else {
            t
        }
    }

    /// `|g(o)| = |b|/|a|`.
    pub fn image_radius(&self) -> f64 {
        self.b.norm() / self.a.norm()
    }

    fn to_unscaled(self) -> Isometry {
        Isometry::from_entries(self.a, self.b, self.reverses).renormalized()
    }

    /// The plain matrix, when its entries are representable.
    pub fn to_isometry(&self) -> Option<Isometry> {
        let s = self.log_scale.exp();
        if !s.is_finite() {
            return None;
        }
        Isometry::new(self.a * s, self.b * s, self.reverses).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkPath {
    pub terminal: ScaledIsometry,
    pub distance: f64,
    pub boundary_angle: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSample {
    pub seed: u64,
    pub steps: usize,
    pub paths: Vec<WalkPath>,
}

impl WalkSample {
    pub fn distances(&self) -> Vec<f64> {
        self.paths.iter().map(|p| p.distance).collect()
    }
}

/// `n` i.i.d. steps on each of `paths` independent walks. Path `i` draws
/// from stream `i` of `seed`.
pub fn simulate(
    generators: &[Isometry],
    mu: &StepDistribution,
    steps: usize,
    paths: usize,
    seed: u64,
) -> Result<WalkSample> {
    if generators.len() != mu.symbols() {
        return Err(Error::SymbolMismatch { expected: mu.symbols(), found: generators.len() });
    }
    let records = map_indexed(paths, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let mut acc = ScaledIsometry::IDENTITY;
        for step in 1..=steps {
            acc.mul(&generators[mu.sample_index(rng.gen::<f64>())]);
            if step % RESCALE_EVERY == 0 {
                acc.rescale();
            }
        }
        acc.rescale();
        WalkPath {
            terminal: acc,
            distance: acc.distance(),
            boundary_angle: acc.boundary_angle(),
            radius: acc.image_radius(),
        }
    });
    Ok(WalkSample { seed, steps, paths: records })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftEstimate {
    /// Mean of `d(o, w_n o)/n`.
    pub drift: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub steps: usize,
    pub paths: usize,
}

/// Drift with a normal-approximation 95% interval.
pub fn estimate_drift(sample: &WalkSample) -> Result<DriftEstimate> {
    let n = sample.paths.len();
    if sample.steps < 1 || n < 2 {
        return Err(Error::InsufficientSample(format!(
            "need n ≥ 1 and N ≥ 2, got n = {}, N = {n}",
            sample.steps
        )));
    }
    let rates: Vec<f64> = sample.paths.iter().map(|p| p.distance / sample.steps as f64).collect();
    let mean = rates.iter().sum::<f64>() / n as f64;
    let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let stderr = (var / n as f64).sqrt();
    Ok(DriftEstimate {
        drift: mean,
        stderr,
        ci_low: mean - Z95 * stderr,
        ci_high: mean + Z95 * stderr,
        steps: sample.steps,
        paths: n,
    })
}

/// Law of `w_n` as a map from canonical keys to (representative, mass).
pub type Convolution = BTreeMap<IsometryKey, (Isometry, f64)>;

/// Exact law of `w_n` for `n = 1..=n_max`.
pub fn convolution_powers(mu: &StepDistribution, generators: &[Isometry], n_max: usize) -> Result<Vec<Convolution>> {
    if generators.len() != mu.symbols() {
        return Err(Error::SymbolMismatch { expected: mu.symbols(), found: generators.len() });
    }
    let steps: Vec<(Isometry, f64)> = generators
        .iter()
        .zip(mu.probabilities())
        .filter(|(_, &p)| p > 0.0)
        .map(|(g, &p)| (g.canonical(), p))
        .collect();
    let products = worst_case_products(steps.len() as u64, n_max);
    if products > MAX_PRODUCTS {
        return Err(Error::SupportTooLarge { products });
    }
    let mut current: Convolution = BTreeMap::new();
    current.insert(Isometry::IDENTITY.key(KEY_RESOLUTION), (Isometry::IDENTITY, 1.0));
    let mut powers = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let support: Vec<&(Isometry, f64)> = current.values().collect();
        let parts = map_indexed(support.len(), |i| {
            let (w, p) = support[i];
            steps
                .iter()
                .map(|(g, q)| {
                    let h = w.compose(g);
                    (h.key(KEY_RESOLUTION), h, p * q)
                })
                .collect::<Vec<_>>()
        });
        let mut next: Convolution = BTreeMap::new();
        for (key, h, p) in parts.into_iter().flatten() {
            next.entry(key).and_modify(|e| e.1 += p).or_insert((h, p));
        }
        powers.push(next.clone());
        current = next;
    }
    Ok(powers)
}

/// `Σ_{n ≤ n_max} s^n`, the number of products enumerated when nothing
/// collides. Saturates instead of overflowing.
pub fn worst_case_products(support: u64, n_max: usize) -> u64 {
    let mut total: u64 = 0;
    let mut level: u64 = 1;
    for _ in 0..n_max {
        level = level.saturating_mul(support);
        total = total.saturating_add(level);
    }
    total
}

pub fn shannon_entropy(law: &Convolution) -> f64 {
    law.values().filter(|(_, p)| *p > 0.0).map(|(_, p)| -p * p.ln()).sum()
}

/// `H(μⁿ)/n` for `n = 1..=n_max`.
pub fn entropy_upper_bounds(mu: &StepDistribution, generators: &[Isometry], n_max: usize) -> Result<Vec<f64>> {
    Ok(convolution_powers(mu, generators, n_max)?
        .iter()
        .enumerate()
        .map(|(i, law)| shannon_entropy(law) / (i + 1) as f64)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureHistogram {
    pub bins: usize,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    /// Share of paths with `|w_n o| > 0.99`.
    pub settled_fraction: f64,
    /// Whether the settled share reaches 95%.
    pub quality_ok: bool,
}

impl MeasureHistogram {
    pub fn bin_start(&self, k: usize) -> f64 {
        TAU * k as f64 / self.bins as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_start_rad,bin_end_rad,count,frequency\n");
        for k in 0..self.bins {
            out.push_str(&format!(
                "{:?},{:?},{},{:?}\n",
                self.bin_start(k),
                self.bin_start(k + 1),
                self.counts[k],
                self.frequencies[k]
            ));
        }
        out
    }

    /// `(bin centre, frequency)` pairs.
    pub fn plot_series(&self) -> Vec<(f64, f64)> {
        (0..self.bins)
            .map(|k| (TAU * (k as f64 + 0.5) / self.bins as f64, self.frequencies[k]))
            .collect()
    }

    /// Bins whose count differs from the opposite bin by more than four
    /// multinomial standard deviations. Needs an even bin count.
    pub fn pi_rotation_outliers(&self) -> Option<Vec<usize>> {
        if self.bins % 2 != 0 {
            return None;
        }
        let half = self.bins / 2;
        Some(
            (0..half)
                .filter(|&k| {
                    let (c, d) = (self.counts[k] as f64, self.counts[k + half] as f64);
                    (c - d).abs() > 4.0 * (c + d).sqrt()
                })
                .collect(),
        )
    }
}

/// Empirical law of the boundary angles in `K` equal bins of `[0, 2π)`.
pub fn boundary_histogram(sample: &WalkSample, bins: usize) -> Result<MeasureHistogram> {
    if bins == 0 {
        return Err(Error::InvalidArgument("need at least one bin".into()));
    }
    let mut counts = vec![0u64; bins];
    for p in &sample.paths {
        let k = ((p.boundary_angle / TAU * bins as f64).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = sample.paths.len();
    let frequencies = if n == 0 {
        vec![0.0; bins]
    } else {
        counts.iter().map(|&c| c as f64 / n as f64).collect()
    };
    let settled = sample.paths.iter().filter(|p| p.radius > QUALITY_RADIUS).count();
    let settled_fraction = if n == 0 { 0.0 } else { settled as f64 / n as f64 };
    Ok(MeasureHistogram {
        bins,
        counts,
        frequencies,
        settled_fraction,
        quality_ok: settled_fraction >= QUALITY_FRACTION,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
    /// Largest convolution power enumerated exactly.
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub drift: DriftEstimate,
    pub entropy_bounds: Vec<f64>,
    /// `min_n H(μⁿ)/n` divided by the drift estimate.
    pub dimension_bound: f64,
    pub volume_growth: f64,
    pub criterion: CriterionReport,
}

/// Drift, entropy bounds and the resulting bound on the dimension of the
/// hitting measure for the walk on the side pairings of `polygon`.
pub fn dimension_report(polygon: &SymmetricPolygon, mu: &StepDistribution, params: SimParams) -> Result<DimensionReport> {
    if mu.kind() != MeasureKind::Free || mu.m() != polygon.m() {
        return Err(Error::SymbolMismatch { expected: 2 * polygon.m(), found: mu.symbols() });
    }
    let generators = side_pairings(polygon);
    let sample = simulate(&generators, mu, params.steps, params.paths, params.seed)?;
    let drift = estimate_drift(&sample)?;
    let entropy_bounds = entropy_upper_bounds(mu, &generators, params.n_max)?;
    let h = entropy_bounds.iter().copied().fold(f64::INFINITY, f64::min);
    let dimension_bound = if h == 0.0 {
        0.0
    } else if drift.drift > 0.0 {
        h / drift.drift
    } else {
        f64::INFINITY
    };
    Ok(DimensionReport {
        drift,
        entropy_bounds,
        dimension_bound,
        volume_growth: 1.0,
        criterion: polygon_criterion(polygon),
    })
}
