//! Nearest-neighbour walks on free groups and on free products of copies of
//! ℤ/2ℤ, where first-passage probabilities solve a finite fixed-point
//! system on the Cayley tree.
//!
//! A distribution has `2m` symbols. For the free kind, symbol `j < m` is the
//! generator `s_j` and `j + m` its inverse; for the involutive kind every
//! symbol is its own inverse.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequality::sigma_of_lengths;
use crate::parallel::map_indexed;
use crate::sampling::stream_rng;

const SUM_TOL: f64 = 1e-14;
const STEP_TOL: f64 = 1e-15;
const RESIDUAL_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 1_000_000;
const WITNESS_TOL: f64 = 1e-12;
/// Distance from the target beyond which each new record distance plays
/// Russian roulette with survival probability 1/2.
const ROULETTE_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Free,
    Involutive,
}

/// Probability vector on `2m` generator symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct StepDistribution {
    kind: MeasureKind,
    m: usize,
    probabilities: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    kind: MeasureKind,
    m: usize,
    probabilities: Vec<f64>,
}

impl TryFrom<RawDistribution> for StepDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        StepDistribution::new(raw.kind, raw.m, raw.probabilities)
    }
}

impl StepDistribution {
    pub fn new(kind: MeasureKind, m: usize, probabilities: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDistribution("need at least one generator".into()));
        }
        if probabilities.len() != 2 * m {
            return Err(Error::InvalidDistribution(format!(
                "expected {} probabilities, got {}",
                2 * m,
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|&p| !(p >= 0.0 && p <= 1.0)) {
            return Err(Error::InvalidDistribution("probabilities must lie in [0, 1]".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(StepDistribution { kind, m, probabilities })
    }

    pub fn uniform(kind: MeasureKind, m: usize) -> Result<Self> {
        Self::new(kind, m, vec![1.0 / (2 * m) as f64; 2 * m])
    }

    /// All mass on one symbol.
    pub fn dirac(kind: MeasureKind, m: usize, symbol: usize) -> Result<Self> {
        let mut p = vec![0.0; 2 * m];
        *p.get_mut(symbol).ok_or_else(|| Error::InvalidArgument("symbol out of range".into()))? = 1.0;
        Self::new(kind, m, p)
    }

    /// Random fully supported distribution (flat Dirichlet weights).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, kind: MeasureKind, m: usize) -> Result<Self> {
        let mut p = crate::sampling::flat_dirichlet(rng, 2 * m);
        let excess = p.iter().sum::<f64>() - 1.0;
        p[0] -= excess;
        Self::new(kind, m, p)
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn symbols(&self) -> usize {
        2 * self.m
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn prob(&self, symbol: usize) -> f64 {
        self.probabilities[symbol]
    }

    pub fn inverse(&self, symbol: usize) -> usize {
        match self.kind {
            MeasureKind::Free => (symbol + self.m) % (2 * self.m),
            MeasureKind::Involutive => symbol,
        }
    }

    /// `μ(s) = μ(s⁻¹)` for every symbol.
    pub fn is_symmetric(&self) -> bool {
        (0..self.symbols()).all(|j| self.prob(j) == self.prob(self.inverse(j)))
    }

    /// Index of the symbol hit by `u ∈ [0, 1)` under the cumulative law.
    pub(crate) fn sample_index(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let last = (0..self.symbols()).rev().find(|&j| self.prob(j) > 0.0).unwrap_or(0);
        for (j, &p) in self.probabilities.iter().enumerate() {
            acc += p;
            if u < acc && p > 0.0 {
                return j;
            }
        }
        last
    }
}

/// `x_j = F_μ(e, s_j)` for every symbol. For the free kind `x̌_i = x_{i+m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstPassage {
    pub kind: MeasureKind,
    pub m: usize,
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl FirstPassage {
    /// `F(e, s_i⁻¹)`.
    pub fn x_check(&self, i: usize) -> f64 {
        match self.kind {
            MeasureKind::Free => self.x[(i + self.m) % (2 * self.m)],
            MeasureKind::Involutive => self.x[i],
        }
    }
}

/// `S_j = Σ_{k≠j} μ_k x_{k⁻¹}`.
fn escape_sums(mu: &StepDistribution, x: &[f64]) -> Vec<f64> {
    // summed term by term, so each sum is monotone in `x` also in floating point
    let n = mu.symbols();
    (0..n)
        .map(|j| (0..n).filter(|&k| k != j).map(|k| mu.prob(k) * x[mu.inverse(k)]).sum())
        .collect()
}

/// One sweep of `x_j ← μ_j / (1 − S_j)`. Starting from zero, the sweeps
/// increase monotonically to the least fixed point.
pub fn first_passage_step(mu: &StepDistribution, x: &[f64]) -> Vec<f64> {
    let s = escape_sums(mu, x);
    (0..mu.symbols())
        .map(|j| {
            let p = mu.prob(j);
            if p == 0.0 {
                0.0
            } else {
                (p / (1.0 - s[j]).max(p)).min(1.0)
            }
        })
        .collect()
}

/// Largest violation of `x_j = μ_j + x_j S_j`.
pub fn first_passage_residual(mu: &StepDistribution, x: &[f64]) -> f64 {
    let s = escape_sums(mu, x);
    (0..mu.symbols())
        .map(|j| (x[j] - mu.prob(j) - x[j] * s[j]).abs())
        .fold(0.0, f64::max)
}

pub fn solve_first_passage(mu: &StepDistribution) -> Result<FirstPassage> {
    let mut x = vec![0.0; mu.symbols()];
    for iteration in 1..=MAX_ITERATIONS {
        let next = first_passage_step(mu, &x);
        let change = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if change < STEP_TOL {
            let residual = first_passage_residual(mu, &x);
            if residual < RESIDUAL_TOL {
                return Ok(FirstPassage { kind: mu.kind, m: mu.m, x, residual, iterations: iteration });
            }
            return Err(Error::NonConvergence { iterations: iteration, residual });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        residual: first_passage_residual(mu, &x),
    })
}

/// Hitting measure of the cylinder of reduced words starting with each
/// symbol.
pub fn cylinder_measures(fp: &FirstPassage) -> Result<Vec<f64>> {
    match fp.kind {
        MeasureKind::Free => {
            let m = fp.m;
            let mut nu = vec![0.0; 2 * m];
            for i in 0..m {
                let (x, xc) = (fp.x[i], fp.x[i + m]);
                if x * xc >= 1.0 - SUM_TOL {
                    return Err(Error::DegenerateDenominator { index: i });
                }
                let d = 1.0 - x * xc;
                nu[i] = x * (1.0 - xc) / d;
                nu[i + m] = xc * (1.0 - x) / d;
            }
            Ok(nu)
        }
        MeasureKind::Involutive => Ok(fp.x.iter().map(|x| x / (1.0 + x)).collect()),
    }
}

/// `−log F(e, s)`.
pub fn green_distance(fp: &FirstPassage, symbol: usize) -> Result<f64> {
    let x = fp.x[symbol];
    if x <= 0.0 {
        return Err(Error::InfiniteDistance { index: symbol });
    }
    Ok(-x.ln())
}

/// Probability that a ±1 walk on ℤ ever reaches `+1` (gambler's ruin).
pub fn integer_line_first_passage(p_plus: f64, p_minus: f64) -> f64 {
    if p_minus == 0.0 {
        1.0
    } else {
        (p_plus / p_minus).min(1.0)
    }
}

/// Per-generator quantities of the witness search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCandidate {
    pub index: usize,
    pub e_pow_length: f64,
    /// `(2 − x − x̌)/(x + x̌ − 2xx̌)`, infinite when the denominator vanishes.
    pub threshold: f64,
    /// `min(−log x, −log x̌)`.
    pub green_bound: f64,
    pub is_witness: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub sigma: f64,
    pub candidates: Vec<WitnessCandidate>,
    pub witnesses: Vec<usize>,
}

impl WitnessReport {
    pub fn first(&self) -> Option<&WitnessCandidate> {
        self.candidates.iter().find(|c| c.is_witness)
    }
}

/// `(2 − x − x̌)/(x + x̌ − 2xx̌)`.
pub fn witness_threshold(x: f64, x_check: f64) -> f64 {
    let den = x + x_check - 2.0 * x * x_check;
    if den <= 0.0 {
        f64::INFINITY
    } else {
        (2.0 - x - x_check) / den
    }
}

/// Generators whose translation length beats both the comparison walk's
/// threshold and its Green distance. `lengths` holds one length per
/// generator (or `2m` lengths with `ℓ_{i+m} = ℓ_i`).
pub fn criterion_witness(lengths: &[f64], mu: &StepDistribution) -> Result<WitnessReport> {
    if mu.kind() != MeasureKind::Free {
        return Err(Error::WrongKind("witness search needs a free-group measure".into()));
    }
    let m = mu.m();
    let per_generator: Vec<f64> = if lengths.len() == m {
        lengths.to_vec()
    } else if lengths.len() == 2 * m {
        if (0..m).any(|i| (lengths[i] - lengths[i + m]).abs() > 1e-9) {
            return Err(Error::InvalidArgument("inverse lengths differ".into()));
        }
        lengths[..m].to_vec()
    } else {
        return Err(Error::SymbolMismatch { expected: m, found: lengths.len() });
    };
    let fp = solve_first_passage(mu)?;
    let sigma = 2.0 * sigma_of_lengths(&per_generator);
    let candidates: Vec<WitnessCandidate> = (0..m)
        .map(|i| {
            let (x, xc) = (fp.x[i], fp.x[i + m]);
            let l = per_generator[i];
            let threshold = witness_threshold(x, xc);
            let green_bound = (-x.ln()).min(-xc.ln());
            let e_pow_length = l.exp();
            let is_witness = e_pow_length > threshold * (1.0 + WITNESS_TOL)
                && l > green_bound + WITNESS_TOL * green_bound.abs().max(1.0);
            WitnessCandidate { index: i, e_pow_length, threshold, green_bound, is_witness }
        })
        .collect();
    let witnesses: Vec<usize> = candidates.iter().filter(|c| c.is_witness).map(|c| c.index).collect();
    if sigma >= 1.0 {
        return Err(Error::NoWitnessGuarantee { sigma, witnesses });
    }
    Ok(WitnessReport { sigma, candidates, witnesses })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub paths: usize,
    pub horizon: usize,
}

/// Monte Carlo estimate of `F(e, s)` truncated at `horizon` steps.
pub fn mc_first_passage(
    mu: &StepDistribution,
    symbol: usize,
    paths: usize,
    horizon: usize,
    seed: u64,
) -> Result<McEstimate> {
    mc_first_passage_to_word(mu, &[symbol], paths, horizon, seed)
}

/// Monte Carlo estimate of the probability that the walk visits the reduced
/// word `target` within `horizon` steps.
///
/// Each path records the exact one-step hitting probability whenever the
/// target is adjacent and then continues conditioned on missing it, with
/// its weight reduced accordingly. A path stops once the target is out of
/// reach, and far from the target it is thinned by Russian roulette. The
/// estimator is unbiased and exact for `horizon = 1`.
pub fn mc_first_passage_to_word(
    mu: &StepDistribution,
    target: &[usize],
    paths: usize,
    horizon: usize,
    seed: u64,
) -> Result<McEstimate> {
    if paths == 0 || horizon == 0 {
        return Err(Error::InvalidArgument("need at least one path and one step".into()));
    }
    if target.iter().any(|&s| s >= mu.symbols()) {
        return Err(Error::SymbolMismatch { expected: mu.symbols(), found: target.len() });
    }
    if target.windows(2).any(|w| w[1] == mu.inverse(w[0])) {
        return Err(Error::InvalidArgument("target word is not reduced".into()));
    }
    let values = map_indexed(paths, |path| {
        let mut rng = stream_rng(seed, path as u64);
        one_path(mu, target, horizon, &mut rng)
    });
    let n = paths as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if paths > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate { estimate: mean, stderr: (var / n).sqrt(), paths, horizon })
}

fn one_path<R: Rng>(mu: &StepDistribution, target: &[usize], horizon: usize, rng: &mut R) -> f64 {
    if target.is_empty() {
        return 1.0;
    }
    let mut word: Vec<usize> = Vec::new();
    let mut weight = 1.0;
    let mut hit = 0.0;
    // length of the common prefix of `word` and `target`
    let mut common = 0;
    let mut record = target.len();
    for step in 0..horizon {
        let distance = word.len() + target.len() - 2 * common;
        if distance > horizon - step || weight == 0.0 {
            break;
        }
        if distance > record {
            record = distance;
            if distance >= ROULETTE_DEPTH {
                if rng.gen::<f64>() < 0.5 {
                    break;
                }
                weight *= 2.0;
            }
        }
        // the one letter that would land on the target, if adjacent
        let closing = if distance != 1 {
            None
        } else if word.len() == common {
            Some(target[common])
        } else {
            Some(mu.inverse(word[common]))
        };
        let p_hit = closing.map_or(0.0, |s| mu.prob(s));
        hit += weight * p_hit;
        if p_hit >= 1.0 {
            break;
        }
        weight *= 1.0 - p_hit;
        let letter = sample_avoiding(mu, closing, p_hit, rng);
        match word.last() {
            Some(&last) if last == mu.inverse(letter) => {
                if common == word.len() {
                    common -= 1;
                }
                word.pop();
            }
            _ => {
                if common == word.len() && target.get(common) == Some(&letter) {
                    common += 1;
                }
                word.push(letter);
            }
        }
    }
    hit
}

fn sample_avoiding<R: Rng>(mu: &StepDistribution, avoid: Option<usize>, p_avoid: f64, rng: &mut R) -> usize {
    let u = rng.gen::<f64>() * (1.0 - p_avoid);
    let mut acc = 0.0;
    let mut last = 0;
    for j in 0..mu.symbols() {
        if Some(j) == avoid || mu.prob(j) == 0.0 {
            continue;
        }
        acc += mu.prob(j);
        last = j;
        if u < acc {
            return j;
        }
    }
    last
}
