//! Centrally symmetric hyperbolic 2m-gons.
//!
//! A polygon is laid out from its half-data: `m` central angles `α_i`
//! between consecutive perpendicular feet (summing to π) and `m` apothems
//! `a_i`. Side `j` is the geodesic perpendicular to the ray at angle
//! `φ_j = α_0 + … + α_{j-1}` at distance `a_j`; sides `j + m` are the images
//! under the half-turn about the centre. Vertex `p_j` joins sides `j` and
//! `j + 1`, so the midpoint `q_j` of side `j` lies between `p_{j-1}` and `p_j`.
//!
//! Indices are zero-based throughout.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::{
    angle_at, dist, foot_of_perpendicular, klein_intersection, midpoint, point_along, wrap_pi,
    wrap_tau, DiskPoint, Geodesic, Isometry,
};

/// Angle sums must match `2π/k` this closely for [`check_cycle`].
pub const CYCLE_TOL: f64 = 1e-8;
/// Largest `k` tried by [`check_cycle`].
pub const MAX_CYCLE_K: u32 = 64;
const SOLVE_TOL: f64 = 1e-11;
/// Largest distance from the centre to a vertex of a sampled polygon. Beyond
/// it disk coordinates carry too few significant digits for the checks the
/// samples feed.
pub const SAMPLE_RADIUS: f64 = 6.0;
const MEET_TOL: f64 = 1e-12;
const OBTUSE_TOL: f64 = 1e-12;
const GLUE_TOL: f64 = 1e-7;

/// Cosine of the vertex angle between two sides at distances `a_i`, `a_j`
/// whose feet subtend `alpha` at the centre.
pub fn vertex_cosine(a_i: f64, a_j: f64, alpha: f64) -> f64 {
    -a_i.cosh() * a_j.cosh() * alpha.cos() + a_i.sinh() * a_j.sinh()
}

/// Interior angle where two consecutive sides meet.
pub fn vertex_angle(a_i: f64, a_j: f64, alpha: f64) -> Result<f64> {
    vertex_angle_indexed(0, a_i, a_j, alpha)
}

fn vertex_angle_indexed(index: usize, a_i: f64, a_j: f64, alpha: f64) -> Result<f64> {
    let c = vertex_cosine(a_i, a_j, alpha);
    if !(c < 1.0 - MEET_TOL) {
        return Err(Error::SidesDoNotMeet { index, next: index + 1, cosine: c });
    }
    if c <= -1.0 + MEET_TOL {
        return Err(Error::DegenerateAngle { index, cosine: c });
    }
    Ok(c.acos())
}

/// The same angle from `z = tanh(a)`:
/// `cos α = z_i z_j − cos γ · √(1−z_i²) √(1−z_j²)`.
pub fn vertex_angle_from_tanh(z_i: f64, z_j: f64, alpha: f64) -> f64 {
    let s = ((1.0 - z_i * z_i) * (1.0 - z_j * z_j)).sqrt();
    ((z_i * z_j - alpha.cos()) / s).clamp(-1.0, 1.0).acos()
}

/// `Σ 1/(1+e^{2x})` over the given distances.
pub fn phi_sum(values: &[f64]) -> f64 {
    values.iter().map(|&x| 1.0 / (1.0 + (2.0 * x).exp())).sum()
}

/// Parameters for [`build`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonSpec {
    pub m: usize,
    pub central_angles: Vec<f64>,
    pub apothem_weights: Vec<f64>,
    /// When set, all weights are scaled by a common factor so that the
    /// vertex angles satisfy the cycle condition for this `k`.
    pub target_k: Option<u32>,
}

impl PolygonSpec {
    /// Equal central angles and weights.
    pub fn uniform(m: usize, target_k: Option<u32>) -> Self {
        PolygonSpec {
            m,
            central_angles: vec![PI / m as f64; m],
            apothem_weights: vec![1.0; m],
            target_k,
        }
    }

    fn validate(&self) -> Result<()> {
        check_half_data(self.m, &self.central_angles, &self.apothem_weights)?;
        if self.target_k == Some(0) {
            return Err(Error::InvalidArgument("target k must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_half_data(m: usize, alpha: &[f64], weights: &[f64]) -> Result<()> {
    if m < 3 {
        return Err(Error::InvalidDimension { m });
    }
    if alpha.len() != m || weights.len() != m {
        return Err(Error::InvalidArgument(format!(
            "expected {m} central angles and {m} apothems, got {} and {}",
            alpha.len(),
            weights.len()
        )));
    }
    if alpha.iter().any(|&a| !(a > 0.0 && a < PI)) {
        return Err(Error::InvalidArgument("central angles must lie in (0, π)".into()));
    }
    let sum: f64 = alpha.iter().sum();
    if (sum - PI).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "central angles sum to {sum}, expected π"
        )));
    }
    if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidArgument("apothems must be positive".into()));
    }
    Ok(())
}

/// A centrally symmetric 2m-gon centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPolygon {
    m: usize,
    k: Option<u32>,
    alpha: Vec<f64>,
    apothems: Vec<f64>,
    feet_angles: Vec<f64>,
    gamma: Vec<f64>,
    sides: Vec<Geodesic>,
    vertices: Vec<DiskPoint>,
    midpoints: Vec<DiskPoint>,
    midpoint_distances: Vec<f64>,
    midpoint_angles: Vec<f64>,
}

impl SymmetricPolygon {
    /// Lays out the polygon with the first foot on the positive real axis.
    pub fn from_parts(alpha: &[f64], apothems: &[f64], k: Option<u32>) -> Result<Self> {
        let m = alpha.len();
        check_half_data(m, alpha, apothems)?;

        let mut feet = Vec::with_capacity(m);
        let mut phi = 0.0;
        for &a in alpha {
            feet.push(phi);
            phi += a;
        }
        let gamma = (0..m)
            .map(|i| vertex_angle_indexed(i, apothems[i], apothems[(i + 1) % m], alpha[i]))
            .collect::<Result<Vec<_>>>()?;

        let n = 2 * m;
        let foot = |j: usize| if j < m { feet[j] } else { feet[j - m] + PI };
        let apothem = |j: usize| apothems[j % m];
        let sides = (0..n)
            .map(|j| Geodesic::perpendicular_to_ray(foot(j), apothem(j)))
            .collect::<Result<Vec<_>>>()?;

        // Klein chords x·(cos φ, sin φ) = tanh a; intersect consecutive pairs.
        let chord = |j: usize| {
            let f = foot(j);
            ([f.cos(), f.sin()], apothem(j).tanh())
        };
        let mut klein = Vec::with_capacity(n);
        for j in 0..m {
            let (n1, c1) = chord(j);
            let (n2, c2) = chord(j + 1);
            let det = n1[0] * n2[1] - n1[1] * n2[0];
            let x = (c1 * n2[1] - c2 * n1[1]) / det;
            let y = (n1[0] * c2 - n2[0] * c1) / det;
            if !(x * x + y * y < 1.0) {
                return Err(Error::SidesDoNotMeet {
                    index: j,
                    next: j + 1,
                    cosine: vertex_cosine(apothem(j), apothem(j + 1), alpha[j]),
                });
            }
            klein.push([x, y]);
        }
        for j in 0..m {
            klein.push([-klein[j][0], -klein[j][1]]);
        }
        // Each side must be traversed counter-clockwise from p_{j-1} to p_j.
        for j in 0..n {
            let f = foot(j);
            let tangent = [-f.sin(), f.cos()];
            let (prev, cur) = (klein[(j + n - 1) % n], klein[j]);
            let step = (cur[0] - prev[0]) * tangent[0] + (cur[1] - prev[1]) * tangent[1];
            if !(step > 1e-12) {
                return Err(Error::DegenerateVertex { index: j % m });
            }
        }
        let mut vertices: Vec<DiskPoint> = klein[..m]
            .iter()
            .map(|&k| DiskPoint::from_klein(k).expect("checked inside the disk"))
            .collect();
        for j in 0..m {
            vertices.push(vertices[j].neg());
        }
        let mut midpoints: Vec<DiskPoint> = (0..m)
            .map(|j| midpoint(vertices[(j + n - 1) % n], vertices[j]))
            .collect();
        for j in 0..m {
            midpoints.push(midpoints[j].neg());
        }
        let midpoint_distances = (0..m).map(|j| dist(DiskPoint::ORIGIN, midpoints[j])).collect();
        let midpoint_angles = (0..m)
            .map(|j| wrap_tau(midpoints[j + 1].arg() - midpoints[j].arg()))
            .collect();

        let area = (2 * m - 2) as f64 * PI - 2.0 * gamma.iter().sum::<f64>();
        if !(area > 0.0) {
            return Err(Error::DegenerateVertex { index: 0 });
        }

        Ok(SymmetricPolygon {
            m,
            k,
            alpha: alpha.to_vec(),
            apothems: apothems.to_vec(),
            feet_angles: feet,
            gamma,
            sides,
            vertices,
            midpoints,
            midpoint_distances,
            midpoint_angles,
        })
    }

    /// Polygon whose consecutive vertices are the given `2m` points, which
    /// must be centrally symmetric and in counter-clockwise order. The result
    /// is rotated so that the first foot lies on the positive real axis.
    pub fn from_vertices(vertices: &[DiskPoint], k: Option<u32>) -> Result<Self> {
        let n = vertices.len();
        if n % 2 != 0 || n < 6 {
            return Err(Error::InvalidArgument(format!(
                "need an even number ≥ 6 of vertices, got {n}"
            )));
        }
        let m = n / 2;
        let mut feet = Vec::with_capacity(m);
        let mut apothems = Vec::with_capacity(m);
        for j in 0..m {
            let side = Geodesic::through(vertices[(j + n - 1) % n], vertices[j])?;
            let (a, psi) = side.distance_from_origin();
            feet.push(psi);
            apothems.push(a);
        }
        let mut alpha: Vec<f64> = (0..m - 1)
            .map(|j| wrap_tau(feet[j + 1] - feet[j]))
            .collect();
        alpha.push(wrap_tau(feet[0] + PI - feet[m - 1]));
        // absorb rounding so the sum is π to the last bit that matters
        let excess = alpha.iter().sum::<f64>() - PI;
        if excess.abs() > 1e-9 {
            return Err(Error::DegenerateVertex { index: 0 });
        }
        alpha[m - 1] -= excess;
        Self::from_parts(&alpha, &apothems, k)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> Option<u32> {
        self.k
    }

    pub fn central_angles(&self) -> &[f64] {
        &self.alpha
    }

    pub fn apothems(&self) -> &[f64] {
        &self.apothems
    }

    pub fn feet_angles(&self) -> &[f64] {
        &self.feet_angles
    }

    /// Vertex angles `γ_0..γ_{m-1}`; `γ_{j+m} = γ_j`.
    pub fn vertex_angles(&self) -> &[f64] {
        &self.gamma
    }

    pub fn sides(&self) -> &[Geodesic] {
        &self.sides
    }

    pub fn vertices(&self) -> &[DiskPoint] {
        &self.vertices
    }

    pub fn midpoints(&self) -> &[DiskPoint] {
        &self.midpoints
    }

    /// `ℓ_j = d(o, q_j)` for `j < m`.
    pub fn midpoint_distances(&self) -> &[f64] {
        &self.midpoint_distances
    }

    /// Angles `q_j ô q_{j+1}` for `j < m`, summing to π.
    pub fn midpoint_angles(&self) -> &[f64] {
        &self.midpoint_angles
    }

    /// `z_i = tanh(a_i)`.
    pub fn tanh_apothems(&self) -> Vec<f64> {
        self.apothems.iter().map(|a| a.tanh()).collect()
    }

    pub fn angle_sum(&self) -> f64 {
        self.gamma.iter().sum()
    }

    /// Returns a copy with the cycle integer recorded.
    pub fn with_k(mut self, k: Option<u32>) -> Self {
        self.k = k;
        self
    }

    /// Hyperbolic area `(2m−2)π − 2Σγ_i`.
    pub fn area(&self) -> f64 {
        (2 * self.m - 2) as f64 * PI - 2.0 * self.angle_sum()
    }

    /// Vertex angles measured directly at the vertices, for `j < m`.
    pub fn measured_vertex_angles(&self) -> Vec<f64> {
        (0..self.m)
            .map(|j| angle_at(self.vertices[j], self.midpoints[j], self.midpoints[j + 1]))
            .collect()
    }

    /// `Σ_{i<2m} 1/(1+e^{2ℓ_i})` over all side midpoints.
    pub fn sigma(&self) -> f64 {
        2.0 * phi_sum(&self.midpoint_distances)
    }

    /// Whether `p` lies strictly inside the polygon.
    pub fn contains(&self, p: DiskPoint) -> bool {
        klein_convex_contains(&self.vertices, p)
    }
}

/// Strict containment in a convex polygon, tested on Klein-model chords.
/// Works for either orientation.
pub fn klein_convex_contains(vertices: &[DiskPoint], p: DiskPoint) -> bool {
    let k: Vec<[f64; 2]> = vertices.iter().map(|v| v.to_klein()).collect();
    let x = p.to_klein();
    let n = k.len();
    let mut sign = 0.0;
    for i in 0..n {
        let (a, b) = (k[i], k[(i + 1) % n]);
        let cross = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]);
        if cross == 0.0 {
            return false;
        }
        if sign == 0.0 {
            sign = cross.signum();
        } else if cross.signum() != sign {
            return false;
        }
    }
    true
}

/// Consecutive turns all share one sign in the Klein chart.
fn klein_strictly_convex(points: &[DiskPoint]) -> bool {
    let k: Vec<[f64; 2]> = points.iter().map(|p| p.to_klein()).collect();
    let n = k.len();
    let turns: Vec<f64> = (0..n)
        .map(|i| {
            let (p, q, r) = (k[i], k[(i + 1) % n], k[(i + 2) % n]);
            (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0])
        })
        .collect();
    turns.iter().all(|&t| t > 0.0) || turns.iter().all(|&t| t < 0.0)
}

/// Builds the polygon described by `spec`, solving for the apothem scale
/// when a cycle integer is requested.
pub fn build(spec: &PolygonSpec) -> Result<SymmetricPolygon> {
    spec.validate()?;
    let Some(k) = spec.target_k else {
        return SymmetricPolygon::from_parts(&spec.central_angles, &spec.apothem_weights, None);
    };
    let target = TAU / k as f64;
    let scale = solve_scale(&spec.central_angles, &spec.apothem_weights, target)?;
    let apothems: Vec<f64> = spec.apothem_weights.iter().map(|w| w * scale).collect();
    SymmetricPolygon::from_parts(&spec.central_angles, &apothems, Some(k))
}

/// Angle sum `Σγ_i` for the weights scaled by `t`, or `None` once a vertex
/// has gone ideal or flat.
pub fn scaled_angle_sum(alpha: &[f64], weights: &[f64], t: f64) -> Option<f64> {
    let m = alpha.len();
    let mut sum = 0.0;
    for i in 0..m {
        let c = vertex_cosine(t * weights[i], t * weights[(i + 1) % m], alpha[i]);
        if !(c < 1.0 - MEET_TOL) || c <= -1.0 + MEET_TOL {
            return None;
        }
        sum += c.acos();
    }
    Some(sum)
}

/// Largest scale `t` such that every vertex stays real on `(0, t)`.
///
/// Writing `c(t) = A·cosh(tS) − B·cosh(tD)` with `S = a+b`, `D = |a−b|`
/// shows each vertex cosine is unimodal: it may dip first, then grows
/// without bound. The first exit from `(−1, 1)` is either the dip crossing
/// `−1` or the later rise through `1`.
pub fn real_scale_limit(alpha: &[f64], weights: &[f64]) -> f64 {
    let m = alpha.len();
    (0..m)
        .map(|i| vertex_exit(weights[i], weights[(i + 1) % m], alpha[i]))
        .fold(f64::INFINITY, f64::min)
}

fn vertex_exit(a: f64, b: f64, alpha: f64) -> f64 {
    let c = |t: f64| vertex_cosine(t * a, t * b, alpha);
    let (big_a, big_b) = ((1.0 - alpha.cos()) / 2.0, (1.0 + alpha.cos()) / 2.0);
    let (s, d) = (a + b, (a - b).abs());
    let slope = |t: f64| big_a * s * (t * s).sinh() - big_b * d * (t * d).sinh();
    // locate the minimum of c
    let mut t_min = 0.0;
    if big_a * s * s < big_b * d * d {
        let mut hi = 1.0;
        while slope(hi) < 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        t_min = lo;
    }
    let crossing = |mut lo: f64, mut hi: f64, inside: &dyn Fn(f64) -> bool| {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if c(t_min) <= -1.0 + MEET_TOL {
        return crossing(0.0, t_min, &|t| c(t) > -1.0 + MEET_TOL);
    }
    let mut hi = t_min.max(1.0);
    while c(hi) < 1.0 - MEET_TOL {
        hi *= 2.0;
    }
    crossing(t_min, hi, &|t| c(t) < 1.0 - MEET_TOL)
}

/// Bracket `[lo, hi]` of the apothem scale with `Σγ(lo) > target ≥ Σγ(hi)`,
/// found by doubling from `1e-6` inside the real range.
pub fn scale_bracket(alpha: &[f64], weights: &[f64], target: f64) -> Result<(f64, f64)> {
    let m = alpha.len();
    let bound = (m - 1) as f64 * PI;
    if target >= bound - 1e-12 {
        return Err(Error::TargetUnreachable { target, bound });
    }
    let t_max = real_scale_limit(alpha, weights);
    let mut lo = 1e-6;
    let degenerate = || Error::DegenerateVertex { index: first_exit(alpha, weights) };
    if lo >= t_max {
        return Err(degenerate());
    }
    let Some(s_lo) = scaled_angle_sum(alpha, weights, lo) else {
        return Err(degenerate());
    };
    if s_lo < target {
        return Err(Error::TargetUnreachable { target, bound });
    }
    loop {
        let next = (lo * 2.0).min(t_max);
        match scaled_angle_sum(alpha, weights, next) {
            Some(s) if s <= target => return Ok((lo, next)),
            Some(_) if next < t_max => lo = next,
            _ => return Err(degenerate()),
        }
    }
}

/// Common scale `t` with `Σγ_i(t·w) = target`.
fn solve_scale(alpha: &[f64], weights: &[f64], target: f64) -> Result<f64> {
    let (mut lo, mut hi) = scale_bracket(alpha, weights, target)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match scaled_angle_sum(alpha, weights, mid) {
            Some(s) if s > target => lo = mid,
            _ => hi = mid,
        }
    }
    let err = |t: f64| scaled_angle_sum(alpha, weights, t).map(|s| (s - target).abs());
    let best = match (err(lo), err(hi)) {
        (Some(a), Some(b)) if b < a => hi,
        (Some(_), _) => lo,
        (None, Some(_)) => hi,
        (None, None) => return Err(Error::DegenerateVertex { index: 0 }),
    };
    if err(best).is_some_and(|e| e < SOLVE_TOL) {
        Ok(best)
    } else {
        Err(Error::DegenerateVertex { index: 0 })
    }
}

/// Vertex that leaves the real range first.
fn first_exit(alpha: &[f64], weights: &[f64]) -> usize {
    let m = alpha.len();
    let exit = |k: usize| vertex_exit(weights[k], weights[(k + 1) % m], alpha[k]);
    (0..m).min_by(|&i, &j| exit(i).total_cmp(&exit(j))).unwrap_or(0)
}

/// Polygon with prescribed vertex angles `γ_i ∈ (0, π)`: the central angles
/// are solved from the apothems, and a common apothem scale is found so that
/// they sum to π.
pub fn build_with_vertex_angles(weights: &[f64], gamma: &[f64]) -> Result<SymmetricPolygon> {
    let m = weights.len();
    if m < 3 {
        return Err(Error::InvalidDimension { m });
    }
    if gamma.len() != m {
        return Err(Error::InvalidArgument("need one vertex angle per weight".into()));
    }
    if gamma.iter().any(|&g| !(g > 0.0 && g < PI)) {
        return Err(Error::InvalidArgument("vertex angles must lie in (0, π)".into()));
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidArgument("weights must be positive".into()));
    }
    let alphas = |t: f64| -> Vec<f64> {
        (0..m)
            .map(|i| {
                let (a, b) = (t * weights[i], t * weights[(i + 1) % m]);
                ((a.sinh() * b.sinh() - gamma[i].cos()) / (a.cosh() * b.cosh()))
                    .clamp(-1.0, 1.0)
                    .acos()
            })
            .collect()
    };
    // Σα runs continuously from mπ − Σγ down to 0, strictly decreasing when
    // every γ_i ≤ π/2.
    let total = |t: f64| alphas(t).iter().sum::<f64>();
    let (mut lo, mut hi) = (1e-9, 1.0);
    if total(lo) <= PI {
        return Err(Error::TargetUnreachable {
            target: gamma.iter().sum(),
            bound: (m - 1) as f64 * PI,
        });
    }
    while total(hi) > PI {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::DegenerateVertex { index: 0 });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total(mid) > PI {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = if (total(lo) - PI).abs() < (total(hi) - PI).abs() { lo } else { hi };
    let mut alpha = alphas(t);
    let excess = alpha.iter().sum::<f64>() - PI;
    if excess.abs() > 1e-12 {
        return Err(Error::DegenerateVertex { index: 0 });
    }
    alpha[m - 1] -= excess;
    let apothems: Vec<f64> = weights.iter().map(|w| w * t).collect();
    let polygon = SymmetricPolygon::from_parts(&alpha, &apothems, None)?;
    let k = check_cycle(&polygon).ok();
    Ok(polygon.with_k(k))
}

/// Random polygon satisfying the cycle condition for `k`: vertex angles are
/// `2π/k` times a flat Dirichlet vector shrunk towards the centre so that no
/// angle drops below `2π/(4mk)`, weights log-uniform in `[1/4, 4]`. Draws
/// with a vertex beyond [`SAMPLE_RADIUS`] are rejected.
pub fn random_polygon<R: Rng + ?Sized>(rng: &mut R, m: usize, k: u32) -> Result<SymmetricPolygon> {
    random_polygon_with_spread(rng, m, k, 4.0)
}

/// As [`random_polygon`] with weights log-uniform in `[1/spread, spread]`.
pub fn random_polygon_with_spread<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    k: u32,
    spread: f64,
) -> Result<SymmetricPolygon> {
    if m < 3 {
        return Err(Error::InvalidDimension { m });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("target k must be at least 1".into()));
    }
    let target = TAU / k as f64;
    let bound = (m - 1) as f64 * PI;
    if target >= bound - 1e-12 {
        return Err(Error::TargetUnreachable { target, bound });
    }
    let floor = 1.0 / (4 * m) as f64;
    let mut gamma: Vec<f64> = crate::sampling::flat_dirichlet(rng, m)
        .into_iter()
        .map(|g| target * (floor + (1.0 - m as f64 * floor) * g))
        .collect();
    let excess = gamma.iter().sum::<f64>() - target;
    gamma[m - 1] -= excess;
    let weights: Vec<f64> = (0..m)
        .map(|_| (rng.gen_range(-1.0..1.0) * spread.ln()).exp())
        .collect();
    let polygon = build_with_vertex_angles(&weights, &gamma)?;
    let radius = polygon.vertices()[..m]
        .iter()
        .map(|&v| dist(DiskPoint::ORIGIN, v))
        .fold(0.0, f64::max);
    if radius > SAMPLE_RADIUS {
        return Err(Error::PreconditionViolated(format!(
            "vertex at distance {radius} beyond the sampling radius {SAMPLE_RADIUS}"
        )));
    }
    let found = check_cycle(&polygon)?;
    if found != k {
        return Err(Error::NoIntegerCycle { angle_sum: polygon.angle_sum() });
    }
    Ok(polygon)
}

/// Draws random cycle-condition polygons until one builds, up to `tries`.
pub fn random_polygon_retrying<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    k: u32,
    tries: usize,
) -> Result<SymmetricPolygon> {
    let mut last = Error::DegenerateVertex { index: 0 };
    for _ in 0..tries {
        match random_polygon(rng, m, k) {
            Ok(p) => return Ok(p),
            Err(e @ Error::TargetUnreachable { .. }) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// The integer `k` with `Σγ_i = 2π/k`.
pub fn check_cycle(polygon: &SymmetricPolygon) -> Result<u32> {
    let s = polygon.angle_sum();
    (1..=MAX_CYCLE_K)
        .find(|&k| (s - TAU / k as f64).abs() < CYCLE_TOL)
        .ok_or(Error::NoIntegerCycle { angle_sum: s })
}

/// Translations `g_j = σ_{q_j} ∘ σ_o` identifying side `j + m` with side `j`,
/// followed by their inverses `g_{j+m} = g_j⁻¹`.
pub fn side_pairings(polygon: &SymmetricPolygon) -> Vec<Isometry> {
    let m = polygon.m;
    let half_turn = Isometry::rotation_pi(DiskPoint::ORIGIN);
    let forward: Vec<Isometry> = (0..m)
        .map(|j| Isometry::rotation_pi(polygon.midpoints[j]).compose(&half_turn))
        .collect();
    let inverse: Vec<Isometry> = forward.iter().map(Isometry::inverse).collect();
    forward.into_iter().chain(inverse).collect()
}

/// Obtuse angles and how they pair with acute neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeutralizingReport {
    /// Indices `j < m` with `γ_j > π/2`.
    pub obtuse: Vec<usize>,
    /// `(obtuse, partner)` with adjacent indices and `γ_obtuse + γ_partner ≤ π`.
    pub pairs: Vec<(usize, usize)>,
    /// Obtuse angles with no admissible neighbour at all.
    pub unmatched: Vec<usize>,
    /// Every obtuse angle sits in a pair and no two pairs share an angle.
    pub disjoint: bool,
}

pub fn neutralizing_pairs(polygon: &SymmetricPolygon) -> NeutralizingReport {
    neutralizing_pairs_of(&polygon.gamma)
}

/// Neutralizing pairs of a cyclic list of `m` vertex angles.
pub fn neutralizing_pairs_of(gamma: &[f64]) -> NeutralizingReport {
    let m = gamma.len();
    let obtuse: Vec<usize> = (0..m).filter(|&i| gamma[i] > FRAC_PI_2 + OBTUSE_TOL).collect();
    let candidates: Vec<Vec<usize>> = obtuse
        .iter()
        .map(|&i| {
            let mut c: Vec<usize> = [(i + m - 1) % m, (i + 1) % m]
                .into_iter()
                .filter(|&j| gamma[i] + gamma[j] <= PI + OBTUSE_TOL)
                .collect();
            c.dedup();
            c
        })
        .collect();

    // Maximum matching of obtuse angles to distinct partners (Kuhn).
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for o in 0..obtuse.len() {
        let mut seen = vec![false; m];
        augment(o, &candidates, &mut owner, &mut seen);
    }
    let mut pairs = Vec::new();
    let mut matched = vec![false; obtuse.len()];
    for (partner, who) in owner.iter().enumerate() {
        if let Some(o) = who {
            matched[*o] = true;
            pairs.push((obtuse[*o], partner));
        }
    }
    let mut unmatched = Vec::new();
    let mut shared = false;
    for (o, &i) in obtuse.iter().enumerate() {
        if matched[o] {
            continue;
        }
        match candidates[o].first() {
            Some(&p) => {
                shared = true;
                pairs.push((i, p));
            }
            None => unmatched.push(i),
        }
    }
    pairs.sort();
    let disjoint = unmatched.is_empty() && !shared;
    NeutralizingReport { obtuse, pairs, unmatched, disjoint }
}

fn augment(o: usize, candidates: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &p in &candidates[o] {
        if seen[p] {
            continue;
        }
        seen[p] = true;
        if owner[p].is_none_or(|other| augment(other, candidates, owner, seen)) {
            owner[p] = Some(o);
            return true;
        }
    }
    false
}

/// Pentagon `ABCDE` with `A = o` cut out by three sides: the side at
/// distance `a1` with foot at angle 0 carries `CD`, its neighbours have feet
/// at `beta_b` and `-beta_e`, and `B`, `E` are the feet from `o`. `None`
/// unless the five points form a convex pentagon.
pub fn pentagon_from_sides(
    a1: f64,
    ab: f64,
    beta_b: f64,
    ae: f64,
    beta_e: f64,
) -> Option<[DiskPoint; 5]> {
    let s1 = Geodesic::perpendicular_to_ray(0.0, a1).ok()?;
    let sb = Geodesic::perpendicular_to_ray(beta_b, ab).ok()?;
    let se = Geodesic::perpendicular_to_ray(-beta_e, ae).ok()?;
    let c = klein_intersection(&s1, &sb)?;
    let d = klein_intersection(&s1, &se)?;
    let b = foot_of_perpendicular(&sb, DiskPoint::ORIGIN);
    let e = foot_of_perpendicular(&se, DiskPoint::ORIGIN);
    let pts = [DiskPoint::ORIGIN, b, c, d, e];
    // convex, clockwise A→B→C→D→E in the Klein chart
    let k: Vec<[f64; 2]> = pts.iter().map(|p| p.to_klein()).collect();
    for i in 0..5 {
        let (p, q, r) = (k[i], k[(i + 1) % 5], k[(i + 2) % 5]);
        let cross = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
        if !(cross < -1e-12) {
            return None;
        }
    }
    Some(pts)
}

/// Result of the pentagon surgery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PentagonSurgery {
    /// Midpoint of `CD`.
    pub midpoint: DiskPoint,
    /// Foot of the perpendicular from the midpoint to line `BC`.
    pub f: DiskPoint,
    /// Intersection of line `FP` with line `ED`.
    pub g: DiskPoint,
    /// The angle `D Ĝ F`.
    pub delta: f64,
}

/// Replaces side `CD` of a pentagon `ABCDE` (right angles at `B` and `E`,
/// `Ĉ ≤ π/2`, `Ĉ + D̂ ≤ π`) by the geodesic through the midpoint of `CD`
/// perpendicular to `BC`.
///
/// When `Ĉ = π/2` the new line is `CD` itself and `G = D`; the angle is then
/// taken between the two lines at `D`.
pub fn pentagon_surgery(pentagon: [DiskPoint; 5]) -> Result<PentagonSurgery> {
    let [a, b, c, d, e] = pentagon;
    let tol = 1e-9;
    if !klein_strictly_convex(&pentagon) {
        return Err(Error::PreconditionViolated("pentagon is not convex".into()));
    }
    let at_b = angle_at(b, a, c);
    let at_e = angle_at(e, d, a);
    if (at_b - FRAC_PI_2).abs() > tol || (at_e - FRAC_PI_2).abs() > tol {
        return Err(Error::PreconditionViolated(format!(
            "angles at B and E must be right, got {at_b} and {at_e}"
        )));
    }
    let at_c = angle_at(c, b, d);
    let at_d = angle_at(d, c, e);
    if at_c > FRAC_PI_2 + tol {
        return Err(Error::PreconditionViolated(format!(
            "angle at C must not exceed π/2, got {at_c}"
        )));
    }
    if at_c + at_d > PI + tol {
        return Err(Error::PreconditionViolated(format!(
            "angles at C and D must sum to at most π, got {}",
            at_c + at_d
        )));
    }
    let p = midpoint(c, d);
    let bc = Geodesic::through(b, c).map_err(|_| Error::NoIntersection("B = C".into()))?;
    let f = foot_of_perpendicular(&bc, p);
    let fp = Geodesic::through(f, p).map_err(|_| Error::NoIntersection("F = P".into()))?;
    let ed = Geodesic::through(e, d).map_err(|_| Error::NoIntersection("E = D".into()))?;
    let g = klein_intersection(&fp, &ed)
        .ok_or_else(|| Error::NoIntersection("lines FP and ED do not meet".into()))?;
    let delta = if dist(g, d) < 1e-9 { angle_at(g, e, f) } else { angle_at(g, d, f) };
    Ok(PentagonSurgery { midpoint: p, f, g, delta })
}

/// Replaces every side shared by a neutralizing pair, so that no vertex angle
/// is obtuse. The apothems of the result dominate the midpoint distances of
/// the input through `phi_sum`.
pub fn reduce_to_acute(polygon: &SymmetricPolygon) -> Result<SymmetricPolygon> {
    let report = neutralizing_pairs(polygon);
    if report.obtuse.is_empty() {
        return Ok(polygon.clone());
    }
    if !report.disjoint {
        return Err(Error::DualTrickRequired);
    }
    let m = polygon.m;
    let n = 2 * m;
    let mut sides = polygon.sides.clone();
    for &(obtuse, partner) in &report.pairs {
        // D is the obtuse vertex, C its partner, CD the side they share.
        let (shared, partner_other, obtuse_other) = if partner == (obtuse + 1) % m {
            (obtuse + 1, obtuse + 2, obtuse)
        } else {
            (obtuse, obtuse + n - 1, obtuse + 1)
        };
        let c = polygon.vertices[if partner == (obtuse + 1) % m { obtuse + 1 } else { (obtuse + n - 1) % n }];
        let d = polygon.vertices[obtuse];
        let b = foot_of_perpendicular(&polygon.sides[partner_other % n], DiskPoint::ORIGIN);
        let e = foot_of_perpendicular(&polygon.sides[obtuse_other % n], DiskPoint::ORIGIN);
        let cut = pentagon_surgery([DiskPoint::ORIGIN, b, c, d, e])?;
        let side = Geodesic::through(cut.f, cut.g)?;
        sides[shared % n] = side;
        sides[(shared + m) % n] = Geodesic::new(side.theta1() + PI, side.theta2() + PI)?;
    }
    from_sides(&sides[..m], None)
}

/// Rebuilds a polygon from its first `m` side geodesics.
fn from_sides(sides: &[Geodesic], k: Option<u32>) -> Result<SymmetricPolygon> {
    let m = sides.len();
    let (apothems, feet): (Vec<f64>, Vec<f64>) =
        sides.iter().map(|s| s.distance_from_origin()).unzip();
    let mut alpha: Vec<f64> = (0..m - 1).map(|j| wrap_tau(feet[j + 1] - feet[j])).collect();
    alpha.push(wrap_tau(feet[0] + PI - feet[m - 1]));
    let excess = alpha.iter().sum::<f64>() - PI;
    if excess.abs() > 1e-9 {
        return Err(Error::DegenerateVertex { index: 0 });
    }
    alpha[m - 1] -= excess;
    SymmetricPolygon::from_parts(&alpha, &apothems, k)
}

/// The m-gon obtained by cutting a symmetric 2m-gon with angle sum 4π into
/// the quadrilaterals `o q_j p_j q_{j+1}` and gluing all `p_j` together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPolygon {
    pub m: usize,
    /// `2ℓ_j`.
    pub side_lengths: Vec<f64>,
    /// Interior angles; vertex `w_j` sits between sides `j` and `j + 1`.
    pub angles: Vec<f64>,
    /// Vertices, traversed clockwise from the origin.
    pub vertices: Vec<DiskPoint>,
    /// The glued point.
    pub basepoint: DiskPoint,
    pub closure_residual: f64,
}

impl DualPolygon {
    /// Lays out sides and angles clockwise from the origin along the positive
    /// real axis. The basepoint defaults to the first vertex' neighbourhood
    /// centroid and can be replaced afterwards.
    pub fn from_sides_and_angles(side_lengths: &[f64], angles: &[f64]) -> Result<Self> {
        let m = side_lengths.len();
        if m < 3 || angles.len() != m {
            return Err(Error::InvalidArgument("need m ≥ 3 sides and m angles".into()));
        }
        if side_lengths.iter().any(|&s| !(s > 0.0)) || angles.iter().any(|&a| !(a > 0.0 && a < PI)) {
            return Err(Error::InvalidArgument(
                "sides must be positive and angles in (0, π)".into(),
            ));
        }
        let sum: f64 = angles.iter().sum();
        if (sum - PI).abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!("dual angles sum to {sum}, expected π")));
        }
        let (frames, closure) = layout_frames(side_lengths, angles);
        let vertices = frames.iter().map(|f| f.apply(DiskPoint::ORIGIN)).collect::<Vec<_>>();
        let basepoint = centroid_guess(&vertices);
        Ok(DualPolygon {
            m,
            side_lengths: side_lengths.to_vec(),
            angles: angles.to_vec(),
            vertices,
            basepoint,
            closure_residual: closure,
        })
    }

    /// `2·Σ_j 1/(1+e^{s_j})`, which equals `Σ(P)` of every primal polygon.
    pub fn sigma(&self) -> f64 {
        2.0 * self.side_lengths.iter().map(|&s| 1.0 / (1.0 + s.exp())).sum::<f64>()
    }

    /// Midpoint of side `j`, which runs from `w_{j-1}` to `w_j`.
    pub fn side_midpoint(&self, j: usize) -> DiskPoint {
        let m = self.m;
        midpoint(self.vertices[(j + m - 1) % m], self.vertices[j])
    }

    pub fn contains(&self, p: DiskPoint) -> bool {
        klein_convex_contains(&self.vertices, p)
    }
}

/// Frames at the end of each side (origin ↦ `w_j`, heading along side `j`)
/// and the closure residual.
fn layout_frames(side_lengths: &[f64], angles: &[f64]) -> (Vec<Isometry>, f64) {
    let mut frame = Isometry::IDENTITY;
    let mut frames = Vec::with_capacity(side_lengths.len());
    for (&s, &a) in side_lengths.iter().zip(angles) {
        frame = frame.compose(&Isometry::real_translation(s));
        frames.push(frame);
        frame = frame.compose(&Isometry::rotation(-(PI - a)));
    }
    let closure = frame.origin_displacement() + heading_error(&frame);
    (frames, closure)
}

/// Rotation angle left over in a frame that should be the identity.
fn heading_error(frame: &Isometry) -> f64 {
    let at = frame.apply(DiskPoint::ORIGIN);
    let back = Isometry::to_origin(at).compose(frame);
    // back fixes the origin: a rotation by 2·arg(a)
    wrap_pi(2.0 * back.a().arg()).abs()
}

fn centroid_guess(vertices: &[DiskPoint]) -> DiskPoint {
    let k: Vec<[f64; 2]> = vertices.iter().map(|v| v.to_klein()).collect();
    let n = k.len() as f64;
    let c = [
        k.iter().map(|p| p[0]).sum::<f64>() / n,
        k.iter().map(|p| p[1]).sum::<f64>() / n,
    ];
    DiskPoint::from_klein(c).unwrap_or(DiskPoint::ORIGIN)
}

/// Dual polygon of a symmetric polygon with total angle 4π.
pub fn dual(polygon: &SymmetricPolygon) -> Result<DualPolygon> {
    let total = 2.0 * polygon.angle_sum();
    if (total - 2.0 * TAU).abs() > 1e-8 {
        return Err(Error::PreconditionAngleSum { angle_sum: total });
    }
    let m = polygon.m;
    let sides: Vec<f64> = polygon.midpoint_distances.iter().map(|l| 2.0 * l).collect();
    let mut angles = polygon.midpoint_angles.clone();
    let excess = angles.iter().sum::<f64>() - PI;
    angles[m - 1] -= excess;
    let mut dual = DualPolygon::from_sides_and_angles(&sides, &angles)?;
    let (frames, _) = layout_frames(&sides, &angles);
    // Φ_j: o ↦ w_j with the ray towards q_j sent backwards along side j.
    let images: Vec<DiskPoint> = (0..m)
        .map(|j| {
            let phi = frames[j]
                .compose(&Isometry::rotation(PI))
                .compose(&Isometry::rotation(-polygon.midpoints[j].arg()));
            phi.apply(polygon.vertices[j])
        })
        .collect();
    let spread = images
        .iter()
        .map(|p| dist(*p, images[0]))
        .fold(0.0, f64::max);
    dual.basepoint = images[0];
    dual.closure_residual = dual.closure_residual.max(spread);
    Ok(dual)
}

/// Primal polygon of the dual with a new basepoint `v`.
pub fn reconstruct_with_basepoint(dual: &DualPolygon, v: DiskPoint) -> Result<SymmetricPolygon> {
    if !(dual.closure_residual < GLUE_TOL) {
        return Err(Error::ReconstructionFailed(format!(
            "dual does not close (residual {:e})",
            dual.closure_residual
        )));
    }
    if !dual.contains(v) {
        return Err(Error::ReconstructionFailed("basepoint lies outside the dual".into()));
    }
    let m = dual.m;
    let (frames, _) = layout_frames(&dual.side_lengths, &dual.angles);
    let mut direction = 0.0;
    let mut vertices = Vec::with_capacity(2 * m);
    let mut midpoints = Vec::with_capacity(m);
    for j in 0..m {
        let phi = frames[j]
            .compose(&Isometry::rotation(PI))
            .compose(&Isometry::rotation(-direction));
        let psi = phi.inverse();
        vertices.push(psi.apply(v));
        midpoints.push(psi.apply(dual.side_midpoint(j)));
        direction += dual.angles[j];
    }
    for j in 0..m {
        vertices.push(vertices[j].neg());
    }
    let n = 2 * m;
    for j in 0..m {
        let q = midpoint(vertices[(j + n - 1) % n], vertices[j]);
        let gap = dist(q, midpoints[j]);
        if !(gap < GLUE_TOL) {
            return Err(Error::ReconstructionFailed(format!(
                "quadrilateral {j} does not glue (gap {gap:e})"
            )));
        }
    }
    let polygon = SymmetricPolygon::from_vertices(&vertices, None)
        .map_err(|e| Error::ReconstructionFailed(e.to_string()))?;
    // from_vertices rotates the first foot onto the real axis; undo for the check
    let turn = Isometry::rotation(vertices_rotation(&vertices, &polygon));
    for (j, p) in vertices.iter().enumerate().take(m) {
        let gap = dist(turn.apply(*p), polygon.vertices[j]);
        if !(gap < GLUE_TOL) {
            return Err(Error::ReconstructionFailed(format!(
                "rebuilt vertex {j} is off by {gap:e}"
            )));
        }
    }
    let k = check_cycle(&polygon).ok();
    Ok(polygon.with_k(k))
}

fn vertices_rotation(vertices: &[DiskPoint], rebuilt: &SymmetricPolygon) -> f64 {
    let n = vertices.len();
    let side = Geodesic::through(vertices[n - 1], vertices[0]).expect("distinct vertices");
    let _ = rebuilt;
    -side.distance_from_origin().1
}

/// Moves the basepoint of the dual so that at most two of the angles at it
/// are obtuse and the obtuse angles of the primal polygon sit in disjoint
/// neutralizing pairs. The basepoint is searched on segments joining the
/// midpoints of two non-adjacent sides, starting from their midpoints.
pub fn redistribute_basepoint(dual: &DualPolygon) -> Result<SymmetricPolygon> {
    let m = dual.m;
    if !(dual.closure_residual < GLUE_TOL) {
        return Err(Error::ReconstructionFailed(format!(
            "dual does not close (residual {:e})",
            dual.closure_residual
        )));
    }
    let mut fractions = vec![0.5];
    for step in 1..10 {
        let d = 0.045 * step as f64;
        fractions.push(0.5 - d);
        fractions.push(0.5 + d);
    }
    let mut last = Error::ReconstructionFailed("no pair of non-adjacent sides".into());
    for &t in &fractions {
        for i in 0..m {
            for j in i + 2..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                let v = point_along(dual.side_midpoint(i), dual.side_midpoint(j), t);
                match reconstruct_with_basepoint(dual, v) {
                    Ok(p) => {
                        let report = neutralizing_pairs(&p);
                        if report.obtuse.len() <= 2 && report.disjoint {
                            return Ok(p);
                        }
                        last = Error::ReconstructionFailed(
                            "no basepoint with disjoint neutralizing pairs".into(),
                        );
                    }
                    Err(e) => last = e,
                }
            }
        }
    }
    Err(last)
}
