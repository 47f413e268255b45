//! WebAssembly bindings for the browser demo. Every entry point returns a
//! JSON string; failures come back as `{"error": {"kind", "message"}}`.

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use hypwalk_core::freewalk::{MeasureKind, StepDistribution};
use hypwalk_core::fuchswalk::{boundary_histogram, estimate_drift, simulate};
use hypwalk_core::hyperbolic::{point_along, DiskPoint, Isometry};
use hypwalk_core::inequality::{cyclic_arccos_sum, polygon_criterion, Verdict};
use hypwalk_core::polygon::{build, side_pairings, PolygonSpec, SymmetricPolygon};
use hypwalk_core::sampling::simplex_grid;
use hypwalk_core::Error;

/// Points per side when a geodesic segment is drawn as a polyline.
const SEGMENT_SAMPLES: usize = 24;
const MAX_PATHS: usize = 50_000;
const MAX_STEPS: usize = 2_000;
const MAX_RESOLUTION: usize = 400;
const SHOWN_ENDPOINTS: usize = 2_000;

type Xy = [f64; 2];

fn xy(p: DiskPoint) -> Xy {
    [p.re, p.im]
}

fn to_json<T: Serialize>(result: Result<T, Error>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v).expect("views serialize"),
        Err(e) => serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } }).to_string(),
    }
}

fn parse_weights(m: usize, weights: &str) -> Result<Vec<f64>, Error> {
    if weights.trim().is_empty() {
        return Ok(vec![1.0; m]);
    }
    let w = weights
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Error::InvalidArgument(format!("weights: {e}")))?;
    if w.len() != m {
        return Err(Error::InvalidArgument(format!("need {m} weights, got {}", w.len())));
    }
    Ok(w)
}

fn polygon(m: usize, k: u32, weights: &str) -> Result<SymmetricPolygon, Error> {
    let spec = PolygonSpec {
        apothem_weights: parse_weights(m, weights)?,
        ..PolygonSpec::uniform(m, Some(k))
    };
    build(&spec)
}

/// Boundary of the polygon as a closed polyline, each side sampled along
/// its geodesic.
fn outline(vertices: &[DiskPoint], map: &Isometry) -> Vec<Xy> {
    let n = vertices.len();
    let mut out = Vec::with_capacity(n * SEGMENT_SAMPLES + 1);
    for j in 0..n {
        let (p, q) = (vertices[j], vertices[(j + 1) % n]);
        for s in 0..SEGMENT_SAMPLES {
            out.push(xy(map.apply(point_along(p, q, s as f64 / SEGMENT_SAMPLES as f64))));
        }
    }
    out.push(out[0]);
    out
}

#[derive(Serialize)]
struct PolygonView {
    m: usize,
    k: Option<u32>,
    apothems: Vec<f64>,
    gamma: Vec<f64>,
    vertices: Vec<Xy>,
    outline: Vec<Xy>,
    /// Images of the polygon under the side pairings and their inverses.
    neighbours: Vec<Vec<Xy>>,
    lengths: Vec<f64>,
    sigma: f64,
    singular: bool,
}

fn polygon_view_inner(m: usize, k: u32, weights: &str) -> Result<PolygonView, Error> {
    let p = polygon(m, k, weights)?;
    let report = polygon_criterion(&p);
    let neighbours = side_pairings(&p).iter().map(|g| outline(p.vertices(), g)).collect();
    Ok(PolygonView {
        m: p.m(),
        k: p.k(),
        apothems: p.apothems().to_vec(),
        gamma: p.vertex_angles().to_vec(),
        vertices: p.vertices().iter().map(|&v| xy(v)).collect(),
        outline: outline(p.vertices(), &Isometry::IDENTITY),
        neighbours,
        sigma: report.sigma,
        singular: report.verdict == Verdict::Singular,
        lengths: report.lengths,
    })
}

/// Builds the polygon with uniform central angles, the given apothem
/// weights (comma separated, empty for uniform) and cycle integer `k`, and
/// evaluates the singularity criterion.
#[wasm_bindgen]
pub fn polygon_view(m: usize, k: u32, weights: &str) -> String {
    to_json(polygon_view_inner(m, k, weights))
}

#[derive(Serialize)]
struct WalkView {
    steps: usize,
    paths: usize,
    bin_starts: Vec<f64>,
    frequencies: Vec<f64>,
    /// Boundary angles of the first walks, for plotting on the circle.
    endpoints: Vec<f64>,
    drift: f64,
    drift_ci: [f64; 2],
    settled_fraction: f64,
}

fn walk_view_inner(
    m: usize,
    k: u32,
    weights: &str,
    steps: usize,
    paths: usize,
    bins: usize,
    seed: u32,
) -> Result<WalkView, Error> {
    if steps > MAX_STEPS || paths > MAX_PATHS {
        return Err(Error::InvalidArgument(format!(
            "the demo caps walks at {MAX_STEPS} steps and {MAX_PATHS} paths"
        )));
    }
    let p = polygon(m, k, weights)?;
    let mu = StepDistribution::uniform(MeasureKind::Free, m)?;
    let sample = simulate(&side_pairings(&p), &mu, steps, paths, seed as u64)?;
    let drift = estimate_drift(&sample)?;
    let h = boundary_histogram(&sample, bins)?;
    Ok(WalkView {
        steps,
        paths,
        bin_starts: (0..bins).map(|b| h.bin_start(b)).collect(),
        frequencies: h.frequencies,
        endpoints: sample.paths.iter().take(SHOWN_ENDPOINTS).map(|w| w.boundary_angle).collect(),
        drift: drift.drift,
        drift_ci: [drift.ci_low, drift.ci_high],
        settled_fraction: h.settled_fraction,
    })
}

/// Simple random walk on the side pairings: histogram of where the walks
/// head on the boundary circle, and the drift.
#[wasm_bindgen]
pub fn walk_view(m: usize, k: u32, weights: &str, steps: usize, paths: usize, bins: usize, seed: u32) -> String {
    to_json(walk_view_inner(m, k, weights, steps, paths, bins, seed))
}

#[derive(Serialize)]
struct Landscape {
    resolution: usize,
    /// `(x_1, x_2, x_3, Σ arccos(x_i x_{i+1}) − π)`.
    points: Vec<[f64; 4]>,
    minimum: f64,
    argmin: [f64; 3],
}

fn landscape_inner(resolution: usize) -> Result<Landscape, Error> {
    if !(1..=MAX_RESOLUTION).contains(&resolution) {
        return Err(Error::InvalidArgument(format!("resolution must lie in 1..={MAX_RESOLUTION}")));
    }
    let mut points = Vec::new();
    let (mut minimum, mut argmin) = (f64::INFINITY, [0.0; 3]);
    for y in simplex_grid(3, resolution) {
        let x = [1.0 - y[0], 1.0 - y[1], 1.0 - y[2]];
        let gap = cyclic_arccos_sum(&x) - std::f64::consts::PI;
        if gap < minimum {
            minimum = gap;
            argmin = x;
        }
        points.push([x[0], x[1], x[2], gap]);
    }
    Ok(Landscape { resolution, points, minimum, argmin })
}

/// `Σ arccos(x_i x_{i+1}) − π` on a grid of `{0 ≤ x_i ≤ 1, x_1 + x_2 + x_3 = 2}`.
#[wasm_bindgen]
pub fn arccos_landscape(resolution: usize) -> String {
    to_json(landscape_inner(resolution))
}
