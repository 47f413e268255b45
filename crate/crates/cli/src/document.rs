//! JSON documents read and written by the command-line tool.

use serde::{Deserialize, Serialize};

use hypwalk_core::coxeter::CoxeterPolygon;
use hypwalk_core::freewalk::WitnessReport;
use hypwalk_core::fuchswalk::DriftEstimate;
use hypwalk_core::hyperbolic::DiskPoint;
use hypwalk_core::inequality::CriterionReport;
use hypwalk_core::polygon::SymmetricPolygon;
use hypwalk_core::{Error, Result};

/// Largest disagreement tolerated between stored and recomputed fields.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Serialized polygon. Only `alpha`, `apothems` and `k` are read back; the
/// remaining fields are recomputed and compared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonDocument {
    pub m: usize,
    pub k: Option<u32>,
    pub alpha: Vec<f64>,
    pub apothems: Vec<f64>,
    pub gamma: Vec<f64>,
    pub vertices: Vec<[f64; 2]>,
    pub midpoints: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_values: Option<Vec<u32>>,
}

fn xy(points: &[DiskPoint]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.re, p.im]).collect()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_point_gap(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(p, q)| (p[0] - q[0]).abs().max((p[1] - q[1]).abs()))
        .fold(0.0, f64::max)
}

impl PolygonDocument {
    pub fn from_polygon(polygon: &SymmetricPolygon) -> Self {
        PolygonDocument {
            m: polygon.m(),
            k: polygon.k(),
            alpha: polygon.central_angles().to_vec(),
            apothems: polygon.apothems().to_vec(),
            gamma: polygon.vertex_angles().to_vec(),
            vertices: xy(polygon.vertices()),
            midpoints: xy(polygon.midpoints()),
            k_values: None,
        }
    }

    pub fn from_coxeter(polygon: &CoxeterPolygon) -> Self {
        PolygonDocument {
            k_values: Some(polygon.k_values()[..polygon.m()].to_vec()),
            ..Self::from_polygon(polygon.polygon())
        }
    }

    /// Rebuilds the polygon and returns it with the largest deviation of
    /// any stored derived field from its recomputed value.
    pub fn rebuild(&self) -> Result<(SymmetricPolygon, f64)> {
        if self.alpha.len() != self.m || self.apothems.len() != self.m {
            return Err(Error::InvalidArgument(format!(
                "document declares m = {} but lists {} angles and {} apothems",
                self.m,
                self.alpha.len(),
                self.apothems.len()
            )));
        }
        let polygon = SymmetricPolygon::from_parts(&self.alpha, &self.apothems, self.k)?;
        let fresh = Self::from_polygon(&polygon);
        let deviation = max_gap(&self.gamma, &fresh.gamma)
            .max(max_point_gap(&self.vertices, &fresh.vertices))
            .max(max_point_gap(&self.midpoints, &fresh.midpoints));
        Ok((polygon, deviation))
    }

    /// As [`rebuild`](Self::rebuild), rejecting documents whose derived
    /// fields disagree with the recomputation.
    pub fn to_polygon(&self) -> Result<SymmetricPolygon> {
        let (polygon, deviation) = self.rebuild()?;
        if !(deviation <= CONSISTENCY_TOL) {
            return Err(Error::InvalidArgument(format!(
                "stored vertex data deviates from the recomputed polygon by {deviation:e}"
            )));
        }
        Ok(polygon)
    }

    pub fn to_coxeter(&self) -> Result<CoxeterPolygon> {
        let polygon = CoxeterPolygon::new(self.to_polygon()?)?;
        if let Some(k) = &self.k_values {
            if k.as_slice() != &polygon.k_values()[..polygon.m()] {
                return Err(Error::InvalidArgument(format!(
                    "k_values {k:?} do not match the vertex angles {:?}",
                    &polygon.k_values()[..polygon.m()]
                )));
            }
        }
        Ok(polygon)
    }
}

/// Criterion report with optional walk diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    #[serde(flatten)]
    pub criterion: CriterionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_bounds: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension_bound: Option<f64>,
}

impl Report {
    pub fn new(criterion: CriterionReport) -> Self {
        Report { criterion, witness: None, drift: None, entropy_bounds: None, dimension_bound: None }
    }
}
