//! Model descriptors and exporters.
//!
//! A model descriptor is a small JSON object naming the surface model and the quadratic
//! differential, e.g.
//! `{"model": "revolution", "profile": "sech", "epsilon": 0.1, "Q": {"c2": [1,0], "c1": [0,0]}, "r0": 1.0}`.
//! Complex coefficients are `[re, im]` pairs. Exporters write OBJ meshes over (r, φ) grids,
//! CSV tables with a header row and JSON reports with fields in declaration order.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{affine_point, LightVec, MinkSpace};
use crate::profile::SechProfile;
use crate::surface::{EuclideanGraph, QuadDiff, Revolution, SurfaceModel, UmbilicSphere};
use crate::transforms::GridSpec;

/// Coefficients of Q = (c₂/z² + c₁/z + Σ hol_k z^k) dz² as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QConfig {
    #[serde(default)]
    pub c2: [f64; 2],
    #[serde(default)]
    pub c1: [f64; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hol: Vec<[f64; 2]>,
}

impl QConfig {
    pub fn quad_diff(&self) -> QuadDiff {
        let c = |a: [f64; 2]| Complex64::new(a[0], a[1]);
        QuadDiff::new(c(self.c2), c(self.c1), self.hol.iter().map(|&a| c(a)).collect())
    }
}

/// Surface model descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// `revolution`, `sphere` or `graph`.
    pub model: String,
    /// Revolution profile; only `sech` is available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    /// Perturbation of the sech profile (0 gives the round sphere).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Closed-form map of a graph model: `plane` or `saddle`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(rename = "Q")]
    pub q: QConfig,
    pub r0: f64,
    /// Dimension of the ambient Euclidean space.
    #[serde(default = "default_dim")]
    pub n: usize,
}

fn default_dim() -> usize {
    3
}

/// Names accepted by [`ModelConfig::preset`].
pub const PRESETS: [&str; 6] = ["revolution-sech", "revolution-sphere", "revolution-rotated", "sphere-first-order", "sphere-zero", "plane-first-order"];

impl ModelConfig {
    /// Built-in descriptors.
    pub fn preset(name: &str) -> Result<Self> {
        let q2 = |re: f64, im: f64| QConfig { c2: [re, im], c1: [0.0, 0.0], hol: vec![] };
        let q1 = QConfig { c2: [0.0, 0.0], c1: [1.0, 0.0], hol: vec![] };
        let rev = |eps: f64, q: QConfig| ModelConfig { model: "revolution".into(), profile: Some("sech".into()), epsilon: Some(eps), map: None, q, r0: 1.0, n: 3 };
        let plain = |model: &str, map: Option<&str>, q: QConfig| ModelConfig { model: model.into(), profile: None, epsilon: None, map: map.map(String::from), q, r0: 1.0, n: 3 };
        Ok(match name {
            "revolution-sech" => rev(0.1, q2(1.0, 0.0)),
            "revolution-sphere" => rev(0.0, q2(1.0, 0.0)),
            "revolution-rotated" => rev(0.1, q2(0.0, 1.0)),
            "sphere-first-order" => plain("sphere", None, q1),
            "sphere-zero" => plain("sphere", None, QConfig { c2: [0.0, 0.0], c1: [0.0, 0.0], hol: vec![[0.0, 0.0], [1.0, 0.0]] }),
            "plane-first-order" => plain("graph", Some("plane"), q1),
            _ => return Err(Error::Invalid(format!("unknown model preset {name:?}; known presets: {}", PRESETS.join(", ")))),
        })
    }

    /// A preset name, a path to a JSON file, or an inline JSON object.
    pub fn resolve(spec: &str) -> Result<Self> {
        let text = spec.trim();
        if text.starts_with('{') {
            return Self::from_json(text);
        }
        if PRESETS.contains(&text) {
            return Self::preset(text);
        }
        if Path::new(text).is_file() {
            return Self::from_json(&std::fs::read_to_string(text)?);
        }
        Self::preset(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed model descriptor: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err(Error::Invalid("model descriptor: r0 must be positive".into()));
        }
        if self.n < 3 {
            return Err(Error::Invalid("model descriptor: n must be at least 3".into()));
        }
        let coeffs = self.q.c2.iter().chain(self.q.c1.iter()).chain(self.q.hol.iter().flatten());
        if coeffs.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("model descriptor: Q has non-finite coefficients".into()));
        }
        match self.model.as_str() {
            "revolution" => {
                if self.profile.as_deref().unwrap_or("sech") != "sech" {
                    return Err(Error::Invalid(format!("model descriptor: unknown profile {:?}", self.profile)));
                }
                let eps = self.epsilon.unwrap_or(0.0);
                if !(eps.is_finite() && eps.abs() < 0.5) {
                    return Err(Error::Invalid("model descriptor: |epsilon| must be below 0.5".into()));
                }
            }
            "sphere" => {}
            "graph" => {
                if !matches!(self.map.as_deref(), Some("plane") | Some("saddle")) {
                    return Err(Error::Invalid("model descriptor: graph models need map = plane or saddle".into()));
                }
            }
            other => return Err(Error::Invalid(format!("model descriptor: unknown model {other:?}"))),
        }
        Ok(())
    }

    pub fn quad_diff(&self) -> QuadDiff {
        self.q.quad_diff()
    }

    pub fn build(&self) -> Result<Arc<dyn SurfaceModel>> {
        self.validate()?;
        Ok(match self.model.as_str() {
            "revolution" => Arc::new(Revolution::new(self.n, self.r0, Arc::new(SechProfile::new(self.epsilon.unwrap_or(0.0))))?),
            "sphere" => Arc::new(UmbilicSphere::new(self.n, self.r0)?),
            _ => {
                let saddle = self.map.as_deref() == Some("saddle");
                let map: Arc<dyn Fn(f64, f64) -> [f64; 3] + Send + Sync> =
                    if saddle { Arc::new(|u, v| [u, v, 0.5 * (u * u - v * v)]) } else { Arc::new(|u, v| [u, v, 0.0]) };
                Arc::new(EuclideanGraph { space: MinkSpace::new(self.n)?, r0: self.r0, label: format!("graph-{}", self.map.as_deref().unwrap_or("plane")), map })
            }
        })
    }
}

/// Quad mesh over an (r, φ) grid, vertices in the affine chart (first three coordinates).
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub nr: usize,
    pub nphi: usize,
    pub vertices: Vec<[f64; 3]>,
}

impl Mesh {
    /// Mesh from grid samples in row order (radius major).
    pub fn from_points(grid: &GridSpec, points: &[LightVec]) -> Result<Self> {
        if points.len() != grid.len() {
            return Err(Error::Invalid(format!("mesh: {} points for a grid of {}", points.len(), grid.len())));
        }
        let vertices = points
            .iter()
            .map(|y| {
                let x = affine_point(y)?;
                Ok([x[0], x[1], x[2]])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Mesh { nr: grid.radii.len(), nphi: grid.angles.len(), vertices })
    }

    pub fn empty() -> Self {
        Mesh { nr: 0, nphi: 0, vertices: vec![] }
    }

    /// Quads (1-based vertex indices) between neighbouring radii and angles.
    pub fn faces(&self) -> Vec<[usize; 4]> {
        let mut out = Vec::new();
        for i in 0..self.nr.saturating_sub(1) {
            for j in 0..self.nphi.saturating_sub(1) {
                let a = i * self.nphi + j + 1;
                out.push([a, a + 1, a + self.nphi + 1, a + self.nphi]);
            }
        }
        out
    }
}

/// Writes a mesh as OBJ: one `v` line per vertex, one `f` line per quad.
pub fn export_obj<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    writeln!(w, "# {} x {} grid", mesh.nr, mesh.nphi)?;
    for v in &mesh.vertices {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("export_obj: non-finite vertex".into()));
        }
        writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
    }
    for f in mesh.faces() {
        writeln!(w, "f {} {} {} {}", f[0], f[1], f[2], f[3])?;
    }
    Ok(())
}

/// A numeric table with named columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::Invalid(format!("table: row of {} values for {} columns", row.len(), self.header.len())));
        }
        self.rows.push(row);
        Ok(())
    }
}

/// Writes a table as CSV with a header row; values use the shortest round-trip format.
pub fn export_csv<W: Write>(table: &Table, mut w: W) -> Result<()> {
    writeln!(w, "{}", table.header.join(","))?;
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Writes a report as pretty JSON followed by a newline.
pub fn export_json<T: Serialize, W: Write>(report: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip_through_json() {
        for name in PRESETS {
            let cfg = ModelConfig::preset(name).unwrap();
            let text = serde_json::to_string(&cfg).unwrap();
            assert_eq!(ModelConfig::from_json(&text).unwrap(), cfg);
            cfg.build().unwrap();
        }
    }

    #[test]
    fn descriptor_in_the_documented_layout_parses() {
        let cfg = ModelConfig::from_json(r#"{"model":"revolution","profile":"sech","epsilon":0.1,"Q":{"c2":[1,0],"c1":[0,0]},"r0":1.0}"#).unwrap();
        assert_eq!(cfg, ModelConfig::preset("revolution-sech").unwrap());
        assert!(ModelConfig::from_json(r#"{"model":"torus","Q":{},"r0":1}"#).is_err());
        assert!(ModelConfig::from_json(r#"{"model":"sphere","Q":{},"r0":1,"extra":2}"#).is_err());
    }

    #[test]
    fn mesh_faces_cover_the_grid() {
        let m = Mesh { nr: 3, nphi: 4, vertices: vec![[0.0; 3]; 12] };
        let f = m.faces();
        assert_eq!(f.len(), 6);
        assert_eq!(f[0], [1, 2, 6, 5]);
        assert!(f.iter().flatten().all(|&k| k >= 1 && k <= 12));
    }
}
