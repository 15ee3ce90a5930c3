//! Calapso and Darboux transforms of a polarized surface, computed through a transport
//! Γ_p^q(λΩ) = g(p)·Γ_p^q(ψ̂)·g(q)⁻¹ with ψ̂ = g⋉λΩ, plus limit studies at the puncture.
//!
//! A [`Transport`] supplies the reduced form ψ̂, the gauge g and the reduced lift g⁻¹f. The
//! direct transport uses g = id; the second-order transport uses the frame of
//! [`second_order::GaugeData`], which keeps ψ̂ bounded at s.

pub mod first_order;
pub mod pushforward;
pub mod second_order;
pub mod zero_case;

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::connection::{primitive, FormField, IntegrationOptions, PathSpec, PolarPoint, Scaled};
use crate::error::{Error, Result};
use crate::minkowski::{self, adjoint, pdist, LightVec, LorentzMap};
use crate::surface::{self, OmegaField, QuadDiff, SurfaceModel};

/// Transport data for the pencil d + λΩ.
pub trait Transport: Send + Sync {
    fn dim(&self) -> usize;
    fn lambda(&self) -> f64;
    /// The reduced form ψ̂ = g⋉λΩ.
    fn reduced(&self) -> &dyn FormField;
    /// Gauge g(q).
    fn frame(&self, q: PolarPoint) -> Result<LorentzMap>;
    /// g(q)⁻¹f(q) up to scale.
    fn reduced_lift(&self, q: PolarPoint) -> Result<LightVec>;
    /// The lift f(q) of the base surface.
    fn surface_point(&self, q: PolarPoint) -> Result<LightVec>;

    /// Γ_p^q(λΩ) along a path.
    fn transport(&self, path: &PathSpec, opts: &IntegrationOptions) -> Result<LorentzMap> {
        let gh = primitive(self.reduced(), path, opts)?.value;
        let gp = self.frame(path.start())?;
        let gq = self.frame(path.end())?;
        Ok(gp * gh * adjoint(&gq))
    }

    /// Calapso point g(p)·Γ̂_p^q·g(q)⁻¹f(q) from a reduced primitive Γ̂_p^q.
    fn calapso_point(&self, p: PolarPoint, q: PolarPoint, reduced_pq: &LorentzMap) -> Result<LightVec> {
        Ok(self.frame(p)? * (reduced_pq * self.reduced_lift(q)?))
    }

    /// Darboux point g(q)·Γ̂_q^p·u with u = g(p)⁻¹·init.
    fn darboux_point(&self, q: PolarPoint, reduced_pq: &LorentzMap, u: &LightVec) -> Result<LightVec> {
        Ok(self.frame(q)? * (adjoint(reduced_pq) * u))
    }
}

/// Transport by direct integration of λΩ, g = id.
#[derive(Clone)]
pub struct DirectTransport {
    pub model: Arc<dyn SurfaceModel>,
    pub q: QuadDiff,
    pub lambda: f64,
    form: Scaled,
}

impl DirectTransport {
    pub fn new(model: Arc<dyn SurfaceModel>, q: QuadDiff, lambda: f64) -> Self {
        let form = Scaled::new(lambda, Arc::new(OmegaField::new(model.clone(), q.clone())));
        DirectTransport { model, q, lambda, form }
    }
}

impl Transport for DirectTransport {
    fn dim(&self) -> usize {
        self.model.space().dim()
    }
    fn lambda(&self) -> f64 {
        self.lambda
    }
    fn reduced(&self) -> &dyn FormField {
        &self.form
    }
    fn frame(&self, _: PolarPoint) -> Result<LorentzMap> {
        Ok(DMatrix::identity(self.dim(), self.dim()))
    }
    fn reduced_lift(&self, q: PolarPoint) -> Result<LightVec> {
        self.surface_point(q)
    }
    fn surface_point(&self, q: PolarPoint) -> Result<LightVec> {
        Ok(surface::jet_log(self.model.as_ref(), q)?.f)
    }
    fn transport(&self, path: &PathSpec, opts: &IntegrationOptions) -> Result<LorentzMap> {
        Ok(primitive(&self.form, path, opts)?.value)
    }
}

/// Sample grid in polar coordinates on the cover.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
}

impl GridSpec {
    /// `nr` radii log-spaced in [r_min, r_max] and `nphi` angles spaced over [0, phi_max].
    pub fn log_polar(r_min: f64, r_max: f64, nr: usize, nphi: usize, phi_max: f64) -> Result<Self> {
        if !(r_min > 0.0 && r_max >= r_min) || nr == 0 || nphi == 0 {
            return Err(Error::Invalid("grid: need 0 < r_min ≤ r_max and nonempty sizes".into()));
        }
        let radii = (0..nr)
            .map(|i| if nr == 1 { r_max } else { r_max * (r_min / r_max).powf(i as f64 / (nr - 1) as f64) })
            .collect();
        let closed = (phi_max - std::f64::consts::TAU).abs() < 1e-12;
        let denom = if closed || nphi == 1 { nphi } else { nphi - 1 };
        let angles = (0..nphi).map(|j| phi_max * j as f64 / denom.max(1) as f64).collect();
        Ok(GridSpec { radii, angles })
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<PolarPoint> {
        self.radii.iter().flat_map(|&r| self.angles.iter().map(move |&a| PolarPoint::new(r, a))).collect()
    }
}

/// Reduced primitives Γ̂_p^q over a grid, cached along a spanning tree: one radial spine at
/// φ(p) and one angular arc per radius.
#[derive(Clone, Debug)]
pub struct GridPrimitives {
    pub base: PolarPoint,
    pub grid: GridSpec,
    /// Row-major over (radius, angle).
    pub values: Vec<LorentzMap>,
}

impl GridPrimitives {
    pub fn build(form: &dyn FormField, p: PolarPoint, grid: &GridSpec, opts: &IntegrationOptions) -> Result<Self> {
        let dim = form.dim();
        // Spine in order of the grid radii; each spine node is reached from the previous one.
        let mut spine = Vec::with_capacity(grid.radii.len());
        let mut g = DMatrix::identity(dim, dim);
        let mut prev = p;
        for &r in &grid.radii {
            let node = p.at_radius(r);
            let seg = primitive(form, &PathSpec::segment(prev, node)?, opts)?;
            g = minkowski::reorthonormalize(&(g * seg.value))?;
            spine.push(g.clone());
            prev = node;
        }
        let rows: Vec<Result<Vec<LorentzMap>>> = grid
            .radii
            .par_iter()
            .zip(spine.par_iter())
            .map(|(&r, gs)| {
                let node = p.at_radius(r);
                let mut order: Vec<usize> = (0..grid.angles.len()).collect();
                order.sort_by(|&a, &b| grid.angles[a].partial_cmp(&grid.angles[b]).unwrap());
                let mut out = vec![DMatrix::zeros(dim, dim); grid.angles.len()];
                // Arcs run outward from φ(p) on each side.
                let split = order.partition_point(|&j| grid.angles[j] < p.phi);
                let mut walk = |idx: &mut dyn Iterator<Item = usize>| -> Result<()> {
                    let mut acc = gs.clone();
                    let mut at = node;
                    for j in idx {
                        let q = PolarPoint::new(r, grid.angles[j]);
                        let seg = primitive(form, &PathSpec::segment(at, q)?, opts)?;
                        acc = minkowski::reorthonormalize(&(acc * seg.value))?;
                        out[j] = acc.clone();
                        at = q;
                    }
                    Ok(())
                };
                walk(&mut order[split..].iter().copied())?;
                walk(&mut order[..split].iter().rev().copied())?;
                Ok(out)
            })
            .collect();
        let mut values = Vec::with_capacity(grid.len());
        for row in rows {
            values.extend(row?);
        }
        Ok(GridPrimitives { base: p, grid: grid.clone(), values })
    }

    pub fn get(&self, i: usize, j: usize) -> &LorentzMap {
        &self.values[i * self.grid.angles.len() + j]
    }
}

/// A transform sample.
#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub at: PolarPoint,
    #[serde(with = "crate::serial::repr")]
    pub point: LightVec,
}

#[derive(Clone, Debug, Serialize)]
pub struct CalapsoResult {
    pub lambda: f64,
    pub base: PolarPoint,
    pub grid: GridSpec,
    pub samples: Vec<Sample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DarbouxResult {
    pub lambda: f64,
    pub base: PolarPoint,
    #[serde(with = "crate::serial::repr")]
    pub init: LightVec,
    pub grid: GridSpec,
    pub samples: Vec<Sample>,
    /// Minimum sampled projective distance of the initial point to the Calapso image.
    pub admissibility_margin: f64,
}

/// ⟨f_{λ,p}⟩ = Γ_p(λω)⟨f⟩ on a grid.
pub fn calapso(t: &dyn Transport, p: PolarPoint, grid: &GridSpec, opts: &IntegrationOptions) -> Result<CalapsoResult> {
    let prims = GridPrimitives::build(t.reduced(), p, grid, opts)?;
    calapso_from(t, &prims)
}

pub fn calapso_from(t: &dyn Transport, prims: &GridPrimitives) -> Result<CalapsoResult> {
    let p = prims.base;
    let pts = prims.grid.points();
    let samples = pts
        .par_iter()
        .enumerate()
        .map(|(k, &q)| Ok(Sample { at: q, point: t.calapso_point(p, q, &prims.values[k])? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(CalapsoResult { lambda: t.lambda(), base: p, grid: prims.grid.clone(), samples })
}

/// Darboux admissibility threshold for the sampled distance to the Calapso image.
pub const ADMISSIBILITY_TOL: f64 = 1e-6;

/// ⟨f̂⟩ = Γ^p(λω)⟨f̂_p⟩ on a grid.
pub fn darboux(t: &dyn Transport, p: PolarPoint, init: &LightVec, grid: &GridSpec, opts: &IntegrationOptions) -> Result<DarbouxResult> {
    if t.lambda() == 0.0 {
        return Err(Error::Invalid("darboux: λ must be nonzero".into()));
    }
    if minkowski::norm2(init).abs() > 1e-8 * init.norm_squared() {
        return Err(Error::Invalid("darboux: initial point is not null".into()));
    }
    let prims = GridPrimitives::build(t.reduced(), p, grid, opts)?;
    let cal = calapso_from(t, &prims)?;
    let margin = cal.samples.iter().map(|s| pdist(&s.point, init)).fold(f64::INFINITY, f64::min);
    if margin < ADMISSIBILITY_TOL {
        return Err(Error::Validation(format!("darboux: initial point lies on the Calapso image (distance {margin:e})")));
    }
    let u = adjoint(&t.frame(p)?) * init;
    let pts = prims.grid.points();
    let samples = pts
        .par_iter()
        .enumerate()
        .map(|(k, &q)| Ok(Sample { at: q, point: t.darboux_point(q, &prims.values[k], &u)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(DarbouxResult { lambda: t.lambda(), base: p, init: init.clone(), grid: prims.grid.clone(), samples, admissibility_margin: margin })
}

/// Reduced primitives Γ̂_p^{q_k} and radii along a radial schedule r_k = r(p)·2^{−k}.
pub fn radial_reduced(t: &dyn Transport, p: PolarPoint, k_max: usize, opts: &IntegrationOptions) -> Result<(Vec<f64>, Vec<LorentzMap>)> {
    let sched = crate::polecore::Schedule { k_max, tol: opts.tol };
    let seq = crate::polecore::radial_primitives(t.reduced(), p, &sched, opts)?;
    let mut radii = vec![p.r];
    radii.extend(sched.radii(p.r));
    Ok((radii, seq))
}

/// Calapso points along the radial schedule from p.
pub fn calapso_radial(t: &dyn Transport, p: PolarPoint, k_max: usize, opts: &IntegrationOptions) -> Result<(Vec<f64>, Vec<LightVec>)> {
    let (radii, seq) = radial_reduced(t, p, k_max, opts)?;
    let pts = radii.iter().zip(seq.iter()).map(|(&r, g)| t.calapso_point(p, p.at_radius(r), g)).collect::<Result<Vec<_>>>()?;
    Ok((radii, pts))
}

/// Darboux points along the radial schedule from p.
pub fn darboux_radial(t: &dyn Transport, p: PolarPoint, init: &LightVec, k_max: usize, opts: &IntegrationOptions) -> Result<(Vec<f64>, Vec<LightVec>)> {
    let (radii, seq) = radial_reduced(t, p, k_max, opts)?;
    let u = adjoint(&t.frame(p)?) * init;
    let pts = radii.iter().zip(seq.iter()).map(|(&r, g)| t.darboux_point(p.at_radius(r), g, &u)).collect::<Result<Vec<_>>>()?;
    Ok((radii, pts))
}

/// Unit representative with a sign fixed by the largest entry.
pub fn unit(v: &LightVec) -> LightVec {
    let n = v.norm();
    let (imax, _) = v.iter().enumerate().fold((0, -1.0), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
    let s = if v[imax] < 0.0 { -1.0 } else { 1.0 };
    v * (s / n)
}

/// Euclidean distance of the unit representative of x to the column span of `basis`.
pub fn subspace_distance(basis: &DMatrix<f64>, x: &LightVec) -> f64 {
    let q = basis.clone().qr().q();
    let u = x / x.norm();
    let proj = &q * (q.transpose() * &u);
    (u - proj).norm()
}

/// Endpoint behaviour of a sequence at the puncture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Endpoint {
    ConvergedToPoint,
    ConvergedToSphere,
    Oscillating,
    Inconclusive,
}

/// Limit study of a projective point sequence.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub radii: Vec<f64>,
    /// proj_dist between consecutive terms.
    pub increments: Vec<f64>,
    /// Distance to the reference subspace, when given.
    pub sphere_distance: Vec<f64>,
    /// Largest pairwise proj_dist among the last `window` terms.
    pub oscillation: f64,
    #[serde(with = "crate::serial::repr")]
    pub limit: Option<LightVec>,
    pub error: f64,
    /// Fitted exponent a in increment ≈ C·r^a over the tail.
    pub decay_rate: f64,
    pub endpoint: Endpoint,
}

/// Least-squares slope of ln y against ln x over positive finite data.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0 && b.is_finite()).map(|(a, b)| (a.ln(), b.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Classifies the endpoint behaviour of `points` sampled at `radii`. `sphere` is an optional
/// basis of the subspace whose null lines form the candidate limit sphere.
pub fn limit_study(radii: &[f64], points: &[LightVec], sphere: Option<&DMatrix<f64>>, tol: f64) -> Result<ConvergenceReport> {
    if points.len() < 4 || radii.len() != points.len() {
        return Err(Error::Invalid("limit_study: need at least 4 samples with radii".into()));
    }
    let increments: Vec<f64> = points.windows(2).map(|w| pdist(&w[0], &w[1])).collect();
    let sphere_distance: Vec<f64> = sphere.map(|b| points.iter().map(|x| subspace_distance(b, x)).collect()).unwrap_or_default();
    let window = 8.min(points.len());
    let tail = &points[points.len() - window..];
    let mut oscillation: f64 = 0.0;
    for a in tail {
        for b in tail {
            oscillation = oscillation.max(pdist(a, b));
        }
    }
    let m = increments.len();
    let tail_n = 6.min(m);
    let decay_rate = loglog_slope(&radii[m + 1 - tail_n..m + 1], &increments[m - tail_n..]);
    let last = increments[m - 1];
    let (limit, error) = if m >= 2 {
        let (a, b, c) = (unit(&points[m - 2]), unit(&points[m - 1]), unit(&points[m]));
        let (a, b) = (align(&a, &c), align(&b, &c));
        let d0 = (&b - &a).norm();
        let d1 = (&c - &b).norm();
        let q = if d0 > 0.0 { d1 / d0 } else { 0.0 };
        let est = if q < 0.9 { &c + (&c - &b) * (q / (1.0 - q)) } else { c.clone() };
        (Some(unit(&est)), last)
    } else {
        (None, f64::INFINITY)
    };
    let endpoint = if last <= tol {
        Endpoint::ConvergedToPoint
    } else if !sphere_distance.is_empty() && *sphere_distance.last().unwrap() <= tol && oscillation >= 1e-2 {
        Endpoint::ConvergedToSphere
    } else if oscillation >= 1e-2 && last > 10.0 * tol {
        Endpoint::Oscillating
    } else {
        Endpoint::Inconclusive
    };
    let limit = if endpoint == Endpoint::ConvergedToPoint { limit } else { None };
    Ok(ConvergenceReport { radii: radii.to_vec(), increments, sphere_distance, oscillation, limit, error, decay_rate, endpoint })
}

/// `v` with the sign that brings it closer to `reference`.
pub fn align(v: &LightVec, reference: &LightVec) -> LightVec {
    if v.dot(reference) < 0.0 {
        -v
    } else {
        v.clone()
    }
}
