//! Transforms near a zero of Q. The form Ω is smooth through s, so primitives are taken in the
//! chart z along straight segments that may pass through z = 0.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{align, loglog_slope, unit};
use crate::connection::{monodromy, primitive_chart, ChartForm, IntegrationOptions, PolarPoint, Scaled, ScaledChart};
use crate::error::{Error, Result};
use crate::minkowski::{adjoint, pdist, LightVec};
use crate::surface::{OmegaField, QuadDiff, SurfaceJet, SurfaceModel};

/// Approach directions used for the continuity test.
pub const DIRECTIONS: [f64; 4] = [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 3.0 * std::f64::consts::FRAC_PI_2];

#[derive(Clone, Debug, Serialize)]
pub struct ZeroCaseReport {
    pub lambda: f64,
    pub base: (f64, f64),
    /// Calapso and Darboux values at s obtained by integrating through s.
    #[serde(with = "crate::serial::repr")]
    pub calapso_at_s: LightVec,
    #[serde(with = "crate::serial::repr")]
    pub darboux_at_s: LightVec,
    /// Extrapolated directional limits along the rays of [`DIRECTIONS`].
    #[serde(with = "crate::serial::repr")]
    pub calapso_limits: Vec<LightVec>,
    #[serde(with = "crate::serial::repr")]
    pub darboux_limits: Vec<LightVec>,
    /// max proj_dist among the directional limits and the value at s.
    pub calapso_spread: f64,
    pub darboux_spread: f64,
    /// ‖𝓜 − id‖ for a loop of radius `loop_radius` around s.
    pub loop_radius: f64,
    pub monodromy_defect: f64,
    /// |z| and the projective differential norm of the Darboux transform there.
    pub radii: Vec<f64>,
    pub darboux_differential: Vec<f64>,
    pub calapso_differential: Vec<f64>,
    /// Fitted exponent a in ‖df̂‖ ≈ C|z|^a.
    pub darboux_decay_order: f64,
}

fn chart_form(model: Arc<dyn SurfaceModel>, q: &QuadDiff, lambda: f64) -> ScaledChart {
    ScaledChart { lambda, inner: Arc::new(OmegaField::new(model, q.clone())) }
}

fn lift_at(model: &dyn SurfaceModel, z: Complex64) -> Result<SurfaceJet> {
    SurfaceJet::from_euclid(&model.euclid_jet_z(z.re, z.im)?, model.space())
}

/// Norm of the component of dx orthogonal to x, per unit |x|, with dx = ±ψ(u, v)·x.
fn projective_differential(form: &dyn ChartForm, z: Complex64, x: &LightVec) -> Result<f64> {
    let (a, b) = form.eval_chart(z.re, z.im)?;
    let u = x / x.norm();
    let perp = |w: LightVec| -> f64 {
        let w = w / x.norm();
        let c = w.dot(&u);
        (w - &u * c).norm()
    };
    Ok(perp(&a * x).hypot(perp(&b * x)))
}

/// Continuity and non-immersion of transforms at an isolated zero s of Q (Q holomorphic, z(s) = 0).
pub fn zero_case_smoke(model: Arc<dyn SurfaceModel>, q: &QuadDiff, lambda: f64, base: (f64, f64), init: &LightVec, opts: &IntegrationOptions) -> Result<ZeroCaseReport> {
    if q.pole_order() != 0 || q.qz(Complex64::new(0.0, 0.0)).norm() > 1e-14 {
        return Err(Error::Invalid("zero_case_smoke: Q must be holomorphic and vanish at s".into()));
    }
    let form = chart_form(model.clone(), q, lambda);
    let gamma = |z: Complex64| -> Result<DMatrix<f64>> { Ok(primitive_chart(&form, &[base, (z.re, z.im)], opts)?.value) };
    let calapso = |z: Complex64| -> Result<LightVec> { Ok(gamma(z)? * lift_at(model.as_ref(), z)?.f) };
    let darboux = |z: Complex64| -> Result<LightVec> { Ok(adjoint(&gamma(z)?) * init) };
    let zero = Complex64::new(0.0, 0.0);
    let calapso_at_s = calapso(zero)?;
    let darboux_at_s = darboux(zero)?;
    // Limits along rays, extrapolated linearly in |z| from |z| = ε and ε/2.
    let eps = 1e-4;
    let ray_limit = |f: &dyn Fn(Complex64) -> Result<LightVec>, theta: f64, reference: &LightVec| -> Result<LightVec> {
        let a = align(&unit(&f(Complex64::from_polar(eps, theta))?), reference);
        let b = align(&unit(&f(Complex64::from_polar(0.5 * eps, theta))?), reference);
        Ok(&b * 2.0 - a)
    };
    let mut calapso_limits = Vec::new();
    let mut darboux_limits = Vec::new();
    for &th in DIRECTIONS.iter() {
        calapso_limits.push(ray_limit(&calapso, th, &unit(&calapso_at_s))?);
        darboux_limits.push(ray_limit(&darboux, th, &unit(&darboux_at_s))?);
    }
    let spread = |lims: &[LightVec], at: &LightVec| -> f64 {
        let mut m: f64 = 0.0;
        for a in lims {
            m = m.max(pdist(a, at));
            for b in lims {
                m = m.max(pdist(a, b));
            }
        }
        m
    };
    let loop_radius = 0.3;
    let polar = Scaled::new(lambda, Arc::new(OmegaField::new(model.clone(), q.clone())));
    let mono = monodromy(&polar, PolarPoint::new(loop_radius, 0.0), opts)?.value;
    let dim = mono.nrows();
    let monodromy_defect = (mono - DMatrix::<f64>::identity(dim, dim)).norm();
    let radii: Vec<f64> = (0..8).map(|k| 0.1 * 0.5f64.powi(k)).collect();
    let theta = 0.7;
    let mut darboux_differential = Vec::new();
    let mut calapso_differential = Vec::new();
    for &r in &radii {
        let z = Complex64::from_polar(r, theta);
        darboux_differential.push(projective_differential(&form, z, &darboux(z)?)?);
        let j = lift_at(model.as_ref(), z)?;
        let g = gamma(z)?;
        let fz = j.fz.map(|c| c.re);
        calapso_differential.push((&g * fz).norm() / (&g * &j.f).norm());
    }
    let darboux_decay_order = loglog_slope(&radii, &darboux_differential);
    Ok(ZeroCaseReport {
        lambda,
        base,
        calapso_spread: spread(&calapso_limits, &calapso_at_s),
        darboux_spread: spread(&darboux_limits, &darboux_at_s),
        calapso_at_s,
        darboux_at_s,
        calapso_limits,
        darboux_limits,
        loop_radius,
        monodromy_defect,
        radii,
        darboux_differential,
        calapso_differential,
        darboux_decay_order,
    })
}
