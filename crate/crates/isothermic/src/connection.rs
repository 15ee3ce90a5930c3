//! Points and paths on the universal cover of the punctured disc, 1-form fields, and
//! primitives of flat connections d + ψ by RK4 on the Lorentz group.
//!
//! Forms are evaluated against the log-polar coordinates (ρ, φ) with ρ = ln r. A primitive
//! solves dΓ = Γψ along a path from p to q with Γ_p^p = id and returns Γ_p^q.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{self, LorentzMap, SkewMap};

/// Point (r, φ) of the universal cover of the punctured disc; projects to z = r e^{iφ}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub r: f64,
    pub phi: f64,
}

impl PolarPoint {
    pub fn new(r: f64, phi: f64) -> Self {
        PolarPoint { r, phi }
    }

    pub fn rho(&self) -> f64 {
        self.r.ln()
    }

    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.phi)
    }

    /// Same radius, angle shifted by `dphi`.
    pub fn turned(&self, dphi: f64) -> Self {
        PolarPoint::new(self.r, self.phi + dphi)
    }

    /// Same angle, radius `r`.
    pub fn at_radius(&self, r: f64) -> Self {
        PolarPoint::new(r, self.phi)
    }

    /// Equality of the projections to the punctured disc.
    pub fn same_base(&self, other: &PolarPoint, tol: f64) -> bool {
        let d = (self.phi - other.phi).rem_euclid(std::f64::consts::TAU);
        (self.r - other.r).abs() <= tol && (d <= tol || std::f64::consts::TAU - d <= tol)
    }
}

/// ℓ(p,q) = 1 + ln²(r(p)/r(q)).
pub fn ell(p: PolarPoint, q: PolarPoint) -> f64 {
    1.0 + (p.r / q.r).ln().powi(2)
}

/// Piecewise path, linear in (ρ, φ) between waypoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub waypoints: Vec<PolarPoint>,
}

impl PathSpec {
    pub fn new(waypoints: Vec<PolarPoint>) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::Invalid("path without waypoints".into()));
        }
        for w in &waypoints {
            if !(w.r > 0.0) || !w.r.is_finite() || !w.phi.is_finite() {
                return Err(Error::Invalid(format!("path waypoint outside the punctured disc: {w:?}")));
            }
        }
        for pair in waypoints.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::Invalid("consecutive waypoints coincide".into()));
            }
        }
        Ok(PathSpec { waypoints })
    }

    pub fn segment(p: PolarPoint, q: PolarPoint) -> Result<Self> {
        if p == q {
            return PathSpec::new(vec![p]);
        }
        PathSpec::new(vec![p, q])
    }

    /// Radial segment followed by an angular arc: p → (r(q), φ(p)) → q.
    pub fn radial_then_arc(p: PolarPoint, q: PolarPoint) -> Result<Self> {
        let mut w = vec![p];
        let mid = PolarPoint::new(q.r, p.phi);
        if mid != p {
            w.push(mid);
        }
        if q != mid {
            w.push(q);
        }
        PathSpec::new(w)
    }

    pub fn start(&self) -> PolarPoint {
        self.waypoints[0]
    }

    pub fn end(&self) -> PolarPoint {
        *self.waypoints.last().unwrap()
    }

    pub fn max_radius(&self) -> f64 {
        self.waypoints.iter().map(|w| w.r).fold(0.0, f64::max)
    }

    /// Log-polar length.
    pub fn length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| ((w[1].rho() - w[0].rho()).powi(2) + (w[1].phi - w[0].phi).powi(2)).sqrt())
            .sum()
    }

    /// The reversed path.
    pub fn reversed(&self) -> Self {
        let mut w = self.waypoints.clone();
        w.reverse();
        PathSpec { waypoints: w }
    }
}

/// A 𝔬(R^{n+2}_1)-valued 1-form on the cover, given by its components against dρ and dφ.
pub trait FormField: Send + Sync {
    fn dim(&self) -> usize;
    /// Components (ψ(∂_ρ), ψ(∂_φ)).
    fn eval_polar(&self, p: PolarPoint) -> Result<(SkewMap, SkewMap)>;
    /// Components against du, dv of the chart z = u + iv.
    fn eval_uv(&self, p: PolarPoint) -> Result<(SkewMap, SkewMap)> {
        let (a, b) = self.eval_polar(p)?;
        let (s, c) = p.phi.sin_cos();
        Ok(((&a * c - &b * s) / p.r, (&a * s + &b * c) / p.r))
    }
}

/// A 1-form given by components against du, dv of the chart, defined on the whole disc.
pub trait ChartForm: Send + Sync {
    fn dim(&self) -> usize;
    fn eval_chart(&self, u: f64, v: f64) -> Result<(SkewMap, SkewMap)>;
}

/// The zero form.
#[derive(Clone, Copy, Debug)]
pub struct ZeroForm {
    pub dim: usize,
}

impl FormField for ZeroForm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval_polar(&self, _: PolarPoint) -> Result<(SkewMap, SkewMap)> {
        Ok((DMatrix::zeros(self.dim, self.dim), DMatrix::zeros(self.dim, self.dim)))
    }
}

/// λ·ψ.
#[derive(Clone)]
pub struct Scaled {
    pub lambda: f64,
    pub inner: Arc<dyn FormField>,
}

impl Scaled {
    pub fn new(lambda: f64, inner: Arc<dyn FormField>) -> Self {
        Scaled { lambda, inner }
    }
}

impl FormField for Scaled {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval_polar(&self, p: PolarPoint) -> Result<(SkewMap, SkewMap)> {
        let (a, b) = self.inner.eval_polar(p)?;
        Ok((a * self.lambda, b * self.lambda))
    }
}

/// λ·ψ for chart forms.
#[derive(Clone)]
pub struct ScaledChart {
    pub lambda: f64,
    pub inner: Arc<dyn ChartForm>,
}

impl ChartForm for ScaledChart {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval_chart(&self, u: f64, v: f64) -> Result<(SkewMap, SkewMap)> {
        let (a, b) = self.inner.eval_chart(u, v)?;
        Ok((a * self.lambda, b * self.lambda))
    }
}

/// A Lorentz-map-valued field g on the cover.
pub trait LorentzField: Send + Sync {
    fn value(&self, p: PolarPoint) -> Result<LorentzMap>;
    /// (∂_ρ g, ∂_φ g); default by Richardson-extrapolated central differences.
    fn derivative(&self, p: PolarPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let d = |h: f64| -> Result<(DMatrix<f64>, DMatrix<f64>)> {
            let er = (h).exp();
            let gr = (self.value(PolarPoint::new(p.r * er, p.phi))? - self.value(PolarPoint::new(p.r / er, p.phi))?) / (2.0 * h);
            let gp = (self.value(p.turned(h))? - self.value(p.turned(-h))?) / (2.0 * h);
            Ok((gr, gp))
        };
        let (a1, b1) = d(1e-3)?;
        let (a2, b2) = d(5e-4)?;
        Ok(((&a2 * 4.0 - a1) / 3.0, (&b2 * 4.0 - b1) / 3.0))
    }
}

/// A constant gauge.
#[derive(Clone, Debug)]
pub struct ConstantField(pub LorentzMap);

impl LorentzField for ConstantField {
    fn value(&self, _: PolarPoint) -> Result<LorentzMap> {
        Ok(self.0.clone())
    }
    fn derivative(&self, _: PolarPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let n = self.0.nrows();
        Ok((DMatrix::zeros(n, n), DMatrix::zeros(n, n)))
    }
}

/// Gauge transform g⋉ψ = g⁻¹ψg + g⁻¹dg.
#[derive(Clone)]
pub struct Gauged {
    pub form: Arc<dyn FormField>,
    pub field: Arc<dyn LorentzField>,
}

/// Builds the gauged form g⋉ψ.
pub fn gauge(form: Arc<dyn FormField>, field: Arc<dyn LorentzField>) -> Gauged {
    Gauged { form, field }
}

impl FormField for Gauged {
    fn dim(&self) -> usize {
        self.form.dim()
    }
    fn eval_polar(&self, p: PolarPoint) -> Result<(SkewMap, SkewMap)> {
        let g = self.field.value(p)?;
        let gi = minkowski::adjoint(&g);
        if minkowski::lorentz_residual(&g) > 1e-8 * g.norm_squared().max(1.0) {
            return Err(Error::Invalid("gauge: field value is not a Lorentz map".into()));
        }
        let (a, b) = self.form.eval_polar(p)?;
        let (dr, dp) = self.field.derivative(p)?;
        Ok((&gi * a * &g + &gi * dr, &gi * b * &g + &gi * dp))
    }
}

/// Numeric options for primitives.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IntegrationOptions {
    /// Initial step length in log-polar coordinates.
    pub h0: f64,
    /// Minimum number of steps per segment.
    pub min_steps: usize,
    /// Relative Richardson tolerance.
    pub tol: f64,
    /// Maximum number of step doublings.
    pub max_doublings: usize,
    /// Reorthonormalization period in steps (0 disables).
    pub reortho_every: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions { h0: 0.05, min_steps: 4, tol: 1e-10, max_doublings: 10, reortho_every: 64 }
    }
}

impl IntegrationOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// A computed primitive Γ_p^q.
#[derive(Clone, Debug, Serialize)]
pub struct Primitive {
    #[serde(with = "crate::serial::repr")]
    pub value: LorentzMap,
    pub steps: usize,
    pub error_estimate: f64,
}

fn rk4_segment<F>(eval: &F, g: &mut DMatrix<f64>, n: usize, reortho: usize, counter: &mut usize) -> Result<()>
where
    F: Fn(f64) -> Result<SkewMap>,
{
    let h = 1.0 / n as f64;
    let mut a0 = eval(0.0)?;
    for k in 0..n {
        let s = k as f64 * h;
        let am = eval(s + 0.5 * h)?;
        let a1 = eval(s + h)?;
        let k1 = &*g * &a0;
        let k2 = (&*g + &k1 * (0.5 * h)) * &am;
        let k3 = (&*g + &k2 * (0.5 * h)) * &am;
        let k4 = (&*g + &k3 * h) * &a1;
        *g += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        a0 = a1;
        *counter += 1;
        if reortho > 0 && *counter % reortho == 0 {
            *g = minkowski::reorthonormalize(g)?;
        }
    }
    Ok(())
}

fn segment_steps(p: PolarPoint, q: PolarPoint, h0: f64, min_steps: usize) -> usize {
    let len = ((q.rho() - p.rho()).powi(2) + (q.phi - p.phi).powi(2)).sqrt();
    ((len / h0).ceil() as usize).max(min_steps)
}

/// Fixed-step RK4 primitive with `mult` times the base step counts.
pub fn primitive_fixed(form: &dyn FormField, path: &PathSpec, opts: &IntegrationOptions, mult: usize) -> Result<(LorentzMap, usize)> {
    let dim = form.dim();
    let mut g = DMatrix::identity(dim, dim);
    let mut counter = 0;
    for w in path.waypoints.windows(2) {
        let (p, q) = (w[0], w[1]);
        let n = segment_steps(p, q, opts.h0, opts.min_steps) * mult;
        let (dr, dp) = (q.rho() - p.rho(), q.phi - p.phi);
        let eval = |s: f64| -> Result<SkewMap> {
            let x = PolarPoint::new((p.rho() + s * dr).exp(), p.phi + s * dp);
            let (a, b) = form.eval_polar(x)?;
            Ok(a * dr + b * dp)
        };
        rk4_segment(&eval, &mut g, n, opts.reortho_every, &mut counter)?;
    }
    if opts.reortho_every > 0 && counter > 0 {
        g = minkowski::reorthonormalize(&g)?;
    }
    Ok((g, counter))
}

fn richardson<F>(run: F, opts: &IntegrationOptions) -> Result<Primitive>
where
    F: Fn(usize) -> Result<(LorentzMap, usize)>,
{
    let (mut coarse, _) = run(1)?;
    let mut mult = 1;
    for _ in 0..opts.max_doublings {
        mult *= 2;
        let (fine, steps) = run(mult)?;
        let err = (&fine - &coarse).norm() / 15.0 / fine.norm().max(1.0);
        if err <= opts.tol {
            return Ok(Primitive { value: fine, steps, error_estimate: err });
        }
        coarse = fine;
    }
    Err(Error::NonConvergence(format!(
        "primitive: tolerance {:e} not reached after {} doublings",
        opts.tol, opts.max_doublings
    )))
}

/// Primitive Γ_p^q of ψ along the path from its first to its last waypoint.
pub fn primitive(form: &dyn FormField, path: &PathSpec, opts: &IntegrationOptions) -> Result<Primitive> {
    if path.waypoints.len() == 1 {
        let dim = form.dim();
        return Ok(Primitive { value: DMatrix::identity(dim, dim), steps: 0, error_estimate: 0.0 });
    }
    richardson(|m| primitive_fixed(form, path, opts, m), opts)
}

/// Monodromy along the circle through `base`, traversed with winding number −1 about s,
/// i.e. φ decreasing from φ(base) to φ(base) − 2π.
pub fn monodromy(form: &dyn FormField, base: PolarPoint, opts: &IntegrationOptions) -> Result<Primitive> {
    let path = PathSpec::new(vec![base, base.turned(-std::f64::consts::TAU)])?;
    primitive(form, &path, opts)
}

/// Absolute error at which a deviation counts as resolved to rounding level.
pub const DEVIATION_FLOOR: f64 = 1e-15;

/// Deviation D = Γ_p^q − id of the primitive of a small form, integrated as
/// dD = (id + D)ψ so that its absolute error scales with |D| rather than with |Γ|. The error
/// estimate is absolute.
pub fn primitive_deviation(form: &dyn FormField, path: &PathSpec, opts: &IntegrationOptions) -> Result<Primitive> {
    let dim = form.dim();
    let run = |mult: usize| -> Result<DMatrix<f64>> {
        let mut d = DMatrix::zeros(dim, dim);
        for w in path.waypoints.windows(2) {
            let (p, q) = (w[0], w[1]);
            let n = segment_steps(p, q, opts.h0, opts.min_steps) * mult;
            let (dr, dp) = (q.rho() - p.rho(), q.phi - p.phi);
            let eval = |s: f64| -> Result<SkewMap> {
                let x = PolarPoint::new((p.rho() + s * dr).exp(), p.phi + s * dp);
                let (a, b) = form.eval_polar(x)?;
                Ok(a * dr + b * dp)
            };
            let h = 1.0 / n as f64;
            let mut a0 = eval(0.0)?;
            for k in 0..n {
                let s = k as f64 * h;
                let am = eval(s + 0.5 * h)?;
                let a1 = eval(s + h)?;
                let k1 = &a0 + &d * &a0;
                let d2 = &d + &k1 * (0.5 * h);
                let k2 = &am + &d2 * &am;
                let d3 = &d + &k2 * (0.5 * h);
                let k3 = &am + &d3 * &am;
                let d4 = &d + &k3 * h;
                let k4 = &a1 + &d4 * &a1;
                d += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
                a0 = a1;
            }
        }
        Ok(d)
    };
    let mut coarse = run(1)?;
    let mut mult = 1;
    for _ in 0..opts.max_doublings {
        mult *= 2;
        let fine = run(mult)?;
        let err = (&fine - &coarse).norm() / 15.0;
        if err <= opts.tol * fine.norm() || err <= DEVIATION_FLOOR {
            return Ok(Primitive { value: fine, steps: mult, error_estimate: err });
        }
        coarse = fine;
    }
    Err(Error::NonConvergence(format!("primitive_deviation: tolerance {:e} not reached", opts.tol)))
}

/// Primitive of a chart form along a polygon in the chart (may pass through z = 0).
pub fn primitive_chart(form: &dyn ChartForm, pts: &[(f64, f64)], opts: &IntegrationOptions) -> Result<Primitive> {
    let dim = form.dim();
    if pts.len() < 2 {
        return Ok(Primitive { value: DMatrix::identity(dim, dim), steps: 0, error_estimate: 0.0 });
    }
    let run = |mult: usize| -> Result<(LorentzMap, usize)> {
        let mut g = DMatrix::identity(dim, dim);
        let mut counter = 0;
        for w in pts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let (du, dv) = (q.0 - p.0, q.1 - p.1);
            let n = (((du * du + dv * dv).sqrt() / opts.h0).ceil() as usize).max(opts.min_steps) * mult;
            let eval = |s: f64| -> Result<SkewMap> {
                let (a, b) = form.eval_chart(p.0 + s * du, p.1 + s * dv)?;
                Ok(a * du + b * dv)
            };
            rk4_segment(&eval, &mut g, n, opts.reortho_every, &mut counter)?;
        }
        if opts.reortho_every > 0 {
            g = minkowski::reorthonormalize(&g)?;
        }
        Ok((g, counter))
    };
    richardson(run, opts)
}
