//! Pure pole forms ξ = Re((ξ^Re + iξ^Im)(−dz/z)), their classification and closed-form
//! primitives, adapted charts, and the limit objects at the pole: scaled limits, the
//! first-kind limit map Γ_p^s(ξ⋉_pψ) and the K-map.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::connection::{primitive, FormField, IntegrationOptions, PathSpec, PolarPoint};
use crate::error::{Error, Result};
use crate::minkowski::{self, exp_skew, inner, norm2, outer_star, wedge, LightVec, LorentzMap, SkewMap};

/// Signature of the plane spanned by the ξ^Re factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Signature {
    Minkowski,
    Spacelike,
    Degenerate,
}

/// First or second kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Kind {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub span_signature: Signature,
    /// Positive eigenvalue of ξ^Re in the Minkowski case.
    pub zeta: Option<f64>,
    pub kind: Kind,
}

/// A pure pole form in an adapted chart, ξ^Re = v∧w and ξ^Im = x∧y.
#[derive(Clone, Debug)]
pub struct PurePoleForm {
    pub v: LightVec,
    pub w: LightVec,
    pub x: LightVec,
    pub y: LightVec,
    pub xi_re: SkewMap,
    pub xi_im: SkewMap,
}

/// Validates the span data and assembles the form.
pub fn build_ppf(v: LightVec, w: LightVec, x: LightVec, y: LightVec) -> Result<PurePoleForm> {
    let xi_re = wedge(&v, &w);
    let xi_im = wedge(&x, &y);
    if xi_re.norm() == 0.0 && xi_im.norm() == 0.0 {
        return Err(Error::Invalid("build_ppf: both spans are zero".into()));
    }
    let scale = (v.norm() * w.norm()).max(1.0) * (x.norm() * y.norm()).max(1.0);
    let tol = 1e-10 * scale;
    for a in [&x, &y] {
        for b in [&v, &w] {
            if inner(a, b).abs() > tol * a.norm().max(1.0) * b.norm().max(1.0) {
                return Err(Error::Invalid("build_ppf: ⟨x,y⟩ is not orthogonal to ⟨v,w⟩".into()));
            }
        }
    }
    let comm = (&xi_re * &xi_im - &xi_im * &xi_re).norm();
    if comm > 1e-10 * xi_re.norm().max(1.0) * xi_im.norm().max(1.0) {
        return Err(Error::Invalid("build_ppf: ξ^Re and ξ^Im do not commute".into()));
    }
    Ok(PurePoleForm { v, w, x, y, xi_re, xi_im })
}

impl PurePoleForm {
    pub fn dim(&self) -> usize {
        self.xi_re.nrows()
    }

    /// λξ.
    pub fn scaled(&self, lambda: f64) -> PurePoleForm {
        PurePoleForm {
            v: self.v.clone() * lambda,
            w: self.w.clone(),
            x: self.x.clone() * lambda,
            y: self.y.clone(),
            xi_re: &self.xi_re * lambda,
            xi_im: &self.xi_im * lambda,
        }
    }

    /// Gram determinant of (v, w) and its scale.
    fn gram(&self) -> (f64, f64, f64, f64) {
        let a = norm2(&self.v);
        let b = inner(&self.v, &self.w);
        let c = norm2(&self.w);
        (a, b, c, (self.v.norm() * self.w.norm()).powi(2))
    }

    /// Null vectors V± with ξ^Re V± = ±ζ V± in the Minkowski case.
    pub fn v_pm(&self) -> Option<(LightVec, LightVec, f64)> {
        let (a, b, c, _) = self.gram();
        let det = a * c - b * b;
        if det >= 0.0 {
            return None;
        }
        // ξ^Re(v) = a w − b v, ξ^Re(w) = b w − c v on the plane: matrix in basis (v, w).
        let m = nalgebra::Matrix2::new(-b, -c, a, b);
        let zeta = (-det).sqrt();
        let vec_for = |mu: f64| -> LightVec {
            // Kernel of m − μ from its row of larger norm.
            let r1 = (m[(0, 0)] - mu, m[(0, 1)]);
            let r2 = (m[(1, 0)], m[(1, 1)] - mu);
            let k = if r1.0.hypot(r1.1) >= r2.0.hypot(r2.1) { (-r1.1, r1.0) } else { (-r2.1, r2.0) };
            let out = &self.v * k.0 + &self.w * k.1;
            let nn = out.norm();
            out / nn
        };
        Some((vec_for(zeta), vec_for(-zeta), zeta))
    }

    /// Degenerate case: (V₀, W) with ξ^Re = V₀∧W, V₀ null and W ⊥ V₀.
    pub fn v0_w(&self) -> Option<(LightVec, LightVec)> {
        let (a, b, c, s) = self.gram();
        if (a * c - b * b).abs() > 1e-9 * s.max(1e-300) {
            return None;
        }
        // Kernel of the Gram matrix [[a, b], [b, c]].
        let (ka, kb) = if a.abs() + b.abs() >= b.abs() + c.abs() { (-b, a) } else { (c, -b) };
        let (ka, kb) = if ka == 0.0 && kb == 0.0 { (1.0, 0.0) } else { (ka, kb) };
        let v0 = &self.v * ka + &self.w * kb;
        let n0 = v0.norm();
        let v0 = v0 / n0;
        let (ka, kb) = (ka / n0, kb / n0);
        // v∧w = V₀∧W.
        let wv = if ka.abs() >= kb.abs() { &self.w / ka } else { &self.v * (-1.0 / kb) };
        Some((v0, wv))
    }

    /// W± eigenvectors of ξ^Im for eigenvalues ±σ, σ ≥ 0 real (x∧y Minkowski plane).
    pub fn im_eigen(&self) -> Option<(LightVec, LightVec, f64)> {
        let alt = PurePoleForm {
            v: self.x.clone(),
            w: self.y.clone(),
            x: self.v.clone(),
            y: self.w.clone(),
            xi_re: self.xi_im.clone(),
            xi_im: self.xi_re.clone(),
        };
        alt.v_pm()
    }
}

impl FormField for PurePoleForm {
    fn dim(&self) -> usize {
        self.xi_re.nrows()
    }
    fn eval_polar(&self, _: PolarPoint) -> Result<(SkewMap, SkewMap)> {
        Ok((-&self.xi_re, self.xi_im.clone()))
    }
}

/// Signature of ⟨v,w⟩ and kind; ζ from the eigenvalues of ξ^Re.
pub fn classify(ppf: &PurePoleForm) -> Result<Classification> {
    let (a, b, c, s) = ppf.gram();
    let det = a * c - b * b;
    let thr = 1e-10 * s.max(1e-300);
    if s == 0.0 {
        return Ok(Classification { span_signature: Signature::Degenerate, zeta: None, kind: Kind::First });
    }
    if det.abs() <= thr {
        return Ok(Classification { span_signature: Signature::Degenerate, zeta: None, kind: Kind::First });
    }
    if det.abs() <= 1e3 * thr {
        return Err(Error::Validation(format!("classify: ambiguous signature (det {det:e})")));
    }
    if det > 0.0 {
        return Ok(Classification { span_signature: Signature::Spacelike, zeta: None, kind: Kind::First });
    }
    let ev = minkowski::eigenvalues(&ppf.xi_re)?;
    let zeta = ev.iter().filter(|z| z.im.abs() < 1e-9 * (1.0 + z.re.abs())).map(|z| z.re).fold(f64::MIN, f64::max);
    let kind = if zeta < 1.0 { Kind::First } else { Kind::Second };
    Ok(Classification { span_signature: Signature::Minkowski, zeta: Some(zeta), kind })
}

/// Γ_p^q(ξ) = exp(ln(r(p)/r(q)) ξ^Re) exp((φ(q) − φ(p)) ξ^Im).
pub fn ppf_primitive(ppf: &PurePoleForm, p: PolarPoint, q: PolarPoint) -> LorentzMap {
    let a = minkowski::expm(&(&ppf.xi_re * (p.r / q.r).ln()));
    let b = minkowski::expm(&(&ppf.xi_im * (q.phi - p.phi)));
    a * b
}

/// 𝓜(ξ) = exp(−2π ξ^Im).
pub fn ppf_monodromy(ppf: &PurePoleForm) -> LorentzMap {
    exp_skew(&(&ppf.xi_im * -std::f64::consts::TAU)).expect("skew by construction")
}

/// Result of [`scaled_limit`].
#[derive(Clone, Debug)]
pub struct ScaledLimit {
    pub scale: f64,
    pub scaled: DMatrix<f64>,
    /// None for spacelike forms, which have no limit.
    pub asymptote: Option<DMatrix<f64>>,
    pub error: f64,
}

/// Scaled primitive and its asymptote at s.
pub fn scaled_limit(ppf: &PurePoleForm, p: PolarPoint, q: PolarPoint) -> Result<ScaledLimit> {
    let g = ppf_primitive(ppf, p, q);
    let c = classify(ppf)?;
    let (scale, asym) = match c.span_signature {
        Signature::Minkowski => {
            let (vp, vm, zeta) = ppf.v_pm().ok_or_else(|| Error::Validation("V± unavailable".into()))?;
            ((q.r / p.r).powf(zeta), Some(outer_star(&vp, &vm) / inner(&vp, &vm)))
        }
        Signature::Degenerate => {
            let (v0, w) = ppf.v0_w().ok_or_else(|| Error::Validation("V₀ unavailable".into()))?;
            (1.0 / crate::connection::ell(q, p), Some(outer_star(&v0, &v0) * (-0.5 * norm2(&w))))
        }
        Signature::Spacelike => (1.0, None),
    };
    let scaled = &g * scale;
    let error = asym.as_ref().map(|a| (&scaled - a).norm()).unwrap_or(f64::NAN);
    Ok(ScaledLimit { scale, scaled, asymptote: asym, error })
}

/// Adapted chart for a meromorphic 1-form α = a(z)dz with simple pole at 0 and residue ρ:
/// z_α(q) = z(p)·exp(ρ⁻¹∫_p^q α), integrated radially then angularly on the cover.
pub struct AdaptedChart {
    pub alpha: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
    pub residue: Complex64,
    pub seed: PolarPoint,
}

impl AdaptedChart {
    pub fn new(alpha: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>, residue: Complex64, seed: PolarPoint) -> Result<Self> {
        if residue.norm() < 1e-12 {
            return Err(Error::Invalid("adapted_chart: residue vanishes".into()));
        }
        Ok(AdaptedChart { alpha, residue, seed })
    }

    /// ∫ α along the log-polar segment p → q.
    fn integral(&self, p: PolarPoint, q: PolarPoint) -> Complex64 {
        let n = 64;
        let (dr, dp) = (q.rho() - p.rho(), q.phi - p.phi);
        let mut acc = Complex64::new(0.0, 0.0);
        // Composite Simpson in the segment parameter; dz = z (dρ + i dφ).
        for k in 0..=2 * n {
            let s = k as f64 / (2 * n) as f64;
            let x = PolarPoint::new((p.rho() + s * dr).exp(), p.phi + s * dp);
            let z = x.z();
            let val = (self.alpha)(z) * z * Complex64::new(dr, dp);
            let wgt = if k == 0 || k == 2 * n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += val * wgt;
        }
        acc / (6.0 * n as f64)
    }

    pub fn path_integral(&self, path: &PathSpec) -> Complex64 {
        path.waypoints.windows(2).map(|w| self.integral(w[0], w[1])).sum()
    }

    /// Chart value at q.
    pub fn eval(&self, q: PolarPoint) -> Complex64 {
        let mid = PolarPoint::new(q.r, self.seed.phi);
        let i = self.integral(self.seed, mid) + self.integral(mid, q);
        self.seed.z() * (i / self.residue).exp()
    }

    /// |α − ρ dz_α/z_α| at q, the dz_α/dz derivative by central differences.
    pub fn residual(&self, q: PolarPoint) -> f64 {
        let h = 1e-5 * q.r;
        let zp = self.eval(PolarPoint::new(q.r + h, q.phi));
        let zm = self.eval(PolarPoint::new(q.r - h, q.phi));
        let dzdz = (zp - zm) / (2.0 * h) / Complex64::from_polar(1.0, q.phi);
        let za = self.eval(q);
        ((self.alpha)(q.z()) - self.residue * dzdz / za).norm()
    }
}

/// Radial schedule r_k = r(p)·2^{−k}, k = 1..=k_max, at fixed φ.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Schedule {
    pub k_max: usize,
    pub tol: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { k_max: 40, tol: 1e-10 }
    }
}

impl Schedule {
    pub fn radii(&self, r_start: f64) -> Vec<f64> {
        (1..=self.k_max).map(|k| r_start * 0.5f64.powi(k as i32)).collect()
    }
}

/// Limit estimate of a matrix sequence on a schedule.
#[derive(Clone, Debug)]
pub struct MatrixLimit {
    pub value: DMatrix<f64>,
    /// Last Cauchy increment used.
    pub error: f64,
    pub converged: bool,
    pub increments: Vec<f64>,
    pub terms_used: usize,
}

/// Cauchy limit with geometric extrapolation of the last three terms. Stops at the first
/// increment ≤ tol, or at the term with smallest increment when noise sets in.
pub fn cauchy_limit(seq: &[DMatrix<f64>], tol: f64) -> MatrixLimit {
    let n = seq.len();
    let increments: Vec<f64> = seq.windows(2).map(|w| (&w[1] - &w[0]).norm() / w[1].norm().max(1.0)).collect();
    if n < 2 {
        return MatrixLimit { value: seq[0].clone(), error: f64::INFINITY, converged: false, increments, terms_used: n };
    }
    let mut best = 0;
    for (i, d) in increments.iter().enumerate() {
        if *d < increments[best] {
            best = i;
        }
        if *d <= tol {
            best = i;
            break;
        }
    }
    let k = best + 1;
    let mut value = seq[k].clone();
    let d1 = increments[best];
    if best >= 1 {
        let d0 = increments[best - 1];
        let q = d1 / d0;
        if q < 0.9 && d1 > 0.0 {
            value += (&seq[k] - &seq[k - 1]) * (q / (1.0 - q));
        }
    }
    MatrixLimit { value, error: d1, converged: d1 <= tol, increments, terms_used: k + 1 }
}

/// The first-kind gauged form ξ⋉_pψ = Γ_p(ξ)(ψ − ξ)Γ^p(ξ).
#[derive(Clone)]
pub struct FirstKindGauge {
    pub psi: Arc<dyn FormField>,
    pub ppf: PurePoleForm,
    pub base: PolarPoint,
}

impl FormField for FirstKindGauge {
    fn dim(&self) -> usize {
        self.psi.dim()
    }
    fn eval_polar(&self, q: PolarPoint) -> Result<(SkewMap, SkewMap)> {
        let g = ppf_primitive(&self.ppf, self.base, q);
        let gi = minkowski::adjoint(&g);
        let (a, b) = self.psi.eval_polar(q)?;
        let da = a + &self.ppf.xi_re;
        let db = b - &self.ppf.xi_im;
        Ok((&g * da * &gi, &g * db * &gi))
    }
}

/// Sampled sup of |ψ − ξ| (log-polar components, scaled by r^{−power}) on a log-radial grid.
pub fn pole_difference_sup(psi: &dyn FormField, ppf: &PurePoleForm, r0: f64, r_min: f64, power: f64) -> Result<f64> {
    let mut m: f64 = 0.0;
    let mut r = r0;
    while r >= r_min {
        for j in 0..8 {
            let q = PolarPoint::new(r, std::f64::consts::TAU * j as f64 / 8.0);
            let (a, b) = psi.eval_polar(q)?;
            let d = (a + &ppf.xi_re).norm().max((b - &ppf.xi_im).norm());
            m = m.max(d / r.powf(power));
        }
        r *= 0.5;
    }
    Ok(m)
}

/// Γ_p^{q_k} of a form along the radial schedule from p, accumulated segment by segment.
pub fn radial_primitives(form: &dyn FormField, p: PolarPoint, sched: &Schedule, opts: &IntegrationOptions) -> Result<Vec<DMatrix<f64>>> {
    let mut out = Vec::with_capacity(sched.k_max + 1);
    let mut g = DMatrix::identity(form.dim(), form.dim());
    out.push(g.clone());
    let mut prev = p;
    for r in sched.radii(p.r) {
        let q = p.at_radius(r);
        let seg = primitive(form, &PathSpec::segment(prev, q)?, opts)?;
        g = minkowski::reorthonormalize(&(g * seg.value))?;
        out.push(g.clone());
        prev = q;
    }
    Ok(out)
}

/// Limit Γ_p^s of the first-kind gauged form, radially from p.
pub fn residual_limit(pole_form: Arc<dyn FormField>, ppf: &PurePoleForm, p: PolarPoint, sched: &Schedule, opts: &IntegrationOptions) -> Result<MatrixLimit> {
    let gauged = FirstKindGauge { psi: pole_form, ppf: ppf.clone(), base: p };
    let seq = radial_primitives(&gauged, p, sched, opts)?;
    Ok(cauchy_limit(&seq, sched.tol))
}

/// Limit of a vector sequence with the same rules as [`cauchy_limit`].
#[derive(Clone, Debug)]
pub struct VectorLimit {
    pub value: LightVec,
    pub error: f64,
    pub converged: bool,
}

/// K(p) = lim |z(q)/z(p)|^ζ Γ_p^q(Ψ) V₊/⟪V₊,V₋⟫ along the radial schedule.
pub fn k_map(pole_form: &dyn FormField, ppf: &PurePoleForm, p: PolarPoint, sched: &Schedule, opts: &IntegrationOptions) -> Result<VectorLimit> {
    let (vp, vm, zeta) = ppf.v_pm().ok_or_else(|| Error::Invalid("k_map: form is not Minkowski".into()))?;
    let k0 = &vp / inner(&vp, &vm);
    let gs = radial_primitives(pole_form, p, sched, opts)?;
    let seq: Vec<DMatrix<f64>> = gs
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let r = if k == 0 { p.r } else { sched.radii(p.r)[k - 1] };
            let v: DVector<f64> = g * &k0 * (r / p.r).powf(zeta);
            DMatrix::from_column_slice(v.len(), 1, v.as_slice())
        })
        .collect();
    let lim = cauchy_limit(&seq, sched.tol);
    let value: LightVec = lim.value.column(0).into_owned();
    let nn = norm2(&value).abs() / value.norm_squared();
    if nn > 1e-6 {
        return Err(Error::NonConvergence(format!("k_map: limit is not null (relative ⟪K,K⟫ = {nn:e})")));
    }
    Ok(VectorLimit { value, error: lim.error, converged: lim.converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::MinkSpace;

    fn xi_lambda(lambda: f64) -> PurePoleForm {
        let s = MinkSpace::default();
        build_ppf(
            s.o() - s.t_u(),
            s.iota() - s.t_u() * lambda,
            s.t_u() - s.o() * lambda - s.iota(),
            s.t_v(),
        )
        .unwrap()
    }

    #[test]
    fn classification_of_the_second_order_family() {
        let c = classify(&xi_lambda(0.375)).unwrap();
        assert_eq!(c.span_signature, Signature::Minkowski);
        assert!((c.zeta.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(c.kind, Kind::First);
        assert_eq!(classify(&xi_lambda(0.625)).unwrap().span_signature, Signature::Spacelike);
        assert_eq!(classify(&xi_lambda(0.5)).unwrap().span_signature, Signature::Degenerate);
        assert_eq!(classify(&xi_lambda(-1.5)).unwrap().kind, Kind::Second);
    }

    #[test]
    fn eigenvectors_of_xi_re() {
        let f = xi_lambda(0.375);
        let (vp, vm, z) = f.v_pm().unwrap();
        assert!((&f.xi_re * &vp - &vp * z).norm() < 1e-12);
        assert!((&f.xi_re * &vm + &vm * z).norm() < 1e-12);
        assert!(norm2(&vp).abs() < 1e-12 && norm2(&vm).abs() < 1e-12);
    }

    #[test]
    fn scaled_minkowski_limit_is_rank_one() {
        let f = xi_lambda(0.375);
        let p = PolarPoint::new(1.0, 0.0);
        let mut prev = f64::INFINITY;
        for k in 10..30 {
            let sl = scaled_limit(&f, p, PolarPoint::new(0.5f64.powi(k), 0.3)).unwrap();
            assert!(sl.error < prev);
            prev = sl.error;
        }
        let sv = minkowski::singular_values(&scaled_limit(&f, p, PolarPoint::new(1e-12, 0.3)).unwrap().scaled);
        assert!(sv[1] < 1e-6 * sv[0]);
    }

    #[test]
    fn adapted_chart_of_a_perturbed_pole() {
        let seed = PolarPoint::new(0.5, 0.2);
        let ch = AdaptedChart::new(Arc::new(|z: Complex64| -1.0 / z + 1.0), Complex64::new(-1.0, 0.0), seed).unwrap();
        let q = PolarPoint::new(0.3, 1.4);
        let c = seed.z().exp();
        let exact = q.z() * (-q.z()).exp() * c;
        assert!((ch.eval(q) - exact).norm() < 1e-9);
        assert!(ch.residual(q) < 1e-6);
        let ident = AdaptedChart::new(Arc::new(|z: Complex64| -1.0 / z), Complex64::new(-1.0, 0.0), seed).unwrap();
        assert!((ident.eval(q) - q.z()).norm() < 1e-12);
    }

    #[test]
    fn self_gauge_vanishes() {
        let f = xi_lambda(0.625);
        let p = PolarPoint::new(0.5, 0.0);
        let lim = residual_limit(Arc::new(f.clone()), &f, p, &Schedule { k_max: 6, tol: 1e-12 }, &IntegrationOptions::default()).unwrap();
        assert!((lim.value - DMatrix::identity(5, 5)).norm() < 1e-12);
        let k = k_map(&xi_lambda(0.375), &xi_lambda(0.375), p, &Schedule { k_max: 8, tol: 1e-12 }, &IntegrationOptions::default()).unwrap();
        let (vp, vm, _) = xi_lambda(0.375).v_pm().unwrap();
        assert!((k.value - &vp / inner(&vp, &vm)).norm() < 1e-9);
    }
}
