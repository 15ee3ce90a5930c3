//! Poles of second order for surfaces of revolution: Q = c dz²/z² with c > 0.
//!
//! In the log chart w = ln z = t + iv the lift f̃ = f/h is flat. The frame
//! G̃ = [f̃, ι̂, f̃_t, f̃_v, Ñ] with Ñ = n + (x·n)ι + κ₁f and the constant change of basis C give
//! the gauge g = G̃C, for which g⋉λΩ depends on r only and tends to the pure pole form
//! ξ_λ = (o−t_u)∧(ι−λt_u) dρ-part and (t_u−λo−ι)∧t_v dφ-part at s.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::{Transport, DirectTransport};
use crate::connection::{monodromy, primitive, primitive_deviation, FormField, IntegrationOptions, PathSpec, PolarPoint};
use crate::error::{Error, Result};
use crate::minkowski::{self, adjoint, inner, inner_c, pdist, wedge, LightVec, LorentzMap, MinkSpace, SkewMap};
use crate::polecore::{self, build_ppf, k_map, residual_limit, MatrixLimit, PurePoleForm, Schedule, VectorLimit};
use crate::profile::ProfileJet;
use crate::surface::{self, QuadDiff, SurfaceModel};

type CVec = DVector<Complex64>;

/// Coefficients of the reduced form: with A_t = t_u∧ι + α t_u∧o + c_N n∧o and
/// A_v = t_v∧ι + β t_v∧o + m t_v∧n, g⋉λΩ = C⁻¹(λo∧t_u + A_t)C dρ + C⁻¹(−λo∧t_v + A_v)C dφ.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReducedCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub c_n: f64,
    pub m: f64,
}

impl ReducedCoefficients {
    pub fn from_jet(pj: &ProfileJet) -> Self {
        let [h, h1, h2, _] = pj.h;
        let (k1, dk1) = pj.kappa1();
        let k2 = pj.kappa2();
        let a = h1 / h;
        ReducedCoefficients {
            alpha: -(h2 / h - 1.5 * a * a + 0.5 * k1 * k1 * h * h),
            beta: -(0.5 * a * a + k1 * k2 * h * h - 0.5 * k1 * k1 * h * h),
            c_n: h * dk1,
            m: h * (k2 - k1),
        }
    }
}

/// The constant change of basis C: o↦o, ι↦ι+½o+t_u, t_u↦o+t_u, other basis vectors fixed.
pub fn basis_change(space: MinkSpace) -> LorentzMap {
    let mut c = space.identity();
    c[(minkowski::O, minkowski::IOTA)] = 0.5;
    c[(minkowski::TU, minkowski::IOTA)] = 1.0;
    c[(minkowski::O, minkowski::TU)] = 1.0;
    c
}

/// Gauge data at a second-order pole of a surface of revolution.
#[derive(Clone)]
pub struct GaugeData {
    pub model: Arc<dyn SurfaceModel>,
    pub q: QuadDiff,
    /// c in Q = c dz²/z²; the normalized differential is Q/c.
    pub scale: f64,
    pub space: MinkSpace,
    pub c: LorentzMap,
    pub c_inv: LorentzMap,
}

/// Builds the second-order gauge data.
pub fn so_gauge(model: Arc<dyn SurfaceModel>, q: &QuadDiff) -> Result<GaugeData> {
    if q.pole_order() != 2 || q.c1.norm() != 0.0 || q.hol.iter().any(|c| c.norm() != 0.0) {
        return Err(Error::Invalid("so_gauge: expects Q = c dz²/z²".into()));
    }
    if q.c2.im.abs() > 1e-14 * q.c2.norm() || q.c2.re <= 0.0 {
        return Err(Error::Invalid(format!("so_gauge: c = {} is not a positive real, √Q has no real residue", q.c2)));
    }
    if model.profile().is_none() {
        return Err(Error::Invalid("so_gauge: model is not in the revolution family".into()));
    }
    let space = model.space();
    let c = basis_change(space);
    let c_inv = adjoint(&c);
    Ok(GaugeData { model, q: q.clone(), scale: q.c2.re, space, c, c_inv })
}

fn lift_tangent(space: MinkSpace, x: &[f64; 3], y: &[f64; 3]) -> LightVec {
    let mut v = DVector::zeros(space.dim());
    for k in 0..3 {
        v[2 + k] = y[k];
    }
    v[1] = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    v
}

impl GaugeData {
    /// Spectral parameter for the normalized differential.
    pub fn lambda_eff(&self, lambda: f64) -> f64 {
        lambda * self.scale
    }

    pub fn profile_jet(&self, r: f64) -> ProfileJet {
        self.model.profile().expect("revolution model").jet(r.ln())
    }

    pub fn coefficients(&self, r: f64) -> ReducedCoefficients {
        ReducedCoefficients::from_jet(&self.profile_jet(r))
    }

    /// The frame G̃ at p.
    pub fn g_tilde(&self, p: PolarPoint) -> LorentzMap {
        let pj = self.profile_jet(p.r);
        let (s, c) = p.phi.sin_cos();
        let [h, h1, _, _] = pj.h;
        let l1 = pj.lt[0];
        let (k1, _) = pj.kappa1();
        let x = [h * c, h * s, pj.l];
        let xt = [h1 * c, h1 * s, l1];
        let xv = [-h * s, h * c, 0.0];
        let n = [-l1 * c / h, -l1 * s / h, h1 / h];
        let mut xe = vec![0.0; self.space.n];
        xe[..3].copy_from_slice(&x);
        let fe = minkowski::euclidean_lift(&xe);
        let lxt = lift_tangent(self.space, &x, &xt);
        let lxv = lift_tangent(self.space, &x, &xv);
        let ln = lift_tangent(self.space, &x, &n);
        let e = h1 * h1 / (2.0 * h * h * h) + h * k1 * k1 / 2.0;
        let ft = &fe / h;
        let iota_hat = self.space.iota() * h + &fe * e - &lxt * (h1 / (h * h)) + &ln * (h * k1);
        let ftt = &lxt / h - &fe * (h1 / (h * h));
        let ftv = &lxv / h;
        let nt = &ln + &fe * k1;
        let mut cols = vec![ft, iota_hat, ftt, ftv, nt];
        for k in 5..self.space.dim() {
            cols.push(self.space.basis(k));
        }
        DMatrix::from_columns(&cols)
    }

    /// g = G̃C.
    pub fn frame_g(&self, p: PolarPoint) -> LorentzMap {
        self.g_tilde(p) * &self.c
    }

    /// R: o ↦ o/r, ι ↦ rι, t_u − i t_v ↦ e^{iφ}(t_u − i t_v).
    pub fn r_map(&self, p: PolarPoint) -> LorentzMap {
        let mut m = self.space.identity();
        let (s, c) = p.phi.sin_cos();
        m[(minkowski::O, minkowski::O)] = 1.0 / p.r;
        m[(minkowski::IOTA, minkowski::IOTA)] = p.r;
        m[(minkowski::TU, minkowski::TU)] = c;
        m[(minkowski::TV, minkowski::TU)] = s;
        m[(minkowski::TU, minkowski::TV)] = -s;
        m[(minkowski::TV, minkowski::TV)] = c;
        m
    }

    /// F = gR⁻¹, assembled column by column so that the 1/r-sized terms of g cancel analytically.
    pub fn frame_f(&self, p: PolarPoint) -> LorentzMap {
        let pj = self.profile_jet(p.r);
        let (s, c) = p.phi.sin_cos();
        let [h, h1, _, _] = pj.h;
        let l1 = pj.lt[0];
        let (k1, _) = pj.kappa1();
        let x = [h * c, h * s, pj.l];
        let xt = [h1 * c, h1 * s, l1];
        let xv = [-h * s, h * c, 0.0];
        let n = [-l1 * c / h, -l1 * s / h, h1 / h];
        let mut xe = vec![0.0; self.space.n];
        xe[..3].copy_from_slice(&x);
        let fe = minkowski::euclidean_lift(&xe);
        let lxt = lift_tangent(self.space, &x, &xt);
        let lxv = lift_tangent(self.space, &x, &xv);
        let ln = lift_tangent(self.space, &x, &n);
        let d = h - h1;
        let fo = &fe * (p.r / h);
        let fi = (self.space.iota() * h + &fe * (d * d / (2.0 * h * h * h) + 0.5 * h * k1 * k1) + &lxt * (d / (h * h)) + &ln * (h * k1)) / p.r;
        let a = &fe * (d / (h * h)) + &lxt / h;
        let fv = &lxv / h;
        let fu_col = &a * c - &fv * s;
        let fv_col = &a * s + &fv * c;
        let nt = &ln + &fe * k1;
        let mut cols = vec![fo, fi, fu_col, fv_col, nt];
        for k in 5..self.space.dim() {
            cols.push(self.space.basis(k));
        }
        DMatrix::from_columns(&cols)
    }

    /// g(q)y evaluated as F(q)(Ry).
    pub fn apply_g(&self, q: PolarPoint, y: &LightVec) -> LightVec {
        self.frame_f(q) * (self.r_map(q) * y)
    }

    /// The reduced form g⋉λΩ in closed form.
    pub fn reduced_form(&self, lambda: f64) -> ReducedForm {
        ReducedForm { model: self.model.clone(), space: self.space, lambda_eff: self.lambda_eff(lambda), c: self.c.clone(), c_inv: self.c_inv.clone() }
    }

    /// ξ_λ for the spectral parameter λ of the original Q.
    pub fn xi(&self, lambda: f64) -> PurePoleForm {
        let l = self.lambda_eff(lambda);
        let s = self.space;
        build_ppf(s.o() - s.t_u(), s.iota() - s.t_u() * l, s.t_u() - s.o() * l - s.iota(), s.t_v()).expect("ξ_λ is a valid pure pole form")
    }

    /// V± = λo + ι − 2λt_u ± √(1−2λ)(λo − ι), complex when 1 − 2λ < 0.
    pub fn v_pm(&self, lambda: f64) -> (CVec, CVec) {
        let l = self.lambda_eff(lambda);
        let s = self.space;
        let root = Complex64::new(1.0 - 2.0 * l, 0.0).sqrt();
        let base: CVec = (s.o() * l + s.iota() - s.t_u() * (2.0 * l)).map(Complex64::from);
        let d: CVec = (s.o() * l - s.iota()).map(Complex64::from);
        (&base + &d * root, &base - &d * root)
    }

    /// W± = λo + ι − t_u ± √(2λ−1) t_v, complex when 2λ − 1 < 0.
    pub fn w_pm(&self, lambda: f64) -> (CVec, CVec) {
        let l = self.lambda_eff(lambda);
        let s = self.space;
        let root = Complex64::new(2.0 * l - 1.0, 0.0).sqrt();
        let base: CVec = (s.o() * l + s.iota() - s.t_u()).map(Complex64::from);
        let d: CVec = s.t_v().map(Complex64::from);
        (&base + &d * root, &base - &d * root)
    }

    /// Residuals of the frame conditions in the chart z: F o = f_flat, F·½(t_u − i t_v) = ∂_z f_flat,
    /// F ι ⊥ df_flat, and flatness ‖∂_u f_flat‖² = ‖∂_v f_flat‖² = 1, ⟪∂_u f_flat, ∂_v f_flat⟫ = 0.
    pub fn frame_residual(&self, p: PolarPoint) -> Result<f64> {
        let j = surface::jet(self.model.as_ref(), p)?;
        let pj = self.profile_jet(p.r);
        let [h, h1, _, _] = pj.h;
        let mu = p.r / h;
        let z = p.z();
        let mu_z = Complex64::new(mu * (1.0 - h1 / h), 0.0) / (2.0 * z);
        let fc: CVec = j.f.map(Complex64::from);
        let dflat: CVec = &fc * mu_z + &j.fz * Complex64::new(mu, 0.0);
        let flat = &j.f * mu;
        let f = self.frame_f(p);
        let fcx: DMatrix<Complex64> = f.map(Complex64::from);
        let half: CVec = (self.space.t_u().map(Complex64::from) - self.space.t_v().map(|x| Complex64::new(0.0, x))) * Complex64::new(0.5, 0.0);
        let r1 = (&f * self.space.o() - &flat).norm();
        let r2 = (&fcx * half - &dflat).norm();
        let fu: LightVec = dflat.map(|c| 2.0 * c.re);
        let fv: LightVec = dflat.map(|c| -2.0 * c.im);
        let fi = &f * self.space.iota();
        let r3 = inner(&fi, &fu).abs().max(inner(&fi, &fv).abs());
        let r4 = (minkowski::norm2(&fu) - 1.0).abs().max((minkowski::norm2(&fv) - 1.0).abs()).max(inner(&fu, &fv).abs());
        Ok(r1.max(r2).max(r3).max(r4))
    }
}

/// g⋉λΩ for the second-order gauge, evaluated from the profile.
#[derive(Clone)]
pub struct ReducedForm {
    model: Arc<dyn SurfaceModel>,
    space: MinkSpace,
    pub lambda_eff: f64,
    c: LorentzMap,
    c_inv: LorentzMap,
}

impl FormField for ReducedForm {
    fn dim(&self) -> usize {
        self.space.dim()
    }
    fn eval_polar(&self, p: PolarPoint) -> Result<(SkewMap, SkewMap)> {
        if !(p.r > 0.0) {
            return Err(Error::Invalid("reduced form: evaluation at the puncture".into()));
        }
        let pj = self.model.profile().expect("revolution model").jet(p.r.ln());
        let k = ReducedCoefficients::from_jet(&pj);
        let s = self.space;
        let (o, io, tu, tv, n) = (s.o(), s.iota(), s.t_u(), s.t_v(), s.normal(1));
        let at = wedge(&tu, &io) + wedge(&tu, &o) * k.alpha + wedge(&n, &o) * k.c_n;
        let av = wedge(&tv, &io) + wedge(&tv, &o) * k.beta + wedge(&tv, &n) * k.m;
        let pr = wedge(&o, &tu) * self.lambda_eff + at;
        let pp = wedge(&o, &tv) * (-self.lambda_eff) + av;
        Ok((&self.c_inv * pr * &self.c, &self.c_inv * pp * &self.c))
    }
}

/// Transport through the second-order gauge.
#[derive(Clone)]
pub struct GaugedTransport {
    pub data: GaugeData,
    pub lambda: f64,
    pub form: ReducedForm,
}

impl GaugedTransport {
    pub fn new(data: GaugeData, lambda: f64) -> Self {
        let form = data.reduced_form(lambda);
        GaugedTransport { data, lambda, form }
    }
}

impl Transport for GaugedTransport {
    fn dim(&self) -> usize {
        self.data.space.dim()
    }
    fn lambda(&self) -> f64 {
        self.lambda
    }
    fn reduced(&self) -> &dyn FormField {
        &self.form
    }
    fn frame(&self, q: PolarPoint) -> Result<LorentzMap> {
        Ok(self.data.frame_g(q))
    }
    fn reduced_lift(&self, _: PolarPoint) -> Result<LightVec> {
        Ok(self.data.space.o())
    }
    fn surface_point(&self, q: PolarPoint) -> Result<LightVec> {
        Ok(surface::jet_log(self.data.model.as_ref(), q)?.f)
    }
    fn darboux_point(&self, q: PolarPoint, reduced_pq: &LorentzMap, u: &LightVec) -> Result<LightVec> {
        Ok(self.data.apply_g(q, &(adjoint(reduced_pq) * u)))
    }
}

/// Γ_p^s(ξ_λ⋉_p g⋉λΩ) along the radial schedule.
pub fn so_residual_limit(data: &GaugeData, lambda: f64, p: PolarPoint, sched: &Schedule, opts: &IntegrationOptions) -> Result<MatrixLimit> {
    residual_limit(Arc::new(data.reduced_form(lambda)), &data.xi(lambda), p, sched, opts)
}

/// K_λ(p) for 1 − 2λ > 0.
pub fn so_k_map(data: &GaugeData, lambda: f64, p: PolarPoint, sched: &Schedule, opts: &IntegrationOptions) -> Result<VectorLimit> {
    k_map(&data.reduced_form(lambda), &data.xi(lambda), p, sched, opts)
}

/// The limit sphere for 1 − 2λ < 0 and its two excluded points.
#[derive(Clone, Debug, Serialize)]
pub struct SphereDescriptor {
    pub lambda: f64,
    pub base: PolarPoint,
    /// Columns g(p)Γ_p^s(⋉)(o, ι, t_u, t_v).
    #[serde(with = "crate::serial::repr")]
    pub subspace: DMatrix<f64>,
    #[serde(with = "crate::serial::repr")]
    pub w_plus: LightVec,
    #[serde(with = "crate::serial::repr")]
    pub w_minus: LightVec,
    pub residual_error: f64,
    /// Γ_p^s(⋉).
    #[serde(with = "crate::serial::repr")]
    pub limit_map: LorentzMap,
    /// Sample of the limit set on a (arg α, β) grid.
    #[serde(with = "crate::serial::repr")]
    pub samples: Vec<LightVec>,
}

impl SphereDescriptor {
    /// Point S_{λ,p}(q) = g(p)Γ_p^s(⋉)Γ_p^q(ξ_λ)o of the limit set.
    pub fn limit_set_point(&self, data: &GaugeData, q: PolarPoint) -> LightVec {
        let xi = data.xi(self.lambda);
        data.frame_g(self.base) * (&self.limit_map * (polecore::ppf_primitive(&xi, self.base, q) * data.space.o()))
    }
}

/// Limit sphere, W±(λ,p) and a sample of the limit set.
pub fn limit_sphere(data: &GaugeData, lambda: f64, p: PolarPoint, sched: &Schedule, opts: &IntegrationOptions, grid: usize) -> Result<SphereDescriptor> {
    let l = data.lambda_eff(lambda);
    if 1.0 - 2.0 * l >= 0.0 {
        return Err(Error::Invalid("limit_sphere: requires 1 − 2λ < 0".into()));
    }
    let lim = so_residual_limit(data, lambda, p, sched, opts)?;
    let gp = data.frame_g(p);
    let m = &gp * &lim.value;
    let s = data.space;
    let subspace = DMatrix::from_columns(&[&m * s.o(), &m * s.iota(), &m * s.t_u(), &m * s.t_v()]);
    let (wp, wm) = data.w_pm(lambda);
    let wp: LightVec = wp.map(|c| c.re);
    let wm: LightVec = wm.map(|c| c.re);
    let (vp, vm) = data.v_pm(lambda);
    let scale2 = -(inner(&wp, &wm)) / inner_c(&vp, &vm).re;
    let amod = scale2.sqrt();
    let mut samples = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        let a = Complex64::from_polar(amod, std::f64::consts::TAU * i as f64 / grid as f64);
        let va: LightVec = (&vp * a + &vm * a.conj()).map(|c| c.re);
        for j in 0..grid {
            let x = -3.0 + 6.0 * j as f64 / (grid - 1).max(1) as f64;
            let beta = if j % 2 == 0 { x.exp() } else { -x.exp() };
            let y = &va + &wp * beta + &wm / beta;
            samples.push(&m * y);
        }
    }
    Ok(SphereDescriptor {
        lambda,
        base: p,
        subspace,
        w_plus: &m * wp,
        w_minus: &m * wm,
        residual_error: lim.error,
        limit_map: lim.value,
        samples,
    })
}

/// Structured report of the monodromy at a second-order pole.
#[derive(Clone, Debug, Serialize)]
pub struct SoMonodromyReport {
    pub lambda: f64,
    pub regime: String,
    pub base: PolarPoint,
    #[serde(with = "crate::serial::repr")]
    pub monodromy: LorentzMap,
    pub monodromy_error: f64,
    #[serde(with = "crate::serial::repr")]
    pub eigenvalues: Vec<Complex64>,
    #[serde(with = "crate::serial::repr")]
    pub expected_eigenvalues: Vec<Complex64>,
    pub eigenvalue_distance: f64,
    /// ‖𝓜^j − id‖ for the smallest j with j√(1−2λ) ∈ ℕ, when 1−2λ > 0 (else NaN).
    pub periodicity: Option<(usize, f64)>,
    /// max residual ‖𝓜w − μw‖/‖w‖ over the distinguished directions.
    pub eigendirection_residual: f64,
    /// Orthogonal-intersection residual of the invariant sphere with the limiting curvature sphere.
    pub intersection_residual: Option<f64>,
}

/// Eigen-analysis of the loop-integrated monodromy 𝓜_P(λΩ).
pub fn so_monodromy_structure(data: &GaugeData, lambda: f64, p: PolarPoint, sched: &Schedule, opts: &IntegrationOptions) -> Result<SoMonodromyReport> {
    let direct = DirectTransport::new(data.model.clone(), data.q.clone(), lambda);
    let mono = monodromy(direct.reduced(), p, opts)?;
    let m = mono.value.clone();
    let dim = m.nrows();
    let eigenvalues = minkowski::eigenvalues(&m)?;
    let l = data.lambda_eff(lambda);
    let d = 1.0 - 2.0 * l;
    let xi = data.xi(lambda);
    let expected_eigenvalues = minkowski::eigenvalues(&polecore::ppf_monodromy(&xi))?;
    let eigenvalue_distance = {
        let raw = minkowski::multiset_distance(&eigenvalues, &expected_eigenvalues);
        let scale = expected_eigenvalues.iter().map(|z| z.norm()).fold(1.0, f64::max);
        raw / scale
    };
    let id = DMatrix::<f64>::identity(dim, dim);
    let gp = data.frame_g(p);
    let mut periodicity = None;
    let mut intersection_residual = None;
    let eigendirection_residual;
    let regime;
    if d > 0.0 {
        let root = d.sqrt();
        let j = (1..=64).find(|j| ((*j as f64) * root - ((*j as f64) * root).round()).abs() < 1e-9);
        if let Some(j) = j {
            let mut mj = id.clone();
            for _ in 0..j {
                mj = &mj * &m;
            }
            periodicity = Some((j, (mj - &id).norm()));
        }
        let k = so_k_map(data, lambda, p, sched, opts)?;
        let kp = &gp * &k.value;
        // 𝓜·K-invariance.
        eigendirection_residual = (&m * &kp - &kp).norm() / kp.norm();
        if d < 1.0 {
            regime = "minkowski-first-kind".to_string();
            let lim = so_residual_limit(data, lambda, p, sched, opts)?;
            let mm = &gp * &lim.value;
            let (w, _) = data.w_pm(lambda);
            let wr: LightVec = &mm * w.map(|c| c.re);
            let wi: LightVec = &mm * w.map(|c| c.im);
            let s = data.space;
            let normal = &mm * s.normal(1);
            // The sphere normal lies in ⟨Re W, Im W⟩^⊥ and the limit point lies on both spheres.
            let curv = DMatrix::from_columns(&[&mm * s.o(), &mm * s.iota(), &mm * s.t_u(), &mm * s.t_v()]);
            let r = [
                inner(&normal, &wr).abs() / (normal.norm() * wr.norm()),
                inner(&normal, &wi).abs() / (normal.norm() * wi.norm()),
                inner(&kp, &wr).abs() / (kp.norm() * wr.norm()),
                inner(&kp, &wi).abs() / (kp.norm() * wi.norm()),
                super::subspace_distance(&curv, &kp),
            ];
            intersection_residual = Some(r.iter().copied().fold(0.0, f64::max));
        } else {
            regime = "minkowski-second-kind".to_string();
        }
    } else if d < 0.0 {
        regime = "spacelike".to_string();
        let sph = limit_sphere(data, lambda, p, sched, opts, 2)?;
        let root = (-d).sqrt();
        let mp = (-std::f64::consts::TAU * root).exp();
        let res = |w: &LightVec, mu: f64| (&m * w - w * mu).norm() / (w.norm() * mu.max(1.0));
        eigendirection_residual = res(&sph.w_plus, mp).max(res(&sph.w_minus, 1.0 / mp));
    } else {
        regime = "degenerate".to_string();
        eigendirection_residual = f64::NAN;
    }
    Ok(SoMonodromyReport {
        lambda,
        regime,
        base: p,
        monodromy: m,
        monodromy_error: mono.error_estimate,
        eigenvalues,
        expected_eigenvalues,
        eigenvalue_distance,
        periodicity,
        eigendirection_residual,
        intersection_residual,
    })
}

/// Calapso point limit for 0 < 1 − 2λ: the radial sequence and g(p)K_λ(p).
#[derive(Clone, Debug, Serialize)]
pub struct CalapsoPointLimit {
    pub radii: Vec<f64>,
    pub distance_to_limit: Vec<f64>,
    #[serde(with = "crate::serial::repr")]
    pub limit: LightVec,
    pub k_error: f64,
}

pub fn so_calapso_point_limit(data: &GaugeData, lambda: f64, p: PolarPoint, sched: &Schedule, opts: &IntegrationOptions) -> Result<CalapsoPointLimit> {
    let t = GaugedTransport::new(data.clone(), lambda);
    let (radii, pts) = super::calapso_radial(&t, p, sched.k_max, opts)?;
    let k = so_k_map(data, lambda, p, sched, opts)?;
    let limit = data.frame_g(p) * &k.value;
    Ok(CalapsoPointLimit { distance_to_limit: pts.iter().map(|x| pdist(x, &limit)).collect(), radii, limit, k_error: k.error })
}

/// Residual of K(p) = (r(q)/r(p))^ζ Γ_p^q(ψ̂) K(q).
pub fn k_transport_residual(data: &GaugeData, lambda: f64, p: PolarPoint, q: PolarPoint, sched: &Schedule, opts: &IntegrationOptions) -> Result<f64> {
    let xi = data.xi(lambda);
    let (_, _, zeta) = xi.v_pm().ok_or_else(|| Error::Invalid("k transport: ξ_λ is not Minkowski".into()))?;
    let kp = so_k_map(data, lambda, p, sched, opts)?.value;
    let kq = so_k_map(data, lambda, q, sched, opts)?.value;
    let g = primitive(&data.reduced_form(lambda), &PathSpec::radial_then_arc(p, q)?, opts)?.value;
    let rhs = g * kq * (q.r / p.r).powf(zeta);
    Ok((&kp - rhs).norm() / kp.norm())
}

/// Darboux transform with initial point on the limit set (1 − 2λ < 0): two subsequences along
/// the radius through p, one where the reduced point passes ⟨o⟩ and one where it passes ⟨ι⟩.
#[derive(Clone, Debug, Serialize)]
pub struct LimitSetDarboux {
    #[serde(with = "crate::serial::repr")]
    pub init: LightVec,
    pub o_radii: Vec<f64>,
    #[serde(with = "crate::serial::repr")]
    pub o_points: Vec<LightVec>,
    pub iota_radii: Vec<f64>,
    #[serde(with = "crate::serial::repr")]
    pub iota_points: Vec<LightVec>,
    /// ⟨f(s)⟩ and ⟨F(s)ι⟩ (F evaluated at the smallest radius used).
    #[serde(with = "crate::serial::repr")]
    pub f_s: LightVec,
    #[serde(with = "crate::serial::repr")]
    pub f_iota: LightVec,
    pub o_distance: Vec<f64>,
    pub iota_distance: Vec<f64>,
    pub separation: f64,
    /// Max distance of all sampled points to the curvature sphere F(s)⟨o, ι, t_u, t_v⟩.
    pub sphere_distance: f64,
    /// proj_dist between the first ι-point and plain transport of the initial point.
    pub consistency: f64,
}

/// Rotation rate ω of exp(ρ ξ^Re) on its plane for 1 − 2λ < 0.
fn rotation_rate(data: &GaugeData, lambda: f64) -> f64 {
    (2.0 * data.lambda_eff(lambda) - 1.0).sqrt()
}

/// Offset τ_ι ∈ [0, P) with exp(τ_ι ξ^Re)·o ∝ ι, and the amplitude A with
/// o-coefficient of exp(τξ^Re)·o = 2A sin²(ω(τ − τ_ι)/2). The coefficient is
/// c₀ + c₁cos ωτ + c₂sin ωτ and touches zero at its minimum; the trigonometric coefficients
/// are read off from samples so that the tangency is located to rounding accuracy.
fn iota_offset(xi: &PurePoleForm, omega: f64) -> Result<(f64, f64)> {
    let o = LightVec::from_fn(xi.dim(), |i, _| if i == minkowski::O { 1.0 } else { 0.0 });
    let coef = |tau: f64| -> f64 { (minkowski::expm(&(&xi.xi_re * tau)) * &o)[minkowski::O] };
    let q = std::f64::consts::FRAC_PI_2 / omega;
    let (f0, f1, f2, f3) = (coef(0.0), coef(q), coef(2.0 * q), coef(3.0 * q));
    let c0 = 0.5 * (f0 + f2);
    let (c1, c2) = (0.5 * (f0 - f2), f1 - c0);
    let amp = c1.hypot(c2);
    if (f3 - (c0 - c2)).abs() > 1e-10 * amp || (c0 - amp).abs() > 1e-10 * amp {
        return Err(Error::NonConvergence("iota_offset: orbit of o does not touch ⟨ι⟩".into()));
    }
    let theta = (c2.atan2(c1) + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU);
    Ok((theta / omega, amp))
}

/// exp(τξ^Re) with τ reduced modulo the period P of the rotation.
fn xi_re_flow(xi: &PurePoleForm, tau: f64, period: f64) -> LorentzMap {
    minkowski::expm(&(&xi.xi_re * tau.rem_euclid(period)))
}

/// Darboux transform along the radius through p with initial point S(q*) on the limit set.
///
/// q* is placed so that the limiting reduced point Γ_q^{q*}(ξ)o passes ⟨ι⟩ at r(p)/10 and then
/// every period P = 2π/ω in ln r, and passes ⟨o⟩ in between. The reduced point is
/// u(q) = Γ_q^p(ξ)Γ_q^s(⋉)Γ_p^{q*}(ξ)o, with Γ_q^s(⋉) − id integrated directly: at an
/// ι-passage the o-coefficient of u is O(r⁴) and g(q)u lies within O(r) of ⟨F(s)ι⟩, which
/// requires the o-coefficient to absolute accuracy well below r². Radii below `r_min` are
/// not used.
pub fn limit_set_darboux(data: &GaugeData, lambda: f64, p: PolarPoint, sphere: &SphereDescriptor, r_min: f64, opts: &IntegrationOptions) -> Result<LimitSetDarboux> {
    let xi = data.xi(lambda);
    let omega = rotation_rate(data, lambda);
    let period = std::f64::consts::TAU / omega;
    let (tau_iota, amp) = iota_offset(&xi, omega)?;
    let rho_iota0 = (p.r / 10.0).ln();
    let rho_star = rho_iota0 - tau_iota;
    let qstar = PolarPoint::new(rho_star.exp(), p.phi);
    let init = sphere.limit_set_point(data, qstar);
    let s = data.space;
    let gauged = polecore::FirstKindGauge { psi: Arc::new(data.reduced_form(lambda)), ppf: xi.clone(), base: p };
    // Γ_p^{q*}(ξ)o.
    let a0 = xi_re_flow(&xi, p.rho() - rho_star, period) * s.o();
    let reduced = |r: f64| -> Result<LightVec> {
        let q = p.at_radius(r);
        let dev = primitive_deviation(&gauged, &PathSpec::segment(q, q.at_radius(r * 1e-8))?, opts)?.value;
        let back = xi_re_flow(&xi, q.rho() - p.rho(), period);
        let tau = q.rho() - rho_star;
        let mut tilde = xi_re_flow(&xi, tau, period) * s.o();
        tilde[minkowski::O] = 2.0 * amp * (0.5 * omega * (tau - tau_iota)).sin().powi(2);
        Ok(tilde + back * (dev * &a0))
    };
    let radii_in = |start: f64| -> Vec<f64> {
        let mut out = Vec::new();
        let mut rho = start;
        while rho >= p.rho() {
            rho -= period;
        }
        while rho.exp() >= r_min {
            out.push(rho.exp());
            rho -= period;
        }
        out
    };
    let o_radii = radii_in(rho_star);
    let iota_radii = radii_in(rho_iota0);
    let point = |r: f64| -> Result<LightVec> { Ok(data.apply_g(p.at_radius(r), &reduced(r)?)) };
    let o_points = o_radii.iter().map(|&r| point(r)).collect::<Result<Vec<_>>>()?;
    let iota_points = iota_radii.iter().map(|&r| point(r)).collect::<Result<Vec<_>>>()?;
    // Agreement with plain transport of init at the first ι-passage.
    let consistency = match iota_radii.first() {
        Some(&r) => {
            let t = GaugedTransport::new(data.clone(), lambda);
            let q = p.at_radius(r);
            let g = primitive(t.reduced(), &PathSpec::segment(p, q)?, opts)?.value;
            let u0 = adjoint(&data.frame_g(p)) * &init;
            pdist(&t.darboux_point(q, &g, &u0)?, &iota_points[0])
        }
        None => f64::NAN,
    };
    let rmin_used = o_radii.iter().chain(iota_radii.iter()).copied().fold(p.r, f64::min);
    let fs_pt = p.at_radius(rmin_used * 1e-2);
    let f_s = surface::jet_log(data.model.as_ref(), fs_pt)?.f;
    let ff = data.frame_f(fs_pt);
    let f_iota = &ff * s.iota();
    let curv = DMatrix::from_columns(&[&ff * s.o(), &ff * s.iota(), &ff * s.t_u(), &ff * s.t_v()]);
    let sphere_distance = o_points.iter().chain(iota_points.iter()).map(|x| super::subspace_distance(&curv, x)).fold(0.0, f64::max);
    Ok(LimitSetDarboux {
        o_distance: o_points.iter().map(|x| pdist(x, &f_s)).collect(),
        iota_distance: iota_points.iter().map(|x| pdist(x, &f_iota)).collect(),
        separation: pdist(&f_s, &f_iota),
        init,
        o_radii,
        o_points,
        iota_radii,
        iota_points,
        f_s,
        f_iota,
        sphere_distance,
        consistency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{gauge, LorentzField, Scaled};
    use crate::profile::SechProfile;
    use crate::surface::{OmegaField, Revolution};

    fn rev(eps: f64) -> Arc<dyn SurfaceModel> {
        Arc::new(Revolution::new(3, 1.0, Arc::new(SechProfile::new(eps))).unwrap())
    }

    struct GField(GaugeData);
    impl LorentzField for GField {
        fn value(&self, p: PolarPoint) -> Result<LorentzMap> {
            Ok(self.0.frame_g(p))
        }
    }

    #[test]
    fn frame_is_lorentz_and_satisfies_the_frame_conditions() {
        for eps in [0.0, 0.1] {
            let d = so_gauge(rev(eps), &QuadDiff::second_order(1.0.into())).unwrap();
            for &(r, phi) in &[(0.7, 0.3), (0.2, -1.0), (1e-3, 2.0)] {
                let p = PolarPoint::new(r, phi);
                let g = d.g_tilde(p);
                let scale = g.norm().powi(2);
                assert!(minkowski::lorentz_residual(&g) < 1e-12 * scale, "{}", minkowski::lorentz_residual(&g));
                assert!(d.frame_residual(p).unwrap() < 1e-8, "{}", d.frame_residual(p).unwrap());
            }
        }
    }

    #[test]
    fn closed_form_frame_matches_the_product() {
        let d = so_gauge(rev(0.1), &QuadDiff::second_order(1.0.into())).unwrap();
        for &(r, phi) in &[(0.7, 0.3), (0.05, -1.0), (1e-3, 2.0)] {
            let p = PolarPoint::new(r, phi);
            let prod = d.frame_g(p) * adjoint(&d.r_map(p));
            assert!((&prod - d.frame_f(p)).norm() < 1e-9 * prod.norm());
        }
        for &r in &[1e-6, 1e-9] {
            let f = d.frame_f(PolarPoint::new(r, 0.4));
            assert!(minkowski::lorentz_residual(&f) < 1e-6, "{}", minkowski::lorentz_residual(&f));
        }
    }

    #[test]
    fn closed_form_reduced_form_matches_numeric_gauge() {
        let d = so_gauge(rev(0.1), &QuadDiff::second_order(1.0.into())).unwrap();
        let lam = 0.375;
        let om = Arc::new(Scaled::new(lam, Arc::new(OmegaField::new(d.model.clone(), d.q.clone()))));
        let fd = gauge(om, Arc::new(GField(d.clone())));
        let cf = d.reduced_form(lam);
        for &(r, phi) in &[(0.6, 0.4), (0.3, 2.0)] {
            let p = PolarPoint::new(r, phi);
            let (a, b) = fd.eval_polar(p).unwrap();
            let (c, e) = cf.eval_polar(p).unwrap();
            assert!((&a - &c).norm() < 1e-6 && (&b - &e).norm() < 1e-6, "{} {}", (a - c).norm(), (b - e).norm());
        }
    }

    #[test]
    fn sphere_reduced_form_is_the_pure_pole_form() {
        let d = so_gauge(rev(0.0), &QuadDiff::second_order(1.0.into())).unwrap();
        for lam in [0.375, 0.625, -1.5] {
            let xi = d.xi(lam);
            let (a, b) = d.reduced_form(lam).eval_polar(PolarPoint::new(0.4, 1.0)).unwrap();
            assert!((a + &xi.xi_re).norm() < 1e-12 && (b - &xi.xi_im).norm() < 1e-12);
        }
    }

    #[test]
    fn perturbed_difference_is_quadratically_small() {
        let d = so_gauge(rev(0.1), &QuadDiff::second_order(1.0.into())).unwrap();
        let xi = d.xi(0.375);
        let f = d.reduced_form(0.375);
        let s1 = polecore::pole_difference_sup(&f, &xi, 1.0, 1e-3, 2.0).unwrap();
        let s2 = polecore::pole_difference_sup(&f, &xi, 1.0, 1e-8, 2.0).unwrap();
        assert!(s1.is_finite() && s2 <= s1 * 1.01 + 1e-12, "{s1} {s2}");
    }

    #[test]
    fn eigenvectors_of_the_second_order_form() {
        let d = so_gauge(rev(0.1), &QuadDiff::second_order(1.0.into())).unwrap();
        for lam in [0.375, 0.625] {
            let xi = d.xi(lam);
            let (vp, vm) = d.v_pm(lam);
            let (wp, wm) = d.w_pm(lam);
            let re: DMatrix<Complex64> = xi.xi_re.map(Complex64::from);
            let im: DMatrix<Complex64> = xi.xi_im.map(Complex64::from);
            let rv = Complex64::new(1.0 - 2.0 * lam, 0.0).sqrt();
            let rw = Complex64::new(2.0 * lam - 1.0, 0.0).sqrt();
            assert!((&re * &vp - &vp * rv).norm() < 1e-12 && (&re * &vm + &vm * rv).norm() < 1e-12);
            assert!((&im * &wp - &wp * rw).norm() < 1e-12 && (&im * &wm + &wm * rw).norm() < 1e-12);
        }
    }

    #[test]
    fn primitive_matches_the_projector_formula() {
        let d = so_gauge(rev(0.0), &QuadDiff::second_order(1.0.into())).unwrap();
        for lam in [0.375, 0.625] {
            let xi = d.xi(lam);
            let p = PolarPoint::new(0.8, 0.2);
            let q = PolarPoint::new(0.05, 1.7);
            let (vp, vm) = d.v_pm(lam);
            let (wp, wm) = d.w_pm(lam);
            let proj = |a: &CVec, b: &CVec| -> DMatrix<Complex64> { minkowski::outer_star_c(a, b) / inner_c(a, b) };
            let (pvp, pvm, pwp, pwm) = (proj(&vp, &vm), proj(&vm, &vp), proj(&wp, &wm), proj(&wm, &wp));
            let id = DMatrix::<Complex64>::identity(5, 5);
            let rest = &id - &pvp - &pvm - &pwp - &pwm;
            let rv = Complex64::new(1.0 - 2.0 * lam, 0.0).sqrt();
            let rw = Complex64::new(2.0 * lam - 1.0, 0.0).sqrt();
            let ratio = Complex64::new(p.r / q.r, 0.0);
            let dphi = Complex64::new(q.phi - p.phi, 0.0);
            let want = pvp * ratio.powc(rv) + pvm * ratio.powc(-rv) + pwp * (rw * dphi).exp() + pwm * (-rw * dphi).exp() + rest;
            let got = polecore::ppf_primitive(&xi, p, q).map(Complex64::from);
            assert!((got - want).norm() < 1e-10);
        }
    }
}
