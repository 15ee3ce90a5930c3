//! Chart-parametrized light-cone lifts, their jets, the Hopf differential, the
//! isothermic factorization check and the associated 1-form Ω.
//!
//! Every model lives in R³ ⊂ R^n and is given in a chart z = u + iv with the puncture s at
//! z = 0. Jets are available in the chart z and in the logarithmic chart w = ln z.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::connection::{ChartForm, FormField, PolarPoint};
use crate::error::{Error, Result};
use crate::minkowski::{self, inner, wedge, LightVec, MinkSpace, SkewMap};
use crate::profile::{Profile, ProfileJet};

pub type CVec = DVector<Complex64>;

const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Complex Euclidean 2-jet of a map into R³: x, x_z, x_zz and x_zz̄ for some chart z.
#[derive(Clone, Debug)]
pub struct EuclidJet {
    pub x: [f64; 3],
    pub xz: [Complex64; 3],
    pub xzz: [Complex64; 3],
    pub xzzb: [f64; 3],
}

impl EuclidJet {
    /// Builds the jet from real partial derivatives in (u, v).
    pub fn from_real(
        x: [f64; 3],
        xu: [f64; 3],
        xv: [f64; 3],
        xuu: [f64; 3],
        xuv: [f64; 3],
        xvv: [f64; 3],
    ) -> Self {
        let mut j = EuclidJet { x, xz: [C0; 3], xzz: [C0; 3], xzzb: [0.0; 3] };
        for k in 0..3 {
            j.xz[k] = Complex64::new(0.5 * xu[k], -0.5 * xv[k]);
            j.xzz[k] = Complex64::new(0.25 * (xuu[k] - xvv[k]), -0.5 * xuv[k]);
            j.xzzb[k] = 0.25 * (xuu[k] + xvv[k]);
        }
        j
    }

    /// Real partials (x_u, x_v, x_uu, x_uv, x_vv).
    pub fn real_parts(&self) -> [[f64; 3]; 5] {
        let mut out = [[0.0; 3]; 5];
        for k in 0..3 {
            out[0][k] = 2.0 * self.xz[k].re;
            out[1][k] = -2.0 * self.xz[k].im;
            out[2][k] = 2.0 * self.xzz[k].re + 2.0 * self.xzzb[k];
            out[3][k] = -2.0 * self.xzz[k].im;
            out[4][k] = -2.0 * self.xzz[k].re + 2.0 * self.xzzb[k];
        }
        out
    }

    /// Converts a jet in the chart w = ln z to the chart z at the point z.
    pub fn log_to_z(&self, z: Complex64) -> Self {
        let mut j = self.clone();
        for k in 0..3 {
            j.xz[k] = self.xz[k] / z;
            j.xzz[k] = (self.xzz[k] - self.xz[k]) / (z * z);
            j.xzzb[k] = self.xzzb[k] / z.norm_sqr();
        }
        j
    }

    /// Converts a jet in the chart z to the chart w = ln z at the point z.
    pub fn z_to_log(&self, z: Complex64) -> Self {
        let mut j = self.clone();
        for k in 0..3 {
            j.xz[k] = self.xz[k] * z;
            j.xzz[k] = self.xzz[k] * z * z + self.xz[k] * z;
            j.xzzb[k] = self.xzzb[k] * z.norm_sqr();
        }
        j
    }
}

/// Light-cone 2-jet of the Euclidean lift in some chart.
#[derive(Clone, Debug)]
pub struct SurfaceJet {
    pub f: LightVec,
    pub fz: CVec,
    pub fzb: CVec,
    pub fzz: CVec,
    pub fzzb: CVec,
    pub fzbzb: CVec,
    pub normals: Vec<LightVec>,
    /// ⟪f_z̄, f_z⟫.
    pub conf2: f64,
}

fn lift_c(x: &[f64; 3], y: &[Complex64; 3], dim: usize) -> CVec {
    let mut v = DVector::from_element(dim, C0);
    let mut d = C0;
    for k in 0..3 {
        v[2 + k] = y[k];
        d += y[k] * x[k];
    }
    v[1] = d;
    v
}

fn dot_c(a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

impl SurfaceJet {
    /// Light-cone jet of the Euclidean lift of a Euclidean jet.
    pub fn from_euclid(e: &EuclidJet, space: MinkSpace) -> Result<Self> {
        let dim = space.dim();
        let mut x = vec![0.0; space.n];
        x[..3].copy_from_slice(&e.x);
        let f = minkowski::euclidean_lift(&x);
        let fz = lift_c(&e.x, &e.xz, dim);
        let conj: [Complex64; 3] = [e.xz[0].conj(), e.xz[1].conj(), e.xz[2].conj()];
        let fzb = lift_c(&e.x, &conj, dim);
        let mut fzz = lift_c(&e.x, &e.xzz, dim);
        fzz[1] += dot_c(&e.xz, &e.xz);
        let xzzb_c = [e.xzzb[0].into(), e.xzzb[1].into(), e.xzzb[2].into()];
        let mut fzzb = lift_c(&e.x, &xzzb_c, dim);
        fzzb[1] += dot_c(&e.xz, &conj);
        let fzbzb = fzz.map(|c| c.conj());
        let conf2 = dot_c(&e.xz, &conj).re;
        if !(conf2 > 0.0) {
            return Err(Error::Invalid(format!("non-immersion: conf2 = {conf2:e}")));
        }
        let re = e.real_parts();
        let nv = cross(re[0], re[1]);
        let nn = (nv[0] * nv[0] + nv[1] * nv[1] + nv[2] * nv[2]).sqrt();
        let n = [nv[0] / nn, nv[1] / nn, nv[2] / nn];
        let mut n1 = DVector::zeros(dim);
        for k in 0..3 {
            n1[2 + k] = n[k];
        }
        n1[1] = e.x[0] * n[0] + e.x[1] * n[1] + e.x[2] * n[2];
        let mut normals = vec![n1];
        for k in 5..dim {
            normals.push(space.basis(k));
        }
        Ok(SurfaceJet { f, fz, fzb, fzz, fzzb, fzbzb, normals, conf2 })
    }

    /// Residuals of the jet invariants: |⟪f,f⟫|, |⟪f,f_z⟫|, |⟪f_z,f_z⟫|, normal orthonormality.
    pub fn invariant_residual(&self) -> f64 {
        let mut r = inner(&self.f, &self.f).abs();
        r = r.max(minkowski::inner_c(&self.f.map(Complex64::from), &self.fz).norm());
        r = r.max(minkowski::inner_c(&self.fz, &self.fz).norm() / self.conf2);
        for (i, ni) in self.normals.iter().enumerate() {
            for (j, nj) in self.normals.iter().enumerate() {
                let d = if i == j { 1.0 } else { 0.0 };
                r = r.max((inner(ni, nj) - d).abs());
            }
            r = r.max(inner(ni, &self.f).abs());
            r = r.max(minkowski::inner_c(&ni.map(Complex64::from), &self.fz).norm() / self.conf2.sqrt());
        }
        r
    }
}

/// Meromorphic quadratic differential Q = (c2/z² + c1/z + hol(z)) dz² with polynomial
/// holomorphic remainder hol(z) = Σ hol[k] z^k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadDiff {
    #[serde(with = "crate::serial::repr")]
    pub c2: Complex64,
    #[serde(with = "crate::serial::repr")]
    pub c1: Complex64,
    #[serde(default)]
    #[serde(with = "crate::serial::repr")]
    pub hol: Vec<Complex64>,
}

impl QuadDiff {
    pub fn new(c2: Complex64, c1: Complex64, hol: Vec<Complex64>) -> Self {
        QuadDiff { c2, c1, hol }
    }

    /// Q = c·dz²/z².
    pub fn second_order(c: Complex64) -> Self {
        QuadDiff::new(c, C0, vec![])
    }

    /// Q = c·dz²/z.
    pub fn first_order(c: Complex64) -> Self {
        QuadDiff::new(C0, c, vec![])
    }

    /// Holomorphic Q = hol(z) dz².
    pub fn holomorphic(hol: Vec<Complex64>) -> Self {
        QuadDiff::new(C0, C0, hol)
    }

    pub fn pole_order(&self) -> u8 {
        if self.c2 != C0 {
            2
        } else if self.c1 != C0 {
            1
        } else {
            0
        }
    }

    pub fn hol_at(&self, z: Complex64) -> Complex64 {
        self.hol.iter().rev().fold(C0, |acc, c| acc * z + c)
    }

    /// Coefficient Q_z.
    pub fn qz(&self, z: Complex64) -> Complex64 {
        let mut q = self.hol_at(z);
        if self.c1 != C0 {
            q += self.c1 / z;
        }
        if self.c2 != C0 {
            q += self.c2 / (z * z);
        }
        q
    }

    /// Coefficient in the chart w = ln z: Q_w = z² Q_z.
    pub fn qw(&self, z: Complex64) -> Complex64 {
        self.c2 + self.c1 * z + self.hol_at(z) * z * z
    }

    pub fn scaled(&self, k: f64) -> Self {
        QuadDiff {
            c2: self.c2 * k,
            c1: self.c1 * k,
            hol: self.hol.iter().map(|c| c * k).collect(),
        }
    }

    /// Cauchy–Riemann residual of hol by central differences on a sample grid.
    pub fn cr_residual(&self, r0: f64) -> f64 {
        let h = 1e-5 * r0;
        let mut worst: f64 = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                let rad = r0 * (i as f64 + 0.5) / 8.0;
                let ang = std::f64::consts::TAU * j as f64 / 8.0;
                let z = Complex64::from_polar(rad, ang);
                let du = (self.hol_at(z + h) - self.hol_at(z - h)) / (2.0 * h);
                let dv = (self.hol_at(z + Complex64::new(0.0, h)) - self.hol_at(z - Complex64::new(0.0, h))) / (2.0 * h);
                worst = worst.max((du * Complex64::new(0.0, 1.0) - dv).norm());
            }
        }
        worst
    }

    /// Minimum of |Q_w| on a sample grid of the punctured disc; zero means Q vanishes.
    pub fn min_abs_on_grid(&self, r0: f64) -> f64 {
        let mut m = f64::INFINITY;
        for i in 1..=16 {
            for j in 0..16 {
                let z = Complex64::from_polar(r0 * i as f64 / 16.0, std::f64::consts::TAU * j as f64 / 16.0);
                m = m.min(self.qw(z).norm());
            }
        }
        m
    }
}

/// A surface in a chart on the disc of radius r0 with puncture at z = 0.
pub trait SurfaceModel: Send + Sync {
    fn space(&self) -> MinkSpace;
    fn r0(&self) -> f64;
    fn name(&self) -> String;
    /// Euclidean 2-jet in the chart z at z = a + ib (z = 0 allowed for chart-smooth models).
    fn euclid_jet_z(&self, a: f64, b: f64) -> Result<EuclidJet>;
    /// Euclidean 2-jet in the chart w = ln z at the cover point p.
    fn euclid_jet_log(&self, p: PolarPoint) -> Result<EuclidJet> {
        let z = p.z();
        Ok(self.euclid_jet_z(z.re, z.im)?.z_to_log(z))
    }
    /// Revolution profile, for models in the revolution family.
    fn profile(&self) -> Option<&dyn Profile> {
        None
    }
}

/// Light-cone jet in the chart z.
pub fn jet(model: &dyn SurfaceModel, p: PolarPoint) -> Result<SurfaceJet> {
    if !(p.r > 0.0) || p.r > model.r0() * (1.0 + 1e-12) {
        return Err(Error::Invalid(format!("jet: radius {} outside (0, r0]", p.r)));
    }
    let e = model.euclid_jet_log(p)?.log_to_z(p.z());
    SurfaceJet::from_euclid(&e, model.space())
}

/// Light-cone jet in the chart w = ln z.
pub fn jet_log(model: &dyn SurfaceModel, p: PolarPoint) -> Result<SurfaceJet> {
    if !(p.r > 0.0) || p.r > model.r0() * (1.0 + 1e-12) {
        return Err(Error::Invalid(format!("jet: radius {} outside (0, r0]", p.r)));
    }
    SurfaceJet::from_euclid(&model.euclid_jet_log(p)?, model.space())
}

/// Totally umbilic unit sphere through the inverse stereographic chart
/// x = (2u, 2v, u² + v² − 1)/(1 + u² + v²), so s is the south pole.
#[derive(Clone, Debug)]
pub struct UmbilicSphere {
    pub space: MinkSpace,
    pub r0: f64,
}

impl UmbilicSphere {
    pub fn new(n: usize, r0: f64) -> Result<Self> {
        Ok(UmbilicSphere { space: MinkSpace::new(n)?, r0 })
    }
}

impl SurfaceModel for UmbilicSphere {
    fn space(&self) -> MinkSpace {
        self.space
    }
    fn r0(&self) -> f64 {
        self.r0
    }
    fn name(&self) -> String {
        "umbilic-sphere".into()
    }
    fn euclid_jet_z(&self, a: f64, b: f64) -> Result<EuclidJet> {
        let d = 1.0 + a * a + b * b;
        let p = 1.0 / d;
        let pa = -2.0 * a * p * p;
        let pb = -2.0 * b * p * p;
        let pp3 = p * p * p;
        let paa = -2.0 * p * p + 8.0 * a * a * pp3;
        let pab = 8.0 * a * b * pp3;
        let pbb = -2.0 * p * p + 8.0 * b * b * pp3;
        let x = [2.0 * a * p, 2.0 * b * p, 1.0 - 2.0 * p];
        let xu = [2.0 * p + 2.0 * a * pa, 2.0 * b * pa, -2.0 * pa];
        let xv = [2.0 * a * pb, 2.0 * p + 2.0 * b * pb, -2.0 * pb];
        let xuu = [4.0 * pa + 2.0 * a * paa, 2.0 * b * paa, -2.0 * paa];
        let xuv = [2.0 * pb + 2.0 * a * pab, 2.0 * pa + 2.0 * b * pab, -2.0 * pab];
        let xvv = [2.0 * a * pbb, 4.0 * pb + 2.0 * b * pbb, -2.0 * pbb];
        Ok(EuclidJet::from_real(x, xu, xv, xuu, xuv, xvv))
    }
}

/// Surface of revolution x(t, v) = (h cos v, h sin v, l) with z = e^{t+iv}; the profile
/// determines l by l_t = √(h² − h_t²), so (t, v) are conformal curvature-line coordinates.
#[derive(Clone)]
pub struct Revolution {
    pub space: MinkSpace,
    pub r0: f64,
    pub profile: Arc<dyn Profile>,
}

impl Revolution {
    pub fn new(n: usize, r0: f64, profile: Arc<dyn Profile>) -> Result<Self> {
        Ok(Revolution { space: MinkSpace::new(n)?, r0, profile })
    }

    /// Euclidean log-chart jet from a profile jet at angle v.
    pub fn jet_from_profile(pj: &ProfileJet, v: f64) -> EuclidJet {
        let (s, c) = v.sin_cos();
        let [h, h1, h2, _] = pj.h;
        let [l1, l2, _] = pj.lt;
        let x = [h * c, h * s, pj.l];
        let xt = [h1 * c, h1 * s, l1];
        let xv = [-h * s, h * c, 0.0];
        let xtt = [h2 * c, h2 * s, l2];
        let xtv = [-h1 * s, h1 * c, 0.0];
        let xvv = [-h * c, -h * s, 0.0];
        EuclidJet::from_real(x, xt, xv, xtt, xtv, xvv)
    }
}

impl SurfaceModel for Revolution {
    fn space(&self) -> MinkSpace {
        self.space
    }
    fn r0(&self) -> f64 {
        self.r0
    }
    fn name(&self) -> String {
        format!("revolution-{}", self.profile.name())
    }
    fn euclid_jet_z(&self, a: f64, b: f64) -> Result<EuclidJet> {
        let z = Complex64::new(a, b);
        if z.norm() == 0.0 {
            return Err(Error::Invalid("revolution jet: evaluation at the axis point".into()));
        }
        let p = PolarPoint::new(z.norm(), z.arg());
        Ok(self.euclid_jet_log(p)?.log_to_z(z))
    }
    fn euclid_jet_log(&self, p: PolarPoint) -> Result<EuclidJet> {
        let pj = self.profile.jet(p.r.ln());
        Ok(Revolution::jet_from_profile(&pj, p.phi))
    }
    fn profile(&self) -> Option<&dyn Profile> {
        Some(self.profile.as_ref())
    }
}

/// Closed-form map x(u, v) into R³; derivatives by Richardson-extrapolated central differences.
pub struct EuclideanGraph {
    pub space: MinkSpace,
    pub r0: f64,
    pub label: String,
    pub map: Arc<dyn Fn(f64, f64) -> [f64; 3] + Send + Sync>,
}

impl EuclideanGraph {
    fn fd(&self, a: f64, b: f64, h: f64) -> [[f64; 3]; 5] {
        let m = &self.map;
        let x0 = m(a, b);
        let xp = m(a + h, b);
        let xm = m(a - h, b);
        let yp = m(a, b + h);
        let ym = m(a, b - h);
        let pp = m(a + h, b + h);
        let pm = m(a + h, b - h);
        let mp = m(a - h, b + h);
        let mm = m(a - h, b - h);
        let mut out = [[0.0; 3]; 5];
        for k in 0..3 {
            out[0][k] = (xp[k] - xm[k]) / (2.0 * h);
            out[1][k] = (yp[k] - ym[k]) / (2.0 * h);
            out[2][k] = (xp[k] - 2.0 * x0[k] + xm[k]) / (h * h);
            out[3][k] = (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h);
            out[4][k] = (yp[k] - 2.0 * x0[k] + ym[k]) / (h * h);
        }
        out
    }
}

impl SurfaceModel for EuclideanGraph {
    fn space(&self) -> MinkSpace {
        self.space
    }
    fn r0(&self) -> f64 {
        self.r0
    }
    fn name(&self) -> String {
        self.label.clone()
    }
    fn euclid_jet_z(&self, a: f64, b: f64) -> Result<EuclidJet> {
        let r = (a * a + b * b).sqrt().max(1e-3 * self.r0);
        let h = 1e-2 * r;
        let d1 = self.fd(a, b, h);
        let d2 = self.fd(a, b, 0.5 * h);
        let mut d = [[0.0; 3]; 5];
        for i in 0..5 {
            for k in 0..3 {
                d[i][k] = (4.0 * d2[i][k] - d1[i][k]) / 3.0;
            }
        }
        Ok(EuclidJet::from_real((self.map)(a, b), d[0], d[1], d[2], d[3], d[4]))
    }
}

/// Hopf coefficient ⟪f_zz, N_i⟫ against normal i.
pub fn hopf_coeff(j: &SurfaceJet, i: usize) -> Complex64 {
    minkowski::inner_c(&j.fzz, &j.normals[i].map(Complex64::from))
}

/// Hopf coefficient by −⟪f_z, ∂_z N_i⟫ with ∂_z N computed by central differences in the
/// chart z; used as a consistency check of [`hopf_coeff`].
pub fn hopf_coeff_by_normal(model: &dyn SurfaceModel, p: PolarPoint, i: usize) -> Result<Complex64> {
    let z = p.z();
    let h = 1e-4 * p.r;
    let nat = |dz: Complex64| -> Result<LightVec> {
        let q = z + dz;
        let jq = jet(model, PolarPoint::new(q.norm(), p.phi + (q / z).arg()))?;
        Ok(jq.normals[i].clone())
    };
    let ih = Complex64::new(0.0, h);
    let nu = (nat(h.into())? - nat((-h).into())?) / (2.0 * h);
    let nv = (nat(ih)? - nat(-ih)?) / (2.0 * h);
    let nz: CVec = nu.zip_map(&nv, |a, b| Complex64::new(0.5 * a, -0.5 * b));
    let j = jet(model, p)?;
    Ok(-minkowski::inner_c(&j.fz, &nz))
}

/// Result of [`factorization_check`].
#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    #[serde(with = "crate::serial::repr")]
    pub kappa: Vec<Vec<Complex64>>,
    pub max_residual: f64,
    pub scale: f64,
    pub isothermic: bool,
}

/// Samples κ_i = H_i/Q_z and reports the largest imaginary part relative to the sample scale.
pub fn factorization_check(
    model: &dyn SurfaceModel,
    q: &QuadDiff,
    samples: &[PolarPoint],
) -> Result<FactorizationReport> {
    let mut kappa = Vec::new();
    let mut res: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for p in samples {
        let j = jet(model, *p)?;
        let qz = q.qz(p.z());
        if qz.norm() == 0.0 {
            return Err(Error::Invalid("factorization_check: Q vanishes at a sample".into()));
        }
        let mut ks = Vec::new();
        for i in 0..j.normals.len() {
            let k = hopf_coeff(&j, i) / qz;
            res = res.max(k.im.abs());
            scale = scale.max(k.re.abs());
            ks.push(k);
        }
        kappa.push(ks);
    }
    Ok(FactorizationReport { kappa, max_residual: res, scale, isothermic: res <= 1e-7 * scale })
}

/// The associated 1-form Ω of a polarized surface, Ω^{(1,0)} = f∧f_z̄ Q_z/(2⟪f_z̄,f_z⟫).
#[derive(Clone)]
pub struct OmegaField {
    pub model: Arc<dyn SurfaceModel>,
    pub q: QuadDiff,
}

impl OmegaField {
    pub fn new(model: Arc<dyn SurfaceModel>, q: QuadDiff) -> Self {
        OmegaField { model, q }
    }

    fn split(j: &SurfaceJet, coeff: Complex64) -> (SkewMap, SkewMap) {
        let y: CVec = j.fzb.map(|c| c * coeff / (2.0 * j.conf2));
        let yr = y.map(|c| c.re);
        let yi = y.map(|c| c.im);
        (wedge(&j.f, &yr) * 2.0, wedge(&j.f, &yi) * -2.0)
    }
}

impl FormField for OmegaField {
    fn dim(&self) -> usize {
        self.model.space().dim()
    }
    fn eval_polar(&self, p: PolarPoint) -> Result<(SkewMap, SkewMap)> {
        let j = jet_log(self.model.as_ref(), p)?;
        Ok(Self::split(&j, self.q.qw(p.z())))
    }
}

impl ChartForm for OmegaField {
    fn dim(&self) -> usize {
        self.model.space().dim()
    }
    fn eval_chart(&self, a: f64, b: f64) -> Result<(SkewMap, SkewMap)> {
        let z = Complex64::new(a, b);
        let e = self.model.euclid_jet_z(a, b)?;
        let j = SurfaceJet::from_euclid(&e, self.model.space())?;
        Ok(Self::split(&j, self.q.qz(z)))
    }
}

/// Estimate of |∂_uΩ_v − ∂_vΩ_u| at p in the chart z: central differences with steps h and
/// h/2, Richardson-combined.
pub fn closedness_residual(model: Arc<dyn SurfaceModel>, q: &QuadDiff, p: PolarPoint, h: f64) -> Result<f64> {
    let z = p.z();
    if z.norm() <= 2.0 * h || z.norm() + 2.0 * h > model.r0() {
        return Err(Error::Invalid("closedness_residual: stencil leaves the domain".into()));
    }
    let om = OmegaField::new(model, q.clone());
    let curl = |h: f64| -> Result<SkewMap> {
        let (_, vp) = om.eval_chart(z.re + h, z.im)?;
        let (_, vm) = om.eval_chart(z.re - h, z.im)?;
        let (up, _) = om.eval_chart(z.re, z.im + h)?;
        let (um, _) = om.eval_chart(z.re, z.im - h)?;
        Ok(((vp - vm) - (up - um)) / (2.0 * h))
    };
    let coarse = curl(h)?;
    let fine = curl(0.5 * h)?;
    Ok(((fine * 4.0 - coarse) / 3.0).norm())
}

/// max |Ω − ξ| along radii, both in chart components, for a boundedness check.
pub fn chart_difference_sup(a: &dyn ChartForm, b: &dyn ChartForm, radii: &[f64], angles: &[f64]) -> Result<f64> {
    let mut m: f64 = 0.0;
    for &r in radii {
        for &phi in angles {
            let (au, av) = a.eval_chart(r * phi.cos(), r * phi.sin())?;
            let (bu, bv) = b.eval_chart(r * phi.cos(), r * phi.sin())?;
            m = m.max((au - bu).norm()).max((av - bv).norm());
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::SechProfile;

    fn sphere() -> Arc<dyn SurfaceModel> {
        Arc::new(UmbilicSphere::new(3, 1.0).unwrap())
    }

    fn rev(eps: f64) -> Arc<dyn SurfaceModel> {
        Arc::new(Revolution::new(3, 1.0, Arc::new(SechProfile::new(eps))).unwrap())
    }

    #[test]
    fn jets_are_conformal_null() {
        for m in [sphere(), rev(0.0), rev(0.1)] {
            for &(r, phi) in &[(0.3, 0.2), (0.9, -2.0), (1e-3, 7.0)] {
                let j = jet(m.as_ref(), PolarPoint::new(r, phi)).unwrap();
                assert!(j.invariant_residual() < 1e-9, "{} {}", m.name(), j.invariant_residual());
            }
        }
    }

    #[test]
    fn sech_revolution_is_the_sphere() {
        let a = rev(0.0);
        let b = sphere();
        let p = PolarPoint::new(0.37, 1.1);
        let ja = jet(a.as_ref(), p).unwrap();
        let jb = jet(b.as_ref(), p).unwrap();
        assert!((ja.f - jb.f).norm() < 1e-12);
        assert!((ja.fz - jb.fz).norm() < 1e-12);
        assert!((ja.fzz - jb.fzz).norm() < 1e-11);
        assert!((ja.conf2 - jb.conf2).abs() < 1e-12);
    }

    #[test]
    fn umbilic_sphere_has_zero_hopf() {
        let j = jet(sphere().as_ref(), PolarPoint::new(0.4, 0.3)).unwrap();
        assert!(hopf_coeff(&j, 0).norm() < 1e-13);
    }

    #[test]
    fn hopf_real_in_log_chart_and_consistent() {
        let m = rev(0.1);
        for &(r, phi) in &[(0.5, 0.0), (0.2, 1.3), (0.7, -0.4)] {
            let p = PolarPoint::new(r, phi);
            let j = jet_log(m.as_ref(), p).unwrap();
            let h = hopf_coeff(&j, 0);
            assert!(h.im.abs() < 1e-9 && h.re.abs() > 1e-4);
            let jz = jet(m.as_ref(), p).unwrap();
            let h1 = hopf_coeff(&jz, 0);
            let h2 = hopf_coeff_by_normal(m.as_ref(), p, 0).unwrap();
            assert!((h1 - h2).norm() < 1e-6 * h1.norm().max(1.0), "{h1} {h2}");
        }
    }

    #[test]
    fn factorization_and_negative_control() {
        let samples: Vec<_> = (1..6).flat_map(|i| (0..5).map(move |k| PolarPoint::new(0.18 * i as f64, 1.2 * k as f64))).collect();
        let m = rev(0.1);
        let ok = factorization_check(m.as_ref(), &QuadDiff::second_order(1.0.into()), &samples).unwrap();
        assert!(ok.isothermic, "{}", ok.max_residual);
        let bad = factorization_check(m.as_ref(), &QuadDiff::second_order(Complex64::new(0.0, 1.0)), &samples).unwrap();
        assert!(!bad.isothermic);
        let sph = factorization_check(sphere().as_ref(), &QuadDiff::first_order(1.0.into()), &samples).unwrap();
        assert!(sph.max_residual < 1e-12);
    }

    #[test]
    fn omega_is_closed_only_for_isothermic_pairs() {
        let p = PolarPoint::new(0.5, 0.7);
        let r1 = closedness_residual(sphere(), &QuadDiff::first_order(1.0.into()), p, 1e-3).unwrap();
        assert!(r1 < 1e-5, "{r1}");
        let r2 = closedness_residual(rev(0.1), &QuadDiff::second_order(1.0.into()), p, 1e-3).unwrap();
        assert!(r2 < 1e-5, "{r2}");
        let r3 = closedness_residual(rev(0.1), &QuadDiff::second_order(Complex64::new(0.0, 1.0)), p, 1e-3).unwrap();
        let r4 = closedness_residual(rev(0.1), &QuadDiff::second_order(Complex64::new(0.0, 1.0)), p, 5e-4).unwrap();
        assert!(r3 > 1e-3 && (r3 - r4).abs() < 0.1 * r3, "{r3} {r4}");
    }

    #[test]
    fn omega_skew_and_zero_where_q_vanishes() {
        let om = OmegaField::new(sphere(), QuadDiff::first_order(1.0.into()));
        let (a, b) = om.eval_polar(PolarPoint::new(0.6, 0.1)).unwrap();
        assert!(minkowski::skew_residual(&a) < 1e-12 && minkowski::skew_residual(&b) < 1e-12);
        let om0 = OmegaField::new(sphere(), QuadDiff::holomorphic(vec![0.0.into(), 1.0.into()]));
        let (a, b) = om0.eval_chart(0.0, 0.0).unwrap();
        assert!(a.norm() == 0.0 && b.norm() == 0.0);
    }

    #[test]
    fn fd_chart_matches_closed_form() {
        let g = EuclideanGraph {
            space: MinkSpace::default(),
            r0: 1.0,
            label: "fd-sphere".into(),
            map: Arc::new(|a, b| {
                let d = 1.0 + a * a + b * b;
                [2.0 * a / d, 2.0 * b / d, 1.0 - 2.0 / d]
            }),
        };
        let p = PolarPoint::new(0.5, 0.3);
        let j1 = jet(&g, p).unwrap();
        let j2 = jet(sphere().as_ref(), p).unwrap();
        assert!((j1.fz - j2.fz).norm() < 1e-8);
        assert!((j1.fzz - j2.fzz).norm() < 1e-6);
    }

    #[test]
    fn quad_diff_checks() {
        let q = QuadDiff::new(1.0.into(), 0.0.into(), vec![0.3.into(), Complex64::new(0.0, 0.2)]);
        assert!(q.cr_residual(1.0) < 1e-8);
        assert_eq!(q.pole_order(), 2);
        assert!(q.min_abs_on_grid(1.0) > 0.0);
    }
}
