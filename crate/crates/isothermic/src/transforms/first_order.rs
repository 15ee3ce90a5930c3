//! Poles of first order: Q = c₁dz²/z + holomorphic. The limiting pure pole form is
//! degenerate, monodromies are parabolic and transforms converge at s at a logarithmic rate.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{DirectTransport, Transport};
use crate::connection::{monodromy, FormField, IntegrationOptions, PolarPoint, Scaled};
use crate::error::{Error, Result};
use crate::minkowski::{self, adjoint, norm2, pdist, wedge, LightVec, LorentzMap};
use crate::polecore::{self, build_ppf, pole_difference_sup, residual_limit, MatrixLimit, PurePoleForm, Schedule};
use crate::surface::{OmegaField, QuadDiff, SurfaceJet, SurfaceModel};

/// Pure pole data of a first-order pole.
#[derive(Clone, Debug)]
pub struct FirstOrderData {
    /// ξ for λ = 1.
    pub ppf: PurePoleForm,
    /// ν = ν_c ∂_z + conj, ν_c = i/c₁.
    pub nu: Complex64,
    /// f(s).
    pub v0: LightVec,
    /// d_sf(ν) and d_sf(iν).
    pub df_nu: LightVec,
    pub df_inu: LightVec,
    /// Sampled sup of |Ω − ξ| in log-polar components on r ∈ [1e−4, r0].
    pub difference_sup: f64,
}

impl FirstOrderData {
    /// ξ^Re = V₀∧W with W = d_sf(iν)/‖d_sf(ν)‖².
    pub fn w(&self) -> LightVec {
        &self.df_inu / norm2(&self.df_nu)
    }
}

/// Limiting pure pole form of λΩ at a first-order pole, ξ^Im = −f(s)∧d_sf(ν)/‖d_sf(ν)‖².
pub fn fo_ppf(model: Arc<dyn SurfaceModel>, q: &QuadDiff) -> Result<FirstOrderData> {
    if q.pole_order() != 1 {
        return Err(Error::Invalid(format!("fo_ppf: pole of order {} instead of 1", q.pole_order())));
    }
    let e = model.euclid_jet_z(0.0, 0.0)?;
    let j = SurfaceJet::from_euclid(&e, model.space())?;
    let nu = Complex64::new(0.0, 1.0) / q.c1;
    let df = |c: Complex64| -> LightVec { j.fz.map(|x| 2.0 * (c * x).re) };
    let df_nu = df(nu);
    let df_inu = df(Complex64::new(0.0, 1.0) * nu);
    let n2 = norm2(&df_nu);
    let v0 = j.f.clone();
    let ppf = build_ppf(v0.clone(), &df_inu / n2, -&v0, &df_nu / n2)?;
    let om = OmegaField::new(model.clone(), q.clone());
    let difference_sup = pole_difference_sup(&om, &ppf, model.r0(), 1e-4, 0.0)?;
    Ok(FirstOrderData { ppf, nu, v0, df_nu, df_inu, difference_sup })
}

/// Numeric residue of Q/⟪∂̄_sf(ν), ∂f⟫ at s by a contour integral of radius `r`.
pub fn nu_residue(model: &dyn SurfaceModel, q: &QuadDiff, nu: Complex64, r: f64) -> Result<Complex64> {
    let e = model.euclid_jet_z(0.0, 0.0)?;
    let js = SurfaceJet::from_euclid(&e, model.space())?;
    // ∂̄_sf(ν) = ν̄ f_z̄(s).
    let dbar = js.fzb.map(|x| x * nu.conj());
    let n = 256;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let phi = std::f64::consts::TAU * k as f64 / n as f64;
        let z = Complex64::from_polar(r, phi);
        let e = model.euclid_jet_z(z.re, z.im)?;
        let j = SurfaceJet::from_euclid(&e, model.space())?;
        let den = minkowski::inner_c(&dbar, &j.fz);
        acc += q.qz(z) / den * z;
    }
    Ok(acc / n as f64)
}

/// Report of the parabolic monodromy structure at a first-order pole.
#[derive(Clone, Debug, Serialize)]
pub struct FoMonodromyReport {
    pub lambda: f64,
    pub base: PolarPoint,
    #[serde(with = "crate::serial::repr")]
    pub monodromy: LorentzMap,
    pub monodromy_error: f64,
    /// ‖(𝓜 − id)³‖ and ‖(𝓜 − id)²‖.
    pub cube_norm: f64,
    pub square_norm: f64,
    pub parabolic: bool,
    /// Null direction spanning the image of (𝓜 − id)².
    #[serde(with = "crate::serial::repr")]
    pub invariant_direction: LightVec,
    /// ⟨f_{λ,p}(s)⟩ = Γ_p^s(λξ⋉_pλΩ)·f(s).
    #[serde(with = "crate::serial::repr")]
    pub calapso_limit: LightVec,
    pub calapso_limit_error: f64,
    pub invariant_vs_limit: f64,
    /// ‖𝓜 − Γ_p^s 𝓜(λξ) Γ_s^p‖ relative to ‖𝓜‖.
    pub factorization_residual: f64,
    /// c in log 𝓜 = 2πc·Γ_p^s (f(s)∧y) Γ_s^p, y = d_sf(ν)/‖d_sf(ν)‖²; equals λ.
    pub nilpotent_coefficient: f64,
    pub coefficient_residual: f64,
}

/// Limit Γ_p^s(λξ⋉_pλΩ) for a first-order pole.
pub fn fo_residual_limit(model: Arc<dyn SurfaceModel>, q: &QuadDiff, data: &FirstOrderData, lambda: f64, p: PolarPoint, sched: &Schedule, opts: &IntegrationOptions) -> Result<MatrixLimit> {
    let form: Arc<dyn FormField> = Arc::new(Scaled::new(lambda, Arc::new(OmegaField::new(model, q.clone()))));
    residual_limit(form, &data.ppf.scaled(lambda), p, sched, opts)
}

/// Loop-integrated monodromy and its parabolic structure.
pub fn fo_monodromy_structure(model: Arc<dyn SurfaceModel>, q: &QuadDiff, lambda: f64, p: PolarPoint, sched: &Schedule, opts: &IntegrationOptions) -> Result<FoMonodromyReport> {
    let data = fo_ppf(model.clone(), q)?;
    let t = DirectTransport::new(model.clone(), q.clone(), lambda);
    let mono = monodromy(t.reduced(), p, opts)?;
    let m = mono.value.clone();
    let dim = m.nrows();
    let id = DMatrix::<f64>::identity(dim, dim);
    let a = &m - &id;
    let a2 = &a * &a;
    let a3 = &a2 * &a;
    let cube_norm = a3.norm();
    let square_norm = a2.norm();
    let invariant_direction = minkowski::dominant_direction(&a2);
    let lim = fo_residual_limit(model, q, &data, lambda, p, sched, opts)?;
    let gs = &lim.value;
    let calapso_limit = gs * &data.v0;
    let gsi = adjoint(gs);
    let fact = gs * polecore::ppf_monodromy(&data.ppf.scaled(lambda)) * &gsi;
    let factorization_residual = (&m - fact).norm() / m.norm().max(1.0);
    let log_m = &a - &a2 * 0.5;
    let y = &data.df_nu / norm2(&data.df_nu);
    let basis = gs * wedge(&data.v0, &y) * &gsi;
    let c = log_m.dot(&basis) / basis.norm_squared() / std::f64::consts::TAU;
    let coefficient_residual = (&log_m - &basis * (std::f64::consts::TAU * c)).norm() / log_m.norm().max(1e-300);
    Ok(FoMonodromyReport {
        lambda,
        base: p,
        monodromy: m,
        monodromy_error: mono.error_estimate,
        cube_norm,
        square_norm,
        parabolic: cube_norm <= 1e-6 && square_norm >= 1e-3,
        invariant_vs_limit: pdist(&invariant_direction, &calapso_limit),
        invariant_direction,
        calapso_limit,
        calapso_limit_error: lim.error,
        factorization_residual,
        nilpotent_coefficient: c,
        coefficient_residual,
    })
}

/// Limit direction of a sequence of lifts x_k that grows like a quadratic polynomial in
/// τ = ln r on an equally spaced τ schedule: the second difference of the last three terms.
/// Returns the direction and the proj_dist between the estimates from the last two triples.
pub fn quadratic_tau_limit(lifts: &[LightVec]) -> Result<(LightVec, f64)> {
    let n = lifts.len();
    if n < 4 {
        return Err(Error::Invalid("quadratic_tau_limit: need at least 4 terms".into()));
    }
    let d2 = |k: usize| -> LightVec { &lifts[k] - &lifts[k - 1] * 2.0 + &lifts[k - 2] };
    let a = d2(n - 1);
    let b = d2(n - 2);
    if a.norm() == 0.0 {
        return Err(Error::NonConvergence("quadratic_tau_limit: vanishing second difference".into()));
    }
    Ok((a.clone(), pdist(&a, &b)))
}

/// Darboux limit report at a first-order pole.
#[derive(Clone, Debug, Serialize)]
pub struct FoDarbouxLimit {
    pub radii: Vec<f64>,
    /// proj_dist(f̂(r_k), ⟨f(s)⟩).
    pub raw_distance: Vec<f64>,
    /// Limit estimate from the last three terms and its proj_dist to ⟨f(s)⟩.
    #[serde(with = "crate::serial::repr")]
    pub limit: LightVec,
    pub limit_distance: f64,
    pub limit_error: f64,
}

/// Darboux transform along the radial schedule to k_max with the τ-quadratic limit estimate.
pub fn fo_darboux_limit(model: Arc<dyn SurfaceModel>, q: &QuadDiff, lambda: f64, p: PolarPoint, init: &LightVec, k_max: usize, opts: &IntegrationOptions) -> Result<FoDarbouxLimit> {
    let data = fo_ppf(model.clone(), q)?;
    let t = DirectTransport::new(model, q.clone(), lambda);
    let (radii, pts) = super::darboux_radial(&t, p, init, k_max, opts)?;
    let raw_distance = pts.iter().map(|x| pdist(x, &data.v0)).collect();
    let (limit, limit_error) = quadratic_tau_limit(&pts)?;
    Ok(FoDarbouxLimit { radii, raw_distance, limit_distance: pdist(&limit, &data.v0), limit, limit_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polecore::{classify, Signature};
    use crate::surface::UmbilicSphere;

    fn sphere() -> Arc<dyn SurfaceModel> {
        Arc::new(UmbilicSphere::new(3, 1.0).unwrap())
    }

    #[test]
    fn nu_for_imaginary_residue() {
        let q = QuadDiff::first_order(Complex64::new(0.0, 1.0));
        let d = fo_ppf(sphere(), &q).unwrap();
        assert!((d.nu - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let res = nu_residue(sphere().as_ref(), &q, d.nu, 1e-3).unwrap();
        let want = Complex64::new(0.0, 2.0) / norm2(&d.df_nu);
        assert!((res - want).norm() < 1e-3 * want.norm(), "{res} {want}");
        assert_eq!(classify(&d.ppf).unwrap().span_signature, Signature::Degenerate);
        assert!(d.difference_sup.is_finite() && d.difference_sup < 10.0);
    }

    #[test]
    fn monodromy_of_the_scaled_form_is_the_unipotent_polynomial() {
        let q = QuadDiff::first_order(Complex64::new(0.7, 0.4));
        let d = fo_ppf(sphere(), &q).unwrap();
        let lam = 0.3;
        let m = polecore::ppf_monodromy(&d.ppf.scaled(lam));
        let n2 = norm2(&d.df_nu);
        let want = DMatrix::identity(5, 5) + wedge(&d.v0, &d.df_nu) * (std::f64::consts::TAU * lam / n2)
            - minkowski::outer_star(&d.v0, &d.v0) * ((std::f64::consts::TAU * lam).powi(2) / 2.0 / n2);
        assert!((m - want).norm() < 1e-12);
    }

    #[test]
    fn quadratic_limit_of_a_polynomial_sequence() {
        let a = LightVec::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let b = LightVec::from_vec(vec![0.0, 1.0, 2.0, 0.0, 0.0]);
        let lifts: Vec<LightVec> = (0..6).map(|k| {
            let t = -(k as f64) * 2f64.ln();
            &a * (t * t) + &b * t
        }).collect();
        let (dir, err) = quadratic_tau_limit(&lifts).unwrap();
        assert!(pdist(&dir, &a) < 1e-12 && err < 1e-12);
    }
}
