//! Linear algebra of Minkowski space R^{n+2}_1, the Lorentz group and its Lie algebra.
//!
//! Basis order is (o, ι, t_u, t_v, n_1, ...) with ⟪o,ι⟫ = −1, ⟪o,o⟫ = ⟪ι,ι⟫ = 0 and the
//! remaining vectors orthonormal. Vectors are `DVector<f64>`, maps are `DMatrix<f64>`.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Vector of R^{n+2}_1.
pub type LightVec = DVector<f64>;
/// Element of the Lie algebra o(R^{n+2}_1).
pub type SkewMap = DMatrix<f64>;
/// Orthochronous Lorentz transformation.
pub type LorentzMap = DMatrix<f64>;

/// Index of o in the basis.
pub const O: usize = 0;
/// Index of ι in the basis.
pub const IOTA: usize = 1;
/// Index of t_u in the basis.
pub const TU: usize = 2;
/// Index of t_v in the basis.
pub const TV: usize = 3;
/// Index of n_1 in the basis.
pub const N1: usize = 4;

/// Minkowski space R^{n+2}_1 for the conformal n-sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinkSpace {
    pub n: usize,
}

impl Default for MinkSpace {
    fn default() -> Self {
        MinkSpace { n: 3 }
    }
}

impl MinkSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Invalid(format!("ambient sphere dimension n = {n} < 3")));
        }
        Ok(MinkSpace { n })
    }

    pub fn dim(&self) -> usize {
        self.n + 2
    }

    pub fn basis(&self, i: usize) -> LightVec {
        let mut v = DVector::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    pub fn o(&self) -> LightVec {
        self.basis(O)
    }

    pub fn iota(&self) -> LightVec {
        self.basis(IOTA)
    }

    pub fn t_u(&self) -> LightVec {
        self.basis(TU)
    }

    pub fn t_v(&self) -> LightVec {
        self.basis(TV)
    }

    /// Normal basis vector n_k, k starting at 1.
    pub fn normal(&self, k: usize) -> LightVec {
        self.basis(N1 + k - 1)
    }

    pub fn gram(&self) -> DMatrix<f64> {
        gram(self.dim())
    }

    pub fn identity(&self) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim())
    }

    pub fn zero_map(&self) -> DMatrix<f64> {
        DMatrix::zeros(self.dim(), self.dim())
    }

    /// Basis labels in order.
    pub fn labels(&self) -> Vec<String> {
        let mut l = vec!["o".to_string(), "iota".into(), "t_u".into(), "t_v".into()];
        for k in 1..=self.n - 2 {
            l.push(format!("n_{k}"));
        }
        l
    }
}

/// Gram matrix of the basis in dimension `dim`.
pub fn gram(dim: usize) -> DMatrix<f64> {
    let mut g = DMatrix::identity(dim, dim);
    g[(0, 0)] = 0.0;
    g[(1, 1)] = 0.0;
    g[(0, 1)] = -1.0;
    g[(1, 0)] = -1.0;
    g
}

/// Applies the Gram matrix: returns G·v.
fn lower(v: &LightVec) -> LightVec {
    let mut w = v.clone();
    w[0] = -v[1];
    w[1] = -v[0];
    w
}

/// Minkowski inner product ⟪v,w⟫.
pub fn inner(v: &LightVec, w: &LightVec) -> f64 {
    assert_eq!(v.len(), w.len(), "dimension mismatch");
    let mut s = -v[0] * w[1] - v[1] * w[0];
    for i in 2..v.len() {
        s += v[i] * w[i];
    }
    s
}

/// Minkowski square norm ⟪v,v⟫.
pub fn norm2(v: &LightVec) -> f64 {
    inner(v, v)
}

/// Inner product of complex vectors, bilinear (no conjugation).
pub fn inner_c(v: &DVector<Complex64>, w: &DVector<Complex64>) -> Complex64 {
    assert_eq!(v.len(), w.len(), "dimension mismatch");
    let mut s = -v[0] * w[1] - v[1] * w[0];
    for i in 2..v.len() {
        s += v[i] * w[i];
    }
    s
}

/// The skew map x ↦ ⟪v,x⟫w − ⟪w,x⟫v.
pub fn wedge(v: &LightVec, w: &LightVec) -> SkewMap {
    let vl = lower(v);
    let wl = lower(w);
    w * vl.transpose() - v * wl.transpose()
}

/// The rank one map x ↦ ⟪y,x⟫ v, written v y*.
pub fn outer_star(v: &LightVec, y: &LightVec) -> DMatrix<f64> {
    v * lower(y).transpose()
}

/// Complex version of [`outer_star`].
pub fn outer_star_c(v: &DVector<Complex64>, y: &DVector<Complex64>) -> DMatrix<Complex64> {
    let mut yl = y.clone();
    yl[0] = -y[1];
    yl[1] = -y[0];
    v * yl.transpose()
}

/// Minkowski adjoint A* = G Aᵀ G.
pub fn adjoint(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut t = a.transpose();
    t.swap_rows(0, 1);
    t.swap_columns(0, 1);
    t.row_mut(0).neg_mut();
    t.row_mut(1).neg_mut();
    t.column_mut(0).neg_mut();
    t.column_mut(1).neg_mut();
    t
}

/// Frobenius norm.
pub fn frob(a: &DMatrix<f64>) -> f64 {
    a.norm()
}

/// Skewness residual ‖A* + A‖.
pub fn skew_residual(a: &DMatrix<f64>) -> f64 {
    (adjoint(a) + a).norm()
}

/// Lorentz residual ‖A* A − id‖.
pub fn lorentz_residual(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    (adjoint(a) * a - DMatrix::identity(n, n)).norm()
}

/// Whether A maps the future light cone to itself: ⟪A(o+ι), o+ι⟫ < 0.
pub fn is_orthochronous(a: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    let mut e = DVector::zeros(n);
    e[0] = 1.0;
    e[1] = 1.0;
    inner(&(a * &e), &e) < 0.0
}

/// Exponential of a skew map by scaling and squaring with a 13-term Taylor series.
pub fn exp_skew(x: &SkewMap) -> Result<LorentzMap> {
    let scale = x.norm().max(1.0);
    if skew_residual(x) > 1e-10 * scale {
        return Err(Error::Invalid(format!(
            "exp_skew: input is not skew (residual {:.3e})",
            skew_residual(x)
        )));
    }
    Ok(expm(x))
}

/// Dense matrix exponential (no skewness check).
pub fn expm(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let nrm = x.norm();
    let mut s = 0;
    if nrm > 0.5 {
        s = (nrm / 0.5).log2().ceil() as i32;
    }
    let xs = x / 2f64.powi(s);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=13 {
        term = &term * &xs / k as f64;
        result += &term;
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Projects the columns of a near-Lorentz map back onto the group.
///
/// Spacelike columns are orthonormalized first in basis order; the o and ι columns are
/// then projected off them and re-paired into a null pair with ⟪o',ι'⟫ = −1. Maps with
/// ‖A‖² > 1e6 are returned unchanged: for strong boosts the Minkowski inner products lose
/// more digits to cancellation than the projection would recover.
pub fn reorthonormalize(a: &DMatrix<f64>) -> Result<LorentzMap> {
    let dim = a.nrows();
    let scale = a.norm_squared().max(1.0);
    if scale > 1e6 {
        return Ok(a.clone());
    }
    let res = lorentz_residual(a);
    if res > 1e-3 * scale {
        return Err(Error::Invalid(format!(
            "reorthonormalize: input too far from the Lorentz group (residual {res:.3e})"
        )));
    }
    let mut cols: Vec<LightVec> = (0..dim).map(|j| a.column(j).into_owned()).collect();
    for j in 2..dim {
        let mut c = cols[j].clone();
        for k in 2..j {
            let p = inner(&c, &cols[k]);
            c -= &cols[k] * p;
        }
        let nn = norm2(&c);
        if nn <= 0.5 {
            return Err(Error::Invalid("reorthonormalize: pivot breakdown".into()));
        }
        cols[j] = c / nn.sqrt();
    }
    let mut c_o = cols[0].clone();
    let mut c_i = cols[1].clone();
    for k in 2..dim {
        let po = inner(&c_o, &cols[k]);
        let pi = inner(&c_i, &cols[k]);
        c_o -= &cols[k] * po;
        c_i -= &cols[k] * pi;
    }
    let sq = std::f64::consts::FRAC_1_SQRT_2;
    let mut t = (&c_o + &c_i) * sq;
    let mut s = (&c_o - &c_i) * sq;
    let tt = norm2(&t);
    if tt >= -0.5 {
        return Err(Error::Invalid("reorthonormalize: null pair breakdown".into()));
    }
    t /= (-tt).sqrt();
    let st = inner(&s, &t);
    s += &t * st;
    let ss = norm2(&s);
    if ss <= 0.5 {
        return Err(Error::Invalid("reorthonormalize: null pair breakdown".into()));
    }
    s /= ss.sqrt();
    cols[0] = (&t + &s) * sq;
    cols[1] = (&t - &s) * sq;
    Ok(DMatrix::from_columns(&cols))
}

/// Chordal distance between projective points, using unit Euclidean representatives.
pub fn proj_dist(a: &LightVec, b: &LightVec) -> Result<f64> {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 || !na.is_finite() || !nb.is_finite() {
        return Err(Error::Invalid("proj_dist: zero or non-finite representative".into()));
    }
    let ua = a / na;
    let ub = b / nb;
    Ok((&ua - &ub).norm().min((&ua + &ub).norm()))
}

/// [`proj_dist`] that panics on degenerate input; for internal use on known-good vectors.
pub fn pdist(a: &LightVec, b: &LightVec) -> f64 {
    proj_dist(a, b).expect("degenerate projective point")
}

/// Euclidean lift o + x + ½|x|²ι of a point x of R^n.
pub fn euclidean_lift(x: &[f64]) -> LightVec {
    let dim = x.len() + 2;
    let mut v = DVector::zeros(dim);
    v[0] = 1.0;
    let mut s = 0.0;
    for (i, xi) in x.iter().enumerate() {
        v[2 + i] = *xi;
        s += xi * xi;
    }
    v[1] = 0.5 * s;
    v
}

/// Inverse of [`euclidean_lift`] after scaling the o-coefficient to 1.
pub fn affine_point(y: &LightVec) -> Result<Vec<f64>> {
    let c = -inner(y, &{
        let mut i = DVector::zeros(y.len());
        i[1] = 1.0;
        i
    });
    if c.abs() <= 1e-14 * y.norm() {
        return Err(Error::Invalid("affine_point: point at infinity".into()));
    }
    Ok((2..y.len()).map(|i| y[i] / c).collect())
}

/// One eigenpair of a real square map.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: DVector<Complex64>,
}

/// Full complex spectrum with eigenvectors, sorted by modulus then argument.
///
/// Eigenvalues come from the complex Schur form; eigenvectors by back substitution in the
/// triangular factor.
pub fn eig(a: &DMatrix<f64>) -> Result<Vec<EigenPair>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Invalid("eig: non-square input".into()));
    }
    let ac: DMatrix<Complex64> = a.map(|x| Complex64::new(x, 0.0));
    // Clustered spectra (e.g. a double −1) may stall at the strictest deflation threshold.
    let schur = [1e-15, 1e-14, 1e-13, 1e-12]
        .iter()
        .find_map(|&eps| Schur::try_new(ac.clone(), eps, 10_000))
        .ok_or_else(|| Error::NonConvergence("eig: Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let scale = t.norm().max(1e-300);
    let tiny = 1e-14 * scale;
    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let mu = t[(k, k)];
        let mut y = DVector::from_element(n, Complex64::new(0.0, 0.0));
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - mu;
            if d.norm() < tiny {
                d = Complex64::new(tiny, 0.0);
            }
            y[i] = -s / d;
        }
        let mut v = &q * y;
        let nv = v.norm();
        v /= Complex64::new(nv, 0.0);
        pairs.push(EigenPair { value: mu, vector: v });
    }
    pairs.sort_by(|a, b| {
        let ka = (a.value.norm(), a.value.arg());
        let kb = (b.value.norm(), b.value.arg());
        ka.0.partial_cmp(&kb.0)
            .unwrap()
            .then(ka.1.partial_cmp(&kb.1).unwrap())
    });
    Ok(pairs)
}

/// Eigenvalues only, sorted as in [`eig`].
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    Ok(eig(a)?.into_iter().map(|p| p.value).collect())
}

/// Distance between two eigenvalue multisets by optimal matching (small sizes only).
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut used = vec![false; n];
    fn go(a: &[Complex64], b: &[Complex64], i: usize, used: &mut [bool], best: &mut f64, cur: f64) {
        if cur >= *best {
            return;
        }
        if i == a.len() {
            *best = cur;
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                let d = (a[i] - b[j]).norm();
                go(a, b, i + 1, used, best, cur.max(d));
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(a, b, 0, &mut used, &mut best, 0.0);
    best
}

/// Singular values of a real matrix, descending.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Dominant left singular vector of a real matrix.
pub fn dominant_direction(a: &DMatrix<f64>) -> LightVec {
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("svd u");
    let (imax, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
    u.column(imax).into_owned()
}
