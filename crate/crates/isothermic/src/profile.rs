//! Profiles of surfaces of revolution: truncated Taylor arithmetic for h(t) and l_t(t), and
//! a cached quadrature for l(t).

use std::ops::{Add, Mul, Sub};

/// Truncated Taylor series c_k = f^{(k)}(t₀)/k!, k = 0..3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor(pub [f64; 4]);

impl Taylor {
    pub fn constant(c: f64) -> Self {
        Taylor([c, 0.0, 0.0, 0.0])
    }

    pub fn scale(self, k: f64) -> Self {
        Taylor(self.0.map(|c| c * k))
    }

    pub fn sqrt(self) -> Self {
        let x = self.0;
        let mut y = [0.0; 4];
        y[0] = x[0].sqrt();
        for k in 1..4 {
            let mut s = x[k];
            for j in 1..k {
                s -= y[j] * y[k - j];
            }
            y[k] = s / (2.0 * y[0]);
        }
        Taylor(y)
    }

    /// Derivatives f, f', f'', f'''.
    pub fn derivatives(self) -> [f64; 4] {
        let c = self.0;
        [c[0], c[1], 2.0 * c[2], 6.0 * c[3]]
    }

    /// Series pair (sech, tanh) at t₀ from the ODEs S' = −ST, T' = 1 − T².
    pub fn sech_tanh(t: f64) -> (Taylor, Taylor) {
        let mut s = [0.0; 4];
        let mut th = [0.0; 4];
        s[0] = 1.0 / t.cosh();
        th[0] = t.tanh();
        for k in 0..3 {
            let mut tt = 0.0;
            let mut st = 0.0;
            for j in 0..=k {
                tt += th[j] * th[k - j];
                st += s[j] * th[k - j];
            }
            let one = if k == 0 { 1.0 } else { 0.0 };
            th[k + 1] = (one - tt) / (k + 1) as f64;
            s[k + 1] = -st / (k + 1) as f64;
        }
        (Taylor(s), Taylor(th))
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(self, o: Taylor) -> Taylor {
        Taylor([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(self, o: Taylor) -> Taylor {
        self + o.scale(-1.0)
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, o: Taylor) -> Taylor {
        let mut c = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Taylor(c)
    }
}

/// Values of a profile at t: h and its first three derivatives, l and l_t with two derivatives.
#[derive(Clone, Copy, Debug)]
pub struct ProfileJet {
    pub t: f64,
    pub h: [f64; 4],
    pub l: f64,
    pub lt: [f64; 3],
}

impl ProfileJet {
    /// Meridian principal curvature (h_t l_tt − h_tt l_t)/h³ and its t-derivative.
    pub fn kappa1(&self) -> (f64, f64) {
        let [h, h1, h2, h3] = self.h;
        let [l1, l2, l3] = self.lt;
        let num = h1 * l2 - h2 * l1;
        let k = num / (h * h * h);
        let dk = (h1 * l3 - h3 * l1) / (h * h * h) - 3.0 * h1 * num / (h * h * h * h);
        (k, dk)
    }

    /// Parallel principal curvature l_t/h².
    pub fn kappa2(&self) -> f64 {
        self.lt[0] / (self.h[0] * self.h[0])
    }

    /// Conformality residual |h_t² + l_t² − h²| relative to h².
    pub fn conformality_residual(&self) -> f64 {
        (self.h[1] * self.h[1] + self.lt[0] * self.lt[0] - self.h[0] * self.h[0]).abs() / (self.h[0] * self.h[0])
    }
}

/// Profile of a surface of revolution meeting the axis as t → −∞.
pub trait Profile: Send + Sync {
    fn name(&self) -> String;
    /// Taylor series of h and of l_t at t.
    fn series(&self, t: f64) -> (Taylor, Taylor);
    /// Height l(t).
    fn l(&self, t: f64) -> f64;
    fn jet(&self, t: f64) -> ProfileJet {
        let (h, lt) = self.series(t);
        let d = lt.derivatives();
        ProfileJet { t, h: h.derivatives(), l: self.l(t), lt: [d[0], d[1], d[2]] }
    }
}

const GL_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    GL_X.iter().zip(GL_W.iter()).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

/// Cumulative quadrature table for l(t) = l_axis + ∫_{−∞}^t l_t.
#[derive(Clone, Debug)]
pub struct HeightTable {
    t_min: f64,
    step: f64,
    cum: Vec<f64>,
    axis: f64,
}

impl HeightTable {
    /// Builds the table on [t_min, t_max] with knot spacing 1/64. Below t_min the integrand is
    /// assumed to decay like e^{2t}, so the tail is l_t(t_min)/2.
    pub fn build(lt: &dyn Fn(f64) -> f64, axis: f64, t_min: f64, t_max: f64) -> Self {
        let step = 1.0 / 64.0;
        let n = ((t_max - t_min) / step).ceil() as usize;
        let mut cum = Vec::with_capacity(n + 1);
        let mut acc = 0.5 * lt(t_min);
        cum.push(acc);
        for k in 0..n {
            let a = t_min + k as f64 * step;
            acc += gauss(lt, a, a + step);
            cum.push(acc);
        }
        HeightTable { t_min, step, cum, axis }
    }

    pub fn eval(&self, lt: &dyn Fn(f64) -> f64, t: f64) -> f64 {
        if t <= self.t_min {
            return self.axis + 0.5 * lt(t);
        }
        let k = (((t - self.t_min) / self.step).floor() as usize).min(self.cum.len() - 1);
        let a = self.t_min + k as f64 * self.step;
        let mut v = self.cum[k];
        let mut lo = a;
        while t - lo > self.step {
            v += gauss(lt, lo, lo + self.step);
            lo += self.step;
        }
        self.axis + v + gauss(lt, lo, t)
    }
}

/// h = sech t·(1 + ε sech² t). For ε = 0 this is the unit sphere, l = tanh t.
///
/// l_t = sech² t·√((1−4ε) + (6ε−8ε²)u + 9ε²u²) with u = sech² t, which equals √(h² − h_t²)
/// without cancellation near the axis.
#[derive(Clone, Debug)]
pub struct SechProfile {
    pub eps: f64,
    table: HeightTable,
}

impl SechProfile {
    pub fn new(eps: f64) -> Self {
        assert!(eps < 0.25, "profile requires ε < 1/4 for h² > h_t² near the axis");
        let lt = move |t: f64| Self::lt_series(eps, t).0[0];
        let table = HeightTable::build(&lt, -1.0, -40.0, 8.0);
        SechProfile { eps, table }
    }

    fn lt_series(eps: f64, t: f64) -> Taylor {
        let (s, _) = Taylor::sech_tanh(t);
        let u = s * s;
        let poly = Taylor::constant(1.0 - 4.0 * eps) + u.scale(6.0 * eps - 8.0 * eps * eps) + (u * u).scale(9.0 * eps * eps);
        u * poly.sqrt()
    }
}

impl Profile for SechProfile {
    fn name(&self) -> String {
        if self.eps == 0.0 {
            "sech".into()
        } else {
            format!("sech-eps{}", self.eps)
        }
    }
    fn series(&self, t: f64) -> (Taylor, Taylor) {
        let (s, _) = Taylor::sech_tanh(t);
        let h = s + (s * s * s).scale(self.eps);
        (h, Self::lt_series(self.eps, t))
    }
    fn l(&self, t: f64) -> f64 {
        let eps = self.eps;
        self.table.eval(&|x| Self::lt_series(eps, x).0[0], t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sech_tanh_series_matches_closed_form() {
        let t = 0.37;
        let (s, th) = Taylor::sech_tanh(t);
        let d = s.derivatives();
        let sc = 1.0 / t.cosh();
        let tn = t.tanh();
        assert!((d[1] + sc * tn).abs() < 1e-15);
        assert!((d[2] - sc * (tn * tn - sc * sc)).abs() < 1e-14);
        assert!((th.derivatives()[1] - sc * sc).abs() < 1e-15);
    }

    #[test]
    fn sphere_profile_height_is_tanh() {
        let p = SechProfile::new(0.0);
        for &t in &[-45.0, -20.0, -3.3, -0.01, 0.0, 0.4] {
            assert!((p.l(t) - f64::tanh(t)).abs() < 1e-13, "{t}");
        }
    }

    #[test]
    fn profiles_are_conformal() {
        for eps in [0.0, 0.1, -0.1] {
            let p = SechProfile::new(eps);
            for &t in &[-30.0, -5.0, -1.0, 0.0] {
                assert!(p.jet(t).conformality_residual() < 1e-9);
            }
        }
    }

    #[test]
    fn curvature_of_the_sphere() {
        let p = SechProfile::new(0.0);
        for &t in &[-25.0, -2.0, 0.0] {
            let j = p.jet(t);
            let (k, dk) = j.kappa1();
            assert!((k - 1.0).abs() < 1e-9 && dk.abs() < 1e-8 && (j.kappa2() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn perturbed_height_derivative_consistent() {
        let p = SechProfile::new(0.1);
        let t = -0.7;
        let h = 1e-4;
        let fd = (p.l(t + h) - p.l(t - h)) / (2.0 * h);
        assert!((fd - p.jet(t).lt[0]).abs() < 1e-8);
    }
}
