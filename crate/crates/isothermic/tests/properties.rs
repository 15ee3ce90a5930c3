//! Property tests of the algebraic layer, pure pole forms and serialization.

use isothermic::connection::PolarPoint;
use isothermic::minkowski::{adjoint, euclidean_lift, exp_skew, inner, lorentz_residual, proj_dist, wedge, LightVec, MinkSpace, SkewMap};
use isothermic::polecore::{build_ppf, ppf_primitive};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use serde::{Deserialize, Serialize};

fn vec5() -> impl Strategy<Value = LightVec> {
    prop::collection::vec(-2.0f64..2.0, 5).prop_map(DVector::from_vec)
}

fn point3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 3)
}

/// A skew map as a combination of wedges of basis vectors.
fn skew() -> impl Strategy<Value = SkewMap> {
    prop::collection::vec(-0.8f64..0.8, 10).prop_map(|c| {
        let s = MinkSpace::new(3).unwrap();
        let mut x = DMatrix::zeros(5, 5);
        let mut k = 0;
        for i in 0..5 {
            for j in i + 1..5 {
                x += wedge(&s.basis(i), &s.basis(j)) * c[k];
                k += 1;
            }
        }
        x
    })
}

proptest! {
    #[test]
    fn wedge_is_skew_and_antisymmetric(v in vec5(), w in vec5()) {
        let a = wedge(&v, &w);
        prop_assert!((&adjoint(&a) + &a).norm() <= 1e-12 * (1.0 + a.norm()));
        prop_assert!((&a + wedge(&w, &v)).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn wedge_acts_by_the_defining_formula(v in vec5(), w in vec5(), x in vec5()) {
        let lhs = wedge(&v, &w) * &x;
        let rhs = &w * inner(&v, &x) - &v * inner(&w, &x);
        prop_assert!((lhs - rhs).norm() <= 1e-11 * (1.0 + v.norm() * w.norm() * x.norm()));
    }

    #[test]
    fn exp_of_skew_is_lorentz_with_inverse_exp_of_minus(x in skew()) {
        let a = exp_skew(&x).unwrap();
        let b = exp_skew(&(-&x)).unwrap();
        let id = DMatrix::<f64>::identity(5, 5);
        prop_assert!(lorentz_residual(&a) <= 1e-10 * a.norm().powi(2));
        prop_assert!((&a * &b - &id).norm() <= 1e-10 * a.norm() * b.norm());
        prop_assert!((adjoint(&a) - b).norm() <= 1e-10 * a.norm());
    }

    #[test]
    fn lorentz_maps_preserve_the_light_cone(x in skew(), p in point3()) {
        let a = exp_skew(&x).unwrap();
        let y = &a * euclidean_lift(&p);
        prop_assert!(inner(&y, &y).abs() <= 1e-10 * y.norm_squared());
    }

    #[test]
    fn proj_dist_is_a_metric_on_lines(a in vec5(), b in vec5(), c in vec5(), k in -5.0f64..5.0) {
        prop_assume!(a.norm() > 1e-3 && b.norm() > 1e-3 && c.norm() > 1e-3 && k.abs() > 1e-3);
        let ab = proj_dist(&a, &b).unwrap();
        prop_assert!((ab - proj_dist(&b, &a).unwrap()).abs() <= 1e-14);
        prop_assert!(proj_dist(&(&a * k), &b).unwrap() - ab <= 1e-12);
        prop_assert!(proj_dist(&a, &(&a * k)).unwrap() <= 1e-12);
        prop_assert!(ab <= proj_dist(&a, &c).unwrap() + proj_dist(&c, &b).unwrap() + 1e-12);
    }

    #[test]
    fn pure_pole_primitives_compose(lambda in -1.0f64..1.0, r in prop::collection::vec(0.05f64..0.9, 3), phi in prop::collection::vec(-3.0f64..3.0, 3)) {
        prop_assume!((1.0 - 2.0 * lambda).abs() > 1e-3);
        let s = MinkSpace::new(3).unwrap();
        let xi = build_ppf(s.o() - s.t_u(), s.iota() - s.t_u() * lambda, s.t_u() - s.o() * lambda - s.iota(), s.t_v()).unwrap();
        let (p, q, w) = (PolarPoint::new(r[0], phi[0]), PolarPoint::new(r[1], phi[1]), PolarPoint::new(r[2], phi[2]));
        let pq = ppf_primitive(&xi, p, q);
        let qw = ppf_primitive(&xi, q, w);
        let pw = ppf_primitive(&xi, p, w);
        prop_assert!((&pq * &qw - &pw).norm() <= 1e-9 * pq.norm() * qw.norm());
    }

    #[test]
    fn pure_pole_primitives_are_conjugation_equivariant(x in skew(), lambda in 0.1f64..0.4) {
        let s = MinkSpace::new(3).unwrap();
        let a = exp_skew(&x).unwrap();
        let v = [s.o() - s.t_u(), s.iota() - s.t_u() * lambda, s.t_u() - s.o() * lambda - s.iota(), s.t_v()];
        let xi = build_ppf(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()).unwrap();
        let xa = build_ppf(&a * &v[0], &a * &v[1], &a * &v[2], &a * &v[3]).unwrap();
        let (p, q) = (PolarPoint::new(0.5, 0.1), PolarPoint::new(0.2, 1.3));
        let lhs = ppf_primitive(&xa, p, q);
        let rhs = &a * ppf_primitive(&xi, p, q) * adjoint(&a);
        prop_assert!((&lhs - &rhs).norm() <= 1e-9 * rhs.norm() * a.norm().powi(2));
    }

    #[test]
    fn json_matrices_round_trip_bitwise(vals in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 12)) {
        #[derive(Serialize, Deserialize)]
        struct M {
            #[serde(with = "isothermic::serial::repr")]
            m: DMatrix<f64>,
        }
        let m = M { m: DMatrix::from_row_slice(3, 4, &vals) };
        let back: M = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        for (a, b) in m.m.iter().zip(back.m.iter()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
