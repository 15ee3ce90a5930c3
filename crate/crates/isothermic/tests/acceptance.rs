//! Acceptance checks: one pass/fail line per criterion.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;
use std::time::Instant;

use isothermic::connection::{monodromy, primitive, primitive_fixed, IntegrationOptions, PathSpec, PolarPoint};
use isothermic::minkowski::{self, adjoint, euclidean_lift, exp_skew, pdist, wedge, LightVec, MinkSpace};
use isothermic::polecore::{build_ppf, ppf_monodromy, ppf_primitive, PurePoleForm, Schedule};
use isothermic::profile::SechProfile;
use isothermic::surface::{QuadDiff, Revolution, SurfaceModel, UmbilicSphere};
use isothermic::transforms::first_order::{fo_darboux_limit, fo_monodromy_structure, fo_ppf, fo_residual_limit};
use isothermic::transforms::pushforward::{pushforward_check, TransformKind, Verdict};
use isothermic::transforms::second_order::{
    k_transport_residual, limit_set_darboux, limit_sphere, so_calapso_point_limit, so_gauge, so_monodromy_structure, GaugedTransport,
};
use isothermic::transforms::zero_case::zero_case_smoke;
use isothermic::transforms::{calapso, calapso_radial, darboux, darboux_radial, limit_study, DirectTransport, GridSpec, Transport};
use isothermic::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String)>;

fn revolution(eps: f64) -> Arc<dyn SurfaceModel> {
    Arc::new(Revolution::new(3, 1.0, Arc::new(SechProfile::new(eps))).unwrap())
}

fn sphere() -> Arc<dyn SurfaceModel> {
    Arc::new(UmbilicSphere::new(3, 1.0).unwrap())
}

fn random_null(rng: &mut ChaCha8Rng) -> LightVec {
    let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.5..1.5)).collect();
    euclidean_lift(&x)
}

fn random_point(rng: &mut ChaCha8Rng, r_lo: f64, r_hi: f64) -> PolarPoint {
    PolarPoint::new((rng.gen_range(r_lo.ln()..r_hi.ln())).exp(), rng.gen_range(-3.0..3.0))
}

fn xi_lambda(s: MinkSpace, l: f64) -> PurePoleForm {
    build_ppf(s.o() - s.t_u(), s.iota() - s.t_u() * l, s.t_u() - s.o() * l - s.iota(), s.t_v()).unwrap()
}

fn random_ppf(rng: &mut ChaCha8Rng) -> PurePoleForm {
    let s = MinkSpace::default();
    let l = rng.gen_range(-1.5..1.5);
    let base = xi_lambda(s, l);
    let mut x = s.zero_map();
    for i in 0..5 {
        for j in 0..i {
            let v = s.basis(i);
            let w = s.basis(j);
            x += wedge(&v, &w) * rng.gen_range(-0.4..0.4);
        }
    }
    let g = exp_skew(&x).unwrap();
    build_ppf(&g * &base.v, &g * &base.w, &g * &base.x, &g * &base.y).unwrap()
}

fn criterion_1() -> Outcome {
    let model = revolution(0.1);
    let q = QuadDiff::second_order(1.0.into());
    let opts = IntegrationOptions::default().with_tol(1e-11);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for lam in [-0.2, 0.2, 0.375, 0.625] {
        let t = DirectTransport::new(model.clone(), q.clone(), lam);
        for _ in 0..20 {
            let p = random_point(&mut rng, 0.05, 0.9);
            let qq = random_point(&mut rng, 0.05, 0.9);
            let mid = random_point(&mut rng, 0.05, 0.9);
            let a = primitive(t.reduced(), &PathSpec::radial_then_arc(p, qq)?, &opts)?.value;
            let b = primitive(t.reduced(), &PathSpec::new(vec![p, mid, PolarPoint::new(p.r, qq.phi), qq])?, &opts)?.value;
            worst = worst.max((&a - &b).norm());
            scale = scale.max(a.norm());
        }
    }
    Ok((worst <= 1e-7, format!("max primitive discrepancy {worst:.2e} over 80 homotopic pairs (tol 1e-7), max ‖Γ‖ {scale:.1e}")))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let opts = IntegrationOptions::default();
    let mut worst: f64 = 0.0;
    let mut orders = Vec::new();
    for _ in 0..10 {
        let ppf = random_ppf(&mut rng);
        let pts: Vec<PolarPoint> = (0..4).map(|_| random_point(&mut rng, 0.01, 1.0)).collect();
        let path = PathSpec::new(pts.clone())?;
        let exact = ppf_primitive(&ppf, pts[0], pts[3]);
        let got = primitive(&ppf, &path, &opts)?.value;
        worst = worst.max((&got - &exact).norm() / exact.norm());
        let mut noreortho = opts;
        noreortho.reortho_every = 0;
        noreortho.h0 = 0.1;
        let errs: Vec<f64> = [1usize, 2, 4, 8].iter().map(|&m| (primitive_fixed(&ppf, &path, &noreortho, m).unwrap().0 - &exact).norm()).collect();
        let hs = [1.0, 0.5, 0.25, 0.125];
        orders.push(isothermic::transforms::loglog_slope(&hs, &errs));
    }
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((
        worst <= 1e-9 && min_order >= 3.7,
        format!("max relative deviation {worst:.2e} (tol 1e-9), min RK4 order {min_order:.2} (≥ 3.7)"),
    ))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = IntegrationOptions::default();
    let mut dev: f64 = 0.0;
    let mut indep: f64 = 0.0;
    for _ in 0..10 {
        let ppf = random_ppf(&mut rng);
        let exact = ppf_monodromy(&ppf);
        let phi = rng.gen_range(-3.0..3.0);
        let ms: Vec<_> = [0.05, 0.3, 1.0].iter().map(|&r| monodromy(&ppf, PolarPoint::new(r, phi), &opts).unwrap().value).collect();
        for m in &ms {
            dev = dev.max((m - &exact).norm() / exact.norm());
            indep = indep.max((m - &ms[0]).norm() / exact.norm());
        }
    }
    Ok((dev <= 1e-9 && indep <= 1e-9, format!("deviation from e^(−2πξ^Im) {dev:.2e}, base-radius spread {indep:.2e} (tol 1e-9)")))
}

fn criterion_4() -> Outcome {
    let model = sphere();
    let q = QuadDiff::first_order(1.0.into());
    let opts = IntegrationOptions::default();
    let p = PolarPoint::new(0.5, 0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_limit: f64 = 0.0;
    for lam in [0.5, -0.5] {
        for _ in 0..10 {
            let init = random_null(&mut rng);
            let rep = fo_darboux_limit(model.clone(), &q, lam, p, &init, 20, &opts)?;
            worst_limit = worst_limit.max(rep.limit_distance);
        }
    }
    let a = worst_limit <= 1e-4;
    let sched = Schedule { k_max: 40, tol: 1e-12 };
    let mut cube: f64 = 0.0;
    let mut square = f64::INFINITY;
    let mut inv: f64 = 0.0;
    let mut fact: f64 = 0.0;
    for lam in [0.5, -0.5] {
        let r = fo_monodromy_structure(model.clone(), &q, lam, p, &sched, &opts)?;
        cube = cube.max(r.cube_norm);
        square = square.min(r.square_norm);
        inv = inv.max(r.invariant_vs_limit);
        fact = fact.max(r.factorization_residual);
    }
    let b = cube <= 1e-6 && square >= 1e-3 && inv <= 1e-5;
    let c = fact <= 1e-5;
    Ok((
        a && b && c,
        format!(
            "(a) Darboux limit distance {worst_limit:.2e} (tol 1e-4) {}; (b) ‖(M−id)³‖ {cube:.2e}, ‖(M−id)²‖ {square:.2e}, invariant vs f_λ,p(s) {inv:.2e} {}; (c) factorization residual {fact:.2e} {}",
            pf(a),
            pf(b),
            pf(c)
        ),
    ))
}

fn criterion_5() -> Outcome {
    let data = so_gauge(revolution(0.1), &QuadDiff::second_order(1.0.into()))?;
    let opts = IntegrationOptions::default();
    let sched = Schedule { k_max: 40, tol: 1e-12 };
    let p = PolarPoint::new(0.5, 0.0);
    let lam = 0.375;
    let rep = so_monodromy_structure(&data, lam, p, &sched, &opts)?;
    let expected: Vec<Complex64> = [1.0, 1.0, 1.0, -1.0, -1.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let eig = minkowski::multiset_distance(&rep.eigenvalues, &expected);
    let (j, sq) = rep.periodicity.unwrap_or((0, f64::INFINITY));
    let lim = so_calapso_point_limit(&data, lam, p, &sched, &opts)?;
    let k_last = *lim.distance_to_limit.last().unwrap();
    let kt = k_transport_residual(&data, lam, p, PolarPoint::new(0.2, 1.1), &sched, &opts)?;
    let ok = eig <= 1e-5 && j == 2 && sq <= 1e-6 && k_last <= 1e-6 && kt <= 1e-6;
    Ok((
        ok,
        format!("eigenvalue distance {eig:.2e} (1e-5), ‖M²−id‖ {sq:.2e} (1e-6), Calapso distance to g(p)K(p) {k_last:.2e}, K-transport residual {kt:.2e} (1e-6)"),
    ))
}

fn criterion_6() -> Outcome {
    let data = so_gauge(revolution(0.1), &QuadDiff::second_order(1.0.into()))?;
    let opts = IntegrationOptions::default();
    let sched = Schedule { k_max: 40, tol: 1e-12 };
    let p = PolarPoint::new(0.5, 0.0);
    let lam = 0.625;
    let rep = so_monodromy_structure(&data, lam, p, &sched, &opts)?;
    let rel = |target: f64| rep.eigenvalues.iter().map(|z| (z - target).norm() / target).fold(f64::INFINITY, f64::min);
    let eig = rel(PI.exp()).max(rel((-PI).exp()));
    let wres = rep.eigendirection_residual;
    // Calapso: sphere distance and oscillation.
    let t = GaugedTransport::new(data.clone(), lam);
    let sph = limit_sphere(&data, lam, p, &sched, &opts, 64)?;
    let (radii, pts) = calapso_radial(&t, p, 40, &opts)?;
    let study = limit_study(&radii, &pts, Some(&sph.subspace), 1e-4)?;
    let sd = *study.sphere_distance.last().unwrap();
    let osc = study.oscillation;
    // Darboux with a random init.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let init = random_null(&mut rng);
    let (dr, dp) = darboux_radial(&t, p, &init, 26, &opts)?;
    let fs = t.surface_point(p.at_radius(*dr.last().unwrap()))?;
    let dd = pdist(dp.last().unwrap(), &fs);
    let _ = dr;
    // Darboux with init on the limit set.
    let ls = limit_set_darboux(&data, lam, p, &sph, 1e-8, &opts)?;
    let sep = ls.separation;
    let o_conv = ls.o_distance.last().copied().unwrap_or(f64::INFINITY);
    let i_conv = ls.iota_distance.last().copied().unwrap_or(f64::INFINITY);
    let cons = ls.consistency;
    let seq = |r: &[f64], d: &[f64]| r.iter().zip(d).map(|(r, d)| format!("{r:.1e}:{d:.1e}")).collect::<Vec<_>>().join(",");
    let (o_seq, i_seq) = (seq(&ls.o_radii, &ls.o_distance), seq(&ls.iota_radii, &ls.iota_distance));
    let ok = eig <= 1e-4 && wres <= 1e-5 && sd <= 1e-4 && osc >= 1e-2 && dd <= 1e-4 && sep >= 0.1 && o_conv < sep / 10.0 && i_conv < sep / 10.0 && cons <= 1e-6;
    Ok((
        ok,
        format!(
            "eig rel err {eig:.2e} (1e-4), W± residual {wres:.2e} (1e-5), Calapso sphere distance {sd:.2e} (1e-4) with oscillation {osc:.2e} (≥1e-2), random Darboux to f(s) {dd:.2e} (1e-4), limit-set Darboux subsequences (r:dist) o [{o_seq}] ι [{i_seq}] with limits separated by {sep:.3} (≥0.1, last < sep/10), transport consistency {cons:.1e}"
        ),
    ))
}

fn criterion_7() -> Outcome {
    let opts = IntegrationOptions::default();
    let sched = Schedule { k_max: 40, tol: 1e-12 };
    let p = PolarPoint::new(0.5, 0.3);
    let samples = [PolarPoint::new(0.35, 0.8), PolarPoint::new(0.7, -1.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut lines = Vec::new();
    let mut all = true;
    let mut check = |t: &dyn Transport, mono: &minkowski::LorentzMap, kind: TransformKind, j: usize, expected: Verdict| -> Result<()> {
        let v = pushforward_check(t, mono, p, &kind, j, &samples, &opts)?;
        let ok = v.agree && v.verdict == expected;
        all &= ok;
        lines.push(format!("{}(λ={},j={})={:?}", v.kind, v.lambda, j, v.verdict));
        Ok(())
    };
    // First order.
    let sph = sphere();
    let q1 = QuadDiff::first_order(1.0.into());
    let data = fo_ppf(sph.clone(), &q1)?;
    for lam in [0.5, -0.5] {
        let t = DirectTransport::new(sph.clone(), q1.clone(), lam);
        let mono = monodromy(t.reduced(), p, &opts)?.value;
        let lim = fo_residual_limit(sph.clone(), &q1, &data, lam, p, &sched, &opts)?;
        let fs = &lim.value * &data.v0;
        check(&t, &mono, TransformKind::Calapso, if lam > 0.0 { 1 } else { 2 }, Verdict::Fails)?;
        check(&t, &mono, TransformKind::Darboux { init: fs }, if lam > 0.0 { 1 } else { 3 }, Verdict::Exists)?;
        check(&t, &mono, TransformKind::Darboux { init: random_null(&mut rng) }, 1, Verdict::Fails)?;
    }
    // Second order.
    let rev = revolution(0.1);
    let q2 = QuadDiff::second_order(1.0.into());
    let gd = so_gauge(rev.clone(), &q2)?;
    let t = DirectTransport::new(rev.clone(), q2.clone(), 0.375);
    let mono = monodromy(t.reduced(), p, &opts)?.value;
    check(&t, &mono, TransformKind::Calapso, 1, Verdict::Fails)?;
    check(&t, &mono, TransformKind::Calapso, 2, Verdict::Exists)?;
    check(&t, &mono, TransformKind::Darboux { init: random_null(&mut rng) }, 2, Verdict::Exists)?;
    let t = DirectTransport::new(rev.clone(), q2.clone(), 0.625);
    let mono = monodromy(t.reduced(), p, &opts)?.value;
    let sphd = limit_sphere(&gd, 0.625, p, &sched, &opts, 2)?;
    check(&t, &mono, TransformKind::Darboux { init: sphd.w_plus.clone() }, 1, Verdict::Exists)?;
    check(&t, &mono, TransformKind::Darboux { init: random_null(&mut rng) }, 1, Verdict::Fails)?;
    check(&t, &mono, TransformKind::Calapso, 1, Verdict::Fails)?;
    Ok((all, format!("{} cases: {}", lines.len(), lines.join(", "))))
}

fn criterion_8() -> Outcome {
    let model = sphere();
    let q = QuadDiff::holomorphic(vec![0.0.into(), 1.0.into()]);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let init = random_null(&mut rng);
    let rep = zero_case_smoke(model, &q, 0.7, (0.5, 0.2), &init, &IntegrationOptions::default())?;
    let ok = rep.calapso_spread <= 1e-6 && rep.darboux_spread <= 1e-6 && rep.darboux_decay_order >= 0.9;
    Ok((
        ok,
        format!(
            "directional spread Calapso {:.2e}, Darboux {:.2e} (1e-6), Darboux differential order {:.3} (≥0.9), loop monodromy defect {:.1e}",
            rep.calapso_spread, rep.darboux_spread, rep.darboux_decay_order, rep.monodromy_defect
        ),
    ))
}

fn criterion_9() -> Outcome {
    let model = revolution(0.1);
    let opts = IntegrationOptions::default();
    let p = PolarPoint::new(0.5, 0.2);
    let grid = GridSpec::log_polar(0.05, 0.9, 5, 6, TAU)?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let init = random_null(&mut rng);
    let mut worst: f64 = 0.0;
    for (lam, k) in [(0.375, 2.0), (0.625, 0.5), (-0.2, 3.0)] {
        let q = QuadDiff::second_order(1.0.into());
        let a = DirectTransport::new(model.clone(), q.clone(), lam);
        let b = DirectTransport::new(model.clone(), q.scaled(k), lam / k);
        let ca = calapso(&a, p, &grid, &opts)?;
        let cb = calapso(&b, p, &grid, &opts)?;
        let da = darboux(&a, p, &init, &grid, &opts)?;
        let db = darboux(&b, p, &init, &grid, &opts)?;
        for (x, y) in ca.samples.iter().zip(&cb.samples).chain(da.samples.iter().zip(&db.samples)) {
            worst = worst.max(pdist(&x.point, &y.point));
        }
    }
    Ok((worst <= 1e-9, format!("max proj_dist between scaled pairs {worst:.2e} (tol 1e-9)")))
}

fn pf(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn main() {
    let _ = adjoint;
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("flatness", criterion_1),
        ("closed-form oracle", criterion_2),
        ("pure-pole monodromy", criterion_3),
        ("first-order pole", criterion_4),
        ("second order, 0<1−2λ<1", criterion_5),
        ("second order, 1−2λ<0", criterion_6),
        ("pushforward equivalence", criterion_7),
        ("zero of Q", criterion_8),
        ("scaling covariance", criterion_9),
    ];
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if filter.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("criterion {} {} [{}]: {} ({:.1}s)", i + 1, if ok { "PASS" } else { "FAIL" }, name, detail, start.elapsed().as_secs_f64());
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
