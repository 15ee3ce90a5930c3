//! Run: cargo run --example second_order_pole
//!
//! A pole of order two with 0 < 1 − 2λ < 1: monodromy eigenvalues from the pure pole form,
//! finite order of the monodromy, and the limit point g(p)K(p) of the Calapso transforms.

use std::sync::Arc;

use isothermic::connection::{IntegrationOptions, PolarPoint};
use isothermic::polecore::Schedule;
use isothermic::profile::SechProfile;
use isothermic::surface::{QuadDiff, Revolution};
use isothermic::transforms::second_order::{so_calapso_point_limit, so_gauge, so_monodromy_structure};

fn main() -> isothermic::Result<()> {
    let model = Arc::new(Revolution::new(3, 1.0, Arc::new(SechProfile::new(0.1)))?);
    let data = so_gauge(model, &QuadDiff::second_order(1.0.into()))?;
    let opts = IntegrationOptions::default().with_tol(1e-12);
    let sched = Schedule { k_max: 40, tol: 1e-12 };
    let p = PolarPoint::new(0.5, 0.0);
    for lambda in [0.375, 0.46875] {
        let m = so_monodromy_structure(&data, lambda, p, &sched, &opts)?;
        println!("λ = {lambda}: regime {}, eigenvalue distance {:.1e}, periodicity {:?}", m.regime, m.eigenvalue_distance, m.periodicity);
        let c = so_calapso_point_limit(&data, lambda, p, &sched, &opts)?;
        println!("        Calapso distance to g(p)K(p) at r = {:.1e}: {:.2e}", c.radii.last().unwrap(), c.distance_to_limit.last().unwrap());
    }
    Ok(())
}
