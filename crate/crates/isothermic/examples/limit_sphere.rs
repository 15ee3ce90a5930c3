//! Run: cargo run --example limit_sphere
//!
//! A pole of order two with 1 − 2λ < 0: the Calapso transforms accumulate on a limit sphere,
//! generic Darboux transforms tend to ⟨f(s)⟩, and a Darboux transform started on the limit set
//! has the two subsequential limits ⟨f(s)⟩ and ⟨F(s)ι⟩.

use std::sync::Arc;

use isothermic::connection::{IntegrationOptions, PolarPoint};
use isothermic::polecore::Schedule;
use isothermic::profile::SechProfile;
use isothermic::surface::{QuadDiff, Revolution};
use isothermic::transforms::second_order::{limit_set_darboux, limit_sphere, so_gauge};

fn main() -> isothermic::Result<()> {
    let model = Arc::new(Revolution::new(3, 1.0, Arc::new(SechProfile::new(0.1)))?);
    let data = so_gauge(model, &QuadDiff::second_order(1.0.into()))?;
    let opts = IntegrationOptions::default().with_tol(1e-12);
    let sched = Schedule { k_max: 40, tol: 1e-12 };
    let p = PolarPoint::new(0.5, 0.0);
    let lambda = 0.625;
    let sph = limit_sphere(&data, lambda, p, &sched, &opts, 16)?;
    println!("limit map error {:.1e}, {} sampled limit-set points", sph.residual_error, sph.samples.len());
    let ls = limit_set_darboux(&data, lambda, p, &sph, 1e-8, &opts)?;
    println!("separation of ⟨f(s)⟩ and ⟨F(s)ι⟩: {:.3}", ls.separation);
    for (r, d) in ls.o_radii.iter().zip(&ls.o_distance) {
        println!("  o-passage at r = {r:.2e}: distance to ⟨f(s)⟩ {d:.2e}");
    }
    for (r, d) in ls.iota_radii.iter().zip(&ls.iota_distance) {
        println!("  ι-passage at r = {r:.2e}: distance to ⟨F(s)ι⟩ {d:.2e}");
    }
    println!("max distance to the curvature sphere {:.1e}", ls.sphere_distance);
    Ok(())
}
