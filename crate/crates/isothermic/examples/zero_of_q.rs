//! Run: cargo run --example zero_of_q
//!
//! At a zero of Q the transforms extend continuously through the zero, and the Darboux
//! transform fails to be immersed there: its differential decays linearly in |z|.

use std::sync::Arc;

use isothermic::connection::IntegrationOptions;
use isothermic::minkowski::euclidean_lift;
use isothermic::surface::{QuadDiff, UmbilicSphere};
use isothermic::transforms::zero_case::zero_case_smoke;

fn main() -> isothermic::Result<()> {
    let model = Arc::new(UmbilicSphere::new(3, 1.0)?);
    let q = QuadDiff::holomorphic(vec![0.0.into(), 1.0.into()]);
    let rep = zero_case_smoke(model, &q, 0.7, (0.5, 0.2), &euclidean_lift(&[0.6, -0.2, 1.1]), &IntegrationOptions::default())?;
    println!("directional spread: Calapso {:.1e}, Darboux {:.1e}", rep.calapso_spread, rep.darboux_spread);
    println!("loop monodromy defect {:.1e}", rep.monodromy_defect);
    for (r, d) in rep.radii.iter().zip(&rep.darboux_differential) {
        println!("  |z| = {r:.2e}: ‖df̂‖ = {d:.3e}");
    }
    println!("fitted decay order {:.3}", rep.darboux_decay_order);
    Ok(())
}
