//! Run: cargo run --example first_order_pole
//!
//! A pole of order one: parabolic monodromy whose fixed line is the limit of the Calapso
//! transforms, and Darboux transforms that extend to the pole with value ⟨f(s)⟩.

use std::sync::Arc;

use isothermic::connection::{IntegrationOptions, PolarPoint};
use isothermic::minkowski::euclidean_lift;
use isothermic::polecore::Schedule;
use isothermic::surface::{QuadDiff, UmbilicSphere};
use isothermic::transforms::first_order::{fo_darboux_limit, fo_monodromy_structure};

fn main() -> isothermic::Result<()> {
    let model = Arc::new(UmbilicSphere::new(3, 1.0)?);
    let q = QuadDiff::first_order(1.0.into());
    let opts = IntegrationOptions::default();
    let sched = Schedule { k_max: 40, tol: 1e-12 };
    let p = PolarPoint::new(0.5, 0.3);
    for lambda in [0.5, -1.0] {
        let m = fo_monodromy_structure(model.clone(), &q, lambda, p, &sched, &opts)?;
        println!(
            "λ = {lambda}: ‖(𝓜−id)³‖ {:.1e}, ‖(𝓜−id)²‖ {:.3}, fixed line vs Calapso limit {:.1e}, log coefficient {:.6}",
            m.cube_norm, m.square_norm, m.invariant_vs_limit, m.nilpotent_coefficient
        );
        let d = fo_darboux_limit(model.clone(), &q, lambda, p, &euclidean_lift(&[0.4, -1.1, 0.7]), 20, &opts)?;
        println!("        Darboux limit distance to f(s) {:.1e}", d.limit_distance);
    }
    Ok(())
}
