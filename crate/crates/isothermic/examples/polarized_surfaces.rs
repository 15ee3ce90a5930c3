//! Run: cargo run --example polarized_surfaces
//!
//! Surface models with a holomorphic quadratic differential Q: factorization of the Hopf
//! differential through Q and closedness of the associated 1-form Ω, with a rotated Q as a
//! negative control.

use std::sync::Arc;

use isothermic::connection::PolarPoint;
use isothermic::profile::SechProfile;
use isothermic::surface::{closedness_residual, factorization_check, QuadDiff, Revolution, SurfaceModel, UmbilicSphere};
use num_complex::Complex64;

fn main() -> isothermic::Result<()> {
    let revolution: Arc<dyn SurfaceModel> = Arc::new(Revolution::new(3, 1.0, Arc::new(SechProfile::new(0.1)))?);
    let sphere: Arc<dyn SurfaceModel> = Arc::new(UmbilicSphere::new(3, 1.0)?);
    let samples: Vec<PolarPoint> = [0.3, 0.6].iter().flat_map(|&r| [0.0, 1.0, 2.5].map(|a| PolarPoint::new(r, a))).collect();
    let cases = [
        ("revolution, Q = dz²/z²", revolution.clone(), QuadDiff::second_order(1.0.into())),
        ("revolution, Q = i dz²/z²", revolution, QuadDiff::second_order(Complex64::new(0.0, 1.0))),
        ("sphere, Q = dz²/z", sphere, QuadDiff::first_order(1.0.into())),
    ];
    for (name, model, q) in cases {
        let f = factorization_check(model.as_ref(), &q, &samples)?;
        let c = closedness_residual(model, &q, PolarPoint::new(0.5, 0.7), 1e-3)?;
        println!("{name}: isothermic {}, Im κ residual {:.2e}, |dΩ| {:.2e}", f.isothermic, f.max_residual, c);
    }
    Ok(())
}
