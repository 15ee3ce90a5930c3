//! Run: cargo run --example flat_connection
//!
//! Primitives of d + λΩ on the universal cover of the punctured disc: path independence for
//! homotopic paths and the monodromy of a loop around the puncture.

use std::sync::Arc;

use isothermic::connection::{monodromy, primitive, IntegrationOptions, PathSpec, PolarPoint, Scaled};
use isothermic::minkowski::lorentz_residual;
use isothermic::profile::SechProfile;
use isothermic::surface::{OmegaField, QuadDiff, Revolution};

fn main() -> isothermic::Result<()> {
    let model = Arc::new(Revolution::new(3, 1.0, Arc::new(SechProfile::new(0.1)))?);
    let form = Scaled::new(0.375, Arc::new(OmegaField::new(model, QuadDiff::second_order(1.0.into()))));
    let opts = IntegrationOptions::default();
    let p = PolarPoint::new(0.5, 0.3);
    let q = PolarPoint::new(0.2, 2.0);
    let a = primitive(&form, &PathSpec::radial_then_arc(p, q)?, &opts)?;
    let b = primitive(&form, &PathSpec::new(vec![p, PolarPoint::new(0.7, 1.0), q])?, &opts)?;
    println!("two homotopic paths differ by {:.2e} (estimates {:.1e}, {:.1e})", (&a.value - &b.value).norm(), a.error_estimate, b.error_estimate);
    println!("Lorentz residual of Γ: {:.2e}", lorentz_residual(&a.value));
    let m = monodromy(&form, p, &opts)?;
    let e = isothermic::minkowski::eigenvalues(&m.value)?;
    println!("monodromy eigenvalues:");
    for z in e {
        println!("  {:+.10} {:+.10}i", z.re, z.im);
    }
    Ok(())
}
