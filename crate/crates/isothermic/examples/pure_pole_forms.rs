//! Run: cargo run --example pure_pole_forms
//!
//! Pure pole forms ξ = ξ^Re dρ + ξ^Im dφ: classification by the signature of the span of
//! ξ^Re, the closed-form primitive and the monodromy exp(−2πξ^Im).

use isothermic::connection::{monodromy, IntegrationOptions, PolarPoint};
use isothermic::minkowski::MinkSpace;
use isothermic::polecore::{build_ppf, classify, ppf_monodromy, ppf_primitive};

fn main() -> isothermic::Result<()> {
    let s = MinkSpace::new(3)?;
    for lambda in [0.375, 0.625, -0.5] {
        // The second-order family ξ_λ = (o − t_u)∧(ι − λt_u) dρ + (t_u − λo − ι)∧t_v dφ.
        let xi = build_ppf(s.o() - s.t_u(), s.iota() - s.t_u() * lambda, s.t_u() - s.o() * lambda - s.iota(), s.t_v())?;
        let c = classify(&xi)?;
        let p = PolarPoint::new(0.5, 0.0);
        let numeric = monodromy(&xi, p, &IntegrationOptions::default())?.value;
        let closed = ppf_monodromy(&xi);
        let g = ppf_primitive(&xi, p, PolarPoint::new(0.1, 1.0));
        println!(
            "λ = {lambda}: span {:?}, ζ = {:?}, kind {:?}, |𝓜_numeric − 𝓜_closed| = {:.1e}, |Γ_p^q| = {:.3}",
            c.span_signature,
            c.zeta,
            c.kind,
            (&numeric - &closed).norm(),
            g.norm()
        );
    }
    Ok(())
}
