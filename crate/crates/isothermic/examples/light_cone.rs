//! Run: cargo run --example light_cone
//!
//! Points of the conformal 3-sphere as null lines of R^5_1, the wedge product and Lorentz
//! maps obtained by exponentiating skew maps.

use isothermic::minkowski::{affine_point, euclidean_lift, exp_skew, inner, lorentz_residual, proj_dist, wedge, MinkSpace};

fn main() -> isothermic::Result<()> {
    let s = MinkSpace::new(3)?;
    let x = euclidean_lift(&[1.0, -0.5, 2.0]);
    println!("lift of (1, -0.5, 2): {:?}", x.as_slice());
    println!("⟪x, x⟫ = {:e} (null)", inner(&x, &x));
    println!("affine point back: {:?}", affine_point(&x)?);
    println!("proj_dist(⟨o⟩, ⟨ι⟩) = {:.6} (√2 = {:.6})", proj_dist(&s.o(), &s.iota())?, 2f64.sqrt());

    // A boost in the ⟨o, ι⟩ plane scales the affine chart.
    let boost = exp_skew(&(wedge(&s.o(), &s.iota()) * 0.7))?;
    let y = &boost * &x;
    println!("boosted point: {:?}", affine_point(&y)?);
    println!("Lorentz residual of the boost: {:e}", lorentz_residual(&boost));
    Ok(())
}
