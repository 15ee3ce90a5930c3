//! Run: cargo run --example calapso_mesh
//!
//! Calapso transforms of a perturbed sphere of revolution for a few spectral parameters,
//! written as OBJ meshes into the system temporary directory.

use std::fs::File;
use std::sync::Arc;

use isothermic::connection::{IntegrationOptions, PolarPoint};
use isothermic::io::{export_obj, Mesh};
use isothermic::profile::SechProfile;
use isothermic::surface::{QuadDiff, Revolution};
use isothermic::transforms::second_order::{so_gauge, GaugedTransport};
use isothermic::transforms::{calapso, GridSpec};

fn main() -> isothermic::Result<()> {
    let model = Arc::new(Revolution::new(3, 1.0, Arc::new(SechProfile::new(0.1)))?);
    let data = so_gauge(model, &QuadDiff::second_order(1.0.into()))?;
    let grid = GridSpec::log_polar(0.02, 0.9, 16, 33, std::f64::consts::TAU)?;
    let p = PolarPoint::new(0.5, 0.0);
    for lambda in [0.2, 0.375, 0.625] {
        let t = GaugedTransport::new(data.clone(), lambda);
        let res = calapso(&t, p, &grid, &IntegrationOptions::default())?;
        let points: Vec<_> = res.samples.iter().map(|s| s.point.clone()).collect();
        let path = std::env::temp_dir().join(format!("calapso_{lambda}.obj"));
        export_obj(&Mesh::from_points(&grid, &points)?, File::create(&path)?)?;
        println!("λ = {lambda}: {} vertices written to {}", points.len(), path.display());
    }
    Ok(())
}
