//! Run: cargo run --example darboux_mesh
//!
//! Darboux transforms of a surface of revolution from several initial points, exported as OBJ
//! meshes, with the behaviour at the pole: for 1 − 2λ > 0 every transform extends to the pole
//! with value ⟨f(s)⟩.

use std::fs::File;
use std::sync::Arc;

use isothermic::connection::{IntegrationOptions, PolarPoint};
use isothermic::io::{export_obj, Mesh};
use isothermic::minkowski::{euclidean_lift, pdist};
use isothermic::profile::SechProfile;
use isothermic::surface::{jet_log, QuadDiff, Revolution};
use isothermic::transforms::second_order::{so_gauge, GaugedTransport};
use isothermic::transforms::{darboux, darboux_radial, limit_study, GridSpec};

fn main() -> isothermic::Result<()> {
    let model = Arc::new(Revolution::new(3, 1.0, Arc::new(SechProfile::new(0.1)))?);
    let data = so_gauge(model.clone(), &QuadDiff::second_order(1.0.into()))?;
    let t = GaugedTransport::new(data, 0.375);
    let opts = IntegrationOptions::default();
    let grid = GridSpec::log_polar(0.02, 0.9, 16, 33, std::f64::consts::TAU)?;
    let p = PolarPoint::new(0.5, 0.0);
    for (k, x) in [[0.0, 0.0, 1.5], [1.2, 0.3, -0.4], [-0.8, 1.0, 0.6]].iter().enumerate() {
        let init = euclidean_lift(x);
        let res = darboux(&t, p, &init, &grid, &opts)?;
        let points: Vec<_> = res.samples.iter().map(|s| s.point.clone()).collect();
        let path = std::env::temp_dir().join(format!("darboux_{k}.obj"));
        export_obj(&Mesh::from_points(&grid, &points)?, File::create(&path)?)?;
        let (radii, radial) = darboux_radial(&t, p, &init, 24, &opts)?;
        let rep = limit_study(&radii, &radial, None, 1e-6)?;
        let fs = jet_log(model.as_ref(), p.at_radius(*radii.last().unwrap()))?.f;
        let d = rep.limit.as_ref().map(|l| pdist(l, &fs));
        println!("init {x:?}: {} written, endpoint {:?}, distance of the limit to f(s) {:?}", path.display(), rep.endpoint, d);
    }
    Ok(())
}
