//! Run: cargo run --example model_config
//!
//! Model descriptors in JSON, presets, and the CSV and JSON exporters.

use isothermic::connection::PolarPoint;
use isothermic::io::{export_csv, export_json, ModelConfig, Table, PRESETS};
use isothermic::minkowski::affine_point;
use isothermic::surface::jet_log;

fn main() -> isothermic::Result<()> {
    let cfg = ModelConfig::from_json(r#"{"model":"revolution","profile":"sech","epsilon":0.1,"Q":{"c2":[1,0],"c1":[0,0]},"r0":1.0}"#)?;
    println!("presets: {}", PRESETS.join(", "));
    export_json(&cfg, std::io::stdout())?;
    let model = cfg.build()?;
    let mut table = Table::new(&["r", "x", "y", "z"]);
    for k in 0..5 {
        let r = 0.9 * 0.5f64.powi(k);
        let x = affine_point(&jet_log(model.as_ref(), PolarPoint::new(r, 0.0))?.f)?;
        table.push(vec![r, x[0], x[1], x[2]])?;
    }
    export_csv(&table, std::io::stdout())?;
    Ok(())
}
