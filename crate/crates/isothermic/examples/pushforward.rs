//! Run: cargo run --example pushforward
//!
//! Which transforms descend from the universal cover to a j-fold cover of the punctured disc:
//! the monodromy-invariance predicate compared with a direct periodicity test.

use std::sync::Arc;

use isothermic::connection::{monodromy, IntegrationOptions, PolarPoint};
use isothermic::minkowski::euclidean_lift;
use isothermic::profile::SechProfile;
use isothermic::surface::{QuadDiff, Revolution};
use isothermic::transforms::pushforward::{pushforward_check, TransformKind};
use isothermic::transforms::{DirectTransport, Transport};

fn main() -> isothermic::Result<()> {
    let model = Arc::new(Revolution::new(3, 1.0, Arc::new(SechProfile::new(0.1)))?);
    let q = QuadDiff::second_order(1.0.into());
    let opts = IntegrationOptions::default();
    let p = PolarPoint::new(0.5, 0.3);
    let samples = [PolarPoint::new(0.35, 0.8), PolarPoint::new(0.7, -1.0)];
    let t = DirectTransport::new(model, q, 0.375);
    let mono = monodromy(t.reduced(), p, &opts)?.value;
    let cases = [
        (TransformKind::Calapso, 1),
        (TransformKind::Calapso, 2),
        (TransformKind::Darboux { init: euclidean_lift(&[0.3, 1.0, -0.2]) }, 1),
        (TransformKind::Darboux { init: euclidean_lift(&[0.3, 1.0, -0.2]) }, 2),
    ];
    for (kind, j) in cases {
        let v = pushforward_check(&t, &mono, p, &kind, j, &samples, &opts)?;
        println!("{} on the {j}-fold cover: {:?} (predicate {:.1e}, direct {:.1e})", v.kind, v.verdict, v.predicate_residual, v.direct_residual);
    }
    Ok(())
}
