//! Pushforward of transforms from the universal cover to a j-fold cover.
//!
//! A Darboux transform descends iff its initial point is invariant under 𝓜^j; a Calapso
//! transform descends iff 𝓜^j fixes every point of its image. Both predicates are compared
//! with a direct test that integrates to q and to q turned by 2πj along independent paths.

use serde::Serialize;

use super::Transport;
use crate::connection::{IntegrationOptions, PathSpec, PolarPoint};
use crate::error::Result;
use crate::minkowski::{adjoint, pdist, LightVec, LorentzMap};

/// Distance at or below which a sampled identity counts as holding.
pub const EXISTS_TOL: f64 = 1e-6;
/// Distance at or above which a sampled identity counts as violated.
pub const FAILS_TOL: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub enum TransformKind {
    Darboux {
        #[serde(with = "crate::serial::repr")]
        init: LightVec,
    },
    Calapso,
}

impl TransformKind {
    pub fn name(&self) -> &'static str {
        match self {
            TransformKind::Darboux { .. } => "darboux",
            TransformKind::Calapso => "calapso",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Exists,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn from_residual(d: f64) -> Self {
        if d <= EXISTS_TOL {
            Verdict::Exists
        } else if d >= FAILS_TOL {
            Verdict::Fails
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PushforwardVerdict {
    pub kind: String,
    pub lambda: f64,
    pub j: usize,
    /// Monodromy-invariance predicate.
    pub predicate: Verdict,
    pub predicate_residual: f64,
    /// Sampled periodicity f(q) = f(q + 2πj).
    pub direct: Verdict,
    pub direct_residual: f64,
    pub verdict: Verdict,
    pub agree: bool,
    /// The sample pair with the largest periodicity defect.
    pub witness: (PolarPoint, PolarPoint),
}

fn power(m: &LorentzMap, j: usize) -> LorentzMap {
    let mut out = LorentzMap::identity(m.nrows(), m.ncols());
    for _ in 0..j {
        out = &out * m;
    }
    out
}

/// Pushforward verdict for the transform of kind `kind`, given the monodromy 𝓜_p of λΩ at
/// the base point (loop with winding −1, so turning q by +2πj changes Γ_p^q by 𝓜^{−j}).
pub fn pushforward_check(
    t: &dyn Transport,
    mono: &LorentzMap,
    p: PolarPoint,
    kind: &TransformKind,
    j: usize,
    samples: &[PolarPoint],
    opts: &IntegrationOptions,
) -> Result<PushforwardVerdict> {
    let mj = power(mono, j);
    let turn = std::f64::consts::TAU * j as f64;
    let mut predicate_residual: f64 = 0.0;
    let mut direct_residual: f64 = 0.0;
    let mut witness = (p, p.turned(turn));
    for &q in samples {
        let q2 = q.turned(turn);
        let g1 = t.transport(&PathSpec::radial_then_arc(p, q)?, opts)?;
        let g2 = t.transport(&PathSpec::radial_then_arc(p, q2)?, opts)?;
        let (a, b, pred) = match kind {
            TransformKind::Darboux { init } => {
                let a = adjoint(&g1) * init;
                let b = adjoint(&g2) * init;
                (a, b, pdist(&(&mj * init), init))
            }
            TransformKind::Calapso => {
                let f = t.surface_point(q)?;
                let a = &g1 * &f;
                let b = &g2 * &f;
                (a.clone(), b, pdist(&(&mj * &a), &a))
            }
        };
        predicate_residual = predicate_residual.max(pred);
        let d = pdist(&a, &b);
        if d >= direct_residual {
            direct_residual = d;
            witness = (q, q2);
        }
    }
    let predicate = Verdict::from_residual(predicate_residual);
    let direct = Verdict::from_residual(direct_residual);
    let agree = predicate == direct && predicate != Verdict::Inconclusive;
    Ok(PushforwardVerdict {
        kind: kind.name().to_string(),
        lambda: t.lambda(),
        j,
        predicate,
        predicate_residual,
        direct,
        direct_residual,
        verdict: if agree { predicate } else { Verdict::Inconclusive },
        agree,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_thresholds() {
        assert_eq!(Verdict::from_residual(0.0), Verdict::Exists);
        assert_eq!(Verdict::from_residual(1e-4), Verdict::Inconclusive);
        assert_eq!(Verdict::from_residual(0.5), Verdict::Fails);
    }
}
