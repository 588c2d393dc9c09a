use hierarchy_forge::riccati::{
    classify_reparam, determining_residual, reparam_closed_form, FieldId, ReparamKind, TangentField, TransformId,
    REPARAM_TOLERANCE,
};
use hierarchy_forge::Scalar;

use super::f;
use crate::config::ExperimentConfig;
use crate::{Artifact, Csv, Failure};

const MEMBERS: [f64; 3] = [-0.5, 0.3, 0.7];

pub fn run<S: Scalar>(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, Failure> {
    let eps = cfg.scalar::<S>(&cfg.epsilon).to_f64();
    let mut table = Csv::new("riccati.csv", &["transform", "epsilon", "c", "kind", "c_tilde", "closed_form", "fit_spread"]);
    for id in TransformId::ALL {
        for c in MEMBERS {
            let r = classify_reparam(id, eps, c)?;
            let closed = reparam_closed_form(id, eps, c);
            let kind = match r.kind {
                ReparamKind::NewParam => "new_param",
                ReparamKind::Invariant => "invariant",
                ReparamKind::NotInFamily => "not_in_family",
            };
            let fitted = r.c_tilde.ok_or_else(|| {
                Failure::Internal(format!("{} image of c = {c} left the family (spread {})", id.name(), r.fit_spread))
            })?;
            if (fitted - closed).abs() > REPARAM_TOLERANCE * closed.abs().max(1.0) {
                return Err(Failure::Internal(format!(
                    "{} at c = {c}, ε = {eps}: fitted {fitted} but closed form gives {closed}",
                    id.name()
                )));
            }
            table.row([id.name().into(), f(eps), f(c), kind.into(), f(fitted), f(closed), f(r.fit_spread)]);
        }
    }

    // fixed sample points away from x = 0
    let samples: Vec<(S, S)> = (0..10)
        .map(|i: i64| {
            let x = S::ratio(if i % 2 == 0 { i + 1 } else { -(i + 1) }, 3);
            (x, S::ratio(3 * i - 7, 5))
        })
        .collect();
    let mut det = Csv::new("determining.csv", &["field", "samples", "max_residual"]);
    for (name, id) in [("X0", FieldId::X0), ("X1", FieldId::X1), ("X2", FieldId::X2), ("X3", FieldId::X3)] {
        let r = determining_residual(&TangentField::<S>::named(id), &samples)?;
        if S::EXACT && !r.is_zero() {
            return Err(Failure::Internal(format!("{name} fails its determining equation exactly: {}", r.render())));
        }
        det.row([name.into(), samples.len().to_string(), r.render()]);
    }
    Ok(vec![Artifact::Csv(table), Artifact::Csv(det)])
}
