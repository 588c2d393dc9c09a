use hierarchy_forge::uniqueness::{uniqueness_bounds, y_i, BumpSpec, BumpTable};
use hierarchy_forge::Scalar;

use super::f;
use crate::config::ExperimentConfig;
use crate::{Artifact, Csv, Failure};

const LEVELS: usize = 4;
const HALF_POINTS: i64 = 200;

pub fn fig1<S: Scalar>(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, Failure> {
    figure::<S>(cfg, "fig1.csv", "summary.csv")
}

pub fn fig2<S: Scalar>(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, Failure> {
    figure::<S>(cfg, "fig2.csv", "fig2_summary.csv")
}

fn figure<S: Scalar>(cfg: &ExperimentConfig, curves: &'static str, summary: &'static str) -> Result<Vec<Artifact>, Failure> {
    let gamma: S = cfg.scalar(&cfg.gamma);
    let delta = cfg.scalar::<S>(&cfg.delta).to_f64();
    let spec = BumpSpec::new(gamma.clone())?;
    let table = BumpTable::new(&spec, LEVELS);
    // the bump lives on the scale √γ
    let half_width = 2.0 * gamma.to_f64().sqrt();
    let mut curve = Csv::new(curves, &["n", "gamma", "x", "yI", "yII", "in_interval"]);
    let mut sum = Csv::new(summary, &["n", "gamma", "delta", "interval_length"]);
    for n in 1..=LEVELS {
        let interval = uniqueness_bounds(&spec, n, delta)?;
        sum.row([n.to_string(), gamma.render(), f(delta), f(interval.length())]);
        for j in -HALF_POINTS..=HALF_POINTS {
            let x = half_width * j as f64 / HALF_POINTS as f64;
            curve.row([
                n.to_string(),
                gamma.render(),
                f(x),
                f(y_i(n, x)),
                f(table.y_ii(n, x)),
                u8::from(interval.contains(x)).to_string(),
            ]);
        }
    }
    Ok(vec![Artifact::Csv(curve), Artifact::Csv(sum)])
}
