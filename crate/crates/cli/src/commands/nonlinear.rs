use hierarchy_forge::linear::CoefVector;
use hierarchy_forge::nonlinear::{coverage_check, lambda_table, special_solution, CoverageVerdict, LambdaSeed, SpecialSolution};

use super::f;
use crate::config::ExperimentConfig;
use crate::{Artifact, Csv, Failure};

const SOLUTIONS: [SpecialSolution; 3] = [SpecialSolution::Y1 { tau: 0.0 }, SpecialSolution::Y2, SpecialSolution::Y3];

pub fn coverage(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, Failure> {
    let a = cfg.scalar::<f64>(&cfg.a);
    let (depth, order) = (cfg.depth, cfg.order);
    let mut levels = Csv::new("coverage.csv", &["solution", "a", "level", "radius_estimate", "covers_origin"]);
    let mut verdicts = Csv::new("verdicts.csv", &["solution", "a", "verdict", "radius", "recurrence_mismatch"]);
    for id in SOLUTIONS {
        let report = coverage_check(id, a, depth, order)?;
        for l in &report.levels {
            levels.row([id.name().into(), f(a), l.level.to_string(), f(l.radius.value()), u8::from(l.covers_origin).to_string()]);
        }
        let (verdict, radius) = match report.verdict {
            CoverageVerdict::Global => ("global", f64::INFINITY),
            CoverageVerdict::Partial { radius } => ("partial", radius),
            CoverageVerdict::None { local_radius } => ("none", local_radius),
        };
        verdicts.row([id.name().into(), f(a), verdict.into(), f(radius), f(report.recurrence_mismatch)]);
    }

    // λ table of the Y3 matching at a
    let seeds = (1..=depth + order)
        .map(|n| special_solution(SpecialSolution::Y3, n, &a).map(|y| y / (a * a)))
        .collect::<Result<Vec<f64>, _>>()?;
    let table = lambda_table(LambdaSeed::Constants(CoefVector::new(seeds)), &a, depth, order)?;
    Ok(vec![Artifact::Csv(levels), Artifact::Csv(verdicts), Artifact::Json("lambda_y3.json", table.to_json())])
}
