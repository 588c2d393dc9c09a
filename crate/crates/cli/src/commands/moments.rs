use hierarchy_forge::moments::{
    forward_a_coefficients, forward_solved_form, gaussian_moments, init_coeff_recursion, init_series,
    integrate_truncated, reference_moments, GaussianSpec, MomentSystemSpec,
};
use hierarchy_forge::Scalar;

use super::f;
use crate::config::ExperimentConfig;
use crate::{Artifact, Csv, Failure};

/// Sample intervals over [0, tmax]; divides the fixed RK4 step count so the
/// samples fall on integration steps.
const SAMPLES: i64 = 16;

pub fn run<S: Scalar>(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, Failure> {
    let tmax: S = cfg.scalar(&cfg.tmax);
    if tmax < S::zero() {
        return Err(Failure::Validation("--tmax must be nonnegative".into()));
    }
    let (depth, order) = (cfg.depth, cfg.order);

    let moments = gaussian_moments(&GaussianSpec::<S>::reference(), 2 * order + 1);
    let (c1, c2) = init_coeff_recursion(&moments, order)?;
    let (u0, u1) = init_series(&c1, &c2);
    let table = forward_a_coefficients(depth / 2 + 1, depth.max(1));
    let mut solved = vec![u0.clone(), u1.clone()];
    for level in 2..=depth {
        solved.push(forward_solved_form(&table, &u0, &u1, level)?);
    }

    let float_moments = gaussian_moments(&GaussianSpec::<f64>::reference(), depth);
    let truncated = integrate_truncated(&MomentSystemSpec::harmonic(), &float_moments, tmax.to_f64(), depth)?;
    let truncated_source = format!("truncated_{depth}");

    let mut csv = Csv::new("moments.csv", &["t", "n", "u_n", "source"]);
    for j in 0..=SAMPLES {
        let t = tmax.clone() * S::ratio(j, SAMPLES);
        let tf = t.to_f64();
        let (r0, r1) = reference_moments(tf);
        csv.row([f(tf), "0".into(), f(r0), "closed_form".into()]);
        csv.row([f(tf), "1".into(), f(r1), "closed_form".into()]);
        for (n, s) in solved.iter().enumerate() {
            csv.row([f(tf), n.to_string(), f(s.evaluate(&t).value.to_f64()), "solved_form".into()]);
        }
        for (n, v) in truncated.at(tf).iter().enumerate() {
            csv.row([f(tf), n.to_string(), f(*v), truncated_source.clone()]);
        }
    }
    Ok(vec![Artifact::Csv(csv), Artifact::Json("a_coefficients.json", table.to_json())])
}
