use hierarchy_forge::linear::{
    apply_group_at_origin, convergence_domains, reparam_ctilde, restrictions_ok, solve_ivp_pair, CoefVector,
    InnerFamily, Table1Row,
};
use hierarchy_forge::series::{RadiusEstimate, RadiusMethod};
use hierarchy_forge::Scalar;

use super::f;
use crate::config::ExperimentConfig;
use crate::{Artifact, Csv, Failure};

/// Indices cross-checked against both closed summations.
const CROSS_CHECKED: usize = 10;

fn ones<S: Scalar>(len: usize) -> Vec<S> {
    vec![S::one(); len]
}

pub fn repro<S: Scalar>(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, Failure> {
    let eps: S = cfg.scalar(&cfg.epsilon);
    let a: S = cfg.scalar(&cfg.a);
    let (depth, order) = (cfg.depth, cfg.order);
    let len = depth + 2 * order;
    let c = ones::<S>(len);

    let checked = reparam_ctilde(&CoefVector::new(c.clone()), &eps, CROSS_CHECKED.min(len))?;
    let ct = apply_group_at_origin(&eps, &c);
    if ct.body[..checked.body.len()] != checked.body[..] || ct.exponent != checked.exponent {
        return Err(Failure::Internal("fast and matrix reparametrizations differ".into()));
    }
    let mut ctilde = Csv::new("ctilde.csv", &["index", "c_tilde", "exp_tag", "cross_checked"]);
    for (i, v) in ct.body.iter().enumerate().take(depth + order) {
        ctilde.row([(i + 1).to_string(), v.render(), ct.exponent.render(), u8::from(i < CROSS_CHECKED).to_string()]);
    }

    // yᴬ = flow(c̃) and yᴮ = G(x*, ε)·flow(c)(x*)
    let pair = solve_ivp_pair(&CoefVector::new(ct.body[..depth + order].to_vec()), &eps, depth, order)?;
    let mut grid = Csv::new("linear_repro.csv", &["x", "n", "flow_ctilde", "y_b", "abs_diff", "restrictions_ok"]);
    for j in -8i64..=8 {
        let x = S::ratio(j, 4);
        if (S::one() + eps.clone() * x.clone()).is_zero() {
            continue;
        }
        let ok = restrictions_ok(&x, &eps, &a)?.all();
        let ya = pair.ya_at(&x);
        let yb = pair.yb_at(&x)?;
        for n in 0..depth {
            let diff = (ya[n].clone() - yb[n].clone()).abs();
            grid.row([
                f(x.to_f64()),
                (n + 1).to_string(),
                f(ya[n].to_f64()),
                f(yb[n].to_f64()),
                f(diff.to_f64()),
                u8::from(ok).to_string(),
            ]);
        }
    }

    // partial sums of yᴬ outside |xε| < 1, against the finite yᴮ
    let mut witness = Csv::new("divergence.csv", &["order", "x", "flow_ctilde_level1", "y_b_level1"]);
    if !eps.is_zero() {
        let long = solve_ivp_pair(&CoefVector::new(ct.body[..1 + 2 * order].to_vec()), &eps, 1, 2 * order)?;
        let x = S::ratio(3, 2) / eps.clone();
        let yb = long.yb_at(&x)?[0].to_f64();
        for k in [order, 2 * order] {
            let partial = long.ya.level(1).truncate(k).evaluate(&x).value;
            witness.row([k.to_string(), f(x.to_f64()), f(partial.to_f64()), f(yb)]);
        }
    }
    Ok(vec![Artifact::Csv(ctilde), Artifact::Csv(grid), Artifact::Csv(witness)])
}

fn method(e: &RadiusEstimate) -> &'static str {
    match e.method {
        RadiusMethod::Median => "median",
        RadiusMethod::EnvelopeFit => "envelope_fit",
        RadiusMethod::Trend => "trend",
        RadiusMethod::AllZeroTail => "all_zero_tail",
    }
}

pub fn table1<S: Scalar>(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, Failure> {
    let eps: S = cfg.scalar(&cfg.epsilon);
    let one = S::one();
    let rows = [
        Table1Row::GroupImage { alpha: one.clone(), inner: InnerFamily::Constant },
        Table1Row::Factorial { alpha: one.clone() },
        Table1Row::Direct { alpha: one.clone(), inner: InnerFamily::Constant },
        Table1Row::FactorialSquared { alpha: one },
    ];
    let mut csv = Csv::new(
        "table1.csv",
        &["row", "family", "ya_domain", "yb_domain", "ya_radius", "yb_inner_radius", "ya_method", "yb_method"],
    );
    for (i, row) in rows.iter().enumerate() {
        let r = convergence_domains(row, &eps, cfg.order)?;
        csv.row([
            (i + 1).to_string(),
            row.label().into(),
            r.ya.describe(),
            r.yb.describe(),
            f(r.ya_estimate.radius.value()),
            f(r.yb_inner_estimate.radius.value()),
            method(&r.ya_estimate).into(),
            method(&r.yb_inner_estimate).into(),
        ]);
    }
    Ok(vec![Artifact::Csv(csv)])
}

const FIG3_LEVELS: usize = 4;

pub fn fig3<S: Scalar>(cfg: &ExperimentConfig) -> Result<Vec<Artifact>, Failure> {
    let eps: S = cfg.scalar(&cfg.epsilon);
    let order = cfg.order;
    // y₀ = G(0,ε)·(e^{−ε}1): the tags cancel
    let y0 = apply_group_at_origin(&eps, &ones::<S>(FIG3_LEVELS + order)).body;
    let pair = solve_ivp_pair(&CoefVector::new(y0), &eps, FIG3_LEVELS, order)?;
    let mut csv = Csv::new("fig3.csv", &["n", "x", "yA", "yB", "ya_inside"]);
    let mut rows: Vec<Vec<[String; 5]>> = vec![Vec::new(); FIG3_LEVELS];
    for j in -60i64..=60 {
        let x = S::ratio(j, 20);
        if (S::one() + eps.clone() * x.clone()).is_zero() {
            continue;
        }
        let inside = (eps.clone() * x.clone()).abs() < S::one();
        let ya = pair.ya_at(&x);
        let yb = pair.yb_at(&x)?;
        for n in 0..FIG3_LEVELS {
            let a = if inside { f(ya[n].to_f64()) } else { f(f64::NAN) };
            rows[n].push([(n + 1).to_string(), f(x.to_f64()), a, f(yb[n].to_f64()), u8::from(inside).to_string()]);
        }
    }
    for level in rows {
        for r in level {
            csv.row(r);
        }
    }
    Ok(vec![Artifact::Csv(csv)])
}
