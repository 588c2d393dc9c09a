//! The nonlinear hierarchy `y′ₙ − yₙ/x = y²ₙ₊₁/x³` through the Ansatz
//! `yₙ = x²·Σ_k λ_{n,k}(x−a)^k`, which turns it into
//!
//! `k·λ_{n,k} + a(k+1)·λ_{n,k+1} + λ_{n,k} = Σ_l λ_{n+1,k−l}·λ_{n+1,l}`.

use crate::error::{Error, Result};
use crate::hierarchy::{GeneralRiccatiHierarchySpec, HierarchyState, Representation};
use crate::linear::CoefVector;
use crate::poly::Polynomial;
use crate::scalar::{factorial, Scalar};
use crate::series::{Radius, TruncatedSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaVector<S>(pub Vec<S>);

#[derive(Clone, Debug, PartialEq)]
pub enum LambdaSeed<S> {
    /// `cₙ = λ_{n,0}`, n = 1..M (a ≠ 0).
    Constants(CoefVector<S>),
    /// a = 0: top level taken from the σ closed forms (k ≤ 3 only).
    Sigma(SigmaVector<S>),
    /// a = 0: the whole top-level row `λ_{N,0..K}` supplied as closure.
    TopRow(Vec<S>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaTable<S> {
    /// `rows[n−1][k]`; rows may carry more orders than the table order.
    rows: Vec<Vec<S>>,
    order: usize,
    a: S,
    seed: LambdaSeed<S>,
    derived_by_constraint: bool,
}

impl<S: Scalar> LambdaTable<S> {
    pub fn depth(&self) -> usize {
        self.rows.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn a(&self) -> &S {
        &self.a
    }

    pub fn seed(&self) -> &LambdaSeed<S> {
        &self.seed
    }

    /// Entries beyond k = 3 at a = 0 come from the constraint alone, with no
    /// closed form to compare against.
    pub fn derived_by_constraint(&self) -> bool {
        self.derived_by_constraint
    }

    pub fn get(&self, n: usize, k: usize) -> &S {
        &self.rows[n - 1][k]
    }

    pub fn row(&self, n: usize) -> &[S] {
        &self.rows[n - 1][..=self.order]
    }

    /// Largest |lhs − rhs| of the recurrence over every (n, k) whose inputs
    /// are in the table.
    pub fn recurrence_defect(&self) -> S {
        let mut worst = S::zero();
        for n in 1..self.depth() {
            let upper = if self.a.is_zero() { self.order } else { self.order - 1 };
            for k in 0..=upper {
                let d = (recurrence_lhs(&self.rows[n - 1], &self.a, k) - convolution(&self.rows[n], k)).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a": self.a.to_json(),
            "depth": self.depth(),
            "order": self.order,
            "derived_by_constraint": self.derived_by_constraint,
            "lambda": (1..=self.depth())
                .map(|n| self.row(n).iter().map(|v| v.to_json()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

fn convolution<S: Scalar>(row: &[S], k: usize) -> S {
    (0..=k).fold(S::zero(), |acc, l| acc + row[k - l].clone() * row[l].clone())
}

fn recurrence_lhs<S: Scalar>(row: &[S], a: &S, k: usize) -> S {
    let k1 = S::from_i64(k as i64 + 1);
    let next = if a.is_zero() { S::zero() } else { a.clone() * k1.clone() * row[k + 1].clone() };
    k1 * row[k].clone() + next
}

pub fn lambda_table<S: Scalar>(seed: LambdaSeed<S>, a: &S, depth: usize, order: usize) -> Result<LambdaTable<S>> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be positive".into()));
    }
    if a.is_zero() {
        return lambda_table_origin(seed, depth, order);
    }
    let LambdaSeed::Constants(c) = &seed else {
        return Err(Error::InvalidArgument("a ≠ 0 takes the constants cₙ as seed".into()));
    };
    // λ_{n,k} depends on c_n … c_{n+k}
    let levels = depth + order;
    if c.len() < levels {
        return Err(Error::DependencyConeViolation { needed: levels, supplied: c.len() });
    }
    let mut rows: Vec<Vec<S>> = vec![Vec::new(); levels];
    for n in (1..=levels).rev() {
        let reach = order.min(levels - n);
        let mut row = Vec::with_capacity(reach + 1);
        row.push(c.get(n).clone());
        for k in 0..reach {
            let k1 = S::from_i64(k as i64 + 1);
            let rhs = convolution(&rows[n], k) - k1.clone() * row[k].clone();
            row.push(rhs / (k1 * a.clone()));
        }
        rows[n - 1] = row;
    }
    rows.truncate(depth);
    Ok(LambdaTable { rows, order, a: a.clone(), seed, derived_by_constraint: false })
}

fn lambda_table_origin<S: Scalar>(seed: LambdaSeed<S>, depth: usize, order: usize) -> Result<LambdaTable<S>> {
    let (top, derived) = match &seed {
        LambdaSeed::Constants(_) => return Err(Error::ClosureRequired),
        LambdaSeed::Sigma(sigma) => {
            if order > 3 {
                return Err(Error::ClosureRequired);
            }
            if sigma.0.len() < order + 1 {
                return Err(Error::MissingConstants { needed: order + 1, supplied: sigma.0.len() });
            }
            ((0..=order).map(|k| lambda_closed_sigma(&sigma.0, depth, k)).collect::<Vec<S>>(), false)
        }
        LambdaSeed::TopRow(row) => {
            if row.len() < order + 1 {
                return Err(Error::ClosureRequired);
            }
            (row[..=order].to_vec(), order > 3)
        }
    };
    // (k+1)·λ_{n,k} = Σ_l λ_{n+1,k−l}λ_{n+1,l}: each level follows from the one above
    let mut rows = vec![Vec::new(); depth];
    rows[depth - 1] = top;
    for n in (1..depth).rev() {
        rows[n - 1] = (0..=order).map(|k| convolution(&rows[n], k) / S::from_i64(k as i64 + 1)).collect();
    }
    if let LambdaSeed::Sigma(sigma) = &seed {
        for n in 1..depth {
            for k in 0..=order {
                let want = lambda_closed_sigma(&sigma.0, n, k);
                let got = &rows[n - 1][k];
                let scale = want.to_f64().abs().max(1.0);
                if (got.to_f64() - want.to_f64()).abs() > 1e-10 * scale {
                    return Err(Error::InternalInconsistency(format!(
                        "λ_{{{n},{k}}} from the constraint disagrees with its σ closed form"
                    )));
                }
            }
        }
    }
    Ok(LambdaTable { rows, order, a: S::zero(), seed, derived_by_constraint: derived })
}

fn exp_s<S: Scalar>(x: &S) -> S {
    if x.is_zero() {
        S::one()
    } else {
        S::from_f64(x.to_f64().exp())
    }
}

fn pow2<S: Scalar>(e: i64) -> S {
    S::from_i64(2).powi(e)
}

/// The a ≠ 0 closed forms for k ≤ 3; `None` beyond.
pub fn lambda_closed_constants<S: Scalar>(c: &CoefVector<S>, a: &S, n: usize, k: usize) -> Option<S> {
    let cn = |j: usize| c.get(n + j).clone();
    let i = S::from_i64;
    match k {
        0 => Some(cn(0)),
        1 => Some(-(cn(0) - cn(1) * cn(1)) / a.clone()),
        2 => Some((cn(0) - i(2) * cn(1) * cn(1) + cn(1) * cn(2) * cn(2)) / a.powi(2)),
        3 => Some(
            -(i(3) * cn(0) - i(9) * cn(1) * cn(1) + i(9) * cn(1) * cn(2) * cn(2)
                - i(2) * cn(1) * cn(2) * cn(3) * cn(3)
                - cn(2).powi(4))
                / (i(3) * a.powi(3)),
        ),
        _ => None,
    }
}

/// The a = 0 closed forms in σ for k ≤ 3. Exponentials are exact only when
/// σ₁ = 0.
pub fn lambda_closed_sigma<S: Scalar>(sigma: &[S], n: usize, k: usize) -> S {
    let n_i = n as i64;
    let s = |j: usize| sigma.get(j - 1).cloned().unwrap_or_else(S::zero);
    let i = S::from_i64;
    let e = |shift: i64| exp_s(&((pow2::<S>(1 - n_i) - i(shift)) * s(1)));
    let e1 = exp_s(&s(1));
    let p3 = |m: i64| i(3).powi(m);
    match k {
        0 => e(0),
        1 => e(1) * s(2),
        2 => {
            pow2::<S>(-n_i)
                * e(2)
                * (s(2) * s(2) * (pow2::<S>(n_i) - p3(n_i)) + i(2) * p3(n_i - 1) * e1 * s(3))
        }
        3 => {
            pow2::<S>(-1 - n_i)
                * e(3)
                * (s(2).powi(3) * (pow2::<S>(1 + n_i) + pow2::<S>(2 + 2 * n_i) - i(2) * p3(1 + n_i))
                    + (i(4) * p3(n_i) - i(4).powi(1 + n_i)) * e1.clone() * s(2) * s(3)
                    + i(4).powi(n_i) * e1.clone() * e1 * s(4))
        }
        _ => panic!("σ closed forms exist for k ≤ 3 only"),
    }
}

/// `zₙ = Σ_k λ_{n,k}(x−a)^k` at base a, i.e. `yₙ = x²·zₙ`.
pub fn assemble_solution<S: Scalar>(table: &LambdaTable<S>) -> Result<HierarchyState<S>> {
    let levels = (1..=table.depth())
        .map(|n| TruncatedSeries::exact(table.a.clone(), table.row(n).to_vec()))
        .collect();
    HierarchyState::with_representation(levels, Representation::ScaledBySquare)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpecialSolution {
    /// `x²` on every level; with `tau`, `e^{τ2^{1−n}}x²`.
    Y1 { tau: f64 },
    /// `(−1, x, 0, 0, …)`
    Y2,
    /// `bₙ·x^{2+2^{2−n}}`
    Y3,
}

impl SpecialSolution {
    pub fn name(&self) -> &'static str {
        match self {
            SpecialSolution::Y1 { .. } => "Y1",
            SpecialSolution::Y2 => "Y2",
            SpecialSolution::Y3 => "Y3",
        }
    }
}

/// `ln bₙ` with `bₙ = 5^{−2^{−n}}·Π_{k<n}(1+2^{2−k})^{2^{k−n}}`.
pub fn y3_log_prefactor(n: usize) -> f64 {
    let n = n as i32;
    let mut acc = -(2f64).powi(-n) * 5f64.ln();
    for k in 0..n {
        acc += (2f64).powi(k - n) * (1.0 + (2f64).powi(2 - k)).ln();
    }
    acc
}

/// Level-n exponent of Y3.
pub fn y3_exponent(n: usize) -> f64 {
    2.0 + (2f64).powi(2 - n as i32)
}

/// `(cₙ, pₙ)` such that `yₙ = cₙ·x^{pₙ}`.
fn monomial_form(id: SpecialSolution, n: usize) -> (f64, f64) {
    match id {
        SpecialSolution::Y1 { tau } => ((tau * (2f64).powi(1 - n as i32)).exp(), 2.0),
        SpecialSolution::Y2 => match n {
            1 => (-1.0, 0.0),
            2 => (1.0, 1.0),
            _ => (0.0, 0.0),
        },
        SpecialSolution::Y3 => (y3_log_prefactor(n).exp(), y3_exponent(n)),
    }
}

pub fn special_solution<S: Scalar>(id: SpecialSolution, n: usize, x: &S) -> Result<S> {
    match id {
        SpecialSolution::Y1 { tau } => {
            let scale = if tau == 0.0 { S::one() } else { S::from_f64(monomial_form(id, n).0) };
            Ok(scale * x.clone() * x.clone())
        }
        SpecialSolution::Y2 => Ok(match n {
            1 => -S::one(),
            2 => x.clone(),
            _ => S::zero(),
        }),
        SpecialSolution::Y3 => {
            if x.to_f64() <= 0.0 {
                return Err(Error::DomainError("Y3 has fractional powers; needs x > 0".into()));
            }
            if n == 1 {
                return Ok(x.powi(4));
            }
            let (c, p) = monomial_form(id, n);
            Ok(S::from_f64(c * x.to_f64().powf(p)))
        }
    }
}

pub fn special_solution_derivative<S: Scalar>(id: SpecialSolution, n: usize, x: &S) -> Result<S> {
    match id {
        SpecialSolution::Y1 { .. } | SpecialSolution::Y3 => {
            if matches!(id, SpecialSolution::Y3) && x.to_f64() <= 0.0 {
                return Err(Error::DomainError("Y3 has fractional powers; needs x > 0".into()));
            }
            if matches!(id, SpecialSolution::Y1 { tau } if tau == 0.0) {
                return Ok(S::from_i64(2) * x.clone());
            }
            if matches!(id, SpecialSolution::Y3) && n == 1 {
                return Ok(S::from_i64(4) * x.powi(3));
            }
            let (c, p) = monomial_form(id, n);
            Ok(S::from_f64(c * p * x.to_f64().powf(p - 1.0)))
        }
        SpecialSolution::Y2 => Ok(if n == 2 { S::one() } else { S::zero() }),
    }
}

/// Pointwise `y′ₙ − yₙ/x − y²ₙ₊₁/x³`.
pub fn special_solution_residual<S: Scalar>(id: SpecialSolution, n: usize, x: &S) -> Result<S> {
    let spec = GeneralRiccatiHierarchySpec::nonlinear();
    spec.pointwise_residual(
        x,
        &special_solution(id, n, x)?,
        &special_solution_derivative(id, n, x)?,
        &special_solution(id, n + 1, x)?,
    )
}

/// Closed-form Taylor coefficient of `zₙ = y₃ₙ/x²` at a:
/// `bₙ·a^{β−k}·β(β−1)…(β−k+1)/k!`, `β = 2^{2−n}`.
pub fn matched_lambda_y3(a: f64, n: usize, k: usize) -> f64 {
    let beta = (2f64).powi(2 - n as i32);
    let mut falling = 1.0;
    for j in 0..k {
        falling *= (beta - j as f64) / (j as f64 + 1.0);
    }
    let log_mag = y3_log_prefactor(n) + (beta - k as f64) * a.abs().ln();
    // left of the origin x^β is only real for integer β
    let sign = if a > 0.0 {
        1.0
    } else if beta.fract() != 0.0 {
        f64::NAN
    } else if (beta as i64 - k as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    sign * falling * log_mag.exp()
}

/// The same coefficient without the prefactor `bₙ`, exactly, where β is an
/// integer (n ≤ 2).
pub fn matched_lambda_y3_normalized<S: Scalar>(a: &S, n: usize, k: usize) -> Option<S> {
    let beta: i64 = match n {
        1 => 2,
        2 => 1,
        _ => return None,
    };
    if (k as i64) > beta {
        return Some(S::zero());
    }
    let mut falling = S::one();
    for j in 0..k as i64 {
        falling = falling * S::from_i64(beta - j);
    }
    Some(falling / S::from_bigint(&factorial(k as u64)) * a.powi(beta - k as i64))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoverageVerdict {
    /// The Ansatz reproduces the solution for all x.
    Global,
    /// Reproduced only on the disc `|x − a| < radius`.
    Partial { radius: f64 },
    /// Not representable at the origin at all (the Ansatz forces `yₙ(0) = 0`);
    /// a local matching with the given radius still exists.
    None { local_radius: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelCoverage {
    pub level: usize,
    pub radius: Radius,
    pub covers_origin: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    pub solution: SpecialSolution,
    pub a: f64,
    pub verdict: CoverageVerdict,
    pub levels: Vec<LevelCoverage>,
    /// `matched[n−1][k]`: Taylor coefficients of `yₙ/x²` at a.
    pub matched: Vec<Vec<f64>>,
    /// Largest relative gap between the matched coefficients and those the
    /// recurrence produces from the matched `λ_{n,0}`.
    pub recurrence_mismatch: f64,
}

/// Taylor coefficients at a of `c·x^p` for real p, by series arithmetic.
fn power_expansion(c: f64, p: f64, a: f64, order: usize) -> Result<Vec<f64>> {
    if c == 0.0 {
        return Ok(vec![0.0; order + 1]);
    }
    let x = TruncatedSeries::exact(a, vec![a, 1.0]).truncate(order).with_valid_order(order);
    let s = if p.fract() == 0.0 { x.powi(p as i64)? } else { x.powf(p)? };
    let mut out = s.scale(&c).into_coeffs();
    out.resize(order + 1, 0.0);
    Ok(out)
}

pub fn coverage_check(id: SpecialSolution, a: f64, depth: usize, order: usize) -> Result<CoverageReport> {
    if a == 0.0 {
        return Err(Error::InvalidArgument("coverage analysis expands around a ≠ 0".into()));
    }
    let levels_needed = depth + order;
    let mut matched = Vec::with_capacity(levels_needed);
    for n in 1..=levels_needed {
        let (c, p) = monomial_form(id, n);
        matched.push(power_expansion(c, p - 2.0, a, order)?);
    }

    let seed = CoefVector::new(matched.iter().map(|row| row[0]).collect());
    let table = lambda_table(LambdaSeed::Constants(seed), &a, depth, order)?;
    let mut mismatch: f64 = 0.0;
    for n in 1..=depth {
        for (k, want) in matched[n - 1].iter().enumerate() {
            let got = *table.get(n, k);
            mismatch = mismatch.max((got - want).abs() / want.abs().max(1.0));
        }
    }

    let mut levels = Vec::with_capacity(depth);
    for n in 1..=depth {
        let radius = TruncatedSeries::exact(a, matched[n - 1].clone()).radius_estimate()?.radius;
        let (c, p) = monomial_form(id, n);
        let vanishes_at_origin = c == 0.0 || p > 0.0;
        // a finite radius here always comes from the branch point or pole at
        // the origin itself, so only entire expansions reach it
        levels.push(LevelCoverage { level: n, radius, covers_origin: vanishes_at_origin && radius == Radius::Infinite });
    }
    let finite_min = levels
        .iter()
        .filter_map(|l| match l.radius {
            Radius::Finite(r) => Some(r),
            Radius::Zero => Some(0.0),
            Radius::Infinite => None,
        })
        .fold(f64::INFINITY, f64::min);
    let representable = (1..=depth).all(|n| {
        let (c, p) = monomial_form(id, n);
        c == 0.0 || p > 0.0
    });
    let verdict = if !representable {
        CoverageVerdict::None { local_radius: finite_min }
    } else if finite_min.is_infinite() {
        CoverageVerdict::Global
    } else {
        CoverageVerdict::Partial { radius: finite_min }
    };
    matched.truncate(depth);
    Ok(CoverageReport { solution: id, a, verdict, levels, matched, recurrence_mismatch: mismatch })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UncoupledInvariance {
    /// `(e^ε x, e^{2ε} yₙ)`
    T1,
    /// `(x/(1−εx), yₙ/(1−εx))`
    T2,
}

/// Values and first derivatives of levels 1..N at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct NonlinearPoint {
    pub x: f64,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

impl NonlinearPoint {
    pub fn of_special(id: SpecialSolution, depth: usize, x: f64) -> Result<Self> {
        Ok(NonlinearPoint {
            x,
            y: (1..=depth).map(|n| special_solution(id, n, &x)).collect::<Result<_>>()?,
            dy: (1..=depth).map(|n| special_solution_derivative(id, n, &x)).collect::<Result<_>>()?,
        })
    }

    /// Truncated `yₙ = x²·zₙ` from a λ table, `zₙ = Σ_k λ_{n,k}(x−a)^k`.
    pub fn from_table<S: Scalar>(table: &LambdaTable<S>, x: f64) -> Self {
        let h = x - table.a().to_f64();
        let (mut y, mut dy) = (Vec::new(), Vec::new());
        for n in 1..=table.depth() {
            let (mut z, mut dz) = (0.0, 0.0);
            for c in table.row(n).iter().rev() {
                dz = dz * h + z;
                z = z * h + c.to_f64();
            }
            y.push(x * x * z);
            dy.push(2.0 * x * z + x * x * dz);
        }
        NonlinearPoint { x, y, dy }
    }

    /// max over n < N of `|y′ₙ − yₙ/x − y²ₙ₊₁/x³|`.
    pub fn hierarchy_residual(&self) -> Result<f64> {
        let spec = GeneralRiccatiHierarchySpec::<f64>::nonlinear();
        let mut worst: f64 = 0.0;
        for n in 0..self.y.len().saturating_sub(1) {
            let r = spec.pointwise_residual(&self.x, &self.y[n], &self.dy[n], &self.y[n + 1])?;
            worst = worst.max(r.abs());
        }
        Ok(worst)
    }
}

/// The pre-image of `x̃`.
pub fn uncoupled_preimage(which: UncoupledInvariance, epsilon: f64, x_tilde: f64) -> Result<f64> {
    match which {
        UncoupledInvariance::T1 => Ok((-epsilon).exp() * x_tilde),
        UncoupledInvariance::T2 => {
            let d = 1.0 + epsilon * x_tilde;
            if d == 0.0 {
                return Err(Error::TransformSingular(format!("1 + εx̃ = 0 at x̃ = {x_tilde}")));
            }
            Ok(x_tilde / d)
        }
    }
}

pub fn apply_uncoupled_invariance(which: UncoupledInvariance, epsilon: f64, p: &NonlinearPoint) -> Result<NonlinearPoint> {
    match which {
        UncoupledInvariance::T1 => {
            let (s, s2) = (epsilon.exp(), (2.0 * epsilon).exp());
            Ok(NonlinearPoint {
                x: s * p.x,
                y: p.y.iter().map(|v| s2 * v).collect(),
                dy: p.dy.iter().map(|v| s * v).collect(),
            })
        }
        UncoupledInvariance::T2 => {
            let d = 1.0 - epsilon * p.x;
            if d == 0.0 {
                return Err(Error::TransformSingular(format!("1 − εx = 0 at x = {}", p.x)));
            }
            // dỹ/dx̃ = (1 − εx)·y′ + ε·y
            Ok(NonlinearPoint {
                x: p.x / d,
                y: p.y.iter().map(|v| v / d).collect(),
                dy: p.dy.iter().zip(&p.y).map(|(dv, v)| d * dv + epsilon * v).collect(),
            })
        }
    }
}

/// With `φ = c₁x + c₂x²` and `αₙ = 2c₁ + c₂x`: the pair
/// `(α′x − φ′ + φ/x, αₙ − 2αₙ₊₁ − φ′ + 3φ/x)` at each sample.
pub fn uncoupled_constraint_residual<S: Scalar>(c1: &S, c2: &S, samples: &[S]) -> Vec<(S, S)> {
    let phi = Polynomial::new(vec![S::zero(), c1.clone(), c2.clone()]);
    let alpha = Polynomial::new(vec![S::from_i64(2) * c1.clone(), c2.clone()]);
    let (dphi, dalpha) = (phi.derivative(), alpha.derivative());
    samples
        .iter()
        .map(|x| {
            let phi_over_x = phi.eval(x) / x.clone();
            let r1 = dalpha.eval(x) * x.clone() - dphi.eval(x) + phi_over_x.clone();
            // αₙ is the same on every level
            let r2 = alpha.eval(x) - S::from_i64(2) * alpha.eval(x) - dphi.eval(x) + S::from_i64(3) * phi_over_x;
            (r1, r2)
        })
        .collect()
}

/// `x·φ″ − 2φ′ + 2φ/x`; its solutions are exactly `c₁x + c₂x²`.
pub fn classifying_residual<S: Scalar>(phi: &Polynomial<S>, x: &S) -> S {
    let d1 = phi.derivative();
    let d2 = d1.derivative();
    x.clone() * d2.eval(x) - S::from_i64(2) * d1.eval(x) + S::from_i64(2) * phi.eval(x) / x.clone()
}
