//! Moment hierarchies `duₙ/dt = a·n(n−1)uₙ₋₂ − b·n·uₙ + c·uₙ₊₂` of the
//! diffusion equation `∂ₜu = a∂ₓ²u + b∂ₓ(xu) + c·x²u`.
//!
//! With c = 0 the system is backward recursive and integrates to a unique
//! polynomial solution; with c ≠ 0 it is forward recursive and two functions
//! `u₀(t)`, `u₁(t)` stay free.

use crate::error::{Error, Result};
use crate::scalar::{factorial, Scalar};
use crate::series::TruncatedSeries;
use crate::uniqueness::{BumpSpec, BumpTable};
use crate::Rational;
use num::{One, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct MomentSystemSpec<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Backward,
    Forward,
}

impl<S: Scalar> MomentSystemSpec<S> {
    pub fn new(a: S, b: S, c: S) -> Self {
        MomentSystemSpec { a, b, c }
    }

    /// `∂ₜu = ∂ₓ²u`
    pub fn heat() -> Self {
        Self::new(S::one(), S::zero(), S::zero())
    }

    /// `∂ₜu = ∂ₓ²u − x²u`
    pub fn harmonic() -> Self {
        Self::new(S::one(), S::zero(), -S::one())
    }

    pub fn direction(&self) -> Direction {
        if self.c.is_zero() {
            Direction::Backward
        } else {
            Direction::Forward
        }
    }

    /// Right-hand side for moments `u₀..u_N`, with `uₙ = 0` beyond N.
    pub fn rhs(&self, u: &[S]) -> Vec<S> {
        let get = |n: i64| if n < 0 || n as usize >= u.len() { S::zero() } else { u[n as usize].clone() };
        (0..u.len() as i64)
            .map(|n| {
                let nn = S::from_i64(n);
                self.a.clone() * S::from_i64(n * (n - 1)) * get(n - 2) - self.b.clone() * nn * get(n)
                    + self.c.clone() * get(n + 2)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSpec<S> {
    pub mean: S,
    pub variance: S,
    pub weight: S,
}

impl<S: Scalar> GaussianSpec<S> {
    pub fn new(mean: S, variance: S) -> Result<Self> {
        if variance.to_f64() <= 0.0 {
            return Err(Error::InvalidArgument("variance must be positive".into()));
        }
        Ok(GaussianSpec { mean, variance, weight: S::one() })
    }

    /// The initial profile `π^{−1/2}e^{−(x−1)²}`.
    pub fn reference() -> Self {
        GaussianSpec { mean: S::one(), variance: S::ratio(1, 2), weight: S::one() }
    }
}

/// `m₀..m_{n_max}` from `mₙ = μ·mₙ₋₁ + (n−1)σ²·mₙ₋₂`.
pub fn gaussian_moments<S: Scalar>(spec: &GaussianSpec<S>, n_max: usize) -> Vec<S> {
    let mut m = Vec::with_capacity(n_max + 1);
    m.push(spec.weight.clone());
    for n in 1..=n_max {
        let mut v = spec.mean.clone() * m[n - 1].clone();
        if n >= 2 {
            v = v + S::from_i64(n as i64 - 1) * spec.variance.clone() * m[n - 2].clone();
        }
        m.push(v);
    }
    m
}

/// Closed solution of the backward system (b = 0, c = 0):
/// `uₙ(t) = Σ_k aᵏ·n!/((n−2k)!·k!)·c_{n−2k}·tᵏ`, n = 0..n_max.
pub fn backward_solution<S: Scalar>(spec: &MomentSystemSpec<S>, constants: &[S], t: &S, n_max: usize) -> Result<Vec<S>> {
    if spec.direction() == Direction::Forward {
        return Err(Error::WrongDirection);
    }
    if !spec.b.is_zero() {
        return Err(Error::InvalidArgument("the closed backward solution assumes b = 0".into()));
    }
    if constants.len() < n_max + 1 {
        return Err(Error::MissingConstants { needed: n_max + 1, supplied: constants.len() });
    }
    Ok((0..=n_max)
        .map(|n| {
            let nf = S::from_bigint(&factorial(n as u64));
            (0..=n / 2).fold(S::zero(), |acc, k| {
                let w = nf.clone() / S::from_bigint(&(factorial((n - 2 * k) as u64) * factorial(k as u64)));
                acc + w * spec.a.powi(k as i64) * constants[n - 2 * k].clone() * t.powi(k as i64)
            })
        })
        .collect())
}

/// `A⁽¹⁾ᵢ(n)` for n ≥ −1 and `A⁽²⁾ⱼ(m)` for m ≥ 0; empty sums are 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ACoeffTable {
    /// `a1[i][n + 1]`
    a1: Vec<Vec<Rational>>,
    /// `a2[j][m]`, row 0 unused
    a2: Vec<Vec<Rational>>,
    n_max: i64,
}

impl ACoeffTable {
    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn a1(&self, i: usize, n: i64) -> Rational {
        if n < -1 || n > self.n_max {
            panic!("A1 index n = {n} outside the table");
        }
        self.a1.get(i).map(|row| row[(n + 1) as usize].clone()).unwrap_or_else(Rational::zero)
    }

    pub fn a2(&self, j: usize, m: i64) -> Rational {
        if m < 0 || m > self.n_max {
            panic!("A2 index m = {m} outside the table");
        }
        if j == 0 {
            return Rational::zero();
        }
        self.a2.get(j).map(|row| row[m as usize].clone()).unwrap_or_else(Rational::zero)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let dump = |rows: &[Vec<Rational>]| -> Vec<Vec<String>> {
            rows.iter().map(|r| r.iter().map(|v| v.render()).collect()).collect()
        };
        serde_json::json!({
            "n_max": self.n_max,
            "a1_n_offset": -1,
            "a1": dump(&self.a1),
            "a2": dump(&self.a2[1..]),
            "a2_j_offset": 1,
        })
    }
}

/// Tables up to `i, j ≤ i_max` and `n, m ≤ n_max`.
pub fn forward_a_coefficients(i_max: usize, n_max: usize) -> ACoeffTable {
    let nm = n_max as i64;
    let width = n_max + 2;
    let mut a1 = vec![vec![Rational::one(); width]];
    for i in 1..=i_max {
        let prev = &a1[i - 1];
        let row = (-1..=nm)
            .map(|n| {
                let upper = n - (2 * i as i64 - 1);
                (0..=upper).fold(Rational::zero(), |acc, k| {
                    let arg = n - 2 - k;
                    if arg < -1 {
                        return acc;
                    }
                    acc + Rational::from_i64((2 * n - 2 * k) * (2 * n - 1 - 2 * k)) * prev[(arg + 1) as usize].clone()
                })
            })
            .collect();
        a1.push(row);
    }
    let mut a2 = vec![vec![Rational::zero(); n_max + 1], vec![Rational::one(); n_max + 1]];
    for j in 2..=i_max.max(1) + 1 {
        let prev = &a2[j - 1];
        let row = (0..=nm)
            .map(|m| {
                let upper = m - (2 * j as i64 - 3);
                (1..=upper).fold(Rational::zero(), |acc, k| {
                    let arg = m - 1 - k;
                    if arg < 0 {
                        return acc;
                    }
                    acc + Rational::from_i64((2 * m - 2 * k) * (2 * m + 1 - 2 * k)) * prev[arg as usize].clone()
                })
            })
            .collect();
        a2.push(row);
    }
    ACoeffTable { a1, a2, n_max: nm }
}

/// Terms `(sign·A, derivative order)` expressing level L through u₀ (even L)
/// or u₁ (odd L).
fn solved_form_terms(table: &ACoeffTable, level: usize) -> Result<Vec<(Rational, usize)>> {
    if level < 2 {
        return Ok(vec![(Rational::one(), 0)]);
    }
    let mut out = Vec::new();
    if level % 2 == 0 {
        let n = (level / 2 - 1) as i64;
        if n > table.n_max {
            return Err(Error::InvalidArgument(format!("A table too small for level {level}")));
        }
        let sign = Rational::from_i64(if (n + 1) % 2 == 0 { 1 } else { -1 });
        for i in 0..=((n + 1) / 2) as usize {
            let d = n + 1 - 2 * i as i64;
            let a = table.a1(i, n);
            if !a.is_zero() {
                out.push((sign.clone() * a, d as usize));
            }
        }
    } else {
        let m = ((level - 1) / 2) as i64;
        if m > table.n_max {
            return Err(Error::InvalidArgument(format!("A table too small for level {level}")));
        }
        let sign = Rational::from_i64(if m % 2 == 0 { 1 } else { -1 });
        for j in 1..=((m + 2) / 2) as usize {
            let d = m + 2 - 2 * j as i64;
            let a = table.a2(j, m);
            if !a.is_zero() {
                out.push((sign.clone() * a, d as usize));
            }
        }
    }
    Ok(out)
}

/// `u_L` of the forward system `(a, b, c) = (1, 0, −1)` from the free
/// functions, as a series in t.
pub fn forward_solved_form<S: Scalar>(
    table: &ACoeffTable,
    u0: &TruncatedSeries<S>,
    u1: &TruncatedSeries<S>,
    level: usize,
) -> Result<TruncatedSeries<S>> {
    let free = if level % 2 == 0 { u0 } else { u1 };
    let terms = solved_form_terms(table, level)?;
    let top = terms.iter().map(|t| t.1).max().unwrap_or(0);
    if !free.is_polynomial() && free.valid_order() < top {
        return Err(Error::DependencyConeViolation { needed: top, supplied: free.valid_order() });
    }
    let mut acc: Option<TruncatedSeries<S>> = None;
    for (coef, d) in terms {
        let c = S::from_rational(&coef);
        let term = free.differentiate_n(d)?.scale(&c);
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.unwrap_or_else(|| TruncatedSeries::zero(free.base().clone(), 0)))
}

/// Same combination from derivative values `jet[d] = u^{(d)}(t)`.
pub fn solved_form_pointwise(table: &ACoeffTable, jet0: &[f64], jet1: &[f64], level: usize) -> Result<f64> {
    let jet = if level % 2 == 0 { jet0 } else { jet1 };
    let mut acc = 0.0;
    for (coef, d) in solved_form_terms(table, level)? {
        let v = jet
            .get(d)
            .ok_or(Error::DependencyConeViolation { needed: d, supplied: jet.len().saturating_sub(1) })?;
        acc += Scalar::to_f64(&coef) * v;
    }
    Ok(acc)
}

/// `c⁽¹⁾ₖ, c⁽²⁾ₖ` for k = 0..K: Taylor data `u₀ = Σ c⁽¹⁾ₖtᵏ/k!`,
/// `u₁ = Σ c⁽²⁾ₖtᵏ/k!` matching the initial moments `uₙ(0)`, n ≤ 2K+1.
pub fn init_coeff_recursion<S: Scalar>(initial_moments: &[S], order: usize) -> Result<(Vec<S>, Vec<S>)> {
    if initial_moments.len() < 2 * order + 2 {
        return Err(Error::MissingConstants { needed: 2 * order + 2, supplied: initial_moments.len() });
    }
    let table = forward_a_coefficients(order / 2 + 1, order.max(1));
    let sign = |k: usize| if k % 2 == 0 { S::one() } else { -S::one() };
    let mut c1: Vec<S> = Vec::with_capacity(order + 1);
    let mut c2: Vec<S> = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut v1 = sign(k) * initial_moments[2 * k].clone();
        let mut v2 = sign(k) * initial_moments[2 * k + 1].clone();
        for i in 1..=k / 2 {
            v1 = v1 - S::from_rational(&table.a1(i, k as i64 - 1)) * c1[k - 2 * i].clone();
            v2 = v2 - S::from_rational(&table.a2(i + 1, k as i64)) * c2[k - 2 * i].clone();
        }
        c1.push(v1);
        c2.push(v2);
    }
    Ok((c1, c2))
}

/// Taylor series of u₀ and u₁ at t = 0 from `init_coeff_recursion` output.
pub fn init_series<S: Scalar>(c1: &[S], c2: &[S]) -> (TruncatedSeries<S>, TruncatedSeries<S>) {
    let scale = |c: &[S]| {
        c.iter()
            .enumerate()
            .map(|(k, v)| v.clone() / S::from_bigint(&factorial(k as u64)))
            .collect::<Vec<_>>()
    };
    (TruncatedSeries::exact(S::zero(), scale(c1)), TruncatedSeries::exact(S::zero(), scale(c2)))
}

/// Exact `u₀(t), u₁(t)` of `∂ₜu = ∂ₓ²u − x²u` from `π^{−1/2}e^{−(x−1)²}`.
pub fn reference_moments(t: f64) -> (f64, f64) {
    let s = 1.0 + 3.0 * (4.0 * t).exp();
    let core = -(1.0 - 4.0 / s) / 3.0;
    let u0 = 2.0 * (core + t).exp() / s.sqrt();
    let u1 = 8.0 * (core + 3.0 * t).exp() / (s * s * s).sqrt();
    (u0, u1)
}

/// Taylor radius of the reference moments: nearest zero of `1 + 3e^{4t}`.
pub fn reference_radius() -> f64 {
    0.25 * (std::f64::consts::PI.powi(2) + 3f64.ln().powi(2)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KolmogorovDirection {
    Forward,
    Inverse,
}

/// The map to the constant-coefficient heat equation and back.
pub fn kolmogorov_point_transform(direction: KolmogorovDirection, (t, x, u): (f64, f64, f64)) -> Result<(f64, f64, f64)> {
    match direction {
        KolmogorovDirection::Forward => {
            Ok((0.25 * (4.0 * t).exp_m1(), x * (2.0 * t).exp(), u * (-0.5 * x * x - t).exp()))
        }
        KolmogorovDirection::Inverse => {
            let s = 1.0 + 4.0 * t;
            if s <= 0.0 {
                return Err(Error::DomainError(format!("1 + 4t̃ = {s} ≤ 0")));
            }
            Ok((0.25 * s.ln(), x / s.sqrt(), u * s.powf(0.25) * (0.5 * x * x / s).exp()))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `values[step][n]`
    pub values: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.values.last().expect("a trajectory has its initial point")
    }

    /// Linear interpolation between steps.
    pub fn at(&self, t: f64) -> Vec<f64> {
        let idx = self.times.partition_point(|&s| s < t);
        if idx == 0 {
            return self.values[0].clone();
        }
        if idx >= self.times.len() {
            return self.last().to_vec();
        }
        let (t0, t1) = (self.times[idx - 1], self.times[idx]);
        let w = (t - t0) / (t1 - t0);
        self.values[idx - 1].iter().zip(&self.values[idx]).map(|(a, b)| a + w * (b - a)).collect()
    }
}

pub const RK4_STEPS: usize = 1024;

/// Fixed-step RK4 of the first N+1 moment equations, closed by `uₙ = 0` for
/// n > N.
pub fn integrate_truncated(spec: &MomentSystemSpec<f64>, initial_moments: &[f64], t_end: f64, depth: usize) -> Result<Trajectory> {
    if t_end < 0.0 {
        return Err(Error::InvalidArgument("t_end must be nonnegative".into()));
    }
    if initial_moments.len() < depth + 1 {
        return Err(Error::MissingConstants { needed: depth + 1, supplied: initial_moments.len() });
    }
    let mut u = initial_moments[..=depth].to_vec();
    let mut out = Trajectory { times: vec![0.0], values: vec![u.clone()] };
    if t_end == 0.0 {
        return Ok(out);
    }
    let h = t_end / RK4_STEPS as f64;
    let axpy = |u: &[f64], k: &[f64], s: f64| u.iter().zip(k).map(|(a, b)| a + s * b).collect::<Vec<_>>();
    for step in 1..=RK4_STEPS {
        let k1 = spec.rhs(&u);
        let k2 = spec.rhs(&axpy(&u, &k1, h / 2.0));
        let k3 = spec.rhs(&axpy(&u, &k2, h / 2.0));
        let k4 = spec.rhs(&axpy(&u, &k3, h));
        for n in 0..u.len() {
            u[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
        }
        out.times.push(step as f64 * h);
        out.values.push(u.clone());
    }
    Ok(out)
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    num::ToPrimitive::to_f64(&crate::scalar::binomial(n as u64, k as u64)).unwrap_or(f64::INFINITY)
}

/// Derivative values `f(t), f′(t), …, f^{(m)}(t)`.
pub type JetFn = Box<dyn Fn(f64, usize) -> Vec<f64> + Send + Sync>;

/// Free-function choices `(f₀, f₁)` and `(f₀ + ψ₀e^{−γ₀²/t²}, f₁ + ψ₁e^{−γ₁²/t²})`
/// with identical data at t = 0.
pub struct AmbiguityPair {
    f: [JetFn; 2],
    psi: [JetFn; 2],
    bumps: [BumpTable; 2],
}

pub const AMBIGUITY_MAX_ORDER: usize = 12;

pub fn ambiguity_pair(f: [JetFn; 2], psi: [JetFn; 2], gamma0: f64, gamma1: f64) -> Result<AmbiguityPair> {
    let table = |g: f64| -> Result<BumpTable> {
        if !(g > 0.0) {
            return Err(Error::InvalidArgument("bump widths must be positive".into()));
        }
        Ok(BumpTable::new(&BumpSpec::new(g * g)?, AMBIGUITY_MAX_ORDER))
    };
    Ok(AmbiguityPair { f, psi, bumps: [table(gamma0)?, table(gamma1)?] })
}

impl AmbiguityPair {
    /// Jet of `u₀` (component 0) or `u₁` (component 1) at t.
    pub fn jet(&self, component: usize, perturbed: bool, t: f64, m: usize) -> Vec<f64> {
        assert!(m <= AMBIGUITY_MAX_ORDER, "jets are tabulated to order {AMBIGUITY_MAX_ORDER}");
        let mut out = (self.f[component])(t, m);
        if perturbed {
            let psi = (self.psi[component])(t, m);
            let bump = &self.bumps[component];
            // Leibniz rule for ψ·b
            for (d, slot) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..=d {
                    acc += binomial_f64(d, j) * psi[j] * bump.derivative(d - j, t);
                }
                *slot += acc;
            }
        }
        out
    }

    /// Largest difference between the two choices over derivative orders ≤ m
    /// at t = 0.
    pub fn initial_data_gap(&self, m: usize) -> f64 {
        (0..2)
            .flat_map(|c| {
                let (a, b) = (self.jet(c, false, 0.0, m), self.jet(c, true, 0.0, m));
                a.into_iter().zip(b).map(|(x, y)| (x - y).abs()).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }

    /// `u_level(t)` through the solved form for either choice.
    pub fn solved_form(&self, table: &ACoeffTable, level: usize, t: f64, perturbed: bool) -> Result<f64> {
        let need = level / 2 + 1;
        solved_form_pointwise(table, &self.jet(0, perturbed, t, need), &self.jet(1, perturbed, t, need), level)
    }
}
