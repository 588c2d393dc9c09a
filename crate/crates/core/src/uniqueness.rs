//! Two global solutions of `y′ₙ + yₙ₊₁ = 0`, `yₙ(0) = 1`:
//! `y^I_n = e^{−x}` and `y^II_n = e^{−x} + (−1)^{n−1} b^{(n−1)}(x)` with the
//! flat bump `b(x) = e^{−γ/x²}`.

use crate::poly::Polynomial;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct BumpSpec<S> {
    pub gamma: S,
}

impl<S: Scalar> BumpSpec<S> {
    pub fn new(gamma: S) -> crate::Result<Self> {
        if gamma.to_f64() <= 0.0 {
            return Err(crate::Error::InvalidArgument("bump width γ must be positive".into()));
        }
        Ok(BumpSpec { gamma })
    }
}

/// `R_m` with `d^m/dx^m e^{−γ/x²} = R_m(1/x) e^{−γ/x²}`.
pub fn bump_polynomial<S: Scalar>(spec: &BumpSpec<S>, m: usize) -> Polynomial<S> {
    let minus_u2 = Polynomial::monomial(-S::one(), 2);
    let two_gamma_u3 = Polynomial::monomial(S::from_i64(2) * spec.gamma.clone(), 3);
    let mut r = Polynomial::constant(S::one());
    for _ in 0..m {
        r = r.derivative().mul(&minus_u2).add(&r.mul(&two_gamma_u3));
    }
    r
}

fn eval_bump(poly: &Polynomial<impl Scalar>, gamma: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    // Term by term in log space: R_m has huge coefficients and u = 1/x can be
    // large while the exponential factor is tiny.
    let u = 1.0 / x;
    let (lu, su) = (u.abs().ln(), u.signum());
    let damp = -gamma * u * u;
    poly.coeffs()
        .iter()
        .enumerate()
        .filter_map(|(j, c)| {
            let lc = c.ln_abs()?;
            let sign = c.to_f64().signum() * if j % 2 == 1 { su } else { 1.0 };
            Some(sign * (lc + j as f64 * lu + damp).exp())
        })
        .sum()
}

pub fn bump_derivative<S: Scalar>(spec: &BumpSpec<S>, m: usize, x: f64) -> f64 {
    eval_bump(&bump_polynomial(spec, m), spec.gamma.to_f64(), x)
}

/// Precomputed `R_0 … R_max` for repeated evaluation.
#[derive(Clone, Debug)]
pub struct BumpTable {
    gamma: f64,
    polys: Vec<Polynomial<crate::Rational>>,
    float_polys: Vec<Polynomial<f64>>,
}

impl BumpTable {
    pub fn new<S: Scalar>(spec: &BumpSpec<S>, max_order: usize) -> Self {
        let exact = spec.gamma.to_rational();
        let mut polys = Vec::new();
        let mut float_polys = Vec::new();
        match exact {
            Some(gamma) => polys = (0..=max_order).map(|m| bump_polynomial(&BumpSpec { gamma: gamma.clone() }, m)).collect(),
            None => {
                let s = BumpSpec { gamma: spec.gamma.to_f64() };
                float_polys = (0..=max_order).map(|m| bump_polynomial(&s, m)).collect();
            }
        }
        BumpTable { gamma: spec.gamma.to_f64(), polys, float_polys }
    }

    pub fn max_order(&self) -> usize {
        self.polys.len().max(self.float_polys.len()) - 1
    }

    pub fn derivative(&self, m: usize, x: f64) -> f64 {
        if !self.polys.is_empty() {
            eval_bump(&self.polys[m], self.gamma, x)
        } else {
            eval_bump(&self.float_polys[m], self.gamma, x)
        }
    }

    pub fn y_ii(&self, n: usize, x: f64) -> f64 {
        (-x).exp() + sign(n - 1) * self.derivative(n - 1, x)
    }

    pub fn y_ii_derivative(&self, n: usize, x: f64) -> f64 {
        -(-x).exp() + sign(n - 1) * self.derivative(n, x)
    }
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn y_i(_n: usize, x: f64) -> f64 {
    (-x).exp()
}

pub fn alt_solution<S: Scalar>(spec: &BumpSpec<S>, n: usize, x: f64) -> f64 {
    assert!(n >= 1, "levels are 1-based");
    (-x).exp() + sign(n - 1) * bump_derivative(spec, n - 1, x)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub left: f64,
    pub right: f64,
}

impl Interval {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn contains(&self, x: f64) -> bool {
        self.left < x && x < self.right
    }
}

const BISECTION_TOL: f64 = 1e-6;

/// Maximal interval around 0 on which `|y^II_n − y^I_n| < δ`. Sides that never
/// reach δ within `100·√γ` are reported as infinite.
pub fn uniqueness_bounds<S: Scalar>(spec: &BumpSpec<S>, n: usize, delta: f64) -> crate::Result<Interval> {
    if n < 1 || !(delta > 0.0) {
        return Err(crate::Error::InvalidArgument("need n ≥ 1 and δ > 0".into()));
    }
    let table = BumpTable::new(spec, n - 1);
    let gap = |x: f64| table.derivative(n - 1, x).abs();
    let width = spec.gamma.to_f64().sqrt();
    let step = 1e-3 * width;
    let limit = 100.0 * width;
    let edge = |dir: f64| {
        let mut inside = 0.0;
        loop {
            let next = inside + step;
            if next > limit {
                return dir * f64::INFINITY;
            }
            if gap(dir * next) >= delta {
                let (mut lo, mut hi) = (inside, next);
                while hi - lo > BISECTION_TOL {
                    let mid = 0.5 * (lo + hi);
                    if gap(dir * mid) >= delta {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return dir * 0.5 * (lo + hi);
            }
            inside = next;
        }
    };
    Ok(Interval { left: edge(-1.0), right: edge(1.0) })
}

pub fn uniqueness_interval<S: Scalar>(spec: &BumpSpec<S>, n: usize, delta: f64) -> crate::Result<f64> {
    uniqueness_bounds(spec, n, delta).map(|i| i.length())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairResiduals {
    /// Max over the grid of `|y′ₙ + yₙ₊₁|`, one entry per level `n < N`.
    pub y_i: Vec<f64>,
    pub y_ii: Vec<f64>,
}

/// Adds a constant offset to one level of `y^II` — a deliberate non-solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    pub level: usize,
    pub offset: f64,
}

pub fn verify_global_pair<S: Scalar>(spec: &BumpSpec<S>, depth: usize, grid: &[f64]) -> PairResiduals {
    verify_global_pair_perturbed(spec, depth, grid, None)
}

pub fn verify_global_pair_perturbed<S: Scalar>(
    spec: &BumpSpec<S>,
    depth: usize,
    grid: &[f64],
    perturbation: Option<Perturbation>,
) -> PairResiduals {
    let table = BumpTable::new(spec, depth);
    let shift = |n: usize| match perturbation {
        Some(p) if p.level == n => p.offset,
        _ => 0.0,
    };
    let levels = depth.saturating_sub(1);
    let mut out = PairResiduals { y_i: vec![0.0; levels], y_ii: vec![0.0; levels] };
    for n in 1..=levels {
        for &x in grid {
            let r1 = (-(-x).exp() + y_i(n + 1, x)).abs();
            let r2 = (table.y_ii_derivative(n, x) + table.y_ii(n + 1, x) + shift(n + 1)).abs();
            out.y_i[n - 1] = out.y_i[n - 1].max(r1);
            out.y_ii[n - 1] = out.y_ii[n - 1].max(r2);
        }
    }
    out
}
