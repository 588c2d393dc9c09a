//! Convergence domains of `yᴬ` and `yᴮ` for the four families of initial
//! data, from root-test radii of their level-1 coefficient streams.

use super::group::apply_group_at_origin;
use super::{flow_solution, CoefVector};
use crate::error::Result;
use crate::scalar::{factorial, Scalar};
use crate::series::{Radius, RadiusEstimate};

/// Inner constants `c_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerFamily {
    /// `α jⁿ`
    Power(u32),
    /// `α`
    Constant,
    /// `α/j!`
    InvFactorial,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Table1Row<S> {
    /// `y₀ = G(0,ε)·c` (up to the `e^ε` factor)
    GroupImage { alpha: S, inner: InnerFamily },
    /// `y₀ᵢ = α·i!`
    Factorial { alpha: S },
    /// `y₀ᵢ = c_i`
    Direct { alpha: S, inner: InnerFamily },
    /// `y₀ᵢ = α·(i!)²`
    FactorialSquared { alpha: S },
}

impl<S: Scalar> Table1Row<S> {
    pub fn label(&self) -> &'static str {
        match self {
            Table1Row::GroupImage { .. } => "group_image",
            Table1Row::Factorial { .. } => "factorial",
            Table1Row::Direct { .. } => "direct",
            Table1Row::FactorialSquared { .. } => "factorial_squared",
        }
    }
}

fn inner_value<S: Scalar>(alpha: &S, family: InnerFamily, j: usize) -> S {
    match family {
        InnerFamily::Power(n) => alpha.clone() * S::from_i64(j as i64).powi(n as i64),
        InnerFamily::Constant => alpha.clone(),
        InnerFamily::InvFactorial => alpha.clone() / S::from_bigint(&factorial(j as u64)),
    }
}

/// First `len` initial values of a family (`e^ε` tags dropped).
pub fn initial_values<S: Scalar>(row: &Table1Row<S>, epsilon: &S, len: usize) -> CoefVector<S> {
    match row {
        Table1Row::GroupImage { alpha, inner } => {
            let c: Vec<S> = (1..=len).map(|j| inner_value(alpha, *inner, j)).collect();
            CoefVector::new(apply_group_at_origin(epsilon, &c).body)
        }
        Table1Row::Factorial { alpha } => {
            CoefVector::from_fn(len, |i| alpha.clone() * S::from_bigint(&factorial(i as u64)))
        }
        Table1Row::Direct { alpha, inner } => CoefVector::from_fn(len, |j| inner_value(alpha, *inner, j)),
        Table1Row::FactorialSquared { alpha } => CoefVector::from_fn(len, |i| {
            let f = S::from_bigint(&factorial(i as u64));
            alpha.clone() * f.clone() * f
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// `x = 0` only
    Origin,
    /// `|x| < r`
    Disc { radius: f64 },
    /// all of ℝ
    WholeLine,
    /// ℝ minus the pole `x = −1/ε`
    AllButPole { pole: f64 },
    /// `|x/(1+εx)| < r`
    MoebiusDisc { radius: f64, epsilon: f64 },
}

impl Domain {
    pub fn describe(&self) -> String {
        match self {
            Domain::Origin => "x = 0".into(),
            Domain::Disc { radius } => format!("|x| < {}", crate::scalar::format_f64(*radius)),
            Domain::WholeLine => "R".into(),
            Domain::AllButPole { pole } => format!("R \\ {{{}}}", crate::scalar::format_f64(*pole)),
            Domain::MoebiusDisc { radius, epsilon } => format!(
                "|x/(1+{}x)| < {}",
                crate::scalar::format_f64(*epsilon),
                crate::scalar::format_f64(*radius)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainReport {
    pub ya: Domain,
    pub yb: Domain,
    pub ya_estimate: RadiusEstimate,
    pub yb_inner_estimate: RadiusEstimate,
}

pub fn convergence_domains<S: Scalar>(row: &Table1Row<S>, epsilon: &S, order: usize) -> Result<DomainReport> {
    let len = order + 1;
    let y0 = initial_values(row, epsilon, len);
    let ya = flow_solution(&y0, &S::zero(), 1, order)?;
    let inner_c = CoefVector::new(apply_group_at_origin(&-epsilon.clone(), y0.entries()).body);
    let inner = flow_solution(&inner_c, &S::zero(), 1, order)?;
    let ya_estimate = ya.level(1).radius_estimate()?;
    let yb_inner_estimate = inner.level(1).radius_estimate()?;
    let eps = epsilon.to_f64();
    let ya_dom = match ya_estimate.radius {
        Radius::Zero => Domain::Origin,
        Radius::Infinite => Domain::WholeLine,
        Radius::Finite(r) => Domain::Disc { radius: r },
    };
    let yb_dom = match yb_inner_estimate.radius {
        Radius::Zero => Domain::Origin,
        Radius::Infinite if eps == 0.0 => Domain::WholeLine,
        Radius::Infinite => Domain::AllButPole { pole: -1.0 / eps },
        Radius::Finite(r) => Domain::MoebiusDisc { radius: r, epsilon: eps },
    };
    Ok(DomainReport { ya: ya_dom, yb: yb_dom, ya_estimate, yb_inner_estimate })
}
