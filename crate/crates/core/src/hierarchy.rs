//! The general Riccati-type hierarchy
//! `y′ₙ = q₀ + q₁yₙ + q₂y²ₙ₊₁ + q₃yₙ₊₁`, truncated states, and residuals.

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction<S> {
    pub num: Polynomial<S>,
    pub den: Polynomial<S>,
}

impl<S: Scalar> RationalFunction<S> {
    pub fn new(num: Polynomial<S>, den: Polynomial<S>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("denominator is identically zero".into()));
        }
        Ok(RationalFunction { num, den })
    }

    pub fn constant(c: S) -> Self {
        RationalFunction { num: Polynomial::constant(c), den: Polynomial::constant(S::one()) }
    }

    /// `c / x^k`
    pub fn inverse_power(c: S, k: usize) -> Self {
        RationalFunction { num: Polynomial::constant(c), den: Polynomial::monomial(S::one(), k) }
    }

    pub fn eval(&self, x: &S) -> Result<S> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::PoleEvaluation(x.to_f64()));
        }
        Ok(self.num.eval(x) / d)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneralRiccatiHierarchySpec<S> {
    pub q: [RationalFunction<S>; 4],
}

impl<S: Scalar> GeneralRiccatiHierarchySpec<S> {
    pub fn new(q: [RationalFunction<S>; 4]) -> Self {
        GeneralRiccatiHierarchySpec { q }
    }

    /// `y′ₙ = −yₙ₊₁`
    pub fn linear() -> Self {
        let zero = RationalFunction::constant(S::zero());
        Self::new([zero.clone(), zero.clone(), zero, RationalFunction::constant(-S::one())])
    }

    /// `y′ₙ = yₙ/x + y²ₙ₊₁/x³`
    pub fn nonlinear() -> Self {
        let zero = RationalFunction::constant(S::zero());
        Self::new([
            zero.clone(),
            RationalFunction::inverse_power(S::one(), 1),
            RationalFunction::inverse_power(S::one(), 3),
            zero,
        ])
    }

    pub fn has_pole_at(&self, x: &S) -> bool {
        self.q.iter().any(|f| f.den.eval(x).is_zero())
    }

    /// Pointwise residual `y′ₙ − q₀ − q₁yₙ − q₂y²ₙ₊₁ − q₃yₙ₊₁`.
    pub fn pointwise_residual(&self, x: &S, y_n: &S, dy_n: &S, y_next: &S) -> Result<S> {
        let q: Vec<S> = self.q.iter().map(|f| f.eval(x)).collect::<Result<_>>()?;
        Ok(dy_n.clone()
            - q[0].clone()
            - q[1].clone() * y_n.clone()
            - q[2].clone() * y_next.clone() * y_next.clone()
            - q[3].clone() * y_next.clone())
    }
}

/// How the stored level series relate to `yₙ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    /// The series are `yₙ` themselves.
    Plain,
    /// The series are `zₙ` with `yₙ = x²·zₙ`; this clears the poles of the
    /// nonlinear hierarchy at the origin.
    ScaledBySquare,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HierarchyState<S> {
    levels: Vec<TruncatedSeries<S>>,
    representation: Representation,
}

impl<S: Scalar> HierarchyState<S> {
    pub fn new(levels: Vec<TruncatedSeries<S>>) -> Result<Self> {
        Self::with_representation(levels, Representation::Plain)
    }

    pub fn with_representation(levels: Vec<TruncatedSeries<S>>, representation: Representation) -> Result<Self> {
        let first = levels
            .first()
            .ok_or_else(|| Error::InvalidArgument("a state needs at least one level".into()))?;
        if levels.iter().any(|l| l.base() != first.base()) {
            return Err(Error::BasePointMismatch);
        }
        Ok(HierarchyState { levels, representation })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn base(&self) -> &S {
        self.levels[0].base()
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    /// Level `n`, 1-based.
    pub fn level(&self, n: usize) -> &TruncatedSeries<S> {
        &self.levels[n - 1]
    }

    pub fn levels(&self) -> &[TruncatedSeries<S>] {
        &self.levels
    }

    pub fn valid_orders(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.valid_order()).collect()
    }

    /// The `yₙ` series. At base 0 the `x²` factor is a pure index shift, so
    /// storage grows by two.
    pub fn to_plain(&self) -> Self {
        match self.representation {
            Representation::Plain => self.clone(),
            Representation::ScaledBySquare => {
                let base = self.base().clone();
                let levels = self
                    .levels
                    .iter()
                    .map(|z| {
                        if base.is_zero() {
                            let mut c = vec![S::zero(), S::zero()];
                            c.extend(z.coeffs().iter().cloned());
                            let s = if z.is_polynomial() {
                                TruncatedSeries::polynomial(base.clone(), c)
                            } else {
                                TruncatedSeries::new(base.clone(), c, z.valid_order() + 2).expect("valid order")
                            };
                            if z.is_approximate() { s.mark_approximate() } else { s }
                        } else {
                            let sq = TruncatedSeries::polynomial(
                                base.clone(),
                                vec![base.clone() * base.clone(), S::from_i64(2) * base.clone(), S::one()],
                            );
                            z.mul(&sq).expect("same base").truncate(z.order())
                        }
                    })
                    .collect();
                HierarchyState { levels, representation: Representation::Plain }
            }
        }
    }

    /// Divide out the `x²` factor of a state based at the origin.
    pub fn to_scaled_by_square(&self) -> Result<Self> {
        match self.representation {
            Representation::ScaledBySquare => Ok(self.clone()),
            Representation::Plain => {
                if !self.base().is_zero() {
                    return Err(Error::PoleAtBasePoint);
                }
                let mut levels = Vec::with_capacity(self.levels.len());
                for y in &self.levels {
                    if !(y.coeff(0).is_zero() && y.coeff(1).is_zero()) || y.order() < 2 {
                        return Err(Error::PoleAtBasePoint);
                    }
                    let c = y.coeffs()[2..].to_vec();
                    let s = if y.is_polynomial() {
                        TruncatedSeries::polynomial(S::zero(), c)
                    } else {
                        TruncatedSeries::new(S::zero(), c, y.valid_order().saturating_sub(2))?
                    };
                    levels.push(s);
                }
                Ok(HierarchyState { levels, representation: Representation::ScaledBySquare })
            }
        }
    }

    /// Pointwise values `yₙ(x)`, n = 1..N, on the float backend.
    pub fn evaluate(&self, x: &S) -> Vec<S> {
        let plain = self.to_plain();
        plain.levels.iter().map(|l| l.evaluate(x).value).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "representation": match self.representation {
                Representation::Plain => "plain",
                Representation::ScaledBySquare => "scaled_by_square",
            },
            "levels": self.levels.iter().map(|l| l.to_json()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport<S> {
    /// max |residual coefficient| for levels 1..N−1.
    pub per_level_max: Vec<S>,
    /// Highest residual index checked per level (`None`: nothing checkable).
    pub checked_orders: Vec<Option<usize>>,
    /// Exact backend only: every checked coefficient is the rational 0.
    pub exact_zero: bool,
}

impl<S: Scalar> ResidualReport<S> {
    pub fn max(&self) -> f64 {
        self.per_level_max.iter().map(|v| v.to_f64()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "levels": self.per_level_max.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
            "exact_zero": self.exact_zero,
        })
    }
}

fn effective_valid<S: Scalar>(s: &TruncatedSeries<S>) -> usize {
    if s.is_polynomial() {
        usize::MAX
    } else {
        s.valid_order()
    }
}

/// Residual series per level. Where a coefficient function has a pole at the
/// base point the state must be pole-cleared (given as `zₙ = yₙ/x²`, or
/// convertible to it) and the equation is multiplied through by the product
/// of denominators before comparing coefficients.
pub fn residual<S: Scalar>(spec: &GeneralRiccatiHierarchySpec<S>, state: &HierarchyState<S>) -> Result<ResidualReport<S>> {
    let series = residual_series(spec, state)?;
    let mut per_level_max = Vec::with_capacity(series.len());
    let mut checked_orders = Vec::with_capacity(series.len());
    let mut exact_zero = S::EXACT;
    for (r, limit) in series {
        let mut mx = S::zero();
        if let Some(l) = limit {
            for k in 0..=l {
                let a = r.coeff(k).abs();
                if a > mx {
                    mx = a;
                }
            }
        }
        if !mx.is_zero() {
            exact_zero = false;
        }
        per_level_max.push(mx);
        checked_orders.push(limit);
    }
    Ok(ResidualReport { per_level_max, checked_orders, exact_zero })
}

/// Per level n < N: the (denominator-multiplied) residual series and the
/// highest index at which it is meaningful.
pub fn residual_series<S: Scalar>(
    spec: &GeneralRiccatiHierarchySpec<S>,
    state: &HierarchyState<S>,
) -> Result<Vec<(TruncatedSeries<S>, Option<usize>)>> {
    let n_levels = state.depth();
    if n_levels < 2 {
        return Err(Error::InvalidArgument("residual needs depth N ≥ 2".into()));
    }
    let base = state.base().clone();
    let pole = spec.has_pole_at(&base);
    if pole && state.representation() == Representation::Plain {
        // only pole-clearable states are accepted
        state.to_scaled_by_square()?;
    }
    let plain = state.to_plain();
    let k_store = plain.levels.iter().map(|l| l.order()).max().unwrap_or(0);
    let poly_series = |p: &Polynomial<S>| {
        let shifted = p.taylor_shift(&base);
        TruncatedSeries::polynomial(base.clone(), if shifted.is_empty() { vec![S::zero()] } else { shifted })
    };

    // Coefficient series c_i and a multiplier m on y′ such that
    // m·y′ − Σ c_i·term_i equals (residual)·m.
    let (mult, coeff_series, shift) = if pole {
        let dens: Vec<TruncatedSeries<S>> = spec.q.iter().map(|f| poly_series(&f.den)).collect();
        let nums: Vec<TruncatedSeries<S>> = spec.q.iter().map(|f| poly_series(&f.num)).collect();
        let mut d = TruncatedSeries::constant(base.clone(), S::one(), 0);
        for den in &dens {
            d = d.mul(den)?;
        }
        let mut cs = Vec::new();
        for i in 0..4 {
            let mut c = nums[i].clone();
            for (j, den) in dens.iter().enumerate() {
                if j != i {
                    c = c.mul(den)?;
                }
            }
            cs.push(c);
        }
        let valuation = d.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(0);
        (d, cs, valuation)
    } else {
        let mut cs = Vec::new();
        for f in &spec.q {
            let num = poly_series(&f.num).truncate(2 * k_store + 2);
            let den = poly_series(&f.den).truncate(2 * k_store + 2);
            let q = num.div(&den)?;
            // the expansion of a rational function is exact to the stored order
            cs.push(TruncatedSeries::exact(base.clone(), q.into_coeffs()));
        }
        (TruncatedSeries::constant(base.clone(), S::one(), 0), cs, 0)
    };
    let coeff_valid = coeff_series.iter().map(effective_valid).min().unwrap_or(usize::MAX);

    let mut out = Vec::with_capacity(n_levels - 1);
    for n in 1..n_levels {
        let y = plain.level(n);
        let y_next = plain.level(n + 1);
        let dy = y.differentiate()?;
        let terms = [
            TruncatedSeries::constant(base.clone(), S::one(), 0),
            y.clone(),
            y_next.mul(y_next)?,
            y_next.clone(),
        ];
        let mut r = mult.mul(&dy)?;
        for (c, t) in coeff_series.iter().zip(terms.iter()) {
            r = r.sub(&c.mul(t)?)?;
        }
        let dy_valid = if y.is_polynomial() { usize::MAX } else { y.valid_order().checked_sub(1).unwrap_or(usize::MAX) };
        let limit = if !y.is_polynomial() && y.valid_order() == 0 {
            None
        } else {
            Some(
                dy_valid
                    .min(effective_valid(y_next))
                    .min(coeff_valid)
                    .saturating_add(shift)
                    .min(r.order()),
            )
        };
        out.push((r, limit));
    }
    Ok(out)
}

/// Which construction produced a state; determines per-level validity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Producer {
    /// Flow solution from `constants` supplied entries c₁..c_M.
    Flow { constants: usize },
    /// Free level `n_star`: levels above are derivatives (each costs one
    /// order), levels below are antiderivatives (capped at K).
    GenerateFromFree { n_star: usize },
    /// Nonlinear λ recurrence seeded with c₁..c_M (a ≠ 0).
    NonlinearLambda { constants: usize },
}

/// Guaranteed valid order per level n = 1..N.
pub fn truncate_guarantee(depth: usize, order: usize, producer: Producer) -> Vec<usize> {
    (1..=depth)
        .map(|n| match producer {
            Producer::Flow { constants } | Producer::NonlinearLambda { constants } => {
                constants.saturating_sub(n).min(order)
            }
            Producer::GenerateFromFree { n_star } => {
                if n > n_star {
                    order.saturating_sub(n - n_star)
                } else {
                    order
                }
            }
        })
        .collect()
}
