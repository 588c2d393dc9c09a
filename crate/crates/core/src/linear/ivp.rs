//! Two solutions of the same initial value problem: the flow `yᴬ` and the
//! reparametrized `yᴮ = G(x*, ε)·flow(G(0,−ε)·y₀)(x*)` with `x* = x/(1+εx)`.

use super::group::{apply_group_at_origin, group_matrix, ExpScaled};
use super::transform::apply_l2;
use super::{flow_solution, CoefVector};
use crate::error::{Error, Result};
use crate::hierarchy::HierarchyState;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct IvpPair<S> {
    pub epsilon: S,
    pub y0: CoefVector<S>,
    /// Flow of `y₀` around 0.
    pub ya: HierarchyState<S>,
    /// Flow of `y₀* = G(0,−ε)·y₀` (body; its `e^{−ε}` tag cancels against
    /// the `e^{ε}` of the outer group matrix).
    pub inner: HierarchyState<S>,
    pub inner_constants: CoefVector<S>,
    /// `yᴮ` as a series in x around 0.
    pub yb: HierarchyState<S>,
}

pub fn solve_ivp_pair<S: Scalar>(y0: &CoefVector<S>, epsilon: &S, depth: usize, order: usize) -> Result<IvpPair<S>> {
    let needed = depth + order;
    if y0.len() < needed {
        return Err(Error::DependencyConeViolation { needed, supplied: y0.len() });
    }
    let ya = flow_solution(y0, &S::zero(), depth, order)?;
    let inv = apply_group_at_origin(&-epsilon.clone(), &y0.entries()[..needed]);
    let inner_constants = CoefVector::new(inv.body);
    let inner = flow_solution(&inner_constants, &S::zero(), depth, order)?;
    let ExpScaled { exponent, body } = apply_l2(epsilon, &inner)?;
    if !(exponent + inv.exponent).is_zero() {
        return Err(Error::InternalInconsistency("exponential tags do not cancel".into()));
    }
    Ok(IvpPair { epsilon: epsilon.clone(), y0: y0.clone(), ya, inner, inner_constants, yb: body })
}

impl<S: Scalar> IvpPair<S> {
    /// Truncated `yᴬ(x)`, levels 1..N.
    pub fn ya_at(&self, x: &S) -> Vec<S> {
        self.ya.evaluate(x)
    }

    /// `yᴮ(x)` assembled pointwise from the inner flow at `x* = x/(1+εx)`.
    pub fn yb_at(&self, x: &S) -> Result<Vec<S>> {
        let d = S::one() + self.epsilon.clone() * x.clone();
        if d.is_zero() {
            return Err(Error::TransformSingular(format!("x = −1/ε = {}", x.to_f64())));
        }
        let xs = x.clone() / d;
        let inner = self.inner.evaluate(&xs);
        Ok(group_matrix(&xs, &self.epsilon, inner.len()).apply(&inner).body)
    }
}
