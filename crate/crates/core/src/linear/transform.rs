//! Equivalence transformations of the linear hierarchy.

use super::group::{bnk_table, group_matrix, ExpScaled};
use crate::error::{Error, Result};
use crate::hierarchy::HierarchyState;
use crate::scalar::{binomial, Scalar};
use crate::series::TruncatedSeries;

/// Scaling with a given factor `s` (`s = e^ε`): `x̃ = x/s`, `ỹₙ = sⁿ yₙ`.
/// In series form coefficient `k` of level `n` picks up `s^{n+k}`, so a
/// rational `s` keeps everything exact.
pub fn apply_l1<S: Scalar>(scale: &S, state: &HierarchyState<S>) -> Result<HierarchyState<S>> {
    if scale.is_zero() {
        return Err(Error::TransformSingular("zero scale".into()));
    }
    let new_base = state.base().clone() / scale.clone();
    let levels = state
        .levels()
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let n = i + 1;
            let coeffs: Vec<S> = l
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, a)| a.clone() * scale.powi((n + k) as i64))
                .collect();
            let s = TruncatedSeries::new(new_base.clone(), coeffs, l.valid_order()).expect("same shape");
            if l.is_approximate() { s.mark_approximate() } else { s }
        })
        .collect();
    HierarchyState::new(levels)
}

/// L₁ with the parameter ε on the float backend.
pub fn apply_l1_epsilon(epsilon: f64, state: &HierarchyState<f64>) -> Result<HierarchyState<f64>> {
    apply_l1(&epsilon.exp(), state)
}

/// `(1 + ε x̃)^{−m}` to order `k`.
fn inverse_binomial_power<S: Scalar>(epsilon: &S, m: usize, k: usize) -> TruncatedSeries<S> {
    let coeffs = (0..=k)
        .map(|j| {
            if m == 0 {
                if j == 0 { S::one() } else { S::zero() }
            } else {
                S::from_bigint(&binomial((m + j - 1) as u64, j as u64)) * (-epsilon.clone()).powi(j as i64)
            }
        })
        .collect();
    TruncatedSeries::exact(S::zero(), coeffs)
}

/// L₂ on a state based at the origin, re-expressed in `x̃ = x/(1−εx)`:
/// `ỹ₁ = e^ε y₁`, `ỹₙ = e^ε Σ_{k=1}^{n−1} B_{n,k} ε^{n−k−1}(1−εx)^{n+k−1} y_{k+1}`
/// with `(1−εx) = (1+εx̃)^{−1}` and `yₖ` composed with the Möbius map.
pub fn apply_l2<S: Scalar>(epsilon: &S, state: &HierarchyState<S>) -> Result<ExpScaled<S, HierarchyState<S>>> {
    if !state.base().is_zero() {
        return Err(Error::BasePointMismatch);
    }
    let depth = state.depth();
    let b = bnk_table(depth);
    let composed: Vec<TruncatedSeries<S>> = state
        .levels()
        .iter()
        .map(|l| l.compose_moebius(epsilon))
        .collect::<Result<_>>()?;
    let k = state.levels().iter().map(|l| l.order()).max().unwrap_or(0);
    let mut levels = Vec::with_capacity(depth);
    levels.push(composed[0].clone());
    for n in 2..=depth {
        let mut acc: Option<TruncatedSeries<S>> = None;
        for kk in 1..n {
            let coef = S::from_bigint(&b.get(n, kk)) * epsilon.powi((n - kk - 1) as i64);
            if coef.is_zero() {
                continue;
            }
            let term = inverse_binomial_power(epsilon, n + kk - 1, k)
                .mul(&composed[kk])?
                .scale(&coef);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        let lvl = match acc {
            Some(a) => a,
            // ε = 0: only the diagonal survives
            None => composed[n - 1].clone(),
        };
        levels.push(lvl.truncate(k).with_valid_order(composed[..n].iter().map(|c| c.valid_order()).min().unwrap_or(k)));
    }
    Ok(ExpScaled { exponent: epsilon.clone(), body: HierarchyState::new(levels)? })
}

/// Pointwise L₂: `(x, y) ↦ (x/(1−εx), G(x, ε)·y)`.
pub fn apply_l2_point<S: Scalar>(epsilon: &S, x: &S, y: &[S]) -> Result<(S, ExpScaled<S, Vec<S>>)> {
    let d = S::one() - epsilon.clone() * x.clone();
    if d.is_zero() {
        return Err(Error::TransformSingular("εx = 1".into()));
    }
    let g = group_matrix(x, epsilon, y.len());
    Ok((x.clone() / d, g.apply(y)))
}

/// Image of one point of a solution under L₂^f, with the induced first
/// derivatives `dỹₙ/dx̃`.
#[derive(Clone, Debug, PartialEq)]
pub struct L2fPoint {
    pub x: f64,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

impl L2fPoint {
    /// `max |dỹₙ/dx̃ + ỹₙ₊₁|` over n < N.
    pub fn hierarchy_residual(&self) -> f64 {
        (0..self.y.len().saturating_sub(1))
            .map(|i| (self.dy[i] + self.y[i + 1]).abs())
            .fold(0.0, f64::max)
    }
}

pub const L2F_STEPS: usize = 64;

/// Exponentiate the infinitesimal `ξ = f(x)`,
/// `ηₙ = yₙ + Σ_{k=1}^{n−1} (−1)^{n−k} C(n−1,k−1) f^{(n−k)}(x) y_{k+1}`
/// by classical RK4 in ε (64 steps), starting from the point `x` of a
/// solution given by its values and first derivatives there. The tangent
/// (`∂x̃/∂x`, `∂ỹₙ/∂x`) is carried along so the image's derivatives are
/// available.
///
/// `f(x, m)` must return the m-th derivative of `f` at `x`.
pub fn apply_l2f(
    f: &dyn Fn(f64, usize) -> f64,
    epsilon: f64,
    x: f64,
    y: &[f64],
    dy: &[f64],
) -> Result<L2fPoint> {
    let depth = y.len();
    if dy.len() != depth {
        return Err(Error::InvalidArgument("values and derivatives differ in length".into()));
    }
    // weights w_{n,k}(x) and their x-derivatives, for n = 1..N (1-based), k = 1..n−1
    let weights = |x: f64, extra: usize| -> Vec<Vec<f64>> {
        (1..=depth)
            .map(|n| {
                (1..n)
                    .map(|k| {
                        let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
                        let c = binomial((n - 1) as u64, (k - 1) as u64);
                        sign * num::ToPrimitive::to_f64(&c).unwrap_or(f64::NAN) * f(x, n - k + extra)
                    })
                    .collect()
            })
            .collect()
    };
    // state layout: [x̃, ỹ₁..ỹ_N, p, q₁..q_N]
    let rhs = |s: &[f64]| -> Vec<f64> {
        let xt = s[0];
        let yv = &s[1..=depth];
        let p = s[depth + 1];
        let qv = &s[depth + 2..];
        let w = weights(xt, 0);
        let wd = weights(xt, 1);
        let mut out = vec![0.0; s.len()];
        out[0] = f(xt, 0);
        for n in 1..=depth {
            let mut eta = yv[n - 1];
            let mut deta = qv[n - 1];
            for k in 1..n {
                eta += w[n - 1][k - 1] * yv[k];
                deta += wd[n - 1][k - 1] * yv[k] * p + w[n - 1][k - 1] * qv[k];
            }
            out[n] = eta;
            out[depth + 1 + n] = deta;
        }
        out[depth + 1] = f(xt, 1) * p;
        out
    };
    let mut s = Vec::with_capacity(2 * depth + 2);
    s.push(x);
    s.extend_from_slice(y);
    s.push(1.0);
    s.extend_from_slice(dy);
    let h = epsilon / L2F_STEPS as f64;
    for _ in 0..L2F_STEPS {
        let k1 = rhs(&s);
        let add = |a: &[f64], b: &[f64], c: f64| a.iter().zip(b).map(|(u, v)| u + c * v).collect::<Vec<_>>();
        let k2 = rhs(&add(&s, &k1, h / 2.0));
        let k3 = rhs(&add(&s, &k2, h / 2.0));
        let k4 = rhs(&add(&s, &k3, h));
        for i in 0..s.len() {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    let p = s[depth + 1];
    if p == 0.0 || !p.is_finite() {
        return Err(Error::TransformSingular("∂x̃/∂x vanished along the flow".into()));
    }
    Ok(L2fPoint {
        x: s[0],
        y: s[1..=depth].to_vec(),
        dy: s[depth + 2..].iter().map(|q| q / p).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{residual, GeneralRiccatiHierarchySpec};
    use crate::linear::{flow_solution, CoefVector};
    use crate::scalar::Rational;
    use num::Zero;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn sample_state(depth: usize, order: usize) -> HierarchyState<Rational> {
        let c = CoefVector::from_fn(depth + order, |j| q((j as i64 % 5) - 2, j as i64 + 1));
        flow_solution(&c, &Rational::zero(), depth, order).unwrap()
    }

    #[test]
    fn level_two_formula() {
        let st = sample_state(3, 10);
        let e = q(1, 3);
        let t = apply_l2(&e, &st).unwrap();
        // ỹ₂ = (1+εx̃)^{−2} y₂(x̃/(1+εx̃))
        let expect = inverse_binomial_power(&e, 2, 10).mul(&st.level(2).compose_moebius(&e).unwrap()).unwrap();
        assert_eq!(t.body.level(2).coeffs(), expect.coeffs());
    }

    #[test]
    fn l2_preserves_solutions_and_inverts() {
        let st = sample_state(6, 12);
        let e = q(-2, 7);
        let t = apply_l2(&e, &st).unwrap();
        assert!(residual(&GeneralRiccatiHierarchySpec::linear(), &t.body).unwrap().exact_zero);
        let back = apply_l2(&-e.clone(), &t.body).unwrap();
        assert!((t.exponent.clone() + back.exponent.clone()).is_zero());
        assert_eq!(back.body, st);
        assert_eq!(apply_l2(&q(0, 1), &st).unwrap().body, st);
    }

    #[test]
    fn l1_is_flow_of_scaled_constants() {
        let s = q(3, 2);
        let depth = 4;
        let order = 9;
        let c = CoefVector::from_fn(depth + order, |j| q(j as i64, 1));
        let st = flow_solution(&c, &Rational::zero(), depth, order).unwrap();
        let scaled = CoefVector::from_fn(depth + order, |j| c.get(j).clone() * s.powi(j as i64));
        let expect = flow_solution(&scaled, &Rational::zero(), depth, order).unwrap();
        assert_eq!(apply_l1(&s, &st).unwrap(), expect);
        assert_eq!(apply_l1(&q(1, 1), &st).unwrap(), st);
    }

    #[test]
    fn l2f_with_quadratic_generator_matches_l2() {
        let depth = 5;
        let st = sample_state(depth + 1, 30).levels().iter().map(|l| l.map_to_f64()).collect::<Vec<_>>();
        let x = 0.3;
        let e = 0.4;
        let y: Vec<f64> = st[..depth].iter().map(|l| l.evaluate(&x).value).collect();
        let dy: Vec<f64> = (0..depth).map(|i| -st[i + 1].evaluate(&x).value).collect();
        let f = |x: f64, m: usize| match m {
            0 => x * x,
            1 => 2.0 * x,
            2 => 2.0,
            _ => 0.0,
        };
        let p = apply_l2f(&f, e, x, &y, &dy).unwrap();
        let (xt, yt) = apply_l2_point(&e, &x, &y).unwrap();
        let yt = yt.to_f64();
        assert!((p.x - xt).abs() < 1e-10);
        for n in 0..depth {
            assert!((p.y[n] - yt[n]).abs() < 1e-8, "level {} {} {}", n + 1, p.y[n], yt[n]);
        }
        assert!(p.hierarchy_residual() < 1e-8);
    }
}
