//! The single Riccati equation `y′ − y/x − y²/x³ = 0`, its one-parameter
//! family of solutions `y = x²/(1 + c x)`, four point symmetries and their
//! action on the family parameter.

use crate::error::{Error, Result};
use crate::hierarchy::{GeneralRiccatiHierarchySpec, HierarchyState, Representation};
use crate::poly::Laurent2;
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

/// `y(x) = x²/(1 + c x)`
#[derive(Clone, Debug, PartialEq)]
pub struct RiccatiFamilyMember<S> {
    pub c: S,
}

impl<S: Scalar> RiccatiFamilyMember<S> {
    pub fn new(c: S) -> Self {
        RiccatiFamilyMember { c }
    }

    pub fn eval(&self, x: &S) -> Result<S> {
        let d = S::one() + self.c.clone() * x.clone();
        if d.is_zero() {
            return Err(Error::PoleEvaluation(x.to_f64()));
        }
        Ok(x.clone() * x.clone() / d)
    }

    pub fn derivative(&self, x: &S) -> Result<S> {
        let d = S::one() + self.c.clone() * x.clone();
        if d.is_zero() {
            return Err(Error::PoleEvaluation(x.to_f64()));
        }
        // (2x(1+cx) − c x²)/(1+cx)²
        Ok((S::from_i64(2) * x.clone() * d.clone() - self.c.clone() * x.clone() * x.clone()) / (d.clone() * d))
    }

    /// `x²·Σ(−c)^k x^k` stored to order `order` (in `y`).
    pub fn series(&self, order: usize) -> TruncatedSeries<S> {
        let order = order.max(2);
        let mut coeffs = vec![S::zero(), S::zero()];
        let mut p = S::one();
        for _ in 2..=order {
            coeffs.push(p.clone());
            p = p * -self.c.clone();
        }
        TruncatedSeries::exact(S::zero(), coeffs)
    }

    /// The member as a two-level pole-cleared state (`y₂ = y₁` turns the
    /// hierarchy into the single equation).
    pub fn as_state(&self, order: usize) -> HierarchyState<S> {
        let z = TruncatedSeries::exact(
            S::zero(),
            (0..=order).map(|k| (-self.c.clone()).powi(k as i64)).collect(),
        );
        HierarchyState::with_representation(vec![z.clone(), z], Representation::ScaledBySquare)
            .expect("shared base")
    }
}

/// The single equation viewed as the nonlinear hierarchy with `yₙ₊₁ = yₙ`.
pub fn single_spec<S: Scalar>() -> GeneralRiccatiHierarchySpec<S> {
    GeneralRiccatiHierarchySpec::nonlinear()
}

/// `y′ − y/x − y²/x³`
pub fn riccati_residual<S: Scalar>(x: &S, y: &S, dy: &S) -> S {
    dy.clone() - y.clone() / x.clone() - y.clone() * y.clone() / (x.clone() * x.clone() * x.clone())
}

/// Tangent field `ξ∂x + η∂y` with polynomial (Laurent in `x`) components.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentField<S> {
    pub xi: Laurent2<S>,
    pub eta: Laurent2<S>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldId {
    X0,
    X1,
    X2,
    X3,
}

impl<S: Scalar> TangentField<S> {
    pub fn named(id: FieldId) -> Self {
        let t = |c: i64, i: i32, j: u32| (S::from_i64(c), i, j);
        let (xi, eta) = match id {
            FieldId::X0 => (vec![t(1, 0, 0)], vec![t(3, -1, 1), t(-1, 1, 0)]),
            FieldId::X1 => (vec![t(1, 1, 0)], vec![t(2, 0, 1)]),
            FieldId::X2 => (vec![t(1, 2, 0)], vec![t(1, 1, 1)]),
            FieldId::X3 => (vec![t(1, 3, 0)], vec![t(1, 0, 2), t(1, 2, 1)]),
        };
        TangentField { xi: Laurent2::from_terms(&xi), eta: Laurent2::from_terms(&eta) }
    }
}

/// Right-hand side of the determining equation for the infinitesimals of the
/// Riccati equation, given the field values and first partials at `(x, y)`.
#[allow(clippy::too_many_arguments)]
pub fn determining_expression<S: Scalar>(x: &S, y: &S, xi: &S, eta: &S, xi_x: &S, xi_y: &S, eta_x: &S, eta_y: &S) -> S {
    let p = |b: &S, e: i64| b.powi(e);
    let c = |v: i64| S::from_i64(v);
    let (x2, x3, x4, x5, x6) = (p(x, 2), p(x, 3), p(x, 4), p(x, 5), p(x, 6));
    let (y2, y3, y4) = (p(y, 2), p(y, 3), p(y, 4));
    xi.clone() * (c(3) * y2.clone() * x2.clone() + y.clone() * x4.clone())
        - eta.clone() * (c(2) * y.clone() * x3.clone() + x5.clone())
        - xi_x.clone() * (y2.clone() * x3.clone() + y.clone() * x5.clone())
        - xi_y.clone() * (y4 + c(2) * y3 * x2 + y2.clone() * x4)
        + eta_x.clone() * x6
        + eta_y.clone() * (y2 * x3 + y.clone() * x5)
}

/// Max |determining expression| over the samples (exact partials).
pub fn determining_residual<S: Scalar>(field: &TangentField<S>, samples: &[(S, S)]) -> Result<S> {
    let (xi_x, xi_y, eta_x, eta_y) = (field.xi.d_dx(), field.xi.d_dy(), field.eta.d_dx(), field.eta.d_dy());
    let mut mx = S::zero();
    for (x, y) in samples {
        if x.is_zero() {
            return Err(Error::DomainError("sample point with x = 0".into()));
        }
        let r = determining_expression(
            x,
            y,
            &field.xi.eval(x, y),
            &field.eta.eval(x, y),
            &xi_x.eval(x, y),
            &xi_y.eval(x, y),
            &eta_x.eval(x, y),
            &eta_y.eval(x, y),
        )
        .abs();
        if r > mx {
            mx = r;
        }
    }
    Ok(mx)
}

/// Closure-valued field; partials by central differences.
pub struct ClosureField {
    pub xi: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub eta: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

pub const CENTRAL_DIFFERENCE_STEP: f64 = 1e-6;

pub fn determining_residual_closure(field: &ClosureField, samples: &[(f64, f64)]) -> Result<f64> {
    let h = CENTRAL_DIFFERENCE_STEP;
    let dx = |f: &dyn Fn(f64, f64) -> f64, x: f64, y: f64| (f(x + h, y) - f(x - h, y)) / (2.0 * h);
    let dy = |f: &dyn Fn(f64, f64) -> f64, x: f64, y: f64| (f(x, y + h) - f(x, y - h)) / (2.0 * h);
    let mut mx: f64 = 0.0;
    for &(x, y) in samples {
        if x == 0.0 {
            return Err(Error::DomainError("sample point with x = 0".into()));
        }
        let r = determining_expression(
            &x,
            &y,
            &(field.xi)(x, y),
            &(field.eta)(x, y),
            &dx(&*field.xi, x, y),
            &dy(&*field.xi, x, y),
            &dx(&*field.eta, x, y),
            &dy(&*field.eta, x, y),
        );
        mx = mx.max(r.abs());
    }
    Ok(mx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformId {
    T0,
    T1,
    T2,
    T3,
}

impl TransformId {
    pub const ALL: [TransformId; 4] = [TransformId::T0, TransformId::T1, TransformId::T2, TransformId::T3];

    pub fn name(&self) -> &'static str {
        match self {
            TransformId::T0 => "T0",
            TransformId::T1 => "T1",
            TransformId::T2 => "T2",
            TransformId::T3 => "T3",
        }
    }
}

fn singular(msg: &str) -> Error {
    Error::TransformSingular(msg.to_string())
}

/// Global action of the four one-parameter groups on a point `(x, y)`.
pub fn apply_point_transform(id: TransformId, epsilon: f64, point: (f64, f64)) -> Result<(f64, f64)> {
    let (x, y) = point;
    if epsilon == 0.0 {
        return Ok(point);
    }
    match id {
        TransformId::T0 => {
            if x == 0.0 {
                return Err(singular("T0 at x = 0"));
            }
            let xt = x + epsilon;
            Ok((xt, (y - x * x) * xt.powi(3) / x.powi(3) + xt * xt))
        }
        TransformId::T1 => Ok((epsilon.exp() * x, (2.0 * epsilon).exp() * y)),
        TransformId::T2 => {
            let d = 1.0 - epsilon * x;
            if d == 0.0 {
                return Err(singular("T2 with εx = 1"));
            }
            Ok((x / d, y / d))
        }
        TransformId::T3 => {
            let s2 = 1.0 - 2.0 * epsilon * x * x;
            if s2 <= 0.0 {
                return Err(singular("T3 with 2εx² ≥ 1"));
            }
            let s = s2.sqrt();
            let d = y * s2 - (y - x * x) * s;
            if d == 0.0 {
                return Err(singular("T3 with vanishing ỹ denominator"));
            }
            Ok((x / s, y * x * x / d))
        }
    }
}

/// Partials `(∂x̃/∂x, ∂ỹ/∂x, ∂ỹ/∂y)`; `x̃` does not depend on `y` for any of
/// the four groups.
fn partials(id: TransformId, epsilon: f64, (x, y): (f64, f64)) -> Result<(f64, f64, f64)> {
    match id {
        TransformId::T0 => {
            if x == 0.0 {
                return Err(singular("T0 at x = 0"));
            }
            let xt = x + epsilon;
            let dy_dx = -2.0 * xt.powi(3) / (x * x)
                + (y - x * x) * (3.0 * xt * xt / x.powi(3) - 3.0 * xt.powi(3) / x.powi(4))
                + 2.0 * xt;
            Ok((1.0, dy_dx, xt.powi(3) / x.powi(3)))
        }
        TransformId::T1 => Ok((epsilon.exp(), 0.0, (2.0 * epsilon).exp())),
        TransformId::T2 => {
            let d = 1.0 - epsilon * x;
            if d == 0.0 {
                return Err(singular("T2 with εx = 1"));
            }
            Ok((1.0 / (d * d), epsilon * y / (d * d), 1.0 / d))
        }
        TransformId::T3 => {
            let s2 = 1.0 - 2.0 * epsilon * x * x;
            if s2 <= 0.0 {
                return Err(singular("T3 with 2εx² ≥ 1"));
            }
            let s = s2.sqrt();
            let n = y * x * x;
            let d = y * s2 - (y - x * x) * s;
            if d == 0.0 {
                return Err(singular("T3 with vanishing ỹ denominator"));
            }
            let (n_x, n_y) = (2.0 * x * y, x * x);
            let d_x = -4.0 * epsilon * x * y + 2.0 * x * s + 2.0 * epsilon * x * (y - x * x) / s;
            let d_y = s2 - s;
            Ok((1.0 / (s2 * s), (n_x * d - n * d_x) / (d * d), (n_y * d - n * d_y) / (d * d)))
        }
    }
}

/// `ỹ′ = (∂ỹ/∂x + ∂ỹ/∂y·y′)/(∂x̃/∂x)`
pub fn induced_derivative(id: TransformId, epsilon: f64, point: (f64, f64), yprime: f64) -> Result<f64> {
    let (xt_x, yt_x, yt_y) = partials(id, epsilon, point)?;
    if xt_x == 0.0 {
        return Err(singular("∂x̃/∂x vanishes"));
    }
    Ok((yt_x + yt_y * yprime) / xt_x)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReparamKind {
    NewParam,
    Invariant,
    NotInFamily,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReparamResult {
    pub kind: ReparamKind,
    pub c_tilde: Option<f64>,
    /// max − min of the per-sample parameter values.
    pub fit_spread: f64,
}

pub const REPARAM_TOLERANCE: f64 = 1e-10;
const SAMPLE_XS: [f64; 5] = [0.15, 0.3, 0.45, 0.6, 0.75];

/// Fit the image of the member with parameter `c` to `x̃²/(1 + c̃x̃)`.
pub fn classify_reparam(id: TransformId, epsilon: f64, c: f64) -> Result<ReparamResult> {
    let member = RiccatiFamilyMember::new(c);
    let mut fitted = Vec::new();
    for &x in &SAMPLE_XS {
        let Ok(y) = member.eval(&x) else { continue };
        let Ok((xt, yt)) = apply_point_transform(id, epsilon, (x, y)) else { continue };
        if xt == 0.0 || yt == 0.0 {
            continue;
        }
        fitted.push((xt * xt / yt - 1.0) / xt);
    }
    if fitted.len() < 3 {
        return Err(Error::InvalidArgument("fewer than three usable sample points".into()));
    }
    let lo = fitted.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = fitted.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    if !(spread <= REPARAM_TOLERANCE) {
        return Ok(ReparamResult { kind: ReparamKind::NotInFamily, c_tilde: None, fit_spread: spread });
    }
    let ct = fitted.iter().sum::<f64>() / fitted.len() as f64;
    if (ct - c).abs() <= REPARAM_TOLERANCE {
        Ok(ReparamResult { kind: ReparamKind::Invariant, c_tilde: Some(ct), fit_spread: spread })
    } else {
        Ok(ReparamResult { kind: ReparamKind::NewParam, c_tilde: Some(ct), fit_spread: spread })
    }
}

/// Closed-form parameter maps: `c/(1−cε)`, `e^{−ε}c`, `c + ε`, and `c`.
pub fn reparam_closed_form(id: TransformId, epsilon: f64, c: f64) -> f64 {
    match id {
        TransformId::T0 => c / (1.0 - c * epsilon),
        TransformId::T1 => (-epsilon).exp() * c,
        TransformId::T2 => c + epsilon,
        TransformId::T3 => c,
    }
}
