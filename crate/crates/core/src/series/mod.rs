//! Truncated power series around a base point, with explicit valid-order
//! bookkeeping.
//!
//! A series stores coefficients `0..=K` of `Σ a_k (x − base)^k`. `valid_order`
//! is the highest index guaranteed correct by whatever produced it; a
//! polynomial series is known to vanish beyond its storage and so is valid to
//! every order.

mod analytic;
mod radius;

pub use radius::{radius_estimate, Radius, RadiusEstimate, RadiusMethod};

use crate::error::{Error, Result};
use crate::scalar::{binomial, Scalar};

/// Relative tolerance for flagging a significant last Horner term.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<S> {
    base: S,
    coeffs: Vec<S>,
    valid_order: usize,
    polynomial: bool,
    approximate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation<S> {
    pub value: S,
    pub tail_flag: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RebaseMode {
    /// Always performed; non-polynomial inputs come back flagged approximate.
    Formal,
    /// Refused unless the shift is inside the estimated radius.
    Certified,
}

impl<S: Scalar> TruncatedSeries<S> {
    pub fn new(base: S, coeffs: Vec<S>, valid_order: usize) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("series needs at least one coefficient".into()));
        }
        if valid_order > coeffs.len() - 1 {
            return Err(Error::InvalidArgument(format!(
                "valid order {} exceeds storage order {}",
                valid_order,
                coeffs.len() - 1
            )));
        }
        Ok(TruncatedSeries { base, coeffs, valid_order, polynomial: false, approximate: false })
    }

    /// All stored coefficients are correct.
    pub fn exact(base: S, coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        let k = coeffs.len() - 1;
        TruncatedSeries { base, coeffs, valid_order: k, polynomial: false, approximate: false }
    }

    /// A polynomial: coefficients beyond the storage are zero.
    pub fn polynomial(base: S, coeffs: Vec<S>) -> Self {
        let mut s = Self::exact(base, coeffs);
        s.polynomial = true;
        s
    }

    pub fn zero(base: S, order: usize) -> Self {
        Self::polynomial(base, vec![S::zero(); order + 1])
    }

    pub fn constant(base: S, value: S, order: usize) -> Self {
        let mut c = vec![S::zero(); order + 1];
        c[0] = value;
        Self::polynomial(base, c)
    }

    /// `(x − base)` itself, stored to `order`.
    pub fn variable(base: S, order: usize) -> Self {
        let mut c = vec![S::zero(); order.max(1) + 1];
        c[1] = S::one();
        Self::polynomial(base, c)
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient `k`, zero beyond storage.
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    /// Storage order `K` (there are `K + 1` coefficients).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn valid_order(&self) -> usize {
        self.valid_order
    }

    pub fn is_polynomial(&self) -> bool {
        self.polynomial
    }

    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    /// Valid order for combination purposes: unbounded for polynomials.
    fn effective_valid(&self) -> usize {
        if self.polynomial {
            usize::MAX
        } else {
            self.valid_order
        }
    }

    pub fn with_valid_order(mut self, v: usize) -> Self {
        if v < self.valid_order {
            self.valid_order = v;
            self.polynomial = false;
        }
        self
    }

    pub fn mark_approximate(mut self) -> Self {
        self.approximate = true;
        self
    }

    /// Keep coefficients `0..=order` (or pad with zeros).
    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs: Vec<S> = (0..=order).map(|k| self.coeff(k)).collect();
        let polynomial = self.polynomial && self.coeffs.iter().skip(order + 1).all(|c| c.is_zero());
        let valid = if self.polynomial { order } else { self.valid_order.min(order) };
        if coeffs.is_empty() {
            coeffs.push(S::zero());
        }
        TruncatedSeries {
            base: self.base.clone(),
            coeffs,
            valid_order: valid,
            polynomial,
            approximate: self.approximate,
        }
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            Err(Error::BasePointMismatch)
        } else {
            Ok(())
        }
    }

    fn combine_meta(&self, other: &Self, coeffs: Vec<S>, polynomial: bool) -> Self {
        let k = coeffs.len() - 1;
        let valid = self.effective_valid().min(other.effective_valid()).min(k);
        TruncatedSeries {
            base: self.base.clone(),
            coeffs,
            valid_order: if polynomial { k } else { valid },
            polynomial,
            approximate: self.approximate || other.approximate,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let k = self.order().max(other.order());
        let coeffs = (0..=k).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Ok(self.combine_meta(other, coeffs, self.polynomial && other.polynomial))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = self.clone();
        for a in out.coeffs.iter_mut() {
            *a = a.clone() * c.clone();
        }
        out
    }

    pub fn add_constant(&self, c: &S) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].clone() + c.clone();
        out
    }

    /// Cauchy product. Two polynomials multiply exactly (storage grows);
    /// otherwise the result is stored to the larger operand order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let both_poly = self.polynomial && other.polynomial;
        let k = if both_poly {
            self.order() + other.order()
        } else {
            self.order().max(other.order())
        };
        let mut out = vec![S::zero(); k + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(k + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(k + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Ok(self.combine_meta(other, out, both_poly))
    }

    /// Termwise derivative; keeps the storage length and lowers validity by one.
    pub fn differentiate(&self) -> Result<Self> {
        if !self.polynomial && self.valid_order == 0 {
            return Err(Error::DegenerateSeries("cannot differentiate a series valid only to order 0".into()));
        }
        let k = self.order();
        let mut coeffs: Vec<S> = (0..k)
            .map(|i| self.coeffs[i + 1].clone() * S::from_i64(i as i64 + 1))
            .collect();
        coeffs.push(S::zero());
        Ok(TruncatedSeries {
            base: self.base.clone(),
            coeffs,
            valid_order: if self.polynomial { k } else { self.valid_order - 1 },
            polynomial: self.polynomial,
            approximate: self.approximate,
        })
    }

    pub fn differentiate_n(&self, n: usize) -> Result<Self> {
        let mut s = self.clone();
        for _ in 0..n {
            s = s.differentiate()?;
        }
        Ok(s)
    }

    /// Antiderivative whose value at the base point is `constant`. Validity
    /// rises by one, capped at the storage order; polynomials grow storage
    /// instead of dropping their top term.
    pub fn antidifferentiate(&self, constant: &S) -> Self {
        let k = self.order();
        let grow = self.polynomial && !self.coeffs[k].is_zero();
        let len = if grow { k + 2 } else { k + 1 };
        let mut coeffs = Vec::with_capacity(len);
        coeffs.push(constant.clone());
        for i in 1..len {
            coeffs.push(self.coeffs[i - 1].clone() / S::from_i64(i as i64));
        }
        let new_k = len - 1;
        TruncatedSeries {
            base: self.base.clone(),
            coeffs,
            valid_order: if self.polynomial { new_k } else { (self.valid_order + 1).min(new_k) },
            polynomial: self.polynomial,
            approximate: self.approximate,
        }
    }

    /// Reciprocal; the constant term must be nonzero.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.coeffs[0].clone();
        if a0.is_zero() {
            return Err(Error::DegenerateSeries("reciprocal of a series with zero constant term".into()));
        }
        let k = self.order();
        let mut out: Vec<S> = Vec::with_capacity(k + 1);
        out.push(S::one() / a0.clone());
        for n in 1..=k {
            let mut acc = S::zero();
            for j in 1..=n {
                let a = self.coeff(j);
                if !a.is_zero() {
                    acc = acc + a * out[n - j].clone();
                }
            }
            out.push(-acc / a0.clone());
        }
        Ok(TruncatedSeries {
            base: self.base.clone(),
            coeffs: out,
            valid_order: self.effective_valid().min(k),
            polynomial: false,
            approximate: self.approximate,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let k = self.order().max(other.order());
        let r = other.truncate(k).recip()?;
        let mut q = self.truncate(k).mul(&r)?;
        q.polynomial = false;
        Ok(q)
    }

    /// Integer power, negative exponents via the reciprocal.
    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = self.order();
        let mut acc = Self::constant(self.base.clone(), S::one(), k);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base)?;
            if !base.is_polynomial() {
                acc = acc.truncate(k);
            }
        }
        Ok(acc)
    }

    /// Substitute `x = x̃/(1 + ε x̃)` (series based at 0 on both sides).
    pub fn compose_moebius(&self, epsilon: &S) -> Result<Self> {
        if !self.base.is_zero() {
            return Err(Error::BasePointMismatch);
        }
        let k = self.order();
        if epsilon.is_zero() {
            return Ok(self.clone());
        }
        // u = x̃/(1+εx̃) = Σ_{j≥1} (−ε)^{j−1} x̃^j
        let mut u = vec![S::zero(); k + 1];
        let neg_eps = -epsilon.clone();
        let mut p = S::one();
        for coeff in u.iter_mut().skip(1) {
            *coeff = p.clone();
            p = p * neg_eps.clone();
        }
        // Horner in u; each multiplication by u shifts at least one index, so
        // only coefficient j of the input reaches output index ≥ j.
        let mut acc = vec![S::zero(); k + 1];
        for a in self.coeffs.iter().rev() {
            let mut next = vec![S::zero(); k + 1];
            for (i, c) in acc.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for j in 1..=(k - i) {
                    next[i + j] = next[i + j].clone() + c.clone() * u[j].clone();
                }
            }
            next[0] = next[0].clone() + a.clone();
            acc = next;
        }
        Ok(TruncatedSeries {
            base: S::zero(),
            coeffs: acc,
            valid_order: self.effective_valid().min(k),
            polynomial: false,
            approximate: self.approximate,
        })
    }

    /// Taylor shift to a new expansion point.
    pub fn rebase(&self, new_base: &S, mode: RebaseMode) -> Result<Self> {
        let h = new_base.clone() - self.base.clone();
        if h.is_zero() {
            return Ok(self.clone());
        }
        if mode == RebaseMode::Certified && !self.polynomial {
            let est = self.radius_estimate()?;
            let dist = h.to_f64().abs();
            let inside = match est.radius {
                Radius::Infinite => true,
                Radius::Zero => false,
                Radius::Finite(r) => dist < r,
            };
            if !inside {
                return Err(Error::OutsideRadius { distance: dist, radius: est.radius.value() });
            }
        }
        let k = self.order();
        let mut powers = Vec::with_capacity(k + 1);
        let mut p = S::one();
        for _ in 0..=k {
            powers.push(p.clone());
            p = p * h.clone();
        }
        let coeffs = (0..=k)
            .map(|j| {
                (j..=k).fold(S::zero(), |acc, m| {
                    let a = &self.coeffs[m];
                    if a.is_zero() {
                        acc
                    } else {
                        acc + a.clone()
                            * S::from_bigint(&binomial(m as u64, j as u64))
                            * powers[m - j].clone()
                    }
                })
            })
            .collect();
        Ok(TruncatedSeries {
            base: new_base.clone(),
            coeffs,
            valid_order: self.valid_order,
            polynomial: self.polynomial,
            approximate: self.approximate || !self.polynomial,
        })
    }

    pub fn evaluate(&self, x: &S) -> Evaluation<S> {
        self.evaluate_with_tolerance(x, DEFAULT_TAIL_TOLERANCE)
    }

    /// Horner evaluation of the stored polynomial. `tail_flag` is set when the
    /// last included term is not negligible relative to the value.
    pub fn evaluate_with_tolerance(&self, x: &S, tol: f64) -> Evaluation<S> {
        let h = x.clone() - self.base.clone();
        let value = self
            .coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * h.clone() + c.clone());
        let tail_flag = if self.polynomial {
            false
        } else {
            let k = self.order() as i64;
            let last = (self.coeffs[k as usize].clone() * h.powi(k)).to_f64().abs();
            last > tol * value.to_f64().abs()
        };
        Evaluation { value, tail_flag }
    }

    /// `ln |a_k|` per coefficient (`None` for zeros).
    pub fn log_magnitudes(&self) -> Vec<Option<f64>> {
        self.coeffs.iter().map(|c| c.ln_abs()).collect()
    }

    pub fn radius_estimate(&self) -> Result<RadiusEstimate> {
        radius_estimate(&self.log_magnitudes())
    }

    pub fn map_to_f64(&self) -> TruncatedSeries<f64> {
        TruncatedSeries {
            base: self.base.to_f64(),
            coeffs: self.coeffs.iter().map(|c| c.to_f64()).collect(),
            valid_order: self.valid_order,
            polynomial: self.polynomial,
            approximate: self.approximate,
        }
    }

    /// `{base, coeffs, valid_order}`
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "base": self.base.to_json(),
            "coeffs": self.coeffs.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            "valid_order": self.valid_order,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{factorial, Rational};
    use num::{One, Zero};

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn exp_neg(k: usize) -> TruncatedSeries<Rational> {
        let c = (0..=k)
            .map(|i| {
                let s = if i % 2 == 0 { 1 } else { -1 };
                Rational::from_i64(s) / Rational::from_bigint(&factorial(i as u64))
            })
            .collect();
        TruncatedSeries::exact(Rational::zero(), c)
    }

    #[test]
    fn difference_of_squares() {
        let a = TruncatedSeries::exact(q(0, 1), vec![q(1, 1), q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);
        let b = TruncatedSeries::exact(q(0, 1), vec![q(1, 1), q(-1, 1), q(0, 1), q(0, 1), q(0, 1)]);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.coeffs(), &[q(1, 1), q(0, 1), q(-1, 1), q(0, 1), q(0, 1)]);
        assert_eq!(p.valid_order(), 4);
    }

    #[test]
    fn derivative_of_exponential() {
        let e = exp_neg(10);
        let d = e.differentiate().unwrap();
        assert_eq!(d.valid_order(), 9);
        for k in 0..10 {
            assert_eq!(d.coeff(k), -e.coeff(k));
        }
    }

    #[test]
    fn degenerate_derivative() {
        let s = TruncatedSeries::new(q(0, 1), vec![q(1, 1), q(2, 1)], 0).unwrap();
        assert!(matches!(s.differentiate(), Err(Error::DegenerateSeries(_))));
    }

    #[test]
    fn mismatched_bases() {
        let a = TruncatedSeries::exact(q(0, 1), vec![q(1, 1)]);
        let b = TruncatedSeries::exact(q(1, 1), vec![q(1, 1)]);
        assert_eq!(a.add(&b), Err(Error::BasePointMismatch));
        assert_eq!(a.mul(&b), Err(Error::BasePointMismatch));
    }

    #[test]
    fn antiderivative_raises_validity() {
        let s = TruncatedSeries::new(q(0, 1), vec![q(1, 1), q(1, 1), q(1, 1), q(7, 1)], 2).unwrap();
        let i = s.antidifferentiate(&q(5, 1));
        assert_eq!(i.valid_order(), 3);
        assert_eq!(i.coeffs(), &[q(5, 1), q(1, 1), q(1, 2), q(1, 3)]);
    }

    #[test]
    fn moebius_geometric() {
        let x = TruncatedSeries::exact(q(0, 1), vec![q(0, 1), q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);
        let c = x.compose_moebius(&q(1, 2)).unwrap();
        assert_eq!(c.coeffs(), &[q(0, 1), q(1, 1), q(-1, 2), q(1, 4), q(-1, 8)]);
        assert_eq!(x.compose_moebius(&q(0, 1)).unwrap(), x);
    }

    #[test]
    fn moebius_round_trip_against_direct_expansion() {
        // s = 1 + 2x + 3x², ε = 1/3. Direct oracle: substitute x = x̃/(1+εx̃)
        // term by term using the binomial series of (1+εx̃)^{-m}.
        let k = 8;
        let eps = q(1, 3);
        let mut c = vec![q(0, 1); k + 1];
        c[0] = q(1, 1);
        c[1] = q(2, 1);
        c[2] = q(3, 1);
        let s = TruncatedSeries::exact(q(0, 1), c.clone());
        let composed = s.compose_moebius(&eps).unwrap();
        let mut oracle = vec![q(0, 1); k + 1];
        for (m, a) in c.iter().enumerate() {
            // x̃^m (1+εx̃)^{-m} = Σ_j C(m+j-1, j)(−ε)^j x̃^{m+j}
            for j in 0..=(k - m) {
                let b = if m == 0 {
                    if j == 0 { Rational::one() } else { Rational::zero() }
                } else {
                    Rational::from_bigint(&binomial((m + j - 1) as u64, j as u64))
                };
                oracle[m + j] = oracle[m + j].clone() + a.clone() * b * (-eps.clone()).powi(j as i64);
            }
        }
        assert_eq!(composed.coeffs(), &oracle[..]);
        let back = composed.compose_moebius(&-eps).unwrap();
        assert_eq!(back.coeffs(), s.coeffs());
    }

    #[test]
    fn rebase_square() {
        let s = TruncatedSeries::polynomial(q(0, 1), vec![q(0, 1), q(0, 1), q(1, 1)]);
        let r = s.rebase(&q(1, 1), RebaseMode::Certified).unwrap();
        assert_eq!(r.coeffs(), &[q(1, 1), q(2, 1), q(1, 1)]);
        assert!(!r.is_approximate());
        assert_eq!(s.rebase(&q(0, 1), RebaseMode::Formal).unwrap(), s);
    }

    #[test]
    fn rebase_power_term_matches_binomial_coefficients() {
        // (x̃ + a)^β with β = 2, a = 1: coefficients a^{β−k} β!/(k!(β−k)!)
        let s = TruncatedSeries::polynomial(q(0, 1), vec![q(0, 1), q(0, 1), q(1, 1)]);
        let r = s.rebase(&q(1, 1), RebaseMode::Formal).unwrap();
        for k in 0..=2u64 {
            let expect = Rational::from_bigint(&binomial(2, k));
            assert_eq!(r.coeff(k as usize), expect);
        }
    }

    #[test]
    fn certified_rebase_outside_radius() {
        let s = TruncatedSeries::exact(0.0, vec![1.0; 41]);
        assert!(matches!(s.rebase(&1.5, RebaseMode::Certified), Err(Error::OutsideRadius { .. })));
        let r = s.rebase(&1.5, RebaseMode::Formal).unwrap();
        assert!(r.is_approximate());
        assert!(s.rebase(&0.5, RebaseMode::Certified).is_ok());
    }

    #[test]
    fn evaluate_exponential() {
        let e = exp_neg(30).map_to_f64();
        let v = e.evaluate(&1.0);
        assert!((v.value - 0.36787944117144233).abs() < 1e-12);
        assert!(!v.tail_flag);
        assert_eq!(e.evaluate(&0.0).value, 1.0);
        let g = TruncatedSeries::exact(0.0, vec![1.0; 11]);
        assert!(g.evaluate(&2.0).tail_flag);
    }

    #[test]
    fn reciprocal_and_division() {
        let one_minus_x = TruncatedSeries::exact(q(0, 1), vec![q(1, 1), q(-1, 1), q(0, 1), q(0, 1)]);
        let r = one_minus_x.recip().unwrap();
        assert_eq!(r.coeffs(), &vec![q(1, 1); 4][..]);
        let back = r.mul(&one_minus_x).unwrap();
        assert_eq!(back.coeffs(), &[q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn json_shape() {
        let s = TruncatedSeries::exact(q(0, 1), vec![q(1, 2), q(3, 1)]);
        let j = s.to_json();
        assert_eq!(j["coeffs"][0], "1/2");
        assert_eq!(j["valid_order"], 1);
    }
}
