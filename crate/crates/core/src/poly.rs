//! Small polynomial types: dense univariate polynomials and sparse bivariate
//! Laurent polynomials (negative powers of `x` allowed, `y` nonnegative).

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Dense polynomial in `x`, ascending coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// `c·x^k`
    pub fn monomial(c: S, k: usize) -> Self {
        let mut v = vec![S::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * S::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    /// Coefficients of `p(base + h)` in powers of `h`.
    pub fn taylor_shift(&self, base: &S) -> Vec<S> {
        // repeated synthetic division
        let mut work = self.coeffs.clone();
        let n = work.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = work[j + 1].clone() * base.clone();
                work[j] = work[j].clone() + t;
            }
        }
        work
    }
}

/// Sparse polynomial in `x`, `x⁻¹` and `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent2<S> {
    terms: BTreeMap<(i32, u32), S>,
}

impl<S: Scalar> Laurent2<S> {
    pub fn zero() -> Self {
        Laurent2 { terms: BTreeMap::new() }
    }

    /// Build from `(coefficient, x-power, y-power)` triples.
    pub fn from_terms(terms: &[(S, i32, u32)]) -> Self {
        let mut out = Self::zero();
        for (c, i, j) in terms {
            out.add_term(c.clone(), *i, *j);
        }
        out
    }

    pub fn constant(c: S) -> Self {
        Self::from_terms(&[(c, 0, 0)])
    }

    fn add_term(&mut self, c: S, i: i32, j: u32) {
        let entry = self.terms.entry((i, j)).or_insert_with(S::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, u32), &S)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(c.clone(), i, j);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero();
        for (&(i, j), a) in &self.terms {
            out.add_term(a.clone() * c.clone(), i, j);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &other.terms {
                out.add_term(a.clone() * b.clone(), i1 + i2, j1 + j2);
            }
        }
        out
    }

    pub fn d_dx(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), a) in &self.terms {
            if i != 0 {
                out.add_term(a.clone() * S::from_i64(i as i64), i - 1, j);
            }
        }
        out
    }

    pub fn d_dy(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), a) in &self.terms {
            if j != 0 {
                out.add_term(a.clone() * S::from_i64(j as i64), i, j - 1);
            }
        }
        out
    }

    /// Evaluate at `(x, y)`; requires `x ≠ 0` when negative powers are present.
    pub fn eval(&self, x: &S, y: &S) -> S {
        self.terms.iter().fold(S::zero(), |acc, (&(i, j), c)| {
            acc + c.clone() * x.powi(i as i64) * y.powi(j as i64)
        })
    }
}
