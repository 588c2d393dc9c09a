//! `B_{n,k}` table, the group matrix `G(x, ε)` and its inverse, and the
//! induced map on coefficient streams.
//!
//! `G` carries an overall factor `e^ε`. On the rational backend that factor
//! is kept as a tag ([`ExpScaled`]): products add exponents, so identities
//! like `G·G⁻¹ = I` are checked exactly.

use num::{BigInt, One, Zero};

use super::CoefVector;
use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, Scalar};

/// `e^{exponent} · body`
#[derive(Clone, Debug, PartialEq)]
pub struct ExpScaled<S, T> {
    pub exponent: S,
    pub body: T,
}

impl<S: Scalar> ExpScaled<S, Vec<S>> {
    pub fn to_f64(&self) -> Vec<f64> {
        let f = self.exponent.to_f64().exp();
        self.body.iter().map(|v| f * v.to_f64()).collect()
    }
}

/// Triangular table `B_{n,k}`, 2 ≤ n ≤ N, 1 ≤ k ≤ n−1.
#[derive(Clone, Debug, PartialEq)]
pub struct BnkTable {
    rows: Vec<Vec<BigInt>>,
}

impl BnkTable {
    pub fn max_n(&self) -> usize {
        self.rows.len() + 1
    }

    /// Zero outside the triangle.
    pub fn get(&self, n: usize, k: usize) -> BigInt {
        if n < 2 || k < 1 || k >= n || n > self.max_n() {
            return BigInt::zero();
        }
        self.rows[n - 2][k - 1].clone()
    }
}

/// `B_{n,k} = (n−2+k) B_{n−1,k} + B_{n−1,k−1}`, `B_{2,1} = 1`.
pub fn bnk_table(n_max: usize) -> BnkTable {
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    if n_max < 2 {
        return BnkTable { rows };
    }
    rows.push(vec![BigInt::one()]);
    for n in 3..=n_max {
        let prev = &rows[n - 3];
        let at = |k: usize| -> BigInt {
            if k >= 1 && k <= n - 2 {
                prev[k - 1].clone()
            } else {
                BigInt::zero()
            }
        };
        let row = (1..n).map(|k| BigInt::from(n + k - 2) * at(k) + at(k - 1)).collect();
        rows.push(row);
    }
    BnkTable { rows }
}

/// Lower-triangular `N×N` matrix `e^{exponent}·body` with its `(x, ε)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupMatrix<S> {
    pub x: S,
    pub epsilon: S,
    pub exponent: S,
    pub body: Vec<Vec<S>>,
}

impl<S: Scalar> GroupMatrix<S> {
    pub fn size(&self) -> usize {
        self.body.len()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.size().min(other.size());
        let body = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(S::zero(), |acc, k| acc + self.body[i][k].clone() * other.body[k][j].clone()))
                    .collect()
            })
            .collect();
        GroupMatrix {
            x: self.x.clone(),
            epsilon: self.epsilon.clone(),
            exponent: self.exponent.clone() + other.exponent.clone(),
            body,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.exponent.is_zero()
            && self
                .body
                .iter()
                .enumerate()
                .all(|(i, row)| row.iter().enumerate().all(|(j, v)| if i == j { v.is_one() } else { v.is_zero() }))
    }

    /// `G·v` on the first `N` entries.
    pub fn apply(&self, v: &[S]) -> ExpScaled<S, Vec<S>> {
        let n = self.size().min(v.len());
        let body = (0..n)
            .map(|i| {
                (0..=i).fold(S::zero(), |acc, k| {
                    let g = &self.body[i][k];
                    if g.is_zero() || v[k].is_zero() {
                        acc
                    } else {
                        acc + g.clone() * v[k].clone()
                    }
                })
            })
            .collect();
        ExpScaled { exponent: self.exponent.clone(), body }
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        let f = self.exponent.to_f64().exp();
        self.body.iter().map(|r| r.iter().map(|v| f * v.to_f64()).collect()).collect()
    }

    /// Dense rows with the tag exponent kept separate.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "x": self.x.to_json(),
            "epsilon": self.epsilon.to_json(),
            "exp_factor_exponent": self.exponent.to_json(),
            "body": self.body.iter().map(|r| r.iter().map(|v| v.to_json()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// `G(x, ε)`: row 1 is `(e^ε, 0, …)`; row n ≥ 2 has
/// `e^ε B_{n,k} ε^{n−k−1} (1−εx)^{n+k−1}` in column k+1.
pub fn group_matrix<S: Scalar>(x: &S, epsilon: &S, n: usize) -> GroupMatrix<S> {
    let b = bnk_table(n);
    let one_minus = S::one() - epsilon.clone() * x.clone();
    let powers = |base: &S, count: usize| {
        let mut v = Vec::with_capacity(count);
        let mut p = S::one();
        for _ in 0..count {
            v.push(p.clone());
            p = p * base.clone();
        }
        v
    };
    let eps_pow = powers(epsilon, n + 1);
    let om_pow = if one_minus.is_one() { vec![S::one(); 2 * n + 1] } else { powers(&one_minus, 2 * n + 1) };
    let mut body = vec![vec![S::zero(); n]; n];
    if n > 0 {
        body[0][0] = S::one();
    }
    for row in 2..=n {
        for k in 1..row {
            let e = &eps_pow[row - k - 1];
            if e.is_zero() {
                continue;
            }
            body[row - 1][k] = S::from_bigint(&b.get(row, k)) * e.clone() * om_pow[row + k - 1].clone();
        }
    }
    GroupMatrix { x: x.clone(), epsilon: epsilon.clone(), exponent: epsilon.clone(), body }
}

/// `G(0, ε)·v` without forming the matrix. On exact inputs the sums are
/// done in integers over a common denominator and reduced once.
pub fn apply_group_at_origin<S: Scalar>(epsilon: &S, v: &[S]) -> ExpScaled<S, Vec<S>> {
    let n = v.len();
    let exact = epsilon
        .to_rational()
        .and_then(|e| v.iter().map(|x| x.to_rational()).collect::<Option<Vec<_>>>().map(|vs| (e, vs)));
    let Some((e, vs)) = exact else {
        return group_matrix(&S::zero(), epsilon, n).apply(v);
    };
    let (p, q) = (e.numer().clone(), e.denom().clone());
    let d = vs.iter().fold(BigInt::one(), |acc, r| num::Integer::lcm(&acc, r.denom()));
    let big: Vec<BigInt> = vs.iter().map(|r| r.numer() * (&d / r.denom())).collect();
    let pow = |b: &BigInt| {
        let mut out = Vec::with_capacity(n + 1);
        let mut acc = BigInt::one();
        for _ in 0..=n {
            out.push(acc.clone());
            acc *= b;
        }
        out
    };
    let (pp, qp) = (pow(&p), pow(&q));
    let b = bnk_table(n);
    let mut body = Vec::with_capacity(n);
    if n > 0 {
        body.push(v[0].clone());
    }
    for row in 2..=n {
        // q^{row−2}·Σ_k B_{row,k} ε^{row−1−k} v_{k+1}
        let mut acc = BigInt::zero();
        for k in 1..row {
            if big[k].is_zero() {
                continue;
            }
            acc += b.get(row, k) * &pp[row - 1 - k] * &qp[k - 1] * &big[k];
        }
        let r = crate::scalar::Rational::new(acc, &qp[row - 2] * &d);
        body.push(S::from_rational(&r));
    }
    ExpScaled { exponent: epsilon.clone(), body }
}

/// `G⁻¹(x, ε) = G(x/(1−εx), −ε)`.
pub fn inverse_group_matrix<S: Scalar>(x: &S, epsilon: &S, n: usize) -> Result<GroupMatrix<S>> {
    let d = S::one() - epsilon.clone() * x.clone();
    if d.is_zero() {
        return Err(Error::TransformSingular("εx = 1 in the inverse group matrix".into()));
    }
    let mut g = group_matrix(&(x.clone() / d), &-epsilon.clone(), n);
    g.x = x.clone();
    g.epsilon = epsilon.clone();
    Ok(g)
}

/// `c̃ = G(0, ε)·c`
pub fn ctilde_by_matrix<S: Scalar>(c: &CoefVector<S>, epsilon: &S, n: usize) -> ExpScaled<S, Vec<S>> {
    group_matrix(&S::zero(), epsilon, n).apply(c.entries())
}

/// `c̃₁ = e^ε c₁`, `c̃_{1+i} = e^ε Σ_{j=1}^{i} C(i,j) ε^{i−j} (i−1)!/(j−1)! c_{1+j}`.
pub fn ctilde_by_shift_sum<S: Scalar>(c: &CoefVector<S>, epsilon: &S, n: usize) -> ExpScaled<S, Vec<S>> {
    let mut body = Vec::with_capacity(n);
    for m in 1..=n {
        if m == 1 {
            body.push(c.get(1).clone());
            continue;
        }
        let i = m - 1;
        let v = (1..=i).fold(S::zero(), |acc, j| {
            let ratio = S::from_bigint(&factorial((i - 1) as u64)) / S::from_bigint(&factorial((j - 1) as u64));
            acc + S::from_bigint(&binomial(i as u64, j as u64))
                * epsilon.powi((i - j) as i64)
                * ratio
                * c.get(1 + j).clone()
        });
        body.push(v);
    }
    ExpScaled { exponent: epsilon.clone(), body }
}

/// For an index written as `n + i` (n ≥ 2, i ≥ 0):
/// `c̃_{n+i} = e^ε Σ_k Σ_{j=0}^{i} B_{n,k} ε^{n+i−j−k−1} C(i,j)
///            (n+k+i−2)!/(n+k+j−2)! c_{k+1+j}`.
pub fn ctilde_by_split_sum<S: Scalar>(c: &CoefVector<S>, epsilon: &S, split_n: usize, i: usize) -> S {
    let b = bnk_table(split_n.max(2));
    let mut acc = S::zero();
    for k in 1..split_n {
        let bnk = S::from_bigint(&b.get(split_n, k));
        for j in 0..=i {
            let ratio = S::from_bigint(&factorial((split_n + k + i - 2) as u64))
                / S::from_bigint(&factorial((split_n + k + j - 2) as u64));
            acc = acc
                + bnk.clone()
                    * epsilon.powi((split_n + i - j - k - 1) as i64)
                    * S::from_bigint(&binomial(i as u64, j as u64))
                    * ratio
                    * c.get(k + 1 + j).clone();
        }
    }
    acc
}

/// `G(0, ε)·c`, cross-checked against both closed summations (every split of
/// every index for the second). Any disagreement is an internal
/// inconsistency.
pub fn reparam_ctilde<S: Scalar>(c: &CoefVector<S>, epsilon: &S, n: usize) -> Result<ExpScaled<S, Vec<S>>> {
    if c.len() < n {
        return Err(Error::DependencyConeViolation { needed: n, supplied: c.len() });
    }
    let by_matrix = ctilde_by_matrix(c, epsilon, n);
    let by_shift = ctilde_by_shift_sum(c, epsilon, n);
    if by_matrix != by_shift {
        return Err(Error::InternalInconsistency("matrix and shift-sum reparametrizations differ".into()));
    }
    for m in 2..=n {
        for split_n in 2..=m {
            let v = ctilde_by_split_sum(c, epsilon, split_n, m - split_n);
            if v != by_matrix.body[m - 1] {
                return Err(Error::InternalInconsistency(format!(
                    "split-sum reparametrization differs at index {m} (split {split_n} + {})",
                    m - split_n
                )));
            }
        }
    }
    Ok(by_matrix)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Restrictions {
    pub shifted: bool,
    pub anchor: bool,
    pub scaled: bool,
}

impl Restrictions {
    pub fn all(&self) -> bool {
        self.shifted && self.anchor && self.scaled
    }
}

/// `|(x̃−a)ε/(1+aε)| < 1`, `|aε/(1+aε)| < 1`, `|x̃ε| < 1`.
pub fn restrictions_ok<S: Scalar>(x_tilde: &S, epsilon: &S, a: &S) -> Result<Restrictions> {
    let d = S::one() + a.clone() * epsilon.clone();
    if d.is_zero() {
        return Err(Error::TransformSingular("aε = −1".into()));
    }
    let one = S::one();
    Ok(Restrictions {
        shifted: ((x_tilde.clone() - a.clone()) * epsilon.clone() / d.clone()).abs() < one,
        anchor: (a.clone() * epsilon.clone() / d).abs() < one,
        scaled: (x_tilde.clone() * epsilon.clone()).abs() < one,
    })
}
