//! The linear hierarchy `y′ₙ = −yₙ₊₁`.
//!
//! Its solutions are Taylor shifts of a coefficient stream (the flow
//! solution); equivalence transformations act on them through a
//! lower-triangular group matrix built from the `B_{n,k}` table.

mod domains;
mod group;
mod ic;
mod ivp;
mod transform;

pub use domains::{convergence_domains, Domain, DomainReport, InnerFamily, Table1Row};
pub use group::{
    apply_group_at_origin, bnk_table, ctilde_by_matrix, ctilde_by_shift_sum, ctilde_by_split_sum, group_matrix, inverse_group_matrix,
    reparam_ctilde, restrictions_ok, BnkTable, ExpScaled, GroupMatrix, Restrictions,
};
pub use ic::IcCompatibleInfinitesimals;
pub use ivp::{solve_ivp_pair, IvpPair};
pub use transform::{apply_l1, apply_l1_epsilon, apply_l2, apply_l2_point, apply_l2f, L2fPoint};

use crate::error::{Error, Result};
use crate::hierarchy::HierarchyState;
use crate::scalar::{factorial, Scalar};
use crate::series::TruncatedSeries;

/// Constants `c₁..c_M` (1-based access).
#[derive(Clone, Debug, PartialEq)]
pub struct CoefVector<S> {
    entries: Vec<S>,
}

impl<S: Scalar> CoefVector<S> {
    pub fn new(entries: Vec<S>) -> Self {
        CoefVector { entries }
    }

    pub fn from_fn(len: usize, f: impl Fn(usize) -> S) -> Self {
        CoefVector { entries: (1..=len).map(f).collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `c_j`, j ≥ 1.
    pub fn get(&self, j: usize) -> &S {
        &self.entries[j - 1]
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }
}

/// `yₙ(x) = Σ_k c_{n+k} (−1)^k (x − base)^k / k!`, levels 1..N to order K.
pub fn flow_solution<S: Scalar>(c: &CoefVector<S>, base: &S, depth: usize, order: usize) -> Result<HierarchyState<S>> {
    let needed = depth + order;
    if c.len() < needed {
        return Err(Error::DependencyConeViolation { needed, supplied: c.len() });
    }
    let inv_fact: Vec<S> = (0..=order)
        .map(|k| S::one() / S::from_bigint(&factorial(k as u64)))
        .collect();
    let levels = (1..=depth)
        .map(|n| {
            let coeffs = (0..=order)
                .map(|k| {
                    let v = c.get(n + k).clone() * inv_fact[k].clone();
                    if k % 2 == 1 {
                        -v
                    } else {
                        v
                    }
                })
                .collect();
            TruncatedSeries::exact(base.clone(), coeffs)
        })
        .collect();
    HierarchyState::new(levels)
}

/// General solution with level `n_star` free. Levels above are
/// alternating-sign derivatives of `free`; below, `y_{n*−k} = (−1)^k I_k`
/// where `I_k` is the antiderivative of `I_{k−1}` (`I₀ = free`) taking the
/// value `constants[k−1]` at the base point.
pub fn generate_from_free<S: Scalar>(
    n_star: usize,
    free: &TruncatedSeries<S>,
    depth: usize,
    constants: &[S],
) -> Result<HierarchyState<S>> {
    if n_star < 1 || n_star > depth {
        return Err(Error::InvalidArgument(format!("free level {n_star} outside 1..={depth}")));
    }
    if constants.len() < n_star - 1 {
        return Err(Error::MissingConstants { needed: n_star - 1, supplied: constants.len() });
    }
    let mut levels = vec![free.clone(); depth];
    let mut integral = free.clone();
    for k in 1..n_star {
        integral = integral.antidifferentiate(&constants[k - 1]);
        levels[n_star - k - 1] = if k % 2 == 1 { integral.neg() } else { integral.clone() };
    }
    let mut deriv = free.clone();
    for l in 1..=(depth - n_star) {
        deriv = deriv.differentiate()?;
        levels[n_star + l - 1] = if l % 2 == 1 { deriv.neg() } else { deriv.clone() };
    }
    HierarchyState::new(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::{residual, GeneralRiccatiHierarchySpec};
    use crate::scalar::Rational;
    use num::{One, Zero};

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn exp_neg(k: usize) -> TruncatedSeries<Rational> {
        flow_solution(&CoefVector::new(vec![q(1, 1); k + 1]), &Rational::zero(), 1, k).unwrap().level(1).clone()
    }

    #[test]
    fn all_ones_is_exponential_at_every_level() {
        let s = flow_solution(&CoefVector::new(vec![q(1, 1); 30]), &Rational::zero(), 5, 20).unwrap();
        let e = exp_neg(20);
        for n in 1..=5 {
            assert_eq!(s.level(n), &e);
        }
        assert!(residual(&GeneralRiccatiHierarchySpec::linear(), &s).unwrap().exact_zero);
    }

    #[test]
    fn unit_vector() {
        let mut c = vec![q(0, 1); 12];
        c[0] = q(1, 1);
        let s = flow_solution(&CoefVector::new(c), &Rational::zero(), 3, 8).unwrap();
        assert_eq!(s.level(1).coeff(0), q(1, 1));
        assert!(s.level(1).coeffs()[1..].iter().all(|v| v.is_zero()));
        assert!(s.level(2).coeffs().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn linear_weights_give_shifted_exponential() {
        // Σ (k+1)(−x)^k/k! = (1 − x)e^{−x}
        let c = CoefVector::from_fn(15, |j| Rational::from_i64(j as i64));
        let s = flow_solution(&c, &Rational::zero(), 1, 14).unwrap();
        for k in 0..=14u64 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let expect = Rational::from_i64(sign * (k as i64 + 1)) / Rational::from_bigint(&factorial(k));
            assert_eq!(s.level(1).coeff(k as usize), expect);
        }
    }

    #[test]
    fn too_few_constants() {
        let c = CoefVector::new(vec![q(1, 1); 10]);
        assert_eq!(
            flow_solution(&c, &Rational::zero(), 3, 8),
            Err(Error::DependencyConeViolation { needed: 11, supplied: 10 })
        );
    }

    #[test]
    fn free_first_level_reproduces_flow() {
        let e = exp_neg(20);
        let g = generate_from_free(1, &e, 4, &[]).unwrap();
        let f = flow_solution(&CoefVector::new(vec![q(1, 1); 24]), &Rational::zero(), 4, 20).unwrap();
        for n in 1..=4 {
            assert_eq!(g.level(n).coeffs()[..=g.level(n).valid_order()], f.level(n).coeffs()[..=g.level(n).valid_order()]);
        }
    }

    #[test]
    fn polynomial_free_level() {
        let (a, b) = (q(3, 2), q(-2, 7));
        let g = generate_from_free(3, &TruncatedSeries::zero(Rational::zero(), 4), 5, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(g.level(2).coeff(0), -a.clone());
        assert!(g.level(2).coeffs()[1..].iter().all(|v| v.is_zero()));
        assert_eq!(g.level(1).coeff(0), b);
        assert_eq!(g.level(1).coeff(1), a);
        for n in 3..=5 {
            assert!(g.level(n).coeffs().iter().all(|v| v.is_zero()));
        }
        assert!(residual(&GeneralRiccatiHierarchySpec::linear(), &g).unwrap().exact_zero);
        assert_eq!(
            generate_from_free(3, &TruncatedSeries::zero(Rational::zero(), 4), 5, &[a]),
            Err(Error::MissingConstants { needed: 2, supplied: 1 })
        );
    }

    #[test]
    fn sine_chain() {
        // free y₂ = sin x: y₃ = −cos x, y₄ = −sin x; y₁ = cos-type antiderivative
        let k = 15;
        let sin: Vec<Rational> = (0..=k)
            .map(|i| {
                if i % 2 == 0 {
                    Rational::zero()
                } else {
                    let s = if (i / 2) % 2 == 0 { 1 } else { -1 };
                    Rational::from_i64(s) / Rational::from_bigint(&factorial(i as u64))
                }
            })
            .collect();
        let cos: Vec<Rational> = (0..=k)
            .map(|i| {
                if i % 2 == 1 {
                    Rational::zero()
                } else {
                    let s = if (i / 2) % 2 == 0 { 1 } else { -1 };
                    Rational::from_i64(s) / Rational::from_bigint(&factorial(i as u64))
                }
            })
            .collect();
        let free = TruncatedSeries::exact(Rational::zero(), sin.clone());
        let g = generate_from_free(2, &free, 4, &[Rational::one()]).unwrap();
        for i in 0..k {
            assert_eq!(g.level(3).coeff(i), -cos[i].clone());
        }
        for i in 0..k - 1 {
            assert_eq!(g.level(4).coeff(i), -sin[i].clone());
        }
        // y₁ = −(1 − cos x) − 1 = cos x − 2 ... value at 0 is −constant
        assert_eq!(g.level(1).coeff(0), -Rational::one());
        assert!(residual(&GeneralRiccatiHierarchySpec::linear(), &g).unwrap().exact_zero);
    }
}
