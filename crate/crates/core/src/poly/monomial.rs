use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::rational::{is_integer_exponent, Exponent};

/// Exponent vector over the ambient variable set.
///
/// Ordered graded-lexicographically: total degree first, then the first
/// variable with differing exponent decides.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[Exponent]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![Exponent::zero(); nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![Exponent::zero(); nvars];
        e[index] = Exponent::from_integer(1);
        Monomial(e.into_boxed_slice())
    }

    pub fn from_exponents(exponents: Vec<Exponent>) -> Self {
        Monomial(exponents.into_boxed_slice())
    }

    pub fn from_ints(exponents: &[i64]) -> Self {
        Monomial(exponents.iter().map(|&e| Exponent::from_integer(e)).collect())
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.0
    }

    pub fn exponent(&self, index: usize) -> Exponent {
        self.0[index]
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> Exponent {
        self.0.iter().copied().sum()
    }

    pub fn weighted_degree(&self, weights: &[Exponent]) -> Exponent {
        self.0.iter().zip(weights).map(|(e, w)| *e * *w).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Every exponent is a nonnegative integer.
    pub fn is_polynomial_grade(&self) -> bool {
        self.0
            .iter()
            .all(|e| is_integer_exponent(*e) && !e.is_negative())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// Exponent-wise difference; may go negative.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn pow(&self, e: Exponent) -> Monomial {
        Monomial(self.0.iter().map(|a| a * e).collect())
    }

    /// `self | other` in the polynomial sense.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub(crate) fn with_exponent(&self, index: usize, e: Exponent) -> Monomial {
        let mut v = self.0.to_vec();
        v[index] = e;
        Monomial(v.into_boxed_slice())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
