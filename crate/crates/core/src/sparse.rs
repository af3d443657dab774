//! Sparse exact-rational coefficient vectors over an ordered basis.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

use crate::ratio::{is_integer, is_p_integral, valuation};

/// Sparse map ordinal -> coefficient; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseVec {
    terms: BTreeMap<usize, BigRational>,
}

impl SparseVec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(ordinal: usize) -> Self {
        let mut v = Self::zero();
        v.add_term(ordinal, BigRational::one());
        v
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, BigRational)>) -> Self {
        let mut v = Self::zero();
        for (k, c) in terms {
            v.add_term(k, c);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, ordinal: usize) -> BigRational {
        self.terms.get(&ordinal).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeff(&self, ordinal: usize) -> Option<&BigRational> {
        self.terms.get(&ordinal)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.keys().copied()
    }

    pub fn max_ordinal(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    pub fn add_term(&mut self, ordinal: usize, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(ordinal).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&ordinal);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (k, c) in other.iter() {
            self.add_term(k, c.clone());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.iter() {
            out.add_term(k, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(c)))
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(is_integer)
    }

    /// All coefficients divisible by `m` (as integers).
    pub fn is_divisible_by(&self, m: &BigInt) -> bool {
        self.terms
            .values()
            .all(|c| is_integer(c) && (c.numer() % m).is_zero())
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        self.terms.values().all(|c| is_p_integral(c, p))
    }

    /// Minimum p-adic valuation over all coefficients; `None` for the zero vector.
    pub fn min_valuation(&self, p: u64) -> Option<i64> {
        self.terms.values().filter_map(|c| valuation(c, p)).min()
    }

    /// Dense integer coordinates; fails on non-integral coefficients.
    pub fn to_int_row(&self, dim: usize) -> Option<Vec<BigInt>> {
        let mut row = vec![BigInt::zero(); dim];
        for (k, c) in self.iter() {
            if !is_integer(c) || k >= dim {
                return None;
            }
            row[k] = c.numer().clone();
        }
        Some(row)
    }

    pub fn to_dense(&self, dim: usize) -> Vec<BigRational> {
        let mut row = vec![BigRational::zero(); dim];
        for (k, c) in self.iter() {
            row[k] = c.clone();
        }
        row
    }

    pub fn from_int_row(row: &[BigInt]) -> Self {
        Self::from_terms(
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k, BigRational::from_integer(c.clone()))),
        )
    }

    pub fn from_dense(row: &[BigRational]) -> Self {
        Self::from_terms(
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k, c.clone())),
        )
    }

    /// Largest absolute numerator, handy for sanity bounds in tests.
    pub fn max_abs_numer(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.numer().abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{rat, ratio};

    #[test]
    fn no_stored_zeros() {
        let mut v = SparseVec::unit(3);
        v.add_term(3, rat(-1));
        assert!(v.is_zero());
        let w = SparseVec::from_terms([(1, rat(2)), (2, rat(0))]);
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn arithmetic() {
        let v = SparseVec::from_terms([(0, rat(1)), (4, ratio(1, 2))]);
        let w = v.scale(&rat(2)).sub(&v);
        assert_eq!(w, v);
        assert!(!v.is_integral());
        assert!(v.scale(&rat(2)).is_integral());
    }
}
