//! Degree-truncated free associative algebra on a small alphabet.
//!
//! Elements are sparse rational combinations of words of length at most the
//! truncation degree.  This is the substrate for deriving the truncated
//! Hausdorff series from first principles (log of a product of exponentials)
//! and it doubles as an independent oracle for the Lie normal form: basic
//! commutators embed as iterated associative commutators.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub type Word = Vec<u8>;

/// Sparse element of the truncated algebra: word -> coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AssocElement {
    pub degree_cap: usize,
    terms: BTreeMap<Word, BigRational>,
}

impl AssocElement {
    pub fn zero(degree_cap: usize) -> Self {
        Self { degree_cap, terms: BTreeMap::new() }
    }

    pub fn one(degree_cap: usize) -> Self {
        let mut e = Self::zero(degree_cap);
        e.add_term(Vec::new(), BigRational::one());
        e
    }

    pub fn letter(degree_cap: usize, i: u8) -> Self {
        let mut e = Self::zero(degree_cap);
        e.add_term(vec![i], BigRational::one());
        e
    }

    pub fn add_term(&mut self, w: Word, c: BigRational) {
        if c.is_zero() || w.len() > self.degree_cap {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &[u8]) -> BigRational {
        self.terms.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.iter() {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.iter() {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.degree_cap);
        }
        Self {
            degree_cap: self.degree_cap,
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cap = self.degree_cap;
        let mut out = Self::zero(cap);
        for (w1, c1) in self.iter() {
            for (w2, c2) in other.iter() {
                if w1.len() + w2.len() > cap {
                    continue;
                }
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1 * c2);
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// The degree-d homogeneous component as a dense vector over all words
    /// of length d on `alphabet` letters, in lexicographic word order.
    pub fn homogeneous_dense(&self, alphabet: usize, d: usize) -> Vec<BigRational> {
        let n = alphabet.pow(d as u32);
        let mut out = vec![BigRational::zero(); n];
        for (w, c) in self.iter() {
            if w.len() == d {
                let mut idx = 0usize;
                for &l in w {
                    idx = idx * alphabet + l as usize;
                }
                out[idx] = c.clone();
            }
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }
}

/// exp of a constant-free element, truncated.
pub fn exp(x: &AssocElement) -> AssocElement {
    assert!(x.coeff(&[]).is_zero(), "exp needs a constant-free argument");
    let cap = x.degree_cap;
    let mut out = AssocElement::one(cap);
    let mut pow = AssocElement::one(cap);
    let mut fact = BigInt::one();
    for n in 1..=cap {
        pow = pow.mul(x);
        if pow.is_zero() {
            break;
        }
        fact *= BigInt::from(n as u64);
        out = out.add(&pow.scale(&BigRational::new(BigInt::one(), fact.clone())));
    }
    out
}

/// log of an element with constant term 1, truncated.
pub fn log(y: &AssocElement) -> AssocElement {
    assert!(y.coeff(&[]).is_one(), "log needs constant term 1");
    let cap = y.degree_cap;
    let z = y.sub(&AssocElement::one(cap));
    let mut out = AssocElement::zero(cap);
    let mut pow = AssocElement::one(cap);
    for n in 1..=cap {
        pow = pow.mul(&z);
        if pow.is_zero() {
            break;
        }
        let sign = if n % 2 == 1 { 1 } else { -1 };
        out = out.add(&pow.scale(&BigRational::new(BigInt::from(sign), BigInt::from(n as u64))));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{rat, ratio};

    #[test]
    fn word_multiplication_truncates() {
        let x = AssocElement::letter(2, 0);
        let y = AssocElement::letter(2, 1);
        let xy = x.mul(&y);
        assert_eq!(xy.coeff(&[0, 1]), rat(1));
        assert!(xy.mul(&x).is_zero());
    }

    #[test]
    fn exp_log_inverse_in_truncation() {
        let x = AssocElement::letter(4, 0);
        let e = exp(&x);
        assert_eq!(e.coeff(&[0, 0]), ratio(1, 2));
        assert_eq!(e.coeff(&[0, 0, 0, 0]), ratio(1, 24));
        let back = log(&e);
        assert_eq!(back, x);
    }

    #[test]
    fn log_of_product_starts_with_sum() {
        let x = AssocElement::letter(3, 0);
        let y = AssocElement::letter(3, 1);
        let z = log(&exp(&x).mul(&exp(&y)));
        assert_eq!(z.coeff(&[0]), rat(1));
        assert_eq!(z.coeff(&[1]), rat(1));
        // degree-2 part is (XY - YX)/2
        assert_eq!(z.coeff(&[0, 1]), ratio(1, 2));
        assert_eq!(z.coeff(&[1, 0]), ratio(-1, 2));
    }
}
