//! Small helpers around `BigRational` used throughout the crate.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

/// Serialize as `num` or `num/den`, the form used in all JSON exports.
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_ratio(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => Some(BigRational::new(n.parse().ok()?, d.parse().ok()?)),
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> u64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` encodes v_p(0) = infinity.
pub fn valuation(r: &BigRational, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    Some(int_valuation(r.numer(), p) as i64 - int_valuation(r.denom(), p) as i64)
}

pub fn is_p_integral(r: &BigRational, p: u64) -> bool {
    match valuation(r, p) {
        None => true,
        Some(v) => v >= 0,
    }
}

pub fn pow_u(base: u64, exp: u64) -> BigUint {
    BigUint::from(base).pow(exp as u32)
}

/// Least common multiple of the denominators of a coefficient list.
pub fn denominator_lcm<'a>(coeffs: impl Iterator<Item = &'a BigRational>) -> BigInt {
    let mut m = BigInt::one();
    for c in coeffs {
        m = m.lcm(c.denom());
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(valuation(&ratio(50, 3), 5), Some(2));
        assert_eq!(valuation(&ratio(3, 25), 5), Some(-2));
        assert_eq!(valuation(&rat(0), 5), None);
        assert!(is_p_integral(&ratio(50, 3), 5));
        assert!(!is_p_integral(&ratio(3, 25), 5));
    }

    #[test]
    fn ratio_round_trip() {
        for s in ["3", "-7/12", "0"] {
            assert_eq!(format_ratio(&parse_ratio(s).unwrap()), s);
        }
    }

    #[test]
    fn denominator_lcm_of_bch_like_list() {
        let cs = [rat(1), ratio(1, 2), ratio(-1, 12), ratio(1, 24)];
        assert_eq!(denominator_lcm(cs.iter()), BigInt::from(24));
    }
}
