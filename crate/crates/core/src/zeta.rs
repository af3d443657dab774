//! Exact bivariate polynomial and rational-function arithmetic in (q, X)
//! and (q, t), the series assembly of the valuation lattice sum, the closed
//! forms, and the functional-equation test.
//!
//! q stands for the prime read formally; X is the auxiliary variable of the
//! lattice sum and t carries p^{-s}.  Coefficients are exact integers and
//! equality of rational functions is decided by cross-multiplication, so no
//! polynomial factorization is ever needed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

use crate::padic::{det_valuation, theta, ValuationTriple};
use crate::Result;

/// Tag for the second variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Var2 {
    X,
    T,
}

impl Var2 {
    fn symbol(&self) -> &'static str {
        match self {
            Var2::X => "X",
            Var2::T => "t",
        }
    }
}

fn ck_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("exponent overflow")
}

fn ck_mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("exponent overflow")
}

/// Sparse polynomial in q and one auxiliary variable with integer
/// coefficients and nonnegative exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    pub var2: Var2,
    terms: BTreeMap<(i64, i64), BigInt>,
}

impl BiPoly {
    pub fn zero(var2: Var2) -> Self {
        Self { var2, terms: BTreeMap::new() }
    }

    pub fn one(var2: Var2) -> Self {
        Self::monomial(var2, 0, 0, BigInt::one())
    }

    pub fn monomial(var2: Var2, qe: i64, ve: i64, c: BigInt) -> Self {
        let mut p = Self::zero(var2);
        p.add_term(qe, ve, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), &BigInt)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, qe: i64, ve: i64) -> BigInt {
        self.terms.get(&(qe, ve)).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Coefficient of the auxiliary variable power, as a polynomial in q.
    pub fn coeff_of_var2(&self, ve: i64) -> BTreeMap<i64, BigInt> {
        self.terms
            .iter()
            .filter(|((_, b), _)| *b == ve)
            .map(|((a, _), c)| (*a, c.clone()))
            .collect()
    }

    pub fn add_term(&mut self, qe: i64, ve: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(qe, ve)) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&(qe, ve));
                }
            }
            None => {
                self.terms.insert((qe, ve), c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.var2, other.var2);
        let mut out = self.clone();
        for ((a, b), c) in other.iter() {
            out.add_term(a, b, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.var2, other.var2);
        let mut out = self.clone();
        for ((a, b), c) in other.iter() {
            out.add_term(a, b, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            var2: self.var2,
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.var2, other.var2);
        let mut out = Self::zero(self.var2);
        for ((a1, b1), c1) in self.iter() {
            for ((a2, b2), c2) in other.iter() {
                out.add_term(ck_add(a1, a2), ck_add(b1, b2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.var2);
        }
        Self {
            var2: self.var2,
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Largest (q, v) key in lexicographic order together with its
    /// coefficient.
    pub fn leading(&self) -> Option<((i64, i64), &BigInt)> {
        self.terms.iter().next_back().map(|(k, c)| (*k, c))
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
        }
        g
    }

    pub fn div_content(&self, g: &BigInt) -> Self {
        if g.is_one() {
            return self.clone();
        }
        Self {
            var2: self.var2,
            terms: self.terms.iter().map(|(k, c)| (*k, c / g)).collect(),
        }
    }

    /// Exact division; `None` if `d` is not a factor.
    pub fn try_div_exact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero());
        let ((da, db), dc) = d.leading().unwrap();
        let mut rem = self.clone();
        let mut out = Self::zero(self.var2);
        while let Some(((ra, rb), rc)) = rem.leading() {
            let (qa, qb) = (ra - da, rb - db);
            if qa < 0 || qb < 0 {
                return None;
            }
            let (quot, r) = rc.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            let term = Self::monomial(self.var2, qa, qb, quot);
            rem = rem.sub(&term.mul(d));
            out = out.add(&term);
        }
        Some(out)
    }

    /// Substitute X -> q^95 t^34, landing in (q, t).
    pub fn substitute_x(&self) -> Self {
        assert_eq!(self.var2, Var2::X);
        let mut out = Self::zero(Var2::T);
        for ((a, b), c) in self.iter() {
            out.add_term(ck_add(a, ck_mul(95, b)), ck_mul(34, b), c.clone());
        }
        out
    }

    /// Substitute q -> value, collapsing onto the auxiliary variable.
    pub fn eval_q(&self, value: &BigInt) -> Self {
        let mut out = Self::zero(self.var2);
        for ((a, b), c) in self.iter() {
            assert!(a >= 0);
            out.add_term(0, b, c * value.pow(a as u32));
        }
        out
    }

    /// Exponent-negated polynomial, cleared back into nonnegative exponents
    /// by the monomial of maximal exponents; returns the clearing exponents.
    fn reversed(&self) -> (Self, (i64, i64)) {
        let (ma, mb) = self.terms.keys().fold((0i64, 0i64), |(xa, xb), (a, b)| {
            (xa.max(*a), xb.max(*b))
        });
        let mut out = Self::zero(self.var2);
        for ((a, b), c) in self.iter() {
            out.add_term(ma - a, mb - b, c.clone());
        }
        (out, (ma, mb))
    }

    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for ((a, b), c) in self.iter() {
            let mut factors = Vec::new();
            if !c.abs().is_one() || (a == 0 && b == 0) {
                factors.push(c.abs().to_string());
            }
            if a != 0 {
                factors.push(if a == 1 { "q".into() } else { format!("q^{a}") });
            }
            if b != 0 {
                let s = self.var2.symbol();
                factors.push(if b == 1 { s.into() } else { format!("{s}^{b}") });
            }
            let term = factors.join("*");
            if parts.is_empty() {
                parts.push(if c.is_negative() { format!("-{term}") } else { term });
            } else {
                parts.push(format!("{} {term}", if c.is_negative() { "-" } else { "+" }));
            }
        }
        parts.join(" ")
    }

    /// Display with q written as p and t as p^{-s}: a term c q^a t^b comes
    /// out as c p^{a-bs}.
    pub fn display_s(&self) -> String {
        assert_eq!(self.var2, Var2::T);
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for ((a, b), c) in self.iter() {
            let body = if a == 0 && b == 0 {
                c.abs().to_string()
            } else {
                let coeff = if c.abs().is_one() { String::new() } else { c.abs().to_string() };
                let exp = if b == 0 {
                    format!("{a}")
                } else {
                    format!("{a}-{b}s")
                };
                format!("{coeff}p^{{{exp}}}")
            };
            if parts.is_empty() {
                parts.push(if c.is_negative() { format!("-{body}") } else { body });
            } else {
                parts.push(format!("{} {body}", if c.is_negative() { "-" } else { "+" }));
            }
        }
        parts.join(" ")
    }
}

/// Ratio of two integer polynomials; normalization removes common integer
/// content, peels off the small cyclotomic-like factors that show up here,
/// and fixes the sign of the denominator's leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFn {
    pub num: BiPoly,
    pub den: BiPoly,
}

fn known_factors(var2: Var2) -> Vec<BiPoly> {
    match var2 {
        Var2::X => vec![
            // 1 - X^3
            {
                let mut f = BiPoly::one(Var2::X);
                f.add_term(0, 3, BigInt::from(-1));
                f
            },
            // 1 - q^3 X^6
            {
                let mut f = BiPoly::one(Var2::X);
                f.add_term(3, 6, BigInt::from(-1));
                f
            },
        ],
        Var2::T => vec![
            // 1 - q^285 t^102
            {
                let mut f = BiPoly::one(Var2::T);
                f.add_term(285, 102, BigInt::from(-1));
                f
            },
            // 1 - q^573 t^204
            {
                let mut f = BiPoly::one(Var2::T);
                f.add_term(573, 204, BigInt::from(-1));
                f
            },
        ],
    }
}

impl RationalFn {
    pub fn new(num: BiPoly, den: BiPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        assert_eq!(num.var2, den.var2);
        let mut rf = Self { num, den };
        rf.normalize();
        rf
    }

    pub fn from_poly(p: BiPoly) -> Self {
        let one = BiPoly::one(p.var2);
        Self::new(p, one)
    }

    fn normalize(&mut self) {
        for f in known_factors(self.num.var2) {
            loop {
                match (self.num.try_div_exact(&f), self.den.try_div_exact(&f)) {
                    (Some(n), Some(d)) => {
                        self.num = n;
                        self.den = d;
                    }
                    _ => break,
                }
            }
        }
        if self.num.is_zero() {
            self.den = BiPoly::one(self.den.var2);
            return;
        }
        let g = self.num.content().gcd(&self.den.content());
        if !g.is_one() && !g.is_zero() {
            self.num = self.num.div_content(&g);
            self.den = self.den.div_content(&g);
        }
        if self.den.leading().map_or(false, |(_, c)| c.is_negative()) {
            self.num = self.num.neg();
            self.den = self.den.neg();
        }
    }

    /// Equality by cross-multiplication; always sound regardless of how far
    /// normalization reduced either side.
    pub fn equals(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn mul_monomial(&self, qe: i64, ve: i64, c: BigInt) -> Self {
        let m = BiPoly::monomial(self.num.var2, qe, ve, c);
        Self::new(self.num.mul(&m), self.den.clone())
    }

    /// Power-series expansion in the auxiliary variable up to `degree`.
    /// The denominator must have unit constant term.
    pub fn series(&self, degree: i64) -> BiPoly {
        let var2 = self.num.var2;
        let mut den_by: BTreeMap<i64, BTreeMap<i64, BigInt>> = BTreeMap::new();
        for ((a, b), c) in self.den.iter() {
            den_by.entry(b).or_default().insert(a, c.clone());
        }
        let d0 = den_by.get(&0).cloned().unwrap_or_default();
        assert!(
            d0.len() == 1 && d0.contains_key(&0) && d0[&0].abs().is_one(),
            "series expansion needs a unit constant term in the denominator"
        );
        let d0 = d0[&0].clone();
        let mut num_by: BTreeMap<i64, BTreeMap<i64, BigInt>> = BTreeMap::new();
        for ((a, b), c) in self.num.iter() {
            num_by.entry(b).or_default().insert(a, c.clone());
        }
        // c_k = (n_k - sum_{j>=1} d_j c_{k-j}) / d0, polynomials in q
        let mut coeffs: Vec<BTreeMap<i64, BigInt>> = Vec::new();
        for k in 0..=degree {
            let mut acc: BTreeMap<i64, BigInt> = num_by.get(&k).cloned().unwrap_or_default();
            for (j, dj) in den_by.range(1..k + 1) {
                let prev = &coeffs[(k - j) as usize];
                for (a1, c1) in dj {
                    for (a2, c2) in prev {
                        let e = acc.entry(ck_add(*a1, *a2)).or_insert_with(BigInt::zero);
                        *e -= c1 * c2;
                    }
                }
            }
            acc.retain(|_, c| !c.is_zero());
            if !d0.is_one() {
                for c in acc.values_mut() {
                    *c = -c.clone();
                }
            }
            coeffs.push(acc);
        }
        let mut out = BiPoly::zero(var2);
        for (k, poly) in coeffs.into_iter().enumerate() {
            for (a, c) in poly {
                out.add_term(a, k as i64, c);
            }
        }
        out
    }

    /// X -> q^95 t^34 on both numerator and denominator.
    pub fn substitute_x(&self) -> Self {
        Self::new(self.num.substitute_x(), self.den.substitute_x())
    }

    pub fn eval_q(&self, value: &BigInt) -> Self {
        Self::new(self.num.eval_q(value), self.den.eval_q(value))
    }

    pub fn display(&self) -> String {
        format!("({}) / ({})", self.num.display(), self.den.display())
    }

    pub fn display_s(&self) -> String {
        format!("({}) / ({})", self.num.display_s(), self.den.display_s())
    }

    pub fn to_json(&self) -> RationalFnJson {
        let dump = |p: &BiPoly| -> Vec<(i64, i64, String)> {
            p.iter().map(|((a, b), c)| (a, b, c.to_string())).collect()
        };
        RationalFnJson {
            var2: self.num.var2,
            numerator: dump(&self.num),
            denominator: dump(&self.den),
            display: self.display(),
        }
    }
}

#[derive(Serialize)]
pub struct RationalFnJson {
    pub var2: Var2,
    pub numerator: Vec<(i64, i64, String)>,
    pub denominator: Vec<(i64, i64, String)>,
    pub display: String,
}

// ---------------------------------------------------------------------------
// The lattice sum and its closed forms

/// Truncated double sum over i, j >= 0 with 3 | (i + j):
/// q^min(i,j) X^(i+j) for i + j <= degree.
pub fn lattice_sum_truncated(degree: i64) -> BiPoly {
    let mut out = BiPoly::zero(Var2::X);
    for i in 0..=degree {
        for j in 0..=degree - i {
            if (i + j) % 3 == 0 {
                out.add_term(i.min(j), i + j, BigInt::one());
            }
        }
    }
    out
}

/// Sub-sum over pairs with both indices divisible by 3.
pub fn lattice_sum_equal_residues_truncated(degree: i64) -> BiPoly {
    let mut out = BiPoly::zero(Var2::X);
    for i in (0..=degree).step_by(3) {
        for j in (0..=degree - i).step_by(3) {
            out.add_term(i.min(j), i + j, BigInt::one());
        }
    }
    out
}

/// Sub-sum over pairs with residues (1, 2) and (2, 1) mod 3.
pub fn lattice_sum_mixed_residues_truncated(degree: i64) -> BiPoly {
    let mut out = BiPoly::zero(Var2::X);
    for i in 0..=degree {
        for j in 0..=degree - i {
            if i % 3 != 0 && j % 3 != 0 && (i + j) % 3 == 0 {
                out.add_term(i.min(j), i + j, BigInt::one());
            }
        }
    }
    out
}

fn closed_den() -> BiPoly {
    let fs = known_factors(Var2::X);
    fs[0].mul(&fs[1])
}

/// (1 + X^3 + 2 q X^3 + 2 q^2 X^6) / ((1 - X^3)(1 - q^3 X^6))
pub fn closed_form() -> RationalFn {
    let mut num = BiPoly::one(Var2::X);
    num.add_term(0, 3, BigInt::one());
    num.add_term(1, 3, BigInt::from(2));
    num.add_term(2, 6, BigInt::from(2));
    RationalFn::new(num, closed_den())
}

/// (1 + X^3) / ((1 - X^3)(1 - q^3 X^6)), the equal-residue piece.
pub fn closed_form_equal_residues() -> RationalFn {
    let mut num = BiPoly::one(Var2::X);
    num.add_term(0, 3, BigInt::one());
    RationalFn::new(num, closed_den())
}

/// (2 q X^3 + 2 q^2 X^6) / ((1 - X^3)(1 - q^3 X^6)), the mixed-residue piece.
pub fn closed_form_mixed_residues() -> RationalFn {
    let mut num = BiPoly::zero(Var2::X);
    num.add_term(1, 3, BigInt::from(2));
    num.add_term(2, 6, BigInt::from(2));
    RationalFn::new(num, closed_den())
}

/// Assembles the integrand series directly from the layer measures and the
/// determinant character: the term of a valuation triple is
/// q^(theta_1 + theta_2 + theta_3) t^(33 v_a + 23 v_b + 23 v_c).
pub fn integral_series_from_theta(degree: i64) -> Result<BiPoly> {
    let mut out = BiPoly::zero(Var2::T);
    for vb in 0..=degree {
        for vc in 0..=degree - vb {
            let v = match ValuationTriple::from_bc(vb as u32, vc as u32) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let qe = theta(1, &v)?.0 + theta(2, &v)?.0 + theta(3, &v)?.0;
            let te = det_valuation(&v);
            out.add_term(qe, te, BigInt::one());
        }
    }
    Ok(out)
}

/// X -> q^95 t^34 on a rational function in (q, X).
pub fn substitute_to_zeta(rf: &RationalFn) -> RationalFn {
    rf.substitute_x()
}

/// The local zeta function of the lattice: the closed form pushed through
/// X -> q^95 t^34.
pub fn zeta_rational_fn() -> RationalFn {
    substitute_to_zeta(&closed_form())
}

/// The same expression written out literally for cross-checks.
pub fn zeta_literal() -> RationalFn {
    let mut num = BiPoly::one(Var2::T);
    num.add_term(285, 102, BigInt::one());
    num.add_term(286, 102, BigInt::from(2));
    num.add_term(572, 204, BigInt::from(2));
    let fs = known_factors(Var2::T);
    RationalFn::new(num, fs[0].mul(&fs[1]))
}

/// Functional-equation test: invert both variables, clear denominators, and
/// decide whether Z(q^-1, t^-1) / Z(q, t) is +- q^b t^c.  Returns (a, b, c)
/// with sign (-1)^a, or `None` when the ratio is not a signed monomial.
pub fn functional_equation_test(z: &RationalFn) -> Option<(u8, i64, i64)> {
    assert!(!z.num.is_zero(), "zeta expression must be nonzero");
    let (num_rev, (na, nb)) = z.num.reversed();
    let (den_rev, (da, db)) = z.den.reversed();
    // Z(inv) = q^(da-na) t^(db-nb) * num_rev / den_rev
    let p = num_rev.mul(&z.den);
    let q = den_rev.mul(&z.num);
    if p.num_terms() != q.num_terms() {
        return None;
    }
    let ((pa, pb), pc) = p.leading()?;
    let ((qa, qb), qc) = q.leading()?;
    let (alpha, beta) = (pa - qa, pb - qb);
    let sign = if pc == qc {
        BigInt::one()
    } else if pc == &(-qc.clone()) {
        -BigInt::one()
    } else {
        return None;
    };
    // verify p == sign * q shifted by (alpha, beta)
    for ((a, b), c) in q.iter() {
        if p.coeff(a + alpha, b + beta) != c * &sign {
            return None;
        }
    }
    let a = if sign.is_one() { 0 } else { 1 };
    Some((a, da - na + alpha, db - nb + beta))
}
