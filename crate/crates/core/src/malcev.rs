//! Truncated Hausdorff series and the induced group law on the lattice.
//!
//! The series is not copied from a table: it is computed as
//! log(exp U exp V) in the degree-truncated free associative algebra and
//! then projected onto the Hall basis of the free Lie ring on two
//! generators by solving the linear system that expresses Lie monomials in
//! associative words.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::assoc::{self, AssocElement};
use crate::free_lie::{FreeNilpotentAlgebra, Shape, StructureTensor};
use crate::lattice::QuotientLattice;
use crate::linalg::solve_rational;
use crate::ratio::{denominator_lcm, format_ratio};
use crate::sparse::SparseVec;
use crate::{Error, Result};

/// The Hausdorff series truncated at total degree `class`, expressed over
/// the Hall basis of the free Lie ring on two generators.
pub struct TruncatedBCH {
    pub class: usize,
    /// (ordinal into the two-generator Hall basis, coefficient)
    pub terms: Vec<(usize, BigRational)>,
    /// Least common denominator of the coefficients.
    pub m: BigInt,
    two_gen: FreeNilpotentAlgebra,
}

/// Derive the truncated series from the associative-algebra computation.
pub fn bch_truncated(class: usize) -> TruncatedBCH {
    assert!(class >= 1);
    let two_gen = FreeNilpotentAlgebra::new(2, class);
    let u = AssocElement::letter(class, 0);
    let v = AssocElement::letter(class, 1);
    let z = assoc::log(&assoc::exp(&u).mul(&assoc::exp(&v)));

    let mut terms: Vec<(usize, BigRational)> = Vec::new();
    for w in 1..=class {
        let ordinals: Vec<usize> = two_gen
            .basis()
            .iter()
            .filter(|b| b.weight == w)
            .map(|b| b.ordinal)
            .collect();
        let rows: Vec<Vec<BigRational>> = ordinals
            .iter()
            .map(|&o| {
                two_gen
                    .assoc_embedding(&two_gen.basis_element(o))
                    .homogeneous_dense(2, w)
            })
            .collect();
        let target = z.homogeneous_dense(2, w);
        let coeffs = solve_rational(&rows, &target)
            .expect("the Hausdorff series is a Lie element in each degree");
        for (o, c) in ordinals.into_iter().zip(coeffs) {
            if !c.is_zero() {
                terms.push((o, c));
            }
        }
    }
    let m = denominator_lcm(terms.iter().map(|(_, c)| c));
    TruncatedBCH { class, terms, m, two_gen }
}

impl TruncatedBCH {
    /// The series as an element of the free Lie ring on two generators.
    pub fn as_element(&self) -> crate::free_lie::LieElement {
        self.two_gen
            .element(SparseVec::from_terms(self.terms.iter().cloned()))
    }

    pub fn two_gen_algebra(&self) -> &FreeNilpotentAlgebra {
        &self.two_gen
    }

    /// Coefficient of the Hall monomial with the given display name.
    pub fn coefficient(&self, name: &str) -> BigRational {
        match self.two_gen.basis().iter().find(|b| b.name == name) {
            Some(b) => self
                .terms
                .iter()
                .find(|(o, _)| *o == b.ordinal)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(BigRational::zero),
            None => BigRational::zero(),
        }
    }

    /// Evaluate the series at (a, b) in any Lie ring given by a structure
    /// tensor of class >= `self.class`.
    pub fn evaluate(&self, tensor: &StructureTensor, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let dim = self.two_gen.dim();
        let mut cache: Vec<Option<SparseVec>> = vec![None; dim];
        let mut out = SparseVec::zero();
        for (o, c) in &self.terms {
            let v = self.eval_monomial(*o, tensor, a, b, &mut cache);
            out.add_assign(&v.scale(c));
        }
        out
    }

    fn eval_monomial(
        &self,
        ordinal: usize,
        tensor: &StructureTensor,
        a: &SparseVec,
        b: &SparseVec,
        cache: &mut Vec<Option<SparseVec>>,
    ) -> SparseVec {
        if let Some(v) = &cache[ordinal] {
            return v.clone();
        }
        let v = match self.two_gen.basis()[ordinal].shape {
            Shape::Leaf(0) => a.clone(),
            Shape::Leaf(_) => b.clone(),
            Shape::Pair(l, r) => {
                let lv = self.eval_monomial(l, tensor, a, b, cache);
                let rv = self.eval_monomial(r, tensor, a, b, cache);
                tensor.bracket(&lv, &rv)
            }
        };
        cache[ordinal] = Some(v.clone());
        v
    }

    pub fn to_json(&self) -> BchJson {
        BchJson {
            class: self.class,
            m: self.m.to_string(),
            terms: self
                .terms
                .iter()
                .map(|(o, c)| BchTermJson {
                    monomial: self.two_gen.basis()[*o].name.clone(),
                    weight: self.two_gen.basis()[*o].weight,
                    coefficient: format_ratio(c),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct BchJson {
    pub class: usize,
    pub m: String,
    pub terms: Vec<BchTermJson>,
}

#[derive(Serialize)]
pub struct BchTermJson {
    pub monomial: String,
    pub weight: usize,
    pub coefficient: String,
}

/// Element of the group exp(m Lambda), carried as the plain lattice
/// coordinates of an element of m Lambda.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub coords: SparseVec,
}

/// The group (m Lambda, *) with x * y given by the truncated series.
pub struct MalcevGroup<'a> {
    lambda: &'a QuotientLattice,
    bch: TruncatedBCH,
}

impl<'a> MalcevGroup<'a> {
    pub fn new(lambda: &'a QuotientLattice) -> Self {
        Self { lambda, bch: bch_truncated(4) }
    }

    pub fn bch(&self) -> &TruncatedBCH {
        &self.bch
    }

    pub fn m(&self) -> &BigInt {
        &self.bch.m
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { coords: SparseVec::zero() }
    }

    pub fn element(&self, coords: SparseVec) -> Result<GroupElement> {
        if !coords.is_divisible_by(&self.bch.m) {
            return Err(Error::NonIntegral);
        }
        Ok(GroupElement { coords })
    }

    /// Random element of m Lambda with underlying coordinates in
    /// [-bound, bound] * m.
    pub fn random_element(&self, rng: &mut impl Rng, bound: i64) -> GroupElement {
        let m: i64 = self.bch.m.to_string().parse().unwrap();
        let coords = SparseVec::from_terms((0..self.lambda.rank()).map(|k| {
            (k, crate::ratio::rat(rng.gen_range(-bound..=bound) * m))
        }));
        GroupElement { coords }
    }

    /// Group product; closure in m Lambda is asserted, a failure would mean
    /// the scaling argument is broken.
    pub fn mul(&self, u: &GroupElement, v: &GroupElement) -> GroupElement {
        let coords = self.bch.evaluate(self.lambda.tensor(), &u.coords, &v.coords);
        assert!(
            coords.is_divisible_by(&self.bch.m),
            "group product left m*Lambda"
        );
        GroupElement { coords }
    }

    pub fn inverse(&self, u: &GroupElement) -> GroupElement {
        GroupElement { coords: u.coords.neg() }
    }

    /// u^-1 v^-1 u v.
    pub fn commutator(&self, u: &GroupElement, v: &GroupElement) -> GroupElement {
        let a = self.mul(&self.inverse(u), &self.inverse(v));
        let b = self.mul(&a, u);
        self.mul(&b, v)
    }

    /// Left-normed length-4 group commutator against the Lie bracket of the
    /// same arguments; in class 4 the two must agree exactly.
    pub fn commutator4_vs_lie(&self, xs: &[GroupElement; 4]) -> bool {
        let mut grp = xs[0].clone();
        for x in &xs[1..] {
            grp = self.commutator(&grp, x);
        }
        let mut lie = xs[0].coords.clone();
        for x in &xs[1..] {
            lie = self.lambda.bracket(&lie, &x.coords);
        }
        grp.coords == lie
    }

    /// Finite-k congruence shadows of the limit formulas recovering the Lie
    /// operations from the group: coordinates of Phi(p^k u, p^k v) - p^k(u+v)
    /// have valuation >= 2k, and those of the group commutator of p^k u,
    /// p^k v minus p^{2k} [u, v] have valuation >= 3k.
    pub fn limit_congruence(
        &self,
        u: &GroupElement,
        v: &GroupElement,
        k: u32,
        p: u64,
    ) -> Result<LimitReport> {
        if p <= 3 {
            return Err(Error::UnsupportedPrime(p));
        }
        let pk = BigRational::from_integer(BigInt::from(p).pow(k));
        let p2k = BigRational::from_integer(BigInt::from(p).pow(2 * k));
        let a = GroupElement { coords: u.coords.scale(&pk) };
        let b = GroupElement { coords: v.coords.scale(&pk) };

        let sum = self.mul(&a, &b);
        let d_add = sum.coords.sub(&a.coords.add(&b.coords));
        let add_min = d_add.min_valuation(p);

        let grp = self.commutator(&a, &b);
        let lie = self.lambda.bracket(&u.coords, &v.coords).scale(&p2k);
        let d_comm = grp.coords.sub(&lie);
        let comm_min = d_comm.min_valuation(p);

        let add_bound = 2 * k as i64;
        let comm_bound = 3 * k as i64;
        Ok(LimitReport {
            p,
            k,
            add_bound,
            add_min_valuation: add_min,
            add_ok: add_min.map_or(true, |m| m >= add_bound),
            comm_bound,
            comm_min_valuation: comm_min,
            comm_ok: comm_min.map_or(true, |m| m >= comm_bound),
        })
    }

    /// Finite-level shadow of the coset identity x * exp(p^k L) = x + p^k L.
    ///
    /// One inclusion is a valuation check on samples; for the other we solve
    /// Phi(x, p^k u) = x + p^k w for u by successive correction.  Each
    /// correction step pushes the error one step down the lower central
    /// series, so in class 4 the iteration reaches an exact preimage.
    pub fn coset_equality_check(
        &self,
        x: &SparseVec,
        w: &SparseVec,
        k: u32,
        p: u64,
    ) -> Result<CosetReport> {
        if p <= 3 {
            return Err(Error::UnsupportedPrime(p));
        }
        let pk = BigRational::from_integer(BigInt::from(p).pow(k));
        let tensor = self.lambda.tensor();

        // forward inclusion: Phi(x, p^k w) - x has valuations >= k
        let fwd = self.bch.evaluate(tensor, x, &w.scale(&pk)).sub(x);
        let forward_ok =
            fwd.is_p_integral(p) && fwd.min_valuation(p).map_or(true, |m| m >= k as i64);

        // reverse inclusion: find u with Phi(x, p^k u) = x + p^k w exactly
        let target = x.add(&w.scale(&pk));
        let mut u = w.clone();
        let mut exact = false;
        for _ in 0..=self.bch.class {
            let err = target.sub(&self.bch.evaluate(tensor, x, &u.scale(&pk)));
            if err.is_zero() {
                exact = true;
                break;
            }
            u.add_assign(&err.scale(&pk.recip()));
        }
        let witness_integral = u.is_p_integral(p);
        Ok(CosetReport { p, k, forward_ok, preimage_found: exact, witness_integral })
    }
}

#[derive(Debug, Serialize)]
pub struct LimitReport {
    pub p: u64,
    pub k: u32,
    pub add_bound: i64,
    pub add_min_valuation: Option<i64>,
    pub add_ok: bool,
    pub comm_bound: i64,
    pub comm_min_valuation: Option<i64>,
    pub comm_ok: bool,
}

impl LimitReport {
    pub fn ok(&self) -> bool {
        self.add_ok && self.comm_ok
    }
}

#[derive(Debug, Serialize)]
pub struct CosetReport {
    pub p: u64,
    pub k: u32,
    pub forward_ok: bool,
    pub preimage_found: bool,
    pub witness_integral: bool,
}

impl CosetReport {
    pub fn ok(&self) -> bool {
        self.forward_ok && self.preimage_found && self.witness_integral
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lambda;
    use crate::ratio::{rat, ratio};
    use num_traits::One;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bch_class_4_matches_the_displayed_series() {
        let bch = bch_truncated(4);
        assert_eq!(bch.m, BigInt::from(24));
        // X + Y + (1/2)[X,Y] - (1/12)[X,Y,X] + (1/12)[X,Y,Y] - (1/24)[X,Y,X,Y]
        // rewritten into Hall coordinates of the two-generator ring.
        let alg = bch.two_gen_algebra();
        let expected = alg
            .word("X")
            .unwrap()
            .add(&alg.word("Y").unwrap())
            .add(&alg.word("XY").unwrap().scale(&ratio(1, 2)))
            .add(&alg.word("XYX").unwrap().scale(&ratio(-1, 12)))
            .add(&alg.word("XYY").unwrap().scale(&ratio(1, 12)))
            .add(&alg.word("XYXY").unwrap().scale(&ratio(-1, 24)));
        assert_eq!(bch.as_element(), expected);
        assert_eq!(bch.terms.len(), 6);
    }

    #[test]
    fn bch_small_classes() {
        let b1 = bch_truncated(1);
        assert_eq!(b1.m, BigInt::one());
        assert_eq!(b1.terms.len(), 2);
        let b2 = bch_truncated(2);
        assert_eq!(b2.m, BigInt::from(2));
        assert_eq!(b2.coefficient("YX"), ratio(-1, 2));
        // classical degree-2 and degree-3 values
        let b3 = bch_truncated(3);
        assert_eq!(b3.coefficient("YX"), ratio(-1, 2));
        assert_eq!(b3.coefficient("YXX"), ratio(1, 12));
        assert_eq!(b3.coefficient("YXY"), ratio(-1, 12));
    }

    #[test]
    fn product_of_scaled_generators() {
        let lambda = build_lambda().unwrap();
        let g = MalcevGroup::new(&lambda);
        let ord = |w: &str| lambda.words().iter().position(|x| x == w).unwrap();
        let u = g.element(SparseVec::unit(ord("x")).scale_int(24)).unwrap();
        let v = g.element(SparseVec::unit(ord("y")).scale_int(24)).unwrap();
        let prod = g.mul(&u, &v);
        let expected = SparseVec::from_terms([
            (ord("x"), rat(24)),
            (ord("y"), rat(24)),
            (ord("xy"), rat(288)),
            (ord("xyx"), rat(-1152)),
            (ord("xyy"), rat(1152)),
            (ord("xyxy"), rat(-13824)),
        ]);
        assert_eq!(prod.coords, expected);
    }

    #[test]
    fn identity_and_inverse() {
        let lambda = build_lambda().unwrap();
        let g = MalcevGroup::new(&lambda);
        let mut rng = ChaCha8Rng::seed_from_u64(crate::DEFAULT_SEED);
        for _ in 0..10 {
            let u = g.random_element(&mut rng, 10);
            assert_eq!(g.mul(&u, &g.identity()), u);
            assert_eq!(g.mul(&g.identity(), &u), u);
            assert!(g.mul(&u, &g.inverse(&u)).coords.is_zero());
        }
    }

    #[test]
    fn associativity_samples() {
        let lambda = build_lambda().unwrap();
        let g = MalcevGroup::new(&lambda);
        let mut rng = ChaCha8Rng::seed_from_u64(crate::DEFAULT_SEED);
        for _ in 0..20 {
            let a = g.random_element(&mut rng, 10);
            let b = g.random_element(&mut rng, 10);
            let c = g.random_element(&mut rng, 10);
            assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
        }
    }

    #[test]
    fn abelian_restriction_is_addition() {
        let lambda = build_lambda().unwrap();
        let g = MalcevGroup::new(&lambda);
        let mut rng = ChaCha8Rng::seed_from_u64(crate::DEFAULT_SEED);
        let top = lambda.weight_range(4);
        for _ in 0..10 {
            let coords = |rng: &mut ChaCha8Rng| {
                SparseVec::from_terms(
                    top.clone().map(|k| (k, rat(rng.gen_range(-10i64..=10) * 24))),
                )
            };
            let u = g.element(coords(&mut rng)).unwrap();
            let v = g.element(coords(&mut rng)).unwrap();
            assert_eq!(g.mul(&u, &v).coords, u.coords.add(&v.coords));
        }
    }

    #[test]
    fn group_commutator_equals_lie_bracket_at_length_4() {
        let lambda = build_lambda().unwrap();
        let g = MalcevGroup::new(&lambda);
        let ord = |w: &str| lambda.words().iter().position(|x| x == w).unwrap();
        let x24 = GroupElement { coords: SparseVec::unit(ord("x")).scale_int(24) };
        let y24 = GroupElement { coords: SparseVec::unit(ord("y")).scale_int(24) };
        assert!(g.commutator4_vs_lie(&[x24.clone(), y24.clone(), x24.clone(), y24.clone()]));
        // any tuple containing the identity gives zero on both sides
        assert!(g.commutator4_vs_lie(&[x24.clone(), g.identity(), y24.clone(), x24.clone()]));
        let mut rng = ChaCha8Rng::seed_from_u64(crate::DEFAULT_SEED);
        for _ in 0..10 {
            let xs = [
                g.random_element(&mut rng, 10),
                g.random_element(&mut rng, 10),
                g.random_element(&mut rng, 10),
                g.random_element(&mut rng, 10),
            ];
            assert!(g.commutator4_vs_lie(&xs));
        }
    }

    #[test]
    fn limit_congruences() {
        let lambda = build_lambda().unwrap();
        let g = MalcevGroup::new(&lambda);
        let ord = |w: &str| lambda.words().iter().position(|x| x == w).unwrap();
        let gx = |w: &str| GroupElement { coords: SparseVec::unit(ord(w)).scale_int(24) };
        let r = g.limit_congruence(&gx("x"), &gx("y"), 2, 5).unwrap();
        assert!(r.ok(), "{r:?}");
        assert!(r.add_min_valuation.unwrap() >= 4);
        let r = g.limit_congruence(&gx("y"), &gx("z"), 1, 7).unwrap();
        assert!(r.ok(), "{r:?}");
        let zero = g.identity();
        let r = g.limit_congruence(&zero, &gx("y"), 3, 5).unwrap();
        assert_eq!(r.add_min_valuation, None);
        assert!(r.ok());
        assert!(g.limit_congruence(&gx("x"), &gx("y"), 1, 3).is_err());
    }

    #[test]
    fn coset_equality_samples() {
        let lambda = build_lambda().unwrap();
        let g = MalcevGroup::new(&lambda);
        let mut rng = ChaCha8Rng::seed_from_u64(crate::DEFAULT_SEED);
        for _ in 0..10 {
            let x = SparseVec::from_terms(
                (0..lambda.rank()).map(|k| (k, rat(rng.gen_range(-20i64..=20)))),
            );
            let w = SparseVec::from_terms(
                (0..lambda.rank()).map(|k| (k, rat(rng.gen_range(-20i64..=20)))),
            );
            for (k, p) in [(1u32, 5u64), (2, 7)] {
                let rep = g.coset_equality_check(&x, &w, k, p).unwrap();
                assert!(rep.ok(), "{rep:?}");
            }
        }
    }
}
