//! Free nilpotent Z-Lie rings with a Hall basis.
//!
//! The basis is built by the classical collection process: generators are
//! the basic elements of weight 1, and a bracket [C1, C2] of basic elements
//! is basic when C1 > C2 and, if C1 = [D1, D2], additionally D2 <= C2.
//! Elements of equal weight are ordered by their constituents, lower weight
//! before higher weight.  Structure constants come from rewriting with
//! antisymmetry and the Jacobi identity, memoized bottom-up by weight.

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::OnceLock;

use crate::assoc::AssocElement;
use crate::ratio::format_ratio;
use crate::sparse::SparseVec;
use crate::{Error, Result};

/// A generator of the free Lie ring; order by index is the Hall order on
/// weight-1 elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub index: usize,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Leaf(usize),
    /// Ordinals of the left and right constituents; both precede this
    /// element in the basis.
    Pair(usize, usize),
}

/// A basic commutator together with its position in the global Hall order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicCommutator {
    pub ordinal: usize,
    pub weight: usize,
    pub multidegree: Vec<usize>,
    pub shape: Shape,
    pub name: String,
}

/// Exact sparse rational vector over the basis of one algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieElement {
    pub(crate) n: u16,
    pub(crate) c: u16,
    pub coeffs: SparseVec,
}

impl LieElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.is_integral()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        Self { n: self.n, c: self.c, coeffs: self.coeffs.add(&other.coeffs) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        Self { n: self.n, c: self.c, coeffs: self.coeffs.sub(&other.coeffs) }
    }

    pub fn neg(&self) -> Self {
        Self { n: self.n, c: self.c, coeffs: self.coeffs.neg() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self { n: self.n, c: self.c, coeffs: self.coeffs.scale(c) }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        Self { n: self.n, c: self.c, coeffs: self.coeffs.scale_int(c) }
    }

    fn check(&self, other: &Self) {
        assert!(
            self.n == other.n && self.c == other.c,
            "elements belong to different algebras"
        );
    }
}

/// Antisymmetric structure tensor over a fixed basis; entries are stored for
/// i > j only.
#[derive(Clone, Debug)]
pub struct StructureTensor {
    pub dim: usize,
    entries: Vec<Vec<SparseVec>>,
}

impl StructureTensor {
    pub fn new(dim: usize, entries: Vec<Vec<SparseVec>>) -> Self {
        assert_eq!(entries.len(), dim);
        for (i, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), i);
        }
        Self { dim, entries }
    }

    /// Normal form of [e_i, e_j].
    pub fn basic(&self, i: usize, j: usize) -> SparseVec {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => SparseVec::zero(),
            Greater => self.entries[i][j].clone(),
            Less => self.entries[j][i].neg(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&SparseVec> {
        (i > j).then(|| &self.entries[i][j])
    }

    /// Bilinear extension.
    pub fn bracket(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (i, ai) in a.iter() {
            for (j, bj) in b.iter() {
                if i == j {
                    continue;
                }
                let (ii, jj, negate) = if i > j { (i, j, false) } else { (j, i, true) };
                let t = &self.entries[ii][jj];
                if t.is_empty() {
                    continue;
                }
                let prod = ai * bj;
                for (k, ck) in t.iter() {
                    let term = &prod * ck;
                    out.add_term(k, if negate { -term } else { term });
                }
            }
        }
        out
    }

    /// Entries with coefficients reduced mod p, for the finite-field paths.
    pub fn mod_p(&self, p: u64) -> Vec<Vec<Vec<(usize, u64)>>> {
        let f = crate::linalg::PrimeField::new(p);
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        v.iter()
                            .map(|(k, c)| {
                                assert!(c.denom().is_one(), "non-integral structure constant");
                                (k, f.from_int(c.numer()))
                            })
                            .filter(|&(_, c)| c != 0)
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Formal bracket expression over the generators.
#[derive(Clone, Debug)]
pub enum LieExpr {
    Gen(String),
    /// Left-normed word of single-letter generator names: "YZYZ" means
    /// [[[Y,Z],Y],Z].
    Word(String),
    Bracket(Box<LieExpr>, Box<LieExpr>),
    Sum(Vec<LieExpr>),
    Scale(BigRational, Box<LieExpr>),
}

impl LieExpr {
    pub fn word(w: &str) -> Self {
        Self::Word(w.to_string())
    }

    pub fn bracket(a: LieExpr, b: LieExpr) -> Self {
        Self::Bracket(Box::new(a), Box::new(b))
    }

    pub fn scale(c: BigRational, e: LieExpr) -> Self {
        Self::Scale(c, Box::new(e))
    }
}

struct XledBasis {
    words: Vec<String>,
    /// Row i is the Hall-coordinate vector of the i-th word.
    rows: Vec<SparseVec>,
}

/// Free nilpotent Z-Lie ring of class `c` on `n` generators.
pub struct FreeNilpotentAlgebra {
    pub n: usize,
    pub c: usize,
    generators: Vec<Generator>,
    basis: Vec<BasicCommutator>,
    tensor: StructureTensor,
    assoc_cache: OnceLock<Vec<AssocElement>>,
    xled: OnceLock<XledBasis>,
}

fn generator_names(n: usize) -> Vec<String> {
    if n <= 3 {
        ["X", "Y", "Z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("X{i}")).collect()
    }
}

fn display_name(basis: &[BasicCommutator], shape: &Shape, gens: &[Generator]) -> String {
    match shape {
        Shape::Leaf(g) => gens[*g].name.clone(),
        Shape::Pair(l, r) => {
            let left = &basis[*l];
            let right = &basis[*r];
            if matches!(right.shape, Shape::Leaf(_)) {
                format!("{}{}", left.name, right.name)
            } else {
                let lp = if matches!(left.shape, Shape::Leaf(_)) {
                    left.name.clone()
                } else {
                    format!("({})", left.name)
                };
                format!("{}({})", lp, right.name)
            }
        }
    }
}

impl FreeNilpotentAlgebra {
    pub fn new(n: usize, c: usize) -> Self {
        assert!(n >= 1 && c >= 1, "need at least one generator and class 1");
        let generators: Vec<Generator> = generator_names(n)
            .into_iter()
            .enumerate()
            .map(|(index, name)| Generator { index, name })
            .collect();

        let mut basis: Vec<BasicCommutator> = Vec::new();
        let mut pair_index = HashMap::new();
        for g in &generators {
            let mut md = vec![0usize; n];
            md[g.index] = 1;
            basis.push(BasicCommutator {
                ordinal: basis.len(),
                weight: 1,
                multidegree: md,
                shape: Shape::Leaf(g.index),
                name: g.name.clone(),
            });
        }
        for w in 2..=c {
            let mut candidates: Vec<(usize, usize)> = Vec::new();
            for l in 0..basis.len() {
                for r in 0..l {
                    if basis[l].weight + basis[r].weight != w {
                        continue;
                    }
                    if let Shape::Pair(_, d2) = basis[l].shape {
                        if d2 > r {
                            continue;
                        }
                    }
                    candidates.push((l, r));
                }
            }
            candidates.sort();
            for (l, r) in candidates {
                let mut md = basis[l].multidegree.clone();
                for (m, x) in md.iter_mut().zip(&basis[r].multidegree) {
                    *m += x;
                }
                let ordinal = basis.len();
                let shape = Shape::Pair(l, r);
                let name = display_name(&basis, &shape, &generators);
                basis.push(BasicCommutator { ordinal, weight: w, multidegree: md, shape, name });
                pair_index.insert((l, r), ordinal);
            }
        }

        let tensor = build_tensor(&basis, &pair_index, c);
        Self {
            n,
            c,
            generators,
            basis,
            tensor,
            assoc_cache: OnceLock::new(),
            xled: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasicCommutator] {
        &self.basis
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn tensor(&self) -> &StructureTensor {
        &self.tensor
    }

    /// Basis sizes per weight 1..=c.
    pub fn graded_dims(&self) -> Vec<usize> {
        let mut dims = vec![0usize; self.c];
        for b in &self.basis {
            dims[b.weight - 1] += 1;
        }
        dims
    }

    pub fn zero(&self) -> LieElement {
        self.element(SparseVec::zero())
    }

    pub fn element(&self, coeffs: SparseVec) -> LieElement {
        debug_assert!(coeffs.max_ordinal().map_or(true, |k| k < self.dim()));
        LieElement { n: self.n as u16, c: self.c as u16, coeffs }
    }

    pub fn basis_element(&self, ordinal: usize) -> LieElement {
        assert!(ordinal < self.dim());
        self.element(SparseVec::unit(ordinal))
    }

    pub fn generator(&self, index: usize) -> LieElement {
        assert!(index < self.n);
        self.basis_element(index)
    }

    pub fn generator_by_name(&self, name: &str) -> Result<LieElement> {
        self.generators
            .iter()
            .find(|g| g.name == name)
            .map(|g| self.basis_element(g.index))
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    fn owns(&self, e: &LieElement) -> bool {
        e.n as usize == self.n && e.c as usize == self.c
    }

    /// Bilinear antisymmetric bracket; zero beyond class `c`.
    pub fn bracket(&self, a: &LieElement, b: &LieElement) -> Result<LieElement> {
        if !self.owns(a) || !self.owns(b) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(self.element(self.tensor.bracket(&a.coeffs, &b.coeffs)))
    }

    /// Left-normed word over single-letter generator names.
    pub fn word(&self, w: &str) -> Result<LieElement> {
        let mut it = w.chars();
        let first = it
            .next()
            .ok_or_else(|| Error::Input("empty word".into()))?;
        let mut acc = self.generator_by_name(&first.to_string())?;
        for ch in it {
            let g = self.generator_by_name(&ch.to_string())?;
            acc = self.bracket(&acc, &g)?;
        }
        Ok(acc)
    }

    /// Unique basis expansion of a formal bracket expression.
    pub fn normal_form(&self, e: &LieExpr) -> Result<LieElement> {
        match e {
            LieExpr::Gen(name) => self.generator_by_name(name),
            LieExpr::Word(w) => self.word(w),
            LieExpr::Bracket(a, b) => {
                let a = self.normal_form(a)?;
                let b = self.normal_form(b)?;
                self.bracket(&a, &b)
            }
            LieExpr::Sum(parts) => {
                let mut acc = self.zero();
                for p in parts {
                    acc = acc.add(&self.normal_form(p)?);
                }
                Ok(acc)
            }
            LieExpr::Scale(c, inner) => Ok(self.normal_form(inner)?.scale(c)),
        }
    }

    pub fn format(&self, e: &LieElement) -> String {
        if e.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, c) in e.coeffs.iter() {
            let name = &self.basis[k].name;
            if c.is_one() {
                parts.push(name.clone());
            } else if (-c.clone()).is_one() {
                parts.push(format!("-{name}"));
            } else {
                parts.push(format!("{}*{}", format_ratio(c), name));
            }
        }
        parts.join(" + ").replace("+ -", "- ")
    }

    /// Embedding of an element into the truncated free associative algebra;
    /// an independent route to the bracket used as an oracle in tests.
    pub fn assoc_embedding(&self, e: &LieElement) -> AssocElement {
        let cache = self.assoc_cache.get_or_init(|| {
            let mut out: Vec<AssocElement> = Vec::with_capacity(self.dim());
            for b in &self.basis {
                let v = match &b.shape {
                    Shape::Leaf(g) => AssocElement::letter(self.c, *g as u8),
                    Shape::Pair(l, r) => out[*l].commutator(&out[*r]),
                };
                out.push(v);
            }
            out
        });
        let mut acc = AssocElement::zero(self.c);
        for (k, c) in e.coeffs.iter() {
            acc = acc.add(&cache[k].scale(c));
        }
        acc
    }

    /// The 32 left-normed words forming the X-led basis of the (3,4) algebra,
    /// in their fixed order.
    pub fn xled_words() -> [&'static str; 32] {
        [
            "X", "Y", "Z", "XY", "XZ", "YZ",
            "XYY", "XZZ", "XYZ", "XZY", "XYX", "XZX", "YZY", "ZYZ",
            "XYYY", "XZZZ", "XYXX", "XZXX", "XYXY", "XZXZ",
            "XYXZ", "XZXY", "XYZX", "XYZZ", "XZYY", "XYZY",
            "XZYZ", "XYYZ", "XZZY", "YZYY", "YZYZ", "ZYZZ",
        ]
    }

    fn xled(&self) -> Result<&XledBasis> {
        if (self.n, self.c) != (3, 4) {
            return Err(Error::Input("X-led basis is defined for (n, c) = (3, 4)".into()));
        }
        Ok(self.xled.get_or_init(|| {
            let words: Vec<String> = Self::xled_words().iter().map(|s| s.to_string()).collect();
            let rows = words.iter().map(|w| self.word(w).unwrap().coeffs).collect();
            XledBasis { words, rows }
        }))
    }

    /// Change of basis from Hall coordinates to the X-led word basis.
    /// Returns the word list and the 32x32 matrix whose row i is the Hall
    /// expansion of word i.
    pub fn xled_basis(&self) -> Result<(Vec<String>, Vec<LieElement>)> {
        let x = self.xled()?;
        Ok((
            x.words.clone(),
            x.rows.iter().map(|r| self.element(r.clone())).collect(),
        ))
    }

    /// Coordinates of an element in the X-led basis.
    pub fn to_xled_coords(&self, e: &LieElement) -> Result<Vec<BigRational>> {
        let x = self.xled()?;
        let m = crate::linalg::QMatrix::from_rows(
            x.rows.iter().map(|r| r.to_dense(self.dim())).collect(),
        );
        let inv = m.inverse().expect("X-led basis is unimodular");
        Ok(inv.apply_row(&e.coeffs.to_dense(self.dim())))
    }

    /// Checks the two rewriting identities used throughout: the four-letter
    /// shuffle PQRS = PSQR + SQPR + RSQP + SRPQ over all 81 generator
    /// substitutions, and the three relations replacing the non-left-normed
    /// weight-4 basics by left-normed words.
    pub fn verify_rewrite_identities(&self) -> Result<RewriteReport> {
        if (self.n, self.c) != (3, 4) {
            return Err(Error::Input("identity suite is defined for (n, c) = (3, 4)".into()));
        }
        let names = ["X", "Y", "Z"];
        let mut failures = Vec::new();
        let mut checked = 0usize;
        for p in names {
            for q in names {
                for r in names {
                    for s in names {
                        let lhs = self.word(&format!("{p}{q}{r}{s}"))?;
                        let rhs = self.word(&format!("{p}{s}{q}{r}"))?
                            .add(&self.word(&format!("{s}{q}{p}{r}"))?)
                            .add(&self.word(&format!("{r}{s}{q}{p}"))?)
                            .add(&self.word(&format!("{s}{r}{p}{q}"))?);
                        checked += 1;
                        if lhs != rhs {
                            failures.push(format!("PQRS failed at ({p},{q},{r},{s})"));
                        }
                    }
                }
            }
        }
        // (ZX)(YX) = YXXZ - YXZX,  (ZY)(YX) = XYZY - XYYZ,  (ZY)(ZX) = XZZY - XZYZ
        let base_change: [((&str, &str), (&str, &str)); 3] = [
            (("ZX", "YX"), ("YXXZ", "YXZX")),
            (("ZY", "YX"), ("XYZY", "XYYZ")),
            (("ZY", "ZX"), ("XZZY", "XZYZ")),
        ];
        for ((l, r), (w1, w2)) in base_change {
            let lhs = self.bracket(&self.word(l)?, &self.word(r)?)?;
            let rhs = self.word(w1)?.sub(&self.word(w2)?);
            checked += 1;
            if lhs != rhs {
                failures.push(format!("base change failed at ({l})({r})"));
            }
        }
        Ok(RewriteReport { checked, failures })
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            n: self.n,
            c: self.c,
            basis: self
                .basis
                .iter()
                .map(|b| BasisEntryJson {
                    ordinal: b.ordinal,
                    name: b.name.clone(),
                    weight: b.weight,
                    multidegree: b.multidegree.clone(),
                })
                .collect(),
            tensor: (0..self.dim())
                .flat_map(|i| (0..i).map(move |j| (i, j)))
                .filter_map(|(i, j)| {
                    let t = self.tensor.entry(i, j)?;
                    if t.is_empty() {
                        return None;
                    }
                    Some(TensorEntryJson {
                        i,
                        j,
                        terms: t.iter().map(|(k, c)| (k, format_ratio(c))).collect(),
                    })
                })
                .collect(),
        }
    }
}

/// Ordered Hall basis of the free nilpotent ring of class `c` on `n`
/// generators.
pub fn hall_basis(n: usize, c: usize) -> Vec<BasicCommutator> {
    FreeNilpotentAlgebra::new(n, c).basis.clone()
}

#[derive(Debug, Serialize)]
pub struct RewriteReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl RewriteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Serialize)]
pub struct BasisEntryJson {
    pub ordinal: usize,
    pub name: String,
    pub weight: usize,
    pub multidegree: Vec<usize>,
}

#[derive(Serialize)]
pub struct TensorEntryJson {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<(usize, String)>,
}

#[derive(Serialize)]
pub struct AlgebraJson {
    pub n: usize,
    pub c: usize,
    pub basis: Vec<BasisEntryJson>,
    pub tensor: Vec<TensorEntryJson>,
}

// ---------------------------------------------------------------------------
// Structure-constant computation

fn build_tensor(
    basis: &[BasicCommutator],
    pair_index: &HashMap<(usize, usize), usize>,
    class: usize,
) -> StructureTensor {
    let dim = basis.len();
    let mut memo: HashMap<(usize, usize), SparseVec> = HashMap::new();
    let mut in_progress: Vec<(usize, usize)> = Vec::new();
    let mut entries: Vec<Vec<SparseVec>> = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut row = Vec::with_capacity(i);
        for j in 0..i {
            row.push(nf_basic(i, j, basis, pair_index, class, &mut memo, &mut in_progress));
        }
        entries.push(row);
    }
    StructureTensor::new(dim, entries)
}

/// Normal form of [e_i, e_j] for basic elements, by Hall rewriting.
fn nf_basic(
    i: usize,
    j: usize,
    basis: &[BasicCommutator],
    pair_index: &HashMap<(usize, usize), usize>,
    class: usize,
    memo: &mut HashMap<(usize, usize), SparseVec>,
    in_progress: &mut Vec<(usize, usize)>,
) -> SparseVec {
    if i == j {
        return SparseVec::zero();
    }
    if basis[i].weight + basis[j].weight > class {
        return SparseVec::zero();
    }
    if i < j {
        return nf_basic(j, i, basis, pair_index, class, memo, in_progress).neg();
    }
    if let Some(v) = memo.get(&(i, j)) {
        return v.clone();
    }
    assert!(
        !in_progress.contains(&(i, j)),
        "cycle in Hall rewriting at ({i}, {j})"
    );
    in_progress.push((i, j));
    let result = match basis[i].shape {
        Shape::Leaf(_) => SparseVec::unit(pair_index[&(i, j)]),
        Shape::Pair(d1, d2) => {
            if d2 <= j {
                SparseVec::unit(pair_index[&(i, j)])
            } else {
                // [[d1,d2],j] = [[d1,j],d2] + [d1,[d2,j]]
                let left = nf_basic(d1, j, basis, pair_index, class, memo, in_progress);
                let mut acc =
                    nf_vec_basic(&left, d2, false, basis, pair_index, class, memo, in_progress);
                let right = nf_basic(d2, j, basis, pair_index, class, memo, in_progress);
                acc.add_assign(&nf_vec_basic(
                    &right,
                    d1,
                    true,
                    basis,
                    pair_index,
                    class,
                    memo,
                    in_progress,
                ));
                acc
            }
        }
    };
    in_progress.pop();
    memo.insert((i, j), result.clone());
    result
}

/// Normal form of [v, e_b] (or [e_b, v] when `flip`), for v a combination of
/// basic elements.
#[allow(clippy::too_many_arguments)]
fn nf_vec_basic(
    v: &SparseVec,
    b: usize,
    flip: bool,
    basis: &[BasicCommutator],
    pair_index: &HashMap<(usize, usize), usize>,
    class: usize,
    memo: &mut HashMap<(usize, usize), SparseVec>,
    in_progress: &mut Vec<(usize, usize)>,
) -> SparseVec {
    let mut out = SparseVec::zero();
    for (k, c) in v.iter() {
        let t = if flip {
            nf_basic(b, k, basis, pair_index, class, memo, in_progress)
        } else {
            nf_basic(k, b, basis, pair_index, class, memo, in_progress)
        };
        for (m, cm) in t.iter() {
            out.add_term(m, c * cm);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{rat, ratio};

    fn names(basis: &[BasicCommutator]) -> Vec<&str> {
        basis.iter().map(|b| b.name.as_str()).collect()
    }

    #[test]
    fn hall_basis_tiny_cases() {
        assert_eq!(names(&hall_basis(2, 2)), ["X", "Y", "YX"]);
        assert_eq!(names(&hall_basis(3, 2)), ["X", "Y", "Z", "YX", "ZX", "ZY"]);
        assert_eq!(names(&hall_basis(1, 4)), ["X"]);
    }

    #[test]
    fn hall_basis_3_4_matches_collection_order() {
        let expected = [
            "X", "Y", "Z", "YX", "ZX", "ZY",
            "YXX", "YXY", "YXZ", "ZXX", "ZXY", "ZXZ", "ZYY", "ZYZ",
            "(ZX)(YX)", "(ZY)(YX)", "(ZY)(ZX)",
            "YXXX", "YXXY", "YXXZ", "YXYY", "YXYZ", "YXZZ",
            "ZXXX", "ZXXY", "ZXXZ", "ZXYY", "ZXYZ", "ZXZZ",
            "ZYYY", "ZYYZ", "ZYZZ",
        ];
        let basis = hall_basis(3, 4);
        assert_eq!(names(&basis), expected);
        let alg = FreeNilpotentAlgebra::new(3, 4);
        assert_eq!(alg.graded_dims(), vec![3, 3, 8, 18]);
    }

    #[test]
    fn witt_dimensions() {
        // dim of the weight-w layer is (1/w) sum_{d|w} mu(d) n^(w/d)
        let witt = |n: usize, w: usize| -> usize {
            let mobius = [0i64, 1, -1, -1, 0, -1, 1, -1, 0];
            let mut s = 0i64;
            for d in 1..=w {
                if w % d == 0 {
                    s += mobius[d] * (n as i64).pow((w / d) as u32);
                }
            }
            (s / w as i64) as usize
        };
        for n in 2..=4 {
            let alg = FreeNilpotentAlgebra::new(n, 4);
            let dims = alg.graded_dims();
            for w in 1..=4 {
                assert_eq!(dims[w - 1], witt(n, w), "n={n} w={w}");
            }
        }
    }

    #[test]
    fn normal_form_basics() {
        let alg = FreeNilpotentAlgebra::new(3, 4);
        let x = alg.generator_by_name("X").unwrap();
        assert!(alg.bracket(&x, &x).unwrap().is_zero());
        // [X, Y] = -YX
        let xy = alg.word("XY").unwrap();
        let yx_ord = alg.basis().iter().position(|b| b.name == "YX").unwrap();
        assert_eq!(xy.coeffs.get(yx_ord), rat(-1));
        assert_eq!(xy.coeffs.len(), 1);
        // unknown generator
        assert!(alg.word("XW").is_err());
    }

    #[test]
    fn normal_form_is_idempotent_on_basis_words() {
        let alg = FreeNilpotentAlgebra::new(3, 4);
        for b in alg.basis() {
            if b.name.contains('(') {
                continue;
            }
            let e = alg.word(&b.name).unwrap();
            assert_eq!(e.coeffs, SparseVec::unit(b.ordinal), "{}", b.name);
        }
    }

    #[test]
    fn yzyz_shuffle_identity() {
        let alg = FreeNilpotentAlgebra::new(3, 4);
        let lhs = alg.word("YZYZ").unwrap();
        let rhs = alg.word("YZZY").unwrap().scale_int(2).add(&alg.word("ZYYZ").unwrap());
        assert_eq!(lhs, rhs);
        // consequence: YZYZ = YZZY = -ZYZY
        assert_eq!(alg.word("YZYZ").unwrap(), alg.word("YZZY").unwrap());
        assert_eq!(alg.word("YZYZ").unwrap(), alg.word("ZYZY").unwrap().neg());
    }

    #[test]
    fn bracket_of_weight2_basics() {
        // (YX)(ZX) = ZXXY - ZXYX
        let alg = FreeNilpotentAlgebra::new(3, 4);
        let lhs = alg
            .bracket(&alg.word("YX").unwrap(), &alg.word("ZX").unwrap())
            .unwrap();
        let rhs = alg.word("ZXXY").unwrap().sub(&alg.word("ZXYX").unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_edge_cases() {
        let alg = FreeNilpotentAlgebra::new(3, 4);
        let x = alg.generator(0);
        assert!(alg.bracket(&x, &alg.zero()).unwrap().is_zero());
        // [YX, X] is itself basic
        let yxx_ord = alg.basis().iter().position(|b| b.name == "YXX").unwrap();
        let v = alg.bracket(&alg.word("YX").unwrap(), &x).unwrap();
        assert_eq!(v.coeffs, SparseVec::unit(yxx_ord));
        // elements of different algebras are rejected
        let other = FreeNilpotentAlgebra::new(2, 4);
        assert!(matches!(
            alg.bracket(&x, &other.generator(0)),
            Err(crate::Error::AlgebraMismatch)
        ));
    }

    proptest::proptest! {
        #[test]
        fn bracket_is_bilinear_and_antisymmetric(
            a_terms in proptest::collection::vec((0usize..32, -9i64..=9), 0..6),
            b_terms in proptest::collection::vec((0usize..32, -9i64..=9), 0..6),
            s in -4i64..=4,
        ) {
            let alg = FreeNilpotentAlgebra::new(3, 4);
            let a = alg.element(SparseVec::from_terms(
                a_terms.into_iter().map(|(k, c)| (k, rat(c))),
            ));
            let b = alg.element(SparseVec::from_terms(
                b_terms.into_iter().map(|(k, c)| (k, rat(c))),
            ));
            let ab = alg.bracket(&a, &b).unwrap();
            let ba = alg.bracket(&b, &a).unwrap();
            proptest::prop_assert!(ab.add(&ba).is_zero());
            let scaled = alg.bracket(&a.scale_int(s), &b).unwrap();
            proptest::prop_assert_eq!(scaled, ab.scale_int(s));
        }
    }

    #[test]
    fn rewrite_identity_suite_passes() {
        let alg = FreeNilpotentAlgebra::new(3, 4);
        let report = alg.verify_rewrite_identities().unwrap();
        assert_eq!(report.checked, 84);
        assert!(report.ok(), "{:?}", report.failures);
    }

    #[test]
    fn antisymmetry_jacobi_grading_all_triples() {
        let alg = FreeNilpotentAlgebra::new(3, 4);
        let t = alg.tensor();
        let dim = alg.dim();
        for i in 0..dim {
            for j in 0..dim {
                let bij = t.basic(i, j);
                let bji = t.basic(j, i);
                assert!(bij.add(&bji).is_zero(), "antisymmetry ({i},{j})");
                // grading
                let wi = alg.basis()[i].weight + alg.basis()[j].weight;
                for (k, _) in bij.iter() {
                    assert_eq!(alg.basis()[k].weight, wi);
                    let mut md = alg.basis()[i].multidegree.clone();
                    for (m, x) in md.iter_mut().zip(&alg.basis()[j].multidegree) {
                        *m += x;
                    }
                    assert_eq!(alg.basis()[k].multidegree, md);
                }
            }
        }
        for i in 0..dim {
            for j in i + 1..dim {
                for k in j + 1..dim {
                    let a = t.bracket(&t.basic(i, j), &SparseVec::unit(k));
                    let b = t.bracket(&t.basic(j, k), &SparseVec::unit(i));
                    let c = t.bracket(&t.basic(k, i), &SparseVec::unit(j));
                    assert!(a.add(&b).add(&c).is_zero(), "jacobi ({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn structure_constants_are_integral() {
        for (n, c) in [(2, 4), (3, 4)] {
            let alg = FreeNilpotentAlgebra::new(n, c);
            for i in 0..alg.dim() {
                for j in 0..i {
                    assert!(alg.tensor().basic(i, j).is_integral());
                }
            }
        }
    }

    #[test]
    fn associative_embedding_is_a_bracket_oracle() {
        for (n, c) in [(2, 4), (3, 4)] {
            let alg = FreeNilpotentAlgebra::new(n, c);
            for i in 0..alg.dim() {
                for j in 0..i {
                    let nf = alg.element(alg.tensor().basic(i, j));
                    let lhs = alg.assoc_embedding(&nf);
                    let ei = alg.assoc_embedding(&alg.basis_element(i));
                    let ej = alg.assoc_embedding(&alg.basis_element(j));
                    assert_eq!(lhs, ei.commutator(&ej), "({i},{j}) in ({n},{c})");
                }
            }
        }
    }

    #[test]
    fn xled_basis_is_unimodular() {
        let alg = FreeNilpotentAlgebra::new(3, 4);
        let (words, rows) = alg.xled_basis().unwrap();
        assert_eq!(words.len(), 32);
        let int_rows: Vec<Vec<num_bigint::BigInt>> = rows
            .iter()
            .map(|r| r.coeffs.to_int_row(32).expect("integral"))
            .collect();
        let det = crate::linalg::bareiss_det(&int_rows);
        assert!(det == 1.into() || det == (-1).into(), "det = {det}");
    }

    #[test]
    fn xled_coordinates_round_trip() {
        let alg = FreeNilpotentAlgebra::new(3, 4);
        let e = alg.word("YZYX").unwrap().add(&alg.word("XY").unwrap().scale(&ratio(3, 2)));
        let coords = alg.to_xled_coords(&e).unwrap();
        let (_, rows) = alg.xled_basis().unwrap();
        let mut back = alg.zero();
        for (c, row) in coords.iter().zip(&rows) {
            back = back.add(&row.scale(c));
        }
        assert_eq!(back, e);
    }

    #[test]
    fn expression_interface() {
        let alg = FreeNilpotentAlgebra::new(3, 4);
        let e = LieExpr::Sum(vec![
            LieExpr::word("YXXX"),
            LieExpr::scale(rat(-1), LieExpr::word("YZY")),
        ]);
        let r1 = alg.normal_form(&e).unwrap();
        assert!(r1.is_integral());
        assert_eq!(
            r1,
            alg.word("YXXX").unwrap().sub(&alg.word("YZY").unwrap())
        );
        let b = LieExpr::bracket(LieExpr::Gen("X".into()), LieExpr::Gen("X".into()));
        assert!(alg.normal_form(&b).unwrap().is_zero());
    }

    #[test]
    fn json_export_shape() {
        let alg = FreeNilpotentAlgebra::new(3, 4);
        let j = alg.to_json();
        assert_eq!(j.basis.len(), 32);
        assert_eq!(j.basis[31].name, "ZYZZ");
        assert_eq!(j.basis[31].weight, 4);
        let s = serde_json::to_string(&j).unwrap();
        assert!(s.contains("\"multidegree\""));
    }
}
