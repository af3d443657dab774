//! Integer Lie ideals and the rank-25 quotient lattice.
//!
//! The quotient is taken of the free class-4 ring on X, Y, Z by the ideal
//! generated by R1 = YXXX - YZY and R2 = ZXXX - ZYZ.  Its Z-basis is a fixed
//! list of 25 left-normed x-led words; all later matrix computations are
//! written in exactly these coordinates.

use num_traits::{One, Signed};
use serde::Serialize;

use crate::free_lie::{FreeNilpotentAlgebra, LieElement, StructureTensor};
use crate::linalg::{self, IntRow, QMatrix};
use crate::ratio::format_ratio;
use crate::sparse::SparseVec;
use crate::{Error, Result};

/// Bracket-closed integer row space inside a free nilpotent algebra.
pub struct LieIdeal {
    pub generators: Vec<LieElement>,
    /// Hermite basis of the row space, in ambient Hall coordinates.
    basis: Vec<IntRow>,
    dim: usize,
}

impl LieIdeal {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_rows(&self) -> &[IntRow] {
        &self.basis
    }

    pub fn basis_elements(&self, alg: &FreeNilpotentAlgebra) -> Vec<LieElement> {
        self.basis
            .iter()
            .map(|r| alg.element(SparseVec::from_int_row(r)))
            .collect()
    }

    /// Integer row-space membership.
    pub fn contains(&self, v: &LieElement) -> bool {
        match v.coeffs.to_int_row(self.dim) {
            Some(row) => linalg::hnf_contains(&self.basis, &row),
            None => false,
        }
    }

    /// Membership in the rational span (scales denominators away first).
    pub fn contains_rational(&self, v: &LieElement) -> bool {
        let mut rows: Vec<Vec<num_rational::BigRational>> = self
            .basis
            .iter()
            .map(|r| SparseVec::from_int_row(r).to_dense(self.dim))
            .collect();
        let base_rank = linalg::rational_rank(&rows);
        rows.push(v.coeffs.to_dense(self.dim));
        linalg::rational_rank(&rows) == base_rank
    }
}

/// Smallest bracket-closed integer row space containing the generators:
/// saturate by bracketing against every ambient basis element until the
/// Hermite form stabilizes.
pub fn ideal_closure(alg: &FreeNilpotentAlgebra, generators: &[LieElement]) -> Result<LieIdeal> {
    let dim = alg.dim();
    let mut rows: Vec<IntRow> = Vec::new();
    for g in generators {
        let row = g.coeffs.to_int_row(dim).ok_or(Error::NonIntegral)?;
        rows.push(row);
    }
    let mut hnf = linalg::hermite_normal_form(&rows, dim);
    loop {
        let mut next = hnf.clone();
        for r in &hnf {
            let v = SparseVec::from_int_row(r);
            for j in 0..dim {
                let b = alg.tensor().bracket(&v, &SparseVec::unit(j));
                if b.is_zero() {
                    continue;
                }
                next.push(b.to_int_row(dim).expect("integral bracket"));
            }
        }
        let next = linalg::hermite_normal_form(&next, dim);
        if next == hnf {
            break;
        }
        hnf = next;
    }
    Ok(LieIdeal { generators: generators.to_vec(), basis: hnf, dim })
}

/// The fixed 25-word basis of the quotient, lowercase in quotient context.
pub const LAMBDA_WORDS: [&str; 25] = [
    "x", "y", "z", "xy", "xz", "yz",
    "xyy", "xzz", "xyz", "xzy", "xyx", "xzx",
    "xyyy", "xzzz", "xyxx", "xzxx", "xyxy", "xzxz",
    "xyxz", "xzxy", "xyzx", "xyzz", "xzyy", "xyzy", "xzyz",
];

/// The quotient lattice: ambient free algebra, ideal, chosen complement
/// basis, integral projection, and the induced structure tensor.
pub struct QuotientLattice {
    ambient: FreeNilpotentAlgebra,
    ideal: LieIdeal,
    words: Vec<String>,
    complement: Vec<SparseVec>,
    weights: Vec<usize>,
    multidegrees: Vec<Vec<usize>>,
    /// 32x25; right-multiplication sends ambient coordinates to quotient
    /// coordinates.  Integral because the stacked basis is unimodular.
    projection: QMatrix,
    tensor: StructureTensor,
}

/// Builds the lattice and checks the construction invariants loudly.
pub fn build_lambda() -> Result<QuotientLattice> {
    let alg = FreeNilpotentAlgebra::new(3, 4);
    let r1 = alg.word("YXXX")?.sub(&alg.word("YZY")?);
    let r2 = alg.word("ZXXX")?.sub(&alg.word("ZYZ")?);
    let ideal = ideal_closure(&alg, &[r1, r2])?;
    QuotientLattice::new(alg, ideal)
}

impl QuotientLattice {
    pub fn new(ambient: FreeNilpotentAlgebra, ideal: LieIdeal) -> Result<Self> {
        let dim = ambient.dim();
        let words: Vec<String> = LAMBDA_WORDS.iter().map(|s| s.to_string()).collect();
        let mut complement = Vec::with_capacity(words.len());
        let mut weights = Vec::new();
        let mut multidegrees = Vec::new();
        for w in &words {
            let e = ambient.word(&w.to_uppercase())?;
            weights.push(w.len());
            let mut md = vec![0usize; 3];
            for ch in w.chars() {
                md[(ch as u8 - b'x') as usize] += 1;
            }
            multidegrees.push(md);
            complement.push(e.coeffs.clone());
        }
        let rank = words.len();

        // Stack complement rows over ideal rows; the square matrix must be
        // unimodular, otherwise the chosen complement is wrong.
        let mut stacked: Vec<IntRow> = Vec::with_capacity(dim);
        for v in &complement {
            stacked.push(v.to_int_row(dim).ok_or(Error::NonIntegral)?);
        }
        stacked.extend(ideal.basis_rows().iter().cloned());
        if stacked.len() != dim {
            return Err(Error::Input(format!(
                "complement ({}) + ideal ({}) does not fill the ambient rank {}",
                rank,
                ideal.rank(),
                dim
            )));
        }
        let det = linalg::bareiss_det(&stacked);
        if !det.abs().is_one() {
            return Err(Error::Input(format!(
                "complement/ideal stack has determinant {det}, expected +-1"
            )));
        }

        let m = QMatrix::from_rows(
            stacked
                .iter()
                .map(|r| SparseVec::from_int_row(r).to_dense(dim))
                .collect(),
        );
        let inv = m.inverse().expect("unimodular stack");
        let mut projection = QMatrix::zeros(dim, rank);
        for i in 0..dim {
            for j in 0..rank {
                assert!(
                    inv[(i, j)].denom().is_one(),
                    "projection must be integral for a unimodular stack"
                );
                projection[(i, j)] = inv[(i, j)].clone();
            }
        }

        // Quotient structure tensor in the chosen coordinates.
        let mut entries: Vec<Vec<SparseVec>> = Vec::with_capacity(rank);
        for i in 0..rank {
            let mut row = Vec::with_capacity(i);
            for j in 0..i {
                let b = ambient.tensor().bracket(&complement[i], &complement[j]);
                let q = project_vec(&projection, &b, dim);
                assert!(q.is_integral(), "quotient structure constants must be integral");
                row.push(q);
            }
            entries.push(row);
        }
        let tensor = StructureTensor::new(rank, entries);

        Ok(Self { ambient, ideal, words, complement, weights, multidegrees, projection, tensor })
    }

    pub fn rank(&self) -> usize {
        self.words.len()
    }

    pub fn ambient(&self) -> &FreeNilpotentAlgebra {
        &self.ambient
    }

    pub fn ideal(&self) -> &LieIdeal {
        &self.ideal
    }

    pub fn tensor(&self) -> &StructureTensor {
        &self.tensor
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn weight(&self, ordinal: usize) -> usize {
        self.weights[ordinal]
    }

    pub fn multidegree(&self, ordinal: usize) -> &[usize] {
        &self.multidegrees[ordinal]
    }

    /// Ordinals of the basis elements of one weight (they are contiguous).
    pub fn weight_range(&self, w: usize) -> std::ops::Range<usize> {
        let start = self.weights.iter().position(|&x| x == w).unwrap_or(self.rank());
        start..start + self.weights.iter().filter(|&&x| x == w).count()
    }

    /// Quotient coordinates of an ambient element.
    pub fn project(&self, e: &LieElement) -> SparseVec {
        project_vec(&self.projection, &e.coeffs, self.ambient.dim())
    }

    /// The chosen section: quotient coordinates back to an ambient element.
    pub fn lift(&self, v: &SparseVec) -> LieElement {
        let mut acc = SparseVec::zero();
        for (k, c) in v.iter() {
            acc.add_assign(&self.complement[k].scale(c));
        }
        self.ambient.element(acc)
    }

    pub fn bracket(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        self.tensor.bracket(a, b)
    }

    /// Quotient normal form of a left-normed word over x, y, z.
    pub fn word(&self, w: &str) -> Result<SparseVec> {
        Ok(self.project(&self.ambient.word(&w.to_uppercase())?))
    }

    pub fn format(&self, v: &SparseVec) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, c) in v.iter() {
            let name = &self.words[k];
            if c.is_one() {
                parts.push(name.clone());
            } else {
                parts.push(format!("{}*{}", format_ratio(c), name));
            }
        }
        parts.join(" + ").replace("+ -", "- ")
    }

    /// Ranks of the lower central series terms, over Z from the quotient
    /// tensor.
    pub fn lower_central_ranks(&self) -> Vec<usize> {
        let rank = self.rank();
        let mut current: Vec<IntRow> = (0..rank)
            .map(|i| SparseVec::unit(i).to_int_row(rank).unwrap())
            .collect();
        let mut ranks = vec![current.len()];
        loop {
            let mut next_rows: Vec<IntRow> = Vec::new();
            for r in &current {
                let v = SparseVec::from_int_row(r);
                for j in 0..rank {
                    let b = self.tensor.bracket(&v, &SparseVec::unit(j));
                    if !b.is_zero() {
                        next_rows.push(b.to_int_row(rank).unwrap());
                    }
                }
            }
            let next = linalg::hermite_normal_form(&next_rows, rank);
            ranks.push(next.len());
            if next.is_empty() {
                break;
            }
            current = next;
        }
        ranks
    }

    /// Graded ranks gamma_i / gamma_{i+1}.
    pub fn graded_ranks(&self) -> Vec<usize> {
        let lcs = self.lower_central_ranks();
        lcs.windows(2).map(|w| w[0] - w[1]).collect()
    }

    /// For every left-normed length-4 word over {x,y,z}: its quotient normal
    /// form must be an integer combination of basis elements whose
    /// multidegree equals that of the word.
    pub fn same_weight_check(&self) -> SameWeightReport {
        let letters = ['x', 'y', 'z'];
        let mut checked = 0usize;
        let mut failures = Vec::new();
        for a in letters {
            for b in letters {
                for c in letters {
                    for d in letters {
                        let w: String = [a, b, c, d].iter().collect();
                        let mut md = vec![0usize; 3];
                        for ch in w.chars() {
                            md[(ch as u8 - b'x') as usize] += 1;
                        }
                        let v = self.word(&w).expect("known generators");
                        checked += 1;
                        if !v.is_integral() {
                            failures.push(format!("{w}: non-integer coefficients"));
                            continue;
                        }
                        for (k, _) in v.iter() {
                            if self.multidegrees[k] != md {
                                failures.push(format!(
                                    "{w}: term {} has multidegree {:?}, expected {:?}",
                                    self.words[k], self.multidegrees[k], md
                                ));
                            }
                        }
                    }
                }
            }
        }
        SameWeightReport { checked, failures }
    }

    pub fn to_json(&self) -> LambdaJson {
        LambdaJson {
            rank: self.rank(),
            ideal_rank: self.ideal.rank(),
            basis: self
                .words
                .iter()
                .enumerate()
                .map(|(i, w)| BasisEntryJson {
                    ordinal: i,
                    name: w.clone(),
                    weight: self.weights[i],
                    multidegree: self.multidegrees[i].clone(),
                })
                .collect(),
            projection: (0..self.ambient.dim())
                .map(|i| {
                    (0..self.rank())
                        .map(|j| self.projection[(i, j)].numer().to_string())
                        .collect()
                })
                .collect(),
            tensor: (0..self.rank())
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

fn project_vec(projection: &QMatrix, v: &SparseVec, dim: usize) -> SparseVec {
    SparseVec::from_dense(&projection.apply_row(&v.to_dense(dim)))
}

pub use crate::free_lie::{BasisEntryJson, TensorEntryJson};

#[derive(Debug, Serialize)]
pub struct SameWeightReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SameWeightReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Serialize)]
pub struct LambdaJson {
    pub rank: usize,
    pub ideal_rank: usize,
    pub basis: Vec<BasisEntryJson>,
    pub projection: Vec<Vec<String>>,
    pub tensor: Vec<TensorEntryJson>,
}
