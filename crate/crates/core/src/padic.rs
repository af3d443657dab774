//! Local measures of the unipotent parameter space under a torus twist.
//!
//! A torus element acts on each basis column by its eigenvalue monomial in
//! (a, b, c).  A free parameter sitting in some column is integral after
//! twisting iff its valuation clears the column's eigenvalue valuation; the
//! shared parameter upsilon answers to two columns at once, which is where
//! the min terms come from.  The closed exponent formulas are implemented
//! directly, and an independent coset-counting oracle reproduces them.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::autgroup::{self, AutMatrix, TorusElement, UnipotentParams};
use crate::lattice::QuotientLattice;
use crate::ratio::rat;
use crate::{Error, Result};

/// Torus valuations (v_a, v_b, v_c) with 3 v_a = v_b + v_c.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValuationTriple {
    pub va: u32,
    pub vb: u32,
    pub vc: u32,
}

impl ValuationTriple {
    pub fn new(va: u32, vb: u32, vc: u32) -> Result<Self> {
        if 3 * va != vb + vc {
            return Err(Error::ValuationConstraint);
        }
        Ok(Self { va, vb, vc })
    }

    /// The triple determined by (v_b, v_c); requires 3 | v_b + v_c.
    pub fn from_bc(vb: u32, vc: u32) -> Result<Self> {
        if (vb + vc) % 3 != 0 {
            return Err(Error::ValuationConstraint);
        }
        Ok(Self { va: (vb + vc) / 3, vb, vc })
    }

    /// Valuation of the column eigenvalue with the given multidegree.
    pub fn column_valuation(&self, multidegree: &[usize]) -> i64 {
        multidegree[0] as i64 * self.va as i64
            + multidegree[1] as i64 * self.vb as i64
            + multidegree[2] as i64 * self.vc as i64
    }
}

/// An exact power of p, carried by its exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PExponent(pub i64);

impl PExponent {
    pub fn value(&self, p: u64) -> BigUint {
        assert!(self.0 >= 0);
        BigUint::from(p).pow(self.0 as u32)
    }
}

/// Closed exponent formulas for the three layer measures.
pub fn theta(i: u8, v: &ValuationTriple) -> Result<PExponent> {
    let (va, vb, vc) = (v.va as i64, v.vb as i64, v.vc as i64);
    let e = match i {
        1 => 3 * va + 4 * vb + 4 * vc + vb.min(vc),
        2 => 24 * va + 15 * (vb + vc),
        3 => 66 * va + 45 * (vb + vc),
        _ => return Err(Error::Input(format!("theta index {i} out of range 1..=3"))),
    };
    Ok(PExponent(e))
}

/// What the first-layer exponent would be if the shared parameter were
/// counted once per column instead of once with both constraints: the min
/// term degrades to v_b + v_c.  The discrepancy against theta_1 is exactly
/// max(v_b, v_c), nonzero whenever v_b != v_c.
pub fn theta1_without_min_sharing(v: &ValuationTriple) -> PExponent {
    let (va, vb, vc) = (v.va as i64, v.vb as i64, v.vc as i64);
    PExponent(3 * va + 4 * vb + 4 * vc + vb + vc)
}

/// Valuation of det(h) = a^33 b^23 c^23.
pub fn det_valuation(v: &ValuationTriple) -> i64 {
    33 * v.va as i64 + 23 * (v.vb as i64 + v.vc as i64)
}

/// Free parameters of the stage-i layer, each given as the list of column
/// ordinals it must clear.  Stage 1 holds the six weight-2 parameters with
/// upsilon constrained by both of its columns; stages 2 and 3 hold three
/// rows of single-column parameters over the weight-3 and weight-4 columns.
pub fn stage_parameters(lambda: &QuotientLattice, i: u8) -> Result<Vec<Vec<usize>>> {
    match i {
        1 => Ok(vec![
            vec![3],    // alpha_1 in column xy
            vec![4],    // alpha_2 in column xz
            vec![5],    // alpha_3 in column yz
            vec![3, 4], // upsilon in columns xy and xz
            vec![5],    // sigma in column yz
            vec![5],    // tau in column yz
        ]),
        2 => Ok(lambda
            .weight_range(3)
            .flat_map(|j| std::iter::repeat(vec![j]).take(3))
            .collect()),
        3 => Ok(lambda
            .weight_range(4)
            .flat_map(|j| std::iter::repeat(vec![j]).take(3))
            .collect()),
        _ => Err(Error::Input(format!("stage {i} out of range 1..=3"))),
    }
}

/// Number of cosets of the integers inside p^{-level} integers that satisfy
/// every constraint `v(xi) >= -e`, counted class by class over the exact
/// denominator exponent d.  The class at d = 0 is the single integral coset;
/// the class at d >= 1 has p^d - p^{d-1} cosets.
fn count_constrained_cosets(p: u64, level: i64, constraints: &[i64]) -> BigUint {
    let bound = constraints.iter().copied().min().unwrap_or(level);
    let mut total = BigUint::zero();
    let mut class_size = BigUint::one();
    for d in 0..=level {
        if d > 0 {
            let pd = BigUint::from(p).pow(d as u32);
            let pd1 = BigUint::from(p).pow(d as u32 - 1);
            class_size = pd - pd1;
        }
        if d <= bound {
            total += class_size.clone();
        }
    }
    total
}

/// Counting oracle for the layer measures: the fraction of parameter tuples
/// at finite level whose twisted images are integral, normalized so that
/// integral tuples have measure one.  `level` acts as a floor; each
/// parameter is counted at whatever level its own constraints require, so a
/// low requested level loses nothing.
pub fn theta_bruteforce(
    lambda: &QuotientLattice,
    i: u8,
    v: &ValuationTriple,
    p: u64,
    level: u32,
) -> Result<BigUint> {
    let params = stage_parameters(lambda, i)?;
    let mut total = BigUint::one();
    for cols in &params {
        let constraints: Vec<i64> = cols
            .iter()
            .map(|&j| v.column_valuation(lambda.multidegree(j)))
            .collect();
        let needed = constraints.iter().copied().max().unwrap_or(0);
        let effective = needed.max(level as i64);
        total *= count_constrained_cosets(p, effective, &constraints);
    }
    Ok(total)
}

/// Lifting report: an integral action on the quotient truncation extends to
/// a fully integral automorphism once the parameters feeding the deepest
/// layer are zeroed.
#[derive(Debug, Serialize)]
pub struct LiftingReport {
    pub stage: usize,
    pub p: u64,
    pub generator_rows_integral: bool,
    pub fully_integral: bool,
    pub same_action_on_truncation: bool,
}

impl LiftingReport {
    pub fn ok(&self) -> bool {
        self.generator_rows_integral && self.fully_integral && self.same_action_on_truncation
    }
}

/// Executes the lifting construction at one stage: given n h whose action
/// on the quotient by the weight >= `stage` layer is p-integral, zero the
/// parameters that feed that layer and check that the result is integral on
/// the generator rows, hence everywhere.
pub fn lifting_check(
    lambda: &QuotientLattice,
    v: &ValuationTriple,
    params: &UnipotentParams,
    p: u64,
    stage: usize,
) -> Result<LiftingReport> {
    if !(2..=5).contains(&stage) {
        return Err(Error::Input(format!("stage {stage} out of range 2..=5")));
    }
    let n = autgroup::unipotent_matrix(lambda, params)?;
    let h = torus_p_powers(lambda, v, p)?;
    let g0 = n.compose(&h);
    let cut = if stage == 5 { lambda.rank() } else { lambda.weight_range(stage - 1).end };
    if !block_p_integral(&g0, cut, p) {
        return Err(Error::Precondition(format!(
            "action of n*h on the weight<{stage} truncation is not p-integral"
        )));
    }

    let mut truncated = params.clone();
    if stage <= 2 {
        truncated = UnipotentParams::zero();
    }
    for j in 6..25 {
        if lambda.weight(j) >= stage {
            for row in truncated.delta.iter_mut() {
                row[j - 6] = BigRational::zero();
            }
        }
    }
    let n1 = autgroup::unipotent_matrix(lambda, &truncated)?;
    let g = n1.compose(&h);

    let generator_rows_integral = autgroup::is_integral_by_generators(&g, p);
    let fully_integral = g.is_p_integral(p);
    let same_action_on_truncation = (0..cut)
        .all(|i| (0..cut).all(|j| g.mat[(i, j)] == g0.mat[(i, j)]));
    Ok(LiftingReport {
        stage,
        p,
        generator_rows_integral,
        fully_integral,
        same_action_on_truncation,
    })
}

/// diag(p^va, p^vb, p^vc) acting on the lattice.
pub fn torus_p_powers(
    lambda: &QuotientLattice,
    v: &ValuationTriple,
    p: u64,
) -> Result<AutMatrix> {
    let pw = |e: u32| rat((p as i64).pow(e));
    let t = TorusElement::new(pw(v.va), pw(v.vb), pw(v.vc))?;
    autgroup::torus_automorphism(lambda, &t)
}

fn block_p_integral(m: &AutMatrix, cut: usize, p: u64) -> bool {
    (0..cut).all(|i| (0..cut).all(|j| crate::ratio::is_p_integral(&m.mat[(i, j)], p)))
}

/// Parameters whose twisted truncation is integral: below the stage cut the
/// valuation clears the column eigenvalue, above it anything goes.  Used by
/// the lifting suite.
pub fn random_liftable_params(
    lambda: &QuotientLattice,
    v: &ValuationTriple,
    p: u64,
    stage: usize,
    rng: &mut impl Rng,
) -> UnipotentParams {
    let pick_low = |rng: &mut dyn rand::RngCore, col: usize| -> BigRational {
        let e = v.column_valuation(lambda.multidegree(col));
        let d = rng.gen_range(0..=e.max(0)) as u32;
        BigRational::new(
            rng.gen_range(-9i64..=9).into(),
            num_bigint::BigInt::from(p).pow(d),
        )
    };
    let pick_high = |rng: &mut dyn rand::RngCore| -> BigRational {
        let d = rng.gen_range(0..=3u32);
        BigRational::new(
            rng.gen_range(-9i64..=9).into(),
            num_bigint::BigInt::from(p).pow(d),
        )
    };
    let mut out = UnipotentParams::zero();
    if stage > 2 {
        out.alpha = [pick_low(rng, 3), pick_low(rng, 4), pick_low(rng, 5)];
        // upsilon answers to both of its columns
        let e = v
            .column_valuation(lambda.multidegree(3))
            .min(v.column_valuation(lambda.multidegree(4)));
        let d = rng.gen_range(0..=e.max(0)) as u32;
        out.upsilon = BigRational::new(
            rng.gen_range(-9i64..=9).into(),
            num_bigint::BigInt::from(p).pow(d),
        );
        out.sigma = pick_low(rng, 5);
        out.tau = pick_low(rng, 5);
    } else {
        out.alpha = [pick_high(rng), pick_high(rng), pick_high(rng)];
        out.upsilon = pick_high(rng);
        out.sigma = pick_high(rng);
        out.tau = pick_high(rng);
    }
    for j in 6..25 {
        for i in 0..3 {
            out.delta[i][j - 6] = if lambda.weight(j) < stage {
                pick_low(rng, j)
            } else {
                pick_high(rng)
            };
        }
    }
    out
}

/// One row of the theta table reports.
#[derive(Debug, Serialize)]
pub struct ThetaTableRow {
    pub i: u8,
    pub va: u32,
    pub vb: u32,
    pub vc: u32,
    pub exponent: i64,
    pub oracle: String,
    pub matches: bool,
}

/// Formula-versus-oracle table over all triples with v_b, v_c <= bc_max.
pub fn theta_table(
    lambda: &QuotientLattice,
    p: u64,
    bc_max: u32,
    level: u32,
) -> Result<Vec<ThetaTableRow>> {
    let mut rows = Vec::new();
    for vb in 0..=bc_max {
        for vc in 0..=bc_max {
            let v = match ValuationTriple::from_bc(vb, vc) {
                Ok(v) => v,
                Err(_) => continue,
            };
            for i in 1..=3u8 {
                let e = theta(i, &v)?;
                let oracle = theta_bruteforce(lambda, i, &v, p, level)?;
                let matches = oracle == e.value(p);
                rows.push(ThetaTableRow {
                    i,
                    va: v.va,
                    vb,
                    vc,
                    exponent: e.0,
                    oracle: oracle.to_string(),
                    matches,
                });
            }
        }
    }
    Ok(rows)
}
