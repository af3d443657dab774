//! Exact linear algebra: Hermite normal form over Z, dense rational
//! matrices, and prime-field elimination for the brute-force enumerations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

// ---------------------------------------------------------------------------
// Integer matrices (rows of BigInt)

pub type IntRow = Vec<BigInt>;

/// Row-style Hermite normal form.
///
/// Returns the nonzero rows with strictly increasing pivot columns, positive
/// pivots, and entries above each pivot reduced into `[0, pivot)`.  The
/// result is the unique HNF basis of the integer row space of the input.
pub fn hermite_normal_form(rows: &[IntRow], cols: usize) -> Vec<IntRow> {
    let mut work: Vec<IntRow> = rows
        .iter()
        .filter(|r| r.iter().any(|c| !c.is_zero()))
        .cloned()
        .collect();
    for r in &work {
        assert_eq!(r.len(), cols, "row length mismatch");
    }
    let mut pivot_rows: Vec<IntRow> = Vec::new();
    let mut start = 0usize;
    for col in 0..cols {
        // Eliminate below `start` in this column via the extended Euclid
        // combination of row pairs.
        loop {
            let mut nonzero: Vec<usize> = (start..work.len())
                .filter(|&i| !work[i][col].is_zero())
                .collect();
            if nonzero.is_empty() {
                break;
            }
            if nonzero.len() == 1 {
                let i = nonzero[0];
                work.swap(start, i);
                break;
            }
            // Combine the two rows with smallest nonzero |entry|.
            nonzero.sort_by_key(|&i| work[i][col].abs());
            let (i, j) = (nonzero[0], nonzero[1]);
            let (a, b) = (work[i][col].clone(), work[j][col].clone());
            let e = a.extended_gcd(&b);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (u, v) = (&b / &g, &a / &g);
            let row_i = work[i].clone();
            let row_j = work[j].clone();
            for k in 0..cols {
                // new_i carries the gcd, new_j gets zero in `col`
                work[i][k] = &s * &row_i[k] + &t * &row_j[k];
                work[j][k] = &u * &row_i[k] - &v * &row_j[k];
            }
        }
        if start < work.len() && !work[start][col].is_zero() {
            if work[start][col].is_negative() {
                for k in 0..cols {
                    work[start][k] = -work[start][k].clone();
                }
            }
            let pivot_row = work[start].clone();
            let pivot = pivot_row[col].clone();
            // Reduce earlier pivot rows above this pivot.
            for r in pivot_rows.iter_mut() {
                let q = r[col].div_floor(&pivot);
                if !q.is_zero() {
                    for k in 0..cols {
                        r[k] = &r[k] - &q * &pivot_row[k];
                    }
                }
            }
            pivot_rows.push(pivot_row);
            start += 1;
        }
    }
    pivot_rows
}

/// Pivot columns of an HNF basis.
pub fn hnf_pivots(hnf: &[IntRow]) -> Vec<usize> {
    hnf.iter()
        .map(|r| r.iter().position(|c| !c.is_zero()).expect("zero row in HNF"))
        .collect()
}

/// Does `v` lie in the integer row space spanned by the HNF basis?
pub fn hnf_contains(hnf: &[IntRow], v: &[BigInt]) -> bool {
    hnf_solve(hnf, v).is_some()
}

/// Integer coordinates of `v` against the HNF basis rows, if they exist.
pub fn hnf_solve(hnf: &[IntRow], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut v = v.to_vec();
    let pivots = hnf_pivots(hnf);
    let mut coords = vec![BigInt::zero(); hnf.len()];
    for (row, &p) in hnf.iter().zip(&pivots) {
        if v[p].is_zero() {
            continue;
        }
        let (q, r) = v[p].div_rem(&row[p]);
        if !r.is_zero() {
            return None;
        }
        for k in 0..v.len() {
            v[k] = &v[k] - &q * &row[k];
        }
        coords[pivots.iter().position(|&x| x == p).unwrap()] = q;
    }
    if v.iter().all(|c| c.is_zero()) {
        Some(coords)
    } else {
        None
    }
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn bareiss_det(mat: &[IntRow]) -> BigInt {
    let n = mat.len();
    let mut a: Vec<IntRow> = mat.to_vec();
    for r in &a {
        assert_eq!(r.len(), n);
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero());
                a[i][j] = q;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

// ---------------------------------------------------------------------------
// Dense rational matrices

/// Dense row-major rational matrix.  Rows act on the right of row vectors,
/// so row `i` is the image of the i-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [BigRational] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let t = a * b;
                        out[(i, j)] += t;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigRational::zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let b = &self[(i, j)];
                if !b.is_zero() {
                    out[j] += c * b;
                }
            }
        }
        out
    }

    pub fn scale_col(&mut self, j: usize, c: &BigRational) {
        for i in 0..self.rows {
            let v = &self[(i, j)] * c;
            self[(i, j)] = v;
        }
    }

    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        let mut a = self.clone();
        let n = a.rows;
        let mut det = BigRational::one();
        for k in 0..n {
            let pivot = match (k..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => i,
                None => return BigRational::zero(),
            };
            if pivot != k {
                for j in 0..n {
                    let tmp = a[(pivot, j)].clone();
                    a[(pivot, j)] = a[(k, j)].clone();
                    a[(k, j)] = tmp;
                }
                det = -det;
            }
            let d = a[(k, k)].clone();
            det *= d.clone();
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let f = &a[(i, k)] / &d;
                for j in k..n {
                    let t = &a[(k, j)] * &f;
                    a[(i, j)] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let pivot = (k..n).find(|&i| !a[(i, k)].is_zero())?;
            if pivot != k {
                for j in 0..n {
                    let t = a[(pivot, j)].clone();
                    a[(pivot, j)] = a[(k, j)].clone();
                    a[(k, j)] = t;
                    let t = inv[(pivot, j)].clone();
                    inv[(pivot, j)] = inv[(k, j)].clone();
                    inv[(k, j)] = t;
                }
            }
            let d = a[(k, k)].clone();
            for j in 0..n {
                a[(k, j)] /= d.clone();
                inv[(k, j)] /= d.clone();
            }
            for i in 0..n {
                if i == k || a[(i, k)].is_zero() {
                    continue;
                }
                let f = a[(i, k)].clone();
                for j in 0..n {
                    let t = &a[(k, j)] * &f;
                    a[(i, j)] -= t;
                    let t = &inv[(k, j)] * &f;
                    inv[(i, j)] -= t;
                }
            }
        }
        Some(inv)
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        self.data.iter().all(|c| crate::ratio::is_p_integral(c, p))
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(crate::ratio::is_integer)
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

/// Solve sum_i x_i * rows[i] = target over Q.  Returns any solution, with
/// free coordinates set to zero; `None` if the system is inconsistent.
pub fn solve_rational(
    rows: &[Vec<BigRational>],
    target: &[BigRational],
) -> Option<Vec<BigRational>> {
    let n = rows.len();
    let m = target.len();
    // Augmented system over the unknowns: one equation per coordinate.
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|j| {
            let mut eq: Vec<BigRational> = rows.iter().map(|r| r[j].clone()).collect();
            eq.push(target[j].clone());
            eq
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut rank = 0usize;
    for col in 0..n {
        let pivot = match (rank..m).find(|&i| !a[i][col].is_zero()) {
            Some(i) => i,
            None => continue,
        };
        a.swap(rank, pivot);
        let d = a[rank][col].clone();
        for k in col..=n {
            a[rank][k] /= d.clone();
        }
        for i in 0..m {
            if i != rank && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for k in col..=n {
                    let t = &a[rank][k] * &f;
                    a[i][k] -= t;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    if a[rank..].iter().any(|eq| !eq[n].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (col, p) in pivot_of_col.iter().enumerate() {
        if let Some(r) = p {
            x[col] = a[*r][n].clone();
        }
    }
    Some(x)
}

/// Rank of a rational matrix (destructive Gauss on a copy).
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let pivot = match (rank..a.len()).find(|&i| !a[i][col].is_zero()) {
            Some(i) => i,
            None => continue,
        };
        a.swap(rank, pivot);
        let d = a[rank][col].clone();
        for i in rank + 1..a.len() {
            if a[i][col].is_zero() {
                continue;
            }
            let f = &a[i][col] / &d;
            for j in col..cols {
                let t = &a[rank][j] * &f;
                a[i][j] -= t;
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

// ---------------------------------------------------------------------------
// Prime fields

/// Arithmetic in F_p for a prime p < 2^31 (products fit in u64).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        assert!(p >= 2 && p < (1 << 31));
        Self { p }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "division by zero in F_p");
        self.pow(a, self.p - 2)
    }

    pub fn from_int(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let r = n.mod_floor(&p);
        r.to_string().parse::<u64>().unwrap()
    }

    pub fn from_i64(&self, n: i64) -> u64 {
        let r = n.rem_euclid(self.p as i64);
        r as u64
    }

    /// 3x3 determinant.
    pub fn det3(&self, m: &[u64; 9]) -> u64 {
        let f = self;
        let pos = f.add(
            f.add(
                f.mul(m[0], f.mul(m[4], m[8])),
                f.mul(m[1], f.mul(m[5], m[6])),
            ),
            f.mul(m[2], f.mul(m[3], m[7])),
        );
        let neg = f.add(
            f.add(
                f.mul(m[2], f.mul(m[4], m[6])),
                f.mul(m[0], f.mul(m[5], m[7])),
            ),
            f.mul(m[1], f.mul(m[3], m[8])),
        );
        f.sub(pos, neg)
    }
}

/// Reduced row echelon basis over F_p with recorded pivot columns.
pub struct FpEchelon {
    pub field: PrimeField,
    pub rows: Vec<Vec<u64>>,
    pub pivots: Vec<usize>,
}

impl FpEchelon {
    pub fn new(field: PrimeField, rows: Vec<Vec<u64>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut work = rows;
        let mut out: Vec<Vec<u64>> = Vec::new();
        let mut pivots = Vec::new();
        for col in 0..cols {
            let pos = work.iter().position(|r| r[col] != 0);
            let row = match pos {
                Some(i) => work.swap_remove(i),
                None => continue,
            };
            let inv = field.inv(row[col]);
            let row: Vec<u64> = row.iter().map(|&x| field.mul(x, inv)).collect();
            for r in work.iter_mut().chain(out.iter_mut()) {
                let f = r[col];
                if f != 0 {
                    for k in col..cols {
                        r[k] = field.sub(r[k], field.mul(f, row[k]));
                    }
                }
            }
            out.push(row);
            pivots.push(col);
        }
        Self { field, rows: out, pivots }
    }

    /// Reduce `v` modulo the row space in place.
    pub fn reduce(&self, v: &mut [u64]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = v[p];
            if f != 0 {
                for k in p..v.len() {
                    v[k] = self.field.sub(v[k], self.field.mul(f, row[k]));
                }
            }
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut v = v.to_vec();
        self.reduce(&mut v);
        v.iter().all(|&x| x == 0)
    }
}

/// Is the affine system  sum_k x_k * cols[k] = target  solvable over F_p?
pub fn fp_affine_solvable(field: PrimeField, cols: &[Vec<u64>], target: &[u64]) -> bool {
    let m = target.len();
    let n = cols.len();
    // Augmented matrix, one row per equation.
    let mut a: Vec<Vec<u64>> = (0..m)
        .map(|i| {
            let mut row: Vec<u64> = cols.iter().map(|c| c[i]).collect();
            row.push(target[i]);
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let pivot = match (rank..m).find(|&i| a[i][col] != 0) {
            Some(i) => i,
            None => continue,
        };
        a.swap(rank, pivot);
        let inv = field.inv(a[rank][col]);
        for k in col..=n {
            a[rank][k] = field.mul(a[rank][k], inv);
        }
        for i in 0..m {
            if i != rank && a[i][col] != 0 {
                let f = a[i][col];
                for k in col..=n {
                    a[i][k] = field.sub(a[i][k], field.mul(f, a[rank][k]));
                }
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }
    // Inconsistent iff some row is (0 ... 0 | nonzero).
    !a.iter().any(|r| r[..n].iter().all(|&x| x == 0) && r[n] != 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    fn int_rows(rows: &[&[i64]]) -> Vec<IntRow> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn hnf_unique_and_contains() {
        let rows = int_rows(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let h = hermite_normal_form(&rows, 3);
        // Same row space given in a different order and with combinations.
        let rows2 = int_rows(&[&[10, 4, 16], &[-4, 10, 16], &[2, 4, 4]]);
        let h2 = hermite_normal_form(&rows2, 3);
        assert_eq!(h, h2);
        for r in &rows {
            assert!(hnf_contains(&h, r));
        }
        assert!(!hnf_contains(&h, &int_rows(&[&[1, 0, 0]])[0]));
    }

    #[test]
    fn hnf_solve_coords() {
        let rows = int_rows(&[&[1, 2, 0], &[0, 3, 1]]);
        let h = hermite_normal_form(&rows, 3);
        let v = int_rows(&[&[2, 10, 2]])[0].clone();
        let coords = hnf_solve(&h, &v).unwrap();
        let mut acc = vec![BigInt::zero(); 3];
        for (c, row) in coords.iter().zip(&h) {
            for k in 0..3 {
                acc[k] = &acc[k] + c * &row[k];
            }
        }
        assert_eq!(acc, v);
    }

    #[test]
    fn bareiss_small() {
        let m = int_rows(&[&[2, 0, 1], &[1, 1, 0], &[0, 3, 1]]);
        assert_eq!(bareiss_det(&m), BigInt::from(5));
        let singular = int_rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(bareiss_det(&singular), BigInt::zero());
    }

    #[test]
    fn qmatrix_inverse() {
        let m = QMatrix::from_rows(vec![
            vec![rat(2), rat(1)],
            vec![rat(1), rat(1)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(2));
        assert_eq!(m.det(), rat(1));
    }

    #[test]
    fn fp_solver() {
        let f = PrimeField::new(5);
        assert_eq!(f.inv(2), 3);
        // x*(1,0) + y*(1,1) = (3,2) has solution (1,2) mod 5.
        let cols = vec![vec![1, 0], vec![1, 1]];
        assert!(fp_affine_solvable(f, &cols, &[3, 2]));
        // no solution: columns both zero in the second coordinate
        let cols = vec![vec![1, 0], vec![2, 0]];
        assert!(!fp_affine_solvable(f, &cols, &[3, 2]));
    }

    #[test]
    fn fp_echelon_membership() {
        let f = PrimeField::new(7);
        let ech = FpEchelon::new(f, vec![vec![1, 2, 3], vec![0, 1, 5]]);
        // (1,2,3) - 2*(0,1,5) = (1,0,0) mod 7
        assert!(ech.contains(&[1, 0, 0]));
        assert!(!ech.contains(&[0, 0, 1]));
    }
}
