//! Dense linear algebra over a [`GaloisField`].
//!
//! Elimination always pivots on the first nonzero entry scanning rows top-down,
//! so the pivot sequence is a pure function of the input.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, GaloisField};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Index<(usize, usize)> for Matrix {
    type Output = FieldElement;

    fn index(&self, (r, c): (usize, usize)) -> &FieldElement {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut FieldElement {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = FieldElement::ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_columns(cols: &[Vec<FieldElement>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                m[(r, j)] = self[(r, c)];
            }
        }
        m
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            m.data[r * m.cols..r * m.cols + self.cols].copy_from_slice(self.row(r));
            m.data[r * m.cols + self.cols..(r + 1) * m.cols].copy_from_slice(other.row(r));
        }
        Ok(m)
    }

    pub fn mul_vec(&self, f: &GaloisField, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|r| f.dot(self.row(r), v)).collect())
    }

    pub fn mul(&self, f: &GaloisField, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("matrix product".into()));
        }
        let mut m = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    m[(r, c)] = f.add(m[(r, c)], f.mul(a, other[(k, c)]));
                }
            }
        }
        Ok(m)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    /// Reduced row echelon form together with the pivot column of each nonzero row.
    pub fn rref(&self, f: &GaloisField) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m[(r, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, lead);
            let inv = f.mul_inv(m[(lead, c)]).expect("pivot is nonzero");
            m.scale_row(f, lead, inv);
            for r in 0..m.rows {
                if r != lead {
                    let factor = m[(r, c)];
                    if !factor.is_zero() {
                        m.axpy_row(f, r, lead, f.neg(factor), c);
                    }
                }
            }
            pivots.push(c);
            lead += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, f: &GaloisField) -> usize {
        // forward elimination only
        let mut m = self.clone();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m[(r, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, lead);
            let inv = f.mul_inv(m[(lead, c)]).expect("pivot is nonzero");
            m.scale_row(f, lead, inv);
            for r in lead + 1..m.rows {
                let factor = m[(r, c)];
                if !factor.is_zero() {
                    m.axpy_row(f, r, lead, f.neg(factor), c);
                }
            }
            lead += 1;
        }
        lead
    }

    /// Basis of the right null space, one vector per row of the result.
    pub fn kernel(&self, f: &GaloisField) -> Matrix {
        let (r, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(free.len(), self.cols);
        for (i, &fc) in free.iter().enumerate() {
            k[(i, fc)] = FieldElement::ONE;
            for (row, &pc) in pivots.iter().enumerate() {
                k[(i, pc)] = f.neg(r[(row, fc)]);
            }
        }
        k
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, f: &GaloisField, r: usize, s: FieldElement) {
        for c in 0..self.cols {
            let i = r * self.cols + c;
            self.data[i] = f.mul(self.data[i], s);
        }
    }

    /// `row[dst] += s * row[src]`, starting at column `from`.
    fn axpy_row(&mut self, f: &GaloisField, dst: usize, src: usize, s: FieldElement, from: usize) {
        for c in from..self.cols {
            let v = self.data[src * self.cols + c];
            if !v.is_zero() {
                let i = dst * self.cols + c;
                self.data[i] = f.add(self.data[i], f.mul(s, v));
            }
        }
    }
}

/// Recovers the first `prefix_len` coordinates of any solution of `m · [s; w] = rhs`.
///
/// The trailing block may be rank-deficient (redundant spanning columns); only the
/// prefix has to be pinned down by the system.
pub fn solve_prefix(
    f: &GaloisField,
    m: &Matrix,
    rhs: &[FieldElement],
    prefix_len: usize,
) -> Result<Vec<FieldElement>> {
    if rhs.len() != m.rows() || prefix_len > m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "system {}x{} with rhs {} and prefix {}",
            m.rows(),
            m.cols(),
            rhs.len(),
            prefix_len
        )));
    }
    let aug = m.hstack(&Matrix::from_columns(&[rhs.to_vec()])?)?;
    let (r, pivots) = aug.rref(f);
    let n = m.cols();
    if pivots.last() == Some(&n) {
        return Err(Error::InconsistentSystem);
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::with_capacity(prefix_len);
    for k in 0..prefix_len {
        let row = pivots
            .iter()
            .position(|&p| p == k)
            .ok_or(Error::PrefixNotUnique)?;
        if free.iter().any(|&fc| !r[(row, fc)].is_zero()) {
            return Err(Error::PrefixNotUnique);
        }
        out.push(r[(row, n)]);
    }
    Ok(out)
}

/// Greedy information-set selection: scan rows in order, keep a row whenever it
/// raises the rank, stop at `target_rank`, then pad with the lowest unused indices.
/// The returned indices are sorted.
pub fn select_full_rank_rows(
    f: &GaloisField,
    m: &Matrix,
    target_rank: usize,
    pad_to: usize,
) -> Result<Vec<usize>> {
    if pad_to > m.rows() || target_rank > pad_to {
        return Err(Error::InsufficientRank {
            needed: pad_to.max(target_rank),
            available: m.rows(),
        });
    }
    // echelon basis of accepted rows, each normalized at its pivot
    let mut basis: Vec<(usize, Vec<FieldElement>)> = Vec::new();
    let mut chosen = Vec::new();
    for r in 0..m.rows() {
        if chosen.len() == target_rank {
            break;
        }
        let mut v = m.row(r).to_vec();
        for (pc, b) in &basis {
            let factor = v[*pc];
            if !factor.is_zero() {
                let s = f.neg(factor);
                for (x, &y) in v.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x = f.add(*x, f.mul(s, y));
                    }
                }
            }
        }
        if let Some(pc) = v.iter().position(|e| !e.is_zero()) {
            let inv = f.mul_inv(v[pc])?;
            for x in v.iter_mut() {
                *x = f.mul(*x, inv);
            }
            basis.push((pc, v));
            chosen.push(r);
        }
    }
    if chosen.len() < target_rank {
        return Err(Error::InsufficientRank {
            needed: target_rank,
            available: chosen.len(),
        });
    }
    let mut used = vec![false; m.rows()];
    for &r in &chosen {
        used[r] = true;
    }
    let spare: Vec<usize> = (0..m.rows()).filter(|&r| !used[r]).take(pad_to - chosen.len()).collect();
    chosen.extend(spare);
    chosen.sort_unstable();
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldTower;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f25() -> FieldTower {
        FieldTower::new(5, 1).unwrap()
    }

    fn random_matrix(f: &GaloisField, rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f.sample_uniform(&mut rng);
            }
        }
        m
    }

    #[test]
    fn trivial_ranks() {
        let f = f25();
        assert_eq!(Matrix::identity(5).rank(&f), 5);
        assert_eq!(Matrix::zeros(4, 6).rank(&f), 0);
    }

    #[test]
    fn vandermonde_on_distinct_nodes_is_invertible() {
        let f = f25();
        let nodes: Vec<_> = f.elements().take(5).collect();
        let rows = nodes
            .iter()
            .map(|&b| (0..5).map(|k| f.pow(b, k)).collect())
            .collect();
        assert_eq!(Matrix::from_rows(rows).unwrap().rank(&f), 5);
        // repeated node drops the rank
        let rows = [nodes[0], nodes[0], nodes[1]]
            .iter()
            .map(|&b| (0..3).map(|k| f.pow(b, k)).collect())
            .collect();
        assert_eq!(Matrix::from_rows(rows).unwrap().rank(&f), 2);
    }

    #[test]
    fn solve_prefix_identity() {
        let f = f25();
        let rhs: Vec<_> = f.elements().skip(3).take(6).collect();
        let s = solve_prefix(&f, &Matrix::identity(6), &rhs, 4).unwrap();
        assert_eq!(s, rhs[..4].to_vec());
    }

    #[test]
    fn solve_prefix_with_duplicated_trailing_columns() {
        let f = f25();
        let base = random_matrix(&f, 12, 7, 5);
        assert_eq!(base.rank(&f), 7);
        // duplicate the last three columns: the w-part becomes non-unique
        let dup = base.select_columns(&[0, 1, 2, 3, 4, 5, 6, 4, 5, 6]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<_> = (0..7).map(|_| f.sample_uniform(&mut rng)).collect();
        let rhs = base.mul_vec(&f, &x).unwrap();
        let s_dup = solve_prefix(&f, &dup, &rhs, 4).unwrap();
        let s_base = solve_prefix(&f, &base, &rhs, 4).unwrap();
        assert_eq!(s_dup, s_base);
        assert_eq!(s_dup, x[..4].to_vec());
        // asking for a prefix that reaches into the duplicated block fails
        assert!(matches!(
            solve_prefix(&f, &dup, &rhs, 5),
            Err(Error::PrefixNotUnique)
        ));
    }

    #[test]
    fn solve_prefix_detects_inconsistency() {
        let f = f25();
        let m = random_matrix(&f, 10, 4, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<_> = (0..4).map(|_| f.sample_uniform(&mut rng)).collect();
        let mut rhs = m.mul_vec(&f, &x).unwrap();
        rhs[3] = f.add(rhs[3], FieldElement::ONE);
        assert!(matches!(
            solve_prefix(&f, &m, &rhs, 2),
            Err(Error::InconsistentSystem)
        ));
    }

    #[test]
    fn select_rows_identity_and_padding() {
        let f = f25();
        assert_eq!(
            select_full_rank_rows(&f, &Matrix::identity(5), 3, 3).unwrap(),
            vec![0, 1, 2]
        );
        // rank-2 matrix, pad to 4 rows
        let rows = vec![
            vec![FieldElement::ONE, FieldElement::ZERO],
            vec![FieldElement::ONE, FieldElement::ZERO],
            vec![FieldElement::ZERO, FieldElement::ONE],
            vec![FieldElement::ONE, FieldElement::ONE],
            vec![FieldElement::ZERO, FieldElement::ZERO],
        ];
        let m = Matrix::from_rows(rows).unwrap();
        let sel = select_full_rank_rows(&f, &m, 2, 4).unwrap();
        assert_eq!(sel, vec![0, 1, 2, 3]);
        assert_eq!(m.select_rows(&sel).rank(&f), 2);
        assert!(select_full_rank_rows(&f, &m, 3, 4).is_err());
        assert!(select_full_rank_rows(&f, &m, 2, 6).is_err());
    }

    #[test]
    fn kernel_is_annihilated() {
        let f = f25();
        let m = random_matrix(&f, 4, 9, 17);
        let k = m.kernel(&f);
        assert_eq!(k.rows(), 9 - m.rank(&f));
        assert!(m.mul(&f, &k.transpose()).unwrap().is_zero());
    }

    #[test]
    fn elimination_is_deterministic() {
        let f = f25();
        let m = random_matrix(&f, 8, 8, 99);
        assert_eq!(m.rref(&f), m.rref(&f));
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(seed in any::<u64>(), zero_rows in 0usize..10) {
            let f = f25();
            let mut m = random_matrix(&f, 20, 30, seed);
            for r in 0..zero_rows {
                // make some rows linear combinations of others
                for c in 0..30 {
                    let v = f.add(m[(r + 10, c)], m[((r + 1) % 10, c)]);
                    m[(r, c)] = v;
                }
            }
            prop_assert_eq!(m.rank(&f), m.transpose().rank(&f));
        }

        #[test]
        fn solve_prefix_left_inverts(seed in any::<u64>()) {
            let f = f25();
            let m = random_matrix(&f, 14, 9, seed);
            prop_assume!(m.rank(&f) == 9);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
            let x: Vec<_> = (0..9).map(|_| f.sample_uniform(&mut rng)).collect();
            let rhs = m.mul_vec(&f, &x).unwrap();
            prop_assert_eq!(solve_prefix(&f, &m, &rhs, 6).unwrap(), x[..6].to_vec());
        }
    }
}
