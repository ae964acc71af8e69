//! Evaluation codes on point sets.

use std::io::Write;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, GaloisField};
use crate::hermitian::{csv_err, CurveFunction, CurvePoint, FactoredFunction, HermitianCurve};
use crate::linalg::Matrix;

/// Subsets checked by the exhaustive independence mode before bailing out.
pub const EXHAUSTIVE_SUBSET_LIMIT: u64 = 1_000_000;
/// Codewords enumerated by the brute-force distance routine before bailing out.
pub const CODEWORD_LIMIT: u64 = 10_000_000;

pub trait Evaluable {
    fn eval(&self, curve: &HermitianCurve, p: &CurvePoint) -> Result<FieldElement>;
}

impl Evaluable for CurveFunction {
    fn eval(&self, curve: &HermitianCurve, p: &CurvePoint) -> Result<FieldElement> {
        self.evaluate(curve, p)
    }
}

impl Evaluable for FactoredFunction {
    fn eval(&self, curve: &HermitianCurve, p: &CurvePoint) -> Result<FieldElement> {
        self.evaluate(curve, p)
    }
}

#[derive(Clone, Debug)]
pub struct EvalCode {
    pub points: Vec<CurvePoint>,
    /// k x N
    pub gen: Matrix,
    pub genus: u32,
    pub deg_g: i64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndependenceMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub w: usize,
    pub holds: bool,
    pub subsets_tested: u64,
    pub counterexample: Option<Vec<usize>>,
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Next k-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl EvalCode {
    pub fn generator_matrix<E: Evaluable>(
        curve: &HermitianCurve,
        functions: &[E],
        points: &[CurvePoint],
        deg_g: i64,
    ) -> Result<EvalCode> {
        let mut gen = Matrix::zeros(functions.len(), points.len());
        for (r, func) in functions.iter().enumerate() {
            for (c, p) in points.iter().enumerate() {
                gen[(r, c)] = func.eval(curve, p)?;
            }
        }
        Ok(EvalCode {
            points: points.to_vec(),
            gen,
            genus: curve.genus(),
            deg_g,
        })
    }

    pub fn len(&self) -> usize {
        self.gen.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.gen.cols() == 0
    }

    pub fn dimension(&self, f: &GaloisField) -> usize {
        self.gen.rank(f)
    }

    /// `N - deg G`.
    pub fn goppa_designed_distance(&self) -> Result<i64> {
        let n = self.len() as i64;
        if self.deg_g >= n {
            return Err(Error::InvalidParameter(format!(
                "deg G = {} is not below N = {n}",
                self.deg_g
            )));
        }
        Ok(n - self.deg_g)
    }

    /// `deg G - 2g + 2`; vacuous when not positive.
    pub fn dual_distance_bound(&self) -> i64 {
        self.deg_g - 2 * self.genus as i64 + 2
    }

    /// Every `w` columns of the generator matrix are linearly independent,
    /// i.e. the dual distance is at least `w + 1`.
    pub fn check_w_wise_independence(
        &self,
        f: &GaloisField,
        w: usize,
        mode: IndependenceMode,
    ) -> Result<IndependenceReport> {
        let n = self.len();
        if w > n {
            return Err(Error::InvalidParameter(format!("w = {w} exceeds N = {n}")));
        }
        let independent = |cols: &[usize]| self.gen.select_columns(cols).rank(f) == cols.len();
        if w == 0 {
            return Ok(IndependenceReport {
                w,
                holds: true,
                subsets_tested: 1,
                counterexample: None,
            });
        }
        match mode {
            IndependenceMode::Exhaustive => {
                let total = binomial(n as u64, w as u64);
                if total > EXHAUSTIVE_SUBSET_LIMIT {
                    return Err(Error::BudgetExceeded(format!(
                        "C({n},{w}) = {total} subsets exceeds {EXHAUSTIVE_SUBSET_LIMIT}"
                    )));
                }
                // split by leading index; the earliest failing block carries the
                // lexicographically first counterexample
                let per_first: Vec<Option<Vec<usize>>> = (0..=n - w)
                    .into_par_iter()
                    .map(|first| {
                        let mut rest: Vec<usize> = (first + 1..first + w).collect();
                        loop {
                            let mut cols = vec![first];
                            cols.extend_from_slice(&rest);
                            if !independent(&cols) {
                                return Some(cols);
                            }
                            if rest.is_empty() || !next_combination(&mut rest, n) {
                                return None;
                            }
                        }
                    })
                    .collect();
                let counterexample = per_first.into_iter().flatten().next();
                Ok(IndependenceReport {
                    w,
                    holds: counterexample.is_none(),
                    subsets_tested: total,
                    counterexample,
                })
            }
            IndependenceMode::Sampled { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for t in 0..count {
                    let mut cols = sample(&mut rng, n, w).into_vec();
                    cols.sort_unstable();
                    if !independent(&cols) {
                        return Ok(IndependenceReport {
                            w,
                            holds: false,
                            subsets_tested: t as u64 + 1,
                            counterexample: Some(cols),
                        });
                    }
                }
                Ok(IndependenceReport {
                    w,
                    holds: true,
                    subsets_tested: count as u64,
                    counterexample: None,
                })
            }
        }
    }

    /// Exact minimum weight by enumerating every message.
    pub fn min_distance_bruteforce(&self, f: &GaloisField) -> Result<usize> {
        min_weight(f, &self.gen)
    }

    /// Generator matrix of the dual code.
    pub fn dual_generator(&self, f: &GaloisField) -> Matrix {
        self.gen.kernel(f)
    }

    pub fn dual_distance_bruteforce(&self, f: &GaloisField) -> Result<usize> {
        min_weight(f, &self.dual_generator(f))
    }

    /// Generator matrix as CSV, one cell per entry in coefficient-tuple form.
    pub fn write_csv<W: Write>(&self, f: &GaloisField, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in 0..self.gen.rows() {
            w.write_record(self.gen.row(r).iter().map(|&e| f.format(e)))
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Minimum nonzero weight of the row space of `gen`; the rows are reduced to a
/// basis first so duplicate generators do not inflate the enumeration.
fn min_weight(f: &GaloisField, gen: &Matrix) -> Result<usize> {
    let (r, pivots) = gen.rref(f);
    let k = pivots.len();
    let n = gen.cols();
    if k == 0 {
        return Err(Error::InvalidParameter("zero code has no minimum distance".into()));
    }
    let order = f.order() as u64;
    let total = (order as f64).powi(k as i32);
    if total > CODEWORD_LIMIT as f64 {
        return Err(Error::BudgetExceeded(format!(
            "{order}^{k} codewords exceeds {CODEWORD_LIMIT}"
        )));
    }
    let basis: Vec<&[FieldElement]> = (0..k).map(|i| r.row(i)).collect();
    let total = order.pow(k as u32);
    // weights are invariant under scaling, so only messages whose lowest
    // nonzero digit is 1 are enumerated
    let best = (1..total)
        .into_par_iter()
        .filter(|&idx| {
            let mut v = idx;
            while v % order == 0 {
                v /= order;
            }
            v % order == 1
        })
        .map(|idx| {
            let mut word = vec![FieldElement::ZERO; n];
            let mut v = idx;
            for row in &basis {
                let c = f.element((v % order) as u32).expect("digit in range");
                v /= order;
                if !c.is_zero() {
                    for (w, &e) in word.iter_mut().zip(row.iter()) {
                        *w = f.add(*w, f.mul(c, e));
                    }
                }
            }
            word.iter().filter(|e| !e.is_zero()).count()
        })
        .min()
        .unwrap_or(n);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::one_point_basis;

    fn h2_code(deg: i64) -> (HermitianCurve, EvalCode) {
        let c = HermitianCurve::new(2).unwrap();
        let funcs: Vec<_> = one_point_basis(deg, 2).iter().map(|m| m.to_function()).collect();
        let pts = c.affine_points();
        let code = EvalCode::generator_matrix(&c, &funcs, &pts, deg).unwrap();
        (c, code)
    }

    #[test]
    fn constants_give_all_ones() {
        let c = HermitianCurve::new(2).unwrap();
        let pts: Vec<_> = c.affine_points().into_iter().take(4).collect();
        let code =
            EvalCode::generator_matrix(&c, &[FactoredFunction::monomial(0, 0)], &pts, 0).unwrap();
        assert_eq!(code.gen.shape(), (1, 4));
        assert!(code.gen.row(0).iter().all(|&e| e == FieldElement::ONE));
        assert_eq!(code.min_distance_bruteforce(c.tower().field()).unwrap(), 4);
    }

    #[test]
    fn small_hermitian_code() {
        let c = HermitianCurve::new(2).unwrap();
        let funcs: Vec<_> = one_point_basis(3, 2).iter().map(|m| m.to_function()).collect();
        let pts: Vec<_> = c.affine_points().into_iter().take(6).collect();
        let code = EvalCode::generator_matrix(&c, &funcs, &pts, 3).unwrap();
        let f = c.tower().field();
        assert_eq!(code.gen.shape(), (3, 6));
        assert_eq!(code.dimension(f), 3);
        assert_eq!(code.goppa_designed_distance().unwrap(), 3);
        assert!(code.min_distance_bruteforce(f).unwrap() >= 3);
    }

    #[test]
    fn bounds_hold_on_h2() {
        for deg in 3..=6 {
            let (c, code) = h2_code(deg);
            let f = c.tower().field();
            let d = code.min_distance_bruteforce(f).unwrap() as i64;
            assert!(d >= code.goppa_designed_distance().unwrap());
            let dd = code.dual_distance_bruteforce(f).unwrap() as i64;
            assert!(dd >= code.dual_distance_bound());
        }
    }

    #[test]
    fn designed_distance_requires_short_divisor() {
        let (_, code) = h2_code(3);
        let mut big = code.clone();
        big.deg_g = 8;
        assert!(big.goppa_designed_distance().is_err());
        assert_eq!(code.dual_distance_bound(), 3);
    }

    #[test]
    fn repeated_point_breaks_pairwise_independence() {
        let c = HermitianCurve::new(2).unwrap();
        let f = c.tower().field();
        let funcs: Vec<_> = one_point_basis(3, 2).iter().map(|m| m.to_function()).collect();
        let mut pts: Vec<_> = c.affine_points().into_iter().take(5).collect();
        pts.push(pts[2]);
        let code = EvalCode::generator_matrix(&c, &funcs, &pts, 3).unwrap();
        let rep = code.check_w_wise_independence(f, 2, IndependenceMode::Exhaustive).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.counterexample, Some(vec![2, 5]));
        assert!(code.check_w_wise_independence(f, 1, IndependenceMode::Exhaustive).unwrap().holds);
    }

    #[test]
    fn independence_is_monotone() {
        let (c, code) = h2_code(4);
        let f = c.tower().field();
        let mut prev = true;
        for w in 1..=code.len() {
            let r = code.check_w_wise_independence(f, w, IndependenceMode::Exhaustive).unwrap();
            assert!(prev || !r.holds);
            prev = r.holds;
        }
        let s = code
            .check_w_wise_independence(f, 2, IndependenceMode::Sampled { count: 50, seed: 1 })
            .unwrap();
        assert!(s.holds);
    }

    #[test]
    fn exhaustive_guard() {
        let c = HermitianCurve::new(4).unwrap();
        let funcs = vec![FactoredFunction::monomial(0, 0)];
        let code = EvalCode::generator_matrix(&c, &funcs, &c.affine_points(), 0).unwrap();
        let err = code.check_w_wise_independence(c.tower().field(), 5, IndependenceMode::Exhaustive);
        assert!(matches!(err, Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn combination_walk_counts() {
        let mut c = vec![0, 1, 2];
        let mut n = 1;
        while next_combination(&mut c, 6) {
            n += 1;
        }
        assert_eq!(n, binomial(6, 3));
    }

    #[test]
    fn csv_export() {
        let (c, code) = h2_code(3);
        let mut buf = Vec::new();
        code.write_csv(c.tower().field(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
    }
}
