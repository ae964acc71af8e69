use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{csv_err, FactoredFunction, HermitianCurve};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, GaloisField};

/// `x^i y^j`; `j` may be negative in two-point families.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonomialIndex {
    pub i: u32,
    pub j: i32,
}

impl MonomialIndex {
    pub fn new(i: u32, j: i32) -> Self {
        MonomialIndex { i, j }
    }

    pub fn pole_order(&self, q: u32) -> i64 {
        self.i as i64 * q as i64 + self.j as i64 * (q as i64 + 1)
    }

    pub fn valuation_at_origin(&self, q: u32) -> i64 {
        self.i as i64 + self.j as i64 * (q as i64 + 1)
    }

    pub fn to_function(&self) -> FactoredFunction {
        FactoredFunction::monomial(self.i as i32, self.j)
    }
}

/// Monomial basis of `L(m P_inf)`, sorted by pole order.
pub fn one_point_basis(m: i64, q: u32) -> Vec<MonomialIndex> {
    let mut out = Vec::new();
    if m < 0 {
        return out;
    }
    for j in 0..q as i32 {
        let mut i = 0u32;
        loop {
            let mono = MonomialIndex::new(i, j);
            if mono.pole_order(q) > m {
                break;
            }
            out.push(mono);
            i += 1;
        }
    }
    out.sort_by_key(|mono| mono.pole_order(q));
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoPointSet {
    pub a: i64,
    pub b: i64,
    pub monomials: Vec<MonomialIndex>,
    /// `a + b - g + 1`
    pub expected: i64,
    pub count_matches: bool,
}

/// `x^i y^j` with `0 <= i <= q`, pole order at most `a` at infinity and at most `b` at `P_0`.
pub fn two_point_monomial_set(q: u32, a: i64, b: i64) -> TwoPointSet {
    let qi = q as i64;
    let g = qi * (qi - 1) / 2;
    let mut monomials = Vec::new();
    for i in 0..=q {
        let il = i as i64;
        // i + j(q+1) >= -b  and  iq + j(q+1) <= a
        let lo = (-b - il).div_euclid(qi + 1) + if (-b - il).rem_euclid(qi + 1) == 0 { 0 } else { 1 };
        let hi = (a - il * qi).div_euclid(qi + 1);
        for j in lo..=hi {
            monomials.push(MonomialIndex::new(i, j as i32));
        }
    }
    monomials.sort_by_key(|mono| (mono.pole_order(q), mono.i));
    let expected = a + b - g + 1;
    TwoPointSet {
        a,
        b,
        count_matches: monomials.len() as i64 == expected,
        monomials,
        expected,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub z: u32,
    pub i: u32,
    pub func: FactoredFunction,
}

fn check_alphas(alphas: &[FieldElement]) -> Result<()> {
    for (k, a) in alphas.iter().enumerate() {
        if a.is_zero() {
            return Err(Error::InvalidParameter("alpha must be nonzero".into()));
        }
        if alphas[..k].contains(a) {
            return Err(Error::InvalidParameter("alphas must be pairwise distinct".into()));
        }
    }
    Ok(())
}

/// `h = prod 1/(x - alpha_i)`.
pub fn build_h(alphas: &[FieldElement]) -> Result<FactoredFunction> {
    check_alphas(alphas)?;
    FactoredFunction::new(FieldElement::ONE, 0, 0, Vec::new(), alphas.to_vec())
}

fn check_basis_args(q: u32, m: u32, alphas: &[FieldElement]) -> Result<()> {
    if 2 * m < q + 1 {
        return Err(Error::InvalidParameter(format!(
            "m = {m} is below (q+1)/2 for q = {q}"
        )));
    }
    if alphas.len() != m as usize {
        return Err(Error::InvalidParameter(format!(
            "expected {m} alphas, got {}",
            alphas.len()
        )));
    }
    check_alphas(alphas)
}

/// The family `y^(z-1) * prod_{i' in [m-z+1], i' != i} (x - alpha_i')`, z-major.
///
/// Its size is `sum_z max(0, m - z + 1)`, which equals `mq - g` once `m >= q - 1`.
pub fn interpolation_basis(curve: &HermitianCurve, m: u32, alphas: &[FieldElement]) -> Result<Vec<BasisElement>> {
    let q = curve.q();
    check_basis_args(q, m, alphas)?;
    let mut out = Vec::new();
    for z in 1..=q {
        if z > m {
            break;
        }
        let top = (m - z + 1) as usize;
        for i in 1..=top {
            let zeros: Vec<_> = (1..=top)
                .filter(|&k| k != i)
                .map(|k| alphas[k - 1])
                .collect();
            let func = FactoredFunction::new(FieldElement::ONE, 0, z as i32 - 1, zeros, Vec::new())?;
            out.push(BasisElement { z, i: i as u32, func });
        }
    }
    Ok(out)
}

/// `h * hbar` for each element of the interpolation family. After cancellation
/// each is `y^(z-1) / ((x - alpha_i) prod_{i' = m-z+2}^{m} (x - alpha_i'))`.
pub fn info_basis(curve: &HermitianCurve, m: u32, alphas: &[FieldElement]) -> Result<Vec<BasisElement>> {
    let f = curve.tower().field();
    let h = build_h(alphas)?;
    Ok(interpolation_basis(curve, m, alphas)?
        .into_iter()
        .map(|e| BasisElement {
            z: e.z,
            i: e.i,
            func: h.mul(f, &e.func),
        })
        .collect())
}

pub fn write_basis_csv<W: Write>(f: &GaloisField, basis: &[BasisElement], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["z", "i", "numerator", "denominator"])
        .map_err(csv_err)?;
    for e in basis {
        w.write_record([
            e.z.to_string(),
            e.i.to_string(),
            e.func.numerator_text(f),
            e.func.denominator_text(f),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::CurvePoint;
    use crate::linalg::Matrix;

    fn data_points(c: &HermitianCurve, alphas: &[FieldElement]) -> Vec<CurvePoint> {
        alphas.iter().flat_map(|&a| c.fiber_points(a)).collect()
    }

    fn eval_matrix(c: &HermitianCurve, basis: &[BasisElement], pts: &[CurvePoint]) -> Matrix {
        let cols: Vec<Vec<_>> = basis
            .iter()
            .map(|e| e.func.evaluate_all(c, pts).unwrap())
            .collect();
        Matrix::from_columns(&cols).unwrap()
    }

    #[test]
    fn one_point_examples() {
        assert_eq!(one_point_basis(26, 5).len(), 17);
        assert_eq!(
            one_point_basis(5, 5),
            vec![MonomialIndex::new(0, 0), MonomialIndex::new(1, 0)]
        );
        let b = one_point_basis(3, 2);
        assert_eq!(
            b,
            vec![MonomialIndex::new(0, 0), MonomialIndex::new(1, 0), MonomialIndex::new(0, 1)]
        );
        assert!(one_point_basis(-1, 5).is_empty());
    }

    #[test]
    fn one_point_dimension_beyond_2g_minus_2() {
        for q in [2u32, 3, 4, 5] {
            let g = (q * (q - 1) / 2) as i64;
            for m in (2 * g - 1)..(2 * g + 20) {
                assert_eq!(one_point_basis(m, q).len() as i64, m - g + 1, "q={q} m={m}");
            }
        }
    }

    #[test]
    fn two_point_examples() {
        let s = two_point_monomial_set(5, 45, 24);
        assert_eq!(s.monomials.len(), 60);
        assert!(s.count_matches);
        let per_row: Vec<usize> = (0..=5)
            .map(|i| s.monomials.iter().filter(|m| m.i == i).count())
            .collect();
        assert_eq!(per_row, vec![12, 11, 10, 10, 9, 8]);
        let s0 = two_point_monomial_set(5, 0, 0);
        assert_eq!(s0.monomials, vec![MonomialIndex::new(0, 0)]);
        for m in &s.monomials {
            assert!(m.pole_order(5) <= 45);
            assert!(m.valuation_at_origin(5) >= -24);
        }
    }

    #[test]
    fn two_point_valuations_distinct() {
        let s = two_point_monomial_set(4, 30, 15);
        let mut v: Vec<_> = s.monomials.iter().map(|m| m.pole_order(4)).collect();
        v.dedup();
        assert_eq!(v.len(), s.monomials.len());
    }

    #[test]
    fn h_has_poles_exactly_on_data_fibers() {
        let c = HermitianCurve::new(5).unwrap();
        let alphas = c.tower().first_nonzero(5);
        let h = build_h(&alphas).unwrap();
        let poles = c
            .affine_points()
            .iter()
            .filter(|p| h.evaluate(&c, p).is_err())
            .count();
        assert_eq!(poles, 25);
        assert_eq!(h.valuation_at_infinity(5), 25);
        assert!(build_h(&[alphas[0], alphas[0]]).is_err());
        assert!(build_h(&[FieldElement::ZERO]).is_err());
    }

    #[test]
    fn interpolation_family_is_independent() {
        for q in [3u32, 4, 5] {
            let c = HermitianCurve::new(q as u64).unwrap();
            for m in (q + 1).div_ceil(2)..=q + 2 {
                let alphas = c.tower().first_nonzero(m as usize);
                let b = interpolation_basis(&c, m, &alphas).unwrap();
                let pts = data_points(&c, &alphas);
                let rank = eval_matrix(&c, &b, &pts).rank(c.tower().field());
                assert_eq!(rank, b.len(), "q={q} m={m}");
                if m + 1 >= q {
                    assert_eq!(b.len() as u32, m * q - q * (q - 1) / 2);
                }
                for e in &b {
                    let want = -((m * q) as i64 - 1) + q as i64 - e.z as i64;
                    assert_eq!(e.func.valuation_at_infinity(q), want);
                }
            }
        }
    }

    #[test]
    fn small_m_exceeds_target_count() {
        // below m = q - 1 the family is larger than mq - g
        let c = HermitianCurve::new(5).unwrap();
        let alphas = c.tower().first_nonzero(3);
        let b = interpolation_basis(&c, 3, &alphas).unwrap();
        assert_eq!(b.len(), 6);
        assert!(interpolation_basis(&c, 2, &c.tower().first_nonzero(2)).is_err());
    }

    #[test]
    fn info_basis_shape_and_valuations() {
        let q = 5u32;
        let c = HermitianCurve::new(q as u64).unwrap();
        let alphas = c.tower().first_nonzero(5);
        let b = info_basis(&c, 5, &alphas).unwrap();
        assert_eq!(b.len(), 15);
        assert_eq!(b[0].func.poles.len(), 1);
        assert!(b[0].func.zeros.is_empty());
        for e in &b {
            assert_eq!(e.func.poles.len() as u32, e.z);
            assert_eq!(e.func.valuation_at_infinity(q), (q - e.z + 1) as i64);
            assert!(e.func.valuation_at_origin(q) >= 0);
            assert!(e.func.valuation_at_origin(q) <= (q * q - 1) as i64);
        }
    }

    #[test]
    fn fiber_vandermonde_is_invertible() {
        let c = HermitianCurve::new(5).unwrap();
        let f = c.tower().field();
        for a in c.tower().first_nonzero(6) {
            let betas = c.fiber_of_x(a);
            let rows: Vec<Vec<_>> = betas
                .iter()
                .map(|&b| (0..5).map(|k| f.pow(b, k)).collect())
                .collect();
            assert_eq!(Matrix::from_rows(rows).unwrap().rank(f), 5);
        }
    }

    #[test]
    fn basis_csv() {
        let c = HermitianCurve::new(3).unwrap();
        let alphas = c.tower().first_nonzero(2);
        let b = info_basis(&c, 2, &alphas).unwrap();
        let mut buf = Vec::new();
        write_basis_csv(c.tower().field(), &b, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("z,i,numerator,denominator"));
        assert_eq!(text.lines().count(), b.len() + 1);
    }
}
