use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::formulas::hyperelliptic_jmax;
use super::{Convention, RateRecord};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, GaloisField};

/// Candidate curves the exhaustive search is willing to enumerate.
pub const EXHAUSTIVE_BUDGET: u64 = 30_000_000;

/// `y^2 = f(x)` with `f` monic of degree `2g + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperellipticCurveSpec {
    pub field_order: u64,
    pub g: u32,
    /// `a_0 .. a_{2g}` as element indices; the leading 1 is implicit
    pub coeffs: Vec<u32>,
    pub point_count: u64,
    pub gamma: u32,
}

fn check_odd(f: &GaloisField) -> Result<()> {
    if f.characteristic() == 2 {
        return Err(Error::UnsupportedShape(
            "hyperelliptic models y^2 = f(x) need odd characteristic".into(),
        ));
    }
    Ok(())
}

fn monic(coeffs: &[FieldElement]) -> Vec<FieldElement> {
    let mut full = coeffs.to_vec();
    full.push(FieldElement::ONE);
    full
}

fn horner(f: &GaloisField, poly: &[FieldElement], x: FieldElement) -> FieldElement {
    poly.iter().rev().fold(FieldElement::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
}

/// `(#Y(F_q), gamma)`: one point per root, two per nonzero square value, plus `P_inf`.
pub fn count_points_hyperelliptic(f: &GaloisField, coeffs: &[FieldElement]) -> Result<(u64, u32)> {
    check_odd(f)?;
    let poly = monic(coeffs);
    let mut count = 1u64;
    let mut gamma = 0u32;
    for x in f.elements() {
        let v = horner(f, &poly, x);
        if v.is_zero() {
            count += 1;
            gamma += 1;
        } else if f.is_square(v) {
            count += 2;
        }
    }
    Ok((count, gamma))
}

/// `#Gamma = (2q - #Y - gamma + 1) / 2`.
pub fn gamma_set_size(field_order: u64, point_count: u64, gamma: u32) -> i64 {
    (2 * field_order as i64 - point_count as i64 - gamma as i64 + 1) / 2
}

/// x-values over which the curve has no rational point, counted directly.
pub fn gamma_set_direct(f: &GaloisField, coeffs: &[FieldElement]) -> Result<u64> {
    check_odd(f)?;
    let poly = monic(coeffs);
    Ok(f.elements()
        .filter(|&x| {
            let v = horner(f, &poly, x);
            !v.is_zero() && !f.is_square(v)
        })
        .count() as u64)
}

fn trim(p: &mut Vec<FieldElement>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_rem(f: &GaloisField, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let mut r = a.to_vec();
    trim(&mut r);
    let lead_inv = f.mul_inv(*b.last().expect("nonzero divisor")).expect("nonzero lead");
    while r.len() >= b.len() {
        let c = f.mul(*r.last().unwrap(), lead_inv);
        let shift = r.len() - b.len();
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(c, bc));
        }
        trim(&mut r);
    }
    r
}

/// `gcd(f, f') = 1` for the monic polynomial with lower coefficients `coeffs`.
pub fn is_squarefree(f: &GaloisField, coeffs: &[FieldElement]) -> bool {
    let poly = monic(coeffs);
    let mut d: Vec<FieldElement> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| f.mul(f.from_int(k as i64), c))
        .collect();
    trim(&mut d);
    if d.is_empty() {
        return false;
    }
    let mut a = poly;
    let mut b = d;
    while !b.is_empty() {
        let r = poly_rem(f, &a, &b);
        a = b;
        b = r;
    }
    a.len() == 1
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// every monic `f`
    Exhaustive,
    /// `a_{2g} = 0` after translating `x`; needs `p` not dividing `2g + 1`
    Reduced,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchScope {
    /// all squarefree monic `f` of degree `2g + 1`
    All,
    /// only `f` with `f(0) = 0`, so every curve has a rational root
    RootAtOrigin,
}

/// Every achievable `(point count, gamma)` pair with its smallest witness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairSearch {
    pub field_order: u64,
    pub g: u32,
    pub mode_used: SearchMode,
    pub scope: SearchScope,
    pub curves_scanned: u64,
    /// `(count, gamma) -> a_0 .. a_{2g}` as element indices
    pub pairs: BTreeMap<(u64, u32), Vec<u32>>,
}

impl PairSearch {
    pub fn witness(&self, count: u64, gamma: u32) -> Option<HyperellipticCurveSpec> {
        self.pairs.get(&(count, gamma)).map(|c| HyperellipticCurveSpec {
            field_order: self.field_order,
            g: self.g,
            coeffs: c.clone(),
            point_count: count,
            gamma,
        })
    }
}

/// Scans monic squarefree `f` of degree `2g + 1` over `F_q` and records which
/// `(count, gamma)` pairs occur.
///
/// Candidates are keyed by `sum a_k q^k`; the prefix `a_1 .. a_{2g}` is fixed in
/// the outer loop so `f - a_0` is evaluated once, and each pair's witness is the
/// smallest squarefree key.
pub fn achievable_pairs(f: &GaloisField, g: u32, mode: SearchMode, scope: SearchScope) -> Result<PairSearch> {
    check_odd(f)?;
    let q = f.order() as u64;
    let deg = 2 * g as usize + 1;
    let p = f.characteristic() as u64;
    let mode_used = if mode == SearchMode::Reduced && !(2 * g as u64 + 1).is_multiple_of(p) && scope == SearchScope::All {
        SearchMode::Reduced
    } else {
        SearchMode::Exhaustive
    };
    // prefix digits a_1 .. a_{2g}, a_1 least significant
    let prefix_digits = deg - 1;
    let prefixes = match mode_used {
        SearchMode::Exhaustive => q.pow(prefix_digits as u32),
        SearchMode::Reduced => q.pow(prefix_digits as u32 - 1),
    };
    let a0_range = match scope {
        SearchScope::All => q,
        SearchScope::RootAtOrigin => 1,
    };
    let scanned = prefixes * a0_range;
    if scanned > EXHAUSTIVE_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{scanned} curves over F_{q} exceed {EXHAUSTIVE_BUDGET}; use the reduced search"
        )));
    }

    let elems: Vec<FieldElement> = f.elements().collect();
    let qn = q as usize;
    // weight of a value: 1 for zero, 2 for a nonzero square, 0 otherwise
    let weight: Vec<u8> = elems
        .iter()
        .map(|&v| if v.is_zero() { 1 } else if f.is_square(v) { 2 } else { 0 })
        .collect();
    // powers[k][x] = x^k
    let powers: Vec<Vec<FieldElement>> = (0..=deg)
        .map(|k| elems.iter().map(|&x| f.pow(x, k as u64)).collect())
        .collect();
    let add_row: Vec<Vec<u32>> = elems
        .iter()
        .map(|&a| elems.iter().map(|&b| f.add(a, b).index()).collect())
        .collect();

    let chunk = (prefixes / 4096).max(1);
    let chunks = prefixes.div_ceil(chunk);
    let found: Vec<BTreeMap<(u64, u32), u64>> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut local: BTreeMap<(u64, u32), u64> = BTreeMap::new();
            let mut base = vec![0u32; qn];
            let mut digits = vec![0u32; prefix_digits];
            let end = ((ci + 1) * chunk).min(prefixes);
            for pre in ci * chunk..end {
                let mut r = pre;
                for d in digits.iter_mut() {
                    *d = (r % q) as u32;
                    r /= q;
                }
                for xi in 0..qn {
                    let mut v = powers[deg][xi];
                    for (k, &a) in digits.iter().enumerate() {
                        if a != 0 {
                            v = f.add(v, f.mul(elems[a as usize], powers[k + 1][xi]));
                        }
                    }
                    base[xi] = v.index();
                }
                for a0 in 0..a0_range as usize {
                    let mut count = 1u64;
                    let mut gamma = 0u32;
                    for &b in &base {
                        let w = weight[add_row[a0][b as usize] as usize];
                        count += w as u64;
                        gamma += (w == 1) as u32;
                    }
                    let key = pre * q + a0 as u64;
                    if let std::collections::btree_map::Entry::Vacant(e) = local.entry((count, gamma)) {
                        let mut coeffs = vec![elems[a0]];
                        coeffs.extend(digits.iter().map(|&d| elems[d as usize]));
                        if is_squarefree(f, &coeffs) {
                            e.insert(key);
                        }
                    }
                }
            }
            local
        })
        .collect();

    let mut best: BTreeMap<(u64, u32), u64> = BTreeMap::new();
    for local in found {
        for (pair, key) in local {
            best.entry(pair).and_modify(|k| *k = (*k).min(key)).or_insert(key);
        }
    }
    let pairs = best
        .into_iter()
        .map(|(pair, mut key)| {
            let coeffs = (0..deg)
                .map(|_| {
                    let d = (key % q) as u32;
                    key /= q;
                    d
                })
                .collect();
            (pair, coeffs)
        })
        .collect();
    Ok(PairSearch {
        field_order: q,
        g,
        mode_used,
        scope,
        curves_scanned: scanned,
        pairs,
    })
}

/// Best `J_max` rate over every curve found by the search. Ties keep the smallest witness.
pub fn curve_search_best_rate(search: &PairSearch, x: u32, t: u32) -> (RateRecord, Option<HyperellipticCurveSpec>) {
    let mut best: Option<(RateRecord, Vec<u32>, (u64, u32))> = None;
    for (&(count, gamma), coeffs) in &search.pairs {
        let r = hyperelliptic_jmax(search.field_order, search.g, count, gamma, x, t);
        let better = match &best {
            None => true,
            Some((b, bc, _)) => match r.cmp_rate(b) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Equal => key_lt(coeffs, bc),
                std::cmp::Ordering::Less => false,
            },
        };
        if better {
            best = Some((r, coeffs.clone(), (count, gamma)));
        }
    }
    match best {
        None => (
            hyperelliptic_jmax(search.field_order, search.g, 0, 0, x, t)
                .infeasible_if(true, || "no curve found".into()),
            None,
        ),
        Some((mut r, _, (count, gamma))) => {
            r.conventions.push(Convention::GammaActual);
            if search.scope == SearchScope::RootAtOrigin {
                r.conventions.push(Convention::RootAtOrigin);
            }
            if !r.feasible {
                return (r, None);
            }
            (r, search.witness(count, gamma))
        }
    }
}

/// Order on `a_0 .. a_{2g}` matching the search key (highest coefficient first).
fn key_lt(a: &[u32], b: &[u32]) -> bool {
    a.iter().rev().lt(b.iter().rev())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::GaloisField;
    use std::collections::BTreeSet;

    fn els(f: &GaloisField, v: &[i64]) -> Vec<FieldElement> {
        v.iter().map(|&c| f.from_int(c)).collect()
    }

    #[test]
    fn maximal_curves_over_f841() {
        let f = GaloisField::new(29, 2).unwrap();
        let one = |g: usize| {
            let mut c = vec![FieldElement::ZERO; 2 * g + 1];
            c[0] = FieldElement::ONE;
            c
        };
        assert_eq!(count_points_hyperelliptic(&f, &one(1)).unwrap(), (900, 3));
        assert_eq!(count_points_hyperelliptic(&f, &one(2)).unwrap(), (958, 5));
        assert_eq!(count_points_hyperelliptic(&f, &one(7)).unwrap(), (1248, 15));
        // maximality: q^2 + 1 + 2 g q
        assert_eq!(841 + 1 + 2 * 29, 900);
        assert_eq!(841 + 1 + 2 * 7 * 29, 1248);
    }

    #[test]
    fn cusp_has_single_root() {
        for p in [3u64, 5, 7, 11] {
            let f = GaloisField::new(p, 1).unwrap();
            let c = vec![FieldElement::ZERO; 3];
            assert_eq!(count_points_hyperelliptic(&f, &c).unwrap().1, 1);
            assert!(!is_squarefree(&f, &c));
        }
        let f2 = GaloisField::new(2, 2).unwrap();
        assert!(count_points_hyperelliptic(&f2, &[FieldElement::ZERO; 3]).is_err());
    }

    #[test]
    fn gamma_formula_matches_direct_count() {
        let f = GaloisField::new(13, 1).unwrap();
        let c = els(&f, &[1, 0, 0]);
        let (n, gm) = count_points_hyperelliptic(&f, &c).unwrap();
        assert_eq!(gamma_set_size(13, n, gm), gamma_set_direct(&f, &c).unwrap() as i64);
        assert_eq!(gamma_set_size(121, 232, 1), 5);
    }

    #[test]
    fn squarefree_oracle() {
        let f = GaloisField::new(7, 1).unwrap();
        // (x-1)^2 (x-2) = x^3 - 4x^2 + 5x - 2
        assert!(!is_squarefree(&f, &els(&f, &[-2, 5, -4])));
        // x^3 - x = x(x-1)(x+1)
        assert!(is_squarefree(&f, &els(&f, &[0, -1, 0])));
        // char 5, x^5 + 1 = (x + 1)^5
        let f5 = GaloisField::new(5, 1).unwrap();
        assert!(!is_squarefree(&f5, &els(&f5, &[1, 0, 0, 0, 0])));
    }

    #[test]
    fn pair_search_matches_naive_scan() {
        let f = GaloisField::new(7, 1).unwrap();
        let s = achievable_pairs(&f, 1, SearchMode::Exhaustive, SearchScope::All).unwrap();
        let mut naive = BTreeSet::new();
        for a0 in 0..7 {
            for a1 in 0..7 {
                for a2 in 0..7 {
                    let c = els(&f, &[a0, a1, a2]);
                    if is_squarefree(&f, &c) {
                        naive.insert(count_points_hyperelliptic(&f, &c).unwrap());
                    }
                }
            }
        }
        let got: BTreeSet<_> = s.pairs.keys().copied().collect();
        assert_eq!(got, naive);
        for (&(n, gm), coeffs) in &s.pairs {
            let c: Vec<_> = coeffs.iter().map(|&i| f.element(i).unwrap()).collect();
            assert_eq!(count_points_hyperelliptic(&f, &c).unwrap(), (n, gm));
            assert!((n - 1 - gm as u64).is_multiple_of(2));
            assert!(n <= 2 * 7 + 1);
        }
        let r = achievable_pairs(&f, 1, SearchMode::Reduced, SearchScope::All).unwrap();
        assert_eq!(r.mode_used, SearchMode::Reduced);
        assert_eq!(r.pairs.keys().collect::<Vec<_>>(), s.pairs.keys().collect::<Vec<_>>());
    }

    #[test]
    fn reduced_search_falls_back_when_p_divides_degree() {
        let f = GaloisField::new(3, 1).unwrap();
        let s = achievable_pairs(&f, 1, SearchMode::Reduced, SearchScope::All).unwrap();
        assert_eq!(s.mode_used, SearchMode::Exhaustive);
    }

    #[test]
    fn q11_genus_one_row() {
        let f = GaloisField::new(11, 1).unwrap();
        let s = achievable_pairs(&f, 1, SearchMode::Exhaustive, SearchScope::All).unwrap();
        let (r, w) = curve_search_best_rate(&s, 1, 1);
        assert_eq!(r.fraction(), Some((5, 15)));
        let w = w.unwrap();
        assert_eq!((w.point_count, w.gamma), (17, 0));
        assert_eq!(curve_search_best_rate(&s, 2, 2).0.decimal().as_deref(), Some("0.20000"));
        assert_eq!(curve_search_best_rate(&s, 3, 3).0.decimal().as_deref(), Some("0.066667"));
        assert!(!curve_search_best_rate(&s, 4, 4).0.feasible);
    }
}
