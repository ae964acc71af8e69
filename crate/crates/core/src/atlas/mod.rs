//! Maximal retrieval rates for rational, elliptic, hyperelliptic and Hermitian
//! constructions, curve searches, and the three rate tables.

mod compare;
mod curves;
mod formulas;
pub mod reference;
mod tables;

pub use compare::{
    comparison_predicates, elliptic_vs_rational, hermitian_vs_elliptic, hermitian_vs_hyperelliptic,
    p_qgm, p_qm_exact, p_qm_printed, Comparison,
};
pub use curves::{
    achievable_pairs, count_points_hyperelliptic, curve_search_best_rate, gamma_set_direct,
    gamma_set_size, is_squarefree, HyperellipticCurveSpec, PairSearch, SearchMode, SearchScope,
};
pub use formulas::{
    elliptic_case_b_rate, hermitian_max_rate, hyperelliptic_jmax, hyperelliptic_jmax_upper,
    rational_max_rate,
};
pub use tables::{emit_table, table1, table2, table3, Cell, Row, Table, Table1Options, TableFormat, CELL_TOLERANCE};

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Rational,
    Elliptic,
    Hyperelliptic { g: u32 },
    Hermitian,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `N = L + X + T + 3q^2 - q - 2`
    TheoremN,
    /// `N = L + X + T + (7q^2 - 3q - 6)/2`
    TableDegN,
    /// `gamma` forced to zero
    GammaZero,
    /// `gamma` counted on an actual curve
    GammaActual,
    /// curve search restricted to `f(0) = 0`
    RootAtOrigin,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateRecord {
    pub family: Family,
    pub field_order: u64,
    pub x: u32,
    pub t: u32,
    pub j: Option<i64>,
    pub l: i64,
    pub n: i64,
    pub feasible: bool,
    /// the violated condition when infeasible
    pub violated: Option<String>,
    pub conventions: Vec<Convention>,
}

impl RateRecord {
    pub(crate) fn new(family: Family, field_order: u64, x: u32, t: u32, j: Option<i64>, l: i64, n: i64) -> Self {
        RateRecord {
            family,
            field_order,
            x,
            t,
            j,
            l,
            n,
            feasible: true,
            violated: None,
            conventions: Vec::new(),
        }
    }

    pub(crate) fn infeasible_if(mut self, bad: bool, why: impl FnOnce() -> String) -> Self {
        if bad {
            self.feasible = false;
            self.violated = Some(why());
        }
        self
    }

    pub(crate) fn with(mut self, c: Convention) -> Self {
        self.conventions.push(c);
        self
    }

    /// `L/N` unreduced, when feasible.
    pub fn fraction(&self) -> Option<(i64, i64)> {
        self.feasible.then_some((self.l, self.n))
    }

    pub fn rate(&self) -> Option<f64> {
        self.fraction().map(|(l, n)| l as f64 / n as f64)
    }

    pub fn decimal(&self) -> Option<String> {
        self.fraction().map(|(l, n)| format_sig5(l, n))
    }

    /// Compare rates exactly; infeasible records rank below every feasible one.
    pub fn cmp_rate(&self, other: &RateRecord) -> Ordering {
        match (self.fraction(), other.fraction()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some((a, b)), Some((c, d))) => (a as i128 * d as i128).cmp(&(c as i128 * b as i128)),
        }
    }
}

/// `num/den` to five significant digits, rounding halves up, with trailing zeros kept.
pub fn format_sig5(num: i64, den: i64) -> String {
    assert!(den > 0, "denominator must be positive");
    if num == 0 {
        return "0".into();
    }
    let neg = num < 0;
    let a = num.unsigned_abs() as u128;
    let b = den as u128;
    // smallest k with a * 10^k / b >= 10^4
    let mut k: i32 = 0;
    let scaled = |k: i32| -> u128 {
        if k >= 0 {
            a * 10u128.pow(k as u32) / b
        } else {
            a / (b * 10u128.pow((-k) as u32))
        }
    };
    while scaled(k) >= 100_000 {
        k -= 1;
    }
    while scaled(k) < 10_000 {
        k += 1;
    }
    let round = |k: i32| -> u128 {
        if k >= 0 {
            (2 * a * 10u128.pow(k as u32) + b) / (2 * b)
        } else {
            let d = b * 10u128.pow((-k) as u32);
            (2 * a + d) / (2 * d)
        }
    };
    let mut digits = round(k);
    if digits >= 100_000 {
        k -= 1;
        digits = round(k);
    }
    let s = digits.to_string();
    let body = if k <= 0 {
        format!("{}{}", s, "0".repeat((-k) as usize))
    } else if (k as usize) >= s.len() {
        format!("0.{}{}", "0".repeat(k as usize - s.len()), s)
    } else {
        let (int, frac) = s.split_at(s.len() - k as usize);
        format!("{int}.{frac}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_significant_digits() {
        assert_eq!(format_sig5(405, 435), "0.93103");
        assert_eq!(format_sig5(1, 15), "0.066667");
        assert_eq!(format_sig5(1, 5), "0.20000");
        assert_eq!(format_sig5(7, 17), "0.41176");
        assert_eq!(format_sig5(1, 19), "0.052632");
        assert_eq!(format_sig5(11, 25), "0.44000");
        assert_eq!(format_sig5(1, 8), "0.12500");
        assert_eq!(format_sig5(1, 1), "1.0000");
        assert_eq!(format_sig5(123456, 1), "123460");
        assert_eq!(format_sig5(-1, 3), "-0.33333");
        // exact half rounds up
        assert_eq!(format_sig5(123455, 1_000_000), "0.12346");
    }

    #[test]
    fn exact_rate_order() {
        let a = RateRecord::new(Family::Rational, 11, 1, 1, None, 1, 3);
        let b = RateRecord::new(Family::Rational, 11, 1, 1, None, 2, 6);
        let c = RateRecord::new(Family::Rational, 11, 1, 1, None, 2, 5);
        let d = c.clone().infeasible_if(true, || "x".into());
        assert_eq!(a.cmp_rate(&b), Ordering::Equal);
        assert_eq!(a.cmp_rate(&c), Ordering::Less);
        assert_eq!(d.cmp_rate(&a), Ordering::Less);
        assert_eq!(d.decimal(), None);
    }
}
