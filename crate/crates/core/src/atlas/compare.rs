use serde::{Deserialize, Serialize};

use super::formulas::{
    elliptic_case_b_rate, hermitian_max_rate, hyperelliptic_jmax_upper, rational_max_rate,
};
use super::{Convention, RateRecord};

/// A sufficient condition for "left beats right", checked against the actual rates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    pub condition_holds: bool,
    /// `left` has a strictly larger rate than `right`
    pub conclusion_holds: bool,
    pub left: RateRecord,
    pub right: RateRecord,
    pub notes: Vec<String>,
}

impl Comparison {
    /// The condition never holds without the conclusion.
    pub fn consistent(&self) -> bool {
        !self.condition_holds || self.conclusion_holds
    }
}

/// `P(q, M)` with the coefficients as printed.
pub fn p_qm_printed(q: i64, m: i64) -> i64 {
    -3 * q.pow(4) + (m + 3) * q.pow(3) - 2 * (m - 2) * q.pow(2) - 3 * (m + 2) * q + (m - 12)
}

/// Half the cross-multiplied difference of the Hermitian and elliptic bound fractions.
pub fn p_qm_exact(q: i64, m: i64) -> i64 {
    -3 * q.pow(4) + (m + 3) * q.pow(3) + (2 - 2 * m) * q.pow(2) - 3 * (m + 2) * q + (m - 12)
}

pub fn p_qgm(q: i64, g: i64, m: i64) -> i64 {
    -6 * q.pow(4) + (6 * g + m + 4) * q.pow(3) - (3 * m - 2) * q.pow(2) - (8 * g + m + 2) * q
        + (2 * g * m - 10 * g - m - 2)
}

fn beats(a: &RateRecord, b: &RateRecord) -> bool {
    a.cmp_rate(b) == std::cmp::Ordering::Greater
}

/// Elliptic curve with `count` points and `gamma` roots against the rational construction, both over `F_q`.
pub fn elliptic_vs_rational(field_order: u64, count: u64, gamma: u32, x: u32, t: u32) -> Comparison {
    let q = field_order as i64;
    let m = (x + t) as i64;
    // #E >= q (1 + 8/M) + gamma + 7, scaled by M
    let condition = m * count as i64 >= q * m + 8 * q + m * (gamma as i64 + 7);
    let left = elliptic_case_b_rate(field_order, count, gamma, x, t);
    let right = rational_max_rate(field_order, x, t);
    Comparison {
        name: "elliptic over rational".into(),
        condition_holds: condition,
        conclusion_holds: beats(&left, &right),
        left,
        right,
        notes: Vec::new(),
    }
}

/// Hermitian curve against a maximal elliptic curve, both over `F_{q^2}`.
pub fn hermitian_vs_elliptic(q: u32, x: u32, t: u32) -> Comparison {
    let qi = q as i64;
    let m = (x + t) as i64;
    let q2 = (q * q) as u64;
    let left = hermitian_max_rate(q, x, t, Convention::TheoremN);
    // Hasse-Weil maximal count with no rational roots is the best elliptic case
    let right = elliptic_case_b_rate(q2, q2 + 2 * q as u64 + 1, 0, x, t).with(Convention::GammaZero);
    // bound fractions R_H >= (q^3+1-(M+4q^2)) / (q^3+2q^2+M-(2q+3)),  R_E <= (q^2+2q-M-10) / (q^2+2q+M+6)
    let (hn, hd) = (qi.pow(3) + 1 - (m + 4 * qi * qi), qi.pow(3) + 2 * qi * qi + m - (2 * qi + 3));
    let (en, ed) = (qi * qi + 2 * qi - m - 10, qi * qi + 2 * qi + m + 6);
    let bound_order = hn * ed - en * hd;
    Comparison {
        name: "Hermitian over maximal elliptic".into(),
        condition_holds: q >= 7 && m >= 3 * (qi + 2),
        conclusion_holds: beats(&left, &right),
        left,
        right,
        notes: vec![
            format!("P(q,M) printed = {}", p_qm_printed(qi, m)),
            format!("P(q,M) exact = {}", p_qm_exact(qi, m)),
            format!("bound difference numerator = {bound_order}"),
        ],
    }
}

/// Hermitian curve against the genus-`g` hyperelliptic bound, both over `F_{q^2}`.
pub fn hermitian_vs_hyperelliptic(q: u32, g: u32, x: u32, t: u32) -> Comparison {
    let qi = q as i64;
    let m = (x + t) as i64;
    let left = hermitian_max_rate(q, x, t, Convention::TheoremN);
    let right = hyperelliptic_jmax_upper((q * q) as u64, g, x, t);
    let genus_ok = (g == 1 && q > 31) || (g > 1 && q > 5);
    Comparison {
        name: format!("Hermitian over hyperelliptic genus {g}"),
        condition_holds: m >= 3 * (2 * qi + 3) && genus_ok,
        conclusion_holds: beats(&left, &right),
        left,
        right,
        notes: vec![format!("P(q,g,M) = {}", p_qgm(qi, g as i64, m))],
    }
}

/// All comparisons at one parameter point; the elliptic curves are taken maximal over `F_{q^2}`.
pub fn comparison_predicates(q: u32, g: u32, x: u32, t: u32) -> Vec<Comparison> {
    let q2 = (q * q) as u64;
    vec![
        elliptic_vs_rational(q2, q2 + 2 * q as u64 + 1, 0, x, t),
        hermitian_vs_elliptic(q, x, t),
        hermitian_vs_hyperelliptic(q, g, x, t),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_values() {
        assert_eq!(p_qm_printed(7, 27), 43);
        for q in 3..40 {
            assert_eq!(p_qm_printed(q, 3 * q + 6), 3 * q.pow(3) - 17 * q * q - 21 * q - 6);
        }
        assert!(p_qm_exact(7, 27) < 0);
    }

    #[test]
    fn exact_polynomial_is_the_bound_comparison() {
        for q in 3..30i64 {
            for m in 2..200i64 {
                let hn = q.pow(3) + 1 - (m + 4 * q * q);
                let hd = q.pow(3) + 2 * q * q + m - (2 * q + 3);
                let en = q * q + 2 * q - m - 10;
                let ed = q * q + 2 * q + m + 6;
                assert_eq!(hn * ed - en * hd, 2 * p_qm_exact(q, m));
            }
        }
    }

    #[test]
    fn hyperelliptic_polynomial_is_the_bound_comparison() {
        for q in 3..30i64 {
            for g in 1..6i64 {
                for m in 2..200i64 {
                    let hn = q.pow(3) + 1 - (m + 4 * q * q);
                    let hd = q.pow(3) + 2 * q * q + m - (2 * q + 3);
                    let yn = 2 * q * q - (m + 8 * g + 2);
                    let yd = 2 * q * q + m + 4 * g + 2;
                    assert_eq!(hn * yd - yn * hd, 2 * p_qgm(q, g, m));
                }
            }
        }
    }

    #[test]
    fn spot_comparisons() {
        let c = hermitian_vs_elliptic(7, 13, 14);
        assert!(c.condition_holds && c.conclusion_holds);
        let c = hermitian_vs_hyperelliptic(7, 2, 25, 26);
        assert!(c.condition_holds && c.conclusion_holds);
        for c in comparison_predicates(7, 2, 13, 14) {
            assert!(c.consistent(), "{}", c.name);
        }
    }
}
