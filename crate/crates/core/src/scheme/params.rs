use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub q: u32,
    pub x: u32,
    pub t: u32,
    pub m: u32,
    pub genus: u32,
    /// fragments per file
    pub l: u32,
    /// servers
    pub n: u32,
    /// number of files
    pub files: u32,
}

/// `floor((q^3 - 3q^2 + q + 1 - (X+T)) / 2q)`; may be negative.
pub fn default_m(q: u32, x: u32, t: u32) -> i64 {
    let q = q as i64;
    (q * q * q - 3 * q * q + q + 1 - (x + t) as i64).div_euclid(2 * q)
}

impl SchemeParams {
    pub fn validate(q: u32, x: u32, t: u32, m: Option<u32>, files: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter(format!("q = {q} must be at least 2")));
        }
        if x < 1 || t < 1 {
            return Err(Error::InvalidParameter("X and T must be at least 1".into()));
        }
        if files < 1 {
            return Err(Error::InvalidParameter("at least one file is required".into()));
        }
        let qi = q as i64;
        let g = qi * (qi - 1) / 2;
        let m = match m {
            Some(m) => m as i64,
            None => default_m(q, x, t),
        };
        if m < qi - 1 {
            return Err(Error::Infeasible(format!(
                "m = {m} violates q - 1 <= m (q = {q}, X + T = {})",
                x + t
            )));
        }
        if m > qi * qi - 1 {
            return Err(Error::Infeasible(format!("m = {m} violates m <= q^2 - 1 = {}", qi * qi - 1)));
        }
        let l = m * qi - g;
        if l < g || l > qi * qi * qi - g {
            return Err(Error::Infeasible(format!("L = {l} violates g <= L <= q^3 - g")));
        }
        if (l + g) % qi != 0 {
            return Err(Error::Infeasible(format!("L + g = {} is not divisible by q", l + g)));
        }
        let xt = (x + t) as i64;
        let need = 2 * l + xt + 4 * qi * qi - 2 * qi;
        if qi * qi * qi + 1 < need {
            return Err(Error::Infeasible(format!(
                "q^3 + 1 = {} < 2L + X + T + 4q^2 - 2q = {need}",
                qi * qi * qi + 1
            )));
        }
        let n = l + xt + 3 * qi * qi - qi - 2;
        Ok(SchemeParams {
            q,
            x,
            t,
            m: m as u32,
            genus: g as u32,
            l: l as u32,
            n: n as u32,
            files,
        })
    }

    pub fn rate(&self) -> (u32, u32) {
        (self.l, self.n)
    }

    /// `a` of the noise divisor `a P_inf + b P_0`.
    pub fn noise_a(&self) -> i64 {
        (self.x + self.t + 4 * self.genus + self.q) as i64 - 2
    }

    pub fn noise_b(&self) -> i64 {
        (self.q * self.q) as i64 - 1
    }

    /// Degree of the divisor whose one-point space holds the security noise, before twisting by `h_l`.
    pub fn sec_degree(&self) -> i64 {
        (self.x + 2 * self.genus) as i64 - 1
    }

    pub fn priv_degree(&self) -> i64 {
        (self.t + 2 * self.genus) as i64 - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = SchemeParams::validate(5, 1, 1, None, 1).unwrap();
        assert_eq!((p.m, p.l, p.n), (5, 15, 85));
        let p = SchemeParams::validate(11, 5, 5, None, 1).unwrap();
        assert_eq!((p.m, p.l, p.n), (44, 429, 789));
        let p = SchemeParams::validate(5, 2, 2, None, 1).unwrap();
        assert_eq!(p.n, 87);
    }

    #[test]
    fn infeasible_cases_name_the_inequality() {
        let e = SchemeParams::validate(3, 1, 1, None, 1).unwrap_err();
        assert!(e.to_string().contains("q - 1 <= m"), "{e}");
        let e = SchemeParams::validate(5, 1, 1, Some(7), 1).unwrap_err();
        assert!(e.to_string().contains("q^3 + 1"), "{e}");
        assert!(SchemeParams::validate(5, 0, 1, None, 1).is_err());
        assert!(SchemeParams::validate(5, 1, 1, None, 0).is_err());
    }

    #[test]
    fn rate_identity() {
        for q in [4u32, 5, 7, 8, 9, 11] {
            for xt in 2..12 {
                let (x, t) = (xt / 2, xt - xt / 2);
                if let Ok(p) = SchemeParams::validate(q, x, t, None, 1) {
                    assert_eq!(p.n - p.l, x + t + 3 * q * q - q - 2);
                    assert_eq!((p.l + p.genus) % q, 0);
                }
            }
        }
    }
}
