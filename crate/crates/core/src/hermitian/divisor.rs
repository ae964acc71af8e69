use std::collections::BTreeMap;
use std::fmt;

use super::Place;

/// Finite formal sum of places. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Divisor {
    coeffs: BTreeMap<Place, i64>,
}

impl Divisor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(p: Place, n: i64) -> Self {
        let mut d = Self::zero();
        d.add_at(p, n);
        d
    }

    pub fn add_at(&mut self, p: Place, n: i64) {
        if n == 0 {
            return;
        }
        let e = self.coeffs.entry(p).or_insert(0);
        *e += n;
        if *e == 0 {
            self.coeffs.remove(&p);
        }
    }

    pub fn coefficient(&self, p: &Place) -> i64 {
        self.coeffs.get(p).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Place, &i64)> {
        self.coeffs.iter()
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.values().sum()
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (&p, &n) in &other.coeffs {
            out.add_at(p, n);
        }
        out
    }

    pub fn neg(&self) -> Divisor {
        Divisor {
            coeffs: self.coeffs.iter().map(|(&p, &n)| (p, -n)).collect(),
        }
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        self.add(&other.neg())
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|&n| n > 0)
    }

    /// `self <= other` coefficientwise.
    pub fn le(&self, other: &Divisor) -> bool {
        other.sub(self).is_effective()
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(p, n)| format!("{n}*{p}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::CurvePoint;

    #[test]
    fn zero_entries_are_dropped() {
        let mut d = Divisor::single(CurvePoint::Infinity, 3);
        d.add_at(CurvePoint::origin(), 2);
        d.add_at(CurvePoint::Infinity, -3);
        assert_eq!(d.support().count(), 1);
        assert_eq!(d.degree(), 2);
        assert_eq!(d.sub(&d), Divisor::zero());
    }

    #[test]
    fn ordering() {
        let a = Divisor::single(CurvePoint::Infinity, 2);
        let b = a.add(&Divisor::single(CurvePoint::origin(), 1));
        assert!(a.le(&b));
        assert!(!b.le(&a));
        assert!(a.le(&a));
    }
}
