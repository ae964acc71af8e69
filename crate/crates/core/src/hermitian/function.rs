use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CurvePoint, Divisor, HermitianCurve};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, GaloisField};

/// Sparse bivariate polynomial, keyed by `(x exponent, y exponent)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), FieldElement>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: FieldElement, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BiPoly { terms }
    }

    /// `x - alpha`.
    pub fn linear_x(f: &GaloisField, alpha: FieldElement) -> Self {
        let mut p = Self::monomial(FieldElement::ONE, 1, 0);
        p.add_term(f, 0, 0, f.neg(alpha));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, FieldElement)> + '_ {
        self.terms.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    fn add_term(&mut self, f: &GaloisField, i: u32, j: u32, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert(FieldElement::ZERO);
        *e = f.add(*e, c);
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn add(&self, f: &GaloisField, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (i, j, c) in other.terms() {
            out.add_term(f, i, j, c);
        }
        out
    }

    pub fn mul(&self, f: &GaloisField, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (i, j, a) in self.terms() {
            for (k, l, b) in other.terms() {
                out.add_term(f, i + k, j + l, f.mul(a, b));
            }
        }
        out
    }

    pub fn scale(&self, f: &GaloisField, s: FieldElement) -> BiPoly {
        let mut out = BiPoly::zero();
        for (i, j, c) in self.terms() {
            out.add_term(f, i, j, f.mul(c, s));
        }
        out
    }

    /// Rewrites every `y^q` as `x^(q+1) - y` until the y-degree is below `q`.
    pub fn reduce(&self, f: &GaloisField, q: u32) -> BiPoly {
        let mut cur = self.clone();
        loop {
            let Some((&(i, j), &c)) = cur.terms.iter().find(|(&(_, j), _)| j >= q) else {
                return cur;
            };
            cur.terms.remove(&(i, j));
            cur.add_term(f, i + q + 1, j - q, c);
            cur.add_term(f, i, j - q + 1, f.neg(c));
        }
    }

    pub fn evaluate(&self, f: &GaloisField, x: FieldElement, y: FieldElement) -> FieldElement {
        f.sum(
            self.terms()
                .map(|(i, j, c)| f.mul(c, f.mul(f.pow(x, i as u64), f.pow(y, j as u64)))),
        )
    }

    /// Largest pole order `iq + j(q+1)` among the terms. Exact for reduced
    /// polynomials, whose monomials all have distinct pole orders at infinity.
    pub fn weighted_degree(&self, q: u32) -> Option<i64> {
        self.terms()
            .map(|(i, j, _)| i as i64 * q as i64 + j as i64 * (q as i64 + 1))
            .max()
    }

    pub fn to_text(&self, f: &GaloisField) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(&(i, j), &c)| {
                let mut s = f.format(c);
                if i > 0 {
                    s.push_str(&format!("*x^{i}"));
                }
                if j > 0 {
                    s.push_str(&format!("*y^{j}"));
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}

/// A rational function on the curve as a ratio of reduced polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveFunction {
    num: BiPoly,
    den: BiPoly,
}

impl CurveFunction {
    pub fn new(curve: &HermitianCurve, num: BiPoly, den: BiPoly) -> Result<Self> {
        let f = curve.tower().field();
        let q = curve.q();
        let den = den.reduce(f, q);
        if den.is_zero() {
            return Err(Error::UnsupportedShape("denominator vanishes on the curve".into()));
        }
        Ok(CurveFunction {
            num: num.reduce(f, q),
            den,
        })
    }

    pub fn constant(c: FieldElement) -> Self {
        CurveFunction {
            num: BiPoly::constant(c),
            den: BiPoly::constant(FieldElement::ONE),
        }
    }

    pub fn x() -> Self {
        CurveFunction {
            num: BiPoly::monomial(FieldElement::ONE, 1, 0),
            den: BiPoly::constant(FieldElement::ONE),
        }
    }

    pub fn y() -> Self {
        CurveFunction {
            num: BiPoly::monomial(FieldElement::ONE, 0, 1),
            den: BiPoly::constant(FieldElement::ONE),
        }
    }

    pub fn numerator(&self) -> &BiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &BiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, curve: &HermitianCurve, other: &CurveFunction) -> CurveFunction {
        let f = curve.tower().field();
        let q = curve.q();
        CurveFunction {
            num: self.num.mul(f, &other.num).reduce(f, q),
            den: self.den.mul(f, &other.den).reduce(f, q),
        }
    }

    pub fn add(&self, curve: &HermitianCurve, other: &CurveFunction) -> CurveFunction {
        let f = curve.tower().field();
        let q = curve.q();
        let num = self
            .num
            .mul(f, &other.den)
            .add(f, &other.num.mul(f, &self.den));
        CurveFunction {
            num: num.reduce(f, q),
            den: self.den.mul(f, &other.den).reduce(f, q),
        }
    }

    pub fn inverse(&self) -> Result<CurveFunction> {
        if self.num.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(CurveFunction {
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    pub fn evaluate(&self, curve: &HermitianCurve, p: &CurvePoint) -> Result<FieldElement> {
        let (x, y) = p.coords().ok_or(Error::EvaluationAtInfinity)?;
        let f = curve.tower().field();
        let d = self.den.evaluate(f, x, y);
        if d.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        f.div(self.num.evaluate(f, x, y), d)
    }

    /// `v_{P_inf}`, computed from the weighted degrees of numerator and denominator.
    pub fn valuation_at_infinity(&self, q: u32) -> Result<i64> {
        let n = self
            .num
            .weighted_degree(q)
            .ok_or_else(|| Error::UnsupportedShape("zero function".into()))?;
        let d = self.den.weighted_degree(q).expect("denominator is nonzero");
        Ok(d - n)
    }
}

/// `c · x^i · y^j · ∏(x - a) / ∏(x - b)` with every `a, b` nonzero.
///
/// Every function the retrieval scheme touches has this shape, which gives
/// closed-form valuations at `P_inf` and `P_0` and cheap evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredFunction {
    pub coeff: FieldElement,
    pub x_exp: i32,
    pub y_exp: i32,
    pub zeros: Vec<FieldElement>,
    pub poles: Vec<FieldElement>,
}

impl FactoredFunction {
    pub fn monomial(i: i32, j: i32) -> Self {
        FactoredFunction {
            coeff: FieldElement::ONE,
            x_exp: i,
            y_exp: j,
            zeros: Vec::new(),
            poles: Vec::new(),
        }
    }

    pub fn new(
        coeff: FieldElement,
        x_exp: i32,
        y_exp: i32,
        zeros: Vec<FieldElement>,
        poles: Vec<FieldElement>,
    ) -> Result<Self> {
        if coeff.is_zero() {
            return Err(Error::UnsupportedShape("zero coefficient".into()));
        }
        let mut out = FactoredFunction {
            coeff,
            x_exp,
            y_exp,
            zeros,
            poles,
        };
        out.normalize();
        Ok(out)
    }

    /// Folds factors `x - 0` into the x exponent and cancels common factors.
    fn normalize(&mut self) {
        let zero_zeros = self.zeros.iter().filter(|a| a.is_zero()).count() as i32;
        let zero_poles = self.poles.iter().filter(|a| a.is_zero()).count() as i32;
        self.x_exp += zero_zeros - zero_poles;
        self.zeros.retain(|a| !a.is_zero());
        self.poles.retain(|a| !a.is_zero());
        let mut i = 0;
        while i < self.zeros.len() {
            if let Some(k) = self.poles.iter().position(|b| *b == self.zeros[i]) {
                self.poles.remove(k);
                self.zeros.remove(i);
            } else {
                i += 1;
            }
        }
    }

    pub fn mul(&self, f: &GaloisField, other: &FactoredFunction) -> FactoredFunction {
        let mut out = FactoredFunction {
            coeff: f.mul(self.coeff, other.coeff),
            x_exp: self.x_exp + other.x_exp,
            y_exp: self.y_exp + other.y_exp,
            zeros: self.zeros.iter().chain(&other.zeros).copied().collect(),
            poles: self.poles.iter().chain(&other.poles).copied().collect(),
        };
        out.normalize();
        out
    }

    pub fn inverse(&self, f: &GaloisField) -> FactoredFunction {
        FactoredFunction {
            coeff: f.mul_inv(self.coeff).expect("coefficient is nonzero"),
            x_exp: -self.x_exp,
            y_exp: -self.y_exp,
            zeros: self.poles.clone(),
            poles: self.zeros.clone(),
        }
    }

    pub fn evaluate(&self, curve: &HermitianCurve, p: &CurvePoint) -> Result<FieldElement> {
        let (x, y) = p.coords().ok_or(Error::EvaluationAtInfinity)?;
        self.evaluate_at(curve.tower().field(), x, y)
    }

    pub fn evaluate_at(&self, f: &GaloisField, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        let mut num = f.mul(self.coeff, self.zeros.iter().fold(FieldElement::ONE, |acc, &a| {
            f.mul(acc, f.sub(x, a))
        }));
        let mut den = self
            .poles
            .iter()
            .fold(FieldElement::ONE, |acc, &b| f.mul(acc, f.sub(x, b)));
        for (base, e) in [(x, self.x_exp), (y, self.y_exp)] {
            if e >= 0 {
                num = f.mul(num, f.pow(base, e as u64));
            } else {
                den = f.mul(den, f.pow(base, e.unsigned_abs() as u64));
            }
        }
        if den.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        f.div(num, den)
    }

    pub fn evaluate_all(&self, curve: &HermitianCurve, points: &[CurvePoint]) -> Result<Vec<FieldElement>> {
        points.iter().map(|p| self.evaluate(curve, p)).collect()
    }

    /// From `v(x) = -q`, `v(y) = -(q+1)` and `v(x - a) = -q`.
    pub fn valuation_at_infinity(&self, q: u32) -> i64 {
        let q = q as i64;
        -(self.x_exp as i64) * q - (self.y_exp as i64) * (q + 1) - q * self.zeros.len() as i64
            + q * self.poles.len() as i64
    }

    /// `x` is a local parameter at `P_0`, `v(y) = q + 1`, and `x - a` is a unit for `a != 0`.
    pub fn valuation_at_origin(&self, q: u32) -> i64 {
        self.x_exp as i64 + self.y_exp as i64 * (q as i64 + 1)
    }

    pub fn principal_divisor(&self, curve: &HermitianCurve) -> Divisor {
        let q = curve.q() as i64;
        let mut d = Divisor::zero();
        d.add_at(CurvePoint::Infinity, self.valuation_at_infinity(curve.q()));
        // y vanishes only at P_0, to order q + 1
        d.add_at(CurvePoint::origin(), self.y_exp as i64 * (q + 1));
        for p in curve.fiber_points(FieldElement::ZERO) {
            d.add_at(p, self.x_exp as i64);
        }
        for &a in &self.zeros {
            for p in curve.fiber_points(a) {
                d.add_at(p, 1);
            }
        }
        for &b in &self.poles {
            for p in curve.fiber_points(b) {
                d.add_at(p, -1);
            }
        }
        d
    }

    pub fn to_curve_function(&self, curve: &HermitianCurve) -> CurveFunction {
        let f = curve.tower().field();
        let mut num = BiPoly::monomial(
            self.coeff,
            self.x_exp.max(0) as u32,
            self.y_exp.max(0) as u32,
        );
        let mut den = BiPoly::monomial(
            FieldElement::ONE,
            (-self.x_exp).max(0) as u32,
            (-self.y_exp).max(0) as u32,
        );
        for &a in &self.zeros {
            num = num.mul(f, &BiPoly::linear_x(f, a));
        }
        for &b in &self.poles {
            den = den.mul(f, &BiPoly::linear_x(f, b));
        }
        CurveFunction::new(curve, num, den).expect("denominator is a nonzero product")
    }

    fn side_text(f: &GaloisField, coeff: Option<FieldElement>, x: i32, y: i32, lin: &[FieldElement]) -> String {
        let mut parts = Vec::new();
        if let Some(c) = coeff.filter(|&c| c != FieldElement::ONE) {
            parts.push(f.format(c));
        }
        if x > 0 {
            parts.push(format!("x^{x}"));
        }
        if y > 0 {
            parts.push(format!("y^{y}"));
        }
        parts.extend(lin.iter().map(|&a| format!("(x-{})", f.format(a))));
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn numerator_text(&self, f: &GaloisField) -> String {
        Self::side_text(f, Some(self.coeff), self.x_exp, self.y_exp, &self.zeros)
    }

    pub fn denominator_text(&self, f: &GaloisField) -> String {
        Self::side_text(f, None, -self.x_exp, -self.y_exp, &self.poles)
    }
}
