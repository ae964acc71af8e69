//! Finite field arithmetic for `F_{p^n}` and the tower `F_p ⊂ F_q ⊂ F_{q^2}`.
//!
//! Elements are stored as their integer encoding `c_0 + c_1 p + ... + c_{n-1} p^{n-1}`
//! where `c_i` are the coordinates over `F_p` in the polynomial basis of the
//! defining modulus. The encoding doubles as the canonical enumeration order,
//! so element `0` is always the additive identity and `1` the multiplicative one.
//!
//! Multiplication goes through discrete log tables built once at construction;
//! addition uses a full table for small fields and digit-wise arithmetic otherwise.

use std::fmt;
use std::ops::Deref;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// Fields up to this order get a precomputed addition table.
const ADD_TABLE_LIMIT: u32 = 1024;

/// An element of some [`GaloisField`], identified by its integer encoding.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a raw encoding. The caller is responsible for `index < order`.
    pub const fn from_index(index: u32) -> Self {
        FieldElement(index)
    }

    pub const fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The finite field `F_{p^n}` with a fixed defining polynomial.
#[derive(Clone)]
pub struct GaloisField {
    p: u32,
    n: u32,
    order: u32,
    /// Monic modulus, little-endian, length `n + 1`.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaloisField")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `order` as `p^n`, if it is a prime power.
pub fn prime_power(order: u64) -> Option<(u32, u32)> {
    if order < 2 {
        return None;
    }
    let p = (2..=order).find(|d| order.is_multiple_of(*d))?;
    let mut rest = order;
    let mut n = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        n += 1;
    }
    (rest == 1).then_some((p as u32, n))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomial helpers over F_p, little-endian, used only while building tables.

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut result = 1;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = r[r.len() - 1] * lead_inv % p;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_rem(&out, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `x^(p^k) mod m`, by repeated p-th powering.
fn frobenius_power_of_x(k: u32, m: &[u64], p: u64) -> Vec<u64> {
    let mut cur = poly_rem(&[0, 1], m, p);
    for _ in 0..k {
        let base = cur.clone();
        let mut acc = vec![1u64];
        let mut sq = base;
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &sq, m, p);
            }
            sq = poly_mulmod(&sq, &sq, m, p);
            e >>= 1;
        }
        cur = acc;
    }
    cur
}

/// Rabin's irreducibility test.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let n = (m.len() - 1) as u32;
    if n == 1 {
        return true;
    }
    let mut xpn = frobenius_power_of_x(n, m, p);
    let mut x = vec![0u64, 1];
    trim(&mut xpn);
    let x_red = poly_rem(&x, m, p);
    if xpn != x_red {
        return false;
    }
    for r in prime_factors(n as u64) {
        let k = n / r as u32;
        let mut t = frobenius_power_of_x(k, m, p);
        t.resize(t.len().max(2), 0);
        t[1] = (t[1] + p - 1) % p;
        trim(&mut t);
        if t.is_empty() {
            return false;
        }
        let g = poly_gcd(m, &t, p);
        if g.len() != 1 {
            return false;
        }
    }
    x.clear();
    true
}

impl GaloisField {
    /// Builds `F_{p^n}` with the lexicographically smallest irreducible monic modulus.
    ///
    /// Candidates are ordered by the integer encoding of their non-leading
    /// coefficients, so the choice is stable across runs and platforms.
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("extension degree must be positive".into()));
        }
        let order = (p as u128).checked_pow(n).filter(|&o| o <= MAX_FIELD_ORDER as u128);
        let order = match order {
            Some(o) => o as u32,
            None => return Err(Error::FieldTooLarge { p, n }),
        };
        let modulus = if n == 1 {
            vec![0, 1]
        } else {
            let mut found = None;
            for code in 0..order as u64 {
                let mut m: Vec<u64> = (0..n).map(|i| code / p.pow(i) % p).collect();
                if m[0] == 0 {
                    continue;
                }
                m.push(1);
                if is_irreducible(&m, p) {
                    found = Some(m);
                    break;
                }
            }
            found.ok_or(Error::NoIrreducible { p, n })?
        };
        Ok(Self::with_modulus(p as u32, n, order, modulus))
    }

    /// The field of the given prime-power order.
    pub fn of_order(order: u64) -> Result<Self> {
        let (p, n) = prime_power(order).ok_or(Error::InvalidParameter(format!(
            "{order} is not a prime power"
        )))?;
        Self::new(p as u64, n)
    }

    fn with_modulus(p: u32, n: u32, order: u32, modulus: Vec<u64>) -> Self {
        let pp = p as u64;
        let to_poly = |mut e: u32| -> Vec<u64> {
            let mut v = Vec::with_capacity(n as usize);
            for _ in 0..n {
                v.push((e % p) as u64);
                e /= p;
            }
            trim(&mut v);
            v
        };
        let from_poly = |v: &[u64]| -> u32 {
            v.iter().rev().fold(0u32, |acc, &c| acc * p + c as u32)
        };
        let group = (order - 1) as u64;
        let factors = prime_factors(group);
        let pow_poly = |base: &[u64], mut e: u64| -> Vec<u64> {
            let mut acc = vec![1u64];
            let mut b = base.to_vec();
            while e > 0 {
                if e & 1 == 1 {
                    acc = poly_mulmod(&acc, &b, &modulus, pp);
                }
                b = poly_mulmod(&b, &b, &modulus, pp);
                e >>= 1;
            }
            acc
        };
        // smallest primitive element
        let generator = (1..order)
            .map(to_poly)
            .find(|g| {
                order == 2 || factors.iter().all(|&r| pow_poly(g, group / r) != vec![1u64])
            })
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; 2 * group as usize];
        let mut log = vec![0u32; order as usize];
        let mut cur = vec![1u64];
        for k in 0..group as usize {
            let e = from_poly(&cur);
            exp[k] = e;
            exp[k + group as usize] = e;
            log[e as usize] = k as u32;
            cur = poly_mulmod(&cur, &generator, &modulus, pp);
        }
        let digit_neg = |a: u32| -> u32 {
            let mut out = 0;
            let mut scale = 1;
            let mut a = a;
            for _ in 0..n {
                let d = a % p;
                out += ((p - d) % p) * scale;
                scale *= p;
                a /= p;
            }
            out
        };
        let neg = (0..order).map(digit_neg).collect();
        let mut field = GaloisField {
            p,
            n,
            order,
            modulus: modulus.iter().map(|&c| c as u32).collect(),
            exp,
            log,
            neg,
            add: None,
        };
        if order <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; (order * order) as usize];
            for a in 0..order {
                for b in 0..order {
                    table[(a * order + b) as usize] = field.add_digits(a, b);
                }
            }
            field.add = Some(table);
        }
        field
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficients of the monic modulus, little-endian.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        if self.n == 1 {
            return (a + b) % self.p;
        }
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.n {
            out += ((a % self.p + b % self.p) % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.add {
            Some(t) => FieldElement(t[(a.0 * self.order + b.0) as usize]),
            None => FieldElement(self.add_digits(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let k = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElement(self.exp[k as usize])
    }

    pub fn mul_inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let group = self.order - 1;
        let k = (group - self.log[a.0 as usize]) % group;
        Ok(FieldElement(self.exp[k as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.mul_inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let group = (self.order - 1) as u64;
        let k = (self.log[a.0 as usize] as u64 * (e % group)) % group;
        FieldElement(self.exp[k as usize])
    }

    /// Signed power; negative exponents invert first.
    pub fn pow_signed(&self, a: FieldElement, e: i64) -> Result<FieldElement> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.mul_inv(a)?, e.unsigned_abs()))
        }
    }

    /// Discrete log with respect to the table generator; `None` for zero.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.0 as usize])
    }

    /// Whether `a` is a nonzero square.
    pub fn is_square(&self, a: FieldElement) -> bool {
        if a.is_zero() {
            return false;
        }
        self.p == 2 || self.log[a.0 as usize].is_multiple_of(2)
    }

    /// Image of an integer under `Z -> F_p ⊂ F_{p^n}`.
    pub fn from_int(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.p as i64) as u32)
    }

    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index < self.order {
            Ok(FieldElement(index))
        } else {
            Err(Error::InvalidParameter(format!(
                "element index {index} out of range for field of order {}",
                self.order
            )))
        }
    }

    /// Coordinates over `F_p`, little-endian.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let mut v = a.0;
        (0..self.n)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.n as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients below {}",
                self.n, self.p
            )));
        }
        Ok(FieldElement(
            coeffs.iter().rev().fold(0u32, |acc, &c| acc * self.p + c),
        ))
    }

    /// Debug form `[c0,c1,...]`.
    pub fn format(&self, a: FieldElement) -> String {
        let parts: Vec<String> = self.coeffs(a).iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(FieldElement)
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.random_range(0..self.order))
    }

    pub fn sample_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.random_range(1..self.order))
    }

    pub fn sum<I: IntoIterator<Item = FieldElement>>(&self, items: I) -> FieldElement {
        items
            .into_iter()
            .fold(FieldElement::ZERO, |acc, x| self.add(acc, x))
    }

    pub fn dot(&self, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
        a.iter()
            .zip(b)
            .fold(FieldElement::ZERO, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }
}

/// `F_{q^2}` together with its subfield `F_q`, `q = p^h`.
#[derive(Clone, Debug)]
pub struct FieldTower {
    field: GaloisField,
    h: u32,
    q: u32,
}

impl Deref for FieldTower {
    type Target = GaloisField;

    fn deref(&self) -> &GaloisField {
        &self.field
    }
}

impl FieldTower {
    pub fn new(p: u64, h: u32) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidParameter("h must be positive".into()));
        }
        let field = GaloisField::new(p, 2 * h)?;
        let q = (p as u32).pow(h);
        Ok(FieldTower { field, h, q })
    }

    /// Tower for a prime-power `q`.
    pub fn for_q(q: u64) -> Result<Self> {
        let (p, h) = prime_power(q).ok_or_else(|| {
            if q >= 2 {
                Error::NotPrime(q)
            } else {
                Error::InvalidParameter(format!("q = {q} is not a prime power"))
            }
        })?;
        Self::new(p as u64, h)
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    /// Order of the distinguished subfield.
    pub fn q(&self) -> u32 {
        self.q
    }

    /// `a^(q+1)`, the norm down to `F_q`.
    pub fn subfield_norm(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.q as u64 + 1)
    }

    /// `a^q + a`, the trace down to `F_q`.
    pub fn subfield_trace(&self, a: FieldElement) -> FieldElement {
        self.add(self.pow(a, self.q as u64), a)
    }

    pub fn in_subfield(&self, a: FieldElement) -> bool {
        self.pow(a, self.q as u64) == a
    }

    pub fn subfield_elements(&self) -> Vec<FieldElement> {
        self.elements().filter(|&a| self.in_subfield(a)).collect()
    }

    /// First `count` nonzero elements in enumeration order.
    pub fn first_nonzero(&self, count: usize) -> Vec<FieldElement> {
        self.elements().skip(1).take(count).collect()
    }
}
