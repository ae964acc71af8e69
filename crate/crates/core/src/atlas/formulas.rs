use super::{Convention, Family, RateRecord};
use crate::scheme::default_m;

/// Genus 0: `L = floor((q - (X+T)) / 2)`, `N = L + X + T`.
pub fn rational_max_rate(field_order: u64, x: u32, t: u32) -> RateRecord {
    let xt = (x + t) as i64;
    let l = (field_order as i64 - xt).div_euclid(2);
    RateRecord::new(Family::Rational, field_order, x, t, None, l, l + xt)
        .infeasible_if(l < 1, || format!("L = {l} < 1"))
}

/// Genus 1 from an elliptic curve with `count` points and `gamma` roots:
/// `L = 2 floor((#E - (X+T+gamma+9)) / 4) - 1`, `N = L + X + T + 8`.
pub fn elliptic_case_b_rate(field_order: u64, count: u64, gamma: u32, x: u32, t: u32) -> RateRecord {
    let xt = (x + t) as i64;
    let j = (count as i64 - (xt + gamma as i64 + 9)).div_euclid(4);
    let l = 2 * j - 1;
    RateRecord::new(Family::Elliptic, field_order, x, t, Some(j), l, l + xt + 8)
        .with(Convention::GammaActual)
        .infeasible_if(l < 1, || format!("L = {l} < 1"))
}

/// Largest `J` for a genus-`g` hyperelliptic curve with `count` rational points and
/// `gamma` rational roots of `f`; `L = 2J - g`, `N = L + X + T + 6g + 2`.
pub fn hyperelliptic_jmax(field_order: u64, g: u32, count: u64, gamma: u32, x: u32, t: u32) -> RateRecord {
    let q = field_order as i64;
    let g_ = g as i64;
    let xt = (x + t) as i64;
    let c = count as i64;
    let gm = gamma as i64;
    let j = if 2 * c >= 2 * q + 6 * g_ + xt + 4 {
        (2 * q - (xt + 6 * g_ + 2 * gm + 2)).div_euclid(4)
    } else {
        (c - (xt + 6 * g_ + 3 + gm)).div_euclid(2)
    };
    let l = 2 * j - g_;
    RateRecord::new(Family::Hyperelliptic { g }, field_order, x, t, Some(j), l, l + xt + 6 * g_ + 2)
        .infeasible_if(j < g_, || format!("J = {j} < g = {g}"))
}

/// The `gamma = 0` bound `J <= floor((2q - (X+T+6g+2)) / 4)`.
pub fn hyperelliptic_jmax_upper(field_order: u64, g: u32, x: u32, t: u32) -> RateRecord {
    let q = field_order as i64;
    let g_ = g as i64;
    let xt = (x + t) as i64;
    let j = (2 * q - (xt + 6 * g_ + 2)).div_euclid(4);
    let l = 2 * j - g_;
    RateRecord::new(Family::Hyperelliptic { g }, field_order, x, t, Some(j), l, l + xt + 6 * g_ + 2)
        .with(Convention::GammaZero)
        .infeasible_if(j < g_, || format!("J = {j} < g = {g}"))
}

/// Hermitian curve over `F_{q^2}` at the maximizing `m`.
pub fn hermitian_max_rate(q: u32, x: u32, t: u32, convention: Convention) -> RateRecord {
    let qi = q as i64;
    let g = qi * (qi - 1) / 2;
    let m = default_m(q, x, t);
    let l = m * qi - g;
    let xt = (x + t) as i64;
    let n = match convention {
        Convention::TableDegN => l + xt + (7 * qi * qi - 3 * qi - 6) / 2,
        _ => l + xt + 3 * qi * qi - qi - 2,
    };
    let conv = match convention {
        Convention::TableDegN => Convention::TableDegN,
        _ => Convention::TheoremN,
    };
    RateRecord::new(Family::Hermitian, (q * q) as u64, x, t, Some(m), l, n)
        .with(conv)
        .infeasible_if(m < qi - 1, || format!("m = {m} < q - 1 = {}", qi - 1))
}
