//! Property suites behind `hermpir verify`: each returns named pass/fail checks.

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::codes::{EvalCode, IndependenceMode};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldTower, GaloisField};
use crate::hermitian::{
    interpolation_basis, one_point_basis, two_point_monomial_set, CurvePoint, HermitianCurve,
};
use crate::linalg::Matrix;
use crate::scheme::{certify_instance, make_queries, noise_containment, SchemeInstance, SchemeParams};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Fields,
    Bases,
    Noise,
    Privacy,
    Security,
    Codes,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Fields,
        Suite::Bases,
        Suite::Noise,
        Suite::Privacy,
        Suite::Security,
        Suite::Codes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Fields => "fields",
            Suite::Bases => "bases",
            Suite::Noise => "noise",
            Suite::Privacy => "privacy",
            Suite::Security => "security",
            Suite::Codes => "codes",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Pearson statistic of `counts` against the uniform distribution.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}

/// Upper `level` quantile of the chi-square distribution.
pub fn chi_square_critical(dof: usize, level: f64) -> f64 {
    ChiSquared::new(dof as f64).expect("positive dof").inverse_cdf(level)
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<Check>> {
    match suite {
        Suite::Fields => fields(seed),
        Suite::Bases => bases(),
        Suite::Noise => noise(seed),
        Suite::Privacy => privacy(seed),
        Suite::Security => security(seed),
        Suite::Codes => codes(),
    }
}

fn fields(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for q in [2u64, 3, 4, 5, 7, 9] {
        let t = FieldTower::for_q(q)?;
        let f: &GaloisField = &t;
        let els: Vec<FieldElement> = f.elements().collect();
        let mut ok = els.len() as u64 == q * q;
        for &a in &els {
            ok &= f.add(a, f.neg(a)).is_zero();
            if !a.is_zero() {
                ok &= f.mul(a, f.mul_inv(a)?) == FieldElement::ONE;
            }
            for &b in &els {
                ok &= f.mul(a, b) == f.mul(b, a) && f.add(a, b) == f.add(b, a);
            }
        }
        // distributivity on a stride through the triples
        for (k, &a) in els.iter().enumerate().step_by(3) {
            for &b in els.iter().skip(k % 5).step_by(2) {
                for &c in els.iter().step_by(7) {
                    ok &= f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
                }
            }
        }
        let sub = els.iter().filter(|&&a| f.pow(a, q) == a).count() as u64;
        ok &= sub == q;
        let norms_ok = els
            .iter()
            .all(|&a| {
                let n = t.subfield_norm(a);
                f.pow(n, q) == n
            });
        out.push(Check::new(
            format!("field axioms over F_{}", q * q),
            ok && norms_ok,
            format!("{} elements, subfield of size {sub}", els.len()),
        ));
    }
    let f = GaloisField::of_order(25)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; 25];
    for _ in 0..100_000 {
        counts[f.coeffs(f.sample_uniform(&mut rng)).iter().rev().fold(0usize, |acc, &c| acc * 5 + c as usize)] += 1;
    }
    let stat = chi_square_uniform(&counts);
    let crit = chi_square_critical(24, 0.999);
    out.push(Check::new(
        "uniform sampling in F_25",
        stat < crit,
        format!("chi2 = {stat:.2} over 1e5 draws, 0.999 quantile {crit:.2}"),
    ));
    Ok(out)
}

pub const BASIS_CASES: [(u32, u32); 7] = [(3, 2), (3, 3), (4, 3), (4, 4), (5, 3), (5, 5), (5, 7)];

fn bases() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (q, m) in BASIS_CASES {
        let c = HermitianCurve::new(q as u64)?;
        let f = c.tower().field();
        let alphas = c.tower().first_nonzero(m as usize);
        let b = interpolation_basis(&c, m, &alphas)?;
        let pts: Vec<CurvePoint> = alphas.iter().flat_map(|&a| c.fiber_points(a)).collect();
        let rows = pts
            .iter()
            .map(|p| b.iter().map(|e| e.func.evaluate(&c, p)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let rank = Matrix::from_rows(rows)?.rank(f);
        let l = (m * q) as i64 - (q * (q - 1) / 2) as i64;
        let vals_ok = b.iter().all(|e| {
            e.func.valuation_at_infinity(q) == -((m * q) as i64 - 1) + q as i64 - e.z as i64
        });
        out.push(Check::new(
            format!("interpolation family q={q} m={m}"),
            b.len() as i64 == l && rank as i64 == l && vals_ok,
            format!("size {}, rank {rank}, L = {l}, valuations {}", b.len(), if vals_ok { "ok" } else { "wrong" }),
        ));
    }
    Ok(out)
}

fn instance(x: u32, t: u32) -> Result<SchemeInstance> {
    SchemeInstance::build(SchemeParams::validate(5, x, t, None, 1)?)
}

fn noise(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (x, t) in [(1u32, 1u32), (2, 2)] {
        let inst = instance(x, t)?;
        let p = &inst.params;
        let f = inst.field();
        let set = two_point_monomial_set(p.q, p.noise_a(), p.noise_b());
        out.push(Check::new(
            format!("noise monomial count X={x} T={t}"),
            set.count_matches && set.monomials.len() == inst.b_noise.cols(),
            format!("{} monomials, expected {}", set.monomials.len(), set.expected),
        ));
        let cont = noise_containment(&inst, 100, seed)?;
        out.push(Check::new(
            format!("noise containment X={x} T={t}"),
            cont.iter().all(|&b| b),
            format!("families {cont:?}"),
        ));
        let (ri, rn, r) = (inst.b_info.rank(f), inst.b_noise.rank(f), inst.decoding_matrix().rank(f));
        out.push(Check::new(
            format!("rank additivity X={x} T={t}"),
            ri + rn == r && r == (p.n - p.genus) as usize && ri == p.l as usize,
            format!("{ri} + {rn} = {r}, target N - g = {}", p.n - p.genus),
        ));
    }
    Ok(out)
}

fn privacy(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (x, t) in [(1u32, 1u32), (2, 2)] {
        let inst = instance(x, t)?;
        let rep = certify_instance(&inst, seed)?;
        let c = &rep.privacy;
        out.push(Check::new(
            format!("privacy code X={x} T={t}"),
            c.passes(),
            format!(
                "dual bound {} (need {}), independence {:?}",
                c.dual_distance_bound,
                c.required,
                c.independence.iter().map(|r| r.holds).collect::<Vec<_>>()
            ),
        ));
    }
    // single-server marginals of the query for the desired and an undesired file
    let inst = SchemeInstance::build(SchemeParams::validate(5, 1, 1, None, 2)?)?;
    let f = inst.field();
    let order = f.order() as usize;
    let l = inst.params.l as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let crit = chi_square_critical(order - 1, 0.999);
    let server = inst.params.n as usize / 2;
    for desired in [0usize, 1] {
        let mut hit = vec![0u64; order];
        let mut miss = vec![0u64; order];
        for _ in 0..10_000 {
            let qb = make_queries(&inst, desired, &mut rng)?;
            let row = &qb.per_server[server];
            hit[index_of(f, row[desired * l])] += 1;
            miss[index_of(f, row[(1 - desired) * l])] += 1;
        }
        for (what, counts) in [("desired", &hit), ("other", &miss)] {
            let stat = chi_square_uniform(counts);
            out.push(Check::new(
                format!("query marginal, file {desired} requested, {what} slot"),
                stat < crit,
                format!("chi2 = {stat:.2} over 1e4 trials, 0.999 quantile {crit:.2}"),
            ));
        }
    }
    Ok(out)
}

fn index_of(f: &GaloisField, a: FieldElement) -> usize {
    let p = f.characteristic() as usize;
    f.coeffs(a).iter().rev().fold(0, |acc, &c| acc * p + c as usize)
}

fn security(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (x, t) in [(1u32, 1u32), (2, 2)] {
        let inst = instance(x, t)?;
        let rep = certify_instance(&inst, seed)?;
        let worst = rep.security.iter().map(|c| c.dual_distance_bound).min().unwrap_or(0);
        out.push(Check::new(
            format!("security codes X={x} T={t}"),
            rep.security.iter().all(|c| c.passes()),
            format!("{} codes, smallest dual bound {worst} (need {})", rep.security.len(), x + 1),
        ));
    }
    Ok(out)
}

fn codes() -> Result<Vec<Check>> {
    let c = HermitianCurve::new(2)?;
    let f = c.tower().field();
    let pts: Vec<CurvePoint> = c.affine_points();
    let mut out = Vec::new();
    for deg in 3..=6i64 {
        let funcs: Vec<_> = one_point_basis(deg, c.q()).iter().map(|m| m.to_function()).collect();
        let code = EvalCode::generator_matrix(&c, &funcs, &pts, deg)?;
        let d = code.min_distance_bruteforce(f)?;
        let dd = code.dual_distance_bruteforce(f)?;
        let designed = code.goppa_designed_distance()?;
        let bound = code.dual_distance_bound();
        let w = (bound - 1).max(0) as usize;
        let indep = code.check_w_wise_independence(f, w, IndependenceMode::Exhaustive)?;
        out.push(Check::new(
            format!("one-point code deg G = {deg} on {} points", pts.len()),
            d as i64 >= designed && dd as i64 >= bound && indep.holds,
            format!("d = {d} >= {designed}, dual d = {dd} >= {bound}, {w}-wise independent {}", indep.holds),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_reference_values() {
        assert!((chi_square_critical(24, 0.999) - 51.179).abs() < 1e-2);
        assert_eq!(chi_square_uniform(&[10, 10, 10]), 0.0);
        assert!((chi_square_uniform(&[20, 0]) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn codes_suite_passes() {
        assert!(run_suite(Suite::Codes, 0).unwrap().iter().all(|c| c.passed));
    }
}
