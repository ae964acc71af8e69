use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::instance::{in_column_space, SchemeInstance};
use crate::codes::{EvalCode, IndependenceMode, IndependenceReport};
use crate::error::Result;

const SAMPLED_SUBSETS: usize = 2000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeCertificate {
    pub degree: i64,
    pub dual_distance_bound: i64,
    pub required: i64,
    pub independence: Vec<IndependenceReport>,
}

impl CodeCertificate {
    pub fn passes(&self) -> bool {
        self.dual_distance_bound >= self.required && self.independence.iter().all(|r| r.holds)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificationReport {
    pub q: u32,
    pub x: u32,
    pub t: u32,
    pub l: u32,
    pub n: u32,
    pub rate: f64,
    pub noise_columns: usize,
    pub noise_count_expected: i64,
    pub noise_fallback: bool,
    /// rank of `[B_info | B_noise]` at the servers; should be `N - g`
    pub rank: usize,
    pub rank_target: usize,
    /// `rank(B_info) + rank(B_noise) == rank([B_info | B_noise])`
    pub rank_additive: bool,
    /// encoding x privacy, security x query, security x privacy
    pub noise_containment: [bool; 3],
    pub security: Vec<CodeCertificate>,
    pub privacy: CodeCertificate,
}

impl CertificationReport {
    pub fn passes(&self) -> bool {
        self.rank == self.rank_target
            && self.rank_additive
            && self.noise_containment.iter().all(|&b| b)
            && self.security.iter().all(|c| c.passes())
            && self.privacy.passes()
    }
}

fn independence_suite(code: &EvalCode, f: &crate::gf::GaloisField, w_max: usize, seed: u64) -> Result<Vec<IndependenceReport>> {
    (1..=w_max)
        .map(|w| {
            let mode = if w <= 2 {
                IndependenceMode::Exhaustive
            } else {
                IndependenceMode::Sampled {
                    count: SAMPLED_SUBSETS,
                    seed: seed + w as u64,
                }
            };
            code.check_w_wise_independence(f, w, mode)
        })
        .collect()
}

/// Checks, with `samples` draws per family, that the three product families land in
/// the column space of the noise matrix.
pub fn noise_containment(inst: &SchemeInstance, samples: usize, seed: u64) -> Result<[bool; 3]> {
    let f = inst.field();
    let sampler = inst.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = [false; 3];
    for (fam, slot) in out.iter_mut().enumerate() {
        let vs: Vec<_> = (0..samples).map(|_| sampler.sample(fam, &mut rng)).collect();
        *slot = in_column_space(f, &inst.b_noise, &vs)?;
    }
    Ok(out)
}

pub fn certify_instance(inst: &SchemeInstance, seed: u64) -> Result<CertificationReport> {
    let p = &inst.params;
    let f = inst.field();
    let pts = &inst.server_points;
    let rank_info = inst.b_info.rank(f);
    let rank_noise = inst.b_noise.rank(f);
    let rank = inst.decoding_matrix().rank(f);

    let mut security = Vec::with_capacity(p.l as usize);
    for l in 0..p.l as usize {
        let code = EvalCode::generator_matrix(&inst.curve, &inst.sec_functions(l), pts, p.sec_degree())?;
        security.push(CodeCertificate {
            degree: code.deg_g,
            dual_distance_bound: code.dual_distance_bound(),
            required: p.x as i64 + 1,
            independence: independence_suite(&code, f, p.x as usize, seed)?,
        });
    }
    let code = EvalCode::generator_matrix(&inst.curve, &inst.priv_functions(), pts, p.priv_degree())?;
    let privacy = CodeCertificate {
        degree: code.deg_g,
        dual_distance_bound: code.dual_distance_bound(),
        required: p.t as i64 + 1,
        independence: independence_suite(&code, f, p.t as usize, seed)?,
    };

    Ok(CertificationReport {
        q: p.q,
        x: p.x,
        t: p.t,
        l: p.l,
        n: p.n,
        rate: p.l as f64 / p.n as f64,
        noise_columns: inst.b_noise.cols(),
        noise_count_expected: p.noise_a() + p.noise_b() - p.genus as i64 + 1,
        noise_fallback: inst.uses_fallback(),
        rank,
        rank_target: (p.n - p.genus) as usize,
        rank_additive: rank_info + rank_noise == rank,
        noise_containment: noise_containment(inst, 100, seed)?,
        security,
        privacy,
    })
}
