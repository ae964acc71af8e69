use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::params::SchemeParams;
use crate::error::{Error, Result};
use crate::gf::{FieldElement, GaloisField};
use crate::hermitian::{
    info_basis, one_point_basis, two_point_monomial_set, CurvePoint, FactoredFunction,
    HermitianCurve, MonomialIndex,
};
use crate::linalg::{select_full_rank_rows, Matrix};

/// Seed for the span test that decides whether the monomial noise family suffices.
const SPAN_TEST_SEED: u64 = 0x5eed_0001;
const SPAN_TEST_SAMPLES: usize = 100;

/// A frozen deployment: points, bases and their evaluations at the servers.
#[derive(Clone, Debug)]
pub struct SchemeInstance {
    pub params: SchemeParams,
    pub curve: HermitianCurve,
    pub alphas: Vec<FieldElement>,
    pub data_points: Vec<CurvePoint>,
    pub server_points: Vec<CurvePoint>,
    /// `h_1 .. h_L`
    pub info_funcs: Vec<FactoredFunction>,
    pub noise_monomials: Vec<MonomialIndex>,
    /// extra spanning columns appended when the monomial family fails the span test
    pub noise_fallback: Vec<FactoredFunction>,
    pub sec_monomials: Vec<MonomialIndex>,
    pub priv_monomials: Vec<MonomialIndex>,
    /// N x L
    pub b_info: Matrix,
    /// N x (noise columns)
    pub b_noise: Matrix,
    /// per l: N x (X + g)
    pub sec_basis: Vec<Matrix>,
    /// N x (T + g)
    pub priv_basis: Matrix,
}

fn eval_columns(curve: &HermitianCurve, funcs: &[FactoredFunction], pts: &[CurvePoint]) -> Result<Matrix> {
    let mut m = Matrix::zeros(pts.len(), funcs.len());
    for (c, func) in funcs.iter().enumerate() {
        for (r, p) in pts.iter().enumerate() {
            m[(r, c)] = func.evaluate(curve, p)?;
        }
    }
    Ok(m)
}

fn monomial_funcs(monos: &[MonomialIndex]) -> Vec<FactoredFunction> {
    monos.iter().map(|m| m.to_function()).collect()
}

fn random_vec<R: rand::Rng>(f: &GaloisField, len: usize, rng: &mut R) -> Vec<FieldElement> {
    (0..len).map(|_| f.sample_uniform(rng)).collect()
}

fn hadamard(f: &GaloisField, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    a.iter().zip(b).map(|(&x, &y)| f.mul(x, y)).collect()
}

/// Samples from the three product families the noise space has to absorb,
/// evaluated at the rows of the given bases.
pub(crate) struct ProductSampler<'a> {
    pub f: &'a GaloisField,
    pub info: &'a Matrix,
    pub sec: &'a [Matrix],
    pub priv_: &'a Matrix,
}

impl ProductSampler<'_> {
    /// `family` 0: encoding x privacy, 1: security x query, 2: security x privacy.
    pub fn sample<R: rand::Rng>(&self, family: usize, rng: &mut R) -> Vec<FieldElement> {
        let f = self.f;
        let l = rng.random_range(0..self.sec.len());
        let r = random_vec(f, self.priv_.cols(), rng);
        let priv_eval = self.priv_.mul_vec(f, &r).expect("shape");
        let c = random_vec(f, self.sec[l].cols(), rng);
        let sec_eval = self.sec[l].mul_vec(f, &c).expect("shape");
        match family {
            0 => {
                let s = f.sample_uniform(rng);
                priv_eval.iter().map(|&v| f.mul(s, v)).collect()
            }
            1 => {
                let s = f.sample_uniform(rng);
                let h = self.info.column(l);
                hadamard(f, &sec_eval, &h).into_iter().map(|v| f.mul(s, v)).collect()
            }
            _ => hadamard(f, &sec_eval, &priv_eval),
        }
    }
}

/// Whether appending the sample vectors to `base` keeps its rank.
pub(crate) fn in_column_space(f: &GaloisField, base: &Matrix, samples: &[Vec<FieldElement>]) -> Result<bool> {
    let r0 = base.rank(f);
    let extra = Matrix::from_columns(samples)?;
    Ok(base.hstack(&extra)?.rank(f) == r0)
}

impl SchemeInstance {
    pub fn build(params: SchemeParams) -> Result<Self> {
        let curve = HermitianCurve::new(params.q as u64)?;
        let q = params.q;
        let f = curve.tower().field().clone();
        let alphas = curve.tower().first_nonzero(params.m as usize);
        let data_points: Vec<CurvePoint> = alphas.iter().flat_map(|&a| curve.fiber_points(a)).collect();
        let pool: Vec<CurvePoint> = curve
            .affine_points()
            .into_iter()
            .filter(|p| !p.is_origin() && !p.x().is_some_and(|x| alphas.contains(&x)))
            .collect();

        let info_funcs: Vec<FactoredFunction> = info_basis(&curve, params.m, &alphas)?
            .into_iter()
            .map(|e| e.func)
            .collect();
        let noise_set = two_point_monomial_set(q, params.noise_a(), params.noise_b());
        let sec_monomials = one_point_basis(params.sec_degree(), q);
        let priv_monomials = one_point_basis(params.priv_degree(), q);

        let sec_funcs_for = |h: &FactoredFunction| -> Vec<FactoredFunction> {
            let inv = h.inverse(&f);
            sec_monomials.iter().map(|m| inv.mul(&f, &m.to_function())).collect()
        };

        let pool_info = eval_columns(&curve, &info_funcs, &pool)?;
        let pool_priv = eval_columns(&curve, &monomial_funcs(&priv_monomials), &pool)?;
        let pool_sec: Vec<Matrix> = info_funcs
            .iter()
            .map(|h| eval_columns(&curve, &sec_funcs_for(h), &pool))
            .collect::<Result<_>>()?;
        let mut pool_noise = eval_columns(&curve, &monomial_funcs(&noise_set.monomials), &pool)?;

        let sampler = ProductSampler {
            f: &f,
            info: &pool_info,
            sec: &pool_sec,
            priv_: &pool_priv,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(SPAN_TEST_SEED);
        let samples: Vec<Vec<FieldElement>> = (0..3)
            .flat_map(|fam| (0..SPAN_TEST_SAMPLES).map(move |_| fam))
            .map(|fam| sampler.sample(fam, &mut rng))
            .collect();
        let mut noise_fallback = Vec::new();
        if !noise_set.count_matches || !in_column_space(&f, &pool_noise, &samples)? {
            noise_fallback = fallback_spanning_set(&f, &params, &info_funcs, &sec_funcs_for);
            let extra = eval_columns(&curve, &noise_fallback, &pool)?;
            pool_noise = pool_noise.hstack(&extra)?;
        }

        let target = (params.n - params.genus) as usize;
        let full = pool_info.hstack(&pool_noise)?;
        let rows = select_full_rank_rows(&f, &full, target, params.n as usize).map_err(|e| match e {
            Error::InsufficientRank { .. } => Error::Internal(format!("server pool cannot supply rank {target}: {e}")),
            other => other,
        })?;
        let server_points: Vec<CurvePoint> = rows.iter().map(|&r| pool[r]).collect();
        Ok(SchemeInstance {
            b_info: pool_info.select_rows(&rows),
            b_noise: pool_noise.select_rows(&rows),
            sec_basis: pool_sec.iter().map(|m| m.select_rows(&rows)).collect(),
            priv_basis: pool_priv.select_rows(&rows),
            params,
            curve,
            alphas,
            data_points,
            server_points,
            info_funcs,
            noise_monomials: noise_set.monomials,
            noise_fallback,
            sec_monomials,
            priv_monomials,
        })
    }

    pub fn field(&self) -> &GaloisField {
        self.curve.tower().field()
    }

    /// `[B_info | B_noise]`
    pub fn decoding_matrix(&self) -> Matrix {
        self.b_info.hstack(&self.b_noise).expect("same row count")
    }

    pub fn uses_fallback(&self) -> bool {
        !self.noise_fallback.is_empty()
    }

    pub fn sec_functions(&self, l: usize) -> Vec<FactoredFunction> {
        let f = self.field();
        let inv = self.info_funcs[l].inverse(f);
        self.sec_monomials.iter().map(|m| inv.mul(f, &m.to_function())).collect()
    }

    pub fn priv_functions(&self) -> Vec<FactoredFunction> {
        monomial_funcs(&self.priv_monomials)
    }

    pub(crate) fn sampler(&self) -> ProductSampler<'_> {
        ProductSampler {
            f: self.field(),
            info: &self.b_info,
            sec: &self.sec_basis,
            priv_: &self.priv_basis,
        }
    }

    pub fn manifest(&self) -> Manifest {
        let t = self.curve.tower();
        let pt = |p: &CurvePoint| {
            let (x, y) = p.coords().expect("affine");
            [t.format(x), t.format(y)]
        };
        Manifest {
            params: self.params.clone(),
            modulus: t.modulus().to_vec(),
            alphas: self.alphas.iter().map(|&a| t.format(a)).collect(),
            data_points: self.data_points.iter().map(pt).collect(),
            server_points: self.server_points.iter().map(pt).collect(),
            noise_columns: self.b_noise.cols(),
            noise_fallback: self.uses_fallback(),
            span_test_seed: SPAN_TEST_SEED,
        }
    }
}

/// `h_l^-1 * L(sec) * L(priv)` over all `l`, plus `L(max(X,T) + 2g - 1)`.
fn fallback_spanning_set(
    f: &GaloisField,
    params: &SchemeParams,
    info: &[FactoredFunction],
    sec_funcs_for: &dyn Fn(&FactoredFunction) -> Vec<FactoredFunction>,
) -> Vec<FactoredFunction> {
    let q = params.q;
    let priv_funcs = monomial_funcs(&one_point_basis(params.priv_degree(), q));
    let mut out = Vec::new();
    for h in info {
        for s in sec_funcs_for(h) {
            for p in &priv_funcs {
                out.push(s.mul(f, p));
            }
        }
    }
    let top = params.sec_degree().max(params.priv_degree());
    out.extend(monomial_funcs(&one_point_basis(top, q)));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub params: SchemeParams,
    pub modulus: Vec<u32>,
    pub alphas: Vec<String>,
    pub data_points: Vec<[String; 2]>,
    pub server_points: Vec<[String; 2]>,
    pub noise_columns: usize,
    pub noise_fallback: bool,
    pub span_test_seed: u64,
}
