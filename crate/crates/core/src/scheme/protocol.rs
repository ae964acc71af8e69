use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::SchemeInstance;
use crate::error::{Error, Result};
use crate::gf::{FieldElement, GaloisField};
use crate::linalg::solve_prefix;

/// Test hook: `Zero` switches off the random masking.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Noise {
    Random,
    Zero,
}

/// Per server, an `M x L` grid flattened row-major (file-major).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StorageShares {
    pub files: usize,
    pub fragments: usize,
    pub per_server: Vec<Vec<FieldElement>>,
}

/// Same layout as [`StorageShares`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryBundle {
    pub files: usize,
    pub fragments: usize,
    pub per_server: Vec<Vec<FieldElement>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub desired: usize,
    pub answers: Vec<FieldElement>,
    pub recovered: Vec<FieldElement>,
    pub correct: bool,
}

fn random_coeffs<R: Rng>(f: &GaloisField, len: usize, noise: Noise, rng: &mut R) -> Vec<FieldElement> {
    match noise {
        Noise::Random => (0..len).map(|_| f.sample_uniform(rng)).collect(),
        Noise::Zero => vec![FieldElement::ZERO; len],
    }
}

pub fn random_files<R: Rng>(inst: &SchemeInstance, rng: &mut R) -> Vec<Vec<FieldElement>> {
    let f = inst.field();
    (0..inst.params.files)
        .map(|_| (0..inst.params.l).map(|_| f.sample_uniform(rng)).collect())
        .collect()
}

pub fn encode_storage<R: Rng>(
    inst: &SchemeInstance,
    files: &[Vec<FieldElement>],
    rng: &mut R,
) -> Result<StorageShares> {
    encode_storage_with(inst, files, rng, Noise::Random)
}

/// `y[mu][l](P_n) = s_{mu,l} + z_{mu,l}(P_n)` with `z` uniform in the span of the `l`-th security basis.
pub fn encode_storage_with<R: Rng>(
    inst: &SchemeInstance,
    files: &[Vec<FieldElement>],
    rng: &mut R,
    noise: Noise,
) -> Result<StorageShares> {
    let (mm, l, n) = (
        inst.params.files as usize,
        inst.params.l as usize,
        inst.params.n as usize,
    );
    if files.len() != mm || files.iter().any(|row| row.len() != l) {
        return Err(Error::DimensionMismatch(format!(
            "expected {mm} files of {l} fragments"
        )));
    }
    let f = inst.field();
    let mut per_server = vec![vec![FieldElement::ZERO; mm * l]; n];
    for (mu, file) in files.iter().enumerate() {
        for (li, &s) in file.iter().enumerate() {
            let basis = &inst.sec_basis[li];
            let c = random_coeffs(f, basis.cols(), noise, rng);
            let z = basis.mul_vec(f, &c)?;
            for (srv, zv) in per_server.iter_mut().zip(z) {
                srv[mu * l + li] = f.add(s, zv);
            }
        }
    }
    Ok(StorageShares {
        files: mm,
        fragments: l,
        per_server,
    })
}

pub fn make_queries<R: Rng>(inst: &SchemeInstance, desired: usize, rng: &mut R) -> Result<QueryBundle> {
    make_queries_with(inst, desired, rng, Noise::Random)
}

/// `g[mu][l](P_n) = [mu = desired] h_l(P_n) + r_{mu,l}(P_n)` with `r` uniform in the privacy space.
pub fn make_queries_with<R: Rng>(
    inst: &SchemeInstance,
    desired: usize,
    rng: &mut R,
    noise: Noise,
) -> Result<QueryBundle> {
    let (mm, l, n) = (
        inst.params.files as usize,
        inst.params.l as usize,
        inst.params.n as usize,
    );
    if desired >= mm {
        return Err(Error::InvalidParameter(format!(
            "file index {desired} out of range 0..{mm}"
        )));
    }
    let f = inst.field();
    let mut per_server = vec![vec![FieldElement::ZERO; mm * l]; n];
    for mu in 0..mm {
        for li in 0..l {
            let r = random_coeffs(f, inst.priv_basis.cols(), noise, rng);
            let mut g = inst.priv_basis.mul_vec(f, &r)?;
            if mu == desired {
                for (row, gv) in g.iter_mut().enumerate() {
                    *gv = f.add(*gv, inst.b_info[(row, li)]);
                }
            }
            for (srv, gv) in per_server.iter_mut().zip(g) {
                srv[mu * l + li] = gv;
            }
        }
    }
    Ok(QueryBundle {
        files: mm,
        fragments: l,
        per_server,
    })
}

/// What one server returns: the inner product of its share grid with its query grid.
pub fn server_answer(f: &GaloisField, shares: &[FieldElement], queries: &[FieldElement]) -> FieldElement {
    f.dot(shares, queries)
}

pub fn answer_all(inst: &SchemeInstance, shares: &StorageShares, queries: &QueryBundle) -> Vec<FieldElement> {
    let f = inst.field();
    shares
        .per_server
        .par_iter()
        .zip(queries.per_server.par_iter())
        .map(|(s, g)| server_answer(f, s, g))
        .collect()
}

pub fn reconstruct(inst: &SchemeInstance, answers: &[FieldElement]) -> Result<Vec<FieldElement>> {
    solve_prefix(
        inst.field(),
        &inst.decoding_matrix(),
        answers,
        inst.params.l as usize,
    )
    .map_err(|e| match e {
        Error::InconsistentSystem => {
            Error::DecodeFailure("answers are not consistent with the code".into())
        }
        Error::PrefixNotUnique => Error::DecodeFailure("information set is broken".into()),
        other => other,
    })
}

/// One full retrieval from a single seed: encode, query, answer, decode.
pub fn run_retrieval(
    inst: &SchemeInstance,
    files: &[Vec<FieldElement>],
    desired: usize,
    seed: u64,
) -> Result<Transcript> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shares = encode_storage(inst, files, &mut rng)?;
    let queries = make_queries(inst, desired, &mut rng)?;
    let answers = answer_all(inst, &shares, &queries);
    let recovered = reconstruct(inst, &answers)?;
    Ok(Transcript {
        desired,
        correct: recovered == files[desired],
        answers,
        recovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::SchemeParams;
    use std::sync::OnceLock;

    fn q5() -> &'static SchemeInstance {
        static INST: OnceLock<SchemeInstance> = OnceLock::new();
        INST.get_or_init(|| SchemeInstance::build(SchemeParams::validate(5, 1, 1, None, 3).unwrap()).unwrap())
    }

    #[test]
    fn noiseless_shares_are_the_files() {
        let inst = q5();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let files = random_files(inst, &mut rng);
        let sh = encode_storage_with(inst, &files, &mut rng, Noise::Zero).unwrap();
        for srv in &sh.per_server {
            for (mu, file) in files.iter().enumerate() {
                assert_eq!(&srv[mu * 15..(mu + 1) * 15], &file[..]);
            }
        }
        let qb = make_queries_with(inst, 1, &mut rng, Noise::Zero).unwrap();
        for (n, srv) in qb.per_server.iter().enumerate() {
            for mu in 0..3 {
                for l in 0..15 {
                    let want = if mu == 1 { inst.b_info[(n, l)] } else { FieldElement::ZERO };
                    assert_eq!(srv[mu * 15 + l], want);
                }
            }
        }
        let a = answer_all(inst, &sh, &qb);
        assert_eq!(reconstruct(inst, &a).unwrap(), files[1]);
    }

    #[test]
    fn single_fragment_answer() {
        let inst = q5();
        let f = inst.field();
        let s = f.element(7).unwrap();
        let h = f.element(11).unwrap();
        assert_eq!(server_answer(f, &[s], &[h]), f.mul(s, h));
        let two = f.from_int(2);
        assert_eq!(server_answer(f, &[f.mul(two, s)], &[h]), f.mul(two, f.mul(s, h)));
    }

    #[test]
    fn different_seeds_same_file() {
        let inst = q5();
        let files = random_files(inst, &mut ChaCha8Rng::seed_from_u64(1));
        let a = run_retrieval(inst, &files, 2, 10).unwrap();
        let b = run_retrieval(inst, &files, 2, 11).unwrap();
        assert!(a.correct && b.correct);
        assert_ne!(a.answers, b.answers);
        assert_eq!(run_retrieval(inst, &files, 2, 10).unwrap(), a);
    }

    #[test]
    fn corrupted_answer_is_detected_or_wrong() {
        let inst = q5();
        let f = inst.field();
        let files = random_files(inst, &mut ChaCha8Rng::seed_from_u64(5));
        let t = run_retrieval(inst, &files, 0, 99).unwrap();
        for pos in [0usize, 17, 84] {
            let mut a = t.answers.clone();
            a[pos] = f.add(a[pos], FieldElement::ONE);
            match reconstruct(inst, &a) {
                Ok(out) => assert_ne!(out, files[0]),
                Err(e) => assert!(matches!(e, Error::DecodeFailure(_))),
            }
        }
    }

    #[test]
    fn bad_inputs() {
        let inst = q5();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(make_queries(inst, 3, &mut rng).is_err());
        assert!(encode_storage(inst, &[vec![FieldElement::ZERO; 15]], &mut rng).is_err());
    }
}
