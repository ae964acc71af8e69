use std::sync::OnceLock;

use proptest::prelude::*;

use hermpir::atlas::{format_sig5, hermitian_max_rate, hyperelliptic_jmax, rational_max_rate, Convention};
use hermpir::gf::{FieldElement, FieldTower, GaloisField};
use hermpir::hermitian::{FactoredFunction, HermitianCurve};
use hermpir::linalg::{solve_prefix, Matrix};
use hermpir::scheme::wire::{decode_payload, encode_payload, read_frame, write_frame, MessageKind};
use hermpir::scheme::{random_files, run_retrieval, SchemeInstance, SchemeParams};

fn tower(q: u64) -> &'static FieldTower {
    static T: OnceLock<Vec<(u64, FieldTower)>> = OnceLock::new();
    let all = T.get_or_init(|| [3u64, 4, 5, 7, 9].iter().map(|&q| (q, FieldTower::for_q(q).unwrap())).collect());
    &all.iter().find(|(k, _)| *k == q).unwrap().1
}

fn el(f: &GaloisField, i: u32) -> FieldElement {
    f.element(i % f.order()).unwrap()
}

fn matrix(f: &GaloisField, rows: usize, cols: usize, seed: &[u32]) -> Matrix {
    Matrix::from_rows(
        (0..rows)
            .map(|r| (0..cols).map(|c| el(f, seed[(r * cols + c) % seed.len()].wrapping_mul(r as u32 + 7) ^ c as u32)).collect())
            .collect(),
    )
    .unwrap()
}

fn q5_instance() -> &'static SchemeInstance {
    static I: OnceLock<SchemeInstance> = OnceLock::new();
    I.get_or_init(|| SchemeInstance::build(SchemeParams::validate(5, 1, 1, None, 2).unwrap()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(q in prop::sample::select(vec![3u64, 4, 5, 7, 9]), a: u32, b: u32, c: u32) {
        let t = tower(q);
        let f: &GaloisField = t;
        let (a, b, c) = (el(f, a), el(f, b), el(f, c));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.mul_inv(a).unwrap()), FieldElement::ONE);
            prop_assert_eq!(f.pow(a, f.order() as u64 - 1), FieldElement::ONE);
        }
        // Frobenius is additive and the norm lands in the subfield
        let p = f.characteristic() as u64;
        prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
        let n = t.subfield_norm(a);
        prop_assert_eq!(f.pow(n, q), n);
    }

    #[test]
    fn coefficient_round_trip(q in prop::sample::select(vec![3u64, 4, 9]), a: u32) {
        let f: &GaloisField = tower(q);
        let a = el(f, a);
        prop_assert_eq!(f.from_coeffs(&f.coeffs(a)).unwrap(), a);
    }

    #[test]
    fn rank_equals_transpose_rank(rows in 1usize..7, cols in 1usize..7, seed in prop::collection::vec(any::<u32>(), 1..50)) {
        let f: &GaloisField = tower(5);
        let m = matrix(f, rows, cols, &seed);
        let r = m.rank(f);
        prop_assert_eq!(r, m.transpose().rank(f));
        prop_assert!(r <= rows.min(cols));
        let k = m.kernel(f);
        prop_assert_eq!(k.rows() + r, cols);
        for i in 0..k.rows() {
            prop_assert!(m.mul_vec(f, k.row(i)).unwrap().iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn solve_prefix_recovers_prefix(n in 2usize..8, seed in prop::collection::vec(any::<u32>(), 1..80), x in prop::collection::vec(any::<u32>(), 8)) {
        let f: &GaloisField = tower(3);
        let a = matrix(f, n + 2, n, &seed);
        prop_assume!(a.rank(f) == n);
        let sol: Vec<FieldElement> = x.iter().take(n).map(|&v| el(f, v)).collect();
        let rhs = a.mul_vec(f, &sol).unwrap();
        let got = solve_prefix(f, &a, &rhs, n).unwrap();
        prop_assert_eq!(got, sol);
    }

    #[test]
    fn wire_round_trip(vals in prop::collection::vec(any::<u32>(), 0..40)) {
        let f: &GaloisField = tower(5);
        let elems: Vec<_> = vals.iter().map(|&v| el(f, v)).collect();
        let payload = encode_payload(f, MessageKind::Query, &elems);
        let mut buf = Vec::new();
        write_frame(&mut buf, &payload).unwrap();
        let back = read_frame(&mut buf.as_slice()).unwrap();
        let (kind, got) = decode_payload(f, &back).unwrap();
        prop_assert_eq!(kind, MessageKind::Query);
        prop_assert_eq!(got, elems);
    }

    #[test]
    fn sig5_is_close(num in 1i64..1_000_000, den in 1i64..1_000_000) {
        let s = format_sig5(num, den);
        let v: f64 = s.parse().unwrap();
        let exact = num as f64 / den as f64;
        prop_assert!((v - exact).abs() <= exact * 5e-5 + 1e-12, "{} vs {}", s, exact);
    }

    #[test]
    fn jmax_rates_decrease_with_collusion(g in 1u32..6, gamma in 0u32..5, xt in 2u32..80, extra in 0u64..200) {
        let field = 841u64;
        let count = field + 1 + extra;
        let a = hyperelliptic_jmax(field, g, count, gamma, xt / 2, xt - xt / 2);
        let b = hyperelliptic_jmax(field, g, count, gamma, xt.div_ceil(2), xt + 1 - xt.div_ceil(2));
        prop_assert!(a.j >= b.j);
        prop_assert_ne!(a.cmp_rate(&b), std::cmp::Ordering::Less);
        if let Some((l, n)) = a.fraction() {
            prop_assert_eq!(n - l, xt as i64 + 6 * g as i64 + 2);
        }
    }

    #[test]
    fn rate_records_are_consistent(q in 3u32..20, x in 1u32..30, t in 1u32..30) {
        let r = rational_max_rate((q * q) as u64, x, t);
        if let Some((l, n)) = r.fraction() {
            prop_assert_eq!(n - l, (x + t) as i64);
            prop_assert!(2 * l + (x + t) as i64 <= (q * q) as i64);
        }
        let a = hermitian_max_rate(q, x, t, Convention::TheoremN);
        let b = hermitian_max_rate(q, x, t, Convention::TableDegN);
        prop_assert_eq!(a.feasible, b.feasible);
        if a.feasible {
            // the table convention only ever enlarges N
            prop_assert_ne!(a.cmp_rate(&b), std::cmp::Ordering::Less);
            prop_assert_eq!(a.l, b.l);
            prop_assert_eq!((a.l + (q * (q - 1) / 2) as i64) % q as i64, 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn retrieval_is_exact(seed: u64, desired in 0usize..2) {
        use rand::SeedableRng;
        let inst = q5_instance();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let files = random_files(inst, &mut rng);
        let tr = run_retrieval(inst, &files, desired, seed).unwrap();
        prop_assert!(tr.correct);
        prop_assert_eq!(&tr.recovered, &files[desired]);
    }

    #[test]
    fn factored_product_valuations_add(i1 in -2i32..4, j1 in 0i32..4, i2 in 0i32..4, j2 in -2i32..4) {
        let q = 3u32;
        let c = HermitianCurve::new(q as u64).unwrap();
        let f = c.tower().field();
        let a = FactoredFunction::monomial(i1, j1);
        let b = FactoredFunction::monomial(i2, j2);
        let ab = a.mul(f, &b);
        prop_assert_eq!(ab.valuation_at_infinity(q), a.valuation_at_infinity(q) + b.valuation_at_infinity(q));
        prop_assert_eq!(ab.valuation_at_origin(q), a.valuation_at_origin(q) + b.valuation_at_origin(q));
        for p in c.affine_points().iter().filter(|p| !p.is_origin()).take(12) {
            if let (Ok(x), Ok(y), Ok(z)) = (a.evaluate(&c, p), b.evaluate(&c, p), ab.evaluate(&c, p)) {
                prop_assert_eq!(f.mul(x, y), z);
            }
        }
    }
}
