use pqsum::random::{gaussian_vec, seeded_rng, sphere_point, sub_seed};
use pqsum::reductions::{maurey_reduce, quotient_verify, vector_scaling_check, QuotientOptions, SignedBlocks};
use pqsum::{inclusion, AscentConfig, Exponent, MatrixOperator, QuotientInstance};
use proptest::prelude::*;
use rand::Rng;

fn e(s: &str) -> Exponent {
    s.parse().unwrap()
}

#[test]
fn random_linf_to_l2_instance_agrees() {
    let cfg = AscentConfig::default();
    let opts = QuotientOptions { candidates: 64, seed: 5, ..QuotientOptions::default() };
    for seed in 0..3u64 {
        let mut rng = seeded_rng(seed);
        let op = MatrixOperator::<f64>::new(3, 3, gaussian_vec(&mut rng, 9), Exponent::INF, e("2")).unwrap();
        let inst = QuotientInstance::new(op, e("2"), e("1"), None, 3).unwrap();
        assert_eq!((inst.r, inst.s), (e("2"), Exponent::INF));
        let v = quotient_verify(&inst, &opts, &cfg).unwrap();
        assert!(v.sound, "seed {seed}: {} violations", v.violations);
        assert!(v.report.holds, "seed {seed}: lhs {} rhs {}", v.report.lhs.value, v.report.rhs.value);
        assert!(v.evaluation.candidates.iter().all(|c| c.transfer_holds), "seed {seed}");
        assert!((v.evaluation.certificate_value - v.evaluation.lhs.value).abs() < 1e-9 * v.evaluation.lhs.value);
    }
}

#[test]
fn sound_direction_on_generic_exponents() {
    let cfg = AscentConfig::default().with_starts(8);
    let opts = QuotientOptions { candidates: 24, seed: 9, ..QuotientOptions::default() };
    let mut rng = seeded_rng(17);
    let op = MatrixOperator::<f64>::new(2, 3, gaussian_vec(&mut rng, 6), e("3"), e("3/2")).unwrap();
    let inst = QuotientInstance::new(op, e("3"), e("3/2"), None, 2).unwrap();
    let v = quotient_verify(&inst, &opts, &cfg).unwrap();
    for c in &v.evaluation.candidates {
        assert!(c.value <= v.evaluation.lhs.value * 1.01, "{} > {}", c.value, v.evaluation.lhs.value);
    }
}

#[test]
fn vector_scaling_on_exact_grid() {
    let cfg = AscentConfig::default();
    for seed in 0..6u64 {
        let mut rng = seeded_rng(sub_seed(21, seed));
        let (m, n) = (rng.random_range(2..=5), rng.random_range(1..=3));
        let op = MatrixOperator::<f64>::new(n, m, gaussian_vec(&mut rng, n * m), Exponent::INF, e("2")).unwrap();
        for p in ["1", "2", "4"] {
            for (alpha, c) in [(1, 1.0), (1, 2.0), (2, 2.0), (1, 3.5)] {
                let rep = vector_scaling_check(&op, e(p), alpha, c, &cfg).unwrap();
                assert!(rep.holds, "seed {seed} p={p} alpha={alpha} c={c}");
            }
        }
    }
    let iota = inclusion::<f64>(4, Exponent::INF, e("2"));
    assert!(vector_scaling_check(&iota, e("2"), 2, 2.0, &cfg).unwrap().holds);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn maurey_contract(seed in any::<u64>(), m in 1usize..7, blocks in 1usize..4, qi in 0usize..4, si in 0usize..4) {
        let qprimes = ["1", "3/2", "2", "inf"];
        let qprime = e(qprimes[qi]);
        // Admissible s lies in [1, q'].
        let s = [e("1"), e("4/3"), e("2"), Exponent::INF][si].min(qprime);
        let mut rng = seeded_rng(seed);
        let sigma: Vec<f64> = sphere_point(&mut rng, m, s);
        let mut parts: Vec<Vec<(usize, f64)>> = vec![Vec::new(); blocks];
        for i in 0..m {
            let b = rng.random_range(0..blocks);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            parts[b].push((i, sign));
        }
        let red = maurey_reduce(&sigma, &SignedBlocks::new(m, parts).unwrap(), qprime, s).unwrap();
        prop_assert!(red.j_norm <= 1.0 + 1e-9);
        prop_assert!(red.tau_norm <= red.sigma_norm + 1e-9);
        prop_assert!(red.contract_holds);
    }
}
