use pqsum::ascent::AscentConfig;
use pqsum::cotype::{cotype_estimate, cotype_estimate_from, cotype_truncate, gaussian_average, rademacher_average, rademacher_average_mc};
use pqsum::random::{gaussian_vec, seeded_rng};
use pqsum::{p_norm, CotypeParams, EmbeddedNorm, Exponent, MatrixOperator, VariableKind, VectorFamily};
use proptest::prelude::*;

fn e(s: &str) -> Exponent {
    s.parse().unwrap()
}

fn random_space(seed: u64, n: usize, rows: usize, v: Exponent) -> EmbeddedNorm<f64> {
    let mut rng = seeded_rng(seed);
    let cols: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vec(&mut rng, rows)).collect();
    EmbeddedNorm::new(MatrixOperator::from_columns(rows, &cols, Exponent::TWO, v).unwrap()).unwrap()
}

fn random_family(seed: u64, k: usize, n: usize, v: Exponent) -> VectorFamily<f64> {
    let mut rng = seeded_rng(seed);
    VectorFamily::new((0..k).map(|_| gaussian_vec(&mut rng, n)).collect(), v).unwrap()
}

#[test]
fn sign_sampling_agrees_with_enumeration() {
    for (i, k) in [2usize, 5, 8, 10].into_iter().enumerate() {
        let v = [Exponent::ONE, e("3"), Exponent::INF, Exponent::TWO][i];
        let space = random_space(i as u64, 3, 4, v);
        let fam = random_family(100 + i as u64, k, 3, v);
        let exact = rademacher_average(&fam, &space).unwrap();
        let (mean, se) = rademacher_average_mc(&fam, &space, 20_000, 9).unwrap();
        assert!((mean - exact).abs() <= 4.0 * se, "k={k}: {mean} vs {exact} (se {se})");
    }
}

#[test]
fn gaussian_against_rademacher_sanity() {
    // A comparison check only, reported rather than asserted.
    for seed in 0..4u64 {
        let space = random_space(seed, 3, 3, Exponent::INF);
        let fam = random_family(50 + seed, 4, 3, Exponent::INF);
        let r = rademacher_average(&fam, &space).unwrap();
        let (g, se) = gaussian_average(&fam, &space, 20_000, seed).unwrap();
        let ok = g >= (2.0 / std::f64::consts::PI).sqrt() * r - 4.0 * se;
        eprintln!("seed {seed}: gaussian {g:.6} (se {se:.2e}) rademacher {r:.6} comparison_ok={ok}");
    }
}

#[test]
fn monotone_in_q_and_k() {
    let cfg = AscentConfig::default().with_starts(6);
    let space = random_space(3, 3, 4, Exponent::ONE);
    let est = cotype_estimate(&space, CotypeParams::new(Exponent::TWO, 3, VariableKind::Rademacher).unwrap(), &cfg).unwrap();
    let fam = est.family().unwrap();
    let avg = rademacher_average(fam, &space).unwrap();
    let norms: Vec<f64> = fam.vectors().iter().map(|x| space.norm(x)).collect();
    let mut last = f64::INFINITY;
    for q in ["2", "5/2", "3", "4", "8"].map(e).into_iter().chain([Exponent::INF]) {
        let value = p_norm(&norms, q) / avg;
        assert!(value <= last * (1.0 + 1e-12));
        last = value;
    }
    let mut prev = 0.0;
    let mut warm: Vec<VectorFamily<f64>> = Vec::new();
    for k in 1..=4 {
        let est = cotype_estimate_from(&space, CotypeParams::new(e("3"), k, VariableKind::Rademacher).unwrap(), &cfg, &warm).unwrap();
        assert!(est.value >= prev * (1.0 - 1e-9), "k={k}: {} < {prev}", est.value);
        prev = est.value;
        warm = est.family().cloned().into_iter().collect();
    }
}

#[test]
fn truncation_keeps_most_of_the_sum() {
    let space = random_space(11, 3, 3, e("3"));
    for seed in 0..6u64 {
        let q = e("4");
        let mut fam = random_family(200 + seed, 8, 3, e("3"));
        fam = fam.scaled(1.0 / rademacher_average(&fam, &space).unwrap());
        let norms: Vec<f64> = fam.vectors().iter().map(|x| space.norm(x)).collect();
        let full = p_norm(&norms, q);
        let c2sq: f64 = norms.iter().map(|a| a * a).sum();
        let eps = 0.2;
        let delta = (eps * full.powi(4) / c2sq).sqrt();
        let (kept, n) = cotype_truncate(&fam, &space, q, delta).unwrap();
        let kept_norms: Vec<f64> = kept.vectors().iter().map(|x| space.norm(x)).collect();
        let value = p_norm(&kept_norms, q);
        assert!(value >= 2f64.powf(-0.25) * (1.0 - eps).powf(0.25) * full, "seed {seed}");
        assert!(n as f64 <= c2sq / (delta * delta));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn single_vector_average_is_the_norm(x in prop::collection::vec(-5.0f64..5.0, 3), seed in 0u64..100) {
        let space = random_space(seed, 3, 4, e("3"));
        let fam = VectorFamily::new(vec![x.clone()], e("3")).unwrap();
        let avg = rademacher_average(&fam, &space).unwrap();
        prop_assert!((avg - space.norm(&x)).abs() <= 1e-12 * (1.0 + avg));
    }

    #[test]
    fn exact_average_is_sign_invariant(seed in 0u64..1000, flip in 0usize..4) {
        let space = random_space(seed, 2, 3, Exponent::INF);
        let fam = random_family(seed + 1, 4, 2, Exponent::INF);
        let mut vs = fam.vectors().to_vec();
        vs[flip].iter_mut().for_each(|a| *a = -*a);
        let flipped = VectorFamily::new(vs, Exponent::INF).unwrap();
        let a = rademacher_average(&fam, &space).unwrap();
        let b = rademacher_average(&flipped, &space).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }
}
