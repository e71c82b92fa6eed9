use harmonic_coding::baselines::random_freshman_task;
use harmonic_coding::harmonic::{self, group_coeffs, HarmonicParams};
use harmonic_coding::poly::{direct_gradient_sum, random_poly};
use harmonic_coding::sim::{privacy_audit_exhaustive, run_trial, DEFAULT_AUDIT_BUDGET};
use harmonic_coding::{Dataset, FieldConfig, FieldRng, FieldVector, SchemeParams, SchemeRegistry};
use proptest::prelude::*;

fn field(p: u64) -> FieldConfig {
    FieldConfig::new(p).unwrap()
}

#[test]
fn every_scheme_decodes_random_tasks() {
    let reg = SchemeRegistry::default();
    let cases = [
        ("harmonic", 13, 3, 3),
        ("harmonic", 7, 4, 1),
        ("shamir", 13, 3, 3),
        ("lcc", 17, 3, 3),
        ("freshman", 7, 4, 7),
    ];
    let mut rng = FieldRng::seed_from_u64(2024);
    for (name, p, k, d) in cases {
        let s = reg.build(&SchemeParams::new(name, p, k, d)).unwrap();
        for _ in 0..25 {
            let g = s.sample_task(&mut rng, 2, 2).unwrap();
            let data = Dataset::random(&mut rng, s.field(), k, 2).unwrap();
            let r = run_trial(s.as_ref(), &g, &data, rng.next_seed()).unwrap();
            assert!(r.exact_match, "{name}: {r:?}");
        }
    }
}

#[test]
fn shares_do_not_depend_on_the_task() {
    let reg = SchemeRegistry::default();
    let s = reg.build(&SchemeParams::new("harmonic", 11, 3, 3)).unwrap();
    let mut rng = FieldRng::seed_from_u64(5);
    let data = Dataset::random(&mut rng, s.field(), 3, 2).unwrap();
    let z = rng.uniform_vector(s.field(), 2);
    let shares = s.encode(&data, &[z]).unwrap();
    for deg in 1..=3 {
        let g = random_poly(&mut rng, s.field(), 2, 1, deg).unwrap();
        let outputs: Vec<FieldVector> = shares.iter().map(|x| g.eval(x).unwrap()).collect();
        assert_eq!(s.decode(&outputs).unwrap(), direct_gradient_sum(&g, &data).unwrap());
    }
}

#[test]
fn every_builtin_scheme_is_private_on_small_fields() {
    let reg = SchemeRegistry::default();
    for (name, p, d) in [("harmonic", 5, 2), ("harmonic", 5, 1), ("shamir", 5, 2), ("lcc", 5, 1), ("freshman", 3, 3)] {
        let s = reg.build(&SchemeParams::new(name, p, 2, d)).unwrap();
        let r = privacy_audit_exhaustive(s.as_ref(), 1, DEFAULT_AUDIT_BUDGET).unwrap();
        assert!(r.private, "{name}");
        assert!(r.mi_bits_per_worker.iter().all(|&mi| mi == 0.0));
    }
}

#[test]
fn freshman_tasks_are_linear_after_reduction() {
    let f = field(5);
    let mut rng = FieldRng::seed_from_u64(9);
    let g = random_freshman_task(&mut rng, f, 3, 2, 5).unwrap();
    assert_eq!(g.total_degree(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacent_groups_telescope(seed in any::<u64>(), pi in 0usize..3, k in 2usize..5, d in 1usize..4) {
        let p = [11, 101, 65537][pi];
        let mut rng = FieldRng::seed_from_u64(seed);
        let params = HarmonicParams::random(&mut rng, field(p), k, d).unwrap();
        for j in 1..k {
            prop_assert_eq!(group_coeffs(&params, j + 1).unwrap().a, group_coeffs(&params, j).unwrap().b);
        }
    }

    #[test]
    fn harmonic_decode_matches_oracle(seed in any::<u64>(), k in 1usize..4, d in 1usize..4) {
        let f = field(13);
        let mut rng = FieldRng::seed_from_u64(seed);
        let params = HarmonicParams::random(&mut rng, f, k, d).unwrap();
        let g = random_poly(&mut rng, f, 2, 2, d).unwrap();
        let data = Dataset::random(&mut rng, f, k, 2).unwrap();
        let z = rng.uniform_vector(f, 2);
        let shares = harmonic::encode(&params, &data, &z).unwrap();
        let outputs: Vec<FieldVector> = shares.iter().map(|x| g.eval(x).unwrap()).collect();
        prop_assert_eq!(harmonic::decode(&params, &outputs).unwrap(), direct_gradient_sum(&g, &data).unwrap());
    }
}
