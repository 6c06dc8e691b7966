use hos_recover::rank::{compressed_jacobian_rank, probe_injectivity_rank, RankProbe, DEFAULT_RANK_TOL};
use hos_recover::seeding::{gaussian_vec, rng_from_seed};
use hos_recover::sensing::{build_operator, OperatorKind};

#[test]
fn n_plus_one_dense_rows_give_full_rank() {
    let report = probe_injectivity_rank(5, 3, 6, 50, 1).unwrap();
    assert_eq!(report.trials.len(), 50);
    assert_eq!(report.min_rank, Some(5));
    assert!(report.pass && report.full_rank_expected);
}

#[test]
fn full_sampling_probe_gives_rank_n() {
    let probe = RankProbe { kind: OperatorKind::SamplingMask, ..RankProbe::new(6, 3, 36, 5, 2) };
    let report = probe.run().unwrap();
    assert_eq!(report.min_rank, Some(6));
}

#[test]
fn appending_rows_never_lowers_rank() {
    for seed in 0..10 {
        let x = gaussian_vec(&mut rng_from_seed(seed), 7, 1.0);
        let mut last = 0;
        for k in 1..=10 {
            let op = build_operator(OperatorKind::DenseRandom, k, 7, 3, 500 + seed).unwrap();
            let rank = compressed_jacobian_rank(&x, &op, DEFAULT_RANK_TOL).unwrap();
            assert!(rank >= last, "seed {seed}: K = {k} rank {rank} < {last}");
            assert!(rank <= k.min(7));
            last = rank;
        }
        assert_eq!(last, 7);
    }
}

#[test]
fn report_serializes() {
    let report = probe_injectivity_rank(4, 4, 5, 3, 0).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["N"], 4);
    assert_eq!(json["trials"].as_array().unwrap().len(), 3);
    assert_eq!(json["pass"], true);
}
