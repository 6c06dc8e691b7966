mod common;

use common::*;
use hos_recover::alignment::{bispectrum_relative_error, relative_error_for_order, trispectrum_relative_error};
use hos_recover::spectra::{act, circular_shift, GroupElement, Signal};
use proptest::prelude::*;

#[test]
fn bispectrum_error_matches_exhaustive_search() {
    let mut r = rng(21);
    for _ in 0..50 {
        let truth = normals(&mut r, 5);
        let est = normals(&mut r, 5);
        let got = bispectrum_relative_error(&est, &truth).unwrap();
        assert!((got - brute_aligned_error(&est, &truth, &[1.0])).abs() <= 1e-14);
    }
}

#[test]
fn trispectrum_error_matches_exhaustive_search() {
    let mut r = rng(22);
    for _ in 0..50 {
        let truth = normals(&mut r, 6);
        let est = normals(&mut r, 6);
        let got = trispectrum_relative_error(&est, &truth).unwrap();
        assert!((got - brute_aligned_error(&est, &truth, &[1.0, -1.0])).abs() <= 1e-14);
    }
}

#[test]
fn negated_shift_has_zero_trispectrum_error() {
    let truth = normals(&mut rng(23), 10);
    let est: Vec<f64> = circular_shift(&truth, 3).iter().map(|v| -v).collect();
    assert_eq!(trispectrum_relative_error(&est, &truth).unwrap(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orbit_members_have_zero_error(seed in any::<u64>(), n in 2usize..16, s in 0usize..16, flip in any::<bool>()) {
        let truth = normals(&mut rng(seed), n);
        let x = Signal::real(&truth).unwrap();
        let s = s % n;
        prop_assert_eq!(bispectrum_relative_error(&act(&GroupElement::new(s, 0, n, 3).unwrap(), &x).unwrap().real_values(), &truth).unwrap(), 0.0);
        let g = GroupElement::new(s, if flip { 2 } else { 0 }, n, 4).unwrap();
        prop_assert_eq!(relative_error_for_order(4, &act(&g, &x).unwrap().real_values(), &truth).unwrap(), 0.0);
    }

    #[test]
    fn identity_shift_bounds_the_error(seed in any::<u64>(), n in 1usize..12) {
        let mut r = rng(seed);
        let truth = normals(&mut r, n);
        let est = normals(&mut r, n);
        let diff: Vec<f64> = est.iter().zip(&truth).map(|(a, b)| a - b).collect();
        let bound = norm2(&diff) / norm2(&truth);
        prop_assert!(bispectrum_relative_error(&est, &truth).unwrap() <= bound + 1e-15);
        prop_assert!(trispectrum_relative_error(&est, &truth).unwrap() <= bound + 1e-15);
    }

    #[test]
    fn common_shift_leaves_error_unchanged(seed in any::<u64>(), n in 1usize..12, s in 0usize..12) {
        let mut r = rng(seed);
        let truth = normals(&mut r, n);
        let est = normals(&mut r, n);
        let before = bispectrum_relative_error(&est, &truth).unwrap();
        let after = bispectrum_relative_error(&circular_shift(&est, s), &circular_shift(&truth, s)).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0));
    }
}
