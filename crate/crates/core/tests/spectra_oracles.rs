mod common;

use common::*;
use hos_recover::spectra::{
    act, dft, flat_index, spectrum, spectrum_jacobian, unflatten_index, Domain, GroupElement, Signal,
};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn dft_matches_direct_summation() {
    let mut r = rng(1);
    for n in 1..=17 {
        let x = normals(&mut r, n);
        let oracle = direct_dft(&to_complex(&x));
        let got = dft(&Signal::real(&x).unwrap());
        assert!(max_diff(got.coeffs(), &oracle) <= 1e-12 * max_abs(&oracle).max(1.0), "N = {n}");
    }
}

#[test]
fn spectrum_matches_nested_loop_oracle() {
    let mut r = rng(2);
    for q in [3, 4, 5] {
        for n in 1..=8 {
            let re = normals(&mut r, n);
            let im = normals(&mut r, n);
            let vals: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
            for x in [Signal::real(&re).unwrap(), Signal::complex(vals).unwrap()] {
                let oracle = spectrum_oracle(x.values(), q);
                let got = spectrum(&x, q).unwrap();
                assert_eq!(got.len(), oracle.len());
                assert!(
                    max_diff(got.entries(), &oracle) <= 1e-10 * max_abs(&oracle),
                    "q = {q}, N = {n}, {:?}",
                    x.domain()
                );
            }
        }
    }
}

#[test]
fn bispectrum_of_one_two_three() {
    let x = to_complex(&[1.0, 2.0, 3.0]);
    let oracle = spectrum_oracle(&x, 3);
    let got = spectrum(&Signal::real(&[1.0, 2.0, 3.0]).unwrap(), 3).unwrap();
    assert_eq!(got.len(), 9);
    assert!(max_diff(got.entries(), &oracle) <= 1e-12 * max_abs(&oracle));
}

#[test]
fn real_signals_have_conjugate_structured_spectra() {
    let mut r = rng(3);
    for (q, n) in [(3, 7), (3, 8), (4, 5), (4, 6), (5, 4)] {
        let x = Signal::real(&normals(&mut r, n)).unwrap();
        let m = spectrum(&x, q).unwrap();
        let scale = max_abs(m.entries());
        for flat in 0..m.len() {
            let idx = unflatten_index(n, q, flat);
            let neg: Vec<usize> = idx.iter().map(|&k| (n - k) % n).collect();
            let mirrored = m.entries()[flat_index(n, &neg)];
            assert!((m.entries()[flat] - mirrored.conj()).norm() <= 1e-10 * scale);
        }
    }
}

#[test]
fn jacobian_matches_central_differences() {
    let mut r = rng(4);
    let cases = [(5, 3), (4, 4), (6, 3), (3, 5), (8, 3), (5, 4), (7, 3), (2, 3), (6, 4), (4, 5)];
    for (i, &(n, q)) in cases.iter().cycle().take(20).enumerate() {
        let base = normals(&mut r, n);
        let signal = if i % 2 == 0 {
            Signal::real(&base).unwrap()
        } else {
            let im = normals(&mut r, n);
            Signal::complex(base.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect()).unwrap()
        };
        let jac = spectrum_jacobian(&signal, q).unwrap();
        assert_eq!(jac.shape(), (n.pow(q as u32 - 1), n));
        let re: Vec<f64> = signal.values().iter().map(|v| v.re).collect();
        let im: Vec<f64> = signal.values().iter().map(|v| v.im).collect();
        let h = 1e-6 * re.iter().chain(&im).fold(1.0f64, |m, v| m.max(v.abs()));
        // Perturb the real parts; the map is holomorphic, so this is J.
        let fd = central_difference(&re, h, |p| {
            let vals: Vec<Complex64> = p.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
            spectrum_oracle(&vals, q)
        });
        for (col, expected) in fd.iter().enumerate() {
            let got: Vec<Complex64> = jac.column(col).iter().copied().collect();
            let diff: Vec<Complex64> = got.iter().zip(expected).map(|(a, b)| a - b).collect();
            let rel = cnorm2(&diff) / cnorm2(expected);
            assert!(rel <= 1e-5, "case {i} (N = {n}, q = {q}) column {col}: {rel:.2e}");
        }
    }
}

#[test]
fn group_actions_compose() {
    let x = Signal::real(&[0.3, -1.0, 2.5, 0.7, -0.2, 1.1]).unwrap();
    for (s1, l1, s2, l2) in [(1, 0, 2, 1), (5, 3, 4, 2), (0, 1, 0, 3), (3, 2, 3, 2)] {
        let g = GroupElement::new(s1, l1, 6, 4).unwrap();
        let h = GroupElement::new(s2, l2, 6, 4).unwrap();
        let twice = act(&h, &act(&g, &x).unwrap()).unwrap();
        let once = act(&g.then(&h).unwrap(), &x).unwrap();
        assert!(max_diff(twice.values(), once.values()) < 1e-14);
    }
}

#[test]
fn real_experiment_scales_stay_real() {
    let x = Signal::real(&[1.0, 2.0, 3.0, 4.0]).unwrap();
    let flip = GroupElement::new(1, 2, 4, 4).unwrap();
    assert_eq!(act(&flip, &x).unwrap().domain(), Domain::Real);
}

fn invariance_defect(x: &Signal, q: usize) -> f64 {
    let n = x.len();
    let base = spectrum(x, q).unwrap();
    let scale = max_abs(base.entries());
    let mut worst = 0.0f64;
    for s in 0..n {
        for l in 0..q {
            let g = GroupElement::new(s, l, n, q).unwrap();
            let moved = spectrum(&act(&g, x).unwrap(), q).unwrap();
            worst = worst.max(max_diff(moved.entries(), base.entries()) / scale);
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectra_are_orbit_invariant(
        q in 3usize..=4,
        vals in prop::collection::vec(-3.0f64..3.0, 2..=10),
    ) {
        prop_assume!(vals.iter().any(|v| v.abs() > 1e-3));
        let x = Signal::real(&vals).unwrap();
        prop_assert!(invariance_defect(&x, q) <= 1e-10);
    }

    #[test]
    fn complex_spectra_are_orbit_invariant(
        re in prop::collection::vec(-2.0f64..2.0, 3..=7),
        seed in any::<u64>(),
    ) {
        let im = normals(&mut rng(seed), re.len());
        let x = Signal::complex(re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect()).unwrap();
        prop_assert!(invariance_defect(&x, 3) <= 1e-10);
        prop_assert!(invariance_defect(&x, 5) <= 1e-10);
    }
}
