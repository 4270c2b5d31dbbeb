use lindfrag::linalg::{c, C64};
use lindfrag::spectra::{
    eccentricity, real_fraction, rmt_sample, rmt_samples, spacing_ratios, ComplexSpectrum, RatioOptions,
    SpectraError,
};
use proptest::prelude::*;

mod common;
use common::config;

/// Real points plus conjugate pairs well away from the axis.
fn spectrum_values() -> impl Strategy<Value = Vec<C64>> {
    let real = prop::collection::vec(-5.0f64..5.0, 0..40);
    let pairs = prop::collection::vec((-5.0f64..5.0, 0.01f64..5.0), 3..40);
    (real, pairs).prop_map(|(r, p)| {
        let mut v: Vec<C64> = r.into_iter().map(|x| c(x, 0.0)).collect();
        for (x, y) in p {
            v.push(c(x, y));
            v.push(c(x, -y));
        }
        v
    })
}

fn spec(values: Vec<C64>) -> ComplexSpectrum {
    ComplexSpectrum::new(values, "generated").unwrap()
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn spacing_ratios_lie_in_the_unit_disk(values in spectrum_values(), keep in 0.1f64..=1.0) {
        let stats = spacing_ratios(&spec(values), RatioOptions { real_tol: None, keep_fraction: keep }).unwrap();
        prop_assert!(stats.complex_ratios.iter().all(|z| z.norm() <= 1.0 + 1e-15));
        prop_assert!(stats.real_ratios.iter().all(|r| r.abs() <= 1.0 + 1e-15));
    }

    #[test]
    fn statistics_are_scale_invariant(values in spectrum_values(), scale in 1e-3f64..1e3) {
        let a = spec(values.clone());
        let b = spec(values.iter().map(|z| z * scale).collect());
        let (ta, tb) = (a.default_real_tol(), b.default_real_tol());
        prop_assert_eq!(real_fraction(&a, ta), real_fraction(&b, tb));
        let (ea, eb) = (eccentricity(&a, ta).unwrap(), eccentricity(&b, tb).unwrap());
        prop_assert!((ea - eb).abs() < 1e-9);
        let opts = RatioOptions::default();
        let (ra, rb) = (spacing_ratios(&a, opts).unwrap(), spacing_ratios(&b, opts).unwrap());
        prop_assert_eq!(ra.complex_ratios.len(), rb.complex_ratios.len());
        for (x, y) in ra.complex_ratios.iter().zip(&rb.complex_ratios) {
            prop_assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn ensemble_is_pseudo_hermitian(log_n in 1u32..=5, chi in 0.0f64..5.0, seed in any::<u64>()) {
        let s = rmt_sample(1 << log_n, chi, seed).unwrap();
        prop_assert!(s.is_pseudo_hermitian());
        let spectrum = s.spectrum().unwrap();
        prop_assert!(spectrum.conjugation_defect() < 1e-8 * spectrum.scale().max(1.0));
    }

    #[test]
    fn samples_are_reproducible(chi in 0.0f64..5.0, seed in any::<u64>()) {
        let a = rmt_sample(16, chi, seed).unwrap();
        let b = rmt_sample(16, chi, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_ne!(a.matrix, rmt_sample(16, chi, seed.wrapping_add(1)).unwrap().matrix);
    }
}

#[test]
fn zero_chi_is_antisymmetric() {
    let s = rmt_sample(32, 0.0, 7).unwrap();
    for i in 0..32 {
        for j in 0..32 {
            assert_eq!(s.get(i, j), -s.get(j, i));
        }
    }
}

#[test]
fn small_ensemble_has_paired_spectrum() {
    let s = rmt_sample(16, 2.0, 3).unwrap().spectrum().unwrap();
    let tol = s.default_real_tol();
    for z in s.eigenvalues().iter().filter(|z| z.im.abs() >= tol) {
        let partner = s.eigenvalues().iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
        assert!(partner < 1e-10);
    }
}

#[test]
fn batch_seeds_are_offsets() {
    let batch = rmt_samples(8, 1.0, 100, 4).unwrap();
    for (i, s) in batch.iter().enumerate() {
        assert_eq!(s, &rmt_sample(8, 1.0, 100 + i as u64).unwrap());
    }
}

#[test]
fn bad_inputs() {
    assert_eq!(rmt_sample(12, 1.0, 0).unwrap_err(), SpectraError::BadSize(12));
    assert_eq!(rmt_sample(8, -1.0, 0).unwrap_err(), SpectraError::BadChi);
    assert!(ComplexSpectrum::new(vec![c(f64::NAN, 0.0)], "nan").is_err());
    let all_real = spec((0..10).map(|i| c(i as f64, 0.0)).collect());
    assert_eq!(eccentricity(&all_real, 1e-12).unwrap_err(), SpectraError::AllReal);
}
