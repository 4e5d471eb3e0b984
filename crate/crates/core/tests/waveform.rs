use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wds_core::waveform::{
    amb_pattern, build_mb_plan, correlation_matrix, modulate_multi_band, modulate_single_band, BandPlan, Bcf,
    Constellation, SefdmModem, WaveformConfig,
};

fn qpsk(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Constellation::Qpsk.point(rng.random_range(0..4))).collect()
}

/// Sub-carrier frequencies straight from the plan's grid description.
fn frequencies(plan: &BandPlan) -> Vec<f64> {
    plan.subbands
        .iter()
        .flat_map(|sb| {
            let m = (plan.n_time_samples as f64 / sb.beta.value()).round();
            (0..sb.n_sub).map(move |i| (sb.freq_offset + i) as f64 / m)
        })
        .collect()
}

/// `Q × N` synthesis matrix with entries `Q^{-1/2} exp(j2π f_n k)`.
fn synthesis(plan: &BandPlan) -> DMatrix<Complex64> {
    let q = plan.n_time_samples;
    let f = frequencies(plan);
    DMatrix::from_fn(q, f.len(), |k, n| {
        Complex64::from_polar(1.0 / (q as f64).sqrt(), 2.0 * std::f64::consts::PI * f[n] * k as f64)
    })
}

fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

#[test]
fn mismatched_correlation_equals_matrix_product() {
    let cfg = WaveformConfig::with_subcarriers(8).unwrap();
    let (tx, rx) = (Bcf::new(0.8).unwrap(), Bcf::new(0.85).unwrap());
    let f_tx = synthesis(&BandPlan::single_band(&cfg, tx).unwrap());
    let f_rx = synthesis(&BandPlan::single_band(&cfg, rx).unwrap());
    let product = f_rx.adjoint() * f_tx;
    let c = correlation_matrix(&cfg, tx, rx).unwrap();
    let worst = (0..8)
        .flat_map(|m| (0..8).map(move |n| (m, n)))
        .map(|(m, n)| (c.entries[(m, n)] - product[(m, n)]).norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-9, "max deviation {worst}");
}

#[test]
fn single_band_matches_synthesis_matrix() {
    let cfg = WaveformConfig::new(16, 2).unwrap();
    let alpha = Bcf::new(0.8).unwrap();
    let s = qpsk(&mut ChaCha8Rng::seed_from_u64(1), 16);
    let x = modulate_single_band(&s, &cfg, alpha).unwrap();
    let reference = synthesis(&BandPlan::single_band(&cfg, alpha).unwrap()) * nalgebra::DVector::from_vec(s);
    assert!(rel_err(&x.samples, reference.as_slice()) < 1e-9);
}

#[test]
fn multi_band_matches_synthesis_matrix() {
    let cfg = WaveformConfig::with_subcarriers(32).unwrap();
    let plan = build_mb_plan(&cfg, Bcf::new(0.8).unwrap(), 8).unwrap();
    assert_eq!(plan.n_subbands(), 4);
    let s = qpsk(&mut ChaCha8Rng::seed_from_u64(2), plan.n_data());
    let x = modulate_multi_band(&s, &cfg, &plan).unwrap();
    let reference = synthesis(&plan) * nalgebra::DVector::from_vec(s);
    assert!(rel_err(&x.samples, reference.as_slice()) < 1e-9);
}

#[test]
fn one_subband_plan_is_single_band() {
    let cfg = WaveformConfig::with_subcarriers(32).unwrap();
    let alpha = Bcf::new(0.85).unwrap();
    let plan = build_mb_plan(&cfg, alpha, 32).unwrap();
    let s = qpsk(&mut ChaCha8Rng::seed_from_u64(3), 32);
    let a = modulate_multi_band(&s, &cfg, &plan).unwrap();
    let b = modulate_single_band(&s, &cfg, alpha).unwrap();
    assert!(rel_err(&a.samples, &b.samples) < 1e-12);
}

#[test]
fn adaptive_subband_sizes() {
    let cfg = WaveformConfig::with_subcarriers(256).unwrap();
    let sizes: Vec<Vec<usize>> = amb_pattern(&cfg)
        .unwrap()
        .iter()
        .map(|c| c.plan.subbands.iter().map(|sb| sb.n_sub).collect())
        .collect();
    for (class, want) in sizes.iter().zip([16usize, 17, 18]) {
        assert_eq!(class.len(), 16);
        assert!(class.iter().all(|&n| n == want), "{class:?}");
    }
}

#[test]
fn time_length_is_oversampled() {
    let cfg = WaveformConfig::with_subcarriers(256).unwrap();
    let s = qpsk(&mut ChaCha8Rng::seed_from_u64(4), 256);
    assert_eq!(modulate_single_band(&s, &cfg, Bcf::new(0.7).unwrap()).unwrap().len(), 2048);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn noiseless_demodulation_is_correlation_times_symbols(
        n in 2usize..24,
        a in 0.7f64..=1.0,
        seed in any::<u64>(),
    ) {
        let cfg = WaveformConfig::with_subcarriers(n).unwrap();
        let alpha = Bcf::new(a).unwrap();
        let modem = SefdmModem::new(BandPlan::single_band(&cfg, alpha).unwrap()).unwrap();
        let s = qpsk(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let r = modem.demodulate(&modem.modulate(&s).unwrap()).unwrap();
        let cs = correlation_matrix(&cfg, alpha, alpha).unwrap().apply(&s);
        let worst = r.iter().zip(&cs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-9, "deviation {}", worst);
    }
}
