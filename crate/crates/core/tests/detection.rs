use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wds_core::channel::ChannelModel;
use wds_core::detection::{
    demodulate, demodulate_with_plan, detect_multiband, mf_decide, sphere_decode, zf_decide, SdWorkspace,
};
use wds_core::waveform::{build_mb_plan, correlation_matrix, BandPlan, Bcf, Constellation, SefdmModem, WaveformConfig};

fn qpsk(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Constellation::Qpsk.point(rng.random_range(0..4))).collect()
}

/// Symbol error rate of `decide` on single-band SEFDM over AWGN.
fn ser<F>(n: usize, alpha: f64, es_n0: f64, trials: usize, seed: u64, decide: F) -> f64
where
    F: Fn(&wds_core::detection::DemodObservation) -> Vec<Complex64>,
{
    let cfg = WaveformConfig::with_subcarriers(n).unwrap();
    let plan = BandPlan::single_band(&cfg, Bcf::new(alpha).unwrap()).unwrap();
    let modem = SefdmModem::new(plan.clone()).unwrap();
    let ch = ChannelModel::awgn(es_n0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = 0;
    for _ in 0..trials {
        let s = qpsk(&mut rng, n);
        let y = ch.apply(&modem.modulate(&s).unwrap(), &mut rng).unwrap().received;
        let d = decide(&demodulate_with_plan(&y, &plan).unwrap());
        errors += s.iter().zip(&d).filter(|(a, b)| a != b).count();
    }
    errors as f64 / (trials * n) as f64
}

#[test]
fn zero_forcing_at_30db_is_reliable() {
    let rate = ser(16, 0.9, 30.0, 10_000, 1, |o| zf_decide(o).unwrap());
    assert!(rate < 0.01, "SER {rate}");
}

#[test]
fn zero_forcing_degrades_with_compression() {
    let mild = ser(64, 0.9, 20.0, 300, 2, |o| zf_decide(o).unwrap());
    let tight = ser(64, 0.7, 20.0, 300, 2, |o| zf_decide(o).unwrap());
    assert!(tight > mild, "alpha 0.7 {tight} vs 0.9 {mild}");
}

#[test]
fn matched_filter_prefers_light_compression() {
    let light = ser(16, 0.95, 20.0, 2000, 3, mf_decide);
    let heavy = ser(16, 0.8, 20.0, 2000, 3, mf_decide);
    assert!(light < heavy, "0.95 {light} vs 0.8 {heavy}");
}

#[test]
fn orthogonal_matched_filter_is_exact_without_noise() {
    let cfg = WaveformConfig::with_subcarriers(32).unwrap();
    let plan = BandPlan::single_band(&cfg, Bcf::ORTHOGONAL).unwrap();
    let s = qpsk(&mut ChaCha8Rng::seed_from_u64(4), 32);
    let x = SefdmModem::new(plan.clone()).unwrap().modulate(&s).unwrap();
    let obs = demodulate(&x, &cfg, Bcf::ORTHOGONAL, &plan).unwrap();
    let worst = obs.r.iter().zip(&s).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-12);
    assert_eq!(mf_decide(&obs), s);
}

#[test]
fn mismatched_receiver_sees_a_residual() {
    let cfg = WaveformConfig::with_subcarriers(16).unwrap();
    let tx = Bcf::new(0.8).unwrap();
    let plan = BandPlan::single_band(&cfg, tx).unwrap();
    let modem = SefdmModem::new(plan.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = qpsk(&mut rng, 16);
    let x = modem.modulate(&s).unwrap();

    let matched = demodulate(&x, &cfg, tx, &plan).unwrap();
    assert!(matched.residual(&s) < 1e-18);
    let c = correlation_matrix(&cfg, tx, tx).unwrap().apply(&s);
    let eve = demodulate(&x, &cfg, Bcf::new(0.85).unwrap(), &plan).unwrap();
    let gap: f64 = eve.r.iter().zip(&c).map(|(a, b)| (a - b).norm_sqr()).sum();
    assert!(gap > 1e-3 && eve.residual(&s) > 1e-3);

    // With 30 dB noise the mismatch residual dwarfs the matched one.
    let y = ChannelModel::awgn(30.0).apply(&x, &mut rng).unwrap().received;
    let matched = demodulate(&y, &cfg, tx, &plan).unwrap().residual(&s);
    let eve = demodulate(&y, &cfg, Bcf::new(0.85).unwrap(), &plan).unwrap().residual(&s);
    assert!(eve >= 10.0 * matched, "mismatch {eve} vs matched {matched}");
}

/// Exhaustive ML with ties to the lower index vector.
fn brute_force(obs: &wds_core::detection::DemodObservation) -> Vec<Complex64> {
    let n = obs.dim();
    let pts = Constellation::Qpsk.points();
    let mut best = (f64::INFINITY, Vec::new());
    for code in 0..(1usize << (2 * n)) {
        // Most significant symbol first, so increasing `code` is lexicographic.
        let s: Vec<_> = (0..n).map(|k| pts[(code >> (2 * (n - 1 - k))) & 3]).collect();
        let d = obs.residual(&s);
        if d < best.0 {
            best = (d, s);
        }
    }
    best.1
}

#[test]
fn sphere_decoder_is_maximum_likelihood_at_n4() {
    let cfg = WaveformConfig::with_subcarriers(4).unwrap();
    let plan = BandPlan::single_band(&cfg, Bcf::new(0.8).unwrap()).unwrap();
    let modem = SefdmModem::new(plan.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for es_n0 in [0.0, 5.0, 10.0] {
        let ch = ChannelModel::awgn(es_n0);
        for _ in 0..10_000 {
            let s = qpsk(&mut rng, 4);
            let y = ch.apply(&modem.modulate(&s).unwrap(), &mut rng).unwrap().received;
            let obs = demodulate_with_plan(&y, &plan).unwrap();
            let res = sphere_decode(&obs, &mut SdWorkspace::new(&obs).unwrap()).unwrap();
            assert!(res.found);
            assert_eq!(res.symbols, brute_force(&obs), "Es/N0 {es_n0}");
        }
    }
}

#[test]
fn noiseless_sphere_decoding_visits_every_level() {
    let cfg = WaveformConfig::with_subcarriers(24).unwrap();
    let plan = BandPlan::single_band(&cfg, Bcf::new(0.8).unwrap()).unwrap();
    let s = qpsk(&mut ChaCha8Rng::seed_from_u64(7), 24);
    let x = SefdmModem::new(plan.clone()).unwrap().modulate(&s).unwrap();
    let obs = demodulate_with_plan(&x, &plan).unwrap();
    let res = sphere_decode(&obs, &mut SdWorkspace::new(&obs).unwrap()).unwrap();
    assert_eq!(res.symbols, s);
    assert!(res.visited_nodes >= 24);
}

#[test]
fn multiband_detector_recovers_noiseless_symbols() {
    let cfg = WaveformConfig::with_subcarriers(32).unwrap();
    let plan = build_mb_plan(&cfg, Bcf::new(0.8).unwrap(), 8).unwrap();
    let s = qpsk(&mut ChaCha8Rng::seed_from_u64(8), plan.n_data());
    let x = SefdmModem::new(plan.clone()).unwrap().modulate(&s).unwrap();
    let res = detect_multiband(&x, &cfg, &plan, &plan).unwrap();
    assert_eq!(res.symbols, s);
    assert_eq!(res.erasures, 0);
}
