use proptest::prelude::*;

use wds_core::keygen::{
    emit_keys, next_state, paired_check, trajectory, ChaoticState, KeyQuantizer, KeySource, PatternKeyStream,
};
use wds_core::waveform::Bcf;

#[test]
fn worked_quantizer_examples() {
    let q = KeyQuantizer::default();
    assert_eq!(q.quantize(0.82), Some(Bcf::new(0.85).unwrap()));
    assert_eq!(q.quantize(0.77), Some(Bcf::new(0.8).unwrap()));
    assert_eq!(q.quantize(0.50), None);
}

#[test]
fn range_is_preserved_for_a_million_steps() {
    for gamma in [3.7, 3.8, 3.9] {
        let mut s = ChaoticState::new(gamma, 0.85).unwrap();
        for _ in 0..1_000_000 {
            s = next_state(&s).unwrap();
            assert!(s.phi > 0.0 && s.phi < 1.0, "gamma {gamma} left (0,1) at step {}", s.step);
        }
    }
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn nearby_seeds_decorrelate() {
    let a = trajectory(3.9, 0.85, 200).unwrap();
    let b = trajectory(3.9, 0.86, 200).unwrap();
    let r = pearson(&a[10..], &b[10..]);
    assert!(r.abs() < 0.2, "correlation {r}");
    // They do start close together.
    assert!((a[0] - b[0]).abs() < 0.05);
}

#[test]
fn differing_threshold_usually_changes_the_stream() {
    let mut differ = 0;
    for i in 0..100 {
        let gamma = 3.6 + 0.39 * (i as f64 + 0.5) / 100.0;
        let phi0 = 0.05 + 0.9 * ((i * 37 % 100) as f64 + 0.5) / 100.0;
        let a_src = KeySource { gamma, phi0, eta: 0.3, ..KeySource::default() };
        let b_src = KeySource { eta: 0.4, ..a_src.clone() };
        let a = PatternKeyStream::generate(&a_src, &KeyQuantizer::uniform(0.3, 0.9, 3).unwrap(), 32).unwrap();
        let b = PatternKeyStream::generate(&b_src, &KeyQuantizer::uniform(0.4, 0.9, 3).unwrap(), 32).unwrap();
        differ += usize::from(!paired_check(&a, &b));
    }
    assert!(differ >= 90, "{differ}/100 differ");
}

#[test]
fn export_roundtrips_through_text() {
    let q = KeyQuantizer::default();
    let s = PatternKeyStream::generate(&KeySource::default(), &q, 256).unwrap();
    let back = PatternKeyStream::from_text(&s.to_text()).unwrap();
    assert_eq!(back, s);
    assert!(PatternKeyStream::from_text("keys = [0.8]\n[source]\ngamma = 3.9\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equal_sources_agree(gamma in 3.6f64..3.99, phi0 in 0.01f64..0.99, count in 1usize..200) {
        let source = KeySource { gamma, phi0, ..KeySource::default() };
        let q = KeyQuantizer::default();
        // Periodic windows of the map can starve the quantizer; both ends then
        // fail the same way.
        match (PatternKeyStream::generate(&source, &q, count), PatternKeyStream::generate(&source, &q, count)) {
            (Ok(a), Ok(b)) => {
                prop_assert!(paired_check(&a, &b));
                prop_assert_eq!(a.keys.len(), count);
            }
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            _ => prop_assert!(false, "generators disagree"),
        }
    }

    #[test]
    fn keys_stay_in_the_alphabet(gamma in 3.6f64..3.99, phi0 in 0.01f64..0.99) {
        let q = KeyQuantizer::default();
        let alphabet = q.alphabet();
        if let Ok(s) = emit_keys(&ChaoticState::new(gamma, phi0).unwrap(), &q, 64) {
            prop_assert!(s.keys.iter().all(|k| alphabet.contains(k)));
        }
    }

    #[test]
    fn iterates_stay_in_the_unit_interval(gamma in 1.01f64..3.999, phi0 in 1e-6f64..0.999_999) {
        for v in trajectory(gamma, phi0, 2000).unwrap() {
            prop_assert!(v > 0.0 && v < 1.0);
        }
    }
}

#[test]
fn periodic_window_starves() {
    // The stable period-3 orbit at this gain (about 0.15, 0.50, 0.96) never lands in (0.75, 0.9].
    let source = KeySource { gamma: 3.835, phi0: 0.5, ..KeySource::default() };
    let err = PatternKeyStream::generate(&source, &KeyQuantizer::default(), 4).unwrap_err();
    assert!(matches!(err, wds_core::WdsError::KeyStarvation(_)));
}
