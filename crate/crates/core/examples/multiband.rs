//! Legitimate receiver against an eavesdropper whose compression guess is off
//! by 0.05 on a mixed adaptive multi-band symbol.
//!
//! cargo run --release --example multiband

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wds_core::channel::ChannelModel;
use wds_core::detection::MultibandReceiver;
use wds_core::waveform::{mamb_table_plan, Constellation, SefdmModem, WaveformConfig};

fn main() -> wds_core::Result<()> {
    let cfg = WaveformConfig::with_subcarriers(256)?;
    let plan = mamb_table_plan(&cfg, 0)?;
    let modem = SefdmModem::new(plan.clone())?;
    let bob = MultibandReceiver::new(&plan)?;
    let eve = MultibandReceiver::new(&plan.with_bcf_offset(0.05, 1 << 20)?)?;
    println!("{} sub-bands, {} data sub-carriers", plan.n_subbands(), plan.n_data());

    let q = Constellation::Qpsk;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for es_n0 in [6.0, 10.0, 14.0, 20.0] {
        let channel = ChannelModel::awgn(es_n0);
        let (mut bits, mut e_bob, mut e_eve) = (0usize, 0usize, 0usize);
        for _ in 0..20 {
            let idx: Vec<usize> = (0..plan.n_data()).map(|_| rng.random_range(0..4)).collect();
            let s: Vec<_> = idx.iter().map(|&i| q.point(i)).collect();
            let y = channel.apply(&modem.modulate(&s)?, &mut rng)?.received;
            let errors = |d: &[num_complex::Complex64]| -> usize {
                idx.iter()
                    .zip(d)
                    .map(|(&i, &z)| {
                        let (a, b) = (q.bits_of(i), q.bits_of(q.decide_index(z)));
                        usize::from(a[0] != b[0]) + usize::from(a[1] != b[1])
                    })
                    .sum()
            };
            e_bob += errors(&bob.detect(&y)?.symbols);
            e_eve += errors(&eve.detect(&y)?.symbols);
            bits += 2 * idx.len();
        }
        println!(
            "Es/N0 {es_n0:>4} dB  BER legitimate {:.2e}  eavesdropper {:.3}",
            e_bob as f64 / bits as f64,
            e_eve as f64 / bits as f64
        );
    }
    Ok(())
}
