//! Passes a symbol through AWGN and a three-tap Rayleigh channel, then undoes
//! the multipath with a one-tap frequency-domain equaliser.
//!
//! cargo run --example channel

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wds_core::channel::{equalize, ChannelModel};
use wds_core::waveform::{BandPlan, Bcf, Constellation, SefdmModem, WaveformConfig};

fn main() -> wds_core::Result<()> {
    let cfg = WaveformConfig::with_subcarriers(64)?;
    let modem = SefdmModem::new(BandPlan::single_band(&cfg, Bcf::new(0.9)?)?)?;
    let s: Vec<_> = (0..64).map(|k| Constellation::Qpsk.point(k % 4)).collect();
    let x = modem.modulate(&s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let awgn = ChannelModel::awgn(10.0).apply(&x, &mut rng)?;
    let measured = awgn.noise.noise.samples.iter().map(|w| w.norm_sqr()).sum::<f64>() / x.len() as f64;
    println!("AWGN 10 dB: target noise variance {:.4}, measured {measured:.4}", awgn.noise.variance);

    let mp = ChannelModel::multipath_default(40.0).apply(&x, &mut rng)?;
    println!("multipath condition number {:.2}", mp.state.condition_number());
    let eq = equalize(&mp.received, &mp.state)?;
    let err: f64 = eq.samples.iter().zip(&x.samples).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>()
        / x.samples.iter().map(|v| v.norm_sqr()).sum::<f64>();
    println!("relative error after equalisation at 40 dB: {err:.2e}");
    Ok(())
}
