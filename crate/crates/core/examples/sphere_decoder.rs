//! Matched filter, zero forcing and sphere decoding on a strongly compressed
//! single-band symbol.
//!
//! cargo run --release --example sphere_decoder

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wds_core::channel::ChannelModel;
use wds_core::detection::{demodulate_with_plan, mf_decide, sphere_decode, zf_decide, SdWorkspace};
use wds_core::waveform::{BandPlan, Bcf, Constellation, SefdmModem, WaveformConfig};

fn main() -> wds_core::Result<()> {
    let cfg = WaveformConfig::with_subcarriers(16)?;
    let plan = BandPlan::single_band(&cfg, Bcf::new(0.7)?)?;
    let modem = SefdmModem::new(plan.clone())?;
    let q = Constellation::Qpsk;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trials = 300;

    for es_n0 in [5.0, 10.0, 15.0, 20.0] {
        let channel = ChannelModel::awgn(es_n0);
        let (mut mf, mut zf, mut sd, mut nodes) = (0, 0, 0, 0u64);
        for _ in 0..trials {
            let s: Vec<_> = (0..16).map(|_| q.point(rng.random_range(0..4))).collect();
            let y = channel.apply(&modem.modulate(&s)?, &mut rng)?.received;
            let obs = demodulate_with_plan(&y, &plan)?;
            let count = |d: &[_]| s.iter().zip(d).filter(|(a, b)| a != b).count();
            mf += count(&mf_decide(&obs));
            zf += count(&zf_decide(&obs)?);
            let res = sphere_decode(&obs, &mut SdWorkspace::new(&obs)?)?;
            sd += count(&res.symbols);
            nodes += res.visited_nodes;
        }
        let n = (trials * 16) as f64;
        println!(
            "Es/N0 {es_n0:>4} dB  SER mf {:.3e}  zf {:.3e}  sd {:.3e}  nodes/symbol {:.0}",
            mf as f64 / n,
            zf as f64 / n,
            sd as f64 / n,
            nodes as f64 / trials as f64
        );
    }
    Ok(())
}
