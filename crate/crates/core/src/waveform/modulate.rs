use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use super::{BandPlan, Bcf, ComplexSignal, WaveformConfig};
use crate::error::{Result, WdsError};

struct Grid {
    size: usize,
    inverse: Arc<dyn Fft<f64>>,
    forward: Arc<dyn Fft<f64>>,
    members: Vec<usize>,
}

/// Transform-based modulator/demodulator bound to one [`BandPlan`].
///
/// Sub-bands sharing a grid size are synthesised by a single inverse
/// transform; by linearity this equals one transform per sub-band.
pub struct SefdmModem {
    plan: BandPlan,
    grids: Vec<Grid>,
    ranges: Vec<std::ops::Range<usize>>,
    scale: f64,
}

impl std::fmt::Debug for SefdmModem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SefdmModem")
            .field("plan", &self.plan)
            .field("grids", &self.grids.iter().map(|g| g.size).collect::<Vec<_>>())
            .finish()
    }
}

impl SefdmModem {
    pub fn new(plan: BandPlan) -> Result<Self> {
        plan.validate()?;
        let mut planner = FftPlanner::<f64>::new();
        let mut grids: Vec<Grid> = Vec::new();
        for i in 0..plan.n_subbands() {
            let size = plan.grid_size(i);
            match grids.iter_mut().find(|g| g.size == size) {
                Some(g) => g.members.push(i),
                None => grids.push(Grid {
                    size,
                    inverse: planner.plan_fft_inverse(size),
                    forward: planner.plan_fft_forward(size),
                    members: vec![i],
                }),
            }
        }
        let ranges = plan.subband_ranges();
        let scale = 1.0 / (plan.n_time_samples as f64).sqrt();
        Ok(SefdmModem {
            plan,
            grids,
            ranges,
            scale,
        })
    }

    pub fn plan(&self) -> &BandPlan {
        &self.plan
    }

    pub fn n_time_samples(&self) -> usize {
        self.plan.n_time_samples
    }

    /// `x_k = Q^{-1/2} Σ_n s_n exp(j2π f_n k)` for `k < Q`, evaluated through
    /// zero-padded `M`-point inverse transforms truncated to `Q` samples.
    pub fn modulate(&self, symbols: &[Complex64]) -> Result<ComplexSignal> {
        let n = self.plan.n_data();
        if symbols.len() != n {
            return Err(WdsError::LengthMismatch {
                expected: n,
                actual: symbols.len(),
            });
        }
        let q = self.plan.n_time_samples;
        let mut out = vec![Complex64::new(0.0, 0.0); q];
        for grid in &self.grids {
            let mut buf = vec![Complex64::new(0.0, 0.0); grid.size];
            for &i in &grid.members {
                let start = self.plan.subbands[i].freq_offset;
                let src = &symbols[self.ranges[i].clone()];
                buf[start..start + src.len()].copy_from_slice(src);
            }
            grid.inverse.process(&mut buf);
            for (o, b) in out.iter_mut().zip(&buf[..q]) {
                *o += b;
            }
        }
        for o in &mut out {
            *o *= self.scale;
        }
        Ok(ComplexSignal::time(out, self.scale))
    }

    /// Matched demodulation `r = F^H y` on this plan's sub-carrier grid, all
    /// sub-bands concatenated in plan order.
    pub fn demodulate(&self, signal: &ComplexSignal) -> Result<Vec<Complex64>> {
        let q = self.plan.n_time_samples;
        if signal.len() != q {
            return Err(WdsError::LengthMismatch {
                expected: q,
                actual: signal.len(),
            });
        }
        let mut r = vec![Complex64::new(0.0, 0.0); self.plan.n_data()];
        for grid in &self.grids {
            let mut buf = vec![Complex64::new(0.0, 0.0); grid.size];
            buf[..q].copy_from_slice(&signal.samples);
            grid.forward.process(&mut buf);
            for &i in &grid.members {
                let start = self.plan.subbands[i].freq_offset;
                for (dst, src) in r[self.ranges[i].clone()].iter_mut().zip(&buf[start..]) {
                    *dst = src * self.scale;
                }
            }
        }
        Ok(r)
    }
}

/// Single-band SEFDM symbol of compression `alpha`.
pub fn modulate_single_band(
    symbols: &[Complex64],
    cfg: &WaveformConfig,
    alpha: Bcf,
) -> Result<ComplexSignal> {
    if symbols.len() != cfg.n_subcarriers {
        return Err(WdsError::LengthMismatch {
            expected: cfg.n_subcarriers,
            actual: symbols.len(),
        });
    }
    let plan = BandPlan::single_band(cfg, alpha)?;
    SefdmModem::new(plan)?.modulate(symbols)
}

/// Any band architecture; `symbols` holds `Σ n_sub` entries in sub-band order.
pub fn modulate_multi_band(
    symbols: &[Complex64],
    cfg: &WaveformConfig,
    plan: &BandPlan,
) -> Result<ComplexSignal> {
    if plan.n_time_samples != cfg.n_time_samples() {
        return Err(WdsError::InvalidPlan(format!(
            "plan built for Q={} used with Q={}",
            plan.n_time_samples,
            cfg.n_time_samples()
        )));
    }
    SefdmModem::new(plan.clone())?.modulate(symbols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform::Constellation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn qpsk(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Constellation::Qpsk.point(rng.random_range(0..4)))
            .collect()
    }

    #[test]
    fn orthogonal_case_is_plain_ifft() {
        let cfg = WaveformConfig::new(16, 4).unwrap();
        let s = qpsk(16, 1);
        let x = modulate_single_band(&s, &cfg, Bcf::ORTHOGONAL).unwrap();
        let q = 64;
        // Guard-padded vector, Q-point inverse transform, 1/sqrt(Q).
        let mut buf = vec![Complex64::new(0.0, 0.0); q];
        buf[(q - 16) / 2..(q + 16) / 2].copy_from_slice(&s);
        FftPlanner::<f64>::new().plan_fft_inverse(q).process(&mut buf);
        for (a, b) in x.samples.iter().zip(&buf) {
            assert!((a - b / (q as f64).sqrt()).norm() < 1e-12);
        }
    }

    #[test]
    fn output_length_is_q() {
        let cfg = WaveformConfig::new(256, 8).unwrap();
        let s = qpsk(256, 2);
        let x = modulate_single_band(&s, &cfg, Bcf::new(0.8).unwrap()).unwrap();
        assert_eq!(x.len(), 2048);
        assert!(x.is_finite());
    }

    #[test]
    fn length_mismatch_rejected() {
        let cfg = WaveformConfig::new(16, 2).unwrap();
        let s = qpsk(15, 3);
        assert!(matches!(
            modulate_single_band(&s, &cfg, Bcf::new(0.8).unwrap()),
            Err(WdsError::LengthMismatch { expected: 16, actual: 15 })
        ));
    }

    #[test]
    fn orthogonal_roundtrip_recovers_symbols() {
        let cfg = WaveformConfig::new(32, 8).unwrap();
        let plan = BandPlan::single_band(&cfg, Bcf::ORTHOGONAL).unwrap();
        let modem = SefdmModem::new(plan).unwrap();
        let s = qpsk(32, 4);
        let r = modem.demodulate(&modem.modulate(&s).unwrap()).unwrap();
        for (a, b) in r.iter().zip(&s) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_band_matches_direct_sum() {
        let cfg = WaveformConfig::new(16, 2).unwrap();
        let alpha = 0.8;
        let s = qpsk(16, 5);
        let x = modulate_single_band(&s, &cfg, Bcf::new(alpha).unwrap()).unwrap();
        let q = 32usize;
        let m = (q as f64 / alpha).round() as usize;
        let start = (m - 16) / 2;
        for k in 0..q {
            let direct: Complex64 = s
                .iter()
                .enumerate()
                .map(|(n, &sn)| {
                    sn * Complex64::from_polar(1.0, 2.0 * PI * ((start + n) * k) as f64 / m as f64)
                })
                .sum::<Complex64>()
                / (q as f64).sqrt();
            assert!((x.samples[k] - direct).norm() < 1e-9 * direct.norm().max(1.0));
        }
    }
}
