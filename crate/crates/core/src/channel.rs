//! AWGN and block-fading multipath channels with ideal zero-forcing equalisation.
//!
//! Noise is scaled against a unit-energy symbol on each sub-carrier: with the
//! `1/√Q` modulator scaling, a time-domain noise variance `σ² = 10^(−Es/N0/10)`
//! gives every demodulated sub-carrier the requested Es/N0.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WdsError};
use crate::waveform::{ComplexSignal, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Awgn,
    MultipathRayleigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    pub delay: usize,
    pub mean_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub kind: ChannelKind,
    /// `f64::INFINITY` switches the noise off.
    pub es_n0_db: f64,
    #[serde(default)]
    pub taps: Vec<Tap>,
    #[serde(default)]
    pub seed: u64,
}

/// Time-domain noise draw and the variance it was drawn with.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    pub noise: ComplexSignal,
    pub variance: f64,
}

/// Realised channel matrix `H`: identity or a circulant built from the taps.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelState {
    Identity { len: usize },
    Circulant { len: usize, taps: Vec<(usize, Complex64)> },
}

#[derive(Debug, Clone)]
pub struct ChannelOutput {
    pub received: ComplexSignal,
    pub state: ChannelState,
    pub noise: NoiseRealization,
}

/// Per-sample complex noise variance for a unit-energy symbol at `es_n0_db`.
pub fn noise_variance(es_n0_db: f64) -> f64 {
    if es_n0_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-es_n0_db / 10.0)
    }
}

/// Circularly-symmetric complex Gaussian samples of total variance `variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, len: usize, variance: f64) -> Vec<Complex64> {
    let sd = (variance / 2.0).sqrt();
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * sd, im * sd)
        })
        .collect()
}

impl ChannelModel {
    pub fn awgn(es_n0_db: f64) -> Self {
        ChannelModel {
            kind: ChannelKind::Awgn,
            es_n0_db,
            taps: Vec::new(),
            seed: 0,
        }
    }

    /// Three taps at delays 0, 1, 2 samples with a 3 dB per-tap exponential decay.
    pub fn multipath_default(es_n0_db: f64) -> Self {
        let raw: Vec<f64> = (0..3).map(|i| 10f64.powf(-0.3 * i as f64)).collect();
        let total: f64 = raw.iter().sum();
        ChannelModel {
            kind: ChannelKind::MultipathRayleigh,
            es_n0_db,
            taps: raw
                .iter()
                .enumerate()
                .map(|(delay, p)| Tap {
                    delay,
                    mean_power: p / total,
                })
                .collect(),
            seed: 0,
        }
    }

    pub fn with_es_n0(&self, es_n0_db: f64) -> Self {
        ChannelModel {
            es_n0_db,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.es_n0_db.is_nan() || self.es_n0_db == f64::NEG_INFINITY {
            return Err(WdsError::InvalidChannel(format!(
                "Es/N0 {} dB is not usable",
                self.es_n0_db
            )));
        }
        if self.kind == ChannelKind::MultipathRayleigh {
            if self.taps.is_empty() {
                return Err(WdsError::InvalidChannel("multipath model has no taps".into()));
            }
            if self.taps.iter().any(|t| !(t.mean_power >= 0.0)) {
                return Err(WdsError::InvalidChannel("negative tap power".into()));
            }
            let total: f64 = self.taps.iter().map(|t| t.mean_power).sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(WdsError::InvalidChannel(format!(
                    "tap powers sum to {total}, expected 1"
                )));
            }
        }
        Ok(())
    }

    /// `y = H x + w`.
    pub fn apply<R: Rng + ?Sized>(&self, signal: &ComplexSignal, rng: &mut R) -> Result<ChannelOutput> {
        self.validate()?;
        if signal.domain != Domain::Time {
            return Err(WdsError::InvalidChannel("channel expects a time-domain signal".into()));
        }
        let len = signal.len();
        let (mut y, state) = match self.kind {
            ChannelKind::Awgn => (signal.samples.clone(), ChannelState::Identity { len }),
            ChannelKind::MultipathRayleigh => {
                if let Some(t) = self.taps.iter().find(|t| t.delay >= len) {
                    return Err(WdsError::InvalidChannel(format!(
                        "tap delay {} not below symbol length {len}",
                        t.delay
                    )));
                }
                let taps: Vec<(usize, Complex64)> = self
                    .taps
                    .iter()
                    .map(|t| (t.delay, complex_gaussian(rng, 1, t.mean_power)[0]))
                    .collect();
                let state = ChannelState::Circulant { len, taps };
                (state.apply(&signal.samples), state)
            }
        };
        let variance = noise_variance(self.es_n0_db);
        let w = if variance > 0.0 {
            complex_gaussian(rng, len, variance)
        } else {
            vec![Complex64::new(0.0, 0.0); len]
        };
        for (yk, wk) in y.iter_mut().zip(&w) {
            *yk += wk;
        }
        Ok(ChannelOutput {
            received: ComplexSignal::time(y, signal.power_scale),
            state,
            noise: NoiseRealization {
                noise: ComplexSignal::time(w, 1.0),
                variance,
            },
        })
    }
}

impl ChannelState {
    pub fn len(&self) -> usize {
        match self {
            ChannelState::Identity { len } | ChannelState::Circulant { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Circular convolution with the tap impulse response.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        match self {
            ChannelState::Identity { .. } => x.to_vec(),
            ChannelState::Circulant { len, taps } => {
                let q = *len;
                (0..q)
                    .map(|k| {
                        taps.iter()
                            .map(|&(d, h)| h * x[(k + q - d) % q])
                            .sum()
                    })
                    .collect()
            }
        }
    }

    /// Eigenvalues of the circulant: the `Q`-point DFT of the impulse response.
    pub fn frequency_response(&self) -> Vec<Complex64> {
        match self {
            ChannelState::Identity { len } => vec![Complex64::new(1.0, 0.0); *len],
            ChannelState::Circulant { len, taps } => {
                let mut h = vec![Complex64::new(0.0, 0.0); *len];
                for &(d, g) in taps {
                    h[d] += g;
                }
                FftPlanner::new().plan_fft_forward(*len).process(&mut h);
                h
            }
        }
    }

    /// Dense `Q×Q` channel matrix.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        match self {
            ChannelState::Identity { len } => DMatrix::identity(*len, *len),
            ChannelState::Circulant { len, taps } => {
                let q = *len;
                let mut m = DMatrix::zeros(q, q);
                for k in 0..q {
                    for &(d, g) in taps {
                        m[(k, (k + q - d) % q)] += g;
                    }
                }
                m
            }
        }
    }

    pub fn condition_number(&self) -> f64 {
        let h = self.frequency_response();
        let max = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let min = h.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        max / min
    }
}

// Condition numbers above this are treated as singular.
const MAX_CONDITION: f64 = 1e12;

/// `ŷ = H⁻¹ y`, as a per-bin division in the DFT domain.
pub fn equalize(received: &ComplexSignal, state: &ChannelState) -> Result<ComplexSignal> {
    if received.len() != state.len() {
        return Err(WdsError::LengthMismatch {
            expected: state.len(),
            actual: received.len(),
        });
    }
    match state {
        ChannelState::Identity { .. } => Ok(received.clone()),
        ChannelState::Circulant { len, .. } => {
            let condition = state.condition_number();
            if !condition.is_finite() || condition > MAX_CONDITION {
                return Err(WdsError::SingularChannel { condition });
            }
            let h = state.frequency_response();
            let mut planner = FftPlanner::new();
            let mut buf = received.samples.clone();
            planner.plan_fft_forward(*len).process(&mut buf);
            for (b, hk) in buf.iter_mut().zip(&h) {
                *b /= hk;
            }
            planner.plan_fft_inverse(*len).process(&mut buf);
            let scale = 1.0 / *len as f64;
            for b in &mut buf {
                *b *= scale;
            }
            Ok(ComplexSignal::time(buf, received.power_scale))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn signal(len: usize, seed: u64) -> ComplexSignal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexSignal::time(complex_gaussian(&mut rng, len, 1.0), 1.0)
    }

    #[test]
    fn noiseless_awgn_is_identity() {
        let x = signal(64, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = ChannelModel::awgn(f64::INFINITY).apply(&x, &mut rng).unwrap();
        assert_eq!(out.received.samples, x.samples);
        assert_eq!(out.noise.variance, 0.0);
    }

    #[test]
    fn default_profile_is_normalised() {
        let m = ChannelModel::multipath_default(10.0);
        m.validate().unwrap();
        assert_eq!(m.taps.len(), 3);
        let ratio = m.taps[1].mean_power / m.taps[0].mean_power;
        assert!((10.0 * ratio.log10() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_models() {
        let x = signal(8, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut m = ChannelModel::multipath_default(10.0);
        m.taps[2].delay = 8;
        assert!(matches!(m.apply(&x, &mut rng), Err(WdsError::InvalidChannel(_))));
        let mut m = ChannelModel::multipath_default(10.0);
        m.taps[0].mean_power = 0.9;
        assert!(m.validate().is_err());
        assert!(ChannelModel::awgn(f64::NAN).validate().is_err());
        let f = ComplexSignal::frequency(x.samples.clone());
        assert!(ChannelModel::awgn(0.0).apply(&f, &mut rng).is_err());
    }

    #[test]
    fn diagonal_channel_is_inverted() {
        // Single tap at delay 0: H is a scaled identity.
        let state = ChannelState::Circulant {
            len: 16,
            taps: vec![(0, Complex64::new(0.3, -1.2))],
        };
        let x = signal(16, 5);
        let y = ComplexSignal::time(state.apply(&x.samples), 1.0);
        let xe = equalize(&y, &state).unwrap();
        for (a, b) in xe.samples.iter().zip(&x.samples) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn singular_channel_reported() {
        // h = [1, 1] has a spectral null at half the sampling rate.
        let state = ChannelState::Circulant {
            len: 8,
            taps: vec![(0, Complex64::new(1.0, 0.0)), (1, Complex64::new(1.0, 0.0))],
        };
        let y = ComplexSignal::time(vec![Complex64::new(1.0, 0.0); 8], 1.0);
        assert!(matches!(equalize(&y, &state), Err(WdsError::SingularChannel { .. })));
    }

    #[test]
    fn fixed_seed_reproduces() {
        let x = signal(32, 6);
        let m = ChannelModel::multipath_default(5.0);
        let a = m.apply(&x, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = m.apply(&x, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a.received, b.received);
        assert_eq!(a.state, b.state);
    }
}
