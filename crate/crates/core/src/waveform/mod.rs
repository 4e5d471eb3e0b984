//! SEFDM waveform construction.
//!
//! Sub-carriers of a non-orthogonal multi-carrier symbol sit on a grid of
//! spacing `α/Q` cycles per sample. Every band architecture (single band,
//! multi-band, adaptive multi-band, mixed adaptive multi-band) is described by
//! a [`BandPlan`], which places each sub-band on the bins of an `M`-point
//! inverse transform with `M = round(Q/β)`. Keeping the first `Q` outputs of
//! that transform yields the non-orthogonal symbol without evaluating the
//! `O(NQ)` sum directly.

mod correlation;
mod modulate;
mod patterns;
mod plan;

pub use correlation::{correlation_matrix, dirichlet, CorrelationMatrix};
pub use modulate::{modulate_multi_band, modulate_single_band, SefdmModem};
pub use patterns::{
    amb_pattern, mamb_pattern, mamb_table_plan, mb_pattern, pattern, sb_pattern, PatternKind,
    SignalClass, MAMB_TABLE, REFERENCE_SUBBAND_SIZE, SUBBAND_BETAS,
};
pub use plan::{
    amb_subcarriers, build_mb_plan, effective_beta, occupied_bandwidth, BandPlan, PlanKind,
    SubBand, GUARD_SUBCARRIERS,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Result, WdsError};

/// Bandwidth compression factor, `0 < α ≤ 1`. `α = 1` is orthogonal (OFDM) packing.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Bcf(f64);

impl Bcf {
    pub const ORTHOGONAL: Bcf = Bcf(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value <= 1.0 {
            Ok(Bcf(value))
        } else {
            Err(WdsError::InvalidBcf(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_orthogonal(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for Bcf {
    type Error = WdsError;
    fn try_from(value: f64) -> Result<Self> {
        Bcf::new(value)
    }
}

impl From<Bcf> for f64 {
    fn from(b: Bcf) -> f64 {
        b.0
    }
}

impl std::fmt::Display for Bcf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Spectral efficiency improvement over OFDM, in percent: `(1/α − 1)·100`.
pub fn se_gain(alpha: Bcf) -> f64 {
    (1.0 / alpha.value() - 1.0) * 100.0
}

/// Symbol alphabet. Only Gray-mapped QPSK with unit average energy is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constellation {
    #[default]
    Qpsk,
}

impl Constellation {
    /// Constellation cardinality `O`.
    pub fn cardinality(self) -> usize {
        4
    }

    pub fn bits_per_symbol(self) -> usize {
        2
    }

    /// Points in index order. Index `i` carries bits `(i >> 1, i & 1)`.
    pub fn points(self) -> [Complex64; 4] {
        let a = FRAC_1_SQRT_2;
        [
            Complex64::new(a, a),
            Complex64::new(a, -a),
            Complex64::new(-a, a),
            Complex64::new(-a, -a),
        ]
    }

    pub fn point(self, index: usize) -> Complex64 {
        self.points()[index]
    }

    /// Maps bit pairs onto symbols. A trailing odd bit is an error.
    pub fn map_bits(self, bits: &[u8]) -> Result<Vec<Complex64>> {
        if !bits.len().is_multiple_of(2) {
            return Err(WdsError::LengthMismatch {
                expected: bits.len() + 1,
                actual: bits.len(),
            });
        }
        Ok(bits
            .chunks_exact(2)
            .map(|b| self.point(((b[0] & 1) as usize) << 1 | (b[1] & 1) as usize))
            .collect())
    }

    /// Index of the nearest constellation point. Ties go to the lower index.
    pub fn decide_index(self, z: Complex64) -> usize {
        // Gray QPSK decision regions are the quadrants; a zero component counts as positive.
        let hi = usize::from(z.re < 0.0);
        let lo = usize::from(z.im < 0.0);
        hi << 1 | lo
    }

    pub fn decide(self, z: Complex64) -> Complex64 {
        self.point(self.decide_index(z))
    }

    /// Recovers the index of an exact constellation point.
    pub fn index_of(self, point: Complex64) -> usize {
        self.decide_index(point)
    }

    pub fn bits_of(self, index: usize) -> [u8; 2] {
        [(index >> 1) as u8 & 1, index as u8 & 1]
    }

    pub fn demap(self, symbols: &[Complex64]) -> Vec<u8> {
        symbols
            .iter()
            .flat_map(|&s| self.bits_of(self.decide_index(s)))
            .collect()
    }
}

/// Waveform dimensions: `N` sub-carriers, oversampling `ρ`, `Q = ρN` time samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveformConfig {
    pub n_subcarriers: usize,
    pub oversampling: usize,
    #[serde(default)]
    pub constellation: Constellation,
    /// Largest inverse transform the modulator may allocate.
    #[serde(default = "default_max_transform")]
    pub max_transform: usize,
}

fn default_max_transform() -> usize {
    1 << 20
}

pub const DEFAULT_OVERSAMPLING: usize = 8;

impl WaveformConfig {
    pub fn new(n_subcarriers: usize, oversampling: usize) -> Result<Self> {
        let cfg = WaveformConfig {
            n_subcarriers,
            oversampling,
            constellation: Constellation::Qpsk,
            max_transform: default_max_transform(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `N` sub-carriers at the default oversampling of 8.
    pub fn with_subcarriers(n_subcarriers: usize) -> Result<Self> {
        Self::new(n_subcarriers, DEFAULT_OVERSAMPLING)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_subcarriers == 0 {
            return Err(WdsError::InvalidConfig("n_subcarriers must be positive".into()));
        }
        if self.oversampling == 0 {
            return Err(WdsError::InvalidConfig("oversampling must be positive".into()));
        }
        if self.n_subcarriers.checked_mul(self.oversampling).is_none() {
            return Err(WdsError::InvalidConfig("n_subcarriers * oversampling overflows".into()));
        }
        Ok(())
    }

    /// `Q = ρN`.
    pub fn n_time_samples(&self) -> usize {
        self.n_subcarriers * self.oversampling
    }

    /// `M = round(Q/α)` with ties away from zero, bounded by `max_transform`.
    pub fn transform_size(&self, bcf: Bcf) -> Result<usize> {
        transform_size(self.n_time_samples(), bcf, self.max_transform)
    }
}

pub(crate) fn transform_size(q: usize, bcf: Bcf, max: usize) -> Result<usize> {
    let m = (q as f64 / bcf.value()).round();
    if !m.is_finite() || m > max as f64 {
        return Err(WdsError::TransformTooLarge {
            size: if m.is_finite() { m as usize } else { usize::MAX },
            max,
        });
    }
    Ok(m as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Time,
    Frequency,
}

/// Complex samples plus the amplitude scale that was applied to produce them.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    pub samples: Vec<Complex64>,
    pub domain: Domain,
    pub power_scale: f64,
}

impl ComplexSignal {
    pub fn time(samples: Vec<Complex64>, power_scale: f64) -> Self {
        ComplexSignal {
            samples,
            domain: Domain::Time,
            power_scale,
        }
    }

    pub fn frequency(samples: Vec<Complex64>) -> Self {
        ComplexSignal {
            samples,
            domain: Domain::Frequency,
            power_scale: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|s| s.re.is_finite() && s.im.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn se_gain_values() {
        assert_eq!(se_gain(Bcf::ORTHOGONAL), 0.0);
        assert!((se_gain(Bcf::new(0.8).unwrap()) - 25.0).abs() < 1e-12);
        assert!((se_gain(Bcf::new(0.5).unwrap()) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn bcf_domain() {
        assert!(Bcf::new(0.0).is_err());
        assert!(Bcf::new(-0.2).is_err());
        assert!(Bcf::new(1.01).is_err());
        assert!(Bcf::new(f64::NAN).is_err());
        assert!(Bcf::new(1.0).unwrap().is_orthogonal());
    }

    #[test]
    fn qpsk_gray_roundtrip() {
        let c = Constellation::Qpsk;
        let bits = [0u8, 0, 0, 1, 1, 0, 1, 1];
        let syms = c.map_bits(&bits).unwrap();
        for s in &syms {
            assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        }
        assert_eq!(c.demap(&syms), bits);
        // Adjacent quadrants differ in one bit.
        assert_eq!(c.bits_of(0), [0, 0]);
        assert_eq!(c.bits_of(1), [0, 1]);
        assert_eq!(c.bits_of(3), [1, 1]);
        assert!(c.map_bits(&[1]).is_err());
    }

    #[test]
    fn transform_size_rounds_to_nearest() {
        let cfg = WaveformConfig::new(256, 8).unwrap();
        assert_eq!(cfg.n_time_samples(), 2048);
        assert_eq!(cfg.transform_size(Bcf::new(0.8).unwrap()).unwrap(), 2560);
        // 2048 / 0.9 = 2275.55…
        assert_eq!(cfg.transform_size(Bcf::new(0.9).unwrap()).unwrap(), 2276);
        let tiny = WaveformConfig {
            max_transform: 2500,
            ..cfg
        };
        assert!(matches!(
            tiny.transform_size(Bcf::new(0.8).unwrap()),
            Err(WdsError::TransformTooLarge { .. })
        ));
    }
}
