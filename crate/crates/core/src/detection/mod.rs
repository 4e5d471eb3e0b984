//! Symbol detection for SEFDM observations.
//!
//! A demodulated observation obeys `r = C s + z`, where `C` carries the
//! self-created inter-carrier interference. Three detectors are provided: the
//! matched filter (hard decision on `r`), zero forcing (hard decision on
//! `C⁻¹ r`) and a complex-valued sphere decoder returning the minimiser of
//! `‖r − C s‖²` over the QPSK lattice.

mod complexity;
mod multiband;
mod sphere;

pub use complexity::{fft_complexity, sd_complexity_bound};
pub use multiband::{detect_multiband, MultibandReceiver};
pub use sphere::{sphere_decode, DetectionResult, SdFactor, SdWorkspace, DEFAULT_NODE_BUDGET};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, WdsError};
use crate::waveform::{BandPlan, Bcf, ComplexSignal, Constellation, CorrelationMatrix, SefdmModem, WaveformConfig};

/// Pivots of the correlation factorisations below this magnitude are singular.
pub const PIVOT_TOLERANCE: f64 = 1e-10;

/// Demodulated vector `r` and the correlation matrix the receiver detects with.
///
/// `corr` is the receiver's own belief `C(rx, rx)`. When the receiver's
/// compression factor is wrong the observation is not `corr · s`; that gap is
/// what makes eavesdropping fail.
#[derive(Debug, Clone)]
pub struct DemodObservation {
    pub r: Vec<Complex64>,
    pub corr: CorrelationMatrix,
}

impl DemodObservation {
    pub fn new(r: Vec<Complex64>, corr: CorrelationMatrix) -> Result<Self> {
        if r.len() != corr.dim() {
            return Err(WdsError::LengthMismatch {
                expected: corr.dim(),
                actual: r.len(),
            });
        }
        Ok(DemodObservation { r, corr })
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }

    /// `‖r − C s‖²` under the receiver's matrix.
    pub fn residual(&self, s: &[Complex64]) -> f64 {
        residual(&self.corr.entries, &self.r, s)
    }
}

pub(crate) fn residual(c: &DMatrix<Complex64>, r: &[Complex64], s: &[Complex64]) -> f64 {
    let cs = c * DVector::from_column_slice(s);
    r.iter().zip(cs.iter()).map(|(a, b)| (a - b).norm_sqr()).sum()
}

/// Demodulates with the receiver's plan and builds its full-band correlation matrix.
pub fn demodulate_with_plan(signal: &ComplexSignal, rx_plan: &BandPlan) -> Result<DemodObservation> {
    let modem = SefdmModem::new(rx_plan.clone())?;
    let r = modem.demodulate(signal)?;
    let f = rx_plan.carrier_frequencies();
    let b = rx_plan.subbands[0].beta;
    let corr = CorrelationMatrix::from_frequencies(&f, &f, rx_plan.n_time_samples, b, b);
    DemodObservation::new(r, corr)
}

/// Demodulates `signal`, transmitted with `plan`, at compression `rx_bcf`.
///
/// The receiver keeps the sub-band sizes of `plan` and shifts every sub-band's
/// compression by `rx_bcf − β₀`, so `rx_bcf` equal to the first sub-band's β
/// is the matched receiver.
pub fn demodulate(
    signal: &ComplexSignal,
    cfg: &WaveformConfig,
    rx_bcf: Bcf,
    plan: &BandPlan,
) -> Result<DemodObservation> {
    let delta = rx_bcf.value() - plan.subbands[0].beta.value();
    let rx_plan = if delta == 0.0 {
        plan.clone()
    } else {
        plan.with_bcf_offset(delta, cfg.max_transform)?
    };
    demodulate_with_plan(signal, &rx_plan)
}

/// Hard decision on `r` itself.
pub fn mf_decide(obs: &DemodObservation) -> Vec<Complex64> {
    obs.r.iter().map(|&z| Constellation::Qpsk.decide(z)).collect()
}

/// Precomputed `C⁻¹` for repeated zero-forcing decisions.
#[derive(Debug, Clone)]
pub struct ZfFilter {
    inverse: DMatrix<Complex64>,
}

impl ZfFilter {
    pub fn new(corr: &DMatrix<Complex64>) -> Result<Self> {
        Ok(ZfFilter {
            inverse: checked_inverse(corr)?,
        })
    }

    pub fn inverse(&self) -> &DMatrix<Complex64> {
        &self.inverse
    }

    /// Unquantised estimate `C⁻¹ r`.
    pub fn soft(&self, r: &[Complex64]) -> Vec<Complex64> {
        (&self.inverse * DVector::from_column_slice(r)).as_slice().to_vec()
    }

    pub fn decide(&self, r: &[Complex64]) -> Vec<Complex64> {
        self.soft(r)
            .into_iter()
            .map(|z| Constellation::Qpsk.decide(z))
            .collect()
    }
}

/// Hard decision on `C⁻¹ r`.
pub fn zf_decide(obs: &DemodObservation) -> Result<Vec<Complex64>> {
    Ok(ZfFilter::new(&obs.corr.entries)?.decide(&obs.r))
}

/// LU inverse that reports a near-zero pivot instead of returning garbage.
pub(crate) fn checked_inverse(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let lu = m.clone().lu();
    let u = lu.u();
    let scale = u.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = u.diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !(pivot > PIVOT_TOLERANCE * scale.max(1.0)) {
        return Err(WdsError::SingularCorrelation {
            pivot,
            tolerance: PIVOT_TOLERANCE,
        });
    }
    lu.try_inverse().ok_or(WdsError::SingularCorrelation {
        pivot,
        tolerance: PIVOT_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform::SefdmModem;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_qpsk(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| Constellation::Qpsk.point(rng.random_range(0..4))).collect()
    }

    #[test]
    fn orthogonal_observation_is_the_symbols() {
        let cfg = WaveformConfig::new(16, 4).unwrap();
        let plan = BandPlan::single_band(&cfg, Bcf::ORTHOGONAL).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_qpsk(&mut rng, 16);
        let x = SefdmModem::new(plan.clone()).unwrap().modulate(&s).unwrap();
        let obs = demodulate(&x, &cfg, Bcf::ORTHOGONAL, &plan).unwrap();
        for (a, b) in obs.r.iter().zip(&s) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(mf_decide(&obs), s);
        assert_eq!(zf_decide(&obs).unwrap(), s);
    }

    #[test]
    fn noiseless_observation_is_c_times_s() {
        let cfg = WaveformConfig::new(16, 4).unwrap();
        let a = Bcf::new(0.8).unwrap();
        let plan = BandPlan::single_band(&cfg, a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = random_qpsk(&mut rng, 16);
        let x = SefdmModem::new(plan.clone()).unwrap().modulate(&s).unwrap();
        let obs = demodulate(&x, &cfg, a, &plan).unwrap();
        assert!(obs.residual(&s) < 1e-18);
        assert_eq!(zf_decide(&obs).unwrap(), s);

        let wrong = demodulate(&x, &cfg, Bcf::new(0.85).unwrap(), &plan).unwrap();
        assert!(wrong.residual(&s) > 1e-3);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = DMatrix::from_element(3, 3, Complex64::new(1.0, 0.0));
        assert!(matches!(checked_inverse(&m), Err(WdsError::SingularCorrelation { .. })));
    }

    #[test]
    fn length_checked() {
        let cfg = WaveformConfig::new(4, 2).unwrap();
        let c = crate::waveform::correlation_matrix(&cfg, Bcf::ORTHOGONAL, Bcf::ORTHOGONAL).unwrap();
        assert!(DemodObservation::new(vec![Complex64::new(0.0, 0.0); 3], c).is_err());
    }
}
