//! Evaluation quantities: bit error rate, signal classification accuracy,
//! power consumption and the Monte-Carlo harness that measures them.

mod confusion;
mod harness;
mod power;

pub use confusion::{replay_sca, ConfusionMatrix};
pub use harness::{
    run_ber, DetectorKind, ExperimentSpec, PointReport, RxAssumption, TrialReport, BATCH_TRIALS,
    MAX_FULL_SD_DIM,
};
pub use power::{power, Framework, PowerModelParams};

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Result, WdsError};

/// Two-sided 95 % standard-normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Point estimate with a confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub es_n0_db: f64,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Gaussian tail probability `Q(x) = ½ erfc(x/√2)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// QPSK symbols carry two bits, so `Es = 2 Eb`.
pub fn es_n0_from_eb_n0(eb_n0_db: f64) -> f64 {
    eb_n0_db + 10.0 * 2f64.log10()
}

pub fn eb_n0_from_es_n0(es_n0_db: f64) -> f64 {
    es_n0_db - 10.0 * 2f64.log10()
}

/// Gray-coded QPSK over AWGN: `Q(√(2 Eb/N0))`.
pub fn qpsk_ber_theory(eb_n0_db: f64) -> f64 {
    q_function((2.0 * 10f64.powf(eb_n0_db / 10.0)).sqrt())
}

/// Signal classification accuracy `(1/λ) Σ N_C/N_T`.
pub fn sca(class_hits: &[u64], trials: &[u64]) -> Result<f64> {
    if class_hits.is_empty() || class_hits.len() != trials.len() {
        return Err(WdsError::LengthMismatch {
            expected: trials.len().max(1),
            actual: class_hits.len(),
        });
    }
    let mut total = 0.0;
    for (i, (&h, &t)) in class_hits.iter().zip(trials).enumerate() {
        if t == 0 || h > t {
            return Err(WdsError::OutOfRange(format!(
                "class {i}: {h} hits out of {t} trials"
            )));
        }
        total += h as f64 / t as f64;
    }
    Ok(total / class_hits.len() as f64)
}

/// Chance accuracy `ψ = 1/ϖ` against `n_classes` equally likely classes.
pub fn accuracy_approx(n_classes: u128) -> Result<f64> {
    if n_classes == 0 {
        return Err(WdsError::OutOfRange("at least one class is required".into()));
    }
    Ok(1.0 / n_classes as f64)
}

/// Relative accuracy loss when going from `from` to `to` classes.
pub fn accuracy_drop(from: u128, to: u128) -> Result<f64> {
    Ok(1.0 - accuracy_approx(to)? / accuracy_approx(from)?)
}

/// Upper bound `b^(n_subbands)` on the number of mixed classes.
pub fn max_classes(b: u32, n_subbands: u32) -> Result<u128> {
    (b as u128)
        .checked_pow(n_subbands)
        .ok_or_else(|| WdsError::OutOfRange(format!("{b}^{n_subbands} overflows")))
}
