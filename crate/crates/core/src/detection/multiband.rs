use num_complex::Complex64;
use std::ops::Range;
use std::sync::Arc;

use super::{DetectionResult, SdFactor, ZfFilter};
use crate::error::{Result, WdsError};
use crate::waveform::{BandPlan, ComplexSignal, CorrelationMatrix, SefdmModem, WaveformConfig};

/// Receiver that demodulates with one plan and sphere-decodes each sub-band on
/// its own, using that sub-band's `n_sub × n_sub` correlation matrix.
///
/// Factorisations are computed once, so a receiver can be shared across
/// threads and reused for every trial.
#[derive(Debug)]
pub struct MultibandReceiver {
    modem: SefdmModem,
    factors: Vec<Arc<SdFactor>>,
    zf: Vec<ZfFilter>,
    ranges: Vec<Range<usize>>,
}

impl MultibandReceiver {
    pub fn new(rx_plan: &BandPlan) -> Result<Self> {
        let modem = SefdmModem::new(rx_plan.clone())?;
        let mut factors = Vec::with_capacity(rx_plan.n_subbands());
        let mut zf = Vec::with_capacity(rx_plan.n_subbands());
        for i in 0..rx_plan.n_subbands() {
            let c = CorrelationMatrix::subband(rx_plan, i);
            factors.push(Arc::new(SdFactor::new(&c.entries)?));
            zf.push(ZfFilter::new(&c.entries)?);
        }
        Ok(MultibandReceiver {
            modem,
            factors,
            zf,
            ranges: rx_plan.subband_ranges(),
        })
    }

    pub fn plan(&self) -> &BandPlan {
        self.modem.plan()
    }

    pub fn demodulate(&self, signal: &ComplexSignal) -> Result<Vec<Complex64>> {
        self.modem.demodulate(signal)
    }

    /// Per-sub-band sphere decoding of an already demodulated vector.
    pub fn detect_demodulated(&self, r: &[Complex64]) -> Result<DetectionResult> {
        let mut symbols = Vec::with_capacity(r.len());
        let mut visited = 0;
        let mut erasures = 0;
        let mut metric = 0.0;
        for ((range, factor), zf) in self.ranges.iter().zip(&self.factors).zip(&self.zf) {
            let rb = &r[range.clone()];
            match factor.decode(rb) {
                Ok(res) => {
                    visited += res.visited_nodes;
                    erasures += res.erasures;
                    metric += res.metric;
                    symbols.extend(res.symbols);
                }
                Err(WdsError::NoSolution { .. }) => {
                    erasures += 1;
                    let s = zf.decide(rb);
                    metric += super::residual(factor.corr(), rb, &s);
                    symbols.extend(s);
                }
                Err(e) => return Err(e),
            }
        }
        Ok(DetectionResult {
            symbols,
            visited_nodes: visited,
            found: erasures == 0,
            metric,
            erasures,
        })
    }

    pub fn detect(&self, signal: &ComplexSignal) -> Result<DetectionResult> {
        let r = self.demodulate(signal)?;
        self.detect_demodulated(&r)
    }

    /// Zero forcing per sub-band.
    pub fn zf_demodulated(&self, r: &[Complex64]) -> Vec<Complex64> {
        self.ranges
            .iter()
            .zip(&self.zf)
            .flat_map(|(range, zf)| zf.decide(&r[range.clone()]))
            .collect()
    }
}

/// Demodulates `signal` (transmitted with `plan`) using `rx_plan` and
/// sphere-decodes every sub-band independently. Guard bins never enter the
/// demodulated vector.
pub fn detect_multiband(
    signal: &ComplexSignal,
    cfg: &WaveformConfig,
    plan: &BandPlan,
    rx_plan: &BandPlan,
) -> Result<DetectionResult> {
    if signal.len() != cfg.n_time_samples() {
        return Err(WdsError::LengthMismatch {
            expected: cfg.n_time_samples(),
            actual: signal.len(),
        });
    }
    if rx_plan.n_data() != plan.n_data() {
        return Err(WdsError::InvalidPlan(format!(
            "receiver plan carries {} symbols, transmitter {}",
            rx_plan.n_data(),
            plan.n_data()
        )));
    }
    MultibandReceiver::new(rx_plan)?.detect(signal)
}
