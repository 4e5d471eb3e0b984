use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use super::{BandPlan, Bcf, WaveformConfig};
use crate::error::Result;

/// Normalised Dirichlet kernel `Q^{-1} Σ_{k<Q} exp(j2π x k)`.
///
/// Closed form: `exp(jπ(Q−1)x) · sinc(πQx) / sinc(πx)` (with `sinc(u) = sin u / u`),
/// which for `x = α(m−n)/Q` is the sinc-ratio correlation of two SEFDM sub-carriers.
pub fn dirichlet(x: f64, q: usize) -> Complex64 {
    let qf = q as f64;
    let den = (PI * x).sin();
    let phase = Complex64::from_polar(1.0, PI * (qf - 1.0) * x);
    if den.abs() < 1e-13 {
        // x on an integer: every term of the sum is 1.
        return Complex64::from_polar(1.0, PI * (qf - 1.0) * (x - x.round()));
    }
    phase * ((PI * qf * x).sin() / (qf * den))
}

/// `C = F_rx^H F_tx`: correlation between the sub-carriers a signal was built
/// with and the ones a receiver demodulates against.
///
/// Entry `(m, n)` is `Q^{-1} Σ_k exp(j2π (f_tx[n] − f_rx[m]) k)`, so a
/// noise-free demodulated vector obeys `r = C s`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub entries: DMatrix<Complex64>,
    pub tx_bcf: Bcf,
    pub rx_bcf: Bcf,
}

impl CorrelationMatrix {
    pub fn from_frequencies(
        tx_freqs: &[f64],
        rx_freqs: &[f64],
        q: usize,
        tx_bcf: Bcf,
        rx_bcf: Bcf,
    ) -> Self {
        let entries = DMatrix::from_fn(rx_freqs.len(), tx_freqs.len(), |m, n| {
            if m == n && tx_freqs[n] == rx_freqs[m] {
                Complex64::new(1.0, 0.0)
            } else {
                dirichlet(tx_freqs[n] - rx_freqs[m], q)
            }
        });
        CorrelationMatrix {
            entries,
            tx_bcf,
            rx_bcf,
        }
    }

    /// Single-band correlation for a transmitter at `tx` and a receiver at `rx`.
    pub fn single_band(cfg: &WaveformConfig, tx: Bcf, rx: Bcf) -> Result<Self> {
        let tx_plan = BandPlan::single_band(cfg, tx)?;
        let rx_plan = BandPlan::single_band(cfg, rx)?;
        Ok(Self::from_frequencies(
            &tx_plan.carrier_frequencies(),
            &rx_plan.carrier_frequencies(),
            cfg.n_time_samples(),
            tx,
            rx,
        ))
    }

    /// Correlation of sub-band `index` of `plan` with itself, as a receiver that
    /// trusts `plan` would build it.
    pub fn subband(plan: &BandPlan, index: usize) -> Self {
        let f = plan.subband_frequencies(index);
        let b = plan.subbands[index].beta;
        Self::from_frequencies(&f, &f, plan.n_time_samples, b, b)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_matched(&self) -> bool {
        self.tx_bcf == self.rx_bcf
    }

    pub fn apply(&self, s: &[Complex64]) -> Vec<Complex64> {
        (0..self.entries.nrows())
            .map(|m| {
                s.iter()
                    .enumerate()
                    .map(|(n, &sn)| self.entries[(m, n)] * sn)
                    .sum()
            })
            .collect()
    }

    /// Ratio of extreme singular values.
    pub fn condition_number(&self) -> f64 {
        let sv = self.entries.clone().singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }
}

/// Correlation matrix of an `N`-carrier single-band signal modulated at
/// `tx_bcf` and demodulated at `rx_bcf`.
pub fn correlation_matrix(cfg: &WaveformConfig, tx_bcf: Bcf, rx_bcf: Bcf) -> Result<CorrelationMatrix> {
    CorrelationMatrix::single_band(cfg, tx_bcf, rx_bcf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bcf(v: f64) -> Bcf {
        Bcf::new(v).unwrap()
    }

    #[test]
    fn dirichlet_matches_sum() {
        let q = 37;
        for &x in &[0.0, 0.013, -0.21, 0.5, 0.9999, 1e-9, -0.4] {
            let direct: Complex64 = (0..q)
                .map(|k| Complex64::from_polar(1.0, 2.0 * PI * x * k as f64))
                .sum::<Complex64>()
                / q as f64;
            assert!((dirichlet(x, q) - direct).norm() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn orthogonal_correlation_is_identity() {
        let cfg = WaveformConfig::new(64, 4).unwrap();
        let c = correlation_matrix(&cfg, Bcf::ORTHOGONAL, Bcf::ORTHOGONAL).unwrap();
        let eye = DMatrix::<Complex64>::identity(64, 64);
        assert!((c.entries - eye).camax() < 1e-12);
    }

    #[test]
    fn matched_correlation_is_hermitian_unit_diagonal() {
        let cfg = WaveformConfig::new(24, 4).unwrap();
        let c = correlation_matrix(&cfg, bcf(0.8), bcf(0.8)).unwrap();
        for m in 0..24 {
            assert!((c.entries[(m, m)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            for n in 0..24 {
                assert!((c.entries[(m, n)] - c.entries[(n, m)].conj()).norm() < 1e-12);
            }
        }
        assert!(c.is_matched());
    }

    #[test]
    fn condition_grows_as_packing_tightens() {
        let cfg = WaveformConfig::new(16, 4).unwrap();
        let conds: Vec<f64> = [1.0, 0.95, 0.9, 0.85, 0.8, 0.75, 0.7]
            .iter()
            .map(|&a| correlation_matrix(&cfg, bcf(a), bcf(a)).unwrap().condition_number())
            .collect();
        assert!((conds[0] - 1.0).abs() < 1e-9);
        for w in conds.windows(2) {
            assert!(w[1] > w[0], "{conds:?}");
        }
    }
}
