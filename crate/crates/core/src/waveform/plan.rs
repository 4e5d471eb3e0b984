use serde::{Deserialize, Serialize};
use std::ops::Range;

use super::{transform_size, Bcf, WaveformConfig};
use crate::error::{Result, WdsError};

/// Empty sub-carriers between adjacent sub-bands.
pub const GUARD_SUBCARRIERS: usize = 1;

// Slack when snapping a continuous frequency onto an integer bin.
const BIN_SNAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlanKind {
    #[serde(rename = "sb")]
    SingleBand,
    #[serde(rename = "mb")]
    MultiBand,
    #[serde(rename = "amb")]
    AdaptiveMultiBand,
    #[serde(rename = "mamb")]
    MixedAdaptiveMultiBand,
}

impl PlanKind {
    pub fn label(self) -> &'static str {
        match self {
            PlanKind::SingleBand => "SB",
            PlanKind::MultiBand => "MB",
            PlanKind::AdaptiveMultiBand => "AMB",
            PlanKind::MixedAdaptiveMultiBand => "MAMB",
        }
    }
}

/// One contiguous group of equally spaced sub-carriers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubBand {
    pub beta: Bcf,
    pub n_sub: usize,
    /// First occupied bin (ε) on this sub-band's own `M = round(Q/β)` grid.
    pub freq_offset: usize,
}

/// Full description of one signal class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPlan {
    pub kind: PlanKind,
    pub n_time_samples: usize,
    pub guard: usize,
    pub subbands: Vec<SubBand>,
}

/// Sub-band compression keeping the multi-band signal as wide as the
/// single-band one: `β = αN / (N + N/n_b − 1)`.
pub fn effective_beta(alpha: Bcf, n: usize, n_b: usize) -> Result<Bcf> {
    if n_b == 0 || !n.is_multiple_of(n_b) {
        return Err(WdsError::InvalidPlan(format!(
            "{n} sub-carriers cannot be split into sub-bands of {n_b}"
        )));
    }
    let slots = n + n / n_b - 1;
    Bcf::new(alpha.value() * n as f64 / slots as f64)
}

/// Sub-carriers a sub-band of compression `beta` needs to span the same
/// bandwidth as `n_ref` sub-carriers at `beta_ref`, rounded to the nearest count.
pub fn amb_subcarriers(beta_ref: Bcf, n_ref: usize, beta: Bcf) -> usize {
    (beta_ref.value() * n_ref as f64 / beta.value()).round() as usize
}

/// MB plan whose occupied bandwidth matches an SB signal of compression `alpha`.
pub fn build_mb_plan(cfg: &WaveformConfig, alpha: Bcf, n_b: usize) -> Result<BandPlan> {
    let beta = effective_beta(alpha, cfg.n_subcarriers, n_b)?;
    BandPlan::multi_band(cfg, beta, n_b)
}

/// Occupied bandwidth in units of the orthogonal sub-carrier spacing.
pub fn occupied_bandwidth(plan: &BandPlan) -> f64 {
    plan.occupied_bandwidth()
}

impl BandPlan {
    pub fn single_band(cfg: &WaveformConfig, alpha: Bcf) -> Result<Self> {
        cfg.validate()?;
        let q = cfg.n_time_samples();
        let subbands = layout_single_grid(q, alpha, 1, cfg.n_subcarriers, 0, cfg.max_transform)?;
        Ok(BandPlan {
            kind: PlanKind::SingleBand,
            n_time_samples: q,
            guard: GUARD_SUBCARRIERS,
            subbands,
        })
    }

    /// `N/n_b` sub-bands of `n_b` sub-carriers each, all at `beta`, on one grid.
    pub fn multi_band(cfg: &WaveformConfig, beta: Bcf, n_b: usize) -> Result<Self> {
        cfg.validate()?;
        if n_b == 0 || !cfg.n_subcarriers.is_multiple_of(n_b) {
            return Err(WdsError::InvalidPlan(format!(
                "{} sub-carriers cannot be split into sub-bands of {n_b}",
                cfg.n_subcarriers
            )));
        }
        let q = cfg.n_time_samples();
        let count = cfg.n_subcarriers / n_b;
        let subbands =
            layout_single_grid(q, beta, count, n_b, GUARD_SUBCARRIERS, cfg.max_transform)?;
        Ok(BandPlan {
            kind: PlanKind::MultiBand,
            n_time_samples: q,
            guard: GUARD_SUBCARRIERS,
            subbands,
        })
    }

    /// `n_subbands` sub-bands of `n_sub` sub-carriers at a common `beta`. The
    /// sub-band count is kept while extra sub-carriers widen each sub-band.
    pub fn adaptive_multi_band(
        cfg: &WaveformConfig,
        n_subbands: usize,
        beta: Bcf,
        n_sub: usize,
    ) -> Result<Self> {
        cfg.validate()?;
        if n_subbands == 0 || n_sub == 0 {
            return Err(WdsError::InvalidPlan("empty AMB plan".into()));
        }
        let q = cfg.n_time_samples();
        let subbands =
            layout_single_grid(q, beta, n_subbands, n_sub, GUARD_SUBCARRIERS, cfg.max_transform)?;
        Ok(BandPlan {
            kind: PlanKind::AdaptiveMultiBand,
            n_time_samples: q,
            guard: GUARD_SUBCARRIERS,
            subbands,
        })
    }

    /// Mixed plan: each `(β, n_sub)` entry becomes a sub-band on its own grid,
    /// placed one guard bin after its predecessor.
    pub fn mixed(cfg: &WaveformConfig, entries: &[(Bcf, usize)]) -> Result<Self> {
        cfg.validate()?;
        let q = cfg.n_time_samples();
        let subbands = layout_mixed(q, entries, GUARD_SUBCARRIERS, cfg.max_transform)?;
        let plan = BandPlan {
            kind: PlanKind::MixedAdaptiveMultiBand,
            n_time_samples: q,
            guard: GUARD_SUBCARRIERS,
            subbands,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Mixed plan from a β sequence, sizing each sub-band to match
    /// `n_ref` sub-carriers at `beta_ref`.
    pub fn mixed_from_betas(
        cfg: &WaveformConfig,
        betas: &[Bcf],
        beta_ref: Bcf,
        n_ref: usize,
    ) -> Result<Self> {
        let entries: Vec<_> = betas
            .iter()
            .map(|&b| (b, amb_subcarriers(beta_ref, n_ref, b)))
            .collect();
        Self::mixed(cfg, &entries)
    }

    /// Checks every structural invariant of the plan.
    pub fn validate(&self) -> Result<()> {
        if self.subbands.is_empty() {
            return Err(WdsError::InvalidPlan("plan has no sub-bands".into()));
        }
        if self.n_time_samples == 0 {
            return Err(WdsError::InvalidPlan("plan has no time samples".into()));
        }
        if self.guard != GUARD_SUBCARRIERS {
            return Err(WdsError::InvalidPlan(format!(
                "guard must be {GUARD_SUBCARRIERS} sub-carrier"
            )));
        }
        let first = self.subbands[0];
        match self.kind {
            PlanKind::SingleBand if self.subbands.len() != 1 => {
                return Err(WdsError::InvalidPlan("SB plan needs exactly one sub-band".into()));
            }
            PlanKind::MultiBand | PlanKind::AdaptiveMultiBand => {
                for sb in &self.subbands[1..] {
                    if sb.beta != first.beta || sb.n_sub != first.n_sub {
                        return Err(WdsError::InvalidPlan(format!(
                            "{} sub-bands must share β and size",
                            self.kind.label()
                        )));
                    }
                }
                for (i, pair) in self.subbands.windows(2).enumerate() {
                    if pair[1].freq_offset != pair[0].freq_offset + pair[0].n_sub + self.guard {
                        return Err(WdsError::InvalidPlan(format!(
                            "sub-band {} is not one guard bin after sub-band {i}",
                            i + 1
                        )));
                    }
                }
            }
            PlanKind::MixedAdaptiveMultiBand => {
                let width = |sb: &SubBand| sb.beta.value() * sb.n_sub as f64;
                let widest_bin = self
                    .subbands
                    .iter()
                    .map(|sb| sb.beta.value())
                    .fold(0.0, f64::max);
                let w0 = width(&first);
                for (i, sb) in self.subbands.iter().enumerate() {
                    if (width(sb) - w0).abs() > widest_bin + 1e-9 {
                        return Err(WdsError::InvalidPlan(format!(
                            "MAMB sub-band {i} spans {:.3} bins, sub-band 0 spans {w0:.3}",
                            width(sb)
                        )));
                    }
                }
            }
            _ => {}
        }
        for (i, sb) in self.subbands.iter().enumerate() {
            if sb.n_sub == 0 {
                return Err(WdsError::InvalidPlan(format!("sub-band {i} is empty")));
            }
            let m = self.grid_size(i);
            if sb.freq_offset + sb.n_sub > m {
                return Err(WdsError::InvalidPlan(format!(
                    "sub-band {i} runs past its {m}-bin grid"
                )));
            }
        }
        for i in 1..self.subbands.len() {
            let prev_last = self.last_frequency(i - 1);
            let next_first = self.first_frequency(i);
            if next_first <= prev_last {
                return Err(WdsError::OverlappingSubbands { index: i });
            }
            // Mixed grids snap to the nearest bin, so half a bin of slack.
            let min_gap = (self.guard as f64 + 0.5) / self.grid_size(i) as f64;
            if next_first - prev_last < min_gap - 1e-9 {
                return Err(WdsError::InvalidPlan(format!(
                    "sub-band {i} lacks a guard sub-carrier"
                )));
            }
        }
        Ok(())
    }

    /// Inverse-transform size `M = round(Q/β)` of sub-band `index`.
    pub fn grid_size(&self, index: usize) -> usize {
        (self.n_time_samples as f64 / self.subbands[index].beta.value()).round() as usize
    }

    /// Compression actually realised on the integer grid, `Q/M`.
    pub fn realized_beta(&self, index: usize) -> f64 {
        self.n_time_samples as f64 / self.grid_size(index) as f64
    }

    pub fn n_subbands(&self) -> usize {
        self.subbands.len()
    }

    /// Total data sub-carriers `Σ n_sub`.
    pub fn n_data(&self) -> usize {
        self.subbands.iter().map(|sb| sb.n_sub).sum()
    }

    /// Positions of each sub-band's symbols inside the concatenated symbol vector.
    pub fn subband_ranges(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.subbands
            .iter()
            .map(|sb| {
                let r = start..start + sb.n_sub;
                start = r.end;
                r
            })
            .collect()
    }

    /// Normalised frequencies (cycles per sample) of sub-band `index`.
    pub fn subband_frequencies(&self, index: usize) -> Vec<f64> {
        let sb = self.subbands[index];
        let m = self.grid_size(index) as f64;
        (0..sb.n_sub)
            .map(|i| (sb.freq_offset + i) as f64 / m)
            .collect()
    }

    /// Frequencies of every data sub-carrier, in symbol order.
    pub fn carrier_frequencies(&self) -> Vec<f64> {
        (0..self.subbands.len())
            .flat_map(|i| self.subband_frequencies(i))
            .collect()
    }

    fn first_frequency(&self, index: usize) -> f64 {
        self.subbands[index].freq_offset as f64 / self.grid_size(index) as f64
    }

    fn last_frequency(&self, index: usize) -> f64 {
        let sb = self.subbands[index];
        (sb.freq_offset + sb.n_sub - 1) as f64 / self.grid_size(index) as f64
    }

    /// Span covered by sub-carriers and guards, in orthogonal-spacing units.
    pub fn occupied_bandwidth(&self) -> f64 {
        let last = self.subbands.len() - 1;
        let q = self.n_time_samples as f64;
        (self.last_frequency(last) - self.first_frequency(0)) * q + self.realized_beta(last)
    }

    /// The plan a receiver builds when it believes every sub-band is compressed
    /// by `β + delta`: same sub-band sizes, laid out on the shifted grids.
    pub fn with_bcf_offset(&self, delta: f64, max_transform: usize) -> Result<Self> {
        let shifted: Vec<(Bcf, usize)> = self
            .subbands
            .iter()
            .map(|sb| Ok((Bcf::new(sb.beta.value() + delta)?, sb.n_sub)))
            .collect::<Result<_>>()?;
        let q = self.n_time_samples;
        let subbands = match self.kind {
            PlanKind::MixedAdaptiveMultiBand => layout_mixed(q, &shifted, self.guard, max_transform)?,
            PlanKind::SingleBand => layout_single_grid(q, shifted[0].0, 1, shifted[0].1, 0, max_transform)?,
            PlanKind::MultiBand | PlanKind::AdaptiveMultiBand => layout_single_grid(
                q,
                shifted[0].0,
                shifted.len(),
                shifted[0].1,
                self.guard,
                max_transform,
            )?,
        };
        Ok(BandPlan {
            subbands,
            ..self.clone()
        })
    }

    pub fn data_betas(&self) -> Vec<f64> {
        self.subbands.iter().map(|sb| sb.beta.value()).collect()
    }
}

/// Centred layout of equal sub-bands on one `M`-point grid.
fn layout_single_grid(
    q: usize,
    beta: Bcf,
    count: usize,
    n_sub: usize,
    guard: usize,
    max: usize,
) -> Result<Vec<SubBand>> {
    if count == 0 || n_sub == 0 {
        return Err(WdsError::InvalidPlan("empty sub-band layout".into()));
    }
    let m = transform_size(q, beta, max)?;
    let slots = count * n_sub + (count - 1) * guard;
    if slots > m {
        return Err(WdsError::InvalidPlan(format!(
            "{slots} occupied bins do not fit a {m}-point grid"
        )));
    }
    let start = (m - slots) / 2;
    Ok((0..count)
        .map(|l| SubBand {
            beta,
            n_sub,
            freq_offset: start + l * (n_sub + guard),
        })
        .collect())
}

/// Cumulative layout for sub-bands living on different grids. Each sub-band
/// starts `guard + 1` bins (of its own grid, rounded to the nearest bin) past
/// the previous sub-band's last carrier; the composite is centred on the band.
fn layout_mixed(
    q: usize,
    entries: &[(Bcf, usize)],
    guard: usize,
    max: usize,
) -> Result<Vec<SubBand>> {
    if entries.is_empty() {
        return Err(WdsError::InvalidPlan("mixed plan needs at least one sub-band".into()));
    }
    let grids: Vec<usize> = entries
        .iter()
        .map(|&(b, _)| transform_size(q, b, max))
        .collect::<Result<_>>()?;
    let mut span = 0.0;
    for (l, (&(_, n), &m)) in entries.iter().zip(&grids).enumerate() {
        if n == 0 {
            return Err(WdsError::InvalidPlan(format!("sub-band {l} is empty")));
        }
        span += (n - 1) as f64 / m as f64;
        if l > 0 {
            span += (guard + 1) as f64 / m as f64;
        }
    }
    if span >= 1.0 {
        return Err(WdsError::InvalidPlan("mixed plan does not fit the band".into()));
    }
    let f0 = 0.5 - span / 2.0;
    let mut out = Vec::with_capacity(entries.len());
    let mut prev_last: Option<f64> = None;
    for (l, (&(beta, n_sub), &m)) in entries.iter().zip(&grids).enumerate() {
        let start = match prev_last {
            None => (f0 * m as f64 - 0.5 + BIN_SNAP).floor().max(0.0) as usize,
            Some(f) => (f * m as f64 + (guard + 1) as f64 + BIN_SNAP).round() as usize,
        };
        if start + n_sub > m {
            return Err(WdsError::InvalidPlan(format!(
                "sub-band {l} runs past its {m}-bin grid"
            )));
        }
        prev_last = Some((start + n_sub - 1) as f64 / m as f64);
        out.push(SubBand {
            beta,
            n_sub,
            freq_offset: start,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bcf(v: f64) -> Bcf {
        Bcf::new(v).unwrap()
    }

    #[test]
    fn effective_beta_examples() {
        assert_eq!(effective_beta(bcf(1.0), 256, 256).unwrap().value(), 1.0);
        let b = effective_beta(bcf(0.8), 256, 16).unwrap().value();
        assert!((b - 204.8 / 271.0).abs() < 1e-15);
        assert!((b - 0.755720).abs() < 1e-6);
        assert!(effective_beta(bcf(0.8), 250, 16).is_err());
        assert!(effective_beta(bcf(0.8), 256, 0).is_err());
    }

    #[test]
    fn single_band_is_centred_on_grid() {
        let cfg = WaveformConfig::new(16, 2).unwrap();
        let plan = BandPlan::single_band(&cfg, bcf(0.8)).unwrap();
        assert_eq!(plan.grid_size(0), 40);
        assert_eq!(plan.subbands[0].freq_offset, 12);
        assert_eq!(plan.n_data(), 16);
        plan.validate().unwrap();
    }

    #[test]
    fn mb_plan_layout_and_bandwidth() {
        let cfg = WaveformConfig::new(256, 8).unwrap();
        let plan = build_mb_plan(&cfg, bcf(0.8), 16).unwrap();
        assert_eq!(plan.n_subbands(), 16);
        assert_eq!(plan.n_data(), 256);
        assert_eq!(plan.grid_size(0), 2710);
        for pair in plan.subbands.windows(2) {
            assert_eq!(pair[1].freq_offset - pair[0].freq_offset, 17);
        }
        let sb = BandPlan::single_band(&cfg, bcf(0.8)).unwrap();
        assert!((sb.occupied_bandwidth() - 204.8).abs() < 1e-9);
        assert!((plan.occupied_bandwidth() - 204.8).abs() <= plan.realized_beta(0));
    }

    #[test]
    fn degenerate_mb_is_single_band() {
        let cfg = WaveformConfig::new(32, 4).unwrap();
        let mb = build_mb_plan(&cfg, bcf(1.0), 32).unwrap();
        let sb = BandPlan::single_band(&cfg, bcf(1.0)).unwrap();
        assert_eq!(mb.subbands, sb.subbands);
        assert!((mb.occupied_bandwidth() - 32.0).abs() < 1e-12);
    }

    #[test]
    fn amb_counts_match_reference_bandwidth() {
        assert_eq!(amb_subcarriers(bcf(0.9), 16, bcf(0.9)), 16);
        assert_eq!(amb_subcarriers(bcf(0.9), 16, bcf(0.85)), 17);
        assert_eq!(amb_subcarriers(bcf(0.9), 16, bcf(0.8)), 18);
        for (beta, n) in [(0.85, 17usize), (0.8, 18)] {
            let lhs = 0.9 * 16.0;
            let rhs = beta * n as f64;
            assert!((lhs - rhs).abs() <= beta / 2.0);
        }
    }

    #[test]
    fn mixed_with_equal_betas_matches_amb_layout() {
        let cfg = WaveformConfig::new(64, 4).unwrap();
        let b = bcf(0.85);
        let amb = BandPlan::adaptive_multi_band(&cfg, 4, b, 17).unwrap();
        let mixed = BandPlan::mixed(&cfg, &[(b, 17); 4]).unwrap();
        assert_eq!(amb.subbands, mixed.subbands);
    }

    #[test]
    fn mixed_plan_keeps_guard_between_grids() {
        let cfg = WaveformConfig::new(256, 8).unwrap();
        let betas: Vec<Bcf> = [0.9, 0.8, 0.85, 0.9].iter().map(|&v| bcf(v)).collect();
        let plan = BandPlan::mixed_from_betas(&cfg, &betas, bcf(0.9), 16).unwrap();
        assert_eq!(
            plan.subbands.iter().map(|s| s.n_sub).collect::<Vec<_>>(),
            vec![16, 18, 17, 16]
        );
        plan.validate().unwrap();
    }

    #[test]
    fn overlapping_subbands_rejected() {
        let cfg = WaveformConfig::new(32, 4).unwrap();
        let mut plan = BandPlan::mixed(&cfg, &[(bcf(0.9), 16), (bcf(0.9), 16)]).unwrap();
        plan.subbands[1].freq_offset = plan.subbands[0].freq_offset + 4;
        assert!(matches!(
            plan.validate(),
            Err(WdsError::OverlappingSubbands { index: 1 })
        ));
        plan.subbands[1].freq_offset = plan.subbands[0].freq_offset + 16;
        assert!(matches!(plan.validate(), Err(WdsError::InvalidPlan(_))));
    }

    #[test]
    fn bcf_offset_relayouts_receiver_plan() {
        let cfg = WaveformConfig::new(16, 8).unwrap();
        let plan = BandPlan::single_band(&cfg, bcf(0.8)).unwrap();
        let rx = plan.with_bcf_offset(0.05, cfg.max_transform).unwrap();
        assert_eq!(rx.subbands[0].beta.value(), 0.8 + 0.05);
        assert_eq!(rx.grid_size(0), (128.0f64 / 0.85).round() as usize);
        assert!(plan.with_bcf_offset(0.3, cfg.max_transform).is_err());
    }
}
