//! Signal patterns: the sets of signal classes an eavesdropper must tell apart.

use serde::{Deserialize, Serialize};

use super::{BandPlan, Bcf, WaveformConfig};
use crate::error::{Result, WdsError};

/// Per-sub-band β of the three mixed adaptive multi-band classes, sub-band 0 first.
pub const MAMB_TABLE: [[f64; 16]; 3] = [
    [
        0.90, 0.80, 0.85, 0.90, 0.90, 0.80, 0.85, 0.80, 0.90, 0.85, 0.90, 0.85, 0.90, 0.80, 0.85,
        0.80,
    ],
    [
        0.80, 0.90, 0.80, 0.90, 0.85, 0.90, 0.80, 0.80, 0.85, 0.85, 0.80, 0.90, 0.85, 0.90, 0.80,
        0.85,
    ],
    [
        0.85, 0.85, 0.90, 0.80, 0.90, 0.85, 0.90, 0.90, 0.80, 0.85, 0.80, 0.85, 0.85, 0.80, 0.90,
        0.80,
    ],
];

/// Sub-band compression factors shared by the multi-band patterns.
pub const SUBBAND_BETAS: [f64; 3] = [0.9, 0.85, 0.8];
/// Sub-carriers per sub-band at the reference β = 0.9.
pub const REFERENCE_SUBBAND_SIZE: usize = 16;

const SB_ALPHAS: [f64; 7] = [1.0, 0.95, 0.9, 0.85, 0.8, 0.75, 0.7];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    Sb,
    Mb,
    Amb,
    Mamb,
}

impl std::str::FromStr for PatternKind {
    type Err = WdsError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sb" => Ok(PatternKind::Sb),
            "mb" => Ok(PatternKind::Mb),
            "amb" => Ok(PatternKind::Amb),
            "mamb" => Ok(PatternKind::Mamb),
            other => Err(WdsError::InvalidPlan(format!("unknown pattern '{other}'"))),
        }
    }
}

/// A named signal class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalClass {
    pub name: String,
    pub plan: BandPlan,
}

fn bcf(v: f64) -> Bcf {
    Bcf::new(v).expect("pattern constants lie in (0, 1]")
}

/// OFDM plus single-band SEFDM at α = 0.95 … 0.7 (seven classes).
pub fn sb_pattern(cfg: &WaveformConfig) -> Result<Vec<SignalClass>> {
    SB_ALPHAS
        .iter()
        .map(|&a| {
            let name = if a == 1.0 {
                "SB-OFDM".to_string()
            } else {
                format!("SB-SEFDM-{a:.2}")
            };
            Ok(SignalClass {
                name,
                plan: BandPlan::single_band(cfg, bcf(a))?,
            })
        })
        .collect()
}

/// MB-1..3: β = 0.9, 0.85, 0.8 with 16 sub-carriers per sub-band.
pub fn mb_pattern(cfg: &WaveformConfig) -> Result<Vec<SignalClass>> {
    SUBBAND_BETAS
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            Ok(SignalClass {
                name: format!("MB-{}", i + 1),
                plan: BandPlan::multi_band(cfg, bcf(b), REFERENCE_SUBBAND_SIZE)?,
            })
        })
        .collect()
}

/// AMB-1..3: β = 0.9, 0.85, 0.8 with 16, 17, 18 sub-carriers per sub-band and
/// the sub-band count of the MB pattern.
pub fn amb_pattern(cfg: &WaveformConfig) -> Result<Vec<SignalClass>> {
    let n_subbands = subband_count(cfg)?;
    SUBBAND_BETAS
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let n_sub = super::amb_subcarriers(bcf(SUBBAND_BETAS[0]), REFERENCE_SUBBAND_SIZE, bcf(b));
            Ok(SignalClass {
                name: format!("AMB-{}", i + 1),
                plan: BandPlan::adaptive_multi_band(cfg, n_subbands, bcf(b), n_sub)?,
            })
        })
        .collect()
}

/// One mixed adaptive multi-band class (`class` in 0..3) using the first
/// `cfg.n_subcarriers / 16` rows of [`MAMB_TABLE`].
pub fn mamb_table_plan(cfg: &WaveformConfig, class: usize) -> Result<BandPlan> {
    let row = MAMB_TABLE
        .get(class)
        .ok_or_else(|| WdsError::InvalidPlan(format!("no MAMB class {class}")))?;
    let n_subbands = subband_count(cfg)?;
    if n_subbands > row.len() {
        return Err(WdsError::InvalidPlan(format!(
            "MAMB table has {} sub-bands, {n_subbands} requested",
            row.len()
        )));
    }
    let betas: Vec<Bcf> = row[..n_subbands].iter().map(|&b| bcf(b)).collect();
    BandPlan::mixed_from_betas(cfg, &betas, bcf(SUBBAND_BETAS[0]), REFERENCE_SUBBAND_SIZE)
}

/// MAMB-1..3 from [`MAMB_TABLE`].
pub fn mamb_pattern(cfg: &WaveformConfig) -> Result<Vec<SignalClass>> {
    (0..MAMB_TABLE.len())
        .map(|c| {
            Ok(SignalClass {
                name: format!("MAMB-{}", c + 1),
                plan: mamb_table_plan(cfg, c)?,
            })
        })
        .collect()
}

pub fn pattern(kind: PatternKind, cfg: &WaveformConfig) -> Result<Vec<SignalClass>> {
    match kind {
        PatternKind::Sb => sb_pattern(cfg),
        PatternKind::Mb => mb_pattern(cfg),
        PatternKind::Amb => amb_pattern(cfg),
        PatternKind::Mamb => mamb_pattern(cfg),
    }
}

fn subband_count(cfg: &WaveformConfig) -> Result<usize> {
    if !cfg.n_subcarriers.is_multiple_of(REFERENCE_SUBBAND_SIZE) {
        return Err(WdsError::InvalidPlan(format!(
            "{} sub-carriers is not a multiple of {REFERENCE_SUBBAND_SIZE}",
            cfg.n_subcarriers
        )));
    }
    Ok(cfg.n_subcarriers / REFERENCE_SUBBAND_SIZE)
}
