use serde::{Deserialize, Serialize};

use crate::error::{Result, WdsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Framework {
    DigitalBf,
    HybridBf,
    AnalogBf,
    Wds,
}

impl Framework {
    pub const ALL: [Framework; 4] = [Framework::Wds, Framework::AnalogBf, Framework::HybridBf, Framework::DigitalBf];

    pub fn label(self) -> &'static str {
        match self {
            Framework::DigitalBf => "digital-bf",
            Framework::HybridBf => "hybrid-bf",
            Framework::AnalogBf => "analog-bf",
            Framework::Wds => "wds",
        }
    }
}

impl std::str::FromStr for Framework {
    type Err = WdsError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "digital-bf" | "digital" | "digitalbf" => Ok(Framework::DigitalBf),
            "hybrid-bf" | "hybrid" | "hybridbf" => Ok(Framework::HybridBf),
            "analog-bf" | "analog" | "analogbf" => Ok(Framework::AnalogBf),
            "wds" => Ok(Framework::Wds),
            other => Err(WdsError::OutOfRange(format!("unknown framework '{other}'"))),
        }
    }
}

/// Transmitter component powers in mW.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PowerModelParams {
    pub p_lo: f64,
    pub p_dac: f64,
    pub p_mixer: f64,
    pub p_filter: f64,
    pub p_tx: f64,
    pub p_ps: f64,
    /// Power-amplifier efficiency.
    pub xi: f64,
    pub n_rf_full: u32,
    pub n_rf_hybrid: u32,
    pub n_ps: u32,
}

impl Default for PowerModelParams {
    fn default() -> Self {
        PowerModelParams {
            p_lo: 22.0,
            p_dac: 170.0,
            p_mixer: 5.0,
            p_filter: 14.0,
            p_tx: 200.0,
            p_ps: 10.0,
            xi: 0.5,
            n_rf_full: 6,
            n_rf_hybrid: 2,
            n_ps: 6,
        }
    }
}

impl PowerModelParams {
    pub fn validate(&self) -> Result<()> {
        let powers = [self.p_lo, self.p_dac, self.p_mixer, self.p_filter, self.p_tx, self.p_ps];
        if powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(WdsError::OutOfRange("component powers must be finite and non-negative".into()));
        }
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(WdsError::OutOfRange(format!("efficiency {} outside (0, 1]", self.xi)));
        }
        Ok(())
    }

    fn chain(&self) -> f64 {
        self.p_dac + self.p_mixer + self.p_filter
    }

    fn radiated(&self) -> f64 {
        self.p_tx / self.xi
    }
}

/// Transmitter power consumption in mW.
pub fn power(framework: Framework, params: &PowerModelParams) -> Result<f64> {
    params.validate()?;
    let p = params;
    Ok(match framework {
        Framework::DigitalBf => p.p_lo + p.n_rf_full as f64 * (p.chain() + p.radiated()),
        Framework::HybridBf => {
            p.p_lo + p.n_rf_hybrid as f64 * p.chain() + p.n_ps as f64 * (p.p_ps + p.radiated())
        }
        Framework::AnalogBf => p.p_lo + p.chain() + p.n_ps as f64 * (p.p_ps + p.radiated()),
        Framework::Wds => p.p_lo + p.chain() + p.radiated(),
    })
}
