//! Pattern keys from a logistic chaotic map.
//!
//! Both legitimate endpoints hold the same `(γ, f, φ₀, η)` quadruple and so
//! iterate the same map in lockstep. Every iterate above the threshold `η` is
//! quantised to a compression factor; iterates at or below it are skipped.
//!
//! The map is evaluated in IEEE double precision as `(γ·φ)·(1−φ)`. Chaotic
//! maps amplify any re-association of that product within a few dozen
//! steps, so the expression order is part of the key format.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WdsError};
use crate::waveform::{BandPlan, Bcf, WaveformConfig};

/// Iterations without an emitted key before generation gives up.
pub const MAX_SKIP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    #[default]
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaoticState {
    pub gamma: f64,
    pub phi: f64,
    pub map_kind: MapKind,
    pub step: u64,
}

impl ChaoticState {
    pub fn new(gamma: f64, phi0: f64) -> Result<Self> {
        let s = ChaoticState {
            gamma,
            phi: phi0,
            map_kind: MapKind::Logistic,
            step: 0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0 && self.gamma < 4.0) {
            return Err(WdsError::InvalidChaoticState(format!(
                "gamma {} outside (1, 4)",
                self.gamma
            )));
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(WdsError::InvalidChaoticState(format!(
                "phi {} outside (0, 1)",
                self.phi
            )));
        }
        Ok(())
    }
}

/// `φ_{k+1} = γ·φ_k·(1 − φ_k)`.
pub fn next_state(state: &ChaoticState) -> Result<ChaoticState> {
    state.validate()?;
    let phi = match state.map_kind {
        MapKind::Logistic => (state.gamma * state.phi) * (1.0 - state.phi),
    };
    let next = ChaoticState {
        phi,
        step: state.step + 1,
        ..*state
    };
    next.validate()?;
    Ok(next)
}

/// Half-open bin `(lower, upper]` mapped to a key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyBin {
    pub lower: f64,
    pub upper: f64,
    pub key: Bcf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyQuantizer {
    pub eta: f64,
    pub bins: Vec<KeyBin>,
}

impl Default for KeyQuantizer {
    /// `η = 0.75` with bins `(0.75, 0.8] → 0.8`, `(0.8, 0.85] → 0.85`, `(0.85, 0.9] → 0.9`.
    fn default() -> Self {
        let edges = [0.75, 0.8, 0.85, 0.9];
        KeyQuantizer {
            eta: edges[0],
            bins: edges
                .windows(2)
                .map(|w| KeyBin {
                    lower: w[0],
                    upper: w[1],
                    key: Bcf::new(w[1]).expect("bin edges lie in (0, 1]"),
                })
                .collect(),
        }
    }
}

impl KeyQuantizer {
    /// Bins of equal width from `eta` up to `top`, each keyed by its upper edge.
    pub fn uniform(eta: f64, top: f64, n_bins: usize) -> Result<Self> {
        if n_bins == 0 {
            return Err(WdsError::InvalidQuantizer("no bins".into()));
        }
        let width = (top - eta) / n_bins as f64;
        let mut bins = Vec::with_capacity(n_bins);
        for i in 0..n_bins {
            let lower = if i == 0 { eta } else { eta + width * i as f64 };
            let upper = if i + 1 == n_bins { top } else { eta + width * (i + 1) as f64 };
            bins.push(KeyBin {
                lower,
                upper,
                key: Bcf::new(upper).map_err(|_| WdsError::InvalidQuantizer(format!("key {upper}")))?,
            });
        }
        let q = KeyQuantizer { eta, bins };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(WdsError::InvalidQuantizer(format!("eta {} outside (0, 1)", self.eta)));
        }
        let first = self
            .bins
            .first()
            .ok_or_else(|| WdsError::InvalidQuantizer("no bins".into()))?;
        if first.lower != self.eta {
            return Err(WdsError::InvalidQuantizer(format!(
                "first bin starts at {}, threshold is {}",
                first.lower, self.eta
            )));
        }
        for (i, b) in self.bins.iter().enumerate() {
            if !(b.lower < b.upper) {
                return Err(WdsError::InvalidQuantizer(format!("bin {i} is empty")));
            }
            if i > 0 && self.bins[i - 1].upper != b.lower {
                return Err(WdsError::InvalidQuantizer(format!(
                    "bin {i} does not start where bin {} ends",
                    i - 1
                )));
            }
        }
        Ok(())
    }

    /// Key for `value`, or `None` when it is at or below `η` or above the last bin.
    pub fn quantize(&self, value: f64) -> Option<Bcf> {
        if value <= self.eta {
            return None;
        }
        self.bins
            .iter()
            .find(|b| value > b.lower && value <= b.upper)
            .map(|b| b.key)
    }

    /// Distinct keys in bin order.
    pub fn alphabet(&self) -> Vec<Bcf> {
        self.bins.iter().map(|b| b.key).collect()
    }
}

/// Everything two endpoints must share to generate the same key stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeySource {
    pub gamma: f64,
    pub phi0: f64,
    #[serde(default)]
    pub map_kind: MapKind,
    pub eta: f64,
    /// Iterations discarded before the first key is considered.
    #[serde(default)]
    pub warmup: u64,
}

impl Default for KeySource {
    fn default() -> Self {
        KeySource {
            gamma: 3.9,
            phi0: 0.85,
            map_kind: MapKind::Logistic,
            eta: 0.75,
            warmup: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternKeyStream {
    pub source: KeySource,
    pub keys: Vec<Bcf>,
}

/// Advances the map from `state`, emitting `count` keys.
pub fn emit_keys(state: &ChaoticState, quantizer: &KeyQuantizer, count: usize) -> Result<PatternKeyStream> {
    quantizer.validate()?;
    let source = KeySource {
        gamma: state.gamma,
        phi0: state.phi,
        map_kind: state.map_kind,
        eta: quantizer.eta,
        warmup: 0,
    };
    let (keys, _) = run(*state, quantizer, count)?;
    Ok(PatternKeyStream { source, keys })
}

fn run(mut state: ChaoticState, quantizer: &KeyQuantizer, count: usize) -> Result<(Vec<Bcf>, ChaoticState)> {
    let mut keys = Vec::with_capacity(count);
    let mut idle = 0u64;
    while keys.len() < count {
        state = next_state(&state)?;
        match quantizer.quantize(state.phi) {
            Some(k) => {
                keys.push(k);
                idle = 0;
            }
            None => {
                idle += 1;
                if idle >= MAX_SKIP {
                    return Err(WdsError::KeyStarvation(idle));
                }
            }
        }
    }
    Ok((keys, state))
}

impl PatternKeyStream {
    /// Generates `count` keys from a shared source. The quantizer's threshold
    /// must equal `source.eta`.
    pub fn generate(source: &KeySource, quantizer: &KeyQuantizer, count: usize) -> Result<Self> {
        if quantizer.eta != source.eta {
            return Err(WdsError::InvalidQuantizer(format!(
                "quantizer threshold {} differs from source threshold {}",
                quantizer.eta, source.eta
            )));
        }
        quantizer.validate()?;
        let mut state = ChaoticState {
            gamma: source.gamma,
            phi: source.phi0,
            map_kind: source.map_kind,
            step: 0,
        };
        state.validate()?;
        for _ in 0..source.warmup {
            state = next_state(&state)?;
        }
        let (keys, _) = run(state, quantizer, count)?;
        Ok(PatternKeyStream {
            source: source.clone(),
            keys,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        self.keys.iter().map(|k| k.value()).collect()
    }

    /// Structured-text export: the source table followed by the key list.
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("key streams always serialise")
    }

    pub fn from_text(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| WdsError::Config {
            location: e
                .span()
                .map(|s| format!("byte {}", s.start))
                .unwrap_or_else(|| "key stream".into()),
            message: e.message().to_string(),
        })
    }
}

/// True iff both streams carry identical keys.
pub fn paired_check(a: &PatternKeyStream, b: &PatternKeyStream) -> bool {
    a.keys == b.keys
}

/// Raw map iterates `φ₁ … φ_len` starting from `phi0`.
pub fn trajectory(gamma: f64, phi0: f64, len: usize) -> Result<Vec<f64>> {
    let mut s = ChaoticState::new(gamma, phi0)?;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        s = next_state(&s)?;
        out.push(s.phi);
    }
    Ok(out)
}

/// Mixed adaptive multi-band plan whose per-sub-band compressions are the
/// first `N/16` keys of `stream`.
pub fn plan_from_keys(cfg: &WaveformConfig, stream: &PatternKeyStream) -> Result<BandPlan> {
    use crate::waveform::REFERENCE_SUBBAND_SIZE;
    let n_subbands = cfg.n_subcarriers / REFERENCE_SUBBAND_SIZE;
    if n_subbands == 0 || stream.keys.len() < n_subbands {
        return Err(WdsError::InvalidPlan(format!(
            "{} keys cannot configure {n_subbands} sub-bands",
            stream.keys.len()
        )));
    }
    let reference = stream
        .keys
        .iter()
        .cloned()
        .fold(Bcf::new(f64::MIN_POSITIVE)?, |a, b| if b > a { b } else { a });
    BandPlan::mixed_from_betas(cfg, &stream.keys[..n_subbands], reference, REFERENCE_SUBBAND_SIZE)
}
