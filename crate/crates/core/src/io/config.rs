use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use toml::Spanned;

use super::dataset::DatasetSpec;
use crate::channel::{ChannelKind, ChannelModel, Tap};
use crate::error::{Result, WdsError};
use crate::metrics::{ConfusionMatrix, DetectorKind, ExperimentSpec, RxAssumption};
use crate::waveform::{pattern, sb_pattern, PatternKind, SignalClass, WaveformConfig};

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "WDS_SEED";

/// Es/N0 values, either listed or as an inclusive range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            Grid::List(v) => Ok(v.clone()),
            Grid::Range { start, stop, step } => {
                if !(*step > 0.0) || stop < start {
                    return Err(WdsError::OutOfRange(format!(
                        "range {start}..{stop} step {step} is empty or unbounded"
                    )));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                Ok((0..=n).map(|k| start + step * k as f64).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformSection {
    #[serde(default = "default_n")]
    pub n_subcarriers: usize,
    #[serde(default = "default_rho")]
    pub oversampling: usize,
}

fn default_n() -> usize {
    256
}
fn default_rho() -> usize {
    crate::waveform::DEFAULT_OVERSAMPLING
}

impl Default for WaveformSection {
    fn default() -> Self {
        WaveformSection {
            n_subcarriers: default_n(),
            oversampling: default_rho(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    /// `sb`, `mb`, `amb`, `mamb`, or a single class name such as `mamb-1`.
    pub pattern: Spanned<String>,
    /// Optional subset of the pattern's classes, by name.
    #[serde(default)]
    pub classes: Option<Vec<Spanned<String>>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub es_n0_db: Option<Grid>,
    pub trials_per_point: Option<u64>,
    pub min_bit_errors: Option<u64>,
    pub detector: Option<Spanned<String>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverSection {
    /// `matched`, `mismatch` or `classifier-driven`.
    pub kind: Option<Spanned<String>>,
    pub delta: Option<f64>,
    /// `uniform`, `perfect`, or a path to a confusion-matrix file.
    pub confusion: Option<Spanned<String>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    /// `awgn` or `multipath_rayleigh`.
    pub kind: Option<Spanned<String>>,
    pub taps: Option<Vec<Tap>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub symbols_per_class: Option<u64>,
    pub es_n0_db: Option<Grid>,
}

/// Top-level run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub waveform: WaveformSection,
    pub signal: SignalSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub receiver: ReceiverSection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub dataset: DatasetSection,
    #[serde(skip)]
    source: String,
    #[serde(skip)]
    base_dir: PathBuf,
}

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ChannelChoice {
    Awgn,
    Multipath,
}

impl RunConfig {
    /// Parses configuration text. Paths inside it resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let location = match e.span() {
                Some(s) => {
                    let (l, c) = line_col(text, s.start);
                    format!("line {l}, column {c}")
                }
                None => "document".into(),
            };
            WdsError::Config {
                location,
                message: e.message().trim().to_string(),
            }
        })?;
        cfg.source = text.to_string();
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    /// Reads a file and applies the `WDS_SEED` override.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        let mut cfg = Self::parse(&text, &base)?;
        cfg.apply_seed_override(std::env::var(SEED_ENV).ok().as_deref())?;
        Ok(cfg)
    }

    pub fn apply_seed_override(&mut self, value: Option<&str>) -> Result<()> {
        if let Some(v) = value {
            self.seed = v.trim().parse().map_err(|_| WdsError::Config {
                location: format!("environment variable {SEED_ENV}"),
                message: format!("'{v}' is not an unsigned integer"),
            })?;
        }
        Ok(())
    }

    fn err_at<T>(&self, field: &str, value: &Spanned<T>, message: String) -> WdsError {
        let (l, c) = line_col(&self.source, value.span().start);
        WdsError::Config {
            location: format!("line {l}, column {c} (field `{field}`)"),
            message,
        }
    }

    fn err_field(&self, field: &str, message: String) -> WdsError {
        WdsError::Config {
            location: format!("field `{field}`"),
            message,
        }
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.signal.pattern.get_ref().clone())
    }

    pub fn waveform(&self) -> Result<WaveformConfig> {
        WaveformConfig::new(self.waveform.n_subcarriers, self.waveform.oversampling)
            .map_err(|e| self.err_field("waveform", e.to_string()))
    }

    pub fn classes(&self) -> Result<Vec<SignalClass>> {
        let cfg = self.waveform()?;
        let p = &self.signal.pattern;
        let mut classes = resolve_classes(&cfg, p.get_ref()).map_err(|e| self.err_at("signal.pattern", p, e.to_string()))?;
        if let Some(wanted) = &self.signal.classes {
            let mut picked = Vec::with_capacity(wanted.len());
            for w in wanted {
                let c = classes
                    .iter()
                    .find(|c| c.name.eq_ignore_ascii_case(w.get_ref()))
                    .ok_or_else(|| {
                        self.err_at(
                            "signal.classes",
                            w,
                            format!("class '{}' is not part of pattern '{}'", w.get_ref(), p.get_ref()),
                        )
                    })?;
                picked.push(c.clone());
            }
            classes = picked;
        }
        Ok(classes)
    }

    pub fn detector(&self) -> Result<DetectorKind> {
        match &self.experiment.detector {
            None => Ok(DetectorKind::MultibandSd),
            Some(d) => d.get_ref().parse().map_err(|e: WdsError| self.err_at("experiment.detector", d, e.to_string())),
        }
    }

    fn channel_choice(&self) -> Result<ChannelChoice> {
        match &self.channel.kind {
            None => Ok(ChannelChoice::Awgn),
            Some(k) => match k.get_ref().to_ascii_lowercase().replace('-', "_").as_str() {
                "awgn" => Ok(ChannelChoice::Awgn),
                "multipath_rayleigh" | "multipath" | "rayleigh" => Ok(ChannelChoice::Multipath),
                other => Err(self.err_at("channel.kind", k, format!("unknown channel '{other}'"))),
            },
        }
    }

    pub fn channel(&self) -> Result<ChannelModel> {
        let mut m = match self.channel_choice()? {
            ChannelChoice::Awgn => ChannelModel::awgn(f64::INFINITY),
            ChannelChoice::Multipath => ChannelModel::multipath_default(f64::INFINITY),
        };
        if let Some(taps) = &self.channel.taps {
            if m.kind == ChannelKind::Awgn {
                return Err(self.err_field("channel.taps", "taps need kind = \"multipath_rayleigh\"".into()));
            }
            m.taps = taps.clone();
        }
        m.seed = self.seed;
        m.validate().map_err(|e| self.err_field("channel", e.to_string()))?;
        Ok(m)
    }

    pub fn receiver(&self, classes: &[SignalClass]) -> Result<RxAssumption> {
        let kind = match &self.receiver.kind {
            None => return Ok(RxAssumption::Matched),
            Some(k) => k,
        };
        match kind.get_ref().to_ascii_lowercase().replace('_', "-").as_str() {
            "matched" => Ok(RxAssumption::Matched),
            "mismatch" => {
                let delta = self
                    .receiver
                    .delta
                    .ok_or_else(|| self.err_field("receiver.delta", "mismatch receivers need a delta".into()))?;
                Ok(RxAssumption::Mismatch { delta })
            }
            "classifier-driven" => {
                let names: Vec<String> = classes.iter().map(|c| c.name.clone()).collect();
                let confusion = match &self.receiver.confusion {
                    None => ConfusionMatrix::uniform(names),
                    Some(s) => match s.get_ref().as_str() {
                        "uniform" => ConfusionMatrix::uniform(names),
                        "perfect" => ConfusionMatrix::perfect(names),
                        path => read_confusion(&self.base_dir.join(path))
                            .map_err(|e| self.err_at("receiver.confusion", s, e.to_string()))?,
                    },
                };
                Ok(RxAssumption::ClassifierDriven { confusion })
            }
            other => Err(self.err_at("receiver.kind", kind, format!("unknown receiver '{other}'"))),
        }
    }

    pub fn experiment_spec(&self) -> Result<ExperimentSpec> {
        let classes = self.classes()?;
        let grid = match &self.experiment.es_n0_db {
            Some(g) => g.values().map_err(|e| self.err_field("experiment.es_n0_db", e.to_string()))?,
            None => (0..=10).map(|k| 2.0 * k as f64).collect(),
        };
        let rx = self.receiver(&classes)?;
        let mut spec = ExperimentSpec::new(self.name(), self.waveform()?, classes, grid, self.detector()?);
        if let Some(t) = self.experiment.trials_per_point {
            spec.trials_per_point = t;
        }
        if let Some(m) = self.experiment.min_bit_errors {
            spec.min_bit_errors = m;
        }
        spec.rx = rx;
        spec.channel = self.channel()?;
        spec.seed = self.seed;
        spec.validate().map_err(|e| self.err_field("experiment", e.to_string()))?;
        Ok(spec)
    }

    pub fn dataset_spec(&self) -> Result<DatasetSpec> {
        let mut spec = DatasetSpec::new(self.classes()?, self.seed);
        if let Some(n) = self.dataset.symbols_per_class {
            spec.symbols_per_class = n;
        }
        if let Some(g) = &self.dataset.es_n0_db {
            spec.es_n0_grid = g.values().map_err(|e| self.err_field("dataset.es_n0_db", e.to_string()))?;
        }
        spec.validate().map_err(|e| self.err_field("dataset", e.to_string()))?;
        Ok(spec)
    }
}

/// A pattern (`sb`, `mb`, `amb`, `mamb`), a single class by name
/// (`mamb-1`, `sb-sefdm-0.80`, `ofdm`), or `sb-<α>` for any single-band α.
pub fn resolve_classes(cfg: &WaveformConfig, name: &str) -> Result<Vec<SignalClass>> {
    if let Ok(kind) = name.parse::<PatternKind>() {
        return pattern(kind, cfg);
    }
    let lower = name.to_ascii_lowercase();
    if lower == "ofdm" {
        return Ok(vec![sb_pattern(cfg)?.remove(0)]);
    }
    if let Some(a) = lower.strip_prefix("sb-").and_then(|s| s.parse::<f64>().ok()) {
        let bcf = crate::waveform::Bcf::new(a)?;
        return Ok(vec![SignalClass {
            name: format!("SB-SEFDM-{a:.2}"),
            plan: crate::waveform::BandPlan::single_band(cfg, bcf)?,
        }]);
    }
    for kind in [PatternKind::Sb, PatternKind::Mb, PatternKind::Amb, PatternKind::Mamb] {
        if let Some(c) = pattern(kind, cfg)?.into_iter().find(|c| c.name.eq_ignore_ascii_case(name)) {
            return Ok(vec![c]);
        }
    }
    Err(WdsError::InvalidPlan(format!("unknown pattern or class '{name}'")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfusionFile {
    classes: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// Reads a confusion matrix stored as `classes = [...]` and `rows = [[...], ...]`.
pub fn read_confusion(path: &Path) -> Result<ConfusionMatrix> {
    let text = std::fs::read_to_string(path)?;
    let f: ConfusionFile = toml::from_str(&text).map_err(|e| WdsError::Config {
        location: match e.span() {
            Some(s) => {
                let (l, c) = line_col(&text, s.start);
                format!("{} line {l}, column {c}", path.display())
            }
            None => path.display().to_string(),
        },
        message: e.message().trim().to_string(),
    })?;
    ConfusionMatrix::new(f.classes, f.rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
name = "mamb-legit"
seed = 7

[waveform]
n_subcarriers = 64

[signal]
pattern = "mamb"

[experiment]
es_n0_db = { start = 0.0, stop = 10.0, step = 2.5 }
trials_per_point = 20
detector = "multiband-sd"
"#;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::parse(text, Path::new("."))
    }

    #[test]
    fn parses_experiment() {
        let cfg = parse(BASIC).unwrap();
        let spec = cfg.experiment_spec().unwrap();
        assert_eq!(spec.classes.len(), 3);
        assert_eq!(spec.es_n0_grid, vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        assert_eq!(spec.seed, 7);
        assert_eq!(spec.detector, DetectorKind::MultibandSd);
        assert_eq!(spec.waveform.n_time_samples(), 512);
    }

    #[test]
    fn syntax_error_has_line() {
        let err = parse("seed = 1\n[signal]\npattern = \n").unwrap_err();
        match err {
            WdsError::Config { location, .. } => assert!(location.starts_with("line 3"), "{location}"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_field_has_line() {
        let err = parse("[signal]\npattern = \"sb\"\n[experiment]\ntrails = 3\n").unwrap_err();
        match err {
            WdsError::Config { location, message } => {
                assert!(location.starts_with("line 4"), "{location}");
                assert!(message.contains("trails"), "{message}");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn semantic_error_names_field() {
        let cfg = parse("[signal]\npattern = \"sb\"\n[experiment]\ndetector = \"magic\"\n").unwrap();
        match cfg.experiment_spec().unwrap_err() {
            WdsError::Config { location, .. } => {
                assert!(location.contains("line 4"), "{location}");
                assert!(location.contains("experiment.detector"), "{location}");
            }
            e => panic!("{e}"),
        }
        let cfg = parse("[signal]\npattern = \"zzz\"\n").unwrap();
        assert!(cfg.classes().is_err());
    }

    #[test]
    fn seed_override() {
        let mut cfg = parse(BASIC).unwrap();
        cfg.apply_seed_override(Some("99")).unwrap();
        assert_eq!(cfg.experiment_spec().unwrap().seed, 99);
        assert!(cfg.apply_seed_override(Some("abc")).is_err());
    }

    #[test]
    fn class_names_resolve() {
        let cfg = WaveformConfig::new(256, 8).unwrap();
        assert_eq!(resolve_classes(&cfg, "mamb-1").unwrap()[0].name, "MAMB-1");
        assert_eq!(resolve_classes(&cfg, "OFDM").unwrap()[0].name, "SB-OFDM");
        assert_eq!(resolve_classes(&cfg, "sb-0.8").unwrap()[0].plan.subbands[0].beta.value(), 0.8);
        assert_eq!(resolve_classes(&cfg, "sb").unwrap().len(), 7);
    }

    #[test]
    fn dataset_defaults() {
        let cfg = parse("[signal]\npattern = \"sb\"\n").unwrap();
        let d = cfg.dataset_spec().unwrap();
        assert_eq!(d.total_records().unwrap(), 14_000);
        assert_eq!(d.es_n0_grid, vec![-20.0, -10.0, 0.0, 10.0, 20.0, 30.0, 40.0, 50.0]);
    }

    #[test]
    fn receivers() {
        let text = format!("{BASIC}\n[receiver]\nkind = \"mismatch\"\ndelta = 0.05\n");
        let spec = parse(&text).unwrap().experiment_spec().unwrap();
        assert_eq!(spec.rx, RxAssumption::Mismatch { delta: 0.05 });
        let text = format!("{BASIC}\n[receiver]\nkind = \"mismatch\"\n");
        assert!(parse(&text).unwrap().experiment_spec().is_err());
        let text = format!("{BASIC}\n[receiver]\nkind = \"classifier-driven\"\n");
        let spec = parse(&text).unwrap().experiment_spec().unwrap();
        assert!(matches!(spec.rx, RxAssumption::ClassifierDriven { .. }));
    }
}
