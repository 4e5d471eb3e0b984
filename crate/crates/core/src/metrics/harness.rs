use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Instant;

use super::{wilson_interval, ConfusionMatrix, CurvePoint, Z95};
use crate::channel::{equalize, ChannelModel};
use crate::detection::{MultibandReceiver, SdFactor, ZfFilter};
use crate::error::{Result, WdsError};
use crate::waveform::{
    BandPlan, ComplexSignal, Constellation, CorrelationMatrix, SefdmModem, SignalClass, WaveformConfig,
};

/// Trials run between two checks of the stopping rule. Fixed so that the
/// stopping point, and with it the report, does not depend on thread count.
pub const BATCH_TRIALS: u64 = 64;

/// Largest full-band correlation matrix the plain sphere decoder accepts.
pub const MAX_FULL_SD_DIM: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorKind {
    Mf,
    Zf,
    Sd,
    MultibandSd,
}

impl std::str::FromStr for DetectorKind {
    type Err = WdsError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "mf" => Ok(DetectorKind::Mf),
            "zf" => Ok(DetectorKind::Zf),
            "sd" => Ok(DetectorKind::Sd),
            "multiband-sd" | "mb-sd" => Ok(DetectorKind::MultibandSd),
            other => Err(WdsError::InvalidExperiment(format!("unknown detector '{other}'"))),
        }
    }
}

/// What the receiver believes about the transmitted waveform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RxAssumption {
    /// The true plan.
    Matched,
    /// Every sub-band compression off by `delta`.
    Mismatch { delta: f64 },
    /// The plan of whichever class a classifier picks; the classifier is
    /// replayed from its confusion matrix.
    ClassifierDriven { confusion: ConfusionMatrix },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub waveform: WaveformConfig,
    pub classes: Vec<SignalClass>,
    pub es_n0_grid: Vec<f64>,
    /// Trial cap per class and grid point; each trial is one multi-carrier symbol.
    pub trials_per_point: u64,
    /// A point stops early once this many bit errors are counted.
    pub min_bit_errors: u64,
    pub detector: DetectorKind,
    pub rx: RxAssumption,
    /// Channel template; its Es/N0 is replaced by each grid value.
    pub channel: ChannelModel,
    pub seed: u64,
}

impl ExperimentSpec {
    /// AWGN, matched receiver, at most 1000 symbols per class and point, 100-error stop.
    pub fn new(
        name: impl Into<String>,
        waveform: WaveformConfig,
        classes: Vec<SignalClass>,
        es_n0_grid: Vec<f64>,
        detector: DetectorKind,
    ) -> Self {
        ExperimentSpec {
            name: name.into(),
            waveform,
            classes,
            es_n0_grid,
            trials_per_point: 1000,
            min_bit_errors: 100,
            detector,
            rx: RxAssumption::Matched,
            channel: ChannelModel::awgn(f64::INFINITY),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(WdsError::InvalidExperiment(m));
        if self.classes.is_empty() {
            return bad("no signal classes".into());
        }
        if self.es_n0_grid.is_empty() {
            return bad("empty Es/N0 grid".into());
        }
        if self.trials_per_point == 0 {
            return bad("trials_per_point must be at least 1".into());
        }
        if self.es_n0_grid.iter().any(|v| v.is_nan()) {
            return bad("Es/N0 grid contains NaN".into());
        }
        self.waveform.validate()?;
        self.channel.validate()?;
        let q = self.waveform.n_time_samples();
        for c in &self.classes {
            c.plan.validate()?;
            if c.plan.n_time_samples != q {
                return bad(format!(
                    "class {} uses {} time samples, waveform has {q}",
                    c.name, c.plan.n_time_samples
                ));
            }
            if self.detector == DetectorKind::Sd && c.plan.n_data() > MAX_FULL_SD_DIM {
                return bad(format!(
                    "full-band sphere decoding of {} carriers is intractable; use multiband-sd",
                    c.plan.n_data()
                ));
            }
        }
        if let RxAssumption::ClassifierDriven { confusion } = &self.rx {
            if confusion.n_classes() != self.classes.len() {
                return bad(format!(
                    "confusion matrix covers {} classes, experiment has {}",
                    confusion.n_classes(),
                    self.classes.len()
                ));
            }
        }
        Ok(())
    }
}

/// Counters for one Es/N0 point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub es_n0_db: f64,
    pub trials: u64,
    pub bits: u64,
    pub bit_errors: u64,
    /// Sub-band searches that ran out of budget or radius.
    pub erasures: u64,
    pub visited_nodes: u64,
    pub class_trials: Vec<u64>,
    /// Trials whose receiver used the right class.
    pub class_hits: Vec<u64>,
}

impl PointReport {
    fn new(es_n0_db: f64, n_classes: usize) -> Self {
        PointReport {
            es_n0_db,
            trials: 0,
            bits: 0,
            bit_errors: 0,
            erasures: 0,
            visited_nodes: 0,
            class_trials: vec![0; n_classes],
            class_hits: vec![0; n_classes],
        }
    }

    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }

    /// Wilson 95 % interval on the bit error rate.
    pub fn ber_interval(&self) -> (f64, f64) {
        wilson_interval(self.bit_errors, self.bits, Z95)
    }

    pub fn sca(&self) -> f64 {
        super::sca(&self.class_hits, &self.class_trials).unwrap_or(0.0)
    }

    fn add(&mut self, o: &Outcome) {
        self.trials += 1;
        self.bits += o.bits;
        self.bit_errors += o.bit_errors;
        self.erasures += o.erasures;
        self.visited_nodes += o.nodes;
        self.class_trials[o.class] += 1;
        self.class_hits[o.class] += u64::from(o.hit);
    }
}

/// Accumulated counters of a run. Identical spec and seed give an identical report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub name: String,
    pub seed: u64,
    pub points: Vec<PointReport>,
    /// Wall-clock seconds per point; not part of the reproducible counters.
    #[serde(skip)]
    pub elapsed_s: Vec<f64>,
}

impl TrialReport {
    pub fn bit_errors(&self) -> u64 {
        self.points.iter().map(|p| p.bit_errors).sum()
    }

    pub fn bits_total(&self) -> u64 {
        self.points.iter().map(|p| p.bits).sum()
    }

    /// BER against Es/N0 with Wilson intervals.
    pub fn curve(&self) -> Vec<CurvePoint> {
        self.points
            .iter()
            .map(|p| {
                let (lo, hi) = p.ber_interval();
                CurvePoint {
                    es_n0_db: p.es_n0_db,
                    value: p.ber(),
                    ci_low: lo,
                    ci_high: hi,
                }
            })
            .collect()
    }

    /// Same counters with the timing column dropped, for reproducibility checks.
    pub fn counters_eq(&self, other: &TrialReport) -> bool {
        self.name == other.name && self.seed == other.seed && self.points == other.points
    }
}

struct Outcome {
    class: usize,
    hit: bool,
    bits: u64,
    bit_errors: u64,
    erasures: u64,
    nodes: u64,
}

enum RxChain {
    Mf(SefdmModem),
    Zf(SefdmModem, ZfFilter),
    Sd(SefdmModem, Arc<SdFactor>),
    Multiband(MultibandReceiver),
}

impl RxChain {
    fn new(kind: DetectorKind, rx_plan: &BandPlan) -> Result<Self> {
        let full_corr = || {
            let f = rx_plan.carrier_frequencies();
            let b = rx_plan.subbands[0].beta;
            CorrelationMatrix::from_frequencies(&f, &f, rx_plan.n_time_samples, b, b).entries
        };
        Ok(match kind {
            DetectorKind::Mf => RxChain::Mf(SefdmModem::new(rx_plan.clone())?),
            DetectorKind::Zf => RxChain::Zf(SefdmModem::new(rx_plan.clone())?, ZfFilter::new(&full_corr())?),
            DetectorKind::Sd => RxChain::Sd(
                SefdmModem::new(rx_plan.clone())?,
                Arc::new(SdFactor::new(&full_corr())?),
            ),
            DetectorKind::MultibandSd => RxChain::Multiband(MultibandReceiver::new(rx_plan)?),
        })
    }

    /// Decided symbol indices, erasures and visited nodes.
    fn detect(&self, y: &ComplexSignal) -> Result<(Vec<usize>, u64, u64)> {
        let q = Constellation::Qpsk;
        let idx = |v: &[Complex64]| v.iter().map(|&z| q.decide_index(z)).collect::<Vec<_>>();
        Ok(match self {
            RxChain::Mf(m) => (idx(&m.demodulate(y)?), 0, 0),
            RxChain::Zf(m, zf) => (idx(&zf.soft(&m.demodulate(y)?)), 0, 0),
            RxChain::Sd(m, f) => {
                let res = f.decode(&m.demodulate(y)?)?;
                (idx(&res.symbols), res.erasures as u64, res.visited_nodes)
            }
            RxChain::Multiband(mb) => {
                let res = mb.detect(y)?;
                (idx(&res.symbols), res.erasures as u64, res.visited_nodes)
            }
        })
    }
}

struct Runner<'a> {
    spec: &'a ExperimentSpec,
    tx: Vec<SefdmModem>,
    rx: Vec<RxChain>,
}

impl Runner<'_> {
    fn trial(&self, point: usize, es_n0_db: f64, t: u64) -> Result<Outcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed);
        rng.set_stream(((point as u64) << 40) | t);
        let class = (t % self.tx.len() as u64) as usize;
        let q = Constellation::Qpsk;
        let n = self.tx[class].plan().n_data();
        let sent: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
        let symbols: Vec<Complex64> = sent.iter().map(|&i| q.point(i)).collect();
        let x = self.tx[class].modulate(&symbols)?;
        let out = self.spec.channel.with_es_n0(es_n0_db).apply(&x, &mut rng)?;
        let y = equalize(&out.received, &out.state)?;
        let used = match &self.spec.rx {
            RxAssumption::ClassifierDriven { confusion } => confusion.sample(class, &mut rng),
            _ => class,
        };
        let (decided, erasures, nodes) = self.rx[used].detect(&y)?;
        // A receiver using the wrong class may recover fewer symbols than were
        // sent; the missing ones count as a fixed guess of index 0.
        let bit_errors = sent
            .iter()
            .enumerate()
            .map(|(k, &a)| (a ^ decided.get(k).copied().unwrap_or(0)).count_ones() as u64)
            .sum();
        Ok(Outcome {
            class,
            hit: used == class,
            bits: 2 * n as u64,
            bit_errors,
            erasures,
            nodes,
        })
    }
}

/// Monte-Carlo bit error rate over the spec's Es/N0 grid.
///
/// Each point runs batches of [`BATCH_TRIALS`] symbols, cycling through the
/// classes, until `min_bit_errors` errors are seen or the trial cap is hit.
/// Trial `t` of point `p` draws from ChaCha stream `(p << 40) | t`, so results
/// are independent of scheduling.
pub fn run_ber(spec: &ExperimentSpec) -> Result<TrialReport> {
    spec.validate()?;
    let tx = spec
        .classes
        .iter()
        .map(|c| SefdmModem::new(c.plan.clone()))
        .collect::<Result<Vec<_>>>()?;
    let rx = spec
        .classes
        .iter()
        .map(|c| {
            let plan = match &spec.rx {
                RxAssumption::Mismatch { delta } => c.plan.with_bcf_offset(*delta, spec.waveform.max_transform)?,
                _ => c.plan.clone(),
            };
            RxChain::new(spec.detector, &plan)
        })
        .collect::<Result<Vec<_>>>()?;
    let runner = Runner { spec, tx, rx };
    let n_classes = spec.classes.len();
    let cap = spec.trials_per_point.saturating_mul(n_classes as u64);

    let mut points = Vec::with_capacity(spec.es_n0_grid.len());
    let mut elapsed_s = Vec::with_capacity(spec.es_n0_grid.len());
    for (pi, &es) in spec.es_n0_grid.iter().enumerate() {
        let start = Instant::now();
        let mut rep = PointReport::new(es, n_classes);
        let mut next = 0;
        while next < cap && (spec.min_bit_errors == 0 || rep.bit_errors < spec.min_bit_errors) {
            let end = (next + BATCH_TRIALS).min(cap);
            let batch: Vec<Result<Outcome>> = (next..end)
                .into_par_iter()
                .map(|t| runner.trial(pi, es, t))
                .collect();
            for o in batch {
                rep.add(&o?);
            }
            next = end;
        }
        points.push(rep);
        elapsed_s.push(start.elapsed().as_secs_f64());
    }
    Ok(TrialReport {
        name: spec.name.clone(),
        seed: spec.seed,
        points,
        elapsed_s,
    })
}
