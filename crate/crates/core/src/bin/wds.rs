use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

use wds_core::detection::{fft_complexity, sd_complexity_bound};
use wds_core::io::{
    self, content_hash, read_curve_file, render_svg, write_curve_file, PlotOptions, RunConfig, RunManifest, Series,
};
use wds_core::keygen::{KeyQuantizer, KeySource, PatternKeyStream};
use wds_core::metrics::{
    power, replay_sca, run_ber, wilson_interval, ConfusionMatrix, CurvePoint, DetectorKind, ExperimentSpec, Framework,
    PowerModelParams, RxAssumption, Z95,
};
use wds_core::waveform::DEFAULT_OVERSAMPLING;

#[derive(Parser)]
#[command(name = "wds", version, about = "Waveform-defined security simulation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export a labelled IQ dataset for classifier training.
    Generate(GenerateArgs),
    /// Monte-Carlo bit error rate curve.
    Ber(BerArgs),
    /// Classification accuracy replayed from a confusion matrix.
    ClassifyEval(ClassifyArgs),
    /// Chaotic pattern-key stream.
    Keys(KeysArgs),
    /// Transmitter power consumption.
    Power(PowerArgs),
    /// Detection complexity bounds.
    Complexity(ComplexityArgs),
    /// Render CSV curves to SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct CommonSignal {
    /// TOML run configuration.
    #[arg(long, conflicts_with_all = ["plan", "n", "oversampling"])]
    config: Option<PathBuf>,
    /// Pattern (sb, mb, amb, mamb) or class name (mamb-1, ofdm, sb-0.8).
    #[arg(long)]
    plan: Option<String>,
    /// Sub-carriers per symbol.
    #[arg(long)]
    n: Option<usize>,
    /// Oversampling factor.
    #[arg(long)]
    oversampling: Option<usize>,
    /// RNG seed; takes precedence over the configuration and WDS_SEED.
    #[arg(long)]
    seed: Option<u64>,
}

impl CommonSignal {
    fn load(&self, default_plan: &str) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => {
                let text = format!(
                    "[waveform]\nn_subcarriers = {}\noversampling = {}\n[signal]\npattern = {:?}\n",
                    self.n.unwrap_or(256),
                    self.oversampling.unwrap_or(DEFAULT_OVERSAMPLING),
                    self.plan.as_deref().unwrap_or(default_plan)
                );
                let mut c = RunConfig::parse(&text, Path::new("."))?;
                c.apply_seed_override(std::env::var(io::SEED_ENV).ok().as_deref())?;
                c
            }
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    signal: CommonSignal,
    /// Symbols per class.
    #[arg(long)]
    symbols_per_class: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "dataset")]
    out: PathBuf,
}

#[derive(Args)]
struct BerArgs {
    #[command(flatten)]
    signal: CommonSignal,
    /// mf, zf, sd or multiband-sd.
    #[arg(long)]
    detector: Option<String>,
    /// Comma-separated Es/N0 values in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    es_n0: Option<Vec<f64>>,
    /// Symbol cap per class and point.
    #[arg(long)]
    trials: Option<u64>,
    /// Stop a point after this many bit errors.
    #[arg(long)]
    min_errors: Option<u64>,
    /// Receiver compression offset (eavesdropper model).
    #[arg(long, allow_hyphen_values = true)]
    rx_delta: Option<f64>,
    /// Output CSV; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Confusion-matrix file, or `uniform` / `perfect`.
    #[arg(long, default_value = "uniform")]
    confusion: String,
    /// Class count for `uniform` / `perfect`.
    #[arg(long, default_value_t = 3)]
    classes: usize,
    /// Classifications replayed per class.
    #[arg(long, default_value_t = 2000)]
    trials: u64,
    /// Es/N0 label for the output row.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    es_n0: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KeysArgs {
    #[arg(long, default_value_t = 3.9)]
    gamma: f64,
    #[arg(long, default_value_t = 0.85)]
    phi0: f64,
    #[arg(long, default_value_t = 0.75)]
    eta: f64,
    #[arg(long, default_value_t = 16)]
    count: usize,
    /// Map iterations discarded before the first key.
    #[arg(long, default_value_t = 0)]
    warmup: u64,
    /// Top of the key range; bins are spread evenly from eta to here.
    #[arg(long)]
    top: Option<f64>,
    /// Number of key bins.
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PowerArgs {
    /// wds, analog-bf, hybrid-bf, digital-bf or all.
    #[arg(long, default_value = "all")]
    framework: String,
    /// TOML file overriding component powers.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Sub-carriers.
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Sub-band size for the multi-band bound.
    #[arg(long, default_value_t = 16)]
    nb: usize,
    /// Print a table for N = 2, 4, … up to this value instead.
    #[arg(long)]
    sweep: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// Curve CSV files (es_n0_db,value,ci_low,ci_high).
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// Legend labels, one per input; file stems by default.
    #[arg(long = "label")]
    labels: Vec<String>,
    #[arg(long, default_value = "")]
    title: String,
    #[arg(long, default_value = "BER")]
    y_label: String,
    /// Linear instead of logarithmic y axis.
    #[arg(long)]
    linear: bool,
    #[arg(long, default_value = "plot.svg")]
    out: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::Ber(a) => ber(a),
        Command::ClassifyEval(a) => classify_eval(a),
        Command::Keys(a) => keys(a),
        Command::Power(a) => power_cmd(a),
        Command::Complexity(a) => complexity(a),
        Command::Plot(a) => plot(a),
    }
}

fn generate(a: GenerateArgs) -> Result<()> {
    let cfg = a.signal.load("sb")?;
    let mut spec = cfg.dataset_spec()?;
    if let Some(n) = a.symbols_per_class {
        spec.symbols_per_class = n;
    }
    let manifest = io::export_dataset(&spec, &a.out)?;
    let mut run = RunManifest::new(&cfg.name(), "generate", spec.seed, &spec)?;
    run.add_output(&a.out.join(io::dataset::RECORDS_FILE))?;
    run.add_output(&a.out.join(io::dataset::MANIFEST_FILE))?;
    run.write(&a.out.join("run.toml"))?;
    println!(
        "wrote {} records ({} classes) to {}",
        manifest.records,
        manifest.classes.len(),
        a.out.display()
    );
    Ok(())
}

fn ber(a: BerArgs) -> Result<()> {
    let cfg = a.signal.load("mamb")?;
    let mut spec: ExperimentSpec = cfg.experiment_spec()?;
    if let Some(d) = &a.detector {
        spec.detector = d.parse::<DetectorKind>()?;
    }
    if let Some(g) = a.es_n0 {
        spec.es_n0_grid = g;
    }
    if let Some(t) = a.trials {
        spec.trials_per_point = t;
    }
    if let Some(m) = a.min_errors {
        spec.min_bit_errors = m;
    }
    if let Some(d) = a.rx_delta {
        spec.rx = RxAssumption::Mismatch { delta: d };
    }
    let report = run_ber(&spec)?;
    let curve = report.curve();
    match &a.out {
        Some(path) => {
            write_curve_file(path, &curve)?;
            let mut run = RunManifest::new(&spec.name, "ber", spec.seed, &spec)?;
            run.add_output(path)?;
            run.write(&path.with_extension("manifest.toml"))?;
            for (p, t) in report.points.iter().zip(&report.elapsed_s) {
                eprintln!(
                    "Es/N0 {:6.2} dB  BER {:.3e}  ({} errors / {} bits, {} erasures, {:.2} s)",
                    p.es_n0_db,
                    p.ber(),
                    p.bit_errors,
                    p.bits,
                    p.erasures,
                    t
                );
            }
            println!("wrote {}", path.display());
        }
        None => io::curve::write_curve(std::io::stdout().lock(), &curve)?,
    }
    Ok(())
}

fn classify_eval(a: ClassifyArgs) -> Result<()> {
    let names = |n: usize| (0..n).map(|i| format!("class-{i}")).collect::<Vec<_>>();
    let cm = match a.confusion.as_str() {
        "uniform" => ConfusionMatrix::uniform(names(a.classes)),
        "perfect" => ConfusionMatrix::perfect(names(a.classes)),
        path => io::config::read_confusion(Path::new(path))?,
    };
    let (hits, trials) = replay_sca(&cm, a.trials, a.seed);
    let value = wds_core::metrics::sca(&hits, &trials)?;
    let (lo, hi) = wilson_interval(hits.iter().sum(), trials.iter().sum(), Z95);
    let point = CurvePoint {
        es_n0_db: a.es_n0,
        value,
        ci_low: lo,
        ci_high: hi,
    };
    for (c, (h, t)) in cm.classes.iter().zip(hits.iter().zip(&trials)) {
        eprintln!("{c}: {h}/{t}");
    }
    match &a.out {
        Some(p) => {
            write_curve_file(p, &[point])?;
            println!("SCA {value:.4} -> {}", p.display());
        }
        None => io::curve::write_curve(std::io::stdout().lock(), &[point])?,
    }
    Ok(())
}

fn keys(a: KeysArgs) -> Result<()> {
    let source = KeySource {
        gamma: a.gamma,
        phi0: a.phi0,
        eta: a.eta,
        warmup: a.warmup,
        ..KeySource::default()
    };
    let q = match (a.top, a.bins) {
        (None, None) if a.eta == KeyQuantizer::default().eta => KeyQuantizer::default(),
        (top, bins) => KeyQuantizer::uniform(a.eta, top.unwrap_or(0.9), bins.unwrap_or(3))?,
    };
    let stream = PatternKeyStream::generate(&source, &q, a.count)?;
    let text = stream.to_text();
    match &a.out {
        Some(p) => {
            std::fs::write(p, &text)?;
            println!("wrote {} keys to {} ({})", a.count, p.display(), &content_hash(text.as_bytes())[..12]);
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn power_cmd(a: PowerArgs) -> Result<()> {
    let params: PowerModelParams = match &a.params {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => PowerModelParams::default(),
    };
    let frameworks: Vec<Framework> = if a.framework == "all" {
        Framework::ALL.to_vec()
    } else {
        vec![a.framework.parse()?]
    };
    let wds = power(Framework::Wds, &params)?;
    for f in frameworks {
        let p = power(f, &params)?;
        println!("{:<11} {:>8.1} mW  ({:.2}x wds)", f.label(), p, p / wds);
    }
    Ok(())
}

fn complexity(a: ComplexityArgs) -> Result<()> {
    let row = |n: usize, nb: usize| -> Result<()> {
        let nb = nb.min(n);
        if !n.is_multiple_of(nb) {
            bail!("sub-band size {nb} does not divide {n}");
        }
        let fft = fft_complexity(n).map(|v| v.to_string()).unwrap_or_else(|_| "-".into());
        println!(
            "{n}\t{nb}\t{fft}\t{}\t{}",
            sd_complexity_bound(n, None)?,
            sd_complexity_bound(n, Some(nb))?
        );
        Ok(())
    };
    println!("N\tN_B\tfft\tsingle_band_sd\tmulti_band_sd");
    match a.sweep {
        Some(max) => {
            let mut n = 2;
            while n <= max {
                if n % a.nb.min(n) == 0 {
                    row(n, a.nb)?;
                }
                n *= 2;
            }
        }
        None => row(a.n, a.nb)?,
    }
    Ok(())
}

fn plot(a: PlotArgs) -> Result<()> {
    let mut series = Vec::with_capacity(a.inputs.len());
    for (i, path) in a.inputs.iter().enumerate() {
        let label = a.labels.get(i).cloned().unwrap_or_else(|| {
            path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        });
        series.push(Series {
            label,
            points: read_curve_file(path).with_context(|| format!("reading {}", path.display()))?,
        });
    }
    let opts = PlotOptions {
        title: a.title,
        y_label: a.y_label,
        log_y: !a.linear,
        ..PlotOptions::default()
    };
    std::fs::write(&a.out, render_svg(&series, &opts)?)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

