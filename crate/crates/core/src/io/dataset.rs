use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::channel::ChannelModel;
use crate::error::{Result, WdsError};
use crate::waveform::{BandPlan, Constellation, SefdmModem, SignalClass};

pub const FORMAT_VERSION: u32 = 1;
/// Complex samples per record.
pub const WINDOW: usize = 1024;
/// `u16` label, `f32` Es/N0, then `2·WINDOW` interleaved `f32` I/Q values.
pub const RECORD_BYTES: usize = 2 + 4 + 2 * WINDOW * 4;
pub const RECORDS_FILE: &str = "records.bin";
pub const MANIFEST_FILE: &str = "manifest.toml";

/// One labelled capture: `iq[2k]` is the in-phase and `iq[2k+1]` the
/// quadrature component of sample `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecord {
    pub label: u16,
    pub es_n0_db: f32,
    pub iq: Vec<f32>,
}

impl DatasetRecord {
    pub fn to_bytes(&self) -> Result<[u8; RECORD_BYTES]> {
        if self.iq.len() != 2 * WINDOW {
            return Err(WdsError::Format(format!(
                "record holds {} values, expected {}",
                self.iq.len(),
                2 * WINDOW
            )));
        }
        let mut out = [0u8; RECORD_BYTES];
        out[..2].copy_from_slice(&self.label.to_le_bytes());
        out[2..6].copy_from_slice(&self.es_n0_db.to_le_bytes());
        for (chunk, v) in out[6..].chunks_exact_mut(4).zip(&self.iq) {
            chunk.copy_from_slice(&v.to_le_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != RECORD_BYTES {
            return Err(WdsError::Format(format!(
                "record is {} bytes, expected {RECORD_BYTES}",
                bytes.len()
            )));
        }
        let f32_at = |i: usize| f32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        Ok(DatasetRecord {
            label: u16::from_le_bytes([bytes[0], bytes[1]]),
            es_n0_db: f32_at(2),
            iq: (0..2 * WINDOW).map(|k| f32_at(6 + 4 * k)).collect(),
        })
    }

    /// The window as complex samples.
    pub fn samples(&self) -> Vec<Complex64> {
        self.iq
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0] as f64, c[1] as f64))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub classes: Vec<SignalClass>,
    pub symbols_per_class: u64,
    pub es_n0_grid: Vec<f64>,
    pub seed: u64,
}

impl DatasetSpec {
    /// 2000 symbols per class over Es/N0 = −20, −10, …, 50 dB.
    pub fn new(classes: Vec<SignalClass>, seed: u64) -> Self {
        DatasetSpec {
            classes,
            symbols_per_class: 2000,
            es_n0_grid: (-2..=5).map(|k| 10.0 * k as f64).collect(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(WdsError::InvalidExperiment("dataset needs at least one class".into()));
        }
        if self.classes.len() > u16::MAX as usize + 1 {
            return Err(WdsError::OutOfRange(format!("{} classes exceed the u16 label", self.classes.len())));
        }
        if self.es_n0_grid.is_empty() {
            return Err(WdsError::InvalidExperiment("empty Es/N0 grid".into()));
        }
        if self.symbols_per_class == 0 {
            return Err(WdsError::InvalidExperiment("symbols_per_class must be positive".into()));
        }
        for c in &self.classes {
            c.plan.validate()?;
            if c.plan.n_time_samples < WINDOW {
                return Err(WdsError::InvalidExperiment(format!(
                    "class {} has {} samples per symbol, fewer than the {WINDOW}-sample window",
                    c.name, c.plan.n_time_samples
                )));
            }
        }
        self.total_records()?;
        Ok(())
    }

    pub fn total_records(&self) -> Result<u64> {
        (self.classes.len() as u64)
            .checked_mul(self.symbols_per_class)
            .ok_or_else(|| WdsError::OutOfRange("record count overflows".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestClass {
    pub label: u16,
    pub name: String,
    pub plan: BandPlan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub record_bytes: usize,
    pub window: usize,
    pub records: u64,
    pub symbols_per_class: u64,
    pub es_n0_grid: Vec<f64>,
    pub seed: u64,
    pub normalization: String,
    pub channel: String,
    pub data_file: String,
    pub classes: Vec<ManifestClass>,
}

impl DatasetManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| WdsError::Format(format!("{}: {}", path.display(), e.message())))
    }
}

fn record(spec: &DatasetSpec, modems: &[SefdmModem], class: usize, j: u64) -> Result<DatasetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(((class as u64) << 40) | j);
    let es = spec.es_n0_grid[(j % spec.es_n0_grid.len() as u64) as usize];
    let modem = &modems[class];
    let q = Constellation::Qpsk;
    let symbols: Vec<Complex64> = (0..modem.plan().n_data())
        .map(|_| q.point(rng.random_range(0..4)))
        .collect();
    let x = modem.modulate(&symbols)?;
    let y = ChannelModel::awgn(es).apply(&x, &mut rng)?.received;
    let offset = rng.random_range(0..=y.len() - WINDOW);
    let win = &y.samples[offset..offset + WINDOW];
    let power = win.iter().map(|z| z.norm_sqr()).sum::<f64>() / WINDOW as f64;
    let scale = if power > 0.0 { power.sqrt().recip() } else { 1.0 };
    Ok(DatasetRecord {
        label: class as u16,
        es_n0_db: es as f32,
        iq: win
            .iter()
            .flat_map(|z| [(z.re * scale) as f32, (z.im * scale) as f32])
            .collect(),
    })
}

/// Writes `records.bin` and `manifest.toml` into `dir`.
///
/// Records are grouped by class; record `j` of a class uses Es/N0 grid entry
/// `j mod len`. Each symbol is cropped to a window at a uniformly random
/// offset and scaled to unit average power.
pub fn export_dataset(spec: &DatasetSpec, dir: &Path) -> Result<DatasetManifest> {
    spec.validate()?;
    let modems = spec
        .classes
        .iter()
        .map(|c| SefdmModem::new(c.plan.clone()))
        .collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(dir)?;
    let mut out = BufWriter::new(File::create(dir.join(RECORDS_FILE))?);
    let mut written = 0u64;
    for class in 0..spec.classes.len() {
        let recs: Vec<Result<DatasetRecord>> = (0..spec.symbols_per_class)
            .into_par_iter()
            .map(|j| record(spec, &modems, class, j))
            .collect();
        for r in recs {
            out.write_all(&r?.to_bytes()?)?;
            written += 1;
        }
    }
    out.flush()?;
    let manifest = DatasetManifest {
        format_version: FORMAT_VERSION,
        record_bytes: RECORD_BYTES,
        window: WINDOW,
        records: written,
        symbols_per_class: spec.symbols_per_class,
        es_n0_grid: spec.es_n0_grid.clone(),
        seed: spec.seed,
        normalization: "unit average power per record".into(),
        channel: "awgn".into(),
        data_file: RECORDS_FILE.into(),
        classes: spec
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| ManifestClass {
                label: i as u16,
                name: c.name.clone(),
                plan: c.plan.clone(),
            })
            .collect(),
    };
    let text = toml::to_string(&manifest).map_err(|e| WdsError::Format(e.to_string()))?;
    std::fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(manifest)
}

/// Reads every record of a records file.
pub fn read_records(path: &Path) -> Result<Vec<DatasetRecord>> {
    let len = std::fs::metadata(path)?.len() as usize;
    if !len.is_multiple_of(RECORD_BYTES) {
        return Err(WdsError::Format(format!(
            "{}: {len} bytes is not a whole number of {RECORD_BYTES}-byte records",
            path.display()
        )));
    }
    let mut reader = BufReader::new(File::open(path)?);
    let mut buf = vec![0u8; RECORD_BYTES];
    let mut out = Vec::with_capacity(len / RECORD_BYTES);
    for _ in 0..len / RECORD_BYTES {
        reader.read_exact(&mut buf)?;
        out.push(DatasetRecord::from_bytes(&buf)?);
    }
    Ok(out)
}

/// Reads a dataset directory and checks the records against its manifest.
pub fn read_dataset(dir: &Path) -> Result<(DatasetManifest, Vec<DatasetRecord>)> {
    let manifest = DatasetManifest::read(&dir.join(MANIFEST_FILE))?;
    let path: PathBuf = dir.join(&manifest.data_file);
    let records = read_records(&path)?;
    if records.len() as u64 != manifest.records {
        return Err(WdsError::Format(format!(
            "manifest lists {} records, file holds {}",
            manifest.records,
            records.len()
        )));
    }
    if let Some(r) = records.iter().find(|r| r.label as usize >= manifest.classes.len()) {
        return Err(WdsError::Format(format!("label {} has no class", r.label)));
    }
    Ok((manifest, records))
}
