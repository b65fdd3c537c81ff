//! Benchmark sweeps over generated datasets.
//!
//! One sweep varies a single generator or index parameter (`Ni`, `Pn`,
//! `Ps` or the cap `K`) and, for every value, diameter and seed, builds a
//! microclustering index and optionally mines it. Rows average over seeds.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::datagen::{generate, GeneratorParams};
use crate::error::{Error, Result};
use crate::io::create;
use crate::microcluster::{build_index, build_index_capped};
use crate::miner::{mine_micro, MinerConfig, DEFAULT_MAX_LEN};
use crate::model::NormalizationParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SweepVar {
    Ni,
    Pn,
    Ps,
    K,
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVar::Ni => "ni",
            SweepVar::Pn => "pn",
            SweepVar::Ps => "ps",
            SweepVar::K => "k",
        })
    }
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ni" => Ok(SweepVar::Ni),
            "pn" => Ok(SweepVar::Pn),
            "ps" => Ok(SweepVar::Ps),
            "k" => Ok(SweepVar::K),
            _ => Err(Error::invalid(format!("unknown sweep variable {s:?} (expected ni, pn, ps or k)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub base: GeneratorParams,
    pub sweep: SweepVar,
    pub values: Vec<usize>,
    pub diameters: Vec<f64>,
    pub seeds: Vec<u64>,
    pub norm: NormalizationParams,
    /// Mine every index at this threshold; `None` skips mining.
    pub theta: Option<f64>,
    pub max_len: usize,
    /// Worker threads; 0 uses all cores.
    pub jobs: usize,
}

impl BenchmarkConfig {
    pub fn new(base: GeneratorParams, sweep: SweepVar, values: Vec<usize>) -> Self {
        BenchmarkConfig {
            base,
            sweep,
            values,
            diameters: vec![40.0, 60.0, 80.0, 100.0],
            seeds: (0..5).collect(),
            norm: NormalizationParams::IDENTITY,
            theta: None,
            max_len: DEFAULT_MAX_LEN,
            jobs: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() || self.diameters.is_empty() || self.seeds.is_empty() {
            return Err(Error::invalid("benchmark needs at least one value, diameter and seed"));
        }
        if self.sweep == SweepVar::K && self.values.contains(&0) {
            return Err(Error::invalid("cap K must be positive"));
        }
        Ok(())
    }

    fn generator_for(&self, value: usize, seed: u64) -> GeneratorParams {
        let mut p = GeneratorParams { seed, ..self.base };
        match self.sweep {
            SweepVar::Ni => p.ni = value,
            SweepVar::Pn => p.pn = value,
            SweepVar::Ps => p.ps = value,
            SweepVar::K => {}
        }
        p
    }
}

/// One build (and optional mining run) for a single seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedRun {
    pub value: usize,
    pub diameter: f64,
    pub seed: u64,
    pub dataset_size: usize,
    pub index_size: usize,
    pub microclustering_ms: f64,
    pub mining_ms: Option<f64>,
    pub patterns: Option<usize>,
}

/// Seed-averaged results for one sweep value and diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub sweep_var: SweepVar,
    pub value: usize,
    pub diameter: f64,
    pub dataset_size: f64,
    pub index_size: f64,
    /// `dataset_size / index_size` of the seed means.
    pub compression_ratio: f64,
    pub microclustering_ms: f64,
    pub mining_ms: Option<f64>,
    pub patterns: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchmarkReport {
    /// Ordered by sweep value, then diameter.
    pub rows: Vec<BenchmarkRow>,
    /// Ordered by sweep value, diameter, then seed.
    pub runs: Vec<SeedRun>,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn run_seed(cfg: &BenchmarkConfig, value: usize, seed: u64) -> Result<Vec<SeedRun>> {
    let generated = generate(&cfg.generator_for(value, seed))?;
    let ds = &generated.dataset;
    let miner_cfg = cfg
        .theta
        .map(|theta| MinerConfig::new(cfg.base.neighborhood, theta, cfg.max_len))
        .transpose()?;
    let mut out = Vec::with_capacity(cfg.diameters.len());
    for &d in &cfg.diameters {
        let start = Instant::now();
        let index = match cfg.sweep {
            SweepVar::K => build_index_capped(ds, d, value, cfg.norm)?,
            _ => build_index(ds, d, cfg.norm)?,
        };
        let microclustering_ms = ms(start);
        let (mining_ms, patterns) = match miner_cfg {
            Some(mc) => {
                let start = Instant::now();
                let mined = mine_micro(ds, &index, mc)?;
                (Some(ms(start)), Some(mined.patterns.len()))
            }
            None => (None, None),
        };
        out.push(SeedRun {
            value,
            diameter: d,
            seed,
            dataset_size: ds.len(),
            index_size: index.len(),
            microclustering_ms,
            mining_ms,
            patterns,
        });
    }
    Ok(out)
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

fn summarize(sweep_var: SweepVar, runs: &[&SeedRun]) -> BenchmarkRow {
    let dataset_size = mean(runs.iter().map(|r| r.dataset_size as f64));
    let index_size = mean(runs.iter().map(|r| r.index_size as f64));
    let optional = |f: fn(&SeedRun) -> Option<f64>| {
        let vals: Option<Vec<f64>> = runs.iter().map(|r| f(r)).collect();
        vals.map(|v| mean(v.into_iter()))
    };
    BenchmarkRow {
        sweep_var,
        value: runs[0].value,
        diameter: runs[0].diameter,
        dataset_size,
        index_size,
        compression_ratio: dataset_size / index_size,
        microclustering_ms: mean(runs.iter().map(|r| r.microclustering_ms)),
        mining_ms: optional(|r| r.mining_ms),
        patterns: optional(|r| r.patterns.map(|p| p as f64)),
    }
}

/// Runs every (value, seed) pair concurrently on up to `jobs` threads.
/// Output order depends only on the configuration.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let tasks: Vec<(usize, u64)> = cfg
        .values
        .iter()
        .flat_map(|&v| cfg.seeds.iter().map(move |&s| (v, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let per_task: Vec<Vec<SeedRun>> =
        pool.install(|| tasks.par_iter().map(|&(v, s)| run_seed(cfg, v, s)).collect::<Result<_>>())?;

    let mut runs: Vec<SeedRun> = per_task.into_iter().flatten().collect();
    let vpos = |v: usize| cfg.values.iter().position(|&x| x == v).unwrap_or(usize::MAX);
    let dpos = |d: f64| cfg.diameters.iter().position(|&x| x == d).unwrap_or(usize::MAX);
    runs.sort_by_key(|r| (vpos(r.value), dpos(r.diameter), r.seed));

    let rows = runs
        .chunk_by(|a, b| a.value == b.value && a.diameter == b.diameter)
        .map(|group| summarize(cfg.sweep, &group.iter().collect::<Vec<_>>()))
        .collect();
    Ok(BenchmarkReport { rows, runs })
}

pub const BENCHMARK_HEADER: [&str; 8] = [
    "sweep_var",
    "value",
    "dataset_size",
    "index_size",
    "compression_ratio",
    "microclustering_ms",
    "mining_ms",
    "patterns",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes rows in the benchmark CSV layout. Rows of several diameters can
/// share a file, but callers usually write one file per diameter.
pub fn write_benchmark_to<W: Write>(writer: W, rows: &[BenchmarkRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(BENCHMARK_HEADER)?;
    for r in rows {
        w.write_record([
            r.sweep_var.to_string(),
            r.value.to_string(),
            r.dataset_size.to_string(),
            r.index_size.to_string(),
            r.compression_ratio.to_string(),
            format!("{:.3}", r.microclustering_ms),
            opt(r.mining_ms.map(|m| (m * 1e3).round() / 1e3)),
            opt(r.patterns),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_benchmark(path: impl AsRef<Path>, rows: &[BenchmarkRow]) -> Result<()> {
    write_benchmark_to(create(path.as_ref())?, rows)
}

/// Per-seed timings for plotting.
pub fn write_timing_to<W: Write>(writer: W, sweep_var: SweepVar, runs: &[SeedRun]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "sweep_var",
        "value",
        "diameter",
        "seed",
        "dataset_size",
        "index_size",
        "microclustering_ms",
        "mining_ms",
        "patterns",
    ])?;
    for r in runs {
        w.write_record([
            sweep_var.to_string(),
            r.value.to_string(),
            r.diameter.to_string(),
            r.seed.to_string(),
            r.dataset_size.to_string(),
            r.index_size.to_string(),
            format!("{:.3}", r.microclustering_ms),
            opt(r.mining_ms.map(|m| (m * 1e3).round() / 1e3)),
            r.patterns.map(|p| p.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_timing(path: impl AsRef<Path>, sweep_var: SweepVar, runs: &[SeedRun]) -> Result<()> {
    write_timing_to(create(path.as_ref())?, sweep_var, runs)
}
