use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stseq::bench::{run_benchmark, write_benchmark, write_timing, BenchmarkConfig, SweepVar};
use stseq::datagen::{generate, GeneratorParams};
use stseq::extremes::{extract_extremes, read_observations, ExtremeParams};
use stseq::io::{read_dataset, write_dataset, write_index, write_patterns, write_planted};
use stseq::model::Interval;
use stseq::{
    build_index, build_index_capped, mine_baseline, mine_micro, EmbeddingSpace, Error, MinerConfig,
    NeighborhoodParams, NormalizationParams,
};

/// Spatio-temporal sequential pattern mining.
#[derive(Parser, Debug)]
#[command(name = "stseq", version, args_override_self = true)]
struct Cli {
    /// key=value file whose entries act as flags; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic dataset with planted patterns.
    Generate(GenerateArgs),
    /// Build a microclustering index for a dataset.
    Microcluster(MicroclusterArgs),
    /// Mine significant sequential patterns.
    Mine(MineArgs),
    /// Sweep a generator or index parameter and report index statistics.
    Benchmark(BenchmarkArgs),
    /// Turn gridded observations into High/Low extreme events.
    Extract(ExtractArgs),
}

#[derive(Args, Debug, Clone)]
struct GenArgs {
    #[arg(long, default_value_t = 5)]
    ps: usize,
    #[arg(long, default_value_t = 10)]
    pn: usize,
    #[arg(long, default_value_t = 1000.0)]
    dsize: f64,
    #[arg(long, default_value_t = 1200.0)]
    tsize: f64,
    #[arg(long, default_value_t = 20)]
    nf: usize,
    #[arg(long, default_value_t = 100)]
    ni: usize,
}

#[derive(Args, Debug, Clone)]
struct NeighborhoodArgs {
    /// Spatial radius R.
    #[arg(long, default_value_t = 10.0)]
    radius: f64,
    /// Temporal depth T.
    #[arg(long, default_value_t = 10.0)]
    tinterval: f64,
}

#[derive(Args, Debug, Clone)]
struct NormArgs {
    /// Spatial normalization divisor.
    #[arg(long, default_value_t = 1.0)]
    norm_ds: f64,
    /// Temporal normalization divisor.
    #[arg(long, default_value_t = 1.0)]
    norm_dt: f64,
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Dataset CSV (id,type,x[,y],t).
    #[arg(long, short)]
    input: PathBuf,
    /// Embedding space as lo:hi per spatial axis then time, comma separated
    /// (e.g. 0:1000,0:1000,0:1200). Defaults to the bounding box.
    #[arg(long)]
    space: Option<String>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    gen: GenArgs,
    #[command(flatten)]
    nb: NeighborhoodArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dataset CSV to write. Planted sequences go to <output>.planted.
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct MicroclusterArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    diameter: f64,
    /// Maximum instances per microcluster.
    #[arg(long)]
    cap: Option<usize>,
    #[command(flatten)]
    norm: NormArgs,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct MineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    nb: NeighborhoodArgs,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = stseq::miner::DEFAULT_MAX_LEN)]
    max_len: usize,
    /// Microcluster diameter threshold (ignored with --baseline).
    #[arg(long, default_value_t = 40.0)]
    diameter: f64,
    #[arg(long)]
    cap: Option<usize>,
    #[command(flatten)]
    norm: NormArgs,
    /// Mine raw instances instead of microclusters.
    #[arg(long)]
    baseline: bool,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct BenchmarkArgs {
    /// Parameter to sweep: ni, pn, ps or k.
    #[arg(long)]
    sweep: SweepVar,
    /// Sweep values, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<usize>,
    #[command(flatten)]
    gen: GenArgs,
    #[command(flatten)]
    nb: NeighborhoodArgs,
    /// Diameter thresholds, comma separated.
    #[arg(long = "diameter", value_delimiter = ',', default_values_t = [40.0, 60.0, 80.0, 100.0])]
    diameters: Vec<f64>,
    /// Number of seeds (0..N) averaged per row.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    /// Also mine every index at this threshold.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = stseq::miner::DEFAULT_MAX_LEN)]
    max_len: usize,
    #[command(flatten)]
    norm: NormArgs,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Output directory.
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// Observation CSV (x,y,t,variable,value).
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    q_lo: f64,
    #[arg(long, default_value_t = 0.99)]
    q_hi: f64,
    /// Variables without Low events; repeatable.
    #[arg(long)]
    suppress_low: Vec<String>,
    #[arg(long, short)]
    output: PathBuf,
}

impl GenArgs {
    fn params(&self, nb: &NeighborhoodArgs, seed: u64) -> stseq::Result<GeneratorParams> {
        Ok(GeneratorParams {
            ps: self.ps,
            pn: self.pn,
            dsize: self.dsize,
            tsize: self.tsize,
            nf: self.nf,
            ni: self.ni,
            neighborhood: nb.params()?,
            seed,
        })
    }
}

impl NeighborhoodArgs {
    fn params(&self) -> stseq::Result<NeighborhoodParams> {
        NeighborhoodParams::new(self.radius, self.tinterval)
    }
}

impl NormArgs {
    fn params(&self) -> stseq::Result<NormalizationParams> {
        NormalizationParams::new(self.norm_ds, self.norm_dt)
    }
}

fn parse_space(spec: &str) -> stseq::Result<EmbeddingSpace> {
    let axes = spec
        .split(',')
        .map(|axis| {
            let (lo, hi) = axis
                .split_once(':')
                .ok_or_else(|| Error::InvalidParameter(format!("space axis {axis:?} is not lo:hi")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("space bound {s:?} is not a number")))
            };
            Interval::new(num(lo)?, num(hi)?)
        })
        .collect::<stseq::Result<Vec<_>>>()?;
    let Some((temporal, spatial)) = axes.split_last() else {
        return Err(Error::InvalidParameter("empty --space".into()));
    };
    EmbeddingSpace::new(spatial.to_vec(), *temporal)
}

impl InputArgs {
    fn load(&self) -> stseq::Result<stseq::EventDataset> {
        let space = self.space.as_deref().map(parse_space).transpose()?;
        read_dataset(&self.input, space)
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(cli: Cli) -> stseq::Result<()> {
    match cli.command {
        Command::Generate(a) => {
            let g = generate(&a.gen.params(&a.nb, a.seed)?)?;
            write_dataset(&a.output, &g.dataset)?;
            let planted = with_suffix(&a.output, ".planted");
            write_planted(&planted, &g.planted)?;
            eprintln!("wrote {} instances to {}", g.dataset.len(), a.output.display());
        }
        Command::Microcluster(a) => {
            let ds = a.input.load()?;
            let norm = a.norm.params()?;
            let index = match a.cap {
                Some(k) => build_index_capped(&ds, a.diameter, k, norm)?,
                None => build_index(&ds, a.diameter, norm)?,
            };
            write_index(&a.output, &index, &ds)?;
            eprintln!(
                "{} instances -> {} microclusters (ratio {:.4})",
                ds.len(),
                index.len(),
                ds.len() as f64 / index.len().max(1) as f64
            );
        }
        Command::Mine(a) => {
            let ds = a.input.load()?;
            let cfg = MinerConfig::new(a.nb.params()?, a.theta, a.max_len)?;
            let out = if a.baseline {
                mine_baseline(&ds, cfg)?
            } else {
                let norm = a.norm.params()?;
                let index = match a.cap {
                    Some(k) => build_index_capped(&ds, a.diameter, k, norm)?,
                    None => build_index(&ds, a.diameter, norm)?,
                };
                mine_micro(&ds, &index, cfg)?
            };
            write_patterns(&a.output, &out.patterns)?;
            eprintln!(
                "{} patterns, {} ratios, {} join candidates, {:.1} ms",
                out.patterns.len(),
                out.stats.ratios,
                out.stats.sweep.candidates,
                out.stats.elapsed.as_secs_f64() * 1e3
            );
        }
        Command::Benchmark(a) => {
            let mut cfg = BenchmarkConfig::new(a.gen.params(&a.nb, 0)?, a.sweep, a.values.clone());
            cfg.diameters = a.diameters.clone();
            cfg.seeds = (0..a.seeds).collect();
            cfg.norm = a.norm.params()?;
            cfg.theta = a.theta;
            cfg.max_len = a.max_len;
            cfg.jobs = a.jobs;
            let report = run_benchmark(&cfg)?;
            std::fs::create_dir_all(&a.output).map_err(|source| Error::Io {
                path: a.output.clone(),
                source,
            })?;
            for &d in &cfg.diameters {
                let rows: Vec<_> = report.rows.iter().filter(|r| r.diameter == d).cloned().collect();
                write_benchmark(a.output.join(format!("bench_d{d}.csv")), &rows)?;
            }
            write_timing(a.output.join("timing.csv"), cfg.sweep, &report.runs)?;
            for r in &report.rows {
                println!(
                    "{}={:<6} d={:<5} size={:<8} index={:<10.1} ratio={:.4}",
                    r.sweep_var, r.value, r.diameter, r.dataset_size, r.index_size, r.compression_ratio
                );
            }
        }
        Command::Extract(a) => {
            let obs = read_observations(&a.input)?;
            let params = a
                .suppress_low
                .iter()
                .fold(ExtremeParams::new(a.q_lo, a.q_hi)?, |p, v| p.suppress_low(v.as_str()));
            let ds = extract_extremes(&obs, &params)?;
            write_dataset(&a.output, &ds)?;
            eprintln!("{} observations -> {} events", obs.len(), ds.len());
        }
    }
    Ok(())
}

/// Expands `--config FILE` into flags placed right after the subcommand so
/// explicit flags, which come later, override them.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let (path, width) = match args[pos].strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => (args.get(pos + 1).cloned().ok_or("--config needs a file")?, 2),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", n + 1))?;
        let key = key.trim().replace('_', "-");
        match value.trim() {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            v => extra.push(format!("--{key}={v}")),
        }
    }
    let mut rest = args;
    rest.drain(pos..pos + width);
    let sub = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|i| i + 2)
        .unwrap_or(rest.len());
    rest.splice(sub..sub, extra);
    Ok(rest)
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter(_) => 1,
        Error::EmptyCluster | Error::SplitSingleton | Error::EmptyTail => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
