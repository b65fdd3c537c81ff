//! Times raw-instance mining against microcluster mining.
//!
//! Usage: `cargo run --release --example baseline_vs_micro [NI]`

use std::time::Instant;

use stseq::datagen::{generate, GeneratorParams};
use stseq::{build_index, mine_baseline, mine_micro, MinerConfig, NormalizationParams};

fn main() -> stseq::Result<()> {
    let ni = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(40);
    let params = GeneratorParams { ni, ..Default::default() };
    let g = generate(&params)?;
    let cfg = MinerConfig::new(params.neighborhood, 1.0, 20)?;

    let start = Instant::now();
    let index = build_index(&g.dataset, 40.0, NormalizationParams::IDENTITY)?;
    let micro = mine_micro(&g.dataset, &index, cfg)?;
    let t_micro = start.elapsed();

    let start = Instant::now();
    let base = mine_baseline(&g.dataset, cfg)?;
    let t_base = start.elapsed();

    println!("{} instances", g.dataset.len());
    println!("baseline: {:>8} patterns, {:>9} ratios, {t_base:.2?}", base.patterns.len(), base.stats.ratios);
    println!("micro:    {:>8} patterns, {:>9} ratios, {t_micro:.2?} (index included)", micro.patterns.len(), micro.stats.ratios);
    println!("speedup {:.1}x", t_base.as_secs_f64() / t_micro.as_secs_f64());
    Ok(())
}
