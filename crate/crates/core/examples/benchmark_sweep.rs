//! Sweeps the number of planted sequences and prints the benchmark table.

use stseq::bench::{run_benchmark, write_benchmark_to, BenchmarkConfig, SweepVar};
use stseq::datagen::GeneratorParams;

fn main() -> stseq::Result<()> {
    let base = GeneratorParams { ni: 100, ..Default::default() };
    let mut cfg = BenchmarkConfig::new(base, SweepVar::Pn, vec![5, 10, 15, 20]);
    cfg.seeds = (0..3).collect();
    cfg.theta = Some(1.0);
    let report = run_benchmark(&cfg)?;
    for d in &cfg.diameters {
        println!("d = {d}");
        let rows: Vec<_> = report.rows.iter().filter(|r| r.diameter == *d).cloned().collect();
        write_benchmark_to(std::io::stdout().lock(), &rows)?;
    }
    Ok(())
}
