//! Mines a generated dataset and checks the planted sequences were found.

use stseq::datagen::{generate, verify_planted, GeneratorParams};
use stseq::{build_index, mine_micro, MinerConfig, NormalizationParams};

fn main() -> stseq::Result<()> {
    let params = GeneratorParams { seed: 3, ..Default::default() };
    let g = generate(&params)?;
    let index = build_index(&g.dataset, 40.0, NormalizationParams::IDENTITY)?;
    let cfg = MinerConfig::new(params.neighborhood, 1.0, 20)?;
    let out = mine_micro(&g.dataset, &index, cfg)?;

    println!("{} instances, {} microclusters, {} patterns", g.dataset.len(), index.len(), out.patterns.len());
    for seq in &g.planted {
        let hit = out.patterns.iter().find(|p| &p.types == seq);
        match hit {
            Some(p) => println!("  {} index {:.1}", seq.join(" -> "), p.index_value),
            None => println!("  {} not found", seq.join(" -> ")),
        }
    }
    let report = verify_planted(&out.patterns, &g.planted);
    println!("recovered {:.0}% of planted sequences and {:.0}% of their sub-chains", report.maximal * 100.0, report.subsequences * 100.0);
    println!(
        "{} sequences expanded, {} ratios, {} join candidates, {:.1?}",
        out.stats.expansions, out.stats.ratios, out.stats.sweep.candidates, out.stats.elapsed
    );
    Ok(())
}
