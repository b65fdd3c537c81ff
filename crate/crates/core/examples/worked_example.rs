//! Mines the bundled four-type dataset with both miners.

use stseq::sample::worked_example;
use stseq::{build_index, mine_baseline, mine_micro, MinerConfig, NeighborhoodParams, NormalizationParams};

fn main() -> stseq::Result<()> {
    let ds = worked_example();
    let cfg = MinerConfig::new(NeighborhoodParams::new(10.0, 10.0)?, 1.0, 20)?;

    println!("{} instances of types {:?}", ds.len(), ds.event_types());
    println!("\nraw instances:");
    for p in mine_baseline(&ds, cfg)?.patterns {
        println!("  {:<12} index {:.3}  tail {}", p.types.join(" -> "), p.index_value, p.tail_size);
    }

    let index = build_index(&ds, 20.0, NormalizationParams::IDENTITY)?;
    println!("\nmicroclusters (d = 20, {} clusters):", index.len());
    for p in mine_micro(&ds, &index, cfg)?.patterns {
        println!("  {:<12} index {:.3}  tail {}", p.types.join(" -> "), p.index_value, p.tail_size);
    }
    Ok(())
}
