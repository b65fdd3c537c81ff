//! Builds indexes at several diameter thresholds and prints compression.

use stseq::datagen::{generate, GeneratorParams};
use stseq::{build_index, compression_ratio, NormalizationParams};

fn main() -> stseq::Result<()> {
    let g = generate(&GeneratorParams { seed: 1, ..Default::default() })?;
    let ds = &g.dataset;
    println!("{} instances", ds.len());
    for d in [10.0, 40.0, 60.0, 80.0, 100.0] {
        let index = build_index(ds, d, NormalizationParams::IDENTITY)?;
        let largest = index.clusters().iter().map(|c| c.count()).max().unwrap_or(0);
        println!(
            "d = {d:>5}: {:>6} microclusters, ratio {:.3}, largest {largest}",
            index.len(),
            compression_ratio(ds.len(), index.len())?
        );
    }

    let index = build_index(ds, 100.0, NormalizationParams::IDENTITY)?;
    let c = index.clusters().iter().max_by_key(|c| c.count()).unwrap();
    println!(
        "\nlargest cluster at d = 100: cid {} type {} rep {:?} @ {:.1}, members {:?}",
        c.cid,
        c.event_type,
        c.rep_location,
        c.rep_time,
        c.member_ids(ds).collect::<Vec<_>>()
    );

    // Normalizing axes makes space and time comparable: d = √2 then
    // allows one unit of spread on each.
    let norm = NormalizationParams::new(50.0, 50.0)?;
    let index = build_index(ds, NormalizationParams::combined_threshold(), norm)?;
    println!("normalized (50, 50), d = √2: {} microclusters", index.len());
    Ok(())
}
