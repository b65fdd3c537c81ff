//! Caps microcluster size on data where many instances share a location,
//! as in station or grid observations.

use stseq::{build_index, build_index_capped, EventDataset, EventInstance, NormalizationParams};

fn main() -> stseq::Result<()> {
    let mut instances = Vec::new();
    for station in 0..10 {
        for day in 0..150 {
            if (station * 7 + day * 3) % 5 < 2 {
                let id = format!("s{station}d{day}");
                let loc = [(station % 5) as f64 * 30.0, (station / 5) as f64 * 30.0];
                instances.push(EventInstance::new(id, "High-Temp", &loc, (day / 10) as f64));
            }
        }
    }
    let ds = EventDataset::from_instances(2, instances)?;
    let norm = NormalizationParams::IDENTITY;

    let plain = build_index(&ds, 60.0, norm)?;
    let max = |idx: &stseq::MicroclusterIndex| idx.clusters().iter().map(|c| c.count()).max().unwrap_or(0);
    println!("{} instances; uncapped d = 60: {} clusters, largest {}", ds.len(), plain.len(), max(&plain));
    for k in [5, 20, 100] {
        let capped = build_index_capped(&ds, 60.0, k, norm)?;
        println!("K = {k:>3}: {:>4} clusters, largest {}", capped.len(), max(&capped));
    }
    Ok(())
}
