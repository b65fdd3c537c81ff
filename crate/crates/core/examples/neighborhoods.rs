//! Neighborhood joins, density ratios and the plane sweep's work counter.

use stseq::join::{brute_force_neighbors, instance_neighbors, SweepStats, TargetSet};
use stseq::miner::density_ratio;
use stseq::sample::worked_example;
use stseq::{NeighborhoodParams, StPoint};

fn main() -> stseq::Result<()> {
    let ds = worked_example();
    let params = NeighborhoodParams::new(10.0, 10.0)?;

    let a1 = ds.position_of("a1").unwrap();
    println!("B neighbors of a1: {:?}", instance_neighbors(&ds, &[a1], "B", &params)?["a1"]);

    let a = ds.event_types().iter().position(|t| t == "A").unwrap();
    let anchors = ds.instances_of(a).to_vec();
    for to in ["B", "C", "D"] {
        println!("ratio A -> {to}: {:.3}", density_ratio(&ds, "A", to, &anchors, &params)?);
    }

    // A bigger random join: candidates scale with local density rather
    // than with the product of the input sizes.
    let mut state = 12345u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let pts: Vec<StPoint> = (0..4000).map(|_| StPoint::new(&[next() * 1000.0, next() * 1000.0], next() * 1000.0)).collect();
    let (anchors, targets) = pts.split_at(2000);
    let set = TargetSet::new(2, targets.iter().copied().enumerate());
    let mut stats = SweepStats::default();
    let sweep = set.neighbors(anchors, &params, &mut stats);
    let brute = brute_force_neighbors(anchors, targets, &params);
    println!(
        "random join: {} matches from {} candidates (brute force checks {}), equal: {}",
        stats.matches,
        stats.candidates,
        anchors.len() * targets.len(),
        sweep == brute
    );
    Ok(())
}
