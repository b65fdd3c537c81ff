//! Extracts High/Low events from a synthetic gridded temperature and
//! precipitation record, then mines them.

use stseq::extremes::{extract_extremes, ExtremeParams, Observation};
use stseq::{build_index, mine_micro, MinerConfig, NeighborhoodParams, NormalizationParams};

fn main() -> stseq::Result<()> {
    let mut obs = Vec::new();
    let mut state = 7u64;
    let mut noise = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % 1000) as f64 / 1000.0
    };
    for x in 0..8 {
        for y in 0..8 {
            for day in 0..365 {
                let heat = if (150..160).contains(&day) && x < 4 { 12.0 } else { 0.0 };
                let temp = 10.0 + 10.0 * (day as f64 / 58.0).sin() + heat + 3.0 * noise();
                // Rain follows the heat wave a few days later.
                let rain = if (162..168).contains(&day) && x < 4 { 40.0 } else { 10.0 * noise() };
                let location = vec![x as f64 * 10.0, y as f64 * 10.0];
                obs.push(Observation { location: location.clone(), time: day as f64, variable: "Temp".into(), value: temp });
                obs.push(Observation { location, time: day as f64, variable: "Precipitation".into(), value: rain });
            }
        }
    }

    let params = ExtremeParams::new(0.01, 0.99)?.suppress_low("Precipitation");
    let events = extract_extremes(&obs, &params)?;
    println!("{} observations -> {} events", obs.len(), events.len());
    for t in events.event_types() {
        let k = events.type_index(t).unwrap();
        println!("  {t}: {}", events.instances_of(k).len());
    }

    let index = build_index(&events, 15.0, NormalizationParams::IDENTITY)?;
    let cfg = MinerConfig::new(NeighborhoodParams::new(15.0, 15.0)?, 1.0, 5)?;
    for p in mine_micro(&events, &index, cfg)?.patterns {
        println!("  {:<40} {:.2}", p.types.join(" -> "), p.index_value);
    }
    Ok(())
}
