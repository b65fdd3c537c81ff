//! Synthetic event data with planted sequential patterns.
//!
//! Each of `Pn` patterns draws `Ps` distinct event types from a pool of
//! `Nf`. The first type gets `Ni` instances uniformly in
//! `V = [0, DSize]² × [0, TSize]`; every instance of the next type is placed
//! in the neighborhood cylinder of a randomly chosen instance of the
//! previous type, strictly after it. The same number of uniformly placed
//! noise instances of random types is added, so the dataset holds
//! `Ni · Ps · Pn · 2` instances.

use std::collections::HashSet;
use std::f64::consts::TAU;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::miner::PatternResult;
use crate::model::{EmbeddingSpace, EventDataset, EventInstance, NeighborhoodParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    /// Length of each planted sequence.
    pub ps: usize,
    /// Number of planted sequences.
    pub pn: usize,
    pub dsize: f64,
    pub tsize: f64,
    /// Size of the event type pool.
    pub nf: usize,
    /// Instances per type per planted sequence.
    pub ni: usize,
    pub neighborhood: NeighborhoodParams,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            ps: 5,
            pn: 10,
            dsize: 1000.0,
            tsize: 1200.0,
            nf: 20,
            ni: 100,
            neighborhood: NeighborhoodParams {
                radius: 10.0,
                interval: 10.0,
            },
            seed: 0,
        }
    }
}

impl GeneratorParams {
    pub fn total_instances(&self) -> usize {
        self.ni * self.ps * self.pn * 2
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.ps == 0 || self.nf == 0 || self.ni == 0 {
            return bad(format!(
                "ps, nf and ni must be positive (ps={}, nf={}, ni={})",
                self.ps, self.nf, self.ni
            ));
        }
        if self.ps > self.nf {
            return bad(format!("ps={} exceeds the type pool nf={}", self.ps, self.nf));
        }
        if !(self.dsize > 0.0 && self.dsize.is_finite()) || !(self.tsize > 0.0 && self.tsize.is_finite()) {
            return bad(format!("dsize and tsize must be positive (dsize={}, tsize={})", self.dsize, self.tsize));
        }
        NeighborhoodParams::new(self.neighborhood.radius, self.neighborhood.interval)?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedDataset {
    pub dataset: EventDataset,
    /// Planted type sequences, one per pattern.
    pub planted: Vec<Vec<String>>,
    /// Dataset position of the instance each pattern instance was placed
    /// around; `None` for first-type and noise instances.
    pub parents: Vec<Option<usize>>,
}

pub fn type_name(k: usize, nf: usize) -> String {
    let width = (nf.saturating_sub(1)).to_string().len().max(2);
    format!("E{k:0width$}")
}

pub fn generate(params: &GeneratorParams) -> Result<GeneratedDataset> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let names: Vec<String> = (0..params.nf).map(|k| type_name(k, params.nf)).collect();
    let (r, t) = (params.neighborhood.radius, params.neighborhood.interval);

    let mut instances = Vec::with_capacity(params.total_instances());
    let mut parents = Vec::with_capacity(params.total_instances());
    let mut planted = Vec::with_capacity(params.pn);

    for p in 0..params.pn {
        let types = sample(&mut rng, params.nf, params.ps).into_vec();
        planted.push(types.iter().map(|&k| names[k].clone()).collect());
        let mut previous: Vec<usize> = Vec::new();
        for (step, &k) in types.iter().enumerate() {
            let mut current = Vec::with_capacity(params.ni);
            for i in 0..params.ni {
                let id = format!("p{p}.{step}.{i}");
                let (loc, time, parent) = if step == 0 {
                    let loc = [rng.gen_range(0.0..params.dsize), rng.gen_range(0.0..params.dsize)];
                    (loc, rng.gen_range(0.0..params.tsize), None)
                } else {
                    let parent = previous[rng.gen_range(0..previous.len())];
                    let anchor: &EventInstance = &instances[parent];
                    let radius = r * rng.gen::<f64>().sqrt();
                    let angle = rng.gen_range(0.0..TAU);
                    let dt = t * (1.0 - rng.gen::<f64>());
                    let loc = [
                        anchor.location[0] + radius * angle.cos(),
                        anchor.location[1] + radius * angle.sin(),
                    ];
                    (loc, anchor.time + dt, Some(parent))
                };
                current.push(instances.len());
                instances.push(EventInstance::new(id, names[k].as_str(), &loc, time));
                parents.push(parent);
            }
            previous = current;
        }
    }

    for i in 0..params.ni * params.ps * params.pn {
        let k = rng.gen_range(0..params.nf);
        let loc = [rng.gen_range(0.0..params.dsize), rng.gen_range(0.0..params.dsize)];
        let time = rng.gen_range(0.0..params.tsize);
        instances.push(EventInstance::new(format!("n{i}"), names[k].as_str(), &loc, time));
        parents.push(None);
    }

    let space = EmbeddingSpace::cube(2, params.dsize, params.tsize)?;
    let dataset = EventDataset::new(2, names, instances, space)?;
    Ok(GeneratedDataset {
        dataset,
        planted,
        parents,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryReport {
    /// Fraction of planted sequences reported in full.
    pub maximal: f64,
    /// Fraction of contiguous sub-chains (length ≥ 2) of planted sequences
    /// that were reported.
    pub subsequences: f64,
}

/// How much of the planted ground truth appears among `results`.
pub fn verify_planted(results: &[PatternResult], planted: &[Vec<String>]) -> RecoveryReport {
    let found: HashSet<&[String]> = results.iter().map(|p| p.types.as_slice()).collect();
    let frac = |hit: usize, total: usize| if total == 0 { 1.0 } else { hit as f64 / total as f64 };

    let maximal_hits = planted.iter().filter(|s| found.contains(s.as_slice())).count();

    let mut sub_total = 0;
    let mut sub_hits = 0;
    for seq in planted {
        for len in 2..=seq.len() {
            for window in seq.windows(len) {
                sub_total += 1;
                if found.contains(window) {
                    sub_hits += 1;
                }
            }
        }
    }
    RecoveryReport {
        maximal: frac(maximal_hits, planted.len()),
        subsequences: frac(sub_hits, sub_total),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::spatial_distance;

    #[test]
    fn instance_counts_follow_the_generator_formula() {
        let p = GeneratorParams { ni: 100, ..Default::default() };
        assert_eq!(generate(&p).unwrap().dataset.len(), 10000);
        let p = GeneratorParams { ni: 160, ..Default::default() };
        assert_eq!(generate(&p).unwrap().dataset.len(), 16000);
        let p = GeneratorParams { pn: 0, ..Default::default() };
        let g = generate(&p).unwrap();
        assert!(g.dataset.is_empty());
        assert!(g.planted.is_empty());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(generate(&GeneratorParams { ps: 21, ..Default::default() }).is_err());
        assert!(generate(&GeneratorParams { ni: 0, ..Default::default() }).is_err());
        assert!(generate(&GeneratorParams { dsize: 0.0, ..Default::default() }).is_err());
        let neighborhood = NeighborhoodParams { radius: -1.0, interval: 10.0 };
        assert!(generate(&GeneratorParams { neighborhood, ..Default::default() }).is_err());
    }

    #[test]
    fn same_seed_same_dataset() {
        let p = GeneratorParams { ni: 20, seed: 42, ..Default::default() };
        let a = generate(&p).unwrap();
        let b = generate(&p).unwrap();
        assert_eq!(a.dataset.instances(), b.dataset.instances());
        assert_eq!(a.planted, b.planted);
        let c = generate(&GeneratorParams { seed: 43, ..p }).unwrap();
        assert_ne!(a.dataset.instances(), c.dataset.instances());
    }

    #[test]
    fn pattern_instances_sit_in_their_parents_cylinder() {
        let p = GeneratorParams { ni: 50, seed: 9, ..Default::default() };
        let g = generate(&p).unwrap();
        let ds = &g.dataset;
        let mut checked = 0;
        for (i, parent) in g.parents.iter().enumerate() {
            let Some(parent) = *parent else { continue };
            let (a, b) = (ds.point(parent), ds.point(i));
            let dt = b.time - a.time;
            assert!(dt > 0.0 && dt <= 10.0, "dt={dt}");
            assert!(spatial_distance(&a, &b) <= 10.0 + 1e-9);
            assert_eq!(ds.instances()[parent].id.split('.').nth(1).unwrap().parse::<usize>().unwrap() + 1,
                ds.instances()[i].id.split('.').nth(1).unwrap().parse::<usize>().unwrap());
            checked += 1;
        }
        assert_eq!(checked, 50 * 4 * 10);
    }

    #[test]
    fn planted_types_are_distinct_within_a_pattern() {
        let g = generate(&GeneratorParams { ni: 5, ps: 8, seed: 1, ..Default::default() }).unwrap();
        for seq in &g.planted {
            let unique: HashSet<&String> = seq.iter().collect();
            assert_eq!(unique.len(), seq.len());
        }
        assert_eq!(g.dataset.event_types().len(), 20);
    }

    fn pattern(types: &[&str]) -> PatternResult {
        PatternResult { types: types.iter().map(|s| s.to_string()).collect(), index_value: 2.0, tail_size: 1 }
    }

    #[test]
    fn recovery_report() {
        let planted = vec![vec!["A".to_string(), "B".into(), "C".into()]];
        let all = [pattern(&["A", "B"]), pattern(&["B", "C"]), pattern(&["A", "B", "C"]), pattern(&["X", "Y"])];
        assert_eq!(verify_planted(&all, &planted), RecoveryReport { maximal: 1.0, subsequences: 1.0 });
        assert_eq!(verify_planted(&[], &planted), RecoveryReport { maximal: 0.0, subsequences: 0.0 });
        let part = verify_planted(&all[..1], &planted);
        assert_eq!(part.maximal, 0.0);
        assert!((part.subsequences - 1.0 / 3.0).abs() < 1e-12);
    }
}
