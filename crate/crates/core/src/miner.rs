//! Significant sequence discovery.
//!
//! A sequence `s[1] → … → s[k]` is expanded depth-first. For each candidate
//! follower type `f`, the density ratio of `s[k] → f` is computed over the
//! sequence's tail (the type-`s[k]` units realizing it), and the sequence
//! index of `s → f` is the minimum ratio along the chain. Candidates whose
//! index reaches `θ` are reported; their tail is the union of the
//! neighborhoods of the current tail.
//!
//! Two unit spaces share this control flow:
//!
//! * raw instances, with the plain density ratio ([`mine_baseline`]);
//! * microclusters of a [`MicroclusterIndex`], with the count-weighted
//!   ratio over representatives ([`mine_micro`]).

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{neighborhood_volume, space_volume};
use crate::join::{SweepStats, TargetSet};
use crate::microcluster::{Microcluster, MicroclusterIndex};
use crate::model::{EventDataset, NeighborhoodParams, StPoint};

pub const DEFAULT_MAX_LEN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinerConfig {
    pub params: NeighborhoodParams,
    /// Significance threshold on the sequence index.
    pub theta: f64,
    /// Longest pattern reported.
    pub max_len: usize,
}

impl MinerConfig {
    pub fn new(params: NeighborhoodParams, theta: f64, max_len: usize) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::invalid(format!("theta must be positive, got {theta}")));
        }
        if max_len < 2 {
            return Err(Error::invalid(format!("max_len must be at least 2, got {max_len}")));
        }
        Ok(MinerConfig {
            params,
            theta,
            max_len,
        })
    }
}

/// A type sequence with its tail. Tail entries are unit positions: dataset
/// positions when mining instances, positions in
/// [`MicroclusterIndex::clusters`] when mining microclusters.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub types: Vec<String>,
    pub tail: Vec<usize>,
    /// `None` for 1-length sequences.
    pub index_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternResult {
    pub types: Vec<String>,
    pub index_value: f64,
    /// Units in the pattern's tail.
    pub tail_size: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MiningStats {
    /// Sequences whose followers were evaluated.
    pub expansions: u64,
    /// Density ratios computed.
    pub ratios: u64,
    pub sweep: SweepStats,
    /// Wall time spent inside neighborhood joins, summed over workers.
    pub join_time: Duration,
    pub elapsed: Duration,
}

impl MiningStats {
    fn merge(&mut self, other: &MiningStats) {
        self.expansions += other.expansions;
        self.ratios += other.ratios;
        self.sweep += other.sweep;
        self.join_time += other.join_time;
    }
}

#[derive(Debug, Clone, Default)]
pub struct MiningOutput {
    pub patterns: Vec<PatternResult>,
    pub stats: MiningStats,
}

/// Instances per unit volume.
pub fn density(count_in_space: usize, space_volume: f64) -> Result<f64> {
    if !(space_volume > 0.0) {
        return Err(Error::ZeroVolume);
    }
    Ok(count_in_space as f64 / space_volume)
}

/// Summed counts of the given microclusters per unit volume.
pub fn modified_density<'a>(
    volume: f64,
    clusters_inside: impl IntoIterator<Item = &'a Microcluster>,
) -> Result<f64> {
    if !(volume > 0.0) {
        return Err(Error::ZeroVolume);
    }
    let total: usize = clusters_inside.into_iter().map(Microcluster::count).sum();
    Ok(total as f64 / volume)
}

/// Index of `s → f` given the index of `s` (`None` when `s` has length 1)
/// and the ratio of `s[k] → f`.
pub fn sequence_index(prefix_index: Option<f64>, last_ratio: f64) -> f64 {
    match prefix_index {
        None => last_ratio,
        Some(prefix) => prefix.min(last_ratio),
    }
}

/// Mean neighborhood density over global density. Zero when the follower
/// type has no instance inside `V`.
fn mean_ratio(neighbor_counts: impl ExactSizeIterator<Item = usize>, vol_n: f64, global: f64) -> f64 {
    if global == 0.0 {
        return 0.0;
    }
    let n = neighbor_counts.len() as f64;
    let total: f64 = neighbor_counts.map(|k| k as f64 / vol_n).sum();
    (total / n) / global
}

/// Count-weighted neighborhood density over `(Σ weights) · global`.
fn weighted_ratio(terms: impl Iterator<Item = (f64, f64)>, vol_n: f64, global: f64) -> f64 {
    if global == 0.0 {
        return 0.0;
    }
    let mut num = 0.0;
    let mut weight = 0.0;
    for (w, covered) in terms {
        num += w * (covered / vol_n);
        weight += w;
    }
    num / (weight * global)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Instances,
    Microclusters,
}

/// The units a miner walks over and the precomputed per-type state.
#[derive(Debug)]
pub struct Miner<'a> {
    mode: Mode,
    types: &'a [String],
    config: MinerConfig,
    points: Vec<StPoint>,
    weights: Vec<f64>,
    by_type: Vec<Vec<usize>>,
    targets: Vec<TargetSet>,
    /// Per type: weight of units inside `V`, over `|V|`.
    global: Vec<f64>,
    vol_n: f64,
}

impl<'a> Miner<'a> {
    /// Raw-instance miner.
    pub fn baseline(dataset: &'a EventDataset, config: MinerConfig) -> Result<Self> {
        let points = dataset.points().to_vec();
        let weights = vec![1.0; points.len()];
        let by_type = (0..dataset.event_types().len())
            .map(|t| dataset.instances_of(t).to_vec())
            .collect();
        Self::assemble(Mode::Instances, dataset, config, points, weights, by_type)
    }

    /// Microcluster miner over `index`, which must have been built from
    /// `dataset`.
    pub fn micro(dataset: &'a EventDataset, index: &MicroclusterIndex, config: MinerConfig) -> Result<Self> {
        if index.event_types() != dataset.event_types() {
            return Err(Error::invalid("index was built for different event types"));
        }
        let points = index.clusters().iter().map(Microcluster::rep).collect();
        let weights = index.clusters().iter().map(|c| c.count() as f64).collect();
        let by_type = (0..dataset.event_types().len())
            .map(|t| index.of_type(t).to_vec())
            .collect();
        Self::assemble(Mode::Microclusters, dataset, config, points, weights, by_type)
    }

    fn assemble(
        mode: Mode,
        dataset: &'a EventDataset,
        config: MinerConfig,
        points: Vec<StPoint>,
        weights: Vec<f64>,
        by_type: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let vol_n = neighborhood_volume(&config.params, dataset.dim())?;
        let space = dataset.space();
        let global = if dataset.is_empty() {
            vec![0.0; by_type.len()]
        } else {
            let vol = space_volume(space)?;
            by_type
                .iter()
                .map(|units: &Vec<usize>| {
                    let inside: f64 = units
                        .iter()
                        .filter(|&&u| space.contains(&points[u]))
                        .map(|&u| weights[u])
                        .sum();
                    inside / vol
                })
                .collect()
        };
        let targets = by_type
            .iter()
            .map(|units| TargetSet::new(dataset.dim(), units.iter().map(|&u| (u, points[u]))))
            .collect();
        Ok(Miner {
            mode,
            types: dataset.event_types(),
            config,
            points,
            weights,
            by_type,
            targets,
            global,
            vol_n,
        })
    }

    pub fn config(&self) -> &MinerConfig {
        &self.config
    }

    /// Units of type `t`, i.e. the tail of the 1-length sequence `(t)`.
    pub fn units_of(&self, t: usize) -> &[usize] {
        &self.by_type[t]
    }

    fn ratio_from_neighbors(&self, tail: &[usize], neighbors: &[Vec<usize>], f: usize) -> f64 {
        match self.mode {
            Mode::Instances => mean_ratio(neighbors.iter().map(Vec::len), self.vol_n, self.global[f]),
            Mode::Microclusters => weighted_ratio(
                tail.iter().zip(neighbors).map(|(&u, ns)| {
                    let covered: f64 = ns.iter().map(|&n| self.weights[n]).sum();
                    (self.weights[u], covered)
                }),
                self.vol_n,
                self.global[f],
            ),
        }
    }

    fn neighbors(&self, tail: &[usize], f: usize, stats: &mut MiningStats) -> Vec<Vec<usize>> {
        let anchors: Vec<StPoint> = tail.iter().map(|&u| self.points[u]).collect();
        let start = Instant::now();
        let found = self.targets[f].neighbors(&anchors, &self.config.params, &mut stats.sweep);
        stats.join_time += start.elapsed();
        found
    }

    /// Density ratio of `from → to` over the given anchor units, all of
    /// type `from`.
    pub fn ratio(&self, from: usize, tail: &[usize], to: usize) -> Result<f64> {
        if tail.is_empty() {
            return Err(Error::EmptyTail);
        }
        if let Some(&u) = tail.iter().find(|&&u| !self.by_type[from].contains(&u)) {
            return Err(Error::invalid(format!("tail unit {u} is not of type {}", self.types[from])));
        }
        let found = self.neighbors(tail, to, &mut MiningStats::default());
        Ok(self.ratio_from_neighbors(tail, &found, to))
    }

    fn expand(
        &self,
        types: &mut Vec<usize>,
        tail: &[usize],
        index_value: Option<f64>,
        out: &mut Vec<PatternResult>,
        stats: &mut MiningStats,
    ) {
        stats.expansions += 1;
        for f in 0..self.types.len() {
            let found = self.neighbors(tail, f, stats);
            stats.ratios += 1;
            let ratio = self.ratio_from_neighbors(tail, &found, f);
            let candidate = sequence_index(index_value, ratio);
            if !(candidate >= self.config.theta) {
                continue;
            }
            let mut next: Vec<usize> = found.into_iter().flatten().collect();
            next.sort_unstable();
            next.dedup();

            types.push(f);
            out.push(PatternResult {
                types: types.iter().map(|&t| self.types[t].clone()).collect(),
                index_value: candidate,
                tail_size: next.len(),
            });
            if types.len() < self.config.max_len && !next.is_empty() {
                self.expand(types, &next, Some(candidate), out, stats);
            }
            types.pop();
        }
    }

    /// Reports every significant extension of `seq`, depth-first, followers
    /// tried in sorted type order.
    pub fn expand_sequence(&self, seq: &Sequence) -> Result<Vec<PatternResult>> {
        let mut types = seq
            .types
            .iter()
            .map(|name| {
                self.types
                    .binary_search(name)
                    .map_err(|_| Error::invalid(format!("unknown event type {name}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let Some(&last) = types.last() else {
            return Err(Error::invalid("empty sequence"));
        };
        if seq.tail.iter().any(|u| !self.by_type[last].contains(u)) {
            return Err(Error::invalid("tail units must have the sequence's last type"));
        }
        let mut tail = seq.tail.clone();
        tail.sort_unstable();
        tail.dedup();
        let mut out = Vec::new();
        if !tail.is_empty() && types.len() < self.config.max_len {
            self.expand(&mut types, &tail, seq.index_value, &mut out, &mut MiningStats::default());
        }
        Ok(out)
    }

    /// Expands the 1-length sequence of every event type. Roots run in
    /// parallel; output keeps root order then depth-first order.
    pub fn mine(&self) -> MiningOutput {
        let start = Instant::now();
        let per_root: Vec<(Vec<PatternResult>, MiningStats)> = (0..self.types.len())
            .into_par_iter()
            .map(|t| {
                let mut out = Vec::new();
                let mut stats = MiningStats::default();
                let tail = &self.by_type[t];
                if !tail.is_empty() {
                    let mut sorted = tail.clone();
                    sorted.sort_unstable();
                    self.expand(&mut vec![t], &sorted, None, &mut out, &mut stats);
                }
                (out, stats)
            })
            .collect();

        let mut output = MiningOutput::default();
        for (patterns, stats) in per_root {
            output.patterns.extend(patterns);
            output.stats.merge(&stats);
        }
        output.stats.elapsed = start.elapsed();
        output
    }
}

/// Mines significant sequences over the microclustering index.
pub fn mine_micro(dataset: &EventDataset, index: &MicroclusterIndex, config: MinerConfig) -> Result<MiningOutput> {
    Ok(Miner::micro(dataset, index, config)?.mine())
}

/// Mines significant sequences over raw instances.
pub fn mine_baseline(dataset: &EventDataset, config: MinerConfig) -> Result<MiningOutput> {
    Ok(Miner::baseline(dataset, config)?.mine())
}

fn type_or_err(dataset: &EventDataset, name: &str) -> Result<usize> {
    dataset
        .type_index(name)
        .ok_or_else(|| Error::invalid(format!("unknown event type {name}")))
}

/// Density ratio of `from → to` over anchor instances (dataset positions).
pub fn density_ratio(
    dataset: &EventDataset,
    from: &str,
    to: &str,
    anchors: &[usize],
    params: &NeighborhoodParams,
) -> Result<f64> {
    let config = MinerConfig {
        params: *params,
        theta: 1.0,
        max_len: DEFAULT_MAX_LEN,
    };
    let miner = Miner::baseline(dataset, config)?;
    miner.ratio(type_or_err(dataset, from)?, anchors, type_or_err(dataset, to)?)
}

/// Count-weighted density ratio of `from → to` over anchor microclusters
/// (given by cid).
pub fn modified_density_ratio(
    dataset: &EventDataset,
    index: &MicroclusterIndex,
    from: &str,
    to: &str,
    anchor_cids: &[usize],
    params: &NeighborhoodParams,
) -> Result<f64> {
    let config = MinerConfig {
        params: *params,
        theta: 1.0,
        max_len: DEFAULT_MAX_LEN,
    };
    let miner = Miner::micro(dataset, index, config)?;
    let tail: Vec<usize> = anchor_cids
        .iter()
        .map(|&cid| {
            cid.checked_sub(1)
                .filter(|&p| p < index.len())
                .ok_or_else(|| Error::invalid(format!("unknown microcluster {cid}")))
        })
        .collect::<Result<_>>()?;
    miner.ratio(type_or_err(dataset, from)?, &tail, type_or_err(dataset, to)?)
}
