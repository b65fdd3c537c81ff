//! Neighborhood joins.
//!
//! A neighbor of anchor `a` is a target `p` with
//! `spatial_distance(a, p) ≤ R` and `0 < p.time − a.time ≤ T`.
//! [`TargetSet::neighbors`] evaluates that relation with a sweep along the
//! time axis: targets whose timestamps fall in the anchor's window are held
//! in a uniform grid with cell edge `R`, so each anchor inspects at most
//! `3^S` cells.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::geometry::in_neighborhood;
use crate::microcluster::MicroclusterIndex;
use crate::model::{EventDataset, NeighborhoodParams, StPoint};

/// Counters from a sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepStats {
    /// Target points whose exact predicate was evaluated.
    pub candidates: u64,
    pub matches: u64,
}

impl std::ops::AddAssign for SweepStats {
    fn add_assign(&mut self, rhs: Self) {
        self.candidates += rhs.candidates;
        self.matches += rhs.matches;
    }
}

/// Targets pre-sorted by time, ready to be swept against any anchor set.
#[derive(Debug, Clone)]
pub struct TargetSet {
    dim: usize,
    /// `(original index, point)` in ascending time order.
    sorted: Vec<(usize, StPoint)>,
}

type Cell = (i64, i64);

impl TargetSet {
    pub fn new(dim: usize, points: impl IntoIterator<Item = (usize, StPoint)>) -> Self {
        let mut sorted: Vec<(usize, StPoint)> = points.into_iter().collect();
        sorted.sort_by(|a, b| a.1.time.total_cmp(&b.1.time).then(a.0.cmp(&b.0)));
        TargetSet { dim, sorted }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Neighbors of every anchor, as original target indices in ascending
    /// order. Output is aligned with `anchors`.
    pub fn neighbors(
        &self,
        anchors: &[StPoint],
        params: &NeighborhoodParams,
        stats: &mut SweepStats,
    ) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); anchors.len()];
        if anchors.is_empty() || self.sorted.is_empty() {
            return out;
        }
        let mut order: Vec<usize> = (0..anchors.len()).collect();
        order.sort_by(|&a, &b| anchors[a].time.total_cmp(&anchors[b].time));

        let cell_edge = params.radius;
        let cell_of = |p: &StPoint| -> Cell {
            (
                (p.loc[0] / cell_edge).floor() as i64,
                (p.loc[1] / cell_edge).floor() as i64,
            )
        };
        let dy_range = if self.dim == 2 { -1..=1 } else { 0..=0 };

        let n = self.sorted.len();
        let first_time = anchors[order[0]].time;
        let mut lo = self.sorted.partition_point(|(_, p)| p.time <= first_time);
        let mut hi = lo;
        let mut grid: HashMap<Cell, VecDeque<usize>> = HashMap::new();

        for &a in &order {
            let anchor = &anchors[a];
            while lo < n && self.sorted[lo].1.time <= anchor.time {
                if lo < hi {
                    let cell = cell_of(&self.sorted[lo].1);
                    let bucket = grid.get_mut(&cell).expect("active target has a cell");
                    debug_assert_eq!(bucket.front(), Some(&lo));
                    bucket.pop_front();
                    if bucket.is_empty() {
                        grid.remove(&cell);
                    }
                }
                lo += 1;
            }
            hi = hi.max(lo);
            while hi < n && self.sorted[hi].1.time - anchor.time <= params.interval {
                grid.entry(cell_of(&self.sorted[hi].1)).or_default().push_back(hi);
                hi += 1;
            }

            let (cx, cy) = cell_of(anchor);
            let found = &mut out[a];
            for dx in -1..=1 {
                for dy in dy_range.clone() {
                    let Some(bucket) = grid.get(&(cx + dx, cy + dy)) else {
                        continue;
                    };
                    for &k in bucket {
                        stats.candidates += 1;
                        let (orig, ref p) = self.sorted[k];
                        if in_neighborhood(anchor, p, params) {
                            found.push(orig);
                        }
                    }
                }
            }
            stats.matches += found.len() as u64;
            found.sort_unstable();
        }
        out
    }
}

/// O(|anchors| · |targets|) evaluation of the neighborhood relation.
pub fn brute_force_neighbors(
    anchors: &[StPoint],
    targets: &[StPoint],
    params: &NeighborhoodParams,
) -> Vec<Vec<usize>> {
    anchors
        .iter()
        .map(|a| {
            targets
                .iter()
                .enumerate()
                .filter(|(_, p)| in_neighborhood(a, p, params))
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

fn resolve_type(types: &[String], target_type: &str) -> Result<usize> {
    types
        .binary_search_by(|t| t.as_str().cmp(target_type))
        .map_err(|_| Error::invalid(format!("unknown event type {target_type}")))
}

/// `N(e)` restricted to `target_type`, for each anchor instance (given by
/// dataset position). Keys and values are instance ids.
pub fn instance_neighbors(
    dataset: &EventDataset,
    anchors: &[usize],
    target_type: &str,
    params: &NeighborhoodParams,
) -> Result<BTreeMap<String, BTreeSet<String>>> {
    let t = resolve_type(dataset.event_types(), target_type)?;
    let targets = TargetSet::new(
        dataset.dim(),
        dataset.instances_of(t).iter().map(|&i| (i, dataset.point(i))),
    );
    let points: Vec<StPoint> = anchors.iter().map(|&i| dataset.point(i)).collect();
    let found = targets.neighbors(&points, params, &mut SweepStats::default());
    let ids = dataset.instances();
    Ok(anchors
        .iter()
        .zip(found)
        .map(|(&a, ns)| {
            (
                ids[a].id.clone(),
                ns.into_iter().map(|i| ids[i].id.clone()).collect(),
            )
        })
        .collect())
}

/// `n(e_c)` restricted to `target_type`: microclusters of that type whose
/// representatives lie in the anchor's neighborhood space. Keyed by cid.
pub fn microcluster_neighbors(
    index: &MicroclusterIndex,
    anchor_cids: &[usize],
    target_type: &str,
    params: &NeighborhoodParams,
) -> Result<BTreeMap<usize, BTreeSet<usize>>> {
    let t = resolve_type(index.event_types(), target_type)?;
    let clusters = index.clusters();
    let targets = TargetSet::new(
        index.dim(),
        index.of_type(t).iter().map(|&c| (c, clusters[c].rep())),
    );
    let mut points = Vec::with_capacity(anchor_cids.len());
    for &cid in anchor_cids {
        let c = index
            .by_cid(cid)
            .ok_or_else(|| Error::invalid(format!("unknown microcluster {cid}")))?;
        points.push(c.rep());
    }
    let found = targets.neighbors(&points, params, &mut SweepStats::default());
    Ok(anchor_cids
        .iter()
        .zip(found)
        .map(|(&cid, ns)| (cid, ns.into_iter().map(|c| clusters[c].cid).collect()))
        .collect())
}

/// `N(e_c)`: ids of the instances held by the given neighbor microclusters.
pub fn covered_instances(
    neighbor_cids: &BTreeSet<usize>,
    index: &MicroclusterIndex,
    dataset: &EventDataset,
) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for &cid in neighbor_cids {
        let c = index
            .by_cid(cid)
            .ok_or_else(|| Error::invalid(format!("unknown microcluster {cid}")))?;
        out.extend(c.member_ids(dataset).map(String::from));
    }
    Ok(out)
}
