//! Microclustering index: groups nearby same-type instances into
//! microclusters summarized by count and mean location.
//!
//! The build is greedy. Per event type, instances are visited in ascending
//! `(time, id)` order and each one is inserted into the microcluster whose
//! representative is nearest. A microcluster whose diameter grows past the
//! threshold is split around its farthest pair of members, recursively,
//! until every piece is within the threshold. The capped variant also
//! splits any microcluster holding more than `K` instances.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::st_distance_sq;
use crate::model::{EventDataset, NormalizationParams, StPoint};

/// Parameters the index was built with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildParams {
    pub diameter: f64,
    pub cap: Option<usize>,
    pub norm: NormalizationParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Microcluster {
    /// Identifier; 1-based and unique within an index. Zero for clusters not
    /// yet placed into an index.
    pub cid: usize,
    pub event_type: String,
    /// Dataset positions of the members.
    pub members: Vec<usize>,
    pub rep_location: Vec<f64>,
    pub rep_time: f64,
}

impl Microcluster {
    fn from_members(cid: usize, dataset: &EventDataset, members: Vec<usize>) -> Self {
        let rep = mean_point(dataset.points(), &members);
        let ty = dataset.type_of(members[0]);
        Microcluster {
            cid,
            event_type: dataset.event_types()[ty].clone(),
            members,
            rep_location: rep.loc[..dataset.dim()].to_vec(),
            rep_time: rep.time,
        }
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn rep(&self) -> StPoint {
        StPoint::new(&self.rep_location, self.rep_time)
    }

    pub fn member_ids<'a>(&'a self, dataset: &'a EventDataset) -> impl Iterator<Item = &'a str> + 'a {
        self.members
            .iter()
            .map(move |&i| dataset.instances()[i].id.as_str())
    }
}

/// The reduced dataset `MC_D`: every microcluster, grouped by event type.
#[derive(Debug, Clone)]
pub struct MicroclusterIndex {
    dim: usize,
    types: Vec<String>,
    clusters: Vec<Microcluster>,
    by_type: Vec<Vec<usize>>,
    params: BuildParams,
}

impl MicroclusterIndex {
    /// Assembles an index from per-type groups of dataset positions.
    ///
    /// `groups[t]` holds the member lists of type-`t` microclusters. CIDs
    /// are assigned in type order, then group order, starting at 1.
    pub fn from_groups(
        dataset: &EventDataset,
        groups: Vec<Vec<Vec<usize>>>,
        params: BuildParams,
    ) -> Result<Self> {
        if groups.len() != dataset.event_types().len() {
            return Err(Error::InvalidDataset(format!(
                "expected groups for {} event types, got {}",
                dataset.event_types().len(),
                groups.len()
            )));
        }
        let mut seen = vec![false; dataset.len()];
        let mut clusters = Vec::new();
        let mut by_type = Vec::with_capacity(groups.len());
        for (t, type_groups) in groups.into_iter().enumerate() {
            let mut positions = Vec::with_capacity(type_groups.len());
            for members in type_groups {
                if members.is_empty() {
                    return Err(Error::EmptyCluster);
                }
                for &i in &members {
                    if i >= dataset.len() || dataset.type_of(i) != t {
                        return Err(Error::InvalidDataset(format!(
                            "microcluster member {i} is not a {} instance",
                            dataset.event_types()[t]
                        )));
                    }
                    if std::mem::replace(&mut seen[i], true) {
                        return Err(Error::InvalidDataset(format!(
                            "instance {} belongs to two microclusters",
                            dataset.instances()[i].id
                        )));
                    }
                }
                positions.push(clusters.len());
                clusters.push(Microcluster::from_members(clusters.len() + 1, dataset, members));
            }
            by_type.push(positions);
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidDataset(format!(
                "instance {} is not covered by any microcluster",
                dataset.instances()[i].id
            )));
        }
        Ok(MicroclusterIndex {
            dim: dataset.dim(),
            types: dataset.event_types().to_vec(),
            clusters,
            by_type,
            params,
        })
    }

    /// Every instance in its own microcluster.
    pub fn singletons(dataset: &EventDataset) -> Self {
        let groups = (0..dataset.event_types().len())
            .map(|t| dataset.instances_of(t).iter().map(|&i| vec![i]).collect())
            .collect();
        let params = BuildParams {
            diameter: 0.0,
            cap: Some(1),
            norm: NormalizationParams::IDENTITY,
        };
        Self::from_groups(dataset, groups, params).expect("singleton partition is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn event_types(&self) -> &[String] {
        &self.types
    }

    pub fn params(&self) -> &BuildParams {
        &self.params
    }

    pub fn clusters(&self) -> &[Microcluster] {
        &self.clusters
    }

    /// Positions (into [`clusters`](Self::clusters)) of the type-`t` microclusters.
    pub fn of_type(&self, t: usize) -> &[usize] {
        &self.by_type[t]
    }

    pub fn by_cid(&self, cid: usize) -> Option<&Microcluster> {
        cid.checked_sub(1).and_then(|i| self.clusters.get(i))
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

pub(crate) fn mean_point(points: &[StPoint], members: &[usize]) -> StPoint {
    let mut sum = [0.0; 3];
    for &i in members {
        let p = &points[i];
        sum[0] += p.loc[0];
        sum[1] += p.loc[1];
        sum[2] += p.time;
    }
    let m = members.len() as f64;
    StPoint {
        loc: [sum[0] / m, sum[1] / m],
        time: sum[2] / m,
    }
}

/// Root-mean-square pairwise distance, via the identity
/// `Σᵢ Σⱼ |pᵢ − pⱼ|² = 2m Σᵢ |pᵢ − μ|²`.
fn members_diameter(points: &[StPoint], members: &[usize], norm: &NormalizationParams) -> f64 {
    let m = members.len();
    if m < 2 {
        return 0.0;
    }
    let mut mean = [0.0; 3];
    for &i in members {
        let s = norm.scale(&points[i]);
        for k in 0..3 {
            mean[k] += s[k];
        }
    }
    for v in &mut mean {
        *v /= m as f64;
    }
    let mut ss = 0.0;
    for &i in members {
        let s = norm.scale(&points[i]);
        for k in 0..3 {
            let d = s[k] - mean[k];
            ss += d * d;
        }
    }
    (2.0 * ss / (m - 1) as f64).sqrt()
}

/// Diameter of a set of points: zero for one point, otherwise
/// `sqrt(Σᵢ Σⱼ dist(pᵢ, pⱼ)² / (m (m − 1)))`.
pub fn diameter(points: &[StPoint], norm: &NormalizationParams) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let all: Vec<usize> = (0..points.len()).collect();
    Ok(members_diameter(points, &all, norm))
}

/// Splits `members` around their farthest pair. Ties on the pair are broken
/// by the lexicographically smallest id pair; the seed with the smaller id
/// comes first and wins equidistant members.
fn split_members(
    dataset: &EventDataset,
    members: &[usize],
    norm: &NormalizationParams,
) -> (Vec<usize>, Vec<usize>) {
    debug_assert!(members.len() >= 2);
    let points = dataset.points();
    let ids = dataset.instances();
    let ordered = |a: usize, b: usize| {
        if ids[a].id <= ids[b].id {
            (a, b)
        } else {
            (b, a)
        }
    };

    let mut best = ordered(members[0], members[1]);
    let mut best_d = st_distance_sq(&points[best.0], &points[best.1], norm);
    for (x, &a) in members.iter().enumerate() {
        for &b in &members[x + 1..] {
            let d = st_distance_sq(&points[a], &points[b], norm);
            if d > best_d {
                best = ordered(a, b);
                best_d = d;
            } else if d == best_d {
                let pair = ordered(a, b);
                if (&ids[pair.0].id, &ids[pair.1].id) < (&ids[best.0].id, &ids[best.1].id) {
                    best = pair;
                }
            }
        }
    }

    let (s1, s2) = best;
    let mut first = Vec::new();
    let mut second = Vec::new();
    for &i in members {
        if i == s1 {
            first.push(i);
        } else if i == s2 {
            second.push(i);
        } else if st_distance_sq(&points[i], &points[s1], norm)
            <= st_distance_sq(&points[i], &points[s2], norm)
        {
            first.push(i);
        } else {
            second.push(i);
        }
    }
    (first, second)
}

/// One farthest-pair split of a microcluster into two.
///
/// The returned microclusters carry `cid = 0`; identifiers are assigned once
/// clusters are placed into an index.
pub fn split(
    cluster: &Microcluster,
    dataset: &EventDataset,
    norm: &NormalizationParams,
) -> Result<(Microcluster, Microcluster)> {
    if cluster.count() < 2 {
        return Err(Error::SplitSingleton);
    }
    let (a, b) = split_members(dataset, &cluster.members, norm);
    Ok((
        Microcluster::from_members(0, dataset, a),
        Microcluster::from_members(0, dataset, b),
    ))
}

fn split_to_diameter(
    dataset: &EventDataset,
    members: Vec<usize>,
    d: f64,
    norm: &NormalizationParams,
    out: &mut Vec<Vec<usize>>,
) {
    if members_diameter(dataset.points(), &members, norm) <= d {
        out.push(members);
        return;
    }
    let (a, b) = split_members(dataset, &members, norm);
    split_to_diameter(dataset, a, d, norm, out);
    split_to_diameter(dataset, b, d, norm, out);
}

struct Working {
    members: Vec<usize>,
    sum: [f64; 3],
    rep: StPoint,
}

impl Working {
    fn new(points: &[StPoint], members: Vec<usize>) -> Self {
        let mut w = Working {
            members: Vec::new(),
            sum: [0.0; 3],
            rep: points[members[0]],
        };
        for i in members {
            w.push(points, i);
        }
        w
    }

    fn push(&mut self, points: &[StPoint], i: usize) {
        let p = &points[i];
        self.sum[0] += p.loc[0];
        self.sum[1] += p.loc[1];
        self.sum[2] += p.time;
        self.members.push(i);
        let m = self.members.len() as f64;
        self.rep = StPoint {
            loc: [self.sum[0] / m, self.sum[1] / m],
            time: self.sum[2] / m,
        };
    }
}

fn cluster_type(
    dataset: &EventDataset,
    t: usize,
    d: f64,
    cap: Option<usize>,
    norm: &NormalizationParams,
) -> Vec<Vec<usize>> {
    let points = dataset.points();
    let mut clusters: Vec<Working> = Vec::new();
    let mut pieces = Vec::new();

    for &i in dataset.instances_of(t) {
        let p = &points[i];
        let Some(nearest) = clusters
            .iter()
            .enumerate()
            .map(|(j, c)| (j, st_distance_sq(p, &c.rep, norm)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(j, _)| j)
        else {
            clusters.push(Working::new(points, vec![i]));
            continue;
        };

        let target = &mut clusters[nearest];
        target.push(points, i);

        pieces.clear();
        if cap.is_some_and(|k| target.members.len() > k) {
            let (a, b) = split_members(dataset, &target.members, norm);
            split_to_diameter(dataset, a, d, norm, &mut pieces);
            split_to_diameter(dataset, b, d, norm, &mut pieces);
        } else if members_diameter(points, &target.members, norm) > d {
            let members = std::mem::take(&mut target.members);
            split_to_diameter(dataset, members, d, norm, &mut pieces);
        } else {
            continue;
        }

        let mut drained = pieces.drain(..);
        let head = drained.next().expect("a split yields pieces");
        clusters[nearest] = Working::new(points, head);
        clusters.extend(drained.map(|m| Working::new(points, m)));
    }

    clusters.into_iter().map(|c| c.members).collect()
}

fn build(
    dataset: &EventDataset,
    d: f64,
    cap: Option<usize>,
    norm: NormalizationParams,
) -> Result<MicroclusterIndex> {
    if !(d > 0.0) {
        return Err(Error::invalid(format!("diameter threshold must be positive, got {d}")));
    }
    if cap == Some(0) {
        return Err(Error::invalid("instance cap must be at least 1"));
    }
    let groups: Vec<Vec<Vec<usize>>> = (0..dataset.event_types().len())
        .into_par_iter()
        .map(|t| cluster_type(dataset, t, d, cap, &norm))
        .collect();
    MicroclusterIndex::from_groups(
        dataset,
        groups,
        BuildParams {
            diameter: d,
            cap,
            norm,
        },
    )
}

/// Diameter-limited microclustering. Every resulting microcluster has
/// diameter at most `d` (measured under `norm`).
pub fn build_index(
    dataset: &EventDataset,
    d: f64,
    norm: NormalizationParams,
) -> Result<MicroclusterIndex> {
    build(dataset, d, None, norm)
}

/// Microclustering limited by both diameter `d` and instance count `k`.
pub fn build_index_capped(
    dataset: &EventDataset,
    d: f64,
    k: usize,
    norm: NormalizationParams,
) -> Result<MicroclusterIndex> {
    build(dataset, d, Some(k), norm)
}

/// Dataset size over index size.
pub fn compression_ratio(dataset_size: usize, index_size: usize) -> Result<f64> {
    if index_size == 0 {
        return Err(Error::invalid("index size must be positive"));
    }
    Ok(dataset_size as f64 / index_size as f64)
}
