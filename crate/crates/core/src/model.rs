//! Domain types: event instances, datasets, the embedding space and
//! neighborhood parameters.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};

/// A location in space-time. Unused spatial slots are zero, so 1-D data
/// can share the 2-D distance kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StPoint {
    pub loc: [f64; 2],
    pub time: f64,
}

impl StPoint {
    pub fn new(location: &[f64], time: f64) -> Self {
        let mut loc = [0.0; 2];
        loc[..location.len()].copy_from_slice(location);
        StPoint { loc, time }
    }

    #[inline]
    pub(crate) fn spatial_dist_sq(&self, other: &StPoint) -> f64 {
        let dx = self.loc[0] - other.loc[0];
        let dy = self.loc[1] - other.loc[1];
        dx * dx + dy * dy
    }
}

/// One occurrence of an event type.
#[derive(Debug, Clone, PartialEq)]
pub struct EventInstance {
    pub id: String,
    pub event_type: String,
    pub location: Vec<f64>,
    pub time: f64,
}

impl EventInstance {
    pub fn new(
        id: impl Into<String>,
        event_type: impl Into<String>,
        location: &[f64],
        time: f64,
    ) -> Self {
        EventInstance {
            id: id.into(),
            event_type: event_type.into(),
            location: location.to_vec(),
            time,
        }
    }

    pub fn point(&self) -> StPoint {
        StPoint::new(&self.location, self.time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(Error::invalid(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// The space-time box `V` a dataset is embedded in.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpace {
    pub spatial: Vec<Interval>,
    pub temporal: Interval,
}

impl EmbeddingSpace {
    pub fn new(spatial: Vec<Interval>, temporal: Interval) -> Result<Self> {
        check_dim(spatial.len())?;
        Ok(EmbeddingSpace { spatial, temporal })
    }

    /// Closed box `[0, edge]^dim × [0, duration]`.
    pub fn cube(dim: usize, edge: f64, duration: f64) -> Result<Self> {
        let side = Interval::new(0.0, edge)?;
        Self::new(vec![side; dim], Interval::new(0.0, duration)?)
    }

    /// Smallest box containing every instance.
    pub fn bounding_box(dim: usize, instances: &[EventInstance]) -> Result<Self> {
        check_dim(dim)?;
        if instances.is_empty() {
            return Self::new(
                vec![Interval { lo: 0.0, hi: 0.0 }; dim],
                Interval { lo: 0.0, hi: 0.0 },
            );
        }
        let mut spatial = vec![
            Interval {
                lo: f64::INFINITY,
                hi: f64::NEG_INFINITY
            };
            dim
        ];
        let mut temporal = Interval {
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
        };
        for e in instances {
            for (iv, &c) in spatial.iter_mut().zip(&e.location) {
                iv.lo = iv.lo.min(c);
                iv.hi = iv.hi.max(c);
            }
            temporal.lo = temporal.lo.min(e.time);
            temporal.hi = temporal.hi.max(e.time);
        }
        Self::new(spatial, temporal)
    }

    pub fn dim(&self) -> usize {
        self.spatial.len()
    }

    pub fn contains(&self, p: &StPoint) -> bool {
        self.temporal.contains(p.time)
            && self
                .spatial
                .iter()
                .zip(p.loc.iter())
                .all(|(iv, &c)| iv.contains(c))
    }
}

/// Cylinder radius `R` and depth `T` of a neighborhood space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodParams {
    pub radius: f64,
    pub interval: f64,
}

impl NeighborhoodParams {
    pub fn new(radius: f64, interval: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !(interval > 0.0 && interval.is_finite()) {
            return Err(Error::invalid(format!(
                "neighborhood radius and interval must be positive, got R={radius}, T={interval}"
            )));
        }
        Ok(NeighborhoodParams { radius, interval })
    }
}

/// Per-axis scale applied before microclustering distances. Spatial axes
/// are divided by `spatial`, time by `temporal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationParams {
    pub spatial: f64,
    pub temporal: f64,
}

impl Default for NormalizationParams {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl NormalizationParams {
    pub const IDENTITY: NormalizationParams = NormalizationParams {
        spatial: 1.0,
        temporal: 1.0,
    };

    pub fn new(spatial: f64, temporal: f64) -> Result<Self> {
        if !(spatial > 0.0 && spatial.is_finite()) || !(temporal > 0.0 && temporal.is_finite()) {
            return Err(Error::invalid(format!(
                "normalization components must be positive, got d_s={spatial}, d_t={temporal}"
            )));
        }
        Ok(NormalizationParams { spatial, temporal })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Diameter threshold matching one unit of spatial and one unit of
    /// temporal spread once both axes are scaled.
    pub fn combined_threshold() -> f64 {
        std::f64::consts::SQRT_2
    }

    #[inline]
    pub(crate) fn scale(&self, p: &StPoint) -> [f64; 3] {
        [
            p.loc[0] / self.spatial,
            p.loc[1] / self.spatial,
            p.time / self.temporal,
        ]
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// The event types `F`, instances `D` and the embedding space `V`.
///
/// Instances are grouped by type at construction; within a type they are
/// kept in ascending `(time, id)` order, which is the processing order of
/// the microclustering build.
#[derive(Debug, Clone)]
pub struct EventDataset {
    dim: usize,
    types: Vec<String>,
    instances: Vec<EventInstance>,
    space: EmbeddingSpace,
    points: Vec<StPoint>,
    type_of: Vec<usize>,
    by_type: Vec<Vec<usize>>,
}

impl EventDataset {
    pub fn new<I, S>(
        dim: usize,
        event_types: I,
        instances: Vec<EventInstance>,
        space: EmbeddingSpace,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        check_dim(dim)?;
        if space.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: space.dim(),
            });
        }
        let types: Vec<String> = event_types
            .into_iter()
            .map(Into::into)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let type_pos: HashMap<&str, usize> = types
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();

        let mut seen = HashSet::with_capacity(instances.len());
        let mut type_of = Vec::with_capacity(instances.len());
        let mut points = Vec::with_capacity(instances.len());
        for e in &instances {
            if e.location.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: e.location.len(),
                });
            }
            if !e.time.is_finite() || e.location.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "instance {} has non-finite coordinates",
                    e.id
                )));
            }
            if !seen.insert(e.id.as_str()) {
                return Err(Error::InvalidDataset(format!("duplicate instance id {}", e.id)));
            }
            let Some(&t) = type_pos.get(e.event_type.as_str()) else {
                return Err(Error::InvalidDataset(format!(
                    "instance {} has unknown event type {}",
                    e.id, e.event_type
                )));
            };
            type_of.push(t);
            points.push(e.point());
        }

        let mut by_type = vec![Vec::new(); types.len()];
        for (i, &t) in type_of.iter().enumerate() {
            by_type[t].push(i);
        }
        for members in &mut by_type {
            members.sort_by(|&a, &b| {
                points[a]
                    .time
                    .total_cmp(&points[b].time)
                    .then_with(|| instances[a].id.cmp(&instances[b].id))
            });
        }

        Ok(EventDataset {
            dim,
            types,
            instances,
            space,
            points,
            type_of,
            by_type,
        })
    }

    /// Builds a dataset whose types are those observed and whose space is
    /// the bounding box of the instances.
    pub fn from_instances(dim: usize, instances: Vec<EventInstance>) -> Result<Self> {
        let types: BTreeSet<String> = instances.iter().map(|e| e.event_type.clone()).collect();
        let space = EmbeddingSpace::bounding_box(dim, &instances)?;
        Self::new(dim, types, instances, space)
    }

    pub fn with_space(self, space: EmbeddingSpace) -> Result<Self> {
        Self::new(self.dim, self.types, self.instances, space)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Event types in sorted order.
    pub fn event_types(&self) -> &[String] {
        &self.types
    }

    pub fn instances(&self) -> &[EventInstance] {
        &self.instances
    }

    pub fn space(&self) -> &EmbeddingSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn type_index(&self, event_type: &str) -> Option<usize> {
        self.types.binary_search_by(|t| t.as_str().cmp(event_type)).ok()
    }

    pub fn point(&self, i: usize) -> StPoint {
        self.points[i]
    }

    pub(crate) fn points(&self) -> &[StPoint] {
        &self.points
    }

    pub fn type_of(&self, i: usize) -> usize {
        self.type_of[i]
    }

    /// Indices of type-`t` instances in `(time, id)` order.
    pub fn instances_of(&self, t: usize) -> &[usize] {
        &self.by_type[t]
    }

    pub fn position_of(&self, id: &str) -> Option<usize> {
        self.instances.iter().position(|e| e.id == id)
    }
}
