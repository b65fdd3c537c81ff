//! Volumes and distances in the embedding space.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{EmbeddingSpace, NeighborhoodParams, NormalizationParams, StPoint};

/// `|V|`: product of every spatial extent and the temporal extent.
pub fn space_volume(space: &EmbeddingSpace) -> Result<f64> {
    let volume = space
        .spatial
        .iter()
        .map(|iv| iv.len())
        .product::<f64>()
        * space.temporal.len();
    if volume > 0.0 {
        Ok(volume)
    } else {
        Err(Error::ZeroVolume)
    }
}

/// Volume of the neighborhood cylinder: `π R² T` in the plane, `2 R T` on a
/// line. Never clipped against `V`.
pub fn neighborhood_volume(params: &NeighborhoodParams, spatial_dim: usize) -> Result<f64> {
    let (r, t) = (params.radius, params.interval);
    match spatial_dim {
        1 => Ok(2.0 * r * t),
        2 => Ok(PI * r * r * t),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

/// Euclidean distance over `(location, time)` after dividing spatial axes by
/// `norm.spatial` and time by `norm.temporal`.
pub fn st_distance(
    a: (&[f64], f64),
    b: (&[f64], f64),
    norm: &NormalizationParams,
) -> Result<f64> {
    if a.0.len() != b.0.len() {
        return Err(Error::DimensionMismatch {
            expected: a.0.len(),
            actual: b.0.len(),
        });
    }
    let spatial: f64 = a
        .0
        .iter()
        .zip(b.0)
        .map(|(x, y)| {
            let d = (x - y) / norm.spatial;
            d * d
        })
        .sum();
    let dt = (a.1 - b.1) / norm.temporal;
    Ok((spatial + dt * dt).sqrt())
}

#[inline]
pub(crate) fn st_distance_sq(a: &StPoint, b: &StPoint, norm: &NormalizationParams) -> f64 {
    let (p, q) = (norm.scale(a), norm.scale(b));
    let d0 = p[0] - q[0];
    let d1 = p[1] - q[1];
    let d2 = p[2] - q[2];
    d0 * d0 + d1 * d1 + d2 * d2
}

/// Raw spatial distance; neighborhood membership compares it with `R`.
#[inline]
pub fn spatial_distance(a: &StPoint, b: &StPoint) -> f64 {
    a.spatial_dist_sq(b).sqrt()
}

/// The neighborhood predicate: `b` lies within `R` of `a` and strictly
/// after it, by at most `T`.
#[inline]
pub fn in_neighborhood(anchor: &StPoint, p: &StPoint, params: &NeighborhoodParams) -> bool {
    let dt = p.time - anchor.time;
    dt > 0.0 && dt <= params.interval && spatial_distance(anchor, p) <= params.radius
}
