//! Voxelized reference domain `B` and the physical particle `Omega = delta B + z`.
//!
//! The reference shapes are unit-scale and centered at the origin: the ball of
//! radius 1, the unit-volume cube, and an axis-aligned ellipsoid. Voxelization
//! is centroid-inclusion on a regular grid over the bounding box, with a
//! deterministic lexicographic ordering of the kept cells.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::NanoheatError;

/// Reference shapes, all centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// Ball of radius 1 (bounding box `[-1,1]^3`).
    Ball,
    /// Cube of unit volume, `[-1/2,1/2]^3`; tiles exactly.
    Cube,
    /// Ellipsoid with semi-axes `(a, b, c)`.
    Ellipsoid { a: f64, b: f64, c: f64 },
}

impl Shape {
    /// Half-extent of the bounding box along each axis.
    pub fn half_extent(&self) -> [f64; 3] {
        match *self {
            Shape::Ball => [1.0, 1.0, 1.0],
            Shape::Cube => [0.5, 0.5, 0.5],
            Shape::Ellipsoid { a, b, c } => [a, b, c],
        }
    }

    /// Centroid-inclusion test.
    pub fn contains(&self, p: [f64; 3]) -> bool {
        match *self {
            Shape::Ball => p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= 1.0,
            Shape::Cube => true,
            Shape::Ellipsoid { a, b, c } => {
                let q = [p[0] / a, p[1] / b, p[2] / c];
                q[0] * q[0] + q[1] * q[1] + q[2] * q[2] <= 1.0
            }
        }
    }

    /// Exact volume of the continuous shape.
    pub fn analytic_volume(&self) -> f64 {
        match *self {
            Shape::Ball => 4.0 * std::f64::consts::PI / 3.0,
            Shape::Cube => 1.0,
            Shape::Ellipsoid { a, b, c } => 4.0 * std::f64::consts::PI / 3.0 * a * b * c,
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            Shape::Ball => "ball".into(),
            Shape::Cube => "cube".into(),
            Shape::Ellipsoid { a, b, c } => format!("ellipsoid_{a}_{b}_{c}"),
        }
    }
}

/// Voxelized unit-scale domain on a regular grid.
///
/// `index_of` maps grid cells `(i, j, k)` (flattened as `i*n*n + j*n + k`) to
/// voxel indices, or -1 for cells outside the shape; it is what ties voxel
/// fields back to the lattice for convolution and finite-difference work.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceDomain {
    pub shape: Shape,
    pub resolution: usize,
    pub centroids: Vec<[f64; 3]>,
    pub voxel_volume: f64,
    pub total_volume: f64,
    /// Grid spacing per axis.
    pub spacing: [f64; 3],
    /// Lattice index of each voxel (i, j, k).
    pub lattice: Vec<[u32; 3]>,
    /// Flattened grid -> voxel index (-1 outside).
    pub index_of: Vec<i64>,
}

impl ReferenceDomain {
    pub fn voxel_count(&self) -> usize {
        self.centroids.len()
    }

    /// Voxel index at grid cell (i, j, k), if inside the shape.
    pub fn voxel_at(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        let n = self.resolution;
        let v = self.index_of[(i * n + j) * n + k];
        (v >= 0).then_some(v as usize)
    }

    /// Equivalent-sphere radius of one voxel, `(3 vol / 4 pi)^(1/3)`.
    pub fn equivalent_radius(&self) -> f64 {
        (3.0 * self.voxel_volume / (4.0 * std::f64::consts::PI)).powf(1.0 / 3.0)
    }
}

/// Make the voxelized reference domain for `shape` at `resolution` cells per axis.
pub fn voxelize(shape: Shape, resolution: usize) -> Result<Arc<ReferenceDomain>, NanoheatError> {
    if resolution < 4 {
        return Err(NanoheatError::InvalidParameter(format!(
            "resolution {resolution} too coarse; need >= 4"
        )));
    }
    let n = resolution;
    let he = shape.half_extent();
    let spacing = [2.0 * he[0] / n as f64, 2.0 * he[1] / n as f64, 2.0 * he[2] / n as f64];
    let voxel_volume = spacing[0] * spacing[1] * spacing[2];
    let mut centroids = Vec::new();
    let mut lattice = Vec::new();
    let mut index_of = vec![-1i64; n * n * n];
    for i in 0..n {
        let x = -he[0] + (i as f64 + 0.5) * spacing[0];
        for j in 0..n {
            let y = -he[1] + (j as f64 + 0.5) * spacing[1];
            for k in 0..n {
                let z = -he[2] + (k as f64 + 0.5) * spacing[2];
                if shape.contains([x, y, z]) {
                    index_of[(i * n + j) * n + k] = centroids.len() as i64;
                    centroids.push([x, y, z]);
                    lattice.push([i as u32, j as u32, k as u32]);
                }
            }
        }
    }
    let total_volume = centroids.len() as f64 * voxel_volume;
    Ok(Arc::new(ReferenceDomain {
        shape,
        resolution,
        centroids,
        voxel_volume,
        total_volume,
        spacing,
        lattice,
        index_of,
    }))
}

/// Physical particle `Omega = delta B + z`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Particle {
    pub delta: f64,
    pub center: [f64; 3],
}

impl Particle {
    pub fn new(delta: f64, center: [f64; 3]) -> Result<Self, NanoheatError> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(NanoheatError::InvalidParameter(format!(
                "delta must lie in (0,1], got {delta}"
            )));
        }
        Ok(Self { delta, center })
    }

    /// Map a reference point to physical coordinates, `x = delta p + z`.
    pub fn to_physical(&self, p: [f64; 3]) -> [f64; 3] {
        [
            self.delta * p[0] + self.center[0],
            self.delta * p[1] + self.center[1],
            self.delta * p[2] + self.center[2],
        ]
    }

    /// Inverse map, `p = (x - z)/delta`.
    pub fn to_reference(&self, x: [f64; 3]) -> [f64; 3] {
        [
            (x[0] - self.center[0]) / self.delta,
            (x[1] - self.center[1]) / self.delta,
            (x[2] - self.center[2]) / self.delta,
        ]
    }
}
