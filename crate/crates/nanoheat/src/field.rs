//! Per-voxel complex 3-vector fields on a reference domain.

use num_complex::Complex64;
use std::sync::Arc;

use crate::domain::ReferenceDomain;
use crate::NanoheatError;

/// A complex vector field sampled at voxel centroids, components interleaved
/// as `[v0x, v0y, v0z, v1x, ...]`.
#[derive(Debug, Clone)]
pub struct ComplexVectorField {
    pub domain: Arc<ReferenceDomain>,
    pub values: Vec<Complex64>,
}

impl ComplexVectorField {
    pub fn zeros(domain: Arc<ReferenceDomain>) -> Self {
        let n = 3 * domain.voxel_count();
        Self { domain, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn from_values(
        domain: Arc<ReferenceDomain>,
        values: Vec<Complex64>,
    ) -> Result<Self, NanoheatError> {
        if values.len() != 3 * domain.voxel_count() {
            return Err(NanoheatError::InvalidParameter(format!(
                "field length {} does not match 3 x {} voxels",
                values.len(),
                domain.voxel_count()
            )));
        }
        Ok(Self { domain, values })
    }

    /// Constant field with the given vector at every voxel.
    pub fn constant(domain: Arc<ReferenceDomain>, v: [Complex64; 3]) -> Self {
        let count = domain.voxel_count();
        let mut values = Vec::with_capacity(3 * count);
        for _ in 0..count {
            values.extend_from_slice(&v);
        }
        Self { domain, values }
    }

    /// Build from a function of the centroid.
    pub fn from_fn(domain: Arc<ReferenceDomain>, f: impl Fn([f64; 3]) -> [Complex64; 3]) -> Self {
        let mut values = Vec::with_capacity(3 * domain.voxel_count());
        for c in &domain.centroids {
            values.extend_from_slice(&f(*c));
        }
        Self { domain, values }
    }

    pub fn vector_at(&self, voxel: usize) -> [Complex64; 3] {
        [self.values[3 * voxel], self.values[3 * voxel + 1], self.values[3 * voxel + 2]]
    }

    /// `int_B v dx` as a complex 3-vector (midpoint quadrature).
    pub fn mean_integral(&self) -> [Complex64; 3] {
        let vol = self.domain.voxel_volume;
        let mut s = [Complex64::new(0.0, 0.0); 3];
        for chunk in self.values.chunks_exact(3) {
            s[0] += chunk[0];
            s[1] += chunk[1];
            s[2] += chunk[2];
        }
        [s[0] * vol, s[1] * vol, s[2] * vol]
    }

    /// Discrete `L^2(B)` inner product `<self, other> = sum conj(a) . b vol`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (a, b) in self.values.iter().zip(&other.values) {
            s += a.conj() * b;
        }
        s * self.domain.voxel_volume
    }

    /// `||v||_{L^2(B)}`.
    pub fn norm_l2(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.domain.voxel_volume).sqrt()
    }

    /// `sum_i |v_i|^2 vol` (squared L2 norm on B).
    pub fn norm_l2_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.domain.voxel_volume
    }

    /// `||v||_{L^4(B)}`.
    pub fn norm_l4(&self) -> f64 {
        let s: f64 = self
            .values
            .chunks_exact(3)
            .map(|c| {
                let m2 = c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr();
                m2 * m2
            })
            .sum();
        (s * self.domain.voxel_volume).powf(0.25)
    }

    /// Per-voxel squared magnitude `|v|^2`.
    pub fn magnitude_sq(&self) -> Vec<f64> {
        self.values
            .chunks_exact(3)
            .map(|c| c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr())
            .collect()
    }

    pub fn scale(&mut self, alpha: Complex64) {
        for v in &mut self.values {
            *v *= alpha;
        }
    }
}
