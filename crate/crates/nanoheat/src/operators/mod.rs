//! Helmholtz kernels and the Newtonian / Magnetization volume operators.
//!
//! The discrete operators act on per-voxel complex 3-vectors. Off-diagonal
//! entries come from midpoint quadrature of the kernels; the weakly singular
//! self cells use the analytic integral over a volume-equivalent sphere, and
//! the magnetization diagonal carries the depolarization dyadic `(1/3) I` with
//! the sign convention that a uniform field on the ball maps to `+E0/3`
//! (equivalently, the static operator is the identity on curl-free fields with
//! vanishing tangential trace).

pub mod eigen;
pub mod fft;
pub mod projectors;

use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

use crate::domain::ReferenceDomain;
use crate::field::ComplexVectorField;
use crate::NanoheatError;

/// `G^(k)(x, y) = exp(ik|x-y|) / (4 pi |x-y|)`.
pub fn green(x: [f64; 3], y: [f64; 3], k: Complex64) -> Result<Complex64, NanoheatError> {
    let r = dist(x, y);
    if r == 0.0 {
        return Err(NanoheatError::SingularPoint);
    }
    Ok((Complex64::i() * k * r).exp() / (4.0 * std::f64::consts::PI * r))
}

/// Negative Hessian of the Green kernel, `-Hess_x G^(k)(x, y)`, the
/// off-diagonal magnetization block before the quadrature weight:
///
/// ```text
/// -Hess G = exp(ikr)/(4 pi r^3) [ (1 - ikr) I + (k^2 r^2 + 3 ikr - 3) rhat rhat^T ]
/// ```
pub fn neg_hess_green(x: [f64; 3], y: [f64; 3], k: Complex64) -> Result<[[Complex64; 3]; 3], NanoheatError> {
    let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    if r2 == 0.0 {
        return Err(NanoheatError::SingularPoint);
    }
    let r = r2.sqrt();
    let ikr = Complex64::i() * k * r;
    let pref = ikr.exp() / (4.0 * std::f64::consts::PI * r2 * r);
    let diag = pref * (1.0 - ikr);
    let dyad = pref * (k * k * r2 + 3.0 * ikr - 3.0) / r2;
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            out[a][b] = dyad * d[a] * d[b];
            if a == b {
                out[a][b] += diag;
            }
        }
    }
    Ok(out)
}

fn dist(x: [f64; 3], y: [f64; 3]) -> f64 {
    let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Self integral of the Green kernel over the volume-equivalent sphere of
/// radius `a`: `int_0^a r exp(ikr) dr`, equal to `a^2/2` at `k = 0`.
pub fn newtonian_self_term(a: f64, k: Complex64) -> Complex64 {
    if (k * a).norm() < 1e-4 {
        // series sum_m (ik)^m a^(m+2) / (m! (m+2))
        let ika = Complex64::i() * k * a;
        let mut term = Complex64::new(a * a, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for m in 0..6 {
            sum += term / (m as f64 + 2.0);
            term *= ika / (m as f64 + 1.0);
        }
        sum
    } else {
        let ika = Complex64::i() * k * a;
        (ika.exp() * (ika - 1.0) + 1.0) / (-k * k)
    }
}

/// Magnetization diagonal block scalar: `(1/3)(1 + k^2 S_N(a, k))`.
pub fn magnetization_self_term(a: f64, k: Complex64) -> Complex64 {
    (1.0 + k * k * newtonian_self_term(a, k)) / 3.0
}

/// Which volume operator a dense matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Newtonian,
    Magnetization,
}

enum Storage {
    /// V x V scalar kernel acting identically on each Cartesian component.
    ScalarBlocks(Vec<Complex64>),
    /// Full 3V x 3V matrix, row-major.
    Full(Vec<Complex64>),
}

/// Dense discretization of `N_B^(k)` or `M_B^(k)` on a reference domain.
pub struct DenseOperator {
    pub kind: OperatorKind,
    pub k: Complex64,
    pub domain: Arc<ReferenceDomain>,
    storage: Storage,
}

impl DenseOperator {
    /// Dimension of the operator as a matrix on interleaved 3-vectors.
    pub fn dim(&self) -> usize {
        3 * self.domain.voxel_count()
    }

    /// Entry in the 3V x 3V sense.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        let v = self.domain.voxel_count();
        match &self.storage {
            Storage::ScalarBlocks(g) => {
                let (i, a) = (row / 3, row % 3);
                let (j, b) = (col / 3, col % 3);
                if a == b {
                    g[i * v + j]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Storage::Full(m) => m[row * 3 * v + col],
        }
    }

    /// Matrix-vector product on an interleaved 3-vector array.
    pub fn apply_slice(&self, u: &[Complex64]) -> Vec<Complex64> {
        let v = self.domain.voxel_count();
        assert_eq!(u.len(), 3 * v);
        match &self.storage {
            Storage::ScalarBlocks(g) => {
                let mut out = vec![Complex64::new(0.0, 0.0); 3 * v];
                out.par_chunks_mut(3).enumerate().for_each(|(i, chunk)| {
                    let row = &g[i * v..(i + 1) * v];
                    let mut acc = [Complex64::new(0.0, 0.0); 3];
                    for (j, gij) in row.iter().enumerate() {
                        acc[0] += gij * u[3 * j];
                        acc[1] += gij * u[3 * j + 1];
                        acc[2] += gij * u[3 * j + 2];
                    }
                    chunk.copy_from_slice(&acc);
                });
                out
            }
            Storage::Full(m) => {
                let n = 3 * v;
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                out.par_iter_mut().enumerate().for_each(|(r, o)| {
                    let row = &m[r * n..(r + 1) * n];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (x, w) in u.iter().zip(row) {
                        acc += w * x;
                    }
                    *o = acc;
                });
                out
            }
        }
    }

    pub fn apply(&self, u: &ComplexVectorField) -> ComplexVectorField {
        ComplexVectorField {
            domain: u.domain.clone(),
            values: self.apply_slice(&u.values),
        }
    }

    /// Relative deviation from Hermitian symmetry, `||A - A^H|| / ||A||`
    /// (Frobenius norms).
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut num = 0.0;
        let mut den = 0.0;
        for r in 0..n {
            for c in 0..n {
                let a = self.entry(r, c);
                den += a.norm_sqr();
                num += (a - self.entry(c, r).conj()).norm_sqr();
            }
        }
        (num / den).sqrt()
    }

    /// Relative deviation from complex symmetry, `||A - A^T|| / ||A||`.
    pub fn symmetric_deviation(&self) -> f64 {
        let n = self.dim();
        let mut num = 0.0;
        let mut den = 0.0;
        for r in 0..n {
            for c in 0..n {
                let a = self.entry(r, c);
                den += a.norm_sqr();
                num += (a - self.entry(c, r)).norm_sqr();
            }
        }
        (num / den).sqrt()
    }
}

/// Assemble the Newtonian operator `(N u)_i = sum_j G(x_i, x_j, k) u_j vol`.
pub fn assemble_newtonian(domain: &Arc<ReferenceDomain>, k: Complex64) -> DenseOperator {
    let v = domain.voxel_count();
    let vol = domain.voxel_volume;
    let a = domain.equivalent_radius();
    let self_term = newtonian_self_term(a, k);
    let pts = &domain.centroids;
    let mut g = vec![Complex64::new(0.0, 0.0); v * v];
    g.par_chunks_mut(v).enumerate().for_each(|(i, row)| {
        for (j, rj) in row.iter_mut().enumerate() {
            *rj = if i == j {
                self_term
            } else {
                green(pts[i], pts[j], k).expect("distinct centroids") * vol
            };
        }
    });
    DenseOperator {
        kind: OperatorKind::Newtonian,
        k,
        domain: domain.clone(),
        storage: Storage::ScalarBlocks(g),
    }
}

/// Assemble the Magnetization operator with `-Hess G` off-diagonal blocks and
/// the `(1/3)(1 + k^2 S_N)` depolarization diagonal.
pub fn assemble_magnetization(domain: &Arc<ReferenceDomain>, k: Complex64) -> DenseOperator {
    let v = domain.voxel_count();
    let n = 3 * v;
    let vol = domain.voxel_volume;
    let a = domain.equivalent_radius();
    let diag = magnetization_self_term(a, k);
    let pts = &domain.centroids;
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    m.par_chunks_mut(3 * n).enumerate().for_each(|(i, rows)| {
        // rows = the three rows of voxel i
        for j in 0..v {
            if i == j {
                for aa in 0..3 {
                    rows[aa * n + 3 * j + aa] = diag;
                }
            } else {
                let blk = neg_hess_green(pts[i], pts[j], k).expect("distinct centroids");
                for aa in 0..3 {
                    for bb in 0..3 {
                        rows[aa * n + 3 * j + bb] = blk[aa][bb] * vol;
                    }
                }
            }
        }
    });
    DenseOperator {
        kind: OperatorKind::Magnetization,
        k,
        domain: domain.clone(),
        storage: Storage::Full(m),
    }
}

/// Newtonian operator built from the quasi-static `k`-expansion,
///
/// ```text
/// N^(k) = N^(0) + (ik/4pi) int dy + sum_{j=1..J} (ik)^(j+1)/(4pi (j+1)!) int |x-y|^j dy,
/// ```
///
/// truncated after the `|x-y|^J` term. Converges to the directly assembled
/// operator as J grows while `|k| diam(B) < 1`.
pub fn expand_newtonian_series(
    domain: &Arc<ReferenceDomain>,
    k: Complex64,
    truncation: usize,
) -> Result<DenseOperator, NanoheatError> {
    if truncation < 1 {
        return Err(NanoheatError::InvalidParameter("series truncation J must be >= 1".into()));
    }
    let he = domain.shape.half_extent();
    let diam = 2.0 * (he[0] * he[0] + he[1] * he[1] + he[2] * he[2]).sqrt();
    if k.norm() * diam >= 1.0 {
        return Err(NanoheatError::InvalidRegime(format!(
            "series diverges: |k| diam(B) = {} >= 1",
            k.norm() * diam
        )));
    }
    let v = domain.voxel_count();
    let vol = domain.voxel_volume;
    let a = domain.equivalent_radius();
    let pts = &domain.centroids;
    let four_pi = 4.0 * std::f64::consts::PI;
    let mut g = vec![Complex64::new(0.0, 0.0); v * v];
    g.par_chunks_mut(v).enumerate().for_each(|(i, row)| {
        for (j, out) in row.iter_mut().enumerate() {
            // coefficient of (ik)^m is W_m/(4 pi m!) with
            //   W_m = r^(m-1) vol (i != j),  W_m = 4 pi a^(m+2)/(m+2) (i == j)
            let mut coef = Complex64::new(1.0, 0.0); // (ik)^m / m!
            let mut acc = Complex64::new(0.0, 0.0);
            if i == j {
                for m in 0..=truncation + 1 {
                    acc += coef * (a.powi(m as i32 + 2) / (m as f64 + 2.0));
                    coef *= Complex64::i() * k / (m as f64 + 1.0);
                }
            } else {
                let r = dist(pts[i], pts[j]);
                for m in 0..=truncation + 1 {
                    acc += coef * (r.powi(m as i32 - 1) * vol / four_pi);
                    coef *= Complex64::i() * k / (m as f64 + 1.0);
                }
            }
            *out = acc;
        }
    });
    Ok(DenseOperator {
        kind: OperatorKind::Newtonian,
        k,
        domain: domain.clone(),
        storage: Storage::ScalarBlocks(g),
    })
}
