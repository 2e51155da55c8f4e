//! Discrete Helmholtz–Hodge decomposition on the voxel grid.
//!
//! The discrete gradient maps voxel scalars to voxel-centered vectors by
//! forward differences (backward at the upper staircase boundary). Two facts
//! are exact by construction and carry the decomposition's structural
//! identities:
//!   * `D` annihilates constants and reproduces constant vectors from linear
//!     scalars, so constant fields land in the gradient family;
//!   * every column of `D` attached to an interior scalar has vanishing sum,
//!     so gradients of interior (Dirichlet) scalars are exactly orthogonal to
//!     constants — eigenfields of the first two subspaces have exactly
//!     vanishing mean integrals.
//!
//! The three projectors come from two Poisson solves per field:
//!   * `P2` projects onto gradients of interior scalars (curl-free, vanishing
//!     tangential trace);
//!   * `Pgrad` projects onto all discrete gradients; `P1 = I - Pgrad` is the
//!     divergence-free family with weak vanishing normal trace, and
//!     `P3 = Pgrad - P2` the gradients of discrete harmonic scalars.

use std::sync::Arc;

use crate::domain::ReferenceDomain;
use crate::linalg::{cg_real, RealSymOp};
use crate::NanoheatError;

/// Forward-difference gradient rows: value = (phi[plus] - phi[minus]) * w.
#[derive(Debug, Clone)]
pub struct GradientOp {
    /// One entry per vector dof (3V rows).
    rows: Vec<Option<(usize, usize, f64)>>,
    pub nscalar: usize,
}

impl GradientOp {
    pub fn build(domain: &ReferenceDomain) -> (Self, Vec<usize>) {
        let v = domain.voxel_count();
        let n = domain.resolution;
        let mut rows = vec![None; 3 * v];
        let mut interior_mask = vec![true; v];
        for (vox, l) in domain.lattice.iter().enumerate() {
            let (i, j, k) = (l[0] as i64, l[1] as i64, l[2] as i64);
            for axis in 0..3 {
                let mut up = [i, j, k];
                let mut dn = [i, j, k];
                let mut up2 = [i, j, k];
                up[axis] += 1;
                dn[axis] -= 1;
                up2[axis] += 2;
                let vp = lookup(domain, n, up);
                let vm = lookup(domain, n, dn);
                let w = 1.0 / domain.spacing[axis];
                rows[3 * vox + axis] = match (vp, vm) {
                    (Some(p), _) => Some((p, vox, w)),
                    (None, Some(m)) => Some((vox, m, w)),
                    (None, None) => None,
                };
                // interior scalars must only be referenced by forward rows so
                // that their gradient columns sum to zero exactly: both
                // neighbors inside, and the upper neighbor's row forward too
                if vp.is_none() || vm.is_none() || lookup(domain, n, up2).is_none() {
                    interior_mask[vox] = false;
                }
            }
        }
        let interior: Vec<usize> =
            (0..v).filter(|&x| interior_mask[x]).collect();
        (Self { rows, nscalar: v }, interior)
    }

    /// `D phi` into a 3V vector array.
    pub fn apply(&self, phi: &[f64], out: &mut [f64]) {
        for (r, row) in self.rows.iter().enumerate() {
            out[r] = match row {
                Some((p, m, w)) => (phi[*p] - phi[*m]) * w,
                None => 0.0,
            };
        }
    }

    /// `D^T u` into a scalar array.
    pub fn apply_transpose(&self, u: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (r, row) in self.rows.iter().enumerate() {
            if let Some((p, m, w)) = row {
                out[*p] += u[r] * w;
                out[*m] -= u[r] * w;
            }
        }
    }
}

fn lookup(domain: &ReferenceDomain, n: usize, c: [i64; 3]) -> Option<usize> {
    if c.iter().any(|&x| x < 0 || x >= n as i64) {
        return None;
    }
    domain.voxel_at(c[0] as usize, c[1] as usize, c[2] as usize)
}

/// `D^T D` restricted to a scalar subset (full set or interior columns).
struct GradLaplacian<'a> {
    grad: &'a GradientOp,
    /// subset -> global scalar index (None = identity subset)
    subset: Option<&'a [usize]>,
    /// scratch sizes
    nvec: usize,
    /// remove the constant null component (full-set Neumann case)
    deflate_const: bool,
}

impl RealSymOp for GradLaplacian<'_> {
    fn dim(&self) -> usize {
        match self.subset {
            Some(s) => s.len(),
            None => self.grad.nscalar,
        }
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let v = self.grad.nscalar;
        let mut phi = vec![0.0; v];
        match self.subset {
            Some(s) => {
                for (loc, &g) in s.iter().enumerate() {
                    phi[g] = x[loc];
                }
            }
            None => phi.copy_from_slice(x),
        }
        let mut u = vec![0.0; self.nvec];
        self.grad.apply(&phi, &mut u);
        let mut lap = vec![0.0; v];
        self.grad.apply_transpose(&u, &mut lap);
        match self.subset {
            Some(s) => {
                for (loc, &g) in s.iter().enumerate() {
                    y[loc] = lap[g];
                }
            }
            None => {
                y.copy_from_slice(&lap);
                if self.deflate_const {
                    let mean = y.iter().sum::<f64>() / v as f64;
                    for yi in y.iter_mut() {
                        *yi -= mean;
                    }
                }
            }
        }
    }
}

/// The three orthogonal subspace projectors.
pub struct SubspaceProjectors {
    pub domain: Arc<ReferenceDomain>,
    grad: GradientOp,
    interior: Vec<usize>,
    cg_tol: f64,
    cg_max_iter: usize,
}

/// Subspace labels following the decomposition order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Subspace {
    /// Divergence-free with vanishing normal trace.
    DivFree0 = 1,
    /// Curl-free with vanishing tangential trace.
    CurlFree0 = 2,
    /// Gradients of harmonic scalars.
    GradHarmonic = 3,
}

impl SubspaceProjectors {
    pub fn build(domain: &Arc<ReferenceDomain>) -> Result<Self, NanoheatError> {
        let (grad, interior) = GradientOp::build(domain);
        if interior.is_empty() {
            return Err(NanoheatError::EmptySubspace { rank: 0 });
        }
        let n = domain.resolution;
        Ok(Self {
            domain: domain.clone(),
            grad,
            interior,
            cg_tol: 1e-12,
            cg_max_iter: 60 * n + 400,
        })
    }

    /// (dim1, dim2, dim3) of the decomposition.
    pub fn ranks(&self) -> (usize, usize, usize) {
        let v = self.domain.voxel_count();
        let dim2 = self.interior.len();
        let dimgrad = v - 1;
        (3 * v - dimgrad, dim2, dimgrad - dim2)
    }

    /// Projection onto gradients of interior scalars.
    pub fn p2(&self, u: &[f64]) -> Vec<f64> {
        let nvec = 3 * self.domain.voxel_count();
        let op = GradLaplacian {
            grad: &self.grad,
            subset: Some(&self.interior),
            nvec,
            deflate_const: false,
        };
        let v = self.grad.nscalar;
        let mut rhs_full = vec![0.0; v];
        self.grad.apply_transpose(u, &mut rhs_full);
        let rhs: Vec<f64> = self.interior.iter().map(|&g| rhs_full[g]).collect();
        let phi_loc = cg_real(&op, &rhs, self.cg_tol, self.cg_max_iter);
        let mut phi = vec![0.0; v];
        for (loc, &g) in self.interior.iter().enumerate() {
            phi[g] = phi_loc[loc];
        }
        let mut out = vec![0.0; nvec];
        self.grad.apply(&phi, &mut out);
        out
    }

    /// Projection onto all discrete gradients.
    pub fn pgrad(&self, u: &[f64]) -> Vec<f64> {
        let nvec = 3 * self.domain.voxel_count();
        let op = GradLaplacian { grad: &self.grad, subset: None, nvec, deflate_const: true };
        let v = self.grad.nscalar;
        let mut rhs = vec![0.0; v];
        self.grad.apply_transpose(u, &mut rhs);
        // compatibility: rhs is orthogonal to constants exactly (D 1 = 0)
        let mean = rhs.iter().sum::<f64>() / v as f64;
        for r in rhs.iter_mut() {
            *r -= mean;
        }
        let phi = cg_real(&op, &rhs, self.cg_tol, self.cg_max_iter);
        let mut out = vec![0.0; nvec];
        self.grad.apply(&phi, &mut out);
        out
    }

    pub fn p1(&self, u: &[f64]) -> Vec<f64> {
        let g = self.pgrad(u);
        u.iter().zip(&g).map(|(a, b)| a - b).collect()
    }

    pub fn p3(&self, u: &[f64]) -> Vec<f64> {
        let g = self.pgrad(u);
        let p2 = self.p2(u);
        g.iter().zip(&p2).map(|(a, b)| a - b).collect()
    }

    pub fn project(&self, which: Subspace, u: &[f64]) -> Vec<f64> {
        match which {
            Subspace::DivFree0 => self.p1(u),
            Subspace::CurlFree0 => self.p2(u),
            Subspace::GradHarmonic => self.p3(u),
        }
    }

    /// Discrete divergence `-D^T u` (used by diagnostics).
    pub fn divergence(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.grad.nscalar];
        self.grad.apply_transpose(u, &mut out);
        for o in out.iter_mut() {
            *o = -*o;
        }
        out
    }
}
