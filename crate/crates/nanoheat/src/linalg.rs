//! Iterative and dense linear algebra used by the operator stack: complex
//! GMRES, real CG, block Lanczos with full reorthogonalization, and faer-backed
//! dense factorizations.

use faer::complex_native::c64;
use faer::prelude::*;
use num_complex::Complex64;

use crate::NanoheatError;

/// A complex linear operator applied matrix-free.
pub trait ComplexOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

/// A real symmetric operator applied matrix-free.
pub trait RealSymOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

pub(crate) fn dot_c(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm_c(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Non-restarted GMRES with optional right preconditioner.
///
/// Solves `A x = b` to relative residual `tol`; returns `(x, relres, iters)`.
/// Deterministic: fixed iteration order, no randomness.
pub fn gmres(
    op: &dyn ComplexOp,
    precond: Option<&dyn ComplexOp>,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<Complex64>, f64, usize), NanoheatError> {
    let n = op.dim();
    assert_eq!(b.len(), n);
    let bnorm = norm_c(b);
    if bnorm == 0.0 {
        return Ok((vec![Complex64::new(0.0, 0.0); n], 0.0, 0));
    }
    let m = max_iter;
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
    let mut h = vec![Complex64::new(0.0, 0.0); (m + 1) * m]; // Hessenberg, row-major (m+1) x m
    let mut cs = vec![Complex64::new(0.0, 0.0); m];
    let mut sn = vec![Complex64::new(0.0, 0.0); m];
    let mut g = vec![Complex64::new(0.0, 0.0); m + 1];
    g[0] = Complex64::new(bnorm, 0.0);
    let mut v0 = b.to_vec();
    for x in &mut v0 {
        *x /= bnorm;
    }
    basis.push(v0);
    let mut relres = 1.0;
    let mut iters = 0;
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..m {
        // w = A (P^-1 v_j)
        let vj = &basis[j];
        let target: &[Complex64] = if let Some(p) = precond {
            p.apply(vj, &mut z);
            &z
        } else {
            vj
        };
        op.apply(target, &mut w);
        // modified Gram-Schmidt
        for (i, vi) in basis.iter().enumerate() {
            let hij = dot_c(vi, &w);
            h[i * m + j] = hij;
            for (wk, vk) in w.iter_mut().zip(vi) {
                *wk -= hij * vk;
            }
        }
        let hn = norm_c(&w);
        h[(j + 1) * m + j] = Complex64::new(hn, 0.0);
        // apply stored Givens rotations to column j
        for i in 0..j {
            let t = cs[i] * h[i * m + j] + sn[i] * h[(i + 1) * m + j];
            h[(i + 1) * m + j] = -sn[i].conj() * h[i * m + j] + cs[i].conj() * h[(i + 1) * m + j];
            h[i * m + j] = t;
        }
        // new rotation to zero h[j+1, j]
        let (a, bb) = (h[j * m + j], h[(j + 1) * m + j]);
        let denom = (a.norm_sqr() + bb.norm_sqr()).sqrt();
        if denom > 0.0 {
            cs[j] = Complex64::new(a.norm() / denom, 0.0);
            let phase = if a.norm() > 0.0 { a / a.norm() } else { Complex64::new(1.0, 0.0) };
            sn[j] = phase * bb.conj() / denom;
            h[j * m + j] = phase * denom;
            h[(j + 1) * m + j] = Complex64::new(0.0, 0.0);
            let t = cs[j] * g[j];
            g[j + 1] = -sn[j].conj() * g[j];
            g[j] = t;
        }
        iters = j + 1;
        relres = g[j + 1].norm() / bnorm;
        if relres <= tol || hn == 0.0 {
            break;
        }
        let mut vnext = w.clone();
        for x in &mut vnext {
            *x /= hn;
        }
        basis.push(vnext);
    }
    // back-substitution for y in H y = g
    let k = iters;
    let mut y = vec![Complex64::new(0.0, 0.0); k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for l in (i + 1)..k {
            s -= h[i * m + l] * y[l];
        }
        if h[i * m + i].norm() == 0.0 {
            return Err(NanoheatError::SolveFailure("GMRES Hessenberg breakdown".into()));
        }
        y[i] = s / h[i * m + i];
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for (l, yl) in y.iter().enumerate() {
        for (xi, vi) in x.iter_mut().zip(&basis[l]) {
            *xi += yl * vi;
        }
    }
    if let Some(p) = precond {
        let mut px = vec![Complex64::new(0.0, 0.0); n];
        p.apply(&x, &mut px);
        x = px;
    }
    Ok((x, relres, iters))
}

/// Conjugate gradients for SPD real operators. Returns the solution; iterates
/// to `tol` relative residual or `max_iter`.
pub fn cg_real(op: &dyn RealSymOp, b: &[f64], tol: f64, max_iter: usize) -> Vec<f64> {
    let n = op.dim();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let bnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return x;
    }
    let mut rs = bnorm * bnorm;
    for _ in 0..max_iter {
        op.apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rs / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new: f64 = r.iter().map(|v| v * v).sum();
        if rs_new.sqrt() <= tol * bnorm {
            break;
        }
        let beta = rs_new / rs;
        rs = rs_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    x
}

/// Ritz pairs of a real symmetric operator.
#[derive(Debug, Clone)]
pub struct RitzPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// Krylov decomposition from block Lanczos: orthonormal basis, the projected
/// matrix, and the eigensolve of the latter. Ritz vectors are materialized on
/// demand so large sweeps only pay for the modes they keep.
pub struct LanczosDecomposition {
    basis: Vec<Vec<f64>>,
    /// Fully processed dimension (basis vectors with operator columns).
    pub kdim: usize,
    /// Row-major projected matrix of size kdim (plus coupling rows of the
    /// pending frontier used for residual estimates).
    t: Vec<f64>,
    t_dim: usize,
    pending: Vec<usize>,
    /// Ritz values ascending and the projected eigenvectors (column-major).
    pub values: Vec<f64>,
    coords: Vec<f64>,
}

impl LanczosDecomposition {
    /// Residual estimate of Ritz pair `m` from the pending subdiagonal block.
    pub fn residual_estimate(&self, m: usize) -> f64 {
        let mut r2 = 0.0;
        for &p in &self.pending {
            let mut s = 0.0;
            for j in 0..self.kdim {
                let tpj = self.t[p * self.t_dim + j];
                if tpj != 0.0 {
                    s += tpj * self.coords[m * self.kdim + j];
                }
            }
            r2 += s * s;
        }
        r2.sqrt()
    }

    /// Linear functional of the Ritz vector without materializing it:
    /// `f(v_m) = sum_j coords[j, m] f(q_j)` for precomputed `f(q_j)`.
    pub fn functional(&self, m: usize, basis_values: &[f64]) -> f64 {
        let mut s = 0.0;
        for j in 0..self.kdim {
            s += self.coords[m * self.kdim + j] * basis_values[j];
        }
        s
    }

    /// Evaluate a functional on every basis vector.
    pub fn basis_functional(&self, f: &mut dyn FnMut(&[f64]) -> f64) -> Vec<f64> {
        self.basis.iter().take(self.kdim).map(|q| f(q)).collect()
    }

    /// Materialize the Ritz vector for mode `m` (unit l2 norm).
    pub fn materialize(&self, m: usize) -> Vec<f64> {
        let n = self.basis[0].len();
        let mut v = vec![0.0; n];
        for j in 0..self.kdim {
            let w = self.coords[m * self.kdim + j];
            if w != 0.0 {
                for (vi, qi) in v.iter_mut().zip(&self.basis[j]) {
                    *vi += w * qi;
                }
            }
        }
        v
    }
}

/// Block Lanczos with full reorthogonalization, started from the given block.
pub fn lanczos_decomposition(
    op: &dyn RealSymOp,
    start: &[Vec<f64>],
    max_steps: usize,
) -> Result<LanczosDecomposition, NanoheatError> {
    let n = op.dim();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for s in start {
        let mut v = s.clone();
        for q in &basis {
            let d: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= d * qi;
            }
        }
        let nn = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nn > 1e-12 {
            for vi in &mut v {
                *vi /= nn;
            }
            basis.push(v);
        }
    }
    if basis.is_empty() {
        return Err(NanoheatError::EigenFailure("Lanczos start block is degenerate".into()));
    }
    let block = basis.len();
    let mut frontier: Vec<usize> = (0..block).collect();
    let max_dim = (block * (max_steps + 1)).min(n);
    let t_dim = max_dim;
    let mut t = vec![0.0f64; max_dim * max_dim];
    let mut y = vec![0.0; n];
    let mut step = 0;
    let mut pending: Vec<usize> = Vec::new();
    while basis.len() < max_dim && step < max_steps {
        let mut next_frontier = Vec::new();
        for &idx in &frontier {
            let q = basis[idx].clone();
            op.apply(&q, &mut y);
            for pass in 0..2 {
                for (i, qi) in basis.iter().enumerate() {
                    let d: f64 = qi.iter().zip(&y).map(|(a, b)| a * b).sum();
                    if pass == 0 {
                        t[i * t_dim + idx] = d;
                        t[idx * t_dim + i] = d;
                    }
                    for (yk, qk) in y.iter_mut().zip(qi) {
                        *yk -= d * qk;
                    }
                }
            }
            let nn = y.iter().map(|a| a * a).sum::<f64>().sqrt();
            if nn > 1e-10 && basis.len() < max_dim {
                let newidx = basis.len();
                t[newidx * t_dim + idx] = nn;
                t[idx * t_dim + newidx] = nn;
                let mut v = y.clone();
                for vi in &mut v {
                    *vi /= nn;
                }
                basis.push(v);
                next_frontier.push(newidx);
            }
        }
        if next_frontier.is_empty() {
            pending = Vec::new();
            break;
        }
        frontier = next_frontier;
        pending = frontier.clone();
        step += 1;
    }
    let kdim = basis.len() - pending.len();
    let tm = Mat::<f64>::from_fn(kdim, kdim, |i, j| t[i * t_dim + j]);
    let evd = tm.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = evd.s();
    let u = evd.u();
    let values: Vec<f64> = (0..kdim).map(|i| s.column_vector().read(i)).collect();
    let mut coords = vec![0.0; kdim * kdim];
    for m in 0..kdim {
        for j in 0..kdim {
            coords[m * kdim + j] = u.read(j, m);
        }
    }
    Ok(LanczosDecomposition { basis, kdim, t, t_dim, pending, values, coords })
}

/// Convenience wrapper keeping the original materialized-pairs interface for
/// small problems: pairs with residual estimate at or below `residual_tol`,
/// sorted by descending eigenvalue.
pub fn block_lanczos(
    op: &dyn RealSymOp,
    start: &[Vec<f64>],
    max_steps: usize,
    residual_tol: f64,
) -> Result<Vec<RitzPair>, NanoheatError> {
    let dec = lanczos_decomposition(op, start, max_steps)?;
    let mut pairs = Vec::new();
    for m in 0..dec.kdim {
        let res = dec.residual_estimate(m);
        if res <= residual_tol {
            pairs.push(RitzPair { value: dec.values[m], vector: dec.materialize(m), residual: res });
        }
    }
    pairs.sort_by(|a, b| b.value.total_cmp(&a.value));
    Ok(pairs)
}

/// Dense complex solve via partial-pivot LU. `a` is row-major `n x n`;
/// solves for each right-hand side column in `rhs` (length `n` each).
pub fn dense_solve_complex(
    a: &[Complex64],
    n: usize,
    rhs: &[Vec<Complex64>],
) -> Result<Vec<Vec<Complex64>>, NanoheatError> {
    let mat = Mat::<c64>::from_fn(n, n, |i, j| {
        let v = a[i * n + j];
        c64::new(v.re, v.im)
    });
    let lu = mat.partial_piv_lu();
    let mut out = Vec::with_capacity(rhs.len());
    for b in rhs {
        let bm = Mat::<c64>::from_fn(n, 1, |i, _| c64::new(b[i].re, b[i].im));
        let x = lu.solve(&bm);
        let mut xv = Vec::with_capacity(n);
        for i in 0..n {
            let v = x.read(i, 0);
            xv.push(Complex64::new(v.re, v.im));
        }
        out.push(xv);
    }
    Ok(out)
}

/// Dense eigendecomposition of a real symmetric matrix (row-major), returning
/// (eigenvalues ascending, eigenvectors as columns in a row-major matrix).
pub fn eigh_real(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>), NanoheatError> {
    let mat = Mat::<f64>::from_fn(n, n, |i, j| a[i * n + j]);
    let evd = mat.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = evd.s();
    let u = evd.u();
    let vals: Vec<f64> = (0..n).map(|i| s.column_vector().read(i)).collect();
    let mut vecs = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            vecs[i * n + j] = u.read(i, j);
        }
    }
    Ok((vals, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct DenseC {
        n: usize,
        a: Vec<Complex64>,
    }
    impl ComplexOp for DenseC {
        fn dim(&self) -> usize {
            self.n
        }
        fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
            for i in 0..self.n {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..self.n {
                    s += self.a[i * self.n + j] * x[j];
                }
                y[i] = s;
            }
        }
    }

    #[test]
    fn gmres_solves_complex_system() {
        let n = 40;
        let mut a = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = Complex64::new(
                    if i == j { 3.0 + i as f64 * 0.05 } else { 0.3 / (1.0 + (i as f64 - j as f64).abs()) },
                    if i == j { 0.5 } else { 0.01 },
                );
            }
        }
        let op = DenseC { n, a: a.clone() };
        let b: Vec<Complex64> =
            (0..n).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let (x, relres, _) = gmres(&op, None, &b, 1e-12, 200).unwrap();
        assert!(relres <= 1e-12);
        let mut ax = vec![Complex64::new(0.0, 0.0); n];
        op.apply(&x, &mut ax);
        let err: f64 = ax.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        assert!(err / norm_c(&b) <= 1e-11);
    }

    struct Diag(Vec<f64>);
    impl RealSymOp for Diag {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..x.len() {
                y[i] = self.0[i] * x[i];
            }
        }
    }

    #[test]
    fn cg_solves_spd() {
        let d: Vec<f64> = (1..=50).map(|i| i as f64).collect();
        let op = Diag(d.clone());
        let b: Vec<f64> = (0..50).map(|i| (i as f64).cos()).collect();
        let x = cg_real(&op, &b, 1e-13, 500);
        for i in 0..50 {
            assert_relative_eq!(x[i], b[i] / d[i], max_relative = 1e-10);
        }
    }

    #[test]
    fn lanczos_finds_coupled_spectrum() {
        // diagonal operator: start vector couples to a subset of eigenvalues
        let n = 60;
        let d: Vec<f64> = (0..n).map(|i| 0.01 * i as f64).collect();
        let op = Diag(d.clone());
        let mut s = vec![0.0; n];
        s[10] = 1.0;
        s[20] = 0.5;
        s[55] = 0.25;
        let pairs = block_lanczos(&op, &[s], 30, 1e-9).unwrap();
        let found: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        for target in [0.1, 0.2, 0.55] {
            assert!(
                found.iter().any(|v| (v - target).abs() < 1e-9),
                "eigenvalue {target} not found in {found:?}"
            );
        }
    }

    #[test]
    fn dense_complex_solve_roundtrip() {
        let n = 12;
        let mut a = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] =
                    Complex64::new((i * j % 5) as f64 * 0.1, (i + j) as f64 * 0.05);
            }
            a[i * n + i] += Complex64::new(4.0, 1.0);
        }
        let b: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + i as f64, -0.5)).collect();
        let x = dense_solve_complex(&a, n, &[b.clone()]).unwrap();
        let op = DenseC { n, a };
        let mut ax = vec![Complex64::new(0.0, 0.0); n];
        op.apply(&x[0], &mut ax);
        for i in 0..n {
            assert!((ax[i] - b[i]).norm() <= 1e-10);
        }
    }

    #[test]
    fn eigh_real_on_known_matrix() {
        // 2x2: [[2,1],[1,2]] -> eigenvalues 1, 3
        let a = vec![2.0, 1.0, 1.0, 2.0];
        let (vals, _) = eigh_real(&a, 2).unwrap();
        assert_relative_eq!(vals[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(vals[1], 3.0, max_relative = 1e-12);
    }
}
