//! Regime orchestration: cluster extraction, frequency selection, and the
//! per-size solve used by sweeps, the CLI, and the validation suite.

use num_complex::Complex64;
use std::sync::Arc;

use crate::dispersion::{
    select_dielectric, select_plasmonic, LorentzModel, MediumParams, RegimeConfig, RegimeKind,
    ResonanceSelection,
};
use crate::domain::{Particle, ReferenceDomain};
use crate::linalg::RealSymOp;
use crate::maxwell::{
    dominant_energy_dielectric, dominant_energy_plasmonic, norm_diagnostics, solve,
    ClusterRestoration, FieldSolution, IncidentWave, NormDiagnostics, ScatteringProblem,
    SolveOptions,
};
use crate::operators::eigen::{coupled_cluster, CouplingKind, LowRankUpdate, ResonantCluster};
use crate::operators::fft::LatticeKernels;
use crate::operators::projectors::{Subspace, SubspaceProjectors};
use crate::operators::{eigen::LatticeRealOp, OperatorKind};
use crate::NanoheatError;

/// Lanczos/cluster extraction knobs.
#[derive(Debug, Clone, Copy)]
pub struct ClusterOptions {
    /// Absolute half-width of the magnetization grouping window.
    pub magnetization_window: f64,
    /// Relative half-width of the Newtonian grouping window.
    pub newtonian_window_rel: f64,
    pub lanczos_steps: usize,
    pub ritz_tol: f64,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self {
            magnetization_window: 0.05,
            newtonian_window_rel: 0.25,
            lanczos_steps: 160,
            ritz_tol: 1e-8,
        }
    }
}

/// Everything needed to run resonant solves on one (shape, resolution).
pub struct RegimeContext {
    pub kind: RegimeKind,
    pub domain: Arc<ReferenceDomain>,
    pub cluster: ResonantCluster,
    /// Rank corrections restoring the continuum cluster structure.
    m_update: LowRankUpdate,
    n_update: LowRankUpdate,
    /// Unit-l2 cluster vectors for solver deflation.
    deflation_vectors: Vec<Vec<f64>>,
    pub restoration_enabled: bool,
}

impl RegimeContext {
    /// Extract the plasmonic (magnetization) resonant cluster and its
    /// degeneracy-restoring collapse.
    pub fn plasmonic(
        domain: &Arc<ReferenceDomain>,
        opts: &ClusterOptions,
        restoration: bool,
    ) -> Result<Self, NanoheatError> {
        let kernels = LatticeKernels::build(domain, Complex64::new(0.0, 0.0));
        let op = LatticeRealOp { kernels: &kernels, kind: OperatorKind::Magnetization };
        let v = domain.voxel_count();
        let mut starts = Vec::new();
        for a in 0..3 {
            let mut s = vec![0.0; 3 * v];
            for i in 0..v {
                s[3 * i + a] = 1.0;
            }
            starts.push(s);
        }
        let cluster = coupled_cluster(
            &op,
            domain,
            &starts,
            CouplingKind::Mean,
            opts.magnetization_window,
            opts.lanczos_steps,
            opts.ritz_tol,
        )?;
        let vol = domain.voxel_volume;
        let m_update = if restoration {
            LowRankUpdate::collapse(&cluster, vol)
        } else {
            LowRankUpdate::default()
        };
        let deflation_vectors =
            cluster.fields.iter().map(|f| f.iter().map(|x| x * vol.sqrt()).collect()).collect();
        Ok(Self {
            kind: RegimeKind::Plasmonic,
            domain: domain.clone(),
            cluster,
            m_update,
            n_update: LowRankUpdate::default(),
            deflation_vectors,
            restoration_enabled: restoration,
        })
    }

    /// Extract the dielectric (Newtonian, divergence-free) resonant cluster;
    /// restoration collapses the cluster eigenvalues and annihilates the
    /// magnetization residual on its span.
    pub fn dielectric(
        domain: &Arc<ReferenceDomain>,
        projectors: &SubspaceProjectors,
        opts: &ClusterOptions,
        restoration: bool,
    ) -> Result<Self, NanoheatError> {
        let kernels = LatticeKernels::build(domain, Complex64::new(0.0, 0.0));
        let n_op = LatticeRealOp { kernels: &kernels, kind: OperatorKind::Newtonian };
        let proj_op = crate::operators::eigen::ProjectedOp {
            inner: &n_op,
            projectors,
            subspace: Subspace::DivFree0,
        };
        let v = domain.voxel_count();
        // rotational starts e_c x r, projected onto the divergence-free family
        let mut starts = Vec::new();
        for axis in 0..3 {
            let mut s = vec![0.0; 3 * v];
            for (i, c) in domain.centroids.iter().enumerate() {
                let e = unit(axis);
                s[3 * i] = e[1] * c[2] - e[2] * c[1];
                s[3 * i + 1] = e[2] * c[0] - e[0] * c[2];
                s[3 * i + 2] = e[0] * c[1] - e[1] * c[0];
            }
            starts.push(projectors.p1(&s));
        }
        // provisional window from a cheap pass: use relative width around the
        // strongest rotationally coupled Ritz value
        let probe = coupled_cluster(
            &proj_op,
            domain,
            &starts,
            CouplingKind::RotationalMoment,
            f64::INFINITY,
            12,
            1e30,
        )?;
        let window = opts.newtonian_window_rel * probe.lambda_bar.abs();
        let cluster = coupled_cluster(
            &proj_op,
            domain,
            &starts,
            CouplingKind::RotationalMoment,
            window,
            opts.lanczos_steps,
            opts.ritz_tol,
        )?;
        let vol = domain.voxel_volume;
        let (m_update, n_update) = if restoration {
            // images M u_r through the magnetization kernels
            let m_op = LatticeRealOp { kernels: &kernels, kind: OperatorKind::Magnetization };
            let m_images: Vec<Vec<f64>> = cluster
                .fields
                .iter()
                .map(|f| {
                    let u: Vec<f64> = f.iter().map(|x| x * vol.sqrt()).collect();
                    let mut y = vec![0.0; u.len()];
                    m_op.apply(&u, &mut y);
                    y
                })
                .collect();
            (
                LowRankUpdate::annihilate(&cluster, &m_images, vol),
                LowRankUpdate::collapse(&cluster, vol),
            )
        } else {
            (LowRankUpdate::default(), LowRankUpdate::default())
        };
        let deflation_vectors =
            cluster.fields.iter().map(|f| f.iter().map(|x| x * vol.sqrt()).collect()).collect();
        Ok(Self {
            kind: RegimeKind::Dielectric,
            domain: domain.clone(),
            cluster,
            m_update,
            n_update,
            deflation_vectors,
            restoration_enabled: restoration,
        })
    }

    /// Rebuild a context from a cached cluster (recomputes the rank updates).
    pub fn from_cluster(
        kind: RegimeKind,
        domain: &Arc<ReferenceDomain>,
        cluster: ResonantCluster,
        restoration: bool,
    ) -> Result<Self, NanoheatError> {
        let vol = domain.voxel_volume;
        let deflation_vectors: Vec<Vec<f64>> =
            cluster.fields.iter().map(|f| f.iter().map(|x| x * vol.sqrt()).collect()).collect();
        let (m_update, n_update) = if !restoration {
            (LowRankUpdate::default(), LowRankUpdate::default())
        } else {
            match kind {
                RegimeKind::Plasmonic => {
                    (LowRankUpdate::collapse(&cluster, vol), LowRankUpdate::default())
                }
                RegimeKind::Dielectric => {
                    let kernels = LatticeKernels::build(domain, Complex64::new(0.0, 0.0));
                    let m_op =
                        LatticeRealOp { kernels: &kernels, kind: OperatorKind::Magnetization };
                    let m_images: Vec<Vec<f64>> = cluster
                        .fields
                        .iter()
                        .map(|f| {
                            let u: Vec<f64> = f.iter().map(|x| x * vol.sqrt()).collect();
                            let mut y = vec![0.0; u.len()];
                            m_op.apply(&u, &mut y);
                            y
                        })
                        .collect();
                    (
                        LowRankUpdate::annihilate(&cluster, &m_images, vol),
                        LowRankUpdate::collapse(&cluster, vol),
                    )
                }
            }
        };
        Ok(Self {
            kind,
            domain: domain.clone(),
            cluster,
            m_update,
            n_update,
            deflation_vectors,
            restoration_enabled: restoration,
        })
    }

    /// Frequency/damping selection tuned to this context's cluster.
    pub fn select(
        &self,
        model: &LorentzModel,
        medium: &MediumParams,
        h: f64,
        delta: f64,
    ) -> Result<ResonanceSelection, NanoheatError> {
        let cfg = RegimeConfig {
            kind: self.kind,
            mode_index: 0,
            target_eigenvalue: self.cluster.lambda_bar,
            h,
            delta,
        };
        match self.kind {
            RegimeKind::Plasmonic => select_plasmonic(model, medium, &cfg),
            RegimeKind::Dielectric => select_dielectric(model, medium, &cfg),
        }
    }

    /// Restoration payload for one solve at the given selection.
    pub fn restoration(
        &self,
        selection: &ResonanceSelection,
        delta: f64,
        medium: &MediumParams,
    ) -> ClusterRestoration {
        let sigma = selection.contrast.value;
        let denom = match self.kind {
            RegimeKind::Plasmonic => Complex64::new(1.0, 0.0) + sigma * self.cluster.lambda_bar,
            RegimeKind::Dielectric => {
                let c = sigma
                    * (selection.omega * selection.omega * medium.mu_m * delta * delta);
                Complex64::new(1.0, 0.0) - c * self.cluster.lambda_bar
            }
        };
        let deflation = self.deflation_vectors.iter().map(|u| (u.clone(), denom)).collect();
        ClusterRestoration {
            m_update: self.m_update.clone(),
            n_update: self.n_update.clone(),
            deflation,
        }
    }
}

fn unit(axis: usize) -> [f64; 3] {
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    e
}

/// One fully evaluated sweep point.
pub struct PointResult {
    pub delta: f64,
    pub selection: ResonanceSelection,
    pub solution: FieldSolution,
    pub dominant_energy: f64,
    pub norms: NormDiagnostics,
}

/// Select, solve, and evaluate the dominant term at one particle size.
#[allow(clippy::too_many_arguments)]
pub fn run_point(
    ctx: &RegimeContext,
    model: &LorentzModel,
    medium: &MediumParams,
    h: f64,
    delta: f64,
    center: [f64; 3],
    pol: [f64; 3],
    dir: [f64; 3],
    options: &SolveOptions,
) -> Result<PointResult, NanoheatError> {
    let selection = ctx.select(model, medium, h, delta)?;
    let wave = IncidentWave::new(pol, dir, selection.omega)?;
    let problem = ScatteringProblem {
        domain: ctx.domain.clone(),
        particle: Particle::new(delta, center)?,
        wave,
        contrast: selection.contrast,
        medium: *medium,
    };
    let restoration = ctx.restoration(&selection, delta, medium);
    let restoration_ref =
        if ctx.restoration_enabled { Some(&restoration) } else { None };
    let solution = solve(&problem, restoration_ref, options)?;
    let dominant_energy = match ctx.kind {
        RegimeKind::Plasmonic => dominant_energy_plasmonic(&problem, &ctx.cluster)?,
        RegimeKind::Dielectric => dominant_energy_dielectric(&problem, &ctx.cluster)?,
    };
    let norms = norm_diagnostics(&solution, delta);
    Ok(PointResult { delta, selection, solution, dominant_energy, norms })
}
