//! Geometric delta-sweeps, log-log slope fits, and convergence reports.

use serde::{Deserialize, Serialize};

use crate::dispersion::{LorentzModel, MediumParams, RegimeKind};
use crate::heat::{
    dominant_heat, heat_potential_oracle, time_integral_j_windowed, HeatCoefficients, HeatSource,
};
use crate::maxwell::SolveOptions;
use crate::pipeline::{run_point, RegimeContext};
use crate::NanoheatError;

/// Scalars a sweep can track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepQuantity {
    /// `||E||_{L2(Omega)}`
    L2E,
    /// `|| |E|^2 ||_{L2(Omega)}`
    L2ESq,
    /// `int_Omega |E|^2`
    EnergyIntegral,
    /// `||Etilde||^2_{L2(B)}` (the a priori scalar)
    ScaledEnergyB,
    /// Dominant closed-form energy
    DominantEnergy,
    /// Dominant heat at the probe, per unit absorption `omega Im(eps_p)`
    HeatDominant,
    /// Quadrature heat oracle at the probe, same normalization
    HeatOracle,
    /// `|1 + sigma lambda|` (plasmonic) or `|1 - w^2 mu sigma d^2 lambda|`
    Detuning,
}

impl SweepQuantity {
    /// Exponent predicted for the quantity in the given regime.
    pub fn predicted_exponent(&self, regime: RegimeKind, h: f64) -> f64 {
        match (self, regime) {
            (SweepQuantity::L2E, RegimeKind::Plasmonic) => 1.5 - h,
            (SweepQuantity::L2E, RegimeKind::Dielectric) => 2.5 - h,
            (SweepQuantity::L2ESq, RegimeKind::Plasmonic) => 1.5 - 2.0 * h,
            (SweepQuantity::L2ESq, RegimeKind::Dielectric) => 2.5 - h,
            (SweepQuantity::EnergyIntegral, RegimeKind::Plasmonic) => 3.0 - 2.0 * h,
            (SweepQuantity::EnergyIntegral, RegimeKind::Dielectric) => 5.0 - 2.0 * h,
            (SweepQuantity::ScaledEnergyB, RegimeKind::Plasmonic) => -2.0 * h,
            (SweepQuantity::ScaledEnergyB, RegimeKind::Dielectric) => 2.0 - 2.0 * h,
            (SweepQuantity::DominantEnergy, RegimeKind::Plasmonic) => 3.0 - 2.0 * h,
            (SweepQuantity::DominantEnergy, RegimeKind::Dielectric) => 5.0 - 2.0 * h,
            (SweepQuantity::HeatDominant, RegimeKind::Plasmonic) => 3.0 - 2.0 * h,
            (SweepQuantity::HeatDominant, RegimeKind::Dielectric) => 5.0 - 2.0 * h,
            (SweepQuantity::HeatOracle, RegimeKind::Plasmonic) => 3.0 - 2.0 * h,
            (SweepQuantity::HeatOracle, RegimeKind::Dielectric) => 5.0 - 2.0 * h,
            (SweepQuantity::Detuning, _) => h,
        }
    }
}

/// Heat-probe parameters used by the heat sweep quantities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HeatProbe {
    pub coefficients: HeatCoefficients,
    pub xi: [f64; 3],
    pub t: f64,
    pub t0: f64,
}

/// A sweep request.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Strictly decreasing geometric grid (count >= 4 for leading fits).
    pub deltas: Vec<f64>,
    pub h: f64,
    pub regime: RegimeKind,
    pub quantity: SweepQuantity,
    pub tolerance: f64,
    pub heat: Option<HeatProbe>,
    pub center: [f64; 3],
    pub polarization: [f64; 3],
    pub direction: [f64; 3],
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), NanoheatError> {
        if self.deltas.len() < 4 {
            return Err(NanoheatError::InvalidParameter(
                "sweep needs at least 4 delta points".into(),
            ));
        }
        if !self.deltas.windows(2).all(|w| w[0] > w[1]) {
            return Err(NanoheatError::InvalidParameter(
                "sweep deltas must be strictly decreasing".into(),
            ));
        }
        Ok(())
    }
}

/// Least-squares log-log fit against a predicted exponent.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub predicted: f64,
    pub pass: bool,
}

/// Fit `log(value) ~ slope log(delta) + intercept`.
pub fn fit_slope(
    points: &[(f64, f64)],
    predicted: f64,
    tolerance: f64,
) -> Result<SlopeFit, NanoheatError> {
    if points.len() < 3 {
        return Err(NanoheatError::InvalidParameter("slope fit needs >= 3 points".into()));
    }
    for (i, (_, v)) in points.iter().enumerate() {
        if !(*v > 0.0) {
            return Err(NanoheatError::NonPositiveValue { index: i, value: *v });
        }
    }
    let xs: Vec<f64> = points.iter().map(|(d, _)| d.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).min(1.0) };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        predicted,
        pass: (slope - predicted).abs() <= tolerance,
    })
}

/// Outcome of a remainder-order fit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RemainderOutcome {
    Fit(SlopeFit),
    /// Discrepancy at or below the quadrature noise floor.
    Inconclusive,
}

/// One-sided slope fit of `|full - dominant|`: passes when the decay is at
/// least as fast as predicted (minus the stated slack).
pub fn remainder_order(
    full: &[f64],
    dominant: &[f64],
    deltas: &[f64],
    predicted: f64,
    slack: f64,
) -> Result<RemainderOutcome, NanoheatError> {
    if full.len() != dominant.len() || full.len() != deltas.len() {
        return Err(NanoheatError::InvalidParameter("remainder arrays must align".into()));
    }
    let mut pts = Vec::with_capacity(full.len());
    for i in 0..full.len() {
        let diff = (full[i] - dominant[i]).abs();
        if diff <= 1e-10 * full[i].abs().max(1e-300) {
            return Ok(RemainderOutcome::Inconclusive);
        }
        pts.push((deltas[i], diff));
    }
    let mut fit = fit_slope(&pts, predicted, f64::INFINITY)?;
    fit.pass = fit.slope >= predicted - slack;
    Ok(RemainderOutcome::Fit(fit))
}

/// Per-point record of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub delta: f64,
    pub value: f64,
    pub omega: f64,
    pub detuning: f64,
    pub energy: f64,
    pub dominant: f64,
    pub residual: f64,
}

/// Full sweep output.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub regime: String,
    pub quantity: SweepQuantity,
    pub h: f64,
    pub resolution: usize,
    pub points: Vec<SweepPoint>,
    pub fit: SlopeFit,
}

/// Evaluate the sweep: the regime is re-selected at every delta from the
/// context's cluster eigenvalue, and the quantity extracted from the solve.
pub fn run_sweep(
    spec: &SweepSpec,
    ctx: &RegimeContext,
    model: &LorentzModel,
    medium: &MediumParams,
    options: &SolveOptions,
) -> Result<SweepReport, NanoheatError> {
    spec.validate()?;
    let mut points = Vec::with_capacity(spec.deltas.len());
    for &delta in &spec.deltas {
        let pr = run_point(
            ctx,
            model,
            medium,
            spec.h,
            delta,
            spec.center,
            spec.polarization,
            spec.direction,
            options,
        )?;
        let value = match spec.quantity {
            SweepQuantity::L2E => pr.norms.l2_omega,
            SweepQuantity::L2ESq => pr.norms.l2_of_square,
            SweepQuantity::EnergyIntegral => pr.solution.energy_integral_omega,
            SweepQuantity::ScaledEnergyB => {
                pr.solution.energy_integral_omega / delta.powi(3)
            }
            SweepQuantity::DominantEnergy => pr.dominant_energy,
            SweepQuantity::Detuning => pr.selection.detuning,
            SweepQuantity::HeatDominant | SweepQuantity::HeatOracle => {
                let probe = spec.heat.as_ref().ok_or_else(|| {
                    NanoheatError::InvalidParameter("heat sweep needs a heat probe".into())
                })?;
                let im_eps = pr.selection.contrast.value.im;
                let omega = pr.selection.omega;
                let raw = match spec.quantity {
                    SweepQuantity::HeatDominant => dominant_heat(
                        pr.dominant_energy,
                        probe.xi,
                        spec.center,
                        probe.t,
                        probe.t0,
                        &probe.coefficients,
                        omega,
                        im_eps,
                    )?,
                    _ => {
                        let src = HeatSource::new(
                            ctx.domain
                                .centroids
                                .iter()
                                .map(|c| {
                                    [
                                        delta * c[0] + spec.center[0],
                                        delta * c[1] + spec.center[1],
                                        delta * c[2] + spec.center[2],
                                    ]
                                })
                                .collect(),
                            pr.solution.field.magnitude_sq(),
                            omega,
                            im_eps,
                            probe.coefficients.gamma_p(delta),
                            probe.t0,
                            delta.powi(3) * ctx.domain.voxel_volume,
                        )?;
                        heat_potential_oracle(
                            &src,
                            probe.xi,
                            probe.t,
                            &probe.coefficients,
                            delta,
                            1e-10,
                        )?
                    }
                };
                // normalize by the absorption factor so the geometric
                // delta-power of the leading term is what gets fitted
                raw / (omega * im_eps)
            }
        };
        points.push(SweepPoint {
            delta,
            value,
            omega: pr.selection.omega,
            detuning: pr.selection.detuning,
            energy: pr.solution.energy_integral_omega,
            dominant: pr.dominant_energy,
            residual: pr.solution.residual,
        });
    }
    let predicted = spec.quantity.predicted_exponent(spec.regime, spec.h);
    let fit = fit_slope(
        &points.iter().map(|p| (p.delta, p.value)).collect::<Vec<_>>(),
        predicted,
        spec.tolerance,
    )?;
    Ok(SweepReport {
        regime: format!("{:?}", spec.regime).to_lowercase(),
        quantity: spec.quantity,
        h: spec.h,
        resolution: ctx.domain.resolution,
        points,
        fit,
    })
}

/// `J(xi, z, t)` consistency helper surfaced for the heat sweeps: the window
/// form the dominant value uses.
pub fn heat_j_factor(probe: &HeatProbe, center: [f64; 3]) -> Result<f64, NanoheatError> {
    time_integral_j_windowed(probe.xi, center, probe.t, probe.t0, probe.coefficients.alpha_m())
}
