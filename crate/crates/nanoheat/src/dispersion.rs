//! Lorentz dispersion model and resonant frequency selection.
//!
//! A single-pole Lorentz medium has relative permittivity
//!
//! ```text
//! eps_p(w) = eps_inf * (1 + w_p^2 / (w0^2 - w^2 - i*zeta*w))
//! ```
//!
//! Depending on where the incidence frequency sits relative to the undamped
//! resonance `w0`, the particle contrast `sigma = eps_p - eps_m` is driven
//! either strongly negative (plasmonic regime, band `(w0, sqrt(w0^2+w_p^2))`)
//! or large positive ~ delta^-2 (dielectric regime, band `(0, w0)`). The
//! selection routines here pin the incidence frequency and damping so that the
//! resonant denominator of the scattering problem is Theta(delta^h).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::NanoheatError;

/// Single-pole Lorentz permittivity parameters (relative units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzModel {
    /// High-frequency permittivity scale `eps_inf`.
    pub eps_inf: f64,
    /// Electric plasma frequency `w_p` (rad/s, dimensionless units).
    pub omega_p: f64,
    /// Undamped resonance frequency `w0`.
    pub omega_0: f64,
    /// Electric damping `zeta >= 0`.
    pub zeta: f64,
}

impl LorentzModel {
    pub fn new(eps_inf: f64, omega_p: f64, omega_0: f64, zeta: f64) -> Result<Self, NanoheatError> {
        if !(eps_inf > 0.0) || !(omega_p > 0.0) || !(omega_0 > 0.0) {
            return Err(NanoheatError::InvalidParameter(
                "Lorentz model requires eps_inf, omega_p, omega_0 > 0".into(),
            ));
        }
        if !(zeta >= 0.0) {
            return Err(NanoheatError::InvalidParameter("damping zeta must be >= 0".into()));
        }
        Ok(Self { eps_inf, omega_p, omega_0, zeta })
    }

    /// Same model with the damping replaced.
    pub fn with_zeta(&self, zeta: f64) -> Self {
        Self { zeta, ..*self }
    }

    /// Relative permittivity `eps_p(w)`.
    ///
    /// Fails with [`NanoheatError::PoleAtResonance`] when `zeta = 0` and
    /// `w = w0` (the undamped pole), where the value is not finite.
    pub fn permittivity(&self, omega: f64) -> Result<Complex64, NanoheatError> {
        let den = Complex64::new(
            self.omega_0 * self.omega_0 - omega * omega,
            -self.zeta * omega,
        );
        if den.norm_sqr() == 0.0 {
            return Err(NanoheatError::PoleAtResonance { omega });
        }
        let val = self.eps_inf * (1.0 + self.omega_p * self.omega_p / den);
        if !val.re.is_finite() || !val.im.is_finite() {
            return Err(NanoheatError::PoleAtResonance { omega });
        }
        Ok(val)
    }

    /// Quality factor `Q = Re(eps_p) / Im(eps_p)`.
    pub fn q_factor(&self, omega: f64) -> Result<f64, NanoheatError> {
        let eps = self.permittivity(omega)?;
        if eps.im == 0.0 {
            return Err(NanoheatError::LosslessMedium { omega });
        }
        Ok(eps.re / eps.im)
    }
}

/// Non-dispersive host medium (relative permittivity/permeability).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    pub eps_m: f64,
    pub mu_m: f64,
}

impl MediumParams {
    pub fn new(eps_m: f64, mu_m: f64) -> Result<Self, NanoheatError> {
        if !(eps_m > 0.0) || !(mu_m > 0.0) {
            return Err(NanoheatError::InvalidParameter("medium requires eps_m, mu_m > 0".into()));
        }
        Ok(Self { eps_m, mu_m })
    }

    /// Background wavenumber `k = w sqrt(eps_m mu_m)`.
    pub fn wavenumber(&self, omega: f64) -> f64 {
        omega * (self.eps_m * self.mu_m).sqrt()
    }
}

/// Which resonance family the incidence frequency targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeKind {
    Plasmonic,
    Dielectric,
}

/// Regime selection inputs: target eigenvalue, detuning exponent, size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeConfig {
    pub kind: RegimeKind,
    /// Index of the targeted mode cluster (0 = strongest-coupled).
    pub mode_index: usize,
    /// Magnetization eigenvalue `lambda^(3)` (plasmonic) or Newtonian
    /// eigenvalue `lambda^(1)` (dielectric) of the targeted cluster.
    pub target_eigenvalue: f64,
    /// Detuning exponent `h` in (0, 2).
    pub h: f64,
    /// Particle size `delta` in (0, 1).
    pub delta: f64,
}

impl RegimeConfig {
    pub fn validate(&self) -> Result<(), NanoheatError> {
        if !(self.h > 0.0 && self.h < 2.0) {
            return Err(NanoheatError::InvalidParameter(format!(
                "detuning exponent h must lie in (0,2), got {}",
                self.h
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(NanoheatError::InvalidParameter(format!(
                "delta must lie in (0,1), got {}",
                self.delta
            )));
        }
        if !(self.target_eigenvalue > 0.0) {
            return Err(NanoheatError::InvalidParameter(
                "target eigenvalue must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Contrast parameter `sigma = eps_p(w) - eps_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contrast {
    pub value: Complex64,
}

/// Outcome of a resonant frequency selection.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ResonanceSelection {
    pub omega: f64,
    /// Damping after adjustment, `zeta_adjusted`.
    pub zeta: f64,
    pub contrast: Contrast,
    /// `|1 + sigma lambda|` (plasmonic) or `|1 - w^2 mu sigma delta^2 lambda|`
    /// (dielectric) at the selected frequency.
    pub detuning: f64,
    pub q_factor: f64,
}

/// Select the plasmonic incidence frequency and damping.
///
/// The undamped frequency solves `eps_p(w) = eps_m - 1/lambda` exactly,
///
/// ```text
/// w^2 = w0^2 - w_p^2 lambda eps_inf / (lambda (eps_m - eps_inf) - 1),
/// ```
///
/// and the damping realizes `zeta w = delta^h`. The correction terms allowed
/// by the regime are set to zero, so the detuning `|1 + sigma lambda|` is
/// Theta(delta^h) by construction.
pub fn select_plasmonic(
    model: &LorentzModel,
    medium: &MediumParams,
    cfg: &RegimeConfig,
) -> Result<ResonanceSelection, NanoheatError> {
    cfg.validate()?;
    if cfg.kind != RegimeKind::Plasmonic {
        return Err(NanoheatError::InvalidParameter(
            "select_plasmonic called with a non-plasmonic regime config".into(),
        ));
    }
    let lam = cfg.target_eigenvalue;
    let den = lam * (medium.eps_m - model.eps_inf) - 1.0;
    if den == 0.0 {
        return Err(NanoheatError::InvalidRegime(
            "plasmonic selection denominator lambda (eps_m - eps_inf) - 1 vanishes".into(),
        ));
    }
    let omega2 =
        model.omega_0 * model.omega_0 - model.omega_p * model.omega_p * lam * model.eps_inf / den;
    if omega2 <= 0.0 {
        return Err(NanoheatError::InvalidRegime(format!(
            "plasmonic selection yields omega^2 = {omega2} <= 0"
        )));
    }
    let omega = omega2.sqrt();
    let zeta = cfg.delta.powf(cfg.h) / omega;
    let tuned = model.with_zeta(zeta);
    let eps_p = tuned.permittivity(omega)?;
    let sigma = eps_p - medium.eps_m;
    if sigma.re >= 0.0 {
        return Err(NanoheatError::InvalidRegime(format!(
            "plasmonic regime violated: Re(sigma) = {} >= 0",
            sigma.re
        )));
    }
    let detuning = (Complex64::new(1.0, 0.0) + sigma * lam).norm();
    Ok(ResonanceSelection {
        omega,
        zeta,
        contrast: Contrast { value: sigma },
        detuning,
        q_factor: tuned.q_factor(omega)?,
    })
}

/// Select the dielectric incidence frequency and damping.
///
/// The frequency sits just below the undamped resonance,
/// `w^2 = w0^2 - delta^2 (lambda mu_m w0^2)`, and the damping realizes
/// `zeta w = delta^(2+h) (lambda mu_m w0^2)`, which places the Lorentz pole at
/// relative distance `delta^h` from the detuning: the resulting
/// `|1 - w^2 mu_m sigma delta^2 lambda|` is Theta(delta^h) when
/// `eps_inf w_p^2 = 1`.
pub fn select_dielectric(
    model: &LorentzModel,
    medium: &MediumParams,
    cfg: &RegimeConfig,
) -> Result<ResonanceSelection, NanoheatError> {
    cfg.validate()?;
    if cfg.kind != RegimeKind::Dielectric {
        return Err(NanoheatError::InvalidParameter(
            "select_dielectric called with a non-dielectric regime config".into(),
        ));
    }
    let lam = cfg.target_eigenvalue;
    let g = lam * medium.mu_m * model.omega_0 * model.omega_0;
    let omega2 = model.omega_0 * model.omega_0 - cfg.delta * cfg.delta * g;
    if omega2 <= 0.0 {
        return Err(NanoheatError::InvalidRegime(format!(
            "delta = {} too large for dielectric eigenvalue {}: omega^2 <= 0",
            cfg.delta, lam
        )));
    }
    let omega = omega2.sqrt();
    let zeta = cfg.delta.powf(2.0 + cfg.h) * g / omega;
    let tuned = model.with_zeta(zeta);
    let eps_p = tuned.permittivity(omega)?;
    let sigma = eps_p - medium.eps_m;
    if sigma.re <= 0.0 {
        return Err(NanoheatError::InvalidRegime(format!(
            "dielectric regime violated: Re(sigma) = {} <= 0",
            sigma.re
        )));
    }
    let detuning =
        (Complex64::new(1.0, 0.0) - omega2 * medium.mu_m * sigma * cfg.delta * cfg.delta * lam)
            .norm();
    Ok(ResonanceSelection {
        omega,
        zeta,
        contrast: Contrast { value: sigma },
        detuning,
        q_factor: tuned.q_factor(omega)?,
    })
}
