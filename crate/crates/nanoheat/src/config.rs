//! Run configuration: a flat-sectioned TOML file plus CLI overrides.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::dispersion::{LorentzModel, MediumParams, RegimeKind};
use crate::domain::Shape;
use crate::heat::HeatCoefficients;
use crate::maxwell::SolveMethod;
use crate::NanoheatError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LorentzSection {
    pub eps_inf: f64,
    pub omega_p: f64,
    pub omega_0: f64,
    #[serde(default)]
    pub zeta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MediumSection {
    pub eps_m: f64,
    pub mu_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegimeSection {
    pub kind: RegimeKind,
    #[serde(default)]
    pub mode_index: usize,
    /// Optional override; otherwise the computed cluster eigenvalue is used.
    pub target_eigenvalue: Option<f64>,
    pub h: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSection {
    /// ball | cube | ellipsoid
    pub shape: String,
    #[serde(default)]
    pub semi_axes: Option<[f64; 3]>,
    pub resolution: usize,
}

impl DomainSection {
    pub fn shape(&self) -> Result<Shape, NanoheatError> {
        match self.shape.as_str() {
            "ball" => Ok(Shape::Ball),
            "cube" => Ok(Shape::Cube),
            "ellipsoid" => {
                let a = self.semi_axes.ok_or_else(|| {
                    NanoheatError::Config("ellipsoid shape needs semi_axes = [a, b, c]".into())
                })?;
                Ok(Shape::Ellipsoid { a: a[0], b: a[1], c: a[2] })
            }
            other => Err(NanoheatError::Config(format!("unknown shape '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveSection {
    pub polarization: [f64; 3],
    pub direction: [f64; 3],
}

impl Default for WaveSection {
    fn default() -> Self {
        Self { polarization: [1.0, 0.0, 0.0], direction: [0.0, 0.0, 1.0] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeatSection {
    pub rho_p: f64,
    pub c_p: f64,
    pub gamma_p_bar: f64,
    pub rho_m: f64,
    pub c_m: f64,
    pub gamma_m: f64,
    pub xi: [f64; 3],
    pub t: f64,
    pub t0: f64,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default)]
    pub p: f64,
}

fn default_r() -> f64 {
    0.25
}

impl HeatSection {
    pub fn coefficients(&self) -> Result<HeatCoefficients, NanoheatError> {
        HeatCoefficients::new(self.rho_p, self.c_p, self.gamma_p_bar, self.rho_m, self.c_m, self.gamma_m)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSection {
    /// Largest delta of the geometric grid.
    pub delta_max: f64,
    /// Grid ratio (> 1 means each next delta is delta/ratio).
    pub ratio: f64,
    pub count: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    0.15
}

impl SweepSection {
    pub fn deltas(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.delta_max / self.ratio.powi(i as i32)).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSection {
    #[serde(default = "default_method")]
    pub method: SolveMethod,
    #[serde(default = "default_dense_threshold")]
    pub dense_threshold: usize,
    #[serde(default = "default_gmres_tol")]
    pub gmres_tol: f64,
    #[serde(default = "default_gmres_iter")]
    pub gmres_max_iter: usize,
    #[serde(default = "default_true")]
    pub restoration: bool,
    #[serde(default = "default_lanczos")]
    pub lanczos_steps: usize,
    #[serde(default = "default_window")]
    pub magnetization_window: f64,
    #[serde(default = "default_nwindow")]
    pub newtonian_window_rel: f64,
}

fn default_method() -> SolveMethod {
    SolveMethod::Auto
}
fn default_dense_threshold() -> usize {
    5200
}
fn default_gmres_tol() -> f64 {
    1e-11
}
fn default_gmres_iter() -> usize {
    400
}
fn default_true() -> bool {
    true
}
fn default_lanczos() -> usize {
    160
}
fn default_window() -> f64 {
    0.05
}
fn default_nwindow() -> f64 {
    0.25
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            method: default_method(),
            dense_threshold: default_dense_threshold(),
            gmres_tol: default_gmres_tol(),
            gmres_max_iter: default_gmres_iter(),
            restoration: default_true(),
            lanczos_steps: default_lanczos(),
            magnetization_window: default_window(),
            newtonian_window_rel: default_nwindow(),
        }
    }
}

/// Aggregate run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub lorentz: LorentzSection,
    pub medium: MediumSection,
    pub regime: RegimeSection,
    pub domain: DomainSection,
    #[serde(default)]
    pub wave: WaveSection,
    pub heat: Option<HeatSection>,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub center: [f64; 3],
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default = "default_cache")]
    pub cache_dir: PathBuf,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_cache() -> PathBuf {
    PathBuf::from("cache")
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, NanoheatError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| NanoheatError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            toml::from_str(&text).map_err(|e| NanoheatError::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), NanoheatError> {
        self.model()?;
        self.medium_params()?;
        self.domain.shape()?;
        if self.domain.resolution < 4 {
            return Err(NanoheatError::Config("resolution must be >= 4".into()));
        }
        if !(self.regime.h > 0.0 && self.regime.h < 2.0) {
            return Err(NanoheatError::Config("regime.h must lie in (0, 2)".into()));
        }
        if !(self.regime.delta > 0.0 && self.regime.delta < 1.0) {
            return Err(NanoheatError::Config("regime.delta must lie in (0, 1)".into()));
        }
        if let Some(h) = &self.heat {
            h.coefficients()?;
            if !(h.r < 0.5) {
                return Err(NanoheatError::Config("heat.r must satisfy r < 1/2".into()));
            }
        }
        if let Some(s) = &self.sweep {
            if s.count < 4 || s.ratio <= 1.0 || !(s.delta_max > 0.0 && s.delta_max < 1.0) {
                return Err(NanoheatError::Config(
                    "sweep needs count >= 4, ratio > 1, delta_max in (0,1)".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<LorentzModel, NanoheatError> {
        LorentzModel::new(
            self.lorentz.eps_inf,
            self.lorentz.omega_p,
            self.lorentz.omega_0,
            self.lorentz.zeta,
        )
    }

    pub fn medium_params(&self) -> Result<MediumParams, NanoheatError> {
        MediumParams::new(self.medium.eps_m, self.medium.mu_m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[lorentz]
eps_inf = 1.0
omega_p = 1.7320508075688772
omega_0 = 1.0

[medium]
eps_m = 1.0
mu_m = 1.0

[regime]
kind = "plasmonic"
h = 1.0
delta = 0.05

[domain]
shape = "ball"
resolution = 8

[sweep]
delta_max = 0.1
ratio = 2.0
count = 4
"#;

    #[test]
    fn parse_and_validate() {
        let cfg: RunConfig = toml::from_str(SAMPLE).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.domain.resolution, 8);
        assert_eq!(cfg.sweep.as_ref().unwrap().deltas(), vec![0.1, 0.05, 0.025, 0.0125]);
        assert!(cfg.solver.restoration);
    }

    #[test]
    fn bad_h_rejected() {
        let text = SAMPLE.replace("h = 1.0", "h = 2.5");
        let cfg: RunConfig = toml::from_str(&text).unwrap();
        assert!(cfg.validate().is_err());
    }
}
