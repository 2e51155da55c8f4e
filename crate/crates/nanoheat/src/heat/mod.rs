//! Heat kernel, the J time integral, dominant heat formulas, and the
//! space-time quadrature oracle for the body-source Newtonian heat potential.

pub mod special;

use serde::{Deserialize, Serialize};

use crate::NanoheatError;
use special::{adaptive_simpson, erfc};

/// Thermal coefficients of particle and background.
///
/// The particle conductivity scales as `gamma_p = gamma_p_bar / delta^2`, so
/// the interior diffusivity parameter `alpha_p = rho_p c_p / gamma_p` carries
/// a factor `delta^2`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HeatCoefficients {
    pub rho_p: f64,
    pub c_p: f64,
    pub gamma_p_bar: f64,
    pub rho_m: f64,
    pub c_m: f64,
    pub gamma_m: f64,
}

impl HeatCoefficients {
    pub fn new(
        rho_p: f64,
        c_p: f64,
        gamma_p_bar: f64,
        rho_m: f64,
        c_m: f64,
        gamma_m: f64,
    ) -> Result<Self, NanoheatError> {
        for (name, v) in [
            ("rho_p", rho_p),
            ("c_p", c_p),
            ("gamma_p_bar", gamma_p_bar),
            ("rho_m", rho_m),
            ("c_m", c_m),
            ("gamma_m", gamma_m),
        ] {
            if !(v > 0.0) {
                return Err(NanoheatError::InvalidParameter(format!(
                    "heat coefficient {name} must be positive, got {v}"
                )));
            }
        }
        if gamma_m >= (gamma_p_bar * rho_p * c_p).sqrt() {
            return Err(NanoheatError::InvalidParameter(format!(
                "requires gamma_m < sqrt(gamma_p_bar rho_p c_p): {gamma_m} vs {}",
                (gamma_p_bar * rho_p * c_p).sqrt()
            )));
        }
        Ok(Self { rho_p, c_p, gamma_p_bar, rho_m, c_m, gamma_m })
    }

    /// Particle conductivity at size `delta`.
    pub fn gamma_p(&self, delta: f64) -> f64 {
        self.gamma_p_bar / (delta * delta)
    }

    /// Interior `alpha_p = rho_p c_p / gamma_p`.
    pub fn alpha_p(&self, delta: f64) -> f64 {
        self.rho_p * self.c_p * delta * delta / self.gamma_p_bar
    }

    /// Exterior `alpha_m = rho_m c_m / gamma_m`.
    pub fn alpha_m(&self) -> f64 {
        self.rho_m * self.c_m / self.gamma_m
    }
}

/// Observation request outside the particle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HeatQuery {
    /// Observation point.
    pub xi: [f64; 3],
    /// Observation time.
    pub t: f64,
    /// Distance exponent: dist(xi, Omega) ~ delta^p, p in [0, 1).
    pub p: f64,
    /// Source switch-off time.
    pub t0: f64,
    /// Kernel-singularity exponent r < 1/2 for the K_r^{T0} diagnostic.
    pub r: f64,
}

impl HeatQuery {
    pub fn validate(&self) -> Result<(), NanoheatError> {
        if !(self.t > 0.0 && self.t0 > 0.0) {
            return Err(NanoheatError::InvalidParameter("heat query needs t, T0 > 0".into()));
        }
        if !(self.p >= 0.0 && self.p < 1.0) {
            return Err(NanoheatError::InvalidParameter(format!(
                "distance exponent p must lie in [0,1), got {}",
                self.p
            )));
        }
        if !(self.r < 0.5) {
            return Err(NanoheatError::InvalidParameter(format!(
                "kernel exponent r must satisfy r < 1/2, got {}",
                self.r
            )));
        }
        Ok(())
    }
}

/// Fundamental solution of `alpha d_t - Laplace` in three dimensions.
///
/// Returns 0 for `t <= tau` (causal branch).
pub fn heat_kernel(x: [f64; 3], t: f64, y: [f64; 3], tau: f64, alpha: f64) -> f64 {
    if t <= tau {
        return 0.0;
    }
    let dt = t - tau;
    let r2 = dist_sq(x, y);
    let a = alpha / (4.0 * std::f64::consts::PI * dt);
    a.powf(1.5) * (-alpha * r2 / (4.0 * dt)).exp()
}

fn dist_sq(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

/// Closed form of `J = int_0^t Phi(xi, t; z, tau) dtau`:
///
/// ```text
/// J = alpha/(4 pi |xi-z|) erfc( sqrt(alpha) |xi-z| / (2 sqrt(t)) )
/// ```
///
/// with `J -> alpha/(4 pi |xi-z|)` as `t -> infinity`.
pub fn time_integral_j(xi: [f64; 3], z: [f64; 3], t: f64, alpha_m: f64) -> Result<f64, NanoheatError> {
    let d = dist_sq(xi, z).sqrt();
    if d == 0.0 {
        return Err(NanoheatError::SingularPoint);
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    Ok(alpha_m / (4.0 * std::f64::consts::PI * d) * erfc(alpha_m.sqrt() * d / (2.0 * t.sqrt())))
}

/// `int_0^t Phi dtau` by adaptive quadrature; the independent check for the
/// closed form above.
pub fn time_integral_j_quadrature(
    xi: [f64; 3],
    z: [f64; 3],
    t: f64,
    alpha_m: f64,
    rel_tol: f64,
) -> Result<f64, NanoheatError> {
    if dist_sq(xi, z) == 0.0 {
        return Err(NanoheatError::SingularPoint);
    }
    let f = |tau: f64| heat_kernel(xi, t, z, tau, alpha_m);
    Ok(adaptive_simpson(&f, 0.0, t, rel_tol, 60))
}

/// Source window integral `J(t) - J(t - T0)` for sources active on `(0, T0)`.
pub fn time_integral_j_windowed(
    xi: [f64; 3],
    z: [f64; 3],
    t: f64,
    t0: f64,
    alpha_m: f64,
) -> Result<f64, NanoheatError> {
    let a = time_integral_j(xi, z, t, alpha_m)?;
    if t <= t0 {
        return Ok(a);
    }
    Ok(a - time_integral_j(xi, z, t - t0, alpha_m)?)
}

/// `K_r^{T0} = sup_t int_0^t (t-tau)^{-2r} dtau = T0^{1-2r}/(1-2r)`, `r < 1/2`.
pub fn k_r_t0(r: f64, t0: f64) -> Result<f64, NanoheatError> {
    if !(r < 0.5) {
        return Err(NanoheatError::InvalidParameter(format!("K_r requires r < 1/2, got {r}")));
    }
    Ok(t0.powf(1.0 - 2.0 * r) / (1.0 - 2.0 * r))
}

/// Volumetric heat source `f = (omega/(2 pi gamma_p)) Im(eps_p) |E|^2` on the
/// physical particle, constant on `(0, T0)` and zero afterwards.
#[derive(Debug, Clone)]
pub struct HeatSource {
    /// Physical voxel positions `y = delta x + z`.
    pub points: Vec<[f64; 3]>,
    /// Per-voxel `|E|^2`.
    pub e_sq: Vec<f64>,
    /// `omega Im(eps_p) / (2 pi gamma_p)`.
    pub coefficient: f64,
    /// Window end `T0`.
    pub t0: f64,
    /// Physical voxel volume `delta^3 vol`.
    pub cell_volume: f64,
}

impl HeatSource {
    pub fn new(
        points: Vec<[f64; 3]>,
        e_sq: Vec<f64>,
        omega: f64,
        im_eps_p: f64,
        gamma_p: f64,
        t0: f64,
        cell_volume: f64,
    ) -> Result<Self, NanoheatError> {
        if points.len() != e_sq.len() {
            return Err(NanoheatError::InvalidParameter(
                "heat source points and |E|^2 lengths differ".into(),
            ));
        }
        Ok(Self {
            points,
            e_sq,
            coefficient: omega * im_eps_p / (2.0 * std::f64::consts::PI * gamma_p),
            t0,
            cell_volume,
        })
    }

    /// Source density at voxel `i` and time `t`.
    pub fn value(&self, i: usize, t: f64) -> f64 {
        if t > 0.0 && t < self.t0 {
            self.coefficient * self.e_sq[i]
        } else {
            0.0
        }
    }

    /// `int_Omega f dx` while the window is active.
    pub fn spatial_integral(&self) -> f64 {
        self.coefficient * self.e_sq.iter().sum::<f64>() * self.cell_volume
    }
}

/// Dominant heat value at `(xi, t)`:
///
/// ```text
/// U = omega Im(eps_p) / (2 pi gamma_m alpha_m) * J_window(xi, z, t) * energy
/// ```
///
/// where `energy` is the dominant `int_Omega |E|^2` term of the active regime.
/// With `t -> infinity` (and T0 >= t) the `J` factor becomes
/// `alpha_m/(4 pi |xi-z|)` and the expression reduces to the closed
/// `omega Im(eps_p) delta^(3-2h) |coupling|^2 / (8 pi^2 gamma_m |xi-z|)` form
/// (and its `omega^3 mu^2 delta^(5-2h)` dielectric analog).
#[allow(clippy::too_many_arguments)]
pub fn dominant_heat(
    energy_dominant: f64,
    xi: [f64; 3],
    z: [f64; 3],
    t: f64,
    t0: f64,
    coeffs: &HeatCoefficients,
    omega: f64,
    im_eps_p: f64,
) -> Result<f64, NanoheatError> {
    let j = time_integral_j_windowed(xi, z, t, t0, coeffs.alpha_m())?;
    Ok(omega * im_eps_p / (2.0 * std::f64::consts::PI * coeffs.gamma_m * coeffs.alpha_m())
        * j
        * energy_dominant)
}

/// Body-source heat potential by direct space-time quadrature:
///
/// ```text
/// (gamma_p/gamma_m)(1/alpha_m) * int_0^{min(t,T0)} int_Omega
///     Phi^e(xi, t; y, tau) f(y) dy dtau
/// ```
///
/// with midpoint quadrature in space and adaptive Simpson in time. This keeps
/// the true spatial spread of `|E|^2`, which the dominant term collapses to
/// the particle center.
pub fn heat_potential_oracle(
    source: &HeatSource,
    xi: [f64; 3],
    t: f64,
    coeffs: &HeatCoefficients,
    delta: f64,
    rel_tol: f64,
) -> Result<f64, NanoheatError> {
    let alpha_m = coeffs.alpha_m();
    let gamma_p = coeffs.gamma_p(delta);
    let upper = t.min(source.t0);
    if upper <= 0.0 {
        return Ok(0.0);
    }
    let integrand = |tau: f64| {
        let mut s = 0.0;
        for (p, e2) in source.points.iter().zip(&source.e_sq) {
            s += heat_kernel(xi, t, *p, tau, alpha_m) * e2;
        }
        s * source.coefficient * source.cell_volume
    };
    let v = adaptive_simpson(&integrand, 0.0, upper, rel_tol, 52);
    Ok(gamma_p / (coeffs.gamma_m * alpha_m) * v)
}

/// The appendix comparison function
///
/// ```text
/// phi(v, y, t, tau) = (4/sqrt(pi)) int_{m0}^inf m^2 e^{-m^2}
///                     Phi^e(xi, t; z, tau - alpha_p |y-v|^2/(4 m^2)) dm,
/// m0 = sqrt(alpha_p)|y-v| / (2 sqrt(tau)),
/// ```
///
/// which tends to `Phi^e(xi, t; z, tau)` as `|y-v| -> 0`.
#[allow(clippy::too_many_arguments)]
pub fn varphi_appendix(
    v: [f64; 3],
    y: [f64; 3],
    t: f64,
    tau: f64,
    alpha_p: f64,
    xi: [f64; 3],
    z: [f64; 3],
    alpha_m: f64,
) -> Result<f64, NanoheatError> {
    if !(tau > 0.0 && tau < t) {
        return Err(NanoheatError::InvalidParameter(format!(
            "varphi needs 0 < tau < t, got tau={tau}, t={t}"
        )));
    }
    let dyv = dist_sq(v, y).sqrt();
    if dyv == 0.0 {
        // limit value: lower bound -> 0 and offset -> 0
        return Ok(heat_kernel(xi, t, z, tau, alpha_m));
    }
    let m0 = alpha_p.sqrt() * dyv / (2.0 * tau.sqrt());
    let upper = (m0 + 12.0).max(12.0);
    let f = |m: f64| {
        let offset = alpha_p * dyv * dyv / (4.0 * m * m);
        m * m * (-m * m).exp() * heat_kernel(xi, t, z, tau - offset, alpha_m)
    };
    let val = adaptive_simpson(&f, m0, upper, 1e-11, 48);
    Ok(4.0 / std::f64::consts::PI.sqrt() * val)
}

/// One heat evaluation for reporting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeatEvaluation {
    pub regime: String,
    pub delta: f64,
    pub h: f64,
    pub p: f64,
    pub xi: [f64; 3],
    pub t: f64,
    pub dominant: f64,
    pub oracle: f64,
    pub j_value: f64,
    pub k_r: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn coeffs() -> HeatCoefficients {
        HeatCoefficients::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.5).unwrap()
    }

    #[test]
    fn kernel_is_causal_and_peaks_at_source() {
        let x = [0.3, 0.0, 0.0];
        let y = [0.0, 0.0, 0.0];
        assert_eq!(heat_kernel(x, 1.0, y, 1.0, 1.0), 0.0);
        assert_eq!(heat_kernel(x, 1.0, y, 2.0, 1.0), 0.0);
        let v = heat_kernel(y, 2.0, y, 1.0, 1.0);
        assert_relative_eq!(v, (1.0 / (4.0 * std::f64::consts::PI)).powf(1.5), max_relative = 1e-14);
    }

    #[test]
    fn kernel_space_integral_is_one() {
        // radial quadrature of the Gaussian over a large ball
        let alpha = 1.3;
        let dt = 0.4;
        let f = |r: f64| {
            let phi = (alpha / (4.0 * std::f64::consts::PI * dt)).powf(1.5)
                * (-alpha * r * r / (4.0 * dt)).exp();
            4.0 * std::f64::consts::PI * r * r * phi
        };
        let v = adaptive_simpson(&f, 0.0, 40.0, 1e-10, 48);
        assert_relative_eq!(v, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn kernel_satisfies_heat_equation_numerically() {
        // alpha dPhi/dt - Laplace Phi = 0 away from the singularity, checked by
        // central differences at |x-y| = 0.5, t - tau = 0.5, alpha = 1.
        let y = [0.0, 0.0, 0.0];
        let x = [0.5, 0.0, 0.0];
        let (t, tau, alpha) = (0.7, 0.2, 1.0);
        let h = 1e-4;
        let dt = (heat_kernel(x, t + h, y, tau, alpha) - heat_kernel(x, t - h, y, tau, alpha))
            / (2.0 * h);
        let mut lap = 0.0;
        for a in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[a] += h;
            xm[a] -= h;
            lap += (heat_kernel(xp, t, y, tau, alpha) - 2.0 * heat_kernel(x, t, y, tau, alpha)
                + heat_kernel(xm, t, y, tau, alpha))
                / (h * h);
        }
        let resid = (alpha * dt - lap).abs() / lap.abs().max(1e-300);
        assert!(resid <= 1e-4, "heat equation residual {resid}");
    }

    #[test]
    fn j_limits() {
        let xi = [0.1, 0.0, 0.0];
        let z = [0.0, 0.0, 0.0];
        // t -> 0+: erfc(inf) = 0
        assert_abs_diff_eq!(time_integral_j(xi, z, 1e-12, 1.0).unwrap(), 0.0, epsilon = 1e-30);
        // t -> infinity: alpha/(4 pi d); at t = 1e6 d^2 the closed form sits
        // exactly at lim * erfc(5e-4), a relative 5.6e-4 below the limit
        let d = 0.1;
        let lim = 1.0 / (4.0 * std::f64::consts::PI * d);
        let t_inf = 1e6 * d * d;
        let j = time_integral_j(xi, z, t_inf, 1.0).unwrap();
        assert_relative_eq!(j, lim * crate::heat::special::erfc(5e-4), max_relative = 1e-14);
        assert_relative_eq!(j, lim, max_relative = 1e-3);
        // a genuinely asymptotic time reaches the limit to full precision
        let j_far = time_integral_j(xi, z, 1e25 * d * d, 1.0).unwrap();
        assert_relative_eq!(j_far, lim, max_relative = 1e-11);
    }

    #[test]
    fn j_closed_form_matches_quadrature() {
        let z = [0.0, 0.0, 0.0];
        let (alpha, d, t) = (1.0, 0.1, 1.0);
        let xi = [d, 0.0, 0.0];
        let a = time_integral_j(xi, z, t, alpha).unwrap();
        let b = time_integral_j_quadrature(xi, z, t, alpha, 1e-12).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-8);
    }

    #[test]
    fn j_singular_at_coincidence() {
        assert!(matches!(
            time_integral_j([0.0; 3], [0.0; 3], 1.0, 1.0),
            Err(NanoheatError::SingularPoint)
        ));
    }

    #[test]
    fn source_window_and_integral() {
        let pts = vec![[0.0, 0.0, 0.0], [0.1, 0.0, 0.0]];
        let e2 = vec![2.0, 3.0];
        let src = HeatSource::new(pts, e2, 1.5, 0.2, 10.0, 4.0, 0.001).unwrap();
        // Im(eps)=0 -> identically zero
        let zero = HeatSource::new(vec![[0.0; 3]], vec![5.0], 1.5, 0.0, 10.0, 4.0, 0.001).unwrap();
        assert_eq!(zero.value(0, 1.0), 0.0);
        assert_eq!(src.value(0, 5.0), 0.0, "window ends at T0");
        let c = 1.5 * 0.2 / (2.0 * std::f64::consts::PI * 10.0);
        assert_relative_eq!(src.value(1, 1.0), c * 3.0, max_relative = 1e-14);
        assert_relative_eq!(src.spatial_integral(), c * 5.0 * 0.001, max_relative = 1e-14);
    }

    #[test]
    fn dominant_scales_inverse_distance() {
        let c = coeffs();
        let z = [0.0; 3];
        let t = 1e16;
        let u1 = dominant_heat(2.0, [0.5, 0.0, 0.0], z, t, 2e16, &c, 1.0, 0.1).unwrap();
        let u2 = dominant_heat(2.0, [1.0, 0.0, 0.0], z, t, 2e16, &c, 1.0, 0.1).unwrap();
        assert_relative_eq!(u1, 2.0 * u2, max_relative = 1e-6);
        // closed theorem form at t -> infinity
        let d = 0.5;
        let expect = 1.0 * 0.1 / (8.0 * std::f64::consts::PI.powi(2) * c.gamma_m * d) * 2.0;
        assert_relative_eq!(u1, expect, max_relative = 1e-4);
        assert!(dominant_heat(1.0, z, z, 1.0, 2.0, &c, 1.0, 0.1).is_err());
    }

    #[test]
    fn oracle_single_voxel_matches_j_identity() {
        // a one-voxel particle at z reproduces prefactor * J_window * |E|^2 dv
        let c = coeffs();
        let delta = 0.05;
        let z = [0.0; 3];
        let xi = [0.4, 0.0, 0.0];
        let cellvol = 1e-3;
        let (omega, im_eps, t, t0) = (1.2, 0.3, 2.0, 5.0);
        let src = HeatSource::new(vec![z], vec![7.0], omega, im_eps, c.gamma_p(delta), t0, cellvol)
            .unwrap();
        let oracle = heat_potential_oracle(&src, xi, t, &c, delta, 1e-11).unwrap();
        let j = time_integral_j_windowed(xi, z, t, t0, c.alpha_m()).unwrap();
        let expect = omega * im_eps / (2.0 * std::f64::consts::PI * c.gamma_m * c.alpha_m())
            * j
            * 7.0
            * cellvol;
        assert_relative_eq!(oracle, expect, max_relative = 1e-6);
    }

    #[test]
    fn oracle_monotone_in_time() {
        let c = coeffs();
        let delta = 0.05;
        let src = HeatSource::new(
            vec![[0.0; 3], [0.02, 0.0, 0.0]],
            vec![1.0, 2.0],
            1.0,
            0.2,
            c.gamma_p(delta),
            10.0,
            1e-4,
        )
        .unwrap();
        let xi = [0.3, 0.2, 0.0];
        let mut last = 0.0;
        for &t in &[0.5, 1.0, 2.0, 4.0] {
            let v = heat_potential_oracle(&src, xi, t, &c, delta, 1e-10).unwrap();
            assert!(v >= last, "oracle must be nondecreasing in t");
            last = v;
        }
    }

    #[test]
    fn k_r_closed_form() {
        assert_relative_eq!(k_r_t0(0.25, 2.0).unwrap(), 2.0f64.sqrt() * 2.0, max_relative = 1e-14);
        assert!(k_r_t0(0.5, 1.0).is_err());
    }

    #[test]
    fn varphi_coincidence_limit() {
        let (xi, z) = ([1.0, 0.0, 0.0], [0.0; 3]);
        let (t, tau, ap, am) = (2.0, 1.0, 1.0, 1.0);
        let phi_e = heat_kernel(xi, t, z, tau, am);
        let exact = varphi_appendix([0.0; 3], [0.0; 3], t, tau, ap, xi, z, am).unwrap();
        assert_relative_eq!(exact, phi_e, max_relative = 1e-14);
        // small separation approaches the kernel value
        let close = varphi_appendix([0.0; 3], [1e-6, 0.0, 0.0], t, tau, ap, xi, z, am).unwrap();
        assert_relative_eq!(close, phi_e, max_relative = 1e-5);
    }

    #[test]
    fn varphi_proximity_slope_at_least_one() {
        // |phi - Phi^e| ~ O(sqrt(alpha_p) |y-v|): log-log slope >= 1
        let (xi, z) = ([1.0, 0.0, 0.0], [0.0; 3]);
        let (t, tau, ap, am) = (2.0, 1.0, 1.0, 1.0);
        let phi_e = heat_kernel(xi, t, z, tau, am);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut s = 1e-3 * tau.sqrt();
        while s <= 0.1 * tau.sqrt() + 1e-15 {
            let v = varphi_appendix([0.0; 3], [s, 0.0, 0.0], t, tau, ap, xi, z, am).unwrap();
            xs.push(s.ln());
            ys.push(((v - phi_e).abs()).ln());
            s *= 10.0;
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        assert!(slope >= 1.0, "proximity bound slope {slope} below 1");
    }

    #[test]
    fn varphi_vanishes_at_small_tau() {
        let (xi, z) = ([1.0, 0.0, 0.0], [0.0; 3]);
        let v = varphi_appendix([0.0; 3], [0.3, 0.0, 0.0], 2.0, 1e-6, 1.0, xi, z, 1.0).unwrap();
        assert!(v.abs() < 1e-30, "empty effective window must vanish, got {v}");
    }
}
