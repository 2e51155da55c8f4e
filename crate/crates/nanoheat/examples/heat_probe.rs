//! Photothermal evaluation: dominant closed form vs the space-time quadrature
//! oracle of the body-source heat potential, plus the J integral it rests on.
//!
//! ```bash
//! cargo run --release --example heat_probe
//! ```

use nanoheat::dispersion::{LorentzModel, MediumParams};
use nanoheat::domain::{voxelize, Shape};
use nanoheat::heat::{
    dominant_heat, heat_potential_oracle, k_r_t0, time_integral_j_windowed, HeatCoefficients,
    HeatSource,
};
use nanoheat::maxwell::SolveOptions;
use nanoheat::pipeline::{run_point, ClusterOptions, RegimeContext};

fn main() {
    let n = 14;
    let h = 1.0;
    let model = LorentzModel::new(1.0, 3.0f64.sqrt(), 1.0, 0.0).unwrap();
    let medium = MediumParams::new(1.0, 1.0).unwrap();
    let coeffs = HeatCoefficients::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.5).unwrap();
    let xi = [0.5, 0.0, 0.0];
    let (t, t0) = (10.0, 20.0);

    let dom = voxelize(Shape::Ball, n).unwrap();
    let ctx = RegimeContext::plasmonic(&dom, &ClusterOptions::default(), true).unwrap();
    println!("plasmonic particle at the origin, probe at |xi| = 0.5, t = {t}");
    println!("alpha_m = {}, K_r(T0) = {:.6}", coeffs.alpha_m(), k_r_t0(0.25, t0).unwrap());
    println!(
        "\n{:>8} {:>14} {:>14} {:>10} {:>12}",
        "delta", "dominant", "oracle", "rel diff", "J-window"
    );
    for delta in [0.1, 0.05, 0.025] {
        let pr = run_point(
            &ctx,
            &model,
            &medium,
            h,
            delta,
            [0.0; 3],
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
            &SolveOptions::default(),
        )
        .unwrap();
        let im_eps = pr.selection.contrast.value.im;
        let omega = pr.selection.omega;
        let dominant =
            dominant_heat(pr.dominant_energy, xi, [0.0; 3], t, t0, &coeffs, omega, im_eps).unwrap();
        let src = HeatSource::new(
            dom.centroids.iter().map(|c| [delta * c[0], delta * c[1], delta * c[2]]).collect(),
            pr.solution.field.magnitude_sq(),
            omega,
            im_eps,
            coeffs.gamma_p(delta),
            t0,
            delta.powi(3) * dom.voxel_volume,
        )
        .unwrap();
        let oracle = heat_potential_oracle(&src, xi, t, &coeffs, delta, 1e-10).unwrap();
        let j = time_integral_j_windowed(xi, [0.0; 3], t, t0, coeffs.alpha_m()).unwrap();
        println!(
            "{:>8} {:>14.6e} {:>14.6e} {:>10.4} {:>12.6e}",
            delta,
            dominant,
            oracle,
            (oracle - dominant).abs() / dominant,
            j
        );
    }
    println!("\nThe oracle keeps the true spatial spread of |E|^2 inside the particle;");
    println!("the dominant term collapses it to the center, so their gap shrinks with delta.");
}
