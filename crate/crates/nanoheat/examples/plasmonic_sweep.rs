//! Plasmonic delta-sweep on the ball: the resonant energy follows
//! `int_Omega |E|^2 ~ delta^(3-2h)` and the dominant closed form tracks the
//! full solve with an `O(delta^(4-2h))` remainder.
//!
//! ```bash
//! cargo run --release --example plasmonic_sweep
//! ```

use nanoheat::asymptotics::{fit_slope, remainder_order, RemainderOutcome};
use nanoheat::dispersion::{LorentzModel, MediumParams};
use nanoheat::domain::{voxelize, Shape};
use nanoheat::maxwell::SolveOptions;
use nanoheat::pipeline::{run_point, ClusterOptions, RegimeContext};

fn main() {
    let n = 16;
    let h = 1.0;
    let deltas = [0.1, 0.05, 0.025, 0.0125];
    let model = LorentzModel::new(1.0, 3.0f64.sqrt(), 1.0, 0.0).unwrap();
    let medium = MediumParams::new(1.0, 1.0).unwrap();

    let dom = voxelize(Shape::Ball, n).unwrap();
    println!("extracting the resonant cluster at n = {n} ({} voxels)...", dom.voxel_count());
    let ctx = RegimeContext::plasmonic(&dom, &ClusterOptions::default(), true).unwrap();
    println!(
        "cluster: lambda_bar = {:.6} ({} members, max Ritz residual {:.1e})",
        ctx.cluster.lambda_bar,
        ctx.cluster.lambdas.len(),
        ctx.cluster.max_residual
    );

    println!(
        "\n{:>8} {:>12} {:>12} {:>14} {:>14} {:>10}",
        "delta", "omega", "detuning", "energy", "dominant", "rel diff"
    );
    let mut energies = Vec::new();
    let mut dominants = Vec::new();
    for &d in &deltas {
        let pr = run_point(
            &ctx,
            &model,
            &medium,
            h,
            d,
            [0.0; 3],
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
            &SolveOptions::default(),
        )
        .unwrap();
        println!(
            "{:>8} {:>12.6} {:>12.5e} {:>14.6e} {:>14.6e} {:>10.2e}",
            d,
            pr.selection.omega,
            pr.selection.detuning,
            pr.solution.energy_integral_omega,
            pr.dominant_energy,
            (pr.solution.energy_integral_omega - pr.dominant_energy) / pr.dominant_energy
        );
        energies.push((d, pr.solution.energy_integral_omega));
        dominants.push(pr.dominant_energy);
    }

    let fit = fit_slope(&energies, 3.0 - 2.0 * h, 0.15).unwrap();
    println!(
        "\nenergy slope: {:.4}  (predicted 3 - 2h = {:.2}, r^2 = {:.6}, pass = {})",
        fit.slope,
        fit.predicted,
        fit.r_squared,
        fit.pass
    );
    let full: Vec<f64> = energies.iter().map(|(_, v)| *v).collect();
    match remainder_order(&full, &dominants, &deltas, 4.0 - 2.0 * h, 0.3).unwrap() {
        RemainderOutcome::Fit(f) => println!(
            "remainder |full - dominant| slope: {:.4} (predicted >= {:.2}, pass = {})",
            f.slope,
            f.predicted - 0.3,
            f.pass
        ),
        RemainderOutcome::Inconclusive => println!("remainder below the quadrature noise floor"),
    }
}
