//! Dielectric delta-sweep on the ball: contrast ~ delta^-2, energy
//! `int_Omega |E|^2 ~ delta^(5-2h)` and the a priori `||Etilde||^2 ~ delta^(2-2h)`.
//!
//! ```bash
//! cargo run --release --example dielectric_sweep
//! ```

use nanoheat::asymptotics::fit_slope;
use nanoheat::dispersion::{LorentzModel, MediumParams};
use nanoheat::domain::{voxelize, Shape};
use nanoheat::maxwell::SolveOptions;
use nanoheat::operators::projectors::SubspaceProjectors;
use nanoheat::pipeline::{run_point, ClusterOptions, RegimeContext};

fn main() {
    let n = 14;
    let h = 0.5;
    let deltas = [0.1, 0.05, 0.025, 0.0125];
    let model = LorentzModel::new(1.0, 3.0f64.sqrt(), 1.0, 0.0).unwrap();
    let medium = MediumParams::new(1.0, 1.0).unwrap();

    let dom = voxelize(Shape::Ball, n).unwrap();
    println!("building projectors and the divergence-free Newtonian cluster at n = {n}...");
    let proj = SubspaceProjectors::build(&dom).unwrap();
    let ctx = RegimeContext::dielectric(&dom, &proj, &ClusterOptions::default(), true).unwrap();
    println!(
        "cluster: lambda_bar = {:.6} ({} members)",
        ctx.cluster.lambda_bar,
        ctx.cluster.lambdas.len()
    );

    println!(
        "\n{:>8} {:>12} {:>14} {:>14} {:>14} {:>14}",
        "delta", "omega", "Re(contrast)", "det/d^h", "energy", "apriori"
    );
    let mut energies = Vec::new();
    let mut apriori = Vec::new();
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
        let ap = pr.solution.energy_integral_omega / d.powi(3);
        println!(
            "{:>8} {:>12.8} {:>14.4e} {:>14.4} {:>14.6e} {:>14.6e}",
            d,
            pr.selection.omega,
            pr.selection.contrast.value.re,
            pr.selection.detuning / d.powf(h),
            pr.solution.energy_integral_omega,
            ap
        );
        energies.push((d, pr.solution.energy_integral_omega));
        apriori.push((d, ap));
    }
    let fe = fit_slope(&energies, 5.0 - 2.0 * h, 0.2).unwrap();
    let fa = fit_slope(&apriori, 2.0 - 2.0 * h, 0.3).unwrap();
    println!(
        "\nenergy slope {:.4} (predicted 5 - 2h = {:.2}, pass = {})",
        fe.slope, fe.predicted, fe.pass
    );
    println!(
        "a-priori ||Etilde||^2 slope {:.4} (predicted 2 - 2h = {:.2}, pass = {})",
        fa.slope, fa.predicted, fa.pass
    );
}
