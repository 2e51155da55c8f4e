//! Command-line entry point: resonance | eig | solve | heat | sweep | validate.

use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use nanoheat::asymptotics::{
    fit_slope, remainder_order, run_sweep, HeatProbe, RemainderOutcome, SweepQuantity, SweepSpec,
};
use nanoheat::cache::{domain_cached, read_cluster, write_cluster};
use nanoheat::config::RunConfig;
use nanoheat::dispersion::RegimeKind;
use nanoheat::heat::{dominant_heat, heat_potential_oracle, k_r_t0, HeatSource};
use nanoheat::maxwell::{export_field_csv, SolveOptions};
use nanoheat::operators::eigen::{eigensystem_static, EigenSystem};
use nanoheat::operators::projectors::{Subspace, SubspaceProjectors};
use nanoheat::operators::{assemble_magnetization, assemble_newtonian};
use nanoheat::pipeline::{run_point, ClusterOptions, RegimeContext};
use nanoheat::NanoheatError;

#[derive(Parser)]
#[command(name = "nanoheat", about = "Photothermal pipeline for Lorentz-dispersive nanoparticles")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cache directory (overrides config).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Voxels per axis (overrides config).
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Particle size delta (overrides config).
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Detuning exponent h (overrides config).
    #[arg(long, global = true)]
    h: Option<f64>,
    /// plasmonic | dielectric (overrides config).
    #[arg(long, global = true)]
    regime: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select the resonant frequency and report (omega, zeta, contrast, Q).
    Resonance,
    /// Compute and cache the eigenstructure; print the top modes.
    Eig,
    /// Solve one scattering problem and export the field.
    Solve,
    /// Evaluate dominant and oracle heat at the configured probe.
    Heat,
    /// Run the configured delta-sweep and fit its exponent.
    Sweep,
    /// Run the full validation battery; nonzero exit if any fit fails.
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(t) = cfg.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = match cli.command {
        Command::Resonance => cmd_resonance(&cfg),
        Command::Eig => cmd_eig(&cfg),
        Command::Solve => cmd_solve(&cfg),
        Command::Heat => cmd_heat(&cfg),
        Command::Sweep => cmd_sweep(&cfg),
        Command::Validate => cmd_validate(&cfg),
    };
    match result {
        Ok(code) => code,
        Err(NanoheatError::Config(e)) | Err(NanoheatError::InvalidParameter(e)) => {
            eprintln!("usage/config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("computation failed: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, NanoheatError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => {
            return Err(NanoheatError::Config(
                "--config PATH is required (see examples/config/*.toml)".into(),
            ))
        }
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(cache) = &cli.cache {
        cfg.cache_dir = cache.clone();
    }
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    if let Some(n) = cli.resolution {
        cfg.domain.resolution = n;
    }
    if let Some(d) = cli.delta {
        cfg.regime.delta = d;
    }
    if let Some(h) = cli.h {
        cfg.regime.h = h;
    }
    if let Some(r) = &cli.regime {
        cfg.regime.kind = match r.as_str() {
            "plasmonic" => RegimeKind::Plasmonic,
            "dielectric" => RegimeKind::Dielectric,
            other => return Err(NanoheatError::Config(format!("unknown regime '{other}'"))),
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cluster_options(cfg: &RunConfig) -> ClusterOptions {
    ClusterOptions {
        magnetization_window: cfg.solver.magnetization_window,
        newtonian_window_rel: cfg.solver.newtonian_window_rel,
        lanczos_steps: cfg.solver.lanczos_steps,
        ritz_tol: 1e-8,
    }
}

fn solve_options(cfg: &RunConfig) -> SolveOptions {
    SolveOptions {
        method: cfg.solver.method,
        dense_threshold: cfg.solver.dense_threshold,
        gmres_tol: cfg.solver.gmres_tol,
        gmres_max_iter: cfg.solver.gmres_max_iter,
    }
}

/// Build (or load from cache) the regime context for the configured shape.
fn build_context(cfg: &RunConfig) -> Result<RegimeContext, NanoheatError> {
    let shape = cfg.domain.shape()?;
    let domain = domain_cached(&cfg.cache_dir, shape, cfg.domain.resolution)?;
    let opts = cluster_options(cfg);
    let kind_tag = match cfg.regime.kind {
        RegimeKind::Plasmonic => "magnetization",
        RegimeKind::Dielectric => "newtonian_divfree",
    };
    let cached =
        read_cluster(&cfg.cache_dir, &shape, cfg.domain.resolution, kind_tag, 3 * domain.voxel_count());
    match cfg.regime.kind {
        RegimeKind::Plasmonic => {
            if let Ok(c) = cached {
                return RegimeContext::from_cluster(
                    RegimeKind::Plasmonic,
                    &domain,
                    c,
                    cfg.solver.restoration,
                );
            }
            let ctx = RegimeContext::plasmonic(&domain, &opts, cfg.solver.restoration)?;
            write_cluster(&cfg.cache_dir, &shape, cfg.domain.resolution, kind_tag, &ctx.cluster)?;
            Ok(ctx)
        }
        RegimeKind::Dielectric => {
            if let Ok(c) = cached {
                return RegimeContext::from_cluster(
                    RegimeKind::Dielectric,
                    &domain,
                    c,
                    cfg.solver.restoration,
                );
            }
            let projectors = SubspaceProjectors::build(&domain)?;
            let ctx =
                RegimeContext::dielectric(&domain, &projectors, &opts, cfg.solver.restoration)?;
            write_cluster(&cfg.cache_dir, &shape, cfg.domain.resolution, kind_tag, &ctx.cluster)?;
            Ok(ctx)
        }
    }
}

fn write_report(
    dir: &PathBuf,
    name: &str,
    json: &serde_json::Value,
) -> Result<PathBuf, NanoheatError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let tmp = dir.join(format!("{name}.tmp"));
    {
        let mut f = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        // timestamp isolated to the header line; the payload below is
        // reproducible byte-for-byte
        writeln!(f, "# generated {}", now_stamp())?;
        writeln!(f, "{}", serde_json::to_string_pretty(json).unwrap())?;
    }
    std::fs::rename(&tmp, &path)?;
    Ok(path)
}

fn now_stamp() -> String {
    match std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH) {
        Ok(d) => format!("unix:{}", d.as_secs()),
        Err(_) => "unix:0".into(),
    }
}

fn cmd_resonance(cfg: &RunConfig) -> Result<ExitCode, NanoheatError> {
    let ctx = build_context(cfg)?;
    let model = cfg.model()?;
    let medium = cfg.medium_params()?;
    let sel = ctx.select(&model, &medium, cfg.regime.h, cfg.regime.delta)?;
    let detuning_ratio = sel.detuning / cfg.regime.delta.powf(cfg.regime.h);
    let record = serde_json::json!({
        "regime": format!("{:?}", cfg.regime.kind).to_lowercase(),
        "lambda": ctx.cluster.lambda_bar,
        "omega": format!("{:.17e}", sel.omega),
        "zeta": format!("{:.17e}", sel.zeta),
        "contrast_re": format!("{:.17e}", sel.contrast.value.re),
        "contrast_im": format!("{:.17e}", sel.contrast.value.im),
        "detuning": format!("{:.17e}", sel.detuning),
        "detuning_over_delta_h": format!("{:.17e}", detuning_ratio),
        "q_factor": format!("{:.17e}", sel.q_factor),
    });
    println!("{}", serde_json::to_string_pretty(&record).unwrap());
    write_report(&cfg.out_dir, "resonance.json", &record)?;
    let ok = match cfg.regime.kind {
        RegimeKind::Plasmonic => sel.contrast.value.re < 0.0,
        RegimeKind::Dielectric => sel.contrast.value.re > 0.0,
    };
    if !ok {
        eprintln!("regime violation: contrast sign check failed");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn print_eig_table(tag: &str, sys: &EigenSystem) {
    println!("subspace {tag}: top modes (lambda, |int e|)");
    for e in sys.entries.iter().take(10) {
        let c = (e.coupling[0].powi(2) + e.coupling[1].powi(2) + e.coupling[2].powi(2)).sqrt();
        println!("  {:+.12e}  {:.6e}", e.lambda, c);
    }
}

fn cmd_eig(cfg: &RunConfig) -> Result<ExitCode, NanoheatError> {
    let ctx = build_context(cfg)?;
    println!(
        "resonant cluster: lambda_bar = {:.12}, members = {}, max residual = {:.3e}",
        ctx.cluster.lambda_bar,
        ctx.cluster.lambdas.len(),
        ctx.cluster.max_residual
    );
    // subspace-restricted tables are affordable at small sizes only
    let n3 = 3 * ctx.domain.voxel_count();
    if n3 <= 4000 {
        let zero = num_complex::Complex64::new(0.0, 0.0);
        let projectors = SubspaceProjectors::build(&ctx.domain)?;
        let mop = assemble_magnetization(&ctx.domain, zero);
        let nop = assemble_newtonian(&ctx.domain, zero);
        let (m3, _) = eigensystem_static(&mop, &projectors, Subspace::GradHarmonic)?;
        print_eig_table("3 (Magnetization)", &m3);
        let (n1, _) = eigensystem_static(&nop, &projectors, Subspace::DivFree0)?;
        print_eig_table("1 (Newtonian)", &n1);
        let (n2, _) = eigensystem_static(&nop, &projectors, Subspace::CurlFree0)?;
        print_eig_table("2 (Newtonian)", &n2);
    } else {
        println!("(full subspace tables skipped at this resolution; cluster cache written)");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(cfg: &RunConfig) -> Result<ExitCode, NanoheatError> {
    let ctx = build_context(cfg)?;
    let model = cfg.model()?;
    let medium = cfg.medium_params()?;
    let pr = run_point(
        &ctx,
        &model,
        &medium,
        cfg.regime.h,
        cfg.regime.delta,
        cfg.center,
        cfg.wave.polarization,
        cfg.wave.direction,
        &solve_options(cfg),
    )?;
    let summary = serde_json::json!({
        "regime": format!("{:?}", cfg.regime.kind).to_lowercase(),
        "delta": cfg.regime.delta,
        "omega": format!("{:.17e}", pr.selection.omega),
        "detuning": format!("{:.17e}", pr.selection.detuning),
        "residual": format!("{:.17e}", pr.solution.residual),
        "energy_integral": format!("{:.17e}", pr.solution.energy_integral_omega),
        "dominant_energy": format!("{:.17e}", pr.dominant_energy),
        "l2_omega": format!("{:.17e}", pr.norms.l2_omega),
        "l4_omega": format!("{:.17e}", pr.norms.l4_omega),
        "l2_of_square": format!("{:.17e}", pr.norms.l2_of_square),
    });
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    std::fs::create_dir_all(&cfg.out_dir)?;
    export_field_csv(&pr.solution, &cfg.out_dir.join("field.csv"))?;
    write_report(&cfg.out_dir, "solve.json", &summary)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_heat(cfg: &RunConfig) -> Result<ExitCode, NanoheatError> {
    let heat_cfg = cfg
        .heat
        .as_ref()
        .ok_or_else(|| NanoheatError::Config("heat command needs a [heat] section".into()))?;
    let coeffs = heat_cfg.coefficients()?;
    let ctx = build_context(cfg)?;
    let model = cfg.model()?;
    let medium = cfg.medium_params()?;
    let delta = cfg.regime.delta;
    let pr = run_point(
        &ctx,
        &model,
        &medium,
        cfg.regime.h,
        delta,
        cfg.center,
        cfg.wave.polarization,
        cfg.wave.direction,
        &solve_options(cfg),
    )?;
    let im_eps = pr.selection.contrast.value.im;
    let dominant = dominant_heat(
        pr.dominant_energy,
        heat_cfg.xi,
        cfg.center,
        heat_cfg.t,
        heat_cfg.t0,
        &coeffs,
        pr.selection.omega,
        im_eps,
    )?;
    let source = HeatSource::new(
        ctx.domain
            .centroids
            .iter()
            .map(|c| {
                [
                    delta * c[0] + cfg.center[0],
                    delta * c[1] + cfg.center[1],
                    delta * c[2] + cfg.center[2],
                ]
            })
            .collect(),
        pr.solution.field.magnitude_sq(),
        pr.selection.omega,
        im_eps,
        coeffs.gamma_p(delta),
        heat_cfg.t0,
        delta.powi(3) * ctx.domain.voxel_volume,
    )?;
    let oracle = heat_potential_oracle(&source, heat_cfg.xi, heat_cfg.t, &coeffs, delta, 1e-10)?;
    let j = nanoheat::heat::time_integral_j_windowed(
        heat_cfg.xi,
        cfg.center,
        heat_cfg.t,
        heat_cfg.t0,
        coeffs.alpha_m(),
    )?;
    let record = serde_json::json!({
        "regime": format!("{:?}", cfg.regime.kind).to_lowercase(),
        "delta": delta,
        "h": cfg.regime.h,
        "p": heat_cfg.p,
        "xi": heat_cfg.xi,
        "t": heat_cfg.t,
        "dominant": format!("{:.17e}", dominant),
        "oracle": format!("{:.17e}", oracle),
        "j": format!("{:.17e}", j),
        "k_r": format!("{:.17e}", k_r_t0(heat_cfg.r, heat_cfg.t0)?),
    });
    println!("{}", serde_json::to_string_pretty(&record).unwrap());
    write_report(&cfg.out_dir, "heat.json", &record)?;
    Ok(ExitCode::SUCCESS)
}

fn sweep_spec(cfg: &RunConfig, quantity: SweepQuantity) -> Result<SweepSpec, NanoheatError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| NanoheatError::Config("sweep command needs a [sweep] section".into()))?;
    let heat = match (quantity, &cfg.heat) {
        (SweepQuantity::HeatDominant | SweepQuantity::HeatOracle, Some(h)) => Some(HeatProbe {
            coefficients: h.coefficients()?,
            xi: h.xi,
            t: h.t,
            t0: h.t0,
        }),
        (SweepQuantity::HeatDominant | SweepQuantity::HeatOracle, None) => {
            return Err(NanoheatError::Config("heat sweep needs a [heat] section".into()))
        }
        _ => None,
    };
    Ok(SweepSpec {
        deltas: sweep.deltas(),
        h: cfg.regime.h,
        regime: cfg.regime.kind,
        quantity,
        tolerance: sweep.tolerance,
        heat,
        center: cfg.center,
        polarization: cfg.wave.polarization,
        direction: cfg.wave.direction,
    })
}

fn cmd_sweep(cfg: &RunConfig) -> Result<ExitCode, NanoheatError> {
    let ctx = build_context(cfg)?;
    let model = cfg.model()?;
    let medium = cfg.medium_params()?;
    let spec = sweep_spec(cfg, SweepQuantity::EnergyIntegral)?;
    let report = run_sweep(&spec, &ctx, &model, &medium, &solve_options(cfg))?;
    println!(
        "energy sweep: slope = {:.6} (predicted {:.3}), r^2 = {:.6}, pass = {}",
        report.fit.slope, report.fit.predicted, report.fit.r_squared, report.fit.pass
    );
    let json = serde_json::to_value(&report).unwrap();
    write_report(&cfg.out_dir, "sweep.json", &json)?;
    // CSV companion
    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut csv = std::io::BufWriter::new(std::fs::File::create(cfg.out_dir.join("sweep.csv"))?);
    writeln!(csv, "delta,value,omega,detuning,energy,dominant,residual")?;
    for p in &report.points {
        writeln!(
            csv,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            p.delta, p.value, p.omega, p.detuning, p.energy, p.dominant, p.residual
        )?;
    }
    Ok(if report.fit.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_validate(cfg: &RunConfig) -> Result<ExitCode, NanoheatError> {
    let model = cfg.model()?;
    let medium = cfg.medium_params()?;
    let options = solve_options(cfg);
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| NanoheatError::Config("validate needs a [sweep] section".into()))?;
    let deltas = sweep.deltas();
    let mut all_pass = true;
    let mut lines = Vec::new();

    for (kind, h, energy_tol) in
        [(RegimeKind::Plasmonic, 1.0, 0.15), (RegimeKind::Dielectric, 0.5, 0.2)]
    {
        let mut cfg_k = cfg.clone();
        cfg_k.regime.kind = kind;
        cfg_k.regime.h = h;
        let ctx = build_context(&cfg_k)?;
        let mut energies = Vec::new();
        let mut dominants = Vec::new();
        let mut apriori = Vec::new();
        let mut l2sq = Vec::new();
        for &d in &deltas {
            let pr = run_point(
                &ctx,
                &model,
                &medium,
                h,
                d,
                cfg.center,
                cfg.wave.polarization,
                cfg.wave.direction,
                &options,
            )?;
            energies.push((d, pr.solution.energy_integral_omega));
            dominants.push(pr.dominant_energy);
            apriori.push((d, pr.solution.energy_integral_omega / d.powi(3)));
            l2sq.push((d, pr.norms.l2_of_square));
        }
        let regime = format!("{kind:?}").to_lowercase();
        let pred_e = SweepQuantity::EnergyIntegral.predicted_exponent(kind, h);
        let fit_e = fit_slope(&energies, pred_e, energy_tol)?;
        lines.push((
            format!(
                "{regime} energy slope {:.4} vs {:.2} (tol {energy_tol})",
                fit_e.slope, pred_e
            ),
            fit_e.pass,
        ));
        all_pass &= fit_e.pass;
        if kind == RegimeKind::Plasmonic {
            let full: Vec<f64> = energies.iter().map(|(_, v)| *v).collect();
            let rem = remainder_order(&full, &dominants, &deltas, 4.0 - 2.0 * h, 0.3)?;
            let (txt, ok) = match rem {
                RemainderOutcome::Fit(f) => (
                    format!("{regime} remainder slope {:.4} vs >= {:.2}", f.slope, f.predicted - 0.3),
                    f.pass,
                ),
                RemainderOutcome::Inconclusive => {
                    (format!("{regime} remainder below noise floor (inconclusive)"), true)
                }
            };
            all_pass &= ok;
            lines.push((txt, ok));
        } else {
            let pred_a = SweepQuantity::ScaledEnergyB.predicted_exponent(kind, h);
            let fit_a = fit_slope(&apriori, pred_a, 0.3)?;
            lines.push((
                format!("{regime} a-priori slope {:.4} vs {:.2} (tol 0.3)", fit_a.slope, pred_a),
                fit_a.pass,
            ));
            all_pass &= fit_a.pass;
        }
        let pred_l = SweepQuantity::L2ESq.predicted_exponent(kind, h);
        let fit_l = fit_slope(&l2sq, pred_l, 0.2)?;
        lines.push((
            format!("{regime} |||E|^2|| slope {:.4} vs {:.2} (tol 0.2)", fit_l.slope, pred_l),
            fit_l.pass,
        ));
        all_pass &= fit_l.pass;
    }

    for (txt, ok) in &lines {
        println!("[{}] {}", if *ok { "PASS" } else { "FAIL" }, txt);
    }
    let json = serde_json::json!({
        "checks": lines.iter().map(|(t, ok)| serde_json::json!({"check": t, "pass": ok})).collect::<Vec<_>>(),
        "all_pass": all_pass,
    });
    write_report(&cfg.out_dir, "validate.json", &json)?;
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
