//! Scenario runner for the contactflow library.
//!
//! Subcommands: `run` (scenario from a preset or config file), `peakon`
//! (N-peakon ODE), `reduce1d` (reduced 1-D shear equation), `verify`
//! (built-in identity suites) and `presets`. Exit codes: 0 success,
//! 1 usage/config error, 2 numerical blowup detected (diagnostics still
//! written), 3 verification failure.

mod config;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{apply_overrides, build_scenario, parse_key_values, Scenario, ScenarioConfig};
use contactflow::diagnostics;
use contactflow::evolution::{run, RunConfig, RunStatus, StepperConfig};
use contactflow::lagrangian::{self, FlowMap};
use contactflow::peakon::{self, PeakonState};
use contactflow::spectral::snapshot;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "contactflow",
    about = "Pseudo-spectral geodesic flow on the contactomorphism group: \
             generalized Camassa-Holm dynamics, quasigeostrophic reductions, \
             peakons and verification suites",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a scenario from a preset or a key=value config file.
    Run(RunArgs),
    /// Integrate the periodic N-peakon Hamiltonian system.
    Peakon(PeakonArgs),
    /// Run the reduced 1-D shear equation .
    Reduce1d(Reduce1dArgs),
    /// Run the built-in operator identity suites; nonzero exit on failure.
    Verify(VerifyArgs),
    /// List named scenario presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file of key=value lines.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset (see `contactflow presets`).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output directory for CSV series and snapshots.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Grid sizes, e.g. 256 or 32,32,32.
    #[arg(long)]
    grid: Option<String>,
    /// Steps between diagnostic records.
    #[arg(long)]
    cadence: Option<usize>,
    /// Seed for random trig-polynomial initial data.
    #[arg(long)]
    seed: Option<u64>,
    /// Extra KEY=VAL overrides applied to the scenario (repeatable).
    #[arg(long = "override", value_name = "KEY=VAL")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct PeakonArgs {
    /// Number of peakons.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Comma-separated momenta (default: all 1.0).
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated initial positions (default: equispaced).
    #[arg(long)]
    q: Option<String>,
    /// Circle circumference.
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    circumference: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long = "t-end", default_value_t = 1.0)]
    t_end: f64,
    /// Steps between CSV rows.
    #[arg(long, default_value_t = 10)]
    cadence: usize,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Reduce1dArgs {
    /// Initial profile: phi-bump (nonnegative momentum) or g-negative-even.
    #[arg(long, default_value = "phi-bump")]
    ic: String,
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    /// Periodic box length.
    #[arg(long, default_value_t = 40.0)]
    length: f64,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long = "t-end", default_value_t = 5.0)]
    t_end: f64,
    #[arg(long, default_value_t = 50)]
    cadence: usize,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Seed for the randomized identity checks.
    #[arg(long, default_value_t = 20260810)]
    seed: u64,
}

fn main() {
    std::process::exit(dispatch());
}

fn dispatch() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Peakon(args) => cmd_peakon(args),
        Cmd::Reduce1d(args) => cmd_reduce1d(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Presets => cmd_presets(),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn cmd_presets() -> Result<i32> {
    for (name, description, _) in config::PRESETS {
        println!("{name:<20} {description}");
    }
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let reports = contactflow::verify::run_all(args.seed).map_err(|e| anyhow!(e.to_string()))?;
    let mut failed = false;
    for r in &reports {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", r.name, r.detail);
        failed |= !r.passed;
    }
    Ok(if failed { 3 } else { 0 })
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("invalid {what} entry {s:?}"))
        })
        .collect()
}

fn cmd_peakon(args: PeakonArgs) -> Result<i32> {
    if args.n == 0 {
        return Err(anyhow!("need at least one peakon"));
    }
    let p = match &args.p {
        Some(text) => parse_f64_list(text, "momentum")?,
        None => vec![1.0; args.n],
    };
    let q = match &args.q {
        Some(text) => parse_f64_list(text, "position")?,
        None => (0..args.n)
            .map(|k| (k as f64 + 0.5) * args.circumference / args.n as f64)
            .collect(),
    };
    if p.len() != args.n || q.len() != args.n {
        return Err(anyhow!(
            "expected {} momenta and positions, got {} and {}",
            args.n,
            p.len(),
            q.len()
        ));
    }
    if !(args.dt > 0.0 && args.t_end >= 0.0) {
        return Err(anyhow!("need dt > 0 and t-end >= 0"));
    }
    if args.cadence == 0 {
        return Err(anyhow!("cadence must be >= 1"));
    }

    let mut writer = match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let f = File::create(dir.join("peakon.csv"))?;
            let mut w = BufWriter::new(f);
            peakon::write_peakon_header(&mut w, args.n)?;
            Some(w)
        }
        None => None,
    };

    let mut state =
        PeakonState::new(q, p, args.circumference).map_err(|e| anyhow!(e.to_string()))?;
    let mut t = 0.0;
    let mut step = 0usize;
    if let Some(w) = writer.as_mut() {
        peakon::write_peakon_row(w, t, &state)?;
    }
    let h0 = state.hamiltonian();
    while t < args.t_end - 1e-12 {
        let dt = args.dt.min(args.t_end - t);
        state = peakon::step_rk4(&state, dt);
        t += dt;
        step += 1;
        if step % args.cadence == 0 || t >= args.t_end - 1e-12 {
            if let Some(w) = writer.as_mut() {
                peakon::write_peakon_row(w, t, &state)?;
            }
        }
    }
    if let Some(mut w) = writer {
        w.flush()?;
    }

    println!("t = {t:.6}");
    for k in 0..state.len() {
        println!(
            "peakon {k}: q = {:.12}, p = {:.12}",
            state.positions()[k],
            state.momenta()[k]
        );
    }
    println!(
        "hamiltonian = {:.12e} (drift {:.3e})",
        state.hamiltonian(),
        (state.hamiltonian() - h0).abs()
    );
    Ok(0)
}

fn cmd_reduce1d(args: Reduce1dArgs) -> Result<i32> {
    let pairs = vec![
        ("equation".to_string(), "reduced-1d".to_string()),
        ("grid".to_string(), args.grid.to_string()),
        ("lengths".to_string(), args.length.to_string()),
        ("initial".to_string(), args.ic.clone()),
        ("amplitude".to_string(), args.amplitude.to_string()),
        ("dt".to_string(), args.dt.to_string()),
        ("t_end".to_string(), args.t_end.to_string()),
        ("cadence".to_string(), args.cadence.to_string()),
        ("blowup_threshold".to_string(), "1e4".to_string()),
    ];
    let mut cfg = ScenarioConfig::from_pairs(&pairs)?;
    cfg.out = args.out;
    execute_scenario(build_scenario(cfg)?)
}

fn cmd_run(args: RunArgs) -> Result<i32> {
    let base_text: String = match (&args.config, &args.preset) {
        (Some(path), None) => std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?,
        (None, Some(name)) => config::preset_text(name)?.to_string(),
        (None, None) => return Err(anyhow!("need --config PATH or --preset NAME")),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let base = parse_key_values(&base_text)?;

    let mut overrides: Vec<(String, String)> = Vec::new();
    for item in &args.overrides {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("--override expects KEY=VAL, got {item:?}"))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(dt) = args.dt {
        overrides.push(("dt".into(), dt.to_string()));
    }
    if let Some(t_end) = args.t_end {
        overrides.push(("t_end".into(), t_end.to_string()));
    }
    if let Some(grid) = &args.grid {
        overrides.push(("grid".into(), grid.clone()));
    }
    if let Some(cadence) = args.cadence {
        overrides.push(("cadence".into(), cadence.to_string()));
    }
    if let Some(seed) = args.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    if let Some(out) = &args.out {
        overrides.push(("out".into(), out.display().to_string()));
    }

    let merged = apply_overrides(base, &overrides);
    let cfg = ScenarioConfig::from_pairs(&merged)?;
    execute_scenario(build_scenario(cfg)?)
}

fn execute_scenario(scenario: Scenario) -> Result<i32> {
    let Scenario { config, eq, m0 } = scenario;

    let mut diag_writer = None;
    let mut particle_writer = None;
    if let Some(dir) = &config.out {
        std::fs::create_dir_all(dir)?;
        snapshot::save_field(&dir.join("m0.snap"), &m0)?;
        let mut w = BufWriter::new(File::create(dir.join("diagnostics.csv"))?);
        diagnostics::write_csv_header(&mut w)?;
        diag_writer = Some(w);
        if config.particles > 0 {
            let mut w = BufWriter::new(File::create(dir.join("particles.csv"))?);
            lagrangian::write_particles_header(&mut w, eq.grid().ndim())?;
            particle_writer = Some(w);
        }
    }

    let flow = if config.particles > 0 {
        Some(FlowMap::seed_lattice(&m0, config.particles)?)
    } else {
        None
    };

    let stepper = StepperConfig {
        dt: config.dt,
        cfl_limit: config.cfl_limit,
        blowup_linf_threshold: config.blowup_threshold,
        dealias: config.dealias,
    };
    let run_cfg = RunConfig {
        stepper,
        t_end: config.t_end,
        cadence: config.cadence,
    };

    let n = eq.n();
    let summary = run(eq, m0, &run_cfg, flow, |state, record, flow| {
        if let Some(w) = diag_writer.as_mut() {
            diagnostics::write_csv_row(w, record)?;
        }
        if let (Some(w), Some(flow)) = (particle_writer.as_mut(), flow) {
            lagrangian::write_particles_rows(w, state.t, flow, &state.m, n)?;
        }
        Ok(())
    })?;

    if let Some(mut w) = diag_writer {
        w.flush()?;
    }
    if let Some(mut w) = particle_writer {
        w.flush()?;
    }
    if let Some(dir) = &config.out {
        snapshot::save_field(&dir.join("final.snap"), &summary.state.m)?;
    }

    let first = summary
        .records
        .first()
        .expect("at least the initial record");
    let last = summary.records.last().unwrap();
    println!(
        "equation = {}, steps = {}, t = {:.6}",
        summary.state.eq.name(),
        summary.state.step_count,
        summary.state.t
    );
    println!("final |E(f)|_inf = {:.6e}", last.reeb_f_linf);
    println!(
        "C0: {:.12e} -> {:.12e} (rel drift {:.3e})",
        first.c0,
        last.c0,
        (last.c0 - first.c0).abs() / (1.0 + first.c0.abs())
    );
    println!(
        "C1: {:.12e} -> {:.12e} (rel drift {:.3e})",
        first.c1,
        last.c1,
        (last.c1 - first.c1).abs() / (1.0 + first.c1.abs())
    );
    println!("bkm integral = {:.6e}", last.bkm_integral);
    if summary.cfl_violations > 0 {
        eprintln!(
            "warning: CFL limit exceeded on {} of {} steps",
            summary.cfl_violations, summary.state.step_count
        );
    }
    if let Some(flow) = &summary.flow {
        println!(
            "particles = {}, max |lambda| = {:.6e}",
            flow.len(),
            flow.lambdas().iter().fold(0.0f64, |m, l| m.max(l.abs()))
        );
    }

    match summary.status {
        RunStatus::Completed => {
            println!("status: completed");
            Ok(0)
        }
        RunStatus::Blowup {
            t,
            m_linf,
            bkm_integral,
        } => {
            println!(
                "status: BLOWUP at t = {t:.6}, |m|_inf = {m_linf:.3e}, \
                 ∫|E(f)|_inf dt = {bkm_integral:.6e}"
            );
            Ok(2)
        }
    }
}
