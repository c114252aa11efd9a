//! Command-line front end: config ingestion, sweep subcommands, overlay and
//! diagnostic exports.
//!
//! Exit codes: 0 success, 1 numerical/runtime failure, 2 config error.

use clap::{Args, Parser, Subcommand};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use crate::bath;
use crate::config::{default_branches, preset, Mode, RunConfig};
use crate::ed;
use crate::error::Error;
use crate::params::effective_bath;
use crate::sweep::{self, fmt_f64, Axis};
use crate::vanvleck::{self, CorrectionPolicy};

#[derive(Parser)]
#[command(
    name = "rabispec",
    version,
    about = "Transmission spectra of a probed, driven qubit ultrastrongly coupled to a damped resonator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bias x probe-frequency transmission grid.
    Spectrum(RunArgs),
    /// Drive-amplitude maps (bias x drive or probe x drive).
    BesselMap(RunArgs),
    /// Probe x coupling map at fixed bias.
    CouplingMap(RunArgs),
    /// Doublet-gap overlay curves per (m, l) branch.
    Overlays(RunArgs),
    /// Eigenvalues and transition energies of the closed model.
    Ed(RunArgs),
    /// Bath correlation functions on the table grid.
    Qcheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset (fig2b, fig3, fig4a, fig4b, fig5a, fig5b).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Preset panel index.
    #[arg(long, requires = "preset")]
    panel: Option<usize>,
    /// Output CSV path (defaults to the config's, then rabispec-<mode>.csv).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads (overrides config and RABISPEC_WORKERS).
    #[arg(long)]
    workers: Option<usize>,
    /// Override the point count of every sweep axis (quick desk runs).
    #[arg(long)]
    points: Option<usize>,
    /// Print the resolved configuration and exit without computing.
    #[arg(long)]
    dry_run: bool,
}

enum Failure {
    Config(String),
    Runtime(String),
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        // clap exits 2 on usage errors, 0 on --help/--version
        Err(e) => e.exit(),
    };
    let (mode, args) = match &cli.cmd {
        Cmd::Spectrum(a) => (Mode::Spectrum, a),
        Cmd::BesselMap(a) => (Mode::BesselMap, a),
        Cmd::CouplingMap(a) => (Mode::CouplingMap, a),
        Cmd::Overlays(a) => (Mode::Overlays, a),
        Cmd::Ed(a) => (Mode::Ed, a),
        Cmd::Qcheck(a) => (Mode::Qcheck, a),
    };
    match execute(mode, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("rabispec: config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("rabispec: {msg}");
            ExitCode::from(1)
        }
    }
}

fn execute(mode: Mode, args: &RunArgs) -> std::result::Result<(), Failure> {
    let cfg = resolve_config(mode, args).map_err(|e| Failure::Config(e.to_string()))?;
    for w in cfg.model.warnings() {
        eprintln!("rabispec: warning: {w}");
    }
    if args.dry_run {
        println!(
            "{}",
            serde_json::to_string_pretty(&cfg).map_err(|e| Failure::Runtime(e.to_string()))?
        );
        return Ok(());
    }
    let out_path = args
        .out
        .clone()
        .or_else(|| cfg.output.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("rabispec-{}.csv", mode.as_str())));
    run_mode(mode, &cfg, &out_path).map_err(|e| Failure::Runtime(e.to_string()))?;
    eprintln!("rabispec: wrote {}", out_path.display());
    Ok(())
}

fn resolve_config(mode: Mode, args: &RunArgs) -> crate::Result<RunConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            RunConfig::from_json(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        (None, Some(name)) => preset(name, args.panel)?,
        (None, None) => {
            return Err(Error::Config("either --config or --preset is required".into()))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    if let Some(w) = args.workers {
        cfg.numerics.workers = Some(w);
    }
    if let Some(p) = args.points {
        if let Some(sweep) = cfg.sweep.as_mut() {
            sweep.axis1.points = p;
            if let Some(a2) = sweep.axis2.as_mut() {
                a2.points = p;
            }
        }
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.display().to_string());
    }
    cfg.validate(mode)?;
    cfg.mode = Some(mode);
    Ok(cfg)
}

fn run_mode(mode: Mode, cfg: &RunConfig, out: &PathBuf) -> crate::Result<()> {
    let file = std::fs::File::create(out)?;
    let mut w = BufWriter::new(file);
    match mode {
        Mode::Spectrum | Mode::BesselMap | Mode::CouplingMap => {
            let start = std::time::Instant::now();
            let grid = sweep::compute_spectrum(cfg)?;
            sweep::write_spectrum_csv(&grid, &mut w)?;
            eprintln!(
                "rabispec: {}x{} grid, {} failed points, N = {:.6e}, min |T|^2 = {:.3e}, {:.1}s",
                grid.axis1.values.len(),
                grid.axis2.values.len(),
                grid.failures.len(),
                grid.calibration,
                grid.min_t2,
                start.elapsed().as_secs_f64()
            );
        }
        Mode::Overlays => write_overlays(cfg, &mut w)?,
        Mode::Ed => write_ed(cfg, &mut w)?,
        Mode::Qcheck => write_qcheck(cfg, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn csv_header<W: Write>(w: &mut W, cfg: &RunConfig, kind: &str, columns: &str) -> crate::Result<()> {
    writeln!(w, "# rabispec {} {kind}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# config: {}", serde_json::to_string(cfg)?)?;
    writeln!(w, "# columns: {columns}")?;
    Ok(())
}

/// Doublet-gap curves `omega(eps0)` per `(m, l)` branch, with the
/// bath-renormalized tunneling when configured.  Near-resonance failures
/// are emitted as `nan` rows rather than aborting the export.
fn write_overlays<W: Write>(cfg: &RunConfig, w: &mut W) -> crate::Result<()> {
    csv_header(w, cfg, "overlays", "m,l,eps0,omega")?;
    let axis = Axis::from_spec(&cfg.sweep.as_ref().unwrap().axis1)?;
    let policy = CorrectionPolicy {
        include_second_order: cfg.numerics.corrections,
        k_max: cfg.numerics.k_max,
        p_max: cfg.numerics.p_max,
        resonance_guard: cfg.numerics.resonance_guard,
    };
    let branches = cfg
        .branches
        .clone()
        .unwrap_or_else(|| default_branches(cfg.model.eps_d));
    for b in &branches {
        let floquet = if cfg.model.eps_d != 0.0 || b.m != 0 { Some((0, b.m)) } else { None };
        for &eps0 in &axis.values {
            let omega = vanvleck::transition_frequency(
                0,
                b.l,
                floquet,
                eps0,
                &cfg.model,
                &cfg.baths,
                &policy,
                cfg.numerics.renormalize,
            )
            .unwrap_or(f64::NAN);
            writeln!(w, "{},{},{},{}", b.m, b.l, fmt_f64(eps0), fmt_f64(omega))?;
        }
    }
    Ok(())
}

fn write_ed<W: Write>(cfg: &RunConfig, w: &mut W) -> crate::Result<()> {
    csv_header(w, cfg, "ed", "eps0,level,energy,from_ground,from_first")?;
    let axis = Axis::from_spec(&cfg.sweep.as_ref().unwrap().axis1)?;
    for &eps0 in &axis.values {
        let p = crate::params::ModelParams { eps0, ..cfg.model };
        let h = ed::build_hamiltonian(&p, cfg.numerics.n_fock)?;
        let ev = ed::eigenvalues(&h);
        for (k, e) in ev.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt_f64(eps0),
                k,
                fmt_f64(*e),
                fmt_f64(e - ev[0]),
                fmt_f64(e - ev[1])
            )?;
        }
    }
    Ok(())
}

fn write_qcheck<W: Write>(cfg: &RunConfig, w: &mut W) -> crate::Result<()> {
    csv_header(w, cfg, "qcheck", "tau,q1_re,q1_im,q2_re,q2_im")?;
    let table = match (cfg.numerics.tau_max, cfg.numerics.table_points) {
        (Some(tm), Some(np)) => {
            bath::tabulate_q_total(&cfg.model, &cfg.baths, tm, np, cfg.numerics.mats_tol)?
        }
        _ => bath::tabulate_default(&cfg.model, &cfg.baths, cfg.numerics.mats_tol)?,
    };
    let eb = effective_bath(cfg.model.g, cfg.model.omega_r, cfg.baths.kappa)?;
    for tau in table.tau_grid() {
        let (r1, i1) = bath::q1(tau, cfg.baths.alpha1, cfg.baths.omega_c, cfg.baths.temp1);
        let v2 = bath::q2(tau, &eb, cfg.baths.temp2, cfg.numerics.mats_tol)?;
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(tau),
            fmt_f64(r1),
            fmt_f64(i1),
            fmt_f64(v2.re),
            fmt_f64(v2.im)
        )?;
    }
    Ok(())
}
