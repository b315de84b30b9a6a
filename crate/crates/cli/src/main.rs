//! `riccilab`: batch front end for ricci-lab.
//!
//! Exit codes: 0 on success, 2 for usage, configuration and input errors,
//! 3 for numerical failures and failed verification checks.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use ricci_lab::constants::{ConstantLedger, LedgerInputs};
use ricci_lab::flow::{run_flow, FlowConfig, FlowTrajectory, MaxQuantity, StopReason};
use ricci_lab::geometry::{Center, Pole, Region};
use ricci_lab::io::{read_profile, read_trajectory, write_scan_csv, write_trajectory};
use ricci_lab::norms::{
    alpha_threshold_scan, extension_verdict, fitted_eps_sequence, spacetime_norm, NormQuery, Quantity, ScanRow,
};
use ricci_lab::rescaling::{blowup_sequence, critical_integral_invariance, parabolic_rescale, RescaleSpec};
use ricci_lab::verify;

use config::{GeometrySpec, RunConfig};

#[derive(Parser)]
#[command(name = "riccilab", version, about = "Ricci flow experiments on spheres and warped products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a flow and write its trajectory directory.
    Simulate(SimulateArgs),
    /// α-scan of a stored trajectory as CSV.
    Norms(NormsArgs),
    /// Parabolically rescale a stored trajectory, or list its blow-up sequence.
    Rescale(RescaleArgs),
    /// Print the constant ledger.
    Constants(ConstantsArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Summarize a stored trajectory: stop reason, extension verdicts, blow-ups.
    Report(ReportArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SimulateArgs {
    /// TOML run configuration; the flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
    /// Sample the sphere as a warped profile on this many cells.
    #[arg(long)]
    cells: Option<usize>,
    /// Start from a profile file (columns `x ψ [φ]`).
    #[arg(long, conflicts_with = "cells")]
    profile: Option<PathBuf>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    ceiling: Option<f64>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct NormsArgs {
    /// Trajectory directory written by `simulate`.
    dir: PathBuf,
    /// Comma-separated exponents; `inf` selects the sup norm.
    #[arg(long, default_value = "")]
    alpha: String,
    /// Comma-separated decreasing distances to T̂; fitted to the run by default.
    #[arg(long)]
    eps_seq: Option<String>,
    #[arg(long, default_value = "R")]
    quantity: String,
    /// CSV destination; standard output by default.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct RescaleArgs {
    dir: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 0.0)]
    t_center: f64,
    /// Source-time window `a,b`; the whole run by default.
    #[arg(long)]
    window: Option<String>,
    /// Exponent of the invariance check; `(n+2)/2` by default.
    #[arg(long)]
    alpha: Option<f64>,
    /// List this many blow-up elements instead of rescaling once.
    #[arg(long)]
    blowups: Option<usize>,
    /// Directory for the rescaled trajectory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ConstantsArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 0.01)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// `(n+2)²/(2n)` by default.
    #[arg(long)]
    q: Option<f64>,
    /// `(n+2)/2` by default.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "b", default_value_t = 1.0)]
    ricci_bound: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of the suite names, or `all`.
    #[arg(default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct ReportArgs {
    dir: PathBuf,
    /// Exponents of the extension verdicts; `(n+2)/2` and `(n+2)/2 + 1/2` by default.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value_t = 4)]
    blowups: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure that maps to exit code 3.
#[derive(Debug)]
struct Numerical(String);

impl std::fmt::Display for Numerical {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Numerical {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Numerical>().is_some() {
        return 3;
    }
    match e.downcast_ref::<ricci_lab::Error>() {
        Some(ricci_lab::Error::PastSingularity { .. } | ricci_lab::Error::OutOfRange(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Norms(a) => norms(a),
        Command::Rescale(a) => rescale(a),
        Command::Constants(a) => constants(a),
        Command::Verify(a) => run_verify(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn parse_list(s: &str, what: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("bad {what} value {t:?}")))
        .collect()
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let (mut cfg, base, echo) = match &args.config {
        Some(p) => {
            let l = config::load(p)?;
            (l.config, l.base, Some(l.echo))
        }
        None => (
            RunConfig {
                geometry: GeometrySpec::Sphere {
                    n: args.n,
                    c0: args.c0,
                    cells: args.cells,
                },
                flow: FlowConfig::default(),
                scan: None,
                norm: Vec::new(),
                rescale: Vec::new(),
                out: None,
                seed: 0,
            },
            PathBuf::from("."),
            None,
        ),
    };
    if let Some(v) = args.t_max {
        cfg.flow.t_max = v;
    }
    if let Some(v) = args.ceiling {
        cfg.flow.curvature_ceiling = v;
    }
    if let Some(v) = args.stride {
        cfg.flow.output_stride = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    let out = args.out.or(cfg.out.as_ref().map(|o| base.join(o))).ok_or_else(|| anyhow!("no output directory: pass --out"))?;
    if let (Some(m), GeometrySpec::Sphere { cells, .. }) = (args.cells, &mut cfg.geometry) {
        *cells = Some(m);
    }
    let initial = match &args.profile {
        Some(p) => read_profile(p, args.n)?,
        None => cfg.geometry.build(&base)?,
    };

    let traj = run_flow(&initial, &cfg.flow)?;
    let mut echo = echo.unwrap_or_default();
    echo.insert("seed".into(), toml::Value::Integer(cfg.seed as i64));
    write_trajectory(&out, &traj, Some(echo))?;
    match traj.t_hat() {
        Some(t) => println!("T_hat = {t}"),
        None => println!("T_hat = none"),
    }
    println!("singular = {}", traj.singular());
    println!("stop = {}", traj.stop_reason());
    println!("t_end = {}", traj.t_end());
    println!("snapshots = {}", traj.len());
    println!("wrote {}", out.display());
    if traj.stop_reason() == StopReason::NumericalBlowup {
        return Err(Numerical(format!("the flow blew up numerically at t = {}", traj.t_end())).into());
    }

    if let Some(scan) = &cfg.scan {
        let eps = match &scan.eps {
            Some(e) => e.clone(),
            None => fitted_eps_sequence(&traj)?,
        };
        let rows = alpha_threshold_scan(&traj, scan.quantity.parse()?, &scan.alphas, &eps)?;
        let path = out.join("scan.csv");
        write_scan_csv(output(Some(&path))?, &rows)?;
        println!("wrote {}", path.display());
    }
    if !cfg.norm.is_empty() {
        let path = out.join("norms.csv");
        let mut w = csv::Writer::from_writer(output(Some(&path))?);
        w.write_record(["quantity", "alpha", "t0", "t1", "norm"])?;
        for spec in &cfg.norm {
            let interval = spec.interval.map_or((traj.t_start(), traj.t_end()), |[a, b]| (a, b));
            let q = NormQuery::new(spec.quantity.parse()?, spec.alpha, Region::Whole, interval);
            let v = spacetime_norm(&traj, &q)?;
            w.serialize((q.quantity.name(), spec.alpha, interval.0, interval.1, v))?;
        }
        w.flush()?;
        println!("wrote {}", path.display());
    }
    for (i, r) in cfg.rescale.iter().enumerate() {
        let alpha = r.alpha.unwrap_or((traj.n() as f64 + 2.0) / 2.0);
        let dir = out.join(format!("rescale_{i:02}"));
        rescale_once(&traj, r.q, r.t_center, (r.window[0], r.window[1]), alpha, Some(&dir))?;
    }
    Ok(())
}

fn print_scan_summary(mut w: impl Write, rows: &[ScanRow]) -> std::io::Result<()> {
    writeln!(w, "{:>8}  {:<16}  {:>10}  {:>14}", "alpha", "classification", "exponent", "limit")?;
    for r in rows {
        let limit = r.limit.map_or("-".to_string(), |l| format!("{l:.8e}"));
        writeln!(w, "{:>8}  {:<16}  {:>10.5}  {:>14}", r.alpha, r.classification.name(), r.exponent, limit)?;
    }
    Ok(())
}

fn norms(args: NormsArgs) -> anyhow::Result<()> {
    let traj = read_trajectory(&args.dir)?;
    let alphas = parse_list(&args.alpha, "α")?;
    let quantity: Quantity = args.quantity.parse()?;
    let eps = match &args.eps_seq {
        Some(s) => parse_list(s, "ε")?,
        None => fitted_eps_sequence(&traj)?,
    };
    let rows = alpha_threshold_scan(&traj, quantity, &alphas, &eps)?;
    write_scan_csv(output(args.out.as_deref())?, &rows)?;
    if args.out.is_some() {
        print_scan_summary(std::io::stdout().lock(), &rows)?;
    } else {
        print_scan_summary(std::io::stderr().lock(), &rows)?;
    }
    Ok(())
}

fn rescale_once(
    traj: &FlowTrajectory,
    q: f64,
    t_center: f64,
    window: (f64, f64),
    alpha: f64,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let spec = RescaleSpec::new(q, t_center, Center::Pole(Pole::North))?;
    let inv = critical_integral_invariance(traj, &spec, window, alpha)?;
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(["q", "t_center", "t0", "t1", "alpha", "before", "after", "ratio", "predicted_ratio", "relative_diff"])?;
    w.serialize((q, t_center, window.0, window.1, alpha, inv.before, inv.after, inv.ratio, inv.predicted_ratio, inv.relative_diff))?;
    w.flush()?;
    if let Some(dir) = out {
        let image = parabolic_rescale(traj, &spec, (spec.target_time(window.0), spec.target_time(window.1)))?;
        write_trajectory(dir, &image, None)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}

fn rescale(args: RescaleArgs) -> anyhow::Result<()> {
    let traj = read_trajectory(&args.dir)?;
    if let Some(count) = args.blowups {
        let seq = blowup_sequence(&traj, count, MaxQuantity::Scalar)?;
        for warning in &seq.warnings {
            eprintln!("warning: {warning}");
        }
        let mut w = csv::Writer::from_writer(output(args.out.map(|d| d.join("blowups.csv")).as_deref())?);
        w.write_record(["i", "t", "x", "q", "max_r", "normalized", "ric_lower_bound", "ric_min", "anchor_r", "critical_integral", "kappa"])?;
        for (i, e) in seq.elements.iter().enumerate() {
            w.serialize((
                i,
                e.anchor.t,
                e.anchor.x,
                e.anchor.q,
                e.max_r,
                e.normalized,
                e.ric_lower_bound,
                e.ric_min,
                e.anchor_r,
                e.critical_integral,
                e.kappa,
            ))?;
        }
        w.flush()?;
        return Ok(());
    }
    let window = match &args.window {
        Some(s) => match parse_list(s, "window")?[..] {
            [a, b] => (a, b),
            _ => bail!("--window takes two comma-separated times"),
        },
        None => (traj.t_start(), traj.t_end()),
    };
    let alpha = args.alpha.unwrap_or((traj.n() as f64 + 2.0) / 2.0);
    rescale_once(&traj, args.q, args.t_center, window, alpha, args.out.as_deref())
}

fn constants(args: ConstantsArgs) -> anyhow::Result<()> {
    let mut inputs = LedgerInputs::new(args.n, args.kappa, args.r);
    inputs.b = args.ricci_bound;
    if let Some(q) = args.q {
        inputs.q = q;
    }
    if let Some(beta) = args.beta {
        inputs.beta = beta;
    }
    let text = ConstantLedger::build(inputs)?.report();
    print!("{text}");
    if let Some(p) = &args.out {
        fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn run_verify(args: VerifyArgs) -> anyhow::Result<()> {
    let outcomes = verify::run_suite(&args.suite, args.seed)?;
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        return Err(Numerical(format!("{failed} checks failed")).into());
    }
    Ok(())
}

fn report(args: ReportArgs) -> anyhow::Result<()> {
    let traj = read_trajectory(&args.dir)?;
    let threshold = (traj.n() as f64 + 2.0) / 2.0;
    let alphas = match &args.alpha {
        Some(s) => parse_list(s, "α")?,
        None => vec![threshold, threshold + 0.5],
    };
    let mut out = String::new();
    out.push_str(&format!("trajectory  {}\n", args.dir.display()));
    out.push_str(&format!("dimension   {}\n", traj.n()));
    out.push_str(&format!("snapshots   {} over [{}, {}]\n", traj.len(), traj.t_start(), traj.t_end()));
    out.push_str(&format!("stop        {}\n", traj.stop_reason()));
    out.push_str(&format!("T_hat       {}\n", traj.t_hat().map_or("none".into(), |t| t.to_string())));
    let peak = traj.curvatures().last().map_or(f64::NAN, |k| k.max_rm());
    out.push_str(&format!("final |Rm|  {peak}\n"));

    out.push_str("\nextension verdicts\n");
    for alpha in alphas {
        match extension_verdict(&traj, alpha) {
            Ok(v) => out.push_str(&format!(
                "  α = {alpha}: {} (consistent: {}, Ric ≥ −{:.3e})\n",
                v.conclusion, v.consistent, v.a
            )),
            Err(e) => out.push_str(&format!("  α = {alpha}: {e}\n")),
        }
    }

    if traj.singular() && args.blowups > 0 {
        out.push_str("\nblow-up sequence\n");
        match blowup_sequence(&traj, args.blowups, MaxQuantity::Scalar) {
            Ok(seq) => {
                for (i, e) in seq.elements.iter().enumerate() {
                    out.push_str(&format!(
                        "  {i}: t = {:.6e}, Q = {:.4e}, κ = {:.5}, critical integral = {:.5e}\n",
                        e.anchor.t, e.anchor.q, e.kappa, e.critical_integral
                    ));
                }
                for w in seq.warnings {
                    out.push_str(&format!("  skipped: {w}\n"));
                }
            }
            Err(e) => out.push_str(&format!("  {e}\n")),
        }
    }
    print!("{out}");
    if let Some(p) = &args.out {
        fs::write(p, &out).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}
