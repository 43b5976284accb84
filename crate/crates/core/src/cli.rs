//! `cavx` command line: `simulate`, `pareto` and `plan`.
//!
//! Exit codes: 0 success with a clean audit, 1 audit findings, 2 usage,
//! configuration or I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cz::{check_feasibility, solve_cz};
use crate::error::{Error, Result};
use crate::geometry::{Movement, Turn};
use crate::io::{self, fmt_num, RunManifest, CONFIG_ENV};
use crate::mz::{
    mz_costs, solve_mz_fuel, solve_mz_jerk, solve_mz_weighted_capped, MzBoundary, MzTrajectory,
};
use crate::pareto::{default_grid, sweep};
use crate::scheduler::{feasibility_bound, VehicleSpec};
use crate::sim::{self, SimConfig, Zone};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cavx",
    version,
    about = "Signal-free intersection coordination"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the randomised intersection experiment and audit it.
    Simulate(SimulateArgs),
    /// Sweep the merging-zone weight for one movement.
    Pareto(ParetoArgs),
    /// Plan a single vehicle and print its coefficients and costs.
    Plan(PlanArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// TOML config; falls back to $CAVX_CONFIG, then built-in defaults.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
}

impl ConfigArg {
    pub fn load(&self) -> Result<SimConfig> {
        let path = self
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        match path {
            Some(p) => io::load_config(&p),
            None => Ok(SimConfig::default()),
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ParetoArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Turn whose merging-zone boundary is swept.
    #[arg(long, value_enum, default_value = "left")]
    pub turn: TurnArg,
    /// `log:N` for N log-odds spaced weights, or a comma separated list.
    #[arg(long, default_value = "log:50")]
    pub grid: String,
    #[arg(long, short, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TurnArg {
    Left,
    Straight,
    Right,
}

impl From<TurnArg> for Turn {
    fn from(t: TurnArg) -> Turn {
        match t {
            TurnArg::Left => Turn::Left,
            TurnArg::Straight => Turn::Straight,
            TurnArg::Right => Turn::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Fuel,
    Jerk,
    Weighted,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long)]
    pub v0: f64,
    /// Movement such as `W-left`.
    #[arg(long)]
    pub movement: Movement,
    /// Merging-zone entry time.
    #[arg(long)]
    pub tm: f64,
    /// Merging-zone exit time; defaults to `tm` plus the turn time.
    #[arg(long)]
    pub tf: Option<f64>,
    /// Terminal speed; defaults to the movement's merging-zone speed.
    #[arg(long)]
    pub vm: Option<f64>,
    #[arg(long, value_enum, default_value = "jerk")]
    pub objective: ObjectiveArg,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long, short, default_value = "plan.csv")]
    pub out: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_CLEAN
            };
        }
    };
    let res = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Pareto(a) => cmd_pareto(a, stdout),
        Command::Plan(a) => cmd_plan(a, stdout, stderr),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let mut cfg = a.config.load()?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let run = sim::run(&cfg)?;
    io::write_sim_outputs(&a.out, &run)?;
    let hist = run
        .binding_histogram()
        .into_iter()
        .map(|(c, n)| format!("{}={n}", c.label()))
        .collect::<Vec<_>>()
        .join(" ");
    writeln!(
        stdout,
        "{} vehicles, seed {}, binding cases: {hist}",
        run.records.len(),
        cfg.seed
    )?;
    writeln!(
        stdout,
        "bound violations on {} vehicles; audit findings: {}",
        run.infeasible_vehicles(),
        run.audit.findings.len()
    )?;
    writeln!(stdout, "outputs written to {}", a.out.display())?;
    Ok(if run.audit.is_clean() {
        EXIT_CLEAN
    } else {
        EXIT_FINDINGS
    })
}

/// Parses a grid spec: `log:N` or a comma separated list of weights.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if let Some(n) = spec.strip_prefix("log:") {
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Error::config("grid", format!("bad point count in `{spec}`")))?;
        if n == 0 {
            return Err(Error::config("grid", "needs at least one point"));
        }
        return Ok(default_grid(n, 1e-3));
    }
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::config("grid", format!("`{s}` is not a number")))
        })
        .collect()
}

/// Merging-zone boundary of a turn with entry at `t = 0`, terminal speeds
/// at the movement's limit and zero endpoint accelerations.
pub fn turn_boundary(cfg: &SimConfig, turn: Turn) -> Result<MzBoundary> {
    let g = &cfg.geometry;
    let m = Movement::new(crate::geometry::Arm::West, turn);
    let v = g.mz_exit_speed(m);
    Ok(MzBoundary {
        tm: 0.0,
        tf: g.turn_time(m)?,
        vm: v,
        vf: v,
        p_start: g.control_zone_length,
        p_end: g.control_zone_length + g.path_length(m),
        u_start: 0.0,
        u_end: 0.0,
    })
}

pub fn cmd_pareto(a: &ParetoArgs, stdout: &mut dyn Write) -> Result<i32> {
    let cfg = a.config.load()?;
    let grid = parse_grid(&a.grid)?;
    let b = turn_boundary(&cfg, a.turn.into())?;
    let (q1, q2) = cfg.normalisation();
    let run = sweep(&b, &grid, q1, q2).map_err(|e| match e {
        Error::Sweep { w, source } if !(w > 0.0 && w < 1.0) => Error::config(
            "grid",
            format!("{source}; weights must lie strictly inside (0, 1)"),
        ),
        e => e,
    })?;
    fs::create_dir_all(&a.out)?;
    io::write_pareto(fs::File::create(a.out.join("pareto.csv"))?, &run)?;
    RunManifest::new("pareto", &cfg, &["pareto.csv", "manifest.json"]).write(&a.out)?;
    writeln!(
        stdout,
        "{} weights, {} on the frontier; written to {}",
        run.points.len(),
        run.frontier.len(),
        a.out.join("pareto.csv").display()
    )?;
    Ok(EXIT_CLEAN)
}

fn print_coefficients(out: &mut dyn Write, mz: &MzTrajectory) -> Result<()> {
    match mz {
        MzTrajectory::FuelOnly(l) => {
            let [a, b, c, d] = l.absolute_coefficients();
            writeln!(
                out,
                "mz fuel-only: u = a t + b; a={} b={} c={} d={}",
                fmt_num(a),
                fmt_num(b),
                fmt_num(c),
                fmt_num(d)
            )?;
        }
        MzTrajectory::JerkOnly(q) => {
            let c: Vec<String> = q.coef.iter().map(|&x| fmt_num(x)).collect();
            writeln!(out, "mz jerk-only quintic (a..f, t - tm): {}", c.join(" "))?;
        }
        MzTrajectory::Weighted(wp) => {
            let e = wp.exponential_form();
            writeln!(
                out,
                "mz weighted w={}: a={} b={} c={} d={} e={} f={} A1={}",
                fmt_num(wp.w),
                fmt_num(e.a),
                fmt_num(e.b),
                fmt_num(e.c),
                fmt_num(e.d),
                fmt_num(e.e),
                fmt_num(e.f),
                fmt_num(e.rate)
            )?;
        }
    }
    Ok(())
}

pub fn cmd_plan(a: &PlanArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let cfg = a.config.load()?;
    let g = &cfg.geometry;
    let m = a.movement;
    if !(a.tm > a.t0) {
        return Err(Error::config("tm", format!("must exceed t0 = {}", a.t0)));
    }
    let spec = VehicleSpec {
        id: 1,
        t0: a.t0,
        v0: a.v0,
        movement: m,
    };
    let delta = match a.tf {
        Some(tf) if tf > a.tm => tf - a.tm,
        Some(_) => return Err(Error::config("tf", "must exceed tm")),
        None => g.turn_time(m)?,
    };
    let earliest = feasibility_bound(&spec, g);
    let tm = if a.tm < earliest {
        writeln!(
            stderr,
            "warning: tm = {} is earlier than the feasibility bound {}; planning at the bound",
            fmt_num(a.tm),
            fmt_num(earliest)
        )?;
        earliest
    } else {
        a.tm
    };
    let tf = tm + delta;
    let vm = a.vm.unwrap_or_else(|| g.mz_exit_speed(m));
    let cz = solve_cz(a.t0, a.v0, tm, vm, g.control_zone_length)?;
    let b = MzBoundary {
        tm,
        tf,
        vm,
        vf: vm,
        p_start: g.control_zone_length,
        p_end: g.control_zone_length + g.path_length(m),
        u_start: cz.control(tm),
        u_end: cfg.terminal_accel,
    };
    let (q1, q2) = cfg.normalisation();
    let mz = match (a.objective, a.w) {
        (ObjectiveArg::Fuel, _) => solve_mz_fuel(&b)?,
        (ObjectiveArg::Jerk, _) => solve_mz_jerk(&b)?,
        (ObjectiveArg::Weighted, Some(w)) => {
            solve_mz_weighted_capped(&b, w, q1, q2, cfg.exponent_cap)?
        }
        (ObjectiveArg::Weighted, None) => {
            return Err(Error::config("w", "required with --objective weighted"))
        }
    };
    let [ca, cb, cc, cd] = cz.profile.absolute_coefficients();
    writeln!(
        stdout,
        "movement {m}, t0={} v0={} tm={} tf={} vm={}",
        fmt_num(a.t0),
        fmt_num(a.v0),
        fmt_num(tm),
        fmt_num(tf),
        fmt_num(vm)
    )?;
    writeln!(
        stdout,
        "cz: u = a t + b; a={} b={} c={} d={}",
        fmt_num(ca),
        fmt_num(cb),
        fmt_num(cc),
        fmt_num(cd)
    )?;
    writeln!(stdout, "cz cost 0.5*int u^2 = {}", fmt_num(cz.cost()))?;
    print_coefficients(stdout, &mz)?;
    let costs = mz_costs(&mz, q1, q2);
    writeln!(
        stdout,
        "mz fuel={} discomfort={} weighted={}",
        fmt_num(costs.fuel),
        fmt_num(costs.discomfort),
        fmt_num(costs.weighted)
    )?;
    let report = check_feasibility(&cz, g, None);
    if report.is_feasible() {
        writeln!(stdout, "cz bounds: ok")?;
    } else {
        for v in &report.violations {
            writeln!(
                stdout,
                "cz bounds: {:?} at t={} value={} limit={}",
                v.kind,
                fmt_num(v.time),
                fmt_num(v.value),
                fmt_num(v.limit)
            )?;
        }
    }
    write_plan_table(&a.out, &cz, &mz, cfg.sample_step)?;
    Ok(EXIT_CLEAN)
}

fn write_plan_table(
    path: &Path,
    cz: &crate::cz::CzTrajectory,
    mz: &MzTrajectory,
    step: f64,
) -> Result<()> {
    let (t0, tm) = (cz.t0(), cz.tm());
    let tf = mz.window().1;
    let mut times: Vec<f64> = vec![t0, tm, tf];
    let (k0, k1) = ((t0 / step).ceil() as i64, (tf / step).floor() as i64);
    times.extend(
        (k0..=k1)
            .map(|k| k as f64 * step)
            .filter(|&t| t >= t0 && t <= tf),
    );
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "zone", "p", "v", "u", "j"])?;
    for t in times {
        let (zone, p, v, u, j) = if t < tm {
            (
                Zone::Control,
                cz.position(t),
                cz.speed(t),
                cz.control(t),
                cz.profile.jerk(t),
            )
        } else {
            (
                Zone::Merging,
                mz.position(t),
                mz.speed(t),
                mz.control(t),
                mz.jerk(t),
            )
        };
        w.write_record([
            fmt_num(t),
            zone.label().to_owned(),
            fmt_num(p),
            fmt_num(v),
            fmt_num(u),
            fmt_num(j),
        ])?;
    }
    w.flush()?;
    Ok(())
}
