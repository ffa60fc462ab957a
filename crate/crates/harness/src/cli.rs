//! Command-line surface. Exit codes: 0 success or pass, 1 property failure,
//! 2 usage or input error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use bhs_core::algo::{Algo, AlgorithmId};
use bhs_core::checker::{matrix_cells, CellResult, HorizonRule, MatrixReport, Outcome, DEFAULT_MEMO_CAP};
use bhs_core::comm::CommKind;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::diagram::render_diagram;
use crate::error::{HarnessError, Result};
use crate::fit::fit_csv;
use crate::runner::{execute, replay_config, RunConfig};
use crate::schedule;
use crate::sweep::{sweep, write_csv, BhSpec, Grid};
use crate::trace::read_trace_file;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "bhs", about = "Black hole search on dynamic rings: simulate, sweep, verify, plot")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run one simulation until every agent is done or the horizon.
    Run(RunArgs),
    /// Run a grid of simulations and write a CSV.
    Sweep(SweepArgs),
    /// Verify over every adversary schedule.
    Check(CheckArgs),
    /// Fit a power law to two CSV columns.
    Fit(FitArgs),
    /// Render a trace as an SVG space-time diagram.
    Diagram(DiagramArgs),
    /// Re-run a trace from its recorded schedule and compare.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_parser = parse_algo)]
    algo: AlgorithmId,
    #[arg(long, value_parser = parse_comm)]
    comm: Option<CommKind>,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    bh: u32,
    /// One node for a colocated team, else one per agent.
    #[arg(long, value_delimiter = ',')]
    starts: Option<Vec<u32>>,
    /// NAME[:param]; `scripted:PATH` replays a schedule file.
    #[arg(long, default_value = "static")]
    adversary: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    horizon: Option<u64>,
    /// Write the JSONL trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_algo, required = true)]
    algo: Vec<AlgorithmId>,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<u32>,
    /// Node, `n/4`-style fraction, or `all`.
    #[arg(long, value_delimiter = ',', value_parser = parse_bh, default_value = "n/2")]
    bh: Vec<BhSpec>,
    #[arg(long, value_delimiter = ',', default_value = "static")]
    adversary: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seed: Vec<u64>,
    #[arg(long, value_parser = parse_comm)]
    comm: Option<CommKind>,
    #[arg(long)]
    horizon: Option<u64>,
    /// Keep only the worst row per algorithm, n and seed.
    #[arg(long)]
    worst: bool,
    #[arg(long)]
    jobs: Option<usize>,
    /// CSV destination; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, value_parser = parse_algo)]
    algo: AlgorithmId,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<u32>,
    /// Every black hole position if absent.
    #[arg(long)]
    bh: Option<u32>,
    /// Every placement if absent.
    #[arg(long, value_delimiter = ',')]
    starts: Option<Vec<u32>>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_MEMO_CAP)]
    cap: u64,
    /// Pendulum without its Retroguard.
    #[arg(long)]
    two_agent: bool,
    #[arg(long)]
    jobs: Option<usize>,
    /// Write the first counterexample schedule here (elect choices go to
    /// PATH.elect).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value = "n")]
    x: String,
    #[arg(long, default_value = "rounds")]
    y: String,
    /// `column=value` filter; repeatable.
    #[arg(long = "where", value_parser = parse_filter)]
    filters: Vec<(String, String)>,
}

#[derive(Args, Debug)]
struct DiagramArgs {
    #[arg(long)]
    trace: PathBuf,
    /// SVG destination; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[arg(long)]
    trace: PathBuf,
    /// Write the replayed trace here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_algo(s: &str) -> std::result::Result<AlgorithmId, String> {
    AlgorithmId::parse(s).ok_or_else(|| format!("unknown algorithm {s:?} (cp, cdo, gl)"))
}

fn parse_comm(s: &str) -> std::result::Result<CommKind, String> {
    CommKind::parse(s).ok_or_else(|| format!("unknown model {s:?} (vision, f2f, pebble, whiteboard)"))
}

fn parse_bh(s: &str) -> std::result::Result<BhSpec, String> {
    BhSpec::parse(s).ok_or_else(|| format!("bad black hole spec {s:?}"))
}

fn parse_filter(s: &str) -> std::result::Result<(String, String), String> {
    s.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())).ok_or_else(|| format!("expected column=value, got {s:?}"))
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Cmd::Run(a) => run(a, out),
        Cmd::Sweep(a) => sweep_cmd(a, out),
        Cmd::Check(a) => check(a, out),
        Cmd::Fit(a) => {
            let f = fit_csv(&a.csv, &a.x, &a.y, &a.filters)?;
            writeln!(out, "slope={:.6} intercept={:.6} residual={:.6} points={}", f.slope, f.intercept, f.residual, f.points)?;
            Ok(EXIT_OK)
        }
        Cmd::Diagram(a) => {
            let svg = render_diagram(&read_trace_file(&a.trace)?);
            match a.out {
                Some(p) => std::fs::write(p, svg)?,
                None => out.write_all(svg.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
        Cmd::Replay(a) => replay(a, out),
    }
}

fn run(a: RunArgs, out: &mut dyn Write) -> Result<i32> {
    let mut cfg = RunConfig::new(a.algo, a.n, a.bh);
    cfg.comm = a.comm;
    cfg.starts = a.starts;
    cfg.seed = a.seed;
    cfg.horizon = a.horizon;
    let cfg = cfg.with_adversary(&a.adversary)?;
    let report = match &a.trace {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            execute(&cfg, Some(&mut w))?
        }
        None => execute(&cfg, None)?,
    };
    if let Some(p) = a.out {
        std::fs::write(p, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    writeln!(
        out,
        "verdict={} rounds={} termination={} moves={} answers={}",
        report.verdict,
        report.rounds,
        report.termination_round.map_or("-".into(), |r| r.to_string()),
        report.moves,
        report.answers.iter().map(|x| format!("{}@{}", x.node, x.round)).collect::<Vec<_>>().join(",")
    )?;
    Ok(if report.verdict == "correct" { EXIT_OK } else { EXIT_FAIL })
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::usage(e.to_string()))
}

fn sweep_cmd(a: SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let grid = Grid {
        algos: a.algo,
        ns: a.n,
        bhs: a.bh,
        adversaries: a.adversary,
        seeds: a.seed,
        comm: a.comm,
        horizon: a.horizon,
        worst: a.worst,
    };
    let rows = pool(a.jobs)?.install(|| sweep(&grid));
    match a.out {
        Some(p) => write_csv(&rows, File::create(p)?)?,
        None => write_csv(&rows, &mut *out)?,
    }
    Ok(EXIT_OK)
}

fn check(a: CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let two = a.two_agent;
    if two && a.algo != AlgorithmId::Cp {
        return Err(HarnessError::usage("--two-agent applies to cp only"));
    }
    let algo_of = |n| if two { Algo::two_agent_cp(n) } else { Algo::new(a.algo, n) };
    let cells: Vec<_> = matrix_cells(algo_of, &a.n)
        .into_iter()
        .filter(|c| a.bh.is_none_or(|b| b == c.bh))
        .filter(|c| a.starts.as_ref().is_none_or(|s| *s == c.starts))
        .collect();
    if cells.is_empty() {
        return Err(HarnessError::usage("no instance matches"));
    }
    let rule = a.horizon.map_or(HorizonRule::Default, HorizonRule::Fixed);
    let report = MatrixReport {
        cells: pool(a.jobs)?.install(|| {
            cells.into_par_iter().map(|cell| CellResult { result: cell.check(rule, a.cap), cell }).collect()
        }),
    };
    let mut saved = false;
    for c in &report.cells {
        let starts: Vec<String> = c.cell.starts.iter().map(|s| s.to_string()).collect();
        write!(out, "{} n={} bh={} starts={}: ", a.algo.name(), c.cell.algo.n, c.cell.bh, starts.join(","))?;
        match &c.result {
            Err(e) => writeln!(out, "error {e}")?,
            Ok(v) => match &v.outcome {
                Outcome::Pass { worst_rounds } => {
                    writeln!(out, "pass worst={worst_rounds} explored={} horizon={}", v.explored, v.horizon)?
                }
                Outcome::Fail(cx) | Outcome::HorizonExceeded(cx) => {
                    writeln!(
                        out,
                        "{} property={} round={} explored={} horizon={}",
                        v.outcome.name(),
                        cx.property.name(),
                        cx.round,
                        v.explored,
                        v.horizon
                    )?;
                    if let (Some(p), false) = (&a.out, saved) {
                        schedule::save(p, &cx.schedule, &cx.elect)?;
                        saved = true;
                    }
                }
            },
        }
    }
    let worst: Vec<String> = report.worst_by_n().iter().map(|(n, w)| format!("n={n}:{w}")).collect();
    writeln!(out, "passed {}/{} worst {}", report.passed(), report.cells.len(), worst.join(" "))?;
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_FAIL })
}

fn replay(a: ReplayArgs, out: &mut dyn Write) -> Result<i32> {
    let original = std::fs::read(&a.trace)?;
    let trace = read_trace_file(&a.trace)?;
    let cfg = replay_config(&trace)?;
    let mut buf = Vec::new();
    execute(&cfg, Some(&mut buf))?;
    if let Some(p) = a.out {
        std::fs::write(p, &buf)?;
    }
    if buf == original {
        writeln!(out, "identical: {} rounds", trace.rounds.len())?;
        return Ok(EXIT_OK);
    }
    let line = original
        .split(|&b| b == b'\n')
        .zip(buf.split(|&b| b == b'\n'))
        .position(|(x, y)| x != y)
        .map_or_else(|| original.len().min(buf.len()), |i| i + 1);
    writeln!(out, "diverges at line {line}")?;
    Ok(EXIT_FAIL)
}
