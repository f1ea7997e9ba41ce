//! Command line front end: `run`, `sweep`, `audit` and `replay`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use bhs_core::algorithms::{audit, DEFAULT_MAGIC_NUMBER};
use bhs_core::scheduler::{default_max_ticks, run_observed, Algorithm, RunOptions, Scenario, Verdict};
use bhs_core::torus::{Coord, TorusDims};
use clap::{Args, Parser, Subcommand};

use crate::harness::{sweep, SweepConfig, SweepMode};
use crate::trace::{read_trace, replay, verdict_label, write_trace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCOMPLETE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "bhs", version, about = "Black hole search on anonymous oriented tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one scenario and print its verdict.
    Run(RunArgs),
    /// Verify every (or a sample of) placement over a range of torus sizes.
    Sweep(SweepArgs),
    /// Measure how long each scheduled procedure of bhs32 runs.
    Audit(AuditArgs),
    /// Check a JSONL trace against its own scenario.
    Replay { trace: PathBuf },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    /// Torus size as `NxM` (rows x columns).
    #[arg(long, value_parser = parse_dims)]
    dims: TorusDims,
    /// Black hole as `i,j`.
    #[arg(long, value_parser = parse_coord)]
    bh: Coord,
    /// Agent starts as `i,j;i,j;...`.
    #[arg(long, value_parser = parse_coords)]
    agents: Starts,
    #[arg(long)]
    magic_number: Option<u32>,
    #[arg(long)]
    max_ticks: Option<u64>,
    /// Write the JSONL trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Allow team sizes the algorithm makes no claim for.
    #[arg(long)]
    exploratory: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    /// `A..B` for both sides, `A..BxC..D` for rows and columns separately.
    #[arg(long, value_parser = parse_dims_range)]
    dims_range: DimsRange,
    #[arg(long)]
    k: usize,
    #[arg(long, conflicts_with = "sample")]
    exhaustive: bool,
    /// Sample this many placements per torus size.
    #[arg(long, requires = "seed")]
    sample: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "BHS_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Report file; standard output when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    max_ticks: Option<u64>,
    #[arg(long)]
    magic_number: Option<u32>,
    /// Tokens per agent, for under-resourced exploratory sweeps.
    #[arg(long)]
    tokens: Option<u8>,
}

#[derive(Debug, Args)]
struct AuditArgs {
    #[arg(long, default_value_t = DEFAULT_MAGIC_NUMBER)]
    magic_number: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Starts(pub Vec<Coord>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimsRange {
    pub rows: (u16, u16),
    pub cols: (u16, u16),
}

impl DimsRange {
    pub fn dims(&self) -> Result<Vec<TorusDims>, String> {
        let mut out = Vec::new();
        for n in self.rows.0..=self.rows.1 {
            for m in self.cols.0..=self.cols.1 {
                out.push(TorusDims::new(n, m).map_err(|e| e.to_string())?);
            }
        }
        Ok(out)
    }
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|_| format!("unknown algorithm `{s}` (bhs33, bhs42, bhs32)"))
}

pub fn parse_dims(s: &str) -> Result<TorusDims, String> {
    let (n, m) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    let n: u16 = n.trim().parse().map_err(|_| format!("bad row count `{n}`"))?;
    let m: u16 = m.trim().parse().map_err(|_| format!("bad column count `{m}`"))?;
    TorusDims::new(n, m).map_err(|e| e.to_string())
}

pub fn parse_coord(s: &str) -> Result<Coord, String> {
    let (i, j) = s.split_once(',').ok_or_else(|| format!("expected i,j, got `{s}`"))?;
    let i = i.trim().parse().map_err(|_| format!("bad row `{i}`"))?;
    let j = j.trim().parse().map_err(|_| format!("bad column `{j}`"))?;
    Ok(Coord::new(i, j))
}

pub fn parse_coords(s: &str) -> Result<Starts, String> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_coord).collect::<Result<_, _>>().map(Starts)
}

fn parse_span(s: &str) -> Result<(u16, u16), String> {
    let bad = || format!("expected A..B, got `{s}`");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: u16 = a.trim().parse().map_err(|_| bad())?;
    let b: u16 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn parse_dims_range(s: &str) -> Result<DimsRange, String> {
    let r = match s.split_once(['x', 'X']) {
        Some((rows, cols)) => DimsRange { rows: parse_span(rows)?, cols: parse_span(cols)? },
        None => {
            let span = parse_span(s)?;
            DimsRange { rows: span, cols: span }
        }
    };
    r.dims()?;
    Ok(r)
}

fn exit_for(v: &Verdict) -> i32 {
    match v {
        Verdict::Success => EXIT_OK,
        Verdict::Incomplete | Verdict::Timeout => EXIT_INCOMPLETE,
        Verdict::Violation(_) => EXIT_VIOLATION,
    }
}

/// Input problems surface as usage errors, everything else as failures.
struct Usage(anyhow::Error);

fn usage<T>(r: Result<T, impl Into<anyhow::Error>>) -> Result<T, Usage> {
    r.map_err(|e| Usage(e.into()))
}

fn cmd_run(a: RunArgs, out: &mut dyn Write) -> Result<i32, Usage> {
    let mut s = if a.exploratory {
        usage(Scenario::exploratory(a.algo, a.dims, a.bh, a.agents.0))?
    } else {
        usage(Scenario::new(a.algo, a.dims, a.bh, a.agents.0))?
    };
    if let Some(d) = a.magic_number {
        s.magic_number = d;
        s.max_ticks = default_max_ticks(s.dims, d);
    }
    if let Some(t) = a.max_ticks {
        s.max_ticks = t;
    }
    let opts = RunOptions { record_trace: a.trace.is_some() };
    let r = usage(run_observed(&s, opts, &mut ()))?;
    if let Some(path) = &a.trace {
        let f = usage(File::create(path).with_context(|| format!("creating {}", path.display())))?;
        let mut w = BufWriter::new(f);
        usage(write_trace(&mut w, &s, &r))?;
        usage(w.flush())?;
    }
    let marks: Vec<String> = r.world.marked_links().map(|(c, d)| format!("{c}->{d}")).collect();
    let _ = writeln!(out, "verdict:   {}", verdict_label(&r.verdict));
    let _ = writeln!(out, "ticks:     {}", r.ticks);
    let _ = writeln!(out, "survivors: {}", r.survivors);
    let _ = writeln!(out, "destroyed: {}", r.destroyed);
    let _ = writeln!(out, "marks:     {}", if marks.is_empty() { "none".into() } else { marks.join(" ") });
    if s.exploratory {
        let _ = writeln!(out, "note:      {}", crate::harness::EXPLORATORY_LABEL);
    }
    Ok(exit_for(&r.verdict))
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<i32, Usage> {
    let mode = match (a.exhaustive, a.sample, a.seed) {
        (true, None, _) => SweepMode::Exhaustive,
        (false, Some(count), Some(seed)) => SweepMode::Sampled { count, seed },
        _ => return Err(Usage(anyhow::anyhow!("give either --exhaustive or --sample N --seed S"))),
    };
    let dims = usage(a.dims_range.dims().map_err(anyhow::Error::msg))?;
    let mut cfg = SweepConfig::new(a.algo, dims, a.k, mode);
    cfg.jobs = a.jobs;
    cfg.max_ticks = a.max_ticks;
    cfg.tokens_per_agent = a.tokens;
    if let Some(d) = a.magic_number {
        cfg.magic_number = d;
    }
    let report = usage(sweep(&cfg))?;
    let json = serde_json::to_string_pretty(&report).expect("report serialises");
    match &a.report {
        Some(path) => {
            usage(std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display())))?;
            let _ = writeln!(
                out,
                "{} scenarios, {} failures, max ticks {}, max destroyed {}",
                report.scenarios, report.failures, report.max_ticks, report.max_destroyed
            );
        }
        None => {
            let _ = writeln!(out, "{json}");
        }
    }
    if report.label.is_some() {
        eprintln!("{}", crate::harness::EXPLORATORY_LABEL);
        return Ok(EXIT_OK);
    }
    Ok(if report.clean() { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_audit(a: AuditArgs, out: &mut dyn Write) -> Result<i32, Usage> {
    let r = audit::audit();
    if a.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&r).expect("audit serialises"));
    } else {
        for p in &r.procedures {
            let _ = writeln!(out, "{:<40} {:>3} ticks", p.name, p.last_busy + 1);
        }
        let _ = writeln!(out, "{:<40} {:>3} ticks", "InitNextRing", r.init_next_ring_rounds);
        let _ = writeln!(out, "{:<40} {:>3} ticks", "InitNextRing incl. Mark-All circuits", r.init_next_ring_longest);
        let _ = writeln!(out, "minimal magic number: {}", r.minimal_magic_number);
        let _ = writeln!(out, "configured:           {}", a.magic_number);
    }
    Ok(if a.magic_number >= r.minimal_magic_number { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_replay(path: PathBuf, out: &mut dyn Write) -> Result<i32, Usage> {
    let f = usage(File::open(&path).with_context(|| format!("opening {}", path.display())))?;
    let t = usage(read_trace(BufReader::new(f)))?;
    let r = match replay(&t) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(out, "inconsistent: {e}");
            return Ok(EXIT_VIOLATION);
        }
    };
    let _ = writeln!(out, "events:             {}", t.events.len());
    let _ = writeln!(out, "recorded verdict:   {}", t.footer.verdict);
    let _ = writeln!(out, "verdict consistent: {}", r.verdict_consistent);
    let _ = writeln!(out, "matches a rerun:    {}", r.matches_rerun);
    Ok(if r.ok() { EXIT_OK } else { EXIT_VIOLATION })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    let r = match cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Audit(a) => cmd_audit(a, out),
        Command::Replay { trace } => cmd_replay(trace, out),
    };
    match r {
        Ok(code) => Ok(code),
        Err(Usage(e)) => bail!(e),
    }
}

/// Parse `args` (program name first), run the command and return the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_and_coords() {
        assert_eq!(parse_dims("4x5").unwrap(), TorusDims::new(4, 5).unwrap());
        assert!(parse_dims("2x5").is_err());
        assert!(parse_dims("4by5").is_err());
        assert_eq!(parse_coords("2,0;2,1").unwrap(), Starts(vec![Coord::new(2, 0), Coord::new(2, 1)]));
        assert!(parse_coord("1;1").is_err());
    }

    #[test]
    fn ranges() {
        let r = parse_dims_range("3..5").unwrap();
        assert_eq!(r.dims().unwrap().len(), 9);
        let r = parse_dims_range("3..4x5..5").unwrap();
        assert_eq!(r.dims().unwrap(), vec![TorusDims::new(3, 5).unwrap(), TorusDims::new(4, 5).unwrap()]);
        assert_eq!(parse_dims_range("4").unwrap().dims().unwrap().len(), 1);
        assert!(parse_dims_range("5..3").is_err());
        assert!(parse_dims_range("2..4").is_err());
    }
}
