//! JSONL traces.
//!
//! Line 1 holds the scenario, then one line per event, then a closing line
//! with the verdict. Every event line has the fields `tick`, `kind`, `agent`,
//! `pos` (`[i, j]`), `dir` and `count`; declarations and phase changes also
//! carry `detail`.

use std::io::{BufRead, Write};

use bhs_core::agent::{Declaration, Phase};
use bhs_core::scheduler::{run_observed, AgentStatus, EventKind, RunOptions, RunResult, Scenario, TraceEvent, Verdict};
use bhs_core::torus::{Coord, Direction, World};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("trace is empty or lacks its closing line")]
    Truncated,
    #[error("run was recorded without a trace")]
    NotRecorded,
    #[error("line {line}: {msg}")]
    Inconsistent { line: usize, msg: String },
    #[error(transparent)]
    Scenario(#[from] bhs_core::ScenarioError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Moved,
    Put,
    Pick,
    Marked,
    Destroyed,
    Met,
    Declared,
    Phase,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventLine {
    pub tick: u64,
    pub kind: Kind,
    pub agent: u8,
    pub pos: [u16; 2],
    pub dir: Option<Direction>,
    pub count: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub scenario: Scenario,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Footer {
    pub verdict: String,
    pub ticks: u64,
    pub survivors: u8,
    pub destroyed: u8,
}

/// Short verdict label used in traces and summaries.
pub fn verdict_label(v: &Verdict) -> String {
    match v {
        Verdict::Success => "success".into(),
        Verdict::Incomplete => "incomplete".into(),
        Verdict::Timeout => "timeout".into(),
        Verdict::Violation(k) => format!("violation: {k}"),
    }
}

impl From<&TraceEvent> for EventLine {
    fn from(e: &TraceEvent) -> EventLine {
        let (kind, dir, count, detail) = match e.kind {
            EventKind::Moved(d) => (Kind::Moved, Some(d), None, None),
            EventKind::PutTokens(s) => (Kind::Put, None, Some(s), None),
            EventKind::PickedTokens(s) => (Kind::Pick, None, Some(s), None),
            EventKind::Marked(d) => (Kind::Marked, Some(d), None, None),
            EventKind::Destroyed(d) => (Kind::Destroyed, Some(d), None, None),
            EventKind::Met => (Kind::Met, None, None, None),
            EventKind::Declared(d) => (Kind::Declared, None, None, Some(format!("{d:?}"))),
            EventKind::PhaseEntered(p) => (Kind::Phase, None, None, Some(format!("{p:?}"))),
        };
        EventLine { tick: e.tick, kind, agent: e.agent, pos: [e.pos.i, e.pos.j], dir, count, detail }
    }
}

fn parse_detail<T: for<'de> Deserialize<'de>>(line: usize, detail: &Option<String>) -> Result<T, TraceError> {
    let d = detail.as_deref().ok_or_else(|| TraceError::Inconsistent { line, msg: "missing detail".into() })?;
    serde_json::from_value(serde_json::Value::String(d.to_string())).map_err(|source| TraceError::Json { line, source })
}

impl EventLine {
    fn to_event(&self, line: usize) -> Result<TraceEvent, TraceError> {
        let need_dir = || self.dir.ok_or_else(|| TraceError::Inconsistent { line, msg: "missing dir".into() });
        let need_count = || self.count.ok_or_else(|| TraceError::Inconsistent { line, msg: "missing count".into() });
        let kind = match self.kind {
            Kind::Moved => EventKind::Moved(need_dir()?),
            Kind::Put => EventKind::PutTokens(need_count()?),
            Kind::Pick => EventKind::PickedTokens(need_count()?),
            Kind::Marked => EventKind::Marked(need_dir()?),
            Kind::Destroyed => EventKind::Destroyed(need_dir()?),
            Kind::Met => EventKind::Met,
            Kind::Declared => EventKind::Declared(parse_detail::<Declaration>(line, &self.detail)?),
            Kind::Phase => EventKind::PhaseEntered(parse_detail::<Phase>(line, &self.detail)?),
        };
        Ok(TraceEvent { tick: self.tick, agent: self.agent, pos: Coord::new(self.pos[0], self.pos[1]), kind })
    }
}

/// A parsed trace file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub scenario: Scenario,
    pub events: Vec<TraceEvent>,
    pub footer: Footer,
}

/// Write a recorded run as JSONL.
pub fn write_trace(out: &mut impl Write, scenario: &Scenario, result: &RunResult) -> Result<(), TraceError> {
    let events = result.trace.as_ref().ok_or(TraceError::NotRecorded)?;
    let json = |e: serde_json::Error| TraceError::Io(e.into());
    serde_json::to_writer(&mut *out, &Header { scenario: scenario.clone() }).map_err(json)?;
    writeln!(out)?;
    for e in events {
        serde_json::to_writer(&mut *out, &EventLine::from(e)).map_err(json)?;
        writeln!(out)?;
    }
    let footer = Footer {
        verdict: verdict_label(&result.verdict),
        ticks: result.ticks,
        survivors: result.survivors,
        destroyed: result.destroyed,
    };
    serde_json::to_writer(&mut *out, &footer).map_err(json)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_trace(input: impl BufRead) -> Result<Trace, TraceError> {
    let lines: Vec<String> = input.lines().collect::<Result<_, _>>()?;
    let lines: Vec<(usize, &String)> = lines.iter().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty()).collect();
    let [(hl, head), body @ .., (fl, foot)] = lines.as_slice() else {
        return Err(TraceError::Truncated);
    };
    let header: Header = serde_json::from_str(head).map_err(|source| TraceError::Json { line: *hl, source })?;
    let footer: Footer = serde_json::from_str(foot).map_err(|source| TraceError::Json { line: *fl, source })?;
    let mut events = Vec::with_capacity(body.len());
    for (line, text) in body {
        let e: EventLine = serde_json::from_str(text).map_err(|source| TraceError::Json { line: *line, source })?;
        events.push(e.to_event(*line)?);
    }
    Ok(Trace { scenario: header.scenario, events, footer })
}

/// Outcome of replaying a trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replay {
    pub world: World,
    pub positions: Vec<Coord>,
    pub status: Vec<AgentStatus>,
    /// The recorded verdict agrees with the replayed world.
    pub verdict_consistent: bool,
    /// A fresh run of the scenario ends in the same world with the same verdict.
    pub matches_rerun: bool,
}

impl Replay {
    pub fn ok(&self) -> bool {
        self.verdict_consistent && self.matches_rerun
    }
}

/// Rebuild the final world from the events alone, then compare it with the
/// recorded verdict and with a fresh simulation of the header scenario.
pub fn replay(trace: &Trace) -> Result<Replay, TraceError> {
    let s = &trace.scenario;
    let bad = |line: usize, msg: String| TraceError::Inconsistent { line: line + 2, msg };
    let mut world = World::new(s.dims, s.black_hole).map_err(|e| bad(0, e.to_string()))?;
    let mut positions = s.starts.clone();
    let mut carried = vec![s.tokens_per_agent; s.k()];
    let mut status = vec![AgentStatus::Active; s.k()];
    for (line, e) in trace.events.iter().enumerate() {
        let a = e.agent as usize;
        if a >= positions.len() {
            return Err(bad(line, format!("unknown agent {a}")));
        }
        let at = |want: Coord| if e.pos == want { Ok(()) } else { Err(bad(line, format!("agent {a} is at {want}, not {}", e.pos))) };
        match e.kind {
            EventKind::Moved(d) => {
                at(positions[a])?;
                positions[a] = world.neighbor(positions[a], d);
            }
            EventKind::PutTokens(x) => {
                at(positions[a])?;
                carried[a] = carried[a].checked_sub(x).ok_or_else(|| bad(line, "put more than carried".into()))?;
                world.put_tokens(e.pos, x).map_err(|err| bad(line, err.to_string()))?;
            }
            EventKind::PickedTokens(x) => {
                at(positions[a])?;
                carried[a] += x;
                world.pick_tokens(e.pos, x).map_err(|err| bad(line, err.to_string()))?;
            }
            EventKind::Marked(d) => {
                at(positions[a])?;
                world.mark_link(e.pos, d);
            }
            EventKind::Destroyed(_) => {
                at(positions[a])?;
                if e.pos != world.black_hole() {
                    return Err(bad(line, format!("destroyed away from the black hole at {}", e.pos)));
                }
                status[a] = AgentStatus::Destroyed;
                carried[a] = 0;
            }
            EventKind::Declared(d) => status[a] = AgentStatus::Terminated(d),
            EventKind::Met | EventKind::PhaseEntered(_) => at(positions[a])?,
        }
    }
    let survivors = status.iter().filter(|s| **s != AgentStatus::Destroyed).count() as u8;
    let verdict_consistent = survivors == trace.footer.survivors
        && s.k() as u8 - survivors == trace.footer.destroyed
        && match trace.footer.verdict.as_str() {
            "success" => survivors > 0 && world.marks_exact() && !status.contains(&AgentStatus::Active),
            "incomplete" => !status.contains(&AgentStatus::Active) && !(survivors > 0 && world.marks_exact()),
            "timeout" => true,
            _ => true,
        };
    let rerun = run_observed(s, RunOptions::default(), &mut ())?;
    let matches_rerun = rerun.world == world
        && verdict_label(&rerun.verdict) == trace.footer.verdict
        && rerun.ticks == trace.footer.ticks;
    Ok(Replay { world, positions, status, verdict_consistent, matches_rerun })
}

#[cfg(test)]
mod tests {
    use super::*;
    use bhs_core::scheduler::Algorithm;
    use bhs_core::torus::TorusDims;

    fn recorded(s: &Scenario) -> Vec<u8> {
        let r = run_observed(s, RunOptions { record_trace: true }, &mut ()).unwrap();
        let mut buf = Vec::new();
        write_trace(&mut buf, s, &r).unwrap();
        buf
    }

    #[test]
    fn event_lines_have_the_documented_fields() {
        let s = Scenario::new(Algorithm::Bhs33, TorusDims::new(3, 3).unwrap(), Coord::new(0, 0), vec![
            Coord::new(1, 0),
            Coord::new(1, 1),
            Coord::new(1, 2),
        ])
        .unwrap();
        let buf = recorded(&s);
        let text = String::from_utf8(buf).unwrap();
        let second: serde_json::Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
        for f in ["tick", "kind", "agent", "pos", "dir", "count"] {
            assert!(second.get(f).is_some(), "missing {f}");
        }
        assert!(text.lines().last().unwrap().contains("\"verdict\":\"success\""));
    }

    #[test]
    fn tampered_trace_is_caught() {
        let s = Scenario::new(Algorithm::Bhs42, TorusDims::new(4, 4).unwrap(), Coord::new(2, 3), vec![
            Coord::new(0, 0),
            Coord::new(0, 2),
            Coord::new(1, 1),
            Coord::new(3, 0),
        ])
        .unwrap();
        let text = String::from_utf8(recorded(&s)).unwrap();
        let tampered: String = text
            .lines()
            .filter(|l| !l.contains("\"kind\":\"marked\""))
            .map(|l| format!("{l}\n"))
            .collect();
        let t = read_trace(tampered.as_bytes()).unwrap();
        assert!(!replay(&t).unwrap().ok());
    }
}
