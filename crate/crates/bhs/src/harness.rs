//! Scenario enumeration, per-run cross-checks and parallel sweeps.

use std::collections::{BTreeMap, BTreeSet};

use bhs_core::agent::{Controller, Phase};
use bhs_core::scheduler::{
    run_observed, AgentStatus, Algorithm, EventKind, Observer, RoundOutcome, RoundView, RunOptions, RunResult, Scenario,
    ScenarioError, Simulation, Verdict,
};
use bhs_core::torus::{Coord, Direction, TorusDims, TOKEN_CAP};
use itertools::Itertools;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const EXPLORATORY_LABEL: &str = "exploratory — no paper claim";

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{k} agents do not fit beside the black hole on a {dims} torus")]
    InfeasibleTeam { k: usize, dims: TorusDims },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub algorithm: Algorithm,
    pub dims: Vec<TorusDims>,
    pub k: usize,
    pub mode: SweepMode,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub max_ticks: Option<u64>,
    pub magic_number: u32,
    /// Tokens per agent when it differs from the algorithm's own.
    pub tokens_per_agent: Option<u8>,
}

impl SweepConfig {
    pub fn new(algorithm: Algorithm, dims: Vec<TorusDims>, k: usize, mode: SweepMode) -> SweepConfig {
        SweepConfig {
            algorithm,
            dims,
            k,
            mode,
            jobs: 0,
            max_ticks: None,
            magic_number: bhs_core::algorithms::DEFAULT_MAGIC_NUMBER,
            tokens_per_agent: None,
        }
    }

    /// Configurations below the algorithm's stated team size or token count.
    pub fn exploratory(&self) -> bool {
        !self.algorithm.supports_team(self.k)
            || self.tokens_per_agent.is_some_and(|t| t != self.algorithm.tokens_per_agent())
    }

    fn scenario(&self, dims: TorusDims, black_hole: Coord, starts: Vec<Coord>) -> Scenario {
        let magic = self.magic_number;
        Scenario {
            algorithm: self.algorithm,
            dims,
            black_hole,
            starts,
            tokens_per_agent: self.tokens_per_agent.unwrap_or(self.algorithm.tokens_per_agent()),
            magic_number: magic,
            max_ticks: self.max_ticks.unwrap_or_else(|| bhs_core::scheduler::default_max_ticks(dims, magic)),
            exploratory: self.exploratory(),
        }
    }

    /// All scenarios of the sweep, in a deterministic order.
    pub fn scenarios(&self) -> Result<Vec<Scenario>, HarnessError> {
        let mut out = Vec::new();
        for &dims in &self.dims {
            match self.mode {
                SweepMode::Exhaustive => {
                    for (bh, starts) in enumerate_placements(dims, self.k)? {
                        out.push(self.scenario(dims, bh, starts));
                    }
                }
                SweepMode::Sampled { count, seed } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((dims.n as u64) << 32 | dims.m as u64));
                    for _ in 0..count {
                        let (bh, starts) = sample_placement(dims, self.k, &mut rng)?;
                        out.push(self.scenario(dims, bh, starts));
                    }
                }
            }
        }
        Ok(out)
    }
}

fn check_team(dims: TorusDims, k: usize) -> Result<(), HarnessError> {
    if k == 0 || k > dims.node_count() - 1 {
        return Err(HarnessError::InfeasibleTeam { k, dims });
    }
    Ok(())
}

/// Every black hole position with every unordered set of `k` starts, starts sorted.
pub fn enumerate_placements(
    dims: TorusDims,
    k: usize,
) -> Result<impl Iterator<Item = (Coord, Vec<Coord>)>, HarnessError> {
    check_team(dims, k)?;
    Ok(dims.iter().flat_map(move |bh| dims.iter().filter(move |&c| c != bh).combinations(k).map(move |s| (bh, s))))
}

pub fn sample_placement(dims: TorusDims, k: usize, rng: &mut impl Rng) -> Result<(Coord, Vec<Coord>), HarnessError> {
    check_team(dims, k)?;
    let bh_idx = rng.gen_range(0..dims.node_count());
    let bh = dims.coord(bh_idx);
    let mut starts: Vec<Coord> = sample(rng, dims.node_count() - 1, k)
        .into_iter()
        .map(|x| dims.coord(if x >= bh_idx { x + 1 } else { x }))
        .collect();
    starts.sort();
    Ok((bh, starts))
}

/// What a cross-check found wrong.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    TokenLedger,
    TokenOnBlackHole,
    TokenCap,
    MarkRemoved,
    SeveralThreeTokenNodes,
    Synchronisation,
    UnwarnedDeath,
    DeathBound,
    NoSurvivor,
    InexactMarks,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Problem {
    pub kind: ProblemKind,
    /// Round of the observation; absent for end-of-run checks.
    pub tick: Option<u64>,
    pub detail: String,
}

impl std::fmt::Display for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.tick {
            Some(t) => write!(f, "tick {t}: {}", self.detail),
            None => f.write_str(&self.detail),
        }
    }
}

/// Per-run problems kept in full; further ones are only counted.
const PROBLEMS_KEPT: usize = 8;

/// Invariants checked after every round.
struct Invariants {
    algorithm: Algorithm,
    budget: u32,
    marks: u32,
    prev_phase: Vec<Phase>,
    problems: Vec<Problem>,
}

impl Invariants {
    fn note(&mut self, tick: u64, kind: ProblemKind, detail: String) {
        if self.problems.len() < PROBLEMS_KEPT {
            self.problems.push(Problem { kind, tick: Some(tick), detail });
        }
    }
}

impl Observer for Invariants {
    fn after_round(&mut self, v: &RoundView<'_>) {
        let w = v.world;
        let carried: u32 = v.agents.iter().map(|a| a.carried as u32).sum();
        let ledger = w.total_tokens() + carried + v.destroyed_tokens;
        if ledger != self.budget {
            self.note(v.tick, ProblemKind::TokenLedger, format!("token ledger {ledger} != {}", self.budget));
        }
        if w.tokens(w.black_hole()) != 0 {
            self.note(v.tick, ProblemKind::TokenOnBlackHole, "tokens on the black hole".into());
        }
        let full = w.dims().iter().filter(|&c| w.tokens(c) == TOKEN_CAP).count();
        if w.dims().iter().any(|c| w.tokens(c) > TOKEN_CAP) {
            self.note(v.tick, ProblemKind::TokenCap, "node above the token cap".into());
        }
        let marks = w.mark_count();
        if marks < self.marks {
            self.note(v.tick, ProblemKind::MarkRemoved, "a mark disappeared".into());
        }
        self.marks = marks;
        if self.algorithm == Algorithm::Bhs32 {
            if full > 1 {
                self.note(v.tick, ProblemKind::SeveralThreeTokenNodes, format!("{full} nodes hold three tokens"));
            }
            self.check_synchronisation(v);
        }
        if self.algorithm == Algorithm::Bhs42 {
            for e in v.events {
                if let EventKind::Destroyed(d) = e.kind {
                    let launch = w.neighbor(e.pos, d.opposite());
                    let need = if d == Direction::South { 2 } else { 1 };
                    if w.tokens(launch) < need && matches!(d, Direction::South | Direction::East) {
                        self.note(
                            v.tick,
                            ProblemKind::UnwarnedDeath,
                            format!("died moving {d} from {launch} with {} token(s) behind", w.tokens(launch)),
                        );
                    }
                }
            }
        }
        self.prev_phase.clear();
        self.prev_phase.extend(v.agents.iter().map(|a| a.phase));
    }
}

impl Invariants {
    /// Whenever an agent starts InitNextRing, every other agent still in the
    /// ring routine also starts it, or sits still in a ring phase, waiting out
    /// its big-step. Agents hunting the black hole, pairing up or marking are
    /// off the common schedule and exempt.
    fn check_synchronisation(&mut self, v: &RoundView<'_>) {
        let entering: Vec<u8> = v
            .events
            .iter()
            .filter(|e| e.kind == EventKind::PhaseEntered(Phase::InitNextRing))
            .map(|e| e.agent)
            .collect();
        if entering.is_empty() {
            return;
        }
        for a in v.agents {
            if a.status != AgentStatus::Active || entering.contains(&a.id) {
                continue;
            }
            if !matches!(a.phase, Phase::FirstRing | Phase::NextRing | Phase::InitNextRing) {
                continue;
            }
            let waiting = matches!(a.phase, Phase::FirstRing | Phase::NextRing) && a.last_move.is_none();
            let before = self.prev_phase.get(a.id as usize).copied();
            if !waiting {
                self.note(
                    v.tick,
                    ProblemKind::Synchronisation,
                    format!("agent {} is in {:?} (was {:?}) while another starts InitNextRing", a.id, a.phase, before),
                );
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub verdict: Verdict,
    pub ticks: u64,
    pub destroyed: u8,
    pub south_deaths: u8,
    pub east_deaths: u8,
    pub trace_hash: u64,
    /// Cross-check failures beyond the verdict itself.
    pub problems: Vec<Problem>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.verdict.is_success() && self.problems.is_empty()
    }
}

/// Destruction bound claimed for each algorithm, or a description of the breach.
pub fn death_bound(algorithm: Algorithm, destroyed: u8, south: u8, east: u8) -> Option<String> {
    let breached = match algorithm {
        Algorithm::Bhs42 => destroyed > 3 || south > 1 || east > 2,
        Algorithm::Bhs32 => destroyed > 2,
        Algorithm::Bhs33 => false,
    };
    breached.then(|| format!("{destroyed} destroyed ({south} going South, {east} going East)"))
}

/// Run a scenario and cross-check it against the ground truth.
pub fn verify_scenario(s: &Scenario) -> Result<Check, ScenarioError> {
    let (check, _) = verify_with(s, RunOptions::default())?;
    Ok(check)
}

pub fn verify_with(s: &Scenario, opts: RunOptions) -> Result<(Check, RunResult), ScenarioError> {
    let mut inv = Invariants {
        algorithm: s.algorithm,
        budget: s.k() as u32 * s.tokens_per_agent as u32,
        marks: 0,
        prev_phase: Vec::new(),
        problems: Vec::new(),
    };
    let r = run_observed(s, opts, &mut inv)?;
    let mut problems = inv.problems;
    let south = r.deaths.iter().filter(|d| d.entered == Direction::South).count() as u8;
    let east = r.deaths.iter().filter(|d| d.entered == Direction::East).count() as u8;
    let mut end = |kind, detail: String| problems.push(Problem { kind, tick: None, detail });
    if r.verdict.is_success() {
        if r.survivors == 0 {
            end(ProblemKind::NoSurvivor, "success without survivors".into());
        }
        if !r.world.marks_exact() {
            end(ProblemKind::InexactMarks, "success with an inexact mark set".into());
        }
    }
    if let Some(detail) = death_bound(s.algorithm, r.destroyed, south, east) {
        end(ProblemKind::DeathBound, detail);
    }
    if s.exploratory {
        // No claim to check against.
        problems.clear();
    }
    let check = Check {
        verdict: r.verdict,
        ticks: r.ticks,
        destroyed: r.destroyed,
        south_deaths: south,
        east_deaths: east,
        trace_hash: r.trace_hash,
        problems,
    };
    Ok((check, r))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub success: u64,
    pub incomplete: u64,
    pub violation: u64,
    pub timeout: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub scenario: Scenario,
    pub check: Check,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimsSummary {
    pub dims: String,
    pub runs: u64,
    pub failures: u64,
    pub max_ticks: u64,
    pub max_destroyed: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub algorithm: Algorithm,
    pub k: usize,
    pub tokens_per_agent: u8,
    pub magic_number: u32,
    pub mode: SweepMode,
    /// Set for configurations outside the algorithm's stated resources.
    pub label: Option<String>,
    pub scenarios: u64,
    pub totals: Totals,
    pub failures: u64,
    pub max_ticks: u64,
    pub max_destroyed: u8,
    pub per_dims: Vec<DimsSummary>,
    /// Problems found, by kind, over non-exploratory runs.
    pub problem_counts: BTreeMap<ProblemKind, u64>,
    /// Cross-check failures, capped at 32 entries.
    pub invariant_violations: Vec<String>,
    pub first_counterexample: Option<Counterexample>,
    /// Order-independent digest of every per-scenario result.
    pub digest: String,
}

impl SweepReport {
    pub fn clean(&self) -> bool {
        self.failures == 0
    }
}

pub fn sweep(cfg: &SweepConfig) -> Result<SweepReport, HarnessError> {
    let scenarios = cfg.scenarios()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
    let checks: Vec<Result<Check, ScenarioError>> = pool.install(|| scenarios.par_iter().map(verify_scenario).collect());
    let mut report = SweepReport {
        algorithm: cfg.algorithm,
        k: cfg.k,
        tokens_per_agent: cfg.tokens_per_agent.unwrap_or(cfg.algorithm.tokens_per_agent()),
        magic_number: cfg.magic_number,
        mode: cfg.mode,
        label: cfg.exploratory().then(|| EXPLORATORY_LABEL.to_string()),
        scenarios: scenarios.len() as u64,
        totals: Totals::default(),
        failures: 0,
        max_ticks: 0,
        max_destroyed: 0,
        per_dims: Vec::new(),
        problem_counts: BTreeMap::new(),
        invariant_violations: Vec::new(),
        first_counterexample: None,
        digest: String::new(),
    };
    let mut per_dims: BTreeMap<TorusDims, DimsSummary> = BTreeMap::new();
    let mut digest = sha2::Sha256::default();
    for (s, c) in scenarios.iter().zip(checks) {
        let c = c?;
        use sha2::Digest;
        digest.update(serde_json::to_vec(&(s, &c)).expect("serialisable"));
        match c.verdict {
            Verdict::Success => report.totals.success += 1,
            Verdict::Incomplete => report.totals.incomplete += 1,
            Verdict::Violation(_) => report.totals.violation += 1,
            Verdict::Timeout => report.totals.timeout += 1,
        }
        report.max_ticks = report.max_ticks.max(c.ticks);
        report.max_destroyed = report.max_destroyed.max(c.destroyed);
        let d = per_dims.entry(s.dims).or_insert_with(|| DimsSummary {
            dims: s.dims.to_string(),
            runs: 0,
            failures: 0,
            max_ticks: 0,
            max_destroyed: 0,
        });
        d.runs += 1;
        d.max_ticks = d.max_ticks.max(c.ticks);
        d.max_destroyed = d.max_destroyed.max(c.destroyed);
        if !c.passed() && !s.exploratory {
            report.failures += 1;
            d.failures += 1;
            for p in &c.problems {
                *report.problem_counts.entry(p.kind).or_default() += 1;
                if report.invariant_violations.len() < 32 {
                    report.invariant_violations.push(format!("{} bh {} starts {:?}: {p}", s.dims, s.black_hole, s.starts));
                }
            }
            if report.first_counterexample.is_none() {
                report.first_counterexample = Some(Counterexample { scenario: s.clone(), check: c.clone() });
            }
        }
    }
    report.per_dims = per_dims.into_values().collect();
    use sha2::Digest;
    report.digest = hex::encode(digest.finalize());
    Ok(report)
}

/// Distinct controller states visited over the given runs.
pub fn reachable_states<C: Controller + Copy>(ctrl: C, scenarios: &[Scenario]) -> Result<BTreeSet<C::State>, ScenarioError> {
    let mut seen = BTreeSet::new();
    for s in scenarios {
        s.validate()?;
        let mut sim = Simulation::new(ctrl, s, RunOptions::default())?;
        seen.extend(sim.controller_states().copied());
        while sim.tick() < s.max_ticks {
            let done = matches!(sim.step_round(), RoundOutcome::Finished(_));
            seen.extend(sim.controller_states().copied());
            if done {
                break;
            }
        }
    }
    Ok(seen)
}

/// Scenario obtained by shifting every coordinate by `(di, dj)`.
pub fn translate(s: &Scenario, di: u16, dj: u16) -> Scenario {
    let mut t = s.clone();
    t.black_hole = s.dims.translate(s.black_hole, di, dj);
    t.starts = s.starts.iter().map(|&c| s.dims.translate(c, di, dj)).collect();
    t.starts.sort();
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(n: u16, m: u16) -> TorusDims {
        TorusDims::new(n, m).unwrap()
    }

    #[test]
    fn placement_counts_match_binomials() {
        assert_eq!(enumerate_placements(dims(3, 3), 3).unwrap().count(), 9 * 56);
        assert_eq!(enumerate_placements(dims(3, 3), 4).unwrap().count(), 9 * 70);
        assert!(enumerate_placements(dims(3, 3), 9).is_err());
    }

    #[test]
    fn placements_never_start_on_the_black_hole() {
        for (bh, starts) in enumerate_placements(dims(3, 4), 2).unwrap() {
            assert!(!starts.contains(&bh));
            assert!(starts.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = sample_placement(dims(5, 5), 4, &mut a).unwrap();
            assert_eq!(x, sample_placement(dims(5, 5), 4, &mut b).unwrap());
            assert!(!x.1.contains(&x.0));
        }
    }
}
