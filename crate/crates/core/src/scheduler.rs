//! Lock-step round scheduler.
//!
//! One round: every active agent perceives a start-of-round snapshot, all
//! controllers compute their actions, token operations are applied in agent
//! id order, then marks, then all moves at once. Agents that land on the
//! black hole are destroyed together with the tokens they carry.

use alloc::vec::Vec;
use core::fmt;
use core::hash::Hasher;

use fnv::FnvHasher;

use crate::agent::{Action, Badge, Controller, Declaration, Perception, PeerSet, Phase, ProtocolError, TokenOp};
use crate::algorithms::{self, Bhs32, Bhs33, Bhs42};
use crate::torus::{Coord, Direction, TorusDims, World, WorldError, TOKEN_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Algorithm {
    Bhs33,
    Bhs42,
    Bhs32,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Bhs33, Algorithm::Bhs42, Algorithm::Bhs32];

    pub const fn tokens_per_agent(self) -> u8 {
        match self {
            Algorithm::Bhs33 => 3,
            Algorithm::Bhs42 | Algorithm::Bhs32 => 2,
        }
    }

    /// Team sizes the algorithm is claimed to handle.
    pub const fn supports_team(self, k: usize) -> bool {
        match self {
            Algorithm::Bhs33 => k >= 3,
            Algorithm::Bhs42 => k >= 4,
            Algorithm::Bhs32 => k == 3,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Algorithm::Bhs33 => "bhs33",
            Algorithm::Bhs42 => "bhs42",
            Algorithm::Bhs32 => "bhs32",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Algorithm {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or(ScenarioError::UnknownAlgorithm)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("unknown algorithm")]
    UnknownAlgorithm,
    #[error("no agents")]
    NoAgents,
    #[error("start {at} is listed twice")]
    DuplicateStart { at: Coord },
    #[error("start {at} is the black hole")]
    StartOnBlackHole { at: Coord },
    #[error("{k} agents do not fit on {free} safe nodes")]
    TooManyAgents { k: usize, free: usize },
    #[error("{algorithm} is not defined for {k} agents")]
    TeamSize { algorithm: Algorithm, k: usize },
    #[error("{algorithm} needs {expected} tokens per agent, got {got}")]
    TokenCount { algorithm: Algorithm, expected: u8, got: u8 },
    #[error("magic number {got} is below the audited minimum {min}")]
    MagicNumberTooSmall { got: u32, min: u32 },
}

/// Complete, validated description of one run.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scenario {
    pub algorithm: Algorithm,
    pub dims: TorusDims,
    pub black_hole: Coord,
    pub starts: Vec<Coord>,
    pub tokens_per_agent: u8,
    pub magic_number: u32,
    pub max_ticks: u64,
    /// Under-resourced configurations outside any correctness claim.
    pub exploratory: bool,
}

impl Scenario {
    /// Scenario with the algorithm's own token count, the shipped magic
    /// number and the default tick cap.
    pub fn new(algorithm: Algorithm, dims: TorusDims, black_hole: Coord, starts: Vec<Coord>) -> Result<Scenario, ScenarioError> {
        let magic = algorithms::DEFAULT_MAGIC_NUMBER;
        let s = Scenario {
            algorithm,
            dims,
            black_hole,
            max_ticks: default_max_ticks(dims, magic),
            starts,
            tokens_per_agent: algorithm.tokens_per_agent(),
            magic_number: magic,
            exploratory: false,
        };
        s.validate()?;
        Ok(s)
    }

    /// Like [`Scenario::new`] but without the team-size requirement.
    pub fn exploratory(algorithm: Algorithm, dims: TorusDims, black_hole: Coord, starts: Vec<Coord>) -> Result<Scenario, ScenarioError> {
        let magic = algorithms::DEFAULT_MAGIC_NUMBER;
        let s = Scenario {
            algorithm,
            dims,
            black_hole,
            max_ticks: default_max_ticks(dims, magic),
            starts,
            tokens_per_agent: algorithm.tokens_per_agent(),
            magic_number: magic,
            exploratory: true,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn k(&self) -> usize {
        self.starts.len()
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        TorusDims::new(self.dims.n, self.dims.m)?;
        if !self.dims.contains(self.black_hole) {
            return Err(WorldError::OutOfBounds { at: self.black_hole }.into());
        }
        let k = self.starts.len();
        if k == 0 {
            return Err(ScenarioError::NoAgents);
        }
        if k > self.dims.node_count() - 1 {
            return Err(ScenarioError::TooManyAgents { k, free: self.dims.node_count() - 1 });
        }
        for (idx, &c) in self.starts.iter().enumerate() {
            if !self.dims.contains(c) {
                return Err(WorldError::OutOfBounds { at: c }.into());
            }
            if c == self.black_hole {
                return Err(ScenarioError::StartOnBlackHole { at: c });
            }
            if self.starts[..idx].contains(&c) {
                return Err(ScenarioError::DuplicateStart { at: c });
            }
        }
        if self.exploratory {
            if self.tokens_per_agent == 0 || self.tokens_per_agent > TOKEN_CAP {
                return Err(ScenarioError::TokenCount {
                    algorithm: self.algorithm,
                    expected: self.algorithm.tokens_per_agent(),
                    got: self.tokens_per_agent,
                });
            }
        } else {
            if !self.algorithm.supports_team(k) {
                return Err(ScenarioError::TeamSize { algorithm: self.algorithm, k });
            }
            if self.tokens_per_agent != self.algorithm.tokens_per_agent() {
                return Err(ScenarioError::TokenCount {
                    algorithm: self.algorithm,
                    expected: self.algorithm.tokens_per_agent(),
                    got: self.tokens_per_agent,
                });
            }
        }
        if self.algorithm == Algorithm::Bhs32 {
            let min = algorithms::audit::minimal_magic_number();
            if self.magic_number < min {
                return Err(ScenarioError::MagicNumberTooSmall { got: self.magic_number, min });
            }
        }
        Ok(())
    }
}

/// `200 · n · m · D`.
pub fn default_max_ticks(dims: TorusDims, magic_number: u32) -> u64 {
    200 * dims.node_count() as u64 * magic_number as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AgentStatus {
    Active,
    Terminated(Declaration),
    Destroyed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EventKind {
    /// Left `pos` towards the direction.
    Moved(Direction),
    PutTokens(u8),
    PickedTokens(u8),
    Marked(Direction),
    /// Entered the black hole moving in the given direction.
    Destroyed(Direction),
    Met,
    Declared(Declaration),
    PhaseEntered(Phase),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceEvent {
    pub tick: u64,
    pub agent: u8,
    pub pos: Coord,
    pub kind: EventKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ViolationKind {
    TokenCapExceeded { agent: u8, at: Coord },
    TokenUnderflow { agent: u8, at: Coord },
    CarryOverflow { agent: u8 },
    CarryUnderflow { agent: u8 },
    Protocol { agent: u8, reason: &'static str },
    SpuriousMark { at: Coord, dir: Direction },
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::TokenCapExceeded { agent, at } => write!(f, "agent {agent} exceeded the node cap at {at}"),
            ViolationKind::TokenUnderflow { agent, at } => write!(f, "agent {agent} picked missing tokens at {at}"),
            ViolationKind::CarryOverflow { agent } => write!(f, "agent {agent} would carry more than 3 tokens"),
            ViolationKind::CarryUnderflow { agent } => write!(f, "agent {agent} put tokens it does not carry"),
            ViolationKind::Protocol { agent, reason } => write!(f, "agent {agent}: {reason}"),
            ViolationKind::SpuriousMark { at, dir } => write!(f, "link {at}->{dir} marked but does not lead to the black hole"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Verdict {
    Success,
    /// Every agent stopped or died without the exact mark set.
    Incomplete,
    Violation(ViolationKind),
    Timeout,
}

impl Verdict {
    pub const fn is_success(&self) -> bool {
        matches!(self, Verdict::Success)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Death {
    pub agent: u8,
    pub tick: u64,
    pub entered: Direction,
}

/// Harness-side view of one agent. The id is never shown to controllers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AgentView {
    pub id: u8,
    pub pos: Coord,
    pub carried: u8,
    pub status: AgentStatus,
    pub last_move: Option<Direction>,
    pub phase: Phase,
    pub badge: Badge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub verdict: Verdict,
    pub ticks: u64,
    pub destroyed: u8,
    pub survivors: u8,
    pub deaths: Vec<Death>,
    pub trace_hash: u64,
    pub trace: Option<Vec<TraceEvent>>,
    pub world: World,
    pub agents: Vec<AgentView>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub record_trace: bool,
}

/// State of the run after a round, handed to observers.
pub struct RoundView<'a> {
    pub tick: u64,
    pub world: &'a World,
    pub agents: &'a [AgentView],
    pub events: &'a [TraceEvent],
    pub destroyed_tokens: u32,
    pub magic_number: u32,
}

pub trait Observer {
    fn after_round(&mut self, view: &RoundView<'_>);
}

impl Observer for () {
    fn after_round(&mut self, _: &RoundView<'_>) {}
}

impl<F: FnMut(&RoundView<'_>)> Observer for F {
    fn after_round(&mut self, view: &RoundView<'_>) {
        self(view)
    }
}

struct Slot<S> {
    state: S,
    view: AgentView,
    company: u64,
}

/// A run in progress for a concrete controller type.
pub struct Simulation<C: Controller> {
    ctrl: C,
    world: World,
    slots: Vec<Slot<C::State>>,
    views: Vec<AgentView>,
    tick: u64,
    hasher: FnvHasher,
    trace: Option<Vec<TraceEvent>>,
    round_events: Vec<TraceEvent>,
    destroyed_tokens: u32,
    deaths: Vec<Death>,
    magic_number: u32,
}

/// What a single round concluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundOutcome {
    Continue,
    Finished(Verdict),
}

impl<C: Controller> Simulation<C> {
    pub fn new(ctrl: C, scenario: &Scenario, opts: RunOptions) -> Result<Simulation<C>, ScenarioError> {
        let world = World::new(scenario.dims, scenario.black_hole)?;
        let slots: Vec<Slot<C::State>> = scenario
            .starts
            .iter()
            .enumerate()
            .map(|(id, &pos)| {
                let state = ctrl.initial();
                Slot {
                    view: AgentView {
                        id: id as u8,
                        pos,
                        carried: scenario.tokens_per_agent,
                        status: AgentStatus::Active,
                        last_move: None,
                        phase: ctrl.phase(&state),
                        badge: ctrl.badge(&state),
                    },
                    state,
                    company: 0,
                }
            })
            .collect();
        let mut sim = Simulation {
            ctrl,
            world,
            views: slots.iter().map(|s| s.view).collect(),
            slots,
            tick: 0,
            hasher: FnvHasher::default(),
            trace: opts.record_trace.then(Vec::new),
            round_events: Vec::new(),
            destroyed_tokens: 0,
            deaths: Vec::new(),
            magic_number: scenario.magic_number,
        };
        for idx in 0..sim.slots.len() {
            let v = sim.slots[idx].view;
            sim.emit(idx as u8, v.pos, EventKind::PhaseEntered(v.phase));
        }
        sim.flush_events();
        Ok(sim)
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn agents(&self) -> &[AgentView] {
        &self.views
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn controller_states(&self) -> impl Iterator<Item = &C::State> {
        self.slots.iter().map(|s| &s.state)
    }

    /// Events of the most recent round.
    pub fn last_events(&self) -> &[TraceEvent] {
        &self.round_events
    }

    fn emit(&mut self, agent: u8, pos: Coord, kind: EventKind) {
        self.round_events.push(TraceEvent { tick: self.tick, agent, pos, kind });
    }

    fn flush_events(&mut self) {
        for e in &self.round_events {
            hash_event(&mut self.hasher, e);
        }
        if let Some(t) = self.trace.as_mut() {
            t.extend_from_slice(&self.round_events);
        }
    }

    /// What agent `idx` perceives at the start of the next round.
    pub fn perception(&self, idx: usize) -> Perception {
        let me = &self.slots[idx].view;
        let mut peers = PeerSet::EMPTY;
        for (other, s) in self.slots.iter().enumerate() {
            if other == idx || s.view.pos != me.pos {
                continue;
            }
            match s.view.status {
                AgentStatus::Destroyed => {}
                AgentStatus::Terminated(_) => peers.insert(Badge::Done, s.view.last_move),
                AgentStatus::Active => peers.insert(s.view.badge, s.view.last_move),
            }
        }
        Perception {
            arrived: me.last_move,
            node_tokens: self.world.tokens(me.pos),
            carried: me.carried,
            other_agent: !peers.is_empty(),
            peers,
            incident_danger: self.world.incident_danger(me.pos),
        }
    }

    /// Execute one round. Returns `Finished` once the run has a verdict.
    pub fn step_round(&mut self) -> RoundOutcome {
        self.round_events.clear();
        let outcome = self.round_inner();
        self.views.clear();
        self.views.extend(self.slots.iter().map(|s| s.view));
        self.flush_events();
        self.tick += 1;
        outcome
    }

    fn round_inner(&mut self) -> RoundOutcome {
        let k = self.slots.len();
        // (1) + (2): perceive and decide against the same snapshot.
        let mut actions: Vec<Option<(Action, C::State)>> = Vec::with_capacity(k);
        for idx in 0..k {
            if self.slots[idx].view.status != AgentStatus::Active {
                actions.push(None);
                continue;
            }
            let p = self.perception(idx);
            match self.ctrl.step(&self.slots[idx].state, &p) {
                Ok((a, s)) => {
                    if a.declare.is_some() && a.mv.is_some() {
                        return self.violation(ViolationKind::Protocol { agent: idx as u8, reason: "declared while moving" });
                    }
                    actions.push(Some((a, s)));
                }
                Err(ProtocolError(reason)) => return self.violation(ViolationKind::Protocol { agent: idx as u8, reason }),
            }
        }
        // (3) token operations in id order.
        for idx in 0..k {
            let Some((a, _)) = actions[idx] else { continue };
            let pos = self.slots[idx].view.pos;
            let id = idx as u8;
            match a.token {
                TokenOp::None => {}
                TokenOp::Put(s) => {
                    if s > self.slots[idx].view.carried {
                        return self.violation(ViolationKind::CarryUnderflow { agent: id });
                    }
                    if self.world.put_tokens(pos, s).is_err() {
                        return self.violation(ViolationKind::TokenCapExceeded { agent: id, at: pos });
                    }
                    self.slots[idx].view.carried -= s;
                    self.emit(id, pos, EventKind::PutTokens(s));
                }
                TokenOp::Pick(s) => {
                    if self.slots[idx].view.carried + s > TOKEN_CAP {
                        return self.violation(ViolationKind::CarryOverflow { agent: id });
                    }
                    if self.world.pick_tokens(pos, s).is_err() {
                        return self.violation(ViolationKind::TokenUnderflow { agent: id, at: pos });
                    }
                    self.slots[idx].view.carried += s;
                    self.emit(id, pos, EventKind::PickedTokens(s));
                }
            }
        }
        // (4) marks.
        for idx in 0..k {
            let Some((a, _)) = actions[idx] else { continue };
            if let Some(d) = a.mark {
                let pos = self.slots[idx].view.pos;
                if self.world.mark_link(pos, d) {
                    self.emit(idx as u8, pos, EventKind::Marked(d));
                }
                if self.world.neighbor(pos, d) != self.world.black_hole() {
                    return self.violation(ViolationKind::SpuriousMark { at: pos, dir: d });
                }
            }
        }
        // (5) simultaneous moves, (6) destruction.
        let bh = self.world.black_hole();
        for idx in 0..k {
            let Some((a, s)) = actions[idx] else { continue };
            let id = idx as u8;
            let from = self.slots[idx].view.pos;
            let slot = &mut self.slots[idx];
            slot.state = s;
            slot.view.last_move = a.mv;
            if let Some(d) = a.mv {
                slot.view.pos = self.world.neighbor(from, d);
                self.round_events.push(TraceEvent { tick: self.tick, agent: id, pos: from, kind: EventKind::Moved(d) });
                if slot.view.pos == bh {
                    slot.view.status = AgentStatus::Destroyed;
                    self.destroyed_tokens += slot.view.carried as u32;
                    slot.view.carried = 0;
                    self.deaths.push(Death { agent: id, tick: self.tick, entered: d });
                    self.round_events.push(TraceEvent { tick: self.tick, agent: id, pos: bh, kind: EventKind::Destroyed(d) });
                    continue;
                }
            }
            if let Some(decl) = a.declare {
                slot.view.status = AgentStatus::Terminated(decl);
                slot.view.badge = Badge::Done;
                let pos = slot.view.pos;
                self.round_events.push(TraceEvent { tick: self.tick, agent: id, pos, kind: EventKind::Declared(decl) });
            } else {
                let phase = self.ctrl.phase(&slot.state);
                slot.view.badge = self.ctrl.badge(&slot.state);
                if phase != slot.view.phase {
                    slot.view.phase = phase;
                    let pos = slot.view.pos;
                    self.round_events.push(TraceEvent { tick: self.tick, agent: id, pos, kind: EventKind::PhaseEntered(phase) });
                }
            }
        }
        // (7) meetings: report an agent whenever its set of companions changes to a non-empty set.
        for idx in 0..k {
            if self.slots[idx].view.status == AgentStatus::Destroyed {
                self.slots[idx].company = 0;
                continue;
            }
            let pos = self.slots[idx].view.pos;
            let mut company = 0u64;
            for (o, s) in self.slots.iter().enumerate() {
                if o != idx && s.view.status != AgentStatus::Destroyed && s.view.pos == pos {
                    company |= 1 << o;
                }
            }
            if company != 0 && company != self.slots[idx].company {
                self.emit(idx as u8, pos, EventKind::Met);
            }
            self.slots[idx].company = company;
        }
        self.conclude()
    }

    fn conclude(&self) -> RoundOutcome {
        let mut active = 0;
        let mut alive = 0;
        for s in &self.slots {
            match s.view.status {
                AgentStatus::Active => {
                    active += 1;
                    alive += 1;
                }
                AgentStatus::Terminated(_) => alive += 1,
                AgentStatus::Destroyed => {}
            }
        }
        if active > 0 {
            return RoundOutcome::Continue;
        }
        if alive > 0 && self.world.marks_exact() {
            RoundOutcome::Finished(Verdict::Success)
        } else {
            RoundOutcome::Finished(Verdict::Incomplete)
        }
    }

    fn violation(&mut self, v: ViolationKind) -> RoundOutcome {
        RoundOutcome::Finished(Verdict::Violation(v))
    }

    fn round_view(&self) -> RoundView<'_> {
        RoundView {
            tick: self.tick,
            world: &self.world,
            agents: &self.views,
            events: &self.round_events,
            destroyed_tokens: self.destroyed_tokens,
            magic_number: self.magic_number,
        }
    }

    /// Run to completion or until `max_ticks` rounds have elapsed.
    pub fn run(mut self, max_ticks: u64, observer: &mut dyn Observer) -> RunResult {
        let verdict = loop {
            if self.tick >= max_ticks {
                break Verdict::Timeout;
            }
            let outcome = self.step_round();
            // The observer sees the state after the round; `tick` already counts it.
            let view = RoundView { tick: self.tick - 1, ..self.round_view() };
            observer.after_round(&view);
            if let RoundOutcome::Finished(v) = outcome {
                break v;
            }
        };
        let destroyed = self.slots.iter().filter(|s| s.view.status == AgentStatus::Destroyed).count() as u8;
        RunResult {
            verdict,
            ticks: self.tick,
            destroyed,
            survivors: self.slots.len() as u8 - destroyed,
            deaths: self.deaths,
            trace_hash: self.hasher.finish(),
            trace: self.trace,
            world: self.world,
            agents: self.views,
        }
    }
}

fn hash_event(h: &mut FnvHasher, e: &TraceEvent) {
    h.write_u64(e.tick);
    h.write_u8(e.agent);
    h.write_u16(e.pos.i);
    h.write_u16(e.pos.j);
    let (tag, payload) = match e.kind {
        EventKind::Moved(d) => (0u8, d as u8),
        EventKind::PutTokens(s) => (1, s),
        EventKind::PickedTokens(s) => (2, s),
        EventKind::Marked(d) => (3, d as u8),
        EventKind::Destroyed(d) => (4, d as u8),
        EventKind::Met => (5, 0),
        EventKind::Declared(d) => (6, d as u8),
        EventKind::PhaseEntered(p) => (7, p as u8),
    };
    h.write_u8(tag);
    h.write_u8(payload);
}

/// Run a scenario with the controller its algorithm names.
pub fn run(scenario: &Scenario) -> Result<RunResult, ScenarioError> {
    run_observed(scenario, RunOptions::default(), &mut ())
}

pub fn run_observed(scenario: &Scenario, opts: RunOptions, observer: &mut dyn Observer) -> Result<RunResult, ScenarioError> {
    scenario.validate()?;
    Ok(match scenario.algorithm {
        Algorithm::Bhs33 => Simulation::new(Bhs33, scenario, opts)?.run(scenario.max_ticks, observer),
        Algorithm::Bhs42 => Simulation::new(Bhs42, scenario, opts)?.run(scenario.max_ticks, observer),
        Algorithm::Bhs32 => {
            Simulation::new(Bhs32::new(scenario.magic_number), scenario, opts)?.run(scenario.max_ticks, observer)
        }
    })
}
