//! Three agents with two tokens each.
//!
//! Time is cut into big-steps of `D` rounds counted from round 0. Every
//! sweep step of every agent runs inside one big-step on a fixed schedule,
//! so agents in different phases still see each other's tokens at known
//! offsets. Rounds 0..12 of a ring big-step are idle; the moves follow.

mod trail;

pub use trail::{Pile, Trail, TRAIL_CAP};

use crate::agent::{arrival_rank, Action, Badge, Controller, Declaration, Perception, Phase, ProtocolError};
use crate::algorithms::analyze::{analyze, AnalyzeOutcome, Sequence, Symbol};
use crate::algorithms::common::MarkAllWalk;
use crate::torus::{Direction, TOKEN_CAP};

use Direction::{East, North, South, West};

/// First offset of a ring big-step at which an agent moves.
pub const MOVE_OFFSET: u16 = 12;
/// Offset at which the ring sweep decides on the node it just reached.
pub const DECIDE_OFFSET: u16 = MOVE_OFFSET + 3;
/// InitNextRing runs from this offset of its big-step.
pub const INIT_START: u16 = 1;
/// Length of InitNextRing before the first sweep step starts.
pub const INIT_ROUNDS: u16 = 12;
/// Sightings of a two-token node that end a ring.
pub const SIGHTINGS: u8 = 6;
/// Rounds two agents spend collecting their tokens after meeting.
pub const REGATHER_ROUNDS: u8 = 2 * TRAIL_CAP;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bhs32 {
    magic: u16,
}

impl Bhs32 {
    pub fn new(magic_number: u32) -> Bhs32 {
        Bhs32 { magic: magic_number.clamp(1, u16::MAX as u32) as u16 }
    }

    pub fn magic_number(&self) -> u32 {
        self.magic as u32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InitPath {
    Main,
    /// Both probes below found nothing.
    Corner,
    /// Both probes below found two tokens.
    Both,
    /// One token below the start.
    Otb,
    OtbTwo,
    OtbBelow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sweep {
    pub count: u8,
    pub seq: Sequence,
    pub danger: bool,
    pub w: u8,
    pub detour: bool,
    /// Offset where this big-step's schedule starts (non-zero only right after InitNextRing).
    pub shift: u16,
}

impl Sweep {
    const FRESH: Sweep =
        Sweep { count: 0, seq: Sequence::EMPTY, danger: false, w: 0, detour: false, shift: INIT_START + INIT_ROUNDS };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Hunt {
    /// Walking East over the token nodes of the ring.
    Skip,
    /// Walking East until a token node shows up.
    Search,
    /// One step West of the token node.
    Back,
    /// South-West of the token node.
    Corner,
    Probe,
    Return,
    Up,
    Resume,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairStep {
    BuildFollower,
    BuildLeader,
    Out(Direction),
    Back(Direction),
    Check(Direction),
    Arrive(Direction),
    LiftLeader,
    LiftFollower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Start,
    /// `count == 0` while still looking for a homebase.
    FirstRing { count: u8 },
    FirstRingDone,
    Init { path: InitPath, n1: u8, n2: u8 },
    Sweep(Sweep),
    Hunt(Hunt),
    SeekTwo,
    WaitMeet,
    SeekMeet,
    Regather { trail: Trail, cursor: u8, left: u8, leader: bool },
    Pair { leader: bool, step: PairStep },
    Marking { walk: MarkAllWalk, clean: bool },
    Clean { moved: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State32 {
    /// Offset of the current round inside its big-step.
    pub clock: u16,
    pub trail: Trail,
    pub mode: Mode,
}

type Step = Result<(Action, Mode), ProtocolError>;

fn stop() -> Step {
    Ok((Action::declaring(Declaration::Terminated), Mode::Start))
}

fn idle(mode: Mode) -> Step {
    Ok((Action::IDLE, mode))
}

fn go(d: Direction, mode: Mode) -> Step {
    Ok((Action::go(d), mode))
}

fn mark_all(toward: Direction, clean: bool) -> (Action, Mode) {
    let walk = MarkAllWalk::new(toward);
    let (a, next) = walk.step();
    (a, Mode::Marking { walk: next.unwrap_or(walk), clean })
}

fn room(p: &Perception) -> u8 {
    TOKEN_CAP - p.carried.min(TOKEN_CAP)
}

/// Role at a first meeting, from the order of arrivals: lowest rank leads,
/// the next one follows, anyone else stands down.
fn pair_role(p: &Perception) -> Option<bool> {
    let mine = arrival_rank(p.arrived);
    let mut lower = 0;
    for a in p.peers.arrivals(Badge::Solo) {
        let r = arrival_rank(a);
        if r == mine {
            return None;
        }
        if r < mine {
            lower += 1;
        }
    }
    match lower {
        0 => Some(true),
        1 => Some(false),
        _ => None,
    }
}

impl Bhs32 {
    fn solo(&self, s: &State32, p: &Perception) -> Step {
        if p.peers.any_pair() || p.node_tokens == TOKEN_CAP || !p.incident_danger.is_empty() {
            return stop();
        }
        if p.peers.any_badge(Badge::Solo) {
            let Some(leader) = pair_role(p) else { return stop() };
            let mode = Mode::Regather { trail: s.trail, cursor: s.trail.len(), left: REGATHER_ROUNDS, leader };
            return self.regather(mode, p);
        }
        let c = s.clock;
        match s.mode {
            Mode::Start => Ok((Action::put(p.carried.min(2)), Mode::FirstRing { count: 0 })),
            Mode::FirstRing { count } => self.first_ring(count, c, p),
            Mode::FirstRingDone => {
                if c == 0 {
                    Ok((Action::pick(p.node_tokens.min(2).min(room(p))), Mode::Init { path: InitPath::Main, n1: 0, n2: 0 }))
                } else {
                    idle(s.mode)
                }
            }
            Mode::Init { path, n1, n2 } => self.init(path, n1, n2, c, p),
            Mode::Sweep(sw) => self.sweep(sw, c, p),
            Mode::Hunt(h) => self.hunt(h, p),
            Mode::SeekTwo => {
                if !p.incident_danger.is_empty() {
                    stop()
                } else if p.node_tokens == 2 {
                    Ok(mark_all(South, false))
                } else {
                    go(East, Mode::SeekTwo)
                }
            }
            Mode::WaitMeet => {
                if p.incident_danger.is_empty() {
                    idle(Mode::WaitMeet)
                } else {
                    stop()
                }
            }
            Mode::SeekMeet => {
                if p.incident_danger.is_empty() {
                    go(East, Mode::SeekMeet)
                } else {
                    stop()
                }
            }
            Mode::Regather { .. } | Mode::Pair { .. } | Mode::Marking { .. } | Mode::Clean { .. } => {
                Err(ProtocolError("solo step in a non-solo mode"))
            }
        }
    }

    fn first_ring(&self, count: u8, c: u16, p: &Perception) -> Step {
        let mode = Mode::FirstRing { count };
        match c {
            MOVE_OFFSET => go(East, mode),
            _ if c == MOVE_OFFSET + 1 => go(West, mode),
            _ if c == MOVE_OFFSET + 2 => {
                // Phase A lifts the token it left behind; phase B only mimics the timing.
                let pick = if count == 0 { p.node_tokens.min(1).min(room(p)) } else { 0 };
                Ok((Action::pick(pick).then_go(East), mode))
            }
            DECIDE_OFFSET => {
                if !p.incident_danger.is_empty() {
                    return stop();
                }
                let n = p.node_tokens;
                if count == 0 {
                    match n {
                        2 => Ok(mark_all(East, true)),
                        1 => Ok((Action::put(p.carried.min(1)), Mode::FirstRing { count: 1 })),
                        _ => Ok((Action::put(p.carried.min(1)), mode)),
                    }
                } else {
                    match n {
                        1 => Ok(mark_all(East, true)),
                        2 if count + 1 >= SIGHTINGS => idle(Mode::FirstRingDone),
                        2 => idle(Mode::FirstRing { count: count + 1 }),
                        _ => idle(mode),
                    }
                }
            }
            _ => idle(mode),
        }
    }

    fn init(&self, path: InitPath, n1: u8, n2: u8, c: u16, p: &Perception) -> Step {
        let t = c.wrapping_sub(INIT_START);
        let at = |path| Mode::Init { path, n1, n2 };
        let pick2 = Action::pick(p.node_tokens.min(2).min(room(p)));
        let put2 = Action::put(p.carried.min(2));
        let n = p.node_tokens;
        match (path, t) {
            (InitPath::Main, 0) => Ok((put2.then_go(South), at(path))),
            (InitPath::Main, 1) => go(North, Mode::Init { path, n1: n, n2 }),
            (InitPath::Main, 2) => Ok((pick2.then_go(East), at(path))),
            (InitPath::Main, 3) => {
                if n >= 2 {
                    return Ok(mark_all(South, false));
                }
                if n1 == 1 {
                    Ok((put2, at(InitPath::Otb)))
                } else {
                    Ok((put2.then_go(West), at(path)))
                }
            }
            (InitPath::Main, 4) => go(South, at(path)),
            (InitPath::Main, 5) => match (n1, n) {
                (0, 0) => go(North, at(InitPath::Corner)),
                (0, 2) => idle(Mode::WaitMeet),
                (2, 0) => go(East, Mode::WaitMeet),
                (2, 2) => go(North, at(InitPath::Both)),
                _ => Err(ProtocolError("unexpected token count below in InitNextRing")),
            },
            (InitPath::Corner | InitPath::Both, 6) => go(East, at(path)),
            (InitPath::Corner | InitPath::Both, 7) => go(South, at(path)),
            (InitPath::Corner | InitPath::Both, 8) => go(North, at(path)),
            (InitPath::Corner, 9 | 10) => idle(at(path)),
            (InitPath::Corner, 11) => idle(Mode::Sweep(Sweep::FRESH)),
            (InitPath::Both, 9) => Ok((pick2.then_go(West), at(path))),
            (InitPath::Both, 10) => go(South, at(path)),
            // Nobody came to meet us here: the black hole is straight below.
            (InitPath::Both, 11) => Ok(mark_all(South, false)),
            (InitPath::Otb, 4) => go(East, at(path)),
            (InitPath::Otb, 5) => {
                if n == 2 {
                    idle(at(InitPath::OtbTwo))
                } else {
                    go(West, at(InitPath::OtbBelow))
                }
            }
            (InitPath::OtbTwo, 6) => go(West, at(path)),
            (InitPath::OtbTwo, 7) => Ok((pick2.then_go(East), at(path))),
            (InitPath::OtbTwo, 8) => Ok(mark_all(South, false)),
            (InitPath::OtbBelow, 6) => go(South, at(path)),
            (InitPath::OtbBelow, 7) => go(North, Mode::Init { path, n1, n2: n }),
            (InitPath::OtbBelow, 8) => Ok((pick2.then_go(East), at(path))),
            (InitPath::OtbBelow, 9) => {
                if n2 > 0 {
                    Ok((put2.then_go(South), at(path)))
                } else {
                    Ok((put2, at(path)))
                }
            }
            (InitPath::OtbBelow, 10) => {
                if n2 > 0 {
                    go(North, at(path))
                } else {
                    idle(at(path))
                }
            }
            (InitPath::OtbBelow, 11) => {
                if n2 > 0 {
                    Ok((pick2.then_go(South), Mode::Hunt(Hunt::Skip)))
                } else {
                    idle(Mode::Sweep(Sweep::FRESH))
                }
            }
            _ => Err(ProtocolError("InitNextRing out of schedule")),
        }
    }

    fn sweep(&self, mut sw: Sweep, c: u16, p: &Perception) -> Step {
        if c == 0 {
            if sw.count >= SIGHTINGS {
                return self.after_sweep(&sw, p);
            }
            sw.shift = 0;
        }
        if c < sw.shift {
            return idle(Mode::Sweep(sw));
        }
        let rel = c - sw.shift;
        let n = p.node_tokens;
        match rel {
            MOVE_OFFSET => {
                if sw.danger {
                    idle(Mode::Sweep(sw))
                } else {
                    go(South, Mode::Sweep(sw))
                }
            }
            _ if rel == MOVE_OFFSET + 1 => {
                if sw.danger {
                    sw.danger = false;
                    idle(Mode::Sweep(sw))
                } else {
                    sw.w = n;
                    if let Some(b) = Symbol::below(n) {
                        sw.seq.push(b).map_err(|_| ProtocolError("observation sequence overflow"))?;
                    }
                    go(North, Mode::Sweep(sw))
                }
            }
            _ if rel == MOVE_OFFSET + 2 => {
                let pick = if sw.count < 3 { n.min(1).min(room(p)) } else { 0 };
                Ok((Action::pick(pick).then_go(East), Mode::Sweep(sw)))
            }
            DECIDE_OFFSET => self.sweep_decide(sw, p),
            _ if sw.detour => self.detour(sw, rel, p),
            _ => idle(Mode::Sweep(sw)),
        }
    }

    fn sweep_decide(&self, mut sw: Sweep, p: &Perception) -> Step {
        if !p.incident_danger.is_empty() {
            return stop();
        }
        let n = p.node_tokens;
        // Never stack a third token on a node: three tokens mean a pair's tower.
        let put = if sw.count < 3 && n < 2 { p.carried.min(1) } else { 0 };
        if n == 0 {
            return Ok((Action::put(put), Mode::Sweep(sw)));
        }
        sw.count += 1;
        let t = Symbol::current(n).expect("n > 0");
        sw.seq.push(t).map_err(|_| ProtocolError("observation sequence overflow"))?;
        if sw.count <= 3 {
            if n == 2 || sw.w == 2 {
                let (mut a, mode) = mark_all(South, false);
                a.token = Action::put(put).token;
                return Ok((a, mode));
            }
            if n == 1 && sw.w == 1 {
                sw.danger = true;
                return Ok((Action::put(put), Mode::Sweep(sw)));
            }
            // Check the node below through its West neighbour, known empty.
            sw.detour = true;
            return go(West, Mode::Sweep(sw));
        }
        if sw.w >= 1 {
            sw.danger = true;
        }
        Ok((Action::put(put), Mode::Sweep(sw)))
    }

    fn detour(&self, mut sw: Sweep, rel: u16, p: &Perception) -> Step {
        match rel - DECIDE_OFFSET {
            1 => go(South, Mode::Sweep(sw)),
            2 => Ok((Action::put(p.carried.min(1)).then_go(East), Mode::Sweep(sw))),
            3 => go(West, Mode::Sweep(sw)),
            4 => Ok((Action::pick(p.node_tokens.min(1).min(room(p))).then_go(North), Mode::Sweep(sw))),
            5 => go(East, Mode::Sweep(sw)),
            6 => {
                sw.detour = false;
                Ok((Action::put(p.carried.min(1)), Mode::Sweep(sw)))
            }
            _ => Err(ProtocolError("detour out of schedule")),
        }
    }

    fn after_sweep(&self, sw: &Sweep, p: &Perception) -> Step {
        let take = p.node_tokens.min(room(p));
        let pick = Action::pick(take);
        match analyze(&sw.seq, p.carried + take) {
            AnalyzeOutcome::DescendSafe => {
                Ok((pick.then_go(South), Mode::Init { path: InitPath::Main, n1: 0, n2: 0 }))
            }
            AnalyzeOutcome::LocateByTwoTokenNode => Ok((pick.then_go(East), Mode::SeekTwo)),
            AnalyzeOutcome::BlackHoleInCurrentNextRing => Ok((pick, Mode::Hunt(Hunt::Skip))),
            AnalyzeOutcome::WaitToMeet => Ok((pick, Mode::WaitMeet)),
            AnalyzeOutcome::SeekEastToMeet => Ok((pick.then_go(East), Mode::SeekMeet)),
            AnalyzeOutcome::DescendThenBlackHoleInNextRing => Ok((pick.then_go(South), Mode::Hunt(Hunt::Skip))),
        }
    }

    fn hunt(&self, h: Hunt, p: &Perception) -> Step {
        let n = p.node_tokens;
        let at = |h| Mode::Hunt(h);
        match h {
            Hunt::Skip => {
                if n > 0 {
                    go(East, at(Hunt::Skip))
                } else {
                    go(East, at(Hunt::Search))
                }
            }
            Hunt::Search => {
                if !p.incident_danger.is_empty() {
                    stop()
                } else if n > 0 {
                    go(West, at(Hunt::Back))
                } else {
                    go(East, at(Hunt::Search))
                }
            }
            Hunt::Back => go(South, at(Hunt::Corner)),
            Hunt::Corner => {
                if n > 0 {
                    Ok(mark_all(East, false))
                } else {
                    Ok((Action::put(p.carried.min(2)).then_go(East), at(Hunt::Probe)))
                }
            }
            Hunt::Probe => go(West, at(Hunt::Return)),
            Hunt::Return => Ok((Action::pick(n.min(2).min(room(p))).then_go(North), at(Hunt::Up))),
            Hunt::Up => go(East, at(Hunt::Resume)),
            Hunt::Resume => go(East, at(Hunt::Search)),
        }
    }

    fn regather(&self, mode: Mode, p: &Perception) -> Step {
        let Mode::Regather { mut trail, mut cursor, left, leader } = mode else {
            return Err(ProtocolError("not regathering"));
        };
        if left == 0 {
            return self.pair(leader, PairStep::BuildFollower, p);
        }
        let mut a = Action::IDLE;
        let here = trail.piles().find(|q| q.idx == cursor).map(|q| q.count);
        if let Some(pile) = here {
            a = Action::pick(pile.min(p.node_tokens).min(room(p)));
            trail.clear_pile(cursor);
        }
        if trail.piles().any(|q| q.idx < cursor) {
            cursor -= 1;
            a.mv = Some(trail.dir(cursor).opposite());
        } else if cursor < trail.len() {
            a.mv = Some(trail.dir(cursor));
            cursor += 1;
        }
        Ok((a, Mode::Regather { trail, cursor, left: left - 1, leader }))
    }

    fn pair(&self, leader: bool, step: PairStep, p: &Perception) -> Step {
        let at = |step| Mode::Pair { leader, step };
        let n = p.node_tokens;
        let topping = Action::put(p.carried.min(TOKEN_CAP.saturating_sub(n)));
        match step {
            PairStep::Arrive(dir) => {
                if !p.incident_danger.is_empty() {
                    return stop();
                }
                let next = match dir {
                    South => PairStep::BuildFollower,
                    _ if n == TOKEN_CAP => PairStep::LiftLeader,
                    _ => PairStep::Out(East),
                };
                self.pair(leader, next, p)
            }
            PairStep::BuildFollower => Ok((if leader { Action::IDLE } else { topping }, at(PairStep::BuildLeader))),
            PairStep::BuildLeader => Ok((if leader { topping } else { Action::IDLE }, at(PairStep::Out(East)))),
            PairStep::Out(d) => Ok((if leader { Action::go(d) } else { Action::IDLE }, at(PairStep::Back(d)))),
            PairStep::Back(d) => Ok((if leader { Action::go(d.opposite()) } else { Action::IDLE }, at(PairStep::Check(d)))),
            PairStep::Check(d) => {
                if leader || p.peers.any_badge(Badge::Leader) {
                    go(d, at(PairStep::Arrive(d)))
                } else {
                    Ok(mark_all(d, false))
                }
            }
            PairStep::LiftLeader => {
                let a = if leader { Action::pick(n.min(room(p))) } else { Action::IDLE };
                Ok((a, at(PairStep::LiftFollower)))
            }
            PairStep::LiftFollower => {
                let a = if leader { Action::IDLE } else { Action::pick(n.min(room(p))) };
                Ok((a, at(PairStep::Out(South))))
            }
        }
    }

    fn clean(&self, moved: bool, p: &Perception) -> Step {
        let done = !p.peers.is_empty() || p.node_tokens == 1 || (moved && !p.incident_danger.is_empty());
        if done {
            return Ok((Action::declaring(Declaration::FoundBlackHole), Mode::Clean { moved }));
        }
        Ok((Action::pick(p.node_tokens.min(room(p))).then_go(West), Mode::Clean { moved: true }))
    }

    fn dispatch(&self, s: &State32, p: &Perception) -> Step {
        match s.mode {
            Mode::Regather { .. } => self.regather(s.mode, p),
            Mode::Pair { leader, step } => self.pair(leader, step, p),
            Mode::Marking { walk, clean } => {
                let (a, next) = walk.step();
                match next {
                    Some(w) => Ok((a, Mode::Marking { walk: w, clean })),
                    None if clean => self.clean(false, p),
                    None => Ok((a, s.mode)),
                }
            }
            Mode::Clean { moved } => self.clean(moved, p),
            _ => self.solo(s, p),
        }
    }
}

fn is_solo(mode: &Mode) -> bool {
    !matches!(mode, Mode::Regather { .. } | Mode::Pair { .. } | Mode::Marking { .. } | Mode::Clean { .. })
}

impl Controller for Bhs32 {
    type State = State32;

    fn initial(&self) -> State32 {
        State32 { clock: 0, trail: Trail::default(), mode: Mode::Start }
    }

    fn step(&self, s: &State32, p: &Perception) -> Result<(Action, State32), ProtocolError> {
        let (a, mode) = self.dispatch(s, p)?;
        let mut trail = Trail::default();
        if is_solo(&mode) {
            trail = s.trail;
            match a.token {
                crate::agent::TokenOp::Put(x) => trail.put(x),
                crate::agent::TokenOp::Pick(x) => trail.pick(x),
                crate::agent::TokenOp::None => {}
            }
            if let Some(d) = a.mv {
                trail.step(d);
            }
        }
        let clock = (s.clock + 1) % self.magic;
        Ok((a, State32 { clock, trail, mode }))
    }

    fn badge(&self, s: &State32) -> Badge {
        match s.mode {
            Mode::Marking { .. } | Mode::Clean { .. } => Badge::Busy,
            Mode::Regather { leader: true, .. } | Mode::Pair { leader: true, .. } => Badge::Leader,
            Mode::Regather { leader: false, .. } | Mode::Pair { leader: false, .. } => Badge::Follower,
            _ => Badge::Solo,
        }
    }

    fn phase(&self, s: &State32) -> Phase {
        match s.mode {
            Mode::Start | Mode::FirstRing { .. } | Mode::FirstRingDone => Phase::FirstRing,
            Mode::Init { .. } => Phase::InitNextRing,
            Mode::Sweep(_) => Phase::NextRing,
            Mode::Hunt(_) => Phase::BlackHoleInNextRing,
            Mode::SeekTwo | Mode::WaitMeet | Mode::SeekMeet => Phase::SeekPartner,
            Mode::Regather { .. } | Mode::Pair { .. } => Phase::Colocated,
            Mode::Marking { .. } => Phase::MarkAll,
            Mode::Clean { .. } => Phase::Clean,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::PeerSet;
    use crate::torus::DirSet;

    fn seen(node_tokens: u8, carried: u8) -> Perception {
        Perception {
            arrived: None,
            node_tokens,
            carried,
            other_agent: false,
            peers: PeerSet::EMPTY,
            incident_danger: DirSet::EMPTY,
        }
    }

    #[test]
    fn roles_follow_arrival_order() {
        let mut p = seen(0, 2);
        p.arrived = Some(North);
        p.peers.insert(Badge::Solo, None);
        assert_eq!(pair_role(&p), Some(true));
        p.arrived = None;
        p.peers = PeerSet::EMPTY;
        p.peers.insert(Badge::Solo, Some(North));
        assert_eq!(pair_role(&p), Some(false));
        p.peers.insert(Badge::Solo, Some(West));
        assert_eq!(pair_role(&p), None);
    }

    #[test]
    fn first_ring_idles_until_the_move_offset() {
        let ctrl = Bhs32::new(40);
        let mut s = ctrl.initial();
        let (a, next) = ctrl.step(&s, &seen(0, 2)).unwrap();
        assert_eq!(a, Action::put(2));
        s = next;
        let mut carried = 0;
        for c in 1..MOVE_OFFSET {
            let (a, next) = ctrl.step(&s, &seen(2, carried)).unwrap();
            assert_eq!(a, Action::IDLE, "offset {c}");
            s = next;
        }
        let (a, next) = ctrl.step(&s, &seen(2, carried)).unwrap();
        assert_eq!(a.mv, Some(East));
        s = next;
        let (a, next) = ctrl.step(&s, &seen(0, carried)).unwrap();
        assert_eq!(a.mv, Some(West));
        s = next;
        let (a, next) = ctrl.step(&s, &seen(2, carried)).unwrap();
        assert_eq!(a, Action::pick(1).then_go(East));
        carried += 1;
        s = next;
        let (a, _) = ctrl.step(&s, &seen(0, carried)).unwrap();
        assert_eq!(a, Action::put(1));
    }

    #[test]
    fn clock_wraps_at_the_magic_number() {
        let ctrl = Bhs32::new(20);
        let mut s = ctrl.initial();
        for _ in 0..20 {
            s = ctrl.step(&s, &seen(1, 1)).unwrap().1;
        }
        assert_eq!(s.clock, 0);
    }
}
