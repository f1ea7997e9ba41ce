//! Magic-number audit.
//!
//! Every scheduled sub-procedure of the three-agent algorithm has to finish
//! inside a single big-step. The audit drives the real controller through
//! every sequence of token counts it could perceive (0, 1 or 2 per node),
//! starting at the beginning of each kind of big-step, and records the last
//! offset at which the agent still acts before idling to the boundary.
//! Branches that leave the big-step discipline (Mark-All, hunting, waiting
//! for a partner) end the exploration.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU32, Ordering};

use crate::agent::{Action, Controller, Perception, PeerSet, TokenOp};
use crate::algorithms::analyze::Sequence;
use crate::algorithms::bhs32::{Bhs32, Mode, State32, Sweep, Trail};
use crate::torus::{DirSet, Direction};

/// Offsets explored per big-step. Far beyond any schedule.
const HORIZON: u16 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProcedureSpan {
    pub name: &'static str,
    /// Last offset with a non-idle action.
    pub last_busy: u16,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AuditReport {
    pub procedures: Vec<ProcedureSpan>,
    /// Rounds from the start of InitNextRing until the sweep takes over.
    pub init_next_ring_rounds: u16,
    /// Latest arrival of any InitNextRing trajectory, counting the Mark-All
    /// circuits it launches, in rounds from its start.
    pub init_next_ring_longest: u16,
    /// Smallest big-step that holds every procedure.
    pub minimal_magic_number: u32,
}

#[derive(Default)]
struct Probe {
    last_busy: u16,
    init_last: u16,
    init_mark_end: u16,
}

fn busy(a: &Action) -> bool {
    a.token != TokenOp::None || a.mv.is_some() || a.mark.is_some() || a.declare.is_some()
}

fn scheduled(mode: &Mode) -> bool {
    matches!(mode, Mode::Start | Mode::FirstRing { .. } | Mode::FirstRingDone | Mode::Init { .. } | Mode::Sweep(_))
}

fn explore(ctrl: &Bhs32, start: State32, carried: u8) -> Probe {
    let mut probe = Probe::default();
    let mut seen = BTreeSet::new();
    let mut stack: Vec<(State32, u8, Option<Direction>)> = Vec::from([(start, carried, None)]);
    while let Some((s, carried, arrived)) = stack.pop() {
        if !seen.insert((s, carried, arrived)) {
            continue;
        }
        for node_tokens in 0..=2u8 {
            let p = Perception {
                arrived,
                node_tokens,
                carried,
                other_agent: false,
                peers: PeerSet::EMPTY,
                incident_danger: DirSet::EMPTY,
            };
            let Ok((a, next)) = ctrl.step(&s, &p) else { continue };
            if busy(&a) {
                probe.last_busy = probe.last_busy.max(s.clock);
            }
            if let Mode::Init { .. } = s.mode {
                let t = s.clock - super::bhs32::INIT_START;
                probe.init_last = probe.init_last.max(t + 1);
                if let Mode::Marking { .. } = next.mode {
                    // Eight moves round the circuit, one per round.
                    probe.init_mark_end = probe.init_mark_end.max(t + 8);
                }
            }
            if a.declare.is_some() || !scheduled(&next.mode) || next.clock == 0 || next.clock >= HORIZON {
                continue;
            }
            let carried = match a.token {
                TokenOp::Put(x) => carried - x,
                TokenOp::Pick(x) => carried + x,
                TokenOp::None => carried,
            };
            stack.push((next, carried, a.mv));
        }
    }
    probe
}

fn at_offset_zero(mode: Mode) -> State32 {
    State32 { clock: 0, trail: Trail::default(), mode }
}

/// Run the audit.
pub fn audit() -> AuditReport {
    let ctrl = Bhs32::new(u16::MAX as u32);
    let mut procedures = Vec::new();

    let first = explore(&ctrl, ctrl.initial(), 2);
    procedures.push(ProcedureSpan { name: "FirstRing (looking for a homebase)", last_busy: first.last_busy });

    let mut counting = 0;
    for count in 1..6 {
        counting = counting.max(explore(&ctrl, at_offset_zero(Mode::FirstRing { count }), 0).last_busy);
    }
    procedures.push(ProcedureSpan { name: "FirstRing (counting homebases)", last_busy: counting });

    let init = explore(&ctrl, at_offset_zero(Mode::FirstRingDone), 0);
    procedures.push(ProcedureSpan { name: "InitNextRing and first NextRing step", last_busy: init.last_busy });

    let mut sweep = 0;
    for count in 0..6 {
        for danger in [false, true] {
            for w in 0..=2 {
                let sw = Sweep { count, seq: Sequence::EMPTY, danger, w, detour: false, shift: 0 };
                sweep = sweep.max(explore(&ctrl, at_offset_zero(Mode::Sweep(sw)), 0).last_busy);
            }
        }
    }
    procedures.push(ProcedureSpan { name: "NextRing step", last_busy: sweep });

    let minimal = procedures.iter().map(|p| p.last_busy as u32 + 1).max().unwrap_or(1);
    AuditReport {
        procedures,
        init_next_ring_rounds: init.init_last,
        init_next_ring_longest: init.init_mark_end.max(init.init_last),
        minimal_magic_number: minimal,
    }
}

static MINIMAL: AtomicU32 = AtomicU32::new(0);

/// Audited minimum for the magic number, computed once.
pub fn minimal_magic_number() -> u32 {
    match MINIMAL.load(Ordering::Relaxed) {
        0 => {
            let m = audit().minimal_magic_number;
            MINIMAL.store(m, Ordering::Relaxed);
            m
        }
        m => m,
    }
}

/// Whether `magic_number` is at least the audited minimum.
pub fn accepts(magic_number: u32) -> bool {
    magic_number >= minimal_magic_number()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::DEFAULT_MAGIC_NUMBER;

    #[test]
    fn shipped_magic_number_is_the_audited_minimum() {
        let r = audit();
        assert_eq!(r.minimal_magic_number, DEFAULT_MAGIC_NUMBER);
        assert_eq!(r.init_next_ring_rounds, 12);
        assert_eq!(r.init_next_ring_longest, 19);
        assert!(accepts(DEFAULT_MAGIC_NUMBER));
        assert!(!accepts(DEFAULT_MAGIC_NUMBER - 1));
    }
}
