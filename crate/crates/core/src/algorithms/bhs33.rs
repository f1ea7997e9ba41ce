//! Ring-by-ring exploration with three tokens per agent (k ≥ 3).
//!
//! Every move into unexplored territory is a cautious-walk step, so all
//! agents share a three-round cadence: they inspect tokens on arrival,
//! drop tokens and step out in the same round, and pick the tokens up
//! again one round later. A node with two tokens therefore means the
//! owner died stepping East, three tokens that it died stepping South.

use crate::agent::{Action, Badge, Controller, Declaration, Perception, Phase, ProtocolError};
use crate::algorithms::common::{must_yield, MarkAllWalk};
use crate::torus::Direction;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Bhs33;

/// What the agent is doing when it next inspects a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Goal {
    /// Walking East around the current ring; `homebases` counts single-token nodes seen.
    Ring { homebases: u8 },
    /// Just came down a ring; looking East for an empty node to settle on.
    Settle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum State33 {
    Start,
    Probe { dir: Direction, pick: u8, goal: Goal },
    Return { dir: Direction, pick: u8, goal: Goal },
    Inspect(Goal),
    Yield { rounds: u8, goal: Goal },
    Marking(MarkAllWalk),
}

/// Out towards `dir` with `put` tokens left behind, to be picked up as `pick`.
fn step_out(dir: Direction, put: u8, pick: u8, goal: Goal) -> (Action, State33) {
    (Action::put(put).then_go(dir), State33::Probe { dir, pick, goal })
}

fn mark_all(toward: Direction) -> (Action, State33) {
    let (a, next) = MarkAllWalk::new(toward).step();
    (a, next.map_or(State33::Marking(MarkAllWalk::new(toward)), State33::Marking))
}

impl Bhs33 {
    fn inspect(&self, goal: Goal, p: &Perception) -> Result<(Action, State33), ProtocolError> {
        if !p.incident_danger.is_empty() {
            return Ok((Action::declaring(Declaration::Terminated), State33::Inspect(goal)));
        }
        if must_yield(p) {
            return Ok((Action::IDLE, State33::Yield { rounds: 2, goal }));
        }
        let n = p.node_tokens;
        match (goal, n) {
            (_, 2) => Ok(mark_all(Direction::East)),
            (_, 3) => Ok(mark_all(Direction::South)),
            (Goal::Ring { homebases }, 1) => {
                if p.carried != 2 {
                    return Err(ProtocolError("ring walker must carry two tokens"));
                }
                if homebases + 1 == 2 {
                    // Take the homebase token along and probe South with three.
                    Ok(step_out(Direction::South, 2, 3, Goal::Settle))
                } else {
                    Ok(step_out(Direction::East, 1, 1, Goal::Ring { homebases: homebases + 1 }))
                }
            }
            (Goal::Ring { homebases }, 0) => Ok(step_out(Direction::East, 2, 2, Goal::Ring { homebases })),
            (Goal::Settle, 1) => Ok(step_out(Direction::East, 1, 1, Goal::Settle)),
            (Goal::Settle, 0) => {
                if p.carried != 3 {
                    return Err(ProtocolError("settling agent must carry three tokens"));
                }
                Ok(step_out(Direction::East, 2, 1, Goal::Ring { homebases: 0 }))
            }
            _ => Err(ProtocolError("more than three tokens on a node")),
        }
    }
}

impl Controller for Bhs33 {
    type State = State33;

    fn initial(&self) -> State33 {
        State33::Start
    }

    fn step(&self, s: &State33, p: &Perception) -> Result<(Action, State33), ProtocolError> {
        match *s {
            State33::Start => self.inspect(Goal::Settle, p),
            State33::Probe { dir, pick, goal } => Ok((Action::go(dir.opposite()), State33::Return { dir, pick, goal })),
            State33::Return { dir, pick, goal } => Ok((Action::pick(pick).then_go(dir), State33::Inspect(goal))),
            State33::Inspect(goal) => self.inspect(goal, p),
            State33::Yield { rounds: 0, goal } => self.inspect(goal, p),
            State33::Yield { rounds, goal } => Ok((Action::IDLE, State33::Yield { rounds: rounds - 1, goal })),
            State33::Marking(walk) => {
                let (a, next) = walk.step();
                Ok((a, next.map_or(*s, State33::Marking)))
            }
        }
    }

    fn badge(&self, s: &State33) -> Badge {
        match s {
            State33::Marking(_) => Badge::Busy,
            _ => Badge::Solo,
        }
    }

    fn phase(&self, s: &State33) -> Phase {
        match s {
            State33::Marking(_) => Phase::MarkAll,
            State33::Probe { goal: Goal::Settle, .. }
            | State33::Return { goal: Goal::Settle, .. }
            | State33::Inspect(Goal::Settle)
            | State33::Yield { goal: Goal::Settle, .. } => Phase::Descend,
            _ => Phase::Explore,
        }
    }
}
