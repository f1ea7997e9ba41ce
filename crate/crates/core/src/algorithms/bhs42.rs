//! Ring-by-ring exploration with two tokens per agent (k ≥ 4).
//!
//! Same three-round cadence as the three-token variant. A node with two
//! tokens only says the black hole is East or South of it, so the finder
//! walks round to the South-West node to tell the two apart.

use crate::agent::{Action, Badge, Controller, Declaration, Perception, Phase, ProtocolError};
use crate::algorithms::common::{checker_must_yield, must_yield, MarkAllWalk};
use crate::torus::Direction;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Bhs42;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Goal {
    Ring { homebases: u8 },
    Settle,
    /// Standing South-West of a two-token node `u`.
    CheckCorner,
    /// Standing South of `u` after surviving the step East from the corner.
    CheckBelow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum State42 {
    Start,
    Probe { dir: Direction, pick: u8, goal: Goal },
    Return { dir: Direction, pick: u8, goal: Goal },
    Inspect(Goal),
    Yield { rounds: u8, goal: Goal },
    /// West of `u`; waits one round to keep the cadence, then heads South.
    CheckWest { waited: bool },
    /// Back North on `u`; marks around its East neighbour next round.
    MarkEastNext,
    Marking(MarkAllWalk),
}

fn step_out(dir: Direction, put: u8, pick: u8, goal: Goal) -> (Action, State42) {
    (Action::put(put).then_go(dir), State42::Probe { dir, pick, goal })
}

fn mark_all(toward: Direction) -> (Action, State42) {
    let (a, next) = MarkAllWalk::new(toward).step();
    (a, next.map_or(State42::Marking(MarkAllWalk::new(toward)), State42::Marking))
}

impl Bhs42 {
    fn inspect(&self, goal: Goal, p: &Perception) -> Result<(Action, State42), ProtocolError> {
        if goal == Goal::CheckBelow {
            return Ok((Action::go(Direction::North), State42::MarkEastNext));
        }
        if !p.incident_danger.is_empty() {
            return Ok((Action::declaring(Declaration::Terminated), State42::Inspect(goal)));
        }
        let yields = if goal == Goal::CheckCorner { checker_must_yield(p) } else { must_yield(p) };
        if yields {
            return Ok((Action::IDLE, State42::Yield { rounds: 2, goal }));
        }
        let n = p.node_tokens;
        match goal {
            Goal::CheckCorner => {
                if n >= 2 {
                    Ok(mark_all(Direction::East))
                } else {
                    Ok(step_out(Direction::East, 1, 1, Goal::CheckBelow))
                }
            }
            _ if n >= 2 => Ok((Action::go(Direction::West), State42::CheckWest { waited: false })),
            Goal::Ring { homebases } => {
                if p.carried != 1 {
                    return Err(ProtocolError("ring walker must carry one token"));
                }
                match n {
                    1 if homebases + 1 == 3 => {
                        // Lift the homebase token and probe South with two.
                        Ok(step_out(Direction::South, 1, 2, Goal::Settle))
                    }
                    1 => Ok(step_out(Direction::East, 1, 1, Goal::Ring { homebases: homebases + 1 })),
                    _ => Ok(step_out(Direction::East, 1, 1, Goal::Ring { homebases })),
                }
            }
            Goal::Settle => {
                if p.carried != 2 {
                    return Err(ProtocolError("settling agent must carry two tokens"));
                }
                match n {
                    1 => Ok(step_out(Direction::East, 1, 1, Goal::Settle)),
                    _ => Ok(step_out(Direction::East, 2, 1, Goal::Ring { homebases: 0 })),
                }
            }
            Goal::CheckBelow => unreachable!(),
        }
    }
}

impl Controller for Bhs42 {
    type State = State42;

    fn initial(&self) -> State42 {
        State42::Start
    }

    fn step(&self, s: &State42, p: &Perception) -> Result<(Action, State42), ProtocolError> {
        match *s {
            State42::Start => self.inspect(Goal::Settle, p),
            State42::Probe { dir, pick, goal } => Ok((Action::go(dir.opposite()), State42::Return { dir, pick, goal })),
            State42::Return { dir, pick, goal } => Ok((Action::pick(pick).then_go(dir), State42::Inspect(goal))),
            State42::Inspect(goal) => self.inspect(goal, p),
            State42::Yield { rounds: 0, goal } => self.inspect(goal, p),
            State42::Yield { rounds, goal } => Ok((Action::IDLE, State42::Yield { rounds: rounds - 1, goal })),
            State42::CheckWest { waited: false } => Ok((Action::IDLE, State42::CheckWest { waited: true })),
            State42::CheckWest { waited: true } => Ok((Action::go(Direction::South), State42::Inspect(Goal::CheckCorner))),
            State42::MarkEastNext => Ok(mark_all(Direction::East)),
            State42::Marking(walk) => {
                let (a, next) = walk.step();
                Ok((a, next.map_or(*s, State42::Marking)))
            }
        }
    }

    fn badge(&self, s: &State42) -> Badge {
        match s {
            State42::Marking(_) => Badge::Busy,
            State42::Inspect(Goal::CheckCorner) | State42::Yield { goal: Goal::CheckCorner, .. } => Badge::Checking,
            _ => Badge::Solo,
        }
    }

    fn phase(&self, s: &State42) -> Phase {
        match s {
            State42::Marking(_) | State42::MarkEastNext => Phase::MarkAll,
            State42::CheckWest { .. }
            | State42::Inspect(Goal::CheckCorner | Goal::CheckBelow)
            | State42::Probe { goal: Goal::CheckBelow, .. }
            | State42::Return { goal: Goal::CheckBelow, .. }
            | State42::Yield { goal: Goal::CheckCorner, .. } => Phase::Verify,
            State42::Probe { goal: Goal::Settle, .. }
            | State42::Return { goal: Goal::Settle, .. }
            | State42::Inspect(Goal::Settle)
            | State42::Yield { goal: Goal::Settle, .. } => Phase::Descend,
            _ => Phase::Explore,
        }
    }
}
