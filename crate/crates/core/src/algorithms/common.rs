//! Building blocks shared by the controllers: cautious-walk scripts,
//! the Mark-All circuit and the co-location yield rule.

use crate::agent::{arrival_rank, Action, Badge, Declaration, Perception, TokenOp};
use crate::torus::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("cautious walk needs {needed} token(s) but the agent carries {carried}")]
pub struct ShortOfTokens {
    pub needed: u8,
    pub carried: u8,
}

/// The three rounds of one cautious-walk step towards `dir`: top the launch
/// node up to `x` tokens and step out, step back, then pick the released
/// tokens and step out for good.
pub fn cautious_walk_script(dir: Direction, x: u8, node_tokens: u8, carried: u8) -> Result<[Action; 3], ShortOfTokens> {
    let released = x.saturating_sub(node_tokens);
    if released > carried {
        return Err(ShortOfTokens { needed: released, carried });
    }
    Ok([
        Action::put(released).then_go(dir),
        Action::go(dir.opposite()),
        Action::pick(released).then_go(dir),
    ])
}

/// Token operations of a script, flattened for display and tests.
pub fn script_steps(script: &[Action]) -> impl Iterator<Item = ScriptStep> + '_ {
    script.iter().flat_map(|a| {
        let tok = match a.token {
            TokenOp::None => None,
            TokenOp::Put(s) => Some(ScriptStep::Put(s)),
            TokenOp::Pick(s) => Some(ScriptStep::Pick(s)),
        };
        tok.into_iter().chain(a.mv.map(ScriptStep::Move))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScriptStep {
    Put(u8),
    Pick(u8),
    Move(Direction),
}

/// Positions around the suspected black hole `w`, clockwise from North.
const CIRCUIT_STEP: [Direction; 8] = [
    Direction::East,  // N  -> NE
    Direction::South, // NE -> E
    Direction::South, // E  -> SE
    Direction::West,  // SE -> S
    Direction::West,  // S  -> SW
    Direction::North, // SW -> W
    Direction::North, // W  -> NW
    Direction::East,  // NW -> N
];

/// Walk once around `w` through its eight surrounding nodes, marking the
/// link into `w` from each of the four neighbours. Ends where it started.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkAllWalk {
    slot: u8,
    moves: u8,
}

impl MarkAllWalk {
    /// Start on the neighbour of `w` from which `w` lies towards `toward`.
    pub const fn new(toward: Direction) -> MarkAllWalk {
        let slot = match toward {
            Direction::South => 0,
            Direction::West => 2,
            Direction::North => 4,
            Direction::East => 6,
        };
        MarkAllWalk { slot, moves: 0 }
    }

    /// Action for this round and the walk state afterwards (`None` when done).
    pub fn step(self) -> (Action, Option<MarkAllWalk>) {
        let mut a = Action::IDLE;
        if self.slot % 2 == 0 && self.moves < 8 {
            a.mark = Some(match self.slot {
                0 => Direction::South,
                2 => Direction::West,
                4 => Direction::North,
                _ => Direction::East,
            });
        }
        if self.moves == 8 {
            a.declare = Some(Declaration::FoundBlackHole);
            return (a, None);
        }
        a.mv = Some(CIRCUIT_STEP[self.slot as usize]);
        (a, Some(MarkAllWalk { slot: (self.slot + 1) % 8, moves: self.moves + 1 }))
    }
}

/// Two explorers deciding on the same node in the same round would both
/// drop tokens against the same snapshot. The one whose arrival ranks
/// higher stands aside for one cadence.
pub fn must_yield(p: &Perception) -> bool {
    let mine = arrival_rank(p.arrived);
    p.peers.arrivals(Badge::Solo).any(|a| arrival_rank(a) < mine)
}

/// An agent about to test a two-token node lets every explorer on its node
/// act first: an explorer dying there leaves the tokens that settle the test.
pub fn checker_must_yield(p: &Perception) -> bool {
    let mine = arrival_rank(p.arrived);
    p.peers.any_badge(Badge::Solo) || p.peers.arrivals(Badge::Checking).any(|a| arrival_rank(a) < mine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{Coord, TorusDims, World};
    use alloc::vec::Vec;

    #[test]
    fn east_two_from_empty_node() {
        let s = cautious_walk_script(Direction::East, 2, 0, 2).unwrap();
        let steps: Vec<_> = script_steps(&s).collect();
        assert_eq!(
            steps,
            [
                ScriptStep::Put(2),
                ScriptStep::Move(Direction::East),
                ScriptStep::Move(Direction::West),
                ScriptStep::Pick(2),
                ScriptStep::Move(Direction::East)
            ]
        );
    }

    #[test]
    fn south_three_on_a_homebase_token() {
        let s = cautious_walk_script(Direction::South, 3, 1, 2).unwrap();
        assert_eq!(s[0].token, TokenOp::Put(2));
        assert_eq!(s[0].mv, Some(Direction::South));
        assert_eq!(s[1].mv, Some(Direction::North));
        assert_eq!(s[2].token, TokenOp::Pick(2));
        assert_eq!(s[2].mv, Some(Direction::South));
    }

    #[test]
    fn script_needs_enough_tokens() {
        assert_eq!(cautious_walk_script(Direction::East, 2, 0, 1), Err(ShortOfTokens { needed: 2, carried: 1 }));
        assert!(cautious_walk_script(Direction::East, 2, 2, 0).is_ok());
    }

    fn run_mark_all(n: u16, m: u16, bh: Coord, toward: Direction) -> (World, Coord, usize) {
        let dims = TorusDims::new(n, m).unwrap();
        let mut w = World::new(dims, bh).unwrap();
        let mut pos = dims.neighbor(bh, toward.opposite());
        let start = pos;
        let mut walk = Some(MarkAllWalk::new(toward));
        let mut rounds = 0;
        while let Some(st) = walk {
            let (a, next) = st.step();
            if let Some(d) = a.mark {
                w.mark_link(pos, d);
            }
            if let Some(d) = a.mv {
                pos = dims.neighbor(pos, d);
                assert_ne!(pos, bh, "circuit entered the black hole");
            }
            walk = next;
            rounds += 1;
        }
        assert_eq!(pos, start);
        (w, pos, rounds)
    }

    #[test]
    fn mark_all_marks_exactly_four_links_on_3x3() {
        for toward in Direction::ALL {
            let (w, _, rounds) = run_mark_all(3, 3, Coord::new(1, 1), toward);
            assert!(w.marks_exact(), "{toward:?}");
            assert_eq!(rounds, 9);
        }
    }

    #[test]
    fn mark_all_wraps_around_the_seam() {
        let (w, _, _) = run_mark_all(4, 5, Coord::new(0, 4), Direction::East);
        assert!(w.marks_exact());
    }
}
