//! What an agent perceives, what it may do, and the controller contract.

use core::fmt::Debug;
use core::hash::Hash;

use crate::torus::{DirSet, Direction};

/// Public appearance of an agent to others standing on the same node.
///
/// Agents exchange information only when co-located. The badge is the part
/// of an agent's state that others can read at such a meeting; it is a pure
/// function of the controller state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Badge {
    /// Exploring alone; open to pairing.
    Solo,
    /// Running a fixed routine (marking, cleaning) and ignoring company.
    Busy,
    /// Leader of a co-located pair.
    Leader,
    /// Follower of a co-located pair.
    Follower,
    /// Declared and stopped.
    Done,
    /// About to test which neighbour of a two-token node is the black hole.
    Checking,
}

impl Badge {
    pub const ALL: [Badge; 6] = [Badge::Solo, Badge::Busy, Badge::Leader, Badge::Follower, Badge::Done, Badge::Checking];

    const fn index(self) -> u32 {
        self as u32
    }

    pub const fn is_pair(self) -> bool {
        matches!(self, Badge::Leader | Badge::Follower)
    }
}

/// Arrival code: 0 for "did not move", 1 + direction index otherwise.
const fn arrival_code(a: Option<Direction>) -> u32 {
    match a {
        None => 0,
        Some(d) => 1 + d as u32,
    }
}

/// Set of `(badge, arrival)` pairs describing the other agents on a node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeerSet(u32);

impl PeerSet {
    pub const EMPTY: PeerSet = PeerSet(0);

    const fn bit(badge: Badge, arrived: Option<Direction>) -> u32 {
        1 << (badge.index() * 5 + arrival_code(arrived))
    }

    pub fn insert(&mut self, badge: Badge, arrived: Option<Direction>) {
        self.0 |= Self::bit(badge, arrived);
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn contains(self, badge: Badge, arrived: Option<Direction>) -> bool {
        self.0 & Self::bit(badge, arrived) != 0
    }

    pub const fn any_badge(self, badge: Badge) -> bool {
        self.0 & (0x1f << (badge.index() * 5)) != 0
    }

    pub fn any_pair(self) -> bool {
        self.any_badge(Badge::Leader) || self.any_badge(Badge::Follower)
    }

    /// Arrivals of peers wearing `badge`, as a sorted list of arrival codes.
    pub fn arrivals(self, badge: Badge) -> impl Iterator<Item = Option<Direction>> {
        [None, Some(Direction::North), Some(Direction::East), Some(Direction::South), Some(Direction::West)]
            .into_iter()
            .filter(move |a| self.contains(badge, *a))
    }
}

/// Strict priority between arrival codes used for symmetry breaking: movers
/// before agents that stayed, then North, East, South, West. Agents that were
/// apart in the previous round and meet now always differ here.
pub const fn arrival_rank(a: Option<Direction>) -> u8 {
    match a {
        Some(Direction::North) => 0,
        Some(Direction::East) => 1,
        Some(Direction::South) => 2,
        Some(Direction::West) => 3,
        None => 4,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perception {
    /// Direction of this agent's own last move, `None` if it stayed.
    pub arrived: Option<Direction>,
    pub node_tokens: u8,
    pub carried: u8,
    pub other_agent: bool,
    pub peers: PeerSet,
    pub incident_danger: DirSet,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TokenOp {
    #[default]
    None,
    Put(u8),
    Pick(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Declaration {
    Terminated,
    FoundBlackHole,
}

/// One round of output. Applied in order: token op, mark, move.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub token: TokenOp,
    pub mark: Option<Direction>,
    pub mv: Option<Direction>,
    pub declare: Option<Declaration>,
}

impl Action {
    pub const IDLE: Action = Action { token: TokenOp::None, mark: None, mv: None, declare: None };

    pub const fn go(d: Direction) -> Action {
        Action { mv: Some(d), ..Action::IDLE }
    }

    pub const fn put(s: u8) -> Action {
        Action { token: if s == 0 { TokenOp::None } else { TokenOp::Put(s) }, ..Action::IDLE }
    }

    pub const fn pick(s: u8) -> Action {
        Action { token: if s == 0 { TokenOp::None } else { TokenOp::Pick(s) }, ..Action::IDLE }
    }

    pub const fn then_go(mut self, d: Direction) -> Action {
        self.mv = Some(d);
        self
    }

    pub const fn with_mark(mut self, d: Direction) -> Action {
        self.mark = Some(d);
        self
    }

    pub const fn declaring(d: Declaration) -> Action {
        Action { declare: Some(d), ..Action::IDLE }
    }
}

/// Coarse phase label carried into traces. Used for synchronisation checks
/// and for reading traces; controllers never branch on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Phase {
    Explore,
    Descend,
    Verify,
    FirstRing,
    InitNextRing,
    NextRing,
    BlackHoleInNextRing,
    SeekPartner,
    Colocated,
    MarkAll,
    Clean,
    Halted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("protocol violation: {0}")]
pub struct ProtocolError(pub &'static str);

/// A deterministic finite-state agent program.
///
/// `step` sees only the perception; it never learns the torus size or any
/// coordinate. States are small `Copy` records whose counters are capped by
/// constants, so the reachable state set is finite.
pub trait Controller {
    type State: Copy + Eq + Ord + Hash + Debug;

    fn initial(&self) -> Self::State;

    fn step(&self, state: &Self::State, p: &Perception) -> Result<(Action, Self::State), ProtocolError>;

    fn badge(&self, state: &Self::State) -> Badge;

    fn phase(&self, state: &Self::State) -> Phase;
}
