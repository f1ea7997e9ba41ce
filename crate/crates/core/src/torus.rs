//! Oriented torus: coordinates, directions, tokens and link marks.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Smallest admissible ring length in either dimension.
pub const MIN_SIDE: u16 = 3;
/// A node never holds more tokens than this, and no agent carries more.
pub const TOKEN_CAP: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    North,
    East,
    South,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::East, Direction::South, Direction::West];

    pub const fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::East => Direction::West,
            Direction::South => Direction::North,
            Direction::West => Direction::East,
        }
    }

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn letter(self) -> char {
        match self {
            Direction::North => 'N',
            Direction::East => 'E',
            Direction::South => 'S',
            Direction::West => 'W',
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A set of directions packed into the low four bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DirSet(u8);

impl DirSet {
    pub const EMPTY: DirSet = DirSet(0);

    pub const fn bits(self) -> u8 {
        self.0
    }

    pub const fn from_bits(bits: u8) -> DirSet {
        DirSet(bits & 0x0f)
    }

    pub const fn contains(self, d: Direction) -> bool {
        self.0 & (1 << d as u8) != 0
    }

    pub fn insert(&mut self, d: Direction) -> bool {
        let fresh = !self.contains(d);
        self.0 |= 1 << d as u8;
        fresh
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn iter(self) -> impl Iterator<Item = Direction> {
        Direction::ALL.into_iter().filter(move |d| self.contains(*d))
    }
}

impl FromIterator<Direction> for DirSet {
    fn from_iter<I: IntoIterator<Item = Direction>>(iter: I) -> Self {
        let mut s = DirSet::EMPTY;
        for d in iter {
            s.insert(d);
        }
        s
    }
}

/// Node coordinate `(i, j)`: `i` is the row (North/South axis), `j` the column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Coord {
    pub i: u16,
    pub j: u16,
}

impl Coord {
    pub const fn new(i: u16, j: u16) -> Coord {
        Coord { i, j }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TorusDims {
    /// Number of rows (length of a vertical ring).
    pub n: u16,
    /// Number of columns (length of a horizontal ring).
    pub m: u16,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WorldError {
    #[error("torus {n}x{m} is too small: both sides must be at least 3")]
    DimensionsTooSmall { n: u16, m: u16 },
    #[error("coordinate {at} lies outside the torus")]
    OutOfBounds { at: Coord },
    #[error("putting {put} token(s) on {at} holding {held} exceeds the cap of 3")]
    TokenCapExceeded { at: Coord, held: u8, put: u8 },
    #[error("picking {pick} token(s) from {at} holding only {held}")]
    TokenUnderflow { at: Coord, held: u8, pick: u8 },
}

impl TorusDims {
    pub fn new(n: u16, m: u16) -> Result<TorusDims, WorldError> {
        if n < MIN_SIDE || m < MIN_SIDE {
            return Err(WorldError::DimensionsTooSmall { n, m });
        }
        Ok(TorusDims { n, m })
    }

    pub const fn node_count(self) -> usize {
        self.n as usize * self.m as usize
    }

    pub const fn contains(self, c: Coord) -> bool {
        c.i < self.n && c.j < self.m
    }

    pub const fn index(self, c: Coord) -> usize {
        c.i as usize * self.m as usize + c.j as usize
    }

    pub const fn coord(self, idx: usize) -> Coord {
        Coord { i: (idx / self.m as usize) as u16, j: (idx % self.m as usize) as u16 }
    }

    pub const fn neighbor(self, c: Coord, d: Direction) -> Coord {
        match d {
            Direction::North => Coord { i: (c.i + self.n - 1) % self.n, j: c.j },
            Direction::South => Coord { i: (c.i + 1) % self.n, j: c.j },
            Direction::East => Coord { i: c.i, j: (c.j + 1) % self.m },
            Direction::West => Coord { i: c.i, j: (c.j + self.m - 1) % self.m },
        }
    }

    /// Shift by `(di, dj)` with wrap-around.
    pub const fn translate(self, c: Coord, di: u16, dj: u16) -> Coord {
        Coord { i: ((c.i as u32 + di as u32) % self.n as u32) as u16, j: ((c.j as u32 + dj as u32) % self.m as u32) as u16 }
    }

    pub fn iter(self) -> impl Iterator<Item = Coord> {
        (0..self.node_count()).map(move |k| self.coord(k))
    }
}

impl fmt::Display for TorusDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n, self.m)
    }
}

/// Mutable environment of one run. Marks are stored per `(node, direction)`
/// as four-bit masks; a link counts as marked when either endpoint marked it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    dims: TorusDims,
    black_hole: Coord,
    tokens: Vec<u8>,
    marks: Vec<DirSet>,
}

impl World {
    pub fn new(dims: TorusDims, black_hole: Coord) -> Result<World, WorldError> {
        if !dims.contains(black_hole) {
            return Err(WorldError::OutOfBounds { at: black_hole });
        }
        Ok(World {
            dims,
            black_hole,
            tokens: vec![0; dims.node_count()],
            marks: vec![DirSet::EMPTY; dims.node_count()],
        })
    }

    pub fn dims(&self) -> TorusDims {
        self.dims
    }

    pub fn black_hole(&self) -> Coord {
        self.black_hole
    }

    pub fn neighbor(&self, c: Coord, d: Direction) -> Coord {
        self.dims.neighbor(c, d)
    }

    pub fn tokens(&self, c: Coord) -> u8 {
        self.tokens[self.dims.index(c)]
    }

    pub fn total_tokens(&self) -> u32 {
        self.tokens.iter().map(|&t| t as u32).sum()
    }

    pub fn put_tokens(&mut self, c: Coord, s: u8) -> Result<(), WorldError> {
        let slot = &mut self.tokens[self.dims.index(c)];
        if *slot + s > TOKEN_CAP {
            return Err(WorldError::TokenCapExceeded { at: c, held: *slot, put: s });
        }
        *slot += s;
        Ok(())
    }

    pub fn pick_tokens(&mut self, c: Coord, s: u8) -> Result<(), WorldError> {
        let slot = &mut self.tokens[self.dims.index(c)];
        if s > *slot {
            return Err(WorldError::TokenUnderflow { at: c, held: *slot, pick: s });
        }
        *slot -= s;
        Ok(())
    }

    /// Mark the link leaving `c` towards `d`. Returns true when the mark is new.
    pub fn mark_link(&mut self, c: Coord, d: Direction) -> bool {
        self.marks[self.dims.index(c)].insert(d)
    }

    /// Marks placed at `c` itself.
    pub fn marks_at(&self, c: Coord) -> DirSet {
        self.marks[self.dims.index(c)]
    }

    /// Directions out of `c` whose link is marked from either endpoint.
    pub fn incident_danger(&self, c: Coord) -> DirSet {
        let own = self.marks_at(c);
        Direction::ALL
            .into_iter()
            .filter(|&d| own.contains(d) || self.marks_at(self.dims.neighbor(c, d)).contains(d.opposite()))
            .collect()
    }

    /// Every `(node, direction)` mark, in row-major node order.
    pub fn marked_links(&self) -> impl Iterator<Item = (Coord, Direction)> + '_ {
        self.marks
            .iter()
            .enumerate()
            .flat_map(move |(k, s)| s.iter().map(move |d| (self.dims.coord(k), d)))
    }

    pub fn mark_count(&self) -> u32 {
        self.marks.iter().map(|s| s.len()).sum()
    }

    /// The four `(safe neighbour, direction)` pairs whose links lead into the black hole.
    pub fn black_hole_links(&self) -> [(Coord, Direction); 4] {
        Direction::ALL.map(|d| (self.dims.neighbor(self.black_hole, d), d.opposite()))
    }

    /// True when a mark exists that is not one of the four links into the black hole.
    pub fn has_spurious_mark(&self) -> bool {
        let good = self.black_hole_links();
        self.marked_links().any(|l| !good.contains(&l))
    }

    /// Marks are exactly the four links into the black hole, each marked
    /// from its safe endpoint.
    pub fn marks_exact(&self) -> bool {
        self.mark_count() == 4 && self.black_hole_links().iter().all(|&(c, d)| self.marks_at(c).contains(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(n: u16, m: u16) -> TorusDims {
        TorusDims::new(n, m).unwrap()
    }

    #[test]
    fn neighbours_wrap_on_small_torus() {
        let d = dims(3, 3);
        assert_eq!(d.neighbor(Coord::new(0, 0), Direction::North), Coord::new(2, 0));
        assert_eq!(d.neighbor(Coord::new(0, 2), Direction::East), Coord::new(0, 0));
        assert_eq!(d.neighbor(Coord::new(1, 1), Direction::South), Coord::new(2, 1));
        assert_eq!(d.neighbor(Coord::new(1, 0), Direction::West), Coord::new(1, 2));
    }

    #[test]
    fn rejects_thin_tori() {
        assert_eq!(TorusDims::new(2, 5), Err(WorldError::DimensionsTooSmall { n: 2, m: 5 }));
        assert!(TorusDims::new(3, 2).is_err());
        assert!(TorusDims::new(3, 3).is_ok());
    }

    #[test]
    fn token_cap_and_underflow() {
        let mut w = World::new(dims(3, 3), Coord::new(0, 0)).unwrap();
        let c = Coord::new(1, 1);
        w.put_tokens(c, 2).unwrap();
        assert_eq!(w.put_tokens(c, 2), Err(WorldError::TokenCapExceeded { at: c, held: 2, put: 2 }));
        assert_eq!(w.tokens(c), 2);
        assert_eq!(w.pick_tokens(c, 3), Err(WorldError::TokenUnderflow { at: c, held: 2, pick: 3 }));
        w.pick_tokens(c, 2).unwrap();
        assert_eq!(w.tokens(c), 0);
    }

    #[test]
    fn incident_danger_sees_marks_from_both_ends() {
        let mut w = World::new(dims(4, 4), Coord::new(2, 2)).unwrap();
        w.mark_link(Coord::new(2, 1), Direction::East);
        assert!(w.incident_danger(Coord::new(2, 1)).contains(Direction::East));
        assert!(w.incident_danger(Coord::new(2, 2)).contains(Direction::West));
        assert!(w.incident_danger(Coord::new(1, 1)).is_empty());
    }

    #[test]
    fn exact_marks() {
        let mut w = World::new(dims(3, 4), Coord::new(0, 1)).unwrap();
        for (c, d) in w.black_hole_links() {
            assert!(!w.marks_exact());
            w.mark_link(c, d);
        }
        assert!(w.marks_exact());
        assert!(!w.has_spurious_mark());
        w.mark_link(Coord::new(2, 2), Direction::North);
        assert!(!w.marks_exact());
        assert!(w.has_spurious_mark());
    }
}
