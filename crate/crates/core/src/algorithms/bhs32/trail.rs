//! Bounded memory of the agent's own recent token drops, so that two
//! agents who meet can walk back and collect them.

use crate::torus::Direction;

/// Moves remembered since the oldest tracked drop.
pub const TRAIL_CAP: u8 = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pile {
    /// Position on the trail: the node reached after `idx` moves.
    pub idx: u8,
    /// Zero marks an unused slot.
    pub count: u8,
}

/// Moves since the oldest remembered pile, two bits per move, plus up to
/// two piles placed along them. A step straight back is cancelled unless a
/// pile sits where the agent stands. When more than eight moves pile up the
/// oldest one is dropped together with any pile at its start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trail {
    moves: u16,
    len: u8,
    piles: [Pile; 2],
}

impl Trail {
    pub const fn len(&self) -> u8 {
        self.len
    }

    pub fn dir(&self, k: u8) -> Direction {
        Direction::ALL[((self.moves >> (2 * k)) & 3) as usize]
    }

    pub fn piles(&self) -> impl Iterator<Item = Pile> + '_ {
        self.piles.iter().copied().filter(|p| p.count > 0)
    }

    pub fn is_empty(&self) -> bool {
        self.piles().next().is_none()
    }

    pub fn pile_at(&self, idx: u8) -> Option<usize> {
        self.piles.iter().position(|p| p.count > 0 && p.idx == idx)
    }

    pub fn put(&mut self, s: u8) {
        if s == 0 {
            return;
        }
        if self.is_empty() {
            *self = Trail::default();
        }
        if let Some(k) = self.pile_at(self.len) {
            self.piles[k].count += s;
            return;
        }
        let k = match self.piles.iter().position(|p| p.count == 0) {
            Some(k) => k,
            None if self.piles[0].idx <= self.piles[1].idx => 0,
            None => 1,
        };
        self.piles[k] = Pile { idx: self.len, count: s };
    }

    pub fn pick(&mut self, s: u8) {
        if let Some(k) = self.pile_at(self.len) {
            let left = self.piles[k].count.saturating_sub(s);
            self.piles[k] = if left == 0 { Pile::default() } else { Pile { count: left, ..self.piles[k] } };
        }
        if self.is_empty() {
            *self = Trail::default();
        }
    }

    pub fn step(&mut self, d: Direction) {
        if self.is_empty() {
            return;
        }
        if self.len > 0 && self.dir(self.len - 1) == d.opposite() && self.pile_at(self.len).is_none() {
            self.len -= 1;
            self.moves &= !(3 << (2 * self.len));
            return;
        }
        if self.len == TRAIL_CAP {
            self.moves >>= 2;
            self.len -= 1;
            for p in &mut self.piles {
                if p.count > 0 {
                    if p.idx == 0 {
                        *p = Pile::default();
                    } else {
                        p.idx -= 1;
                    }
                }
            }
            if self.is_empty() {
                *self = Trail::default();
                return;
            }
        }
        self.moves |= (d.index() as u16) << (2 * self.len);
        self.len += 1;
    }

    /// Forget the pile at trail position `idx`.
    pub fn clear_pile(&mut self, idx: u8) {
        if let Some(k) = self.pile_at(idx) {
            self.piles[k] = Pile::default();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Direction::*;

    #[test]
    fn empty_trail_ignores_moves() {
        let mut t = Trail::default();
        t.step(East);
        assert_eq!(t, Trail::default());
    }

    #[test]
    fn back_and_forth_cancels() {
        let mut t = Trail::default();
        t.put(2);
        t.step(South);
        t.step(North);
        assert_eq!(t.len(), 0);
        assert_eq!(t.pile_at(0), Some(0));
    }

    #[test]
    fn step_back_onto_pile_keeps_the_newer_pile() {
        let mut t = Trail::default();
        t.put(1);
        t.step(East);
        t.put(1);
        t.step(West);
        assert_eq!(t.len(), 2);
        assert!(t.pile_at(1).is_some());
    }

    #[test]
    fn long_walks_forget_the_anchor() {
        let mut t = Trail::default();
        t.put(1);
        for _ in 0..TRAIL_CAP {
            t.step(East);
        }
        assert!(!t.is_empty());
        t.step(East);
        assert!(t.is_empty());
        assert_eq!(t.len(), 0);
    }

    #[test]
    fn picking_everything_resets() {
        let mut t = Trail::default();
        t.put(2);
        t.step(West);
        t.step(South);
        assert_eq!(t.len(), 2);
        t.step(North);
        t.step(East);
        t.pick(2);
        assert_eq!(t, Trail::default());
    }
}
