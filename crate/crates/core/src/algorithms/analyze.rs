//! Observation sequences recorded while sweeping a ring, and the decision
//! taken from them once the sweep is over.

use core::fmt;

/// One observation: tokens seen on the ring below (`B`) or on the current ring (`T`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    B1,
    B2,
    T1,
    T2,
}

impl Symbol {
    const fn code(self) -> u64 {
        self as u64
    }

    const fn from_code(c: u64) -> Symbol {
        match c & 3 {
            0 => Symbol::B1,
            1 => Symbol::B2,
            2 => Symbol::T1,
            _ => Symbol::T2,
        }
    }

    pub const fn is_below(self) -> bool {
        matches!(self, Symbol::B1 | Symbol::B2)
    }

    pub const fn below(tokens: u8) -> Option<Symbol> {
        match tokens {
            0 => None,
            1 => Some(Symbol::B1),
            _ => Some(Symbol::B2),
        }
    }

    pub const fn current(tokens: u8) -> Option<Symbol> {
        match tokens {
            0 => None,
            1 => Some(Symbol::T1),
            _ => Some(Symbol::T2),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::B1 => "b1",
            Symbol::B2 => "b2",
            Symbol::T1 => "t1",
            Symbol::T2 => "t2",
        })
    }
}

/// Longest sequence a sweep can produce.
pub const MAX_SEQUENCE: usize = 24;

/// Packed sequence of at most 24 symbols, two bits each.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequence {
    bits: u64,
    len: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("observation sequence longer than 24 symbols")]
pub struct SequenceFull;

impl Sequence {
    pub const EMPTY: Sequence = Sequence { bits: 0, len: 0 };

    pub const fn len(&self) -> usize {
        self.len as usize
    }

    pub const fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, s: Symbol) -> Result<(), SequenceFull> {
        if self.len() == MAX_SEQUENCE {
            return Err(SequenceFull);
        }
        self.bits |= s.code() << (2 * self.len);
        self.len += 1;
        Ok(())
    }

    pub fn get(&self, idx: usize) -> Symbol {
        Symbol::from_code(self.bits >> (2 * idx))
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.len()).map(move |k| self.get(k))
    }

    pub fn from_symbols(symbols: &[Symbol]) -> Result<Sequence, SequenceFull> {
        let mut s = Sequence::EMPTY;
        for &x in symbols {
            s.push(x)?;
        }
        Ok(s)
    }

    /// Parse the textual form, e.g. `"b1t1t2"`.
    pub fn parse(text: &str) -> Option<Sequence> {
        let bytes = text.as_bytes();
        if bytes.len() % 2 != 0 {
            return None;
        }
        let mut s = Sequence::EMPTY;
        for pair in bytes.chunks(2) {
            let sym = match pair {
                b"b1" => Symbol::B1,
                b"b2" => Symbol::B2,
                b"t1" => Symbol::T1,
                b"t2" => Symbol::T2,
                _ => return None,
            };
            s.push(sym).ok()?;
        }
        Some(s)
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.iter() {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AnalyzeOutcome {
    /// Move one ring down and sweep again.
    DescendSafe,
    /// Walk East to the two-token node and mark around its South neighbour.
    LocateByTwoTokenNode,
    /// The black hole is on the ring below; hunt for it from this ring.
    BlackHoleInCurrentNextRing,
    /// Stay put until the other live agent arrives.
    WaitToMeet,
    /// Walk East until the other live agent is met.
    SeekEastToMeet,
    /// Move one ring down, then hunt on the ring below that.
    DescendThenBlackHoleInNextRing,
}

/// The sequence of a lone agent that watched another lone agent sweep the ring below.
const PARALLEL_SWEEP: [Symbol; 12] = [
    Symbol::B1,
    Symbol::T1,
    Symbol::B1,
    Symbol::T1,
    Symbol::B1,
    Symbol::T1,
    Symbol::B2,
    Symbol::T2,
    Symbol::B2,
    Symbol::T2,
    Symbol::B2,
    Symbol::T2,
];

/// Decide what to do after a sweep, given the sequence and the number of
/// tokens in hand. The first matching rule wins.
pub fn analyze(sequence: &Sequence, carried: u8) -> AnalyzeOutcome {
    let parallel = sequence.len() == PARALLEL_SWEEP.len() && sequence.iter().eq(PARALLEL_SWEEP);
    if parallel || !sequence.iter().any(Symbol::is_below) {
        return AnalyzeOutcome::DescendSafe;
    }
    if sequence.iter().filter(|&s| s == Symbol::T2).count() < 3 {
        return if carried == 1 {
            AnalyzeOutcome::LocateByTwoTokenNode
        } else {
            AnalyzeOutcome::BlackHoleInCurrentNextRing
        };
    }
    let adjacent_t = (1..sequence.len()).any(|k| !sequence.get(k - 1).is_below() && !sequence.get(k).is_below());
    if adjacent_t {
        return if sequence.get(0).is_below() {
            AnalyzeOutcome::WaitToMeet
        } else {
            AnalyzeOutcome::SeekEastToMeet
        };
    }
    AnalyzeOutcome::DescendThenBlackHoleInNextRing
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn text_round_trip() {
        let s = Sequence::parse("b1t1b2t2").unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.to_string(), "b1t1b2t2");
        assert!(Sequence::parse("b3").is_none());
        assert!(Sequence::parse("b").is_none());
    }

    #[test]
    fn capacity_is_24() {
        let mut s = Sequence::EMPTY;
        for _ in 0..MAX_SEQUENCE {
            s.push(Symbol::T2).unwrap();
        }
        assert_eq!(s.push(Symbol::B1), Err(SequenceFull));
        assert!(s.iter().all(|x| x == Symbol::T2));
    }

    #[test]
    fn empty_sequence_descends() {
        assert_eq!(analyze(&Sequence::EMPTY, 2), AnalyzeOutcome::DescendSafe);
    }
}
