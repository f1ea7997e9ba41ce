//! Analyze against a direct, text-level restatement of its branch chain.

use bhs_core::algorithms::analyze::{analyze, AnalyzeOutcome, Sequence, Symbol};

const SAFE_LITERAL: &str = "b1t1b1t1b1t1b2t2b2t2b2t2";

/// Oracle over the textual form: tokens are two characters, `b`/`t` then the count.
fn oracle(text: &str, carried: u8) -> AnalyzeOutcome {
    let toks: Vec<&str> = (0..text.len() / 2).map(|i| &text[2 * i..2 * i + 2]).collect();
    if text == SAFE_LITERAL || !toks.iter().any(|t| t.starts_with('b')) {
        return AnalyzeOutcome::DescendSafe;
    }
    if toks.iter().filter(|t| **t == "t2").count() < 3 {
        return if carried == 1 {
            AnalyzeOutcome::LocateByTwoTokenNode
        } else {
            AnalyzeOutcome::BlackHoleInCurrentNextRing
        };
    }
    if toks.windows(2).any(|w| w[0].starts_with('t') && w[1].starts_with('t')) {
        return if toks[0].starts_with('b') { AnalyzeOutcome::WaitToMeet } else { AnalyzeOutcome::SeekEastToMeet };
    }
    AnalyzeOutcome::DescendThenBlackHoleInNextRing
}

const ALPHABET: [(Symbol, &str); 4] = [(Symbol::B1, "b1"), (Symbol::B2, "b2"), (Symbol::T1, "t1"), (Symbol::T2, "t2")];

#[test]
fn examples_from_the_proofs() {
    let cases = [
        (SAFE_LITERAL, 2, AnalyzeOutcome::DescendSafe),
        ("t1t1t1t2t2t2", 2, AnalyzeOutcome::DescendSafe),
        ("t1t1t1b1t1t1t1", 1, AnalyzeOutcome::LocateByTwoTokenNode),
        ("b1b1t1t1b1b1t1t2b1b1t2t2", 2, AnalyzeOutcome::WaitToMeet),
        ("t1b1b1t1t1b1b1t2t2b1b1t2", 2, AnalyzeOutcome::SeekEastToMeet),
        ("b1t1b1t1b1t1b1t2b1t2b1t2", 2, AnalyzeOutcome::DescendThenBlackHoleInNextRing),
    ];
    for (text, carried, want) in cases {
        let seq = Sequence::parse(text).unwrap();
        assert_eq!(analyze(&seq, carried), want, "{text}");
        assert_eq!(oracle(text, carried), want, "oracle on {text}");
    }
}

/// Every sequence of up to 12 symbols with at most six current-ring sightings.
#[test]
fn matches_the_oracle_up_to_length_12() {
    let mut checked = 0u64;
    let mut symbols = Vec::with_capacity(12);
    let mut text = String::with_capacity(24);
    for len in 0..=12u32 {
        for code in 0..4u64.pow(len) {
            symbols.clear();
            text.clear();
            let mut c = code;
            for _ in 0..len {
                let (s, t) = ALPHABET[(c % 4) as usize];
                symbols.push(s);
                text.push_str(t);
                c /= 4;
            }
            if symbols.iter().filter(|s| !s.is_below()).count() > 6 {
                continue;
            }
            let seq = Sequence::from_symbols(&symbols).unwrap();
            for carried in [1, 2] {
                assert_eq!(analyze(&seq, carried), oracle(&text, carried), "{text} carrying {carried}");
            }
            checked += 1;
        }
    }
    assert!(checked > 1_000_000);
}
