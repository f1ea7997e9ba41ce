use bhs_core::torus::{Coord, DirSet, Direction, TorusDims, World, WorldError};
use proptest::prelude::*;

fn dims(n: u16, m: u16) -> TorusDims {
    TorusDims::new(n, m).unwrap()
}

#[test]
fn neighbour_examples() {
    assert_eq!(dims(3, 3).neighbor(Coord::new(0, 0), Direction::East), Coord::new(0, 1));
    assert_eq!(dims(3, 3).neighbor(Coord::new(0, 0), Direction::North), Coord::new(2, 0));
    assert_eq!(dims(4, 5).neighbor(Coord::new(3, 4), Direction::East), Coord::new(3, 0));
}

#[test]
fn neighbour_round_trip_up_to_8x8() {
    for n in 3..=8 {
        for m in 3..=8 {
            let d = dims(n, m);
            for c in d.iter() {
                for dir in Direction::ALL {
                    assert_eq!(d.neighbor(d.neighbor(c, dir), dir.opposite()), c);
                }
            }
        }
    }
}

#[test]
fn token_operations() {
    let mut w = World::new(dims(3, 3), Coord::new(2, 2)).unwrap();
    let c = Coord::new(0, 1);
    w.put_tokens(c, 1).unwrap();
    w.put_tokens(c, 2).unwrap();
    assert_eq!(w.tokens(c), 3);
    let mut w2 = World::new(dims(3, 3), Coord::new(2, 2)).unwrap();
    w2.put_tokens(c, 2).unwrap();
    assert!(matches!(w2.put_tokens(c, 2), Err(WorldError::TokenCapExceeded { .. })));
    assert!(matches!(w2.pick_tokens(Coord::new(1, 1), 1), Err(WorldError::TokenUnderflow { .. })));
}

#[test]
fn marking() {
    let mut w = World::new(dims(3, 3), Coord::new(1, 1)).unwrap();
    let c = Coord::new(0, 1);
    assert!(w.incident_danger(c).is_empty());
    assert!(w.mark_link(c, Direction::South));
    assert!(w.marks_at(c).contains(Direction::South));
    assert!(!w.marks_at(c).contains(Direction::North));
    assert!(!w.mark_link(c, Direction::South));
    assert_eq!(w.mark_count(), 1);
    assert_eq!(w.incident_danger(c), [Direction::South].into_iter().collect::<DirSet>());
    assert!(w.incident_danger(Coord::new(2, 0)).is_empty());
}

#[test]
fn success_predicate_examples() {
    let bh = Coord::new(1, 1);
    let four = [
        (Coord::new(0, 1), Direction::South),
        (Coord::new(2, 1), Direction::North),
        (Coord::new(1, 0), Direction::East),
        (Coord::new(1, 2), Direction::West),
    ];
    let mut w = World::new(dims(3, 3), bh).unwrap();
    for &(c, d) in &four[..3] {
        w.mark_link(c, d);
    }
    assert!(!w.marks_exact());
    w.mark_link(four[3].0, four[3].1);
    assert!(w.marks_exact());
    assert!(!w.has_spurious_mark());
    w.mark_link(Coord::new(0, 0), Direction::East);
    assert!(!w.marks_exact());
    assert!(w.has_spurious_mark());
}

proptest! {
    #[test]
    fn marks_only_grow(ops in prop::collection::vec((0u16..5, 0u16..6, 0usize..4), 0..40)) {
        let d = dims(5, 6);
        let mut w = World::new(d, Coord::new(4, 5)).unwrap();
        let mut last = 0;
        for (i, j, k) in ops {
            w.mark_link(Coord::new(i, j), Direction::ALL[k]);
            prop_assert!(w.mark_count() >= last);
            prop_assert!(w.marks_at(Coord::new(i, j)).contains(Direction::ALL[k]));
            last = w.mark_count();
        }
    }

    #[test]
    fn token_counts_stay_within_the_cap(ops in prop::collection::vec((0u16..3, 0u16..3, any::<bool>(), 0u8..4), 0..60)) {
        let mut w = World::new(dims(3, 3), Coord::new(1, 1)).unwrap();
        let mut model = [[0u8; 3]; 3];
        for (i, j, put, s) in ops {
            let c = Coord::new(i, j);
            let slot = &mut model[i as usize][j as usize];
            if put {
                let ok = *slot + s <= 3;
                prop_assert_eq!(w.put_tokens(c, s).is_ok(), ok);
                if ok { *slot += s; }
            } else {
                let ok = s <= *slot;
                prop_assert_eq!(w.pick_tokens(c, s).is_ok(), ok);
                if ok { *slot -= s; }
            }
            prop_assert_eq!(w.tokens(c), *slot);
            prop_assert!(w.tokens(c) <= 3);
        }
    }
}
