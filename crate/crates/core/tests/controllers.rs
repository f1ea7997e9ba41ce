//! Single-step behaviour of the three controllers.

use bhs_core::agent::{Action, Controller, Declaration, Perception, PeerSet, Phase, TokenOp};
use bhs_core::algorithms::bhs32::{Bhs32, Mode, State32, Trail, DECIDE_OFFSET};
use bhs_core::algorithms::bhs33::{Bhs33, Goal as Goal33, State33};
use bhs_core::algorithms::bhs42::{Bhs42, Goal as Goal42, State42};
use bhs_core::algorithms::DEFAULT_MAGIC_NUMBER;
use bhs_core::torus::{DirSet, Direction};

fn seen(arrived: Option<Direction>, node_tokens: u8, carried: u8) -> Perception {
    Perception { arrived, node_tokens, carried, other_agent: false, peers: PeerSet::EMPTY, incident_danger: DirSet::EMPTY }
}

fn drive<C: Controller>(c: &C, mut s: C::State, ps: &[Perception]) -> (Vec<Action>, C::State) {
    let mut out = Vec::new();
    for p in ps {
        let (a, next) = c.step(&s, p).unwrap();
        out.push(a);
        s = next;
    }
    (out, s)
}

#[test]
fn bhs33_starts_with_two_tokens_and_goes_east() {
    let (a, _) = Bhs33.step(&Bhs33.initial(), &seen(None, 0, 3)).unwrap();
    assert_eq!(a, Action::put(2).then_go(Direction::East));
}

#[test]
fn bhs33_three_tokens_mean_south() {
    let s = State33::Inspect(Goal33::Ring { homebases: 0 });
    let (a, next) = Bhs33.step(&s, &seen(Some(Direction::East), 3, 2)).unwrap();
    assert_eq!(a.mark, Some(Direction::South));
    assert_eq!(Bhs33.phase(&next), Phase::MarkAll);
}

#[test]
fn bhs33_second_homebase_sends_it_south_with_three() {
    let s = State33::Inspect(Goal33::Ring { homebases: 1 });
    let ps = [seen(Some(Direction::East), 1, 2), seen(Some(Direction::South), 0, 0), seen(Some(Direction::North), 3, 0)];
    let (acts, next) = drive(&Bhs33, s, &ps);
    assert_eq!(acts[0], Action::put(2).then_go(Direction::South));
    assert_eq!(acts[1], Action::go(Direction::North));
    assert_eq!(acts[2], Action::pick(3).then_go(Direction::South));
    assert_eq!(next, State33::Inspect(Goal33::Settle));
}

#[test]
fn bhs42_two_tokens_walk_west_wait_then_south() {
    let s = State42::Inspect(Goal42::Ring { homebases: 0 });
    let ps = [seen(Some(Direction::East), 2, 1), seen(Some(Direction::West), 0, 1), seen(None, 0, 1)];
    let (acts, _) = drive(&Bhs42, s, &ps);
    assert_eq!(acts[0], Action::go(Direction::West));
    assert_eq!(acts[1], Action::IDLE);
    assert_eq!(acts[2], Action::go(Direction::South));
}

#[test]
fn bhs42_two_tokens_at_the_corner_mean_east() {
    let s = State42::Inspect(Goal42::CheckCorner);
    let (a, next) = Bhs42.step(&s, &seen(Some(Direction::South), 2, 1)).unwrap();
    assert_eq!(a.mark, Some(Direction::East));
    assert_eq!(Bhs42.phase(&next), Phase::MarkAll);
}

#[test]
fn bhs42_third_homebase_sends_it_south_with_two() {
    let s = State42::Inspect(Goal42::Ring { homebases: 2 });
    let (a, _) = Bhs42.step(&s, &seen(Some(Direction::East), 1, 1)).unwrap();
    assert_eq!(a.token, TokenOp::Put(1));
    assert_eq!(a.mv, Some(Direction::South));
}

#[test]
fn every_controller_stops_on_a_marked_link() {
    let mut p = seen(None, 0, 3);
    p.incident_danger = [Direction::East].into_iter().collect();
    let (a, _) = Bhs33.step(&Bhs33.initial(), &p).unwrap();
    assert_eq!(a.declare, Some(Declaration::Terminated));
    p.carried = 2;
    let (a, _) = Bhs42.step(&Bhs42.initial(), &p).unwrap();
    assert_eq!(a.declare, Some(Declaration::Terminated));
    let b = Bhs32::new(DEFAULT_MAGIC_NUMBER);
    let (a, _) = b.step(&b.initial(), &p).unwrap();
    assert_eq!(a.declare, Some(Declaration::Terminated));
}

#[test]
fn bhs32_lone_token_after_a_homebase_means_east() {
    let b = Bhs32::new(DEFAULT_MAGIC_NUMBER);
    let s = State32 { clock: DECIDE_OFFSET, trail: Trail::default(), mode: Mode::FirstRing { count: 1 } };
    let (a, next) = b.step(&s, &seen(Some(Direction::East), 1, 0)).unwrap();
    assert_eq!(a.mark, Some(Direction::East));
    assert_eq!(b.phase(&next), Phase::MarkAll);
}

#[test]
fn steps_are_deterministic() {
    let b = Bhs32::new(DEFAULT_MAGIC_NUMBER);
    let p = seen(None, 0, 2);
    assert_eq!(b.step(&b.initial(), &p), b.step(&b.initial(), &p));
    assert_eq!(Bhs33.step(&Bhs33.initial(), &p), Bhs33.step(&Bhs33.initial(), &p));
}
