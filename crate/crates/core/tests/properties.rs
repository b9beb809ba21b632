use std::collections::BTreeSet;

use mixed_nim::canonical_systems::{
    enumerate_system, find_move_detailed, hamming_weight, in_nmin, in_ord, lift, nj_info, orbit,
    restrict, sigma_weight,
};
use mixed_nim::game_oracle::{covers, verify_system, GridBox, VerifyReport};
use mixed_nim::maximum_system::{carry_set, in_f_level, in_max, LevelQuery};
use mixed_nim::minimal_audit::{audit_minimal, nmin_closed_form_check};
use mixed_nim::{Base, MoveSystem, Nat, Position};
use proptest::prelude::*;

const BASES: [&str; 7] = [":2", ":3", "2,3:2", "4:2", ":5", "3,2,5:3", "2,4:2"];

fn bases() -> Vec<Base> {
    BASES.iter().map(|s| s.parse().unwrap()).collect()
}

fn arb_base() -> impl Strategy<Value = Base> {
    (prop::collection::vec(2u64..7, 0..4), 2u64..7).prop_map(|(p, t)| Base::new(p, t).unwrap())
}

#[test]
fn canonical_containment_and_weight() {
    for base in bases() {
        for m in 1..=3 {
            let grid = GridBox::cube(m, if m == 3 { 9 } else { 16 }).unwrap();
            let levels = LevelQuery::new(base.clone());
            for idx in 1..grid.len() {
                let c = grid.position(idx);
                let nmin = in_nmin(&base, &c);
                let ord = in_ord(&base, &c).unwrap();
                let max = levels.in_max(&c).unwrap();
                assert!(!nmin || ord, "{base} {c:?}");
                assert!(!ord || max, "{base} {c:?}");
                if nmin {
                    assert!(hamming_weight(&c) <= sigma_weight(&base, m), "{base} {c:?}");
                }
            }
        }
    }
}

#[test]
fn nj_normal_form_is_consistent() {
    use mixed_nim::NjInfo;
    for base in bases() {
        let grid = GridBox::cube(3, 12).unwrap();
        for idx in 1..grid.len() {
            let c = grid.position(idx);
            match nj_info(&base, &c) {
                NjInfo::Empty => {}
                NjInfo::WeightOne { j, .. } => {
                    assert_eq!(hamming_weight(&c), 1);
                    assert_ne!(c[j], 0);
                }
                NjInfo::FixedN { j_set, .. } => {
                    assert!(hamming_weight(&c) >= 2);
                    assert!(!j_set.is_empty());
                }
            }
        }
    }
}

#[test]
fn orbit_invariance() {
    for base in bases() {
        let levels = LevelQuery::new(base.clone());
        let grid = GridBox::cube(3, 8).unwrap();
        for idx in 1..grid.len() {
            let c = grid.position(idx);
            let key = (
                in_ord(&base, &c).unwrap(),
                in_nmin(&base, &c),
                levels.in_max(&c).unwrap(),
            );
            for p in orbit(&c) {
                let other = (
                    in_ord(&base, &p).unwrap(),
                    in_nmin(&base, &p),
                    levels.in_max(&p).unwrap(),
                );
                assert_eq!(key, other, "{base} {c:?} {p:?}");
            }
        }
    }
}

#[test]
fn restriction_matches_lower_dimension() {
    for base in bases() {
        let grid3 = GridBox::new(vec![7, 6, 8]).unwrap();
        let all: BTreeSet<Position> = enumerate_system(&base, &MoveSystem::nmin(), &grid3)
            .unwrap()
            .into_iter()
            .collect();
        for subset in [vec![0], vec![1], vec![0, 2], vec![1, 2], vec![0, 1, 2]] {
            let s: BTreeSet<usize> = subset.iter().copied().collect();
            let projected = GridBox::new(subset.iter().map(|&i| grid3.bounds()[i]).collect()).unwrap();
            let lower: BTreeSet<Position> = enumerate_system(&base, &MoveSystem::nmin(), &projected)
                .unwrap()
                .into_iter()
                .collect();
            assert_eq!(restrict(&all, &s).unwrap(), lower, "{base} {subset:?}");
            for c in (0..projected.len()).map(|i| projected.position(i)) {
                let lifted = lift(&c, &s, 3).unwrap();
                assert_eq!(in_nmin(&base, &lifted), in_nmin(&base, &c));
                assert_eq!(in_ord(&base, &lifted).unwrap(), in_ord(&base, &c).unwrap());
            }
        }
    }
}

#[test]
fn carry_set_is_the_set_of_reachable_carries() {
    for base in bases() {
        let b0 = base.radix_at(0);
        let grid = GridBox::cube(2, 20).unwrap();
        let small = GridBox::cube(2, b0).unwrap();
        for idx in 0..grid.len() {
            let f = grid.position(idx);
            let reached: BTreeSet<Position> = (0..small.len())
                .map(|i| {
                    let x = small.position(i);
                    x.iter()
                        .zip(&f)
                        .map(|(&a, &b)| base.digit(base.carry_vector(a, b).unwrap(), 1))
                        .collect()
                })
                .collect();
            assert_eq!(carry_set(&base, &f).members, reached, "{base} {f:?}");
        }
    }
}

#[test]
fn chop_step_keeps_a_nonmove() {
    for base in bases() {
        let chopped = LevelQuery::new(base.chop());
        let grid = GridBox::cube(2, 25).unwrap();
        for idx in 1..grid.len() {
            let f = grid.position(idx);
            if in_max(&base, &f).unwrap() {
                continue;
            }
            let chop: Position = f.iter().map(|&v| base.chop_num(v)).collect();
            let found = carry_set(&base, &f).members.iter().any(|r| {
                let g: Position = chop.iter().zip(r).map(|(a, b)| a + b).collect();
                !chopped.in_max(&g).unwrap()
            });
            assert!(found, "{base} {f:?}");
        }
    }
}

#[test]
fn levels_are_monotone() {
    for base in bases() {
        let q = LevelQuery::new(base.clone());
        let grid = GridBox::cube(2, 30).unwrap();
        for idx in 0..grid.len() {
            let f = grid.position(idx);
            for level in -1..5 {
                if q.in_f_level(&f, level).unwrap() {
                    assert!(q.in_f_level(&f, level + 1).unwrap(), "{base} {f:?} {level}");
                }
            }
        }
    }
}

#[test]
fn level_zero_matches_single_digit_nonmoves() {
    let base: Base = ":3".parse().unwrap();
    let grid = GridBox::cube(2, 3).unwrap();
    let f0: Vec<Position> = (0..grid.len())
        .map(|i| grid.position(i))
        .filter(|f| in_f_level(&base, f, 0).unwrap())
        .collect();
    assert_eq!(f0, vec![vec![0, 0], vec![1, 2], vec![2, 1]]);
}

#[test]
fn max_and_ord_agree_for_binary_tails() {
    for text in ["4:2", ":2", "7:2", "3:2"] {
        let base: Base = text.parse().unwrap();
        for m in [2, 3] {
            let grid = GridBox::cube(m, if m == 2 { 16 } else { 8 }).unwrap();
            assert_eq!(
                enumerate_system(&base, &MoveSystem::max(), &grid).unwrap(),
                enumerate_system(&base, &MoveSystem::ord(), &grid).unwrap(),
                "{text} m={m}"
            );
        }
    }
    let base: Base = ":3".parse().unwrap();
    let grid = GridBox::cube(2, 12).unwrap();
    let max: BTreeSet<_> = enumerate_system(&base, &MoveSystem::max(), &grid).unwrap().into_iter().collect();
    let ord: BTreeSet<_> = enumerate_system(&base, &MoveSystem::ord(), &grid).unwrap().into_iter().collect();
    assert!(ord.is_subset(&max));
    assert!(max.difference(&ord).any(|c| c == &vec![2, 10]));
}

#[test]
fn closed_form_for_binary_tails() {
    for (text, m, side) in [("4:2", 2, 12), (":2", 3, 6), ("5:2", 3, 7), ("3:2", 2, 16)] {
        let base: Base = text.parse().unwrap();
        assert!(nmin_closed_form_check(&base, m, &GridBox::cube(m, side).unwrap()).unwrap());
    }
}

#[test]
fn minimum_system_contained_in_canonical_systems() {
    for text in ["4:2", "3:2"] {
        let base: Base = text.parse().unwrap();
        let grid = GridBox::cube(2, 10).unwrap();
        let nmin: BTreeSet<_> = enumerate_system(&base, &MoveSystem::nmin(), &grid).unwrap().into_iter().collect();
        for system in [MoveSystem::weight_one().with_plus(nmin.iter().cloned()), MoveSystem::ord(), MoveSystem::max()] {
            let members: BTreeSet<_> = enumerate_system(&base, &system, &grid).unwrap().into_iter().collect();
            assert!(nmin.is_subset(&members));
        }
        // Every in-box member of the minimum system is forced.
        let report = audit_minimal(&base, &MoveSystem::nmin(), &GridBox::cube(2, 8).unwrap()).unwrap();
        assert!(report.undetermined.is_empty(), "{text}: {:?}", report.undetermined);
    }
}

#[test]
fn necessary_verdicts_replay() {
    for (text, system) in [
        ("2,3:2", MoveSystem::nmin()),
        ("4:2", MoveSystem::nmin()),
        (":3", MoveSystem::ord()),
        (":3", MoveSystem::max()),
    ] {
        let base: Base = text.parse().unwrap();
        let grid = GridBox::cube(2, 6).unwrap();
        let report = audit_minimal(&base, &system, &grid).unwrap();
        let scan = grid.scan_order();
        let rank = |x: &[Nat]| scan.iter().position(|&i| i == grid.index(x)).unwrap();
        for n in &report.necessary {
            let without = system.clone().with_minus([n.c.clone()]);
            match verify_system(&base, &without, &grid).unwrap() {
                VerifyReport::Sg2Violation { x, h } => {
                    assert!(rank(&x) <= rank(&n.witness_x), "{text} {:?}", n.c);
                    if x == n.witness_x {
                        assert!(h <= n.h);
                    }
                }
                other => panic!("{text} {:?}: expected an sg2 violation, got {other:?}", n.c),
            }
        }
    }
}

#[test]
fn find_move_conditions_hold_exhaustively() {
    for base in bases() {
        let grid = GridBox::cube(3, 7).unwrap();
        for idx in 0..grid.len() {
            let x = grid.position(idx);
            let value = base.nim_sum(&x).unwrap();
            for h in 0..value {
                let choice = find_move_detailed(&base, &x, h).unwrap();
                let c = &choice.c;
                let n = choice.level;
                let y: Position = x.iter().zip(c).map(|(a, b)| a - b).collect();
                assert_eq!(base.nim_sum(&y).unwrap(), h);
                assert!(nj_info(&base, c).contains(n, choice.pivot));
                let limit = base.place_value(n + 1).unwrap();
                assert!(x.iter().zip(c).all(|(&a, &b)| a % limit >= b));
                let j = choice.pivot;
                assert!(base.digit(x[j] - c[j], n) < base.digit(x[j], n));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sandwich_systems_pass(
        base_idx in 0usize..BASES.len(),
        mask in prop::collection::vec(any::<bool>(), 64),
    ) {
        let base: Base = BASES[base_idx].parse().unwrap();
        let grid = GridBox::cube(2, 8).unwrap();
        let nmin = enumerate_system(&base, &MoveSystem::nmin(), &grid).unwrap();
        let max = enumerate_system(&base, &MoveSystem::max(), &grid).unwrap();
        let extra = max.iter().filter(|c| mask[grid.index(c)]).cloned();
        let system = MoveSystem::explicit(nmin.into_iter().chain(extra));
        prop_assert_eq!(verify_system(&base, &system, &grid).unwrap(), VerifyReport::Ok);
    }

    #[test]
    fn random_moves_satisfy_find_move_conditions(
        base in arb_base(),
        x in prop::collection::vec(0u64..5000, 1..5),
        seed in any::<u64>(),
    ) {
        let value = base.nim_sum(&x).unwrap();
        prop_assume!(value > 0);
        let h = seed % value;
        let choice = find_move_detailed(&base, &x, h).unwrap();
        let y: Position = x.iter().zip(&choice.c).map(|(a, b)| a - b).collect();
        prop_assert_eq!(base.nim_sum(&y).unwrap(), h);
        prop_assert!(nj_info(&base, &choice.c).contains(choice.level, choice.pivot));
        prop_assert!(in_ord(&base, &choice.c).unwrap());
    }

    #[test]
    fn nonmoves_have_verified_witnesses(
        base in arb_base(),
        f in prop::collection::vec(0u64..400, 2..4),
    ) {
        let q = LevelQuery::new(base.clone());
        if !q.in_max(&f).unwrap() {
            let x = q.nonmove_witness(&f).unwrap();
            let y: Position = x.iter().zip(&f).map(|(a, b)| a + b).collect();
            prop_assert_eq!(base.nim_sum(&y).unwrap(), base.nim_sum(&x).unwrap());
        }
        if in_ord(&base, &f).unwrap() {
            prop_assert!(q.in_max(&f).unwrap());
        }
    }

    #[test]
    fn covers_never_hits_the_current_value(
        base_idx in 0usize..BASES.len(),
        x in prop::collection::vec(0u64..10, 2..4),
    ) {
        let base: Base = BASES[base_idx].parse().unwrap();
        let value = base.nim_sum(&x).unwrap();
        for system in [MoveSystem::ord(), MoveSystem::nmin(), MoveSystem::max()] {
            prop_assert_eq!(covers(&base, &system, &x, value).unwrap(), None);
        }
    }

    #[test]
    fn lift_restrict_round_trip(c in prop::collection::vec(0u64..50, 0..4), m_extra in 0usize..3) {
        let m = c.len() + m_extra;
        let s: BTreeSet<usize> = (0..c.len()).map(|i| i * (1 + m_extra.min(1))).filter(|&i| i < m).collect();
        prop_assume!(s.len() == c.len());
        let lifted = lift(&c, &s, m).unwrap();
        let set: BTreeSet<Position> = [lifted].into();
        prop_assert_eq!(restrict(&set, &s).unwrap(), [c].into());
    }
}
