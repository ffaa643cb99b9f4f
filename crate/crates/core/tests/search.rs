use std::collections::BTreeSet;

use nearring_core::nearring::{AdditiveGroup, CayleyGroup};
use nearring_core::pcgroup::{build_presentation, Coordinates, GroupId, PcPresentation};
use nearring_core::search::{
    enumerate_endomorphisms, identity_candidates, search_local_nearrings, Pruning, SearchOptions, SearchStatus,
};

fn pres(id: GroupId) -> PcPresentation {
    build_presentation(id).unwrap()
}

/// Homomorphisms out of <r, s | r^8, s^2, (sr)^2> are exactly the pairs
/// (R, S) satisfying the relators, by von Dyck.
#[test]
fn d16_endomorphisms_match_relator_oracle() {
    let g = pres(GroupId::D16);
    let cg = CayleyGroup::from_group(&g).unwrap();
    let smul = |x: u32, k: u32| (0..k).fold(0, |acc, _| cg.add(acc, x));
    let s = g.index(&Coordinates::generator(0));
    let r = g.index(&Coordinates::generator(1));
    assert_eq!(cg.element_order(r), 8);
    assert_eq!(cg.element_order(s), 2);
    assert_eq!(smul(cg.add(s, r), 2), 0);

    let mut oracle = BTreeSet::new();
    for rr in 0..16 {
        for ss in 0..16 {
            if smul(rr, 8) == 0 && smul(ss, 2) == 0 && smul(cg.add(ss, rr), 2) == 0 {
                oracle.insert((rr, ss));
            }
        }
    }
    let endos = enumerate_endomorphisms(&g).unwrap();
    let found: BTreeSet<(u32, u32)> = endos.iter().map(|e| (e.table[r as usize], e.table[s as usize])).collect();
    assert_eq!(endos.len(), oracle.len());
    assert_eq!(found, oracle);
    assert_eq!(oracle.len(), 100);
    let identity: Vec<u32> = (0..16).collect();
    assert!(endos.iter().any(|e| e.table == identity));
    assert!(endos.iter().any(|e| e.table.iter().all(|&v| v == 0)));
    for e in &endos {
        for x in 0..16 {
            for y in 0..16 {
                assert_eq!(e.table[cg.add(x, y) as usize], cg.add(e.table[x as usize], e.table[y as usize]));
            }
        }
    }
}

#[test]
fn identity_candidate_counts() {
    let count = |id| identity_candidates(&pres(id)).len();
    assert_eq!(count(GroupId::C16), 8);
    assert_eq!(count(GroupId::D16), 4);
    assert_eq!(count(GroupId::QD16), 4);
    assert_eq!(count(GroupId::Q16), 4);
    let d16 = pres(GroupId::D16);
    for x in identity_candidates(&d16) {
        assert_eq!(AdditiveGroup::element_order(&d16, x), 8);
    }
}

#[test]
fn class3_order16_groups_carry_no_local_nearring() {
    for id in [GroupId::D16, GroupId::QD16, GroupId::Q16] {
        let r = search_local_nearrings(&pres(id), &SearchOptions::default()).unwrap();
        assert_eq!(r.status, SearchStatus::Exhaustive, "{id:?}");
        assert_eq!(r.results.len(), 0, "{id:?}");
        assert_eq!(r.rejected_by_verification, 0);
    }
}

fn result_set(r: &nearring_core::search::SearchReport) -> BTreeSet<(u32, Vec<u32>)> {
    r.results.iter().map(|x| (x.identity, x.table.data.clone())).collect()
}

#[test]
fn pruning_levels_agree_on_c16() {
    let g = pres(GroupId::C16);
    let run = |pruning| {
        let opts = SearchOptions { pruning, ..SearchOptions::default() };
        search_local_nearrings(&g, &opts).unwrap()
    };
    let full = run(Pruning::Full);
    let closure = run(Pruning::ClosureOnly);
    let plain = run(Pruning::None);
    assert_eq!(plain.status, SearchStatus::Exhaustive);
    assert_eq!(result_set(&full), result_set(&closure));
    assert_eq!(result_set(&full), result_set(&plain));
}

#[test]
fn pruning_levels_agree_on_d16() {
    let g = pres(GroupId::D16);
    let run = |pruning, require_local| {
        let opts = SearchOptions { pruning, require_local, ..SearchOptions::default() };
        search_local_nearrings(&g, &opts).unwrap()
    };
    let full = run(Pruning::Full, true);
    let closure = run(Pruning::ClosureOnly, true);
    assert_eq!(closure.status, SearchStatus::Exhaustive);
    assert_eq!(result_set(&full), result_set(&closure));
    // without locality the same tree yields every nearring with identity
    let all = run(Pruning::ClosureOnly, false);
    let all_full = run(Pruning::Full, false);
    assert_eq!(result_set(&all), result_set(&all_full));
    assert!(all.results.iter().all(|r| !r.local));
}

#[test]
fn split_depth_does_not_change_results() {
    let g = pres(GroupId::C16);
    let base = search_local_nearrings(&g, &SearchOptions { split_depth: 0, ..SearchOptions::default() }).unwrap();
    for depth in [1, 3] {
        let r = search_local_nearrings(&g, &SearchOptions { split_depth: depth, ..SearchOptions::default() }).unwrap();
        assert_eq!(result_set(&r), result_set(&base));
        assert_eq!(r.branches_explored, base.branches_explored);
    }
    let g = pres(GroupId::Q16);
    let a = search_local_nearrings(&g, &SearchOptions { split_depth: 0, ..SearchOptions::default() }).unwrap();
    let b = search_local_nearrings(&g, &SearchOptions { split_depth: 4, ..SearchOptions::default() }).unwrap();
    assert_eq!(a.branches_explored, b.branches_explored);
}
