mod common;

use common::*;
use pebbling_core::comonad::{BoundedTk, Play};
use pebbling_core::constructions::{
    cfi_map, cfi_pair, cfi_witness_iso, contradictory_system, grid, mermin_system, nogo_demo,
    system_to_structure, z2, Z2System,
};
use pebbling_core::games::{arrow_k, bijection_game_equiv, determinize, existential_strategy};
use pebbling_core::hom::{find_homomorphism, find_isomorphism, is_homomorphism};

#[test]
fn cfi_pair_of_the_contradictory_system() {
    let a = system_to_structure(&contradictory_system()).unwrap();
    let p = cfi_pair(&a).unwrap();
    assert!(is_homomorphism(&a, &p.a0, &p.embed).unwrap());
    assert!(is_homomorphism(&p.a1, &z2(), &p.project).unwrap());
    assert!(!brute_hom(&p.a0, &z2()));
    assert!(find_homomorphism(&p.a0, &z2()).unwrap().is_none());
    assert!(find_homomorphism(&p.a1, &z2()).unwrap().is_some());
    assert!(!brute_iso(&p.a0, &p.a1));
    assert!(find_isomorphism(&p.a0, &p.a1).unwrap().is_none());
    assert!(bijection_game_equiv(&p.a0, &p.a1, 2).unwrap());
    assert!(game_tree_bijection(&p.a0, &p.a1, 2));
    assert!(!bijection_game_equiv(&p.a0, &p.a1, 3).unwrap());
}

#[test]
fn cfi_witness_is_an_isomorphism_of_fragments() {
    let a = system_to_structure(&contradictory_system()).unwrap();
    let s = existential_strategy(&a, &z2(), 2).unwrap().unwrap();
    let t = determinize(&s).unwrap();
    for depth in 1..=4 {
        let r = cfi_witness_iso(&a, 2, &t, depth).unwrap();
        assert!(r.verified(), "{r:?}");
    }
    assert!(cfi_witness_iso(&a, 3, &t, 2).is_err());
}

#[test]
fn cfi_map_keeps_pebbles_and_elements() {
    let a = system_to_structure(&contradictory_system()).unwrap();
    let t = determinize(&existential_strategy(&a, &z2(), 2).unwrap().unwrap()).unwrap();
    let p = cfi_pair(&a).unwrap();
    let tk = BoundedTk::new(&p.a0, 2, 3).unwrap();
    for s in tk.plays() {
        let image: Play<usize> = cfi_map(&t, s).unwrap();
        for (m, n) in s.moves().iter().zip(image.moves()) {
            assert_eq!(m.pebble, n.pebble);
            assert_eq!(m.elem / 2, n.elem / 2);
        }
    }
}

#[test]
fn mermin_structure() {
    let m = system_to_structure(&mermin_system()).unwrap();
    assert_eq!(m.len(), 9);
    assert!(!brute_hom(&m, &z2()));
    assert!(arrow_k(&m, &z2(), 3).unwrap());
    let json = serde_json::to_string(&mermin_system()).unwrap();
    assert_eq!(Z2System::from_json(&json).unwrap(), mermin_system());
    assert!(Z2System::from_json(r#"{"variables":["x"],"equations":[["x","x","x",2]]}"#).is_err());
}

#[test]
fn nogo_instances() {
    for m in 4..=6 {
        let r = nogo_demo(m).unwrap();
        assert!(r.into_cycle && !r.into_path && r.chain_linked, "{r:?}");
    }
}

#[test]
fn grids() {
    let g = grid(3, 3).unwrap();
    assert_eq!(g.len(), 9);
    assert_eq!(g.tuple_count(), 24);
    assert_eq!(brute_treewidth(&g), 3);
    assert!(grid(0, 3).is_err());
}
