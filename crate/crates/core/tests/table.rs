use darboux_core::residue::ResidueEngine;
use darboux_core::table::{a_crosscheck, a_crosscheck_with, a_entry, a_entry_flipped_branch, a_table};
use proptest::prelude::*;

const GOLDEN: &str = include_str!("data/table_a_blocks.txt");

#[test]
fn blocks_match_printed_table() {
    assert_eq!(a_table(7).render_blocks().trim_end(), GOLDEN.trim_end());
}

#[test]
fn golden_parses_to_512_entries() {
    let mut n = 0;
    for block in GOLDEN.trim_end().split("\n\n") {
        let mut lines = block.lines();
        let header = lines.next().unwrap();
        let i: u32 = header[2..header.find(',').unwrap()].parse().unwrap();
        for line in lines {
            let (j, rest) = line.split_once(':').unwrap();
            let j: u32 = j.parse().unwrap();
            for (k, v) in rest.split_whitespace().enumerate() {
                assert_eq!(v.parse::<u8>().unwrap(), a_entry(i, j, k as u32), "({i},{j},{k})");
                n += 1;
            }
        }
    }
    assert_eq!(n, 512);
}

#[test]
fn rows_cover_sorted_triples() {
    let rows = a_table(4).rows();
    assert_eq!(rows.len(), 35);
    assert!(rows.iter().all(|([i, j, k], _)| i <= j && j <= k));
}

#[test]
fn oracle_agrees_through_8() {
    let r = a_crosscheck(8).unwrap();
    assert!(r.is_clean(), "{:?}", r.mismatches);
    assert_eq!(r.checked, 165);
}

#[test]
fn wrong_predicate_is_detected() {
    let engine = ResidueEngine::new(6);
    let r = a_crosscheck_with(&engine, 6, a_entry_flipped_branch).unwrap();
    assert!(!r.is_clean());
    let mut sorted = r.mismatches.clone();
    sorted.sort_by_key(|m| m.triple);
    assert_eq!(sorted, r.mismatches);
}

proptest! {
    #[test]
    fn entry_is_symmetric(i in 0u32..40, j in 0u32..40, k in 0u32..40) {
        let v = a_entry(i, j, k);
        prop_assert!(v <= 1);
        for [a, b, c] in [[i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]] {
            prop_assert_eq!(a_entry(a, b, c), v);
        }
    }

    #[test]
    fn table_lookup_is_permutation_invariant(i in 0u32..6, j in 0u32..6, k in 0u32..6) {
        let t = a_table(5);
        prop_assert_eq!(t.get(i, j, k), Some(a_entry(i, j, k)));
        prop_assert_eq!(t.get(i, j, k), t.get(k, i, j));
    }
}
