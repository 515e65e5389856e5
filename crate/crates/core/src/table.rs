//! The `{0,1}` table `A_{i,j,k}`: closed-form predicate, bulk generation and
//! cross-validation against the residue oracle.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::residue::{ResidueEngine, ResidueError};

fn sorted(i: u32, j: u32, k: u32) -> [u32; 3] {
    let mut t = [i, j, k];
    t.sort_unstable();
    t
}

/// Closed-form value of `A_{i,j,k}`.
pub fn a_entry(i: u32, j: u32, k: u32) -> u8 {
    let [i, j, k] = sorted(i, j, k).map(i64::from);
    if i == 0 && j == 0 {
        return 1;
    }
    if i == 0 {
        return u8::from((k - j).abs() >= 2);
    }
    let even = (i + j + k) % 2 == 0;
    // With i <= j <= k only i+j-k can drop to -3.
    let holds = if even {
        i + j - k >= 2 && i - j + k >= 2 && -i + j + k >= 2
    } else {
        i + j - k <= -3
    };
    u8::from(holds)
}

/// `A` with the odd and even branches exchanged; only useful to check that
/// the cross-check notices a wrong predicate.
pub fn a_entry_flipped_branch(i: u32, j: u32, k: u32) -> u8 {
    let [a, b, c] = sorted(i, j, k);
    if a == 0 {
        return a_entry(i, j, k);
    }
    let (a, b, c) = (i64::from(a), i64::from(b), i64::from(c));
    let odd = (a + b + c) % 2 == 1;
    u8::from(if odd {
        a + b - c >= 2 && a - b + c >= 2 && -a + b + c >= 2
    } else {
        a + b - c <= -3
    })
}

/// `A` for every triple `0 <= i, j, k <= max_index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableA {
    max_index: u32,
    values: Vec<u8>,
}

impl TableA {
    pub fn max_index(&self) -> u32 {
        self.max_index
    }

    fn offset(&self, i: u32, j: u32, k: u32) -> usize {
        let n = self.max_index as usize + 1;
        (i as usize * n + j as usize) * n + k as usize
    }

    pub fn get(&self, i: u32, j: u32, k: u32) -> Option<u8> {
        let m = self.max_index;
        (i <= m && j <= m && k <= m).then(|| self.values[self.offset(i, j, k)])
    }

    /// `(i, j, k, value)` for sorted triples, lexicographic.
    pub fn rows(&self) -> Vec<([u32; 3], u8)> {
        sorted_triples(0, self.max_index)
            .into_iter()
            .map(|[i, j, k]| ([i, j, k], self.values[self.offset(i, j, k)]))
            .collect()
    }

    /// One `"i j k value"` line per sorted triple.
    pub fn render_rows(&self) -> String {
        let mut out = String::new();
        for ([i, j, k], v) in self.rows() {
            let _ = writeln!(out, "{i} {j} {k} {v}");
        }
        out
    }

    /// The square blocks `A(m,i,j)` for `m = 0..=max_index`, each headed by
    /// `A(m,i,j): 0 1 ...` and followed by a blank line.
    pub fn render_blocks(&self) -> String {
        let m = self.max_index;
        let header: Vec<String> = (0..=m).map(|x| x.to_string()).collect();
        let mut out = String::new();
        for b in 0..=m {
            let _ = writeln!(out, "A({b},i,j): {}", header.join(" "));
            for i in 0..=m {
                let row: Vec<String> = (0..=m).map(|j| self.values[self.offset(b, i, j)].to_string()).collect();
                let _ = writeln!(out, "{i}: {}", row.join(" "));
            }
            out.push('\n');
        }
        out
    }
}

/// Sorted triples `lo <= i <= j <= k <= hi` in lexicographic order.
pub(crate) fn sorted_triples(lo: u32, hi: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for i in lo..=hi {
        for j in i..=hi {
            for k in j..=hi {
                out.push([i, j, k]);
            }
        }
    }
    out
}

/// Builds the full table from the closed form, in parallel over sorted triples.
pub fn a_table(max_index: u32) -> TableA {
    let n = max_index as usize + 1;
    let sorted_values: Vec<([u32; 3], u8)> = sorted_triples(0, max_index)
        .into_par_iter()
        .map(|[i, j, k]| ([i, j, k], a_entry(i, j, k)))
        .collect();
    let mut table = TableA {
        max_index,
        values: vec![0; n * n * n],
    };
    for ([i, j, k], v) in sorted_values {
        for [a, b, c] in [[i, j, k], [i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]] {
            let o = table.offset(a, b, c);
            table.values[o] = v;
        }
    }
    table
}

/// Oracle value of `A`: 1 exactly when every residue attached to the triple
/// is independent of the multivaluation parameter.
pub fn a_oracle(engine: &ResidueEngine, i: u32, j: u32, k: u32) -> Result<u8, ResidueError> {
    Ok(u8::from(engine.s_poly(i, j, k)?.is_alpha_independent()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub triple: [u32; 3],
    pub closed_form: u8,
    pub oracle: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub max_index: u32,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl CrosscheckReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn a_crosscheck(max_index: u32) -> Result<CrosscheckReport, ResidueError> {
    let engine = ResidueEngine::new(max_index);
    a_crosscheck_with(&engine, max_index, a_entry)
}

/// Compares `predicate` with the residue oracle on all sorted triples up to
/// `max_index`. Mismatches come back in lexicographic order.
pub fn a_crosscheck_with(
    engine: &ResidueEngine,
    max_index: u32,
    predicate: impl Fn(u32, u32, u32) -> u8 + Sync,
) -> Result<CrosscheckReport, ResidueError> {
    let triples = sorted_triples(0, max_index);
    let results: Result<Vec<Option<Mismatch>>, ResidueError> = triples
        .par_iter()
        .map(|&[i, j, k]| {
            let oracle = a_oracle(engine, i, j, k)?;
            let closed_form = predicate(i, j, k);
            Ok((oracle != closed_form).then_some(Mismatch {
                triple: [i, j, k],
                closed_form,
                oracle,
            }))
        })
        .collect();
    Ok(CrosscheckReport {
        max_index,
        checked: triples.len(),
        mismatches: results?.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_examples() {
        assert_eq!(a_entry(0, 1, 1), 0);
        assert_eq!(a_entry(2, 2, 2), 1);
        assert_eq!(a_entry(1, 1, 5), 1);
        assert_eq!(a_entry(5, 1, 1), 1);
        assert_eq!(a_entry(0, 0, 7), 1);
    }

    #[test]
    fn small_tables() {
        let t = a_table(0);
        assert_eq!(t.rows(), vec![([0, 0, 0], 1)]);
        assert_eq!(a_table(2).rows().len(), 10);
        assert_eq!(a_table(2).render_rows().lines().next(), Some("0 0 0 1"));
    }

    #[test]
    fn crosscheck_small_range() {
        let r = a_crosscheck(5).unwrap();
        assert!(r.is_clean(), "{:?}", r.mismatches);
        let engine = ResidueEngine::new(5);
        let flipped = a_crosscheck_with(&engine, 5, a_entry_flipped_branch).unwrap();
        assert!(!flipped.is_clean());
    }
}
