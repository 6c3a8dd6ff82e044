#![allow(dead_code)]

use present::aligner::Alignment;
use present::lexicon::{AllowedMapping, MappingTable, MAX_MAPPING_GRAPHEMES, MAX_MAPPING_PHONEMES};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

/// Least cost over every monotone partition of the word and the phonemes
/// into chunks of at most 4 graphemes and 3 phonemes. A chunk costs 0 when
/// the table lists it, otherwise the longer of its two sides.
pub fn brute_force_cost(word: &str, phones: &[&str], table: &MappingTable) -> u32 {
    let g: Vec<char> = word.chars().collect();
    let (m, n) = (g.len(), phones.len());
    // chunk_cost[i][a][j][b]
    let mut chunk = vec![vec![vec![vec![u32::MAX; MAX_MAPPING_PHONEMES + 1]; n + 1]; MAX_MAPPING_GRAPHEMES + 1]; m + 1];
    for i in 0..=m {
        for a in 0..=MAX_MAPPING_GRAPHEMES.min(m - i) {
            let gs: String = g[i..i + a].iter().collect();
            for j in 0..=n {
                for b in 0..=MAX_MAPPING_PHONEMES.min(n - j) {
                    if a + b == 0 {
                        continue;
                    }
                    chunk[i][a][j][b] = if table.contains(&gs, &phones[j..j + b]) {
                        0
                    } else {
                        a.max(b) as u32
                    };
                }
            }
        }
    }
    fn walk(i: usize, j: usize, m: usize, n: usize, chunk: &[Vec<Vec<Vec<u32>>>], count: &mut u64) -> u32 {
        if i == m && j == n {
            *count += 1;
            return 0;
        }
        let mut best = u32::MAX;
        for a in 0..=MAX_MAPPING_GRAPHEMES.min(m - i) {
            for b in 0..=MAX_MAPPING_PHONEMES.min(n - j) {
                if a + b == 0 {
                    continue;
                }
                let rest = walk(i + a, j + b, m, n, chunk, count);
                best = best.min(chunk[i][a][j][b] + rest);
            }
        }
        best
    }
    let mut count = 0;
    walk(0, 0, m, n, &chunk, &mut count)
}

/// The alignment covers the input exactly, in order, and its cost is the
/// sum of its pairs' costs with `allowed` matching the table.
pub fn alignment_is_consistent(a: &Alignment, word: &str, phones: &[&str], table: &MappingTable) -> bool {
    let chars: Vec<char> = word.chars().collect();
    let mut ci = 0;
    let mut pj = 0;
    let mut cost = 0;
    for p in &a.pairs {
        if p.chars.start != ci || p.phones.start != pj || p.chars.is_empty() && p.phones.is_empty() {
            return false;
        }
        let g: String = chars[p.chars.clone()].iter().collect();
        if g != p.graphemes || p.phonemes != phones[p.phones.clone()] {
            return false;
        }
        if p.allowed != table.contains(&g.to_lowercase(), &p.phonemes) {
            return false;
        }
        cost += p.cost();
        ci = p.chars.end;
        pj = p.phones.end;
    }
    ci == chars.len() && pj == phones.len() && cost == a.cost
}

pub const GRAPHEMES: &str = "abceghinorstuwy";
pub const PHONEMES: &[&str] = &[
    "AA", "AE", "AH", "AO", "AY", "EH", "IY", "OW", "UW", "B", "CH", "G", "HH", "JH", "K", "N", "R", "S", "SH", "T",
    "TH", "W", "Y", "Z",
];

pub fn word(max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(GRAPHEMES.chars().collect::<Vec<_>>()), 0..=max)
        .prop_map(|v| v.into_iter().collect())
}

pub fn phones(max: usize) -> impl Strategy<Value = Vec<&'static str>> {
    prop::collection::vec(prop::sample::select(PHONEMES), 0..=max)
}

/// Small random tables over a tiny alphabet so multi-unit mappings match often.
pub fn small_table() -> impl Strategy<Value = MappingTable> {
    let g = prop::collection::vec(prop::sample::select(vec!['a', 'b', 'c']), 0..=4)
        .prop_map(|v| v.into_iter().collect::<String>());
    let p = prop::collection::vec(prop::sample::select(vec!["AA", "B", "K"]), 0..=3);
    prop::collection::vec((g, p), 0..24).prop_map(|pairs| {
        pairs
            .into_iter()
            .filter(|(g, p)| !(g.is_empty() && p.is_empty()))
            .map(|(graphemes, phonemes)| AllowedMapping {
                graphemes,
                phonemes: phonemes.into_iter().map(String::from).collect(),
            })
            .collect()
    })
}

pub fn small_word() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!['a', 'b', 'c']), 0..=6).prop_map(|v| v.into_iter().collect())
}

pub fn small_phones() -> impl Strategy<Value = Vec<&'static str>> {
    prop::collection::vec(prop::sample::select(vec!["AA", "B", "K"]), 0..=5)
}

/// Draws `n` values from a fixed-seed runner.
pub fn sample<S: Strategy>(strategy: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..n)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy generates").current())
        .collect()
}

/// Result of comparing the aligner with the oracle on `n` random cases
/// drawn from the shipped table and `n` from random small tables.
pub struct OracleReport {
    pub cases: usize,
    pub mismatches: Vec<String>,
}

pub fn run_oracle(shipped: &MappingTable, n: usize) -> OracleReport {
    let mut mismatches = Vec::new();
    let mut cases = 0;
    for (w, p) in sample((word(6), phones(5)), n) {
        cases += 1;
        check_case(&w, &p, shipped, &mut mismatches);
    }
    for (t, w, p) in sample((small_table(), small_word(), small_phones()), n) {
        cases += 1;
        check_case(&w, &p, &t, &mut mismatches);
    }
    OracleReport { cases, mismatches }
}

fn check_case(w: &str, p: &[&str], table: &MappingTable, out: &mut Vec<String>) {
    let a = present::aligner::align(w, p, table);
    let oracle = brute_force_cost(w, p, table);
    if a.cost != oracle || !alignment_is_consistent(&a, w, p, table) {
        out.push(format!("{w:?} {p:?}: dp {} ({a}) vs oracle {oracle}", a.cost));
    }
}
