//! Grapheme-to-phoneme alignment.
//!
//! A word and its pronunciation are partitioned into a monotone sequence of
//! pairs. Pairs found in the [`MappingTable`] cost nothing; any other pair
//! costs `max(|graphemes|, |phonemes|)`. The dynamic program only proposes
//! single-unit disallowed pairs (substitution, insertion, deletion) because a
//! longer disallowed pair never beats its unit decomposition.
//!
//! Among alignments of equal cost the winner is the one with
//!
//! 1. more phonemes covered by allowed pairs, then
//! 2. more allowed pairs, then
//! 3. longer phoneme sides earlier (silent letters trail), then
//! 4. longer grapheme sides earlier (lexicographically greatest sequence of
//!    grapheme lengths), then
//! 5. the lexicographically smallest sequence of pairs in printed `g→P`
//!    notation, where `∅` marks an empty side.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::lexicon::{phonemes_eq, MappingTable};

pub const EMPTY_SIDE: &str = "∅";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlignError {
    #[error("RangeOutOfBounds: {start}..{end} outside 0..{len}")]
    RangeOutOfBounds { start: usize, end: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedPair {
    pub graphemes: String,
    pub phonemes: Vec<String>,
    pub allowed: bool,
    /// Character range of `graphemes` in the aligned word.
    pub chars: Range<usize>,
    /// Index range of `phonemes` in the aligned pronunciation.
    pub phones: Range<usize>,
}

impl AlignedPair {
    pub fn cost(&self) -> u32 {
        if self.allowed {
            0
        } else {
            self.chars.len().max(self.phones.len()) as u32
        }
    }
}

impl fmt::Display for AlignedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = if self.graphemes.is_empty() {
            EMPTY_SIDE
        } else {
            self.graphemes.as_str()
        };
        if self.phonemes.is_empty() {
            write!(f, "{g}→{EMPTY_SIDE}")
        } else {
            write!(f, "{g}→{}", self.phonemes.join(" "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alignment {
    pub pairs: Vec<AlignedPair>,
    pub cost: u32,
}

impl Alignment {
    pub fn allowed_pairs(&self) -> usize {
        self.pairs.iter().filter(|p| p.allowed).count()
    }

    pub fn disallowed(&self) -> impl Iterator<Item = &AlignedPair> {
        self.pairs.iter().filter(|p| !p.allowed)
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Step {
    glen: usize,
    plen: usize,
    allowed: bool,
    notation: String,
}

#[derive(Clone)]
struct Suffix {
    cost: u32,
    explained: usize,
    allowed: usize,
    steps: Vec<Step>,
}

impl Suffix {
    fn prepend(&self, step: Step) -> Suffix {
        let cost = self.cost + if step.allowed { 0 } else { step.glen.max(step.plen) as u32 };
        let allowed = self.allowed + usize::from(step.allowed);
        let explained = self.explained + if step.allowed { step.plen } else { 0 };
        let mut steps = Vec::with_capacity(self.steps.len() + 1);
        steps.push(step);
        steps.extend(self.steps.iter().cloned());
        Suffix {
            cost,
            explained,
            allowed,
            steps,
        }
    }

    // Less is better.
    fn rank(&self, other: &Suffix) -> Ordering {
        self.cost
            .cmp(&other.cost)
            .then_with(|| other.explained.cmp(&self.explained))
            .then_with(|| other.allowed.cmp(&self.allowed))
            .then_with(|| {
                let a = self.steps.iter().map(|s| s.plen);
                let b = other.steps.iter().map(|s| s.plen);
                b.cmp(a)
            })
            .then_with(|| {
                let a = self.steps.iter().map(|s| s.glen);
                let b = other.steps.iter().map(|s| s.glen);
                b.cmp(a)
            })
            .then_with(|| {
                let a = self.steps.iter().map(|s| s.notation.as_str());
                let b = other.steps.iter().map(|s| s.notation.as_str());
                a.cmp(b)
            })
    }
}

fn notation(graphemes: &str, phonemes: &[&str]) -> String {
    let g = if graphemes.is_empty() { EMPTY_SIDE } else { graphemes };
    let p = if phonemes.is_empty() {
        EMPTY_SIDE.to_string()
    } else {
        phonemes.join(" ")
    };
    format!("{g}→{p}")
}

/// Least-cost monotone alignment of `graphemes` against `phonemes`.
pub fn align<S: AsRef<str>>(graphemes: &str, phonemes: &[S], mappings: &MappingTable) -> Alignment {
    let chars: Vec<char> = graphemes.chars().collect();
    let lower: Vec<char> = chars
        .iter()
        .map(|c| c.to_lowercase().next().unwrap_or(*c))
        .collect();
    let phones: Vec<&str> = phonemes.iter().map(AsRef::as_ref).collect();
    let (m, n) = (chars.len(), phones.len());
    let max_g = mappings.max_graphemes();

    // best[i][j]: optimal alignment of chars[i..] with phones[j..]
    let mut best: Vec<Vec<Option<Suffix>>> = vec![vec![None; n + 1]; m + 1];
    best[m][n] = Some(Suffix {
        cost: 0,
        explained: 0,
        allowed: 0,
        steps: Vec::new(),
    });

    for i in (0..=m).rev() {
        for j in (0..=n).rev() {
            if i == m && j == n {
                continue;
            }
            let mut winner: Option<Suffix> = None;
            let mut consider = |glen: usize, plen: usize, allowed: bool, best: &Vec<Vec<Option<Suffix>>>| {
                let Some(rest) = &best[i + glen][j + plen] else {
                    return;
                };
                let g: String = chars[i..i + glen].iter().collect();
                let step = Step {
                    glen,
                    plen,
                    allowed,
                    notation: notation(&g, &phones[j..j + plen]),
                };
                let cand = rest.prepend(step);
                if winner
                    .as_ref()
                    .map_or(true, |w| cand.rank(w) == Ordering::Less)
                {
                    winner = Some(cand);
                }
            };

            // allowed mappings anchored here
            for glen in 0..=max_g.min(m - i) {
                let key: String = lower[i..i + glen].iter().collect();
                for alt in mappings.phonemes_for(&key) {
                    let plen = alt.len();
                    if (glen, plen) == (0, 0) || j + plen > n {
                        continue;
                    }
                    if phonemes_eq(alt, &phones[j..j + plen]) {
                        consider(glen, plen, true, &best);
                    }
                }
            }
            // single-unit disallowed pairs
            for (glen, plen) in [(1, 1), (1, 0), (0, 1)] {
                if i + glen > m || j + plen > n {
                    continue;
                }
                let key: String = lower[i..i + glen].iter().collect();
                if !mappings.contains(&key, &phones[j..j + plen]) {
                    consider(glen, plen, false, &best);
                }
            }
            best[i][j] = winner;
        }
    }

    let path = best[0][0].take().expect("full insertion/deletion path always exists");
    let (mut ci, mut pj) = (0, 0);
    let pairs = path
        .steps
        .into_iter()
        .map(|s| {
            let pair = AlignedPair {
                graphemes: chars[ci..ci + s.glen].iter().collect(),
                phonemes: phones[pj..pj + s.plen].iter().map(|p| p.to_string()).collect(),
                allowed: s.allowed,
                chars: ci..ci + s.glen,
                phones: pj..pj + s.plen,
            };
            ci += s.glen;
            pj += s.plen;
            pair
        })
        .collect();
    Alignment {
        pairs,
        cost: path.cost,
    }
}

/// Aligns against each pronunciation and keeps the cheapest (first on ties).
/// Returns the index of the chosen pronunciation. `None` for an empty list.
pub fn align_best<S: AsRef<str>>(
    graphemes: &str,
    pronunciations: &[Vec<S>],
    mappings: &MappingTable,
) -> Option<(usize, Alignment)> {
    pronunciations
        .iter()
        .enumerate()
        .map(|(i, p)| (i, align(graphemes, p, mappings)))
        .min_by_key(|(i, a)| (a.cost, *i))
}

/// Phoneme indices whose aligned graphemes overlap `chars` (character offsets
/// into the aligned word).
pub fn project_span(alignment: &Alignment, chars: Range<usize>) -> Result<BTreeSet<usize>, AlignError> {
    let len = alignment.pairs.last().map_or(0, |p| p.chars.end);
    if chars.start > chars.end || chars.end > len {
        return Err(AlignError::RangeOutOfBounds {
            start: chars.start,
            end: chars.end,
            len,
        });
    }
    Ok(alignment
        .pairs
        .iter()
        .filter(|p| p.chars.start < chars.end && chars.start < p.chars.end)
        .flat_map(|p| p.phones.clone())
        .collect())
}
