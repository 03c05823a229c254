//! Words in the adjacent transpositions s_1..s_{n-1} and the permutations
//! they sort to.
//!
//! A word is a finite sequence of letters i in 1..=n-1, letter i standing for
//! the transposition that swaps positions i and i+1. Multiplying the letters
//! left to right starting from the identity gives the permutation represented
//! by the word. A random subword keeps each letter independently with
//! probability p.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A word in the letters 1..=n-1 acting on n strands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    pub n: usize,
    pub letters: Vec<usize>,
}

/// A permutation of 1..=n in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perm {
    pub one_line: Vec<u32>,
}

impl Word {
    /// Validates that every letter lies in 1..=n-1.
    pub fn new(n: usize, letters: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("rank needs n >= 2, got {n}")));
        }
        for (position, &letter) in letters.iter().enumerate() {
            if letter < 1 || letter > n - 1 {
                return Err(Error::LetterOutOfRange {
                    letter,
                    position,
                    max: n - 1,
                    n,
                });
            }
        }
        Ok(Word { n, letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The permutation obtained by applying the letters left to right to the
    /// identity: letter i swaps the entries in positions i and i+1.
    pub fn permutation(&self) -> Perm {
        let mut one_line: Vec<u32> = (1..=self.n as u32).collect();
        for &i in &self.letters {
            one_line.swap(i - 1, i);
        }
        Perm { one_line }
    }

    /// True when for every i the letters i and i+1 alternate within the
    /// subsequence of the word restricted to {i, i+1}.
    pub fn is_alternating(&self) -> bool {
        self.check_alternating().is_ok()
    }

    /// Like [`Word::is_alternating`] but names the violating pair of positions.
    pub fn check_alternating(&self) -> Result<()> {
        // last[i] = (value, position) of the most recent letter in {i, i+1}.
        let mut last: Vec<Option<(usize, usize)>> = vec![None; self.n.saturating_sub(1)];
        for (pos, &letter) in self.letters.iter().enumerate() {
            for pair in [letter.wrapping_sub(1), letter] {
                if pair < 1 || pair > self.n.saturating_sub(2) {
                    continue; // pair index i ranges over 1..=n-2
                }
                if let Some((value, first)) = last[pair] {
                    if value == letter {
                        return Err(Error::NotAlternating {
                            i: pair,
                            j: pair + 1,
                            first,
                            second: pos,
                        });
                    }
                }
                last[pair] = Some((letter, pos));
            }
        }
        Ok(())
    }

    /// A word is reduced when no shorter word represents the same permutation,
    /// equivalently when its length equals the inversion number of its
    /// permutation.
    pub fn is_reduced(&self) -> bool {
        self.permutation().inversions() == self.letters.len() as u64
    }

    /// Number of occurrences of each letter; entry i-1 counts letter i.
    pub fn occurrence_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n - 1];
        for &letter in &self.letters {
            counts[letter - 1] += 1;
        }
        counts
    }

    /// Keeps each letter independently with probability p.
    pub fn sample_subword(&self, p: f64, rng: &mut impl Rng) -> Result<Word> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "keep probability must lie in [0, 1], got {p}"
            )));
        }
        let letters = self
            .letters
            .iter()
            .copied()
            .filter(|_| bernoulli(p, rng))
            .collect();
        Ok(Word {
            n: self.n,
            letters,
        })
    }

    /// Parses the JSON form {"n": .., "letters": [..]}.
    pub fn from_json(text: &str) -> Result<Word> {
        let word: Word =
            serde_json::from_str(text).map_err(|e| Error::Malformed(format!("word json: {e}")))?;
        Word::new(word.n, word.letters)
    }
}

/// Draws a Bernoulli(p) with exact behavior at p = 0 and p = 1.
pub(crate) fn bernoulli(p: f64, rng: &mut impl Rng) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.random::<f64>() < p
    }
}

/// The word (s_{n-1})(s_{n-2} s_{n-1})...(s_1 s_2 .. s_{n-1}), which sorts the
/// identity to the decreasing permutation; it has n(n-1)/2 letters and letter
/// i occurs i times.
pub fn staircase_word(n: usize) -> Result<Word> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "staircase word needs n >= 2, got {n}"
        )));
    }
    let mut letters = Vec::with_capacity(n * (n - 1) / 2);
    for start in (1..n).rev() {
        letters.extend(start..n);
    }
    Ok(Word { n, letters })
}

/// The block x_n of odd letters 1, 3, 5, .. up to 2*floor(n/2) - 1.
pub fn odd_block(n: usize) -> Vec<usize> {
    (1..n).step_by(2).collect()
}

/// The block y_n of even letters 2, 4, .. up to 2*floor((n-1)/2).
pub fn even_block(n: usize) -> Vec<usize> {
    (2..n).step_by(2).collect()
}

/// The word (x_n y_n)^rho, where x_n lists the odd letters and y_n the even
/// letters. With `trailing` set, one extra x_n block is appended; taking
/// rho = (n-1)/2 with the trailing block (n odd), or rho = n/2 without it
/// (n even), yields a reduced word for the decreasing permutation.
pub fn bipartite_word(n: usize, rho: usize, trailing: bool) -> Result<Word> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "bipartite word needs n >= 3, got {n}"
        )));
    }
    if rho < 1 {
        return Err(Error::InvalidArgument("bipartite word needs rho >= 1".into()));
    }
    let odds = odd_block(n);
    let evens = even_block(n);
    let mut letters = Vec::with_capacity(rho * (n - 1) + if trailing { odds.len() } else { 0 });
    for _ in 0..rho {
        letters.extend_from_slice(&odds);
        letters.extend_from_slice(&evens);
    }
    if trailing {
        letters.extend_from_slice(&odds);
    }
    Ok(Word { n, letters })
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm {
            one_line: (1..=n as u32).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.one_line.len()
    }

    /// Number of pairs i < j with v(i) > v(j), counted in O(n log n) with a
    /// binary indexed tree over values.
    pub fn inversions(&self) -> u64 {
        let n = self.one_line.len();
        let mut tree = Fenwick::new(n);
        let mut inversions = 0u64;
        for (seen, &value) in self.one_line.iter().enumerate() {
            // values in (value, n] already placed are inversions with this one
            inversions += seen as u64 - tree.prefix_sum(value as usize);
            tree.add(value as usize, 1);
        }
        inversions
    }

    pub fn is_identity(&self) -> bool {
        self.one_line.iter().enumerate().all(|(i, &v)| v == i as u32 + 1)
    }
}

/// Binary indexed tree over 1..=n counting how many of each value were placed.
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Fenwick {
        Fenwick {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, mut i: usize, delta: u64) {
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of counts for values in 1..=i.
    fn prefix_sum(&self, mut i: usize) -> u64 {
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }
}
