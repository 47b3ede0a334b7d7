//! Reduced words in the free group `F(x_1, …, x_n)`.
//!
//! A letter `k > 0` stands for `x_k` and `-k` for `x_k⁻¹`. Words are always
//! stored freely reduced; every constructor reduces eagerly.

use std::fmt;
use std::ops::Mul;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of free generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rank(u32);

impl Rank {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidRank);
        }
        Ok(Rank(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Number of closures `R_0 … R_n`, i.e. `n + 1`.
    pub fn closures(self) -> usize {
        self.0 as usize + 1
    }

    /// All `2n` letters in token order: `1, -1, 2, -2, …`.
    pub fn letters(self) -> impl Iterator<Item = i32> {
        (1..=self.0 as i32).flat_map(|k| [k, -k])
    }

    pub fn check_letter(self, letter: i32) -> Result<()> {
        if letter == 0 || letter.unsigned_abs() > self.0 {
            return Err(Error::InvalidLetter { letter, rank: self.0 });
        }
        Ok(())
    }

    /// Uniformly random letter among the `2n` generators and inverses.
    pub fn random_letter(self, rng: &mut crate::Rng) -> i32 {
        let k = rng.random_range(1..=self.0 as i32);
        if rng.random_bool(0.5) {
            k
        } else {
            -k
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<i32>);

/// Validates `raw` against `rank` and returns its freely reduced form.
pub fn reduce(raw: &[i32], rank: Rank) -> Result<Word> {
    for &l in raw {
        rank.check_letter(l)?;
    }
    Ok(Word::from_raw(raw.iter().copied()))
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Reduces an arbitrary letter sequence.
    ///
    /// Panics on a zero letter; use [`reduce`] for untrusted input.
    pub fn from_raw(raw: impl IntoIterator<Item = i32>) -> Self {
        let mut w = Word::identity();
        for l in raw {
            assert!(l != 0, "zero is not a letter");
            w.push(l);
        }
        w
    }

    pub fn generator(k: i32) -> Self {
        Word::from_raw([k])
    }

    /// Parses the canonical text form (`"1 -2 3"`, empty string for the
    /// identity) and validates letters against `rank`.
    pub fn parse_text(text: &str, rank: Rank) -> Result<Self> {
        let raw = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<i32>()
                    .map_err(|_| Error::InvalidArgument(format!("not a letter: `{tok}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        reduce(&raw, rank)
    }

    /// Appends one letter, cancelling against the last letter if needed.
    pub fn push(&mut self, letter: i32) {
        if self.0.last() == Some(&-letter) {
            self.0.pop();
        } else {
            self.0.push(letter);
        }
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<i32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<i32> {
        self.0.last().copied()
    }

    /// Largest generator index occurring in the word.
    pub fn max_generator(&self) -> u32 {
        self.0.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn check_rank(&self, rank: Rank) -> Result<()> {
        self.0.iter().try_for_each(|&l| rank.check_letter(l))
    }

    pub fn multiply(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for &l in &other.0 {
            out.push(l);
        }
        out
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    /// `self^by = by⁻¹ · self · by`.
    pub fn conjugate(&self, by: &Word) -> Word {
        by.inverse().multiply(self).multiply(by)
    }

    /// `[self, other] = self⁻¹ other⁻¹ self other`.
    pub fn commutator(&self, other: &Word) -> Word {
        self.inverse()
            .multiply(&other.inverse())
            .multiply(self)
            .multiply(other)
    }

    pub fn pow(&self, exp: i64) -> Word {
        let base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..exp.unsigned_abs() {
            out = out.multiply(&base);
        }
        out
    }

    /// Strips matching first/last letter pairs `a … a⁻¹`.
    pub fn cyclically_reduce(&self) -> Word {
        let s = &self.0;
        let (mut lo, mut hi) = (0, s.len());
        while hi - lo >= 2 && s[lo] == -s[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        Word(s[lo..hi].to_vec())
    }

    /// Distinct rotations of the cyclic reduction, in rotation order
    /// starting from the cyclic reduction itself.
    pub fn cyclic_permutations(&self) -> Vec<Word> {
        let core = self.cyclically_reduce();
        if core.is_empty() {
            return vec![core];
        }
        let mut out: Vec<Word> = Vec::with_capacity(core.len());
        for shift in 0..core.len() {
            let mut letters = core.0[shift..].to_vec();
            letters.extend_from_slice(&core.0[..shift]);
            let rotated = Word(letters);
            if !out.contains(&rotated) {
                out.push(rotated);
            }
        }
        out
    }

    /// Uniformly random reduced word of exactly `len` letters.
    pub fn random(rank: Rank, len: usize, rng: &mut crate::Rng) -> Word {
        let mut letters = Vec::with_capacity(len);
        while letters.len() < len {
            let l = rank.random_letter(rng);
            if letters.last() != Some(&-l) {
                letters.push(l);
            }
        }
        Word(letters)
    }

    /// Uniformly random word among all reduced words of length `≤ max_len`.
    pub fn random_upto(rank: Rank, max_len: usize, rng: &mut crate::Rng) -> Word {
        // there are 2n(2n-1)^(m-1) reduced words of length m ≥ 1
        let q = 2.0 * rank.get() as f64 - 1.0;
        let mut weights = Vec::with_capacity(max_len + 1);
        weights.push(1.0);
        let mut count = 2.0 * rank.get() as f64;
        for _ in 1..=max_len {
            weights.push(count);
            count *= q;
        }
        let total: f64 = weights.iter().sum();
        let mut target = rng.random::<f64>() * total;
        let mut len = max_len;
        for (m, w) in weights.iter().enumerate() {
            if target < *w {
                len = m;
                break;
            }
            target -= w;
        }
        Word::random(rank, len, rng)
    }
}

impl Mul for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        self.multiply(rhs)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Number of letters in the reduced form.
pub fn wordlength(w: &Word) -> usize {
    w.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;
    use proptest::prelude::*;

    fn w(letters: &[i32]) -> Word {
        Word::from_raw(letters.iter().copied())
    }

    fn rank(n: u32) -> Rank {
        Rank::new(n).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let r = rank(3);
        assert_eq!(reduce(&[1, -1], r).unwrap(), Word::identity());
        assert_eq!(reduce(&[1, 2, -2, -1, 3], r).unwrap(), w(&[3]));
        assert_eq!(reduce(&[1, 2, 1], r).unwrap().letters(), &[1, 2, 1]);
    }

    #[test]
    fn reduce_rejects_bad_letters() {
        let r = rank(2);
        assert_eq!(
            reduce(&[1, 0], r),
            Err(Error::InvalidLetter { letter: 0, rank: 2 })
        );
        assert!(matches!(
            reduce(&[3], r),
            Err(Error::InvalidLetter { letter: 3, .. })
        ));
        assert_eq!(Rank::new(0), Err(Error::InvalidRank));
    }

    #[test]
    fn group_operations() {
        assert_eq!(w(&[1]).multiply(&w(&[-1])), Word::identity());
        assert_eq!(w(&[1, 2]).multiply(&Word::identity()), w(&[1, 2]));
        assert_eq!(&w(&[1, 2]) * &w(&[-2, 3]), w(&[1, 3]));

        assert_eq!(w(&[1, 2]).inverse(), w(&[-2, -1]));
        assert_eq!(Word::identity().inverse(), Word::identity());
        assert_eq!(w(&[-3]).inverse(), w(&[3]));

        assert_eq!(w(&[1]).conjugate(&Word::identity()), w(&[1]));
        assert_eq!(w(&[1]).conjugate(&w(&[2])), w(&[-2, 1, 2]));
        assert_eq!(w(&[2]).conjugate(&w(&[2])), w(&[2]));

        assert_eq!(w(&[1]).commutator(&w(&[2])), w(&[-1, -2, 1, 2]));
        assert_eq!(w(&[1]).commutator(&Word::identity()), Word::identity());
        assert_eq!(w(&[1]).commutator(&w(&[1])), Word::identity());
    }

    #[test]
    fn cyclic_permutation_examples() {
        let perms = w(&[1, 2, 3]).cyclic_permutations();
        assert_eq!(perms, vec![w(&[1, 2, 3]), w(&[2, 3, 1]), w(&[3, 1, 2])]);
        assert_eq!(Word::identity().cyclic_permutations(), vec![Word::identity()]);
        assert_eq!(w(&[1, 1]).cyclic_permutations(), vec![w(&[1, 1])]);
        // conjugates are cyclically reduced before rotating
        assert_eq!(w(&[2, 1, -2]).cyclic_permutations(), vec![w(&[1])]);
    }

    #[test]
    fn lengths_and_text() {
        assert_eq!(wordlength(&Word::identity()), 0);
        assert_eq!(wordlength(&w(&[1, 2])), 2);
        assert_eq!(wordlength(&reduce(&[1, -1, 2], rank(2)).unwrap()), 1);

        assert_eq!(w(&[1, -2, 3]).to_string(), "1 -2 3");
        assert_eq!(Word::identity().to_string(), "");
        assert_eq!(Word::parse_text(" 1 -2  3 ", rank(3)).unwrap(), w(&[1, -2, 3]));
        assert_eq!(Word::parse_text("", rank(3)).unwrap(), Word::identity());
        assert!(Word::parse_text("1 a", rank(3)).is_err());
    }

    #[test]
    fn powers() {
        assert_eq!(w(&[2]).pow(2), w(&[2, 2]));
        assert_eq!(w(&[2]).pow(-2), w(&[-2, -2]));
        assert_eq!(w(&[1, 2]).pow(0), Word::identity());
    }

    #[test]
    fn random_words_are_reduced_and_bounded() {
        let mut rng = seeded_rng(3);
        for _ in 0..500 {
            let u = Word::random_upto(rank(3), 12, &mut rng);
            assert!(u.len() <= 12);
            assert_eq!(Word::from_raw(u.letters().iter().copied()), u);
            u.check_rank(rank(3)).unwrap();
        }
        assert_eq!(Word::random(rank(2), 9, &mut rng).len(), 9);
    }

    fn raw_letters(n: i32, max_len: usize) -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec((1..=n, any::<bool>()), 0..max_len)
            .prop_map(|v| v.into_iter().map(|(k, s)| if s { k } else { -k }).collect())
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_invertible(raw in raw_letters(3, 40)) {
            let u = reduce(&raw, rank(3)).unwrap();
            prop_assert_eq!(reduce(u.letters(), rank(3)).unwrap(), u.clone());
            prop_assert!(u.len() <= raw.len());
            prop_assert!(u.letters().windows(2).all(|p| p[0] != -p[1]));
            prop_assert!(u.multiply(&u.inverse()).is_empty());
        }

        #[test]
        fn multiplication_is_associative(
            a in raw_letters(3, 20), b in raw_letters(3, 20), c in raw_letters(3, 20)
        ) {
            let (a, b, c) = (Word::from_raw(a), Word::from_raw(b), Word::from_raw(c));
            prop_assert_eq!(a.multiply(&b).multiply(&c), a.multiply(&b.multiply(&c)));
        }

        #[test]
        fn rotations_are_conjugates(raw in raw_letters(3, 20)) {
            let u = Word::from_raw(raw);
            let core = u.cyclically_reduce();
            for p in u.cyclic_permutations() {
                prop_assert_eq!(p.len(), core.len());
                prop_assert!(p.letters().windows(2).all(|x| x[0] != -x[1]));
            }
        }
    }
}
