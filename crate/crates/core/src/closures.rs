//! Normal closures `R_i`, membership oracles and algebraic distances.
//!
//! `R_i` (for `i ≥ 1`) is the kernel of the homomorphism deleting `x_i`.
//! `R_0 = ⟨x_1 … x_n⟩^F` is the kernel of the substitution
//! `x_1 ↦ x_n⁻¹ … x_2⁻¹`, which sends `x_1 … x_n` to the identity and is
//! injective on the remaining generators.
//!
//! The Sanov representation gives a second, independent oracle: the image
//! word is mapped into `SL_2(Z)` and compared with the identity matrix.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Rank, Result, Word};

/// Default cap on word length for the Sanov oracle.
pub const SANOV_LENGTH_CAP: usize = 64;

/// The normal closure `R_index` in rank `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClosureSpec {
    index: usize,
    rank: Rank,
    generator: Word,
}

impl ClosureSpec {
    pub fn new(index: usize, rank: Rank) -> Result<Self> {
        if index > rank.get() as usize {
            return Err(Error::InvalidArgument(format!(
                "closure index {index} out of range for rank {rank}"
            )));
        }
        let generator = if index == 0 {
            Word::from_raw(1..=rank.get() as i32)
        } else {
            Word::generator(index as i32)
        };
        Ok(ClosureSpec {
            index,
            rank,
            generator,
        })
    }

    /// `R_0, …, R_n` in index order.
    pub fn all(rank: Rank) -> Vec<ClosureSpec> {
        (0..rank.closures())
            .map(|i| ClosureSpec::new(i, rank).unwrap())
            .collect()
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    /// `[i]` for `i ≥ 1`, `[1, 2, …, n]` for `i = 0`.
    pub fn generator_word(&self) -> &Word {
        &self.generator
    }

    /// Image of a single letter under the homomorphism whose kernel is this
    /// closure.
    pub fn letter_image(&self, letter: i32) -> Vec<i32> {
        let g = letter.abs();
        if self.index == 0 {
            if g != 1 {
                return vec![letter];
            }
            // x_1 ↦ x_n⁻¹ … x_2⁻¹ and x_1⁻¹ ↦ x_2 … x_n
            let n = self.rank.get() as i32;
            if letter > 0 {
                (2..=n).rev().map(|k| -k).collect()
            } else {
                (2..=n).collect()
            }
        } else if g as usize == self.index {
            Vec::new()
        } else {
            vec![letter]
        }
    }
}

impl fmt::Display for ClosureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.index)
    }
}

/// Image of `w` under the homomorphism killing the closure's generator.
pub fn eliminate(w: &Word, spec: &ClosureSpec) -> Word {
    Word::from_raw(w.letters().iter().flat_map(|&l| spec.letter_image(l)))
}

pub fn is_member(w: &Word, spec: &ClosureSpec) -> bool {
    eliminate(w, spec).is_empty()
}

/// Algebraic distance: length of the image word; zero iff membership.
pub fn distance(w: &Word, spec: &ClosureSpec) -> usize {
    eliminate(w, spec).len()
}

/// Bit `i` is set iff the word lies in `R_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiLabel(Vec<u8>);

impl MultiLabel {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() || bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument(format!("not a multi-label: {bits:?}")));
        }
        Ok(MultiLabel(bits))
    }

    pub fn all_ones(rank: Rank) -> Self {
        MultiLabel(vec![1; rank.closures()])
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0.get(i) == Some(&1)
    }

    pub fn is_all_ones(&self) -> bool {
        self.0.iter().all(|&b| b == 1)
    }

    pub fn zeros(&self) -> usize {
        self.0.iter().filter(|&&b| b == 0).count()
    }

    /// Rank implied by the label length.
    pub fn rank(&self) -> Result<Rank> {
        Rank::new(self.0.len() as u32 - 1)
    }
}

impl fmt::Display for MultiLabel {
    /// Comma-free bit string, e.g. `1101`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

pub fn multilabel(w: &Word, rank: Rank) -> MultiLabel {
    MultiLabel(
        ClosureSpec::all(rank)
            .iter()
            .map(|spec| is_member(w, spec) as u8)
            .collect(),
    )
}

/// Membership in `R_0 ∩ … ∩ R_n`. The identity counts as a member.
pub fn is_in_full_intersection(w: &Word, rank: Rank) -> bool {
    ClosureSpec::all(rank).iter().all(|spec| is_member(w, spec))
}

// ---------------------------------------------------------------------------
// Sanov representation

/// A 2×2 integer matrix; images of words have determinant 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SanovMatrix(pub [[BigInt; 2]; 2]);

impl SanovMatrix {
    pub fn identity() -> Self {
        Self::from_i64([[1, 0], [0, 1]])
    }

    pub fn from_i64(m: [[i64; 2]; 2]) -> Self {
        SanovMatrix(m.map(|row| row.map(BigInt::from)))
    }

    pub fn is_identity(&self) -> bool {
        let m = &self.0;
        m[0][0].is_one() && m[1][1].is_one() && m[0][1].is_zero() && m[1][0].is_zero()
    }

    pub fn determinant(&self) -> BigInt {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn mul(&self, rhs: &SanovMatrix) -> SanovMatrix {
        let (a, b) = (&self.0, &rhs.0);
        SanovMatrix(std::array::from_fn(|i| {
            std::array::from_fn(|j| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j])
        }))
    }

    /// `x ↦ [[1,2],[0,1]]`, `y ↦ [[1,0],[2,1]]`, with their inverses.
    fn f2_letter(x: bool, positive: bool) -> SanovMatrix {
        let s = if positive { 2 } else { -2 };
        if x {
            Self::from_i64([[1, s], [0, 1]])
        } else {
            Self::from_i64([[1, 0], [s, 1]])
        }
    }
}

/// Expands `x_i ↦ [x, y^i] = x⁻¹ y⁻ⁱ x yⁱ` in `F_2 = F(x, y)`. Letters of
/// the result are `±1` for `x^{±1}` and `±2` for `y^{±1}`.
pub fn to_f2(w: &Word) -> Word {
    let mut out = Word::identity();
    for &l in w.letters() {
        let i = l.unsigned_abs() as usize;
        let mut image = Vec::with_capacity(2 + 2 * i);
        image.push(-1);
        image.extend(std::iter::repeat_n(-2, i));
        image.push(1);
        image.extend(std::iter::repeat_n(2, i));
        if l < 0 {
            image = image.into_iter().rev().map(|a| -a).collect();
        }
        for a in image {
            out.push(a);
        }
    }
    out
}

pub fn sanov_embed(w: &Word) -> SanovMatrix {
    to_f2(w)
        .letters()
        .iter()
        .fold(SanovMatrix::identity(), |acc, &a| {
            acc.mul(&SanovMatrix::f2_letter(a.abs() == 1, a > 0))
        })
}

/// Membership decided through the Sanov image of the eliminated word.
pub fn sanov_is_member(w: &Word, spec: &ClosureSpec) -> Result<bool> {
    sanov_is_member_capped(w, spec, SANOV_LENGTH_CAP)
}

pub fn sanov_is_member_capped(w: &Word, spec: &ClosureSpec, cap: usize) -> Result<bool> {
    if w.len() > cap {
        return Err(Error::LengthCap { len: w.len(), cap });
    }
    Ok(sanov_embed(&eliminate(w, spec)).is_identity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commexpr::expand_text;
    use crate::seeded_rng;

    fn w(l: &[i32]) -> Word {
        Word::from_raw(l.iter().copied())
    }

    fn rank(n: u32) -> Rank {
        Rank::new(n).unwrap()
    }

    fn r(i: usize, n: u32) -> ClosureSpec {
        ClosureSpec::new(i, rank(n)).unwrap()
    }

    #[test]
    fn closure_generators() {
        assert_eq!(r(0, 3).generator_word(), &w(&[1, 2, 3]));
        assert_eq!(r(2, 3).generator_word(), &w(&[2]));
        assert!(ClosureSpec::new(4, rank(3)).is_err());
        assert_eq!(r(1, 3).to_string(), "R1");
    }

    #[test]
    fn eliminate_examples() {
        assert_eq!(eliminate(&w(&[-1, -2, 1, 2, 1]), &r(1, 2)), Word::identity());
        assert_eq!(eliminate(&w(&[1, 2, 3]), &r(0, 3)), Word::identity());
        assert_eq!(eliminate(&w(&[2]), &r(1, 3)), w(&[2]));
        // every rotation of x_0 and its inverse lies in R_0
        for rot in w(&[1, 2, 3]).cyclic_permutations() {
            assert!(is_member(&rot, &r(0, 3)));
            assert!(is_member(&rot.inverse(), &r(0, 3)));
        }
    }

    #[test]
    fn membership_examples() {
        assert!(is_member(&w(&[-1, -2, 1, 2]), &r(1, 2)));
        assert!(is_member(&w(&[-1, -2, 1, 2]), &r(0, 2)));
        assert!(!is_member(&w(&[1]), &r(2, 2)));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&w(&[-1, -2, 1, 2, 1]), &r(1, 2)), 0);
        assert_eq!(distance(&w(&[1, 2]), &r(1, 2)), 1);
        // x1 x2 x3 x1 ↦ (x3⁻¹ x2⁻¹) x2 x3 (x3⁻¹ x2⁻¹) = x3⁻¹ x2⁻¹
        assert_eq!(eliminate(&w(&[1, 2, 3, 1]), &r(0, 3)), w(&[-3, -2]));
        assert_eq!(distance(&w(&[1, 2, 3, 1]), &r(0, 3)), 2);
    }

    #[test]
    fn multilabel_examples() {
        assert_eq!(multilabel(&Word::identity(), rank(3)).bits(), &[1, 1, 1, 1]);
        let c = expand_text("[x1,x2]", rank(2)).unwrap();
        assert_eq!(multilabel(&c, rank(2)).bits(), &[1, 1, 1]);
        // x1 ↦ x2⁻¹ under R_0, ↦ 1 under R_1, untouched under R_2
        assert_eq!(eliminate(&w(&[1]), &r(0, 2)), w(&[-2]));
        assert_eq!(multilabel(&w(&[1]), rank(2)).bits(), &[0, 1, 0]);
        assert_eq!(multilabel(&w(&[1]), rank(2)).to_string(), "010");
    }

    #[test]
    fn full_intersection_examples() {
        let t = expand_text("[[x1,x2],[x1,x2 x3]]", rank(3)).unwrap();
        assert!(is_in_full_intersection(&t, rank(3)));
        assert!(is_in_full_intersection(&Word::identity(), rank(5)));
        assert!(!is_in_full_intersection(&w(&[1]), rank(3)));
    }

    #[test]
    fn rank_one_r0_is_everything() {
        // n = 1: x_0 = x_1, so R_0 = R_1 = F
        assert_eq!(eliminate(&w(&[1, 1]), &r(0, 1)), Word::identity());
    }

    #[test]
    fn sanov_examples() {
        assert!(sanov_embed(&Word::identity()).is_identity());
        assert!(sanov_embed(&Word::from_raw([1, -1])).is_identity());

        // ρ([x, y]) = ρ(x)⁻¹ ρ(y)⁻¹ ρ(x) ρ(y), multiplied out by hand:
        // x⁻¹ y⁻¹ = [[1,-2],[0,1]]·[[1,0],[-2,1]] = [[5,-2],[-2,1]]
        // x y     = [[1,2],[0,1]]·[[1,0],[2,1]]   = [[5,2],[2,1]]
        // product = [[21,8],[-8,-3]]
        assert_eq!(sanov_embed(&w(&[1])), SanovMatrix::from_i64([[21, 8], [-8, -3]]));
        assert!(!sanov_embed(&w(&[1])).is_identity());

        assert!(sanov_is_member(&w(&[-1, -2, 1, 2]), &r(1, 2)).unwrap());
        assert!(!sanov_is_member(&w(&[1]), &r(2, 2)).unwrap());
        assert!(sanov_is_member(&Word::identity(), &r(0, 3)).unwrap());
    }

    #[test]
    fn sanov_cap() {
        let long = Word::from_raw(std::iter::repeat_n(1, 65));
        assert_eq!(
            sanov_is_member(&long, &r(2, 2)),
            Err(Error::LengthCap { len: 65, cap: 64 })
        );
    }

    #[test]
    fn sanov_is_a_homomorphism_with_unit_determinant() {
        let mut rng = seeded_rng(11);
        for _ in 0..200 {
            let u = Word::random_upto(rank(3), 8, &mut rng);
            let v = Word::random_upto(rank(3), 8, &mut rng);
            let uv = sanov_embed(&u.multiply(&v));
            assert_eq!(uv, sanov_embed(&u).mul(&sanov_embed(&v)));
            assert!(uv.determinant().is_one());
        }
    }

    #[test]
    fn distance_zero_iff_member_and_conjugation_invariance() {
        let mut rng = seeded_rng(5);
        let n = rank(3);
        for spec in ClosureSpec::all(n) {
            for _ in 0..300 {
                let u = Word::random_upto(n, 10, &mut rng);
                assert_eq!(distance(&u, &spec) == 0, is_member(&u, &spec));
                let m = spec.generator_word().conjugate(&u);
                let v = Word::random_upto(n, 6, &mut rng);
                assert!(is_member(&m, &spec));
                assert!(is_member(&m.conjugate(&v), &spec));
            }
        }
    }
}
