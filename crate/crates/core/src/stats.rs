//! Balanced bracket sequences, Dyck paths, valleys and the two-sample
//! Kolmogorov–Smirnov test.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;

use crate::closures::ClosureSpec;
use crate::{Error, Result, Word};

/// A balanced sequence of brackets; `true` is an opening bracket.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BracketSeq(Vec<bool>);

impl BracketSeq {
    pub fn new(symbols: Vec<bool>) -> Result<Self> {
        let mut height = 0i64;
        for &open in &symbols {
            height += if open { 1 } else { -1 };
            if height < 0 {
                return Err(Error::InvalidArgument("unbalanced bracket sequence".into()));
            }
        }
        if height != 0 {
            return Err(Error::InvalidArgument("unbalanced bracket sequence".into()));
        }
        Ok(BracketSeq(symbols))
    }

    pub fn symbols(&self) -> &[bool] {
        &self.0
    }

    pub fn pairs(&self) -> usize {
        self.0.len() / 2
    }

    /// For every position, the index of its partner bracket.
    pub fn matching(&self) -> Vec<usize> {
        let mut partner = vec![0; self.0.len()];
        let mut stack = Vec::new();
        for (i, &open) in self.0.iter().enumerate() {
            if open {
                stack.push(i);
            } else {
                let j = stack.pop().expect("balanced");
                partner[i] = j;
                partner[j] = i;
            }
        }
        partner
    }
}

impl fmt::Display for BracketSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &open in &self.0 {
            f.write_str(if open { "(" } else { ")" })?;
        }
        Ok(())
    }
}

impl FromStr for BracketSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                '(' => Ok(true),
                ')' => Ok(false),
                _ => Err(Error::InvalidArgument(format!("not a bracket: `{c}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        BracketSeq::new(symbols)
    }
}

/// Uniform sample over all `Catalan(pairs)` balanced sequences.
///
/// Shuffles `pairs` openings and `pairs + 1` closings; exactly one rotation
/// of every such arrangement has all proper prefix sums non-negative after
/// dropping its final closing bracket (the cycle lemma), and every balanced
/// sequence arises from exactly `2·pairs + 1` arrangements.
pub fn sample_bracket_seq(pairs: usize, rng: &mut crate::Rng) -> Result<BracketSeq> {
    if pairs == 0 {
        return Err(Error::InvalidArgument("need at least one bracket pair".into()));
    }
    let mut seq: Vec<bool> = std::iter::repeat_n(true, pairs)
        .chain(std::iter::repeat_n(false, pairs + 1))
        .collect();
    seq.shuffle(rng);

    // rotate to start right after the first position of minimal prefix sum
    let (mut height, mut min, mut at) = (0i64, 0i64, 0usize);
    for (i, &open) in seq.iter().enumerate() {
        height += if open { 1 } else { -1 };
        if height < min {
            min = height;
            at = i + 1;
        }
    }
    let len = seq.len();
    seq.rotate_left(at % len);
    seq.pop();
    Ok(BracketSeq(seq))
}

/// Heights of a lattice path; consecutive entries differ by exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyckPath(Vec<usize>);

impl DyckPath {
    pub fn heights(&self) -> &[usize] {
        &self.0
    }
}

/// Running height after each symbol.
pub fn dyck_path(seq: &BracketSeq) -> DyckPath {
    let mut h = 0usize;
    DyckPath(
        seq.0
            .iter()
            .map(|&open| {
                if open {
                    h += 1
                } else {
                    h -= 1
                }
                h
            })
            .collect(),
    )
}

/// The Dyck path of a word relative to a closure: the reduced length of
/// the image of each prefix, one step per image letter, with steps that
/// leave the height unchanged dropped. For a member of the closure the
/// path returns to zero.
pub fn word_dyck_path(w: &Word, spec: &ClosureSpec) -> DyckPath {
    let mut image = Word::identity();
    let mut heights = Vec::new();
    for &l in w.letters() {
        for a in spec.letter_image(l) {
            image.push(a);
            heights.push(image.len());
        }
    }
    DyckPath(heights)
}

/// Number of local minima of positive height, counted with the path
/// anchored at zero on both ends.
pub fn count_valleys(path: &DyckPath) -> usize {
    let mut h: Vec<usize> = Vec::with_capacity(path.0.len() + 2);
    h.push(0);
    for &x in &path.0 {
        if h.last() != Some(&x) {
            h.push(x);
        }
    }
    if h.last() != Some(&0) {
        h.push(0);
    }
    h.windows(3)
        .filter(|w| w[1] > 0 && w[0] > w[1] && w[1] < w[2])
        .count()
}

/// Result of a two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample KS test with the asymptotic Kolmogorov p-value
/// (effective size `nm/(n+m)`, with the usual small-sample correction
/// to the scaling of the statistic).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);

    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }

    let ne = (na * nb / (na + nb)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_survival(lambda),
    })
}

/// `Q(λ) = P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    use std::f64::consts::PI;
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series, fast for small λ
        let y = -PI * PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=20)
            .map(|k| ((2 * k - 1) as f64).powi(2) * y)
            .map(f64::exp)
            .sum();
        (1.0 - (2.0 * PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Sample mean and (population) variance.
pub fn mean_variance(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}
