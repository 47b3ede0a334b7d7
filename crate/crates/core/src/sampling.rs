//! Random generation of elements of normal closures and of (symmetric)
//! commutator subgroups of them.
//!
//! Three samplers build on each other:
//!
//! * [`sample_closure_naive`] multiplies independently conjugated copies of
//!   the closure generator.
//! * [`sample_closure_bracket`] draws a uniform balanced bracket sequence
//!   and fills every matched pair with words `(a, b)` whose product `ab` is
//!   either trivial or a rotation of the generator. Nesting makes adjacent
//!   conjugators interact, which the naive sampler never does.
//! * [`sample_commutator`] and [`sample_symmetric`] combine bracket-style
//!   leaves along random binary trees.
//!
//! Every sampler is a deterministic function of its configuration and the
//! state of the supplied generator.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::closures::ClosureSpec;
use crate::commexpr::CommutatorExpr;
use crate::stats::{sample_bracket_seq, BracketSeq};
use crate::{Error, Rank, Result, Rng, Word};

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub rank: Rank,
    /// Cap on the reduced length of a sampled commutator word.
    pub max_total_length: usize,
    /// Cap on the reduced length of a leaf sampled from `R_0`.
    pub max_r0_length: usize,
    /// Cap on the reduced length of a leaf sampled from `R_i`, `i > 0`.
    pub max_ri_length: usize,
    /// Probability that a bracket pair becomes a `g g⁻¹` pair.
    pub p_identity: f64,
    /// Also split rotations of the inverse generator for `R_0`.
    pub inverse_rotations: bool,
    /// Trees per forest are drawn uniformly from `1..=max_trees`.
    pub max_trees: usize,
    pub max_depth: usize,
    pub max_retries: usize,
}

impl SamplerConfig {
    /// Dataset parameters used for ranks 3, 4 and 5: total length caps
    /// 200/400/600, `R_0` leaves up to 10/9/8 letters and `R_i` leaves up
    /// to 30. Other ranks reuse the nearest of these rows.
    pub fn for_rank(rank: Rank) -> Self {
        let (total, r0) = match rank.get() {
            0..=3 => (200, 10),
            4 => (400, 9),
            _ => (600, 8),
        };
        SamplerConfig {
            rank,
            max_total_length: total,
            max_r0_length: r0,
            max_ri_length: 30,
            p_identity: 0.5,
            inverse_rotations: true,
            max_trees: 3,
            max_depth: 7,
            max_retries: 10_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_total_length == 0 || self.max_r0_length == 0 || self.max_ri_length == 0 {
            return Err(Error::InvalidArgument("length caps must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.p_identity) {
            return Err(Error::InvalidArgument("p_identity must lie in [0, 1)".into()));
        }
        if self.max_trees == 0 || self.max_depth == 0 || self.max_retries == 0 {
            return Err(Error::InvalidArgument("tree bounds must be positive".into()));
        }
        Ok(())
    }

    /// Leaf length cap for the given closure.
    pub fn closure_cap(&self, spec: &ClosureSpec) -> usize {
        if spec.index() == 0 {
            self.max_r0_length
        } else {
            self.max_ri_length
        }
    }
}

fn random_sign(rng: &mut Rng) -> i64 {
    if rng.random_bool(0.5) {
        1
    } else {
        -1
    }
}

/// A uniformly chosen rotation of the generator word.
fn random_rotation(spec: &ClosureSpec, rng: &mut Rng) -> Word {
    let rotations = spec.generator_word().cyclic_permutations();
    rotations[rng.random_range(0..rotations.len())].clone()
}

/// Product of `k` conjugates `y_j⁻¹ g^{±1} y_j` with independent uniform
/// conjugators of length at most `conj_len`. For `R_0`, `g` is a uniformly
/// chosen rotation of `x_1 … x_n`.
pub fn sample_closure_naive(spec: &ClosureSpec, k: usize, conj_len: usize, rng: &mut Rng) -> Result<Word> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one factor".into()));
    }
    let mut out = Word::identity();
    for _ in 0..k {
        let g = random_rotation(spec, rng).pow(random_sign(rng));
        let y = Word::random_upto(spec.rank(), conj_len, rng);
        out = out.multiply(&g.conjugate(&y));
    }
    Ok(out)
}

/// A bracket-style sample together with the bracket sequence it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketSample {
    pub word: Word,
    pub brackets: BracketSeq,
}

/// Fills the matched pairs of `seq`. Each pair gets `(g, g⁻¹)` with
/// probability `p_identity`, otherwise a split `(a, b)` of a rotation of
/// the generator (or its inverse); at least one pair is a split.
pub fn fill_brackets(spec: &ClosureSpec, seq: &BracketSeq, config: &SamplerConfig, rng: &mut Rng) -> Word {
    let partner = seq.matching();
    let opens: Vec<usize> = (0..partner.len()).filter(|&i| seq.symbols()[i]).collect();
    let mut is_identity: Vec<bool> = opens.iter().map(|_| rng.random_bool(config.p_identity)).collect();
    if is_identity.iter().all(|&b| b) {
        let forced = rng.random_range(0..is_identity.len());
        is_identity[forced] = false;
    }

    let mut pieces: Vec<Vec<i32>> = vec![Vec::new(); partner.len()];
    for (&open, identity) in opens.iter().zip(is_identity) {
        let close = partner[open];
        if identity {
            let g = config.rank.random_letter(rng);
            pieces[open] = vec![g];
            pieces[close] = vec![-g];
        } else {
            let mut rot = random_rotation(spec, rng);
            let may_invert = spec.index() != 0 || config.inverse_rotations;
            if may_invert && rng.random_bool(0.5) {
                rot = rot.inverse();
            }
            let cut = rng.random_range(0..=rot.len());
            pieces[open] = rot.letters()[..cut].to_vec();
            pieces[close] = rot.letters()[cut..].to_vec();
        }
    }
    Word::from_raw(pieces.into_iter().flatten())
}

/// Bracket-style sample of `R_spec` with `pairs` bracket pairs.
pub fn sample_closure_bracket_pairs(
    spec: &ClosureSpec,
    pairs: usize,
    config: &SamplerConfig,
    rng: &mut Rng,
) -> Result<BracketSample> {
    let brackets = sample_bracket_seq(pairs, rng)?;
    let word = fill_brackets(spec, &brackets, config, rng);
    Ok(BracketSample { word, brackets })
}

/// Bracket-style sample of `R_spec` whose reduced length respects the
/// configured cap for this closure. The number of pairs is uniform on
/// `1..=⌈cap / 2⌉`; over-long words are resampled.
pub fn sample_closure_bracket(
    spec: &ClosureSpec,
    config: &SamplerConfig,
    rng: &mut Rng,
) -> Result<BracketSample> {
    let cap = config.closure_cap(spec);
    let max_pairs = cap.div_ceil(2).max(1);
    for _ in 0..config.max_retries {
        let pairs = rng.random_range(1..=max_pairs);
        let sample = sample_closure_bracket_pairs(spec, pairs, config, rng)?;
        if sample.word.len() <= cap {
            return Ok(sample);
        }
    }
    Err(Error::RetriesExhausted(config.max_retries))
}

/// Shape of a binary commutator tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeShape {
    Leaf,
    Node(Box<TreeShape>, Box<TreeShape>),
}

impl TreeShape {
    pub fn leaves(&self) -> usize {
        match self {
            TreeShape::Leaf => 1,
            TreeShape::Node(a, b) => a.leaves() + b.leaves(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeShape::Leaf => 0,
            TreeShape::Node(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Builds the commutator expression with leaves taken in order.
    fn build(&self, leaves: &mut impl Iterator<Item = CommutatorExpr>) -> CommutatorExpr {
        match self {
            TreeShape::Leaf => leaves.next().expect("enough leaves"),
            TreeShape::Node(a, b) => {
                let a = a.build(leaves);
                let b = b.build(leaves);
                CommutatorExpr::comm(a, b)
            }
        }
    }
}

/// Smallest depth able to hold `leaves` leaves.
fn min_depth(leaves: usize) -> usize {
    (usize::BITS - (leaves.max(1) - 1).leading_zeros()) as usize
}

/// Random binary tree with `leaves` leaves and depth at most `max_depth`,
/// built by recursively splitting the leaf count uniformly among the
/// splits that still fit the depth bound.
pub fn sample_tree_shape(leaves: usize, max_depth: usize, rng: &mut Rng) -> Result<TreeShape> {
    if leaves == 0 || min_depth(leaves) > max_depth {
        return Err(Error::InvalidArgument(format!(
            "{leaves} leaves do not fit in depth {max_depth}"
        )));
    }
    Ok(shape_rec(leaves, max_depth, rng))
}

fn shape_rec(leaves: usize, depth: usize, rng: &mut Rng) -> TreeShape {
    if leaves == 1 {
        return TreeShape::Leaf;
    }
    let fits = |k: usize| min_depth(k) < depth;
    let options: Vec<usize> = (1..leaves).filter(|&l| fits(l) && fits(leaves - l)).collect();
    let left = options[rng.random_range(0..options.len())];
    TreeShape::Node(
        Box::new(shape_rec(left, depth - 1, rng)),
        Box::new(shape_rec(leaves - left, depth - 1, rng)),
    )
}

/// Trees, leaf assignment and leaf words of one commutator sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorTreePlan {
    pub shapes: Vec<TreeShape>,
    /// Closure index of each leaf position, a permutation of the indices.
    pub assignment: Vec<usize>,
    /// Leaf words, `shapes.len() * assignment.len()` of them, tree by tree.
    pub leaves: Vec<Word>,
}

impl CommutatorTreePlan {
    pub fn expression(&self) -> CommutatorExpr {
        let k = self.assignment.len();
        let trees = self
            .shapes
            .iter()
            .zip(self.leaves.chunks(k))
            .map(|(shape, words)| shape.build(&mut words.iter().cloned().map(CommutatorExpr::Leaf)))
            .collect();
        CommutatorExpr::product(trees)
    }
}

fn check_indices(indices: &[usize], rank: Rank) -> Result<()> {
    if indices.len() < 2 {
        return Err(Error::InvalidArgument("need at least two closures".into()));
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != indices.len() {
        return Err(Error::InvalidArgument("closure indices must be distinct".into()));
    }
    if let Some(&i) = sorted.iter().find(|&&i| i > rank.get() as usize) {
        return Err(Error::InvalidArgument(format!("closure index {i} out of range")));
    }
    Ok(())
}

/// Draws a plan: `t ~ U{1..=max_trees}` trees, one uniform permutation of
/// the closures over the leaf positions, bracket-style words at the leaves.
pub fn sample_plan(
    indices: &[usize],
    trees: usize,
    config: &SamplerConfig,
    rng: &mut Rng,
) -> Result<CommutatorTreePlan> {
    let k = indices.len();
    let mut assignment = indices.to_vec();
    assignment.shuffle(rng);
    let mut shapes = Vec::with_capacity(trees);
    let mut leaves = Vec::with_capacity(trees * k);
    for _ in 0..trees {
        shapes.push(sample_tree_shape(k, config.max_depth, rng)?);
        for &i in &assignment {
            let spec = ClosureSpec::new(i, config.rank)?;
            leaves.push(sample_closure_bracket(&spec, config, rng)?.word);
        }
    }
    Ok(CommutatorTreePlan {
        shapes,
        assignment,
        leaves,
    })
}

/// A sampled word in `∩_{j ∈ indices} R_j` with its commutator expression.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorSample {
    pub word: Word,
    pub expr: CommutatorExpr,
}

/// Product of a random forest of arbitrary-shape commutator trees whose
/// leaves are bracket-style samples of the closures `indices` (one leaf
/// per closure per tree). Words over the total cap are resampled.
pub fn sample_commutator(
    indices: &[usize],
    config: &SamplerConfig,
    rng: &mut Rng,
) -> Result<CommutatorSample> {
    config.validate()?;
    check_indices(indices, config.rank)?;
    for _ in 0..config.max_retries {
        let trees = rng.random_range(1..=config.max_trees);
        let plan = sample_plan(indices, trees, config, rng)?;
        let expr = plan.expression();
        let word = expr.expand(config.rank)?;
        if word.len() <= config.max_total_length {
            return Ok(CommutatorSample { word, expr });
        }
    }
    Err(Error::RetriesExhausted(config.max_retries))
}

/// Product of `U{1..=max_trees}` commutator trees, each with its own
/// independent permutation of the closures: a sample from the symmetric
/// commutator subgroup of `indices`.
pub fn sample_symmetric(
    indices: &[usize],
    config: &SamplerConfig,
    rng: &mut Rng,
) -> Result<CommutatorSample> {
    config.validate()?;
    check_indices(indices, config.rank)?;
    for _ in 0..config.max_retries {
        let factors = rng.random_range(1..=config.max_trees);
        let mut trees = Vec::with_capacity(factors);
        for _ in 0..factors {
            trees.push(sample_plan(indices, 1, config, rng)?.expression());
        }
        let expr = CommutatorExpr::product(trees);
        let word = expr.expand(config.rank)?;
        if word.len() <= config.max_total_length {
            return Ok(CommutatorSample { word, expr });
        }
    }
    Err(Error::RetriesExhausted(config.max_retries))
}

/// Naive samples whose lengths reproduce `targets` exactly, one per target,
/// for comparing samplers under matched length distributions. Candidates
/// use `k ~ U{1..=max_factors}` and `conj_len ~ U{0..=max_conj_len}`.
pub fn naive_length_matched(
    spec: &ClosureSpec,
    targets: &[usize],
    max_factors: usize,
    max_conj_len: usize,
    rng: &mut Rng,
) -> Result<Vec<Word>> {
    use std::collections::BTreeMap;
    let mut wanted: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (slot, &len) in targets.iter().enumerate() {
        wanted.entry(len).or_default().push(slot);
    }
    let mut out: Vec<Option<Word>> = vec![None; targets.len()];
    let mut missing = targets.len();
    let budget = 1000 * targets.len().max(1);
    for _ in 0..budget {
        if missing == 0 {
            break;
        }
        let k = rng.random_range(1..=max_factors.max(1));
        let conj_len = rng.random_range(0..=max_conj_len);
        let w = sample_closure_naive(spec, k, conj_len, rng)?;
        if let Some(slots) = wanted.get_mut(&w.len()) {
            if let Some(slot) = slots.pop() {
                out[slot] = Some(w);
                missing -= 1;
            }
        }
    }
    if missing > 0 {
        return Err(Error::RetriesExhausted(budget));
    }
    Ok(out.into_iter().map(Option::unwrap).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closures::{is_member, multilabel};
    use crate::seeded_rng;

    fn rank(n: u32) -> Rank {
        Rank::new(n).unwrap()
    }

    #[test]
    fn naive_smallest_case() {
        let mut rng = seeded_rng(1);
        let r1 = ClosureSpec::new(1, rank(3)).unwrap();
        for _ in 0..50 {
            let w = sample_closure_naive(&r1, 1, 0, &mut rng).unwrap();
            assert!(w == Word::generator(1) || w == Word::generator(-1));
        }
        assert!(sample_closure_naive(&r1, 0, 3, &mut rng).is_err());
    }

    #[test]
    fn naive_and_bracket_samples_are_members() {
        let mut rng = seeded_rng(2);
        let n = rank(3);
        let config = SamplerConfig::for_rank(n);
        for spec in ClosureSpec::all(n) {
            for _ in 0..2000 {
                let w = sample_closure_naive(&spec, rng.random_range(1..5), 6, &mut rng).unwrap();
                assert!(is_member(&w, &spec));
                let b = sample_closure_bracket(&spec, &config, &mut rng).unwrap();
                assert!(is_member(&b.word, &spec), "{spec}: {}", b.word);
                assert!(b.word.len() <= config.closure_cap(&spec));
            }
        }
    }

    #[test]
    fn single_pair_bracket_sample() {
        let mut rng = seeded_rng(4);
        let n = rank(3);
        let r1 = ClosureSpec::new(1, n).unwrap();
        let config = SamplerConfig::for_rank(n);
        for _ in 0..50 {
            let s = sample_closure_bracket_pairs(&r1, 1, &config, &mut rng).unwrap();
            // the single pair is forced to be a split of x1 or x1⁻¹
            assert!(s.word == Word::generator(1) || s.word == Word::generator(-1));
        }
    }

    #[test]
    fn r0_pairs_split_rotations() {
        // with no identity pairs every split is a rotation of x0^{±1}
        let mut rng = seeded_rng(8);
        let n = rank(3);
        let r0 = ClosureSpec::new(0, n).unwrap();
        let config = SamplerConfig {
            p_identity: 0.0,
            ..SamplerConfig::for_rank(n)
        };
        let seq: BracketSeq = "()".parse().unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..500 {
            let w = fill_brackets(&r0, &seq, &config, &mut rng);
            seen.insert(w.clone());
            assert!(is_member(&w, &r0));
        }
        // three rotations of x1x2x3 and three of its inverse
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn tree_shapes() {
        let mut rng = seeded_rng(5);
        for leaves in 1..=8 {
            for _ in 0..50 {
                let s = sample_tree_shape(leaves, 7, &mut rng).unwrap();
                assert_eq!(s.leaves(), leaves);
                assert!(s.depth() <= 7);
            }
        }
        // 8 leaves need depth 3
        for _ in 0..50 {
            assert_eq!(sample_tree_shape(8, 3, &mut rng).unwrap().depth(), 3);
        }
        assert!(sample_tree_shape(9, 3, &mut rng).is_err());
        // both balanced and comb shapes appear for four leaves
        let depths: std::collections::BTreeSet<usize> = (0..200)
            .map(|_| sample_tree_shape(4, 7, &mut rng).unwrap().depth())
            .collect();
        assert_eq!(depths.into_iter().collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn commutator_samples_lie_in_each_indexed_closure() {
        let mut rng = seeded_rng(6);
        let n = rank(3);
        let config = SamplerConfig::for_rank(n);
        for indices in [vec![1, 2], vec![0, 1, 3], vec![0, 1, 2, 3]] {
            for _ in 0..300 {
                let s = sample_commutator(&indices, &config, &mut rng).unwrap();
                assert!(s.word.len() <= config.max_total_length);
                assert_eq!(s.expr.expand(n).unwrap(), s.word);
                let label = multilabel(&s.word, n);
                for &i in &indices {
                    assert!(label.get(i));
                }
            }
        }
        assert!(sample_commutator(&[1], &config, &mut rng).is_err());
        assert!(sample_commutator(&[1, 1], &config, &mut rng).is_err());
        assert!(sample_commutator(&[1, 4], &config, &mut rng).is_err());
    }

    #[test]
    fn symmetric_samples_of_full_set_are_all_ones() {
        let mut rng = seeded_rng(7);
        let n = rank(2);
        let config = SamplerConfig::for_rank(n);
        for _ in 0..500 {
            let s = sample_symmetric(&[0, 1, 2], &config, &mut rng).unwrap();
            assert!(multilabel(&s.word, n).is_all_ones());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let n = rank(3);
        let config = SamplerConfig::for_rank(n);
        let draw = |seed| {
            let mut rng = seeded_rng(seed);
            (0..20)
                .map(|_| sample_symmetric(&[0, 2, 3], &config, &mut rng).unwrap().word)
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(13), draw(13));
        assert_ne!(draw(13), draw(14));
    }

    #[test]
    fn length_matching_reproduces_targets() {
        let mut rng = seeded_rng(3);
        let r1 = ClosureSpec::new(1, rank(3)).unwrap();
        let targets = [1, 3, 5, 8, 13, 21];
        let words = naive_length_matched(&r1, &targets, 6, 10, &mut rng).unwrap();
        let lens: Vec<usize> = words.iter().map(Word::len).collect();
        assert_eq!(lens, targets);
        assert!(words.iter().all(|w| is_member(w, &r1)));
    }

    #[test]
    fn config_validation() {
        let mut c = SamplerConfig::for_rank(rank(3));
        assert_eq!(
            (c.max_total_length, c.max_r0_length, c.max_ri_length),
            (200, 10, 30)
        );
        let c5 = SamplerConfig::for_rank(rank(5));
        assert_eq!((c5.max_total_length, c5.max_r0_length), (600, 8));
        c.p_identity = 1.0;
        assert!(c.validate().is_err());
    }
}
