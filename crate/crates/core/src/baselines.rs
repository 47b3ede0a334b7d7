//! Non-neural generators of full-intersection words.

use rand::Rng as _;
use rand_distr::{Binomial, Distribution};

use crate::closures::{distance, is_in_full_intersection, is_member, ClosureSpec};
use crate::sampling::{sample_symmetric, SamplerConfig};
use crate::{Error, Rank, Result, Rng, Word};

/// Outcome of a batch of random-search draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub hits: Vec<Word>,
    pub batch: usize,
    pub completion_ratio: f64,
}

/// Samples from `[R_0, …, R̂_i, …, R_n]_S` with `i` cycling through
/// `1..=n` and keeps the draws that also land in `R_i` (nonempty ones).
pub fn random_search(batch: usize, config: &SamplerConfig, rng: &mut Rng) -> Result<SearchReport> {
    let rank = config.rank;
    let n = rank.get() as usize;
    if batch == 0 {
        return Err(Error::InvalidArgument("batch must be at least 1".into()));
    }
    if n < 2 {
        return Err(Error::UnsupportedRank(rank.get()));
    }
    let mut hits = Vec::new();
    for draw in 0..batch {
        let i = 1 + draw % n;
        let complement: Vec<usize> = (0..=n).filter(|&j| j != i).collect();
        let sample = sample_symmetric(&complement, config, rng)?;
        let spec = ClosureSpec::new(i, rank)?;
        if !sample.word.is_empty() && is_member(&sample.word, &spec) {
            debug_assert!(is_in_full_intersection(&sample.word, rank));
            hits.push(sample.word);
        }
    }
    let completion_ratio = hits.len() as f64 / batch as f64;
    Ok(SearchReport {
        hits,
        batch,
        completion_ratio,
    })
}

/// `d(w) = Σ_i d(w, R_i)`; zero exactly on the full intersection.
pub fn objective(w: &Word, rank: Rank) -> usize {
    ClosureSpec::all(rank).iter().map(|spec| distance(w, spec)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvoConfig {
    pub rank: Rank,
    /// Length of the letter sequence that is mutated (the genome).
    pub initial_length: usize,
    pub max_iterations: usize,
}

impl EvoConfig {
    pub fn new(rank: Rank) -> Self {
        EvoConfig {
            rank,
            initial_length: 16,
            max_iterations: 10_000,
        }
    }
}

/// One run of the (1+1)-EA.
#[derive(Debug, Clone, PartialEq)]
pub struct EvoRun {
    pub hit: Option<Word>,
    pub iterations: usize,
    /// Objective of the current candidate after every iteration.
    pub trace: Vec<usize>,
}

/// Elitist (1+1)-EA over fixed-length letter sequences.
///
/// Every step replaces `max(1, Binomial(L, 1/L))` random positions with
/// uniform letters and keeps the mutant iff its objective does not grow.
/// Stops at the first candidate whose reduced form is nonempty with
/// objective zero.
pub fn evolve(config: &EvoConfig, rng: &mut Rng) -> Result<Option<Word>> {
    Ok(evolve_traced(config, rng)?.hit)
}

pub fn evolve_traced(config: &EvoConfig, rng: &mut Rng) -> Result<EvoRun> {
    if config.initial_length == 0 {
        return Err(Error::InvalidArgument("initial length must be positive".into()));
    }
    let genome = Word::random(config.rank, config.initial_length, rng).into_letters();
    evolve_from(genome, config, rng)
}

/// Runs the EA from a given letter sequence.
pub fn evolve_from(mut genome: Vec<i32>, config: &EvoConfig, rng: &mut Rng) -> Result<EvoRun> {
    let rank = config.rank;
    for &l in &genome {
        rank.check_letter(l)?;
    }
    if genome.is_empty() {
        return Err(Error::InvalidArgument("empty genome".into()));
    }
    let is_hit = |w: &Word, d: usize| d == 0 && !w.is_empty();

    let mut word = Word::from_raw(genome.iter().copied());
    let mut score = objective(&word, rank);
    let mut trace = Vec::new();
    if is_hit(&word, score) {
        return Ok(EvoRun {
            hit: Some(word),
            iterations: 0,
            trace,
        });
    }

    let len = genome.len();
    let binomial =
        Binomial::new(len as u64, 1.0 / len as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    for it in 1..=config.max_iterations {
        let flips = (binomial.sample(rng) as usize).max(1);
        let mut mutant = genome.clone();
        for _ in 0..flips {
            let pos = rng.random_range(0..len);
            mutant[pos] = rank.random_letter(rng);
        }
        let mutant_word = Word::from_raw(mutant.iter().copied());
        let mutant_score = objective(&mutant_word, rank);
        if mutant_score <= score {
            genome = mutant;
            word = mutant_word;
            score = mutant_score;
        }
        trace.push(score);
        if is_hit(&word, score) {
            return Ok(EvoRun {
                hit: Some(word),
                iterations: it,
                trace,
            });
        }
    }
    Ok(EvoRun {
        hit: None,
        iterations: config.max_iterations,
        trace,
    })
}

/// Prefix plus one residual stack per closure.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyState {
    rank: Rank,
    closures: Vec<ClosureSpec>,
    word: Word,
    stacks: Vec<Word>,
}

impl GreedyState {
    /// Panics if `closures` is empty.
    pub fn new(prefix: &Word, closures: Vec<ClosureSpec>) -> Self {
        let rank = closures.first().expect("at least one closure").rank();
        let mut state = GreedyState {
            rank,
            stacks: vec![Word::identity(); closures.len()],
            closures,
            word: Word::identity(),
        };
        for &l in prefix.letters() {
            state.push(l);
        }
        state
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn stacks(&self) -> &[Word] {
        &self.stacks
    }

    pub fn closures(&self) -> &[ClosureSpec] {
        &self.closures
    }

    pub fn push(&mut self, token: i32) {
        self.word.push(token);
        for (stack, spec) in self.stacks.iter_mut().zip(&self.closures) {
            for a in spec.letter_image(token) {
                stack.push(a);
            }
        }
    }

    pub fn is_complete(&self) -> bool {
        !self.word.is_empty() && self.stacks.iter().all(Word::is_empty)
    }

    /// Points for appending `token`, or `None` if the token would cancel
    /// the last letter of the word itself.
    ///
    /// Per stack, one point if the stack does not grow (it shrinks, or the
    /// token is invisible to it). For `R_0`, one more point if the token
    /// continues a rotation of `x_1 … x_n` from the top of the stack.
    pub fn score(&self, token: i32) -> Option<u32> {
        if self.word.last() == Some(-token) {
            return None;
        }
        let mut points = 0;
        for (stack, spec) in self.stacks.iter().zip(&self.closures) {
            let mut grown = stack.clone();
            for a in spec.letter_image(token) {
                grown.push(a);
            }
            if grown.len() <= stack.len() {
                points += 1;
            }
            if spec.index() == 0 && continues_rotation(stack.last(), token, spec.rank()) {
                points += 1;
            }
        }
        Some(points)
    }

    /// Highest-scoring token; ties go to the earliest token in the order
    /// `1, -1, 2, -2, …`.
    pub fn best_token(&self) -> i32 {
        let mut best: Option<(u32, i32)> = None;
        for t in self.rank.letters() {
            if let Some(s) = self.score(t) {
                if best.is_none_or(|(b, _)| s > b) {
                    best = Some((s, t));
                }
            }
        }
        best.expect("at most one token is excluded").1
    }
}

/// Top `x_k` is continued by `x_{k+1}` (and `x_n` by `x_1`); top `x_k⁻¹`
/// by `x_{k-1}⁻¹` (and `x_1⁻¹` by `x_n⁻¹`).
fn continues_rotation(top: Option<i32>, token: i32, rank: Rank) -> bool {
    let n = rank.get() as i32;
    match top {
        Some(k) if k > 0 => token == k % n + 1,
        Some(k) if k < 0 => token == -((-k + n - 2) % n + 1),
        _ => false,
    }
}

/// Tokens greedy may append to a prefix before giving up.
pub const DEFAULT_MAX_STEPS: usize = 100;

/// Greedy completion against every closure `R_0 … R_n`.
pub fn greedy_complete(prefix: &Word, rank: Rank, max_steps: usize) -> Option<Word> {
    greedy_complete_with(prefix, ClosureSpec::all(rank), max_steps)
}

/// Appends the best-scoring token until every stack is empty and the word
/// is nonempty, or until `max_steps` tokens have been appended.
pub fn greedy_complete_with(prefix: &Word, closures: Vec<ClosureSpec>, max_steps: usize) -> Option<Word> {
    let mut state = GreedyState::new(prefix, closures);
    for _ in 0..max_steps {
        if state.is_complete() {
            break;
        }
        let t = state.best_token();
        state.push(t);
    }
    state.is_complete().then(|| state.word.clone())
}
