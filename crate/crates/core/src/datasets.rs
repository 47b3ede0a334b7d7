//! Labelled word datasets and their on-disk formats.
//!
//! Labels are always recomputed with the membership oracle, never taken
//! from what a sampler intended to produce.
//!
//! Two line-oriented formats are supported:
//!
//! * JSONL, the canonical storage:
//!   `{"word":[-1,-2,1,2],"label":[1,1,1],"source":"partial:0"}`
//! * tokens, consumed by language-model trainers: an optional prompt
//!   (`R<i>` for every set label bit in ascending order, then `:`) followed
//!   by the letters, all whitespace-delimited: `R0 R1 R2 : -1 -2 1 2`.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closures::{is_in_full_intersection, multilabel, MultiLabel};
use crate::commexpr::expand_text;
use crate::sampling::{sample_symmetric, SamplerConfig};
use crate::{Error, Rank, Result, Rng, Word};

/// Which generator produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    /// Sampled from the symmetric commutator of all closures but `R_i`.
    Partial(usize),
    Negative,
    NontrivialEval,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Partial(i) => write!(f, "partial:{i}"),
            Source::Negative => f.write_str("negative"),
            Source::NontrivialEval => f.write_str("nontrivial-eval"),
        }
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negative" => Ok(Source::Negative),
            "nontrivial-eval" => Ok(Source::NontrivialEval),
            _ => s
                .strip_prefix("partial:")
                .and_then(|i| i.parse().ok())
                .map(Source::Partial)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown source `{s}`"))),
        }
    }
}

impl Serialize for Source {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Source {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub word: Word,
    pub label: MultiLabel,
    pub source: Source,
}

impl DatasetRecord {
    /// Labels `word` with the oracle.
    pub fn labelled(word: Word, rank: Rank, source: Source) -> Self {
        let label = multilabel(&word, rank);
        DatasetRecord { word, label, source }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    pub sampler: SamplerConfig,
    /// Records per output shard when writing several files.
    pub records_per_shard: usize,
}

impl DatasetConfig {
    pub fn for_rank(rank: Rank) -> Self {
        DatasetConfig {
            sampler: SamplerConfig::for_rank(rank),
            records_per_shard: 100_000,
        }
    }

    pub fn rank(&self) -> Rank {
        self.sampler.rank
    }
}

/// Endless stream of records from the partial intersections: the `k`-th
/// record is drawn from `[R_j : j ≠ k mod (n+1)]_S`.
pub struct TrainingStream<'a> {
    config: &'a DatasetConfig,
    rng: &'a mut Rng,
    next: usize,
}

pub fn gen_training_stream<'a>(config: &'a DatasetConfig, rng: &'a mut Rng) -> Result<TrainingStream<'a>> {
    config.sampler.validate()?;
    if config.rank().get() < 2 {
        return Err(Error::UnsupportedRank(config.rank().get()));
    }
    Ok(TrainingStream { config, rng, next: 0 })
}

impl Iterator for TrainingStream<'_> {
    type Item = Result<DatasetRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        let rank = self.config.rank();
        let i = self.next % rank.closures();
        self.next += 1;
        let indices: Vec<usize> = (0..rank.closures()).filter(|&j| j != i).collect();
        Some(
            nonempty_symmetric(&indices, &self.config.sampler, self.rng)
                .map(|w| DatasetRecord::labelled(w, rank, Source::Partial(i))),
        )
    }
}

/// Endless stream from the symmetric commutator of all closures, i.e. the
/// words that are trivial by construction.
pub struct NegativeStream<'a> {
    config: &'a DatasetConfig,
    rng: &'a mut Rng,
}

pub fn gen_negative_stream<'a>(config: &'a DatasetConfig, rng: &'a mut Rng) -> Result<NegativeStream<'a>> {
    config.sampler.validate()?;
    Ok(NegativeStream { config, rng })
}

impl Iterator for NegativeStream<'_> {
    type Item = Result<DatasetRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        let rank = self.config.rank();
        let indices: Vec<usize> = (0..rank.closures()).collect();
        Some(
            nonempty_symmetric(&indices, &self.config.sampler, self.rng)
                .map(|w| DatasetRecord::labelled(w, rank, Source::Negative)),
        )
    }
}

// Products of cancelling pairs can reduce to the identity, which carries no
// label information.
fn nonempty_symmetric(indices: &[usize], config: &SamplerConfig, rng: &mut Rng) -> Result<Word> {
    for _ in 0..config.max_retries {
        let word = sample_symmetric(indices, config, rng)?.word;
        if !word.is_empty() {
            return Ok(word);
        }
    }
    Err(Error::RetriesExhausted(config.max_retries))
}

/// Known generators of `π_{n+1}(S²)` as elements of the full
/// intersection, for `n = 2, 3, 4`.
pub fn nontrivial_generator(rank: Rank) -> Option<&'static str> {
    match rank.get() {
        2 => Some("[x1, x2]"),
        3 => Some("[[x1, x2], [x1, x2 x3]]"),
        4 => Some("[[[x1, x2], [x1, x2 x3]], [[x1, x2], [x1, x2 x3 x4]]]"),
        _ => None,
    }
}

/// All cyclic permutations of the reduced non-trivial generator.
pub fn gen_nontrivial_eval(rank: Rank) -> Result<Vec<DatasetRecord>> {
    let text = nontrivial_generator(rank).ok_or(Error::UnsupportedRank(rank.get()))?;
    let word = expand_text(text, rank)?;
    Ok(word
        .cyclic_permutations()
        .into_iter()
        .map(|w| {
            let record = DatasetRecord::labelled(w, rank, Source::NontrivialEval);
            debug_assert!(is_in_full_intersection(&record.word, rank));
            record
        })
        .collect())
}

// ---------------------------------------------------------------------------
// serialization

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Tokens { prompt: bool },
}

pub fn to_jsonl(record: &DatasetRecord) -> String {
    serde_json::to_string(record).expect("records always serialize")
}

/// `R<i> … : letters…`, or just the letters without a prompt.
pub fn to_tokens(record: &DatasetRecord, prompt: bool) -> String {
    let mut out = String::new();
    if prompt {
        for (i, &b) in record.label.bits().iter().enumerate() {
            if b == 1 {
                out.push_str(&format!("R{i} "));
            }
        }
        out.push(':');
        if !record.word.is_empty() {
            out.push(' ');
        }
    }
    out.push_str(&record.word.to_string());
    out
}

pub fn serialize(records: &[DatasetRecord], format: Format) -> String {
    let mut out = String::new();
    for r in records {
        match format {
            Format::Jsonl => out.push_str(&to_jsonl(r)),
            Format::Tokens { prompt } => out.push_str(&to_tokens(r, prompt)),
        }
        out.push('\n');
    }
    out
}

pub fn write_records<W: Write>(
    records: impl IntoIterator<Item = DatasetRecord>,
    format: Format,
    mut out: W,
) -> std::io::Result<()> {
    for r in records {
        match format {
            Format::Jsonl => writeln!(out, "{}", to_jsonl(&r))?,
            Format::Tokens { prompt } => writeln!(out, "{}", to_tokens(&r, prompt))?,
        }
    }
    Ok(())
}

/// Parses one JSONL record and checks it: letters fit the rank implied by
/// the label length, and the label equals the oracle label.
pub fn parse_jsonl_line(line: &str, line_no: usize) -> Result<DatasetRecord> {
    let malformed = |msg: String| Error::Malformed { line: line_no, msg };
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
    let label = MultiLabel::from_bits(raw.label).map_err(|e| malformed(e.to_string()))?;
    let rank = label.rank().map_err(|e| malformed(e.to_string()))?;
    let word = crate::words::reduce(&raw.word, rank).map_err(|e| malformed(e.to_string()))?;
    if word.letters() != raw.word.as_slice() {
        return Err(malformed("word is not freely reduced".into()));
    }
    if multilabel(&word, rank) != label {
        return Err(malformed("label does not match the membership oracle".into()));
    }
    Ok(DatasetRecord {
        word,
        label,
        source: raw.source,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    word: Vec<i32>,
    label: Vec<u8>,
    source: Source,
}

/// One line of the tokens format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenLine {
    /// Closures named in the prompt, if a prompt is present.
    pub prompt: Option<Vec<usize>>,
    pub word: Word,
}

impl TokenLine {
    /// The multi-label spelled by the prompt.
    pub fn label(&self, rank: Rank) -> Option<MultiLabel> {
        let prompt = self.prompt.as_ref()?;
        let mut bits = vec![0u8; rank.closures()];
        for &i in prompt {
            bits[i] = 1;
        }
        Some(MultiLabel::from_bits(bits).expect("valid bits"))
    }
}

pub fn parse_token_line(line: &str, rank: Rank, line_no: usize) -> Result<TokenLine> {
    let malformed = |msg: String| Error::Malformed { line: line_no, msg };
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let (prompt, letters) = match tokens.iter().position(|&t| t == ":") {
        Some(sep) => {
            let mut closures = Vec::with_capacity(sep);
            for t in &tokens[..sep] {
                let i = t
                    .strip_prefix('R')
                    .and_then(|i| i.parse::<usize>().ok())
                    .filter(|&i| i < rank.closures())
                    .ok_or_else(|| malformed(format!("bad prompt token `{t}`")))?;
                if closures.last().is_some_and(|&last| last >= i) {
                    return Err(malformed("prompt tokens must be strictly ascending".into()));
                }
                closures.push(i);
            }
            (Some(closures), &tokens[sep + 1..])
        }
        None => (None, &tokens[..]),
    };
    let raw = letters
        .iter()
        .map(|t| {
            t.parse::<i32>()
                .map_err(|_| malformed(format!("bad letter `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let word = crate::words::reduce(&raw, rank).map_err(|e| malformed(e.to_string()))?;
    Ok(TokenLine { prompt, word })
}

/// Reads JSONL records; blank lines are skipped, line numbers are 1-based.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<DatasetRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Malformed {
            line: i + 1,
            msg: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_jsonl_line(&line, i + 1)?);
    }
    Ok(out)
}

pub fn deserialize_jsonl(text: &str) -> Result<Vec<DatasetRecord>> {
    read_jsonl(text.as_bytes())
}

pub fn deserialize_tokens(text: &str, rank: Rank) -> Result<Vec<TokenLine>> {
    text.lines()
        .enumerate()
        .map(|(i, line)| parse_token_line(line, rank, i + 1))
        .collect()
}
