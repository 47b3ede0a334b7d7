//! Completion and reduction ratios, and the batch evaluation harness used
//! for every generator (baselines and external models alike).

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::closures::{distance, is_in_full_intersection, ClosureSpec};
use crate::datasets::{gen_training_stream, DatasetConfig};
use crate::{Error, Rank, Result, Rng, Word};

/// Prefix lengths used for evaluation runs.
pub const DEFAULT_PREFIX_LENGTHS: [usize; 3] = [5, 7, 10];

/// Something that extends a prefix to a full word. The returned word is
/// the whole generated word, prefix included.
pub trait Completer {
    fn complete(&mut self, prefix: &Word) -> Result<Word>;
}

impl<F: FnMut(&Word) -> Result<Word>> Completer for F {
    fn complete(&mut self, prefix: &Word) -> Result<Word> {
        self(prefix)
    }
}

/// One line of a completions file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub prefix: Word,
    pub completion: Word,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub completion_ratio: f64,
    pub reduction_ratio: f64,
    pub batch_size: usize,
    /// Mean `d(output, R_i)` for `i = 0..=n`.
    pub mean_distances: Vec<f64>,
    /// Items whose generator returned an error.
    pub failures: usize,
}

/// First `k` letters of nonempty words drawn from the training stream.
pub fn make_prefixes(config: &DatasetConfig, k: usize, batch: usize, rng: &mut Rng) -> Result<Vec<Word>> {
    if k == 0 {
        return Err(Error::InvalidArgument("prefix length must be positive".into()));
    }
    let mut out = Vec::with_capacity(batch);
    let mut stream = gen_training_stream(config, rng)?;
    while out.len() < batch {
        let record = stream.next().expect("endless stream")?;
        if record.word.is_empty() {
            continue;
        }
        let take = k.min(record.word.len());
        out.push(Word::from_raw(record.word.letters()[..take].iter().copied()));
    }
    Ok(out)
}

/// Fraction of outputs that are nonempty members of every closure.
pub fn completion_ratio(outputs: &[CompletionRecord], rank: Rank) -> Result<f64> {
    if outputs.is_empty() {
        return Err(Error::Empty);
    }
    let hits = outputs
        .iter()
        .filter(|o| !o.completion.is_empty() && is_in_full_intersection(&o.completion, rank))
        .count();
    Ok(hits as f64 / outputs.len() as f64)
}

/// Mean over closures and batch of `d(output, R_i) / |input|`.
pub fn reduction_ratio(outputs: &[CompletionRecord], rank: Rank) -> Result<f64> {
    Ok(distance_summary(outputs, rank)?.0)
}

fn distance_summary(outputs: &[CompletionRecord], rank: Rank) -> Result<(f64, Vec<f64>)> {
    if outputs.is_empty() {
        return Err(Error::Empty);
    }
    let closures = ClosureSpec::all(rank);
    let mut ratio_sum = 0.0;
    let mut dist_sums = vec![0.0; closures.len()];
    for o in outputs {
        if o.prefix.is_empty() {
            return Err(Error::InvalidArgument(
                "reduction ratio needs nonempty inputs".into(),
            ));
        }
        for (spec, sum) in closures.iter().zip(dist_sums.iter_mut()) {
            let d = distance(&o.completion, spec) as f64;
            *sum += d;
            ratio_sum += d / o.prefix.len() as f64;
        }
    }
    let count = outputs.len() as f64;
    let means = dist_sums.into_iter().map(|s| s / count).collect();
    Ok((ratio_sum / (count * closures.len() as f64), means))
}

/// Scores an already generated batch.
pub fn evaluate_completions(outputs: &[CompletionRecord], rank: Rank) -> Result<EvalReport> {
    for o in outputs {
        o.prefix.check_rank(rank)?;
        o.completion.check_rank(rank)?;
    }
    let (reduction_ratio, mean_distances) = distance_summary(outputs, rank)?;
    Ok(EvalReport {
        completion_ratio: completion_ratio(outputs, rank)?,
        reduction_ratio,
        batch_size: outputs.len(),
        mean_distances,
        failures: 0,
    })
}

/// Draws `batch` prefixes of length `k`, completes each with `generator`
/// and scores the results. A generator error counts as a failed
/// completion; its output for the reduction ratio is the bare prefix.
pub fn evaluate(
    generator: &mut dyn Completer,
    config: &DatasetConfig,
    k: usize,
    batch: usize,
    rng: &mut Rng,
) -> Result<(EvalReport, Vec<CompletionRecord>)> {
    let rank = config.rank();
    let prefixes = make_prefixes(config, k, batch, rng)?;
    let mut failed = Vec::with_capacity(prefixes.len());
    let outputs: Vec<CompletionRecord> = prefixes
        .into_iter()
        .map(|prefix| {
            let completion = match generator.complete(&prefix) {
                Ok(w) if w.check_rank(rank).is_ok() => {
                    failed.push(false);
                    w
                }
                _ => {
                    failed.push(true);
                    prefix.clone()
                }
            };
            CompletionRecord { prefix, completion }
        })
        .collect();
    let (reduction_ratio, mean_distances) = distance_summary(&outputs, rank)?;
    let hits = outputs
        .iter()
        .zip(&failed)
        .filter(|(o, &f)| !f && !o.completion.is_empty() && is_in_full_intersection(&o.completion, rank))
        .count();
    Ok((
        EvalReport {
            completion_ratio: hits as f64 / outputs.len() as f64,
            reduction_ratio,
            batch_size: outputs.len(),
            mean_distances,
            failures: failed.iter().filter(|&&f| f).count(),
        },
        outputs,
    ))
}

/// Reads a completions JSONL file; line numbers in errors are 1-based.
pub fn read_completions<R: BufRead>(input: R, rank: Rank) -> Result<Vec<CompletionRecord>> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Raw {
        prefix: Vec<i32>,
        completion: Vec<i32>,
    }
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let malformed = |msg: String| Error::Malformed { line: i + 1, msg };
        let line = line.map_err(|e| malformed(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: Raw = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        let prefix = crate::words::reduce(&raw.prefix, rank).map_err(|e| malformed(e.to_string()))?;
        let completion = crate::words::reduce(&raw.completion, rank).map_err(|e| malformed(e.to_string()))?;
        out.push(CompletionRecord { prefix, completion });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commexpr::expand_text;
    use crate::seeded_rng;

    fn rank(n: u32) -> Rank {
        Rank::new(n).unwrap()
    }

    fn record(prefix: &[i32], completion: &Word) -> CompletionRecord {
        CompletionRecord {
            prefix: Word::from_raw(prefix.iter().copied()),
            completion: completion.clone(),
        }
    }

    #[test]
    fn completion_ratio_examples() {
        let n = rank(2);
        let comm = expand_text("[x1, x2]", n).unwrap();
        let one = Word::generator(1);
        let good: Vec<_> = (0..4).map(|_| record(&[-1], &comm)).collect();
        let bad: Vec<_> = (0..4).map(|_| record(&[-1], &one)).collect();
        assert_eq!(completion_ratio(&good, n).unwrap(), 1.0);
        assert_eq!(completion_ratio(&bad, n).unwrap(), 0.0);
        let mixed: Vec<_> = good.iter().chain(&bad).cloned().collect();
        assert_eq!(completion_ratio(&mixed, n).unwrap(), 0.5);
        assert_eq!(completion_ratio(&[], n), Err(Error::Empty));
        assert_eq!(
            completion_ratio(&[record(&[1], &Word::identity())], n).unwrap(),
            0.0
        );
    }

    #[test]
    fn reduction_ratio_examples() {
        assert_eq!(
            reduction_ratio(&[record(&[1], &Word::generator(1))], rank(1)).unwrap(),
            0.0
        );
        let n = rank(2);
        let comm = expand_text("[x1, x2]", n).unwrap();
        assert_eq!(reduction_ratio(&[record(&[1, 2], &comm)], n).unwrap(), 0.0);
        // d(x1 x1, R_i) = 2, 0, 2 for i = 0, 1, 2 and d(x2, R_i) = 1, 1, 0
        let batch = [
            record(&[1, 1], &Word::from_raw([1, 1])),
            record(&[2, 2, 2, 2], &Word::generator(2)),
        ];
        let expected = ((2.0 + 0.0 + 2.0) / 2.0 + (1.0 + 1.0 + 0.0) / 4.0) / 6.0;
        assert!((reduction_ratio(&batch, n).unwrap() - expected).abs() < 1e-12);
        assert!(reduction_ratio(&[record(&[], &comm)], n).is_err());
    }

    #[test]
    fn prefixes_are_short_and_reproducible() {
        let config = DatasetConfig::for_rank(rank(3));
        let a = make_prefixes(&config, 5, 50, &mut seeded_rng(4)).unwrap();
        let b = make_prefixes(&config, 5, 50, &mut seeded_rng(4)).unwrap();
        assert_eq!(a, b);
        for p in &a {
            assert!(!p.is_empty() && p.len() <= 5);
            assert!(p.letters().iter().all(|l| l.abs() <= 3));
        }
        assert!(make_prefixes(&config, 0, 1, &mut seeded_rng(4)).is_err());
    }

    #[test]
    fn evaluate_handles_degenerate_generators() {
        let n = rank(3);
        let config = DatasetConfig::for_rank(n);
        let mut empty = |_: &Word| Ok(Word::identity());
        let (report, _) = evaluate(&mut empty, &config, 5, 20, &mut seeded_rng(5)).unwrap();
        assert_eq!(report.completion_ratio, 0.0);

        let known = expand_text("[[x1, x2], [x1, x2 x3]]", n).unwrap();
        let mut echo = |_: &Word| Ok(known.clone());
        let (report, _) = evaluate(&mut echo, &config, 5, 20, &mut seeded_rng(5)).unwrap();
        assert_eq!(report.completion_ratio, 1.0);
        assert_eq!(report.reduction_ratio, 0.0);

        let mut failing = |_: &Word| Err(Error::Empty);
        let (report, records) = evaluate(&mut failing, &config, 5, 20, &mut seeded_rng(5)).unwrap();
        assert_eq!((report.completion_ratio, report.failures), (0.0, 20));
        assert!(records.iter().all(|r| r.completion == r.prefix));

        let mut wrong_rank = |_: &Word| Ok(Word::generator(9));
        let (report, _) = evaluate(&mut wrong_rank, &config, 5, 20, &mut seeded_rng(5)).unwrap();
        assert_eq!(report.failures, 20);
    }

    #[test]
    fn completions_file_round_trip() {
        let n = rank(2);
        let text =
            "{\"prefix\":[1],\"completion\":[1,-1,-1,-2,1,2]}\n\n{\"prefix\":[2],\"completion\":[2]}\n";
        let records = read_completions(text.as_bytes(), n).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].completion, Word::from_raw([-1, -2, 1, 2]));
        let report = evaluate_completions(&records, n).unwrap();
        assert_eq!(report.completion_ratio, 0.5);
        assert_eq!(report.batch_size, 2);

        let bad = "{\"prefix\":[1],\"completion\":[1]}\n{\"prefix\":[1],\"completion\":[7]}\n";
        assert!(matches!(
            read_completions(bad.as_bytes(), n),
            Err(Error::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            read_completions("nope".as_bytes(), n),
            Err(Error::Malformed { line: 1, .. })
        ));
    }
}
