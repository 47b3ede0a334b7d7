//! Scoring a generator, and scoring a completions file written by one.
use freegroup::baselines::{greedy_complete, DEFAULT_MAX_STEPS};
use freegroup::datasets::DatasetConfig;
use freegroup::metrics::{evaluate, evaluate_completions, read_completions, DEFAULT_PREFIX_LENGTHS};
use freegroup::{seeded_rng, Error, Rank, Word};

fn main() -> freegroup::Result<()> {
    let rank = Rank::new(3)?;
    let config = DatasetConfig::for_rank(rank);
    let mut greedy = |p: &Word| greedy_complete(p, rank, DEFAULT_MAX_STEPS).ok_or(Error::Empty);

    for k in DEFAULT_PREFIX_LENGTHS {
        let (report, _) = evaluate(&mut greedy, &config, k, 500, &mut seeded_rng(k as u64))?;
        println!(
            "k={k}: completion {:.3}, reduction {:.3}, failures {}",
            report.completion_ratio, report.reduction_ratio, report.failures
        );
    }

    let file =
        "{\"prefix\":[1,2],\"completion\":[1,2,-1,-2]}\n{\"prefix\":[-1],\"completion\":[-1,-2,1,2]}\n";
    let report = evaluate_completions(&read_completions(file.as_bytes(), Rank::new(2)?)?, Rank::new(2)?)?;
    println!("{}", serde_json::to_string(&report).expect("serializable"));
    Ok(())
}
