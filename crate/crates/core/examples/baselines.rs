//! The three search baselines at rank 3.
use freegroup::baselines::{evolve_traced, greedy_complete, random_search, EvoConfig, DEFAULT_MAX_STEPS};
use freegroup::sampling::SamplerConfig;
use freegroup::{seeded_rng, Rank, Word};

fn main() -> freegroup::Result<()> {
    let rank = Rank::new(3)?;
    let mut rng = seeded_rng(7);

    let report = random_search(2000, &SamplerConfig::for_rank(rank), &mut rng)?;
    println!(
        "random search: {} hits, ratio {}",
        report.hits.len(),
        report.completion_ratio
    );
    if let Some(w) = report.hits.iter().min_by_key(|w| w.len()) {
        println!("  shortest hit: {w}");
    }

    let run = evolve_traced(
        &EvoConfig {
            max_iterations: 20_000,
            ..EvoConfig::new(rank)
        },
        &mut rng,
    )?;
    match run.hit {
        Some(w) => println!("evolution: hit after {} iterations: {w}", run.iterations),
        None => println!("evolution: no hit, final objective {:?}", run.trace.last()),
    }

    let prefix = Word::from_raw([1, 2, 3]);
    match greedy_complete(&prefix, rank, DEFAULT_MAX_STEPS) {
        Some(w) => println!("greedy from {prefix}: {w}"),
        None => println!("greedy from {prefix}: gave up"),
    }
    Ok(())
}
