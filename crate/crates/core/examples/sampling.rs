//! Naive against bracket-style sampling from R_1 at rank 3.
use std::collections::BTreeMap;

use freegroup::closures::ClosureSpec;
use freegroup::sampling::{naive_length_matched, sample_closure_bracket, sample_symmetric, SamplerConfig};
use freegroup::stats::{count_valleys, ks_two_sample, word_dyck_path};
use freegroup::{seeded_rng, Rank, Word};

fn histogram(words: &[Word], spec: &ClosureSpec) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for w in words {
        *h.entry(count_valleys(&word_dyck_path(w, spec))).or_insert(0) += 1;
    }
    h
}

fn main() -> freegroup::Result<()> {
    let rank = Rank::new(3)?;
    let spec = ClosureSpec::new(1, rank)?;
    let config = SamplerConfig {
        max_ri_length: 100,
        ..SamplerConfig::for_rank(rank)
    };
    let mut rng = seeded_rng(1);

    let bracket = (0..2000)
        .map(|_| sample_closure_bracket(&spec, &config, &mut rng).map(|s| s.word))
        .collect::<freegroup::Result<Vec<_>>>()?;
    let targets: Vec<usize> = bracket.iter().map(Word::len).collect();
    let naive = naive_length_matched(&spec, &targets, 8, 50, &mut rng)?;

    let lengths = |ws: &[Word]| ws.iter().map(|w| w.len() as f64).collect::<Vec<_>>();
    let ks = ks_two_sample(&lengths(&naive), &lengths(&bracket))?;
    println!("length KS statistic {:.3}, p = {:.3}", ks.statistic, ks.p_value);
    println!("valleys, naive:   {:?}", histogram(&naive, &spec));
    println!("valleys, bracket: {:?}", histogram(&bracket, &spec));

    let sample = sample_symmetric(&[0, 2, 3], &SamplerConfig::for_rank(rank), &mut rng)?;
    println!("from [R0, R2, R3]_S: {}\n  = {}", sample.expr, sample.word);
    Ok(())
}
