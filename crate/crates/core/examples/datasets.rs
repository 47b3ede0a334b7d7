//! Training, negative and evaluation records in both file formats.
use freegroup::datasets::{
    gen_negative_stream, gen_nontrivial_eval, gen_training_stream, to_jsonl, to_tokens, DatasetConfig,
};
use freegroup::{seeded_rng, Rank};

fn main() -> freegroup::Result<()> {
    let rank = Rank::new(3)?;
    let config = DatasetConfig::for_rank(rank);
    let mut rng = seeded_rng(3);

    for record in gen_training_stream(&config, &mut rng)?.take(4) {
        let record = record?;
        println!("{}", to_tokens(&record, true));
    }
    for record in gen_negative_stream(&config, &mut rng)?.take(2) {
        println!("{}", to_jsonl(&record?));
    }
    let eval = gen_nontrivial_eval(rank)?;
    println!("{} evaluation words, first: {}", eval.len(), to_jsonl(&eval[0]));
    Ok(())
}
