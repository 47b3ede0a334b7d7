//! Membership in the normal closures, checked two ways.
use freegroup::closures::{distance, is_member, multilabel, sanov_is_member, ClosureSpec};
use freegroup::commexpr::expand_text;
use freegroup::Rank;

fn main() -> freegroup::Result<()> {
    let rank = Rank::new(3)?;
    let w = expand_text("[[x1, x2], [x1, x2 x3]]", rank)?;
    let probe = expand_text("[x1, x2]", rank)?;
    println!("w = {w}");
    println!(
        "label of w: {}, label of {probe}: {}",
        multilabel(&w, rank),
        multilabel(&probe, rank)
    );

    for spec in ClosureSpec::all(rank) {
        println!(
            "{spec}: substitution {} / matrices {} / distance of probe {}",
            is_member(&probe, &spec),
            sanov_is_member(&probe, &spec)?,
            distance(&probe, &spec),
        );
    }
    Ok(())
}
