//! Reduction, commutators and the expression syntax.
use freegroup::commexpr::{parse, print};
use freegroup::{Rank, Word};

fn main() -> freegroup::Result<()> {
    let rank = Rank::new(3)?;
    let w = Word::parse_text("1 2 -2 3 -3 -1 2", rank)?;
    println!("reduced: {w}");

    let (x, y) = (Word::generator(1), Word::generator(2));
    println!("[x1, x2] = {}", x.commutator(&y));
    println!("x1^(x2) = {}", x.conjugate(&y));

    let expr = parse("[[x, y], [x, y z]]")?;
    println!("{} expands to {}", print(&expr), expr.expand(rank)?);
    Ok(())
}
