//! Unit families and the algebraic / quasi-algebraic dichotomy.

use normform::classify::{block_diagonal, classify, unit_matrices};
use normform::numberfield::{norm_one_units, NumberField};

fn main() -> normform::Result<()> {
    let k = NumberField::parse("x^2-2")?;
    let gens = unit_matrices(&k, &norm_one_units(&k, 4)?.units);
    let cases = [
        ("units of Q(sqrt2)", 2, gens.clone(), (2, 0)),
        ("two blocks of them", 4, gens.iter().map(|g| block_diagonal(g, 2)).collect(), (0, 2)),
        ("no units", 4, Vec::new(), (0, 2)),
    ];
    for (name, n, gens, sig) in cases {
        let v = classify(n, &gens, sig)?;
        println!("{name}: branch {:?}, l = {:?}, [A:Q] = {}, rank {:?}, {:?}", v.branch, v.l, v.field_degree, v.rank_check, v.confidence);
    }
    Ok(())
}
