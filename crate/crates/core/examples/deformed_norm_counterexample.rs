//! Norm form of Q(2^(1/3)) with one conjugate pair scaled by a transcendental.

use normform::counterexamples::{cor2_form, Parameter};
use normform::numberfield::NumberField;

fn main() -> normform::Result<()> {
    let k = NumberField::parse("x^3-2")?;
    for p in ["pi", "3/2"] {
        let audited = cor2_form(&k, &Parameter::parse(p)?, 8)?;
        println!("parameter {p}: {}", audited.floor_expression);
        for line in &audited.transcript {
            println!("  {line}");
        }
    }
    Ok(())
}
