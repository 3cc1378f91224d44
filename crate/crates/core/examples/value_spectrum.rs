//! Values of norm forms at integer points, and when a window stops growing.

use normform::arith::rational::int;
use normform::numberfield::NumberField;
use normform::spectrum::{enumerate_values, rational_zero_search, BoxSpec};

fn main() -> normform::Result<()> {
    let f = NumberField::parse("x^2-2")?.norm_form();
    let r = enumerate_values(&f, BoxSpec::new(20), &int(10))?;
    let values: Vec<String> = r.distinct_values.iter().map(|v| format!("{}x{}", v.approx, v.multiplicity)).collect();
    println!("x1^2 - 2 x2^2 on [-20, 20]^2, |f| <= 10: {}", values.join(" "));
    println!("min nonzero |f|: {:?}", r.min_nonzero_abs.lower().map(|q| q.to_string()));
    println!("stabilization: {:?}", r.stabilization);

    let split = normform::forms::DecomposableForm::from_int_linear(&[&[1, 0], &[1, 1]])?;
    println!("x1 (x1 + x2): {:?}", rational_zero_search(&split, 5)?.witness);
    Ok(())
}
