//! A CM field rewritten as a quasi norm form over its real subfield.

use normform::forms::{cm_to_quasi, is_cm, quasi_norm_form, CmVerdict};
use normform::numberfield::NumberField;
use normform::spectrum::rational_zero_search;

fn main() -> normform::Result<()> {
    let k = NumberField::parse("x^4+1")?;
    let CmVerdict::Cm { subfield, a, .. } = is_cm(&k)? else {
        println!("not a CM field");
        return Ok(());
    };
    println!("Q[x]/(x^4+1) = F(sqrt(-a)) with F = Q[x]/({}), a = {:?}", subfield.minpoly(), a.coords.iter().map(|q| q.to_string()).collect::<Vec<_>>());
    let data = cm_to_quasi(&subfield, &a)?;
    let f = quasi_norm_form(&data)?;
    println!("quasi form: {} factors in {} variables, signature {:?}", f.n(), f.m(), f.signature());
    for z in [[1, 0, 0, 0], [1, 1, 0, 0], [2, -1, 1, 3]] {
        let v = k.norm(&normform::numberfield::FieldElement::from_ints(&z));
        println!("N_K{z:?} = {v}");
    }
    let zeros = rational_zero_search(&f, 6)?;
    println!("rational zero up to height 6: {:?}", zeros.witness);
    Ok(())
}
