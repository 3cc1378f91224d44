//! Arithmetic in Q(2^(1/3)), its norm form and a family of norm-one units.

use normform::numberfield::{norm_one_units, FieldElement, NumberField};

fn main() -> normform::Result<()> {
    let k = NumberField::parse("x^3-2")?;
    println!("signature {:?}, degree {}", k.signature(), k.degree());
    println!("norm form: {}", k.norm_form());

    let x = FieldElement::from_ints(&[1, 1, 0]);
    let y = FieldElement::from_ints(&[0, 2, -1]);
    let xy = k.mul(&x, &y);
    println!("N(x) N(y) = {} * {} = {} = N(xy)", k.norm(&x), k.norm(&y), k.norm(&xy));

    let units = norm_one_units(&k, 2)?;
    println!("rank {} of expected {}", units.rank_found, units.expected_rank);
    for u in &units.units {
        let c: Vec<String> = u.coords.iter().map(|q| q.to_string()).collect();
        println!("unit ({}) has norm {}", c.join(", "), k.norm(u));
    }
    Ok(())
}
