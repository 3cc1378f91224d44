//! Bring a norm form to the shape `a * f0(sigma x)` and check the round trip.

use normform::forms::{round_trip_residual, to_normal_form};
use normform::numberfield::NumberField;

fn main() -> normform::Result<()> {
    for mp in ["x^2-2", "x^2+1", "x^3-2"] {
        let f = NumberField::parse(mp)?.norm_form();
        let nf = to_normal_form(&f)?;
        let residual = round_trip_residual(&f, &nf, 7)?;
        println!("{mp}: signature {:?}, a = {:.6}, det sigma = {:.6}, residual {residual:.1e}", nf.signature, nf.a_f64(), nf.det_f64());
        for row in &nf.sigma_f64 {
            let r: Vec<String> = row.iter().map(|v| format!("{v:>10.6}")).collect();
            println!("    [{}]", r.join(" "));
        }
    }
    Ok(())
}
