//! Forms in more variables than factors: rational and irrational kernels.

use normform::arith::rational::int;
use normform::arith::{AlgebraicReal, RatPoly};
use normform::forms::{reduce_variables, CoeffField, DecomposableForm, FieldFactor, Reduction};

fn main() -> normform::Result<()> {
    // x1 (x1 + 2 x2 + 4 x3)
    let f = DecomposableForm::from_int_linear(&[&[1, 0, 0], &[1, 2, 4]])?;
    if let Reduction::Reduced { tau, g, kernel, .. } = reduce_variables(&f)? {
        println!("{f} reduces to {g}");
        println!("kernel {:?}", kernel.iter().map(|r| r.iter().map(|q| q.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>());
        println!("tau {:?}", tau.iter().map(|r| r.iter().map(|q| q.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>());
    }

    // x2 (x1 - sqrt2 x3)
    let field = CoeffField::real(&RatPoly::parse("x^2-2")?, AlgebraicReal::sqrt_rational(&int(2))?)?;
    let z = || vec![int(0), int(0)];
    let f = DecomposableForm::from_field_factors(
        field,
        3,
        &[
            FieldFactor::Linear(vec![z(), vec![int(1), int(0)], z()]),
            FieldFactor::Linear(vec![vec![int(1), int(0)], z(), vec![int(0), int(-1)]]),
        ],
        &int(1),
    )?;
    if let Reduction::NotRationallyReducible { kernel } = reduce_variables(&f)? {
        let v: Vec<String> = kernel[0].iter().map(|x| format!("{:.6}", x.to_f64())).collect();
        println!("x2 (x1 - sqrt2 x3): kernel ({}) is not rational", v.join(", "));
    }
    Ok(())
}
