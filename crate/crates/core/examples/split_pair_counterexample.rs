//! Bounded split-pair form over a badly approximable number, audited on a box.

use normform::arith::rational::int;
use normform::counterexamples::{badly_approximable_alpha, cor3_form, nonquasi_witness_check, sqrt2_cf};

fn main() -> normform::Result<()> {
    let alpha = badly_approximable_alpha(32)?;
    println!("alpha = [{}; ...] ~ {:.15}, width {:.2e}", alpha.coefficients[..12].iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","), alpha.approx, alpha.width);
    let audited = cor3_form(&alpha, &int(1), &int(1), 12)?;
    for line in &audited.transcript {
        println!("  {line}");
    }
    println!("passed: {}", audited.passed);
    println!("period scan: {:?}", nonquasi_witness_check(&alpha, 2, 64)?);
    println!("sqrt2 control: {:?}", nonquasi_witness_check(&sqrt2_cf(64)?, 2, 64)?);
    Ok(())
}
