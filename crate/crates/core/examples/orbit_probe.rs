//! Systoles along the torus orbit: bounded for a field, escaping for a split form.

use normform::forms::DecomposableForm;
use normform::numberfield::{FieldElement, NumberField};
use normform::orbits::{orbit_probe, unit_period_check, OrbitPlan, TorusChart};

fn main() -> normform::Result<()> {
    let plan = OrbitPlan::Grid { log_box: vec![(0.0, 6.0)], points: 7 };
    let k = NumberField::parse("x^2-2")?;
    let split = DecomposableForm::from_int_linear(&[&[1, 0], &[0, 1]])?;
    for (name, f) in [("x1^2 - 2 x2^2", k.norm_form()), ("x1 x2", split)] {
        let probe = orbit_probe(&TorusChart::new(&f)?, &plan, 7)?;
        let s: Vec<String> = probe.samples.iter().map(|s| format!("{:.4}", s.systole)).collect();
        println!("{name:>14}: {}", s.join(" "));
    }
    let r = unit_period_check(&k, &FieldElement::from_ints(&[3, 2]), 32)?;
    println!("3 + 2 sqrt2 is a period: log shift {:.6}, residual {:.1e}", r.element.u_f64()[0], r.residual);
    Ok(())
}
