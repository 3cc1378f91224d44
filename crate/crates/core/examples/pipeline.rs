//! Full evidence report for a field norm form and for a split form.

use normform::forms::DecomposableForm;
use normform::numberfield::NumberField;
use normform::pipeline::{run_pipeline, PipelineConfig, PipelineInput};

fn main() -> normform::Result<()> {
    let config = PipelineConfig::default();
    let k = NumberField::parse("x^3-2")?;
    let split = DecomposableForm::from_int_linear(&[&[1, 0], &[0, 1]])?;
    for r in [run_pipeline(PipelineInput::Field(&k), &config)?, run_pipeline(PipelineInput::Form(&split), &config)?] {
        let orbit = r.orbit.as_ref().map(|o| o.min_systole);
        println!("{}: {} (coherent: {}), zero {:?}, min systole {:?}", r.input, r.verdict, r.coherent, r.zeros.witness, orbit);
    }
    Ok(())
}
