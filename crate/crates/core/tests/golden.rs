//! Frozen reference values, recomputed here by independent routes where one exists.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use normform::arith::rational::int;
use normform::counterexamples::{self, badly_approximable_alpha, Construction};
use normform::numberfield::NumberField;
use normform::pipeline::{run_pipeline, ClassificationEvidence, PipelineConfig, PipelineInput};

/// Thue-Morse partial quotients `1 + popcount(i) mod 2`, and their convergents.
fn tm_convergents(len: usize) -> Vec<(BigInt, BigInt)> {
    let (mut p, mut q) = ((BigInt::zero(), BigInt::from(1)), (BigInt::from(1), BigInt::zero()));
    (0..len)
        .map(|i| {
            let a = BigInt::from(1 + (i.count_ones() % 2));
            let pn = &a * &p.1 + &p.0;
            let qn = &a * &q.1 + &q.0;
            p = (std::mem::take(&mut p.1), pn.clone());
            q = (std::mem::take(&mut q.1), qn.clone());
            (pn, qn)
        })
        .collect()
}

#[test]
fn thue_morse_alpha_at_depth_32() {
    let conv = tm_convergents(33);
    let alpha = badly_approximable_alpha(32).unwrap();
    assert_eq!(alpha.coefficients[..8], [1, 2, 2, 1, 2, 1, 1, 2]);
    let width = 1.0 / (conv[31].1.to_f64().unwrap() * conv[32].1.to_f64().unwrap());
    assert!((alpha.width - width).abs() < 1e-30);
    assert!((alpha.width - 3.22188e-19).abs() < 1e-23, "{}", alpha.width);
}

#[test]
fn approximation_constant_and_floor() {
    // alpha to ~1e-70 from a deep convergent
    let deep = tm_convergents(120);
    let (pa, qa) = deep.last().unwrap();
    let a = BigRational::new(pa.clone(), qa.clone());
    let conv = tm_convergents(32);
    let kappa = conv
        .iter()
        .map(|(p, q)| {
            let qq = BigRational::from_integer(q.clone());
            (&qq * (&qq * &a - BigRational::from_integer(p.clone())).abs()).to_f64().unwrap()
        })
        .fold(f64::INFINITY, f64::min);
    assert!((kappa - 0.302951).abs() < 1e-6, "{kappa}");
    let c = (a.to_f64().unwrap() * kappa).min(1.0);

    let alpha = badly_approximable_alpha(32).unwrap();
    let audited = counterexamples::cor3_form(&alpha, &int(1), &int(1), 20).unwrap();
    let Construction::SplitPairs { c_alpha, approximation_constant, .. } = &audited.construction else { panic!() };
    assert!((normform::arith::rational::to_f64(approximation_constant) - kappa).abs() < 1e-12);
    assert!((c_alpha - c).abs() < 1e-12);
    assert!((audited.claimed_floor.1 - c * c).abs() < 1e-9);
    assert!((audited.claimed_floor.1 - 0.185688047531).abs() < 1e-11);
    assert!((audited.observed_min - 0.745984216582).abs() < 1e-11);
    assert_eq!(audited.argmin, vec![10, -7, 0, 0]);
}

#[test]
fn cube_root_pipeline() {
    let k = NumberField::parse("x^3-2").unwrap();
    let r = run_pipeline(PipelineInput::Field(&k), &PipelineConfig::default()).unwrap();
    let orbit = r.orbit.as_ref().unwrap();
    assert!((orbit.min_systole - 0.6306371385257531).abs() < 1e-12, "{}", orbit.min_systole);
    assert_eq!(orbit.samples, 64);
    let period = orbit.period.as_ref().unwrap();
    assert_eq!(period.unit, ["1", "1", "1"]);
    assert!(period.residual < 1e-12);
    assert_eq!(r.values.distinct_in_window, 18);
    let ClassificationEvidence::Done { units, verdict, .. } = &r.classification else { panic!() };
    assert_eq!(*units, 1);
    assert_eq!(verdict.rank_check, (1, 1));
    assert_eq!(r.verdict, "norm-like: algebraic");
    assert!(r.coherent);
}
