//! End-to-end evidence for a form: values on a box, rational zeros, the
//! torus orbit of the standard lattice and the classification of the unit
//! family, cross-checked into one verdict.

use serde::{Deserialize, Serialize};

use crate::arith::rational::{self, Rational};
use crate::classify::{self, Branch, DichotomyVerdict};
use crate::error::Result;
use crate::forms::DecomposableForm;
use crate::numberfield::{norm_one_units, NumberField};
use crate::orbits::{orbit_probe, unit_period_check, OrbitPlan, TorusChart};
use crate::spectrum::{
    default_zero_search_height, enumerate_values, rational_zero_search, BoxSpec, MinNonzero, ZeroSearch,
};

/// Systoles below this count as an observed escape.
pub const ESCAPE_THRESHOLD: f64 = 1e-3;
/// Residual below which a unit is accepted as a period.
pub const PERIOD_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Box radius for the value scan; chosen from the dimension when absent.
    pub spectrum_radius: Option<u32>,
    #[serde(with = "rational::serde_rational")]
    pub window: Rational,
    pub zero_height: Option<u32>,
    /// Upper end of every logarithmic range `[0, U]`.
    pub log_range: f64,
    pub orbit_points: usize,
    pub period_grid: usize,
    pub unit_height: u32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 7,
            spectrum_radius: None,
            window: rational::int(10),
            zero_height: None,
            log_range: 10.0,
            orbit_points: 64,
            period_grid: 32,
            unit_height: 4,
        }
    }
}

/// Largest radius `r <= 20` with `(2r + 1)^m <= 10^5`.
pub fn default_spectrum_radius(m: usize) -> u32 {
    (1..=20u32).rev().find(|&r| (2 * r as u128 + 1).saturating_pow(m as u32) <= 100_000).unwrap_or(1)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValueEvidence {
    pub radius: u32,
    #[serde(with = "rational::serde_rational")]
    pub window: Rational,
    pub mode: String,
    pub distinct_in_window: usize,
    pub min_nonzero: MinNonzero,
    pub all_values_integral: Option<bool>,
    pub zero_in_box: Option<Vec<i64>>,
    pub stabilized: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodEvidence {
    pub unit: Vec<String>,
    pub residual: f64,
    pub lattice_residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitEvidence {
    pub log_range: f64,
    pub samples: usize,
    pub min_systole: f64,
    pub argmin: Vec<f64>,
    pub escape_observed: bool,
    pub period: Option<PeriodEvidence>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum ClassificationEvidence {
    Done { units: usize, verdict: DichotomyVerdict, assumption: String },
    Skipped { reason: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub version: String,
    pub config: PipelineConfig,
    pub input: String,
    pub m: usize,
    pub n: usize,
    pub signature: (usize, usize),
    pub values: ValueEvidence,
    pub zeros: ZeroSearch,
    pub orbit: Option<OrbitEvidence>,
    pub classification: ClassificationEvidence,
    pub verdict: String,
    pub coherent: bool,
    pub notes: Vec<String>,
}

/// What the pipeline is run on.
pub enum PipelineInput<'a> {
    Field(&'a NumberField),
    Form(&'a DecomposableForm),
}

pub fn run_pipeline(input: PipelineInput<'_>, config: &PipelineConfig) -> Result<PipelineReport> {
    let owned;
    let (f, field) = match input {
        PipelineInput::Field(k) => {
            owned = k.norm_form();
            (&owned, Some(k))
        }
        PipelineInput::Form(f) => (f, None),
    };
    let (m, n) = (f.m(), f.n());
    let signature = f.signature();
    let mut notes = Vec::new();

    let radius = config.spectrum_radius.unwrap_or_else(|| default_spectrum_radius(m));
    let scan = enumerate_values(f, BoxSpec::new(radius), &config.window)?;
    let values = ValueEvidence {
        radius,
        window: config.window.clone(),
        mode: scan.mode.clone(),
        distinct_in_window: scan.distinct_values.len(),
        min_nonzero: scan.min_nonzero_abs.clone(),
        all_values_integral: scan.all_values_integral,
        zero_in_box: scan.zero_witness.clone(),
        stabilized: scan.stabilized,
    };
    let zeros = rational_zero_search(f, config.zero_height.unwrap_or_else(|| default_zero_search_height(m)))?;
    let represents_zero = zeros.witness.is_some() || scan.zero_witness.is_some();

    let orbit = if m == n {
        let chart = TorusChart::new(f)?;
        let k = chart.parameter_count();
        let plan = OrbitPlan::Grid { log_box: vec![(0.0, config.log_range); k], points: config.orbit_points };
        let probe = orbit_probe(&chart, &plan, config.seed)?;
        let period = match field {
            Some(k) if !represents_zero => {
                let units = norm_one_units(k, config.unit_height)?;
                match units.units.first() {
                    Some(u) => {
                        let r = unit_period_check(k, u, config.period_grid)?;
                        Some(PeriodEvidence {
                            unit: u.coords.iter().map(|q| q.to_string()).collect(),
                            residual: r.residual,
                            lattice_residual: r.lattice_residual,
                        })
                    }
                    None => None,
                }
            }
            _ => None,
        };
        let argmin = &probe.samples[probe.argmin];
        Some(OrbitEvidence {
            log_range: config.log_range,
            samples: probe.samples.len(),
            min_systole: probe.min_systole,
            argmin: argmin.u.iter().chain(&argmin.theta).copied().collect(),
            escape_observed: probe.min_systole < ESCAPE_THRESHOLD,
            period,
        })
    } else {
        notes.push(format!("m = {m} > n = {n}: the torus chart needs m = n; reduce the form first"));
        None
    };

    let classification = if represents_zero {
        ClassificationEvidence::Skipped { reason: "the form represents zero over Q".into() }
    } else if m != n {
        ClassificationEvidence::Skipped { reason: "the form has more variables than factors".into() }
    } else {
        let (gens, assumption) = match field {
            Some(k) => {
                let units = norm_one_units(k, config.unit_height)?;
                (
                    classify::unit_matrices(k, &units.units),
                    format!("units of height <= {} generate a finite-index subgroup", config.unit_height),
                )
            }
            None => (Vec::new(), "no integer points of the torus beyond the identity are known".into()),
        };
        let algebra = classify::span_algebra(n, &gens)?;
        let split = classify::wedderburn_split_seeded(&algebra, config.seed)?;
        let verdict = classify::dichotomy(&algebra, &split, signature)?;
        ClassificationEvidence::Done { units: gens.len(), verdict, assumption }
    };

    let discrete = !represents_zero && values.min_nonzero.lower().is_some_and(|q| q > &Rational::from_integer(0.into()));
    let escape = orbit.as_ref().is_some_and(|o| o.escape_observed);
    let periodic = orbit.as_ref().and_then(|o| o.period.as_ref()).map(|p| p.residual < PERIOD_TOLERANCE);
    let branch = match &classification {
        ClassificationEvidence::Done { verdict, .. } => Some(verdict.branch),
        ClassificationEvidence::Skipped { .. } => None,
    };
    let (verdict, coherent) = if represents_zero {
        ("not norm-like: represents zero".to_string(), escape || orbit.is_none())
    } else {
        match branch {
            Some(Branch::Algebraic) | Some(Branch::QuasiAlgebraic) => {
                let name = if branch == Some(Branch::Algebraic) { "algebraic" } else { "quasi-algebraic" };
                (format!("norm-like: {name}"), discrete && !escape && periodic != Some(false))
            }
            Some(Branch::Inconsistent) => ("bounded, non-compact evidence".to_string(), discrete && !escape),
            None => ("undetermined".to_string(), false),
        }
    };
    if let Some(o) = &orbit {
        if !o.escape_observed {
            notes.push(format!("no escape observed for log parameters up to {}", o.log_range));
        }
    }
    Ok(PipelineReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        input: f.to_string(),
        m,
        n,
        signature,
        values,
        zeros,
        orbit,
        classification,
        verdict,
        coherent,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_form_is_not_norm_like() {
        let f = DecomposableForm::from_int_linear(&[&[1, 0], &[0, 1]]).unwrap();
        let r = run_pipeline(PipelineInput::Form(&f), &PipelineConfig::default()).unwrap();
        assert_eq!(r.zeros.witness, Some(vec![1, 0]));
        assert!(r.orbit.as_ref().unwrap().escape_observed);
        assert!(matches!(r.classification, ClassificationEvidence::Skipped { .. }));
        assert!(r.coherent);
    }

    #[test]
    fn real_quadratic_field() {
        let k = NumberField::parse("x^2-2").unwrap();
        let r = run_pipeline(PipelineInput::Field(&k), &PipelineConfig::default()).unwrap();
        assert_eq!(r.verdict, "norm-like: algebraic");
        assert!(r.coherent, "{r:?}");
    }

    #[test]
    fn cube_root_field_is_algebraic() {
        let k = NumberField::parse("x^3-2").unwrap();
        let r = run_pipeline(PipelineInput::Field(&k), &PipelineConfig::default()).unwrap();
        assert_eq!(r.values.all_values_integral, Some(true));
        assert!(r.zeros.witness.is_none());
        assert!(r.orbit.as_ref().unwrap().min_systole > ESCAPE_THRESHOLD);
        assert_eq!(r.verdict, "norm-like: algebraic");
        assert!(r.coherent, "{r:?}");
    }

    #[test]
    fn cor3_form_is_bounded_but_inconsistent() {
        use crate::counterexamples::{badly_approximable_alpha, split_pair_form};
        let alpha = badly_approximable_alpha(32).unwrap();
        let f = split_pair_form(&alpha, &rational::int(1), &rational::int(1)).unwrap();
        let r = run_pipeline(PipelineInput::Form(&f), &PipelineConfig::default()).unwrap();
        assert_eq!(r.verdict, "bounded, non-compact evidence", "{r:?}");
        assert!(r.coherent, "{r:?}");
    }
}
