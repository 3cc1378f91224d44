//! Command-line front end.
//!
//! Every JSON artifact carries the tool version and the full parsed command
//! line, seed included. `NORMFORM_THREADS` caps the worker pool.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::arith::rational::{self, parse_rational, Rational};
use crate::arith::linalg::QMatrix;
use crate::classify;
use crate::counterexamples::{
    self, badly_approximable_alpha, nonquasi_witness_check, sqrt2_cf, Parameter,
};
use crate::error::{Error, Result};
use crate::forms::{self, DecomposableForm, QuadSpec, QuasiFormData};
use crate::numberfield::{norm_one_units, FieldElement, NumberField};
use crate::orbits::{self, OrbitPlan, TorusChart};
use crate::pipeline::{self, PipelineConfig, PipelineInput};
use crate::spectrum::{self, BoxSpec};

#[derive(Parser, Debug, Serialize)]
#[command(name = "normform", version, about = "Algebraic and quasi-algebraic norm forms")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Number field data, its norm form and a family of norm-one units.
    Field(FieldArgs),
    /// Normal form, variable reduction and quasi norm forms.
    #[command(subcommand)]
    Form(FormCommand),
    /// Values at integer points of a box.
    Spectrum(SpectrumArgs),
    /// Systoles along the torus orbit of the standard lattice.
    #[command(subcommand)]
    Orbit(OrbitCommand),
    /// Unit-span algebra, Wedderburn split and dichotomy.
    Classify(ClassifyArgs),
    /// Bounded forms with non-compact orbits.
    #[command(subcommand)]
    Counterexample(CounterexampleCommand),
    /// All evidence for one form, cross-checked.
    Pipeline(PipelineArgs),
}

/// Where a form comes from; exactly one option is required.
#[derive(Args, Debug, Clone, Serialize)]
#[group(required = true, multiple = false)]
pub struct FormSource {
    /// Form JSON file.
    #[arg(long)]
    pub form: Option<PathBuf>,
    /// Norm form of the field with this minimal polynomial.
    #[arg(long)]
    pub minpoly: Option<String>,
    /// Rational linear forms: rows separated by ';', entries by ','.
    #[arg(long)]
    pub linear: Option<String>,
    /// Split-pair form with the Thue-Morse continued fraction at this depth.
    #[arg(long)]
    pub cor3: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct OutArg {
    /// Output path; `.csv` selects CSV where supported, stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct FieldArgs {
    #[arg(long)]
    pub minpoly: String,
    #[arg(long, default_value_t = 4)]
    pub units_height: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArg,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormCommand {
    Normalize {
        #[command(flatten)]
        #[serde(flatten)]
        source: FormSource,
        #[command(flatten)]
        #[serde(flatten)]
        out: OutArg,
    },
    Reduce {
        #[command(flatten)]
        #[serde(flatten)]
        source: FormSource,
        #[command(flatten)]
        #[serde(flatten)]
        out: OutArg,
    },
    Quasi(QuasiArgs),
}

#[derive(Args, Debug, Serialize)]
#[group(id = "quasi_source", required = true, multiple = false, args = ["data", "cm_minpoly", "field"])]
pub struct QuasiArgs {
    /// QuasiFormData JSON file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// CM field whose norm form is rewritten as a quasi norm form.
    #[arg(long)]
    pub cm_minpoly: Option<String>,
    /// Totally real field; requires --q.
    #[arg(long, requires = "q")]
    pub field: Option<String>,
    /// Field elements A;B;C over the power basis, entries separated by ','.
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long, default_value = "1")]
    pub scale: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArg,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: FormSource,
    #[arg(long = "box", default_value_t = 20)]
    pub radius: u32,
    #[arg(long, default_value = "10")]
    pub window: String,
    /// Keep only points whose coordinate gcd equals this value.
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long, default_value_t = spectrum::DEFAULT_BUDGET)]
    pub budget: u128,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArg,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitCommand {
    Probe(ProbeArgs),
    Period(PeriodArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ProbeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: FormSource,
    /// Logarithmic ranges `lo:hi`, comma separated; one range applies to all directions.
    #[arg(long, default_value = "0:2.0")]
    pub log_box: String,
    /// Grid samples in total.
    #[arg(long, default_value_t = 64, conflicts_with = "random")]
    pub grid: usize,
    /// Random samples instead of a grid.
    #[arg(long)]
    pub random: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArg,
}

#[derive(Args, Debug, Serialize)]
pub struct PeriodArgs {
    #[arg(long)]
    pub minpoly: String,
    /// Unit over the power basis, entries separated by ','.
    #[arg(long)]
    pub unit: String,
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArg,
}

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    /// Units JSON: `{"matrices": [...]}` or `{"minpoly", "units", "copies"}`.
    #[arg(long)]
    pub units: PathBuf,
    /// Signature `s,t`.
    #[arg(long)]
    pub signature: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArg,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleCommand {
    Cor3 {
        #[arg(long, default_value_t = 32)]
        depth: usize,
        #[arg(long, default_value = "1")]
        a: String,
        #[arg(long, default_value = "1")]
        b: String,
        #[arg(long = "box", default_value_t = 20)]
        radius: u32,
        #[command(flatten)]
        #[serde(flatten)]
        out: OutArg,
    },
    Cor2 {
        #[arg(long)]
        minpoly: String,
        /// `pi` or a positive rational.
        #[arg(long, default_value = "pi")]
        param: String,
        #[arg(long = "box", default_value_t = 15)]
        radius: u32,
        #[command(flatten)]
        #[serde(flatten)]
        out: OutArg,
    },
    /// Period scan of the continued fraction against `Q(sqrt d)`.
    Witness {
        #[arg(long, default_value_t = 64)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        d: i64,
        /// Scan the expansion of sqrt 2 instead.
        #[arg(long)]
        control: bool,
        #[command(flatten)]
        #[serde(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct PipelineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: FormSource,
    #[arg(long = "box")]
    pub radius: Option<u32>,
    #[arg(long, default_value = "10")]
    pub window: String,
    #[arg(long)]
    pub zero_height: Option<u32>,
    #[arg(long, default_value_t = 10.0)]
    pub log_range: f64,
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    #[arg(long, default_value_t = 32)]
    pub period_grid: usize,
    #[arg(long, default_value_t = 4)]
    pub units_height: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArg,
}

#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a Cli,
    result: &'a T,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("NORMFORM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let seed = cli.seed;
    match &cli.command {
        Command::Field(a) => {
            let k = NumberField::parse(&a.minpoly)?;
            let report = FieldReport {
                degree: k.degree(),
                signature: k.signature(),
                norm_form: k.norm_form().to_string(),
                units: norm_one_units(&k, a.units_height)?,
                cm: forms::is_cm(&k)?,
                field: k,
            };
            emit_json(cli, &a.out, &report)
        }
        Command::Form(FormCommand::Normalize { source, out }) => {
            let (f, _) = load_form(source)?;
            let nf = forms::to_normal_form(&f)?;
            let residual = forms::round_trip_residual(&f, &nf, seed)?;
            emit_json(cli, out, &NormalizeReport { form: f.to_string(), normal_form: nf, round_trip_residual: residual })
        }
        Command::Form(FormCommand::Reduce { source, out }) => {
            let (f, _) = load_form(source)?;
            emit_json(cli, out, &forms::reduce_variables(&f)?)
        }
        Command::Form(FormCommand::Quasi(a)) => {
            let data = quasi_data(a)?;
            let form = forms::quasi_norm_form(&data)?;
            emit_json(cli, &a.out, &QuasiReport { data, form })
        }
        Command::Spectrum(a) => {
            let (f, _) = load_form(&a.source)?;
            let box_spec = match a.d {
                Some(d) => BoxSpec::with_gcd(a.radius, d),
                None => BoxSpec::new(a.radius),
            };
            let report = spectrum::enumerate_values_with_budget(&f, box_spec, &parse_rational(&a.window)?, a.budget)?;
            match csv_target(&a.out) {
                Some(p) => spectrum::write_csv(&report, create(p)?),
                None => emit_json(cli, &a.out, &report),
            }
        }
        Command::Orbit(OrbitCommand::Probe(a)) => {
            let (f, _) = load_form(&a.source)?;
            let chart = TorusChart::new(&f)?;
            let log_box = parse_log_box(&a.log_box)?;
            let plan = match a.random {
                Some(samples) => OrbitPlan::Random { log_box, samples },
                None => OrbitPlan::Grid { log_box, points: a.grid },
            };
            let probe = orbits::orbit_probe(&chart, &plan, seed)?;
            match csv_target(&a.out) {
                Some(p) => orbits::write_csv(&probe, create(p)?),
                None => emit_json(cli, &a.out, &probe),
            }
        }
        Command::Orbit(OrbitCommand::Period(a)) => {
            let k = NumberField::parse(&a.minpoly)?;
            let unit = FieldElement::new(parse_row(&a.unit)?);
            emit_json(cli, &a.out, &orbits::unit_period_check(&k, &unit, a.grid)?)
        }
        Command::Classify(a) => {
            let signature = parse_signature(&a.signature)?;
            let text = std::fs::read_to_string(&a.units)?;
            let file: UnitsFile = serde_json::from_str(&text).map_err(|e| Error::Json(e.to_string()))?;
            let gens = file.matrices()?;
            let n = match (a.n, gens.first()) {
                (Some(n), _) => n,
                (None, Some(g)) => g.len(),
                (None, None) => signature.0 + 2 * signature.1,
            };
            let algebra = classify::span_algebra(n, &gens)?;
            let split = classify::wedderburn_split_seeded(&algebra, seed)?;
            let verdict = classify::dichotomy(&algebra, &split, signature)?;
            emit_json(cli, &a.out, &ClassifyReport { algebra, split, verdict })
        }
        Command::Counterexample(CounterexampleCommand::Cor3 { depth, a, b, radius, out }) => {
            let alpha = badly_approximable_alpha(*depth)?;
            let audited = counterexamples::cor3_form(&alpha, &parse_rational(a)?, &parse_rational(b)?, *radius)?;
            emit_json(cli, out, &audited)
        }
        Command::Counterexample(CounterexampleCommand::Cor2 { minpoly, param, radius, out }) => {
            let k = NumberField::parse(minpoly)?;
            let audited = counterexamples::cor2_form(&k, &Parameter::parse(param)?, *radius)?;
            emit_json(cli, out, &audited)
        }
        Command::Counterexample(CounterexampleCommand::Witness { depth, d, control, out }) => {
            let alpha = if *control { sqrt2_cf(*depth)? } else { badly_approximable_alpha(*depth)? };
            let verdict = nonquasi_witness_check(&alpha, *d, *depth)?;
            emit_json(cli, out, &WitnessReport { alpha: alpha.symbol(), coefficients: alpha.coefficients.clone(), verdict })
        }
        Command::Pipeline(a) => {
            let config = PipelineConfig {
                seed,
                spectrum_radius: a.radius,
                window: parse_rational(&a.window)?,
                zero_height: a.zero_height,
                log_range: a.log_range,
                orbit_points: a.points,
                period_grid: a.period_grid,
                unit_height: a.units_height,
            };
            let (f, field) = load_form(&a.source)?;
            let input = match &field {
                Some(k) => PipelineInput::Field(k),
                None => PipelineInput::Form(&f),
            };
            emit_json(cli, &a.out, &pipeline::run_pipeline(input, &config)?)
        }
    }
}

#[derive(Serialize)]
struct FieldReport {
    field: NumberField,
    degree: usize,
    signature: (usize, usize),
    norm_form: String,
    units: crate::numberfield::UnitSearch,
    cm: forms::CmVerdict,
}

#[derive(Serialize)]
struct NormalizeReport {
    form: String,
    normal_form: forms::NormalFormData,
    round_trip_residual: f64,
}

#[derive(Serialize)]
struct QuasiReport {
    data: QuasiFormData,
    form: DecomposableForm,
}

#[derive(Serialize)]
struct ClassifyReport {
    algebra: classify::UnitSpanAlgebra,
    split: classify::WedderburnSplit,
    verdict: classify::DichotomyVerdict,
}

#[derive(Serialize)]
struct WitnessReport {
    alpha: String,
    coefficients: Vec<u32>,
    verdict: counterexamples::WitnessVerdict,
}

/// Unit families accepted by `classify`.
#[derive(Deserialize)]
#[serde(untagged)]
enum UnitsFile {
    Matrices { matrices: Vec<Vec<Vec<String>>> },
    Field {
        minpoly: String,
        units: Vec<Vec<String>>,
        #[serde(default = "one")]
        copies: usize,
    },
}

fn one() -> usize {
    1
}

impl UnitsFile {
    fn matrices(&self) -> Result<Vec<QMatrix>> {
        match self {
            UnitsFile::Matrices { matrices } => matrices
                .iter()
                .map(|m| m.iter().map(|r| r.iter().map(|s| parse_rational(s)).collect()).collect())
                .collect(),
            UnitsFile::Field { minpoly, units, copies } => {
                let k = NumberField::parse(minpoly)?;
                let elems = units
                    .iter()
                    .map(|u| u.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>().map(FieldElement::new))
                    .collect::<Result<Vec<_>>>()?;
                Ok(classify::unit_matrices(&k, &elems).iter().map(|m| classify::block_diagonal(m, *copies)).collect())
            }
        }
    }
}

/// Loads a form, together with its field when it is a field norm form.
pub fn load_form(src: &FormSource) -> Result<(DecomposableForm, Option<NumberField>)> {
    if let Some(p) = &src.form {
        let text = std::fs::read_to_string(p)?;
        let f: DecomposableForm = serde_json::from_str(&text).map_err(|e| Error::Json(e.to_string()))?;
        return Ok((f, None));
    }
    if let Some(mp) = &src.minpoly {
        let k = NumberField::parse(mp)?;
        return Ok((k.norm_form(), Some(k)));
    }
    if let Some(rows) = &src.linear {
        let rows = rows.split(';').map(parse_row).collect::<Result<Vec<_>>>()?;
        return Ok((DecomposableForm::from_rational_linear(&rows)?, None));
    }
    if let Some(depth) = src.cor3 {
        let alpha = badly_approximable_alpha(depth)?;
        let f = counterexamples::split_pair_form(&alpha, &rational::int(1), &rational::int(1))?;
        return Ok((f, None));
    }
    Err(Error::InvalidInput("no form given".into()))
}

fn quasi_data(a: &QuasiArgs) -> Result<QuasiFormData> {
    if let Some(p) = &a.data {
        let text = std::fs::read_to_string(p)?;
        return serde_json::from_str(&text).map_err(|e| Error::Json(e.to_string()));
    }
    if let Some(mp) = &a.cm_minpoly {
        let k = NumberField::parse(mp)?;
        return match forms::is_cm(&k)? {
            forms::CmVerdict::Cm { subfield, a: elem, .. } => forms::cm_to_quasi(&subfield, &elem),
            forms::CmVerdict::NotCm { reason } => Err(Error::Precondition(format!("not a CM field: {reason}"))),
        };
    }
    let (Some(field), Some(q)) = (&a.field, &a.q) else {
        return Err(Error::InvalidInput("quasi form needs --data, --cm-minpoly or --field with --q".into()));
    };
    let k = NumberField::parse(field)?;
    let parts = q.split(';').map(|r| parse_row(r).map(FieldElement::new)).collect::<Result<Vec<_>>>()?;
    let [qa, qb, qc]: [FieldElement; 3] =
        parts.try_into().map_err(|_| Error::InvalidInput("--q needs three elements A;B;C".into()))?;
    Ok(QuasiFormData::new(k, QuadSpec::Conjugates { a: qa, b: qb, c: qc }, parse_rational(&a.scale)?))
}

fn parse_row(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(|x| parse_rational(x.trim())).collect()
}

fn parse_signature(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidInput(format!("signature must be s,t: {s}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_log_box(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(',')
        .map(|r| {
            let bad = || Error::InvalidInput(format!("log range must be lo:hi: {r}"));
            let (lo, hi) = r.split_once(':').ok_or_else(bad)?;
            let (lo, hi): (f64, f64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(bad());
            }
            Ok((lo, hi))
        })
        .collect()
}

fn csv_target(out: &OutArg) -> Option<&Path> {
    out.out.as_deref().filter(|p| p.extension().is_some_and(|e| e == "csv"))
}

fn create(p: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(p)?))
}

fn emit_json<T: Serialize>(cli: &Cli, out: &OutArg, result: &T) -> Result<()> {
    let artifact = Artifact { tool: "normform", version: env!("CARGO_PKG_VERSION"), config: cli, result };
    let mut text = serde_json::to_string_pretty(&artifact).map_err(|e| Error::Json(e.to_string()))?;
    text.push('\n');
    match &out.out {
        Some(p) => std::fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_log_boxes() {
        assert_eq!(parse_log_box("0:2.0").unwrap(), vec![(0.0, 2.0)]);
        assert_eq!(parse_log_box("0:1, -1:1").unwrap(), vec![(0.0, 1.0), (-1.0, 1.0)]);
        assert!(parse_log_box("2:1").is_err());
        assert!(parse_log_box("x").is_err());
    }

    #[test]
    fn parses_signatures() {
        assert_eq!(parse_signature("0,2").unwrap(), (0, 2));
        assert!(parse_signature("2").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn form_sources_are_exclusive() {
        assert!(Cli::try_parse_from(["normform", "spectrum", "--minpoly", "x^2-2", "--linear", "1,0;0,1"]).is_err());
        assert!(Cli::try_parse_from(["normform", "spectrum"]).is_err());
        assert!(Cli::try_parse_from(["normform", "spectrum", "--linear", "1,0;0,1", "--box", "3"]).is_ok());
    }
}
