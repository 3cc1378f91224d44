//! The stabilizer torus of a form with `m = n`, its action on the standard
//! lattice and systole observables along torus orbits.
//!
//! With `f(x) = a f0(sigma x)` the torus is `H = sigma^-1 H0 sigma`, where `H0`
//! acts on `y = sigma x` by positive scalings of `y_1 .. y_s` and by
//! rotation-scalings of the pairs `(y_{s+2j-1}, y_{s+2j})`.

use std::f64::consts::PI;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::linalg::float::{self, FMatrix};
use crate::arith::linalg::{self, QMatrix};
use crate::arith::rational::{self, Rational};
use crate::error::{Error, Result};
use crate::forms::{to_normal_form, DecomposableForm, NormalFormData};
use crate::numberfield::{verify_unit, FieldElement, NumberField};

pub mod lattice;

pub use lattice::{minkowski_bound, systole, LatticeBasis, Systole};

/// Number of probes in the invariance check of [`torus_matrix`].
const INVARIANCE_PROBES: usize = 20;

/// One logarithmic torus coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LogCoord {
    Real(f64),
    /// `log q` for a positive rational `q`, kept exact.
    LogOf {
        #[serde(with = "rational::serde_rational")]
        log_of: Rational,
    },
}

impl LogCoord {
    pub fn value(&self) -> f64 {
        match self {
            LogCoord::Real(x) => *x,
            LogCoord::LogOf { log_of } => rational::to_f64(log_of).ln(),
        }
    }

    fn exp_exact(&self) -> Option<Rational> {
        match self {
            LogCoord::Real(x) if *x == 0.0 => Some(Rational::one()),
            LogCoord::Real(_) => None,
            LogCoord::LogOf { log_of } => Some(log_of.clone()),
        }
    }
}

/// Torus parameters: `s + t - 1` logarithmic coordinates and `t` angles.
///
/// The logarithmic coordinates are `u_1 .. u_s` for the real directions and
/// `w_1 .. w_t` for the pairs, with the last one omitted; it is fixed by
/// `sum u_i + 2 sum w_j = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusElement {
    pub u: Vec<LogCoord>,
    pub theta: Vec<f64>,
}

impl TorusElement {
    pub fn identity(s: usize, t: usize) -> Self {
        TorusElement { u: vec![LogCoord::Real(0.0); (s + t).saturating_sub(1)], theta: vec![0.0; t] }
    }

    pub fn from_f64(u: &[f64], theta: &[f64]) -> Self {
        TorusElement { u: u.iter().map(|&x| LogCoord::Real(x)).collect(), theta: theta.to_vec() }
    }

    pub fn u_f64(&self) -> Vec<f64> {
        self.u.iter().map(LogCoord::value).collect()
    }

    /// Group law: coordinates add.
    pub fn compose(&self, other: &TorusElement) -> TorusElement {
        let u = self.u.iter().zip(&other.u).map(|(a, b)| match (a, b) {
            (LogCoord::LogOf { log_of: p }, LogCoord::LogOf { log_of: q }) => LogCoord::LogOf { log_of: p * q },
            _ => LogCoord::Real(a.value() + b.value()),
        });
        TorusElement { u: u.collect(), theta: self.theta.iter().zip(&other.theta).map(|(a, b)| a + b).collect() }
    }

    pub fn scaled(&self, c: f64) -> TorusElement {
        TorusElement {
            u: self.u.iter().map(|x| LogCoord::Real(c * x.value())).collect(),
            theta: self.theta.iter().map(|x| c * x).collect(),
        }
    }
}

/// Floating point copy of the linear forms for fast evaluation.
#[derive(Clone, Debug)]
struct FormF64 {
    scale: f64,
    real_rows: Vec<Vec<f64>>,
    pair_rows: Vec<(Vec<f64>, Vec<f64>)>,
}

impl FormF64 {
    fn new(f: &DecomposableForm) -> Self {
        let lf = f.linear_forms();
        let (s, t) = f.signature();
        let mut real_rows = Vec::with_capacity(s);
        let mut pair_rows = Vec::with_capacity(t);
        for (i, row) in lf.iter().enumerate() {
            let p = f.pairing()[i];
            if p == i {
                real_rows.push(row.iter().map(|c| c.re.to_f64()).collect());
            } else if p > i {
                pair_rows.push((row.iter().map(|c| c.re.to_f64()).collect(), row.iter().map(|c| c.im.to_f64()).collect()));
            }
        }
        FormF64 { scale: f.scale().to_f64(), real_rows, pair_rows }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let dot = |r: &[f64]| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let mut v = self.scale;
        for r in &self.real_rows {
            v *= dot(r);
        }
        for (re, im) in &self.pair_rows {
            let (a, b) = (dot(re), dot(im));
            v *= a * a + b * b;
        }
        v
    }
}

/// Coordinates `y = sigma x` in which the torus is diagonal.
#[derive(Clone, Debug)]
pub struct TorusChart {
    pub normal_form: NormalFormData,
    pub s: usize,
    pub t: usize,
    sigma_exact_inv: Option<QMatrix>,
    form: FormF64,
}

impl TorusChart {
    pub fn new(f: &DecomposableForm) -> Result<Self> {
        let nf = to_normal_form(f)?;
        Ok(Self::from_parts(f, nf))
    }

    pub fn from_parts(f: &DecomposableForm, normal_form: NormalFormData) -> Self {
        let (s, t) = normal_form.signature;
        let sigma_exact_inv = normal_form.sigma_exact.as_ref().and_then(|q| linalg::inverse(q));
        TorusChart { s, t, sigma_exact_inv, form: FormF64::new(f), normal_form }
    }

    pub fn dim(&self) -> usize {
        self.s + 2 * self.t
    }

    pub fn parameter_count(&self) -> usize {
        (self.s + self.t).saturating_sub(1)
    }

    fn check(&self, h: &TorusElement) -> Result<()> {
        if h.u.len() != self.parameter_count() || h.theta.len() != self.t {
            return Err(Error::ChartMismatch(format!(
                "expected {} log coordinates and {} angles, got {} and {}",
                self.parameter_count(),
                self.t,
                h.u.len(),
                h.theta.len()
            )));
        }
        Ok(())
    }

    /// All `s + t` logarithmic coordinates, the last one solved for.
    fn full_logs(&self, h: &TorusElement) -> Vec<f64> {
        let mut logs = h.u_f64();
        let k = self.s + self.t;
        if k == 0 {
            return logs;
        }
        let weighted: f64 = logs.iter().enumerate().map(|(i, x)| if i < self.s { *x } else { 2.0 * x }).sum();
        let last_weight = if k - 1 < self.s { 1.0 } else { 2.0 };
        logs.push(-weighted / last_weight);
        logs
    }

    /// `h0` in `y` coordinates.
    pub fn h0(&self, h: &TorusElement) -> Result<FMatrix> {
        self.check(h)?;
        let n = self.dim();
        let logs = self.full_logs(h);
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..self.s {
            m[i][i] = logs[i].exp();
        }
        for j in 0..self.t {
            let r = logs[self.s + j].exp();
            let (sn, cs) = h.theta[j].sin_cos();
            let b = self.s + 2 * j;
            m[b][b] = r * cs;
            m[b][b + 1] = -r * sn;
            m[b + 1][b] = r * sn;
            m[b + 1][b + 1] = r * cs;
        }
        Ok(m)
    }

    /// Exact `h0` when every coordinate is the logarithm of a rational, all
    /// angles vanish and the solved coordinate is rational.
    fn h0_exact(&self, h: &TorusElement) -> Option<QMatrix> {
        if h.theta.iter().any(|&x| x != 0.0) {
            return None;
        }
        let mut scal: Vec<Rational> = h.u.iter().map(LogCoord::exp_exact).collect::<Option<_>>()?;
        let k = self.s + self.t;
        if k == 0 {
            return Some(Vec::new());
        }
        let prod = scal.iter().enumerate().fold(Rational::one(), |acc, (i, x)| {
            if i < self.s {
                acc * x
            } else {
                acc * x * x
            }
        });
        if prod.is_zero() || prod.is_negative() {
            return None;
        }
        let last = prod.recip();
        if k - 1 < self.s {
            scal.push(last);
        } else {
            let (n, d) = (last.numer().sqrt(), last.denom().sqrt());
            if &n * &n != *last.numer() || &d * &d != *last.denom() {
                return None;
            }
            scal.push(Rational::new(n, d));
        }
        let n = self.dim();
        let mut m = vec![vec![Rational::zero(); n]; n];
        for i in 0..self.s {
            m[i][i] = scal[i].clone();
        }
        for j in 0..self.t {
            let b = self.s + 2 * j;
            m[b][b] = scal[self.s + j].clone();
            m[b + 1][b + 1] = scal[self.s + j].clone();
        }
        Some(m)
    }
}

/// Torus element acting on `R^n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusMatrix {
    pub g: FMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "rational::serde_rational::matrix_opt")]
    pub exact: Option<QMatrix>,
    pub det: f64,
    /// Largest `|f(g^-1 v) - f(v)| / max(1, |f(v)|)` over the probes.
    pub invariance_residual: f64,
}

impl TorusMatrix {
    pub fn lattice(&self) -> Result<LatticeBasis> {
        match &self.exact {
            Some(q) => LatticeBasis::from_exact(q.clone()),
            None => LatticeBasis::any_covolume(self.g.clone()),
        }
    }
}

/// `g = sigma^-1 h0 sigma`, which preserves `f`.
pub fn torus_matrix(chart: &TorusChart, h: &TorusElement) -> Result<TorusMatrix> {
    let h0 = chart.h0(h)?;
    let nf = &chart.normal_form;
    let g = float::mul(&float::mul(&nf.sigma_inv_f64, &h0), &nf.sigma_f64);
    let exact = match (&nf.sigma_exact, &chart.sigma_exact_inv, chart.h0_exact(h)) {
        (Some(sg), Some(si), Some(h0q)) => Some(linalg::mat_mul(&linalg::mat_mul(si, &h0q), sg)),
        _ => None,
    };
    let g = match &exact {
        Some(q) => q.iter().map(|r| r.iter().map(rational::to_f64).collect()).collect(),
        None => g,
    };
    let det = float::det(&g);
    let invariance_residual = invariance_residual(chart, &g, 0x7461_7573)?;
    Ok(TorusMatrix { g, exact, det, invariance_residual })
}

fn invariance_residual(chart: &TorusChart, g: &FMatrix, seed: u64) -> Result<f64> {
    let ginv = float::inverse(g).ok_or_else(|| Error::IllConditioned("torus matrix is singular".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = chart.dim();
    let mut worst = 0f64;
    for _ in 0..INVARIANCE_PROBES {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let fv = chart.form.eval(&v);
        let fg = chart.form.eval(&float::mat_vec(&ginv, &v));
        worst = worst.max((fg - fv).abs() / fv.abs().max(1.0));
    }
    Ok(worst)
}

/// Sampling plan over the torus.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OrbitPlan {
    /// Regular grid over the logarithmic box with `points` samples in total;
    /// angles follow a shifted Halton sequence.
    Grid { log_box: Vec<(f64, f64)>, points: usize },
    /// Uniform random logarithmic coordinates and angles.
    Random { log_box: Vec<(f64, f64)>, samples: usize },
    Explicit { elements: Vec<TorusElement> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitSample {
    pub index: usize,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub systole: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub systole_exact: Option<String>,
    pub witness: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitProbe {
    pub seed: u64,
    pub samples: Vec<OrbitSample>,
    pub min_systole: f64,
    pub argmin: usize,
    pub minkowski_bound: f64,
    /// Samples violating `systole <= min(||g||, Minkowski bound)`.
    pub bound_violations: usize,
    pub max_invariance_residual: f64,
}

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `i` in base `b`.
pub fn halton(mut i: u64, b: u32) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b as u64) as f64;
        i /= b as u64;
    }
    r
}

fn shifted_angles(index: usize, t: usize, shift: &[f64]) -> Vec<f64> {
    (0..t).map(|j| 2.0 * PI * (halton(index as u64 + 1, PRIMES[j % PRIMES.len()]) + shift[j]).fract()).collect()
}

fn expand_box(log_box: &[(f64, f64)], k: usize) -> Result<Vec<(f64, f64)>> {
    match log_box.len() {
        l if l == k => Ok(log_box.to_vec()),
        1 => Ok(vec![log_box[0]; k]),
        0 if k == 0 => Ok(Vec::new()),
        l => Err(Error::ChartMismatch(format!("log box has {l} ranges, torus has {k} log coordinates"))),
    }
}

/// Elements of a plan, in sample order.
pub fn plan_elements(chart: &TorusChart, plan: &OrbitPlan, seed: u64) -> Result<Vec<TorusElement>> {
    let k = chart.parameter_count();
    let t = chart.t;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..t).map(|_| rng.gen::<f64>()).collect();
    let out = match plan {
        OrbitPlan::Explicit { elements } => elements.clone(),
        OrbitPlan::Grid { log_box, points } => {
            let bx = expand_box(log_box, k)?;
            if *points == 0 {
                return Err(Error::Precondition("plan has no samples".into()));
            }
            let per = if k == 0 { 1 } else { (*points as f64).powf(1.0 / k as f64).round().max(1.0) as usize };
            let total = if k == 0 { *points } else { per.pow(k as u32) };
            (0..total)
                .map(|idx| {
                    let mut rest = idx;
                    let u: Vec<f64> = bx
                        .iter()
                        .map(|&(lo, hi)| {
                            let c = rest % per;
                            rest /= per;
                            if per == 1 { lo } else { lo + (hi - lo) * c as f64 / (per - 1) as f64 }
                        })
                        .collect();
                    TorusElement::from_f64(&u, &shifted_angles(idx, t, &shift))
                })
                .collect()
        }
        OrbitPlan::Random { log_box, samples } => {
            let bx = expand_box(log_box, k)?;
            (0..*samples)
                .map(|_| {
                    let u: Vec<f64> = bx.iter().map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..hi) } else { lo }).collect();
                    let th: Vec<f64> = (0..t).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
                    TorusElement::from_f64(&u, &th)
                })
                .collect()
        }
    };
    if out.is_empty() {
        return Err(Error::Precondition("plan has no samples".into()));
    }
    Ok(out)
}

/// Systole of `g Z^n` over the plan.
pub fn orbit_probe(chart: &TorusChart, plan: &OrbitPlan, seed: u64) -> Result<OrbitProbe> {
    let elements = plan_elements(chart, plan, seed)?;
    let n = chart.dim();
    let mink = minkowski_bound(n);
    let results: Vec<Result<(OrbitSample, bool, f64)>> = elements
        .par_iter()
        .enumerate()
        .map(|(index, h)| {
            let tm = torus_matrix(chart, h)?;
            let sys = systole(&tm.lattice()?)?;
            let op = float::op_norm(&tm.g);
            let ok = sys.length <= mink * (1.0 + 1e-9) && sys.length <= op * (1.0 + 1e-9);
            let sample = OrbitSample {
                index,
                u: h.u_f64(),
                theta: h.theta.clone(),
                systole: sys.length,
                systole_exact: sys.length_exact.as_ref().map(rational::fmt_rational),
                witness: sys.witness,
            };
            Ok((sample, ok, tm.invariance_residual))
        })
        .collect();
    let mut samples = Vec::with_capacity(results.len());
    let mut bound_violations = 0;
    let mut max_invariance_residual = 0f64;
    for r in results {
        let (s, ok, res) = r?;
        bound_violations += usize::from(!ok);
        max_invariance_residual = max_invariance_residual.max(res);
        samples.push(s);
    }
    let (argmin, min_systole) = samples
        .iter()
        .map(|s| s.systole)
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    Ok(OrbitProbe { seed, samples, min_systole, argmin, minkowski_bound: mink, bound_violations, max_invariance_residual })
}

/// Writes `(params..., systole, witness)` rows.
pub fn write_csv<W: std::io::Write>(probe: &OrbitProbe, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    let (k, t) = probe.samples.first().map_or((0, 0), |s| (s.u.len(), s.theta.len()));
    let mut header: Vec<String> = (1..=k).map(|i| format!("u{i}")).collect();
    header.extend((1..=t).map(|j| format!("theta{j}")));
    header.extend(["systole".to_string(), "witness".to_string()]);
    wr.write_record(&header).map_err(io)?;
    for s in &probe.samples {
        let mut row: Vec<String> = s.u.iter().chain(&s.theta).map(|x| format!("{x:.17e}")).collect();
        row.push(format!("{:.17e}", s.systole));
        row.push(s.witness.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
        wr.write_record(&row).map_err(io)?;
    }
    wr.flush().map_err(|e| Error::Io(e.to_string()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitPeriodReport {
    /// Torus element corresponding to the unit.
    pub element: TorusElement,
    /// True when the unit was squared to make its real embeddings positive.
    pub squared: bool,
    /// Integer matrix of multiplication by the unit.
    #[serde(with = "rational::serde_rational::matrix")]
    pub action: QMatrix,
    /// `max |g(h_u) - M|` over the entries.
    pub lattice_residual: f64,
    pub grid: usize,
    /// `max |systole(g(x + h_u)) - systole(g(x))|` over the grid.
    pub residual: f64,
}

/// Checks that the torus element of a norm-one unit maps the standard lattice
/// to itself, so that systoles are periodic along it.
pub fn unit_period_check(k: &NumberField, unit: &FieldElement, grid: usize) -> Result<UnitPeriodReport> {
    verify_unit(k, unit)?;
    let f = k.norm_form();
    let chart = TorusChart::new(&f)?;
    let (s, t) = (chart.s, chart.t);
    let mut m = k.regular_rep(unit);
    let n = chart.dim();
    let mut squared = false;
    let trivial = |m: &QMatrix| linalg::mat_mul(m, m) == linalg::identity(n);
    let mut element = TorusElement::identity(s, t);
    if !trivial(&m) {
        let nf = &chart.normal_form;
        let to_f = |q: &QMatrix| -> FMatrix { q.iter().map(|r| r.iter().map(rational::to_f64).collect()).collect() };
        let mut h = float::mul(&float::mul(&nf.sigma_f64, &to_f(&m)), &nf.sigma_inv_f64);
        if (0..s).any(|i| h[i][i] < 0.0) {
            m = linalg::mat_mul(&m, &m);
            h = float::mul(&h, &h);
            squared = true;
        }
        let mut logs: Vec<f64> = (0..s).map(|i| h[i][i].abs().ln()).collect();
        let mut theta = Vec::with_capacity(t);
        for j in 0..t {
            let b = s + 2 * j;
            let det = h[b][b] * h[b + 1][b + 1] - h[b][b + 1] * h[b + 1][b];
            logs.push(0.5 * det.ln());
            theta.push(h[b + 1][b].atan2(h[b][b]));
        }
        logs.truncate((s + t).saturating_sub(1));
        element = TorusElement::from_f64(&logs, &theta);
    }
    let gu = torus_matrix(&chart, &element)?;
    let lattice_residual = gu
        .g
        .iter()
        .flatten()
        .zip(m.iter().flatten())
        .map(|(a, b)| (a - rational::to_f64(b)).abs())
        .fold(0.0, f64::max);
    let points: Vec<Result<f64>> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let base = element.scaled(i as f64 / grid.max(1) as f64);
            let base = TorusElement {
                theta: (0..t).map(|j| 2.0 * PI * halton(i as u64 + 1, PRIMES[j % PRIMES.len()])).collect(),
                ..base
            };
            let moved = base.compose(&element);
            let a = systole(&torus_matrix(&chart, &base)?.lattice()?)?.length;
            let b = systole(&torus_matrix(&chart, &moved)?.lattice()?)?.length;
            Ok((a - b).abs())
        })
        .collect();
    let mut residual = 0f64;
    for p in points {
        residual = residual.max(p?);
    }
    Ok(UnitPeriodReport { element, squared, action: m, lattice_residual, grid, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    fn chart(minpoly: &str) -> TorusChart {
        TorusChart::new(&NumberField::parse(minpoly).unwrap().norm_form()).unwrap()
    }

    fn split_chart() -> TorusChart {
        TorusChart::new(&DecomposableForm::from_int_linear(&[&[1, 0], &[0, 1]]).unwrap()).unwrap()
    }

    #[test]
    fn identity_element() {
        let c = chart("x^3-2");
        let tm = torus_matrix(&c, &TorusElement::identity(1, 1)).unwrap();
        for (i, r) in tm.g.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                assert!((v - (i == j) as u8 as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn split_binary_form() {
        let c = split_chart();
        let h = TorusElement { u: vec![LogCoord::LogOf { log_of: int(2) }], theta: vec![] };
        let tm = torus_matrix(&c, &h).unwrap();
        assert_eq!(tm.exact, Some(vec![vec![int(2), int(0)], vec![int(0), Rational::new(1.into(), 2.into())]]));
        let h = TorusElement { u: vec![LogCoord::LogOf { log_of: int(4) }], theta: vec![] };
        let s = systole(&torus_matrix(&c, &h).unwrap().lattice().unwrap()).unwrap();
        assert_eq!(s.length_exact, Some(Rational::new(1.into(), 4.into())));
    }

    #[test]
    fn rotation_block() {
        let c = chart("x^2+1");
        let tm = torus_matrix(&c, &TorusElement::from_f64(&[], &[PI / 2.0])).unwrap();
        let expect = [[0.0, -1.0], [1.0, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((tm.g[i][j] - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn torus_preserves_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in ["x^2-2", "x^3-2", "x^4+x^3+x^2+x+1", "x^2+1"] {
            let c = chart(p);
            for _ in 0..25 {
                let u: Vec<f64> = (0..c.parameter_count()).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let th: Vec<f64> = (0..c.t).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
                let tm = torus_matrix(&c, &TorusElement::from_f64(&u, &th)).unwrap();
                assert!(tm.invariance_residual < 1e-10, "{p}: {}", tm.invariance_residual);
                assert!((tm.det - 1.0).abs() < 1e-12, "{p}: det {}", tm.det);
            }
        }
    }

    #[test]
    fn chart_mismatch() {
        let c = chart("x^2-2");
        assert!(matches!(torus_matrix(&c, &TorusElement::identity(1, 1)), Err(Error::ChartMismatch(_))));
    }

    #[test]
    fn split_form_systole_decays() {
        let c = split_chart();
        let plan = OrbitPlan::Grid { log_box: vec![(0.0, 10.0)], points: 11 };
        let p = orbit_probe(&c, &plan, 7).unwrap();
        for w in p.samples.windows(2) {
            assert!(w[1].systole < w[0].systole);
        }
        assert!((p.samples[10].systole - (-10f64).exp()).abs() < 1e-15);
        assert_eq!(p.bound_violations, 0);
    }

    #[test]
    fn single_identity_sample() {
        let c = chart("x^3-2");
        let plan = OrbitPlan::Explicit { elements: vec![TorusElement::identity(1, 1)] };
        let p = orbit_probe(&c, &plan, 1).unwrap();
        assert!((p.min_systole - 1.0).abs() < 1e-12);
    }

    #[test]
    fn periodicity_for_units() {
        let k = NumberField::parse("x^2-2").unwrap();
        let r = unit_period_check(&k, &FieldElement::from_ints(&[3, 2]), 32).unwrap();
        assert!(r.residual < 1e-9, "{}", r.residual);
        assert!(r.lattice_residual < 1e-9);
        assert!((r.element.u[0].value().abs() - (3.0 + 2.0 * 2f64.sqrt()).ln()).abs() < 1e-12);
        let one = unit_period_check(&k, &FieldElement::from_ints(&[1, 0]), 32).unwrap();
        assert_eq!(one.residual, 0.0);
        let k = NumberField::parse("x^3-2").unwrap();
        let r = unit_period_check(&k, &FieldElement::from_ints(&[1, 1, 1]), 32).unwrap();
        assert!(r.residual < 1e-9, "{}", r.residual);
        assert!(matches!(
            unit_period_check(&k, &FieldElement::from_ints(&[2, 0, 0]), 4),
            Err(Error::NotAUnit(_))
        ));
    }

    #[test]
    fn deterministic_plans() {
        let c = chart("x^3-2");
        let plan = OrbitPlan::Random { log_box: vec![(-1.0, 1.0)], samples: 8 };
        let a = serde_json::to_string(&orbit_probe(&c, &plan, 11).unwrap()).unwrap();
        let b = serde_json::to_string(&orbit_probe(&c, &plan, 11).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
