//! Values of a form on integer boxes: window spectra with exact merging,
//! stabilization certificates, the gcd partition of the box and searches for
//! rational zeros.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Write;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::rational::{self, Rational};
use crate::arith::{F64Interval, RatInterval};
use crate::error::{Error, Result};
use crate::forms::{CoeffField, DecomposableForm, Expansion};

mod bound;

pub use bound::{contributor_bound, ContributorBound};

/// Default cap on the number of evaluated points.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Gap below which heuristic enclosures are counted as one value.
pub const HEURISTIC_GAP: f64 = 1e-12;

/// The box `[-N, N]^m`, optionally restricted to vectors whose coordinate gcd
/// equals `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSpec {
    #[serde(rename = "N")]
    pub radius: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_filter: Option<u64>,
}

impl BoxSpec {
    pub fn new(radius: u32) -> Self {
        BoxSpec { radius, d_filter: None }
    }

    pub fn with_gcd(radius: u32, d: u64) -> Self {
        BoxSpec { radius, d_filter: Some(d) }
    }

    pub fn point_count(&self, m: usize) -> u128 {
        (2 * self.radius as u128 + 1).saturating_pow(m as u32)
    }

    fn validate(&self) -> Result<()> {
        if self.radius == 0 {
            return Err(Error::Precondition("box radius must be at least 1".into()));
        }
        if self.d_filter == Some(0) {
            return Err(Error::Precondition("gcd filter must be positive".into()));
        }
        Ok(())
    }

    fn admits(&self, z: &[i64]) -> bool {
        match self.d_filter {
            None => true,
            Some(d) => gcd_of(z) == d,
        }
    }
}

/// Coordinate gcd, zero for the zero vector.
pub fn gcd_of(z: &[i64]) -> u64 {
    z.iter().fold(0u64, |g, &x| g.gcd(&x.unsigned_abs()))
}

/// Exact or heuristic value representation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ValueRepr {
    Rational {
        #[serde(with = "rational::serde_rational")]
        value: Rational,
    },
    /// Coordinates over the power basis of the coefficient field.
    Field {
        #[serde(with = "rational::serde_rational::vec")]
        coords: Vec<Rational>,
    },
    /// Interval-separated cluster; equality undecidable.
    Heuristic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumValue {
    pub value: ValueRepr,
    #[serde(with = "rational::serde_rational::pair")]
    pub enclosure: (Rational, Rational),
    pub approx: f64,
    pub multiplicity: u64,
    /// First point attaining the value in the order of [`point_key`].
    pub witness: Vec<i64>,
    /// Smallest box radius containing a point with this value.
    pub first_box: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MinNonzero {
    /// Exact minimum of `|f|` over nonzero values.
    Exact {
        #[serde(with = "rational::serde_rational")]
        value: Rational,
        witness: Vec<i64>,
    },
    /// Certified lower bound, with the point where the minimum is attained.
    Bound {
        #[serde(with = "rational::serde_rational")]
        lower: Rational,
        approx: f64,
        witness: Vec<i64>,
    },
    /// Every admitted point gives zero.
    NoNonzeroValue,
}

impl MinNonzero {
    /// Certified lower bound as a rational.
    pub fn lower(&self) -> Option<&Rational> {
        match self {
            MinNonzero::Exact { value, .. } => Some(value),
            MinNonzero::Bound { lower, .. } => Some(lower),
            MinNonzero::NoNonzeroValue => None,
        }
    }

    pub fn witness(&self) -> Option<&[i64]> {
        match self {
            MinNonzero::Exact { witness, .. } | MinNonzero::Bound { witness, .. } => Some(witness),
            MinNonzero::NoNonzeroValue => None,
        }
    }
}

/// How stabilization of the window was established.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Stabilization {
    /// No point outside the box can land in the window.
    AnalyticBound { required_radius: u64 },
    /// Same distinct values as the box of half the radius.
    Empirical { previous_radius: u32 },
    NotStabilized { previous_radius: u32, new_values: usize, required_radius: Option<u64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    #[serde(rename = "box")]
    pub box_spec: BoxSpec,
    #[serde(with = "rational::serde_rational")]
    pub window: Rational,
    /// "exact" or "heuristic".
    pub mode: String,
    pub points_examined: u64,
    pub distinct_values: Vec<SpectrumValue>,
    pub zero_witness: Option<Vec<i64>>,
    pub min_nonzero_abs: MinNonzero,
    /// Set when the form has a rational expansion: all values in the box are integers.
    pub all_values_integral: Option<bool>,
    /// Points whose window membership could not be decided.
    pub undecided_points: u64,
    pub stabilized: bool,
    pub stabilization: Stabilization,
}

/// Per-point classification produced during the scan.
enum Key {
    Rational(Rational),
    Field(Vec<Rational>),
    Heuristic(F64Interval),
}

struct Hit {
    key: Key,
    z: Vec<i64>,
    height: u32,
}

struct MinCand {
    lower: Rational,
    approx: f64,
    exact: Option<Rational>,
    z: Vec<i64>,
}

#[derive(Default)]
struct SlabResult {
    hits: Vec<Hit>,
    points: u64,
    zero: Option<Vec<i64>>,
    min: Option<MinCand>,
    non_integral: bool,
    undecided: u64,
}

enum Mode<'a> {
    Rational(&'a crate::arith::MPoly),
    Field(&'a Expansion),
    Heuristic,
}

fn mode_of(f: &DecomposableForm) -> Mode<'_> {
    match f.expansion() {
        Some(Expansion { field: CoeffField::Rational, parts }) => Mode::Rational(&parts[0]),
        Some(e) => Mode::Field(e),
        None => Mode::Heuristic,
    }
}

fn sup_norm(z: &[i64]) -> u32 {
    z.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as u32
}

/// Witness order: height, then positive leading coordinate, then
/// colexicographic on absolute values, then colexicographic.
pub fn point_key(z: &[i64]) -> (u32, bool, Vec<u64>, Vec<i64>) {
    let lead_negative = z.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0);
    (sup_norm(z), lead_negative, z.iter().rev().map(|x| x.unsigned_abs()).collect(), z.iter().rev().copied().collect())
}

fn earlier(a: &[i64], b: &[i64]) -> bool {
    point_key(a) < point_key(b)
}

fn keep_zero(slot: &mut Option<Vec<i64>>, z: &[i64]) {
    if slot.as_ref().is_none_or(|w| earlier(z, w)) {
        *slot = Some(z.to_vec());
    }
}

/// Runs `visit` over every point of `[-r, r]^m` whose first coordinate is
/// `first`, in lexicographic order.
pub(crate) fn for_each_in_slab(m: usize, r: i64, first: i64, mut visit: impl FnMut(&[i64])) {
    let mut z = vec![-r; m];
    z[0] = first;
    loop {
        visit(&z);
        let mut i = m;
        loop {
            if i == 1 {
                return;
            }
            i -= 1;
            if z[i] < r {
                z[i] += 1;
                break;
            }
            z[i] = -r;
        }
    }
}

/// Enumerates `f` on the box and collects the values in `[-b, b]`.
pub fn enumerate_values(f: &DecomposableForm, box_spec: BoxSpec, window: &Rational) -> Result<SpectrumReport> {
    enumerate_values_with_budget(f, box_spec, window, DEFAULT_BUDGET)
}

pub fn enumerate_values_with_budget(
    f: &DecomposableForm,
    box_spec: BoxSpec,
    window: &Rational,
    budget: u128,
) -> Result<SpectrumReport> {
    box_spec.validate()?;
    if !window.is_positive() {
        return Err(Error::Precondition("window must be positive".into()));
    }
    let m = f.m();
    let needed = box_spec.point_count(m);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mode = mode_of(f);
    let fast = f.fast()?;
    let r = box_spec.radius as i64;
    let b = window.clone();
    let bf = rational::to_f64(&b);
    let slabs: Vec<Result<SlabResult>> = (-r..=r)
        .into_par_iter()
        .map(|first| {
            let mut out = SlabResult::default();
            let mut err = None;
            for_each_in_slab(m, r, first, |z| {
                if err.is_some() || z.iter().all(|&x| x == 0) || !box_spec.admits(z) {
                    return;
                }
                out.points += 1;
                if let Err(e) = visit_point(f, &mode, fast, z, &b, bf, &mut out) {
                    err = Some(e);
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(out),
            }
        })
        .collect();
    let mut merged = SlabResult::default();
    for s in slabs {
        let s = s?;
        merged.points += s.points;
        merged.undecided += s.undecided;
        merged.non_integral |= s.non_integral;
        if let Some(z) = s.zero {
            keep_zero(&mut merged.zero, &z);
        }
        if let Some(c) = s.min {
            let better = match &merged.min {
                None => true,
                Some(cur) => c.lower < cur.lower || (c.lower == cur.lower && earlier(&c.z, &cur.z)),
            };
            if better {
                merged.min = Some(c);
            }
        }
        merged.hits.extend(s.hits);
    }
    let field = match &mode {
        Mode::Field(e) => Some(&e.field),
        _ => None,
    };
    let distinct_values = merge_hits(merged.hits, field);
    let min_nonzero_abs = match merged.min {
        None => MinNonzero::NoNonzeroValue,
        Some(MinCand { exact: Some(v), z, .. }) => MinNonzero::Exact { value: v, witness: z },
        Some(MinCand { lower, approx, z, .. }) => MinNonzero::Bound { lower, approx, witness: z },
    };
    let prev = box_spec.radius / 2;
    let new_values = distinct_values.iter().filter(|v| v.first_box > prev).count();
    let bound = contributor_bound(f, &b)?;
    let required = bound.as_ref().map(|c| c.required_radius);
    let stabilization = match required {
        Some(req) if box_spec.radius as u64 >= req => Stabilization::AnalyticBound { required_radius: req },
        _ if prev >= 1 && new_values == 0 => Stabilization::Empirical { previous_radius: prev },
        _ => Stabilization::NotStabilized { previous_radius: prev, new_values, required_radius: required },
    };
    let stabilized = !matches!(stabilization, Stabilization::NotStabilized { .. });
    Ok(SpectrumReport {
        box_spec,
        window: b,
        mode: if matches!(mode, Mode::Heuristic) { "heuristic".into() } else { "exact".into() },
        points_examined: merged.points,
        distinct_values,
        zero_witness: merged.zero,
        min_nonzero_abs,
        all_values_integral: matches!(mode, Mode::Rational(_)).then_some(!merged.non_integral),
        undecided_points: merged.undecided,
        stabilized,
        stabilization,
    })
}

fn visit_point(
    f: &DecomposableForm,
    mode: &Mode<'_>,
    fast: &crate::forms::FastForm,
    z: &[i64],
    b: &Rational,
    bf: f64,
    out: &mut SlabResult,
) -> Result<()> {
    let height = sup_norm(z);
    match mode {
        Mode::Rational(p) => {
            let v = match p.eval_i128(z) {
                Some(v) => Rational::from_integer(v.into()),
                None => p.eval_int(z),
            };
            if !v.is_integer() {
                out.non_integral = true;
            }
            if v.is_zero() {
                keep_zero(&mut out.zero, z);
            } else {
                let a = v.abs();
                if out.min.as_ref().is_none_or(|c| a < c.lower || (a == c.lower && earlier(z, &c.z))) {
                    out.min = Some(MinCand { approx: rational::to_f64(&a), lower: a.clone(), exact: Some(a), z: z.to_vec() });
                }
            }
            if v.abs() <= *b {
                out.hits.push(Hit { key: Key::Rational(v), z: z.to_vec(), height });
            }
        }
        Mode::Field(e) => {
            let coords = e.eval_coords_int(z);
            if coords.iter().all(Zero::is_zero) {
                keep_zero(&mut out.zero, z);
                out.hits.push(Hit { key: Key::Field(coords), z: z.to_vec(), height });
                return Ok(());
            }
            let mut iv = fast.eval(z);
            if iv.contains_zero() || iv.lo.abs().min(iv.hi.abs()) <= 2.0 * bf {
                // refine near zero and near the window edges
                let enc = refine_nonzero(&e.field, &coords, e.field.enclose(&coords, 64));
                iv = F64Interval::from_rat_interval(&enc);
                track_min(out, enc.abs().lo, iv.mid().abs(), z);
            } else {
                track_min_f64(out, abs_lower(iv), iv.mid().abs(), z);
            }
            if iv.lo > bf || iv.hi < -bf {
                return Ok(());
            }
            let mut shifted = coords.clone();
            shifted[0] -= b;
            let above = e.field.sign(&shifted) > 0;
            shifted[0] = &coords[0] + b;
            let below = e.field.sign(&shifted) < 0;
            if !above && !below {
                out.hits.push(Hit { key: Key::Field(coords), z: z.to_vec(), height });
            }
        }
        Mode::Heuristic => {
            let mut iv = fast.eval(z);
            if iv.contains_zero() {
                let v: Vec<Rational> = z.iter().map(|&x| rational::int(x)).collect();
                match f.vanishes_at(&v) {
                    Ok(true) => {
                        keep_zero(&mut out.zero, z);
                        out.hits.push(Hit { key: Key::Heuristic(F64Interval::point(0.0)), z: z.to_vec(), height });
                        return Ok(());
                    }
                    Ok(false) => {
                        let enc = f.value_creal(&v).enclose_best(256)?;
                        iv = F64Interval::from_rat_interval(&enc);
                        if enc.contains_zero() {
                            out.undecided += 1;
                            return Ok(());
                        }
                        track_min(out, enc.abs().lo, iv.mid().abs(), z);
                    }
                    Err(Error::PrecisionFloorHit(_)) => {
                        out.undecided += 1;
                        return Ok(());
                    }
                    Err(e) => return Err(e),
                }
            } else {
                track_min_f64(out, abs_lower(iv), iv.mid().abs(), z);
            }
            if iv.hi < -bf || iv.lo > bf {
                return Ok(());
            }
            if iv.lo >= -bf && iv.hi <= bf {
                out.hits.push(Hit { key: Key::Heuristic(iv), z: z.to_vec(), height });
            } else {
                out.undecided += 1;
            }
        }
    }
    Ok(())
}

fn abs_lower(iv: F64Interval) -> f64 {
    if iv.contains_zero() {
        0.0
    } else {
        iv.lo.abs().min(iv.hi.abs())
    }
}

fn refine_nonzero(field: &CoeffField, coords: &[Rational], mut enc: RatInterval) -> RatInterval {
    let mut bits = 64;
    while enc.contains_zero() && bits < crate::arith::creal::MAX_PRECISION_BITS {
        bits *= 2;
        enc = field.enclose(coords, bits);
    }
    enc
}

fn track_min(out: &mut SlabResult, lower: Rational, approx: f64, z: &[i64]) {
    if out.min.as_ref().is_none_or(|c| lower < c.lower || (lower == c.lower && earlier(z, &c.z))) {
        out.min = Some(MinCand { lower, approx, exact: None, z: z.to_vec() });
    }
}

fn track_min_f64(out: &mut SlabResult, lower: f64, approx: f64, z: &[i64]) {
    if lower > 0.0 {
        // the float bound is outward rounded, so its exact rational value is valid
        track_min(out, rational::from_f64(lower), approx, z);
    }
}

fn merge_hits(hits: Vec<Hit>, field: Option<&CoeffField>) -> Vec<SpectrumValue> {
    let mut exact: BTreeMap<Rational, SpectrumValue> = BTreeMap::new();
    let mut by_coords: BTreeMap<Vec<Rational>, SpectrumValue> = BTreeMap::new();
    let mut heuristic: Vec<(F64Interval, Vec<i64>, u32)> = Vec::new();
    let absorb = |slot: &mut SpectrumValue, z: Vec<i64>, height: u32| {
        slot.multiplicity += 1;
        slot.first_box = slot.first_box.min(height);
        if earlier(&z, &slot.witness) {
            slot.witness = z;
        }
    };
    for h in hits {
        match h.key {
            Key::Rational(v) => match exact.get_mut(&v) {
                Some(slot) => absorb(slot, h.z, h.height),
                None => {
                    let approx = rational::to_f64(&v);
                    exact.insert(
                        v.clone(),
                        SpectrumValue {
                            value: ValueRepr::Rational { value: v.clone() },
                            enclosure: (v.clone(), v),
                            approx,
                            multiplicity: 1,
                            witness: h.z,
                            first_box: h.height,
                        },
                    );
                }
            },
            Key::Field(c) => match by_coords.get_mut(&c) {
                Some(slot) => absorb(slot, h.z, h.height),
                None => {
                    let enc = field.expect("field mode").enclose(&c, 64);
                    by_coords.insert(
                        c.clone(),
                        SpectrumValue {
                            approx: enc.mid_f64(),
                            enclosure: (enc.lo, enc.hi),
                            value: ValueRepr::Field { coords: c },
                            multiplicity: 1,
                            witness: h.z,
                            first_box: h.height,
                        },
                    );
                }
            },
            Key::Heuristic(iv) => heuristic.push((iv, h.z, h.height)),
        }
    }
    if !by_coords.is_empty() {
        let field = field.expect("field mode");
        let mut vals: Vec<SpectrumValue> = by_coords.into_values().collect();
        vals.sort_by(|a, b| match (&a.value, &b.value) {
            (ValueRepr::Field { coords: ca }, ValueRepr::Field { coords: cb }) => {
                let diff: Vec<Rational> = ca.iter().zip(cb).map(|(x, y)| x - y).collect();
                field.sign(&diff).cmp(&0)
            }
            _ => Ordering::Equal,
        });
        return vals;
    }
    if !heuristic.is_empty() {
        heuristic.sort_by(|a, b| a.0.lo.total_cmp(&b.0.lo).then_with(|| a.1.cmp(&b.1)));
        let mut out: Vec<(F64Interval, SpectrumValue)> = Vec::new();
        for (iv, z, height) in heuristic {
            if let Some((hull, slot)) = out.last_mut() {
                if iv.lo - hull.hi <= HEURISTIC_GAP {
                    *hull = F64Interval::new(hull.lo.min(iv.lo), hull.hi.max(iv.hi));
                    absorb(slot, z, height);
                    continue;
                }
            }
            out.push((
                iv,
                SpectrumValue {
                    value: ValueRepr::Heuristic,
                    enclosure: (Rational::zero(), Rational::zero()),
                    approx: 0.0,
                    multiplicity: 1,
                    witness: z,
                    first_box: height,
                },
            ));
        }
        return out
            .into_iter()
            .map(|(hull, mut v)| {
                v.enclosure = (rational::from_f64(hull.lo), rational::from_f64(hull.hi));
                v.approx = hull.mid();
                v
            })
            .collect();
    }
    exact.into_values().collect()
}

/// Counts of the box points by coordinate gcd.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionCheck {
    pub n: usize,
    #[serde(rename = "N")]
    pub radius: u32,
    pub d_max: u64,
    /// `counts[d - 1]` is the number of points with gcd exactly `d`.
    pub counts: Vec<u64>,
    pub above_d_max: u64,
    pub total_nonzero: u64,
    pub tiles: bool,
}

/// Verifies that the sets of points with gcd `1..=d_max` and those with larger
/// gcd tile the box minus the origin.
pub fn partition_check(n: usize, radius: u32, d_max: u64) -> Result<PartitionCheck> {
    if d_max == 0 {
        return Err(Error::Precondition("d_max must be at least 1".into()));
    }
    BoxSpec::new(radius).validate()?;
    let needed = BoxSpec::new(radius).point_count(n);
    if needed > DEFAULT_BUDGET {
        return Err(Error::BudgetExceeded { needed, budget: DEFAULT_BUDGET });
    }
    let r = radius as i64;
    let slabs: Vec<(Vec<u64>, u64)> = (-r..=r)
        .into_par_iter()
        .map(|first| {
            let mut counts = vec![0u64; d_max as usize];
            let mut above = 0u64;
            for_each_in_slab(n, r, first, |z| {
                let g = gcd_of(z);
                if g == 0 {
                    return;
                }
                if g <= d_max {
                    counts[g as usize - 1] += 1;
                } else {
                    above += 1;
                }
            });
            (counts, above)
        })
        .collect();
    let mut counts = vec![0u64; d_max as usize];
    let mut above_d_max = 0;
    for (c, a) in slabs {
        counts.iter_mut().zip(c).for_each(|(x, y)| *x += y);
        above_d_max += a;
    }
    let total_nonzero = (needed - 1) as u64;
    let tiles = counts.iter().sum::<u64>() + above_d_max == total_nonzero;
    Ok(PartitionCheck { n, radius, d_max, counts, above_d_max, total_nonzero, tiles })
}

/// Outcome of a search for rational zeros.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroSearch {
    pub height: u32,
    pub witness: Option<Vec<i64>>,
    pub vectors_scanned: u64,
    pub undecided: u64,
}

/// Largest height `H <= 50` with `(2H + 1)^n <= 2 * 10^6`.
pub fn default_zero_search_height(n: usize) -> u32 {
    (1..=50u32).rev().find(|&h| (2 * h as u128 + 1).saturating_pow(n as u32) <= 2_000_000).unwrap_or(1)
}

/// Scans primitive integer vectors of height at most `height`, first nonzero
/// coordinate positive, for an exact zero of `f`. The witness is the first
/// zero in the order of [`point_key`].
pub fn rational_zero_search(f: &DecomposableForm, height: u32) -> Result<ZeroSearch> {
    if height == 0 {
        return Err(Error::Precondition("search height must be at least 1".into()));
    }
    let m = f.m();
    let needed = BoxSpec::new(height).point_count(m);
    if needed > DEFAULT_BUDGET {
        return Err(Error::BudgetExceeded { needed, budget: DEFAULT_BUDGET });
    }
    let fast = f.fast()?;
    let mode = mode_of(f);
    let h = height as i64;
    type SlabOut = (Option<Vec<i64>>, u64, u64);
    let slabs: Vec<Result<SlabOut>> = (0..=h)
        .into_par_iter()
        .map(|first| {
            let mut best: Option<Vec<i64>> = None;
            let (mut scanned, mut undecided) = (0u64, 0u64);
            let mut err = None;
            for_each_in_slab(m, h, first, |z| {
                if err.is_some() {
                    return;
                }
                let lead = z.iter().find(|&&x| x != 0);
                if lead.is_none_or(|&x| x < 0) || gcd_of(z) != 1 {
                    return;
                }
                scanned += 1;
                if best.as_ref().is_some_and(|w| !earlier(z, w)) {
                    return;
                }
                match is_zero_at(f, &mode, fast, z) {
                    Ok(Some(true)) => best = Some(z.to_vec()),
                    Ok(Some(false)) => {}
                    Ok(None) => undecided += 1,
                    Err(e) => err = Some(e),
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok((best, scanned, undecided)),
            }
        })
        .collect();
    let mut witness: Option<Vec<i64>> = None;
    let (mut vectors_scanned, mut undecided) = (0, 0);
    for s in slabs {
        let (b, sc, un) = s?;
        vectors_scanned += sc;
        undecided += un;
        if let Some(c) = b {
            keep_zero(&mut witness, &c);
        }
    }
    Ok(ZeroSearch { height, witness, vectors_scanned, undecided })
}

fn is_zero_at(
    f: &DecomposableForm,
    mode: &Mode<'_>,
    fast: &crate::forms::FastForm,
    z: &[i64],
) -> Result<Option<bool>> {
    match mode {
        Mode::Rational(p) => Ok(Some(match p.eval_i128(z) {
            Some(v) => v == 0,
            None => p.eval_int(z).is_zero(),
        })),
        Mode::Field(e) => Ok(Some(e.eval_coords_int(z).iter().all(Zero::is_zero))),
        Mode::Heuristic => {
            if !fast.eval(z).contains_zero() {
                return Ok(Some(false));
            }
            let v: Vec<Rational> = z.iter().map(|&x| rational::int(x)).collect();
            match f.vanishes_at(&v) {
                Ok(b) => Ok(Some(b)),
                Err(Error::PrecisionFloorHit(_)) => Ok(None),
                Err(e) => Err(e),
            }
        }
    }
}

/// Writes `(value, multiplicity, witness)` rows.
pub fn write_csv<W: Write>(report: &SpectrumReport, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(["value", "approx", "multiplicity", "witness"]).map_err(io)?;
    for v in &report.distinct_values {
        let value = match &v.value {
            ValueRepr::Rational { value } => value.to_string(),
            ValueRepr::Field { coords } => {
                format!("[{}]", coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "))
            }
            ValueRepr::Heuristic => String::new(),
        };
        let witness = v.witness.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        wr.write_record([value, format!("{:e}", v.approx), v.multiplicity.to_string(), witness]).map_err(io)?;
    }
    wr.flush().map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

impl SpectrumReport {
    /// Values as rationals when every value is rational.
    pub fn rational_values(&self) -> Option<Vec<Rational>> {
        self.distinct_values
            .iter()
            .map(|v| match &v.value {
                ValueRepr::Rational { value } => Some(value.clone()),
                _ => None,
            })
            .collect()
    }

    /// True when no value other than zero was certified to lie below `one`.
    pub fn min_nonzero_at_least_one(&self) -> bool {
        self.min_nonzero_abs.lower().is_some_and(|l| *l >= Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;
    use crate::forms::tests::sqrt2_example;
    use crate::numberfield::NumberField;

    #[test]
    fn split_quadratic_window() {
        let f = NumberField::parse("x^2-2").unwrap().norm_form();
        let r = enumerate_values(&f, BoxSpec::new(5), &int(10)).unwrap();
        // oracle: brute force over the box
        let mut oracle: Vec<i64> = Vec::new();
        for a in -5i64..=5 {
            for b in -5i64..=5 {
                let v = a * a - 2 * b * b;
                if (a, b) != (0, 0) && v.abs() <= 10 && !oracle.contains(&v) {
                    oracle.push(v);
                }
            }
        }
        oracle.sort();
        let got: Vec<Rational> = r.rational_values().unwrap();
        assert_eq!(got, oracle.iter().map(|&v| int(v)).collect::<Vec<_>>());
        let MinNonzero::Exact { value, witness } = &r.min_nonzero_abs else { panic!() };
        assert_eq!(value, &int(1));
        assert_eq!(witness, &vec![1, 0]);
        assert_eq!(r.all_values_integral, Some(true));
        assert!(r.zero_witness.is_none());
    }

    #[test]
    fn multiplicities_and_witnesses() {
        let f = NumberField::parse("x^2+1").unwrap().norm_form();
        let r = enumerate_values(&f, BoxSpec::new(2), &int(2)).unwrap();
        let one = &r.distinct_values[0];
        assert_eq!(one.approx, 1.0);
        assert_eq!(one.multiplicity, 4);
        assert_eq!(one.witness, vec![1, 0]);
        assert_eq!(r.distinct_values[1].multiplicity, 4);
    }

    #[test]
    fn sqrt2_example_needs_radius_ten() {
        let f = sqrt2_example();
        let b = int(10);
        let r4 = enumerate_values(&f, BoxSpec::new(4), &b).unwrap();
        let r8 = enumerate_values(&f, BoxSpec::new(8), &b).unwrap();
        let r10 = enumerate_values(&f, BoxSpec::new(10), &b).unwrap();
        let r20 = enumerate_values(&f, BoxSpec::new(20), &b).unwrap();
        assert_eq!(r4.mode, "exact");
        // (1, 0, 7) gives 7, which only enters at radius 7
        assert!(r8.distinct_values.len() > r4.distinct_values.len());
        assert!(!r4.stabilized);
        assert!(matches!(r10.stabilization, Stabilization::AnalyticBound { required_radius: 10 }));
        assert_eq!(r10.distinct_values.len(), r20.distinct_values.len());
        for (a, b) in r10.distinct_values.iter().zip(&r20.distinct_values) {
            assert_eq!(a.enclosure, b.enclosure);
        }
        assert!(r4.zero_witness.is_some());
    }

    #[test]
    fn gcd_filter_and_budget() {
        let f = DecomposableForm::from_int_linear(&[&[1, 0], &[0, 1]]).unwrap();
        let r = enumerate_values(&f, BoxSpec::with_gcd(3, 2), &int(100)).unwrap();
        assert!(r.distinct_values.iter().all(|v| v.witness.iter().all(|x| x % 2 == 0)));
        assert!(r.rational_values().unwrap().iter().all(|v| (v / int(4)).is_integer()));
        let e = enumerate_values_with_budget(&f, BoxSpec::new(10), &int(1), 100).unwrap_err();
        assert!(matches!(e, Error::BudgetExceeded { needed: 441, budget: 100 }));
        assert!(enumerate_values(&f, BoxSpec::new(0), &int(1)).is_err());
        assert!(enumerate_values(&f, BoxSpec::new(1), &int(0)).is_err());
    }

    #[test]
    fn partition_counts() {
        let p = partition_check(2, 3, 3).unwrap();
        assert!(p.tiles);
        assert_eq!(p.total_nonzero, 48);
        assert_eq!(p.counts.iter().sum::<u64>() + p.above_d_max, 48);
        assert_eq!(gcd_of(&[2, 3]), 1);
        assert_eq!(gcd_of(&[2, 4]), 2);
        let p = partition_check(2, 1, 1).unwrap();
        assert_eq!(p.counts, vec![8]);
    }

    #[test]
    fn zero_searches() {
        let f = NumberField::parse("x^2-2").unwrap().norm_form();
        assert!(rational_zero_search(&f, 50).unwrap().witness.is_none());
        let g = DecomposableForm::from_int_linear(&[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(rational_zero_search(&g, 5).unwrap().witness, Some(vec![1, 0]));
        let h = NumberField::parse("x^2+1").unwrap().norm_form();
        assert!(rational_zero_search(&h, 10).unwrap().witness.is_none());
        assert_eq!(default_zero_search_height(2), 50);
        assert_eq!(default_zero_search_height(4), 18);
    }

    #[test]
    fn csv_export() {
        let f = NumberField::parse("x^2+1").unwrap().norm_form();
        let r = enumerate_values(&f, BoxSpec::new(1), &int(2)).unwrap();
        let mut buf = Vec::new();
        write_csv(&r, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().next(), Some("value,approx,multiplicity,witness"));
        assert_eq!(s.lines().nth(1), Some("1,1e0,4,1 0"));
    }
}
