//! Signed Cheeger constants and isoperimetric constants by subset enumeration.
//!
//! For a dimension `δ ∈ (1, ∞]` the constant is
//! `c_δ = min_{∅≠V₁⊆V} [ι(V₁) + |E(V₁,V₁ᶜ)|] / vol_μ(V₁)^((δ−1)/δ)`,
//! with exponent 1 at `δ = ∞` (the one-way Cheeger constant `h`). Balanced
//! graphs give 0 because `V₁ = V` has neither frustration nor boundary.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gauge::{frustration, FrustrationMode, DEFAULT_BUDGET};
use crate::graph::{CutReport, MagneticGraph, VertexSet};
use crate::group::GroupElement;

/// Default cap on the number of vertices for subset enumeration.
pub const DEFAULT_MAX_VERTICES: usize = 14;

const TIE_TOL: f64 = 1e-12;

/// Isoperimetric dimension `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dimension {
    Finite(f64),
    Infinite,
}

impl Dimension {
    pub fn finite(delta: f64) -> Result<Self> {
        if !(delta > 1.0) || delta.is_nan() {
            return Err(Error::BadDelta { delta, min: 1.0 });
        }
        Ok(if delta.is_infinite() { Dimension::Infinite } else { Dimension::Finite(delta) })
    }

    /// Volume exponent `(δ−1)/δ`, or 1 at infinity.
    pub fn exponent(self) -> f64 {
        match self {
            Dimension::Finite(d) => (d - 1.0) / d,
            Dimension::Infinite => 1.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Dimension::Finite(d) => d,
            Dimension::Infinite => f64::INFINITY,
        }
    }
}

impl FromStr for Dimension {
    type Err = Error;

    /// A real number `> 1`, or one of `inf`, `infinity`, `∞`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "+inf") || t == "∞" {
            return Ok(Dimension::Infinite);
        }
        let d: f64 = t.parse().map_err(|_| Error::Parse(format!("invalid dimension {s:?}")))?;
        Dimension::finite(d)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Finite(d) => write!(f, "{d}"),
            Dimension::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoperimetryOptions {
    pub frustration: FrustrationMode,
    pub max_vertices: usize,
    /// Keep a [`CutReport`] for every subset (disables pruning).
    pub profile: bool,
}

impl Default for IsoperimetryOptions {
    fn default() -> Self {
        IsoperimetryOptions {
            frustration: FrustrationMode::Exact { budget: DEFAULT_BUDGET },
            max_vertices: DEFAULT_MAX_VERTICES,
            profile: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsoperimetricResult {
    pub delta: Dimension,
    /// `c_δ`, or `h` when `δ = ∞`.
    pub constant: f64,
    pub argmin: CutReport,
    pub profile: Option<Vec<CutReport>>,
    /// False when frustration indices came from the heuristic, in which case
    /// `constant` is only an upper bound.
    pub exact: bool,
}

/// Nonempty subsets of `0..n` by increasing size, lexicographic within a size.
pub fn subsets_in_order(n: usize) -> Vec<VertexSet> {
    (1..=n).flat_map(|size| (0..n).combinations(size).map(|c| VertexSet::from_vertices(c).expect("n ≤ 64"))).collect()
}

fn check_size(g: &MagneticGraph, max_vertices: usize) -> Result<()> {
    let cap = max_vertices.min(VertexSet::MAX_VERTICES);
    if g.n() > cap {
        return Err(Error::BudgetExceeded { required: 1u128 << g.n().min(127), budget: 1u128 << cap });
    }
    if g.n() == 0 {
        return Err(Error::InvalidArgument("graph has no vertices".into()));
    }
    Ok(())
}

fn quotient(frustration: f64, boundary: f64, volume: f64, delta: Dimension) -> f64 {
    (frustration + boundary) / volume.powf(delta.exponent())
}

/// First minimum in enumeration order, ties within `1e-12` resolved to the
/// earlier subset.
fn select_argmin<'a>(reports: impl Iterator<Item = &'a CutReport>) -> CutReport {
    let mut best: Option<CutReport> = None;
    for r in reports {
        if best.is_none_or(|b| r.objective < b.objective - TIE_TOL) {
            best = Some(*r);
        }
    }
    best.expect("at least one subset")
}

/// `h`, the one-way signed Cheeger constant, with default options.
pub fn cheeger_constant(g: &MagneticGraph) -> Result<IsoperimetricResult> {
    isoperimetric(g, Dimension::Infinite, &IsoperimetryOptions::default())
}

/// `c_δ` for a finite `δ > 1`, with default options.
pub fn isoperimetric_constant(g: &MagneticGraph, delta: f64) -> Result<IsoperimetricResult> {
    isoperimetric(g, Dimension::finite(delta)?, &IsoperimetryOptions::default())
}

/// The best isoperimetric constant for dimension `delta`.
///
/// Without `profile`, subsets whose boundary term alone already exceeds the
/// quotient of `V` are skipped: their quotient cannot be minimal.
pub fn isoperimetric(g: &MagneticGraph, delta: Dimension, opts: &IsoperimetryOptions) -> Result<IsoperimetricResult> {
    check_size(g, opts.max_vertices)?;
    let all = VertexSet::full(g.n());
    let subsets = subsets_in_order(g.n());
    let mode = opts.frustration;

    let evaluate = |set: VertexSet| -> Result<CutReport> {
        let iota = frustration(g, set, mode)?.value;
        let (b, v) = (g.boundary_measure(set), g.volume(set));
        Ok(CutReport { subset: set, frustration: iota, boundary: b, volume: v, objective: quotient(iota, b, v, delta) })
    };

    let reports: Vec<CutReport> = if opts.profile {
        subsets.par_iter().map(|&s| evaluate(s)).collect::<Result<Vec<_>>>()?
    } else {
        let whole = evaluate(all)?.objective;
        let cutoff = whole + 1e-9 * (1.0 + whole);
        subsets
            .par_iter()
            .map(|&s| {
                let lower = g.boundary_measure(s) / g.volume(s).powf(delta.exponent());
                if lower > cutoff {
                    Ok(None)
                } else {
                    evaluate(s).map(Some)
                }
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect()
    };
    let argmin = select_argmin(reports.iter());
    Ok(IsoperimetricResult {
        delta,
        constant: argmin.objective,
        argmin,
        profile: opts.profile.then_some(reports),
        exact: mode.is_exact(),
    })
}

/// Frustration, boundary and volume of every nonempty subset, computed once
/// so that constants for several dimensions can be read off cheaply.
#[derive(Debug, Clone)]
pub struct SubsetTable {
    rows: Vec<CutReport>,
    exact: bool,
}

impl SubsetTable {
    pub fn compute(g: &MagneticGraph, opts: &IsoperimetryOptions) -> Result<Self> {
        check_size(g, opts.max_vertices)?;
        let mode = opts.frustration;
        let rows = subsets_in_order(g.n())
            .par_iter()
            .map(|&set| {
                let iota = frustration(g, set, mode)?.value;
                Ok(g.cut_report(set, iota, f64::NAN))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubsetTable { rows, exact: mode.is_exact() })
    }

    pub fn rows(&self) -> &[CutReport] {
        &self.rows
    }

    pub fn frustration_of(&self, set: VertexSet) -> Option<f64> {
        self.rows.iter().find(|r| r.subset == set).map(|r| r.frustration)
    }

    pub fn constant(&self, delta: Dimension) -> IsoperimetricResult {
        let reports: Vec<CutReport> = self
            .rows
            .iter()
            .map(|r| CutReport { objective: quotient(r.frustration, r.boundary, r.volume, delta), ..*r })
            .collect();
        let argmin = select_argmin(reports.iter());
        IsoperimetricResult { delta, constant: argmin.objective, argmin, profile: Some(reports), exact: self.exact }
    }
}

/// Outcome of checking `(1/3)Σh(Gⱼ) ≤ h(G₁×…×G_m) ≤ 3Σh(Gⱼ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductReport {
    pub factor_constants: Vec<f64>,
    pub sum: f64,
    pub product_constant: f64,
    pub lower: f64,
    pub upper: f64,
    /// `product_constant − lower`.
    pub lower_margin: f64,
    /// `upper − product_constant`.
    pub upper_margin: f64,
    pub holds: bool,
    /// False when some constant is only a heuristic upper bound.
    pub exact: bool,
}

/// Compute every factor's Cheeger constant and that of their product.
pub fn verify_product_additivity(factors: &[MagneticGraph], opts: &IsoperimetryOptions) -> Result<ProductReport> {
    let product = MagneticGraph::product_of(factors)?;
    let opts = IsoperimetryOptions { profile: false, ..*opts };
    let mut exact = true;
    let mut factor_constants = Vec::with_capacity(factors.len());
    for f in factors {
        let r = isoperimetric(f, Dimension::Infinite, &opts)?;
        exact &= r.exact;
        factor_constants.push(r.constant);
    }
    let p = isoperimetric(&product, Dimension::Infinite, &opts)?;
    exact &= p.exact;
    let sum: f64 = factor_constants.iter().sum();
    let (lower, upper) = (sum / 3.0, 3.0 * sum);
    let slack = 1e-9 * (1.0 + upper);
    Ok(ProductReport {
        factor_constants,
        sum,
        product_constant: p.constant,
        lower,
        upper,
        lower_margin: p.constant - lower,
        upper_margin: upper - p.constant,
        holds: lower <= p.constant + slack && p.constant <= upper + slack,
        exact,
    })
}

/// Certified interval `(Σ|1−σⱼ|/nⱼ / 3, 3Σ|1−σⱼ|/nⱼ)` for the Cheeger
/// constant of a product of unit-weight cycles with `μ ≡ 1`.
pub fn torus_cheeger_bounds(lengths: &[usize], signatures: &[GroupElement]) -> Result<(f64, f64)> {
    if lengths.len() != signatures.len() {
        return Err(Error::InvalidArgument(format!(
            "{} cycle lengths but {} signatures",
            lengths.len(),
            signatures.len()
        )));
    }
    if let Some(n) = lengths.iter().find(|&&n| n < 3) {
        return Err(Error::InvalidArgument(format!("cycle length {n} is below 3")));
    }
    let sum: f64 = lengths.iter().zip(signatures).map(|(&n, s)| s.distance_to_one() / n as f64).sum();
    Ok((sum / 3.0, 3.0 * sum))
}

/// Closed forms for a unit-weight cycle `Cₙ` with signature `σ` and `μ ≡ 1`:
/// `ι = |1−σ|`, `h = |1−σ|/n`, `c_δ = |1−σ|/n^((δ−1)/δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleClosedForm {
    pub iota: f64,
    pub h: f64,
    pub c_delta: f64,
}

pub fn cycle_closed_form(n: usize, sigma: &GroupElement, delta: Dimension) -> Result<CycleClosedForm> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("cycle length {n} is below 3")));
    }
    let iota = sigma.distance_to_one();
    let nf = n as f64;
    Ok(CycleClosedForm { iota, h: iota / nf, c_delta: iota / nf.powf(delta.exponent()) })
}
