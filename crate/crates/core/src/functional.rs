//! Truncation functions, the averaging lemmas behind the coarea inequality,
//! discrete Sobolev quotients and the complex Bernoulli inequality.
//!
//! The Sobolev constants carry the coarea factor `K`, which is 3 for
//! `S¹ₖ`-signatures and 2 for `S¹`. The general-`p` inequality is checked with
//! `C = 2·d_μ^{1/p′}·((δ−1)p/(δ−p))·(K/c_δ)`, which collapses to twice the
//! `p = 1` constant at `p = 1`. The balanced-graph version, with an infimum
//! of `‖f − zτ‖` over `z ∈ ℂ`, is not implemented.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{frustration, FrustrationMode, DEFAULT_BUDGET};
use crate::graph::{MagneticGraph, VertexSet};
use crate::group::{chord_table, GroupElement};
use crate::isoperimetry::{isoperimetric, Dimension, IsoperimetricResult, IsoperimetryOptions};

/// Default number of midpoint panels for the angular integral.
pub const DEFAULT_N_THETA: usize = 4096;

/// Slack on the `satisfied` flag of a [`QuotientReport`].
pub const SOBOLEV_SLACK: f64 = 1e-9;

const DISK_TOL: f64 = 1e-12;

/// A complex-valued function on the vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Parts", into = "Parts")]
pub struct VertexFunction {
    values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct Parts {
    re: Vec<f64>,
    #[serde(default)]
    im: Option<Vec<f64>>,
}

impl TryFrom<Parts> for VertexFunction {
    type Error = Error;

    fn try_from(p: Parts) -> Result<Self> {
        VertexFunction::from_parts(&p.re, p.im.as_deref())
    }
}

impl From<VertexFunction> for Parts {
    fn from(f: VertexFunction) -> Self {
        Parts { re: f.values.iter().map(|z| z.re).collect(), im: Some(f.values.iter().map(|z| z.im).collect()) }
    }
}

impl VertexFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if let Some(z) = values.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite function value {z}")));
        }
        Ok(VertexFunction { values })
    }

    /// Real and imaginary parts; a missing imaginary part means a real function.
    pub fn from_parts(re: &[f64], im: Option<&[f64]>) -> Result<Self> {
        let values = match im {
            Some(im) if im.len() != re.len() => {
                return Err(Error::LengthMismatch { expected: re.len(), got: im.len() })
            }
            Some(im) => re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect(),
            None => re.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        };
        Self::new(values)
    }

    pub fn real(values: &[f64]) -> Result<Self> {
        Self::from_parts(values, None)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// `|f|` as a real function.
    pub fn modulus(&self) -> VertexFunction {
        VertexFunction { values: self.values.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect() }
    }

    /// `f / max|f|`.
    pub fn normalized(&self) -> Result<VertexFunction> {
        let m = self.max_modulus();
        if m == 0.0 {
            return Err(Error::ZeroFunction);
        }
        Ok(VertexFunction { values: self.values.iter().map(|z| z / m).collect() })
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::BadT(t));
    }
    Ok(())
}

fn check_disk(z: Complex64) -> Result<()> {
    if !(z.norm() <= 1.0 + DISK_TOL) {
        return Err(Error::OutsideDisk(z));
    }
    Ok(())
}

fn check_len(g: &MagneticGraph, f: &VertexFunction) -> Result<()> {
    if f.len() != g.n() {
        return Err(Error::LengthMismatch { expected: g.n(), got: f.len() });
    }
    Ok(())
}

/// Index `j` of the sector `[θ + 2πj/k, θ + 2π(j+1)/k)` containing the angle `arg`.
fn sector_index(arg: f64, theta: f64, k: u32) -> u32 {
    let a = (arg - theta).rem_euclid(TAU);
    ((a / TAU * k as f64).floor() as u32).min(k - 1)
}

/// `Y_{t,θ}(z)`: zero inside the disk of radius `t`, otherwise the root of
/// unity `ξʲ` labelling the sector of angle `2π/k` (offset by `θ`) that
/// contains `arg z`.
pub fn sector_function(z: Complex64, t: f64, theta: f64, k: u32) -> Result<Complex64> {
    check_t(t)?;
    check_disk(z)?;
    if k == 0 {
        return Err(Error::InvalidArgument("cyclic group order must be at least 1".into()));
    }
    if z.norm() < t {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(GroupElement::cyclic(sector_index(z.arg(), theta, k) as i64, k)?.to_complex())
}

/// `X_t(z) = z/|z|` when `|z| ≥ t`, else 0.
pub fn radial_function(z: Complex64, t: f64) -> Result<Complex64> {
    check_t(t)?;
    check_disk(z)?;
    let r = z.norm();
    Ok(if r < t { Complex64::new(0.0, 0.0) } else { z / r })
}

/// `⌊x⌋` for `|x| < 2⁶³` through truncation, which unlike `f64::floor` does
/// not need a library call on baseline x86-64.
#[inline]
fn floor(x: f64) -> f64 {
    let t = x as i64 as f64;
    if t > x {
        t - 1.0
    } else {
        t
    }
}

/// `(1/2π)∫₀^{2π}∫₀¹ |Y_{t,θ}(z₁) − Y_{t,θ}(z₂)| dt dθ`.
///
/// For fixed `θ` the `t`-integral is exact: `min(|z₁|,|z₂|)·|ξ^{j₁} − ξ^{j₂}|
/// + ||z₁| − |z₂||`. The `θ`-integral uses the midpoint rule on `n_theta`
/// panels; see [`key_average_quadrature_bound`] for its error.
pub fn key_average_cyclic(z1: Complex64, z2: Complex64, k: u32, n_theta: usize) -> Result<f64> {
    check_disk(z1)?;
    check_disk(z2)?;
    if k == 0 || n_theta == 0 {
        return Err(Error::InvalidArgument("k and n_theta must be positive".into()));
    }
    let (r1, r2) = (z1.norm(), z2.norm());
    let (lo, hi) = (r1.min(r2), r1.max(r2));
    if lo == 0.0 {
        return Ok(hi);
    }
    // sector of arg z at offset θ is ⌊(arg z − θ)·k/2π⌋ mod k
    let chords = chord_table(k);
    let (s1, s2) = (z1.arg() / TAU * k as f64, z2.arg() / TAU * k as f64);
    let kf = k as f64;
    let step = kf / n_theta as f64;
    let sum: f64 = (0..n_theta)
        .map(|i| {
            let c = (i as f64 + 0.5) * step;
            let mut d = floor(s1 - c) - floor(s2 - c);
            if d < 0.0 {
                d += kf;
            } else if d >= kf {
                d -= kf;
            }
            chords[d as usize]
        })
        .sum();
    Ok(lo * sum / n_theta as f64 + (hi - lo))
}

/// Error bound for [`key_average_cyclic`]: the integrand has at most `2k`
/// jumps in `θ`, each of size at most `2·min(|z₁|,|z₂|)`.
pub fn key_average_quadrature_bound(z1: Complex64, z2: Complex64, k: u32, n_theta: usize) -> f64 {
    2.0 * k as f64 * 2.0 * z1.norm().min(z2.norm()) / n_theta as f64
}

/// `∫₀¹ |X_t(z₁) − X_t(z₂)| dt` in closed form.
pub fn key_average_circle(z1: Complex64, z2: Complex64) -> Result<f64> {
    check_disk(z1)?;
    check_disk(z2)?;
    let (a, b) = if z1.norm() >= z2.norm() { (z1, z2) } else { (z2, z1) };
    let (ra, rb) = (a.norm(), b.norm());
    if rb == 0.0 {
        return Ok(ra);
    }
    Ok((a / ra - b / rb).norm() * rb + (ra - rb))
}

/// `∫₀¹ [ι({|f| ≥ t}) + |E({|f| ≥ t}, {|f| ≥ t}ᶜ)|] dt`, evaluated exactly
/// as a finite sum over the distinct values of `|f|`. Requires `max|f| = 1`.
pub fn coarea_lhs(g: &MagneticGraph, f: &VertexFunction) -> Result<f64> {
    coarea_lhs_with(g, f, FrustrationMode::Exact { budget: DEFAULT_BUDGET })
}

pub fn coarea_lhs_with(g: &MagneticGraph, f: &VertexFunction, mode: FrustrationMode) -> Result<f64> {
    check_len(g, f)?;
    if g.n() > VertexSet::MAX_VERTICES {
        return Err(Error::InvalidArgument(format!("at most {} vertices", VertexSet::MAX_VERTICES)));
    }
    let m = f.max_modulus();
    if (m - 1.0).abs() > DISK_TOL {
        return Err(Error::NotNormalized(m));
    }
    let moduli: Vec<f64> = f.values().iter().map(|z| z.norm()).collect();
    let mut levels: Vec<f64> = moduli.iter().copied().filter(|&r| r > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut total = 0.0;
    let mut prev = 0.0;
    for &t in &levels {
        let set = VertexSet::from_vertices((0..g.n()).filter(|&u| moduli[u] >= t))?;
        let iota = match cache.get(&set.mask()) {
            Some(&v) => v,
            None => {
                let v = frustration(g, set, mode)?.value;
                cache.insert(set.mask(), v);
                v
            }
        };
        total += (t - prev) * (iota + g.boundary_measure(set));
        prev = t;
    }
    Ok(total)
}

/// `Σ_{{u,v}∈E} w_{uv}|f(u) − s_{uv}f(v)|^p`.
pub fn signed_gradient_norm(g: &MagneticGraph, f: &VertexFunction, p: f64) -> Result<f64> {
    check_len(g, f)?;
    let v = f.values();
    Ok(g.edges().iter().map(|e| e.weight * (v[e.u] - e.sig.to_complex() * v[e.v]).norm().powf(p)).sum())
}

/// `(Σ_u |f(u)|^r μ(u))^{1/r}`.
pub fn measure_norm(g: &MagneticGraph, f: &VertexFunction, r: f64) -> Result<f64> {
    check_len(g, f)?;
    let s: f64 = f.values().iter().zip(g.measure()).map(|(z, m)| z.norm().powf(r) * m).sum();
    Ok(s.powf(1.0 / r))
}

/// `(Σw|f(u) − s f(v)|^p)^{1/p} / ‖f‖_{q,μ}`.
pub fn sobolev_quotient(g: &MagneticGraph, f: &VertexFunction, p: f64, q: f64) -> Result<f64> {
    Ok(signed_gradient_norm(g, f, p)?.powf(1.0 / p) / measure_norm(g, f, q)?)
}

/// Which inequality to check, with the constant it depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SobolevMode {
    /// `‖f‖_{δ/(δ−1)} ≤ (K/c_δ)·Σw|f(u) − s f(v)|`.
    IsoP1 { delta: f64, c_delta: f64 },
    /// `‖f‖_q ≤ C·(Σw|·|^p)^{1/p}` with `1/p = 1/q + 1/δ`.
    IsoGeneral { p: f64, delta: f64, c_delta: f64 },
    /// `Σ|f|μ ≤ (K/h)·Σw|f(u) − s f(v)|`.
    CheegerP1 { h: f64 },
    /// `‖f‖_p ≤ (2Kp·d_μ^{1/p′}/h)·(Σw|·|^p)^{1/p}`.
    CheegerP { p: f64, h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuotientReport {
    pub p: f64,
    pub q: f64,
    /// `(Σw|f(u) − s f(v)|^p)^{1/p}`.
    pub numerator: f64,
    /// `‖f‖_{q,μ}`.
    pub denominator: f64,
    pub quotient: f64,
    /// The Sobolev constant `C`; the inequality reads `quotient ≥ 1/C`.
    pub constant: f64,
    pub bound_low: f64,
    pub bound_high: f64,
    pub satisfied: bool,
}

/// `d_μ^{1/p′}` with `1/p′ = 1 − 1/p`.
fn degree_factor(g: &MagneticGraph, p: f64) -> f64 {
    g.max_mu_degree().powf(1.0 - 1.0 / p)
}

fn check_constant(c: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::ZeroConstant);
    }
    Ok(())
}

pub fn verify_sobolev(g: &MagneticGraph, f: &VertexFunction, mode: SobolevMode) -> Result<QuotientReport> {
    check_len(g, f)?;
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let k = g.group().coarea_factor();
    let exponent_error = |msg: String| Err(Error::BadExponents(msg));
    let (p, q, constant) = match mode {
        SobolevMode::IsoP1 { delta, c_delta } => {
            if !(delta > 1.0) {
                return Err(Error::BadDelta { delta, min: 1.0 });
            }
            check_constant(c_delta)?;
            let q = if delta.is_infinite() { 1.0 } else { delta / (delta - 1.0) };
            (1.0, q, k / c_delta)
        }
        SobolevMode::IsoGeneral { p, delta, c_delta } => {
            if !(delta > 1.0) {
                return Err(Error::BadDelta { delta, min: 1.0 });
            }
            if !(p >= 1.0 && p < delta) {
                return exponent_error(format!("need 1 ≤ p < δ, got p = {p}, δ = {delta}"));
            }
            check_constant(c_delta)?;
            let (q, ratio) =
                if delta.is_infinite() { (p, p) } else { (delta * p / (delta - p), (delta - 1.0) * p / (delta - p)) };
            (p, q, 2.0 * degree_factor(g, p) * ratio * k / c_delta)
        }
        SobolevMode::CheegerP1 { h } => {
            check_constant(h)?;
            (1.0, 1.0, k / h)
        }
        SobolevMode::CheegerP { p, h } => {
            if !(p >= 1.0) || !p.is_finite() {
                return exponent_error(format!("need finite p ≥ 1, got {p}"));
            }
            check_constant(h)?;
            (p, p, 2.0 * k * p * degree_factor(g, p) / h)
        }
    };
    let numerator = signed_gradient_norm(g, f, p)?.powf(1.0 / p);
    let denominator = measure_norm(g, f, q)?;
    let quotient = numerator / denominator;
    let bound_low = 1.0 / constant;
    Ok(QuotientReport {
        p,
        q,
        numerator,
        denominator,
        quotient,
        constant,
        bound_low,
        bound_high: f64::INFINITY,
        satisfied: quotient >= bound_low - SOBOLEV_SLACK,
    })
}

/// `f = χ_{V₁}·τ*` for the minimizing subset `V₁` and an optimal switching
/// `τ*` on it, together with the constant it realizes.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub function: VertexFunction,
    pub result: IsoperimetricResult,
}

/// The `L¹`-quotient (for `δ = ∞`) or `δ/(δ−1)`-quotient of the certificate
/// equals the computed constant exactly.
pub fn extremal_certificate(g: &MagneticGraph, delta: Dimension, opts: &IsoperimetryOptions) -> Result<Certificate> {
    let result = isoperimetric(g, delta, opts)?;
    let set = result.argmin.subset;
    let tau = frustration(g, set, opts.frustration)?.minimizer;
    let values = (0..g.n())
        .map(|u| match (set.contains(u), tau.get(u)) {
            (true, Some(t)) => t.to_complex(),
            _ => Complex64::new(0.0, 0.0),
        })
        .collect();
    Ok(Certificate { function: VertexFunction::new(values)?, result })
}

/// Random local search for a small `(p, q)` Sobolev quotient, started from
/// the Cheeger certificate. Returns an upper bound on the infimum.
pub fn quotient_infimum_search(
    g: &MagneticGraph,
    p: f64,
    q: f64,
    budget: usize,
    seed: u64,
) -> Result<(VertexFunction, f64)> {
    if !(p >= 1.0 && q >= 1.0) {
        return Err(Error::BadExponents(format!("need p, q ≥ 1, got p = {p}, q = {q}")));
    }
    let opts = IsoperimetryOptions::default();
    let mut best = extremal_certificate(g, Dimension::Infinite, &opts)?.function;
    let mut best_q = sobolev_quotient(g, &best, p, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scale = 0.5;
    let mut values = best.values().to_vec();
    for _ in 0..budget {
        let u = rng.random_range(0..g.n());
        let old = values[u];
        let step = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
        values[u] = if rng.random::<f64>() < 0.05 { Complex64::new(0.0, 0.0) } else { old + step };
        let trial = VertexFunction { values: values.clone() };
        let qv = if trial.is_zero() { f64::INFINITY } else { sobolev_quotient(g, &trial, p, q)? };
        if qv < best_q {
            best_q = qv;
            best = trial;
            scale = (scale * 1.2).min(1.0);
        } else {
            values[u] = old;
            scale = (scale * 0.98).max(1e-4);
        }
    }
    Ok((best, best_q))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(Error::BadAlpha(alpha));
    }
    Ok(())
}

/// `z·|z|^{α−1}`, i.e. `r^α e^{iθ}` for `z = r e^{iθ}`.
pub fn complex_power(z: Complex64, alpha: f64) -> Result<Complex64> {
    check_alpha(alpha)?;
    let r = z.norm();
    Ok(if r == 0.0 { z } else { z * r.powf(alpha - 1.0) })
}

/// `|z₁^α − z₂^α| ≤ α|z₁ − z₂|(|z₁|^{α−1} + |z₂|^{α−1})` within `1e−12`.
pub fn bernoulli_check(z1: Complex64, z2: Complex64, alpha: f64) -> Result<bool> {
    let lhs = (complex_power(z1, alpha)? - complex_power(z2, alpha)?).norm();
    let rhs = alpha * (z1 - z2).norm() * (z1.norm().powf(alpha - 1.0) + z2.norm().powf(alpha - 1.0));
    Ok(lhs <= rhs + 1e-12)
}
