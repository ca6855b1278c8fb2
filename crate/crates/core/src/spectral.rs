//! The normalized magnetic Laplacian `Δ_σ = D_μ^{-1/2}(D − A^s)D_μ^{-1/2}`,
//! its spectrum, the heat kernel `e^{−tΔ_σ}` and numerical checks of the
//! heat-kernel inequalities.
//!
//! Complex Hermitian matrices are diagonalized through the real symmetric
//! embedding `[[A, −B], [B, A]]` of `H = A + iB`, whose spectrum is that of
//! `H` with every eigenvalue doubled.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::VertexFunction;
use crate::graph::MagneticGraph;

/// Every numerical tolerance used by the checks in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Largest allowed `|H(u,v) − conj H(v,u)|`.
    pub hermitian: f64,
    /// Relative tolerance for matching the doubled eigenvalues of the embedding.
    pub pairing: f64,
    /// `‖Δv − λv‖ ≤ residual·max(1, ‖Δ‖)`.
    pub residual: f64,
    /// Matrix identities such as the semigroup law, in max-entry norm.
    pub identity: f64,
    /// Step of the centered difference in time.
    pub fd_step: f64,
    /// Heat equation residual allowed relative to `‖ΔK‖`.
    pub fd_relative: f64,
    /// Heat equation residual allowed relative to `‖K‖`.
    pub fd_absolute: f64,
    /// Slack on pointwise inequalities (Kato, domination, positivity).
    pub pointwise: f64,
    /// Smallest allowed entry of the unsigned heat kernel, negated.
    pub nonnegative: f64,
    /// Slack on the spectral envelope `[0, 2d_μ]`.
    pub envelope: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-12,
            pairing: 1e-9,
            residual: 1e-9,
            identity: 1e-9,
            fd_step: 1e-5,
            fd_relative: 1e-6,
            fd_absolute: 1e-9,
            pointwise: 1e-10,
            nonnegative: 1e-12,
            envelope: 1e-9,
        }
    }
}

/// Whether to keep the signature or replace it by 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignatureMode {
    Signed,
    Unsigned,
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<Complex64>,
}

impl HermitianMatrix {
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(data, Tolerances::default().hermitian)
    }

    pub fn with_tolerance(data: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::InvalidArgument(format!("{}×{} matrix is not square", data.nrows(), data.ncols())));
        }
        let dev = max_abs(&(&data - data.adjoint()));
        if !(dev <= tol) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(HermitianMatrix { data })
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn get(&self, u: usize, v: usize) -> Complex64 {
        self.data[(u, v)]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }
}

/// `Δ_σ`: `d_u/μ(u)` on the diagonal and `−w_{uv}s_{uv}/√(μ(u)μ(v))` off it.
pub fn magnetic_laplacian(g: &MagneticGraph) -> HermitianMatrix {
    laplacian_with(g, SignatureMode::Signed)
}

pub fn laplacian_with(g: &MagneticGraph, mode: SignatureMode) -> HermitianMatrix {
    let n = g.n();
    let mu = g.measure();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for u in 0..n {
        m[(u, u)] = Complex64::new(g.degree(u) / mu[u], 0.0);
    }
    for e in g.edges() {
        let s = match mode {
            SignatureMode::Signed => e.sig.to_complex(),
            SignatureMode::Unsigned => Complex64::new(1.0, 0.0),
        };
        let x = -s * (e.weight / (mu[e.u] * mu[e.v]).sqrt());
        m[(e.u, e.v)] = x;
        m[(e.v, e.u)] = x.conj();
    }
    HermitianMatrix { data: m }
}

/// `D_μ^{-1}(D − A^s)`, the non-symmetric form of the same operator.
pub fn random_walk_laplacian(g: &MagneticGraph) -> DMatrix<Complex64> {
    let n = g.n();
    let mu = g.measure();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for u in 0..n {
        m[(u, u)] = Complex64::new(g.degree(u) / mu[u], 0.0);
    }
    for e in g.edges() {
        let s = e.sig.to_complex();
        m[(e.u, e.v)] = -s * e.weight / mu[e.u];
        m[(e.v, e.u)] = -s.conj() * e.weight / mu[e.v];
    }
    m
}

/// Sorted eigenvalues with orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
    /// `max_j ‖Hv_j − λ_j v_j‖`.
    pub residual: f64,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ_j φ(λ_j)·v_j v_j*`.
    pub fn apply_fn(&self, phi: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(phi(l));
        }
        scaled * v.adjoint()
    }

    /// `Σ_j φ(λ_j)·v_j (v_j* f)`.
    pub fn apply_to(&self, phi: impl Fn(f64) -> f64, f: &DVector<Complex64>) -> DVector<Complex64> {
        let mut coeffs = self.eigenvectors.adjoint() * f;
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            coeffs[j] *= phi(l);
        }
        &self.eigenvectors * coeffs
    }

    /// Largest `|⟨v_i, v_j⟩ − δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.eigenvectors.adjoint() * &self.eigenvectors - DMatrix::identity(n, n)))
    }
}

/// Full spectrum of a Hermitian matrix via the doubled real embedding.
pub fn eigendecomposition(h: &HermitianMatrix) -> Result<SpectralData> {
    eigendecomposition_with(h, &Tolerances::default())
}

pub fn eigendecomposition_with(h: &HermitianMatrix, tol: &Tolerances) -> Result<SpectralData> {
    let n = h.dim();
    if n == 0 {
        return Ok(SpectralData { eigenvalues: vec![], eigenvectors: DMatrix::zeros(0, 0), residual: 0.0 });
    }
    let a = h.data.map(|z| z.re);
    let b = h.data.map(|z| z.im);
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&a);
    m.view_mut((n, n), (n, n)).copy_from(&a);
    m.view_mut((0, n), (n, n)).copy_from(&(-&b));
    m.view_mut((n, 0), (n, n)).copy_from(&b);
    let eig = SymmetricEigen::new(m);

    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let scale = h.max_abs().max(1.0) * n as f64;
    let close = |x: f64, y: f64| (x - y).abs() <= tol.pairing * scale;

    let mut eigenvalues = Vec::with_capacity(n);
    for pair in order.chunks(2) {
        let (x, y) = (eig.eigenvalues[pair[0]], eig.eigenvalues[pair[1]]);
        if !close(x, y) {
            return Err(Error::PairingFailure(format!("embedded eigenvalues {x} and {y} do not pair up")));
        }
        eigenvalues.push(0.5 * (x + y));
    }

    // each cluster of m complex eigenvalues owns 2m real eigenvectors [x; y],
    // and x + iy spans the complex eigenspace
    let mut eigenvectors = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && close(eigenvalues[end - 1], eigenvalues[end]) {
            end += 1;
        }
        let candidates: Vec<DVector<Complex64>> = order[2 * start..2 * end]
            .iter()
            .map(|&c| {
                let col = eig.eigenvectors.column(c);
                DVector::from_fn(n, |i, _| Complex64::new(col[i], col[n + i]))
            })
            .collect();
        let basis = pivoted_gram_schmidt(candidates, end - start)?;
        for (offset, v) in basis.into_iter().enumerate() {
            eigenvectors.set_column(start + offset, &v);
        }
        start = end;
    }

    let mut residual: f64 = 0.0;
    for (j, &l) in eigenvalues.iter().enumerate() {
        let v = eigenvectors.column(j);
        let r = &h.data * v - v * Complex64::new(l, 0.0);
        residual = residual.max(r.norm());
    }
    Ok(SpectralData { eigenvalues, eigenvectors, residual })
}

/// Orthonormal basis of `want` vectors taken from `candidates`, always
/// continuing with the candidate that has the largest remaining norm.
fn pivoted_gram_schmidt(mut candidates: Vec<DVector<Complex64>>, want: usize) -> Result<Vec<DVector<Complex64>>> {
    let mut basis = Vec::with_capacity(want);
    while basis.len() < want {
        let (i, norm) = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::PairingFailure("eigenspace ran out of candidates".into()))?;
        if norm < 0.5 {
            return Err(Error::PairingFailure(format!("eigenspace has rank {} but multiplicity {want}", basis.len())));
        }
        let q = candidates.swap_remove(i) / Complex64::new(norm, 0.0);
        for c in candidates.iter_mut() {
            let proj = q.dotc(c);
            *c -= &q * proj;
        }
        basis.push(q);
    }
    Ok(basis)
}

/// Spectrum of `Δ_σ` (or the unsigned Laplacian) of `g`.
pub fn spectrum(g: &MagneticGraph, mode: SignatureMode) -> Result<SpectralData> {
    eigendecomposition(&laplacian_with(g, mode))
}

/// Eigenvalues with the envelope `2d_μ` and the balance flag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub d_mu: f64,
    pub balanced: bool,
}

pub fn spectrum_report(g: &MagneticGraph) -> Result<SpectrumReport> {
    Ok(SpectrumReport {
        eigenvalues: spectrum(g, SignatureMode::Signed)?.eigenvalues,
        d_mu: g.max_mu_degree(),
        balanced: g.is_balanced().is_balanced(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernel {
    pub t: f64,
    pub matrix: DMatrix<Complex64>,
}

/// `K_t = Σ_j e^{−λ_j t} v_j v_j*`.
pub fn heat_kernel(g: &MagneticGraph, t: f64, mode: SignatureMode) -> Result<HeatKernel> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let s = spectrum(g, mode)?;
    Ok(HeatKernel { t, matrix: kernel(&s, t) })
}

fn kernel(s: &SpectralData, t: f64) -> DMatrix<Complex64> {
    s.apply_fn(|l| (-l * t).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatCheckReport {
    pub t: f64,
    pub a: f64,
    pub hermitian_error: f64,
    pub semigroup_error: f64,
    pub delta_action_error: f64,
    pub heat_equation_residual: f64,
    pub heat_equation_tolerance: f64,
    pub unsigned_min_entry: f64,
    pub unsigned_sqrt_mu_error: f64,
    pub passed: bool,
}

/// Hermitian symmetry, `K_t = K_a K_{t−a}`, the action on point masses, the
/// heat equation `∂_t K = −ΔK` by centered differences, and nonnegativity of
/// the unsigned kernel together with `K_t√μ = √μ`.
pub fn heat_kernel_properties_check(g: &MagneticGraph, t: f64, a: f64, tol: &Tolerances) -> Result<HeatCheckReport> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if !(0.0..=t).contains(&a) {
        return Err(Error::InvalidArgument(format!("split point {a} is outside [0, {t}]")));
    }
    let lap = magnetic_laplacian(g);
    let s = eigendecomposition_with(&lap, tol)?;
    let k = kernel(&s, t);
    let hermitian_error = max_abs(&(&k - k.adjoint()));
    let semigroup_error = max_abs(&(&k - kernel(&s, a) * kernel(&s, t - a)));

    let n = g.n();
    let mut delta_action_error: f64 = 0.0;
    for u in 0..n {
        let mut e = DVector::from_element(n, Complex64::new(0.0, 0.0));
        e[u] = Complex64::new(1.0, 0.0);
        let spectral = s.apply_to(|l| (-l * t).exp(), &e);
        delta_action_error = delta_action_error.max((spectral - k.column(u)).norm());
    }

    let h = tol.fd_step;
    let derivative = (kernel(&s, t + h) - kernel(&s, t - h)) / Complex64::new(2.0 * h, 0.0);
    let lk = lap.matrix() * &k;
    let heat_equation_residual = max_abs(&(derivative + &lk));
    let heat_equation_tolerance = tol.fd_relative * max_abs(&lk) + tol.fd_absolute * max_abs(&k);

    let ku = kernel(&eigendecomposition_with(&laplacian_with(g, SignatureMode::Unsigned), tol)?, t);
    let unsigned_min_entry = ku.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let imag = ku.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let sqrt_mu = DVector::from_iterator(n, g.measure().iter().map(|m| Complex64::new(m.sqrt(), 0.0)));
    let unsigned_sqrt_mu_error = (&ku * &sqrt_mu - &sqrt_mu).camax();

    let passed = hermitian_error <= tol.identity
        && semigroup_error <= tol.identity
        && delta_action_error <= tol.identity
        && heat_equation_residual <= heat_equation_tolerance
        && unsigned_min_entry >= -tol.nonnegative
        && imag <= tol.identity
        && unsigned_sqrt_mu_error <= tol.identity;
    Ok(HeatCheckReport {
        t,
        a,
        hermitian_error,
        semigroup_error,
        delta_action_error,
        heat_equation_residual,
        heat_equation_tolerance,
        unsigned_min_entry,
        unsigned_sqrt_mu_error,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub solution: Vec<f64>,
    pub min_value: f64,
    pub passed: bool,
}

/// Solve `(Δ + λI)g = f` for the unsigned Laplacian and a nonnegative `f`,
/// and check `g ≥ 0`.
pub fn positivity_check(g: &MagneticGraph, lambda: f64, f: &[f64], tol: &Tolerances) -> Result<PositivityReport> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("resolvent parameter {lambda} must be positive")));
    }
    if f.len() != g.n() {
        return Err(Error::LengthMismatch { expected: g.n(), got: f.len() });
    }
    if let Some(x) = f.iter().find(|x| !(**x >= 0.0)) {
        return Err(Error::InvalidArgument(format!("right-hand side has negative entry {x}")));
    }
    let s = spectrum(g, SignatureMode::Unsigned)?;
    if let Some(l) = s.eigenvalues.iter().find(|&&l| !(l + lambda > 0.0)) {
        return Err(Error::SingularSolve(format!("Δ + λI has eigenvalue {}", l + lambda)));
    }
    let rhs = DVector::from_iterator(f.len(), f.iter().map(|&x| Complex64::new(x, 0.0)));
    let sol = s.apply_to(|l| 1.0 / (l + lambda), &rhs);
    let solution: Vec<f64> = sol.iter().map(|z| z.re).collect();
    let min_value = solution.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PositivityReport { passed: min_value >= -tol.pointwise, min_value, solution })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseReport {
    /// Largest excess of the left side over the right side (negative when
    /// the inequality holds strictly everywhere).
    pub max_violation: f64,
    pub passed: bool,
}

fn to_vector(f: &VertexFunction) -> DVector<Complex64> {
    DVector::from_column_slice(f.values())
}

/// `|f|(u)·(Δ|f|)(u) ≤ Re((Δ_σ f)(u)·conj f(u))` at every vertex.
pub fn kato_check(g: &MagneticGraph, f: &VertexFunction, tol: &Tolerances) -> Result<PointwiseReport> {
    if f.len() != g.n() {
        return Err(Error::LengthMismatch { expected: g.n(), got: f.len() });
    }
    let v = to_vector(f);
    let m = to_vector(&f.modulus());
    let signed = magnetic_laplacian(g).matrix() * &v;
    let unsigned = laplacian_with(g, SignatureMode::Unsigned).matrix() * &m;
    let max_violation =
        (0..g.n()).map(|u| m[u].re * unsigned[u].re - (signed[u] * v[u].conj()).re).fold(f64::NEG_INFINITY, f64::max);
    Ok(PointwiseReport { max_violation, passed: max_violation <= tol.pointwise })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    /// `max_u |e^{−tΔ_σ}f|(u) − (e^{−tΔ}|f|)(u)`.
    pub function_violation: f64,
    /// `max_{u,v} |K^σ_t(u,v)| − K_t(u,v)`.
    pub kernel_violation: f64,
    pub passed: bool,
}

/// `|e^{−tΔ_σ}f| ≤ e^{−tΔ}|f|` pointwise and `|K^σ_t| ≤ K_t` entrywise.
pub fn domination_check(g: &MagneticGraph, t: f64, f: &VertexFunction, tol: &Tolerances) -> Result<DominationReport> {
    if f.len() != g.n() {
        return Err(Error::LengthMismatch { expected: g.n(), got: f.len() });
    }
    let ks = heat_kernel(g, t, SignatureMode::Signed)?.matrix;
    let ku = heat_kernel(g, t, SignatureMode::Unsigned)?.matrix;
    let lhs = &ks * to_vector(f);
    let rhs = &ku * to_vector(&f.modulus());
    let function_violation = (0..g.n()).map(|u| lhs[u].norm() - rhs[u].re).fold(f64::NEG_INFINITY, f64::max);
    let kernel_violation = ks.iter().zip(ku.iter()).map(|(a, b)| a.norm() - b.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(DominationReport {
        function_violation,
        kernel_violation,
        passed: function_violation <= tol.pointwise && kernel_violation <= tol.pointwise,
    })
}

/// `C_δ = (72·δ·d_μ)^{δ/2} / c_δ^δ · ((δ−1)/(δ−2))^δ`.
pub fn trace_constant(delta: f64, c_delta: f64, d_mu: f64) -> Result<f64> {
    if !(delta > 2.0) || delta.is_infinite() {
        return Err(Error::BadDelta { delta, min: 2.0 });
    }
    if !(c_delta > 0.0) || !c_delta.is_finite() {
        return Err(Error::ZeroConstant);
    }
    Ok((72.0 * delta * d_mu).powf(delta / 2.0) / c_delta.powf(delta) * ((delta - 1.0) / (delta - 2.0)).powf(delta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    /// `Σ_j e^{−λ_j t}`.
    pub trace: f64,
    /// `C_δ·vol_μ(G)/t^{δ/2}`.
    pub bound: f64,
    /// `max_u K^σ_t(u,u)·t^{δ/2}/(C_δ μ(u))`; at most 1 when the diagonal bound holds.
    pub max_diagonal_ratio: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub delta: f64,
    pub c_delta: f64,
    pub constant: f64,
    pub volume: f64,
    pub rows: Vec<TraceRow>,
    pub passed: bool,
}

/// `Σ_j e^{−λ_j t} ≤ C_δ·vol_μ(G)/t^{δ/2}` and `K^σ_t(u,u) ≤ C_δ μ(u)/t^{δ/2}`
/// at every time in `t_grid`.
pub fn trace_bound_check(g: &MagneticGraph, delta: f64, c_delta: f64, t_grid: &[f64]) -> Result<TraceReport> {
    let constant = trace_constant(delta, c_delta, g.max_mu_degree())?;
    if let Some(&t) = t_grid.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::NegativeTime(t));
    }
    let s = spectrum(g, SignatureMode::Signed)?;
    let volume = g.total_volume();
    let rows: Vec<TraceRow> = t_grid
        .iter()
        .map(|&t| {
            let trace: f64 = s.eigenvalues.iter().map(|l| (-l * t).exp()).sum();
            let decay = t.powf(delta / 2.0);
            let bound = constant * volume / decay;
            let k = kernel(&s, t);
            let max_diagonal_ratio =
                (0..g.n()).map(|u| k[(u, u)].re * decay / (constant * g.measure()[u])).fold(0.0, f64::max);
            TraceRow { t, trace, bound, max_diagonal_ratio, passed: trace <= bound && max_diagonal_ratio <= 1.0 }
        })
        .collect();
    Ok(TraceReport { delta, c_delta, constant, volume, passed: rows.iter().all(|r| r.passed), rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueBoundReport {
    pub k: usize,
    pub lambda_k: f64,
    /// `(δ/2e)·(k/(C_δ·vol_μ(G)))^{2/δ}`.
    pub bound: f64,
    pub passed: bool,
}

/// `λ_k ≥ (δ/2e)·(k/(C_δ·vol_μ(G)))^{2/δ}` for the `k`-th smallest
/// eigenvalue, `k` counted from 1.
pub fn eigenvalue_lower_bound_check(
    g: &MagneticGraph,
    delta: f64,
    c_delta: f64,
    k: usize,
) -> Result<EigenvalueBoundReport> {
    let constant = trace_constant(delta, c_delta, g.max_mu_degree())?;
    if k == 0 || k > g.n() {
        return Err(Error::InvalidArgument(format!("eigenvalue index {k} is outside 1..={}", g.n())));
    }
    let s = spectrum(g, SignatureMode::Signed)?;
    let lambda_k = s.eigenvalues[k - 1];
    let bound = delta / (2.0 * std::f64::consts::E) * (k as f64 / (constant * g.total_volume())).powf(2.0 / delta);
    Ok(EigenvalueBoundReport { k, lambda_k, bound, passed: lambda_k >= bound })
}
