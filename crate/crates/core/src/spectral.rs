//! Rayleigh–Ritz computation of the lowest eigenvalue of `-Δ_ϑ - Φ` on
//! S^{d-1}, and the check of that eigenvalue against the α(μ) bound.
//!
//! The axisymmetric path expands in orthonormal Gegenbauer polynomials
//! `C_l^{(d-2)/2}(cos θ)`, which diagonalize `-Δ_ϑ` with eigenvalues
//! `l(l+d-2)`. For d = 3 a second path uses real spherical harmonics and
//! accepts weights depending on both angles.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::alpha_mu::AlphaMuCurve;
use crate::error::{Error, Result};
use crate::quadrature::JacobiRecurrence;
use crate::sphere::{self, unit_sphere_measure, QuadratureRule, RuleKind, SphereDim};
use crate::weights::{self, WeightSpec};

pub const DEFAULT_DEGREE: usize = 64;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Allowed negative slack in the eigenvalue bound check.
pub const BOUND_TOLERANCE: f64 = 1e-6;

/// Eigenvalue of `-Δ_ϑ` on degree-`l` harmonics of S^{d-1}.
pub fn laplace_beltrami_eigenvalue(l: usize, d: usize) -> f64 {
    (l * (l + d - 2)) as f64
}

/// Axisymmetric harmonics `b_0, ..., b_L`, orthonormal in `L²(S^{d-1}, dϑ)`.
#[derive(Debug, Clone)]
pub struct GegenbauerBasis {
    d: SphereDim,
    degree: usize,
    rec: JacobiRecurrence,
    scale: f64,
}

impl GegenbauerBasis {
    pub fn new(d: usize, degree: usize) -> Result<Self> {
        let dim = SphereDim::hardy(d)?;
        let a = 0.5 * (dim.as_f64() - 3.0);
        Ok(Self {
            d: dim,
            degree,
            rec: JacobiRecurrence::new(degree + 1, a, a),
            scale: 1.0 / unit_sphere_measure(dim.as_f64() - 1.0).sqrt(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> SphereDim {
        self.d
    }

    /// `b_0(θ), ..., b_L(θ)`.
    pub fn eval(&self, theta: f64, out: &mut Vec<f64>) {
        self.rec.eval_all(theta.cos(), self.degree, out);
        for v in out.iter_mut() {
            *v *= self.scale;
        }
    }

    /// Basis values at the rule nodes, one row per node.
    pub fn tabulate(&self, thetas: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(thetas.len(), self.degree + 1);
        let mut row = Vec::with_capacity(self.degree + 1);
        for (i, &t) in thetas.iter().enumerate() {
            self.eval(t, &mut row);
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn eigenvalue(&self, l: usize) -> f64 {
        laplace_beltrami_eigenvalue(l, self.d.get())
    }
}

/// Axisymmetric function `Σ c_l b_l(θ)` on S^{d-1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularProfile {
    pub d: usize,
    pub coefficients: Vec<f64>,
}

impl AngularProfile {
    pub fn eval(&self, theta: f64) -> Result<f64> {
        let basis = GegenbauerBasis::new(self.d, self.coefficients.len().saturating_sub(1))?;
        let mut row = Vec::new();
        basis.eval(theta, &mut row);
        Ok(row.iter().zip(&self.coefficients).map(|(b, c)| b * c).sum())
    }

    /// Values at many angles.
    pub fn eval_many(&self, thetas: &[f64]) -> Result<Vec<f64>> {
        let basis = GegenbauerBasis::new(self.d, self.coefficients.len().saturating_sub(1))?;
        let mut row = Vec::new();
        Ok(thetas
            .iter()
            .map(|&t| {
                basis.eval(t, &mut row);
                row.iter().zip(&self.coefficients).map(|(b, c)| b * c).sum()
            })
            .collect())
    }

    /// `∫ |Y|² dϑ`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    /// `∫ |∇_ϑ Y|² dϑ`.
    pub fn gradient_energy(&self) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(l, c)| laplace_beltrami_eigenvalue(l, self.d) * c * c)
            .sum()
    }
}

/// Lowest eigenpair of a discretized `-Δ_ϑ - Φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub lambda1: f64,
    /// Normalized eigenvector in the basis (Euclidean norm 1).
    pub coefficients: Vec<f64>,
    /// `‖(H - λ₁) u‖₂` for the discrete operator.
    pub residual: f64,
    /// Truncation degree the reported eigenvalue belongs to.
    pub degree: usize,
    /// Eigenvalue from the comparison discretization (doubled degree on the
    /// axisymmetric path, halved degree on the S² path).
    pub lambda1_comparison: f64,
    pub degree_comparison: usize,
    pub tolerance: f64,
    pub converged: bool,
}

impl EigenResult {
    /// Eigenfunction as an axisymmetric profile (axisymmetric path only).
    pub fn profile(&self, d: usize) -> AngularProfile {
        AngularProfile { d, coefficients: self.coefficients.clone() }
    }
}

fn lowest_pair(h: DMatrix<f64>) -> (f64, DVector<f64>, f64) {
    let eig = SymmetricEigen::new(h.clone());
    let (k, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let mut v: DVector<f64> = eig.eigenvectors.column(k).into_owned();
    v /= v.norm();
    // ground states are positive; fix the sign by the mean
    if v[0] < 0.0 {
        v = -v;
    }
    let residual = (&h * &v - &v * lambda).norm();
    (lambda, v, residual)
}

/// Potential matrix `∫ V b_l b_m dϑ` for all degrees up to the basis degree.
fn potential_matrix(tab: &DMatrix<f64>, weighted_potential: &[f64]) -> DMatrix<f64> {
    let mut scaled = tab.clone();
    for (i, wv) in weighted_potential.iter().enumerate() {
        scaled.row_mut(i).scale_mut(*wv);
    }
    tab.transpose() * scaled
}

/// λ₁ of `-Δ_ϑ - Φ` from the `(L+1)×(L+1)` Gegenbauer–Galerkin matrix.
///
/// The rule should come from [`WeightSpec::adapted_rule`] and resolve
/// products of degree-`2L` polynomials in `cos θ`.
pub fn lowest_eigenvalue(phi: &WeightSpec, d: usize, degree: usize, rule: &QuadratureRule) -> Result<EigenResult> {
    lowest_eigenvalue_with(|t| phi.evaluate(t), d, degree, rule, DEFAULT_TOLERANCE)
}

/// λ₁ of `-Δ_ϑ - V` for an arbitrary axisymmetric potential `V(θ)`.
///
/// Converged means that doubling the degree moves λ₁ by less than `tol`.
pub fn lowest_eigenvalue_with<F>(potential: F, d: usize, degree: usize, rule: &QuadratureRule, tol: f64) -> Result<EigenResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if degree == 0 {
        return Err(Error::Domain("spectral degree must be >= 1".into()));
    }
    if rule.kind == RuleKind::FullS2 {
        return Err(Error::Usage("axisymmetric solver needs an axisymmetric rule".into()));
    }
    let dim = SphereDim::hardy(d)?;
    if rule.d != dim {
        return Err(Error::Usage("rule dimension does not match".into()));
    }
    let fine = 2 * degree;
    let basis = GegenbauerBasis::new(d, fine)?;
    let tab = basis.tabulate(&rule.thetas);
    let wv = rule
        .thetas
        .iter()
        .zip(&rule.weights)
        .enumerate()
        .map(|(i, (&t, &w))| {
            let v = potential(t)?;
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i, theta: t, value: v });
            }
            Ok(w * v)
        })
        .collect::<Result<Vec<_>>>()?;
    let vmat = potential_matrix(&tab, &wv);
    let hamiltonian = |n: usize| {
        let mut h = -vmat.view((0, 0), (n + 1, n + 1)).into_owned();
        for l in 0..=n {
            h[(l, l)] += basis.eigenvalue(l);
        }
        h
    };
    let (lambda, v, residual) = lowest_pair(hamiltonian(degree));
    let (lambda_fine, _, _) = lowest_pair(hamiltonian(fine));
    Ok(EigenResult {
        lambda1: lambda,
        coefficients: v.iter().copied().collect(),
        residual,
        degree,
        lambda1_comparison: lambda_fine,
        degree_comparison: fine,
        tolerance: tol,
        converged: (lambda - lambda_fine).abs() < tol,
    })
}

/// Double the degree from `start` until λ₁ converges or `max_degree` is hit.
pub fn lowest_eigenvalue_converged(
    phi: &WeightSpec,
    d: usize,
    start: usize,
    max_degree: usize,
    tol: f64,
) -> Result<EigenResult> {
    let mut degree = start.max(1);
    loop {
        let rule = phi.adapted_rule(d, (4 * degree).max(sphere::DEFAULT_NODES))?;
        let res = lowest_eigenvalue_with(|t| phi.evaluate(t), d, degree, &rule, tol)?;
        if res.converged || 2 * degree > max_degree {
            return Ok(res);
        }
        degree *= 2;
    }
}

/// True iff λ₁ < 0. Requires a non-trivial Φ; for Φ ≡ 0 the statement does
/// not apply.
pub fn negativity_check(phi: &WeightSpec, result: &EigenResult) -> Result<bool> {
    if phi.is_zero() {
        return Err(Error::Domain("negativity check needs a non-trivial weight".into()));
    }
    Ok(result.lambda1 < 0.0)
}

/// Outcome of comparing `|λ₁|` with `α(μ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `‖Φ‖_p / |S^{d-1}|^{1/p}`.
    pub mu: f64,
    pub alpha: f64,
    pub lambda1: f64,
    /// `α(μ) - |λ₁|`.
    pub slack: f64,
    pub holds: bool,
}

/// Check `|λ₁(-Δ_ϑ - Φ)| ≤ α(‖Φ‖_p / |S^{d-1}|^{1/p})`.
pub fn del_bound_check(
    phi: &WeightSpec,
    p: f64,
    d: usize,
    result: &EigenResult,
    curve: &AlphaMuCurve,
) -> Result<BoundReport> {
    let dim = SphereDim::hardy(d)?;
    let lower = (0.5 * (dim.as_f64() - 1.0)).max(1.0);
    if !(p > lower) {
        return Err(Error::Domain(format!("eigenvalue bound needs p > {lower}, got {p}")));
    }
    if curve.d != d || (curve.p - p).abs() > 1e-14 * p {
        return Err(Error::Usage(format!(
            "curve built for (d, p) = ({}, {}) used with ({d}, {p})",
            curve.d, curve.p
        )));
    }
    let norm = weights::lp_norm(phi, p, d)?;
    let mu = norm / unit_sphere_measure(dim.as_f64()).powf(1.0 / p);
    let alpha = curve.alpha_of_mu(mu)?;
    let slack = alpha - result.lambda1.abs();
    Ok(BoundReport { mu, alpha, lambda1: result.lambda1, slack, holds: slack >= -BOUND_TOLERANCE })
}

/// Weight on S² depending on both angles: bilinear interpolation on a
/// (θ, φ) grid, periodic in φ and constant beyond the first/last θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereGridWeight {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    /// `values[i][j]` at `(thetas[i], phis[j])`.
    pub values: Vec<Vec<f64>>,
}

impl SphereGridWeight {
    pub fn new(thetas: Vec<f64>, phis: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let incr = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        if thetas.is_empty() || phis.is_empty() || !incr(&thetas) || !incr(&phis) {
            return Err(Error::Domain("grid axes must be non-empty and strictly increasing".into()));
        }
        if thetas[0] < 0.0 || thetas[thetas.len() - 1] > PI || phis[0] < 0.0 || phis[phis.len() - 1] >= 2.0 * PI {
            return Err(Error::Domain("grid angles outside [0, pi] x [0, 2 pi)".into()));
        }
        if values.len() != thetas.len() || values.iter().any(|r| r.len() != phis.len()) {
            return Err(Error::Domain("grid values do not match the axes".into()));
        }
        if values.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain("grid values must be finite and >= 0".into()));
        }
        Ok(Self { thetas, phis, values })
    }

    /// Grid sampling of an axisymmetric weight (for cross-checks).
    pub fn from_axisymmetric(spec: &WeightSpec, n_theta: usize, n_phi: usize) -> Result<Self> {
        let thetas: Vec<f64> = (0..n_theta).map(|i| PI * (i as f64 + 0.5) / n_theta as f64).collect();
        let phis: Vec<f64> = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
        let values = thetas
            .iter()
            .map(|&t| spec.evaluate(t).map(|v| vec![v; n_phi]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(thetas, phis, values)
    }

    pub fn evaluate(&self, theta: f64, phi: f64) -> f64 {
        let nt = self.thetas.len();
        let (i0, i1, s) = if theta <= self.thetas[0] {
            (0, 0, 0.0)
        } else if theta >= self.thetas[nt - 1] {
            (nt - 1, nt - 1, 0.0)
        } else {
            let k = self.thetas.partition_point(|t| *t <= theta);
            let s = (theta - self.thetas[k - 1]) / (self.thetas[k] - self.thetas[k - 1]);
            (k - 1, k, s)
        };
        let np = self.phis.len();
        let phi = phi.rem_euclid(2.0 * PI);
        let k = self.phis.partition_point(|p| *p <= phi);
        let (j0, j1, lo, hi) = if k == 0 {
            (np - 1, 0, self.phis[np - 1] - 2.0 * PI, self.phis[0])
        } else if k == np {
            (np - 1, 0, self.phis[np - 1], self.phis[0] + 2.0 * PI)
        } else {
            (k - 1, k, self.phis[k - 1], self.phis[k])
        };
        let r = if hi > lo { (phi - lo) / (hi - lo) } else { 0.0 };
        let row = |i: usize| self.values[i][j0] * (1.0 - r) + self.values[i][j1] * r;
        row(i0) * (1.0 - s) + row(i1) * s
    }
}

/// Real spherical harmonics on S², orthonormal, ordered by `l² + l + m`.
pub fn real_spherical_harmonics(lmax: usize, theta: f64, phi: f64, out: &mut Vec<f64>) {
    let n = (lmax + 1) * (lmax + 1);
    out.clear();
    out.resize(n, 0.0);
    let (s, c) = theta.sin_cos();
    // normalized associated Legendre functions, column by column in m
    let mut pmm = (0.25 / PI).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            pmm *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
        }
        let (trig_c, trig_s) = if m == 0 {
            (1.0, 0.0)
        } else {
            let a = m as f64 * phi;
            (2f64.sqrt() * a.cos(), 2f64.sqrt() * a.sin())
        };
        let mut p_prev = 0.0;
        let mut p_cur = pmm;
        for l in m..=lmax {
            if l == m + 1 {
                p_prev = p_cur;
                p_cur = ((2 * m + 3) as f64).sqrt() * c * pmm;
            } else if l > m + 1 {
                let lf = l as f64;
                let mf = m as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
                let next = a * (c * p_cur - b * p_prev);
                p_prev = p_cur;
                p_cur = next;
            }
            let base = l * l + l;
            out[base + m] = p_cur * trig_c;
            if m > 0 {
                out[base - m] = p_cur * trig_s;
            }
        }
    }
}

/// λ₁ of `-Δ - V(θ, φ)` on S² in real spherical harmonics up to degree
/// `degree`; the comparison value uses degree `degree / 2`.
pub fn lowest_eigenvalue_s2<F>(potential: F, degree: usize, rule: &QuadratureRule, tol: f64) -> Result<EigenResult>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if rule.kind != RuleKind::FullS2 {
        return Err(Error::Usage("S^2 solver needs a full S^2 rule".into()));
    }
    if degree < 2 {
        return Err(Error::Domain("S^2 degree must be >= 2".into()));
    }
    let nb = (degree + 1) * (degree + 1);
    let mut tab = DMatrix::zeros(rule.len(), nb);
    let mut row = Vec::with_capacity(nb);
    let mut wv = Vec::with_capacity(rule.len());
    for i in 0..rule.len() {
        let (t, p) = (rule.thetas[i], rule.phis[i]);
        real_spherical_harmonics(degree, t, p, &mut row);
        for (j, v) in row.iter().enumerate() {
            tab[(i, j)] = *v;
        }
        let v = potential(t, p)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { index: i, theta: t, value: v });
        }
        wv.push(rule.weights[i] * v);
    }
    let vmat = potential_matrix(&tab, &wv);
    let hamiltonian = |lmax: usize| {
        let n = (lmax + 1) * (lmax + 1);
        let mut h = -vmat.view((0, 0), (n, n)).into_owned();
        for l in 0..=lmax {
            for m in 0..(2 * l + 1) {
                h[(l * l + m, l * l + m)] += laplace_beltrami_eigenvalue(l, 3);
            }
        }
        h
    };
    let (lambda, v, residual) = lowest_pair(hamiltonian(degree));
    let coarse = degree / 2;
    let (lambda_coarse, _, _) = lowest_pair(hamiltonian(coarse));
    Ok(EigenResult {
        lambda1: lambda,
        coefficients: v.iter().copied().collect(),
        residual,
        degree,
        lambda1_comparison: lambda_coarse,
        degree_comparison: coarse,
        tolerance: tol,
        converged: (lambda - lambda_coarse).abs() < tol,
    })
}
