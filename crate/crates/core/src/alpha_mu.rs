//! The increasing convex curve α(μ) that bounds `|λ₁(-Δ_ϑ - Φ)|` in terms of
//! the normalized norm `μ = ‖Φ‖_p / |S^{d-1}|^{1/p}`, computed through its
//! inverse
//!
//! ```text
//! μ(α) = inf_u (∫|∇u|² dσ + α ∫u² dσ) / (∫|u|^q dσ)^{2/q},   q = 2p/(p-1),
//! ```
//!
//! where `dσ = dϑ / |S^{d-1}|` is the normalized surface measure. Constants
//! are minimizers up to the linear threshold `(d-1)(p-1)/2 = (d-1)/(q-2)`,
//! where `μ(α) = α`.
//!
//! Minimizers are sought among axisymmetric profiles expanded in Gegenbauer
//! polynomials. A profile is normalized by `∫|u|^q dσ = 1`, which makes it a
//! solution of `-Δu + αu = μ(α) u^{q-1}`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gn::GnConstant;
use crate::sphere::{axisym_rule, unit_sphere_measure, SphereDim};
use crate::spectral::{AngularProfile, GegenbauerBasis};

/// `q = 2p/(p-1)`.
pub fn conjugate_exponent(p: f64) -> f64 {
    2.0 * p / (p - 1.0)
}

/// `p = q/(q-2)`, inverse of [`conjugate_exponent`].
pub fn exponent_from_q(q: f64) -> f64 {
    q / (q - 2.0)
}

/// End of the linear part of α(μ): `(d-1)(p-1)/2`.
///
/// With `endpoint` set, `p` must equal `(d-1)/2` (`d >= 4`), and the wider
/// window `(d-1)(d-3)/2` that applies at that endpoint is returned.
pub fn linear_threshold(d: usize, p: f64, endpoint: bool) -> Result<f64> {
    let dim = SphereDim::hardy(d)?;
    let df = dim.as_f64();
    if endpoint {
        if d < 4 || (p - 0.5 * (df - 1.0)).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "endpoint window needs d >= 4 and p = (d-1)/2, got d = {d}, p = {p}"
            )));
        }
        return Ok(0.5 * (df - 1.0) * (df - 3.0));
    }
    if !(p > 1.0 && p >= 0.5 * (df - 1.0)) {
        return Err(Error::Domain(format!(
            "linear threshold needs p > 1 and p >= {}, got {p}",
            0.5 * (df - 1.0)
        )));
    }
    Ok(0.5 * (df - 1.0) * (p - 1.0))
}

fn check_q(d: usize, q: f64) -> Result<()> {
    let upper = if d == 3 { f64::INFINITY } else { 2.0 * (d as f64 - 1.0) / (d as f64 - 3.0) };
    if !(q > 2.0 && q < upper) {
        return Err(Error::Domain(format!("q = {q} outside (2, {upper}) for d = {d}")));
    }
    Ok(())
}

/// Discretization size for the profile minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileGrid {
    /// Highest Gegenbauer degree.
    pub degree: usize,
    /// Quadrature nodes for the `L^q` term.
    pub nodes: usize,
}

impl ProfileGrid {
    /// Resolution scaled to the width `α^{-1/2}` of the minimizer's peak.
    pub fn for_alpha(alpha: f64, q: f64) -> Self {
        let degree = ((48.0 * alpha.max(0.0).sqrt()).ceil() as usize).clamp(32, 1024);
        Self::with_degree(degree, q)
    }

    pub fn with_degree(degree: usize, q: f64) -> Self {
        let factor = (0.5 * q + 1.0).min(6.0);
        Self { degree, nodes: (factor * degree as f64).ceil() as usize + 16 }
    }
}

/// Optimizer settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative size of the preconditioned gradient at which descent hands
    /// over to Newton polishing.
    pub descent_tol: f64,
    pub max_descent_iters: usize,
    /// Galerkin residual required of the final profile.
    pub residual_tol: f64,
    pub max_newton_iters: usize,
    /// The degree is raised by half until the top quarter of the spectral
    /// coefficients carries at most this fraction of the norm.
    pub tail_tol: f64,
    pub max_degree: usize,
    /// Return the constant below the threshold without minimizing.
    pub shortcut_linear_regime: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            descent_tol: 1e-6,
            max_descent_iters: 200_000,
            residual_tol: 1e-9,
            max_newton_iters: 60,
            tail_tol: 1e-6,
            max_degree: 2048,
            shortcut_linear_regime: true,
        }
    }
}

/// `‖top quarter of c‖ / ‖c‖`.
pub fn spectral_tail(c: &[f64]) -> f64 {
    let n = c.len();
    let all: f64 = c.iter().map(|x| x * x).sum();
    if all == 0.0 {
        return 0.0;
    }
    (c[3 * n / 4..].iter().map(|x| x * x).sum::<f64>() / all).sqrt()
}

/// How the minimizer was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// True when α is at or below the threshold.
    pub linear_regime: bool,
    pub descent_iterations: usize,
    pub descent_gradient: f64,
    pub newton_iterations: usize,
    /// Galerkin residual of the Euler–Lagrange equation.
    pub residual: f64,
    /// [`spectral_tail`] of the final coefficients.
    pub tail: f64,
    /// Grid actually used, after refinement.
    pub grid: ProfileGrid,
}

/// μ(α) with its minimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuSolution {
    pub alpha: f64,
    pub mu: f64,
    /// `dμ/dα = ∫u² dσ` at the minimizer.
    pub slope: f64,
    /// Minimizer normalized by `∫|u|^q dσ = 1`, in the `dϑ`-orthonormal basis.
    pub profile: AngularProfile,
    pub certificate: Certificate,
}

/// Discretized functional in the `dσ`-orthonormal basis `β_l = |S|^{1/2} b_l`.
struct Functional {
    q: f64,
    /// `l(l+d-2) + α`.
    diag: DVector<f64>,
    /// basis values, one row per node
    tab: DMatrix<f64>,
    /// normalized weights (sum 1)
    omega: DVector<f64>,
    area_sqrt: f64,
    d: usize,
}

impl Functional {
    fn new(d: usize, q: f64, alpha: f64, grid: ProfileGrid) -> Result<Self> {
        let basis = GegenbauerBasis::new(d, grid.degree)?;
        let rule = axisym_rule(d, grid.nodes)?;
        let area = unit_sphere_measure(d as f64);
        let area_sqrt = area.sqrt();
        let tab = basis.tabulate(&rule.thetas) * area_sqrt;
        let omega = DVector::from_iterator(rule.len(), rule.weights.iter().map(|w| w / area));
        let diag = DVector::from_fn(grid.degree + 1, |l, _| basis.eigenvalue(l) + alpha);
        Ok(Self { q, diag, tab, omega, area_sqrt, d })
    }

    fn values(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.tab * c
    }

    fn quadratic(&self, c: &DVector<f64>) -> f64 {
        c.iter().zip(self.diag.iter()).map(|(c, d)| d * c * c).sum()
    }

    fn lq_power(&self, u: &DVector<f64>) -> f64 {
        u.iter().zip(self.omega.iter()).map(|(u, w)| w * u.abs().powf(self.q)).sum()
    }

    /// Rescale to `∫|u|^q dσ = 1`.
    fn normalize(&self, c: &DVector<f64>) -> DVector<f64> {
        let u = self.values(c);
        c / self.lq_power(&u).powf(1.0 / self.q)
    }

    /// Projection of `|u|^{q-2} u` onto the basis.
    fn nonlinear(&self, u: &DVector<f64>) -> DVector<f64> {
        let g = DVector::from_iterator(
            u.len(),
            u.iter().zip(self.omega.iter()).map(|(u, w)| w * u.abs().powf(self.q - 2.0) * u),
        );
        self.tab.tr_mul(&g)
    }

    fn residual(&self, c: &DVector<f64>, mu: f64) -> f64 {
        let u = self.values(c);
        let r = self.diag.component_mul(c) - self.nonlinear(&u) * mu;
        r.norm()
    }

    fn to_profile(&self, c: &DVector<f64>) -> AngularProfile {
        AngularProfile { d: self.d, coefficients: c.iter().map(|v| v * self.area_sqrt).collect() }
    }

    /// Preconditioned gradient descent on `{∫|u|^q dσ = 1}` with Armijo
    /// backtracking. Returns the iterate, its value, iterations and final
    /// relative gradient size.
    fn descend(&self, mut c: DVector<f64>, opts: &SolverOptions) -> (DVector<f64>, f64, usize, f64) {
        c = self.normalize(&c);
        let mut value = self.quadratic(&c);
        let mut step = 1.0f64;
        let mut gsize = f64::INFINITY;
        for it in 0..opts.max_descent_iters {
            let u = self.values(&c);
            let grad = (self.diag.component_mul(&c) - self.nonlinear(&u) * value) * 2.0;
            let dir = grad.component_div(&self.diag);
            let slope = grad.dot(&dir);
            gsize = (slope / value).sqrt();
            if gsize < opts.descent_tol {
                return (c, value, it, gsize);
            }
            let mut s = (2.0 * step).min(1.0);
            loop {
                let trial = self.normalize(&(&c - &dir * s));
                let tv = self.quadratic(&trial);
                if tv <= value - 1e-4 * s * slope {
                    c = trial;
                    value = tv;
                    step = s;
                    break;
                }
                s *= 0.5;
                if s < 1e-14 {
                    return (c, value, it, gsize);
                }
            }
        }
        (c, value, opts.max_descent_iters, gsize)
    }

    fn equation(&self, v: &DVector<f64>) -> DVector<f64> {
        let u = self.values(v);
        self.diag.component_mul(v) - self.nonlinear(&u)
    }

    /// Damped Newton iteration on `D v = P(|v|^{q-2} v)`, whose solutions are
    /// `μ^{1/(q-2)}` times normalized critical points. Returns the solution
    /// and the iteration count.
    fn polish(&self, mut v: DVector<f64>, opts: &SolverOptions) -> Option<(DVector<f64>, usize)> {
        let mut g = self.equation(&v);
        for it in 0..opts.max_newton_iters {
            let scale = self.diag.component_mul(&v).norm();
            if g.norm() <= 1e-14 * scale {
                return Some((v, it));
            }
            let u = self.values(&v);
            let mut wu = self.tab.clone();
            for (i, (ui, wi)) in u.iter().zip(self.omega.iter()).enumerate() {
                wu.row_mut(i).scale_mut(wi * (self.q - 1.0) * ui.abs().powf(self.q - 2.0));
            }
            let mut jac = -(self.tab.transpose() * &wu);
            for l in 0..self.diag.len() {
                jac[(l, l)] += self.diag[l];
            }
            let delta = jac.lu().solve(&g)?;
            let mut t = 1.0;
            loop {
                let trial = &v - &delta * t;
                let gt = self.equation(&trial);
                if gt.norm() < g.norm() || t < 1.0 / 64.0 {
                    v = trial;
                    g = gt;
                    break;
                }
                t *= 0.5;
            }
            if !v.iter().all(|x| x.is_finite()) {
                return None;
            }
        }
        (g.norm() <= 1e-10 * self.diag.component_mul(&v).norm()).then_some((v, opts.max_newton_iters))
    }
}

/// Relative size of negative values tolerated in a discrete minimizer;
/// truncating the expansion of a sharply peaked profile leaves ripples of
/// this order in its tail.
pub const POSITIVITY_TOL: f64 = 1e-6;

/// Degree at which the descent runs before Newton continuation to the
/// requested grid.
const DESCENT_DEGREE: usize = 48;

/// Threshold `(d-1)/(q-2)` expressed through q.
pub fn threshold_for_q(d: usize, q: f64) -> f64 {
    (d as f64 - 1.0) / (q - 2.0)
}

/// μ(α) and its minimizer with default solver options.
pub fn mu_of_alpha(alpha: f64, d: usize, q: f64, grid: ProfileGrid) -> Result<MuSolution> {
    mu_of_alpha_with(alpha, d, q, grid, &SolverOptions::default())
}

pub fn mu_of_alpha_with(alpha: f64, d: usize, q: f64, grid: ProfileGrid, opts: &SolverOptions) -> Result<MuSolution> {
    SphereDim::hardy(d)?;
    check_q(d, q)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if grid.degree < 2 {
        return Err(Error::Domain("profile degree must be >= 2".into()));
    }
    let area_sqrt = unit_sphere_measure(d as f64).sqrt();
    let linear = alpha <= threshold_for_q(d, q);
    if linear && opts.shortcut_linear_regime {
        let mut coefficients = vec![0.0; grid.degree + 1];
        coefficients[0] = area_sqrt;
        return Ok(MuSolution {
            alpha,
            mu: alpha,
            slope: 1.0,
            profile: AngularProfile { d, coefficients },
            certificate: Certificate {
                linear_regime: true,
                descent_iterations: 0,
                descent_gradient: 0.0,
                newton_iterations: 0,
                residual: 0.0,
                tail: 0.0,
                grid,
            },
        });
    }

    let coarse = if grid.degree <= DESCENT_DEGREE { grid } else { ProfileGrid::with_degree(DESCENT_DEGREE, q) };
    let f0 = Functional::new(d, q, alpha, coarse)?;
    let mut c0 = DVector::zeros(coarse.degree + 1);
    c0[0] = 1.0;
    c0[1] = 1e-2;
    let (c_gd, value_gd, iters, gsize) = f0.descend(c0, opts);
    if gsize >= opts.descent_tol && iters >= opts.max_descent_iters {
        return Err(Error::NoConvergence(format!(
            "gradient descent for alpha = {alpha}: best value {value_gd}, gradient {gsize:e}"
        )));
    }
    let polish_failed = || {
        Error::NoConvergence(format!(
            "Newton polish for alpha = {alpha} failed (descent value {value_gd}, gradient {gsize:e})"
        ))
    };
    let mut v = c_gd * value_gd.powf(1.0 / (q - 2.0));
    let mut level = coarse;
    let mut newton_iters = 0;
    let mut target = grid;
    let f = loop {
        let f = Functional::new(d, q, alpha, level)?;
        let mut start = DVector::zeros(level.degree + 1);
        start.rows_mut(0, v.len().min(level.degree + 1)).copy_from(&v.rows(0, v.len().min(level.degree + 1)));
        let (next, n) = f.polish(start, opts).ok_or_else(polish_failed)?;
        v = next;
        newton_iters += n;
        if level.degree == target.degree {
            let tail = spectral_tail(v.as_slice());
            if tail <= opts.tail_tol || target.degree >= opts.max_degree {
                break f;
            }
            let degree = (target.degree + target.degree.div_ceil(2)).min(opts.max_degree);
            target = ProfileGrid::with_degree(degree, q);
            level = target;
            continue;
        }
        let next_degree = 2 * level.degree;
        level = if next_degree >= target.degree { target } else { ProfileGrid::with_degree(next_degree, q) };
    };
    let grid = target;
    let tail = spectral_tail(v.as_slice());
    if tail > opts.tail_tol {
        return Err(Error::NoConvergence(format!(
            "spectral tail {tail:e} for alpha = {alpha} at the maximal degree {}",
            grid.degree
        )));
    }
    let c = f.normalize(&v);
    if !(f.quadratic(&c) <= value_gd * (1.0 + 1e-9)) {
        return Err(polish_failed());
    }
    let mut c = c;
    if c[0] < 0.0 {
        c = -c;
    }
    let mu = f.quadratic(&c);
    let residual = f.residual(&c, mu);
    if residual > opts.residual_tol.max(1e-12 * mu) {
        return Err(Error::NoConvergence(format!(
            "Euler-Lagrange residual {residual:e} for alpha = {alpha}"
        )));
    }
    let u = f.values(&c);
    let umax = u.max();
    if u.min() < -POSITIVITY_TOL * umax {
        return Err(Error::NoConvergence(format!(
            "minimizer for alpha = {alpha} changes sign (min {}, max {umax})",
            u.min()
        )));
    }
    let slope = c.norm_squared();
    Ok(MuSolution {
        alpha,
        mu,
        slope,
        profile: f.to_profile(&c),
        certificate: Certificate {
            linear_regime: linear,
            descent_iterations: iters,
            descent_gradient: gsize,
            newton_iterations: newton_iters,
            residual,
            tail,
            grid,
        },
    })
}

/// `‖P(-Δu + αu - μ|u|^{q-2}u)‖_{L²(dσ)}` for a profile normalized as in
/// [`MuSolution`], projected onto the degrees carried by `profile`.
pub fn euler_lagrange_residual(profile: &AngularProfile, alpha: f64, mu: f64, q: f64, grid: ProfileGrid) -> Result<f64> {
    let grid = ProfileGrid { degree: profile.coefficients.len() - 1, nodes: grid.nodes };
    let f = Functional::new(profile.d, q, alpha, grid)?;
    let c = DVector::from_iterator(
        profile.coefficients.len(),
        profile.coefficients.iter().map(|v| v / f.area_sqrt),
    );
    Ok(f.residual(&c, mu))
}

/// Value of the μ-quotient at an arbitrary profile.
pub fn mu_quotient(profile: &AngularProfile, alpha: f64, q: f64, grid: ProfileGrid) -> Result<f64> {
    let grid = ProfileGrid { degree: profile.coefficients.len() - 1, nodes: grid.nodes };
    let f = Functional::new(profile.d, q, alpha, grid)?;
    let c = DVector::from_iterator(
        profile.coefficients.len(),
        profile.coefficients.iter().map(|v| v / f.area_sqrt),
    );
    let u = f.values(&c);
    Ok(f.quadratic(&c) / f.lq_power(&u).powf(2.0 / q))
}

/// Sampling plan for [`AlphaMuCurve::build`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveOptions {
    /// Initial geometric samples; refinement adds more.
    pub samples: usize,
    /// Largest sampled α as a multiple of the threshold.
    pub max_factor: f64,
    /// Intervals are bisected until the interpolant matches a direct solve
    /// at their midpoint to this relative accuracy.
    pub interpolation_tol: f64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self { samples: 48, max_factor: 40.0, interpolation_tol: 1e-8 }
    }
}

impl CurveOptions {
    pub fn new(samples: usize, max_factor: f64) -> Self {
        Self { samples, max_factor, ..Self::default() }
    }
}

const MAX_REFINEMENTS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub alpha: f64,
    pub mu: f64,
    /// `dμ/dα`.
    pub slope: f64,
    pub residual: f64,
}

/// Sampled curve μ(α) and its inverse α(μ), interpolated in log-log
/// coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaMuCurve {
    pub d: usize,
    pub p: f64,
    pub q: f64,
    pub threshold: f64,
    /// Samples with α ≥ threshold, ascending; the first is the threshold.
    pub samples: Vec<CurveSample>,
}

fn solve_sample(alpha: f64, d: usize, q: f64) -> Result<CurveSample> {
    let sol = mu_of_alpha(alpha, d, q, ProfileGrid::for_alpha(alpha, q))?;
    Ok(CurveSample { alpha, mu: sol.mu, slope: sol.slope, residual: sol.certificate.residual })
}

impl AlphaMuCurve {
    /// Curve without nonlinear samples, valid only up to the threshold.
    pub fn linear_only(d: usize, p: f64) -> Result<Self> {
        let threshold = linear_threshold(d, p, false)?;
        Ok(Self { d, p, q: conjugate_exponent(p), threshold, samples: Vec::new() })
    }

    /// Sample μ(α) on a geometric grid from the threshold to
    /// `max_factor × threshold`, then bisect every interval whose midpoint
    /// is not reproduced by the interpolant. Samples are solved in parallel.
    pub fn build(d: usize, p: f64, opts: CurveOptions) -> Result<Self> {
        let threshold = linear_threshold(d, p, false)?;
        let q = conjugate_exponent(p);
        if opts.samples < 2 || !(opts.max_factor > 1.0) || !(opts.interpolation_tol > 0.0) {
            return Err(Error::Domain(
                "curve needs >= 2 samples, max_factor > 1 and a positive interpolation tolerance".into(),
            ));
        }
        let n = opts.samples;
        let alphas: Vec<f64> = (1..n)
            .map(|k| threshold * opts.max_factor.powf(k as f64 / (n - 1) as f64))
            .collect();
        let mut samples = vec![CurveSample { alpha: threshold, mu: threshold, slope: 1.0, residual: 0.0 }];
        samples.extend(alphas.par_iter().map(|&a| solve_sample(a, d, q)).collect::<Result<Vec<_>>>()?);
        let mut curve = Self { d, p, q, threshold, samples };
        // indices of intervals still to be checked
        let mut pending: Vec<usize> = (0..n - 1).collect();
        for _ in 0..MAX_REFINEMENTS {
            if pending.is_empty() {
                return Ok(curve);
            }
            let mids: Vec<CurveSample> = pending
                .par_iter()
                .map(|&i| {
                    let s = &curve.samples;
                    solve_sample((s[i].alpha * s[i + 1].alpha).sqrt(), d, q)
                })
                .collect::<Result<Vec<_>>>()?;
            let failed: Vec<bool> = mids
                .iter()
                .map(|m| {
                    let predicted = curve.mu_at(m.alpha)?;
                    Ok((predicted - m.mu).abs() > opts.interpolation_tol * m.mu)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut next = Vec::with_capacity(curve.samples.len() + mids.len());
            let mut next_pending = Vec::new();
            let mut mid_iter = pending.iter().zip(mids.iter().zip(&failed)).peekable();
            for (i, s) in curve.samples.iter().enumerate() {
                next.push(*s);
                if let Some((_, (m, bad))) = mid_iter.next_if(|(j, _)| **j == i) {
                    if *bad {
                        next_pending.push(next.len() - 1);
                        next_pending.push(next.len());
                    }
                    next.push(*m);
                }
            }
            curve.samples = next;
            pending = next_pending;
        }
        Err(Error::NoConvergence(format!(
            "curve interpolation did not reach {:e} after {MAX_REFINEMENTS} bisections",
            opts.interpolation_tol
        )))
    }

    pub fn max_alpha(&self) -> f64 {
        self.samples.last().map_or(self.threshold, |s| s.alpha)
    }

    pub fn max_mu(&self) -> f64 {
        self.samples.last().map_or(self.threshold, |s| s.mu)
    }

    /// μ(α) by cubic Hermite interpolation of log μ against log α, with the
    /// sampled slopes.
    pub fn mu_at(&self, alpha: f64) -> Result<f64> {
        if !(alpha >= 0.0) {
            return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
        }
        if alpha <= self.threshold {
            return Ok(alpha);
        }
        if alpha > self.max_alpha() {
            return Err(Error::Domain(format!(
                "alpha = {alpha} beyond the sampled range (max {})",
                self.max_alpha()
            )));
        }
        let xs: Vec<f64> = self.samples.iter().map(|s| s.alpha.ln()).collect();
        let ys: Vec<f64> = self.samples.iter().map(|s| s.mu.ln()).collect();
        let ds: Vec<f64> = self.samples.iter().map(|s| s.slope * s.alpha / s.mu).collect();
        Ok(hermite(&xs, &ys, &ds, alpha.ln()).exp())
    }

    /// α(μ): identity up to the threshold, otherwise Hermite interpolation of
    /// the inverted samples. Extrapolation is refused.
    pub fn alpha_of_mu(&self, mu: f64) -> Result<f64> {
        if !(mu >= 0.0) {
            return Err(Error::Domain(format!("mu must be >= 0, got {mu}")));
        }
        if mu <= self.threshold {
            return Ok(mu);
        }
        if mu > self.max_mu() {
            return Err(Error::CurveRange { mu, max: self.max_mu() });
        }
        let xs: Vec<f64> = self.samples.iter().map(|s| s.mu.ln()).collect();
        let ys: Vec<f64> = self.samples.iter().map(|s| s.alpha.ln()).collect();
        let ds: Vec<f64> = self.samples.iter().map(|s| s.mu / (s.slope * s.alpha)).collect();
        Ok(hermite(&xs, &ys, &ds, mu.ln()).exp())
    }
}

/// Cubic Hermite interpolation; slopes are limited (Fritsch–Carlson) so the
/// interpolant stays monotone between monotone data.
fn hermite(xs: &[f64], ys: &[f64], ds: &[f64], x: f64) -> f64 {
    let k = xs.partition_point(|v| *v <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let h = x1 - x0;
    let secant = (ys[k] - ys[k - 1]) / h;
    let (mut d0, mut d1) = (ds[k - 1], ds[k]);
    if secant == 0.0 {
        d0 = 0.0;
        d1 = 0.0;
    } else {
        let (a, b) = ((d0 / secant).max(0.0), (d1 / secant).max(0.0));
        let r = (a * a + b * b).sqrt();
        let scale = if r > 3.0 { 3.0 / r } else { 1.0 };
        d0 = a * scale * secant;
        d1 = b * scale * secant;
    }
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * ys[k - 1] + h10 * h * d0 + h01 * ys[k] + h11 * h * d1
}

/// Large-μ behaviour of the sampled curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    /// Least-squares slope of log α against log μ on the top decade.
    pub fitted_exponent: f64,
    /// `p / (p - (d-1)/2)`.
    pub predicted_exponent: f64,
    /// `exp(mean(log α - predicted_exponent · log μ))` on the top decade.
    pub fitted_prefactor: f64,
    /// `(L¹)^{1/(p - (d-1)/2)}`.
    pub predicted_prefactor: f64,
    /// `(L¹ |S^{d-1}|)^{1/(p - (d-1)/2)}`: the prefactor once `μ^p` is
    /// converted back to `∫Φ^p`, which is what the semiclassical limit sees.
    pub measure_prefactor: f64,
    pub points: usize,
}

/// Fit the growth of α(μ) on the top decade of samples and compare with
/// the Lieb–Thirring prediction `α^{p-(d-1)/2} ≈ L¹ μ^p`.
pub fn asymptotic_slope(curve: &AlphaMuCurve, gn: &GnConstant) -> Result<SlopeReport> {
    if curve.max_alpha() < 20.0 * curve.threshold {
        return Err(Error::Domain(format!(
            "curve sampled only to {} (needs >= 20 x threshold {})",
            curve.max_alpha(),
            curve.threshold
        )));
    }
    if gn.m + 1 != curve.d || (gn.q - curve.q).abs() > 1e-12 * curve.q {
        return Err(Error::Domain(format!(
            "constant for m = {}, q = {} does not match the curve (d = {}, q = {})",
            gn.m, gn.q, curve.d, curve.q
        )));
    }
    let gamma = curve.p - 0.5 * (curve.d as f64 - 1.0);
    if !(gamma > 0.0) {
        return Err(Error::Domain("asymptotics need p > (d-1)/2".into()));
    }
    let cutoff = curve.max_alpha() / 10.0;
    let pts: Vec<(f64, f64)> = curve
        .samples
        .iter()
        .filter(|s| s.alpha >= cutoff * (1.0 - 1e-12))
        .map(|s| (s.mu.ln(), s.alpha.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::Domain(format!("only {} samples in the top decade", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let predicted_exponent = curve.p / gamma;
    let fitted_prefactor = (my - predicted_exponent * mx).exp();
    Ok(SlopeReport {
        fitted_exponent: sxy / sxx,
        predicted_exponent,
        fitted_prefactor,
        predicted_prefactor: gn.l1.powf(1.0 / gamma),
        measure_prefactor: (gn.l1 * unit_sphere_measure(curve.d as f64)).powf(1.0 / gamma),
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_examples() {
        assert_eq!(linear_threshold(3, 2.0, false).unwrap(), 1.0);
        assert_eq!(linear_threshold(4, 1.5, false).unwrap(), 0.75);
        assert_eq!(linear_threshold(5, 2.0, true).unwrap(), 4.0);
        assert!(linear_threshold(4, 1.4, false).is_err());
        assert!(linear_threshold(2, 2.0, false).is_err());
        assert!(linear_threshold(3, 1.0, false).is_err());
        assert!(linear_threshold(5, 2.5, true).is_err());
        // threshold in p and in q agree
        let q = conjugate_exponent(2.0);
        assert!((threshold_for_q(3, q) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn linear_regime_returns_constant() {
        let q = conjugate_exponent(2.0);
        let sol = mu_of_alpha(0.5, 3, q, ProfileGrid::with_degree(16, q)).unwrap();
        assert_eq!(sol.mu, 0.5);
        assert!(sol.certificate.linear_regime);
        let r = euler_lagrange_residual(&sol.profile, 0.5, sol.mu, q, ProfileGrid::with_degree(16, q)).unwrap();
        assert!(r < 1e-13, "{r}");
        // constant profile value is 1 everywhere
        assert!((sol.profile.eval(0.7).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn nonlinear_regime_beats_constants() {
        let q = 6.0;
        let alpha = 5.0;
        let sol = mu_of_alpha(alpha, 3, q, ProfileGrid::for_alpha(alpha, q)).unwrap();
        assert!(sol.mu < alpha);
        assert!(sol.certificate.residual < 1e-6);
        assert!(sol.slope > 0.0 && sol.slope < 1.0);
        let grid = ProfileGrid::for_alpha(alpha, q);
        let r0 = euler_lagrange_residual(&sol.profile, alpha, sol.mu, q, grid).unwrap();
        let mut perturbed = sol.profile.clone();
        perturbed.coefficients[1] += 0.1;
        let r1 = euler_lagrange_residual(&perturbed, alpha, sol.mu, q, grid).unwrap();
        assert!(r1 > r0);
        let qv = mu_quotient(&perturbed, alpha, q, grid).unwrap();
        assert!(qv > sol.mu);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |x: f64| x * x * x + x + 1.0;
        let df = |x: f64| 3.0 * x * x + 1.0;
        let xs = [0.0, 0.5, 1.3, 2.0];
        let ys: Vec<f64> = xs.iter().map(|x| f(*x)).collect();
        let ds: Vec<f64> = xs.iter().map(|x| df(*x)).collect();
        for x in [0.1, 0.77, 1.9, 2.0] {
            assert!((hermite(&xs, &ys, &ds, x) - f(x)).abs() < 1e-13);
        }
    }
}
