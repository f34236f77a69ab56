//! Both sides of the Hardy inequalities on separable trial functions
//! `u(r, θ) = f(r) Y(θ)`.
//!
//! In polar coordinates
//! `∫|∇u|² = (∫f'² r^{d-1} dr) ‖Y‖² + (∫f² r^{d-3} dr) ‖∇_ϑY‖²` and
//! `∫W|u|² = (∫f² r^{d-1-2κ} dr) ∫ΦY² dϑ`, so every quantity factors into
//! a radial integral and an angular one.

use serde::{Deserialize, Serialize};

use crate::constants::{classical_constant, HardyConstants};
use crate::error::{Error, Result};
use crate::quadrature::adaptive_gk;
use crate::special::gamma;
use crate::spectral::{laplace_beltrami_eigenvalue, AngularProfile, EigenResult, GegenbauerBasis};
use crate::sphere::{self, unit_sphere_measure, SphereDim};
use crate::weights::{TheoremId, WeightSpec};

/// Radial factor `f(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Radial {
    /// `exp(-r²/(2σ²))`
    Gaussian { sigma: f64 },
    /// `r^{-(d-2)/2 + ε}` for `r ≤ 1`, `r^{-(d-2)/2 - ε}` for `r > 1`
    PowerCutoff { eps: f64 },
    /// `exp(-1/(1-s²))`, `s` the affine image of `[r0, r1]` onto [-1, 1]
    CompactBump { r0: f64, r1: f64 },
}

/// Angular factor `Y(θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Angular {
    Constant,
    /// The `dϑ`-orthonormal zonal harmonic of degree `l`.
    BasisMode { l: usize },
    EigenProfile { profile: AngularProfile },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFunction {
    pub radial: Radial,
    pub angular: Angular,
}

/// `∫_a^b r^e dr` with a divergence error naming the failing end.
fn power_integral(e: f64, a: f64, b: f64) -> Result<f64> {
    if a == 0.0 && e <= -1.0 {
        return Err(Error::Divergent { end: "0" });
    }
    if b.is_infinite() && e >= -1.0 {
        return Err(Error::Divergent { end: "∞" });
    }
    let (ea, eb) = (a.powf(e + 1.0), if b.is_infinite() { 0.0 } else { b.powf(e + 1.0) });
    Ok((eb - ea) / (e + 1.0))
}

impl Radial {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("gaussian width must be positive, got {sigma}")));
        }
        Ok(Self::Gaussian { sigma })
    }

    pub fn power_cutoff(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("power cutoff needs eps > 0 for finite energy, got {eps}")));
        }
        Ok(Self::PowerCutoff { eps })
    }

    pub fn compact_bump(r0: f64, r1: f64) -> Result<Self> {
        if !(r0 >= 0.0 && r1 > r0 && r1.is_finite()) {
            return Err(Error::Domain(format!("bump support [{r0}, {r1}] is not an interval in [0, inf)")));
        }
        Ok(Self::CompactBump { r0, r1 })
    }

    /// `f(r)` and `f'(r)`.
    pub fn eval(&self, r: f64, d: usize) -> (f64, f64) {
        let a = 0.5 * (d as f64 - 2.0);
        match *self {
            Self::Gaussian { sigma } => {
                let f = (-r * r / (2.0 * sigma * sigma)).exp();
                (f, -r / (sigma * sigma) * f)
            }
            Self::PowerCutoff { eps } => {
                let e = if r <= 1.0 { -a + eps } else { -a - eps };
                (r.powf(e), e * r.powf(e - 1.0))
            }
            Self::CompactBump { r0, r1 } => {
                let half = 0.5 * (r1 - r0);
                let s = (r - 0.5 * (r0 + r1)) / half;
                if s.abs() >= 1.0 {
                    return (0.0, 0.0);
                }
                let g = 1.0 - s * s;
                let f = (-1.0 / g).exp();
                (f, f * (-2.0 * s / (g * g)) / half)
            }
        }
    }

    /// `∫_0^∞ f² r^k dr`.
    pub fn moment(&self, d: usize, k: f64) -> Result<f64> {
        let a = 0.5 * (d as f64 - 2.0);
        match *self {
            Self::Gaussian { sigma } => {
                if k <= -1.0 {
                    return Err(Error::Divergent { end: "0" });
                }
                Ok(0.5 * sigma.powf(k + 1.0) * gamma(0.5 * (k + 1.0)))
            }
            Self::PowerCutoff { eps } => {
                Ok(power_integral(k - 2.0 * a + 2.0 * eps, 0.0, 1.0)?
                    + power_integral(k - 2.0 * a - 2.0 * eps, 1.0, f64::INFINITY)?)
            }
            Self::CompactBump { r0, r1 } => {
                if r0 == 0.0 && k <= -1.0 {
                    // f → e^{-1} at the origin, so the moment diverges there
                    return Err(Error::Divergent { end: "0" });
                }
                adaptive_gk(|r| self.eval(r, d).0.powi(2) * r.powf(k), r0, r1, 1e-300, 1e-13)
            }
        }
    }

    /// `∫_0^∞ f'² r^{d-1} dr`.
    pub fn gradient_moment(&self, d: usize) -> Result<f64> {
        let df = d as f64;
        let a = 0.5 * (df - 2.0);
        match *self {
            Self::Gaussian { sigma } => Ok(0.5 * sigma.powf(df - 2.0) * gamma(0.5 * (df + 2.0))),
            Self::PowerCutoff { eps } => Ok((a - eps).powi(2) * power_integral(-1.0 + 2.0 * eps, 0.0, 1.0)?
                + (a + eps).powi(2) * power_integral(-1.0 - 2.0 * eps, 1.0, f64::INFINITY)?),
            Self::CompactBump { r0, r1 } => {
                adaptive_gk(|r| self.eval(r, d).1.powi(2) * r.powf(df - 1.0), r0, r1, 1e-300, 1e-13)
            }
        }
    }

    /// Quadrature versions of `(∫f'² r^{d-1}, ∫f² r^k)`, in the variable
    /// `s = ln r` for the unbounded profiles; independent of the closed forms.
    pub fn moments_by_quadrature(&self, d: usize, k: f64) -> Result<(f64, f64)> {
        let df = d as f64;
        let (lo, hi) = match *self {
            Self::Gaussian { sigma } => (sigma.ln() - 60.0 / (k + 1.0).max(0.1), (12.0 * sigma).ln()),
            Self::PowerCutoff { eps } => (-16.0 / eps, 16.0 / eps),
            Self::CompactBump { r0, r1 } => {
                let grad = adaptive_gk(|r| self.eval(r, d).1.powi(2) * r.powf(df - 1.0), r0, r1, 1e-300, 1e-13)?;
                let mass = adaptive_gk(|r| self.eval(r, d).0.powi(2) * r.powf(k), r0, r1, 1e-300, 1e-13)?;
                return Ok((grad, mass));
            }
        };
        // power_cutoff integrands in log space
        let exponent = |s: f64| match *self {
            Self::PowerCutoff { eps } => -0.5 * (df - 2.0) + if s <= 0.0 { eps } else { -eps },
            _ => 0.0,
        };
        let grad = |s: f64| match *self {
            Self::PowerCutoff { .. } => {
                let e = exponent(s);
                e * e * (2.0 * (e - 1.0) * s + df * s).exp()
            }
            _ => {
                let r = s.exp();
                self.eval(r, d).1.powi(2) * r.powf(df)
            }
        };
        let mass = |s: f64| match *self {
            Self::PowerCutoff { .. } => (2.0 * exponent(s) * s + (k + 1.0) * s).exp(),
            _ => {
                let r = s.exp();
                self.eval(r, d).0.powi(2) * r.powf(k + 1.0)
            }
        };
        let split = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
            Ok(adaptive_gk(f, lo, 0.0, 1e-300, 1e-12)? + adaptive_gk(f, 0.0, hi, 1e-300, 1e-12)?)
        };
        Ok((split(&grad)?, split(&mass)?))
    }
}

impl Angular {
    fn profile(&self, d: usize) -> Option<AngularProfile> {
        match self {
            Self::Constant => None,
            Self::BasisMode { l } => {
                let mut coefficients = vec![0.0; l + 1];
                coefficients[*l] = 1.0;
                Some(AngularProfile { d, coefficients })
            }
            Self::EigenProfile { profile } => Some(profile.clone()),
        }
    }

    /// `∫|Y|² dϑ`.
    pub fn l2_norm_sq(&self, d: usize) -> f64 {
        match self {
            Self::Constant => unit_sphere_measure(d as f64),
            Self::BasisMode { .. } => 1.0,
            Self::EigenProfile { profile } => profile.l2_norm_sq(),
        }
    }

    /// `∫|∇_ϑY|² dϑ`.
    pub fn gradient_sq(&self, d: usize) -> f64 {
        match self {
            Self::Constant => 0.0,
            Self::BasisMode { l } => laplace_beltrami_eigenvalue(*l, d),
            Self::EigenProfile { profile } => profile.gradient_energy(),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Self::Constant => 0,
            Self::BasisMode { l } => *l,
            Self::EigenProfile { profile } => profile.coefficients.len().saturating_sub(1),
        }
    }

    /// `∫ Φ Y² dϑ` on the weight's adapted rule.
    pub fn weighted(&self, phi: &WeightSpec, d: usize) -> Result<f64> {
        let n = (2 * self.degree() + 16).max(sphere::DEFAULT_NODES);
        let rule = phi.adapted_rule(d, n)?;
        let phis = rule.thetas.iter().map(|&t| phi.evaluate(t)).collect::<Result<Vec<_>>>()?;
        let ys: Vec<f64> = match self.profile(d) {
            None => vec![1.0; rule.len()],
            Some(p) => {
                let basis = GegenbauerBasis::new(d, p.coefficients.len() - 1)?;
                let mut row = Vec::new();
                rule.thetas
                    .iter()
                    .map(|&t| {
                        basis.eval(t, &mut row);
                        row.iter().zip(&p.coefficients).map(|(b, c)| b * c).sum()
                    })
                    .collect()
            }
        };
        let samples: Vec<f64> = phis.iter().zip(&ys).map(|(f, y)| f * y * y).collect();
        sphere::integrate(&rule, &samples)
    }
}

impl TrialFunction {
    pub fn new(radial: Radial, angular: Angular) -> Self {
        Self { radial, angular }
    }

    pub fn describe(&self) -> String {
        let r = match self.radial {
            Radial::Gaussian { sigma } => format!("gaussian({sigma})"),
            Radial::PowerCutoff { eps } => format!("power_cutoff({eps})"),
            Radial::CompactBump { r0, r1 } => format!("compact_bump({r0},{r1})"),
        };
        let a = match &self.angular {
            Angular::Constant => "constant".to_string(),
            Angular::BasisMode { l } => format!("basis_mode({l})"),
            Angular::EigenProfile { .. } => "eigen_profile".to_string(),
        };
        format!("{r}x{a}")
    }
}

/// `∫|∇u|²` over R^d.
pub fn dirichlet_energy(u: &TrialFunction, d: usize) -> Result<f64> {
    SphereDim::hardy(d)?;
    let radial = u.radial.gradient_moment(d)? * u.angular.l2_norm_sq(d);
    let grad = u.angular.gradient_sq(d);
    let angular = if grad == 0.0 { 0.0 } else { u.radial.moment(d, d as f64 - 3.0)? * grad };
    Ok(radial + angular)
}

/// `∫ Φ(x/|x|) |u|² / |x|^{2κ}` over R^d.
pub fn weighted_l2(u: &TrialFunction, phi: &WeightSpec, kappa: f64, d: usize) -> Result<f64> {
    SphereDim::hardy(d)?;
    if phi.is_zero() {
        return Ok(0.0);
    }
    Ok(u.radial.moment(d, d as f64 - 1.0 - 2.0 * kappa)? * u.angular.weighted(phi, d)?)
}

/// Which inequality a report witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GapMode {
    Main,
    /// Partial compensation, `ν = ν₀`.
    Main2,
    Theorem4 { nu: f64 },
}

impl GapMode {
    pub fn theorem(self) -> TheoremId {
        match self {
            Self::Main => TheoremId::Main,
            Self::Main2 => TheoremId::Main2,
            Self::Theorem4 { .. } => TheoremId::Theorem4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub theorem_id: TheoremId,
    pub d: usize,
    pub p: f64,
    pub kappa: f64,
    pub nu: Option<f64>,
    pub tau_used: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
}

/// Relative tolerance on the gap.
pub const GAP_TOLERANCE: f64 = 1e-9;

fn report(theorem_id: TheoremId, c: &HardyConstants, nu: Option<f64>, tau: f64, lhs: f64, rhs: f64) -> HardyReport {
    let gap = lhs - rhs;
    HardyReport {
        theorem_id,
        d: c.d,
        p: c.p,
        kappa: c.kappa,
        nu,
        tau_used: tau,
        lhs,
        rhs,
        gap,
        holds: gap >= -GAP_TOLERANCE * lhs.abs(),
    }
}

/// `∫|∇u|² - rhs` for the inequality selected by `mode`, with
/// `rhs = τ ∫Φ|u|²/|x|²` (full compensation) or
/// `(1-ν)(d-2)²/4 ∫|u|²/|x|² + τ ∫Φ|u|²/|x|²` (partial compensation).
pub fn hardy_gap(u: &TrialFunction, phi: &WeightSpec, d: usize, p: f64, mode: GapMode, constants: &HardyConstants) -> Result<HardyReport> {
    hardy_gap_scaled(u, phi, d, p, mode, constants, 1.0)
}

/// [`hardy_gap`] with τ multiplied by `tau_scale` (negative controls).
pub fn hardy_gap_scaled(
    u: &TrialFunction,
    phi: &WeightSpec,
    d: usize,
    p: f64,
    mode: GapMode,
    constants: &HardyConstants,
    tau_scale: f64,
) -> Result<HardyReport> {
    if constants.theorem_id != mode.theorem() || constants.d != d || (constants.p - p).abs() > 1e-12 * p {
        return Err(Error::Usage(format!(
            "constants for {} (d = {}, p = {}) do not match mode {} (d = {d}, p = {p})",
            constants.theorem_id,
            constants.d,
            constants.p,
            mode.theorem()
        )));
    }
    let nu = match mode {
        GapMode::Main => None,
        GapMode::Main2 => constants.nu0,
        GapMode::Theorem4 { nu } => {
            if constants.nu.map_or(true, |c| (c - nu).abs() > 1e-14) {
                return Err(Error::Usage(format!("constants were computed for nu = {:?}, not {nu}", constants.nu)));
            }
            Some(nu)
        }
    };
    let tau = constants.tau * tau_scale;
    let lhs = dirichlet_energy(u, d)?;
    let mut rhs = tau * weighted_l2(u, phi, 1.0, d)?;
    if let Some(nu) = nu {
        if nu < 1.0 {
            let one = WeightSpec::constant(1.0)?;
            rhs += (1.0 - nu) * classical_constant(d) * weighted_l2(u, &one, 1.0, d)?;
        }
    }
    Ok(report(mode.theorem(), constants, nu, tau, lhs, rhs))
}

/// Rayleigh quotients along the power-cutoff family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    /// `(ε, ∫|∇u|² / ∫Φ|u|²/|x|²)`
    pub quotients: Vec<(f64, f64)>,
    pub infimum: f64,
    /// Least-squares fit `quotient ≈ limit + curvature ε²`.
    pub limit: f64,
    pub curvature: f64,
}

/// Minimize the main-mode quotient over `power_cutoff(ε)` trial functions
/// for a constant weight.
pub fn sharpness_probe(phi: &WeightSpec, d: usize, eps_grid: &[f64]) -> Result<SharpnessReport> {
    if !matches!(phi, WeightSpec::Constant { .. }) || phi.is_zero() {
        return Err(Error::Domain("sharpness probe needs a positive constant weight".into()));
    }
    if eps_grid.len() < 2 {
        return Err(Error::Domain("sharpness probe needs at least two values of eps".into()));
    }
    let quotients = eps_grid
        .iter()
        .map(|&eps| {
            let u = TrialFunction::new(Radial::power_cutoff(eps)?, Angular::Constant);
            Ok((eps, dirichlet_energy(&u, d)? / weighted_l2(&u, phi, 1.0, d)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let infimum = quotients.iter().map(|q| q.1).fold(f64::INFINITY, f64::min);
    let n = quotients.len() as f64;
    let mx = quotients.iter().map(|q| q.0 * q.0).sum::<f64>() / n;
    let my = quotients.iter().map(|q| q.1).sum::<f64>() / n;
    let sxy: f64 = quotients.iter().map(|q| (q.0 * q.0 - mx) * (q.1 - my)).sum();
    let sxx: f64 = quotients.iter().map(|q| (q.0 * q.0 - mx).powi(2)).sum();
    let curvature = sxy / sxx;
    Ok(SharpnessReport { quotients, infimum, limit: my - curvature * mx, curvature })
}

/// Both steps of the polar-coordinate proof on a single trial function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lhs: f64,
    /// `∫(τΦ + λ₁ + (d-2)²/4)|u|²/|x|²`
    pub rhs: f64,
    pub gap: f64,
    /// `∫f'²r^{d-1} - (d-2)²/4 ∫f²r^{d-3}`
    pub radial_gap: f64,
    /// `‖∇Y‖² - τ∫ΦY² - λ₁‖Y‖²`
    pub angular_gap: f64,
    pub holds: bool,
}

/// Check `∫|∇u|² ≥ ∫(τΦ + λ₁ + (d-2)²/4)|u|²/|x|²`, where λ₁ is the lowest
/// eigenvalue of `-Δ_ϑ - τΦ`.
pub fn lemma_decomposition_check(u: &TrialFunction, phi: &WeightSpec, tau: f64, d: usize, eig: &EigenResult) -> Result<LemmaReport> {
    if !eig.converged {
        return Err(Error::NoConvergence(format!(
            "eigenvalue not converged (degree {} vs {}: {} vs {})",
            eig.degree, eig.degree_comparison, eig.lambda1, eig.lambda1_comparison
        )));
    }
    SphereDim::hardy(d)?;
    let a2 = classical_constant(d);
    let r1 = u.radial.gradient_moment(d)?;
    let r2 = u.radial.moment(d, d as f64 - 3.0)?;
    let y2 = u.angular.l2_norm_sq(d);
    let gy = u.angular.gradient_sq(d);
    let phi_y = if phi.is_zero() || tau == 0.0 { 0.0 } else { u.angular.weighted(phi, d)? };
    let lhs = r1 * y2 + r2 * gy;
    let rhs = r2 * (tau * phi_y + (eig.lambda1 + a2) * y2);
    let gap = lhs - rhs;
    Ok(LemmaReport {
        lhs,
        rhs,
        gap,
        radial_gap: r1 - a2 * r2,
        angular_gap: gy - tau * phi_y - eig.lambda1 * y2,
        holds: gap >= -GAP_TOLERANCE * lhs.abs(),
    })
}

/// `∫|∇^κ u|²` for the unit Gaussian, `|S^{d-1}| Γ((d+2κ)/2) / 2`.
pub fn gaussian_fractional_energy(d: usize, kappa: f64) -> f64 {
    let df = d as f64;
    unit_sphere_measure(df) * gamma(0.5 * (df + 2.0 * kappa)) / 2.0
}

/// `∫Φ|u|²/|x|^{2κ}` for the unit Gaussian, `Γ((d-2κ)/2)/2 · ∫Φ dϑ`.
pub fn gaussian_fractional_weighted(d: usize, kappa: f64, phi: &WeightSpec) -> Result<f64> {
    let df = d as f64;
    if !(2.0 * kappa < df) {
        return Err(Error::Divergent { end: "0" });
    }
    let angular = if d >= 3 {
        Angular::Constant.weighted(phi, d)?
    } else {
        match phi {
            WeightSpec::Constant { value } => value * unit_sphere_measure(df),
            _ => return Err(Error::Domain(format!("only constant weights are supported in dimension {d}"))),
        }
    };
    Ok(gamma(0.5 * (df - 2.0 * kappa)) / 2.0 * angular)
}

/// Fractional inequality `∫|∇^κ u|² ≥ τ ∫Φ|u|²/|x|^{2κ}` on the unit Gaussian.
pub fn fractional_gaussian_check(d: usize, kappa: f64, phi: &WeightSpec, constants: &HardyConstants) -> Result<HardyReport> {
    fractional_gaussian_check_scaled(d, kappa, phi, constants, 1.0)
}

pub fn fractional_gaussian_check_scaled(
    d: usize,
    kappa: f64,
    phi: &WeightSpec,
    constants: &HardyConstants,
    tau_scale: f64,
) -> Result<HardyReport> {
    if constants.theorem_id != TheoremId::Fractional || constants.d != d || (constants.kappa - kappa).abs() > 1e-14 {
        return Err(Error::Usage("constants do not belong to this fractional check".into()));
    }
    let tau = constants.tau * tau_scale;
    let lhs = gaussian_fractional_energy(d, kappa);
    let rhs = tau * gaussian_fractional_weighted(d, kappa, phi)?;
    Ok(report(TheoremId::Fractional, constants, None, tau, lhs, rhs))
}
