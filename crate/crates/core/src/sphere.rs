//! Geometry of the unit sphere S^{d-1}: surface measure and quadrature rules
//! for angular integrals.
//!
//! Axisymmetric rules integrate functions of the polar angle θ against the
//! full surface measure: the weights absorb both the `sin^{d-2} θ` density
//! and the area `|S^{d-2}|` of the latitude spheres, so
//! `Σ w_i g(θ_i) ≈ ∫_{S^{d-1}} g(θ) dϑ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi, gauss_legendre_on};
use crate::special::gamma;

/// Default number of nodes for axisymmetric rules.
pub const DEFAULT_NODES: usize = 128;

/// Split point between the graded (singular) side and the smooth side of a
/// split rule.
pub const SPLIT_ANGLE: f64 = 0.1;
/// Geometric grading ratio of the panels on the singular side.
pub const GRADING_RATIO: f64 = 0.5;
/// Number of graded panels on the singular side.
pub const GRADED_PANELS: usize = 40;
const GRADED_PANEL_NODES: usize = 16;

/// Ambient dimension `d` of R^d; the sphere is S^{d-1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SphereDim(usize);

impl SphereDim {
    /// Dimension valid for geometry operations (`d >= 2`).
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("sphere geometry needs d >= 2, got {d}")));
        }
        Ok(Self(d))
    }

    /// Dimension valid for the Hardy-inequality results (`d >= 3`).
    pub fn hardy(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::Domain(format!("Hardy inequalities need d >= 3, got {d}")));
        }
        Ok(Self(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

/// `|S^{d-1}| = 2 π^{d/2} / Γ(d/2)` for any `d >= 1` (`|S^0| = 2`).
pub(crate) fn unit_sphere_measure(d: f64) -> f64 {
    2.0 * PI.powf(0.5 * d) / gamma(0.5 * d)
}

/// Surface area of S^{d-1}.
pub fn surface_area(d: usize) -> Result<f64> {
    let d = SphereDim::new(d)?;
    Ok(unit_sphere_measure(d.as_f64()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    /// Gauss–Jacobi in `t = cos θ`, exact for polynomials in `cos θ`.
    Axisymmetric,
    /// Composite Gauss–Legendre panels in θ with a graded mesh at θ = 0.
    Split,
    /// Composite Gauss–Legendre panels in θ between breakpoints.
    Panels,
    /// Tensor rule on S²: Gauss–Legendre in `cos θ`, uniform in φ.
    FullS2,
}

/// Nodes and weights for integration over S^{d-1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub d: SphereDim,
    /// Polar angles θ_i.
    pub thetas: Vec<f64>,
    /// Azimuths φ_i (only for [`RuleKind::FullS2`]; empty otherwise).
    pub phis: Vec<f64>,
    pub weights: Vec<f64>,
    /// Degree in `cos θ` integrated exactly, when the rule has one.
    pub exact_degree: Option<usize>,
    /// Exponent `s` of the `θ^{-s}` endpoint singularity the rule is tuned to.
    pub singular_exponent: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weighted sum of a function of θ evaluated at the nodes.
    pub fn integrate_fn<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let samples: Vec<f64> = self.thetas.iter().map(|&t| f(t)).collect();
        integrate(self, &samples)
    }
}

/// Gauss–Jacobi rule for axisymmetric integrands on S^{d-1}.
///
/// With `t = cos θ` the measure is `|S^{d-2}| (1-t²)^{(d-3)/2} dt`, so the
/// Jacobi exponents are `(d-3)/2` at both ends.
pub fn axisym_rule(d: usize, n: usize) -> Result<QuadratureRule> {
    let d = SphereDim::hardy(d)?;
    if n < 2 {
        return Err(Error::Domain(format!("axisymmetric rule needs n >= 2, got {n}")));
    }
    let a = 0.5 * (d.as_f64() - 3.0);
    let (t, w) = gauss_jacobi(n, a, a)?;
    let lat = unit_sphere_measure(d.as_f64() - 1.0);
    // ascending θ means descending t
    let thetas: Vec<f64> = t.iter().rev().map(|t| t.clamp(-1.0, 1.0).acos()).collect();
    let weights: Vec<f64> = w.iter().rev().map(|w| w * lat).collect();
    Ok(QuadratureRule {
        kind: RuleKind::Axisymmetric,
        d,
        thetas,
        phis: Vec::new(),
        weights,
        exact_degree: Some(2 * n - 1),
        singular_exponent: 0.0,
    })
}

fn latitude_density(d: SphereDim, theta: f64) -> f64 {
    unit_sphere_measure(d.as_f64() - 1.0) * theta.sin().powi(d.get() as i32 - 2)
}

/// Gauss–Legendre panels in θ over consecutive breakpoints.
///
/// `breaks` must start at 0, end at π and be strictly increasing; each panel
/// gets `n` nodes.
pub fn panel_rule(d: usize, breaks: &[f64], n: usize) -> Result<QuadratureRule> {
    let d = SphereDim::hardy(d)?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("panel breakpoints must be strictly increasing".into()));
    }
    let mut thetas = Vec::new();
    let mut weights = Vec::new();
    for w in breaks.windows(2) {
        let (x, wt) = gauss_legendre_on(n, w[0], w[1])?;
        for (t, wi) in x.into_iter().zip(wt) {
            weights.push(wi * latitude_density(d, t));
            thetas.push(t);
        }
    }
    Ok(QuadratureRule {
        kind: RuleKind::Panels,
        d,
        thetas,
        phis: Vec::new(),
        weights,
        exact_degree: None,
        singular_exponent: 0.0,
    })
}

/// Rule for integrands of the form `θ^{-s} g(θ)` with `g` smooth.
///
/// The smooth side `[0.1, π]` uses `n` Gauss–Legendre nodes in θ; the
/// singular side uses 40 geometrically graded panels (ratio 0.5). The
/// innermost remainder `[0, 0.1·2^{-40}]` uses a Gauss–Jacobi panel with the
/// weight `θ^{d-2-s}`, so samples there are expected to carry the `θ^{-s}`
/// factor themselves.
pub fn split_rule(d: usize, n: usize, singular_exponent: f64) -> Result<QuadratureRule> {
    let dim = SphereDim::hardy(d)?;
    let gamma_exp = dim.as_f64() - 2.0 - singular_exponent;
    if gamma_exp <= -1.0 {
        return Err(Error::Domain(format!(
            "theta^-{singular_exponent} is not integrable on S^{}",
            d - 1
        )));
    }
    let lat = unit_sphere_measure(dim.as_f64() - 1.0);
    let mut thetas = Vec::new();
    let mut weights = Vec::new();

    let inner = SPLIT_ANGLE * GRADING_RATIO.powi(GRADED_PANELS as i32);
    let (x, w) = gauss_jacobi(GRADED_PANEL_NODES, 0.0, gamma_exp)?;
    let half = 0.5 * inner;
    for (xi, wi) in x.into_iter().zip(w) {
        let t = half * (1.0 + xi);
        // ∫_0^h θ^{γ} G(θ) dθ with G = g·(sinθ/θ)^{d-2}; the sample is θ^{-s} g.
        let weight = wi
            * half.powf(gamma_exp + 1.0)
            * (t.sin() / t).powi(d as i32 - 2)
            * t.powf(singular_exponent)
            * lat;
        thetas.push(t);
        weights.push(weight);
    }
    let mut lo = inner;
    for k in (0..GRADED_PANELS).rev() {
        let hi = SPLIT_ANGLE * GRADING_RATIO.powi(k as i32);
        let (x, w) = gauss_legendre_on(GRADED_PANEL_NODES, lo, hi)?;
        for (t, wi) in x.into_iter().zip(w) {
            thetas.push(t);
            weights.push(wi * latitude_density(dim, t));
        }
        lo = hi;
    }
    let (x, w) = gauss_legendre_on(n, SPLIT_ANGLE, PI)?;
    for (t, wi) in x.into_iter().zip(w) {
        thetas.push(t);
        weights.push(wi * latitude_density(dim, t));
    }
    Ok(QuadratureRule {
        kind: RuleKind::Split,
        d: dim,
        thetas,
        phis: Vec::new(),
        weights,
        exact_degree: None,
        singular_exponent,
    })
}

/// Tensor rule on S² (`d = 3`): `n_theta` Gauss–Legendre nodes in `cos θ`
/// and `n_phi` equispaced azimuths.
pub fn full_s2_rule(n_theta: usize, n_phi: usize) -> Result<QuadratureRule> {
    if n_theta < 2 || n_phi < 1 {
        return Err(Error::Domain("full S^2 rule needs n_theta >= 2 and n_phi >= 1".into()));
    }
    let (t, w) = gauss_legendre_on(n_theta, -1.0, 1.0)?;
    let dphi = 2.0 * PI / n_phi as f64;
    let mut thetas = Vec::with_capacity(n_theta * n_phi);
    let mut phis = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    for (ti, wi) in t.iter().rev().zip(w.iter().rev()) {
        let theta = ti.clamp(-1.0, 1.0).acos();
        for j in 0..n_phi {
            thetas.push(theta);
            phis.push(j as f64 * dphi);
            weights.push(wi * dphi);
        }
    }
    Ok(QuadratureRule {
        kind: RuleKind::FullS2,
        d: SphereDim(3),
        thetas,
        phis,
        weights,
        exact_degree: Some(2 * n_theta - 1),
        singular_exponent: 0.0,
    })
}

/// Weighted sum `Σ w_i f_i` in ascending node order.
pub fn integrate(rule: &QuadratureRule, samples: &[f64]) -> Result<f64> {
    if samples.len() != rule.len() {
        return Err(Error::Usage(format!(
            "{} samples for a rule with {} nodes",
            samples.len(),
            rule.len()
        )));
    }
    let mut acc = 0.0;
    for (i, (&w, &f)) in rule.weights.iter().zip(samples).enumerate() {
        if !f.is_finite() {
            return Err(Error::NonFinite { index: i, theta: rule.thetas[i], value: f });
        }
        acc += w * f;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn areas() {
        assert!((surface_area(2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((surface_area(3).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!((surface_area(4).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        assert!(matches!(surface_area(1), Err(Error::Domain(_))));
        assert!((unit_sphere_measure(1.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn axisym_rule_normalization_and_moments() {
        for d in 3..=10 {
            for n in [2, 5, 64, 128] {
                let rule = axisym_rule(d, n).unwrap();
                let s = rule.integrate_fn(|_| 1.0).unwrap();
                let area = surface_area(d).unwrap();
                assert!((s / area - 1.0).abs() < 1e-12, "d={d} n={n}");
                assert!(rule.weights.iter().all(|w| *w > 0.0));
            }
        }
        let rule = axisym_rule(3, 2).unwrap();
        assert!(rule.integrate_fn(|t| t.cos()).unwrap().abs() < 1e-14);
        let c2 = rule.integrate_fn(|t| t.cos().powi(2)).unwrap();
        assert!((c2 - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn axisym_rule_declared_degree_is_exact() {
        // ∫_{S^{d-1}} cos^{2k} θ = |S^{d-1}| (2k-1)!! / (d (d+2) ... (d+2k-2))
        for d in [3usize, 4, 7] {
            let n = 6;
            let rule = axisym_rule(d, n).unwrap();
            let area = surface_area(d).unwrap();
            for k in 0..n {
                let mut exact = area;
                for j in 0..k {
                    exact *= (2 * j + 1) as f64 / (d + 2 * j) as f64;
                }
                let v = rule.integrate_fn(|t| t.cos().powi(2 * k as i32)).unwrap();
                assert!((v - exact).abs() < 1e-12 * area, "d={d} k={k}");
            }
        }
    }

    #[test]
    fn split_and_panel_rules_integrate_constants() {
        for d in [3, 4, 5] {
            let area = surface_area(d).unwrap();
            let r = split_rule(d, 128, 0.0).unwrap();
            assert!((r.integrate_fn(|_| 1.0).unwrap() / area - 1.0).abs() < 1e-12);
            let p = panel_rule(d, &[0.0, 0.7, 2.0, PI], 32).unwrap();
            assert!((p.integrate_fn(|_| 1.0).unwrap() / area - 1.0).abs() < 1e-12);
        }
        let s2 = full_s2_rule(16, 32).unwrap();
        assert!((s2.integrate_fn(|_| 1.0).unwrap() / (4.0 * PI) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn non_finite_sample_is_reported_with_node() {
        let rule = axisym_rule(3, 4).unwrap();
        let err = integrate(&rule, &[1.0, f64::NAN, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 1, .. }));
    }

    #[test]
    fn doubling_nodes_reduces_error() {
        // smooth non-polynomial integrand on a panel rule
        let exact = {
            // ∫_0^π e^{cos θ} sin θ dθ · 2π = 2π (e - 1/e)
            2.0 * PI * (1f64.exp() - (-1f64).exp())
        };
        let mut last = f64::INFINITY;
        for n in [2, 4, 8] {
            let r = panel_rule(3, &[0.0, PI], n).unwrap();
            let err = (r.integrate_fn(|t| t.cos().exp()).unwrap() - exact).abs();
            assert!(err <= 0.5 * last + 1e-15, "n={n}: {err} vs {last}");
            last = err;
        }
    }
}
