//! Distribution functions and symmetric decreasing rearrangements of
//! homogeneous weights `W(x) = Φ(x/|x|) / |x|^{2κ}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_gk;
use crate::sphere::{unit_sphere_measure, SphereDim};
use crate::weights::{lp_norm, WeightSpec};

/// `Φ(x/|x|) / |x|^{2κ}` on R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousWeight {
    pub phi: WeightSpec,
    pub kappa: f64,
    pub d: usize,
}

impl HomogeneousWeight {
    /// Requires `Φ ∈ L^{d/2κ}(S^{d-1})`.
    pub fn new(phi: WeightSpec, kappa: f64, d: usize) -> Result<Self> {
        let dim = SphereDim::hardy(d)?;
        if !(kappa > 0.0 && kappa <= 0.5 * dim.as_f64()) {
            return Err(Error::Domain(format!("kappa = {kappa} must lie in (0, d/2]")));
        }
        phi.check_integrable(dim.as_f64() / (2.0 * kappa), d)?;
        Ok(Self { phi, kappa, d })
    }

    /// Critical exponent `d/2κ`.
    pub fn exponent(&self) -> f64 {
        self.d as f64 / (2.0 * self.kappa)
    }

    pub fn evaluate(&self, r: f64, theta: f64) -> Result<f64> {
        Ok(self.phi.evaluate(theta)? / r.powf(2.0 * self.kappa))
    }
}

/// `W*(x) = coefficient / |x|^{2κ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RearrangedWeight {
    pub coefficient: f64,
    pub kappa: f64,
    pub d: usize,
}

impl RearrangedWeight {
    pub fn evaluate(&self, r: f64) -> f64 {
        self.coefficient / r.powf(2.0 * self.kappa)
    }

    /// Volume of `{W* > t}`.
    pub fn level_set_measure(&self, t: f64) -> f64 {
        let df = self.d as f64;
        unit_sphere_measure(df) / df * (self.coefficient / t).powf(df / (2.0 * self.kappa))
    }
}

/// `|{x : W(x) > t}| = (1/d) t^{-d/2κ} ∫ Φ^{d/2κ} dϑ`.
pub fn level_set_measure(w: &HomogeneousWeight, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("threshold must be positive, got {t}")));
    }
    let s = w.exponent();
    let integral = lp_norm(&w.phi, s, w.d)?.powf(s);
    Ok(integral * t.powf(-s) / w.d as f64)
}

/// Coefficient `‖Φ‖_{d/2κ} / |S^{d-1}|^{2κ/d}` of the rearranged weight.
pub fn rearranged_weight(w: &HomogeneousWeight) -> Result<RearrangedWeight> {
    let s = w.exponent();
    let df = w.d as f64;
    let coefficient = lp_norm(&w.phi, s, w.d)? / unit_sphere_measure(df).powf(1.0 / s);
    Ok(RearrangedWeight { coefficient, kappa: w.kappa, d: w.d })
}

/// Volume of the star-shaped set `{W > t}`, `∫ ρ(θ)^d/d dϑ` with radial
/// function `ρ = (Φ/t)^{1/2κ}`, by adaptive quadrature in θ split at the
/// weight's breakpoints. Independent of [`lp_norm`].
pub fn star_volume(w: &HomogeneousWeight, t: f64) -> Result<f64> {
    let d = w.d as f64;
    let ring = unit_sphere_measure(d - 1.0);
    let mut breaks = vec![0.0];
    match &w.phi {
        WeightSpec::Cap { cap_angle, .. } => breaks.push(*cap_angle),
        WeightSpec::Tabulated { angles, .. } => breaks.extend(angles.iter().copied().filter(|a| *a > 0.0 && *a < PI)),
        _ => {}
    }
    breaks.push(PI);
    breaks.dedup();
    let polar = matches!(w.phi, WeightSpec::PolarPower { .. });
    let radius_power = |theta: f64| -> f64 {
        let phi = w.phi.evaluate(theta).unwrap_or(0.0);
        (phi / t).powf(d / (2.0 * w.kappa)) / d * theta.sin().powf(d - 2.0) * ring
    };
    let mut total = 0.0;
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        total += if polar && a == 0.0 {
            // θ = s⁴ flattens the polar singularity
            adaptive_gk(
                |s: f64| {
                    let th = s.powi(4);
                    if th == 0.0 { 0.0 } else { radius_power(th) * 4.0 * s.powi(3) }
                },
                0.0,
                b.powf(0.25),
                1e-15,
                1e-13,
            )?
        } else {
            adaptive_gk(radius_power, a, b, 1e-15, 1e-13)?
        };
    }
    Ok(total)
}

/// Layer-cake check of the closed-form rearrangement: at each radius r the
/// threshold t(r) with `|{W > t}| = |B_r|` is found by bisection on
/// [`star_volume`]; returns the largest relative deviation of t(r) from
/// `coefficient / r^{2κ}`.
pub fn numeric_rearrangement_check(w: &HomogeneousWeight, radii: &[f64]) -> Result<f64> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::Domain("radii must be positive and increasing".into()));
    }
    let closed = rearranged_weight(w)?;
    let df = w.d as f64;
    let ball = |r: f64| unit_sphere_measure(df) / df * r.powf(df);
    let mut worst = 0.0f64;
    for &r in radii {
        let target = ball(r);
        let (mut lo, mut hi) = (1.0f64, 1.0f64);
        let mut guard = 0;
        while star_volume(w, lo)? < target {
            lo *= 0.5;
            guard += 1;
            if guard > 2000 {
                return Err(Error::Bracket { lo, hi });
            }
        }
        while star_volume(w, hi)? > target {
            hi *= 2.0;
            guard += 1;
            if guard > 2000 {
                return Err(Error::Bracket { lo, hi });
            }
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if star_volume(w, mid)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo - 1.0 < 1e-15 {
                break;
            }
        }
        let t = (lo * hi).sqrt();
        let expected = closed.evaluate(r);
        worst = worst.max((t - expected).abs() / expected);
    }
    Ok(worst)
}

/// Largest relative difference between the distribution functions of W and
/// W* over `thresholds`.
pub fn equimeasurability_deviation(w: &HomogeneousWeight, thresholds: &[f64]) -> Result<f64> {
    let star = rearranged_weight(w)?;
    let mut worst = 0.0f64;
    for &t in thresholds {
        let a = level_set_measure(w, t)?;
        let b = star.level_set_measure(t);
        worst = worst.max((a - b).abs() / b.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Result of a discrete Hardy–Littlewood comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyLittlewood {
    /// `Σ m f g`
    pub lhs: f64,
    /// `∫ f↓ g↓` over the measure axis
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
}

/// Decreasing rearrangement of samples with masses: values sorted
/// decreasingly (stable in the sample index) with cumulative mass ends.
fn decreasing(values: &[f64], masses: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
    let mut ends = Vec::with_capacity(idx.len());
    let mut acc = 0.0;
    for &i in &idx {
        acc += masses[i];
        ends.push(acc);
    }
    (idx.iter().map(|&i| values[i]).collect(), ends)
}

/// Compare `Σ m_i f_i g_i` with `∫ f↓ g↓`, where the rearrangements are the
/// decreasing step functions on `[0, Σ m_i]` carrying the same masses.
pub fn hardy_littlewood_check(f_vals: &[f64], g_vals: &[f64], masses: &[f64]) -> Result<HardyLittlewood> {
    let n = masses.len();
    if f_vals.len() != n || g_vals.len() != n || n == 0 {
        return Err(Error::Domain("samples and masses must have the same non-zero length".into()));
    }
    if f_vals.iter().chain(g_vals).chain(masses).any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::Domain("samples and masses must be non-negative and finite".into()));
    }
    let lhs: f64 = (0..n).map(|i| masses[i] * f_vals[i] * g_vals[i]).sum();
    let (fv, fe) = decreasing(f_vals, masses);
    let (gv, ge) = decreasing(g_vals, masses);
    let (mut i, mut j) = (0, 0);
    let mut pos = 0.0;
    let mut rhs = 0.0;
    while i < n && j < n {
        let end = fe[i].min(ge[j]);
        rhs += (end - pos) * fv[i] * gv[j];
        pos = end;
        if fe[i] <= end {
            i += 1;
        }
        if ge[j] <= end {
            j += 1;
        }
    }
    let gap = rhs - lhs;
    Ok(HardyLittlewood { lhs, rhs, gap, holds: gap >= -1e-12 * rhs.abs().max(lhs.abs()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_cap() -> WeightSpec {
        WeightSpec::cap(1.0, PI / 2.0).unwrap()
    }

    #[test]
    fn level_set_examples() {
        let w = HomogeneousWeight::new(WeightSpec::constant(2.0).unwrap(), 1.0, 3).unwrap();
        let m = level_set_measure(&w, 0.5).unwrap();
        assert!((m - 4.0 * PI / 3.0 * 4f64.powf(1.5)).abs() < 1e-12 * m);
        assert!(level_set_measure(&w, 1e12).unwrap() < 1e-15);
        let w = HomogeneousWeight::new(half_cap(), 1.0, 3).unwrap();
        assert!((level_set_measure(&w, 1.0).unwrap() - 2.0 * PI / 3.0).abs() < 1e-14);
        assert!(level_set_measure(&w, 0.0).is_err());
    }

    #[test]
    fn rearranged_examples() {
        let w = HomogeneousWeight::new(WeightSpec::constant(1.7).unwrap(), 1.0, 5).unwrap();
        assert!((rearranged_weight(&w).unwrap().coefficient - 1.7).abs() < 1e-14);
        let w = HomogeneousWeight::new(half_cap(), 1.0, 3).unwrap();
        assert!((rearranged_weight(&w).unwrap().coefficient - 2f64.powf(-2.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn layer_cake_agrees_with_closed_form() {
        let radii = [0.1, 0.5, 1.0, 3.0];
        let w = HomogeneousWeight::new(WeightSpec::constant(1.0).unwrap(), 1.0, 3).unwrap();
        assert!(numeric_rearrangement_check(&w, &radii).unwrap() < 1e-13);
        let w = HomogeneousWeight::new(half_cap(), 1.0, 3).unwrap();
        assert!(numeric_rearrangement_check(&w, &radii).unwrap() < 1e-8);
        let w = HomogeneousWeight::new(WeightSpec::polar_power(1.0, 0.5).unwrap(), 1.0, 3).unwrap();
        assert!(numeric_rearrangement_check(&w, &radii).unwrap() < 1e-6);
    }

    #[test]
    fn construction_follows_integrability() {
        // β d/(2κ) < d - 1
        assert!(HomogeneousWeight::new(WeightSpec::polar_power(1.0, 1.2).unwrap(), 1.0, 3).is_ok());
        assert!(HomogeneousWeight::new(WeightSpec::polar_power(1.0, 1.4).unwrap(), 1.0, 3).is_err());
        assert!(HomogeneousWeight::new(WeightSpec::polar_power(1.0, 2.0).unwrap(), 0.5, 3).is_err());
        assert!(HomogeneousWeight::new(half_cap(), 0.0, 3).is_err());
    }

    #[test]
    fn hardy_littlewood_examples() {
        let m = [1.0, 2.0, 0.5, 1.5];
        let f = [3.0, 1.0, 2.0, 0.5];
        let eq = hardy_littlewood_check(&f, &f, &m).unwrap();
        assert!(eq.gap.abs() < 1e-14 && eq.holds);
        let inc = [0.1, 0.2, 0.3, 0.4];
        let dec = [0.4, 0.3, 0.2, 0.1];
        let r = hardy_littlewood_check(&inc, &dec, &[1.0; 4]).unwrap();
        assert!(r.gap > 0.0 && r.holds);
        assert!(hardy_littlewood_check(&inc, &dec, &[1.0; 3]).is_err());
    }
}
