//! Closed-form Hardy constants τ for the four weighted inequalities.

use serde::{Deserialize, Serialize};

use crate::alpha_mu::AlphaMuCurve;
use crate::error::{Error, Result};
use crate::special::gamma;
use crate::sphere::{unit_sphere_measure, SphereDim};
use crate::weights::{full_compensation_exponent, lp_norm, require_p_in_range, PRange, TheoremId, WeightSpec};

/// `(d-2)²/4`, the classical Hardy constant.
pub fn classical_constant(d: usize) -> f64 {
    let df = d as f64;
    0.25 * (df - 2.0).powi(2)
}

fn check_norm(phi_norm: f64) -> Result<()> {
    if !(phi_norm > 0.0 && phi_norm.is_finite()) {
        return Err(Error::Domain(format!("weight norm must be positive and finite, got {phi_norm}")));
    }
    Ok(())
}

/// τ for p at or above the full-compensation exponent.
pub fn tau_theorem_main(d: usize, p: f64, phi_norm: f64) -> Result<f64> {
    require_p_in_range(d, p, TheoremId::Main)?;
    check_norm(phi_norm)?;
    Ok(classical_constant(d) * unit_sphere_measure(d as f64).powf(1.0 / p) / phi_norm)
}

/// `ν₀ = 2(d-1)(p-1)/(d-2)²`, the share of the classical constant kept in
/// the partially compensated inequality.
///
/// Accepts the partial-compensation range and its upper end, where ν₀ = 1.
pub fn nu0(d: usize, p: f64) -> Result<f64> {
    let full = full_compensation_exponent(d);
    if (p - full).abs() > 1e-12 * full {
        require_p_in_range(d, p, TheoremId::Main2)?;
    }
    let df = d as f64;
    Ok((2.0 * (df - 1.0) * (p - 1.0) / (df - 2.0).powi(2)).min(1.0))
}

/// `(ν₀, τ)` with `τ = ν₀ (d-2)²/4 |S^{d-1}|^{1/p} / ‖Φ‖_p`.
pub fn tau_theorem2(d: usize, p: f64, phi_norm: f64) -> Result<(f64, f64)> {
    let nu0 = nu0(d, p)?;
    check_norm(phi_norm)?;
    Ok((nu0, nu0 * classical_constant(d) * unit_sphere_measure(d as f64).powf(1.0 / p) / phi_norm))
}

/// `τ = |S^{d-1}|^{1/p} μ(ν (d-2)²/4) / ‖Φ‖_p` for `ν ∈ (ν₀, 1]`, with μ
/// read off `curve`.
pub fn tau_theorem4(d: usize, p: f64, nu: f64, phi_norm: f64, curve: &AlphaMuCurve) -> Result<f64> {
    require_p_in_range(d, p, TheoremId::Theorem4)?;
    check_norm(phi_norm)?;
    if curve.d != d || (curve.p - p).abs() > 1e-12 * p {
        return Err(Error::Domain(format!(
            "curve built for d = {}, p = {} used with d = {d}, p = {p}",
            curve.d, curve.p
        )));
    }
    let df = d as f64;
    let nu0 = 2.0 * (df - 1.0) * (p - 1.0) / (df - 2.0).powi(2);
    if !(nu > nu0 && nu <= 1.0) {
        return Err(Error::Domain(format!(
            "nu = {nu} must lie in (nu0, 1] = ({nu0}, 1]; use the partial-compensation constant for nu <= nu0"
        )));
    }
    let mu = curve.mu_at(nu * classical_constant(d))?;
    Ok(unit_sphere_measure(df).powf(1.0 / p) * mu / phi_norm)
}

fn check_kappa(d: usize, kappa: f64) -> Result<()> {
    if d == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    let half = 0.5 * d as f64;
    if d < 3 {
        if !(kappa > 0.0 && kappa < half) {
            return Err(Error::Domain(format!("kappa = {kappa} must lie in (0, {half}) for d = {d}")));
        }
    } else if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::Domain(format!("kappa = {kappa} must lie in (0, 1] for d = {d} >= 3")));
    }
    Ok(())
}

/// `C_κ = 2^{-2κ} Γ²((d/2-κ)/2) / Γ²((d/2+κ)/2)`, the sharp constant of
/// `∫|x|^{-2κ}|u|² ≤ C_κ ‖(-Δ)^{κ/2}u‖²`.
pub fn c_kappa(d: usize, kappa: f64) -> Result<f64> {
    let half = 0.5 * d as f64;
    if d == 0 || !(kappa > 0.0 && kappa < half) {
        return Err(Error::Domain(format!("kappa = {kappa} must lie in (0, {half})")));
    }
    let ratio = gamma(0.5 * (half - kappa)) / gamma(0.5 * (half + kappa));
    Ok(2f64.powf(-2.0 * kappa) * ratio * ratio)
}

/// `τ = |S^{d-1}|^{2κ/d} / (C_κ ‖Φ‖_{d/2κ})`.
pub fn tau_fractional(d: usize, kappa: f64, phi_norm: f64) -> Result<f64> {
    check_kappa(d, kappa)?;
    check_norm(phi_norm)?;
    let df = d as f64;
    Ok(unit_sphere_measure(df).powf(2.0 * kappa / df) / (c_kappa(d, kappa)? * phi_norm))
}

/// A constant together with the data identifying it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyConstants {
    pub d: usize,
    /// Integrability exponent of Φ (`d/2κ` for the fractional inequality).
    pub p: f64,
    /// Homogeneity order: the weight is `Φ/|x|^{2κ}`.
    pub kappa: f64,
    pub tau: f64,
    pub nu0: Option<f64>,
    pub nu: Option<f64>,
    pub theorem_id: TheoremId,
    /// The formula that produced `tau`, in plain text.
    pub formula: String,
    /// `‖Φ‖` in the exponent the formula uses.
    pub lp_norm: f64,
}

pub const FORMULA_MAIN: &str = "tau = (d-2)^2/4 * |S^{d-1}|^{1/p} / ||Phi||_p";
pub const FORMULA_MAIN2: &str = "tau = nu0 * (d-2)^2/4 * |S^{d-1}|^{1/p} / ||Phi||_p, nu0 = 2(d-1)(p-1)/(d-2)^2";
pub const FORMULA_THEOREM4: &str = "tau = |S^{d-1}|^{1/p} * mu(nu*(d-2)^2/4) / ||Phi||_p";
pub const FORMULA_FRACTIONAL: &str =
    "tau = 2^{2k} Gamma^2((d/2+k)/2) / Gamma^2((d/2-k)/2) * |S^{d-1}|^{2k/d} / ||Phi||_{d/2k}";

impl HardyConstants {
    pub fn main(spec: &WeightSpec, d: usize, p: f64) -> Result<Self> {
        let norm = lp_norm(spec, p, d)?;
        Ok(Self {
            d,
            p,
            kappa: 1.0,
            tau: tau_theorem_main(d, p, norm)?,
            nu0: None,
            nu: None,
            theorem_id: TheoremId::Main,
            formula: FORMULA_MAIN.into(),
            lp_norm: norm,
        })
    }

    pub fn main2(spec: &WeightSpec, d: usize, p: f64) -> Result<Self> {
        require_p_in_range(d, p, TheoremId::Main2)?;
        let norm = lp_norm(spec, p, d)?;
        let (nu0, tau) = tau_theorem2(d, p, norm)?;
        Ok(Self {
            d,
            p,
            kappa: 1.0,
            tau,
            nu0: Some(nu0),
            nu: None,
            theorem_id: TheoremId::Main2,
            formula: FORMULA_MAIN2.into(),
            lp_norm: norm,
        })
    }

    pub fn theorem4(spec: &WeightSpec, d: usize, p: f64, nu: f64, curve: &AlphaMuCurve) -> Result<Self> {
        require_p_in_range(d, p, TheoremId::Theorem4)?;
        let norm = lp_norm(spec, p, d)?;
        let tau = tau_theorem4(d, p, nu, norm, curve)?;
        Ok(Self {
            d,
            p,
            kappa: 1.0,
            tau,
            nu0: Some(nu0(d, p)?),
            nu: Some(nu),
            theorem_id: TheoremId::Theorem4,
            formula: FORMULA_THEOREM4.into(),
            lp_norm: norm,
        })
    }

    pub fn fractional(spec: &WeightSpec, d: usize, kappa: f64) -> Result<Self> {
        check_kappa(d, kappa)?;
        let p = d as f64 / (2.0 * kappa);
        let norm = if d >= 3 { lp_norm(spec, p, d)? } else { low_dimensional_norm(spec, p, d)? };
        Ok(Self {
            d,
            p,
            kappa,
            tau: tau_fractional(d, kappa, norm)?,
            nu0: None,
            nu: None,
            theorem_id: TheoremId::Fractional,
            formula: FORMULA_FRACTIONAL.into(),
            lp_norm: norm,
        })
    }

    /// Admissible p-range of the theorem (in dimension `d`).
    pub fn range(&self) -> Result<PRange> {
        PRange::for_theorem(self.theorem_id, self.d.max(3))
    }
}

/// Norms on S⁰ and S¹, where only constant weights are meaningful here.
fn low_dimensional_norm(spec: &WeightSpec, p: f64, d: usize) -> Result<f64> {
    match spec {
        WeightSpec::Constant { value } => Ok(value * unit_sphere_measure(d as f64).powf(1.0 / p)),
        _ => Err(Error::Domain(format!(
            "only constant weights are supported in dimension {d}"
        ))),
    }
}

/// The exponent comparison behind `L^{d/2} ⊂ L^{p*}` on the sphere:
/// returns `d/2 - p*` with `p*` the full-compensation exponent, which is
/// `(d-2)/(2(d-1)) > 0` for every `d >= 3`.
pub fn embedding_margin(d: usize) -> Result<f64> {
    SphereDim::hardy(d)?;
    Ok(0.5 * d as f64 - full_compensation_exponent(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn main_examples() {
        for d in 3..=10 {
            let p = full_compensation_exponent(d) + 0.3;
            let norm = unit_sphere_measure(d as f64).powf(1.0 / p);
            assert!(close(tau_theorem_main(d, p, norm).unwrap(), classical_constant(d), 1e-14));
            let t1 = tau_theorem_main(d, p, 1.0).unwrap();
            let t2 = tau_theorem_main(d, p, 2.0).unwrap();
            assert!(close(t1, 2.0 * t2, 1e-15));
        }
        let tau = tau_theorem_main(3, 1.25, (2.0 * PI).powf(0.8)).unwrap();
        assert!(close(tau, 2f64.powf(0.8) / 4.0, 1e-14));
        match tau_theorem_main(3, 1.2, 1.0) {
            Err(Error::PRange { range, .. }) => assert!(range.contains("1.25")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nu0_examples() {
        assert!(close(nu0(4, 1.5).unwrap(), 0.75, 1e-15));
        assert!(close(nu0(3, 1.125).unwrap(), 0.5, 1e-15));
        assert!(close(nu0(5, full_compensation_exponent(5)).unwrap(), 1.0, 1e-15));
        assert!(nu0(5, full_compensation_exponent(5) - 1e-9).unwrap() < 1.0);
        assert!(nu0(4, 1.4).is_err());
        assert!(nu0(3, 1.3).is_err());
    }

    #[test]
    fn theorem2_examples() {
        let (n, t) = tau_theorem2(3, 1.125, (4.0 * PI).powf(1.0 / 1.125)).unwrap();
        assert!(close(n, 0.5, 1e-15) && close(t, 0.125, 1e-14));
        for d in 3..=8 {
            let full = full_compensation_exponent(d);
            let p = 0.5 * (full + (0.5 * (d as f64 - 1.0)).max(1.0));
            let norm = unit_sphere_measure(d as f64).powf(1.0 / p);
            let (n, t) = tau_theorem2(d, p, norm).unwrap();
            assert!(close((1.0 - n) * classical_constant(d) + t, classical_constant(d), 1e-14));
            let (_, t_end) = tau_theorem2(d, full, 1.7).unwrap();
            assert!(close(t_end, tau_theorem_main(d, full, 1.7).unwrap(), 1e-14));
        }
    }

    #[test]
    fn theorem4_examples() {
        use crate::alpha_mu::{conjugate_exponent, mu_of_alpha, CurveOptions, ProfileGrid};
        let (d, p) = (4, 1.6);
        let curve = AlphaMuCurve::build(d, p, CurveOptions::new(12, 1.5)).unwrap();
        let norm = unit_sphere_measure(4.0).powf(1.0 / p);
        let t1 = tau_theorem4(d, p, 1.0, norm, &curve).unwrap();
        let q = conjugate_exponent(p);
        let direct = mu_of_alpha(1.0, d, q, ProfileGrid::for_alpha(1.0, q)).unwrap().mu;
        assert!(close(t1, direct, 1e-6), "{t1} vs {direct}");
        let n0 = nu0(d, p).unwrap();
        let (_, t2) = tau_theorem2(d, p, norm).unwrap();
        let near = tau_theorem4(d, p, n0 * (1.0 + 1e-9), norm, &curve).unwrap();
        assert!(close(near, t2, 1e-8));
        let mut last = t2;
        for k in 1..=10 {
            let nu = n0 + (1.0 - n0) * k as f64 / 10.0;
            let t = tau_theorem4(d, p, nu, norm, &curve).unwrap();
            assert!(t > last);
            last = t;
        }
        assert!(tau_theorem4(d, p, n0, norm, &curve).is_err());
        assert!(tau_theorem4(d, p, 1.01, norm, &curve).is_err());
    }

    #[test]
    fn c_kappa_examples() {
        assert!(close(c_kappa(3, 1.0).unwrap(), 4.0, 1e-13));
        assert!(close(c_kappa(4, 1.0).unwrap(), 1.0, 1e-13));
        for d in 3..=9 {
            let c = c_kappa(d, 1.0).unwrap();
            assert!(close(c, 4.0 / ((d as f64) - 2.0).powi(2), 1e-13));
        }
        assert!(close(c_kappa(3, 1e-9).unwrap(), 1.0, 1e-7));
        assert!(c_kappa(3, 1.5).is_err());
    }

    #[test]
    fn fractional_examples() {
        for d in 3..=8 {
            let norm = unit_sphere_measure(d as f64).powf(2.0 / d as f64);
            assert!(close(tau_fractional(d, 1.0, norm).unwrap(), classical_constant(d), 1e-13));
        }
        let norm = (4.0 * PI).powf(1.0 / 3.0);
        assert!(close(tau_fractional(3, 0.5, norm).unwrap(), 2.0 / PI, 1e-13));
        let cap = (2.0 * PI).powf(2.0 / 3.0);
        assert!(close(tau_fractional(3, 1.0, cap).unwrap(), 2f64.powf(2.0 / 3.0) / 4.0, 1e-13));
        assert!(matches!(tau_fractional(3, 1.2, 1.0), Err(Error::Domain(m)) if m.contains("d = 3 >= 3")));
        assert!(matches!(tau_fractional(2, 1.0, 1.0), Err(Error::Domain(m)) if m.contains("(0, 1) for d = 2")));
        assert!(tau_fractional(1, 0.25, 2f64.powf(2.0)).unwrap() > 0.0);
    }

    #[test]
    fn low_dimensional_constants() {
        let c = HardyConstants::fractional(&WeightSpec::constant(1.0).unwrap(), 1, 0.25).unwrap();
        assert!(close(c.lp_norm, 2f64.powf(0.5), 1e-15));
        assert!(HardyConstants::fractional(&WeightSpec::cap(1.0, 1.0).unwrap(), 2, 0.5).is_err());
    }

    #[test]
    fn embedding_exponents() {
        for d in 3..=10 {
            let m = embedding_margin(d).unwrap();
            let df = d as f64;
            assert!(close(m, (df - 2.0) / (2.0 * (df - 1.0)), 1e-15));
            assert!(m > 0.0);
        }
    }
}
