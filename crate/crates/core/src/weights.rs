//! Angular weights Φ on S^{d-1}, their L^p norms, and the p-ranges in which
//! each Hardy inequality applies.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{self, panel_rule, split_rule, QuadratureRule, SphereDim};

/// Margin below the critical exponent `d-1` for polar-power weights.
pub const INTEGRABILITY_MARGIN: f64 = 1e-9;

/// A non-negative axisymmetric weight Φ(θ) on S^{d-1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", try_from = "RawWeight")]
pub enum WeightSpec {
    Constant { value: f64 },
    /// `amplitude` on the polar cap `θ < cap_angle`, zero elsewhere.
    Cap { amplitude: f64, cap_angle: f64 },
    /// `amplitude · θ^{-exponent}`.
    PolarPower { amplitude: f64, exponent: f64 },
    /// Piecewise-linear interpolation, constant beyond the first and last
    /// angles.
    Tabulated { angles: Vec<f64>, values: Vec<f64> },
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum RawWeight {
    Constant { value: f64 },
    Cap { amplitude: f64, cap_angle: f64 },
    PolarPower { amplitude: f64, exponent: f64 },
    Tabulated { angles: Vec<f64>, values: Vec<f64> },
}

impl TryFrom<RawWeight> for WeightSpec {
    type Error = Error;

    fn try_from(raw: RawWeight) -> Result<Self> {
        match raw {
            RawWeight::Constant { value } => WeightSpec::constant(value),
            RawWeight::Cap { amplitude, cap_angle } => WeightSpec::cap(amplitude, cap_angle),
            RawWeight::PolarPower { amplitude, exponent } => {
                WeightSpec::polar_power(amplitude, exponent)
            }
            RawWeight::Tabulated { angles, values } => WeightSpec::tabulated(angles, values),
        }
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::Domain(format!("{name} must be finite and >= 0, got {v}")));
    }
    Ok(())
}

impl WeightSpec {
    pub fn constant(value: f64) -> Result<Self> {
        check_nonneg("constant value", value)?;
        Ok(Self::Constant { value })
    }

    pub fn cap(amplitude: f64, cap_angle: f64) -> Result<Self> {
        check_nonneg("cap amplitude", amplitude)?;
        if !(cap_angle > 0.0 && cap_angle < PI) {
            return Err(Error::Domain(format!("cap angle must lie in (0, pi), got {cap_angle}")));
        }
        Ok(Self::Cap { amplitude, cap_angle })
    }

    pub fn polar_power(amplitude: f64, exponent: f64) -> Result<Self> {
        check_nonneg("polar power amplitude", amplitude)?;
        check_nonneg("polar power exponent", exponent)?;
        Ok(Self::PolarPower { amplitude, exponent })
    }

    pub fn tabulated(angles: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if angles.is_empty() || angles.len() != values.len() {
            return Err(Error::Domain(format!(
                "tabulated weight needs matching non-empty angles and values ({} vs {})",
                angles.len(),
                values.len()
            )));
        }
        if angles.iter().any(|a| !(*a > 0.0 && *a < PI)) {
            return Err(Error::Domain("tabulated angles must lie in (0, pi)".into()));
        }
        if angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("tabulated angles must be strictly increasing".into()));
        }
        for v in &values {
            check_nonneg("tabulated value", *v)?;
        }
        Ok(Self::Tabulated { angles, values })
    }

    /// Pointwise value Φ(θ).
    pub fn evaluate(&self, theta: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("angle {theta} outside [0, pi]")));
        }
        Ok(match self {
            Self::Constant { value } => *value,
            Self::Cap { amplitude, cap_angle } => {
                if theta < *cap_angle {
                    *amplitude
                } else {
                    0.0
                }
            }
            Self::PolarPower { amplitude, exponent } => {
                if *exponent == 0.0 {
                    *amplitude
                } else if theta == 0.0 {
                    return Err(Error::SingularPoint { theta });
                } else {
                    amplitude * theta.powf(-exponent)
                }
            }
            Self::Tabulated { angles, values } => interpolate(angles, values, theta),
        })
    }

    /// Multiply the weight by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        check_nonneg("scale factor", factor)?;
        Ok(match self {
            Self::Constant { value } => Self::Constant { value: value * factor },
            Self::Cap { amplitude, cap_angle } => {
                Self::Cap { amplitude: amplitude * factor, cap_angle: *cap_angle }
            }
            Self::PolarPower { amplitude, exponent } => {
                Self::PolarPower { amplitude: amplitude * factor, exponent: *exponent }
            }
            Self::Tabulated { angles, values } => Self::Tabulated {
                angles: angles.clone(),
                values: values.iter().map(|v| v * factor).collect(),
            },
        })
    }

    /// Exponent of the θ = 0 singularity (zero for bounded weights).
    pub fn singular_exponent(&self) -> f64 {
        match self {
            Self::PolarPower { exponent, .. } => *exponent,
            _ => 0.0,
        }
    }

    /// True when Φ vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            Self::Constant { value } => *value == 0.0,
            Self::Cap { amplitude, .. } | Self::PolarPower { amplitude, .. } => *amplitude == 0.0,
            Self::Tabulated { values, .. } => values.iter().all(|v| *v == 0.0),
        }
    }

    /// A rule adapted to integrating `Φ^power · g` for smooth `g`: breakpoints
    /// at the discontinuities of Φ, a graded mesh at polar singularities.
    pub fn rule_for_power(&self, d: usize, n: usize, power: f64) -> Result<QuadratureRule> {
        match self {
            Self::Constant { .. } => sphere::axisym_rule(d, n),
            Self::Cap { cap_angle, .. } => panel_rule(d, &[0.0, *cap_angle, PI], n),
            Self::PolarPower { exponent, .. } => split_rule(d, n, power * exponent),
            Self::Tabulated { angles, .. } => {
                let mut breaks = Vec::with_capacity(angles.len() + 2);
                breaks.push(0.0);
                breaks.extend_from_slice(angles);
                breaks.push(PI);
                // each linear piece gets a share of the nodes, at least 8
                let per = (2 * n / (breaks.len() - 1)).max(8);
                panel_rule(d, &breaks, per)
            }
        }
    }

    /// Rule adapted to integrating `Φ · g` (matrix elements, weighted norms).
    pub fn adapted_rule(&self, d: usize, n: usize) -> Result<QuadratureRule> {
        self.rule_for_power(d, n, 1.0)
    }

    /// Check that Φ ∈ L^p(S^{d-1}).
    pub fn check_integrable(&self, p: f64, d: usize) -> Result<()> {
        if let Self::PolarPower { exponent, amplitude } = self {
            let critical = d as f64 - 1.0;
            let product = p * exponent;
            if *amplitude > 0.0 && product > critical - INTEGRABILITY_MARGIN {
                return Err(Error::NotInLp { p, product, critical });
            }
        }
        Ok(())
    }

    /// Short human-readable description, in the command-line grammar.
    pub fn describe(&self) -> String {
        match self {
            Self::Constant { value } => format!("constant:{value}"),
            Self::Cap { amplitude, cap_angle } => format!("cap:{amplitude},{cap_angle}"),
            Self::PolarPower { amplitude, exponent } => format!("polar_power:{amplitude},{exponent}"),
            Self::Tabulated { angles, .. } => format!("tabulated[{} points]", angles.len()),
        }
    }
}

fn interpolate(angles: &[f64], values: &[f64], theta: f64) -> f64 {
    let n = angles.len();
    if theta <= angles[0] {
        return values[0];
    }
    if theta >= angles[n - 1] {
        return values[n - 1];
    }
    let k = angles.partition_point(|a| *a <= theta);
    let (a0, a1) = (angles[k - 1], angles[k]);
    let s = (theta - a0) / (a1 - a0);
    values[k - 1] + s * (values[k] - values[k - 1])
}

/// `‖Φ‖_{L^p(S^{d-1})}` with the default adapted rule.
pub fn lp_norm(spec: &WeightSpec, p: f64, d: usize) -> Result<f64> {
    spec.check_integrable(p, d)?;
    let rule = spec.rule_for_power(d, sphere::DEFAULT_NODES, p)?;
    lp_norm_with_rule(spec, p, d, &rule)
}

/// `‖Φ‖_{L^p(S^{d-1})}`; constants and caps use closed forms, other weights
/// the given rule (which should come from [`WeightSpec::rule_for_power`]).
pub fn lp_norm_with_rule(spec: &WeightSpec, p: f64, d: usize, rule: &QuadratureRule) -> Result<f64> {
    let dim = SphereDim::hardy(d)?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("L^p norm needs finite p >= 1, got {p}")));
    }
    spec.check_integrable(p, d)?;
    match spec {
        WeightSpec::Constant { value } => Ok(value * sphere::unit_sphere_measure(dim.as_f64()).powf(1.0 / p)),
        WeightSpec::Cap { amplitude, cap_angle } => {
            Ok(amplitude * cap_area(d, *cap_angle)?.powf(1.0 / p))
        }
        _ => {
            if rule.d != dim {
                return Err(Error::Usage("rule dimension does not match".into()));
            }
            let samples = rule
                .thetas
                .iter()
                .map(|&t| spec.evaluate(t).map(|v| v.powf(p)))
                .collect::<Result<Vec<_>>>()?;
            Ok(sphere::integrate(rule, &samples)?.powf(1.0 / p))
        }
    }
}

/// Area of the polar cap `{θ < θ_c}` on S^{d-1}:
/// `|S^{d-2}| ∫_0^{θ_c} sin^{d-2} θ dθ`, by the reduction formula for the
/// sine integral.
pub fn cap_area(d: usize, cap_angle: f64) -> Result<f64> {
    let dim = SphereDim::hardy(d)?;
    let k = d - 2;
    // I_k(x) = ∫_0^x sin^k; I_k = -sin^{k-1}x cos x / k + (k-1)/k I_{k-2}
    let (s, c) = cap_angle.sin_cos();
    let mut i_prev = cap_angle; // I_0
    let mut i_cur = 1.0 - c; // I_1
    if k == 0 {
        i_cur = i_prev;
    } else {
        for m in 2..=k {
            let next = -s.powi(m as i32 - 1) * c / m as f64 + (m as f64 - 1.0) / m as f64 * i_prev;
            i_prev = i_cur;
            i_cur = next;
        }
    }
    Ok(sphere::unit_sphere_measure(dim.as_f64() - 1.0) * i_cur)
}

/// Theorem whose hypotheses select the admissible p-range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// Full compensation of the classical constant.
    Main,
    /// Partial compensation with ν₀ < 1.
    Main2,
    /// Partial compensation with ν₀ < ν ≤ 1 through the nonlinear α-μ curve.
    Theorem4,
    /// Fractional Laplacian, p = d/(2κ).
    Fractional,
}

impl TheoremId {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Main => "main",
            Self::Main2 => "main2",
            Self::Theorem4 => "theorem4",
            Self::Fractional => "fractional",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main" => Ok(Self::Main),
            "main2" => Ok(Self::Main2),
            "theorem4" => Ok(Self::Theorem4),
            "fractional" => Ok(Self::Fractional),
            other => Err(Error::Usage(format!(
                "unknown theorem id '{other}' (expected main, main2, theorem4 or fractional)"
            ))),
        }
    }
}

/// Interval of admissible exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PRange {
    pub theorem_id: TheoremId,
    pub lower: f64,
    pub upper: f64,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl PRange {
    pub fn contains(&self, p: f64) -> bool {
        let above = if self.lower_closed { p >= self.lower } else { p > self.lower };
        let below = if self.upper.is_infinite() {
            true
        } else if self.upper_closed {
            p <= self.upper
        } else {
            p < self.upper
        };
        above && below
    }

    /// The range for `theorem` in dimension `d >= 3`.
    pub fn for_theorem(theorem: TheoremId, d: usize) -> Result<Self> {
        let dim = SphereDim::hardy(d)?;
        let df = dim.as_f64();
        let full = full_compensation_exponent(d);
        let r = |lower, upper, lower_closed, upper_closed| PRange {
            theorem_id: theorem,
            lower,
            upper,
            lower_closed,
            upper_closed,
        };
        Ok(match theorem {
            TheoremId::Main => r(full, f64::INFINITY, true, false),
            TheoremId::Main2 if d == 3 => r(1.0, full, false, false),
            TheoremId::Main2 => r(0.5 * (df - 1.0), full, true, false),
            TheoremId::Theorem4 => r((0.5 * (df - 1.0)).max(1.0), full, false, false),
            TheoremId::Fractional => r(0.5 * df, f64::INFINITY, true, false),
        })
    }
}

impl fmt::Display for PRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lower_closed { '[' } else { '(' };
        let u = if self.upper_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{u}", self.lower, self.upper)
    }
}

/// `(d-2)²/(2(d-1)) + 1`, the smallest p with full compensation.
pub fn full_compensation_exponent(d: usize) -> f64 {
    let df = d as f64;
    (df - 2.0).powi(2) / (2.0 * (df - 1.0)) + 1.0
}

/// Whether `p` is admissible for `theorem` and Φ ∈ L^p; always returns the
/// range used.
pub fn admissible(spec: &WeightSpec, d: usize, p: f64, theorem: TheoremId) -> Result<(bool, PRange)> {
    let range = PRange::for_theorem(theorem, d)?;
    let ok = range.contains(p) && spec.check_integrable(p, d).is_ok();
    Ok((ok, range))
}

/// Fail with a descriptive error unless `p` lies in the theorem's range.
pub fn require_p_in_range(d: usize, p: f64, theorem: TheoremId) -> Result<PRange> {
    let range = PRange::for_theorem(theorem, d)?;
    if !range.contains(p) {
        return Err(Error::PRange { p, range: range.to_string(), theorem: theorem.to_string() });
    }
    Ok(range)
}
