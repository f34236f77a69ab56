//! The `hardy` command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::alpha_mu::{linear_threshold, AlphaMuCurve, CurveOptions};
use crate::constants::{classical_constant, nu0, HardyConstants};
use crate::error::{Error, Result};
use crate::rearrangement::{numeric_rearrangement_check, rearranged_weight, HomogeneousWeight};
use crate::spectral::{lowest_eigenvalue_converged, EigenResult};
use crate::sphere::{surface_area, SphereDim};
use crate::verifier::{
    fractional_gaussian_check_scaled, hardy_gap_scaled, Angular, GapMode, HardyReport, Radial, TrialFunction,
};
use crate::weights::{lp_norm, PRange, TheoremId, WeightSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;
pub const EXIT_NO_CONVERGENCE: i32 = 4;

pub const CSV_COLUMNS: [&str; 16] = [
    "theorem_id", "d", "p", "kappa", "nu", "weight_desc", "lp_norm", "tau", "nu0", "lambda1", "mu", "alpha", "lhs",
    "rhs", "gap", "holds",
];

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence(_) | Error::NonFinite { .. } | Error::Bracket { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_VALIDATION,
    }
}

#[derive(Debug, Parser)]
#[command(name = "hardy", version, about = "Sharp Hardy constants for homogeneous angular weights")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Surface measure |S^{d-1}|.
    Area {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// L^p norm of the weight on the sphere.
    Norm {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, value_parser = parse_weight_arg)]
        weight: WeightSpec,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Hardy constant τ for one theorem.
    Tau {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_parser = parse_weight_arg)]
        weight: WeightSpec,
        #[arg(long, default_value = "main", value_parser = parse_theorem)]
        theorem: TheoremId,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Lowest eigenvalue of -Δ_θ - scale·Φ.
    Eig {
        #[arg(long)]
        d: usize,
        #[arg(long, value_parser = parse_weight_arg)]
        weight: WeightSpec,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Starting basis degree L.
        #[arg(long, default_value_t = 32)]
        degree: usize,
        #[arg(long, default_value_t = 1024)]
        max_degree: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sampled μ(α) curve.
    Curve {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 48)]
        samples: usize,
        #[arg(long, default_value_t = 40.0)]
        max_factor: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Coefficient of the symmetric decreasing rearrangement of Φ/|x|^{2κ}.
    Rearrange {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        kappa: f64,
        #[arg(long, value_parser = parse_weight_arg)]
        weight: WeightSpec,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// One inequality on one trial function.
    Verify {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_parser = parse_weight_arg)]
        weight: WeightSpec,
        #[arg(long, default_value = "main", value_parser = parse_theorem)]
        theorem: TheoremId,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        kappa: Option<f64>,
        /// gaussian:<sigma> | power_cutoff:<eps> | compact_bump:<r0>,<r1>
        #[arg(long, default_value = "gaussian:1", value_parser = parse_radial)]
        radial: Radial,
        /// constant | basis_mode:<l> | eigen_profile
        #[arg(long, default_value = "constant")]
        angular: String,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 1.0)]
        tau_scale: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Full pipeline: every applicable theorem on a fixed set of trial functions.
    Report {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, value_parser = parse_weight_arg)]
        weight: WeightSpec,
        /// Values of ν for the nonlinear theorem; default (ν₀+1)/2 and 1.
        #[arg(long, value_delimiter = ',')]
        nu: Vec<f64>,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        /// Multiply every τ before checking (negative controls).
        #[arg(long, default_value_t = 1.0)]
        tau_scale: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn parse_theorem(s: &str) -> std::result::Result<TheoremId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_weight_arg(s: &str) -> std::result::Result<WeightSpec, String> {
    parse_weight(s).map_err(|e| e.to_string())
}

fn parse_radial(s: &str) -> std::result::Result<Radial, String> {
    parse_radial_spec(s).map_err(|e| e.to_string())
}

fn field(kind: &str, name: &str, raw: &str) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| Error::Usage(format!("{kind}: field '{name}' = '{raw}' is not a number")))
}

fn fields<'a>(kind: &str, rest: &'a str, names: &[&str]) -> Result<Vec<f64>> {
    let parts: Vec<&'a str> = rest.split(',').collect();
    if parts.len() != names.len() {
        return Err(Error::Usage(format!(
            "{kind}: expected {} field(s) <{}>, got {}",
            names.len(),
            names.join(">,<"),
            parts.len()
        )));
    }
    parts.iter().zip(names).map(|(raw, name)| field(kind, name, raw)).collect()
}

/// `constant:<c>`, `cap:<a>,<theta_c>`, `polar_power:<a>,<beta>` or
/// `tabulated:@<file>`.
pub fn parse_weight(s: &str) -> Result<WeightSpec> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::Usage(format!("weight '{s}' must look like <type>:<fields>")))?;
    let check = |r: Result<WeightSpec>| r.map_err(|e| Error::Usage(format!("{kind}: {e}")));
    match kind {
        "constant" => check(WeightSpec::constant(fields(kind, rest, &["c"])?[0])),
        "cap" => {
            let v = fields(kind, rest, &["a", "theta_c"])?;
            check(WeightSpec::cap(v[0], v[1]))
        }
        "polar_power" => {
            let v = fields(kind, rest, &["a", "beta"])?;
            check(WeightSpec::polar_power(v[0], v[1]))
        }
        "tabulated" => {
            let path = rest
                .strip_prefix('@')
                .ok_or_else(|| Error::Usage("tabulated: expected @<file>".into()))?;
            read_weight_file(Path::new(path))
        }
        other => Err(Error::Usage(format!(
            "unknown weight type '{other}' (constant, cap, polar_power, tabulated)"
        ))),
    }
}

/// JSON weight file, e.g. `{"type": "tabulated", "angles": [...], "values": [...]}`.
pub fn read_weight_file(path: &Path) -> Result<WeightSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
}

/// `gaussian:<sigma>`, `power_cutoff:<eps>` or `compact_bump:<r0>,<r1>`.
pub fn parse_radial_spec(s: &str) -> Result<Radial> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::Usage(format!("radial profile '{s}' must look like <type>:<fields>")))?;
    match kind {
        "gaussian" => Radial::gaussian(fields(kind, rest, &["sigma"])?[0]),
        "power_cutoff" => Radial::power_cutoff(fields(kind, rest, &["eps"])?[0]),
        "compact_bump" => {
            let v = fields(kind, rest, &["r0", "r1"])?;
            Radial::compact_bump(v[0], v[1])
        }
        other => Err(Error::Usage(format!(
            "unknown radial profile '{other}' (gaussian, power_cutoff, compact_bump)"
        ))),
    }
}

/// Angular choice before the eigenprofile is known.
#[derive(Debug, Clone, Copy, PartialEq)]
enum AngularChoice {
    Constant,
    Mode(usize),
    Eigen,
}

fn parse_angular(s: &str) -> Result<AngularChoice> {
    match s.split_once(':') {
        None if s == "constant" => Ok(AngularChoice::Constant),
        None if s == "eigen_profile" => Ok(AngularChoice::Eigen),
        Some(("basis_mode", l)) => l
            .trim()
            .parse()
            .map(AngularChoice::Mode)
            .map_err(|_| Error::Usage(format!("basis_mode: field 'l' = '{l}' is not a non-negative integer"))),
        _ => Err(Error::Usage(format!(
            "unknown angular part '{s}' (constant, basis_mode:<l>, eigen_profile)"
        ))),
    }
}

/// One row of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(flatten)]
    pub report: HardyReport,
    pub weight_desc: String,
    pub lp_norm: f64,
    pub nu0: Option<f64>,
    pub lambda1: Option<f64>,
    pub mu: Option<f64>,
    pub alpha: Option<f64>,
    pub trial: String,
    pub formula: String,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl ReportRow {
    pub fn csv_record(&self) -> Vec<String> {
        let r = &self.report;
        vec![
            r.theorem_id.to_string(),
            r.d.to_string(),
            num(r.p),
            num(r.kappa),
            opt(r.nu),
            self.weight_desc.clone(),
            num(self.lp_norm),
            num(r.tau_used),
            opt(self.nu0),
            opt(self.lambda1),
            opt(self.mu),
            opt(self.alpha),
            num(r.lhs),
            num(r.rhs),
            num(r.gap),
            r.holds.to_string(),
        ]
    }
}

pub fn rows_to_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for row in rows {
        w.write_record(row.csv_record()).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Constants for one theorem together with the curve point they use.
struct Setup {
    constants: HardyConstants,
    mode: Option<GapMode>,
    alpha: Option<f64>,
    mu: Option<f64>,
}

fn curve_for(d: usize, p: f64, samples: usize) -> Result<AlphaMuCurve> {
    let threshold = linear_threshold(d, p, false)?;
    let factor = classical_constant(d) / threshold;
    if factor <= 1.0 {
        return AlphaMuCurve::linear_only(d, p);
    }
    AlphaMuCurve::build(d, p, CurveOptions::new(samples.max(2), factor * 1.001))
}

fn setup(
    weight: &WeightSpec,
    d: usize,
    p: Option<f64>,
    theorem: TheoremId,
    nu: Option<f64>,
    kappa: Option<f64>,
    curve: &mut Option<AlphaMuCurve>,
    samples: usize,
) -> Result<Setup> {
    let need_p = || p.ok_or_else(|| Error::Usage(format!("--p is required for {theorem}")));
    let a2 = classical_constant(d);
    match theorem {
        TheoremId::Main => {
            let p = need_p()?;
            crate::weights::require_p_in_range(d, p, theorem)?;
            let constants = HardyConstants::main(weight, d, p)?;
            Ok(Setup { constants, mode: Some(GapMode::Main), alpha: Some(a2), mu: Some(a2) })
        }
        TheoremId::Main2 => {
            let constants = HardyConstants::main2(weight, d, need_p()?)?;
            let alpha = constants.nu0.map(|n| n * a2);
            Ok(Setup { constants, mode: Some(GapMode::Main2), alpha, mu: alpha })
        }
        TheoremId::Theorem4 => {
            let p = need_p()?;
            crate::weights::require_p_in_range(d, p, theorem)?;
            let nu = nu.ok_or_else(|| Error::Usage("--nu is required for theorem4".into()))?;
            if curve.is_none() {
                *curve = Some(curve_for(d, p, samples)?);
            }
            let c = curve.as_ref().expect("curve was just built");
            let constants = HardyConstants::theorem4(weight, d, p, nu, c)?;
            let alpha = nu * a2;
            Ok(Setup { constants, mode: Some(GapMode::Theorem4 { nu }), alpha: Some(alpha), mu: Some(c.mu_at(alpha)?) })
        }
        TheoremId::Fractional => {
            let kappa = match (kappa, p) {
                (Some(k), _) => k,
                (None, Some(p)) => d as f64 / (2.0 * p),
                (None, None) => return Err(Error::Usage("fractional needs --kappa or --p".into())),
            };
            let constants = HardyConstants::fractional(weight, d, kappa)?;
            if let Some(p) = p {
                if (p - constants.p).abs() > 1e-12 * p {
                    return Err(Error::Usage(format!("fractional uses p = d/(2 kappa) = {}, got --p {p}", constants.p)));
                }
            }
            Ok(Setup { constants, mode: None, alpha: None, mu: None })
        }
    }
}

fn eigen_for(weight: &WeightSpec, d: usize, tau: f64) -> Result<EigenResult> {
    let res = lowest_eigenvalue_converged(&weight.scaled(tau)?, d, 32, 1024, 1e-8)?;
    if !res.converged {
        return Err(Error::NoConvergence(format!(
            "lowest eigenvalue at degree {}: {} vs {}",
            res.degree, res.lambda1, res.lambda1_comparison
        )));
    }
    Ok(res)
}

fn rows_for(
    weight: &WeightSpec,
    s: &Setup,
    trials: &[(Radial, AngularChoice)],
    tau_scale: f64,
) -> Result<Vec<ReportRow>> {
    let c = &s.constants;
    let d = c.d;
    let base = |report: HardyReport, lambda1: Option<f64>, trial: String| ReportRow {
        report,
        weight_desc: weight.describe(),
        lp_norm: c.lp_norm,
        nu0: c.nu0,
        lambda1,
        mu: s.mu,
        alpha: s.alpha,
        trial,
        formula: c.formula.clone(),
    };
    let Some(mode) = s.mode else {
        for (radial, angular) in trials {
            if *radial != (Radial::Gaussian { sigma: 1.0 }) || *angular != AngularChoice::Constant {
                return Err(Error::Usage("the fractional check runs on the unit Gaussian with constant angular part".into()));
            }
        }
        let r = fractional_gaussian_check_scaled(d, c.kappa, weight, c, tau_scale)?;
        return Ok(vec![base(r, None, "gaussian(1)xconstant".into())]);
    };
    let eig = eigen_for(weight, d, c.tau * tau_scale)?;
    trials
        .iter()
        .map(|(radial, angular)| {
            let angular = match angular {
                AngularChoice::Constant => Angular::Constant,
                AngularChoice::Mode(l) => Angular::BasisMode { l: *l },
                AngularChoice::Eigen => Angular::EigenProfile { profile: eig.profile(d) },
            };
            let u = TrialFunction::new(*radial, angular);
            let r = hardy_gap_scaled(&u, weight, d, c.p, mode, c, tau_scale)?;
            Ok(base(r, Some(eig.lambda1), u.describe()))
        })
        .collect()
}

fn report_trials() -> Vec<(Radial, AngularChoice)> {
    vec![
        (Radial::Gaussian { sigma: 1.0 }, AngularChoice::Constant),
        (Radial::PowerCutoff { eps: 0.01 }, AngularChoice::Constant),
        (Radial::Gaussian { sigma: 1.0 }, AngularChoice::Mode(1)),
        (Radial::PowerCutoff { eps: 0.01 }, AngularChoice::Eigen),
        (Radial::CompactBump { r0: 0.5, r1: 2.0 }, AngularChoice::Eigen),
    ]
}

/// Theorems whose p-range contains `p` in dimension `d`.
pub fn applicable_theorems(d: usize, p: f64) -> Result<Vec<TheoremId>> {
    let mut out = Vec::new();
    for t in [TheoremId::Main, TheoremId::Main2, TheoremId::Theorem4, TheoremId::Fractional] {
        let range = PRange::for_theorem(t, d)?;
        let extra = t != TheoremId::Fractional || d as f64 / (2.0 * p) <= 1.0;
        if range.contains(p) && extra {
            out.push(t);
        }
    }
    Ok(out)
}

/// Rows of the full pipeline and whether every check holds.
pub fn report(
    d: usize,
    p: f64,
    weight: &WeightSpec,
    nus: &[f64],
    samples: usize,
    tau_scale: f64,
) -> Result<Vec<ReportRow>> {
    SphereDim::hardy(d)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be a finite number > 1, got {p}")));
    }
    weight.check_integrable(p, d)?;
    let theorems = applicable_theorems(d, p)?;
    if theorems.is_empty() {
        let ranges = [TheoremId::Main, TheoremId::Main2, TheoremId::Theorem4]
            .iter()
            .map(|t| PRange::for_theorem(*t, d).map(|r| format!("{t} {r}")))
            .collect::<Result<Vec<_>>>()?;
        return Err(Error::PRange { p, range: ranges.join(", "), theorem: "any theorem".into() });
    }
    let mut curve = None;
    let mut rows = Vec::new();
    for t in theorems {
        let nu_list: Vec<Option<f64>> = match t {
            TheoremId::Theorem4 if nus.is_empty() => {
                let n0 = nu0(d, p)?;
                vec![Some(0.5 * (n0 + 1.0)), Some(1.0)]
            }
            TheoremId::Theorem4 => nus.iter().map(|n| Some(*n)).collect(),
            _ => vec![None],
        };
        for nu in nu_list {
            let s = setup(weight, d, Some(p), t, nu, None, &mut curve, samples)?;
            let trials = if t == TheoremId::Fractional {
                vec![(Radial::Gaussian { sigma: 1.0 }, AngularChoice::Constant)]
            } else {
                report_trials()
            };
            rows.extend(rows_for(weight, &s, &trials, tau_scale)?);
        }
    }
    Ok(rows)
}

/// What a command produced.
struct Outcome {
    text: String,
    holds: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, holds: true }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string())).map(|s| s + "\n")
}

fn scalar(format: Format, value: f64, json: impl FnOnce() -> Result<String>) -> Result<Outcome> {
    Ok(Outcome::ok(match format {
        Format::Csv => format!("{value}\n"),
        Format::Json => json()?,
    }))
}

fn rows_outcome(format: Format, rows: &[ReportRow]) -> Result<Outcome> {
    let text = match format {
        Format::Csv => rows_to_csv(rows)?,
        Format::Json => to_json(&rows)?,
    };
    Ok(Outcome { text, holds: rows.iter().all(|r| r.report.holds) })
}

#[derive(Serialize)]
struct RearrangeOutput {
    d: usize,
    kappa: f64,
    weight_desc: String,
    coefficient: f64,
    /// Largest relative deviation of the layer-cake rearrangement.
    layer_cake_deviation: f64,
}

fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Area { d, out } => {
            let a = surface_area(*d)?;
            scalar(out.format, a, || to_json(&serde_json::json!({ "d": d, "area": a })))
        }
        Command::Norm { d, p, weight, out } => {
            let n = lp_norm(weight, *p, *d)?;
            scalar(out.format, n, || {
                to_json(&serde_json::json!({ "d": d, "p": p, "weight_desc": weight.describe(), "lp_norm": n }))
            })
        }
        Command::Tau { d, p, weight, theorem, nu, kappa, samples, out } => {
            SphereDim::hardy(*d)?;
            let s = setup(weight, *d, *p, *theorem, *nu, *kappa, &mut None, *samples)?;
            scalar(out.format, s.constants.tau, || to_json(&s.constants))
        }
        Command::Eig { d, weight, scale, degree, max_degree, tol, out } => {
            let res = lowest_eigenvalue_converged(&weight.scaled(*scale)?, *d, *degree, *max_degree, *tol)?;
            if !res.converged {
                return Err(Error::NoConvergence(format!(
                    "lowest eigenvalue at degree {}: {} vs {} at degree {}",
                    res.degree, res.lambda1, res.lambda1_comparison, res.degree_comparison
                )));
            }
            scalar(out.format, res.lambda1, || to_json(&res))
        }
        Command::Curve { d, p, samples, max_factor, out } => {
            let curve = AlphaMuCurve::build(*d, *p, CurveOptions::new(*samples, *max_factor))?;
            let text = match out.format {
                Format::Json => to_json(&curve)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    let io = |e: csv::Error| Error::Io(e.to_string());
                    w.write_record(["alpha", "mu", "residual"]).map_err(io)?;
                    for s in &curve.samples {
                        w.write_record([num(s.alpha), num(s.mu), num(s.residual)]).map_err(io)?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
                        .map_err(|e| Error::Io(e.to_string()))?
                }
            };
            Ok(Outcome::ok(text))
        }
        Command::Rearrange { d, kappa, weight, out } => {
            let w = HomogeneousWeight::new(weight.clone(), *kappa, *d)?;
            let r = rearranged_weight(&w)?;
            scalar(out.format, r.coefficient, || {
                to_json(&RearrangeOutput {
                    d: *d,
                    kappa: *kappa,
                    weight_desc: weight.describe(),
                    coefficient: r.coefficient,
                    layer_cake_deviation: numeric_rearrangement_check(&w, &[0.5, 1.0, 2.0])?,
                })
            })
        }
        Command::Verify { d, p, weight, theorem, nu, kappa, radial, angular, samples, tau_scale, out } => {
            SphereDim::hardy(*d)?;
            let angular = parse_angular(angular)?;
            let s = setup(weight, *d, *p, *theorem, *nu, *kappa, &mut None, *samples)?;
            let rows = rows_for(weight, &s, &[(*radial, angular)], *tau_scale)?;
            rows_outcome(out.format, &rows)
        }
        Command::Report { d, p, weight, nu, samples, tau_scale, out } => {
            let rows = report(*d, *p, weight, nu, *samples, *tau_scale)?;
            rows_outcome(out.format, &rows)
        }
    }
}

fn output_args(command: &Command) -> &OutputArgs {
    match command {
        Command::Area { out, .. }
        | Command::Norm { out, .. }
        | Command::Tau { out, .. }
        | Command::Eig { out, .. }
        | Command::Curve { out, .. }
        | Command::Rearrange { out, .. }
        | Command::Verify { out, .. }
        | Command::Report { out, .. } => out,
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &output_args(&cli.command).output {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_VALIDATION;
    }
    if outcome.holds {
        EXIT_OK
    } else {
        let _ = writeln!(stderr, "inequality check failed: at least one gap is negative");
        EXIT_CHECK_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("hardy").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn weight_grammar() {
        assert_eq!(parse_weight("constant:2").unwrap(), WeightSpec::constant(2.0).unwrap());
        assert_eq!(parse_weight("cap:1,1.5").unwrap(), WeightSpec::cap(1.0, 1.5).unwrap());
        assert_eq!(parse_weight("polar_power:1,0.5").unwrap(), WeightSpec::polar_power(1.0, 0.5).unwrap());
        let e = parse_weight("cap:1,x").unwrap_err().to_string();
        assert!(e.contains("theta_c"), "{e}");
        assert!(parse_weight("cap:1").unwrap_err().to_string().contains("expected 2"));
        assert!(parse_weight("disk:1").is_err());
        assert!(parse_weight("constant:-1").is_err());
    }

    #[test]
    fn scalar_commands() {
        let (code, out, _) = call(&["tau", "--d", "3", "--p", "1.25", "--weight", "constant:1"]);
        assert_eq!((code, out.trim()), (0, "0.25"));
        let (code, out, _) = call(&["area", "--d", "4"]);
        assert_eq!(code, 0);
        let area: f64 = out.trim().parse().unwrap();
        assert!((area - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-14);
        let (code, out, _) = call(&["tau", "--d", "3", "--p", "1.125", "--weight", "constant:1", "--theorem", "main2"]);
        assert_eq!((code, out.trim()), (0, "0.125"));
    }

    #[test]
    fn validation_exit_codes() {
        let (code, _, err) = call(&["tau", "--d", "3", "--p", "1.1", "--weight", "constant:1"]);
        assert_eq!(code, EXIT_VALIDATION);
        assert!(err.contains("[1.25"), "{err}");
        let (code, _, err) = call(&["norm", "--d", "3", "--p", "2", "--weight", "cap:1,x"]);
        assert_eq!(code, EXIT_VALIDATION);
        assert!(err.contains("theta_c"), "{err}");
        assert_eq!(call(&["area", "--d", "1"]).0, EXIT_VALIDATION);
        assert_eq!(call(&["bogus"]).0, EXIT_VALIDATION);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn verify_single_row() {
        let (code, out, _) = call(&["verify", "--d", "3", "--p", "2", "--weight", "constant:1", "--format", "json"]);
        assert_eq!(code, 0);
        let rows: Vec<ReportRow> = serde_json::from_str(&out).unwrap();
        let pi32 = std::f64::consts::PI.powf(1.5);
        assert!((rows[0].report.gap - pi32).abs() < 1e-12 * pi32);
        let (code, _, _) = call(&["verify", "--d", "3", "--p", "2", "--weight", "constant:1", "--radial", "power_cutoff:0.01", "--tau-scale", "1.1"]);
        assert_eq!(code, EXIT_CHECK_FAILED);
    }

    #[test]
    fn csv_layout() {
        let (code, out, _) = call(&["verify", "--d", "3", "--p", "2", "--weight", "constant:1"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 16);
        assert_eq!(row[0], "main");
        assert_eq!(row[4], "");
        assert_eq!(row[7], "2.5000000000000000e-1");
        assert_eq!(row[15], "true");
    }
}
