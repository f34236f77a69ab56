//! Sharp Gagliardo–Nirenberg constant on R^m through the radial ground state
//! of `-Δw + w = w^{q-1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::unit_sphere_measure;

/// Smallest value `k` of `‖∇u‖₂^{2ρ} ‖u‖₂^{2(1-ρ)} / ‖u‖_q²` on R^m, with
/// `ρ = m(q-2)/(2q)`, and the one-bound-state constant
/// `l1 = [ρ^{-ρ}(1-ρ)^{-(1-ρ)} k]^{-p}`, `p = q/(q-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnConstant {
    pub m: usize,
    pub q: f64,
    pub rho: f64,
    pub k: f64,
    pub l1: f64,
    /// `w(0)` of the ground state.
    pub center: f64,
    /// `∫|∇w|²`, `∫w²`, `∫w^q` over R^m.
    pub gradient_sq: f64,
    pub mass: f64,
    pub lq_power: f64,
}

const STATE: usize = 5;
type State = [f64; STATE];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    /// `w` crossed zero.
    Over,
    /// `w` turned upward while positive, or stayed away from zero.
    Under,
}

struct Trajectory {
    outcome: Outcome,
    /// Integrals accumulated up to the stopping point.
    y: State,
}

fn rhs(m: f64, q: f64, r: f64, y: &State) -> State {
    let (w, v) = (y[0], y[1]);
    let rm = r.powf(m - 1.0);
    let wp = w.abs().powf(q - 1.0) * w.signum();
    [
        v,
        -(m - 1.0) / r * v + w - wp,
        rm * v * v,
        rm * w * w,
        rm * w.abs().powf(q),
    ]
}

const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn dp_step(m: f64, q: f64, r: f64, y: &State, h: f64) -> (State, f64) {
    let mut k = [[0.0; STATE]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..STATE {
                ys[i] += h * DP_A[s][j] * kj[i];
            }
        }
        k[s] = rhs(m, q, r + DP_C[s] * h, &ys);
    }
    let mut out = *y;
    let mut err = 0.0f64;
    for i in 0..STATE {
        let mut inc = 0.0;
        let mut e = 0.0;
        for s in 0..7 {
            inc += DP_B[s] * k[s][i];
            e += DP_E[s] * k[s][i];
        }
        out[i] += h * inc;
        // only the ODE components steer the step size
        if i < 2 {
            let scale = 1e-13 + 1e-12 * y[i].abs().max(out[i].abs());
            err = err.max((h * e).abs() / scale);
        }
    }
    (out, err)
}

fn shoot(m: f64, q: f64, a: f64, r_max: f64) -> Trajectory {
    // series start: w = a + c r², c = (a - a^{q-1}) / (2m)
    let r0 = 1e-4;
    let c = (a - a.powf(q - 1.0)) / (2.0 * m);
    let w0 = a + c * r0 * r0;
    let v0 = 2.0 * c * r0;
    let rm = r0.powf(m);
    let mut y: State = [
        w0,
        v0,
        4.0 * c * c * r0.powf(m + 2.0) / (m + 2.0),
        a * a * rm / m,
        a.powf(q) * rm / m,
    ];
    let mut r = r0;
    let mut h = 1e-3f64;
    while r < r_max {
        h = h.min(r_max - r);
        let (next, err) = dp_step(m, q, r, &y, h);
        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            continue;
        }
        if next[0] < 0.0 {
            return Trajectory { outcome: Outcome::Over, y };
        }
        if next[1] > 0.0 {
            return Trajectory { outcome: Outcome::Under, y };
        }
        y = next;
        r += h;
        h *= if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
    }
    Trajectory { outcome: Outcome::Under, y }
}

/// Shooting on `w'' + (m-1)/r w' - w + w^{q-1} = 0`, `w'(0) = 0`, bisecting
/// the central value until the trajectory neither crosses zero nor turns up.
pub fn gn_constant(m: usize, q: f64) -> Result<GnConstant> {
    if m < 1 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    let mf = m as f64;
    let upper = if m <= 2 { f64::INFINITY } else { 2.0 * mf / (mf - 2.0) };
    if !(q > 2.0 && q < upper) {
        return Err(Error::Domain(format!("q = {q} outside (2, {upper}) for m = {m}")));
    }
    let r_max = 30.0;
    let (mut lo, mut hi) = (1.0f64, 10.0f64);
    if shoot(mf, q, hi, r_max).outcome == Outcome::Under {
        return Err(Error::Bracket { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(mf, q, mid, r_max).outcome {
            Outcome::Over => hi = mid,
            Outcome::Under => lo = mid,
        }
    }
    let t_lo = shoot(mf, q, lo, r_max);
    let t_hi = shoot(mf, q, hi, r_max);
    let area = unit_sphere_measure(mf);
    let avg = |i: usize| 0.5 * (t_lo.y[i] + t_hi.y[i]) * area;
    let (gradient_sq, mass, lq_power) = (avg(2), avg(3), avg(4));
    let rho = mf * (q - 2.0) / (2.0 * q);
    let k = mass.powf(1.0 - rho) * gradient_sq.powf(rho) / lq_power.powf(2.0 / q);
    let p = q / (q - 2.0);
    let l1 = (rho.powf(-rho) * (1.0 - rho).powf(-(1.0 - rho)) * k).powf(-p);
    Ok(GnConstant { m, q, rho, k, l1, center: 0.5 * (lo + hi), gradient_sq, mass, lq_power })
}
