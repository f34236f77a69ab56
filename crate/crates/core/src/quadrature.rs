//! One-dimensional quadrature: Gauss–Jacobi rules and adaptive Gauss–Kronrod.

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Recurrence coefficients of the orthonormal Jacobi polynomials for the
/// weight `(1-x)^alpha (1+x)^beta` on [-1, 1].
///
/// `x p_k = b_{k+1} p_{k+1} + a_k p_k + b_k p_{k-1}`, `p_0 = 1/sqrt(mu0)`.
#[derive(Debug, Clone)]
pub struct JacobiRecurrence {
    pub alpha: f64,
    pub beta: f64,
    /// Diagonal entries `a_k`.
    pub a: Vec<f64>,
    /// Off-diagonal entries, `b[k]` couples `k-1` and `k` (`b[0]` unused).
    pub b: Vec<f64>,
    /// Total mass of the weight.
    pub mu0: f64,
}

impl JacobiRecurrence {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Self {
        let ab = alpha + beta;
        let mut a = Vec::with_capacity(n + 1);
        let mut b = vec![0.0; n + 2];
        for k in 0..=n {
            let kf = k as f64;
            let s = 2.0 * kf + ab;
            let ak = if k == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / (s * (s + 2.0))
            };
            a.push(ak);
        }
        for (k, bk) in b.iter_mut().enumerate().skip(1) {
            let kf = k as f64;
            let s = 2.0 * kf + ab;
            *bk = if k == 1 {
                2.0 / (2.0 + ab) * ((1.0 + alpha) * (1.0 + beta) / (3.0 + ab)).sqrt()
            } else {
                2.0 / s
                    * (kf * (kf + alpha) * (kf + beta) * (kf + ab) / ((s + 1.0) * (s - 1.0))).sqrt()
            };
        }
        let ln_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0)
            + ln_gamma(beta + 1.0)
            - ln_gamma(ab + 2.0);
        Self { alpha, beta, a, b, mu0: ln_mu0.exp() }
    }

    /// Values `p_0(x), ..., p_{n}(x)` of the orthonormal polynomials.
    pub fn eval_all(&self, x: f64, n: usize, out: &mut Vec<f64>) {
        out.clear();
        let p0 = 1.0 / self.mu0.sqrt();
        out.push(p0);
        if n == 0 {
            return;
        }
        out.push((x - self.a[0]) * p0 / self.b[1]);
        for k in 1..n {
            let next = ((x - self.a[k]) * out[k] - self.b[k] * out[k - 1]) / self.b[k + 1];
            out.push(next);
        }
    }

    /// `p_n(x)` and its derivative.
    fn eval_with_derivative(&self, x: f64, n: usize) -> (f64, f64) {
        let mut p_prev = 0.0;
        let mut dp_prev = 0.0;
        let mut p = 1.0 / self.mu0.sqrt();
        let mut dp = 0.0;
        for k in 0..n {
            let bk = if k == 0 { 0.0 } else { self.b[k] };
            let p_next = ((x - self.a[k]) * p - bk * p_prev) / self.b[k + 1];
            let dp_next = (p + (x - self.a[k]) * dp - bk * dp_prev) / self.b[k + 1];
            p_prev = p;
            dp_prev = dp;
            p = p_next;
            dp = dp_next;
        }
        (p, dp)
    }
}

/// Gauss–Jacobi nodes (ascending) and weights on [-1, 1] for the weight
/// `(1-x)^alpha (1+x)^beta`.
///
/// Golub–Welsch eigenvalues seed a Newton polish on the three-term
/// recurrence; weights come from the Christoffel function.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::Domain("quadrature needs at least one node".into()));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Domain(format!(
            "Jacobi exponents must exceed -1 (alpha = {alpha}, beta = {beta})"
        )));
    }
    let rec = JacobiRecurrence::new(n, alpha, beta);
    let mut nodes = rec.a[..n].to_vec();
    let mut off: Vec<f64> = rec.b[1..n].to_vec();
    off.push(0.0);
    tridiagonal_eigenvalues(&mut nodes, &mut off)?;
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut scratch = Vec::with_capacity(n + 1);
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = rec.eval_with_derivative(*x, n);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            *x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        rec.eval_all(*x, n - 1, &mut scratch);
        let christoffel: f64 = scratch.iter().map(|p| p * p).sum();
        weights.push(1.0 / christoffel);
    }
    Ok((nodes, weights))
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off[0..n-1]` (`off[n-1]` is scratch), by implicit QL with
/// Wilkinson shifts. Eigenvalues overwrite `diag`.
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence("tridiagonal eigenvalues".into()));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss–Legendre rule mapped onto [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (x, w) = gauss_legendre(n)?;
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    Ok((
        x.iter().map(|xi| c + h * xi).collect(),
        w.iter().map(|wi| h * wi).collect(),
    ))
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS_K[7] * fc;
    let mut gauss = GK_WEIGHTS_G[3] * fc;
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let s = f(c - dx) + f(c + dx);
        kronrod += GK_WEIGHTS_K[i] * s;
        if i % 2 == 1 {
            gauss += GK_WEIGHTS_G[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over [a, b].
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive_gk<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 20_000;
    let (v, e) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    loop {
        let total: f64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::NoConvergence(format!("non-finite integral on [{a}, {b}]")));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::NoConvergence(format!(
                "adaptive quadrature on [{a}, {b}] stalled at error {err:e}"
            )));
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}
