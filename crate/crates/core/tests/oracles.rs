//! Independent finite-difference discretizations checked against the
//! spectral solvers.

use hardy_core::alpha_mu::{mu_of_alpha, ProfileGrid};
use hardy_core::gn::gn_constant;

/// Tridiagonal system `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / m;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Cell-centered finite volumes for `K v + shift M v = M v^{q-1}` where
/// `K` has face conductances `faces` (length n+1, zero at both ends) and
/// `M = diag(mass)`. Returns the stiffness energy, mass and q-th power of
/// the positive solution reached from `start`.
struct Fv {
    faces: Vec<f64>,
    mass: Vec<f64>,
    shift: f64,
    q: f64,
}

impl Fv {
    fn residual(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.faces[i] * (v[i] - v[i - 1]) } else { 0.0 };
                let right = if i + 1 < n { self.faces[i + 1] * (v[i] - v[i + 1]) } else { 0.0 };
                left + right + self.mass[i] * (self.shift * v[i] - v[i].abs().powf(self.q - 2.0) * v[i])
            })
            .collect()
    }

    /// `(K + shift M) v`
    fn linear(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.faces[i] * (v[i] - v[i - 1]) } else { 0.0 };
                let right = if i + 1 < n { self.faces[i + 1] * (v[i] - v[i + 1]) } else { 0.0 };
                left + right + self.mass[i] * self.shift * v[i]
            })
            .collect()
    }

    fn tridiagonal(&self, n: usize, potential: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let lower: Vec<f64> = (0..n).map(|i| if i > 0 { -self.faces[i] } else { 0.0 }).collect();
        let upper: Vec<f64> = (0..n).map(|i| if i + 1 < n { -self.faces[i + 1] } else { 0.0 }).collect();
        let diag: Vec<f64> = (0..n)
            .map(|i| {
                let k = (if i > 0 { self.faces[i] } else { 0.0 }) + (if i + 1 < n { self.faces[i + 1] } else { 0.0 });
                k + self.mass[i] * (self.shift - potential[i])
            })
            .collect();
        (lower, diag, upper)
    }

    /// Petviashvili iteration from a positive bump, then Newton.
    fn solve(&self, mut v: Vec<f64>) -> Vec<f64> {
        let n = v.len();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let norm = |r: &[f64]| dot(r, r).sqrt();
        let (lower, diag, upper) = self.tridiagonal(n, &vec![0.0; n]);
        let gamma = (self.q - 1.0) / (self.q - 2.0);
        for _ in 0..2000 {
            let nl: Vec<f64> = v.iter().zip(&self.mass).map(|(v, m)| m * v.abs().powf(self.q - 1.0)).collect();
            let stab = (dot(&v, &self.linear(&v)) / dot(&v, &nl)).powf(gamma);
            let next: Vec<f64> = thomas(&lower, &diag, &upper, &nl).iter().map(|x| x * stab).collect();
            let change = norm(&next.iter().zip(&v).map(|(a, b)| a - b).collect::<Vec<_>>()) / norm(&next);
            v = next;
            if change < 1e-9 {
                break;
            }
        }
        // Newton until roundoff stops the decrease
        let mut r = self.residual(&v);
        for _ in 0..20 {
            let potential: Vec<f64> = v.iter().map(|x| (self.q - 1.0) * x.abs().powf(self.q - 2.0)).collect();
            let (lo, di, up) = self.tridiagonal(n, &potential);
            let delta = thomas(&lo, &di, &up, &r);
            let trial: Vec<f64> = v.iter().zip(&delta).map(|(a, b)| a - b).collect();
            let rt = self.residual(&trial);
            if norm(&rt) >= norm(&r) {
                break;
            }
            v = trial;
            r = rt;
        }
        assert!(norm(&r) < 1e-7 * norm(&self.linear(&v)), "finite-volume Newton stalled");
        v
    }

    /// (Σ faces Δv², Σ mass v², Σ mass |v|^q)
    fn integrals(&self, v: &[f64]) -> (f64, f64, f64) {
        let grad: f64 = (1..v.len()).map(|i| self.faces[i] * (v[i] - v[i - 1]).powi(2)).sum();
        let l2: f64 = v.iter().zip(&self.mass).map(|(v, m)| m * v * v).sum();
        let lq: f64 = v.iter().zip(&self.mass).map(|(v, m)| m * v.abs().powf(self.q)).sum();
        (grad, l2, lq)
    }
}

/// μ(α) on S² from cell-centered finite volumes in θ with `n` cells.
fn mu_fv_s2(alpha: f64, q: f64, n: usize) -> f64 {
    let h = std::f64::consts::PI / n as f64;
    // normalized measure sin θ dθ / 2
    let faces: Vec<f64> = (0..=n).map(|i| 0.5 * (i as f64 * h).sin() / h).collect();
    let mass: Vec<f64> = (0..n)
        .map(|i| 0.5 * ((i as f64 * h).cos() - ((i + 1) as f64 * h).cos()))
        .collect();
    let fv = Fv { faces, mass, shift: alpha, q };
    let amp = alpha.powf(1.0 / (q - 2.0));
    let start: Vec<f64> = (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) * h;
            1.5 * amp / (alpha.sqrt() * t).cosh()
        })
        .collect();
    let v = fv.solve(start);
    assert!(v.iter().all(|x| *x > 0.0));
    let (g, l2, lq) = fv.integrals(&v);
    (g + alpha * l2) / lq.powf(2.0 / q)
}

#[test]
fn mu_matches_finite_volume_oracle() {
    let (alpha, q) = (5.0, 6.0);
    let coarse = mu_fv_s2(alpha, q, 4000);
    let fine = mu_fv_s2(alpha, q, 8000);
    let oracle = (4.0 * fine - coarse) / 3.0;
    let sol = mu_of_alpha(alpha, 3, q, ProfileGrid::for_alpha(alpha, q)).unwrap();
    let rel = (sol.mu - oracle).abs() / oracle;
    assert!(rel < 1e-5, "spectral {} vs finite volume {oracle} ({rel:e})", sol.mu);
    assert!(sol.mu < alpha);
}

/// Ground-state quotient on a ball of radius `radius` in R^m by finite volumes.
fn gn_fv(m: usize, q: f64, radius: f64, n: usize) -> f64 {
    let h = radius / n as f64;
    let mf = m as f64;
    let faces: Vec<f64> = (0..=n)
        .map(|i| if i == n { 0.0 } else { (i as f64 * h).powf(mf - 1.0) / h })
        .collect();
    let mass: Vec<f64> = (0..n)
        .map(|i| (((i + 1) as f64 * h).powf(mf) - (i as f64 * h).powf(mf)) / mf)
        .collect();
    let fv = Fv { faces, mass, shift: 1.0, q };
    // rough central values of the cubic ground states in two and three dimensions
    let a0 = if m == 2 { 2.2 } else { 4.3 };
    let start: Vec<f64> = (0..n).map(|i| a0 / ((i as f64 + 0.5) * h).cosh()).collect();
    let v = fv.solve(start);
    assert!(v.iter().all(|x| *x > 0.0));
    let (a, b, c) = fv.integrals(&v);
    let rho = mf * (q - 2.0) / (2.0 * q);
    a.powf(rho) * b.powf(1.0 - rho) / c.powf(2.0 / q)
}

fn check_gn(m: usize, q: f64) {
    let coarse = gn_fv(m, q, 30.0, 6000);
    let fine = gn_fv(m, q, 30.0, 12000);
    let oracle = (4.0 * fine - coarse) / 3.0;
    let g = gn_constant(m, q).unwrap();
    // radial integrals omit the |S^{m-1}| factor
    let area = if m == 2 { 2.0 * std::f64::consts::PI } else { 4.0 * std::f64::consts::PI };
    let oracle = oracle * area.powf(1.0 - 2.0 / q);
    let rel = (g.k - oracle).abs() / oracle;
    assert!(rel < 1e-4, "m = {m}, q = {q}: shooting {} vs ball {oracle} ({rel:e})", g.k);
}

#[test]
fn gn_constant_matches_disk_oracle() {
    check_gn(2, 4.0);
}

#[test]
fn gn_constant_matches_ball_oracle() {
    check_gn(3, 4.0);
}

#[test]
fn gn_constant_tends_to_one_near_two() {
    // ρ → 0: the quotient at a fixed profile tends to 1
    let g = gn_constant(2, 2.5).unwrap();
    let h = gn_constant(2, 3.0).unwrap();
    assert!((g.k - 1.0).abs() < (h.k - 1.0).abs());
    assert!(g.rho < h.rho && g.rho > 0.0);
}
