//! Monge–Kantorovich lower bounds on `X_q`.
//!
//! Test functions are real polynomials `F(A) = Σ_{k=1..D} c_k T_k(2A - 1)`.
//! The denominator is an upper bound for the `ρ_q`-Lipschitz constant of
//! `F`, so every evaluated quotient `|μ(F) - ν(F)| / L̂(F)` is a valid lower
//! bound of the distance between the two states.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::spectral::{f_func, gauss_legendre};
use crate::qscalar::QParam;

/// Optimizer settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MkConfig {
    /// Polynomial degree is `N + extra_degree`.
    pub extra_degree: u32,
    pub starts: u32,
    pub fd_step: f64,
    pub iterations: u32,
}

impl Default for MkConfig {
    fn default() -> Self {
        MkConfig {
            extra_degree: 8,
            starts: 8,
            fd_step: 1e-4,
            iterations: 200,
        }
    }
}

/// A finitely supported probability measure on the spectrum of `A`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMeasure {
    /// `(point, weight)` pairs.
    pub points: Vec<(f64, f64)>,
}

impl PointMeasure {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().map(|&(s, w)| w * f(s)).sum()
    }
}

/// The counit: the point mass at `0`.
pub fn counit_measure() -> PointMeasure {
    PointMeasure {
        points: vec![(0.0, 1.0)],
    }
}

/// `h_N` restricted to functions of `A`, exact on polynomials of degree
/// `<= max_poly_degree`.
pub fn hn_measure(n: u32, p: &QParam, max_poly_degree: u32) -> PointMeasure {
    let top = p.bracket(n + 1);
    if p.is_classical() {
        // density (N+1)(1-s)^N on [0,1]
        let count = ((n + max_poly_degree) / 2 + 2) as usize;
        let points = gauss_legendre(count)
            .into_iter()
            .map(|(x, w)| {
                let s = 0.5 * (x + 1.0);
                (s, 0.5 * w * top * (1.0 - s).powi(n as i32))
            })
            .collect();
        return PointMeasure { points };
    }
    let lq = p.ln_q();
    let mut points = Vec::new();
    let mut total = 0.0;
    for r in 0u64.. {
        let logp: f64 = (1..=n as u64)
            .map(|j| (-(2.0 * (r + j) as f64 * lq).exp()).ln_1p())
            .sum();
        let w = (1.0 - p.q() * p.q()) * top * (2.0 * r as f64 * lq + logp).exp();
        points.push((p.q_pow(2 * (n as i64 + r as i64)), w));
        total += w;
        if (1.0 - total).abs() < 1e-16 || (r > 10 && w < 1e-300) {
            break;
        }
    }
    PointMeasure { points }
}

/// Chebyshev values `T_1..T_D` at `x`.
fn chebyshev_row(x: f64, d: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(d);
    let (mut t0, mut t1) = (1.0, x);
    for _ in 0..d {
        row.push(t1);
        let t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    row
}

/// Rigorous upper bounds for the Lipschitz constant of `F` on `(X_q, ρ_q)`.
struct LipBound {
    // rows: difference quotients of T_k between neighbouring points
    rows: Vec<Vec<f64>>,
    // multiplies Σ k² |c_k|
    tail: f64,
    classical: bool,
}

impl LipBound {
    fn new(p: &QParam, n: u32, d: usize, fine: bool) -> Self {
        if p.is_classical() {
            // dF/dθ = Σ k c_k sin(kφ) with φ = π/2 - θ
            let grid = if fine { 100_000 } else { (40 * d).max(1000) };
            let h = PI / grid as f64;
            let rows = (0..=grid)
                .map(|i| {
                    let phi = i as f64 * h;
                    (1..=d).map(|k| k as f64 * (k as f64 * phi).sin()).collect()
                })
                .collect();
            // the derivative of Σ k c_k sin(kφ) is at most Σ k² |c_k|
            return LipBound {
                rows,
                tail: 0.5 * h,
                classical: true,
            };
        }
        let lq = p.ln_q();
        let mmax = n as u64 + (1e-16f64.ln() / lq).ceil() as u64;
        let q = p.q();
        let mut rows = Vec::with_capacity(mmax as usize);
        let mut prev = chebyshev_row(2.0 - 1.0, d);
        for m in 0..mmax {
            let s_next = p.q_pow(2 * (m as i64 + 1));
            let next = chebyshev_row(2.0 * s_next - 1.0, d);
            // ρ between q^(2m) and q^(2m+2)
            let rho = (1.0 - q * q) * (m as f64 * lq).exp() / (-((2 * m + 2) as f64 * lq).exp_m1()).sqrt();
            rows.push(prev.iter().zip(&next).map(|(a, b)| (a - b) / rho).collect());
            prev = next;
        }
        // beyond mmax: |ΔF| <= 2 Σ k²|c_k| (s_m - s_m+1) and ρ >= (1-q²) q^m
        LipBound {
            rows,
            tail: 2.0 * (mmax as f64 * lq).exp(),
            classical: false,
        }
    }

    fn eval(&self, c: &[f64]) -> f64 {
        let grid = self
            .rows
            .iter()
            .map(|r| r.iter().zip(c).map(|(a, b)| a * b).sum::<f64>().abs())
            .fold(0.0, f64::max);
        let dmax: f64 = c
            .iter()
            .enumerate()
            .map(|(i, ck)| ((i + 1) as f64).powi(2) * ck.abs())
            .sum();
        if self.classical {
            grid + self.tail * dmax
        } else {
            grid.max(self.tail * dmax)
        }
    }
}

/// Result of the lower-bound search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MkResult {
    pub value: f64,
    /// Chebyshev coefficients of the best polynomial (`T_1..T_D`).
    pub coeffs: Vec<f64>,
    /// Best quotient reached from each start.
    pub start_values: Vec<f64>,
    /// Number of accepted ascent steps summed over all starts.
    pub steps: u32,
    /// The winning start stopped on a stationary point, not on the iteration cap.
    pub converged: bool,
}

fn normalize(c: &mut [f64]) {
    let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        c.iter_mut().for_each(|x| *x /= n);
    }
}

/// Chebyshev coefficients `T_1..T_D` interpolating `g` on `[0, 1]`.
fn chebyshev_interpolant(g: impl Fn(f64) -> f64, d: usize) -> Vec<f64> {
    let n = d + 1;
    let vals: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let t = PI * (j as f64 + 0.5) / n as f64;
            (t, g(0.5 * (t.cos() + 1.0)))
        })
        .collect();
    (1..=d)
        .map(|k| 2.0 / n as f64 * vals.iter().map(|(t, v)| v * (k as f64 * t).cos()).sum::<f64>())
        .collect()
}

/// Largest `|μ(F) - ν(F)| / L̂(F)` found by multi-start projected ascent.
pub fn mk_between(mu: &PointMeasure, nu: &PointMeasure, p: &QParam, n: u32, cfg: &MkConfig, seed: u64) -> MkResult {
    let d = (n + cfg.extra_degree).max(1) as usize;
    let moment = |m: &PointMeasure| {
        let mut acc = vec![0.0; d];
        for &(s, w) in &m.points {
            for (a, t) in acc.iter_mut().zip(chebyshev_row(2.0 * s - 1.0, d)) {
                *a += w * t;
            }
        }
        acc
    };
    let diff: Vec<f64> = moment(mu).iter().zip(moment(nu)).map(|(a, b)| a - b).collect();
    let lip = LipBound::new(p, n, d, false);
    let objective = |c: &[f64]| {
        let num: f64 = diff.iter().zip(c).map(|(a, b)| a * b).sum::<f64>().abs();
        let l = lip.eval(c);
        if l > 0.0 {
            num / l
        } else {
            0.0
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    starts.push(chebyshev_interpolant(|s| f_func(p, s), d));
    let mut linear = vec![0.0; d];
    linear[0] = 1.0;
    starts.push(linear);
    while starts.len() < cfg.starts.max(1) as usize {
        starts.push((1..=d).map(|k| rng.gen_range(-1.0..1.0) / k as f64).collect());
    }

    let mut best = MkResult {
        value: 0.0,
        coeffs: vec![0.0; d],
        start_values: Vec::new(),
        steps: 0,
        converged: false,
    };
    for mut c in starts {
        normalize(&mut c);
        let mut val = objective(&c);
        let mut stalled = false;
        for _ in 0..cfg.iterations {
            let mut grad = vec![0.0; d];
            for i in 0..d {
                let mut cp = c.clone();
                cp[i] += cfg.fd_step;
                grad[i] = (objective(&cp) - val) / cfg.fd_step;
            }
            // project onto the tangent space of the unit sphere
            let radial: f64 = grad.iter().zip(&c).map(|(g, x)| g * x).sum();
            grad.iter_mut().zip(&c).for_each(|(g, x)| *g -= radial * x);
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gnorm < 1e-14 {
                stalled = true;
                break;
            }
            let mut t = 1.0 / gnorm;
            let mut improved = false;
            for _ in 0..40 {
                let mut trial: Vec<f64> = c.iter().zip(&grad).map(|(x, g)| x + t * g).collect();
                normalize(&mut trial);
                let v = objective(&trial);
                if v > val {
                    c = trial;
                    val = v;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                stalled = true;
                break;
            }
            best.steps += 1;
        }
        best.start_values.push(val);
        if val > best.value || best.start_values.len() == 1 {
            best.value = val;
            best.coeffs = c;
            best.converged = stalled;
        }
    }
    if p.is_classical() && best.value > 0.0 {
        // recheck the winner on a much finer grid
        let fine = LipBound::new(p, n, d, true);
        let num: f64 = diff.iter().zip(&best.coeffs).map(|(a, b)| a * b).sum::<f64>().abs();
        best.value = num / fine.eval(&best.coeffs);
    }
    best
}

/// Deterministic seed for the cell `(q, N)`.
pub fn cell_seed(p: &QParam, n: u32) -> u64 {
    p.q().to_bits() ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Certified lower bound for the distance between `h_N` and the counit.
pub fn mk_lower(n: u32, p: &QParam, cfg: &MkConfig) -> MkResult {
    mk_lower_seeded(n, p, cfg, 0)
}

/// [`mk_lower`] with the random starts additionally keyed by `seed`.
pub fn mk_lower_seeded(n: u32, p: &QParam, cfg: &MkConfig, seed: u64) -> MkResult {
    let d = n + cfg.extra_degree;
    let seed = cell_seed(p, n) ^ seed.rotate_left(32);
    mk_between(&hn_measure(n, p, d), &counit_measure(), p, n, cfg, seed)
}
