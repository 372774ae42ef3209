//! Functions on the spectrum `X_q` of `A` and the upper bounds for the
//! distance between `h_N` and the counit.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pbw::{AlgebraElement, Monomial};
use crate::qscalar::QParam;

/// A point of `X_q = {q^(2m)} ∪ {0}` for `q < 1`, or of `[0, 1]` at `q = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum XqPoint {
    Power(u32),
    Zero,
    Real(f64),
}

impl XqPoint {
    /// The real number this point stands for.
    pub fn value(&self, p: &QParam) -> f64 {
        match *self {
            XqPoint::Power(m) => p.q_pow(2 * m as i64),
            XqPoint::Zero => 0.0,
            XqPoint::Real(s) => s,
        }
    }

    fn check(&self, p: &QParam) -> Result<()> {
        let ok = match self {
            XqPoint::Power(_) => !p.is_classical(),
            XqPoint::Zero => true,
            XqPoint::Real(s) => p.is_classical() && (0.0..=1.0).contains(s),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BranchMismatch)
        }
    }
}

/// Central binomial weights `C(2j, j) / 4^j` of `(1 - t)^(-1/2)`.
fn half_binomial(j: u32) -> f64 {
    (1..=j).fold(1.0, |acc, i| acc * (2 * i - 1) as f64 / (2 * i) as f64)
}

/// `Σ_{k ≥ m} q^k (1 - s q^(2k+2))^(-1/2)` for `q < 1`, `0 < s ≤ 1`.
///
/// Terms are summed directly while `s q^(2k+2) > 1e-3`, the rest is the
/// binomial expansion summed in closed form over `k`.
fn zeta_sum(p: &QParam, s: f64, m: u64) -> f64 {
    let lq = p.ln_q();
    let ls = s.ln();
    // smallest K >= m with s q^(2K+2) <= 1e-3
    let kmin = ((1e-3f64.ln() - ls) / (2.0 * lq) - 1.0).ceil().max(0.0) as u64;
    let kk = kmin.max(m);
    let mut direct = 0.0;
    for k in m..kk {
        let t = ls + (2 * k + 2) as f64 * lq;
        direct += (k as f64 * lq).exp() / (-t.exp_m1()).sqrt();
    }
    let mut tail = 0.0;
    let x = ls + 2.0 * lq;
    for j in 0..200u32 {
        let jf = j as f64;
        let e = jf * x + kk as f64 * (2.0 * jf + 1.0) * lq;
        let term = half_binomial(j) * e.exp() / (-((2.0 * jf + 1.0) * lq).exp_m1());
        tail += term;
        if term <= 1e-18 * tail {
            break;
        }
    }
    direct + tail
}

/// `T(m) = ρ_q(q^(2m), 0) = Σ_{k≥m} (1-q²) q^k / sqrt(1 - q^(2k+2))`.
pub fn distance_to_zero(m: u64, p: &QParam) -> f64 {
    (1.0 - p.q() * p.q()) * zeta_sum(p, 1.0, m)
}

/// The metric `ρ_q` on `X_q`.
pub fn rho_q(x: XqPoint, y: XqPoint, p: &QParam) -> Result<f64> {
    x.check(p)?;
    y.check(p)?;
    if p.is_classical() {
        let t = |z: XqPoint| (2.0 * z.value(p) - 1.0).asin();
        return Ok((t(x) - t(y)).abs());
    }
    let t = |z: XqPoint| match z {
        XqPoint::Power(m) => distance_to_zero(m as u64, p),
        _ => 0.0,
    };
    Ok((t(x) - t(y)).abs())
}

/// `f(q, s) = Σ_k (1-q²) q^k sqrt(s) / sqrt(1 - s q^(2k+2))`, `2 asin(sqrt s)` at `q = 1`.
pub fn f_func(p: &QParam, s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    if p.is_classical() {
        return 2.0 * s.sqrt().asin();
    }
    if s == 0.0 {
        return 0.0;
    }
    (1.0 - p.q() * p.q()) * s.sqrt() * zeta_sum(p, s, 0)
}

fn envelope_factor(p: &QParam) -> f64 {
    if p.is_classical() {
        2.0
    } else {
        -(1.0 - p.q() * p.q()) / (p.q() * p.ln_q())
    }
}

/// Lower envelope `c_q asin(q sqrt s)` of `f`.
pub fn f_lower_envelope(p: &QParam, s: f64) -> f64 {
    envelope_factor(p) * (s.clamp(0.0, 1.0).sqrt() * p.q()).asin()
}

/// Upper envelope `c_q asin(sqrt s)` of `f`.
pub fn f_upper_envelope(p: &QParam, s: f64) -> f64 {
    envelope_factor(p) * s.clamp(0.0, 1.0).sqrt().asin()
}

/// `g_N(q, s) = <N+1> q^(-2N) Π_{t<N} (1 - q^(-2t) s)`.
pub fn g_func(n: u32, p: &QParam, s: f64) -> f64 {
    let mut acc = p.bracket(n + 1) * p.q_pow(-2 * n as i64);
    for t in 0..n {
        acc *= 1.0 - p.q_pow(-2 * t as i64) * s;
    }
    acc
}

/// Weight of `q^(2m)` in the measure representing the Haar state on `X_q`.
pub fn spectral_weight(m: u64, p: &QParam) -> f64 {
    (1.0 - p.q() * p.q()) * (2.0 * m as f64 * p.ln_q()).exp()
}

/// Real polynomial in `(x, y)` given by its coefficients of `x^j y^k`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BivariatePoly {
    pub coeffs: BTreeMap<(u32, u32), f64>,
}

impl BivariatePoly {
    pub fn new(coeffs: impl IntoIterator<Item = ((u32, u32), f64)>) -> Self {
        BivariatePoly {
            coeffs: coeffs.into_iter().collect(),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(j, k), c)| c * x.powi(j as i32) * y.powi(k as i32))
            .sum()
    }
}

/// `H(x^j y^k)(q) = q^j / <k+1>`, extended linearly.
pub fn h_transform(poly: &BivariatePoly, p: &QParam) -> f64 {
    poly.coeffs
        .iter()
        .map(|(&(j, k), c)| c * p.q().powi(j as i32) / p.bracket(k + 1))
        .sum()
}

/// `h_N` applied to a function on `X_q`, summing over `q^(2(N+r))`.
///
/// `h_N(F) = Σ_r (1-q²) <N+1> q^(2r) Π_{j=1..N} (1 - q^(2(r+j))) F(q^(2(N+r)))`.
/// `decay(r)` must bound `F` on all later points.
fn hn_series(n: u32, p: &QParam, mut fval: impl FnMut(u64) -> f64) -> f64 {
    let lq = p.ln_q();
    let top = p.bracket(n + 1);
    let w = 1.0 - p.q() * p.q();
    let mut sum = 0.0;
    let mut r: u64 = 0;
    loop {
        let logp: f64 = (1..=n as u64)
            .map(|j| (-(2.0 * (r + j) as f64 * lq).exp()).ln_1p())
            .sum();
        let qr = (2.0 * r as f64 * lq).exp();
        let fv = fval(r);
        sum += w * top * qr * logp.exp() * fv;
        // every later term is at most <N+1> q^(2r') (1-q²) f_r
        let rest = top * qr * p.q() * p.q() * fv;
        if rest <= 1e-17 * sum || rest < 1e-300 {
            break;
        }
        r += 1;
    }
    sum
}

fn simpson_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    // split first so that narrow peaks are seen
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
            let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            rec(f, x0, x1, f0, fm, f1, whole, tol / pieces as f64, 40)
        })
        .sum()
}

/// Upper bound `h_N(f(q, ·))` for the distance between `h_N` and the counit.
pub fn dq_upper(n: u32, p: &QParam) -> f64 {
    if p.is_classical() {
        // (N+1) ∫ (1-s)^N 2 asin(sqrt s) ds with s = sin²θ
        let np1 = (n + 1) as f64;
        let f = move |t: f64| np1 * 4.0 * t * t.sin() * t.cos().powi(2 * n as i32 + 1);
        return simpson_adaptive(&f, 0.0, PI / 2.0, 1e-13);
    }
    hn_series(n, p, |r| f_func(p, p.q_pow(2 * (n as i64 + r as i64))))
}

/// Same sum with `f` replaced by its lower and upper envelopes.
pub fn dq_envelopes(n: u32, p: &QParam) -> (f64, f64) {
    if p.is_classical() {
        let v = dq_upper(n, p);
        return (v, v);
    }
    let s = |r: u64| p.q_pow(2 * (n as i64 + r as i64));
    (
        hn_series(n, p, |r| f_lower_envelope(p, s(r))),
        hn_series(n, p, |r| f_upper_envelope(p, s(r))),
    )
}

/// Nodes and weights of `n`-point Gauss–Legendre quadrature on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `a*^N a^N` as a polynomial in `A`, from the PBW normal form.
pub fn astar_a_polynomial(n: u32, p: &QParam) -> Result<Vec<f64>> {
    let a = AlgebraElement::<Complex64>::a(*p).pow(n)?;
    let asn = AlgebraElement::<Complex64>::a_star(*p).pow(n)?;
    let prod = asn.multiply(&a)?;
    let mut coeffs = vec![0.0; n as usize + 1];
    for (mono, c) in prod.terms() {
        if mono.k != 0 || mono.m != mono.n {
            return Err(Error::NotPodles);
        }
        coeffs[mono.m as usize] = c.re;
    }
    debug_assert!(prod.coeff(&Monomial { k: 0, m: 0, n: 0 }).re != 0.0);
    Ok(coeffs)
}

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * s + v)
}

/// `T(m)` by direct summation with a geometric tail bound.
fn distance_to_zero_direct(m: u64, p: &QParam) -> f64 {
    let q = p.q();
    let w = 1.0 - q * q;
    let mut sum = 0.0;
    let mut k = m;
    loop {
        let qk = q.powf(k as f64);
        let d = (-(p.ln_q() * (2 * k + 2) as f64).exp_m1()).sqrt();
        sum += w * qk / d;
        let tail = w * qk * q / ((1.0 - q) * d);
        if tail < 1e-17 * sum {
            return sum;
        }
        k += 1;
    }
}

/// `h_N(ρ_q(·, 0))` through the expectation form: the PBW normal form of
/// `a*^N a^N` against the measure on `X_q`, using
/// `h(a*^N F(A) a^N) = h(a*^N a^N F(q^(2N) A))`.
pub fn dq_upper_via_state(n: u32, p: &QParam) -> Result<f64> {
    let poly = astar_a_polynomial(n, p)?;
    let top = p.bracket(n + 1);
    if p.is_classical() {
        // (N+1) ∫ P(s) (asin(2s-1) + π/2) ds, s = sin²θ, Gauss–Legendre panels
        let nodes = gauss_legendre(40);
        let panels = 64;
        let h = PI / 2.0 / panels as f64;
        let mut sum = 0.0;
        for i in 0..panels {
            let c = (i as f64 + 0.5) * h;
            for &(x, w) in &nodes {
                let t = c + 0.5 * h * x;
                let s = t.sin().powi(2);
                let jac = 2.0 * t.sin() * t.cos();
                sum += 0.5 * h * w * horner(&poly, s) * ((2.0 * s - 1.0).asin() + PI / 2.0) * jac;
            }
        }
        return Ok(top * sum);
    }
    let bound: f64 = poly.iter().map(|c| c.abs()).sum();
    let mut sum = 0.0;
    let mut m: u64 = 0;
    loop {
        let s = p.q_pow(2 * m as i64);
        let t = distance_to_zero_direct(m + n as u64, p);
        let term = spectral_weight(m, p) * horner(&poly, s) * t;
        sum += term;
        let rest = bound * spectral_weight(m + 1, p) / (1.0 - p.q() * p.q()) * t;
        if rest < 1e-17 * sum.abs() || rest < 1e-300 {
            break;
        }
        m += 1;
    }
    Ok(top * sum)
}

/// Upper bound for the quantum Gromov–Hausdorff distance between the fuzzy
/// sphere of degree `N` and the Podles sphere.
pub fn distq_upper(n: u32, p: &QParam) -> f64 {
    dq_upper(n, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(q: f64) -> QParam {
        QParam::new(q).unwrap()
    }

    #[test]
    fn rho_examples() {
        let p1 = qp(1.0);
        let v = rho_q(XqPoint::Real(1.0), XqPoint::Real(0.0), &p1).unwrap();
        assert!((v - PI).abs() < 1e-12);
        for &q in &[0.2, 0.5, 0.9, 0.99] {
            let p = qp(q);
            let v = rho_q(XqPoint::Power(0), XqPoint::Power(1), &p).unwrap();
            assert!((v - (1.0 - q * q).sqrt()).abs() < 1e-13, "q={q}");
            assert_eq!(rho_q(XqPoint::Power(3), XqPoint::Power(3), &p).unwrap(), 0.0);
        }
        assert!(matches!(
            rho_q(XqPoint::Real(0.5), XqPoint::Zero, &qp(0.5)),
            Err(Error::BranchMismatch)
        ));
    }

    #[test]
    fn tail_matches_direct_sum() {
        for &q in &[0.3, 0.7, 0.95] {
            let p = qp(q);
            for m in [0u64, 1, 5, 40] {
                let a = distance_to_zero(m, &p);
                let b = distance_to_zero_direct(m, &p);
                assert!((a - b).abs() < 1e-13 * b.max(1e-300), "q={q} m={m}: {a} {b}");
            }
        }
    }

    #[test]
    fn f_at_spectrum() {
        let p = qp(0.6);
        assert_eq!(f_func(&p, 0.0), 0.0);
        for m in 0..8 {
            let a = f_func(&p, p.q_pow(2 * m));
            let b = distance_to_zero(m as u64, &p);
            assert!((a - b).abs() < 1e-13);
        }
        assert!((f_func(&qp(1.0), 0.25) - 2.0 * 0.5f64.asin()).abs() < 1e-15);
    }

    #[test]
    fn g_values() {
        let p = qp(0.7);
        assert_eq!(g_func(0, &p, 0.3), 1.0);
        assert_eq!(g_func(4, &p, 1.0), 0.0);
    }

    #[test]
    fn h_transform_example() {
        let p = qp(0.5);
        let poly = BivariatePoly::new([((2, 3), 1.0)]);
        assert!((h_transform(&poly, &p) - 0.25 / 1.328125).abs() < 1e-15);
    }

    #[test]
    fn weights_reproduce_haar() {
        for &q in &[0.3, 0.8] {
            let p = qp(q);
            for k in 0..=20u32 {
                let s: f64 = (0..4000u64)
                    .map(|m| spectral_weight(m, &p) * p.q_pow(2 * (m as i64) * k as i64))
                    .sum();
                assert!((s - 1.0 / p.bracket(k + 1)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let nodes = gauss_legendre(10);
        let s: f64 = nodes.iter().map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn routes_agree() {
        for &q in &[0.3, 0.5, 0.9, 1.0] {
            let p = qp(q);
            for n in [0u32, 1, 2, 5, 9] {
                let a = dq_upper(n, &p);
                let b = dq_upper_via_state(n, &p).unwrap();
                assert!((a - b).abs() < 1e-10, "q={q} N={n}: {a} vs {b}");
            }
        }
    }
}
