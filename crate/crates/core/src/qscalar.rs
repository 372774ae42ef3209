//! Deformation parameter, q-brackets and the coefficient field.
//!
//! All exponents are stored in units of `s = sqrt(q)` so that half-integer
//! powers of q stay exact. A [`QParam`] may additionally carry a rational
//! value of `s`; algebra elements over [`Scalar`] then compute in exact
//! rational arithmetic until an irrational value is injected.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::complex::{Complex, Complex64};
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default absolute tolerance for float comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Arithmetic mode of a parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Float,
    Exact,
}

/// Deformation parameter `q` in (0, 1], stored through `s = sqrt(q)`.
#[derive(Clone, Copy, Debug)]
pub struct QParam {
    s: f64,
    q: f64,
    ln_q: f64,
    exact_s: Option<(i64, i64)>,
}

impl QParam {
    /// Float-mode parameter.
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(q));
        }
        Ok(Self::build(q.sqrt(), q, None))
    }

    /// Float-mode parameter given by its square root.
    pub fn from_sqrt(s: f64) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(s * s));
        }
        Ok(Self::build(s, s * s, None))
    }

    /// Exact-mode parameter with `s = num / den`, so `q = (num/den)^2`.
    pub fn exact(num: i64, den: i64) -> Result<Self> {
        if num <= 0 || den <= 0 || num > den {
            return Err(Error::InvalidExactParameter { num, den });
        }
        let g = gcd(num, den);
        let (num, den) = (num / g, den / g);
        let s = num as f64 / den as f64;
        Ok(Self::build(s, s * s, Some((num, den))))
    }

    fn build(s: f64, q: f64, exact_s: Option<(i64, i64)>) -> Self {
        // q = 1 is treated as exactly classical regardless of how it was built
        let (s, q) = if q == 1.0 { (1.0, 1.0) } else { (s, q) };
        QParam {
            s,
            q,
            ln_q: q.ln(),
            exact_s,
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn ln_q(&self) -> f64 {
        self.ln_q
    }

    pub fn mode(&self) -> Mode {
        if self.exact_s.is_some() {
            Mode::Exact
        } else {
            Mode::Float
        }
    }

    pub fn is_classical(&self) -> bool {
        self.q == 1.0
    }

    /// Rational value of `s`, if exact.
    pub fn exact_s(&self) -> Option<BigRational> {
        self.exact_s
            .map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// Float copy of this parameter (drops the rational value).
    pub fn to_float(&self) -> Self {
        Self::build(self.s, self.q, None)
    }

    /// Identity of parameters: same float value and same exactness.
    pub fn same_as(&self, other: &QParam) -> bool {
        self.s.to_bits() == other.s.to_bits() && self.exact_s == other.exact_s
    }

    /// Cache key derived from the float value of `s`.
    pub fn key(&self) -> u64 {
        self.s.to_bits()
    }

    /// `s^j` in floating point.
    pub fn s_pow(&self, j: i64) -> f64 {
        if self.s == 1.0 || j == 0 {
            1.0
        } else {
            (0.5 * j as f64 * self.ln_q).exp()
        }
    }

    /// `q^j` in floating point.
    pub fn q_pow(&self, j: i64) -> f64 {
        self.s_pow(2 * j)
    }

    /// `<n> = 1 + q^2 + ... + q^(2n-2)`, `<0> = 0`.
    pub fn bracket(&self, n: u32) -> f64 {
        if n == 0 {
            0.0
        } else if self.q == 1.0 {
            n as f64
        } else {
            (2.0 * n as f64 * self.ln_q).exp_m1() / (2.0 * self.ln_q).exp_m1()
        }
    }

    /// Symmetric q-integer `[n] = (q^n - q^-n)/(q - q^-1)`, `[n] = n` at q = 1.
    pub fn q_integer(&self, n: u32) -> f64 {
        if self.q == 1.0 {
            n as f64
        } else {
            (n as f64 * self.ln_q).sinh() / self.ln_q.sinh()
        }
    }
}

impl PartialEq for QParam {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Display for QParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact_s {
            Some((n, d)) => write!(f, "q=({n}/{d})^2"),
            None => write!(f, "q={}", self.q),
        }
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Scalar that is exact while possible and records a downgrade otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Complex<BigRational>),
    Float { value: Complex64, downgraded: bool },
}

impl Scalar {
    pub fn exact_real(r: BigRational) -> Self {
        Scalar::Exact(Complex::new(r, BigRational::zero()))
    }

    pub fn float(value: Complex64) -> Self {
        Scalar::Float {
            value,
            downgraded: false,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(c) => Complex64::new(rat_to_f64(&c.re), rat_to_f64(&c.im)),
            Scalar::Float { value, .. } => *value,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_downgraded(&self) -> bool {
        matches!(self, Scalar::Float { downgraded: true, .. })
    }

    fn combine(
        self,
        other: Self,
        fe: impl Fn(Complex<BigRational>, Complex<BigRational>) -> Complex<BigRational>,
        ff: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Self {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(fe(a, b)),
            (a, b) => {
                let mixed = a.is_exact() != b.is_exact();
                let downgraded = mixed || a.is_downgraded() || b.is_downgraded();
                Scalar::Float {
                    value: ff(a.to_complex(), b.to_complex()),
                    downgraded,
                }
            }
        }
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back through a scaled integer division for huge operands
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        self.combine(o, |a, b| a + b, |a, b| a + b)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self.combine(o, |a, b| a - b, |a, b| a - b)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        self.combine(o, |a, b| a * b, |a, b| a * b)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(-c),
            Scalar::Float { value, downgraded } => Scalar::Float {
                value: -value,
                downgraded,
            },
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(c) if c.im.is_zero() => write!(f, "{}", c.re),
            Scalar::Exact(c) => write!(f, "({} + {}i)", c.re, c.im),
            Scalar::Float { value, .. } => write!(f, "{value}"),
        }
    }
}

/// `<n>` as a [`Scalar`]: exact when the parameter is exact.
pub fn bracket(n: u32, p: &QParam) -> Scalar {
    <Scalar as Coeff>::bracket(p, n)
}

/// `s^j` as a [`Scalar`].
pub fn s_power(j: i64, p: &QParam) -> Scalar {
    <Scalar as Coeff>::s_pow(p, j)
}

/// Coefficient field used by algebra elements.
pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_c64(c: Complex64) -> Self;
    fn to_c64(&self) -> Complex64;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    /// `s^j` for the given parameter.
    fn s_pow(p: &QParam, j: i64) -> Self;
    /// `<n>` for the given parameter.
    fn bracket(p: &QParam, n: u32) -> Self {
        let mut acc = Self::zero();
        for m in 0..n {
            acc = acc + Self::s_pow(p, 4 * m as i64);
        }
        acc
    }
    /// Multiplicative inverse of a nonzero scalar.
    fn recip(&self) -> Self;
    /// Square root of a nonnegative real scalar.
    fn sqrt_real(&self) -> Self;
    /// Polynomial in `A = b b*` arising from `a^k1 a^k2` (signed powers).
    fn a_expansion(p: &QParam, k1: i32, k2: i32) -> Arc<Vec<Self>> {
        Arc::new(a_expansion_poly(p, k1, k2))
    }
    /// Relative pruning threshold after products; `None` keeps all nonzero terms.
    fn prune_threshold() -> Option<f64>;
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_c64(c: Complex64) -> Self {
        c
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn s_pow(p: &QParam, j: i64) -> Self {
        Complex64::new(p.s_pow(j), 0.0)
    }
    fn bracket(p: &QParam, n: u32) -> Self {
        Complex64::new(p.bracket(n), 0.0)
    }
    fn recip(&self) -> Self {
        self.inv()
    }
    fn sqrt_real(&self) -> Self {
        Complex64::new(self.re.sqrt(), 0.0)
    }
    fn a_expansion(p: &QParam, k1: i32, k2: i32) -> Arc<Vec<Self>> {
        cached_float_expansion(p, k1, k2)
    }
    fn prune_threshold() -> Option<f64> {
        Some(1e-14)
    }
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::exact_real(BigRational::zero())
    }
    fn one() -> Self {
        Scalar::exact_real(BigRational::one())
    }
    fn from_i64(n: i64) -> Self {
        Scalar::exact_real(BigRational::from_integer(BigInt::from(n)))
    }
    fn from_c64(c: Complex64) -> Self {
        Scalar::float(c)
    }
    fn to_c64(&self) -> Complex64 {
        self.to_complex()
    }
    fn conj(&self) -> Self {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.conj()),
            Scalar::Float { value, downgraded } => Scalar::Float {
                value: value.conj(),
                downgraded: *downgraded,
            },
        }
    }
    fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.re.is_zero() && c.im.is_zero(),
            Scalar::Float { value, .. } => value.re == 0.0 && value.im == 0.0,
        }
    }
    fn s_pow(p: &QParam, j: i64) -> Self {
        match p.exact_s() {
            Some(s) => {
                let base = if j >= 0 { s } else { s.recip() };
                let e = j.unsigned_abs();
                let mut acc = BigRational::one();
                for _ in 0..e {
                    acc *= &base;
                }
                Scalar::exact_real(acc)
            }
            None => Scalar::float(Complex64::new(p.s_pow(j), 0.0)),
        }
    }
    fn recip(&self) -> Self {
        match self {
            Scalar::Exact(c) => {
                let d = &c.re * &c.re + &c.im * &c.im;
                Scalar::Exact(Complex::new(&c.re / &d, -(&c.im / &d)))
            }
            Scalar::Float { value, downgraded } => Scalar::Float {
                value: value.inv(),
                downgraded: *downgraded,
            },
        }
    }
    fn sqrt_real(&self) -> Self {
        match self {
            Scalar::Exact(c) if c.im.is_zero() && !c.re.is_negative() => {
                let (n, d) = (c.re.numer(), c.re.denom());
                let (rn, rd) = (n.sqrt(), d.sqrt());
                if &(&rn * &rn) == n && &(&rd * &rd) == d {
                    Scalar::exact_real(BigRational::new(rn, rd))
                } else {
                    Scalar::Float {
                        value: Complex64::new(rat_to_f64(&c.re).sqrt(), 0.0),
                        downgraded: true,
                    }
                }
            }
            other => {
                let v = other.to_complex().re.sqrt();
                Scalar::Float {
                    value: Complex64::new(v, 0.0),
                    downgraded: true,
                }
            }
        }
    }
    fn prune_threshold() -> Option<f64> {
        None
    }
}

impl Scalar {
    /// True if the exact value is a nonnegative real.
    pub fn is_nonneg_real(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.im.is_zero() && !c.re.is_negative(),
            Scalar::Float { value, .. } => value.im == 0.0 && value.re >= 0.0,
        }
    }
}

/// Coefficients (in powers of `A = b b*`) of the normal form of `a^k1 a^k2`.
///
/// Signed powers: negative means a power of `a*`. The accompanying a-power
/// of the result is `k1 + k2`.
pub fn a_expansion_poly<C: Coeff>(p: &QParam, k1: i32, k2: i32) -> Vec<C> {
    let mut poly = vec![C::one()];
    if k1 >= 0 && k2 < 0 {
        // a^k a*^j = a^(k-r) a*^(j-r) prod_{t=1..r} (1 - q^(-2(j-t)) A)
        let (k, j) = (k1 as i64, (-k2) as i64);
        let r = k.min(j);
        for t in 1..=r {
            let c = -C::s_pow(p, -4 * (j - t));
            poly = poly_mul_linear(&poly, c);
        }
    } else if k1 < 0 && k2 > 0 {
        // a*^j a^k = a*^(j-r) a^(k-r) prod_{t=0..r-1} (1 - q^(2(k-t)) A)
        let (j, k) = ((-k1) as i64, k2 as i64);
        let r = k.min(j);
        for t in 0..r {
            let c = -C::s_pow(p, 4 * (k - t));
            poly = poly_mul_linear(&poly, c);
        }
    }
    poly
}

fn poly_mul_linear<C: Coeff>(poly: &[C], c: C) -> Vec<C> {
    // poly * (1 + c A)
    let mut out = poly.to_vec();
    out.push(C::zero());
    for (i, v) in poly.iter().enumerate() {
        out[i + 1] = out[i + 1].clone() + c.clone() * v.clone();
    }
    out
}

type ExpansionKey = (u64, i32, i32);

fn cached_float_expansion(p: &QParam, k1: i32, k2: i32) -> Arc<Vec<Complex64>> {
    use parking_lot::RwLock;
    use std::collections::HashMap;
    use std::sync::OnceLock;
    static CACHE: OnceLock<RwLock<HashMap<ExpansionKey, Arc<Vec<Complex64>>>>> = OnceLock::new();
    if (k1 >= 0) == (k2 >= 0) || k1 == 0 || k2 == 0 {
        return Arc::new(vec![Complex64::new(1.0, 0.0)]);
    }
    let cache = CACHE.get_or_init(Default::default);
    let key = (p.key(), k1, k2);
    if let Some(v) = cache.read().get(&key) {
        return v.clone();
    }
    let v = Arc::new(a_expansion_poly::<Complex64>(p, k1, k2));
    cache.write().insert(key, v.clone());
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(QParam::new(0.0).is_err());
        assert!(QParam::new(1.5).is_err());
        assert!(QParam::new(f64::NAN).is_err());
        assert!(QParam::exact(3, 2).is_err());
        assert!(QParam::exact(0, 2).is_err());
    }

    #[test]
    fn bracket_matches_direct_sum() {
        for &q in &[0.3, 0.5, 0.9, 0.999, 1.0] {
            let p = QParam::new(q).unwrap();
            for n in 0..60u32 {
                let direct: f64 = (0..n).map(|m| q.powi(2 * m as i32)).sum();
                assert!((p.bracket(n) - direct).abs() <= 1e-13 * direct.max(1.0));
            }
        }
    }

    #[test]
    fn exact_bracket_is_rational() {
        let p = QParam::exact(1, 2).unwrap();
        // <3> at q = 1/4 is 1 + 1/16 + 1/256
        let b = bracket(3, &p);
        let expect = BigRational::new(BigInt::from(256 + 16 + 1), BigInt::from(256));
        assert_eq!(b, Scalar::exact_real(expect));
    }

    #[test]
    fn downgrade_flag_propagates() {
        let p = QParam::exact(1, 2).unwrap();
        let e = s_power(3, &p);
        let f = Scalar::float(Complex64::new(2f64.sqrt(), 0.0));
        let prod = e.clone() * f;
        assert!(prod.is_downgraded());
        assert!(!(e.clone() * e).is_downgraded());
    }

    #[test]
    fn classical_is_exactly_one() {
        let p = QParam::new(1.0).unwrap();
        assert!(p.is_classical());
        assert_eq!(p.s_pow(-7), 1.0);
        assert_eq!(p.bracket(5), 5.0);
    }

    #[test]
    fn expansion_small_cases() {
        let p = QParam::new(0.5).unwrap();
        // a a* = 1 - A
        let e = a_expansion_poly::<Complex64>(&p, 1, -1);
        assert_eq!(e.len(), 2);
        assert!((e[1].re + 1.0).abs() < 1e-15);
        // a* a = 1 - q^2 A
        let e = a_expansion_poly::<Complex64>(&p, -1, 1);
        assert!((e[1].re + 0.25).abs() < 1e-15);
    }
}
