//! Extended-precision fixed-point complex coefficients.
//!
//! PBW normal forms of `a^k a*^k` carry coefficients of size `q^(-k(k-1))`,
//! so identities checked coefficient-wise at small q lose all float
//! precision. [`Fixed`] stores `(re + i im) / 2^PREC` with big integers.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num::complex::Complex64;
use num::traits::Float;
use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use parking_lot::RwLock;

use crate::qscalar::{Coeff, QParam};

/// Fractional bits.
pub const PREC: u32 = 384;

#[derive(Clone, Debug, PartialEq)]
pub struct Fixed {
    re: BigInt,
    im: BigInt,
}

fn unit() -> BigInt {
    BigInt::one() << PREC
}

fn f64_to_fixed(x: f64) -> BigInt {
    if x == 0.0 {
        return BigInt::zero();
    }
    let (mant, exp, sign) = Float::integer_decode(x);
    let shift = exp as i64 + PREC as i64;
    let mut v = BigInt::from(mant);
    v = if shift >= 0 {
        v << shift as u32
    } else {
        v >> (-shift) as u32
    };
    if sign < 0 {
        -v
    } else {
        v
    }
}

fn fixed_to_f64(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits > 900 {
        let drop = bits - 900;
        (v >> drop as u32).to_f64().unwrap_or(f64::NAN) * 2f64.powi(drop as i32 - PREC as i32)
    } else {
        v.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(PREC as i32))
    }
}

fn mul_fixed(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> PREC
}

impl Fixed {
    pub fn from_real(x: f64) -> Self {
        Fixed {
            re: f64_to_fixed(x),
            im: BigInt::zero(),
        }
    }

    /// Square root of the real part (assumed nonnegative).
    pub fn sqrt_re(&self) -> Self {
        let v: BigInt = &self.re << PREC;
        Fixed {
            re: if v.is_positive() { v.sqrt() } else { BigInt::zero() },
            im: BigInt::zero(),
        }
    }

    fn s_value(p: &QParam) -> Fixed {
        Fixed::from_real(p.q()).sqrt_re()
    }
}

impl Add for Fixed {
    type Output = Fixed;
    fn add(self, o: Fixed) -> Fixed {
        Fixed {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    fn sub(self, o: Fixed) -> Fixed {
        Fixed {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for Fixed {
    type Output = Fixed;
    fn mul(self, o: Fixed) -> Fixed {
        let re = mul_fixed(&self.re, &o.re) - mul_fixed(&self.im, &o.im);
        let im = mul_fixed(&self.re, &o.im) + mul_fixed(&self.im, &o.re);
        Fixed { re, im }
    }
}

impl Neg for Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed {
            re: -self.re,
            im: -self.im,
        }
    }
}

type PowKey = (u64, i64);

fn pow_cache() -> &'static RwLock<HashMap<PowKey, Fixed>> {
    static CACHE: OnceLock<RwLock<HashMap<PowKey, Fixed>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

impl Coeff for Fixed {
    fn zero() -> Self {
        Fixed {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }
    fn one() -> Self {
        Fixed {
            re: unit(),
            im: BigInt::zero(),
        }
    }
    fn from_i64(n: i64) -> Self {
        Fixed {
            re: BigInt::from(n) << PREC,
            im: BigInt::zero(),
        }
    }
    fn from_c64(c: Complex64) -> Self {
        Fixed {
            re: f64_to_fixed(c.re),
            im: f64_to_fixed(c.im),
        }
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(fixed_to_f64(&self.re), fixed_to_f64(&self.im))
    }
    fn conj(&self) -> Self {
        Fixed {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn s_pow(p: &QParam, j: i64) -> Self {
        if j == 0 || p.is_classical() {
            return Self::one();
        }
        let key = (p.key(), j);
        if let Some(v) = pow_cache().read().get(&key) {
            return v.clone();
        }
        let s = Self::s_value(p);
        let base = if j > 0 { s } else { s.recip() };
        let mut acc = Self::one();
        for _ in 0..j.unsigned_abs() {
            acc = acc * base.clone();
        }
        pow_cache().write().insert(key, acc.clone());
        acc
    }
    fn sqrt_real(&self) -> Self {
        self.sqrt_re()
    }
    fn recip(&self) -> Self {
        let d = mul_fixed(&self.re, &self.re) + mul_fixed(&self.im, &self.im);
        let num_re: BigInt = &self.re << PREC;
        let num_im: BigInt = -(&self.im << PREC);
        Fixed {
            re: num_re.div_floor(&d),
            im: num_im.div_floor(&d),
        }
    }
    fn prune_threshold() -> Option<f64> {
        None
    }
}
