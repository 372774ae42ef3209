//! Elements of the coordinate algebra in PBW normal form.
//!
//! A basis monomial `(k, m, n)` stands for `a^k b^m b*^n`, where a negative
//! `k` means `a*^|k|`. Relations: `ba = q ab`, `b*a = q ab*`, `bb* = b*b`,
//! `a*a + q^2 bb* = 1 = aa* + bb*`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qscalar::{Coeff, QParam};

/// Normal-ordered monomial `a^k b^m b*^n` (`k < 0` means `a*^|k|`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub k: i32,
    pub m: u32,
    pub n: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { k: 0, m: 0, n: 0 };

    pub fn new(k: i32, m: u32, n: u32) -> Self {
        Monomial { k, m, n }
    }

    pub fn bidegree(&self) -> Bidegree {
        let (k, m, n) = (self.k as i64, self.m as i64, self.n as i64);
        Bidegree {
            left: k + m - n,
            right: k - m + n,
        }
    }

    /// Total number of generator letters.
    pub fn degree(&self) -> u32 {
        self.k.unsigned_abs() + self.m + self.n
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let pw = |name: &str, e: u32| {
            if e == 1 {
                name.to_string()
            } else {
                format!("{name}^{e}")
            }
        };
        if self.k > 0 {
            parts.push(pw("a", self.k as u32));
        } else if self.k < 0 {
            parts.push(pw("a*", self.k.unsigned_abs()));
        }
        if self.m > 0 {
            parts.push(pw("b", self.m));
        }
        if self.n > 0 {
            parts.push(pw("b*", self.n));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Left and right degrees under the two circle actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub left: i64,
    pub right: i64,
}

/// Finite linear combination of normal-ordered monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<C: Coeff = Complex64> {
    terms: BTreeMap<Monomial, C>,
    param: QParam,
}

/// Generator labels for the coordinate algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    A,
    AStar,
    B,
    BStar,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::A, Generator::AStar, Generator::B, Generator::BStar];

    pub fn monomial(self) -> Monomial {
        match self {
            Generator::A => Monomial::new(1, 0, 0),
            Generator::AStar => Monomial::new(-1, 0, 0),
            Generator::B => Monomial::new(0, 1, 0),
            Generator::BStar => Monomial::new(0, 0, 1),
        }
    }
}

impl<C: Coeff> AlgebraElement<C> {
    pub fn zero(param: QParam) -> Self {
        AlgebraElement {
            terms: BTreeMap::new(),
            param,
        }
    }

    pub fn one(param: QParam) -> Self {
        Self::monomial(param, Monomial::ONE, C::one())
    }

    pub fn scalar(param: QParam, c: C) -> Self {
        Self::monomial(param, Monomial::ONE, c)
    }

    pub fn monomial(param: QParam, mono: Monomial, c: C) -> Self {
        let mut e = Self::zero(param);
        if !c.is_zero() {
            e.terms.insert(mono, c);
        }
        e
    }

    pub fn generator(param: QParam, g: Generator) -> Self {
        Self::monomial(param, g.monomial(), C::one())
    }

    pub fn a(param: QParam) -> Self {
        Self::generator(param, Generator::A)
    }

    pub fn a_star(param: QParam) -> Self {
        Self::generator(param, Generator::AStar)
    }

    pub fn b(param: QParam) -> Self {
        Self::generator(param, Generator::B)
    }

    pub fn b_star(param: QParam) -> Self {
        Self::generator(param, Generator::BStar)
    }

    pub fn from_terms(param: QParam, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut e = Self::zero(param);
        for (mono, c) in terms {
            e.add_term(mono, c);
        }
        e
    }

    pub fn param(&self) -> &QParam {
        &self.param
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> C {
        self.terms.get(mono).cloned().unwrap_or_else(C::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest generator degree among the monomials.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn add_term(&mut self, mono: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(v) => {
                let nv = v.clone() + c;
                if nv.is_zero() {
                    self.terms.remove(&mono);
                } else {
                    *v = nv;
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.param.same_as(&other.param) {
            Ok(())
        } else {
            Err(Error::ParameterMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            out.add_term(*mono, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (mono, c) in &other.terms {
            out.add_term(*mono, -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.param);
        for (mono, v) in &self.terms {
            out.add_term(*mono, v.clone() * c.clone());
        }
        out
    }

    /// Keeps only the monomials accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Self {
        AlgebraElement {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            param: self.param,
        }
    }

    /// Applies a per-monomial scalar.
    pub fn map_terms(&self, mut f: impl FnMut(&Monomial, &C) -> C) -> Self {
        let mut out = Self::zero(self.param);
        for (mono, c) in &self.terms {
            out.add_term(*mono, f(mono, c));
        }
        out
    }

    /// Product in normal form.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.param;
        let mut out: BTreeMap<Monomial, C> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1.clone() * c2.clone();
                monomial_product_into(&p, m1, m2, c, &mut out);
            }
        }
        let mut res = AlgebraElement { terms: out, param: p };
        res.prune();
        Ok(res)
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        if let Some(rel) = C::prune_threshold() {
            let max = self.max_abs();
            let cut = rel * max;
            self.terms.retain(|_, c| c.magnitude() > cut);
        }
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(self.param);
        for _ in 0..e {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// Involution: `(a^k b^m b*^n)* = q^(-(m+n)k) a^(-k) b^n b*^m`.
    pub fn adjoint(&self) -> Self {
        let p = self.param;
        let mut out = Self::zero(p);
        for (mono, c) in &self.terms {
            let f = C::s_pow(&p, -2 * (mono.m as i64 + mono.n as i64) * mono.k as i64);
            out.add_term(Monomial::new(-mono.k, mono.n, mono.m), c.conj() * f);
        }
        out
    }

    /// Haar state: `h(a^k b^m b*^n) = delta_k0 delta_mn / <m+1>`.
    pub fn haar(&self) -> C {
        let p = self.param;
        let mut acc = C::zero();
        for (mono, c) in &self.terms {
            if mono.k == 0 && mono.m == mono.n {
                acc = acc + c.clone() * C::bracket(&p, mono.m + 1).recip();
            }
        }
        acc
    }

    /// Modular automorphism of the Haar state on monomials: `a^k -> q^(-2k)`.
    pub fn modular_nu(&self) -> Self {
        let p = self.param;
        self.map_terms(|mono, c| c.clone() * C::s_pow(&p, -4 * mono.k as i64))
    }

    /// `<x, y> = h(x* y)`, evaluated pairwise on monomials.
    ///
    /// Pairs of a*-family monomials are reordered through the twisted trace
    /// `h(x y) = h(nu(y) x)` so that every product is of the form
    /// `a*^k ... a^k`, whose normal form has coefficients bounded by one.
    pub fn inner(&self, other: &Self) -> Result<C> {
        self.check(other)?;
        let p = self.param;
        let mut acc = C::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if m1.k != m2.k || m1.m as i64 - m1.n as i64 != m2.m as i64 - m2.n as i64 {
                    continue;
                }
                let h = haar_pair::<C>(&p, m1, m2);
                if !h.is_zero() {
                    acc = acc + c1.conj() * c2.clone() * h;
                }
            }
        }
        Ok(acc)
    }

    /// Counit: `a, a* -> 1`, `b, b* -> 0`.
    pub fn counit(&self) -> C {
        let mut acc = C::zero();
        for (mono, c) in &self.terms {
            if mono.m == 0 && mono.n == 0 {
                acc = acc + c.clone();
            }
        }
        acc
    }

    /// Splits into homogeneous components by bidegree.
    pub fn components(&self) -> BTreeMap<Bidegree, Self> {
        let mut out: BTreeMap<Bidegree, Self> = BTreeMap::new();
        for (mono, c) in &self.terms {
            out.entry(mono.bidegree())
                .or_insert_with(|| Self::zero(self.param))
                .terms
                .insert(*mono, c.clone());
        }
        out
    }

    /// Left-degree-zero projection.
    pub fn left_zero_part(&self) -> Self {
        self.filter(|m| m.bidegree().left == 0)
    }

    /// Projection onto the subspace of bidegree (0, 0).
    pub fn phi0(&self) -> Self {
        self.filter(|m| {
            let b = m.bidegree();
            b.left == 0 && b.right == 0
        })
    }

    pub fn is_podles(&self) -> bool {
        self.terms.keys().all(|m| m.bidegree().left == 0)
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs())
    }

    /// Float copy.
    pub fn to_float(&self) -> AlgebraElement<Complex64> {
        AlgebraElement {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, c.to_c64()))
                .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
                .collect(),
            param: self.param.to_float(),
        }
    }

    /// Copy with another coefficient type, going through `Complex64`.
    pub fn convert<D: Coeff>(&self) -> AlgebraElement<D> {
        let mut out = AlgebraElement::<D>::zero(self.param);
        for (m, c) in &self.terms {
            out.add_term(*m, D::from_c64(c.to_c64()));
        }
        out
    }
}

/// `h(m1* m2)` for two monomials with equal bidegree.
fn haar_pair<C: Coeff>(p: &QParam, m1: &Monomial, m2: &Monomial) -> C {
    let k = m1.k;
    // m1* = q^(-(m1+n1) k) a^(-k) b^n1 b*^m1
    let f1 = C::s_pow(p, -2 * (m1.m as i64 + m1.n as i64) * k as i64);
    let adj = Monomial::new(-k, m1.n, m1.m);
    let mut prod = BTreeMap::new();
    let f = if k >= 0 {
        monomial_product_into(p, &adj, m2, f1, &mut prod);
        C::one()
    } else {
        // h(m1* m2) = h(nu(m2) m1*), nu(m2) = q^(-2k) m2
        monomial_product_into(p, m2, &adj, f1, &mut prod);
        C::s_pow(p, -4 * k as i64)
    };
    let h = AlgebraElement { terms: prod, param: *p }.haar();
    h * f
}

/// Accumulates `c * m1 * m2` in normal form.
fn monomial_product_into<C: Coeff>(p: &QParam, m1: &Monomial, m2: &Monomial, c: C, out: &mut BTreeMap<Monomial, C>) {
    // moving b^m1 b*^n1 past a^k2 gives q^((m1+n1) k2)
    let shift = 2 * (m1.m as i64 + m1.n as i64) * m2.k as i64;
    let c = if shift == 0 { c } else { c * C::s_pow(p, shift) };
    let kappa = m1.k + m2.k;
    let (m, n) = (m1.m + m2.m, m1.n + m2.n);
    let poly = C::a_expansion(p, m1.k, m2.k);
    for (t, pc) in poly.iter().enumerate() {
        if pc.is_zero() {
            continue;
        }
        let mono = Monomial::new(kappa, m + t as u32, n + t as u32);
        let v = c.clone() * pc.clone();
        match out.get_mut(&mono) {
            Some(e) => *e = e.clone() + v,
            None => {
                out.insert(mono, v);
            }
        }
    }
}

impl<C: Coeff> fmt::Display for AlgebraElement<C>
where
    C: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c}) {m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<C: Coeff> Add for &AlgebraElement<C> {
    type Output = AlgebraElement<C>;
    fn add(self, rhs: Self) -> AlgebraElement<C> {
        self.try_add(rhs).expect("parameter mismatch in addition")
    }
}

impl<C: Coeff> Sub for &AlgebraElement<C> {
    type Output = AlgebraElement<C>;
    fn sub(self, rhs: Self) -> AlgebraElement<C> {
        self.try_sub(rhs).expect("parameter mismatch in subtraction")
    }
}

impl<C: Coeff> Mul for &AlgebraElement<C> {
    type Output = AlgebraElement<C>;
    fn mul(self, rhs: Self) -> AlgebraElement<C> {
        self.multiply(rhs).expect("parameter mismatch in product")
    }
}

impl<C: Coeff> Neg for &AlgebraElement<C> {
    type Output = AlgebraElement<C>;
    fn neg(self) -> AlgebraElement<C> {
        self.scale(&(-C::one()))
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    k: i32,
    m: u32,
    n: u32,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    q: f64,
    terms: Vec<TermJson>,
}

impl AlgebraElement<Complex64> {
    /// Serializes as `{"q": .., "terms": [{"k","m","n","re","im"}]}`.
    pub fn to_json(&self) -> Result<String> {
        let doc = ElementJson {
            q: self.param.q(),
            terms: self
                .terms
                .iter()
                .map(|(mono, c)| TermJson {
                    k: mono.k,
                    m: mono.m,
                    n: mono.n,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ElementJson = serde_json::from_str(text)?;
        let p = QParam::new(doc.q)?;
        Ok(Self::from_terms(
            p,
            doc.terms
                .into_iter()
                .map(|t| (Monomial::new(t.k, t.m, t.n), Complex64::new(t.re, t.im))),
        ))
    }

    /// Real scalar multiple.
    pub fn scale_real(&self, r: f64) -> Self {
        self.scale(&Complex64::new(r, 0.0))
    }
}
