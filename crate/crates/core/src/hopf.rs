//! Left and right actions of the quantized enveloping algebra.
//!
//! `∂_g(x) = (1 ⊗ <g,.>)Δ(x)` shifts columns of `u^n`, `δ_g(x) = (<g,.> ⊗ 1)Δ(x)`
//! shifts rows. Both are available on Peter–Weyl vectors and, through the
//! twisted Leibniz rule, directly on PBW elements.

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::pbw::{AlgebraElement, Generator, Monomial};
use crate::peter_weyl::{UIndex, UVector};
use crate::qscalar::{Coeff, QParam};

/// Generators of the enveloping algebra. `H` exists only at q = 1; there
/// `K` and `KInv` act as the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnvelopingTag {
    E,
    F,
    K,
    KInv,
    H,
}

impl EnvelopingTag {
    pub fn name(self) -> &'static str {
        match self {
            EnvelopingTag::E => "e",
            EnvelopingTag::F => "f",
            EnvelopingTag::K => "k",
            EnvelopingTag::KInv => "k_inv",
            EnvelopingTag::H => "h",
        }
    }

    pub fn check(self, p: &QParam) -> Result<()> {
        if self == EnvelopingTag::H && !p.is_classical() {
            return Err(Error::IncompatibleTag {
                tag: self.name(),
                q: p.q(),
            });
        }
        Ok(())
    }
}

/// Which side the enveloping algebra acts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    /// `∂`: twisted by the left degree.
    Left,
    /// `δ`: twisted by the right degree.
    Right,
}

/// `<g, u^n_{ij}>`.
pub fn pairing(g: EnvelopingTag, idx: UIndex, p: &QParam) -> Result<f64> {
    g.check(p)?;
    let (n, i, j) = (idx.n as i64, idx.i as i64, idx.j as i64);
    let br = |x: i64| p.bracket(x as u32);
    Ok(match g {
        EnvelopingTag::K if i == j => p.s_pow(2 * j - n),
        EnvelopingTag::KInv if i == j => p.s_pow(n - 2 * j),
        EnvelopingTag::H if i == j => (2 * j - n) as f64,
        EnvelopingTag::E if i + 1 == j => p.s_pow(1 - n) * (br(n - j + 1) * br(j)).sqrt(),
        EnvelopingTag::F if i == j + 1 => p.s_pow(1 - n) * (br(n - j) * br(j + 1)).sqrt(),
        _ => 0.0,
    })
}

/// `∂_g` on a Peter–Weyl vector: `u^n_{ij} -> sum_l u^n_{il} <g, u^n_{lj}>`.
pub fn act_partial(g: EnvelopingTag, v: &UVector) -> Result<UVector> {
    act_vector(g, v, Side::Left)
}

/// `δ_g` on a Peter–Weyl vector: `u^n_{ij} -> sum_l <g, u^n_{il}> u^n_{lj}`.
pub fn act_delta(g: EnvelopingTag, v: &UVector) -> Result<UVector> {
    act_vector(g, v, Side::Right)
}

fn act_vector(g: EnvelopingTag, v: &UVector, side: Side) -> Result<UVector> {
    let p = *v.param();
    g.check(&p)?;
    let mut out = UVector::zero(p);
    for (u, c) in v.terms() {
        let (n, i, j) = (u.n as i64, u.i as i64, u.j as i64);
        // only l = j - 1, j, j + 1 (column) or i - 1, i, i + 1 (row) can pair
        let fixed = if side == Side::Left { j } else { i };
        for l in (fixed - 1).max(0)..=(fixed + 1).min(n) {
            let (pair_idx, target) = match side {
                Side::Left => (UIndex::checked(n, l, j), UIndex::checked(n, i, l)),
                Side::Right => (UIndex::checked(n, i, l), UIndex::checked(n, l, j)),
            };
            let (Some(pi), Some(t)) = (pair_idx, target) else {
                continue;
            };
            let w = pairing(g, pi, &p)?;
            if w != 0.0 {
                out.add_term(t, c * w);
            }
        }
    }
    Ok(out)
}

fn letter_degree(g: Generator, side: Side) -> i64 {
    match (g, side) {
        (Generator::A, _) => 1,
        (Generator::AStar, _) => -1,
        (Generator::B, Side::Left) | (Generator::BStar, Side::Right) => 1,
        (Generator::B, Side::Right) | (Generator::BStar, Side::Left) => -1,
    }
}

fn side_degree(m: &Monomial, side: Side) -> i64 {
    let b = m.bidegree();
    match side {
        Side::Left => b.left,
        Side::Right => b.right,
    }
}

/// Image of a generator under `∂_e`, `∂_f`, `δ_e`, `δ_f`.
fn generator_image<C: Coeff>(g: EnvelopingTag, letter: Generator, side: Side, p: &QParam) -> Option<AlgebraElement<C>> {
    use EnvelopingTag::{E, F};
    use Generator::{AStar, BStar, A, B};
    let q = |j: i64| C::s_pow(p, 2 * j);
    let (target, c) = match (side, g, letter) {
        (Side::Left, E, A) => (BStar, C::one()),
        (Side::Left, E, B) => (AStar, -q(-1)),
        (Side::Left, F, AStar) => (B, -q(1)),
        (Side::Left, F, BStar) => (A, C::one()),
        (Side::Right, E, AStar) => (BStar, C::one()),
        (Side::Right, E, B) => (A, -q(-1)),
        (Side::Right, F, A) => (B, -q(1)),
        (Side::Right, F, BStar) => (AStar, C::one()),
        _ => return None,
    };
    Some(AlgebraElement::monomial(*p, target.monomial(), c))
}

fn word(m: &Monomial) -> Vec<Generator> {
    let mut w = Vec::with_capacity(m.degree() as usize);
    let a = if m.k >= 0 { Generator::A } else { Generator::AStar };
    w.extend(std::iter::repeat_n(a, m.k.unsigned_abs() as usize));
    w.extend(std::iter::repeat_n(Generator::B, m.m as usize));
    w.extend(std::iter::repeat_n(Generator::BStar, m.n as usize));
    w
}

fn word_monomial(letters: &[Generator]) -> Monomial {
    let mut mono = Monomial::ONE;
    for g in letters {
        match g {
            Generator::A => mono.k += 1,
            Generator::AStar => mono.k -= 1,
            Generator::B => mono.m += 1,
            Generator::BStar => mono.n += 1,
        }
    }
    mono
}

fn act_pbw<C: Coeff>(g: EnvelopingTag, x: &AlgebraElement<C>, side: Side) -> Result<AlgebraElement<C>> {
    let p = *x.param();
    g.check(&p)?;
    match g {
        EnvelopingTag::K => Ok(x.map_terms(|m, c| c.clone() * C::s_pow(&p, side_degree(m, side)))),
        EnvelopingTag::KInv => Ok(x.map_terms(|m, c| c.clone() * C::s_pow(&p, -side_degree(m, side)))),
        EnvelopingTag::H => Ok(x.map_terms(|m, c| c.clone() * C::from_i64(side_degree(m, side)))),
        EnvelopingTag::E | EnvelopingTag::F => {
            // D(w_1 ... w_r) = sum_t K^-1(w_1..w_{t-1}) D(w_t) K(w_{t+1}..w_r)
            let mut out = AlgebraElement::zero(p);
            for (mono, c) in x.terms() {
                let letters = word(mono);
                let degs: Vec<i64> = letters.iter().map(|l| letter_degree(*l, side)).collect();
                let total: i64 = degs.iter().sum();
                let mut pre = 0i64;
                for (t, letter) in letters.iter().enumerate() {
                    let suf = total - pre - degs[t];
                    if let Some(img) = generator_image::<C>(g, *letter, side, &p) {
                        let left = AlgebraElement::monomial(p, word_monomial(&letters[..t]), C::one());
                        let right = AlgebraElement::monomial(p, word_monomial(&letters[t + 1..]), C::one());
                        let term = left.multiply(&img)?.multiply(&right)?;
                        let f = c.clone() * C::s_pow(&p, suf - pre);
                        out = out.try_add(&term.scale(&f))?;
                    }
                    pre += degs[t];
                }
            }
            Ok(out)
        }
    }
}

/// `∂_g` on a PBW element via the generator table and the twisted Leibniz rule.
pub fn act_partial_pbw<C: Coeff>(g: EnvelopingTag, x: &AlgebraElement<C>) -> Result<AlgebraElement<C>> {
    act_pbw(g, x, Side::Left)
}

/// `δ_g` on a PBW element.
pub fn act_delta_pbw<C: Coeff>(g: EnvelopingTag, x: &AlgebraElement<C>) -> Result<AlgebraElement<C>> {
    act_pbw(g, x, Side::Right)
}

/// `δ_3 = (δ_k - δ_k^-1)/(q - q^-1)`, and `½ δ_h` at q = 1. On a monomial of
/// right degree `2r` it multiplies by the symmetric q-integer `[r]`.
pub fn delta3<C: Coeff>(x: &AlgebraElement<C>) -> Result<AlgebraElement<C>> {
    let p = *x.param();
    let mut out = AlgebraElement::zero(p);
    for (mono, c) in x.terms() {
        let r2 = mono.bidegree().right;
        if r2 % 2 != 0 {
            return Err(Error::NotPodles);
        }
        let r = r2 / 2;
        let mut qint = C::zero();
        for t in 0..r.abs() {
            qint = qint + C::s_pow(&p, 2 * (r.abs() - 1 - 2 * t));
        }
        if r < 0 {
            qint = -qint;
        }
        out.add_term(*mono, c.clone() * qint);
    }
    Ok(out)
}

/// Shape marker for a 2×2 matrix of algebra elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixForm {
    Partial,
    Delta,
    General,
}

/// 2×2 matrix over the coordinate algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationMatrix<C: Coeff = Complex64> {
    pub entries: [[AlgebraElement<C>; 2]; 2],
    pub form: MatrixForm,
}

impl<C: Coeff> DerivationMatrix<C> {
    pub fn new(entries: [[AlgebraElement<C>; 2]; 2], form: MatrixForm) -> Self {
        DerivationMatrix { entries, form }
    }

    pub fn zero(p: QParam, form: MatrixForm) -> Self {
        let z = || AlgebraElement::zero(p);
        Self::new([[z(), z()], [z(), z()]], form)
    }

    pub fn param(&self) -> QParam {
        *self.entries[0][0].param()
    }

    pub fn get(&self, i: usize, j: usize) -> &AlgebraElement<C> {
        &self.entries[i][j]
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.param(), MatrixForm::General);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = AlgebraElement::zero(self.param());
                for k in 0..2 {
                    acc = acc.try_add(&self.entries[i][k].multiply(&other.entries[k][j])?)?;
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.form = MatrixForm::General;
        for i in 0..2 {
            for j in 0..2 {
                out.entries[i][j] = self.entries[i][j].try_add(&other.entries[i][j])?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = self.clone();
        for row in out.entries.iter_mut() {
            for e in row.iter_mut() {
                *e = e.scale(c);
            }
        }
        out
    }

    /// Entrywise map.
    pub fn map(&self, mut f: impl FnMut(&AlgebraElement<C>) -> AlgebraElement<C>) -> Self {
        let e = &self.entries;
        Self::new(
            [[f(&e[0][0]), f(&e[0][1])], [f(&e[1][0]), f(&e[1][1])]],
            MatrixForm::General,
        )
    }

    /// Largest PBW coefficient of the difference.
    pub fn residual(&self, other: &Self) -> Result<f64> {
        let mut worst = 0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max(self.entries[i][j].distance(&other.entries[i][j])?);
            }
        }
        Ok(worst)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }
}

/// Fundamental corepresentation `u = [[a*, -q b], [b*, a]]`.
pub fn u_matrix<C: Coeff>(p: &QParam) -> DerivationMatrix<C> {
    let q = C::s_pow(p, 2);
    DerivationMatrix::new(
        [
            [AlgebraElement::a_star(*p), AlgebraElement::b(*p).scale(&(-q))],
            [AlgebraElement::b_star(*p), AlgebraElement::a(*p)],
        ],
        MatrixForm::General,
    )
}

/// `u* = [[a, b], [-q b*, a*]]`.
pub fn u_star_matrix<C: Coeff>(p: &QParam) -> DerivationMatrix<C> {
    let q = C::s_pow(p, 2);
    DerivationMatrix::new(
        [
            [AlgebraElement::a(*p), AlgebraElement::b(*p)],
            [AlgebraElement::b_star(*p).scale(&(-q)), AlgebraElement::a_star(*p)],
        ],
        MatrixForm::General,
    )
}

/// `∂_1 x = q^(1/2) ∂_e x`.
pub fn partial1<C: Coeff>(x: &AlgebraElement<C>) -> Result<AlgebraElement<C>> {
    let p = *x.param();
    Ok(act_partial_pbw(EnvelopingTag::E, x)?.scale(&C::s_pow(&p, 1)))
}

/// `∂_2 x = q^(-1/2) ∂_f x`.
pub fn partial2<C: Coeff>(x: &AlgebraElement<C>) -> Result<AlgebraElement<C>> {
    let p = *x.param();
    Ok(act_partial_pbw(EnvelopingTag::F, x)?.scale(&C::s_pow(&p, -1)))
}

/// `∂(x) = [[0, ∂_2 x], [∂_1 x, 0]]`.
pub fn partial_matrix<C: Coeff>(x: &AlgebraElement<C>) -> Result<DerivationMatrix<C>> {
    if !x.is_podles() {
        return Err(Error::NotPodles);
    }
    let z = AlgebraElement::zero(*x.param());
    Ok(DerivationMatrix::new(
        [[z.clone(), partial2(x)?], [partial1(x)?, z]],
        MatrixForm::Partial,
    ))
}

/// `∂(x)` computed through the Peter–Weyl column shifts.
pub fn partial_matrix_vector(v: &UVector) -> Result<DerivationMatrix<Complex64>> {
    if !v.is_podles() {
        return Err(Error::NotPodles);
    }
    let p = *v.param();
    let d1 = crate::peter_weyl::to_element(&act_partial(EnvelopingTag::E, v)?)?;
    let d2 = crate::peter_weyl::to_element(&act_partial(EnvelopingTag::F, v)?)?;
    let z = AlgebraElement::zero(p);
    Ok(DerivationMatrix::new(
        [[z.clone(), d2.scale_real(p.s_pow(-1))], [d1.scale_real(p.s_pow(1)), z]],
        MatrixForm::Partial,
    ))
}

/// `δ(x) = [[-δ_3 x, δ_2 x], [δ_1 x, δ_3 x]]`.
pub fn delta_matrix<C: Coeff>(x: &AlgebraElement<C>) -> Result<DerivationMatrix<C>> {
    if !x.is_podles() {
        return Err(Error::NotPodles);
    }
    let p = *x.param();
    let d1 = act_delta_pbw(EnvelopingTag::E, x)?.scale(&C::s_pow(&p, 1));
    let d2 = act_delta_pbw(EnvelopingTag::F, x)?.scale(&C::s_pow(&p, -1));
    let d3 = delta3(x)?;
    let neg = d3.scale(&(-C::one()));
    Ok(DerivationMatrix::new([[neg, d2], [d1, d3]], MatrixForm::Delta))
}

/// `u M u*`.
pub fn conjugate_by_u<C: Coeff>(m: &DerivationMatrix<C>) -> Result<DerivationMatrix<C>> {
    let p = m.param();
    let mut out = u_matrix::<C>(&p).matmul(m)?.matmul(&u_star_matrix(&p))?;
    out.form = MatrixForm::Delta;
    Ok(out)
}

/// `[y, x]_θ = y x - θ(x) y`.
pub fn twisted_commutator<C: Coeff>(
    y: &AlgebraElement<C>,
    x: &AlgebraElement<C>,
    theta: impl Fn(&AlgebraElement<C>) -> Result<AlgebraElement<C>>,
) -> Result<AlgebraElement<C>> {
    y.multiply(x)?.try_sub(&theta(x)?.multiply(y)?)
}

/// `τ = δ_k ∂_k`: multiplies `a^k b^m b*^n` by `q^k`.
pub fn tau<C: Coeff>(x: &AlgebraElement<C>) -> AlgebraElement<C> {
    let p = *x.param();
    x.map_terms(|m, c| c.clone() * C::s_pow(&p, 2 * m.k as i64))
}
