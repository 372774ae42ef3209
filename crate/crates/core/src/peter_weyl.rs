//! Matrix coefficients `u^n_{ij}` of the irreducible corepresentations and
//! the vector-space form of the algebra in that basis.
//!
//! `u^n_{ij}` has `0 <= i, j <= n`, bidegree `(2j - n, 2i - n)` and
//! `|u^n_{ij}|^2 = q^(2(n-i)) / <n+1>` in the Haar inner product. Left
//! multiplication by a generator is a two-term ladder between levels `n +- 1`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use num::complex::Complex64;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pbw::{AlgebraElement, Generator};
use crate::precise::Fixed;
use crate::qscalar::{Coeff, QParam};

/// Default bound on the corepresentation degree produced by [`generate_u`].
pub const DEFAULT_MAX_DEGREE: u32 = 40;

/// Label `(n, i, j)` of a matrix coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UIndex {
    pub n: u32,
    pub i: u32,
    pub j: u32,
}

impl UIndex {
    /// Panics if `i` or `j` exceed `n`.
    pub fn new(n: u32, i: u32, j: u32) -> Self {
        assert!(i <= n && j <= n, "invalid label ({n}, {i}, {j})");
        UIndex { n, i, j }
    }

    pub fn checked(n: i64, i: i64, j: i64) -> Option<Self> {
        if n < 0 || i < 0 || j < 0 || i > n || j > n {
            None
        } else {
            Some(UIndex {
                n: n as u32,
                i: i as u32,
                j: j as u32,
            })
        }
    }

    /// `(left, right)` degree.
    pub fn bidegree(&self) -> (i64, i64) {
        (2 * self.j as i64 - self.n as i64, 2 * self.i as i64 - self.n as i64)
    }

    /// Squared Haar norm of `u^n_{ij}`.
    pub fn norm_sq(&self, p: &QParam) -> f64 {
        p.q_pow(2 * (self.n as i64 - self.i as i64)) / p.bracket(self.n + 1)
    }

    /// Number of labels with level `< n`.
    pub fn level_offset(n: u32) -> usize {
        let n = n as usize;
        n * (n + 1) * (2 * n + 1) / 6
    }

    /// Position in the level-major ordering.
    pub fn linear(&self) -> usize {
        Self::level_offset(self.n) + (self.i as usize) * (self.n as usize + 1) + self.j as usize
    }

    pub fn from_linear(idx: usize) -> Self {
        let mut n = 0u32;
        while Self::level_offset(n + 1) <= idx {
            n += 1;
        }
        let r = idx - Self::level_offset(n);
        let w = n as usize + 1;
        UIndex::new(n, (r / w) as u32, (r % w) as u32)
    }
}

/// Two-term expansion of `g * u^n_{ij}` over any coefficient field:
/// `(up, down)` with the `n+1` and `n-1` components. Labels whose
/// coefficient vanishes are omitted.
pub fn left_mult_coeffs<C: Coeff>(g: Generator, idx: UIndex, p: &QParam) -> [Option<(UIndex, C)>; 2] {
    let (n, i, j) = (idx.n as i64, idx.i as i64, idx.j as i64);
    // (target n, i, j), sign, power of q, bracket arguments under the root
    let (up, down) = match g {
        Generator::AStar => (
            ((n + 1, i, j), 1, i + j, (n - i + 1, n - j + 1)),
            ((n - 1, i - 1, j - 1), 1, 0, (i, j)),
        ),
        Generator::BStar => (
            ((n + 1, i + 1, j), 1, j, (i + 1, n - j + 1)),
            ((n - 1, i, j - 1), -1, i + 1, (n - i, j)),
        ),
        Generator::A => (
            ((n + 1, i + 1, j + 1), 1, 0, (i + 1, j + 1)),
            ((n - 1, i, j), 1, i + j + 2, (n - i, n - j)),
        ),
        Generator::B => (
            ((n + 1, i, j + 1), -1, i - 1, (j + 1, n - i + 1)),
            ((n - 1, i - 1, j), 1, j, (n - j, i)),
        ),
    };
    let denom = C::bracket(p, idx.n + 1).recip();
    let mk = |((tn, ti, tj), sign, e, (x, y)): ((i64, i64, i64), i64, i64, (i64, i64))| {
        if x <= 0 || y <= 0 {
            return None;
        }
        let u = UIndex::checked(tn, ti, tj)?;
        let root = (C::bracket(p, x as u32) * C::bracket(p, y as u32)).sqrt_real();
        let c = C::from_i64(sign) * C::s_pow(p, 2 * e) * root * denom.clone();
        Some((u, c))
    };
    [mk(up), mk(down)]
}

/// Float form of [`left_mult_coeffs`].
pub fn left_mult_terms(g: Generator, idx: UIndex, p: &QParam) -> [Option<(UIndex, f64)>; 2] {
    left_mult_coeffs::<Complex64>(g, idx, p).map(|t| t.map(|(u, c)| (u, c.re)))
}

/// Same ladder in the orthonormal basis `e^n_{ij} = u^n_{ij} / |u^n_{ij}|`.
pub fn left_mult_terms_orthonormal(g: Generator, idx: UIndex, p: &QParam) -> [Option<(UIndex, f64)>; 2] {
    let terms = left_mult_terms(g, idx, p);
    terms.map(|t| {
        t.map(|(u, c)| {
            let e = (u.n as i64 - u.i as i64) - (idx.n as i64 - idx.i as i64);
            let ratio = p.q_pow(e) * (p.bracket(idx.n + 1) / p.bracket(u.n + 1)).sqrt();
            (u, c * ratio)
        })
    })
}

/// Sparse vector in the `u^n_{ij}` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct UVector {
    terms: BTreeMap<UIndex, Complex64>,
    param: QParam,
}

impl UVector {
    pub fn zero(param: QParam) -> Self {
        UVector {
            terms: BTreeMap::new(),
            param,
        }
    }

    pub fn basis(param: QParam, idx: UIndex) -> Self {
        let mut v = Self::zero(param);
        v.add_term(idx, Complex64::new(1.0, 0.0));
        v
    }

    pub fn from_terms(param: QParam, terms: impl IntoIterator<Item = (UIndex, Complex64)>) -> Self {
        let mut v = Self::zero(param);
        for (u, c) in terms {
            v.add_term(u, c);
        }
        v
    }

    pub fn param(&self) -> &QParam {
        &self.param
    }

    pub fn terms(&self) -> impl Iterator<Item = (&UIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn get(&self, idx: &UIndex) -> Complex64 {
        self.terms.get(idx).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|u| u.n).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, idx: UIndex, c: Complex64) {
        if c == Complex64::default() {
            return;
        }
        let e = self.terms.entry(idx).or_default();
        *e += c;
        if *e == Complex64::default() {
            self.terms.remove(&idx);
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
        for (u, c) in &other.terms {
            out.add_term(*u, *c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (u, c) in &other.terms {
            out.add_term(*u, -*c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.param, self.terms.iter().map(|(u, v)| (*u, v * c)))
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Haar norm squared, using orthogonality of the basis.
    pub fn norm_sq(&self) -> f64 {
        self.terms
            .iter()
            .map(|(u, c)| c.norm_sqr() * u.norm_sq(&self.param))
            .sum()
    }

    /// Haar inner product `h(self* other)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check(other)?;
        Ok(self
            .terms
            .iter()
            .filter_map(|(u, c)| other.terms.get(u).map(|d| c.conj() * d * u.norm_sq(&self.param)))
            .sum())
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs())
    }

    /// Left multiplication by a generator through the ladder formulas.
    pub fn left_mult(&self, g: Generator) -> Self {
        let mut out = Self::zero(self.param);
        for (u, c) in &self.terms {
            for (t, coef) in left_mult_terms(g, *u, &self.param).into_iter().flatten() {
                out.add_term(t, c * coef);
            }
        }
        out
    }

    /// Haar state: the coefficient of `u^0_{00}`.
    pub fn haar(&self) -> Complex64 {
        self.get(&UIndex::new(0, 0, 0))
    }

    /// Counit: `u^n_{ij} -> delta_ij`.
    pub fn counit(&self) -> Complex64 {
        self.terms.iter().filter(|(u, _)| u.i == u.j).map(|(_, c)| *c).sum()
    }

    pub fn is_podles(&self) -> bool {
        self.terms.keys().all(|u| u.bidegree().0 == 0)
    }
}

/// Generator, source label, leading coefficient and optional correction term.
type LadderStep<C> = (Generator, UIndex, C, Option<(UIndex, C)>);

type LevelCache = HashMap<u64, Vec<Arc<Vec<AlgebraElement>>>>;

fn level_cache() -> &'static RwLock<LevelCache> {
    static CACHE: OnceLock<RwLock<LevelCache>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All `u^n_{ij}` of level `n` in PBW form, row-major in `(i, j)`.
pub fn generate_u(n: u32, p: &QParam) -> Result<Arc<Vec<AlgebraElement>>> {
    generate_u_with_max(n, p, DEFAULT_MAX_DEGREE)
}

pub fn generate_u_with_max(n: u32, p: &QParam, max: u32) -> Result<Arc<Vec<AlgebraElement>>> {
    if n > max {
        return Err(Error::DegreeTooLarge { requested: n, max });
    }
    let p = p.to_float();
    if let Some(levels) = level_cache().read().get(&p.key()) {
        if let Some(l) = levels.get(n as usize) {
            return Ok(l.clone());
        }
    }
    let mut cache = level_cache().write();
    let levels = cache.entry(p.key()).or_default();
    if levels.is_empty() {
        levels.push(Arc::new(vec![AlgebraElement::one(p)]));
    }
    while levels.len() <= n as usize {
        let m = levels.len() as u32 - 1;
        let prev = levels[m as usize].clone();
        let prev2 = if m >= 1 {
            Some(levels[m as usize - 1].clone())
        } else {
            None
        };
        let next = next_level::<Complex64>(m, &prev, prev2.as_deref().map(|v| &v[..]), &p);
        levels.push(Arc::new(next));
    }
    Ok(levels[n as usize].clone())
}

/// PBW form of a single `u^n_{ij}`.
pub fn u_element(idx: UIndex, p: &QParam) -> Result<AlgebraElement> {
    let level = generate_u_with_max(idx.n, p, idx.n.max(DEFAULT_MAX_DEGREE))?;
    Ok(level[(idx.i * (idx.n + 1) + idx.j) as usize].clone())
}

/// Levels `0..=n` of the corepresentation matrices over any coefficient
/// field, computed without caching.
pub fn generate_levels<C: Coeff>(n: u32, p: &QParam) -> Vec<Vec<AlgebraElement<C>>> {
    let mut levels = vec![vec![AlgebraElement::<C>::one(*p)]];
    for m in 0..n {
        let prev = if m >= 1 {
            Some(&levels[m as usize - 1][..])
        } else {
            None
        };
        let next = next_level(m, &levels[m as usize], prev, p);
        levels.push(next);
    }
    levels
}

fn next_level<C: Coeff>(
    n: u32,
    cur: &[AlgebraElement<C>],
    prev: Option<&[AlgebraElement<C>]>,
    p: &QParam,
) -> Vec<AlgebraElement<C>> {
    let w = n as usize + 1;
    let get_cur = |u: UIndex| &cur[u.i as usize * w + u.j as usize];
    let get_prev = |u: UIndex| prev.map(|v| &v[u.i as usize * (w - 1) + u.j as usize]);
    let mut out = Vec::with_capacity((w + 1) * (w + 1));
    for big_i in 0..=(n + 1) as i64 {
        for big_j in 0..=(n + 1) as i64 {
            // candidate sources, a* first so it wins ties
            let cands = [
                (Generator::AStar, big_i, big_j),
                (Generator::BStar, big_i - 1, big_j),
                (Generator::B, big_i, big_j - 1),
                (Generator::A, big_i - 1, big_j - 1),
            ];
            let mut best: Option<LadderStep<C>> = None;
            for (g, si, sj) in cands {
                let Some(src) = UIndex::checked(n as i64, si, sj) else {
                    continue;
                };
                let [up, down] = left_mult_coeffs::<C>(g, src, p);
                let Some((_, c)) = up else { continue };
                if best.as_ref().is_none_or(|b| c.magnitude() > b.2.magnitude()) {
                    best = Some((g, src, c, down));
                }
            }
            let (g, src, c, down) = best.expect("every label has a source");
            let mut elem = AlgebraElement::<C>::generator(*p, g)
                .multiply(get_cur(src))
                .expect("same parameter");
            if let Some((d, dc)) = down {
                if let Some(pe) = get_prev(d) {
                    elem = elem.try_sub(&pe.scale(&dc)).expect("same parameter");
                }
            }
            out.push(elem.scale(&c.recip()));
        }
    }
    out
}

/// Worst PBW-coefficient deviation from `u u* = 1` and `u* u = 1` at
/// level `n`, computed in extended precision. Memoized per `(n, q)`.
pub fn unitarity_residual(n: u32, p: &QParam) -> Result<f64> {
    static CACHE: OnceLock<RwLock<HashMap<(u64, u32), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if n > DEFAULT_MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            requested: n,
            max: DEFAULT_MAX_DEGREE,
        });
    }
    let p = p.to_float();
    if let Some(r) = cache.read().get(&(p.key(), n)) {
        return Ok(*r);
    }
    let levels = generate_levels::<Fixed>(n, &p);
    let r = unitarity_defect(&levels[n as usize], n, &p);
    cache.write().insert((p.key(), n), r);
    Ok(r)
}

/// Unitarity defect of a given level-`n` matrix in its own arithmetic.
pub fn unitarity_defect<C: Coeff>(level: &[AlgebraElement<C>], n: u32, p: &QParam) -> f64 {
    let w = n as usize + 1;
    let adj: Vec<AlgebraElement<C>> = level.iter().map(|x| x.adjoint()).collect();
    let mut worst = 0f64;
    for i in 0..w {
        for j in 0..w {
            let mut row = AlgebraElement::<C>::zero(*p);
            let mut col = AlgebraElement::<C>::zero(*p);
            for k in 0..w {
                row = &row + &(&level[i * w + k] * &adj[j * w + k]);
                col = &col + &(&adj[k * w + i] * &level[k * w + j]);
            }
            if i == j {
                row = &row - &AlgebraElement::one(*p);
                col = &col - &AlgebraElement::one(*p);
            }
            worst = worst.max(row.max_abs()).max(col.max_abs());
        }
    }
    worst
}

type FixedLevels = HashMap<u64, Arc<Vec<Vec<AlgebraElement<Fixed>>>>>;

/// Cached fixed-point levels `0..=n` (possibly more).
pub(crate) fn fixed_levels(n: u32, p: &QParam) -> Arc<Vec<Vec<AlgebraElement<Fixed>>>> {
    static CACHE: OnceLock<RwLock<FixedLevels>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(l) = cache.read().get(&p.key()) {
        if l.len() > n as usize {
            return l.clone();
        }
    }
    let l = Arc::new(generate_levels::<Fixed>(n, p));
    cache.write().insert(p.key(), l.clone());
    l
}

/// Expansion of `x` in the `u^n_{ij}` basis up to level `nmax`, with the
/// Haar-norm residual of the discarded part.
///
/// The inner products are accumulated in fixed point: at small `q` the PBW
/// coefficients of `x` and of the `u^n_{ij}` are large and cancel.
pub fn expand(x: &AlgebraElement, nmax: u32) -> Result<(UVector, f64)> {
    let p = x.param().to_float();
    let top = nmax.min(x.degree());
    let levels = fixed_levels(top, &p);
    let xf = x.convert::<Fixed>();
    let mut v = UVector::zero(p);
    let mut kept = Fixed::zero();
    for (bd, comp) in xf.components() {
        let (l, r) = (bd.left, bd.right);
        let start = l.abs().max(r.abs());
        let mut n = start;
        while n <= top as i64 {
            let idx = UIndex::checked(n, (n + r) / 2, (n + l) / 2).expect("valid label");
            let u = &levels[idx.n as usize][(idx.i * (idx.n + 1) + idx.j) as usize];
            let ip = u.inner(&comp)?;
            let norm = Fixed::s_pow(&p, 4 * (idx.n as i64 - idx.i as i64)) * Fixed::bracket(&p, idx.n + 1).recip();
            let c = ip.clone() * norm.recip();
            kept = kept + ip.conj() * c.clone();
            v.add_term(idx, c.to_c64());
            n += 2;
        }
    }
    let total = xf.inner(&xf)?;
    let rest = (total - kept).to_c64().re;
    Ok((v, rest.max(0.0).sqrt()))
}

/// PBW form of a vector.
pub fn to_element(v: &UVector) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::zero(*v.param());
    for (u, c) in v.terms() {
        out = out.try_add(&u_element(*u, v.param())?.scale(c))?;
    }
    Ok(out)
}

/// Coproduct `u^n_{ij} -> sum_k u^n_{ik} (x) u^n_{kj}` as pairs of labels.
pub fn coproduct(idx: UIndex) -> Vec<(UIndex, UIndex)> {
    (0..=idx.n)
        .map(|k| (UIndex::new(idx.n, idx.i, k), UIndex::new(idx.n, k, idx.j)))
        .collect()
}

/// Finite linear combination of tensors `u ⊗ v` of basis elements.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TensorPairSum {
    terms: BTreeMap<(UIndex, UIndex), Complex64>,
}

impl TensorPairSum {
    pub fn terms(&self) -> impl Iterator<Item = (&(UIndex, UIndex), &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, left: UIndex, right: UIndex, c: Complex64) {
        let e = self.terms.entry((left, right)).or_default();
        *e += c;
        if *e == Complex64::default() {
            self.terms.remove(&(left, right));
        }
    }

    /// `(id ⊗ φ)` for a functional given on basis elements.
    pub fn apply_right(&self, param: QParam, mut phi: impl FnMut(UIndex) -> Result<Complex64>) -> Result<UVector> {
        let mut out = UVector::zero(param);
        for ((l, r), c) in &self.terms {
            out.add_term(*l, c * phi(*r)?);
        }
        Ok(out)
    }
}

/// Coproduct of a vector.
pub fn coproduct_vector(v: &UVector) -> TensorPairSum {
    let mut out = TensorPairSum::default();
    for (u, c) in v.terms() {
        for (l, r) in coproduct(*u) {
            out.add_term(l, r, *c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_corepresentation() {
        let p = QParam::new(0.5).unwrap();
        let l1 = generate_u(1, &p).unwrap();
        let e = |x: &AlgebraElement, y: AlgebraElement| x.distance(&y).unwrap();
        assert!(e(&l1[0], AlgebraElement::a_star(p)) < 1e-15);
        assert!(e(&l1[1], AlgebraElement::b(p).scale_real(-0.5)) < 1e-15);
        assert!(e(&l1[2], AlgebraElement::b_star(p)) < 1e-15);
        assert!(e(&l1[3], AlgebraElement::a(p)) < 1e-15);
    }

    #[test]
    fn linear_index_round_trip() {
        for idx in 0..400 {
            assert_eq!(UIndex::from_linear(idx).linear(), idx);
        }
    }

    #[test]
    fn unitarity_low_levels() {
        for &q in &[0.3, 0.8, 1.0] {
            let p = QParam::new(q).unwrap();
            for n in 0..=6 {
                assert!(unitarity_residual(n, &p).unwrap() < 1e-30);
            }
        }
    }

    #[test]
    fn float_levels_track_extended_precision() {
        let p = QParam::new(0.3).unwrap();
        let hi = generate_levels::<Fixed>(8, &p);
        for n in 0..=8u32 {
            let lo = generate_u(n, &p).unwrap();
            for (x, y) in lo.iter().zip(&hi[n as usize]) {
                let y = y.to_float();
                let scale = y.max_abs();
                assert!(x.distance(&y).unwrap() <= 1e-13 * scale);
            }
        }
    }

    #[test]
    fn norms_match_haar() {
        let p = QParam::new(0.7).unwrap();
        for n in 0..=4 {
            for i in 0..=n {
                for j in 0..=n {
                    let idx = UIndex::new(n, i, j);
                    let u = u_element(idx, &p).unwrap();
                    let h = u.inner(&u).unwrap().re;
                    assert!((h - idx.norm_sq(&p)).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn expand_round_trip() {
        let p = QParam::new(0.6).unwrap();
        let x = &(&AlgebraElement::a(p) * &AlgebraElement::b(p)) + &AlgebraElement::b_star(p).pow(2).unwrap();
        let (v, res) = expand(&x, 10).unwrap();
        assert!(res < 1e-7);
        assert!(to_element(&v).unwrap().distance(&x).unwrap() < 1e-12);
    }

    #[test]
    fn degree_limit() {
        let p = QParam::new(0.5).unwrap();
        assert!(matches!(
            generate_u_with_max(5, &p, 4),
            Err(Error::DegreeTooLarge { requested: 5, max: 4 })
        ));
    }
}
