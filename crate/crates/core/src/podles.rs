//! The Podles sphere, the states `h_N`, the quantum Berezin transform and
//! the quantum fuzzy spheres.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use num::complex::Complex64;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pbw::{AlgebraElement, Generator};
use crate::peter_weyl::{self, left_mult_terms_orthonormal, UIndex, UVector};
use crate::precise::Fixed;
use crate::qscalar::{Coeff, QParam};

/// `A = b b*`, `B = a b*`, `B* = b a*`.
pub fn generators_podles<C: Coeff>(p: &QParam) -> (AlgebraElement<C>, AlgebraElement<C>, AlgebraElement<C>) {
    let a = AlgebraElement::<C>::a(*p);
    let b = AlgebraElement::<C>::b(*p);
    let bs = AlgebraElement::<C>::b_star(*p);
    let ast = AlgebraElement::<C>::a_star(*p);
    (&b * &bs, &a * &bs, &b * &ast)
}

/// `h_N(x) = <N+1> h(a*^N x a^N)`.
///
/// Floating-point input is evaluated in fixed point: near `q = 1` the normal
/// form of `a*^N x a^N` has alternating binomial coefficients.
pub fn state_hn<C: Coeff>(n: u32, x: &AlgebraElement<C>) -> Result<C> {
    if C::prune_threshold().is_some() {
        let v = state_hn_direct(n, &x.convert::<Fixed>())?;
        return Ok(C::from_c64(v.to_c64()));
    }
    state_hn_direct(n, x)
}

fn state_hn_direct<C: Coeff>(n: u32, x: &AlgebraElement<C>) -> Result<C> {
    let p = *x.param();
    let an = AlgebraElement::<C>::a(p).pow(n)?;
    let asn = AlgebraElement::<C>::a_star(p).pow(n)?;
    let y = asn.multiply(x)?.multiply(&an)?;
    Ok(C::bracket(&p, n + 1) * y.haar())
}

/// Labels `(2m, i, m)` spanning the fuzzy sphere of degree `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzyBasis {
    pub n: u32,
    pub labels: Vec<UIndex>,
}

pub fn fuzzy_basis(n: u32) -> FuzzyBasis {
    let labels = (0..=n)
        .flat_map(|m| (0..=2 * m).map(move |i| UIndex::new(2 * m, i, m)))
        .collect();
    FuzzyBasis { n, labels }
}

/// Diagonal Berezin coefficients `B(N, m) = h_N(u^{2m}_{mm})`, `m = 0..=N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerezinCoefficients {
    pub n: u32,
    pub values: Vec<f64>,
}

impl BerezinCoefficients {
    /// `B(N, m)`, zero for `m > N`.
    pub fn get(&self, m: u32) -> f64 {
        self.values.get(m as usize).copied().unwrap_or(0.0)
    }
}

/// JSON fixture `{"q", "N", "B"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerezinFixture {
    pub q: f64,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
}

type TableCache = RwLock<HashMap<(u64, u32), Arc<BerezinCoefficients>>>;

fn table_cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All coefficients `B(N, m)` for one `N`.
///
/// Uses `h(a*^N x a^N) = q^(-2N) h(a^N a*^N x)` and the self-adjointness of
/// `a^N a*^N`: the coefficient of the orthonormal vector `e^{2m}_{mm}` in
/// `(q^-2 a)^N a*^N 1` equals `q^(-2N) h(a^N a*^N e^{2m}_{mm})`. Every ladder
/// coefficient of `a` and `a*` is positive, so no cancellation occurs.
pub fn berezin_table(n: u32, p: &QParam) -> Arc<BerezinCoefficients> {
    let p = p.to_float();
    if let Some(t) = table_cache().read().get(&(p.key(), n)) {
        return t.clone();
    }
    let mut vec: BTreeMap<UIndex, f64> = BTreeMap::from([(UIndex::new(0, 0, 0), 1.0)]);
    let scale_a = p.q_pow(-2);
    let step = |v: &BTreeMap<UIndex, f64>, g: Generator, f: f64| {
        let mut out: BTreeMap<UIndex, f64> = BTreeMap::new();
        for (u, c) in v {
            for (t, w) in left_mult_terms_orthonormal(g, *u, &p).into_iter().flatten() {
                *out.entry(t).or_default() += c * w * f;
            }
        }
        out
    };
    for _ in 0..n {
        vec = step(&vec, Generator::AStar, 1.0);
    }
    for _ in 0..n {
        vec = step(&vec, Generator::A, scale_a);
    }
    let top = p.bracket(n + 1);
    let values = (0..=n)
        .map(|m| {
            if m == 0 {
                return 1.0;
            }
            let idx = UIndex::new(2 * m, m, m);
            let c = vec.get(&idx).copied().unwrap_or(0.0);
            // h(a^N a*^N u) = |u| * <e, a^N a*^N 1>
            top * c * idx.norm_sq(&p).sqrt()
        })
        .collect();
    let t = Arc::new(BerezinCoefficients { n, values });
    table_cache().write().insert((p.key(), n), t.clone());
    t
}

/// `B(N, m)`; exactly zero for `m > N`.
pub fn berezin_coeff(n: u32, m: u32, p: &QParam) -> f64 {
    if m > n {
        return 0.0;
    }
    berezin_table(n, p).get(m)
}

/// `B(N, m)` straight from the definition `h_N(u^{2m}_{mm})` in PBW form.
pub fn berezin_coeff_pbw(n: u32, m: u32, p: &QParam) -> Result<f64> {
    if m > n {
        return Ok(0.0);
    }
    let levels = peter_weyl::fixed_levels(2 * m, &p.to_float());
    let u = &levels[2 * m as usize][(m * (2 * m + 1) + m) as usize];
    Ok(state_hn(n, u)?.to_c64().re)
}

/// `β_N` on a vector supported on the labels `(2m, i, m)`.
pub fn berezin(n: u32, v: &UVector) -> Result<UVector> {
    let p = *v.param();
    let table = berezin_table(n, &p);
    let mut out = UVector::zero(p);
    for (u, c) in v.terms() {
        if u.n != 2 * u.j {
            return Err(Error::NotPodlesSupport);
        }
        let b = table.get(u.j);
        if b != 0.0 {
            out.add_term(*u, c * b);
        }
    }
    Ok(out)
}

/// `h_N(u^n_{lj})` in PBW form, with the ladder kept in extended precision
/// because the PBW coefficients of `u^n_{lj}` grow fast for small q.
struct StateOnLadder {
    n: u32,
    levels: Arc<Vec<Vec<AlgebraElement<Fixed>>>>,
    memo: HashMap<UIndex, Complex64>,
}

impl StateOnLadder {
    fn new(n: u32, top: u32, p: &QParam) -> Self {
        StateOnLadder {
            n,
            levels: peter_weyl::fixed_levels(top, &p.to_float()),
            memo: HashMap::new(),
        }
    }

    fn eval(&mut self, r: UIndex) -> Result<Complex64> {
        if let Some(v) = self.memo.get(&r) {
            return Ok(*v);
        }
        let v = state_hn(self.n, &self.levels[r.n as usize][(r.i * (r.n + 1) + r.j) as usize])?.to_c64();
        self.memo.insert(r, v);
        Ok(v)
    }

    fn berezin(&mut self, v: &UVector) -> Result<UVector> {
        if !v.is_podles() {
            return Err(Error::NotPodlesSupport);
        }
        peter_weyl::coproduct_vector(v).apply_right(*v.param(), |r| self.eval(r))
    }
}

/// `β_N = (1 ⊗ h_N)Δ`, with `h_N` evaluated in PBW form on every `u^n_{lj}`.
pub fn definitional_berezin(n: u32, v: &UVector) -> Result<UVector> {
    let top = v.terms().map(|(u, _)| u.n).max().unwrap_or(0);
    StateOnLadder::new(n, top, v.param()).berezin(v)
}

/// `β_N` on a PBW element of the Podles sphere.
pub fn berezin_element(n: u32, x: &AlgebraElement) -> Result<AlgebraElement> {
    if !x.is_podles() {
        return Err(Error::NotPodles);
    }
    let (v, _) = peter_weyl::expand(x, x.degree())?;
    peter_weyl::to_element(&berezin(n, &v)?)
}

/// Monomial spanning set `A^i B^j`, `A^i B*^j` of the fuzzy sphere of degree `N`.
pub fn fuzzy_monomials(n: u32, p: &QParam) -> Result<Vec<AlgebraElement>> {
    let (a, b, bs) = generators_podles::<Complex64>(p);
    let mut out = Vec::new();
    for i in 0..=n {
        let ai = a.pow(i)?;
        for j in 0..=(n - i) {
            out.push(ai.multiply(&b.pow(j)?)?);
            if j >= 1 {
                out.push(ai.multiply(&bs.pow(j)?)?);
            }
        }
    }
    Ok(out)
}

/// Numerical rank of `β_N` applied (through the coproduct definition) to the
/// orthonormal basis of the Podles polynomials of degree `N + 1`.
pub fn image_dimension(n: u32, p: &QParam) -> Result<usize> {
    let mut before: Vec<UVector> = Vec::new();
    let mut after: Vec<UVector> = Vec::new();
    let mut state = StateOnLadder::new(n, 2 * (n + 1), p);
    for u in fuzzy_basis(n + 1).labels {
        let v = UVector::basis(*p, u).scale(Complex64::new(1.0 / u.norm_sq(p).sqrt(), 0.0));
        after.push(state.berezin(&v)?);
        before.push(v);
    }
    let mut labels: Vec<UIndex> = before.iter().flat_map(|r| r.terms().map(|(u, _)| *u)).collect();
    labels.sort();
    labels.dedup();
    // orthonormal coordinates, one level at a time: levels are mutually
    // orthogonal, and each block is measured against the same block of the input
    let block_sv = |rows: &[UVector], block: &[UIndex]| {
        nalgebra::DMatrix::<Complex64>::from_fn(rows.len(), block.len(), |r, c| {
            rows[r].get(&block[c]) * block[c].norm_sq(p).sqrt()
        })
        .singular_values()
    };
    let mut rank = 0;
    let mut start = 0;
    while start < labels.len() {
        let level = labels[start].n;
        let end = start + labels[start..].iter().take_while(|u| u.n == level).count();
        let block = &labels[start..end];
        let scale = block_sv(&before, block).iter().cloned().fold(0.0, f64::max);
        rank += block_sv(&after, block).iter().filter(|s| **s > 1e-9 * scale).count();
        start = end;
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = AlgebraElement<Complex64>;

    #[test]
    fn state_identity_small() {
        let p = QParam::new(0.5).unwrap();
        for n in 0..=3 {
            for k in 0..=3 {
                let x = &E::a_star(p).pow(k).unwrap() * &E::a(p).pow(k).unwrap();
                let lhs = state_hn(n, &x).unwrap().re;
                let rhs = p.bracket(n + 1) / p.bracket(n + k + 1);
                assert!((lhs - rhs).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn ladder_matches_pbw_oracle() {
        for &q in &[0.3, 0.5, 0.9, 1.0] {
            let p = QParam::new(q).unwrap();
            for n in 0..=5 {
                for m in 0..=n.min(4) {
                    let fast = berezin_coeff(n, m, &p);
                    let slow = berezin_coeff_pbw(n, m, &p).unwrap();
                    assert!((fast - slow).abs() < 1e-11, "q={q} N={n} m={m}: {fast} vs {slow}");
                }
            }
        }
    }

    #[test]
    fn table_edges() {
        let p = QParam::new(0.7).unwrap();
        assert!((berezin_coeff(6, 0, &p) - 1.0).abs() < 1e-13);
        assert_eq!(berezin_coeff(3, 4, &p), 0.0);
        // B(1, 1) at q = 0.5 from the explicit PBW product
        let p = QParam::new(0.5).unwrap();
        let u = peter_weyl::u_element(UIndex::new(2, 1, 1), &p).unwrap();
        let y = &(&E::a_star(p) * &u) * &E::a(p);
        let oracle = p.bracket(2) * y.haar().re;
        assert!((berezin_coeff(1, 1, &p) - oracle).abs() < 1e-14);
    }

    #[test]
    fn fuzzy_basis_size() {
        for n in 0..6 {
            assert_eq!(fuzzy_basis(n).labels.len(), ((n + 1) * (n + 1)) as usize);
        }
    }

    #[test]
    fn berezin_rejects_non_podles() {
        let p = QParam::new(0.5).unwrap();
        let v = UVector::basis(p, UIndex::new(1, 0, 0));
        assert!(matches!(berezin(2, &v), Err(Error::NotPodlesSupport)));
    }
}
