//! Operator norms in the GNS representation of the Haar state.
//!
//! Left multiplication by `x` is assembled column by column in the
//! orthonormal Peter–Weyl basis and split into connected blocks. The top
//! singular value of a small block comes from a dense SVD, of a large one from
//! Lanczos on `M^H M`. Ritz values never exceed the true eigenvalue, so each
//! stage yields a lower bound of the C*-norm.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use num::complex::Complex64;
use parking_lot::RwLock;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hopf::{partial1, partial2};
use crate::pbw::{AlgebraElement, Generator};
use crate::peter_weyl::{left_mult_terms_orthonormal, UIndex};
use crate::qscalar::QParam;

/// Truncation schedule for norm estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationConfig {
    pub max_degree: u32,
    pub stop_tol: f64,
    pub growth_step: u32,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig {
            max_degree: 24,
            stop_tol: 1e-6,
            growth_step: 4,
        }
    }
}

/// Lower bound for an operator norm with convergence diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub last_increment: f64,
    pub degree_used: u32,
    pub converged: bool,
}

const NONE: u32 = u32::MAX;

/// Blocks up to this many columns are solved densely.
const DENSE_BLOCK: usize = 48;

/// Orthonormal ladder coefficients for all labels up to a level.
struct LadderTable {
    levels: u32,
    // per label, per generator (A, A*, B, B*): two (target, coefficient) slots
    entries: Vec<[[(u32, f64); 2]; 4]>,
}

fn gen_slot(g: Generator) -> usize {
    match g {
        Generator::A => 0,
        Generator::AStar => 1,
        Generator::B => 2,
        Generator::BStar => 3,
    }
}

impl LadderTable {
    fn build(p: &QParam, levels: u32) -> Self {
        let count = UIndex::level_offset(levels + 1);
        let entries = (0..count)
            .into_par_iter()
            .map(|lin| {
                let idx = UIndex::from_linear(lin);
                let mut slots = [[(NONE, 0.0); 2]; 4];
                for g in Generator::ALL {
                    let terms = left_mult_terms_orthonormal(g, idx, p);
                    for (s, t) in terms.iter().enumerate() {
                        if let Some((u, c)) = t {
                            if u.n <= levels {
                                slots[gen_slot(g)][s] = (u.linear() as u32, *c);
                            }
                        }
                    }
                }
                slots
            })
            .collect();
        LadderTable { levels, entries }
    }
}

fn ladder_table(p: &QParam, levels: u32) -> Arc<LadderTable> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<LadderTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().get(&p.key()) {
        if t.levels >= levels {
            return t.clone();
        }
    }
    // grow in chunks so repeated calls do not rebuild for every new degree
    let target = levels.max(8).div_ceil(8) * 8;
    let t = Arc::new(LadderTable::build(p, target));
    cache.write().insert(p.key(), t.clone());
    t
}

type SparseVec = Vec<(u32, Complex64)>;

/// Dense scratch accumulator for sparse vector sums.
struct Spa {
    vals: Vec<Complex64>,
    mark: Vec<bool>,
    touched: Vec<u32>,
}

impl Spa {
    fn new(n: usize) -> Self {
        Spa {
            vals: vec![Complex64::default(); n],
            mark: vec![false; n],
            touched: Vec::new(),
        }
    }

    fn add(&mut self, i: u32, c: Complex64) {
        let iu = i as usize;
        if !self.mark[iu] {
            self.mark[iu] = true;
            self.touched.push(i);
        }
        self.vals[iu] += c;
    }

    fn drain(&mut self) -> SparseVec {
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            let iu = i as usize;
            let v = self.vals[iu];
            if v.re != 0.0 || v.im != 0.0 {
                out.push((i, v));
            }
            self.vals[iu] = Complex64::default();
            self.mark[iu] = false;
        }
        self.touched.clear();
        out
    }
}

/// Left multiplication by `x` as a Horner program over generator ladders.
struct Program {
    // a-family by power k >= 0: list of (m, n, c)
    a_family: BTreeMap<u32, Vec<(u32, u32, Complex64)>>,
    // a*-family by power j >= 1
    as_family: BTreeMap<u32, Vec<(u32, u32, Complex64)>>,
    // for each n, the largest m used
    bb_needs: BTreeMap<u32, u32>,
    degree: u32,
}

impl Program {
    fn new(x: &AlgebraElement) -> Self {
        let mut a_family: BTreeMap<u32, Vec<_>> = BTreeMap::new();
        let mut as_family: BTreeMap<u32, Vec<_>> = BTreeMap::new();
        let mut bb_needs: BTreeMap<u32, u32> = BTreeMap::new();
        for (mono, c) in x.terms() {
            let fam = if mono.k >= 0 {
                a_family.entry(mono.k as u32).or_default()
            } else {
                as_family.entry(mono.k.unsigned_abs()).or_default()
            };
            fam.push((mono.m, mono.n, *c));
            let e = bb_needs.entry(mono.n).or_default();
            *e = (*e).max(mono.m);
        }
        Program {
            a_family,
            as_family,
            bb_needs,
            degree: x.degree(),
        }
    }

    fn apply_gen(table: &LadderTable, g: Generator, v: &[(u32, Complex64)], spa: &mut Spa) -> SparseVec {
        let slot = gen_slot(g);
        for &(i, c) in v {
            for &(t, w) in &table.entries[i as usize][slot] {
                if t != NONE {
                    spa.add(t, c * w);
                }
            }
        }
        spa.drain()
    }

    fn column(&self, table: &LadderTable, col: u32, spa: &mut Spa) -> SparseVec {
        let start: SparseVec = vec![(col, Complex64::new(1.0, 0.0))];
        // W[(m, n)] = b^m b*^n e_col
        let mut w: HashMap<(u32, u32), SparseVec> = HashMap::new();
        let mut v_n = start;
        let mut n_cur = 0u32;
        for (&n, &mmax) in &self.bb_needs {
            while n_cur < n {
                v_n = Self::apply_gen(table, Generator::BStar, &v_n, spa);
                n_cur += 1;
            }
            let mut cur = v_n.clone();
            w.insert((0, n), cur.clone());
            for m in 1..=mmax {
                cur = Self::apply_gen(table, Generator::B, &cur, spa);
                w.insert((m, n), cur.clone());
            }
        }
        let combine = |terms: &[(u32, u32, Complex64)], spa: &mut Spa| {
            for &(m, n, c) in terms {
                for &(i, v) in &w[&(m, n)] {
                    spa.add(i, v * c);
                }
            }
        };
        // sum_k a^k Y_k by Horner
        let mut acc: SparseVec = Vec::new();
        if let Some(&kmax) = self.a_family.keys().next_back() {
            for k in (0..=kmax).rev() {
                let mut shifted = if k < kmax {
                    Self::apply_gen(table, Generator::A, &acc, spa)
                } else {
                    Vec::new()
                };
                for &(i, v) in &shifted {
                    spa.add(i, v);
                }
                shifted.clear();
                if let Some(terms) = self.a_family.get(&k) {
                    combine(terms, spa);
                }
                acc = spa.drain();
            }
        }
        // sum_j a*^j Y'_j by Horner
        let mut acc2: SparseVec = Vec::new();
        if let Some(&jmax) = self.as_family.keys().next_back() {
            for j in (1..=jmax).rev() {
                if j < jmax {
                    let s = Self::apply_gen(table, Generator::AStar, &acc2, spa);
                    for (i, v) in s {
                        spa.add(i, v);
                    }
                }
                if let Some(terms) = self.as_family.get(&j) {
                    combine(terms, spa);
                }
                acc2 = spa.drain();
            }
            acc2 = Self::apply_gen(table, Generator::AStar, &acc2, spa);
        }
        for (i, v) in acc.into_iter().chain(acc2) {
            spa.add(i, v);
        }
        spa.drain()
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Columns of one connected block, with local row numbering.
struct Block {
    cols: Vec<Vec<(usize, Complex64)>>,
    rows: usize,
}

fn blocks(columns: &[SparseVec], n_rows: usize) -> Vec<Block> {
    let n_cols = columns.len();
    let mut parent: Vec<usize> = (0..n_cols + n_rows).collect();
    for (c, col) in columns.iter().enumerate() {
        for &(r, _) in col {
            let (a, b) = (find(&mut parent, c), find(&mut parent, n_cols + r as usize));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut by_root: BTreeMap<usize, (Vec<usize>, HashMap<u32, usize>)> = BTreeMap::new();
    for (c, col) in columns.iter().enumerate() {
        if col.is_empty() {
            continue;
        }
        let root = find(&mut parent, c);
        by_root.entry(root).or_default().0.push(c);
    }
    by_root
        .into_values()
        .map(|(cols, mut rowmap)| {
            let mut out = Vec::with_capacity(cols.len());
            for c in cols {
                let local = columns[c]
                    .iter()
                    .map(|&(r, v)| {
                        let next = rowmap.len();
                        (*rowmap.entry(r).or_insert(next), v)
                    })
                    .collect();
                out.push(local);
            }
            Block {
                cols: out,
                rows: rowmap.len(),
            }
        })
        .collect()
}

/// Largest singular value of a sparse block via Lanczos on `M^H M`.
fn block_norm(block: &Block) -> f64 {
    match block.cols.len() {
        0 => 0.0,
        1 => block.cols[0].iter().map(|(_, x)| x.norm_sqr()).sum::<f64>().sqrt(),
        n if n <= DENSE_BLOCK => dense_block(block).singular_values().max(),
        _ => lanczos_norm(block),
    }
}

fn dense_block(block: &Block) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(block.rows, block.cols.len());
    for (c, col) in block.cols.iter().enumerate() {
        for &(r, x) in col {
            m[(r, c)] += x;
        }
    }
    m
}

fn lanczos_norm(block: &Block) -> f64 {
    let n = block.cols.len();
    let apply = |v: &[Complex64]| -> Vec<Complex64> {
        let mut mv = vec![Complex64::default(); block.rows];
        for (c, col) in block.cols.iter().enumerate() {
            let vc = v[c];
            if vc.re == 0.0 && vc.im == 0.0 {
                continue;
            }
            for &(r, x) in col {
                mv[r] += x * vc;
            }
        }
        block
            .cols
            .iter()
            .map(|col| col.iter().map(|&(r, x)| x.conj() * mv[r]).sum())
            .collect()
    };
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let norm = |a: &[Complex64]| dot(a, a).re.sqrt();
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.25 * ((i as f64) * 0.7548776662).sin(), 0.0))
        .collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut basis: Vec<Vec<Complex64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut theta = 0.0f64;
    let kmax = n.min(160);
    for k in 0..kmax {
        let mut w = apply(&basis[k]);
        let a = dot(&basis[k], &w).re;
        alpha.push(a);
        let before = norm(&w);
        // full reorthogonalization, twice
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bnext = norm(&w);
        // an invariant subspace has been found once the residual is rounding noise
        let last = bnext <= 1e-10 * before || k + 1 == kmax;
        if last || k % 8 == 7 {
            let t = tridiag_max(&alpha, &beta);
            let scale = t.0.abs().max(f64::MIN_POSITIVE);
            theta = theta.max(t.0);
            if last || bnext * t.1.abs() <= 1e-9 * scale {
                break;
            }
        }
        beta.push(bnext);
        w.iter_mut().for_each(|x| *x /= bnext);
        basis.push(w);
    }
    theta.max(0.0).sqrt()
}

/// Largest eigenvalue of the Lanczos tridiagonal matrix and the last
/// component of its eigenvector.
fn tridiag_max(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    let t = DMatrix::<f64>::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (imax, &lmax) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    (lmax, eig.eigenvectors[(k - 1, imax)])
}

/// Norm of `x` compressed to the domain of levels `<= degree`.
pub fn gns_norm_at_degree(x: &AlgebraElement, degree: u32) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let p = x.param().to_float();
    let prog = Program::new(x);
    let levels = degree + prog.degree;
    let table = ladder_table(&p, levels);
    let n_cols = UIndex::level_offset(degree + 1);
    let n_rows = UIndex::level_offset(levels + 1);
    let columns: Vec<SparseVec> = (0..n_cols)
        .into_par_iter()
        .map_init(|| Spa::new(n_rows), |spa, c| prog.column(&table, c as u32, spa))
        .collect();
    let blocks = blocks(&columns, n_rows);
    // visit blocks by decreasing upper bound and skip those that cannot win
    let mut order: Vec<(f64, usize)> = blocks.iter().map(block_upper_bound).zip(0..).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best = 0.0f64;
    for (bound, i) in order {
        if bound <= best {
            break;
        }
        best = best.max(block_norm(&blocks[i]));
    }
    best
}

/// Compression `P x P` of left multiplication by `x` to the levels
/// `<= degree`, in the orthonormal basis ordered by linear label.
pub fn gns_compression(x: &AlgebraElement, degree: u32) -> DMatrix<Complex64> {
    let p = x.param().to_float();
    let prog = Program::new(x);
    let table = ladder_table(&p, degree + prog.degree);
    let n = UIndex::level_offset(degree + 1);
    let n_rows = UIndex::level_offset(degree + prog.degree + 1);
    let mut out = DMatrix::zeros(n, n);
    let mut spa = Spa::new(n_rows);
    for c in 0..n {
        for (r, v) in prog.column(&table, c as u32, &mut spa) {
            if (r as usize) < n {
                out[(r as usize, c)] = v;
            }
        }
    }
    out
}

/// `sqrt(|M|_1 |M|_inf)`, an upper bound for the largest singular value.
fn block_upper_bound(block: &Block) -> f64 {
    let mut rows = vec![0.0; block.rows];
    let mut col_max = 0.0f64;
    for col in &block.cols {
        let mut s = 0.0;
        for &(r, x) in col {
            let a = x.norm();
            s += a;
            rows[r] += a;
        }
        col_max = col_max.max(s);
    }
    let row_max = rows.into_iter().fold(0.0, f64::max);
    (col_max * row_max).sqrt()
}

/// Staged norm estimate: degrees `growth_step, 2 growth_step, ...` up to
/// `max_degree`, stopping once the relative increment drops below `stop_tol`.
pub fn gns_norm(x: &AlgebraElement, cfg: &TruncationConfig) -> NormEstimate {
    if x.is_zero() {
        return NormEstimate {
            value: 0.0,
            last_increment: 0.0,
            degree_used: 0,
            converged: true,
        };
    }
    let step = cfg.growth_step.max(1);
    let mut degree = step.min(cfg.max_degree);
    let mut value = gns_norm_at_degree(x, degree);
    let mut last_increment = f64::INFINITY;
    let mut converged = false;
    while degree < cfg.max_degree {
        degree = (degree + step).min(cfg.max_degree);
        let next = gns_norm_at_degree(x, degree).max(value);
        last_increment = if next > 0.0 { (next - value) / next } else { 0.0 };
        value = next;
        if last_increment < cfg.stop_tol {
            converged = true;
            break;
        }
    }
    NormEstimate {
        value,
        last_increment,
        degree_used: degree,
        converged,
    }
}

/// Norm estimates of both branches of the Lip-norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipEstimate {
    pub partial1: NormEstimate,
    pub partial2: NormEstimate,
}

impl LipEstimate {
    /// Combined estimate: the larger value with the worse diagnostics.
    pub fn combined(&self) -> NormEstimate {
        let (a, b) = (self.partial1, self.partial2);
        NormEstimate {
            value: a.value.max(b.value),
            last_increment: a.last_increment.max(b.last_increment),
            degree_used: a.degree_used.max(b.degree_used),
            converged: a.converged && b.converged,
        }
    }
}

/// Both branch estimates of `L(x) = max(|∂_1 x|, |∂_2 x|)`.
pub fn lipnorm_branches(x: &AlgebraElement, cfg: &TruncationConfig) -> Result<LipEstimate> {
    if !x.is_podles() {
        return Err(crate::Error::NotPodles);
    }
    let d1 = partial1(x)?;
    let d2 = partial2(x)?;
    Ok(LipEstimate {
        partial1: gns_norm(&d1, cfg),
        partial2: gns_norm(&d2, cfg),
    })
}

/// `L(x) = max(|∂_1 x|, |∂_2 x|)`.
pub fn lipnorm(x: &AlgebraElement, cfg: &TruncationConfig) -> Result<NormEstimate> {
    Ok(lipnorm_branches(x, cfg)?.combined())
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = AlgebraElement<Complex64>;

    #[test]
    fn unit_and_generators() {
        let cfg = TruncationConfig::default();
        for &q in &[0.4, 0.8] {
            let p = QParam::new(q).unwrap();
            let one = gns_norm(&E::one(p), &cfg);
            assert!((one.value - 1.0).abs() < 1e-14);
            let a = gns_norm(&E::a(p), &cfg);
            assert!((a.value - 1.0).abs() < 1e-5, "q={q} {:?}", a);
            let b = gns_norm(&E::b(p), &cfg);
            assert!((b.value - 1.0).abs() < 1e-5, "q={q} {:?}", b);
        }
    }

    #[test]
    fn monotone_in_degree() {
        let p = QParam::new(0.7).unwrap();
        let x = &(&E::a(p) * &E::b(p)) + &E::b_star(p).scale_real(0.3);
        let mut prev = 0.0;
        for d in [2, 4, 6, 8, 10] {
            let v = gns_norm_at_degree(&x, d);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn lanczos_matches_dense_svd() {
        let p = QParam::new(0.6).unwrap();
        let x = &(&E::a(p) * &E::b_star(p)) + &(&E::b(p) * &E::a_star(p)).scale_real(0.5);
        let prog = Program::new(&x);
        let degree = 6;
        let levels = degree + prog.degree;
        let table = ladder_table(&p, levels);
        let n_cols = UIndex::level_offset(degree + 1);
        let n_rows = UIndex::level_offset(levels + 1);
        let mut spa = Spa::new(n_rows);
        let cols: Vec<SparseVec> = (0..n_cols).map(|c| prog.column(&table, c as u32, &mut spa)).collect();
        let dense = DMatrix::<Complex64>::from_fn(n_rows, n_cols, |r, c| {
            cols[c]
                .iter()
                .find(|(i, _)| *i as usize == r)
                .map(|x| x.1)
                .unwrap_or_default()
        });
        let svd_max = dense.singular_values().max();
        assert!((svd_max - gns_norm_at_degree(&x, degree)).abs() < 1e-10);
    }

    #[test]
    fn isometry_norms_stay_below_one() {
        let p = QParam::new(0.5).unwrap();
        for k in [-5, -1, 1, 3] {
            let mut x = E::zero(p);
            x.add_term(crate::pbw::Monomial { k, m: 0, n: 0 }, Complex64::new(1.0, 0.0));
            let mut prev = 0.0;
            for d in [8, 16, 24, 32] {
                let v = gns_norm_at_degree(&x, d);
                assert!(v <= 1.0 + 1e-12 && v >= prev - 1e-12, "k={k} d={d}: {v}");
                prev = v;
            }
        }
    }

    #[test]
    fn lanczos_matches_dense_on_every_block() {
        use rand::SeedableRng;
        let p = QParam::new(0.5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let y = crate::testing::random_podles(4, &p, &mut rng).unwrap();
        let x = partial2(&(&y + &y.adjoint())).unwrap();
        let prog = Program::new(&x);
        let degree = 16;
        let levels = degree + prog.degree;
        let table = ladder_table(&p, levels);
        let n_rows = UIndex::level_offset(levels + 1);
        let mut spa = Spa::new(n_rows);
        let cols: Vec<SparseVec> = (0..UIndex::level_offset(degree + 1))
            .map(|c| prog.column(&table, c as u32, &mut spa))
            .collect();
        for b in blocks(&cols, n_rows).iter().filter(|b| b.cols.len() >= 2) {
            let d = dense_block(b).singular_values().max();
            assert!((d - lanczos_norm(b)).abs() <= 1e-9 * d);
        }
    }
}
