//! One row of the distance sweep.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gns::{lipnorm, TruncationConfig};
use super::mk::{mk_lower_seeded, MkConfig};
use super::spectral::{distq_upper, dq_upper};
use crate::error::Result;
use crate::pbw::AlgebraElement;
use crate::podles::{berezin_element, generators_podles};
use crate::qscalar::QParam;

/// Bounds for one `(q, N)` cell. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub q: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub dq_upper: f64,
    pub dq_lower: f64,
    pub lip_margin: f64,
    pub distq_upper: f64,
    pub lip_converged: bool,
    pub mk_converged: bool,
}

impl DistanceReport {
    pub fn compute(n: u32, p: &QParam, trunc: &TruncationConfig, mk: &MkConfig) -> Result<Self> {
        Self::compute_seeded(n, p, trunc, mk, 0)
    }

    pub fn compute_seeded(n: u32, p: &QParam, trunc: &TruncationConfig, mk: &MkConfig, seed: u64) -> Result<Self> {
        let upper = dq_upper(n, p);
        let lower = mk_lower_seeded(n, p, mk, seed);
        let (margin, lip_converged) = lip_contraction_margin(n, p, trunc)?;
        Ok(DistanceReport {
            q: p.q(),
            n,
            dq_upper: upper,
            dq_lower: lower.value,
            lip_margin: margin,
            distq_upper: distq_upper(n, p),
            lip_converged,
            mk_converged: lower.converged,
        })
    }
}

/// Test panel `A, B + B*, i(B - B*), A²`.
pub fn margin_panel(p: &QParam) -> Vec<AlgebraElement> {
    let (a, b, bs) = generators_podles::<Complex64>(p);
    vec![a.clone(), &b + &bs, (&b - &bs).scale(&Complex64::i()), &a * &a]
}

/// Smallest relative Lip-norm decrease `(L(x) - L(β_N x)) / L(x)` over the
/// panel, and whether every norm estimate converged.
pub fn lip_contraction_margin(n: u32, p: &QParam, cfg: &TruncationConfig) -> Result<(f64, bool)> {
    let mut margin = f64::INFINITY;
    let mut converged = true;
    for x in margin_panel(p) {
        let lx = lipnorm(&x, cfg)?;
        let lb = lipnorm(&berezin_element(n, &x)?, cfg)?;
        converged &= lx.converged && lb.converged;
        if lx.value > 0.0 {
            margin = margin.min((lx.value - lb.value) / lx.value);
        }
    }
    Ok((margin, converged))
}
