//! Seeded random elements for property tests and verification suites.

use num::complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::pbw::{AlgebraElement, Monomial};
use crate::peter_weyl::{to_element, UIndex, UVector};
use crate::podles::{fuzzy_basis, generators_podles};
use crate::qscalar::QParam;

fn unit_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Self-adjoint element of the fuzzy sphere of degree `n` with random
/// coordinates in the orthonormal basis `u^{2m}_{im} / |u^{2m}_{im}|`.
pub fn random_fuzzy_self_adjoint<R: Rng>(n: u32, p: &QParam, rng: &mut R) -> Result<AlgebraElement> {
    let basis = fuzzy_basis(n);
    let v = UVector::from_terms(
        *p,
        basis
            .labels
            .iter()
            .map(|u| (*u, unit_complex(rng) / u.norm_sq(p).sqrt())),
    );
    let x = to_element(&v)?;
    Ok((&x + &x.adjoint()).scale_real(0.5))
}

/// Random combination of the Podles monomials `A^i B^j`, `A^i B*^j` with
/// `i + j <= degree`.
pub fn random_podles<R: Rng>(degree: u32, p: &QParam, rng: &mut R) -> Result<AlgebraElement> {
    let (a, b, bs) = generators_podles::<Complex64>(p);
    let mut out = AlgebraElement::zero(*p);
    for i in 0..=degree {
        let ai = a.pow(i)?;
        for j in 0..=(degree - i) {
            out = &out + &ai.multiply(&b.pow(j)?)?.scale(&unit_complex(rng));
            if j > 0 {
                out = &out + &ai.multiply(&bs.pow(j)?)?.scale(&unit_complex(rng));
            }
        }
    }
    Ok(out)
}

/// Random element of the coordinate algebra with `terms` PBW monomials of
/// degree at most `degree`.
pub fn random_element<R: Rng>(degree: u32, terms: usize, p: &QParam, rng: &mut R) -> AlgebraElement {
    let d = degree as i32;
    let mut out = AlgebraElement::zero(*p);
    for _ in 0..terms {
        let k = rng.gen_range(-d..=d);
        let rest = (d - k.abs()) as u32;
        let m = rng.gen_range(0..=rest);
        let n = rng.gen_range(0..=rest - m);
        out.add_term(Monomial { k, m, n }, unit_complex(rng));
    }
    out
}

/// Random vector on the labels of levels `<= n`.
pub fn random_uvector<R: Rng>(n: u32, p: &QParam, rng: &mut R) -> UVector {
    let count = UIndex::level_offset(n + 1);
    UVector::from_terms(*p, (0..count).map(|i| (UIndex::from_linear(i), unit_complex(rng))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fuzzy_samples_are_self_adjoint_podles() {
        let p = QParam::new(0.6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_fuzzy_self_adjoint(2, &p, &mut rng).unwrap();
        assert!(x.is_podles());
        assert!(x.distance(&x.adjoint()).unwrap() < 1e-12);
        let y = random_podles(3, &p, &mut rng).unwrap();
        assert!(y.is_podles());
    }
}
