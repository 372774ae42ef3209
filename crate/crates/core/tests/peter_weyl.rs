use num::complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use podles_core::hopf::{pairing, EnvelopingTag};
use podles_core::peter_weyl::{
    coproduct, coproduct_vector, expand, generate_levels, generate_u, generate_u_with_max, to_element, u_element,
    unitarity_residual,
};
use podles_core::podles::generators_podles;
use podles_core::precise::Fixed;
use podles_core::testing::random_uvector;
use podles_core::{AlgebraElement, Coeff, Error, Generator, QParam, UIndex, UVector};

type E = AlgebraElement<Complex64>;

fn qp(q: f64) -> QParam {
    QParam::new(q).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn low_levels() {
    let p = qp(0.6);
    assert_eq!(generate_u(0, &p).unwrap()[0], E::one(p));
    let u1 = generate_u(1, &p).unwrap();
    assert_eq!(u1[0], E::a_star(p));
    assert!(u1[1].distance(&E::b(p).scale_real(-0.6)).unwrap() < 1e-15);
    assert_eq!(u1[2], E::b_star(p));
    assert_eq!(u1[3], E::a(p));
    let u2 = generate_u(2, &p).unwrap();
    assert!(u2[0].distance(&E::a_star(p).pow(2).unwrap()).unwrap() < 1e-14);
}

#[test]
fn degree_limit() {
    let p = qp(0.6);
    assert!(matches!(generate_u(41, &p), Err(Error::DegreeTooLarge { .. })));
    assert!(generate_u_with_max(41, &p, 41).is_ok());
}

#[test]
fn left_multiplication_examples() {
    let p = qp(0.6);
    let one = UVector::basis(p, UIndex::new(0, 0, 0));
    assert_eq!(one.left_mult(Generator::AStar), UVector::basis(p, UIndex::new(1, 0, 0)));
    assert_eq!(one.left_mult(Generator::A), UVector::basis(p, UIndex::new(1, 1, 1)));
    let want = UVector::basis(p, UIndex::new(1, 0, 1)).scale(c(-1.0 / 0.6));
    assert!(one.left_mult(Generator::B).distance(&want).unwrap() < 1e-15);
}

#[test]
fn expansion_examples() {
    let p = qp(0.6);
    let (v, r) = expand(&E::one(p), 3).unwrap();
    assert_eq!(v, UVector::basis(p, UIndex::new(0, 0, 0)));
    assert_eq!(r, 0.0);
    let (v, r) = expand(&E::a_star(p), 1).unwrap();
    assert!(v.distance(&UVector::basis(p, UIndex::new(1, 0, 0))).unwrap() < 1e-15);
    assert!(r.abs() < 1e-14);

    let (big_a, _, _) = generators_podles::<Complex64>(&p);
    let (v, r) = expand(&big_a, 2).unwrap();
    assert!(r.abs() < 1e-12);
    assert!((v.get(&UIndex::new(0, 0, 0)) - c(1.0 / p.bracket(2))).norm() < 1e-14);
    let u211 = UIndex::new(2, 1, 1);
    let oracle = u_element(u211, &p).unwrap().inner(&big_a).unwrap() * p.bracket(3) / p.q_pow(2);
    assert!((v.get(&u211) - oracle).norm() < 1e-14);
    assert_eq!(v.len(), 2);
}

#[test]
fn truncated_expansion_reports_residual() {
    let p = qp(0.6);
    let x = E::a_star(p).pow(3).unwrap();
    let (_, r) = expand(&x, 1).unwrap();
    assert!(r > 1e-3);
    let (_, r) = expand(&x, 3).unwrap();
    assert!(r.abs() < 1e-12, "{r}");
}

#[test]
fn coproduct_examples() {
    let u = |n, i, j| UIndex::new(n, i, j);
    assert_eq!(coproduct(u(0, 0, 0)), vec![(u(0, 0, 0), u(0, 0, 0))]);
    assert_eq!(
        coproduct(u(1, 0, 0)),
        vec![(u(1, 0, 0), u(1, 0, 0)), (u(1, 0, 1), u(1, 1, 0))]
    );
    // counit on the right leg returns the element
    let p = qp(0.6);
    let v = UVector::basis(p, u(2, 0, 1));
    let back = coproduct_vector(&v)
        .apply_right(p, |r| Ok(c(if r.i == r.j { 1.0 } else { 0.0 })))
        .unwrap();
    assert_eq!(back, v);
}

#[test]
fn norms() {
    for q in [0.4, 0.9, 1.0] {
        let p = qp(q);
        assert_eq!(UIndex::new(0, 0, 0).norm_sq(&p), 1.0);
        // h(x x*) involves cancelling products at small q, so it is checked in fixed point
        let levels = generate_levels::<Fixed>(4, &p);
        for n in 0..=4u32 {
            for i in 0..=n {
                for j in 0..=n {
                    let x = u_element(UIndex::new(n, i, j), &p).unwrap();
                    let want = q.powi(2 * (n - i) as i32) / p.bracket(n + 1);
                    assert!((x.inner(&x).unwrap() - c(want)).norm() < 1e-12, "q={q} {n}{i}{j}");
                    assert!((UIndex::new(n, i, j).norm_sq(&p) - want).abs() < 1e-15);
                    let xf = &levels[n as usize][(i * (n + 1) + j) as usize];
                    let h = xf.multiply(&xf.adjoint()).unwrap().haar().to_c64();
                    let want = q.powi(2 * j as i32) / p.bracket(n + 1);
                    assert!((h - c(want)).norm() < 1e-12, "q={q} {n}{i}{j}: {h} vs {want}");
                }
            }
        }
    }
}

#[test]
fn unitarity() {
    for q in [0.3, 0.7, 1.0] {
        let p = qp(q);
        for n in 0..=10 {
            assert!(unitarity_residual(n, &p).unwrap() <= 1e-8, "q={q} n={n}");
        }
    }
}

#[test]
fn orthogonality() {
    let p = qp(0.6);
    let labels: Vec<UIndex> = (0..UIndex::level_offset(5)).map(UIndex::from_linear).collect();
    let elems: Vec<E> = labels.iter().map(|u| u_element(*u, &p).unwrap()).collect();
    for (x, ux) in elems.iter().zip(&labels) {
        for (y, uy) in elems.iter().zip(&labels) {
            let v = x.inner(y).unwrap();
            let want = if ux == uy { ux.norm_sq(&p) } else { 0.0 };
            assert!((v - c(want)).norm() < 1e-10, "{ux:?} {uy:?}: {v}");
        }
    }
}

#[test]
fn pairing_with_k() {
    for q in [0.5, 1.0] {
        let p = qp(q);
        for n in 0..=6u32 {
            for i in 0..=n {
                for j in 0..=n {
                    let v = pairing(EnvelopingTag::K, UIndex::new(n, i, j), &p).unwrap();
                    let want = if i == j { p.s_pow(2 * j as i64 - n as i64) } else { 0.0 };
                    assert!((v - want).abs() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn linear_labels_round_trip() {
    for lin in 0..UIndex::level_offset(12) {
        let u = UIndex::from_linear(lin);
        assert_eq!(u.linear(), lin);
    }
    assert!(UIndex::checked(2, 3, 0).is_none());
    assert!(UIndex::checked(-1, 0, 0).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn engines_agree(seed in any::<u64>(), q in 0.3f64..=1.0) {
        let p = qp(q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_uvector(6, &p, &mut rng);
        let x = to_element(&v).unwrap();
        for g in Generator::ALL {
            let gx = E::generator(p, g).multiply(&x).unwrap();
            let (lhs, _) = expand(&gx, 7).unwrap();
            let rhs = v.left_mult(g);
            prop_assert!(lhs.distance(&rhs).unwrap() <= 1e-9 * rhs.max_abs().max(1.0));
        }
    }

    #[test]
    fn expand_inverts_to_element(seed in any::<u64>(), q in 0.3f64..=1.0) {
        let p = qp(q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_uvector(6, &p, &mut rng);
        let (back, r) = expand(&to_element(&v).unwrap(), 6).unwrap();
        prop_assert!(back.distance(&v).unwrap() <= 1e-9);
        prop_assert!(r.abs() <= 1e-9);
    }
}
