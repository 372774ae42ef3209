use std::time::Instant;

use num::complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use podles_core::peter_weyl::{expand, to_element, u_element};
use podles_core::podles::{
    berezin, berezin_coeff, berezin_coeff_pbw, berezin_element, berezin_table, definitional_berezin, fuzzy_basis,
    fuzzy_monomials, generators_podles, state_hn, BerezinFixture,
};
use podles_core::qmetric::gns_compression;
use podles_core::{AlgebraElement, Error, Monomial, QParam, UIndex, UVector};

type E = AlgebraElement<Complex64>;

fn qp(q: f64) -> QParam {
    QParam::new(q).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mul(x: &E, y: &E) -> E {
    x.multiply(y).unwrap()
}

#[test]
fn generator_examples() {
    let p = qp(0.6);
    let (a, b, bs) = generators_podles::<Complex64>(&p);
    assert_eq!(a, E::monomial(p, Monomial::new(0, 1, 1), c(1.0)));
    assert_eq!(b, mul(&E::a(p), &E::b_star(p)));
    assert!(b.adjoint().distance(&bs).unwrap() < 1e-15);
}

#[test]
fn state_examples() {
    for q in [0.3, 0.7, 1.0] {
        let p = qp(q);
        let (_, big_b, _) = generators_podles::<Complex64>(&p);
        for n in [0, 1, 5, 20] {
            assert!((state_hn(n, &E::one(p)).unwrap() - c(1.0)).norm() < 1e-14);
            assert!(state_hn(n, &big_b).unwrap().norm() < 1e-14);
        }
    }
}

#[test]
fn counit_examples() {
    let p = qp(0.6);
    let (big_a, _, _) = generators_podles::<Complex64>(&p);
    assert_eq!(E::one(p).counit(), c(1.0));
    assert_eq!(E::a(p).counit(), c(1.0));
    assert_eq!(E::a_star(p).counit(), c(1.0));
    assert_eq!(E::b(p).counit(), c(0.0));
    assert_eq!(big_a.counit(), c(0.0));
    assert_eq!(UVector::basis(p, UIndex::new(2, 1, 1)).counit(), c(1.0));
    assert_eq!(UVector::basis(p, UIndex::new(2, 0, 1)).counit(), c(0.0));
}

#[test]
fn exactness_anchor() {
    for q in [0.4, 0.8, 1.0] {
        let p = qp(q);
        for n in 0..=8u32 {
            for k in 0..=8u32 {
                let x = mul(&E::a_star(p).pow(k).unwrap(), &E::a(p).pow(k).unwrap());
                let v = state_hn(n, &x).unwrap().re * p.bracket(n + k + 1);
                assert!((v - p.bracket(n + 1)).abs() <= 1e-12, "q={q} N={n} k={k}");
            }
        }
    }
}

#[test]
fn berezin_coefficient_examples() {
    for q in [0.3, 0.5, 1.0] {
        let p = qp(q);
        for n in 0..=10 {
            assert!((berezin_coeff(n, 0, &p) - 1.0).abs() < 1e-14);
            for m in n + 1..n + 4 {
                assert_eq!(berezin_coeff(n, m, &p), 0.0);
            }
        }
    }
    // <2> h(a* u^2_11 a), built only from PBW operations
    let p = qp(0.5);
    let u = u_element(UIndex::new(2, 1, 1), &p).unwrap();
    let oracle = p.bracket(2) * mul(&mul(&E::a_star(p), &u), &E::a(p)).haar().re;
    assert!((berezin_coeff(1, 1, &p) - oracle).abs() < 1e-13);
    assert!((berezin_coeff_pbw(1, 1, &p).unwrap() - oracle).abs() < 1e-13);
}

#[test]
fn berezin_table_matches_definition() {
    for q in [0.3, 0.6, 0.9, 1.0] {
        let p = qp(q);
        for n in 0..=8 {
            for m in 0..=n {
                let fast = berezin_coeff(n, m, &p);
                let slow = berezin_coeff_pbw(n, m, &p).unwrap();
                assert!((fast - slow).abs() <= 1e-10, "q={q} N={n} m={m}: {fast} vs {slow}");
            }
        }
    }
}

#[test]
fn coefficients_lie_in_unit_interval() {
    for q in [0.2, 0.5, 0.8, 0.95, 1.0] {
        let p = qp(q);
        for n in 0..=12 {
            for &b in &berezin_table(n, &p).values {
                assert!((0.0..=1.0 + 1e-12).contains(&b), "q={q} N={n}: {b}");
            }
        }
    }
}

#[test]
fn berezin_examples() {
    let p = qp(0.5);
    let one = UVector::basis(p, UIndex::new(0, 0, 0));
    for n in 0..4 {
        assert_eq!(berezin(n, &one).unwrap(), one);
        for u in fuzzy_basis(3).labels {
            let v = UVector::basis(p, u);
            let want = v.scale(c(berezin_coeff(n, u.j, &p)));
            assert_eq!(berezin(n, &v).unwrap(), want);
        }
    }
    let (big_a, _, _) = generators_podles::<Complex64>(&p);
    let (v, _) = expand(&big_a, 2).unwrap();
    let u211 = UIndex::new(2, 1, 1);
    let want = UVector::from_terms(
        p,
        [
            (UIndex::new(0, 0, 0), c(1.0 / p.bracket(2))),
            (u211, v.get(&u211) * berezin_coeff(1, 1, &p)),
        ],
    );
    assert!(berezin(1, &v).unwrap().distance(&want).unwrap() < 1e-14);
    assert!(berezin(2, &UVector::zero(p)).unwrap().is_zero());
    let off = UVector::basis(p, UIndex::new(1, 0, 0));
    assert!(matches!(berezin(1, &off), Err(Error::NotPodlesSupport)));
    assert!(matches!(definitional_berezin(1, &off), Err(Error::NotPodlesSupport)));
    assert!(matches!(berezin_element(1, &E::a(p)), Err(Error::NotPodles)));
}

#[test]
fn fuzzy_basis_order_and_size() {
    let u = |n, i, j| UIndex::new(n, i, j);
    assert_eq!(fuzzy_basis(0).labels, vec![u(0, 0, 0)]);
    assert_eq!(
        fuzzy_basis(1).labels,
        vec![u(0, 0, 0), u(2, 0, 1), u(2, 1, 1), u(2, 2, 1)]
    );
    for n in 0..=20usize {
        assert_eq!(fuzzy_basis(n as u32).labels.len(), (n + 1) * (n + 1));
    }
}

#[test]
fn definitional_route_agrees() {
    for q in [0.5, 0.9, 1.0] {
        let p = qp(q);
        for n in [0, 1, 2, 5] {
            for u in fuzzy_basis(3).labels {
                let v = UVector::basis(p, u);
                let d = definitional_berezin(n, &v)
                    .unwrap()
                    .distance(&berezin(n, &v).unwrap())
                    .unwrap();
                assert!(d <= 1e-10, "q={q} N={n} {u:?}: {d:e}");
            }
            let one = UVector::basis(p, UIndex::new(0, 0, 0));
            assert!(definitional_berezin(n, &one).unwrap().distance(&one).unwrap() < 1e-14);
            let (big_a, big_b, _) = generators_podles::<Complex64>(&p);
            let (v, _) = expand(&mul(&big_a, &big_b), 4).unwrap();
            let d = definitional_berezin(n, &v)
                .unwrap()
                .distance(&berezin(n, &v).unwrap())
                .unwrap();
            assert!(d <= 1e-10, "q={q} N={n} AB: {d:e}");
        }
    }
}

#[test]
fn fuzzy_monomials_lie_in_the_fuzzy_sphere() {
    for q in [0.4, 0.8, 1.0] {
        let p = qp(q);
        for n in 0..=4 {
            let allowed = fuzzy_basis(n).labels;
            let monomials = fuzzy_monomials(n, &p).unwrap();
            assert_eq!(monomials.len(), ((n + 1) * (n + 1)) as usize);
            for x in monomials {
                let (v, r) = expand(&x, 2 * n).unwrap();
                assert!(r <= 1e-9);
                for (u, coef) in v.terms() {
                    assert!(allowed.contains(u) || coef.norm() <= 1e-12, "q={q} N={n} {u:?}");
                }
            }
        }
    }
}

#[test]
fn weak_star_convergence_to_counit() {
    let start = Instant::now();
    for q in [0.3, 0.7, 1.0] {
        let p = qp(q);
        let (big_a, _, _) = generators_podles::<Complex64>(&p);
        let panel = [
            big_a.clone(),
            mul(&big_a, &big_a),
            mul(&E::a_star(p), &E::a(p)),
            mul(&E::a_star(p).pow(2).unwrap(), &E::a(p).pow(2).unwrap()),
        ];
        for x in &panel {
            let gaps: Vec<f64> = (0..=8)
                .map(|e| (state_hn(1 << e, x).unwrap() - x.counit()).norm())
                .collect();
            for w in gaps.windows(2) {
                assert!(w[1] < w[0] || w[1] <= 1e-15, "q={q}: {gaps:?}");
            }
            assert!(gaps[8] < 0.01, "q={q}: {gaps:?}");
        }
    }
    eprintln!("weak-* panel: {:.2?}", start.elapsed());
}

#[test]
fn berezin_is_positive_on_squares() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0);
    let mut worst = f64::INFINITY;
    for s in 0..50 {
        let q = if s % 2 == 0 { 0.5 } else { 0.9 };
        let p = qp(q);
        let n = 1 + (s % 3) as u32;
        let v = UVector::from_terms(
            p,
            fuzzy_basis(n)
                .labels
                .into_iter()
                .map(|u| (u, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))),
        );
        let y = to_element(&v).unwrap();
        let z = berezin_element(n, &mul(&y.adjoint(), &y)).unwrap();
        let m = gns_compression(&z, 8);
        let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        assert!((&m - &herm).norm() <= 1e-8 * m.norm().max(1.0));
        let low = herm.symmetric_eigenvalues().min();
        worst = worst.min(low);
        assert!(low >= -1e-8, "sample {s}: q={q} N={n} min eigenvalue {low:e}");
    }
    eprintln!("positivity probe: min eigenvalue {worst:e}, {:.2?}", start.elapsed());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn berezin_preserves_adjoints(seed in any::<u64>(), q in 0.4f64..=1.0, n in 0u32..=4) {
        let p = qp(q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = podles_core::testing::random_podles(2, &p, &mut rng).unwrap();
        let lhs = berezin_element(n, &x.adjoint()).unwrap();
        let rhs = berezin_element(n, &x).unwrap().adjoint();
        prop_assert!(lhs.distance(&rhs).unwrap() <= 1e-9 * rhs.max_abs().max(1.0));
    }
}

#[test]
fn fixture_round_trip() {
    let p = qp(0.5);
    let table = berezin_table(4, &p);
    let fixture = BerezinFixture {
        q: 0.5,
        n: 4,
        b: table.values.clone(),
    };
    let text = serde_json::to_string(&fixture).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["N"], 4);
    assert_eq!(json["B"].as_array().unwrap().len(), 5);
    let back: BerezinFixture = serde_json::from_str(&text).unwrap();
    assert_eq!(back, fixture);
}
