use std::time::Instant;

use num::complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use crate::error::Result;
use crate::hopf::{
    act_delta_pbw, conjugate_by_u, delta3, delta_matrix, partial1, partial2, partial_matrix, EnvelopingTag,
};
use crate::pbw::AlgebraElement;
use crate::peter_weyl::{expand, to_element, u_element, unitarity_residual, UIndex};
use crate::podles::{berezin_coeff, berezin_coeff_pbw, definitional_berezin, fuzzy_basis, state_hn};
use crate::qmetric::{
    dq_upper, dq_upper_via_state, f_func, f_lower_envelope, f_upper_envelope, mk_lower, rho_q, XqPoint,
};
use crate::qscalar::QParam;
use crate::testing::{random_element, random_podles};
use crate::UVector;

type E = AlgebraElement<Complex64>;

/// Result of one suite at one value of `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationOutcome {
    pub suite: String,
    pub q: f64,
    pub passed: u32,
    pub failed: u32,
    pub worst_residual: f64,
    pub wall_time_s: f64,
    pub failures: Vec<String>,
}

struct Suite {
    out: VerificationOutcome,
    start: Instant,
}

impl Suite {
    fn new(name: &str, q: f64) -> Self {
        Suite {
            out: VerificationOutcome {
                suite: name.to_string(),
                q,
                passed: 0,
                failed: 0,
                worst_residual: 0.0,
                wall_time_s: 0.0,
                failures: Vec::new(),
            },
            start: Instant::now(),
        }
    }

    fn check(&mut self, what: impl FnOnce() -> String, residual: f64, tol: f64) {
        if residual <= tol {
            self.out.passed += 1;
        } else {
            self.out.failed += 1;
            self.out
                .failures
                .push(format!("{}: residual {residual:e} > {tol:e}", what()));
        }
        if residual.is_nan() {
            self.out.worst_residual = f64::NAN;
        } else {
            self.out.worst_residual = self.out.worst_residual.max(residual);
        }
    }

    fn try_check(&mut self, what: &str, r: Result<f64>, tol: f64) {
        match r {
            Ok(v) => self.check(|| what.to_string(), v, tol),
            Err(e) => {
                self.out.failed += 1;
                self.out.failures.push(format!("{what}: {e}"));
            }
        }
    }

    fn finish(mut self) -> VerificationOutcome {
        self.out.wall_time_s = self.start.elapsed().as_secs_f64();
        self.out
    }
}

fn rng_for(seed: u64, p: &QParam, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ p.key() ^ salt.wrapping_mul(0x9E37_79B9))
}

fn suite_algebra(p: &QParam, seed: u64) -> VerificationOutcome {
    let mut s = Suite::new("algebra", p.q());
    let (a, as_, b, bs) = (E::a(*p), E::a_star(*p), E::b(*p), E::b_star(*p));
    let q = p.q();
    let one = E::one(*p);
    let rel = |x: E, y: E| x.distance(&y).unwrap_or(f64::INFINITY);
    s.check(|| "ba = q ab".into(), rel(&b * &a, (&a * &b).scale_real(q)), 1e-14);
    s.check(|| "b*a = q ab*".into(), rel(&bs * &a, (&a * &bs).scale_real(q)), 1e-14);
    s.check(|| "bb* = b*b".into(), rel(&b * &bs, &bs * &b), 1e-14);
    s.check(
        || "a*a + q²bb* = 1".into(),
        rel(&(&as_ * &a) + &(&b * &bs).scale_real(q * q), one.clone()),
        1e-14,
    );
    s.check(|| "aa* + bb* = 1".into(), rel(&(&a * &as_) + &(&b * &bs), one), 1e-14);
    let mut rng = rng_for(seed, p, 1);
    for i in 0..10 {
        let x = random_element(3, 4, p, &mut rng);
        let y = random_element(3, 4, p, &mut rng);
        s.check(
            || format!("adjoint involution #{i}"),
            rel(x.adjoint().adjoint(), x.clone()),
            1e-12,
        );
        let lhs = x.multiply(&y).map(|z| z.haar());
        let rhs = y.modular_nu().multiply(&x).map(|z| z.haar());
        s.try_check("twisted trace", lhs.and_then(|l| Ok((l - rhs?).norm())), 1e-10);
    }
    for k in 0..=6u32 {
        let ak = (&b * &bs).pow(k).map(|z| z.haar().re);
        s.try_check("Haar of A^k", ak.map(|v| (v - 1.0 / p.bracket(k + 1)).abs()), 1e-13);
    }
    s.finish()
}

fn suite_corep(p: &QParam, seed: u64) -> VerificationOutcome {
    let mut s = Suite::new("corepresentations", p.q());
    for n in 0..=6 {
        s.try_check(&format!("unitarity n={n}"), unitarity_residual(n, p), 1e-8);
    }
    let mut rng = rng_for(seed, p, 2);
    for i in 0..5 {
        let x = random_element(4, 6, p, &mut rng);
        let r = expand(&x, 4).and_then(|(v, _)| to_element(&v)?.distance(&x));
        s.try_check(&format!("expansion round trip #{i}"), r, 1e-8);
    }
    s.finish()
}

fn suite_derivations(p: &QParam, seed: u64) -> VerificationOutcome {
    let mut s = Suite::new("derivations", p.q());
    for u in fuzzy_basis(2).labels {
        let r = u_element(u, p).and_then(|x| {
            let lhs = conjugate_by_u(&partial_matrix(&x)?)?;
            lhs.residual(&delta_matrix(&x)?)
        });
        s.try_check(&format!("u ∂(x) u* = δ(x) at {u:?}"), r, 1e-9);
    }
    let mut rng = rng_for(seed, p, 3);
    for i in 0..5 {
        let r = (|| -> Result<f64> {
            let x = random_podles(2, p, &mut rng)?;
            let y = random_podles(2, p, &mut rng)?;
            let xy = x.multiply(&y)?;
            let mut worst = 0.0f64;
            for d in [partial1::<Complex64>, partial2::<Complex64>] {
                let rhs = d(&x)?.multiply(&y)?.try_add(&x.multiply(&d(&y)?)?)?;
                worst = worst.max(d(&xy)?.distance(&rhs)?);
            }
            Ok(worst)
        })();
        s.try_check(&format!("Leibniz rule #{i}"), r, 1e-9);
    }
    if p.is_classical() {
        let x = &E::a(*p) * &E::b_star(*p);
        let r = (|| -> Result<f64> {
            let h = act_delta_pbw(EnvelopingTag::H, &x)?.scale_real(0.5);
            delta3(&x)?.distance(&h)
        })();
        s.try_check("δ_3 = δ_h / 2", r, 1e-14);
        let y = &E::b(*p) * &E::a_star(*p);
        let r = (|| -> Result<f64> {
            let dh = |z: &E| act_delta_pbw(EnvelopingTag::H, z);
            let lhs = dh(&x.multiply(&y)?)?;
            let rhs = dh(&x)?.multiply(&y)?.try_add(&x.multiply(&dh(&y)?)?)?;
            lhs.distance(&rhs)
        })();
        s.try_check("δ_h is a derivation", r, 1e-13);
    }
    s.finish()
}

fn suite_berezin(p: &QParam) -> VerificationOutcome {
    let mut s = Suite::new("berezin", p.q());
    for n in 0..=4u32 {
        for k in 0..=4u32 {
            let x = (|| -> Result<E> { E::a_star(*p).pow(k)?.multiply(&E::a(*p).pow(k)?) })();
            let r = x
                .and_then(|x| state_hn(n, &x))
                .map(|v| (v.re - p.bracket(n + 1) / p.bracket(n + k + 1)).abs());
            s.try_check(&format!("h_N(a*^k a^k), N={n} k={k}"), r, 1e-12);
        }
        s.check(|| format!("B({n}, 0) = 1"), (berezin_coeff(n, 0, p) - 1.0).abs(), 1e-12);
        s.check(
            || format!("B({n}, {}) = 0", n + 1),
            berezin_coeff(n, n + 1, p).abs(),
            0.0,
        );
        for m in 0..=n.min(3) {
            let r = berezin_coeff_pbw(n, m, p).map(|v| (v - berezin_coeff(n, m, p)).abs());
            s.try_check(&format!("B({n}, {m}) against h_N"), r, 1e-10);
            let u = UIndex::new(2 * m, m, m);
            let r =
                definitional_berezin(n, &UVector::basis(*p, u)).map(|v| (v.get(&u).re - berezin_coeff(n, m, p)).abs());
            s.try_check(&format!("coproduct route B({n}, {m})"), r, 1e-10);
        }
    }
    s.finish()
}

fn suite_metric(p: &QParam) -> VerificationOutcome {
    let mut s = Suite::new("metric", p.q());
    if p.is_classical() {
        let r = rho_q(XqPoint::Real(1.0), XqPoint::Real(0.0), p).map(|v| (v - std::f64::consts::PI).abs());
        s.try_check("ρ_1(1, 0) = π", r, 1e-12);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let mut worst = 0.0f64;
        for &x in &grid {
            for &y in &grid {
                for &z in &grid {
                    let d = |u: f64, v: f64| rho_q(XqPoint::Real(u), XqPoint::Real(v), p).unwrap_or(f64::NAN);
                    worst = worst.max(d(x, z) - d(x, y) - d(y, z));
                }
            }
        }
        s.check(|| "arcsine metric triangle inequality".into(), worst.max(0.0), 1e-12);
    } else {
        let q = p.q();
        let r = rho_q(XqPoint::Power(0), XqPoint::Power(1), p).map(|v| (v - (1.0 - q * q).sqrt()).abs());
        s.try_check("ρ_q(1, q²)", r, 1e-12);
        let pts: Vec<XqPoint> = (0..=12).map(XqPoint::Power).chain([XqPoint::Zero]).collect();
        let mut worst = 0.0f64;
        for &x in &pts {
            for &y in &pts {
                for &z in &pts {
                    let d = |u, v| rho_q(u, v, p).unwrap_or(f64::NAN);
                    worst = worst.max(d(x, z) - d(x, y) - d(y, z));
                }
            }
        }
        s.check(|| "ρ_q triangle inequality".into(), worst.max(0.0), 1e-12);
        let mut worst = 0.0f64;
        for i in 0..=50 {
            let t = i as f64 / 50.0;
            let f = f_func(p, t);
            worst = worst.max(f_lower_envelope(p, t) - f).max(f - f_upper_envelope(p, t));
        }
        s.check(|| "f between its envelopes".into(), worst.max(0.0), 1e-12);
    }
    for n in [0u32, 1, 2, 4, 8] {
        let r = dq_upper_via_state(n, p).map(|v| (v - dq_upper(n, p)).abs());
        s.try_check(&format!("two routes for d_q bound, N={n}"), r, 1e-10);
    }
    for n in [1u32, 4] {
        let lo = mk_lower(n, p, &Default::default()).value;
        s.check(
            || format!("mk_lower <= dq_upper, N={n}"),
            (lo - dq_upper(n, p)).max(0.0),
            1e-8,
        );
    }
    s.finish()
}

/// Run every suite on every `q` of the configuration.
pub fn run_verify(cfg: &SweepConfig) -> Result<Vec<VerificationOutcome>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for &q in &cfg.q_grid {
        let p = QParam::new(q)?;
        out.push(suite_algebra(&p, cfg.seed));
        out.push(suite_corep(&p, cfg.seed));
        out.push(suite_derivations(&p, cfg.seed));
        out.push(suite_berezin(&p));
        out.push(suite_metric(&p));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_only_config_passes() {
        let cfg = SweepConfig {
            q_grid: vec![1.0],
            ..Default::default()
        };
        let out = run_verify(&cfg).unwrap();
        for o in &out {
            assert_eq!(o.failed, 0, "{o:?}");
        }
    }
}
