//! Randomized property suites, each run for a fixed number of cases from a
//! fixed seed.

use std::sync::Arc;

use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};

use relforge_core::evalnum::eval_ball;
use relforge_core::field::{ComplexBall, Field, NfElem, NumberField, Q};
use relforge_core::mahler::{MahlerFunction, SigmaEquation};
use relforge_core::ore::{pow_usize, Kind, Operator, PowerSeries};
use relforge_core::poly::parse::parse_qpoly;
use relforge_core::poly::{KPoly, Monomial, MonomialOrder, MultiPoly, RatFunc, Var};
use relforge_core::relations::groebner::{buchberger, reduce, s_polynomial, GPoly};
use relforge_core::relations::{descend_relation, ev_alpha, RelationPoly};

pub const CASES: u32 = 200;

pub fn runner(seed: u8) -> TestRunner {
    let config = Config { cases: CASES, failure_persistence: None, rng_algorithm: RngAlgorithm::ChaCha, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn small_poly(max_deg: usize) -> impl Strategy<Value = KPoly> {
    prop::collection::vec(-3i64..=3, 1..=max_deg + 1).prop_map(|c| KPoly::from_i64s(&c))
}

fn kind() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Sigma(2)), Just(Kind::Sigma(3)), Just(Kind::Delta)]
}

fn operator(k: Kind, max_order: usize) -> impl Strategy<Value = Operator> {
    prop::collection::vec(small_poly(2), 1..=max_order + 1)
        .prop_filter("nonzero leading coefficient", |cs| !cs.last().unwrap().is_zero())
        .prop_map(move |cs| Operator::new(k, cs))
}

fn rational() -> impl Strategy<Value = Q> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg.into()))
    }
}

fn same(a: &Operator, b: &Operator) -> bool {
    a.sub(b).map(|d| d.is_zero()).unwrap_or(false)
}

fn test_series() -> PowerSeries {
    let geo = RatFunc::new(KPoly::from_i64s(&[1, 2]), KPoly::from_i64s(&[1, -1, 0, 1])).unwrap();
    PowerSeries::rational(geo).unwrap()
}

/// Associativity, distributivity and compatibility with the action.
pub fn skew_algebra_laws() -> Result<(), TestError<(Kind, Operator, Operator, Operator)>> {
    let strat = kind().prop_flat_map(|k| (Just(k), operator(k, 2), operator(k, 2), operator(k, 2)));
    runner(1).run(&strat, |(_, a, b, c)| {
        let ab = a.skew_mul(&b).unwrap();
        let lhs = ab.skew_mul(&c).unwrap();
        let rhs = a.skew_mul(&b.skew_mul(&c).unwrap()).unwrap();
        check(same(&lhs, &rhs), "associativity")?;
        let d1 = a.skew_mul(&b.add(&c).unwrap()).unwrap();
        let d2 = ab.add(&a.skew_mul(&c).unwrap()).unwrap();
        check(same(&d1, &d2), "left distributivity")?;
        let d3 = a.add(&b).unwrap().skew_mul(&c).unwrap();
        let d4 = a.skew_mul(&c).unwrap().add(&b.skew_mul(&c).unwrap()).unwrap();
        check(same(&d3, &d4), "right distributivity")?;
        let n = 48;
        let f = test_series();
        let bf = PowerSeries::from_vec(b.apply(&f, n).unwrap());
        let nested = a.apply(&bf, n).unwrap();
        let direct = ab.apply(&f, n).unwrap();
        let valid = n - a.order().unwrap_or(0);
        check(nested[..valid] == direct[..valid], "action of a product")
    })
}

/// `A = Q B + R` with `ord R < ord B`.
pub fn right_division() -> Result<(), TestError<(Kind, Operator, Operator)>> {
    let strat = kind().prop_flat_map(|k| (Just(k), operator(k, 4), operator(k, 2)));
    runner(2).run(&strat, |(_, a, b)| {
        let (qq, r) = a.right_divide(&b).unwrap();
        check(r.order().is_none_or(|o| o < b.order().unwrap()), "remainder order")?;
        let back = qq.skew_mul(&b).unwrap().add(&r).unwrap();
        check(same(&back, &a), "recomposition")
    })
}

fn equation() -> impl Strategy<Value = SigmaEquation> {
    (2u64..=3, 1usize..=2)
        .prop_flat_map(|(qq, m)| {
            (Just(qq), prop::collection::vec(small_poly(2), m + 1), small_poly(2), -3i64..=3)
        })
        .prop_filter_map("nonzero leading coefficient", |(qq, mut cs, b, c0)| {
            let mut a0 = cs[0].coeffs().to_vec();
            a0.resize(a0.len().max(1), NfElem::from_rational(&q(0, 1)));
            a0[0] = NfElem::from_rational(&q(1, 1));
            cs[0] = KPoly::new(a0);
            if cs.last().unwrap().is_zero() {
                return None;
            }
            let mut bc = b.coeffs().to_vec();
            bc.resize(bc.len().max(1), NfElem::from_rational(&q(0, 1)));
            bc[0] = NfElem::from_rational(&q(0, 1));
            bc.push(NfElem::from_rational(&q(c0, 1)));
            SigmaEquation::new(qq, cs, KPoly::new(bc)).ok()
        })
}

/// Series solutions satisfy both the inhomogeneous system and the
/// companion system of the homogenized operator.
pub fn companion_consistency() -> Result<(), TestError<SigmaEquation>> {
    runner(3).run(&equation(), |eq| {
        let f = MahlerFunction::from_equation("f", eq.clone(), vec![NfElem::from_rational(&q(0, 1))])
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        let s = f.series().clone();
        let n = 96;
        check(eq.residual(&s, n).iter().all(|c| c.is_zero()), "equation residual")?;
        let sys = eq.system("f").unwrap();
        let mut y = vec![PowerSeries::one()];
        for j in 0..eq.order() {
            y.push(s.subst_power(pow_usize(eq.q(), j)));
        }
        check(sys.check_solution(&y, n).is_none(), "inhomogeneous system")?;
        let hom = eq.homogenize();
        let comp = hom.companion().unwrap();
        let y: Vec<PowerSeries> = (0..comp.dim()).map(|j| s.subst_power(pow_usize(eq.q(), j))).collect();
        check(comp.check_solution(&y, n).is_none(), "companion system")?;
        check(hom.apply_numerator(&s, n).iter().all(|c| c.is_zero()), "homogenized operator")
    })
}

fn relation_poly() -> impl Strategy<Value = MultiPoly<KPoly>> {
    let mono = (0usize..=1, 0usize..=1, 0u32..=2, 0u32..=1)
        .prop_map(|(d1, d2, e1, e2)| Monomial::from_pairs([(Var::new(0, d1), e1), (Var::new(1, d2), e2)]));
    prop::collection::vec((mono, small_poly(2)), 1..=4).prop_map(|ts| {
        let mut p = MultiPoly::zero();
        for (m, c) in ts {
            p.add_term(m, c);
        }
        p
    })
}

/// `ev_alpha` commutes with sums and products.
pub fn ev_alpha_homomorphism() -> Result<(), TestError<(MultiPoly<KPoly>, MultiPoly<KPoly>, Q)>> {
    let strat = (relation_poly(), relation_poly(), rational());
    runner(4).run(&strat, |(p1, p2, a)| {
        let labels = vec!["f".to_string(), "g".to_string()];
        let k = Kind::Sigma(2);
        let rp = |p: MultiPoly<KPoly>| RelationPoly::new(k, labels.clone(), p).unwrap();
        let alpha = NfElem::from_rational(&a);
        let e1 = ev_alpha(&rp(p1.clone()), &alpha).unwrap();
        let e2 = ev_alpha(&rp(p2.clone()), &alpha).unwrap();
        let prod = ev_alpha(&rp(&p1 * &p2), &alpha).unwrap();
        let sum = ev_alpha(&rp(&p1 + &p2), &alpha).unwrap();
        check((&prod - &(&e1 * &e2)).is_zero(), "product")?;
        check((&sum - &(&e1 + &e2)).is_zero(), "sum")
    })
}

fn gpoly() -> impl Strategy<Value = GPoly> {
    let mono = (0u32..=2, 0u32..=1).prop_map(|(e1, e2)| Monomial::from_pairs([(Var::new(0, 0), e1), (Var::new(1, 0), e2)]));
    let coeff = (-3i64..=3, -2i64..=2).prop_map(|(c, d)| RatFunc::from_poly(KPoly::from_i64s(&[c, d])));
    prop::collection::vec((mono, coeff), 1..=3).prop_map(|ts| {
        let mut p = GPoly::zero();
        for (m, c) in ts {
            p.add_term(m, c);
        }
        p
    })
}

/// Basis elements reduce every generator and every S-polynomial to zero.
pub fn groebner_s_polynomials() -> Result<(), TestError<Vec<GPoly>>> {
    let strat = prop::collection::vec(gpoly(), 2..=3);
    runner(5).run(&strat, |gens| {
        let order = MonomialOrder::Lex(vec![Var::new(0, 0), Var::new(1, 0)]);
        let basis = match buchberger(&gens, &order) {
            Ok(b) => b,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for g in &gens {
            check(reduce(g, &basis, &order).is_zero(), "generator reduces to zero")?;
        }
        for i in 0..basis.len() {
            for j in 0..i {
                check(reduce(&s_polynomial(&basis[i], &basis[j], &order), &basis, &order).is_zero(), "S-polynomial")?;
            }
        }
        Ok(())
    })
}

fn sqrt2() -> Arc<NumberField> {
    NumberField::with_embedding(parse_qpoly("x^2-2", 'x').unwrap(), Some(0)).unwrap()
}

/// Descended relations are rational, hold on the series and keep the
/// vanishing pattern at the point.
pub fn descent_verification() -> Result<(), TestError<(i64, KPoly, KPoly, [i64; 4], Q)>> {
    let strat = (-2i64..=2, small_poly(2), small_poly(2), [-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3], rational());
    runner(6).run(&strat, |(c, p, r, lm, a)| {
        let k = sqrt2();
        let n = 64;
        let h1 = PowerSeries::rational(RatFunc::new(KPoly::one(), KPoly::from_i64s(&[1, -c])).unwrap()).unwrap();
        let h2 = h1.mul_poly(&p);
        let h3 = PowerSeries::one();
        let h4 = PowerSeries::polynomial(&r);
        let lam = NfElem::from_coords(&k, vec![q(lm[0], 1), q(lm[1], 1)]).unwrap();
        let mu = NfElem::from_coords(&k, vec![q(lm[2], 1), q(lm[3], 1)]).unwrap();
        let one = KPoly::one();
        let ws = vec![p.scale(&lam), one.scale(&-lam.clone()), r.scale(&mu), one.scale(&-mu.clone())];
        let alpha = NfElem::from_rational(&a);
        let zero_set: Vec<usize> = (0..4).filter(|&i| ws[i].eval(&alpha).is_zero()).collect();
        let Some(i0) = (0..4).find(|i| !zero_set.contains(i)) else {
            return Ok(());
        };
        let funcs = [h1, h2, h3, h4];
        let out = descend_relation(&ws, &funcs, &a, &zero_set, i0, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
        check(out.iter().all(|w| w.coeffs().iter().all(|x| x.is_rational())), "rational coefficients")?;
        let mut acc = vec![NfElem::zero(); n];
        for (w, h) in out.iter().zip(&funcs) {
            let hs = KPoly::new(h.coeffs(n));
            for (i, x) in w.mul_trunc(&hs, n).coeffs().iter().enumerate() {
                acc[i] = acc[i].clone() + x;
            }
        }
        check(acc.iter().all(|x| x.is_zero()), "descended relation holds")?;
        check(zero_set.iter().all(|&i| out[i].eval(&alpha).is_zero()), "zero set preserved")?;
        check(!out[i0].eval(&alpha).is_zero(), "witness coefficient nonzero")
    })
}

/// Ball arithmetic and evaluation enclose exact values.
pub fn ball_soundness() -> Result<(), TestError<(Q, Q, Q, Q, i64, Q)>> {
    let strat = (rational(), rational(), rational(), rational(), -2i64..=2, (-9i64..=9, 10i64..=20));
    let strat = strat.prop_map(|(a, b, c, d, cc, (n, den))| (a, b, c, d, cc, q(n, den)));
    runner(7).run(&strat, |(a, b, c, d, cc, x)| {
        let r1 = q(1, 1000);
        let r2 = q(1, 77);
        let u = ComplexBall::point(a.clone(), b.clone()).inflate(&r1);
        let v = ComplexBall::point(c.clone(), d.clone()).inflate(&r2);
        check((&u + &v).contains(&(&a + &c), &(&b + &d)), "sum")?;
        check((&u - &v).contains(&(&a - &c), &(&b - &d)), "difference")?;
        check((&u * &v).contains(&(&a * &c - &b * &d), &(&a * &d + &b * &c)), "product")?;
        let t = NfElem::from_coords(&sqrt2(), vec![a.clone(), b.clone()]).unwrap();
        let e = &t.embed(&q(1, 1 << 20)) - &ComplexBall::from_rational(&a);
        check((&e * &e).contains(&(q(2, 1) * &b * &b), &Q::zero()), "embedding of a + b sqrt 2")?;
        if x.is_zero() {
            return Ok(());
        }
        // (1 - c z) f = (1 - c z^2) f(z^2) has the solution 1 / (1 - c z)
        let cq = q(cc, 2);
        let a0 = KPoly::new(vec![NfElem::from_rational(&q(1, 1)), NfElem::from_rational(&-cq.clone())]);
        let a1 = KPoly::new(vec![
            NfElem::from_rational(&q(-1, 1)),
            NfElem::zero(),
            NfElem::from_rational(&cq),
        ]);
        let eq = SigmaEquation::new(2, vec![a0, a1], KPoly::zero()).unwrap();
        let f = MahlerFunction::from_equation("f", eq, vec![NfElem::from_rational(&q(1, 1))]).unwrap();
        let rep = eval_ball(&f, &NfElem::from_rational(&x), &q(1, 1 << 30)).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let exact = (Q::from_integer(1.into()) - &cq * &x).recip();
        check(rep.ball.contains(&exact, &Q::zero()), "evaluation encloses 1/(1 - c x)")
    })
}
