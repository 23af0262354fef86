//! Descent of linear relations, Galois conjugation and the decomposition of
//! a Mahler function along its algebraic values.

use num_traits::{One, Zero};

use super::RelationPoly;
use crate::error::{Error, Result};
use crate::evalnum::{check_algebraic_value, ValueCheck};
use crate::field::{Field, FieldAutomorphism, NfElem, Q};
use crate::mahler::guess::series_kernel;
use crate::mahler::regular::modulus_sq_bounds;
use crate::mahler::{MahlerFunction, SigmaEquation};
use crate::ore::{pow_usize, KRat, Operator, PowerSeries};
use crate::poly::KPoly;

type K = NfElem;

fn combination(ws: &[KPoly], funcs: &[PowerSeries], n: usize) -> Vec<K> {
    PowerSeries::linear(ws.iter().cloned().zip(funcs.iter().cloned()).collect()).coeffs(n)
}

/// Rewrites `sum_i w_i h_i = 0` with `w_i` over a number field as a relation
/// over `Q`, keeping `w_i(alpha) = 0` for `i` in `zero_set` and
/// `w_{i0}(alpha) != 0`. The functions must have rational coefficients.
pub fn descend_relation(
    ws: &[KPoly],
    funcs: &[PowerSeries],
    alpha: &Q,
    zero_set: &[usize],
    i0: usize,
    n: usize,
) -> Result<Vec<KPoly>> {
    if ws.len() != funcs.len() || i0 >= ws.len() || zero_set.iter().any(|&i| i >= ws.len()) {
        return Err(Error::InvalidInput("index or length mismatch".into()));
    }
    if zero_set.contains(&i0) {
        return Err(Error::PreconditionViolated("witness index lies in the zero set".into()));
    }
    if funcs.iter().any(|f| f.coeffs(n).iter().any(|c| !c.is_rational())) {
        return Err(Error::FieldTooSmall("functions must have rational coefficients".into()));
    }
    if combination(ws, funcs, n).iter().any(|c| !c.is_zero()) {
        return Err(Error::PreconditionViolated("relation does not hold modulo z^n".into()));
    }
    let a = K::from_rational(alpha);
    if zero_set.iter().any(|&i| !ws[i].eval(&a).is_zero()) || ws[i0].eval(&a).is_zero() {
        return Err(Error::PreconditionViolated("vanishing pattern does not hold at the point".into()));
    }
    let field = ws.iter().flat_map(|w| w.coeffs()).find_map(|c| c.field().cloned());
    let Some(field) = field else {
        return Ok(ws.to_vec());
    };
    let component = |w: &KPoly, t: usize| -> KPoly {
        KPoly::new(w.coeffs().iter().map(|c| K::from_rational(&c.coords_in(&field)[t])).collect())
    };
    for c in ws.iter().flat_map(|w| w.coeffs()) {
        if let Some(k) = c.field() {
            if **k != *field {
                return Err(Error::FieldTooSmall("coefficients lie in several number fields".into()));
            }
        }
    }
    for t in 0..field.degree() {
        let w0 = component(&ws[i0], t);
        if w0.eval(&a).is_zero() {
            continue;
        }
        let out: Vec<KPoly> = ws.iter().map(|w| component(w, t)).collect();
        if combination(&out, funcs, n).iter().any(|c| !c.is_zero()) {
            return Err(Error::PreconditionViolated("component relation fails modulo z^n".into()));
        }
        return Ok(out);
    }
    Err(Error::NoComponentWitness)
}

/// Objects on which a field automorphism acts coefficient-wise.
#[derive(Clone, Debug)]
pub enum Conjugable {
    Series(PowerSeries),
    Relation(RelationPoly),
    Operator(Operator),
}

fn check_poly(p: &KPoly, tau: &FieldAutomorphism) -> Result<()> {
    p.coeffs().iter().try_for_each(|c| tau.apply(c).map(|_| ()))
}

/// Applies `tau` to every coefficient. Series are checked on their first
/// 256 coefficients before the lazy map is installed.
pub fn conjugate_object(x: &Conjugable, tau: &FieldAutomorphism) -> Result<Conjugable> {
    let map = |p: &KPoly| -> KPoly { p.map(|c| tau.apply(c).expect("checked field")) };
    match x {
        Conjugable::Series(s) => {
            for c in s.coeffs(256) {
                tau.apply(&c)?;
            }
            let t = tau.clone();
            Ok(Conjugable::Series(s.map(move |c| t.apply(c).expect("coefficient outside the automorphism field"))))
        }
        Conjugable::Relation(r) => {
            for (_, c) in r.poly().terms() {
                check_poly(c, tau)?;
            }
            Ok(Conjugable::Relation(r.with_poly(r.poly().map_coeffs(map))))
        }
        Conjugable::Operator(l) => {
            for c in l.coeffs() {
                check_poly(c, tau)?;
            }
            check_poly(l.den(), tau)?;
            Ok(Conjugable::Operator(Operator::with_den(l.kind(), l.coeffs().iter().map(map).collect(), map(l.den()))))
        }
    }
}

/// One Galois orbit removed by `f = (D/D') h + N/D'`.
#[derive(Clone, Debug)]
pub struct OrbitStep {
    pub point: K,
    pub value: K,
    /// Minimal polynomial of the point.
    pub d: KPoly,
    /// `sum_tau tau(v) D/(z - tau(alpha))`.
    pub n_gamma: KPoly,
}

/// `f = r1 + r2 g`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub r1: KRat,
    pub r2: KRat,
    pub g: MahlerFunction,
    pub steps: Vec<OrbitStep>,
    /// Order up to which the identity was checked on series.
    pub verified_to: usize,
    pub note: String,
}

const MAX_ORBITS: usize = 16;

/// Rational function equal to `f` within numerator and denominator degree
/// `d`, found modulo `z^n` and re-verified modulo `z^(2n)`.
pub fn rational_form(f: &PowerSeries, d: usize, n: usize) -> Option<KRat> {
    let n2 = 2 * n;
    let mut one = vec![K::zero(); n2];
    one[0] = K::one();
    let bases = vec![f.coeffs(n2), one];
    let cols: Vec<(usize, usize)> = (0..2).flat_map(|b| (0..=d).map(move |s| (b, s))).collect();
    let ker = series_kernel(&bases, &cols, n, n2);
    let v = ker.first()?;
    let den = KPoly::new(v[..=d].to_vec());
    let num = -KPoly::new(v[d + 1..].to_vec());
    if den.is_zero() {
        return None;
    }
    KRat::new(num, den).ok()
}

struct Orbit {
    points: Vec<K>,
    values: Vec<K>,
}

fn orbit_of(alpha: &K, v: &K) -> Result<Orbit> {
    let Some(k) = alpha.field() else {
        if !v.is_rational() {
            return Err(Error::FieldTooSmall("value at a rational point must be rational".into()));
        }
        return Ok(Orbit { points: vec![alpha.clone()], values: vec![v.clone()] });
    };
    let auts = FieldAutomorphism::all(k)?;
    if auts.len() != k.degree() {
        return Err(Error::FieldTooSmall("the field of the point is not normal".into()));
    }
    let mut points: Vec<K> = Vec::new();
    let mut values = Vec::new();
    for tau in &auts {
        let b = tau.apply(alpha)?;
        let w = tau.apply(v).map_err(|_| Error::FieldTooSmall("value lies outside the field of the point".into()))?;
        match points.iter().position(|p| *p == b) {
            Some(i) if values[i] != w => {
                return Err(Error::FieldTooSmall("value does not lie in the field generated by the point".into()))
            }
            Some(_) => {}
            None => {
                points.push(b);
                values.push(w);
            }
        }
    }
    Ok(Orbit { points, values })
}

fn linear_factor(b: &K) -> KPoly {
    KPoly::new(vec![-b.clone(), K::one()])
}

fn rational_poly(p: KPoly) -> Result<KPoly> {
    p.to_q().map(|q| q.to_k()).ok_or_else(|| Error::FieldTooSmall("orbit polynomial is not rational".into()))
}

/// Splits `f = r1 + r2 g` so that `g` no longer takes the supplied values.
/// Each `(alpha, v)` must satisfy `|alpha| < r` and survive a ball check of
/// the given width; points of one Galois orbit must carry conjugate values.
pub fn decompose_function(f: &MahlerFunction, values: &[(K, K)], r: &Q, width: &Q, n: usize) -> Result<Decomposition> {
    let q = f.q();
    if let Some(rat) = rational_form(f.series(), 16, 128) {
        let g = MahlerFunction::from_series("g", q, PowerSeries::from_vec(Vec::new()));
        let e = rat.den().clone();
        let check = f.series().mul_poly(&e).sub(&PowerSeries::polynomial(rat.num())).coeffs(n);
        if check.iter().all(|c| c.is_zero()) {
            return Ok(Decomposition {
                r1: rat,
                r2: KRat::zero(),
                g,
                steps: Vec::new(),
                verified_to: n,
                note: "rational function: g = 0".into(),
            });
        }
    }
    let (coeffs, inhom) = match (f.equation(), f.annihilator()) {
        (Some(eq), _) => (eq.coeffs().to_vec(), eq.inhom().clone()),
        (None, Some(l)) => (l.coeffs().to_vec(), KPoly::zero()),
        (None, None) => return Err(Error::PreconditionViolated("function has no known equation".into())),
    };
    let r_sq = r * r;
    for (alpha, v) in values {
        let (_, hi) = modulus_sq_bounds(alpha)?;
        if hi >= r_sq {
            return Err(Error::PreconditionViolated(format!("point {alpha} is not certified inside the disk")));
        }
        if let ValueCheck::Refuted { .. } = check_algebraic_value(f, alpha, v, width)? {
            return Err(Error::ValueNotAttained);
        }
    }
    let mut orbits: Vec<Orbit> = Vec::new();
    for (alpha, v) in values {
        let o = orbit_of(alpha, v)?;
        if let Some(prev) = orbits.iter().find(|p| p.points.contains(alpha)) {
            let i = prev.points.iter().position(|p| p == alpha).unwrap();
            if prev.values[i] != *v {
                return Err(Error::PreconditionViolated(format!("values along the orbit of {alpha} are not conjugate")));
            }
            continue;
        }
        orbits.push(o);
    }
    if orbits.len() > MAX_ORBITS {
        return Err(Error::IterationCapExceeded(format!("{} orbits (limit {MAX_ORBITS})", orbits.len())));
    }
    let mut r1 = KRat::zero();
    let mut r2 = KRat::one();
    let mut g = f.series().clone();
    let mut steps = Vec::new();
    for idx in 0..orbits.len() {
        let d = rational_poly(orbits[idx].points.iter().fold(KPoly::one(), |acc, b| &acc * &linear_factor(b)))?;
        let mut ng = KPoly::zero();
        for (b, w) in orbits[idx].points.iter().zip(&orbits[idx].values) {
            let cof = d.div_rem(&linear_factor(b)).0;
            ng = &ng + &cof.scale(w);
        }
        let ng = rational_poly(ng)?;
        let dp = d.derivative();
        g = g.mul_poly(&dp).sub(&PowerSeries::polynomial(&ng)).div_poly(&d)?;
        let dp_r = KRat::from_poly(dp.clone());
        r1 = &r1 + &(&r2 * &KRat::new(ng.clone(), dp.clone())?);
        r2 = &r2 * &(&KRat::from_poly(d.clone()) * &dp_r.inv().expect("nonzero derivative"));
        for later in orbits.iter_mut().skip(idx + 1) {
            for (b, w) in later.points.iter().zip(later.values.iter_mut()) {
                *w = (&(&dp.eval(b) * w) - &ng.eval(b)).div(&d.eval(b)).expect("distinct orbits");
            }
        }
        steps.push(OrbitStep {
            point: orbits[idx].points[0].clone(),
            value: orbits[idx].values[0].clone(),
            d,
            n_gamma: ng,
        });
    }
    let e = {
        let g0 = r1.den().gcd(r2.den());
        &r1.den().exact_div(&g0).unwrap() * r2.den()
    };
    let er1 = (&r1 * &KRat::from_poly(e.clone())).to_poly().expect("cleared");
    let er2 = (&r2 * &KRat::from_poly(e.clone())).to_poly().expect("cleared");
    let check = PowerSeries::linear(vec![
        (e.clone(), f.series().clone()),
        (-er2, g.clone()),
        (-er1, PowerSeries::one()),
    ])
    .coeffs(n);
    if check.iter().any(|c| !c.is_zero()) {
        return Err(Error::PreconditionViolated("decomposition identity fails on series".into()));
    }
    let eq = transformed_equation(q, &coeffs, &inhom, &r1, &r2)?;
    let gf = MahlerFunction::from_series(format!("{}_reduced", f.name()), q, g)
        .with_equation(eq)?
        .with_note("no algebraic value detected within bounds; only the supplied values were removed");
    Ok(Decomposition {
        r1,
        r2,
        g: gf,
        steps,
        verified_to: n,
        note: "g carries none of the supplied values; purity beyond them is not claimed".into(),
    })
}

/// Equation for `g` obtained from `sum a_i sigma^i f + b = 0` and
/// `f = r1 + r2 g`, cleared to polynomial coefficients.
fn transformed_equation(q: u64, coeffs: &[KPoly], inhom: &KPoly, r1: &KRat, r2: &KRat) -> Result<SigmaEquation> {
    let sig = |x: &KRat, i: usize| x.substitute_power(pow_usize(q, i));
    let mut new_coeffs = Vec::with_capacity(coeffs.len());
    let mut b = KRat::from_poly(inhom.clone());
    for (i, a) in coeffs.iter().enumerate() {
        let a = KRat::from_poly(a.clone());
        new_coeffs.push(&a * &sig(r2, i));
        b = &b + &(&a * &sig(r1, i));
    }
    let mut den = b.den().clone();
    for c in &new_coeffs {
        let g0 = den.gcd(c.den());
        den = &den.exact_div(&g0).unwrap() * c.den();
    }
    let clear = |x: &KRat| (x * &KRat::from_poly(den.clone())).to_poly().expect("cleared");
    SigmaEquation::new(q, new_coeffs.iter().map(clear).collect(), clear(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_number_field, qi, qr, Ring};
    use crate::poly::parse::parse_qpoly;

    fn gaussian() -> std::sync::Arc<crate::field::NumberField> {
        make_number_field(parse_qpoly("x^2+1", 'x').unwrap()).unwrap()
    }

    #[test]
    fn descent_over_gaussian_field() {
        let k = gaussian();
        let i = K::generator(&k);
        let h1 = PowerSeries::rational(KRat::new(KPoly::one(), KPoly::from_i64s(&[1, -1])).unwrap()).unwrap();
        let h2 = PowerSeries::rational(KRat::new(KPoly::one(), KPoly::from_i64s(&[1, -2])).unwrap()).unwrap();
        let w1 = KPoly::from_i64s(&[1, -1]).scale(&i);
        let w2 = KPoly::from_i64s(&[1, -2]).scale(&-i.clone());
        let out = descend_relation(&[w1, w2], &[h1, h2], &qi(1), &[0], 1, 64).unwrap();
        assert_eq!(out, vec![KPoly::from_i64s(&[1, -1]), KPoly::from_i64s(&[-1, 2])]);
    }

    #[test]
    fn descent_leaves_rational_relations() {
        let h1 = PowerSeries::rational(KRat::new(KPoly::one(), KPoly::from_i64s(&[1, -1])).unwrap()).unwrap();
        let ws = vec![KPoly::from_i64s(&[1, -1]), KPoly::from_i64s(&[-1])];
        let out = descend_relation(&ws, &[h1, PowerSeries::one()], &qi(2), &[], 0, 32).unwrap();
        assert_eq!(out, ws);
    }

    #[test]
    fn conjugation_of_relations() {
        let k = make_number_field(parse_qpoly("x^2-5", 'x').unwrap()).unwrap();
        let s5 = K::generator(&k);
        let tau = FieldAutomorphism::all(&k).unwrap()[1].clone();
        let r = super::super::tests::ternary_relation();
        let scaled = r.with_poly(r.poly().map_coeffs(|c| c.scale(&s5)));
        let Conjugable::Relation(c) = conjugate_object(&Conjugable::Relation(scaled), &tau).unwrap() else {
            panic!("kind changed");
        };
        assert_eq!(c, r.with_poly(r.poly().map_coeffs(|c| c.scale(&-s5.clone()))));
        let other = FieldAutomorphism::identity(&gaussian());
        assert_eq!(
            conjugate_object(&Conjugable::Relation(c), &other).unwrap_err(),
            Error::AutomorphismFieldMismatch
        );
    }

    #[test]
    fn rational_short_circuit() {
        let r = KRat::new(KPoly::one(), KPoly::from_i64s(&[1, -2])).unwrap();
        let f = MahlerFunction::from_series("f", 2, PowerSeries::rational(r.clone()).unwrap());
        let d = decompose_function(&f, &[], &qr(2, 5), &crate::field::pow2(-40), 256).unwrap();
        assert_eq!(d.r1, r);
        assert!(d.r2.is_zero());
        assert!(d.g.series().coeffs(64).iter().all(|c| c.is_zero()));
    }

    fn synthetic() -> MahlerFunction {
        // f - (2z^2 - 1) f(z^2) - z = 0
        let eq = SigmaEquation::new(2, vec![KPoly::one(), KPoly::from_i64s(&[1, 0, -2])], KPoly::from_i64s(&[0, -1])).unwrap();
        MahlerFunction::from_equation("f", eq, vec![K::zero()]).unwrap()
    }

    #[test]
    fn synthetic_orbit_step() {
        let k = make_number_field(parse_qpoly("x^2-2", 'x').unwrap()).unwrap();
        let a = K::generator(&k).div(&K::from_i64(2)).unwrap();
        let f = synthetic();
        let vals = vec![(a.clone(), a.clone()), (-a.clone(), -a.clone())];
        let d = decompose_function(&f, &vals, &qr(9, 10), &crate::field::pow2(-60), 256).unwrap();
        assert_eq!(d.steps.len(), 1);
        assert_eq!(d.steps[0].d, KPoly::new(vec![K::from_rational(&qr(-1, 2)), K::zero(), K::one()]));
        assert_eq!(d.steps[0].n_gamma, KPoly::one());
        assert_eq!(d.r1, KRat::new(KPoly::one(), KPoly::from_i64s(&[0, 2])).unwrap());
        // D' f - N - D g = 0
        let e = PowerSeries::linear(vec![
            (KPoly::from_i64s(&[0, 2]), f.series().clone()),
            (-&d.steps[0].d, d.g.series().clone()),
            (KPoly::from_i64s(&[-1]), PowerSeries::one()),
        ]);
        assert!(e.coeffs(256).iter().all(|c| c.is_zero()));
        let mismatched = vec![(a.clone(), a.clone()), (-a.clone(), a.clone())];
        assert!(decompose_function(&f, &mismatched, &qr(9, 10), &crate::field::pow2(-60), 64).is_err());
        let wrong = vec![(a.clone(), K::from_i64(3))];
        assert!(decompose_function(&f, &wrong, &qr(9, 10), &crate::field::pow2(-60), 64).is_err());
    }

    #[test]
    fn ternary_value_at_phi() {
        let k = make_number_field(parse_qpoly("x^2-5", 'x').unwrap()).unwrap();
        let t = K::generator(&k);
        let s = if t.embed(&crate::field::pow2(-10)).re.lo > Q::zero() { t } else { -t };
        let phi = (&K::one() - &s).div(&K::from_i64(2)).unwrap();
        let v = (&phi * &phi).div(&(&K::one() - &phi.pow(3))).unwrap();
        let f = MahlerFunction::from_equation("f", crate::mahler::ternary_equation(), vec![K::zero()]).unwrap();
        let d = decompose_function(&f, &[(phi, v)], &qr(99, 100), &crate::field::pow2(-60), 365).unwrap();
        assert_eq!(d.steps[0].d, KPoly::from_i64s(&[-1, -1, 1]));
        assert_eq!(d.verified_to, 365);
    }
}
