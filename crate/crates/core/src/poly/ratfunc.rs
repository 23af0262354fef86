use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::Poly;
use crate::error::{Error, Result};
use crate::field::{CoeffFmt, Field, Ring, Q};

/// Reduced fraction `num / den` with monic `den`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc<F> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> RatFunc<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZeroPolynomial);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly<F>, den: Poly<F>) -> Self {
        if num.is_zero() {
            return RatFunc { num, den: Poly::one() };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
            }
        };
        let l = den.lc().inv().expect("nonzero denominator");
        RatFunc { num: num.scale(&l), den: den.scale(&l) }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: F) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn z() -> Self {
        Self::from_poly(Poly::z())
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn to_poly(&self) -> Option<Poly<F>> {
        if self.is_polynomial() {
            Some(self.num.clone())
        } else {
            None
        }
    }

    /// Value at `x`; `None` at a pole.
    pub fn eval(&self, x: &F) -> Option<F> {
        let d = self.den.eval(x);
        d.inv().map(|i| self.num.eval(x) * &i)
    }

    /// `r(z^k)`.
    pub fn substitute_power(&self, k: usize) -> Self {
        RatFunc { num: self.num.substitute_power(k), den: self.den.substitute_power(k) }
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::reduce(n, &self.den * &self.den)
    }

    pub fn recip(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(Self::reduce(self.den.clone(), self.num.clone()))
        }
    }

    /// Order of vanishing at `alpha`; negative for poles.
    pub fn order_at(&self, alpha: &F) -> i64 {
        if self.num.is_zero() {
            return i64::MAX;
        }
        self.num.root_multiplicity(alpha) as i64 - self.den.root_multiplicity(alpha) as i64
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> RatFunc<G> {
        RatFunc::reduce(self.num.map(&f), self.den.map(&f))
    }
}

impl<F: Field> Zero for RatFunc<F> {
    fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<F: Field> One for RatFunc<F> {
    fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }
}

impl<F: Field> CoeffFmt for RatFunc<F> {
    fn to_text(&self) -> String {
        super::parse::format_ratfunc(self)
    }
}

impl<F: Field> Ring for RatFunc<F> {
    fn from_i64(n: i64) -> Self {
        Self::constant(F::from_i64(n))
    }
}

impl<F: Field> Field for RatFunc<F> {
    fn inv(&self) -> Option<Self> {
        self.recip()
    }
    fn from_rational(q: &Q) -> Self {
        Self::constant(F::from_rational(q))
    }
    fn to_rational(&self) -> Option<Q> {
        if self.num.is_constant() && self.den.is_constant() {
            self.num.coeff(0).to_rational()
        } else {
            None
        }
    }
}

impl<F: Field> Add<&RatFunc<F>> for &RatFunc<F> {
    type Output = RatFunc<F>;
    fn add(self, o: &RatFunc<F>) -> RatFunc<F> {
        if self.den == o.den {
            if self.den.is_one() {
                return RatFunc::from_poly(&self.num + &o.num);
            }
            return RatFunc::reduce(&self.num + &o.num, self.den.clone());
        }
        RatFunc::reduce(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl<F: Field> Sub<&RatFunc<F>> for &RatFunc<F> {
    type Output = RatFunc<F>;
    fn sub(self, o: &RatFunc<F>) -> RatFunc<F> {
        self + &(-o)
    }
}

impl<F: Field> Mul<&RatFunc<F>> for &RatFunc<F> {
    type Output = RatFunc<F>;
    fn mul(self, o: &RatFunc<F>) -> RatFunc<F> {
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(&self.num * &o.num);
        }
        RatFunc::reduce(&self.num * &o.num, &self.den * &o.den)
    }
}

impl<F: Field> Neg for &RatFunc<F> {
    type Output = RatFunc<F>;
    fn neg(self) -> RatFunc<F> {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl<F: Field> Neg for RatFunc<F> {
    type Output = RatFunc<F>;
    fn neg(self) -> RatFunc<F> {
        -&self
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<F: Field> $tr<RatFunc<F>> for RatFunc<F> {
            type Output = RatFunc<F>;
            fn $m(self, o: RatFunc<F>) -> RatFunc<F> { (&self).$m(&o) }
        }
        impl<'a, F: Field> $tr<&'a RatFunc<F>> for RatFunc<F> {
            type Output = RatFunc<F>;
            fn $m(self, o: &'a RatFunc<F>) -> RatFunc<F> { (&self).$m(o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl<F: Field> From<Poly<F>> for RatFunc<F> {
    fn from(p: Poly<F>) -> Self {
        RatFunc::from_poly(p)
    }
}

impl<F: Field> fmt::Display for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl<F: Field> fmt::Debug for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({})", self.to_text())
    }
}
