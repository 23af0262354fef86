//! Simple number fields `Q(t)` and their elements.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::roots::refine_root;
use super::{
    from_f64, is_irreducible_over_q, isolate_complex_roots, log2_abs, pow2, CoeffFmt, ComplexBall,
    Field, Ring, RootDisc, Q,
};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// `Q[x] / (minpoly)` with a chosen complex embedding.
pub struct NumberField {
    minpoly: Poly<Q>,
    roots: Vec<RootDisc>,
    index: usize,
    refined: Mutex<Vec<RootDisc>>,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.minpoly == other.minpoly
    }
}

impl Eq for NumberField {}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({}, embedding {})", crate::poly::parse::format_terms(self.minpoly.coeffs(), "x"), self.index)
    }
}

/// Builds `Q(t)` for a monic irreducible `minpoly`, distinguished embedding
/// chosen by smallest argument in `[0, 2pi)`, then smallest modulus.
pub fn make_number_field(minpoly: Poly<Q>) -> Result<Arc<NumberField>> {
    NumberField::with_embedding(minpoly, None)
}

fn argument_key(d: &RootDisc) -> (f64, f64) {
    let c = d.center_f64();
    let mut a = if d.is_real() {
        if c.re > 0.0 {
            0.0
        } else {
            std::f64::consts::PI
        }
    } else {
        c.im.atan2(c.re)
    };
    if a < 0.0 {
        a += 2.0 * std::f64::consts::PI;
    }
    (a, c.norm())
}

impl NumberField {
    /// Like [`make_number_field`], with an explicit embedding index into the
    /// sorted root list.
    pub fn with_embedding(minpoly: Poly<Q>, index: Option<usize>) -> Result<Arc<NumberField>> {
        if minpoly.deg() < 1 {
            return Err(Error::InvalidInput("minimal polynomial must have degree at least 1".into()));
        }
        if !minpoly.is_monic() {
            return Err(Error::NotMonic);
        }
        if !is_irreducible_over_q(&minpoly) {
            return Err(Error::NotIrreducible);
        }
        let mut roots = isolate_complex_roots(&minpoly)?;
        roots.sort_by(|a, b| {
            let (aa, am) = argument_key(a);
            let (ba, bm) = argument_key(b);
            if (aa - ba).abs() > 1e-12 {
                aa.partial_cmp(&ba).unwrap()
            } else {
                am.partial_cmp(&bm).unwrap()
            }
        });
        let index = index.unwrap_or(0);
        if index >= roots.len() {
            return Err(Error::InvalidInput(format!(
                "embedding index {index} out of range for degree {}",
                roots.len()
            )));
        }
        Ok(Arc::new(NumberField { minpoly, refined: Mutex::new(roots.clone()), roots, index }))
    }

    pub fn minpoly(&self) -> &Poly<Q> {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.deg() as usize
    }

    pub fn embedding_index(&self) -> usize {
        self.index
    }

    /// Initial isolating discs, sorted as for the embedding index.
    pub fn root_discs(&self) -> &[RootDisc] {
        &self.roots
    }

    /// Disc around root `i` with radius at most `radius`.
    pub fn root_disc(&self, i: usize, radius: &Q) -> RootDisc {
        let mut cache = self.refined.lock().unwrap();
        if cache[i].radius > *radius {
            cache[i] = refine_root(&self.minpoly, &cache[i], radius);
        }
        cache[i].clone()
    }

    /// Approximate roots, for numeric searches.
    fn approx_roots(&self) -> Vec<Complex64> {
        (0..self.degree()).map(|i| self.root_disc(i, &pow2(-80)).center_f64()).collect()
    }

    /// Same minimal polynomial with another distinguished embedding.
    pub fn reembed(self: &Arc<Self>, index: usize) -> Result<Arc<NumberField>> {
        if index == self.index {
            return Ok(self.clone());
        }
        if index >= self.roots.len() {
            return Err(Error::InvalidInput(format!("embedding index {index} out of range")));
        }
        let cache = self.refined.lock().unwrap().clone();
        Ok(Arc::new(NumberField {
            minpoly: self.minpoly.clone(),
            roots: self.roots.clone(),
            index,
            refined: Mutex::new(cache),
        }))
    }

    fn reduce(&self, mut v: Vec<Q>) -> Vec<Q> {
        let d = self.degree();
        let m = self.minpoly.coeffs();
        while v.len() > d {
            let c = v.pop().unwrap();
            if c.is_zero() {
                continue;
            }
            let off = v.len() - d;
            for i in 0..d {
                v[off + i] -= &c * &m[i];
            }
        }
        v.resize(d, Q::zero());
        v
    }
}

/// Element of `Q` or of a number field. Elements whose coordinates beyond
/// the constant one vanish are always stored as `Rational`.
#[derive(Clone, PartialEq, Eq)]
pub enum NfElem {
    Rational(Q),
    Algebraic(Arc<NumberField>, Vec<Q>),
}

fn same_field(a: &Arc<NumberField>, b: &Arc<NumberField>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl NfElem {
    fn normalize(k: &Arc<NumberField>, coords: Vec<Q>) -> NfElem {
        if coords.iter().skip(1).all(|c| c.is_zero()) {
            NfElem::Rational(coords.into_iter().next().unwrap_or_else(Q::zero))
        } else {
            NfElem::Algebraic(k.clone(), coords)
        }
    }

    pub fn from_coords(k: &Arc<NumberField>, coords: Vec<Q>) -> Result<NfElem> {
        if coords.len() != k.degree() {
            return Err(Error::InvalidInput(format!(
                "expected {} coordinates, got {}",
                k.degree(),
                coords.len()
            )));
        }
        Ok(Self::normalize(k, coords))
    }

    /// The class of `x` in `Q[x] / (minpoly)`.
    pub fn generator(k: &Arc<NumberField>) -> NfElem {
        Self::from_poly(k, &Poly::z())
    }

    /// Image of a rational polynomial in the generator.
    pub fn from_poly(k: &Arc<NumberField>, p: &Poly<Q>) -> NfElem {
        Self::normalize(k, k.reduce(p.coeffs().to_vec()))
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        match self {
            NfElem::Rational(_) => None,
            NfElem::Algebraic(k, _) => Some(k),
        }
    }

    /// Coordinates on `1, t, ..., t^{d-1}` in `k`.
    pub fn coords_in(&self, k: &NumberField) -> Vec<Q> {
        match self {
            NfElem::Rational(q) => {
                let mut v = vec![Q::zero(); k.degree()];
                v[0] = q.clone();
                v
            }
            NfElem::Algebraic(_, c) => c.clone(),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, NfElem::Rational(_))
    }

    fn binop(&self, o: &NfElem, f: impl Fn(&[Q], &[Q], &Arc<NumberField>) -> Vec<Q>) -> NfElem {
        let k = match (self, o) {
            (NfElem::Algebraic(a, _), NfElem::Algebraic(b, _)) => {
                assert!(same_field(a, b), "number field mismatch");
                a
            }
            (NfElem::Algebraic(a, _), _) | (_, NfElem::Algebraic(a, _)) => a,
            _ => unreachable!(),
        };
        let x = self.coords_in(k);
        let y = o.coords_in(k);
        Self::normalize(k, f(&x, &y, k))
    }

    /// Ball around the image under the distinguished embedding.
    pub fn embed(&self, width: &Q) -> ComplexBall {
        match self {
            NfElem::Rational(q) => ComplexBall::from_rational(q),
            NfElem::Algebraic(k, _) => self.embed_at(k.index, width),
        }
    }

    /// Ball around the image under embedding `index` of the element's field.
    pub fn embed_at(&self, index: usize, width: &Q) -> ComplexBall {
        let (k, coords) = match self {
            NfElem::Rational(q) => return ComplexBall::from_rational(q),
            NfElem::Algebraic(k, c) => (k, c),
        };
        let bits = ((-log2_abs(width)).max(0.0) as u32) + 64;
        let mut radius = width / Q::from_integer(16.into());
        let mut scale = Q::one();
        for c in coords {
            let a = c.abs() + Q::one();
            if a > scale {
                scale = a;
            }
        }
        radius /= &scale * Q::from_integer((k.degree() * k.degree()).into());
        loop {
            let root = k.root_disc(index, &radius).ball();
            let mut acc = ComplexBall::zero();
            for c in coords.iter().rev() {
                acc = &(&acc * &root) + &ComplexBall::from_rational(c);
                acc = acc.round_out(bits);
            }
            if acc.width() <= *width {
                return acc;
            }
            radius = radius * pow2(-16);
        }
    }

    /// Field norm `N_{K/Q}`.
    pub fn norm(&self) -> Q {
        match self {
            NfElem::Rational(q) => q.clone(),
            NfElem::Algebraic(k, c) => {
                let d = k.degree();
                let mut cols = Vec::with_capacity(d);
                let mut cur = c.clone();
                for _ in 0..d {
                    cols.push(cur.clone());
                    let mut sh = vec![Q::zero()];
                    sh.extend(cur);
                    cur = k.reduce(sh);
                }
                super::det_q(cols)
            }
        }
    }

    pub fn pow(&self, e: u64) -> NfElem {
        super::pow(self, e)
    }

    /// Approximate value under the distinguished embedding.
    pub fn to_complex(&self) -> Complex64 {
        let (re, im) = self.embed(&pow2(-60)).mid_f64();
        Complex64::new(re, im)
    }
}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Zero for NfElem {
    fn zero() -> Self {
        NfElem::Rational(Q::zero())
    }
    fn is_zero(&self) -> bool {
        matches!(self, NfElem::Rational(q) if q.is_zero())
    }
}

impl One for NfElem {
    fn one() -> Self {
        NfElem::Rational(Q::one())
    }
}

impl Add<&NfElem> for &NfElem {
    type Output = NfElem;
    fn add(self, o: &NfElem) -> NfElem {
        if let (NfElem::Rational(a), NfElem::Rational(b)) = (self, o) {
            return NfElem::Rational(a + b);
        }
        self.binop(o, |x, y, _| x.iter().zip(y).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&NfElem> for &NfElem {
    type Output = NfElem;
    fn sub(self, o: &NfElem) -> NfElem {
        if let (NfElem::Rational(a), NfElem::Rational(b)) = (self, o) {
            return NfElem::Rational(a - b);
        }
        self.binop(o, |x, y, _| x.iter().zip(y).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&NfElem> for &NfElem {
    type Output = NfElem;
    fn mul(self, o: &NfElem) -> NfElem {
        match (self, o) {
            (NfElem::Rational(a), NfElem::Rational(b)) => NfElem::Rational(a * b),
            (NfElem::Rational(a), NfElem::Algebraic(k, c)) | (NfElem::Algebraic(k, c), NfElem::Rational(a)) => {
                if a.is_zero() {
                    return NfElem::zero();
                }
                NfElem::Algebraic(k.clone(), c.iter().map(|x| x * a).collect())
            }
            _ => self.binop(o, |x, y, k| {
                let mut v = vec![Q::zero(); x.len() + y.len() - 1];
                for (i, a) in x.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in y.iter().enumerate() {
                        v[i + j] += a * b;
                    }
                }
                k.reduce(v)
            }),
        }
    }
}

impl Neg for &NfElem {
    type Output = NfElem;
    fn neg(self) -> NfElem {
        match self {
            NfElem::Rational(a) => NfElem::Rational(-a),
            NfElem::Algebraic(k, c) => NfElem::Algebraic(k.clone(), c.iter().map(|x| -x).collect()),
        }
    }
}

impl Neg for NfElem {
    type Output = NfElem;
    fn neg(self) -> NfElem {
        -&self
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<NfElem> for NfElem {
            type Output = NfElem;
            fn $m(self, o: NfElem) -> NfElem { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a NfElem> for NfElem {
            type Output = NfElem;
            fn $m(self, o: &'a NfElem) -> NfElem { (&self).$m(o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Ring for NfElem {
    fn from_i64(n: i64) -> Self {
        NfElem::Rational(Q::from_integer(n.into()))
    }
}

impl Field for NfElem {
    fn inv(&self) -> Option<Self> {
        match self {
            NfElem::Rational(q) => {
                if q.is_zero() {
                    None
                } else {
                    Some(NfElem::Rational(q.recip()))
                }
            }
            NfElem::Algebraic(k, c) => {
                let p = Poly::new(c.clone());
                let i = p.inv_mod(&k.minpoly)?;
                Some(Self::normalize(k, k.reduce(i.coeffs().to_vec())))
            }
        }
    }
    fn from_rational(q: &Q) -> Self {
        NfElem::Rational(q.clone())
    }
    fn to_rational(&self) -> Option<Q> {
        match self {
            NfElem::Rational(q) => Some(q.clone()),
            NfElem::Algebraic(..) => None,
        }
    }
}

impl From<Q> for NfElem {
    fn from(q: Q) -> Self {
        NfElem::Rational(q)
    }
}

/// Field automorphism determined by the image of the generator.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldAutomorphism {
    field: Arc<NumberField>,
    image: NfElem,
}

impl FieldAutomorphism {
    pub fn identity(k: &Arc<NumberField>) -> Self {
        FieldAutomorphism { field: k.clone(), image: NfElem::generator(k) }
    }

    /// Checks that `image` is a root of the minimal polynomial.
    pub fn new(k: &Arc<NumberField>, image: NfElem) -> Result<Self> {
        if let Some(f) = image.field() {
            if !same_field(f, k) {
                return Err(Error::AutomorphismFieldMismatch);
            }
        }
        let v = k.minpoly.map(|c| NfElem::Rational(c.clone())).eval(&image);
        if !v.is_zero() {
            return Err(Error::InvalidInput("image is not a root of the minimal polynomial".into()));
        }
        Ok(FieldAutomorphism { field: k.clone(), image })
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn image_of_generator(&self) -> &NfElem {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image == NfElem::generator(&self.field)
    }

    pub fn apply(&self, x: &NfElem) -> Result<NfElem> {
        match x {
            NfElem::Rational(_) => Ok(x.clone()),
            NfElem::Algebraic(k, c) => {
                if !same_field(k, &self.field) {
                    return Err(Error::AutomorphismFieldMismatch);
                }
                let mut acc = NfElem::zero();
                for a in c.iter().rev() {
                    acc = &(&acc * &self.image) + &NfElem::Rational(a.clone());
                }
                Ok(acc)
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FieldAutomorphism) -> Result<FieldAutomorphism> {
        if !same_field(&self.field, &other.field) {
            return Err(Error::AutomorphismFieldMismatch);
        }
        Ok(FieldAutomorphism { field: self.field.clone(), image: self.apply(&other.image)? })
    }

    /// Index `j` of the embedding with `sigma_j = sigma_0 ∘ self`, where
    /// `sigma_0` is the distinguished one.
    pub fn embedding_image(&self) -> usize {
        let z = self.image.to_complex();
        let roots = self.field.approx_roots();
        let mut best = 0;
        for (j, r) in roots.iter().enumerate() {
            if (r - z).norm() < (roots[best] - z).norm() {
                best = j;
            }
        }
        best
    }

    /// All automorphisms of `k`; the identity comes first. Only fields of
    /// degree at most 7 are searched.
    pub fn all(k: &Arc<NumberField>) -> Result<Vec<FieldAutomorphism>> {
        let d = k.degree();
        let mut out = vec![Self::identity(k)];
        if d == 1 {
            return Ok(out);
        }
        if d == 2 {
            let m1 = k.minpoly.coeff(1);
            let img = &NfElem::Rational(-m1) - &NfElem::generator(k);
            out.push(Self::new(k, img)?);
            return Ok(out);
        }
        if d > 7 {
            return Err(Error::FieldTooSmall(format!(
                "automorphism search is limited to degree 7, field has degree {d}"
            )));
        }
        let roots = k.approx_roots();
        let conj: Vec<usize> = roots
            .iter()
            .map(|r| {
                let c = r.conj();
                (0..d).min_by(|&a, &b| (roots[a] - c).norm().partial_cmp(&(roots[b] - c).norm()).unwrap()).unwrap()
            })
            .collect();
        let i0 = k.index;
        for target in 0..d {
            if target == i0 {
                continue;
            }
            let mut perm = vec![usize::MAX; d];
            perm[i0] = target;
            if let Some(a) = search_perm(k, &roots, &conj, &mut perm, 0) {
                out.push(a);
            }
        }
        Ok(out)
    }
}

fn search_perm(
    k: &Arc<NumberField>,
    roots: &[Complex64],
    conj: &[usize],
    perm: &mut Vec<usize>,
    pos: usize,
) -> Option<FieldAutomorphism> {
    let d = roots.len();
    if pos == d {
        // automorphisms commute with complex conjugation
        if (0..d).any(|i| perm[conj[i]] != conj[perm[i]]) {
            return None;
        }
        return solve_perm(k, roots, perm);
    }
    if perm[pos] != usize::MAX {
        return search_perm(k, roots, conj, perm, pos + 1);
    }
    for t in 0..d {
        if perm.contains(&t) {
            continue;
        }
        perm[pos] = t;
        if let Some(a) = search_perm(k, roots, conj, perm, pos + 1) {
            return Some(a);
        }
        perm[pos] = usize::MAX;
    }
    None
}

/// Interpolates `g` with `g(root_i) = root_perm(i)` and verifies it exactly.
fn solve_perm(k: &Arc<NumberField>, roots: &[Complex64], perm: &[usize]) -> Option<FieldAutomorphism> {
    let d = roots.len();
    let mut m: Vec<Vec<Complex64>> = (0..d)
        .map(|i| {
            let mut row: Vec<Complex64> = (0..d).map(|j| roots[i].powu(j as u32)).collect();
            row.push(roots[perm[i]]);
            row
        })
        .collect();
    for col in 0..d {
        let piv = (col..d).max_by(|&a, &b| m[a][col].norm().partial_cmp(&m[b][col].norm()).unwrap())?;
        if m[piv][col].norm() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..d {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..=d {
                    let v = m[col][c];
                    m[r][c] -= f * v;
                }
            }
        }
    }
    let mut coeffs = Vec::with_capacity(d);
    for i in 0..d {
        let x = m[i][d] / m[i][i];
        if x.im.abs() > 1e-6 * (1.0 + x.re.abs()) {
            return None;
        }
        coeffs.push(rational_reconstruct(x.re)?);
    }
    let img = NfElem::from_poly(k, &Poly::new(coeffs));
    FieldAutomorphism::new(k, img).ok()
}

/// Continued-fraction reconstruction with denominators up to `10^6`.
fn rational_reconstruct(x: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > 1_000_000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= 1e-9 * x.abs().max(1.0) {
            return Some(Q::new(h1.into(), k1.into()));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    if (x - x.round()).abs() < 1e-9 {
        return Some(from_f64(x.round()));
    }
    None
}

/// `tau(x)`; errors when `tau` belongs to another field.
pub fn conjugate_element(x: &NfElem, tau: &FieldAutomorphism) -> Result<NfElem> {
    tau.apply(x)
}
