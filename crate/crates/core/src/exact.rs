//! Rationals, elements of Q(zeta_n) and Laurent polynomials in t^(1/n).
//!
//! A [`Scalar`] is a residue modulo the n-th cyclotomic polynomial. Values
//! whose residue is constant are rational and combine with any conductor.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::ConfigParse(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Floor of a rational as an integer.
pub fn floor_int(r: &Rat) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Fractional part in [0, 1).
pub fn frac(r: &Rat) -> Rat {
    r - Rat::from_integer(floor_int(r))
}

pub fn euler_phi(n: u32) -> usize {
    let mut m = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out as usize
}

// Dense polynomials over Q, low degree first.
type QPoly = Vec<Rat>;

fn qp_trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn qp_mul(a: &[Rat], b: &[Rat]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// (quotient, remainder) for a nonzero divisor.
fn qp_divrem(a: &[Rat], b: &[Rat]) -> (QPoly, QPoly) {
    let mut r: QPoly = a.to_vec();
    qp_trim(&mut r);
    let mut b = b.to_vec();
    qp_trim(&mut b);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![Rat::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = &r[r.len() - 1] / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        q[k] = c;
        qp_trim(&mut r);
    }
    (q, r)
}

fn cyclo_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<Rat>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Rat>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of the n-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<Rat>> {
    assert!(n > 0, "conductor must be positive");
    if let Some(p) = cyclo_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut num: QPoly = vec![Rat::zero(); n as usize + 1];
    num[0] = -Rat::one();
    num[n as usize] = Rat::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            num = qp_divrem(&num, &phi_d).0;
        }
    }
    let p = Arc::new(num);
    cyclo_cache().lock().unwrap().insert(n, p.clone());
    p
}

/// An element of Q(zeta_n) as its canonical residue modulo Phi_n.
#[derive(Clone, Debug)]
pub struct Scalar {
    n: u32,
    coeffs: Vec<Rat>,
}

impl Scalar {
    pub fn from_rat(r: Rat) -> Self {
        Scalar { n: 1, coeffs: vec![r] }
    }

    pub fn int(k: i64) -> Self {
        Self::from_rat(rint(k))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    /// Builds the residue of `sum c_k z^k` modulo Phi_n.
    pub fn from_poly(n: u32, poly: &[Rat]) -> Self {
        let phi = euler_phi(n);
        let mut coeffs = if poly.len() > phi {
            qp_divrem(poly, &cyclotomic_poly(n)).1
        } else {
            poly.to_vec()
        };
        coeffs.resize(phi, Rat::zero());
        Scalar { n, coeffs }
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rat(&self) -> Option<Rat> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.is_rational() && self.coeffs[0].is_one()
    }

    fn common_conductor(&self, other: &Scalar) -> Result<u32> {
        if self.n == other.n || other.is_rational() {
            Ok(self.n)
        } else if self.is_rational() {
            Ok(other.n)
        } else {
            Err(Error::ConductorMismatch(self.n, other.n))
        }
    }

    fn lift(&self, n: u32) -> Vec<Rat> {
        if self.n == n {
            self.coeffs.clone()
        } else {
            let mut v = vec![Rat::zero(); euler_phi(n)];
            v[0] = self.coeffs[0].clone();
            v
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        let n = self.common_conductor(other)?;
        if self.is_rational() && other.is_rational() {
            return Ok(Scalar::from_rat(&self.coeffs[0] + &other.coeffs[0]).with_conductor(n));
        }
        let mut a = self.lift(n);
        for (x, y) in a.iter_mut().zip(other.lift(n)) {
            *x += y;
        }
        Ok(Scalar { n, coeffs: a })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        let n = self.common_conductor(other)?;
        if other.is_rational() {
            let c = &other.coeffs[0];
            let mut out = self.lift(n);
            for x in out.iter_mut() {
                *x *= c;
            }
            return Ok(Scalar { n, coeffs: out });
        }
        if self.is_rational() {
            return other.try_mul(self);
        }
        Ok(Scalar::from_poly(n, &qp_mul(&self.coeffs, &other.coeffs)))
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_rational() {
            return Ok(Scalar::from_rat(self.coeffs[0].recip()).with_conductor(self.n));
        }
        // Extended Euclid: find u with u*a = 1 mod Phi_n.
        let phi = cyclotomic_poly(self.n);
        let mut a: QPoly = self.coeffs.clone();
        qp_trim(&mut a);
        let (mut r0, mut r1) = (phi.to_vec(), a);
        let (mut s0, mut s1): (QPoly, QPoly) = (vec![], vec![Rat::one()]);
        while !(r1.len() == 1) {
            let (q, r) = qp_divrem(&r0, &r1);
            let mut s2 = s0.clone();
            let qs = qp_mul(&q, &s1);
            if s2.len() < qs.len() {
                s2.resize(qs.len(), Rat::zero());
            }
            for (x, y) in s2.iter_mut().zip(qs) {
                *x -= y;
            }
            qp_trim(&mut s2);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            if r1.is_empty() {
                // gcd is not a unit; impossible for nonzero a since Phi_n is irreducible.
                return Err(Error::DivisionByZero);
            }
        }
        let c = r1[0].recip();
        let u: QPoly = s1.into_iter().map(|x| x * &c).collect();
        Ok(Scalar::from_poly(self.n, &u))
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar> {
        self.try_mul(&other.inv()?)
    }

    /// Re-tags a rational value with a conductor (no-op for non-rationals).
    pub fn with_conductor(self, n: u32) -> Scalar {
        if self.n == n || !self.is_rational() {
            return self;
        }
        let mut coeffs = vec![Rat::zero(); euler_phi(n)];
        coeffs[0] = self.coeffs[0].clone();
        Scalar { n, coeffs }
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut out = Scalar::one().with_conductor(self.n);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Scalar {
        Scalar { n: self.n, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }
}

/// zeta_n^k.
pub fn embed_root_of_unity(k: i64, n: u32) -> Scalar {
    let e = k.rem_euclid(n as i64) as usize;
    let mut poly = vec![Rat::zero(); e + 1];
    poly[e] = Rat::one();
    Scalar::from_poly(n, &poly)
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        if self.n == other.n {
            self.coeffs == other.coeffs
        } else {
            self.is_rational() && other.is_rational() && self.coeffs[0] == other.coeffs[0]
        }
    }
}
impl Eq for Scalar {}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Self {
        Scalar::from_rat(r)
    }
}

impl From<i64> for Scalar {
    fn from(k: i64) -> Self {
        Scalar::int(k)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { n: self.n, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

// Operator forms panic on a conductor mismatch; a computation fixes one n.
macro_rules! scalar_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                self.$f(o).expect("conductor mismatch")
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                self.$f(&o).expect("conductor mismatch")
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                self.$f(o).expect("conductor mismatch")
            }
        }
    };
}
scalar_binop!(Add, add, try_add);
scalar_binop!(Sub, sub, try_sub);
scalar_binop!(Mul, mul, try_mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        if self.n == o.n {
            for (x, y) in self.coeffs.iter_mut().zip(&o.coeffs) {
                *x += y;
            }
        } else {
            *self = &*self + o;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        if self.n == o.n {
            for (x, y) in self.coeffs.iter_mut().zip(&o.coeffs) {
                *x -= y;
            }
        } else {
            *self = &*self - o;
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", fmt_rat(&self.coeffs[0]));
        }
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if s.is_empty() {
                if c.is_negative() {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            let mono = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            if k == 0 {
                s.push_str(&fmt_rat(&mag));
            } else if mag.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{}*{}", fmt_rat(&mag), mono));
            }
        }
        write!(f, "({})[z^{}=1]", s, self.n)
    }
}

/// A finitely supported Laurent polynomial in t^(1/n) over Q(zeta).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentScalar {
    n: u32,
    terms: BTreeMap<Rat, Scalar>,
}

impl LaurentScalar {
    pub fn zero(n: u32) -> Self {
        LaurentScalar { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: u32, c: Scalar) -> Self {
        Self::monomial(n, Rat::zero(), c).expect("exponent 0 is always admissible")
    }

    pub fn monomial(n: u32, exp: Rat, c: Scalar) -> Result<Self> {
        if !(BigInt::from(n) % exp.denom()).is_zero() {
            return Err(Error::BadExponent(fmt_rat(&exp), n));
        }
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Ok(LaurentScalar { n, terms })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Rat, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &Rat) -> Scalar {
        self.terms.get(exp).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn min_exponent(&self) -> Option<&Rat> {
        self.terms.keys().next()
    }

    fn add_term(&mut self, exp: Rat, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn try_add(&self, o: &LaurentScalar) -> Result<LaurentScalar> {
        if self.n != o.n {
            return Err(Error::ConductorMismatch(self.n, o.n));
        }
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, o: &LaurentScalar) -> Result<LaurentScalar> {
        if self.n != o.n {
            return Err(Error::ConductorMismatch(self.n, o.n));
        }
        let mut out = LaurentScalar::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> LaurentScalar {
        let mut out = LaurentScalar::zero(self.n);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), &(x * c));
        }
        out
    }

    /// Value at t = 1.
    pub fn at_one(&self) -> Scalar {
        let mut s = Scalar::zero();
        for c in self.terms.values() {
            s += c;
        }
        s
    }
}

impl Add for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, o: &LaurentScalar) -> LaurentScalar {
        self.try_add(o).expect("conductor mismatch")
    }
}

impl Sub for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, o: &LaurentScalar) -> LaurentScalar {
        self.try_add(&-o).expect("conductor mismatch")
    }
}

impl Mul for &LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, o: &LaurentScalar) -> LaurentScalar {
        self.try_mul(o).expect("conductor mismatch")
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        LaurentScalar { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(e, c)| format!("{}*t^({})", c, fmt_rat(e))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_small() {
        let p = cyclotomic_poly(6);
        assert_eq!(*p, vec![rint(1), rint(-1), rint(1)]);
        assert_eq!(cyclotomic_poly(5).len(), 5);
        assert_eq!(euler_phi(12), 4);
    }

    #[test]
    fn roots_of_unity() {
        let z4 = embed_root_of_unity(1, 4);
        assert_eq!(&z4 * &z4, Scalar::int(-1));
        let z3 = embed_root_of_unity(1, 3);
        assert_eq!(&z3 + &embed_root_of_unity(2, 3), Scalar::int(-1));
        assert_eq!(embed_root_of_unity(0, 3), Scalar::one());
        assert_eq!(embed_root_of_unity(3, 3), Scalar::one());
        assert_eq!(embed_root_of_unity(2, 4), Scalar::int(-1));
        assert_eq!(embed_root_of_unity(-1, 3), embed_root_of_unity(2, 3));
    }

    #[test]
    fn mismatch_and_zero_division() {
        let a = embed_root_of_unity(1, 3);
        let b = embed_root_of_unity(1, 5);
        assert_eq!(a.try_add(&b), Err(Error::ConductorMismatch(3, 5)));
        assert!(a.try_add(&Scalar::int(2)).is_ok());
        assert_eq!(a.try_div(&Scalar::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn rendering() {
        assert_eq!(fmt_rat(&rat(-3, 6)), "-1/2");
        assert_eq!(Scalar::from(rat(2, 3)).to_string(), "2/3");
        let z = embed_root_of_unity(1, 5);
        assert_eq!((&Scalar::int(1) + &z).to_string(), "(1 + z)[z^5=1]");
        let l = LaurentScalar::monomial(2, rat(1, 2), Scalar::int(-1)).unwrap();
        assert_eq!(l.to_string(), "-1*t^(1/2)");
    }

    #[test]
    fn laurent_basics() {
        let h = LaurentScalar::monomial(2, rat(1, 2), Scalar::one()).unwrap();
        let t = LaurentScalar::monomial(2, rint(1), Scalar::one()).unwrap();
        assert_eq!(&h * &h, t);
        let one = LaurentScalar::constant(1, Scalar::one());
        let t1 = LaurentScalar::monomial(1, rint(1), Scalar::one()).unwrap();
        let m1 = LaurentScalar::constant(1, Scalar::int(-1));
        assert_eq!(&(&one + &t1) + &m1, t1);
        assert!(LaurentScalar::monomial(2, rat(1, 3), Scalar::one()).is_err());
        assert!(h.try_add(&t1).is_err());
    }
}
