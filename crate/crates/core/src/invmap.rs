//! Fundamental invariants evaluated on loop elements, their bigraded
//! components, and the Kostant slice.
//!
//! Classical types use the standard representation: `p_k` is defined by
//! `det(lambda - M) = lambda^N + sum (-1)^k p_k lambda^(N-k)`, and type D adds the
//! Pfaffian of `J M`. Exceptional types use traces of powers of the adjoint
//! representation and are experimental.

use crate::exact::{fmt_rat, rat, rint, LaurentScalar, Rat, Scalar};
use crate::linalg::Matrix;
use crate::mpfilt::{ApartmentPoint, TwistedLoopDatum};
use crate::rootdata::{invariant_degrees, principal_sl2, CartanType, LieElement, RootDatum};
use crate::vinberg::{f_embed, GradedElement, LoopElement};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::json;
use std::collections::BTreeMap;

/// Square matrix over Laurent polynomials in `t^(1/n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LMatrix {
    pub size: usize,
    pub n: u32,
    data: Vec<LaurentScalar>,
}

impl LMatrix {
    pub fn zeros(size: usize, n: u32) -> Self {
        LMatrix { size, n, data: vec![LaurentScalar::zero(n); size * size] }
    }

    pub fn identity(size: usize, n: u32) -> Self {
        let mut m = Self::zeros(size, n);
        for i in 0..size {
            m.data[i * size + i] = LaurentScalar::constant(n, Scalar::one());
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentScalar {
        &self.data[i * self.size + j]
    }

    /// Adds `t^level * c * m`.
    pub fn add_scaled(&mut self, m: &Matrix, level: &Rat, c: &Scalar) -> Result<()> {
        for i in 0..self.size {
            for j in 0..self.size {
                let v = m.get(i, j);
                if v.is_zero() {
                    continue;
                }
                let term = LaurentScalar::monomial(self.n, level.clone(), v * c)?;
                let k = i * self.size + j;
                self.data[k] = &self.data[k] + &term;
            }
        }
        Ok(())
    }

    pub fn mul(&self, o: &LMatrix) -> LMatrix {
        let s = self.size;
        let mut out = LMatrix::zeros(s, self.n);
        for i in 0..s {
            for k in 0..s {
                let a = &self.data[i * s + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..s {
                    let b = &o.data[k * s + j];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * s + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> LaurentScalar {
        let mut t = LaurentScalar::zero(self.n);
        for i in 0..self.size {
            t = &t + self.get(i, i);
        }
        t
    }

    fn add_identity_scaled(&mut self, c: &LaurentScalar) {
        for i in 0..self.size {
            let k = i * self.size + i;
            self.data[k] = &self.data[k] + c;
        }
    }

    /// Coefficients `c_1..c_N` of `det(lambda - M) = lambda^N + sum c_k lambda^(N-k)`
    /// by the Faddeev-LeVerrier recursion.
    pub fn char_poly(&self) -> Vec<LaurentScalar> {
        let s = self.size;
        let mut out = Vec::with_capacity(s);
        let mut mk = LMatrix::identity(s, self.n);
        for k in 1..=s {
            let am = self.mul(&mk);
            let c = am.trace().scale(&Scalar::from_rat(rat(-1, k as i64)));
            out.push(c.clone());
            mk = am;
            mk.add_identity_scaled(&c);
        }
        out
    }

    /// Pfaffian of an antisymmetric matrix of even size.
    pub fn pfaffian(&self) -> LaurentScalar {
        let idx: Vec<usize> = (0..self.size).collect();
        self.pf_rec(&idx)
    }

    fn pf_rec(&self, idx: &[usize]) -> LaurentScalar {
        if idx.is_empty() {
            return LaurentScalar::constant(self.n, Scalar::one());
        }
        let mut total = LaurentScalar::zero(self.n);
        let first = idx[0];
        for (p, &j) in idx.iter().enumerate().skip(1) {
            let a = self.get(first, j);
            if a.is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx[1..].iter().copied().filter(|&k| k != j).collect();
            let term = a * &self.pf_rec(&rest);
            total = if p % 2 == 1 { &total + &term } else { &total - &term };
        }
        total
    }
}

/// Standard matrix representation of a classical Lie algebra on the Chevalley basis.
#[derive(Clone, Debug)]
pub struct StandardRep {
    pub size: usize,
    pub images: Vec<Matrix>,
    /// Form with `J M` antisymmetric for orthogonal types.
    pub form: Option<Matrix>,
}

fn emat(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m.set(i, j, Scalar::one());
    m
}

fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    a.mul(b).sub(&b.mul(a))
}

pub fn standard_rep(d: &RootDatum) -> Result<StandardRep> {
    let l = d.rank;
    let (size, simple): (usize, Vec<Matrix>) = match d.cartan_type {
        CartanType::A => (l + 1, (0..l).map(|i| emat(l + 1, i, i + 1)).collect()),
        CartanType::B => {
            let n = 2 * l + 1;
            let p = |i: usize| n - 1 - i;
            (n, (0..l).map(|i| emat(n, i, i + 1).sub(&emat(n, p(i + 1), p(i)))).collect())
        }
        CartanType::C => {
            let n = 2 * l;
            let p = |i: usize| n - 1 - i;
            let mut s: Vec<Matrix> = (0..l - 1).map(|i| emat(n, i, i + 1).sub(&emat(n, p(i + 1), p(i)))).collect();
            s.push(emat(n, l - 1, l));
            (n, s)
        }
        CartanType::D => {
            let n = 2 * l;
            let p = |i: usize| n - 1 - i;
            let mut s: Vec<Matrix> = (0..l - 1).map(|i| emat(n, i, i + 1).sub(&emat(n, p(i + 1), p(i)))).collect();
            s.push(emat(n, l - 2, l).sub(&emat(n, l - 1, l + 1)));
            (n, s)
        }
        t => return Err(Error::UnsupportedTypeForInvariants(format!("no standard representation for type {t}"))),
    };
    let mut images: Vec<Option<Matrix>> = vec![None; d.dim()];
    for (i, e) in simple.iter().enumerate() {
        // Rescale e^T so that [[e, f], e] = 2e.
        let et = e.transpose();
        let h = commutator(e, &et);
        let he = commutator(&h, e);
        let (r, c) = first_nonzero(e);
        let lam = he.get(r, c).try_div(e.get(r, c))?;
        let f = et.scale(&Scalar::int(2).try_div(&lam)?);
        let hi = commutator(e, &f);
        images[d.simple_index(i)] = Some(e.clone());
        images[d.neg_index(d.simple_index(i))] = Some(f);
        images[d.h_index(i)] = Some(hi);
    }
    let npos = d.num_positive();
    let mut order: Vec<usize> = (0..npos).collect();
    order.sort_by_key(|&a| d.height(a));
    for &g in &order {
        if images[g].is_some() {
            continue;
        }
        let root = &d.roots[g];
        let (i, b) = (0..l)
            .find_map(|i| {
                let mut beta = root.clone();
                beta[i] -= 1;
                d.root_index(&beta).filter(|&b| d.is_positive(b) && images[b].is_some()).map(|b| (i, b))
            })
            .expect("every non-simple positive root splits off a simple root");
        let si = d.simple_index(i);
        let nab = d.chevalley_constants[&(si, b)];
        let m = commutator(images[si].as_ref().unwrap(), images[b].as_ref().unwrap()).scale(&Scalar::from_rat(rat(1, nab)));
        images[g] = Some(m);
        let (nsi, nb, ng) = (d.neg_index(si), d.neg_index(b), d.neg_index(g));
        let nn = d.chevalley_constants[&(nsi, nb)];
        let m = commutator(images[nsi].as_ref().unwrap(), images[nb].as_ref().unwrap()).scale(&Scalar::from_rat(rat(1, nn)));
        images[ng] = Some(m);
    }
    let form = match d.cartan_type {
        CartanType::B | CartanType::D => {
            let mut j = Matrix::zeros(size, size);
            for i in 0..size {
                j.set(i, size - 1 - i, Scalar::one());
            }
            Some(j)
        }
        _ => None,
    };
    Ok(StandardRep { size, images: images.into_iter().map(|m| m.expect("all basis images built")).collect(), form })
}

fn first_nonzero(m: &Matrix) -> (usize, usize) {
    for i in 0..m.rows {
        for j in 0..m.cols {
            if !m.get(i, j).is_zero() {
                return (i, j);
            }
        }
    }
    panic!("zero generator")
}

#[derive(Clone, Debug)]
enum Realization {
    Standard(StandardRep),
    Adjoint,
}

/// Fundamental invariants of `h`, in evaluator order.
#[derive(Clone, Debug)]
pub struct InvariantSystem {
    pub degrees: Vec<usize>,
    pub experimental: bool,
    real: Realization,
}

impl InvariantSystem {
    pub fn new(d: &RootDatum) -> Result<Self> {
        let l = d.rank;
        match d.cartan_type {
            CartanType::A => Ok(Self::standard(d, (2..=l + 1).collect())?),
            CartanType::B | CartanType::C => Ok(Self::standard(d, (1..=l).map(|k| 2 * k).collect())?),
            CartanType::D => {
                let mut deg: Vec<usize> = (1..l).map(|k| 2 * k).collect();
                deg.push(l);
                Ok(Self::standard(d, deg)?)
            }
            CartanType::E if l != 6 => Err(Error::UnsupportedTypeForInvariants(format!("E{l}"))),
            t => Ok(InvariantSystem { degrees: invariant_degrees(t, l), experimental: true, real: Realization::Adjoint }),
        }
    }

    fn standard(d: &RootDatum, degrees: Vec<usize>) -> Result<Self> {
        Ok(InvariantSystem { degrees, experimental: false, real: Realization::Standard(standard_rep(d)?) })
    }

    pub fn rep(&self) -> Option<&StandardRep> {
        match &self.real {
            Realization::Standard(r) => Some(r),
            Realization::Adjoint => None,
        }
    }

    /// Matrix realization of `sum_l t^l v_l`.
    pub fn realize(&self, d: &RootDatum, n: u32, v: &LoopElement) -> Result<LMatrix> {
        let size = match &self.real {
            Realization::Standard(r) => r.size,
            Realization::Adjoint => d.dim(),
        };
        let mut m = LMatrix::zeros(size, n);
        for (level, x) in &v.terms {
            match &self.real {
                Realization::Standard(r) => {
                    for (i, c) in x.iter() {
                        m.add_scaled(&r.images[*i], level, c)?;
                    }
                }
                Realization::Adjoint => m.add_scaled(&d.ad_matrix(x), level, &Scalar::one())?,
            }
        }
        Ok(m)
    }

    pub fn evaluate_matrix(&self, m: &LMatrix) -> Vec<LaurentScalar> {
        match &self.real {
            Realization::Standard(rep) => {
                let cp = m.char_poly();
                let p = |k: usize| if k % 2 == 0 { cp[k - 1].clone() } else { -&cp[k - 1] };
                let mut out: Vec<LaurentScalar> = vec![];
                let pf_slot = rep.form.is_some() && rep.size % 2 == 0;
                for (slot, &k) in self.degrees.iter().enumerate() {
                    if pf_slot && slot == self.degrees.len() - 1 {
                        let mut j = LMatrix::zeros(rep.size, m.n);
                        j.add_scaled(rep.form.as_ref().unwrap(), &Rat::zero(), &Scalar::one()).expect("exponent 0");
                        out.push(j.mul(m).pfaffian());
                    } else {
                        out.push(p(k));
                    }
                }
                out
            }
            Realization::Adjoint => {
                let max = *self.degrees.iter().max().unwrap();
                let mut pw = m.clone();
                let mut traces = vec![pw.trace()];
                for _ in 1..max {
                    pw = pw.mul(m);
                    traces.push(pw.trace());
                }
                self.degrees.iter().map(|&k| traces[k - 1].clone()).collect()
            }
        }
    }

    pub fn evaluate(&self, d: &RootDatum, n: u32, v: &LoopElement) -> Result<Vec<LaurentScalar>> {
        Ok(self.evaluate_matrix(&self.realize(d, n, v)?))
    }

    /// Invariants of an element of `h` with scalar coefficients.
    pub fn evaluate_lie(&self, d: &RootDatum, v: &LieElement) -> Result<Vec<Scalar>> {
        let lv = LoopElement::monomial(Rat::zero(), v.clone());
        Ok(self.evaluate(d, 1, &lv)?.iter().map(|c| c.coeff(&Rat::zero())).collect())
    }
}

/// Point of `sum C_i((t))^j`: keyed by (invariant slot, exponent).
#[derive(Clone, Debug, PartialEq)]
pub struct BigradedPoint {
    pub degrees: Vec<usize>,
    pub entries: BTreeMap<(usize, Rat), Scalar>,
}

impl BigradedPoint {
    pub fn from_values(degrees: &[usize], values: &[LaurentScalar]) -> Self {
        let mut entries = BTreeMap::new();
        for (slot, v) in values.iter().enumerate() {
            for (j, c) in v.terms() {
                entries.insert((slot, j.clone()), c.clone());
            }
        }
        BigradedPoint { degrees: degrees.to_vec(), entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, slot: usize, j: &Rat) -> Scalar {
        self.entries.get(&(slot, j.clone())).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Entries with `j = r * degree`.
    pub fn diagonal(&self, r: &Rat) -> BigradedPoint {
        let entries = self
            .entries
            .iter()
            .filter(|((s, j), _)| *j == r * Rat::from_integer(BigInt::from(self.degrees[*s])))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        BigradedPoint { degrees: self.degrees.clone(), entries }
    }

    /// Sum of the entries of each slot (t = 1).
    pub fn at_one(&self) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.degrees.len()];
        for ((s, _), c) in &self.entries {
            out[*s] = &out[*s] + c;
        }
        out
    }

    /// Key "i,j" with `i` the degree; repeated degrees get a suffix ".m".
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for ((s, j), c) in &self.entries {
            map.insert(format!("{},{}", self.slot_name(*s), fmt_rat(j)), json!(c.to_string()));
        }
        serde_json::Value::Object(map)
    }

    fn slot_name(&self, s: usize) -> String {
        let deg = self.degrees[s];
        let rank = self.degrees[..s].iter().filter(|&&d| d == deg).count();
        if rank == 0 {
            deg.to_string()
        } else {
            format!("{deg}.{rank}")
        }
    }
}

pub fn q_full(d: &TwistedLoopDatum, inv: &InvariantSystem, v: &LoopElement) -> Result<BigradedPoint> {
    let vals = inv.evaluate(&d.datum, d.n, v)?;
    Ok(BigradedPoint::from_values(&inv.degrees, &vals))
}

/// Verifies `j >= r * i` for every entry of `q(v)`, with `v` in `k_{x,r}`.
pub fn check_depth_bound(
    d: &TwistedLoopDatum,
    inv: &InvariantSystem,
    x: &ApartmentPoint,
    r: &Rat,
    v: &LoopElement,
) -> Result<bool> {
    if !v.is_twisted_fixed(d) {
        return Err(Error::SupportViolation("element is not in the twisted loop algebra".into()));
    }
    if let Some(depth) = v.depth(d, x) {
        if depth < *r {
            return Err(Error::SupportViolation(format!("element has depth {} < {}", fmt_rat(&depth), fmt_rat(r))));
        }
    }
    let q = q_full(d, inv, v)?;
    Ok(q.entries.keys().all(|(s, j)| *j >= r * Rat::from_integer(BigInt::from(inv.degrees[*s]))))
}

/// The `j = r i` part of `q(f_embed(z))`.
pub fn q_xr(d: &TwistedLoopDatum, inv: &InvariantSystem, z: &GradedElement) -> Result<BigradedPoint> {
    Ok(q_full(d, inv, &f_embed(z))?.diagonal(&z.r()))
}

/// Whether some invariant degree `e` has `e r` in `(1/n)Z`.
pub fn exponent_gate(d: &TwistedLoopDatum, r: &Rat) -> bool {
    let n = Rat::from_integer(BigInt::from(d.n));
    invariant_degrees(d.datum.cartan_type, d.datum.rank)
        .iter()
        .any(|&e| (r * Rat::from_integer(BigInt::from(e)) * &n).is_integer())
}

/// Principal nilpotent `e` plus a basis of the centralizer of `f`, ordered by
/// `ad h`-eigenvalue (so by degree).
#[derive(Clone, Debug)]
pub struct KostantSlice {
    pub e: LieElement,
    pub f: LieElement,
    pub basis: Vec<LieElement>,
}

pub fn kostant_slice(d: &RootDatum) -> KostantSlice {
    let (e, h, f) = principal_sl2(d);
    let ker = d.ad_matrix(&f).kernel();
    let mut basis: Vec<(Rat, LieElement)> = ker
        .iter()
        .map(|v| {
            let b = LieElement::from_dense(v);
            // ad h acts on the centralizer of f by even non-positive integers.
            let hb = d.bracket(&h, &b);
            let (i, c) = b.iter().next().map(|(i, c)| (*i, c.clone())).expect("nonzero kernel vector");
            let ev = hb.get(i).try_div(&c).expect("nonzero").as_rat().expect("rational eigenvalue");
            (ev, b)
        })
        .collect();
    // Kernel vectors are homogeneous: ad f lowers the height by one.
    basis.sort_by(|a, b| b.0.cmp(&a.0));
    KostantSlice { e, f, basis: basis.into_iter().map(|(_, b)| b).collect() }
}

impl KostantSlice {
    pub fn point(&self, c: &[Scalar]) -> LieElement {
        let mut v = self.e.clone();
        for (b, x) in self.basis.iter().zip(c) {
            v = v.add(&b.scale(x));
        }
        v
    }
}

/// `e + sum c_k b_k` and its invariants.
pub fn kostant_slice_eval(d: &RootDatum, inv: &InvariantSystem, c: &[Scalar]) -> Result<(LieElement, Vec<Scalar>)> {
    let ks = kostant_slice(d);
    if c.len() != ks.basis.len() {
        return Err(Error::ConfigParse(format!("slice needs {} coordinates, got {}", ks.basis.len(), c.len())));
    }
    let v = ks.point(c);
    let q = inv.evaluate_lie(d, &v)?;
    Ok((v, q))
}

/// Exact Jacobian of `c -> invariants(e + sum c_k b_k)` at `c`, rows by
/// invariant, computed with `t` as a first-order infinitesimal.
pub fn kostant_jacobian(d: &RootDatum, inv: &InvariantSystem, c: &[Scalar]) -> Result<Matrix> {
    let ks = kostant_slice(d);
    let base = ks.point(c);
    let k = ks.basis.len();
    let mut jac = Matrix::zeros(inv.degrees.len(), k);
    for (col, b) in ks.basis.iter().enumerate() {
        let v = LoopElement::monomial(Rat::zero(), base.clone()).add(&LoopElement::monomial(rint(1), b.clone()));
        let vals = inv.evaluate(d, 1, &v)?;
        for (row, val) in vals.iter().enumerate() {
            jac.set(row, col, val.coeff(&Rat::one()));
        }
    }
    Ok(jac)
}
