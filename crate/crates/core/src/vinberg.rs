//! The Q/Z-grading of `h` attached to an apartment point, graded elements and
//! their lifts to the loop algebra, and exact Jordan/Cartan computations.

use crate::exact::{fmt_rat, parse_rat, rint, Rat, Scalar};
use crate::linalg::{span_contains, zero_vec, Matrix, Poly, Vector};
use crate::mpfilt::{
    affine_root_spaces, mp_quotient, residues, ApartmentPoint, LeviSubdatum, MPQuotient, TwistedLoopDatum, Window,
};
use crate::rootdata::LieElement;
use crate::sample::Sampler;
use crate::{Error, Result};
use std::collections::BTreeMap;
use num_traits::Zero;
use std::sync::Arc;

/// Seed of the candidate sequence used by `cartan_subspace`.
pub const CARTAN_SEED: u64 = 0x5eed_ca27;

#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    pub d: Arc<TwistedLoopDatum>,
    pub x: ApartmentPoint,
    pub components: BTreeMap<Rat, Arc<MPQuotient>>,
}

pub fn build_grading(d: Arc<TwistedLoopDatum>, x: &ApartmentPoint) -> GradedAlgebra {
    let components = residues(&d, x).into_iter().map(|j| (j.clone(), Arc::new(mp_quotient(&d, x, &j)))).collect();
    GradedAlgebra { d, x: x.clone(), components }
}

impl GradedAlgebra {
    pub fn dim(&self) -> usize {
        self.d.dim()
    }

    /// `k_{x,r}/k_{x,r+}` for any rational `r`.
    pub fn quotient(&self, r: &Rat) -> Arc<MPQuotient> {
        match self.components.get(r) {
            Some(q) => q.clone(),
            None => Arc::new(mp_quotient(&self.d, &self.x, r)),
        }
    }

    pub fn component_dims(&self) -> BTreeMap<Rat, usize> {
        self.components.iter().map(|(j, q)| (j.clone(), q.total_dim)).collect()
    }

    pub fn zero(&self, r: &Rat) -> GradedElement {
        let q = self.quotient(r);
        GradedElement { coords: zero_vec(q.total_dim), quotient: q }
    }

    /// The graded element with `h`-vector `v`, if `v` lies in `h_r`.
    pub fn element_from_lie(&self, r: &Rat, v: &LieElement) -> Option<GradedElement> {
        let q = self.quotient(r);
        coords_in(&q, v, self.dim()).map(|coords| GradedElement { coords, quotient: q })
    }

    pub fn element(&self, r: &Rat, coords: Vector) -> GradedElement {
        let q = self.quotient(r);
        assert_eq!(coords.len(), q.total_dim, "coordinate count");
        GradedElement { coords, quotient: q }
    }

    /// Parses `[(alpha, level, basis index, coefficient)]` entries.
    pub fn element_from_literal(&self, r: &Rat, terms: &[(Vec<i64>, Rat, usize, Scalar)]) -> Result<GradedElement> {
        let q = self.quotient(r);
        let pos = q.positions();
        let mut coords = zero_vec(q.total_dim);
        for (alpha, level, idx, c) in terms {
            let s = q.space_index(alpha, level).ok_or_else(|| {
                Error::SupportViolation(format!("({alpha:?}, {}) is not a space of the quotient at r = {}", fmt_rat(level), fmt_rat(r)))
            })?;
            let p = pos.iter().position(|&(a, b)| a == s && b == *idx).ok_or_else(|| {
                Error::SupportViolation(format!("basis index {idx} out of range for ({alpha:?}, {})", fmt_rat(level)))
            })?;
            coords[p] = coords[p].try_add(c)?;
        }
        Ok(GradedElement { coords, quotient: q })
    }

    pub fn bracket(&self, a: &GradedElement, b: &GradedElement) -> GradedElement {
        let r = a.r() + b.r();
        let v = self.d.datum.bracket(&a.to_lie(), &b.to_lie());
        self.element_from_lie(&r, &v).expect("graded bracket leaves its component")
    }

    /// Matrix of `ad z: h_j -> h_{j+r}` in the stored bases.
    pub fn ad_matrix(&self, z: &GradedElement, target_j: &Rat) -> Matrix {
        let dim = self.dim();
        let src = self.quotient(target_j);
        let dst = self.quotient(&(target_j + z.r()));
        let zl = z.to_lie();
        let cols: Vec<Vector> = src
            .basis()
            .iter()
            .map(|b| coords_in(&dst, &self.d.datum.bracket(&zl, b), dim).expect("graded bracket leaves its component"))
            .collect();
        let mut m = Matrix::zeros(dst.total_dim, src.total_dim);
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    /// `ad z` on all of `h` in the Chevalley basis.
    pub fn full_ad(&self, z: &GradedElement) -> Matrix {
        self.d.datum.ad_matrix(&z.to_lie())
    }

    pub fn is_nilpotent(&self, z: &GradedElement) -> bool {
        // h is semisimple, so only the nilpotence of ad z matters. A nilpotent
        // ad z has index at most 2h - 1 (h the Coxeter number), reached by the
        // principal nilpotent, so every basis vector must die within that.
        let zl = z.to_lie();
        let dim = self.dim();
        let datum = &self.d.datum;
        let steps = (2 * datum.num_roots() / datum.rank.max(1)).saturating_sub(1).max(1);
        (0..dim).all(|i| {
            let mut v = LieElement::basis(i);
            for _ in 0..steps {
                if v.is_zero() {
                    return true;
                }
                v = self.d.datum.bracket(&zl, &v);
            }
            v.is_zero()
        })
    }

    pub fn is_semisimple(&self, z: &GradedElement) -> bool {
        self.full_ad(z).minimal_polynomial().is_squarefree()
    }

    pub fn jordan_decompose(&self, z: &GradedElement) -> Result<(GradedElement, GradedElement)> {
        let a = self.full_ad(z);
        let s = semisimple_part(&a)?;
        let dim = self.dim();
        let q = z.quotient.clone();
        // Solve ad(y) = s for y in h_r.
        let ads: Vec<Matrix> = q.basis().iter().map(|b| self.d.datum.ad_matrix(b)).collect();
        let mut sys = Matrix::zeros(dim * dim, ads.len());
        for (c, m) in ads.iter().enumerate() {
            for (i, v) in m.entries().iter().enumerate() {
                sys.set(i, c, v.clone());
            }
        }
        let coords = sys
            .solve(s.entries())
            .ok_or_else(|| Error::InconsistentOracles("semisimple part is not ad of an element of h_r".into()))?;
        let ss = GradedElement { coords, quotient: q };
        let nil = z.sub(&ss);
        Ok((ss, nil))
    }

    /// Kernel of `ad z` on `h_j`, as `h`-vectors.
    pub fn centralizer_in(&self, z: &GradedElement, j: &Rat) -> Vec<LieElement> {
        let src = self.quotient(j);
        let m = self.ad_matrix(z, j);
        let basis = src.basis();
        kernel_or_all(&m, src.total_dim)
            .iter()
            .map(|k| combine(&basis, k))
            .collect()
    }

    /// Centralizer of a semisimple graded element as a subdatum graded at `x`.
    pub fn centralizer_subdatum(&self, z: &GradedElement) -> LeviSubdatum {
        let pieces: BTreeMap<Rat, Vec<LieElement>> =
            self.components.keys().map(|j| (j.clone(), self.centralizer_in(z, j))).collect();
        let desc = format!("centralizer of {} at r = {}", z.render(&self.d), fmt_rat(&z.r()));
        LeviSubdatum::graded(&self.d, desc, self.x.clone(), pieces)
    }

    /// Greedy maximal family of commuting semisimple elements of `h_r`.
    pub fn cartan_subspace(&self, r: &Rat) -> Result<CartanSubspace> {
        let q = self.quotient(r);
        let mut basis: Vec<GradedElement> = vec![];
        let mut checked = 0;
        loop {
            let zbasis = self.commutant_in(&basis, r);
            let mut added = false;
            for cand in candidates(&zbasis, q.total_dim) {
                checked += 1;
                let el = GradedElement { coords: cand, quotient: q.clone() };
                if el.is_zero() {
                    continue;
                }
                let (ss, _) = self.jordan_decompose(&el)?;
                let vs: Vec<Vector> = basis.iter().map(|b| b.coords.clone()).collect();
                if ss.is_zero() || span_contains(&vs, std::slice::from_ref(&ss.coords), q.total_dim) {
                    continue;
                }
                basis.push(ss);
                added = true;
                break;
            }
            if !added {
                break;
            }
        }
        Ok(CartanSubspace { r: r.clone(), basis, candidates_checked: checked })
    }

    /// Elements of `h_r` commuting with every element of `family`, as coordinate vectors.
    fn commutant_in(&self, family: &[GradedElement], r: &Rat) -> Vec<Vector> {
        let q = self.quotient(r);
        if family.is_empty() {
            return (0..q.total_dim)
                .map(|i| {
                    let mut v = zero_vec(q.total_dim);
                    v[i] = Scalar::one();
                    v
                })
                .collect();
        }
        let mut rows: Vec<Vector> = vec![];
        for c in family {
            // [c, y] = -ad(y) c, linear in y: use ad c on h_r.
            let m = self.ad_matrix(c, r);
            for i in 0..m.rows {
                rows.push(m.row(i));
            }
        }
        if rows.is_empty() {
            return self.commutant_in(&[], r);
        }
        Matrix::from_rows(&rows).kernel()
    }

    /// Membership test for `span(c)` against the commutant, used to certify maximality.
    pub fn certify_maximal(&self, c: &CartanSubspace) -> Result<bool> {
        let q = self.quotient(&c.r);
        let zbasis = self.commutant_in(&c.basis, &c.r);
        let vs: Vec<Vector> = c.basis.iter().map(|b| b.coords.clone()).collect();
        for cand in candidates(&zbasis, q.total_dim) {
            let el = GradedElement { coords: cand, quotient: q.clone() };
            let (ss, _) = self.jordan_decompose(&el)?;
            if !span_contains(&vs, std::slice::from_ref(&ss.coords), q.total_dim) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug)]
pub struct CartanSubspace {
    pub r: Rat,
    pub basis: Vec<GradedElement>,
    pub candidates_checked: usize,
}

impl CartanSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Basis vectors, pairwise sums, then seeded random combinations.
fn candidates(basis: &[Vector], len: usize) -> Vec<Vector> {
    let mut out: Vec<Vector> = basis.to_vec();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            out.push(basis[i].iter().zip(&basis[j]).map(|(a, b)| a + b).collect());
        }
    }
    let mut s = Sampler::new(CARTAN_SEED);
    for _ in 0..(2 * basis.len() + 2) {
        let mut v = zero_vec(len);
        for b in basis {
            let c = s.scalar();
            for (x, y) in v.iter_mut().zip(b) {
                *x = &*x + &(y * &c);
            }
        }
        out.push(v);
    }
    out
}

fn kernel_or_all(m: &Matrix, cols: usize) -> Vec<Vector> {
    if m.rows == 0 {
        return (0..cols)
            .map(|i| {
                let mut v = zero_vec(cols);
                v[i] = Scalar::one();
                v
            })
            .collect();
    }
    m.kernel()
}

fn combine(basis: &[&LieElement], coords: &[Scalar]) -> LieElement {
    let mut out = LieElement::zero();
    for (b, c) in basis.iter().zip(coords) {
        if !c.is_zero() {
            out = out.add(&b.scale(c));
        }
    }
    out
}

/// Coordinates of `v` in the flattened basis of `q`.
pub fn coords_in(q: &MPQuotient, v: &LieElement, dim: usize) -> Option<Vector> {
    if q.total_dim == 0 {
        return if v.is_zero() { Some(vec![]) } else { None };
    }
    Matrix::from_cols(dim, &q.basis_vectors(dim)).solve(&v.to_dense(dim))
}

/// Semisimple part of a matrix via Newton iteration on the squarefree part of
/// its minimal polynomial.
pub fn semisimple_part(a: &Matrix) -> Result<Matrix> {
    let m = a.minimal_polynomial();
    let p = m.divrem(&m.gcd(&m.derivative())).0.monic();
    let dp = p.derivative();
    let mut s = a.clone();
    for _ in 0..64 {
        let ps = p.eval_matrix(&s);
        if ps.is_zero() {
            return Ok(s);
        }
        let inv = dp.eval_matrix(&s).inverse().ok_or(Error::NotSemisimple)?;
        s = s.sub(&ps.mul(&inv));
    }
    Err(Error::InconsistentOracles("Newton iteration did not converge".into()))
}

#[derive(Clone, Debug)]
pub struct GradedElement {
    pub coords: Vector,
    pub quotient: Arc<MPQuotient>,
}

impl GradedElement {
    pub fn r(&self) -> Rat {
        self.quotient.r.clone()
    }

    pub fn x(&self) -> &ApartmentPoint {
        &self.quotient.x
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn to_lie(&self) -> LieElement {
        combine(&self.quotient.basis(), &self.coords)
    }

    pub fn add(&self, o: &GradedElement) -> GradedElement {
        assert_eq!(self.quotient.r, o.quotient.r, "graded sum across components");
        GradedElement { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect(), quotient: self.quotient.clone() }
    }

    pub fn sub(&self, o: &GradedElement) -> GradedElement {
        assert_eq!(self.quotient.r, o.quotient.r, "graded difference across components");
        GradedElement { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect(), quotient: self.quotient.clone() }
    }

    pub fn scale(&self, c: &Scalar) -> GradedElement {
        GradedElement { coords: self.coords.iter().map(|a| a * c).collect(), quotient: self.quotient.clone() }
    }

    /// Readable form: `c*label*t^level` terms.
    pub fn render(&self, d: &TwistedLoopDatum) -> String {
        f_embed(self).render(d)
    }

    pub fn to_literal(&self) -> Vec<serde_json::Value> {
        let pos = self.quotient.positions();
        let mut out = vec![];
        for (p, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (s, b) = pos[p];
            let sp = &self.quotient.spaces[s];
            out.push(serde_json::json!({
                "alpha": sp.alpha,
                "level": fmt_rat(&sp.level),
                "basis_index": b,
                "coeff": c.to_string(),
            }));
        }
        out
    }
}

/// Parses literal entries `{alpha, level, basis_index, coeff}` (coefficients rational).
pub fn parse_literal(v: &serde_json::Value) -> Result<Vec<(Vec<i64>, Rat, usize, Scalar)>> {
    let bad = |m: &str| Error::ConfigParse(format!("graded element literal: {m}"));
    let arr = v.as_array().ok_or_else(|| bad("expected a list"))?;
    let mut out = vec![];
    for e in arr {
        let alpha: Vec<i64> = e["alpha"]
            .as_array()
            .ok_or_else(|| bad("alpha"))?
            .iter()
            .map(|a| a.as_i64().ok_or_else(|| bad("alpha entry")))
            .collect::<Result<_>>()?;
        let level = match &e["level"] {
            serde_json::Value::String(s) => parse_rat(s)?,
            serde_json::Value::Number(n) => rint(n.as_i64().ok_or_else(|| bad("level"))?),
            _ => return Err(bad("level")),
        };
        let idx = e["basis_index"].as_u64().unwrap_or(0) as usize;
        let coeff = match &e["coeff"] {
            serde_json::Value::String(s) => Scalar::from_rat(parse_rat(s)?),
            serde_json::Value::Number(n) => Scalar::int(n.as_i64().ok_or_else(|| bad("coeff"))?),
            serde_json::Value::Null => Scalar::one(),
            _ => return Err(bad("coeff")),
        };
        out.push((alpha, level, idx, coeff));
    }
    Ok(out)
}

/// Finitely supported element of the loop algebra: level -> vector of `h`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoopElement {
    pub terms: BTreeMap<Rat, LieElement>,
}

impl LoopElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(level: Rat, v: LieElement) -> Self {
        let mut out = Self::zero();
        out.insert(level, v);
        out
    }

    fn insert(&mut self, level: Rat, v: LieElement) {
        let cur = self.terms.remove(&level).unwrap_or_default();
        let sum = cur.add(&v);
        if !sum.is_zero() {
            self.terms.insert(level, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &LoopElement) -> LoopElement {
        let mut out = self.clone();
        for (l, v) in &o.terms {
            out.insert(l.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, o: &LoopElement) -> LoopElement {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> LoopElement {
        if c.is_zero() {
            return Self::zero();
        }
        LoopElement { terms: self.terms.iter().map(|(l, v)| (l.clone(), v.scale(c))).collect() }
    }

    pub fn bracket(&self, d: &TwistedLoopDatum, o: &LoopElement) -> LoopElement {
        let mut out = Self::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                out.insert(a + b, d.datum.bracket(x, y));
            }
        }
        out
    }

    /// Minimal value `<alpha,x> + level` over the support, `None` for zero.
    pub fn depth(&self, d: &TwistedLoopDatum, x: &ApartmentPoint) -> Option<Rat> {
        let mut best: Option<Rat> = None;
        for (l, v) in &self.terms {
            for (i, _) in v.iter() {
                let val = x.pair(d.basis_weight(*i)) + l;
                if best.as_ref().map_or(true, |b| val < *b) {
                    best = Some(val);
                }
            }
        }
        best
    }

    /// Whether every level piece satisfies the twisted fixed-point condition.
    pub fn is_twisted_fixed(&self, d: &TwistedLoopDatum) -> bool {
        use crate::exact::embed_root_of_unity;
        self.terms.iter().all(|(l, v)| match d.class_k(l) {
            Some(k) => d.sigma.apply(v) == v.scale(&embed_root_of_unity(k as i64, d.n)),
            None => false,
        })
    }

    /// Part of the element with value exactly `r` at `x`, as an `h`-vector
    /// placed in `k_{x,r}/k_{x,r+}`.
    pub fn graded_piece(&self, ga: &GradedAlgebra, r: &Rat) -> Option<GradedElement> {
        let d = &ga.d;
        let mut v = LieElement::zero();
        for (l, w) in &self.terms {
            for (i, c) in w.iter() {
                if ga.x.pair(d.basis_weight(*i)) + l == *r {
                    v = v.add(&LieElement::term(*i, c.clone()));
                }
            }
        }
        ga.element_from_lie(r, &v)
    }

    /// Drops every term of value `>= cap` at `x`.
    pub fn truncate(&self, d: &TwistedLoopDatum, x: &ApartmentPoint, cap: &Rat) -> LoopElement {
        let mut out = Self::zero();
        for (l, w) in &self.terms {
            for (i, c) in w.iter() {
                if x.pair(d.basis_weight(*i)) + l < *cap {
                    out.insert(l.clone(), LieElement::term(*i, c.clone()));
                }
            }
        }
        out
    }

    pub fn render(&self, d: &TwistedLoopDatum) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(l, v)| {
                let body = d.datum.render(v);
                if l.is_zero() {
                    body
                } else {
                    format!("({body})*t^({})", fmt_rat(l))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Reinterprets a graded element inside the loop algebra.
pub fn f_embed(z: &GradedElement) -> LoopElement {
    let mut out = LoopElement::zero();
    let pos = z.quotient.positions();
    for (p, c) in z.coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (s, b) = pos[p];
        let sp = &z.quotient.spaces[s];
        out.insert(sp.level.clone(), sp.basis[b].scale(c));
    }
    out
}

/// Matrix of `ad g` on the loop algebra modulo `t^periods - 1`, on the levels
/// `[0, periods)`.
pub fn loop_ad_window(d: &TwistedLoopDatum, g: &LoopElement, periods: u32) -> Matrix {
    let p = rint(periods as i64);
    let spaces = affine_root_spaces(d, &Window::half_open(rint(0), p.clone()));
    let dim = d.dim();
    let mut offsets = vec![];
    let mut total = 0;
    let mut by_level: BTreeMap<Rat, Vec<usize>> = BTreeMap::new();
    for (i, s) in spaces.iter().enumerate() {
        offsets.push(total);
        total += s.basis.len();
        by_level.entry(s.level.clone()).or_default().push(i);
    }
    let level_basis: BTreeMap<Rat, Matrix> = by_level
        .iter()
        .map(|(l, ids)| {
            let cols: Vec<Vector> = ids.iter().flat_map(|&i| spaces[i].basis.iter().map(|b| b.to_dense(dim))).collect();
            (l.clone(), Matrix::from_cols(dim, &cols))
        })
        .collect();
    let mut m = Matrix::zeros(total, total);
    for (si, s) in spaces.iter().enumerate() {
        for (bi, b) in s.basis.iter().enumerate() {
            let col = offsets[si] + bi;
            for (a, x) in &g.terms {
                let v = d.datum.bracket(x, b);
                if v.is_zero() {
                    continue;
                }
                let lvl = &s.level + a;
                let wrapped = &lvl - (&lvl / &p).floor() * &p;
                let bm = &level_basis[&wrapped];
                let c = bm.solve(&v.to_dense(dim)).expect("bracket stays in the loop algebra");
                let mut row = 0;
                for &ti in &by_level[&wrapped] {
                    for k in 0..spaces[ti].basis.len() {
                        let cur = m.get(offsets[ti] + k, col).clone();
                        m.set(offsets[ti] + k, col, &cur + &c[row]);
                        row += 1;
                    }
                }
            }
        }
    }
    m
}

/// Semisimplicity of `ad g` on a window of loop levels.
pub fn loop_is_semisimple(d: &TwistedLoopDatum, g: &LoopElement, periods: u32) -> bool {
    loop_ad_window(d, g, periods).minimal_polynomial().is_squarefree()
}

/// Whether `p(lambda) = lambda^k`.
pub fn is_monomial(p: &Poly) -> bool {
    p.coeffs().iter().rev().skip(1).all(|c| c.is_zero())
}
