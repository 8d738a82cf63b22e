//! Twisted loop algebras as sums of affine root spaces, and the filtration
//! subspaces they define at rational apartment points.
//!
//! The loop algebra is the fixed points of `h t^(i/n) -> zeta^i sigma(h) t^(i/n)`
//! inside `h((t^(1/n)))`. A restricted weight is recorded on the orbit basis:
//! coordinate `O` of the restriction of a root is the sum of its simple-root
//! coefficients over the sigma-orbit `O` of simple nodes. Apartment points use
//! the dual coordinates; any coordinates past the restricted rank are central
//! and ignored.

use crate::exact::{embed_root_of_unity, fmt_rat, frac, rint, Rat, Scalar};
use crate::linalg::{independent_subset, intersect, zero_vec, Matrix, Vector};
use crate::rootdata::{
    build_root_datum_capped, diagram_symmetry, pinned_automorphism, CartanType, LieElement,
    PinnedAutomorphism, RootDatum, DEFAULT_RANK_CAP,
};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet};

/// A sigma-eigenspace inside one restricted weight space: the levels
/// `i = k/n + m` all carry this basis.
#[derive(Clone, Debug)]
pub struct RootSpaceClass {
    pub alpha: Vec<i64>,
    pub k: u32,
    pub basis: Vec<LieElement>,
}

#[derive(Clone, Debug)]
pub struct TwistedLoopDatum {
    pub datum: RootDatum,
    pub sigma: PinnedAutomorphism,
    pub n: u32,
    pub orbits: Vec<Vec<usize>>,
    pub restricted_torus_rank: usize,
    /// Rows indexed by orbits, columns by simple roots.
    pub restriction_map: Vec<Vec<i64>>,
    pub classes: Vec<RootSpaceClass>,
    basis_weights: Vec<Vec<i64>>,
}

impl TwistedLoopDatum {
    pub fn new(datum: RootDatum, sigma: PinnedAutomorphism, n: u32) -> Result<Self> {
        if n == 0 || n as usize % sigma.order != 0 {
            return Err(Error::ConfigParse(format!(
                "n = {n} must be a positive multiple of the automorphism order {}",
                sigma.order
            )));
        }
        let rank = datum.rank;
        let mut orbits: Vec<Vec<usize>> = vec![];
        let mut seen = vec![false; rank];
        for i in 0..rank {
            if seen[i] {
                continue;
            }
            let mut o = vec![];
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                o.push(j);
                j = sigma.node_permutation[j];
            }
            o.sort();
            orbits.push(o);
        }
        let restriction_map: Vec<Vec<i64>> = orbits
            .iter()
            .map(|o| (0..rank).map(|i| i64::from(o.contains(&i))).collect())
            .collect();
        let restrict = |r: &[i64]| -> Vec<i64> {
            restriction_map.iter().map(|row| row.iter().zip(r).map(|(a, b)| a * b).sum()).collect()
        };
        let zero_w = vec![0i64; orbits.len()];
        let mut basis_weights = Vec::with_capacity(datum.dim());
        for i in 0..datum.dim() {
            if i < datum.num_roots() {
                basis_weights.push(restrict(&datum.roots[i]));
            } else {
                basis_weights.push(zero_w.clone());
            }
        }
        let mut by_weight: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for (i, w) in basis_weights.iter().enumerate() {
            by_weight.entry(w.clone()).or_default().push(i);
        }
        let mut classes = vec![];
        for (alpha, idx) in &by_weight {
            let w = idx.len();
            let mut s = Matrix::zeros(w, w);
            for (c, &i) in idx.iter().enumerate() {
                let (j, sign) = sigma.images[i];
                let r = idx.iter().position(|&x| x == j).expect("sigma preserves restricted weights");
                s.set(r, c, Scalar::int(sign));
            }
            for k in 0..n {
                if (k as usize * sigma.order) % n as usize != 0 {
                    continue;
                }
                let shifted = s.sub(&Matrix::identity(w).scale(&embed_root_of_unity(k as i64, n)));
                let ker = shifted.kernel();
                if ker.is_empty() {
                    continue;
                }
                let basis = ker
                    .iter()
                    .map(|v| {
                        let mut e = LieElement::zero();
                        for (c, x) in v.iter().enumerate() {
                            e = e.add(&LieElement::term(idx[c], x.clone()));
                        }
                        e
                    })
                    .collect();
                classes.push(RootSpaceClass { alpha: alpha.clone(), k, basis });
            }
        }
        Ok(TwistedLoopDatum {
            restricted_torus_rank: orbits.len(),
            datum,
            sigma,
            n,
            orbits,
            restriction_map,
            classes,
            basis_weights,
        })
    }

    /// Builds from a type, a named or explicit diagram symmetry and `n`.
    pub fn build(t: CartanType, rank: usize, twist: &str, n: u32) -> Result<Self> {
        Self::build_capped(t, rank, twist, n, DEFAULT_RANK_CAP)
    }

    pub fn build_capped(t: CartanType, rank: usize, twist: &str, n: u32, cap: usize) -> Result<Self> {
        let datum = build_root_datum_capped(t, rank, cap)?;
        let perm = diagram_symmetry(&datum, twist)?;
        let sigma = pinned_automorphism(&datum, &perm)?;
        Self::new(datum, sigma, n)
    }

    pub fn split(t: CartanType, rank: usize) -> Result<Self> {
        Self::build(t, rank, "id", 1)
    }

    pub fn dim(&self) -> usize {
        self.datum.dim()
    }

    pub fn basis_weight(&self, i: usize) -> &[i64] {
        &self.basis_weights[i]
    }

    pub fn level_of_class(&self, c: &RootSpaceClass) -> Rat {
        Rat::new(BigInt::from(c.k), BigInt::from(self.n))
    }

    /// The residue class `k` of a level `i` with `n i` integral.
    pub fn class_k(&self, level: &Rat) -> Option<u32> {
        let ni = level * Rat::from_integer(BigInt::from(self.n));
        if !ni.is_integer() {
            return None;
        }
        Some(ni.to_integer().mod_floor(&BigInt::from(self.n)).to_u32().expect("small"))
    }

    pub fn label(&self) -> String {
        let d = &self.datum;
        if self.sigma.is_identity() && self.n == 1 {
            format!("{}{}", d.cartan_type, d.rank)
        } else {
            format!("{}{}[sigma order {}, n={}]", d.cartan_type, d.rank, self.sigma.order, self.n)
        }
    }
}

/// Rational point of the apartment.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ApartmentPoint {
    pub coords: Vec<Rat>,
}

impl ApartmentPoint {
    pub fn new(coords: Vec<Rat>) -> Self {
        ApartmentPoint { coords }
    }

    pub fn origin(rank: usize) -> Self {
        ApartmentPoint { coords: vec![Rat::zero(); rank] }
    }

    pub fn pair(&self, alpha: &[i64]) -> Rat {
        let mut v = Rat::zero();
        for (a, x) in alpha.iter().zip(&self.coords) {
            if *a != 0 {
                v += Rat::from_integer((*a).into()) * x;
            }
        }
        v
    }

    /// Whether the points agree on the first `rank` (non-central) coordinates.
    pub fn same_on(&self, other: &ApartmentPoint, rank: usize) -> bool {
        (0..rank).all(|i| {
            self.coords.get(i).cloned().unwrap_or_else(Rat::zero)
                == other.coords.get(i).cloned().unwrap_or_else(Rat::zero)
        })
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(fmt_rat).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffineRootSpace {
    pub alpha: Vec<i64>,
    pub level: Rat,
    pub basis: Vec<LieElement>,
}

impl AffineRootSpace {
    pub fn value(&self, x: &ApartmentPoint) -> Rat {
        x.pair(&self.alpha) + &self.level
    }
}

/// Level window `[lo, hi)` or `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct Window {
    pub lo: Rat,
    pub hi: Rat,
    pub hi_closed: bool,
}

impl Window {
    pub fn half_open(lo: Rat, hi: Rat) -> Self {
        Window { lo, hi, hi_closed: false }
    }

    pub fn closed(lo: Rat, hi: Rat) -> Self {
        Window { lo, hi, hi_closed: true }
    }

    pub fn period() -> Self {
        Self::half_open(rint(0), rint(1))
    }

    pub fn contains(&self, v: &Rat) -> bool {
        *v >= self.lo && if self.hi_closed { *v <= self.hi } else { *v < self.hi }
    }

    /// All `v0 + m` (m integer) inside the window.
    pub fn shifts_of(&self, v0: &Rat) -> Vec<Rat> {
        let first = (&self.lo - v0).ceil() + v0;
        let mut out = vec![];
        let mut v = first;
        while self.contains(&v) {
            out.push(v.clone());
            v += rint(1);
        }
        out
    }
}

pub fn affine_root_spaces(d: &TwistedLoopDatum, window: &Window) -> Vec<AffineRootSpace> {
    let mut out = vec![];
    for c in &d.classes {
        for level in window.shifts_of(&d.level_of_class(c)) {
            out.push(AffineRootSpace { alpha: c.alpha.clone(), level, basis: c.basis.clone() });
        }
    }
    out.sort_by(|a, b| a.level.cmp(&b.level).then_with(|| a.alpha.cmp(&b.alpha)));
    out
}

/// The quotient `k_{x,r} / k_{x,r+}` as a list of affine root spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct MPQuotient {
    pub x: ApartmentPoint,
    pub r: Rat,
    pub spaces: Vec<AffineRootSpace>,
    pub total_dim: usize,
}

impl MPQuotient {
    /// Flattened basis, in space order.
    pub fn basis(&self) -> Vec<&LieElement> {
        self.spaces.iter().flat_map(|s| s.basis.iter()).collect()
    }

    /// (space index, index within space) for each flattened position.
    pub fn positions(&self) -> Vec<(usize, usize)> {
        let mut out = vec![];
        for (s, sp) in self.spaces.iter().enumerate() {
            for b in 0..sp.basis.len() {
                out.push((s, b));
            }
        }
        out
    }

    pub fn basis_vectors(&self, dim: usize) -> Vec<Vector> {
        self.basis().iter().map(|b| b.to_dense(dim)).collect()
    }

    pub fn space_index(&self, alpha: &[i64], level: &Rat) -> Option<usize> {
        self.spaces.iter().position(|s| s.alpha == alpha && s.level == *level)
    }

    /// The level carried by each flattened basis vector.
    pub fn levels(&self) -> Vec<Rat> {
        self.spaces.iter().flat_map(|s| s.basis.iter().map(move |_| s.level.clone())).collect()
    }

    pub fn to_json(&self, datum: &RootDatum) -> serde_json::Value {
        json!({
            "x": self.x.to_strings(),
            "r": fmt_rat(&self.r),
            "total_dim": self.total_dim,
            "spaces": self.spaces.iter().map(|s| json!({
                "alpha": s.alpha,
                "level": fmt_rat(&s.level),
                "dim": s.basis.len(),
                "basis": s.basis.iter().map(|b| datum.render(b)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn mp_quotient(d: &TwistedLoopDatum, x: &ApartmentPoint, r: &Rat) -> MPQuotient {
    let mut spaces = vec![];
    for c in &d.classes {
        let level = r - x.pair(&c.alpha);
        if d.class_k(&level) == Some(c.k) {
            spaces.push(AffineRootSpace { alpha: c.alpha.clone(), level, basis: c.basis.clone() });
        }
    }
    spaces.sort_by(|a, b| a.alpha.cmp(&b.alpha));
    let total_dim = spaces.iter().map(|s| s.basis.len()).sum();
    MPQuotient { x: x.clone(), r: r.clone(), spaces, total_dim }
}

/// Values `<alpha,x> + i` at which some quotient is nonzero.
pub fn jump_set(d: &TwistedLoopDatum, x: &ApartmentPoint, window: &Window) -> Vec<Rat> {
    let mut out = BTreeSet::new();
    for c in &d.classes {
        let v0 = x.pair(&c.alpha) + d.level_of_class(c);
        for v in window.shifts_of(&v0) {
            out.insert(v);
        }
    }
    out.into_iter().collect()
}

/// Residues `<alpha,x> + i mod 1` of all affine roots.
pub fn residues(d: &TwistedLoopDatum, x: &ApartmentPoint) -> Vec<Rat> {
    jump_set(d, x, &Window::period())
}

/// Whether `k_{x,r+} in k_{y,r+} in k_{x,r}`.
pub fn sandwich_test(d: &TwistedLoopDatum, x: &ApartmentPoint, y: &ApartmentPoint, r: &Rat) -> bool {
    for c in &d.classes {
        let (ax, ay) = (x.pair(&c.alpha), y.pair(&c.alpha));
        let base = d.level_of_class(c);
        // Smallest level in the class with value at x above r.
        let lx = first_level_above(&base, &(r - &ax), true);
        if &ay + &lx <= *r {
            return false;
        }
        let ly = first_level_above(&base, &(r - &ay), true);
        if &ax + &ly < *r {
            return false;
        }
    }
    true
}

/// Smallest `base + m` (m integer) that is `> bound` (strict) or `>= bound`.
pub fn first_level_above(base: &Rat, bound: &Rat, strict: bool) -> Rat {
    let diff = bound - base;
    let mut m = diff.floor();
    if strict || m < diff {
        m += rint(1);
    }
    if !strict && (&m - rint(1)) >= diff {
        m -= rint(1);
    }
    m + base
}

/// How a subalgebra of the loop algebra is recorded.
#[derive(Clone, Debug)]
pub enum LeviSpan {
    /// Sum of pieces of the classes `h_alpha^k`, tensored with all powers of `t`.
    Decomposable(Vec<LieElement>),
    /// Graded by the values at `x`: for each residue `j` in `[0,1)` a subspace
    /// of `mp_quotient(x, j)`; the value `j + m` piece is `t^m` times it.
    Graded { x: ApartmentPoint, pieces: BTreeMap<Rat, Vec<LieElement>> },
}

#[derive(Clone, Debug)]
pub struct LeviSubdatum {
    pub defining_element_support: String,
    pub span: LeviSpan,
    /// (restricted weight, level) pairs met by the span; levels are taken
    /// in `[0,1)` for decomposable spans.
    pub affine_root_subset: Vec<(Vec<i64>, Rat)>,
    pub split_rank: usize,
    /// Dimension over the Laurent field.
    pub dimension: usize,
}

impl LeviSubdatum {
    pub fn decomposable(d: &TwistedLoopDatum, description: String, span: Vec<LieElement>) -> Self {
        let dim = d.dim();
        let vecs: Vec<Vector> = span.iter().map(|b| b.to_dense(dim)).collect();
        let mut support = vec![];
        for c in &d.classes {
            let cv: Vec<Vector> = c.basis.iter().map(|b| b.to_dense(dim)).collect();
            if !intersect(&vecs, &cv, dim).is_empty() {
                support.push((c.alpha.clone(), d.level_of_class(c)));
            }
        }
        let basis: Vec<LieElement> = independent_subset(&vecs, dim).iter().map(|v| LieElement::from_dense(v)).collect();
        let torus: Vec<Vector> = d
            .classes
            .iter()
            .filter(|c| c.alpha.iter().all(|a| *a == 0) && c.k == 0)
            .flat_map(|c| c.basis.iter().map(|b| b.to_dense(dim)))
            .collect();
        let split_rank = central_split_rank(d, &basis, &torus);
        LeviSubdatum {
            defining_element_support: description,
            dimension: basis.len(),
            span: LeviSpan::Decomposable(basis),
            affine_root_subset: support,
            split_rank,
        }
    }

    /// `pieces[j]` must lie in the span of `mp_quotient(x, j)`.
    pub fn graded(
        d: &TwistedLoopDatum,
        description: String,
        x: ApartmentPoint,
        pieces: BTreeMap<Rat, Vec<LieElement>>,
    ) -> Self {
        let dim = d.dim();
        let mut support = vec![];
        let mut all = vec![];
        let mut clean = BTreeMap::new();
        for (j, piece) in pieces {
            let vecs: Vec<Vector> = piece.iter().map(|b| b.to_dense(dim)).collect();
            let basis: Vec<LieElement> = independent_subset(&vecs, dim).iter().map(|v| LieElement::from_dense(v)).collect();
            if basis.is_empty() {
                continue;
            }
            let q = mp_quotient(d, &x, &j);
            for s in &q.spaces {
                let touches = basis.iter().any(|b| s.basis.iter().any(|sb| sb.iter().any(|(i, _)| !b.get(*i).is_zero())));
                if touches {
                    support.push((s.alpha.clone(), s.level.clone()));
                }
            }
            all.extend(basis.iter().cloned());
            clean.insert(j, basis);
        }
        support.sort();
        let zero_piece: Vec<Vector> = clean.get(&Rat::zero()).map(|v: &Vec<LieElement>| v.iter().map(|b| b.to_dense(dim)).collect()).unwrap_or_default();
        let split_rank = central_split_rank(d, &all, &zero_piece);
        LeviSubdatum {
            defining_element_support: description,
            dimension: all.len(),
            span: LeviSpan::Graded { x, pieces: clean },
            affine_root_subset: support,
            split_rank,
        }
    }

    pub fn full(d: &TwistedLoopDatum) -> Self {
        let span = (0..d.dim()).map(LieElement::basis).collect();
        Self::decomposable(d, "0".into(), span)
    }

    /// Centralizer of the restricted torus: the Cartan of `h`.
    pub fn torus(d: &TwistedLoopDatum) -> Self {
        let span = (0..d.datum.rank).map(|i| LieElement::basis(d.datum.h_index(i))).collect();
        Self::decomposable(d, "generic element of Lie(T)".into(), span)
    }

    /// Standard Levi attached to a set of sigma-orbits of simple nodes.
    pub fn standard(d: &TwistedLoopDatum, orbit_ids: &[usize]) -> Self {
        let nodes: BTreeSet<usize> = orbit_ids.iter().flat_map(|&o| d.orbits[o].iter().copied()).collect();
        let mut span: Vec<LieElement> = (0..d.datum.rank).map(|i| LieElement::basis(d.datum.h_index(i))).collect();
        for (a, r) in d.datum.roots.iter().enumerate() {
            if r.iter().enumerate().all(|(i, c)| *c == 0 || nodes.contains(&i)) {
                span.push(LieElement::basis(a));
            }
        }
        Self::decomposable(d, format!("standard Levi on orbits {orbit_ids:?}"), span)
    }

    /// All recorded vectors (one period), without level information.
    pub fn vectors(&self) -> Vec<LieElement> {
        match &self.span {
            LeviSpan::Decomposable(b) => b.clone(),
            LeviSpan::Graded { pieces, .. } => pieces.values().flatten().cloned().collect(),
        }
    }
}

/// Dimension of the centre of the span inside `within`. With `within` the
/// residue-0 part this is the split rank of the centre: the grading
/// automorphism acts on the centre with fixed space exactly that part.
fn central_split_rank(d: &TwistedLoopDatum, span: &[LieElement], within: &[Vector]) -> usize {
    let dim = d.dim();
    if span.is_empty() || within.is_empty() {
        return 0;
    }
    let brs: Vec<Vec<Vector>> =
        span.iter().map(|a| span.iter().map(|b| d.datum.bracket(a, b).to_dense(dim)).collect()).collect();
    let mut rows: Vec<Vector> = vec![];
    for j in 0..span.len() {
        for c in 0..dim {
            rows.push((0..span.len()).map(|i| brs[i][j][c].clone()).collect());
        }
    }
    let center: Vec<Vector> = Matrix::from_rows(&rows)
        .kernel()
        .iter()
        .map(|k| {
            let mut v = zero_vec(dim);
            for (b, c) in span.iter().zip(k) {
                for (x, y) in v.iter_mut().zip(b.to_dense(dim)) {
                    *x = &*x + &(&y * c);
                }
            }
            v
        })
        .collect();
    intersect(&center, within, dim).len()
}

/// Subquotient of `k_{x,r}/k_{x,r+}` cut out by a subdatum.
#[derive(Clone, Debug)]
pub struct LeviQuotient {
    pub ambient: MPQuotient,
    pub basis: Vec<LieElement>,
}

impl LeviQuotient {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn levi_restrict(d: &TwistedLoopDatum, l: &LeviSubdatum, x: &ApartmentPoint, r: &Rat) -> Result<LeviQuotient> {
    let q = mp_quotient(d, x, r);
    let dim = d.dim();
    let basis = match &l.span {
        LeviSpan::Decomposable(b) => {
            let lv: Vec<Vector> = b.iter().map(|e| e.to_dense(dim)).collect();
            intersect(&lv, &q.basis_vectors(dim), dim).iter().map(|v| LieElement::from_dense(v)).collect()
        }
        LeviSpan::Graded { x: p, pieces } => {
            if !p.same_on(x, d.restricted_torus_rank) {
                return Err(Error::NotGraded(format!(
                    "subdatum graded at {:?}, asked at {:?}",
                    p.to_strings(),
                    x.to_strings()
                )));
            }
            pieces.get(&frac(r)).cloned().unwrap_or_default()
        }
    };
    Ok(LeviQuotient { ambient: q, basis })
}

/// Membership of a weight/level pair in `k_{x,r}` (or `k_{x,r+}` when strict).
pub fn in_filtration(x: &ApartmentPoint, alpha: &[i64], level: &Rat, r: &Rat, strict: bool) -> bool {
    let v = x.pair(alpha) + level;
    if strict {
        v > *r
    } else {
        v >= *r
    }
}

/// Fractional part helper re-exported for callers working with residues.
pub fn residue(v: &Rat) -> Rat {
    frac(v)
}
