//! Semistability, destabilizing cocharacters, centralizer labels, the strata
//! of a graded component and the pointwise checks of the base case.

use crate::exact::{fmt_rat, frac, rint, Rat, Scalar};
use crate::invmap::{q_xr, InvariantSystem};
use crate::linalg::{intersect, span_contains, span_equal, span_rank, zero_vec, Matrix, Vector};
use crate::lp::{reduce_halfspaces, solve, AffineHalfspace, Direction, LinearProgram, LpOutcome, Relation};
use crate::mpfilt::{
    first_level_above, levi_restrict, sandwich_test, ApartmentPoint, LeviSpan, LeviSubdatum, TwistedLoopDatum,
};
use crate::rootdata::{invariant_degrees, CartanType, LieElement};
use crate::sample::Sampler;
use crate::vinberg::{f_embed, GradedAlgebra, GradedElement, LoopElement};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet};

/// Label of a stratum. `Diamond` sorts after every subdatum label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LeviLabel {
    Subdatum {
        dimension: usize,
        split_rank: usize,
        /// Dimension of the centralizer in each graded piece `h_j`, `j` in
        /// `[0,1)`; unchanged by conjugation under the degree-0 group.
        signature: Vec<(Rat, usize)>,
        /// Degrees of the centralizer over an algebraic closure; empty when
        /// the dimension count does not pin them down.
        degrees: Vec<usize>,
    },
    Diamond,
}

impl LeviLabel {
    pub fn is_diamond(&self) -> bool {
        matches!(self, LeviLabel::Diamond)
    }

    /// Short description used in reports.
    pub fn describe(&self, d: &TwistedLoopDatum) -> String {
        match self {
            LeviLabel::Diamond => "unstable (diamond)".into(),
            LeviLabel::Subdatum { dimension, split_rank, degrees, .. } => {
                let l = d.datum.rank;
                if *dimension == d.dim() {
                    "full group".into()
                } else if *dimension == l && degrees.iter().all(|e| *e == 1) {
                    if *split_rank == d.restricted_torus_rank {
                        "split maximal torus".into()
                    } else if *split_rank == 0 {
                        "elliptic maximal torus".into()
                    } else {
                        format!("maximal torus of split rank {split_rank}")
                    }
                } else {
                    format!("twisted Levi of dimension {dimension}")
                }
            }
        }
    }

    pub fn to_json(&self, d: &TwistedLoopDatum) -> serde_json::Value {
        match self {
            LeviLabel::Diamond => json!({"kind": "diamond", "name": self.describe(d)}),
            LeviLabel::Subdatum { dimension, split_rank, signature, degrees } => json!({
                "kind": "subdatum",
                "name": self.describe(d),
                "dimension": dimension,
                "split_rank": split_rank,
                "signature": signature.iter().map(|(j, n)| json!([fmt_rat(j), n])).collect::<Vec<_>>(),
                "degrees": degrees,
            }),
        }
    }
}

/// Nilpotence of `z`, cross-checked against `q_xr(z) = 0`.
pub fn unstable_test(ga: &GradedAlgebra, inv: &InvariantSystem, z: &GradedElement) -> Result<bool> {
    let nil = ga.is_nilpotent(z);
    let q0 = q_xr(&ga.d, inv, z)?.is_zero();
    if nil != q0 {
        return Err(Error::InconsistentOracles(format!(
            "{}: nilpotent = {nil}, q_xr = 0 is {q0}",
            z.render(&ga.d)
        )));
    }
    Ok(nil)
}

fn support_weights(z: &GradedElement) -> BTreeSet<Vec<i64>> {
    let pos = z.quotient.positions();
    z.coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(p, _)| z.quotient.spaces[pos[p].0].alpha.clone())
        .collect()
}

fn pair_int(alpha: &[i64], w: &[Rat]) -> Rat {
    alpha.iter().zip(w).map(|(a, c)| Rat::from_integer((*a).into()) * c).sum()
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

fn lp_with(vars: &[String], direction: Direction) -> LinearProgram {
    let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    LinearProgram::new(&refs, true, direction)
}

fn optimum(lp: &LinearProgram) -> Result<(Rat, Vec<Rat>)> {
    match solve(lp) {
        LpOutcome::Optimal { value, point } => Ok((value, point)),
        LpOutcome::Unbounded => Err(Error::Unbounded),
        LpOutcome::Infeasible => Err(Error::Infeasible),
    }
}

/// A point `y` near `x` at which every support space of `z` lies strictly
/// above `r`, with `k_{x,r+} <= k_{y,r+} <= k_{x,r}`.
pub fn destabilize(ga: &GradedAlgebra, z: &GradedElement) -> Result<ApartmentPoint> {
    let d = &ga.d;
    let x = z.x().clone();
    let r = z.r();
    if z.is_zero() {
        return Ok(x);
    }
    let m = d.restricted_torus_rank;
    let support = support_weights(z);

    // Margin: max delta with <alpha,w> >= delta on the support, |w_i| <= 1.
    let mut vars = names("w", m);
    vars.push("delta".into());
    let mut lp = lp_with(&vars, Direction::Maximize);
    lp.objective[m] = Rat::one();
    for a in &support {
        let mut c: Vec<Rat> = a.iter().map(|v| rint(*v)).collect();
        c.resize(m, Rat::zero());
        c.push(rint(-1));
        lp.add(c, Relation::Ge, Rat::zero());
    }
    for i in 0..m {
        let mut c = vec![Rat::zero(); m + 1];
        c[i] = Rat::one();
        lp.add(c.clone(), Relation::Le, Rat::one());
        lp.add(c, Relation::Ge, rint(-1));
    }
    let (delta, _) = optimum(&lp)?;
    if !delta.is_positive() {
        return Err(Error::NeedsConjugation);
    }

    // Among maximal-margin directions, the one of least l1 norm.
    let mut vars = names("w", m);
    vars.extend(names("u", m));
    let mut lp = lp_with(&vars, Direction::Minimize);
    for i in 0..m {
        lp.objective[m + i] = Rat::one();
        let mut c = vec![Rat::zero(); 2 * m];
        c[m + i] = Rat::one();
        c[i] = Rat::one();
        lp.add(c.clone(), Relation::Ge, Rat::zero());
        c[i] = rint(-1);
        lp.add(c, Relation::Ge, Rat::zero());
        let mut b = vec![Rat::zero(); 2 * m];
        b[i] = Rat::one();
        lp.add(b.clone(), Relation::Le, Rat::one());
        lp.add(b, Relation::Ge, rint(-1));
    }
    for a in &support {
        let mut c: Vec<Rat> = a.iter().map(|v| rint(*v)).collect();
        c.resize(2 * m, Rat::zero());
        lp.add(c, Relation::Ge, delta.clone());
    }
    let (_, point) = optimum(&lp)?;
    let w: Vec<Rat> = point[..m].to_vec();

    // Step length: each affine root keeps its side of r.
    let mut lp = lp_with(&["eps".to_string()], Direction::Maximize);
    lp.free = vec![false];
    lp.objective = vec![Rat::one()];
    lp.add(vec![Rat::one()], Relation::Le, Rat::one());
    for c in &d.classes {
        let slope = pair_int(&c.alpha, &w).abs();
        if slope.is_zero() {
            continue;
        }
        let f = frac(&(&r - x.pair(&c.alpha) - d.level_of_class(c)));
        let gap = if f.is_zero() { Rat::one() } else { std::cmp::min(f.clone(), Rat::one() - &f) };
        lp.add(vec![slope], Relation::Le, gap / rint(2));
    }
    let (eps, _) = optimum(&lp)?;
    let coords: Vec<Rat> = x.coords.iter().enumerate().map(|(i, c)| c + &eps * w.get(i).cloned().unwrap_or_default()).collect();
    let y = ApartmentPoint::new(coords);

    let deepened = support.iter().all(|a| y.pair(a) > x.pair(a));
    if !deepened || !sandwich_test(d, &x, &y, &r) {
        return Err(Error::InconsistentOracles("destabilizing step violates its postconditions".into()));
    }
    Ok(y)
}

/// Minimal half-spaces `<alpha,y> + i >= s` cutting out `k_{x,r}`.
pub fn deepening_constraints(d: &TwistedLoopDatum, x: &ApartmentPoint, r: &Rat) -> Vec<AffineHalfspace> {
    let cs: Vec<AffineHalfspace> = d
        .classes
        .iter()
        .map(|c| {
            let level = first_level_above(&d.level_of_class(c), &(r - x.pair(&c.alpha)), false);
            AffineHalfspace { alpha: c.alpha.clone(), level }
        })
        .collect();
    reduce_halfspaces(&cs)
}

/// The linear program behind `deepening_lp`, variables `y_0.. , s`.
pub fn deepening_program(d: &TwistedLoopDatum, x: &ApartmentPoint, r: &Rat) -> LinearProgram {
    let m = d.restricted_torus_rank;
    let mut vars = names("y", m);
    vars.push("s".into());
    let mut lp = lp_with(&vars, Direction::Maximize);
    lp.objective[m] = Rat::one();
    for h in deepening_constraints(d, x, r) {
        let mut c: Vec<Rat> = h.alpha.iter().map(|v| rint(*v)).collect();
        c.resize(m, Rat::zero());
        c.push(rint(-1));
        lp.add(c, Relation::Ge, -h.level);
    }
    lp
}

/// Largest `s` such that `k_{x,r} <= k_{y,s}` for some `y`, with such a `y`.
pub fn deepening_lp(d: &TwistedLoopDatum, x: &ApartmentPoint, r: &Rat) -> Result<(Rat, ApartmentPoint)> {
    let m = d.restricted_torus_rank;
    let (s, point) = optimum(&deepening_program(d, x, r))?;
    Ok((s, ApartmentPoint::new(point[..m].to_vec())))
}

fn dense(vs: &[LieElement], dim: usize) -> Vec<Vector> {
    vs.iter().map(|v| v.to_dense(dim)).collect()
}

/// Basis of the centre of the subalgebra spanned by `span`.
fn center_of(d: &TwistedLoopDatum, span: &[LieElement]) -> Vec<LieElement> {
    if span.is_empty() {
        return vec![];
    }
    let dim = d.dim();
    let mut rows: Vec<Vector> = vec![];
    let brs: Vec<Vec<Vector>> =
        span.iter().map(|a| span.iter().map(|b| d.datum.bracket(a, b).to_dense(dim)).collect()).collect();
    for j in 0..span.len() {
        for c in 0..dim {
            rows.push((0..span.len()).map(|i| brs[i][j][c].clone()).collect());
        }
    }
    Matrix::from_rows(&rows)
        .kernel()
        .iter()
        .map(|k| {
            let mut v = LieElement::zero();
            for (b, c) in span.iter().zip(k) {
                if !c.is_zero() {
                    v = v.add(&b.scale(c));
                }
            }
            v
        })
        .collect()
}

fn simple_factors(max_rank: usize) -> Vec<(usize, usize, Vec<usize>)> {
    let mut out = vec![];
    for n in 1..=max_rank {
        out.push((n, n * (n + 2), invariant_degrees(CartanType::A, n)));
        if n >= 2 {
            out.push((n, n * (2 * n + 1), invariant_degrees(CartanType::B, n)));
        }
        if n >= 4 {
            out.push((n, n * (2 * n - 1), invariant_degrees(CartanType::D, n)));
        }
    }
    for (t, n, dim) in [(CartanType::G, 2, 14), (CartanType::F, 4, 52), (CartanType::E, 6, 78), (CartanType::E, 7, 133), (CartanType::E, 8, 248)] {
        if n <= max_rank {
            out.push((n, dim, invariant_degrees(t, n)));
        }
    }
    out
}

/// Degrees of a semisimple algebra from its dimension and rank, when these
/// determine them.
fn semisimple_degrees(dim: usize, rank: usize) -> Option<Vec<usize>> {
    fn go(
        f: &[(usize, usize, Vec<usize>)],
        start: usize,
        rank: usize,
        dim: usize,
        acc: &mut Vec<usize>,
        found: &mut BTreeSet<Vec<usize>>,
    ) {
        if rank == 0 {
            if dim == 0 {
                let mut v = acc.clone();
                v.sort();
                found.insert(v);
            }
            return;
        }
        for (i, (r, d, deg)) in f.iter().enumerate().skip(start) {
            if *r <= rank && *d <= dim {
                let len = acc.len();
                acc.extend(deg);
                go(f, i, rank - r, dim - d, acc, found);
                acc.truncate(len);
            }
        }
    }
    let f = simple_factors(rank);
    let mut found = BTreeSet::new();
    go(&f, 0, rank, dim, &mut vec![], &mut found);
    if found.len() == 1 {
        found.into_iter().next()
    } else {
        None
    }
}

/// Label of a centralizer subdatum.
pub fn label_of(d: &TwistedLoopDatum, l: &LeviSubdatum) -> LeviLabel {
    let span = l.vectors();
    let c = center_of(d, &span).len();
    let rank = d.datum.rank;
    let degrees = if rank >= c {
        semisimple_degrees(l.dimension - c, rank - c).map(|mut v| {
            v.extend(std::iter::repeat(1).take(c));
            v.sort();
            v
        })
    } else {
        None
    };
    let signature = residue_dims(d, l);
    LeviLabel::Subdatum { dimension: l.dimension, split_rank: l.split_rank, signature, degrees: degrees.unwrap_or_default() }
}

fn residue_dims(d: &TwistedLoopDatum, l: &LeviSubdatum) -> Vec<(Rat, usize)> {
    match &l.span {
        LeviSpan::Graded { pieces, .. } => pieces.iter().map(|(j, v)| (j.clone(), v.len())).collect(),
        LeviSpan::Decomposable(b) => {
            let dim = d.dim();
            let bv = dense(b, dim);
            let mut out: BTreeMap<Rat, usize> = BTreeMap::new();
            for c in &d.classes {
                let n = intersect(&bv, &dense(&c.basis, dim), dim).len();
                if n > 0 {
                    *out.entry(frac(&d.level_of_class(c))).or_default() += n;
                }
            }
            out.into_iter().collect()
        }
    }
}

/// Centralizer of a semisimple graded element and its label.
pub fn centralizer_label(ga: &GradedAlgebra, z: &GradedElement) -> Result<(LeviSubdatum, LeviLabel)> {
    if !ga.is_semisimple(z) {
        return Err(Error::NotSemisimple);
    }
    let l = ga.centralizer_subdatum(z);
    let label = label_of(&ga.d, &l);
    Ok((l, label))
}

pub fn stratum_of(ga: &GradedAlgebra, inv: &InvariantSystem, z: &GradedElement) -> Result<LeviLabel> {
    if unstable_test(ga, inv, z)? {
        return Ok(LeviLabel::Diamond);
    }
    let (s, _) = ga.jordan_decompose(z)?;
    Ok(centralizer_label(ga, &s)?.1)
}

/// Whether `z` (central in `l`) has no more centralizer than the centre of `l`,
/// i.e. pairs nonzero with every weight of that centre on `h`.
pub fn gen_test(d: &TwistedLoopDatum, l: &LeviSubdatum, z: &LieElement) -> bool {
    let center = center_of(d, &l.vectors());
    let joint = joint_kernel_dim(d, &center);
    joint == joint_kernel_dim(d, std::slice::from_ref(z))
}

fn joint_kernel_dim(d: &TwistedLoopDatum, family: &[LieElement]) -> usize {
    let dim = d.dim();
    let mut rows: Vec<Vector> = vec![];
    for a in family {
        let m = d.datum.ad_matrix(a);
        for i in 0..m.rows {
            rows.push(m.row(i));
        }
    }
    if rows.is_empty() {
        return dim;
    }
    Matrix::from_rows(&rows).kernel().len()
}

/// `sum_k ad(w)^k g / k!`, dropping terms of value `>= cap` at `x`.
pub fn exp_ad(d: &TwistedLoopDatum, x: &ApartmentPoint, w: &LoopElement, g: &LoopElement, cap: &Rat) -> LoopElement {
    let mut sum = g.truncate(d, x, cap);
    let mut term = sum.clone();
    let mut k = 1i64;
    loop {
        term = w.bracket(d, &term).scale(&Scalar::from_rat(Rat::new(1.into(), k.into()))).truncate(d, x, cap);
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term);
        k += 1;
    }
    sum
}

fn values_of(ga: &GradedAlgebra, g: &LoopElement) -> BTreeSet<Rat> {
    let mut out = BTreeSet::new();
    for (l, v) in &g.terms {
        for (i, _) in v.iter() {
            out.insert(ga.x.pair(ga.d.basis_weight(*i)) + l);
        }
    }
    out
}

/// Aligns `g` with `z`, using conjugators that commute with every element of
/// `keep`. Returns the aligned element and the conjugators in order.
fn align_steps(
    ga: &GradedAlgebra,
    z: &GradedElement,
    g: &LoopElement,
    cap: &Rat,
    keep: &[GradedElement],
) -> Result<(LoopElement, Vec<LoopElement>)> {
    let d = &ga.d;
    let r = z.r();
    if *cap <= r {
        return Ok((g.clone(), vec![]));
    }
    if let Some(depth) = g.depth(d, &ga.x) {
        if depth < r {
            return Err(Error::NoAlignment(format!("lift has depth {} below {}", fmt_rat(&depth), fmt_rat(&r))));
        }
    }
    match g.graded_piece(ga, &r) {
        Some(p) if p.coords == z.coords => {}
        _ => return Err(Error::NoAlignment("lift does not reduce to z".into())),
    }
    let zl = z.to_lie();
    let mut g = g.truncate(d, &ga.x, cap);
    let mut ws = vec![];
    let mut done = BTreeSet::new();
    loop {
        let next = values_of(ga, &g).into_iter().find(|s| *s > r && *s < *cap && !done.contains(s));
        let Some(s) = next else { break };
        let p = g
            .graded_piece(ga, &s)
            .ok_or_else(|| Error::NoAlignment(format!("piece at {} leaves the grading", fmt_rat(&s))))?;
        done.insert(s.clone());
        if d.datum.bracket(&zl, &p.to_lie()).is_zero() {
            continue;
        }
        let w = solve_defect(ga, z, &p, keep)?;
        let wl = f_embed(&w);
        g = exp_ad(d, &ga.x, &wl, &g, cap);
        ws.push(wl);
    }
    Ok((g, ws))
}

/// `w` in `h_{s-r}` (commuting with `keep`) with `p - [z,w]` killed by `ad z`.
fn solve_defect(ga: &GradedAlgebra, z: &GradedElement, p: &GradedElement, keep: &[GradedElement]) -> Result<GradedElement> {
    let s = p.r();
    let j = &s - z.r();
    let src = ga.quotient(&j);
    let n = src.total_dim;
    // Allowed directions: the joint kernel of ad(keep) on h_j.
    let allowed: Vec<Vector> = {
        let mut rows: Vec<Vector> = vec![];
        for k in keep {
            let m = ga.ad_matrix(k, &j);
            for i in 0..m.rows {
                rows.push(m.row(i));
            }
        }
        if rows.is_empty() || n == 0 {
            (0..n)
                .map(|i| {
                    let mut v = zero_vec(n);
                    v[i] = Scalar::one();
                    v
                })
                .collect()
        } else {
            Matrix::from_rows(&rows).kernel()
        }
    };
    let adz = ga.ad_matrix(z, &j);
    let ker: Vec<Vector> = {
        let m = ga.ad_matrix(z, &s);
        if m.rows == 0 {
            (0..p.coords.len())
                .map(|i| {
                    let mut v = zero_vec(p.coords.len());
                    v[i] = Scalar::one();
                    v
                })
                .collect()
        } else {
            m.kernel()
        }
    };
    let mut cols: Vec<Vector> = allowed.iter().map(|a| adz.apply(a)).collect();
    cols.extend(ker.iter().cloned());
    let sol = if cols.is_empty() { None } else { Matrix::from_cols(p.coords.len(), &cols).solve(&p.coords) };
    let sol = sol.ok_or_else(|| Error::NoAlignment(format!("defect at {} is not in the image of ad z", fmt_rat(&s))))?;
    let mut w = zero_vec(n);
    for (a, c) in allowed.iter().zip(&sol) {
        for (x, y) in w.iter_mut().zip(a) {
            *x = &*x + &(y * c);
        }
    }
    Ok(ga.element(&j, w))
}

/// Conjugates the lift `g1` of a semisimple `z` until it commutes with
/// `f_embed(z)` below `depth_cap`.
pub fn align_lift(ga: &GradedAlgebra, z: &GradedElement, g1: &LoopElement, depth_cap: &Rat) -> Result<LoopElement> {
    Ok(align_steps(ga, z, g1, depth_cap, &[])?.0)
}

/// Simultaneous alignment of lifts of pairwise commuting semisimple elements.
/// Later conjugators commute with the earlier elements, so earlier alignments
/// survive.
pub fn multi_align(ga: &GradedAlgebra, items: &[(GradedElement, LoopElement)], depth_cap: &Rat) -> Result<Vec<LoopElement>> {
    let d = &ga.d;
    let mut gs: Vec<LoopElement> = items.iter().map(|(_, g)| g.clone()).collect();
    let zs: Vec<GradedElement> = items.iter().map(|(z, _)| z.clone()).collect();
    for i in 0..items.len() {
        for j in 0..i {
            if !ga.bracket(&zs[i], &zs[j]).is_zero() {
                return Err(Error::NoAlignment(format!("elements {j} and {i} do not commute")));
            }
        }
        let (gi, ws) = align_steps(ga, &zs[i], &gs[i], depth_cap, &zs[..i])?;
        gs[i] = gi;
        for (j, g) in gs.iter_mut().enumerate() {
            if j == i {
                continue;
            }
            for w in &ws {
                *g = exp_ad(d, &ga.x, w, g, depth_cap);
            }
        }
    }
    Ok(gs)
}

/// Outcome of the five base-case checks for one semisimple sample.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Checks {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
    pub e: bool,
    pub centralizer_dim: usize,
    pub tangent: (usize, usize, usize),
}

impl Checks {
    pub fn all(&self) -> bool {
        self.a && self.b && self.c && self.d && self.e
    }

    fn failed(&self) -> Vec<&'static str> {
        let mut v = vec![];
        for (name, ok) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d), ("e", self.e)] {
            if !ok {
                v.push(name);
            }
        }
        v
    }
}

/// Runs checks (a) through (e) for a nonzero semisimple `z`.
pub fn basecase_checks(ga: &GradedAlgebra, inv: &InvariantSystem, z: &GradedElement) -> Result<Checks> {
    let d = &ga.d;
    let dim = d.dim();
    let r = z.r();
    let (l, label) = centralizer_label(ga, z)?;
    let zl = z.to_lie();

    // (a) kernel of ad z on all of h against the gradewise count.
    let full_ker = d.datum.ad_matrix(&zl).kernel();
    let a = full_ker.len() == l.dimension;

    // (b) kernel meets h_r exactly in the Levi part.
    let q = ga.quotient(&r);
    let lq = levi_restrict(d, &l, &ga.x, &r)?;
    let qv = q.basis_vectors(dim);
    let meet = intersect(&full_ker, &qv, dim);
    let b = span_equal(&meet, &dense(&lq.basis, dim), dim);

    // (c) [h_0, z] + Levi part = h_r, directly.
    let image = image_vectors(ga, z, &Rat::zero());
    let ir = span_rank(&image, dim);
    let mut both = image.clone();
    both.extend(dense(&lq.basis, dim));
    let total = span_rank(&both, dim);
    let c = total == q.total_dim && total == ir + lq.dim();

    // (d) h_j = [z, h_{j-r}] + ker(ad z on h_j) for every residue j.
    let mut dd = true;
    for (j, qj) in &ga.components {
        let im = image_vectors(ga, z, &(j - &r));
        let ker = dense(&ga.centralizer_in(z, j), dim);
        let mut all = im.clone();
        all.extend(ker.iter().cloned());
        let t = span_rank(&all, dim);
        dd &= t == qj.total_dim && t == span_rank(&im, dim) + ker.len();
    }

    // (e) z is generic central in its centralizer, and relabels to the same stratum.
    let central = span_contains(&dense(&center_of(d, &l.vectors()), dim), &[zl.to_dense(dim)], dim);
    let e = central && gen_test(d, &l, &zl) && stratum_of(ga, inv, z)? == label;

    Ok(Checks { a, b, c, d: dd, e, centralizer_dim: l.dimension, tangent: (ir, lq.dim(), q.total_dim) })
}

/// `[z, h_src]` as `h`-vectors.
fn image_vectors(ga: &GradedAlgebra, z: &GradedElement, src: &Rat) -> Vec<Vector> {
    let dim = ga.dim();
    let zl = z.to_lie();
    ga.quotient(src).basis().iter().map(|b| ga.d.datum.bracket(&zl, b).to_dense(dim)).collect()
}

#[derive(Clone, Debug)]
pub struct SampleRecord {
    pub element: GradedElement,
    pub label: LeviLabel,
    pub generic: bool,
    pub centralizer_dim: usize,
    pub checks: Option<Checks>,
}

#[derive(Clone, Debug)]
pub struct StratumSummary {
    pub label: LeviLabel,
    pub count: usize,
    pub generic: usize,
    pub centralizer_dim: usize,
    /// Per check, whether every sample in the stratum passed; `None` for the
    /// unstable stratum.
    pub checks: Option<[bool; 5]>,
}

#[derive(Clone, Debug)]
pub struct StratumReport {
    pub x: ApartmentPoint,
    pub r: Rat,
    pub samples: Vec<SampleRecord>,
    pub strata: Vec<StratumSummary>,
    pub counterexamples: Vec<serde_json::Value>,
}

impl StratumReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn labels(&self) -> Vec<LeviLabel> {
        self.strata.iter().map(|s| s.label.clone()).collect()
    }

    pub fn to_json(&self, d: &TwistedLoopDatum) -> serde_json::Value {
        let pf = |b: bool| if b { "pass" } else { "fail" };
        json!({
            "x": self.x.to_strings(),
            "r": fmt_rat(&self.r),
            "strata": self.strata.iter().map(|s| json!({
                "label": s.label.to_json(d),
                "count": s.count,
                "generic": s.generic,
                "centralizer_dim": s.centralizer_dim,
                "checks": match &s.checks {
                    Some(c) => json!({"a": pf(c[0]), "b": pf(c[1]), "c": pf(c[2]), "d": pf(c[3]), "e": pf(c[4])}),
                    None => json!("n/a"),
                },
            })).collect::<Vec<_>>(),
            "samples": self.samples.iter().map(|s| json!({
                "element": s.element.to_literal(),
                "label": s.label.describe(d),
                "generic": s.generic,
                "centralizer_dim": s.centralizer_dim,
            })).collect::<Vec<_>>(),
            "counterexamples": self.counterexamples,
        })
    }
}

/// Seeded sample of nonzero elements of `h_r`: half from a Cartan subspace
/// with small integer coefficients (to hit walls), half arbitrary.
pub fn sample_component(ga: &GradedAlgebra, r: &Rat, count: usize, seed: u64) -> Result<Vec<GradedElement>> {
    let q = ga.quotient(r);
    if q.total_dim == 0 {
        return Ok(vec![]);
    }
    let c = ga.cartan_subspace(r)?;
    let mut s = Sampler::new(seed);
    let mut out = vec![];
    let mut tries = 0;
    while out.len() < count && tries < 20 * count + 20 {
        tries += 1;
        let coords = if !c.basis.is_empty() && tries % 2 == 1 {
            let mut v = zero_vec(q.total_dim);
            for b in &c.basis {
                let k = Scalar::int(s.int(-2, 2));
                for (x, y) in v.iter_mut().zip(&b.coords) {
                    *x = &*x + &(y * &k);
                }
            }
            v
        } else {
            (0..q.total_dim).map(|_| Scalar::int(s.int(-1, 1))).collect()
        };
        let z = ga.element(r, coords);
        if !z.is_zero() {
            out.push(z);
        }
    }
    Ok(out)
}

fn examine(ga: &GradedAlgebra, inv: &InvariantSystem, z: &GradedElement) -> std::result::Result<SampleRecord, serde_json::Value> {
    let fail = |check: &str, detail: String| json!({"element": z.to_literal(), "check": check, "detail": detail});
    let label = stratum_of(ga, inv, z).map_err(|e| fail("label", e.to_string()))?;
    if label.is_diamond() {
        return Ok(SampleRecord { element: z.clone(), label, generic: false, centralizer_dim: 0, checks: None });
    }
    let (s, _) = ga.jordan_decompose(z).map_err(|e| fail("jordan", e.to_string()))?;
    let checks = basecase_checks(ga, inv, &s).map_err(|e| fail("checks", e.to_string()))?;
    if !checks.all() {
        return Err(fail(&checks.failed().join(","), format!("tangent counts {:?}", checks.tangent)));
    }
    let l = ga.centralizer_subdatum(&s);
    let generic = gen_test(&ga.d, &l, &s.to_lie());
    Ok(SampleRecord { element: z.clone(), label, generic, centralizer_dim: checks.centralizer_dim, checks: Some(checks) })
}

/// Samples `h_r`, sorts the samples into strata and runs the base-case checks
/// on the semisimple part of each stable sample.
pub fn verify_basecase(ga: &GradedAlgebra, inv: &InvariantSystem, r: &Rat, samples: usize, seed: u64) -> Result<StratumReport> {
    let zs = sample_component(ga, r, samples, seed)?;
    let results: Vec<std::result::Result<SampleRecord, serde_json::Value>> =
        zs.par_iter().map(|z| examine(ga, inv, z)).collect();
    let mut records = vec![];
    let mut counterexamples = vec![];
    for res in results {
        match res {
            Ok(rec) => records.push(rec),
            Err(v) => counterexamples.push(v),
        }
    }
    let mut by_label: BTreeMap<LeviLabel, StratumSummary> = BTreeMap::new();
    for rec in &records {
        let e = by_label.entry(rec.label.clone()).or_insert_with(|| StratumSummary {
            label: rec.label.clone(),
            count: 0,
            generic: 0,
            centralizer_dim: rec.centralizer_dim,
            checks: rec.checks.as_ref().map(|_| [true; 5]),
        });
        e.count += 1;
        e.generic += rec.generic as usize;
        if let (Some(agg), Some(c)) = (e.checks.as_mut(), rec.checks.as_ref()) {
            for (slot, ok) in agg.iter_mut().zip([c.a, c.b, c.c, c.d, c.e]) {
                *slot &= ok;
            }
        }
    }
    Ok(StratumReport {
        x: ga.x.clone(),
        r: r.clone(),
        samples: records,
        strata: by_label.into_values().collect(),
        counterexamples,
    })
}
