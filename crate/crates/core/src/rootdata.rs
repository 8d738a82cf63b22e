//! Root systems with Chevalley bases.
//!
//! Structure constants follow the extraspecial-pair convention: positive
//! roots are ordered by height and then by coordinates (the first simple root
//! is smallest); for every non-simple positive root `xi` the extraspecial pair
//! `(a, xi - a)` uses the smallest simple root `a` that works, and gets
//! `N = p + 1 > 0`. All other constants follow from the usual identities,
//! with `N(-a,-b) = -N(a,b)` and `[e_a, e_-a] = h_a`.

use crate::exact::{Rat, Scalar};
use crate::linalg::{Matrix, Vector};
use crate::{Error, Result};
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub const DEFAULT_RANK_CAP: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CartanType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl CartanType {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "A" => CartanType::A,
            "B" => CartanType::B,
            "C" => CartanType::C,
            "D" => CartanType::D,
            "E" => CartanType::E,
            "F" => CartanType::F,
            "G" => CartanType::G,
            other => return Err(Error::UnsupportedType(other.to_string())),
        })
    }

    pub fn is_classical(self) -> bool {
        matches!(self, CartanType::A | CartanType::B | CartanType::C | CartanType::D)
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

/// Degrees of the basic invariants of a simple type.
pub fn invariant_degrees(t: CartanType, rank: usize) -> Vec<usize> {
    match t {
        CartanType::A => (2..=rank + 1).collect(),
        CartanType::B | CartanType::C => (1..=rank).map(|k| 2 * k).collect(),
        CartanType::D => {
            let mut d: Vec<usize> = (1..rank).map(|k| 2 * k).collect();
            d.push(rank);
            d.sort();
            d
        }
        CartanType::E => match rank {
            6 => vec![2, 5, 6, 8, 9, 12],
            7 => vec![2, 6, 8, 10, 12, 14, 18],
            _ => vec![2, 8, 12, 14, 18, 20, 24, 30],
        },
        CartanType::F => vec![2, 6, 8, 12],
        CartanType::G => vec![2, 6],
    }
}

/// Symmetric Gram matrix (a_i, a_j) of the simple roots, Bourbaki labelling.
fn gram_matrix(t: CartanType, rank: usize) -> Result<Vec<Vec<i64>>> {
    let unsupported = || Error::UnsupportedType(format!("{t}{rank}"));
    let mut g = vec![vec![0i64; rank]; rank];
    let edge = |g: &mut Vec<Vec<i64>>, i: usize, j: usize, v: i64| {
        g[i][j] = v;
        g[j][i] = v;
    };
    match t {
        CartanType::A => {
            if rank < 1 {
                return Err(unsupported());
            }
            for i in 0..rank {
                g[i][i] = 2;
            }
            for i in 1..rank {
                edge(&mut g, i - 1, i, -1);
            }
        }
        CartanType::B => {
            if rank < 2 {
                return Err(unsupported());
            }
            for i in 0..rank {
                g[i][i] = if i + 1 == rank { 2 } else { 4 };
            }
            for i in 1..rank {
                edge(&mut g, i - 1, i, -2);
            }
        }
        CartanType::C => {
            if rank < 2 {
                return Err(unsupported());
            }
            for i in 0..rank {
                g[i][i] = if i + 1 == rank { 4 } else { 2 };
            }
            for i in 1..rank {
                edge(&mut g, i - 1, i, if i + 1 == rank { -2 } else { -1 });
            }
        }
        CartanType::D => {
            if rank < 4 {
                return Err(unsupported());
            }
            for i in 0..rank {
                g[i][i] = 2;
            }
            for i in 1..rank - 1 {
                edge(&mut g, i - 1, i, -1);
            }
            edge(&mut g, rank - 3, rank - 1, -1);
        }
        CartanType::E => {
            if !(6..=8).contains(&rank) {
                return Err(unsupported());
            }
            for i in 0..rank {
                g[i][i] = 2;
            }
            edge(&mut g, 0, 2, -1);
            edge(&mut g, 1, 3, -1);
            for i in 3..rank {
                edge(&mut g, i - 1, i, -1);
            }
        }
        CartanType::F => {
            if rank != 4 {
                return Err(unsupported());
            }
            g[0][0] = 4;
            g[1][1] = 4;
            g[2][2] = 2;
            g[3][3] = 2;
            edge(&mut g, 0, 1, -2);
            edge(&mut g, 1, 2, -2);
            edge(&mut g, 2, 3, -1);
        }
        CartanType::G => {
            if rank != 2 {
                return Err(unsupported());
            }
            g[0][0] = 2;
            g[1][1] = 6;
            edge(&mut g, 0, 1, -3);
        }
    }
    Ok(g)
}

/// Finite root system with a Chevalley basis.
///
/// Basis indices: `0..roots.len()` are the root vectors `e_a` (positive roots
/// first, then their negatives in the same order), followed by the simple
/// coroots `h_1..h_rank`.
#[derive(Clone, Debug)]
pub struct RootDatum {
    pub cartan_type: CartanType,
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    /// `cartan_matrix[i][j] = <a_j, a_i^vee>`.
    pub cartan_matrix: Vec<Vec<i64>>,
    pub roots: Vec<Vec<i64>>,
    /// Coroot of each root in simple-coroot coordinates.
    pub coroots: Vec<Vec<i64>>,
    pub chevalley_constants: BTreeMap<(usize, usize), i64>,
    index: HashMap<Vec<i64>, usize>,
    table: Vec<Vec<Vec<(usize, i64)>>>,
}

pub fn build_root_datum(t: CartanType, rank: usize) -> Result<RootDatum> {
    build_root_datum_capped(t, rank, DEFAULT_RANK_CAP)
}

pub fn build_root_datum_capped(t: CartanType, rank: usize, cap: usize) -> Result<RootDatum> {
    if rank > cap {
        return Err(Error::UnsupportedType(format!("{t}{rank} exceeds rank cap {cap}")));
    }
    let gram = gram_matrix(t, rank)?;
    let cartan_matrix: Vec<Vec<i64>> = (0..rank)
        .map(|i| (0..rank).map(|j| 2 * gram[i][j] / gram[i][i]).collect())
        .collect();
    let pos = positive_roots(&cartan_matrix);
    let mut roots = pos.clone();
    roots.extend(pos.iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()));
    let index: HashMap<Vec<i64>, usize> =
        roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
    let mut d = RootDatum {
        cartan_type: t,
        rank,
        gram,
        cartan_matrix,
        roots,
        coroots: vec![],
        chevalley_constants: BTreeMap::new(),
        index,
        table: vec![],
    };
    d.coroots = d.roots.iter().map(|r| d.coroot_of(r)).collect();
    let mut memo = HashMap::new();
    let nr = d.roots.len();
    for a in 0..nr {
        for b in 0..nr {
            if d.sum_index(a, b).is_some() {
                let v = d.structure_constant(a, b, &mut memo);
                d.chevalley_constants.insert((a, b), v);
            }
        }
    }
    d.table = d.build_table();
    Ok(d)
}

fn positive_roots(cm: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rank = cm.len();
    let simple: Vec<Vec<i64>> = (0..rank)
        .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut all: Vec<Vec<i64>> = simple.clone();
    let mut known: std::collections::HashSet<Vec<i64>> = simple.iter().cloned().collect();
    let mut layer = simple;
    while !layer.is_empty() {
        let mut next = Vec::new();
        for b in &layer {
            for i in 0..rank {
                let mut q = 0;
                loop {
                    let mut c = b.clone();
                    c[i] -= q + 1;
                    if known.contains(&c) {
                        q += 1;
                    } else {
                        break;
                    }
                }
                let pairing: i64 = (0..rank).map(|j| b[j] * cm[i][j]).sum();
                if q - pairing > 0 {
                    let mut c = b.clone();
                    c[i] += 1;
                    if known.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all.sort_by(|a, b| {
        let ha: i64 = a.iter().sum();
        let hb: i64 = b.iter().sum();
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
    all
}

impl RootDatum {
    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.roots.len() + self.rank
    }

    pub fn h_index(&self, i: usize) -> usize {
        self.roots.len() + i
    }

    pub fn root_index(&self, r: &[i64]) -> Option<usize> {
        self.index.get(r).copied()
    }

    pub fn simple_index(&self, i: usize) -> usize {
        let mut v = vec![0; self.rank];
        v[i] = 1;
        self.index[&v]
    }

    pub fn neg_index(&self, a: usize) -> usize {
        let np = self.num_positive();
        if a < np {
            a + np
        } else {
            a - np
        }
    }

    pub fn is_positive(&self, a: usize) -> bool {
        a < self.num_positive()
    }

    pub fn height(&self, a: usize) -> i64 {
        self.roots[a].iter().sum()
    }

    pub fn form(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += a[i] * self.gram[i][j] * b[j];
            }
        }
        s
    }

    /// `<b, a_i^vee>`.
    pub fn pairing(&self, b: &[i64], i: usize) -> i64 {
        (0..self.rank).map(|j| b[j] * self.cartan_matrix[i][j]).sum()
    }

    fn coroot_of(&self, r: &[i64]) -> Vec<i64> {
        let len = self.form(r, r);
        (0..self.rank).map(|i| r[i] * self.gram[i][i] / len).collect()
    }

    fn sum_index(&self, a: usize, b: usize) -> Option<usize> {
        let s: Vec<i64> = self.roots[a].iter().zip(&self.roots[b]).map(|(x, y)| x + y).collect();
        self.root_index(&s)
    }

    fn diff_root(&self, a: usize, b: usize) -> Option<usize> {
        let s: Vec<i64> = self.roots[a].iter().zip(&self.roots[b]).map(|(x, y)| x - y).collect();
        self.root_index(&s)
    }

    /// Largest p with `b - p a` a root.
    fn string_down(&self, a: usize, b: usize) -> i64 {
        let mut p = 0;
        loop {
            let c: Vec<i64> = self.roots[b]
                .iter()
                .zip(&self.roots[a])
                .map(|(y, x)| y - (p + 1) * x)
                .collect();
            if self.index.contains_key(&c) {
                p += 1;
            } else {
                return p;
            }
        }
    }

    /// Extraspecial pair of a positive non-simple root.
    fn extraspecial(&self, r: usize) -> (usize, usize) {
        for a in 0..self.num_positive() {
            if let Some(b) = self.diff_root(r, a) {
                if self.is_positive(b) {
                    return (a, b);
                }
            }
        }
        unreachable!("non-simple positive root has a decomposition")
    }

    fn len2(&self, a: usize) -> Rat {
        Rat::from_integer(self.form(&self.roots[a], &self.roots[a]).into())
    }

    fn structure_constant(&self, a: usize, b: usize, memo: &mut HashMap<(usize, usize), i64>) -> i64 {
        if let Some(&v) = memo.get(&(a, b)) {
            return v;
        }
        let (pa, pb) = (self.is_positive(a), self.is_positive(b));
        let v = if pa && pb {
            if a > b {
                -self.structure_constant(b, a, memo)
            } else {
                let r = self.sum_index(a, b).expect("sum is a root");
                let (x, y) = self.extraspecial(r);
                if (a, b) == (x, y) {
                    self.string_down(a, b) + 1
                } else {
                    self.four_term(a, b, x, y, memo)
                }
            }
        } else if !pa && !pb {
            -self.structure_constant(self.neg_index(a), self.neg_index(b), memo)
        } else {
            let s = self.sum_index(a, b).expect("sum is a root");
            let c = self.neg_index(s);
            let lc = self.len2(c);
            let val = if self.is_positive(b) == self.is_positive(c) {
                lc / self.len2(a) * Rat::from_integer(self.structure_constant(b, c, memo).into())
            } else {
                lc / self.len2(b) * Rat::from_integer(self.structure_constant(c, a, memo).into())
            };
            assert!(val.is_integer(), "structure constant must be integral");
            i64::try_from(val.to_integer()).expect("small constant")
        };
        memo.insert((a, b), v);
        v
    }

    fn four_term(&self, xi: usize, eta: usize, xp: usize, ep: usize, memo: &mut HashMap<(usize, usize), i64>) -> i64 {
        let rho = self.sum_index(xi, eta).unwrap();
        let mut acc = Rat::zero();
        if let Some(d) = self.diff_root(eta, xp) {
            let n1 = self.structure_constant(eta, self.neg_index(xp), memo);
            let n2 = self.structure_constant(xi, self.neg_index(ep), memo);
            acc += Rat::from_integer((n1 * n2).into()) / self.len2(d);
        }
        if let Some(d) = self.diff_root(xi, xp) {
            let n1 = self.structure_constant(self.neg_index(xp), xi, memo);
            let n2 = self.structure_constant(eta, self.neg_index(ep), memo);
            acc += Rat::from_integer((n1 * n2).into()) / self.len2(d);
        }
        let nx = self.structure_constant(xp, ep, memo);
        let v = self.len2(rho) / Rat::from_integer(nx.into()) * acc;
        assert!(v.is_integer(), "structure constant must be integral");
        i64::try_from(v.to_integer()).expect("small constant")
    }

    fn build_table(&self) -> Vec<Vec<Vec<(usize, i64)>>> {
        let dim = self.dim();
        let nr = self.num_roots();
        let mut t = vec![vec![vec![]; dim]; dim];
        for a in 0..dim {
            for b in 0..dim {
                t[a][b] = match (a < nr, b < nr) {
                    (true, true) => {
                        if let Some(c) = self.sum_index(a, b) {
                            vec![(c, self.chevalley_constants[&(a, b)])]
                        } else if self.neg_index(a) == b {
                            self.coroots[a]
                                .iter()
                                .enumerate()
                                .filter(|(_, &c)| c != 0)
                                .map(|(i, &c)| (nr + i, c))
                                .collect()
                        } else {
                            vec![]
                        }
                    }
                    (false, true) => {
                        let p = self.pairing(&self.roots[b], a - nr);
                        if p == 0 { vec![] } else { vec![(b, p)] }
                    }
                    (true, false) => {
                        let p = self.pairing(&self.roots[a], b - nr);
                        if p == 0 { vec![] } else { vec![(a, -p)] }
                    }
                    (false, false) => vec![],
                };
            }
        }
        t
    }

    /// Integer bracket of two basis vectors, as a sparse list.
    pub fn basis_bracket(&self, a: usize, b: usize) -> &[(usize, i64)] {
        &self.table[a][b]
    }

    pub fn bracket(&self, a: &LieElement, b: &LieElement) -> LieElement {
        let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, x) in &a.coeffs {
            for (j, y) in &b.coeffs {
                let entries = &self.table[*i][*j];
                if entries.is_empty() {
                    continue;
                }
                let xy = x * y;
                for &(k, c) in entries {
                    let v = xy.scale(&Rat::from_integer(c.into()));
                    *out.entry(k).or_insert_with(Scalar::zero) += &v;
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        LieElement { coeffs: out }
    }

    /// Matrix of `ad a` in the Chevalley basis.
    pub fn ad_matrix(&self, a: &LieElement) -> Matrix {
        let dim = self.dim();
        let cols: Vec<Vector> =
            (0..dim).map(|j| self.bracket(a, &LieElement::basis(j)).to_dense(dim)).collect();
        Matrix::from_cols(dim, &cols)
    }

    pub fn label(&self, i: usize) -> String {
        if i < self.num_roots() {
            let parts: Vec<String> = self.roots[i].iter().map(|x| x.to_string()).collect();
            format!("e[{}]", parts.join(","))
        } else {
            format!("h{}", i - self.num_roots() + 1)
        }
    }

    pub fn render(&self, x: &LieElement) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = x
            .coeffs
            .iter()
            .map(|(i, c)| if c.is_one() { self.label(*i) } else { format!("{}*{}", c, self.label(*i)) })
            .collect();
        parts.join(" + ")
    }

    /// Structured text document used for golden files.
    pub fn to_text(&self) -> String {
        let mut s = format!("type {}\nrank {}\ndim {}\ncartan\n", self.cartan_type, self.rank, self.dim());
        for row in &self.cartan_matrix {
            let r: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("  {}\n", r.join(" ")));
        }
        s.push_str("roots\n");
        for i in 0..self.roots.len() {
            s.push_str(&format!("  {} coroot {:?}\n", self.label(i), self.coroots[i]));
        }
        s.push_str("constants\n");
        for ((a, b), n) in &self.chevalley_constants {
            if self.is_positive(*a) && self.is_positive(*b) && a < b {
                s.push_str(&format!("  {} {} {}\n", self.label(*a), self.label(*b), n));
            }
        }
        s
    }
}

/// Finitely supported vector in the Chevalley basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LieElement {
    coeffs: BTreeMap<usize, Scalar>,
}

impl LieElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(i: usize) -> Self {
        Self::term(i, Scalar::one())
    }

    pub fn term(i: usize, c: Scalar) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(i, c);
        }
        LieElement { coeffs }
    }

    pub fn from_dense(v: &[Scalar]) -> Self {
        LieElement {
            coeffs: v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect(),
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vector {
        let mut v = vec![Scalar::zero(); dim];
        for (i, c) in &self.coeffs {
            v[*i] = c.clone();
        }
        v
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.coeffs.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &LieElement) -> LieElement {
        let mut out = self.coeffs.clone();
        for (i, c) in &o.coeffs {
            *out.entry(*i).or_insert_with(Scalar::zero) += c;
        }
        out.retain(|_, v| !v.is_zero());
        LieElement { coeffs: out }
    }

    pub fn sub(&self, o: &LieElement) -> LieElement {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> LieElement {
        if c.is_zero() {
            return LieElement::zero();
        }
        LieElement { coeffs: self.coeffs.iter().map(|(i, x)| (*i, x * c)).collect() }
    }
}

/// A pinned diagram automorphism and its action on the Chevalley basis.
#[derive(Clone, Debug)]
pub struct PinnedAutomorphism {
    pub order: usize,
    pub node_permutation: Vec<usize>,
    /// Basis index -> (image index, sign).
    pub images: Vec<(usize, i64)>,
}

impl PinnedAutomorphism {
    pub fn apply(&self, x: &LieElement) -> LieElement {
        let mut out = LieElement::zero();
        for (i, c) in x.iter() {
            let (j, s) = self.images[*i];
            out = out.add(&LieElement::term(j, c.scale(&Rat::from_integer(s.into()))));
        }
        out
    }

    pub fn action_matrix(&self) -> Matrix {
        let n = self.images.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &(j, s)) in self.images.iter().enumerate() {
            m.set(j, i, Scalar::int(s));
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        self.order == 1
    }
}

/// Resolves a symmetry name ("id", "swap", "triality") or an explicit
/// comma-separated permutation of 1-based nodes.
pub fn diagram_symmetry(datum: &RootDatum, name: &str) -> Result<Vec<usize>> {
    let n = datum.rank;
    let id: Vec<usize> = (0..n).collect();
    let bad = || Error::NotADiagramSymmetry(format!("{name} on {}{}", datum.cartan_type, n));
    match name.trim() {
        "" | "id" | "identity" => Ok(id),
        "swap" => match datum.cartan_type {
            CartanType::A => Ok((0..n).rev().collect()),
            CartanType::D => {
                let mut p = id;
                p.swap(n - 2, n - 1);
                Ok(p)
            }
            CartanType::E if n == 6 => Ok(vec![5, 1, 4, 3, 2, 0]),
            _ => Err(bad()),
        },
        "triality" => {
            if datum.cartan_type == CartanType::D && n == 4 {
                Ok(vec![2, 1, 3, 0])
            } else {
                Err(bad())
            }
        }
        other => {
            let p: std::result::Result<Vec<usize>, _> =
                other.split(',').map(|s| s.trim().parse::<usize>().map(|k| k.wrapping_sub(1))).collect();
            p.map_err(|_| bad())
        }
    }
}

pub fn pinned_automorphism(datum: &RootDatum, perm: &[usize]) -> Result<PinnedAutomorphism> {
    let n = datum.rank;
    let err = || Error::NotADiagramSymmetry(format!("{perm:?}"));
    if perm.len() != n {
        return Err(err());
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(err());
        }
        seen[p] = true;
    }
    for i in 0..n {
        for j in 0..n {
            if datum.cartan_matrix[perm[i]][perm[j]] != datum.cartan_matrix[i][j] {
                return Err(err());
            }
        }
    }
    let mut order = 1;
    let mut cur: Vec<usize> = perm.to_vec();
    while cur.iter().enumerate().any(|(i, &p)| p != i) {
        cur = cur.iter().map(|&p| perm[p]).collect();
        order += 1;
    }
    let permute = |r: &[i64]| {
        let mut out = vec![0; n];
        for i in 0..n {
            out[perm[i]] = r[i];
        }
        out
    };
    let np = datum.num_positive();
    let mut images = vec![(0usize, 0i64); datum.dim()];
    for a in 0..np {
        let target = datum.root_index(&permute(&datum.roots[a])).ok_or_else(err)?;
        let sign = if datum.height(a) == 1 {
            1
        } else {
            let (x, y) = datum.extraspecial(a);
            let (px, py) = (images[x].0, images[y].0);
            let num = datum.chevalley_constants[&(px, py)] * images[y].1;
            let den = datum.chevalley_constants[&(x, y)];
            num / den
        };
        images[a] = (target, sign);
        images[datum.neg_index(a)] = (datum.neg_index(target), sign);
    }
    for i in 0..n {
        images[datum.h_index(i)] = (datum.h_index(perm[i]), 1);
    }
    Ok(PinnedAutomorphism { order, node_permutation: perm.to_vec(), images })
}

/// Principal sl2-triple `(e, h, f)`.
pub fn principal_sl2(datum: &RootDatum) -> (LieElement, LieElement, LieElement) {
    let mut e = LieElement::zero();
    for i in 0..datum.rank {
        e = e.add(&LieElement::basis(datum.simple_index(i)));
    }
    let mut hc = vec![0i64; datum.rank];
    for a in 0..datum.num_positive() {
        for (i, c) in datum.coroots[a].iter().enumerate() {
            hc[i] += c;
        }
    }
    let mut h = LieElement::zero();
    let mut f = LieElement::zero();
    for i in 0..datum.rank {
        h = h.add(&LieElement::term(datum.h_index(i), Scalar::int(hc[i])));
        // [e_{a_i}, e_{-a_i}] = h_i and distinct simple brackets vanish.
        f = f.add(&LieElement::term(datum.neg_index(datum.simple_index(i)), Scalar::int(hc[i])));
    }
    (e, h, f)
}

/// Dimension of the fixed subalgebra of an automorphism.
pub fn fixed_dimension(sigma: &PinnedAutomorphism) -> usize {
    let m = sigma.action_matrix();
    m.sub(&Matrix::identity(m.rows)).kernel().len()
}
