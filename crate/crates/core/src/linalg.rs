//! Dense exact linear algebra over [`Scalar`] and univariate polynomials.

use crate::exact::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

pub type Vector = Vec<Scalar>;

pub fn zero_vec(n: usize) -> Vector {
    vec![Scalar::zero(); n]
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(|c| c.is_zero())
}

pub fn vec_add(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Scalar], c: &Scalar) -> Vector {
    a.iter().map(|x| x * c).collect()
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vector]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned());
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_cols(rows: usize, cols: &[Vector]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut s = Scalar::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        s += &(a * x);
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: vec_add(&self.data, &o.data) }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: vec_sub(&self.data, &o.data) }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: vec_scale(&self.data, c) }
    }

    pub fn trace(&self) -> Scalar {
        let mut s = Scalar::zero();
        for i in 0..self.rows.min(self.cols) {
            s += self.get(i, i);
        }
        s
    }

    /// Flattened entries, row-major.
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let rj = m.get(r, j);
                    if rj.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &(&f * rj);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = zero_vec(self.cols);
            v[free] = Scalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, free);
            }
            out.push(v);
        }
        out
    }

    /// Some solution of `self * x = b`, if one exists.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vector> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = zero_vec(self.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    /// Minimal polynomial, as the lcm of the local minimal polynomials of basis vectors.
    pub fn minimal_polynomial(&self) -> Poly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = Poly::one();
        for j in 0..n {
            let mut e = zero_vec(n);
            e[j] = Scalar::one();
            if is_zero_vec(&m.eval_on_vector(self, &e)) {
                continue;
            }
            let local = krylov_min_poly(self, &e);
            m = m.lcm(&local);
        }
        m
    }
}

/// Monic polynomial of least degree annihilating `v` under `a`.
fn krylov_min_poly(a: &Matrix, v: &[Scalar]) -> Poly {
    // Incremental elimination; each reduced vector carries its expression in powers.
    let n = v.len();
    let mut basis: Vec<(usize, Vector, Vector)> = Vec::new(); // (pivot, reduced, combo)
    let mut cur = v.to_vec();
    for k in 0..=n {
        let mut red = cur.clone();
        let mut combo = zero_vec(k + 1);
        combo[k] = Scalar::one();
        for (p, b, bc) in &basis {
            let f = red[*p].clone();
            if f.is_zero() {
                continue;
            }
            red = vec_sub(&red, &vec_scale(b, &f));
            for (i, c) in bc.iter().enumerate() {
                combo[i] -= &(&f * c);
            }
        }
        match red.iter().position(|x| !x.is_zero()) {
            None => return Poly::new(combo),
            Some(p) => {
                let inv = red[p].inv().expect("nonzero pivot");
                basis.push((p, vec_scale(&red, &inv), vec_scale(&combo, &inv)));
            }
        }
        cur = a.apply(&cur);
    }
    unreachable!("Krylov sequence must become dependent")
}

/// Dense polynomial over Scalar, low degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<Scalar>);

impl Poly {
    pub fn new(mut c: Vec<Scalar>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn one() -> Self {
        Poly(vec![Scalar::one()])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn monic(&self) -> Poly {
        match self.0.last() {
            None => self.clone(),
            Some(l) => {
                let inv = l.inv().expect("nonzero leading coefficient");
                Poly(vec_scale(&self.0, &inv))
            }
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly(vec![]);
        }
        let mut out = zero_vec(self.0.len() + o.0.len() - 1);
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(out)
    }

    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = d.0[dd].inv().expect("nonzero leading coefficient");
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly(vec![]), self.clone());
        }
        let mut q = zero_vec(r.len() - dd);
        while r.len() > dd {
            let k = r.len() - 1 - dd;
            let c = &r[r.len() - 1] * &inv;
            if !c.is_zero() {
                for (j, x) in d.0.iter().enumerate() {
                    r[k + j] -= &(&c * x);
                }
            }
            q[k] = c;
            r.pop();
        }
        (Poly::new(q), Poly::new(r))
    }

    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn lcm(&self, o: &Poly) -> Poly {
        let g = self.gcd(o);
        self.mul(o).divrem(&g).0.monic()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0.iter().enumerate().skip(1).map(|(k, c)| c * &Scalar::int(k as i64)).collect(),
        )
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    pub fn eval_matrix(&self, a: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows, a.cols);
        for c in self.0.iter().rev() {
            out = out.mul(a).add(&Matrix::identity(a.rows).scale(c));
        }
        out
    }

    pub fn eval_on_vector(&self, a: &Matrix, v: &[Scalar]) -> Vector {
        let mut out = zero_vec(v.len());
        for c in self.0.iter().rev() {
            out = vec_add(&a.apply(&out), &vec_scale(v, c));
        }
        out
    }
}

/// Whether every vector of `vs` lies in the span of `basis`.
pub fn span_contains(basis: &[Vector], vs: &[Vector], dim: usize) -> bool {
    let r0 = Matrix::from_cols(dim, basis).rank();
    let mut all = basis.to_vec();
    all.extend(vs.iter().cloned());
    Matrix::from_cols(dim, &all).rank() == r0
}

pub fn span_rank(vs: &[Vector], dim: usize) -> usize {
    if vs.is_empty() {
        return 0;
    }
    Matrix::from_cols(dim, vs).rank()
}

pub fn span_equal(a: &[Vector], b: &[Vector], dim: usize) -> bool {
    let ra = span_rank(a, dim);
    ra == span_rank(b, dim) && span_contains(a, b, dim)
}

/// A basis extracted from the columns (pivot columns of the rref).
pub fn independent_subset(vs: &[Vector], dim: usize) -> Vec<Vector> {
    if vs.is_empty() {
        return vec![];
    }
    let (_, piv) = Matrix::from_cols(dim, vs).rref();
    piv.into_iter().map(|j| vs[j].clone()).collect()
}

/// Basis of the intersection of two subspaces.
pub fn intersect(a: &[Vector], b: &[Vector], dim: usize) -> Vec<Vector> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let a = independent_subset(a, dim);
    let b = independent_subset(b, dim);
    let mut cols = a.clone();
    cols.extend(b.iter().map(|v| v.iter().map(|x| -x).collect()));
    let ker = Matrix::from_cols(dim, &cols).kernel();
    let out: Vec<Vector> = ker
        .iter()
        .map(|k| {
            let mut v = zero_vec(dim);
            for (i, av) in a.iter().enumerate() {
                if !k[i].is_zero() {
                    v = vec_add(&v, &vec_scale(av, &k[i]));
                }
            }
            v
        })
        .collect();
    independent_subset(&out, dim)
}
