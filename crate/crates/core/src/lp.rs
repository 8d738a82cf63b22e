//! Exact rational simplex (two phases, Bland's rule).

use crate::exact::{fmt_rat, parse_rat, Rat};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Relation,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, rel: Relation, rhs: Rat) -> Self {
        Constraint { coeffs, rel, rhs }
    }

    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        let lhs: Rat = self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        match self.rel {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub variables: Vec<String>,
    /// Unrestricted sign per variable; the rest are nonnegative.
    pub free: Vec<bool>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<Rat>,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vec<Rat> },
    Unbounded,
    Infeasible,
}

impl LinearProgram {
    pub fn new(variables: &[&str], free: bool, direction: Direction) -> Self {
        LinearProgram {
            variables: variables.iter().map(|s| s.to_string()).collect(),
            free: vec![free; variables.len()],
            constraints: vec![],
            objective: vec![Rat::zero(); variables.len()],
            direction,
        }
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn add(&mut self, coeffs: Vec<Rat>, rel: Relation, rhs: Rat) {
        assert_eq!(coeffs.len(), self.nvars(), "constraint width");
        self.constraints.push(Constraint::new(coeffs, rel, rhs));
    }

    pub fn objective_value(&self, x: &[Rat]) -> Rat {
        self.objective.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn is_feasible(&self, x: &[Rat]) -> bool {
        x.len() == self.nvars()
            && self.free.iter().zip(x).all(|(f, v)| *f || !v.is_negative())
            && self.constraints.iter().all(|c| c.satisfied_by(x))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rel = |r: Relation| match r {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        serde_json::json!({
            "variables": self.variables,
            "free": self.free,
            "direction": match self.direction { Direction::Maximize => "max", Direction::Minimize => "min" },
            "objective": self.objective.iter().map(fmt_rat).collect::<Vec<_>>(),
            "constraints": self.constraints.iter().map(|c| serde_json::json!({
                "coeffs": c.coeffs.iter().map(fmt_rat).collect::<Vec<_>>(),
                "rel": rel(c.rel),
                "rhs": fmt_rat(&c.rhs),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |m: &str| Error::ConfigParse(format!("lp fixture: {m}"));
        let rats = |v: &serde_json::Value| -> Result<Vec<Rat>> {
            v.as_array()
                .ok_or_else(|| bad("expected array"))?
                .iter()
                .map(|x| parse_rat(x.as_str().ok_or_else(|| bad("expected string"))?))
                .collect()
        };
        let variables: Vec<String> = serde_json::from_value(v["variables"].clone()).map_err(|_| bad("variables"))?;
        let free: Vec<bool> = serde_json::from_value(v["free"].clone()).map_err(|_| bad("free"))?;
        let direction = match v["direction"].as_str() {
            Some("max") => Direction::Maximize,
            Some("min") => Direction::Minimize,
            _ => return Err(bad("direction")),
        };
        let objective = rats(&v["objective"])?;
        let mut constraints = vec![];
        for c in v["constraints"].as_array().ok_or_else(|| bad("constraints"))? {
            let rel = match c["rel"].as_str() {
                Some("<=") => Relation::Le,
                Some("=") => Relation::Eq,
                Some(">=") => Relation::Ge,
                _ => return Err(bad("rel")),
            };
            let rhs = parse_rat(c["rhs"].as_str().ok_or_else(|| bad("rhs"))?)?;
            constraints.push(Constraint::new(rats(&c["coeffs"])?, rel, rhs));
        }
        Ok(LinearProgram { variables, free, constraints, objective, direction })
    }
}

struct Tableau {
    a: Vec<Vec<Rat>>,
    b: Vec<Rat>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        for x in self.a[r].iter_mut() {
            *x /= &p;
        }
        self.b[r] /= &p;
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for j in 0..self.a[i].len() {
                let v = &f * &self.a[r][j];
                self.a[i][j] -= v;
            }
            let v = &f * &self.b[r];
            self.b[i] -= v;
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost . x` over the current basis; false when unbounded.
    fn optimize(&mut self, cost: &[Rat], allowed: usize) -> bool {
        loop {
            let m = self.a.len();
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: Rat = (0..m).map(|i| &cost[self.basis[i]] * &self.a[i][j]).sum();
                &cost[j] - z > Rat::zero()
            });
            let Some(c) = entering else { return true };
            let mut best: Option<(Rat, usize, usize)> = None;
            for i in 0..m {
                if self.a[i][c].is_positive() {
                    let ratio = &self.b[i] / &self.a[i][c];
                    let better = match &best {
                        None => true,
                        Some((br, _, bv)) => ratio < *br || (ratio == *br && self.basis[i] < *bv),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                None => return false,
                Some((_, r, _)) => self.pivot(r, c),
            }
        }
    }
}

pub fn solve(lp: &LinearProgram) -> LpOutcome {
    let nv = lp.nvars();
    // Columns: split variables, then slacks, then artificials.
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::new();
    let mut ncols = 0;
    for j in 0..nv {
        if lp.free[j] {
            col_of.push((ncols, Some(ncols + 1)));
            ncols += 2;
        } else {
            col_of.push((ncols, None));
            ncols += 1;
        }
    }
    let m = lp.constraints.len();
    let nslack = lp.constraints.iter().filter(|c| c.rel != Relation::Eq).count();
    let structural = ncols;
    let total_real = structural + nslack;
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = vec![usize::MAX; m];
    let mut slack = structural;
    let mut needs_art = vec![];
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![Rat::zero(); total_real];
        for j in 0..nv {
            let (p, n) = col_of[j];
            row[p] = c.coeffs[j].clone();
            if let Some(n) = n {
                row[n] = -c.coeffs[j].clone();
            }
        }
        let mut b = c.rhs.clone();
        let mut rel = c.rel;
        if rel != Relation::Eq {
            row[slack] = if rel == Relation::Le { Rat::one() } else { -Rat::one() };
            slack += 1;
        }
        if b.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            b = -b;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        if rel == Relation::Le {
            basis[i] = slack - 1;
        } else {
            needs_art.push(i);
        }
        rows.push(row);
        rhs.push(b);
    }
    let nart = needs_art.len();
    for row in rows.iter_mut() {
        row.resize(total_real + nart, Rat::zero());
    }
    for (k, &i) in needs_art.iter().enumerate() {
        rows[i][total_real + k] = Rat::one();
        basis[i] = total_real + k;
    }
    let mut t = Tableau { a: rows, b: rhs, basis };
    if nart > 0 {
        let mut cost = vec![Rat::zero(); total_real + nart];
        for k in 0..nart {
            cost[total_real + k] = -Rat::one();
        }
        t.optimize(&cost, total_real + nart);
        let infeas: Rat = (0..m).filter(|&i| t.basis[i] >= total_real).map(|i| t.b[i].clone()).sum();
        if infeas.is_positive() {
            return LpOutcome::Infeasible;
        }
        // Drive remaining artificials out, dropping redundant rows.
        let mut i = 0;
        while i < t.a.len() {
            if t.basis[i] >= total_real {
                match (0..total_real).find(|&j| !t.a[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.a.remove(i);
                        t.b.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
    let sign = if lp.direction == Direction::Maximize { Rat::one() } else { -Rat::one() };
    let mut cost = vec![Rat::zero(); total_real + nart];
    for j in 0..nv {
        let (p, n) = col_of[j];
        cost[p] = &sign * &lp.objective[j];
        if let Some(n) = n {
            cost[n] = -(&sign * &lp.objective[j]);
        }
    }
    if !t.optimize(&cost, total_real) {
        return LpOutcome::Unbounded;
    }
    let mut colval = vec![Rat::zero(); total_real + nart];
    for (i, &bv) in t.basis.iter().enumerate() {
        colval[bv] = t.b[i].clone();
    }
    let point: Vec<Rat> = (0..nv)
        .map(|j| {
            let (p, n) = col_of[j];
            match n {
                Some(n) => &colval[p] - &colval[n],
                None => colval[p].clone(),
            }
        })
        .collect();
    let value = lp.objective_value(&point);
    LpOutcome::Optimal { value, point }
}

/// The dual program of `lp` (after turning a minimisation into a maximisation).
pub fn dual_program(lp: &LinearProgram) -> LinearProgram {
    let sign = if lp.direction == Direction::Maximize { Rat::one() } else { -Rat::one() };
    let m = lp.constraints.len();
    let names: Vec<String> = (0..m).map(|k| format!("y{k}")).collect();
    let mut d = LinearProgram {
        variables: names,
        free: lp.constraints.iter().map(|c| c.rel != Relation::Le).collect(),
        constraints: vec![],
        objective: lp.constraints.iter().map(|c| c.rhs.clone()).collect(),
        direction: Direction::Minimize,
    };
    for j in 0..lp.nvars() {
        let coeffs: Vec<Rat> = lp.constraints.iter().map(|c| c.coeffs[j].clone()).collect();
        let rel = if lp.free[j] { Relation::Eq } else { Relation::Ge };
        d.constraints.push(Constraint::new(coeffs, rel, &sign * &lp.objective[j]));
    }
    for (k, c) in lp.constraints.iter().enumerate() {
        if c.rel == Relation::Ge {
            let mut coeffs = vec![Rat::zero(); m];
            coeffs[k] = Rat::one();
            d.constraints.push(Constraint::new(coeffs, Relation::Le, Rat::zero()));
        }
    }
    d
}

/// A dual-feasible vector whose value equals the primal optimum, if the primal is bounded and feasible.
pub fn dual_certificate(lp: &LinearProgram) -> Option<Vec<Rat>> {
    let LpOutcome::Optimal { value, .. } = solve(lp) else { return None };
    let d = dual_program(lp);
    match solve(&d) {
        LpOutcome::Optimal { value: dv, point } => {
            let primal = if lp.direction == Direction::Maximize { value } else { -value };
            (dv == primal && d.is_feasible(&point)).then_some(point)
        }
        _ => None,
    }
}

/// Half-space `<alpha, y> + level >= s` coming from an affine root.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffineHalfspace {
    pub alpha: Vec<i64>,
    pub level: Rat,
}

impl AffineHalfspace {
    pub fn value(&self, y: &[Rat]) -> Rat {
        let mut v = self.level.clone();
        for (a, c) in self.alpha.iter().zip(y) {
            v += Rat::from_integer((*a).into()) * c;
        }
        v
    }
}

/// Keeps, for each weight, only the constraint with the smallest level.
pub fn reduce_halfspaces(cs: &[AffineHalfspace]) -> Vec<AffineHalfspace> {
    let mut best: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
    for c in cs {
        best.entry(c.alpha.clone())
            .and_modify(|l| {
                if c.level < *l {
                    *l = c.level.clone();
                }
            })
            .or_insert_with(|| c.level.clone());
    }
    best.into_iter().map(|(alpha, level)| AffineHalfspace { alpha, level }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rint};

    #[test]
    fn deepening_shape() {
        // max s s.t. y >= s, -y >= s.
        let mut lp = LinearProgram::new(&["y", "s"], true, Direction::Maximize);
        lp.objective = vec![rint(0), rint(1)];
        lp.add(vec![rint(1), rint(-1)], Relation::Ge, rint(0));
        lp.add(vec![rint(-1), rint(-1)], Relation::Ge, rint(0));
        assert_eq!(solve(&lp), LpOutcome::Optimal { value: rint(0), point: vec![rint(0), rint(0)] });
    }

    #[test]
    fn single_bound_and_unbounded() {
        let mut lp = LinearProgram::new(&["s"], true, Direction::Maximize);
        lp.objective = vec![rint(1)];
        assert_eq!(solve(&lp), LpOutcome::Unbounded);
        lp.add(vec![rint(1)], Relation::Le, rat(1, 2));
        assert_eq!(solve(&lp), LpOutcome::Optimal { value: rat(1, 2), point: vec![rat(1, 2)] });
    }

    #[test]
    fn infeasible() {
        let mut lp = LinearProgram::new(&["x"], false, Direction::Minimize);
        lp.objective = vec![rint(1)];
        lp.add(vec![rint(1)], Relation::Le, rint(-1));
        assert_eq!(solve(&lp), LpOutcome::Infeasible);
    }

    #[test]
    fn reduction_keeps_minimal_levels() {
        let hs = vec![
            AffineHalfspace { alpha: vec![1], level: rint(0) },
            AffineHalfspace { alpha: vec![1], level: rint(1) },
            AffineHalfspace { alpha: vec![-1], level: rint(0) },
            AffineHalfspace { alpha: vec![0], level: rint(0) },
            AffineHalfspace { alpha: vec![0], level: rint(1) },
        ];
        assert_eq!(reduce_halfspaces(&hs).len(), 3);
    }
}
