//! Linear inequality systems `a·x ≤ b` over named rate variables.
//!
//! Elimination is numeric: constants are plain `f64` values. After each
//! Fourier–Motzkin step rows are scaled to unit max-norm, exact duplicates
//! keep their tightest bound, and trivially satisfied rows are dropped.

use std::fmt;

use crate::{Error, Result};

/// Coefficients below this are structural zeros.
pub const COEFF_TOL: f64 = 1e-12;
/// Feasibility slack used when filtering candidate vertices.
pub const VERTEX_TOL: f64 = 1e-9;
/// Candidate vertices closer than this (max-norm) are merged.
pub const DEDUP_TOL: f64 = 1e-7;
/// Largest dimension accepted by vertex enumeration.
pub const MAX_VERTEX_DIM: usize = 4;

/// One row `coeffs · x ≤ bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInequality {
    pub coeffs: Vec<f64>,
    pub bound: f64,
    pub label: String,
}

impl LinearInequality {
    /// All coefficients vanish, so the row reads `0 ≤ bound`.
    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(|c| c.abs() <= COEFF_TOL)
    }

    /// A lone negative coefficient with bound zero: `x_j ≥ 0`.
    pub fn is_nonnegativity(&self) -> bool {
        self.bound.abs() <= COEFF_TOL
            && self.coeffs.iter().filter(|c| c.abs() > COEFF_TOL).count() == 1
            && self.coeffs.iter().any(|&c| c < -COEFF_TOL)
    }

    /// `bound − coeffs · point`.
    pub fn margin(&self, point: &[f64]) -> f64 {
        self.bound - self.coeffs.iter().zip(point).map(|(c, x)| c * x).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex(pub Vec<f64>);

/// Result of a membership query.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    /// `min_margin > eps`.
    pub inside: bool,
    /// Smallest row margin; `+∞` for a system without rows.
    pub min_margin: f64,
    /// Index of the row attaining the minimum.
    pub binding: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalitySystem {
    variables: Vec<String>,
    rows: Vec<LinearInequality>,
}

impl InequalitySystem {
    pub fn new<S: AsRef<str>>(variables: &[S]) -> Self {
        Self { variables: variables.iter().map(|v| v.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn rows(&self) -> &[LinearInequality] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    fn dense(&self, terms: &[(&str, f64)]) -> Result<Vec<f64>> {
        let mut coeffs = vec![0.0; self.dim()];
        for &(v, c) in terms {
            coeffs[self.var_index(v)?] += c;
        }
        Ok(coeffs)
    }

    /// Adds `Σ c·v ≤ bound`.
    pub fn add_le(&mut self, terms: &[(&str, f64)], bound: f64, label: impl Into<String>) -> Result<()> {
        let coeffs = self.dense(terms)?;
        self.push(coeffs, bound, label)
    }

    /// Adds `Σ c·v ≥ bound`.
    pub fn add_ge(&mut self, terms: &[(&str, f64)], bound: f64, label: impl Into<String>) -> Result<()> {
        let coeffs = self.dense(terms)?.into_iter().map(|c| -c).collect();
        self.push(coeffs, -bound, label)
    }

    /// Adds a row given by dense coefficients in variable order.
    pub fn push(&mut self, coeffs: Vec<f64>, bound: f64, label: impl Into<String>) -> Result<()> {
        if coeffs.len() != self.dim() {
            return Err(Error::Input(format!("row has {} coefficients, system has {} variables", coeffs.len(), self.dim())));
        }
        if !bound.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input("row has a non-finite entry".into()));
        }
        self.rows.push(LinearInequality { coeffs, bound, label: label.into() });
        Ok(())
    }

    /// Adds `v ≥ 0` for every variable.
    pub fn add_nonnegativity(&mut self) {
        for j in 0..self.dim() {
            let mut coeffs = vec![0.0; self.dim()];
            coeffs[j] = -1.0;
            let label = format!("{} >= 0", self.variables[j]);
            self.rows.push(LinearInequality { coeffs, bound: 0.0, label });
        }
    }

    /// Adds `lo ≤ v ≤ hi` for every variable.
    pub fn add_box(&mut self, lo: f64, hi: f64) {
        for j in 0..self.dim() {
            let mut up = vec![0.0; self.dim()];
            up[j] = 1.0;
            let down = up.iter().map(|c| -c).collect();
            let v = self.variables[j].clone();
            self.rows.push(LinearInequality { coeffs: up, bound: hi, label: format!("{v} <= {hi}") });
            self.rows.push(LinearInequality { coeffs: down, bound: -lo, label: format!("{v} >= {lo}") });
        }
    }

    pub fn with_box(&self, lo: f64, hi: f64) -> Self {
        let mut s = self.clone();
        s.add_box(lo, hi);
        s
    }

    /// Same system over an extended variable list; new variables are unconstrained.
    pub fn lift<S: AsRef<str>>(&self, variables: &[S]) -> Result<Self> {
        let vars: Vec<String> = variables.iter().map(|v| v.as_ref().to_string()).collect();
        let map = self
            .variables
            .iter()
            .map(|v| vars.iter().position(|w| w == v).ok_or_else(|| Error::UnknownVariable(v.clone())))
            .collect::<Result<Vec<_>>>()?;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut coeffs = vec![0.0; vars.len()];
                for (j, &c) in map.iter().zip(&r.coeffs) {
                    coeffs[*j] += c;
                }
                LinearInequality { coeffs, bound: r.bound, label: r.label.clone() }
            })
            .collect();
        Ok(Self { variables: vars, rows })
    }

    /// Fixes `var = value` and removes it from the variable list.
    pub fn substitute(&self, var: &str, value: f64) -> Result<Self> {
        let j = self.var_index(var)?;
        let mut variables = self.variables.clone();
        variables.remove(j);
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut coeffs = r.coeffs.clone();
                let c = coeffs.remove(j);
                LinearInequality { coeffs, bound: r.bound - c * value, label: r.label.clone() }
            })
            .collect();
        Ok(Self { variables, rows })
    }

    /// Projects out `var` by Fourier–Motzkin elimination.
    pub fn fm_eliminate(&self, var: &str) -> Result<Self> {
        let j = self.var_index(var)?;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut out = Vec::new();
        for r in &self.rows {
            let c = r.coeffs[j];
            if c > COEFF_TOL {
                pos.push(r);
            } else if c < -COEFF_TOL {
                neg.push(r);
            } else {
                let mut coeffs = r.coeffs.clone();
                coeffs.remove(j);
                out.push(LinearInequality { coeffs, bound: r.bound, label: r.label.clone() });
            }
        }
        for p in &pos {
            for n in &neg {
                let (a, b) = (-n.coeffs[j], p.coeffs[j]);
                let mut coeffs: Vec<f64> = p.coeffs.iter().zip(&n.coeffs).map(|(x, y)| a * x + b * y).collect();
                coeffs.remove(j);
                out.push(LinearInequality {
                    coeffs,
                    bound: a * p.bound + b * n.bound,
                    label: format!("[{}] + [{}]", p.label, n.label),
                });
            }
        }
        let mut variables = self.variables.clone();
        variables.remove(j);
        Ok(Self { variables, rows: prune(out) })
    }

    /// Eliminates several variables in order.
    pub fn fm_eliminate_all(&self, vars: &[&str]) -> Result<Self> {
        vars.iter().try_fold(self.clone(), |s, v| s.fm_eliminate(v))
    }

    /// Sorted, deduplicated vertices of a bounded system of dimension ≤ 4.
    pub fn enumerate_vertices(&self) -> Result<Vec<Vertex>> {
        let d = self.dim();
        if d > MAX_VERTEX_DIM {
            return Err(Error::UnsupportedDimension { dim: d, max: MAX_VERTEX_DIM });
        }
        if self.rows.iter().any(|r| r.is_trivial() && r.bound < -VERTEX_TOL) {
            return Ok(Vec::new());
        }
        let active: Vec<&LinearInequality> = self.rows.iter().filter(|r| !r.is_trivial()).collect();
        if d == 0 {
            return Ok(vec![Vertex(Vec::new())]);
        }
        let mut found: Vec<Vec<f64>> = Vec::new();
        let mut combo: Vec<usize> = (0..d).collect();
        if active.len() < d {
            return Ok(Vec::new());
        }
        loop {
            if let Some(x) = solve(&combo.iter().map(|&i| active[i]).collect::<Vec<_>>(), d) {
                let ok = self.rows.iter().all(|r| r.margin(&x) >= -VERTEX_TOL);
                if ok && !found.iter().any(|f| max_dist(f, &x) <= DEDUP_TOL) {
                    found.push(x);
                }
            }
            if !next_combination(&mut combo, active.len()) {
                break;
            }
        }
        found.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
        Ok(found.into_iter().map(Vertex).collect())
    }

    /// Minimum margin over all rows and whether it exceeds `eps`.
    pub fn contains(&self, point: &[f64], eps: f64) -> Result<Membership> {
        self.contains_where(point, eps, |_| true)
    }

    /// Membership over the rows selected by `keep`.
    pub fn contains_where(&self, point: &[f64], eps: f64, keep: impl Fn(&LinearInequality) -> bool) -> Result<Membership> {
        if point.len() != self.dim() {
            return Err(Error::Input(format!("point has {} coordinates, system has {} variables", point.len(), self.dim())));
        }
        let mut min_margin = f64::INFINITY;
        let mut binding = None;
        for (i, r) in self.rows.iter().enumerate().filter(|(_, r)| keep(r)) {
            let m = r.margin(point);
            if m < min_margin {
                min_margin = m;
                binding = Some(i);
            }
        }
        Ok(Membership { inside: min_margin > eps, min_margin, binding })
    }

    /// Mutual vertex containment with slack `tol`.
    pub fn region_equal(&self, other: &Self, tol: f64) -> Result<bool> {
        if self.variables != other.variables {
            return Err(Error::Input("systems are over different variable lists".into()));
        }
        for (a, b) in [(self, other), (other, self)] {
            for v in a.enumerate_vertices()? {
                if b.contains(&v.0, -tol)?.min_margin < -tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Display for InequalitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let mut lhs = String::new();
            for (c, v) in r.coeffs.iter().zip(&self.variables).filter(|(c, _)| c.abs() > COEFF_TOL) {
                let sign = match (lhs.is_empty(), *c < 0.0) {
                    (true, false) => "",
                    (true, true) => "-",
                    (false, false) => " + ",
                    (false, true) => " - ",
                };
                let mag = if (c.abs() - 1.0).abs() <= COEFF_TOL { String::new() } else { format!("{} ", c.abs()) };
                lhs.push_str(&format!("{sign}{mag}{v}"));
            }
            if lhs.is_empty() {
                lhs.push('0');
            }
            writeln!(f, "{lhs} <= {:.7}    [{}]", r.bound, r.label)?;
        }
        Ok(())
    }
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Solves the rows as equalities by Gaussian elimination with partial pivoting.
fn solve(rows: &[&LinearInequality], d: usize) -> Option<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut row = r.coeffs.clone();
            row.push(r.bound);
            row
        })
        .collect();
    for col in 0..d {
        let piv = (col..d).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..d {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for k in col..=d {
                        m[r][k] -= f * m[col][k];
                    }
                }
            }
        }
    }
    Some((0..d).map(|i| m[i][d] / m[i][i] + 0.0).collect())
}

/// Normalizes rows, drops satisfied trivial rows and keeps the tightest of duplicates.
fn prune(rows: Vec<LinearInequality>) -> Vec<LinearInequality> {
    let mut out: Vec<LinearInequality> = Vec::with_capacity(rows.len());
    for mut r in rows {
        let scale = r.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale <= COEFF_TOL {
            if r.bound >= -COEFF_TOL {
                continue;
            }
            r.coeffs.iter_mut().for_each(|c| *c = 0.0);
            r.bound = -1.0;
        } else {
            r.coeffs.iter_mut().for_each(|c| {
                *c /= scale;
                if c.abs() <= COEFF_TOL {
                    *c = 0.0;
                }
            });
            r.bound /= scale;
        }
        match out.iter_mut().find(|o| max_dist(&o.coeffs, &r.coeffs) <= COEFF_TOL) {
            Some(o) if r.bound < o.bound => *o = r,
            Some(_) => {}
            None => out.push(r),
        }
    }
    out
}
