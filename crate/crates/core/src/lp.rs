//! Dense bounded-variable primal simplex.
//!
//! Models are `min c·v` subject to rows `a·v <= b` and finite lower bounds on
//! every variable (upper bounds may be infinite). The solver is a two-phase
//! tableau method: slacks (or artificials, for rows violated at the lower
//! bounds) form the starting basis, Dantzig pricing is used until 50
//! consecutive degenerate pivots have been seen, after which Bland's rule
//! takes over. The basis is re-inverted periodically and before the final
//! feasibility check. Models with more rows than variables (the master
//! relaxation after a few cut rounds) are solved through their dual, whose
//! basis is only as large as the variable count.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numfmt::sig;

/// Primal feasibility and optimality tolerance.
pub const LP_TOL: f64 = 1e-7;

const PIVOT_TOL: f64 = 1e-9;
const PRICE_TOL: f64 = 1e-9;
const DEGENERATE_LIMIT: usize = 50;
const REFACTOR_EVERY: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural variable values; meaningful only when `status` is `Optimal`.
    pub values: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone)]
struct Row {
    coefs: Vec<f64>,
    rhs: f64,
}

/// An LP with `a·v <= b` rows, bounded variables and a minimization objective.
#[derive(Debug, Clone, Default)]
pub struct LpModel {
    names: Vec<String>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    base_lb: Vec<f64>,
    base_ub: Vec<f64>,
    obj: Vec<f64>,
    rows: Vec<Row>,
    row_index: HashMap<Vec<u64>, usize>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with bounds `[lb, ub]` and objective coefficient `obj`.
    pub fn add_var(&mut self, name: impl Into<String>, lb: f64, ub: f64, obj: f64) -> Result<usize> {
        if !lb.is_finite() {
            return Err(Error::Domain("variables need a finite lower bound".into()));
        }
        if ub.is_nan() || ub < lb {
            return Err(Error::Domain(format!("empty bound interval [{lb}, {ub}]")));
        }
        if !self.rows.is_empty() {
            for row in &mut self.rows {
                row.coefs.push(0.0);
            }
            // widening rows changes the content keys
            self.row_index = self
                .rows
                .iter()
                .enumerate()
                .map(|(id, r)| (row_key(&r.coefs, r.rhs), id))
                .collect();
        }
        self.names.push(name.into());
        self.lb.push(lb);
        self.ub.push(ub);
        self.base_lb.push(lb);
        self.base_ub.push(ub);
        self.obj.push(obj);
        Ok(self.lb.len() - 1)
    }

    pub fn num_vars(&self) -> usize {
        self.lb.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds `sum coef·v <= rhs`. Returns the id of an existing row when the
    /// same row is already present.
    pub fn add_row(&mut self, terms: &[(usize, f64)], rhs: f64) -> Result<usize> {
        let n = self.num_vars();
        let mut coefs = vec![0.0; n];
        for &(j, a) in terms {
            if j >= n {
                return Err(Error::Domain(format!("unknown variable id {j}")));
            }
            if !a.is_finite() {
                return Err(Error::Domain("row coefficients must be finite".into()));
            }
            coefs[j] += a;
        }
        if !rhs.is_finite() {
            return Err(Error::Domain("row right-hand side must be finite".into()));
        }
        self.add_dense_row(coefs, rhs)
    }

    pub fn add_dense_row(&mut self, mut coefs: Vec<f64>, rhs: f64) -> Result<usize> {
        if coefs.len() != self.num_vars() {
            return Err(Error::Domain("row length does not match variable count".into()));
        }
        for c in &mut coefs {
            // -0.0 and 0.0 must hash alike
            if *c == 0.0 {
                *c = 0.0;
            }
        }
        let key = row_key(&coefs, rhs);
        if let Some(&id) = self.row_index.get(&key) {
            return Ok(id);
        }
        let id = self.rows.len();
        self.rows.push(Row { coefs, rhs });
        self.row_index.insert(key, id);
        Ok(id)
    }

    pub fn row(&self, id: usize) -> Option<(&[f64], f64)> {
        self.rows.get(id).map(|r| (r.coefs.as_slice(), r.rhs))
    }

    pub fn bounds(&self, j: usize) -> Option<(f64, f64)> {
        (j < self.num_vars()).then(|| (self.lb[j], self.ub[j]))
    }

    pub fn set_bounds(&mut self, j: usize, lb: f64, ub: f64) -> Result<()> {
        self.check_var(j)?;
        if !lb.is_finite() || ub.is_nan() {
            return Err(Error::Domain("invalid bounds".into()));
        }
        self.lb[j] = lb;
        self.ub[j] = ub;
        Ok(())
    }

    /// Fixes `v_j = value` through its bounds.
    pub fn fix_var(&mut self, j: usize, value: f64) -> Result<()> {
        self.set_bounds(j, value, value)
    }

    /// Restores the bounds the variable was created with.
    pub fn unfix_var(&mut self, j: usize) -> Result<()> {
        self.check_var(j)?;
        self.lb[j] = self.base_lb[j];
        self.ub[j] = self.base_ub[j];
        Ok(())
    }

    fn check_var(&self, j: usize) -> Result<()> {
        if j < self.num_vars() {
            Ok(())
        } else {
            Err(Error::Domain(format!("unknown variable id {j}")))
        }
    }

    pub fn solve(&self) -> Result<LpSolution> {
        solve_lp(self)
    }

    /// Plain-text listing, one constraint per line, 12 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let term = |out: &mut String, a: f64, name: &str| {
            let sign = if a < 0.0 { '-' } else { '+' };
            let _ = write!(out, " {sign} {} {name}", sig(a.abs(), 12));
        };
        out.push_str("minimize\n obj:");
        for (j, &c) in self.obj.iter().enumerate() {
            if c != 0.0 {
                term(&mut out, c, &self.names[j]);
            }
        }
        out.push_str("\nsubject to\n");
        for (r, row) in self.rows.iter().enumerate() {
            let _ = write!(out, " r{r}:");
            for (j, &a) in row.coefs.iter().enumerate() {
                if a != 0.0 {
                    term(&mut out, a, &self.names[j]);
                }
            }
            let _ = writeln!(out, " <= {}", sig(row.rhs, 12));
        }
        out.push_str("bounds\n");
        for j in 0..self.num_vars() {
            let _ = writeln!(out, " {} <= {} <= {}", sig(self.lb[j], 12), self.names[j], sig(self.ub[j], 12));
        }
        out.push_str("end\n");
        out
    }
}

fn row_key(coefs: &[f64], rhs: f64) -> Vec<u64> {
    let mut key: Vec<u64> = coefs.iter().map(|c| c.to_bits()).collect();
    key.push(rhs.to_bits());
    key
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NonBasic {
    Lower,
    Upper,
    Basic,
}

/// Working state of one simplex run.
struct Tableau {
    m: usize,
    ncols: usize,
    nstruct: usize,
    /// `B^-1 A`, row-major.
    t: Vec<f64>,
    x: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<NonBasic>,
    /// Original column of each artificial: (row, column id).
    art_rows: Vec<(usize, usize)>,
    pivots_since_refactor: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn build(model: &LpModel) -> Option<Self> {
        let m = model.num_rows();
        let n = model.num_vars();
        for j in 0..n {
            if model.ub[j] < model.lb[j] - LP_TOL {
                return None;
            }
        }
        let mut residual = Vec::with_capacity(m);
        for row in &model.rows {
            let act: f64 = row.coefs.iter().zip(&model.lb).map(|(a, l)| a * l).sum();
            residual.push(row.rhs - act);
        }
        let art_rows: Vec<usize> = (0..m).filter(|&r| residual[r] < 0.0).collect();
        let ncols = n + m + art_rows.len();
        let mut tab = Tableau {
            m,
            ncols,
            nstruct: n,
            t: vec![0.0; m * ncols],
            x: vec![0.0; ncols],
            lb: vec![0.0; ncols],
            ub: vec![f64::INFINITY; ncols],
            basis: vec![0; m],
            state: vec![NonBasic::Lower; ncols],
            art_rows: art_rows.iter().enumerate().map(|(k, &r)| (r, n + m + k)).collect(),
            pivots_since_refactor: 0,
        };
        for j in 0..n {
            tab.lb[j] = model.lb[j];
            tab.ub[j] = model.ub[j].max(model.lb[j]);
            tab.x[j] = model.lb[j];
        }
        let mut art_of_row = vec![None; m];
        for &(r, col) in &tab.art_rows {
            art_of_row[r] = Some(col);
        }
        for r in 0..m {
            let sign = if art_of_row[r].is_some() { -1.0 } else { 1.0 };
            let base = r * ncols;
            for j in 0..n {
                tab.t[base + j] = sign * model.rows[r].coefs[j];
            }
            tab.t[base + n + r] = sign;
            if let Some(col) = art_of_row[r] {
                tab.t[base + col] = 1.0;
                tab.basis[r] = col;
                tab.x[col] = -residual[r];
            } else {
                tab.basis[r] = n + r;
                tab.x[n + r] = residual[r];
            }
            tab.state[tab.basis[r]] = NonBasic::Basic;
        }
        Some(tab)
    }

    fn at(&self, r: usize, j: usize) -> f64 {
        self.t[r * self.ncols + j]
    }

    /// Column `j` of the original constraint matrix `[A | I | -E]`.
    fn original_column(&self, model: &LpModel, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let n = self.nstruct;
        if j < n {
            for (r, row) in model.rows.iter().enumerate() {
                out[r] = row.coefs[j];
            }
        } else if j < n + self.m {
            out[j - n] = 1.0;
        } else {
            let (r, _) = self.art_rows[j - n - self.m];
            out[r] = -1.0;
        }
    }

    /// Rebuilds `B^-1 A` and the basic values from the original data.
    fn refactor(&mut self, model: &LpModel) -> Result<()> {
        let m = self.m;
        if m == 0 {
            return Ok(());
        }
        // Gauss-Jordan on [B | I] with partial pivoting.
        let mut bmat = vec![0.0; m * m];
        let mut col = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            self.original_column(model, j, &mut col);
            for r in 0..m {
                bmat[r * m + k] = col[r];
            }
        }
        let mut inv = vec![0.0; m * m];
        for r in 0..m {
            inv[r * m + r] = 1.0;
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&a, &b| bmat[a * m + c].abs().total_cmp(&bmat[b * m + c].abs()))
                .unwrap_or(c);
            let pv = bmat[p * m + c];
            if pv.abs() < 1e-12 {
                return Err(Error::Solver("singular basis during refactorization".into()));
            }
            if p != c {
                for k in 0..m {
                    bmat.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let inv_pv = 1.0 / pv;
            for k in 0..m {
                bmat[c * m + k] *= inv_pv;
                inv[c * m + k] *= inv_pv;
            }
            for r in 0..m {
                if r == c {
                    continue;
                }
                let f = bmat[r * m + c];
                if f != 0.0 {
                    for k in 0..m {
                        bmat[r * m + k] -= f * bmat[c * m + k];
                        inv[r * m + k] -= f * inv[c * m + k];
                    }
                }
            }
        }
        // After elimination row k of `inv` belongs to basis position k.
        let ncols = self.ncols;
        let mut t = vec![0.0; m * ncols];
        for j in 0..ncols {
            self.original_column(model, j, &mut col);
            for r in 0..m {
                let mut s = 0.0;
                for (k, &c) in col.iter().enumerate() {
                    if c != 0.0 {
                        s += inv[r * m + k] * c;
                    }
                }
                t[r * ncols + j] = s;
            }
        }
        self.t = t;
        // x_B = B^-1 (b - N x_N)
        let mut rhs: Vec<f64> = model.rows.iter().map(|r| r.rhs).collect();
        for j in 0..ncols {
            if self.state[j] != NonBasic::Basic && self.x[j] != 0.0 {
                self.original_column(model, j, &mut col);
                for r in 0..m {
                    rhs[r] -= col[r] * self.x[j];
                }
            }
        }
        for r in 0..m {
            let mut s = 0.0;
            for k in 0..m {
                s += inv[r * m + k] * rhs[k];
            }
            self.x[self.basis[r]] = s;
        }
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let ncols = self.ncols;
        let pv = self.t[row * ncols + col];
        let inv = 1.0 / pv;
        for k in 0..ncols {
            self.t[row * ncols + k] *= inv;
        }
        self.t[row * ncols + col] = 1.0;
        let (before, rest) = self.t.split_at_mut(row * ncols);
        let (prow, after) = rest.split_at_mut(ncols);
        for other in before.chunks_mut(ncols).chain(after.chunks_mut(ncols)) {
            let f = other[col];
            if f != 0.0 {
                for k in 0..ncols {
                    other[k] -= f * prow[k];
                }
                other[col] = 0.0;
            }
        }
        self.pivots_since_refactor += 1;
    }

    fn run(&mut self, model: &LpModel, cost: &[f64], bland_from_start: bool) -> Result<Phase> {
        let m = self.m;
        let ncols = self.ncols;
        let mut degenerate = 0usize;
        let mut bland = bland_from_start;
        let max_iter = 50_000 + 200 * (m + ncols);
        let mut d = vec![0.0; ncols];
        for _ in 0..max_iter {
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactor(model)?;
            }
            // reduced costs d = c - c_B B^-1 A
            d.copy_from_slice(cost);
            for r in 0..m {
                let cb = cost[self.basis[r]];
                if cb != 0.0 {
                    let base = r * ncols;
                    for j in 0..ncols {
                        d[j] -= cb * self.t[base + j];
                    }
                }
            }
            let mut entering: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..ncols {
                let dir = match self.state[j] {
                    NonBasic::Basic => continue,
                    _ if self.ub[j] - self.lb[j] <= 0.0 => continue,
                    NonBasic::Lower if d[j] < -PRICE_TOL => 1.0,
                    NonBasic::Upper if d[j] > PRICE_TOL => -1.0,
                    _ => continue,
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if d[j].abs() > best {
                    best = d[j].abs();
                    entering = Some((j, dir));
                }
            }
            let Some((j, dir)) = entering else {
                return Ok(Phase::Optimal);
            };

            // ratio test
            let mut step = self.ub[j] - self.lb[j];
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                let alpha = self.at(r, j) * dir;
                let b = self.basis[r];
                let limit = if alpha > PIVOT_TOL {
                    (self.x[b] - self.lb[b]).max(0.0) / alpha
                } else if alpha < -PIVOT_TOL && self.ub[b].is_finite() {
                    (self.ub[b] - self.x[b]).max(0.0) / -alpha
                } else {
                    continue;
                };
                let better = match leave {
                    None => limit < step,
                    Some((lr, la)) => {
                        if limit < step - 1e-12 {
                            true
                        } else if limit <= step + 1e-12 {
                            if bland {
                                b < self.basis[lr]
                            } else {
                                alpha.abs() > la.abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    step = limit.min(step);
                    leave = Some((r, alpha));
                }
            }
            if !step.is_finite() {
                return Ok(Phase::Unbounded);
            }
            if step <= 1e-12 {
                degenerate += 1;
                if degenerate >= DEGENERATE_LIMIT {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            let delta = dir * step;
            for r in 0..m {
                let a = self.at(r, j);
                if a != 0.0 {
                    let b = self.basis[r];
                    self.x[b] -= a * delta;
                }
            }
            self.x[j] += delta;
            match leave {
                None => {
                    // bound flip
                    if dir > 0.0 {
                        self.x[j] = self.ub[j];
                        self.state[j] = NonBasic::Upper;
                    } else {
                        self.x[j] = self.lb[j];
                        self.state[j] = NonBasic::Lower;
                    }
                }
                Some((r, alpha)) => {
                    let b = self.basis[r];
                    if alpha > 0.0 {
                        self.x[b] = self.lb[b];
                        self.state[b] = NonBasic::Lower;
                    } else {
                        self.x[b] = self.ub[b];
                        self.state[b] = NonBasic::Upper;
                    }
                    self.pivot(r, j);
                    self.basis[r] = j;
                    self.state[j] = NonBasic::Basic;
                }
            }
        }
        Err(Error::Solver("simplex iteration limit reached".into()))
    }

    /// Pivots basic artificials at zero out of the basis where possible.
    fn drive_out_artificials(&mut self) {
        let first_art = self.nstruct + self.m;
        for r in 0..self.m {
            if self.basis[r] < first_art {
                continue;
            }
            let pick = (0..first_art)
                .filter(|&j| self.state[j] != NonBasic::Basic)
                .max_by(|&a, &b| self.at(r, a).abs().total_cmp(&self.at(r, b).abs()));
            if let Some(j) = pick {
                if self.at(r, j).abs() > 1e-7 {
                    let old = self.basis[r];
                    self.state[old] = NonBasic::Lower;
                    self.x[old] = 0.0;
                    self.pivot(r, j);
                    self.basis[r] = j;
                    self.state[j] = NonBasic::Basic;
                }
            }
        }
    }

    fn max_infeasibility(&self, model: &LpModel) -> f64 {
        let n = self.nstruct;
        let mut worst: f64 = 0.0;
        for j in 0..n {
            worst = worst.max(model.lb[j] - self.x[j]);
            worst = worst.max(self.x[j] - model.ub[j]);
        }
        for row in &model.rows {
            let act: f64 = row.coefs.iter().zip(&self.x[..n]).map(|(a, v)| a * v).sum();
            worst = worst.max((act - row.rhs) / (1.0 + row.rhs.abs()));
        }
        worst
    }
}

/// One two-phase run. Besides the solution, returns the reduced cost of
/// every row's slack at the optimum (the negated row multipliers).
fn attempt(model: &LpModel, bland: bool) -> Result<(LpSolution, Vec<f64>)> {
    let n = model.num_vars();
    let m = model.num_rows();
    let Some(mut tab) = Tableau::build(model) else {
        return Ok((infeasible(n), Vec::new()));
    };
    if !tab.art_rows.is_empty() {
        let mut cost = vec![0.0; tab.ncols];
        for &(_, col) in &tab.art_rows {
            cost[col] = 1.0;
        }
        if let Phase::Unbounded = tab.run(model, &cost, bland)? {
            return Err(Error::Solver("phase one reported unbounded".into()));
        }
        tab.refactor(model)?;
        let infeas: f64 = tab.art_rows.iter().map(|&(_, c)| tab.x[c].max(0.0)).sum();
        let scale = 1.0 + model.rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        if infeas > LP_TOL * scale {
            return Ok((infeasible(n), Vec::new()));
        }
        for &(_, col) in &tab.art_rows.clone() {
            tab.ub[col] = 0.0;
            tab.x[col] = 0.0;
        }
        tab.drive_out_artificials();
        tab.refactor(model)?;
    }
    let mut cost = vec![0.0; tab.ncols];
    cost[..n].copy_from_slice(&model.obj);
    if let Phase::Unbounded = tab.run(model, &cost, bland)? {
        let sol = LpSolution { status: LpStatus::Unbounded, values: vec![0.0; n], objective: f64::NEG_INFINITY };
        return Ok((sol, Vec::new()));
    }
    tab.refactor(model)?;
    if tab.max_infeasibility(model) > LP_TOL {
        return Err(Error::Solver(format!(
            "solution violates constraints by {:.3e}",
            tab.max_infeasibility(model)
        )));
    }
    let values = snap(model, &tab.x[..n]);
    let objective = values.iter().zip(&model.obj).map(|(v, c)| v * c).sum();
    let prices = (0..m)
        .map(|r| {
            let col = n + r;
            -(0..m).map(|k| cost[tab.basis[k]] * tab.at(k, col)).sum::<f64>()
        })
        .collect();
    Ok((LpSolution { status: LpStatus::Optimal, values, objective }, prices))
}

fn snap(model: &LpModel, x: &[f64]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(j, &v)| {
            if (v - model.lb[j]).abs() < 1e-9 {
                model.lb[j]
            } else if (v - model.ub[j]).abs() < 1e-9 {
                model.ub[j]
            } else {
                v
            }
        })
        .collect()
}

fn infeasible(n: usize) -> LpSolution {
    LpSolution { status: LpStatus::Infeasible, values: vec![0.0; n], objective: f64::INFINITY }
}

/// Dual of `model` after shifting every variable to its lower bound:
/// `min b'·y + h·s` s.t. `-A^T y - E s <= c`, `y, s >= 0`, where `b'` are the
/// shifted right-hand sides and `s` covers the finite widths `h = ub - lb`.
/// Its row prices are the shifted primal values.
fn shifted_dual(model: &LpModel) -> LpModel {
    let n = model.num_vars();
    let m = model.num_rows();
    let finite: Vec<usize> = (0..n).filter(|&j| model.ub[j].is_finite()).collect();
    let nd = m + finite.len();
    let mut dual = LpModel::new();
    dual.lb = vec![0.0; nd];
    dual.ub = vec![f64::INFINITY; nd];
    dual.base_lb = dual.lb.clone();
    dual.base_ub = dual.ub.clone();
    dual.names = (0..nd).map(|k| format!("d{k}")).collect();
    dual.obj = model
        .rows
        .iter()
        .map(|r| r.rhs - r.coefs.iter().zip(&model.lb).map(|(a, l)| a * l).sum::<f64>())
        .chain(finite.iter().map(|&j| model.ub[j] - model.lb[j]))
        .collect();
    for j in 0..n {
        let mut coefs = vec![0.0; nd];
        for (r, row) in model.rows.iter().enumerate() {
            coefs[r] = -row.coefs[j];
        }
        if let Ok(k) = finite.binary_search(&j) {
            coefs[m + k] = -1.0;
        }
        // a tiny distinct lift on the zero right-hand sides breaks the heavy
        // degeneracy of cut-generated models; for 0/1 variables it can cost
        // at most 2e-9 per variable of optimality
        let lift = if model.obj[j] == 0.0 { 1e-9 * (1.0 + ((j * 7919) % 97) as f64 / 97.0) } else { 0.0 };
        dual.rows.push(Row { coefs, rhs: model.obj[j] + lift });
    }
    dual
}

/// Solves through the dual when that is optimal and its prices give a
/// verified primal optimum; `None` sends the caller to the primal route.
fn solve_via_dual(model: &LpModel) -> Option<LpSolution> {
    let dual = shifted_dual(model);
    let (sol, prices) = match attempt(&dual, false) {
        Ok(r) => r,
        Err(_) => return None,
    };
    match sol.status {
        // a feasible, unbounded dual certifies an empty primal
        LpStatus::Unbounded => return Some(infeasible(model.num_vars())),
        LpStatus::Infeasible => return None,
        LpStatus::Optimal => {}
    }
    let x: Vec<f64> = model.lb.iter().zip(&prices).map(|(l, p)| l + p.max(0.0)).collect();
    let values = snap(model, &x);
    let objective: f64 = values.iter().zip(&model.obj).map(|(v, c)| v * c).sum();
    let shift: f64 = model.lb.iter().zip(&model.obj).map(|(l, c)| l * c).sum();
    // strong duality and primal feasibility, both checked on the original
    if (objective - shift + sol.objective).abs() > LP_TOL * (1.0 + objective.abs()) {
        return None;
    }
    for (j, v) in values.iter().enumerate() {
        if *v > model.ub[j] + LP_TOL {
            return None;
        }
    }
    for row in &model.rows {
        let act: f64 = row.coefs.iter().zip(&values).map(|(a, v)| a * v).sum();
        if (act - row.rhs) / (1.0 + row.rhs.abs()) > LP_TOL {
            return None;
        }
    }
    Some(LpSolution { status: LpStatus::Optimal, values, objective })
}

/// Solves `model`. Tall models (more rows than variables) go through their
/// dual, which has a much smaller basis; any doubt there, and any failed
/// primal run, falls back to the primal route, retried once with Bland's
/// rule from the first pivot before an error is reported.
pub fn solve_lp(model: &LpModel) -> Result<LpSolution> {
    if model.num_rows() > model.num_vars() {
        if let Some(sol) = solve_via_dual(model) {
            return Ok(sol);
        }
    }
    match attempt(model, false) {
        Ok((sol, _)) => Ok(sol),
        Err(Error::Solver(_)) => attempt(model, true).map(|(sol, _)| sol),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cut_model() -> (LpModel, usize, usize, usize) {
        // min w  s.t. w >= 20 - 11 x1 - 14 x2, x1 + x2 <= 1
        let mut lp = LpModel::new();
        let x1 = lp.add_var("x1", 0.0, 1.0, 0.0).unwrap();
        let x2 = lp.add_var("x2", 0.0, 1.0, 0.0).unwrap();
        let w = lp.add_var("w", 0.0, f64::INFINITY, 1.0).unwrap();
        lp.add_row(&[(w, -1.0), (x1, -11.0), (x2, -14.0)], -20.0).unwrap();
        lp.add_row(&[(x1, 1.0), (x2, 1.0)], 1.0).unwrap();
        (lp, x1, x2, w)
    }

    #[test]
    fn single_lower_bound_row() {
        let mut lp = LpModel::new();
        let w = lp.add_var("w", 0.0, f64::INFINITY, 1.0).unwrap();
        lp.add_row(&[(w, -1.0)], -5.0).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.values[w] - 5.0).abs() < 1e-9);
        assert!((sol.objective - 5.0).abs() < 1e-9);
    }

    #[test]
    fn two_item_cut_polytope() {
        let (lp, _, x2, w) = cut_model();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 6.0).abs() < 1e-9);
        assert!((sol.values[x2] - 1.0).abs() < 1e-9);
        assert!((sol.values[w] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn fix_and_unfix() {
        let (mut lp, x1, x2, w) = cut_model();
        lp.fix_var(x1, 1.0).unwrap();
        lp.set_bounds(x2, 0.0, 1.0).unwrap();
        // x1 + x2 <= 1 forces x2 = 0, leaving w >= 9
        let fixed = lp.solve().unwrap();
        assert!((fixed.values[w] - 9.0).abs() < 1e-9);
        // without the leader row the cut alone allows w = 0 at x2 = 1
        let mut free = LpModel::new();
        let a = free.add_var("x1", 0.0, 1.0, 0.0).unwrap();
        let b = free.add_var("x2", 0.0, 1.0, 0.0).unwrap();
        let v = free.add_var("w", 0.0, f64::INFINITY, 1.0).unwrap();
        free.add_row(&[(v, -1.0), (a, -11.0), (b, -14.0)], -20.0).unwrap();
        free.fix_var(a, 1.0).unwrap();
        let s = free.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(s.objective.abs() < 1e-9);
        // any x2 in [9/14, 1] is optimal
        assert!(s.values[b] >= 9.0 / 14.0 - 1e-9);
        lp.unfix_var(x1).unwrap();
        assert!((lp.solve().unwrap().objective - 6.0).abs() < 1e-9);
        assert!(lp.fix_var(17, 0.0).is_err());
        assert!(lp.unfix_var(17).is_err());
    }

    #[test]
    fn infeasible_rows() {
        let mut lp = LpModel::new();
        let w = lp.add_var("w", 0.0, f64::INFINITY, 1.0).unwrap();
        lp.add_row(&[(w, 1.0)], -1.0).unwrap();
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let mut lp = LpModel::new();
        let v = lp.add_var("v", 0.0, f64::INFINITY, -1.0).unwrap();
        let u = lp.add_var("u", 0.0, 1.0, 0.0).unwrap();
        lp.add_row(&[(u, 1.0)], 1.0).unwrap();
        let _ = v;
        assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn duplicate_rows_are_merged() {
        let (mut lp, x1, x2, _) = cut_model();
        let before = lp.num_rows();
        let id = lp.add_row(&[(x1, 1.0), (x2, 1.0)], 1.0).unwrap();
        assert_eq!(id, 1);
        assert_eq!(lp.num_rows(), before);
        assert!(lp.add_row(&[(9, 1.0)], 1.0).is_err());
    }

    #[test]
    fn resolve_is_bit_identical() {
        let (lp, ..) = cut_model();
        assert_eq!(lp.solve().unwrap(), lp.solve().unwrap());
    }

    #[test]
    fn text_dump_lists_rows() {
        let (lp, ..) = cut_model();
        let text = lp.to_text();
        assert!(text.contains("r0: - 11 x1 - 14 x2 - 1 w <= -20"), "{text}");
        assert!(text.contains("r1: + 1 x1 + 1 x2 <= 1"));
    }

    #[test]
    fn dual_route_matches_primal_route() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut via_dual = 0;
        for _ in 0..300 {
            let n = rng.gen_range(2..6);
            let mut lp = LpModel::new();
            let w = lp.add_var("w", 0.0, f64::INFINITY, 1.0).unwrap();
            let xs: Vec<usize> = (0..n)
                .map(|j| {
                    let lb = if rng.gen_bool(0.2) { 1.0 } else { 0.0 };
                    let ub = if rng.gen_bool(0.1) { lb } else { 1.0 };
                    lp.add_var(format!("x{j}"), lb, ub, rng.gen_range(-0.5..0.5)).unwrap()
                })
                .collect();
            for _ in 0..rng.gen_range(n + 2..3 * n + 4) {
                let mut terms = vec![(w, -1.0)];
                terms.extend(xs.iter().map(|&x| (x, -rng.gen_range(0..8) as f64)));
                lp.add_row(&terms, -rng.gen_range(0..20) as f64).unwrap();
            }
            let budget: Vec<(usize, f64)> = xs.iter().map(|&x| (x, 1.0)).collect();
            lp.add_row(&budget, rng.gen_range(1..=n) as f64).unwrap();
            let (primal, _) = attempt(&lp, false).unwrap();
            let both = lp.solve().unwrap();
            assert_eq!(primal.status, both.status);
            if primal.status == LpStatus::Optimal {
                assert!((primal.objective - both.objective).abs() < 1e-7, "{} vs {}", primal.objective, both.objective);
            }
            via_dual += usize::from(solve_via_dual(&lp).is_some());
        }
        assert!(via_dual > 200, "dual route used {via_dual} times");
    }
}
