//! The follower's problem: maximize `z(S)` over the items the leader left
//! available, subject to the knapsack rows.
//!
//! [`greedy`] is the classical heuristic; [`solve_sep`] is exact. SEP models
//! the follower as `max theta` over binary `y` with lazily generated rows
//!
//! ```text
//! theta <= z(S) + sum_{i not in S} rho_i(S) y_i - sum_{i in S} rho_i(N - i) (1 - y_i)
//! theta <= z(S) + sum_{i not in S} rho_i(0) y_i - sum_{i in S} rho_i(S - i) (1 - y_i)
//! ```
//!
//! and is solved by a depth-first branch-and-cut on the embedded simplex.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::instance::KnapsackSystem;
use crate::lp::{LpModel, LpStatus};
use crate::submodular::{ItemSet, SubmodularOracle};

/// Integrality tolerance on `y`.
const INT_TOL: f64 = 1e-6;
/// Improvement needed over a cutoff or incumbent.
pub const CUTOFF_TOL: f64 = 1e-6;
/// Minimum violation for a SEP row to be added.
const ROW_TOL: f64 = 1e-7;
/// Cut rounds at a fractional SEP node before branching.
const MAX_FRAC_ROUNDS: usize = 20;

/// Appends greedy picks to `seed` (keeping its order) over the items marked
/// in `ground`, each time taking the feasible item with the largest gain
/// (ties to the smallest id), until nothing fits.
pub fn greedy(
    oracle: &dyn SubmodularOracle,
    ground: &[bool],
    seed: &ItemSet,
    knapsacks: &KnapsackSystem,
) -> ItemSet {
    let mut set = seed.clone();
    let mut ev = oracle.evaluator();
    ev.load(seed);
    let mut load = knapsacks.load(seed);
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (i, _) in ground.iter().enumerate().filter(|(_, &g)| g) {
            if set.contains(i) || !knapsacks.fits(&load, i) {
                continue;
            }
            let g = ev.gain(i);
            if best.map_or(true, |(_, bg)| g > bg) {
                best = Some((i, g));
            }
        }
        let Some((i, _)) = best else { break };
        set.insert(i);
        ev.insert(i);
        knapsacks.add_to_load(&mut load, i);
    }
    set
}

/// Per-instance data reused by every follower solve.
pub struct Follower<'a> {
    pub oracle: &'a dyn SubmodularOracle,
    pub knapsacks: &'a KnapsackSystem,
    rho_empty: Vec<f64>,
    rho_full: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SepStatus {
    Optimal,
    /// A solution better than the cutoff was found; the search stopped.
    CutoffExceeded,
    TimedOut,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SepResult {
    /// Best follower set found, ascending order.
    pub set: ItemSet,
    pub value: f64,
    /// Upper bound on the optimum (equals `value` when `Optimal`).
    pub bound: f64,
    pub status: SepStatus,
    pub nodes: usize,
}

/// Outcome of exact separation at an integer leader point.
#[derive(Debug, Clone, PartialEq)]
pub enum IntegerSeparation {
    /// A follower set whose value exceeds `w*`.
    Violated { set: ItemSet, value: f64 },
    /// No such set: `phi` is the exact follower optimum.
    NoViolation { phi: f64 },
    TimedOut,
}

struct SepNode {
    /// `Some(v)` fixes `y_i = v`.
    fixed: Vec<Option<bool>>,
    bound: f64,
}

impl<'a> Follower<'a> {
    pub fn new(oracle: &'a dyn SubmodularOracle, knapsacks: &'a KnapsackSystem) -> Self {
        Self { oracle, knapsacks, rho_empty: oracle.rho_empty_all(), rho_full: oracle.rho_full_complement_all() }
    }

    pub fn num_items(&self) -> usize {
        self.rho_empty.len()
    }

    pub fn rho_empty(&self) -> &[f64] {
        &self.rho_empty
    }

    /// Greedy over `available` from an empty seed.
    pub fn greedy(&self, available: &[bool]) -> ItemSet {
        greedy(self.oracle, available, &ItemSet::new(), self.knapsacks)
    }

    /// Exact follower optimum over `available`.
    ///
    /// With a `cutoff`, the search stops as soon as a set worth more than
    /// `cutoff + 1e-6` is known; the cutoff is never used for pruning, so an
    /// `Optimal` status always carries the exact optimum.
    pub fn solve_sep(&self, available: &[bool], cutoff: Option<f64>, deadline: Option<Instant>) -> Result<SepResult> {
        let n = self.num_items();
        if available.len() != n {
            return Err(Error::Domain("availability mask has wrong length".into()));
        }
        let items: Vec<usize> = (0..n).filter(|&i| available[i]).collect();
        let exceeds = |v: f64| cutoff.is_some_and(|c| v > c + CUTOFF_TOL);

        let mut best = self.greedy(available).canonical();
        let mut best_val = self.oracle.evaluate(&best)?;
        let done = |set: ItemSet, value: f64, bound: f64, status, nodes| {
            Ok(SepResult { set, value, bound, status, nodes })
        };
        if items.is_empty() {
            return done(best, best_val, best_val, SepStatus::Optimal, 0);
        }
        if exceeds(best_val) {
            return done(best, best_val, f64::INFINITY, SepStatus::CutoffExceeded, 0);
        }

        // variables: 0 = theta, 1.. = y over `items`
        let mut lp = LpModel::new();
        lp.add_var("theta", 0.0, f64::INFINITY, -1.0)?;
        for &i in &items {
            lp.add_var(format!("y_{i}"), 0.0, 1.0, 0.0)?;
        }
        for l in 0..self.knapsacks.num_rows() {
            let terms: Vec<(usize, f64)> =
                items.iter().enumerate().map(|(k, &i)| (k + 1, self.knapsacks.cost(l, i))).collect();
            lp.add_row(&terms, self.knapsacks.capacity(l))?;
        }
        // the second row family at the empty set bounds theta from the start
        let mut empty_row = vec![(0, 1.0)];
        empty_row.extend(items.iter().enumerate().map(|(k, &i)| (k + 1, -self.rho_empty[i])));
        lp.add_row(&empty_row, 0.0)?;

        let mut stack = vec![SepNode { fixed: vec![None; items.len()], bound: f64::INFINITY }];
        let mut nodes = 0;
        while let Some(node) = stack.pop() {
            if node.bound <= best_val + ROW_TOL {
                continue;
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                let open = stack.iter().map(|s| s.bound).fold(node.bound, f64::max);
                return done(best, best_val, open.max(best_val), SepStatus::TimedOut, nodes);
            }
            nodes += 1;
            for (k, f) in node.fixed.iter().enumerate() {
                match f {
                    Some(v) => lp.fix_var(k + 1, if *v { 1.0 } else { 0.0 })?,
                    None => lp.unfix_var(k + 1)?,
                }
            }
            let mut frac_rounds = 0;
            let branch = loop {
                let sol = lp.solve()?;
                match sol.status {
                    LpStatus::Infeasible => break None,
                    LpStatus::Unbounded => return Err(Error::Solver("SEP relaxation unbounded".into())),
                    LpStatus::Optimal => {}
                }
                let theta = sol.values[0];
                if theta <= best_val + ROW_TOL {
                    break None;
                }
                let y = &sol.values[1..];
                let fractional = y.iter().any(|v| (v - v.round()).abs() > INT_TOL);
                let candidate = if fractional {
                    self.rounding_candidate(&items, y)
                } else {
                    ItemSet::from_items(items.iter().zip(y).filter(|(_, v)| **v > 0.5).map(|(i, _)| *i))
                };
                let value = self.oracle.evaluate(&candidate)?;
                if value > best_val {
                    best = candidate.canonical();
                    best_val = value;
                    if exceeds(best_val) {
                        return done(best, best_val, f64::INFINITY, SepStatus::CutoffExceeded, nodes);
                    }
                }
                let added = self.add_rows(&mut lp, &items, &candidate, value, theta, y)?;
                if !fractional {
                    // theta is cut down to z(candidate) at this y
                    if added {
                        continue;
                    }
                    break None;
                }
                frac_rounds += 1;
                if added && frac_rounds < MAX_FRAC_ROUNDS {
                    continue;
                }
                // most fractional y, ties to the smallest position
                let k = (0..y.len())
                    .filter(|&k| node.fixed[k].is_none())
                    .max_by(|&a, &b| {
                        let fa = 0.5 - (y[a] - 0.5).abs();
                        let fb = 0.5 - (y[b] - 0.5).abs();
                        fa.total_cmp(&fb).then(b.cmp(&a))
                    });
                match k {
                    Some(k) if (y[k] - y[k].round()).abs() > INT_TOL => break Some((k, theta)),
                    _ => break None,
                }
            };
            if let Some((k, theta)) = branch {
                let mut zero = node.fixed.clone();
                zero[k] = Some(false);
                let mut one = node.fixed;
                one[k] = Some(true);
                // depth-first, y = 1 explored first
                stack.push(SepNode { fixed: zero, bound: theta });
                stack.push(SepNode { fixed: one, bound: theta });
            }
        }
        done(best, best_val, best_val, SepStatus::Optimal, nodes)
    }

    /// Items by `y` descending (ties by id) until the next one does not fit.
    fn rounding_candidate(&self, items: &[usize], y: &[f64]) -> ItemSet {
        let mut order: Vec<usize> = (0..items.len()).collect();
        order.sort_by(|&a, &b| y[b].total_cmp(&y[a]).then(a.cmp(&b)));
        let mut set = ItemSet::new();
        let mut load = vec![0.0; self.knapsacks.num_rows()];
        for k in order {
            if !self.knapsacks.fits(&load, items[k]) {
                break;
            }
            self.knapsacks.add_to_load(&mut load, items[k]);
            set.insert(items[k]);
        }
        set
    }

    /// Adds both SEP rows for `set` when violated at `(theta, y)`.
    fn add_rows(&self, lp: &mut LpModel, items: &[usize], set: &ItemSet, value: f64, theta: f64, y: &[f64]) -> Result<bool> {
        let mut ev = self.oracle.evaluator();
        ev.load(set);
        // rho_i(S) for i outside, rho_i(S - i) for i inside
        let mut rho_s = Vec::with_capacity(items.len());
        for &i in items {
            if set.contains(i) {
                ev.remove(i);
                rho_s.push(ev.gain(i));
                ev.insert(i);
            } else {
                rho_s.push(ev.gain(i));
            }
        }
        let mut added = false;
        for family in 0..2 {
            // theta - sum a_k y_k <= rhs
            let mut rhs = value;
            let mut terms = vec![(0, 1.0)];
            for (k, &i) in items.iter().enumerate() {
                let a = match (family, set.contains(i)) {
                    (0, false) => rho_s[k],
                    (0, true) => self.rho_full[i],
                    (_, false) => self.rho_empty[i],
                    (_, true) => rho_s[k],
                };
                if set.contains(i) {
                    rhs -= a;
                }
                terms.push((k + 1, -a));
            }
            let act: f64 = theta + terms[1..].iter().map(|&(j, a)| a * y[j - 1]).sum::<f64>();
            if act > rhs + ROW_TOL {
                let before = lp.num_rows();
                lp.add_row(&terms, rhs)?;
                added |= lp.num_rows() > before;
            }
        }
        Ok(added)
    }

    /// `Phi(x)`: the follower optimum when the items with `x_i = 1` are gone.
    pub fn phi(&self, x: &[bool]) -> Result<f64> {
        let available: Vec<bool> = x.iter().map(|b| !b).collect();
        let res = self.solve_sep(&available, None, None)?;
        Ok(res.value)
    }

    /// Greedy first; if its set does not beat `w*`, SEP with cutoff `w*`.
    pub fn enhanced_integer_separation(
        &self,
        w_star: f64,
        x_star: &[bool],
        deadline: Option<Instant>,
    ) -> Result<IntegerSeparation> {
        let available: Vec<bool> = x_star.iter().map(|b| !b).collect();
        let set = self.greedy(&available);
        let value = self.oracle.evaluate(&set)?;
        if value > w_star + CUTOFF_TOL {
            return Ok(IntegerSeparation::Violated { set, value });
        }
        self.separate_with_cutoff(&available, w_star, deadline)
    }

    /// SEP to optimality (no greedy shortcut) classified against `w*`.
    pub fn exact_integer_separation(
        &self,
        w_star: f64,
        x_star: &[bool],
        deadline: Option<Instant>,
    ) -> Result<IntegerSeparation> {
        let available: Vec<bool> = x_star.iter().map(|b| !b).collect();
        let res = self.solve_sep(&available, None, deadline)?;
        Ok(match res.status {
            SepStatus::TimedOut => IntegerSeparation::TimedOut,
            _ if res.value > w_star + CUTOFF_TOL => IntegerSeparation::Violated { set: res.set, value: res.value },
            _ => IntegerSeparation::NoViolation { phi: res.value },
        })
    }

    fn separate_with_cutoff(&self, available: &[bool], w_star: f64, deadline: Option<Instant>) -> Result<IntegerSeparation> {
        let res = self.solve_sep(available, Some(w_star), deadline)?;
        Ok(match res.status {
            SepStatus::CutoffExceeded => IntegerSeparation::Violated { set: res.set, value: res.value },
            SepStatus::Optimal => IntegerSeparation::NoViolation { phi: res.value },
            SepStatus::TimedOut => IntegerSeparation::TimedOut,
        })
    }
}
