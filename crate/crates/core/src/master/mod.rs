//! Branch-and-cut over the leader's decisions.
//!
//! The master LP is `min w` over the leader rows, the accumulated cuts and
//! `w >= 0`, with branching fixings as bounds. Integer points are separated
//! exactly and become incumbents only once no violated cut exists; fractional
//! points get one round of heuristic separation per node.

mod config;
mod log;

use std::collections::HashMap;
use std::time::{Duration, Instant};

pub use config::{BaseCut, FracStrategy, Setting, SolverConfig};
pub use log::{LogEvent, RunLog};

use crate::cuts::{self, alternative_sic, basic_sic, improved_sic, lift_sic, Cut, CutFamily, DominatingLists};
use crate::error::{Error, Result};
use crate::follower::{greedy, Follower, IntegerSeparation, CUTOFF_TOL};
use crate::instance::Instance;
use crate::lp::{LpModel, LpStatus};
use crate::submodular::ItemSet;

/// Integrality tolerance on `x`.
pub const INT_TOL: f64 = 1e-6;
/// A node is dropped once its bound is this close to the incumbent.
const PRUNE_TOL: f64 = 1e-7;

/// `100 (z* - z_lb) / (0.1 + z*)`.
pub fn gap(z_star: f64, z_lower: f64) -> f64 {
    100.0 * (z_star - z_lower) / (0.1 + z_star)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    TimeLimit,
    NodeLimit,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::TimeLimit => "time_limit",
            Self::NodeLimit => "node_limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Best interdiction found, if any.
    pub x: Option<Vec<bool>>,
    /// Incumbent value (`+inf` without one).
    pub upper: f64,
    pub lower: f64,
    /// Final gap in percent; 100 without an incumbent.
    pub gap: f64,
    /// Gap after the root node's cut loop, before the first branching.
    pub root_gap: f64,
    pub nodes: usize,
    /// Cuts added per family, indexed by [`CutFamily::index`].
    pub cuts: [usize; 4],
    pub dominance_rows: usize,
    pub status: SolveStatus,
    pub seconds: f64,
    pub log: RunLog,
}

impl SolveResult {
    pub fn total_cuts(&self) -> usize {
        self.cuts.iter().sum()
    }

    pub fn cut_count(&self, family: CutFamily) -> usize {
        self.cuts[family.index()]
    }

    /// Items interdicted in the incumbent.
    pub fn interdicted(&self) -> Vec<usize> {
        self.x.as_ref().map_or_else(Vec::new, |x| (0..x.len()).filter(|&i| x[i]).collect())
    }
}

/// Dominance rows `x_i >= x_j`, returned as `(i, j)`: `i` may replace `j`
/// for the follower, is no costlier on any knapsack row, and no costlier for
/// the leader on any leader row. Of two mutually dominating items only
/// `x_min >= x_max` is kept.
pub fn dominance_preprocess(inst: &Instance) -> Vec<(usize, usize)> {
    let n = inst.num_items();
    let qualifies = |i: usize, j: usize| {
        inst.superior[j].contains(&i) && inst.knapsacks.no_costlier(i, j) && inst.leader.column_le(i, j)
    };
    let mut out = Vec::new();
    for j in 0..n {
        for &i in &inst.superior[j] {
            if i == j || !qualifies(i, j) {
                continue;
            }
            if qualifies(j, i) && i > j {
                continue;
            }
            out.push((i, j));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Follower set used to separate a fractional `x*`, in the order its items
/// were added.
pub fn fractional_candidate(inst: &Instance, x_star: &[f64], strategy: FracStrategy, base: BaseCut) -> ItemSet {
    let n = inst.num_items();
    let oracle = inst.oracle.as_ref();
    let extend = |set: ItemSet| match base {
        // a non-maximal set is extended over all of N, keeping its order
        BaseCut::Improved => greedy(oracle, &vec![true; n], &set, &inst.knapsacks),
        BaseCut::Basic => set,
    };
    match strategy {
        FracStrategy::S1 => {
            let ground: Vec<bool> = x_star.iter().map(|&v| v <= INT_TOL).collect();
            extend(greedy(oracle, &ground, &ItemSet::new(), &inst.knapsacks))
        }
        FracStrategy::S2 => {
            let mut rounded: Vec<bool> = x_star.iter().map(|&v| v >= 1.0 - INT_TOL).collect();
            loop {
                let pick = (0..n)
                    .filter(|&i| !rounded[i] && inst.leader.can_add(&rounded, i))
                    .max_by(|&a, &b| x_star[a].total_cmp(&x_star[b]).then(b.cmp(&a)));
                match pick {
                    Some(i) => rounded[i] = true,
                    None => break,
                }
            }
            let ground: Vec<bool> = rounded.iter().map(|r| !r).collect();
            extend(greedy(oracle, &ground, &ItemSet::new(), &inst.knapsacks))
        }
        FracStrategy::S3 => {
            let mut set = ItemSet::new();
            let mut ev = oracle.evaluator();
            let empty = oracle.evaluator();
            let mut load = vec![0.0; inst.knapsacks.num_rows()];
            loop {
                let mut best: Option<(usize, f64)> = None;
                for i in 0..n {
                    if set.contains(i) || !inst.knapsacks.fits(&load, i) {
                        continue;
                    }
                    let v = match base {
                        BaseCut::Basic => ev.gain(i) - empty.gain(i) * x_star[i],
                        BaseCut::Improved => ev.gain(i) * (1.0 - x_star[i]),
                    };
                    if best.map_or(true, |(_, bv)| v > bv) {
                        best = Some((i, v));
                    }
                }
                match best {
                    Some((i, v)) if v >= 0.0 => {
                        set.insert(i);
                        ev.insert(i);
                        inst.knapsacks.add_to_load(&mut load, i);
                    }
                    _ => break,
                }
            }
            set
        }
    }
}

/// Result of separating an integer leader point.
#[derive(Debug, Clone, PartialEq)]
pub enum IntegerCuts {
    Cuts { cuts: Vec<Cut>, set: ItemSet, value: f64 },
    /// No violated cut; `phi` is the exact follower value.
    Accept { phi: f64 },
    TimedOut,
}

/// Cut generation for one instance under one setting.
pub struct Separator<'a> {
    inst: &'a Instance,
    follower: Follower<'a>,
    lists: DominatingLists,
    setting: Setting,
    threshold: f64,
}

impl<'a> Separator<'a> {
    pub fn new(inst: &'a Instance, config: &SolverConfig) -> Self {
        Self {
            inst,
            follower: Follower::new(inst.oracle.as_ref(), &inst.knapsacks),
            lists: DominatingLists::for_instance(inst),
            setting: config.setting,
            threshold: config.frac_violation_threshold,
        }
    }

    pub fn follower(&self) -> &Follower<'a> {
        &self.follower
    }

    fn base_cut(&self, set: &ItemSet, ordering: &[usize]) -> Result<Cut> {
        match self.setting.base {
            BaseCut::Basic => basic_sic(self.inst.oracle.as_ref(), &self.inst.knapsacks, set),
            BaseCut::Improved => improved_sic(self.inst.oracle.as_ref(), &self.inst.knapsacks, set, ordering),
        }
    }

    /// Base cut for `set`, replaced by its lifted form when lifting is on
    /// and finds a pair.
    fn primary_cut(&self, set: &ItemSet, ordering: &[usize], x: &[f64]) -> Result<(Cut, Cut)> {
        let base = self.base_cut(set, ordering)?;
        let primary = if self.setting.lift {
            lift_sic(self.inst.oracle.as_ref(), set, &base, x, &self.lists)?
        } else {
            base.clone()
        };
        Ok((base, primary))
    }

    /// Exact separation at integer `x*`: SEP (or greedy + SEP with cutoff
    /// when the enhanced procedure is on), ordering by `rho(empty)`.
    pub fn separate_integer(&self, w_star: f64, x_star: &[bool], deadline: Option<Instant>) -> Result<IntegerCuts> {
        let outcome = if self.setting.enhanced {
            self.follower.enhanced_integer_separation(w_star, x_star, deadline)?
        } else {
            self.follower.exact_integer_separation(w_star, x_star, deadline)?
        };
        match outcome {
            IntegerSeparation::TimedOut => Ok(IntegerCuts::TimedOut),
            IntegerSeparation::NoViolation { phi } => Ok(IntegerCuts::Accept { phi }),
            IntegerSeparation::Violated { set, value } => {
                let ordering = cuts::default_ordering(self.inst.oracle.as_ref(), &set);
                let x: Vec<f64> = x_star.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
                let (_, cut) = self.primary_cut(&set, &ordering, &x)?;
                Ok(IntegerCuts::Cuts { cuts: vec![cut], set, value })
            }
        }
    }

    /// Heuristic separation at fractional `x*`; keeps cuts whose relative
    /// violation exceeds the threshold.
    pub fn separate_fractional(&self, w_star: f64, x_star: &[f64]) -> Result<Vec<Cut>> {
        let set = fractional_candidate(self.inst, x_star, self.setting.frac, self.setting.base);
        let (base, primary) = self.primary_cut(&set, set.order(), x_star)?;
        let mut out = vec![primary];
        if self.setting.alternative {
            let alt = alternative_sic(self.inst.oracle.as_ref(), &self.inst.knapsacks, &set, &base, x_star)?;
            if alt.family == CutFamily::Alternative {
                out.push(alt);
            }
        }
        out.retain(|c| cuts::relative_violation(c, w_star, x_star) > self.threshold);
        Ok(out)
    }
}

struct Node {
    id: usize,
    depth: usize,
    fixed: Vec<Option<bool>>,
    bound: f64,
}

struct Master<'a> {
    sep: Separator<'a>,
    lp: LpModel,
    cuts: [usize; 4],
    log: RunLog,
}

impl Master<'_> {
    /// Adds `w >= c0 + g x`; false if the row was already present.
    fn add_cut(&mut self, cut: &Cut) -> Result<bool> {
        let mut terms = vec![(0, -1.0)];
        terms.extend(cut.support().map(|(i, g)| (i + 1, g)));
        let before = self.lp.num_rows();
        self.lp.add_row(&terms, -cut.c0)?;
        let added = self.lp.num_rows() > before;
        if added {
            self.cuts[cut.family.index()] += 1;
        }
        Ok(added)
    }
}

/// Exact `min_x Phi(x)` by branch-and-cut.
pub fn solve(inst: &Instance, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let start = Instant::now();
    let deadline = start.checked_add(Duration::from_secs_f64(config.time_limit.min(1e9)));
    let n = inst.num_items();
    if !inst.leader.is_feasible(&vec![false; n]) {
        return Err(Error::Precondition("leader region excludes the empty interdiction".into()));
    }

    let mut lp = LpModel::new();
    lp.add_var("w", 0.0, f64::INFINITY, 1.0)?;
    for i in 0..n {
        lp.add_var(format!("x_{i}"), 0.0, 1.0, 0.0)?;
    }
    for (a, b) in inst.leader.rows() {
        let terms: Vec<(usize, f64)> = a.iter().enumerate().map(|(i, v)| (i + 1, *v)).collect();
        lp.add_row(&terms, *b)?;
    }
    let mut dominance_rows = 0;
    if config.setting.dominance {
        for (i, j) in dominance_preprocess(inst) {
            lp.add_row(&[(j + 1, 1.0), (i + 1, -1.0)], 0.0)?;
            dominance_rows += 1;
        }
    }
    let mut m = Master { sep: Separator::new(inst, config), lp, cuts: [0; 4], log: RunLog::default() };

    // one improved cut from the full-ground greedy keeps the root bounded away from zero
    let root_set = greedy(inst.oracle.as_ref(), &vec![true; n], &ItemSet::new(), &inst.knapsacks);
    let root_cut = improved_sic(inst.oracle.as_ref(), &inst.knapsacks, &root_set, root_set.order())?;
    m.add_cut(&root_cut)?;

    let mut phi_cache: HashMap<Vec<bool>, f64> = HashMap::new();
    let mut incumbent: Option<(f64, Vec<bool>)> = None;
    let mut open = vec![Node { id: 0, depth: 0, fixed: vec![None; n], bound: 0.0 }];
    let mut next_id = 1;
    let mut nodes = 0;
    let mut lower = 0.0f64;
    let mut root_gap = None;
    let mut status = SolveStatus::Optimal;

    let ub = |inc: &Option<(f64, Vec<bool>)>| inc.as_ref().map_or(f64::INFINITY, |(v, _)| *v);
    let gap_of = |inc: &Option<(f64, Vec<bool>)>, lb: f64| inc.as_ref().map_or(100.0, |(v, _)| gap(*v, lb).max(0.0));

    while !open.is_empty() {
        // best bound, ties by node id
        let pos = (0..open.len())
            .min_by(|&a, &b| open[a].bound.total_cmp(&open[b].bound).then(open[a].id.cmp(&open[b].id)))
            .expect("non-empty");
        let node = open.swap_remove(pos);
        let open_min = open.iter().map(|nd| nd.bound).fold(node.bound, f64::min);
        lower = lower.max(open_min.min(ub(&incumbent)));
        if node.bound >= ub(&incumbent) - PRUNE_TOL {
            continue;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            open.push(node);
            status = SolveStatus::TimeLimit;
            break;
        }
        if config.node_limit.is_some_and(|lim| nodes >= lim) {
            open.push(node);
            status = SolveStatus::NodeLimit;
            break;
        }
        nodes += 1;
        let before = m.cuts;
        for (i, f) in node.fixed.iter().enumerate() {
            match f {
                Some(v) => m.lp.fix_var(i + 1, if *v { 1.0 } else { 0.0 })?,
                None => m.lp.unfix_var(i + 1)?,
            }
        }
        let mut frac_done = false;
        let mut timed_out = false;
        let (event, node_bound, branch) = if !inst.leader.fixings_consistent(&node.fixed) {
            ("infeasible", f64::INFINITY, None)
        } else {
            loop {
                let sol = m.lp.solve()?;
                match sol.status {
                    LpStatus::Infeasible => break ("infeasible", f64::INFINITY, None),
                    LpStatus::Unbounded => return Err(Error::Solver("master relaxation unbounded".into())),
                    LpStatus::Optimal => {}
                }
                let w = sol.values[0];
                if w >= ub(&incumbent) - PRUNE_TOL {
                    break ("pruned", w, None);
                }
                let x = &sol.values[1..];
                let integral = x.iter().all(|v| (v - v.round()).abs() <= INT_TOL);
                if integral {
                    let xb: Vec<bool> = x.iter().map(|v| *v > 0.5).collect();
                    let outcome = match phi_cache.get(&xb) {
                        Some(&phi) if phi <= w + CUTOFF_TOL => IntegerCuts::Accept { phi },
                        _ => m.sep.separate_integer(w, &xb, deadline)?,
                    };
                    match outcome {
                        IntegerCuts::TimedOut => {
                            timed_out = true;
                            break ("stopped", w, None);
                        }
                        IntegerCuts::Accept { phi } => {
                            phi_cache.insert(xb.clone(), phi);
                            if phi < ub(&incumbent) {
                                incumbent = Some((phi, xb));
                            }
                            break ("integer", w, None);
                        }
                        IntegerCuts::Cuts { cuts, set, value } => {
                            if !config.setting.enhanced {
                                phi_cache.insert(xb.clone(), value);
                            }
                            let mut any = false;
                            for c in &cuts {
                                any |= m.add_cut(c)?;
                            }
                            if !any {
                                return Err(Error::Solver(format!(
                                    "violated cut from {:?} already in the master LP",
                                    set.sorted()
                                )));
                            }
                            continue;
                        }
                    }
                }
                if !frac_done {
                    frac_done = true;
                    let mut any = false;
                    for c in m.sep.separate_fractional(w, x)? {
                        any |= m.add_cut(&c)?;
                    }
                    if any {
                        continue;
                    }
                }
                // most fractional x_i, ties to the smallest id
                let k = (0..n)
                    .max_by(|&a, &b| {
                        let fa = 0.5 - (x[a] - 0.5).abs();
                        let fb = 0.5 - (x[b] - 0.5).abs();
                        fa.total_cmp(&fb).then(b.cmp(&a))
                    })
                    .expect("n >= 1");
                break ("branch", w, Some(k));
            }
        };

        if let Some(k) = branch {
            for v in [false, true] {
                let mut fixed = node.fixed.clone();
                fixed[k] = Some(v);
                open.push(Node { id: next_id, depth: node.depth + 1, fixed, bound: node_bound });
                next_id += 1;
            }
        }
        if timed_out {
            open.push(Node { bound: node.bound.max(0.0), ..node });
            status = SolveStatus::TimeLimit;
        }
        let open_min = open.iter().map(|nd| nd.bound).fold(f64::INFINITY, f64::min);
        let current_lb = open_min.min(ub(&incumbent));
        if current_lb.is_finite() {
            lower = lower.max(current_lb);
        }
        if node.id == 0 && root_gap.is_none() {
            // before any branching: the root bound is the node's LP value
            let root_lb = if branch.is_some() || timed_out { node_bound } else { current_lb };
            root_gap = Some(gap_of(&incumbent, root_lb.min(ub(&incumbent))));
        }
        m.log.push(LogEvent {
            node: node.id,
            depth: node.depth,
            event: event.to_string(),
            node_bound,
            global_lb: lower,
            incumbent: ub(&incumbent),
            basic: m.cuts[0] - before[0],
            improved: m.cuts[1] - before[1],
            lifted: m.cuts[2] - before[2],
            alternative: m.cuts[3] - before[3],
        });
        if timed_out {
            break;
        }
    }

    let upper = ub(&incumbent);
    if status == SolveStatus::Optimal {
        lower = upper;
    } else {
        let open_min = open.iter().map(|nd| nd.bound).fold(f64::INFINITY, f64::min);
        lower = lower.max(open_min.min(upper));
    }
    if !lower.is_finite() {
        return Err(Error::Solver("search ended without any feasible leader point".into()));
    }
    Ok(SolveResult {
        gap: gap_of(&incumbent, lower),
        root_gap: root_gap.unwrap_or(100.0),
        x: incumbent.map(|(_, x)| x),
        upper,
        lower,
        nodes,
        cuts: m.cuts,
        dominance_rows,
        status,
        seconds: start.elapsed().as_secs_f64(),
        log: m.log,
    })
}
