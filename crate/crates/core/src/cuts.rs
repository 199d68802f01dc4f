//! Submodular interdiction cuts.
//!
//! Every cut is stored twice: as the term list it was derived from (so the
//! derivation can be audited) and folded into `w >= c0 + sum_i g_i x_i`,
//! which is what the LP sees.

use crate::error::{Error, Result};
use crate::instance::{Instance, KnapsackSystem};
use crate::submodular::{ItemSet, SubmodularOracle};

/// Lifting and alternative pairs are accepted only above this value.
const PAIR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutFamily {
    Basic,
    Improved,
    Lifted,
    Alternative,
}

impl CutFamily {
    pub const ALL: [CutFamily; 4] = [Self::Basic, Self::Improved, Self::Lifted, Self::Alternative];

    pub fn name(self) -> &'static str {
        match self {
            Self::Basic => "basic",
            Self::Improved => "improved",
            Self::Lifted => "lifted",
            Self::Alternative => "alternative",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// One term of a cut's right-hand side as derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutTerm {
    /// `-coef * x_item`
    Interdict { item: usize, coef: f64 },
    /// `+coef * (1 - x_b)`, `b` replacing `a`.
    Lift { a: usize, b: usize, coef: f64 },
    /// `+coef * (x_a - x_b)`
    Swap { a: usize, b: usize, coef: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub c0: f64,
    /// Dense coefficient vector over the ground set.
    pub g: Vec<f64>,
    pub family: CutFamily,
    pub source_set: ItemSet,
    /// `z(S_hat)`.
    pub z_hat: f64,
    pub terms: Vec<CutTerm>,
}

impl Cut {
    fn from_terms(n: usize, family: CutFamily, source_set: ItemSet, z_hat: f64, terms: Vec<CutTerm>) -> Self {
        let mut c0 = z_hat;
        let mut g = vec![0.0; n];
        for t in &terms {
            match *t {
                CutTerm::Interdict { item, coef } => g[item] -= coef,
                CutTerm::Lift { b, coef, .. } => {
                    c0 += coef;
                    g[b] -= coef;
                }
                CutTerm::Swap { a, b, coef } => {
                    g[a] += coef;
                    g[b] -= coef;
                }
            }
        }
        Self { c0, g, family, source_set, z_hat, terms }
    }

    fn extended(&self, family: CutFamily, extra: Vec<CutTerm>) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(extra);
        Self::from_terms(self.g.len(), family, self.source_set.clone(), self.z_hat, terms)
    }

    pub fn num_items(&self) -> usize {
        self.g.len()
    }

    /// `c0 + g·x`.
    pub fn rhs(&self, x: &[f64]) -> f64 {
        self.c0 + self.g.iter().zip(x).map(|(g, x)| g * x).sum::<f64>()
    }

    /// The right-hand side evaluated term by term in derived form.
    pub fn rhs_expanded(&self, x: &[f64]) -> f64 {
        self.z_hat
            + self
                .terms
                .iter()
                .map(|t| match *t {
                    CutTerm::Interdict { item, coef } => -coef * x[item],
                    CutTerm::Lift { b, coef, .. } => coef * (1.0 - x[b]),
                    CutTerm::Swap { a, b, coef } => coef * (x[a] - x[b]),
                })
                .sum::<f64>()
    }

    pub fn rhs_binary(&self, x: &[bool]) -> f64 {
        self.c0 + self.g.iter().zip(x).filter(|(_, &xi)| xi).map(|(g, _)| *g).sum::<f64>()
    }

    /// `(i, g_i)` for the non-zero coefficients.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.g.iter().enumerate().filter(|(_, g)| **g != 0.0).map(|(i, g)| (i, *g))
    }

    /// Lifting or swap pairs `(a, b, coef)` in derivation order.
    pub fn pairs(&self) -> Vec<(usize, usize, f64)> {
        self.terms
            .iter()
            .filter_map(|t| match *t {
                CutTerm::Lift { a, b, coef } | CutTerm::Swap { a, b, coef } => Some((a, b, coef)),
                CutTerm::Interdict { .. } => None,
            })
            .collect()
    }

    /// Same canonical row (bitwise).
    pub fn same_row(&self, other: &Cut) -> bool {
        self.c0.to_bits() == other.c0.to_bits()
            && self.g.len() == other.g.len()
            && self.g.iter().zip(&other.g).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// `rhs(x*) - w*`; positive when violated.
pub fn cut_violation(cut: &Cut, w_star: f64, x_star: &[f64]) -> f64 {
    cut.rhs(x_star) - w_star
}

/// `(rhs(x*) - w*) / (|rhs(x*)| + 0.1)`.
pub fn relative_violation(cut: &Cut, w_star: f64, x_star: &[f64]) -> f64 {
    let rhs = cut.rhs(x_star);
    (rhs - w_star) / (rhs.abs() + 0.1)
}

/// Replacement candidates per item for lifting: `get(a)` lists items `b`
/// that may replace `a` and are no costlier on any knapsack row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DominatingLists {
    lists: Vec<Vec<usize>>,
}

impl DominatingLists {
    pub fn new(mut lists: Vec<Vec<usize>>) -> Self {
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
        }
        Self { lists }
    }

    pub fn empty(n: usize) -> Self {
        Self { lists: vec![Vec::new(); n] }
    }

    /// The instance's superiority relation filtered by the cost condition.
    pub fn for_instance(inst: &Instance) -> Self {
        Self::new(
            inst.superior
                .iter()
                .enumerate()
                .map(|(a, sup)| sup.iter().copied().filter(|&b| inst.knapsacks.no_costlier(b, a)).collect())
                .collect(),
        )
    }

    pub fn get(&self, item: usize) -> &[usize] {
        self.lists.get(item).map_or(&[], Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.lists.iter().all(Vec::is_empty)
    }
}

fn check_feasible(knapsacks: &KnapsackSystem, s_hat: &ItemSet) -> Result<()> {
    if knapsacks.is_feasible(s_hat) {
        Ok(())
    } else {
        Err(Error::Precondition("source set violates a follower knapsack".into()))
    }
}

fn check_items(oracle: &dyn SubmodularOracle, s_hat: &ItemSet) -> Result<()> {
    let ground = oracle.ground();
    s_hat.iter().try_for_each(|i| ground.check(i))
}

/// `w >= z(S) - sum_{i in S} rho_i(empty) x_i`.
pub fn basic_sic(oracle: &dyn SubmodularOracle, knapsacks: &KnapsackSystem, s_hat: &ItemSet) -> Result<Cut> {
    check_items(oracle, s_hat)?;
    check_feasible(knapsacks, s_hat)?;
    let empty = oracle.evaluator();
    let terms = s_hat
        .sorted()
        .into_iter()
        .map(|i| CutTerm::Interdict { item: i, coef: empty.gain(i) })
        .collect();
    let z_hat = oracle.evaluate(s_hat)?;
    Ok(Cut::from_terms(oracle.ground().len(), CutFamily::Basic, s_hat.clone(), z_hat, terms))
}

/// `w >= z(S) - sum_t rho_{i_t}(S_(t)) x_{i_t}` for the prefix sets of
/// `ordering`.
pub fn improved_sic(
    oracle: &dyn SubmodularOracle,
    knapsacks: &KnapsackSystem,
    s_hat: &ItemSet,
    ordering: &[usize],
) -> Result<Cut> {
    check_items(oracle, s_hat)?;
    if !s_hat.is_permutation(ordering) {
        return Err(Error::Precondition("ordering is not a permutation of the source set".into()));
    }
    check_feasible(knapsacks, s_hat)?;
    let mut ev = oracle.evaluator();
    let mut terms = Vec::with_capacity(ordering.len());
    for &i in ordering {
        terms.push(CutTerm::Interdict { item: i, coef: ev.gain(i) });
        ev.insert(i);
    }
    let z_hat = oracle.evaluate(s_hat)?;
    Ok(Cut::from_terms(oracle.ground().len(), CutFamily::Improved, s_hat.clone(), z_hat, terms))
}

/// Items of `s_hat` by `rho_i(empty)` descending, ties by id.
pub fn default_ordering(oracle: &dyn SubmodularOracle, s_hat: &ItemSet) -> Vec<usize> {
    let empty = oracle.evaluator();
    let mut items: Vec<(usize, f64)> = s_hat.sorted().into_iter().map(|i| (i, empty.gain(i))).collect();
    items.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    items.into_iter().map(|(i, _)| i).collect()
}

fn check_base(base: &Cut, s_hat: &ItemSet) -> Result<()> {
    if !matches!(base.family, CutFamily::Basic | CutFamily::Improved) {
        return Err(Error::Precondition("base cut must be basic or improved".into()));
    }
    if base.source_set.canonical() != s_hat.canonical() {
        return Err(Error::Precondition("base cut was built for a different set".into()));
    }
    Ok(())
}

/// Lifts `base` with pairs `(a_k, b_k)`, `b_k` taken from the dominating list
/// of `a_k`, adding `beta_k (1 - x_{b_k})` with
/// `beta_k = rho_{b_k}(S ∪ B_(k-1)) - rho_{a_k}(S ∪ {b_k} \ {a_k})`.
///
/// Items of `S` are visited by `rho(empty)` descending; each picks the unused
/// candidate maximizing `beta * (1 - x*_b)` and keeps it only if that score
/// and `beta` are positive. Returns `base` unchanged when nothing qualifies.
pub fn lift_sic(
    oracle: &dyn SubmodularOracle,
    s_hat: &ItemSet,
    base: &Cut,
    x_star: &[f64],
    lists: &DominatingLists,
) -> Result<Cut> {
    check_base(base, s_hat)?;
    let n = oracle.ground().len();
    let mut used = vec![false; n];
    for i in s_hat.iter() {
        used[i] = true;
    }
    let mut with_b = oracle.evaluator(); // S ∪ B
    with_b.load(s_hat);
    let mut swap = oracle.evaluator(); // S \ {a}, then ± b
    let mut extra = Vec::new();
    for a in default_ordering(oracle, s_hat) {
        let mut without_a = s_hat.clone();
        without_a.remove(a);
        swap.load(&without_a);
        let mut best: Option<(usize, f64, f64)> = None;
        for &b in lists.get(a) {
            if used[b] {
                continue;
            }
            swap.insert(b);
            let beta = with_b.gain(b) - swap.gain(a);
            swap.remove(b);
            let score = beta * (1.0 - x_star[b]);
            if best.map_or(true, |(_, s, _)| score > s) {
                best = Some((b, score, beta));
            }
        }
        if let Some((b, score, beta)) = best {
            if score > 0.0 && beta > PAIR_TOL {
                used[b] = true;
                with_b.insert(b);
                extra.push(CutTerm::Lift { a, b, coef: beta });
            }
        }
    }
    if extra.is_empty() {
        return Ok(base.clone());
    }
    Ok(base.extended(CutFamily::Lifted, extra))
}

/// Adds swap terms `gamma_k (x_{a_k} - x_{b_k})` with
/// `gamma_k = rho_{b_k}(S ∪ B_(k-1) \ {a_k})` to a basic or improved cut.
///
/// Candidates for `a` are items outside `S` that are no costlier on every
/// knapsack row; the one maximizing `gamma * (x*_a - x*_b)` is kept when that
/// score is positive. Returns `base` unchanged when nothing qualifies.
pub fn alternative_sic(
    oracle: &dyn SubmodularOracle,
    knapsacks: &KnapsackSystem,
    s_hat: &ItemSet,
    base: &Cut,
    x_star: &[f64],
) -> Result<Cut> {
    check_base(base, s_hat)?;
    let n = oracle.ground().len();
    let mut used = vec![false; n];
    for i in s_hat.iter() {
        used[i] = true;
    }
    let mut current = s_hat.clone(); // S ∪ B
    let mut ev = oracle.evaluator();
    let mut extra = Vec::new();
    for a in default_ordering(oracle, s_hat) {
        let mut minus_a = current.clone();
        minus_a.remove(a);
        ev.load(&minus_a);
        let mut best: Option<(usize, f64, f64)> = None;
        for b in 0..n {
            if used[b] || !knapsacks.no_costlier(b, a) {
                continue;
            }
            let gamma = ev.gain(b);
            let score = gamma * (x_star[a] - x_star[b]);
            if best.map_or(true, |(_, s, _)| score > s) {
                best = Some((b, score, gamma));
            }
        }
        if let Some((b, score, gamma)) = best {
            if score > PAIR_TOL {
                used[b] = true;
                current.insert(b);
                extra.push(CutTerm::Swap { a, b, coef: gamma });
            }
        }
    }
    if extra.is_empty() {
        return Ok(base.clone());
    }
    Ok(base.extended(CutFamily::Alternative, extra))
}
