//! Set-function oracles over a dense ground set.
//!
//! Every model exposes its objective through [`SubmodularOracle`]. Callers
//! that issue many gain queries against a slowly changing set should grab an
//! [`Evaluator`] from [`SubmodularOracle::evaluator`] and toggle items on it
//! instead of calling [`SubmodularOracle::evaluate`] repeatedly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Absolute tolerance for comparisons between oracle values.
pub const VALUE_TOL: f64 = 1e-9;

/// Ground set `{0, .., n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("ground set must contain at least one item".into()));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn check(&self, item: usize) -> Result<()> {
        if item < self.n {
            Ok(())
        } else {
            Err(Error::Domain(format!("item {item} outside ground set of size {}", self.n)))
        }
    }

    pub fn items(&self) -> std::ops::Range<usize> {
        0..self.n
    }
}

/// A set of items that remembers the order in which members were inserted.
///
/// The insertion order doubles as the ordering `(i_1, .., i_T)` used by the
/// improved cut.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ItemSet {
    mask: Vec<bool>,
    order: Vec<usize>,
}

impl ItemSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from items in the given order, skipping repeats.
    pub fn from_items<I: IntoIterator<Item = usize>>(items: I) -> Self {
        let mut set = Self::new();
        for i in items {
            set.insert(i);
        }
        set
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        Self::from_items(mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
    }

    /// Inserts `item`, appending it to the order. Returns false if already present.
    pub fn insert(&mut self, item: usize) -> bool {
        if item >= self.mask.len() {
            self.mask.resize(item + 1, false);
        }
        if self.mask[item] {
            return false;
        }
        self.mask[item] = true;
        self.order.push(item);
        true
    }

    pub fn remove(&mut self, item: usize) -> bool {
        if !self.contains(item) {
            return false;
        }
        self.mask[item] = false;
        self.order.retain(|&i| i != item);
        true
    }

    pub fn contains(&self, item: usize) -> bool {
        self.mask.get(item).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Members in insertion order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().copied()
    }

    /// Members in ascending id order.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.order.clone();
        v.sort_unstable();
        v
    }

    pub fn max_item(&self) -> Option<usize> {
        self.order.iter().copied().max()
    }

    /// Same members, ascending order.
    pub fn canonical(&self) -> Self {
        Self::from_items(self.sorted())
    }

    pub fn is_subset(&self, other: &ItemSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    /// Checks that `seq` lists every member exactly once.
    pub fn is_permutation(&self, seq: &[usize]) -> bool {
        if seq.len() != self.len() {
            return false;
        }
        let mut seen = vec![false; self.mask.len()];
        for &i in seq {
            if !self.contains(i) || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        true
    }
}

/// Incremental evaluation state for one oracle.
///
/// An evaluator holds a current set `S`; [`Evaluator::value`] must be
/// bit-identical to [`SubmodularOracle::evaluate`] on the same members.
pub trait Evaluator {
    fn len(&self) -> usize;
    /// Adds `item`; returns false if it was already present.
    fn insert(&mut self, item: usize) -> bool;
    /// Removes `item`; returns false if it was absent.
    fn remove(&mut self, item: usize) -> bool;
    fn contains(&self, item: usize) -> bool;
    /// `z(S)`.
    fn value(&self) -> f64;
    /// `rho_item(S)`; zero when `item` is in `S`.
    fn gain(&self, item: usize) -> f64;

    fn clear(&mut self) {
        for i in 0..self.len() {
            self.remove(i);
        }
    }

    /// Replaces the current set with `set`.
    fn load(&mut self, set: &ItemSet) {
        self.clear();
        for i in set.iter() {
            self.insert(i);
        }
    }
}

/// A normalized monotone set function `z: 2^N -> R`.
///
/// Oracles are immutable and shareable; per-worker mutation happens inside
/// the evaluators they hand out.
pub trait SubmodularOracle: Send + Sync {
    fn ground(&self) -> GroundSet;

    fn evaluator(&self) -> Box<dyn Evaluator + '_>;

    fn evaluate(&self, set: &ItemSet) -> Result<f64> {
        let ground = self.ground();
        let mut ev = self.evaluator();
        for i in set.iter() {
            ground.check(i)?;
            ev.insert(i);
        }
        Ok(ev.value())
    }

    fn marginal_gain(&self, set: &ItemSet, item: usize) -> Result<f64> {
        let ground = self.ground();
        ground.check(item)?;
        let mut ev = self.evaluator();
        for i in set.iter() {
            ground.check(i)?;
            ev.insert(i);
        }
        Ok(ev.gain(item))
    }

    /// `rho_i(emptyset)` for every item.
    fn rho_empty_all(&self) -> Vec<f64> {
        let ev = self.evaluator();
        self.ground().items().map(|i| ev.gain(i)).collect()
    }

    /// `rho_i(N \ {i})` for every item.
    fn rho_full_complement_all(&self) -> Vec<f64> {
        let n = self.ground().len();
        let mut ev = self.evaluator();
        for i in 0..n {
            ev.insert(i);
        }
        (0..n)
            .map(|i| {
                ev.remove(i);
                let g = ev.gain(i);
                ev.insert(i);
                g
            })
            .collect()
    }
}

/// Evaluator that recomputes `z` from scratch on every query.
pub struct RecomputeEvaluator<'a, F> {
    f: &'a F,
    mask: Vec<bool>,
}

impl<'a, F: Fn(&[bool]) -> f64> RecomputeEvaluator<'a, F> {
    pub fn new(f: &'a F, n: usize) -> Self {
        Self { f, mask: vec![false; n] }
    }
}

impl<F: Fn(&[bool]) -> f64> Evaluator for RecomputeEvaluator<'_, F> {
    fn len(&self) -> usize {
        self.mask.len()
    }

    fn insert(&mut self, item: usize) -> bool {
        !std::mem::replace(&mut self.mask[item], true)
    }

    fn remove(&mut self, item: usize) -> bool {
        std::mem::replace(&mut self.mask[item], false)
    }

    fn contains(&self, item: usize) -> bool {
        self.mask[item]
    }

    fn value(&self) -> f64 {
        (self.f)(&self.mask)
    }

    fn gain(&self, item: usize) -> f64 {
        if self.mask[item] {
            return 0.0;
        }
        let mut with = self.mask.clone();
        with[item] = true;
        (self.f)(&with) - (self.f)(&self.mask)
    }
}

/// Oracle defined by a closure over the membership mask.
///
/// Useful for tests and ad-hoc objectives. No structure is assumed, so the
/// closure is trusted to be normalized.
pub struct FnOracle<F> {
    ground: GroundSet,
    f: F,
}

impl<F: Fn(&[bool]) -> f64 + Send + Sync> FnOracle<F> {
    pub fn new(n: usize, f: F) -> Result<Self> {
        Ok(Self { ground: GroundSet::new(n)?, f })
    }
}

impl<F: Fn(&[bool]) -> f64 + Send + Sync> SubmodularOracle for FnOracle<F> {
    fn ground(&self) -> GroundSet {
        self.ground
    }

    fn evaluator(&self) -> Box<dyn Evaluator + '_> {
        Box::new(RecomputeEvaluator::new(&self.f, self.ground.len()))
    }
}

/// Additive objective `z(S) = sum_{i in S} c_i` with `c_i >= 0`.
#[derive(Debug, Clone)]
pub struct ModularOracle {
    weights: Vec<f64>,
}

impl ModularOracle {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        GroundSet::new(weights.len())?;
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Domain("modular weights must be finite and non-negative".into()));
        }
        Ok(Self { weights })
    }
}

struct ModularEvaluator<'a> {
    weights: &'a [f64],
    mask: Vec<bool>,
}

impl Evaluator for ModularEvaluator<'_> {
    fn len(&self) -> usize {
        self.mask.len()
    }

    fn insert(&mut self, item: usize) -> bool {
        !std::mem::replace(&mut self.mask[item], true)
    }

    fn remove(&mut self, item: usize) -> bool {
        std::mem::replace(&mut self.mask[item], false)
    }

    fn contains(&self, item: usize) -> bool {
        self.mask[item]
    }

    fn value(&self) -> f64 {
        // Summed in id order so the result does not depend on insertion history.
        self.weights
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|(w, _)| *w)
            .sum()
    }

    fn gain(&self, item: usize) -> f64 {
        if self.mask[item] {
            0.0
        } else {
            self.weights[item]
        }
    }
}

impl SubmodularOracle for ModularOracle {
    fn ground(&self) -> GroundSet {
        GroundSet { n: self.weights.len() }
    }

    fn evaluator(&self) -> Box<dyn Evaluator + '_> {
        Box::new(ModularEvaluator {
            weights: &self.weights,
            mask: vec![false; self.weights.len()],
        })
    }
}

/// One failed check found by [`check_submodular_monotone`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `rho_i(S) < rho_i(T)` for `S ⊆ T`, `i ∉ T`.
    Submodularity { small: Vec<usize>, large: Vec<usize>, item: usize, gain_small: f64, gain_large: f64 },
    /// `z(S) > z(T)` for `S ⊆ T`.
    Monotonicity { small: Vec<usize>, large: Vec<usize>, value_small: f64, value_large: f64 },
    /// `z(emptyset) != 0`.
    NotNormalized { value: f64 },
}

#[derive(Debug, Clone, Default)]
pub struct PropertyReport {
    pub trials: usize,
    pub violations: Vec<Violation>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples random triples `S ⊆ T ⊆ N`, `i ∉ T` and records every breach of
/// diminishing returns or monotonicity beyond [`VALUE_TOL`].
pub fn check_submodular_monotone(oracle: &dyn SubmodularOracle, trials: usize, seed: u64) -> PropertyReport {
    let n = oracle.ground().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = PropertyReport { trials, violations: Vec::new() };
    let empty = oracle.evaluator().value();
    if empty.abs() > VALUE_TOL {
        report.violations.push(Violation::NotNormalized { value: empty });
    }
    let mut small_ev = oracle.evaluator();
    let mut large_ev = oracle.evaluator();
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..trials {
        perm.shuffle(&mut rng);
        // perm[0] is the probe item; T draws from the rest, S from T.
        let item = perm[0];
        let t_size = rng.gen_range(0..n);
        let s_size = rng.gen_range(0..=t_size);
        let large: Vec<usize> = perm[1..=t_size].to_vec();
        let small: Vec<usize> = large[..s_size].to_vec();
        small_ev.clear();
        large_ev.clear();
        for &i in &small {
            small_ev.insert(i);
        }
        for &i in &large {
            large_ev.insert(i);
        }
        let (vs, vl) = (small_ev.value(), large_ev.value());
        if vs > vl + VALUE_TOL {
            report.violations.push(Violation::Monotonicity {
                small: small.clone(),
                large: large.clone(),
                value_small: vs,
                value_large: vl,
            });
        }
        let (gs, gl) = (small_ev.gain(item), large_ev.gain(item));
        if gs < gl - VALUE_TOL {
            report.violations.push(Violation::Submodularity {
                small,
                large,
                item,
                gain_small: gs,
                gain_large: gl,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn item_set_keeps_insertion_order() {
        let mut s = ItemSet::from_items([4, 1, 4, 2]);
        assert_eq!(s.order(), &[4, 1, 2]);
        assert_eq!(s.sorted(), vec![1, 2, 4]);
        assert!(s.remove(1));
        assert!(!s.remove(1));
        assert_eq!(s.order(), &[4, 2]);
        assert!(s.is_permutation(&[2, 4]));
        assert!(!s.is_permutation(&[2, 2]));
        assert!(!s.is_permutation(&[2]));
    }

    #[test]
    fn empty_ground_set_rejected() {
        assert!(GroundSet::new(0).is_err());
        assert!(ModularOracle::new(vec![]).is_err());
    }

    #[test]
    fn modular_oracle_gains_equal_weights() {
        let o = ModularOracle::new(vec![1.5, 0.0, 3.0]).unwrap();
        assert_eq!(o.rho_empty_all(), vec![1.5, 0.0, 3.0]);
        assert_eq!(o.rho_full_complement_all(), vec![1.5, 0.0, 3.0]);
        assert_eq!(o.evaluate(&ItemSet::new()).unwrap(), 0.0);
        assert_eq!(o.marginal_gain(&ItemSet::from_items([0]), 0).unwrap(), 0.0);
        assert!(o.evaluate(&ItemSet::from_items([3])).is_err());
        assert!(o.marginal_gain(&ItemSet::new(), 7).is_err());
        assert!(check_submodular_monotone(&o, 200, 3).passed());
    }

    #[test]
    fn supermodular_square_is_flagged() {
        let o = FnOracle::new(5, |m: &[bool]| {
            let c = m.iter().filter(|&&b| b).count() as f64;
            c * c
        })
        .unwrap();
        let report = check_submodular_monotone(&o, 200, 1);
        assert!(!report.passed());
        assert!(report.violations.iter().any(|v| matches!(v, Violation::Submodularity { .. })));
        // the hand-checked witness: rho_b(∅) = 1 < rho_b({a}) = 3
        let a = o.marginal_gain(&ItemSet::new(), 1).unwrap();
        let b = o.marginal_gain(&ItemSet::from_items([0]), 1).unwrap();
        assert_eq!((a, b), (1.0, 3.0));
    }

    #[test]
    fn decreasing_function_fails_monotonicity() {
        let o = FnOracle::new(4, |m: &[bool]| -(m.iter().filter(|&&b| b).count() as f64)).unwrap();
        let report = check_submodular_monotone(&o, 100, 9);
        assert!(report.violations.iter().any(|v| matches!(v, Violation::Monotonicity { .. })));
    }
}
