//! Exhaustive ground truth for small instances. Deliberately shares nothing
//! with the follower solver beyond plain set evaluation.

use crate::error::{Error, Result};
use crate::instance::{Instance, KnapsackSystem};
use crate::submodular::{ItemSet, SubmodularOracle};

pub const MAX_AVAILABLE: usize = 25;
pub const MAX_LEADER_ITEMS: usize = 20;

/// Best follower value over subsets of `available`, by depth-first
/// enumeration that skips branches once a knapsack overflows.
pub fn brute_force_phi(oracle: &dyn SubmodularOracle, available: &[usize], knapsacks: &KnapsackSystem) -> Result<f64> {
    if available.len() > MAX_AVAILABLE {
        return Err(Error::TooLarge(format!("{} available items (limit {MAX_AVAILABLE})", available.len())));
    }
    let n = oracle.ground().len();
    if available.iter().any(|&i| i >= n) {
        return Err(Error::Domain("available item out of range".into()));
    }
    let rows = knapsacks.num_rows();
    let mut best = 0.0f64;
    let mut chosen = Vec::with_capacity(available.len());
    let mut load = vec![0.0; rows];
    enumerate(oracle, available, knapsacks, 0, &mut chosen, &mut load, &mut best)?;
    Ok(best)
}

fn enumerate(
    oracle: &dyn SubmodularOracle,
    items: &[usize],
    knapsacks: &KnapsackSystem,
    next: usize,
    chosen: &mut Vec<usize>,
    load: &mut Vec<f64>,
    best: &mut f64,
) -> Result<()> {
    if next == items.len() {
        let v = oracle.evaluate(&ItemSet::from_items(chosen.iter().copied()))?;
        if v > *best {
            *best = v;
        }
        return Ok(());
    }
    let i = items[next];
    let fits = (0..knapsacks.num_rows()).all(|l| load[l] + knapsacks.cost(l, i) <= knapsacks.capacity(l) + 1e-9);
    if fits {
        for (l, v) in load.iter_mut().enumerate() {
            *v += knapsacks.cost(l, i);
        }
        chosen.push(i);
        enumerate(oracle, items, knapsacks, next + 1, chosen, load, best)?;
        chosen.pop();
        for (l, v) in load.iter_mut().enumerate() {
            *v -= knapsacks.cost(l, i);
        }
    }
    enumerate(oracle, items, knapsacks, next + 1, chosen, load, best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub value: f64,
    /// Lexicographically smallest optimal interdiction (as a 0/1 vector,
    /// compared position by position).
    pub x: Vec<bool>,
    /// `Phi(x)` for every leader-feasible `x`, in enumeration order.
    pub table: Vec<(Vec<bool>, f64)>,
}

impl BruteForceResult {
    pub fn phi(&self, x: &[bool]) -> Option<f64> {
        self.table.iter().find(|(t, _)| t == x).map(|(_, v)| *v)
    }
}

/// Every leader-feasible `x` in `{0,1}^n` (`n <= 20`), in lexicographic
/// order of the 0/1 vector.
pub fn leader_points(inst: &Instance) -> Result<Vec<Vec<bool>>> {
    let n = inst.num_items();
    if n > MAX_LEADER_ITEMS {
        return Err(Error::TooLarge(format!("{n} items (limit {MAX_LEADER_ITEMS})")));
    }
    let mut out = Vec::new();
    for code in 0u32..(1u32 << n) {
        // bit n-1-i is x_i, so numeric order is lexicographic order
        let x: Vec<bool> = (0..n).map(|i| code >> (n - 1 - i) & 1 == 1).collect();
        if inst.leader.is_feasible(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Exact `min_x Phi(x)` by enumerating every leader-feasible `x`.
pub fn brute_force_solve(inst: &Instance) -> Result<BruteForceResult> {
    let points = leader_points(inst)?;
    let mut table = Vec::with_capacity(points.len());
    let mut best: Option<(f64, Vec<bool>)> = None;
    for x in points {
        let available: Vec<usize> = (0..x.len()).filter(|&i| !x[i]).collect();
        let v = brute_force_phi(inst.oracle.as_ref(), &available, &inst.knapsacks)?;
        // strict improvement keeps the first (smallest) optimum
        if best.as_ref().map_or(true, |(b, _)| v < *b - 1e-9) {
            best = Some((v, x.clone()));
        }
        table.push((x, v));
    }
    let (value, x) = best.ok_or_else(|| Error::Precondition("leader region is empty".into()))?;
    Ok(BruteForceResult { value, x, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{BiigInstance, WmcigInstance};

    #[test]
    fn coverage_example() {
        let w = WmcigInstance::new(vec![5, 9, 6, 4], vec![vec![0, 2], vec![0, 1], vec![0, 2, 3]], 2, 1).unwrap();
        let inst = w.to_instance("ex2");
        assert_eq!(brute_force_phi(inst.oracle.as_ref(), &[0, 1, 2], &inst.knapsacks).unwrap(), 24.0);
        assert_eq!(brute_force_phi(inst.oracle.as_ref(), &[], &inst.knapsacks).unwrap(), 0.0);
        let r = brute_force_solve(&inst).unwrap();
        assert_eq!(r.value, 15.0);
        assert_eq!(r.x, vec![false, true, false]);
        assert_eq!(r.phi(&[true, false, false]), Some(24.0));
        assert_eq!(r.phi(&[false, false, true]), Some(20.0));
        let k0 = WmcigInstance { interdiction: 0, ..w }.to_instance("k0");
        assert_eq!(brute_force_solve(&k0).unwrap().value, 24.0);
    }

    #[test]
    fn activation_example() {
        let b = BiigInstance::new(vec![0.3, 0.5, 0.4], 4, vec![(0, 0), (1, 0), (1, 1), (2, 0), (2, 2)], 2, 1).unwrap();
        let inst = b.to_instance("ex1");
        let v = brute_force_phi(inst.oracle.as_ref(), &[0, 2], &inst.knapsacks).unwrap();
        assert!((v - 0.98).abs() < 1e-12);
        let r = brute_force_solve(&inst).unwrap();
        assert!((r.value - 0.98).abs() < 1e-12);
        assert_eq!(r.x, vec![false, true, false]);
    }

    #[test]
    fn guards() {
        let w = WmcigInstance::new(vec![1; 30], (0..30).map(|i| vec![i]).collect(), 2, 1).unwrap();
        let inst = w.to_instance("big");
        let all: Vec<usize> = (0..30).collect();
        assert!(matches!(brute_force_phi(inst.oracle.as_ref(), &all, &inst.knapsacks), Err(Error::TooLarge(_))));
        assert!(matches!(brute_force_solve(&inst), Err(Error::TooLarge(_))));
    }
}
