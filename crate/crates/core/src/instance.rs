//! Problem data shared by the follower and the master: knapsack rows for the
//! follower, the leader's feasible region, and the bundle tying them to an
//! oracle.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::submodular::{ItemSet, SubmodularOracle};

/// Follower constraints `sum_{i in S} c^l_i <= Q_l` for `l = 1..L`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackSystem {
    /// `costs[l][i]`
    costs: Vec<Vec<f64>>,
    capacities: Vec<f64>,
}

impl KnapsackSystem {
    pub fn new(costs: Vec<Vec<f64>>, capacities: Vec<f64>) -> Result<Self> {
        if costs.len() != capacities.len() {
            return Err(Error::Domain("one capacity per knapsack row required".into()));
        }
        let n = costs.first().map_or(0, Vec::len);
        for row in &costs {
            if row.len() != n {
                return Err(Error::Domain("knapsack rows differ in length".into()));
            }
            if row.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
                return Err(Error::Domain("knapsack costs must be finite and non-negative".into()));
            }
        }
        if capacities.iter().any(|q| q.is_nan()) {
            return Err(Error::Domain("capacity is NaN".into()));
        }
        Ok(Self { costs, capacities })
    }

    /// A single row `|S| <= budget`.
    pub fn cardinality(n: usize, budget: usize) -> Self {
        Self { costs: vec![vec![1.0; n]], capacities: vec![budget as f64] }
    }

    pub fn num_rows(&self) -> usize {
        self.capacities.len()
    }

    pub fn cost(&self, row: usize, item: usize) -> f64 {
        self.costs[row][item]
    }

    pub fn capacity(&self, row: usize) -> f64 {
        self.capacities[row]
    }

    /// Per-row load of `set`.
    pub fn load(&self, set: &ItemSet) -> Vec<f64> {
        self.costs.iter().map(|row| set.iter().map(|i| row[i]).sum()).collect()
    }

    pub fn is_feasible(&self, set: &ItemSet) -> bool {
        self.load(set).iter().zip(&self.capacities).all(|(l, q)| *l <= q + 1e-9)
    }

    /// Whether `item` fits on top of `load`.
    pub fn fits(&self, load: &[f64], item: usize) -> bool {
        self.costs
            .iter()
            .zip(load)
            .zip(&self.capacities)
            .all(|((row, l), q)| l + row[item] <= q + 1e-9)
    }

    pub fn add_to_load(&self, load: &mut [f64], item: usize) {
        for (l, row) in load.iter_mut().zip(&self.costs) {
            *l += row[item];
        }
    }

    /// `c^l_cheap <= c^l_dear` for every row.
    pub fn no_costlier(&self, cheap: usize, dear: usize) -> bool {
        self.costs.iter().all(|row| row[cheap] <= row[dear])
    }
}

/// Leader region `{x in {0,1}^n : A x <= b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderRegion {
    n: usize,
    rows: Vec<(Vec<f64>, f64)>,
}

impl LeaderRegion {
    pub fn new(n: usize, rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if rows.iter().any(|(a, b)| a.len() != n || !b.is_finite() || a.iter().any(|v| !v.is_finite())) {
            return Err(Error::Domain("malformed leader row".into()));
        }
        Ok(Self { n, rows })
    }

    /// `sum x_i <= k`.
    pub fn cardinality(n: usize, k: usize) -> Self {
        Self { n, rows: vec![(vec![1.0; n], k as f64)] }
    }

    pub fn num_items(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[(Vec<f64>, f64)] {
        &self.rows
    }

    pub fn is_feasible(&self, x: &[bool]) -> bool {
        self.rows.iter().all(|(a, b)| {
            let act: f64 = a.iter().zip(x).filter(|(_, &xi)| xi).map(|(v, _)| *v).sum();
            act <= b + 1e-9
        })
    }

    /// Whether setting `x_item = 1` keeps `x` feasible.
    pub fn can_add(&self, x: &[bool], item: usize) -> bool {
        let mut y = x.to_vec();
        y[item] = true;
        self.is_feasible(&y)
    }

    /// `A_i <= A_j` column-wise.
    pub fn column_le(&self, i: usize, j: usize) -> bool {
        self.rows.iter().all(|(a, _)| a[i] <= a[j])
    }

    /// False when the partial fixings already force a row violation.
    pub fn fixings_consistent(&self, fixed: &[Option<bool>]) -> bool {
        self.rows.iter().all(|(a, b)| {
            let min_act: f64 = a
                .iter()
                .zip(fixed)
                .map(|(v, f)| match f {
                    Some(true) => *v,
                    Some(false) => 0.0,
                    None => v.min(0.0),
                })
                .sum();
            min_act <= b + 1e-9
        })
    }
}

/// An interdiction game instance: oracle, follower knapsacks, leader region,
/// and the problem-specific item superiority relation.
#[derive(Clone)]
pub struct Instance {
    pub name: String,
    pub oracle: Arc<dyn SubmodularOracle>,
    pub knapsacks: KnapsackSystem,
    pub leader: LeaderRegion,
    /// `superior[a]` lists every `b != a` that may replace `a` without loss:
    /// `rho_t(S + b - a) <= rho_t(S)` for the other items and
    /// `rho_b(S) >= rho_a(S)` for all `S` avoiding both. Costs are not part
    /// of this relation.
    pub superior: Vec<Vec<usize>>,
}

impl std::fmt::Debug for Instance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Instance")
            .field("name", &self.name)
            .field("n", &self.num_items())
            .field("knapsacks", &self.knapsacks)
            .field("leader", &self.leader)
            .finish()
    }
}

impl Instance {
    /// Instance without a known superiority relation.
    pub fn new(
        name: impl Into<String>,
        oracle: Arc<dyn SubmodularOracle>,
        knapsacks: KnapsackSystem,
        leader: LeaderRegion,
    ) -> Result<Self> {
        let n = oracle.ground().len();
        if leader.num_items() != n {
            return Err(Error::Domain("leader region size differs from ground set".into()));
        }
        for l in 0..knapsacks.num_rows() {
            if knapsacks.costs[l].len() != n {
                return Err(Error::Domain("knapsack size differs from ground set".into()));
            }
        }
        Ok(Self {
            name: name.into(),
            oracle,
            knapsacks,
            leader,
            superior: vec![Vec::new(); n],
        })
    }

    pub fn num_items(&self) -> usize {
        self.oracle.ground().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knapsack_validation() {
        assert!(KnapsackSystem::new(vec![vec![1.0, -1.0]], vec![2.0]).is_err());
        assert!(KnapsackSystem::new(vec![vec![1.0]], vec![]).is_err());
        let k = KnapsackSystem::new(vec![vec![2.0, 1.0, 1.0], vec![0.0, 3.0, 1.0]], vec![3.0, 3.0]).unwrap();
        assert!(k.is_feasible(&ItemSet::from_items([0, 2])));
        assert!(!k.is_feasible(&ItemSet::from_items([1, 2])));
        assert!(k.fits(&[2.0, 0.0], 2));
        assert!(k.fits(&[2.0, 0.0], 1));
        assert!(!k.fits(&[2.0, 0.0], 0));
        assert!(!k.no_costlier(2, 0));
        assert!(k.no_costlier(2, 2));
    }

    #[test]
    fn leader_cardinality() {
        let r = LeaderRegion::cardinality(3, 1);
        assert!(r.is_feasible(&[false, true, false]));
        assert!(!r.is_feasible(&[true, true, false]));
        assert!(!r.can_add(&[true, false, false], 2));
        assert!(r.column_le(0, 2));
        assert!(r.fixings_consistent(&[Some(true), None, Some(false)]));
        assert!(!r.fixings_consistent(&[Some(true), Some(true), None]));
    }
}
