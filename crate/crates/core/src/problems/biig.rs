//! Bipartite inference interdiction game.
//!
//! Item `i` activates each adjacent target independently with probability
//! `p_i`; the follower picks at most `B` items to maximize the expected number
//! of activated targets, the leader removes at most `k` items first.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cuts::DominatingLists;
use crate::error::{Error, Result};
use crate::instance::{Instance, KnapsackSystem, LeaderRegion};
use crate::numfmt::{round_sig, sig};
use crate::problems::{parse_header, LineReader, Provenance};
use crate::submodular::{Evaluator, GroundSet, SubmodularOracle};

/// Significant digits used for probabilities on disk.
pub const PROB_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct BiigInstance {
    /// Activation probability per item, in `[0, 1]`.
    pub probs: Vec<f64>,
    pub num_targets: usize,
    /// Arcs `(item, target)`, sorted and unique.
    pub arcs: Vec<(usize, usize)>,
    pub budget: usize,
    pub interdiction: usize,
    pub provenance: Option<Provenance>,
}

impl BiigInstance {
    pub fn new(
        probs: Vec<f64>,
        num_targets: usize,
        mut arcs: Vec<(usize, usize)>,
        budget: usize,
        interdiction: usize,
    ) -> Result<Self> {
        arcs.sort_unstable();
        arcs.dedup();
        let inst = Self { probs, num_targets, arcs, budget, interdiction, provenance: None };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.probs.is_empty() {
            return Err(Error::Domain("BIIG needs at least one item".into()));
        }
        if self.probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Domain("activation probabilities must lie in [0, 1]".into()));
        }
        if self.arcs.iter().any(|&(i, j)| i >= self.probs.len() || j >= self.num_targets) {
            return Err(Error::Domain("arc endpoint out of range".into()));
        }
        Ok(())
    }

    pub fn num_items(&self) -> usize {
        self.probs.len()
    }

    /// `M(i)` for every item, ascending.
    pub fn targets_of(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_items()];
        for &(i, j) in &self.arcs {
            out[i].push(j);
        }
        out
    }

    pub fn oracle(&self) -> BiigOracle {
        let targets_of = self.targets_of();
        let mut items_of = vec![Vec::new(); self.num_targets];
        for &(i, j) in &self.arcs {
            items_of[j].push(i);
        }
        for list in &mut items_of {
            list.sort_unstable();
        }
        BiigOracle { probs: self.probs.clone(), targets_of, items_of }
    }

    /// `superior[a]` = items `b != a` with `M(a) ⊆ M(b)` and `p_b >= p_a`.
    pub fn superior_relation(&self) -> Vec<Vec<usize>> {
        let targets = self.targets_of();
        let n = self.num_items();
        (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| {
                        b != a && self.probs[b] >= self.probs[a] && is_subset(&targets[a], &targets[b])
                    })
                    .collect()
            })
            .collect()
    }

    /// Replacement lists for lifting, from the neighbour-inclusion test.
    pub fn superiority(&self) -> DominatingLists {
        DominatingLists::new(self.superior_relation())
    }

    pub fn to_instance(&self, name: impl Into<String>) -> Instance {
        let n = self.num_items();
        Instance {
            name: name.into(),
            oracle: Arc::new(self.oracle()),
            knapsacks: KnapsackSystem::cardinality(n, self.budget),
            leader: LeaderRegion::cardinality(n, self.interdiction),
            superior: self.superior_relation(),
        }
    }

    /// Line format: `BIIG n m B k`, `P p_1 .. p_n` (12 significant digits),
    /// `A |A|`, then one `i j` line per arc. Ids are zero-based.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.provenance {
            let _ = writeln!(out, "{}", p.comment_line());
        }
        let _ = writeln!(out, "BIIG {} {} {} {}", self.num_items(), self.num_targets, self.budget, self.interdiction);
        out.push('P');
        for p in &self.probs {
            let _ = write!(out, " {}", sig(*p, PROB_DIGITS));
        }
        out.push('\n');
        let _ = writeln!(out, "A {}", self.arcs.len());
        for (i, j) in &self.arcs {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = LineReader::new(text);
        let (line_no, header) = lines.next_required("header")?;
        let [n, m, budget, k] = parse_header(&header, "BIIG", line_no)?;
        let (line_no, prow) = lines.next_required("probability row")?;
        let mut toks = prow.split_whitespace();
        if toks.next() != Some("P") {
            return Err(Error::Parse { line: line_no, msg: "expected probability row `P ...`".into() });
        }
        let probs = toks
            .map(|t| t.parse::<f64>().map_err(|e| Error::Parse { line: line_no, msg: e.to_string() }))
            .collect::<Result<Vec<_>>>()?;
        if probs.len() != n {
            return Err(Error::Parse { line: line_no, msg: format!("expected {n} probabilities") });
        }
        let (line_no, arow) = lines.next_required("arc count")?;
        let count = crate::problems::wmcig::parse_tagged_usizes(&arow, "A", line_no)?;
        let [count] = count[..] else {
            return Err(Error::Parse { line: line_no, msg: "arc count row is `A <count>`".into() });
        };
        let mut arcs = Vec::with_capacity(count);
        for _ in 0..count {
            let (line_no, row) = lines.next_required("arc")?;
            let mut it = row.split_whitespace().map(|t| t.parse::<usize>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(i)), Some(Ok(j)), None) => arcs.push((i, j)),
                _ => return Err(Error::Parse { line: line_no, msg: "arc rows are `item target`".into() }),
            }
        }
        if let Some((line_no, extra)) = lines.next() {
            return Err(Error::Parse { line: line_no, msg: format!("unexpected trailing line `{extra}`") });
        }
        let mut inst = Self::new(probs, m, arcs, budget, k).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
        inst.provenance = lines.provenance();
        Ok(inst)
    }
}

fn is_subset(small: &[usize], large: &[usize]) -> bool {
    let mut it = large.iter();
    small.iter().all(|s| it.any(|l| l == s))
}

/// Expected activations `z(S) = sum_j (1 - prod_{i in S, (i,j) in A} (1 - p_i))`.
#[derive(Debug, Clone)]
pub struct BiigOracle {
    probs: Vec<f64>,
    targets_of: Vec<Vec<usize>>,
    items_of: Vec<Vec<usize>>,
}

/// Keeps, per target, the product of `(1 - p_i)` over selected neighbours.
/// Products are recomputed over the neighbour list in id order whenever a
/// neighbour toggles, so values never depend on insertion history.
struct ActivationEvaluator<'a> {
    oracle: &'a BiigOracle,
    members: Vec<bool>,
    survive: Vec<f64>,
}

impl ActivationEvaluator<'_> {
    fn refresh(&mut self, item: usize) {
        for &j in &self.oracle.targets_of[item] {
            self.survive[j] = self.oracle.items_of[j]
                .iter()
                .filter(|&&i| self.members[i])
                .map(|&i| 1.0 - self.oracle.probs[i])
                .product();
        }
    }
}

impl Evaluator for ActivationEvaluator<'_> {
    fn len(&self) -> usize {
        self.members.len()
    }

    fn insert(&mut self, item: usize) -> bool {
        if std::mem::replace(&mut self.members[item], true) {
            return false;
        }
        self.refresh(item);
        true
    }

    fn remove(&mut self, item: usize) -> bool {
        if !std::mem::replace(&mut self.members[item], false) {
            return false;
        }
        self.refresh(item);
        true
    }

    fn contains(&self, item: usize) -> bool {
        self.members[item]
    }

    fn value(&self) -> f64 {
        self.survive.iter().map(|s| 1.0 - s).sum()
    }

    fn gain(&self, item: usize) -> f64 {
        if self.members[item] {
            return 0.0;
        }
        let p = self.oracle.probs[item];
        self.oracle.targets_of[item].iter().map(|&j| p * self.survive[j]).sum()
    }

    fn clear(&mut self) {
        self.members.iter_mut().for_each(|m| *m = false);
        self.survive.iter_mut().for_each(|s| *s = 1.0);
    }
}

impl SubmodularOracle for BiigOracle {
    fn ground(&self) -> GroundSet {
        GroundSet::new(self.probs.len()).expect("validated non-empty")
    }

    fn evaluator(&self) -> Box<dyn Evaluator + '_> {
        Box::new(ActivationEvaluator {
            oracle: self,
            members: vec![false; self.probs.len()],
            survive: vec![1.0; self.items_of.len()],
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiigParams {
    pub n: usize,
    /// `m = target_mult * n`.
    pub target_mult: usize,
    pub budget: usize,
    pub interdiction: usize,
    /// Arc probability.
    pub density: f64,
}

/// Random bipartite instance: probabilities uniform in `[0,1]` (rounded to 12
/// significant digits so the file form is exact), each item-target arc
/// present independently with probability `density`.
///
/// Randomness: `ChaCha8Rng::seed_from_u64(seed)`; stream 1 draws the item
/// probabilities, stream 2 one uniform per `(i, j)` pair in row-major order.
pub fn generate(params: &BiigParams, seed: u64) -> Result<BiigInstance> {
    if params.n == 0 || params.target_mult == 0 {
        return Err(Error::Domain("BIIG generator needs n >= 1 and m_mult >= 1".into()));
    }
    if !(0.0..=1.0).contains(&params.density) {
        return Err(Error::Domain("arc density must lie in [0, 1]".into()));
    }
    if params.budget > params.n || params.interdiction > params.n {
        return Err(Error::Domain("budgets cannot exceed n".into()));
    }
    let n = params.n;
    let m = params.target_mult * n;
    let mut prob_rng = ChaCha8Rng::seed_from_u64(seed);
    prob_rng.set_stream(1);
    let probs: Vec<f64> = (0..n).map(|_| round_sig(prob_rng.gen::<f64>(), PROB_DIGITS)).collect();
    let mut arc_rng = ChaCha8Rng::seed_from_u64(seed);
    arc_rng.set_stream(2);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if arc_rng.gen::<f64>() < params.density {
                arcs.push((i, j));
            }
        }
    }
    let mut inst = BiigInstance::new(probs, m, arcs, params.budget, params.interdiction)?;
    inst.provenance = Some(Provenance {
        seed,
        params: format!(
            "family=biig,n={n},m_mult={},B={},k={},d={}",
            params.target_mult, params.budget, params.interdiction, params.density
        ),
    });
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::{check_submodular_monotone, ItemSet};

    /// Items 1..3 with p = 0.3, 0.5, 0.4; targets a..d; arcs
    /// (1,a), (2,a), (2,b), (3,a), (3,c).
    fn example() -> BiigInstance {
        BiigInstance::new(vec![0.3, 0.5, 0.4], 4, vec![(0, 0), (1, 0), (1, 1), (2, 0), (2, 2)], 2, 1).unwrap()
    }

    fn closed_form(inst: &BiigInstance, set: &[usize]) -> f64 {
        (0..inst.num_targets)
            .map(|j| {
                1.0 - set
                    .iter()
                    .filter(|&&i| inst.arcs.contains(&(i, j)))
                    .map(|&i| 1.0 - inst.probs[i])
                    .product::<f64>()
            })
            .sum()
    }

    #[test]
    fn activation_values() {
        let inst = example();
        let o = inst.oracle();
        let z = |s: &[usize]| o.evaluate(&ItemSet::from_items(s.iter().copied())).unwrap();
        assert!((z(&[0, 1]) - 1.15).abs() < 1e-12);
        assert!((z(&[1, 2]) - 1.6).abs() < 1e-12);
        assert!((z(&[0, 2]) - 0.98).abs() < 1e-12);
        assert_eq!(z(&[]), 0.0);
        let rho = o.rho_empty_all();
        for (a, b) in rho.iter().zip([0.3, 1.0, 0.8]) {
            assert!((a - b).abs() < 1e-12);
        }
        let g = o.marginal_gain(&ItemSet::from_items([2]), 1).unwrap();
        assert!((g - 0.8).abs() < 1e-12);
        for s in [vec![0], vec![2, 0], vec![0, 1, 2]] {
            assert!((z(&s) - closed_form(&inst, &s)).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluator_history_independent() {
        let inst = generate(&BiigParams { n: 12, target_mult: 3, budget: 3, interdiction: 2, density: 0.3 }, 4).unwrap();
        let o = inst.oracle();
        let mut ev = o.evaluator();
        for i in [3, 7, 1, 9, 0] {
            ev.insert(i);
        }
        ev.remove(7);
        ev.remove(0);
        ev.insert(5);
        let direct = o.evaluate(&ItemSet::from_items([1, 3, 5, 9])).unwrap();
        assert_eq!(ev.value().to_bits(), direct.to_bits());
    }

    #[test]
    fn superiority_via_neighbour_inclusion() {
        let d = example().superiority();
        // M(1) = {a} ⊆ M(3) = {a, c} and p_3 = 0.4 >= 0.3
        assert!(d.get(0).contains(&2));
        // M(1) ⊆ M(2) too, and p_2 = 0.5
        assert!(d.get(0).contains(&1));
        assert!(d.get(1).is_empty());
    }

    #[test]
    fn text_round_trip() {
        let inst = generate(&BiigParams { n: 15, target_mult: 2, budget: 3, interdiction: 2, density: 0.1 }, 77).unwrap();
        let text = inst.to_text();
        assert_eq!(BiigInstance::parse(&text).unwrap(), inst);
        assert_eq!(BiigInstance::parse(&example().to_text()).unwrap(), example());
        assert!(BiigInstance::parse("BIIG 1 1 1 1\nP 1.5\nA 0\n").is_err());
        assert!(BiigInstance::parse("BIIG 1 1 1 1\nP 0.5\nA 2\n0 0\n").is_err());
    }

    #[test]
    fn generator_rules() {
        let p = BiigParams { n: 20, target_mult: 2, budget: 5, interdiction: 5, density: 0.07 };
        let a = generate(&p, 3).unwrap();
        assert_eq!(a, generate(&p, 3).unwrap());
        assert_eq!(a.num_targets, 40);
        // E|A| = 56, sd ~ 7.2
        assert!((20..=100).contains(&a.arcs.len()), "{}", a.arcs.len());
        assert!(a.probs.iter().all(|p| (0.0..=1.0).contains(p)));
        assert!(check_submodular_monotone(&a.oracle(), 1000, 2).passed());
        assert!(generate(&BiigParams { density: 1.5, ..p.clone() }, 1).is_err());
        assert!(generate(&BiigParams { n: 0, ..p }, 1).is_err());
    }
}
