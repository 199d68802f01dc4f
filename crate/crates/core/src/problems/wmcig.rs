//! Weighted maximal coverage interdiction game.
//!
//! Facilities `0..n` cover subsets of customers `0..m`; the follower opens at
//! most `B` facilities to maximize the profit of covered customers, the
//! leader closes at most `k` facilities beforehand.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cuts::DominatingLists;
use crate::error::{Error, Result};
use crate::instance::{Instance, KnapsackSystem, LeaderRegion};
use crate::problems::{parse_header, LineReader, Provenance};
use crate::submodular::{Evaluator, GroundSet, SubmodularOracle};

#[derive(Debug, Clone, PartialEq)]
pub struct WmcigInstance {
    /// Customer profits, all `>= 1`.
    pub profits: Vec<i64>,
    /// `coverage[i]`: customers covered by facility `i`, ascending.
    pub coverage: Vec<Vec<usize>>,
    /// Follower budget `B`.
    pub budget: usize,
    /// Leader budget `k`.
    pub interdiction: usize,
    pub provenance: Option<Provenance>,
}

impl WmcigInstance {
    pub fn new(profits: Vec<i64>, coverage: Vec<Vec<usize>>, budget: usize, interdiction: usize) -> Result<Self> {
        let inst = Self { profits, coverage, budget, interdiction, provenance: None };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.coverage.is_empty() {
            return Err(Error::Domain("WMCIG needs at least one facility".into()));
        }
        if self.profits.iter().any(|&p| p < 1) {
            return Err(Error::Domain("customer profits must be >= 1".into()));
        }
        let m = self.profits.len();
        for cov in &self.coverage {
            if cov.iter().any(|&j| j >= m) {
                return Err(Error::Domain("coverage refers to unknown customer".into()));
            }
            if cov.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Domain("coverage lists must be strictly ascending".into()));
            }
        }
        Ok(())
    }

    pub fn num_facilities(&self) -> usize {
        self.coverage.len()
    }

    pub fn num_customers(&self) -> usize {
        self.profits.len()
    }

    pub fn oracle(&self) -> WmcigOracle {
        WmcigOracle { profits: self.profits.clone(), coverage: self.coverage.clone() }
    }

    /// `superior[a]` = facilities `b != a` with `J(a) ⊆ J(b)`.
    pub fn superior_relation(&self) -> Vec<Vec<usize>> {
        let n = self.num_facilities();
        (0..n)
            .map(|a| (0..n).filter(|&b| b != a && is_subset(&self.coverage[a], &self.coverage[b])).collect())
            .collect()
    }

    /// Replacement lists for lifting: `b` may replace `a` when it covers
    /// every customer `a` covers (so `rho_a({b}) = 0`).
    pub fn superiority(&self) -> DominatingLists {
        // unit costs: the cost condition always holds
        DominatingLists::new(self.superior_relation())
    }

    pub fn to_instance(&self, name: impl Into<String>) -> Instance {
        let n = self.num_facilities();
        Instance {
            name: name.into(),
            oracle: Arc::new(self.oracle()),
            knapsacks: KnapsackSystem::cardinality(n, self.budget),
            leader: LeaderRegion::cardinality(n, self.interdiction),
            superior: self.superior_relation(),
        }
    }

    /// Line format: `WMCIG n m B k`, `P p_1 .. p_m`, then `C i |J(i)| j..`
    /// per facility. Ids are zero-based.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.provenance {
            let _ = writeln!(out, "{}", p.comment_line());
        }
        let _ = writeln!(
            out,
            "WMCIG {} {} {} {}",
            self.num_facilities(),
            self.num_customers(),
            self.budget,
            self.interdiction
        );
        out.push('P');
        for p in &self.profits {
            let _ = write!(out, " {p}");
        }
        out.push('\n');
        for (i, cov) in self.coverage.iter().enumerate() {
            let _ = write!(out, "C {i} {}", cov.len());
            for j in cov {
                let _ = write!(out, " {j}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = LineReader::new(text);
        let (line_no, header) = lines.next_required("header")?;
        let [n, m, budget, k] = parse_header(&header, "WMCIG", line_no)?;
        let (line_no, prow) = lines.next_required("profit row")?;
        let mut toks = prow.split_whitespace();
        if toks.next() != Some("P") {
            return Err(Error::Parse { line: line_no, msg: "expected profit row `P ...`".into() });
        }
        let profits = toks
            .map(|t| t.parse::<i64>().map_err(|e| Error::Parse { line: line_no, msg: e.to_string() }))
            .collect::<Result<Vec<_>>>()?;
        if profits.len() != m {
            return Err(Error::Parse { line: line_no, msg: format!("expected {m} profits, found {}", profits.len()) });
        }
        let mut coverage = vec![None; n];
        for _ in 0..n {
            let (line_no, row) = lines.next_required("coverage row")?;
            let nums = parse_tagged_usizes(&row, "C", line_no)?;
            if nums.len() < 2 || nums.len() != nums[1] + 2 {
                return Err(Error::Parse { line: line_no, msg: "coverage row length mismatch".into() });
            }
            let i = nums[0];
            if i >= n || coverage[i].is_some() {
                return Err(Error::Parse { line: line_no, msg: format!("bad or repeated facility id {i}") });
            }
            let mut cov = nums[2..].to_vec();
            cov.sort_unstable();
            coverage[i] = Some(cov);
        }
        if let Some((line_no, extra)) = lines.next() {
            return Err(Error::Parse { line: line_no, msg: format!("unexpected trailing line `{extra}`") });
        }
        let inst = Self {
            profits,
            coverage: coverage.into_iter().map(|c| c.unwrap_or_default()).collect(),
            budget,
            interdiction: k,
            provenance: lines.provenance(),
        };
        inst.validate().map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
        Ok(inst)
    }
}

pub(crate) fn parse_tagged_usizes(row: &str, tag: &str, line: usize) -> Result<Vec<usize>> {
    let mut toks = row.split_whitespace();
    if toks.next() != Some(tag) {
        return Err(Error::Parse { line, msg: format!("expected row tagged `{tag}`") });
    }
    toks.map(|t| t.parse::<usize>().map_err(|e| Error::Parse { line, msg: e.to_string() }))
        .collect()
}

fn is_subset(small: &[usize], large: &[usize]) -> bool {
    // both ascending
    let mut it = large.iter();
    small.iter().all(|s| it.any(|l| l == s))
}

/// Coverage objective `z(S) = sum of p_j over customers covered by S`.
#[derive(Debug, Clone)]
pub struct WmcigOracle {
    profits: Vec<i64>,
    coverage: Vec<Vec<usize>>,
}

struct CoverEvaluator<'a> {
    oracle: &'a WmcigOracle,
    members: Vec<bool>,
    counts: Vec<u32>,
    covered: i64,
}

impl Evaluator for CoverEvaluator<'_> {
    fn len(&self) -> usize {
        self.members.len()
    }

    fn insert(&mut self, item: usize) -> bool {
        if std::mem::replace(&mut self.members[item], true) {
            return false;
        }
        for &j in &self.oracle.coverage[item] {
            if self.counts[j] == 0 {
                self.covered += self.oracle.profits[j];
            }
            self.counts[j] += 1;
        }
        true
    }

    fn remove(&mut self, item: usize) -> bool {
        if !std::mem::replace(&mut self.members[item], false) {
            return false;
        }
        for &j in &self.oracle.coverage[item] {
            self.counts[j] -= 1;
            if self.counts[j] == 0 {
                self.covered -= self.oracle.profits[j];
            }
        }
        true
    }

    fn contains(&self, item: usize) -> bool {
        self.members[item]
    }

    fn value(&self) -> f64 {
        self.covered as f64
    }

    fn gain(&self, item: usize) -> f64 {
        if self.members[item] {
            return 0.0;
        }
        self.oracle.coverage[item]
            .iter()
            .filter(|&&j| self.counts[j] == 0)
            .map(|&j| self.oracle.profits[j])
            .sum::<i64>() as f64
    }

    fn clear(&mut self) {
        self.members.iter_mut().for_each(|m| *m = false);
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.covered = 0;
    }
}

impl SubmodularOracle for WmcigOracle {
    fn ground(&self) -> GroundSet {
        GroundSet::new(self.coverage.len()).expect("validated non-empty")
    }

    fn evaluator(&self) -> Box<dyn Evaluator + '_> {
        Box::new(CoverEvaluator {
            oracle: self,
            members: vec![false; self.coverage.len()],
            counts: vec![0; self.profits.len()],
            covered: 0,
        })
    }
}

/// Parameters of the random coverage generator.
#[derive(Debug, Clone, PartialEq)]
pub struct WmcigParams {
    pub n: usize,
    pub radius: f64,
    pub budget: usize,
    pub interdiction: usize,
}

impl WmcigParams {
    /// The benchmark rule: `B = floor(0.1 n)`, `k = floor(k_frac n)`.
    pub fn standard(n: usize, radius: f64, k_frac: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k_frac) {
            return Err(Error::Domain(format!("k_frac {k_frac} outside [0, 1]")));
        }
        Ok(Self {
            n,
            radius,
            budget: n / 10,
            interdiction: (n as f64 * k_frac + 1e-9).floor() as usize,
        })
    }
}

/// Random coverage instance with `m = n` customers placed uniformly in
/// `[0,10]^2`, facilities at the customer sites, integer profits uniform in
/// `[1,100]`, and coverage by Euclidean distance `<= radius`.
///
/// Randomness: `ChaCha8Rng::seed_from_u64(seed)`; stream 1 draws the
/// coordinates (x then y per customer, `10 * u` with `u` a standard `f64`
/// sample), stream 2 draws the profits with `gen_range(1..=100)`.
pub fn generate(params: &WmcigParams, seed: u64) -> Result<WmcigInstance> {
    if params.n < 2 {
        return Err(Error::Domain("WMCIG generator needs n >= 2".into()));
    }
    if !(params.radius > 0.0) || !params.radius.is_finite() {
        return Err(Error::Domain("coverage radius must be positive".into()));
    }
    if params.budget > params.n || params.interdiction > params.n {
        return Err(Error::Domain("budgets cannot exceed n".into()));
    }
    let n = params.n;
    let mut coord_rng = ChaCha8Rng::seed_from_u64(seed);
    coord_rng.set_stream(1);
    let coords: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x = 10.0 * coord_rng.gen::<f64>();
            let y = 10.0 * coord_rng.gen::<f64>();
            (x, y)
        })
        .collect();
    let mut profit_rng = ChaCha8Rng::seed_from_u64(seed);
    profit_rng.set_stream(2);
    let profits: Vec<i64> = (0..n).map(|_| profit_rng.gen_range(1..=100)).collect();
    let r2 = params.radius * params.radius;
    let coverage = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    let dx = coords[i].0 - coords[j].0;
                    let dy = coords[i].1 - coords[j].1;
                    dx * dx + dy * dy <= r2
                })
                .collect()
        })
        .collect();
    let mut inst = WmcigInstance::new(profits, coverage, params.budget, params.interdiction)?;
    inst.provenance = Some(Provenance {
        seed,
        params: format!("family=wmcig,n={n},r={},B={},k={}", params.radius, params.budget, params.interdiction),
    });
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::{check_submodular_monotone, ItemSet};

    /// Four customers a..d with profits 5, 9, 6, 4; J(1)={a,c}, J(2)={a,b},
    /// J(3)={a,c,d}; B = 2.
    fn example() -> WmcigInstance {
        WmcigInstance::new(vec![5, 9, 6, 4], vec![vec![0, 2], vec![0, 1], vec![0, 2, 3]], 2, 1).unwrap()
    }

    #[test]
    fn coverage_values() {
        let o = example().oracle();
        assert_eq!(o.evaluate(&ItemSet::from_items([0, 1, 2])).unwrap(), 24.0);
        assert_eq!(o.evaluate(&ItemSet::from_items([0, 1])).unwrap(), 20.0);
        assert_eq!(o.evaluate(&ItemSet::new()).unwrap(), 0.0);
        assert_eq!(o.rho_empty_all(), vec![11.0, 14.0, 15.0]);
        assert_eq!(o.marginal_gain(&ItemSet::from_items([0, 1]), 2).unwrap(), 4.0);
    }

    #[test]
    fn superiority_lists() {
        let d = example().superiority();
        assert_eq!(d.get(0), &[2]);
        assert!(d.get(1).is_empty());
        assert!(d.get(2).is_empty());
        let disjoint = WmcigInstance::new(vec![1, 1, 1], vec![vec![0], vec![1], vec![2]], 1, 1).unwrap();
        assert!((0..3).all(|i| disjoint.superiority().get(i).is_empty()));
    }

    #[test]
    fn text_round_trip() {
        let inst = generate(&WmcigParams::standard(20, 2.0, 0.2).unwrap(), 5).unwrap();
        let text = inst.to_text();
        assert!(text.starts_with("# gen seed=5 params="));
        assert_eq!(WmcigInstance::parse(&text).unwrap(), inst);
        assert_eq!(WmcigInstance::parse(&example().to_text()).unwrap(), example());
    }

    #[test]
    fn parse_errors() {
        assert!(WmcigInstance::parse("BIIG 1 1 1 1\nP 1\nC 0 1 0\n").is_err());
        assert!(WmcigInstance::parse("WMCIG 1 2 1 1\nP 1\nC 0 1 0\n").is_err());
        assert!(WmcigInstance::parse("WMCIG 1 1 1 1\nP 1\nC 0 2 0\n").is_err());
        assert!(WmcigInstance::parse("WMCIG 1 1 1 1\nP 0\nC 0 1 0\n").is_err());
    }

    #[test]
    fn generator_rules() {
        let p = WmcigParams::standard(50, 2.0, 0.1).unwrap();
        assert_eq!((p.budget, p.interdiction), (5, 5));
        let a = generate(&p, 11).unwrap();
        assert_eq!(a, generate(&p, 11).unwrap());
        assert_ne!(a, generate(&p, 12).unwrap());
        assert_eq!(a.profits.len(), 50);
        assert!(a.profits.iter().all(|p| (1..=100).contains(p)));
        // every facility covers its own site
        assert!(a.coverage.iter().enumerate().all(|(i, c)| c.contains(&i)));
        assert!(check_submodular_monotone(&a.oracle(), 1000, 1).passed());
        assert!(generate(&WmcigParams { n: 1, radius: 1.0, budget: 0, interdiction: 0 }, 1).is_err());
        assert!(generate(&WmcigParams { n: 5, radius: 0.0, budget: 0, interdiction: 0 }, 1).is_err());
        assert!(WmcigParams::standard(10, 1.0, 1.5).is_err());
    }
}
