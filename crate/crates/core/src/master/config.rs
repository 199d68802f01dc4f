//! Solver settings and their textual forms.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Cut used as the base of every separated SIC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseCut {
    Basic,
    Improved,
}

/// How a follower set is built at a fractional leader point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FracStrategy {
    /// Greedy over the items with `x* = 0`.
    S1,
    /// Greedy over the complement of a leader-feasible rounding of `x*`.
    S2,
    /// Greedy on the violation increase of the resulting cut.
    S3,
}

impl FracStrategy {
    pub const ALL: [FracStrategy; 3] = [Self::S1, Self::S2, Self::S3];
}

impl fmt::Display for FracStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::S1 => "S1",
            Self::S2 => "S2",
            Self::S3 => "S3",
        })
    }
}

impl FromStr for FracStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S1" | "s1" => Ok(Self::S1),
            "S2" | "s2" => Ok(Self::S2),
            "S3" | "s3" => Ok(Self::S3),
            _ => Err(Error::Domain(format!("unknown fractional strategy `{s}`"))),
        }
    }
}

/// A component combination such as `ILDAE-S2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Setting {
    pub base: BaseCut,
    pub lift: bool,
    pub dominance: bool,
    pub alternative: bool,
    pub enhanced: bool,
    pub frac: FracStrategy,
}

impl Setting {
    /// All 96 combinations, `B` before `I`, flags counted in binary
    /// (`L`, `D`, `A`, `E` from most to least significant), strategy last.
    pub fn all() -> Vec<Setting> {
        let mut out = Vec::with_capacity(96);
        for base in [BaseCut::Basic, BaseCut::Improved] {
            for flags in 0..16u8 {
                for frac in FracStrategy::ALL {
                    out.push(Setting {
                        base,
                        lift: flags & 8 != 0,
                        dominance: flags & 4 != 0,
                        alternative: flags & 2 != 0,
                        enhanced: flags & 1 != 0,
                        frac,
                    });
                }
            }
        }
        out
    }

    /// The cumulative ladder `B, I, IL, ILD, ILDA, ILDAE` under `frac`.
    pub fn incremental(frac: FracStrategy) -> Vec<Setting> {
        ["B", "I", "IL", "ILD", "ILDA", "ILDAE"]
            .iter()
            .map(|s| format!("{s}-{frac}").parse().expect("valid setting"))
            .collect()
    }

    pub fn components(&self) -> String {
        let mut s = String::from(match self.base {
            BaseCut::Basic => "B",
            BaseCut::Improved => "I",
        });
        for (on, c) in [(self.lift, 'L'), (self.dominance, 'D'), (self.alternative, 'A'), (self.enhanced, 'E')] {
            if on {
                s.push(c);
            }
        }
        s
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.components(), self.frac)
    }
}

impl FromStr for Setting {
    type Err = Error;

    /// Grammar: `(B|I)L?D?A?E?-S(1|2|3)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("malformed setting `{s}` (expected e.g. ILDAE-S2)"));
        let (comp, frac) = s.split_once('-').ok_or_else(bad)?;
        let frac: FracStrategy = frac.parse().map_err(|_| bad())?;
        let mut chars = comp.chars().peekable();
        let base = match chars.next() {
            Some('B') => BaseCut::Basic,
            Some('I') => BaseCut::Improved,
            _ => return Err(bad()),
        };
        let mut flag = |c: char| chars.next_if_eq(&c).is_some();
        let (lift, dominance, alternative, enhanced) = (flag('L'), flag('D'), flag('A'), flag('E'));
        if chars.next().is_some() {
            return Err(bad());
        }
        Ok(Setting { base, lift, dominance, alternative, enhanced, frac })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub setting: Setting,
    /// Minimum relative violation for a fractional cut.
    pub frac_violation_threshold: f64,
    /// Seconds.
    pub time_limit: f64,
    pub node_limit: Option<usize>,
    /// Recorded with the run; the search itself is deterministic.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            setting: "ILDAE-S2".parse().expect("valid setting"),
            frac_violation_threshold: 0.01,
            time_limit: 3600.0,
            node_limit: None,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_setting(setting: Setting) -> Self {
        Self { setting, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frac_violation_threshold >= 0.0) {
            return Err(Error::Domain("violation threshold must be >= 0".into()));
        }
        if !(self.time_limit >= 0.0) {
            return Err(Error::Domain("time limit must be >= 0".into()));
        }
        Ok(())
    }

    /// One `key=value` per line.
    pub fn to_kv_text(&self) -> String {
        let node_limit = self.node_limit.map_or_else(|| "none".to_string(), |n| n.to_string());
        format!(
            "setting={}\nfrac_violation_threshold={}\ntime_limit={}\nnode_limit={}\nseed={}\n",
            self.setting, self.frac_violation_threshold, self.time_limit, node_limit, self.seed
        )
    }

    /// Reads [`SolverConfig::to_kv_text`] output; missing keys keep their
    /// defaults, `#` lines are comments.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: idx + 1, msg };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key=value".into()))?;
            let value = value.trim();
            let num = |v: &str| v.parse::<f64>().map_err(|e| err(e.to_string()));
            match key.trim() {
                "setting" => cfg.setting = value.parse().map_err(|e: Error| err(e.to_string()))?,
                "frac_violation_threshold" => cfg.frac_violation_threshold = num(value)?,
                "time_limit" => cfg.time_limit = num(value)?,
                "node_limit" => {
                    cfg.node_limit = match value {
                        "none" => None,
                        v => Some(v.parse().map_err(|e: std::num::ParseIntError| err(e.to_string()))?),
                    }
                }
                "seed" => cfg.seed = value.parse().map_err(|e: std::num::ParseIntError| err(e.to_string()))?,
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
