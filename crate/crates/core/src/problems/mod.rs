//! Concrete models, their instance files, generators and the MIBLP export.

pub mod biig;
pub mod miblp;
pub mod wmcig;

use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::Instance;

pub use biig::{BiigInstance, BiigOracle, BiigParams};
pub use miblp::{MiblpModel, MiblpRow};
pub use wmcig::{WmcigInstance, WmcigOracle, WmcigParams};

/// Generator identity written as the leading `# gen ...` comment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub seed: u64,
    /// Comma-separated `key=value` list.
    pub params: String,
}

pub const RNG_NAME: &str = "chacha8";

impl Provenance {
    pub fn comment_line(&self) -> String {
        format!("# gen seed={} params={} rng={RNG_NAME}", self.seed, self.params)
    }

    fn parse(line: &str) -> Option<Self> {
        let rest = line.strip_prefix('#')?.trim().strip_prefix("gen")?;
        let mut seed = None;
        let mut params = None;
        for tok in rest.split_whitespace() {
            if let Some(v) = tok.strip_prefix("seed=") {
                seed = v.parse().ok();
            } else if let Some(v) = tok.strip_prefix("params=") {
                params = Some(v.to_string());
            }
        }
        Some(Self { seed: seed?, params: params.unwrap_or_default() })
    }

    /// Looks up one `key=value` entry of `params`.
    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.split(',').find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
    }
}

/// Iterates non-blank, non-comment lines with their 1-based numbers and
/// remembers a `# gen` comment if one was seen.
pub(crate) struct LineReader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    provenance: Option<Provenance>,
}

impl<'a> LineReader<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Self { lines: text.lines().enumerate(), provenance: None }
    }

    pub(crate) fn next_required(&mut self, what: &str) -> Result<(usize, String)> {
        self.next().ok_or_else(|| Error::Parse { line: 0, msg: format!("missing {what}") })
    }

    pub(crate) fn provenance(&self) -> Option<Provenance> {
        self.provenance.clone()
    }
}

impl Iterator for LineReader<'_> {
    type Item = (usize, String);

    fn next(&mut self) -> Option<Self::Item> {
        for (idx, raw) in self.lines.by_ref() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('#') {
                if self.provenance.is_none() {
                    self.provenance = Provenance::parse(line);
                }
                continue;
            }
            return Some((idx + 1, line.to_string()));
        }
        None
    }
}

/// Parses `TAG a b c d` into four counts.
pub(crate) fn parse_header(line: &str, tag: &str, line_no: usize) -> Result<[usize; 4]> {
    let mut toks = line.split_whitespace();
    if toks.next() != Some(tag) {
        return Err(Error::Parse { line: line_no, msg: format!("expected `{tag}` header") });
    }
    let nums = toks
        .map(|t| t.parse::<usize>().map_err(|e| Error::Parse { line: line_no, msg: e.to_string() }))
        .collect::<Result<Vec<_>>>()?;
    nums.try_into()
        .map_err(|_| Error::Parse { line: line_no, msg: format!("`{tag}` header needs four counts") })
}

/// A model instance as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelInstance {
    Wmcig(WmcigInstance),
    Biig(BiigInstance),
}

impl ModelInstance {
    /// Dispatches on the first non-comment token.
    pub fn parse(text: &str) -> Result<Self> {
        let first = LineReader::new(text).next().map(|(_, l)| l).unwrap_or_default();
        match first.split_whitespace().next() {
            Some("WMCIG") => WmcigInstance::parse(text).map(Self::Wmcig),
            Some("BIIG") => BiigInstance::parse(text).map(Self::Biig),
            _ => Err(Error::Parse { line: 1, msg: "unknown instance header".into() }),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        match self {
            Self::Wmcig(w) => w.to_text(),
            Self::Biig(b) => b.to_text(),
        }
    }

    pub fn to_instance(&self, name: impl Into<String>) -> Instance {
        match self {
            Self::Wmcig(w) => w.to_instance(name),
            Self::Biig(b) => b.to_instance(name),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Wmcig(_) => "WMCIG",
            Self::Biig(_) => "BIIG",
        }
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        match self {
            Self::Wmcig(w) => w.provenance.as_ref(),
            Self::Biig(b) => b.provenance.as_ref(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn provenance_line() {
        let p = Provenance { seed: 9, params: "family=biig,n=20,d=0.07".into() };
        let line = p.comment_line();
        assert_eq!(Provenance::parse(&line), Some(p.clone()));
        assert_eq!(p.param("d"), Some("0.07"));
        assert_eq!(p.param("n"), Some("20"));
        assert_eq!(p.param("r"), None);
    }

    #[test]
    fn dispatch_by_header() {
        let w = "# gen seed=1 params=x\nWMCIG 1 1 1 0\nP 3\nC 0 1 0\n";
        assert!(matches!(ModelInstance::parse(w).unwrap(), ModelInstance::Wmcig(_)));
        let b = "BIIG 1 1 1 0\nP 0.5\nA 1\n0 0\n";
        assert!(matches!(ModelInstance::parse(b).unwrap(), ModelInstance::Biig(_)));
        assert!(ModelInstance::parse("FOO 1").is_err());
    }
}
