//! One CSV row per solver run, in the layout of the detailed results tables.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::cuts::CutFamily;
use crate::error::{Error, Result};
use crate::master::{Setting, SolveResult};
use crate::problems::ModelInstance;

/// Column names, in file order.
pub const COLUMNS: [&str; 21] = [
    "instance", "family", "n", "m", "B", "k", "r", "d", "setting", "time_s", "UB", "LB", "gap_pct", "rgap_pct",
    "nodes", "sic", "sic_basic", "sic_improved", "sic_lifted", "sic_alternative", "status",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub family: String,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "B")]
    pub budget: usize,
    pub k: usize,
    /// Coverage radius (coverage instances with a generator record).
    pub r: Option<f64>,
    /// Arc density (activation instances with a generator record).
    pub d: Option<f64>,
    pub setting: String,
    pub time_s: f64,
    #[serde(rename = "UB")]
    pub ub: f64,
    #[serde(rename = "LB")]
    pub lb: f64,
    pub gap_pct: f64,
    pub rgap_pct: f64,
    pub nodes: usize,
    pub sic: usize,
    pub sic_basic: usize,
    pub sic_improved: usize,
    pub sic_lifted: usize,
    pub sic_alternative: usize,
    pub status: String,
}

impl RunRecord {
    pub fn new(name: &str, model: &ModelInstance, setting: &Setting, res: &SolveResult) -> Self {
        let param = |key: &str| model.provenance().and_then(|p| p.param(key)).and_then(|v| v.parse().ok());
        let (n, m, budget, k) = match model {
            ModelInstance::Wmcig(w) => (w.num_facilities(), w.num_customers(), w.budget, w.interdiction),
            ModelInstance::Biig(b) => (b.num_items(), b.num_targets, b.budget, b.interdiction),
        };
        let (r, d) = match model {
            ModelInstance::Wmcig(_) => (param("r"), None),
            ModelInstance::Biig(_) => (None, param("d")),
        };
        Self {
            instance: name.to_string(),
            family: model.family().to_string(),
            n,
            m,
            budget,
            k,
            r,
            d,
            setting: setting.to_string(),
            time_s: res.seconds,
            ub: res.upper,
            lb: res.lower,
            gap_pct: res.gap,
            rgap_pct: res.root_gap,
            nodes: res.nodes,
            sic: res.total_cuts(),
            sic_basic: res.cut_count(CutFamily::Basic),
            sic_improved: res.cut_count(CutFamily::Improved),
            sic_lifted: res.cut_count(CutFamily::Lifted),
            sic_alternative: res.cut_count(CutFamily::Alternative),
            status: res.status.name().to_string(),
        }
    }
}

pub fn write_records<W: Write>(sink: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    w.write_record(COLUMNS).map_err(csv_err)?;
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(source: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(source);
    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.iter().ne(COLUMNS.iter().copied()) {
        return Err(Error::Parse { line: 1, msg: "unexpected CSV header".into() });
    }
    r.deserialize().collect::<std::result::Result<Vec<_>, _>>().map_err(csv_err)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse { line: e.position().map_or(0, |p| p.line() as usize), msg: e.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(r: Option<f64>) -> RunRecord {
        RunRecord {
            instance: "a,b".into(),
            family: "WMCIG".into(),
            n: 30,
            m: 30,
            budget: 3,
            k: 6,
            r,
            d: None,
            setting: "ILDAE-S2".into(),
            time_s: 0.1 + 0.2,
            ub: 1234.0,
            lb: 1233.999999,
            gap_pct: 1.0 / 3.0,
            rgap_pct: 100.0,
            nodes: 17,
            sic: 9,
            sic_basic: 0,
            sic_improved: 7,
            sic_lifted: 1,
            sic_alternative: 1,
            status: "optimal".into(),
        }
    }

    #[test]
    fn csv_is_loss_free() {
        let recs = vec![record(Some(2.0)), record(None)];
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&COLUMNS.join(",")));
        assert_eq!(read_records(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn empty_file_keeps_header() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().trim(), COLUMNS.join(","));
        assert!(read_records(buf.as_slice()).unwrap().is_empty());
    }
}
