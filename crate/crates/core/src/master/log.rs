//! Per-node event log of a master run, written as CSV.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    pub node: usize,
    pub depth: usize,
    /// `branch`, `integer`, `pruned`, `infeasible` or `stopped`.
    pub event: String,
    pub node_bound: f64,
    pub global_lb: f64,
    pub incumbent: f64,
    pub basic: usize,
    pub improved: usize,
    pub lifted: usize,
    pub alternative: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLog {
    pub events: Vec<LogEvent>,
}

impl RunLog {
    pub fn push(&mut self, event: LogEvent) {
        self.events.push(event);
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        for e in &self.events {
            w.serialize(e).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(source: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(source);
        let events = r.deserialize().collect::<std::result::Result<Vec<LogEvent>, _>>().map_err(csv_err)?;
        Ok(Self { events })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse { line: e.position().map_or(0, |p| p.line() as usize), msg: e.to_string() }
}
