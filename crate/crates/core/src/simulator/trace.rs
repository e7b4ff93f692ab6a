//! Line-delimited event trace: `time,worker,config,rung,resource,metric,event`.
//!
//! Reals are written in shortest round-trip form, so reading a trace back
//! yields bit-identical values.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resource::ConfigId;

pub const TRACE_HEADER: &str = "time,worker,config,rung,resource,metric,event";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Start,
    Complete,
}

impl EventKind {
    fn as_str(self) -> &'static str {
        match self {
            EventKind::Start => "start",
            EventKind::Complete => "complete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub time: f64,
    pub worker: usize,
    pub config: ConfigId,
    pub rung: usize,
    pub resource: u64,
    /// Reported metric; only on completions.
    pub metric: Option<f64>,
    pub kind: EventKind,
}

impl TraceRecord {
    pub fn to_line(&self) -> String {
        let metric = self.metric.map(|m| m.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.time,
            self.worker,
            self.config,
            self.rung,
            self.resource,
            metric,
            self.kind.as_str()
        )
    }

    fn parse(line: &str, lineno: usize) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::parse(lineno, format!("expected 7 fields, found {}", fields.len())));
        }
        fn num<T: std::str::FromStr>(s: &str, what: &str, lineno: usize) -> Result<T> {
            s.parse().map_err(|_| Error::parse(lineno, format!("bad {what} `{s}`")))
        }
        let kind = match fields[6] {
            "start" => EventKind::Start,
            "complete" => EventKind::Complete,
            other => return Err(Error::parse(lineno, format!("unknown event `{other}`"))),
        };
        let metric = match (fields[5], kind) {
            ("", EventKind::Start) => None,
            (m, EventKind::Complete) => Some(num::<f64>(m, "metric", lineno)?),
            (_, EventKind::Start) => return Err(Error::parse(lineno, "start events carry no metric")),
        };
        Ok(Self {
            time: num(fields[0], "time", lineno)?,
            worker: num(fields[1], "worker", lineno)?,
            config: ConfigId(num(fields[2], "config", lineno)?),
            rung: num(fields[3], "rung", lineno)?,
            resource: num(fields[4], "resource", lineno)?,
            metric,
            kind,
        })
    }
}

pub fn write_trace<W: Write>(records: &[TraceRecord], mut out: W) -> Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.to_line())?;
    }
    Ok(())
}

pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<TraceRecord>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim_end) != Some(TRACE_HEADER) {
        return Err(Error::parse(1, "missing trace header"));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(TraceRecord::parse(line.trim_end(), i + 2)?);
    }
    Ok(records)
}
