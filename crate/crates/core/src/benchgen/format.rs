//! Plain-text benchmark file.
//!
//! ```text
//! pasha-benchmark v1
//! units<TAB>81
//! unit<TAB>epoch
//! metric<TAB>accuracy
//! direction<TAB>maximize
//! configs<TAB>256
//! candidate<TAB>params<TAB>metrics<TAB>costs<TAB>final
//! 0<TAB>-<TAB>0.41,0.52,...<TAB>12.5,12.5,...<TAB>0.93
//! ```
//!
//! Metrics are stored in the source orientation; minimized metrics are
//! negated on load and restored on save. `-` marks an absent field.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::resource::Direction;
use crate::simulator::{CurveRow, LearningCurveTable};

pub const FORMAT_MAGIC: &str = "pasha-benchmark v1";
const COLUMNS: &str = "candidate\tparams\tmetrics\tcosts\tfinal";

pub fn write_table<W: Write>(table: &LearningCurveTable, mut out: W) -> Result<()> {
    let dir = table.direction;
    writeln!(out, "{FORMAT_MAGIC}")?;
    writeln!(out, "units\t{}", table.units())?;
    writeln!(out, "unit\t{}", table.unit_label)?;
    writeln!(out, "metric\t{}", table.metric_name)?;
    writeln!(out, "direction\t{}", dir.as_str())?;
    writeln!(out, "configs\t{}", table.len())?;
    writeln!(out, "{COLUMNS}")?;
    let join = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    for row in table.rows() {
        let params = row.params.as_deref().unwrap_or("-");
        let metrics = join(&mut row.metrics.iter().map(|&m| dir.denormalize(m)));
        let costs = join(&mut row.costs.iter().copied());
        let last = row.final_metric.map(|m| dir.denormalize(m).to_string()).unwrap_or_else(|| "-".into());
        writeln!(out, "{}\t{params}\t{metrics}\t{costs}\t{last}", row.candidate)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_table<R: BufRead>(input: R) -> Result<LearningCurveTable> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |expect: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((n, line)) => Ok((n, line?.trim_end_matches('\r').to_owned())),
            None => Err(Error::parse(0, format!("unexpected end of file, expected {expect}"))),
        }
    };

    let (n, magic) = next("header")?;
    if magic != FORMAT_MAGIC {
        return Err(Error::parse(n, format!("expected `{FORMAT_MAGIC}`")));
    }
    let mut header = |key: &str| -> Result<(usize, String)> {
        let (n, line) = next(key)?;
        match line.split_once('\t') {
            Some((k, v)) if k == key => Ok((n, v.to_owned())),
            _ => Err(Error::parse(n, format!("expected `{key}<TAB>value`"))),
        }
    };
    let (n, units) = header("units")?;
    let units: usize = units.parse().map_err(|_| Error::parse(n, format!("bad unit count `{units}`")))?;
    let (_, unit_label) = header("unit")?;
    let (_, metric_name) = header("metric")?;
    let (n, dir) = header("direction")?;
    let direction: Direction = dir.parse().map_err(|_| Error::parse(n, format!("bad direction `{dir}`")))?;
    let (n, configs) = header("configs")?;
    let configs: usize = configs.parse().map_err(|_| Error::parse(n, format!("bad config count `{configs}`")))?;
    let (n, cols) = next("column line")?;
    if cols != COLUMNS {
        return Err(Error::parse(n, "bad column line"));
    }

    let mut rows = Vec::with_capacity(configs);
    for (n, line) in lines {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        rows.push(parse_row(line, n, units, direction)?);
    }
    if rows.len() != configs {
        return Err(Error::parse(0, format!("header declares {configs} configs, found {}", rows.len())));
    }
    LearningCurveTable::new(unit_label, metric_name, direction, rows)
}

fn parse_row(line: &str, n: usize, units: usize, dir: Direction) -> Result<CurveRow> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 5 {
        return Err(Error::parse(n, format!("expected 5 fields, found {}", fields.len())));
    }
    let float = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|_| Error::parse(n, format!("bad number `{s}`"))) };
    let series = |s: &str, what: &str| -> Result<Vec<f64>> {
        let v = s.split(',').map(float).collect::<Result<Vec<_>>>()?;
        if v.len() != units {
            return Err(Error::parse(n, format!("{} {what} values, expected {units}", v.len())));
        }
        Ok(v)
    };
    let candidate = fields[0].parse().map_err(|_| Error::parse(n, format!("bad candidate `{}`", fields[0])))?;
    let params = (fields[1] != "-").then(|| fields[1].to_owned());
    let metrics = series(fields[2], "metric")?.into_iter().map(|m| dir.normalize(m)).collect();
    let costs = series(fields[3], "cost")?;
    let final_metric = match fields[4] {
        "-" => None,
        s => Some(dir.normalize(float(s)?)),
    };
    Ok(CurveRow { candidate, params, metrics, costs, final_metric })
}

pub fn save(table: &LearningCurveTable, path: impl AsRef<Path>) -> Result<()> {
    write_table(table, BufWriter::new(File::create(path)?))
}

pub fn load(path: impl AsRef<Path>) -> Result<LearningCurveTable> {
    read_table(BufReader::new(File::open(path)?))
}
