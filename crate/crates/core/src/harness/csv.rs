//! Result CSV: writing, reading back and re-certifying rows.

use std::io::{Read, Write};

use super::scenario::{parse_label, LabelBound};
use crate::error::{Error, Result};
use crate::oracle::certify;
use crate::stats::RunStats;

pub const HEADER: &str =
    "scenario_id,epoch,planner,edge_evals,vertex_expansions,wall_time_us,path_cost,oracle_cost,bound_ok";

fn csv_err(e: ::csv::Error) -> Error {
    let location = match e.position() {
        Some(p) => format!("csv line {}", p.line()),
        None => "csv".to_string(),
    };
    Error::Schema { location, message: e.to_string() }
}

/// Writes the header and all rows. An empty slice still yields the header.
pub fn write_rows<W: Write>(out: W, rows: &[RunStats]) -> Result<()> {
    let mut w = ::csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER.split(',')).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn rows_to_string(rows: &[RunStats]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<RunStats>> {
    let mut r = ::csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header.join(",") != HEADER {
        return Err(Error::Schema { location: "csv header".into(), message: format!("expected {HEADER}") });
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub rows: usize,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-checks every row against the bound its label promises, and the row order.
pub fn verify(rows: &[RunStats]) -> Result<VerifyReport> {
    let mut rep = VerifyReport { rows: rows.len(), failures: Vec::new() };
    for (i, r) in rows.iter().enumerate() {
        let line = i + 2;
        let (_, bound) = parse_label(&r.planner)?;
        let recomputed = match bound {
            LabelBound::Factor(e1, e2) => certify(r.path_cost, r.oracle_cost, e1, e2).ok(),
            LabelBound::Dynamic => {
                r.path_cost >= r.oracle_cost || (r.path_cost.is_infinite() && r.oracle_cost.is_infinite())
            }
        };
        if !r.bound_ok {
            rep.failures.push(format!("line {line}: {} epoch {} marked bound_ok=false", r.planner, r.epoch));
        } else if !recomputed {
            rep.failures.push(format!(
                "line {line}: {} epoch {} cost {} violates its bound against {}",
                r.planner, r.epoch, r.path_cost, r.oracle_cost
            ));
        }
        if i > 0 {
            let p = &rows[i - 1];
            let key = |x: &RunStats| (x.planner.clone(), x.epoch, x.scenario_id.clone());
            if key(p) > key(r) {
                rep.failures.push(format!("line {line}: rows out of order"));
            }
        }
    }
    Ok(rep)
}
