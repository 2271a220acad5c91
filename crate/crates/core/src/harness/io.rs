//! Trace serialization.
//!
//! Trace CSV has the header `k,err_l1,err_linf,sum_y,ms_bound`, with an empty
//! `ms_bound` field for schemes without the bound. Termination times go to a
//! companion CSV `page,term_k` with an empty `term_k` for pages that never
//! froze. JSON output is the whole [`SimTrace`], meta block included.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::sim::{SimTrace, TraceSample};
use crate::Result;

pub const TRACE_HEADER: [&str; 5] = ["k", "err_l1", "err_linf", "sum_y", "ms_bound"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

pub fn write_trace_csv<W: Write>(samples: &[TraceSample], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    if samples.is_empty() {
        wtr.write_record(TRACE_HEADER)?;
    }
    for s in samples {
        wtr.serialize(s)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(r: R) -> Result<Vec<TraceSample>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct TermRow {
    page: usize,
    term_k: Option<u64>,
}

pub fn write_term_csv<W: Write>(term_times: &[Option<u64>], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    if term_times.is_empty() {
        wtr.write_record(["page", "term_k"])?;
    }
    for (page, &term_k) in term_times.iter().enumerate() {
        wtr.serialize(TermRow { page, term_k })?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_term_csv<R: Read>(r: R) -> Result<Vec<Option<u64>>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: TermRow = row?;
        if row.page != out.len() {
            return Err(crate::Error::Consistency(format!(
                "termination rows must list pages in order, expected {} got {}",
                out.len(),
                row.page
            )));
        }
        out.push(row.term_k);
    }
    Ok(out)
}

pub fn write_trace_json<W: Write>(trace: &SimTrace, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, trace)?;
    Ok(())
}

pub fn read_trace_json<R: Read>(r: R) -> Result<SimTrace> {
    Ok(serde_json::from_reader(r)?)
}

/// Companion path for termination times: `run.csv` becomes `run.term.csv`.
pub fn term_path(trace_path: &Path) -> PathBuf {
    trace_path.with_extension("term.csv")
}
