use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One annealing run. Serialized as one CSV row; the header row is the
/// field names in declaration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub family: String,
    pub params: String,
    pub n: usize,
    pub graph_id: usize,
    pub variant: String,
    /// Centrality name, empty for the uniform strategy.
    pub centrality: String,
    pub beta: Option<f64>,
    pub phi: Option<f64>,
    pub run_id: usize,
    pub seed: u64,
    pub epsilon: u64,
    #[serde(rename = "S")]
    pub s: f64,
    pub steps: u64,
    pub accepted_moves: u64,
    pub wall_time_ms: u64,
}

pub const CSV_COLUMNS: [&str; 15] = [
    "family",
    "params",
    "n",
    "graph_id",
    "variant",
    "centrality",
    "beta",
    "phi",
    "run_id",
    "seed",
    "epsilon",
    "S",
    "steps",
    "accepted_moves",
    "wall_time_ms",
];

impl RunRecord {
    /// Identifies the run within an experiment; also the sort key.
    pub fn key(&self) -> RunKey {
        RunKey {
            family: self.family.clone(),
            params: self.params.clone(),
            graph_id: self.graph_id,
            variant: self.variant.clone(),
            run_id: self.run_id,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RunKey {
    pub family: String,
    pub params: String,
    pub graph_id: usize,
    pub variant: String,
    pub run_id: usize,
}

impl RunKey {
    pub(crate) fn manifest_line(&self) -> String {
        format!("{}\t{}\t{}\t{}\t{}", self.family, self.params, self.graph_id, self.variant, self.run_id)
    }
}

pub fn write_records<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(crate::Error::Parse(format!(
            "unexpected CSV header {:?}, expected {:?}",
            headers.iter().collect::<Vec<_>>(),
            CSV_COLUMNS
        )));
    }
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub fn read_records_file(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    read_records(File::open(path)?)
}

/// Rows that parse cleanly; a torn final line from an interrupted run is
/// dropped instead of failing the whole read.
pub(crate) fn read_records_lenient(path: &Path) -> Result<Vec<RunRecord>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut r = csv::Reader::from_reader(file);
    Ok(r.deserialize().filter_map(|row| row.ok()).collect())
}
