use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::record::RunRecord;
use crate::error::{Error, Result};
use crate::stats::{paired_t_test, PairedSample, TestReport, ALPHA};

/// How runs are matched between the two variants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Pairing {
    /// One value per graph instance: the mean S over its repeats.
    #[default]
    GraphMean,
    /// One value per `(graph instance, repeat)`.
    PerRun,
}

/// Paired test of variant `b` against baseline `a` for one model group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub family: String,
    pub params: String,
    pub n: usize,
    pub variant_a: String,
    pub variant_b: String,
    pub pairs: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub mean_diff: f64,
    pub t_statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub cohens_d: f64,
    pub degenerate: bool,
    pub significant: bool,
}

impl Comparison {
    fn new(group: &(String, String, usize), sample: &PairedSample, report: &TestReport) -> Self {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        Comparison {
            family: group.0.clone(),
            params: group.1.clone(),
            n: group.2,
            variant_a: sample.label_a.clone(),
            variant_b: sample.label_b.clone(),
            pairs: sample.len(),
            mean_a: mean(&sample.values_a),
            mean_b: mean(&sample.values_b),
            mean_diff: report.mean_diff,
            t_statistic: report.t_statistic,
            dof: report.dof,
            p_value: report.p_value,
            cohens_d: report.cohens_d,
            degenerate: report.degenerate,
            significant: report.p_value < ALPHA,
        }
    }
}

/// Builds the paired samples for `a` vs `b` within each `(family, params)`
/// group and tests them. Instances missing either variant are skipped, as
/// are groups with fewer than two pairs.
pub fn compare_variants(records: &[RunRecord], a: &str, b: &str, pairing: Pairing) -> Result<Vec<Comparison>> {
    type Group = (String, String, usize);
    // group -> pair key -> (values for a, values for b)
    let mut groups: BTreeMap<Group, BTreeMap<(usize, usize), (Vec<f64>, Vec<f64>)>> = BTreeMap::new();
    for r in records {
        let side = if r.variant == a {
            0
        } else if r.variant == b {
            1
        } else {
            continue;
        };
        let pair_key = match pairing {
            Pairing::GraphMean => (r.graph_id, 0),
            Pairing::PerRun => (r.graph_id, r.run_id),
        };
        let slot = groups.entry((r.family.clone(), r.params.clone(), r.n)).or_default().entry(pair_key).or_default();
        if side == 0 {
            slot.0.push(r.s);
        } else {
            slot.1.push(r.s);
        }
    }

    let mut out = Vec::new();
    for (group, pairs) in &groups {
        let (mut va, mut vb) = (Vec::new(), Vec::new());
        for (xs, ys) in pairs.values() {
            if xs.is_empty() || ys.is_empty() {
                continue;
            }
            va.push(xs.iter().sum::<f64>() / xs.len() as f64);
            vb.push(ys.iter().sum::<f64>() / ys.len() as f64);
        }
        if va.len() < 2 {
            continue;
        }
        let sample = PairedSample::new(a, b, va, vb)?;
        let report = paired_t_test(&sample)?;
        out.push(Comparison::new(group, &sample, &report));
    }
    if out.is_empty() {
        return Err(Error::invalid(format!("no model group has at least two paired instances of {a:?} and {b:?}")));
    }
    Ok(out)
}

pub fn write_comparisons<W: Write>(out: W, rows: &[Comparison]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
