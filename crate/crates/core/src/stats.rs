//! Paired comparison of two annealing variants: Student's paired t-test and
//! Cohen's d on the per-instance differences `b − a`.
//!
//! Negative differences mean variant `b` found lower (better) symmetry
//! values than variant `a`.

use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Significance level used when reporting.
pub const ALPHA: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct PairedSample {
    pub label_a: String,
    pub label_b: String,
    pub values_a: Vec<f64>,
    pub values_b: Vec<f64>,
}

impl PairedSample {
    pub fn new(
        label_a: impl Into<String>,
        label_b: impl Into<String>,
        values_a: Vec<f64>,
        values_b: Vec<f64>,
    ) -> Result<Self> {
        if values_a.len() != values_b.len() {
            return Err(Error::invalid(format!(
                "paired samples differ in length: {} vs {}",
                values_a.len(),
                values_b.len()
            )));
        }
        if values_a.len() < 2 {
            return Err(Error::invalid(format!("need at least 2 pairs, got {}", values_a.len())));
        }
        Ok(PairedSample { label_a: label_a.into(), label_b: label_b.into(), values_a, values_b })
    }

    pub fn len(&self) -> usize {
        self.values_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_a.is_empty()
    }

    /// `b − a` for each pair.
    pub fn differences(&self) -> Vec<f64> {
        self.values_a.iter().zip(&self.values_b).map(|(a, b)| b - a).collect()
    }

    /// Copy with the variants swapped.
    pub fn swapped(&self) -> PairedSample {
        PairedSample {
            label_a: self.label_b.clone(),
            label_b: self.label_a.clone(),
            values_a: self.values_b.clone(),
            values_b: self.values_a.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestReport {
    pub t_statistic: f64,
    /// Two-sided.
    pub p_value: f64,
    pub dof: usize,
    pub cohens_d: f64,
    pub mean_diff: f64,
    /// The differences had zero variance; `t` and `d` follow the
    /// degenerate conventions (0 for a zero mean, ±∞ otherwise).
    pub degenerate: bool,
}

impl TestReport {
    pub fn significant(&self) -> bool {
        self.p_value < ALPHA
    }
}

fn mean_sd(d: &[f64]) -> (f64, f64) {
    let k = d.len() as f64;
    let mean = d.iter().sum::<f64>() / k;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt())
}

/// Ratio with the zero-variance conventions: `0/0 → 0`, `x/0 → ±∞`.
fn degenerate_ratio(mean: f64) -> f64 {
    if mean == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(mean)
    }
}

pub fn paired_t_test(s: &PairedSample) -> Result<TestReport> {
    let d = s.differences();
    if d.len() < 2 {
        return Err(Error::invalid(format!("need at least 2 pairs, got {}", d.len())));
    }
    let k = d.len();
    let dof = k - 1;
    let (mean, sd) = mean_sd(&d);
    if sd == 0.0 {
        let t = degenerate_ratio(mean);
        let p = if mean == 0.0 { 1.0 } else { 0.0 };
        return Ok(TestReport { t_statistic: t, p_value: p, dof, cohens_d: t, mean_diff: mean, degenerate: true });
    }
    let t = mean / (sd / (k as f64).sqrt());
    Ok(TestReport {
        t_statistic: t,
        p_value: student_t_two_sided(t, dof as f64),
        dof,
        cohens_d: mean / sd,
        mean_diff: mean,
        degenerate: false,
    })
}

/// Paired-design effect size `mean(b − a) / sd(b − a)`.
pub fn cohens_d(s: &PairedSample) -> Result<f64> {
    paired_t_test(s).map(|r| r.cohens_d)
}

/// `P(|T| ≥ |t|)` for Student's t with `dof` degrees of freedom, via
/// `I_{ν/(ν+t²)}(ν/2, 1/2)`.
pub fn student_t_two_sided(t: f64, dof: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = dof / (dof + t * t);
    beta_reg(dof / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// Student's t cumulative distribution function.
pub fn student_t_cdf(t: f64, dof: f64) -> f64 {
    let tail = 0.5 * student_t_two_sided(t, dof);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}
