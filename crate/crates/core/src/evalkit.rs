//! Boundary-level and base-level accuracy.
//!
//! Boundaries are matched one-to-one, greedily by distance: candidate pairs
//! share the ordered color pair and lie within the tolerance, sorted by
//! distance then predicted gap. "Specificity" for boundary events is
//! reported as precision, the fraction of predicted boundaries matched.

use serde::{Deserialize, Serialize};

use crate::annotation::Annotation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub pred_gap: usize,
    pub truth_gap: usize,
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub tolerance: usize,
    pub n_pred: usize,
    pub n_truth: usize,
    pub matched: Vec<MatchedPair>,
    pub sensitivity: f64,
    pub precision: f64,
    pub f1: f64,
}

fn f1_score(sensitivity: f64, precision: f64) -> f64 {
    if sensitivity + precision == 0.0 {
        0.0
    } else {
        2.0 * sensitivity * precision / (sensitivity + precision)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

pub fn boundary_metrics(pred: &Annotation, truth: &Annotation, tolerance: usize) -> Result<BoundaryReport> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { expected: truth.len(), found: pred.len() });
    }
    let pb = pred.boundaries();
    let tb = truth.boundaries();
    let mut candidates: Vec<MatchedPair> = Vec::new();
    for p in &pb {
        for t in &tb {
            let distance = p.gap.abs_diff(t.gap);
            if p.from == t.from && p.to == t.to && distance <= tolerance {
                candidates.push(MatchedPair { pred_gap: p.gap, truth_gap: t.gap, distance });
            }
        }
    }
    candidates.sort_by_key(|m| (m.distance, m.pred_gap, m.truth_gap));
    let mut pred_used = std::collections::HashSet::new();
    let mut truth_used = std::collections::HashSet::new();
    let mut matched = Vec::new();
    for m in candidates {
        if !pred_used.contains(&m.pred_gap) && !truth_used.contains(&m.truth_gap) {
            pred_used.insert(m.pred_gap);
            truth_used.insert(m.truth_gap);
            matched.push(m);
        }
    }
    let sensitivity = ratio(matched.len(), tb.len());
    let precision = ratio(matched.len(), pb.len());
    Ok(BoundaryReport {
        tolerance,
        n_pred: pb.len(),
        n_truth: tb.len(),
        matched,
        sensitivity,
        precision,
        f1: f1_score(sensitivity, precision),
    })
}

/// Fraction of positions with the same color.
pub fn base_accuracy(pred: &Annotation, truth: &Annotation) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { expected: truth.len(), found: pred.len() });
    }
    if truth.is_empty() {
        return Ok(1.0);
    }
    let same = pred.colors().iter().zip(truth.colors()).filter(|(a, b)| a == b).count();
    Ok(same as f64 / truth.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub median: f64,
}

impl Stat {
    fn of(values: &[f64]) -> Stat {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 { sorted[mid] } else { 0.5 * (sorted[mid - 1] + sorted[mid]) };
        Stat { mean, median }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub sensitivity: Stat,
    pub precision: Stat,
    pub f1: Stat,
    /// Pooled over all reports: total matches over total boundaries.
    pub pooled_sensitivity: f64,
    pub pooled_precision: f64,
    pub pooled_f1: f64,
}

pub fn aggregate(reports: &[BoundaryReport]) -> Result<Summary> {
    if reports.is_empty() {
        return Err(Error::InvalidParameter("cannot aggregate an empty report list".into()));
    }
    let pick = |f: fn(&BoundaryReport) -> f64| Stat::of(&reports.iter().map(f).collect::<Vec<_>>());
    let matched: usize = reports.iter().map(|r| r.matched.len()).sum();
    let pooled_sensitivity = ratio(matched, reports.iter().map(|r| r.n_truth).sum());
    let pooled_precision = ratio(matched, reports.iter().map(|r| r.n_pred).sum());
    Ok(Summary {
        count: reports.len(),
        sensitivity: pick(|r| r.sensitivity),
        precision: pick(|r| r.precision),
        f1: pick(|r| r.f1),
        pooled_sensitivity,
        pooled_precision,
        pooled_f1: f1_score(pooled_sensitivity, pooled_precision),
    })
}

/// Summaries keyed by decoder name, in first-seen order.
pub fn aggregate_by_decoder(reports: &[(String, BoundaryReport)]) -> Result<Vec<(String, Summary)>> {
    let mut names: Vec<&str> = Vec::new();
    for (name, _) in reports {
        if !names.contains(&name.as_str()) {
            names.push(name);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let group: Vec<BoundaryReport> =
                reports.iter().filter(|(n, _)| n == name).map(|(_, r)| r.clone()).collect();
            Ok((name.to_string(), aggregate(&group)?))
        })
        .collect()
}
