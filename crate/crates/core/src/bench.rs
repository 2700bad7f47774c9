//! Decoder comparison over a grid of window and penalty values.
//!
//! Each query is decoded once per grid point; forward-backward, Viterbi and
//! posterior decoding run once per query and window scores once per window.
//! Queries are processed in parallel and results keep input order.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::Annotation;
use crate::error::{Error, Result};
use crate::evalkit::{aggregate, base_accuracy, boundary_metrics, BoundaryReport, Summary};
use crate::herd::{decode_posteriors, window_scores, GainParams};
use crate::inference::{forward_backward, posterior_decode, viterbi_decode};
use crate::model::Hmm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Decoder {
    Viterbi,
    Posterior,
    Herd,
}

impl Decoder {
    pub const ALL: [Decoder; 3] = [Decoder::Viterbi, Decoder::Posterior, Decoder::Herd];

    pub fn name(self) -> &'static str {
        match self {
            Decoder::Viterbi => "viterbi",
            Decoder::Posterior => "posterior",
            Decoder::Herd => "herd",
        }
    }
}

/// Decodes one sequence with the chosen decoder.
pub fn decode(hmm: &Hmm, obs: &[usize], decoder: Decoder, params: &GainParams) -> Result<Annotation> {
    Ok(match decoder {
        Decoder::Viterbi => viterbi_decode(hmm, obs)?.annotation,
        Decoder::Posterior => posterior_decode(&forward_backward(hmm, obs)?),
        Decoder::Herd => crate::herd::herd_decode(hmm, obs, params)?.annotation,
    })
}

#[derive(Debug, Clone)]
pub struct Query {
    pub id: String,
    pub obs: Vec<usize>,
    pub truth: Annotation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchGrid {
    pub windows: Vec<usize>,
    pub gammas: Vec<f64>,
    pub alpha: f64,
    /// Boundary matching tolerance; each row's window when `None`.
    pub tolerance: Option<usize>,
}

impl BenchGrid {
    pub fn validate(&self) -> Result<()> {
        if self.windows.is_empty() || self.gammas.is_empty() {
            return Err(Error::InvalidParameter("benchmark grid is empty".into()));
        }
        for &g in &self.gammas {
            GainParams::new(0, g, self.alpha)?;
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<(usize, f64)> {
        self.windows.iter().flat_map(|&w| self.gammas.iter().map(move |&g| (w, g))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub decoder: Decoder,
    pub window: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub tolerance: usize,
    pub queries: usize,
    /// Pooled over queries.
    pub sensitivity: f64,
    pub precision: f64,
    pub f1: f64,
    /// Pooled F1 at tolerance 0.
    pub exact_f1: f64,
    /// Mean over queries.
    pub base_accuracy: f64,
    pub wall_ms: f64,
}

/// Predictions of one decoder at one grid point, in query order.
#[derive(Debug, Clone)]
pub struct PredictionSet {
    pub decoder: Decoder,
    pub window: usize,
    pub gamma: f64,
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub rows: Vec<BenchRow>,
    pub predictions: Vec<PredictionSet>,
}

struct QueryResult {
    viterbi: Annotation,
    posterior: Annotation,
    // [point index] in grid.points() order
    herd: Vec<Annotation>,
    viterbi_ms: f64,
    posterior_ms: f64,
    herd_ms: Vec<f64>,
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn decode_query(hmm: &Hmm, q: &Query, grid: &BenchGrid) -> Result<QueryResult> {
    let graph = hmm.color_graph();
    let t = Instant::now();
    let viterbi = viterbi_decode(hmm, &q.obs)?.annotation;
    let viterbi_ms = ms(t);

    let t = Instant::now();
    let post = forward_backward(hmm, &q.obs)?;
    let fb_ms = ms(t);
    let t = Instant::now();
    let posterior = posterior_decode(&post);
    let posterior_ms = fb_ms + ms(t);

    let mut herd = Vec::new();
    let mut herd_ms = Vec::new();
    for &w in &grid.windows {
        let t = Instant::now();
        let windows = window_scores(&post, w);
        let window_ms = ms(t);
        for &g in &grid.gammas {
            let params = GainParams::new(w, g, grid.alpha)?;
            let t = Instant::now();
            herd.push(decode_posteriors(&graph, &post, &windows, &params)?.annotation);
            herd_ms.push(fb_ms + window_ms + ms(t));
        }
    }
    Ok(QueryResult { viterbi, posterior, herd, viterbi_ms, posterior_ms, herd_ms })
}

fn row(
    decoder: Decoder,
    window: usize,
    gamma: f64,
    grid: &BenchGrid,
    queries: &[Query],
    preds: &[&Annotation],
    wall_ms: f64,
) -> Result<BenchRow> {
    let tolerance = grid.tolerance.unwrap_or(window);
    let mut at_tol = Vec::with_capacity(queries.len());
    let mut exact = Vec::with_capacity(queries.len());
    let mut base = 0.0;
    for (q, p) in queries.iter().zip(preds) {
        at_tol.push(boundary_metrics(p, &q.truth, tolerance)?);
        exact.push(boundary_metrics(p, &q.truth, 0)?);
        base += base_accuracy(p, &q.truth)?;
    }
    let s = aggregate(&at_tol)?;
    let e = aggregate(&exact)?;
    Ok(BenchRow {
        decoder,
        window,
        gamma,
        alpha: grid.alpha,
        tolerance,
        queries: queries.len(),
        sensitivity: s.pooled_sensitivity,
        precision: s.pooled_precision,
        f1: s.pooled_f1,
        exact_f1: e.pooled_f1,
        base_accuracy: base / queries.len() as f64,
        wall_ms,
    })
}

/// One row per (grid point, decoder): viterbi, posterior, herd.
pub fn run_bench(hmm: &Hmm, queries: &[Query], grid: &BenchGrid) -> Result<BenchOutput> {
    grid.validate()?;
    if queries.is_empty() {
        return Err(Error::InvalidParameter("benchmark needs at least one query".into()));
    }
    for q in queries {
        if q.truth.len() != q.obs.len() {
            return Err(Error::LengthMismatch { expected: q.obs.len(), found: q.truth.len() });
        }
    }
    let results: Vec<QueryResult> =
        queries.par_iter().map(|q| decode_query(hmm, q, grid)).collect::<Result<_>>()?;

    let vit: Vec<&Annotation> = results.iter().map(|r| &r.viterbi).collect();
    let post: Vec<&Annotation> = results.iter().map(|r| &r.posterior).collect();
    let vit_ms: f64 = results.iter().map(|r| r.viterbi_ms).sum();
    let post_ms: f64 = results.iter().map(|r| r.posterior_ms).sum();

    let mut rows = Vec::new();
    let mut predictions = Vec::new();
    for (i, (w, g)) in grid.points().into_iter().enumerate() {
        let herd: Vec<&Annotation> = results.iter().map(|r| &r.herd[i]).collect();
        let herd_ms: f64 = results.iter().map(|r| r.herd_ms[i]).sum();
        rows.push(row(Decoder::Viterbi, w, g, grid, queries, &vit, vit_ms)?);
        rows.push(row(Decoder::Posterior, w, g, grid, queries, &post, post_ms)?);
        rows.push(row(Decoder::Herd, w, g, grid, queries, &herd, herd_ms)?);
        for (decoder, preds) in [(Decoder::Viterbi, &vit), (Decoder::Posterior, &post), (Decoder::Herd, &herd)] {
            predictions.push(PredictionSet {
                decoder,
                window: w,
                gamma: g,
                annotations: preds.iter().map(|&a| a.clone()).collect(),
            });
        }
    }
    Ok(BenchOutput { rows, predictions })
}

/// The penalty with the best pooled boundary F1 on `queries` at `window`;
/// the smallest such penalty on ties.
pub fn select_gamma(hmm: &Hmm, queries: &[Query], window: usize, gammas: &[f64], alpha: f64, tolerance: usize) -> Result<f64> {
    let grid = BenchGrid { windows: vec![window], gammas: gammas.to_vec(), alpha, tolerance: Some(tolerance) };
    let out = run_bench(hmm, queries, &grid)?;
    let mut best: Option<(f64, f64)> = None;
    for r in out.rows.iter().filter(|r| r.decoder == Decoder::Herd) {
        match best {
            Some((_, f)) if f >= r.f1 => {}
            _ => best = Some((r.gamma, r.f1)),
        }
    }
    Ok(best.expect("grid is nonempty").0)
}

/// Metrics CSV. The wall-time column is included only when `timing` is set,
/// so that default output is byte-for-byte reproducible.
pub fn format_csv(rows: &[BenchRow], timing: bool) -> String {
    let mut out = String::from("decoder,W,gamma,alpha,tolerance,queries,sensitivity,precision,f1,exact_f1,base_accuracy");
    if timing {
        out.push_str(",wall_ms");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.decoder.name(),
            r.window,
            r.gamma,
            r.alpha,
            r.tolerance,
            r.queries,
            r.sensitivity,
            r.precision,
            r.f1,
            r.exact_f1,
            r.base_accuracy
        );
        if timing {
            let _ = write!(out, ",{:.3}", r.wall_ms);
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DecoderSummary {
    pub decoder: Decoder,
    pub window: usize,
    pub gamma: f64,
    pub boundary: Summary,
    pub exact: Summary,
}

/// Per-query summaries (means and medians) for each row of the grid.
pub fn summaries(queries: &[Query], grid: &BenchGrid, out: &BenchOutput) -> Result<Vec<DecoderSummary>> {
    out.predictions
        .iter()
        .map(|p| {
            let tol = grid.tolerance.unwrap_or(p.window);
            let reports = |t: usize| -> Result<Vec<BoundaryReport>> {
                queries.iter().zip(&p.annotations).map(|(q, a)| boundary_metrics(a, &q.truth, t)).collect()
            };
            Ok(DecoderSummary {
                decoder: p.decoder,
                window: p.window,
                gamma: p.gamma,
                boundary: aggregate(&reports(tol)?)?,
                exact: aggregate(&reports(0)?)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t1;

    fn query(hmm: &Hmm, text: &str, truth: Vec<usize>) -> Query {
        Query { id: text.into(), obs: hmm.encode(text).unwrap(), truth: Annotation::new(truth) }
    }

    #[test]
    fn row_counts() {
        let hmm = t1();
        let qs = vec![query(&hmm, "xxxyyy", vec![0, 0, 0, 1, 1, 1])];
        let grid = BenchGrid { windows: vec![1], gammas: vec![0.2], alpha: 0.0, tolerance: None };
        assert_eq!(run_bench(&hmm, &qs, &grid).unwrap().rows.len(), 3);
        let grid = BenchGrid { windows: vec![1], gammas: vec![0.2, 0.5], alpha: 0.0, tolerance: None };
        let out = run_bench(&hmm, &qs, &grid).unwrap();
        assert_eq!(out.rows.len(), 6);
        assert_eq!(out.predictions.len(), 6);
        let empty = BenchGrid { windows: vec![], gammas: vec![0.2], alpha: 0.0, tolerance: None };
        assert!(run_bench(&hmm, &qs, &empty).is_err());
    }

    #[test]
    fn perfect_predictions_score_one() {
        let hmm = t1();
        let obs = hmm.encode("xxxxyyyyyyxxxx").unwrap();
        let vit = viterbi_decode(&hmm, &obs).unwrap().annotation;
        let qs = vec![Query { id: "q".into(), obs, truth: vit }];
        let grid = BenchGrid { windows: vec![0], gammas: vec![0.1], alpha: 0.0, tolerance: None };
        let out = run_bench(&hmm, &qs, &grid).unwrap();
        let r = &out.rows[0];
        assert_eq!(r.decoder, Decoder::Viterbi);
        assert_eq!((r.sensitivity, r.precision, r.f1, r.exact_f1, r.base_accuracy), (1.0, 1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn csv_layout() {
        let hmm = t1();
        let qs = vec![query(&hmm, "xy", vec![0, 1])];
        let grid = BenchGrid { windows: vec![0], gammas: vec![0.2], alpha: 0.0, tolerance: None };
        let out = run_bench(&hmm, &qs, &grid).unwrap();
        let csv = format_csv(&out.rows, false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "herd,0,0.2,0,0,1,1.000000,1.000000,1.000000,1.000000,1.000000");
        assert!(format_csv(&out.rows, true).lines().next().unwrap().ends_with(",wall_ms"));
    }
}
