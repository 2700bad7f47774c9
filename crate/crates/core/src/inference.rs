//! Forward-backward posteriors and the two baseline decoders.
//!
//! Forward-backward uses per-position scaling: after each step the forward
//! vector is divided by its sum `c_j`, so `ln Pr(X) = sum_j ln c_j` and the
//! backward vector at `j` is divided by `c_{j+1}`. With that convention the
//! product of scaled forward and backward values is the state posterior
//! directly. Viterbi runs in log space.
//!
//! Positions and gaps are 0-based here: gap `k` sits between positions `k`
//! and `k + 1`.

use serde::Serialize;

use crate::annotation::Annotation;
use crate::error::{Error, Result};
use crate::model::Hmm;

/// Per-position color posteriors and per-gap color-pair posteriors.
#[derive(Debug, Clone, Serialize)]
pub struct PosteriorSet {
    length: usize,
    n_colors: usize,
    log_likelihood: f64,
    // color_post[j * C + c]
    color_post: Vec<f64>,
    // pair_post[(k * C + c) * C + c2], full table including c == c2
    pair_post: Vec<f64>,
}

impl PosteriorSet {
    /// Builds a set from raw tables; used by tests and by callers that
    /// compute posteriors elsewhere.
    pub fn from_tables(
        length: usize,
        n_colors: usize,
        log_likelihood: f64,
        color_post: Vec<f64>,
        pair_post: Vec<f64>,
    ) -> Result<Self> {
        if color_post.len() != length * n_colors {
            return Err(Error::LengthMismatch { expected: length * n_colors, found: color_post.len() });
        }
        let gaps = length.saturating_sub(1);
        if pair_post.len() != gaps * n_colors * n_colors {
            return Err(Error::LengthMismatch { expected: gaps * n_colors * n_colors, found: pair_post.len() });
        }
        Ok(PosteriorSet { length, n_colors, log_likelihood, color_post, pair_post })
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn n_gaps(&self) -> usize {
        self.length.saturating_sub(1)
    }

    pub fn n_colors(&self) -> usize {
        self.n_colors
    }

    /// Natural log of Pr(X).
    pub fn log_likelihood(&self) -> f64 {
        self.log_likelihood
    }

    #[inline]
    pub fn color(&self, pos: usize, color: usize) -> f64 {
        self.color_post[pos * self.n_colors + color]
    }

    pub fn colors_at(&self, pos: usize) -> &[f64] {
        &self.color_post[pos * self.n_colors..(pos + 1) * self.n_colors]
    }

    /// Pr(color at `gap` = from, color at `gap + 1` = to).
    #[inline]
    pub fn pair(&self, gap: usize, from: usize, to: usize) -> f64 {
        self.pair_post[(gap * self.n_colors + from) * self.n_colors + to]
    }

    /// Boundary posterior: the pair posterior for `from != to`, zero otherwise.
    #[inline]
    pub fn boundary(&self, gap: usize, from: usize, to: usize) -> f64 {
        if from == to {
            0.0
        } else {
            self.pair(gap, from, to)
        }
    }
}

/// Scaled forward table.
#[derive(Debug, Clone)]
pub struct ForwardTable {
    pub n_states: usize,
    /// `scaled[j * S + u]`; each row sums to 1.
    pub scaled: Vec<f64>,
    /// Scaling constants `c_j`.
    pub scales: Vec<f64>,
}

impl ForwardTable {
    pub fn row(&self, pos: usize) -> &[f64] {
        &self.scaled[pos * self.n_states..(pos + 1) * self.n_states]
    }

    pub fn log_likelihood(&self) -> f64 {
        self.scales.iter().map(|c| c.ln()).sum()
    }
}

pub fn forward(hmm: &Hmm, obs: &[usize]) -> Result<ForwardTable> {
    hmm.check_observations(obs)?;
    let s = hmm.n_states();
    let n = obs.len();
    let mut scaled = vec![0.0; n * s];
    let mut scales = Vec::with_capacity(n);

    let emit = hmm.emission_column(obs[0]);
    let first = &mut scaled[..s];
    for u in 0..s {
        first[u] = hmm.initial()[u] * emit[u];
    }
    scales.push(rescale(first)?);

    for j in 1..n {
        let (done, rest) = scaled.split_at_mut(j * s);
        let prev = &done[(j - 1) * s..];
        let cur = &mut rest[..s];
        for u in 0..s {
            let a = prev[u];
            if a == 0.0 {
                continue;
            }
            let (targets, probs) = hmm.transitions_from(u);
            for (&v, &t) in targets.iter().zip(probs) {
                cur[v] += a * t;
            }
        }
        let emit = hmm.emission_column(obs[j]);
        for v in 0..s {
            cur[v] *= emit[v];
        }
        scales.push(rescale(cur)?);
    }
    Ok(ForwardTable { n_states: s, scaled, scales })
}

fn rescale(row: &mut [f64]) -> Result<f64> {
    let c: f64 = row.iter().sum();
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::ZeroLikelihood);
    }
    let inv = 1.0 / c;
    row.iter_mut().for_each(|x| *x *= inv);
    Ok(c)
}

/// One backward step: fills `out[u] = sum_v t(u,v) w[v]` where
/// `w[v] = e(v, x_{j+1}) b(j+1, v) / c_{j+1}`, given `w`.
#[inline]
fn backward_step(hmm: &Hmm, w: &[f64], out: &mut [f64]) {
    for (u, slot) in out.iter_mut().enumerate() {
        let (targets, probs) = hmm.transitions_from(u);
        *slot = targets.iter().zip(probs).map(|(&v, &t)| t * w[v]).sum();
    }
}

#[inline]
fn weighted_next(hmm: &Hmm, next_bwd: &[f64], symbol: usize, scale: f64, w: &mut [f64]) {
    let emit = hmm.emission_column(symbol);
    let inv = 1.0 / scale;
    for v in 0..w.len() {
        w[v] = emit[v] * next_bwd[v] * inv;
    }
}

/// Full scaled backward table `b[j * S + u]`, consistent with `fwd.scales`.
pub fn backward(hmm: &Hmm, obs: &[usize], fwd: &ForwardTable) -> Vec<f64> {
    let s = hmm.n_states();
    let n = obs.len();
    let mut out = vec![0.0; n * s];
    out[(n - 1) * s..].iter_mut().for_each(|x| *x = 1.0);
    let mut w = vec![0.0; s];
    for j in (0..n - 1).rev() {
        let (head, tail) = out.split_at_mut((j + 1) * s);
        weighted_next(hmm, &tail[..s], obs[j + 1], fwd.scales[j + 1], &mut w);
        backward_step(hmm, &w, &mut head[j * s..]);
    }
    out
}

/// Color posteriors, boundary posteriors and the log-likelihood.
///
/// Runs in O(n * transitions) time; only the forward table is kept in memory.
pub fn forward_backward(hmm: &Hmm, obs: &[usize]) -> Result<PosteriorSet> {
    let fwd = forward(hmm, obs)?;
    let s = hmm.n_states();
    let c = hmm.n_colors();
    let n = obs.len();
    let colors = hmm.state_colors();

    let mut color_post = vec![0.0; n * c];
    let mut pair_post = vec![0.0; n.saturating_sub(1) * c * c];
    let mut bwd = vec![1.0; s];
    let mut prev_bwd = vec![0.0; s];
    let mut w = vec![0.0; s];

    accumulate_colors(fwd.row(n - 1), &bwd, colors, &mut color_post[(n - 1) * c..n * c]);
    for j in (0..n - 1).rev() {
        weighted_next(hmm, &bwd, obs[j + 1], fwd.scales[j + 1], &mut w);
        let a = fwd.row(j);
        let pairs = &mut pair_post[j * c * c..(j + 1) * c * c];
        for u in 0..s {
            let (targets, probs) = hmm.transitions_from(u);
            let cu = colors[u] * c;
            let mut acc = 0.0;
            for (&v, &t) in targets.iter().zip(probs) {
                let term = t * w[v];
                acc += term;
                pairs[cu + colors[v]] += a[u] * term;
            }
            prev_bwd[u] = acc;
        }
        std::mem::swap(&mut bwd, &mut prev_bwd);
        accumulate_colors(a, &bwd, colors, &mut color_post[j * c..(j + 1) * c]);
    }

    PosteriorSet::from_tables(n, c, fwd.log_likelihood(), color_post, pair_post)
}

fn accumulate_colors(fwd: &[f64], bwd: &[f64], colors: &[usize], out: &mut [f64]) {
    for u in 0..fwd.len() {
        out[colors[u]] += fwd[u] * bwd[u];
    }
}

/// Most probable state path, reported as its coloring.
#[derive(Debug, Clone, PartialEq)]
pub struct ViterbiResult {
    pub annotation: Annotation,
    pub states: Vec<usize>,
    pub log_prob: f64,
}

/// Ties are broken toward the smallest predecessor state index, and toward
/// the smallest final state.
pub fn viterbi_decode(hmm: &Hmm, obs: &[usize]) -> Result<ViterbiResult> {
    hmm.check_observations(obs)?;
    let s = hmm.n_states();
    let n = obs.len();
    let ln = |p: f64| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY };
    let log_trans: Vec<f64> = (0..s).flat_map(|u| hmm.transitions_from(u).1.iter().map(|&p| p.ln())).collect();
    let mut offsets = Vec::with_capacity(s + 1);
    offsets.push(0);
    for u in 0..s {
        offsets.push(offsets[u] + hmm.transitions_from(u).0.len());
    }

    let mut score: Vec<f64> = (0..s).map(|u| ln(hmm.initial()[u]) + ln(hmm.emission(u, obs[0]))).collect();
    let mut next = vec![f64::NEG_INFINITY; s];
    let mut back = vec![u32::MAX; n * s];

    for j in 1..n {
        next.iter_mut().for_each(|x| *x = f64::NEG_INFINITY);
        let bp = &mut back[j * s..(j + 1) * s];
        for u in 0..s {
            let here = score[u];
            if here == f64::NEG_INFINITY {
                continue;
            }
            let (targets, _) = hmm.transitions_from(u);
            for (&v, &lt) in targets.iter().zip(&log_trans[offsets[u]..offsets[u + 1]]) {
                let cand = here + lt;
                if cand > next[v] {
                    next[v] = cand;
                    bp[v] = u as u32;
                }
            }
        }
        let emit = hmm.emission_column(obs[j]);
        for v in 0..s {
            next[v] += ln(emit[v]);
        }
        std::mem::swap(&mut score, &mut next);
    }

    let (mut best, log_prob) = score
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    if log_prob == f64::NEG_INFINITY {
        return Err(Error::ZeroLikelihood);
    }
    let mut states = vec![0; n];
    for j in (0..n).rev() {
        states[j] = best;
        if j > 0 {
            best = back[j * s + best] as usize;
        }
    }
    let annotation = Annotation::new(states.iter().map(|&u| hmm.state_colors()[u]).collect());
    Ok(ViterbiResult { annotation, states, log_prob })
}

/// Per-position argmax of the color posterior, smallest color on ties.
/// The result is not constrained to the color graph.
pub fn posterior_decode(post: &PosteriorSet) -> Annotation {
    let colors = (0..post.len())
        .map(|j| {
            post.colors_at(j)
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
                .0
        })
        .collect();
    Annotation::new(colors)
}
