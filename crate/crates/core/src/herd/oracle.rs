//! Exponential reference computations: every state path is enumerated and
//! gains are evaluated literally against every coloring it induces. These
//! share nothing with forward-backward or the decoding DP and exist to check
//! them on small instances.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::GainParams;
use crate::annotation::{Annotation, Boundary};
use crate::error::{Error, Result};
use crate::model::Hmm;

pub const MAX_PATHS: f64 = 1e7;
pub const MAX_COLORINGS: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GainKind {
    /// Every matching true boundary in the window counts.
    Counting,
    /// +1 if at least one matching true boundary lies in the window.
    Indicator,
}

/// The literal gain G(A, A') of predicting `pred` when `truth` is correct.
pub fn gain(pred: &Annotation, truth: &Annotation, params: &GainParams, kind: GainKind) -> f64 {
    gain_with_boundaries(pred, &pred.boundaries(), truth, &truth.boundaries(), params, kind)
}

fn gain_with_boundaries(
    pred: &Annotation,
    pred_b: &[Boundary],
    truth: &Annotation,
    truth_b: &[Boundary],
    params: &GainParams,
    kind: GainKind,
) -> f64 {
    let mut total: f64 = pred_b.iter().map(|b| single_boundary_gain(b, truth_b, params, kind)).sum();
    if params.alpha != 0.0 {
        let agree = pred.colors().iter().zip(truth.colors()).filter(|(a, b)| a == b).count();
        total += params.alpha * agree as f64;
    }
    total
}

/// Gain contributed by one predicted boundary; it depends on no other
/// predicted boundary.
fn single_boundary_gain(b: &Boundary, truth_b: &[Boundary], params: &GainParams, kind: GainKind) -> f64 {
    let matches = truth_b
        .iter()
        .filter(|t| t.from == b.from && t.to == b.to && t.gap.abs_diff(b.gap) <= params.window)
        .count();
    match kind {
        GainKind::Counting => (1.0 + params.gamma) * matches as f64 - params.gamma,
        GainKind::Indicator if matches > 0 => 1.0,
        GainKind::Indicator => -params.gamma,
    }
}

/// Pr(A', X) for every coloring A' reachable by some state path.
#[derive(Debug, Clone)]
pub struct ColoringDistribution {
    length: usize,
    n_colors: usize,
    likelihood: f64,
    colorings: Vec<(Annotation, f64)>,
}

impl ColoringDistribution {
    /// Enumerates all `|states|^n` state paths.
    pub fn enumerate(hmm: &Hmm, obs: &[usize]) -> Result<Self> {
        hmm.check_observations(obs)?;
        let size = (hmm.n_states() as f64).powi(obs.len() as i32);
        if size > MAX_PATHS {
            return Err(Error::InstanceTooLarge { size, limit: MAX_PATHS });
        }
        let n = obs.len();
        let s = hmm.n_states();
        let mut joint: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let mut path = vec![0usize; n];
        // odometer over state paths, most significant digit first
        loop {
            let mut p = hmm.initial()[path[0]] * hmm.emission(path[0], obs[0]);
            for j in 1..n {
                if p == 0.0 {
                    break;
                }
                p *= hmm.transition(path[j - 1], path[j]) * hmm.emission(path[j], obs[j]);
            }
            if p > 0.0 {
                let coloring: Vec<usize> = path.iter().map(|&u| hmm.states()[u].color).collect();
                *joint.entry(coloring).or_insert(0.0) += p;
            }
            let mut j = n;
            loop {
                if j == 0 {
                    let likelihood = joint.values().sum();
                    if !(likelihood > 0.0) {
                        return Err(Error::ZeroLikelihood);
                    }
                    let colorings = joint.into_iter().map(|(k, v)| (Annotation::new(k), v)).collect();
                    return Ok(ColoringDistribution { length: n, n_colors: hmm.n_colors(), likelihood, colorings });
                }
                j -= 1;
                path[j] += 1;
                if path[j] < s {
                    break;
                }
                path[j] = 0;
            }
        }
    }

    /// Pr(X), the sum over all state paths.
    pub fn likelihood(&self) -> f64 {
        self.likelihood
    }

    /// `(A', Pr(A' | X))` pairs, ordered by coloring.
    pub fn posteriors(&self) -> impl Iterator<Item = (&Annotation, f64)> + '_ {
        self.colorings.iter().map(move |(a, p)| (a, p / self.likelihood))
    }

    /// Marginal color posteriors, `[j * C + c]`.
    pub fn color_posteriors(&self) -> Vec<f64> {
        let c = self.n_colors;
        let mut out = vec![0.0; self.length * c];
        for (a, p) in self.posteriors() {
            for (j, &col) in a.colors().iter().enumerate() {
                out[j * c + col] += p;
            }
        }
        out
    }

    /// Marginal adjacent-pair posteriors, `[(k * C + c) * C + c2]`.
    pub fn pair_posteriors(&self) -> Vec<f64> {
        let c = self.n_colors;
        let mut out = vec![0.0; self.length.saturating_sub(1) * c * c];
        for (a, p) in self.posteriors() {
            for (k, w) in a.colors().windows(2).enumerate() {
                out[(k * c + w[0]) * c + w[1]] += p;
            }
        }
        out
    }

    /// sum over A' of G(A, A') Pr(A' | X).
    pub fn expected_gain(&self, annotation: &Annotation, params: &GainParams, kind: GainKind) -> f64 {
        let pred_b = annotation.boundaries();
        self.colorings
            .iter()
            .map(|(truth, p)| {
                gain_with_boundaries(annotation, &pred_b, truth, &truth.boundaries(), params, kind) * (p / self.likelihood)
            })
            .sum()
    }

    fn with_boundaries(&self) -> Vec<(&Annotation, Vec<Boundary>, f64)> {
        self.colorings.iter().map(|(a, p)| (a, a.boundaries(), p / self.likelihood)).collect()
    }
}

pub fn brute_force_expected_gain(
    hmm: &Hmm,
    obs: &[usize],
    annotation: &Annotation,
    params: &GainParams,
    kind: GainKind,
) -> Result<f64> {
    if annotation.len() != obs.len() {
        return Err(Error::LengthMismatch { expected: obs.len(), found: annotation.len() });
    }
    Ok(ColoringDistribution::enumerate(hmm, obs)?.expected_gain(annotation, params, kind))
}

/// Exhaustive argmax over every color-graph-feasible coloring. Ties go to
/// the lexicographically smallest coloring.
pub fn brute_force_best_annotation(
    hmm: &Hmm,
    obs: &[usize],
    params: &GainParams,
    kind: GainKind,
) -> Result<(Annotation, f64)> {
    let c = hmm.n_colors();
    let n = obs.len();
    let size = (c as f64).powi(n as i32);
    if size > MAX_COLORINGS {
        return Err(Error::InstanceTooLarge { size, limit: MAX_COLORINGS });
    }
    let dist = ColoringDistribution::enumerate(hmm, obs)?;
    let graph = hmm.color_graph();
    let truths = dist.with_boundaries();

    // The gain is a sum of per-boundary and per-position terms, so its
    // expectation is too. Each term is averaged literally over the
    // enumerated colorings, then every coloring is scored from the tables.
    let gaps = n.saturating_sub(1);
    let mut boundary_table = vec![0.0; gaps * c * c];
    for gap in 0..gaps {
        for from in 0..c {
            for to in (0..c).filter(|&to| to != from) {
                let b = Boundary { gap: gap + 1, from, to };
                boundary_table[(gap * c + from) * c + to] =
                    truths.iter().map(|(_, tb, p)| single_boundary_gain(&b, tb, params, kind) * p).sum();
            }
        }
    }
    let color_table = dist.color_posteriors();

    let total = c.pow(n as u32);
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut colors = vec![0; n];
    for index in 0..total {
        let mut rest = index;
        for j in (0..n).rev() {
            colors[j] = rest % c;
            rest /= c;
        }
        if !graph.is_start(colors[0]) || colors.windows(2).any(|w| !graph.allows(w[0], w[1])) {
            continue;
        }
        let mut value = 0.0;
        for (gap, w) in colors.windows(2).enumerate() {
            if w[0] != w[1] {
                value += boundary_table[(gap * c + w[0]) * c + w[1]];
            }
        }
        if params.alpha != 0.0 {
            value += params.alpha * colors.iter().enumerate().map(|(j, &col)| color_table[j * c + col]).sum::<f64>();
        }
        // indices run in lexicographic order, so strict > keeps the smallest
        if best.as_ref().is_none_or(|(_, bv)| value > *bv) {
            best = Some((colors.clone(), value));
        }
    }
    best.map(|(colors, v)| (Annotation::new(colors), v)).ok_or(Error::NoFeasibleAnnotation)
}
