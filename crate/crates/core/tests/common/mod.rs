#![allow(dead_code)]

use gainhmm::jphmm::JumpingGraph;
use gainhmm::Hmm;

/// Joint totals from summing over every state path directly.
pub struct Enumerated {
    pub likelihood: f64,
    /// `[j * C + c]`, normalized.
    pub colors: Vec<f64>,
    /// `[(k * C + c) * C + c2]`, normalized.
    pub pairs: Vec<f64>,
}

pub fn enumerate_paths(hmm: &Hmm, obs: &[usize]) -> Enumerated {
    let n = obs.len();
    let s = hmm.n_states();
    let c = hmm.n_colors();
    let col = hmm.state_colors();
    let mut colors = vec![0.0; n * c];
    let mut pairs = vec![0.0; n.saturating_sub(1) * c * c];
    let mut likelihood = 0.0;
    let total = s.pow(n as u32);
    let mut path = vec![0; n];
    for index in 0..total {
        let mut rest = index;
        for j in (0..n).rev() {
            path[j] = rest % s;
            rest /= s;
        }
        let mut p = hmm.initial()[path[0]] * hmm.emission(path[0], obs[0]);
        for j in 1..n {
            p *= hmm.transition(path[j - 1], path[j]) * hmm.emission(path[j], obs[j]);
        }
        if p == 0.0 {
            continue;
        }
        likelihood += p;
        for j in 0..n {
            colors[j * c + col[path[j]]] += p;
        }
        for k in 0..n.saturating_sub(1) {
            pairs[(k * c + col[path[k]]) * c + col[path[k + 1]]] += p;
        }
    }
    colors.iter_mut().for_each(|x| *x /= likelihood);
    pairs.iter_mut().for_each(|x| *x /= likelihood);
    Enumerated { likelihood, colors, pairs }
}

/// Pr(X) over a jumping graph with silent states still present, by
/// expanding every path including its silent detours.
pub fn graph_likelihood(graph: &JumpingGraph, obs: &[usize]) -> f64 {
    fn walk(graph: &JumpingGraph, obs: &[usize], state: usize, done: usize) -> f64 {
        let (done, weight) = match graph.emissions[state] {
            Some(e) => (done + 1, e[obs[done]]),
            None => (done, 1.0),
        };
        if weight == 0.0 {
            return 0.0;
        }
        if done == obs.len() {
            // a path ends on its last emission
            return if graph.emissions[state].is_some() { weight } else { 0.0 };
        }
        let rest: f64 = graph.transitions[state].iter().map(|&(v, t)| t * walk(graph, obs, v, done)).sum();
        weight * rest
    }
    graph.initial.iter().map(|&(u, p)| p * walk(graph, obs, u, 0)).sum()
}

/// Every sequence of length `n` over `k` symbols.
pub fn all_sequences(k: usize, n: usize) -> Vec<Vec<usize>> {
    (0..k.pow(n as u32))
        .map(|mut index| {
            let mut seq = vec![0; n];
            for j in (0..n).rev() {
                seq[j] = index % k;
                index /= k;
            }
            seq
        })
        .collect()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub struct Instance {
    pub hmm: Hmm,
    pub obs: Vec<usize>,
    pub params: gainhmm::GainParams,
}

/// Small decoding instance: n <= 8, C <= 3, W in {0,1,2},
/// gamma in {0, 0.2, 1, 5}, alpha in {0, 0.1}.
pub fn random_instance(seed: u64) -> Instance {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let colors = rng.gen_range(1..=3);
    let states = colors + rng.gen_range(0..=2);
    let symbols = rng.gen_range(2..=3);
    let sparsity = [0.0, 0.3, 0.6][rng.gen_range(0..3)];
    let hmm = gainhmm::fixtures::random_model(&mut rng, states, colors, symbols, sparsity);
    let n = rng.gen_range(1..=8);
    let obs = (0..n).map(|_| rng.gen_range(0..symbols)).collect();
    let params = gainhmm::GainParams::new(
        rng.gen_range(0..=2),
        [0.0, 0.2, 1.0, 5.0][rng.gen_range(0..4)],
        [0.0, 0.1][rng.gen_range(0..2)],
    )
    .unwrap();
    Instance { hmm, obs, params }
}
