//! Small reference models and alignments used by tests, examples and the CLI
//! smoke paths.

use indexmap::IndexMap;
use rand::Rng;

use crate::jphmm::SubtypeAlignment;
use crate::model::{build_hmm, ColorEntry, Hmm, HmmParts, ModelFile, State, StateEntry};

/// Two states `A` (color 0) and `B` (color 1) over `{x, y}`.
/// All four length-2 paths have distinct probabilities.
pub fn t1_model_file() -> ModelFile {
    let row = |pairs: &[(&str, f64)]| -> IndexMap<String, f64> {
        pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    };
    ModelFile {
        alphabet: vec!["x".into(), "y".into()],
        colors: vec![ColorEntry { id: 0, name: "A".into() }, ColorEntry { id: 1, name: "B".into() }],
        states: vec![
            StateEntry { id: "A".into(), color: 0, emission: row(&[("x", 0.9), ("y", 0.1)]) },
            StateEntry { id: "B".into(), color: 1, emission: row(&[("x", 0.2), ("y", 0.8)]) },
        ],
        initial: row(&[("A", 0.5), ("B", 0.5)]),
        transitions: [
            ("A".to_string(), row(&[("A", 0.9), ("B", 0.1)])),
            ("B".to_string(), row(&[("A", 0.2), ("B", 0.8)])),
        ]
        .into_iter()
        .collect(),
    }
}

pub fn t1() -> Hmm {
    build_hmm(&t1_model_file()).expect("T1 is valid")
}

/// One state emitting `x` with probability 1.
pub fn single_state() -> Hmm {
    Hmm::from_dense(
        &['x'],
        &["only"],
        vec![State { id: "s".into(), color: 0, emission: vec![1.0] }],
        vec![1.0],
        vec![vec![1.0]],
    )
    .expect("single-state model is valid")
}

/// Three ungapped subtypes `aaaaaa`, `cccccc`, `gggggg`.
pub fn m1() -> SubtypeAlignment {
    SubtypeAlignment::new(vec![
        ("s0".to_string(), vec!["aaaaaa".to_string()]),
        ("s1".to_string(), vec!["cccccc".to_string()]),
        ("s2".to_string(), vec!["gggggg".to_string()]),
    ])
    .expect("M1 is valid")
}

/// Random dense model. Every color is used by at least one state when
/// `n_states >= n_colors`. Each transition entry is zeroed with probability
/// `sparsity` (self-loops are kept so every row stays nonzero).
pub fn random_model<R: Rng>(
    rng: &mut R,
    n_states: usize,
    n_colors: usize,
    n_symbols: usize,
    sparsity: f64,
) -> Hmm {
    let norm = |len: usize, zero: &dyn Fn(usize) -> bool, rng: &mut R| {
        let mut v: Vec<f64> = (0..len)
            .map(|i| if zero(i) { 0.0 } else { 0.05 + rng.gen::<f64>() })
            .collect();
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    };
    let alphabet: Vec<char> = (0..n_symbols).map(|i| (b'a' + i as u8) as char).collect();
    let colors: Vec<String> = (0..n_colors).map(|c| format!("c{c}")).collect();
    let states: Vec<State> = (0..n_states)
        .map(|u| State {
            id: format!("s{u}"),
            color: if u < n_colors { u } else { rng.gen_range(0..n_colors) },
            emission: norm(n_symbols, &|_| false, rng),
        })
        .collect();
    let initial = norm(n_states, &|_| false, rng);
    let transitions = (0..n_states)
        .map(|u| {
            let zeros: Vec<bool> = (0..n_states).map(|v| v != u && rng.gen::<f64>() < sparsity).collect();
            norm(n_states, &|v| zeros[v], rng).into_iter().enumerate().filter(|&(_, p)| p > 0.0).collect()
        })
        .collect();
    Hmm::from_parts(HmmParts { alphabet, colors, states, initial, transitions }).expect("random model is valid")
}
