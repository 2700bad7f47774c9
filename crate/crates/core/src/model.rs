//! Labeled hidden Markov models.
//!
//! Every state carries a color; annotations are color sequences, so several
//! states may share a color. Probabilities are kept in linear space. The
//! transition matrix is stored row-sparse (CSR) since assembled jumping
//! models have thousands of states but only a few dozen successors each.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::annotation::Annotation;
use crate::error::{Error, Result, RowSum};

/// Rows off by more than this are rejected.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;
/// Rows off by less than this are left untouched, which keeps
/// build -> serialize -> build bit-for-bit stable.
const RENORMALIZE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub id: String,
    pub color: usize,
    /// Probability per alphabet symbol, in alphabet order.
    pub emission: Vec<f64>,
}

/// Raw model pieces, validated by [`Hmm::from_parts`].
#[derive(Debug, Clone)]
pub struct HmmParts {
    pub alphabet: Vec<char>,
    /// Color names; a color's id is its index.
    pub colors: Vec<String>,
    pub states: Vec<State>,
    pub initial: Vec<f64>,
    /// Sparse transition rows: `(target state, probability)`.
    pub transitions: Vec<Vec<(usize, f64)>>,
}

#[derive(Debug, Clone)]
pub struct Hmm {
    alphabet: Vec<char>,
    colors: Vec<String>,
    states: Vec<State>,
    initial: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    probs: Vec<f64>,
    // symbol-major copy of the emissions: emit_by_symbol[sym * n_states + state]
    emit_by_symbol: Vec<f64>,
    state_colors: Vec<usize>,
}

fn check_probability(value: f64, context: impl FnOnce() -> String) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange { context: context(), value })
    }
}

/// Validates the sum of `values` and renormalizes small deviations in place.
fn normalize(values: &mut [f64], err: impl FnOnce(RowSum) -> Error) -> Result<()> {
    let sum: f64 = values.iter().sum();
    let dev = (sum - 1.0).abs();
    if dev > ROW_SUM_TOLERANCE || !sum.is_finite() {
        return Err(err(RowSum(sum)));
    }
    if dev > RENORMALIZE_THRESHOLD {
        values.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(())
}

impl Hmm {
    pub fn from_parts(parts: HmmParts) -> Result<Self> {
        let HmmParts { alphabet, colors, mut states, mut initial, transitions } = parts;
        if alphabet.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        for (i, a) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(a) {
                return Err(Error::DuplicateSymbol(*a));
            }
        }
        if states.is_empty() {
            return Err(Error::NoStates);
        }
        let n = states.len();
        {
            let mut seen = std::collections::HashSet::new();
            for s in &states {
                if !seen.insert(s.id.as_str()) {
                    return Err(Error::DuplicateState(s.id.clone()));
                }
            }
        }
        for s in &mut states {
            if s.color >= colors.len() {
                return Err(Error::UnknownColor { state: s.id.clone(), color: s.color });
            }
            if s.emission.len() != alphabet.len() {
                return Err(Error::LengthMismatch { expected: alphabet.len(), found: s.emission.len() });
            }
            for &p in &s.emission {
                check_probability(p, || format!("emission of state {}", s.id))?;
            }
            let id = s.id.clone();
            normalize(&mut s.emission, |sum| Error::EmissionRowSum { state: id, sum })?;
        }

        if initial.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: initial.len() });
        }
        for &p in &initial {
            check_probability(p, || "initial distribution".to_string())?;
        }
        normalize(&mut initial, |sum| Error::InitialSum { sum })?;

        if transitions.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: transitions.len() });
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut probs = Vec::new();
        offsets.push(0);
        for (u, row) in transitions.into_iter().enumerate() {
            let mut row: Vec<(usize, f64)> = row;
            row.sort_by_key(|&(v, _)| v);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate transition {} -> {}",
                        states[u].id, states[w[0].0].id
                    )));
                }
            }
            for &(v, p) in &row {
                if v >= n {
                    return Err(Error::UnknownState {
                        name: format!("#{v}"),
                        context: format!("transitions of state {}", states[u].id),
                    });
                }
                check_probability(p, || format!("transition {} -> {}", states[u].id, states[v].id))?;
            }
            row.retain(|&(_, p)| p > 0.0);
            let mut values: Vec<f64> = row.iter().map(|&(_, p)| p).collect();
            let id = states[u].id.clone();
            normalize(&mut values, |sum| Error::TransitionRowSum { state: id, sum })?;
            targets.extend(row.iter().map(|&(v, _)| v));
            probs.extend(values);
            offsets.push(targets.len());
        }

        let n_sym = alphabet.len();
        let mut emit_by_symbol = vec![0.0; n_sym * n];
        for (u, s) in states.iter().enumerate() {
            for (x, &p) in s.emission.iter().enumerate() {
                emit_by_symbol[x * n + u] = p;
            }
        }
        let state_colors = states.iter().map(|s| s.color).collect();
        Ok(Hmm { alphabet, colors, states, initial, offsets, targets, probs, emit_by_symbol, state_colors })
    }

    /// Convenience constructor for small models written as dense matrices.
    pub fn from_dense(
        alphabet: &[char],
        colors: &[&str],
        states: Vec<State>,
        initial: Vec<f64>,
        transitions: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let transitions = transitions
            .into_iter()
            .map(|row| row.into_iter().enumerate().filter(|&(_, p)| p != 0.0).collect())
            .collect();
        Hmm::from_parts(HmmParts {
            alphabet: alphabet.to_vec(),
            colors: colors.iter().map(|s| s.to_string()).collect(),
            states,
            initial,
            transitions,
        })
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn n_symbols(&self) -> usize {
        self.alphabet.len()
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_colors(&self) -> usize {
        self.colors.len()
    }

    pub fn color_names(&self) -> &[String] {
        &self.colors
    }

    pub fn color_name(&self, color: usize) -> &str {
        &self.colors[color]
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state_colors(&self) -> &[usize] {
        &self.state_colors
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// Successors of `state` with their positive probabilities, by ascending target.
    #[inline]
    pub fn transitions_from(&self, state: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.offsets[state], self.offsets[state + 1]);
        (&self.targets[a..b], &self.probs[a..b])
    }

    pub fn transition(&self, from: usize, to: usize) -> f64 {
        let (targets, probs) = self.transitions_from(from);
        targets.binary_search(&to).map(|i| probs[i]).unwrap_or(0.0)
    }

    pub fn n_transitions(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn emission(&self, state: usize, symbol: usize) -> f64 {
        self.emit_by_symbol[symbol * self.states.len() + state]
    }

    /// Emission probabilities of every state for one symbol.
    #[inline]
    pub fn emission_column(&self, symbol: usize) -> &[f64] {
        let n = self.states.len();
        &self.emit_by_symbol[symbol * n..(symbol + 1) * n]
    }

    pub fn symbol_index(&self, symbol: char) -> Option<usize> {
        self.alphabet.iter().position(|&a| a == symbol)
    }

    /// Maps text onto symbol indices. Matching is exact first, then
    /// case-insensitive.
    pub fn encode(&self, text: &str) -> Result<Vec<usize>> {
        text.chars()
            .enumerate()
            .map(|(i, ch)| {
                self.symbol_index(ch)
                    .or_else(|| self.alphabet.iter().position(|a| a.eq_ignore_ascii_case(&ch)))
                    .ok_or(Error::SymbolNotInAlphabet { symbol: ch, position: i + 1 })
            })
            .collect()
    }

    pub fn decode_symbols(&self, symbols: &[usize]) -> String {
        symbols.iter().map(|&s| self.alphabet[s]).collect()
    }

    /// Checks that `obs` is a nonempty sequence of valid symbol indices.
    pub fn check_observations(&self, obs: &[usize]) -> Result<()> {
        if obs.is_empty() {
            return Err(Error::EmptySequence);
        }
        match obs.iter().position(|&x| x >= self.alphabet.len()) {
            Some(i) => Err(Error::SymbolIndexOutOfRange { index: obs[i], position: i + 1 }),
            None => Ok(()),
        }
    }

    pub fn color_graph(&self) -> ColorGraph {
        color_graph(self)
    }

    pub fn to_model_file(&self) -> ModelFile {
        let sym = |x: usize| self.alphabet[x].to_string();
        ModelFile {
            alphabet: self.alphabet.iter().map(|c| c.to_string()).collect(),
            colors: self
                .colors
                .iter()
                .enumerate()
                .map(|(id, name)| ColorEntry { id, name: name.clone() })
                .collect(),
            states: self
                .states
                .iter()
                .map(|s| StateEntry {
                    id: s.id.clone(),
                    color: s.color,
                    emission: s.emission.iter().enumerate().map(|(x, &p)| (sym(x), p)).collect(),
                })
                .collect(),
            initial: self
                .initial
                .iter()
                .enumerate()
                .filter(|&(_, &p)| p > 0.0)
                .map(|(u, &p)| (self.states[u].id.clone(), p))
                .collect(),
            transitions: (0..self.n_states())
                .map(|u| {
                    let (targets, probs) = self.transitions_from(u);
                    let row = targets
                        .iter()
                        .zip(probs)
                        .map(|(&v, &p)| (self.states[v].id.clone(), p))
                        .collect();
                    (self.states[u].id.clone(), row)
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_model_file()).expect("model file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        build_hmm(&file)
    }
}

/// On-disk model description. Probabilities are plain decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub alphabet: Vec<String>,
    pub colors: Vec<ColorEntry>,
    pub states: Vec<StateEntry>,
    pub initial: IndexMap<String, f64>,
    pub transitions: IndexMap<String, IndexMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorEntry {
    pub id: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub id: String,
    pub color: usize,
    pub emission: IndexMap<String, f64>,
}

/// Validates a parsed model description and builds the model.
pub fn build_hmm(spec: &ModelFile) -> Result<Hmm> {
    let mut alphabet = Vec::with_capacity(spec.alphabet.len());
    for s in &spec.alphabet {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => alphabet.push(c),
            _ => return Err(Error::BadSymbol(s.clone())),
        }
    }
    if alphabet.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    for (index, c) in spec.colors.iter().enumerate() {
        if c.id != index {
            return Err(Error::BadColorId { index, id: c.id });
        }
    }
    let state_index: IndexMap<&str, usize> =
        spec.states.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
    let lookup = |name: &str, context: &str| {
        state_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState { name: name.to_string(), context: context.to_string() })
    };

    let mut states = Vec::with_capacity(spec.states.len());
    for s in &spec.states {
        let mut emission = vec![0.0; alphabet.len()];
        for (sym, &p) in &s.emission {
            let x = spec
                .alphabet
                .iter()
                .position(|a| a == sym)
                .ok_or_else(|| Error::UnknownEmissionSymbol { state: s.id.clone(), symbol: sym.clone() })?;
            emission[x] = p;
        }
        states.push(State { id: s.id.clone(), color: s.color, emission });
    }

    let mut initial = vec![0.0; states.len()];
    for (name, &p) in &spec.initial {
        initial[lookup(name, "initial")?] = p;
    }

    let mut transitions = vec![Vec::new(); states.len()];
    for (from, row) in &spec.transitions {
        let u = lookup(from, "transitions")?;
        for (to, &p) in row {
            let v = lookup(to, &format!("transitions of state {from}"))?;
            transitions[u].push((v, p));
        }
    }

    Hmm::from_parts(HmmParts {
        alphabet,
        colors: spec.colors.iter().map(|c| c.name.clone()).collect(),
        states,
        initial,
        transitions,
    })
}

/// Color-level feasibility: which colors may start an annotation and which
/// ordered color pairs (including self-loops) may follow each other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorGraph {
    n_colors: usize,
    start: Vec<bool>,
    allowed: Vec<bool>,
}

impl ColorGraph {
    pub fn n_colors(&self) -> usize {
        self.n_colors
    }

    pub fn is_start(&self, color: usize) -> bool {
        self.start[color]
    }

    #[inline]
    pub fn allows(&self, from: usize, to: usize) -> bool {
        self.allowed[from * self.n_colors + to]
    }

    pub fn start_colors(&self) -> Vec<usize> {
        (0..self.n_colors).filter(|&c| self.start[c]).collect()
    }

    /// Allowed ordered pairs `(from, to)`, self-loops included.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let c = self.n_colors;
        (0..c * c).filter(|&i| self.allowed[i]).map(|i| (i / c, i % c)).collect()
    }

    /// Necessary condition only: a feasible coloring may still have zero
    /// probability.
    pub fn is_feasible(&self, annotation: &Annotation) -> bool {
        let colors = annotation.colors();
        match colors.first() {
            None => true,
            Some(&c) if c >= self.n_colors || !self.start[c] => false,
            Some(_) => colors.windows(2).all(|w| w[1] < self.n_colors && self.allows(w[0], w[1])),
        }
    }
}

pub fn color_graph(hmm: &Hmm) -> ColorGraph {
    let c = hmm.n_colors();
    let colors = hmm.state_colors();
    let mut start = vec![false; c];
    let mut allowed = vec![false; c * c];
    for (u, &p) in hmm.initial().iter().enumerate() {
        if p > 0.0 {
            start[colors[u]] = true;
        }
    }
    for u in 0..hmm.n_states() {
        let (targets, _) = hmm.transitions_from(u);
        for &v in targets {
            allowed[colors[u] * c + colors[v]] = true;
        }
    }
    ColorGraph { n_colors: c, start, allowed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{single_state, t1, t1_model_file};
    use proptest::prelude::*;

    #[test]
    fn single_state_model() {
        let hmm = single_state();
        assert_eq!(hmm.n_states(), 1);
        assert_eq!(hmm.n_colors(), 1);
        let g = hmm.color_graph();
        assert_eq!(g.start_colors(), vec![0]);
        assert_eq!(g.pairs(), vec![(0, 0)]);
    }

    #[test]
    fn t1_builds_and_graph() {
        let hmm = t1();
        assert_eq!(hmm.n_states(), 2);
        assert_eq!(hmm.transition(0, 1), 0.1);
        let g = hmm.color_graph();
        assert_eq!(g.start_colors(), vec![0, 1]);
        assert_eq!(g.pairs(), vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn t1_without_b_to_a_drops_pair() {
        let mut file = t1_model_file();
        file.transitions["B"].insert("A".into(), 0.0);
        file.transitions["B"].insert("B".into(), 1.0);
        let g = build_hmm(&file).unwrap().color_graph();
        assert!(!g.allows(1, 0));
        assert_eq!(g.pairs(), vec![(0, 0), (0, 1), (1, 1)]);
    }

    #[test]
    fn row_sum_violation_is_reported() {
        let mut file = t1_model_file();
        file.transitions["A"].insert("A".into(), 0.95);
        let err = build_hmm(&file).unwrap_err();
        assert_eq!(err.to_string(), "row sum 1.05 for state A");
    }

    #[test]
    fn small_deviation_is_renormalized() {
        let mut file = t1_model_file();
        file.transitions["A"].insert("A".into(), 0.9000005);
        let hmm = build_hmm(&file).unwrap();
        let (_, probs) = hmm.transitions_from(0);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unknown_color_and_empty_alphabet() {
        let mut file = t1_model_file();
        file.states[1].color = 7;
        assert!(matches!(build_hmm(&file), Err(Error::UnknownColor { color: 7, .. })));

        let mut file = t1_model_file();
        file.alphabet.clear();
        assert!(matches!(build_hmm(&file), Err(Error::EmptyAlphabet)));
    }

    #[test]
    fn negative_probability_rejected() {
        let mut file = t1_model_file();
        file.states[0].emission.insert("x".into(), -0.1);
        assert!(matches!(build_hmm(&file), Err(Error::ProbabilityOutOfRange { .. })));
    }

    #[test]
    fn unknown_state_reference() {
        let mut file = t1_model_file();
        file.initial.insert("Z".into(), 0.0);
        assert!(matches!(build_hmm(&file), Err(Error::UnknownState { .. })));
    }

    #[test]
    fn encode_rejects_foreign_symbol() {
        let hmm = t1();
        assert_eq!(hmm.encode("xyY").unwrap(), vec![0, 1, 1]);
        assert!(matches!(hmm.encode("xz"), Err(Error::SymbolNotInAlphabet { symbol: 'z', position: 2 })));
    }

    #[test]
    fn feasibility() {
        let mut file = t1_model_file();
        file.transitions["B"].insert("A".into(), 0.0);
        file.transitions["B"].insert("B".into(), 1.0);
        let g = build_hmm(&file).unwrap().color_graph();
        assert!(g.is_feasible(&Annotation::new(vec![0, 0, 1, 1])));
        assert!(!g.is_feasible(&Annotation::new(vec![0, 1, 0])));
    }

    fn arb_model() -> impl Strategy<Value = ModelFile> {
        (1usize..5, 1usize..4, 1usize..4).prop_flat_map(|(n, c, k)| {
            let row = move |len: usize| prop::collection::vec(0.0f64..1.0, len);
            (
                prop::collection::vec(row(k), n),
                row(n),
                prop::collection::vec(row(n), n),
                prop::collection::vec(0..c, n),
            )
                .prop_map(move |(emit, init, trans, colors)| {
                    let norm = |r: Vec<f64>| {
                        let r: Vec<f64> = r.into_iter().map(|x| x + 0.01).collect();
                        let s: f64 = r.iter().sum();
                        r.into_iter().map(|x| x / s).collect::<Vec<_>>()
                    };
                    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
                    let syms: Vec<String> = (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
                    ModelFile {
                        alphabet: syms.clone(),
                        colors: (0..c).map(|id| ColorEntry { id, name: format!("c{id}") }).collect(),
                        states: (0..n)
                            .map(|i| StateEntry {
                                id: names[i].clone(),
                                color: colors[i],
                                emission: syms.iter().cloned().zip(norm(emit[i].clone())).collect(),
                            })
                            .collect(),
                        initial: names.iter().cloned().zip(norm(init.clone())).collect(),
                        transitions: names
                            .iter()
                            .zip(&trans)
                            .map(|(u, row)| (u.clone(), names.iter().cloned().zip(norm(row.clone())).collect()))
                            .collect(),
                    }
                })
        })
    }

    proptest! {
        #[test]
        fn serialize_roundtrip_is_bit_exact(file in arb_model()) {
            let hmm = build_hmm(&file).unwrap();
            let text = hmm.to_json();
            let again = Hmm::from_json(&text).unwrap();
            prop_assert_eq!(hmm.initial(), again.initial());
            for u in 0..hmm.n_states() {
                prop_assert_eq!(hmm.transitions_from(u), again.transitions_from(u));
                prop_assert_eq!(&hmm.states()[u], &again.states()[u]);
            }
            prop_assert_eq!(again.to_json(), text);
        }

        #[test]
        fn gross_row_errors_rejected(extra in 2e-6f64..0.2) {
            let mut file = t1_model_file();
            file.transitions["B"].insert("B".into(), 0.8 + extra);
            let rejected = matches!(build_hmm(&file), Err(Error::TransitionRowSum { .. }));
            prop_assert!(rejected);
        }
    }
}
