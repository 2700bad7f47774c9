//! Jumping profile HMMs: one profile HMM per subtype, built from a shared
//! alignment, plus jump edges between profiles that model recombination.
//!
//! Each profile has match states `M1..ML`, insert states `I0..IL` and silent
//! delete states `D1..DL`. Jumps go from `M_i` of one profile to `M_{i+1}` of
//! every other profile with total probability `P_j`, split evenly. The last
//! column has no successor column, so `M_L`, `D_L` and `I_L` drain into `I_L`,
//! which then loops on itself.
//!
//! Delete states are removed when the model is assembled: every emitting
//! state gets the transition distribution it induces over emitting states
//! through any chain of deletes. Induced entries below [`SILENT_PRUNE`] are
//! dropped and the row is renormalized; long delete chains decay
//! geometrically, so this keeps rows short without touching anything a
//! likelihood can resolve.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Hmm, HmmParts, State};

pub const DNA: [char; 4] = ['a', 'c', 'g', 't'];
pub const GAP: u8 = b'-';

/// Induced silent-closure entries smaller than this are discarded.
pub const SILENT_PRUNE: f64 = 1e-12;

pub fn dna_index(b: u8) -> Option<usize> {
    match b.to_ascii_lowercase() {
        b'a' => Some(0),
        b'c' => Some(1),
        b'g' => Some(2),
        b't' => Some(3),
        _ => None,
    }
}

/// Aligned sequences grouped by subtype. Groups keep their input order; a
/// group's position is its color in the assembled model.
#[derive(Debug, Clone, PartialEq)]
pub struct SubtypeAlignment {
    columns: usize,
    groups: Vec<(String, Vec<Vec<u8>>)>,
}

impl SubtypeAlignment {
    pub fn new(groups: Vec<(String, Vec<String>)>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::InvalidAlignment(format!("need at least 2 subtypes, found {}", groups.len())));
        }
        let mut columns = None;
        let mut out = Vec::with_capacity(groups.len());
        for (name, seqs) in groups {
            if seqs.is_empty() {
                return Err(Error::InvalidAlignment(format!("subtype {name} has no sequences")));
            }
            if out.iter().any(|(n, _): &(String, _)| *n == name) {
                return Err(Error::InvalidAlignment(format!("duplicate subtype {name}")));
            }
            let mut rows = Vec::with_capacity(seqs.len());
            for seq in seqs {
                let row: Vec<u8> = seq.bytes().map(|b| b.to_ascii_lowercase()).collect();
                if let Some(bad) = row.iter().find(|&&b| b != GAP && dna_index(b).is_none()) {
                    return Err(Error::InvalidAlignment(format!(
                        "subtype {name}: unexpected character {:?}",
                        *bad as char
                    )));
                }
                match columns {
                    None => columns = Some(row.len()),
                    Some(l) if l != row.len() => {
                        return Err(Error::InvalidAlignment(format!(
                            "subtype {name}: sequence length {} differs from alignment length {l}",
                            row.len()
                        )))
                    }
                    _ => {}
                }
                rows.push(row);
            }
            out.push((name, rows));
        }
        let columns = columns.unwrap_or(0);
        if columns == 0 {
            return Err(Error::InvalidAlignment("alignment has no columns".into()));
        }
        Ok(SubtypeAlignment { columns, groups: out })
    }

    /// Parses FASTA whose headers carry a `subtype=<name>` token.
    /// `source` names the input in diagnostics.
    pub fn from_fasta(text: &str, source: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse { path: source.to_string(), line, message };
        let mut groups: Vec<(String, Vec<String>)> = Vec::new();
        let mut current: Option<(usize, String, usize)> = None; // (group, seq, header line)
        let flush = |current: &mut Option<(usize, String, usize)>, groups: &mut Vec<(String, Vec<String>)>| {
            if let Some((g, seq, line)) = current.take() {
                if seq.is_empty() {
                    return Err(parse_err(line, "record has no sequence".into()));
                }
                groups[g].1.push(seq);
            }
            Ok(())
        };
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('>') {
                flush(&mut current, &mut groups)?;
                let name = header
                    .split_whitespace()
                    .find_map(|tok| tok.strip_prefix("subtype="))
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| parse_err(line_no, "header lacks a subtype=<name> token".into()))?;
                let g = match groups.iter().position(|(n, _)| n == name) {
                    Some(g) => g,
                    None => {
                        groups.push((name.to_string(), Vec::new()));
                        groups.len() - 1
                    }
                };
                current = Some((g, String::new(), line_no));
            } else {
                let Some((_, seq, _)) = current.as_mut() else {
                    return Err(parse_err(line_no, "sequence data before the first header".into()));
                };
                if let Some(bad) = line.bytes().find(|&b| b != GAP && dna_index(b).is_none()) {
                    return Err(parse_err(line_no, format!("unexpected character {:?}", bad as char)));
                }
                seq.push_str(line);
            }
        }
        flush(&mut current, &mut groups)?;
        SubtypeAlignment::new(groups)
    }

    pub fn to_fasta(&self) -> String {
        let mut out = String::new();
        for (name, rows) in &self.groups {
            for (i, row) in rows.iter().enumerate() {
                out.push_str(&format!(">{name}_{} subtype={name}\n", i + 1));
                out.push_str(std::str::from_utf8(row).expect("ascii"));
                out.push('\n');
            }
        }
        out
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn n_subtypes(&self) -> usize {
        self.groups.len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.groups.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn group(&self, subtype: usize) -> &[Vec<u8>] {
        &self.groups[subtype].1
    }

    pub fn subtype_index(&self, name: &str) -> Option<usize> {
        self.groups.iter().position(|(n, _)| n == name)
    }

    /// First sequence of the group.
    pub fn representative(&self, subtype: usize) -> &[u8] {
        &self.groups[subtype].1[0]
    }
}

/// Within-profile transition priors. Each remainder goes to the edge that
/// advances one column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePriors {
    pub match_match: f64,
    pub match_insert: f64,
    pub match_delete: f64,
    pub insert_insert: f64,
    pub delete_delete: f64,
}

impl Default for ProfilePriors {
    fn default() -> Self {
        ProfilePriors { match_match: 0.97, match_insert: 0.015, match_delete: 0.015, insert_insert: 0.3, delete_delete: 0.3 }
    }
}

impl ProfilePriors {
    pub fn validate(&self) -> Result<()> {
        let all = [self.match_match, self.match_insert, self.match_delete, self.insert_insert, self.delete_delete];
        if all.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter("profile priors must lie in [0, 1]".into()));
        }
        let m = self.match_match + self.match_insert + self.match_delete;
        if (m - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("match transition priors sum to {m}")));
        }
        if self.insert_insert >= 1.0 || self.delete_delete >= 1.0 {
            return Err(Error::InvalidParameter("insert/delete self priors must be < 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpingHmmSpec {
    /// Total jump probability out of each match state, in [0, 1).
    pub jump_prob: f64,
    /// Additive smoothing for match emissions, > 0.
    pub pseudocount: f64,
    pub priors: ProfilePriors,
}

impl Default for JumpingHmmSpec {
    fn default() -> Self {
        JumpingHmmSpec { jump_prob: 0.01, pseudocount: 1.0, priors: ProfilePriors::default() }
    }
}

impl JumpingHmmSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.jump_prob) {
            return Err(Error::InvalidParameter(format!("jump probability must be in [0, 1), got {}", self.jump_prob)));
        }
        if !(self.pseudocount > 0.0) || !self.pseudocount.is_finite() {
            return Err(Error::InvalidParameter(format!("pseudocount must be > 0, got {}", self.pseudocount)));
        }
        self.priors.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProfileState {
    /// `I_i`, `i in 0..=L`.
    Insert(usize),
    /// `M_i`, `i in 1..=L`.
    Match(usize),
    /// `D_i`, `i in 1..=L`; silent.
    Delete(usize),
}

impl ProfileState {
    pub fn is_silent(self) -> bool {
        matches!(self, ProfileState::Delete(_))
    }

    /// Index within a profile: `I0, M1, I1, D1, M2, I2, D2, ...`.
    pub fn local_index(self) -> usize {
        match self {
            ProfileState::Insert(0) => 0,
            ProfileState::Match(i) => 3 * (i - 1) + 1,
            ProfileState::Insert(i) => 3 * (i - 1) + 2,
            ProfileState::Delete(i) => 3 * (i - 1) + 3,
        }
    }

    pub fn label(self) -> String {
        match self {
            ProfileState::Insert(i) => format!("I{i}"),
            ProfileState::Match(i) => format!("M{i}"),
            ProfileState::Delete(i) => format!("D{i}"),
        }
    }
}

/// One subtype's profile before assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileFragment {
    pub name: String,
    pub columns: usize,
    /// Emission of `M_i` at index `i - 1`, over `a, c, g, t`.
    pub match_emissions: Vec<[f64; 4]>,
    pub priors: ProfilePriors,
}

impl ProfileFragment {
    /// `3L + 1` states.
    pub fn state_count(&self) -> usize {
        3 * self.columns + 1
    }

    pub fn states(&self) -> Vec<ProfileState> {
        let mut out = vec![ProfileState::Insert(0)];
        for i in 1..=self.columns {
            out.extend([ProfileState::Match(i), ProfileState::Insert(i), ProfileState::Delete(i)]);
        }
        out
    }

    pub fn emission(&self, state: ProfileState) -> Option<[f64; 4]> {
        match state {
            ProfileState::Match(i) => Some(self.match_emissions[i - 1]),
            ProfileState::Insert(_) => Some([0.25; 4]),
            ProfileState::Delete(_) => None,
        }
    }

    /// Distribution over the first states of a path through this profile.
    pub fn entry(&self) -> Vec<(ProfileState, f64)> {
        let p = &self.priors;
        vec![
            (ProfileState::Insert(0), p.match_insert),
            (ProfileState::Match(1), p.match_match),
            (ProfileState::Delete(1), p.match_delete),
        ]
    }

    /// Within-profile successors, before any jump scaling.
    pub fn successors(&self, state: ProfileState) -> Vec<(ProfileState, f64)> {
        use ProfileState::*;
        let p = &self.priors;
        let last = self.columns;
        match state {
            Match(i) if i < last => vec![(Insert(i), p.match_insert), (Match(i + 1), p.match_match), (Delete(i + 1), p.match_delete)],
            Insert(i) if i < last => vec![(Insert(i), p.insert_insert), (Match(i + 1), 1.0 - p.insert_insert)],
            Delete(i) if i < last => vec![(Match(i + 1), 1.0 - p.delete_delete), (Delete(i + 1), p.delete_delete)],
            Match(_) | Insert(_) | Delete(_) => vec![(Insert(last), 1.0)],
        }
    }
}

/// Match emissions are `(count + pseudocount) / (non-gap + 4 * pseudocount)`
/// per column; inserts emit uniformly.
pub fn build_profile(name: &str, group: &[Vec<u8>], spec: &JumpingHmmSpec) -> Result<ProfileFragment> {
    spec.validate()?;
    let Some(first) = group.first() else {
        return Err(Error::InvalidAlignment(format!("subtype {name} has no sequences")));
    };
    let columns = first.len();
    if columns == 0 {
        return Err(Error::InvalidAlignment(format!("subtype {name} has empty sequences")));
    }
    if group.iter().any(|s| s.len() != columns) {
        return Err(Error::InvalidAlignment(format!("subtype {name} has sequences of unequal length")));
    }
    let pc = spec.pseudocount;
    let match_emissions = (0..columns)
        .map(|col| {
            let mut counts = [0.0f64; 4];
            for seq in group {
                if let Some(x) = dna_index(seq[col]) {
                    counts[x] += 1.0;
                }
            }
            let observed: f64 = counts.iter().sum();
            let denom = observed + 4.0 * pc;
            counts.map(|k| (k + pc) / denom)
        })
        .collect();
    Ok(ProfileFragment { name: name.to_string(), columns, match_emissions, priors: spec.priors })
}

pub fn build_profiles(msa: &SubtypeAlignment, spec: &JumpingHmmSpec) -> Result<Vec<ProfileFragment>> {
    (0..msa.n_subtypes()).map(|g| build_profile(&msa.groups[g].0, msa.group(g), spec)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphState {
    pub profile: usize,
    pub state: ProfileState,
}

/// The assembled jumping model with its silent states still present.
#[derive(Debug, Clone)]
pub struct JumpingGraph {
    pub names: Vec<String>,
    pub states: Vec<GraphState>,
    /// `None` for silent states.
    pub emissions: Vec<Option<[f64; 4]>>,
    pub initial: Vec<(usize, f64)>,
    pub transitions: Vec<Vec<(usize, f64)>>,
}

pub fn assemble_graph(profiles: &[ProfileFragment], jump_prob: f64) -> Result<JumpingGraph> {
    if profiles.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 profiles, got {}", profiles.len())));
    }
    if !(0.0..1.0).contains(&jump_prob) {
        return Err(Error::InvalidParameter(format!("jump probability must be in [0, 1), got {jump_prob}")));
    }
    let columns = profiles[0].columns;
    if let Some(bad) = profiles.iter().find(|p| p.columns != columns) {
        return Err(Error::InvalidParameter(format!(
            "profile {} has {} columns, expected {columns}",
            bad.name, bad.columns
        )));
    }
    let per = profiles[0].state_count();
    let global = |profile: usize, state: ProfileState| profile * per + state.local_index();
    let others = (profiles.len() - 1) as f64;

    let mut states = Vec::with_capacity(per * profiles.len());
    let mut emissions = Vec::with_capacity(per * profiles.len());
    let mut transitions = Vec::with_capacity(per * profiles.len());
    let mut initial = Vec::new();
    for (p, frag) in profiles.iter().enumerate() {
        for (s, prob) in frag.entry() {
            initial.push((global(p, s), prob / profiles.len() as f64));
        }
        for state in frag.states() {
            states.push(GraphState { profile: p, state });
            emissions.push(frag.emission(state));
            let mut row: Vec<(usize, f64)> = Vec::new();
            match state {
                ProfileState::Match(i) if i < columns => {
                    row.extend(frag.successors(state).into_iter().map(|(t, pr)| (global(p, t), pr * (1.0 - jump_prob))));
                    if jump_prob > 0.0 {
                        for q in (0..profiles.len()).filter(|&q| q != p) {
                            row.push((global(q, ProfileState::Match(i + 1)), jump_prob / others));
                        }
                    }
                }
                _ => row.extend(frag.successors(state).into_iter().map(|(t, pr)| (global(p, t), pr))),
            }
            row.retain(|&(_, pr)| pr > 0.0);
            transitions.push(row);
        }
    }
    initial.retain(|&(_, pr)| pr > 0.0);
    Ok(JumpingGraph {
        names: profiles.iter().map(|p| p.name.clone()).collect(),
        states,
        emissions,
        initial,
        transitions,
    })
}

impl JumpingGraph {
    /// Replaces silent states by the emitting-to-emitting transitions they
    /// induce and builds a validated [`Hmm`] over the emitting states.
    pub fn eliminate_silent(&self) -> Result<Hmm> {
        let n = self.states.len();
        let silent: Vec<bool> = self.emissions.iter().map(Option::is_none).collect();

        // Topological order of the silent subgraph (Kahn), then closures in reverse.
        let mut indegree = vec![0usize; n];
        for u in (0..n).filter(|&u| silent[u]) {
            for &(v, _) in &self.transitions[u] {
                if silent[v] {
                    indegree[v] += 1;
                }
            }
        }
        let mut order: Vec<usize> = (0..n).filter(|&u| silent[u] && indegree[u] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &(v, _) in &self.transitions[u] {
                if silent[v] {
                    indegree[v] -= 1;
                    if indegree[v] == 0 {
                        order.push(v);
                    }
                }
            }
        }
        if order.len() != silent.iter().filter(|&&s| s).count() {
            return Err(Error::InvalidParameter("silent states form a cycle".into()));
        }

        let mut closure: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for &d in order.iter().rev() {
            let mut acc = BTreeMap::new();
            for &(v, t) in &self.transitions[d] {
                if silent[v] {
                    for (&w, &r) in &closure[v] {
                        *acc.entry(w).or_insert(0.0) += t * r;
                    }
                } else {
                    *acc.entry(v).or_insert(0.0) += t;
                }
            }
            acc.retain(|_, p| *p >= SILENT_PRUNE);
            closure[d] = acc;
        }

        let resolve = |row: &[(usize, f64)]| -> BTreeMap<usize, f64> {
            let mut acc = BTreeMap::new();
            for &(v, t) in row {
                if silent[v] {
                    for (&w, &r) in &closure[v] {
                        *acc.entry(w).or_insert(0.0) += t * r;
                    }
                } else {
                    *acc.entry(v).or_insert(0.0) += t;
                }
            }
            let before: f64 = acc.values().sum();
            acc.retain(|_, p| *p >= SILENT_PRUNE);
            let after: f64 = acc.values().sum();
            if after < before {
                acc.values_mut().for_each(|p| *p /= after);
            }
            acc
        };

        let emitting: Vec<usize> = (0..n).filter(|&u| !silent[u]).collect();
        let mut new_index = vec![usize::MAX; n];
        for (i, &u) in emitting.iter().enumerate() {
            new_index[u] = i;
        }
        let remap = |m: BTreeMap<usize, f64>| -> Vec<(usize, f64)> {
            m.into_iter().map(|(v, p)| (new_index[v], p)).collect()
        };

        let mut initial = vec![0.0; emitting.len()];
        for (v, p) in remap(resolve(&self.initial)) {
            initial[v] = p;
        }
        let states = emitting
            .iter()
            .map(|&u| {
                let gs = self.states[u];
                State {
                    id: format!("{}:{}", self.names[gs.profile], gs.state.label()),
                    color: gs.profile,
                    emission: self.emissions[u].expect("emitting").to_vec(),
                }
            })
            .collect();
        let transitions = emitting.iter().map(|&u| remap(resolve(&self.transitions[u]))).collect();
        Hmm::from_parts(HmmParts {
            alphabet: DNA.to_vec(),
            colors: self.names.clone(),
            states,
            initial,
            transitions,
        })
    }
}

/// Assembles profiles into one jumping HMM with silent states eliminated.
/// State `s` of profile `p` gets color `p`.
pub fn assemble_jumping_hmm(profiles: &[ProfileFragment], jump_prob: f64) -> Result<Hmm> {
    assemble_graph(profiles, jump_prob)?.eliminate_silent()
}

pub fn build_jumping_hmm(msa: &SubtypeAlignment, spec: &JumpingHmmSpec) -> Result<Hmm> {
    spec.validate()?;
    assemble_jumping_hmm(&build_profiles(msa, spec)?, spec.jump_prob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::m1;

    fn spec(pc: f64) -> JumpingHmmSpec {
        JumpingHmmSpec { pseudocount: pc, ..JumpingHmmSpec::default() }
    }

    fn rows(seqs: &[&str]) -> Vec<Vec<u8>> {
        seqs.iter().map(|s| s.as_bytes().to_vec()).collect()
    }

    #[test]
    fn match_emission_smoothing() {
        let frag = build_profile("s", &rows(&["ac", "ac"]), &spec(1.0)).unwrap();
        assert_eq!(frag.match_emissions[0], [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]);
        assert_eq!(frag.match_emissions[1], [1.0 / 6.0, 0.5, 1.0 / 6.0, 1.0 / 6.0]);
    }

    #[test]
    fn all_gap_column_is_uniform() {
        let frag = build_profile("s", &rows(&["a-"]), &spec(1.0)).unwrap();
        assert_eq!(frag.match_emissions[1], [0.25; 4]);
        assert_eq!(frag.match_emissions[0], [0.4, 0.2, 0.2, 0.2]);
    }

    #[test]
    fn huge_pseudocount_tends_to_uniform() {
        let frag = build_profile("s", &rows(&["aaaa", "aaca"]), &spec(1e12)).unwrap();
        for e in &frag.match_emissions {
            for &p in e {
                assert!((p - 0.25).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn empty_group_rejected() {
        assert!(build_profile("s", &[], &spec(1.0)).is_err());
        assert!(spec(0.0).validate().is_err());
    }

    #[test]
    fn fragment_state_count_and_rows() {
        let frag = build_profile("s", &rows(&["acgt"]), &spec(1.0)).unwrap();
        assert_eq!(frag.state_count(), 13);
        let states = frag.states();
        assert_eq!(states.len(), 13);
        for (i, s) in states.iter().enumerate() {
            assert_eq!(s.local_index(), i);
            let sum: f64 = frag.successors(*s).iter().map(|(_, p)| p).sum();
            assert!((sum - 1.0).abs() < 1e-12, "{s:?}");
        }
        let entry: f64 = frag.entry().iter().map(|(_, p)| p).sum();
        assert!((entry - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_jump_is_block_diagonal() {
        let msa = m1();
        let hmm = build_jumping_hmm(&msa, &JumpingHmmSpec { jump_prob: 0.0, ..Default::default() }).unwrap();
        let g = hmm.color_graph();
        assert_eq!(g.pairs(), vec![(0, 0), (1, 1), (2, 2)]);
        // emitting states per profile: I0..I6 and M1..M6
        assert_eq!(hmm.n_states(), 3 * (2 * 6 + 1));
    }

    #[test]
    fn jump_mass_split() {
        let frags = build_profiles(&m1(), &spec(1.0)).unwrap();
        let graph = assemble_graph(&frags[..2], 0.01).unwrap();
        let per = frags[0].state_count();
        let m2 = ProfileState::Match(2).local_index();
        let m3 = ProfileState::Match(3).local_index();
        let row = &graph.transitions[m2];
        let jump: Vec<_> = row.iter().filter(|(v, _)| *v == per + m3).collect();
        assert_eq!(jump.len(), 1);
        assert!((jump[0].1 - 0.01).abs() < 1e-15);
        let sum: f64 = row.iter().map(|(_, p)| p).sum();
        assert!((sum - 1.0).abs() < 1e-12);

        let graph = assemble_graph(&frags, 0.02).unwrap();
        let row = &graph.transitions[m2];
        for q in [1, 2] {
            let e = row.iter().find(|(v, _)| *v == q * per + m3).unwrap();
            assert!((e.1 - 0.01).abs() < 1e-15);
        }
    }

    #[test]
    fn assembly_errors() {
        let frags = build_profiles(&m1(), &spec(1.0)).unwrap();
        assert!(assemble_graph(&frags[..1], 0.01).is_err());
        assert!(assemble_graph(&frags, 1.0).is_err());
        let short = build_profile("x", &rows(&["acg"]), &spec(1.0)).unwrap();
        assert!(assemble_graph(&[frags[0].clone(), short], 0.01).is_err());
    }

    #[test]
    fn fasta_parsing() {
        let text = ">r1 subtype=A\nac-t\n>r2 subtype=B\nACGT\n>r3 subtype=A\naagt\n";
        let msa = SubtypeAlignment::from_fasta(text, "t.fa").unwrap();
        assert_eq!(msa.names(), vec!["A", "B"]);
        assert_eq!(msa.group(0).len(), 2);
        assert_eq!(msa.columns(), 4);
        assert_eq!(SubtypeAlignment::from_fasta(&msa.to_fasta(), "x").unwrap(), msa);

        let err = SubtypeAlignment::from_fasta(">r1 subtype=A\nacgt\n>r2\nacgt\n", "t.fa").unwrap_err();
        assert_eq!(err.to_string(), "t.fa:3: header lacks a subtype=<name> token");
        let err = SubtypeAlignment::from_fasta(">r1 subtype=A\nacgt\n>r2 subtype=B\nacxt\n", "t.fa").unwrap_err();
        assert!(err.to_string().starts_with("t.fa:4:"));
        assert!(SubtypeAlignment::from_fasta(">r1 subtype=A\nacgt\n>r2 subtype=B\nacg\n", "t.fa").is_err());
    }
}
