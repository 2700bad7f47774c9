mod common;

use common::{graph_likelihood, rel_close};
use gainhmm::fixtures::m1;
use gainhmm::herd::{herd_decode, GainParams};
use gainhmm::inference::forward;
use gainhmm::jphmm::{assemble_graph, build_jumping_hmm, build_profiles, JumpingHmmSpec, SubtypeAlignment};
use gainhmm::simgen::{simulate_truth_set, synthetic_subtypes, TruthSetConfig};
use gainhmm::viterbi_decode;
use proptest::prelude::*;

fn arb_alignment() -> impl Strategy<Value = SubtypeAlignment> {
    (1usize..=3, 2usize..=3).prop_flat_map(|(columns, groups)| {
        let seq = proptest::collection::vec(prop::sample::select(vec!['a', 'c', 'g', 't', '-']), columns)
            .prop_map(|v| v.into_iter().collect::<String>());
        proptest::collection::vec(proptest::collection::vec(seq, 1..=2), groups).prop_map(|groups| {
            let named = groups.into_iter().enumerate().map(|(i, g)| (format!("g{i}"), g)).collect();
            SubtypeAlignment::new(named).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn silent_elimination_preserves_likelihood(
        msa in arb_alignment(),
        jump in prop::sample::select(vec![0.0, 0.01, 0.3]),
        pseudocount in 0.25f64..2.0,
        obs in proptest::collection::vec(0usize..4, 1..=4),
    ) {
        let spec = JumpingHmmSpec { jump_prob: jump, pseudocount, ..JumpingHmmSpec::default() };
        let profiles = build_profiles(&msa, &spec).unwrap();
        let graph = assemble_graph(&profiles, jump).unwrap();
        let hmm = graph.eliminate_silent().unwrap();
        let brute = graph_likelihood(&graph, &obs);
        let fast = forward(&hmm, &obs).unwrap().log_likelihood().exp();
        prop_assert!(rel_close(fast, brute, 1e-9), "{fast} vs {brute}");
    }

    #[test]
    fn state_counts(msa in arb_alignment()) {
        let spec = JumpingHmmSpec::default();
        let l = msa.columns();
        let graph = assemble_graph(&build_profiles(&msa, &spec).unwrap(), spec.jump_prob).unwrap();
        prop_assert_eq!(graph.states.len(), msa.n_subtypes() * (3 * l + 1));
        prop_assert_eq!(graph.emissions.iter().filter(|e| e.is_none()).count(), msa.n_subtypes() * l);
        let hmm = graph.eliminate_silent().unwrap();
        prop_assert_eq!(hmm.n_states(), msa.n_subtypes() * (2 * l + 1));
        prop_assert_eq!(hmm.n_colors(), msa.n_subtypes());
    }
}

#[test]
fn assembled_rows_are_distributions() {
    let msa = synthetic_subtypes(200, 3, 0.15, 4).unwrap();
    let hmm = build_jumping_hmm(&msa, &JumpingHmmSpec::default()).unwrap();
    assert!((hmm.initial().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    for u in 0..hmm.n_states() {
        let (_, probs) = hmm.transitions_from(u);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9, "state {}", hmm.states()[u].id);
        assert!((hmm.states()[u].emission.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
    let graph = hmm.color_graph();
    for a in 0..3 {
        for b in 0..3 {
            assert!(graph.allows(a, b));
        }
    }
}

#[test]
fn no_jumps_means_single_color() {
    let spec = JumpingHmmSpec { jump_prob: 0.0, ..JumpingHmmSpec::default() };
    let hmm = build_jumping_hmm(&m1(), &spec).unwrap();
    assert!(hmm.color_graph().pairs().iter().all(|(a, b)| a == b));
    let params = GainParams::new(1, 0.0, 0.0).unwrap();
    for q in ["aaaccc", "acgacg", "gggaaa", "tttttt", "a"] {
        let obs = hmm.encode(q).unwrap();
        assert_eq!(viterbi_decode(&hmm, &obs).unwrap().annotation.boundary_count(), 0, "{q}");
        assert_eq!(herd_decode(&hmm, &obs, &params).unwrap().annotation.boundary_count(), 0, "{q}");
    }

    let msa = synthetic_subtypes(300, 3, 0.15, 8).unwrap();
    let hmm = build_jumping_hmm(&msa, &spec).unwrap();
    let config = TruthSetConfig { count: 5, min_breakpoints: 1, max_breakpoints: 2, min_span: 50, mutation_rate: 0.05, seed: 3 };
    for rec in simulate_truth_set(&msa, &config).unwrap() {
        let obs = hmm.encode(&rec.seq).unwrap();
        assert_eq!(viterbi_decode(&hmm, &obs).unwrap().annotation.boundary_count(), 0);
        assert_eq!(herd_decode(&hmm, &obs, &params).unwrap().annotation.boundary_count(), 0);
    }
}

#[test]
fn m1_recombinant_is_recovered() {
    // sharp emissions, so three mismatches cost more than one jump
    let spec = JumpingHmmSpec { pseudocount: 0.01, ..JumpingHmmSpec::default() };
    let hmm = build_jumping_hmm(&m1(), &spec).unwrap();
    let obs = hmm.encode("aaaccc").unwrap();
    let v = viterbi_decode(&hmm, &obs).unwrap().annotation;
    assert_eq!(v.colors(), &[0, 0, 0, 1, 1, 1]);
    let h = herd_decode(&hmm, &obs, &GainParams::new(0, 0.2, 0.0).unwrap()).unwrap().annotation;
    assert_eq!(h.colors(), &[0, 0, 0, 1, 1, 1]);
}
