//! Ground truth generation: sampling from a model, synthetic subtype
//! alignments, and spliced recombinant queries.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`. Independent draws for the same seed use separate ChaCha
//! streams, so outputs replay exactly from the seed recorded in each record.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annotation::Annotation;
use crate::error::{Error, Result};
use crate::jphmm::{dna_index, SubtypeAlignment, DNA, GAP};
use crate::model::Hmm;

const MUTATION_STREAM: u64 = 0;
const PLAN_STREAM: u64 = 1;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_index<R: Rng>(rng: &mut R, indices: impl Iterator<Item = (usize, f64)>) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in indices {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Draws a state path and its emitted symbols.
pub fn sample_path(hmm: &Hmm, length: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if length == 0 {
        return Err(Error::EmptySequence);
    }
    let mut rng = rng_for(seed, MUTATION_STREAM);
    let mut states = Vec::with_capacity(length);
    let mut symbols = Vec::with_capacity(length);
    let mut state = sample_index(&mut rng, hmm.initial().iter().copied().enumerate());
    for j in 0..length {
        if j > 0 {
            let (targets, probs) = hmm.transitions_from(state);
            state = sample_index(&mut rng, targets.iter().copied().zip(probs.iter().copied()));
        }
        states.push(state);
        let emission = &hmm.states()[state].emission;
        symbols.push(sample_index(&mut rng, emission.iter().copied().enumerate()));
    }
    Ok((states, symbols))
}

/// A subtype over a 1-based inclusive column span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub subtype: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub segments: Vec<SegmentSpec>,
    pub mutation_rate: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub id: String,
    pub seq: String,
    pub truth: Annotation,
    /// 1-based gaps where the truth changes color.
    pub breakpoints: Vec<usize>,
    pub provenance: Provenance,
}

fn check_segments(msa: &SubtypeAlignment, segments: &[SegmentSpec]) -> Result<()> {
    let mut next = 1;
    for (i, seg) in segments.iter().enumerate() {
        if seg.subtype >= msa.n_subtypes() {
            return Err(Error::UnknownSubtype(seg.subtype.to_string()));
        }
        if seg.start != next || seg.end < seg.start {
            return Err(Error::InvalidSegments(format!(
                "span {}..{} overlaps or leaves a gap (expected start {next})",
                seg.start, seg.end
            )));
        }
        if i > 0 && segments[i - 1].subtype == seg.subtype {
            return Err(Error::InvalidSegments(format!("adjacent spans both use subtype {}", seg.subtype)));
        }
        next = seg.end + 1;
    }
    if next != msa.columns() + 1 {
        return Err(Error::InvalidSegments(format!(
            "spans cover columns 1..{} but the alignment has {}",
            next - 1,
            msa.columns()
        )));
    }
    Ok(())
}

/// Splices the representative sequence of each subtype over its span,
/// strips gaps, then mutates each base to a uniformly chosen different base
/// with probability `mutation_rate`.
pub fn simulate_recombinant(
    msa: &SubtypeAlignment,
    segments: &[SegmentSpec],
    mutation_rate: f64,
    seed: u64,
) -> Result<TruthRecord> {
    if !(0.0..=1.0).contains(&mutation_rate) {
        return Err(Error::InvalidParameter(format!("mutation rate must be in [0, 1], got {mutation_rate}")));
    }
    check_segments(msa, segments)?;
    let mut rng = rng_for(seed, MUTATION_STREAM);
    let mut seq = String::with_capacity(msa.columns());
    let mut colors = Vec::with_capacity(msa.columns());
    for seg in segments {
        let rep = msa.representative(seg.subtype);
        for &b in &rep[seg.start - 1..seg.end] {
            if b == GAP {
                continue;
            }
            let mut x = dna_index(b).expect("alignment holds DNA");
            if rng.gen::<f64>() < mutation_rate {
                x = (x + rng.gen_range(1..4)) % 4;
            }
            seq.push(DNA[x]);
            colors.push(seg.subtype);
        }
    }
    if seq.is_empty() {
        return Err(Error::InvalidSegments("spliced query is empty after gap stripping".into()));
    }
    let truth = Annotation::new(colors);
    let breakpoints = truth.boundaries().iter().map(|b| b.gap).collect();
    Ok(TruthRecord {
        id: format!("rec_{seed}"),
        seq,
        truth,
        breakpoints,
        provenance: Provenance { segments: segments.to_vec(), mutation_rate, seed },
    })
}

/// Per-lineage substitution rate giving expected pairwise divergence `p`
/// between two independent copies of a common root, under uniform
/// substitutions: `p = 2r - 4r^2/3`.
pub fn lineage_rate(pairwise_divergence: f64) -> Result<f64> {
    if !(0.0..0.75).contains(&pairwise_divergence) {
        return Err(Error::InvalidParameter(format!("divergence must be in [0, 0.75), got {pairwise_divergence}")));
    }
    Ok(0.75 * (1.0 - (1.0 - 4.0 * pairwise_divergence / 3.0).sqrt()))
}

/// Star-phylogeny subtypes: a random root, independently mutated once per
/// subtype. Subtype names are `A`, `B`, `C`, ...; one ungapped sequence each.
pub fn synthetic_subtypes(
    columns: usize,
    n_subtypes: usize,
    pairwise_divergence: f64,
    seed: u64,
) -> Result<SubtypeAlignment> {
    if n_subtypes > 26 {
        return Err(Error::InvalidParameter("at most 26 synthetic subtypes".into()));
    }
    let rate = lineage_rate(pairwise_divergence)?;
    let mut rng = rng_for(seed, MUTATION_STREAM);
    let root: Vec<usize> = (0..columns).map(|_| rng.gen_range(0..4)).collect();
    let groups = (0..n_subtypes)
        .map(|i| {
            let seq: String = root
                .iter()
                .map(|&x| if rng.gen::<f64>() < rate { DNA[(x + rng.gen_range(1..4)) % 4] } else { DNA[x] })
                .collect();
            (((b'A' + i as u8) as char).to_string(), vec![seq])
        })
        .collect();
    SubtypeAlignment::new(groups)
}

/// Random spans with `breakpoints` switches, every span at least
/// `min_span` columns, adjacent spans on different subtypes.
pub fn random_segments<R: Rng>(
    rng: &mut R,
    columns: usize,
    n_subtypes: usize,
    breakpoints: usize,
    min_span: usize,
) -> Result<Vec<SegmentSpec>> {
    let min_span = min_span.max(1);
    if n_subtypes < 2 && breakpoints > 0 {
        return Err(Error::InvalidParameter("recombinants need at least 2 subtypes".into()));
    }
    if (breakpoints + 1) * min_span > columns {
        return Err(Error::InvalidParameter(format!(
            "{breakpoints} breakpoints with spans of {min_span} do not fit in {columns} columns"
        )));
    }
    // Distribute the slack uniformly: sorted draws over the free columns.
    let slack = columns - (breakpoints + 1) * min_span;
    let mut offsets: Vec<usize> = (0..breakpoints).map(|_| rng.gen_range(0..=slack)).collect();
    offsets.sort_unstable();
    let mut segments = Vec::with_capacity(breakpoints + 1);
    let mut start = 1;
    let mut subtype = rng.gen_range(0..n_subtypes);
    for i in 0..=breakpoints {
        let end = if i == breakpoints { columns } else { offsets[i] + (i + 1) * min_span };
        segments.push(SegmentSpec { subtype, start, end });
        start = end + 1;
        let step = rng.gen_range(1..n_subtypes.max(2));
        subtype = (subtype + step) % n_subtypes.max(1);
    }
    Ok(segments)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthSetConfig {
    pub count: usize,
    pub min_breakpoints: usize,
    pub max_breakpoints: usize,
    pub min_span: usize,
    pub mutation_rate: f64,
    pub seed: u64,
}

/// `count` recombinants; query `i` uses seed `seed + i` (stream 1 for its
/// span plan, stream 0 for mutations).
pub fn simulate_truth_set(msa: &SubtypeAlignment, config: &TruthSetConfig) -> Result<Vec<TruthRecord>> {
    if config.min_breakpoints > config.max_breakpoints {
        return Err(Error::InvalidParameter("min_breakpoints exceeds max_breakpoints".into()));
    }
    (0..config.count)
        .map(|i| {
            let seed = config.seed.wrapping_add(i as u64);
            let mut plan = rng_for(seed, PLAN_STREAM);
            let k = plan.gen_range(config.min_breakpoints..=config.max_breakpoints);
            let segments = random_segments(&mut plan, msa.columns(), msa.n_subtypes(), k, config.min_span)?;
            let mut rec = simulate_recombinant(msa, &segments, config.mutation_rate, seed)?;
            rec.id = format!("rec{:04}", i + 1);
            Ok(rec)
        })
        .collect()
}
