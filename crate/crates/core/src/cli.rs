//! Command-line front end.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::annotation::Annotation;
use crate::bench::{self, BenchGrid, Decoder, Query};
use crate::herd::GainParams;
use crate::io::{format_fasta, format_segments, parse_fasta, parse_segments, read_to_string, write_string, FastaRecord};
use crate::jphmm::{build_jumping_hmm, JumpingHmmSpec, SubtypeAlignment};
use crate::model::Hmm;
use crate::simgen::{simulate_truth_set, synthetic_subtypes, TruthSetConfig};

#[derive(Debug, Parser)]
#[command(name = "gainhmm", version, about = "HMM annotation with boundary-tolerant gain decoding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a jumping HMM from a subtype-labelled alignment.
    BuildModel(BuildModelArgs),
    /// Annotate every record of a FASTA file.
    Decode(DecodeArgs),
    /// Compare decoders against a truth set over a W x gamma grid.
    Bench(BenchArgs),
    /// Simulate recombinant queries and their truth segments.
    Simulate(SimulateArgs),
    /// Write a synthetic subtype alignment.
    SynthMsa(SynthMsaArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GainArgs {
    /// Window half-width for boundary matching, in positions.
    #[arg(long = "W", default_value_t = 0)]
    pub window: usize,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
}

impl GainArgs {
    fn params(&self) -> Result<GainParams> {
        Ok(GainParams::new(self.window, self.gamma, self.alpha)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct BuildModelArgs {
    /// Alignment FASTA; headers carry subtype=<name>.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    pub pj: f64,
    #[arg(long, default_value_t = 1.0)]
    pub pseudocount: f64,
}

#[derive(Debug, Clone, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Decoder::Herd)]
    pub decoder: Decoder,
    #[command(flatten)]
    pub gain: GainArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Query FASTA.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Truth segment TSV for the queries.
    #[arg(long)]
    pub truth: PathBuf,
    /// Metrics CSV; a JSON summary and per-decoder prediction TSVs are
    /// written next to it.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub gain: GainArgs,
    #[arg(long = "sweep-W", value_delimiter = ',')]
    pub sweep_w: Vec<usize>,
    #[arg(long = "sweep-gamma", value_delimiter = ',')]
    pub sweep_gamma: Vec<f64>,
    /// Boundary matching tolerance; defaults to each row's W.
    #[arg(long)]
    pub tolerance: Option<usize>,
    /// Add a wall-time column (output is then no longer reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Alignment FASTA the recombinants are spliced from.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Query FASTA to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Truth segment TSV to write.
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub min_breakpoints: usize,
    #[arg(long, default_value_t = 3)]
    pub max_breakpoints: usize,
    #[arg(long, default_value_t = 100)]
    pub min_span: usize,
    #[arg(long, default_value_t = 0.05)]
    pub mutation_rate: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SynthMsaArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub columns: usize,
    #[arg(long, default_value_t = 3)]
    pub subtypes: usize,
    #[arg(long, default_value_t = 0.15)]
    pub divergence: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Settings shared by the batch commands, checked before any work starts.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub decoder: Option<Decoder>,
    pub gain: GainParams,
    pub jumping: JumpingHmmSpec,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub sweep_w: Option<Vec<usize>>,
    pub sweep_gamma: Option<Vec<f64>>,
    pub sweep_pj: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, grid) in [
            ("W", self.sweep_w.as_ref().map(Vec::len)),
            ("gamma", self.sweep_gamma.as_ref().map(Vec::len)),
            ("P_j", self.sweep_pj.as_ref().map(Vec::len)),
        ] {
            if grid == Some(0) {
                bail!("sweep grid for {name} is empty");
            }
        }
        let all: Vec<&PathBuf> = self.inputs.iter().chain(&self.outputs).collect();
        for (i, a) in all.iter().enumerate() {
            if all[..i].contains(a) {
                bail!("path {} is used more than once", a.display());
            }
        }
        self.gain.validate()?;
        Ok(())
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildModel(a) => {
            let spec = JumpingHmmSpec { jump_prob: a.pj, pseudocount: a.pseudocount, ..Default::default() };
            RunConfig { jumping: spec, inputs: vec![a.input.clone()], outputs: vec![a.out.clone()], ..Default::default() }
                .validate()?;
            cmd_build_model(&a.input, &spec, &a.out)
        }
        Command::Decode(a) => {
            let params = a.gain.params()?;
            RunConfig {
                decoder: Some(a.decoder),
                gain: params,
                inputs: vec![a.model.clone(), a.input.clone()],
                outputs: vec![a.out.clone()],
                ..Default::default()
            }
            .validate()?;
            cmd_decode(&a.model, &a.input, a.decoder, &params, &a.out)
        }
        Command::Bench(a) => {
            let windows = if a.sweep_w.is_empty() { vec![a.gain.window] } else { a.sweep_w.clone() };
            let gammas = if a.sweep_gamma.is_empty() { vec![a.gain.gamma] } else { a.sweep_gamma.clone() };
            let grid = BenchGrid { windows, gammas, alpha: a.gain.alpha, tolerance: a.tolerance };
            let json = sidecar_json(&a.out);
            RunConfig {
                gain: a.gain.params()?,
                inputs: vec![a.model.clone(), a.input.clone(), a.truth.clone()],
                outputs: vec![a.out.clone(), json],
                sweep_w: Some(grid.windows.clone()),
                sweep_gamma: Some(grid.gammas.clone()),
                ..Default::default()
            }
            .validate()?;
            cmd_bench(&a.model, &a.input, &a.truth, &grid, &a.out, a.timing)
        }
        Command::Simulate(a) => {
            RunConfig {
                inputs: vec![a.input.clone()],
                outputs: vec![a.out.clone(), a.truth.clone()],
                seed: Some(a.seed),
                ..Default::default()
            }
            .validate()?;
            let config = TruthSetConfig {
                count: a.count,
                min_breakpoints: a.min_breakpoints,
                max_breakpoints: a.max_breakpoints,
                min_span: a.min_span,
                mutation_rate: a.mutation_rate,
                seed: a.seed,
            };
            cmd_simulate(&a.input, &config, &a.out, &a.truth)
        }
        Command::SynthMsa(a) => {
            let msa = synthetic_subtypes(a.columns, a.subtypes, a.divergence, a.seed)?;
            write_string(&a.out, &msa.to_fasta())?;
            Ok(())
        }
    }
}

fn load_model(path: &Path) -> Result<Hmm> {
    let text = read_to_string(path)?;
    Hmm::from_json(&text).with_context(|| format!("{}", path.display()))
}

fn load_fasta(path: &Path) -> Result<Vec<FastaRecord>> {
    Ok(parse_fasta(&read_to_string(path)?, &path.display().to_string())?)
}

fn encode_records(hmm: &Hmm, records: &[FastaRecord]) -> Result<Vec<Vec<usize>>> {
    records
        .iter()
        .map(|r| hmm.encode(&r.seq).with_context(|| format!("record {}", r.id)))
        .collect()
}

pub fn cmd_build_model(msa_path: &Path, spec: &JumpingHmmSpec, out: &Path) -> Result<()> {
    spec.validate()?;
    let text = read_to_string(msa_path)?;
    let msa = SubtypeAlignment::from_fasta(&text, &msa_path.display().to_string())?;
    let hmm = build_jumping_hmm(&msa, spec)?;
    write_string(out, &hmm.to_json())?;
    Ok(())
}

pub fn cmd_decode(model: &Path, input: &Path, decoder: Decoder, params: &GainParams, out: &Path) -> Result<()> {
    let hmm = load_model(model)?;
    let records = load_fasta(input)?;
    let encoded = encode_records(&hmm, &records)?;
    let annotations: Vec<Annotation> = records
        .par_iter()
        .zip(&encoded)
        .map(|(r, obs)| bench::decode(&hmm, obs, decoder, params).with_context(|| format!("record {}", r.id)))
        .collect::<Result<_>>()?;
    let rows: Vec<(String, Annotation)> = records.iter().map(|r| r.id.clone()).zip(annotations).collect();
    write_string(out, &format_segments(&rows, hmm.color_names()))?;
    Ok(())
}

fn sidecar_json(out: &Path) -> PathBuf {
    out.with_extension("json")
}

/// Directory holding one segment TSV per (decoder, W, gamma).
pub fn prediction_dir(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "bench".into());
    out.with_file_name(format!("{stem}_pred"))
}

pub fn prediction_file(decoder: Decoder, window: usize, gamma: f64) -> String {
    format!("{}_W{window}_gamma{gamma}.tsv", decoder.name())
}

pub fn cmd_bench(model: &Path, input: &Path, truth: &Path, grid: &BenchGrid, out: &Path, timing: bool) -> Result<()> {
    grid.validate()?;
    let hmm = load_model(model)?;
    let records = load_fasta(input)?;
    let encoded = encode_records(&hmm, &records)?;
    let truths = parse_segments(&read_to_string(truth)?, &truth.display().to_string())?;
    let queries: Vec<Query> = records
        .iter()
        .zip(encoded)
        .map(|(r, obs)| {
            let (_, t) = truths
                .iter()
                .find(|(id, _)| *id == r.id)
                .with_context(|| format!("record {} has no truth segments", r.id))?;
            Ok(Query { id: r.id.clone(), obs, truth: t.clone() })
        })
        .collect::<Result<_>>()?;

    let output = bench::run_bench(&hmm, &queries, grid)?;
    write_string(out, &bench::format_csv(&output.rows, timing))?;

    let dir = prediction_dir(out);
    std::fs::create_dir_all(&dir).with_context(|| format!("{}", dir.display()))?;
    for p in &output.predictions {
        let rows: Vec<(String, Annotation)> =
            queries.iter().map(|q| q.id.clone()).zip(p.annotations.iter().cloned()).collect();
        write_string(&dir.join(prediction_file(p.decoder, p.window, p.gamma)), &format_segments(&rows, hmm.color_names()))?;
    }

    let summaries = bench::summaries(&queries, grid, &output)?;
    let rows: Vec<_> = output
        .rows
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).expect("row serializes");
            if !timing {
                v.as_object_mut().expect("object").remove("wall_ms");
            }
            v
        })
        .collect();
    let report = serde_json::json!({ "grid": grid, "rows": rows, "summaries": summaries });
    write_string(&sidecar_json(out), &serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

pub fn cmd_simulate(msa_path: &Path, config: &TruthSetConfig, out: &Path, truth: &Path) -> Result<()> {
    let text = read_to_string(msa_path)?;
    let msa = SubtypeAlignment::from_fasta(&text, &msa_path.display().to_string())?;
    let records = simulate_truth_set(&msa, config)?;
    let fasta: Vec<FastaRecord> =
        records.iter().map(|r| FastaRecord { id: r.id.clone(), seq: r.seq.clone() }).collect();
    write_string(out, &format_fasta(&fasta))?;
    let names: Vec<String> = msa.names().into_iter().map(String::from).collect();
    let rows: Vec<(String, Annotation)> = records.iter().map(|r| (r.id.clone(), r.truth.clone())).collect();
    write_string(truth, &format_segments(&rows, &names))?;
    Ok(())
}
