//! Command-line surface over the library: one subcommand per workflow.
//!
//! Exit codes: 0 success (or property holds), 1 property fails, 2
//! unknown/resource exhaustion, 3 usage or parse error.
//!
//! Every artifact-producing command writes a manifest next to its output so
//! the artifact can be regenerated from the manifest alone. `OCTAL_THREADS`
//! caps the worker count; all work currently runs on one worker, so any
//! value >= 1 is accepted and acts as a ceiling.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use octal::bench::{report_to_string, run_bench};
use octal::buchi::{check_with, read_automaton, CheckOptions, DEFAULT_STATE_CAP};
use octal::dataset::{
    build_perturbation_set, build_ranking_groups, corpus_stats, encode_dataset,
    encode_ranking_group, generate_corpus, load_manifest, load_records, manifest_path,
    sample_from_record, save_manifest, save_records, split_records, Dataset, DatasetManifest,
    Profile, Sample,
};
use octal::graph::{make_dictionary, EncodingDictionary, EncodingScheme, DEFAULT_SIGMA};
use octal::ltl::parse_ltl;
use octal::nn::{
    evaluate_classification, evaluate_ranking, graph_input, load_checkpoint, save_checkpoint,
    save_history, train, Checkpoint, Descriptor, GraphInput, Hyperparams, ModelParams, Variant,
};

const EXIT_FAILS: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "octal",
    version,
    about = "LTL model checking: classical oracle and learned checker"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct EncodingFlags {
    /// Feature encoding scheme: gaussian or one_hot.
    #[arg(long, default_value = "gaussian")]
    scheme: EncodingScheme,
    /// Emit the two extra scaled-endpoint columns (width 66 instead of 64).
    #[arg(long)]
    directed: bool,
    /// Seed of the symbol-value dictionary.
    #[arg(long, default_value_t = 0)]
    dict_seed: u64,
}

impl EncodingFlags {
    fn dictionary(&self) -> EncodingDictionary {
        make_dictionary(self.dict_seed, DEFAULT_SIGMA)
    }
}

#[derive(Args)]
struct LimitFlags {
    /// Maximum explored states per automaton construction.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
    /// Wall-clock budget per check in seconds.
    #[arg(long, default_value_t = 120.0)]
    timeout_s: f64,
}

impl LimitFlags {
    fn options(&self) -> CheckOptions {
        CheckOptions {
            state_cap: self.state_cap,
            timeout: Some(Duration::from_secs_f64(self.timeout_s)),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Check one automaton against one formula with the classical pipeline.
    Check {
        /// Automaton file (states/initial/accepting header plus transitions).
        automaton: PathBuf,
        /// Specification formula, e.g. "G (a -> F b)" spelled "G(!a | F b)".
        formula: String,
        #[command(flatten)]
        limits: LimitFlags,
    },
    /// Generate a labeled corpus and encode it to a JSONL dataset.
    Gen {
        /// Corpus profile: short_like or diverse_like.
        #[arg(long)]
        profile: Profile,
        /// Number of samples (half positive, half negative).
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        encoding: EncodingFlags,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-encode a stored dataset under a different scheme or dictionary.
    Encode {
        /// Input dataset (JSONL with stored automata).
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        encoding: EncodingFlags,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model on an encoded dataset.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// Train fraction of the stratified split.
        #[arg(long, default_value_t = 0.8)]
        split: f64,
        #[arg(long, default_value = "gin")]
        variant: Variant,
        #[arg(long, default_value_t = 1e-5)]
        lr: f64,
        #[arg(long, default_value_t = 0.1)]
        dropout: f64,
        #[arg(long, default_value_t = 5)]
        patience: usize,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 64)]
        batch: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Multiplier on the Glorot weight init.
        #[arg(long, default_value_t = 1.0)]
        init_scale: f64,
        /// Checkpoint output; the loss history goes to `<out>.history`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a checkpoint on an encoded dataset.
    Eval {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Rank one satisfied formula among fifty violated ones per group.
    Rank {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        model: PathBuf,
    },
    /// Derive a perturbed negative set from a dataset of positives.
    Perturb {
        #[arg(long)]
        input: PathBuf,
        /// Fraction of incidence edges to drop.
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time the classical oracle against the learned checker.
    Bench {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        limits: LimitFlags,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn resource(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_UNKNOWN,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when stdout is a closed pipe (e.g. `octal gen ... | head`)
    // instead of panicking on the write error.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version output exits clean; argument errors are
            // usage errors.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = check_thread_cap() {
        eprintln!("error: {}", e.message);
        return ExitCode::from(e.code);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

/// `OCTAL_THREADS` caps the worker count. Execution is single-threaded, so
/// the cap only needs to be a positive integer.
fn check_thread_cap() -> Result<(), CliError> {
    match std::env::var("OCTAL_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(CliError::usage(format!(
                "OCTAL_THREADS must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.cmd {
        Cmd::Check {
            automaton,
            formula,
            limits,
        } => cmd_check(&automaton, &formula, &limits),
        Cmd::Gen {
            profile,
            count,
            seed,
            encoding,
            out,
        } => cmd_gen(profile, count, seed, &encoding, &out),
        Cmd::Encode {
            input,
            encoding,
            out,
        } => cmd_encode(&input, &encoding, &out),
        Cmd::Train {
            data,
            split,
            variant,
            lr,
            dropout,
            patience,
            epochs,
            batch,
            seed,
            init_scale,
            out,
        } => cmd_train(
            &data, split, variant, lr, dropout, patience, epochs, batch, seed, init_scale, &out,
        ),
        Cmd::Eval { data, model } => cmd_eval(&data, &model),
        Cmd::Rank { count, seed, model } => cmd_rank(count, seed, &model),
        Cmd::Perturb {
            input,
            p,
            seed,
            out,
        } => cmd_perturb(&input, p, seed, &out),
        Cmd::Bench {
            data,
            model,
            limits,
        } => cmd_bench(&data, &model, &limits),
    }
}

fn cmd_check(automaton_path: &Path, formula: &str, limits: &LimitFlags) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(automaton_path)
        .map_err(|e| CliError::usage(format!("{}: {e}", automaton_path.display())))?;
    let b = read_automaton(&text).map_err(|e| CliError::usage(e.to_string()))?;
    let f = parse_ltl(formula).map_err(|e| CliError::usage(e.to_string()))?;
    match check_with(&b, &f, &limits.options()) {
        Ok(verdict) => {
            if verdict.holds {
                println!("holds");
            } else {
                println!("fails");
            }
            if let Some(w) = &verdict.counterexample {
                println!("counterexample prefix: {}", render_word(&w.prefix));
                println!("counterexample loop:   {}", render_word(&w.looping));
            }
            println!("states explored: {}", verdict.explored_states);
            println!("wall time: {:.6} s", verdict.elapsed.as_secs_f64());
            Ok(if verdict.holds { 0 } else { EXIT_FAILS })
        }
        Err(e) => {
            println!("unknown");
            eprintln!("resource limit: {e}");
            Ok(EXIT_UNKNOWN)
        }
    }
}

fn render_word(word: &[std::collections::BTreeMap<char, bool>]) -> String {
    let steps: Vec<String> = word
        .iter()
        .map(|step| {
            let lits: Vec<String> = step
                .iter()
                .map(|(a, v)| if *v { a.to_string() } else { format!("!{a}") })
                .collect();
            if lits.is_empty() {
                "1".to_string()
            } else {
                lits.join("&")
            }
        })
        .collect();
    format!("[{}]", steps.join(" ; "))
}

fn write_dataset(
    out: &Path,
    ds: &Dataset,
    encoding: &EncodingFlags,
    profile_name: &str,
    seed: u64,
    extra: BTreeMap<String, String>,
) -> Result<(), CliError> {
    let records = encode_dataset(ds, encoding.scheme, encoding.directed, &encoding.dictionary())
        .map_err(|e| CliError::resource(e.to_string()))?;
    save_records(out, &records).map_err(|e| CliError::resource(e.to_string()))?;
    let mut extra = extra;
    extra.insert("dict_seed".into(), encoding.dict_seed.to_string());
    let manifest = DatasetManifest {
        profile: profile_name.to_string(),
        seed,
        count: ds.len(),
        scheme: encoding.scheme.name().to_string(),
        directed: encoding.directed,
        stats: corpus_stats(ds),
        extra,
    };
    save_manifest(out, &manifest).map_err(|e| CliError::resource(e.to_string()))?;
    println!(
        "wrote {} samples to {} (manifest {})",
        ds.len(),
        out.display(),
        manifest_path(out).display()
    );
    Ok(())
}

fn cmd_gen(
    profile: Profile,
    count: usize,
    seed: u64,
    encoding: &EncodingFlags,
    out: &Path,
) -> Result<u8, CliError> {
    let ds = generate_corpus(profile, count, seed).map_err(|e| CliError::resource(e.to_string()))?;
    write_dataset(out, &ds, encoding, profile.name(), seed, BTreeMap::new())?;
    Ok(0)
}

fn load_samples(path: &Path) -> Result<Dataset, CliError> {
    let records = load_records(path).map_err(|e| CliError::usage(e.to_string()))?;
    let samples: Result<Vec<Sample>, _> = records.iter().map(sample_from_record).collect();
    Ok(Dataset {
        samples: samples.map_err(|e| CliError::usage(e.to_string()))?,
    })
}

fn cmd_encode(input: &Path, encoding: &EncodingFlags, out: &Path) -> Result<u8, CliError> {
    let ds = load_samples(input)?;
    let (profile, seed) = match load_manifest(input) {
        Ok(m) => (m.profile, m.seed),
        Err(_) => ("unknown".to_string(), 0),
    };
    let extra = BTreeMap::from([("source".to_string(), input.display().to_string())]);
    write_dataset(out, &ds, encoding, &profile, seed, extra)?;
    Ok(0)
}

fn cmd_train(
    data: &Path,
    split: f64,
    variant: Variant,
    lr: f64,
    dropout: f64,
    patience: usize,
    epochs: usize,
    batch: usize,
    seed: u64,
    init_scale: f64,
    out: &Path,
) -> Result<u8, CliError> {
    if !(0.0..1.0).contains(&split) || split == 0.0 {
        return Err(CliError::usage("--split must be in (0, 1)"));
    }
    let records = load_records(data).map_err(|e| CliError::usage(e.to_string()))?;
    if records.is_empty() {
        return Err(CliError::usage("dataset is empty"));
    }
    let (scheme, directed, dict_seed) = match load_manifest(data) {
        Ok(m) => (
            m.scheme
                .parse()
                .map_err(|e: String| CliError::usage(e))?,
            m.directed,
            m.extra
                .get("dict_seed")
                .and_then(|v| v.parse().ok())
                .unwrap_or(0),
        ),
        Err(_) => (EncodingScheme::Gaussian, false, 0),
    };
    let (train_recs, val_recs) = split_records(&records, split, seed);
    let to_inputs = |recs: &[octal::graph::SampleRecord]| -> Vec<GraphInput> {
        recs.iter().map(graph_input).collect()
    };
    let train_inputs = to_inputs(&train_recs);
    let val_inputs = to_inputs(&val_recs);
    let width = records[0].features.ncols();
    let hp = Hyperparams {
        learning_rate: lr,
        dropout,
        patience,
        max_epochs: epochs,
        batch_size: batch,
        seed,
        ..Hyperparams::default()
    };
    if !(init_scale.is_finite() && init_scale > 0.0) {
        return Err(CliError::usage("--init-scale must be positive"));
    }
    let params = ModelParams::init_scaled(Descriptor::new(variant, width), seed, init_scale);
    let (best, history) =
        train(params, &train_inputs, &val_inputs, &hp).map_err(|e| CliError::resource(e.to_string()))?;
    let ck = Checkpoint {
        params: best,
        hyperparams: hp,
        dict_seed,
        dict_sigma: DEFAULT_SIGMA,
        scheme,
        directed,
    };
    save_checkpoint(out, &ck).map_err(|e| CliError::resource(e.to_string()))?;
    let history_path = {
        let mut name = out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        name.push_str(".history");
        out.with_file_name(name)
    };
    save_history(&history_path, &history).map_err(|e| CliError::resource(e.to_string()))?;
    let last = history.last().expect("at least one epoch");
    println!(
        "trained {} for {} epochs; best val accuracy {:.4}",
        variant.name(),
        history.len(),
        history
            .iter()
            .map(|r| r.val_accuracy)
            .fold(f64::NEG_INFINITY, f64::max)
    );
    println!(
        "final epoch {}: train loss {:.6}, val accuracy {:.4}",
        last.epoch, last.train_loss, last.val_accuracy
    );
    println!(
        "checkpoint {} (history {})",
        out.display(),
        history_path.display()
    );
    Ok(0)
}

fn cmd_eval(data: &Path, model: &Path) -> Result<u8, CliError> {
    let records = load_records(data).map_err(|e| CliError::usage(e.to_string()))?;
    let ck = load_checkpoint(model).map_err(|e| CliError::usage(e.to_string()))?;
    let metrics =
        evaluate_classification(&ck.params, &records).map_err(|e| CliError::usage(e.to_string()))?;
    println!("samples   {}", records.len());
    println!("accuracy  {:.4}", metrics.accuracy);
    println!("precision {:.4}", metrics.precision);
    println!("recall    {:.4}", metrics.recall);
    let c = metrics.confusion;
    println!("confusion tp {} fp {} fn {} tn {}", c.tp, c.fp, c.fn_, c.tn);
    Ok(0)
}

fn cmd_rank(count: usize, seed: u64, model: &Path) -> Result<u8, CliError> {
    let ck = load_checkpoint(model).map_err(|e| CliError::usage(e.to_string()))?;
    let dict = ck.dictionary();
    let groups =
        build_ranking_groups(count, seed).map_err(|e| CliError::resource(e.to_string()))?;
    let encoded: Result<Vec<_>, _> = groups
        .iter()
        .map(|g| encode_ranking_group(g, ck.scheme, ck.directed, &dict))
        .collect();
    let encoded = encoded.map_err(|e| CliError::resource(e.to_string()))?;
    let metrics =
        evaluate_ranking(&ck.params, &encoded).map_err(|e| CliError::resource(e.to_string()))?;
    println!("groups {}", count);
    println!("MRR    {:.4}", metrics.mrr);
    for (k, h) in &metrics.hits_at_k {
        println!("Hits@{k} {h:.4}");
    }
    Ok(0)
}

fn cmd_perturb(input: &Path, p: f64, seed: u64, out: &Path) -> Result<u8, CliError> {
    let ds = load_samples(input)?;
    // The protocol derives negatives from satisfied instances only.
    let positives = Dataset {
        samples: ds.samples.into_iter().filter(|s| s.label == 1).collect(),
    };
    let perturbed =
        build_perturbation_set(&positives, p, seed).map_err(|e| CliError::usage(e.to_string()))?;
    let (scheme, directed, dict_seed) = match load_manifest(input) {
        Ok(m) => (
            m.scheme.parse().unwrap_or(EncodingScheme::Gaussian),
            m.directed,
            m.extra
                .get("dict_seed")
                .and_then(|v| v.parse().ok())
                .unwrap_or(0),
        ),
        Err(_) => (EncodingScheme::Gaussian, false, 0),
    };
    let encoding = EncodingFlags {
        scheme,
        directed,
        dict_seed,
    };
    let extra = BTreeMap::from([
        ("source".to_string(), input.display().to_string()),
        ("perturbation_p".to_string(), format!("{p}")),
    ]);
    write_dataset(out, &perturbed, &encoding, "perturbed", seed, extra)?;
    Ok(0)
}

fn cmd_bench(data: &Path, model: &Path, limits: &LimitFlags) -> Result<u8, CliError> {
    let ds = load_samples(data)?;
    let ck = load_checkpoint(model).map_err(|e| CliError::usage(e.to_string()))?;
    let report = run_bench(
        &ds.samples,
        &ck.params,
        &ck.dictionary(),
        ck.scheme,
        ck.directed,
        &limits.options(),
    )
    .map_err(|e| CliError::resource(e.to_string()))?;
    print!("{}", report_to_string(&report));
    Ok(0)
}
