//! Dataset factory: labeled (automaton, formula) corpora with every label
//! confirmed by the classical oracle, stratified train/validation splits,
//! one-vs-many ranking groups, and edge-perturbation sets.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::buchi::{
    accepts_lasso, check, is_empty, read_automaton, translate, write_automaton, BuchiAutomaton,
    Transition, DEFAULT_STATE_CAP,
};
use crate::graph::{
    build_spec_tree, build_system_graph, build_union, encode_features, perturb_edges, read_sample,
    write_sample, EncodingDictionary, EncodingScheme, NodePayload, SampleMeta, SampleRecord,
    UnionGraph,
};
use crate::ltl::{parse_ltl, random_ltl, to_core, to_nnf, GenConfig, LtlFormula};

/// Generation profile; names echo the corpus families the envelopes are
/// drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    ShortLike,
    DiverseLike,
}

/// Hard envelope a profile's samples must fall in, plus the generator knobs
/// that keep them there.
#[derive(Debug, Clone, Copy)]
pub struct ProfileParams {
    pub atom_count: usize,
    pub tree_size_min: usize,
    pub tree_size_max: usize,
    pub len_max: usize,
    pub state_max: usize,
    pub transition_max: usize,
}

impl Profile {
    pub fn params(self) -> ProfileParams {
        match self {
            Profile::ShortLike => ProfileParams {
                atom_count: 3,
                tree_size_min: 2,
                tree_size_max: 10,
                len_max: 80,
                state_max: 95,
                transition_max: 1_711,
            },
            Profile::DiverseLike => ProfileParams {
                atom_count: 4,
                tree_size_min: 4,
                tree_size_max: 22,
                len_max: 144,
                state_max: 2_234,
                transition_max: 397_814,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::ShortLike => "short_like",
            Profile::DiverseLike => "diverse_like",
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "short_like" => Ok(Profile::ShortLike),
            "diverse_like" => Ok(Profile::DiverseLike),
            other => Err(format!("unknown profile {other:?}")),
        }
    }
}

/// One labeled model-checking instance. The label is oracle-verified at
/// construction time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub automaton: BuchiAutomaton,
    pub formula: LtlFormula,
    pub label: u8,
    pub seed: u64,
    /// Present on perturbation-set members: `(fraction, seed)` fed to
    /// `perturb_edges` when the union graph is built.
    pub perturbation: Option<(f64, u64)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.samples.iter().filter(|s| s.label == 1).count()
    }

    pub fn negatives(&self) -> usize {
        self.samples.iter().filter(|s| s.label == 0).count()
    }
}

/// One automaton, its generating formula, and fifty oracle-confirmed
/// non-satisfied formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingGroup {
    pub automaton: BuchiAutomaton,
    pub positive: LtlFormula,
    pub negatives: Vec<LtlFormula>,
    pub seed: u64,
}

pub const RANKING_NEGATIVES: usize = 50;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("sample count must be even for balanced classes, got {0}")]
    OddCount(usize),
    #[error("generation budget exhausted while drawing {stage} (seed {seed})")]
    BudgetExhausted { stage: &'static str, seed: u64 },
    #[error("perturbation input must contain only positive samples")]
    NotAllPositive,
    #[error("perturbation fraction must be in (0, 1], got {0}")]
    BadFraction(f64),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Record {
        line: usize,
        source: crate::graph::SampleError,
    },
    #[error("stored formula does not parse: {0}")]
    BadStoredFormula(String),
    #[error("stored automaton does not parse: {0}")]
    BadStoredAutomaton(String),
    #[error("record is missing the stored automaton text")]
    MissingAutomaton,
}

const ATTEMPTS_PER_SAMPLE: usize = 400;

/// Draw one formula within the profile envelope whose automaton also fits,
/// returning the formula and its automaton.
fn draw_in_envelope(
    p: &ProfileParams,
    rng: &mut ChaCha8Rng,
) -> Option<(LtlFormula, BuchiAutomaton)> {
    for _ in 0..ATTEMPTS_PER_SAMPLE {
        let size = rng.gen_range(p.tree_size_min..=p.tree_size_max);
        let f = random_ltl(&GenConfig::new(size, p.atom_count, rng.gen()));
        if formula_len(&f) > p.len_max {
            continue;
        }
        let Ok(b) = translate(&to_core(&to_nnf(&f)), DEFAULT_STATE_CAP) else {
            continue;
        };
        if b.state_count > p.state_max || b.transitions.len() > p.transition_max {
            continue;
        }
        // An unsatisfiable formula yields an automaton with empty language,
        // which satisfies every specification vacuously — no negative
        // counterpart could ever be drawn for it.
        if is_empty(&b).is_none() {
            continue;
        }
        return Some((f, b));
    }
    None
}

/// Printed length excluding whitespace; this is the corpus length metric.
pub fn formula_len(f: &LtlFormula) -> usize {
    f.to_string().chars().filter(|c| !c.is_whitespace()).count()
}

/// Balanced labeled corpus: `count / 2` positives built as
/// `B = translate(formula)` (the automaton accepts exactly the formula's
/// language, so the pair satisfies), each matched with a negative that pairs
/// the same kind of automaton with an independently drawn formula the oracle
/// confirms is violated.
pub fn generate_corpus(profile: Profile, count: usize, seed: u64) -> Result<Dataset, DatasetError> {
    if count % 2 != 0 {
        return Err(DatasetError::OddCount(count));
    }
    let p = profile.params();
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let pair_seeds: Vec<u64> = (0..count / 2).map(|_| seeder.gen()).collect();
    let mut samples = Vec::with_capacity(count);
    for pair_seed in pair_seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(pair_seed);
        let (formula, automaton) =
            draw_in_envelope(&p, &mut rng).ok_or(DatasetError::BudgetExhausted {
                stage: "positive pair",
                seed: pair_seed,
            })?;
        // The pair holds by construction (the automaton is the formula's
        // translation); the oracle can only confirm where it is feasible, so
        // a resource error (state cap on the largest products) is not a
        // violation.
        debug_assert!(check(&automaton, &formula).map_or(true, |v| v.holds));
        let negative = draw_negative(&p, &automaton, &mut rng).ok_or(
            DatasetError::BudgetExhausted {
                stage: "negative formula",
                seed: pair_seed,
            },
        )?;
        samples.push(Sample {
            automaton: automaton.clone(),
            formula,
            label: 1,
            seed: pair_seed,
            perturbation: None,
        });
        samples.push(Sample {
            automaton,
            formula: negative,
            label: 0,
            seed: pair_seed,
            perturbation: None,
        });
    }
    Ok(Dataset { samples })
}

/// Rejection-sample a formula the oracle confirms `b` violates.
fn draw_negative(
    p: &ProfileParams,
    b: &BuchiAutomaton,
    rng: &mut ChaCha8Rng,
) -> Option<LtlFormula> {
    for _ in 0..ATTEMPTS_PER_SAMPLE {
        let size = rng.gen_range(p.tree_size_min..=p.tree_size_max);
        let f = random_ltl(&GenConfig::new(size, p.atom_count, rng.gen()));
        if formula_len(&f) > p.len_max {
            continue;
        }
        match check(b, &f) {
            Ok(v) if !v.holds => return Some(f),
            _ => continue,
        }
    }
    None
}

/// Stratified shuffled split: each class is shuffled and cut at `ratio`
/// independently, so both halves stay balanced within one sample, then each
/// half is shuffled again so classes interleave.
pub fn split(ds: &Dataset, ratio: f64, seed: u64) -> (Dataset, Dataset) {
    let (train, val) = split_by_label(&ds.samples, |s| s.label, ratio, seed);
    (Dataset { samples: train }, Dataset { samples: val })
}

/// Same split over already-encoded records.
pub fn split_records(
    records: &[SampleRecord],
    ratio: f64,
    seed: u64,
) -> (Vec<SampleRecord>, Vec<SampleRecord>) {
    split_by_label(records, |r| r.label, ratio, seed)
}

fn split_by_label<T: Clone>(
    items: &[T],
    label: impl Fn(&T) -> u8,
    ratio: f64,
    seed: u64,
) -> (Vec<T>, Vec<T>) {
    assert!((0.0..=1.0).contains(&ratio), "ratio must be in [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut val = Vec::new();
    for class_label in [1u8, 0u8] {
        let mut class: Vec<&T> = items.iter().filter(|x| label(x) == class_label).collect();
        class.shuffle(&mut rng);
        let cut = (class.len() as f64 * ratio).round() as usize;
        train.extend(class[..cut].iter().map(|&x| x.clone()));
        val.extend(class[cut..].iter().map(|&x| x.clone()));
    }
    train.shuffle(&mut rng);
    val.shuffle(&mut rng);
    (train, val)
}

/// `count` groups of one satisfied formula plus fifty oracle-confirmed
/// violated ones, all against the same automaton.
pub fn build_ranking_groups(count: usize, seed: u64) -> Result<Vec<RankingGroup>, DatasetError> {
    let p = Profile::ShortLike.params();
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let group_seeds: Vec<u64> = (0..count).map(|_| seeder.gen()).collect();
    let mut groups = Vec::with_capacity(count);
    for group_seed in group_seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(group_seed);
        let (positive, automaton) =
            draw_in_envelope(&p, &mut rng).ok_or(DatasetError::BudgetExhausted {
                stage: "ranking positive",
                seed: group_seed,
            })?;
        let mut negatives = Vec::with_capacity(RANKING_NEGATIVES);
        while negatives.len() < RANKING_NEGATIVES {
            let f = draw_negative(&p, &automaton, &mut rng).ok_or(
                DatasetError::BudgetExhausted {
                    stage: "ranking negative",
                    seed: group_seed,
                },
            )?;
            negatives.push(f);
        }
        groups.push(RankingGroup {
            automaton,
            positive,
            negatives,
            seed: group_seed,
        });
    }
    Ok(groups)
}

/// The union graph a sample encodes to, with its perturbation applied.
pub fn union_graph_of(s: &Sample) -> Result<UnionGraph, crate::graph::GraphError> {
    let g = build_system_graph(&s.automaton);
    let t = build_spec_tree(&to_nnf(&s.formula))?;
    let mut c = build_union(&g, &t);
    if let Some((p, seed)) = s.perturbation {
        c = perturb_edges(&c, p, seed);
    }
    Ok(c)
}

/// Rebuild the automaton a perturbed union graph describes: a transition
/// that lost an incidence edge is treated as deleted.
pub fn reconstruct_automaton(original: &BuchiAutomaton, perturbed: &UnionGraph) -> BuchiAutomaton {
    let mut degree = vec![0usize; perturbed.node_count()];
    for &(u, v, kind) in &perturbed.edges {
        if kind == crate::graph::EdgeKind::Incidence {
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    let mut transitions = Vec::new();
    for (id, payload) in perturbed.nodes.iter().enumerate() {
        if let NodePayload::Transition { cube, src, dst } = payload {
            let expected = if src == dst { 1 } else { 2 };
            if degree[id] == expected {
                transitions.push(Transition {
                    src: *src,
                    label: cube.clone(),
                    dst: *dst,
                });
            }
        }
    }
    BuchiAutomaton {
        state_count: original.state_count,
        initial: original.initial,
        accepting: original.accepting.clone(),
        transitions,
        atom_universe: original.atom_universe.clone(),
    }
}

/// Transition indices whose node lost an incidence edge in the perturbed
/// union graph.
pub fn dropped_transitions(original: &BuchiAutomaton, perturbed: &UnionGraph) -> Vec<usize> {
    let mut degree = vec![0usize; perturbed.node_count()];
    for &(u, v, kind) in &perturbed.edges {
        if kind == crate::graph::EdgeKind::Incidence {
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    original
        .transitions
        .iter()
        .enumerate()
        .filter(|(i, t)| {
            let expected = if t.src == t.dst { 1 } else { 2 };
            degree[original.state_count + i] < expected
        })
        .map(|(i, _)| i)
        .collect()
}

/// Copy of `b` that only accepts runs passing through transition `t_idx`:
/// two copies of the state space, the marked transition crossing from the
/// not-yet-used copy to the used copy, acceptance confined to the latter.
fn automaton_through(b: &BuchiAutomaton, t_idx: usize) -> BuchiAutomaton {
    let n = b.state_count;
    let mut transitions = Vec::with_capacity(b.transitions.len() * 2);
    for (i, t) in b.transitions.iter().enumerate() {
        let first_copy_dst = if i == t_idx { t.dst + n } else { t.dst };
        transitions.push(Transition {
            src: t.src,
            label: t.label.clone(),
            dst: first_copy_dst,
        });
        transitions.push(Transition {
            src: t.src + n,
            label: t.label.clone(),
            dst: t.dst + n,
        });
    }
    BuchiAutomaton {
        state_count: 2 * n,
        initial: b.initial,
        accepting: b.accepting.iter().map(|&q| q + n).collect(),
        transitions,
        atom_universe: b.atom_universe.clone(),
    }
}

/// Confirm that deleting the dropped transitions lost part of the language:
/// returns a word the original automaton accepts (through a dropped
/// transition) that the reduced automaton rejects. Positives are built as
/// `B = translate(formula)`, so such a word is a model of the formula that
/// the perturbed automaton misses — the pair is no longer a positive one.
/// Dropping transitions cannot flip `check` itself (the language only
/// shrinks), so this lost-word test is the oracle for perturbed labels.
pub fn verify_perturbed_negative(
    original: &BuchiAutomaton,
    reduced: &BuchiAutomaton,
    dropped: &[usize],
) -> Option<crate::ltl::Lasso> {
    for &t_idx in dropped {
        if let Some(witness) = is_empty(&automaton_through(original, t_idx)) {
            if accepts_lasso(reduced, &witness) == Ok(false) {
                return Some(witness);
            }
        }
    }
    None
}

/// Pair every positive with a copy whose union graph loses a `p`-fraction of
/// incidence edges; the copy is labeled 0, confirmed by exhibiting a word of
/// the formula's language that the reduced automaton rejects
/// (`verify_perturbed_negative`). Perturbations that only hit redundant
/// transitions retry with fresh seeds; pairs where no retry verifies are
/// skipped entirely so every emitted label stays confirmed.
pub fn build_perturbation_set(ds: &Dataset, p: f64, seed: u64) -> Result<Dataset, DatasetError> {
    if ds.samples.iter().any(|s| s.label != 1) {
        return Err(DatasetError::NotAllPositive);
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(DatasetError::BadFraction(p));
    }
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    for s in &ds.samples {
        let mut chosen = None;
        for _ in 0..ATTEMPTS_PER_SAMPLE {
            let perturb_seed: u64 = seeder.gen();
            let mut candidate = s.clone();
            candidate.perturbation = Some((p, perturb_seed));
            candidate.label = 0;
            let Ok(c) = union_graph_of(&candidate) else {
                break;
            };
            let dropped = dropped_transitions(&s.automaton, &c);
            let reduced = reconstruct_automaton(&s.automaton, &c);
            if verify_perturbed_negative(&s.automaton, &reduced, &dropped).is_some() {
                chosen = Some(candidate);
                break;
            }
        }
        if let Some(perturbed) = chosen {
            samples.push(s.clone());
            samples.push(perturbed);
        }
    }
    Ok(Dataset { samples })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeStats {
    pub min: usize,
    pub max: usize,
    /// Eight equal-width buckets over `[min, max]`; sums to the sample count.
    pub histogram: Vec<usize>,
}

fn range_stats(values: &[usize]) -> RangeStats {
    let Some(&min) = values.iter().min() else {
        return RangeStats::default();
    };
    let max = *values.iter().max().expect("non-empty");
    let buckets = 8usize;
    let width = ((max - min) / buckets + 1).max(1);
    let mut histogram = vec![0usize; buckets];
    for &v in values {
        let b = ((v - min) / width).min(buckets - 1);
        histogram[b] += 1;
    }
    RangeStats {
        min,
        max,
        histogram,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub samples: usize,
    pub positives: usize,
    pub negatives: usize,
    pub formula_len: RangeStats,
    pub states: RangeStats,
    pub transitions: RangeStats,
}

pub fn corpus_stats(ds: &Dataset) -> CorpusStats {
    let lens: Vec<usize> = ds.samples.iter().map(|s| formula_len(&s.formula)).collect();
    let states: Vec<usize> = ds.samples.iter().map(|s| s.automaton.state_count).collect();
    let transitions: Vec<usize> = ds
        .samples
        .iter()
        .map(|s| s.automaton.transitions.len())
        .collect();
    CorpusStats {
        samples: ds.len(),
        positives: ds.positives(),
        negatives: ds.negatives(),
        formula_len: range_stats(&lens),
        states: range_stats(&states),
        transitions: range_stats(&transitions),
    }
}

/// Encode one sample into the line-record form: union graph (perturbed if
/// the sample says so), per-node features, label, and provenance including
/// the canonical automaton text and its hash.
pub fn encode_sample(
    s: &Sample,
    scheme: EncodingScheme,
    directed: bool,
    dict: &EncodingDictionary,
) -> Result<SampleRecord, crate::graph::GraphError> {
    let graph = union_graph_of(s)?;
    let features = encode_features(&graph, scheme, directed, dict)
        .expect("graph symbols come from the shared alphabet");
    let automaton_text = write_automaton(&s.automaton);
    let mut hasher = Sha256::new();
    hasher.update(automaton_text.as_bytes());
    let automaton_hash = format!("{:x}", hasher.finalize());
    Ok(SampleRecord {
        graph,
        features,
        label: s.label,
        meta: SampleMeta {
            seed: s.seed,
            formula: s.formula.to_string(),
            automaton_hash,
            automaton: Some(automaton_text),
        },
    })
}

/// Encode one ranking group as candidate records: the positive first
/// (label 1), then the fifty negatives in order.
pub fn encode_ranking_group(
    group: &RankingGroup,
    scheme: EncodingScheme,
    directed: bool,
    dict: &EncodingDictionary,
) -> Result<Vec<SampleRecord>, crate::graph::GraphError> {
    let mut records = Vec::with_capacity(1 + group.negatives.len());
    let mut push = |formula: &LtlFormula, label: u8| -> Result<(), crate::graph::GraphError> {
        let s = Sample {
            automaton: group.automaton.clone(),
            formula: formula.clone(),
            label,
            seed: group.seed,
            perturbation: None,
        };
        records.push(encode_sample(&s, scheme, directed, dict)?);
        Ok(())
    };
    push(&group.positive, 1)?;
    for negative in &group.negatives {
        push(negative, 0)?;
    }
    Ok(records)
}

pub fn encode_dataset(
    ds: &Dataset,
    scheme: EncodingScheme,
    directed: bool,
    dict: &EncodingDictionary,
) -> Result<Vec<SampleRecord>, crate::graph::GraphError> {
    ds.samples
        .iter()
        .map(|s| encode_sample(s, scheme, directed, dict))
        .collect()
}

/// Recover the oracle-side view (automaton + formula) from a stored record.
pub fn sample_from_record(rec: &SampleRecord) -> Result<Sample, DatasetError> {
    let formula = parse_ltl(&rec.meta.formula)
        .map_err(|e| DatasetError::BadStoredFormula(e.to_string()))?;
    let text = rec
        .meta
        .automaton
        .as_ref()
        .ok_or(DatasetError::MissingAutomaton)?;
    let automaton =
        read_automaton(text).map_err(|e| DatasetError::BadStoredAutomaton(e.to_string()))?;
    Ok(Sample {
        automaton,
        formula,
        label: rec.label,
        seed: rec.meta.seed,
        perturbation: None,
    })
}

/// Sidecar manifest written next to every dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub profile: String,
    pub seed: u64,
    pub count: usize,
    pub scheme: String,
    pub directed: bool,
    pub stats: CorpusStats,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

pub fn save_records(path: &Path, records: &[SampleRecord]) -> Result<(), DatasetError> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for rec in records {
        writeln!(out, "{}", write_sample(rec))?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_records(path: &Path) -> Result<Vec<SampleRecord>, DatasetError> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(read_sample(&line).map_err(|e| DatasetError::Record {
            line: i + 1,
            source: e,
        })?);
    }
    Ok(records)
}

/// Manifest path convention: `<dataset>.manifest.json`.
pub fn manifest_path(dataset_path: &Path) -> std::path::PathBuf {
    let mut name = dataset_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(".manifest.json");
    dataset_path.with_file_name(name)
}

pub fn save_manifest(dataset_path: &Path, manifest: &DatasetManifest) -> Result<(), DatasetError> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(manifest_path(dataset_path), text + "\n")?;
    Ok(())
}

pub fn load_manifest(dataset_path: &Path) -> Result<DatasetManifest, DatasetError> {
    let text = fs::read_to_string(manifest_path(dataset_path))?;
    serde_json::from_str(&text).map_err(|e| DatasetError::BadStoredFormula(e.to_string()))
}
