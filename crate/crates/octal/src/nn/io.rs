//! Checkpoint and history files: plain structured text, floats at 9
//! significant digits, with the encoding configuration embedded so a
//! checkpoint is self-contained.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::graph::{make_dictionary, EncodingDictionary, EncodingScheme};

use super::model::{Descriptor, ModelParams, Variant};
use super::train::{EpochRecord, History, Hyperparams};

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub hyperparams: Hyperparams,
    pub dict_seed: u64,
    pub dict_sigma: f64,
    pub scheme: EncodingScheme,
    pub directed: bool,
}

impl Checkpoint {
    /// The dictionary this model was trained with; regenerated from its
    /// stored seed and sigma (generation is deterministic).
    pub fn dictionary(&self) -> EncodingDictionary {
        make_dictionary(self.dict_seed, self.dict_sigma)
    }
}

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn fmt_f(v: f64) -> String {
    format!("{v:.8e}")
}

fn scheme_name(s: EncodingScheme) -> &'static str {
    s.name()
}

fn parse_scheme(s: &str) -> Option<EncodingScheme> {
    s.parse().ok()
}

fn push_tensor2(out: &mut String, name: &str, a: &Array2<f64>) {
    writeln!(out, "tensor {name} {} {}", a.nrows(), a.ncols()).expect("string write");
    for row in a.rows() {
        let line: Vec<String> = row.iter().map(|&v| fmt_f(v)).collect();
        writeln!(out, "{}", line.join(" ")).expect("string write");
    }
}

fn push_tensor1(out: &mut String, name: &str, a: &Array1<f64>) {
    writeln!(out, "tensor {name} 1 {}", a.len()).expect("string write");
    let line: Vec<String> = a.iter().map(|&v| fmt_f(v)).collect();
    writeln!(out, "{}", line.join(" ")).expect("string write");
}

pub fn checkpoint_to_string(ck: &Checkpoint) -> String {
    let mut out = String::new();
    let p = &ck.params;
    let hp = &ck.hyperparams;
    writeln!(out, "octal-checkpoint v1").expect("string write");
    writeln!(out, "variant {}", p.desc.variant.name()).expect("string write");
    writeln!(out, "input_width {}", p.desc.input_width).expect("string write");
    writeln!(out, "hidden {}", p.desc.hidden).expect("string write");
    writeln!(out, "epsilon {}", fmt_f(p.epsilon)).expect("string write");
    writeln!(
        out,
        "hyperparams {} {} {} {} {} {} {} {} {} {}",
        fmt_f(hp.learning_rate),
        fmt_f(hp.dropout),
        hp.patience,
        hp.max_epochs,
        hp.batch_size,
        hp.seed,
        fmt_f(hp.beta1),
        fmt_f(hp.beta2),
        fmt_f(hp.adam_eps),
        fmt_f(hp.bn_momentum),
    )
    .expect("string write");
    writeln!(
        out,
        "encoding {} {} {} {}",
        scheme_name(ck.scheme),
        if ck.directed { "directed" } else { "undirected" },
        ck.dict_seed,
        fmt_f(ck.dict_sigma),
    )
    .expect("string write");
    for (i, c) in p.convs.iter().enumerate() {
        push_tensor2(&mut out, &format!("conv{i}.lin1.w"), &c.lin1.w);
        push_tensor1(&mut out, &format!("conv{i}.lin1.b"), &c.lin1.b);
        push_tensor2(&mut out, &format!("conv{i}.lin2.w"), &c.lin2.w);
        push_tensor1(&mut out, &format!("conv{i}.lin2.b"), &c.lin2.b);
        push_tensor1(&mut out, &format!("conv{i}.bn.gamma"), &c.bn.gamma);
        push_tensor1(&mut out, &format!("conv{i}.bn.beta"), &c.bn.beta);
        push_tensor1(&mut out, &format!("conv{i}.bn.running_mean"), &c.bn.running_mean);
        push_tensor1(&mut out, &format!("conv{i}.bn.running_var"), &c.bn.running_var);
    }
    push_tensor2(&mut out, "head.lin1.w", &p.head.lin1.w);
    push_tensor1(&mut out, "head.lin1.b", &p.head.lin1.b);
    push_tensor2(&mut out, "head.lin2.w", &p.head.lin2.w);
    push_tensor1(&mut out, "head.lin2.b", &p.head.lin2.b);
    out
}

pub fn save_checkpoint(path: &Path, ck: &Checkpoint) -> Result<(), CheckpointError> {
    fs::write(path, checkpoint_to_string(ck))?;
    Ok(())
}

struct Reader<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, CheckpointError> {
        Err(CheckpointError::Malformed {
            line: self.pos,
            message: message.into(),
        })
    }

    fn next(&mut self) -> Result<&'a str, CheckpointError> {
        let line = self.lines.get(self.pos).copied();
        self.pos += 1;
        line.ok_or(CheckpointError::Malformed {
            line: self.pos,
            message: "unexpected end of file".to_string(),
        })
    }

    fn field<T: FromStr>(&self, token: Option<&str>, what: &str) -> Result<T, CheckpointError> {
        token
            .and_then(|t| t.parse().ok())
            .ok_or(CheckpointError::Malformed {
                line: self.pos,
                message: format!("bad {what}"),
            })
    }

    fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>, CheckpointError> {
        let line = self.next()?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return self.err(format!("expected {key:?} record, got {line:?}"));
        }
        Ok(parts.collect())
    }

    fn tensor(&mut self, name: &str) -> Result<Array2<f64>, CheckpointError> {
        let header = self.keyed("tensor")?;
        if header.first() != Some(&name) {
            return self.err(format!("expected tensor {name}, got {header:?}"));
        }
        let rows: usize = self.field(header.get(1).copied(), "tensor rows")?;
        let cols: usize = self.field(header.get(2).copied(), "tensor cols")?;
        let mut a = Array2::zeros((rows, cols));
        for r in 0..rows {
            let line = self.next()?;
            let values: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CheckpointError::Malformed {
                    line: self.pos,
                    message: format!("bad float: {e}"),
                })?;
            if values.len() != cols {
                return self.err(format!("row has {} values, expected {cols}", values.len()));
            }
            for (c, v) in values.into_iter().enumerate() {
                a[(r, c)] = v;
            }
        }
        Ok(a)
    }

    fn vector(&mut self, name: &str, len: usize) -> Result<Array1<f64>, CheckpointError> {
        let a = self.tensor(name)?;
        if a.nrows() != 1 || a.ncols() != len {
            return self.err(format!("{name}: expected 1x{len}, got {:?}", a.dim()));
        }
        Ok(a.row(0).to_owned())
    }
}

pub fn checkpoint_from_string(text: &str) -> Result<Checkpoint, CheckpointError> {
    let mut r = Reader {
        lines: text.lines().collect(),
        pos: 0,
    };
    let magic = r.next()?;
    if magic != "octal-checkpoint v1" {
        return r.err("not a checkpoint file");
    }
    let variant_line = r.keyed("variant")?;
    let variant: Variant = r.field(variant_line.first().copied(), "variant")?;
    let width_line = r.keyed("input_width")?;
    let input_width: usize = r.field(width_line.first().copied(), "input_width")?;
    let hidden_line = r.keyed("hidden")?;
    let hidden: usize = r.field(hidden_line.first().copied(), "hidden")?;
    let eps_line = r.keyed("epsilon")?;
    let epsilon: f64 = r.field(eps_line.first().copied(), "epsilon")?;
    let hp_fields = r.keyed("hyperparams")?;
    if hp_fields.len() != 10 {
        return r.err("hyperparams record needs 10 fields");
    }
    let hyperparams = Hyperparams {
        learning_rate: r.field(Some(hp_fields[0]), "learning_rate")?,
        dropout: r.field(Some(hp_fields[1]), "dropout")?,
        patience: r.field(Some(hp_fields[2]), "patience")?,
        max_epochs: r.field(Some(hp_fields[3]), "max_epochs")?,
        batch_size: r.field(Some(hp_fields[4]), "batch_size")?,
        seed: r.field(Some(hp_fields[5]), "seed")?,
        beta1: r.field(Some(hp_fields[6]), "beta1")?,
        beta2: r.field(Some(hp_fields[7]), "beta2")?,
        adam_eps: r.field(Some(hp_fields[8]), "adam_eps")?,
        bn_momentum: r.field(Some(hp_fields[9]), "bn_momentum")?,
    };
    let enc = r.keyed("encoding")?;
    if enc.len() != 4 {
        return r.err("encoding record needs 4 fields");
    }
    let scheme = parse_scheme(enc[0]).ok_or(CheckpointError::Malformed {
        line: r.pos,
        message: format!("bad scheme {:?}", enc[0]),
    })?;
    let directed = match enc[1] {
        "directed" => true,
        "undirected" => false,
        other => {
            return r.err(format!("bad direction flag {other:?}"));
        }
    };
    let dict_seed: u64 = r.field(Some(enc[2]), "dict seed")?;
    let dict_sigma: f64 = r.field(Some(enc[3]), "dict sigma")?;
    let desc = Descriptor {
        variant,
        input_width,
        hidden,
    };
    let mut params = ModelParams::init(desc, 0);
    params.epsilon = epsilon;
    for i in 0..params.convs.len() {
        let lin1_in = params.convs[i].lin1.w.nrows();
        let c = &mut params.convs[i];
        let _ = lin1_in;
        c.lin1.w = r.tensor(&format!("conv{i}.lin1.w"))?;
        c.lin1.b = r.vector(&format!("conv{i}.lin1.b"), c.lin1.w.ncols())?;
        c.lin2.w = r.tensor(&format!("conv{i}.lin2.w"))?;
        c.lin2.b = r.vector(&format!("conv{i}.lin2.b"), c.lin2.w.ncols())?;
        let width = c.bn.gamma.len();
        c.bn.gamma = r.vector(&format!("conv{i}.bn.gamma"), width)?;
        c.bn.beta = r.vector(&format!("conv{i}.bn.beta"), width)?;
        c.bn.running_mean = r.vector(&format!("conv{i}.bn.running_mean"), width)?;
        c.bn.running_var = r.vector(&format!("conv{i}.bn.running_var"), width)?;
    }
    params.head.lin1.w = r.tensor("head.lin1.w")?;
    params.head.lin1.b = r.vector("head.lin1.b", params.head.lin1.w.ncols())?;
    params.head.lin2.w = r.tensor("head.lin2.w")?;
    params.head.lin2.b = r.vector("head.lin2.b", params.head.lin2.w.ncols())?;
    if !params.all_finite() {
        return r.err("non-finite parameter values");
    }
    Ok(Checkpoint {
        params,
        hyperparams,
        dict_seed,
        dict_sigma,
        scheme,
        directed,
    })
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, CheckpointError> {
    checkpoint_from_string(&fs::read_to_string(path)?)
}

pub fn history_to_string(history: &History) -> String {
    let mut out = String::from("octal-history v1\n");
    for rec in history {
        writeln!(
            out,
            "{} {} {}",
            rec.epoch,
            fmt_f(rec.train_loss),
            fmt_f(rec.val_accuracy)
        )
        .expect("string write");
    }
    out
}

pub fn save_history(path: &Path, history: &History) -> Result<(), CheckpointError> {
    fs::write(path, history_to_string(history))?;
    Ok(())
}

pub fn load_history(path: &Path) -> Result<History, CheckpointError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "octal-history v1")) => {}
        _ => {
            return Err(CheckpointError::Malformed {
                line: 1,
                message: "not a history file".to_string(),
            })
        }
    }
    let mut history = Vec::new();
    for (i, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let parse = |t: &str| -> Result<f64, CheckpointError> {
            t.parse().map_err(|e| CheckpointError::Malformed {
                line: i + 1,
                message: format!("bad float: {e}"),
            })
        };
        let [epoch, loss, acc] = parts[..] else {
            return Err(CheckpointError::Malformed {
                line: i + 1,
                message: "expected 3 fields".to_string(),
            });
        };
        history.push(EpochRecord {
            epoch: epoch.parse().map_err(|_| CheckpointError::Malformed {
                line: i + 1,
                message: "bad epoch".to_string(),
            })?,
            train_loss: parse(loss)?,
            val_accuracy: parse(acc)?,
        });
    }
    Ok(history)
}
