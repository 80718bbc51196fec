//! Seeded multi-trial campaigns written as JSONL, one line per trial in trial
//! order. Re-running with the same config resumes after the last complete
//! line; a different config against the same output is rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use reprep::nogo::{self, EmbProvider};
use reprep::randgame::{self, RandomGameParams};
use reprep::{rng, value_exact, Caps, Game, Rational, SchemeSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::commands::{read_json, write_text, CliError, CliResult};

const CHUNK: usize = 32;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub kind: CampaignKind,
    pub master_seed: u64,
    pub trials: usize,
    pub params: serde_json::Value,
    #[serde(default)]
    pub caps: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CampaignKind {
    /// Sample a game per trial and run every property check.
    RandomGame,
    /// One matching union per trial against a pair set.
    Concentration,
    /// Sample a game per trial and run the dichotomy experiment on it.
    NogoRandom,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConcentrationParams {
    t: usize,
    d: usize,
    rho: Rational,
    #[serde(default)]
    full: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct NogoParams {
    game: RandomGameParams,
    scheme: SchemeSpec,
    k: usize,
    s: usize,
    eps: Rational,
    #[serde(default = "diagonal")]
    provider: EmbProvider,
}

fn diagonal() -> EmbProvider {
    EmbProvider::Diagonal
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Line {
    config_hash: String,
    trial: usize,
    record: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignSummary {
    pub kind: CampaignKind,
    pub trials: usize,
    pub errors: usize,
    /// Fraction of trials with each boolean record field set.
    pub pass_rates: BTreeMap<String, Rational>,
    /// Trials per value of each string record field.
    pub counts: BTreeMap<String, BTreeMap<String, usize>>,
    pub wall_clock_secs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignRecord {
    pub config_hash: String,
    pub out: PathBuf,
    pub summary_path: PathBuf,
    pub resumed_from: usize,
    pub summary: CampaignSummary,
}

pub fn config_hash(config: &CampaignConfig) -> String {
    // serde_json maps are key-sorted, so this is canonical.
    let canonical = serde_json::to_string(config).expect("serializable");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(s, "{b:02x}");
    }
    s
}

pub fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".summary.json");
    out.with_file_name(name)
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::ConfigInvalid(msg.into())
}

/// Complete lines already in `out`, after checking each belongs to this
/// campaign. A trailing partial line is cut off.
fn resume(out: &Path, hash: &str) -> CliResult<Vec<Line>> {
    let text = match std::fs::read_to_string(out) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(CliError::Io(out.display().to_string(), e)),
    };
    let mut lines = Vec::new();
    let mut good_len = 0;
    for raw in text.split_inclusive('\n') {
        if !raw.ends_with('\n') {
            break;
        }
        let Ok(line) = serde_json::from_str::<Line>(raw) else {
            break;
        };
        if line.config_hash != hash {
            return Err(invalid(format!(
                "{} was written by config {}, not {hash}",
                out.display(),
                line.config_hash
            )));
        }
        if line.trial != lines.len() {
            return Err(invalid(format!("{} has trial {} at line {}", out.display(), line.trial, lines.len())));
        }
        good_len += raw.len();
        lines.push(line);
    }
    if good_len < text.len() {
        let f = OpenOptions::new()
            .write(true)
            .open(out)
            .map_err(|e| CliError::Io(out.display().to_string(), e))?;
        f.set_len(good_len as u64).map_err(|e| CliError::Io(out.display().to_string(), e))?;
    }
    Ok(lines)
}

enum Runner {
    Random(RandomGameParams),
    Concentration { p: ConcentrationParams, z: Vec<(usize, usize)> },
    Nogo(NogoParams),
}

impl Runner {
    fn new(config: &CampaignConfig) -> CliResult<Self> {
        let parse_err = |e: serde_json::Error| invalid(format!("params: {e}"));
        Ok(match config.kind {
            CampaignKind::RandomGame => Runner::Random(serde_json::from_value(config.params.clone()).map_err(parse_err)?),
            CampaignKind::Concentration => {
                let p: ConcentrationParams = serde_json::from_value(config.params.clone()).map_err(parse_err)?;
                let z = if p.full {
                    (0..p.t).flat_map(|x| (0..p.t).map(move |y| (x, y))).collect()
                } else {
                    randgame::quarter_block(p.t)
                };
                Runner::Concentration { p, z }
            }
            CampaignKind::NogoRandom => Runner::Nogo(serde_json::from_value(config.params.clone()).map_err(parse_err)?),
        })
    }

    fn trial(&self, master: u64, trial: usize, caps: &Caps) -> reprep::Result<serde_json::Value> {
        match self {
            Runner::Random(p) => Ok(serde_json::to_value(randgame::random_game_trial(p, master, trial, caps)?).expect("serializable")),
            Runner::Concentration { p, z } => {
                let seed = rng::derive_seed(master, &[trial as u64]);
                let r = randgame::concentration_experiment(p.t, p.d, z, p.rho, 1, seed)?;
                let hits = r.records[0].hits;
                Ok(serde_json::json!({
                    "seed": seed,
                    "hits": hits,
                    "mu": r.mu,
                    "within": !r.records[0].violated,
                }))
            }
            Runner::Nogo(p) => {
                let seed = rng::derive_seed(master, &[trial as u64]);
                let gp = p.game.with_seed(seed);
                let g: Game = randgame::sample_random_game(&gp)?;
                let gamma = value_exact(&g, caps)?.value;
                let v = nogo::nogo_experiment(&g, &p.scheme, p.k, p.s, gamma, p.eps, &p.provider, caps)?;
                Ok(serde_json::json!({
                    "seed": seed,
                    "value": gamma,
                    "gate": v.gate.pass,
                    "branch": v.branch,
                    "robustness_fraction": v.robustness_fraction,
                    "anomalies": v.anomalies.len(),
                }))
            }
        }
    }
}

fn error_record(e: &reprep::Error) -> serde_json::Value {
    serde_json::json!({ "error": e.code(), "message": e.to_string() })
}

fn summarize(kind: CampaignKind, lines: &[Line], wall_clock_secs: f64) -> CampaignSummary {
    let mut errors = 0;
    let mut trues: BTreeMap<String, usize> = BTreeMap::new();
    let mut counts: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for line in lines {
        let Some(obj) = line.record.as_object() else {
            continue;
        };
        if obj.contains_key("error") {
            errors += 1;
            continue;
        }
        for (k, v) in obj {
            match v {
                serde_json::Value::Bool(b) => *trues.entry(k.clone()).or_default() += usize::from(*b),
                serde_json::Value::String(s) => {
                    *counts.entry(k.clone()).or_default().entry(s.clone()).or_default() += 1;
                }
                _ => {}
            }
        }
    }
    let n = lines.len().max(1);
    CampaignSummary {
        kind,
        trials: lines.len(),
        errors,
        pass_rates: trues.into_iter().map(|(k, c)| (k, Rational::frac(c, n))).collect(),
        counts,
        wall_clock_secs,
    }
}

pub fn run_campaign(config_path: &Path, out: &Path, cli_caps: &Caps) -> CliResult<CampaignRecord> {
    let start = Instant::now();
    let config: CampaignConfig = read_json(config_path).map_err(|e| match e {
        CliError::Parse(p, e) => invalid(format!("{p}: {e}")),
        e => e,
    })?;
    let mut caps = *cli_caps;
    for (key, &v) in &config.caps {
        caps.set(key, v).map_err(|e| invalid(e.to_string()))?;
    }
    let runner = Runner::new(&config)?;
    let hash = config_hash(&config);

    let mut lines = resume(out, &hash)?;
    if lines.len() > config.trials {
        return Err(invalid(format!(
            "{} already holds {} trials, config asks for {}",
            out.display(),
            lines.len(),
            config.trials
        )));
    }
    let resumed_from = lines.len();
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(out)
        .map_err(|e| CliError::Io(out.display().to_string(), e))?;

    let mut next = resumed_from;
    while next < config.trials {
        let end = (next + CHUNK).min(config.trials);
        let chunk: Vec<Line> = (next..end)
            .into_par_iter()
            .map(|trial| Line {
                config_hash: hash.clone(),
                trial,
                record: runner
                    .trial(config.master_seed, trial, &caps)
                    .unwrap_or_else(|e| error_record(&e)),
            })
            .collect();
        let mut buf = String::new();
        for line in &chunk {
            buf.push_str(&serde_json::to_string(line).expect("serializable"));
            buf.push('\n');
        }
        file.write_all(buf.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| CliError::Io(out.display().to_string(), e))?;
        lines.extend(chunk);
        next = end;
    }

    let summary = summarize(config.kind, &lines, start.elapsed().as_secs_f64());
    let summary_path = summary_path(out);
    let text = serde_json::to_string_pretty(&serde_json::json!({ "config_hash": hash, "summary": summary }))
        .expect("serializable");
    write_text(&summary_path, &(text + "\n"))?;
    Ok(CampaignRecord {
        config_hash: hash,
        out: out.to_path_buf(),
        summary_path,
        resumed_from,
        summary,
    })
}
