use std::fmt::Write as _;
use std::path::Path;

use reprep::fortify::{fortification_check, mixing_check, CheckMode, FortifyMode, Verdict};
use reprep::nogo::{self, Branch, EmbProvider};
use reprep::powering::{self, BinaryCode, ComposedGraph, ConstraintGraph, PoweredGraph, SuperLabeling};
use reprep::randgame::{self, RandomGameParams};
use reprep::repetition::{apply_scheme, blowup, uniform_marginals_check};
use reprep::{value_exact, value_local_search, Caps, Error, Game, RepeatedGame};
use serde::Serialize;

use crate::args::{Cli, Command, FixtureName, ProviderArgs, ProviderKind, ZSet};
use crate::campaign;

/// What a subcommand produced: the JSON written to `--out`, a short table for
/// the terminal, and whether the verdict passed.
pub struct Outcome {
    pub json: serde_json::Value,
    pub summary: String,
    pub pass: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}: {1}")]
    Parse(String, serde_json::Error),
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Io(..) => "Io",
            CliError::Parse(..) => "Format",
            CliError::ConfigInvalid(_) => "ConfigInvalid",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_cap_exceeded() => 3,
            CliError::Core(
                Error::NotRobustEnough { .. } | Error::NoGoodBucket { .. } | Error::ParallelEdgesExceeded { .. },
            ) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(path.display().to_string(), e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn run(cli: Cli) -> u8 {
    let result = cli.caps.resolve().map_err(CliError::from).and_then(|caps| dispatch(&cli.command, &caps));
    match result {
        Ok((outcome, out)) => {
            if let Some(path) = out {
                let text = format!("{}\n", outcome.json);
                if let Err(e) = write_text(path, &text) {
                    return report_error(&e);
                }
            }
            if cli.json {
                println!("{}", outcome.json);
            } else {
                print!("{}", outcome.summary);
            }
            u8::from(!outcome.pass)
        }
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &CliError) -> u8 {
    let line = serde_json::json!({ "error": e.code(), "message": e.to_string() });
    eprintln!("{line}");
    e.exit_code()
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::NotRefuted => "NOT_REFUTED",
    }
}

fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        let _ = writeln!(s, "{k:<width$}  {v}");
    }
    s
}

fn provider(p: &ProviderArgs) -> CliResult<EmbProvider> {
    Ok(match p.provider {
        ProviderKind::Diagonal => EmbProvider::Diagonal,
        ProviderKind::Planted => EmbProvider::Planted {
            plant_x: p.plant.clone(),
            plant_y: p.plant.clone(),
        },
        ProviderKind::File => {
            let path = p
                .emb
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("--provider file needs --emb".into()))?;
            let m: nogo::EmbeddingMap = read_json(path)?;
            EmbProvider::Explicit {
                f_x: m.f_x,
                f_y: m.f_y,
                i: m.i,
            }
        }
    })
}

type Dispatched<'a> = (Outcome, Option<&'a Path>);

fn dispatch<'a>(cmd: &'a Command, caps: &Caps) -> CliResult<Dispatched<'a>> {
    match cmd {
        Command::Fixture { name, out } => {
            let g = match name {
                FixtureName::Chsh => reprep::fixtures::chsh(),
                FixtureName::Plant8 => reprep::fixtures::plant8(),
            };
            let rows = [
                ("vertices", format!("{} x {}", g.num_x(), g.num_y())),
                ("edges", g.size().to_string()),
                ("alphabet", g.alphabet_size().to_string()),
            ];
            Ok((
                Outcome {
                    json: to_json(&g),
                    summary: table(&rows),
                    pass: true,
                },
                out.as_deref(),
            ))
        }
        Command::GenRandom {
            t,
            d,
            alphabet,
            beta,
            eta,
            delta,
            seed,
            verify,
            report,
            out,
        } => {
            let p = RandomGameParams {
                t: *t,
                d: *d,
                alphabet_size: *alphabet,
                beta: *beta,
                eta: *eta,
                delta: *delta,
                seed: *seed,
            };
            let g = randgame::sample_random_game(&p)?;
            let mut rows = vec![
                ("vertices per side", t.to_string()),
                ("edges", g.size().to_string()),
                ("alphabet", alphabet.to_string()),
            ];
            let mut pass = true;
            if *verify {
                let r = randgame::verify_random_game(&g, &p, caps)?;
                rows.push(("regular/parallel", r.regularity.pass.to_string()));
                rows.push(("mixing", verdict_str(r.mixing.verdict).into()));
                rows.push(("value bound", r.value.pass.to_string()));
                rows.push(("fortified", verdict_str(r.fortification.verdict).into()));
                pass = r.all_pass;
                if let Some(path) = report {
                    write_text(path, &format!("{}\n", to_json(&r)))?;
                }
            }
            Ok((
                Outcome {
                    json: to_json(&g),
                    summary: table(&rows),
                    pass,
                },
                out.as_deref(),
            ))
        }
        Command::Value {
            input,
            local,
            restarts,
            seed,
            out,
        } => {
            let g: Game = read_json(input)?;
            let r = if *local {
                value_local_search(&g, *restarts, *seed)?
            } else {
                value_exact(&g, caps)?
            };
            let summary = table(&[("value", r.value.to_string()), ("method", format!("{:?}", r.method))]);
            Ok((
                Outcome {
                    json: to_json(&r),
                    summary,
                    pass: true,
                },
                out.as_deref(),
            ))
        }
        Command::Fortify {
            input,
            delta,
            eps,
            samples,
            seed,
            out,
        } => {
            let g: Game = read_json(input)?;
            let mode = match samples {
                Some(n) => FortifyMode::Sampled { samples: *n, seed: *seed },
                None => FortifyMode::Exact,
            };
            let r = fortification_check(&g, *delta, *eps, mode, caps)?;
            let mut rows = vec![
                ("verdict", verdict_str(r.verdict).to_string()),
                ("val(G)", r.val_g.to_string()),
                ("threshold", r.threshold.to_string()),
                ("rectangles", r.rectangles_checked.to_string()),
            ];
            if let Some(w) = &r.worst {
                rows.push(("worst S", format!("{:?}", w.s)));
                rows.push(("worst T", format!("{:?}", w.t)));
                rows.push(("worst value", w.value.to_string()));
            }
            Ok((
                Outcome {
                    json: to_json(&r),
                    summary: table(&rows),
                    pass: r.verdict.passed(),
                },
                out.as_deref(),
            ))
        }
        Command::MixCheck {
            input,
            delta,
            eta,
            samples,
            seed,
            out,
        } => {
            let g: Game = read_json(input)?;
            let r = mixing_check(&g, *delta, *eta, caps, (*samples, *seed))?;
            let mode = match r.mode {
                CheckMode::Exhaustive => "exhaustive".to_string(),
                CheckMode::Sampled { samples, .. } => format!("sampled ({samples})"),
            };
            let rows = [
                ("verdict", verdict_str(r.verdict).to_string()),
                ("mode", mode),
                ("degree", r.d.to_string()),
                ("worst deviation", r.worst_deviation.to_string()),
                ("worst S", format!("{:?}", r.worst_s)),
                ("worst T", format!("{:?}", r.worst_t)),
            ];
            Ok((
                Outcome {
                    json: to_json(&r),
                    summary: table(&rows),
                    pass: r.verdict.passed(),
                },
                out.as_deref(),
            ))
        }
        Command::Repeat { input, k, scheme, out } => {
            let g: Game = read_json(input)?;
            let h = apply_scheme(&g, &scheme.spec(), *k, caps)?;
            let rows = [
                ("k", k.to_string()),
                ("tuples", h.len().to_string()),
                ("blowup", blowup(&h)?.to_string()),
            ];
            Ok((
                Outcome {
                    json: to_json(&h),
                    summary: table(&rows),
                    pass: true,
                },
                out.as_deref(),
            ))
        }
        Command::Marginals { input, out } => {
            let h: RepeatedGame = read_json(input)?;
            let r = uniform_marginals_check(&h)?;
            let mut rows = vec![
                ("uniform marginals", r.pass.to_string()),
                ("z", r.z.to_string()),
                ("offenders", r.offenders.len().to_string()),
            ];
            if let Some(o) = r.offenders.first() {
                rows.push((
                    "first offender",
                    format!("coordinate {} edge {} count {}", o.coordinate, o.edge, o.count),
                ));
            }
            Ok((
                Outcome {
                    json: to_json(&r),
                    summary: table(&rows),
                    pass: r.pass,
                },
                out.as_deref(),
            ))
        }
        Command::Compose { input, reps, out } => {
            let g: Game = read_json(input)?;
            let code = BinaryCode::repetition(g.alphabet_size(), *reps)?;
            let c = powering::compose(&g, &code, caps)?;
            let rows = [
                ("gadgets", c.gadgets.len().to_string()),
                ("vertices", c.graph.num_vertices().to_string()),
                ("edges", c.graph.size().to_string()),
                ("code length", code.len().to_string()),
            ];
            Ok((
                Outcome {
                    json: to_json(&c),
                    summary: table(&rows),
                    pass: true,
                },
                out.as_deref(),
            ))
        }
        Command::Power { input, t, out } => {
            let v: serde_json::Value = read_json(input)?;
            let graph: ConstraintGraph = if v.get("graph").is_some() {
                let c: ComposedGraph =
                    serde_json::from_value(v).map_err(|e| CliError::Parse(input.display().to_string(), e))?;
                c.graph
            } else {
                serde_json::from_value(v).map_err(|e| CliError::Parse(input.display().to_string(), e))?
            };
            let p = powering::power(&graph, *t, caps)?;
            let max_cloud = p.clouds().iter().map(Vec::len).max().unwrap_or(0);
            let rows = [
                ("t", t.to_string()),
                ("vertices", p.num_vertices().to_string()),
                ("walks", p.total_walks().to_string()),
                ("largest cloud", max_cloud.to_string()),
            ];
            Ok((
                Outcome {
                    json: to_json(&p),
                    summary: table(&rows),
                    pass: true,
                },
                out.as_deref(),
            ))
        }
        Command::Project {
            input,
            t,
            lambda,
            trials,
            seed,
            out,
        } => {
            let c: ComposedGraph = read_json(input)?;
            let p: PoweredGraph = powering::power(&c.graph, *t, caps)?;
            if let Some(path) = lambda {
                let lam: SuperLabeling = read_json(path)?;
                let r = powering::project_superlabeling(&p, &c, &lam)?;
                let rows = [
                    ("gadget fraction", r.gadget_fraction.to_string()),
                    ("decoded value", r.decoded_value.to_string()),
                    ("inequality holds", r.inequality_holds.to_string()),
                ];
                return Ok((
                    Outcome {
                        json: to_json(&r),
                        summary: table(&rows),
                        pass: r.inequality_holds,
                    },
                    out.as_deref(),
                ));
            }
            let r = match trials {
                Some(n) if *n > 0 => powering::project::projection_search_sampled(&p, &c, *n, *seed, caps)?,
                _ => powering::project::projection_search_exhaustive(&p, &c, caps)?,
            };
            let acct = powering::randomness_accounting(
                c.base.size(),
                r.value_g_prime,
                c.graph.num_vertices(),
                c.graph.max_degree(),
                *t,
            );
            let rows = [
                ("method", r.method.clone()),
                ("candidates", r.candidates.to_string()),
                ("best gadget fraction", r.best_fraction.to_string()),
                ("val(G')", r.value_g_prime.to_string()),
                ("inequality holds", r.inequality_holds.to_string()),
                ("bits G'", format!("{:.3}", acct.bits_g_prime)),
                ("bits powered", format!("{:.3}", acct.bits_powered)),
                (
                    "bits standard",
                    acct.bits_standard.map_or("n/a".into(), |b| format!("{b:.3} (k = {})", acct.k.unwrap_or(0))),
                ),
            ];
            Ok((
                Outcome {
                    json: serde_json::json!({ "search": r, "accounting": acct }),
                    summary: table(&rows),
                    pass: r.inequality_holds,
                },
                out.as_deref(),
            ))
        }
        Command::NogoExtract {
            input,
            k,
            s,
            eps,
            scheme,
            provider: prov,
            out,
        } => {
            let g: Game = read_json(input)?;
            let h = apply_scheme(&g, &scheme.spec(), *k, caps)?;
            let psi = nogo::trivial_strategy(&h, *s, caps)?;
            let emb = provider(prov)?.provide(&h, *s)?;
            let t = nogo::extract_rectangle(&h, &psi, *s, &emb, *eps)?;
            let cert = t.verify_certificates(&g, &emb);
            let rows = [
                ("robustness", t.robustness_fraction.to_string()),
                ("|W'|", t.w_prime.len().to_string()),
                ("bucket", format!("{:?}", t.bucket)),
                ("labels", format!("{:?}", t.labels)),
                ("M_s", format!("{:?}", t.m_s)),
                ("N_s", format!("{:?}", t.n_s)),
                ("satisfied fraction", t.satisfied_fraction.to_string()),
                ("certificates", cert.all_pass.to_string()),
            ];
            Ok((
                Outcome {
                    json: serde_json::json!({ "trace": t, "certificates": cert }),
                    summary: table(&rows),
                    pass: cert.all_pass && t.anomalies.is_empty(),
                },
                out.as_deref(),
            ))
        }
        Command::NogoExperiment {
            input,
            k,
            s,
            gamma,
            eps,
            scheme,
            provider: prov,
            out,
        } => {
            let g: Game = read_json(input)?;
            let gamma = match gamma {
                Some(v) => *v,
                None => value_exact(&g, caps)?.value,
            };
            let v = nogo::nogo_experiment(&g, &scheme.spec(), *k, *s, gamma, *eps, &provider(prov)?, caps)?;
            let branch = serde_json::to_value(v.branch).expect("serializable");
            let mut rows = vec![
                ("branch", branch.as_str().unwrap_or_default().to_string()),
                ("val(G)", v.gate.val_g.to_string()),
                ("gate", v.gate.pass.to_string()),
                (
                    "robustness",
                    v.robustness_fraction.map_or("n/a".into(), |r| r.to_string()),
                ),
            ];
            if let Some(w) = &v.witness {
                rows.push(("M_s", format!("{:?}", w.m_s)));
                rows.push(("N_s", format!("{:?}", w.n_s)));
                rows.push(("rectangle value", w.rect_value.to_string()));
            }
            for a in &v.anomalies {
                rows.push(("anomaly", a.clone()));
            }
            Ok((
                Outcome {
                    json: to_json(&v),
                    summary: table(&rows),
                    pass: v.branch == Branch::NotRobust,
                },
                out.as_deref(),
            ))
        }
        Command::Bounds { z, eps, out } => {
            let b = nogo::bound_table(*z, *eps)?;
            let rows = [
                ("z", b.z.to_string()),
                ("eps", b.eps.to_string()),
                ("log^2 z", format!("{}{}", b.log_sq, if b.log_clamped { " (clamped)" } else { "" })),
                ("|S|/|X| bound", format!("{} = {}", b.st_fraction_unreduced, b.st_fraction)),
                ("|M|/|X| bound", format!("{} = {}", b.mn_fraction_unreduced, b.mn_fraction)),
                (
                    "satisfied bound",
                    format!("{} = {}", b.satisfied_bound_unreduced, b.satisfied_bound),
                ),
                ("1 - 11 eps", b.eleven_eps.to_string()),
                ("chain holds", b.chain_holds.to_string()),
                ("delta*", b.delta_star.to_string()),
            ];
            Ok((
                Outcome {
                    json: to_json(&b),
                    summary: table(&rows),
                    pass: b.chain_holds,
                },
                out.as_deref(),
            ))
        }
        Command::Concentration {
            t,
            d,
            z_set,
            rho,
            trials,
            seed,
            out,
        } => {
            let z = match z_set {
                ZSet::Quarter => randgame::quarter_block(*t),
                ZSet::Full => (0..*t).flat_map(|x| (0..*t).map(move |y| (x, y))).collect(),
            };
            let r = randgame::concentration_experiment(*t, *d, &z, *rho, *trials, *seed)?;
            let rows = [
                ("mu", r.mu.to_string()),
                ("rho", r.rho.to_string()),
                ("trials", r.trials.to_string()),
                ("violations", r.violations.to_string()),
                ("violation rate", r.empirical_violation_rate.to_string()),
            ];
            Ok((
                Outcome {
                    json: to_json(&r),
                    summary: table(&rows),
                    pass: true,
                },
                out.as_deref(),
            ))
        }
        Command::Campaign { config, out } => {
            let record = campaign::run_campaign(config, out, caps)?;
            let mut rows = vec![
                ("config hash", record.config_hash.clone()),
                ("trials", record.summary.trials.to_string()),
                ("resumed from", record.resumed_from.to_string()),
            ];
            for (name, rate) in &record.summary.pass_rates {
                rows.push((name.as_str(), rate.to_string()));
            }
            Ok((
                Outcome {
                    json: to_json(&record),
                    summary: table(&rows),
                    pass: true,
                },
                None,
            ))
        }
    }
}
