//! The `qstream` command line.
//!
//! Exit codes: 0 on success, 2 for bad input or parameters, 3 when a run
//! finds its input is not realizable. Defaults for numeric parameters may
//! come from a JSON file named by `QSTREAM_CONFIG`; flags win.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use crate::arena::{
    exact_blind_error, gen_littlestone_branch_stream, gen_self_revealing_stream,
    gen_two_point_stream, monte_carlo_uniform, random_reveal_times, write_csv, InnerPainting,
    StreamSource,
};
use crate::blind::{bld, bp_soa_strategy, game_value, qld, worst_case_mistakes, DimensionWitness};
use crate::error::{Error, Result};
use crate::littlestone::littlestone_dimension;
use crate::model::json::PatternClassJson;
use crate::model::{ConceptClass, PatternClass, PiecewiseStream, QueryBudgetPolicy};
use crate::rng;

#[derive(Parser, Debug)]
#[command(
    name = "qstream",
    version,
    about = "Query-bounded online learning laboratory"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Littlestone dimension of a concept class.
    Ld {
        #[arg(long)]
        class: PathBuf,
    },
    /// Blind learning dimension of a pattern class, with an optimal vector.
    Bld {
        #[arg(long)]
        patterns: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo runs of the uniform sampler.
    UnifSim(UnifSimArgs),
    /// Query learning distance and its policy tree.
    Qld {
        #[arg(long)]
        patterns: PathBuf,
        /// Query budget; falls back to the file's "budget" field.
        #[arg(long)]
        budget: Option<u32>,
        /// Also run the game oracle and replay BP-SOA.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write an adversarial stream.
    Adversary(AdversaryArgs),
    /// Exact expected blind error against the two-point stream.
    BlindBound {
        #[arg(long)]
        units: Option<u64>,
        #[arg(long)]
        slope: Option<QueryBudgetPolicy>,
        /// JSON array of query times.
        #[arg(long, conflicts_with = "optimal")]
        placement: Option<PathBuf>,
        /// Query the first budget(n) pieces of every unit.
        #[arg(long)]
        optimal: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Generator {
    LittlestoneBranch,
    TwoPoint,
    SelfRevealing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Painting {
    Branch,
    Random,
}

#[derive(clap::Args, Debug)]
struct GeneratorArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    slope: Option<QueryBudgetPolicy>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    units: Option<u64>,
    #[arg(long, default_value = "x1")]
    x1: String,
    #[arg(long, default_value = "x2")]
    x2: String,
    #[arg(long, value_enum, default_value = "branch")]
    painting: Painting,
}

#[derive(clap::Args, Debug)]
struct UnifSimArgs {
    #[arg(long)]
    class: PathBuf,
    #[arg(long, conflicts_with = "generator")]
    stream: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "stream")]
    generator: Option<Generator>,
    #[command(flatten)]
    gen: GeneratorArgs,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct AdversaryArgs {
    #[arg(long, value_enum)]
    kind: Generator,
    /// Concept class, for the littlestone-branch and self-revealing kinds.
    #[arg(long)]
    class: Option<PathBuf>,
    #[command(flatten)]
    gen: GeneratorArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Defaults read from `QSTREAM_CONFIG`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    delta: Option<f64>,
    #[serde(default, deserialize_with = "slope_either")]
    slope: Option<QueryBudgetPolicy>,
    horizon: Option<f64>,
    trials: Option<u64>,
    budget: Option<u32>,
    n: Option<u64>,
    units: Option<u64>,
    format: Option<Format>,
}

/// Slopes in a config may be written `"1/4"` or in the budget-policy object form.
fn slope_either<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Option<QueryBudgetPolicy>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        Text(String),
        Policy(QueryBudgetPolicy),
    }
    match Option::<Either>::deserialize(d)? {
        None => Ok(None),
        Some(Either::Policy(p)) => Ok(Some(p)),
        Some(Either::Text(t)) => t.parse().map(Some).map_err(serde::de::Error::custom),
    }
}

fn load_config() -> Result<Config> {
    match std::env::var_os("QSTREAM_CONFIG") {
        None => Ok(Config::default()),
        Some(path) => {
            let text = read(Path::new(&path))?;
            serde_json::from_str(&text).map_err(|e| {
                Error::InvalidParameter(format!("config {}: {e}", Path::new(&path).display()))
            })
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

/// Writes through a temporary file in the target directory, then renames.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes)?;
            so.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.flush()?;
            tmp.persist(path).map_err(|e| Error::Io(e.error))?;
        }
    }
    Ok(())
}

fn json_bytes(v: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s.into_bytes()
}

fn need_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| Error::InvalidParameter("randomized command: --seed is required".into()))
}

fn load_class(path: &Path) -> Result<ConceptClass> {
    ConceptClass::from_json(&read(path)?)
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qstream: {e}");
            if e.is_runtime_violation() {
                3
            } else {
                2
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config()?;
    match cli.command {
        Command::Ld { class } => {
            let h = load_class(&class)?;
            emit(None, format!("{}\n", littlestone_dimension(&h)?).as_bytes())
        }
        Command::Bld { patterns, out } => {
            let p = PatternClass::from_json(&read(&patterns)?)?;
            let w = bld(&p)?;
            emit(out.as_deref(), &json_bytes(&serde_json::to_value(&w)?))
        }
        Command::UnifSim(a) => unif_sim(a, &cfg),
        Command::Qld {
            patterns,
            budget,
            verify,
            out,
        } => {
            let raw: PatternClassJson = serde_json::from_str(&read(&patterns)?)?;
            let q = budget
                .or(raw.budget)
                .or(cfg.budget)
                .ok_or_else(|| Error::InvalidParameter("no query budget given".into()))?;
            let p = raw.into_class()?;
            cmd_qld(&p, q, verify, out.as_deref())
        }
        Command::Adversary(a) => adversary(a, &cfg),
        Command::BlindBound {
            units,
            slope,
            placement,
            optimal,
        } => {
            let units = units.or(cfg.units).unwrap_or(1);
            let budget = slope.or(cfg.slope).unwrap_or_default();
            let times: Vec<f64> = if optimal {
                optimal_placement(units, &budget)
            } else if let Some(p) = placement {
                serde_json::from_str(&read(&p)?)?
            } else {
                Vec::new()
            };
            let value = exact_blind_error(units, &budget, &times)?;
            let quarter = num_rational::BigRational::new(units.into(), 4.into());
            let text = format!(
                "exact: {value}\ndecimal: {}\n≥ units/4: {}\n",
                num_traits::ToPrimitive::to_f64(&value).unwrap_or(f64::NAN),
                value >= quarter
            );
            emit(None, text.as_bytes())
        }
    }
}

/// Midpoints of the first `budget(n)` of the `2 budget(n)` pieces of each unit.
fn optimal_placement(units: u64, budget: &QueryBudgetPolicy) -> Vec<f64> {
    let mut out = Vec::new();
    for n in 1..=units {
        let k = budget.at_integer(n);
        for j in 0..k {
            out.push((n - 1) as f64 + (j as f64 + 0.5) / (2 * k) as f64);
        }
    }
    out
}

fn cmd_qld(p: &PatternClass, q: u32, verify: bool, out: Option<&Path>) -> Result<()> {
    let w: DimensionWitness<_> = qld(p, q)?;
    let mut v = json!({
        "budget": q,
        "value": w.value,
        "witness": w.witness,
    });
    if verify {
        let oracle = game_value(p, q)?;
        let strategy = bp_soa_strategy(p, q)?;
        let replay = worst_case_mistakes(&strategy, p, q)?;
        v["oracle_value"] = json!(oracle);
        v["bp_soa_worst_case"] = json!(replay);
        v["bp_soa_within_value"] = json!(replay <= w.value);
        v["agree"] = json!(oracle == w.value);
    }
    emit(out, &json_bytes(&v))
}

fn source_for(
    generator: Generator,
    g: &GeneratorArgs,
    cfg: &Config,
) -> Result<(StreamSource, serde_json::Value)> {
    let budget = g.slope.or(cfg.slope).unwrap_or_default();
    Ok(match generator {
        Generator::LittlestoneBranch => {
            let n = g.n.or(cfg.n).unwrap_or(1);
            let horizon = g.horizon.or(cfg.horizon).unwrap_or(4.0 * n as f64);
            (
                StreamSource::LittlestoneBranch { n, budget, horizon },
                json!({"n": n, "slope": budget.to_string(), "horizon": horizon}),
            )
        }
        Generator::TwoPoint => {
            let units = g.units.or(cfg.units).unwrap_or(1);
            (
                StreamSource::TwoPoint {
                    x1: g.x1.clone(),
                    x2: g.x2.clone(),
                    units,
                    budget,
                },
                json!({"x1": g.x1, "x2": g.x2, "units": units, "slope": budget.to_string()}),
            )
        }
        Generator::SelfRevealing => {
            let h = g.horizon.or(cfg.horizon).unwrap_or(4.0);
            if h < 1.0 || h.fract() != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "self-revealing horizon must be a positive integer, got {h}"
                )));
            }
            let painting = match g.painting {
                Painting::Branch => InnerPainting::Branch(budget),
                Painting::Random => InnerPainting::RandomConsistent,
            };
            let params = match g.painting {
                Painting::Branch => {
                    json!({"horizon": h, "painting": "branch", "slope": budget.to_string()})
                }
                Painting::Random => json!({"horizon": h, "painting": "random"}),
            };
            (
                StreamSource::SelfRevealing {
                    horizon: h as u64,
                    painting,
                },
                params,
            )
        }
    })
}

fn unif_sim(a: UnifSimArgs, cfg: &Config) -> Result<()> {
    let seed = need_seed(a.seed)?;
    let h = load_class(&a.class)?;
    let source = match (&a.stream, a.generator) {
        (Some(path), _) => StreamSource::Fixed(PiecewiseStream::from_json(&read(path)?)?),
        (None, Some(g)) => source_for(g, &a.gen, cfg)?.0,
        (None, None) => unreachable!("clap requires one of --stream / --generator"),
    };
    let delta = a.delta.or(cfg.delta).unwrap_or(1.0);
    let trials = a.trials.or(cfg.trials).unwrap_or(10_000);
    let stats = monte_carlo_uniform(&h, &source, delta, trials, seed)?;
    let bytes = match a.format.or(cfg.format).unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&stats, &mut buf)?;
            buf
        }
        Format::Json => json_bytes(&serde_json::to_value(&stats)?),
    };
    emit(a.out.as_deref(), &bytes)
}

fn adversary(a: AdversaryArgs, cfg: &Config) -> Result<()> {
    let seed = need_seed(a.seed)?;
    let (source, params) = source_for(a.kind, &a.gen, cfg)?;
    let class = || -> Result<ConceptClass> {
        let path = a
            .class
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("this generator needs --class".into()))?;
        load_class(path)
    };
    let stream = match source {
        StreamSource::LittlestoneBranch { n, budget, horizon } => {
            gen_littlestone_branch_stream(&class()?, n, &budget, horizon, seed)?
        }
        StreamSource::TwoPoint {
            x1,
            x2,
            units,
            budget,
        } => gen_two_point_stream(&x1, &x2, units, &budget, seed)?,
        StreamSource::SelfRevealing { horizon, painting } => {
            // reveal times and painting draw from separate streams of the seed
            let times = random_reveal_times(horizon, &mut rng::split(seed, 1));
            gen_self_revealing_stream(&class()?, &times, horizon as f64, &painting, seed)?
        }
        StreamSource::Fixed(_) => unreachable!(),
    };
    let kind = a.kind.to_possible_value().expect("named variant");
    let mut v = serde_json::to_value(&stream)?;
    v["provenance"] = json!({"kind": kind.get_name(), "params": params, "seed": seed});
    emit(a.out.as_deref(), &json_bytes(&v))
}
