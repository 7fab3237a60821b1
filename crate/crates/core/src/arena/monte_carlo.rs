use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::adversary::{branch_stream, two_point_stream};
use super::reveal::{random_reveal_times, self_revealing_stream};
use super::{run_uniform_sampler_with, InnerPainting, OnConflict};
use crate::error::{Error, Result};
use crate::littlestone::LittlestoneSolver;
use crate::model::{ConceptClass, PiecewiseStream, QueryBudgetPolicy};
use crate::rng::{self, Rng};

/// Where each trial's stream comes from. Generated streams are redrawn per
/// trial from that trial's generator.
#[derive(Clone, Debug)]
pub enum StreamSource {
    Fixed(PiecewiseStream),
    LittlestoneBranch {
        n: u64,
        budget: QueryBudgetPolicy,
        horizon: f64,
    },
    TwoPoint {
        x1: String,
        x2: String,
        units: u64,
        budget: QueryBudgetPolicy,
    },
    /// Random reveal times, one per unit of time. Runs against it restart
    /// on conflict since only each reveal segment is realizable.
    SelfRevealing {
        horizon: u64,
        painting: InnerPainting,
    },
}

impl StreamSource {
    fn on_conflict(&self) -> OnConflict {
        match self {
            StreamSource::SelfRevealing { .. } => OnConflict::Restart,
            _ => OnConflict::Fail,
        }
    }

    fn draw(&self, solver: &LittlestoneSolver, rng: &mut Rng) -> Result<PiecewiseStream> {
        match self {
            StreamSource::Fixed(s) => Ok(s.clone()),
            StreamSource::LittlestoneBranch { n, budget, horizon } => {
                branch_stream(solver, *n, budget, *horizon, rng)
            }
            StreamSource::TwoPoint {
                x1,
                x2,
                units,
                budget,
            } => two_point_stream(x1, x2, *units, budget, rng),
            StreamSource::SelfRevealing { horizon, painting } => {
                let times = random_reveal_times(*horizon, rng);
                self_revealing_stream(solver, &times, *horizon as f64, painting, rng)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub integral: f64,
    pub queries: usize,
    pub successes: usize,
    /// Error per epoch, zero-padded to a common width.
    pub epochs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McStats {
    pub trials: u64,
    pub seed: u64,
    pub delta: f64,
    pub ld: u32,
    pub mean: f64,
    pub stderr: f64,
    /// `delta * LD(H)`.
    pub bound: f64,
    /// `mean <= bound + 3 stderr`.
    pub pass: bool,
    pub epoch_mean: Vec<f64>,
    pub epoch_stderr: Vec<f64>,
    pub rows: Vec<TrialRow>,
}

fn mean_stderr(xs: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Independent uniform-sampler runs. Trial `i` draws everything from
/// generator stream `i` under `seed`, so results do not depend on thread
/// scheduling.
pub fn monte_carlo_uniform(
    h: &ConceptClass,
    source: &StreamSource,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<McStats> {
    if trials < 2 {
        return Err(Error::InvalidParameter("need at least 2 trials".into()));
    }
    if h.is_empty() {
        return Err(Error::EmptyClass);
    }
    let solver = LittlestoneSolver::new(h);
    let ld = solver.dimension(&solver.full()).unwrap_or(0);
    let mode = source.on_conflict();
    let mut rows = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::split(seed, i);
            let stream = source.draw(&solver, &mut rng)?;
            let r = run_uniform_sampler_with(&solver, &stream, delta, &mut rng, mode)?;
            Ok(TrialRow {
                trial: i,
                integral: r.mistake_integral,
                queries: r.queries.len(),
                successes: r.successes(),
                epochs: r.epochs.iter().map(|e| e.error).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let width = rows
        .iter()
        .map(|r| r.epochs.len())
        .max()
        .unwrap_or(0)
        .max(ld as usize);
    for r in &mut rows {
        r.epochs.resize(width, 0.0);
    }
    let (mean, stderr) = mean_stderr(rows.iter().map(|r| r.integral));
    let (epoch_mean, epoch_stderr) = (0..width)
        .map(|k| mean_stderr(rows.iter().map(|r| r.epochs[k])))
        .unzip();
    let bound = delta * f64::from(ld);
    Ok(McStats {
        trials,
        seed,
        delta,
        ld,
        mean,
        stderr,
        bound,
        pass: mean <= bound + 3.0 * stderr,
        epoch_mean,
        epoch_stderr,
        rows,
    })
}

/// One row per trial, then `epoch_mean` and `epoch_stderr` rows under the
/// epoch columns, then `summary,mean,stderr,bound,pass`.
pub fn write_csv<W: Write>(stats: &McStats, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let width = stats.epoch_mean.len();
    let mut header: Vec<String> = ["trial", "integral", "queries", "successes"]
        .map(String::from)
        .to_vec();
    header.extend((0..width).map(|k| format!("epoch_{k}")));
    w.write_record(&header).map_err(csv_err)?;
    for r in &stats.rows {
        let mut rec = vec![
            r.trial.to_string(),
            r.integral.to_string(),
            r.queries.to_string(),
            r.successes.to_string(),
        ];
        rec.extend(r.epochs.iter().map(f64::to_string));
        w.write_record(&rec).map_err(csv_err)?;
    }
    for (name, vals) in [
        ("epoch_mean", &stats.epoch_mean),
        ("epoch_stderr", &stats.epoch_stderr),
    ] {
        let mut rec = vec![
            name.to_string(),
            String::new(),
            String::new(),
            String::new(),
        ];
        rec.extend(vals.iter().map(f64::to_string));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.write_record([
        "summary".to_string(),
        stats.mean.to_string(),
        stats.stderr.to_string(),
        stats.bound.to_string(),
        stats.pass.to_string(),
    ])
    .map_err(csv_err)?;
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("csv: {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_class_is_exactly_zero() {
        let h = ConceptClass::from_rows(["a", "b"], &["01"]).unwrap();
        let src = StreamSource::TwoPoint {
            x1: "a".into(),
            x2: "b".into(),
            units: 3,
            budget: QueryBudgetPolicy::default(),
        };
        let st = monte_carlo_uniform(&h, &src, 1.0, 50, 1).unwrap();
        assert_eq!((st.mean, st.stderr), (0.0, 0.0));
        assert!(st.pass);
    }

    #[test]
    fn deterministic_and_csv_shaped() {
        let h = ConceptClass::all_functions(["a", "b"]);
        let src = StreamSource::LittlestoneBranch {
            n: 1,
            budget: QueryBudgetPolicy::new(1, 4).unwrap(),
            horizon: 8.0,
        };
        let a = monte_carlo_uniform(&h, &src, 1.0, 64, 9).unwrap();
        let b = monte_carlo_uniform(&h, &src, 1.0, 64, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.epoch_mean.len(), 2);
        let mut buf = Vec::new();
        write_csv(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "trial,integral,queries,successes,epoch_0,epoch_1");
        assert_eq!(lines.len(), 1 + 64 + 3);
        assert!(lines.last().unwrap().starts_with("summary,"));
    }

    #[test]
    fn rejects_single_trial() {
        let h = ConceptClass::all_functions(["a"]);
        let src = StreamSource::Fixed(PiecewiseStream {
            horizon: 0.0,
            segments: vec![],
        });
        assert!(monte_carlo_uniform(&h, &src, 1.0, 1, 0).is_err());
    }
}
