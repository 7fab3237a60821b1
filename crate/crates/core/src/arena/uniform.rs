use rand::Rng as _;

use super::{mistake_integral, EpochError, PredictorTrace, QueryEvent, RunParams, RunReport};
use crate::error::{Error, Result};
use crate::littlestone::{LittlestoneSolver, VersionSpace};
use crate::model::{ConceptClass, InstanceId, Label, PiecewiseStream, Validate};
use crate::rng::{self, Rng};

/// What the uniform sampler does when a query contradicts every surviving
/// concept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnConflict {
    /// Stop with [`Error::NotRealizable`].
    Fail,
    /// Start over from the full class restricted to the new pair. Instances
    /// outside the class's space are predicted 0 and never update the
    /// version space. Used for streams that are only piecewise realizable.
    Restart,
}

/// Uniform sampler with an SOA predictor on a realizable stream.
pub fn run_uniform_sampler(
    h: &ConceptClass,
    stream: &PiecewiseStream,
    delta: f64,
    seed: u64,
) -> Result<RunReport> {
    if h.is_empty() {
        return Err(Error::EmptyClass);
    }
    let solver = LittlestoneSolver::new(h);
    let mut report = run_uniform_sampler_with(
        &solver,
        stream,
        delta,
        &mut rng::seeded(seed),
        OnConflict::Fail,
    )?;
    report.seed = Some(seed);
    Ok(report)
}

/// One run drawing query times from `rng`. The `k`-th query time is uniform
/// on `[t, t + delta]` where `t` is the previous query time (0 at the start);
/// times at or past the horizon end the run.
pub fn run_uniform_sampler_with(
    solver: &LittlestoneSolver,
    stream: &PiecewiseStream,
    delta: f64,
    rng: &mut Rng,
    on_conflict: OnConflict,
) -> Result<RunReport> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    stream.check()?;
    let space = &solver.class().space;
    let ids: Vec<Option<InstanceId>> = stream
        .segments
        .iter()
        .map(|s| match (space.lookup(&s.x), on_conflict) {
            (Some(id), _) => Ok(Some(id)),
            (None, OnConflict::Restart) => Ok(None),
            (None, OnConflict::Fail) => Err(Error::UnknownInstance(s.x.clone())),
        })
        .collect::<Result<_>>()?;

    let horizon = stream.horizon;
    let mut v = VersionSpace::new(solver);
    let mut trace = PredictorTrace::new(horizon);
    let mut epochs = vec![0.0];
    let mut queries = Vec::new();
    let mut t = 0.0;

    let predict =
        |v: &VersionSpace, id: Option<InstanceId>| id.map_or(Label::Zero, |x| v.predict(x));

    loop {
        let tq = t + rng.gen_range(0.0..=delta);
        let end = tq.min(horizon);
        // deploy the current predictor on [t, end)
        let first = stream.segments.partition_point(|s| s.end <= t);
        for (s, &id) in stream.segments[first..].iter().zip(&ids[first..]) {
            if s.start >= end {
                break;
            }
            let (lo, hi) = (s.start.max(t), s.end.min(end));
            let p = predict(&v, id);
            trace.push(lo, hi, p);
            if p != s.y && lo < hi {
                *epochs.last_mut().unwrap() += hi - lo;
            }
        }
        if tq >= horizon {
            break;
        }
        let k = stream.segments.partition_point(|s| s.end <= tq);
        let (seg, id) = (&stream.segments[k], ids[k]);
        let prediction = predict(&v, id);
        let success = prediction != seg.y;
        queries.push(QueryEvent {
            time: tq,
            x: seg.x.clone(),
            y: seg.y,
            prediction,
            success,
        });
        if let Some(x) = id {
            let next = v.restricted(x, seg.y);
            v = if !next.is_empty() {
                next
            } else {
                match on_conflict {
                    OnConflict::Fail => {
                        return Err(Error::NotRealizable(format!(
                            "query at t={tq}: no surviving concept labels {:?} with {}",
                            seg.x, seg.y
                        )))
                    }
                    OnConflict::Restart => {
                        let fresh = VersionSpace::new(solver).restricted(x, seg.y);
                        if fresh.is_empty() {
                            VersionSpace::new(solver)
                        } else {
                            fresh
                        }
                    }
                }
            };
        }
        if success {
            epochs.push(0.0);
        }
        t = tq;
    }

    if on_conflict == OnConflict::Fail {
        // once LD(V) = 0 every survivor agrees everywhere, so that epoch is
        // error-free and is not reported
        let ld = solver.dimension(&solver.full()).unwrap_or(0) as usize;
        debug_assert!(epochs.len() <= ld + 1, "more successes than LD");
        debug_assert!(epochs.iter().skip(ld).all(|&e| e == 0.0));
        epochs.truncate(ld);
    }

    Ok(RunReport {
        mistake_integral: mistake_integral(stream, &trace)?,
        queries,
        epochs: epochs
            .into_iter()
            .enumerate()
            .map(|(epoch, error)| EpochError { epoch, error })
            .collect(),
        seed: None,
        params: RunParams {
            learner: "uniform".into(),
            delta: Some(delta),
            horizon,
        },
        trace,
    })
}
