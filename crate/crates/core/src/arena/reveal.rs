//! Self-revealing streams and the adaptive sampler that exploits them.
//!
//! At each reveal time the stream shows a token instance
//! `SEG(<schedule>)|next=<time>` whose payload is the whole `(x, y)` schedule
//! up to the next reveal time. The schedule is a JSON array of
//! `[start, end, x, y]` rows.

use rand::Rng as _;

use super::adversary::{paint, random_branch};
use super::{mistake_integral, PredictorTrace, QueryEvent, RunParams, RunReport};
use crate::error::{Error, Result};
use crate::littlestone::LittlestoneSolver;
use crate::model::{ConceptClass, Label, PiecewiseStream, QueryBudgetPolicy, Segment};
use crate::rng::{self, Rng};

const PREFIX: &str = "SEG(";
const SEP: &str = ")|next=";

/// How each reveal segment is filled in.
#[derive(Clone, Debug, PartialEq)]
pub enum InnerPainting {
    /// A random branch of a depth-`2k` shattered tree in `2k` equal pieces,
    /// `k` the budget at the segment's end. Falls back to `RandomConsistent`
    /// when `k = 0`.
    Branch(QueryBudgetPolicy),
    /// One to four equal pieces labelled by a single random concept.
    RandomConsistent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub schedule: Vec<Segment>,
    pub next: f64,
}

pub fn encode_token(schedule: &[Segment], next: f64) -> String {
    let rows: Vec<(f64, f64, &str, Label)> = schedule
        .iter()
        .map(|s| (s.start, s.end, s.x.as_str(), s.y))
        .collect();
    let payload = serde_json::to_string(&rows).expect("schedule serializes");
    format!("{PREFIX}{payload}{SEP}{next}")
}

pub fn decode_token(token: &str) -> Result<Token> {
    let bad = |why: &str| Error::MalformedPayload(format!("{why} in {token:?}"));
    let body = token
        .strip_prefix(PREFIX)
        .ok_or_else(|| bad("missing SEG( prefix"))?;
    let cut = body.rfind(SEP).ok_or_else(|| bad("missing next marker"))?;
    let rows: Vec<(f64, f64, String, Label)> =
        serde_json::from_str(&body[..cut]).map_err(|e| bad(&format!("payload: {e}")))?;
    let next: f64 = body[cut + SEP.len()..]
        .parse()
        .map_err(|_| bad("unparsable next time"))?;
    let schedule: Vec<Segment> = rows
        .into_iter()
        .map(|(start, end, x, y)| Segment { start, end, x, y })
        .collect();
    if schedule.is_empty() {
        return Err(bad("empty schedule"));
    }
    let contiguous = schedule.windows(2).all(|w| w[0].end == w[1].start)
        && schedule.iter().all(|s| s.start < s.end);
    if !contiguous || schedule.last().unwrap().end != next {
        return Err(bad("schedule does not tile up to next"));
    }
    Ok(Token { schedule, next })
}

/// `0`, then one dyadic time strictly inside each `(i-1, i)`, `i < horizon`.
pub fn random_reveal_times(horizon: u64, rng: &mut Rng) -> Vec<f64> {
    let mut out = vec![0.0];
    for i in 1..horizon {
        out.push((i - 1) as f64 + rng.gen_range(1..=7u32) as f64 / 8.0);
    }
    out
}

pub fn gen_self_revealing_stream(
    source: &ConceptClass,
    reveal_times: &[f64],
    horizon: f64,
    painting: &InnerPainting,
    seed: u64,
) -> Result<PiecewiseStream> {
    if source.is_empty() {
        return Err(Error::EmptyClass);
    }
    let solver = LittlestoneSolver::new(source);
    self_revealing_stream(
        &solver,
        reveal_times,
        horizon,
        painting,
        &mut rng::seeded(seed),
    )
}

pub(super) fn self_revealing_stream(
    solver: &LittlestoneSolver,
    reveal_times: &[f64],
    horizon: f64,
    painting: &InnerPainting,
    rng: &mut Rng,
) -> Result<PiecewiseStream> {
    if reveal_times.first() != Some(&0.0) {
        return Err(Error::InvalidParameter(
            "reveal times must start at 0".into(),
        ));
    }
    if !reveal_times.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter(
            "reveal times must increase strictly".into(),
        ));
    }
    if !horizon.is_finite() || *reveal_times.last().unwrap() >= horizon {
        return Err(Error::InvalidParameter(format!(
            "reveal times must lie in [0, {horizon})"
        )));
    }
    let class = solver.class();
    let mut segments = Vec::new();
    for (i, &lo) in reveal_times.iter().enumerate() {
        let hi = reveal_times.get(i + 1).copied().unwrap_or(horizon);
        let k = match painting {
            InnerPainting::Branch(b) => b.at(hi),
            InnerPainting::RandomConsistent => 0,
        };
        let pairs = if k > 0 {
            random_branch(solver, 2 * k, rng)?.0
        } else {
            let h = &class.concepts[rng.gen_range(0..class.len())];
            let pieces = rng.gen_range(1..=4);
            (0..pieces)
                .map(|_| {
                    let x = class
                        .space
                        .iter()
                        .nth(rng.gen_range(0..class.space.len()))
                        .unwrap();
                    (class.space.name(x).to_owned(), h.label(x))
                })
                .collect()
        };
        let inner = paint(&pairs, lo, hi);
        let token = encode_token(&inner, hi);
        let first = &inner[0];
        let micro = lo + (first.end - lo) / 4.0;
        segments.push(Segment {
            start: lo,
            end: micro,
            x: token,
            y: first.y,
        });
        segments.push(Segment {
            start: micro,
            ..first.clone()
        });
        segments.extend(inner.into_iter().skip(1));
    }
    Ok(PiecewiseStream { horizon, segments })
}

/// Queries at 0, decodes the schedule, predicts it verbatim, and queries
/// again exactly at the announced next reveal time.
pub fn run_adaptive_sampler(stream: &PiecewiseStream) -> Result<RunReport> {
    let horizon = stream.horizon;
    let mut trace = PredictorTrace::new(horizon);
    let mut queries = Vec::new();
    let mut t = 0.0;
    while t < horizon {
        let seg = stream
            .at(t)
            .ok_or_else(|| Error::MalformedPayload(format!("no segment covers t={t}")))?;
        let token = decode_token(&seg.x)?;
        if token.schedule[0].start != t {
            return Err(Error::MalformedPayload(format!(
                "schedule revealed at t={t} starts at {}",
                token.schedule[0].start
            )));
        }
        if token.next > horizon {
            return Err(Error::MalformedPayload(format!(
                "next reveal {} past horizon {horizon}",
                token.next
            )));
        }
        let prediction = token.schedule[0].y;
        queries.push(QueryEvent {
            time: t,
            x: seg.x.clone(),
            y: seg.y,
            prediction,
            success: prediction != seg.y,
        });
        for s in &token.schedule {
            trace.push(s.start, s.end, s.y);
        }
        t = token.next;
    }
    Ok(RunReport {
        mistake_integral: mistake_integral(stream, &trace)?,
        queries,
        epochs: Vec::new(),
        seed: None,
        params: RunParams {
            learner: "adaptive".into(),
            delta: None,
            horizon,
        },
        trace,
    })
}
