//! Continuous-time game engine.
//!
//! Streams are piecewise constant, so every quantity here is computed by
//! walking segment boundaries; nothing is sampled on a time grid.

mod adversary;
mod integral;
mod monte_carlo;
mod reveal;
mod uniform;

use serde::{Deserialize, Serialize};

pub use adversary::{
    exact_blind_error, exact_blind_error_f64, gen_littlestone_branch_stream, gen_two_point_stream,
    tail_pair,
};
pub use integral::mistake_integral;
pub use monte_carlo::{monte_carlo_uniform, write_csv, McStats, StreamSource, TrialRow};
pub use reveal::{
    decode_token, encode_token, gen_self_revealing_stream, random_reveal_times,
    run_adaptive_sampler, InnerPainting, Token,
};
pub use uniform::{run_uniform_sampler, run_uniform_sampler_with, OnConflict};

use crate::model::{Label, Validate, Violation};

/// One constant piece of a predictor's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePiece {
    pub start: f64,
    pub end: f64,
    pub prediction: Label,
}

/// What a learner predicted along a run, covering `[0, horizon)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PredictorTrace {
    pub horizon: f64,
    pub pieces: Vec<TracePiece>,
}

impl PredictorTrace {
    pub fn new(horizon: f64) -> PredictorTrace {
        PredictorTrace {
            horizon,
            pieces: Vec::new(),
        }
    }

    /// Appends `[start, end)`, merging with the previous piece when the
    /// prediction is unchanged. Empty pieces are dropped.
    pub fn push(&mut self, start: f64, end: f64, prediction: Label) {
        if start >= end {
            return;
        }
        match self.pieces.last_mut() {
            Some(p) if p.prediction == prediction && p.end == start => p.end = end,
            _ => self.pieces.push(TracePiece {
                start,
                end,
                prediction,
            }),
        }
    }
}

impl Validate for PredictorTrace {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            if p.start.is_nan() || p.end.is_nan() || p.start >= p.end {
                out.push(Violation(format!("piece {i}: empty or reversed")));
            }
            if p.start != cursor {
                out.push(Violation(format!(
                    "piece {i} starts at {} not {cursor}",
                    p.start
                )));
            }
            cursor = p.end;
        }
        if cursor != self.horizon {
            out.push(Violation(format!(
                "trace ends at {cursor}, horizon is {}",
                self.horizon
            )));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryEvent {
    pub time: f64,
    pub x: String,
    pub y: Label,
    /// The deployed predictor's output at the query time.
    pub prediction: Label,
    pub success: bool,
}

/// Error accumulated while exactly `epoch` successful queries had happened.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochError {
    pub epoch: usize,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub learner: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub horizon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mistake_integral: f64,
    pub queries: Vec<QueryEvent>,
    pub epochs: Vec<EpochError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub params: RunParams,
    pub trace: PredictorTrace,
}

impl RunReport {
    pub fn successes(&self) -> usize {
        self.queries.iter().filter(|q| q.success).count()
    }
}
