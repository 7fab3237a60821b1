use super::PredictorTrace;
use crate::error::{Error, Result};
use crate::model::{PiecewiseStream, Validate};

/// `∫ 1[prediction ≠ y] dt` over `[0, horizon)`, summed over the common
/// refinement of the two boundary sets.
pub fn mistake_integral(stream: &PiecewiseStream, trace: &PredictorTrace) -> Result<f64> {
    if stream.horizon != trace.horizon {
        return Err(Error::HorizonMismatch {
            stream: stream.horizon,
            trace: trace.horizon,
        });
    }
    stream.check()?;
    trace.check()?;
    let (mut i, mut j) = (0, 0);
    let mut total = 0.0;
    while i < stream.segments.len() && j < trace.pieces.len() {
        let s = &stream.segments[i];
        let p = &trace.pieces[j];
        let lo = s.start.max(p.start);
        let hi = s.end.min(p.end);
        if lo < hi && s.y != p.prediction {
            total += hi - lo;
        }
        if s.end <= p.end {
            i += 1;
        }
        if p.end <= s.end {
            j += 1;
        }
    }
    Ok(total)
}
