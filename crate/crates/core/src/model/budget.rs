use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear query budget `budget(t) = floor(slope * t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BudgetJson", into = "BudgetJson")]
pub struct QueryBudgetPolicy {
    slope: Ratio<u64>,
}

#[derive(Serialize, Deserialize)]
struct BudgetJson {
    slope: SlopeJson,
}

#[derive(Serialize, Deserialize)]
struct SlopeJson {
    num: u64,
    den: u64,
}

impl TryFrom<BudgetJson> for QueryBudgetPolicy {
    type Error = Error;

    fn try_from(j: BudgetJson) -> Result<Self> {
        QueryBudgetPolicy::new(j.slope.num, j.slope.den)
    }
}

impl From<QueryBudgetPolicy> for BudgetJson {
    fn from(p: QueryBudgetPolicy) -> Self {
        BudgetJson {
            slope: SlopeJson {
                num: *p.slope.numer(),
                den: *p.slope.denom(),
            },
        }
    }
}

impl Default for QueryBudgetPolicy {
    fn default() -> Self {
        QueryBudgetPolicy {
            slope: Ratio::from_integer(1),
        }
    }
}

impl QueryBudgetPolicy {
    pub fn new(num: u64, den: u64) -> Result<QueryBudgetPolicy> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidParameter(format!(
                "budget slope {num}/{den} is not a positive rational"
            )));
        }
        Ok(QueryBudgetPolicy {
            slope: Ratio::new(num, den),
        })
    }

    pub fn slope(&self) -> Ratio<u64> {
        self.slope
    }

    pub fn slope_parts(&self) -> (u64, u64) {
        (*self.slope.numer(), *self.slope.denom())
    }

    /// Exact rational slope.
    pub fn slope_exact(&self) -> BigRational {
        let (n, d) = self.slope_parts();
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// `floor(slope * n)` for an integer time.
    pub fn at_integer(&self, n: u64) -> u64 {
        let (num, den) = self.slope_parts();
        (u128::from(n) * u128::from(num) / u128::from(den)) as u64
    }

    /// `floor(slope * t)`, computed exactly on the binary value of `t`.
    /// Negative or non-finite times have no budget.
    pub fn at(&self, t: f64) -> u64 {
        match BigRational::from_float(t) {
            Some(r) if !r.is_negative() && !r.is_zero() => (r * self.slope_exact())
                .floor()
                .to_integer()
                .to_u64()
                .unwrap_or(u64::MAX),
            _ => 0,
        }
    }
}

impl fmt::Display for QueryBudgetPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.slope_parts();
        write!(f, "{n}/{d}")
    }
}

impl FromStr for QueryBudgetPolicy {
    type Err = Error;

    /// Accepts `"3"` or `"1/4"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad slope {s:?}, expected p or p/q"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n = n.parse().map_err(|_| bad())?;
        let d = d.parse().map_err(|_| bad())?;
        QueryBudgetPolicy::new(n, d)
    }
}
