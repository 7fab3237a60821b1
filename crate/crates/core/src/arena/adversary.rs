//! Oblivious adversaries that fix a hard stream before the run starts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::littlestone::{ConceptSet, LittlestoneSolver};
use crate::model::{ConceptClass, Label, PiecewiseStream, QueryBudgetPolicy, Segment};
use crate::rng::{self, Rng};

/// Paints `[0, 4n)` with a uniformly random branch of a depth-`2k` shattered
/// tree, `k = budget(4n)`, one pair per interval of width `2n/k`. The rest of
/// `[4n, horizon)` carries a single pair consistent with every concept that
/// survives the branch.
pub fn gen_littlestone_branch_stream(
    h: &ConceptClass,
    n: u64,
    budget: &QueryBudgetPolicy,
    horizon: f64,
    seed: u64,
) -> Result<PiecewiseStream> {
    if h.is_empty() {
        return Err(Error::EmptyClass);
    }
    let solver = LittlestoneSolver::new(h);
    branch_stream(&solver, n, budget, horizon, &mut rng::seeded(seed))
}

pub(super) fn branch_stream(
    solver: &LittlestoneSolver,
    n: u64,
    budget: &QueryBudgetPolicy,
    horizon: f64,
    rng: &mut Rng,
) -> Result<PiecewiseStream> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let span = 4 * n;
    if !horizon.is_finite() || horizon < span as f64 {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} must be at least 4n = {span}"
        )));
    }
    let k = budget.at_integer(span);
    if k == 0 {
        return Err(Error::InvalidParameter(format!(
            "budget({span}) = 0 under slope {budget}; need at least one query"
        )));
    }
    let (sigma, alive) = random_branch(solver, 2 * k, rng)?;
    let mut segments = paint(&sigma, 0.0, span as f64);
    if horizon > span as f64 {
        let (x, y) = tail_pair(solver, &alive);
        segments.push(Segment {
            start: span as f64,
            end: horizon,
            x,
            y,
        });
    }
    Ok(PiecewiseStream { horizon, segments })
}

/// A uniformly random root-to-leaf branch of a depth-`depth` shattered tree,
/// with the concepts that realize it.
pub(super) fn random_branch(
    solver: &LittlestoneSolver,
    depth: u64,
    rng: &mut Rng,
) -> Result<(Vec<(String, Label)>, ConceptSet)> {
    let full = solver.full();
    let ld = solver.dimension(&full).unwrap_or(0);
    let too_shallow = || Error::ClassTooShallow {
        required: depth.min(u32::MAX as u64) as u32,
        actual: ld,
    };
    let depth = u32::try_from(depth).map_err(|_| too_shallow())?;
    let tree = solver.tree(&full, depth).ok_or_else(too_shallow)?;
    let bits: Vec<Label> = (0..depth).map(|_| Label::from_bool(rng.gen())).collect();
    let sigma = tree.path(&bits);
    let space = &solver.class().space;
    let mut alive = full;
    for (x, y) in &sigma {
        alive = solver.restrict_set(&alive, space.require(x)?, *y);
    }
    debug_assert!(!alive.is_clear(), "shattered tree branch not realizable");
    Ok((sigma, alive))
}

/// `pairs.len()` equal pieces of `[start, end)`, the last ending exactly at `end`.
pub(super) fn paint(pairs: &[(String, Label)], start: f64, end: f64) -> Vec<Segment> {
    let m = pairs.len() as f64;
    let at = |j: usize| {
        if j == pairs.len() {
            end
        } else {
            start + (end - start) * j as f64 / m
        }
    };
    pairs
        .iter()
        .enumerate()
        .map(|(j, (x, y))| Segment {
            start: at(j),
            end: at(j + 1),
            x: x.clone(),
            y: *y,
        })
        .collect()
}

/// The first instance (space order) on which every concept in `alive`
/// agrees, with that label; failing that, the first instance with the label
/// the first surviving concept gives it.
pub fn tail_pair(solver: &LittlestoneSolver, alive: &ConceptSet) -> (String, Label) {
    let class = solver.class();
    let first = alive
        .ones()
        .next()
        .expect("tail pair needs a surviving concept");
    for x in class.space.iter() {
        let y = class.concepts[first].label(x);
        if alive.ones().all(|i| class.concepts[i].label(x) == y) {
            return (class.space.name(x).to_owned(), y);
        }
    }
    let x = class.space.iter().next().expect("non-empty space");
    (
        class.space.name(x).to_owned(),
        class.concepts[first].label(x),
    )
}

/// Unit interval `[n-1, n)` split into `2 budget(n)` equal pieces, each
/// independently `(x1, 0)` or `(x2, 1)` with probability 1/2. When
/// `budget(n) = 0` the unit is a single random piece.
pub fn gen_two_point_stream(
    x1: &str,
    x2: &str,
    units: u64,
    budget: &QueryBudgetPolicy,
    seed: u64,
) -> Result<PiecewiseStream> {
    two_point_stream(x1, x2, units, budget, &mut rng::seeded(seed))
}

pub(super) fn two_point_stream(
    x1: &str,
    x2: &str,
    units: u64,
    budget: &QueryBudgetPolicy,
    rng: &mut Rng,
) -> Result<PiecewiseStream> {
    if x1 == x2 {
        return Err(Error::InvalidParameter("x1 and x2 must differ".into()));
    }
    if units == 0 {
        return Err(Error::InvalidParameter("units must be positive".into()));
    }
    let mut segments = Vec::new();
    for n in 1..=units {
        let pieces = pieces_in_unit(budget, n);
        let pairs: Vec<(String, Label)> = (0..pieces)
            .map(|_| {
                if rng.gen() {
                    (x2.to_owned(), Label::One)
                } else {
                    (x1.to_owned(), Label::Zero)
                }
            })
            .collect();
        segments.extend(paint(&pairs, (n - 1) as f64, n as f64));
    }
    Ok(PiecewiseStream {
        horizon: units as f64,
        segments,
    })
}

fn pieces_in_unit(budget: &QueryBudgetPolicy, n: u64) -> usize {
    let k = budget.at_integer(n);
    if k == 0 {
        1
    } else {
        2 * k as usize
    }
}

/// Expected mistake integral of any blind predictor against the two-point
/// stream distribution, given where it queries. A piece with no query in it
/// costs half its width whatever is predicted there; a queried piece costs
/// nothing. Query times are taken at their exact binary value.
///
/// A placement is admissible when each unit `[n-1, n)` holds at most
/// `budget(n)` queries. Every placement with `|Q ∩ [0, n)| ≤ budget(n)` for
/// all `n` is admissible in this sense.
pub fn exact_blind_error(
    units: u64,
    budget: &QueryBudgetPolicy,
    query_times: &[f64],
) -> Result<BigRational> {
    if units == 0 {
        return Err(Error::InvalidParameter("units must be positive".into()));
    }
    let n_units = units as usize;
    let mut by_unit: Vec<Vec<BigRational>> = vec![Vec::new(); n_units];
    for &t in query_times {
        let exact = BigRational::from_float(t)
            .filter(|_| t >= 0.0)
            .ok_or_else(|| Error::InvalidParameter(format!("bad query time {t}")))?;
        let unit = exact.floor().to_integer().to_usize().unwrap_or(usize::MAX);
        if unit < n_units {
            by_unit[unit].push(exact);
        }
    }
    let mut total = BigRational::zero();
    for (u, qs) in by_unit.iter().enumerate() {
        let n = u as u64 + 1;
        let cap = budget.at_integer(n);
        if qs.len() as u64 > cap {
            return Err(Error::BudgetExceeded(format!(
                "{} queries in [{}, {}) but budget({n}) = {cap}",
                qs.len(),
                n - 1,
                n
            )));
        }
        let m = pieces_in_unit(budget, n);
        let mut hit = vec![false; m];
        let base = BigRational::from_integer(BigInt::from(u));
        for q in qs {
            let j = ((q - &base) * BigInt::from(m)).floor().to_integer();
            hit[j.to_usize().expect("query inside its unit")] = true;
        }
        let free = hit.iter().filter(|&&h| !h).count();
        total += BigRational::new(BigInt::from(free), BigInt::from(2 * m));
    }
    Ok(total)
}

pub fn exact_blind_error_f64(
    units: u64,
    budget: &QueryBudgetPolicy,
    query_times: &[f64],
) -> Result<f64> {
    exact_blind_error(units, budget, query_times).map(|r| r.to_f64().unwrap_or(f64::NAN))
}
