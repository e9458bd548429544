//! Pure-integer engine: moment sums over lattice points, the `L_k` / `U_k`
//! bounds derived from them, and moment-guided bisection.
//!
//! Moment sums `Σ f(α)^k` are computed by exact enumeration of the lattice
//! points.

use std::collections::BTreeMap;

use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, ikth_root_ceil, ikth_root_floor, rat_from_int, ExactInt, ExactRat};
use crate::polynomial::Polynomial;
use crate::polytope::{MixedPoint, Polytope};
use crate::solution::{Certificate, DescentCertificate, Guarantee, GuaranteeKind, Solution};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentVector {
    /// Number of points summed over.
    pub count: ExactInt,
    /// `k -> Σ f(α)^k`.
    pub values: BTreeMap<u32, ExactRat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsPair {
    pub k: u32,
    #[serde(with = "numeric::int_string")]
    pub lower: ExactInt,
    #[serde(with = "numeric::int_string")]
    pub upper: ExactInt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub max: Solution,
    pub min: Solution,
}

/// `Σ f(α)^k` over the given points.
pub fn moment_sum<I>(points: I, f: &Polynomial, k: u32) -> ExactRat
where
    I: IntoIterator<Item = MixedPoint>,
{
    points
        .into_iter()
        .map(|p| numeric::rat_pow(&f.evaluate(&p.coords()), k))
        .fold(ExactRat::zero(), |acc, v| acc + v)
}

/// Moment sums for several `k` in one pass.
pub fn moment_vector<I>(points: I, f: &Polynomial, ks: &[u32]) -> MomentVector
where
    I: IntoIterator<Item = MixedPoint>,
{
    let mut values: BTreeMap<u32, ExactRat> = ks.iter().map(|&k| (k, ExactRat::zero())).collect();
    values.insert(0, ExactRat::zero());
    let mut count = ExactInt::zero();
    for p in points {
        count += 1;
        let v = f.evaluate(&p.coords());
        for (k, acc) in values.iter_mut() {
            *acc += numeric::rat_pow(&v, *k);
        }
    }
    MomentVector { count, values }
}

/// `L_k = ⌈(S_k / N)^(1/k)⌉`, `U_k = ⌊S_k^(1/k)⌋`.
pub fn bounds_from_moments(count: &ExactInt, moment: &ExactRat, k: u32) -> Result<BoundsPair> {
    if k < 1 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if !count.is_positive() {
        return Err(Error::EmptyFeasibleSet);
    }
    let lower = ikth_root_ceil(&(moment / rat_from_int(count)), k)?;
    let upper = ikth_root_floor(moment, k)?;
    Ok(BoundsPair { k, lower, upper })
}

/// Bounds on `max f` over `P ∩ Z^d` from the `k`-th moment.
///
/// `f` must have integer coefficients and be non-negative on the lattice
/// points.
pub fn bounds(p: &Polytope, f: &Polynomial, k: u32) -> Result<BoundsPair> {
    if k < 1 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    require_integral(f)?;
    let mv = moment_vector(p.enumerate_grid_points(&ExactInt::one())?, f, &[k]);
    bounds_from_moments(&mv.count, &mv.values[&k], k)
}

/// Smallest `k >= 1` with `N <= (1 + ε)^k`, i.e. `N^(1/k) <= 1 + ε`.
pub fn choose_k(epsilon: &ExactRat, count: &ExactInt) -> Result<u32> {
    check_epsilon(epsilon)?;
    if !count.is_positive() {
        return Err(Error::Domain("point count must be positive".into()));
    }
    let n = rat_from_int(count);
    let base = ExactRat::one() + epsilon;
    let mut power = base.clone();
    let mut k = 1u32;
    while power < n {
        power *= &base;
        k += 1;
    }
    Ok(k)
}

pub(crate) fn check_epsilon(epsilon: &ExactRat) -> Result<()> {
    if epsilon.is_positive() && *epsilon < ExactRat::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "epsilon must lie in (0, 1), got {}",
            numeric::format_rat(epsilon)
        )))
    }
}

fn require_integral(f: &Polynomial) -> Result<()> {
    if f.has_integer_coefficients() {
        Ok(())
    } else {
        Err(Error::Precondition("objective must have integer coefficients".into()))
    }
}

/// Finds `x ∈ P ∩ Z^d` with `f(x) >= (1 - ε) f*` by moment-guided bisection.
pub fn bisection_solve(p: &Polytope, f: &Polynomial, epsilon: &ExactRat) -> Result<Solution> {
    check_epsilon(epsilon)?;
    require_integral(f)?;
    let points: Vec<MixedPoint> = p.enumerate_grid_points(&ExactInt::one())?.collect();
    let coords: Vec<Vec<ExactInt>> = points.iter().map(integer_coords).collect();
    let values: Vec<ExactInt> = coords.iter().map(|c| f.evaluate_integral(c)).collect();
    let (idx, cert) = descend(&coords, &values, epsilon)?;
    let point = points[idx].clone();
    Ok(Solution {
        value: rat_from_int(&values[idx]),
        point,
        guarantee: Guarantee {
            kind: GuaranteeKind::Fptas,
            epsilon: epsilon.clone(),
        },
        certificate: Some(Certificate::Descent(cert)),
    })
}

fn integer_coords(p: &MixedPoint) -> Vec<ExactInt> {
    p.x.iter()
        .map(|v| {
            debug_assert!(v.is_integer());
            v.to_integer()
        })
        .chain(p.z.iter().cloned())
        .collect()
}

/// Number of halvings that can reduce an integer interval of `width` points
/// to one point: `⌈log2 width⌉`.
fn halvings(width: &ExactInt) -> u32 {
    if *width <= ExactInt::one() {
        0
    } else {
        (width - 1u32).bits() as u32
    }
}

/// Moment-guided bisection over integer points with non-negative integer
/// values. Returns the index of the chosen point and its certificate.
///
/// `k` is fixed up front so that `2^B (1 - ε)^k <= 1`, where `B` bounds the
/// number of splits (`Σ ⌈log2 width_i⌉` over the bounding box). Each split
/// on the longest axis keeps the half with the larger exact moment sum
/// (ties keep the lower half), losing at most a factor 2 of the sum.
pub(crate) fn descend(
    coords: &[Vec<ExactInt>],
    values: &[ExactInt],
    epsilon: &ExactRat,
) -> Result<(usize, DescentCertificate)> {
    check_epsilon(epsilon)?;
    if coords.is_empty() {
        return Err(Error::EmptyFeasibleSet);
    }
    if let Some(v) = values.iter().find(|v| v.is_negative()) {
        return Err(Error::NegativeObjective { value: v.to_string() });
    }
    let dims = coords[0].len();
    let mut lo: Vec<ExactInt> = (0..dims)
        .map(|j| coords.iter().map(|c| c[j].clone()).min().unwrap())
        .collect();
    let mut hi: Vec<ExactInt> = (0..dims)
        .map(|j| coords.iter().map(|c| c[j].clone()).max().unwrap())
        .collect();
    let budget: u32 = lo.iter().zip(&hi).map(|(l, h)| halvings(&(h - l + 1u32))).sum();

    let shrink = ExactRat::one() - epsilon;
    let limit = rat_from_int(&(ExactInt::one() << budget)).recip();
    let mut k = 1u32;
    let mut power = shrink.clone();
    while power > limit {
        power *= &shrink;
        k += 1;
    }

    let moment = |idx: &[usize]| -> ExactInt {
        idx.iter()
            .map(|&i| Pow::pow(&values[i], k))
            .fold(ExactInt::zero(), |acc, v| acc + v)
    };

    let mut live: Vec<usize> = (0..coords.len()).collect();
    let root_moment = moment(&live);
    let mut current = root_moment.clone();
    let mut splits = 0u32;
    while live.len() > 1 {
        let axis = (0..dims)
            .max_by(|&a, &b| (&hi[a] - &lo[a]).cmp(&(&hi[b] - &lo[b])).then(b.cmp(&a)))
            .expect("at least one axis");
        debug_assert!(hi[axis] > lo[axis]);
        let mid: ExactInt = num_integer::Integer::div_floor(&(&lo[axis] + &hi[axis]), &ExactInt::from(2));
        let (lower, upper): (Vec<usize>, Vec<usize>) =
            live.iter().partition(|&&i| coords[i][axis] <= mid);
        if upper.is_empty() {
            hi[axis] = mid;
            continue;
        }
        if lower.is_empty() {
            lo[axis] = mid + 1;
            continue;
        }
        splits += 1;
        let lower_moment = moment(&lower);
        let upper_moment = &current - &lower_moment;
        if lower_moment >= upper_moment {
            live = lower;
            current = lower_moment;
            hi[axis] = mid;
        } else {
            live = upper;
            current = upper_moment;
            lo[axis] = mid + 1;
        }
    }
    let idx = live[0];
    debug_assert!(splits <= budget);
    let cert = DescentCertificate {
        epsilon: epsilon.clone(),
        k,
        point_count: ExactInt::from(coords.len()),
        root_moment,
        splits,
        final_value: values[idx].clone(),
    };
    debug_assert_eq!(cert.replay(), Ok(()));
    Ok((idx, cert))
}

/// Exact maximum and minimum by exhaustive evaluation; ties go to the
/// earliest point in enumeration order.
pub fn oracle_optimize<I>(points: I, f: &Polynomial) -> Result<OracleResult>
where
    I: IntoIterator<Item = MixedPoint>,
{
    let mut best: Option<((MixedPoint, ExactRat), (MixedPoint, ExactRat))> = None;
    for p in points {
        let v = f.evaluate(&p.coords());
        match &mut best {
            None => best = Some(((p.clone(), v.clone()), (p, v))),
            Some((max, min)) => {
                if v > max.1 {
                    *max = (p.clone(), v.clone());
                }
                if v < min.1 {
                    *min = (p, v);
                }
            }
        }
    }
    let ((pmax, vmax), (pmin, vmin)) = best.ok_or(Error::EmptyFeasibleSet)?;
    Ok(OracleResult {
        max: Solution::exact(pmax, vmax, GuaranteeKind::Oracle),
        min: Solution::exact(pmin, vmin, GuaranteeKind::Oracle),
    })
}
