//! Exact polyhedral geometry for `P = {(x, z) : A x + B z <= b}` with
//! continuous `x` (dimension `d1`) and integer `z` (dimension `d2`).

use std::cmp::Ordering;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, IntRow, Projection};
use crate::numeric::{self, det, lcm_all, rat_from_int, ExactInt, ExactRat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    d1: usize,
    d2: usize,
    a: Vec<Vec<ExactInt>>,
    b: Vec<Vec<ExactInt>>,
    rhs: Vec<ExactInt>,
}

/// A point with `x` on the `1/m` grid and integral `z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MixedPoint {
    #[serde(with = "numeric::rat_vec_string")]
    pub x: Vec<ExactRat>,
    #[serde(with = "numeric::int_vec_string")]
    pub z: Vec<ExactInt>,
    #[serde(with = "numeric::int_string")]
    pub grid_denominator: ExactInt,
}

/// Vertices of a polytope or slice, sorted lexicographically.
pub type VertexSet = Vec<Vec<ExactRat>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validation {
    pub feasible: bool,
    pub bounded: bool,
    /// Integer bound on every coordinate's absolute value; meaningful only
    /// when feasible and bounded.
    pub bound: ExactRat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOptimum {
    pub value: ExactRat,
    pub point: Vec<ExactRat>,
}

impl MixedPoint {
    pub fn new(x: Vec<ExactRat>, z: Vec<ExactInt>, grid_denominator: ExactInt) -> Self {
        debug_assert!(x
            .iter()
            .all(|xi| (xi * rat_from_int(&grid_denominator)).is_integer()));
        Self {
            x,
            z,
            grid_denominator,
        }
    }

    /// All coordinates in polynomial variable order: `x` then `z`.
    pub fn coords(&self) -> Vec<ExactRat> {
        self.x
            .iter()
            .cloned()
            .chain(self.z.iter().map(rat_from_int))
            .collect()
    }

    pub fn is_on_grid(&self) -> bool {
        let m = rat_from_int(&self.grid_denominator);
        self.x.iter().all(|xi| (xi * &m).is_integer())
    }
}

/// Enumeration order: lexicographic over `(z, x)`.
impl Ord for MixedPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.z.cmp(&other.z).then_with(|| self.x.cmp(&other.x))
    }
}

impl PartialOrd for MixedPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Polytope {
    pub fn new(
        d1: usize,
        d2: usize,
        a: Vec<Vec<ExactInt>>,
        b: Vec<Vec<ExactInt>>,
        rhs: Vec<ExactInt>,
    ) -> Result<Self> {
        let p = rhs.len();
        if a.len() != p || b.len() != p {
            return Err(Error::Parse(format!(
                "A has {} rows and B has {} rows but b has {} entries",
                a.len(),
                b.len(),
                p
            )));
        }
        if let Some(i) = a.iter().position(|r| r.len() != d1) {
            return Err(Error::Parse(format!("row {i} of A has length {}, expected d1 = {d1}", a[i].len())));
        }
        if let Some(i) = b.iter().position(|r| r.len() != d2) {
            return Err(Error::Parse(format!("row {i} of B has length {}, expected d2 = {d2}", b[i].len())));
        }
        Ok(Self { d1, d2, a, b, rhs })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(d1: usize, d2: usize, a: &[&[i64]], b: &[&[i64]], rhs: &[i64]) -> Result<Self> {
        let conv = |m: &[&[i64]]| -> Vec<Vec<ExactInt>> {
            m.iter().map(|r| r.iter().map(|&v| ExactInt::from(v)).collect()).collect()
        };
        Self::new(d1, d2, conv(a), conv(b), rhs.iter().map(|&v| ExactInt::from(v)).collect())
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn dims(&self) -> usize {
        self.d1 + self.d2
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn a(&self) -> &[Vec<ExactInt>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<ExactInt>] {
        &self.b
    }

    pub fn rhs(&self) -> &[ExactInt] {
        &self.rhs
    }

    /// Rows `[A_i | B_i]` over the variables `(x, z)`.
    fn full_rows(&self) -> Vec<Vec<ExactRat>> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(ra, rb)| ra.iter().chain(rb).map(rat_from_int).collect())
            .collect()
    }

    fn rhs_rat(&self) -> Vec<ExactRat> {
        self.rhs.iter().map(rat_from_int).collect()
    }

    /// Exact membership test for `(x, z)`.
    pub fn contains(&self, x: &[ExactRat], z: &[ExactInt]) -> bool {
        assert_eq!(x.len(), self.d1);
        assert_eq!(z.len(), self.d2);
        self.a.iter().zip(&self.b).zip(&self.rhs).all(|((ra, rb), bi)| {
            let lhs = ra
                .iter()
                .zip(x)
                .fold(ExactRat::zero(), |acc, (c, v)| acc + rat_from_int(c) * v)
                + rat_from_int(&rb.iter().zip(z).fold(ExactInt::zero(), |acc, (c, v)| acc + c * v));
            lhs <= rat_from_int(bi)
        })
    }

    pub fn contains_point(&self, p: &MixedPoint) -> bool {
        self.contains(&p.x, &p.z)
    }

    /// Vertices of `P` in `(x, z)` coordinates.
    pub fn vertices(&self) -> VertexSet {
        linalg::vertices(&self.full_rows(), &self.rhs_rat(), self.dims())
    }

    pub fn validate(&self) -> Validation {
        let rows: Vec<IntRow> = self.int_rows();
        let feasible = linalg::project(&rows, self.dims(), false).consistent;
        let full = self.full_rows();
        let n = self.dims();
        let bounded = (0..n).all(|j| {
            [ExactRat::one(), -ExactRat::one()].iter().all(|s| {
                let mut dir = vec![ExactRat::zero(); n];
                dir[j] = s.clone();
                linalg::in_cone(&full, &dir)
            })
        });
        let bound = if feasible && bounded {
            let max_abs = self
                .vertices()
                .iter()
                .flat_map(|v| v.iter().map(|c| c.abs()))
                .max()
                .unwrap_or_else(ExactRat::zero);
            rat_from_int(&numeric::ceil_to_int(&max_abs))
        } else {
            ExactRat::zero()
        };
        Validation {
            feasible,
            bounded,
            bound,
        }
    }

    /// Validates and returns the coordinate bound `M`, or the reason the
    /// polytope cannot be optimized over.
    pub fn checked_bound(&self) -> Result<ExactRat> {
        let v = self.validate();
        if !v.feasible {
            Err(Error::Infeasible)
        } else if !v.bounded {
            Err(Error::Unbounded)
        } else {
            Ok(v.bound)
        }
    }

    fn int_rows(&self) -> Vec<IntRow> {
        self.a
            .iter()
            .zip(&self.b)
            .zip(&self.rhs)
            .map(|((ra, rb), bi)| IntRow {
                coeffs: ra.iter().chain(rb).cloned().collect(),
                rhs: bi.clone(),
            })
            .collect()
    }

    /// Exact linear optimization by basic-solution enumeration. Ties go to
    /// the lexicographically smallest optimizer.
    pub fn lp_extreme(&self, objective: &[ExactRat], sense: Sense) -> Result<LpOptimum> {
        assert_eq!(objective.len(), self.dims(), "objective has wrong dimension");
        let v = self.validate();
        if !v.feasible {
            return Err(Error::Infeasible);
        }
        let dir: Vec<ExactRat> = match sense {
            Sense::Maximize => objective.to_vec(),
            Sense::Minimize => objective.iter().map(|c| -c).collect(),
        };
        if !linalg::in_cone(&self.full_rows(), &dir) {
            return Err(Error::Unbounded);
        }
        let verts = self.vertices();
        if verts.is_empty() {
            // Feasible with bounded objective but no vertex: a lineality
            // space exists, which validated polytopes never have.
            return Err(Error::Unbounded);
        }
        let mut best: Option<LpOptimum> = None;
        for p in verts {
            let value = linalg::dot(objective, &p);
            let better = match &best {
                None => true,
                Some(b) => match sense {
                    Sense::Maximize => value > b.value,
                    Sense::Minimize => value < b.value,
                },
            };
            if better {
                best = Some(LpOptimum { value, point: p });
            }
        }
        Ok(best.expect("vertex list is nonempty"))
    }

    /// `Δ`: lcm of `|det|` over all nonsingular `d1 x d1` submatrices of `A`.
    pub fn integral_scaling_factor(&self) -> ExactInt {
        if self.d1 == 0 {
            return ExactInt::one();
        }
        let dets: Vec<ExactInt> = (0..self.a.len())
            .combinations(self.d1)
            .map(|rows| {
                let m: Vec<Vec<ExactInt>> = rows.iter().map(|&i| self.a[i].clone()).collect();
                det(&m)
            })
            .filter(|d| !d.is_zero())
            .collect();
        lcm_all(&dets)
    }

    /// Vertices of the slice `P_z = {x : A x <= b - B z}`.
    pub fn slice_vertices(&self, z: &[ExactInt]) -> VertexSet {
        assert_eq!(z.len(), self.d2);
        let rows: Vec<Vec<ExactRat>> = self
            .a
            .iter()
            .map(|r| r.iter().map(rat_from_int).collect())
            .collect();
        let rhs: Vec<ExactRat> = self
            .b
            .iter()
            .zip(&self.rhs)
            .map(|(rb, bi)| {
                rat_from_int(&(bi - rb.iter().zip(z).fold(ExactInt::zero(), |acc, (c, v)| acc + c * v)))
            })
            .collect();
        linalg::vertices(&rows, &rhs, self.d1)
    }

    /// Every point of `P ∩ ((1/m)Z^d1 × Z^d2)` once, lexicographic in `(z, x)`.
    pub fn enumerate_grid_points(&self, m: &ExactInt) -> Result<GridPoints> {
        if !m.is_positive() {
            return Err(Error::Domain(format!("grid size must be positive, got {m}")));
        }
        // Scaled integer system over (z, x̃) with x = x̃ / m:
        //   m B z + A x̃ <= m b
        let rows: Vec<IntRow> = self
            .a
            .iter()
            .zip(&self.b)
            .zip(&self.rhs)
            .map(|((ra, rb), bi)| IntRow {
                coeffs: rb.iter().map(|c| c * m).chain(ra.iter().cloned()).collect(),
                rhs: bi * m,
            })
            .collect();
        let lattice = LatticePoints::new(&rows, self.dims())?;
        Ok(GridPoints {
            inner: lattice,
            d2: self.d2,
            m: m.clone(),
        })
    }

    /// Number of points of `P ∩ ((1/m)Z^d1 × Z^d2)`.
    pub fn count_grid_points(&self, m: &ExactInt) -> Result<u64> {
        Ok(self.enumerate_grid_points(m)?.count() as u64)
    }

    /// Per-coordinate `[min, max]` over `P`, in `(x, z)` order.
    pub fn coordinate_ranges(&self) -> Vec<(ExactRat, ExactRat)> {
        let verts = self.vertices();
        (0..self.dims())
            .map(|j| {
                let lo = verts.iter().map(|v| v[j].clone()).min().unwrap_or_else(ExactRat::zero);
                let hi = verts.iter().map(|v| v[j].clone()).max().unwrap_or_else(ExactRat::zero);
                (lo, hi)
            })
            .collect()
    }

    /// Upper estimate of the number of grid points: the size of the grid box
    /// spanned by the coordinate ranges.
    pub fn grid_size_estimate(&self, m: &ExactInt) -> ExactInt {
        let mr = rat_from_int(m);
        self.coordinate_ranges()
            .iter()
            .enumerate()
            .map(|(j, (lo, hi))| {
                let scale = if j < self.d1 { mr.clone() } else { ExactRat::one() };
                numeric::floor_to_int(&(hi * &scale)) - numeric::ceil_to_int(&(lo * &scale)) + 1
            })
            .map(|w: ExactInt| if w.is_negative() { ExactInt::zero() } else { w })
            .product()
    }

    /// Rounds a mixed-integer point `(x*, z*)` of `P` to a point of the
    /// `1/m` grid in the same slice, within `δ` in the sup norm.
    ///
    /// `m` must be `kΔ` with `k >= (2/δ) d1 M`.
    pub fn mixed_round(
        &self,
        delta_scale: &ExactInt,
        x: &[ExactRat],
        z: &[ExactInt],
        delta: &ExactRat,
        m: &ExactInt,
    ) -> Result<MixedPoint> {
        if !delta.is_positive() {
            return Err(Error::Domain("rounding distance must be positive".into()));
        }
        if !delta_scale.is_positive() || !m.is_positive() || !m.is_multiple_of(delta_scale) {
            return Err(Error::Precondition(format!(
                "grid size {m} is not a positive multiple of the scaling factor {delta_scale}"
            )));
        }
        if !self.contains(x, z) {
            return Err(Error::Precondition("target point is not in the polytope".into()));
        }
        if self.d1 == 0 {
            return Ok(MixedPoint::new(Vec::new(), z.to_vec(), m.clone()));
        }
        let bound = self.checked_bound()?;
        let k = m / delta_scale;
        let needed = ExactRat::from_integer(ExactInt::from(2 * self.d1)) * &bound / delta;
        if rat_from_int(&k) < needed {
            return Err(Error::Precondition(format!(
                "k = {k} is below (2/δ) d1 M = {}",
                numeric::format_rat(&needed)
            )));
        }
        let ds = rat_from_int(delta_scale);
        let scaled_vertices: Vec<Vec<ExactInt>> = self
            .slice_vertices(z)
            .into_iter()
            .map(|v| {
                v.iter()
                    .map(|c| {
                        let s = c * &ds;
                        if s.is_integer() {
                            Ok(s.to_integer())
                        } else {
                            Err(Error::Precondition(format!(
                                "scaled slice has non-integral vertex coordinate {}",
                                numeric::format_rat(&s)
                            )))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let target: Vec<ExactRat> = x.iter().map(|c| c * &ds).collect();
        let rounded = caratheodory_round(&scaled_vertices, &target, &k)?;
        let x_new = rounded.iter().map(|c| c / &ds).collect();
        Ok(MixedPoint::new(x_new, z.to_vec(), m.clone()))
    }
}

/// Snaps `target` (a point of the integral polytope with the given vertices)
/// to a point of `conv(vertices) ∩ (1/k)Z^n` by flooring its convex
/// multipliers to multiples of `1/k`; the first vertex in the support absorbs
/// the residual weight.
pub fn caratheodory_round(
    vertices: &[Vec<ExactInt>],
    target: &[ExactRat],
    k: &ExactInt,
) -> Result<Vec<ExactRat>> {
    if !k.is_positive() {
        return Err(Error::Domain(format!("grid refinement must be positive, got {k}")));
    }
    let n = target.len();
    let lambda = convex_multipliers(vertices, target)
        .ok_or_else(|| Error::Precondition("target point is not in the polytope".into()))?;
    let kr = rat_from_int(k);
    let support: Vec<usize> = (0..vertices.len()).filter(|&i| !lambda[i].is_zero()).collect();
    let mut rounded = vec![ExactRat::zero(); vertices.len()];
    let mut used = ExactRat::zero();
    for &i in &support[1..] {
        let l = numeric::floor_to_int(&(&lambda[i] * &kr));
        rounded[i] = ExactRat::new(l, k.clone());
        used += &rounded[i];
    }
    rounded[support[0]] = ExactRat::one() - used;
    Ok((0..n)
        .map(|j| {
            support.iter().fold(ExactRat::zero(), |acc, &i| {
                acc + &rounded[i] * rat_from_int(&vertices[i][j])
            })
        })
        .collect())
}

// A basic feasible solution of {V λ = x, Σλ = 1, λ >= 0}.
fn convex_multipliers(vertices: &[Vec<ExactInt>], target: &[ExactRat]) -> Option<Vec<ExactRat>> {
    let n = target.len();
    let cols = vertices.len();
    if cols == 0 {
        return None;
    }
    let mut eq_rows: Vec<Vec<ExactRat>> = (0..n)
        .map(|j| vertices.iter().map(|v| rat_from_int(&v[j])).collect())
        .collect();
    eq_rows.push(vec![ExactRat::one(); cols]);
    let mut eq_rhs: Vec<ExactRat> = target.to_vec();
    eq_rhs.push(ExactRat::one());

    let basis_rows = linalg::independent_rows(&eq_rows);
    let r = basis_rows.len();
    for subset in (0..cols).combinations(r) {
        let m: Vec<Vec<ExactRat>> = basis_rows
            .iter()
            .map(|&i| subset.iter().map(|&c| eq_rows[i][c].clone()).collect())
            .collect();
        let b: Vec<ExactRat> = basis_rows.iter().map(|&i| eq_rhs[i].clone()).collect();
        let Some(sol) = linalg::solve(&m, &b) else { continue };
        if sol.iter().any(|l| l.is_negative()) {
            continue;
        }
        let mut lambda = vec![ExactRat::zero(); cols];
        for (&c, l) in subset.iter().zip(sol) {
            lambda[c] = l;
        }
        let consistent = eq_rows
            .iter()
            .zip(&eq_rhs)
            .all(|(row, rhs)| linalg::dot(row, &lambda) == *rhs);
        if consistent {
            return Some(lambda);
        }
    }
    None
}

/// Streaming enumeration of the integer points of `{y : rows · y <= rhs}`,
/// lexicographic in `y`.
#[derive(Debug, Clone)]
pub struct LatticePoints {
    levels: Vec<Vec<IntRow>>,
    values: Vec<ExactInt>,
    upper: Vec<ExactInt>,
    state: EnumState,
}

#[derive(Debug, Clone, Copy)]
enum EnumState {
    Enter(usize),
    Advance(usize),
    Done,
}

impl LatticePoints {
    fn new(rows: &[IntRow], n: usize) -> Result<Self> {
        let Projection { levels, consistent } = linalg::project(rows, n, true);
        if consistent {
            for (j, level) in levels.iter().enumerate() {
                let has_upper = level.iter().any(|r| r.coeffs[j].is_positive());
                let has_lower = level.iter().any(|r| r.coeffs[j].is_negative());
                if !(has_upper && has_lower) {
                    return Err(Error::Unbounded);
                }
            }
        }
        Ok(Self {
            levels,
            values: vec![ExactInt::zero(); n],
            upper: vec![ExactInt::zero(); n],
            state: if consistent { EnumState::Enter(0) } else { EnumState::Done },
        })
    }

    // Integer range of y_level given the fixed prefix.
    fn interval(&self, level: usize) -> Option<(ExactInt, ExactInt)> {
        let mut lo: Option<ExactInt> = None;
        let mut hi: Option<ExactInt> = None;
        for row in &self.levels[level] {
            let c = &row.coeffs[level];
            let t = row.coeffs[..level]
                .iter()
                .zip(&self.values[..level])
                .fold(row.rhs.clone(), |acc, (a, y)| acc - a * y);
            if c.is_positive() {
                let v = t.div_floor(c);
                if hi.as_ref().map_or(true, |h| v < *h) {
                    hi = Some(v);
                }
            } else {
                let v = -((-t).div_floor(c));
                if lo.as_ref().map_or(true, |l| v > *l) {
                    lo = Some(v);
                }
            }
        }
        let (lo, hi) = (lo?, hi?);
        (lo <= hi).then_some((lo, hi))
    }
}

impl Iterator for LatticePoints {
    type Item = Vec<ExactInt>;

    fn next(&mut self) -> Option<Vec<ExactInt>> {
        let n = self.levels.len();
        loop {
            match self.state {
                EnumState::Done => return None,
                EnumState::Enter(l) if l == n => {
                    self.state = if n == 0 {
                        EnumState::Done
                    } else {
                        EnumState::Advance(n - 1)
                    };
                    return Some(self.values.clone());
                }
                EnumState::Enter(l) => {
                    self.state = match self.interval(l) {
                        Some((lo, hi)) => {
                            self.values[l] = lo;
                            self.upper[l] = hi;
                            EnumState::Enter(l + 1)
                        }
                        None if l == 0 => EnumState::Done,
                        None => EnumState::Advance(l - 1),
                    };
                }
                EnumState::Advance(l) => {
                    self.state = if self.values[l] < self.upper[l] {
                        self.values[l] += 1;
                        EnumState::Enter(l + 1)
                    } else if l == 0 {
                        EnumState::Done
                    } else {
                        EnumState::Advance(l - 1)
                    };
                }
            }
        }
    }
}

/// Grid points of a mixed polytope; see [`Polytope::enumerate_grid_points`].
#[derive(Debug, Clone)]
pub struct GridPoints {
    inner: LatticePoints,
    d2: usize,
    m: ExactInt,
}

impl Iterator for GridPoints {
    type Item = MixedPoint;

    fn next(&mut self) -> Option<MixedPoint> {
        let y = self.inner.next()?;
        let (z, xt) = y.split_at(self.d2);
        let x = xt.iter().map(|v| ExactRat::new(v.clone(), self.m.clone())).collect();
        Some(MixedPoint {
            x,
            z: z.to_vec(),
            grid_denominator: self.m.clone(),
        })
    }
}
