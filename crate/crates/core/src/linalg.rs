//! Small exact dense linear algebra over the rationals, plus Fourier–Motzkin
//! projection of integer inequality systems.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numeric::{ExactInt, ExactRat};

/// Solves the square system `matrix * x = rhs`; `None` when singular.
pub(crate) fn solve(matrix: &[Vec<ExactRat>], rhs: &[ExactRat]) -> Option<Vec<ExactRat>> {
    let n = matrix.len();
    debug_assert!(matrix.iter().all(|r| r.len() == n));
    let mut a: Vec<Vec<ExactRat>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col][col..].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let factor = a[i][col].clone();
                for j in col..=n {
                    let delta = &factor * &a[col][j];
                    a[i][j] -= delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Indices of a maximal linearly independent subset of `rows`, chosen greedily
/// in order.
pub(crate) fn independent_rows(rows: &[Vec<ExactRat>]) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<ExactRat>)> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        for (pivot, b) in &basis {
            if !v[*pivot].is_zero() {
                let factor = &v[*pivot] / &b[*pivot];
                for (vj, bj) in v.iter_mut().zip(b) {
                    *vj -= &factor * bj;
                }
            }
        }
        if let Some(pivot) = v.iter().position(|c| !c.is_zero()) {
            basis.push((pivot, v));
            chosen.push(idx);
        }
    }
    chosen
}

#[cfg(test)]
pub(crate) fn rank(rows: &[Vec<ExactRat>]) -> usize {
    independent_rows(rows).len()
}

/// All basic feasible solutions of `{x in R^n : rows * x <= rhs}`, i.e. the
/// vertices, sorted lexicographically and deduplicated.
pub(crate) fn vertices(rows: &[Vec<ExactRat>], rhs: &[ExactRat], n: usize) -> Vec<Vec<ExactRat>> {
    if n == 0 {
        return if rhs.iter().all(|b| !b.is_negative()) {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut found = std::collections::BTreeSet::new();
    for subset in (0..rows.len()).combinations(n) {
        let m: Vec<Vec<ExactRat>> = subset.iter().map(|&i| rows[i].clone()).collect();
        let b: Vec<ExactRat> = subset.iter().map(|&i| rhs[i].clone()).collect();
        if let Some(x) = solve(&m, &b) {
            if satisfies(rows, rhs, &x) {
                found.insert(x);
            }
        }
    }
    found.into_iter().collect()
}

pub(crate) fn satisfies(rows: &[Vec<ExactRat>], rhs: &[ExactRat], x: &[ExactRat]) -> bool {
    rows.iter().zip(rhs).all(|(row, b)| dot(row, x) <= *b)
}

pub(crate) fn dot(a: &[ExactRat], b: &[ExactRat]) -> ExactRat {
    a.iter().zip(b).fold(ExactRat::zero(), |acc, (x, y)| acc + x * y)
}

/// Whether `direction` is a non-negative combination of `rows`.
pub(crate) fn in_cone(rows: &[Vec<ExactRat>], direction: &[ExactRat]) -> bool {
    let n = direction.len();
    if direction.iter().all(|c| c.is_zero()) {
        return true;
    }
    let basis = independent_rows(rows);
    let r = basis.len();
    if r == 0 {
        return false;
    }
    // Conic Carathéodory: some linearly independent subset suffices. Work in
    // coordinates of the row space when rows do not span R^n.
    let coords = independent_coordinates(rows, n);
    for subset in (0..rows.len()).combinations(r) {
        // Solve sum_i lambda_i rows[i] = direction on the chosen coordinates.
        let m: Vec<Vec<ExactRat>> = coords
            .iter()
            .map(|&c| subset.iter().map(|&i| rows[i][c].clone()).collect())
            .collect();
        let b: Vec<ExactRat> = coords.iter().map(|&c| direction[c].clone()).collect();
        if let Some(lambda) = solve(&m, &b) {
            if lambda.iter().all(|l| !l.is_negative()) {
                let combo: Vec<ExactRat> = (0..n)
                    .map(|c| {
                        subset
                            .iter()
                            .zip(&lambda)
                            .fold(ExactRat::zero(), |acc, (&i, l)| acc + l * &rows[i][c])
                    })
                    .collect();
                if combo == direction {
                    return true;
                }
            }
        }
    }
    false
}

// Coordinates (columns) forming a basis of the column space of `rows`.
fn independent_coordinates(rows: &[Vec<ExactRat>], n: usize) -> Vec<usize> {
    let cols: Vec<Vec<ExactRat>> = (0..n)
        .map(|c| rows.iter().map(|r| r[c].clone()).collect())
        .collect();
    independent_rows(&cols)
}

/// One integer inequality `coeffs . y <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct IntRow {
    pub coeffs: Vec<ExactInt>,
    pub rhs: ExactInt,
}

/// Fourier–Motzkin projections of an integer system onto the leading
/// variables. `levels[j]` constrains `y_0..=y_j` and holds exactly the rows
/// whose coefficient on `y_j` is nonzero (truncated to `j+1` entries).
#[derive(Debug, Clone)]
pub(crate) struct Projection {
    pub levels: Vec<Vec<IntRow>>,
    /// False when elimination produced a violated constant row `0 <= h < 0`.
    pub consistent: bool,
}

/// Projects `rows` (each of length `n`). With `integral`, each derived row is
/// divided by the gcd of its coefficients and its right-hand side rounded
/// down, which preserves every integer solution but not every real one.
pub(crate) fn project(rows: &[IntRow], n: usize, integral: bool) -> Projection {
    let mut current = normalize_all(rows.to_vec(), integral);
    let mut levels: Vec<Vec<IntRow>> = vec![Vec::new(); n];
    let mut consistent = true;
    for j in (0..n).rev() {
        let (mut upper, mut lower, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for row in current {
            match row.coeffs[j].sign() {
                num_bigint::Sign::Plus => upper.push(row),
                num_bigint::Sign::Minus => lower.push(row),
                num_bigint::Sign::NoSign => rest.push(row),
            }
        }
        for u in &upper {
            for l in &lower {
                let cu = u.coeffs[j].clone();
                let cl = -l.coeffs[j].clone();
                let g = cu.gcd(&cl);
                let (fu, fl) = (&cl / &g, &cu / &g);
                let coeffs = u
                    .coeffs
                    .iter()
                    .zip(&l.coeffs)
                    .map(|(a, b)| &fu * a + &fl * b)
                    .collect();
                rest.push(IntRow {
                    coeffs,
                    rhs: &fu * &u.rhs + &fl * &l.rhs,
                });
            }
        }
        levels[j] = upper
            .into_iter()
            .chain(lower)
            .map(|mut r| {
                r.coeffs.truncate(j + 1);
                r
            })
            .collect();
        let (constants, remaining): (Vec<IntRow>, Vec<IntRow>) =
            rest.into_iter().partition(|r| r.coeffs.iter().all(|c| c.is_zero()));
        if constants.iter().any(|r| r.rhs.is_negative()) {
            consistent = false;
        }
        current = normalize_all(
            remaining
                .into_iter()
                .map(|mut r| {
                    r.coeffs.truncate(j);
                    r
                })
                .collect(),
            integral,
        );
    }
    if current.iter().any(|r| r.rhs.is_negative()) {
        consistent = false;
    }
    Projection { levels, consistent }
}

fn normalize_all(rows: Vec<IntRow>, integral: bool) -> Vec<IntRow> {
    // Keep the tightest right-hand side for each normalized direction.
    let mut best: BTreeMap<Vec<ExactInt>, ExactInt> = BTreeMap::new();
    let mut constants = Vec::new();
    for row in rows {
        let g = row
            .coeffs
            .iter()
            .fold(ExactInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() {
            constants.push(row);
            continue;
        }
        let (coeffs, rhs) = if integral {
            let coeffs: Vec<ExactInt> = row.coeffs.iter().map(|c| c / &g).collect();
            (coeffs, row.rhs.div_floor(&g))
        } else {
            let g = g.gcd(&row.rhs);
            let g = if g.is_zero() { ExactInt::one() } else { g };
            let coeffs: Vec<ExactInt> = row.coeffs.iter().map(|c| c / &g).collect();
            (coeffs, &row.rhs / &g)
        };
        // Without rounding, parallel rows only merge when they share a scale.
        best.entry(coeffs)
            .and_modify(|b| {
                if rhs < *b {
                    *b = rhs.clone()
                }
            })
            .or_insert(rhs);
    }
    let mut out: Vec<IntRow> = best
        .into_iter()
        .map(|(coeffs, rhs)| IntRow { coeffs, rhs })
        .collect();
    out.extend(constants);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    fn r(v: i64) -> ExactRat {
        rat(v, 1)
    }

    #[test]
    fn solve_small_system() {
        let m = vec![vec![r(2), r(1)], vec![r(1), r(3)]];
        let x = solve(&m, &[r(3), r(5)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        assert!(solve(&[vec![r(1), r(2)], vec![r(2), r(4)]], &[r(1), r(2)]).is_none());
    }

    #[test]
    fn rank_and_cone() {
        let rows = vec![vec![r(1), r(0)], vec![r(2), r(0)], vec![r(0), r(1)]];
        assert_eq!(rank(&rows), 2);
        assert!(in_cone(&rows, &[r(1), r(1)]));
        assert!(!in_cone(&rows, &[r(-1), r(0)]));
        // rows spanning only a line
        let line = vec![vec![r(1), r(1)], vec![r(-1), r(-1)]];
        assert!(in_cone(&line, &[r(-2), r(-2)]));
        assert!(!in_cone(&line, &[r(1), r(0)]));
    }

    #[test]
    fn vertices_of_unit_square() {
        let rows = vec![
            vec![r(1), r(0)],
            vec![r(-1), r(0)],
            vec![r(0), r(1)],
            vec![r(0), r(-1)],
        ];
        let rhs = vec![r(1), r(0), r(1), r(0)];
        let v = vertices(&rows, &rhs, 2);
        assert_eq!(v.len(), 4);
        assert_eq!(v[0], vec![r(0), r(0)]);
        assert_eq!(v[3], vec![r(1), r(1)]);
    }

    #[test]
    fn projection_detects_inconsistency() {
        let rows = vec![
            IntRow { coeffs: vec![int(1)], rhs: int(0) },
            IntRow { coeffs: vec![int(-1)], rhs: int(-1) },
        ];
        assert!(!project(&rows, 1, false).consistent);
        // 2y <= 1, -2y <= -1 has the real solution 1/2 but no integer one
        let rows = vec![
            IntRow { coeffs: vec![int(2)], rhs: int(1) },
            IntRow { coeffs: vec![int(-2)], rhs: int(-1) },
        ];
        assert!(project(&rows, 1, false).consistent);
        let p = project(&rows, 1, true);
        assert_eq!(p.levels[0].len(), 2);
    }
}
