//! Random instance generators and brute-force oracles shared by the
//! integration suites. The oracles scan the full bounding box and filter by
//! the constraints, so they do not depend on the library's enumeration.

#![allow(dead_code)]

use mipo_core::integer_opt::oracle_optimize;
use mipo_core::mixed_opt::make_grid_plan;
use mipo_core::numeric::{rat, rat_from_int};
use mipo_core::{ExactInt, ExactRat, MixedPoint, Polynomial, Polytope};
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn int(v: i64) -> ExactInt {
    ExactInt::from(v)
}

/// A random polytope inside a box of half-width `half`: box rows for every
/// coordinate plus up to `extra` random cuts that keep an anchor point
/// feasible. The anchor has integral coordinates, so the mixed-integer set
/// is never empty.
pub fn random_polytope(rng: &mut StdRng, d1: usize, d2: usize, half: i64, extra: usize) -> Polytope {
    let d = d1 + d2;
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut rhs: Vec<i64> = Vec::new();
    let mut anchor = Vec::with_capacity(d);
    for j in 0..d {
        let lo = rng.gen_range(-half..=half);
        let hi = rng.gen_range(lo..=half);
        anchor.push(rng.gen_range(lo..=hi));
        let mut up = vec![0; d];
        up[j] = 1;
        rows.push(up);
        rhs.push(hi);
        let mut down = vec![0; d];
        down[j] = -1;
        rows.push(down);
        rhs.push(-lo);
    }
    for _ in 0..rng.gen_range(0..=extra) {
        let row: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
        if row.iter().all(|&c| c == 0) {
            continue;
        }
        let at_anchor: i64 = row.iter().zip(&anchor).map(|(c, v)| c * v).sum();
        rows.push(row);
        rhs.push(at_anchor + rng.gen_range(0..=3));
    }
    let a: Vec<Vec<ExactInt>> = rows.iter().map(|r| r[..d1].iter().map(|&v| int(v)).collect()).collect();
    let b: Vec<Vec<ExactInt>> = rows.iter().map(|r| r[d1..].iter().map(|&v| int(v)).collect()).collect();
    Polytope::new(d1, d2, a, b, rhs.iter().map(|&v| int(v)).collect()).unwrap()
}

/// A random integer-coefficient polynomial with 1 to `terms` terms;
/// `max_x_degree` caps the degree
/// in the first `d1` variables jointly.
pub fn random_polynomial(
    rng: &mut StdRng,
    dims: usize,
    d1: usize,
    max_degree: u32,
    max_x_degree: u32,
    coeff: i64,
    terms: usize,
) -> Polynomial {
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(1..=terms) {
        let mut e = vec![0u32; dims];
        let total = rng.gen_range(0..=max_degree);
        for _ in 0..total {
            let j = rng.gen_range(0..dims);
            let x_deg: u32 = e[..d1].iter().sum();
            if j < d1 && x_deg >= max_x_degree {
                continue;
            }
            e[j] += 1;
        }
        let c = loop {
            let c = rng.gen_range(-coeff..=coeff);
            if c != 0 {
                break c;
            }
        };
        out.push((e, rat(c, 1)));
    }
    Polynomial::from_terms(dims, out).unwrap()
}

/// Every point of `P ∩ ((1/m)Z^d1 × Z^d2)`, by scanning the box
/// `[-M, M]^d` and testing membership; sorted lexicographically in `(z, x)`.
pub fn brute_points(p: &Polytope, m: &ExactInt) -> Vec<MixedPoint> {
    let bound = p.checked_bound().unwrap().to_integer();
    let mut axes: Vec<Vec<ExactRat>> = Vec::new();
    let mr = rat_from_int(m);
    for _ in 0..p.d1() {
        let lim = &bound * m;
        let mut v = Vec::new();
        let mut t = -lim.clone();
        while t <= lim {
            v.push(rat_from_int(&t) / &mr);
            t += 1;
        }
        axes.push(v);
    }
    for _ in 0..p.d2() {
        let mut v = Vec::new();
        let mut t = -bound.clone();
        while t <= bound {
            v.push(rat_from_int(&t));
            t += 1;
        }
        axes.push(v);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; axes.len()];
    if axes.iter().any(|a| a.is_empty()) {
        return out;
    }
    loop {
        let coords: Vec<ExactRat> = idx.iter().enumerate().map(|(j, &i)| axes[j][i].clone()).collect();
        let x = coords[..p.d1()].to_vec();
        let z: Vec<ExactInt> = coords[p.d1()..].iter().map(|c| c.to_integer()).collect();
        if p.contains(&x, &z) {
            out.push(MixedPoint::new(x, z, m.clone()));
        }
        let mut j = axes.len();
        loop {
            if j == 0 {
                out.sort();
                return out;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < axes[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Exact `(min, max)` of `f` over `P ∩ (R^d1 × Z^d2)` for `d1 <= 1` and
/// `f` affine in `x`: the extremes of each slice sit at its endpoints.
pub fn exact_extremes(p: &Polytope, f: &Polynomial) -> Option<(ExactRat, ExactRat)> {
    assert!(p.d1() <= 1);
    let bound = p.checked_bound().ok()?.to_integer();
    let mut best: Option<(ExactRat, ExactRat)> = None;
    let zs = brute_integer_box(p.d2(), &bound);
    for z in zs {
        let mut lo: Option<ExactRat> = None;
        let mut hi: Option<ExactRat> = None;
        let mut ok = true;
        for i in 0..p.num_rows() {
            let shift: ExactInt = p.b()[i].iter().zip(&z).map(|(c, v)| c * v).sum();
            let r = rat_from_int(&(&p.rhs()[i] - shift));
            let a = if p.d1() == 1 { p.a()[i][0].clone() } else { ExactInt::zero() };
            if a.is_zero() {
                ok &= !r.is_negative();
            } else if a.is_positive() {
                let v = r / rat_from_int(&a);
                hi = Some(hi.map_or(v.clone(), |h| h.min(v)));
            } else {
                let v = r / rat_from_int(&a);
                lo = Some(lo.map_or(v.clone(), |l| l.max(v)));
            }
        }
        if !ok {
            continue;
        }
        let candidates: Vec<Vec<ExactRat>> = if p.d1() == 0 {
            vec![Vec::new()]
        } else {
            let (l, h) = (lo.expect("bounded slice"), hi.expect("bounded slice"));
            if l > h {
                continue;
            }
            vec![vec![l], vec![h]]
        };
        for x in candidates {
            let coords: Vec<ExactRat> = x.iter().cloned().chain(z.iter().map(rat_from_int)).collect();
            let v = f.evaluate(&coords);
            best = Some(match best {
                None => (v.clone(), v),
                Some((mn, mx)) => (mn.min(v.clone()), mx.max(v)),
            });
        }
    }
    best
}

fn brute_integer_box(d: usize, bound: &ExactInt) -> Vec<Vec<ExactInt>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::new();
        for prefix in &out {
            let mut t = -bound.clone();
            while t <= *bound {
                let mut p = prefix.clone();
                p.push(t.clone());
                next.push(p);
                t += 1;
            }
        }
        out = next;
    }
    out
}

/// Grid-size estimate of the plan at `epsilon`, for filtering instances.
pub fn plan_size(p: &Polytope, f: &Polynomial, epsilon: &ExactRat) -> ExactInt {
    let plan = make_grid_plan(p, f, epsilon).unwrap();
    p.grid_size_estimate(&plan.m)
}

/// A pure-integer instance with its lattice optimum.
pub struct IntegerCase {
    pub polytope: Polytope,
    pub objective: Polynomial,
    pub fstar: ExactRat,
    pub count: ExactInt,
}

/// Pure-integer instances in `[-3, 3]^d`, `d <= 2`, coefficients in
/// `[-3, 3]`, shifted by the lattice minimum so they are non-negative.
/// Objectives constant on the lattice points are skipped.
pub fn integer_corpus(seed: u64, size: usize) -> Vec<IntegerCase> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    while out.len() < size {
        let d = rng.gen_range(1..=2);
        let p = random_polytope(&mut rng, 0, d, 3, 2);
        let deg = if d == 1 { 3 } else { 2 };
        let f = random_polynomial(&mut rng, d, 0, deg, 0, 3, 4);
        let pts = brute_points(&p, &ExactInt::one());
        let o = oracle_optimize(pts.iter().cloned(), &f).unwrap();
        if o.max.value == o.min.value {
            continue;
        }
        let shifted = f.add_constant(&-o.min.value.clone());
        out.push(IntegerCase {
            polytope: p,
            objective: shifted,
            fstar: &o.max.value - &o.min.value,
            count: ExactInt::from(pts.len()),
        });
    }
    out
}

/// Mixed instances with `d1 = 1`, objectives affine in `x`, together with
/// their exact extremes.
pub struct MixedCase {
    pub polytope: Polytope,
    pub objective: Polynomial,
    pub fmin: ExactRat,
    pub fmax: ExactRat,
}

pub fn affine_mixed_case(rng: &mut StdRng, max_degree: u32, half: i64) -> MixedCase {
    loop {
        let d2 = rng.gen_range(0..=1);
        let p = random_polytope(rng, 1, d2, half, 1);
        let f = random_polynomial(rng, 1 + d2, 1, max_degree, 1, 3, 3);
        if let Some((fmin, fmax)) = exact_extremes(&p, &f) {
            return MixedCase {
                polytope: p,
                objective: f,
                fmin,
                fmax,
            };
        }
    }
}

pub fn sup_distance(a: &[ExactRat], b: &[ExactRat]) -> ExactRat {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap_or_else(ExactRat::zero)
}
