//! Mixed-integer drivers: the grid problem, the certified grid plan, the
//! FPTAS for non-negative objectives, the constancy decision and the weak
//! FPTAS built on range approximation.

use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integer_opt::{check_epsilon, descend};
use crate::numeric::{self, rat, rat_from_int, ExactInt, ExactRat};
use crate::polynomial::{lipschitz_constant, Polynomial};
use crate::polytope::{MixedPoint, Polytope};
use crate::solution::{
    Certificate, DescentCertificate, FptasCertificate, Guarantee, GuaranteeKind, Solution,
    WeakCertificate,
};

/// Parameters `(M, Δ, C, r, D, L, δ, m)` instantiated for one instance and
/// one `ε`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPlan {
    #[serde(with = "numeric::rat_string")]
    pub epsilon: ExactRat,
    pub d1: usize,
    /// Coordinate bound `M`.
    #[serde(with = "numeric::rat_string")]
    pub bound: ExactRat,
    /// Integral scaling factor `Δ`.
    #[serde(with = "numeric::int_string")]
    pub delta_scale: ExactInt,
    #[serde(with = "numeric::rat_string")]
    pub max_abs_coeff: ExactRat,
    pub terms: usize,
    pub degree: u32,
    #[serde(with = "numeric::rat_string")]
    pub lipschitz: ExactRat,
    /// Rounding distance; absent for the degenerate plan of a constant
    /// polynomial.
    #[serde(with = "numeric::opt_rat_string", default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<ExactRat>,
    #[serde(with = "numeric::int_string")]
    pub m: ExactInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeState {
    pub i: u32,
    #[serde(with = "numeric::rat_string")]
    pub lower: ExactRat,
    #[serde(with = "numeric::rat_string")]
    pub upper: ExactRat,
}

/// The pure-integer instance over `(x̃, z) = (m x, z)`:
/// `A x̃ + m B z <= m b` with objective `m^D f(x̃ / m, z)`.
#[derive(Debug, Clone)]
pub struct GridProblem {
    pub polytope: Polytope,
    pub objective: Polynomial,
    pub m: ExactInt,
    d1: usize,
}

#[derive(Debug, Clone)]
pub struct FptasOptions {
    /// Largest grid (by box estimate) enumerated without an override.
    pub max_grid_points: ExactInt,
    /// Grid size to use instead of the plan's; results are then uncertified.
    pub grid_override: Option<ExactInt>,
}

impl Default for FptasOptions {
    fn default() -> Self {
        Self {
            max_grid_points: ExactInt::from(5_000_000u64),
            grid_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantVerdict {
    pub constant: bool,
    /// Grid the decision scanned.
    pub m: ExactInt,
    /// First feasible grid point and its value.
    pub point: MixedPoint,
    pub value: ExactRat,
    /// A second point whose value differs from `value`.
    pub witness: Option<(MixedPoint, ExactRat)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeTrace {
    pub states: Vec<RangeState>,
    pub plan: GridPlan,
    pub grid_m: ExactInt,
}

impl GridPlan {
    /// Recomputes every derived field from the recorded inputs.
    pub fn replay(&self) -> Result<(), String> {
        let fail = |what: &str| Err(format!("grid plan: {what}"));
        let expected_l = lipschitz_constant(
            &crate::polynomial::CoeffStats {
                max_abs_coeff: self.max_abs_coeff.clone(),
                terms: self.terms,
                degree: self.degree,
            },
            &self.bound,
        )
        .map_err(|e| e.to_string())?;
        if expected_l != self.lipschitz {
            return fail("L = C r D max(M,1)^(D-1)");
        }
        if !self.delta_scale.is_positive() || !self.m.is_multiple_of(&self.delta_scale) {
            return fail("m is a positive multiple of Δ");
        }
        match &self.delta {
            None => {
                if !self.lipschitz.is_zero() {
                    return fail("degenerate plan needs L = 0");
                }
                if self.m != degenerate_m(&self.delta_scale, self.degree, self.d1) {
                    return fail("degenerate m = Δ max(1, (D+1) d1)");
                }
            }
            Some(delta) => {
                let base = rat_from_int(&plan_base(self.degree, self.d1, &self.delta_scale));
                if delta * rat(2, 1) * &base * &self.lipschitz != self.epsilon {
                    return fail("δ = ε / (2 base L)");
                }
                let needed = rat_from_int(&self.delta_scale) * rat(2, 1) / delta
                    * ExactRat::from_integer(self.d1.into())
                    * &self.bound;
                if rat_from_int(&self.m) < needed {
                    return fail("m >= Δ (2/δ) d1 M");
                }
            }
        }
        Ok(())
    }
}

/// `max(1, D d1 Δ)^D`.
fn plan_base(degree: u32, d1: usize, delta_scale: &ExactInt) -> ExactInt {
    let b = ExactInt::from(degree) * ExactInt::from(d1) * delta_scale;
    let b = if b < ExactInt::one() { ExactInt::one() } else { b };
    Pow::pow(&b, degree)
}

fn degenerate_m(delta_scale: &ExactInt, degree: u32, d1: usize) -> ExactInt {
    let k = (degree as usize + 1) * d1;
    delta_scale * ExactInt::from(k.max(1))
}

fn require_integral(f: &Polynomial) -> Result<()> {
    if f.has_integer_coefficients() {
        Ok(())
    } else {
        Err(Error::Precondition("objective must have integer coefficients".into()))
    }
}

/// Builds the plan `δ = ε / (2 base L)`, `m = Δ max(1, ⌈(4/ε) base L d1 M⌉)`
/// with `base = max(1, D d1 Δ)^D`.
pub fn make_grid_plan(p: &Polytope, f: &Polynomial, epsilon: &ExactRat) -> Result<GridPlan> {
    check_epsilon(epsilon)?;
    require_integral(f)?;
    let bound = p.checked_bound()?;
    let delta_scale = p.integral_scaling_factor();
    let stats = f.stats();
    let lipschitz = lipschitz_constant(&stats, &bound)?;
    let d1 = p.d1();
    let (delta, m) = if lipschitz.is_zero() {
        (None, degenerate_m(&delta_scale, stats.degree, d1))
    } else {
        let base = rat_from_int(&plan_base(stats.degree, d1, &delta_scale));
        let delta = epsilon / (rat(2, 1) * &base * &lipschitz);
        let k = numeric::ceil_to_int(
            &(rat(4, 1) / epsilon * &base * &lipschitz * ExactRat::from_integer(d1.into()) * &bound),
        );
        let k = if k < ExactInt::one() { ExactInt::one() } else { k };
        (Some(delta), &delta_scale * k)
    };
    Ok(GridPlan {
        epsilon: epsilon.clone(),
        d1,
        bound,
        delta_scale,
        max_abs_coeff: stats.max_abs_coeff,
        terms: stats.terms,
        degree: stats.degree,
        lipschitz,
        delta,
        m,
    })
}

/// The scaled pure-integer instance for grid size `m`.
pub fn grid_problem(p: &Polytope, f: &Polynomial, m: &ExactInt) -> Result<GridProblem> {
    if !m.is_positive() {
        return Err(Error::Domain(format!("grid size must be positive, got {m}")));
    }
    let objective = f.scale_substitute(m, p.d1())?;
    let rows: Vec<Vec<ExactInt>> = p
        .a()
        .iter()
        .zip(p.b())
        .map(|(ra, rb)| ra.iter().cloned().chain(rb.iter().map(|c| c * m)).collect())
        .collect();
    let polytope = Polytope::new(
        0,
        p.dims(),
        vec![Vec::new(); rows.len()],
        rows,
        p.rhs().iter().map(|c| c * m).collect(),
    )?;
    Ok(GridProblem {
        polytope,
        objective,
        m: m.clone(),
        d1: p.d1(),
    })
}

impl GridProblem {
    /// `(x, z) -> (m x, z)`; `None` when `x` is off the grid.
    pub fn to_integer_point(&self, point: &MixedPoint) -> Option<Vec<ExactInt>> {
        let mr = rat_from_int(&self.m);
        let mut out = Vec::with_capacity(point.x.len() + point.z.len());
        for xi in &point.x {
            let s = xi * &mr;
            if !s.is_integer() {
                return None;
            }
            out.push(s.to_integer());
        }
        out.extend(point.z.iter().cloned());
        Some(out)
    }

    /// Inverse of [`GridProblem::to_integer_point`].
    pub fn to_mixed_point(&self, coords: &[ExactInt]) -> MixedPoint {
        let mr = rat_from_int(&self.m);
        MixedPoint::new(
            coords[..self.d1].iter().map(|c| rat_from_int(c) / &mr).collect(),
            coords[self.d1..].to_vec(),
            self.m.clone(),
        )
    }

    /// Integer points of the scaled instance, as coordinate vectors.
    pub fn integer_points(&self) -> Result<impl Iterator<Item = Vec<ExactInt>>> {
        Ok(self
            .polytope
            .enumerate_grid_points(&ExactInt::one())?
            .map(|p| p.z))
    }
}

/// Grid points of one instance with the scaled objective values
/// `F̃ = m^D f` precomputed, shared by every descent on that grid.
struct GridWorkspace {
    problem: GridProblem,
    points: Vec<Vec<ExactInt>>,
    scaled_values: Vec<ExactInt>,
    m_pow: ExactInt,
}

impl GridWorkspace {
    fn new(p: &Polytope, f: &Polynomial, m: &ExactInt) -> Result<Self> {
        let problem = grid_problem(p, f, m)?;
        let points: Vec<Vec<ExactInt>> = problem.integer_points()?.collect();
        if points.is_empty() {
            return Err(Error::EmptyFeasibleSet);
        }
        let scaled_values = points.iter().map(|c| problem.objective.evaluate_integral(c)).collect();
        let m_pow = Pow::pow(m, f.degree());
        Ok(Self {
            problem,
            points,
            scaled_values,
            m_pow,
        })
    }

    /// Descends on `q (sign F̃ + m^D c)` where `q` is the denominator of
    /// `c`, i.e. on the grid values of `sign f + c` scaled to integers.
    fn descend(&self, negate: bool, shift: &ExactRat, epsilon: &ExactRat) -> Result<(MixedPoint, ExactInt, DescentCertificate)> {
        let q = shift.denom().clone();
        let offset = (shift * rat_from_int(&(&q * &self.m_pow))).to_integer();
        let values: Vec<ExactInt> = self
            .scaled_values
            .iter()
            .map(|v| {
                let v = if negate { -v } else { v.clone() };
                &q * v + &offset
            })
            .collect();
        let (idx, cert) = descend(&self.points, &values, epsilon)?;
        Ok((self.problem.to_mixed_point(&self.points[idx]), q, cert))
    }
}

fn check_size(p: &Polytope, m: &ExactInt, options: &FptasOptions) -> Result<()> {
    if options.grid_override.is_some() {
        return Ok(());
    }
    let estimate = p.grid_size_estimate(m);
    if estimate > options.max_grid_points {
        return Err(Error::RefusedSize {
            m: m.clone(),
            estimate,
            limit: options.max_grid_points.clone(),
        });
    }
    Ok(())
}

fn grid_choice(plan: &GridPlan, options: &FptasOptions) -> Result<ExactInt> {
    match &options.grid_override {
        Some(m) if !m.is_positive() => Err(Error::Domain(format!("grid size must be positive, got {m}"))),
        Some(m) => Ok(m.clone()),
        None => Ok(plan.m.clone()),
    }
}

/// Returns a feasible `(x, z)` with `f(x, z) >= (1 - ε) f*` for `f`
/// non-negative on the feasible set.
pub fn fptas_maximize(
    p: &Polytope,
    f: &Polynomial,
    epsilon: &ExactRat,
    options: &FptasOptions,
) -> Result<Solution> {
    check_epsilon(epsilon)?;
    p.checked_bound()?;
    let (fi, multiplier) = f.clear_denominators();
    let verdict = is_constant(p, &fi)?;
    if verdict.constant {
        let value = f.evaluate(&verdict.point.coords());
        if value.is_negative() {
            return Err(Error::NegativeObjective {
                value: numeric::format_rat(&value),
            });
        }
        return Ok(Solution {
            point: verdict.point,
            value,
            guarantee: Guarantee {
                kind: GuaranteeKind::Constant,
                epsilon: epsilon.clone(),
            },
            certificate: None,
        });
    }
    let plan = make_grid_plan(p, &fi, epsilon)?;
    let m = grid_choice(&plan, options)?;
    check_size(p, &m, options)?;
    let workspace = GridWorkspace::new(p, &fi, &m)?;
    let inner = epsilon / rat(2, 1);
    let (point, scale, descent) = workspace.descend(false, &ExactRat::zero(), &inner)?;
    let coords = point.coords();
    let value = f.evaluate(&coords);
    let certificate = FptasCertificate {
        multiplier,
        plan: Some(plan),
        grid_m: m,
        certified: options.grid_override.is_none(),
        objective_value: fi.evaluate(&coords),
        scale,
        degree: fi.degree(),
        descent,
    };
    Ok(Solution {
        point,
        value,
        guarantee: Guarantee {
            kind: GuaranteeKind::Fptas,
            epsilon: epsilon.clone(),
        },
        certificate: Some(Certificate::Fptas(certificate)),
    })
}

/// Grid size `Δ max(1, (D+1) d1)` on which constancy is decided.
pub fn constancy_grid(p: &Polytope, f: &Polynomial) -> ExactInt {
    degenerate_m(&p.integral_scaling_factor(), f.degree(), p.d1())
}

/// Decides whether `f` is constant on the mixed-integer points of `P` by
/// scanning the constancy grid.
pub fn is_constant(p: &Polytope, f: &Polynomial) -> Result<ConstantVerdict> {
    p.checked_bound()?;
    let m = constancy_grid(p, f);
    let mut points = p.enumerate_grid_points(&m)?;
    let first = points.next().ok_or(Error::EmptyFeasibleSet)?;
    let value = f.evaluate(&first.coords());
    let witness = if f.is_constant_polynomial() {
        None
    } else {
        points.find_map(|q| {
            let v = f.evaluate(&q.coords());
            (v != value).then_some((q, v))
        })
    };
    Ok(ConstantVerdict {
        constant: witness.is_none(),
        m,
        point: first,
        value,
        witness,
    })
}

/// `u` with `f* <= u <= (1 + δ) f*`, from an FPTAS run at `ε = δ/(1+δ)`.
pub fn upper_bound(
    p: &Polytope,
    f: &Polynomial,
    delta: &ExactRat,
    options: &FptasOptions,
) -> Result<(ExactRat, Solution)> {
    if !delta.is_positive() {
        return Err(Error::Domain(format!(
            "delta must be positive, got {}",
            numeric::format_rat(delta)
        )));
    }
    let one = ExactRat::one();
    let epsilon = delta / (&one + delta);
    let solution = fptas_maximize(p, f, &epsilon, options)?;
    Ok(((&one + delta) * &solution.value, solution))
}

/// `U_0 = r C max(M,1)^D = -L_0`.
fn initial_range(f: &Polynomial, bound: &ExactRat) -> ExactRat {
    let stats = f.stats();
    let m = if *bound < ExactRat::one() {
        ExactRat::one()
    } else {
        bound.clone()
    };
    ExactRat::from_integer(stats.terms.into()) * &stats.max_abs_coeff * numeric::rat_pow(&m, stats.degree)
}

fn check_delta(delta: &ExactRat) -> Result<()> {
    if delta.is_positive() && *delta < ExactRat::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "delta must lie in (0, 1), got {}",
            numeric::format_rat(delta)
        )))
    }
}

/// Alternately tightens `U_i` from an upper bound on `max (f - L_i)` and
/// `L_i` from an upper bound on `max (U_i - f)`. One grid serves every
/// iteration.
pub fn range_bounds(
    p: &Polytope,
    f: &Polynomial,
    delta: &ExactRat,
    n: u32,
    options: &FptasOptions,
) -> Result<RangeTrace> {
    check_delta(delta)?;
    require_integral(f)?;
    let bound = p.checked_bound()?;
    let one = ExactRat::one();
    let epsilon = delta / (&one + delta);
    let plan = make_grid_plan(p, f, &epsilon)?;
    let m = grid_choice(&plan, options)?;
    check_size(p, &m, options)?;
    let workspace = GridWorkspace::new(p, f, &m)?;
    let inner = &epsilon / rat(2, 1);
    let growth = &one + delta;

    let u0 = initial_range(f, &bound);
    let mut states = vec![RangeState {
        i: 0,
        lower: -u0.clone(),
        upper: u0,
    }];
    for i in 0..n {
        let last = states.last().expect("nonempty trace");
        // g = f - L_i >= 0
        let (gx, _, _) = workspace.descend(false, &-last.lower.clone(), &inner)?;
        let g = f.evaluate(&gx.coords()) - &last.lower;
        // h = U_i - f >= 0
        let (hx, _, _) = workspace.descend(true, &last.upper, &inner)?;
        let h = &last.upper - f.evaluate(&hx.coords());
        let upper = &last.lower + &growth * g;
        let lower = &last.upper - &growth * h;
        states.push(RangeState { i: i + 1, lower, upper });
    }
    Ok(RangeTrace {
        states,
        plan,
        grid_m: m,
    })
}

/// Returns `(x, z)` with `|f(x, z) - f_max| <= ε (f_max - f_min)` for any
/// objective, or a constant verdict.
pub fn weak_maximize(
    p: &Polytope,
    f: &Polynomial,
    epsilon: &ExactRat,
    options: &FptasOptions,
) -> Result<Solution> {
    check_epsilon(epsilon)?;
    let bound = p.checked_bound()?;
    let (fi, multiplier) = f.clear_denominators();
    let delta = rat(1, 2);
    let degree = fi.degree();
    let constancy_m = constancy_grid(p, &fi);
    let md = rat_from_int(&Pow::pow(&constancy_m, degree));

    // smallest n with 2^n >= 2 m^D (U_0 - L_0)
    let width0 = rat(2, 1) * initial_range(&fi, &bound);
    let target = rat(2, 1) * &md * &width0;
    let mut n = 0u32;
    while rat_from_int(&(ExactInt::one() << n)) < target {
        n += 1;
    }

    let range_options = FptasOptions {
        max_grid_points: options.max_grid_points.clone(),
        grid_override: None,
    };
    let trace = range_bounds(p, &fi, &delta, n, &range_options)?;
    let last = trace.states.last().expect("nonempty trace").clone();
    let gap = &last.upper - &last.lower;
    let constant = gap <= md.recip() / rat(2, 1);
    let epsilon_prime = epsilon * rat(2, 7);

    let mut cert = WeakCertificate {
        multiplier: multiplier.clone(),
        delta,
        constancy_m: constancy_m.clone(),
        degree,
        iterations: n,
        trace: trace.states,
        constant,
        epsilon_prime: epsilon_prime.clone(),
        fptas: None,
    };
    if constant {
        let point = p
            .enumerate_grid_points(&constancy_m)?
            .next()
            .ok_or(Error::EmptyFeasibleSet)?;
        let value = f.evaluate(&point.coords());
        return Ok(Solution {
            point,
            value,
            guarantee: Guarantee {
                kind: GuaranteeKind::Constant,
                epsilon: epsilon.clone(),
            },
            certificate: Some(Certificate::Weak(cert)),
        });
    }

    let plan = make_grid_plan(p, &fi, &epsilon_prime)?;
    let m = grid_choice(&plan, options)?;
    check_size(p, &m, options)?;
    let workspace = GridWorkspace::new(p, &fi, &m)?;
    let inner = &epsilon_prime / rat(2, 1);
    let (point, scale, descent) = workspace.descend(false, &-last.lower.clone(), &inner)?;
    let coords = point.coords();
    cert.fptas = Some(FptasCertificate {
        multiplier,
        plan: Some(plan),
        grid_m: m,
        certified: options.grid_override.is_none(),
        objective_value: fi.evaluate(&coords) - &last.lower,
        scale,
        degree,
        descent,
    });
    Ok(Solution {
        value: f.evaluate(&coords),
        point,
        guarantee: Guarantee {
            kind: GuaranteeKind::Weak,
            epsilon: epsilon.clone(),
        },
        certificate: Some(Certificate::Weak(cert)),
    })
}
