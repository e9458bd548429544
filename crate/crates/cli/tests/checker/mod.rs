//! Stand-alone replay of report certificates, working only from the JSON
//! report and the instance file.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

pub fn q(v: &Value) -> BigRational {
    let s = v.as_str().unwrap_or_else(|| panic!("expected a rational string, got {v}"));
    match s.split_once('/') {
        Some((n, d)) => BigRational::new(n.parse().unwrap(), d.parse().unwrap()),
        None => BigRational::from_integer(s.parse().unwrap()),
    }
}

fn z(v: &Value) -> BigInt {
    match v {
        Value::Number(n) => BigInt::from(n.as_i64().unwrap()),
        Value::String(s) => s.parse().unwrap(),
        other => panic!("expected an integer, got {other}"),
    }
}

fn pow(b: &BigRational, e: u64) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * b)
}

fn two_pow(e: u64) -> BigRational {
    BigRational::from_integer(BigInt::one() << e)
}

/// Objective value and feasibility of a reported point, from the instance.
pub fn evaluate(instance: &Value, point: &Value) -> (BigRational, bool) {
    let mut coords: Vec<BigRational> = point["x"].as_array().unwrap().iter().map(q).collect();
    coords.extend(point["z"].as_array().unwrap().iter().map(|v| BigRational::from_integer(q(v).to_integer())));
    let d1 = instance["d1"].as_u64().unwrap() as usize;
    let rows_a = instance["A"].as_array().unwrap();
    let rows_b = instance["B"].as_array().unwrap();
    let rhs = instance["b"].as_array().unwrap();
    let feasible = (0..rhs.len()).all(|i| {
        let lhs = rows_a[i]
            .as_array()
            .unwrap()
            .iter()
            .chain(rows_b[i].as_array().unwrap())
            .zip(&coords)
            .fold(BigRational::zero(), |acc, (c, x)| acc + BigRational::from_integer(z(c)) * x);
        lhs <= BigRational::from_integer(z(&rhs[i]))
    });
    let grid = BigRational::from_integer(q(&point["grid_denominator"]).to_integer());
    let on_grid = coords[..d1].iter().all(|x| (x * &grid).is_integer());
    let value = instance["objective"]
        .as_array()
        .unwrap()
        .iter()
        .fold(BigRational::zero(), |acc, t| {
            let mono = t["exponents"]
                .as_array()
                .unwrap()
                .iter()
                .zip(&coords)
                .fold(BigRational::one(), |m, (e, x)| m * pow(x, e.as_u64().unwrap()));
            acc + q(&t["coefficient"]) * mono
        });
    (value, feasible && on_grid)
}

fn check(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn descent(c: &Value) -> Result<(), String> {
    let eps = q(&c["epsilon"]);
    let k = c["k"].as_u64().unwrap();
    let splits = c["splits"].as_u64().unwrap();
    let fin = BigRational::from_integer(q(&c["final_value"]).to_integer());
    let root = q(&c["root_moment"]);
    check(eps.is_positive() && eps < BigRational::one(), "descent epsilon range")?;
    check(pow(&fin, k) * two_pow(splits) >= root, "final^k 2^splits >= root moment")?;
    check(
        two_pow(splits) * pow(&(BigRational::one() - &eps), k) <= BigRational::one(),
        "2^splits (1 - eps)^k <= 1",
    )
}

fn plan(p: &Value) -> Result<(), String> {
    let c = q(&p["max_abs_coeff"]);
    let r = BigRational::from_integer(p["terms"].as_u64().unwrap().into());
    let d = p["degree"].as_u64().unwrap();
    let d1 = BigRational::from_integer(p["d1"].as_u64().unwrap().into());
    let m_bound = q(&p["bound"]);
    let delta_scale = q(&p["delta_scale"]);
    let l = q(&p["lipschitz"]);
    let m = q(&p["m"]);
    let big_m = if m_bound < BigRational::one() { BigRational::one() } else { m_bound.clone() };
    let expected_l = if d == 0 {
        BigRational::zero()
    } else {
        &c * &r * BigRational::from_integer(d.into()) * pow(&big_m, d - 1)
    };
    check(l == expected_l, "L = C r D M^(D-1)")?;
    check((&m / &delta_scale).is_integer(), "Δ divides m")?;
    match p.get("delta") {
        None | Some(Value::Null) => check(l.is_zero(), "degenerate plan has L = 0"),
        Some(dv) => {
            let delta = q(dv);
            let mut base = BigRational::from_integer(d.into()) * &d1 * &delta_scale;
            if base < BigRational::one() {
                base = BigRational::one();
            }
            let base = pow(&base, d);
            let two = BigRational::from_integer(2.into());
            check(&delta * &two * base * &l == q(&p["epsilon"]), "δ 2 base L = ε")?;
            check(m >= delta_scale * two / delta * d1 * m_bound, "m >= Δ (2/δ) d1 M")
        }
    }
}

fn fptas_chain(c: &Value, eps: &BigRational) -> Result<BigRational, String> {
    descent(&c["descent"])?;
    check(q(&c["descent"]["epsilon"]) == eps / BigRational::from_integer(2.into()), "inner ε = ε/2")?;
    let m = q(&c["grid_m"]);
    let d = c["degree"].as_u64().unwrap();
    let objective = q(&c["objective_value"]);
    let scale = q(&c["scale"]);
    check(
        q(&c["descent"]["final_value"]) == scale * pow(&m, d) * &objective,
        "grid value = scale m^D objective",
    )?;
    if !c["plan"].is_null() {
        plan(&c["plan"])?;
        check(q(&c["plan"]["epsilon"]) == *eps, "plan ε")?;
        if c["certified"].as_bool().unwrap() {
            check(q(&c["plan"]["m"]) == m, "certified run uses the plan's m")?;
        }
    }
    Ok(objective)
}

/// Replays the certificate attached to `solution` and checks the reported
/// value against the instance.
pub fn replay(instance: &Value, solution: &Value) -> Result<(), String> {
    let value = q(&solution["value"]);
    let (actual, feasible) = evaluate(instance, &solution["point"]);
    check(feasible, "point is feasible and on its grid")?;
    check(actual == value, "reported value equals f(point)")?;
    let eps = q(&solution["guarantee"]["epsilon"]);
    let cert = &solution["certificate"];
    if cert.is_null() {
        return Ok(());
    }
    match cert["kind"].as_str().unwrap() {
        "descent" => {
            descent(cert)?;
            check(q(&cert["final_value"]) == value, "descent value")
        }
        "fptas" => {
            let objective = fptas_chain(cert, &eps)?;
            check(objective == value * q(&cert["multiplier"]), "objective = multiplier value")
        }
        "weak" => {
            let one = BigRational::one();
            let two = BigRational::from_integer(2.into());
            let delta = q(&cert["delta"]);
            let trace = cert["trace"].as_array().unwrap();
            let n = cert["iterations"].as_u64().unwrap();
            check(trace.len() as u64 == n + 1, "trace length")?;
            let md = pow(&q(&cert["constancy_m"]), cert["degree"].as_u64().unwrap());
            let width0 = q(&trace[0]["upper"]) - q(&trace[0]["lower"]);
            check(pow(&delta, n) * &two * &md * width0 <= one, "δ^n 2 m^D (U0 - L0) <= 1")?;
            let last = trace.last().unwrap();
            let lower = q(&last["lower"]);
            let gap = q(&last["upper"]) - &lower;
            let threshold = md.recip() / &two;
            if cert["constant"].as_bool().unwrap() {
                return check(gap <= threshold, "constant gap");
            }
            check(gap > threshold, "non-constant gap")?;
            let eps_prime = q(&cert["epsilon_prime"]);
            check(
                &eps_prime * (&one / &two + (&one + &delta) / (&one - &delta)) == eps,
                "ε' formula",
            )?;
            let objective = fptas_chain(&cert["fptas"], &eps_prime)?;
            check(objective == value * q(&cert["multiplier"]) - lower, "inner objective = f - L_n")
        }
        other => Err(format!("unknown certificate kind {other}")),
    }
}
