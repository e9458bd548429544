//! Exact integer and rational arithmetic helpers.
//!
//! All certified quantities in this crate live in [`ExactInt`] / [`ExactRat`];
//! nothing on the certified path touches floating point.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision signed integer.
pub type ExactInt = BigInt;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type ExactRat = BigRational;

pub fn int(v: i64) -> ExactInt {
    ExactInt::from(v)
}

pub fn rat(num: i64, den: i64) -> ExactRat {
    ExactRat::new(ExactInt::from(num), ExactInt::from(den))
}

pub fn rat_from_int(v: &ExactInt) -> ExactRat {
    ExactRat::from_integer(v.clone())
}

/// Largest integer `t` with `t^k <= a`.
pub fn ikth_root_floor(a: &ExactRat, k: u32) -> Result<ExactInt> {
    if a.is_negative() {
        return Err(Error::Domain(format!("k-th root of negative value {}", format_rat(a))));
    }
    if k == 0 {
        return Err(Error::Domain("root index must be positive".into()));
    }
    // t^k is an integer, so t^k <= a iff t^k <= floor(a).
    let floor = a.floor().to_integer();
    Ok(floor_root_int(&floor, k))
}

/// Smallest integer `t` with `t^k >= a`.
pub fn ikth_root_ceil(a: &ExactRat, k: u32) -> Result<ExactInt> {
    let t = ikth_root_floor(a, k)?;
    if rat_from_int(&Pow::pow(&t, k)) == *a {
        Ok(t)
    } else {
        Ok(t + 1)
    }
}

// Binary search bracketed by the bit length of `n`.
fn floor_root_int(n: &ExactInt, k: u32) -> ExactInt {
    if n.is_zero() || k == 1 {
        return n.clone();
    }
    let bits = n.bits();
    let mut lo = ExactInt::zero();
    let mut hi = ExactInt::one() << (bits / u64::from(k) + 1);
    // invariant: lo^k <= n < hi^k
    while &hi - &lo > ExactInt::one() {
        let mid: ExactInt = (&lo + &hi) >> 1;
        if Pow::pow(&mid, k) <= *n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// Panics if the matrix is not square.
pub fn det(matrix: &[Vec<ExactInt>]) -> ExactInt {
    let n = matrix.len();
    assert!(matrix.iter().all(|row| row.len() == n), "det requires a square matrix");
    if n == 0 {
        return ExactInt::one();
    }
    let mut a: Vec<Vec<ExactInt>> = matrix.to_vec();
    let mut sign = ExactInt::one();
    let mut prev = ExactInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return ExactInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Least common multiple of the absolute values; 1 for an empty list.
pub fn lcm_all<'a, I>(values: I) -> ExactInt
where
    I: IntoIterator<Item = &'a ExactInt>,
{
    values
        .into_iter()
        .fold(ExactInt::one(), |acc, v| acc.lcm(&v.abs()))
}

pub fn ceil_to_int(a: &ExactRat) -> ExactInt {
    a.ceil().to_integer()
}

pub fn floor_to_int(a: &ExactRat) -> ExactInt {
    a.floor().to_integer()
}

/// `base^exp` for a non-negative exponent, on rationals.
pub fn rat_pow(base: &ExactRat, exp: u32) -> ExactRat {
    Pow::pow(base, exp)
}

/// Renders as `"p/q"`, or `"p"` when the denominator is 1.
pub fn format_rat(v: &ExactRat) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<ExactRat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = ExactInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = ExactInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(ExactRat::new(p, q))
        }
        None => Ok(ExactRat::from_integer(ExactInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// Serde adapter: rationals as `"p/q"` strings.
pub mod rat_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_rat, parse_rat, ExactRat};

    pub fn serialize<S: Serializer>(v: &ExactRat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactRat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: optional rationals as `"p/q"` strings or `null`.
pub mod opt_rat_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_rat, parse_rat, ExactRat};

    pub fn serialize<S: Serializer>(v: &Option<ExactRat>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_some(&format_rat(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<ExactRat>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rat(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Serde adapter: vectors of rationals as `"p/q"` strings.
pub mod rat_vec_string {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_rat, parse_rat, ExactRat};

    pub fn serialize<S: Serializer>(v: &[ExactRat], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&format_rat(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ExactRat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter: integers as `"123"` strings.
pub mod int_string {
    use std::str::FromStr;

    use serde::{Deserialize, Deserializer, Serializer};

    use super::ExactInt;

    pub fn serialize<S: Serializer>(v: &ExactInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactInt, D::Error> {
        let s = String::deserialize(d)?;
        ExactInt::from_str(s.trim()).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: vectors of integers as strings.
pub mod int_vec_string {
    use std::str::FromStr;

    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::ExactInt;

    pub fn serialize<S: Serializer>(v: &[ExactInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ExactInt>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| ExactInt::from_str(s.trim()).map_err(serde::de::Error::custom))
            .collect()
    }
}
