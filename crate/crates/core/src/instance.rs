//! JSON instance files and the built-in instance families.
//!
//! ```json
//! {"d1": 1, "d2": 1, "A": [[-2], ...], "B": [[1], ...], "b": [0, ...],
//!  "objective": [{"exponents": [0, 1], "coefficient": "2"}, ...]}
//! ```
//!
//! Integers are JSON numbers when they fit in 64 bits and decimal strings
//! otherwise; either form is accepted on input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ExactInt;
use crate::polynomial::{Polynomial, TermRecord};
use crate::polytope::Polytope;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub name: Option<String>,
    pub description: Option<String>,
    pub polytope: Polytope,
    pub objective: Polynomial,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    d1: usize,
    d2: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<FlexInt>>,
    #[serde(rename = "B")]
    b: Vec<Vec<FlexInt>>,
    #[serde(rename = "b")]
    rhs: Vec<FlexInt>,
    objective: Vec<TermRecord>,
}

/// An integer written as a JSON number or a decimal string.
#[derive(Debug, Clone)]
struct FlexInt(ExactInt);

impl Serialize for FlexInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for FlexInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Signed(i64),
            Unsigned(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Signed(v) => Ok(FlexInt(v.into())),
            Raw::Unsigned(v) => Ok(FlexInt(v.into())),
            Raw::Text(s) => s
                .trim()
                .parse::<ExactInt>()
                .map(FlexInt)
                .map_err(|_| serde::de::Error::custom(format!("invalid integer {s:?}"))),
        }
    }
}

fn unflex(rows: Vec<Vec<FlexInt>>) -> Vec<Vec<ExactInt>> {
    rows.into_iter().map(|r| r.into_iter().map(|v| v.0).collect()).collect()
}

fn flex(rows: &[Vec<ExactInt>]) -> Vec<Vec<FlexInt>> {
    rows.iter().map(|r| r.iter().cloned().map(FlexInt).collect()).collect()
}

impl Instance {
    pub fn new(polytope: Polytope, objective: Polynomial) -> Result<Self> {
        if objective.dims() != polytope.dims() {
            return Err(Error::Parse(format!(
                "objective has {} variables but the polytope has d1 + d2 = {}",
                objective.dims(),
                polytope.dims()
            )));
        }
        Ok(Self {
            name: None,
            description: None,
            polytope,
            objective,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let polytope = Polytope::new(file.d1, file.d2, unflex(file.a), unflex(file.b), file.rhs.into_iter().map(|v| v.0).collect())?;
        let objective = Polynomial::from_records(file.d1 + file.d2, &file.objective)
            .map_err(|e| Error::Parse(format!("objective: {e}")))?;
        let mut inst = Self::new(polytope, objective)?;
        inst.name = file.name;
        inst.description = file.description;
        Ok(inst)
    }

    /// Canonical pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let p = &self.polytope;
        let file = InstanceFile {
            name: self.name.clone(),
            description: self.description.clone(),
            d1: p.d1(),
            d2: p.d2(),
            a: flex(p.a()),
            b: flex(p.b()),
            rhs: p.rhs().iter().cloned().map(FlexInt).collect(),
            objective: self.objective.to_records(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("instance serializes");
        s.push('\n');
        s
    }
}

/// The quadratic-residue family: `1 <= x <= c - 1`,
/// `(1 - a)/b <= y <= ((c - 1)^2 - a)/b`, `f = -(x^2 - a - b y)^2`.
pub fn an1(a: &ExactInt, b: &ExactInt, c: &ExactInt) -> Result<Instance> {
    let zero = ExactInt::from(0);
    if *a <= zero || *b <= zero || *c <= zero {
        return Err(Error::Domain("AN1 parameters must be positive".into()));
    }
    let one = ExactInt::from(1);
    let cm1 = c - &one;
    let polytope = Polytope::new(
        0,
        2,
        vec![Vec::new(); 4],
        vec![
            vec![-one.clone(), zero.clone()],
            vec![one.clone(), zero.clone()],
            vec![zero.clone(), -b.clone()],
            vec![zero.clone(), b.clone()],
        ],
        vec![-one.clone(), cm1.clone(), a - &one, &cm1 * &cm1 - a],
    )?;
    let int = |v: ExactInt| crate::numeric::rat_from_int(&v);
    let two = ExactInt::from(2);
    let objective = Polynomial::from_terms(
        2,
        [
            (vec![4, 0], int(-one.clone())),
            (vec![2, 0], int(&two * a)),
            (vec![2, 1], int(&two * b)),
            (vec![0, 2], int(-(b * b))),
            (vec![0, 1], int(-(&two * a * b))),
            (vec![0, 0], int(-(a * a))),
        ],
    )?;
    let mut inst = Instance::new(polytope, objective)?;
    inst.name = Some(format!("an1-{a}-{b}-{c}"));
    inst.description = Some(format!(
        "maximize -(x^2 - {a} - {b} y)^2 over 1 <= x <= {cm1}; value 0 iff some x^2 = {a} mod {b}"
    ));
    Ok(inst)
}

/// The two-limit-point instance: `z <= 2x`, `z <= 2(1 - x)`, `x >= 0`,
/// `0 <= z <= 1`, objective `2z - x`.
pub fn parity() -> Instance {
    let polytope = Polytope::from_i64(
        1,
        1,
        &[&[-2], &[2], &[-1], &[0], &[0]],
        &[&[1], &[1], &[0], &[1], &[-1]],
        &[0, 2, 0, 1, 0],
    )
    .expect("static instance");
    let objective = Polynomial::from_int_terms(2, &[(&[0, 1], 2), (&[1, 0], -1)]);
    let mut inst = Instance::new(polytope, objective).expect("static instance");
    inst.name = Some("parity".into());
    inst.description =
        Some("grid optimum is (1/2, 1) for even m and (0, 0) for odd m".into());
    inst
}
