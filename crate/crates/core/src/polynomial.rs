//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, lcm_all, ExactInt, ExactRat};

/// Exponent vector `α` of a monomial `x^α`.
pub type Exponents = Vec<u32>;

/// A polynomial in `dims` variables. Terms are keyed by exponent vector, so
/// iteration is lexicographic; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    dims: usize,
    terms: BTreeMap<Exponents, ExactRat>,
}

/// Coefficient statistics used by the Lipschitz and range estimates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffStats {
    /// Largest absolute coefficient.
    pub max_abs_coeff: ExactRat,
    /// Number of monomials.
    pub terms: usize,
    /// Maximum total degree.
    pub degree: u32,
}

/// One serialized term: `{"exponents": [..], "coefficient": "p/q"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponents: Vec<u32>,
    #[serde(with = "numeric::rat_string")]
    pub coefficient: ExactRat,
}

impl Polynomial {
    pub fn zero(dims: usize) -> Self {
        Self {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dims: usize, c: ExactRat) -> Self {
        let mut p = Self::zero(dims);
        p.add_term(vec![0; dims], c);
        p
    }

    pub fn one(dims: usize) -> Self {
        Self::constant(dims, ExactRat::one())
    }

    /// The polynomial `x_index`.
    pub fn variable(dims: usize, index: usize) -> Self {
        assert!(index < dims, "variable index {index} out of range for {dims} variables");
        let mut e = vec![0; dims];
        e[index] = 1;
        let mut p = Self::zero(dims);
        p.add_term(e, ExactRat::one());
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// duplicate monomials.
    pub fn from_terms<I>(dims: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, ExactRat)>,
    {
        let mut p = Self::zero(dims);
        for (e, c) in terms {
            if e.len() != dims {
                return Err(Error::Parse(format!(
                    "exponent vector of length {} in a polynomial with {} variables",
                    e.len(),
                    dims
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Shorthand for tests and generators: integer coefficients.
    pub fn from_int_terms(dims: usize, terms: &[(&[u32], i64)]) -> Self {
        Self::from_terms(
            dims,
            terms
                .iter()
                .map(|(e, c)| (e.to_vec(), ExactRat::from_integer(ExactInt::from(*c)))),
        )
        .expect("exponent vectors must match dims")
    }

    pub fn from_records(dims: usize, records: &[TermRecord]) -> Result<Self> {
        Self::from_terms(
            dims,
            records.iter().map(|t| (t.exponents.clone(), t.coefficient.clone())),
        )
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(e, c)| TermRecord {
                exponents: e.clone(),
                coefficient: c.clone(),
            })
            .collect()
    }

    fn add_term(&mut self, e: Exponents, c: ExactRat) {
        debug_assert_eq!(e.len(), self.dims);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &ExactRat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Maximum total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn constant_term(&self) -> ExactRat {
        self.terms
            .get(&vec![0; self.dims])
            .cloned()
            .unwrap_or_else(ExactRat::zero)
    }

    /// True when no variable occurs, i.e. the polynomial is a constant.
    pub fn is_constant_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&a| a == 0))
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn stats(&self) -> CoeffStats {
        CoeffStats {
            max_abs_coeff: self
                .terms
                .values()
                .map(|c| c.abs())
                .max()
                .unwrap_or_else(ExactRat::zero),
            terms: self.terms.len(),
            degree: self.degree(),
        }
    }

    pub fn evaluate(&self, point: &[ExactRat]) -> ExactRat {
        assert_eq!(point.len(), self.dims, "evaluation point has wrong dimension");
        let max_exp = self.max_exponents();
        let powers: Vec<Vec<ExactRat>> = point
            .iter()
            .zip(&max_exp)
            .map(|(v, &m)| power_table(v, m))
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .enumerate()
                    .fold(c.clone(), |acc, (i, &a)| acc * &powers[i][a as usize])
            })
            .fold(ExactRat::zero(), |acc, t| acc + t)
    }

    /// Integer evaluation at an integer point; the polynomial must have
    /// integer coefficients.
    pub fn evaluate_integral(&self, point: &[ExactInt]) -> ExactInt {
        assert_eq!(point.len(), self.dims, "evaluation point has wrong dimension");
        debug_assert!(self.has_integer_coefficients());
        let max_exp = self.max_exponents();
        let powers: Vec<Vec<ExactInt>> = point
            .iter()
            .zip(&max_exp)
            .map(|(v, &m)| power_table(v, m))
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .enumerate()
                    .fold(c.numer().clone(), |acc, (i, &a)| acc * &powers[i][a as usize])
            })
            .fold(ExactInt::zero(), |acc, t| acc + t)
    }

    fn max_exponents(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.dims];
        for e in self.terms.keys() {
            for (mi, &a) in m.iter_mut().zip(e) {
                *mi = (*mi).max(a);
            }
        }
        m
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut result = Polynomial::one(self.dims);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn scale(&self, factor: &ExactRat) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero(self.dims);
        }
        Polynomial {
            dims: self.dims,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * factor))
                .collect(),
        }
    }

    pub fn add_constant(&self, c: &ExactRat) -> Polynomial {
        let mut p = self.clone();
        p.add_term(vec![0; self.dims], c.clone());
        p
    }

    /// Returns `(multiplier * self, multiplier)` where the multiplier is the
    /// smallest positive integer making every coefficient integral.
    pub fn clear_denominators(&self) -> (Polynomial, ExactInt) {
        let multiplier = lcm_all(self.terms.values().map(|c| c.denom()));
        let scaled = self.scale(&ExactRat::from_integer(multiplier.clone()));
        (scaled, multiplier)
    }

    /// `m^D f(x̃/m, z)` for the first `continuous` variables; integer
    /// coefficients in, integer coefficients out.
    pub fn scale_substitute(&self, m: &ExactInt, continuous: usize) -> Result<Polynomial> {
        if !self.has_integer_coefficients() {
            return Err(Error::Precondition(
                "scale substitution needs integer coefficients".into(),
            ));
        }
        if !m.is_positive() {
            return Err(Error::Domain(format!("grid size must be positive, got {m}")));
        }
        assert!(continuous <= self.dims);
        let d = self.degree();
        let terms = self.terms.iter().map(|(e, c)| {
            let cont_deg: u32 = e[..continuous].iter().sum();
            let factor: ExactInt = Pow::pow(m, d - cont_deg);
            (e.clone(), c * ExactRat::from_integer(factor))
        });
        Polynomial::from_terms(self.dims, terms)
    }
}

fn power_table<T>(v: &T, max: u32) -> Vec<T>
where
    T: Clone + One + for<'a> Mul<&'a T, Output = T>,
{
    let mut t = Vec::with_capacity(max as usize + 1);
    t.push(T::one());
    for i in 0..max as usize {
        let next = t[i].clone() * v;
        t.push(next);
    }
    t
}

/// `L = C r D M^(D-1)`, with `M` replaced by `max(M, 1)`; 0 for constants.
pub fn lipschitz_constant(stats: &CoeffStats, bound: &ExactRat) -> Result<ExactRat> {
    if bound.is_negative() {
        return Err(Error::Domain(format!(
            "coordinate bound must be non-negative, got {}",
            numeric::format_rat(bound)
        )));
    }
    if stats.degree == 0 {
        return Ok(ExactRat::zero());
    }
    let m = if *bound < ExactRat::one() {
        ExactRat::one()
    } else {
        bound.clone()
    };
    Ok(&stats.max_abs_coeff
        * ExactRat::from_integer(ExactInt::from(stats.terms))
        * ExactRat::from_integer(ExactInt::from(stats.degree))
        * numeric::rat_pow(&m, stats.degree - 1))
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dims, rhs.dims);
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            dims: self.dims,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dims, rhs.dims);
        let mut p = Polynomial::zero(self.dims);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}](", self.dims)?;
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{:?}", numeric::format_rat(c), e)?;
        }
        write!(f, ")")
    }
}
