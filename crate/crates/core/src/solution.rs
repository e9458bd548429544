//! Solutions and the certificates that let a third party replay the
//! guarantee chain behind them.

use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::mixed_opt::{GridPlan, RangeState};
use crate::numeric::{self, rat_from_int, ExactInt, ExactRat};
use crate::polytope::MixedPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GuaranteeKind {
    /// `f(x) >= (1 - ε) f*`.
    Fptas,
    /// `|f(x) - f_max| <= ε (f_max - f_min)`.
    Weak,
    /// Exact optimum by exhaustive enumeration.
    Oracle,
    /// The objective is constant on the feasible set.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guarantee {
    pub kind: GuaranteeKind,
    #[serde(with = "numeric::rat_string")]
    pub epsilon: ExactRat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub point: MixedPoint,
    #[serde(with = "numeric::rat_string")]
    pub value: ExactRat,
    pub guarantee: Guarantee,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Certificate>,
}

/// Evidence from the moment-sum bisection on integer objective values.
///
/// With `S = Σ v^k` over the starting point set, each split keeps the half
/// with the larger moment sum, so the returned value `v*` satisfies
/// `v*^k * 2^splits >= S >= (f*)^k`; together with
/// `2^splits * (1 - ε)^k <= 1` this gives `v* >= (1 - ε) f*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentCertificate {
    #[serde(with = "numeric::rat_string")]
    pub epsilon: ExactRat,
    pub k: u32,
    #[serde(with = "numeric::int_string")]
    pub point_count: ExactInt,
    #[serde(with = "numeric::int_string")]
    pub root_moment: ExactInt,
    pub splits: u32,
    #[serde(with = "numeric::int_string")]
    pub final_value: ExactInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FptasCertificate {
    /// Positive multiplier that made the input objective integral.
    #[serde(with = "numeric::int_string")]
    pub multiplier: ExactInt,
    /// `None` only for the degenerate constant-polynomial plan.
    pub plan: Option<GridPlan>,
    #[serde(with = "numeric::int_string")]
    pub grid_m: ExactInt,
    /// False when the caller overrode the grid size.
    pub certified: bool,
    /// Value of the integer-coefficient objective the grid search ran on.
    #[serde(with = "numeric::rat_string")]
    pub objective_value: ExactRat,
    /// Grid values are `scale * m^D * objective`.
    #[serde(with = "numeric::int_string")]
    pub scale: ExactInt,
    pub degree: u32,
    pub descent: DescentCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakCertificate {
    #[serde(with = "numeric::int_string")]
    pub multiplier: ExactInt,
    #[serde(with = "numeric::rat_string")]
    pub delta: ExactRat,
    /// Grid used for the constancy threshold `m^-D`.
    #[serde(with = "numeric::int_string")]
    pub constancy_m: ExactInt,
    pub degree: u32,
    pub iterations: u32,
    pub trace: Vec<RangeState>,
    pub constant: bool,
    #[serde(with = "numeric::rat_string")]
    pub epsilon_prime: ExactRat,
    /// Present for non-constant objectives: the run on `f - L_n`.
    pub fptas: Option<FptasCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Certificate {
    Descent(DescentCertificate),
    Fptas(FptasCertificate),
    Weak(WeakCertificate),
}

fn check(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn pow2(e: u32) -> ExactInt {
    ExactInt::one() << e
}

impl DescentCertificate {
    pub fn replay(&self) -> Result<(), String> {
        check(
            self.epsilon.is_positive() && self.epsilon < ExactRat::one(),
            "descent epsilon in (0, 1)",
        )?;
        check(self.k >= 1, "k >= 1")?;
        check(
            Pow::pow(&self.final_value, self.k) * pow2(self.splits) >= self.root_moment,
            "final^k * 2^splits >= root moment",
        )?;
        let shrink = numeric::rat_pow(&(ExactRat::one() - &self.epsilon), self.k);
        check(
            rat_from_int(&pow2(self.splits)) * shrink <= ExactRat::one(),
            "2^splits * (1 - eps)^k <= 1",
        )
    }
}

impl FptasCertificate {
    /// Replays the inequalities for a run whose reported solution value
    /// (in the caller's objective) is `value`.
    pub fn replay(&self, value: &ExactRat, epsilon: &ExactRat) -> Result<(), String> {
        self.replay_chain(epsilon)?;
        check(
            self.objective_value == value * rat_from_int(&self.multiplier),
            "objective value = multiplier * value",
        )
    }

    /// Checks everything except how `objective_value` relates to the
    /// caller's objective.
    pub fn replay_chain(&self, epsilon: &ExactRat) -> Result<(), String> {
        self.descent.replay()?;
        check(self.descent.epsilon == epsilon / ExactRat::from_integer(2.into()), "inner epsilon = eps/2")?;
        let md: ExactInt = Pow::pow(&self.grid_m, self.degree);
        check(
            rat_from_int(&self.descent.final_value)
                == rat_from_int(&(&self.scale * md)) * &self.objective_value,
            "grid value = scale * m^D * objective",
        )?;
        check(self.scale.is_positive(), "positive scale")?;
        if let Some(plan) = &self.plan {
            check(plan.epsilon == *epsilon, "plan epsilon")?;
            plan.replay()?;
            if self.certified {
                check(plan.m == self.grid_m, "grid m equals plan m")?;
            }
        }
        Ok(())
    }
}

impl WeakCertificate {
    pub fn replay(&self, value: &ExactRat, epsilon: &ExactRat) -> Result<(), String> {
        let one = ExactRat::one();
        let two = ExactRat::from_integer(2.into());
        check(
            self.delta.is_positive() && self.delta < one,
            "delta in (0, 1)",
        )?;
        check(self.trace.len() == self.iterations as usize + 1, "trace length")?;
        let first = &self.trace[0];
        check(first.lower == -first.upper.clone(), "symmetric initial bounds")?;
        let md = rat_from_int(&Pow::pow(&self.constancy_m, self.degree));
        let width0 = &first.upper - &first.lower;
        check(
            numeric::rat_pow(&self.delta, self.iterations) * &two * &md * width0 <= one,
            "delta^n * 2 m^D (U_0 - L_0) <= 1",
        )?;
        for w in self.trace.windows(2) {
            check(w[0].lower <= w[0].upper, "L_i <= U_i")?;
            check(w[1].i == w[0].i + 1, "trace indices")?;
        }
        let last = self.trace.last().expect("nonempty trace");
        let gap = &last.upper - &last.lower;
        let threshold = md.recip() / &two;
        if self.constant {
            return check(gap <= threshold, "constant: U_n - L_n <= m^-D / 2");
        }
        check(gap > threshold, "non-constant: U_n - L_n > m^-D / 2")?;
        let factor = one.clone() / &two + (&one + &self.delta) / (&one - &self.delta);
        check(&self.epsilon_prime * factor == *epsilon, "eps' = eps / (1/2 + (1+δ)/(1-δ))")?;
        let inner = self
            .fptas
            .as_ref()
            .ok_or_else(|| "missing inner run".to_string())?;
        inner.replay_chain(&self.epsilon_prime)?;
        check(
            inner.objective_value == value * rat_from_int(&self.multiplier) - &last.lower,
            "inner objective = multiplier * value - L_n",
        )
    }
}

impl Solution {
    /// Replays the attached certificate, if any.
    pub fn replay(&self) -> Result<(), String> {
        match &self.certificate {
            None => Ok(()),
            Some(Certificate::Descent(c)) => {
                c.replay()?;
                check(c.epsilon == self.guarantee.epsilon, "epsilon")?;
                check(rat_from_int(&c.final_value) == self.value, "value")
            }
            Some(Certificate::Fptas(c)) => c.replay(&self.value, &self.guarantee.epsilon),
            Some(Certificate::Weak(c)) => c.replay(&self.value, &self.guarantee.epsilon),
        }
    }

    pub(crate) fn exact(point: MixedPoint, value: ExactRat, kind: GuaranteeKind) -> Self {
        Self {
            point,
            value,
            guarantee: Guarantee {
                kind,
                epsilon: ExactRat::zero(),
            },
            certificate: None,
        }
    }
}
