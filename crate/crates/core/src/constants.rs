//! Numeric constants and the triple `r <= K <= R`.
//!
//! Every inequality is evaluated in exact rational arithmetic; integer
//! ceilings are taken last.

use num::bigint::BigInt;
use num::rational::{BigRational, Ratio};
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn ser_ratio<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Paper,
    Desk,
}

pub const MORSE_FORMULA: &str = "D(lambda,epsilon) = ceil((delta+1)*(lambda^2 + lambda*epsilon)) + delta - 1";
pub const ETA_FORMULA: &str = "eta = Q + 4*delta + D(1,0)";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantLedger {
    pub delta: i64,
    #[serde(rename = "C")]
    pub c: i64,
    #[serde(rename = "D")]
    pub d: i64,
    #[serde(rename = "D_lambda_epsilon")]
    pub d_lambda_epsilon: i64,
    #[serde(rename = "M")]
    pub m: i64,
    pub eta: i64,
    pub eta_overridden: bool,
    pub n: i64,
    #[serde(serialize_with = "ser_ratio")]
    pub a: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub k1: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub k2: Rational,
    #[serde(rename = "Q")]
    pub q: i64,
    #[serde(serialize_with = "ser_ratio")]
    pub lambda: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub epsilon: Rational,
    pub r: i64,
    #[serde(rename = "K")]
    pub k: i64,
    #[serde(rename = "R")]
    pub big_r: i64,
    pub mode: Mode,
    pub warnings: Vec<String>,
    pub provenance: Vec<String>,
}

/// Inputs shared by both modes. `eta` overrides the formula when set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parameters {
    pub delta: i64,
    pub q: i64,
    pub lambda: Rational,
    pub epsilon: Rational,
    pub n: i64,
    pub a: Rational,
    pub k1: Rational,
    pub k2: Rational,
    pub eta: Option<i64>,
}

impl Default for Parameters {
    fn default() -> Self {
        Parameters {
            delta: 0,
            q: 0,
            lambda: Rational::one(),
            epsilon: Rational::zero(),
            n: 2,
            a: Rational::from_integer(2),
            k1: Rational::one(),
            k2: Rational::one(),
            eta: None,
        }
    }
}

fn ceil(x: Rational) -> i64 {
    x.ceil().to_integer()
}

pub fn morse_constant(delta: i64, lambda: Rational, epsilon: Rational) -> i64 {
    ceil(Rational::from_integer(delta + 1) * (lambda * lambda + lambda * epsilon)) + delta - 1
}

fn big(x: Rational) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

/// Least integer `t` with `a^t > x^2`, i.e. the least integer exceeding `2·log_a(x)`.
fn least_exceeding_double_log(a: Rational, x: Rational) -> i64 {
    let a = big(a);
    let target = big(x) * big(x);
    let pow = |t: i64| -> BigRational {
        let p = num::pow(a.clone(), t.unsigned_abs() as usize);
        if t < 0 {
            p.recip()
        } else {
            p
        }
    };
    let mut t = 0i64;
    if pow(0) > target {
        while pow(t - 1) > target {
            t -= 1;
        }
    } else {
        while pow(t) <= target {
            t += 1;
        }
    }
    t
}

struct Derived {
    c: i64,
    m: i64,
    d: i64,
    d_le: i64,
    eta: i64,
    /// Least `r` satisfying the projecting-paths bound and `r > eta`.
    r_min: i64,
}

fn validate(p: &Parameters) -> Result<()> {
    let fail = |m: &str| Err(Error::Domain(m.into()));
    if p.delta < 0 || p.q < 0 {
        return fail("delta and Q must be non-negative");
    }
    if p.lambda < Rational::one() || p.epsilon < Rational::zero() {
        return fail("need lambda >= 1 and epsilon >= 0");
    }
    if p.n < 2 {
        return fail("need n >= 2");
    }
    if p.a <= Rational::one() {
        return fail("need a > 1");
    }
    if !p.k1.is_positive() || !p.k2.is_positive() || p.k1 > p.k2 {
        return fail("need 0 < k1 <= k2");
    }
    if p.eta.is_some_and(|e| e < 0) {
        return fail("eta must be non-negative");
    }
    Ok(())
}

fn derive(p: &Parameters) -> Derived {
    let c = 3 * p.delta;
    let m = 6 * c + 2 * p.delta + 3;
    let d = morse_constant(p.delta, Rational::one(), Rational::zero());
    let d_le = morse_constant(p.delta, p.lambda, p.epsilon);
    let eta = p.eta.unwrap_or(p.q + 4 * p.delta + d);
    let x = p.k2 * Rational::from_integer(p.n - 1) / (p.k1 * (Rational::one() - p.a.recip()));
    let z = m + 8 * p.delta + eta + c;
    let r_min = (z + least_exceeding_double_log(p.a, x)).max(eta + 1).max(0);
    Derived { c, m, d, d_le, eta, r_min }
}

fn ledger(p: &Parameters, dv: &Derived, r: i64, k: i64, big_r: i64, mode: Mode) -> ConstantLedger {
    let mut warnings = Vec::new();
    if k < r + p.q + p.delta + dv.c {
        warnings.push(format!("K = {k} is below r + Q + delta + C = {}", r + p.q + p.delta + dv.c));
    }
    let bound = 4 * p.delta + p.q + (r + 4 * p.delta + 1).max(k);
    if big_r <= bound {
        warnings.push(format!("R = {big_r} does not exceed 4delta + Q + max(r + 4delta + 1, K) = {bound}"));
    }
    if r < dv.r_min {
        warnings.push(format!(
            "r = {r} is below {} (projecting-paths bound and r > eta)",
            dv.r_min
        ));
    }
    ConstantLedger {
        delta: p.delta,
        c: dv.c,
        d: dv.d,
        d_lambda_epsilon: dv.d_le,
        m: dv.m,
        eta: dv.eta,
        eta_overridden: p.eta.is_some(),
        n: p.n,
        a: p.a,
        k1: p.k1,
        k2: p.k2,
        q: p.q,
        lambda: p.lambda,
        epsilon: p.epsilon,
        r,
        k,
        big_r,
        mode,
        warnings,
        provenance: vec![
            "C = 3*delta".into(),
            "M = 6C + 2*delta + 3".into(),
            MORSE_FORMULA.into(),
            ETA_FORMULA.into(),
            "r > 2 log_a(k2 (n-1) / (k1 (1 - 1/a))) + M + 8*delta + eta + C, r > eta".into(),
            "K >= r + Q + delta + C".into(),
            "R > 4*delta + Q + max(r + 4*delta + 1, K)".into(),
        ],
    }
}

/// Smallest `r`, `K`, `R` satisfying all three inequalities.
pub fn derive_paper_constants(p: &Parameters) -> Result<ConstantLedger> {
    validate(p)?;
    let dv = derive(p);
    let r = dv.r_min;
    let k = r + p.q + p.delta + dv.c;
    let big_r = 4 * p.delta + p.q + (r + 4 * p.delta + 1).max(k) + 1;
    Ok(ledger(p, &dv, r, k, big_r, Mode::Paper))
}

/// A user triple, with one warning per violated inequality.
pub fn desk_constants(p: &Parameters, r: i64, k: i64, big_r: i64) -> Result<ConstantLedger> {
    validate(p)?;
    if r < 0 || r > k || k > big_r {
        return Err(Error::Domain(format!(
            "need 0 <= r <= K <= R, got r={r}, K={k}, R={big_r}"
        )));
    }
    let dv = derive(p);
    Ok(ledger(p, &dv, r, k, big_r, Mode::Desk))
}

impl ConstantLedger {
    pub fn r(&self) -> usize {
        self.r as usize
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn big_r(&self) -> usize {
        self.big_r as usize
    }

    /// Same parameters with another triple.
    pub fn with_triple(&self, r: i64, k: i64, big_r: i64) -> Result<ConstantLedger> {
        let p = Parameters {
            delta: self.delta,
            q: self.q,
            lambda: self.lambda,
            epsilon: self.epsilon,
            n: self.n,
            a: self.a,
            k1: self.k1,
            k2: self.k2,
            eta: self.eta_overridden.then_some(self.eta),
        };
        desk_constants(&p, r, k, big_r)
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64().unwrap_or(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_example() {
        let p = Parameters {
            eta: Some(0),
            ..Parameters::default()
        };
        let l = derive_paper_constants(&p).unwrap();
        assert_eq!((l.c, l.m), (0, 3));
        assert_eq!((l.r, l.k, l.big_r), (6, 6, 8));
        assert!(l.warnings.is_empty());
    }

    #[test]
    fn double_log_threshold() {
        let two = Rational::from_integer(2);
        assert_eq!(least_exceeding_double_log(two, two), 3);
        assert_eq!(least_exceeding_double_log(two, Rational::one()), 1);
        assert_eq!(least_exceeding_double_log(two, Rational::new(1, 4)), -3);
    }

    #[test]
    fn morse_is_zero_for_trees() {
        assert_eq!(morse_constant(0, Rational::one(), Rational::zero()), 0);
        assert!(morse_constant(1, Rational::one(), Rational::zero()) > 0);
    }

    #[test]
    fn desk_examples() {
        let p = Parameters::default();
        assert!(!desk_constants(&p, 1, 2, 3).unwrap().warnings.is_empty());
        assert!(desk_constants(&p, 3, 2, 5).is_err());
        assert!(desk_constants(&p, 6, 6, 12).unwrap().warnings.is_empty());
    }
}
