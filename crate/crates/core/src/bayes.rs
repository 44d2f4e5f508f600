//! The inverse problem: given p successes and q failures, what is the chance
//! that the unknown success probability lies between two given bounds.
//!
//! A Beta prior (uniform by default, the classical postulate) conjugates
//! with binomial data, so the posterior is Beta(a + p, b + q) and interval
//! probabilities reduce to the regularized incomplete beta function. Two
//! evaluation routes are kept deliberately separate: exact polynomial
//! integration in rationals for integer shapes, and a continued fraction in
//! floats for everything else. Endpoints carry no mass, so open and closed
//! intervals are not distinguished.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::binomial::NumericMode;
use crate::error::{Error, Result};
use crate::rational::{ln_rational_f64, rational_to_f64, Prob, Rational};

/// Largest a + b for which the exact polynomial route is offered; the term
/// count is b and the binomial coefficients stay modest below this.
pub const EXACT_SHAPE_LIMIT: u64 = 62;

/// Integer shapes up to this total use an exact factorial ratio for ln B,
/// sidestepping the cancellation of differenced log-gammas.
const EXACT_LN_BETA_LIMIT: f64 = 20_001.0;

const CF_MAX_ITER: usize = 300;

/// Beta distribution shapes; both must be positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BetaParams {
    a: f64,
    b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return Err(Error::Domain(format!(
                "beta shapes must be positive and finite, got ({a}, {b})"
            )));
        }
        Ok(BetaParams { a, b })
    }

    /// The uniform prior, Beta(1, 1).
    pub fn uniform() -> Self {
        BetaParams { a: 1.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Integer rendering of the shapes when both are exact integers.
    fn as_integers(&self) -> Option<(u64, u64)> {
        if self.a.fract() == 0.0 && self.b.fract() == 0.0 {
            match (u64::try_from(self.a as i64), u64::try_from(self.b as i64)) {
                (Ok(a), Ok(b)) if a >= 1 && b >= 1 => Some((a, b)),
                _ => None,
            }
        } else {
            None
        }
    }
}

impl<'de> serde::Deserialize<'de> for BetaParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Raw {
            a: f64,
            b: f64,
        }
        let raw = Raw::deserialize(d)?;
        BetaParams::new(raw.a, raw.b).map_err(serde::de::Error::custom)
    }
}

/// Success and failure tallies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ObservedCounts {
    pub p: u64,
    pub q: u64,
}

impl ObservedCounts {
    pub fn new(p: u64, q: u64) -> Self {
        ObservedCounts { p, q }
    }

    pub fn total(&self) -> u64 {
        self.p + self.q
    }

    /// Observed success ratio p/(p+q); None with no data.
    pub fn ratio(&self) -> Option<Rational> {
        if self.total() == 0 {
            None
        } else {
            Some(Rational::new(self.p.into(), self.total().into()))
        }
    }
}

/// A probability interval [l1, l2] within [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalQuery {
    l1: Rational,
    l2: Rational,
}

impl IntervalQuery {
    pub fn new(l1: Rational, l2: Rational) -> Result<Self> {
        if l1.is_negative() || l2 > Rational::one() || l1 > l2 {
            return Err(Error::Domain(format!(
                "need 0 <= l1 <= l2 <= 1, got [{l1}, {l2}]"
            )));
        }
        Ok(IntervalQuery { l1, l2 })
    }

    pub fn l1(&self) -> &Rational {
        &self.l1
    }

    pub fn l2(&self) -> &Rational {
        &self.l2
    }
}

/// Conjugate update: Beta(a, b) with (p, q) observed becomes
/// Beta(a + p, b + q).
pub fn posterior(prior: &BetaParams, data: &ObservedCounts) -> BetaParams {
    BetaParams {
        a: prior.a + data.p as f64,
        b: prior.b + data.q as f64,
    }
}

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// B(a, b) = (a-1)! (b-1)! / (a+b-1)! for integer shapes, exactly.
fn beta_exact(a: u64, b: u64) -> Rational {
    let num = factorial(a - 1) * factorial(b - 1);
    Rational::new(BigInt::from(num), BigInt::from(factorial(a + b - 1)))
}

/// Exact regularized incomplete beta at a rational point, integer shapes:
/// expand (1-t)^(b-1) binomially and integrate term by term.
fn exact_reg_beta(x: &Rational, a: u64, b: u64) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let mut sum = Rational::zero();
    let mut coef = BigInt::one(); // (-1)^j C(b-1, j)
    let mut xpow = x.pow(a as i32);
    for j in 0..b {
        sum += Rational::from_integer(coef.clone()) * &xpow
            / Rational::from_integer(BigInt::from(a + j));
        coef = -coef * BigInt::from(b - 1 - j) / BigInt::from(j + 1);
        xpow *= x;
    }
    sum / beta_exact(a, b)
}

/// ln B(a, b), from the exact factorial ratio when the shapes are integers
/// of workable size (one correctly-rounded logarithm instead of three
/// differenced log-gammas), from log-gamma otherwise.
fn ln_beta(a: f64, b: f64) -> f64 {
    if a.fract() == 0.0 && b.fract() == 0.0 && a >= 1.0 && b >= 1.0 && a + b <= EXACT_LN_BETA_LIMIT
    {
        ln_rational_f64(&beta_exact(a as u64, b as u64))
    } else {
        libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
    }
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
/// Returns the fraction value and whether it converged within the cap.
fn betacf(a: f64, b: f64, x: f64) -> (f64, bool) {
    const FPMIN: f64 = 1e-300;
    const EPS: f64 = 3e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return (h, true);
        }
    }
    (h, false)
}

/// Regularized incomplete beta I(x; a, b) by continued fraction, with the
/// symmetry switch at x = (a+1)/(a+b+2) so the fraction always converges
/// from its fast side. Exact 0 and 1 at the endpoints.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!(
            "shapes must be positive and finite, got ({a}, {b})"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1], got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_bt = a * x.ln() + b * libm::log1p(-x) - ln_beta(a, b);
    let bt = ln_bt.exp();
    let direct = x < (a + 1.0) / (a + b + 2.0);
    let (h, converged) = if direct {
        betacf(a, b, x)
    } else {
        betacf(b, a, 1.0 - x)
    };
    let value = if direct { bt * h / a } else { 1.0 - bt * h / b };
    if converged {
        Ok(value.clamp(0.0, 1.0))
    } else {
        Err(Error::NonConvergence {
            partial: value.clamp(0.0, 1.0),
        })
    }
}

/// P(l1 < theta < l2 | data) under the conjugate posterior.
///
/// Exact mode needs integer posterior shapes with a + b <= 62 (the
/// polynomial route; beyond that the continued fraction is authoritative)
/// and returns an exact rational; Float mode differences two incomplete
/// betas.
pub fn posterior_interval_prob(
    prior: &BetaParams,
    data: &ObservedCounts,
    query: &IntervalQuery,
    mode: NumericMode,
) -> Result<Prob> {
    let post = posterior(prior, data);
    match mode {
        NumericMode::Exact => {
            let (a, b) = post.as_integers().ok_or_else(|| {
                Error::UnsupportedSpec(format!(
                    "exact mode needs integer posterior shapes, got ({}, {})",
                    post.a, post.b
                ))
            })?;
            if a + b > EXACT_SHAPE_LIMIT {
                return Err(Error::UnsupportedSpec(format!(
                    "exact mode limited to a + b <= {EXACT_SHAPE_LIMIT}, got {}",
                    a + b
                )));
            }
            Ok(Prob::Exact(
                exact_reg_beta(&query.l2, a, b) - exact_reg_beta(&query.l1, a, b),
            ))
        }
        NumericMode::Float { .. } => {
            mode.validate()?;
            let hi = regularized_incomplete_beta(rational_to_f64(&query.l2), post.a, post.b)?;
            let lo = regularized_incomplete_beta(rational_to_f64(&query.l1), post.a, post.b)?;
            Ok(Prob::Float((hi - lo).clamp(0.0, 1.0)))
        }
    }
}

/// Hartley's question: the posterior chance that theta deviates from the
/// observed ratio p/(p+q) by less than eps, i.e. the posterior mass of
/// [p/(p+q) - eps, p/(p+q) + eps] clipped to [0, 1].
pub fn hartley_deviation(
    prior: &BetaParams,
    data: &ObservedCounts,
    eps: &Rational,
    mode: NumericMode,
) -> Result<Prob> {
    if !eps.is_positive() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let center = data
        .ratio()
        .ok_or_else(|| Error::Domain("no observed ratio with p + q = 0".into()))?;
    let l1 = (&center - eps).max(Rational::zero());
    let l2 = (&center + eps).min(Rational::one());
    let query = IntervalQuery::new(l1, l2)?;
    posterior_interval_prob(prior, data, &query, mode)
}
