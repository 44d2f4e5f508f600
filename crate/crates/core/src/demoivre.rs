//! De Moivre's approximation machinery.
//!
//! The Stirling-De Moivre series
//!
//!   ln n! ~ (n + 1/2) ln n - n + ln(2 pi)/2
//!             + sum_k B_{2k} / ( 2k (2k-1) n^(2k-1) )
//!
//! is asymptotic, not convergent: for fixed n the term magnitudes fall to a
//! minimum and then grow without bound. Terms are kept as exact rationals so
//! the turning point is decided by integer comparisons, not rounding.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use std::f64::consts::PI;
use std::sync::Mutex;

use crate::binomial::{BinomialModel, NumericMode};
use crate::error::{Error, Result};
use crate::rational::{big_ratio_to_f64, rational_to_f64, Rational};
use crate::special::phi;

/// Largest n for which exact summation is the default reference path.
pub const EXACT_EVAL_LIMIT: u64 = 5000;

/// How far past the requested term count the divergence scan looks.
const SCAN_MARGIN: u64 = 40;

static BERNOULLI_CACHE: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// B_m in the B_1 = -1/2 convention, computed by the defining recurrence
///   B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
/// and cached; the cache only ever grows and entries never change.
pub fn bernoulli_number(m: u64) -> Rational {
    let mut cache = BERNOULLI_CACHE.lock().expect("bernoulli cache poisoned");
    if cache.is_empty() {
        cache.push(Rational::one());
    }
    while (cache.len() as u64) <= m {
        let mm = cache.len() as u64; // computing B_mm
        // Odd values beyond 1 are zero; still derived, not asserted.
        let mut acc = Rational::zero();
        let mut c = BigUint::one(); // C(mm+1, j), updated incrementally
        for (j, b) in cache.iter().enumerate() {
            if j > 0 {
                // C(mm+1, j) = C(mm+1, j-1) * (mm+2-j) / j.
                c = c * (mm + 2 - j as u64) / BigUint::from(j);
            }
            if !b.is_zero() {
                acc += b * Rational::from_integer(BigInt::from(c.clone()));
            }
        }
        let b_mm = -acc / Rational::from_integer(BigInt::from(mm + 1));
        cache.push(b_mm);
    }
    cache[m as usize].clone()
}

/// One expansion of the correction series at a fixed n.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesExpansion {
    pub n: u64,
    /// t_1..t_k_max as exact rationals, signs included.
    pub terms: Vec<Rational>,
    /// 1-based index of the smallest-magnitude term of the full series, when
    /// the turning point lies within the scan horizon (k_max plus a margin).
    pub min_abs_index: Option<u64>,
    /// Smallest k with |t_{k+1}| > |t_k|; None when the magnitudes are still
    /// strictly decreasing everywhere the scan looked.
    pub diverges_after: Option<u64>,
}

fn series_term(n: u64, k: u64) -> Rational {
    let denom = BigUint::from(2 * k) * BigUint::from(2 * k - 1) * BigUint::from(n).pow(
        u32::try_from(2 * k - 1).expect("term index out of range"),
    );
    bernoulli_number(2 * k) / Rational::from_integer(BigInt::from(denom))
}

/// First k_max terms of the series at n, plus divergence metadata.
pub fn series_terms(n: u64, k_max: u64) -> Result<SeriesExpansion> {
    if n == 0 {
        return Err(Error::Domain("series is defined for n >= 1".into()));
    }
    if k_max == 0 {
        return Err(Error::Domain("need at least one series term".into()));
    }
    let mut terms = Vec::with_capacity(k_max as usize);
    let mut min_abs_index = None;
    let mut diverges_after = None;
    let mut prev_abs: Option<Rational> = None;
    for k in 1..=(k_max + SCAN_MARGIN) {
        let t = series_term(n, k);
        let abs = t.abs();
        if k <= k_max {
            terms.push(t);
        }
        if let Some(p) = &prev_abs {
            if abs > *p && diverges_after.is_none() {
                diverges_after = Some(k - 1);
                min_abs_index = Some(k - 1);
            }
        }
        if k >= k_max && diverges_after.is_some() {
            break;
        }
        prev_abs = Some(abs);
    }
    Ok(SeriesExpansion {
        n,
        terms,
        min_abs_index,
        diverges_after,
    })
}

impl SeriesExpansion {
    /// Terms as doubles, correctly rounded from the exact rationals.
    pub fn terms_f64(&self) -> Vec<f64> {
        self.terms.iter().map(rational_to_f64).collect()
    }
}

/// Truncated expansion for ln n!; k_terms = 0 gives the bare Stirling form.
///
/// Accuracy is governed by the first omitted term, so the best possible
/// truncation stops at the series' smallest-magnitude term.
pub fn log_factorial(n: u64, k_terms: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("log_factorial needs n >= 1".into()));
    }
    let nf = n as f64;
    let mut approx = (nf + 0.5) * nf.ln() - nf + 0.5 * (2.0 * PI).ln();
    for k in 1..=k_terms {
        // Convert each exact term separately: the rationals stay moderate as
        // values even when their parts are astronomical.
        approx += rational_to_f64(&series_term(n, k));
    }
    Ok(approx)
}

/// An exact value alongside its approximation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ApproxComparison {
    pub exact: f64,
    pub approx: f64,
    pub abs_error: f64,
    pub rel_error: f64,
}

impl ApproxComparison {
    fn new(exact: f64, approx: f64) -> Self {
        let abs_error = (exact - approx).abs();
        let rel_error = if exact != 0.0 {
            abs_error / exact.abs()
        } else if abs_error == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        ApproxComparison {
            exact,
            approx,
            abs_error,
            rel_error,
        }
    }
}

/// Central binomial mass C(n, n/2) / 2^n against its limit 2/sqrt(2 pi n).
///
/// The exact side is computed as a big-integer ratio and rounded once; the
/// relative error decays like 1/(4n).
pub fn middle_term_ratio(n: u64) -> Result<ApproxComparison> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::Domain(format!(
            "middle term needs a positive even n, got {n}"
        )));
    }
    let c = crate::binomial::binom_biguint(n, n / 2);
    let exact = big_ratio_to_f64(&c, &(BigUint::one() << n));
    let approx = (2.0 / (PI * n as f64)).sqrt();
    Ok(ApproxComparison::new(exact, approx))
}

/// Normal approximation to the deviation-band probability
/// P(|X/n - theta| < eps).
///
/// With `continuity_correction` the normal integral runs over
/// [k_lo - 1/2, k_hi + 1/2] where k_lo..=k_hi are exactly the strict-interior
/// lattice points of the band, so both sides measure the same event; without
/// it the raw band edges n(theta +- eps) are used. The reference side is an
/// exact rational sum up to n = 5000 and the compensated float sum beyond;
/// an empty band compares 0 against 0.
pub fn normal_deviation_approx(
    model: &BinomialModel,
    eps: &Rational,
    continuity_correction: bool,
) -> Result<ApproxComparison> {
    let theta = model.theta();
    if theta.is_zero() || *theta == Rational::one() {
        return Err(Error::Domain(
            "normal approximation needs 0 < theta < 1".into(),
        ));
    }
    let mode = if model.n() <= EXACT_EVAL_LIMIT {
        NumericMode::Exact
    } else {
        NumericMode::FLOAT64
    };
    let exact = model.deviation_prob(eps, mode)?.to_f64();

    let n = model.n() as f64;
    let th = rational_to_f64(theta);
    let sigma = (n * th * (1.0 - th)).sqrt();
    let mean = n * th;
    let approx = if continuity_correction {
        match model.deviation_band(eps)? {
            None => 0.0,
            Some((k_lo, k_hi)) => {
                let z1 = (k_lo as f64 - 0.5 - mean) / sigma;
                let z2 = (k_hi as f64 + 0.5 - mean) / sigma;
                phi(z2) - phi(z1)
            }
        }
    } else {
        let half_width = n * rational_to_f64(eps);
        phi(half_width / sigma) - phi(-half_width / sigma)
    };
    Ok(ApproxComparison::new(exact, approx))
}
