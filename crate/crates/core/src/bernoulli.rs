//! Bernoulli's direct problem: how many trials make a frequency estimate
//! morally certain.
//!
//! Two answers are offered side by side. `bernoulli_bound_n` reproduces the
//! classical closed-form bound from Ars Conjectandi, driven by exact integer
//! power comparisons so the ceilings never wobble on a rounding error.
//! `exact_search_n` finds the true minimal n by evaluating deviation
//! probabilities outright; the gap between the two is the price of a
//! pre-asymptotic worst-case argument.

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive};

use crate::binomial::{BinomialModel, NumericMode};
use crate::demoivre::EXACT_EVAL_LIMIT;
use crate::error::{Error, Result};
use crate::kernel;
use crate::rational::{rational_to_f64, Prob, Rational};

/// Float-mode comparisons concede this much to absorb summation rounding.
const TARGET_CUSHION: f64 = 9.094947017729282e-13; // 2^-40

/// How far past an unbracketed range the failure path will still sweep.
const SALVAGE_SWEEP_LIMIT: u64 = 65_536;

/// A frequency-certainty problem in Bernoulli's own parameterization:
/// theta = r/t, half-width eps = 1/t, and odds c : 1 on landing inside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoralCertaintySpec {
    r: u64,
    s: u64,
    t: u64,
    odds: u64,
}

impl MoralCertaintySpec {
    /// Validates that eps is a unit fraction 1/t and theta an exact lattice
    /// point r/t, the only shape the classical machinery covers.
    pub fn new(theta: &Rational, eps: &Rational, odds: u64) -> Result<Self> {
        if !eps.numer().is_one() || !eps.denom().is_positive() {
            return Err(Error::UnsupportedSpec(format!(
                "band half-width must be a unit fraction 1/t, got {eps}"
            )));
        }
        let t = eps
            .denom()
            .to_u64()
            .ok_or_else(|| Error::UnsupportedSpec("t exceeds u64".into()))?;
        let r_rat = theta * Rational::from_integer(eps.denom().clone());
        if !r_rat.is_integer() {
            return Err(Error::UnsupportedSpec(format!(
                "theta = {theta} is not a multiple of 1/{t}"
            )));
        }
        let r = r_rat
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::UnsupportedSpec("r exceeds u64".into()))?;
        if r < 1 || r > t - 1 {
            return Err(Error::UnsupportedSpec(format!(
                "need 1 <= r <= t-1, got r = {r}, t = {t}"
            )));
        }
        if odds < 1 {
            return Err(Error::UnsupportedSpec("odds must be at least 1".into()));
        }
        Ok(MoralCertaintySpec {
            r,
            s: t - r,
            t,
            odds,
        })
    }

    /// Builds a `MoralCertaintySpec` from the integer triple directly;
    /// t = r + s.
    pub fn from_parts(r: u64, s: u64, odds: u64) -> Result<Self> {
        if r < 1 || s < 1 {
            return Err(Error::UnsupportedSpec(
                "both fertile and sterile counts must be positive".into(),
            ));
        }
        if odds < 1 {
            return Err(Error::UnsupportedSpec("odds must be at least 1".into()));
        }
        Ok(MoralCertaintySpec {
            r,
            s,
            t: r + s,
            odds,
        })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn odds(&self) -> u64 {
        self.odds
    }

    pub fn theta(&self) -> Rational {
        Rational::new(self.r.into(), self.t.into())
    }

    pub fn eps(&self) -> Rational {
        Rational::new(1.into(), self.t.into())
    }

    /// Target probability c/(c+1) implied by the odds.
    pub fn target(&self) -> Rational {
        Rational::new(self.odds.into(), (self.odds + 1).into())
    }
}

/// Converts a probability target into odds form, c = round(p / (1-p)).
pub fn odds_from_target(target: &Rational) -> Result<u64> {
    if !target.is_positive() || *target >= Rational::one() {
        return Err(Error::Domain(format!(
            "target probability must lie in (0, 1), got {target}"
        )));
    }
    let c = (target / (Rational::one() - target)).round();
    let c = c.to_integer().to_u64().ok_or_else(|| {
        Error::UnsupportedSpec("odds overflow u64; target too close to 1".into())
    })?;
    if c < 1 {
        return Err(Error::UnsupportedSpec(format!(
            "target {target} is below even odds; no integer c >= 1 matches"
        )));
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SampleSizeMethod {
    BernoulliBound,
    ExactSearch,
}

/// A sample-size answer, tagged with how it was obtained.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SampleSizeResult {
    pub n: u64,
    /// Deviation probability at n; exact when n was evaluated exactly.
    pub achieved_prob: Prob,
    pub method: SampleSizeMethod,
    /// For searches: whether some m in (n, n + 10t] fell back below target
    /// (lattice effects make the crossing locally unstable). None for the
    /// closed-form bound, where no window is examined.
    pub dips_below_in_window: Option<bool>,
}

/// The bound's intermediate quantities, exposed for display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BoundDetail {
    pub m1: u64,
    pub n1: u64,
    pub m2: u64,
    pub n2: u64,
    pub n: u64,
}

/// Smallest m >= 0 with ((num)/(den))^m >= threshold, for num > den >= 1,
/// decided by exact integer comparison num^m >= threshold * den^m.
fn smallest_power_at_least(num: u64, den: u64, threshold: &BigUint) -> u64 {
    if *threshold <= BigUint::one() {
        return 0;
    }
    let num = BigUint::from(num);
    let den = BigUint::from(den);
    let mut pow_num = BigUint::one();
    let mut rhs = threshold.clone();
    let mut m = 0u64;
    loop {
        if pow_num >= rhs {
            return m;
        }
        pow_num *= &num;
        rhs *= &den;
        m += 1;
    }
}

/// Classical sample-size bound: with k = c(s-1), m1 is the smallest m with
/// (1 + 1/r)^m >= k, N1 = m1 + ceil(s(m1 - 1)/(r + 1)), symmetrically for
/// the other tail, and n = t * max(N1, N2). The m's are floored at 1: the
/// logarithm form yields 0 when c(s-1) = 1, and a bound below one block of
/// t trials is meaningless.
pub fn bernoulli_bound_detail(spec: &MoralCertaintySpec) -> Result<BoundDetail> {
    if spec.r < 2 || spec.s < 2 {
        return Err(Error::UnsupportedSpec(format!(
            "the bound needs r >= 2 and s >= 2 (log arguments c(s-1), c(r-1) \
             must be >= 1), got r = {}, s = {}",
            spec.r, spec.s
        )));
    }
    let (r, s, c) = (spec.r, spec.s, spec.odds);
    let m1 = smallest_power_at_least(r + 1, r, &(BigUint::from(c) * (s - 1))).max(1);
    let n1 = m1 + (s * (m1 - 1)).div_ceil(r + 1);
    let m2 = smallest_power_at_least(s + 1, s, &(BigUint::from(c) * (r - 1))).max(1);
    let n2 = m2 + (r * (m2 - 1)).div_ceil(s + 1);
    let n = spec
        .t
        .checked_mul(n1.max(n2))
        .ok_or_else(|| Error::Resource("bound overflows u64".into()))?;
    Ok(BoundDetail { m1, n1, m2, n2, n })
}

/// The bound packaged with the deviation probability it actually achieves.
pub fn bernoulli_bound_n(spec: &MoralCertaintySpec) -> Result<SampleSizeResult> {
    let detail = bernoulli_bound_detail(spec)?;
    let model = BinomialModel::new(detail.n, spec.theta())?;
    let mode = if detail.n <= EXACT_EVAL_LIMIT {
        NumericMode::Exact
    } else {
        NumericMode::FLOAT64
    };
    let achieved_prob = model.deviation_prob(&spec.eps(), mode)?;
    Ok(SampleSizeResult {
        n: detail.n,
        achieved_prob,
        method: SampleSizeMethod::BernoulliBound,
        dips_below_in_window: None,
    })
}

struct SearchCtx<'a> {
    theta: &'a Rational,
    eps: &'a Rational,
    target: &'a Rational,
    target_f64: f64,
}

impl SearchCtx<'_> {
    fn prob_at(&self, n: u64) -> Prob {
        let model = BinomialModel::new(n, self.theta.clone()).expect("validated theta");
        let mode = if n <= EXACT_EVAL_LIMIT {
            NumericMode::Exact
        } else {
            NumericMode::FLOAT64
        };
        model
            .deviation_prob(self.eps, mode)
            .expect("validated eps and theta")
    }

    /// Exact comparison where the probability is exact; in float mode the
    /// target concedes 2^-40 so summation rounding cannot manufacture a miss.
    fn meets(&self, n: u64) -> bool {
        match self.prob_at(n) {
            Prob::Exact(p) => p >= *self.target,
            Prob::Float(p) => p >= self.target_f64 - TARGET_CUSHION,
        }
    }
}

/// Smallest n <= n_max whose deviation probability reaches the target.
///
/// Deviation probabilities are not monotone in n (the band gains and loses
/// lattice points), so the bracket found by doubling is backfilled linearly
/// and the answer is the first crossing inside it; the result additionally
/// flags whether the probability dips back below target within the next 10t
/// trials. Exact arithmetic decides n <= 5000, floats beyond.
pub fn exact_search_n(
    theta: &Rational,
    eps: &Rational,
    target: &Rational,
    n_max: u64,
) -> Result<SampleSizeResult> {
    if !eps.is_positive() {
        return Err(Error::Domain("eps must be positive".into()));
    }
    if !target.is_positive() || *target >= Rational::one() {
        return Err(Error::Domain(format!(
            "target must lie in (0, 1), got {target}"
        )));
    }
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    BinomialModel::new(1, theta.clone())?; // validate theta once
    let ctx = SearchCtx {
        theta,
        eps,
        target,
        target_f64: rational_to_f64(target),
    };

    let mut probes: Vec<(u64, f64)> = Vec::new();
    let mut probe = |n: u64| -> bool {
        let p = ctx.prob_at(n);
        probes.push((n, p.to_f64()));
        match p {
            Prob::Exact(p) => p >= *target,
            Prob::Float(p) => p >= ctx.target_f64 - TARGET_CUSHION,
        }
    };

    let found = if probe(1) {
        Some(1)
    } else {
        // Double until a probe meets the target, then take the first
        // crossing inside the final bracket (lo known false, hi known true).
        let mut lo = 1u64;
        let mut bracket_hi = None;
        loop {
            let hi = lo.saturating_mul(2).min(n_max);
            if probe(hi) {
                bracket_hi = Some(hi);
                break;
            }
            if hi == n_max {
                break;
            }
            lo = hi;
        }
        match bracket_hi {
            Some(hi) => kernel::first_match(lo + 1, hi, |n| ctx.meets(n)),
            // No probe met the target. A crossing could still hide between
            // probes; sweep what is affordable before giving up.
            None if n_max - lo <= SALVAGE_SWEEP_LIMIT => {
                kernel::first_match(lo + 1, n_max, |n| ctx.meets(n))
            }
            None => None,
        }
    };

    match found {
        Some(n) => {
            let d = eps.denom().to_u64().unwrap_or(u64::MAX);
            let window_hi = n.saturating_add(d.saturating_mul(10)).min(n_max);
            let dips = kernel::first_match(n + 1, window_hi, |m| !ctx.meets(m)).is_some();
            Ok(SampleSizeResult {
                n,
                achieved_prob: ctx.prob_at(n),
                method: SampleSizeMethod::ExactSearch,
                dips_below_in_window: Some(dips),
            })
        }
        None => {
            let (best_n, best_prob) = probes
                .iter()
                .copied()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("at least one probe");
            Err(Error::TargetNotReached {
                n_max,
                best_n,
                best_prob,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    // ====== spec construction ======

    #[test]
    fn spec_accepts_the_classical_shape() {
        let spec = MoralCertaintySpec::new(&r(3, 5), &r(1, 50), 1000).unwrap();
        assert_eq!((spec.r(), spec.s(), spec.t(), spec.odds()), (30, 20, 50, 1000));
        assert_eq!(spec.theta(), r(3, 5));
        assert_eq!(spec.eps(), r(1, 50));
        assert_eq!(spec.target(), r(1000, 1001));
        let same = MoralCertaintySpec::from_parts(30, 20, 1000).unwrap();
        assert_eq!(spec, same);
    }

    #[test]
    fn spec_rejects_non_unit_eps_and_off_lattice_theta() {
        // Unit-fraction is a value property: 2/100 reduces to 1/50 and passes.
        let spec = MoralCertaintySpec::new(&r(3, 5), &r(2, 100), 10).unwrap();
        assert_eq!(spec.t(), 50);
        assert!(MoralCertaintySpec::new(&r(3, 5), &r(3, 100), 10).is_err());
        assert!(MoralCertaintySpec::new(&r(1, 3), &r(1, 50), 10).is_err());
        assert!(MoralCertaintySpec::new(&r(1, 1), &r(1, 50), 10).is_err());
        assert!(MoralCertaintySpec::new(&r(0, 1), &r(1, 50), 10).is_err());
        assert!(MoralCertaintySpec::new(&r(3, 5), &r(1, 50), 0).is_err());
    }

    #[test]
    fn odds_conversion_rounds_the_ratio() {
        assert_eq!(odds_from_target(&r(999, 1000)).unwrap(), 999);
        assert_eq!(odds_from_target(&r(1000, 1001)).unwrap(), 1000);
        assert_eq!(odds_from_target(&r(95, 100)).unwrap(), 19);
        assert_eq!(odds_from_target(&r(1, 2)).unwrap(), 1);
        assert!(odds_from_target(&r(1, 4)).is_err());
        assert!(odds_from_target(&r(1, 1)).is_err());
    }

    // ====== the classical bound ======

    #[test]
    fn bound_reproduces_the_flagship_value() {
        let spec = MoralCertaintySpec::from_parts(30, 20, 1000).unwrap();
        let d = bernoulli_bound_detail(&spec).unwrap();
        assert_eq!(d.m1, 301);
        assert_eq!(d.n1, 495);
        assert_eq!(d.m2, 211);
        assert_eq!(d.n2, 511);
        assert_eq!(d.n, 25_550);
        let res = bernoulli_bound_n(&spec).unwrap();
        assert_eq!(res.n, 25_550);
        assert_eq!(res.method, SampleSizeMethod::BernoulliBound);
        assert_eq!(res.dips_below_in_window, None);
        // At 25,550 trials the guarantee is met with enormous room.
        assert!(res.achieved_prob.to_f64() >= 1000.0 / 1001.0);
        assert!(res.achieved_prob.to_f64() > 0.999_999_99);
    }

    #[test]
    fn probability_target_rounding_lands_on_the_same_n() {
        // 0.999 converts to c = 999; the bound is insensitive to the
        // difference between 999:1 and 1000:1 here.
        let c = odds_from_target(&r(999, 1000)).unwrap();
        let spec = MoralCertaintySpec::from_parts(30, 20, c).unwrap();
        assert_eq!(bernoulli_bound_detail(&spec).unwrap().n, 25_550);
    }

    #[test]
    fn degenerate_logs_floor_at_one_block() {
        // c(s-1) = 1 would send the log form to zero; the floor keeps one
        // block of t trials.
        let spec = MoralCertaintySpec::from_parts(2, 2, 1).unwrap();
        let d = bernoulli_bound_detail(&spec).unwrap();
        assert_eq!((d.m1, d.n1, d.m2, d.n2), (1, 1, 1, 1));
        assert_eq!(d.n, 4);
    }

    #[test]
    fn bound_rejects_unit_counts() {
        let spec = MoralCertaintySpec::from_parts(1, 3, 10).unwrap();
        assert!(matches!(
            bernoulli_bound_detail(&spec),
            Err(Error::UnsupportedSpec(_))
        ));
        let spec = MoralCertaintySpec::from_parts(3, 1, 10).unwrap();
        assert!(bernoulli_bound_detail(&spec).is_err());
    }

    #[test]
    fn exact_power_comparison_matches_float_logs_on_a_grid() {
        // The ceilings must agree with a float evaluation except where the
        // float sits on a knife edge; on this grid they agree everywhere.
        for rr in 2u64..=10 {
            for ss in 2u64..=10 {
                for c in [10u64, 100, 1000] {
                    let m = smallest_power_at_least(rr + 1, rr, &BigUint::from(c * (ss - 1)));
                    let float_m = ((c * (ss - 1)) as f64).ln()
                        / ((rr + 1) as f64 / rr as f64).ln();
                    assert!(
                        (m as f64 - float_m.ceil()).abs() < 1.5,
                        "r={rr} s={ss} c={c}: exact {m} vs float {float_m}"
                    );
                }
            }
        }
    }

    // ====== exact search ======

    #[test]
    fn wide_band_is_certain_from_the_first_trial() {
        let res = exact_search_n(&r(1, 2), &r(3, 5), &r(999, 1000), 100).unwrap();
        assert_eq!(res.n, 1);
        assert_eq!(res.method, SampleSizeMethod::ExactSearch);
        assert_eq!(res.achieved_prob.as_exact().unwrap(), &r(1, 1));
    }

    #[test]
    fn first_crossing_with_dip_right_behind_it() {
        // theta = 1/2, eps = 1/4, target 10/11: n = 11 is the first crossing
        // (1914/2048), and n = 12 drops back below, so the window flag trips.
        let res = exact_search_n(&r(1, 2), &r(1, 4), &r(10, 11), 1000).unwrap();
        assert_eq!(res.n, 11);
        assert_eq!(res.achieved_prob.as_exact().unwrap(), &r(1914, 2048));
        assert_eq!(res.dips_below_in_window, Some(true));
        // The invariant pinning "first": n = 10 must miss.
        let m10 = BinomialModel::new(10, r(1, 2)).unwrap();
        let p10 = m10.deviation_prob(&r(1, 4), NumericMode::Exact).unwrap();
        assert!(p10.as_exact().unwrap() < &r(10, 11));
    }

    #[test]
    fn search_beats_the_conservative_bound_for_the_flagship() {
        let res = exact_search_n(&r(3, 5), &r(1, 50), &r(999, 1000), 30_000).unwrap();
        assert!(res.n < 25_550, "search gave {}", res.n);
        // Normal theory puts the crossing near 6,500.
        assert!((5_500..7_500).contains(&res.n), "search gave {}", res.n);
        assert!(res.achieved_prob.to_f64() >= 0.999);
    }

    #[test]
    fn search_agrees_with_normal_theory_within_fifteen_percent() {
        let res = exact_search_n(&r(1, 2), &r(1, 10), &r(95, 100), 10_000).unwrap();
        let normal_estimate = (1.96f64 / 0.1).powi(2) * 0.25;
        let lo = normal_estimate * 0.85;
        let hi = normal_estimate * 1.15;
        assert!(
            (res.n as f64) >= lo && (res.n as f64) <= hi,
            "n = {} outside [{lo:.1}, {hi:.1}]",
            res.n
        );
        // First-crossing invariant at the reported n.
        let prev = BinomialModel::new(res.n - 1, r(1, 2))
            .unwrap()
            .deviation_prob(&r(1, 10), NumericMode::Exact)
            .unwrap();
        assert!(prev.as_exact().unwrap() < &r(95, 100));
    }

    #[test]
    fn bound_dominates_search_on_small_specs() {
        for (rr, ss, c) in [(2u64, 2u64, 10u64), (3, 4, 100), (5, 5, 100), (4, 2, 10)] {
            let spec = MoralCertaintySpec::from_parts(rr, ss, c).unwrap();
            let bound = bernoulli_bound_n(&spec).unwrap();
            let search =
                exact_search_n(&spec.theta(), &spec.eps(), &spec.target(), bound.n).unwrap();
            assert!(
                bound.n >= search.n,
                "bound {} < search {} at r={rr} s={ss} c={c}",
                bound.n,
                search.n
            );
            assert!(bound.achieved_prob.to_f64() >= search.achieved_prob.to_f64() - 1e-12);
        }
    }

    #[test]
    fn unreachable_target_reports_best_probe() {
        let err = exact_search_n(&r(1, 2), &r(1, 100), &r(999, 1000), 50).unwrap_err();
        match err {
            Error::TargetNotReached {
                n_max,
                best_n,
                best_prob,
            } => {
                assert_eq!(n_max, 50);
                assert!(best_n >= 1 && best_n <= 50);
                assert!(best_prob > 0.0 && best_prob < 0.999);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn search_monotone_in_eps_and_target() {
        // eps shrinks along the loop, so n must not shrink.
        let target = r(95, 100);
        let mut last = 0u64;
        for eps_den in [4u64, 5, 8, 10] {
            let eps = Rational::new(1.into(), eps_den.into());
            let res = exact_search_n(&r(1, 2), &eps, &target, 10_000).unwrap();
            assert!(
                res.n >= last,
                "eps = 1/{eps_den} gave n = {} after {last}",
                res.n
            );
            last = res.n;
        }
        // Higher targets never need fewer trials.
        let mut last = 0u64;
        for (tn, td) in [(1i64, 2i64), (3, 4), (9, 10), (99, 100)] {
            let res = exact_search_n(&r(1, 2), &r(1, 5), &r(tn, td), 10_000).unwrap();
            assert!(res.n >= last, "target {tn}/{td} gave n = {}", res.n);
            last = res.n;
        }
    }
}
