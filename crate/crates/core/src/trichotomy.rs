//! Three classical answers to one estimation scenario, side by side.
//!
//! Bernoulli's law: with the rate theta known, how many trials until the
//! observed ratio is morally certain to land within eps of it. The inverse
//! use of Bernoulli's law: with theta unknown, read the same guarantee
//! backwards as "the observed ratio approximates theta for large n" -- a
//! point estimate with a band, and deliberately not a probability
//! statement. Bayes's theorem: with theta unknown and a prior in hand, the
//! posterior probability that theta lies inside that same band.
//!
//! The report presents the three answers without ranking them.

use crate::bayes::{self, BetaParams, ObservedCounts};
use crate::bernoulli::{exact_search_n, SampleSizeResult};
use crate::binomial::NumericMode;
use crate::error::{Error, Result};
use crate::rational::{rational_string, rational_string_opt, Prob, Rational};
use num_traits::{One, Signed, Zero};

/// Search ceiling for the direct bullet's sample-size hunt.
pub const DIRECT_SEARCH_CAP: u64 = 1_000_000;

/// One estimation scenario to be answered three ways.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Scenario {
    /// Known true rate; enables the direct answer.
    #[serde(with = "rational_string_opt", default)]
    pub theta_true: Option<Rational>,
    pub counts: ObservedCounts,
    #[serde(with = "rational_string")]
    pub eps: Rational,
    #[serde(with = "rational_string")]
    pub target: Rational,
    pub prior: BetaParams,
}

impl Scenario {
    pub fn new(
        theta_true: Option<Rational>,
        counts: ObservedCounts,
        eps: Rational,
        target: Rational,
        prior: BetaParams,
    ) -> Result<Self> {
        let s = Scenario {
            theta_true,
            counts,
            eps,
            target,
            prior,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if !self.eps.is_positive() {
            return Err(Error::Domain("eps must be positive".into()));
        }
        if !self.target.is_positive() || self.target >= Rational::one() {
            return Err(Error::Domain(format!(
                "target must lie in (0, 1), got {}",
                self.target
            )));
        }
        if let Some(th) = &self.theta_true {
            if th.is_negative() || *th > Rational::one() {
                return Err(Error::Domain(format!(
                    "theta_true must lie in [0, 1], got {th}"
                )));
            }
        }
        Ok(())
    }
}

/// A closed rational interval, as reported.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Band {
    #[serde(with = "rational_string")]
    pub lo: Rational,
    #[serde(with = "rational_string")]
    pub hi: Rational,
}

/// Bernoulli's law, given the true rate: the smallest morally certain n.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DirectAnswer {
    pub sample_size: SampleSizeResult,
}

/// The inverse use: a point estimate and its band, with the qualitative
/// statement that is all this reading provides. No probability field
/// exists here by design.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct InverseUseAnswer {
    #[serde(with = "rational_string")]
    pub point_estimate: Rational,
    pub band: Band,
    pub statement: String,
}

/// Bayes's theorem: the posterior and, when data exist, the posterior mass
/// of the same band the inverse use drew around the observed ratio.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BayesAnswer {
    pub posterior: BetaParams,
    /// Absent when there are no observations (prior-only scenario).
    pub band: Option<Band>,
    pub band_prob: Option<Prob>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrichotomyReport {
    pub direct: Option<DirectAnswer>,
    pub inverse_use: Option<InverseUseAnswer>,
    pub bayes: BayesAnswer,
    /// Which reading produced each field, in plain words.
    pub notes: Vec<String>,
}

fn clipped_band(center: &Rational, eps: &Rational) -> Band {
    Band {
        lo: (center - eps).max(Rational::zero()),
        hi: (center + eps).min(Rational::one()),
    }
}

/// Answers the scenario all three ways. The direct answer needs a known
/// theta, the other two need observations; a scenario offering neither is
/// rejected. Bayes's band probability is evaluated exactly when the
/// posterior shapes are integers small enough for the polynomial route.
pub fn run_trichotomy(scenario: &Scenario) -> Result<TrichotomyReport> {
    scenario.validate()?;
    if scenario.theta_true.is_none() && scenario.counts.total() == 0 {
        return Err(Error::NothingComputable);
    }
    let mut notes = Vec::new();

    let direct = match &scenario.theta_true {
        Some(theta) => {
            let sample_size =
                exact_search_n(theta, &scenario.eps, &scenario.target, DIRECT_SEARCH_CAP)?;
            notes.push(format!(
                "direct (Bernoulli's law): theta known; smallest n with \
                 P(|X/n - theta| < eps) >= {} found by exact search",
                scenario.target
            ));
            Some(DirectAnswer { sample_size })
        }
        None => {
            notes.push("direct (Bernoulli's law): unavailable, theta unknown".into());
            None
        }
    };

    let inverse_use = match scenario.counts.ratio() {
        Some(x_bar) => {
            let band = clipped_band(&x_bar, &scenario.eps);
            notes.push(
                "inverse use of Bernoulli's law: point estimate with band; \
                 approximates theta for large n but carries no probability"
                    .into(),
            );
            Some(InverseUseAnswer {
                point_estimate: x_bar,
                band,
                statement: "the observed ratio approximates the unknown rate for large n; \
                            no probability attaches to this statement"
                    .into(),
            })
        }
        None => {
            notes.push("inverse use of Bernoulli's law: unavailable, no observations".into());
            None
        }
    };

    let posterior = bayes::posterior(&scenario.prior, &scenario.counts);
    let bayes = if scenario.counts.total() > 0 {
        let integer_shapes = posterior.a().fract() == 0.0 && posterior.b().fract() == 0.0;
        let mode = if integer_shapes
            && posterior.a() + posterior.b() <= bayes::EXACT_SHAPE_LIMIT as f64
        {
            NumericMode::Exact
        } else {
            NumericMode::FLOAT64
        };
        let band_prob =
            bayes::hartley_deviation(&scenario.prior, &scenario.counts, &scenario.eps, mode)?;
        let band = inverse_use
            .as_ref()
            .map(|iu| iu.band.clone())
            .expect("observations imply an inverse-use band");
        notes.push(
            "Bayes's theorem: posterior probability that theta lies in the same band".into(),
        );
        BayesAnswer {
            posterior,
            band: Some(band),
            band_prob: Some(band_prob),
        }
    } else {
        notes.push("Bayes's theorem: no observations, posterior equals the prior".into());
        BayesAnswer {
            posterior,
            band: None,
            band_prob: None,
        }
    };

    Ok(TrichotomyReport {
        direct,
        inverse_use,
        bayes,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn uniform() -> BetaParams {
        BetaParams::uniform()
    }

    #[test]
    fn known_theta_no_data_gives_direct_only() {
        let s = Scenario::new(
            Some(r(1, 2)),
            ObservedCounts::new(0, 0),
            r(3, 5),
            r(9, 10),
            uniform(),
        )
        .unwrap();
        let report = run_trichotomy(&s).unwrap();
        let direct = report.direct.unwrap();
        assert_eq!(direct.sample_size.n, 1);
        assert!(report.inverse_use.is_none());
        assert_eq!(report.bayes.posterior, uniform());
        assert!(report.bayes.band.is_none());
        assert!(report.bayes.band_prob.is_none());
        assert_eq!(report.notes.len(), 3);
    }

    #[test]
    fn full_scenario_composes_the_three_readings() {
        let s = Scenario::new(
            Some(r(3, 5)),
            ObservedCounts::new(60, 40),
            r(1, 50),
            r(999, 1000),
            uniform(),
        )
        .unwrap();
        let report = run_trichotomy(&s).unwrap();

        let direct = report.direct.as_ref().unwrap();
        let standalone = exact_search_n(&r(3, 5), &r(1, 50), &r(999, 1000), DIRECT_SEARCH_CAP)
            .unwrap();
        assert_eq!(direct.sample_size, standalone);
        assert!(direct.sample_size.n < 25_550);

        let iu = report.inverse_use.as_ref().unwrap();
        assert_eq!(iu.point_estimate, r(3, 5));
        assert_eq!(iu.band.lo, r(29, 50));
        assert_eq!(iu.band.hi, r(31, 50));

        let standalone_bayes = bayes::hartley_deviation(
            &uniform(),
            &ObservedCounts::new(60, 40),
            &r(1, 50),
            NumericMode::FLOAT64,
        )
        .unwrap();
        assert_eq!(report.bayes.band_prob.as_ref(), Some(&standalone_bayes));
        assert_eq!(report.bayes.band.as_ref(), Some(&iu.band));
        assert_eq!((report.bayes.posterior.a(), report.bayes.posterior.b()), (61.0, 41.0));
    }

    #[test]
    fn band_equality_is_structural() {
        // Band clipping keeps the bayes band identical to the inverse-use
        // band even at the support edge.
        let s = Scenario::new(
            None,
            ObservedCounts::new(19, 1),
            r(1, 10),
            r(1, 2),
            uniform(),
        )
        .unwrap();
        let report = run_trichotomy(&s).unwrap();
        let iu = report.inverse_use.unwrap();
        assert_eq!(iu.band.hi, r(1, 1), "clipped at the upper edge");
        assert_eq!(report.bayes.band.unwrap(), iu.band);
    }

    #[test]
    fn unknown_theta_skips_direct_and_converges_with_data() {
        let small = Scenario::new(
            None,
            ObservedCounts::new(60, 40),
            r(1, 50),
            r(1, 2),
            uniform(),
        )
        .unwrap();
        let big = Scenario::new(
            None,
            ObservedCounts::new(600, 400),
            r(1, 50),
            r(1, 2),
            uniform(),
        )
        .unwrap();
        let r_small = run_trichotomy(&small).unwrap();
        let r_big = run_trichotomy(&big).unwrap();
        assert!(r_small.direct.is_none());
        assert!(r_big.direct.is_none());
        let p_small = r_small.bayes.band_prob.unwrap().to_f64();
        let p_big = r_big.bayes.band_prob.unwrap().to_f64();
        assert!(
            p_big > p_small,
            "more data should concentrate the posterior: {p_small} vs {p_big}"
        );
    }

    #[test]
    fn small_integer_cases_go_exact() {
        let s = Scenario::new(
            None,
            ObservedCounts::new(6, 4),
            r(1, 10),
            r(1, 2),
            uniform(),
        )
        .unwrap();
        let report = run_trichotomy(&s).unwrap();
        assert!(report.bayes.band_prob.unwrap().is_exact());
    }

    #[test]
    fn empty_scenario_is_rejected() {
        let s = Scenario::new(
            None,
            ObservedCounts::new(0, 0),
            r(1, 10),
            r(1, 2),
            uniform(),
        )
        .unwrap();
        assert_eq!(run_trichotomy(&s).unwrap_err(), Error::NothingComputable);
    }

    #[test]
    fn scenario_validation() {
        assert!(Scenario::new(
            None,
            ObservedCounts::new(1, 1),
            r(0, 1),
            r(1, 2),
            uniform()
        )
        .is_err());
        assert!(Scenario::new(
            None,
            ObservedCounts::new(1, 1),
            r(1, 10),
            r(1, 1),
            uniform()
        )
        .is_err());
        assert!(Scenario::new(
            Some(r(7, 5)),
            ObservedCounts::new(1, 1),
            r(1, 10),
            r(1, 2),
            uniform()
        )
        .is_err());
    }

    #[test]
    fn report_is_a_pure_function_of_the_serialized_scenario() {
        let s = Scenario::new(
            Some(r(1, 2)),
            ObservedCounts::new(12, 8),
            r(1, 10),
            r(19, 20),
            BetaParams::new(2.0, 3.0).unwrap(),
        )
        .unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: Scenario = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
        let r1 = run_trichotomy(&s).unwrap();
        let r2 = run_trichotomy(&back).unwrap();
        assert_eq!(r1, r2);

        // The report itself round-trips through serialization unchanged.
        let rep_json = serde_json::to_string(&r1).unwrap();
        let rep_back: TrichotomyReport = serde_json::from_str(&rep_json).unwrap();
        assert_eq!(r1, rep_back);
    }
}
