//! Classical probability computed two ways at once.
//!
//! The crate pairs an exact arbitrary-precision rational path with a
//! carefully engineered floating-point path for each quantity it computes:
//!
//! - binomial point, interval, and deviation-band probabilities
//!   ([`binomial`]);
//! - Jacob Bernoulli's sample-size bound for moral certainty and the exact
//!   first-crossing search it dominates ([`bernoulli`]);
//! - De Moivre's normal approximation, the middle-term ratio, and the
//!   divergent Stirling-De Moivre correction series ([`demoivre`]);
//! - Beta-binomial posterior intervals for an unknown success probability
//!   ([`bayes`]);
//! - the probability of a run of consecutive successes ([`runs`]);
//! - a three-way report contrasting the direct, inverse-use, and posterior
//!   readings of the same evidence ([`trichotomy`]).
//!
//! Heavy sweeps fan out with rayon when the `parallel` feature (default) is
//! on; disabling it leaves identical sequential behavior.

pub mod bayes;
pub mod bernoulli;
pub mod binomial;
pub mod demoivre;
mod error;
pub mod kernel;
pub mod rational;
pub mod runs;
mod special;
pub mod trichotomy;

pub use bayes::{BetaParams, IntervalQuery, ObservedCounts};
pub use bernoulli::{MoralCertaintySpec, SampleSizeMethod, SampleSizeResult};
pub use binomial::{BinomialModel, NumericMode};
pub use error::{Error, Result};
pub use rational::{format_rational, parse_rational, rational_to_f64, Prob, Rational};
pub use trichotomy::{run_trichotomy, Scenario, TrichotomyReport};
