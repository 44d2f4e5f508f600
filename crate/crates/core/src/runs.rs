//! Probability of a success run: at least r consecutive successes somewhere
//! in n independent trials ("at least" semantics, the standard reading).
//!
//! The main route is a linear recurrence over not-yet-absorbed states
//! indexed by the current streak length 0..r-1; a success extends the
//! streak or absorbs at r, a failure resets to 0. The oracle route
//! enumerates all 2^n outcome sequences, which is the definition itself.

use num_traits::{One, Signed, Zero};

use crate::binomial::NumericMode;
use crate::error::{Error, Result};
use crate::kernel;
use crate::rational::{rational_to_f64, Prob, Rational};

/// Enumeration bound for the brute-force oracle.
pub const BRUTE_FORCE_MAX_N: u64 = 22;

/// A run question: r consecutive successes within n trials at rate theta.
#[derive(Debug, Clone, PartialEq)]
pub struct RunQuery {
    n: u64,
    r: u64,
    theta: Rational,
}

impl RunQuery {
    pub fn new(n: u64, r: u64, theta: Rational) -> Result<Self> {
        if r < 1 || r > n {
            return Err(Error::Domain(format!("need 1 <= r <= n, got r = {r}, n = {n}")));
        }
        if theta.is_negative() || theta > Rational::one() {
            return Err(Error::Domain(format!(
                "theta must lie in [0, 1], got {theta}"
            )));
        }
        Ok(RunQuery { n, r, theta })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }
}

/// Exact DP; also reports whether unabsorbed mass plus absorbed mass summed
/// to exactly 1 after every step, which is the recurrence's conservation
/// law and costs little to confirm while the state is rational.
fn exact_dp(query: &RunQuery) -> (Rational, bool) {
    let r = query.r as usize;
    let theta = &query.theta;
    let comp = Rational::one() - theta;
    let mut states = vec![Rational::zero(); r];
    states[0] = Rational::one();
    let mut absorbed = Rational::zero();
    let mut conserved = true;
    for _ in 0..query.n {
        let total: Rational = states.iter().sum();
        let absorb_gain = theta * &states[r - 1];
        for i in (1..r).rev() {
            states[i] = theta * &states[i - 1];
        }
        states[0] = &comp * &total;
        absorbed += absorb_gain;
        let mass: Rational = states.iter().sum::<Rational>() + &absorbed;
        conserved &= mass.is_one();
    }
    (absorbed, conserved)
}

fn float_dp(query: &RunQuery) -> f64 {
    let r = query.r as usize;
    let theta = rational_to_f64(&query.theta);
    let comp = 1.0 - theta;
    let mut states = vec![0.0f64; r];
    states[0] = 1.0;
    let mut absorbed = 0.0f64;
    for _ in 0..query.n {
        let total: f64 = states.iter().sum();
        let absorb_gain = theta * states[r - 1];
        for i in (1..r).rev() {
            states[i] = theta * states[i - 1];
        }
        states[0] = comp * total;
        absorbed += absorb_gain;
    }
    absorbed
}

/// Probability of at least one r-run in n trials, by the streak recurrence.
pub fn run_prob(query: &RunQuery, mode: NumericMode) -> Result<Prob> {
    match mode {
        NumericMode::Exact => {
            let (p, conserved) = exact_dp(query);
            debug_assert!(conserved, "run DP leaked probability mass");
            Ok(Prob::Exact(p))
        }
        NumericMode::Float { .. } => {
            mode.validate()?;
            Ok(Prob::Float(float_dp(query)))
        }
    }
}

fn has_run(mask: u64, r: u64) -> bool {
    let mut m = mask;
    for _ in 1..r {
        m &= m << 1;
    }
    m != 0
}

/// Exhaustive oracle: every outcome sequence is a bit mask, sequences
/// containing an r-run are binned by success count, and the exact rational
/// mass is summed bin by bin. Capped at n = 22 (4M sequences).
pub fn run_prob_bruteforce(query: &RunQuery) -> Result<Prob> {
    if query.n > BRUTE_FORCE_MAX_N {
        return Err(Error::Resource(format!(
            "brute force enumerates 2^n sequences; n = {} exceeds the cap of {}",
            query.n, BRUTE_FORCE_MAX_N
        )));
    }
    let n = query.n;
    let r = query.r;
    let bins = kernel::histogram_u64(0, (1u64 << n) - 1, n as usize + 1, |mask| {
        if has_run(mask, r) {
            Some(mask.count_ones() as usize)
        } else {
            None
        }
    });
    let theta = &query.theta;
    let comp = Rational::one() - theta;
    // theta^k (1-theta)^(n-k), built incrementally from k = 0.
    let mut succ_pow = Rational::one();
    let mut prob = Rational::zero();
    for (k, count) in bins.iter().enumerate() {
        if *count > 0 {
            let fail_pow = comp.pow((n - k as u64) as i32);
            prob += Rational::from_integer((*count).into()) * &succ_pow * fail_pow;
        }
        succ_pow *= theta;
    }
    Ok(Prob::Exact(prob))
}
