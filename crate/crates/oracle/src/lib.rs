//! Exact reference values for the test suites.
//!
//! Everything here is computed in arbitrary-precision rational arithmetic with
//! rigorous truncation bounds, so a comparison certified by this crate is a
//! mathematical fact rather than a floating-point observation. The routines
//! are deliberately independent of the main library: different algorithms,
//! no shared code paths.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// 10^-digits, as a convenient interval-width request.
pub fn pow10_eps(digits: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::from(10u32).pow(digits))
}

/// A closed rational interval [lo, hi] guaranteed to contain the true value.
#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RatInterval {
    pub fn point(v: Rat) -> Self {
        RatInterval { lo: v.clone(), hi: v }
    }

    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn add(&self, o: &Self) -> Self {
        RatInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RatInterval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    pub fn neg(&self) -> Self {
        RatInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    /// Multiply by an exact rational constant.
    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_negative() {
            RatInterval {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            RatInterval {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    /// Interval containing |x| for every x in self.
    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let m = std::cmp::max(-self.lo.clone(), self.hi.clone());
            RatInterval {
                lo: Rat::zero(),
                hi: m,
            }
        }
    }

    /// True only when every point of self is below every point of other.
    pub fn certainly_lt(&self, o: &Self) -> bool {
        self.hi < o.lo
    }

    pub fn contains(&self, v: &Rat) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / rat(2, 1);
        rat_to_f64_approx(&mid)
    }
}

/// Plain float view of a rational; accurate enough for reporting, not used in
/// any certified comparison.
pub fn rat_to_f64_approx(r: &Rat) -> f64 {
    let mut num = r.numer().clone();
    let mut den = r.denom().clone();
    // Keep both parts in f64 range by shifting out common powers of two.
    let excess = num.bits().max(den.bits()) as i64 - 900;
    if excess > 0 {
        num >>= excess as usize;
        den >>= excess as usize;
        if den.is_zero() {
            den = BigInt::one();
        }
    }
    let nf = num.to_string().parse::<f64>().unwrap_or(f64::MAX);
    let df = den.to_string().parse::<f64>().unwrap_or(f64::MAX);
    nf / df
}

/// atanh(x) for rational |x| < 1/2, to within eps.
///
/// atanh(x) = sum_{j>=0} x^(2j+1)/(2j+1); for |x| <= 1/2 the remainder after
/// the j-th term is bounded by |next term| / (1 - x^2) <= 4/3 |next term|.
///
/// The running power is held as a directed-rounded enclosure on the grid of
/// multiples of eps/10^6 rather than exactly: powering the argument would
/// compound its denominator into every later term, and the arguments that
/// arrive here through ln carry denominators near 1/eps already, which made
/// certified values expensive even to add afterwards. The grid slack is a
/// few cells per term, far inside the eps/2 budget left for it.
fn atanh_interval(x: &Rat, eps: &Rat) -> RatInterval {
    assert!(x.abs() < rat(1, 2), "atanh_interval requires |x| < 1/2");
    if x.is_zero() {
        return RatInterval::point(Rat::zero());
    }
    // Work with a = |x| so every quantity is nonnegative; atanh is odd.
    let a = x.abs();
    let step = eps * pow10_eps(6);
    let floor_to = |v: Rat| (v / &step).floor() * &step;
    let ceil_to = |v: Rat| (v / &step).ceil() * &step;
    let a2 = &a * &a;
    let a2 = RatInterval::new(floor_to(a2.clone()), ceil_to(a2));
    let mut pow = RatInterval::new(floor_to(a.clone()), ceil_to(a)); // a^(2j+1)
    let mut lo = Rat::zero();
    let mut hi = Rat::zero();
    let threshold = eps / rat(2, 1);
    let mut j: u64 = 0;
    loop {
        let d = Rat::from_integer(BigInt::from(2 * j + 1));
        lo += floor_to(&pow.lo / &d);
        hi += ceil_to(&pow.hi / &d);
        pow = RatInterval::new(floor_to(&pow.lo * &a2.lo), ceil_to(&pow.hi * &a2.hi));
        let bound = ceil_to(&pow.hi / Rat::from_integer(BigInt::from(2 * j + 3)) * rat(4, 3));
        if bound < threshold {
            // The omitted remainder is positive for a > 0.
            let res = RatInterval::new(lo, hi + bound);
            return if x.is_negative() { res.neg() } else { res };
        }
        j += 1;
        assert!(j < 10_000, "atanh_interval failed to converge");
    }
}

/// atan(x) for rational 0 < x < 1, to within eps, via the alternating series.
fn atan_interval(x: &Rat, eps: &Rat) -> RatInterval {
    assert!(x.is_positive() && *x < Rat::one());
    let x2 = x * x;
    let mut sum = Rat::zero();
    let mut pow = x.clone();
    let mut j: u64 = 0;
    loop {
        let term = &pow / Rat::from_integer(BigInt::from(2 * j + 1));
        // Alternating with strictly decreasing terms: partial sums bracket the
        // limit, so the first omitted term bounds the remainder.
        if term < *eps {
            return if j % 2 == 0 {
                RatInterval::new(sum.clone(), &sum + &term)
            } else {
                RatInterval::new(&sum - &term, sum)
            };
        }
        if j % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        pow *= &x2;
        j += 1;
        assert!(j < 100_000, "atan_interval failed to converge");
    }
}

/// ln 2 = 2 atanh(1/3).
pub fn ln2_interval(eps: &Rat) -> RatInterval {
    atanh_interval(&rat(1, 3), &(eps / rat(2, 1))).scale(&rat(2, 1))
}

/// pi = 16 atan(1/5) - 4 atan(1/239)  (Machin's formula).
pub fn pi_interval(eps: &Rat) -> RatInterval {
    let a = atan_interval(&rat(1, 5), &(eps / rat(32, 1)));
    let b = atan_interval(&rat(1, 239), &(eps / rat(8, 1)));
    a.scale(&rat(16, 1)).sub(&b.scale(&rat(4, 1)))
}

/// ln r for a positive rational r, to within eps.
///
/// Range-reduce r = m * 2^e with m in [3/4, 3/2), then
/// ln r = e ln 2 + 2 atanh((m-1)/(m+1)) with |(m-1)/(m+1)| <= 1/5.
pub fn ln_rational_interval(r: &Rat, eps: &Rat) -> RatInterval {
    assert!(r.is_positive(), "ln of a non-positive rational");
    let mut e: i64 = r.numer().bits() as i64 - r.denom().bits() as i64;
    let two = rat(2, 1);
    let mut m = if e >= 0 {
        r / Rat::from_integer(BigInt::one() << e as usize)
    } else {
        r * Rat::from_integer(BigInt::one() << (-e) as usize)
    };
    // m is now in [1/2, 2); nudge into [3/4, 3/2).
    if m < rat(3, 4) {
        m *= &two;
        e -= 1;
    } else if m >= rat(3, 2) {
        m /= &two;
        e += 1;
    }
    let x = (&m - Rat::one()) / (&m + Rat::one());
    let scale = Rat::from_integer(BigInt::from(e.unsigned_abs().max(1)));
    let part_eps = eps / rat(4, 1);
    let ln_m = atanh_interval(&x, &(&part_eps / &scale)).scale(&two);
    if e == 0 {
        return ln_m;
    }
    let ln2 = ln2_interval(&(&part_eps / &scale));
    ln2.scale(&Rat::from_integer(BigInt::from(e))).add(&ln_m)
}

/// ln(n!) to within eps, as the exact sum of ln m for m = 2..=n.
pub fn ln_factorial_interval(n: u64, eps: &Rat) -> RatInterval {
    let mut acc = RatInterval::point(Rat::zero());
    if n < 2 {
        return acc;
    }
    let per = eps / Rat::from_integer(BigInt::from(n));
    for m in 2..=n {
        acc = acc.add(&ln_rational_interval(
            &Rat::from_integer(BigInt::from(m)),
            &per,
        ));
    }
    acc
}

/// ln(2 pi) to within eps.
pub fn ln_2pi_interval(eps: &Rat) -> RatInterval {
    let half = eps / rat(2, 1);
    let pi = pi_interval(&(&half / rat(8, 1)));
    // ln over an interval of positive numbers is monotone.
    let lo = ln_rational_interval(&pi.lo, &(&half / rat(2, 1))).lo;
    let hi = ln_rational_interval(&pi.hi, &(&half / rat(2, 1))).hi;
    ln2_interval(&half).add(&RatInterval::new(lo, hi))
}

/// Bernoulli numbers B_0..B_m by the Akiyama–Tanigawa transform.
///
/// This yields the convention with B_1 = +1/2; all even-index values agree
/// with the B_1 = -1/2 convention, and only even indices are meaningful to
/// compare against other generators.
pub fn bernoulli_akiyama_tanigawa(m_max: usize) -> Vec<Rat> {
    let mut out = Vec::with_capacity(m_max + 1);
    let mut a: Vec<Rat> = Vec::new();
    for m in 0..=m_max {
        a.push(Rat::new(BigInt::one(), BigInt::from(m as u64 + 1)));
        for j in (1..=m).rev() {
            let d = &a[j - 1] - &a[j];
            a[j - 1] = d * Rat::from_integer(BigInt::from(j as u64));
        }
        out.push(a[0].clone());
    }
    out
}
