//! Scalar special functions backing the floating-point paths.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Standard normal CDF via the complementary error function.
///
/// libm's erfc is accurate to a couple of ulps across the whole range, so
/// Phi keeps close to full double precision even far into the tails.
pub(crate) fn phi(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

// Series coefficients for the Stirling correction: B_{2k} / ((2k)(2k-1)),
// k = 1..=6, signs included. A unit test pins them to the exact Bernoulli
// values generated elsewhere in the crate.
const STIRLERR_COEF: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
];

const STIRLERR_TABLE_LIMIT: u64 = 15;

fn stirlerr_table() -> &'static [f64; 16] {
    static TABLE: OnceLock<[f64; 16]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0f64; 16];
        let mut fact = 1.0f64; // exact in f64 up to 15!
        for n in 1..=STIRLERR_TABLE_LIMIT {
            fact *= n as f64;
            let nf = n as f64;
            t[n as usize] =
                fact.ln() - ((nf + 0.5) * nf.ln() - nf + 0.5 * (2.0 * PI).ln());
        }
        t
    })
}

/// stirlerr(n) = ln n! - [ (n + 1/2) ln n - n + ln(2 pi)/2 ].
///
/// Exact-table values for n <= 15; for larger n the asymptotic series in
/// 1/n^2 truncated at six terms is below 1e-17 absolute error.
pub(crate) fn stirlerr(n: u64) -> f64 {
    debug_assert!(n >= 1);
    if n <= STIRLERR_TABLE_LIMIT {
        return stirlerr_table()[n as usize];
    }
    let nf = n as f64;
    let w = 1.0 / (nf * nf);
    let mut s = STIRLERR_COEF[5];
    for k in (0..5).rev() {
        s = STIRLERR_COEF[k] + w * s;
    }
    s / nf
}

/// Kullback-Leibler deviance term bd0(x, m) = x ln(x/m) + m - x, computed
/// without cancellation when x is close to m.
pub(crate) fn bd0(x: f64, m: f64) -> f64 {
    debug_assert!(x > 0.0 && m > 0.0);
    if (x - m).abs() < 0.1 * (x + m) {
        let d = x - m;
        let v = d / (x + m);
        let mut s = d * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        let mut j = 1u32;
        loop {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1;
        }
    }
    x * (x / m).ln() + m - x
}

/// Binomial pmf in log space using the Stirling correction and deviance
/// terms, so no intermediate grows with n and precision stays near machine
/// level up to n around 10^6.
///
/// `p` and `q` must be the correctly rounded doubles of theta and 1 - theta;
/// taking `1.0 - p` instead would lose the tail cases.
pub(crate) fn binom_pmf_f64(n: u64, p: f64, q: f64, k: u64) -> f64 {
    debug_assert!(k <= n);
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if q == 0.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    if k == 0 {
        return (n as f64 * q.ln()).exp();
    }
    if k == n {
        return (n as f64 * p.ln()).exp();
    }
    let nf = n as f64;
    let kf = k as f64;
    let nk = (n - k) as f64;
    let lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k) - bd0(kf, nf * p) - bd0(nk, nf * q);
    let lf = (2.0 * PI).ln() + kf.ln() + (-kf / nf).ln_1p();
    (lc - 0.5 * lf).exp()
}
