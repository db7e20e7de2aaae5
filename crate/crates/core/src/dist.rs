//! Distribution functions and critical-value constants used by both pipelines.
//!
//! Everything here is dependency-free: the chi-squared survival function and
//! the normal tail both reduce to the regularized upper incomplete gamma
//! function, evaluated by a power series for small arguments and a Lentz
//! continued fraction otherwise.

use crate::error::{Error, Result};

/// Significance level in (0, 1).
///
/// Any level is accepted for Holm correction and permutation testing;
/// [`nemenyi_q`] additionally requires one of the tabulated levels
/// (0.05 or 0.10).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::Domain(format!(
                "significance level must lie in (0, 1), got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Alpha {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

const MAX_ITER: usize = 500;

/// Natural log of the gamma function (Lanczos, g = 7, 9 coefficients).
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    // Reflection is not needed: every caller has x > 0.
    debug_assert!(x > 0.0);
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_9;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + (i + 1) as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized upper incomplete gamma Q(a, x) for a > 0, x >= 0.
fn gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x, log_prefactor)
    } else {
        gamma_q_cf(a, x, log_prefactor)
    }
}

/// Series for P(a, x) = prefactor * sum_n x^n / (a (a+1) ... (a+n)).
fn gamma_p_series(a: f64, x: f64, log_prefactor: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * f64::EPSILON {
            break;
        }
    }
    (log_prefactor.exp()) * sum
}

/// Modified Lentz continued fraction for Q(a, x), x >= a + 1.
fn gamma_q_cf(a: f64, x: f64, log_prefactor: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    (log_prefactor.exp()) * h
}

/// Survival function of the chi-squared distribution: P(X >= x).
///
/// `df = 2` short-circuits to the closed form `exp(-x/2)`; other degrees of
/// freedom go through the incomplete gamma kernel.
pub fn chi2_sf(x: f64, df: usize) -> Result<f64> {
    if df == 0 {
        return Err(Error::Domain("chi-squared needs df >= 1".into()));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!(
            "chi-squared survival function needs x >= 0, got {x}"
        )));
    }
    if df == 2 {
        return Ok((-0.5 * x).exp());
    }
    Ok(gamma_q(df as f64 / 2.0, 0.5 * x))
}

/// Complementary error function for x >= 0, via erfc(x) = Q(1/2, x^2).
fn erfc_nonneg(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    gamma_q(0.5, x * x)
}

/// Upper tail of the standard normal distribution: P(Z >= z).
pub fn normal_sf(z: f64) -> f64 {
    let x = z / std::f64::consts::SQRT_2;
    if x >= 0.0 {
        0.5 * erfc_nonneg(x)
    } else {
        1.0 - 0.5 * erfc_nonneg(-x)
    }
}

/// Lower tail of the standard normal distribution: P(Z <= z).
pub fn normal_cdf(z: f64) -> f64 {
    normal_sf(-z)
}

/// Quantile of the standard normal distribution.
///
/// Acklam's rational approximation followed by one Halley step against the
/// erfc-based CDF; in the refined range the absolute error sits at machine
/// precision, well inside the 1e-9 contract.
pub fn inverse_normal_cdf(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!(
            "normal quantile needs u in (0, 1), got {u}"
        )));
    }
    let mut z = acklam(u);
    // The refinement needs exp(z^2/2); skip it only where that would
    // overflow, which requires a subnormal u.
    if z * z < 1400.0 {
        let err = normal_cdf(z) - u;
        let t = err * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * z * z).exp();
        z -= t / (1.0 + 0.5 * z * t);
    }
    Ok(z)
}

/// Acklam's rational approximation to the normal quantile (|rel err| < 1.2e-9).
fn acklam(u: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const U_LOW: f64 = 0.02425;

    if u < U_LOW {
        let q = (-2.0 * u.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if u <= 1.0 - U_LOW {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - u).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

// Critical constants q_{alpha,k} = q_{alpha,k,inf} / sqrt(2) for the Nemenyi
// test, k = 2..=20, as published in the standard two-tailed tables.
const NEMENYI_Q_05: [f64; 19] = [
    1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219, 3.268, 3.313, 3.354,
    3.391, 3.426, 3.458, 3.489, 3.517, 3.544,
];
const NEMENYI_Q_10: [f64; 19] = [
    1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978, 3.030, 3.077, 3.120,
    3.159, 3.196, 3.230, 3.261, 3.291, 3.319,
];

/// Nemenyi critical constant `q_{alpha,k}` from the embedded table.
///
/// Supported: `2 <= k <= 20`, alpha in {0.05, 0.10}.
pub fn nemenyi_q(k: usize, alpha: Alpha) -> Result<f64> {
    if !(2..=20).contains(&k) {
        return Err(Error::UnsupportedK(k));
    }
    let table = if (alpha.value() - 0.05).abs() < 1e-9 {
        &NEMENYI_Q_05
    } else if (alpha.value() - 0.10).abs() < 1e-9 {
        &NEMENYI_Q_10
    } else {
        return Err(Error::UnsupportedAlpha(alpha.value()));
    };
    Ok(table[k - 2])
}
