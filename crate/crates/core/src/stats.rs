//! Descriptive statistics and one-way ANOVA with an exact F-distribution
//! tail computed through the regularized incomplete beta function.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("need at least two groups, got {0}")]
    TooFewGroups(usize),
    #[error("within-group variance is zero; F is undefined")]
    DegenerateVariance,
    #[error("parameter out of domain: {0}")]
    BadParameter(&'static str),
}

/// Moments of one sample; the variance is the population variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Descriptive {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

pub fn describe(sample: &[f64]) -> Result<Descriptive, StatsError> {
    if sample.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let variance = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok(Descriptive {
        n: sample.len(),
        mean,
        variance,
        min: sample.iter().fold(f64::INFINITY, |m, &x| m.min(x)),
        max: sample.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub ss_between: f64,
    pub ss_within: f64,
    pub p: f64,
}

/// Fixed-effects one-way ANOVA over two or more groups.
pub fn anova_oneway(groups: &[Vec<f64>]) -> Result<AnovaResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups(groups.len()));
    }
    if groups.iter().any(Vec::is_empty) {
        return Err(StatsError::EmptySample);
    }
    let total_n: usize = groups.iter().map(Vec::len).sum();
    let grand = groups.iter().flatten().sum::<f64>() / total_n as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        ss_between += g.len() as f64 * (mean - grand).powi(2);
        ss_within += g.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    }
    let df_between = groups.len() - 1;
    let df_within = total_n - groups.len();
    if df_within == 0 {
        return Err(StatsError::BadParameter("no within-group degrees of freedom"));
    }
    if ss_within == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    let f = (ss_between / df_between as f64) / (ss_within / df_within as f64);
    let p = f_survival(f, df_between, df_within)?;
    Ok(AnovaResult {
        f,
        df_between,
        df_within,
        ss_between,
        ss_within,
        p,
    })
}

/// P(F >= f) for an F(d1, d2) variate, via the incomplete beta identity
/// sf(f) = I_{d2 / (d2 + d1 f)}(d2/2, d1/2).
pub fn f_survival(f: f64, d1: usize, d2: usize) -> Result<f64, StatsError> {
    if d1 == 0 || d2 == 0 {
        return Err(StatsError::BadParameter("degrees of freedom must be positive"));
    }
    if !f.is_finite() || f < 0.0 {
        return Err(StatsError::BadParameter("F statistic must be non-negative"));
    }
    let (d1, d2) = (d1 as f64, d2 as f64);
    betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))
}

/// Natural log of the gamma function (Lanczos approximation, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta function I_x(a, b) by the Lentz continued
/// fraction, switching to the symmetric tail for fast convergence.
pub fn betainc(a: f64, b: f64, x: f64) -> Result<f64, StatsError> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(StatsError::BadParameter("beta shape parameters must be positive"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(StatsError::BadParameter("beta argument must lie in [0, 1]"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(front * beta_cf(a, b, x) / a)
    } else {
        Ok(1.0 - front * beta_cf(b, a, 1.0 - x) / b)
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const FPMIN: f64 = 1e-300;
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
    for m in 1..=MAX_ITER {
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
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}
