//! Distribution tail probabilities and the quantile inversions used for
//! confidence intervals and QQ data.

use serde::{Deserialize, Serialize};

use super::special::{gamma_pq, inc_beta};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Dist {
    Normal,
    StudentT { df: f64 },
    FisherF { df1: f64, df2: f64 },
    ChiSquare { df: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tail {
    Lower,
    Upper,
    TwoSided,
}

/// Above this df the Student-t CDF switches to a normal expansion with the
/// first 1/df correction term; the continued fraction would need more than
/// the iteration cap to converge there.
const LARGE_DF: f64 = 1e5;

/// Tail probability of `dist` at `x`. Two-sided is `2·min(lower, upper)`
/// clamped to [0, 1].
pub fn tail_probability(dist: Dist, x: f64, tail: Tail) -> Result<f64> {
    validate(&dist)?;
    if x.is_nan() {
        return Err(Error::InvalidParameter("x is NaN".into()));
    }
    let lower = cdf_lower(dist, x);
    let p = match tail {
        Tail::Lower => lower,
        Tail::Upper => cdf_upper(dist, x),
        Tail::TwoSided => {
            let upper = cdf_upper(dist, x);
            (2.0 * lower.min(upper)).clamp(0.0, 1.0)
        }
    };
    Ok(p)
}

fn validate(dist: &Dist) -> Result<()> {
    let bad = |name: &str, v: f64| Error::InvalidParameter(format!("{name} = {v}, need >= 1"));
    match *dist {
        Dist::Normal => Ok(()),
        Dist::StudentT { df } => (df >= 1.0).then_some(()).ok_or_else(|| bad("df", df)),
        Dist::ChiSquare { df } => (df >= 1.0).then_some(()).ok_or_else(|| bad("df", df)),
        Dist::FisherF { df1, df2 } => {
            if df1 < 1.0 {
                Err(bad("df1", df1))
            } else if df2 < 1.0 {
                Err(bad("df2", df2))
            } else {
                Ok(())
            }
        }
    }
}

fn cdf_lower(dist: Dist, x: f64) -> f64 {
    match dist {
        Dist::Normal => normal_cdf(x),
        Dist::StudentT { df } => student_t_cdf(x, df),
        Dist::ChiSquare { df } => {
            if x <= 0.0 {
                0.0
            } else {
                gamma_pq(df / 2.0, x / 2.0).0
            }
        }
        Dist::FisherF { df1, df2 } => {
            if x <= 0.0 {
                0.0
            } else {
                inc_beta(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2))
            }
        }
    }
}

fn cdf_upper(dist: Dist, x: f64) -> f64 {
    match dist {
        // Symmetric distributions: reflect rather than subtract from one.
        Dist::Normal => normal_cdf(-x),
        Dist::StudentT { df } => student_t_cdf(-x, df),
        Dist::ChiSquare { df } => {
            if x <= 0.0 {
                1.0
            } else {
                gamma_pq(df / 2.0, x / 2.0).1
            }
        }
        Dist::FisherF { df1, df2 } => {
            if x <= 0.0 {
                1.0
            } else {
                inc_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * x))
            }
        }
    }
}

/// Standard normal CDF via the incomplete gamma pair, so that the lower and
/// upper tails are exact complements.
pub fn normal_cdf(x: f64) -> f64 {
    let (p, q) = gamma_pq(0.5, 0.5 * x * x);
    if x >= 0.0 {
        0.5 + 0.5 * p
    } else {
        0.5 * q
    }
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Student-t lower CDF. Uses the incomplete beta for ordinary df and a
/// normal expansion with the O(1/df) term for very large df.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    if df > LARGE_DF {
        let correction = normal_pdf(t) * (t.powi(3) + t) / (4.0 * df);
        return (normal_cdf(t) - correction).clamp(0.0, 1.0);
    }
    let w = df / (df + t * t);
    let half = 0.5 * inc_beta(df / 2.0, 0.5, w);
    if t >= 0.0 {
        1.0 - half
    } else {
        half
    }
}

/// Standard normal quantile: Acklam's rational approximation refined by two
/// Halley steps against `normal_cdf`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "quantile probability {p} outside (0, 1)"
        )));
    }
    let mut x = acklam(p);
    for _ in 0..2 {
        let err = normal_cdf(x) - p;
        let pdf = normal_pdf(x);
        if pdf == 0.0 {
            break;
        }
        let u = err / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
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
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -acklam(1.0 - p)
    }
}

/// Student-t quantile by Newton iteration on the CDF, started from the
/// normal quantile; falls back to bisection when Newton leaves the bracket.
pub fn student_t_quantile(p: f64, df: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "quantile probability {p} outside (0, 1)"
        )));
    }
    if df < 1.0 {
        return Err(Error::InvalidParameter(format!("df = {df}, need >= 1")));
    }
    // Bracket the root.
    let mut lo = -1.0;
    let mut hi = 1.0;
    while student_t_cdf(lo, df) > p {
        lo *= 2.0;
    }
    while student_t_cdf(hi, df) < p {
        hi *= 2.0;
    }
    let mut x = normal_quantile(p)?.clamp(lo, hi);
    for _ in 0..60 {
        let f = student_t_cdf(x, df) - p;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let pdf = t_pdf(x, df);
        let step = if pdf > 0.0 { f / pdf } else { 0.0 };
        let mut next = x - step;
        if !(lo..=hi).contains(&next) || step == 0.0 {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-14 * (1.0 + x.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

fn t_pdf(x: f64, df: f64) -> f64 {
    use super::special::ln_gamma;
    let ln = ln_gamma((df + 1.0) / 2.0)
        - ln_gamma(df / 2.0)
        - 0.5 * (df * std::f64::consts::PI).ln()
        - (df + 1.0) / 2.0 * (x * x / df).ln_1p();
    ln.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normal_symmetry_at_zero() {
        assert_eq!(
            tail_probability(Dist::Normal, 0.0, Tail::Lower).unwrap(),
            0.5
        );
    }

    #[test]
    fn normal_at_one() {
        // Independently tabulated Phi(1).
        let p = tail_probability(Dist::Normal, 1.0, Tail::Lower).unwrap();
        assert_abs_diff_eq!(p, 0.841344746068543, epsilon = 1e-9);
    }

    #[test]
    fn chi_square_two_df_is_exponential() {
        // chi^2(2) upper tail = exp(-x/2)
        for x in [0.5, 2.2, 4.952, 10.0] {
            let p = tail_probability(Dist::ChiSquare { df: 2.0 }, x, Tail::Upper).unwrap();
            assert_abs_diff_eq!(p, (-x / 2.0).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn lower_plus_upper_is_one() {
        let cases = [
            (Dist::Normal, 1.7),
            (Dist::StudentT { df: 7.0 }, -2.3),
            (Dist::ChiSquare { df: 5.0 }, 3.3),
            (Dist::FisherF { df1: 3.0, df2: 17.0 }, 2.9),
        ];
        for (dist, x) in cases {
            let lo = tail_probability(dist, x, Tail::Lower).unwrap();
            let hi = tail_probability(dist, x, Tail::Upper).unwrap();
            assert!(
                (lo + hi - 1.0).abs() < 1e-12,
                "{dist:?} at {x}: {lo} + {hi}"
            );
        }
    }

    #[test]
    fn student_t_approaches_normal() {
        for x in [-2.0, 0.0, 2.0] {
            let t = tail_probability(Dist::StudentT { df: 1e6 }, x, Tail::Lower).unwrap();
            let n = tail_probability(Dist::Normal, x, Tail::Lower).unwrap();
            assert!((t - n).abs() < 1e-6, "x={x}: {t} vs {n}");
        }
    }

    #[test]
    fn t_quantile_matches_tabulated() {
        // t_{0.975} at selected df, from standard tables.
        let table = [(1.0, 12.706), (5.0, 2.5706), (10.0, 2.2281), (50.0, 2.0086)];
        for (df, expect) in table {
            let q = student_t_quantile(0.975, df).unwrap();
            assert_abs_diff_eq!(q, expect, epsilon = 2e-4);
        }
    }

    #[test]
    fn normal_quantile_inverts_cdf() {
        for p in [0.001, 0.025, 0.3, 0.5, 0.841344746068543, 0.999] {
            let x = normal_quantile(p).unwrap();
            assert_abs_diff_eq!(normal_cdf(x), p, epsilon = 1e-12);
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(tail_probability(Dist::StudentT { df: 0.5 }, 1.0, Tail::Lower).is_err());
        assert!(tail_probability(Dist::FisherF { df1: 0.0, df2: 3.0 }, 1.0, Tail::Upper).is_err());
        assert!(normal_quantile(0.0).is_err());
    }

    #[test]
    fn two_sided_is_symmetric_and_clamped() {
        let a = tail_probability(Dist::Normal, 1.3, Tail::TwoSided).unwrap();
        let b = tail_probability(Dist::Normal, -1.3, Tail::TwoSided).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        let c = tail_probability(Dist::Normal, 0.0, Tail::TwoSided).unwrap();
        assert_eq!(c, 1.0);
    }
}
