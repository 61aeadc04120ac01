//! Small statistics helpers: empirical distances, limit laws, intervals.

use alloc::vec::Vec;

use crate::{math, Error, Result};

/// Two-sided 97.5% standard normal quantile.
pub const Z_975: f64 = 1.959963984540054;

/// Kolmogorov-Smirnov distance `sup_x |F_n(x) - F(x)|` of a sample to a
/// continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut xs: Vec<f64> = samples.to_vec();
    if xs.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("samples", "NaN in sample"));
    }
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// CDF of the `d = 1` endpoint limit with density `c_alpha (1 - |x|)^alpha`
/// on `[-1, 1]`.
pub fn endpoint_limit_cdf_1d(x: f64, alpha: f64) -> f64 {
    if x <= -1.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else if x <= 0.0 {
        math::powf(1.0 + x, alpha + 1.0) / 2.0
    } else {
        1.0 - math::powf(1.0 - x, alpha + 1.0) / 2.0
    }
}

/// `c_alpha = (int_{|y|_1 <= 1} (1 - |y|_1)^alpha dy)^{-1}` on `R^d`, which is
/// `prod_{k=1}^d (alpha + k) / 2^d`.
pub fn c_alpha(alpha: f64, d: usize) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid("alpha", "must be a positive finite number"));
    }
    if !(1..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    Ok((1..=d).map(|k| (alpha + k as f64) / 2.0).product())
}

/// Volume `2^d / d!` of the unit `l1` ball; `|B_N| ~ ball_volume(d) N^d`.
pub fn ball_volume(d: usize) -> f64 {
    (1..=d).map(|k| 2.0 / k as f64).product()
}

/// `exp(-c x^{-alpha})` for `x > 0`, `0` otherwise.
pub fn frechet_cdf(x: f64, alpha: f64, c: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        math::exp(-c * math::powf(x, -alpha))
    }
}

/// Wilson score interval at 95% for `hits` out of `n`; `(0, 1)` when `n = 0`.
pub fn wilson_interval(hits: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = Z_975 * Z_975;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = Z_975 * math::sqrt(p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)) / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Median (midpoint of the two central values for even length).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() || values.iter().any(|v| v.is_nan()) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Total-variation distance `1/2 sum |p - q|` of two laws on the same index set.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::invalid("q", "length differs from p"));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}
