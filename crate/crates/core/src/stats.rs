//! Binomial and mean confidence intervals for Monte Carlo estimates.

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `hits` successes in `trials` Bernoulli trials.
///
/// Stays inside `[0, 1]` and keeps a non-zero width at `hits = 0`, which the
/// normal approximation does not.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if hits == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    // p itself can sit a rounding error outside [centre - half, centre + half]
    (lo.min(p), hi.max(p))
}

/// Normal-approximation interval from first and second moments.
pub fn mean_interval(sum: f64, sum_sq: f64, n: u64, z: f64) -> (f64, f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    let half = z * (var / nf).sqrt();
    (mean, mean - half, mean + half)
}
