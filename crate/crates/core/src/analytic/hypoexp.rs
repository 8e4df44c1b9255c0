//! Distribution of sums of independent exponential variates.

/// Relative gap below which two means are treated as equal in the
/// two-term closed form.
pub const EQUAL_MEANS_RTOL: f64 = 1e-6;

/// `Pr(X + Y <= x)` for independent exponentials with means `a` and `b`.
///
/// Distinct means use the hypoexponential form, near-equal means switch to
/// the Erlang-2 form `1 - e^{-t}(1 + t)`. Above one half the value is taken
/// as the complement of [`sum_two_exp_sf`], so it stays monotone up to 1.
pub fn sum_two_exp_cdf(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let cdf = if equal_means(a, b) {
        let t = x / (0.5 * (a + b));
        if t < 1e-4 {
            // t^2/2 - t^3/3 + t^4/8
            return t * t * (0.5 - t / 3.0 + t * t / 8.0);
        }
        -(-t).exp_m1() - t * (-t).exp()
    } else {
        // 1 - (a e^{-x/a} - b e^{-x/b}) / (a - b), rearranged around expm1
        let fa = -(-x / a).exp_m1();
        let fb = -(-x / b).exp_m1();
        (a * fa - b * fb) / (a - b)
    };
    if cdf > 0.5 {
        1.0 - sum_two_exp_sf(a, b, x)
    } else {
        cdf.max(0.0)
    }
}

/// `Pr(X + Y > x)`, accurate in the upper tail.
pub fn sum_two_exp_sf(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if equal_means(a, b) {
        let t = x / (0.5 * (a + b));
        return ((-t).exp() * (1.0 + t)).min(1.0);
    }
    ((a * (-x / a).exp() - b * (-x / b).exp()) / (a - b)).clamp(0.0, 1.0)
}

fn equal_means(a: f64, b: f64) -> bool {
    (a - b).abs() < EQUAL_MEANS_RTOL * a.max(b)
}

/// CDF at `x` of the sum of independent exponentials with the given means.
///
/// Evaluated by uniformisation of the pure-birth chain that walks through
/// the phases at rates `1/mean_k`: with `L = max rate`,
/// `F(x) = sum_m Poisson(m; L x) * Pr(all phases done after m jumps)`.
/// Every term is non-negative, so the result keeps full relative accuracy
/// in the `x -> 0` tail and needs no special handling of repeated means.
pub fn sum_exp_cdf(means: &[f64], x: f64) -> f64 {
    assert!(!means.is_empty(), "sum of zero exponentials");
    if x <= 0.0 {
        return 0.0;
    }
    let rates: Vec<f64> = means.iter().map(|m| 1.0 / m).collect();
    let fastest = rates.iter().copied().fold(0.0, f64::max);
    let slowest = rates.iter().copied().fold(f64::INFINITY, f64::min);
    // Survival below 1e-300 for at most 16 phases.
    if slowest * x > 800.0 {
        return 1.0;
    }
    let n = rates.len();
    let advance: Vec<f64> = rates.iter().map(|r| r / fastest).collect();
    let mu = fastest * x;
    let last = (mu + 12.0 * mu.sqrt() + 40.0).ceil() as usize;

    // occupancy of phases 0..n-1 after m jumps; absorbed mass tracked apart
    let mut occ = vec![0.0; n];
    occ[0] = 1.0;
    let mut absorbed = 0.0;
    let ln_mu = mu.ln();
    let mut ln_pois = -mu; // ln Poisson(0; mu)
    let mut cdf = 0.0;
    for m in 1..=last {
        let mut carry = 0.0;
        for (k, p) in occ.iter_mut().enumerate() {
            let moved = *p * advance[k];
            *p = *p - moved + carry;
            carry = moved;
        }
        absorbed += carry;
        ln_pois += ln_mu - (m as f64).ln();
        if m >= n {
            cdf += ln_pois.exp() * absorbed;
        }
    }
    cdf.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_exponential() {
        for (m, x) in [(1.0f64, 0.3f64), (2.5, 1e-6), (0.1, 4.0)] {
            let want = -(-x / m).exp_m1();
            let got = sum_exp_cdf(&[m], x);
            assert!(((got - want) / want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn erlang_two_taylor() {
        for x in [1e-8, 1e-5, 1e-3] {
            let got = sum_exp_cdf(&[1.0, 1.0], x) / (x * x);
            assert!((got - 0.5).abs() < x, "{got}");
            let closed = sum_two_exp_cdf(1.0, 1.0, x) / (x * x);
            assert!((closed - 0.5).abs() < x, "{closed}");
        }
    }

    #[test]
    fn two_term_forms_agree() {
        for &(a, b) in &[
            (1.0, 2.25),
            (9.0, 0.25),
            (1.0, 1.0),
            (1.0, 1.0 + 1e-8),
            (3.0, 3.0 + 1e-3),
        ] {
            for &x in &[1e-4, 1e-2, 0.3, 2.0, 25.0] {
                let closed = sum_two_exp_cdf(a, b, x);
                let unif = sum_exp_cdf(&[a, b], x);
                assert!(
                    (closed - unif).abs() <= 1e-9 * unif.max(1e-300) + 1e-15,
                    "a={a} b={b} x={x}: {closed} vs {unif}"
                );
            }
        }
    }

    #[test]
    fn three_distinct_means_match_partial_fractions() {
        let means = [1.0, 2.0, 4.0];
        let rates: Vec<f64> = means.iter().map(|m| 1.0 / m).collect();
        let pf = |x: f64| {
            let mut s = 0.0;
            for i in 0..3 {
                let mut c = 1.0;
                for j in 0..3 {
                    if i != j {
                        c *= rates[j] / (rates[j] - rates[i]);
                    }
                }
                s += c * (-rates[i] * x).exp();
            }
            1.0 - s
        };
        for x in [0.05, 0.5, 3.0, 20.0] {
            let got = sum_exp_cdf(&means, x);
            assert!((got - pf(x)).abs() < 1e-12, "{x}: {got} vs {}", pf(x));
        }
    }

    #[test]
    fn limits() {
        assert_eq!(sum_exp_cdf(&[1.0, 2.0], 0.0), 0.0);
        assert_eq!(sum_two_exp_cdf(1.0, 2.0, 0.0), 0.0);
        assert!((sum_exp_cdf(&[1.0, 2.0, 3.0], 200.0) - 1.0).abs() < 1e-12);
        assert_eq!(sum_exp_cdf(&[1.0; 16], 1e4), 1.0);
    }

    #[test]
    fn monotone_in_x() {
        let means = [0.3, 0.3, 5.0, 1.0];
        let mut prev = 0.0;
        for i in 1..=500 {
            let f = sum_exp_cdf(&means, i as f64 * 0.05);
            assert!(f >= prev);
            prev = f;
        }
    }
}
