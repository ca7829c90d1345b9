//! Small numeric helpers shared by the likelihood kernels and the
//! post-processing code: normal pdf/cdf, interval probabilities that stay
//! accurate in far tails, and basic sample statistics.

use crate::scalar::{cast, Scalar};

/// Standard normal pdf.
pub fn normal_pdf<F: Scalar>(z: F) -> F {
    let two_pi: F = cast::<F>(2.0) * F::PI();
    (-z * z / cast(2.0)).exp() / two_pi.sqrt()
}

/// Log of the normal density with the given mean and standard deviation.
pub fn ln_normal_pdf<F: Scalar>(x: F, mean: F, sd: F) -> F {
    let two_pi: F = cast::<F>(2.0) * F::PI();
    let z = (x - mean) / sd;
    -z * z / cast(2.0) - sd.ln() - two_pi.sqrt().ln()
}

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf<F: Scalar>(z: F) -> F {
    let half: F = cast(0.5);
    half * Scalar::erfc(-z / F::SQRT_2())
}

/// ln P(z_lo <= Z <= z_hi) for Z ~ N(0, 1).
///
/// Computed as a difference of erfc values mirrored onto the side where both
/// terms are small, which preserves relative precision deep into the tails.
/// If the difference underflows to zero while the interval is non-degenerate,
/// a Mills-ratio asymptotic takes over in log space.
pub fn ln_normal_interval_prob<F: Scalar>(z_lo: F, z_hi: F) -> F {
    if z_lo.is_nan() || z_hi.is_nan() || z_lo >= z_hi {
        return F::neg_infinity();
    }
    let half: F = cast(0.5);
    let p = if z_lo + z_hi >= F::zero() {
        half * (Scalar::erfc(z_lo / F::SQRT_2()) - Scalar::erfc(z_hi / F::SQRT_2()))
    } else {
        half * (Scalar::erfc(-z_hi / F::SQRT_2()) - Scalar::erfc(-z_lo / F::SQRT_2()))
    };
    if p > F::zero() {
        return p.ln();
    }
    // Both endpoints are so far into one tail that the erfc difference
    // underflowed. Mirror onto the upper tail and use
    // P(a <= Z <= b) = T(a) - T(b) with T(x) ~ phi(x)/x (1 - 1/x^2 + 3/x^4).
    let (a, b) = if z_lo >= F::zero() {
        (z_lo, z_hi)
    } else {
        (-z_hi, -z_lo)
    };
    if a <= F::one() {
        // Not actually a far tail; the probability is a true zero at this
        // precision (degenerate interval).
        return F::neg_infinity();
    }
    let ln_t = |x: F| -> F {
        let x2 = x * x;
        let corr = F::one() - F::one() / x2 + cast::<F>(3.0) / (x2 * x2);
        ln_normal_pdf(x, F::zero(), F::one()) - x.ln() + corr.ln()
    };
    let ln_ta = ln_t(a);
    let ratio = (ln_t(b) - ln_ta).exp();
    ln_ta + (-ratio).ln_1p()
}

/// Sample mean.
pub fn mean<F: Scalar>(values: &[F]) -> F {
    let n = cast::<F>(values.len() as f64);
    values.iter().copied().sum::<F>() / n
}

/// Sample standard deviation (n - 1 denominator); zero for fewer than two values.
pub fn sample_sd<F: Scalar>(values: &[F]) -> F {
    if values.len() < 2 {
        return F::zero();
    }
    // Exact zero for a constant slice; summation rounding would otherwise
    // manufacture a spurious ulp-sized spread.
    if values.iter().all(|&v| v == values[0]) {
        return F::zero();
    }
    let m = mean(values);
    let ss: F = values.iter().map(|&v| (v - m) * (v - m)).sum();
    (ss / cast(values.len() as f64 - 1.0)).sqrt()
}

/// Linear-interpolation percentile (p in [0, 100]) of an unsorted slice.
pub fn percentile<F: Scalar>(values: &[F], p: F) -> F {
    assert!(!values.is_empty(), "percentile of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN values"));
    let hundred: F = cast(100.0);
    let rank = p / hundred * cast(sorted.len() as f64 - 1.0);
    let lo = rank.floor();
    let hi = rank.ceil();
    let lo_idx = lo.to_usize().unwrap_or(0).min(sorted.len() - 1);
    let hi_idx = hi.to_usize().unwrap_or(0).min(sorted.len() - 1);
    if lo_idx == hi_idx {
        return sorted[lo_idx];
    }
    let w = rank - lo;
    sorted[lo_idx] * (F::one() - w) + sorted[hi_idx] * w
}

/// Pearson correlation; zero when either side is degenerate.
pub fn correlation<F: Scalar>(a: &[F], b: &[F]) -> F {
    assert_eq!(a.len(), b.len());
    if a.len() < 2 {
        return F::zero();
    }
    let ma = mean(a);
    let mb = mean(b);
    let mut cov = F::zero();
    let mut va = F::zero();
    let mut vb = F::zero();
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == F::zero() || vb == F::zero() {
        return F::zero();
    }
    let r = cov / (va.sqrt() * vb.sqrt());
    r.max(-F::one()).min(F::one())
}
