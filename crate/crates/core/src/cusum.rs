//! Ratio-type and classical CUSUM statistics for a change in the mean.
//!
//! For a candidate change point `k` the series is split into `x_1..x_k` and
//! `x_{k+1}..x_n`. Each segment is centered at its own mean and reduced to a
//! scalar CUSUM functional; the test statistic is the supremum over the
//! trimmed candidate range of the ratio of the two functionals. Because both
//! sides of the ratio scale identically, no variance estimate is needed.
//!
//! Index conventions: forward partial sums run over `i in 1..=k`,
//! `j in 1..=i`; backward partial sums over `i in k+1..=n`, `j in i..=n`,
//! uniformly for all three functionals. Under these conventions the backward
//! functional at `k` is exactly the forward functional of the reversed series
//! at `n - k`, and the Z statistic of `x` is bit-for-bit the V statistic of
//! the reversed series.

use crate::error::{Error, Result};
use crate::kind::{Family, Functional, StatKind};
use crate::round::robust_ceil;
use crate::series::{Series, TrimFraction};

/// Inclusive candidate range `k_lo..=k_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub lo: usize,
    pub hi: usize,
}

impl KRange {
    pub fn iter(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }

    pub fn len(self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(self) -> bool {
        false // construction fails instead of producing an empty range
    }
}

/// Trimmed candidate change points: `ceil(n*delta) <= k <= floor(n*(1-delta))`.
///
/// `floor(n*(1-delta)) = n - ceil(n*delta)` for every real `n*delta`, so the
/// upper bound is derived from the lower one; this keeps the range exactly
/// symmetric under series reversal.
pub fn k_range(n: usize, delta: TrimFraction) -> Result<KRange> {
    debug_assert!(n >= 2);
    let lo = robust_ceil(n as f64 * delta.get()).max(1);
    let hi = n - lo;
    if lo > hi {
        return Err(Error::EmptyRange {
            n,
            delta: delta.get(),
        });
    }
    Ok(KRange { lo, hi })
}

/// Mean of `values[..k]`, summed left to right.
fn segment_mean(values: &[f64], k: usize) -> f64 {
    values[..k].iter().sum::<f64>() / k as f64
}

/// CUSUM functional of `values[..k]` centered at `mean`.
///
/// With `s_i = sum_{j<=i} (values_j - mean)`: MaxAbs is `max |s_i|`, Range is
/// `max s_i - min s_i`, VarType is `sum s_i^2 - (sum s_i)^2 / k`.
fn forward_core(values: &[f64], k: usize, mean: f64, functional: Functional) -> f64 {
    let mut s = 0.0;
    match functional {
        Functional::MaxAbs => {
            let mut max_abs = 0.0f64;
            for &v in &values[..k] {
                s += v - mean;
                max_abs = max_abs.max(s.abs());
            }
            max_abs
        }
        Functional::Range => {
            let mut max = f64::NEG_INFINITY;
            let mut min = f64::INFINITY;
            for &v in &values[..k] {
                s += v - mean;
                max = max.max(s);
                min = min.min(s);
            }
            max - min
        }
        Functional::VarType => {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for &v in &values[..k] {
                s += v - mean;
                sum += s;
                sum_sq += s * s;
            }
            let value = sum_sq - sum * sum / k as f64;
            // nonnegative by Cauchy-Schwarz; clamp roundoff
            debug_assert!(value >= -1e-12 * sum_sq.max(1.0));
            value.max(0.0)
        }
    }
}

/// Forward CUSUM functional of the head segment `x_1..x_k`, centered at the
/// head mean.
pub fn forward_functional(x: &Series, k: usize, functional: Functional) -> f64 {
    let values = x.values();
    assert!(k >= 1 && k <= values.len(), "k = {k} out of range");
    forward_core(values, k, segment_mean(values, k), functional)
}

/// Backward CUSUM functional of the tail segment `x_{k+1}..x_n`, centered at
/// the tail mean, with partial sums taken from the right end inward.
///
/// Implemented as the forward functional of the reversed series at `n - k`,
/// which is the same arithmetic.
pub fn backward_functional(x: &Series, k: usize, functional: Functional) -> f64 {
    let n = x.len();
    assert!(k < n, "k = {k} leaves an empty tail");
    forward_functional(&x.reversed(), n - k, functional)
}

/// Which segment goes in the numerator of the ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Forward functional over backward functional.
    V,
    /// Backward functional over forward functional.
    Z,
}

/// Per-k trace of a ratio scan over the trimmed candidate range.
///
/// A `k` with a zero denominator and positive numerator contributes a ratio
/// of `+inf` (the statistic diverges); a `0/0` entry is undefined and stored
/// as NaN, and skipped when taking the supremum.
#[derive(Debug, Clone)]
pub struct RatioCurve {
    pub k_values: Vec<usize>,
    pub numerators: Vec<f64>,
    pub denominators: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Smallest k attaining the supremum.
    pub argmax_k: usize,
    pub sup_value: f64,
}

/// Scan the trimmed candidate range, forming the per-k ratio of segment
/// functionals in the given orientation.
///
/// Errors with [`Error::AllDegenerate`] when every candidate ratio is `0/0`
/// (e.g. a constant series).
pub fn ratio_scan(
    x: &Series,
    delta: TrimFraction,
    functional: Functional,
    orientation: Orientation,
) -> Result<RatioCurve> {
    let n = x.len();
    let range = k_range(n, delta)?;
    let values = x.values();
    let reversed = x.reversed();
    let rev_values = reversed.values();

    // prefix[k] = values[0] + .. + values[k-1], folded left to right so the
    // per-k mean matches forward_functional bit for bit
    let prefix = |v: &[f64]| {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(v.len() + 1);
        out.push(0.0);
        for &value in v {
            acc += value;
            out.push(acc);
        }
        out
    };
    let prefix_fwd = prefix(values);
    let prefix_rev = prefix(rev_values);

    let len = range.len();
    let mut k_values = Vec::with_capacity(len);
    let mut numerators = Vec::with_capacity(len);
    let mut denominators = Vec::with_capacity(len);
    let mut ratios = Vec::with_capacity(len);
    let mut sup_value = f64::NEG_INFINITY;
    let mut argmax_k = 0usize;

    for k in range.iter() {
        let fwd = forward_core(values, k, prefix_fwd[k] / k as f64, functional);
        let tail = n - k;
        let bwd = forward_core(rev_values, tail, prefix_rev[tail] / tail as f64, functional);
        let (num, den) = match orientation {
            Orientation::V => (fwd, bwd),
            Orientation::Z => (bwd, fwd),
        };
        let ratio = if den > 0.0 {
            num / den
        } else if num > 0.0 {
            f64::INFINITY
        } else {
            f64::NAN // 0/0: undefined, skipped
        };
        if !ratio.is_nan() && ratio > sup_value {
            sup_value = ratio;
            argmax_k = k;
        }
        k_values.push(k);
        numerators.push(num);
        denominators.push(den);
        ratios.push(ratio);
    }

    if argmax_k == 0 {
        return Err(Error::AllDegenerate);
    }
    Ok(RatioCurve {
        k_values,
        numerators,
        denominators,
        ratios,
        argmax_k,
        sup_value,
    })
}

/// A computed ratio statistic with the curve(s) behind it.
#[derive(Debug, Clone)]
pub struct StatisticOutcome {
    pub kind: StatKind,
    /// Supremum of the ratio curve; `+inf` when some candidate has a zero
    /// denominator against a positive numerator.
    pub value: f64,
    /// Smallest k attaining the value (from the V curve on a TMax tie).
    pub argmax_k: usize,
    pub v_curve: Option<RatioCurve>,
    pub z_curve: Option<RatioCurve>,
}

/// Compute a V, Z or TMax ratio statistic.
///
/// For the classical scaled statistics use [`classical_statistic`]; passing a
/// classical kind here is an [`Error::InvalidKind`].
pub fn statistic(x: &Series, delta: TrimFraction, kind: StatKind) -> Result<StatisticOutcome> {
    match kind.family {
        Family::V => {
            let curve = ratio_scan(x, delta, kind.functional, Orientation::V)?;
            Ok(StatisticOutcome {
                kind,
                value: curve.sup_value,
                argmax_k: curve.argmax_k,
                v_curve: Some(curve),
                z_curve: None,
            })
        }
        Family::Z => {
            let curve = ratio_scan(x, delta, kind.functional, Orientation::Z)?;
            Ok(StatisticOutcome {
                kind,
                value: curve.sup_value,
                argmax_k: curve.argmax_k,
                v_curve: None,
                z_curve: Some(curve),
            })
        }
        Family::TMax => {
            let v = ratio_scan(x, delta, kind.functional, Orientation::V)?;
            let z = ratio_scan(x, delta, kind.functional, Orientation::Z)?;
            let (value, argmax_k) = if v.sup_value >= z.sup_value {
                (v.sup_value, v.argmax_k)
            } else {
                (z.sup_value, z.argmax_k)
            };
            Ok(StatisticOutcome {
                kind,
                value,
                argmax_k,
                v_curve: Some(v),
                z_curve: Some(z),
            })
        }
        Family::Classical => Err(Error::InvalidKind(format!(
            "{kind} is a scaled statistic; use classical_statistic with a long-run variance"
        ))),
    }
}

/// Long-run variance estimate of the error sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongRunVariance {
    pub sigma2_hat: f64,
    pub bandwidth: usize,
}

/// Bartlett-kernel estimator of the long-run variance.
///
/// `sigma2 = gamma_0 + 2 * sum_{h=1}^{bw} (1 - h/(bw+1)) * gamma_h` with
/// `gamma_h` the lag-h sample autocovariance (1/n normalization) of the
/// demeaned series, truncated at zero from below. With `bandwidth = 0` this
/// is the plain sample variance.
pub fn bartlett_lrv(x: &Series, bandwidth: usize) -> LongRunVariance {
    let values = x.values();
    let n = values.len();
    assert!(bandwidth < n, "bandwidth must be below the sample size");
    let mean = segment_mean(values, n);
    let centered: Vec<f64> = values.iter().map(|&v| v - mean).collect();

    let autocov = |h: usize| -> f64 {
        let mut acc = 0.0;
        for t in 0..n - h {
            acc += centered[t] * centered[t + h];
        }
        acc / n as f64
    };

    let mut sigma2 = autocov(0);
    for h in 1..=bandwidth {
        let weight = 1.0 - h as f64 / (bandwidth as f64 + 1.0);
        sigma2 += 2.0 * weight * autocov(h);
    }
    LongRunVariance {
        sigma2_hat: sigma2.max(0.0),
        bandwidth,
    }
}

/// Default Bartlett bandwidth `floor(n^(1/3))`.
pub fn default_bandwidth(n: usize) -> usize {
    let mut b = (n as f64).cbrt().round() as usize;
    while b > 0 && b * b * b > n {
        b -= 1;
    }
    while (b + 1) * (b + 1) * (b + 1) <= n {
        b += 1;
    }
    b
}

/// Classical scaled CUSUM statistic with partial sums centered at the full
/// sample mean.
///
/// With `s_k = sum_{i<=k} (x_i - mean)`: MaxAbs gives `max |s_k| /
/// sqrt(n*sigma2)`, Range gives `(max s_k - min s_k) / sqrt(n*sigma2)`, and
/// VarType gives `(sum s_k^2 - (sum s_k)^2 / n) / (n^2 * sigma2)`.
pub fn classical_statistic(
    x: &Series,
    functional: Functional,
    lrv: &LongRunVariance,
) -> Result<f64> {
    if lrv.sigma2_hat <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let values = x.values();
    let n = values.len();
    let core = forward_core(values, n, segment_mean(values, n), functional);
    let value = match functional {
        Functional::MaxAbs | Functional::Range => core / (n as f64 * lrv.sigma2_hat).sqrt(),
        Functional::VarType => core / (n as f64 * n as f64 * lrv.sigma2_hat),
    };
    Ok(value)
}

/// The k maximizing `|s_k|` over the full series; the natural change-point
/// location estimate reported alongside the classical statistics.
pub fn classical_peak(x: &Series) -> usize {
    let values = x.values();
    let n = values.len();
    let mean = segment_mean(values, n);
    let mut s = 0.0;
    let mut best = 0.0f64;
    let mut best_k = 1;
    for (i, &v) in values.iter().enumerate() {
        s += v - mean;
        if s.abs() > best {
            best = s.abs();
            best_k = i + 1;
        }
    }
    best_k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: &[f64]) -> Series {
        Series::new(values.to_vec()).unwrap()
    }

    fn delta(d: f64) -> TrimFraction {
        TrimFraction::new(d).unwrap()
    }

    #[test]
    fn k_range_examples() {
        assert_eq!(k_range(10, delta(0.2)).unwrap(), KRange { lo: 2, hi: 8 });
        assert_eq!(k_range(5, delta(0.2)).unwrap(), KRange { lo: 1, hi: 4 });
        assert!(matches!(
            k_range(3, delta(0.49)),
            Err(Error::EmptyRange { n: 3, .. })
        ));
    }

    #[test]
    fn k_range_is_symmetric() {
        for n in 2..200usize {
            for d in [0.05, 0.1, 0.2, 0.25, 0.3, 0.45] {
                if let Ok(r) = k_range(n, delta(d)) {
                    assert_eq!(r.lo + r.hi, n, "n={n} d={d}");
                    assert!(r.lo >= 1 && r.hi <= n - 1);
                }
            }
        }
    }

    #[test]
    fn forward_constant_segment_is_zero() {
        let x = series(&[3.5, 3.5, 3.5, 3.5]);
        assert_eq!(forward_functional(&x, 2, Functional::MaxAbs), 0.0);
        assert_eq!(forward_functional(&x, 3, Functional::Range), 0.0);
        assert_eq!(forward_functional(&x, 4, Functional::VarType), 0.0);
    }

    #[test]
    fn forward_two_point_hand_value() {
        // s_1 = -0.5, s_2 = 0
        let x = series(&[0.0, 1.0]);
        assert_eq!(forward_functional(&x, 2, Functional::MaxAbs), 0.5);
        assert_eq!(forward_functional(&x, 2, Functional::Range), 0.5);
    }

    #[test]
    fn backward_hand_values() {
        let x = series(&[5.0, 5.0, 5.0]);
        assert_eq!(backward_functional(&x, 1, Functional::MaxAbs), 0.0);

        // tail mean 0.5; r_3 = 0.5, r_2 = 0
        let x = series(&[0.0, 0.0, 1.0]);
        assert_eq!(backward_functional(&x, 1, Functional::MaxAbs), 0.5);
    }

    #[test]
    fn backward_equals_forward_of_reversed() {
        let x = series(&[0.3, -1.2, 2.5, 0.0, 4.1, -0.7, 1.6]);
        let rev = x.reversed();
        let n = x.len();
        for k in 1..n {
            for f in Functional::ALL {
                assert_eq!(
                    backward_functional(&x, k, f),
                    forward_functional(&rev, n - k, f),
                    "k={k} f={f:?}"
                );
            }
        }
    }

    #[test]
    fn constant_series_is_all_degenerate() {
        let x = series(&[7.0; 10]);
        for f in Functional::ALL {
            assert!(matches!(
                ratio_scan(&x, delta(0.2), f, Orientation::V),
                Err(Error::AllDegenerate)
            ));
        }
    }

    #[test]
    fn constant_tail_diverges() {
        // tail of ones: for k >= 3 the backward functional is exactly zero
        // while the head still varies, so the ratio is +inf at k = 3 first
        let x = series(&[1.0, 2.0, 3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let curve = ratio_scan(&x, delta(0.2), Functional::MaxAbs, Orientation::V).unwrap();
        assert!(curve.sup_value.is_infinite());
        assert_eq!(curve.argmax_k, 3);
        // k = 2 has a live tail, so its ratio is finite
        assert!(curve.ratios[0].is_finite());
    }

    #[test]
    fn tmax_is_max_of_v_and_z() {
        let x = series(&[0.4, 1.9, -0.3, 2.2, 0.1, -1.5, 0.8, 0.0, 1.1, -0.6]);
        let d = delta(0.2);
        for f in Functional::ALL {
            let v = statistic(&x, d, StatKind::new(Family::V, f)).unwrap();
            let z = statistic(&x, d, StatKind::new(Family::Z, f)).unwrap();
            let t = statistic(&x, d, StatKind::new(Family::TMax, f)).unwrap();
            assert_eq!(t.value, v.value.max(z.value));
            assert!(t.value >= 1.0, "r and 1/r cannot both be below one");
        }
    }

    #[test]
    fn location_and_scale_invariance() {
        let x = series(&[0.4, 1.9, -0.3, 2.2, 0.1, -1.5, 0.8, 0.0, 1.1, -0.6]);
        let shifted = series(&x.values().iter().map(|v| v + 123.456).collect::<Vec<_>>());
        let scaled = series(&x.values().iter().map(|v| v * -7.25).collect::<Vec<_>>());
        let d = delta(0.2);
        for family in Family::RATIO {
            for f in Functional::ALL {
                let kind = StatKind::new(family, f);
                let base = statistic(&x, d, kind).unwrap();
                let shift = statistic(&shifted, d, kind).unwrap();
                let scale = statistic(&scaled, d, kind).unwrap();
                let rel = |a: f64, b: f64| ((a - b) / b).abs();
                assert!(rel(shift.value, base.value) < 1e-10, "{kind} shift");
                assert!(rel(scale.value, base.value) < 1e-10, "{kind} scale");
            }
        }
    }

    #[test]
    fn z_is_v_of_reversed_exactly() {
        let x = series(&[2.1, -0.4, 0.9, 3.3, -1.7, 0.2, 1.4, -0.9, 0.5, 2.8, -2.2, 1.0]);
        let rev = x.reversed();
        let d = delta(0.2);
        let n = x.len();
        for f in Functional::ALL {
            let z = statistic(&x, d, StatKind::new(Family::Z, f)).unwrap();
            let v = statistic(&rev, d, StatKind::new(Family::V, f)).unwrap();
            assert_eq!(z.value, v.value, "{f:?}");
            assert_eq!(z.argmax_k, n - v.argmax_k, "{f:?}");
        }
    }

    #[test]
    fn classical_kind_is_rejected_by_statistic() {
        let x = series(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let err = statistic(&x, delta(0.2), StatKind::new(Family::Classical, Functional::MaxAbs));
        assert!(matches!(err, Err(Error::InvalidKind(_))));
    }

    #[test]
    fn bartlett_bandwidth_zero_is_sample_variance() {
        let x = series(&[1.0, 2.0, 4.0, 8.0, 16.0]);
        let mean = x.values().iter().sum::<f64>() / 5.0;
        let var = x.values().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 5.0;
        let lrv = bartlett_lrv(&x, 0);
        assert!((lrv.sigma2_hat - var).abs() < 1e-12);
    }

    #[test]
    fn default_bandwidth_hits_exact_cubes() {
        assert_eq!(default_bandwidth(8), 2);
        assert_eq!(default_bandwidth(26), 2);
        assert_eq!(default_bandwidth(27), 3);
        assert_eq!(default_bandwidth(1000), 10);
        assert_eq!(default_bandwidth(999), 9);
        assert_eq!(default_bandwidth(10000), 21);
    }

    #[test]
    fn classical_hand_value() {
        let x = series(&[0.0, 1.0]);
        let lrv = LongRunVariance {
            sigma2_hat: 1.0,
            bandwidth: 0,
        };
        let t1 = classical_statistic(&x, Functional::MaxAbs, &lrv).unwrap();
        assert!((t1 - 0.5 / 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn classical_zero_variance() {
        let x = series(&[4.0; 6]);
        let lrv = bartlett_lrv(&x, 1);
        assert_eq!(lrv.sigma2_hat, 0.0);
        assert!(matches!(
            classical_statistic(&x, Functional::MaxAbs, &lrv),
            Err(Error::ZeroVariance)
        ));
    }

    #[test]
    fn classical_peak_finds_the_break() {
        let mut values = vec![0.0; 20];
        for v in values.iter_mut().skip(10) {
            *v = 5.0;
        }
        let x = series(&values);
        assert_eq!(classical_peak(&x), 10);
    }
}
