//! Floating-point-robust ceil for grid bounds.

/// `ceil(x)` where `x` is meant to be an exact product like `n * 0.2`.
///
/// A product such as `10.0 * 0.2` can land an ulp above the intended integer
/// and naive `ceil` would then skip a valid grid point; nudging by 1e-9
/// (far larger than any ulp at the magnitudes involved, far smaller than the
/// grid spacing of 1) restores the mathematical value.
pub(crate) fn robust_ceil(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::robust_ceil;

    #[test]
    fn hits_exact_products() {
        assert_eq!(robust_ceil(10.0 * 0.2), 2);
        assert_eq!(robust_ceil(5.0 * 0.2), 1);
        assert_eq!(robust_ceil(3.0 * 0.49), 2);
        assert_eq!(robust_ceil(5000.0 * 0.2), 1000);
        assert_eq!(robust_ceil(0.3), 1);
        assert_eq!(robust_ceil(2.5), 3);
    }
}
