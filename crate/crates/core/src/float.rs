use core::cmp::Ordering;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// Standard normal CDF.
#[inline]
pub(crate) fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Euclidean norm of a sequence of values.
pub(crate) fn norm<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    sqrt(values.into_iter().map(|v| v * v).sum())
}

/// Total-order wrapper so costs can live in a `BinaryHeap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Ord64(pub f64);

impl Eq for Ord64 {}

impl PartialOrd for Ord64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ord64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}
