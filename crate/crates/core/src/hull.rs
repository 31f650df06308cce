//! Incremental convex-hull support queries.
//!
//! Points `(x, y)` arrive with strictly increasing `x`. After each batch of
//! insertions the structure answers `max_j (y_j - c*x_j)` and
//! `min_j (y_j - c*x_j)` over all points seen so far in `O(log n)`: the
//! extremum of a linear functional over a point set is attained on the convex
//! hull, and along the hull the functional is unimodal in the vertex index.
#[derive(Debug, Default)]
pub(crate) struct SupportHull {
    upper: Vec<(f64, f64)>,
    lower: Vec<(f64, f64)>,
}

fn cross(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

impl SupportHull {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.upper.clear();
        self.lower.clear();
    }

    /// Insert a point; `x` must exceed every previously inserted `x`.
    pub fn push(&mut self, x: f64, y: f64) {
        let p = (x, y);
        while self.upper.len() >= 2 {
            let m = self.upper.len();
            if cross(self.upper[m - 2], self.upper[m - 1], p) >= 0.0 {
                self.upper.pop();
            } else {
                break;
            }
        }
        self.upper.push(p);
        while self.lower.len() >= 2 {
            let m = self.lower.len();
            if cross(self.lower[m - 2], self.lower[m - 1], p) <= 0.0 {
                self.lower.pop();
            } else {
                break;
            }
        }
        self.lower.push(p);
    }

    /// `max_j (y_j - c*x_j)` over all inserted points.
    pub fn max_linear(&self, c: f64) -> f64 {
        let h = &self.upper;
        debug_assert!(!h.is_empty());
        let mut lo = 0;
        let mut hi = h.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            // move right while the edge mid -> mid+1 still increases y - c*x
            if h[mid + 1].1 - h[mid].1 >= c * (h[mid + 1].0 - h[mid].0) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        h[lo].1 - c * h[lo].0
    }

    /// `min_j (y_j - c*x_j)` over all inserted points.
    pub fn min_linear(&self, c: f64) -> f64 {
        let h = &self.lower;
        debug_assert!(!h.is_empty());
        let mut lo = 0;
        let mut hi = h.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if h[mid + 1].1 - h[mid].1 <= c * (h[mid + 1].0 - h[mid].0) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        h[lo].1 - c * h[lo].0
    }
}
