//! Monte Carlo simulation of the limiting distributions.
//!
//! Under the no-change null the ratio statistics converge to the supremum
//! over the trimmed interval of a ratio of Brownian-bridge functionals: the
//! numerator is a functional of the bridge formed on `[0, t]` from a Wiener
//! path, the denominator the mirror construction on `[t, 1]` built from the
//! reversed increments. This module discretizes a Wiener path on a uniform
//! grid of `m + 1` points, evaluates the split functionals either at a single
//! `t` ([`split_at`]) or along the whole grid (an `O(m log m)` sweep using
//! convex-hull support queries), and aggregates independent replications into
//! a [`NullSample`] from which critical values and p-values are read off.
//!
//! For the classical scaled statistics the null draw is the same functional
//! applied to a single Brownian bridge on `[0, 1]`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::SupportHull;
use crate::kind::{Family, Functional, StatKind};
use crate::rng::{stream, RNG_NAME};
use crate::round::robust_ceil;
use crate::series::TrimFraction;

/// A standard Wiener path sampled at `t = j/m`, `j = 0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    m: usize,
    w: Vec<f64>,
}

impl WienerPath {
    /// Sample a path: `w[j] = w[j-1] + g_j` with iid `g_j ~ N(0, 1/m)`.
    pub fn sample<R: Rng>(m: usize, rng: &mut R) -> Self {
        assert!(m >= 2, "grid resolution must be at least 2");
        let sd = (1.0 / m as f64).sqrt();
        let mut w = Vec::with_capacity(m + 1);
        w.push(0.0);
        let mut acc = 0.0;
        for _ in 0..m {
            let g: f64 = rng.sample(StandardNormal);
            acc += sd * g;
            w.push(acc);
        }
        Self { m, w }
    }

    /// Wrap explicit grid values (for deterministic injections in tests).
    pub fn from_values(w: Vec<f64>) -> Result<Self> {
        if w.len() < 3 {
            return Err(Error::InvalidSpec(format!(
                "path needs at least 3 grid values, got {}",
                w.len()
            )));
        }
        if w[0] != 0.0 {
            return Err(Error::InvalidSpec("path must start at 0".into()));
        }
        if let Some(pos) = w.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "non-finite path value at grid index {pos}"
            )));
        }
        Ok(Self { m: w.len() - 1, w })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.w
    }

    /// The path of reversed increments `u -> w(1) - w(1 - u)`, again a
    /// Wiener path starting at zero.
    fn reversed_values(&self) -> Vec<f64> {
        let last = self.w[self.m];
        self.w.iter().rev().map(|&v| last - v).collect()
    }
}

/// Grid indices `j` with `delta <= j/m <= 1 - delta`. The upper bound is
/// `m - lo`, keeping the grid symmetric under path reversal.
pub(crate) fn trimmed_grid(m: usize, delta: TrimFraction) -> Result<(usize, usize)> {
    let lo = robust_ceil(m as f64 * delta.get()).max(1);
    let hi = m - lo;
    if lo > hi {
        return Err(Error::EmptyRange {
            n: m,
            delta: delta.get(),
        });
    }
    Ok((lo, hi))
}

/// The two split functionals of a path at a fixed interior grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitFunctionals {
    /// `t = t_index / m`.
    pub t: f64,
    /// Functional of the bridge `w(s) - (s/t) w(t)` over `s in [0, t]`.
    pub forward: f64,
    /// Functional of the mirror bridge `w*(s) - ((1-s)/(1-t)) w*(t)` over
    /// `s in [t, 1]`, where `w*(s) = w(1) - w(s)`.
    pub backward: f64,
    pub functional: Functional,
}

/// Evaluate both split functionals at `t = t_index / m` by direct scans.
///
/// Sups and infs run over the grid points of the segment; integrals are
/// left-endpoint Riemann sums with step `1/m`.
pub fn split_at(path: &WienerPath, t_index: usize, functional: Functional) -> SplitFunctionals {
    let m = path.m;
    assert!(
        t_index >= 1 && t_index <= m - 1,
        "t_index = {t_index} must be interior to the grid"
    );
    let w = &path.w;
    let t = t_index as f64;

    // forward bridge p_b = w_b - (b/t_index) w_t, b = 0..=t_index
    let wt = w[t_index];
    let forward = segment_functional(
        (0..=t_index).map(|b| w[b] - (b as f64 / t) * wt),
        t_index,
        m,
        functional,
    );

    // backward bridge q_b = w*_b - ((m-b)/(m-t_index)) w*_t, b = t_index..=m
    let last = w[m];
    let wst = last - w[t_index];
    let span = (m - t_index) as f64;
    let backward = segment_functional(
        (t_index..=m).map(|b| (last - w[b]) - ((m - b) as f64 / span) * wst),
        m - t_index,
        m,
        functional,
    );

    SplitFunctionals {
        t: t_index as f64 / m as f64,
        forward,
        backward,
        functional,
    }
}

/// Reduce a bridge segment (given as `len + 1` grid values pinned at zero on
/// both ends) to a scalar functional. `len` is the segment length in grid
/// steps and `m` the full grid resolution (for the `1/m` integration step).
fn segment_functional(
    values: impl Iterator<Item = f64>,
    len: usize,
    m: usize,
    functional: Functional,
) -> f64 {
    match functional {
        Functional::MaxAbs => {
            let mut max_abs = 0.0f64;
            for v in values {
                max_abs = max_abs.max(v.abs());
            }
            max_abs
        }
        Functional::Range => {
            let mut max = f64::NEG_INFINITY;
            let mut min = f64::INFINITY;
            for v in values {
                max = max.max(v);
                min = min.min(v);
            }
            max - min
        }
        Functional::VarType => {
            // left-endpoint sums: drop the final grid point (its value is 0
            // anyway, but the count matters through the averaging below)
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for v in values.take(len) {
                sum += v;
                sum_sq += v * v;
            }
            let value = (sum_sq - sum * sum / len as f64) / m as f64;
            debug_assert!(value >= -1e-12 * sum_sq.max(1.0));
            value.max(0.0)
        }
    }
}

/// Forward split functional at every `t in lo..=hi` in one sweep.
///
/// For MaxAbs and Range the bridge extremum `max_b (p_b - (b/t) p_t)` is a
/// support query against the convex hull of the prefix points `(b, p_b)`,
/// answered in `O(log t)` as the hull grows; for VarType the Riemann sums
/// expand into prefix accumulators updated in `O(1)`.
fn forward_profile(p: &[f64], functional: Functional, lo: usize, hi: usize) -> Vec<f64> {
    let m = p.len() - 1;
    debug_assert!(lo >= 1 && hi <= m - 1 && lo <= hi);
    let mut out = Vec::with_capacity(hi - lo + 1);
    match functional {
        Functional::MaxAbs | Functional::Range => {
            let mut hull = SupportHull::new();
            hull.push(0.0, p[0]);
            for t in 1..=hi {
                hull.push(t as f64, p[t]);
                if t >= lo {
                    let c = p[t] / t as f64;
                    let max = hull.max_linear(c);
                    let min = hull.min_linear(c);
                    out.push(match functional {
                        Functional::MaxAbs => max.max(-min),
                        Functional::Range => max - min,
                        Functional::VarType => unreachable!(),
                    });
                }
            }
        }
        Functional::VarType => {
            // running sums over b = 0..t-1 of p_b, b*p_b, p_b^2
            let mut sum_w = p[0];
            let mut sum_bw = 0.0;
            let mut sum_sq = p[0] * p[0];
            for t in 1..=hi {
                if t >= lo {
                    let tf = t as f64;
                    let c = p[t] / tf;
                    let sum_b = tf * (tf - 1.0) / 2.0;
                    let sum_b2 = (tf - 1.0) * tf * (2.0 * tf - 1.0) / 6.0;
                    let lin = sum_w - c * sum_b;
                    let quad = sum_sq - 2.0 * c * sum_bw + c * c * sum_b2;
                    let value = (quad - lin * lin / tf) / m as f64;
                    out.push(value.max(0.0));
                }
                let tf = t as f64;
                sum_w += p[t];
                sum_bw += tf * p[t];
                sum_sq += p[t] * p[t];
            }
        }
    }
    out
}

/// One draw of the limiting statistic: the supremum over the trimmed t-grid
/// of the split-functional ratio (`V`), its reciprocal (`Z`), or the larger
/// of the two (`TMax`).
///
/// `0/0` grid points are skipped (a probability-zero event in the
/// continuum).
pub fn sup_ratio_draw(
    path: &WienerPath,
    delta: TrimFraction,
    functional: Functional,
    family: Family,
) -> f64 {
    assert!(family.is_ratio(), "classical kinds have no ratio draw");
    let m = path.m;
    let (lo, hi) = trimmed_grid(m, delta).expect("trimmed grid is empty for this (m, delta)");

    let num = forward_profile(&path.w, functional, lo, hi);
    let rev = path.reversed_values();
    let den_rev = forward_profile(&rev, functional, lo, hi);

    let mut v_sup = f64::NEG_INFINITY;
    let mut z_sup = f64::NEG_INFINITY;
    for t in lo..=hi {
        let num_t = num[t - lo];
        // backward functional at t equals the forward functional of the
        // reversed path at m - t
        let den_t = den_rev[hi - t];
        if family != Family::Z {
            let r = ratio(num_t, den_t);
            if !r.is_nan() && r > v_sup {
                v_sup = r;
            }
        }
        if family != Family::V {
            let r = ratio(den_t, num_t);
            if !r.is_nan() && r > z_sup {
                z_sup = r;
            }
        }
    }
    match family {
        Family::V => v_sup,
        Family::Z => z_sup,
        Family::TMax => v_sup.max(z_sup),
        Family::Classical => unreachable!(),
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    }
}

/// Functional of a single discretized Brownian bridge on `m + 1` points;
/// the null draw for the classical scaled statistics.
pub fn bridge_functional<R: Rng>(m: usize, functional: Functional, rng: &mut R) -> f64 {
    let path = WienerPath::sample(m, rng);
    let w = &path.w;
    let last = w[m];
    segment_functional(
        (0..=m).map(|j| w[j] - (j as f64 / m as f64) * last),
        m,
        m,
        functional,
    )
}

/// Scale factor relating the fixed-t split ratio to a ratio of independent
/// bridge functionals: `sqrt(t/(1-t))` for MaxAbs and Range, `t/(1-t)` for
/// VarType.
pub fn ratio_scale(t: f64, functional: Functional) -> f64 {
    let odds = t / (1.0 - t);
    match functional {
        Functional::MaxAbs | Functional::Range => odds.sqrt(),
        Functional::VarType => odds,
    }
}

/// One draw of the fixed-t distributional identity: two independent bridges
/// on `m + 1` points, reduced by the functional, scaled by
/// [`ratio_scale`].
pub fn bridge_ratio_draw<R: Rng>(t: f64, functional: Functional, m: usize, rng: &mut R) -> f64 {
    assert!(t > 0.0 && t < 1.0, "t must be interior to (0, 1)");
    let num = bridge_functional(m, functional, rng);
    let den = bridge_functional(m, functional, rng);
    ratio_scale(t, functional) * num / den
}

/// Sorted Monte Carlo draws of a limiting null distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct NullSample {
    pub kind: StatKind,
    pub delta: TrimFraction,
    pub m: usize,
    pub reps: usize,
    pub seed: u64,
    draws: Vec<f64>,
}

/// Simulate `reps` independent draws of the limiting distribution of `kind`.
///
/// Replication `r` draws from the dedicated stream `(seed, r)`, so the result
/// is a pure function of the arguments no matter how the replications are
/// scheduled. Ratio kinds use [`sup_ratio_draw`] on a fresh Wiener path;
/// classical kinds use [`bridge_functional`].
pub fn null_sample(
    kind: StatKind,
    delta: TrimFraction,
    m: usize,
    reps: usize,
    seed: u64,
) -> Result<NullSample> {
    if m < 2 {
        return Err(Error::InvalidSpec(format!("grid resolution {m} too small")));
    }
    if reps == 0 {
        return Err(Error::InvalidSpec("reps must be positive".into()));
    }
    if kind.family.is_ratio() {
        trimmed_grid(m, delta)?;
    }
    let mut draws: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(seed, r as u64);
            if kind.family.is_ratio() {
                let path = WienerPath::sample(m, &mut rng);
                sup_ratio_draw(&path, delta, kind.functional, kind.family)
            } else {
                bridge_functional(m, kind.functional, &mut rng)
            }
        })
        .collect();
    draws.sort_unstable_by(f64::total_cmp);
    Ok(NullSample {
        kind,
        delta,
        m,
        reps,
        seed,
        draws,
    })
}

impl NullSample {
    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    /// Empirical critical value at the given test level.
    pub fn critical_value(&self, level: f64) -> f64 {
        critical_value(&self.draws, level)
    }

    /// Empirical p-value of an observed statistic.
    pub fn p_value(&self, observed: f64) -> f64 {
        p_value(&self.draws, observed)
    }
}

/// The `(1 - level)` empirical quantile of sorted draws: the order statistic
/// at rank `ceil((1 - level) * n)` (1-based).
pub fn critical_value(sorted_draws: &[f64], level: f64) -> f64 {
    assert!(!sorted_draws.is_empty());
    assert!(level > 0.0 && level < 1.0, "level must be in (0, 1)");
    let n = sorted_draws.len();
    let rank = robust_ceil((1.0 - level) * n as f64).clamp(1, n);
    sorted_draws[rank - 1]
}

/// Empirical p-value with add-one smoothing:
/// `(1 + #{draws >= observed}) / (n + 1)`.
pub fn p_value(sorted_draws: &[f64], observed: f64) -> f64 {
    assert!(!sorted_draws.is_empty());
    let below = sorted_draws.partition_point(|&d| d < observed);
    let ge = sorted_draws.len() - below;
    (1 + ge) as f64 / (sorted_draws.len() + 1) as f64
}

/// Critical values extracted from a [`NullSample`], with the provenance
/// needed to regenerate it and the sorted draws retained for p-values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueTable {
    pub kind: StatKind,
    pub delta: TrimFraction,
    pub m: usize,
    pub reps: usize,
    pub seed: u64,
    pub rng_name: String,
    /// `(level, critical value)` pairs, ascending in level.
    pub quantiles: Vec<(f64, f64)>,
    /// Sorted null draws.
    pub draws: Vec<f64>,
}

/// Default levels recorded in every table.
pub const DEFAULT_LEVELS: [f64; 3] = [0.01, 0.05, 0.10];

impl CriticalValueTable {
    pub fn from_sample(sample: &NullSample, levels: &[f64]) -> Self {
        let mut levels: Vec<f64> = levels.to_vec();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let quantiles = levels
            .iter()
            .map(|&level| (level, sample.critical_value(level)))
            .collect();
        Self {
            kind: sample.kind,
            delta: sample.delta,
            m: sample.m,
            reps: sample.reps,
            seed: sample.seed,
            rng_name: RNG_NAME.to_string(),
            quantiles,
            draws: sample.draws.clone(),
        }
    }

    pub fn critical_value(&self, level: f64) -> f64 {
        critical_value(&self.draws, level)
    }

    pub fn p_value(&self, observed: f64) -> f64 {
        p_value(&self.draws, observed)
    }

    /// Check the structural invariants; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::CorruptTable(msg));
        if self.m < 2 {
            return fail(format!("grid resolution {} too small", self.m));
        }
        if self.reps == 0 || self.draws.len() != self.reps {
            return fail(format!(
                "{} draws recorded but reps = {}",
                self.draws.len(),
                self.reps
            ));
        }
        if self.quantiles.is_empty() {
            return fail("no quantiles recorded".into());
        }
        for pair in self.quantiles.windows(2) {
            let ((l1, c1), (l2, c2)) = (pair[0], pair[1]);
            if !(l1 < l2) {
                return fail(format!("levels not strictly increasing: {l1} vs {l2}"));
            }
            if !(c1 > c2) {
                return fail(format!(
                    "critical values not strictly decreasing in level: {c1} (at {l1}) vs {c2} (at {l2})"
                ));
            }
        }
        for &(level, cv) in &self.quantiles {
            if !(level > 0.0 && level < 1.0) {
                return fail(format!("level {level} outside (0, 1)"));
            }
            if cv != critical_value(&self.draws, level) {
                return fail(format!(
                    "quantile at level {level} does not match the recorded draws"
                ));
            }
        }
        let mut prev = f64::NEG_INFINITY;
        for &d in &self.draws {
            if !d.is_finite() || d < 0.0 {
                return fail(format!("draw {d} is not a finite nonnegative value"));
            }
            if d < prev {
                return fail("draws are not sorted ascending".into());
            }
            prev = d;
        }
        Ok(())
    }
}
