//! Monte Carlo check of the projection tail bounds behind the
//! query-dependent index.
//!
//! Fix `q` at the origin, a furthest point `p` at distance `r = 1` and a near
//! point `p'` just inside distance `1/c`. With `t` the root of
//! `e^(t^2/2) t^(c^2) = n / (2 pi)^(c^2/2)` and threshold `delta = r t / c`,
//! a Gaussian projection should put `p` above `delta` with probability at
//! least about `n^(-1/c^2)` and `p'` above it with probability at most
//! `(ln n)^(c^2/2 - 1/3) / n` (the latter only for large enough `n`).

use crate::error::{Error, Result};
use crate::lsh::normal_cdf;
use crate::random::{sample_gaussian_vector, RandomSeed};

/// How far inside distance `1/c` the near point is placed.
pub const NEAR_POINT_GAP: f64 = 1e-9;

pub const MIN_TRIALS: usize = 10_000;

fn log_equation(t: f64, n: f64, c: f64) -> f64 {
    // ln of e^(t^2/2) t^(c^2) minus ln of n / (2 pi)^(c^2/2).
    let c2 = c * c;
    t * t / 2.0 + c2 * t.ln() - (n.ln() - c2 / 2.0 * (2.0 * std::f64::consts::PI).ln())
}

/// Root `t > 1` of `e^(t^2/2) t^(c^2) = n / (2 pi)^(c^2/2)` by bisection on
/// `[1, 10 sqrt(ln n)]`.
pub fn solve_t(n: usize, c: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::param(format!("need n >= 3, got {n}")));
    }
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::param(format!("c must be > 1, got {c}")));
    }
    let nf = n as f64;
    let (mut lo, mut hi) = (1.0, 10.0 * nf.ln().sqrt());
    if !(log_equation(lo, nf, c) <= 0.0 && log_equation(hi, nf, c) >= 0.0) {
        return Err(Error::Degenerate(format!(
            "no root of the threshold equation in [1, {hi}] for n={n}, c={c}"
        )));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if log_equation(mid, nf, c) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailCheckReport {
    pub n: usize,
    pub c: f64,
    pub trials: usize,
    pub t: f64,
    /// Projection threshold `r t / c` with `r = 1`.
    pub delta: f64,
    /// Fraction of projections with `a · (p - q) >= delta`.
    pub far_rate: f64,
    /// Fraction of projections with `a · (p' - q) >= delta`.
    pub near_rate: f64,
    /// `n^(-1/c^2)`.
    pub far_bound: f64,
    /// `(ln n)^(c^2/2 - 1/3) / n`.
    pub near_bound: f64,
    /// Exact Gaussian tail `P[X >= t / c]`.
    pub far_exact: f64,
    /// Exact Gaussian tail `P[X >= delta / |p' - q|]`.
    pub near_exact: f64,
}

pub fn lemma3_montecarlo(n: usize, c: f64, trials: usize, seed: RandomSeed) -> Result<TailCheckReport> {
    if trials < MIN_TRIALS {
        return Err(Error::param(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    let t = solve_t(n, c)?;
    let r = 1.0;
    let delta = r * t / c;
    let near_dist = r / c - NEAR_POINT_GAP;

    // q = 0, p = r e1, p' = near_dist e2, so a · (p - q) = r a1 and
    // a · (p' - q) = near_dist a2.
    let mut rng = seed.stream(0);
    let (mut far_hits, mut near_hits) = (0usize, 0usize);
    for _ in 0..trials {
        let a = sample_gaussian_vector(2, &mut rng).to_dense();
        if r * a[0] >= delta {
            far_hits += 1;
        }
        if near_dist * a[1] >= delta {
            near_hits += 1;
        }
    }
    let nf = n as f64;
    let c2 = c * c;
    Ok(TailCheckReport {
        n,
        c,
        trials,
        t,
        delta,
        far_rate: far_hits as f64 / trials as f64,
        near_rate: near_hits as f64 / trials as f64,
        far_bound: nf.powf(-1.0 / c2),
        near_bound: nf.ln().powf(c2 / 2.0 - 1.0 / 3.0) / nf,
        far_exact: 1.0 - normal_cdf(delta / r),
        near_exact: 1.0 - normal_cdf(delta / near_dist),
    })
}
