//! Exponential fits, uniformity and product-measure statistics, and the
//! pushforward check for flowed horospheres.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec::Executor;
use crate::geom::{BoundaryPoint, ConvexBody, Point, UnitTangent};
use crate::groups::{reduce_to_fundamental_domain, GroupKind, GroupSpec};
use crate::perp::{EquivariantFamily, OrthoSpectrum};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("degenerate data: {0}")]
    DegenerateData(&'static str),
    #[error("empty input")]
    Empty,
    #[error("all ratios already within 1e-12 of one")]
    RatiosAlreadyConverged,
    #[error("operation needs the modular group and its cusp family")]
    NotModular,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpFit {
    pub log_c: f64,
    pub delta: f64,
    /// Largest absolute deviation in `log N`.
    pub residual: f64,
}

/// Least squares of `log N` against `t`.
pub fn exponential_fit(t: &[f64], n: &[f64]) -> Result<ExpFit, StatsError> {
    if t.len() != n.len() {
        return Err(StatsError::InvalidArgument("grids of different lengths"));
    }
    if t.len() < 4 {
        return Err(StatsError::DegenerateData("fewer than four points"));
    }
    if n.iter().any(|v| !(*v > 0.0)) {
        return Err(StatsError::DegenerateData("nonpositive count"));
    }
    let m = t.len() as f64;
    let ly: Vec<f64> = n.iter().map(|v| v.ln()).collect();
    let mx = t.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = t.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(StatsError::DegenerateData("all abscissae equal"));
    }
    let sxy: f64 = t.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let delta = sxy / sxx;
    let log_c = my - delta * mx;
    let residual = t.iter().zip(&ly).map(|(x, y)| (y - log_c - delta * x).abs()).fold(0.0, f64::max);
    Ok(ExpFit { log_c, delta, residual })
}

/// Counts against predictions on a common grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub t_grid: Vec<f64>,
    pub n_values: Vec<f64>,
    pub prediction_values: Vec<f64>,
    pub ratios: Vec<f64>,
    pub fitted: Option<ExpFit>,
    pub fitted_kappa: Option<f64>,
}

impl CountReport {
    pub fn new(t_grid: Vec<f64>, n_values: Vec<f64>, prediction_values: Vec<f64>) -> Result<Self, StatsError> {
        if t_grid.len() != n_values.len() || t_grid.len() != prediction_values.len() {
            return Err(StatsError::InvalidArgument("grids of different lengths"));
        }
        let ratios = n_values.iter().zip(&prediction_values).map(|(n, p)| n / p).collect();
        let positive: Vec<usize> = (0..t_grid.len()).filter(|&i| n_values[i] > 0.0).collect();
        let ts: Vec<f64> = positive.iter().map(|&i| t_grid[i]).collect();
        let ns: Vec<f64> = positive.iter().map(|&i| n_values[i]).collect();
        let fitted = exponential_fit(&ts, &ns).ok();
        let mut r = CountReport { t_grid, n_values, prediction_values, ratios, fitted, fitted_kappa: None };
        r.fitted_kappa = convergence_rate(&r).ok();
        Ok(r)
    }
}

/// Decay rate `κ̂` of `|ratio − 1|`, as minus the least-squares slope of
/// its logarithm.
pub fn convergence_rate(report: &CountReport) -> Result<f64, StatsError> {
    if report.ratios.len() < 6 {
        return Err(StatsError::DegenerateData("fewer than six points"));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = report
        .t_grid
        .iter()
        .zip(&report.ratios)
        .filter(|(_, r)| (*r - 1.0).abs() > 1e-12)
        .map(|(t, r)| (*t, (r - 1.0).abs()))
        .unzip();
    if x.is_empty() {
        return Err(StatsError::RatiosAlreadyConverged);
    }
    if x.len() < 2 {
        return Err(StatsError::DegenerateData("fewer than two unconverged points"));
    }
    let fit = exponential_fit_any(&x, &y)?;
    Ok(-fit)
}

fn exponential_fit_any(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let m = x.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if !(sxx > 0.0) {
        return Err(StatsError::DegenerateData("all abscissae equal"));
    }
    Ok(x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / sxx)
}

/// Kolmogorov–Smirnov distance to the uniform law on `[0, 1)`.
pub fn ks_uniform(samples: &[f64]) -> Result<f64, StatsError> {
    let w = vec![1.0; samples.len()];
    ks_uniform_weighted(samples, &w)
}

/// Weighted version: the empirical law puts mass proportional to the weight
/// on each sample.
pub fn ks_uniform_weighted(samples: &[f64], weights: &[f64]) -> Result<f64, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::Empty);
    }
    if samples.len() != weights.len() {
        return Err(StatsError::InvalidArgument("samples and weights differ in length"));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(StatsError::DegenerateData("weights sum to zero"));
    }
    let mut idx: Vec<usize> = (0..samples.len()).collect();
    idx.sort_by(|&a, &b| samples[a].partial_cmp(&samples[b]).unwrap_or(core::cmp::Ordering::Equal));
    let mut acc = 0.0;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let x = samples[idx[i]].clamp(0.0, 1.0);
        let below = acc / total;
        while i < idx.len() && samples[idx[i]].clamp(0.0, 1.0) == x {
            acc += weights[idx[i]];
            i += 1;
        }
        let above = acc / total;
        d = d.max((x - below).abs()).max((above - x).abs());
    }
    Ok(d.min(1.0))
}

/// Endpoint pairs of perpendiculars with their weights and the canonical
/// foot coordinates on both bodies.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSample {
    pub entries: Vec<PairEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairEntry {
    pub v_minus: UnitTangent,
    pub v_plus: UnitTangent,
    pub datum_minus: f64,
    pub datum_plus: f64,
    pub weight: f64,
}

impl PairSample {
    pub fn from_spectrum(spec: &OrthoSpectrum) -> Self {
        PairSample {
            entries: spec
                .records
                .iter()
                .map(|r| PairEntry {
                    v_minus: r.perp.v_minus,
                    v_plus: r.perp.v_plus,
                    datum_minus: r.foot_minus_datum[0],
                    datum_plus: r.foot_plus_datum[0],
                    weight: r.weight * r.multiplicity.value(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairCheck {
    pub divergence: f64,
    /// Row-major weighted histogram, normalized to total mass one.
    pub histogram: Vec<f64>,
    pub empty_bins: usize,
}

fn bin(x: f64, n: usize) -> usize {
    ((x.clamp(0.0, 1.0) * n as f64) as usize).min(n - 1)
}

/// Total variation between the joint histogram of the foot coordinates and
/// the product of its marginals.
pub fn pair_product_check(sample: &PairSample, bins_minus: usize, bins_plus: usize) -> Result<PairCheck, StatsError> {
    if sample.entries.is_empty() {
        return Err(StatsError::Empty);
    }
    if bins_minus == 0 || bins_plus == 0 {
        return Err(StatsError::InvalidArgument("bin counts must be positive"));
    }
    let mut h = vec![0.0; bins_minus * bins_plus];
    for e in &sample.entries {
        if !(e.weight > 0.0) {
            return Err(StatsError::DegenerateData("nonpositive weight"));
        }
        h[bin(e.datum_minus, bins_minus) * bins_plus + bin(e.datum_plus, bins_plus)] += e.weight;
    }
    let total: f64 = h.iter().sum();
    for x in &mut h {
        *x /= total;
    }
    let rows: Vec<f64> = (0..bins_minus).map(|i| h[i * bins_plus..(i + 1) * bins_plus].iter().sum()).collect();
    let cols: Vec<f64> = (0..bins_plus).map(|j| (0..bins_minus).map(|i| h[i * bins_plus + j]).sum()).collect();
    let mut tv = 0.0;
    for i in 0..bins_minus {
        for j in 0..bins_plus {
            tv += (h[i * bins_plus + j] - rows[i] * cols[j]).abs();
        }
    }
    let empty_bins = h.iter().filter(|x| **x == 0.0).count();
    Ok(PairCheck { divergence: 0.5 * tv, histogram: h, empty_bins })
}

/// Cells of the modular fundamental domain truncated at height `Y_MAX`: `X_BINS`
/// strips in `x`, each cut into `U_BINS` pieces of equal area along `u = 1/y`.
pub const X_BINS: usize = 8;
pub const U_BINS: usize = 8;
pub const Y_MAX: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct PushforwardCheck {
    pub divergence: f64,
    /// Empirical mass per cell, the last entry being the cusp tail above `Y_MAX`.
    pub empirical: Vec<f64>,
    pub expected: Vec<f64>,
}

/// Normalized hyperbolic area per cell, tail last.
pub fn fundamental_domain_cells() -> Vec<f64> {
    let total = core::f64::consts::PI / 3.0;
    let mut out = Vec::with_capacity(X_BINS * U_BINS + 1);
    for i in 0..X_BINS {
        let x1 = -0.5 + i as f64 / X_BINS as f64;
        let x2 = x1 + 1.0 / X_BINS as f64;
        let strip = x2.asin() - x1.asin() - (x2 - x1) / Y_MAX;
        for _ in 0..U_BINS {
            out.push(strip / U_BINS as f64 / total);
        }
    }
    out.push(1.0 / Y_MAX / total);
    out
}

fn cell_of(p: &Point) -> usize {
    if p.h > Y_MAX {
        return X_BINS * U_BINS;
    }
    let x = p.z.re.clamp(-0.5, 0.5);
    let i = bin(x + 0.5, X_BINS);
    let top = 1.0 / (1.0 - x * x).sqrt();
    let s = (1.0 / p.h - 1.0 / Y_MAX) / (top - 1.0 / Y_MAX);
    i * U_BINS + bin(s, U_BINS)
}

/// Samples outer normals uniformly on the cusp horosphere modulo its
/// stabilizer, flows them for time `t`, reduces the base points to the
/// fundamental domain and compares the cell masses with normalized area.
pub fn flow_pushforward_check<E: Executor>(
    family: &EquivariantFamily,
    g: &GroupSpec,
    t: f64,
    n_samples: usize,
    seed: u64,
    exec: &E,
) -> Result<PushforwardCheck, StatsError> {
    let cusp = matches!(family.base, ConvexBody::Horoball { center: BoundaryPoint::Infinity, level, .. } if (level - 1.0).abs() < 1e-12);
    if g.kind != GroupKind::Modular || !cusp {
        return Err(StatsError::NotModular);
    }
    if n_samples == 0 {
        return Err(StatsError::Empty);
    }
    const CHUNK: usize = 4096;
    let chunks: Vec<(u64, usize)> =
        (0..n_samples.div_ceil(CHUNK)).map(|k| (k as u64, CHUNK.min(n_samples - k * CHUNK))).collect();
    let ncell = X_BINS * U_BINS + 1;
    let parts = exec.map(&chunks, |&(k, len)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut counts = vec![0u64; ncell];
        for _ in 0..len {
            let x: f64 = rng.random();
            // The outer normal of {h ≥ 1} points down; flowing it lowers
            // the base point to height e^{-t}.
            let p = Point::h2(x, (-t).exp());
            let (q, _) = reduce_to_fundamental_domain(g, &p).expect("modular group and planar point");
            counts[cell_of(&q)] += 1;
        }
        counts
    });
    let mut counts = vec![0u64; ncell];
    for c in parts {
        for (a, b) in counts.iter_mut().zip(c) {
            *a += b;
        }
    }
    let empirical: Vec<f64> = counts.iter().map(|c| *c as f64 / n_samples as f64).collect();
    let expected = fundamental_domain_cells();
    let divergence = 0.5 * empirical.iter().zip(&expected).map(|(a, b)| (a - b).abs()).sum::<f64>();
    Ok(PushforwardCheck { divergence, empirical, expected })
}
