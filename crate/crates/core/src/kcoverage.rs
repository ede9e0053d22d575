//! k-coverage of GAF-style partitions with one active node per cell.
//!
//! Shrinking the cell radius to `r_s / (2·⌈k/4⌉^(1/2))` in 2D (hexagons) or
//! `r_s / (2·⌈k/8⌉^(1/3))` in 3D (truncated octahedra) packs more cells into
//! each sensing disc or ball. Treating active nodes as a Poisson process of
//! one node per cell, the number within `r_s` of a point is Poisson with
//! mean `λ_k` and the point is k-covered with probability `P(K ≥ k)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    pub fn as_usize(self) -> usize {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }

    /// Cells sharing the optimal per-cell node budget: 4 hexagons in 2D,
    /// 8 truncated octahedra in 3D.
    fn band(self) -> u64 {
        match self {
            Dimension::Two => 4,
            Dimension::Three => 8,
        }
    }
}

impl TryFrom<u8> for Dimension {
    type Error = crate::Error;

    fn try_from(d: u8) -> Result<Self> {
        match d {
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            _ => Err(domain(format!("dimension must be 2 or 3, got {d}"))),
        }
    }
}

fn check_k(k: u64) -> Result<()> {
    if k == 0 {
        Err(domain("coverage degree k must be at least 1"))
    } else {
        Ok(())
    }
}

fn bands(k: u64, dim: Dimension) -> u64 {
    k.div_ceil(dim.band())
}

/// Expected active nodes within sensing range of a point.
pub fn lambda_k(k: u64, dim: Dimension) -> Result<f64> {
    check_k(k)?;
    let m = bands(k, dim) as f64;
    Ok(match dim {
        Dimension::Two => 8.0 * PI * m / (3.0 * 3f64.sqrt()),
        Dimension::Three => 5.0 * 5f64.sqrt() * PI * m / 3.0,
    })
}

/// Lower bound of `λ_k / k`: disc over hexagon, or ball over TO, at equal radius.
pub fn lambda_per_k_bound(dim: Dimension) -> f64 {
    match dim {
        Dimension::Two => 2.0 * PI / (3.0 * 3f64.sqrt()),
        Dimension::Three => 5.0 * 5f64.sqrt() * PI / 24.0,
    }
}

/// Cell radius as a fraction of the sensing range.
pub fn gaf_cell_radius(k: u64, dim: Dimension) -> Result<f64> {
    check_k(k)?;
    let m = bands(k, dim) as f64;
    Ok(match dim {
        Dimension::Two => 0.5 / m.sqrt(),
        Dimension::Three => 0.5 / m.cbrt(),
    })
}

/// Active nodes per unit area (2D) or volume (3D): one per cell.
pub fn gaf_active_density(k: u64, dim: Dimension, sensing_range: f64) -> Result<f64> {
    let r = gaf_cell_radius(k, dim)? * sensing_range;
    Ok(match dim {
        Dimension::Two => 1.0 / (1.5 * 3f64.sqrt() * r * r),
        Dimension::Three => 1.0 / (32.0 / (5.0 * 5f64.sqrt()) * r.powi(3)),
    })
}

/// Poisson CDF `P(K < k)`, summed in log space.
fn poisson_lower_tail(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { 1.0 };
    }
    let ln_lambda = lambda.ln();
    let mut log_term = -lambda;
    let mut sum = 0.0;
    for i in 0..k {
        sum += log_term.exp();
        log_term += ln_lambda - ((i + 1) as f64).ln();
    }
    sum
}

/// `P(K ≥ k)` for `K ~ Poisson(λ_k)`.
pub fn coverage_probability(k: u64, dim: Dimension) -> Result<f64> {
    let lambda = lambda_k(k, dim)?;
    Ok((1.0 - poisson_lower_tail(lambda, k)).clamp(0.0, 1.0))
}

/// Active nodes relative to an optimal k-coverage schedule.
pub fn overhead_vs_optimal(k: u64, dim: Dimension) -> Result<f64> {
    check_k(k)?;
    Ok((dim.band() * bands(k, dim)) as f64 / k as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KCoverageRow {
    pub k: u64,
    pub lambda_k: f64,
    pub p_geq_k: f64,
    pub overhead: f64,
}

pub fn kcoverage_table(dim: Dimension, k_max: u64) -> Result<Vec<KCoverageRow>> {
    (1..=k_max)
        .map(|k| {
            Ok(KCoverageRow {
                k,
                lambda_k: lambda_k(k, dim)?,
                p_geq_k: coverage_probability(k, dim)?,
                overhead: overhead_vs_optimal(k, dim)?,
            })
        })
        .collect()
}

/// `P(K = k)` for `K ~ Poisson(λ)`.
pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    (-lambda + k as f64 * lambda.ln() - ln_fact).exp()
}

/// Both sides of the two-Poisson sum identity at `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonSum {
    /// `P(K = k)` for `K ~ Poisson(λ₁ + λ₂)`.
    pub direct: f64,
    /// `Σ_i P(K₁ = k - i) · P(K₂ = i)`.
    pub convolution: f64,
}

pub fn poisson_sum_distribution(lambda1: f64, lambda2: f64, k: u64) -> Result<PoissonSum> {
    if !(lambda1 >= 0.0 && lambda2 >= 0.0) || !lambda1.is_finite() || !lambda2.is_finite() {
        return Err(domain(format!(
            "Poisson rates must be finite and nonnegative, got {lambda1}, {lambda2}"
        )));
    }
    let convolution = (0..=k)
        .map(|i| poisson_pmf(lambda1, k - i) * poisson_pmf(lambda2, i))
        .sum();
    Ok(PoissonSum {
        direct: poisson_pmf(lambda1 + lambda2, k),
        convolution,
    })
}

/// Monte Carlo estimate of k-coverage for a Poisson field of active nodes
/// in a periodic box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub dimension: Dimension,
    /// Nodes per unit area or volume.
    pub density: f64,
    pub sensing_range: f64,
    pub k: u64,
    /// Total sample points.
    pub samples: u64,
    /// Sample points drawn per independent field.
    pub samples_per_field: u64,
    /// Box side; at least three sensing ranges.
    pub box_side: f64,
    pub seed: u64,
}

impl MonteCarloConfig {
    pub fn new(
        dimension: Dimension,
        density: f64,
        sensing_range: f64,
        k: u64,
        samples: u64,
        seed: u64,
    ) -> Self {
        Self {
            dimension,
            density,
            sensing_range,
            k,
            samples,
            samples_per_field: 1000,
            box_side: 10.0 * sensing_range,
            seed,
        }
    }

    /// The GAF active-node density for `k` at unit sensing range.
    pub fn gaf(dimension: Dimension, k: u64, samples: u64, seed: u64) -> Result<Self> {
        let density = gaf_active_density(k, dimension, 1.0)?;
        Ok(Self::new(dimension, density, 1.0, k, samples, seed))
    }

    fn validate(&self) -> Result<()> {
        if !(self.density > 0.0 && self.sensing_range > 0.0)
            || self.k == 0
            || self.samples == 0
            || self.samples_per_field == 0
        {
            return Err(domain(format!(
                "Monte Carlo parameters must be positive: {self:?}"
            )));
        }
        if !(self.box_side >= 3.0 * self.sensing_range) {
            return Err(domain(format!(
                "box side {} must be at least three sensing ranges",
                self.box_side
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub probability: f64,
    pub samples: u64,
    pub fields: u64,
    /// Standard error from the spread of per-field means.
    pub std_error: f64,
}

/// Periodic bucket grid over one field.
struct TorusField {
    dims: usize,
    side: f64,
    per_axis: usize,
    bucket: f64,
    buckets: Vec<Vec<[f64; 3]>>,
}

impl TorusField {
    fn generate(cfg: &MonteCarloConfig, rng: &mut ChaCha8Rng) -> Self {
        let dims = cfg.dimension.as_usize();
        let side = cfg.box_side;
        let per_axis = ((side / cfg.sensing_range).floor() as usize).max(3);
        let bucket = side / per_axis as f64;
        let mut field = Self {
            dims,
            side,
            per_axis,
            bucket,
            buckets: vec![Vec::new(); per_axis.pow(dims as u32)],
        };
        let mean = cfg.density * side.powi(dims as i32);
        let count = Poisson::new(mean).expect("positive mean").sample(rng) as u64;
        for _ in 0..count {
            let mut p = [0.0; 3];
            for c in p.iter_mut().take(dims) {
                *c = rng.random::<f64>() * side;
            }
            let idx = field.flat(field.cell_of(&p));
            field.buckets[idx].push(p);
        }
        field
    }

    fn cell_of(&self, p: &[f64; 3]) -> [usize; 3] {
        let mut c = [0; 3];
        for d in 0..self.dims {
            c[d] = ((p[d] / self.bucket) as usize).min(self.per_axis - 1);
        }
        c
    }

    fn flat(&self, c: [usize; 3]) -> usize {
        (c[2] * self.per_axis + c[1]) * self.per_axis + c[0]
    }

    /// Whether at least `k` nodes lie within `r` of `p` under wraparound.
    fn covers(&self, p: &[f64; 3], r: f64, k: u64) -> bool {
        let home = self.cell_of(p);
        let r2 = r * r;
        let n = self.per_axis as i64;
        let span = |d: usize| if d < self.dims { -1..=1i64 } else { 0..=0 };
        let mut found = 0;
        for dz in span(2) {
            for dy in span(1) {
                for dx in span(0) {
                    let off = [dx, dy, dz];
                    let mut c = [0usize; 3];
                    for d in 0..self.dims {
                        c[d] = (home[d] as i64 + off[d]).rem_euclid(n) as usize;
                    }
                    for q in &self.buckets[self.flat(c)] {
                        let mut d2 = 0.0;
                        for d in 0..self.dims {
                            let mut delta = (p[d] - q[d]).abs();
                            if delta > self.side / 2.0 {
                                delta = self.side - delta;
                            }
                            d2 += delta * delta;
                        }
                        if d2 <= r2 {
                            found += 1;
                            if found >= k {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

/// Fraction of uniformly sampled points with at least `k` active nodes
/// within the sensing range. Each field draws from its own ChaCha stream of
/// `seed`, so the estimate does not depend on thread scheduling.
pub fn monte_carlo_k_coverage(cfg: &MonteCarloConfig) -> Result<MonteCarloEstimate> {
    cfg.validate()?;
    let fields = cfg.samples.div_ceil(cfg.samples_per_field);
    let per_field: Vec<(u64, u64)> = (0..fields)
        .into_par_iter()
        .map(|f| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(f);
            let field = TorusField::generate(cfg, &mut rng);
            let n = if f + 1 == fields {
                cfg.samples - f * cfg.samples_per_field
            } else {
                cfg.samples_per_field
            };
            let mut hits = 0;
            for _ in 0..n {
                let mut p = [0.0; 3];
                for c in p.iter_mut().take(field.dims) {
                    *c = rng.random::<f64>() * cfg.box_side;
                }
                if field.covers(&p, cfg.sensing_range, cfg.k) {
                    hits += 1;
                }
            }
            (hits, n)
        })
        .collect();

    let hits: u64 = per_field.iter().map(|&(h, _)| h).sum();
    let probability = hits as f64 / cfg.samples as f64;
    let std_error = if fields > 1 {
        let var: f64 = per_field
            .iter()
            .map(|&(h, n)| {
                let m = h as f64 / n as f64 - probability;
                m * m * n as f64
            })
            .sum::<f64>()
            / (fields - 1) as f64;
        (var / cfg.samples as f64).sqrt()
    } else {
        (probability * (1.0 - probability) / cfg.samples as f64).sqrt()
    };
    Ok(MonteCarloEstimate {
        probability,
        samples: cfg.samples,
        fields,
        std_error,
    })
}
