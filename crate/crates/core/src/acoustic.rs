//! Frequency reuse in 3D cells, radio and acoustic signal-to-interference
//! ratios, and the cell-radius constraints that follow from them.
//!
//! Acoustic distances are in kilometers because the absorption coefficient
//! is a per-kilometer factor. Frequencies are in hertz.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::CellShape;
use crate::quadrature;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Lattice-coordinate difference between two co-channel cell centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClusterIndex {
    pub i: i64,
    pub j: i64,
    pub k: i64,
}

impl ClusterIndex {
    pub const fn new(i: i64, j: i64, k: i64) -> Self {
        Self { i, j, k }
    }

    pub fn is_zero(&self) -> bool {
        self.i == 0 && self.j == 0 && self.k == 0
    }
}

/// Squared lattice norm of `idx` in the shape's reuse coordinates, and the
/// length of a unit step in units of `R`.
fn reuse_form(shape: CellShape, idx: ClusterIndex) -> Result<(f64, f64)> {
    let (i, j, k) = (idx.i as f64, idx.j as f64, idx.k as f64);
    Ok(match shape {
        CellShape::RD => (i * i + j * j + k * k + i * j + j * k + k * i, SQRT2),
        CellShape::CB => (i * i + j * j + k * k, 2.0 / 3f64.sqrt()),
        CellShape::TO => (
            i * i + j * j + i * k + j * k + 0.75 * k * k,
            4.0 / 5f64.sqrt(),
        ),
        CellShape::HP => (i * i + j * j + 2.0 / 3.0 * k * k + i * j, SQRT2),
        s => {
            return Err(Error::UnsupportedShape {
                op: "reuse distance",
                shape: s,
            })
        }
    })
}

/// Distance between the centers of two cells whose coordinates differ by `idx`.
pub fn reuse_distance(shape: CellShape, idx: ClusterIndex, radius: f64) -> Result<f64> {
    if idx.is_zero() {
        return Err(domain("cluster index must be nonzero"));
    }
    let (q, unit) = reuse_form(shape, idx)?;
    Ok(unit * radius * q.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClusterSize {
    Valid(u64),
    /// The index gives a fractional number of cells per cluster.
    Invalid(f64),
}

impl ClusterSize {
    pub fn valid(self) -> Option<u64> {
        match self {
            ClusterSize::Valid(n) => Some(n),
            ClusterSize::Invalid(_) => None,
        }
    }
}

/// Cells per cluster when co-channel centers are `idx` apart.
pub fn cluster_size(shape: CellShape, idx: ClusterIndex) -> Result<ClusterSize> {
    if idx.is_zero() {
        return Err(domain("cluster index must be nonzero"));
    }
    let n = match shape {
        CellShape::RD | CellShape::TO => reuse_form(shape, idx)?.0.powf(1.5),
        CellShape::CB => {
            let d = reuse_distance(shape, idx, 1.0)?;
            (d * 3f64.sqrt() / 2.0).powi(3)
        }
        s => {
            return Err(Error::UnsupportedShape {
                op: "cluster size",
                shape: s,
            })
        }
    };
    let rounded = n.round();
    Ok(if (n - rounded).abs() <= 1e-9 {
        ClusterSize::Valid(rounded as u64)
    } else {
        ClusterSize::Invalid(n)
    })
}

/// Co-channel reuse ratio `D/R` for cluster size `n`.
pub fn reuse_ratio(shape: CellShape, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(domain("cluster size must be at least 1"));
    }
    let root = (n as f64).cbrt();
    Ok(match shape {
        CellShape::RD => SQRT2 * root,
        CellShape::CB => 2.0 * root / 3f64.sqrt(),
        CellShape::TO => 4.0 * root / 5f64.sqrt(),
        s => {
            return Err(Error::UnsupportedShape {
                op: "reuse ratio",
                shape: s,
            })
        }
    })
}

/// Co-channel cells at the reuse distance in the RD tessellation.
pub const RD_COCHANNELS: usize = 12;

/// Radio SIR `(D/R)^n / m` with `m` equidistant co-channel interferers.
/// `cochannels` defaults to 12 for RD and must be given for CB and TO.
pub fn radio_sir(
    shape: CellShape,
    n: u64,
    path_loss_exponent: f64,
    cochannels: Option<usize>,
) -> Result<f64> {
    let m = match (shape, cochannels) {
        (_, Some(0)) => return Err(domain("co-channel count must be positive")),
        (_, Some(m)) => m,
        (CellShape::RD, None) => RD_COCHANNELS,
        (s, None) => {
            return Err(Error::UnsupportedShape {
                op: "radio SIR without an explicit co-channel count",
                shape: s,
            })
        }
    };
    Ok(reuse_ratio(shape, n)?.powf(path_loss_exponent) / m as f64)
}

/// `P(R) / Σ P(D_i)` for power falling as `d^-n`.
pub fn sir_from_interferers(radius: f64, interferers: &[f64], path_loss_exponent: f64) -> f64 {
    let signal = radius.powf(-path_loss_exponent);
    let noise: f64 = interferers
        .iter()
        .map(|d| d.powf(-path_loss_exponent))
        .sum();
    signal / noise
}

/// Thorp's empirical seawater absorption in dB/km, `f` in hertz.
pub fn thorp_db_per_km(f: f64) -> f64 {
    let k = f / 1e3;
    let k2 = k * k;
    0.11 * k2 / (1.0 + k2) + 44.0 * k2 / (4100.0 + k2) + 2.75e-4 * k2 + 0.003
}

/// Absorption coefficient `a(f)` as a linear factor per kilometer.
pub fn absorption_coeff(f: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(domain(format!("frequency must be positive, got {f}")));
    }
    Ok(10f64.powf(thorp_db_per_km(f) / 10.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Absorption {
    #[default]
    Thorp,
    /// `a(f) ≡ 1`: spreading loss only.
    Disabled,
}

impl Absorption {
    fn factor(self, f: f64) -> f64 {
        match self {
            Absorption::Thorp => 10f64.powf(thorp_db_per_km(f) / 10.0),
            Absorption::Disabled => 1.0,
        }
    }
}

/// Band and propagation parameters of the acoustic path-loss model
/// `A(d, f) = A0 · d^sf · a(f)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcousticParams {
    /// Lowest frequency of the band, Hz.
    pub f_min: f64,
    /// Bandwidth, Hz.
    pub bandwidth: f64,
    /// Geometric spreading exponent: 1 cylindrical, 2 spherical.
    pub spreading_factor: f64,
    pub a0: f64,
    /// Transmit power, W.
    pub p_t: f64,
    pub absorption: Absorption,
}

impl AcousticParams {
    pub fn new(f_min: f64, bandwidth: f64, spreading_factor: f64) -> Result<Self> {
        Self {
            f_min,
            bandwidth,
            spreading_factor,
            a0: 1.0,
            p_t: 1.0,
            absorption: Absorption::Thorp,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.f_min > 0.0 && self.bandwidth > 0.0 && self.a0 > 0.0 && self.p_t > 0.0) {
            return Err(domain(format!(
                "f_min, bandwidth, A0 and P_t must be positive: {self:?}"
            )));
        }
        if !(1.0..=2.0).contains(&self.spreading_factor) {
            return Err(domain(format!(
                "spreading factor must lie in [1, 2], got {}",
                self.spreading_factor
            )));
        }
        Ok(self)
    }

    pub fn with_absorption(mut self, absorption: Absorption) -> Self {
        self.absorption = absorption;
        self
    }

    pub fn with_power(mut self, a0: f64, p_t: f64) -> Result<Self> {
        self.a0 = a0;
        self.p_t = p_t;
        self.validated()
    }

    fn band(&self) -> (f64, f64) {
        (self.f_min, self.f_min + self.bandwidth)
    }

    /// `∫ a(f)^-d df` over the band.
    fn absorbed_band(&self, d: f64, panels: Option<usize>) -> Result<f64> {
        let (lo, hi) = self.band();
        let absorption = self.absorption;
        let f = move |f: f64| absorption.factor(f).powf(-d);
        match panels {
            Some(n) => Ok(quadrature::simpson(f, lo, hi, n)),
            None => quadrature::simpson_refined(f, lo, hi, quadrature::DEFAULT_REL_TOL),
        }
    }
}

/// Received power at `d` km for a flat transmit spectrum over the band.
pub fn received_power(d: f64, params: &AcousticParams) -> Result<f64> {
    if !(d > 0.0) {
        return Err(domain(format!("distance must be positive, got {d}")));
    }
    let psd = params.p_t / params.bandwidth;
    Ok(psd / params.a0 * d.powf(-params.spreading_factor) * params.absorbed_band(d, None)?)
}

fn check_sir_inputs(radius: f64, n: u64, shape: CellShape) -> Result<()> {
    if shape != CellShape::RD {
        return Err(Error::UnsupportedShape {
            op: "acoustic SIR",
            shape,
        });
    }
    if n == 0 {
        return Err(domain("cluster size must be at least 1"));
    }
    if !(radius > 0.0) {
        return Err(domain(format!(
            "cell radius must be positive, got {radius}"
        )));
    }
    Ok(())
}

fn sir_from_bands(
    radius: f64,
    n: u64,
    params: &AcousticParams,
    panels: Option<usize>,
) -> Result<f64> {
    let ratio = SQRT2 * (n as f64).cbrt();
    let near = params.absorbed_band(radius, panels)?;
    let far = params.absorbed_band(ratio * radius, panels)?;
    Ok(ratio.powf(params.spreading_factor) / RD_COCHANNELS as f64 * near / far)
}

/// Acoustic SIR at the edge of an RD cell of radius `radius` km with cluster
/// size `n`: `P(R) / (12 · P(√2·N^(1/3)·R))`. `A0` and `P_t` cancel.
pub fn acoustic_sir(radius: f64, n: u64, shape: CellShape, params: &AcousticParams) -> Result<f64> {
    check_sir_inputs(radius, n, shape)?;
    sir_from_bands(radius, n, params, None)
}

/// [`acoustic_sir`] on a fixed Simpson grid of `panels` subintervals.
pub fn acoustic_sir_fixed(
    radius: f64,
    n: u64,
    shape: CellShape,
    params: &AcousticParams,
    panels: usize,
) -> Result<f64> {
    check_sir_inputs(radius, n, shape)?;
    sir_from_bands(radius, n, params, Some(panels))
}

pub fn to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// User-side requirements on a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserConstraints {
    /// Users per km³.
    pub rho: f64,
    /// Total system bandwidth, Hz.
    pub bandwidth: f64,
    /// Minimum bandwidth per user, Hz.
    pub w0: f64,
    /// Minimum acceptable SIR (linear).
    pub sir0: f64,
}

impl UserConstraints {
    pub fn new(rho: f64, bandwidth: f64, w0: f64, sir0: f64) -> Result<Self> {
        if !(rho > 0.0 && bandwidth > 0.0 && w0 > 0.0) || sir0 < 0.0 || sir0.is_nan() {
            return Err(domain(format!(
                "rho, B and W0 must be positive and SIR0 nonnegative: rho={rho}, B={bandwidth}, W0={w0}, SIR0={sir0}"
            )));
        }
        Ok(Self {
            rho,
            bandwidth,
            w0,
            sir0,
        })
    }

    /// Users in an RD cell of radius `radius`: `2R³ρ`.
    pub fn users_per_cell(&self, radius: f64) -> f64 {
        2.0 * radius.powi(3) * self.rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RadiusInterval {
    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.lo && r <= self.hi
    }
}

/// Radii with at least one user per cell and at least `W0` of bandwidth per
/// user. Empty (`hi < lo`) when `B / (N·W0) < 1`.
pub fn feasible_radius_range(c: &UserConstraints, n: u64) -> Result<RadiusInterval> {
    if n == 0 {
        return Err(domain("cluster size must be at least 1"));
    }
    let lo = 1.0 / (2.0 * c.rho).cbrt();
    let hi = lo * (c.bandwidth / (n as f64 * c.w0)).cbrt();
    Ok(RadiusInterval { lo, hi })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BindingConstraint {
    /// `B / (N·W0) < 1`: no radius gives every user `W0`.
    Bandwidth,
    /// No radius in the bandwidth interval meets `SIR0`.
    Sir,
}

/// Trend of SIR over the feasible interval, sampled before searching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trend {
    Increasing,
    Decreasing,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RadiusChoice {
    Feasible {
        /// Largest admissible radius, which maximizes users per cell.
        radius: f64,
        /// Smallest admissible radius.
        min_radius: f64,
        sir: f64,
        users: f64,
        trend: Trend,
    },
    Infeasible {
        binding: BindingConstraint,
    },
}

const SCAN_POINTS: usize = 64;
const BISECTIONS: usize = 80;

/// Radius maximizing users per cell among radii that satisfy both the
/// bandwidth interval and `SIR ≥ SIR0`.
///
/// SIR is sampled on the interval, then the admissible set's edges are
/// refined by bisection between the bracketing samples. Users grow with `R`,
/// so the answer is the upper edge.
pub fn max_users_radius(
    c: &UserConstraints,
    n: u64,
    params: &AcousticParams,
) -> Result<RadiusChoice> {
    let interval = feasible_radius_range(c, n)?;
    if interval.is_empty() {
        return Ok(RadiusChoice::Infeasible {
            binding: BindingConstraint::Bandwidth,
        });
    }
    let sir = |r: f64| acoustic_sir(r, n, CellShape::RD, params);
    let RadiusInterval { lo, hi } = interval;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| {
            if i + 1 == SCAN_POINTS {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64
            }
        })
        .collect();
    let values = grid.iter().map(|&r| sir(r)).collect::<Result<Vec<f64>>>()?;
    let trend = if values.windows(2).all(|w| w[1] >= w[0]) {
        Trend::Increasing
    } else if values.windows(2).all(|w| w[1] <= w[0]) {
        Trend::Decreasing
    } else {
        Trend::Mixed
    };

    let ok: Vec<bool> = values.iter().map(|&s| s >= c.sir0).collect();
    let (Some(first), Some(last)) = (ok.iter().position(|&b| b), ok.iter().rposition(|&b| b))
    else {
        return Ok(RadiusChoice::Infeasible {
            binding: BindingConstraint::Sir,
        });
    };

    // Boundary between an admissible sample and an inadmissible neighbor.
    let edge = |good: f64, bad: f64| -> Result<f64> {
        let (mut g, mut b) = (good, bad);
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (g + b);
            if mid == g || mid == b {
                break;
            }
            if sir(mid)? >= c.sir0 {
                g = mid;
            } else {
                b = mid;
            }
        }
        Ok(g)
    };
    let radius = if last + 1 == grid.len() {
        hi
    } else {
        edge(grid[last], grid[last + 1])?
    };
    let min_radius = if first == 0 {
        lo
    } else {
        edge(grid[first], grid[first - 1])?
    };
    Ok(RadiusChoice::Feasible {
        radius,
        min_radius,
        sir: sir(radius)?,
        users: c.users_per_cell(radius),
        trend,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig4() -> AcousticParams {
        AcousticParams::new(10e3, 7e3, 1.5).unwrap()
    }

    #[test]
    fn reuse_distances() {
        let r = 2.5;
        let d = reuse_distance(CellShape::RD, ClusterIndex::new(1, 0, 0), r).unwrap();
        assert!((d - SQRT2 * r).abs() < 1e-12);
        let d = reuse_distance(CellShape::CB, ClusterIndex::new(1, 1, 1), r).unwrap();
        assert!((d - 2.0 * r).abs() < 1e-12);
        let d = reuse_distance(CellShape::TO, ClusterIndex::new(0, 0, 2), r).unwrap();
        assert!((d - 4.0 / 5f64.sqrt() * r * 3f64.sqrt()).abs() < 1e-12);
        assert!(reuse_distance(CellShape::RD, ClusterIndex::new(0, 0, 0), r).is_err());
        assert!(reuse_distance(CellShape::AltHP, ClusterIndex::new(1, 0, 0), r).is_err());
    }

    #[test]
    fn cluster_sizes() {
        let rd = |i, j, k| cluster_size(CellShape::RD, ClusterIndex::new(i, j, k)).unwrap();
        assert_eq!(rd(1, 0, 0), ClusterSize::Valid(1));
        assert_eq!(rd(2, 0, 0), ClusterSize::Valid(8));
        assert_eq!(rd(3, 0, 0), ClusterSize::Valid(27));
        match rd(1, 1, 0) {
            ClusterSize::Invalid(n) => assert!((n - 3f64.powf(1.5)).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            cluster_size(CellShape::CB, ClusterIndex::new(0, 2, 0)).unwrap(),
            ClusterSize::Valid(8)
        );
        assert_eq!(
            cluster_size(CellShape::TO, ClusterIndex::new(0, 0, 2))
                .unwrap()
                .valid(),
            None
        );
        assert!(cluster_size(CellShape::HP, ClusterIndex::new(1, 0, 0)).is_err());
    }

    #[test]
    fn rd_radio_sir() {
        let s = |n| radio_sir(CellShape::RD, n, 4.0, None).unwrap();
        assert!((s(1) - 1.0 / 3.0).abs() < 1e-12);
        assert!((s(8) - 16.0 / 3.0).abs() < 1e-12);
        assert!((s(27) - 27.0).abs() < 1e-9);
        assert!(radio_sir(CellShape::TO, 8, 4.0, None).is_err());
        assert!(radio_sir(CellShape::TO, 8, 4.0, Some(14)).is_ok());
        assert!(radio_sir(CellShape::HP, 8, 4.0, Some(12)).is_err());
    }

    #[test]
    fn radio_sir_matches_interferer_sum() {
        for n in [1u64, 8, 27, 64] {
            let d = reuse_ratio(CellShape::RD, n).unwrap();
            let general = sir_from_interferers(1.0, &[d; 12], 4.0);
            assert!(
                (general - radio_sir(CellShape::RD, n, 4.0, None).unwrap()).abs() < 1e-9 * general
            );
        }
    }

    #[test]
    fn thorp_at_ten_khz() {
        // 0.11·100/101 + 44·100/4200 + 2.75e-4·100 + 0.003
        let db = 0.11 * 100.0 / 101.0 + 44.0 * 100.0 / 4200.0 + 0.0275 + 0.003;
        assert!((thorp_db_per_km(10e3) - db).abs() < 1e-12);
        assert!((thorp_db_per_km(10e3) - 1.187030).abs() < 1e-6);
        assert!((absorption_coeff(10e3).unwrap() - 1.314_326).abs() < 1e-6);
    }

    #[test]
    fn absorption_increases_with_frequency() {
        let mut prev = 0.0;
        for i in 0..=990 {
            let a = absorption_coeff(1e3 + i as f64 * 100.0).unwrap();
            assert!(a > 1.0);
            assert!(a > prev);
            prev = a;
        }
        assert!(absorption_coeff(0.0).is_err());
    }

    #[test]
    fn received_power_without_absorption_is_pure_spreading() {
        let p = fig4()
            .with_absorption(Absorption::Disabled)
            .with_power(3.0, 5.0)
            .unwrap();
        for d in [0.1, 1.0, 4.0] {
            let got = received_power(d, &p).unwrap();
            let want = 5.0 / 3.0 * d.powf(-1.5);
            assert!((got - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn received_power_decreases_and_scales() {
        let p = fig4();
        let mut prev = f64::INFINITY;
        for i in 1..=50 {
            let v = received_power(i as f64 * 0.2, &p).unwrap();
            assert!(v < prev);
            prev = v;
        }
        let doubled = p.with_power(1.0, 2.0).unwrap();
        let a = received_power(1.3, &p).unwrap();
        let b = received_power(1.3, &doubled).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12 * b);
        assert!(received_power(0.0, &p).is_err());
    }

    #[test]
    fn acoustic_sir_rejects_other_shapes() {
        assert!(acoustic_sir(1.0, 8, CellShape::TO, &fig4()).is_err());
        assert!(acoustic_sir(1.0, 0, CellShape::RD, &fig4()).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(AcousticParams::new(10e3, 7e3, 2.5).is_err());
        assert!(AcousticParams::new(0.0, 7e3, 1.5).is_err());
        assert!(fig4().with_power(0.0, 1.0).is_err());
    }

    #[test]
    fn radius_range() {
        let c = UserConstraints::new(0.5, 7000.0, 100.0, 0.0).unwrap();
        let r = feasible_radius_range(&c, 8).unwrap();
        assert!((r.lo - 1.0).abs() < 1e-15);
        assert!((r.hi - 8.75f64.cbrt()).abs() < 1e-12);
        assert!((r.hi - 2.061).abs() < 1e-3);
        let c = UserConstraints::new(0.5, 800.0, 100.0, 0.0).unwrap();
        let r = feasible_radius_range(&c, 8).unwrap();
        assert!((r.hi - r.lo).abs() < 1e-15 && !r.is_empty());
        let c = UserConstraints::new(0.5, 700.0, 100.0, 0.0).unwrap();
        assert!(feasible_radius_range(&c, 8).unwrap().is_empty());
        assert_eq!(
            max_users_radius(&c, 8, &fig4()).unwrap(),
            RadiusChoice::Infeasible {
                binding: BindingConstraint::Bandwidth
            }
        );
    }

    #[test]
    fn inactive_sir_constraint_gives_upper_bound() {
        let c = UserConstraints::new(0.5, 7000.0, 100.0, 0.0).unwrap();
        match max_users_radius(&c, 8, &fig4()).unwrap() {
            RadiusChoice::Feasible { radius, .. } => assert_eq!(radius, 8.75f64.cbrt()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unreachable_sir_is_infeasible() {
        let p = fig4();
        let c = UserConstraints::new(0.5, 7000.0, 100.0, 0.0).unwrap();
        let r = feasible_radius_range(&c, 8).unwrap();
        let top = acoustic_sir(r.lo, 8, CellShape::RD, &p)
            .unwrap()
            .max(acoustic_sir(r.hi, 8, CellShape::RD, &p).unwrap());
        let c = UserConstraints::new(0.5, 7000.0, 100.0, top * 1.01).unwrap();
        assert_eq!(
            max_users_radius(&c, 8, &p).unwrap(),
            RadiusChoice::Infeasible {
                binding: BindingConstraint::Sir
            }
        );
    }
}
