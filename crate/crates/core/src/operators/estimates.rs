//! Catalog of pointwise kernel estimates and refinement sweeps of their
//! sup-ratios `LHS/RHS` (with the constant in the RHS set to one).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{
    critical_radius, heat_classical, heat_hermite, heat_laguerre, kernel_rule, poisson_bessel_eval,
    poisson_bessel_piece_eval, poisson_classical_dt, poisson_kernel, BesselPiece, KernelSetting,
};
use crate::quad::{integrate_half_line_with_breaks, integrate_with_breaks, QuadratureRule};

/// A point of the record domain; `tau` is absent for time-free records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordPoint {
    pub tau: Option<f64>,
    pub x: f64,
    pub y: f64,
}

/// Where the spatial variables range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointSpace {
    Line,
    HalfLine,
}

type Lhs = fn(f64, &RecordPoint) -> Result<f64>;
type Rhs = fn(f64, &RecordPoint) -> f64;
type Admissible = fn(f64, &RecordPoint) -> bool;

/// How sample points are laid out at a refinement level with step `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Sampling {
    /// Nodes `h, 2h, …` (or `−x_max, …, x_max` on the line).
    Uniform,
    /// Nodes `min·2^{kh}` up to the window end, reaching corners at zero.
    Geometric { min: f64 },
}

/// A pointwise estimate `LHS ≤ C·RHS` on an admissible region.
#[derive(Clone, Copy)]
pub struct EstimateRecord {
    pub id: &'static str,
    /// The estimate in words.
    pub statement: &'static str,
    pub space: PointSpace,
    pub uses_time: bool,
    pub needs_alpha: bool,
    pub sampling: Sampling,
    pub time_sampling: Sampling,
    /// Window and coarsest step used unless overridden.
    pub default_spec: SweepSpec,
    lhs: Lhs,
    rhs: Rhs,
    region: Admissible,
}

impl std::fmt::Debug for EstimateRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EstimateRecord")
            .field("id", &self.id)
            .field("statement", &self.statement)
            .finish()
    }
}

impl EstimateRecord {
    pub fn lhs(&self, alpha: f64, p: &RecordPoint) -> Result<f64> {
        (self.lhs)(alpha, p)
    }

    pub fn rhs(&self, alpha: f64, p: &RecordPoint) -> f64 {
        (self.rhs)(alpha, p)
    }

    pub fn admits(&self, alpha: f64, p: &RecordPoint) -> bool {
        (self.region)(alpha, p)
    }
}

fn tau(p: &RecordPoint) -> f64 {
    p.tau.expect("record uses time")
}

fn dyadic(p: &RecordPoint) -> bool {
    0.5 * p.x < p.y && p.y < 2.0 * p.x
}

fn bessel_dt(alpha: f64, p: &RecordPoint) -> Result<f64> {
    Ok(
        poisson_bessel_eval(alpha, tau(p), p.x, p.y, &kernel_rule())?
            .dt
            .abs(),
    )
}

fn piece_dt(piece: BesselPiece, alpha: f64, p: &RecordPoint) -> Result<f64> {
    Ok(
        poisson_bessel_piece_eval(piece, alpha, tau(p), p.x, p.y, &kernel_rule())?
            .dt
            .abs(),
    )
}

fn hermite_dt(y_sign: f64, p: &RecordPoint) -> Result<f64> {
    Ok(
        poisson_kernel(&KernelSetting::hermite(), tau(p), p.x, y_sign * p.y)?
            .dt
            .abs(),
    )
}

/// Split point `u* = asinh(xy)` where `ξ = xy/sinh u` equals one.
fn xi_split(p: &RecordPoint) -> f64 {
    (p.x * p.y).asinh()
}

/// `∫_a^b |W_u^H(x,y) − W_u^{L_α}(x,y)| du/u` (`b = ∞` allowed).
fn heat_difference_integral(alpha: f64, p: &RecordPoint, a: f64, b: f64) -> Result<f64> {
    if !(b > a) {
        return Ok(0.0);
    }
    let (x, y) = (p.x, p.y);
    let g = |u: f64| match heat_laguerre(alpha, u, x, y) {
        Ok(l) => (heat_hermite(u, x, y).unwrap_or(0.0) - l).abs() / u,
        Err(_) => f64::NAN,
    };
    let rule = QuadratureRule {
        rel_tol: 1e-10,
        abs_tol: 1e-300,
        max_subdivisions: 2000,
    };
    let z2 = (x - y) * (x - y);
    let mut breaks: Vec<f64> = vec![a];
    for s in [z2 / 8.0, z2 / 2.0, 2.0 * z2, 1.0] {
        if s > a && s < b {
            breaks.push(s);
        }
    }
    breaks.sort_by(f64::total_cmp);
    let r = if b.is_finite() {
        breaks.push(b);
        integrate_with_breaks(g, &breaks, &rule)
    } else {
        let a0 = breaks[0];
        integrate_half_line_with_breaks(g, a0, &breaks[1..], &rule)
    };
    if r.value.is_nan() {
        return Err(Error::nonconvergence(
            "heat_difference_integral",
            "kernel evaluation failed",
        ));
    }
    r.require("heat_difference_integral")
}

fn sqrt_kernel_rhs(_: f64, p: &RecordPoint) -> f64 {
    (p.y / (p.x - p.y).abs()).sqrt() / p.y
}

fn laguerre_region(p: &RecordPoint) -> bool {
    dyadic(p) && p.x != p.y
}

/// Every record of the catalog.
pub fn catalog() -> Vec<EstimateRecord> {
    vec![
        EstimateRecord {
            id: "bessel-dt-global",
            statement: "|∂_τ P^{S_α}_τ(x,y)| ≤ C/(|x−y|² + τ²) for all x, y > 0",
            space: PointSpace::HalfLine,
            uses_time: true,
            needs_alpha: true,
            sampling: Sampling::Uniform,
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 4.0, t_max: 2.0, h0: 0.25, levels: 3 },
            lhs: bessel_dt,
            rhs: |_, p| 1.0 / ((p.x - p.y).powi(2) + tau(p).powi(2)),
            region: |_, _| true,
        },
        EstimateRecord {
            id: "bessel-dt-theta",
            statement: "|∂_τ P^{S_α}_τ(x,y)| ≤ C(xy)^α ∫_0^π (sin θ)^{2α−1}/[|x−y|² + τ² + 2xy(1−cos θ)]^{α+1} dθ = C·π P^{S_α}_τ(x,y)/(2ατ)",
            space: PointSpace::HalfLine,
            uses_time: true,
            needs_alpha: true,
            sampling: Sampling::Uniform,
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 4.0, t_max: 2.0, h0: 0.25, levels: 3 },
            lhs: bessel_dt,
            rhs: |alpha, p| {
                let t = tau(p);
                let v = poisson_bessel_eval(alpha, t, p.x, p.y, &kernel_rule()).map_or(f64::NAN, |e| e.value);
                std::f64::consts::PI * v / (2.0 * alpha * t)
            },
            region: |_, _| true,
        },
        EstimateRecord {
            id: "bessel-remainder-local",
            statement: "|∂_τ P^{S_α,2}_τ(x,y)| ≤ C/(τ² + x²) for x/2 < y < 2x",
            space: PointSpace::HalfLine,
            uses_time: true,
            needs_alpha: true,
            sampling: Sampling::Geometric { min: 1.0 / 256.0 },
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 4.0, t_max: 2.0, h0: 0.25, levels: 3 },
            lhs: |alpha, p| piece_dt(BesselPiece::P2, alpha, p),
            rhs: |_, p| 1.0 / (tau(p).powi(2) + p.x * p.x),
            region: |_, p| dyadic(p),
        },
        EstimateRecord {
            id: "bessel-log-local",
            statement: "|∂_τ(P^{S_α,1} − P^{S_α,1,1})| + |∂_τ(P^{S_α,1,1} − P^{S_α,1,2})| ≤ C(xy)^α/[|x−y|² + τ² + xy]^{α+1}·(1 + log₊(xy/(|x−y|² + τ²))) for x/2 < y < 2x",
            space: PointSpace::HalfLine,
            uses_time: true,
            needs_alpha: true,
            sampling: Sampling::Geometric { min: 1.0 / 256.0 },
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 4.0, t_max: 2.0, h0: 0.25, levels: 3 },
            lhs: |alpha, p| Ok(piece_dt(BesselPiece::D1, alpha, p)? + piece_dt(BesselPiece::D2, alpha, p)?),
            rhs: |alpha, p| {
                let q = (p.x - p.y).powi(2) + tau(p).powi(2);
                let xy = p.x * p.y;
                xy.powf(alpha) / (q + xy).powf(alpha + 1.0) * (1.0 + (xy / q).ln().max(0.0))
            },
            region: |_, p| dyadic(p),
        },
        EstimateRecord {
            id: "bessel-tail-local",
            statement: "|∂_τ P^{S_α,1,3}_τ(x,y)| ≤ C/(τ² + x²) for x/2 < y < 2x",
            space: PointSpace::HalfLine,
            uses_time: true,
            needs_alpha: true,
            sampling: Sampling::Geometric { min: 1.0 / 256.0 },
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 4.0, t_max: 2.0, h0: 0.25, levels: 3 },
            lhs: |alpha, p| piece_dt(BesselPiece::P13, alpha, p),
            rhs: |_, p| 1.0 / (tau(p).powi(2) + p.x * p.x),
            region: |_, p| dyadic(p),
        },
        EstimateRecord {
            id: "classical-dt-reflected",
            statement: "|∂_τ P_τ(x + y)| ≤ C/(τ² + (x + y)²) for x, y > 0",
            space: PointSpace::HalfLine,
            uses_time: true,
            needs_alpha: false,
            sampling: Sampling::Uniform,
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 4.0, t_max: 2.0, h0: 0.25, levels: 3 },
            lhs: |_, p| Ok(poisson_classical_dt(tau(p), p.x + p.y).abs()),
            rhs: |_, p| 1.0 / (tau(p).powi(2) + (p.x + p.y).powi(2)),
            region: |_, _| true,
        },
        EstimateRecord {
            id: "hermite-gaussian-bound",
            statement: "W^H_t(x,y) ≤ C e^{−t/4} W_t(x − y) for x, y ∈ ℝ",
            space: PointSpace::Line,
            uses_time: true,
            needs_alpha: false,
            sampling: Sampling::Uniform,
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 4.0, t_max: 4.0, h0: 0.25, levels: 3 },
            lhs: |_, p| heat_hermite(tau(p), p.x, p.y),
            rhs: |_, p| (-0.25 * tau(p)).exp() * heat_classical(tau(p), p.x - p.y).unwrap_or(f64::NAN),
            region: |_, _| true,
        },
        EstimateRecord {
            id: "hermite-critical-decay",
            statement: "W^H_t(x,y) ≤ C e^{−|x−y|²/(4t)} t^{−1/2} (ρ(x)²/t)² for x, y ∈ ℝ",
            space: PointSpace::Line,
            uses_time: true,
            needs_alpha: false,
            sampling: Sampling::Uniform,
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 4.0, t_max: 8.0, h0: 0.25, levels: 3 },
            lhs: |_, p| heat_hermite(tau(p), p.x, p.y),
            rhs: |_, p| {
                let t = tau(p);
                let r2 = critical_radius(p.x).powi(2);
                (-(p.x - p.y).powi(2) / (4.0 * t)).exp() / t.sqrt() * (r2 / t).powi(2)
            },
            region: |_, _| true,
        },
        EstimateRecord {
            id: "hermite-free-difference",
            statement: "|W^H_t(x,y) − W_{t/2}(x − y)| ≤ C (t/ρ(x)²) W_t(x − y) for |x − y| < ρ(x), 0 < t < ρ(x)²",
            space: PointSpace::Line,
            uses_time: true,
            needs_alpha: false,
            sampling: Sampling::Uniform,
            time_sampling: Sampling::Geometric { min: 1.0 / 4096.0 },
            default_spec: SweepSpec { x_max: 4.0, t_max: 0.25, h0: 0.0625, levels: 3 },
            lhs: |_, p| {
                let t = tau(p);
                Ok((heat_hermite(t, p.x, p.y)? - heat_classical(0.5 * t, p.x - p.y)?).abs())
            },
            rhs: |_, p| {
                let t = tau(p);
                t / critical_radius(p.x).powi(2) * heat_classical(t, p.x - p.y).unwrap_or(f64::NAN)
            },
            region: |_, p| {
                let r = critical_radius(p.x);
                (p.x - p.y).abs() < r && tau(p) < r * r
            },
        },
        EstimateRecord {
            id: "hermite-dt",
            statement: "|∂_τ P^H_τ(x,y)| ≤ C/(τ² + |x − y|²) for x, y ∈ ℝ",
            space: PointSpace::Line,
            uses_time: true,
            needs_alpha: false,
            sampling: Sampling::Uniform,
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 2.0, t_max: 2.0, h0: 0.25, levels: 3 },
            lhs: |_, p| hermite_dt(1.0, p),
            rhs: |_, p| 1.0 / (tau(p).powi(2) + (p.x - p.y).powi(2)),
            region: |_, _| true,
        },
        EstimateRecord {
            id: "hermite-dt-reflected",
            statement: "|∂_τ P^H_τ(x,−y)| ≤ C/(τ² + (x + y)²) for x, y > 0",
            space: PointSpace::HalfLine,
            uses_time: true,
            needs_alpha: false,
            sampling: Sampling::Uniform,
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 2.0, t_max: 2.0, h0: 0.125, levels: 3 },
            lhs: |_, p| hermite_dt(-1.0, p),
            rhs: |_, p| 1.0 / (tau(p).powi(2) + (p.x + p.y).powi(2)),
            region: |_, _| true,
        },
        EstimateRecord {
            id: "laguerre-gaussian-bound",
            statement: "W^{L_α}_t(x,y) ≤ C e^{−|x−y|²/(4t)}/√t for x, y > 0",
            space: PointSpace::HalfLine,
            uses_time: true,
            needs_alpha: true,
            sampling: Sampling::Uniform,
            time_sampling: Sampling::Geometric { min: 1.0 / 4096.0 },
            default_spec: SweepSpec { x_max: 4.0, t_max: 2.0, h0: 0.125, levels: 3 },
            lhs: |alpha, p| heat_laguerre(alpha, tau(p), p.x, p.y),
            rhs: |_, p| (-(p.x - p.y).powi(2) / (4.0 * tau(p))).exp() / tau(p).sqrt(),
            region: |_, _| true,
        },
        EstimateRecord {
            id: "laguerre-xi-large-short",
            statement: "∫ over u < 1, ξ ≥ 1 of |W^H_u − W^{L_α}_u|(x,y) du/u ≤ (C/y)√(y/|x−y|) for x/2 < y < 2x, x ≠ y",
            space: PointSpace::HalfLine,
            uses_time: false,
            needs_alpha: true,
            sampling: Sampling::Geometric { min: 1.0 / 64.0 },
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 4.0, t_max: 1.0, h0: 0.125, levels: 3 },
            lhs: |alpha, p| heat_difference_integral(alpha, p, 0.0, xi_split(p).min(1.0)),
            rhs: sqrt_kernel_rhs,
            region: |_, p| laguerre_region(p),
        },
        EstimateRecord {
            id: "laguerre-xi-large-long",
            statement: "∫ over u ≥ 1, ξ ≥ 1 of |W^H_u − W^{L_α}_u|(x,y) du/u ≤ (C/y)√(y/|x−y|) for x/2 < y < 2x, x ≠ y",
            space: PointSpace::HalfLine,
            uses_time: false,
            needs_alpha: true,
            sampling: Sampling::Geometric { min: 1.0 / 64.0 },
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 4.0, t_max: 1.0, h0: 0.125, levels: 3 },
            lhs: |alpha, p| heat_difference_integral(alpha, p, 1.0, xi_split(p)),
            rhs: sqrt_kernel_rhs,
            region: |_, p| laguerre_region(p),
        },
        EstimateRecord {
            id: "laguerre-xi-small-short",
            statement: "∫ over u < 1, ξ ≤ 1 of |W^H_u − W^{L_α}_u|(x,y) du/u ≤ (C/y)√(y/|x−y|) for x/2 < y < 2x, x ≠ y",
            space: PointSpace::HalfLine,
            uses_time: false,
            needs_alpha: true,
            sampling: Sampling::Geometric { min: 1.0 / 64.0 },
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 4.0, t_max: 1.0, h0: 0.125, levels: 3 },
            lhs: |alpha, p| heat_difference_integral(alpha, p, xi_split(p), 1.0),
            rhs: sqrt_kernel_rhs,
            region: |_, p| laguerre_region(p),
        },
        EstimateRecord {
            id: "laguerre-xi-small-long",
            statement: "∫ over u ≥ 1, ξ ≤ 1 of |W^H_u − W^{L_α}_u|(x,y) du/u ≤ (C/y)√(y/|x−y|) for x/2 < y < 2x, x ≠ y",
            space: PointSpace::HalfLine,
            uses_time: false,
            needs_alpha: true,
            sampling: Sampling::Geometric { min: 1.0 / 64.0 },
            time_sampling: Sampling::Uniform,
            default_spec: SweepSpec { x_max: 4.0, t_max: 1.0, h0: 0.125, levels: 3 },
            lhs: |alpha, p| heat_difference_integral(alpha, p, xi_split(p).max(1.0), f64::INFINITY),
            rhs: sqrt_kernel_rhs,
            region: |_, p| laguerre_region(p),
        },
    ]
}

/// Looks a record up by identifier.
pub fn record(id: &str) -> Result<EstimateRecord> {
    catalog()
        .into_iter()
        .find(|r| r.id == id)
        .ok_or_else(|| Error::precondition("record", format!("unknown estimate record {id}")))
}

/// Sampling of a record domain at levels `h_l = h0/2^l`, with spatial nodes
/// in `(0, x_max]` or `[−x_max, x_max]` and times in `(0, t_max]` laid out by
/// the record's [`Sampling`]s; for geometric sampling `h_l` is the step in
/// `log₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub x_max: f64,
    pub t_max: f64,
    pub h0: f64,
    pub levels: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            x_max: 4.0,
            t_max: 2.0,
            h0: 0.25,
            levels: 3,
        }
    }
}

/// Largest admissible ratio at one refinement level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepLevel {
    pub level: usize,
    pub h_space: f64,
    pub h_time: Option<f64>,
    pub sup_ratio: f64,
    pub argmax_t: Option<f64>,
    pub argmax_x: f64,
    pub argmax_y: f64,
    pub points: usize,
}

/// Per-level sup-ratios of one record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub record: String,
    pub alpha: Option<f64>,
    pub levels: Vec<SweepLevel>,
    /// Largest level-to-level relative growth of the sup-ratio.
    pub max_growth: f64,
}

impl SweepReport {
    /// Growth bounded by `tol` between consecutive levels.
    pub fn stabilized(&self, tol: f64) -> bool {
        self.max_growth <= tol && self.levels.iter().all(|l| l.sup_ratio.is_finite())
    }
}

fn nodes(space: PointSpace, sampling: Sampling, x_max: f64, h: f64) -> Vec<f64> {
    match (sampling, space) {
        (Sampling::Geometric { min }, _) => {
            let n = ((x_max / min).log2() / h).round() as usize;
            (0..=n).map(|k| min * (k as f64 * h).exp2()).collect()
        }
        (Sampling::Uniform, PointSpace::HalfLine) => {
            let n = (x_max / h).round() as usize;
            (1..=n).map(|k| k as f64 * h).collect()
        }
        (Sampling::Uniform, PointSpace::Line) => {
            let n = (x_max / h).round() as usize;
            (0..=2 * n).map(|k| -x_max + k as f64 * h).collect()
        }
    }
}

/// Sup over admissible points of `LHS/RHS` at one spacing.
pub fn ratio_supremum(
    record: &EstimateRecord,
    alpha: f64,
    spec: &SweepSpec,
    h: f64,
) -> Result<SweepLevel> {
    let xs = nodes(record.space, record.sampling, spec.x_max, h);
    let taus: Vec<Option<f64>> = if record.uses_time {
        nodes(PointSpace::HalfLine, record.time_sampling, spec.t_max, h)
            .into_iter()
            .map(Some)
            .collect()
    } else {
        vec![None]
    };
    let mut points = Vec::new();
    for &tau in &taus {
        for &x in &xs {
            for &y in &xs {
                let p = RecordPoint { tau, x, y };
                if record.admits(alpha, &p) {
                    points.push(p);
                }
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyRegion {
            what: format!("record {} at h = {h}", record.id),
        });
    }
    let ratios = points
        .par_iter()
        .map(|p| {
            let r = record.rhs(alpha, p);
            let l = record.lhs(alpha, p)?;
            if r == 0.0 && l == 0.0 {
                // both sides underflow
                return Ok(0.0);
            }
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::domain(
                    "ratio_supremum",
                    format!("{}: RHS {r} at {p:?}", record.id),
                ));
            }
            Ok(l / r)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (k, &sup) = ratios
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |best, cur| {
            if *cur.1 > *best.1 {
                cur
            } else {
                best
            }
        });
    let p = points[k];
    Ok(SweepLevel {
        level: 0,
        h_space: h,
        h_time: record.uses_time.then_some(h),
        sup_ratio: sup,
        argmax_t: p.tau,
        argmax_x: p.x,
        argmax_y: p.y,
        points: points.len(),
    })
}

/// Refinement sweep of a record.
pub fn estimate_ratio_supremum(
    record: &EstimateRecord,
    alpha: Option<f64>,
    spec: &SweepSpec,
) -> Result<SweepReport> {
    let a = match (record.needs_alpha, alpha) {
        (true, Some(a)) if a > 0.0 => a,
        (true, _) => {
            return Err(Error::precondition(
                "estimate_ratio_supremum",
                format!("record {} needs a positive alpha", record.id),
            ))
        }
        (false, _) => 0.0,
    };
    if spec.levels == 0 || !(spec.h0 > 0.0) || !(spec.x_max > 0.0) || !(spec.t_max > 0.0) {
        return Err(Error::precondition(
            "estimate_ratio_supremum",
            format!("invalid sweep {spec:?}"),
        ));
    }
    let mut levels = Vec::with_capacity(spec.levels);
    for l in 0..spec.levels {
        let mut lv = ratio_supremum(record, a, spec, spec.h0 / 2f64.powi(l as i32))?;
        lv.level = l;
        levels.push(lv);
    }
    let max_growth = levels
        .windows(2)
        .map(|w| w[1].sup_ratio / w[0].sup_ratio - 1.0)
        .fold(0.0f64, f64::max);
    Ok(SweepReport {
        record: record.id.to_string(),
        alpha: record.needs_alpha.then_some(a),
        levels,
        max_growth,
    })
}
