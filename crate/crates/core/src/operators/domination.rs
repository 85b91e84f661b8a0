//! Pointwise dominations `|V f(t,x)| ≤ C·𝔐[T_*(|f̃(·,y)|)(t)](x)` of a
//! `K`-variant `V` by a spatial operator `𝔐` composed with a time maximal
//! function `T_* ∈ {P_*, W_*}`, checked on the grid with one empirical `C`.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::field::{standard_test_field, SampledField};
use crate::kernels::{BesselPiece, KernelSetting};
use crate::quad::{Grid1D, SpaceTimeGrid};

use super::estimates::SweepSpec;
use super::scalar::{
    averaging_l_operator, hardy_h0_operator, hardy_hinf_operator, hardy_littlewood_m,
    log_kernel_a_operator, maximal_p_star, maximal_w_star, split_hardy_operator,
    sqrt_kernel_n_operator, Ladder, Semigroup1D, SparseOperator,
};
use super::table::{KernelFamily, Region};
use super::variants::{apply_terms, Part};

/// Right-hand sides below this fraction of their maximum are not compared.
pub const RHS_FLOOR: f64 = 1e-10;

/// Spatial operator applied to the time maximal function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Majorant {
    /// `H₀ + H_∞`.
    Hardy,
    /// `(1/x)∫_0^{x/2} + ∫_{2x}^∞ (·)/y`.
    SplitHardy,
    /// `𝕃`.
    Average,
    /// `𝒜`.
    LogAverage,
    /// `𝒩`.
    SqrtKernel,
    /// `W_* + M`, both in space.
    HeatMaximalPlusM,
    /// `M`.
    M,
}

/// One pointwise domination.
#[derive(Clone, Copy)]
pub struct Domination {
    pub id: &'static str,
    pub statement: &'static str,
    pub half_line: bool,
    pub needs_alpha: bool,
    pub part: Part,
    pub time_maximal: Semigroup1D,
    pub majorant: Majorant,
    pub default_spec: SweepSpec,
    terms: fn(Option<f64>) -> Result<Vec<(KernelFamily, f64)>>,
}

impl Domination {
    /// The signed kernel families making up the left-hand operator.
    pub fn terms(&self, alpha: Option<f64>) -> Result<Vec<(KernelFamily, f64)>> {
        if self.needs_alpha && alpha.is_none() {
            return Err(Error::precondition(
                "Domination::terms",
                format!("{} needs alpha", self.id),
            ));
        }
        (self.terms)(alpha)
    }
}

fn alpha_of(a: Option<f64>) -> f64 {
    a.expect("checked by Domination::terms")
}

fn bessel_piece(a: Option<f64>, piece: BesselPiece) -> Result<Vec<(KernelFamily, f64)>> {
    let alpha = alpha_of(a);
    KernelSetting::bessel(alpha)?;
    Ok(vec![(KernelFamily::Bessel { alpha, piece }, 1.0)])
}

const HALF_SPEC: SweepSpec = SweepSpec {
    x_max: 4.0,
    t_max: 1.0,
    h0: 0.125,
    levels: 3,
};
const LINE_SPEC: SweepSpec = SweepSpec {
    x_max: 4.0,
    t_max: 1.0,
    h0: 0.125,
    levels: 3,
};

/// All dominations.
pub fn dominations() -> Vec<Domination> {
    use KernelFamily as F;
    vec![
        Domination {
            id: "classical-reflected-hardy",
            statement: "|K₋ g(t,x)| ≤ C[H₀ + H_∞](P_*|g̃₀|(t))(x), classical Poisson kernel",
            half_line: true,
            needs_alpha: false,
            part: Part::All,
            time_maximal: Semigroup1D::Poisson,
            majorant: Majorant::Hardy,
            default_spec: HALF_SPEC,
            terms: |_| Ok(vec![(F::Reflected(KernelSetting::classical()), 1.0)]),
        },
        Domination {
            id: "hermite-reflected-hardy",
            statement: "|K₋ g(t,x)| ≤ C[H₀ + H_∞](P_*|g̃₀|(t))(x), Hermite Poisson kernel",
            half_line: true,
            needs_alpha: false,
            part: Part::All,
            time_maximal: Semigroup1D::Poisson,
            majorant: Majorant::Hardy,
            default_spec: HALF_SPEC,
            terms: |_| Ok(vec![(F::Reflected(KernelSetting::hermite()), 1.0)]),
        },
        Domination {
            id: "classical-global-hardy",
            statement: "|K₊^glob f(t,x)| ≤ C[(1/x)∫_0^{x/2} + ∫_{2x}^∞ (·)/y](P_*|f̃₀|(t))",
            half_line: true,
            needs_alpha: false,
            part: Part::Global(Region::Dyadic),
            time_maximal: Semigroup1D::Poisson,
            majorant: Majorant::SplitHardy,
            default_spec: HALF_SPEC,
            terms: |_| Ok(vec![(F::Poisson(KernelSetting::classical()), 1.0)]),
        },
        Domination {
            id: "bessel-global-hardy",
            statement: "|K^glob(P^{S_α}) f(t,x)| ≤ C[(1/x)∫_0^{x/2} + ∫_{2x}^∞ (·)/y](P_*|f̃₀|(t))",
            half_line: true,
            needs_alpha: true,
            part: Part::Global(Region::Dyadic),
            time_maximal: Semigroup1D::Poisson,
            majorant: Majorant::SplitHardy,
            default_spec: HALF_SPEC,
            terms: |a| Ok(vec![(F::Poisson(KernelSetting::bessel(alpha_of(a))?), 1.0)]),
        },
        Domination {
            id: "bessel-remainder-average",
            statement: "|K₂^loc f(t,x)| ≤ C 𝕃(P_*|f̃₀|(t))(x)",
            half_line: true,
            needs_alpha: true,
            part: Part::Local(Region::Dyadic),
            time_maximal: Semigroup1D::Poisson,
            majorant: Majorant::Average,
            default_spec: HALF_SPEC,
            terms: |a| bessel_piece(a, BesselPiece::P2),
        },
        Domination {
            id: "bessel-first-log-average",
            statement: "|D₁^loc f(t,x)| ≤ C 𝒜(P_*|f̃₀|(t))(x)",
            half_line: true,
            needs_alpha: true,
            part: Part::Local(Region::Dyadic),
            time_maximal: Semigroup1D::Poisson,
            majorant: Majorant::LogAverage,
            default_spec: HALF_SPEC,
            terms: |a| bessel_piece(a, BesselPiece::D1),
        },
        Domination {
            id: "bessel-second-log-average",
            statement: "|D₂^loc f(t,x)| ≤ C 𝒜(P_*|f̃₀|(t))(x)",
            half_line: true,
            needs_alpha: true,
            part: Part::Local(Region::Dyadic),
            time_maximal: Semigroup1D::Poisson,
            majorant: Majorant::LogAverage,
            default_spec: HALF_SPEC,
            terms: |a| bessel_piece(a, BesselPiece::D2),
        },
        Domination {
            id: "bessel-tail-average",
            statement: "|D₃^loc f(t,x)| ≤ C 𝕃(P_*|f̃₀|(t))(x)",
            half_line: true,
            needs_alpha: true,
            part: Part::Local(Region::Dyadic),
            time_maximal: Semigroup1D::Poisson,
            majorant: Majorant::Average,
            default_spec: HALF_SPEC,
            terms: |a| bessel_piece(a, BesselPiece::P13),
        },
        Domination {
            id: "hermite-global-maximal",
            statement:
                "|K^glob(P^H) f(t,x)| ≤ C(W_*[W_*|f̃|(t)](x) + M[W_*|f̃|(t)](x)), |x − y| ≥ ρ(x)",
            half_line: false,
            needs_alpha: false,
            part: Part::Global(Region::Critical),
            time_maximal: Semigroup1D::Heat,
            majorant: Majorant::HeatMaximalPlusM,
            default_spec: LINE_SPEC,
            terms: |_| Ok(vec![(F::Poisson(KernelSetting::hermite()), 1.0)]),
        },
        Domination {
            id: "hermite-local-difference-maximal",
            statement: "|𝒟^loc f(t,x)| ≤ C M[W_*|f̃|(t)](x), |x − y| < ρ(x)",
            half_line: false,
            needs_alpha: false,
            part: Part::Local(Region::Critical),
            time_maximal: Semigroup1D::Heat,
            majorant: Majorant::M,
            default_spec: LINE_SPEC,
            terms: |_| {
                Ok(vec![
                    (F::Poisson(KernelSetting::hermite()), 1.0),
                    (
                        F::ScaledClassical {
                            c: std::f64::consts::FRAC_1_SQRT_2,
                        },
                        -1.0,
                    ),
                ])
            },
        },
        Domination {
            id: "hermite-half-global-hardy",
            statement: "|K₊^glob(P^H) f(t,x)| ≤ C[H₀ + H_∞](P_*|f̃₀|(t))(x)",
            half_line: true,
            needs_alpha: false,
            part: Part::Global(Region::Dyadic),
            time_maximal: Semigroup1D::Poisson,
            majorant: Majorant::Hardy,
            default_spec: HALF_SPEC,
            terms: |_| Ok(vec![(F::Poisson(KernelSetting::hermite()), 1.0)]),
        },
        Domination {
            id: "laguerre-global-hardy",
            statement: "|K^glob(P^{L_α^φ}) f(t,x)| ≤ C[H₀ + H_∞](P_*|f̃₀|(t))(x)",
            half_line: true,
            needs_alpha: true,
            part: Part::Global(Region::Dyadic),
            time_maximal: Semigroup1D::Poisson,
            majorant: Majorant::Hardy,
            default_spec: HALF_SPEC,
            terms: |a| {
                Ok(vec![(
                    F::Poisson(KernelSetting::laguerre(alpha_of(a))?),
                    1.0,
                )])
            },
        },
        Domination {
            id: "laguerre-hermite-difference-sqrt",
            statement: "|𝔇^loc f(t,x)| ≤ C 𝒩(W_*|f̃|(t))(x)",
            half_line: true,
            needs_alpha: true,
            part: Part::Local(Region::Dyadic),
            time_maximal: Semigroup1D::Heat,
            majorant: Majorant::SqrtKernel,
            default_spec: SweepSpec {
                x_max: 3.0,
                t_max: 0.5,
                h0: 0.0625,
                levels: 3,
            },
            terms: |a| {
                Ok(vec![
                    (F::Poisson(KernelSetting::hermite()), 1.0),
                    (F::Poisson(KernelSetting::laguerre(alpha_of(a))?), -1.0),
                ])
            },
        },
    ]
}

pub fn domination(id: &str) -> Result<Domination> {
    dominations()
        .into_iter()
        .find(|d| d.id == id)
        .ok_or_else(|| Error::precondition("domination", format!("unknown domination {id}")))
}

/// `T_*(|f(·, y)|)(t)` for every node `y`, as a `(time, space)` array.
pub fn time_maximal(f: &SampledField, kind: Semigroup1D) -> Result<Array2<f64>> {
    let g = f.grid();
    let norm = f.pointwise_norm();
    let ladder = Ladder::standard(g.dt(), g.t_final());
    let mut out = Array2::zeros((g.nt(), g.nx()));
    for c in 0..g.nx() {
        let column: Vec<f64> = (0..g.nt()).map(|i| norm.values()[[i, c, 0]]).collect();
        if column.iter().all(|&v| v == 0.0) {
            continue;
        }
        let r = match kind {
            Semigroup1D::Poisson => maximal_p_star(g.time(), &column, &ladder)?,
            Semigroup1D::Heat => maximal_w_star(g.time(), &column, &ladder)?,
        };
        for (i, v) in r.values.into_iter().enumerate() {
            out[[i, c]] = v;
        }
    }
    Ok(out)
}

enum SpatialMap {
    Sparse(SparseOperator),
    HeatMaximalPlusM(Ladder),
    M,
}

impl SpatialMap {
    fn new(majorant: Majorant, space: &Grid1D) -> Result<Self> {
        let sum = |a: SparseOperator, b: SparseOperator| {
            let rows = a
                .rows()
                .iter()
                .zip(b.rows())
                .map(|(p, q)| p.iter().chain(q).copied().collect())
                .collect();
            SparseOperator::new(space.len(), rows)
        };
        Ok(match majorant {
            Majorant::Hardy => {
                SpatialMap::Sparse(sum(hardy_h0_operator(space)?, hardy_hinf_operator(space)?)?)
            }
            Majorant::SplitHardy => SpatialMap::Sparse(split_hardy_operator(space)?),
            Majorant::Average => SpatialMap::Sparse(averaging_l_operator(space)?),
            Majorant::LogAverage => SpatialMap::Sparse(log_kernel_a_operator(space)?),
            Majorant::SqrtKernel => SpatialMap::Sparse(sqrt_kernel_n_operator(space)?),
            Majorant::HeatMaximalPlusM => {
                let x = space.nodes();
                let h = space
                    .step()
                    .ok_or_else(|| Error::precondition("SpatialMap", "grid must be uniform"))?;
                SpatialMap::HeatMaximalPlusM(Ladder::standard(h, x[x.len() - 1] - x[0]))
            }
            Majorant::M => SpatialMap::M,
        })
    }

    fn apply(&self, space: &Grid1D, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            SpatialMap::Sparse(op) => Ok(op.apply(v)),
            SpatialMap::HeatMaximalPlusM(ladder) => {
                let w = maximal_w_star(space, v, ladder)?.values;
                let m = hardy_littlewood_m(space, v)?;
                Ok(w.iter().zip(&m).map(|(a, b)| a + b).collect())
            }
            SpatialMap::M => hardy_littlewood_m(space, v),
        }
    }
}

/// `𝔐[T_*(|f̃|)(t)](x)` on the grid of `f`.
pub fn majorant_field(d: &Domination, f: &SampledField) -> Result<Array2<f64>> {
    majorant_of(d.majorant, d.time_maximal, f)
}

/// `𝔐[T_*(|f̃|)(t)](x)` for an explicit majorant and time maximal operator.
pub fn majorant_of(majorant: Majorant, time: Semigroup1D, f: &SampledField) -> Result<Array2<f64>> {
    let star = time_maximal(f, time)?;
    let space = f.grid().space();
    let map = SpatialMap::new(majorant, space)?;
    let mut out = Array2::zeros(star.dim());
    for i in 0..star.nrows() {
        let row = star.row(i).to_vec();
        if row.iter().all(|&v| v == 0.0) {
            continue;
        }
        for (j, v) in map.apply(space, &row)?.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

/// The empirical constant of a domination at one grid level.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationLevel {
    pub level: usize,
    pub h: f64,
    pub constant: f64,
    pub argmax_t: f64,
    pub argmax_x: f64,
    pub points: usize,
}

/// Constants of a domination over a sequence of refinements.
#[derive(Debug, Clone, PartialEq)]
pub struct DominationReport {
    pub id: String,
    pub alpha: Option<f64>,
    pub levels: Vec<DominationLevel>,
    /// Largest `|C_{k+1}/C_k − 1|`.
    pub max_change: f64,
}

impl DominationReport {
    pub fn stable(&self, tol: f64) -> bool {
        self.levels.len() >= 2 && self.max_change <= tol
    }
}

/// `sup |V f| / 𝔐[T_*|f̃|]` over grid points where the majorant is above
/// [`RHS_FLOOR`] times its maximum.
pub fn domination_constant(
    d: &Domination,
    alpha: Option<f64>,
    f: &SampledField,
) -> Result<(f64, f64, f64, usize)> {
    let terms = d.terms(alpha)?;
    let lhs = apply_terms(&terms, d.part, f)?;
    sup_ratio(d.id, &lhs, &majorant_field(d, f)?)
}

/// `sup ‖lhs‖ / rhs` over points where `rhs` exceeds [`RHS_FLOOR`] times its maximum,
/// with the maximizing `(t, x)` and the number of points used.
pub fn sup_ratio(
    what: &str,
    lhs: &SampledField,
    rhs: &Array2<f64>,
) -> Result<(f64, f64, f64, usize)> {
    let f = lhs;
    let lhs = lhs.pointwise_norm();
    let peak = rhs.iter().fold(0.0f64, |m, &v| m.max(v));
    if !(peak > 0.0) {
        return Err(Error::EmptyRegion {
            what: format!("{what}: majorant vanishes"),
        });
    }
    let t = f.grid().time().nodes();
    let x = f.grid().space().nodes();
    let mut best = (0.0, t[0], x[0]);
    let mut points = 0;
    for ((i, j), &r) in rhs.indexed_iter() {
        if r < RHS_FLOOR * peak {
            continue;
        }
        points += 1;
        let q = lhs.values()[[i, j, 0]] / r;
        if q > best.0 {
            best = (q, t[i], x[j]);
        }
    }
    Ok((best.0, best.1, best.2, points))
}

/// Runs a domination over `spec.levels` halvings of `spec.h0` with the
/// standard test field on each level.
pub fn domination_sweep(
    d: &Domination,
    alpha: Option<f64>,
    spec: &SweepSpec,
) -> Result<DominationReport> {
    let mut levels = Vec::with_capacity(spec.levels);
    for level in 0..spec.levels {
        let h = spec.h0 / (1 << level) as f64;
        let nx = (spec.x_max / h).round() as usize;
        let space = if d.half_line {
            Grid1D::half_line_window(spec.x_max, nx)?
        } else {
            Grid1D::line_window(spec.x_max, nx)?
        };
        let grid = SpaceTimeGrid::new(spec.t_max, (spec.t_max / h).round() as usize, space)?;
        let f = standard_test_field(&grid);
        let (constant, argmax_t, argmax_x, points) = domination_constant(d, alpha, &f)?;
        levels.push(DominationLevel {
            level,
            h,
            constant,
            argmax_t,
            argmax_x,
            points,
        });
    }
    let max_change = levels
        .windows(2)
        .map(|w| {
            if w[0].constant == w[1].constant {
                0.0
            } else {
                (w[1].constant / w[0].constant - 1.0).abs()
            }
        })
        .fold(0.0, f64::max);
    Ok(DominationReport {
        id: d.id.to_string(),
        alpha,
        levels,
        max_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflected_classical_constant_is_at_most_one() {
        // |∂_τP_τ(x+y)| ≤ 1/(π(τ² + (x+y)²)) and ∫ds/(π(|t−s|² + a²)) = P_a/a give C ≤ 1
        let d = domination("classical-reflected-hardy").unwrap();
        let spec = SweepSpec {
            levels: 2,
            ..d.default_spec
        };
        let r = domination_sweep(&d, None, &spec).unwrap();
        assert!(r.stable(0.1), "{r:?}");
        assert!(r
            .levels
            .iter()
            .all(|l| l.constant > 0.0 && l.constant <= 1.0));
    }

    #[test]
    fn alpha_is_required_where_declared() {
        let d = domination("bessel-tail-average").unwrap();
        assert!(matches!(
            domination_sweep(&d, None, &d.default_spec),
            Err(Error::Precondition { .. })
        ));
        assert!(domination("no-such-domination").is_err());
    }

    #[test]
    fn time_maximal_is_positively_homogeneous() {
        let g = SpaceTimeGrid::new(1.0, 16, Grid1D::half_line_window(3.0, 12).unwrap()).unwrap();
        let f = standard_test_field(&g);
        let f2 = f.combine(-2.5, &f, 0.0).unwrap();
        for kind in [Semigroup1D::Poisson, Semigroup1D::Heat] {
            let a = time_maximal(&f, kind).unwrap();
            let b = time_maximal(&f2, kind).unwrap();
            assert!(a.iter().all(|&v| v >= 0.0) && a.iter().any(|&v| v > 0.0));
            for (u, v) in a.iter().zip(b.iter()) {
                assert!((2.5 * u - v).abs() <= 1e-12 * (1.0 + v));
            }
        }
    }
}
