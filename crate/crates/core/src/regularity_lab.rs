//! Maximal-regularity experiments: mild solutions `u(t) = ∫_0^t T_{t−s} f(s) ds`
//! of `u′ + √L u = f`, the ratios `‖Kf‖/‖f‖` and `(‖u′‖ + ‖√L u‖)/‖f‖` under
//! refinement, and the local/global decomposition of `K`.
//!
//! A sweep can only show that these constants settle; it cannot prove that
//! an operator is bounded.

use std::ops::Range;

use ndarray::{Array2, Array3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{bump, SampledField};
use crate::kernels::KernelSetting;
use crate::operators::apply::{
    apply_k, mild_solution as mild_solution_on, time_derivative, DEFAULT_DELTA_STEPS,
};
use crate::operators::domination::{majorant_of, sup_ratio, Majorant};
use crate::operators::scalar::Semigroup1D;
use crate::operators::table::{KernelFamily, KernelTable, Region};
use crate::operators::variants::{apply_family, apply_terms, Part};
use crate::quad::{Domain, Grid1D, SpaceTimeGrid};
use crate::specfun::{hermite_functions, laguerre_functions};
use crate::spectral_oracle::HankelBasis;
use crate::transference::SmoothBumps;

/// Cap on the eigenfunctions kept in the Hermite and Laguerre expansions of `√L`.
pub const SERIES_TERMS_MAX: usize = 2000;

/// Eigenfunctions whose largest wavenumber, `√(2k+1)` for Hermite and
/// `√(4k+2α+2)` for Laguerre, stays below `π/(2h)`.
pub fn series_terms(setting: &KernelSetting, h: f64) -> usize {
    let kmax = (std::f64::consts::PI / (2.0 * h)).powi(2);
    let n = match setting.name() {
        "laguerre" => (kmax - 2.0 * setting.alpha().unwrap_or(0.0) - 2.0) / 4.0,
        _ => (kmax - 1.0) / 2.0,
    };
    (n.floor().max(0.0) as usize + 1).min(SERIES_TERMS_MAX)
}
/// Tail width used for the `δ`-sensitivity comparison.
pub const ALT_DELTA_STEPS: usize = 4;

/// Spatial profile of a test field.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceProfile {
    /// `e^{−x²}·bump(x; center, radius)`.
    GaussianBump {
        center: f64,
        radius: f64,
    },
    Bumps(SmoothBumps),
}

/// `amplitude · sin²(π(t−a)/(b−a)) · g(x)` on a time window `(a, b)`, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct TestField {
    pub time_window: (f64, f64),
    pub space: SpaceProfile,
    pub amplitude: f64,
}

impl TestField {
    /// Gaussian bump on `[−2, 2]` for line settings, on `[1/2, 5/2]` otherwise.
    pub fn standard(setting: &KernelSetting) -> Self {
        let (center, radius) = if setting.is_half_line() {
            (1.5, 1.0)
        } else {
            (0.0, 2.0)
        };
        TestField {
            time_window: (0.0, 1.0),
            space: SpaceProfile::GaussianBump { center, radius },
            amplitude: 1.0,
        }
    }

    /// Three random bumps drawn from `seed`.
    pub fn random(setting: &KernelSetting, seed: u64) -> Self {
        let space = if setting.is_half_line() {
            SmoothBumps::random(seed, 3, (1.8, 2.2), (1.0, 1.3))
        } else {
            SmoothBumps::random(seed, 3, (-1.0, 1.0), (1.5, 2.5))
        };
        TestField {
            time_window: (0.0, 1.0),
            space: SpaceProfile::Bumps(space),
            amplitude: 1.0,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        TestField {
            amplitude: self.amplitude * c,
            ..self.clone()
        }
    }

    pub fn sample(&self, grid: &SpaceTimeGrid) -> SampledField {
        let (a, b) = self.time_window;
        SampledField::from_fn(grid, |t, x| {
            let s = match &self.space {
                SpaceProfile::GaussianBump { center, radius } => {
                    (-x * x).exp() * bump(x, *center, *radius)
                }
                SpaceProfile::Bumps(g) => g.value(x),
            };
            if t <= a || t >= b {
                return 0.0;
            }
            self.amplitude * (std::f64::consts::PI * (t - a) / (b - a)).sin().powi(2) * s
        })
    }
}

/// The standard field followed by `randoms` seeded members.
pub fn test_family(setting: &KernelSetting, seed: u64, randoms: usize) -> Vec<TestField> {
    let mut v = vec![TestField::standard(setting)];
    v.extend((0..randoms as u64).map(|k| TestField::random(setting, seed.wrapping_add(k))));
    v
}

/// `√L` on one spatial grid, applied to samples with zero extension.
#[derive(Debug, Clone)]
pub enum SqrtGenerator {
    /// Dense matrix acting on the nodal values.
    Matrix(Array2<f64>),
    Hankel(Box<HankelBasis>),
}

impl SqrtGenerator {
    /// Eigen-series for Hermite and Laguerre, the Hankel multiplier `z` for
    /// Bessel, the band-limited Fourier multiplier `|ξ|` for the classical setting.
    pub fn new(setting: &KernelSetting, grid: &Grid1D) -> Result<Self> {
        let expected = if setting.is_half_line() {
            Domain::HalfLine
        } else {
            Domain::Line
        };
        if grid.domain() != expected {
            return Err(Error::precondition(
                "SqrtGenerator::new",
                "grid domain does not match the setting",
            ));
        }
        let h = grid
            .step()
            .ok_or_else(|| Error::precondition("SqrtGenerator::new", "grid must be uniform"))?;
        let x = grid.nodes();
        let w = grid.trapezoid_weights();
        match setting.name() {
            "hermite" => {
                let n = series_terms(setting, h);
                let basis: Vec<Vec<f64>> = x.iter().map(|&xi| hermite_functions(n, xi)).collect();
                Ok(SqrtGenerator::Matrix(series_matrix(&basis, &w, |k| {
                    (k as f64 + 0.5).sqrt()
                })))
            }
            "laguerre" => {
                let alpha = setting.alpha().expect("laguerre carries alpha");
                let basis = x
                    .iter()
                    .map(|&xi| laguerre_functions(series_terms(setting, h), alpha, xi))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SqrtGenerator::Matrix(series_matrix(&basis, &w, |k| {
                    (2.0 * k as f64 + alpha + 0.5).sqrt()
                })))
            }
            "bessel" => {
                let alpha = setting.alpha().expect("bessel carries alpha");
                // cutoff π/(2h), panels fine enough for the window length
                let x_max = x[x.len() - 1];
                let dz = (std::f64::consts::PI / (2.0 * x_max)).min(0.5);
                Ok(SqrtGenerator::Hankel(Box::new(HankelBasis::new(
                    alpha,
                    grid,
                    std::f64::consts::PI / (2.0 * h),
                    dz,
                )?)))
            }
            _ => Ok(SqrtGenerator::Matrix(fourier_abs_matrix(x.len(), h))),
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            SqrtGenerator::Matrix(m) => m.dot(&ndarray::ArrayView1::from(v)).to_vec(),
            SqrtGenerator::Hankel(b) => b.inverse(&b.forward(v), |z| z),
        }
    }

    /// Slice by slice, scalar fibers only.
    pub fn apply_field(&self, u: &SampledField) -> Result<SampledField> {
        if u.fiber() != 1 {
            return Err(Error::precondition(
                "SqrtGenerator::apply_field",
                "scalar fiber required",
            ));
        }
        let (nt, nx, _) = u.values().dim();
        let mut out = Array3::zeros((nt, nx, 1));
        for i in 0..nt {
            let row: Vec<f64> = u.slice(i).column(0).to_vec();
            for (j, v) in self.apply(&row).into_iter().enumerate() {
                out[[i, j, 0]] = v;
            }
        }
        SampledField::from_array(u.grid(), out)
    }
}

/// `S[i, j] = Σ_k λ(k) φ_k(x_i) φ_k(x_j) w_j`.
fn series_matrix(basis: &[Vec<f64>], w: &[f64], lambda: impl Fn(usize) -> f64) -> Array2<f64> {
    let n = basis.len();
    let terms = basis.first().map_or(0, Vec::len);
    let lam: Vec<f64> = (0..terms).map(lambda).collect();
    Array2::from_shape_fn((n, n), |(i, j)| {
        let s: f64 = (0..terms).map(|k| lam[k] * basis[i][k] * basis[j][k]).sum();
        s * w[j]
    })
}

/// `|D|` restricted to frequencies `|ξ| < π/h`: `h·k(x_i − x_j)` with
/// `k(d) = (1/π)[Ξ sin(Ξd)/d + (cos(Ξd) − 1)/d²]`, `k(0) = Ξ²/(2π)`.
fn fourier_abs_matrix(n: usize, h: f64) -> Array2<f64> {
    let xi = std::f64::consts::PI / h;
    Array2::from_shape_fn((n, n), |(i, j)| {
        let d = (i as f64 - j as f64) * h;
        let k = if i == j {
            xi * xi / (2.0 * std::f64::consts::PI)
        } else {
            ((xi * d).sin() * xi / d + ((xi * d).cos() - 1.0) / (d * d)) / std::f64::consts::PI
        };
        h * k
    })
}

fn support_union(fields: &[SampledField]) -> Result<Range<usize>> {
    let mut out: Option<Range<usize>> = None;
    for f in fields {
        if let Some(s) = f.spatial_support() {
            out = Some(match out {
                None => s,
                Some(o) => o.start.min(s.start)..o.end.max(s.end),
            });
        }
    }
    out.ok_or_else(|| {
        Error::precondition("regularity_lab", "every test field vanishes identically")
    })
}

fn poisson_table(setting: &KernelSetting, fields: &[SampledField]) -> Result<KernelTable> {
    let g = fields[0].grid();
    KernelTable::build(
        KernelFamily::Poisson(*setting),
        g.space(),
        support_union(fields)?,
        g.dt(),
        g.nt().saturating_sub(1).max(1),
        None,
    )
}

/// `u(t) = ∫_0^t T_{t−s} f(s) ds` for the Poisson semigroup of `setting`.
pub fn mild_solution(setting: &KernelSetting, f: &SampledField) -> Result<SampledField> {
    match f.spatial_support() {
        None => SampledField::zeros(f.grid(), f.fiber()),
        Some(_) => mild_solution_on(
            &poisson_table(setting, std::slice::from_ref(f))?,
            f,
            DEFAULT_DELTA_STEPS,
        ),
    }
}

/// Grids of a sweep: level `l` uses `h = h0/2^l` in time and space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularitySpec {
    pub x_max: f64,
    pub t_final: f64,
    pub h0: f64,
    pub levels: usize,
}

impl Default for RegularitySpec {
    fn default() -> Self {
        RegularitySpec {
            x_max: 6.0,
            t_final: 1.0,
            h0: 0.125,
            levels: 3,
        }
    }
}

impl RegularitySpec {
    pub fn grid(&self, setting: &KernelSetting, level: usize) -> Result<SpaceTimeGrid> {
        if !(self.x_max > 0.0 && self.t_final > 0.0 && self.h0 > 0.0) {
            return Err(Error::precondition(
                "RegularitySpec::grid",
                "x_max, t_final and h0 must be positive",
            ));
        }
        let h = self.h0 / (1u64 << level) as f64;
        let nx = (self.x_max / h).round() as usize;
        let space = if setting.is_half_line() {
            Grid1D::half_line_window(self.x_max, nx)?
        } else {
            Grid1D::line_window(self.x_max, nx)?
        };
        SpaceTimeGrid::new(self.t_final, (self.t_final / h).round() as usize, space)
    }
}

/// One refinement level; every ratio is the largest over the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityLevel {
    pub level: usize,
    pub h_t: f64,
    pub h_x: f64,
    pub ratio_k: f64,
    pub ratio_regularity: f64,
    /// `‖u′ + √L u − f‖/‖f‖` on interior slices and `|x| ≤ x_max/2`.
    pub residual_ode: f64,
    /// `‖Kf − (u′ − f)‖/‖Kf‖` on interior slices.
    pub consistency: f64,
    /// `‖K_{δ=4h} f − K_{δ=2h} f‖/‖K_{δ=2h} f‖`.
    pub delta_sensitivity: f64,
    /// Norm of the first time slice of `u`.
    pub initial_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub setting: String,
    pub alpha: Option<f64>,
    pub spec: RegularitySpec,
    pub levels: Vec<RegularityLevel>,
    /// Largest consecutive relative change of `ratio_k`.
    pub k_change: f64,
    /// Largest consecutive relative change of `ratio_regularity`.
    pub regularity_change: f64,
}

impl RegularityReport {
    pub fn stabilized(&self, tol: f64) -> bool {
        self.k_change <= tol && self.regularity_change <= tol
    }

    pub fn finest(&self) -> &RegularityLevel {
        self.levels.last().expect("at least one level")
    }
}

fn max_change(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    v.windows(2)
        .map(|w| (w[1] / w[0] - 1.0).abs())
        .fold(0.0, f64::max)
}

/// `L²` norm over time slices `slices` and nodes with `|x| ≤ x_cut`.
fn inner_norm(f: &SampledField, slices: Range<usize>, x_cut: f64) -> f64 {
    let wt = f.grid().time().trapezoid_weights();
    let wx = f.grid().space().trapezoid_weights();
    let x = f.grid().space().nodes();
    let v = f.values();
    let mut s = 0.0;
    for i in slices {
        for (j, &w) in wx.iter().enumerate() {
            if x[j].abs() <= x_cut {
                s += wt[i] * w * v[[i, j, 0]] * v[[i, j, 0]];
            }
        }
    }
    s.sqrt()
}

fn slice_norm(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(a, b)| b * a * a).sum::<f64>().sqrt()
}

/// One family member at one level.
fn member_level(
    table: &KernelTable,
    sqrt_l: &SqrtGenerator,
    f: &SampledField,
) -> Result<(f64, f64, f64, f64, f64, f64)> {
    let nt = f.grid().nt();
    let interior = 2..nt.saturating_sub(2).max(2);
    let kf = apply_k(table, f, DEFAULT_DELTA_STEPS)?;
    let kf_alt = apply_k(table, f, ALT_DELTA_STEPS)?;
    let u = mild_solution_on(table, f, DEFAULT_DELTA_STEPS)?;
    let du = time_derivative(&u);
    let lu = sqrt_l.apply_field(&u)?;
    let fnorm = f.l2_norm();
    let ratio_k = kf.l2_norm() / fnorm;
    let ratio_reg = (du.l2_norm() + lu.l2_norm()) / fnorm;
    let ode = du.combine(1.0, &lu, 1.0)?.combine(1.0, f, -1.0)?;
    let x_cut = 0.5
        * f.grid()
            .space()
            .nodes()
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
    let residual =
        inner_norm(&ode, interior.clone(), x_cut) / inner_norm(f, interior.clone(), x_cut);
    let defect = du.combine(1.0, f, -1.0)?.combine(1.0, &kf, -1.0)?;
    let consistency = defect.l2_norm_on(interior.clone()) / kf.l2_norm_on(interior);
    let delta = kf_alt.relative_distance(&kf)?;
    let w = f.grid().space().trapezoid_weights();
    let u0: Vec<f64> = u.slice(0).column(0).to_vec();
    Ok((
        ratio_k,
        ratio_reg,
        residual,
        consistency,
        delta,
        slice_norm(&u0, &w),
    ))
}

fn regularity_level(
    setting: &KernelSetting,
    family: &[TestField],
    spec: &RegularitySpec,
    level: usize,
) -> Result<RegularityLevel> {
    let grid = spec.grid(setting, level)?;
    let fields: Vec<SampledField> = family.iter().map(|m| m.sample(&grid)).collect();
    let table = poisson_table(setting, &fields)?;
    let sqrt_l = SqrtGenerator::new(setting, grid.space())?;
    let h = spec.h0 / (1u64 << level) as f64;
    let mut out = RegularityLevel {
        level,
        h_t: grid.dt(),
        h_x: h,
        ratio_k: 0.0,
        ratio_regularity: 0.0,
        residual_ode: 0.0,
        consistency: 0.0,
        delta_sensitivity: 0.0,
        initial_norm: 0.0,
    };
    for f in &fields {
        let (rk, rr, res, cons, delta, u0) = member_level(&table, &sqrt_l, f)?;
        out.ratio_k = out.ratio_k.max(rk);
        out.ratio_regularity = out.ratio_regularity.max(rr);
        out.residual_ode = out.residual_ode.max(res);
        out.consistency = out.consistency.max(cons);
        out.delta_sensitivity = out.delta_sensitivity.max(delta);
        out.initial_norm = out.initial_norm.max(u0);
    }
    Ok(out)
}

/// Ratios per level for scalar test fields.
pub fn regularity_sweep(
    setting: &KernelSetting,
    family: &[TestField],
    spec: &RegularitySpec,
) -> Result<RegularityReport> {
    if family.is_empty() {
        return Err(Error::precondition("regularity_sweep", "empty test family"));
    }
    if spec.levels == 0 {
        return Err(Error::precondition(
            "regularity_sweep",
            "at least one level",
        ));
    }
    let levels = (0..spec.levels)
        .map(|l| regularity_level(setting, family, spec, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegularityReport {
        setting: setting.name().to_string(),
        alpha: setting.alpha(),
        spec: *spec,
        k_change: max_change(levels.iter().map(|l| l.ratio_k)),
        regularity_change: max_change(levels.iter().map(|l| l.ratio_regularity)),
        levels,
    })
}

/// Ratios at horizons `T` and `2T` on one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonReport {
    pub short: RegularityLevel,
    pub long: RegularityLevel,
    pub t_short: f64,
    pub t_long: f64,
}

impl HorizonReport {
    /// Largest relative growth of either ratio from `T` to `2T`.
    pub fn growth(&self) -> f64 {
        (self.long.ratio_k / self.short.ratio_k - 1.0)
            .max(self.long.ratio_regularity / self.short.ratio_regularity - 1.0)
    }
}

/// Repeats level `level` of `spec` with `t_final` doubled.
pub fn horizon_doubling(
    setting: &KernelSetting,
    family: &[TestField],
    spec: &RegularitySpec,
    level: usize,
) -> Result<HorizonReport> {
    if let Some(m) = family.iter().find(|m| m.time_window.1 > spec.t_final) {
        return Err(Error::precondition(
            "horizon_doubling",
            format!(
                "time window {:?} exceeds the horizon {}",
                m.time_window, spec.t_final
            ),
        ));
    }
    let long = RegularitySpec {
        t_final: 2.0 * spec.t_final,
        ..*spec
    };
    Ok(HorizonReport {
        short: regularity_level(setting, family, spec, level)?,
        long: regularity_level(setting, family, &long, level)?,
        t_short: spec.t_final,
        t_long: long.t_final,
    })
}

/// One operator in the chain at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub operator: String,
    /// `‖A f‖₂/‖f‖₂`.
    pub norm_ratio: f64,
    /// Dominating operator, when one is proved.
    pub majorant: Option<String>,
    /// Pointwise `sup |A f|/majorant`.
    pub domination_constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLevel {
    pub level: usize,
    pub h: f64,
    pub entries: Vec<ChainEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub setting: String,
    pub alpha: Option<f64>,
    pub levels: Vec<ChainLevel>,
}

impl ChainReport {
    /// Largest consecutive relative change of `norm_ratio` for `operator`.
    pub fn change(&self, operator: &str) -> Option<f64> {
        let v: Option<Vec<f64>> = self
            .levels
            .iter()
            .map(|l| {
                l.entries
                    .iter()
                    .find(|e| e.operator == operator)
                    .map(|e| e.norm_ratio)
            })
            .collect();
        v.map(|v| max_change(v.into_iter()))
    }

    pub fn operators(&self) -> Vec<String> {
        self.levels
            .first()
            .map(|l| l.entries.iter().map(|e| e.operator.clone()).collect())
            .unwrap_or_default()
    }
}

struct ChainSpec {
    name: &'static str,
    terms: Vec<(KernelFamily, f64)>,
    part: Part,
    majorant: Option<(Majorant, Semigroup1D, &'static str)>,
}

fn chain_specs(setting: &KernelSetting) -> Result<Vec<ChainSpec>> {
    use KernelFamily as F;
    let own = F::Poisson(*setting);
    let classical = F::Poisson(KernelSetting::classical());
    let hermite = F::Poisson(KernelSetting::hermite());
    let dyadic = (Part::Local(Region::Dyadic), Part::Global(Region::Dyadic));
    let critical = (
        Part::Local(Region::Critical),
        Part::Global(Region::Critical),
    );
    let hardy = Some((Majorant::Hardy, Semigroup1D::Poisson, "H0+Hinf(P*)"));
    let split = Some((
        Majorant::SplitHardy,
        Semigroup1D::Poisson,
        "split Hardy(P*)",
    ));
    let spec = |name, terms, part, majorant| ChainSpec {
        name,
        terms,
        part,
        majorant,
    };
    Ok(match setting.name() {
        "classical" => vec![
            spec("k_global", vec![(own, 1.0)], critical.1, None),
            spec("k_local", vec![(own, 1.0)], critical.0, None),
        ],
        "bessel" => vec![
            spec("k_global", vec![(own, 1.0)], dyadic.1, split),
            spec(
                "difference_local",
                vec![(own, 1.0), (classical, -1.0)],
                dyadic.0,
                None,
            ),
            spec("base_local", vec![(classical, 1.0)], dyadic.0, None),
        ],
        "hermite" => vec![
            spec(
                "k_global",
                vec![(own, 1.0)],
                critical.1,
                Some((Majorant::HeatMaximalPlusM, Semigroup1D::Heat, "W*+M(W*)")),
            ),
            spec(
                "difference_local",
                vec![
                    (own, 1.0),
                    (
                        F::ScaledClassical {
                            c: std::f64::consts::FRAC_1_SQRT_2,
                        },
                        -1.0,
                    ),
                ],
                critical.0,
                Some((Majorant::M, Semigroup1D::Heat, "M(W*)")),
            ),
            spec(
                "base_local",
                vec![(
                    F::ScaledClassical {
                        c: std::f64::consts::FRAC_1_SQRT_2,
                    },
                    1.0,
                )],
                critical.0,
                None,
            ),
        ],
        "laguerre" => vec![
            spec("k_global", vec![(own, 1.0)], dyadic.1, hardy),
            spec(
                "difference_local",
                vec![(hermite, 1.0), (own, -1.0)],
                dyadic.0,
                Some((Majorant::SqrtKernel, Semigroup1D::Heat, "N(W*)")),
            ),
            spec("base_local", vec![(hermite, 1.0)], dyadic.0, None),
        ],
        other => {
            return Err(Error::precondition(
                "equivalence_chain_report",
                format!("unknown setting {other}"),
            ))
        }
    })
}

/// Global part, local difference to the base setting and local base operator
/// of `K` for one test field, per level of `spec`.
pub fn equivalence_chain_report(
    setting: &KernelSetting,
    field: &TestField,
    spec: &RegularitySpec,
) -> Result<ChainReport> {
    let specs = chain_specs(setting)?;
    let mut levels = Vec::with_capacity(spec.levels);
    for level in 0..spec.levels {
        let grid = spec.grid(setting, level)?;
        let f = field.sample(&grid);
        let fnorm = f.l2_norm();
        let mut entries = Vec::with_capacity(specs.len());
        for s in &specs {
            let af = if s.terms.len() == 1 && s.terms[0].1 == 1.0 {
                apply_family(s.terms[0].0, s.part, &f)?
            } else {
                apply_terms(&s.terms, s.part, &f)?
            };
            let (majorant, constant) = match s.majorant {
                Some((m, time, label)) => {
                    let rhs = majorant_of(m, time, &f)?;
                    (
                        Some(label.to_string()),
                        Some(sup_ratio(s.name, &af, &rhs)?.0),
                    )
                }
                None => (None, None),
            };
            entries.push(ChainEntry {
                operator: s.name.to_string(),
                norm_ratio: af.l2_norm() / fnorm,
                majorant,
                domination_constant: constant,
            });
        }
        levels.push(ChainLevel {
            level,
            h: spec.h0 / (1u64 << level) as f64,
            entries,
        });
    }
    Ok(ChainReport {
        setting: setting.name().to_string(),
        alpha: setting.alpha(),
        levels,
    })
}
