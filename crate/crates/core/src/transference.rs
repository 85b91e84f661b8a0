//! Change of variables `(U∘W)g(x) = M(x)·g(h(x))` between the chart operators
//! and their base settings `S_α`, `H` and `L_α^φ`.
//!
//! A chart operator `L̄` acts on functions of `y = h(x)`; the base operator `L`
//! acts on functions of `x`. For the entries with `h(x) = x²` the exact
//! conjugate `(U∘W)⁻¹ L (U∘W)` is `4·L̄ + offset`, see [`ChartEntry::conjugate`].

use std::f64::consts::PI;

use ndarray::Array3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::quad::{
    integrate_with_breaks, interpolate_cubic, Domain, Grid1D, QuadratureRule, SpaceTimeGrid,
};

/// Differential expression `a(x) f'' + b(x) f' + c(x) f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Expression {
    /// `S_α = −d² + α(α−1)/x²`.
    Bessel { alpha: f64 },
    /// `Δ_α = −d² − (2α/x) d`.
    DeltaAlpha { alpha: f64 },
    /// `H = −½(d² − x²)`.
    Hermite,
    /// `𝒪 + ½ = −½(d² − 2x d) + ½`.
    OrnsteinUhlenbeck,
    /// `L_α^φ = −½(d² − x² − α(α−1)/x²)`.
    LaguerrePhi { alpha: f64 },
    /// `L_α + s = −½(x d² + (α + ½ − x) d) + s`.
    LaguerreShifted { alpha: f64, shift: f64 },
    /// `L_α^ℓ = −½(x d² + (α + ½) d − x/4)`.
    LaguerreEll { alpha: f64 },
    /// `L_α^ψ = −½(d² − x² + (2α/x) d)`.
    LaguerrePsi { alpha: f64 },
    /// `L_α^𝓛 = −½(x d² + d − x/4 − (α − ½)²/(4x))`.
    LaguerreCal { alpha: f64 },
}

impl Expression {
    /// `[a, b, c]` at `x`.
    pub fn coefficients(&self, x: f64) -> [f64; 3] {
        match *self {
            Expression::Bessel { alpha } => [-1.0, 0.0, alpha * (alpha - 1.0) / (x * x)],
            Expression::DeltaAlpha { alpha } => [-1.0, -2.0 * alpha / x, 0.0],
            Expression::Hermite => [-0.5, 0.0, 0.5 * x * x],
            Expression::OrnsteinUhlenbeck => [-0.5, x, 0.5],
            Expression::LaguerrePhi { alpha } => {
                [-0.5, 0.0, 0.5 * (x * x + alpha * (alpha - 1.0) / (x * x))]
            }
            Expression::LaguerreShifted { alpha, shift } => {
                [-0.5 * x, -0.5 * (alpha + 0.5 - x), shift]
            }
            Expression::LaguerreEll { alpha } => [-0.5 * x, -0.5 * (alpha + 0.5), x / 8.0],
            Expression::LaguerrePsi { alpha } => [-0.5, -alpha / x, 0.5 * x * x],
            Expression::LaguerreCal { alpha } => {
                [-0.5 * x, -0.5, x / 8.0 + (alpha - 0.5).powi(2) / (8.0 * x)]
            }
        }
    }

    /// `L f(x)` from the exact derivatives `[f, f', f'']`.
    pub fn apply_exact(&self, x: f64, d: [f64; 3]) -> f64 {
        let [a, b, c] = self.coefficients(x);
        a * d[2] + b * d[1] + c * d[0]
    }
}

/// The six chart operators obtained by transference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartName {
    DeltaAlpha,
    OrnsteinUhlenbeckShifted,
    LaguerreShifted,
    LaguerreEll,
    LaguerrePsi,
    LaguerreCal,
}

impl ChartName {
    pub const ALL: [ChartName; 6] = [
        ChartName::DeltaAlpha,
        ChartName::OrnsteinUhlenbeckShifted,
        ChartName::LaguerreShifted,
        ChartName::LaguerreEll,
        ChartName::LaguerrePsi,
        ChartName::LaguerreCal,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ChartName::DeltaAlpha => "Delta_alpha",
            ChartName::OrnsteinUhlenbeckShifted => "O_half",
            ChartName::LaguerreShifted => "L_alpha_shifted",
            ChartName::LaguerreEll => "L_alpha_ell",
            ChartName::LaguerrePsi => "L_alpha_psi",
            ChartName::LaguerreCal => "L_alpha_cal",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        ChartName::ALL
            .into_iter()
            .find(|n| n.label() == s)
            .ok_or_else(|| {
                Error::precondition(
                    "ChartName::from_label",
                    format!("unknown chart entry {s:?}"),
                )
            })
    }
}

/// The base setting an entry is transferred from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseSetting {
    Bessel,
    Hermite,
    Laguerre,
}

/// One row of the chart with its weight `M` and change of variables `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartEntry {
    pub name: ChartName,
    pub alpha: f64,
}

impl ChartEntry {
    pub fn new(name: ChartName, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(
                "ChartEntry::new",
                format!("alpha must be positive, got {alpha}"),
            ));
        }
        Ok(ChartEntry { name, alpha })
    }

    pub fn all(alpha: f64) -> Result<Vec<ChartEntry>> {
        ChartName::ALL
            .into_iter()
            .map(|n| ChartEntry::new(n, alpha))
            .collect()
    }

    pub fn base(&self) -> BaseSetting {
        match self.name {
            ChartName::DeltaAlpha => BaseSetting::Bessel,
            ChartName::OrnsteinUhlenbeckShifted => BaseSetting::Hermite,
            _ => BaseSetting::Laguerre,
        }
    }

    pub fn base_expression(&self) -> Expression {
        match self.base() {
            BaseSetting::Bessel => Expression::Bessel { alpha: self.alpha },
            BaseSetting::Hermite => Expression::Hermite,
            BaseSetting::Laguerre => Expression::LaguerrePhi { alpha: self.alpha },
        }
    }

    /// The chart operator as listed, including the shift `(α + ½)/2`.
    pub fn chart_expression(&self) -> Expression {
        let alpha = self.alpha;
        match self.name {
            ChartName::DeltaAlpha => Expression::DeltaAlpha { alpha },
            ChartName::OrnsteinUhlenbeckShifted => Expression::OrnsteinUhlenbeck,
            ChartName::LaguerreShifted => Expression::LaguerreShifted {
                alpha,
                shift: 0.5 * (alpha + 0.5),
            },
            ChartName::LaguerreEll => Expression::LaguerreEll { alpha },
            ChartName::LaguerrePsi => Expression::LaguerrePsi { alpha },
            ChartName::LaguerreCal => Expression::LaguerreCal { alpha },
        }
    }

    /// `(scale, offset)` with `(U∘W)⁻¹ L (U∘W) = scale·L̄ + offset`.
    pub fn conjugate(&self) -> (f64, f64) {
        match self.name {
            ChartName::DeltaAlpha
            | ChartName::OrnsteinUhlenbeckShifted
            | ChartName::LaguerrePsi => (1.0, 0.0),
            ChartName::LaguerreShifted => (4.0, -(self.alpha + 0.5)),
            ChartName::LaguerreEll | ChartName::LaguerreCal => (4.0, 0.0),
        }
    }

    /// Coefficients of the exact conjugate `scale·L̄ + offset` at `y`.
    pub fn conjugate_coefficients(&self, y: f64) -> [f64; 3] {
        let (s, o) = self.conjugate();
        let [a, b, c] = self.chart_expression().coefficients(y);
        [s * a, s * b, s * c + o]
    }

    pub fn domain(&self) -> Domain {
        match self.base() {
            BaseSetting::Hermite => Domain::Line,
            _ => Domain::HalfLine,
        }
    }

    pub fn is_identity_map(&self) -> bool {
        matches!(
            self.name,
            ChartName::DeltaAlpha | ChartName::OrnsteinUhlenbeckShifted | ChartName::LaguerrePsi
        )
    }

    /// The weight `M(x)`.
    pub fn weight(&self, x: f64) -> f64 {
        let a = self.alpha;
        match self.name {
            ChartName::DeltaAlpha | ChartName::LaguerrePsi => x.powf(a),
            ChartName::OrnsteinUhlenbeckShifted => PI.powf(-0.25) * (-0.5 * x * x).exp(),
            ChartName::LaguerreShifted => 2f64.sqrt() * x.powf(a) * (-0.5 * x * x).exp(),
            ChartName::LaguerreEll => 2f64.sqrt() * x.powf(a),
            ChartName::LaguerreCal => 2f64.sqrt() * x.sqrt(),
        }
    }

    /// `h(x)`.
    pub fn map(&self, x: f64) -> f64 {
        if self.is_identity_map() {
            x
        } else {
            x * x
        }
    }

    /// `h⁻¹(y)`.
    pub fn inverse_map(&self, y: f64) -> f64 {
        if self.is_identity_map() {
            y
        } else {
            y.sqrt()
        }
    }

    /// `|J_{h⁻¹}(y)|`.
    pub fn inverse_jacobian(&self, y: f64) -> f64 {
        if self.is_identity_map() {
            1.0
        } else {
            0.5 / y.sqrt()
        }
    }

    /// Density of the base measure `dμ`; every base setting uses Lebesgue measure.
    pub fn base_density(&self, _x: f64) -> f64 {
        1.0
    }

    /// `dμ̄ = M(h⁻¹(y))²·|J_{h⁻¹}(y)|·dμ`.
    pub fn target_density(&self, y: f64) -> f64 {
        let x = self.inverse_map(y);
        self.weight(x).powi(2) * self.inverse_jacobian(y) * self.base_density(x)
    }

    /// The measure listed next to the chart operator, in closed form.
    pub fn chart_density(&self, y: f64) -> f64 {
        let a = self.alpha;
        match self.name {
            ChartName::DeltaAlpha | ChartName::LaguerrePsi => y.powf(2.0 * a),
            ChartName::OrnsteinUhlenbeckShifted => (-y * y).exp() / PI.sqrt(),
            ChartName::LaguerreShifted => y.powf(a - 0.5) * (-y).exp(),
            ChartName::LaguerreEll => y.powf(a - 0.5),
            ChartName::LaguerreCal => 1.0,
        }
    }
}

fn image_grid(entry: &ChartEntry, grid: &Grid1D, f: impl Fn(f64) -> f64) -> Result<Grid1D> {
    let nodes: Vec<f64> = grid.nodes().iter().map(|&x| f(x)).collect();
    let domain = match grid.domain() {
        Domain::Interval { a, b } if !entry.is_identity_map() => {
            Domain::Interval { a: f(a), b: f(b) }
        }
        d => d,
    };
    Grid1D::from_nodes(nodes, domain)
}

fn with_space(f: &SampledField, space: Grid1D) -> Result<SpaceTimeGrid> {
    let g = f.grid();
    SpaceTimeGrid::new(g.t_final(), g.nt() - 1, space)
}

fn check_domain(func: &'static str, entry: &ChartEntry, grid: &Grid1D) -> Result<()> {
    if entry.domain() == Domain::HalfLine && grid.nodes()[0] <= 0.0 {
        return Err(Error::precondition(
            func,
            "half-line entries need positive nodes",
        ));
    }
    Ok(())
}

/// `(U∘W)g` for `g` sampled at `y_j`; the result lives on `x_j = h⁻¹(y_j)`, so `W` is exact on nodes.
pub fn apply_uw(entry: &ChartEntry, g: &SampledField) -> Result<SampledField> {
    check_domain("apply_uw", entry, g.grid().space())?;
    let space = image_grid(entry, g.grid().space(), |y| entry.inverse_map(y))?;
    let m: Vec<f64> = space.nodes().iter().map(|&x| entry.weight(x)).collect();
    let grid = with_space(g, space)?;
    let mut v = g.values().clone();
    for ((_, j, _), e) in v.indexed_iter_mut() {
        *e *= m[j];
    }
    SampledField::from_array(&grid, v)
}

/// `(U∘W)⁻¹F(y) = F(h⁻¹(y))/M(h⁻¹(y))`; the result lives on `y_j = h(x_j)`.
pub fn apply_uw_inverse(entry: &ChartEntry, f: &SampledField) -> Result<SampledField> {
    check_domain("apply_uw_inverse", entry, f.grid().space())?;
    let m: Vec<f64> = f
        .grid()
        .space()
        .nodes()
        .iter()
        .map(|&x| entry.weight(x))
        .collect();
    let space = image_grid(entry, f.grid().space(), |x| entry.map(x))?;
    let grid = with_space(f, space)?;
    let mut v = f.values().clone();
    for ((_, j, _), e) in v.indexed_iter_mut() {
        *e /= m[j];
    }
    SampledField::from_array(&grid, v)
}

/// `(U∘W)g` on a prescribed base grid, interpolating `g` (uniform grid) at `h(x_j)` with cubic Lagrange.
pub fn apply_uw_onto(entry: &ChartEntry, g: &SampledField, base: &Grid1D) -> Result<SampledField> {
    check_domain("apply_uw_onto", entry, base)?;
    let grid = with_space(g, base.clone())?;
    let (nt, _, d) = g.values().dim();
    let mut out = Array3::zeros((nt, base.len(), d));
    let mut column = vec![0.0; g.grid().nx()];
    for i in 0..nt {
        for k in 0..d {
            for (c, v) in column.iter_mut().enumerate() {
                *v = g.values()[[i, c, k]];
            }
            for (j, &x) in base.nodes().iter().enumerate() {
                out[[i, j, k]] =
                    entry.weight(x) * interpolate_cubic(g.grid().space(), &column, entry.map(x))?;
            }
        }
    }
    SampledField::from_array(&grid, out)
}

/// Second-order central differences of `a f'' + b f' + c f` on a uniform
/// grid; returns the interior nodes and values.
pub fn apply_expression(
    coefficients: impl Fn(f64) -> [f64; 3],
    grid: &Grid1D,
    values: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = grid
        .step()
        .ok_or_else(|| Error::precondition("apply_expression", "grid must be uniform"))?;
    let n = grid.len();
    if n < 3 || values.len() != n {
        return Err(Error::precondition(
            "apply_expression",
            "need at least three matching samples",
        ));
    }
    let x = grid.nodes();
    let mut xs = Vec::with_capacity(n - 2);
    let mut out = Vec::with_capacity(n - 2);
    for i in 1..n - 1 {
        let [a, b, c] = coefficients(x[i]);
        let d2 = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
        let d1 = (values[i + 1] - values[i - 1]) / (2.0 * h);
        xs.push(x[i]);
        out.push(a * d2 + b * d1 + c * values[i]);
    }
    Ok((xs, out))
}

/// [`apply_expression`] for one of the listed operators.
pub fn apply_chart_operator(
    expr: &Expression,
    grid: &Grid1D,
    values: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    apply_expression(|x| expr.coefficients(x), grid, values)
}

/// A sum of amplitude-weighted `C^∞` bumps with closed-form derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothBumps {
    /// `(center, radius, amplitude)` triples.
    pub bumps: Vec<(f64, f64, f64)>,
}

impl SmoothBumps {
    /// `count` bumps with centers in `centers` and radii in `radii`, drawn from `seed`.
    pub fn random(seed: u64, count: usize, centers: (f64, f64), radii: (f64, f64)) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bumps = (0..count)
            .map(|_| {
                (
                    rng.random_range(centers.0..=centers.1),
                    rng.random_range(radii.0..=radii.1),
                    rng.random_range(-1.0..=1.0),
                )
            })
            .collect();
        SmoothBumps { bumps }
    }

    /// Standard draw for an entry: supports inside `[0.5, 3.5]` on the half-line, `[−3.5, 3.5]` on the line.
    pub fn for_entry(entry: &ChartEntry, seed: u64) -> Self {
        match entry.domain() {
            Domain::Line => SmoothBumps::random(seed, 3, (-1.0, 1.0), (1.5, 2.5)),
            _ => SmoothBumps::random(seed, 3, (1.8, 2.2), (1.0, 1.3)),
        }
    }

    /// `[g, g', g'']` at `x`.
    pub fn derivatives(&self, x: f64) -> [f64; 3] {
        let mut d = [0.0; 3];
        for &(c, rad, amp) in &self.bumps {
            let r = (x - c) / rad;
            if r.abs() >= 1.0 {
                continue;
            }
            let q = 1.0 - r * r;
            let b = (1.0 - 1.0 / q).exp();
            let p1 = -2.0 * r / (q * q);
            let p2 = -2.0 / (q * q) - 8.0 * r * r / (q * q * q);
            d[0] += amp * b;
            d[1] += amp * b * p1 / rad;
            d[2] += amp * b * (p1 * p1 + p2) / (rad * rad);
        }
        d
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivatives(x)[0]
    }

    /// Support endpoints, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .bumps
            .iter()
            .flat_map(|&(c, r, _)| [c - r, c + r])
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn support(&self) -> (f64, f64) {
        let b = self.breakpoints();
        (b[0], b[b.len() - 1])
    }
}

/// Sampled and target norms of the isometry check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsometryReport {
    /// `‖(U∘W)g‖_{L²(dμ)}` by trapezoid on the base grid.
    pub base_norm: f64,
    /// `‖g‖_{L²(dμ̄)}` by adaptive quadrature.
    pub target_norm: f64,
    /// `|base − target| / target`.
    pub defect: f64,
}

/// Isometry defect of `U∘W` for `g` sampled on `base` (uniform, covering `h⁻¹(supp g)`).
pub fn isometry_defect(
    entry: &ChartEntry,
    g: &SmoothBumps,
    base: &Grid1D,
) -> Result<IsometryReport> {
    check_domain("isometry_defect", entry, base)?;
    let (lo, hi) = g.support();
    if entry.domain() == Domain::HalfLine && lo <= 0.0 {
        return Err(Error::precondition(
            "isometry_defect",
            "test function must vanish near 0",
        ));
    }
    let x = base.nodes();
    if entry.inverse_map(lo) < x[0] || entry.inverse_map(hi) > x[x.len() - 1] {
        return Err(Error::Extrapolation {
            func: "isometry_defect",
            detail: format!("support [{lo}, {hi}] not inside the image of the base grid"),
        });
    }
    let w = base.trapezoid_weights();
    let base_sq: f64 = x
        .iter()
        .zip(&w)
        .map(|(&x, &w)| {
            w * (entry.weight(x) * g.value(entry.map(x))).powi(2) * entry.base_density(x)
        })
        .sum();
    let rule = QuadratureRule::default().with_rel(1e-13).with_abs(0.0);
    let target_sq = integrate_with_breaks(
        |y| g.value(y).powi(2) * entry.target_density(y),
        &g.breakpoints(),
        &rule,
    )
    .require("isometry_defect")?;
    let (b, t) = (base_sq.sqrt(), target_sq.sqrt());
    Ok(IsometryReport {
        base_norm: b,
        target_norm: t,
        defect: (b - t).abs() / t,
    })
}

/// Base-grid step used by [`isometry_check`] callers by default.
pub const ISOMETRY_STEP: f64 = 0.0025;

/// [`isometry_defect`] on a uniform base grid of step `h` covering `h⁻¹(supp g)`.
pub fn isometry_check(entry: &ChartEntry, g: &SmoothBumps, h: f64) -> Result<IsometryReport> {
    let (lo, hi) = g.support();
    let (a, b) = (entry.inverse_map(lo), entry.inverse_map(hi));
    let n = ((b - a) / h).ceil().max(4.0) as usize;
    isometry_defect(
        entry,
        g,
        &Grid1D::uniform(a, a + n as f64 * h, n, entry.domain())?,
    )
}

/// Residuals of one conjugation check at step `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugationLevel {
    pub h: f64,
    /// `max |L̄_h g(h(x_j)) − M⁻¹ L_h(U∘W g)(x_j)|` with `L̄ = scale·chart + offset`.
    pub residual: f64,
    /// `max |L̄_h g − L̄ g|` on the chart grid.
    pub stencil_error: f64,
    /// `max |I[L̄ g](h(x_j)) − L̄ g(h(x_j))|`, zero when `h` is the identity.
    pub interpolation_error: f64,
    /// The same residual against the chart operator exactly as listed.
    pub chart_residual: f64,
}

impl ConjugationLevel {
    pub fn interpolation_dominates(&self) -> bool {
        self.interpolation_error > self.stencil_error
    }
}

/// One-level conjugation residual for the test function `g` with step `h` on both grids.
pub fn check_conjugation(entry: &ChartEntry, g: &SmoothBumps, h: f64) -> Result<ConjugationLevel> {
    if !(h > 0.0) {
        return Err(Error::precondition(
            "check_conjugation",
            "h must be positive",
        ));
    }
    let (lo, hi) = g.support();
    if entry.domain() == Domain::HalfLine && lo <= 0.0 {
        return Err(Error::precondition(
            "check_conjugation",
            "support must stay away from 0",
        ));
    }
    let pad = 4.0 * h;
    let uniform = |a: f64, b: f64, h: f64| {
        let n = ((b - a) / h).ceil().max(4.0) as usize;
        Grid1D::uniform(a, a + n as f64 * h, n, entry.domain())
    };
    let y_grid = match entry.domain() {
        Domain::HalfLine => uniform((lo - pad).max(0.5 * lo), hi + pad, h)?,
        _ => uniform(lo - pad, hi + pad, h)?,
    };
    // x-step chosen so the image spacing |h'(x)|·dx stays below h
    let x_grid = if entry.is_identity_map() {
        y_grid.clone()
    } else {
        let x_hi = entry.inverse_map(hi);
        uniform(entry.inverse_map(lo), x_hi, h / (2.0 * x_hi))?
    };

    let gy: Vec<f64> = y_grid.nodes().iter().map(|&y| g.value(y)).collect();
    let (yi, bar) = apply_expression(|y| entry.conjugate_coefficients(y), &y_grid, &gy)?;
    let bar_grid = Grid1D::from_nodes(yi.clone(), entry.domain())?;
    let chart = entry.chart_expression();
    let (_, bar_chart) = apply_chart_operator(&chart, &y_grid, &gy)?;
    let exact_bar: Vec<f64> = yi
        .iter()
        .map(|&y| {
            let [a, b, c] = entry.conjugate_coefficients(y);
            let d = g.derivatives(y);
            a * d[2] + b * d[1] + c * d[0]
        })
        .collect();
    let stencil_error = bar
        .iter()
        .zip(&exact_bar)
        .fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));

    let fx: Vec<f64> = x_grid
        .nodes()
        .iter()
        .map(|&x| entry.weight(x) * g.value(entry.map(x)))
        .collect();
    let base_expr = entry.base_expression();
    let (xi, lf) = apply_chart_operator(&base_expr, &x_grid, &fx)?;

    let mut residual = 0.0f64;
    let mut interpolation_error = 0.0f64;
    let mut chart_residual = 0.0f64;
    for (&x, &v) in xi.iter().zip(&lf) {
        let y = entry.map(x);
        let conj = v / entry.weight(x);
        let (lhs, lhs_chart, interp) = if entry.is_identity_map() {
            let j = bar_grid
                .index_of(y)
                .ok_or_else(|| Error::precondition("check_conjugation", "grids misaligned"))?;
            (bar[j], bar_chart[j], 0.0)
        } else {
            let exact = entry.conjugate_coefficients(y);
            let d = g.derivatives(y);
            let exact_v = exact[0] * d[2] + exact[1] * d[1] + exact[2] * d[0];
            let ie = interpolate_cubic(&bar_grid, &exact_bar, y)? - exact_v;
            (
                interpolate_cubic(&bar_grid, &bar, y)?,
                interpolate_cubic(&bar_grid, &bar_chart, y)?,
                ie,
            )
        };
        residual = residual.max((lhs - conj).abs());
        chart_residual = chart_residual.max((lhs_chart - conj).abs());
        interpolation_error = interpolation_error.max(interp.abs());
    }
    Ok(ConjugationLevel {
        h,
        residual,
        stencil_error,
        interpolation_error,
        chart_residual,
    })
}

/// Conjugation residuals over `levels` halvings of `h0`, with observed orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugationReport {
    pub entry: ChartEntry,
    pub levels: Vec<ConjugationLevel>,
    pub orders: Vec<f64>,
}

impl ConjugationReport {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn conjugation_sweep(
    entry: &ChartEntry,
    g: &SmoothBumps,
    h0: f64,
    levels: usize,
) -> Result<ConjugationReport> {
    let levels: Vec<ConjugationLevel> = (0..levels)
        .map(|k| check_conjugation(entry, g, h0 / 2f64.powi(k as i32)))
        .collect::<Result<_>>()?;
    let orders = levels
        .windows(2)
        .map(|w| (w[0].residual / w[1].residual).log2())
        .collect();
    Ok(ConjugationReport {
        entry: *entry,
        levels,
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{hermite_functions, laguerre_functions};

    #[test]
    fn densities_match_the_chart() {
        for entry in ChartEntry::all(0.8).unwrap() {
            for k in 0..10 {
                let y = 0.15 + 0.37 * k as f64;
                let (u, v) = (entry.target_density(y), entry.chart_density(y));
                assert!(
                    ((u - v) / v).abs() < 1e-13,
                    "{:?} at {y}: {u} vs {v}",
                    entry.name
                );
            }
        }
    }

    #[test]
    fn identity_map_multiplies_by_the_weight() {
        let e = ChartEntry::new(ChartName::DeltaAlpha, 1.3).unwrap();
        let g = SpaceTimeGrid::new(1.0, 2, Grid1D::half_line_window(3.0, 30).unwrap()).unwrap();
        let f = SampledField::from_fn(&g, |t, x| (t + 1.0) * (-x).exp());
        let u = apply_uw(&e, &f).unwrap();
        for ((i, j, _), &v) in u.values().indexed_iter() {
            let x = g.space().nodes()[j];
            assert_eq!(v, x.powf(1.3) * f.values()[[i, j, 0]]);
        }
    }

    #[test]
    fn round_trip_on_the_image_grid() {
        for entry in ChartEntry::all(0.8).unwrap() {
            let space = match entry.domain() {
                Domain::Line => Grid1D::line_window(3.0, 20).unwrap(),
                _ => Grid1D::half_line_window(3.0, 20).unwrap(),
            };
            let g = SpaceTimeGrid::new(1.0, 3, space).unwrap();
            let f = SampledField::from_fn(&g, |t, x| (1.0 + t) * (-(x - 1.0).powi(2)).exp());
            let back = apply_uw_inverse(&entry, &apply_uw(&entry, &f).unwrap()).unwrap();
            assert!(back.relative_distance(&f).unwrap() < 1e-14);
            for (a, b) in back.grid().space().nodes().iter().zip(g.space().nodes()) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn interpolated_transfer_rejects_extrapolation() {
        let e = ChartEntry::new(ChartName::LaguerreEll, 0.8).unwrap();
        let g = SpaceTimeGrid::new(
            1.0,
            1,
            Grid1D::uniform(0.5, 2.0, 30, Domain::HalfLine).unwrap(),
        )
        .unwrap();
        let f = SampledField::from_fn(&g, |_, y| y);
        let base = Grid1D::uniform(0.8, 1.4, 10, Domain::HalfLine).unwrap();
        let u = apply_uw_onto(&e, &f, &base).unwrap();
        let x = base.nodes()[3];
        assert!((u.values()[[0, 3, 0]] - e.weight(x) * x * x).abs() < 1e-12);
        let wide = Grid1D::uniform(0.5, 1.6, 10, Domain::HalfLine).unwrap();
        assert!(matches!(
            apply_uw_onto(&e, &f, &wide),
            Err(Error::Extrapolation { .. })
        ));
    }

    #[test]
    fn finite_difference_eigen_identities() {
        let grid = |h: f64| Grid1D::uniform(-4.0, 4.0, (8.0 / h) as usize, Domain::Line).unwrap();
        let res = |h: f64| {
            let g = grid(h);
            let v: Vec<f64> = g
                .nodes()
                .iter()
                .map(|&x| hermite_functions(1, x)[0])
                .collect();
            let (_, lv) = apply_chart_operator(&Expression::Hermite, &g, &v).unwrap();
            lv.iter()
                .zip(&v[1..])
                .fold(0.0f64, |m, (a, b)| m.max((a - 0.5 * b).abs()))
        };
        assert!((res(0.1) / res(0.05)).log2() > 1.9);

        let g = grid(0.1);
        let (_, lv) =
            apply_chart_operator(&Expression::OrnsteinUhlenbeck, &g, &vec![1.0; g.len()]).unwrap();
        assert!(lv.iter().all(|&v| (v - 0.5).abs() < 1e-14));

        let alpha = 0.8;
        let k = 2;
        let res = |h: f64| {
            let g = Grid1D::uniform(0.5, 4.0, (3.5 / h) as usize, Domain::HalfLine).unwrap();
            let v: Vec<f64> = g
                .nodes()
                .iter()
                .map(|&x| laguerre_functions(k + 1, alpha, x).unwrap()[k] / x.powf(alpha))
                .collect();
            let (_, lv) = apply_chart_operator(&Expression::LaguerrePsi { alpha }, &g, &v).unwrap();
            let lambda = 2.0 * k as f64 + alpha + 0.5;
            lv.iter()
                .zip(&v[1..])
                .fold(0.0f64, |m, (a, b)| m.max((a - lambda * b).abs()))
        };
        assert!((res(0.02) / res(0.01)).log2() > 1.9);
    }

    #[test]
    fn bump_derivatives_match_differences() {
        let g = SmoothBumps::random(7, 3, (1.0, 2.0), (0.5, 1.0));
        let e = 1e-5;
        for &x in &[0.9, 1.3, 1.7, 2.2] {
            let d = g.derivatives(x);
            assert!((d[1] - (g.value(x + e) - g.value(x - e)) / (2.0 * e)).abs() < 1e-6);
            assert!(
                (d[2] - (g.derivatives(x + e)[1] - g.derivatives(x - e)[1]) / (2.0 * e)).abs()
                    < 1e-5
            );
        }
    }

    #[test]
    fn isometry_and_conjugation_for_one_entry() {
        let e = ChartEntry::new(ChartName::LaguerreCal, 0.8).unwrap();
        let g = SmoothBumps::for_entry(&e, 1);
        let base = Grid1D::uniform(0.2, 2.4, 2200, Domain::HalfLine).unwrap();
        let r = isometry_defect(&e, &g, &base).unwrap();
        assert!(r.defect < 1e-8, "{r:?}");
        let s = conjugation_sweep(&e, &g, 0.01, 3).unwrap();
        assert!(s.min_order() > 1.8, "{s:?}");
        assert!(s.levels[2].chart_residual > 100.0 * s.levels[2].residual);
        assert!(!s.levels[2].interpolation_dominates());
    }
}
