//! Independent brute-force oracles: eigenfunction-series kernels, the Hankel
//! multiplier route to the Bessel Poisson semigroup, and finite-difference
//! eigen-identity residuals.
//!
//! Series are summed from the highest index down.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{integrate_vec, Grid1D, QuadratureRule};
use crate::specfun::{bessel_j, hermite_functions, laguerre_functions};

/// A truncated eigen-series value with a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub truncation_bound: f64,
    pub terms: usize,
}

impl SeriesValue {
    /// The value, or a non-convergence error when the tail bound exceeds `tol`.
    pub fn require(self, tol: f64) -> Result<f64> {
        if self.truncation_bound <= tol {
            Ok(self.value)
        } else {
            Err(Error::nonconvergence(
                "spectral series",
                format!(
                    "truncation bound {:e} exceeds {:e} with {} terms",
                    self.truncation_bound, tol, self.terms
                ),
            ))
        }
    }

    pub fn flagged(&self, tol: f64) -> bool {
        self.truncation_bound > tol
    }
}

/// Uniform bound `|h_k(x)| ≤ π^{−1/4}`.
const HERMITE_ENVELOPE: f64 = 0.751_125_544_464_942_5;

fn check_t(func: &'static str, t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(func, format!("t must be positive, got {t}")));
    }
    Ok(())
}

fn check_terms(func: &'static str, n: usize, k_max: usize) -> Result<()> {
    if n == 0 || n > k_max + 1 {
        return Err(Error::capability(
            func,
            format!("{n} terms requested, limit is {}", k_max + 1),
        ));
    }
    Ok(())
}

/// Largest index accepted by the series oracles.
pub const SERIES_K_MAX: usize = 6000;

fn sum_desc(coeff: impl Fn(usize) -> f64, a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in (0..a.len()).rev() {
        s += coeff(k) * a[k] * b[k];
    }
    s
}

/// `Σ_{k<N} e^{−(k+1/2)t} h_k(x)h_k(y)`.
pub fn hermite_heat_series(t: f64, x: f64, y: f64, n: usize) -> Result<SeriesValue> {
    check_t("hermite_heat_series", t)?;
    check_terms("hermite_heat_series", n, SERIES_K_MAX)?;
    let hx = hermite_functions(n, x);
    let hy = hermite_functions(n, y);
    let value = sum_desc(|k| (-(k as f64 + 0.5) * t).exp(), &hx, &hy);
    let bound =
        HERMITE_ENVELOPE * HERMITE_ENVELOPE * (-(n as f64 + 0.5) * t).exp() / (-(-t).exp_m1());
    Ok(SeriesValue {
        value,
        truncation_bound: bound,
        terms: n,
    })
}

/// `Σ_{k<N} e^{−t√(k+1/2)} h_k(x)h_k(y)`.
pub fn hermite_poisson_series(t: f64, x: f64, y: f64, n: usize) -> Result<SeriesValue> {
    check_t("hermite_poisson_series", t)?;
    check_terms("hermite_poisson_series", n, SERIES_K_MAX)?;
    let hx = hermite_functions(n, x);
    let hy = hermite_functions(n, y);
    let value = sum_desc(|k| (-t * (k as f64 + 0.5).sqrt()).exp(), &hx, &hy);
    Ok(SeriesValue {
        value,
        truncation_bound: HERMITE_ENVELOPE.powi(2) * poisson_tail(t, n as f64 - 0.5),
        terms: n,
    })
}

/// `Σ_{k≥N} e^{−t√(k+c)}` bounded by `∫_{N−1}^∞`, with `r0 = √(N−1+c)`
/// passed as `r0² = shift`.
fn poisson_tail(t: f64, shift: f64) -> f64 {
    let r0 = shift.max(0.0).sqrt();
    2.0 * (-t * r0).exp() * (r0 / t + 1.0 / (t * t))
}

/// Smallest number of terms whose Hermite Poisson tail bound is below `tol`.
pub fn hermite_poisson_terms(t: f64, tol: f64) -> Result<usize> {
    check_t("hermite_poisson_terms", t)?;
    (1..=SERIES_K_MAX + 1)
        .find(|&n| HERMITE_ENVELOPE.powi(2) * poisson_tail(t, n as f64 - 0.5) <= tol)
        .ok_or_else(|| {
            Error::capability(
                "hermite_poisson_terms",
                format!("t = {t} needs more than {SERIES_K_MAX} terms"),
            )
        })
}

/// `Σ_{k<N} e^{−(2k+α+1/2)t} φ_k^α(x)φ_k^α(y)`.
///
/// The tail bound uses the largest computed `|φ_k^α|` as envelope.
pub fn laguerre_heat_series(alpha: f64, t: f64, x: f64, y: f64, n: usize) -> Result<SeriesValue> {
    check_t("laguerre_heat_series", t)?;
    check_terms("laguerre_heat_series", n, SERIES_K_MAX)?;
    let px = laguerre_functions(n, alpha, x)?;
    let py = laguerre_functions(n, alpha, y)?;
    let value = sum_desc(|k| (-(2.0 * k as f64 + alpha + 0.5) * t).exp(), &px, &py);
    let env = |v: &[f64]| v.iter().fold(0.0f64, |m, &a| m.max(a.abs()));
    let bound =
        env(&px) * env(&py) * (-(2.0 * n as f64 + alpha + 0.5) * t).exp() / (-(-2.0 * t).exp_m1());
    Ok(SeriesValue {
        value,
        truncation_bound: bound,
        terms: n,
    })
}

/// `Σ_{k<N} e^{−t√(2k+α+1/2)} φ_k^α(x)φ_k^α(y)`.
pub fn laguerre_poisson_series(
    alpha: f64,
    t: f64,
    x: f64,
    y: f64,
    n: usize,
) -> Result<SeriesValue> {
    check_t("laguerre_poisson_series", t)?;
    check_terms("laguerre_poisson_series", n, SERIES_K_MAX)?;
    let px = laguerre_functions(n, alpha, x)?;
    let py = laguerre_functions(n, alpha, y)?;
    let value = sum_desc(
        |k| (-t * (2.0 * k as f64 + alpha + 0.5).sqrt()).exp(),
        &px,
        &py,
    );
    let env = |v: &[f64]| v.iter().fold(0.0f64, |m, &a| m.max(a.abs()));
    // Σ_{k≥N} e^{−t√(2k+c)} ≤ ½ ∫_{2N−2}^∞ e^{−t√(s+c)} ds
    let bound = env(&px) * env(&py) * 0.5 * poisson_tail(t, 2.0 * n as f64 - 2.0 + alpha + 0.5);
    Ok(SeriesValue {
        value,
        truncation_bound: bound,
        terms: n,
    })
}

fn gk_nodes_weights(a: f64, b: f64) -> ([f64; 21], [f64; 21]) {
    const XGK: [f64; 11] = [
        0.995_657_163_025_808_1,
        0.973_906_528_517_171_7,
        0.930_157_491_355_708_2,
        0.865_063_366_688_984_5,
        0.780_817_726_586_416_9,
        0.679_409_568_299_024_4,
        0.562_757_134_668_604_7,
        0.433_395_394_129_247_2,
        0.294_392_862_701_460_2,
        0.148_874_338_981_631_2,
        0.0,
    ];
    const WGK: [f64; 11] = [
        0.011_694_638_867_371_874,
        0.032_558_162_307_964_73,
        0.054_755_896_574_351_996,
        0.075_039_674_810_919_95,
        0.093_125_454_583_697_6,
        0.109_387_158_802_297_64,
        0.123_491_976_262_065_85,
        0.134_709_217_311_473_33,
        0.142_775_938_577_060_08,
        0.147_739_104_901_338_5,
        0.149_445_554_002_916_9,
    ];
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let mut x = [0.0; 21];
    let mut w = [0.0; 21];
    for j in 0..10 {
        x[j] = c - hl * XGK[j];
        w[j] = hl * WGK[j];
        x[20 - j] = c + hl * XGK[j];
        w[20 - j] = hl * WGK[j];
    }
    x[10] = c;
    w[10] = hl * WGK[10];
    (x, w)
}

/// Composite 21-point Kronrod nodes on `[0, z_max]` with panels of width `dz`.
pub fn composite_nodes(z_max: f64, dz: f64) -> (Vec<f64>, Vec<f64>) {
    let panels = (z_max / dz).ceil().max(1.0) as usize;
    let width = z_max / panels as f64;
    let mut nodes = Vec::with_capacity(21 * panels);
    let mut weights = Vec::with_capacity(21 * panels);
    for p in 0..panels {
        let (x, w) = gk_nodes_weights(p as f64 * width, (p + 1) as f64 * width);
        nodes.extend_from_slice(&x);
        weights.extend_from_slice(&w);
    }
    (nodes, weights)
}

/// `√(xz) J_ν(xz)` sampled on a spatial grid × a frequency quadrature, the
/// discrete Hankel transform of order `ν = α − 1/2`.
#[derive(Debug, Clone)]
pub struct HankelBasis {
    pub alpha: f64,
    x: Vec<f64>,
    wx: Vec<f64>,
    z: Vec<f64>,
    wz: Vec<f64>,
    /// Row-major `x.len() × z.len()`.
    phi: Vec<f64>,
}

impl HankelBasis {
    /// Frequencies up to `z_max` with panel width `dz`.
    pub fn new(alpha: f64, grid: &Grid1D, z_max: f64, dz: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::domain(
                "HankelBasis::new",
                format!("alpha must be positive, got {alpha}"),
            ));
        }
        let x = grid.nodes().to_vec();
        if x[0] <= 0.0 {
            return Err(Error::precondition(
                "HankelBasis::new",
                "grid must lie in (0, ∞)",
            ));
        }
        let wx = grid.trapezoid_weights();
        let (z, wz) = composite_nodes(z_max, dz);
        let nu = alpha - 0.5;
        let mut phi = Vec::with_capacity(x.len() * z.len());
        for &xi in &x {
            for &zk in &z {
                let arg = xi * zk;
                phi.push(if arg == 0.0 {
                    0.0
                } else {
                    arg.sqrt() * bessel_j(nu, arg)?
                });
            }
        }
        Ok(HankelBasis {
            alpha,
            x,
            wx,
            z,
            wz,
            phi,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.z
    }

    /// `F(z) = ∫ √(xz)J_ν(xz) f(x) dx` at the frequency nodes.
    pub fn forward(&self, f: &[f64]) -> Vec<f64> {
        let nz = self.z.len();
        let mut out = vec![0.0; nz];
        for (i, (&fi, &wi)) in f.iter().zip(&self.wx).enumerate() {
            let c = fi * wi;
            if c == 0.0 {
                continue;
            }
            let row = &self.phi[i * nz..(i + 1) * nz];
            for (o, &p) in out.iter_mut().zip(row) {
                *o += c * p;
            }
        }
        out
    }

    /// `∫ √(xz)J_ν(xz) m(z) F(z) dz` at the spatial nodes.
    pub fn inverse(&self, transform: &[f64], multiplier: impl Fn(f64) -> f64) -> Vec<f64> {
        let nz = self.z.len();
        let g: Vec<f64> = (0..nz)
            .map(|k| self.wz[k] * multiplier(self.z[k]) * transform[k])
            .collect();
        (0..self.x.len())
            .map(|i| {
                let row = &self.phi[i * nz..(i + 1) * nz];
                let mut s = 0.0;
                for (p, gk) in row.iter().zip(&g) {
                    s += p * gk;
                }
                s
            })
            .collect()
    }
}

/// `h_ν[e^{−tz} h_ν f]` for samples `f` on `grid`, frequencies up to `z_max`.
pub fn hankel_poisson_oracle(
    alpha: f64,
    t: f64,
    grid: &Grid1D,
    f: &[f64],
    z_max: f64,
) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return Err(Error::domain(
            "hankel_poisson_oracle",
            format!("t must be nonnegative, got {t}"),
        ));
    }
    if f.len() != grid.len() {
        return Err(Error::precondition(
            "hankel_poisson_oracle",
            "sample count must match the grid",
        ));
    }
    let x_max = *grid.nodes().last().expect("nonempty");
    let basis = HankelBasis::new(alpha, grid, z_max, (PI / (2.0 * x_max)).min(0.5))?;
    let ft = basis.forward(f);
    Ok(basis.inverse(&ft, |z| (-t * z).exp()))
}

/// Pointwise Hankel-multiplier Poisson kernel
/// `∫_0^∞ e^{−tz} √(xz)J_ν(xz) √(yz)J_ν(yz) dz`.
pub fn hankel_poisson_kernel(alpha: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(t > 0.0) || !(x > 0.0) || !(y > 0.0) {
        return Err(Error::domain(
            "hankel_poisson_kernel",
            "alpha, t, x, y must be positive",
        ));
    }
    let nu = alpha - 0.5;
    let z_max = 45.0 / t;
    let period = PI / (x + y);
    let panels = (z_max / period).ceil() as usize;
    let mut pts: Vec<f64> = (0..=panels)
        .map(|k| k as f64 * z_max / panels as f64)
        .collect();
    pts.dedup();
    let rule = QuadratureRule {
        rel_tol: 1e-10,
        abs_tol: 1e-300,
        max_subdivisions: 100_000,
    };
    let failure = std::cell::RefCell::new(None);
    let r = integrate_vec(
        |z: f64| {
            if z <= 0.0 {
                return [0.0];
            }
            let jx = bessel_j(nu, x * z);
            let jy = bessel_j(nu, y * z);
            match (jx, jy) {
                (Ok(a), Ok(b)) => [(-t * z).exp() * z * (x * y).sqrt() * a * b],
                (Err(e), _) | (_, Err(e)) => {
                    failure.borrow_mut().get_or_insert(e);
                    [0.0]
                }
            }
        },
        &pts,
        &rule,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    r.component(0).require("hankel_poisson_kernel")
}

/// Which eigen-identity a residual check uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigenMode {
    /// `H h_k = (k + 1/2) h_k`.
    Hermite { k: usize },
    /// `L_α^φ φ_k^α = (2k + α + 1/2) φ_k^α`.
    Laguerre { alpha: f64, k: usize },
    /// `S_α[√(xy)J_{α−1/2}(xy)] = y² √(xy)J_{α−1/2}(xy)`.
    Bessel { alpha: f64, y: f64 },
}

impl EigenMode {
    /// Default interval on which the residual is sampled.
    pub fn default_interval(&self) -> (f64, f64) {
        match self {
            EigenMode::Hermite { .. } => (-4.0, 4.0),
            EigenMode::Laguerre { .. } => (0.5, 4.0),
            EigenMode::Bessel { .. } => (0.5, 10.0),
        }
    }
}

/// Max over interior nodes of `|L_h f − λ f|` with the 3-point stencil on
/// `[a, b]` with step `h`.
pub fn eigen_identity_residual(mode: EigenMode, a: f64, b: f64, h: f64) -> Result<f64> {
    if !(b > a) || !(h > 0.0) {
        return Err(Error::precondition(
            "eigen_identity_residual",
            "need a < b and h > 0",
        ));
    }
    let n = ((b - a) / h).round() as usize;
    if n < 4 {
        return Err(Error::precondition(
            "eigen_identity_residual",
            "grid too coarse for the stencil",
        ));
    }
    let h = (b - a) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| a + i as f64 * h).collect();
    let (f, lambda): (Vec<f64>, f64) = match mode {
        EigenMode::Hermite { k } => (
            xs.iter().map(|&x| hermite_functions(k + 1, x)[k]).collect(),
            k as f64 + 0.5,
        ),
        EigenMode::Laguerre { alpha, k } => {
            if a <= 0.0 {
                return Err(Error::precondition(
                    "eigen_identity_residual",
                    "Laguerre interval must lie in (0, ∞)",
                ));
            }
            let mut v = Vec::with_capacity(xs.len());
            for &x in &xs {
                v.push(laguerre_functions(k + 1, alpha, x)?[k]);
            }
            (v, 2.0 * k as f64 + alpha + 0.5)
        }
        EigenMode::Bessel { alpha, y } => {
            if a <= 0.0 {
                return Err(Error::precondition(
                    "eigen_identity_residual",
                    "Bessel interval must lie in (0, ∞)",
                ));
            }
            let mut v = Vec::with_capacity(xs.len());
            for &x in &xs {
                v.push((x * y).sqrt() * bessel_j(alpha - 0.5, x * y)?);
            }
            (v, y * y)
        }
    };
    let mut worst = 0.0f64;
    for i in 1..n {
        let x = xs[i];
        let d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
        let lf = match mode {
            EigenMode::Hermite { .. } => 0.5 * (-d2 + x * x * f[i]),
            EigenMode::Laguerre { alpha, .. } => {
                0.5 * (-d2 + (x * x + alpha * (alpha - 1.0) / (x * x)) * f[i])
            }
            EigenMode::Bessel { alpha, .. } => -d2 + alpha * (alpha - 1.0) / (x * x) * f[i],
        };
        worst = worst.max((lf - lambda * f[i]).abs());
    }
    Ok(worst)
}

/// Observed orders `log₂(r_k / r_{k+1})` of residuals under successive halvings.
pub fn observed_orders(residuals: &[f64]) -> Vec<f64> {
    residuals.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}
