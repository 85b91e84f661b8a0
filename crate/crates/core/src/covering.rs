//! Critical-radius covering of the line by balls `I_k = B(x_k, ρ(x_k))`, the
//! block-localized classical operator `T` built on it, and the rescaling
//! identity that ties `K` to `K^loc`.

use std::f64::consts::PI;

use ndarray::Array3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{standard_test_field, SampledField};
use crate::kernels::{critical_radius, KernelSetting};
use crate::operators::apply::{apply_k, DEFAULT_DELTA_STEPS};
use crate::operators::domination::{majorant_of, sup_ratio, Majorant};
use crate::operators::scalar::Semigroup1D;
use crate::operators::table::{EntryMask, KernelFamily, KernelTable};
use crate::operators::variants::{apply_k_local, support_columns};
use crate::quad::{integrate_with_breaks, Domain, Grid1D, QuadratureRule, SpaceTimeGrid};

/// `ρ(y)/ρ(x) ∈ [1/C₀, C₀]` whenever `|x − y| ≤ ρ(x)`; the sharp value is `1 + ρ² ≤ 5/4`.
pub const C0: f64 = 1.25;

/// Ordered centers `x_k` with radii `ρ(x_k)` covering `[−R, R]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Covering {
    pub centers: Vec<f64>,
    pub radii: Vec<f64>,
    pub window: f64,
    pub dilation: f64,
    /// `max_ℓ #{k : B(x_k, Mρ_k) ∩ B(x_ℓ, Mρ_ℓ) ≠ ∅}` for `M = dilation`.
    pub overlap: usize,
}

/// Greedy symmetric covering: `x_0 = 0`, `x_{k+1} = x_k + ρ(x_k)` until `[−R, R]` is covered.
pub fn build_covering(window: f64, dilation: f64) -> Result<Covering> {
    if !(window > 0.0) || !window.is_finite() {
        return Err(Error::precondition(
            "build_covering",
            "window R must be positive",
        ));
    }
    if !(dilation >= 1.0) || !dilation.is_finite() {
        return Err(Error::precondition(
            "build_covering",
            "dilation M must be at least 1",
        ));
    }
    let mut right = vec![0.0f64];
    while {
        let x = *right.last().unwrap();
        x + critical_radius(x) <= window
    } {
        let x = *right.last().unwrap();
        right.push(x + critical_radius(x));
    }
    let mut centers: Vec<f64> = right[1..].iter().rev().map(|&x| -x).collect();
    centers.extend_from_slice(&right);
    let radii = centers.iter().map(|&x| critical_radius(x)).collect();
    let mut c = Covering {
        centers,
        radii,
        window,
        dilation,
        overlap: 0,
    };
    c.overlap = c.overlap_count(dilation);
    Ok(c)
}

/// Result of the exhaustive cover check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverCheck {
    pub points: usize,
    pub uncovered: usize,
    /// Smallest `ρ_k − |x − x_k|` over the checked points (positive when covered).
    pub min_margin: f64,
}

impl Covering {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Indices `k` with `x ∈ I_k`.
    pub fn balls_containing(&self, x: f64) -> impl Iterator<Item = usize> + '_ {
        // radii are at most 1/2
        let lo = self.centers.partition_point(|&c| c <= x - 0.5);
        let hi = self.centers.partition_point(|&c| c < x + 0.5);
        (lo..hi).filter(move |&k| (x - self.centers[k]).abs() < self.radii[k])
    }

    /// The disjointified cell of `x`: the first `k` with `x ∈ I_k`.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        self.balls_containing(x).next()
    }

    fn margin(&self, x: f64) -> f64 {
        self.balls_containing(x)
            .map(|k| self.radii[k] - (x - self.centers[k]).abs())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Checks `x ∈ ∪ I_k` at every point of `[−R, R]` with the given spacing.
    pub fn verify_cover(&self, spacing: f64) -> Result<CoverCheck> {
        if !(spacing > 0.0) {
            return Err(Error::precondition(
                "Covering::verify_cover",
                "spacing must be positive",
            ));
        }
        let n = (2.0 * self.window / spacing).round() as usize;
        let mut uncovered = 0;
        let mut min_margin = f64::INFINITY;
        for i in 0..=n {
            let x = -self.window + 2.0 * self.window * i as f64 / n as f64;
            let m = self.margin(x);
            if !(m > 0.0) {
                uncovered += 1;
            }
            min_margin = min_margin.min(m);
        }
        Ok(CoverCheck {
            points: n + 1,
            uncovered,
            min_margin,
        })
    }

    /// `max_ℓ #{k : |x_k − x_ℓ| < M(ρ_k + ρ_ℓ)}`.
    pub fn overlap_count(&self, m: f64) -> usize {
        let n = self.len();
        (0..n)
            .map(|l| {
                let reach = m * (self.radii[l] + 0.5);
                let lo = self
                    .centers
                    .partition_point(|&c| c <= self.centers[l] - reach);
                let hi = self
                    .centers
                    .partition_point(|&c| c < self.centers[l] + reach);
                (lo..hi)
                    .filter(|&k| {
                        (self.centers[k] - self.centers[l]).abs()
                            < m * (self.radii[k] + self.radii[l])
                    })
                    .count()
            })
            .max()
            .unwrap_or(0)
    }

    /// `(C₀+1)I_k` for the cell of `x`.
    pub fn block_interval(&self, x: f64) -> Option<(f64, f64)> {
        self.cell_of(x).map(|k| {
            let r = (C0 + 1.0) * self.radii[k];
            (self.centers[k] - r, self.centers[k] + r)
        })
    }
}

fn require_line_inside(func: &'static str, f: &SampledField, cov: &Covering) -> Result<()> {
    let space = f.grid().space();
    if space.domain() != Domain::Line {
        return Err(Error::precondition(func, "field must live on a line grid"));
    }
    let x = space.nodes();
    if x[0] < -cov.window || x[x.len() - 1] > cov.window {
        return Err(Error::precondition(
            func,
            "grid extends beyond the covered window",
        ));
    }
    Ok(())
}

/// `T f(t,x) = χ_{I'_k}(x) ∫_0^t ∫_{(C₀+1)I_k} ∂_t P_{t−s}(x − y) f(s,y) dy ds`
/// with `I'_k` the disjointified cells.
pub fn localized_operator_t(f: &SampledField, cov: &Covering) -> Result<SampledField> {
    require_line_inside("localized_operator_t", f, cov)?;
    let g = f.grid();
    let cols = support_columns(f)?;
    let mask = EntryMask::from_intervals(g.space(), cols.clone(), |x| cov.block_interval(x));
    let table = KernelTable::build(
        KernelFamily::Poisson(KernelSetting::classical()),
        g.space(),
        cols,
        g.dt(),
        g.nt().saturating_sub(1).max(1),
        Some(&mask),
    )?;
    apply_k(&table, f, DEFAULT_DELTA_STEPS)
}

/// `𝔻 f = T f − K^loc f` for the classical kernel on `|x − y| < ρ(x)`.
pub fn localization_difference(f: &SampledField, cov: &Covering) -> Result<SampledField> {
    let t = localized_operator_t(f, cov)?;
    t.combine(1.0, &apply_k_local(&KernelSetting::classical(), f)?, -1.0)
}

/// `‖T f‖²` against `Σ_k ‖K(χ_{(C₀+1)I_k} f)‖²` over the cells met by the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockBound {
    pub t_norm_sq: f64,
    pub block_sum_sq: f64,
    /// `max |T f − Σ_k χ_{I'_k} K(χ_k f)|`, zero up to rounding.
    pub assembly_defect: f64,
    pub blocks: usize,
}

pub fn block_bound(f: &SampledField, cov: &Covering) -> Result<BlockBound> {
    let t = localized_operator_t(f, cov)?;
    let g = f.grid();
    let x = g.space().nodes();
    let cells: Vec<Option<usize>> = x.iter().map(|&x| cov.cell_of(x)).collect();
    let mut used: Vec<usize> = cells.iter().flatten().copied().collect();
    used.dedup();
    let cols = support_columns(f)?;
    let classical = KernelFamily::Poisson(KernelSetting::classical());
    let mut assembled = Array3::<f64>::zeros(f.values().dim());
    let mut block_sum_sq = 0.0;
    let mut blocks = 0;
    for &k in &used {
        let r = (C0 + 1.0) * cov.radii[k];
        let (lo, hi) = (cov.centers[k] - r, cov.centers[k] + r);
        let chi = EntryMask::from_intervals(g.space(), cols.clone(), |_| Some((lo, hi)));
        if chi.count() == 0 {
            continue;
        }
        let table = KernelTable::build(
            classical,
            g.space(),
            cols.clone(),
            g.dt(),
            g.nt() - 1,
            Some(&chi),
        )?;
        let kb = apply_k(&table, f, DEFAULT_DELTA_STEPS)?;
        block_sum_sq += kb.l2_norm().powi(2);
        blocks += 1;
        for ((i, j, d), v) in assembled.indexed_iter_mut() {
            if cells[j] == Some(k) {
                *v += kb.values()[[i, j, d]];
            }
        }
    }
    let assembly_defect = t
        .values()
        .iter()
        .zip(assembled.iter())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(BlockBound {
        t_norm_sq: t.l2_norm().powi(2),
        block_sum_sq,
        assembly_defect,
        blocks,
    })
}

/// Grid check of the two region inclusions behind `𝔻`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    pub pairs: usize,
    /// Local pairs not in `∪_k I_k × (C₀+1)I_k`.
    pub local_outside_union: usize,
    /// Pairs in the symmetric difference outside `ρ(x) ≤ |x − y| ≤ C₀(C₀+2)ρ(x)`.
    pub difference_outside_annulus: usize,
}

/// Checks the inclusions on all pairs of an `n`-point grid of `[−w, w]`, both for
/// the union of blocks and for the disjointified cells used by `T`.
pub fn region_sandwich(cov: &Covering, w: f64, n: usize) -> Result<SandwichCheck> {
    if !(w > 0.0) || w > cov.window || n < 2 {
        return Err(Error::precondition(
            "region_sandwich",
            "need 0 < w ≤ R and n ≥ 2",
        ));
    }
    let pts: Vec<f64> = (0..n)
        .map(|i| -w + 2.0 * w * i as f64 / (n - 1) as f64)
        .collect();
    let outer = C0 * (C0 + 2.0);
    let mut local_outside_union = 0;
    let mut difference_outside_annulus = 0;
    for &x in &pts {
        let balls: Vec<usize> = cov.balls_containing(x).collect();
        let cell = cov.block_interval(x);
        let rho = critical_radius(x);
        for &y in &pts {
            let local = (x - y).abs() < rho;
            let in_union = balls
                .iter()
                .any(|&k| (y - cov.centers[k]).abs() < (C0 + 1.0) * cov.radii[k]);
            let in_cell = cell.is_some_and(|(lo, hi)| lo < y && y < hi);
            if local && !in_union {
                local_outside_union += 1;
            }
            let d = (x - y).abs();
            let annulus = rho <= d && d <= outer * rho;
            if (in_union != local || in_cell != local) && !annulus {
                difference_outside_annulus += 1;
            }
        }
    }
    Ok(SandwichCheck {
        pairs: n * n,
        local_outside_union,
        difference_outside_annulus,
    })
}

/// Empirical constant in `|𝔻 f| ≤ C·M[P_*(|f|)]` at one grid level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationLevel {
    pub h: f64,
    pub constant: f64,
    pub argmax_t: f64,
    pub argmax_x: f64,
}

/// `𝔻` against `M[P_*]` on `levels` halvings of `h0` over `[−x_max, x_max] × [0, T]`.
pub fn localization_sweep(
    cov: &Covering,
    x_max: f64,
    t_max: f64,
    h0: f64,
    levels: usize,
) -> Result<Vec<LocalizationLevel>> {
    (0..levels)
        .map(|l| {
            let h = h0 / (1 << l) as f64;
            let space = Grid1D::line_window(x_max, (x_max / h).round() as usize)?;
            let grid = SpaceTimeGrid::new(t_max, (t_max / h).round() as usize, space)?;
            let f = standard_test_field(&grid);
            let d = localization_difference(&f, cov)?;
            let rhs = majorant_of(Majorant::M, Semigroup1D::Poisson, &f)?;
            let (constant, argmax_t, argmax_x, _) = sup_ratio("localization-difference", &d, &rhs)?;
            Ok(LocalizationLevel {
                h,
                constant,
                argmax_t,
                argmax_x,
            })
        })
        .collect()
}

/// `R₀ = 2(a + b)`: for `R ≥ R₀`, `|y − x/R| ≤ (a+b)/R ≤ 1/2 = ρ(x/R)` whenever `|y| ≤ a/R`, `|x| ≤ b`.
pub fn rescaling_threshold(a: f64, b: f64) -> f64 {
    2.0 * (a + b)
}

/// `∂_τ P_τ(z) = (z² − τ²)/(π(τ² + z²)²)`.
fn dt_poisson(tau: f64, z: f64) -> f64 {
    let q = tau * tau + z * z;
    (z * z - tau * tau) / (PI * q * q)
}

/// `∫_{y₁}^{y₂} ∂_τ P_τ(x − y) dy`.
fn dt_poisson_mass(tau: f64, x: f64, y1: f64, y2: f64) -> f64 {
    let prim = |z: f64| -z / (PI * (tau * tau + z * z));
    prim(x - y1) - prim(x - y2)
}

fn rules() -> (QuadratureRule, QuadratureRule) {
    // the second difference loses digits below ~1e-11 relative
    let inner = QuadratureRule::new(1e-10, 1e-14, 400).expect("valid rule");
    let outer = QuadratureRule::new(1e-10, 1e-13, 400).expect("valid rule");
    (inner, outer)
}

/// `∫_0^t ∫_{y₁}^{y₂} ∂_t P_{t−s}(x − y) f(s, y) dy ds` by nested adaptive
/// quadrature, subtracting `f(s, x)` in the inner integral.
pub fn k_classical_point(
    f: &dyn Fn(f64, f64) -> f64,
    t: f64,
    x: f64,
    y1: f64,
    y2: f64,
) -> Result<f64> {
    if !(t > 0.0) || !(y2 > y1) {
        return Ok(0.0);
    }
    let (inner, outer) = rules();
    let failure = std::cell::Cell::new(false);
    // symmetric part folded about y = x: the integrand is a bounded second difference
    let inner_at = |s: f64| {
        let tau = t - s;
        let fx = f(s, x);
        let mut total = fx * dt_poisson_mass(tau, x, y1, y2);
        let mut run = |g: &dyn Fn(f64) -> f64, a: f64, b: f64| {
            if b > a {
                let mut pts = vec![a, b];
                if tau > a && tau < b {
                    pts.insert(1, tau);
                }
                let r = integrate_with_breaks(g, &pts, &inner);
                if !r.converged {
                    failure.set(true);
                }
                total += r.value;
            }
        };
        let d = (x - y1).min(y2 - x).max(0.0);
        run(
            &|z| dt_poisson(tau, z) * (f(s, x - z) + f(s, x + z) - 2.0 * fx),
            0.0,
            d,
        );
        if x - y1 > d {
            run(&|z| dt_poisson(tau, z) * (f(s, x - z) - fx), d, x - y1);
        }
        if y2 - x > d {
            run(
                &|z| dt_poisson(tau, z) * (f(s, x + z) - fx),
                d.max(x - y2),
                y2 - x,
            );
        }
        total
    };
    // inner(τ) is smooth down to τ = 0 but rounding in the second difference
    // grows like 1/τ: the last stretch (t − ε, t) uses two-point Gauss
    let eps = 1e-4 * t;
    let mut pts: Vec<f64> = (0..14)
        .map(|k| t - t * 0.5f64.powi(k))
        .filter(|&s| s < t - eps)
        .collect();
    pts.push(t - eps);
    let r = integrate_with_breaks(inner_at, &pts, &outer);
    let g = 0.5 / 3f64.sqrt();
    let tail = 0.5 * eps * (inner_at(t - eps * (0.5 - g)) + inner_at(t - eps * (0.5 + g)));
    let r = crate::quad::QuadResult {
        value: r.value + tail,
        ..r
    };
    if failure.get() || !r.converged {
        return Err(Error::nonconvergence(
            "k_classical_point",
            format!("t={t} x={x}"),
        ));
    }
    Ok(r.value)
}

/// Both sides of `K f(t,x) = K^loc((f_R)^R)(t/R, x/R)` on a sample of `(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescalingReport {
    pub r: f64,
    pub r0: f64,
    pub residual: f64,
    pub max_value: f64,
}

/// `f` must vanish for `|x| > a`; the check runs over `|x| ≤ b` and `t ∈ (0, T]`.
pub fn rescaling_identity_check(
    f: &dyn Fn(f64, f64) -> f64,
    a: f64,
    b: f64,
    t_final: f64,
    r: f64,
) -> Result<RescalingReport> {
    if !(a > 0.0) || !(b > 0.0) || !(t_final > 0.0) {
        return Err(Error::precondition(
            "rescaling_identity_check",
            "a, b and T must be positive",
        ));
    }
    let r0 = rescaling_threshold(a, b);
    if !(r >= r0) {
        return Err(Error::precondition(
            "rescaling_identity_check",
            format!("R = {r} below R₀ = {r0}"),
        ));
    }
    rescaling_residual(f, a, b, t_final, r)
}

/// The residual of [`rescaling_identity_check`] without the `R ≥ R₀` guard.
pub fn rescaling_residual(
    f: &dyn Fn(f64, f64) -> f64,
    a: f64,
    b: f64,
    t_final: f64,
    r: f64,
) -> Result<RescalingReport> {
    let r0 = rescaling_threshold(a, b);
    let scaled = |s: f64, y: f64| f(r * s, r * y);
    let mut residual = 0.0f64;
    let mut max_value = 0.0f64;
    for &tq in &[0.25, 0.5, 0.75, 1.0] {
        let t = tq * t_final;
        for i in 0..9 {
            let x = -b + 2.0 * b * i as f64 / 8.0;
            let lhs = k_classical_point(f, t, x, -a, a)?;
            let (xs, rho) = (x / r, critical_radius(x / r));
            // the whole local window, not clipped to the support
            let (lo, hi) = (xs - rho, xs + rho);
            let rhs = k_classical_point(&scaled, t / r, xs, lo, hi)?;
            residual = residual.max((lhs - rhs).abs());
            max_value = max_value.max(lhs.abs());
        }
    }
    Ok(RescalingReport {
        r,
        r0,
        residual,
        max_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::bump;

    #[test]
    fn unit_window_spacing() {
        let c = build_covering(1.0, 1.0).unwrap();
        let inner: Vec<f64> = c
            .centers
            .iter()
            .copied()
            .filter(|x| x.abs() <= 1.0)
            .collect();
        assert!(inner.windows(2).all(|w| w[1] - w[0] <= 0.5 + 1e-15));
        assert_eq!(c.verify_cover(1e-3).unwrap().uncovered, 0);
        assert!(c
            .centers
            .iter()
            .zip(c.centers.iter().rev())
            .all(|(a, b)| (a + b).abs() < 1e-12));
    }

    #[test]
    fn overlap_is_window_independent() {
        let a = build_covering(50.0, 3.0).unwrap();
        let b = build_covering(100.0, 3.0).unwrap();
        assert!(
            a.overlap <= 20 && a.overlap == b.overlap,
            "{} {}",
            a.overlap,
            b.overlap
        );
    }

    #[test]
    fn sharp_radius_ratio() {
        let mut worst = 1.0f64;
        for i in 0..20001 {
            let x = -10.0 + i as f64 * 1e-3;
            let r = critical_radius(x);
            for k in 0..=20 {
                let y = x - r + 2.0 * r * k as f64 / 20.0;
                let q = critical_radius(y) / r;
                worst = worst.max(q).max(1.0 / q);
            }
        }
        assert!(worst <= C0 + 1e-12 && worst > C0 - 1e-3, "{worst}");
    }

    #[test]
    fn sandwich_and_block_identity() {
        let cov = build_covering(10.0, 3.0).unwrap();
        let s = region_sandwich(&cov, 4.0, 401).unwrap();
        assert_eq!(
            (s.local_outside_union, s.difference_outside_annulus),
            (0, 0)
        );
        let grid = SpaceTimeGrid::new(1.0, 8, Grid1D::line_window(3.0, 12).unwrap()).unwrap();
        let f = standard_test_field(&grid);
        let bb = block_bound(&f, &cov).unwrap();
        assert!(
            bb.assembly_defect < 1e-12 * (1.0 + bb.t_norm_sq.sqrt()),
            "{bb:?}"
        );
        assert!(bb.t_norm_sq <= bb.block_sum_sq);
    }

    #[test]
    fn rescaling_precondition() {
        let f = |t: f64, x: f64| t * bump(x, 0.0, 1.0);
        assert!(matches!(
            rescaling_identity_check(&f, 1.0, 2.0, 1.0, 5.0),
            Err(Error::Precondition { .. })
        ));
        let below = rescaling_residual(&f, 1.0, 2.0, 1.0, 1.0).unwrap();
        assert!(below.residual > 1e-3 * below.max_value, "{below:?}");
    }
}
