//! Scalar dominating operators on one-dimensional grids.
//!
//! Samples are read as the piecewise-linear interpolant of the nodes, zero
//! beyond the last node. On a half-line grid the interpolant is extended as a
//! constant on `(0, x_0]`; on every other grid it vanishes before the first
//! node. Integral operators are assembled by product integration of their
//! kernels against that interpolant.

use std::f64::consts::PI;

use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::quad::{integrate_vec, Domain, Grid1D, QuadratureRule};

/// A linear map between sampled spaces given by sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    n_in: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseOperator {
    pub fn new(n_in: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        if rows.iter().flatten().any(|&(l, _)| l >= n_in) {
            return Err(Error::precondition(
                "SparseOperator::new",
                "column index out of range",
            ));
        }
        Ok(SparseOperator { n_in, rows })
    }

    pub fn identity(n: usize) -> Self {
        SparseOperator {
            n_in: n,
            rows: (0..n).map(|i| vec![(i, 1.0)]).collect(),
        }
    }

    pub fn dim_in(&self) -> usize {
        self.n_in
    }

    pub fn dim_out(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(l, w)| w * v[l]).sum())
            .collect()
    }

    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_in];
        for (r, &vi) in self.rows.iter().zip(v) {
            for &(l, w) in r {
                out[l] += w * vi;
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        SparseOperator {
            n_in: self.n_in,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(l, w)| (l, c * w)).collect())
                .collect(),
        }
    }
}

/// One cell of the interpolant: on `[a, b]` it equals
/// `v[left]·(1−λ) + v[right]·λ` with `λ = (y−a)/(b−a)`.
#[derive(Debug, Clone, Copy)]
struct Cell {
    a: f64,
    b: f64,
    left: usize,
    right: usize,
}

fn cells(grid: &Grid1D) -> Vec<Cell> {
    let x = grid.nodes();
    let mut out = Vec::with_capacity(x.len());
    if grid.domain() == Domain::HalfLine {
        out.push(Cell {
            a: 0.0,
            b: x[0],
            left: 0,
            right: 0,
        });
    }
    for k in 0..x.len().saturating_sub(1) {
        out.push(Cell {
            a: x[k],
            b: x[k + 1],
            left: k,
            right: k + 1,
        });
    }
    out
}

fn product_rule() -> QuadratureRule {
    QuadratureRule {
        rel_tol: 1e-12,
        abs_tol: 1e-15,
        max_subdivisions: 200,
    }
}

/// Weights `w_l` with `∫_lo^hi κ(y) v(y) dy = Σ_l w_l v_l` for the interpolant
/// `v`; `singular` marks a point `s` where `κ` has an integrable singularity.
/// The kernel is called as `κ(y, |y − s|)` with the distance computed without
/// cancellation.
pub fn product_weights(
    grid: &Grid1D,
    lo: f64,
    hi: f64,
    kappa: impl Fn(f64, f64) -> f64,
    singular: Option<f64>,
) -> Result<Vec<(usize, f64)>> {
    let mut acc: Vec<(usize, f64)> = Vec::new();
    let rule = product_rule();
    for c in cells(grid) {
        let a = c.a.max(lo);
        let b = c.b.min(hi);
        if !(b > a) {
            continue;
        }
        let mut pieces = vec![(a, b)];
        if let Some(s) = singular {
            if s > a && s < b {
                pieces = vec![(a, s), (s, b)];
            }
        }
        for (pa, pb) in pieces {
            let len = pb - pa;
            let lam = |y: f64| {
                if c.right == c.left {
                    0.0
                } else {
                    (y - c.a) / (c.b - c.a)
                }
            };
            let at_left = singular.is_some_and(|s| (s - pa).abs() <= 1e-14 * (1.0 + s.abs()));
            let at_right = singular.is_some_and(|s| (s - pb).abs() <= 1e-14 * (1.0 + s.abs()));
            let r = if at_left || at_right {
                integrate_vec(
                    |v: f64| {
                        let dist = len * v * v;
                        let y = if at_left { pa + dist } else { pb - dist };
                        let k = kappa(y, dist) * 2.0 * len * v;
                        [k * (1.0 - lam(y)), k * lam(y)]
                    },
                    &[0.0, 1.0],
                    &rule,
                )
            } else {
                integrate_vec(
                    |y: f64| {
                        let k = kappa(y, singular.map_or(f64::INFINITY, |s| (y - s).abs()));
                        [k * (1.0 - lam(y)), k * lam(y)]
                    },
                    &[pa, pb],
                    &rule,
                )
            };
            let [w0, w1] = r.require("product_weights")?;
            acc.push((c.left, w0));
            acc.push((c.right, w1));
        }
    }
    acc.sort_by_key(|p| p.0);
    let mut merged: Vec<(usize, f64)> = Vec::new();
    for (l, w) in acc {
        match merged.last_mut() {
            Some(last) if last.0 == l => last.1 += w,
            _ => merged.push((l, w)),
        }
    }
    Ok(merged)
}

fn build_rows(
    grid: &Grid1D,
    row: impl Fn(f64) -> Result<Vec<(usize, f64)>>,
) -> Result<SparseOperator> {
    let rows = grid
        .nodes()
        .iter()
        .map(|&x| row(x))
        .collect::<Result<Vec<_>>>()?;
    SparseOperator::new(grid.len(), rows)
}

fn require_half_line(func: &'static str, grid: &Grid1D) -> Result<()> {
    if grid.nodes()[0] <= 0.0 {
        return Err(Error::precondition(func, "grid must lie in (0, ∞)"));
    }
    Ok(())
}

/// `H₀h(x) = (1/x)∫_0^x h`.
pub fn hardy_h0_operator(grid: &Grid1D) -> Result<SparseOperator> {
    require_half_line("hardy_h0_operator", grid)?;
    build_rows(grid, |x| {
        product_weights(grid, 0.0, x, |_, _| 1.0 / x, None)
    })
}

/// `H_∞h(x) = ∫_x^∞ h(y)/y dy`.
pub fn hardy_hinf_operator(grid: &Grid1D) -> Result<SparseOperator> {
    require_half_line("hardy_hinf_operator", grid)?;
    let top = *grid.nodes().last().expect("nonempty");
    build_rows(grid, |x| {
        product_weights(grid, x, top, |y, _| 1.0 / y, None)
    })
}

/// `(1/x)∫_0^{x/2} h + ∫_{2x}^∞ h(y)/y dy`, the Hardy pair off `x/2 < y < 2x`.
pub fn split_hardy_operator(grid: &Grid1D) -> Result<SparseOperator> {
    require_half_line("split_hardy_operator", grid)?;
    let top = *grid.nodes().last().expect("nonempty");
    build_rows(grid, |x| {
        let mut row = product_weights(grid, 0.0, 0.5 * x, |_, _| 1.0 / x, None)?;
        row.extend(product_weights(grid, 2.0 * x, top, |y, _| 1.0 / y, None)?);
        Ok(row)
    })
}

/// `𝕃h(x) = (1/x)∫_{x/2}^{2x} h`.
pub fn averaging_l_operator(grid: &Grid1D) -> Result<SparseOperator> {
    require_half_line("averaging_l_operator", grid)?;
    build_rows(grid, |x| {
        product_weights(grid, 0.5 * x, 2.0 * x, |_, _| 1.0 / x, None)
    })
}

/// `𝒜h(x) = (1/x)∫_{x/2}^{2x} (1 + log₊(x/|x−y|)) h(y) dy`.
pub fn log_kernel_a_operator(grid: &Grid1D) -> Result<SparseOperator> {
    require_half_line("log_kernel_a_operator", grid)?;
    build_rows(grid, |x| {
        product_weights(
            grid,
            0.5 * x,
            2.0 * x,
            |_, d| (1.0 + (x / d).ln().max(0.0)) / x,
            Some(x),
        )
    })
}

/// `𝒩h(x) = ∫_{x/2}^{2x} y^{−1/2}|x−y|^{−1/2} h(y) dy`.
pub fn sqrt_kernel_n_operator(grid: &Grid1D) -> Result<SparseOperator> {
    require_half_line("sqrt_kernel_n_operator", grid)?;
    build_rows(grid, |x| {
        product_weights(grid, 0.5 * x, 2.0 * x, |y, d| 1.0 / (y * d).sqrt(), Some(x))
    })
}

/// Applies `op` to samples after a length check.
pub fn apply_checked(op: &SparseOperator, h: &[f64]) -> Result<Vec<f64>> {
    if h.len() != op.dim_in() {
        return Err(Error::precondition(
            "apply_checked",
            format!("{} samples for {} nodes", h.len(), op.dim_in()),
        ));
    }
    Ok(op.apply(h))
}

pub fn hardy_h0(grid: &Grid1D, h: &[f64]) -> Result<Vec<f64>> {
    apply_checked(&hardy_h0_operator(grid)?, h)
}

pub fn hardy_hinf(grid: &Grid1D, h: &[f64]) -> Result<Vec<f64>> {
    apply_checked(&hardy_hinf_operator(grid)?, h)
}

pub fn averaging_l(grid: &Grid1D, h: &[f64]) -> Result<Vec<f64>> {
    apply_checked(&averaging_l_operator(grid)?, h)
}

pub fn log_kernel_a(grid: &Grid1D, h: &[f64]) -> Result<Vec<f64>> {
    apply_checked(&log_kernel_a_operator(grid)?, h)
}

pub fn sqrt_kernel_n(grid: &Grid1D, h: &[f64]) -> Result<Vec<f64>> {
    apply_checked(&sqrt_kernel_n_operator(grid)?, h)
}

/// Geometric ladder `u_min·ratio^k ≤ u_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ladder {
    pub u_min: f64,
    pub u_max: f64,
    pub ratio: f64,
}

impl Ladder {
    /// `u ∈ [h², T²]` with ratio 2.
    pub fn standard(h: f64, t_final: f64) -> Self {
        Ladder {
            u_min: h * h,
            u_max: t_final * t_final,
            ratio: 2.0,
        }
    }

    pub fn rungs(&self) -> Result<Vec<f64>> {
        if !(self.u_min > 0.0) || !(self.u_max >= self.u_min) || !(self.ratio > 1.0) {
            return Err(Error::precondition(
                "Ladder::rungs",
                format!("invalid ladder {self:?}"),
            ));
        }
        let mut out = vec![];
        let mut u = self.u_min;
        while u <= self.u_max * (1.0 + 1e-12) {
            out.push(u);
            u *= self.ratio;
        }
        Ok(out)
    }
}

/// One-dimensional convolution semigroups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semigroup1D {
    /// `P_u(s) = u/(π(u² + s²))`.
    Poisson,
    /// `W_u(s) = e^{−s²/4u}/√(4πu)`.
    Heat,
}

impl Semigroup1D {
    /// Primitives of `k_u(σ)` and `σ·k_u(σ)`.
    fn primitives(self, u: f64, s: f64) -> (f64, f64) {
        match self {
            Semigroup1D::Poisson => ((s / u).atan() / PI, u / (2.0 * PI) * (u * u + s * s).ln()),
            Semigroup1D::Heat => {
                let r = s / (2.0 * u.sqrt());
                (0.5 * erf(r), -(u / PI).sqrt() * (-r * r).exp())
            }
        }
    }
}

/// `k_u * v` at every node, exact for the interpolant `v` (vanishing outside
/// the grid range).
pub fn semigroup_apply(grid: &Grid1D, v: &[f64], u: f64, kind: Semigroup1D) -> Result<Vec<f64>> {
    if v.len() != grid.len() {
        return Err(Error::precondition(
            "semigroup_apply",
            "sample count does not match the grid",
        ));
    }
    if !(u > 0.0) {
        return Err(Error::domain(
            "semigroup_apply",
            format!("u must be positive, got {u}"),
        ));
    }
    let x = grid.nodes();
    let cs = cells(grid);
    Ok(x.iter()
        .map(|&t| {
            let mut acc = 0.0;
            for c in &cs {
                let (va, vb) = (v[c.left], v[c.right]);
                if va == 0.0 && vb == 0.0 {
                    continue;
                }
                let slope = if c.left == c.right {
                    0.0
                } else {
                    (vb - va) / (c.b - c.a)
                };
                let (p0a, p1a) = kind.primitives(u, c.a - t);
                let (p0b, p1b) = kind.primitives(u, c.b - t);
                acc += (va + slope * (t - c.a)) * (p0b - p0a) + slope * (p1b - p1a);
            }
            acc
        })
        .collect())
}

/// Supremum over a ladder with the rung at which it is attained.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalResult {
    pub values: Vec<f64>,
    pub argmax_rung: Vec<usize>,
    pub rungs: Vec<f64>,
    /// Nodes carrying at least `1e−3` of the peak whose supremum sits on the
    /// top rung.
    pub top_rung_hits: usize,
}

impl MaximalResult {
    /// True when the ladder may have cut off a larger supremum.
    pub fn truncated(&self) -> bool {
        self.top_rung_hits > 0
    }
}

fn maximal(grid: &Grid1D, v: &[f64], ladder: &Ladder, kind: Semigroup1D) -> Result<MaximalResult> {
    let rungs = ladder.rungs()?;
    let n = grid.len();
    let mut values = vec![0.0; n];
    let mut argmax = vec![0; n];
    for (k, &u) in rungs.iter().enumerate() {
        let w = semigroup_apply(grid, v, u, kind)?;
        for j in 0..n {
            if w[j].abs() > values[j] {
                values[j] = w[j].abs();
                argmax[j] = k;
            }
        }
    }
    let peak = values.iter().fold(0.0f64, |m, &x| m.max(x));
    let top = rungs.len() - 1;
    let top_rung_hits = (0..n)
        .filter(|&j| argmax[j] == top && top > 0 && values[j] >= 1e-3 * peak && peak > 0.0)
        .count();
    Ok(MaximalResult {
        values,
        argmax_rung: argmax,
        rungs,
        top_rung_hits,
    })
}

/// `P_*(v) = sup_u |P_u v|` over the ladder.
pub fn maximal_p_star(grid: &Grid1D, v: &[f64], ladder: &Ladder) -> Result<MaximalResult> {
    maximal(grid, v, ladder, Semigroup1D::Poisson)
}

/// `W_*(v) = sup_u |W_u v|` over the ladder.
pub fn maximal_w_star(grid: &Grid1D, v: &[f64], ladder: &Ladder) -> Result<MaximalResult> {
    maximal(grid, v, ladder, Semigroup1D::Heat)
}

/// Centered Hardy–Littlewood maximal function over the radii `0` and `h·2^k`
/// on a uniform grid, by exact sliding-window integrals of `|v|`.
pub fn hardy_littlewood_m(grid: &Grid1D, v: &[f64]) -> Result<Vec<f64>> {
    let h = grid
        .step()
        .ok_or_else(|| Error::precondition("hardy_littlewood_m", "grid must be uniform"))?;
    let n = grid.len();
    if v.len() != n {
        return Err(Error::precondition(
            "hardy_littlewood_m",
            "sample count does not match the grid",
        ));
    }
    let a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let mut prefix = vec![0.0; n];
    for k in 1..n {
        prefix[k] = prefix[k - 1] + 0.5 * h * (a[k - 1] + a[k]);
    }
    let lead = if grid.domain() == Domain::HalfLine {
        grid.nodes()[0] * a[0]
    } else {
        0.0
    };
    // radius → 0 limit of the continuous interpolant
    let mut out = a.clone();
    let mut s = 1usize;
    while s < 2 * n {
        let r = s as f64 * h;
        for j in 0..n {
            let hi = prefix[(j + s).min(n - 1)];
            let (lo, extra) = if j >= s {
                (prefix[j - s], 0.0)
            } else {
                let reach = r
                    - j as f64 * h
                    - if grid.domain() == Domain::HalfLine {
                        grid.nodes()[0]
                    } else {
                        0.0
                    };
                (0.0, if reach >= 0.0 { lead } else { 0.0 })
            };
            out[j] = out[j].max((hi - lo + extra) / (2.0 * r));
        }
        s *= 2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hardy_of_indicator() {
        let g = Grid1D::half_line_window(4.0, 400).unwrap();
        let h: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&x| if x <= 1.0 { 1.0 } else { 0.0 })
            .collect();
        let out = hardy_h0(&g, &h).unwrap();
        for (&x, &v) in g.nodes().iter().zip(&out) {
            let exact = if x <= 1.0 { 1.0 } else { 1.0 / x };
            assert!((v - exact).abs() < 0.01 / x, "x={x}: {v} vs {exact}");
        }
        let tail = hardy_hinf(&g, &h).unwrap();
        assert!(tail[0] > 1.0 && tail[399] == 0.0);
    }

    #[test]
    fn averaging_and_log_row_mass() {
        let g = Grid1D::half_line_window(8.0, 800).unwrap();
        let chi: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&x| if (0.5..=2.0).contains(&x) { 1.0 } else { 0.0 })
            .collect();
        let l = averaging_l(&g, &chi).unwrap();
        let i1 = g.index_of(1.0).unwrap();
        assert!((l[i1] - 1.5).abs() < 1e-12);
        let ones = vec![1.0; g.len()];
        let a = log_kernel_a(&g, &ones).unwrap();
        let mass = 1.5 + 1.5 + 0.5 * 2f64.ln();
        for x in [1.0, 2.5] {
            let i = g.index_of(x).unwrap();
            assert!((a[i] - mass).abs() < 1e-8, "x={x}: {} vs {mass}", a[i]);
        }
    }

    #[test]
    fn semigroups_preserve_mass_and_maximal_functions_dominate() {
        let g = Grid1D::uniform(-20.0, 20.0, 800, Domain::Line).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|&x| (-x * x).exp()).collect();
        let w = semigroup_apply(&g, &v, 0.5, Semigroup1D::Heat).unwrap();
        let mass = |f: &[f64]| {
            f.iter()
                .zip(g.trapezoid_weights())
                .map(|(a, b)| a * b)
                .sum::<f64>()
        };
        assert!((mass(&w) / mass(&v) - 1.0).abs() < 1e-8);
        let ladder = Ladder {
            u_min: 0.01,
            u_max: 4.0,
            ratio: 2.0,
        };
        let p = maximal_p_star(&g, &v, &ladder).unwrap();
        for u in ladder.rungs().unwrap() {
            let pu = semigroup_apply(&g, &v, u, Semigroup1D::Poisson).unwrap();
            assert!(pu.iter().zip(&p.values).all(|(a, b)| a.abs() <= *b));
        }
        let m = hardy_littlewood_m(&g, &v).unwrap();
        let c: Vec<f64> = g
            .nodes()
            .iter()
            .map(|&x| if x.abs() <= 2.0 { 1.0 } else { 0.0 })
            .collect();
        let mc = hardy_littlewood_m(&g, &c).unwrap();
        assert!(mc.iter().zip(&c).all(|(a, b)| a + 1e-12 >= *b));
        assert!(m.iter().zip(&v).all(|(a, b)| a + 1e-12 >= *b));
    }
}
