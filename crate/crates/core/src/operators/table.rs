//! Kernel families sampled on lag tables `(τ_m, x_j, y_l)`.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{
    critical_radius, kernel_rule, poisson_bessel_piece_eval, poisson_classical,
    poisson_classical_dt, poisson_hermite_split, poisson_kernel, BesselPiece, KernelSetting,
    Variant,
};
use crate::quad::{Domain, Grid1D};

/// A family of kernels `k_τ(x, y)` together with `∂_τ k_τ(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily {
    /// The Poisson kernel of a setting.
    Poisson(KernelSetting),
    /// The Poisson kernel of a line setting evaluated at `(x, −y)`.
    Reflected(KernelSetting),
    /// The classical Poisson kernel `P_{cτ}(x − y)`.
    ScaledClassical { c: f64 },
    /// One piece of the Bessel kernel split.
    Bessel { alpha: f64, piece: BesselPiece },
    /// `P^H_τ − P_{τ/√2}` restricted to heat times below or above `ρ(x)²`.
    HermiteSplit { large_u: bool },
}

impl KernelFamily {
    /// `(k_τ(x,y), ∂_τ k_τ(x,y))`.
    pub fn eval(&self, tau: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        match *self {
            KernelFamily::Poisson(s) => poisson_kernel(&s, tau, x, y).map(|e| (e.value, e.dt)),
            KernelFamily::Reflected(s) => poisson_kernel(&s, tau, x, -y).map(|e| (e.value, e.dt)),
            KernelFamily::ScaledClassical { c } => Ok((
                poisson_classical(c * tau, x - y)?,
                c * poisson_classical_dt(c * tau, x - y),
            )),
            KernelFamily::Bessel { alpha, piece } => {
                poisson_bessel_piece_eval(piece, alpha, tau, x, y, &kernel_rule())
                    .map(|e| (e.value, e.dt))
            }
            KernelFamily::HermiteSplit { large_u } => {
                poisson_hermite_split(tau, x, y, large_u).map(|e| (e.value, e.dt))
            }
        }
    }

    /// True when `k_τ → δ_x` as `τ → 0`.
    pub fn has_identity_limit(&self) -> bool {
        matches!(
            self,
            KernelFamily::Poisson(_) | KernelFamily::ScaledClassical { .. }
        )
    }

    /// True when `k_τ(−x, −y) = k_τ(x, y)`.
    fn reflection_invariant(&self) -> bool {
        match self {
            KernelFamily::Poisson(s) | KernelFamily::Reflected(s) => {
                matches!(s.variant, Variant::Classical | Variant::Hermite)
            }
            KernelFamily::ScaledClassical { .. } | KernelFamily::HermiteSplit { .. } => true,
            KernelFamily::Bessel { .. } => false,
        }
    }

    /// True when `k_τ(x, y) = k_τ(y, x)`.
    fn symmetric(&self) -> bool {
        !matches!(self, KernelFamily::HermiteSplit { .. })
    }

    fn requires_half_line(&self) -> bool {
        match self {
            KernelFamily::Poisson(s) => s.is_half_line(),
            KernelFamily::Reflected(_) | KernelFamily::Bessel { .. } => true,
            KernelFamily::ScaledClassical { .. } | KernelFamily::HermiteSplit { .. } => false,
        }
    }

    pub fn label(&self) -> String {
        match self {
            KernelFamily::Poisson(s) => format!("poisson-{}", s.name()),
            KernelFamily::Reflected(s) => format!("reflected-{}", s.name()),
            KernelFamily::ScaledClassical { c } => format!("classical-scaled-{c}"),
            KernelFamily::Bessel { piece, .. } => format!("bessel-piece-{piece:?}"),
            KernelFamily::HermiteSplit { large_u } => {
                format!("hermite-split-{}", if *large_u { "large" } else { "small" })
            }
        }
    }
}

/// Spatial regions used to split kernels into local and global parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    All,
    /// `x/2 < y < 2x`.
    Dyadic,
    /// `|x − y| < ρ(x)`.
    Critical,
}

impl Region {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self.interval(x) {
            Some((lo, hi)) => lo < y && y < hi,
            None => false,
        }
    }

    /// The `y`-interval of the region at `x`.
    pub fn interval(&self, x: f64) -> Option<(f64, f64)> {
        match self {
            Region::All => Some((f64::NEG_INFINITY, f64::INFINITY)),
            Region::Dyadic if x > 0.0 => Some((0.5 * x, 2.0 * x)),
            Region::Dyadic => None,
            Region::Critical => {
                let r = critical_radius(x);
                Some((x - r, x + r))
            }
        }
    }
}

/// Weights in `[0, 1]` on the `(row, column)` entries of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryMask {
    rows: usize,
    cols: Range<usize>,
    weight: Vec<f64>,
}

/// Dual cells `[(y_{c−1}+y_c)/2, (y_c+y_{c+1})/2]`, the end cells mirrored.
fn dual_cells(space: &Grid1D) -> Vec<(f64, f64)> {
    let y = space.nodes();
    let n = y.len();
    (0..n)
        .map(|c| {
            let lo = if c > 0 {
                0.5 * (y[c - 1] + y[c])
            } else if n > 1 {
                y[0] - 0.5 * (y[1] - y[0])
            } else {
                y[0]
            };
            let hi = if c + 1 < n {
                0.5 * (y[c] + y[c + 1])
            } else if n > 1 {
                y[c] + 0.5 * (y[c] - y[c - 1])
            } else {
                y[c]
            };
            (lo, hi)
        })
        .collect()
}

impl EntryMask {
    /// The fraction of each column's dual cell lying inside the region at row `x_j`.
    pub fn from_region(region: Region, space: &Grid1D, cols: Range<usize>) -> Self {
        EntryMask::from_intervals(space, cols, |x| region.interval(x))
    }

    /// The fraction of each column's dual cell inside the open interval `interval(x_j)`.
    pub fn from_intervals(
        space: &Grid1D,
        cols: Range<usize>,
        interval: impl Fn(f64) -> Option<(f64, f64)>,
    ) -> Self {
        let x = space.nodes();
        let cells = dual_cells(space);
        let weight = (0..x.len())
            .flat_map(|j| cols.clone().map(move |c| (j, c)))
            .map(|(j, c)| {
                let (a, b) = cells[c];
                match interval(x[j]) {
                    Some((lo, hi)) if b <= a => f64::from(u8::from(lo < x[c] && x[c] < hi)),
                    Some((lo, hi)) => ((b.min(hi) - a.max(lo)) / (b - a)).clamp(0.0, 1.0),
                    None => 0.0,
                }
            })
            .collect();
        EntryMask {
            rows: x.len(),
            cols,
            weight,
        }
    }

    /// A 0/1 mask from a predicate on `(row, column)`.
    pub fn from_fn(space: &Grid1D, cols: Range<usize>, f: impl Fn(usize, usize) -> bool) -> Self {
        let rows = space.len();
        let weight = (0..rows)
            .flat_map(|j| cols.clone().map(move |c| (j, c)))
            .map(|(j, c)| if f(j, c) { 1.0 } else { 0.0 })
            .collect();
        EntryMask { rows, cols, weight }
    }

    /// `1 − w` entrywise.
    pub fn complement(&self) -> Self {
        EntryMask {
            rows: self.rows,
            cols: self.cols.clone(),
            weight: self.weight.iter().map(|w| 1.0 - w).collect(),
        }
    }

    /// `w_self·(1 − w_other)` entrywise.
    pub fn minus(&self, other: &EntryMask) -> Result<Self> {
        self.check_shape(other)?;
        let weight = self
            .weight
            .iter()
            .zip(&other.weight)
            .map(|(&a, &b)| a * (1.0 - b))
            .collect();
        Ok(EntryMask {
            rows: self.rows,
            cols: self.cols.clone(),
            weight,
        })
    }

    fn check_shape(&self, other: &EntryMask) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::precondition("EntryMask", "mask shapes differ"));
        }
        Ok(())
    }

    /// Weight of row `j` and grid column `c`.
    #[inline]
    pub fn weight(&self, j: usize, c: usize) -> f64 {
        self.weight[j * self.cols.len() + (c - self.cols.start)]
    }

    /// Whether row `j` and grid column `c` carry positive weight.
    #[inline]
    pub fn get(&self, j: usize, c: usize) -> bool {
        self.weight(j, c) > 0.0
    }

    /// Number of entries with positive weight.
    pub fn count(&self) -> usize {
        self.weight.iter().filter(|&&w| w > 0.0).count()
    }

    pub fn cols(&self) -> Range<usize> {
        self.cols.clone()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
}

/// `k_{mh}(x_j, y_c)·w_c` and `∂_τ k_{mh}(x_j, y_c)·w_c` for lags `m = 1..=lags`,
/// every row `j` of the spatial grid and the columns `c ∈ cols`; `w` are the
/// trapezoid weights of the spatial grid.
#[derive(Debug, Clone)]
pub struct KernelTable {
    family: KernelFamily,
    space: Grid1D,
    cols: Range<usize>,
    lags: usize,
    h: f64,
    value: Vec<f64>,
    dt: Vec<f64>,
    identity: Vec<f64>,
    evaluations: usize,
}

impl KernelTable {
    /// Evaluates the family on all entries kept by `only` (all entries when `None`).
    pub fn build(
        family: KernelFamily,
        space: &Grid1D,
        cols: Range<usize>,
        h: f64,
        lags: usize,
        only: Option<&EntryMask>,
    ) -> Result<Self> {
        if cols.is_empty() || cols.end > space.len() {
            return Err(Error::precondition(
                "KernelTable::build",
                "column range outside the grid",
            ));
        }
        if family.requires_half_line() && space.domain() != Domain::HalfLine {
            return Err(Error::precondition(
                "KernelTable::build",
                format!("{} needs a half-line grid", family.label()),
            ));
        }
        if !(h > 0.0) || lags == 0 {
            return Err(Error::precondition(
                "KernelTable::build",
                "need h > 0 and at least one lag",
            ));
        }
        if let Some(m) = only {
            if m.rows != space.len() || m.cols != cols {
                return Err(Error::precondition(
                    "KernelTable::build",
                    "mask shape does not match the table",
                ));
            }
        }
        let x = space.nodes();
        let n = x.len();
        let mirrored = family.reflection_invariant()
            && space.domain() == Domain::Line
            && (0..n).all(|k| (x[k] + x[n - 1 - k]).abs() <= 1e-12 * (1.0 + x[k].abs()));
        let symmetric = family.symmetric();
        let order = |j: usize, c: usize| {
            if symmetric {
                (j.min(c), j.max(c))
            } else {
                (j, c)
            }
        };
        let canonical = |j: usize, c: usize| {
            let mut best = order(j, c);
            if mirrored {
                best = best.min(order(n - 1 - j, n - 1 - c));
            }
            best
        };
        let kept = |j: usize, c: usize| only.is_none_or(|m| m.get(j, c));
        let share = |j: usize, c: usize| only.map_or(1.0, |m| m.weight(j, c));
        let mut keys: Vec<(usize, usize)> = (0..n)
            .flat_map(|j| cols.clone().map(move |c| (j, c)))
            .filter(|&(j, c)| kept(j, c))
            .map(|(j, c)| canonical(j, c))
            .collect();
        keys.sort_unstable();
        keys.dedup();

        let samples: Vec<Vec<(f64, f64)>> = keys
            .par_iter()
            .map(|&(a, b)| {
                (1..=lags)
                    .map(|m| family.eval(m as f64 * h, x[a], x[b]))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        let w = space.trapezoid_weights();
        let nc = cols.len();
        let mut value = vec![0.0; lags * n * nc];
        let mut dt = vec![0.0; lags * n * nc];
        for j in 0..n {
            for c in cols.clone() {
                if !kept(j, c) {
                    continue;
                }
                let k = keys.binary_search(&canonical(j, c)).expect("key present");
                let wc = w[c] * share(j, c);
                for m in 0..lags {
                    let idx = (m * n + j) * nc + (c - cols.start);
                    value[idx] = samples[k][m].0 * wc;
                    dt[idx] = samples[k][m].1 * wc;
                }
            }
        }
        let identity = (0..n)
            .map(|j| {
                if family.has_identity_limit() && cols.contains(&j) && kept(j, j) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Ok(KernelTable {
            family,
            space: space.clone(),
            cols,
            lags,
            h,
            value,
            dt,
            identity,
            evaluations: keys.len() * lags,
        })
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn space(&self) -> &Grid1D {
        &self.space
    }

    pub fn cols(&self) -> Range<usize> {
        self.cols.clone()
    }

    pub fn lags(&self) -> usize {
        self.lags
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    /// Number of distinct kernel evaluations performed.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Weighted values of lag `m ≥ 1` as a row-major `rows × cols` slice.
    pub(crate) fn value_lag(&self, m: usize) -> &[f64] {
        let s = self.space.len() * self.cols.len();
        &self.value[(m - 1) * s..m * s]
    }

    /// Weighted `τ`-derivatives of lag `m ≥ 1`.
    pub(crate) fn dt_lag(&self, m: usize) -> &[f64] {
        let s = self.space.len() * self.cols.len();
        &self.dt[(m - 1) * s..m * s]
    }

    /// Table of `self − other` on the same layout.
    pub fn difference(&self, other: &KernelTable) -> Result<KernelTable> {
        self.combine(1.0, other, -1.0)
    }

    /// Table of `a·self + b·other` on the same layout.
    pub fn combine(&self, a: f64, other: &KernelTable, b: f64) -> Result<KernelTable> {
        if self.space != other.space
            || self.cols != other.cols
            || self.lags != other.lags
            || self.h != other.h
        {
            return Err(Error::precondition(
                "KernelTable::combine",
                "tables have different layouts",
            ));
        }
        let mix = |p: &[f64], q: &[f64]| {
            p.iter()
                .zip(q)
                .map(|(u, v)| a * u + b * v)
                .collect::<Vec<_>>()
        };
        Ok(KernelTable {
            family: self.family,
            space: self.space.clone(),
            cols: self.cols.clone(),
            lags: self.lags,
            h: self.h,
            value: mix(&self.value, &other.value),
            dt: mix(&self.dt, &other.dt),
            identity: mix(&self.identity, &other.identity),
            evaluations: self.evaluations + other.evaluations,
        })
    }

    /// The table with every entry scaled by its mask weight.
    pub fn masked(&self, mask: &EntryMask) -> Result<KernelTable> {
        let n = self.space.len();
        if mask.rows != n || mask.cols != self.cols {
            return Err(Error::precondition(
                "KernelTable::masked",
                "mask shape does not match the table",
            ));
        }
        let mut out = self.clone();
        let s = n * self.cols.len();
        for (idx, &w) in mask.weight.iter().enumerate() {
            if w != 1.0 {
                for m in 0..self.lags {
                    out.value[m * s + idx] *= w;
                    out.dt[m * s + idx] *= w;
                }
            }
        }
        for j in 0..n {
            if self.cols.contains(&j) {
                out.identity[j] *= mask.weight(j, j);
            }
        }
        Ok(out)
    }

    /// Coefficient of the `τ → 0` identity limit in row `j`.
    pub(crate) fn identity_coefficient(&self, j: usize) -> f64 {
        self.identity[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_entries_agree_with_direct_evaluation() {
        let g = Grid1D::line_window(2.0, 8).unwrap();
        let t = KernelTable::build(
            KernelFamily::Poisson(KernelSetting::hermite()),
            &g,
            4..13,
            0.25,
            2,
            None,
        )
        .unwrap();
        let w = g.trapezoid_weights();
        let x = g.nodes();
        for j in [0, 3, 8, 16] {
            for c in 4..13 {
                let (v, d) = KernelFamily::Poisson(KernelSetting::hermite())
                    .eval(0.5, x[j], x[c])
                    .unwrap();
                let idx = j * 9 + (c - 4);
                assert!((t.value_lag(2)[idx] - v * w[c]).abs() < 1e-13);
                assert!((t.dt_lag(2)[idx] - d * w[c]).abs() < 1e-13);
            }
        }
        assert!(t.evaluations() < 2 * 17 * 9);
    }

    #[test]
    fn masks_partition() {
        let g = Grid1D::half_line_window(4.0, 16).unwrap();
        let loc = EntryMask::from_region(Region::Dyadic, &g, 2..10);
        let glob = loc.complement();
        for j in 0..16 {
            for c in 2..10 {
                assert_eq!(loc.weight(j, c) + glob.weight(j, c), 1.0);
            }
        }
        assert!(loc.get(5, 5) && !loc.get(15, 2));
        // y = 2x on a node gets half its cell
        assert_eq!(loc.weight(3, 7), 0.5);
    }
}
