//! Space-time samples with a finite-dimensional Euclidean fiber.

use ndarray::{Array3, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::quad::SpaceTimeGrid;

/// Values `f(t_i, x_j) ∈ ℝ^d` on a [`SpaceTimeGrid`], indexed `(time, space, fiber)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: SpaceTimeGrid,
    values: Array3<f64>,
}

impl SampledField {
    pub fn zeros(grid: &SpaceTimeGrid, fiber: usize) -> Result<Self> {
        if fiber == 0 {
            return Err(Error::precondition(
                "SampledField::zeros",
                "fiber dimension must be at least 1",
            ));
        }
        Ok(SampledField {
            values: Array3::zeros((grid.nt(), grid.nx(), fiber)),
            grid: grid.clone(),
        })
    }

    pub fn from_array(grid: &SpaceTimeGrid, values: Array3<f64>) -> Result<Self> {
        let (nt, nx, d) = values.dim();
        if nt != grid.nt() || nx != grid.nx() || d == 0 {
            return Err(Error::precondition(
                "SampledField::from_array",
                format!(
                    "shape {:?} does not match grid {}×{}×d",
                    values.dim(),
                    grid.nt(),
                    grid.nx()
                ),
            ));
        }
        Ok(SampledField {
            grid: grid.clone(),
            values,
        })
    }

    /// Samples a scalar function `f(t, x)`.
    pub fn from_fn(grid: &SpaceTimeGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let t = grid.time().nodes();
        let x = grid.space().nodes();
        let values = Array3::from_shape_fn((t.len(), x.len(), 1), |(i, j, _)| f(t[i], x[j]));
        SampledField {
            grid: grid.clone(),
            values,
        }
    }

    /// Samples a vector-valued function, one component per fiber index.
    pub fn from_fn_vec(
        grid: &SpaceTimeGrid,
        fiber: usize,
        f: impl Fn(f64, f64, usize) -> f64,
    ) -> Self {
        let t = grid.time().nodes();
        let x = grid.space().nodes();
        let values = Array3::from_shape_fn((t.len(), x.len(), fiber), |(i, j, k)| f(t[i], x[j], k));
        SampledField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array3<f64> {
        &mut self.values
    }

    pub fn fiber(&self) -> usize {
        self.values.dim().2
    }

    /// The `(space, fiber)` slice at time index `i`.
    pub fn slice(&self, i: usize) -> ArrayView2<'_, f64> {
        self.values.index_axis(Axis(0), i)
    }

    /// One fiber component as a `(time, space)` array.
    pub fn component(&self, k: usize) -> ndarray::Array2<f64> {
        self.values.index_axis(Axis(2), k).to_owned()
    }

    /// Euclidean fiber norm at every node.
    pub fn pointwise_norm(&self) -> SampledField {
        let (nt, nx, _) = self.values.dim();
        let mut out = Array3::zeros((nt, nx, 1));
        for i in 0..nt {
            for j in 0..nx {
                let v: ArrayView1<f64> = self.values.slice(ndarray::s![i, j, ..]);
                out[[i, j, 0]] = v.dot(&v).sqrt();
            }
        }
        SampledField {
            grid: self.grid.clone(),
            values: out,
        }
    }

    /// Discrete `L²((0,T)×Ω)` norm with trapezoid weights in both variables.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_on(0..self.grid.nt())
    }

    /// `L²` norm restricted to a range of time slices.
    pub fn l2_norm_on(&self, slices: std::ops::Range<usize>) -> f64 {
        let wt = self.grid.time().trapezoid_weights();
        let wx = self.grid.space().trapezoid_weights();
        let mut s = 0.0;
        for i in slices {
            for (j, &w) in wx.iter().enumerate() {
                let v = self.values.slice(ndarray::s![i, j, ..]);
                s += wt[i] * w * v.dot(&v);
            }
        }
        s.sqrt()
    }

    /// Largest absolute sample.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Columns `j` on which some sample is nonzero, as a half-open range.
    pub fn spatial_support(&self) -> Option<std::ops::Range<usize>> {
        let nx = self.grid.nx();
        let nonzero = |j: usize| self.values.index_axis(Axis(1), j).iter().any(|&v| v != 0.0);
        let lo = (0..nx).find(|&j| nonzero(j))?;
        let hi = (0..nx).rev().find(|&j| nonzero(j))?;
        Some(lo..hi + 1)
    }

    /// True when the first and last `margin` time slices vanish identically.
    pub fn vanishes_at_time_ends(&self, margin: usize) -> bool {
        let nt = self.grid.nt();
        (0..margin.min(nt))
            .chain(nt.saturating_sub(margin)..nt)
            .all(|i| self.slice(i).iter().all(|&v| v == 0.0))
    }

    pub fn scaled(&self, c: f64) -> SampledField {
        SampledField {
            grid: self.grid.clone(),
            values: &self.values * c,
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &SampledField, b: f64) -> Result<SampledField> {
        if self.values.dim() != other.values.dim() {
            return Err(Error::precondition(
                "SampledField::combine",
                "shape mismatch",
            ));
        }
        Ok(SampledField {
            grid: self.grid.clone(),
            values: &self.values * a + &other.values * b,
        })
    }

    /// Difference norm relative to `reference`'s norm.
    pub fn relative_distance(&self, reference: &SampledField) -> Result<f64> {
        let d = self.combine(1.0, reference, -1.0)?;
        Ok(d.l2_norm() / reference.l2_norm())
    }

    /// Stacks scalar fields into one field with fiber dimension `parts.len()`.
    pub fn stack(parts: &[SampledField]) -> Result<SampledField> {
        let first = parts
            .first()
            .ok_or_else(|| Error::precondition("SampledField::stack", "nothing to stack"))?;
        let (nt, nx, _) = first.values.dim();
        let d: usize = parts.iter().map(|p| p.fiber()).sum();
        let mut values = Array3::zeros((nt, nx, d));
        let mut k0 = 0;
        for p in parts {
            if p.values.dim().0 != nt || p.values.dim().1 != nx {
                return Err(Error::precondition("SampledField::stack", "shape mismatch"));
            }
            for k in 0..p.fiber() {
                values
                    .index_axis_mut(Axis(2), k0 + k)
                    .assign(&p.values.index_axis(Axis(2), k));
            }
            k0 += p.fiber();
        }
        Ok(SampledField {
            grid: first.grid.clone(),
            values,
        })
    }
}

/// Smooth bump `exp(1 − 1/(1 − r²))`, `r = |x − center|/radius`, zero for `r ≥ 1`.
pub fn bump(x: f64, center: f64, radius: f64) -> f64 {
    let r = (x - center) / radius;
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// `sin(πt/T)·e^{−x²}·bump(x)`, with the bump on `[−2, 2]` for line grids and
/// on `[1/2, 5/2]` otherwise.
pub fn standard_test_field(grid: &SpaceTimeGrid) -> SampledField {
    let t_final = grid.t_final();
    let (center, radius) = if grid.space().domain() == crate::quad::Domain::Line {
        (0.0, 2.0)
    } else {
        (1.5, 1.0)
    };
    SampledField::from_fn(grid, |t, x| {
        if t <= 0.0 || t >= t_final {
            return 0.0;
        }
        (std::f64::consts::PI * t / t_final).sin() * (-x * x).exp() * bump(x, center, radius)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Grid1D;

    #[test]
    fn norm_of_separable_field() {
        let g = SpaceTimeGrid::new(1.0, 200, Grid1D::line_window(6.0, 600).unwrap()).unwrap();
        let f = SampledField::from_fn(&g, |t, x| (std::f64::consts::PI * t).sin() * (-x * x).exp());
        let exact = (0.5 * (std::f64::consts::PI / 2.0).sqrt()).sqrt();
        assert!((f.l2_norm() / exact - 1.0).abs() < 1e-4);
        assert_eq!(f.fiber(), 1);
    }

    #[test]
    fn support_detection() {
        let g = SpaceTimeGrid::new(1.0, 10, Grid1D::half_line_window(4.0, 40).unwrap()).unwrap();
        let f = SampledField::from_fn(&g, |t, x| {
            if (1.0..=2.0).contains(&x) && t > 0.0 && t < 1.0 {
                1.0
            } else {
                0.0
            }
        });
        assert_eq!(f.spatial_support(), Some(9..20));
        assert!(f.vanishes_at_time_ends(1));
    }
}
