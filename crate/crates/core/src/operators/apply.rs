//! Nyström application of `K f(t) = ∫_0^t ∂_t T_{t−s} f(s) ds` and of the
//! mild solution `u(t) = ∫_0^t T_{t−s} f(s) ds` over a [`KernelTable`].
//!
//! With `δ = q·h` the far range `τ ∈ [δ, t]` uses Gregory weights on the lags
//! of the table. On `τ ∈ (0, δ)` the integrand is expanded as
//! `f(t−τ) = f(t) − τ ḟ(t) + τ² f̈(t)/2 + O(τ³)`, and integrating by parts gives
//! `(Q_δ − E) f − (δQ_δ − S₀) ḟ + (δ²Q_δ − 2S₁) f̈/2` where `Q_δ` is the kernel
//! at lag `q`, `E` its `τ → 0` limit and `S_k = ∫_0^δ τ^k Q_τ dτ` by Simpson's
//! rule on the lags.

use ndarray::Array3;
use rayon::prelude::*;

use super::table::KernelTable;
use crate::error::{Error, Result};
use crate::field::SampledField;

/// Default tail width in time steps.
pub const DEFAULT_DELTA_STEPS: usize = 2;

fn check_compatible(
    func: &'static str,
    table: &KernelTable,
    f: &SampledField,
    q: usize,
) -> Result<()> {
    let g = f.grid();
    if g.space() != table.space() {
        return Err(Error::precondition(
            func,
            "field and table use different spatial grids",
        ));
    }
    if (g.dt() - table.step()).abs() > 1e-12 * table.step() {
        return Err(Error::precondition(
            func,
            format!(
                "time step {} differs from table step {}",
                g.dt(),
                table.step()
            ),
        ));
    }
    if g.nt() - 1 > table.lags() {
        return Err(Error::precondition(
            func,
            format!(
                "{} time steps exceed {} table lags",
                g.nt() - 1,
                table.lags()
            ),
        ));
    }
    if q == 0 {
        return Err(Error::precondition(
            func,
            "tail width must be at least one step",
        ));
    }
    let cols = table.cols();
    if let Some(s) = f.spatial_support() {
        if s.start < cols.start || s.end > cols.end {
            return Err(Error::precondition(
                func,
                format!("field support {s:?} is not inside the table columns {cols:?}"),
            ));
        }
    }
    Ok(())
}

/// `out[j, k] += a · Σ_c K[j, c] src[c, k]` over the table columns.
fn accumulate(
    kernel: &[f64],
    cols: std::ops::Range<usize>,
    src: &[f64],
    d: usize,
    a: f64,
    out: &mut [f64],
) {
    let nc = cols.len();
    let s = &src[cols.start * d..cols.end * d];
    for (j, row) in kernel.chunks_exact(nc).enumerate() {
        let o = &mut out[j * d..(j + 1) * d];
        if d == 1 {
            let acc: f64 = row.iter().zip(s).map(|(k, v)| k * v).sum();
            o[0] += a * acc;
        } else {
            for (l, &k) in row.iter().enumerate() {
                if k != 0.0 {
                    for (ok, sv) in o.iter_mut().zip(&s[l * d..(l + 1) * d]) {
                        *ok += a * k * sv;
                    }
                }
            }
        }
    }
}

/// Time derivative: fourth-order central on interior slices, second order
/// next to the ends.
pub fn time_derivative(f: &SampledField) -> SampledField {
    let v = f.values();
    let (nt, nx, d) = v.dim();
    let h = f.grid().dt();
    let mut out = Array3::zeros((nt, nx, d));
    for i in 0..nt {
        for j in 0..nx {
            for k in 0..d {
                let at = |ii: usize| v[[ii, j, k]];
                out[[i, j, k]] = if nt < 3 {
                    if nt == 2 {
                        (at(1) - at(0)) / h
                    } else {
                        0.0
                    }
                } else if i >= 2 && i + 2 < nt {
                    (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h)
                } else if i == 0 {
                    (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
                } else if i == nt - 1 {
                    (3.0 * at(i) - 4.0 * at(i - 1) + at(i - 2)) / (2.0 * h)
                } else {
                    (at(i + 1) - at(i - 1)) / (2.0 * h)
                };
            }
        }
    }
    SampledField::from_array(f.grid(), out).expect("same shape")
}

/// Weights of a rule on the uniform nodes `0, h, …, n·h`.
fn uniform_rule(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n + 1];
    match n {
        0 => w[0] = 0.0,
        1 => w = vec![0.5 * h, 0.5 * h],
        2 => w = vec![h / 3.0, 4.0 * h / 3.0, h / 3.0],
        3 => w = vec![3.0 * h / 8.0, 9.0 * h / 8.0, 9.0 * h / 8.0, 3.0 * h / 8.0],
        4 => {
            w = [1.0, 4.0, 2.0, 4.0, 1.0]
                .iter()
                .map(|c| c * h / 3.0)
                .collect()
        }
        _ => {
            for (k, c) in [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0].into_iter().enumerate() {
                w[k] = c * h;
                w[n - k] = c * h;
            }
        }
    }
    w
}

/// `(lag, weight)` pairs for the far range `τ ∈ [q_i h, i h]`.
fn far_weights(q: usize, i: usize, h: f64) -> Vec<(usize, f64)> {
    let qi = q.min(i);
    uniform_rule(i - qi, h)
        .into_iter()
        .enumerate()
        .map(|(k, w)| (qi + k, w))
        .collect()
}

/// Weights over lags `0..=q` of `∫_0^{qh} τ^k g(τ) dτ`.
fn moment_weights(q: usize, h: f64, k: i32) -> Vec<f64> {
    uniform_rule(q, h)
        .iter()
        .enumerate()
        .map(|(m, w)| w * (m as f64 * h).powi(k))
        .collect()
}

/// Second time derivative by central differences.
fn second_time_derivative(f: &SampledField) -> SampledField {
    let v = f.values();
    let (nt, nx, d) = v.dim();
    let h = f.grid().dt();
    let mut out = Array3::zeros((nt, nx, d));
    if nt >= 3 {
        for i in 0..nt {
            let c = i.clamp(1, nt - 2);
            for j in 0..nx {
                for k in 0..d {
                    out[[i, j, k]] =
                        (v[[c - 1, j, k]] - 2.0 * v[[c, j, k]] + v[[c + 1, j, k]]) / (h * h);
                }
            }
        }
    }
    SampledField::from_array(f.grid(), out).expect("same shape")
}

fn slices(f: &SampledField) -> Vec<Vec<f64>> {
    let v = f.values();
    (0..v.dim().0)
        .map(|i| v.index_axis(ndarray::Axis(0), i).iter().copied().collect())
        .collect()
}

fn assemble(f: &SampledField, rows: Vec<Vec<f64>>) -> SampledField {
    let (nt, nx, d) = f.values().dim();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    SampledField::from_array(
        f.grid(),
        Array3::from_shape_vec((nt, nx, d), flat).expect("shape"),
    )
    .expect("grid")
}

/// `K f` with a tail of `q` time steps.
pub fn apply_k(table: &KernelTable, f: &SampledField, q: usize) -> Result<SampledField> {
    check_compatible("apply_k", table, f, q)?;
    let nt = f.grid().nt();
    let nx = f.grid().nx();
    let d = f.fiber();
    let h = table.step();
    let cols = table.cols();
    let fs = slices(f);
    let fd = slices(&time_derivative(f));
    let fdd = slices(&second_time_derivative(f));
    let rows: Vec<Vec<f64>> = (0..nt)
        .into_par_iter()
        .map(|i| {
            let mut out = vec![0.0; nx * d];
            if i == 0 {
                return out;
            }
            for (m, w) in far_weights(q, i, h) {
                if w != 0.0 {
                    accumulate(table.dt_lag(m), cols.clone(), &fs[i - m], d, w, &mut out);
                }
            }
            let qi = q.min(i);
            let delta = qi as f64 * h;
            let s0 = moment_weights(qi, h, 0);
            let s1 = moment_weights(qi, h, 1);
            accumulate(table.value_lag(qi), cols.clone(), &fs[i], d, 1.0, &mut out);
            accumulate(
                table.value_lag(qi),
                cols.clone(),
                &fd[i],
                d,
                -delta,
                &mut out,
            );
            accumulate(
                table.value_lag(qi),
                cols.clone(),
                &fdd[i],
                d,
                0.5 * delta * delta,
                &mut out,
            );
            for m in 1..=qi {
                accumulate(table.value_lag(m), cols.clone(), &fd[i], d, s0[m], &mut out);
                accumulate(
                    table.value_lag(m),
                    cols.clone(),
                    &fdd[i],
                    d,
                    -s1[m],
                    &mut out,
                );
            }
            for j in 0..nx {
                let e = table.identity_coefficient(j);
                if e != 0.0 {
                    for k in 0..d {
                        let jk = j * d + k;
                        out[jk] += e * (-fs[i][jk] + s0[0] * fd[i][jk]);
                    }
                }
            }
            out
        })
        .collect();
    Ok(assemble(f, rows))
}

/// Mild solution `u(t) = ∫_0^t T_{t−s} f(s) ds` with a tail of `q` steps.
pub fn mild_solution(table: &KernelTable, f: &SampledField, q: usize) -> Result<SampledField> {
    check_compatible("mild_solution", table, f, q)?;
    if !table.family().has_identity_limit() {
        return Err(Error::precondition(
            "mild_solution",
            "the kernel family is not a semigroup",
        ));
    }
    let nt = f.grid().nt();
    let nx = f.grid().nx();
    let d = f.fiber();
    let h = table.step();
    let cols = table.cols();
    let fs = slices(f);
    let rows: Vec<Vec<f64>> = (0..nt)
        .into_par_iter()
        .map(|i| {
            let mut out = vec![0.0; nx * d];
            if i == 0 {
                return out;
            }
            let qi = q.min(i);
            for (m, w) in far_weights(q, i, h) {
                if w != 0.0 {
                    accumulate(table.value_lag(m), cols.clone(), &fs[i - m], d, w, &mut out);
                }
            }
            let s0 = moment_weights(qi, h, 0);
            for m in 1..=qi {
                accumulate(
                    table.value_lag(m),
                    cols.clone(),
                    &fs[i - m],
                    d,
                    s0[m],
                    &mut out,
                );
            }
            for j in 0..nx {
                let e = table.identity_coefficient(j);
                for k in 0..d {
                    out[j * d + k] += s0[0] * e * fs[i][j * d + k];
                }
            }
            out
        })
        .collect();
    Ok(assemble(f, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSetting;
    use crate::operators::table::KernelFamily;
    use crate::quad::{Grid1D, SpaceTimeGrid};

    fn bump(x: f64, c: f64, r: f64) -> f64 {
        let z = (x - c) / r;
        if z.abs() < 1.0 {
            (-1.0 / (1.0 - z * z)).exp()
        } else {
            0.0
        }
    }

    #[test]
    fn derivative_of_mild_solution_is_k_plus_f() {
        let space = Grid1D::line_window(4.0, 32).unwrap();
        let grid = SpaceTimeGrid::new(1.0, 8, space.clone()).unwrap();
        let f = SampledField::from_fn(&grid, |t, x| {
            (std::f64::consts::PI * t).sin() * bump(x, 0.0, 1.5)
        });
        let cols = f.spatial_support().unwrap();
        let table = KernelTable::build(
            KernelFamily::Poisson(KernelSetting::classical()),
            &space,
            cols,
            0.125,
            8,
            None,
        )
        .unwrap();
        let kf = apply_k(&table, &f, 2).unwrap();
        let u = mild_solution(&table, &f, 2).unwrap();
        let du = time_derivative(&u);
        let lhs = du.combine(1.0, &f, -1.0).unwrap();
        let r = lhs.combine(1.0, &kf, -1.0).unwrap();
        let rel = r.l2_norm_on(2..7) / kf.l2_norm_on(2..7);
        assert!(rel < 0.1, "relative defect {rel}");
    }

    #[test]
    fn support_outside_columns_is_rejected() {
        let space = Grid1D::line_window(2.0, 8).unwrap();
        let grid = SpaceTimeGrid::new(1.0, 4, space.clone()).unwrap();
        let f = SampledField::from_fn(&grid, |t, x| t * (1.0 - t) * (x + 2.0));
        let table = KernelTable::build(
            KernelFamily::Poisson(KernelSetting::classical()),
            &space,
            4..12,
            0.25,
            4,
            None,
        )
        .unwrap();
        assert!(matches!(
            apply_k(&table, &f, 2),
            Err(Error::Precondition { .. })
        ));
    }
}
