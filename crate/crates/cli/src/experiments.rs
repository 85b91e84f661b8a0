use std::collections::BTreeMap;

use maxreg_core::covering::build_covering;
use maxreg_core::kernels::{heat_kernel, poisson_kernel, poisson_via_subordination, KernelSetting};
use maxreg_core::operators::estimates::{estimate_ratio_supremum, record};
use maxreg_core::regularity_lab::{
    horizon_doubling, regularity_sweep, test_family, RegularitySpec,
};
use maxreg_core::spectral_oracle::{
    hankel_poisson_kernel, hermite_heat_series, hermite_poisson_series, laguerre_heat_series,
    laguerre_poisson_series, SeriesValue, SERIES_K_MAX,
};
use maxreg_core::transference::{
    conjugation_sweep, isometry_check, ChartEntry, ChartName, SmoothBumps, ISOMETRY_STEP,
};
use maxreg_core::Result;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, KernelKind, Kind};
use crate::{Check, Outcome, Status, Table};

/// Absolute truncation target of the spectral series.
const SERIES_TOL: f64 = 1e-13;

struct Output {
    checks: Vec<Check>,
    constants: BTreeMap<String, f64>,
    table: Table,
    artifact: Option<Value>,
}

impl Output {
    fn new(table: Table) -> Self {
        Output {
            checks: Vec::new(),
            constants: BTreeMap::new(),
            table,
            artifact: None,
        }
    }

    fn constant(&mut self, name: &str, v: f64) {
        self.constants.insert(name.to_string(), v);
    }
}

/// Runs one validated experiment; failures are recorded in the outcome.
pub fn run_experiment(index: usize, e: &ExperimentConfig, seed: u64) -> Outcome {
    let kind = e.kind();
    let result = match kind {
        Kind::KernelEval => kernel_eval(e),
        Kind::OracleCompare => oracle_compare(e),
        Kind::EstimateSweep => estimate_sweep(e),
        Kind::RegularitySweep => regularity(e, seed),
        Kind::TransferCheck => transfer_check(e, seed),
        Kind::CoveringBuild => covering(e),
    };
    match result {
        Ok(o) => Outcome {
            index,
            kind,
            status: Status::Ok,
            error: None,
            checks: o.checks,
            constants: o.constants,
            table: o.table,
            artifact: o.artifact,
        },
        Err(err) => Outcome {
            index,
            kind,
            status: if err.is_numerical() {
                Status::NonConvergence
            } else {
                Status::Error
            },
            error: Some(err.to_string()),
            checks: Vec::new(),
            constants: BTreeMap::new(),
            table: Table::default(),
            artifact: None,
        },
    }
}

fn kernel_eval(e: &ExperimentConfig) -> Result<Output> {
    let s = e.kernel_setting()?;
    let kind = e.kernel.unwrap_or_default();
    let points = e
        .points
        .clone()
        .unwrap_or_else(|| vec![[0.5, 0.3, 1.2], [1.0, 1.0, 1.0], [2.0, 0.5, 2.0]]);
    let mut out = Output::new(Table::new(&["t", "x", "y", "value", "dt", "method"]));
    let mut non_finite = 0usize;
    for [t, x, y] in points {
        let (value, dt, method) = match kind {
            KernelKind::Heat => (heat_kernel(&s, t, x, y)?, None, "closed-form".to_string()),
            KernelKind::Poisson => {
                let k = poisson_kernel(&s, t, x, y)?;
                let m = serde_json::to_value(k.provenance)
                    .ok()
                    .and_then(|v| v["method"].as_str().map(String::from));
                (k.value, Some(k.dt), m.unwrap_or_default())
            }
        };
        non_finite += usize::from(!value.is_finite() || dt.is_some_and(|d| !d.is_finite()));
        out.table.rows.push(vec![
            json!(t),
            json!(x),
            json!(y),
            json!(value),
            json!(dt),
            json!(method),
        ]);
    }
    out.checks
        .push(Check::at_most("non_finite_values", non_finite as f64, 0.0));
    Ok(out)
}

/// Doubles the number of terms until the truncation bound is below [`SERIES_TOL`].
fn converged_series(series: impl Fn(usize) -> Result<SeriesValue>) -> Result<SeriesValue> {
    let mut n = 32;
    loop {
        let v = series(n)?;
        if v.truncation_bound <= SERIES_TOL || n > SERIES_K_MAX {
            v.require(SERIES_TOL)?;
            return Ok(v);
        }
        n = (2 * n).min(SERIES_K_MAX + 1);
    }
}

type Oracle<'a> = Box<dyn Fn(f64, f64, f64) -> Result<(f64, f64)> + 'a>;

/// Denominator floor of the oracle relative error, as a fraction of the peak value.
pub const RELATIVE_FLOOR: f64 = 1e-8;

fn oracle_compare(e: &ExperimentConfig) -> Result<Output> {
    let s = e.kernel_setting()?;
    let line = [-1.5, 0.0, 0.7, 2.0];
    let half = [0.3, 1.0, 2.0];
    let alpha = s.alpha().unwrap_or(0.0);
    // (kernel, times, computed, oracle → (value, truncation bound))
    let cases: Vec<(&str, Vec<f64>, &[f64], Oracle)> = match s.name() {
        "hermite" => vec![
            (
                "heat",
                vec![0.1, 0.5, 1.0, 2.0],
                &line,
                Box::new(|t, x, y| {
                    let v = converged_series(|n| hermite_heat_series(t, x, y, n))?;
                    Ok((v.value, v.truncation_bound))
                }),
            ),
            (
                "poisson",
                vec![0.5, 1.0, 2.0],
                &line,
                Box::new(|t, x, y| {
                    let v = converged_series(|n| hermite_poisson_series(t, x, y, n))?;
                    Ok((v.value, v.truncation_bound))
                }),
            ),
        ],
        "laguerre" => vec![
            (
                "heat",
                vec![0.2, 0.5, 1.0, 2.0],
                &half,
                Box::new(move |t, x, y| {
                    let v = converged_series(|n| laguerre_heat_series(alpha, t, x, y, n))?;
                    Ok((v.value, v.truncation_bound))
                }),
            ),
            (
                "poisson",
                vec![0.5, 1.0, 2.0],
                &half,
                Box::new(move |t, x, y| {
                    let v = converged_series(|n| laguerre_poisson_series(alpha, t, x, y, n))?;
                    Ok((v.value, v.truncation_bound))
                }),
            ),
        ],
        "bessel" => vec![(
            "poisson",
            vec![0.2, 0.5, 1.0],
            &half,
            Box::new(move |t, x, y| Ok((hankel_poisson_kernel(alpha, t, x, y)?, 0.0))),
        )],
        _ => vec![(
            "poisson",
            vec![0.2, 0.5, 1.0],
            &line,
            Box::new(|t, x, y| {
                Ok((
                    poisson_via_subordination(&KernelSetting::classical(), t, x, y)?.value,
                    0.0,
                ))
            }),
        )],
    };
    let cases: Vec<_> = match e.t_range {
        Some([lo, hi]) => {
            let times: Vec<f64> = (0..4)
                .map(|i| lo * (hi / lo).powf(i as f64 / 3.0))
                .collect();
            cases
                .into_iter()
                .map(|(k, _, xs, o)| (k, times.clone(), xs, o))
                .collect()
        }
        None => cases,
    };
    let default_tol = match s.name() {
        "bessel" => 1e-5,
        "classical" => 1e-9,
        _ => 1e-7,
    };
    let tol = e.tolerance.unwrap_or(default_tol);
    let mut out = Output::new(Table::new(&[
        "kernel",
        "t",
        "x",
        "y",
        "value",
        "oracle",
        "rel_error",
        "truncation_bound",
    ]));
    let mut worst = 0.0f64;
    for (kernel, times, xs, oracle) in &cases {
        for &t in times {
            let mut rows = Vec::new();
            for &x in *xs {
                for &y in *xs {
                    let value = match *kernel {
                        "heat" => heat_kernel(&s, t, x, y)?,
                        _ => poisson_kernel(&s, t, x, y)?.value,
                    };
                    let (reference, bound) = oracle(t, x, y)?;
                    rows.push((x, y, value, reference, bound));
                }
            }
            // Off-diagonal values far below round-off of the series are compared
            // against a floor tied to the largest value at this time.
            let peak = rows.iter().fold(0.0f64, |m, r| m.max(r.3.abs()));
            let floor = RELATIVE_FLOOR * peak;
            for (x, y, value, reference, bound) in rows {
                let rel = (value - reference).abs() / reference.abs().max(floor);
                worst = worst.max(rel);
                out.table.rows.push(vec![
                    json!(kernel),
                    json!(t),
                    json!(x),
                    json!(y),
                    json!(value),
                    json!(reference),
                    json!(rel),
                    json!(bound),
                ]);
            }
        }
    }
    out.constant("max_rel_error", worst);
    out.checks.push(Check::at_most("max_rel_error", worst, tol));
    Ok(out)
}

fn estimate_sweep(e: &ExperimentConfig) -> Result<Output> {
    let id = e.record.as_deref().unwrap_or_default();
    let r = record(id)?;
    let mut spec = r.default_spec;
    spec.x_max = e.x_max.unwrap_or(spec.x_max);
    spec.t_max = e.t_final.unwrap_or(spec.t_max);
    spec.h0 = e.h0.unwrap_or(spec.h0);
    spec.levels = e.levels.unwrap_or(spec.levels);
    let rep = estimate_ratio_supremum(&r, e.alpha, &spec)?;
    let mut out = Output::new(Table::new(&[
        "level",
        "h_space",
        "h_time",
        "sup_ratio",
        "argmax_t",
        "argmax_x",
        "argmax_y",
    ]));
    for l in &rep.levels {
        out.table.rows.push(vec![
            json!(l.level),
            json!(l.h_space),
            json!(l.h_time),
            json!(l.sup_ratio),
            json!(l.argmax_t),
            json!(l.argmax_x),
            json!(l.argmax_y),
        ]);
    }
    let finest = rep.levels.last().map_or(f64::NAN, |l| l.sup_ratio);
    out.constant("sup_ratio", finest);
    out.constant("max_growth", rep.max_growth);
    out.checks.push(Check::at_most(
        "max_growth",
        rep.max_growth,
        e.tolerance.unwrap_or(0.10),
    ));
    out.checks.push(Check::at_most(
        "non_finite_ratios",
        rep.levels
            .iter()
            .filter(|l| !l.sup_ratio.is_finite())
            .count() as f64,
        0.0,
    ));
    Ok(out)
}

/// Kf = u′ − f tolerance at the finest level.
const CONSISTENCY_TOL: f64 = 1e-2;

fn regularity(e: &ExperimentConfig, seed: u64) -> Result<Output> {
    let s = e.kernel_setting()?;
    let d = RegularitySpec::default();
    let spec = RegularitySpec {
        x_max: e.x_max.unwrap_or(d.x_max),
        t_final: e.t_final.unwrap_or(d.t_final),
        h0: e.h0.unwrap_or(d.h0),
        levels: e.levels.unwrap_or(d.levels),
    };
    let family = test_family(&s, seed, e.random_fields.unwrap_or(0));
    let rep = regularity_sweep(&s, &family, &spec)?;
    let tol = e.tolerance.unwrap_or(0.05);
    let mut out = Output::new(Table::new(&[
        "level",
        "h_t",
        "h_x",
        "ratio_K",
        "ratio_regularity",
        "residual_ode",
    ]));
    for l in &rep.levels {
        out.table.rows.push(vec![
            json!(l.level),
            json!(l.h_t),
            json!(l.h_x),
            json!(l.ratio_k),
            json!(l.ratio_regularity),
            json!(l.residual_ode),
        ]);
    }
    let fin = rep.finest();
    out.constant("ratio_K", fin.ratio_k);
    out.constant("ratio_regularity", fin.ratio_regularity);
    out.constant("consistency", fin.consistency);
    out.constant("delta_sensitivity", fin.delta_sensitivity);
    out.checks
        .push(Check::at_most("ratio_K_change", rep.k_change, tol));
    out.checks.push(Check::at_most(
        "ratio_regularity_change",
        rep.regularity_change,
        tol,
    ));
    out.checks.push(Check::at_most(
        "consistency",
        fin.consistency,
        CONSISTENCY_TOL,
    ));
    if e.horizon.unwrap_or(false) {
        let base = RegularitySpec {
            t_final: 4.0,
            levels: 1,
            ..spec
        };
        let h = horizon_doubling(&s, &family, &base, 0)?;
        out.constant("horizon_growth", h.growth());
        out.checks
            .push(Check::at_most("horizon_growth", h.growth(), tol));
    }
    Ok(out)
}

fn transfer_check(e: &ExperimentConfig, seed: u64) -> Result<Output> {
    let name = ChartName::from_label(e.entry.as_deref().unwrap_or_default())?;
    let entry = ChartEntry::new(name, e.alpha.unwrap_or(0.8))?;
    let g = SmoothBumps::for_entry(&entry, seed);
    let iso = isometry_check(&entry, &g, ISOMETRY_STEP)?;
    let rep = conjugation_sweep(&entry, &g, e.h0.unwrap_or(0.01), e.levels.unwrap_or(3))?;
    let mut out = Output::new(Table::new(&[
        "level",
        "h",
        "residual",
        "stencil_error",
        "interpolation_error",
        "chart_residual",
        "order",
    ]));
    for (i, l) in rep.levels.iter().enumerate() {
        let order = i.checked_sub(1).map(|k| rep.orders[k]);
        out.table.rows.push(vec![
            json!(i),
            json!(l.h),
            json!(l.residual),
            json!(l.stencil_error),
            json!(l.interpolation_error),
            json!(l.chart_residual),
            json!(order),
        ]);
    }
    out.constant("isometry_defect", iso.defect);
    out.constant("min_order", rep.min_order());
    out.checks
        .push(Check::at_most("isometry_defect", iso.defect, 1e-8));
    out.checks
        .push(Check::at_least("min_order", rep.min_order(), 1.8));
    Ok(out)
}

fn covering(e: &ExperimentConfig) -> Result<Output> {
    let window = e.window.unwrap_or(50.0);
    let dilation = e.dilation.unwrap_or(3.0);
    let cov = build_covering(window, dilation)?;
    let check = cov.verify_cover(e.spacing.unwrap_or(1e-3))?;
    let doubled = build_covering(2.0 * window, dilation)?;
    let mut out = Output::new(Table::new(&["k", "center", "radius"]));
    for (k, (c, r)) in cov.centers.iter().zip(&cov.radii).enumerate() {
        out.table.rows.push(vec![json!(k), json!(c), json!(r)]);
    }
    out.constant("centers", cov.len() as f64);
    out.constant("overlap", cov.overlap as f64);
    out.constant("min_margin", check.min_margin);
    out.checks.push(Check::at_most(
        "uncovered_points",
        check.uncovered as f64,
        0.0,
    ));
    out.checks.push(Check::at_most(
        "overlap_change_on_doubling",
        (doubled.overlap as f64 - cov.overlap as f64).abs(),
        0.0,
    ));
    out.artifact = Some(serde_json::to_value(&cov).expect("covering serializes"));
    Ok(out)
}
