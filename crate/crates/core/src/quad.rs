//! Adaptive Gauss–Kronrod quadrature, mapped improper integrals, the
//! subordination integral and the space-time grids used by the operators.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            rel_tol: 1e-11,
            abs_tol: 1e-300,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureRule {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions == 0 {
            return Err(Error::precondition(
                "QuadratureRule::new",
                "tolerances must be positive and the subdivision budget nonzero",
            ));
        }
        Ok(QuadratureRule {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    /// Same rule with a different absolute tolerance.
    pub fn with_abs(self, abs_tol: f64) -> Self {
        QuadratureRule { abs_tol, ..self }
    }

    /// Same rule with a different relative tolerance.
    pub fn with_rel(self, rel_tol: f64) -> Self {
        QuadratureRule { rel_tol, ..self }
    }
}

/// Scalar quadrature outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl QuadResult {
    /// The value, or a non-convergence error naming `func`.
    pub fn require(self, func: &'static str) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::nonconvergence(
                func,
                format!(
                    "value {:e} with error estimate {:e}",
                    self.value, self.error
                ),
            ))
        }
    }

    fn scaled(self, c: f64) -> Self {
        QuadResult {
            value: c * self.value,
            error: c.abs() * self.error,
            ..self
        }
    }
}

/// Vector-valued quadrature outcome; `error` bounds every component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResultN<const N: usize> {
    pub value: [f64; N],
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl<const N: usize> QuadResultN<N> {
    pub fn require(self, func: &'static str) -> Result<[f64; N]> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::nonconvergence(
                func,
                format!(
                    "values {:?} with error estimate {:e}",
                    self.value, self.error
                ),
            ))
        }
    }

    pub fn component(&self, i: usize) -> QuadResult {
        QuadResult {
            value: self.value[i],
            error: self.error,
            converged: self.converged,
            evaluations: self.evaluations,
        }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_174_789,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One Gauss–Kronrod 10/21 panel: Kronrod value per component and a
/// QUADPACK-style error estimate (max over components).
fn gk21<const N: usize, F: Fn(f64) -> [f64; N]>(f: &F, a: f64, b: f64) -> ([f64; N], f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut fv1 = [[0.0; N]; 10];
    let mut fv2 = [[0.0; N]; 10];
    for j in 0..10 {
        let dx = hl * XGK[j];
        fv1[j] = f(c - dx);
        fv2[j] = f(c + dx);
    }
    let mut out = [0.0; N];
    let mut err = 0.0f64;
    for n in 0..N {
        let mut resk = WGK[10] * fc[n];
        let mut resg = 0.0;
        let mut resabs = resk.abs();
        for j in 0..10 {
            let s = fv1[j][n] + fv2[j][n];
            resk += WGK[j] * s;
            resabs += WGK[j] * (fv1[j][n].abs() + fv2[j][n].abs());
            if j % 2 == 1 {
                resg += WG[j / 2] * s;
            }
        }
        let reskh = 0.5 * resk;
        let mut resasc = WGK[10] * (fc[n] - reskh).abs();
        for j in 0..10 {
            resasc += WGK[j] * ((fv1[j][n] - reskh).abs() + (fv2[j][n] - reskh).abs());
        }
        let result = resk * hl;
        let resabs = resabs * hl.abs();
        let resasc = resasc * hl.abs();
        let mut e = ((resk - resg) * hl).abs();
        if resasc != 0.0 && e != 0.0 {
            e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            e = e.max(50.0 * f64::EPSILON * resabs);
        }
        out[n] = result;
        err = err.max(e);
    }
    (out, err)
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integration of a vector-valued integrand over consecutive panels
/// `points[0] < points[1] < … < points[m]`.
pub fn integrate_vec<const N: usize, F: Fn(f64) -> [f64; N]>(
    f: F,
    points: &[f64],
    rule: &QuadratureRule,
) -> QuadResultN<N> {
    let mut heap: BinaryHeap<Panel<N>> = BinaryHeap::new();
    let mut evaluations = 0usize;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gk21(&f, w[0], w[1]);
            evaluations += 21;
            heap.push(Panel {
                a: w[0],
                b: w[1],
                value,
                error,
            });
        }
    }
    let mut frozen: Vec<Panel<N>> = Vec::new();
    let total = |heap: &BinaryHeap<Panel<N>>, frozen: &Vec<Panel<N>>| {
        let mut v = [0.0; N];
        let mut e = 0.0;
        for p in heap.iter().chain(frozen.iter()) {
            for n in 0..N {
                v[n] += p.value[n];
            }
            e += p.error;
        }
        (v, e)
    };
    let mut subdivisions = heap.len();
    loop {
        let (v, e) = total(&heap, &frozen);
        let mag = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol = rule.abs_tol.max(rule.rel_tol * mag);
        if e <= tol || heap.is_empty() {
            return QuadResultN {
                value: v,
                error: e,
                converged: e <= tol,
                evaluations,
            };
        }
        if subdivisions >= rule.max_subdivisions {
            return QuadResultN {
                value: v,
                error: e,
                converged: false,
                evaluations,
            };
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 8.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs())
        {
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        evaluations += 42;
        subdivisions += 1;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
}

/// Adaptive integration over consecutive panels given by sorted `points`.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    rule: &QuadratureRule,
) -> QuadResult {
    integrate_vec(|x| [f(x)], points, rule).component(0)
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rule: &QuadratureRule) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            converged: true,
            evaluations: 0,
        };
    }
    if a > b {
        let r = integrate_with_breaks(&f, &[b, a], rule);
        return r.scaled(-1.0);
    }
    integrate_with_breaks(f, &[a, b], rule)
}

/// `∫_a^∞ f` by the map `x = a + s/(1−s)`, `s ∈ [0,1)`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, a: f64, rule: &QuadratureRule) -> QuadResult {
    integrate_half_line_with_breaks(f, a, &[], rule)
}

/// `∫_a^∞ f` with interior breakpoints given in the original variable.
pub fn integrate_half_line_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    breaks: &[f64],
    rule: &QuadratureRule,
) -> QuadResult {
    let g = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - s;
        let v = f(a + s / d) / (d * d);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut pts = vec![0.0];
    pts.extend(
        breaks
            .iter()
            .filter(|&&x| x > a)
            .map(|&x| (x - a) / (1.0 + x - a)),
    );
    pts.push(1.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    integrate_with_breaks(g, &pts, rule)
}

/// `∫_ℝ f` by the map `x = s/(1−s²)`, `s ∈ (−1,1)`.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, rule: &QuadratureRule) -> QuadResult {
    integrate_line_with_breaks(f, &[], rule)
}

/// `∫_ℝ f` with interior breakpoints given in the original variable.
pub fn integrate_line_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    rule: &QuadratureRule,
) -> QuadResult {
    let g = |s: f64| {
        let d = 1.0 - s * s;
        if d <= 0.0 {
            return 0.0;
        }
        let v = f(s / d) * (1.0 + s * s) / (d * d);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let inv = |x: f64| {
        if x == 0.0 {
            0.0
        } else {
            (-1.0 + (1.0 + 4.0 * x * x).sqrt()) / (2.0 * x)
        }
    };
    let mut pts = vec![-1.0];
    pts.extend(breaks.iter().map(|&x| inv(x)));
    pts.push(1.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    integrate_with_breaks(g, &pts, rule)
}

/// Upper end of the Gaussian-weighted subordination variable `w`.
pub const SUBORDINATION_W_MAX: f64 = 7.0;

/// Breakpoints in the subordination variable `w` for heat-kernel sections with
/// structure at the given `u`-scales (`u = t²/(4w²)`).
pub fn subordination_breakpoints(t: f64, u_scales: &[f64]) -> Vec<f64> {
    let mut pts = vec![0.0, SUBORDINATION_W_MAX];
    for &u in u_scales {
        if u > 0.0 && u.is_finite() {
            let w = 0.5 * t / u.sqrt();
            for f in [0.25, 1.0, 4.0] {
                let wf = w * f;
                if wf > 1e-12 && wf < SUBORDINATION_W_MAX {
                    pts.push(wf);
                }
            }
        }
    }
    for w in [0.5, 1.5, 3.0] {
        pts.push(w);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `(t/√(4π)) ∫_0^∞ u^{−3/2} e^{−t²/4u} g(u) du` after `u = t²/(4w²)`, i.e.
/// `(2/√π) ∫_0^∞ e^{−w²} g(t²/(4w²)) dw`.
pub fn integrate_subordination<G: Fn(f64) -> f64>(
    g: G,
    t: f64,
    breaks: &[f64],
    rule: &QuadratureRule,
) -> Result<QuadResult> {
    let r = integrate_subordination_pair(g, t, breaks, rule)?;
    Ok(r.component(0))
}

/// Subordinated value and its `t`-derivative `(2/(t√π)) ∫ e^{−w²}(1−2w²) g(t²/4w²) dw`.
pub fn integrate_subordination_pair<G: Fn(f64) -> f64>(
    g: G,
    t: f64,
    breaks: &[f64],
    rule: &QuadratureRule,
) -> Result<QuadResultN<2>> {
    if !(t > 0.0) {
        return Err(Error::domain(
            "integrate_subordination",
            format!("t must be positive, got {t}"),
        ));
    }
    let pts: Vec<f64> = if breaks.is_empty() {
        subordination_breakpoints(t, &[])
    } else {
        breaks.to_vec()
    };
    let c = 2.0 / PI.sqrt();
    let r = integrate_vec(
        |w: f64| {
            if w <= 0.0 {
                return [0.0, 0.0];
            }
            let e = (-w * w).exp();
            if e == 0.0 {
                return [0.0, 0.0];
            }
            let gv = g(t * t / (4.0 * w * w));
            let v = c * e * gv;
            [v, v * (1.0 - 2.0 * w * w) / t]
        },
        &pts,
        rule,
    );
    Ok(r)
}

/// The subordination integral evaluated in the original variable `u` via the
/// half-line map, without the Gaussian substitution.
pub fn integrate_subordination_direct<G: Fn(f64) -> f64>(
    g: G,
    t: f64,
    rule: &QuadratureRule,
) -> Result<QuadResult> {
    if !(t > 0.0) {
        return Err(Error::domain(
            "integrate_subordination_direct",
            format!("t must be positive, got {t}"),
        ));
    }
    let c = t / (4.0 * PI).sqrt();
    let r = integrate_half_line_with_breaks(
        |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let e = (-t * t / (4.0 * u)).exp();
            if e == 0.0 {
                0.0
            } else {
                c * u.powf(-1.5) * e * g(u)
            }
        },
        0.0,
        &[t * t / 16.0, t * t / 4.0, t * t],
        rule,
    );
    Ok(r)
}

/// Domain on which a [`Grid1D`] lives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Line,
    HalfLine,
    Interval { a: f64, b: f64 },
}

impl Domain {
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Domain::Line => x.is_finite(),
            Domain::HalfLine => x > 0.0 && x.is_finite(),
            Domain::Interval { a, b } => x >= a && x <= b,
        }
    }
}

/// How the nodes of a [`Grid1D`] are spaced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Spacing {
    Uniform { h: f64 },
    Graded,
}

/// Strictly increasing nodes inside a declared domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    nodes: Vec<f64>,
    domain: Domain,
    spacing: Spacing,
}

impl Grid1D {
    /// Arbitrary nodes; checked for monotonicity and domain membership.
    pub fn from_nodes(nodes: Vec<f64>, domain: Domain) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::precondition(
                "Grid1D::from_nodes",
                "grid needs at least one node",
            ));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::precondition(
                "Grid1D::from_nodes",
                "nodes must be strictly increasing",
            ));
        }
        if let Some(x) = nodes.iter().find(|&&x| !domain.contains(x)) {
            return Err(Error::precondition(
                "Grid1D::from_nodes",
                format!("node {x} outside {domain:?}"),
            ));
        }
        let spacing = uniform_step(&nodes).map_or(Spacing::Graded, |h| Spacing::Uniform { h });
        Ok(Grid1D {
            nodes,
            domain,
            spacing,
        })
    }

    /// `n + 1` equispaced nodes `a, a+h, …, b`.
    pub fn uniform(a: f64, b: f64, n: usize, domain: Domain) -> Result<Self> {
        if n == 0 || !(b > a) {
            return Err(Error::precondition(
                "Grid1D::uniform",
                "need b > a and n >= 1",
            ));
        }
        let h = (b - a) / n as f64;
        let nodes: Vec<f64> = (0..=n).map(|i| a + i as f64 * h).collect();
        let mut g = Grid1D::from_nodes(nodes, domain)?;
        g.spacing = Spacing::Uniform { h };
        Ok(g)
    }

    /// Symmetric line window `[−x_max, x_max]` with step `h = x_max/n`.
    pub fn line_window(x_max: f64, n: usize) -> Result<Self> {
        Grid1D::uniform(-x_max, x_max, 2 * n, Domain::Line)
    }

    /// Half-line window `h, 2h, …, x_max` with step `h = x_max/n`.
    pub fn half_line_window(x_max: f64, n: usize) -> Result<Self> {
        if n == 0 || !(x_max > 0.0) {
            return Err(Error::precondition(
                "Grid1D::half_line_window",
                "need x_max > 0 and n >= 1",
            ));
        }
        let h = x_max / n as f64;
        let nodes: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
        let mut g = Grid1D::from_nodes(nodes, Domain::HalfLine)?;
        g.spacing = Spacing::Uniform { h };
        Ok(g)
    }

    /// Geometric nodes `x_min·r^i` covering `[x_min, x_max]`.
    pub fn geometric(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min > 0.0) || !(x_max > x_min) || n == 0 {
            return Err(Error::precondition(
                "Grid1D::geometric",
                "need 0 < x_min < x_max and n >= 1",
            ));
        }
        let r = (x_max / x_min).ln() / n as f64;
        let nodes: Vec<f64> = (0..=n).map(|i| x_min * (r * i as f64).exp()).collect();
        Grid1D::from_nodes(nodes, Domain::HalfLine)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Uniform step, if any.
    pub fn step(&self) -> Option<f64> {
        match self.spacing {
            Spacing::Uniform { h } => Some(h),
            Spacing::Graded => None,
        }
    }

    /// Trapezoid weights; on a half-line window the segment `(0, x_0]` is
    /// included with the value at `0` taken as zero.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.nodes.len();
        let mut w = vec![0.0; n];
        for i in 0..n.saturating_sub(1) {
            let d = self.nodes[i + 1] - self.nodes[i];
            w[i] += 0.5 * d;
            w[i + 1] += 0.5 * d;
        }
        if self.domain == Domain::HalfLine {
            w[0] += 0.5 * self.nodes[0];
        }
        w
    }

    /// Index of `x` if it is a node (within rounding).
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let tol = 1e-9 * self.step().unwrap_or(1.0);
        let i = self.nodes.partition_point(|&v| v < x - tol);
        (i < self.nodes.len() && (self.nodes[i] - x).abs() <= tol).then_some(i)
    }
}

fn uniform_step(nodes: &[f64]) -> Option<f64> {
    if nodes.len() < 2 {
        return None;
    }
    let h = (nodes[nodes.len() - 1] - nodes[0]) / (nodes.len() - 1) as f64;
    nodes
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
        .then_some(h)
}

/// Time grid on `[0, T]` together with a spatial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeGrid {
    time: Grid1D,
    space: Grid1D,
    t_final: f64,
}

impl SpaceTimeGrid {
    /// Uniform time grid with `nt` steps on `[0, T]`.
    pub fn new(t_final: f64, nt: usize, space: Grid1D) -> Result<Self> {
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::precondition(
                "SpaceTimeGrid::new",
                "T must be positive and finite",
            ));
        }
        let time = Grid1D::uniform(0.0, t_final, nt, Domain::Interval { a: 0.0, b: t_final })?;
        Ok(SpaceTimeGrid {
            time,
            space,
            t_final,
        })
    }

    pub fn time(&self) -> &Grid1D {
        &self.time
    }

    pub fn space(&self) -> &Grid1D {
        &self.space
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Uniform time step.
    pub fn dt(&self) -> f64 {
        self.time.step().expect("uniform time grid")
    }

    pub fn nt(&self) -> usize {
        self.time.len()
    }

    pub fn nx(&self) -> usize {
        self.space.len()
    }
}

/// Cubic Lagrange interpolation of samples on a uniform grid.
pub fn interpolate_cubic(grid: &Grid1D, values: &[f64], x: f64) -> Result<f64> {
    let h = grid
        .step()
        .ok_or_else(|| Error::precondition("interpolate_cubic", "grid must be uniform"))?;
    let nodes = grid.nodes();
    let n = nodes.len();
    if n < 4 {
        return Err(Error::precondition(
            "interpolate_cubic",
            "need at least four nodes",
        ));
    }
    let lo = nodes[0];
    let hi = nodes[n - 1];
    let slack = 1e-12 * h;
    if x < lo - slack || x > hi + slack {
        return Err(Error::Extrapolation {
            func: "interpolate_cubic",
            detail: format!("{x} outside [{lo}, {hi}]"),
        });
    }
    let s = (x - lo) / h;
    let i0 = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let mut acc = 0.0;
    for j in 0..4 {
        let mut l = 1.0;
        for m in 0..4 {
            if m != j {
                l *= (s - (i0 + m) as f64) / (j as f64 - m as f64);
            }
        }
        acc += l * values[i0 + j];
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness_and_mass() {
        let r = QuadratureRule::default();
        let v = integrate(|x| x * x, 0.0, 1.0, &r);
        assert!(v.converged && (v.value - 1.0 / 3.0).abs() < 1e-15);
        let weights: f64 = WGK.iter().sum::<f64>() * 2.0 - WGK[10];
        assert!((weights - 2.0).abs() < 1e-14);
        let m = integrate_line(|x| 1.0 / (PI * (1.0 + x * x)), &r);
        assert!(m.converged && (m.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let r = QuadratureRule::default();
        let v = integrate(|x| x.exp(), 1.0, 0.0, &r);
        assert!((v.value + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn half_line_gaussian() {
        let r = QuadratureRule::default();
        let v = integrate_half_line(|x| (-x * x).exp(), 0.0, &r);
        assert!(v.converged && (v.value - PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn nonconvergence_is_flagged() {
        let r = QuadratureRule::new(1e-14, 1e-300, 3).unwrap();
        let v = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &r);
        assert!(!v.converged);
        assert!(v.require("test").is_err());
    }

    #[test]
    fn subordination_of_exponential() {
        // e^{−λu} subordinates to e^{−t√λ}.
        let r = QuadratureRule::default();
        for &(t, lam) in &[(1.0, 0.5), (0.3, 2.0), (2.5, 1.0)] {
            let s = integrate_subordination(|u| (-lam * u).exp(), t, &[], &r).unwrap();
            let expect = (-t * f64::sqrt(lam)).exp();
            assert!((s.value - expect).abs() < 1e-11, "t={t} lam={lam}");
            let d = integrate_subordination_direct(|u| (-lam * u).exp(), t, &r).unwrap();
            assert!((d.value - expect).abs() < 1e-10);
            let p = integrate_subordination_pair(|u| (-lam * u).exp(), t, &[], &r).unwrap();
            assert!((p.value[1] + lam.sqrt() * expect).abs() < 1e-10);
        }
        let z = integrate_subordination(|_| 0.0, 1.0, &[], &r).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn grids() {
        let g = Grid1D::line_window(4.0, 8).unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g.index_of(0.0), Some(8));
        let w: f64 = g.trapezoid_weights().iter().sum();
        assert!((w - 8.0).abs() < 1e-14);
        let hl = Grid1D::half_line_window(2.0, 4).unwrap();
        let w: f64 = hl.trapezoid_weights().iter().sum();
        assert!((w - 1.75).abs() < 1e-14);
        assert!(Grid1D::from_nodes(vec![0.0, 1.0], Domain::HalfLine).is_err());
        assert!(Grid1D::from_nodes(vec![1.0, 1.0], Domain::Line).is_err());
        assert!(SpaceTimeGrid::new(0.0, 4, g).is_err());
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let g = Grid1D::uniform(0.0, 1.0, 10, Domain::Interval { a: 0.0, b: 1.0 }).unwrap();
        let p = |x: f64| 1.0 - 2.0 * x + 3.0 * x * x * x;
        let v: Vec<f64> = g.nodes().iter().map(|&x| p(x)).collect();
        for &x in &[0.0, 0.03, 0.51, 0.99, 1.0] {
            assert!((interpolate_cubic(&g, &v, x).unwrap() - p(x)).abs() < 1e-13);
        }
        assert!(matches!(
            interpolate_cubic(&g, &v, 1.5),
            Err(Error::Extrapolation { .. })
        ));
    }
}
