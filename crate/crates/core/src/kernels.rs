//! Heat and Poisson kernels for the classical, Bessel, Hermite and Laguerre
//! settings, the pieces of the Bessel kernel split, the critical radius and
//! the subordination bridge from heat to Poisson kernels.
//!
//! Time derivatives are always obtained by differentiating under the integral
//! or the closed form, never by differencing kernel values.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{
    integrate_subordination_pair, integrate_vec, subordination_breakpoints, Domain, QuadratureRule,
    SUBORDINATION_W_MAX,
};
use crate::specfun::{i_crossover, ln_gamma};

/// The base operator a kernel belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum Variant {
    Classical,
    Bessel { alpha: f64 },
    Hermite,
    Laguerre { alpha: f64 },
}

/// Reference measure of a setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureTag {
    Lebesgue,
}

/// A base operator together with its domain and measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSetting {
    pub variant: Variant,
    pub omega: Domain,
    pub measure: MeasureTag,
}

impl KernelSetting {
    pub fn classical() -> Self {
        KernelSetting {
            variant: Variant::Classical,
            omega: Domain::Line,
            measure: MeasureTag::Lebesgue,
        }
    }

    pub fn hermite() -> Self {
        KernelSetting {
            variant: Variant::Hermite,
            omega: Domain::Line,
            measure: MeasureTag::Lebesgue,
        }
    }

    pub fn bessel(alpha: f64) -> Result<Self> {
        check_alpha("KernelSetting::bessel", alpha)?;
        Ok(KernelSetting {
            variant: Variant::Bessel { alpha },
            omega: Domain::HalfLine,
            measure: MeasureTag::Lebesgue,
        })
    }

    pub fn laguerre(alpha: f64) -> Result<Self> {
        check_alpha("KernelSetting::laguerre", alpha)?;
        Ok(KernelSetting {
            variant: Variant::Laguerre { alpha },
            omega: Domain::HalfLine,
            measure: MeasureTag::Lebesgue,
        })
    }

    /// Build from a name (`classical`, `bessel`, `hermite`, `laguerre`).
    pub fn from_name(name: &str, alpha: Option<f64>) -> Result<Self> {
        let need = |a: Option<f64>| {
            a.ok_or_else(|| {
                Error::precondition(
                    "KernelSetting::from_name",
                    format!("setting {name} needs alpha"),
                )
            })
        };
        match name {
            "classical" => Ok(Self::classical()),
            "hermite" => Ok(Self::hermite()),
            "bessel" => Self::bessel(need(alpha)?),
            "laguerre" => Self::laguerre(need(alpha)?),
            other => Err(Error::precondition(
                "KernelSetting::from_name",
                format!("unknown setting {other}"),
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.variant {
            Variant::Classical => "classical",
            Variant::Bessel { .. } => "bessel",
            Variant::Hermite => "hermite",
            Variant::Laguerre { .. } => "laguerre",
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.variant {
            Variant::Bessel { alpha } | Variant::Laguerre { alpha } => Some(alpha),
            _ => None,
        }
    }

    /// True when the spatial domain is `(0, ∞)`.
    pub fn is_half_line(&self) -> bool {
        self.omega == Domain::HalfLine
    }
}

fn check_alpha(func: &'static str, alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(
            func,
            format!("alpha must be positive, got {alpha}"),
        ));
    }
    Ok(())
}

fn check_positive(func: &'static str, name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::domain(
            func,
            format!("{name} must be positive, got {v}"),
        ));
    }
    Ok(())
}

/// `ξ = 2xy e^{−u}/(1−e^{−2u}) = xy / sinh u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiParameter {
    pub u: f64,
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

impl XiParameter {
    pub fn new(u: f64, x: f64, y: f64) -> Result<Self> {
        check_positive("XiParameter::new", "u", u)?;
        check_positive("XiParameter::new", "x", x)?;
        check_positive("XiParameter::new", "y", y)?;
        Ok(XiParameter {
            u,
            x,
            y,
            value: x * y / u.sinh(),
        })
    }
}

/// How a kernel value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Quadrature { error: f64, evaluations: usize },
}

/// A kernel value with its time derivative and provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEval {
    pub value: f64,
    pub dt: f64,
    pub provenance: Provenance,
}

/// Classical Poisson kernel `P_t(x) = t / (π(t² + x²))`.
pub fn poisson_classical(t: f64, x: f64) -> Result<f64> {
    check_positive("poisson_classical", "t", t)?;
    Ok(t / (PI * (t * t + x * x)))
}

/// `∂_t P_t(x) = (x² − t²) / (π(t² + x²)²)`.
pub fn poisson_classical_dt(t: f64, x: f64) -> f64 {
    let d = t * t + x * x;
    (x * x - t * t) / (PI * d * d)
}

/// Classical heat kernel `W_t(z) = e^{−z²/4t}/√(4πt)`.
pub fn heat_classical(t: f64, z: f64) -> Result<f64> {
    check_positive("heat_classical", "t", t)?;
    Ok(heat_classical_unchecked(t, z))
}

#[inline]
fn heat_classical_unchecked(t: f64, z: f64) -> f64 {
    (-z * z / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// Heat kernel of the free part `−½ d²/dx²` of the Hermite operator,
/// equal to `W_{t/2}(z)`.
pub fn heat_hermite_free(t: f64, z: f64) -> Result<f64> {
    check_positive("heat_hermite_free", "t", t)?;
    Ok(heat_classical_unchecked(0.5 * t, z))
}

/// Mehler kernel of `H = ½(−d²/dx² + x²)`.
pub fn heat_hermite(t: f64, x: f64, y: f64) -> Result<f64> {
    check_positive("heat_hermite", "t", t)?;
    Ok(heat_hermite_unchecked(t, x, y))
}

#[inline]
fn heat_hermite_unchecked(t: f64, x: f64, y: f64) -> f64 {
    if t > 700.0 {
        let h0 = |v: f64| PI.powf(-0.25) * (-0.5 * v * v).exp();
        return (-0.5 * t).exp() * h0(x) * h0(y);
    }
    let s = t.sinh();
    let z = x - y;
    let e = z * z / (2.0 * s) + (0.5 * t).tanh() * (x * x + y * y) * 0.5;
    (-e).exp() / (2.0 * PI * s).sqrt()
}

/// `e^{−z} I_ν(z)` with the order-dependent constants precomputed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledBesselI {
    nu: f64,
    ln_gamma_nu1: f64,
    crossover: f64,
}

impl ScaledBesselI {
    pub(crate) fn new(nu: f64) -> Result<Self> {
        if !(nu > -1.0) {
            return Err(Error::domain(
                "ScaledBesselI::new",
                format!("order must exceed -1, got {nu}"),
            ));
        }
        Ok(ScaledBesselI {
            nu,
            ln_gamma_nu1: ln_gamma(nu + 1.0)?,
            crossover: i_crossover(nu),
        })
    }

    /// Value for `z > 0`.
    #[inline]
    pub(crate) fn eval(&self, z: f64) -> f64 {
        let nu = self.nu;
        if z < self.crossover {
            let mut term = (nu * (0.5 * z).ln() - self.ln_gamma_nu1 - z).exp();
            let q = 0.25 * z * z;
            let mut sum = term;
            let mut k = 1.0;
            while term > f64::EPSILON * 0.25 * sum {
                term *= q / (k * (k + nu));
                sum += term;
                k += 1.0;
            }
            sum
        } else {
            let mu = 4.0 * nu * nu;
            let inv = 1.0 / (2.0 * z);
            let mut term = 1.0f64;
            let mut sum = 1.0f64;
            let mut k = 0.0;
            loop {
                let odd = 2.0 * k + 1.0;
                let next = -term * (mu - odd * odd) * inv / (4.0 * (k + 1.0));
                if next.abs() >= term.abs() {
                    break;
                }
                sum += next;
                term = next;
                k += 1.0;
                if next.abs() <= 1e-17 * sum.abs() {
                    break;
                }
            }
            sum / (2.0 * PI * z).sqrt()
        }
    }
}

/// Laguerre heat kernel for `L_α^φ = ½(−d² + x² + α(α−1)/x²)`, written as
/// `(√(xy)/sinh t)·[e^{−ξ}I_{α−1/2}(ξ)]·exp(−(x−y)²coth t/2 − xy tanh(t/2))`.
pub fn heat_laguerre(alpha: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    check_alpha("heat_laguerre", alpha)?;
    check_positive("heat_laguerre", "t", t)?;
    check_positive("heat_laguerre", "x", x)?;
    check_positive("heat_laguerre", "y", y)?;
    let ib = ScaledBesselI::new(alpha - 0.5)?;
    Ok(heat_laguerre_with(&ib, alpha, t, x, y))
}

#[inline]
fn heat_laguerre_with(ib: &ScaledBesselI, alpha: f64, t: f64, x: f64, y: f64) -> f64 {
    if t > 700.0 {
        let a = alpha - 0.5;
        let lg = ln_gamma(a + 1.0).unwrap_or(0.0);
        let log_p0 = |v: f64| 0.5 * (2.0f64.ln() - lg) + alpha * v.ln() - 0.5 * v * v;
        return (-(alpha + 0.5) * t + log_p0(x) + log_p0(y)).exp();
    }
    let s = t.sinh();
    let xi = x * y / s;
    let z = x - y;
    let e = 0.5 * z * z / t.tanh() + x * y * (0.5 * t).tanh();
    (x * y).sqrt() / s * ib.eval(xi) * (-e).exp()
}

/// Heat kernel of the Bessel operator `S_α = −d² + α(α−1)/x²`:
/// `(√(xy)/(2t))·e^{−(x²+y²)/(4t)}·I_{α−1/2}(xy/(2t))`.
pub fn heat_bessel(alpha: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    check_alpha("heat_bessel", alpha)?;
    check_positive("heat_bessel", "t", t)?;
    check_positive("heat_bessel", "x", x)?;
    check_positive("heat_bessel", "y", y)?;
    let ib = ScaledBesselI::new(alpha - 0.5)?;
    Ok(heat_bessel_with(&ib, t, x, y))
}

#[inline]
fn heat_bessel_with(ib: &ScaledBesselI, t: f64, x: f64, y: f64) -> f64 {
    let xi = x * y / (2.0 * t);
    let z = x - y;
    (x * y).sqrt() / (2.0 * t) * ib.eval(xi) * (-z * z / (4.0 * t)).exp()
}

/// Heat kernel of any setting.
pub fn heat_kernel(setting: &KernelSetting, t: f64, x: f64, y: f64) -> Result<f64> {
    match setting.variant {
        Variant::Classical => heat_classical(t, x - y),
        Variant::Hermite => heat_hermite(t, x, y),
        Variant::Bessel { alpha } => heat_bessel(alpha, t, x, y),
        Variant::Laguerre { alpha } => heat_laguerre(alpha, t, x, y),
    }
}

/// Critical radius `ρ(x)`: `1/2` for `|x| ≤ 1`, `1/(1+|x|)` beyond.
pub fn critical_radius(x: f64) -> f64 {
    if x.abs() <= 1.0 {
        0.5
    } else {
        1.0 / (1.0 + x.abs())
    }
}

/// The pieces in the split of the Bessel Poisson kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BesselPiece {
    /// θ ∈ (0, π/2) with weight `(sin θ)^{2α−1}`.
    P1,
    /// As `P1` with `sin θ` replaced by `θ` in the weight.
    P11,
    /// As `P11` with `2(1 − cos θ)` replaced by `θ²` in the denominator.
    P12,
    /// Minus the `P12` integrand over θ ∈ (π/2, ∞).
    P13,
    /// θ ∈ (π/2, π) remainder, `P − P1`.
    P2,
    /// `P1 − P11` as one integral.
    D1,
    /// `P11 − P12` as one integral.
    D2,
}

impl BesselPiece {
    pub fn from_code(code: &str) -> Result<Self> {
        match code {
            "1" => Ok(BesselPiece::P1),
            "11" => Ok(BesselPiece::P11),
            "12" => Ok(BesselPiece::P12),
            "13" => Ok(BesselPiece::P13),
            "2" => Ok(BesselPiece::P2),
            other => Err(Error::precondition(
                "BesselPiece::from_code",
                format!("unknown piece {other}"),
            )),
        }
    }
}

/// Which θ-integrals make up a Bessel kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
enum ThetaIntegral {
    Full,
    Piece(BesselPiece),
}

/// Default rule for kernel quadratures.
pub fn kernel_rule() -> QuadratureRule {
    QuadratureRule {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_subdivisions: 4000,
    }
}

/// Bessel Poisson kernel `P_t^{S_α}(x,y)`.
pub fn poisson_bessel(alpha: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    Ok(poisson_bessel_eval(alpha, t, x, y, &kernel_rule())?.value)
}

/// Bessel Poisson kernel and its `t`-derivative.
pub fn poisson_bessel_eval(
    alpha: f64,
    t: f64,
    x: f64,
    y: f64,
    rule: &QuadratureRule,
) -> Result<KernelEval> {
    bessel_theta(alpha, t, x, y, ThetaIntegral::Full, rule)
}

/// One piece of the Bessel kernel split.
pub fn poisson_bessel_piece(piece: BesselPiece, alpha: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    Ok(poisson_bessel_piece_eval(piece, alpha, t, x, y, &kernel_rule())?.value)
}

/// One piece of the Bessel kernel split and its `t`-derivative.
pub fn poisson_bessel_piece_eval(
    piece: BesselPiece,
    alpha: f64,
    t: f64,
    x: f64,
    y: f64,
    rule: &QuadratureRule,
) -> Result<KernelEval> {
    bessel_theta(alpha, t, x, y, ThetaIntegral::Piece(piece), rule)
}

/// `4 sin²(θ/2) − θ²` without cancellation for small θ.
#[inline]
fn cos_gap(theta: f64) -> f64 {
    if theta < 0.2 {
        let t2 = theta * theta;
        let t4 = t2 * t2;
        // −θ⁴/12 + θ⁶/360 − θ⁸/20160 + θ¹⁰/1814400
        t4 * (-1.0 / 12.0 + t2 * (1.0 / 360.0 + t2 * (-1.0 / 20160.0 + t2 / 1_814_400.0)))
    } else {
        let s = (0.5 * theta).sin();
        4.0 * s * s - theta * theta
    }
}

/// `(sin θ/θ)^{2α−1} − 1` without cancellation for small θ.
#[inline]
fn sinc_weight_gap(theta: f64, e: f64) -> f64 {
    if theta < 1e-3 {
        let t2 = theta * theta;
        // ln(sinθ/θ) = −θ²/6 − θ⁴/180 − …
        (e * (-t2 / 6.0 - t2 * t2 / 180.0)).exp_m1()
    } else {
        (e * (theta.sin() / theta).ln()).exp_m1()
    }
}

fn bessel_theta(
    alpha: f64,
    t: f64,
    x: f64,
    y: f64,
    which: ThetaIntegral,
    rule: &QuadratureRule,
) -> Result<KernelEval> {
    check_alpha("poisson_bessel", alpha)?;
    check_positive("poisson_bessel", "t", t)?;
    check_positive("poisson_bessel", "x", x)?;
    check_positive("poisson_bessel", "y", y)?;
    let xy = x * y;
    let z = x - y;
    let a = z * z + t * t;
    let p = alpha + 1.0;
    let e = 2.0 * alpha - 1.0;
    let t2 = t * t;
    // Graded variable θ = φ^{1/(2α)} makes θ^{2α−1}dθ = dφ/(2α) for α < 1/2;
    // otherwise θ is used directly. `jac` returns (θ, 2α θ^{2α−1} dθ/dφ).
    let graded = alpha < 0.5;
    let inv2a = 1.0 / (2.0 * alpha);
    let var_of = |th: f64| if graded { th.powf(2.0 * alpha) } else { th };
    let jac = |phi: f64| -> (f64, f64) {
        if graded {
            (phi.powf(inv2a), 1.0)
        } else {
            (phi, 2.0 * alpha * phi.powf(e))
        }
    };
    let phi_max = var_of(0.5 * PI);

    // Each integrand returns [∫ w D^{−p}, t² ∫ w D^{−(p+1)}] densities.
    let pair = |d: f64| {
        let dp = d.powf(-p);
        [dp, t2 * dp / d]
    };
    let near = |phi: f64, piece: BesselPiece| -> [f64; 2] {
        if phi <= 0.0 {
            return match piece {
                BesselPiece::D1 | BesselPiece::D2 => [0.0, 0.0],
                _ if graded => pair(a),
                _ if e == 0.0 => pair(a),
                _ => [0.0, 0.0],
            };
        }
        let (th, w) = jac(phi);
        let s = (0.5 * th).sin();
        let d_cos = a + 4.0 * xy * s * s;
        let v = match piece {
            BesselPiece::P1 => {
                let r = if th < 1e-8 {
                    1.0
                } else {
                    (th.sin() / th).powf(e)
                };
                let v = pair(d_cos);
                [r * v[0], r * v[1]]
            }
            BesselPiece::P11 => pair(d_cos),
            BesselPiece::P12 => pair(a + xy * th * th),
            BesselPiece::D1 => {
                let g = sinc_weight_gap(th, e);
                let v = pair(d_cos);
                [g * v[0], g * v[1]]
            }
            BesselPiece::D2 => {
                let dq = a + xy * th * th;
                let rel = xy * cos_gap(th) / dq;
                let l = rel.ln_1p();
                let m0 = (-p * l).exp_m1();
                let m1 = (-(p + 1.0) * l).exp_m1();
                let dp = dq.powf(-p);
                [dp * m0, t2 * dp / dq * m1]
            }
            _ => unreachable!(),
        };
        [w * v[0], w * v[1]]
    };
    let far = |psi: f64| -> [f64; 2] {
        if psi <= 0.0 {
            return if graded || e == 0.0 {
                pair(a + 4.0 * xy)
            } else {
                [0.0, 0.0]
            };
        }
        let (ps, w) = jac(psi);
        let r = if ps < 1e-8 {
            1.0
        } else {
            (ps.sin() / ps).powf(e)
        };
        let c = (0.5 * ps).cos();
        let v = pair(a + 4.0 * xy * c * c);
        [w * r * v[0], w * r * v[1]]
    };

    // Breakpoints around the near-diagonal scale θ_c = √(A/xy).
    let theta_c = (a / xy).sqrt();
    let mut pts = vec![0.0, phi_max];
    let mut th = theta_c / 4.0;
    while th < 0.5 * PI {
        pts.push(var_of(th));
        th *= 2.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let (res, prefactor) = match which {
        ThetaIntegral::Full => {
            let r = integrate_vec(
                |phi: f64| {
                    let n = near(phi, BesselPiece::P1);
                    let f = far(phi);
                    [n[0] + f[0], n[1] + f[1]]
                },
                &pts,
                rule,
            );
            (r, 1.0)
        }
        ThetaIntegral::Piece(BesselPiece::P2) => (integrate_vec(far, &[0.0, phi_max], rule), 1.0),
        ThetaIntegral::Piece(BesselPiece::P13) => {
            // θ = (π/2)/s on s ∈ (0, 1]; the 1/(2α) grading factor is undone by 2α.
            let half_pi = 0.5 * PI;
            let r = integrate_vec(
                |s: f64| {
                    if s <= 0.0 {
                        return [0.0, 0.0];
                    }
                    let th = half_pi / s;
                    let jac = th * th / half_pi;
                    let w = th.powf(e) * jac * 2.0 * alpha;
                    let v = pair(a + xy * th * th);
                    [w * v[0], w * v[1]]
                },
                &s_breaks(theta_c),
                rule,
            );
            (r, -1.0)
        }
        ThetaIntegral::Piece(piece) => (integrate_vec(|phi| near(phi, piece), &pts, rule), 1.0),
    };
    if !res.converged {
        return Err(Error::nonconvergence(
            "poisson_bessel",
            format!(
                "θ-quadrature at alpha={alpha}, t={t}, x={x}, y={y}: error {:e}",
                res.error
            ),
        ));
    }
    let c = prefactor * xy.powf(alpha) / PI;
    let i1 = res.value[0];
    let i2t = res.value[1];
    Ok(KernelEval {
        value: c * t * i1,
        dt: c * (i1 - 2.0 * p * i2t),
        provenance: Provenance::Quadrature {
            error: c.abs() * res.error * t.max(1.0),
            evaluations: res.evaluations,
        },
    })
}

fn s_breaks(theta_c: f64) -> Vec<f64> {
    let mut pts = vec![0.0, 1.0];
    let s_c = 0.5 * PI / theta_c;
    for f in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let s = s_c * f;
        if s > 0.0 && s < 1.0 {
            pts.push(s);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Heat-kernel sections `u ↦ W_u(x,y)` ready for subordination.
#[derive(Debug, Clone, Copy)]
pub(crate) enum HeatSection {
    Classical,
    Hermite,
    Bessel(ScaledBesselI),
    Laguerre(ScaledBesselI, f64),
}

impl HeatSection {
    pub(crate) fn new(setting: &KernelSetting) -> Result<Self> {
        Ok(match setting.variant {
            Variant::Classical => HeatSection::Classical,
            Variant::Hermite => HeatSection::Hermite,
            Variant::Bessel { alpha } => HeatSection::Bessel(ScaledBesselI::new(alpha - 0.5)?),
            Variant::Laguerre { alpha } => {
                HeatSection::Laguerre(ScaledBesselI::new(alpha - 0.5)?, alpha)
            }
        })
    }

    #[inline]
    pub(crate) fn eval(&self, u: f64, x: f64, y: f64) -> f64 {
        match self {
            HeatSection::Classical => heat_classical_unchecked(u, x - y),
            HeatSection::Hermite => heat_hermite_unchecked(u, x, y),
            HeatSection::Bessel(ib) => heat_bessel_with(ib, u, x, y),
            HeatSection::Laguerre(ib, alpha) => heat_laguerre_with(ib, *alpha, u, x, y),
        }
    }

    /// `u`-scales where the section changes character.
    fn scales(&self, x: f64, y: f64) -> Vec<f64> {
        let z2 = (x - y) * (x - y);
        match self {
            HeatSection::Classical | HeatSection::Bessel(_) => vec![z2 / 4.0],
            HeatSection::Hermite | HeatSection::Laguerre(..) => vec![z2 / 2.0, 1.0],
        }
    }
}

/// Poisson kernel obtained by subordinating the setting's heat kernel.
pub fn poisson_via_subordination(
    setting: &KernelSetting,
    t: f64,
    x: f64,
    y: f64,
) -> Result<KernelEval> {
    poisson_via_subordination_with(setting, t, x, y, &kernel_rule())
}

/// As [`poisson_via_subordination`] with an explicit rule.
pub fn poisson_via_subordination_with(
    setting: &KernelSetting,
    t: f64,
    x: f64,
    y: f64,
    rule: &QuadratureRule,
) -> Result<KernelEval> {
    check_positive("poisson_via_subordination", "t", t)?;
    if setting.is_half_line() {
        check_positive("poisson_via_subordination", "x", x)?;
        check_positive("poisson_via_subordination", "y", y)?;
    }
    let section = HeatSection::new(setting)?;
    subordinate_section(&section, t, x, y, rule)
}

pub(crate) fn subordinate_section(
    section: &HeatSection,
    t: f64,
    x: f64,
    y: f64,
    rule: &QuadratureRule,
) -> Result<KernelEval> {
    let pts = subordination_breakpoints(t, &section.scales(x, y));
    let r = integrate_subordination_pair(|u| section.eval(u, x, y), t, &pts, rule)?;
    if !r.converged {
        return Err(Error::nonconvergence(
            "poisson_via_subordination",
            format!("t={t}, x={x}, y={y}: error {:e}", r.error),
        ));
    }
    Ok(KernelEval {
        value: r.value[0],
        dt: r.value[1],
        provenance: Provenance::Quadrature {
            error: r.error,
            evaluations: r.evaluations,
        },
    })
}

/// Poisson kernel of any setting with its `t`-derivative: closed form for the
/// classical setting, θ-quadrature for Bessel, subordination otherwise.
pub fn poisson_kernel(setting: &KernelSetting, t: f64, x: f64, y: f64) -> Result<KernelEval> {
    match setting.variant {
        Variant::Classical => Ok(KernelEval {
            value: poisson_classical(t, x - y)?,
            dt: poisson_classical_dt(t, x - y),
            provenance: Provenance::ClosedForm,
        }),
        Variant::Bessel { alpha } => poisson_bessel_eval(alpha, t, x, y, &kernel_rule()),
        _ => poisson_via_subordination(setting, t, x, y),
    }
}

/// One side of the split of `P^H_t(x,y) − P_{t/√2}(x − y)` at heat time
/// `u = ρ(x)²`: the subordinated difference `W^H_u(x,y) − W_{u/2}(x − y)`
/// restricted to `u < ρ(x)²` (`large_u = false`) or `u ≥ ρ(x)²`.
pub fn poisson_hermite_split(t: f64, x: f64, y: f64, large_u: bool) -> Result<KernelEval> {
    check_positive("poisson_hermite_split", "t", t)?;
    let r = critical_radius(x);
    // u = t²/(4w²), so u < ρ² is w > t/(2ρ)
    let w_split = 0.5 * t / r;
    let (lo, hi) = if large_u {
        (0.0, w_split.min(SUBORDINATION_W_MAX))
    } else {
        (w_split, SUBORDINATION_W_MAX)
    };
    if !(hi > lo) {
        return Ok(KernelEval {
            value: 0.0,
            dt: 0.0,
            provenance: Provenance::ClosedForm,
        });
    }
    let z2 = (x - y) * (x - y);
    let mut pts: Vec<f64> = subordination_breakpoints(t, &[z2 / 2.0, 1.0, r * r])
        .into_iter()
        .filter(|&w| w > lo && w < hi)
        .collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    let g = |u: f64| heat_hermite_unchecked(u, x, y) - heat_classical_unchecked(0.5 * u, x - y);
    let rule = kernel_rule().with_abs(1e-14);
    let q = integrate_subordination_pair(g, t, &pts, &rule)?;
    if !q.converged {
        return Err(Error::nonconvergence(
            "poisson_hermite_split",
            format!("t={t}, x={x}, y={y}: error {:e}", q.error),
        ));
    }
    Ok(KernelEval {
        value: q.value[0],
        dt: q.value[1],
        provenance: Provenance::Quadrature {
            error: q.error,
            evaluations: q.evaluations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn classical_values() {
        assert!(rel(poisson_classical(1.0, 0.0).unwrap(), 1.0 / PI) < 1e-15);
        assert_eq!(
            poisson_classical(0.7, 1.3).unwrap(),
            poisson_classical(0.7, -1.3).unwrap()
        );
        assert!(poisson_classical(0.0, 1.0).is_err());
        assert!(
            rel(
                heat_classical(0.3, 0.0).unwrap(),
                1.0 / (4.0 * PI * 0.3).sqrt()
            ) < 1e-15
        );
        let h = 1e-6;
        let fd = (poisson_classical(0.8 + h, 0.5).unwrap()
            - poisson_classical(0.8 - h, 0.5).unwrap())
            / (2.0 * h);
        assert!((fd - poisson_classical_dt(0.8, 0.5)).abs() < 1e-8);
    }

    #[test]
    fn mehler_reference_value() {
        let v = heat_hermite(2f64.ln(), 0.0, 0.0).unwrap();
        assert!(rel(v, (2.0 / (3.0 * PI)).sqrt()) < 1e-14);
        assert_eq!(
            heat_hermite(0.4, 0.3, -1.1).unwrap(),
            heat_hermite(0.4, -1.1, 0.3).unwrap()
        );
        let far = heat_hermite(800.0, 0.1, 0.2).unwrap();
        let lead = (-400.0f64).exp() * PI.powf(-0.5) * (-0.5f64 * (0.01 + 0.04)).exp();
        assert!(rel(far, lead) < 1e-12);
    }

    #[test]
    fn hermite_split_pieces_sum_to_the_free_difference() {
        for &(t, x, y) in &[
            (0.05, 0.2, 0.3),
            (0.4, 1.5, 1.7),
            (1.3, -2.0, -1.8),
            (0.2, 3.0, 3.0),
        ] {
            let a = poisson_hermite_split(t, x, y, false).unwrap();
            let b = poisson_hermite_split(t, x, y, true).unwrap();
            let full = poisson_kernel(&KernelSetting::hermite(), t, x, y).unwrap();
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let free = poisson_classical(s * t, x - y).unwrap();
            let free_dt = s * poisson_classical_dt(s * t, x - y);
            assert!(
                (a.value + b.value - (full.value - free)).abs() < 1e-10 * full.value.abs().max(1.0)
            );
            assert!((a.dt + b.dt - (full.dt - free_dt)).abs() < 1e-9 * full.dt.abs().max(1.0));
        }
    }

    #[test]
    fn critical_radius_values() {
        assert_eq!(critical_radius(0.0), 0.5);
        assert_eq!(critical_radius(1.0), 0.5);
        assert!(rel(critical_radius(1.0 + 1e-9), 1.0 / (2.0 + 1e-9)) < 1e-15);
        assert_eq!(critical_radius(3.0), 0.25);
        assert_eq!(critical_radius(-3.0), 0.25);
    }

    #[test]
    fn bessel_kernel_symmetry_and_pieces() {
        for &alpha in &[0.3, 0.7, 1.5, 3.0] {
            let (t, x, y) = (0.4, 1.1, 1.6);
            let a = poisson_bessel(alpha, t, x, y).unwrap();
            let b = poisson_bessel(alpha, t, y, x).unwrap();
            assert!(rel(a, b) < 1e-11);
            let p1 = poisson_bessel_piece(BesselPiece::P1, alpha, t, x, y).unwrap();
            let p2 = poisson_bessel_piece(BesselPiece::P2, alpha, t, x, y).unwrap();
            assert!((p1 + p2 - a).abs() < 1e-10 * a);
            let p12 = poisson_bessel_piece(BesselPiece::P12, alpha, t, x, y).unwrap();
            let p13 = poisson_bessel_piece(BesselPiece::P13, alpha, t, x, y).unwrap();
            let pc = poisson_classical(t, x - y).unwrap();
            assert!((p12 - pc - p13).abs() < 1e-10, "alpha={alpha}");
            let p11 = poisson_bessel_piece(BesselPiece::P11, alpha, t, x, y).unwrap();
            let d1 =
                poisson_bessel_piece_eval(BesselPiece::D1, alpha, t, x, y, &kernel_rule()).unwrap();
            let d2 =
                poisson_bessel_piece_eval(BesselPiece::D2, alpha, t, x, y, &kernel_rule()).unwrap();
            assert!((d1.value - (p1 - p11)).abs() < 1e-10);
            assert!((d2.value - (p11 - p12)).abs() < 1e-10);
        }
    }

    #[test]
    fn bessel_dt_matches_difference_quotient() {
        let rule = kernel_rule();
        for piece in [BesselPiece::P1, BesselPiece::P13, BesselPiece::D2] {
            let (x, y, t) = (0.9, 1.2, 0.3);
            let h = 1e-5;
            let e = poisson_bessel_piece_eval(piece, 0.8, t, x, y, &rule).unwrap();
            let fp = poisson_bessel_piece_eval(piece, 0.8, t + h, x, y, &rule)
                .unwrap()
                .value;
            let fm = poisson_bessel_piece_eval(piece, 0.8, t - h, x, y, &rule)
                .unwrap()
                .value;
            assert!(
                (e.dt - (fp - fm) / (2.0 * h)).abs() < 1e-6 * (1.0 + e.dt.abs()),
                "{piece:?}"
            );
        }
        let e = poisson_bessel_eval(1.3, 0.2, 1.0, 1.05, &rule).unwrap();
        let h = 1e-5;
        let fp = poisson_bessel(1.3, 0.2 + h, 1.0, 1.05).unwrap();
        let fm = poisson_bessel(1.3, 0.2 - h, 1.0, 1.05).unwrap();
        assert!((e.dt - (fp - fm) / (2.0 * h)).abs() < 1e-5 * (1.0 + e.dt.abs()));
    }

    #[test]
    fn subordinated_classical_matches_closed_form() {
        let s = KernelSetting::classical();
        for &z in &[0.0, 1.0, 3.0] {
            let e = poisson_via_subordination(&s, 1.0, z, 0.0).unwrap();
            assert!((e.value - poisson_classical(1.0, z).unwrap()).abs() < 1e-12);
            assert!((e.dt - poisson_classical_dt(1.0, z)).abs() < 1e-12);
        }
    }

    #[test]
    fn subordinated_bessel_heat_matches_theta_integral() {
        let alpha = 0.7;
        let s = KernelSetting::bessel(alpha).unwrap();
        for &(t, x, y) in &[(0.5, 1.0, 2.0), (0.1, 0.8, 0.85), (2.0, 0.3, 3.0)] {
            let sub = poisson_via_subordination(&s, t, x, y).unwrap();
            let th = poisson_bessel_eval(alpha, t, x, y, &kernel_rule()).unwrap();
            assert!(rel(sub.value, th.value) < 1e-9, "t={t} x={x} y={y}");
            assert!((sub.dt - th.dt).abs() < 1e-8 * (1.0 + th.dt.abs()));
        }
    }

    #[test]
    fn xi_parameter() {
        let xi = XiParameter::new(0.5, 1.0, 2.0).unwrap();
        let direct = 2.0 * 2.0 * (-0.5f64).exp() / (1.0 - (-1.0f64).exp());
        assert!(rel(xi.value, direct) < 1e-14);
        assert!(XiParameter::new(0.0, 1.0, 1.0).is_err());
        assert!(XiParameter::new(1.0, 1.0, 2.0).unwrap().value < xi.value);
    }

    #[test]
    fn laguerre_and_bessel_heat_half_integer() {
        // α = 1 gives I_{1/2}; S_1 kernel equals the odd-reflection Gaussian pair.
        let (t, x, y) = (0.3, 0.7, 1.4);
        let v = heat_bessel(1.0, t, x, y).unwrap();
        let expect = heat_classical(t, x - y).unwrap() - heat_classical(t, x + y).unwrap();
        assert!(rel(v, expect) < 1e-13);
        assert!(heat_laguerre(0.5, 0.3, 1.0, 1.2).unwrap() > 0.0);
        assert!(heat_laguerre(-0.5, 0.3, 1.0, 1.2).is_err());
    }
}
