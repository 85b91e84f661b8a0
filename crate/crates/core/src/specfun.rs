//! Scalar special functions: Gamma, normalized Hermite and Laguerre functions,
//! Bessel `J_ν` and modified Bessel `I_ν`.
//!
//! Orthonormal function families are generated by three-term recurrences on
//! the normalized functions themselves, so no raw polynomial value is ever
//! formed. `I_ν` switches from its power series to the large-argument
//! asymptotic series at [`i_crossover`].

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default highest admissible index for Hermite and Laguerre functions.
pub const K_MAX_DEFAULT: usize = 200;

const EPS: f64 = f64::EPSILON;

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "gamma",
            format!("argument must be positive, got {x}"),
        ));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "ln_gamma",
            format!("argument must be positive, got {x}"),
        ));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Coefficients `[ν,k]` of the large-argument expansion of `I_ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticCoefficients {
    pub nu: f64,
    pub coeffs: Vec<f64>,
}

impl AsymptoticCoefficients {
    /// First `n` coefficients by the ratio `[ν,k+1]/[ν,k] = (4ν²−(2k+1)²)/(4(k+1))`.
    pub fn new(nu: f64, n: usize) -> Self {
        let mu = 4.0 * nu * nu;
        let mut coeffs = Vec::with_capacity(n);
        let mut c = 1.0;
        for k in 0..n {
            coeffs.push(c);
            let odd = (2 * k + 1) as f64;
            c *= (mu - odd * odd) / (4.0 * (k + 1) as f64);
        }
        AsymptoticCoefficients { nu, coeffs }
    }

    /// `[ν,k]` evaluated as the literal product over `j = 1..k` divided by `2^{2k} k!`.
    pub fn direct_product(nu: f64, k: usize) -> f64 {
        let mu = 4.0 * nu * nu;
        let mut num = 1.0;
        let mut den = 1.0;
        for j in 1..=k {
            let odd = (2 * j - 1) as f64;
            num *= mu - odd * odd;
            den *= 4.0 * j as f64;
        }
        num / den
    }
}

/// Orthonormal Hermite function `h_k(x)` with the default index limit.
pub fn hermite_function(k: usize, x: f64) -> Result<f64> {
    hermite_function_with_limit(k, x, K_MAX_DEFAULT)
}

/// Orthonormal Hermite function `h_k(x)`, rejecting `k > k_max`.
pub fn hermite_function_with_limit(k: usize, x: f64, k_max: usize) -> Result<f64> {
    if k > k_max {
        return Err(Error::capability(
            "hermite_function",
            format!("index {k} exceeds K_max = {k_max}"),
        ));
    }
    Ok(*hermite_functions(k + 1, x).last().expect("n >= 1"))
}

/// `h_0(x), …, h_{n−1}(x)`.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let h0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(h0);
    if n == 1 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * h0);
    for k in 1..n - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Laguerre function `φ_k^α(x)` with the default index limit.
pub fn laguerre_function(k: usize, alpha: f64, x: f64) -> Result<f64> {
    if k > K_MAX_DEFAULT {
        return Err(Error::capability(
            "laguerre_function",
            format!("index {k} exceeds K_max = {K_MAX_DEFAULT}"),
        ));
    }
    Ok(*laguerre_functions(k + 1, alpha, x)?.last().expect("n >= 1"))
}

/// `φ_0^α(x), …, φ_{n−1}^α(x)`, orthonormal in `L²((0,∞), dx)`.
pub fn laguerre_functions(n: usize, alpha: f64, x: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::domain(
            "laguerre_function",
            format!("alpha must be positive, got {alpha}"),
        ));
    }
    if !(x > 0.0) {
        return Err(Error::domain(
            "laguerre_function",
            format!("x must be positive, got {x}"),
        ));
    }
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let a = alpha - 0.5;
    let s = x * x;
    let log_p0 = 0.5 * (2.0f64.ln() - ln_gamma(a + 1.0)?) + alpha * x.ln() - 0.5 * s;
    out.push(log_p0.exp());
    for k in 0..n - 1 {
        let kf = k as f64;
        let denom = ((kf + 1.0) * (kf + a + 1.0)).sqrt();
        let mut next = (2.0 * kf + 1.0 + a - s) / denom * out[k];
        if k > 0 {
            next -= (kf * (kf + a) / ((kf + 1.0) * (kf + a + 1.0))).sqrt() * out[k - 1];
        }
        out.push(next);
    }
    Ok(out)
}

/// Bessel function of the first kind `J_ν(x)`, for `ν > −1` and `x ≥ 0`.
///
/// Orders in `(−1, 0)` use `J_{−μ} = cos(μπ)J_μ − sin(μπ)Y_μ`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(nu > -1.0) || !(x >= 0.0) {
        return Err(Error::domain(
            "bessel_j",
            format!("need nu > -1 and x >= 0, got nu={nu}, x={x}"),
        ));
    }
    if x == 0.0 {
        return if nu == 0.0 {
            Ok(1.0)
        } else if nu > 0.0 {
            Ok(0.0)
        } else {
            Err(Error::domain("bessel_j", "J_nu(0) is unbounded for nu < 0"))
        };
    }
    if nu >= 0.0 {
        Ok(bessel_jy(nu, x)?.0)
    } else {
        let mu = -nu;
        let (j, y) = bessel_jy(mu, x)?;
        Ok((mu * PI).cos() * j - (mu * PI).sin() * y)
    }
}

/// `(J_ν(x), Y_ν(x))` for `ν ≥ 0`, `x > 0`.
///
/// Temme's series for `x < 2` and Steed's continued fraction otherwise, after
/// Lentz evaluation of the ratio `J_ν'/J_ν`.
pub fn bessel_jy(nu: f64, x: f64) -> Result<(f64, f64)> {
    const MAXIT: usize = 100_000;
    const FPMIN: f64 = f64::MIN_POSITIVE / f64::EPSILON;
    const XMIN: f64 = 2.0;
    if !(nu >= 0.0) || !(x > 0.0) {
        return Err(Error::domain(
            "bessel_jy",
            format!("need nu >= 0 and x > 0, got nu={nu}, x={x}"),
        ));
    }
    let nl = if x < XMIN {
        (nu + 0.5) as i64
    } else {
        ((nu - x + 1.5) as i64).max(0)
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() <= EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::nonconvergence(
            "bessel_jy",
            format!("continued fraction 1 at x={x}"),
        ));
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS {
            1.0
        } else {
            pimu / pimu.sin()
        };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS {
            1.0
        } else {
            pimu2.sin() / pimu2
        };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::nonconvergence(
                "bessel_jy",
                format!("Temme series at x={x}"),
            ));
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut converged = false;
        for i in 1..MAXIT {
            a += 2.0 * i as f64;
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() <= EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::nonconvergence(
                "bessel_jy",
                format!("continued fraction 2 at x={x}"),
            ));
        }
        let gam = (p - f) / q;
        let mut rj = (w / ((p - f) * gam + q)).sqrt();
        if rjl < 0.0 {
            rj = -rj;
        }
        rjmu = rj;
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    let scale = rjmu / rjl;
    let jnu = rjl1 * scale;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    Ok((jnu, rymu))
}

/// `Γ`-function combinations needed by Temme's series, for `|x| ≤ 1/2`.
fn temme_gammas(x: f64) -> (f64, f64, f64, f64) {
    const C1: [f64; 7] = [
        -1.142022680371168e0,
        6.5165112670737e-3,
        3.087090173086e-4,
        -3.4706269649e-6,
        6.9437664e-9,
        3.67795e-11,
        -1.356e-13,
    ];
    const C2: [f64; 8] = [
        1.843740587300905e0,
        -7.68528408447867e-2,
        1.2719271366546e-3,
        -4.9717367042e-6,
        -3.31261198e-8,
        2.423096e-10,
        -1.702e-13,
        -1.49e-15,
    ];
    let xx = 8.0 * x * x - 1.0;
    let gam1 = chebyshev(&C1, xx);
    let gam2 = chebyshev(&C2, xx);
    (gam1, gam2, gam2 - x * gam1, gam2 + x * gam1)
}

fn chebyshev(c: &[f64], x: f64) -> f64 {
    let mut d = 0.0;
    let mut dd = 0.0;
    for &cj in c[1..].iter().rev() {
        let sv = d;
        d = 2.0 * x * d - dd + cj;
        dd = sv;
    }
    x * d - dd + 0.5 * c[0]
}

/// Argument above which `I_ν` uses the asymptotic series.
pub fn i_crossover(nu: f64) -> f64 {
    (2.0 * nu * nu).max(12.0)
}

/// Modified Bessel function `I_ν(z)` for `ν > −1`, `z ≥ 0`.
pub fn modified_bessel_i(nu: f64, z: f64) -> Result<f64> {
    let scaled = modified_bessel_i_scaled(nu, z)?;
    Ok(scaled * z.exp())
}

/// `e^{−z} I_ν(z)`, finite for arbitrarily large `z`.
pub fn modified_bessel_i_scaled(nu: f64, z: f64) -> Result<f64> {
    check_i_args(nu, z)?;
    if z < i_crossover(nu) {
        scaled_series(nu, z)
    } else {
        Ok(scaled_asymptotic(nu, z, None).0)
    }
}

fn check_i_args(nu: f64, z: f64) -> Result<()> {
    if !(nu > -1.0) || !(z >= 0.0) || !z.is_finite() {
        return Err(Error::domain(
            "modified_bessel_i",
            format!("need nu > -1 and finite z >= 0, got nu={nu}, z={z}"),
        ));
    }
    if z == 0.0 && nu < 0.0 {
        return Err(Error::domain(
            "modified_bessel_i",
            "I_nu(0) is unbounded for nu < 0",
        ));
    }
    Ok(())
}

/// `I_ν(z)` from the power series alone.
pub fn modified_bessel_i_series(nu: f64, z: f64) -> Result<f64> {
    check_i_args(nu, z)?;
    Ok(scaled_series(nu, z)? * z.exp())
}

/// `I_ν(z)` from the asymptotic series alone, optionally with a fixed number
/// of terms. Also returns the magnitude of the first omitted term relative to
/// the sum.
pub fn modified_bessel_i_asymptotic(nu: f64, z: f64, terms: Option<usize>) -> Result<(f64, f64)> {
    check_i_args(nu, z)?;
    if z == 0.0 {
        return Err(Error::domain(
            "modified_bessel_i_asymptotic",
            "z must be positive",
        ));
    }
    let (v, tail) = scaled_asymptotic(nu, z, terms);
    Ok((v * z.exp(), tail))
}

fn scaled_series(nu: f64, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let mut term = (nu * (0.5 * z).ln() - ln_gamma(nu + 1.0)? - z).exp();
    let q = 0.25 * z * z;
    let mut sum = term;
    for k in 1..10_000 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term <= EPS * 0.25 * sum {
            return Ok(sum);
        }
    }
    Err(Error::nonconvergence(
        "modified_bessel_i",
        format!("series at nu={nu}, z={z}"),
    ))
}

fn scaled_asymptotic(nu: f64, z: f64, terms: Option<usize>) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let inv = 1.0 / (2.0 * z);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 0usize;
    let tail = loop {
        let odd = (2 * k + 1) as f64;
        let next = -term * (mu - odd * odd) * inv / (4.0 * (k + 1) as f64);
        match terms {
            Some(n) => {
                if k + 1 >= n {
                    break next.abs();
                }
            }
            None => {
                if next.abs() >= term.abs() {
                    break term.abs();
                }
            }
        }
        sum += next;
        term = next;
        k += 1;
        if terms.is_none() && next.abs() <= 1e-17 * sum.abs() {
            break next.abs();
        }
    };
    ((2.0 * PI * z).sqrt().recip() * sum, tail / sum.abs())
}
