//! Special functions: gamma, beta, Bessel `J_n`/`Y_n`, generalized Laguerre,
//! and the two-parameter Mittag-Leffler function.
//!
//! Accuracy envelopes:
//!
//! * `gamma`: relative error ≲ 1e-13 on `(0, 170]`.
//! * `bessel_j`, `bessel_y`: absolute error ≲ 1e-13 for `x ≤ 50`, order ≤ 20
//!   (`bessel_y` is relative near the origin, where it diverges).
//! * `mittag_leffler`: series, controlled by [`SeriesControl`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NcqmError, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Term and tolerance limits for series and quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 2000,
            abs_tol: 1e-15,
            rel_tol: 1e-15,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 || !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(NcqmError::Validation(format!("invalid series control {self:?}")));
        }
        Ok(())
    }
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `Γ(x)` for real `x`, not a pole.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() || is_nonpositive_integer(x) {
        return Err(NcqmError::Domain(format!("gamma has a pole at {x}")));
    }
    if x < 0.5 {
        // Reflection.
        let s = (PI * x).sin();
        return Ok(PI / (s * gamma(1.0 - x)?));
    }
    if x == x.floor() && x <= 171.0 {
        // Exact for integers that fit.
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return Ok(f);
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    // Split the power to postpone overflow near x = 171.
    let w = t.powf((z + 0.5) / 2.0);
    Ok((2.0 * PI).sqrt() * w * (w * (-t).exp()) * a)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(NcqmError::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    if x < 100.0 {
        return Ok(gamma(x)?.ln());
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln())
}

/// `1/Γ(x)`, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 170.0 {
        return (-ln_gamma(x).expect("positive argument")).exp();
    }
    1.0 / gamma(x).expect("not a pole")
}

/// `Γ(z)` for complex `z` away from the poles.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 {
        return gamma(z.re).map(Complex64::from);
    }
    if z.re < 0.5 {
        let s = (Complex64::from(PI) * z).sin();
        return Ok(Complex64::from(PI) / (s * gamma_complex(1.0 - z)?));
    }
    let z = z - 1.0;
    let mut a = Complex64::from(LANCZOS[0]);
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += *c / (z + i as f64);
    }
    Ok((2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * a)
}

/// `n!` through the gamma function.
pub fn factorial(n: u32) -> f64 {
    gamma(n as f64 + 1.0).expect("positive argument")
}

/// `ln n!`.
pub fn ln_factorial(n: u32) -> f64 {
    ln_gamma(n as f64 + 1.0).expect("positive argument")
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(NcqmError::Domain(format!("beta needs positive arguments, got ({a}, {b})")));
    }
    if a + b < 170.0 {
        Ok(gamma(a)? * gamma(b)? / gamma(a + b)?)
    } else {
        Ok((ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?).exp())
    }
}

fn bessel_j_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = half.powi(n as i32) / factorial(n);
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k as f64 + n as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    sum
}

/// `J_0(x) … J_{n_max}(x)` by Miller's backward recurrence, normalized with
/// `J_0 + 2ΣJ_{2k} = 1`. Requires `x > 0`.
pub fn bessel_j_all(n_max: u32, x: f64) -> Vec<f64> {
    debug_assert!(x > 0.0);
    let top = (n_max as f64).max(x);
    let mut start = (top + 20.0 + (40.0 * top).sqrt()) as usize;
    start += start % 2;
    let len = start.max(n_max as usize) + 2;
    let mut j = vec![0.0; len];
    j[start] = 1.0;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * j[k] - j[k + 1];
        j[k - 1] = prev;
        if prev.abs() > 1e250 {
            for v in j.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
            norm *= 1e-250;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += j[k - 1];
        }
    }
    let norm = j[0] + 2.0 * norm;
    j.truncate(n_max as usize + 1);
    j.iter_mut().for_each(|v| *v /= norm);
    j
}

/// Bessel function of the first kind `J_n(x)`, `x ≥ 0`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(NcqmError::Domain(format!("bessel_j needs finite x ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if x < 2.0 {
        return Ok(bessel_j_series(n, x));
    }
    if x > 2000.0 && (n as f64) * (n as f64) < x {
        return Ok(bessel_j_asymptotic(n, x, 8));
    }
    Ok(bessel_j_all(n, x)[n as usize])
}

/// Hankel asymptotic expansion of `J_n(x)` with `terms` correction terms
/// (`terms = 0` gives the leading `√(2/πx) cos(x − nπ/2 − π/4)`).
pub fn bessel_j_asymptotic(n: u32, x: f64, terms: usize) -> f64 {
    let (p, q) = hankel_pq(n, x, terms);
    let chi = x - (n as f64 * 0.5 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn hankel_pq(n: u32, x: f64, terms: usize) -> (f64, f64) {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut k = 1usize;
    for _ in 0..terms {
        // a_k(n) / (8x)^k, alternating between the Q and P series.
        term *= (mu - (2 * k - 1).pow(2) as f64) / (k as f64 * 8.0 * x);
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        k += 1;
    }
    (p, q)
}

/// Bessel function of the second kind `Y_n(x)`, `x > 0`.
pub fn bessel_y(n: u32, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(NcqmError::Singularity("bessel_y diverges at x = 0".into()));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(NcqmError::Domain(format!("bessel_y needs finite x > 0, got {x}")));
    }
    let (y0, y1) = bessel_y01(x);
    if n == 0 {
        return Ok(y0);
    }
    let (mut prev, mut cur) = (y0, y1);
    for k in 1..n {
        let next = 2.0 * k as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

fn bessel_y01(x: f64) -> (f64, f64) {
    if x > 2000.0 {
        let chi0 = x - 0.25 * PI;
        let chi1 = x - 0.75 * PI;
        let amp = (2.0 / (PI * x)).sqrt();
        let (p0, q0) = hankel_pq(0, x, 8);
        let (p1, q1) = hankel_pq(1, x, 8);
        return (
            amp * (p0 * chi0.sin() + q0 * chi0.cos()),
            amp * (p1 * chi1.sin() + q1 * chi1.cos()),
        );
    }
    // Neumann series in J_{k}; the J values come from Miller's recurrence.
    let top = (x + 30.0 + (40.0 * x).sqrt()) as u32 + 2;
    let j = bessel_j_all(top, x);
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1usize;
    while 2 * k + 1 < j.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = 2.0 / PI * log_term * j[0] - 4.0 / PI * s0;
    let y1 = -2.0 / PI * j[0] / x + 2.0 / PI * log_term * j[1] + 2.0 / PI * s1;
    (y0, y1)
}

/// `dJ_n/dx`.
pub fn bessel_j_prime(n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Ok(-bessel_j(1, x)?);
    }
    Ok(0.5 * (bessel_j(n - 1, x)? - bessel_j(n + 1, x)?))
}

/// `dY_n/dx`.
pub fn bessel_y_prime(n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Ok(-bessel_y(1, x)?);
    }
    Ok(0.5 * (bessel_y(n - 1, x)? - bessel_y(n + 1, x)?))
}

/// Generalized Laguerre polynomial `L_n^{(a)}(x)` by the three-term recurrence.
pub fn laguerre(n: u32, a: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `E_{α,β}(z) = Σ zⁿ/Γ(nα + β)` by direct summation.
pub fn mittag_leffler(alpha: f64, beta: f64, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    ctl.validate()?;
    if !(alpha > 0.0) {
        return Err(NcqmError::Domain(format!("mittag_leffler needs alpha > 0, got {alpha}")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::from(rgamma(beta)));
    }
    let log_z = z.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut small_run = 0;
    let mut prev_mag = f64::INFINITY;
    for n in 0..ctl.max_terms {
        let arg = n as f64 * alpha + beta;
        let term = if arg > 0.0 && n > 0 {
            (log_z * n as f64 - ln_gamma(arg)?).exp()
        } else {
            power * rgamma(arg)
        };
        power *= z;
        sum += term;
        let mag = term.norm();
        // Past the peak of the terms, stop once several in a row are negligible.
        if mag <= ctl.abs_tol + ctl.rel_tol * sum.norm() && (mag <= prev_mag || mag == 0.0) {
            small_run += 1;
            if small_run >= 3 && arg > z.norm().powf(1.0 / alpha) {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
        prev_mag = mag;
    }
    Err(NcqmError::Convergence {
        iterations: ctl.max_terms,
        detail: format!("Mittag-Leffler series E_({alpha},{beta})({z}) did not converge"),
    })
}

/// Real-argument convenience wrapper for [`mittag_leffler`].
pub fn mittag_leffler_real(alpha: f64, beta: f64, x: f64, ctl: &SeriesControl) -> Result<f64> {
    Ok(mittag_leffler(alpha, beta, Complex64::from(x), ctl)?.re)
}
