//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::collections::BinaryHeap;

use crate::error::{NcqmError, Result};
use crate::specfun::SeriesControl;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Piece {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

/// `∫_a^b f(x) dx`. `ctl.max_terms` bounds the number of subintervals.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, ctl: &SeriesControl) -> Result<f64> {
    ctl.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(NcqmError::Domain(format!("integration limits must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let first = kronrod(&f, a, b);
    let mut total = first.value;
    let mut err = first.error;
    let mut heap = BinaryHeap::from([first]);
    let mut pieces = 1;
    while err > ctl.abs_tol.max(ctl.rel_tol * total.abs()) {
        if !total.is_finite() {
            return Err(NcqmError::Domain("integrand is not finite".into()));
        }
        if pieces >= ctl.max_terms {
            return Err(NcqmError::Convergence {
                iterations: pieces,
                detail: format!("quadrature error estimate {err:e} above tolerance"),
            });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further; accept what we have.
            heap.push(worst);
            break;
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        pieces += 1;
    }
    // Re-sum to shed the drift of the running updates.
    Ok(heap.iter().map(|p| p.value).sum())
}

/// `∫_a^∞ f(x) dx` through `x = a + t/(1 − t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, ctl: &SeriesControl) -> Result<f64> {
    integrate(
        |t| {
            let s = 1.0 - t;
            let v = f(a + t / s) / (s * s);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        ctl,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, &SeriesControl::default()).unwrap();
        assert_relative_eq!(v, 255.0 / 8.0 - 9.0, max_relative = 1e-14);
    }

    #[test]
    fn oscillatory_and_peaked() {
        let ctl = SeriesControl::default();
        let v = integrate(|x| (20.0 * x).sin(), 0.0, PI, &ctl).unwrap();
        assert!(v.abs() < 1e-13);
        let w = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, &ctl).unwrap();
        assert_relative_eq!(w, 2.0 * 100.0 * (100.0f64).atan(), max_relative = 1e-12);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let v = integrate_to_infinity(|x| (-x * x).exp(), 0.0, &SeriesControl::default()).unwrap();
        assert_relative_eq!(v, 0.5 * PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn reports_exhausted_budget() {
        let ctl = SeriesControl { max_terms: 2, ..Default::default() };
        assert!(matches!(
            integrate(|x| (50.0 * x).sin(), 0.0, 100.0, &ctl),
            Err(NcqmError::Convergence { .. })
        ));
    }
}
