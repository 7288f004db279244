//! Small numerical kernels shared by the solvers: probability validation,
//! a bracketing root finder and composite Gauss-Legendre quadrature.

use crate::error::{GameError, Result};

/// Values this far outside `[0, 1]` are clamped instead of rejected.
pub const PROB_TOL: f64 = 1e-12;

/// Validates a probability, clamping values within [`PROB_TOL`] of the unit interval.
pub fn probability(what: &str, value: f64) -> Result<f64> {
    if !value.is_finite() || !(-PROB_TOL..=1.0 + PROB_TOL).contains(&value) {
        return Err(GameError::InvalidProbability {
            what: what.to_string(),
            value,
        });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Bracketing root finder: secant steps kept inside the bracket, with a
/// bisection step whenever the bracket fails to halve.
///
/// `f(lo)` and `f(hi)` must have opposite signs (or one of them be zero).
pub fn find_root<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(GameError::NotBracketed { lo: a, hi: b });
    }

    let mut force_bisect = false;
    for _ in 0..400 {
        let width = b - a;
        if width <= xtol {
            break;
        }
        let mid = 0.5 * (a + b);
        let guard = 1e-3 * width;
        let mut x = if force_bisect {
            mid
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        if !x.is_finite() || x <= a + guard || x >= b - guard {
            x = mid;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        force_bisect = (b - a) > 0.5 * width;
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

#[allow(clippy::excessive_precision)]
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
#[allow(clippy::excessive_precision)]
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss-Legendre rule over `panels` equal panels.
/// Exact for polynomials up to degree 15 on each panel.
pub fn integrate<F>(f: F, a: f64, b: f64, panels: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    if b == a {
        return 0.0;
    }
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let half = 0.5 * h;
        let centre = lo + half;
        let mut s = 0.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            s += w * f(centre + half * x);
        }
        total += s * half;
    }
    total
}

/// The value rounded to 12 significant digits, in its shortest decimal
/// form (scientific below 1e-6 and from 1e15).
pub fn format_number(value: f64) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    let rounded: f64 = format!("{value:.11e}").parse().unwrap_or(value);
    if rounded == 0.0 {
        "0".into()
    } else if rounded.abs() < 1e-6 || rounded.abs() >= 1e15 {
        format!("{rounded:e}")
    } else {
        rounded.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(0.36197060827308275), "0.361970608273");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(4.336808689942018e-18), "4.33680868994e-18");
        assert_eq!(format_number(1e-6), "0.000001");
        assert_eq!(format_number(2.5), "2.5");
    }

    #[test]
    fn clamps_inside_tolerance_band() {
        assert_eq!(probability("p", 1.0 + 5e-13).unwrap(), 1.0);
        assert_eq!(probability("p", -5e-13).unwrap(), 0.0);
        assert!(probability("p", 1.0 + 1e-9).is_err());
        assert!(probability("p", f64::NAN).is_err());
    }

    #[test]
    fn root_of_quadratic() {
        let r = find_root(|x| -x * x + 2.0 * x + 1.0, 2.0, 3.0, 1e-14).unwrap();
        assert!((r - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn root_of_flat_cubic() {
        // secant alone stalls on this one
        let r = find_root(|x: f64| (x - 0.3).powi(3) * 1e-6, -10.0, 10.0, 1e-13).unwrap();
        assert!((r - 0.3).abs() < 1e-4);
    }

    #[test]
    fn unbracketed_is_an_error() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-10),
            Err(GameError::NotBracketed { .. })
        ));
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let v = integrate(|x| x.powi(7) - 3.0 * x * x, 0.0, 2.0, 1);
        assert!((v - (32.0 - 8.0)).abs() < 1e-12);
        let s = integrate(f64::sin, 0.0, std::f64::consts::PI, 4);
        assert!((s - 2.0).abs() < 1e-12);
    }
}
