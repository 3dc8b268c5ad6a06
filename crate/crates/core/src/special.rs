//! Real spherical Bessel functions and their imaginary-argument carriers.
//!
//! Orders may be negative; `j_{-(l+1)}(x) = (-1)^{l+1} n_l(x)` links the
//! two kinds. The modified carriers are
//!
//! ```text
//! m_l(x) = i^{-l} j_l(ix)          (regular, positive for x > 0)
//! K_l(x) = i^{l+1} n_l(ix) = (-1)^{l+1} m_{-l-1}(x)
//! ```
//!
//! so that `K_0(x) = -cosh(x)/x`.

use crate::{Error, Result};

/// Largest angular momentum handled by the library.
pub const L_MAX: u32 = 6;

/// Largest |order| accepted by the Bessel routines.
pub const MAX_ORDER: i32 = L_MAX as i32 + 2;

/// Above this argument the regular modified function switches from its
/// positive power series to the exponential closed form.
const MOD_SERIES_LIMIT: f64 = 40.0;

/// Bessel order validated against the supported range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BesselOrder(i32);

impl BesselOrder {
    pub fn new(l: i32) -> Result<Self> {
        if l.abs() > MAX_ORDER {
            return Err(Error::OrderOutOfRange(l));
        }
        Ok(Self(l))
    }

    pub fn get(self) -> i32 {
        self.0
    }
}

impl TryFrom<i32> for BesselOrder {
    type Error = Error;

    fn try_from(l: i32) -> Result<Self> {
        Self::new(l)
    }
}

/// `A_l = 2^l l!/(2l+1)!` and `B_l = (2l)!/(2^l l!)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionConstants {
    pub a: f64,
    pub b: f64,
}

pub fn expansion_constants(l: u32) -> Result<ExpansionConstants> {
    if l > L_MAX {
        return Err(Error::AngularMomentumOutOfRange(l));
    }
    let fact = |n: u32| (1..=n as u64).product::<u64>();
    let pow2 = 1u64 << l;
    Ok(ExpansionConstants {
        a: (pow2 * fact(l)) as f64 / fact(2 * l + 1) as f64,
        b: fact(2 * l) as f64 / (pow2 * fact(l)) as f64,
    })
}

/// Regular spherical Bessel function `j_l(x)`, any supported integer order.
pub fn sph_bessel_j(l: i32, x: f64) -> Result<f64> {
    let l = BesselOrder::new(l)?.get();
    check_arg(l, x)?;
    Ok(j(l, x))
}

/// Irregular spherical Bessel function `n_l(x)` (`n_0 = -cos x / x`).
pub fn sph_bessel_n(l: i32, x: f64) -> Result<f64> {
    BesselOrder::new(-l - 1)?;
    if !(x > 0.0) {
        return Err(Error::SingularArgument { order: l, x });
    }
    Ok(n(l, x))
}

/// `m_l(x) = i^{-l} j_l(ix)`.
pub fn mod_sph_bessel_regular(l: i32, x: f64) -> Result<f64> {
    let l = BesselOrder::new(l)?.get();
    check_arg(l, x)?;
    Ok(mj(l, x))
}

/// `e^{-x} m_l(x)`, finite for arbitrarily large `x`.
pub fn mod_sph_bessel_regular_scaled(l: i32, x: f64) -> Result<f64> {
    let l = BesselOrder::new(l)?.get();
    check_arg(l, x)?;
    Ok(mj_scaled(l, x))
}

/// `K_l(x) = i^{l+1} n_l(ix)`; `K_0(x) = -cosh(x)/x`.
pub fn mod_sph_bessel_irregular(l: i32, x: f64) -> Result<f64> {
    BesselOrder::new(-l - 1)?;
    if !(x > 0.0) {
        return Err(Error::SingularArgument { order: l, x });
    }
    Ok(kk(l, x))
}

/// `e^{-x} K_l(x)`.
pub fn mod_sph_bessel_irregular_scaled(l: i32, x: f64) -> Result<f64> {
    BesselOrder::new(-l - 1)?;
    if !(x > 0.0) {
        return Err(Error::SingularArgument { order: l, x });
    }
    Ok(kk_scaled(l, x))
}

fn check_arg(l: i32, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 || (l < 0 && x == 0.0) {
        return Err(Error::SingularArgument { order: l, x });
    }
    Ok(())
}

fn sign(n: i32) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(2m+1)!!` for `m >= 0`.
fn double_factorial_odd(m: i32) -> f64 {
    (0..=m).map(|i| (2 * i + 1) as f64).product()
}

/// `x^m / (2m+1)!! * sum_k t_k` with `t_{k+1}/t_k = s x^2 / (2(k+1)(2m+2k+3))`.
fn power_series(m: i32, x: f64, s: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..500 {
        term *= s * x2 / (2.0 * (k + 1) as f64 * (2 * m + 2 * k + 3) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    x.powi(m) / double_factorial_odd(m) * sum
}

/// `(n+k)! / (k! (n-k)! 2^k)`.
fn poly_coeff(n: i32, k: i32) -> f64 {
    let mut c = 1.0;
    for i in (n - k + 1)..=(n + k) {
        c *= i as f64;
    }
    for i in 1..=k {
        c /= (2 * i) as f64;
    }
    c
}

/// `(j_n(x), y_n(x))` from the finite trigonometric sums, `n >= 0`.
fn trig_closed(n: i32, x: f64) -> (f64, f64) {
    let (sx, cx) = x.sin_cos();
    let (s, c) = match n.rem_euclid(4) {
        0 => (sx, cx),
        1 => (-cx, sx),
        2 => (-sx, -cx),
        _ => (cx, -sx),
    };
    let inv = 1.0 / x;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut pw = 1.0;
    for k in 0..=n {
        let t = poly_coeff(n, k) * pw;
        match k % 4 {
            0 => p += t,
            1 => q += t,
            2 => p -= t,
            _ => q -= t,
        }
        pw *= inv;
    }
    ((s * p + c * q) * inv, -(c * p - s * q) * inv)
}

/// `sum_k a_k x^{-k}` with all signs positive.
fn exp_poly_plus(n: i32, x: f64) -> f64 {
    let inv = 1.0 / x;
    let mut sum = 0.0;
    for k in (0..=n).rev() {
        sum = sum * inv + poly_coeff(n, k);
    }
    sum
}

/// `sum_k (-1)^k a_k x^{-k}`.
fn exp_poly_minus(n: i32, x: f64) -> f64 {
    exp_poly_plus(n, -x)
}

pub(crate) fn j(m: i32, x: f64) -> f64 {
    if m >= 0 {
        if x < (m + 1) as f64 {
            power_series(m, x, -1.0)
        } else {
            trig_closed(m, x).0
        }
    } else {
        let n = -m - 1;
        sign(n + 1) * trig_closed(n, x).1
    }
}

pub(crate) fn n(l: i32, x: f64) -> f64 {
    if l >= 0 {
        trig_closed(l, x).1
    } else {
        sign(l + 1) * j(-l - 1, x)
    }
}

pub(crate) fn mj_scaled(m: i32, x: f64) -> f64 {
    if m >= 0 {
        if x <= MOD_SERIES_LIMIT {
            power_series(m, x, 1.0) * (-x).exp()
        } else {
            let e2 = (-2.0 * x).exp();
            (exp_poly_minus(m, x) - sign(m) * e2 * exp_poly_plus(m, x)) / (2.0 * x)
        }
    } else {
        let n = -m - 1;
        mj_scaled(n, x) + sign(n) * (-2.0 * x).exp() * exp_poly_plus(n, x) / x
    }
}

pub(crate) fn mj(m: i32, x: f64) -> f64 {
    if m >= 0 && x <= MOD_SERIES_LIMIT {
        power_series(m, x, 1.0)
    } else if m < 0 && x <= MOD_SERIES_LIMIT {
        let n = -m - 1;
        power_series(n, x, 1.0) + sign(n) * (-x).exp() * exp_poly_plus(n, x) / x
    } else {
        mj_scaled(m, x) * x.exp()
    }
}

pub(crate) fn kk(l: i32, x: f64) -> f64 {
    sign(l + 1) * mj(-l - 1, x)
}

/// `K_l(x) - (-1)^{l+1} m_l(x) = -e^{-x} P(1/x) / x`, the decaying irregular
/// carrier; it obeys the same recurrences as `K_l`.
pub(crate) fn kd(l: i32, x: f64) -> f64 {
    let n = if l >= 0 { l } else { -l - 1 };
    -(-x).exp() * exp_poly_plus(n, x) / x
}

pub(crate) fn kk_scaled(l: i32, x: f64) -> f64 {
    sign(l + 1) * mj_scaled(-l - 1, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn j0_zero_at_pi() {
        assert!(sph_bessel_j(0, PI).unwrap().abs() < 1e-16);
    }

    #[test]
    fn j1_at_pi() {
        let v = sph_bessel_j(1, PI).unwrap();
        let oracle = PI.sin() / (PI * PI) - PI.cos() / PI;
        assert!(rel(v, oracle) < 1e-14);
        assert!(rel(v, 1.0 / PI) < 1e-14);
    }

    #[test]
    fn j1_small_argument() {
        let x = 1e-6;
        assert!(rel(sph_bessel_j(1, x).unwrap(), x / 3.0) < 1e-11);
    }

    #[test]
    fn n0_values() {
        assert!(sph_bessel_n(0, PI / 2.0).unwrap().abs() < 1e-16);
        assert!(rel(sph_bessel_n(0, PI).unwrap(), 1.0 / PI) < 1e-15);
        let x = 1e-8;
        assert!(rel(sph_bessel_n(0, x).unwrap(), -1.0 / x) < 1e-14);
    }

    #[test]
    fn modified_regular_values() {
        assert!(rel(mod_sph_bessel_regular(0, 1.0).unwrap(), 1f64.sinh()) < 1e-15);
        assert_eq!(mod_sph_bessel_regular(0, 0.0).unwrap(), 1.0);
        let oracle = -1f64.sinh() + 1f64.cosh();
        assert!(rel(mod_sph_bessel_regular(1, 1.0).unwrap(), oracle) < 1e-14);
    }

    #[test]
    fn modified_irregular_values() {
        assert!(rel(mod_sph_bessel_irregular(0, 1.0).unwrap(), -1f64.cosh()) < 1e-15);
        let v = mod_sph_bessel_irregular(0, LN_2).unwrap();
        assert!(rel(v, -(2.0 + 0.5) / (2.0 * LN_2)) < 1e-15);
        let x = 30.0;
        let v = mod_sph_bessel_irregular(0, x).unwrap();
        assert!(rel(v, -x.exp() / (2.0 * x)) < 1e-12);
    }

    #[test]
    fn modified_match_hyperbolic_closed_forms() {
        for &x in &[0.05, 0.7, 2.0, 9.0, 45.0] {
            let (sh, ch) = (f64::sinh(x), f64::cosh(x));
            assert!(rel(mj(-1, x), ch / x) < 1e-14);
            assert!(rel(mj(1, x), ch / x - sh / (x * x)) < 1e-12);
            assert!(rel(mj(-2, x), sh / x - ch / (x * x)) < 1e-12);
            assert!(rel(mj(2, x), (3.0 / (x * x) + 1.0) * sh / x - 3.0 * ch / (x * x)) < 1e-9);
        }
    }

    #[test]
    fn modified_series_matches_closed_form_at_switch() {
        for m in -8..=8 {
            let below = mj_scaled(m, MOD_SERIES_LIMIT - 1e-12);
            let above = mj_scaled(m, MOD_SERIES_LIMIT + 1e-12);
            assert!(rel(below, above) < 1e-13, "m={m}: {below} {above}");
        }
    }

    #[test]
    fn regular_series_matches_closed_form_near_switch() {
        for m in 0..=8 {
            let x = (m + 1) as f64;
            let s = power_series(m, x, -1.0);
            let c = trig_closed(m, x).0;
            assert!((s - c).abs() < 1e-14 * s.abs().max(1e-3), "m={m}: {s} {c}");
        }
    }

    #[test]
    fn frozen_high_precision_values() {
        // reference values computed with 40-digit arithmetic
        let cases: &[(i32, f64, f64)] = &[
            (6, 0.5, 1.1466510767409421e-7),
            (6, 5.0, 0.047966899859420797),
            (6, 12.0, -0.085184803091417701),
            (3, 2.7, 0.12300842468776196),
            (-3, 2.0, 0.73399142468765407),
            (-7, 3.0, 7.3207367429813621),
            (8, 0.3, 1.8994737804750248e-12),
            (-8, 6.5, -0.31101242631090363),
            (-1, 0.01, 99.995000041666526),
        ];
        for &(m, x, v) in cases {
            assert!(rel(j(m, x), v) < 1e-13, "j_{m}({x}) = {} vs {v}", j(m, x));
        }
        let mod_cases: &[(i32, f64, f64)] = &[
            (6, 4.0, 0.050868078637133376),
            (6, 20.0, 4171756.4211453246),
            (-8, 3.0, -14.714263314363919),
            (-5, 7.0, 17.813107585121219),
            (7, 55.0, 4.1881234330732112e+21),
            (-8, 0.2, -52705972210.976508),
            (-2, 1.3, 0.14022659062353387),
        ];
        for &(m, x, v) in mod_cases {
            assert!(rel(mj(m, x), v) < 1e-13, "mj_{m}({x}) = {} vs {v}", mj(m, x));
        }
    }

    #[test]
    fn expansion_constants_values() {
        let c0 = expansion_constants(0).unwrap();
        assert_eq!((c0.a, c0.b), (1.0, 1.0));
        let c1 = expansion_constants(1).unwrap();
        assert_eq!(c1.b, 1.0);
        assert!(rel(c1.a, 1.0 / 3.0) < 1e-16);
        for l in 0..=L_MAX {
            let c = expansion_constants(l).unwrap();
            assert!(rel(c.a * c.b, 1.0 / (2 * l + 1) as f64) < 1e-15);
        }
        assert!(expansion_constants(7).is_err());
    }

    #[test]
    fn errors() {
        assert_eq!(sph_bessel_j(9, 1.0), Err(Error::OrderOutOfRange(9)));
        assert!(sph_bessel_j(-1, 0.0).is_err());
        assert!(sph_bessel_j(0, -1.0).is_err());
        assert!(sph_bessel_n(0, 0.0).is_err());
        assert!(mod_sph_bessel_irregular(0, 0.0).is_err());
        assert_eq!(sph_bessel_j(2, 0.0).unwrap(), 0.0);
    }
}
