//! Closed-form scattering parameters for hard spheres, soft spheres,
//! spherical wells and the well-barrier potential.
//!
//! Every solvable case reduces to the same two quantities: the matching
//! coefficient `c1 = a^{2l+1}` and
//!
//! ```text
//! c2 = 2/(2l+1) * { R^{2l+3}/(2l+3) - c1 R^2 + c1^2 R^{1-2l}/(1-2l) - int_0^R u^2 dr }
//! ```
//!
//! where `u` is the zero-energy solution normalized to `r^{l+1} - c1 r^{-l}`
//! outside the outer radius `R`. The effective range is `c2 / a^{2l+2}`.
//! Imaginary-argument Bessel functions enter only through the real carriers
//! of [`crate::special`].

use crate::potentials::PotentialSpec;
use crate::solver::ScatteringParameters;
use crate::special::{j, kd, kk, mj, mj_scaled, n, L_MAX};
use crate::{Error, Result};

/// Distance (in `k0 R`) from a well pole treated as resonant input.
pub const POLE_TOLERANCE: f64 = 1e-12;

fn check_l(l: u32) -> Result<i32> {
    if l > L_MAX {
        return Err(Error::AngularMomentumOutOfRange(l));
    }
    Ok(l as i32)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{name} must be positive, got {v}")))
    }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{name} must be non-negative, got {v}")))
    }
}

/// Exterior part of the brace, common to all compact potentials.
fn exterior_brace(l: i32, c1: f64, rad: f64) -> f64 {
    rad.powi(2 * l + 3) / (2 * l + 3) as f64 - c1 * rad * rad
        + c1 * c1 * rad.powi(1 - 2 * l) / (1 - 2 * l) as f64
}

fn c2_from_brace(l: i32, brace: f64) -> f64 {
    2.0 * brace / (2 * l + 1) as f64
}

fn require_nonzero_a(p: ScatteringParameters) -> Result<f64> {
    if p.c1 == 0.0 {
        Err(Error::ZeroScatteringLength)
    } else {
        Ok(p.r)
    }
}

/// Hard sphere: `a = R` for every `l`, `r = -(1/(2l+3) + 1/(2l-1)) R`.
pub fn hard_sphere_params(l: u32, radius: f64) -> Result<ScatteringParameters> {
    let li = check_l(l)?;
    positive("radius", radius)?;
    let r = -((4 * li + 2) as f64 / ((2 * li + 3) * (2 * li - 1)) as f64) * radius;
    let c1 = radius.powi(2 * li + 1);
    Ok(ScatteringParameters::from_coefficients(l, c1, c1 * radius * r, radius))
}

fn soft_sphere_coefficients(li: i32, k0: f64, rad: f64) -> (f64, f64) {
    let x = k0 * rad;
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let (sm, s0, sp) = (mj_scaled(li - 1, x), mj_scaled(li, x), mj_scaled(li + 1, x));
    let c1 = rad.powi(2 * li + 1) * sp / sm;
    // q = N m_l(x), the interior amplitude at the core radius
    let q = (rad.powi(li + 1) - c1 * rad.powi(-li)) / rad;
    let interior = q * q * 0.5 * rad.powi(3) * (s0 * s0 - sm * sp) / (s0 * s0);
    (c1, c2_from_brace(li, exterior_brace(li, c1, rad) - interior))
}

/// Repulsive step of height `k0^2` and radius `R`.
pub fn soft_sphere_params(l: u32, k0: f64, radius: f64) -> Result<ScatteringParameters> {
    let li = check_l(l)?;
    nonneg("k0", k0)?;
    positive("radius", radius)?;
    let (c1, c2) = soft_sphere_coefficients(li, k0, radius);
    Ok(ScatteringParameters::from_coefficients(l, c1, c2, radius))
}

pub fn soft_sphere_a(l: u32, k0: f64, radius: f64) -> Result<f64> {
    Ok(soft_sphere_params(l, k0, radius)?.a)
}

pub fn soft_sphere_r(l: u32, k0: f64, radius: f64) -> Result<f64> {
    require_nonzero_a(soft_sphere_params(l, k0, radius)?)
}

fn spherical_well_coefficients(li: i32, k0: f64, rad: f64) -> Result<(f64, f64)> {
    let x = k0 * rad;
    if x == 0.0 {
        return Ok((0.0, 0.0));
    }
    let (jm, j0, jp) = (j(li - 1, x), j(li, x), j(li + 1, x));
    let djm = j(li - 2, x) - li as f64 / x * jm;
    if (jm / djm).abs() < POLE_TOLERANCE {
        return Err(Error::ResonantInput(x));
    }
    let c1 = -rad.powi(2 * li + 1) * jp / jm;
    // interior normalization from value matching, or from derivative
    // matching when j_l is close to a node
    let d_value = j0;
    let d_slope = (li + 1) as f64 * j0 - x * jp;
    let norm = if d_value.abs() >= d_slope.abs() / (2 * li + 1) as f64 {
        (rad.powi(li) - c1 * rad.powi(-li - 1)) / d_value
    } else {
        ((li + 1) as f64 * rad.powi(li) + li as f64 * c1 * rad.powi(-li - 1)) / d_slope
    };
    let interior = norm * norm * 0.5 * rad.powi(3) * (j0 * j0 - jm * jp);
    Ok((c1, c2_from_brace(li, exterior_brace(li, c1, rad) - interior)))
}

/// Attractive step of depth `k0^2` and radius `R`.
///
/// Fails with [`Error::ResonantInput`] within [`POLE_TOLERANCE`] of a pole.
pub fn spherical_well_params(l: u32, k0: f64, radius: f64) -> Result<ScatteringParameters> {
    let li = check_l(l)?;
    nonneg("k0", k0)?;
    positive("radius", radius)?;
    let (c1, c2) = spherical_well_coefficients(li, k0, radius)?;
    Ok(ScatteringParameters::from_coefficients(l, c1, c2, radius))
}

pub fn spherical_well_a(l: u32, k0: f64, radius: f64) -> Result<f64> {
    Ok(spherical_well_params(l, k0, radius)?.a)
}

pub fn spherical_well_r(l: u32, k0: f64, radius: f64) -> Result<f64> {
    require_nonzero_a(spherical_well_params(l, k0, radius)?)
}

/// Matching constants of the well-barrier solution
///
/// ```text
/// u = N1 r j_l(k1 r)                               r <= R1
/// u = N2 r [m_l(k2 r) + M2 K_l(k2 r)]              R1 < r <= R2
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellBarrierAux {
    pub n1: f64,
    pub n2: f64,
    pub m2: f64,
}

/// `j_m(x) / x^m`, regular at the origin.
fn j_reduced(m: i32, x: f64) -> f64 {
    if x == 0.0 {
        if m >= 0 {
            1.0 / (0..=m).map(|i| (2 * i + 1) as f64).product::<f64>()
        } else {
            1.0
        }
    } else {
        j(m, x) / x.powi(m)
    }
}

struct WellBarrierSolution {
    c1: f64,
    c2: f64,
    /// coefficient of `r^{l+1} j_l(k1 r)/(k1 r)^l` in the well
    n1_reduced: f64,
    n2: f64,
    /// barrier mix in the decaying basis, `m_l + m2 D_l`
    m2: f64,
}

fn well_barrier_solution(li: i32, k1: f64, r1: f64, k2: f64, r2: f64) -> Result<WellBarrierSolution> {
    let (x1, y1) = (k1 * r1, k2 * r1);
    let (jl, jl1) = (j_reduced(li, x1), j_reduced(li + 1, x1));
    let num = x1 * x1 * jl1 * mj(li, y1) + y1 * jl * mj(li + 1, y1);
    let den = y1 * jl * kd(li + 1, y1) - x1 * x1 * jl1 * kd(li, y1);
    let m2 = num / den;
    if !m2.is_finite() {
        return Err(Error::DegenerateMatching);
    }
    let bracket = |r: f64| mj(li, k2 * r) + m2 * kd(li, k2 * r);
    let primitive = |r: f64| r.powi(li + 2) * (mj(li + 1, k2 * r) - m2 * kd(li + 1, k2 * r));
    // unit barrier amplitude first, rescaled once c1 is known
    let n1_unit = r1 * bracket(r1) / (r1.powi(li + 1) * jl);
    let integral = -k1 * k1 * n1_unit * r1.powi(2 * li + 3) * jl1 + k2 * (primitive(r2) - primitive(r1));
    let f2 = r2 * bracket(r2);
    let denom = (2 * li + 1) as f64 * r2.powi(li) * f2 + integral;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateMatching);
    }
    let c1 = r2.powi(2 * li + 1) * integral / denom;
    let n2 = (r2.powi(li + 1) - c1 * r2.powi(-li)) / f2;
    let n1_reduced = n1_unit * n2;

    let (jm_r, j0_r, jp_r) = (j_reduced(li - 1, x1), jl, jl1);
    let inner = n1_reduced * n1_reduced * 0.5 * r1.powi(2 * li + 3) * (j0_r * j0_r - jm_r * jp_r);
    let sq = |r: f64| {
        let s = square_integrals(li, k2, r, kd);
        s.jj + m2 * m2 * s.nn + 2.0 * m2 * s.jn
    };
    let outer = n2 * n2 * (sq(r2) - sq(r1));
    let c2 = c2_from_brace(li, exterior_brace(li, c1, r2) - inner - outer);
    Ok(WellBarrierSolution { c1, c2, n1_reduced, n2, m2 })
}

fn well_barrier_fields(spec: &PotentialSpec) -> Result<(f64, f64, f64, f64)> {
    match *spec {
        PotentialSpec::WellBarrier { k1, r1, k2, r2 } => {
            spec.validate()?;
            Ok((k1, r1, k2, r2))
        }
        _ => Err(Error::InvalidSpec("expected a well-barrier potential".into())),
    }
}

/// Full parameters of the well-barrier potential.
pub fn well_barrier_params(l: u32, spec: &PotentialSpec) -> Result<ScatteringParameters> {
    let li = check_l(l)?;
    let (k1, r1, k2, r2) = well_barrier_fields(spec)?;
    let (c1, c2) = if k2 == 0.0 {
        // a zero-height barrier is a plain well of radius R1
        spherical_well_coefficients(li, k1, r1)?
    } else {
        let s = well_barrier_solution(li, k1, r1, k2, r2)?;
        (s.c1, s.c2)
    };
    Ok(ScatteringParameters::from_coefficients(l, c1, c2, r2))
}

pub fn well_barrier_a(l: u32, spec: &PotentialSpec) -> Result<f64> {
    Ok(well_barrier_params(l, spec)?.a)
}

pub fn well_barrier_r(l: u32, spec: &PotentialSpec) -> Result<f64> {
    require_nonzero_a(well_barrier_params(l, spec)?)
}

/// Matching constants; requires `k1 > 0` and `k2 > 0`.
pub fn well_barrier_aux(l: u32, spec: &PotentialSpec) -> Result<WellBarrierAux> {
    let li = check_l(l)?;
    let (k1, r1, k2, r2) = well_barrier_fields(spec)?;
    positive("k1", k1)?;
    positive("k2", k2)?;
    let s = well_barrier_solution(li, k1, r1, k2, r2)?;
    // m + mu D = (1 - mu sigma) m + mu K with sigma = (-1)^{l+1}
    let scale = 1.0 - s.m2 * if li % 2 == 0 { -1.0 } else { 1.0 };
    Ok(WellBarrierAux { n1: s.n1_reduced / k1.powi(li), n2: s.n2 * scale, m2: s.m2 / scale })
}

/// Antiderivatives of `r^2 F G` for spherical Bessel products at `kr`.
///
/// For [`Carrier::Real`] the fields are `int r^2 j_l^2`, `int r^2 n_l^2`
/// and `int r^2 j_l n_l`. For [`Carrier::Imaginary`] the same fields hold
/// the analogues for the real carriers `m_l` and `K_l` of the
/// imaginary-argument functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselSquareIntegrals {
    pub jj: f64,
    pub nn: f64,
    pub jn: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Carrier {
    Real,
    Imaginary,
}

pub fn bessel_square_integrals(l: u32, k: f64, r: f64, carrier: Carrier) -> Result<BesselSquareIntegrals> {
    let li = check_l(l)?;
    positive("k", k)?;
    positive("r", r)?;
    Ok(match carrier {
        Carrier::Real => {
            let x = k * r;
            let (jm, j0, jp) = (j(li - 1, x), j(li, x), j(li + 1, x));
            let (nm, n0, np) = (n(li - 1, x), n(li, x), n(li + 1, x));
            let r3 = r.powi(3);
            BesselSquareIntegrals {
                jj: 0.5 * r3 * (j0 * j0 - jm * jp),
                nn: 0.5 * r3 * (n0 * n0 - nm * np),
                jn: 0.25 * r3 * (2.0 * j0 * n0 - jm * np - jp * nm),
            }
        }
        Carrier::Imaginary => bessel_square_integrals_imag(li, k, r),
    })
}

fn bessel_square_integrals_imag(li: i32, k: f64, r: f64) -> BesselSquareIntegrals {
    square_integrals(li, k, r, kk)
}

/// Square integrals of `m_l` and an irregular carrier with the `K_l` recurrences.
fn square_integrals(li: i32, k: f64, r: f64, irregular: fn(i32, f64) -> f64) -> BesselSquareIntegrals {
    let x = k * r;
    let (mm, m0, mp) = (mj(li - 1, x), mj(li, x), mj(li + 1, x));
    let (km, k0, kp) = (irregular(li - 1, x), irregular(li, x), irregular(li + 1, x));
    let r3 = r.powi(3);
    BesselSquareIntegrals {
        jj: 0.5 * r3 * (m0 * m0 - mm * mp),
        nn: 0.5 * r3 * (k0 * k0 - km * kp),
        jn: 0.25 * r3 * (2.0 * m0 * k0 + mm * kp + mp * km),
    }
}

/// Explicit `l = 0, 1` specializations.
pub mod explicit {
    pub fn soft_sphere_a0(k0: f64, radius: f64) -> f64 {
        let x = k0 * radius;
        radius * (1.0 - x.tanh() / x)
    }

    pub fn soft_sphere_a1_cubed(k0: f64, radius: f64) -> f64 {
        let x = k0 * radius;
        radius.powi(3) * (3.0 + x * x - 3.0 * x / x.tanh()) / (x * x)
    }

    pub fn soft_sphere_r0(k0: f64, radius: f64) -> f64 {
        let x = k0 * radius;
        let t = 1.0 - x.tanh() / x;
        radius - radius / (3.0 * t * t) + radius / (x * x * t)
    }

    pub fn soft_sphere_r1(k0: f64, radius: f64) -> f64 {
        let x = k0 * radius;
        let a1 = soft_sphere_a1_cubed(k0, radius).cbrt();
        let num = -2.0 * x * (x * x - 5.0) + 2.0 * x * (10.0 + x * x) * (2.0 * x).cosh()
            - 5.0 * (3.0 + 2.0 * x * x) * (2.0 * x).sinh();
        let d = -3.0 * x * x.cosh() + (3.0 + x * x) * x.sinh();
        -3.0 * k0 * a1 * a1 * num / (10.0 * d * d)
    }

    pub fn spherical_well_a0(k0: f64, radius: f64) -> f64 {
        let x = k0 * radius;
        radius * (1.0 - x.tan() / x)
    }

    pub fn spherical_well_a1_cubed(k0: f64, radius: f64) -> f64 {
        let x = k0 * radius;
        radius.powi(3) * (x * x - 3.0 + 3.0 * x / x.tan()) / (x * x)
    }

    pub fn spherical_well_r0(k0: f64, radius: f64) -> f64 {
        let x = k0 * radius;
        let t = 1.0 - x.tan() / x;
        radius - radius / (3.0 * t * t) - radius / (x * x * t)
    }

    pub fn spherical_well_r1(k0: f64, radius: f64) -> f64 {
        let x = k0 * radius;
        let a1 = spherical_well_a1_cubed(k0, radius).cbrt();
        let num = 2.0 * x * (5.0 + x * x) + 2.0 * x * (10.0 - x * x) * (2.0 * x).cos()
            - 5.0 * (3.0 - 2.0 * x * x) * (2.0 * x).sin();
        let d = 3.0 * x * x.cos() - (3.0 - x * x) * x.sin();
        -3.0 * k0 * a1 * a1 * num / (10.0 * d * d)
    }

    pub fn well_barrier_a0(k1: f64, r1: f64, k2: f64, r2: f64) -> f64 {
        let r12 = r1 - r2;
        let (s, c) = (k1 * r1).sin_cos();
        let (sh, ch) = ((k2 * r12).sinh(), (k2 * r12).cosh());
        let num = ch * (-k1 * k2 * r2 * c + k2 * s) + sh * (k2 * k2 * r2 * s - k1 * c);
        let den = -k1 * k2 * c * ch + k2 * k2 * s * sh;
        num / den
    }

    pub fn well_barrier_a1_cubed(k1: f64, r1: f64, k2: f64, r2: f64) -> f64 {
        let r12 = r1 - r2;
        let (s, c) = (k1 * r1).sin_cos();
        let (sh, ch) = ((k2 * r12).sinh(), (k2 * r12).cosh());
        let (k1s, k2s) = (k1 * k1, k2 * k2);
        let p1 = ch
            * (3.0 * k1 * k2.powi(3) * r1 * r2 * r2 * c
                + k2 * r2 * (-3.0 * k2s * r2 + k1s * (3.0 * r1 - 3.0 * r2 + k2s * r1 * r2 * r2)) * s);
        let p2 = sh
            * (k1 * k2s * r1 * r2 * (3.0 + k2s * r2 * r2) * c
                - r2 * (3.0 * k2s + 3.0 * k1s + k2s * k2s * r2 * r2 + k1s * k2s * r2 * (-3.0 * r1 + r2)) * s);
        let d1 = k1s * k2.powi(3) * r1 * s * ch + (k1 * k2s * k2s * r1 * c - k2s * (k1s + k2s) * s) * sh;
        (p1 + p2) / d1
    }

    pub fn well_barrier_r0(k1: f64, r1: f64, k2: f64, r2: f64) -> f64 {
        let r12 = r1 - r2;
        let (s, c) = (k1 * r1).sin_cos();
        let (s2, c2) = (2.0 * k1 * r1).sin_cos();
        let (k1s, k2s) = (k1 * k1, k2 * k2);
        let p3 = 2.0
            * k1
            * k2
            * (2.0 * k2 * r12).cosh()
            * (r2 * (3.0 + k2s * r2 * r2) * (k1s + k2s + (k1s - k2s) * c2)
                - 3.0 * k1 * (1.0 + 2.0 * k2s * r2 * r2) * s2);
        let p4 = 2.0
            * k2
            * (-3.0 * k1 * (k1s + k2s) * r1
                + k1 * (k1s - k2s) * k2s * r2.powi(3)
                + (k1s + k2s) * (k1 * (-3.0 * r1 + k2s * r2.powi(3)) * c2 + 3.0 * s2));
        let p5 = k1
            * (3.0 * (1.0 + 2.0 * k2s * r2 * r2) * (k1s + k2s + (k1s - k2s) * c2)
                - 4.0 * k1 * k2s * r2 * (3.0 + k2s * r2 * r2) * s2)
            * (2.0 * k2 * r12).sinh();
        let inner = k2 * (k2 * r12).cosh() * (k1 * r2 * c - s) + (k1 * c - k2s * r2 * s) * (k2 * r12).sinh();
        let d2 = 12.0 * k1 * k2 * inner * inner;
        (p3 + p4 + p5) / d2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::simpson_fn;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn hard_sphere_values() {
        let p0 = hard_sphere_params(0, 1.0).unwrap();
        assert_eq!((p0.a, p0.r), (1.0, 2.0 / 3.0));
        assert_eq!(hard_sphere_params(1, 1.0).unwrap().r, -6.0 / 5.0);
        assert!(rel(hard_sphere_params(2, 1.0).unwrap().r, -10.0 / 21.0) < 1e-15);
        for l in 0..=L_MAX {
            assert_eq!(hard_sphere_params(l, 2.5).unwrap().a, 2.5);
        }
    }

    #[test]
    fn soft_sphere_reference_values() {
        // 30-digit reference values
        assert!(rel(soft_sphere_a(0, 1.0, 1.0).unwrap(), 1.0 - 1f64.tanh()) < 1e-15);
        let r0 = [
            (0.5, -4.2732188088501771),
            (1.0, -0.67016046978513651),
            (2.0, 0.24029295091996621),
            (5.0, 0.52918917566395245),
        ];
        let r1 = [
            (0.5, -1.1902309971531187),
            (1.0, -0.87763862906900577),
            (2.0, -0.82015527380072933),
            (5.0, -0.97573007336026457),
        ];
        for (x, v) in r0 {
            assert!(rel(soft_sphere_r(0, x, 1.0).unwrap(), v) < 1e-12, "x={x}");
        }
        for (x, v) in r1 {
            assert!(rel(soft_sphere_r(1, x, 1.0).unwrap(), v) < 1e-12, "x={x}");
        }
        assert!(rel(soft_sphere_params(1, 1.0, 1.0).unwrap().c1, 0.06089414350200609) < 1e-13);
        assert!(rel(soft_sphere_params(2, 1.0, 1.0).unwrap().c1, 0.02735975267337443) < 1e-12);
    }

    #[test]
    fn soft_sphere_limits() {
        assert_eq!(soft_sphere_a(0, 0.0, 1.0).unwrap(), 0.0);
        assert!(soft_sphere_r(0, 0.0, 1.0).is_err());
        assert!(rel(soft_sphere_r(0, 400.0, 1.0).unwrap(), 2.0 / 3.0) < 1e-2);
        for l in 0..=L_MAX {
            let hs = hard_sphere_params(l, 1.0).unwrap();
            let p = soft_sphere_params(l, 1e5, 1.0).unwrap();
            assert!(rel(p.a, hs.a) < 1e-3);
            assert!(rel(p.r, hs.r) < 1e-3, "l={l}: {} vs {}", p.r, hs.r);
        }
    }

    #[test]
    fn spherical_well_reference_values() {
        assert!(rel(spherical_well_a(0, PI / 4.0, 1.0).unwrap(), 1.0 - 4.0 / PI) < 1e-14);
        assert!(rel(spherical_well_a(0, PI, 1.0).unwrap(), 1.0) < 1e-14);
        let r0 = [(0.5, 5.3246221443246527), (1.0, 1.7211842930323504), (1.2, 1.3523792537670453), (2.0, 0.80439968074344374), (5.0, 0.85748249673497682)];
        let r1 = [(0.5, 1.0445979518727473), (1.0, 0.50890824241059753), (1.2, 0.366554733908845), (2.0, -0.19074395682047929), (5.0, -1.2454988299299576)];
        for (x, v) in r0 {
            assert!(rel(spherical_well_r(0, x, 1.0).unwrap(), v) < 1e-12, "x={x}");
        }
        for (x, v) in r1 {
            assert!(rel(spherical_well_r(1, x, 1.0).unwrap(), v) < 1e-12, "x={x}");
        }
    }

    #[test]
    fn spherical_well_pole_is_rejected() {
        assert!(matches!(spherical_well_params(0, PI / 2.0, 1.0), Err(Error::ResonantInput(_))));
        let near = spherical_well_params(0, PI / 2.0 + 1e-9, 1.0).unwrap();
        assert!(near.flags.near_resonance);
        assert!(near.a > 0.0);
        assert!(spherical_well_a(0, PI / 2.0 - 1e-9, 1.0).unwrap() < 0.0);
    }

    #[test]
    fn spherical_well_node_of_j_l() {
        // at x = pi, j_0 vanishes and both normalizations must agree
        let p = spherical_well_params(0, PI, 1.0).unwrap();
        let q = spherical_well_params(0, PI * (1.0 + 1e-7), 1.0).unwrap();
        assert!(rel(p.c2, q.c2) < 1e-5);
    }

    #[test]
    fn explicit_forms_match_general() {
        for i in 0..20 {
            let x = 0.3 + 0.37 * i as f64;
            let rad = 0.5 + 0.1 * i as f64;
            let k0 = x / rad;
            assert!(rel(explicit::soft_sphere_a0(k0, rad), soft_sphere_a(0, k0, rad).unwrap()) < 1e-10);
            assert!(rel(explicit::soft_sphere_a1_cubed(k0, rad), soft_sphere_params(1, k0, rad).unwrap().c1) < 1e-10);
            assert!(rel(explicit::soft_sphere_r0(k0, rad), soft_sphere_r(0, k0, rad).unwrap()) < 1e-10);
            assert!(rel(explicit::soft_sphere_r1(k0, rad), soft_sphere_r(1, k0, rad).unwrap()) < 1e-10);
            assert!(rel(explicit::spherical_well_a0(k0, rad), spherical_well_a(0, k0, rad).unwrap()) < 1e-10);
            assert!(rel(explicit::spherical_well_a1_cubed(k0, rad), spherical_well_params(1, k0, rad).unwrap().c1) < 1e-10);
            assert!(rel(explicit::spherical_well_r0(k0, rad), spherical_well_r(0, k0, rad).unwrap()) < 1e-9);
            assert!(rel(explicit::spherical_well_r1(k0, rad), spherical_well_r(1, k0, rad).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn well_is_continuation_of_soft_sphere() {
        // c1 as a power series in q = k0^2, valid for either sign of q
        let series_c1 = |l: i32, q: f64, rad: f64| {
            let g = |m: i32| {
                let (mut t, mut s) = (1.0, 1.0);
                for k in 0..200 {
                    t *= q * rad * rad / (2.0 * (k + 1) as f64 * (2 * m + 2 * k + 3) as f64);
                    s += t;
                }
                s
            };
            let w = q * rad * rad / (2 * l + 3) as f64 * g(l + 1);
            rad.powi(2 * l + 1) * w / ((2 * l + 1) as f64 * g(l) + w)
        };
        for l in 0..=3u32 {
            for &x in &[0.3, 1.0, 2.2, 4.0, 5.5] {
                let sw = spherical_well_params(l, x, 1.0).unwrap().c1;
                let ss = soft_sphere_params(l, x, 1.0).unwrap().c1;
                assert!(rel(sw, series_c1(l as i32, -x * x, 1.0)) < 1e-10, "l={l} x={x}");
                assert!(rel(ss, series_c1(l as i32, x * x, 1.0)) < 1e-10, "l={l} x={x}");
            }
        }
    }

    #[test]
    fn c2_is_continuous_across_zero_of_a() {
        // a_0 of the well vanishes where tan x = x, near x = 4.4934
        let root = 4.493_409_457_909_064;
        let lo = spherical_well_params(0, root - 1e-6, 1.0).unwrap();
        let hi = spherical_well_params(0, root + 1e-6, 1.0).unwrap();
        assert!(lo.a * hi.a < 0.0);
        assert!(lo.c2.is_finite() && hi.c2.is_finite());
        assert!((lo.c2 - hi.c2).abs() < 1e-4);
        assert!(lo.r.abs() > 1e5);
    }

    fn wb(k1: f64, r1: f64, k2: f64, r2: f64) -> PotentialSpec {
        PotentialSpec::WellBarrier { k1, r1, k2, r2 }
    }

    #[test]
    fn well_barrier_reference_values() {
        let cases = [
            ((1.3, 0.6, 2.1, 1.0), 0.48111989646, 0.0999050295973),
            ((2.5, 0.4, 0.7, 1.3), 0.15778092915, -6.40304866479),
            ((0.9, 1.0, 3.0, 1.5), 1.14559424625, 0.742988192112),
        ];
        for ((k1, r1, k2, r2), a, r) in cases {
            let p = well_barrier_params(0, &wb(k1, r1, k2, r2)).unwrap();
            assert!(rel(p.a, a) < 1e-10);
            assert!(rel(p.r, r) < 1e-10);
        }
    }

    #[test]
    fn well_barrier_explicit_forms() {
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let (k1, k2) = (0.2 + 3.0 * next(), 0.2 + 3.0 * next());
            let r2 = 0.5 + 1.5 * next();
            let r1 = r2 * (0.1 + 0.8 * next());
            let s = wb(k1, r1, k2, r2);
            let p0 = well_barrier_params(0, &s).unwrap();
            let p1 = well_barrier_params(1, &s).unwrap();
            assert!(rel(explicit::well_barrier_a0(k1, r1, k2, r2), p0.a) < 1e-10);
            assert!(rel(explicit::well_barrier_r0(k1, r1, k2, r2), p0.r) < 1e-9);
            assert!(rel(explicit::well_barrier_a1_cubed(k1, r1, k2, r2), p1.c1) < 1e-10);
        }
    }

    #[test]
    fn well_barrier_reductions() {
        for l in 0..=2 {
            // vanishing well radius leaves a soft sphere of radius R2
            let thin = well_barrier_params(l, &wb(1.0, 1e-7, 1.7, 1.2)).unwrap();
            let ss = soft_sphere_params(l, 1.7, 1.2).unwrap();
            assert!(rel(thin.c1, ss.c1) < 1e-6, "l={l}");
            assert!(rel(thin.c2, ss.c2) < 1e-6, "l={l}");
            // vanishing barrier width leaves a spherical well of radius R1
            let narrow = well_barrier_params(l, &wb(1.3, 1.0, 2.0, 1.0 + 1e-9)).unwrap();
            let sw = spherical_well_params(l, 1.3, 1.0).unwrap();
            assert!(rel(narrow.c1, sw.c1) < 1e-6, "l={l}");
            assert!(rel(narrow.c2, sw.c2) < 1e-6, "l={l}");
            let flat = well_barrier_params(l, &wb(1.3, 1.0, 1e-6, 1.4)).unwrap();
            assert!(rel(flat.c1, sw.c1) < 1e-6, "l={l}");
            let zero = well_barrier_params(l, &wb(1.3, 1.0, 0.0, 1.4)).unwrap();
            assert_eq!(zero.c1, sw.c1);
        }
    }

    #[test]
    fn well_barrier_aux_continuity() {
        let (k1, r1, k2, r2) = (1.3, 0.6, 2.1, 1.0);
        for l in 0..=3u32 {
            let li = l as i32;
            let aux = well_barrier_aux(l, &wb(k1, r1, k2, r2)).unwrap();
            let c1 = well_barrier_params(l, &wb(k1, r1, k2, r2)).unwrap().c1;
            let inner = aux.n1 * r1 * j(li, k1 * r1);
            let outer = |r: f64| aux.n2 * r * (mj(li, k2 * r) + aux.m2 * kk(li, k2 * r));
            assert!(rel(inner, outer(r1)) < 1e-12);
            assert!(rel(outer(r2), r2.powi(li + 1) - c1 * r2.powi(-li)) < 1e-12);
        }
    }

    #[test]
    fn square_integrals_against_quadrature() {
        for l in 0..=4u32 {
            let li = l as i32;
            let (k, a, b) = (1.7, 0.3, 2.9);
            let real = |r| bessel_square_integrals(l, k, r, Carrier::Real).unwrap();
            let imag = |r| bessel_square_integrals(l, k, r, Carrier::Imaginary).unwrap();
            let q = |f: &dyn Fn(f64) -> f64| simpson_fn(f, a, b, 4000);
            let jj = q(&|r: f64| r * r * j(li, k * r).powi(2));
            let nn = q(&|r: f64| r * r * n(li, k * r).powi(2));
            let jn = q(&|r: f64| r * r * j(li, k * r) * n(li, k * r));
            assert!(rel(real(b).jj - real(a).jj, jj) < 1e-9);
            assert!(rel(real(b).nn - real(a).nn, nn) < 1e-9);
            assert!(rel(real(b).jn - real(a).jn, jn) < 1e-9);
            let mm = q(&|r: f64| r * r * mj(li, k * r).powi(2));
            let kkq = q(&|r: f64| r * r * kk(li, k * r).powi(2));
            let mk = q(&|r: f64| r * r * mj(li, k * r) * kk(li, k * r));
            assert!(rel(imag(b).jj - imag(a).jj, mm) < 1e-9);
            assert!(rel(imag(b).nn - imag(a).nn, kkq) < 1e-9);
            assert!(rel(imag(b).jn - imag(a).jn, mk) < 1e-9);
        }
    }

    #[test]
    fn square_integral_l0_trig_form() {
        let (k, r) = (1.3f64, 0.8f64);
        let x = k * r;
        let j0 = x.sin() / x;
        let jm = x.cos() / x;
        let j1 = x.sin() / (x * x) - x.cos() / x;
        let v = bessel_square_integrals(0, k, r, Carrier::Real).unwrap().jj;
        assert!(rel(v, 0.5 * r.powi(3) * (j0 * j0 - jm * j1)) < 1e-14);
    }

    #[test]
    fn square_integral_derivative() {
        let (k, r, h) = (0.9, 1.4, 1e-4);
        for l in 0..=6u32 {
            let f = |r| bessel_square_integrals(l, k, r, Carrier::Real).unwrap().jj;
            let d = (f(r + h) - f(r - h)) / (2.0 * h);
            assert!((d - r * r * j(l as i32, k * r).powi(2)).abs() < 1e-8);
        }
    }
}
