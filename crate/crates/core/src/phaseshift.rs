//! Finite-energy phase shifts and the low-k fit of `k^{2l+1} cot(delta)`.

use rayon::prelude::*;

use crate::potentials::PotentialSpec;
use crate::solver::{integrate, integrate_segments, signed_root, RadialGrid, SUPPORT_EPS};
use crate::special::{expansion_constants, j, kd, mj, n};
use crate::{Error, Result};

/// Samples with `|cot(delta)|` below this are treated as poles.
pub const COT_POLE: f64 = 1e-6;
/// Upper bound on `k R` for the finite-energy solver.
pub const MAX_KR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseShiftSample {
    pub k: f64,
    pub tan_delta: f64,
}

/// Least-squares line `k^{2l+1} cot(delta) = alpha + beta k^2` and the
/// parameters it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowKFit {
    pub a: f64,
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    /// RMS of the fit residual relative to the mean of the data.
    pub residual: f64,
}

/// `tan(delta) = j_l(kR) / n_l(kR)`.
pub fn hard_sphere_tan_delta(l: u32, kr: f64) -> Result<f64> {
    if !(kr > 0.0) {
        return Err(Error::InvalidSpec(format!("kR must be positive, got {kr}")));
    }
    let li = l as i32;
    let nl = crate::special::sph_bessel_n(li, kr)?;
    if nl.abs() < 1e-300 {
        return Err(Error::CotPole(kr));
    }
    Ok(j(li, kr) / nl)
}

/// Numerov solution at energy `k^2`, matched to `C r [j_l(kr) - tan(delta) n_l(kr)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteKSolution {
    pub k: f64,
    pub l: u32,
    pub grid: RadialGrid,
    pub u: Vec<f64>,
    /// Amplitude `C` of the regular exterior component.
    pub amplitude: f64,
    pub tan_delta: f64,
    support: f64,
    breakpoints: Vec<f64>,
}

/// Integrates at energy `k^2` and matches on two exterior nodes one
/// characteristic length apart.
pub fn solve_finite_k(spec: &PotentialSpec, l: u32, k: f64, grid: Option<RadialGrid>) -> Result<FiniteKSolution> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidSpec(format!("k must be positive, got {k}")));
    }
    if k * spec.characteristic_length() >= MAX_KR {
        return Err(Error::InvalidSpec(format!("k R = {} is outside the low-energy regime", k * spec.characteristic_length())));
    }
    let grid = match grid {
        Some(g) => g,
        None => RadialGrid::for_spec(spec, l, None, None)?,
    };
    let support = spec.effective_support(l, SUPPORT_EPS)?;
    let u = integrate(spec, l, &grid, k * k)?;
    let h = grid.h;
    // matching just beyond the support limits the roundoff carried by the recurrence
    let i1 = (support / h).ceil() as usize + 2;
    let i2 = i1 + (spec.characteristic_length() / h).round() as usize;
    if i2 > grid.n {
        return Err(Error::InvalidGrid(format!("r_max = {} lies inside the matching region", grid.r_max())));
    }
    let li = l as i32;
    let (r1, r2) = (i1 as f64 * h, i2 as f64 * h);
    let (j1, j2, n1, n2) = (j(li, k * r1), j(li, k * r2), n(li, k * r1), n(li, k * r2));
    // u_i / r_i = C j_i - D n_i with D = C tan(delta)
    let (v1, v2) = (u[i1] / r1, u[i2] / r2);
    let det = -j1 * n2 + j2 * n1;
    let c = (-v1 * n2 + v2 * n1) / det;
    let d = (j1 * v2 - j2 * v1) / det;
    if !(c.is_finite() && d.is_finite()) || c == 0.0 {
        return Err(Error::Normalization(format!("finite-k matching failed at k = {k}")));
    }
    let breakpoints = spec.discontinuities().iter().map(|d| d.r).filter(|&r| r < support).collect();
    Ok(FiniteKSolution { k, l, grid, u, amplitude: c, tan_delta: d / c, support, breakpoints })
}

/// Phase shift by matching the Numerov solution to free waves.
pub fn tan_delta_matching(spec: &PotentialSpec, l: u32, k: f64, grid: Option<RadialGrid>) -> Result<PhaseShiftSample> {
    let sol = solve_finite_k(spec, l, k, grid)?;
    if (1.0 / sol.tan_delta).abs() < COT_POLE {
        return Err(Error::CotPole(k));
    }
    Ok(PhaseShiftSample { k, tan_delta: sol.tan_delta })
}

/// `tan(delta) = -A_l k^{l+1} int U r j_l(kr) u / N dr` with `N = C A_l k^l`.
pub fn tan_delta_integral(spec: &PotentialSpec, sol: &FiniteKSolution) -> Result<f64> {
    let li = sol.l as i32;
    let (k, h) = (sol.k, sol.grid.h);
    let f = |i: usize, probe: f64| {
        let r = i as f64 * h;
        spec.reduced_potential(probe).unwrap_or(0.0) * r * j(li, k * r) * sol.u[i]
    };
    let integral = integrate_segments(f, h, sol.support, &sol.breakpoints)?;
    Ok(-k * integral / sol.amplitude)
}

/// Exact phase shift of a piecewise-constant potential by region-wise
/// matching of Bessel solutions.
pub fn piecewise_tan_delta(spec: &PotentialSpec, l: u32, k: f64) -> Result<f64> {
    let li = l as i32;
    let regions: Vec<(f64, f64)> = match *spec {
        PotentialSpec::HardSphere { radius } => return hard_sphere_tan_delta(l, k * radius),
        PotentialSpec::SoftSphere { k0, radius } => vec![(radius, k0 * k0)],
        PotentialSpec::SphericalWell { k0, radius } => vec![(radius, -k0 * k0)],
        PotentialSpec::WellBarrier { k1, r1, k2, r2 } => vec![(r1, -k1 * k1), (r2, k2 * k2)],
        _ => return Err(Error::Unsupported("exact matching needs a piecewise-constant potential".into())),
    };
    // (value, slope) of the regular solution at the current boundary
    let mut state: Option<(f64, f64)> = None;
    let mut inner = 0.0;
    for &(outer, u) in &regions {
        let q2 = k * k - u;
        let basis = |r: f64| region_basis(li, q2, r);
        let coeff = match state {
            None => 0.0,
            Some((v, s)) => {
                let (f, fp, g, gp) = basis(inner);
                (fp * v - f * s) / (g * s - gp * v)
            }
        };
        let (f, fp, g, gp) = basis(outer);
        state = Some((f + coeff * g, fp + coeff * gp));
        inner = outer;
    }
    let (v, s) = state.expect("at least one region");
    let (f, fp, g, gp) = region_basis(li, k * k, inner);
    let beta = (fp * v - f * s) / (g * s - gp * v);
    Ok(-beta)
}

/// `(f, f', g, g')` for the regular and irregular solutions `r F(qr)` in a
/// region where `q^2 = k^2 - U`.
fn region_basis(li: i32, q2: f64, r: f64) -> (f64, f64, f64, f64) {
    let l = li as f64;
    if q2 > 0.0 {
        let q = q2.sqrt();
        let x = q * r;
        let (jl, nl) = (j(li, x), n(li, x));
        (r * jl, (l + 1.0) * jl - x * j(li + 1, x), r * nl, (l + 1.0) * nl - x * n(li + 1, x))
    } else if q2 < 0.0 {
        let q = (-q2).sqrt();
        let x = q * r;
        let (ml, kl) = (mj(li, x), kd(li, x));
        (r * ml, (l + 1.0) * ml + x * mj(li + 1, x), r * kl, (l + 1.0) * kl - x * kd(li + 1, x))
    } else {
        (r.powi(li + 1), (l + 1.0) * r.powi(li), r.powi(-li), -l * r.powi(-li - 1))
    }
}

/// Linear fit of `k^{2l+1} cot(delta)` against `k^2`.
pub fn fit_low_k(samples: &[PhaseShiftSample], l: u32) -> Result<LowKFit> {
    if samples.len() < 4 {
        return Err(Error::IllConditioned(format!("{} samples; at least 4 required", samples.len())));
    }
    let kmin = samples.iter().map(|s| s.k).fold(f64::INFINITY, f64::min);
    let kmax = samples.iter().map(|s| s.k).fold(0.0, f64::max);
    if !(kmax >= 3.0 * kmin) {
        return Err(Error::IllConditioned(format!("k range [{kmin}, {kmax}] spans less than a factor 3")));
    }
    let c = expansion_constants(l)?;
    let p = 2 * l as i32 + 1;
    let xs: Vec<f64> = samples.iter().map(|s| s.k * s.k).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.k.powi(p) / s.tan_delta).collect();
    let m = xs.len() as f64;
    let (xm, ym) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let beta = sxy / sxx;
    let alpha = ym - beta * xm;
    let rms = (xs.iter().zip(&ys).map(|(x, y)| (y - alpha - beta * x).powi(2)).sum::<f64>() / m).sqrt();
    let ratio = c.b / c.a;
    let c1 = -ratio / alpha;
    let a = signed_root(c1, 2 * l + 1);
    let r = 2.0 * beta * a.powi(2 * l as i32) / ratio;
    Ok(LowKFit { a, r, alpha, beta, residual: rms / ym.abs() })
}

/// `count` logarithmically spaced momenta in `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1).max(1) as f64))
        .collect()
}

/// Default momenta: 8 points in `[1e-3, 1e-2] / R`.
pub fn default_momenta(spec: &PotentialSpec) -> Vec<f64> {
    let rc = spec.characteristic_length();
    log_spaced(1e-3 / rc, 1e-2 / rc, 8)
}

/// Phase shifts at `momenta` in parallel; poles are skipped by nudging `k`.
pub fn sample_phase_shifts(spec: &PotentialSpec, l: u32, momenta: &[f64], grid: Option<RadialGrid>) -> Result<Vec<PhaseShiftSample>> {
    let grid = match grid {
        Some(g) => g,
        None => RadialGrid::for_spec(spec, l, None, None)?,
    };
    momenta
        .par_iter()
        .map(|&k| {
            let mut kq = k;
            for _ in 0..5 {
                match tan_delta_matching(spec, l, kq, Some(grid)) {
                    Err(Error::CotPole(_)) => kq *= 1.01,
                    other => return other,
                }
            }
            Err(Error::CotPole(k))
        })
        .collect()
}

/// Scattering length and effective range from the phase-shift route.
pub fn low_k_parameters(spec: &PotentialSpec, l: u32, grid: Option<RadialGrid>) -> Result<LowKFit> {
    let samples = sample_phase_shifts(spec, l, &default_momenta(spec), grid)?;
    fit_low_k(&samples, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn hard_sphere_ratio() {
        assert!((hard_sphere_tan_delta(0, 0.3).unwrap() + 0.3f64.tan()).abs() < 1e-15);
        assert!(hard_sphere_tan_delta(0, std::f64::consts::PI).unwrap().abs() < 1e-15);
        assert!(hard_sphere_tan_delta(1, 0.0).is_err());
        // leading low-k term -(A/B) x^{2l+1}
        for l in 0..4u32 {
            let c = expansion_constants(l).unwrap();
            let x = 1e-3;
            let t = hard_sphere_tan_delta(l, x).unwrap();
            assert!(rel(t, -c.a / c.b * x.powi(2 * l as i32 + 1)) < 1e-5, "l={l}");
        }
    }

    #[test]
    fn piecewise_matches_soft_sphere_closed_form() {
        for &(k0, k) in &[(1.0f64, 0.01f64), (2.0, 0.3), (0.5, 0.2), (5.0, 0.45)] {
            let q = (k0 * k0 - k * k).sqrt();
            let t = k.tan();
            let expected = (k * q.tanh() - q * t) / (q + k * t * q.tanh());
            let spec = PotentialSpec::SoftSphere { k0, radius: 1.0 };
            let got = piecewise_tan_delta(&spec, 0, k).unwrap();
            assert!(rel(got, expected) < 1e-10, "k0={k0} k={k}: {got} vs {expected}");
        }
    }

    #[test]
    fn piecewise_low_k_limit_matches_analytic_c1() {
        let specs = [
            PotentialSpec::SoftSphere { k0: 1.3, radius: 1.0 },
            PotentialSpec::SphericalWell { k0: 1.2, radius: 1.0 },
            PotentialSpec::WellBarrier { k1: 1.3, r1: 0.6, k2: 2.1, r2: 1.0 },
        ];
        for spec in &specs {
            for l in 0..3u32 {
                let c = expansion_constants(l).unwrap();
                let p = analytic_params(spec, l);
                let k = 1e-3f64;
                let lead = -c.a / c.b * k.powi(2 * l as i32 + 1) * p.c1;
                let t = piecewise_tan_delta(spec, l, k).unwrap();
                assert!(rel(t, lead) < 1e-4, "{spec:?} l={l}");
            }
        }
    }

    fn analytic_params(spec: &PotentialSpec, l: u32) -> crate::ScatteringParameters {
        match *spec {
            PotentialSpec::SoftSphere { k0, radius } => analytic::soft_sphere_params(l, k0, radius).unwrap(),
            PotentialSpec::SphericalWell { k0, radius } => analytic::spherical_well_params(l, k0, radius).unwrap(),
            _ => analytic::well_barrier_params(l, spec).unwrap(),
        }
    }

    #[test]
    fn numerov_matching_agrees_with_exact_matching() {
        let specs = [
            PotentialSpec::SoftSphere { k0: 2.0, radius: 1.0 },
            PotentialSpec::SphericalWell { k0: 1.0, radius: 1.0 },
            PotentialSpec::WellBarrier { k1: 2.5, r1: 0.4, k2: 0.7, r2: 1.3 },
        ];
        for spec in &specs {
            for l in 0..3u32 {
                for &k in &[0.01, 0.1, 0.3] {
                    let num = tan_delta_matching(spec, l, k, None).unwrap().tan_delta;
                    let exact = piecewise_tan_delta(spec, l, k).unwrap();
                    assert!(rel(num, exact) < 1e-7, "{spec:?} l={l} k={k}: {num} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn well_low_k_leading_order() {
        let spec = PotentialSpec::SphericalWell { k0: 1.0, radius: 1.0 };
        let a0 = analytic::spherical_well_a(0, 1.0, 1.0).unwrap();
        let k = 1e-2;
        let t = tan_delta_matching(&spec, 0, k, None).unwrap().tan_delta;
        assert!(rel(t, -k * a0) < 1e-3);
    }

    #[test]
    fn integral_route_agrees_with_matching() {
        let spec = PotentialSpec::SoftSphere { k0: 1.0, radius: 1.0 };
        let sol = solve_finite_k(&spec, 0, 1e-2, None).unwrap();
        let t = tan_delta_integral(&spec, &sol).unwrap();
        assert!(rel(t, sol.tan_delta) < 1e-6);
        assert!(t < 0.0);
        let well = PotentialSpec::WellBarrier { k1: 1.3, r1: 0.6, k2: 2.1, r2: 1.0 };
        for l in 0..3u32 {
            let sol = solve_finite_k(&well, l, 0.2, None).unwrap();
            assert!(rel(tan_delta_integral(&well, &sol).unwrap(), sol.tan_delta) < 1e-6, "l={l}");
        }
    }

    #[test]
    fn zero_potential_has_no_phase_shift() {
        let spec = PotentialSpec::SoftSphere { k0: 0.0, radius: 1.0 };
        let sol = solve_finite_k(&spec, 1, 0.1, None).unwrap();
        assert!(sol.tan_delta.abs() < 1e-12);
        assert!(tan_delta_integral(&spec, &sol).unwrap().abs() < 1e-12);
    }

    #[test]
    fn matching_rejects_high_k_and_hard_sphere() {
        let spec = PotentialSpec::SoftSphere { k0: 1.0, radius: 1.0 };
        assert!(tan_delta_matching(&spec, 0, 0.6, None).is_err());
        let hs = PotentialSpec::HardSphere { radius: 1.0 };
        assert_eq!(tan_delta_matching(&hs, 0, 0.1, None), Err(Error::AnalyticOnly));
    }

    #[test]
    fn fit_recovers_exact_line() {
        let (a, r) = (1.7f64, -0.4f64);
        for l in 0..3u32 {
            let c = expansion_constants(l).unwrap();
            let ratio = c.b / c.a;
            let alpha = -ratio / a.powi(2 * l as i32 + 1);
            let beta = ratio * r / 2.0 / a.powi(2 * l as i32);
            let samples: Vec<_> = log_spaced(1e-2, 1e-1, 6)
                .into_iter()
                .map(|k| PhaseShiftSample { k, tan_delta: k.powi(2 * l as i32 + 1) / (alpha + beta * k * k) })
                .collect();
            let fit = fit_low_k(&samples, l).unwrap();
            assert!(rel(fit.a, a) < 1e-12 && rel(fit.r, r) < 1e-10, "l={l}: {fit:?}");
            assert!(fit.residual < 1e-12);
        }
    }

    #[test]
    fn fit_hard_sphere_samples() {
        let samples: Vec<_> = log_spaced(1e-3, 1e-2, 8)
            .into_iter()
            .map(|k| PhaseShiftSample { k, tan_delta: hard_sphere_tan_delta(0, k).unwrap() })
            .collect();
        let fit = fit_low_k(&samples, 0).unwrap();
        assert!(rel(fit.a, 1.0) < 1e-8);
        assert!(rel(fit.r, 2.0 / 3.0) < 1e-4);
    }

    #[test]
    fn fit_preconditions() {
        let s = |k: f64| PhaseShiftSample { k, tan_delta: -k };
        assert!(matches!(fit_low_k(&[s(0.1), s(0.2), s(0.3)], 0), Err(Error::IllConditioned(_))));
        assert!(matches!(fit_low_k(&[s(0.1), s(0.12), s(0.14), s(0.2)], 0), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn low_k_route_matches_analytic() {
        let spec = PotentialSpec::SoftSphere { k0: 1.0, radius: 1.0 };
        for l in 0..2u32 {
            let fit = low_k_parameters(&spec, l, None).unwrap();
            let p = analytic::soft_sphere_params(l, 1.0, 1.0).unwrap();
            assert!(rel(fit.a, p.a) < 1e-4, "l={l}: {} vs {}", fit.a, p.a);
            assert!(rel(fit.r, p.r) < 1e-3, "l={l}: {} vs {}", fit.r, p.r);
        }
    }

    #[test]
    fn expansion_residual_slope() {
        let specs = [
            PotentialSpec::SoftSphere { k0: 1.0, radius: 1.0 },
            PotentialSpec::SphericalWell { k0: 1.0, radius: 1.0 },
            PotentialSpec::WellBarrier { k1: 1.3, r1: 0.6, k2: 2.1, r2: 1.0 },
        ];
        for spec in &specs {
            for l in 0..3u32 {
                let c = expansion_constants(l).unwrap();
                let p = analytic_params(spec, l);
                let resid = |k: f64| {
                    let t = piecewise_tan_delta(spec, l, k).unwrap();
                    (t + c.a / c.b * k.powi(2 * l as i32 + 1) * (p.c1 + p.c2 * k * k / 2.0)).abs()
                };
                let (k1, k2) = (3e-3f64, 1e-2f64);
                let slope = (resid(k2) / resid(k1)).ln() / (k2 / k1).ln();
                assert!(slope >= (2 * l + 4) as f64, "{spec:?} l={l}: slope {slope}");
            }
        }
    }
}
