//! Strength sweeps, resonance location and the f/h split of the
//! zero-energy solution.

use std::fmt;

use rayon::prelude::*;

use crate::analytic;
use crate::potentials::PotentialSpec;
use crate::solver::{self, integrate_segments, ScatteringParameters, ZeroEnergySolution, NEAR_RESONANCE_C1, NEAR_ZERO_A};
use crate::{Error, Flags, Result};

/// How a sweep point was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Analytic,
    Numerov,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Analytic => "analytic",
            Route::Numerov => "numerov",
        }
    }
}

/// Parameters at one strength of a potential family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub strength: f64,
    /// `1 / a^{2l+1}`; zero exactly at a pole.
    pub inv_a: f64,
    pub a: f64,
    pub r: f64,
    pub c1: f64,
    pub c2: f64,
    pub flags: Flags,
    pub route: Route,
}

impl SweepPoint {
    fn from_params(strength: f64, p: &ScatteringParameters, route: Route) -> Self {
        Self { strength, inv_a: 1.0 / p.c1, a: p.a, r: p.r, c1: p.c1, c2: p.c2, flags: p.flags, route }
    }

    fn pole(strength: f64, route: Route) -> Self {
        Self {
            strength,
            inv_a: 0.0,
            a: f64::INFINITY,
            r: f64::NAN,
            c1: f64::INFINITY,
            c2: f64::NAN,
            flags: Flags { near_resonance: true, near_zero_a: false },
            route,
        }
    }
}

/// Member of the family of `base` with the given dimensionless strength:
/// `k0 R` for steps, `k1 R1` for the well-barrier (other parameters held)
/// and the signed `U0 R^2` for Poschl-Teller.
pub fn family_member(base: &PotentialSpec, strength: f64) -> Result<PotentialSpec> {
    let spec = match *base {
        PotentialSpec::SoftSphere { radius, .. } => PotentialSpec::SoftSphere { k0: strength / radius, radius },
        PotentialSpec::SphericalWell { radius, .. } => PotentialSpec::SphericalWell { k0: strength / radius, radius },
        PotentialSpec::WellBarrier { r1, k2, r2, .. } => PotentialSpec::WellBarrier { k1: strength / r1, r1, k2, r2 },
        PotentialSpec::PoschlTeller { radius, .. } => PotentialSpec::PoschlTeller { u0: strength / (radius * radius), radius },
        _ => return Err(Error::Unsupported("sweeps need a soft sphere, spherical well, well-barrier or Poschl-Teller family".into())),
    };
    spec.validate()?;
    Ok(spec)
}

/// Parameters of `spec` by the fastest valid route.
pub fn parameters(spec: &PotentialSpec, l: u32) -> Result<(ScatteringParameters, Route)> {
    let analytic = match *spec {
        PotentialSpec::HardSphere { radius } => Some(analytic::hard_sphere_params(l, radius)),
        PotentialSpec::SoftSphere { k0, radius } => Some(analytic::soft_sphere_params(l, k0, radius)),
        PotentialSpec::SphericalWell { k0, radius } => Some(analytic::spherical_well_params(l, k0, radius)),
        PotentialSpec::WellBarrier { .. } => Some(analytic::well_barrier_params(l, spec)),
        _ => None,
    };
    match analytic {
        Some(p) => Ok((p?, Route::Analytic)),
        None => Ok((solver::solve(spec, l, None)?.0, Route::Numerov)),
    }
}

/// Evaluates the family at one strength; an exact pole gives a point with `inv_a = 0`.
pub fn sweep_point(base: &PotentialSpec, l: u32, strength: f64) -> Result<SweepPoint> {
    let spec = family_member(base, strength)?;
    match parameters(&spec, l) {
        Ok((p, route)) => Ok(SweepPoint::from_params(strength, &p, route)),
        Err(Error::ResonantInput(_)) => {
            let route = if matches!(spec, PotentialSpec::PoschlTeller { .. }) { Route::Numerov } else { Route::Analytic };
            Ok(SweepPoint::pole(strength, route))
        }
        Err(e) => Err(e),
    }
}

/// `n` equally spaced strengths in `[lo, hi]`, evaluated in parallel.
pub fn sweep(base: &PotentialSpec, l: u32, lo: f64, hi: f64, n: usize) -> Result<Vec<SweepPoint>> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("a sweep needs at least 2 points, got {n}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidSpec(format!("invalid strength range [{lo}, {hi}]")));
    }
    family_member(base, hi)?;
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .into_par_iter()
        .map(|i| sweep_point(base, l, if i == n - 1 { hi } else { lo + i as f64 * step }))
        .collect()
}

/// Divergence behavior of the effective range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceKind {
    Regular,
    /// `a` crosses zero; `r` diverges while `c2` stays finite.
    ZeroADivergentR,
    /// `l = 0` resonance: `r` stays finite.
    ResonantFiniteR,
    /// `l > 0` resonance: `r -> -infinity` as `a^{2l}`.
    ResonantNegativeInfiniteR,
}

impl fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Regular => "regular",
            Self::ZeroADivergentR => "zero_a_divergent_r",
            Self::ResonantFiniteR => "resonant_finite_r",
            Self::ResonantNegativeInfiniteR => "resonant_negative_infinite_r",
        })
    }
}

pub fn classify_divergence(point: &SweepPoint, l: u32) -> DivergenceKind {
    if point.flags.near_zero_a {
        DivergenceKind::ZeroADivergentR
    } else if point.flags.near_resonance {
        if l == 0 {
            DivergenceKind::ResonantFiniteR
        } else {
            DivergenceKind::ResonantNegativeInfiniteR
        }
    } else {
        DivergenceKind::Regular
    }
}

/// Local fit `1/a^{2l+1} = (V - Vc) / C` around a pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleFit {
    pub c: f64,
    pub critical: f64,
    /// RMS fit residual relative to the RMS of the data.
    pub residual: f64,
    pub r_squared: f64,
}

/// Least-squares line through `inv_a` of the points within `window` of
/// `critical` (the pole itself excluded).
pub fn fit_pole(points: &[SweepPoint], critical: f64, window: f64) -> Result<PoleFit> {
    let mut sel: Vec<&SweepPoint> = points
        .iter()
        .filter(|p| (p.strength - critical).abs() <= window && p.strength != critical && p.inv_a != 0.0)
        .collect();
    if sel.len() < 5 {
        return Err(Error::IllConditioned(format!("{} points in the pole window; at least 5 required", sel.len())));
    }
    sel.sort_by(|a, b| a.strength.total_cmp(&b.strength));
    let changes = sel.windows(2).filter(|w| w[0].inv_a.signum() != w[1].inv_a.signum()).count();
    if changes > 1 {
        return Err(Error::IllConditioned(format!("window {window} around {critical} straddles another sign change")));
    }
    let m = sel.len() as f64;
    let xm = sel.iter().map(|p| p.strength).sum::<f64>() / m;
    let ym = sel.iter().map(|p| p.inv_a).sum::<f64>() / m;
    let sxx: f64 = sel.iter().map(|p| (p.strength - xm).powi(2)).sum();
    let sxy: f64 = sel.iter().map(|p| (p.strength - xm) * (p.inv_a - ym)).sum();
    let syy: f64 = sel.iter().map(|p| (p.inv_a - ym).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ss_res: f64 = sel.iter().map(|p| (p.inv_a - intercept - slope * p.strength).powi(2)).sum();
    let rms_y = (sel.iter().map(|p| p.inv_a * p.inv_a).sum::<f64>() / m).sqrt();
    Ok(PoleFit {
        c: 1.0 / slope,
        critical: -intercept / slope,
        residual: (ss_res / m).sqrt() / rms_y,
        r_squared: if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    pub l: u32,
    pub critical_strengths: Vec<f64>,
    pub pole_fits: Vec<PoleFit>,
    pub classifications: Vec<DivergenceKind>,
    /// Strengths where `a` crosses zero.
    pub zero_crossings: Vec<f64>,
    pub warnings: Vec<String>,
}

impl ResonanceReport {
    pub fn pole_constants(&self) -> Vec<f64> {
        self.pole_fits.iter().map(|f| f.c).collect()
    }
}

enum Root {
    Pole(f64),
    Zero(f64),
}

/// Bisects every sign change of `1/a^{2l+1}` in `points` to `tol` and
/// sorts the roots into poles and zeros of `a`.
pub fn locate_resonances(base: &PotentialSpec, l: u32, points: &[SweepPoint], tol: f64) -> Result<ResonanceReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidSpec(format!("tolerance must be positive, got {tol}")));
    }
    let len = base.characteristic_length();
    let scale = len.powi(2 * l as i32 + 1);
    let mut report = ResonanceReport {
        l,
        critical_strengths: Vec::new(),
        pole_fits: Vec::new(),
        classifications: Vec::new(),
        zero_crossings: Vec::new(),
        warnings: Vec::new(),
    };
    let roots: Vec<Root> = points
        .par_windows(2)
        .enumerate()
        .filter_map(|(i, w)| {
            let (p, q) = (&w[0], &w[1]);
            if p.inv_a == 0.0 {
                return Some(Ok(Root::Pole(p.strength)));
            }
            if i == points.len() - 2 && q.inv_a == 0.0 {
                return Some(Ok(Root::Pole(q.strength)));
            }
            if q.inv_a == 0.0 || p.inv_a.signum() == q.inv_a.signum() {
                return None;
            }
            Some(bisect(base, l, p, q, tol, scale))
        })
        .collect::<Result<_>>()?;
    for root in roots {
        match root {
            Root::Pole(x) => report.critical_strengths.push(x),
            Root::Zero(x) => report.zero_crossings.push(x),
        }
    }
    let crit = report.critical_strengths.clone();
    let neighbors: Vec<f64> = crit.iter().chain(&report.zero_crossings).copied().collect();
    let span = points.last().map_or(0.0, |p| p.strength) - points.first().map_or(0.0, |p| p.strength);
    let fits: Vec<Result<(PoleFit, DivergenceKind)>> = crit
        .par_iter()
        .map(|&vc| {
            let gap = neighbors
                .iter()
                .filter(|&&x| x != vc)
                .map(|x| (x - vc).abs())
                .fold(span.abs(), f64::min);
            let window = (1e-3 * vc.abs().max(1.0)).min(0.25 * gap);
            let local: Vec<SweepPoint> = (1..=5)
                .flat_map(|i| [-1.0, 1.0].map(|s| vc + s * window * i as f64 / 5.0))
                .map(|x| sweep_point(base, l, x))
                .collect::<Result<_>>()?;
            let fit = fit_pole(&local, vc, window)?;
            let mut at = sweep_point(base, l, vc + 0.5 * tol)?;
            at.flags.near_resonance = true;
            at.flags.near_zero_a = false;
            Ok((fit, classify_divergence(&at, l)))
        })
        .collect();
    for f in fits {
        let (fit, kind) = f?;
        report.pole_fits.push(fit);
        report.classifications.push(kind);
    }
    for end in [points.first(), points.last()].into_iter().flatten() {
        if end.c1.abs() > NEAR_RESONANCE_C1 * scale {
            report.warnings.push(format!("possible unbracketed resonance near range edge at strength {}", end.strength));
        }
    }
    Ok(report)
}

fn bisect(base: &PotentialSpec, l: u32, p: &SweepPoint, q: &SweepPoint, tol: f64, scale: f64) -> Result<Root> {
    let (mut lo, mut hi) = (*p, *q);
    while hi.strength - lo.strength > tol {
        let x = 0.5 * (lo.strength + hi.strength);
        if x <= lo.strength || x >= hi.strength {
            break;
        }
        let mid = sweep_point(base, l, x)?;
        if mid.inv_a == 0.0 {
            return Ok(Root::Pole(mid.strength));
        }
        if mid.inv_a.signum() == lo.inv_a.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo.strength + hi.strength);
    // a pole leaves |c1| large on both sides, a zero crossing leaves it small
    if lo.c1.abs().min(hi.c1.abs()) > scale {
        Ok(Root::Pole(x))
    } else {
        Ok(Root::Zero(x))
    }
}

/// `u = f - a^{2l+1} h` with `f -> r^{l+1}` and `h -> r^{-l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSolution {
    pub l: u32,
    pub c1: f64,
    pub f: Vec<f64>,
    pub h: Vec<f64>,
    step: f64,
    support: f64,
    breakpoints: Vec<f64>,
}

/// Five-point derivative weights (times `12 h`) at offset `t` of the stencil.
const FD: [[f64; 5]; 5] = [
    [-25.0, 48.0, -36.0, 16.0, -3.0],
    [-3.0, -10.0, 18.0, -6.0, 1.0],
    [1.0, -8.0, 0.0, 8.0, -1.0],
    [-1.0, 6.0, -18.0, 10.0, 3.0],
    [3.0, -16.0, 36.0, -48.0, 25.0],
];

/// Splits a normalized zero-energy solution into its two asymptotic channels.
///
/// `u'` comes from fourth-order differences whose stencils never cross a
/// jump of the potential; beyond the support the exterior form is exact.
pub fn split_fh(sol: &ZeroEnergySolution) -> Result<SplitSolution> {
    let c1 = sol.c1();
    if !c1.is_finite() || sol.a.abs() < NEAR_ZERO_A * sol.length {
        return Err(Error::ZeroScatteringLength);
    }
    let (l, h) = (sol.l as i32, sol.grid.h);
    let lf = l as f64;
    let last_inner = ((sol.support / h).ceil() as usize).min(sol.grid.n);
    // node ranges of the jump-free segments; a node on a jump belongs to both
    let mut cuts = vec![0.0];
    cuts.extend(sol.breakpoints.iter().copied());
    cuts.push(sol.grid.r_max());
    let ranges: Vec<(usize, usize)> = cuts
        .windows(2)
        .map(|w| ((w[0] / h - 1e-9).ceil() as usize, (w[1] / h + 1e-9).floor() as usize))
        .collect();
    let denom = (2 * l + 1) as f64;
    let mut f = vec![0.0; sol.grid.n + 1];
    let mut hh = vec![0.0; sol.grid.n + 1];
    for i in 1..=sol.grid.n {
        let r = sol.grid.r(i);
        if i > last_inner {
            f[i] = r.powi(l + 1);
            hh[i] = r.powi(-l);
            continue;
        }
        let (lo, hi) = *ranges.iter().find(|&&(lo, hi)| lo <= i && i <= hi).expect("node inside the grid");
        if hi < lo + 4 {
            return Err(Error::InvalidGrid("segment too short for the derivative stencil; reduce h".into()));
        }
        let start = i.saturating_sub(2).clamp(lo, hi - 4);
        let w = &FD[i - start];
        let du: f64 = (0..5).map(|k| w[k] * sol.u[start + k]).sum::<f64>() / (12.0 * h);
        let u = sol.u[i];
        f[i] = (lf * u + r * du) / denom;
        hh[i] = (r * du - (lf + 1.0) * u) / (denom * c1);
    }
    Ok(SplitSolution { l: sol.l, c1, f, h: hh, step: h, support: sol.support, breakpoints: sol.breakpoints.clone() })
}

/// The three split integrals `int [r^{2l+2} - f^2]`, `int [r - f h]` and
/// `int [r^{-2l} delta_{l0} - h^2]`, the last including its analytic tail.
pub fn split_integrals(split: &SplitSolution) -> Result<[f64; 3]> {
    let (l, h) = (split.l as i32, split.step);
    let end = split.support.max(4.0 * h);
    let i1 = integrate_segments(|i, _| (i as f64 * h).powi(2 * l + 2) - split.f[i].powi(2), h, end, &split.breakpoints)?;
    let i2 = integrate_segments(|i, _| i as f64 * h - split.f[i] * split.h[i], h, end, &split.breakpoints)?;
    let mut i3 = integrate_segments(
        |i, _| if l == 0 { 1.0 - split.h[i].powi(2) } else { -split.h[i].powi(2) },
        h,
        end,
        &split.breakpoints,
    )?;
    if l > 0 {
        i3 -= end.powi(1 - 2 * l) / (2 * l - 1) as f64;
    }
    Ok([i1, i2, i3])
}

/// `r = 2/(2l+1) [I1 / a^{2l+2} - 2 I2 / a + I3 a^{2l}]`.
pub fn effective_range_split(split: &SplitSolution, a: f64) -> Result<f64> {
    if !(a.is_finite() && a != 0.0) {
        return Err(Error::ZeroScatteringLength);
    }
    let l = split.l as i32;
    let [i1, i2, i3] = split_integrals(split)?;
    Ok(2.0 / (2 * l + 1) as f64 * (i1 / a.powi(2 * l + 2) - 2.0 * i2 / a + i3 * a.powi(2 * l)))
}
