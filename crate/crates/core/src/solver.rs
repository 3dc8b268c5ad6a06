use crate::potentials::PotentialSpec;
use crate::special::expansion_constants;
use crate::{Error, Result};

/// Above this `|c1| / R^{2l+1}` a result is flagged as near resonance.
pub const NEAR_RESONANCE_C1: f64 = 1e6;
/// Below this `|a| / R` a result is flagged as near a zero crossing.
pub const NEAR_ZERO_A: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    pub near_resonance: bool,
    pub near_zero_a: bool,
}

/// Low-energy parameters for one partial wave.
///
/// `c1 = a^{2l+1}` and `c2 = a^{2l+2} r` are the coefficients of the
/// low-k expansion `tan(delta) ~ -(A_l/B_l) k^{2l+1} (c1 + c2 k^2 / 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringParameters {
    pub l: u32,
    pub a: f64,
    pub r: f64,
    pub c1: f64,
    pub c2: f64,
    pub flags: Flags,
}

impl ScatteringParameters {
    /// Builds parameters from `c1` and `c2`; `length` sets the flag scales.
    pub fn from_coefficients(l: u32, c1: f64, c2: f64, length: f64) -> Self {
        let a = signed_root(c1, 2 * l + 1);
        let r = c2 / (a * c1);
        let p = (2 * l + 1) as i32;
        Self {
            l,
            a,
            r,
            c1,
            c2,
            flags: Flags {
                near_resonance: c1.abs() > NEAR_RESONANCE_C1 * length.powi(p),
                near_zero_a: a.abs() < NEAR_ZERO_A * length,
            },
        }
    }
}

/// Real `n`-th root preserving sign (`n` odd).
pub fn signed_root(v: f64, n: u32) -> f64 {
    if n == 1 {
        v
    } else if n == 3 {
        v.cbrt()
    } else {
        v.signum() * v.abs().powf(1.0 / n as f64)
    }
}

/// `(c1, c2) = (a^{2l+1}, a^{2l+2} r)`.
pub fn c_coefficients(a: f64, r: f64, l: u32) -> (f64, f64) {
    let c1 = a.powi(2 * l as i32 + 1);
    (c1, c1 * a * r)
}

/// Converts to the convention `k^{2l+1} cot(delta) ~ -1/a* + r* k^2 / 2`.
pub fn madsen_convert(a: f64, r: f64, l: u32) -> Result<(f64, f64)> {
    let c = expansion_constants(l)?;
    if l > 0 && a == 0.0 {
        return Err(Error::ZeroScatteringLength);
    }
    let a_star = c.a / c.b * a.powi(2 * l as i32 + 1);
    let r_star = if l == 0 { r } else { c.b / c.a * r / a.powi(2 * l as i32) };
    Ok((a_star, r_star))
}

/// Inverse of [`madsen_convert`].
pub fn madsen_invert(a_star: f64, r_star: f64, l: u32) -> Result<(f64, f64)> {
    let c = expansion_constants(l)?;
    if l > 0 && a_star == 0.0 {
        return Err(Error::ZeroScatteringLength);
    }
    let a = signed_root(c.b / c.a * a_star, 2 * l + 1);
    let r = if l == 0 { r_star } else { c.a / c.b * r_star * a.powi(2 * l as i32) };
    Ok((a, r))
}

/// Threshold used to truncate smooth potentials for integrals and matching.
pub const SUPPORT_EPS: f64 = 1e-12;

/// Uniform radial grid `r_i = i h`, `i = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub h: f64,
    pub n: usize,
}

impl RadialGrid {
    pub fn new(h: f64, r_max: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) || !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidGrid(format!("h = {h}, r_max = {r_max}")));
        }
        let n = (r_max / h).round() as usize;
        if n < 100 {
            return Err(Error::InvalidGrid(format!("only {n} steps; at least 100 required")));
        }
        Ok(Self { h, n })
    }

    /// `h = R/2000`, `r_max = max(10 R, support + 5 R)` unless overridden.
    pub fn for_spec(spec: &PotentialSpec, l: u32, h: Option<f64>, r_max: Option<f64>) -> Result<Self> {
        let rc = spec.characteristic_length();
        let h = h.unwrap_or(rc / 2000.0);
        let r_max = match r_max {
            Some(r) => r,
            None => (10.0 * rc).max(spec.effective_support(l, SUPPORT_EPS)? + 5.0 * rc),
        };
        Self::new(h, r_max)
    }

    pub fn r_max(&self) -> f64 {
        self.n as f64 * self.h
    }

    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.h
    }
}

struct Jump {
    node: usize,
    theta: f64,
    left: f64,
    dg: f64,
    dg2: f64,
}

/// Position of `r` relative to the grid: `(n, theta)` with `r = (n + theta) h`.
fn locate(r: f64, h: f64) -> (usize, f64) {
    let t = r / h;
    let nearest = t.round();
    if (t - nearest).abs() < 1e-9 {
        (nearest as usize, 0.0)
    } else {
        (t.floor() as usize, t - t.floor())
    }
}

/// Numerov integration of `u'' = [U(r) + l(l+1)/r^2 - k^2] u` from the
/// origin with `u(0) = 0`, `u(h) = h^{l+1}`.
///
/// Jumps of piecewise-constant potentials are handled by adding to the two
/// stencils that straddle each jump the defect of a locally smooth
/// extension, which restores fourth-order convergence.
pub(crate) fn integrate(spec: &PotentialSpec, l: u32, grid: &RadialGrid, k_sq: f64) -> Result<Vec<f64>> {
    if matches!(spec, PotentialSpec::HardSphere { .. }) {
        return Err(Error::AnalyticOnly);
    }
    spec.validate()?;
    let (h, n) = (grid.h, grid.n);
    let h2 = h * h;
    let cent = (l * (l + 1)) as f64;
    let mut g = vec![0.0; n + 1];
    for (i, gi) in g.iter_mut().enumerate().skip(1) {
        let r = grid.r(i);
        *gi = spec.reduced_potential(r)? + cent / (r * r) - k_sq;
    }
    let jumps: Vec<Jump> = spec
        .discontinuities()
        .into_iter()
        .filter(|d| d.r < grid.r_max() - 2.0 * h)
        .map(|d| {
            let (node, theta) = locate(d.r, h);
            let base = cent / (d.r * d.r) - k_sq;
            let (gm, gp) = (d.left + base, d.right + base);
            Jump { node, theta, left: d.left, dg: gp - gm, dg2: gp * gp - gm * gm }
        })
        .collect();
    // a jump on a node is corrected from the inner side, whatever roundoff puts the node on
    for jump in &jumps {
        if jump.theta == 0.0 && jump.node > 0 && jump.node <= n {
            g[jump.node] = jump.left + cent / grid.r(jump.node).powi(2) - k_sq;
        }
    }
    let f: Vec<f64> = g.iter().map(|gi| 1.0 - h2 * gi / 12.0).collect();
    if let Some(i) = f.iter().skip(1).position(|fi| fi.abs() < 1e-12) {
        return Err(Error::PathologicalStep(grid.r(i + 1)));
    }

    // summed form: w = f u, d_i = w_{i+1} - w_i, d_i = d_{i-1} + h^2 g_i u_i
    let mut u = vec![0.0; n + 1];
    u[1] = h.powi(l as i32 + 1);
    // g u at the origin: only the l = 1 centrifugal term survives the limit
    let gu0 = if l == 1 { 2.0 * u[1] / h2 } else { 0.0 };
    let mut w = f[1] * u[1];
    let mut d = w + h2 / 12.0 * gu0;
    let mut carry = vec![0.0; n + 2];
    for i in 1..n {
        let mut extra = carry[i];
        for jump in jumps.iter().filter(|jp| jp.node == i) {
            let du = (u[i] - u[i - 1]) / h + 0.5 * h * g[i] * u[i];
            let s0 = jump.theta * h;
            let ud = u[i] + s0 * du + 0.5 * s0 * s0 * g[i] * u[i];
            let dud = du + s0 * g[i] * u[i];
            let defect = |s: f64| {
                let e = 0.5 * s * s * jump.dg * ud + s.powi(3) / 6.0 * jump.dg * dud + s.powi(4) / 24.0 * jump.dg2 * ud;
                let e2 = jump.dg * ud + s * jump.dg * dud + 0.5 * s * s * jump.dg2 * ud;
                e - h2 / 12.0 * e2
            };
            extra += defect((1.0 - jump.theta) * h);
            carry[i + 1] -= defect(-jump.theta * h);
        }
        d += h2 * g[i] * u[i] + extra;
        w += d;
        u[i + 1] = w / f[i + 1];
    }
    Ok(u)
}

/// Unnormalized zero-energy radial samples on `grid`.
pub fn numerov_integrate(spec: &PotentialSpec, l: u32, grid: &RadialGrid) -> Result<Vec<f64>> {
    integrate(spec, l, grid, 0.0)
}

/// `N` from the last two samples, assuming `u = N (r^{l+1} - c1 r^{-l})` there.
pub fn extract_normalization(u: &[f64], h: f64, l: u32) -> Result<f64> {
    let m = u.len();
    if m < 3 {
        return Err(Error::Normalization("need at least two samples beyond the origin".into()));
    }
    normalization_between(u, m - 2, m - 1, h, l)
}

/// `N` from samples `i0 < i1`, both past the support.
pub(crate) fn normalization_between(u: &[f64], i0: usize, i1: usize, h: f64, l: u32) -> Result<f64> {
    let p = l as i32;
    let (r1, r0) = (i1 as f64 * h, i0 as f64 * h);
    let den = r1.powi(2 * p + 1) - r0.powi(2 * p + 1);
    let norm = (u[i1] * r1.powi(p) - u[i0] * r0.powi(p)) / den;
    if den == 0.0 || !norm.is_finite() {
        return Err(Error::Normalization(format!("degenerate tail (N = {norm})")));
    }
    // no r^{l+1} component left: the potential sits on a zero-energy resonance
    if norm.abs() <= 1e-14 * u[i1].abs() * r1.powi(p) / den {
        return Err(Error::ResonantInput(f64::NAN));
    }
    Ok(norm)
}

/// `a_l` from the last sample: `a^{2l+1} = r^{2l+1} - u r^l / N`.
pub fn extract_scattering_length(u: &[f64], norm: f64, h: f64, l: u32) -> Result<f64> {
    Ok(signed_root(extract_c1(u, norm, h, l)?, 2 * l + 1))
}

fn extract_c1(u: &[f64], norm: f64, h: f64, l: u32) -> Result<f64> {
    if norm == 0.0 || u.len() < 2 {
        return Err(Error::Normalization("zero normalization".into()));
    }
    let p = l as i32;
    let r = (u.len() - 1) as f64 * h;
    Ok(r.powi(2 * p + 1) - u[u.len() - 1] * r.powi(p) / norm)
}

/// Normalized zero-energy solution, `u -> r^{l+1} - a^{2l+1} r^{-l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroEnergySolution {
    pub grid: RadialGrid,
    pub u: Vec<f64>,
    pub l: u32,
    /// Normalization of the raw run, in units of the characteristic length.
    pub norm: f64,
    /// Scattering length from the asymptotic matching.
    pub a: f64,
    /// Radius beyond which the potential is negligible.
    pub support: f64,
    /// Radii where the potential jumps, inside the support.
    pub breakpoints: Vec<f64>,
    /// Characteristic length of the potential.
    pub length: f64,
}

impl ZeroEnergySolution {
    pub fn c1(&self) -> f64 {
        self.a.powi(2 * self.l as i32 + 1)
    }
}

/// Integrates, then normalizes on two nodes just beyond the support.
///
/// The integration runs in units of the characteristic length so that
/// results are covariant under a rescaling of all lengths.
pub fn solve_zero_energy(spec: &PotentialSpec, l: u32, grid: &RadialGrid) -> Result<ZeroEnergySolution> {
    if l > crate::L_MAX {
        return Err(Error::AngularMomentumOutOfRange(l));
    }
    spec.validate()?;
    let len = spec.characteristic_length();
    let unit = spec.scaled(1.0 / len);
    let unit_grid = RadialGrid { h: grid.h / len, n: grid.n };
    let raw = numerov_integrate(&unit, l, &unit_grid)?;
    let support = unit.effective_support(l, SUPPORT_EPS)?;
    let m = (support / unit_grid.h).ceil() as usize + 2;
    if m > grid.n {
        return Err(Error::InvalidGrid(format!(
            "r_max = {} does not extend beyond the support {}",
            grid.r_max(),
            support * len
        )));
    }
    // a baseline of one length unit keeps roundoff in N at the eps level
    let wide = m + (1.0 / unit_grid.h).round() as usize;
    let (i0, i1) = if wide <= grid.n { (m, wide) } else { (m - 1, m) };
    let norm = normalization_between(&raw, i0, i1, unit_grid.h, l).map_err(|e| match e {
        Error::ResonantInput(_) => Error::ResonantInput(spec.strength().unwrap_or(f64::NAN)),
        e => e,
    })?;
    let c1 = extract_c1(&raw[..=i1], norm, unit_grid.h, l)?;
    let u_scale = len.powi(l as i32 + 1) / norm;
    let breakpoints = spec.discontinuities().iter().map(|d| d.r).filter(|&r| r < support * len).collect();
    Ok(ZeroEnergySolution {
        grid: *grid,
        u: raw.iter().map(|v| v * u_scale).collect(),
        l,
        norm,
        a: signed_root(c1, 2 * l + 1) * len,
        support: support * len,
        breakpoints,
        length: len,
    })
}

/// Interval between breakpoints; `jump_at_start` marks a discontinuity at `a`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub a: f64,
    pub b: f64,
    pub jump_at_start: bool,
}

pub(crate) fn segments(end: f64, breakpoints: &[f64]) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut a = 0.0;
    let mut jump = false;
    for &bp in breakpoints.iter().filter(|&&bp| bp > 0.0 && bp < end) {
        out.push(Segment { a, b: bp, jump_at_start: jump });
        a = bp;
        jump = true;
    }
    out.push(Segment { a, b: end, jump_at_start: jump });
    out
}

/// Integral over one segment of a function known at grid nodes.
///
/// `f(i, probe)` returns the integrand at node `i`; `probe` is the radius
/// at which a piecewise potential should be evaluated so that a node on
/// the segment start takes the value from inside the segment. Partial
/// panels at off-node ends are integrated on the cubic through the four
/// nearest nodes of the same segment.
pub(crate) fn integrate_segment<F: Fn(usize, f64) -> f64>(f: F, h: f64, seg: Segment) -> Result<f64> {
    let lo = (seg.a / h - 1e-9).ceil().max(0.0) as usize;
    let hi = (seg.b / h + 1e-9).floor() as usize;
    if hi < lo + 3 {
        return Err(Error::InvalidGrid(format!(
            "segment [{}, {}] spans fewer than 4 nodes; reduce h",
            seg.a, seg.b
        )));
    }
    let mid = 0.5 * (seg.a + seg.b);
    let vals: Vec<f64> = (lo..=hi)
        .map(|i| {
            let r = i as f64 * h;
            let on_start = seg.jump_at_start && (r - seg.a).abs() < 1e-9 * h;
            let probe = if on_start || (r - seg.b).abs() < 1e-9 * h { mid } else { r };
            f(i, probe)
        })
        .collect();
    let mut total = crate::quadrature::simpson(&vals, h);
    let gauss = |y: [f64; 4], x0: f64, from: f64, to: f64| {
        let (c, w) = (0.5 * (from + to), 0.5 * (to - from));
        let d = w / 3f64.sqrt();
        w * (crate::quadrature::lagrange4(y, x0, h, c - d) + crate::quadrature::lagrange4(y, x0, h, c + d))
    };
    let r_lo = lo as f64 * h;
    if r_lo - seg.a > 1e-9 * h {
        total += gauss([vals[0], vals[1], vals[2], vals[3]], r_lo, seg.a, r_lo);
    }
    let r_hi = hi as f64 * h;
    if seg.b - r_hi > 1e-9 * h {
        let k = vals.len();
        total += gauss([vals[k - 4], vals[k - 3], vals[k - 2], vals[k - 1]], r_hi - 3.0 * h, r_hi, seg.b);
    }
    Ok(total)
}

pub(crate) fn integrate_segments<F: Fn(usize, f64) -> f64>(f: F, h: f64, end: f64, breakpoints: &[f64]) -> Result<f64> {
    if end <= 0.0 {
        return Ok(0.0);
    }
    segments(end, breakpoints).into_iter().map(|s| integrate_segment(&f, h, s)).sum()
}

/// `a^{2l+1} = 1/(2l+1) int U r^{l+1} u dr` on a normalized solution.
pub fn scattering_coefficient_integral(spec: &PotentialSpec, sol: &ZeroEnergySolution) -> Result<f64> {
    let p = sol.l as i32;
    let h = sol.grid.h;
    let f = |i: usize, probe: f64| {
        let r = i as f64 * h;
        spec.reduced_potential(probe).unwrap_or(0.0) * r.powi(p + 1) * sol.u[i]
    };
    Ok(integrate_segments(f, h, sol.support, &sol.breakpoints)? / (2 * p + 1) as f64)
}

/// Scattering length from the integral formula.
pub fn scattering_length_integral(spec: &PotentialSpec, sol: &ZeroEnergySolution) -> Result<f64> {
    Ok(signed_root(scattering_coefficient_integral(spec, sol)?, 2 * sol.l + 1))
}

/// `c2 = a^{2l+2} r` from the effective-range integral with `c1 = a^{2l+1}`.
///
/// The integrand is integrated up to the support; the remaining tail,
/// `-c1^2 r^{-2l}` for `l > 0` and zero for `l = 0`, is added analytically.
pub fn effective_range_coefficient(sol: &ZeroEnergySolution, c1: f64) -> Result<f64> {
    let p = sol.l as i32;
    let h = sol.grid.h;
    let rc = sol.support;
    let f = |i: usize, _probe: f64| {
        let r = i as f64 * h;
        let mut v = r.powi(2 * p + 2) - 2.0 * c1 * r - sol.u[i] * sol.u[i];
        if p == 0 {
            v += c1 * c1;
        }
        v
    };
    let mut total = integrate_segments(f, h, rc, &sol.breakpoints)?;
    if p > 0 {
        total -= c1 * c1 * rc.powi(1 - 2 * p) / (2 * p - 1) as f64;
    }
    Ok(2.0 * total / (2 * p + 1) as f64)
}

/// Effective range from the integral formula.
pub fn effective_range_integral(sol: &ZeroEnergySolution, a: f64) -> Result<f64> {
    if !a.is_finite() || a.abs() < NEAR_ZERO_A * sol.length {
        return Err(Error::ZeroScatteringLength);
    }
    let c1 = a.powi(2 * sol.l as i32 + 1);
    Ok(effective_range_coefficient(sol, c1)? / (a * c1))
}

/// Numerov plus integral formulas for `a_l` and `r_l`.
pub fn solve(spec: &PotentialSpec, l: u32, grid: Option<RadialGrid>) -> Result<(ScatteringParameters, ZeroEnergySolution)> {
    let grid = match grid {
        Some(g) => g,
        None => RadialGrid::for_spec(spec, l, None, None)?,
    };
    let sol = solve_zero_energy(spec, l, &grid)?;
    let c1 = scattering_coefficient_integral(spec, &sol)?;
    // the asymptotic c1 is the one that makes the exterior integrand vanish
    let c2 = effective_range_coefficient(&sol, sol.c1())?;
    let params = ScatteringParameters::from_coefficients(l, c1, c2, spec.characteristic_length());
    Ok((params, sol))
}
