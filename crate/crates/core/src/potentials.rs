//! Model potentials in reduced units, `U(r) = 2 mu V(r) / hbar^2`.

use std::io::{BufRead, BufReader, Read};

use crate::{Error, Result};

/// A central potential.
///
/// Depths and heights are stored as wavenumbers: `k0^2 = 2 mu V0 / hbar^2`.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    HardSphere { radius: f64 },
    /// Repulsive step `U = k0^2` for `r <= radius`.
    SoftSphere { k0: f64, radius: f64 },
    /// Attractive step `U = -k0^2` for `r <= radius`.
    SphericalWell { k0: f64, radius: f64 },
    /// `U = -k1^2` on `[0, r1]`, `U = +k2^2` on `(r1, r2]`.
    WellBarrier { k1: f64, r1: f64, k2: f64, r2: f64 },
    /// `U = u0 sech^2(r / radius)`; `u0 > 0` is repulsive.
    PoschlTeller { u0: f64, radius: f64 },
    Tabulated(TabulatedPotential),
}

/// Length unit in which a spec's outputs are naturally quoted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedUnits {
    pub length_unit: f64,
}

/// Jump of a piecewise-constant potential at `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discontinuity {
    pub r: f64,
    pub left: f64,
    pub right: f64,
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{name} must be positive, got {v}")))
            }
        };
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{name} must be non-negative, got {v}")))
            }
        };
        match *self {
            Self::HardSphere { radius } => positive("radius", radius),
            Self::SoftSphere { k0, radius } | Self::SphericalWell { k0, radius } => {
                nonneg("k0", k0)?;
                positive("radius", radius)
            }
            Self::WellBarrier { k1, r1, k2, r2 } => {
                nonneg("k1", k1)?;
                nonneg("k2", k2)?;
                positive("r1", r1)?;
                positive("r2", r2)?;
                if r1 >= r2 {
                    return Err(Error::InvalidSpec(format!("r1 = {r1} must be below r2 = {r2}")));
                }
                Ok(())
            }
            Self::PoschlTeller { u0, radius } => {
                if !u0.is_finite() {
                    return Err(Error::InvalidSpec(format!("u0 must be finite, got {u0}")));
                }
                positive("radius", radius)
            }
            Self::Tabulated(_) => Ok(()),
        }
    }

    /// Characteristic length `R` (outer radius for compound wells, last
    /// tabulated radius for tables).
    pub fn characteristic_length(&self) -> f64 {
        match self {
            Self::HardSphere { radius }
            | Self::SoftSphere { radius, .. }
            | Self::SphericalWell { radius, .. }
            | Self::PoschlTeller { radius, .. } => *radius,
            Self::WellBarrier { r2, .. } => *r2,
            Self::Tabulated(t) => *t.r.last().expect("validated table"),
        }
    }

    pub fn units(&self) -> ReducedUnits {
        ReducedUnits { length_unit: self.characteristic_length() }
    }

    /// Dimensionless strength used on sweep axes: `k0 R`, `k1 R1`, or `u0 R^2`.
    pub fn strength(&self) -> Option<f64> {
        match *self {
            Self::SoftSphere { k0, radius } | Self::SphericalWell { k0, radius } => Some(k0 * radius),
            Self::WellBarrier { k1, r1, .. } => Some(k1 * r1),
            Self::PoschlTeller { u0, radius } => Some(u0 * radius * radius),
            _ => None,
        }
    }

    /// Same potential with every length multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        match self {
            Self::HardSphere { radius } => Self::HardSphere { radius: radius * s },
            Self::SoftSphere { k0, radius } => Self::SoftSphere { k0: k0 / s, radius: radius * s },
            Self::SphericalWell { k0, radius } => Self::SphericalWell { k0: k0 / s, radius: radius * s },
            Self::WellBarrier { k1, r1, k2, r2 } => {
                Self::WellBarrier { k1: k1 / s, r1: r1 * s, k2: k2 / s, r2: r2 * s }
            }
            Self::PoschlTeller { u0, radius } => Self::PoschlTeller { u0: u0 / (s * s), radius: radius * s },
            Self::Tabulated(t) => Self::Tabulated(TabulatedPotential::new(
                t.r.iter().map(|r| r * s).collect(),
                t.u.iter().map(|u| u / (s * s)).collect(),
            )),
        }
    }

    /// Whether `U` vanishes identically beyond a finite radius.
    pub fn has_compact_support(&self) -> bool {
        !matches!(self, Self::PoschlTeller { .. } | Self::Tabulated(_))
    }

    /// Jumps of piecewise-constant potentials, ordered by radius.
    pub fn discontinuities(&self) -> Vec<Discontinuity> {
        match *self {
            Self::SoftSphere { k0, radius } => {
                vec![Discontinuity { r: radius, left: k0 * k0, right: 0.0 }]
            }
            Self::SphericalWell { k0, radius } => {
                vec![Discontinuity { r: radius, left: -k0 * k0, right: 0.0 }]
            }
            Self::WellBarrier { k1, r1, k2, r2 } => vec![
                Discontinuity { r: r1, left: -k1 * k1, right: k2 * k2 },
                Discontinuity { r: r2, left: k2 * k2, right: 0.0 },
            ],
            _ => Vec::new(),
        }
    }

    /// `U(r)`. At a jump the inner value is returned.
    pub fn reduced_potential(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::InvalidSpec(format!("radius must be non-negative, got {r}")));
        }
        Ok(match self {
            Self::HardSphere { .. } => return Err(Error::AnalyticOnly),
            Self::SoftSphere { k0, radius } => {
                if r <= *radius {
                    k0 * k0
                } else {
                    0.0
                }
            }
            Self::SphericalWell { k0, radius } => {
                if r <= *radius {
                    -k0 * k0
                } else {
                    0.0
                }
            }
            Self::WellBarrier { k1, r1, k2, r2 } => {
                if r <= *r1 {
                    -k1 * k1
                } else if r <= *r2 {
                    k2 * k2
                } else {
                    0.0
                }
            }
            Self::PoschlTeller { u0, radius } => {
                let c = (r / radius).cosh();
                u0 / (c * c)
            }
            Self::Tabulated(t) => t.eval(r)?,
        })
    }

    /// Smallest radius beyond which `|U(r)| r^{2l+3} / R^{2l+1} < eps`.
    pub fn effective_support(&self, l: u32, eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(Error::InvalidSpec(format!("eps must be positive, got {eps}")));
        }
        match self {
            Self::HardSphere { radius }
            | Self::SoftSphere { radius, .. }
            | Self::SphericalWell { radius, .. } => Ok(*radius),
            Self::WellBarrier { r2, .. } => Ok(*r2),
            Self::PoschlTeller { u0, radius } => Ok(poschl_teller_support(*u0, *radius, l, eps)),
            Self::Tabulated(t) => {
                t.check_wigner(l)?;
                Ok(t.support(l, eps))
            }
        }
    }
}

/// Free-standing form of [`PotentialSpec::reduced_potential`].
pub fn reduced_potential(spec: &PotentialSpec, r: f64) -> Result<f64> {
    spec.reduced_potential(r)
}

/// Free-standing form of [`PotentialSpec::effective_support`].
pub fn effective_support(spec: &PotentialSpec, l: u32, eps: f64) -> Result<f64> {
    spec.effective_support(l, eps)
}

fn poschl_teller_support(u0: f64, radius: f64, l: u32, eps: f64) -> f64 {
    if u0 == 0.0 {
        return 0.0;
    }
    let p = (2 * l + 3) as f64;
    // ln(|U| r^{2l+3} / R^{2l+1}) in units of R
    let log_f = |x: f64| {
        let ln_sech2 = 2.0 * (-x + std::f64::consts::LN_2 - (-2.0 * x).exp().ln_1p());
        (u0.abs() * radius * radius).ln() + ln_sech2 + p * x.ln()
    };
    // the profile rises to a single maximum where p/x = 2 tanh x, then decays
    let (mut lo, mut hi) = (1e-12, p);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p / mid > 2.0 * mid.tanh() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let peak = lo;
    let target = eps.ln();
    if log_f(peak) < target {
        return 0.0;
    }
    let mut hi = 2.0 * peak.max(1.0);
    while log_f(hi) >= target {
        hi *= 2.0;
    }
    let mut lo = peak;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if log_f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi * radius
}

/// Tabulated `U(r)` with monotone cubic (Fritsch-Carlson) interpolation.
///
/// Beyond the last sample the potential is taken to vanish; below the
/// first sample evaluation is an error.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPotential {
    r: Vec<f64>,
    u: Vec<f64>,
    slopes: Vec<f64>,
}

impl TabulatedPotential {
    /// Builds the interpolant; callers guarantee at least two strictly
    /// increasing radii.
    fn new(r: Vec<f64>, u: Vec<f64>) -> Self {
        let n = r.len();
        let secant: Vec<f64> = (0..n - 1).map(|i| (u[i + 1] - u[i]) / (r[i + 1] - r[i])).collect();
        let mut m = vec![0.0; n];
        m[0] = secant[0];
        m[n - 1] = secant[n - 2];
        for i in 1..n - 1 {
            if secant[i - 1] * secant[i] > 0.0 {
                let (h0, h1) = (r[i] - r[i - 1], r[i + 1] - r[i]);
                let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                m[i] = (w1 + w2) / (w1 / secant[i - 1] + w2 / secant[i]);
            }
        }
        Self { r, u, slopes: m }
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let n = self.r.len();
        if x < self.r[0] {
            return Err(Error::OutsideTable(x));
        }
        if x > self.r[n - 1] {
            return Ok(0.0);
        }
        let i = match self.r.partition_point(|&ri| ri <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.r[i + 1] - self.r[i];
        let t = (x - self.r[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Ok(h00 * self.u[i] + h10 * h * self.slopes[i] + h01 * self.u[i + 1] + h11 * h * self.slopes[i + 1])
    }

    /// Local power-law decay exponent from the last two samples, or
    /// infinity if the tail is already zero.
    pub fn tail_exponent(&self) -> f64 {
        let n = self.r.len();
        let (u1, u2) = (self.u[n - 2].abs(), self.u[n - 1].abs());
        if u2 == 0.0 {
            return f64::INFINITY;
        }
        if u1 == 0.0 {
            return 0.0;
        }
        -(u2 / u1).ln() / (self.r[n - 1] / self.r[n - 2]).ln()
    }

    fn check_wigner(&self, l: u32) -> Result<()> {
        let exponent = self.tail_exponent();
        if exponent > (2 * l + 3) as f64 {
            Ok(())
        } else {
            Err(Error::WignerViolation { l, exponent })
        }
    }

    fn support(&self, l: u32, eps: f64) -> f64 {
        let rc = *self.r.last().unwrap();
        let p = (2 * l + 3) as i32;
        let f = |i: usize| self.u[i].abs() * self.r[i].powi(p) / rc.powi(p - 2);
        match (0..self.r.len()).rev().find(|&i| f(i) >= eps) {
            None => self.r[0],
            Some(i) if i + 1 < self.r.len() => self.r[i + 1],
            Some(_) => rc,
        }
    }
}

/// Reads the two-column `r U` text format. Lines starting with `#` and
/// blank lines are ignored.
pub fn load_tabulated<R: Read>(source: R) -> Result<PotentialSpec> {
    let mut r = Vec::new();
    let mut u = Vec::new();
    for (idx, line) in BufReader::new(source).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Io(e.to_string()))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse { line: line_no, msg: format!("expected 2 columns, found {}", fields.len()) });
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse { line: line_no, msg: format!("invalid number '{s}'") })
        };
        let (ri, ui) = (parse(fields[0])?, parse(fields[1])?);
        if ri < 0.0 {
            return Err(Error::Parse { line: line_no, msg: format!("negative radius {ri}") });
        }
        if let Some(&last) = r.last() {
            if ri <= last {
                return Err(Error::NonMonotoneGrid(line_no));
            }
        }
        r.push(ri);
        u.push(ui);
    }
    if r.len() < 4 {
        return Err(Error::TooFewPoints(r.len()));
    }
    Ok(PotentialSpec::Tabulated(TabulatedPotential::new(r, u)))
}
