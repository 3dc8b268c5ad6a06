use scatlen_core::phaseshift::{self, hard_sphere_tan_delta, PhaseShiftSample};
use scatlen_core::resonance::{self, Route, SweepPoint};
use scatlen_core::solver::{self, RadialGrid};
use scatlen_core::{analytic, PotentialSpec, ScatteringParameters};

use crate::config::{Command, RunConfig};
use crate::output::{flags_field, render, ResultRow};
use crate::CliError;

/// Tolerance on the strength of located resonances.
pub const RESONANCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub text: String,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    if cfg.command == Command::Validate {
        return Ok(validate(cfg));
    }
    let spec = cfg.potential.as_ref().ok_or_else(|| CliError::Usage("--potential is required".into()))?;
    let mut warnings = Vec::new();
    let rows = match cfg.command {
        Command::Params => params_rows(cfg, spec),
        Command::Sweep => sweep_rows(cfg, spec),
        Command::Resonance => resonance_rows(cfg, spec, &mut warnings),
        Command::Phaseshift => phaseshift_rows(cfg, spec),
        Command::Validate => unreachable!(),
    };
    let failed = rows.iter().any(|r| r.route == "error");
    Ok(RunOutput { text: render(&rows, cfg.format), warnings, exit_code: if failed { 2 } else { 0 } })
}

fn strength_of(spec: &PotentialSpec) -> f64 {
    match spec {
        PotentialSpec::HardSphere { .. } => f64::INFINITY,
        s => s.strength().unwrap_or(f64::NAN),
    }
}

fn row(id: &str, strength: f64, p: &ScatteringParameters, len: f64, route: &str) -> ResultRow {
    let q = (2 * p.l + 1) as i32;
    ResultRow {
        potential: id.to_string(),
        strength,
        l: p.l,
        a_over_r: p.a / len,
        r_over_r: p.r / len,
        c1: p.c1 / len.powi(q),
        c2: p.c2 / len.powi(q + 2),
        route: route.to_string(),
        flags: flags_field(p.flags.near_resonance, p.flags.near_zero_a),
    }
}

fn grid_for(cfg: &RunConfig, spec: &PotentialSpec, l: u32) -> scatlen_core::Result<Option<RadialGrid>> {
    if cfg.h.is_none() && cfg.r_max.is_none() {
        return Ok(None);
    }
    RadialGrid::for_spec(spec, l, cfg.h, cfg.r_max).map(Some)
}

/// Closed forms where they exist unless a grid is requested; Numerov otherwise.
fn params_rows(cfg: &RunConfig, spec: &PotentialSpec) -> Vec<ResultRow> {
    let len = spec.characteristic_length();
    let strength = strength_of(spec);
    cfg.l_list
        .iter()
        .map(|&l| {
            let result = match grid_for(cfg, spec, l) {
                Ok(Some(grid)) if !matches!(spec, PotentialSpec::HardSphere { .. }) => {
                    solver::solve(spec, l, Some(grid)).map(|(p, _)| (p, Route::Numerov))
                }
                Ok(_) => resonance::parameters(spec, l),
                Err(e) => Err(e),
            };
            match result {
                Ok((p, route)) => row(&cfg.potential_id, strength, &p, len, route.as_str()),
                Err(e) => ResultRow::failure(&cfg.potential_id, strength, l, &e.to_string()),
            }
        })
        .collect()
}

fn point_row(id: &str, p: &SweepPoint, l: u32, len: f64) -> ResultRow {
    let q = (2 * l + 1) as i32;
    ResultRow {
        potential: id.to_string(),
        strength: p.strength,
        l,
        a_over_r: p.a / len,
        r_over_r: p.r / len,
        c1: p.c1 / len.powi(q),
        c2: p.c2 / len.powi(q + 2),
        route: p.route.as_str().to_string(),
        flags: flags_field(p.flags.near_resonance, p.flags.near_zero_a),
    }
}

fn sweep_points(cfg: &RunConfig, spec: &PotentialSpec, l: u32) -> Result<Vec<SweepPoint>, Vec<ResultRow>> {
    let range = cfg.range.expect("validated range");
    match resonance::sweep(spec, l, range.lo, range.hi, range.n) {
        Ok(points) => Ok(points),
        Err(_) => {
            // redo point by point so each failure gets its own row
            let step = (range.hi - range.lo) / (range.n - 1) as f64;
            Err((0..range.n)
                .map(|i| {
                    let x = if i == range.n - 1 { range.hi } else { range.lo + i as f64 * step };
                    match resonance::sweep_point(spec, l, x) {
                        Ok(p) => point_row(&cfg.potential_id, &p, l, spec.characteristic_length()),
                        Err(e) => ResultRow::failure(&cfg.potential_id, x, l, &e.to_string()),
                    }
                })
                .collect())
        }
    }
}

fn sweep_rows(cfg: &RunConfig, spec: &PotentialSpec) -> Vec<ResultRow> {
    let len = spec.characteristic_length();
    let mut rows = Vec::new();
    for &l in &cfg.l_list {
        match sweep_points(cfg, spec, l) {
            Ok(points) => rows.extend(points.iter().map(|p| point_row(&cfg.potential_id, p, l, len))),
            Err(diag) => rows.extend(diag),
        }
    }
    rows
}

/// One row per pole (route `pole`, `c1` holding the pole constant `C`) and
/// per zero crossing of `a` (route `zero_crossing`).
fn resonance_rows(cfg: &RunConfig, spec: &PotentialSpec, warnings: &mut Vec<String>) -> Vec<ResultRow> {
    let len = spec.characteristic_length();
    let mut rows = Vec::new();
    for &l in &cfg.l_list {
        let points = match sweep_points(cfg, spec, l) {
            Ok(p) => p,
            Err(diag) => {
                rows.extend(diag.into_iter().filter(|r| r.route == "error"));
                continue;
            }
        };
        let report = match resonance::locate_resonances(spec, l, &points, RESONANCE_TOL) {
            Ok(r) => r,
            Err(e) => {
                rows.push(ResultRow::failure(&cfg.potential_id, f64::NAN, l, &e.to_string()));
                continue;
            }
        };
        let q = (2 * l + 1) as i32;
        for ((x, fit), kind) in report.critical_strengths.iter().zip(&report.pole_fits).zip(&report.classifications) {
            rows.push(ResultRow {
                potential: cfg.potential_id.clone(),
                strength: *x,
                l,
                a_over_r: f64::INFINITY,
                r_over_r: f64::NAN,
                c1: fit.c / len.powi(q),
                c2: f64::NAN,
                route: "pole".into(),
                flags: kind.to_string(),
            });
        }
        for z in &report.zero_crossings {
            rows.push(ResultRow {
                potential: cfg.potential_id.clone(),
                strength: *z,
                l,
                a_over_r: 0.0,
                r_over_r: f64::NAN,
                c1: 0.0,
                c2: f64::NAN,
                route: "zero_crossing".into(),
                flags: resonance::DivergenceKind::ZeroADivergentR.to_string(),
            });
        }
        warnings.extend(report.warnings.into_iter().map(|w| format!("l={l}: {w}")));
    }
    rows
}

fn phaseshift_rows(cfg: &RunConfig, spec: &PotentialSpec) -> Vec<ResultRow> {
    let len = spec.characteristic_length();
    let strength = strength_of(spec);
    cfg.l_list
        .iter()
        .map(|&l| {
            let fit = match spec {
                PotentialSpec::HardSphere { radius } => phaseshift::default_momenta(spec)
                    .into_iter()
                    .map(|k| hard_sphere_tan_delta(l, k * radius).map(|t| PhaseShiftSample { k, tan_delta: t }))
                    .collect::<scatlen_core::Result<Vec<_>>>()
                    .and_then(|s| phaseshift::fit_low_k(&s, l)),
                _ => grid_for(cfg, spec, l).and_then(|g| phaseshift::low_k_parameters(spec, l, g)),
            };
            match fit {
                Ok(f) => {
                    let (c1, c2) = solver::c_coefficients(f.a, f.r, l);
                    let p = ScatteringParameters::from_coefficients(l, c1, c2, len);
                    let mut r = row(&cfg.potential_id, strength, &p, len, "phaseshift");
                    r.r_over_r = f.r / len;
                    r
                }
                Err(e) => ResultRow::failure(&cfg.potential_id, strength, l, &e.to_string()),
            }
        })
        .collect()
}

struct Check {
    name: String,
    rel: f64,
    tol: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b { 0.0 } else { (a - b).abs() / b.abs() }
}

/// Default suite: soft spheres, wells and well-barriers away from poles.
pub fn default_suite() -> Vec<(String, PotentialSpec)> {
    let mut out = Vec::new();
    for x in [0.5, 1.0, 2.0, 5.0] {
        out.push((format!("soft_sphere k0R={x}"), PotentialSpec::SoftSphere { k0: x, radius: 1.0 }));
    }
    for x in [0.5, 1.0, 1.2, 2.0] {
        out.push((format!("spherical_well k0R={x}"), PotentialSpec::SphericalWell { k0: x, radius: 1.0 }));
    }
    out.push(("well_barrier 1.3/0.6/2.1/1.0".into(), PotentialSpec::WellBarrier { k1: 1.3, r1: 0.6, k2: 2.1, r2: 1.0 }));
    out.push(("well_barrier 2.5/0.4/0.7/1.3".into(), PotentialSpec::WellBarrier { k1: 2.5, r1: 0.4, k2: 0.7, r2: 1.3 }));
    out
}

fn triangle(spec: &PotentialSpec, l: u32, grid: Option<RadialGrid>) -> scatlen_core::Result<Vec<Check>> {
    let mut checks = Vec::new();
    let (num, sol) = solver::solve(spec, l, grid)?;
    if num.flags.near_resonance || num.flags.near_zero_a {
        return Ok(checks);
    }
    let exact = match *spec {
        PotentialSpec::SoftSphere { k0, radius } => Some(analytic::soft_sphere_params(l, k0, radius)?),
        PotentialSpec::SphericalWell { k0, radius } => Some(analytic::spherical_well_params(l, k0, radius)?),
        PotentialSpec::WellBarrier { .. } => Some(analytic::well_barrier_params(l, spec)?),
        _ => None,
    };
    if let Some(ex) = exact {
        checks.push(Check { name: "a numerov/analytic".into(), rel: rel(num.a, ex.a), tol: 1e-6 });
        checks.push(Check { name: "r numerov/analytic".into(), rel: rel(num.r, ex.r), tol: 1e-5 });
    }
    checks.push(Check { name: "a asymptote/integral".into(), rel: rel(sol.a, num.a), tol: 1e-8 });
    let split = resonance::effective_range_split(&resonance::split_fh(&sol)?, num.a)?;
    checks.push(Check { name: "r split/integral".into(), rel: rel(split, num.r), tol: 1e-8 });
    let fit = phaseshift::low_k_parameters(spec, l, None)?;
    checks.push(Check { name: "a phaseshift/integral".into(), rel: rel(fit.a, num.a), tol: 1e-4 });
    checks.push(Check { name: "r phaseshift/integral".into(), rel: rel(fit.r, num.r), tol: 1e-3 });
    Ok(checks)
}

fn validate(cfg: &RunConfig) -> RunOutput {
    let suite = match &cfg.potential {
        Some(spec) => vec![(cfg.potential_id.clone(), spec.clone())],
        None => default_suite(),
    };
    let l_list = if cfg.potential.is_none() && cfg.l_list == [0] { vec![0, 1, 2] } else { cfg.l_list.clone() };
    let mut text = String::new();
    let (mut passed, mut failed) = (0, 0);
    for (name, spec) in &suite {
        for &l in &l_list {
            let grid = match grid_for(cfg, spec, l) {
                Ok(g) => g,
                Err(e) => {
                    failed += 1;
                    text.push_str(&format!("FAIL {name} l={l} error: {e}\n"));
                    continue;
                }
            };
            match triangle(spec, l, grid) {
                Ok(checks) if checks.is_empty() => text.push_str(&format!("SKIP {name} l={l} flagged\n")),
                Ok(checks) => {
                    for c in checks {
                        let ok = c.rel <= c.tol;
                        if ok { passed += 1 } else { failed += 1 }
                        text.push_str(&format!(
                            "{} {name} l={l} {}: rel={:.3e} tol={:.0e}\n",
                            if ok { "PASS" } else { "FAIL" },
                            c.name,
                            c.rel,
                            c.tol
                        ));
                    }
                }
                Err(e) => {
                    failed += 1;
                    text.push_str(&format!("FAIL {name} l={l} error: {e}\n"));
                }
            }
        }
    }
    text.push_str(&format!("# {passed} passed, {failed} failed\n"));
    RunOutput { text, warnings: Vec::new(), exit_code: if failed > 0 { 3 } else { 0 } }
}
