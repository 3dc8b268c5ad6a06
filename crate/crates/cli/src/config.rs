//! Command-line and `key=value` file configuration.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use scatlen_core::potentials::load_tabulated;
use scatlen_core::{PotentialSpec, L_MAX};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "scatlen", version, about = "Scattering lengths and effective ranges of central potentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Subcommand, Debug)]
pub enum CommandArgs {
    /// a_l, r_l, c1 and c2 for each requested l
    Params(Settings),
    /// Parameters over a range of dimensionless strengths
    Sweep(Settings),
    /// Critical strengths where a_l diverges
    Resonance(Settings),
    /// a_l and r_l from a low-k fit of k^{2l+1} cot(delta)
    Phaseshift(Settings),
    /// Cross-route consistency checks
    Validate(Settings),
}

/// Every setting, from flags or from a config file.
#[derive(Args, Debug, Clone, Default, PartialEq)]
pub struct Settings {
    /// hard_sphere, soft_sphere, spherical_well, well_barrier, poschl_teller or tabulated
    #[arg(long)]
    pub potential: Option<String>,
    /// Radius (length unit of the output)
    #[arg(long = "R")]
    pub r: Option<f64>,
    #[arg(long = "k0R")]
    pub k0r: Option<f64>,
    #[arg(long = "k1R1")]
    pub k1r1: Option<f64>,
    #[arg(long = "k2R2")]
    pub k2r2: Option<f64>,
    #[arg(long = "R1")]
    pub r1: Option<f64>,
    #[arg(long = "R2")]
    pub r2: Option<f64>,
    /// Poschl-Teller strength U0 R^2 (negative is attractive)
    #[arg(long = "U0R2", allow_hyphen_values = true)]
    pub u0r2: Option<f64>,
    /// Two-column file of r and U(r) for the tabulated potential
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Comma-separated angular momenta
    #[arg(long)]
    pub l: Option<String>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Strength range lo:hi:n
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file; flags given on the command line take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Settings {
    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            potential: self.potential.or(base.potential),
            r: self.r.or(base.r),
            k0r: self.k0r.or(base.k0r),
            k1r1: self.k1r1.or(base.k1r1),
            k2r2: self.k2r2.or(base.k2r2),
            r1: self.r1.or(base.r1),
            r2: self.r2.or(base.r2),
            u0r2: self.u0r2.or(base.u0r2),
            table: self.table.or(base.table),
            l: self.l.or(base.l),
            h: self.h.or(base.h),
            rmax: self.rmax.or(base.rmax),
            range: self.range.or(base.range),
            format: self.format.or(base.format),
            out: self.out.or(base.out),
            config: self.config.or(base.config),
        }
    }

    /// Parses `key=value` lines; `#` starts a comment.
    pub fn from_config_text(text: &str) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim().to_string());
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("config line {}: {key} needs a number, got {v:?}", n + 1)))
            };
            match key {
                "potential" => s.potential = Some(value),
                "R" => s.r = Some(num(&value)?),
                "k0R" => s.k0r = Some(num(&value)?),
                "k1R1" => s.k1r1 = Some(num(&value)?),
                "k2R2" => s.k2r2 = Some(num(&value)?),
                "R1" => s.r1 = Some(num(&value)?),
                "R2" => s.r2 = Some(num(&value)?),
                "U0R2" => s.u0r2 = Some(num(&value)?),
                "table" => s.table = Some(PathBuf::from(value)),
                "l" => s.l = Some(value),
                "h" => s.h = Some(num(&value)?),
                "rmax" => s.rmax = Some(num(&value)?),
                "range" => s.range = Some(value),
                "format" => s.format = Some(value),
                "out" => s.out = Some(PathBuf::from(value)),
                other => return Err(CliError::Usage(format!("config line {}: unknown key {other:?}", n + 1))),
            }
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Params,
    Sweep,
    Resonance,
    Phaseshift,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// `None` only for `validate`, which then runs its default suite.
    pub potential: Option<PotentialSpec>,
    pub potential_id: String,
    pub l_list: Vec<u32>,
    pub h: Option<f64>,
    pub r_max: Option<f64>,
    pub range: Option<Range>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

/// Parses arguments (program name first) and an optional config file.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::Clap)?;
    let (command, flags) = match cli.command {
        CommandArgs::Params(s) => (Command::Params, s),
        CommandArgs::Sweep(s) => (Command::Sweep, s),
        CommandArgs::Resonance(s) => (Command::Resonance, s),
        CommandArgs::Phaseshift(s) => (Command::Phaseshift, s),
        CommandArgs::Validate(s) => (Command::Validate, s),
    };
    let settings = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            flags.over(Settings::from_config_text(&text)?)
        }
        None => flags,
    };
    build(command, settings)
}

/// Validates merged settings into a [`RunConfig`].
pub fn build(command: Command, s: Settings) -> Result<RunConfig, CliError> {
    let l_list = parse_l_list(s.l.as_deref().unwrap_or("0"))?;
    let positive = |name: &str, v: Option<f64>| match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::Usage(format!("--{name} must be positive, got {x}"))),
        _ => Ok(v),
    };
    let h = positive("h", s.h)?;
    let r_max = positive("rmax", s.rmax)?;
    let range = s.range.as_deref().map(parse_range).transpose()?;
    let format = match s.format.as_deref().unwrap_or("csv") {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => return Err(CliError::Usage(format!("unknown format {other:?}; use csv or json"))),
    };
    let mut s = s;
    if matches!(command, Command::Sweep | Command::Resonance) {
        // the swept strength comes from --range; a placeholder completes the family
        match s.potential.as_deref() {
            Some("soft_sphere" | "spherical_well") => s.k0r = s.k0r.or(Some(1.0)),
            Some("well_barrier") => s.k1r1 = s.k1r1.or(Some(1.0)),
            Some("poschl_teller") => s.u0r2 = s.u0r2.or(Some(1.0)),
            _ => {}
        }
    }
    let (potential, potential_id) = match s.potential.as_deref() {
        Some(id) => (Some(build_potential(id, &s)?), id.to_string()),
        None if command == Command::Validate => (None, "suite".to_string()),
        None => return Err(CliError::Usage("--potential is required".into())),
    };
    if matches!(command, Command::Sweep | Command::Resonance) && range.is_none() {
        return Err(CliError::Usage("--range lo:hi:n is required for this command".into()));
    }
    Ok(RunConfig { command, potential, potential_id, l_list, h, r_max, range, format, out: s.out })
}

pub fn parse_l_list(text: &str) -> Result<Vec<u32>, CliError> {
    let list = text
        .split(',')
        .map(|t| {
            let l: u32 = t.trim().parse().map_err(|_| CliError::Usage(format!("invalid l {t:?}")))?;
            if l > L_MAX {
                return Err(CliError::Usage(format!("l = {l} exceeds {L_MAX}")));
            }
            Ok(l)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if list.is_empty() {
        return Err(CliError::Usage("empty l list".into()));
    }
    Ok(list)
}

pub fn parse_range(text: &str) -> Result<Range, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::Usage(format!("invalid range {text:?}; expected lo:hi:n"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(lo < hi) || n < 2 {
        return Err(bad());
    }
    Ok(Range { lo, hi, n })
}

fn build_potential(id: &str, s: &Settings) -> Result<PotentialSpec, CliError> {
    let given: Vec<&str> = [
        ("k0R", s.k0r.is_some()),
        ("k1R1", s.k1r1.is_some()),
        ("k2R2", s.k2r2.is_some()),
        ("R1", s.r1.is_some()),
        ("R2", s.r2.is_some()),
        ("U0R2", s.u0r2.is_some()),
        ("table", s.table.is_some()),
        ("R", s.r.is_some()),
    ]
    .into_iter()
    .filter_map(|(k, set)| set.then_some(k))
    .collect();
    let allowed: &[&str] = match id {
        "hard_sphere" => &["R"],
        "soft_sphere" | "spherical_well" => &["R", "k0R"],
        "well_barrier" => &["k1R1", "k2R2", "R1", "R2"],
        "poschl_teller" => &["R", "U0R2"],
        "tabulated" => &["table"],
        other => return Err(CliError::Usage(format!("unknown potential {other:?}"))),
    };
    if let Some(extra) = given.iter().find(|k| !allowed.contains(k)) {
        return Err(CliError::Usage(format!("--{extra} conflicts with --potential {id}")));
    }
    let require = |name: &str, v: Option<f64>| v.ok_or_else(|| CliError::Usage(format!("--{name} is required for {id}")));
    let radius = s.r.unwrap_or(1.0);
    let spec = match id {
        "hard_sphere" => PotentialSpec::HardSphere { radius },
        "soft_sphere" => PotentialSpec::SoftSphere { k0: require("k0R", s.k0r)? / radius, radius },
        "spherical_well" => PotentialSpec::SphericalWell { k0: require("k0R", s.k0r)? / radius, radius },
        "well_barrier" => {
            let (r1, r2) = (require("R1", s.r1)?, require("R2", s.r2)?);
            PotentialSpec::WellBarrier { k1: require("k1R1", s.k1r1)? / r1, r1, k2: require("k2R2", s.k2r2)? / r2, r2 }
        }
        "poschl_teller" => PotentialSpec::PoschlTeller { u0: require("U0R2", s.u0r2)? / (radius * radius), radius },
        _ => load_table(s.table.as_deref().ok_or_else(|| CliError::Usage("--table is required for tabulated".into()))?)?,
    };
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(spec)
}

fn load_table(path: &Path) -> Result<PotentialSpec, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    load_tabulated(file).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
