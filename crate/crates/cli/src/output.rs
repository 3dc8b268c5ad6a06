//! Result rows and their CSV / JSON Lines encodings.

use serde::{Serialize, Serializer};

use crate::config::Format;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_COLUMNS: &str = "potential,strength,l,a_over_R,r_over_R,c1,c2,route,flags";

/// One output record. Lengths are in units of the characteristic length
/// `R`; `c1` in `R^{2l+1}`, `c2` in `R^{2l+3}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub potential: String,
    #[serde(serialize_with = "float")]
    pub strength: f64,
    pub l: u32,
    #[serde(rename = "a_over_R", serialize_with = "float")]
    pub a_over_r: f64,
    #[serde(rename = "r_over_R", serialize_with = "float")]
    pub r_over_r: f64,
    #[serde(serialize_with = "float")]
    pub c1: f64,
    #[serde(serialize_with = "float")]
    pub c2: f64,
    pub route: String,
    pub flags: String,
}

impl ResultRow {
    /// Diagnostic row for a failed evaluation.
    pub fn failure(potential: &str, strength: f64, l: u32, err: &str) -> Self {
        Self {
            potential: potential.to_string(),
            strength,
            l,
            a_over_r: f64::NAN,
            r_over_r: f64::NAN,
            c1: f64::NAN,
            c2: f64::NAN,
            route: "error".into(),
            flags: format!("error:{}", sanitize(err)),
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.potential,
            fmt_float(self.strength),
            self.l,
            fmt_float(self.a_over_r),
            fmt_float(self.r_over_r),
            fmt_float(self.c1),
            fmt_float(self.c2),
            self.route,
            self.flags
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("rows always serialize")
    }
}

/// 17 significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn float<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&fmt_float(*x))
    }
}

fn sanitize(msg: &str) -> String {
    msg.chars().map(|c| if c == ',' || c == '\n' || c == '"' { ';' } else { c }).collect()
}

pub fn flags_field(near_resonance: bool, near_zero_a: bool) -> String {
    match (near_resonance, near_zero_a) {
        (false, false) => "none".into(),
        (true, false) => "near_resonance".into(),
        (false, true) => "near_zero_a".into(),
        (true, true) => "near_resonance|near_zero_a".into(),
    }
}

/// Encodes rows; CSV starts with a versioned comment and the column header.
pub fn render(rows: &[ResultRow], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(&format!(
                "# scatlen results v{SCHEMA_VERSION}; lengths in units of R, c1 in R^(2l+1), c2 in R^(2l+3)\n"
            ));
            out.push_str(CSV_COLUMNS);
            out.push('\n');
            for row in rows {
                out.push_str(&row.to_csv());
                out.push('\n');
            }
        }
        Format::Json => {
            for row in rows {
                out.push_str(&row.to_json());
                out.push('\n');
            }
        }
    }
    out
}
