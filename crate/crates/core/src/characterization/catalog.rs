use std::fmt;

use super::AnalysisError;

/// Pipe-delimited catalog shipped with the crate.
pub const BUNDLED_CATALOG: &str = include_str!("../../data/materials.psv");

const HEADER: &str = "# name|shore_hardness_A|tear_strength_kN_per_m|tensile_strength_MPa|elongation_at_break_pct|viscosity_mPa_s|problems";

/// A value or range exactly as printed by the supplier, e.g. `20-15`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueRange {
    pub text: String,
    /// Numbers in the order written.
    pub values: Vec<f64>,
}

impl ValueRange {
    pub fn parse(text: &str) -> Result<Self, AnalysisError> {
        let values = text
            .split('-')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| AnalysisError::MalformedCsv(format!("bad catalog value `{text}`")))?;
        if values.is_empty() || values.len() > 2 || values.iter().any(|v| !(*v > 0.0)) {
            return Err(AnalysisError::MalformedCsv(format!(
                "catalog value `{text}` must be one or two positive numbers"
            )));
        }
        Ok(Self { text: text.to_string(), values })
    }

    /// First number as written.
    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl fmt::Display for ValueRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialEntry {
    pub name: String,
    /// Shore A.
    pub shore_hardness: ValueRange,
    pub tear_strength_kn_per_m: Option<ValueRange>,
    pub tensile_strength_mpa: Option<ValueRange>,
    pub elongation_at_break_pct: Option<ValueRange>,
    pub viscosity_mpa_s: Option<ValueRange>,
    pub problems: String,
}

fn optional(cell: &str) -> Result<Option<ValueRange>, AnalysisError> {
    if cell.trim() == "NA" {
        Ok(None)
    } else {
        ValueRange::parse(cell.trim()).map(Some)
    }
}

fn cell(v: &Option<ValueRange>) -> &str {
    v.as_ref().map_or("NA", |r| r.text.as_str())
}

pub fn parse_catalog(text: &str) -> Result<Vec<MaterialEntry>, AnalysisError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            let f: Vec<&str> = line.split('|').map(str::trim).collect();
            if f.len() != 7 {
                return Err(AnalysisError::MalformedCsv(format!("catalog line needs 7 fields: `{line}`")));
            }
            Ok(MaterialEntry {
                name: f[0].to_string(),
                shore_hardness: ValueRange::parse(f[1])?,
                tear_strength_kn_per_m: optional(f[2])?,
                tensile_strength_mpa: optional(f[3])?,
                elongation_at_break_pct: optional(f[4])?,
                viscosity_mpa_s: optional(f[5])?,
                problems: f[6].to_string(),
            })
        })
        .collect()
}

pub fn serialize_catalog(entries: &[MaterialEntry]) -> String {
    let mut s = String::from(HEADER);
    s.push('\n');
    for e in entries {
        s.push_str(&format!(
            "{}|{}|{}|{}|{}|{}|{}\n",
            e.name,
            e.shore_hardness,
            cell(&e.tear_strength_kn_per_m),
            cell(&e.tensile_strength_mpa),
            cell(&e.elongation_at_break_pct),
            cell(&e.viscosity_mpa_s),
            e.problems
        ));
    }
    s
}

/// All bundled entries, or the one named `name` (case-insensitive).
pub fn material_catalog(name: Option<&str>) -> Result<Vec<MaterialEntry>, AnalysisError> {
    let all = parse_catalog(BUNDLED_CATALOG)?;
    match name {
        None => Ok(all),
        Some(n) => all
            .into_iter()
            .find(|e| e.name.eq_ignore_ascii_case(n.trim()))
            .map(|e| vec![e])
            .ok_or_else(|| AnalysisError::UnknownMaterial(n.to_string())),
    }
}

impl fmt::Display for MaterialEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        writeln!(f, "  shore hardness      {}A", self.shore_hardness)?;
        let unit = |v: &Option<ValueRange>, u: &str| v.as_ref().map_or("NA".to_string(), |r| format!("{r} {u}"));
        writeln!(f, "  tear strength       {}", unit(&self.tear_strength_kn_per_m, "kN/m"))?;
        writeln!(f, "  tensile strength    {}", unit(&self.tensile_strength_mpa, "MPa"))?;
        writeln!(f, "  elongation at break {}", unit(&self.elongation_at_break_pct, "%"))?;
        writeln!(f, "  viscosity           {}", unit(&self.viscosity_mpa_s, "mPa·s"))?;
        write!(f, "  problems            {}", self.problems)
    }
}
