//! Config keys and their defaults.

use oritube::config::Config;
use oritube::structural::SimulationScenario;
use oritube::{make_quad_section, AssemblySpec, CrossSection, TubeSpec};

use crate::Failure;

pub const DEFAULT_SEED: u64 = 20_211;
pub const DEFAULT_FOLD_STEPS: usize = 21;

const DESIGN_KEYS: [&str; 14] = [
    "section_a_mm",
    "section_b_mm",
    "theta1_deg",
    "theta2_deg",
    "section_points",
    "length_tol_mm",
    "alpha_deg",
    "unit_length_mm",
    "n_units",
    "n_vertical",
    "n_horizontal",
    "pattern_x",
    "pattern_y",
    "pattern_z",
];

const RUN_KEYS: [&str; 8] =
    ["fold_steps", "fold_t_start", "fold_t_stop", "triangulation", "supports", "utm_csv", "data_dir", "seed"];

pub fn known_keys() -> Vec<&'static str> {
    DESIGN_KEYS.iter().chain(RUN_KEYS.iter()).chain(SimulationScenario::KEYS.iter()).copied().collect()
}

pub fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn get<T: std::str::FromStr>(cfg: &Config, key: &str, default: T) -> Result<T, Failure> {
    cfg.get_or(key, default).map_err(usage)
}

/// Parses `x,y; x,y; ...`.
pub fn parse_points(text: &str) -> Result<Vec<(f64, f64)>, Failure> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (x, y) = pair.split_once(',').ok_or_else(|| usage(format!("point `{pair}` is not `x,y`")))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| usage(format!("bad coordinate `{}`", s.trim())));
            Ok((num(x)?, num(y)?))
        })
        .collect()
}

/// Whether the config describes a cross-section at all.
pub fn has_section(cfg: &Config) -> bool {
    ["section_a_mm", "section_b_mm", "theta1_deg", "theta2_deg", "section_points"].iter().any(|k| cfg.raw(k).is_some())
}

/// Cross-section from the config; a 15 mm square by default.
pub fn section(cfg: &Config) -> Result<CrossSection, Failure> {
    if let Some(text) = cfg.raw("section_points") {
        return Ok(CrossSection::from_points(&parse_points(text)?)?);
    }
    let a = get(cfg, "section_a_mm", 15.0)?;
    let b = get(cfg, "section_b_mm", 15.0)?;
    let t1 = get(cfg, "theta1_deg", 0.0)?;
    let t2 = get(cfg, "theta2_deg", 90.0)?;
    Ok(make_quad_section(a, b, t1, t2)?)
}

pub fn tube_spec(cfg: &Config) -> Result<TubeSpec, Failure> {
    Ok(TubeSpec::new(
        section(cfg)?,
        get(cfg, "alpha_deg", TubeSpec::DEFAULT_ALPHA_DEG)?,
        get(cfg, "unit_length_mm", 15.0)?,
        get(cfg, "n_units", 1usize)?,
    ))
}

/// The two-channel assembly, when `n_vertical` is at least 1.
pub fn assembly_spec(cfg: &Config) -> Result<Option<AssemblySpec>, Failure> {
    let n_vertical: usize = get(cfg, "n_vertical", 0)?;
    if n_vertical == 0 {
        return Ok(None);
    }
    Ok(Some(AssemblySpec {
        tube: tube_spec(cfg)?,
        n_vertical,
        n_horizontal: get(cfg, "n_horizontal", 0)?,
        pattern: (get(cfg, "pattern_x", 1)?, get(cfg, "pattern_y", 1)?, get(cfg, "pattern_z", 1)?),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        let p = parse_points("0,0; 10, 0;10,5 ; 0,5;").unwrap();
        assert_eq!(p, vec![(0.0, 0.0), (10.0, 0.0), (10.0, 5.0), (0.0, 5.0)]);
        assert!(matches!(parse_points("0 0; 1,1"), Err(Failure::Usage(_))));
        assert!(matches!(parse_points("0,x"), Err(Failure::Usage(_))));
    }

    #[test]
    fn defaults_give_single_unit_square_tube() {
        let cfg = Config::default();
        let spec = tube_spec(&cfg).unwrap();
        assert_eq!(spec.n_units, 1);
        assert_eq!(spec.alpha_deg, 45.0);
        assert!(assembly_spec(&cfg).unwrap().is_none());
        assert!(!has_section(&cfg));
    }

    #[test]
    fn keys_are_unique() {
        let mut k = known_keys();
        let n = k.len();
        k.sort();
        k.dedup();
        assert_eq!(k.len(), n);
    }
}
