use super::record::{ExperimentRecord, Sample};
use super::AnalysisError;

/// Largest time gap for pairing a force sample with a pressure sample, s.
pub const JOIN_WINDOW_S: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSummary {
    pub max_force_n: f64,
    pub time_s: f64,
    /// Pressure recorded nearest in time to the peak, kPa.
    pub pressure_kpa: f64,
}

/// Peak force and the pressure at that moment. The earliest sample wins ties.
pub fn force_summary(rec: &ExperimentRecord) -> Result<ForceSummary, AnalysisError> {
    let (time_s, max_force_n) = rec
        .force_series()
        .into_iter()
        .fold(None, |best: Option<(f64, f64)>, (t, f)| match best {
            Some((_, bf)) if bf >= f => best,
            _ => Some((t, f)),
        })
        .ok_or_else(|| AnalysisError::MissingColumn("force_N".into()))?;
    let pressure_kpa = rec
        .pressure_series()
        .into_iter()
        .map(|(t, p)| ((t - time_s).abs(), p))
        .filter(|(dt, _)| *dt <= JOIN_WINDOW_S + 1e-12)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, p)| p)
        .ok_or_else(|| {
            AnalysisError::MissingColumn(format!("pressure_kPa within {JOIN_WINDOW_S} s of t = {time_s}"))
        })?;
    Ok(ForceSummary { max_force_n, time_s, pressure_kpa })
}

/// Timing of one actuation cycle, s. Thresholds are fractions of the plateau
/// displacement measured from the first sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMetrics {
    /// 10 % to 90 % on the way up.
    pub actuation_s: f64,
    /// Time spent at or above 95 %.
    pub hold_s: f64,
    /// 90 % to 10 % on the way down.
    pub release_s: f64,
    /// Rising 10 % crossing to falling 10 % crossing.
    pub cycle_s: f64,
    /// Plateau displacement relative to the start, mm (signed).
    pub plateau_mm: f64,
    pub start_s: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// First index `>= from` where `pred(u)` holds, with the time linearly
/// interpolated to where `u` meets `level` between that sample and the one
/// before it.
fn crossing(t: &[f64], u: &[f64], from: usize, level: f64, rising: bool) -> Option<(usize, f64)> {
    let hit = |x: f64| if rising { x >= level } else { x < level };
    let i = (from..u.len()).find(|&i| hit(u[i]))?;
    if i == 0 || i == from && hit(u[i - 1]) {
        return Some((i, t[i]));
    }
    let (u0, u1) = (u[i - 1], u[i]);
    let f = if u1 != u0 { (level - u0) / (u1 - u0) } else { 1.0 };
    Some((i, t[i - 1] + f.clamp(0.0, 1.0) * (t[i] - t[i - 1])))
}

pub fn step_response_metrics(rec: &ExperimentRecord) -> Result<StepMetrics, AnalysisError> {
    let series = rec.displacement_series();
    if series.is_empty() {
        return Err(AnalysisError::MissingColumn("displacement_mm".into()));
    }
    let t: Vec<f64> = series.iter().map(|s| s.0).collect();
    let base = series[0].1;
    let extreme = series.iter().map(|s| s.1 - base).max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(0.0);
    if extreme.abs() <= 1e-12 {
        return Err(AnalysisError::NoPlateau("displacement never leaves its start value".into()));
    }
    let sign = extreme.signum();
    let u: Vec<f64> = series.iter().map(|s| sign * (s.1 - base)).collect();
    let peak = extreme.abs();
    let plateau = median(u.iter().copied().filter(|&x| x >= 0.95 * peak).collect());
    let no_plateau = |what: &str| AnalysisError::NoPlateau(format!("trace never {what}"));

    let (i10, t10) = crossing(&t, &u, 0, 0.1 * plateau, true).ok_or_else(|| no_plateau("rises"))?;
    let (i90, t90) = crossing(&t, &u, i10, 0.9 * plateau, true).ok_or_else(|| no_plateau("rises"))?;
    let (i95, t95) = crossing(&t, &u, i90, 0.95 * plateau, true).ok_or_else(|| no_plateau("reaches 95 %"))?;
    let last95 = (i95..u.len()).rev().find(|&i| u[i] >= 0.95 * plateau).unwrap_or(i95);
    let hold_end = crossing(&t, &u, last95 + 1, 0.95 * plateau, false).map(|c| c.1).unwrap_or(t[last95]);
    let (j90, r90) = crossing(&t, &u, last95 + 1, 0.9 * plateau, false).ok_or_else(|| no_plateau("falls back"))?;
    let (_, r10) = crossing(&t, &u, j90, 0.1 * plateau, false).ok_or_else(|| no_plateau("returns to start"))?;
    Ok(StepMetrics {
        actuation_s: t90 - t10,
        hold_s: hold_end - t95,
        release_s: r10 - r90,
        cycle_s: r10 - t10,
        plateau_mm: sign * plateau,
        start_s: t10,
    })
}

/// Splits a stepped-pressure trace into segments of constant pressure
/// (within 0.5 kPa of the segment's first reading).
pub fn split_steady_segments(rec: &ExperimentRecord) -> Vec<ExperimentRecord> {
    let mut out: Vec<Vec<Sample>> = Vec::new();
    let mut level: Option<f64> = None;
    for s in &rec.samples {
        match (s.pressure_kpa, level) {
            (Some(p), Some(l)) if (p - l).abs() <= 0.5 => {}
            (Some(p), _) => {
                level = Some(p);
                out.push(Vec::new());
            }
            (None, None) => continue,
            (None, Some(_)) => {}
        }
        out.last_mut().expect("segment started").push(*s);
    }
    out.into_iter()
        .enumerate()
        .filter_map(|(i, s)| ExperimentRecord::new(format!("{}#{i}", rec.label), s).ok())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureCurve {
    /// `(pressure kPa, steady displacement mm)`, sorted by `|pressure|`.
    pub points: Vec<(f64, f64)>,
    /// Smallest-magnitude pressure reaching 98 % of the largest displacement.
    pub plateau_kpa: f64,
    pub max_displacement_mm: f64,
}

/// Steady displacement per pressure level: medians of pressure and of the
/// second half of the displacement samples.
pub fn pressure_displacement(recs: &[ExperimentRecord]) -> Result<PressureCurve, AnalysisError> {
    if recs.is_empty() {
        return Err(AnalysisError::Empty("no pressure records".into()));
    }
    let mut points = Vec::with_capacity(recs.len());
    for r in recs {
        let p: Vec<f64> = r.pressure_series().into_iter().map(|s| s.1).collect();
        let d: Vec<f64> = r.displacement_series().into_iter().map(|s| s.1).collect();
        if p.is_empty() {
            return Err(AnalysisError::MissingColumn(format!("pressure_kPa in {}", r.label)));
        }
        if d.is_empty() {
            return Err(AnalysisError::MissingColumn(format!("displacement_mm in {}", r.label)));
        }
        points.push((median(p), median(d[d.len() / 2..].to_vec())));
    }
    points.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
    if let Some(w) = points.windows(2).find(|w| (w[1].0 - w[0].0).abs() < 0.05) {
        return Err(AnalysisError::DuplicatePressure(w[1].0));
    }
    let max_displacement_mm = points.iter().map(|p| p.1).max_by(|a, b| a.abs().total_cmp(&b.abs())).expect("non-empty");
    let plateau_kpa =
        points.iter().find(|p| p.1.abs() >= 0.98 * max_displacement_mm.abs()).expect("the maximum itself qualifies").0;
    Ok(PressureCurve { points, plateau_kpa, max_displacement_mm })
}
