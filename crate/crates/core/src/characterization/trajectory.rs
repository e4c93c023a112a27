use std::collections::BTreeMap;
use std::io::Read;

use super::AnalysisError;
use crate::Vec2;

/// Points per trajectory after arc-length resampling.
pub const RESAMPLE_POINTS: usize = 64;

/// One tracked actuation round.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRound {
    /// Actuation direction, 1 or 2.
    pub direction: u8,
    pub round: u32,
    pub time_s: Vec<f64>,
    /// Tracked marker positions, mm.
    pub points: Vec<Vec2>,
}

impl TrajectoryRound {
    pub fn new(direction: u8, round: u32, time_s: Vec<f64>, points: Vec<Vec2>) -> Result<Self, AnalysisError> {
        if !(direction == 1 || direction == 2) {
            return Err(AnalysisError::MalformedCsv(format!("direction {direction} is not 1 or 2")));
        }
        if time_s.len() != points.len() || time_s.is_empty() {
            return Err(AnalysisError::MalformedCsv("empty or ragged trajectory".into()));
        }
        if time_s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(AnalysisError::MalformedCsv(format!(
                "time not strictly increasing in direction {direction} round {round}"
            )));
        }
        Ok(Self { direction, round, time_s, points })
    }

    pub fn path_length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

/// Reads `time_s, x_mm, y_mm, direction, round` rows, grouped by
/// `(direction, round)` in ascending order.
pub fn load_trajectories<R: Read>(input: R) -> Result<Vec<TrajectoryRound>, AnalysisError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(input);
    let headers = rdr.headers().map_err(|e| AnalysisError::MalformedCsv(e.to_string()))?.clone();
    let col = |n: &str| headers.iter().position(|h| h == n).ok_or_else(|| AnalysisError::MissingColumn(n.into()));
    let (ti, xi, yi, di, ri) = (col("time_s")?, col("x_mm")?, col("y_mm")?, col("direction")?, col("round")?);
    let mut groups: BTreeMap<(u8, u32), (Vec<f64>, Vec<Vec2>)> = BTreeMap::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| AnalysisError::MalformedCsv(e.to_string()))?;
        let bad = || AnalysisError::MalformedCsv(format!("row {}: bad value", row + 2));
        let num = |i: usize| rec.get(i).and_then(|s| s.parse::<f64>().ok()).filter(|v| v.is_finite()).ok_or_else(bad);
        let direction: u8 = rec.get(di).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let round: u32 = rec.get(ri).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let g = groups.entry((direction, round)).or_default();
        g.0.push(num(ti)?);
        g.1.push(Vec2::new(num(xi)?, num(yi)?));
    }
    if groups.is_empty() {
        return Err(AnalysisError::Empty("no trajectory rows".into()));
    }
    groups.into_iter().map(|((d, r), (t, p))| TrajectoryRound::new(d, r, t, p)).collect()
}

/// `n` points equally spaced in arc length along the polyline.
pub fn resample_by_arc_length(points: &[Vec2], n: usize) -> Vec<Vec2> {
    if points.len() < 2 || n < 2 {
        return vec![points.first().copied().unwrap_or_else(Vec2::zeros); n];
    }
    let mut cum = vec![0.0];
    for w in points.windows(2) {
        cum.push(cum.last().unwrap() + (w[1] - w[0]).norm());
    }
    let total = *cum.last().unwrap();
    if total == 0.0 {
        return vec![points[0]; n];
    }
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for k in 0..n {
        let s = total * k as f64 / (n - 1) as f64;
        while seg + 2 < cum.len() && cum[seg + 1] < s {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let f = if len > 0.0 { ((s - cum[seg]) / len).clamp(0.0, 1.0) } else { 0.0 };
        out.push(points[seg] + (points[seg + 1] - points[seg]) * f);
    }
    out
}

/// Round-to-round spread of one actuation direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionDependency {
    pub direction: u8,
    pub rounds: usize,
    /// Mean over round pairs of the RMS point-wise distance, mm.
    pub mean_rms_mm: f64,
    /// `mean_rms_mm` relative to the mean path length, percent.
    pub normalized_pct: f64,
}

pub fn trajectory_dependency(rounds: &[TrajectoryRound]) -> Result<Vec<DirectionDependency>, AnalysisError> {
    let mut by_dir: BTreeMap<u8, Vec<&TrajectoryRound>> = BTreeMap::new();
    for r in rounds {
        by_dir.entry(r.direction).or_default().push(r);
    }
    if by_dir.is_empty() {
        return Err(AnalysisError::InsufficientRounds { direction: 1, rounds: 0 });
    }
    let mut out = Vec::new();
    for (direction, rs) in by_dir {
        if rs.len() < 2 {
            return Err(AnalysisError::InsufficientRounds { direction, rounds: rs.len() });
        }
        let resampled: Vec<Vec<Vec2>> = rs.iter().map(|r| resample_by_arc_length(&r.points, RESAMPLE_POINTS)).collect();
        let mut sum = 0.0;
        let mut pairs = 0;
        for i in 0..resampled.len() {
            for j in (i + 1)..resampled.len() {
                let ms = resampled[i].iter().zip(&resampled[j]).map(|(a, b)| (a - b).norm_squared()).sum::<f64>()
                    / RESAMPLE_POINTS as f64;
                sum += ms.sqrt();
                pairs += 1;
            }
        }
        let mean_rms_mm = sum / pairs as f64;
        let mean_len = rs.iter().map(|r| r.path_length()).sum::<f64>() / rs.len() as f64;
        out.push(DirectionDependency {
            direction,
            rounds: rs.len(),
            mean_rms_mm,
            normalized_pct: if mean_len > 0.0 { 100.0 * mean_rms_mm / mean_len } else { 0.0 },
        });
    }
    Ok(out)
}
