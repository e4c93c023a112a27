use std::io::Read;

use super::AnalysisError;

/// One row of an experiment trace. Empty cells are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub time_s: f64,
    /// Gauge pressure, kPa; negative is vacuum.
    pub pressure_kpa: Option<f64>,
    pub displacement_mm: Option<f64>,
    pub force_n: Option<f64>,
}

/// Time series from one actuator experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub label: String,
    pub samples: Vec<Sample>,
}

impl ExperimentRecord {
    /// Checks strictly increasing time and that displacement or force is
    /// recorded.
    pub fn new(label: impl Into<String>, samples: Vec<Sample>) -> Result<Self, AnalysisError> {
        if samples.is_empty() {
            return Err(AnalysisError::Empty("record has no samples".into()));
        }
        if let Some(w) = samples.windows(2).find(|w| !(w[1].time_s > w[0].time_s)) {
            return Err(AnalysisError::MalformedCsv(format!("time not strictly increasing at {} s", w[1].time_s)));
        }
        if !samples.iter().any(|s| s.displacement_mm.is_some() || s.force_n.is_some()) {
            return Err(AnalysisError::MissingColumn("displacement_mm or force_N".into()));
        }
        Ok(Self { label: label.into(), samples })
    }

    /// Parses `time_s, pressure_kPa[, displacement_mm][, force_N]`.
    pub fn from_csv<R: Read>(label: impl Into<String>, input: R) -> Result<Self, AnalysisError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(input);
        let headers = rdr.headers().map_err(|e| AnalysisError::MalformedCsv(e.to_string()))?.clone();
        let find = |name: &str| headers.iter().position(|h| h == name);
        let ti = find("time_s").ok_or_else(|| AnalysisError::MissingColumn("time_s".into()))?;
        let pi = find("pressure_kPa").ok_or_else(|| AnalysisError::MissingColumn("pressure_kPa".into()))?;
        let (di, fi) = (find("displacement_mm"), find("force_N"));
        if di.is_none() && fi.is_none() {
            return Err(AnalysisError::MissingColumn("displacement_mm or force_N".into()));
        }
        let mut samples = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| AnalysisError::MalformedCsv(e.to_string()))?;
            let cell = |i: Option<usize>| -> Result<Option<f64>, AnalysisError> {
                match i.and_then(|i| rec.get(i)).filter(|s| !s.is_empty()) {
                    None => Ok(None),
                    Some(s) => s
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .map(Some)
                        .ok_or_else(|| AnalysisError::MalformedCsv(format!("row {}: bad number `{s}`", row + 2))),
                }
            };
            let time_s =
                cell(Some(ti))?.ok_or_else(|| AnalysisError::MalformedCsv(format!("row {}: missing time", row + 2)))?;
            samples.push(Sample {
                time_s,
                pressure_kpa: cell(Some(pi))?,
                displacement_mm: cell(di)?,
                force_n: cell(fi)?,
            });
        }
        Self::new(label, samples)
    }

    pub fn has_force(&self) -> bool {
        self.samples.iter().any(|s| s.force_n.is_some())
    }

    pub fn has_displacement(&self) -> bool {
        self.samples.iter().any(|s| s.displacement_mm.is_some())
    }

    /// `(time, displacement)` for rows that have a displacement.
    pub fn displacement_series(&self) -> Vec<(f64, f64)> {
        self.samples.iter().filter_map(|s| s.displacement_mm.map(|d| (s.time_s, d))).collect()
    }

    pub fn force_series(&self) -> Vec<(f64, f64)> {
        self.samples.iter().filter_map(|s| s.force_n.map(|f| (s.time_s, f))).collect()
    }

    pub fn pressure_series(&self) -> Vec<(f64, f64)> {
        self.samples.iter().filter_map(|s| s.pressure_kpa.map(|p| (s.time_s, p))).collect()
    }

    /// Same record with every time shifted by `dt`.
    pub fn shifted(&self, dt: f64) -> Self {
        let mut r = self.clone();
        r.samples.iter_mut().for_each(|s| s.time_s += dt);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_optional_columns() {
        let text = "time_s,pressure_kPa,force_N\n0,0,0\n0.1,,1.5\n0.2,-3,\n";
        let r = ExperimentRecord::from_csv("t", text.as_bytes()).unwrap();
        assert_eq!(r.samples.len(), 3);
        assert_eq!(r.samples[1].pressure_kpa, None);
        assert_eq!(r.samples[1].force_n, Some(1.5));
        assert_eq!(r.samples[2].force_n, None);
        assert!(r.has_force() && !r.has_displacement());
    }

    #[test]
    fn rejects_bad_traces() {
        assert!(matches!(
            ExperimentRecord::from_csv("t", "time_s,pressure_kPa\n0,1\n".as_bytes()),
            Err(AnalysisError::MissingColumn(_))
        ));
        assert!(matches!(
            ExperimentRecord::from_csv("t", "time_s,pressure_kPa,force_N\n0,0,1\n0,0,2\n".as_bytes()),
            Err(AnalysisError::MalformedCsv(_))
        ));
        assert!(matches!(
            ExperimentRecord::from_csv("t", "time_s,pressure_kPa,force_N\n0,0,abc\n".as_bytes()),
            Err(AnalysisError::MalformedCsv(_))
        ));
        assert!(ExperimentRecord::from_csv("t", "time_s,pressure_kPa,force_N\n".as_bytes()).is_err());
    }
}
