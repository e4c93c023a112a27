//! One-term Ogden hyperelasticity and its fit to uniaxial tensile data.
//!
//! Convention: `W = (2 μ / α²) (λ1^α + λ2^α + λ3^α - 3)`, whose initial shear
//! modulus is `μ` (the `(μ, α, d)` triple used by common FE packages). The
//! other common convention drops the `α²` and gives different `μ` values for
//! the same material.
//!
//! `μ` is taken to be in Pa.

use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("invalid Ogden parameters: {0}")]
    InvalidParams(String),
    #[error("compressible (d1 > 0) uniaxial response is not supported")]
    Unsupported,
    #[error("stretch {0} outside the supported range (> 0.05)")]
    StretchOutOfRange(f64),
    #[error("incompressibility violated: J = {0}")]
    IncompressibilityViolated(f64),
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("specimen geometry must be positive: {0}")]
    NonPositiveGeometry(String),
    #[error("fit did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("need at least 5 samples, got {0}")]
    InsufficientData(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OgdenParams {
    /// Shear modulus, Pa.
    pub mu1: f64,
    pub alpha1: f64,
    /// Compressibility, 1/Pa. Zero means incompressible.
    pub d1: f64,
}

impl OgdenParams {
    /// Constants fitted to the printed elastic resin.
    pub const ELASTIC_RESIN: OgdenParams = OgdenParams { mu1: 708211.0002, alpha1: 2.33765815, d1: 0.0 };

    /// Starting point of the fit when none is given.
    pub const DEFAULT_GUESS: OgdenParams = OgdenParams { mu1: 1e5, alpha1: 2.0, d1: 0.0 };

    pub fn new(mu1: f64, alpha1: f64, d1: f64) -> Result<Self, MaterialError> {
        let p = Self { mu1, alpha1, d1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        if !(self.mu1 > 0.0 && self.mu1.is_finite()) {
            return Err(MaterialError::InvalidParams(format!("mu1 = {} must be > 0", self.mu1)));
        }
        if self.alpha1 == 0.0 || !self.alpha1.is_finite() {
            return Err(MaterialError::InvalidParams("alpha1 must be non-zero".into()));
        }
        if !(self.d1 >= 0.0) {
            return Err(MaterialError::InvalidParams(format!("d1 = {} must be >= 0", self.d1)));
        }
        Ok(())
    }

    /// Small-strain Young's modulus `3 μ`, Pa.
    pub fn initial_modulus(&self) -> f64 {
        3.0 * self.mu1
    }

    /// Nominal stress (Pa) for incompressible uniaxial stretch `lambda`.
    pub fn uniaxial_stress(&self, lambda: f64) -> Result<f64, MaterialError> {
        self.validate()?;
        if self.d1 > 0.0 {
            return Err(MaterialError::Unsupported);
        }
        if !(lambda > 0.05) {
            return Err(MaterialError::StretchOutOfRange(lambda));
        }
        Ok(nominal_stress(self.mu1, self.alpha1, lambda))
    }

    /// Strain energy density (Pa) for principal stretches.
    pub fn energy(&self, stretches: [f64; 3]) -> Result<f64, MaterialError> {
        self.validate()?;
        if stretches.iter().any(|&l| !(l > 0.0)) {
            return Err(MaterialError::InvalidParams("stretches must be positive".into()));
        }
        let j = stretches.iter().product::<f64>();
        let (mu, a) = (self.mu1, self.alpha1);
        if self.d1 == 0.0 {
            if (j - 1.0).abs() >= 1e-9 {
                return Err(MaterialError::IncompressibilityViolated(j));
            }
            Ok(2.0 * mu / (a * a) * (sorted_sum(stretches.map(|l| l.powf(a))) - 3.0))
        } else {
            let jm = j.powf(-1.0 / 3.0);
            let s = sorted_sum(stretches.map(|l| (jm * l).powf(a)));
            Ok(2.0 * mu / (a * a) * (s - 3.0) + (j - 1.0).powi(2) / self.d1)
        }
    }
}

/// Sum in ascending order so that the result does not depend on the order of
/// the stretches.
fn sorted_sum(mut v: [f64; 3]) -> f64 {
    v.sort_by(f64::total_cmp);
    v[0] + v[1] + v[2]
}

pub fn uniaxial_stress(p: &OgdenParams, lambda: f64) -> Result<f64, MaterialError> {
    p.uniaxial_stress(lambda)
}

pub fn ogden_energy(p: &OgdenParams, stretches: [f64; 3]) -> Result<f64, MaterialError> {
    p.energy(stretches)
}

/// `P(λ) = (2μ/α)(λ^(α-1) - λ^(-α/2-1))`.
fn nominal_stress(mu: f64, a: f64, l: f64) -> f64 {
    2.0 * mu / a * (l.powf(a - 1.0) - l.powf(-0.5 * a - 1.0))
}

/// `(∂P/∂μ, ∂P/∂α)`.
fn stress_jacobian(mu: f64, a: f64, l: f64) -> (f64, f64) {
    let (up, down) = (l.powf(a - 1.0), l.powf(-0.5 * a - 1.0));
    let ln = l.ln();
    let d_mu = 2.0 / a * (up - down);
    let d_a = 2.0 * mu * (-(up - down) / (a * a) + (ln * up + 0.5 * ln * down) / a);
    (d_mu, d_a)
}

/// Tensile specimen description. Lengths mm, speed mm/min.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecimenMeta {
    pub width_mm: f64,
    pub thickness_mm: f64,
    pub gauge_length_mm: f64,
    pub speed_mm_per_min: f64,
}

impl SpecimenMeta {
    /// Narrow-section dimensions of a Type IV dog-bone, 2 mm thick.
    pub const TYPE_IV: SpecimenMeta =
        SpecimenMeta { width_mm: 6.0, thickness_mm: 2.0, gauge_length_mm: 25.0, speed_mm_per_min: 50.0 };
}

/// Engineering strain / nominal stress samples.
#[derive(Debug, Clone, PartialEq)]
pub struct StressStrainCurve {
    pub strain: Vec<f64>,
    /// Pa.
    pub stress: Vec<f64>,
    pub meta: SpecimenMeta,
    /// Rows discarded because their strain did not increase.
    pub dropped: usize,
}

impl StressStrainCurve {
    pub fn new(strain: Vec<f64>, stress: Vec<f64>, meta: SpecimenMeta) -> Result<Self, MaterialError> {
        if strain.len() != stress.len() {
            return Err(MaterialError::MalformedCsv("strain and stress lengths differ".into()));
        }
        if strain.first().is_some_and(|&e| e < 0.0)
            || strain.windows(2).any(|w| !(w[1] > w[0]))
            || stress.iter().any(|s| !s.is_finite())
        {
            return Err(MaterialError::MalformedCsv(
                "strain must start >= 0 and increase strictly; stresses finite".into(),
            ));
        }
        Ok(Self { strain, stress, meta, dropped: 0 })
    }

    /// Samples of `p` at the given strains.
    pub fn synthetic(p: &OgdenParams, strain: Vec<f64>, meta: SpecimenMeta) -> Result<Self, MaterialError> {
        let stress = strain.iter().map(|e| p.uniaxial_stress(1.0 + e)).collect::<Result<Vec<_>, _>>()?;
        Self::new(strain, stress, meta)
    }

    pub fn len(&self) -> usize {
        self.strain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strain.is_empty()
    }
}

/// Reads `time_s, force_N, elongation_mm` rows from a UTM export.
pub fn load_utm_csv<R: Read>(input: R, meta: SpecimenMeta) -> Result<StressStrainCurve, MaterialError> {
    for (name, v) in
        [("width", meta.width_mm), ("thickness", meta.thickness_mm), ("gauge length", meta.gauge_length_mm)]
    {
        if !(v > 0.0) {
            return Err(MaterialError::NonPositiveGeometry(format!("{name} = {v}")));
        }
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(input);
    let headers = rdr.headers().map_err(|e| MaterialError::MalformedCsv(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| MaterialError::MalformedCsv(format!("missing column {name}")))
    };
    let (_, fi, ei) = (col("time_s")?, col("force_N")?, col("elongation_mm")?);
    let area_m2 = meta.width_mm * meta.thickness_mm * 1e-6;
    let (mut strain, mut stress) = (Vec::new(), Vec::new());
    let mut dropped = 0;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| MaterialError::MalformedCsv(e.to_string()))?;
        let num = |i: usize| -> Result<f64, MaterialError> {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| MaterialError::MalformedCsv(format!("row {}: bad number", row + 2)))
        };
        let (f, d) = (num(fi)?, num(ei)?);
        let e = d / meta.gauge_length_mm;
        if e < 0.0 || strain.last().is_some_and(|&last| e <= last) {
            dropped += 1;
            continue;
        }
        strain.push(e);
        stress.push(f / area_m2);
    }
    if dropped > 0 {
        log::warn!("dropped {dropped} non-monotone UTM samples");
    }
    let mut c = StressStrainCurve::new(strain, stress, meta)?;
    c.dropped = dropped;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: OgdenParams,
    /// Root-mean-square stress residual, Pa.
    pub rms: f64,
    pub r2: f64,
    pub iterations: usize,
    pub n_points: usize,
}

impl FitResult {
    /// Key/value report as a JSON object.
    pub fn report(&self) -> String {
        format!(
            "{{\n  \"mu1_pa\": {:.6},\n  \"alpha1\": {:.9},\n  \"d1\": {},\n  \"rms_pa\": {:.6},\n  \"r2\": {:.9},\n  \"n_points\": {}\n}}\n",
            self.params.mu1, self.params.alpha1, self.params.d1, self.rms, self.r2, self.n_points
        )
    }
}

const MAX_ITER: usize = 500;
const MULTI_STARTS: usize = 10;
const MULTI_START_SEED: u64 = 0x0D6E_4A11;

/// Least-squares fit of `(μ1, α1)` with `d1 = 0`.
pub fn fit_ogden(curve: &StressStrainCurve, init: &OgdenParams) -> Result<FitResult, MaterialError> {
    fit_ogden_seeded(curve, init, MULTI_START_SEED)
}

/// As [`fit_ogden`], with the seed of the fallback multi-starts.
pub fn fit_ogden_seeded(curve: &StressStrainCurve, init: &OgdenParams, seed: u64) -> Result<FitResult, MaterialError> {
    if curve.len() < 5 {
        return Err(MaterialError::InsufficientData(curve.len()));
    }
    init.validate()?;
    if let Some(r) = levenberg_marquardt(curve, init.mu1, init.alpha1) {
        return Ok(r);
    }
    log::info!("fit from initial guess did not converge; trying {MULTI_STARTS} random starts");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<FitResult> = None;
    for _ in 0..MULTI_STARTS {
        let mu = 10f64.powf(rng.random_range(3.0..8.0));
        let a = rng.random_range(0.5..8.0);
        if let Some(r) = levenberg_marquardt(curve, mu, a) {
            // strict `<` keeps the earliest start on ties
            if best.as_ref().is_none_or(|b| r.rms < b.rms) {
                best = Some(r);
            }
        }
    }
    best.ok_or(MaterialError::NoConvergence { iterations: MAX_ITER })
}

fn sum_sq(curve: &StressStrainCurve, mu: f64, a: f64) -> f64 {
    curve.strain.iter().zip(&curve.stress).map(|(e, s)| (nominal_stress(mu, a, 1.0 + e) - s).powi(2)).sum()
}

fn levenberg_marquardt(curve: &StressStrainCurve, mut mu: f64, mut a: f64) -> Option<FitResult> {
    let mut cost = sum_sq(curve, mu, a);
    let mut lambda = 1e-3;
    for it in 1..=MAX_ITER {
        // normal equations
        let (mut jtj, mut jtr) = ([[0.0; 2]; 2], [0.0; 2]);
        for (e, s) in curve.strain.iter().zip(&curve.stress) {
            let l = 1.0 + e;
            let r = nominal_stress(mu, a, l) - s;
            let (dm, da) = stress_jacobian(mu, a, l);
            jtj[0][0] += dm * dm;
            jtj[0][1] += dm * da;
            jtj[1][1] += da * da;
            jtr[0] += dm * r;
            jtr[1] += da * r;
        }
        jtj[1][0] = jtj[0][1];
        // gradient in relative parameter units
        let gnorm = ((jtr[0] * mu).powi(2) + (jtr[1] * a).powi(2)).sqrt();
        if gnorm <= 1e-8 * (1.0 + cost) {
            return Some(finish(curve, mu, a, it));
        }
        loop {
            let m00 = jtj[0][0] * (1.0 + lambda);
            let m11 = jtj[1][1] * (1.0 + lambda);
            let det = m00 * m11 - jtj[0][1] * jtj[1][0];
            if !det.is_finite() || det == 0.0 {
                return None;
            }
            let dmu = -(m11 * jtr[0] - jtj[0][1] * jtr[1]) / det;
            let da = -(m00 * jtr[1] - jtj[1][0] * jtr[0]) / det;
            let (nmu, na) = (mu + dmu, a + da);
            let trial = if nmu > 0.0 && na.abs() > 1e-6 { sum_sq(curve, nmu, na) } else { f64::INFINITY };
            if trial.is_finite() && trial <= cost {
                let rel = (dmu / mu).abs().max((da / a).abs());
                mu = nmu;
                a = na;
                cost = trial;
                lambda = (lambda * 0.3).max(1e-12);
                if rel < 1e-10 {
                    return Some(finish(curve, mu, a, it));
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                // no descent possible: accept only if already at a minimum
                return (gnorm <= 1e-6 * (1.0 + cost)).then(|| finish(curve, mu, a, it));
            }
        }
    }
    None
}

fn finish(curve: &StressStrainCurve, mu: f64, a: f64, iterations: usize) -> FitResult {
    let n = curve.len() as f64;
    let ss_res = sum_sq(curve, mu, a);
    let mean = curve.stress.iter().sum::<f64>() / n;
    let ss_tot: f64 = curve.stress.iter().map(|s| (s - mean).powi(2)).sum();
    FitResult {
        params: OgdenParams { mu1: mu, alpha1: a, d1: 0.0 },
        rms: (ss_res / n).sqrt(),
        r2: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 },
        iterations,
        n_points: curve.len(),
    }
}
