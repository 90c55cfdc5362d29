//! Log-normal shadowing channel.
//!
//! Mean received power follows the log-distance law
//!
//! ```text
//! RSSI(d) = RSSI(d0) - 10 * alpha * log10(d / d0) + X
//! ```
//!
//! where `X ~ N(0, sigma^2)` in dB models shadowing. This module holds the
//! four measured environment presets, piecewise (composite) environments,
//! noisy sampling, the algebraic inverse used for ranging, a least-squares
//! fit of `alpha` and `RSSI(d0)` from measurements, and the logistic map from
//! RSSI to packet delivery probability.

use std::fmt;
use std::io::BufRead;

use rand_core::RngCore;
use thiserror::Error;

use crate::rng;

/// Names accepted by [`scenario_preset`].
pub const PRESET_NAMES: [&str; 4] = ["indoor", "outdoor", "combined", "ground"];

pub const DEFAULT_RSSI_AT_D0: f64 = -45.0;
pub const DEFAULT_D0: f64 = 1.0;

/// Boundary between the indoor and outdoor legs of the default combined route.
pub const COMBINED_BOUNDARY_M: f64 = 16.0;
/// Step applied past [`COMBINED_BOUNDARY_M`] (wall attenuation removed).
pub const COMBINED_OFFSET_DB: f64 = 6.0;

pub const DEFAULT_SENSITIVITY_DBM: f64 = -90.0;
pub const DEFAULT_LOGISTIC_WIDTH_DB: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("unknown scenario `{0}` (expected one of: indoor, outdoor, combined, ground)")]
    UnknownScenario(String),
    #[error("distance must be strictly positive, got {0}")]
    InvalidDistance(f64),
    #[error("invalid scenario parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("malformed measurement at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("I/O error reading measurements: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

fn check_distance(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(ChannelError::InvalidDistance(d))
    }
}

/// Parameters of one propagation environment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub name: String,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Mean RSSI at the reference distance, dBm.
    pub rssi_at_d0: f64,
    /// Reference distance, meters.
    pub d0: f64,
    /// Shadowing standard deviation, dB.
    pub sigma_db: f64,
}

impl ScenarioParams {
    pub fn new(
        name: impl Into<String>,
        alpha: f64,
        rssi_at_d0: f64,
        d0: f64,
        sigma_db: f64,
    ) -> Result<Self> {
        let params = Self {
            name: name.into(),
            alpha,
            rssi_at_d0,
            d0,
            sigma_db,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(ChannelError::InvalidParams(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !(self.d0 > 0.0 && self.d0.is_finite()) {
            return Err(ChannelError::InvalidParams(format!(
                "d0 must be > 0, got {}",
                self.d0
            )));
        }
        if !(self.sigma_db >= 0.0 && self.sigma_db.is_finite()) {
            return Err(ChannelError::InvalidParams(format!(
                "sigma_db must be >= 0, got {}",
                self.sigma_db
            )));
        }
        if !self.rssi_at_d0.is_finite() {
            return Err(ChannelError::InvalidParams(
                "rssi_at_d0 must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn with_sigma(mut self, sigma_db: f64) -> Self {
        self.sigma_db = sigma_db;
        self
    }

    pub fn with_rssi_at_d0(mut self, rssi_at_d0: f64) -> Self {
        self.rssi_at_d0 = rssi_at_d0;
        self
    }

    pub fn expected_rssi(&self, d: f64) -> Result<f64> {
        expected_rssi(self, d)
    }
}

/// Returns one of the four measured environments.
///
/// | name     | alpha | sigma (dB) |
/// |----------|-------|------------|
/// | indoor   | 3.1   | 2.5        |
/// | outdoor  | 2.55  | 1.5        |
/// | combined | 2.85  | 2.0        |
/// | ground   | 2.75  | 2.0        |
///
/// All presets use `RSSI(d0) = -45 dBm` at `d0 = 1 m`. The sigma values and
/// the intercept are calibration defaults, not measured quantities.
pub fn scenario_preset(name: &str) -> Result<ScenarioParams> {
    let (alpha, sigma_db) = match name {
        "indoor" => (3.1, 2.5),
        "outdoor" => (2.55, 1.5),
        "combined" => (2.85, 2.0),
        "ground" => (2.75, 2.0),
        other => return Err(ChannelError::UnknownScenario(other.to_string())),
    };
    Ok(ScenarioParams {
        name: name.to_string(),
        alpha,
        rssi_at_d0: DEFAULT_RSSI_AT_D0,
        d0: DEFAULT_D0,
        sigma_db,
    })
}

/// Mean RSSI at distance `d` (no shadowing term).
pub fn expected_rssi(params: &ScenarioParams, d: f64) -> Result<f64> {
    check_distance(d)?;
    Ok(params.rssi_at_d0 - 10.0 * params.alpha * (d / params.d0).log10())
}

/// Mean RSSI plus one Gaussian shadowing draw from `rng`.
pub fn sample_rssi<R: RngCore + ?Sized>(
    params: &ScenarioParams,
    d: f64,
    rng: &mut R,
) -> Result<f64> {
    let mean = expected_rssi(params, d)?;
    Ok(mean + rng::gaussian(rng, params.sigma_db))
}

/// Inverts the noiseless model: the distance at which the mean RSSI equals `rssi`.
pub fn estimate_distance(params: &ScenarioParams, rssi: f64) -> f64 {
    params.d0 * 10f64.powf((params.rssi_at_d0 - rssi) / (10.0 * params.alpha))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// Distance at which this segment starts to apply, meters.
    pub start_m: f64,
    pub params: ScenarioParams,
    pub offset_db: f64,
}

/// Piecewise environment: distance ranges `[start_i, start_{i+1})` each use
/// their own parameters plus a constant dB offset.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeScenario {
    name: String,
    segments: Vec<Segment>,
}

impl CompositeScenario {
    pub fn new(name: impl Into<String>, segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| ChannelError::InvalidParams("composite has no segments".into()))?;
        if first.start_m != 0.0 {
            return Err(ChannelError::InvalidParams(format!(
                "first segment must start at 0 m, got {}",
                first.start_m
            )));
        }
        for pair in segments.windows(2) {
            if !pair[1].start_m.is_finite() || pair[1].start_m <= pair[0].start_m {
                return Err(ChannelError::InvalidParams(format!(
                    "segment starts must be strictly increasing ({} then {})",
                    pair[0].start_m, pair[1].start_m
                )));
            }
        }
        for seg in &segments {
            seg.params.validate()?;
            if !seg.offset_db.is_finite() {
                return Err(ChannelError::InvalidParams(
                    "offset_db must be finite".into(),
                ));
            }
        }
        Ok(Self {
            name: name.into(),
            segments,
        })
    }

    /// Two-segment route built from one set of parameters: the second
    /// segment starts at `boundary_m` and is shifted by `offset_db`.
    pub fn with_boundary(params: ScenarioParams, boundary_m: f64, offset_db: f64) -> Result<Self> {
        check_distance(boundary_m)?;
        let name = params.name.clone();
        Self::new(
            name,
            vec![
                Segment {
                    start_m: 0.0,
                    params: params.clone(),
                    offset_db: 0.0,
                },
                Segment {
                    start_m: boundary_m,
                    params,
                    offset_db,
                },
            ],
        )
    }

    /// The indoor-to-outdoor route: the `combined` preset with a +6 dB step at 16 m.
    pub fn combined_default() -> Self {
        let params = scenario_preset("combined").expect("preset exists");
        Self::with_boundary(params, COMBINED_BOUNDARY_M, COMBINED_OFFSET_DB)
            .expect("default composite is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// The segment whose range contains `d`.
    pub fn segment_for(&self, d: f64) -> Result<&Segment> {
        check_distance(d)?;
        let idx = self.segments.partition_point(|s| s.start_m <= d);
        // partition_point >= 1 because the first start is 0 and d > 0.
        Ok(&self.segments[idx - 1])
    }
}

pub fn expected_rssi_composite(cs: &CompositeScenario, d: f64) -> Result<f64> {
    let seg = cs.segment_for(d)?;
    Ok(expected_rssi(&seg.params, d)? + seg.offset_db)
}

/// Either a single environment or a piecewise route.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Simple(ScenarioParams),
    Composite(CompositeScenario),
}

impl Scenario {
    pub fn preset(name: &str) -> Result<Self> {
        scenario_preset(name).map(Scenario::Simple)
    }

    pub fn name(&self) -> &str {
        match self {
            Scenario::Simple(p) => &p.name,
            Scenario::Composite(c) => c.name(),
        }
    }

    pub fn expected_rssi(&self, d: f64) -> Result<f64> {
        match self {
            Scenario::Simple(p) => expected_rssi(p, d),
            Scenario::Composite(c) => expected_rssi_composite(c, d),
        }
    }

    pub fn sample_rssi<R: RngCore + ?Sized>(&self, d: f64, rng: &mut R) -> Result<f64> {
        match self {
            Scenario::Simple(p) => sample_rssi(p, d, rng),
            Scenario::Composite(c) => {
                let seg = c.segment_for(d)?;
                Ok(sample_rssi(&seg.params, d, rng)? + seg.offset_db)
            }
        }
    }

    /// Replaces the shadowing deviation of every segment.
    pub fn with_sigma(self, sigma_db: f64) -> Self {
        match self {
            Scenario::Simple(p) => Scenario::Simple(p.with_sigma(sigma_db)),
            Scenario::Composite(mut c) => {
                for seg in &mut c.segments {
                    seg.params.sigma_db = sigma_db;
                }
                Scenario::Composite(c)
            }
        }
    }

    pub fn with_rssi_at_d0(self, rssi_at_d0: f64) -> Self {
        match self {
            Scenario::Simple(p) => Scenario::Simple(p.with_rssi_at_d0(rssi_at_d0)),
            Scenario::Composite(mut c) => {
                for seg in &mut c.segments {
                    seg.params.rssi_at_d0 = rssi_at_d0;
                }
                Scenario::Composite(c)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Scenario::Simple(p) => p.validate(),
            Scenario::Composite(c) => c.segments.iter().try_for_each(|s| s.params.validate()),
        }
    }
}

impl From<ScenarioParams> for Scenario {
    fn from(p: ScenarioParams) -> Self {
        Scenario::Simple(p)
    }
}

impl From<CompositeScenario> for Scenario {
    fn from(c: CompositeScenario) -> Self {
        Scenario::Composite(c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RssiSample {
    pub distance_m: f64,
    pub rssi_dbm: f64,
    pub scenario: String,
    pub trial: u32,
}

impl RssiSample {
    pub fn new(distance_m: f64, rssi_dbm: f64) -> Self {
        Self {
            distance_m,
            rssi_dbm,
            scenario: String::new(),
            trial: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossFit {
    pub alpha_hat: f64,
    pub rssi0_hat: f64,
    pub rmse_db: f64,
    pub n: usize,
}

impl fmt::Display for PathLossFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha_hat={:.6} rssi0_hat={:.4} rmse_db={:.4} n={}",
            self.alpha_hat, self.rssi0_hat, self.rmse_db, self.n
        )
    }
}

/// Joint least-squares estimate of `alpha` and `RSSI(d0)`.
///
/// Regresses `rssi` on `x = -10 log10(d / d0)`, so the slope is `alpha` and
/// the intercept is `RSSI(d0)`.
pub fn fit_path_loss(samples: &[RssiSample], d0: f64) -> Result<PathLossFit> {
    if !(d0 > 0.0 && d0.is_finite()) {
        return Err(ChannelError::InvalidParams(format!(
            "d0 must be > 0, got {d0}"
        )));
    }
    if samples.len() < 2 {
        return Err(ChannelError::DegenerateInput(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    for s in samples {
        check_distance(s.distance_m)?;
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples
        .iter()
        .map(|s| -10.0 * (s.distance_m / d0).log10())
        .collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = samples.iter().map(|s| s.rssi_dbm).sum::<f64>() / n;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, s) in xs.iter().zip(samples) {
        let dx = x - x_mean;
        sxx += dx * dx;
        sxy += dx * (s.rssi_dbm - y_mean);
    }
    let first = samples[0].distance_m;
    if samples.iter().all(|s| s.distance_m == first) || sxx == 0.0 {
        return Err(ChannelError::DegenerateInput(
            "all samples share one distance".into(),
        ));
    }

    let alpha_hat = sxy / sxx;
    let rssi0_hat = y_mean - alpha_hat * x_mean;
    let ssr: f64 = xs
        .iter()
        .zip(samples)
        .map(|(x, s)| (s.rssi_dbm - (rssi0_hat + alpha_hat * x)).powi(2))
        .sum();
    Ok(PathLossFit {
        alpha_hat,
        rssi0_hat,
        rmse_db: (ssr / n).sqrt(),
        n: samples.len(),
    })
}

/// Reads a CSV whose header names `distance_m` and `rssi_dbm` columns.
///
/// Other columns are ignored, so sweep output can be fitted directly.
/// Blank lines are skipped.
pub fn read_measurements<R: BufRead>(reader: R) -> Result<Vec<RssiSample>> {
    let mut lines = reader.lines().enumerate();
    let header = loop {
        match lines.next() {
            None => return Err(ChannelError::DegenerateInput("empty input".into())),
            Some((i, line)) => {
                let line = line.map_err(|e| ChannelError::Io(e.to_string()))?;
                if !line.trim().is_empty() {
                    break (i + 1, line);
                }
            }
        }
    };
    let cols: Vec<&str> = header.1.trim().split(',').map(str::trim).collect();
    let position = |name: &str| cols.iter().position(|c| *c == name);
    let (d_col, r_col) = match (position("distance_m"), position("rssi_dbm")) {
        (Some(d), Some(r)) => (d, r),
        _ => {
            return Err(ChannelError::Malformed {
                line: header.0,
                reason: "header must name `distance_m` and `rssi_dbm` columns".into(),
            })
        }
    };

    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line.map_err(|e| ChannelError::Io(e.to_string()))?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let parse = |f: Option<&&str>, what: &str| -> Result<f64> {
            let raw = f.ok_or_else(|| ChannelError::Malformed {
                line: lineno,
                reason: format!("missing {what}"),
            })?;
            let v: f64 = raw.parse().map_err(|_| ChannelError::Malformed {
                line: lineno,
                reason: format!("{what} `{raw}` is not a number"),
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(ChannelError::Malformed {
                    line: lineno,
                    reason: format!("{what} is not finite"),
                })
            }
        };
        let distance_m = parse(fields.get(d_col), "distance_m")?;
        let rssi_dbm = parse(fields.get(r_col), "rssi_dbm")?;
        if distance_m <= 0.0 {
            return Err(ChannelError::Malformed {
                line: lineno,
                reason: format!("distance_m must be > 0, got {distance_m}"),
            });
        }
        out.push(RssiSample::new(distance_m, rssi_dbm));
    }
    if out.is_empty() {
        return Err(ChannelError::DegenerateInput("no measurement rows".into()));
    }
    Ok(out)
}

/// Logistic packet-success model around a receiver sensitivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeliveryModel {
    /// RSSI at which delivery probability is one half, dBm.
    pub sensitivity_dbm: f64,
    /// Logistic width, dB.
    pub width_db: f64,
}

impl Default for DeliveryModel {
    fn default() -> Self {
        Self {
            sensitivity_dbm: DEFAULT_SENSITIVITY_DBM,
            width_db: DEFAULT_LOGISTIC_WIDTH_DB,
        }
    }
}

impl DeliveryModel {
    /// `1 / (1 + exp((sensitivity - rssi) / width))`
    pub fn probability(&self, rssi: f64) -> f64 {
        let z = (self.sensitivity_dbm - rssi) / self.width_db;
        let p = 1.0 / (1.0 + z.exp());
        if p.is_nan() {
            // Only reachable for non-finite rssi.
            if rssi > self.sensitivity_dbm {
                1.0
            } else {
                0.0
            }
        } else {
            p.clamp(0.0, 1.0)
        }
    }
}
