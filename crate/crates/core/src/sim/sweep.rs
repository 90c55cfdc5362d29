use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::channel::{ChannelError, CompositeScenario, DeliveryModel, Scenario};
use crate::rng;

use super::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scenario: String,
    pub distance_m: f64,
    pub trial: u32,
    pub rssi_dbm: f64,
    pub delivered: bool,
    /// Delivery probability the Bernoulli trial was drawn against.
    pub delivery_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSummary {
    pub distance_m: f64,
    pub expected_rssi_dbm: f64,
    pub mean_rssi_dbm: f64,
    /// Sample standard deviation (n - 1); zero for a single trial.
    pub std_rssi_db: f64,
    pub delivery_rate: f64,
    pub mean_delivery_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub scenario: String,
    pub trials: u32,
    /// Distance-major, then trial order.
    pub rows: Vec<SweepRow>,
    pub summary: Vec<DistanceSummary>,
}

impl SweepReport {
    pub const CSV_HEADER: &'static str = "scenario,distance_m,trial,rssi_dbm,delivered";

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(48 * (self.rows.len() + 1));
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.scenario,
                r.distance_m,
                r.trial,
                r.rssi_dbm,
                u8::from(r.delivered)
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    pub fn summary_for(&self, distance_m: f64) -> Option<&DistanceSummary> {
        self.summary.iter().find(|s| s.distance_m == distance_m)
    }

    /// Fixed-width per-distance table for terminal output.
    pub fn summary_table(&self) -> String {
        let mut out = format!(
            "{:>10} {:>12} {:>12} {:>9} {:>9}\n",
            "dist_m", "expected", "mean_rssi", "std_db", "deliv"
        );
        for s in &self.summary {
            writeln!(
                out,
                "{:>10.3} {:>12.2} {:>12.2} {:>9.3} {:>9.3}",
                s.distance_m, s.expected_rssi_dbm, s.mean_rssi_dbm, s.std_rssi_db, s.delivery_rate
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// RSSI/delivery sweep with the default delivery model.
pub fn sweep_distance(
    scenario: &Scenario,
    distances: &[f64],
    trials: u32,
    seed: u64,
) -> Result<SweepReport> {
    sweep_distance_with(scenario, distances, trials, seed, DeliveryModel::default())
}

/// One beacon per (distance, trial): a shadowed RSSI draw followed by a
/// delivery trial, both from a stream derived from
/// `(seed, scenario name, distance index, trial)`.
pub fn sweep_distance_with(
    scenario: &Scenario,
    distances: &[f64],
    trials: u32,
    seed: u64,
    delivery: DeliveryModel,
) -> Result<SweepReport> {
    if distances.is_empty() {
        return Err(ChannelError::DegenerateInput("no distances to sweep".into()).into());
    }
    if trials == 0 {
        return Err(ChannelError::DegenerateInput("trials must be >= 1".into()).into());
    }
    scenario.validate()?;
    if let Some(&d) = distances.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(ChannelError::InvalidDistance(d).into());
    }

    let name = scenario.name().to_string();
    let mut rows = Vec::with_capacity(distances.len() * trials as usize);
    let mut summary = Vec::with_capacity(distances.len());
    for (di, &d) in distances.iter().enumerate() {
        let start = rows.len();
        for trial in 0..trials {
            let mut stream = rng::derived(seed, &name, &[di as u64, u64::from(trial)]);
            let rssi = scenario.sample_rssi(d, &mut stream)?;
            let p = delivery.probability(rssi);
            let delivered = rng::bernoulli(&mut stream, p);
            rows.push(SweepRow {
                scenario: name.clone(),
                distance_m: d,
                trial,
                rssi_dbm: rssi,
                delivered,
                delivery_probability: p,
            });
        }
        summary.push(summarize(d, scenario.expected_rssi(d)?, &rows[start..]));
    }
    Ok(SweepReport {
        scenario: name,
        trials,
        rows,
        summary,
    })
}

fn summarize(distance_m: f64, expected: f64, rows: &[SweepRow]) -> DistanceSummary {
    let n = rows.len() as f64;
    // Shifted by the first value so identical samples average exactly.
    let pivot = rows[0].rssi_dbm;
    let mean = pivot + rows.iter().map(|r| r.rssi_dbm - pivot).sum::<f64>() / n;
    let std = if rows.len() > 1 {
        (rows
            .iter()
            .map(|r| (r.rssi_dbm - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0))
            .sqrt()
    } else {
        0.0
    };
    DistanceSummary {
        distance_m,
        expected_rssi_dbm: expected,
        mean_rssi_dbm: mean,
        std_rssi_db: std,
        delivery_rate: rows.iter().filter(|r| r.delivered).count() as f64 / n,
        mean_delivery_probability: rows.iter().map(|r| r.delivery_probability).sum::<f64>() / n,
    }
}

/// `scenario,distance_m,expected_rssi_dbm` for each distance.
pub fn analytical_overlay_csv(scenario: &Scenario, distances: &[f64]) -> Result<String> {
    let mut out = String::from("scenario,distance_m,expected_rssi_dbm\n");
    for &d in distances {
        writeln!(
            out,
            "{},{},{}",
            scenario.name(),
            d,
            scenario.expected_rssi(d)?
        )
        .expect("writing to a String cannot fail");
    }
    Ok(out)
}

/// Trials per distance in the canonical figure sweeps.
pub const FIGURE_TRIALS: u32 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSweep {
    pub scenario: Scenario,
    pub distances: Vec<f64>,
    pub report: SweepReport,
}

fn grid(lo_index: u32, hi_index: u32, divisor: f64) -> Vec<f64> {
    (lo_index..=hi_index)
        .map(|i| f64::from(i) / divisor)
        .collect()
}

/// The four measurement campaigns:
///
/// - indoor, 0.1 to 6 m in 0.1 m steps
/// - outdoor, 1 to 50 m in 1 m steps
/// - combined, 1 to 30 m in 0.5 m steps, with the step at 16 m
/// - ground, 1 to 30 m in 0.5 m steps
pub fn reproduce_figures(seed: u64) -> Result<Vec<FigureSweep>> {
    let plans: [(Scenario, Vec<f64>); 4] = [
        (Scenario::preset("indoor")?, grid(1, 60, 10.0)),
        (Scenario::preset("outdoor")?, grid(1, 50, 1.0)),
        (
            CompositeScenario::combined_default().into(),
            grid(2, 60, 2.0),
        ),
        (Scenario::preset("ground")?, grid(2, 60, 2.0)),
    ];
    plans
        .into_iter()
        .map(|(scenario, distances)| {
            let report = sweep_distance(&scenario, &distances, FIGURE_TRIALS, seed)?;
            Ok(FigureSweep {
                scenario,
                distances,
                report,
            })
        })
        .collect()
}

/// File names and contents for a set of figure sweeps: for each scenario a
/// `<name>_sweep.csv` and a `<name>_analytical.csv`.
pub fn figure_files(figures: &[FigureSweep]) -> Result<Vec<(String, String)>> {
    let mut files = Vec::with_capacity(2 * figures.len());
    for fig in figures {
        let name = fig.scenario.name();
        files.push((format!("{name}_sweep.csv"), fig.report.to_csv()));
        files.push((
            format!("{name}_analytical.csv"),
            analytical_overlay_csv(&fig.scenario, &fig.distances)?,
        ));
    }
    Ok(files)
}

/// Writes [`figure_files`] into `dir`, creating it if needed.
///
/// All contents are generated before anything is written.
pub fn write_figures(dir: &Path, figures: &[FigureSweep]) -> Result<Vec<PathBuf>> {
    let files = figure_files(figures)?;
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = dir.join(name);
        std::fs::write(&path, contents)?;
        written.push(path);
    }
    Ok(written)
}
