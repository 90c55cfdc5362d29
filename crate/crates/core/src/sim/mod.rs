//! Discrete-event simulation of the radio link between the two nodes.

mod session;
mod sweep;

pub use session::{
    run_session, Direction, LatencyRecord, Milestone, Outcome, ScriptStep, SessionEngine,
    SessionTrace, TraceEvent,
};
pub use sweep::{
    analytical_overlay_csv, figure_files, reproduce_figures, sweep_distance, sweep_distance_with,
    write_figures, DistanceSummary, FigureSweep, SweepReport, SweepRow, FIGURE_TRIALS,
};

use thiserror::Error;

use crate::channel::{
    ChannelError, DeliveryModel, Scenario, DEFAULT_LOGISTIC_WIDTH_DB, DEFAULT_SENSITIVITY_DBM,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("script step at {at_ms} ms lies beyond the horizon of {horizon_ms} ms")]
    ScriptBeyondHorizon { at_ms: u64, horizon_ms: u64 },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;

/// Radio link between the peripheral and the central.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub distance_m: f64,
    pub scenario: Scenario,
    pub seed: u64,
    /// Spacing between retransmissions of an undelivered frame.
    pub conn_interval_ms: u64,
    pub per_frame_airtime_ms: u64,
    /// Time the receiving node takes to act on a delivered frame.
    pub processing_delay_ms: u64,
    pub sensitivity_dbm: f64,
    pub logistic_width_db: f64,
    /// Retransmissions after the first attempt before a frame is dropped.
    pub max_retries: u32,
}

impl LinkConfig {
    pub fn new(scenario: impl Into<Scenario>, distance_m: f64, seed: u64) -> Self {
        Self {
            distance_m,
            scenario: scenario.into(),
            seed,
            conn_interval_ms: 30,
            per_frame_airtime_ms: 1,
            processing_delay_ms: 0,
            sensitivity_dbm: DEFAULT_SENSITIVITY_DBM,
            logistic_width_db: DEFAULT_LOGISTIC_WIDTH_DB,
            max_retries: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance_m > 0.0 && self.distance_m.is_finite()) {
            return Err(ChannelError::InvalidDistance(self.distance_m).into());
        }
        if self.conn_interval_ms == 0 {
            return Err(SimError::InvalidConfig(
                "conn_interval_ms must be > 0".into(),
            ));
        }
        if !(self.logistic_width_db > 0.0 && self.logistic_width_db.is_finite()) {
            return Err(SimError::InvalidConfig(
                "logistic_width_db must be > 0".into(),
            ));
        }
        if !self.sensitivity_dbm.is_finite() {
            return Err(SimError::InvalidConfig(
                "sensitivity_dbm must be finite".into(),
            ));
        }
        self.scenario.validate()?;
        Ok(())
    }

    pub fn delivery_model(&self) -> DeliveryModel {
        DeliveryModel {
            sensitivity_dbm: self.sensitivity_dbm,
            width_db: self.logistic_width_db,
        }
    }
}

/// Probability that a frame received at `rssi` is decoded on this link.
pub fn delivery_probability(rssi: f64, link: &LinkConfig) -> f64 {
    link.delivery_model().probability(rssi)
}
