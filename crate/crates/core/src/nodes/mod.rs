//! Peripheral and central protocol state machines.
//!
//! Both machines are step functions over owned state: the simulator feeds
//! them one event at a time with the current simulated time and routes the
//! frames they return. Neither machine reads a clock or owns a random stream.

mod central;
mod display;
mod peripheral;
mod sensor;

pub use central::{
    render_temperature, verify_pin, CentralConfig, CentralOutput, CentralState, Session,
};
pub use display::{Display, DISPLAY_COLS, DISPLAY_ROWS};
pub use peripheral::{KeyInput, PeripheralEvent, PeripheralOutput, PeripheralState, Phase};
pub use sensor::{sample_temperature, TemperatureReading, TemperatureSource};

/// Simulated time in milliseconds since session start.
pub type SimTime = u64;
