//! Simulation library for a PIN-authenticated BLE peripheral/central pair.
//!
//! - [`channel`]: log-normal shadowing model, presets, fitting, delivery curve
//! - [`protocol`]: frame vocabulary and its byte codec
//! - [`nodes`]: peripheral and central state machines
//! - [`sim`]: discrete-event sessions and distance sweeps
//! - [`rng`]: seeded random streams shared by all of the above

pub mod channel;
pub mod nodes;
pub mod protocol;
pub mod rng;
pub mod sim;
