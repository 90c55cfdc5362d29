use rand_core::RngCore;

use super::SimTime;
use crate::rng;

/// Synthetic ambient temperature: a sinusoid around a base value plus
/// Gaussian sensor noise.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureSource {
    pub base_c: f64,
    pub amplitude_c: f64,
    pub period_ms: u64,
    pub noise_sd_c: f64,
    /// Seed for the sensor's own noise stream.
    pub seed: u64,
}

impl Default for TemperatureSource {
    fn default() -> Self {
        Self {
            base_c: 25.0,
            amplitude_c: 0.5,
            period_ms: 600_000,
            noise_sd_c: 0.05,
            seed: 0,
        }
    }
}

impl TemperatureSource {
    pub fn constant(base_c: f64) -> Self {
        Self {
            base_c,
            amplitude_c: 0.0,
            noise_sd_c: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.amplitude_c >= 0.0 && self.amplitude_c.is_finite()) {
            return Err(format!(
                "amplitude_c must be >= 0, got {}",
                self.amplitude_c
            ));
        }
        if !(self.noise_sd_c >= 0.0 && self.noise_sd_c.is_finite()) {
            return Err(format!("noise_sd_c must be >= 0, got {}", self.noise_sd_c));
        }
        if self.period_ms == 0 {
            return Err("period_ms must be > 0".into());
        }
        if !self.base_c.is_finite() {
            return Err("base_c must be finite".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemperatureReading {
    pub centi_c: i16,
    /// The raw value fell outside the i16 range and was saturated.
    pub clamped: bool,
}

/// `round(100 * (base + amplitude * sin(2 pi now / period) + noise))`,
/// saturated to the i16 range.
pub fn sample_temperature<R: RngCore + ?Sized>(
    src: &TemperatureSource,
    now: SimTime,
    rng: &mut R,
) -> TemperatureReading {
    let phase = std::f64::consts::TAU * (now % src.period_ms) as f64 / src.period_ms as f64;
    let celsius = src.base_c + src.amplitude_c * phase.sin() + rng::gaussian(rng, src.noise_sd_c);
    let centi = (100.0 * celsius).round();
    let lo = f64::from(i16::MIN);
    let hi = f64::from(i16::MAX);
    if centi < lo || centi > hi || centi.is_nan() {
        TemperatureReading {
            centi_c: if centi < lo { i16::MIN } else { i16::MAX },
            clamped: true,
        }
    } else {
        TemperatureReading {
            centi_c: centi as i16,
            clamped: false,
        }
    }
}
