use super::{SimTime, TemperatureSource};
use crate::protocol::{Frame, PinSymbol, PIN_LEN};

/// A key on the 4x4 keypad.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyInput {
    Symbol(PinSymbol),
    /// `*`
    Reset,
    /// `#`
    Submit,
}

impl KeyInput {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '*' => Some(KeyInput::Reset),
            '#' => Some(KeyInput::Submit),
            c => PinSymbol::from_char(c).map(KeyInput::Symbol),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            KeyInput::Symbol(s) => s.as_char(),
            KeyInput::Reset => '*',
            KeyInput::Submit => '#',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeripheralEvent {
    Key(KeyInput),
    Received(Frame),
    /// The telemetry timer fired; carries the sensor reading taken at that instant.
    TelemetryTimer {
        temp_centi_c: i16,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Entering,
    AwaitingVerdict,
    Authenticated,
    LockedOut { until: SimTime },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PeripheralOutput {
    pub frames: Vec<Frame>,
    /// Absolute time at which the telemetry timer should next fire.
    pub schedule_telemetry_at: Option<SimTime>,
}

impl PeripheralOutput {
    fn send(frame: Frame) -> Self {
        Self {
            frames: vec![frame],
            schedule_telemetry_at: None,
        }
    }
}

/// Keypad-side node: buffers the typed PIN, forwards every key, and streams
/// telemetry once the central has accepted it.
#[derive(Debug, Clone, PartialEq)]
pub struct PeripheralState {
    pin_buffer: Vec<PinSymbol>,
    phase: Phase,
    pub telemetry_period_ms: u64,
    /// Sampled by the simulator whenever the telemetry timer fires.
    pub sensor: TemperatureSource,
}

impl Default for PeripheralState {
    fn default() -> Self {
        Self::new(1_000)
    }
}

impl PeripheralState {
    pub fn new(telemetry_period_ms: u64) -> Self {
        Self {
            pin_buffer: Vec::with_capacity(PIN_LEN),
            phase: Phase::Entering,
            telemetry_period_ms: telemetry_period_ms.max(1),
            sensor: TemperatureSource::default(),
        }
    }

    pub fn with_sensor(mut self, sensor: TemperatureSource) -> Self {
        self.sensor = sensor;
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn pin_buffer(&self) -> &[PinSymbol] {
        &self.pin_buffer
    }

    pub fn step(&mut self, event: PeripheralEvent, now: SimTime) -> PeripheralOutput {
        if let Phase::LockedOut { until } = self.phase {
            if now >= until {
                self.phase = Phase::Entering;
            }
        }
        match event {
            PeripheralEvent::Key(key) => self.on_key(key),
            PeripheralEvent::Received(frame) => self.on_frame(frame, now),
            PeripheralEvent::TelemetryTimer { temp_centi_c } => {
                if self.phase == Phase::Authenticated {
                    PeripheralOutput {
                        frames: vec![Frame::Telemetry { temp_centi_c }],
                        schedule_telemetry_at: Some(now + self.telemetry_period_ms),
                    }
                } else {
                    // Timer lapses; it is re-armed on the next AuthOk.
                    PeripheralOutput::default()
                }
            }
        }
    }

    fn on_key(&mut self, key: KeyInput) -> PeripheralOutput {
        if self.phase != Phase::Entering {
            return PeripheralOutput::default();
        }
        match key {
            KeyInput::Symbol(s) => {
                if self.pin_buffer.len() >= PIN_LEN {
                    return PeripheralOutput::default();
                }
                self.pin_buffer.push(s);
                PeripheralOutput::send(Frame::KeyPress(s))
            }
            KeyInput::Reset => {
                self.pin_buffer.clear();
                PeripheralOutput::send(Frame::PinReset)
            }
            KeyInput::Submit => {
                self.phase = Phase::AwaitingVerdict;
                PeripheralOutput::send(Frame::PinSubmit)
            }
        }
    }

    fn on_frame(&mut self, frame: Frame, now: SimTime) -> PeripheralOutput {
        match frame {
            Frame::AuthOk => {
                self.pin_buffer.clear();
                let was_authenticated = self.phase == Phase::Authenticated;
                self.phase = Phase::Authenticated;
                PeripheralOutput {
                    frames: Vec::new(),
                    schedule_telemetry_at: (!was_authenticated)
                        .then_some(now + self.telemetry_period_ms),
                }
            }
            Frame::AuthFail { .. } => {
                self.pin_buffer.clear();
                self.phase = Phase::Entering;
                PeripheralOutput::default()
            }
            Frame::Locked { remaining_ms } => {
                self.pin_buffer.clear();
                self.phase = Phase::LockedOut {
                    until: now + u64::from(remaining_ms),
                };
                PeripheralOutput::default()
            }
            _ => PeripheralOutput::default(),
        }
    }
}
