use subtle::ConstantTimeEq;

use super::display::Display;
use super::SimTime;
use crate::protocol::{Frame, FrameKind, Pin, PinSymbol, PIN_LEN};

/// `true` iff `entered` is exactly the stored PIN.
///
/// Length is checked first (it is not secret); the symbol comparison then
/// always inspects all four positions.
pub fn verify_pin(entered: &[PinSymbol], stored: &Pin) -> bool {
    if entered.len() != PIN_LEN {
        return false;
    }
    let mut buf = [0u8; PIN_LEN];
    for (slot, s) in buf.iter_mut().zip(entered) {
        *slot = s.ascii();
    }
    buf.ct_eq(&stored.as_bytes()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Session {
    Unauthenticated,
    Authenticated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralConfig {
    pub stored_pin: Pin,
    /// Consecutive wrong submissions that trigger a lockout (`MaxCount`).
    pub max_count: u8,
    pub lockout_duration_ms: u32,
}

impl Default for CentralConfig {
    fn default() -> Self {
        Self {
            stored_pin: "12AB".parse().expect("valid default PIN"),
            max_count: 3,
            lockout_duration_ms: 30_000,
        }
    }
}

impl CentralConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_count == 0 {
            return Err("max_count must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CentralOutput {
    pub frames: Vec<Frame>,
    pub display_changed: bool,
    /// A telemetry frame was accepted (displayed and acknowledged).
    pub accepted_telemetry: bool,
}

/// Verifier node: masks incoming keys on the display, checks submissions
/// against the stored PIN, counts consecutive failures and enforces lockout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralState {
    stored_pin: Pin,
    wrong_counter: u8,
    max_count: u8,
    lockout_duration_ms: u32,
    locked_until: Option<SimTime>,
    rx_buffer: Vec<PinSymbol>,
    session: Session,
    display: Display,
}

impl Default for CentralState {
    fn default() -> Self {
        Self::new(CentralConfig::default())
    }
}

impl CentralState {
    pub fn new(config: CentralConfig) -> Self {
        Self {
            stored_pin: config.stored_pin,
            wrong_counter: 0,
            max_count: config.max_count.max(1),
            lockout_duration_ms: config.lockout_duration_ms,
            locked_until: None,
            rx_buffer: Vec::with_capacity(PIN_LEN),
            session: Session::Unauthenticated,
            display: Display::new(),
        }
    }

    pub fn session(&self) -> Session {
        self.session
    }

    pub fn wrong_counter(&self) -> u8 {
        self.wrong_counter
    }

    pub fn max_count(&self) -> u8 {
        self.max_count
    }

    pub fn locked_until(&self) -> Option<SimTime> {
        self.locked_until
    }

    pub fn is_locked(&self, now: SimTime) -> bool {
        self.locked_until.is_some_and(|t| now < t)
    }

    pub fn rx_buffer(&self) -> &[PinSymbol] {
        &self.rx_buffer
    }

    pub fn display(&self) -> &Display {
        &self.display
    }

    pub fn step(&mut self, frame: Frame, now: SimTime) -> CentralOutput {
        if self.locked_until.is_some_and(|t| now >= t) {
            self.locked_until = None;
        }
        match frame {
            Frame::KeyPress(s) => {
                if self.is_locked(now) || self.rx_buffer.len() >= PIN_LEN {
                    return CentralOutput::default();
                }
                self.rx_buffer.push(s);
                self.show_mask();
                CentralOutput {
                    display_changed: true,
                    ..Default::default()
                }
            }
            Frame::PinReset => {
                if self.is_locked(now) {
                    return CentralOutput::default();
                }
                self.rx_buffer.clear();
                self.show_mask();
                CentralOutput {
                    display_changed: true,
                    ..Default::default()
                }
            }
            Frame::PinSubmit => self.on_submit(now),
            Frame::Telemetry { temp_centi_c } => {
                if self.session != Session::Authenticated {
                    return CentralOutput::default();
                }
                self.display.set_row(1, &render_temperature(temp_centi_c));
                CentralOutput {
                    frames: vec![Frame::Ack {
                        of: FrameKind::Telemetry,
                    }],
                    display_changed: true,
                    accepted_telemetry: true,
                }
            }
            // Central-to-peripheral frames have no meaning here.
            Frame::AuthOk | Frame::AuthFail { .. } | Frame::Locked { .. } | Frame::Ack { .. } => {
                CentralOutput::default()
            }
        }
    }

    fn on_submit(&mut self, now: SimTime) -> CentralOutput {
        if let Some(until) = self.locked_until.filter(|&t| now < t) {
            return CentralOutput {
                frames: vec![Frame::Locked {
                    remaining_ms: u32::try_from(until - now).unwrap_or(u32::MAX),
                }],
                ..Default::default()
            };
        }

        let ok = verify_pin(&self.rx_buffer, &self.stored_pin);
        self.rx_buffer.clear();
        if ok {
            self.session = Session::Authenticated;
            self.wrong_counter = 0;
            self.display.clear();
            self.display.set_row(0, "HELLO");
            return CentralOutput {
                frames: vec![Frame::AuthOk],
                display_changed: true,
                accepted_telemetry: false,
            };
        }

        self.session = Session::Unauthenticated;
        self.wrong_counter += 1;
        self.display.set_row(0, "Wrong PIN,");
        let frame = if self.wrong_counter >= self.max_count {
            self.locked_until = Some(now + u64::from(self.lockout_duration_ms));
            self.wrong_counter = 0;
            self.display.set_row(
                1,
                &format!("Locked {}s", self.lockout_duration_ms.div_ceil(1000)),
            );
            Frame::Locked {
                remaining_ms: self.lockout_duration_ms,
            }
        } else {
            self.display.set_row(1, "enter again");
            Frame::AuthFail {
                remaining_attempts: self.max_count - self.wrong_counter,
            }
        };
        CentralOutput {
            frames: vec![frame],
            display_changed: true,
            accepted_telemetry: false,
        }
    }

    fn show_mask(&mut self) {
        let mask = "*".repeat(self.rx_buffer.len());
        self.display.set_row(0, &mask);
        if self.session != Session::Authenticated {
            self.display.set_row(1, "");
        }
    }
}

/// `T=25.34C` style rendering of a centi-degree reading.
pub fn render_temperature(centi_c: i16) -> String {
    let sign = if centi_c < 0 { "-" } else { "" };
    let abs = centi_c.unsigned_abs();
    format!("T={sign}{}.{:02}C", abs / 100, abs % 100)
}
