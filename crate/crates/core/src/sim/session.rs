use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::io::Write;

use crate::nodes::{
    sample_temperature, CentralState, Display, KeyInput, PeripheralEvent, PeripheralState, Session,
    SimTime,
};
use crate::protocol::Frame;
use crate::rng::{self, SimRng};

use super::{LinkConfig, Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Peripheral to central.
    ToCentral,
    /// Central to peripheral.
    ToPeripheral,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::ToCentral => "p2c",
            Direction::ToPeripheral => "c2p",
        }
    }

    fn lane(self) -> usize {
        match self {
            Direction::ToCentral => 0,
            Direction::ToPeripheral => 1,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One transmission attempt on the air.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub time_ms: SimTime,
    pub direction: Direction,
    pub frame: Frame,
    pub rssi_dbm: f64,
    pub delivered: bool,
    /// 0 for the first transmission, then 1.. for retries.
    pub attempt: u32,
}

/// Protocol-level happenings that are not transmissions.
#[derive(Debug, Clone, PartialEq)]
pub enum Milestone {
    KeyPressed(KeyInput),
    /// A delivered frame was handed to the receiving node.
    Received {
        direction: Direction,
        frame: Frame,
    },
    /// A frame exhausted its retries.
    Dropped {
        direction: Direction,
        frame: Frame,
    },
    AuthOkSent,
    TelemetryAccepted {
        temp_centi_c: i16,
    },
    LockoutStarted {
        until: SimTime,
    },
    TemperatureClamped,
}

/// Time from a key press until the central's display reflected it.
///
/// `displayed_at - pressed_at == queue_ms + retry_ms + airtime_ms + processing_ms`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatencyRecord {
    pub key: KeyInput,
    pub pressed_at: SimTime,
    pub displayed_at: SimTime,
    /// Waiting behind earlier frames before the first attempt.
    pub queue_ms: u64,
    /// From the first attempt to the successful one.
    pub retry_ms: u64,
    pub airtime_ms: u64,
    pub processing_ms: u64,
}

impl LatencyRecord {
    pub fn total_ms(&self) -> u64 {
        self.displayed_at - self.pressed_at
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Authenticated,
    LockedOut,
    LinkLost,
    TimedOut,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Outcome::Authenticated => "Authenticated",
            Outcome::LockedOut => "LockedOut",
            Outcome::LinkLost => "LinkLost",
            Outcome::TimedOut => "TimedOut",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionTrace {
    pub events: Vec<TraceEvent>,
    pub milestones: Vec<(SimTime, Milestone)>,
    pub outcome: Outcome,
    pub latencies: Vec<LatencyRecord>,
    pub dropped_frames: usize,
    pub horizon_ms: SimTime,
    pub final_display: Display,
}

impl SessionTrace {
    pub const CSV_HEADER: &'static str = "time_ms,dir,frame,rssi_dbm,delivered";

    /// Line-delimited export: `time_ms,dir,frame,rssi_dbm,delivered`, frame as hex.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for e in &self.events {
            writeln!(
                w,
                "{},{},{},{:.3},{}",
                e.time_ms,
                e.direction,
                e.frame.to_hex(),
                e.rssi_dbm,
                u8::from(e.delivered)
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ASCII output")
    }

    /// Time the central first sent `AuthOk`, if ever.
    pub fn auth_ok_at(&self) -> Option<SimTime> {
        self.milestones
            .iter()
            .find(|(_, m)| *m == Milestone::AuthOkSent)
            .map(|(t, _)| *t)
    }

    pub fn accepted_telemetry(&self) -> impl Iterator<Item = SimTime> + '_ {
        self.milestones.iter().filter_map(|(t, m)| match m {
            Milestone::TelemetryAccepted { .. } => Some(*t),
            _ => None,
        })
    }
}

/// A timed keypad press in a session script.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScriptStep {
    pub at_ms: SimTime,
    pub key: KeyInput,
}

impl ScriptStep {
    pub fn new(at_ms: SimTime, key: KeyInput) -> Self {
        Self { at_ms, key }
    }
}

#[derive(Debug, Clone)]
struct Outbound {
    frame: Frame,
    origin: Option<(KeyInput, SimTime)>,
    first_attempt_at: Option<SimTime>,
    delivered_attempt_at: Option<SimTime>,
    attempt: u32,
}

#[derive(Debug)]
enum Pending {
    Key(KeyInput),
    Attempt(Direction),
    Arrive(Direction),
    Process(Direction, Outbound),
    TelemetryTimer,
}

#[derive(Debug, Default)]
struct Lane {
    queue: VecDeque<Outbound>,
    busy: bool,
}

/// Event-driven engine for one peripheral/central pair.
///
/// Each direction is an in-order lane: a frame is attempted, and on loss
/// retried every `conn_interval_ms`, until delivered or out of retries; only
/// then does the next queued frame go on air. Every attempt draws a fresh
/// shadowed RSSI and a Bernoulli delivery trial from the link's stream.
#[derive(Debug)]
pub struct SessionEngine {
    link: LinkConfig,
    peripheral: PeripheralState,
    central: CentralState,
    channel_rng: SimRng,
    sensor_rng: SimRng,
    queue: BTreeMap<(SimTime, u64), Pending>,
    seq: u64,
    now: SimTime,
    lanes: [Lane; 2],
    timer_armed: bool,
    events: Vec<TraceEvent>,
    milestones: Vec<(SimTime, Milestone)>,
    latencies: Vec<LatencyRecord>,
    dropped: usize,
}

impl SessionEngine {
    pub fn new(
        link: LinkConfig,
        peripheral: PeripheralState,
        central: CentralState,
    ) -> Result<Self> {
        link.validate()?;
        peripheral
            .sensor
            .validate()
            .map_err(SimError::InvalidConfig)?;
        let channel_rng = rng::derived(link.seed, "channel", &[]);
        let sensor_rng = rng::derived(link.seed, "sensor", &[peripheral.sensor.seed]);
        Ok(Self {
            link,
            peripheral,
            central,
            channel_rng,
            sensor_rng,
            queue: BTreeMap::new(),
            seq: 0,
            now: 0,
            lanes: Default::default(),
            timer_armed: false,
            events: Vec::new(),
            milestones: Vec::new(),
            latencies: Vec::new(),
            dropped: 0,
        })
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn link(&self) -> &LinkConfig {
        &self.link
    }

    pub fn central(&self) -> &CentralState {
        &self.central
    }

    pub fn peripheral(&self) -> &PeripheralState {
        &self.peripheral
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn milestones(&self) -> &[(SimTime, Milestone)] {
        &self.milestones
    }

    pub fn latencies(&self) -> &[LatencyRecord] {
        &self.latencies
    }

    /// Schedules a key press. Times in the past are clamped to now.
    pub fn press(&mut self, at_ms: SimTime, key: KeyInput) {
        let at = at_ms.max(self.now);
        self.schedule(at, Pending::Key(key));
    }

    /// Processes every event scheduled at or before `t`.
    pub fn run_until(&mut self, t: SimTime) {
        while let Some(entry) = self.queue.first_entry() {
            let (time, _) = *entry.key();
            if time > t {
                break;
            }
            let pending = entry.remove();
            self.now = time;
            self.handle(pending);
        }
        self.now = self.now.max(t);
    }

    pub fn outcome_at(&self, t: SimTime) -> Outcome {
        if self.central.session() == Session::Authenticated {
            Outcome::Authenticated
        } else if self.central.is_locked(t) {
            Outcome::LockedOut
        } else if self.dropped > 0 {
            Outcome::LinkLost
        } else {
            Outcome::TimedOut
        }
    }

    pub fn finish(mut self, horizon_ms: SimTime) -> SessionTrace {
        self.run_until(horizon_ms);
        SessionTrace {
            outcome: self.outcome_at(horizon_ms),
            events: self.events,
            milestones: self.milestones,
            latencies: self.latencies,
            dropped_frames: self.dropped,
            horizon_ms,
            final_display: self.central.display().clone(),
        }
    }

    fn schedule(&mut self, at: SimTime, pending: Pending) {
        self.queue.insert((at, self.seq), pending);
        self.seq += 1;
    }

    fn enqueue(&mut self, direction: Direction, frame: Frame, origin: Option<(KeyInput, SimTime)>) {
        let lane = &mut self.lanes[direction.lane()];
        lane.queue.push_back(Outbound {
            frame,
            origin,
            first_attempt_at: None,
            delivered_attempt_at: None,
            attempt: 0,
        });
        if !lane.busy {
            lane.busy = true;
            let now = self.now;
            self.schedule(now, Pending::Attempt(direction));
        }
    }

    fn handle(&mut self, pending: Pending) {
        let now = self.now;
        match pending {
            Pending::Key(key) => {
                self.milestones.push((now, Milestone::KeyPressed(key)));
                let out = self.peripheral.step(PeripheralEvent::Key(key), now);
                for frame in out.frames {
                    self.enqueue(Direction::ToCentral, frame, Some((key, now)));
                }
                self.arm_timer(out.schedule_telemetry_at);
            }
            Pending::TelemetryTimer => {
                self.timer_armed = false;
                let reading =
                    sample_temperature(&self.peripheral.sensor, now, &mut self.sensor_rng);
                if reading.clamped {
                    self.milestones.push((now, Milestone::TemperatureClamped));
                }
                let out = self.peripheral.step(
                    PeripheralEvent::TelemetryTimer {
                        temp_centi_c: reading.centi_c,
                    },
                    now,
                );
                for frame in out.frames {
                    self.enqueue(Direction::ToCentral, frame, None);
                }
                self.arm_timer(out.schedule_telemetry_at);
            }
            Pending::Attempt(direction) => self.attempt(direction),
            Pending::Arrive(direction) => {
                let lane = &mut self.lanes[direction.lane()];
                let ob = lane.queue.pop_front().expect("arrival for a queued frame");
                let more = !lane.queue.is_empty();
                if !more {
                    lane.busy = false;
                }
                let at = now + self.link.processing_delay_ms;
                self.schedule(at, Pending::Process(direction, ob));
                if more {
                    self.schedule(now, Pending::Attempt(direction));
                }
            }
            Pending::Process(direction, ob) => self.deliver(direction, ob),
        }
    }

    fn arm_timer(&mut self, at: Option<SimTime>) {
        if let Some(at) = at {
            if !self.timer_armed {
                self.timer_armed = true;
                self.schedule(at, Pending::TelemetryTimer);
            }
        }
    }

    fn attempt(&mut self, direction: Direction) {
        let now = self.now;
        let rssi = self
            .link
            .scenario
            .sample_rssi(self.link.distance_m, &mut self.channel_rng)
            .expect("distance validated at construction");
        let p = self.link.delivery_model().probability(rssi);
        let delivered = rng::bernoulli(&mut self.channel_rng, p);

        let lane = &mut self.lanes[direction.lane()];
        let ob = lane.queue.front_mut().expect("attempt for a queued frame");
        ob.first_attempt_at.get_or_insert(now);
        self.events.push(TraceEvent {
            time_ms: now,
            direction,
            frame: ob.frame,
            rssi_dbm: rssi,
            delivered,
            attempt: ob.attempt,
        });

        if delivered {
            ob.delivered_attempt_at = Some(now);
            let at = now + self.link.per_frame_airtime_ms;
            self.schedule(at, Pending::Arrive(direction));
        } else if ob.attempt < self.link.max_retries {
            ob.attempt += 1;
            let at = now + self.link.conn_interval_ms;
            self.schedule(at, Pending::Attempt(direction));
        } else {
            let ob = lane.queue.pop_front().expect("front exists");
            let more = !lane.queue.is_empty();
            if !more {
                lane.busy = false;
            }
            self.dropped += 1;
            self.milestones.push((
                now,
                Milestone::Dropped {
                    direction,
                    frame: ob.frame,
                },
            ));
            if more {
                let at = now + self.link.per_frame_airtime_ms;
                self.schedule(at, Pending::Attempt(direction));
            }
        }
    }

    fn deliver(&mut self, direction: Direction, ob: Outbound) {
        let now = self.now;
        self.milestones.push((
            now,
            Milestone::Received {
                direction,
                frame: ob.frame,
            },
        ));
        match direction {
            Direction::ToCentral => {
                let was_locked_until = self.central.locked_until();
                let out = self.central.step(ob.frame, now);
                if out.accepted_telemetry {
                    if let Frame::Telemetry { temp_centi_c } = ob.frame {
                        self.milestones
                            .push((now, Milestone::TelemetryAccepted { temp_centi_c }));
                    }
                }
                if let Some(until) = self.central.locked_until() {
                    if was_locked_until != Some(until) {
                        self.milestones
                            .push((now, Milestone::LockoutStarted { until }));
                    }
                }
                if out.display_changed {
                    if let Some((key, pressed_at)) = ob.origin {
                        let first = ob
                            .first_attempt_at
                            .expect("delivered frames were attempted");
                        let last = ob.delivered_attempt_at.expect("delivered");
                        self.latencies.push(LatencyRecord {
                            key,
                            pressed_at,
                            displayed_at: now,
                            queue_ms: first - pressed_at,
                            retry_ms: last - first,
                            airtime_ms: self.link.per_frame_airtime_ms,
                            processing_ms: self.link.processing_delay_ms,
                        });
                    }
                }
                for frame in out.frames {
                    if frame == Frame::AuthOk {
                        self.milestones.push((now, Milestone::AuthOkSent));
                    }
                    self.enqueue(Direction::ToPeripheral, frame, None);
                }
            }
            Direction::ToPeripheral => {
                let out = self
                    .peripheral
                    .step(PeripheralEvent::Received(ob.frame), now);
                for frame in out.frames {
                    self.enqueue(Direction::ToCentral, frame, None);
                }
                self.arm_timer(out.schedule_telemetry_at);
            }
        }
    }
}

/// Runs a scripted session to `horizon_ms` and returns its trace.
pub fn run_session(
    link: &LinkConfig,
    peripheral: PeripheralState,
    central: CentralState,
    script: &[ScriptStep],
    horizon_ms: SimTime,
) -> Result<SessionTrace> {
    if horizon_ms == 0 {
        return Err(SimError::InvalidConfig("horizon_ms must be > 0".into()));
    }
    if let Some(step) = script.iter().find(|s| s.at_ms > horizon_ms) {
        return Err(SimError::ScriptBeyondHorizon {
            at_ms: step.at_ms,
            horizon_ms,
        });
    }
    let mut engine = SessionEngine::new(link.clone(), peripheral, central)?;
    for step in script {
        engine.press(step.at_ms, step.key);
    }
    Ok(engine.finish(horizon_ms))
}
