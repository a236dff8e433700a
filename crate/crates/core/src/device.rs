//! Main control and delay control: the assembled board.
//!
//! One [`DeviceState::step`] is one scheduling slot of the board. Pen
//! events go through the touch controller, wait `delay_depth` ticks in a
//! [`DelayLine`], then land in the register file. Each landed sample is
//! rendered and shown on the seven-segment banks in the same step.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coord_store::{CoordRegisterFile, StoreError, DEFAULT_CAPACITY};
use crate::render::{apply_stroke_step, FbHash, Framebuffer, PenColor, PenMode};
use crate::sevenseg::{display_sample, DigitBank};
use crate::touch_path::{PenInput, TouchController, TouchSample};

pub const DEFAULT_DELAY_DEPTH: u64 = 2;
pub const DEFAULT_BATTERY_DRAIN: f64 = 1e-6;
pub const LOW_BATTERY_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeviceError {
    #[error("trace out of order: event {index} at tick {at} follows tick {prev}")]
    TraceOrder { index: usize, at: u64, prev: u64 },
    #[error("delay depth must be at least one tick")]
    ZeroDelay,
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerState {
    Off,
    OnAdaptor,
    OnBattery { charge: f64 },
}

impl PowerState {
    pub fn is_on(&self) -> bool {
        !matches!(self, PowerState::Off)
    }

    pub fn name(&self) -> &'static str {
        match self {
            PowerState::Off => "off",
            PowerState::OnAdaptor => "adaptor",
            PowerState::OnBattery { .. } => "battery",
        }
    }

    pub fn charge(&self) -> Option<f64> {
        match self {
            PowerState::OnBattery { charge } => Some(*charge),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ButtonId {
    PowerAdaptor,
    PowerBattery,
    PowerOff,
    Draw,
    Erase,
    DrawBold,
    EraseBold,
    ColorToggle,
    Clear,
}

impl ButtonId {
    pub const ALL: [ButtonId; 9] = [
        ButtonId::PowerAdaptor,
        ButtonId::PowerBattery,
        ButtonId::PowerOff,
        ButtonId::Draw,
        ButtonId::Erase,
        ButtonId::DrawBold,
        ButtonId::EraseBold,
        ButtonId::ColorToggle,
        ButtonId::Clear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ButtonId::PowerAdaptor => "power-adaptor",
            ButtonId::PowerBattery => "power-battery",
            ButtonId::PowerOff => "power-off",
            ButtonId::Draw => "draw",
            ButtonId::Erase => "erase",
            ButtonId::DrawBold => "draw-bold",
            ButtonId::EraseBold => "erase-bold",
            ButtonId::ColorToggle => "color-toggle",
            ButtonId::Clear => "clear",
        }
    }
}

impl fmt::Display for ButtonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown button `{0}`")]
pub struct UnknownButton(pub String);

impl FromStr for ButtonId {
    type Err = UnknownButton;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ButtonId::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| UnknownButton(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    Button(ButtonId),
    Pen(PenInput),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub at: u64,
    pub kind: EventKind,
}

/// Fixed-latency pipeline: a value pushed at tick `t` is released at
/// `t + depth`, never earlier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayLine<T> {
    depth: u64,
    queue: VecDeque<(u64, T)>,
}

impl<T> DelayLine<T> {
    pub fn new(depth: u64) -> Result<Self, DeviceError> {
        if depth == 0 {
            return Err(DeviceError::ZeroDelay);
        }
        Ok(DelayLine {
            depth,
            queue: VecDeque::new(),
        })
    }

    pub fn depth(&self) -> u64 {
        self.depth
    }

    pub fn push(&mut self, now: u64, value: T) {
        self.queue.push_back((now + self.depth, value));
    }

    /// Removes and returns every value due at or before `now`, oldest first.
    pub fn pop_ready(&mut self, now: u64) -> Vec<T> {
        let mut out = Vec::new();
        while self.queue.front().is_some_and(|(due, _)| *due <= now) {
            out.push(self.queue.pop_front().unwrap().1);
        }
        out
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn clear(&mut self) {
        self.queue.clear();
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceConfig {
    pub delay_depth: u64,
    pub store_capacity: usize,
    pub battery_drain_per_tick: f64,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        DeviceConfig {
            delay_depth: DEFAULT_DELAY_DEPTH,
            store_capacity: DEFAULT_CAPACITY,
            battery_drain_per_tick: DEFAULT_BATTERY_DRAIN,
        }
    }
}

/// The whole board as a value.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceState {
    power: PowerState,
    // charge held while running on the adaptor or switched off
    battery_reserve: f64,
    mode: PenMode,
    color: PenColor,
    store: CoordRegisterFile,
    fb: Framebuffer,
    digits: DigitBank,
    prev_sample: Option<TouchSample>,
    tick_count: u64,
    touch: TouchController,
    delay: DelayLine<TouchSample>,
    drain: f64,
}

impl Default for DeviceState {
    fn default() -> Self {
        Self::new(DeviceConfig::default()).unwrap()
    }
}

impl DeviceState {
    pub fn new(config: DeviceConfig) -> Result<Self, DeviceError> {
        Ok(DeviceState {
            power: PowerState::Off,
            battery_reserve: 1.0,
            mode: PenMode::Draw,
            color: PenColor::Red,
            store: CoordRegisterFile::with_capacity(config.store_capacity)?,
            fb: Framebuffer::new(),
            digits: DigitBank::default(),
            prev_sample: None,
            tick_count: 0,
            touch: TouchController::new(),
            delay: DelayLine::new(config.delay_depth)?,
            drain: config.battery_drain_per_tick,
        })
    }

    pub fn power(&self) -> PowerState {
        self.power
    }

    pub fn mode(&self) -> PenMode {
        self.mode
    }

    pub fn color(&self) -> PenColor {
        self.color
    }

    pub fn store(&self) -> &CoordRegisterFile {
        &self.store
    }

    pub fn framebuffer(&self) -> &Framebuffer {
        &self.fb
    }

    pub fn digits(&self) -> &DigitBank {
        &self.digits
    }

    pub fn prev_sample(&self) -> Option<&TouchSample> {
        self.prev_sample.as_ref()
    }

    pub fn tick_count(&self) -> u64 {
        self.tick_count
    }

    pub fn delay_depth(&self) -> u64 {
        self.delay.depth()
    }

    pub fn pending_samples(&self) -> usize {
        self.delay.pending()
    }

    pub fn low_battery(&self) -> bool {
        self.power
            .charge()
            .is_some_and(|c| c < LOW_BATTERY_THRESHOLD)
    }

    /// Battery gauge, whether or not the board currently runs on it.
    pub fn battery_charge(&self) -> f64 {
        self.power.charge().unwrap_or(self.battery_reserve)
    }

    fn reset_datapath(&mut self) {
        self.fb.clear();
        self.store.reset();
        self.digits = DigitBank::default();
        self.prev_sample = None;
        self.delay.clear();
        self.touch.reset_codes();
    }

    fn power_on(&mut self, target: PowerState) {
        match self.power {
            PowerState::Off => {
                self.reset_datapath();
                self.mode = PenMode::Draw;
                self.color = PenColor::Red;
                self.power = target;
            }
            PowerState::OnBattery { charge } if !matches!(target, PowerState::OnBattery { .. }) => {
                self.battery_reserve = charge;
                self.power = target;
            }
            PowerState::OnAdaptor if matches!(target, PowerState::OnBattery { .. }) => {
                self.power = target;
            }
            _ => {}
        }
    }

    pub fn press(&mut self, b: ButtonId) {
        match b {
            ButtonId::PowerAdaptor => self.power_on(PowerState::OnAdaptor),
            ButtonId::PowerBattery => self.power_on(PowerState::OnBattery {
                charge: self.battery_reserve,
            }),
            ButtonId::PowerOff => {
                if let PowerState::OnBattery { charge } = self.power {
                    self.battery_reserve = charge;
                }
                self.power = PowerState::Off;
                self.reset_datapath();
            }
            _ if !self.power.is_on() => {}
            ButtonId::Draw => self.mode = PenMode::Draw,
            ButtonId::Erase => self.mode = PenMode::Erase,
            ButtonId::DrawBold => self.mode = PenMode::DrawBold,
            ButtonId::EraseBold => self.mode = PenMode::EraseBold,
            ButtonId::ColorToggle => self.color = self.color.toggled(),
            ButtonId::Clear => self.fb.clear(),
        }
    }

    /// Applies an event in the current tick without advancing the clock.
    pub fn ingest(&mut self, kind: &EventKind) {
        match kind {
            EventKind::Button(b) => self.press(*b),
            EventKind::Pen(input) if self.power.is_on() => {
                let s = self.touch.sample(input);
                self.delay.push(self.tick_count, s);
            }
            EventKind::Pen(_) => {}
        }
    }

    /// Closes the current tick: lands due samples, drains the battery and
    /// advances the clock.
    pub fn tick(&mut self) {
        for s in self.delay.pop_ready(self.tick_count) {
            self.commit(s);
        }
        if let PowerState::OnBattery { charge } = &mut self.power {
            *charge = (*charge - self.drain).max(0.0);
        }
        self.tick_count += 1;
    }

    fn commit(&mut self, s: TouchSample) {
        self.store
            .write_sample(s)
            .expect("touch controller emits increasing sequence numbers");
        let latest = *self.store.read_latest().expect("just written");
        if latest.pen_down {
            apply_stroke_step(
                &mut self.fb,
                self.prev_sample.as_ref(),
                &latest,
                self.mode,
                self.color,
            )
            .expect("pen-down sample always maps onto the surface");
        }
        self.digits = display_sample(&latest);
        self.prev_sample = Some(latest);
    }

    /// One scheduling step, with an optional event.
    pub fn step(&mut self, ev: Option<&EventKind>) {
        if let Some(kind) = ev {
            self.ingest(kind);
        }
        self.tick();
    }

    /// Idles until every in-flight sample has landed.
    pub fn flush(&mut self) {
        while self.delay.pending() > 0 {
            self.tick();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameLogEntry {
    pub event_index: usize,
    pub tick: u64,
    pub fb_hash: FbHash,
    pub digits: DigitBank,
}

/// Framebuffer hash and seven-segment readout recorded after each event.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrameLog {
    pub entries: Vec<FrameLogEntry>,
}

impl fmt::Display for FrameLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{} {} {} {}", e.event_index, e.tick, e.fb_hash, e.digits)?;
        }
        Ok(())
    }
}

/// Checks that event ticks never decrease.
pub fn check_order(events: &[TraceEvent]) -> Result<(), DeviceError> {
    for (i, w) in events.windows(2).enumerate() {
        if w[1].at < w[0].at {
            return Err(DeviceError::TraceOrder {
                index: i + 1,
                at: w[1].at,
                prev: w[0].at,
            });
        }
    }
    Ok(())
}

/// Replays a trace from power-off, idling between timestamps.
///
/// Events sharing a tick are ingested together and closed by one tick;
/// their log entries are taken after that tick. After the last event the
/// board idles until the delay line is empty.
pub fn run_trace(
    events: &[TraceEvent],
    config: DeviceConfig,
) -> Result<(DeviceState, FrameLog), DeviceError> {
    let mut log = FrameLog::default();
    let state = replay_trace(events, config, |event_index, state| {
        log.entries.push(FrameLogEntry {
            event_index,
            tick: events[event_index].at,
            fb_hash: state.fb.content_hash(),
            digits: state.digits,
        });
    })?;
    Ok((state, log))
}

/// [`run_trace`] with a hook called after each event's tick instead of a
/// built-in log.
pub fn replay_trace<F>(
    events: &[TraceEvent],
    config: DeviceConfig,
    mut on_event: F,
) -> Result<DeviceState, DeviceError>
where
    F: FnMut(usize, &DeviceState),
{
    check_order(events)?;
    let mut state = DeviceState::new(config)?;
    let mut i = 0;
    while i < events.len() {
        let at = events[i].at;
        while state.tick_count < at {
            state.tick();
        }
        let start = i;
        while i < events.len() && events[i].at == at {
            state.ingest(&events[i].kind);
            i += 1;
        }
        state.tick();
        for event_index in start..i {
            on_event(event_index, &state);
        }
    }
    state.flush();
    Ok(state)
}
