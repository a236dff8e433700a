//! Resistive touch panel, ADC chip and the serial-port controller.
//!
//! The ADC side answers a 24-clock transaction: eight command clocks, one
//! busy clock, twelve data bits MSB-first and three trailing zero clocks.
//! The controller side issues one X and one Y transaction per sample and
//! reassembles the codes from the clocked bits.

use std::fmt;

use thiserror::Error;

/// Number of clocks in one conversion transaction.
pub const TRANSACTION_BITS: usize = 24;
/// Command byte selecting the X channel.
pub const CMD_X: u8 = 0xD0;
/// Command byte selecting the Y channel.
pub const CMD_Y: u8 = 0x90;

const BUSY_BIT: usize = 8;
const DATA_START: usize = 9;
const DATA_BITS: usize = 12;
const PAD_START: usize = DATA_START + DATA_BITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum TouchError {
    #[error("ADC code {0} exceeds 12 bits")]
    CodeOutOfRange(u16),
    #[error("malformed transaction: {0}")]
    MalformedTransaction(&'static str),
}

/// A 12-bit ADC conversion result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Adc12(u16);

impl Adc12 {
    pub const MAX: Adc12 = Adc12(4095);
    pub const ZERO: Adc12 = Adc12(0);

    pub fn new(code: u16) -> Result<Self, TouchError> {
        if code > Self::MAX.0 {
            return Err(TouchError::CodeOutOfRange(code));
        }
        Ok(Adc12(code))
    }

    pub fn code(self) -> u16 {
        self.0
    }
}

impl fmt::Display for Adc12 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:03X}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    X,
    Y,
}

impl Channel {
    pub fn command(self) -> u8 {
        match self {
            Channel::X => CMD_X,
            Channel::Y => CMD_Y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PenPhase {
    Down,
    Move,
    Up,
}

/// A pen event on the active area, with normalized coordinates.
///
/// Coordinates exist only for `Down` and `Move`; they are clamped into
/// `[0, 1]` on construction (NaN clamps to 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenInput {
    phase: PenPhase,
    pos: Option<(f64, f64)>,
}

fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

impl PenInput {
    pub fn down(nx: f64, ny: f64) -> Self {
        Self::at(PenPhase::Down, nx, ny)
    }

    pub fn moved(nx: f64, ny: f64) -> Self {
        Self::at(PenPhase::Move, nx, ny)
    }

    pub fn up() -> Self {
        PenInput {
            phase: PenPhase::Up,
            pos: None,
        }
    }

    /// Builds a `Down` or `Move` input. An `Up` phase ignores the position.
    pub fn at(phase: PenPhase, nx: f64, ny: f64) -> Self {
        match phase {
            PenPhase::Up => Self::up(),
            _ => PenInput {
                phase,
                pos: Some((clamp_unit(nx), clamp_unit(ny))),
            },
        }
    }

    pub fn phase(&self) -> PenPhase {
        self.phase
    }

    pub fn position(&self) -> Option<(f64, f64)> {
        self.pos
    }
}

/// Maps a normalized position to a 12-bit code: `floor(n * 4096)`, clamped.
pub fn quantize(n: f64) -> Adc12 {
    let n = clamp_unit(n);
    let code = (n * 4096.0).floor() as u32;
    Adc12(code.min(4095) as u16)
}

/// One conversion as seen on the wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpiTransaction {
    control_byte: u8,
    bits: [bool; TRANSACTION_BITS],
    result: Adc12,
}

impl SpiTransaction {
    /// Wraps raw clocked bits, e.g. as captured from a wire. The bits are not
    /// validated here; [`deserialize_conversion`] does that.
    pub fn from_wire(control_byte: u8, bits: [bool; TRANSACTION_BITS]) -> Self {
        let result = Adc12(data_field(&bits));
        SpiTransaction {
            control_byte,
            bits,
            result,
        }
    }

    pub fn control_byte(&self) -> u8 {
        self.control_byte
    }

    pub fn clocked_bits(&self) -> &[bool; TRANSACTION_BITS] {
        &self.bits
    }

    pub fn result(&self) -> Adc12 {
        self.result
    }
}

fn data_field(bits: &[bool; TRANSACTION_BITS]) -> u16 {
    bits[DATA_START..PAD_START]
        .iter()
        .fold(0u16, |acc, &b| (acc << 1) | b as u16)
}

/// ADC side: clocks out one conversion of `code` on `channel`.
pub fn serialize_conversion(code: Adc12, channel: Channel) -> SpiTransaction {
    let mut bits = [false; TRANSACTION_BITS];
    for i in 0..DATA_BITS {
        bits[DATA_START + i] = (code.0 >> (DATA_BITS - 1 - i)) & 1 == 1;
    }
    SpiTransaction {
        control_byte: channel.command(),
        bits,
        result: code,
    }
}

/// Controller side: reassembles the 12-bit result from the clocked bits.
pub fn deserialize_conversion(t: &SpiTransaction) -> Result<Adc12, TouchError> {
    if t.bits[BUSY_BIT] {
        return Err(TouchError::MalformedTransaction("busy bit set"));
    }
    if t.bits[PAD_START..].iter().any(|&b| b) {
        return Err(TouchError::MalformedTransaction("nonzero trailing pad"));
    }
    Ok(Adc12(data_field(&t.bits)))
}

/// A committed coordinate sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TouchSample {
    pub pen_down: bool,
    pub x: Adc12,
    pub y: Adc12,
    pub seq: u64,
}

/// The ADC serial-port controller with its hold-last-conversion registers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TouchController {
    seq: u64,
    last_x: Adc12,
    last_y: Adc12,
}

impl TouchController {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sequence number of the most recently emitted sample (0 before any).
    pub fn seq(&self) -> u64 {
        self.seq
    }

    /// Zeroes the held codes. The sequence counter keeps running.
    pub fn reset_codes(&mut self) {
        self.last_x = Adc12::ZERO;
        self.last_y = Adc12::ZERO;
    }

    pub fn sample(&mut self, input: &PenInput) -> TouchSample {
        let pen_down = match input.position() {
            Some((nx, ny)) => {
                self.last_x = convert(quantize(nx), Channel::X);
                self.last_y = convert(quantize(ny), Channel::Y);
                true
            }
            None => false,
        };
        self.seq += 1;
        TouchSample {
            pen_down,
            x: self.last_x,
            y: self.last_y,
            seq: self.seq,
        }
    }
}

// Round trip over the wire; a well-formed transaction cannot fail.
fn convert(code: Adc12, channel: Channel) -> Adc12 {
    let t = serialize_conversion(code, channel);
    deserialize_conversion(&t).expect("ADC emitted a malformed transaction")
}

/// Stateless form of [`TouchController::sample`]: `prev_seq` and the held
/// codes are passed in explicitly.
pub fn sample_pen(input: &PenInput, prev_seq: u64, held: (Adc12, Adc12)) -> TouchSample {
    let mut c = TouchController {
        seq: prev_seq,
        last_x: held.0,
        last_y: held.1,
    };
    c.sample(input)
}
