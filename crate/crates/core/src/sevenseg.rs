//! Seven-segment readout: three hex digits for X, three for Y.

use std::fmt;

use thiserror::Error;

use crate::touch_path::{Adc12, TouchSample};

/// Common-cathode hex table, bit0 = a … bit6 = g.
const HEX_SEGMENTS: [u8; 16] = [
    0x3F, 0x06, 0x5B, 0x4F, 0x66, 0x6D, 0x7D, 0x07, // 0-7
    0x7F, 0x6F, 0x77, 0x7C, 0x39, 0x5E, 0x79, 0x71, // 8-F
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("digit {0} is not a hex digit")]
pub struct OutOfRange(pub u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SegPattern(u8);

impl SegPattern {
    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn segment(self, idx: u8) -> bool {
        idx < 7 && (self.0 >> idx) & 1 == 1
    }

    /// Inverse of [`encode_hex_digit`].
    pub fn decode(self) -> Option<u8> {
        HEX_SEGMENTS
            .iter()
            .position(|&p| p == self.0)
            .map(|d| d as u8)
    }
}

pub fn encode_hex_digit(d: u8) -> Result<SegPattern, OutOfRange> {
    HEX_SEGMENTS
        .get(d as usize)
        .map(|&p| SegPattern(p))
        .ok_or(OutOfRange(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DigitBank {
    pub x_digits: [SegPattern; 3],
    pub y_digits: [SegPattern; 3],
}

impl Default for DigitBank {
    fn default() -> Self {
        Self::showing(Adc12::ZERO, Adc12::ZERO)
    }
}

fn encode_code(code: Adc12) -> [SegPattern; 3] {
    let c = code.code();
    [(c >> 8) & 0xF, (c >> 4) & 0xF, c & 0xF].map(|d| SegPattern(HEX_SEGMENTS[d as usize]))
}

impl DigitBank {
    pub fn showing(x: Adc12, y: Adc12) -> Self {
        DigitBank {
            x_digits: encode_code(x),
            y_digits: encode_code(y),
        }
    }

    /// X digits then Y digits, each most significant first.
    pub fn packed(&self) -> [u8; 6] {
        let mut out = [0u8; 6];
        for (o, p) in out
            .iter_mut()
            .zip(self.x_digits.iter().chain(&self.y_digits))
        {
            *o = p.bits();
        }
        out
    }
}

/// Renders as `XXX YYY` in hex, `?` for a pattern outside the table.
impl fmt::Display for DigitBank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digit = |p: &SegPattern| match p.decode() {
            Some(d) => char::from_digit(d as u32, 16).unwrap().to_ascii_uppercase(),
            None => '?',
        };
        let x: String = self.x_digits.iter().map(digit).collect();
        let y: String = self.y_digits.iter().map(digit).collect();
        write!(f, "{x} {y}")
    }
}

pub fn display_sample(s: &TouchSample) -> DigitBank {
    DigitBank::showing(s.x, s.y)
}
