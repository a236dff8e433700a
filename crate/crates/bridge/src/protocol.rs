//! Wire messages. See `protocol.md` next to this crate's manifest.

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use touchboard_core::device::{ButtonId, DeviceState};
use touchboard_core::render::{Framebuffer, FB_HEIGHT, FB_WIDTH};
use touchboard_core::touch_path::{PenInput, PenPhase};

/// Leading bytes of every binary frame message.
pub const FRAME_MAGIC: &[u8; 4] = b"TBFR";
pub const FRAME_HEADER_LEN: usize = 4 + 8 + 2 + 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InboundMsg {
    Pointer { phase: PenPhase, nx: f64, ny: f64 },
    Button(ButtonId),
}

impl InboundMsg {
    pub fn pen_input(&self) -> Option<PenInput> {
        match *self {
            InboundMsg::Pointer { phase, nx, ny } => Some(PenInput::at(phase, nx, ny)),
            InboundMsg::Button(_) => None,
        }
    }
}

/// A rejected inbound message, naming the offending field.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{field}: {message}")]
pub struct ProtocolError {
    pub field: String,
    pub message: String,
}

impl ProtocolError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        ProtocolError {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({"type": "error", "field": self.field, "message": self.message})
            .to_string()
    }
}

fn str_field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a str, ProtocolError> {
    match obj.get(name) {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(ProtocolError::new(name, "expected a string")),
        None => Err(ProtocolError::new(name, "missing")),
    }
}

fn unit_field(obj: &Map<String, Value>, name: &str) -> Result<f64, ProtocolError> {
    let v = match obj.get(name) {
        Some(Value::Number(n)) => n.as_f64().unwrap_or(f64::NAN),
        Some(_) => return Err(ProtocolError::new(name, "expected a number")),
        None => return Err(ProtocolError::new(name, "missing")),
    };
    if !(0.0..=1.0).contains(&v) {
        return Err(ProtocolError::new(name, format!("{v} outside [0, 1]")));
    }
    Ok(v)
}

pub fn parse_inbound(text: &str) -> Result<InboundMsg, ProtocolError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| ProtocolError::new("message", format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| ProtocolError::new("message", "expected a JSON object"))?;
    match str_field(obj, "type")? {
        "pointer" => {
            let phase = match str_field(obj, "phase")? {
                "down" => PenPhase::Down,
                "move" => PenPhase::Move,
                "up" => PenPhase::Up,
                other => {
                    return Err(ProtocolError::new(
                        "phase",
                        format!("unknown phase `{other}`"),
                    ))
                }
            };
            let (nx, ny) = match phase {
                PenPhase::Up => (0.0, 0.0),
                _ => (unit_field(obj, "nx")?, unit_field(obj, "ny")?),
            };
            Ok(InboundMsg::Pointer { phase, nx, ny })
        }
        "button" => {
            let id = str_field(obj, "id")?;
            id.parse::<ButtonId>()
                .map(InboundMsg::Button)
                .map_err(|e| ProtocolError::new("id", e.to_string()))
        }
        other => Err(ProtocolError::new(
            "type",
            format!("unknown message type `{other}`"),
        )),
    }
}

/// Binary frame: magic, seq (u64 BE), width and height (u16 BE), then
/// row-major RGB bytes.
pub fn encode_frame(seq: u64, fb: &Framebuffer) -> Vec<u8> {
    let mut out = Vec::with_capacity(FRAME_HEADER_LEN + FB_WIDTH * FB_HEIGHT * 3);
    out.extend_from_slice(FRAME_MAGIC);
    out.extend_from_slice(&seq.to_be_bytes());
    out.extend_from_slice(&(FB_WIDTH as u16).to_be_bytes());
    out.extend_from_slice(&(FB_HEIGHT as u16).to_be_bytes());
    out.extend_from_slice(&fb.to_rgb_bytes());
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedFrame<'a> {
    pub seq: u64,
    pub width: u16,
    pub height: u16,
    pub pixels: &'a [u8],
}

pub fn decode_frame(bytes: &[u8]) -> Option<DecodedFrame<'_>> {
    let rest = bytes.strip_prefix(FRAME_MAGIC)?;
    let seq = u64::from_be_bytes(rest.get(0..8)?.try_into().ok()?);
    let width = u16::from_be_bytes(rest.get(8..10)?.try_into().ok()?);
    let height = u16::from_be_bytes(rest.get(10..12)?.try_into().ok()?);
    let pixels = &rest[12..];
    (pixels.len() == width as usize * height as usize * 3).then_some(DecodedFrame {
        seq,
        width,
        height,
        pixels,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatusMsg {
    pub power: &'static str,
    pub mode: &'static str,
    pub color: &'static str,
    pub battery_charge: f64,
    pub low_battery: bool,
}

impl StatusMsg {
    pub fn of(d: &DeviceState) -> Self {
        StatusMsg {
            power: d.power().name(),
            mode: d.mode().name(),
            color: d.color().name(),
            // gauge resolution; finer changes are not worth a message
            battery_charge: (d.battery_charge() * 1e4).round() / 1e4,
            low_battery: d.low_battery(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("status serializes");
        v["type"] = "status".into();
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SevenSegMsg {
    pub bytes: [u8; 6],
    pub text: String,
}

impl SevenSegMsg {
    pub fn of(d: &DeviceState) -> Self {
        SevenSegMsg {
            bytes: d.digits().packed(),
            text: d.digits().to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("sevenseg serializes");
        v["type"] = "sevenseg".into();
        v.to_string()
    }
}
