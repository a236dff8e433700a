//! Line-oriented trace files.
//!
//! ```text
//! # comment
//! 0 button power-adaptor
//! 12 pen down 0.25 0.40
//! 13 pen move 0.30 0.41
//! 14 pen up
//! ```

use std::fmt;

use thiserror::Error;

use crate::device::{ButtonId, EventKind, TraceEvent};
use crate::touch_path::{PenInput, PenPhase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

fn parse_coord(tok: Option<&str>, name: &str) -> Result<f64, String> {
    let tok = tok.ok_or_else(|| format!("missing {name}"))?;
    let v: f64 = tok
        .parse()
        .map_err(|_| format!("{name} `{tok}` is not a number"))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("{name} {v} outside [0, 1]"));
    }
    Ok(v)
}

fn parse_line(line: &str) -> Result<Option<TraceEvent>, String> {
    let content = line.split('#').next().unwrap_or("").trim();
    if content.is_empty() {
        return Ok(None);
    }
    let mut toks = content.split_whitespace();
    let at_tok = toks.next().expect("non-empty line has a token");
    let at: u64 = at_tok
        .parse()
        .map_err(|_| format!("tick `{at_tok}` is not a non-negative integer"))?;
    let kind = match toks.next() {
        Some("button") => {
            let id = toks.next().ok_or("missing button id")?;
            EventKind::Button(id.parse::<ButtonId>().map_err(|e| e.to_string())?)
        }
        Some("pen") => {
            let phase = match toks.next() {
                Some("down") => PenPhase::Down,
                Some("move") => PenPhase::Move,
                Some("up") => PenPhase::Up,
                Some(other) => return Err(format!("unknown pen phase `{other}`")),
                None => return Err("missing pen phase".into()),
            };
            match phase {
                PenPhase::Up => EventKind::Pen(PenInput::up()),
                _ => {
                    let nx = parse_coord(toks.next(), "nx")?;
                    let ny = parse_coord(toks.next(), "ny")?;
                    EventKind::Pen(PenInput::at(phase, nx, ny))
                }
            }
        }
        Some(other) => return Err(format!("unknown event kind `{other}`")),
        None => return Err("missing event kind".into()),
    };
    if let Some(extra) = toks.next() {
        return Err(format!("unexpected trailing token `{extra}`"));
    }
    Ok(Some(TraceEvent { at, kind }))
}

/// Parses a whole trace. Tick order is not checked here.
pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>, TraceParseError> {
    let mut events = Vec::new();
    for (i, line) in text.lines().enumerate() {
        match parse_line(line) {
            Ok(Some(ev)) => events.push(ev),
            Ok(None) => {}
            Err(message) => {
                return Err(TraceParseError {
                    line: i + 1,
                    message,
                })
            }
        }
    }
    Ok(events)
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            EventKind::Button(b) => write!(f, "{} button {}", self.at, b),
            EventKind::Pen(p) => {
                let phase = match p.phase() {
                    PenPhase::Down => "down",
                    PenPhase::Move => "move",
                    PenPhase::Up => "up",
                };
                match p.position() {
                    Some((x, y)) => write!(f, "{} pen {} {} {}", self.at, phase, x, y),
                    None => write!(f, "{} pen {}", self.at, phase),
                }
            }
        }
    }
}
