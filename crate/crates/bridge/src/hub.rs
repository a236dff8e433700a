//! The single owner of the live device. Synchronous; the server drives it
//! from one task.

use std::sync::Arc;

use touchboard_core::device::{DeviceConfig, DeviceError, DeviceState, EventKind};
use touchboard_core::render::FbHash;
use touchboard_core::video_out::PPM_HEADER;

use crate::protocol::{encode_frame, InboundMsg, SevenSegMsg, StatusMsg, FRAME_HEADER_LEN};

/// An encoded frame, shared between every client that receives it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub seq: u64,
    pub hash: FbHash,
    pub bytes: Arc<[u8]>,
}

impl Frame {
    pub fn pixels(&self) -> &[u8] {
        &self.bytes[FRAME_HEADER_LEN..]
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = PPM_HEADER.to_vec();
        out.extend_from_slice(self.pixels());
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outbound {
    Frame(Frame),
    Status(Arc<str>),
    SevenSeg(Arc<str>),
}

/// Everything a newly connected client needs to catch up.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Snapshot {
    pub frame: Option<Frame>,
    pub status: Option<Arc<str>>,
    pub sevenseg: Option<Arc<str>>,
    pub tick: u64,
}

impl Snapshot {
    pub fn seq(&self) -> u64 {
        self.frame.as_ref().map_or(0, |f| f.seq)
    }

    pub fn messages(&self) -> impl Iterator<Item = Outbound> + '_ {
        let status = self.status.clone().map(Outbound::Status);
        let seg = self.sevenseg.clone().map(Outbound::SevenSeg);
        let frame = self.frame.clone().map(Outbound::Frame);
        status.into_iter().chain(seg).chain(frame)
    }
}

#[derive(Debug)]
pub struct DeviceHub {
    device: DeviceState,
    seq: u64,
    last_hash: Option<FbHash>,
    last_status: Option<StatusMsg>,
    last_seg: Option<SevenSegMsg>,
    snapshot: Snapshot,
}

impl DeviceHub {
    pub fn new(config: DeviceConfig) -> Result<Self, DeviceError> {
        Ok(DeviceHub {
            device: DeviceState::new(config)?,
            seq: 0,
            last_hash: None,
            last_status: None,
            last_seg: None,
            snapshot: Snapshot::default(),
        })
    }

    pub fn device(&self) -> &DeviceState {
        &self.device
    }

    pub fn apply(&mut self, msg: &InboundMsg) {
        let kind = match msg {
            InboundMsg::Button(b) => EventKind::Button(*b),
            InboundMsg::Pointer { .. } => EventKind::Pen(msg.pen_input().expect("pointer message")),
        };
        self.device.ingest(&kind);
    }

    pub fn tick(&mut self) {
        self.device.tick();
        self.snapshot.tick = self.device.tick_count();
    }

    /// Messages for whatever changed since the last call. A frame goes out
    /// only when the framebuffer hash moved; the first call always emits one.
    pub fn publish(&mut self) -> Vec<Outbound> {
        let mut out = Vec::new();
        let status = StatusMsg::of(&self.device);
        if self.last_status.as_ref() != Some(&status) {
            let text: Arc<str> = status.to_json().into();
            self.snapshot.status = Some(text.clone());
            self.last_status = Some(status);
            out.push(Outbound::Status(text));
        }
        let seg = SevenSegMsg::of(&self.device);
        if self.last_seg.as_ref() != Some(&seg) {
            let text: Arc<str> = seg.to_json().into();
            self.snapshot.sevenseg = Some(text.clone());
            self.last_seg = Some(seg);
            out.push(Outbound::SevenSeg(text));
        }
        let fb = self.device.framebuffer();
        let hash = fb.content_hash();
        if self.last_hash != Some(hash) {
            self.seq += 1;
            let frame = Frame {
                seq: self.seq,
                hash,
                bytes: encode_frame(self.seq, fb).into(),
            };
            self.last_hash = Some(hash);
            self.snapshot.frame = Some(frame.clone());
            out.push(Outbound::Frame(frame));
        }
        out
    }

    pub fn snapshot(&self) -> &Snapshot {
        &self.snapshot
    }
}

impl Default for DeviceHub {
    fn default() -> Self {
        DeviceHub::new(DeviceConfig::default()).expect("default config is valid")
    }
}
