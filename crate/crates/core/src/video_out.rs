//! VGA control: sync/porch timing and frame composition.
//!
//! The default mode is VESA 800×600@60 (40 MHz pixel clock). The 800×400
//! drawing surface maps 1:1 horizontally and is letterboxed vertically with
//! 100 background lines above and below.

use std::fmt;
use std::io::Write;

use thiserror::Error;

use crate::exec::{map_indexed, Execution};
use crate::render::{Framebuffer, Rgb24, BACKGROUND, FB_HEIGHT, FB_WIDTH};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VideoError {
    #[error("framebuffer is {got_w}x{got_h}, expected {FB_WIDTH}x{FB_HEIGHT}")]
    DimensionMismatch { got_w: usize, got_h: usize },
    #[error("invalid timing: {0}")]
    InvalidTiming(&'static str),
    #[error("malformed PPM: {0}")]
    MalformedPpm(&'static str),
}

/// One axis of a VGA mode, in pixels (horizontal) or lines (vertical).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisTiming {
    pub active: u32,
    pub front_porch: u32,
    pub sync_pulse: u32,
    pub back_porch: u32,
}

impl AxisTiming {
    pub fn total(&self) -> u32 {
        self.active + self.front_porch + self.sync_pulse + self.back_porch
    }

    fn sync_start(&self) -> u32 {
        self.active + self.front_porch
    }

    fn in_sync(&self, count: u32) -> bool {
        count >= self.sync_start() && count < self.sync_start() + self.sync_pulse
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VgaTimingParams {
    pub horizontal: AxisTiming,
    pub vertical: AxisTiming,
    pub pixel_clock_hz: u64,
}

impl Default for VgaTimingParams {
    fn default() -> Self {
        VgaTimingParams {
            horizontal: AxisTiming {
                active: 800,
                front_porch: 40,
                sync_pulse: 128,
                back_porch: 88,
            },
            vertical: AxisTiming {
                active: 600,
                front_porch: 1,
                sync_pulse: 4,
                back_porch: 23,
            },
            pixel_clock_hz: 40_000_000,
        }
    }
}

impl VgaTimingParams {
    pub fn validate(&self) -> Result<(), VideoError> {
        for a in [self.horizontal, self.vertical] {
            if a.active == 0 || a.front_porch == 0 || a.sync_pulse == 0 || a.back_porch == 0 {
                return Err(VideoError::InvalidTiming("every count must be positive"));
            }
        }
        if self.pixel_clock_hz == 0 {
            return Err(VideoError::InvalidTiming("pixel clock must be positive"));
        }
        if (self.horizontal.active as usize) < FB_WIDTH
            || (self.vertical.active as usize) < FB_HEIGHT
        {
            return Err(VideoError::InvalidTiming(
                "active area smaller than the framebuffer",
            ));
        }
        Ok(())
    }

    pub fn h_total(&self) -> u32 {
        self.horizontal.total()
    }

    pub fn v_total(&self) -> u32 {
        self.vertical.total()
    }

    pub fn ticks_per_frame(&self) -> u64 {
        self.h_total() as u64 * self.v_total() as u64
    }

    pub fn active_pixels(&self) -> u64 {
        self.horizontal.active as u64 * self.vertical.active as u64
    }

    pub fn refresh_hz(&self) -> f64 {
        self.pixel_clock_hz as f64 / self.ticks_per_frame() as f64
    }

    /// Letterbox offsets of the framebuffer within the active region.
    pub fn letterbox(&self) -> (u32, u32) {
        (
            (self.horizontal.active - FB_WIDTH as u32) / 2,
            (self.vertical.active - FB_HEIGHT as u32) / 2,
        )
    }
}

/// Pixel-clock state of the timing generator.
///
/// `pixel` is `None` during blanking. [`advance`] leaves it as background
/// for active ticks; [`compose_frame`] fills in real image data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VgaTick {
    pub h_count: u32,
    pub v_count: u32,
    pub hsync: bool,
    pub vsync: bool,
    pub active: bool,
    pub pixel: Option<Rgb24>,
}

impl VgaTick {
    pub fn at(h_count: u32, v_count: u32, params: &VgaTimingParams) -> Self {
        let active = h_count < params.horizontal.active && v_count < params.vertical.active;
        VgaTick {
            h_count,
            v_count,
            hsync: params.horizontal.in_sync(h_count),
            vsync: params.vertical.in_sync(v_count),
            active,
            pixel: active.then_some(BACKGROUND),
        }
    }

    pub fn origin(params: &VgaTimingParams) -> Self {
        Self::at(0, 0, params)
    }
}

pub fn advance(t: &VgaTick, params: &VgaTimingParams) -> VgaTick {
    let mut h = t.h_count + 1;
    let mut v = t.v_count;
    if h == params.h_total() {
        h = 0;
        v += 1;
        if v == params.v_total() {
            v = 0;
        }
    }
    VgaTick::at(h, v, params)
}

fn line_ticks(fb: &Framebuffer, params: &VgaTimingParams, v: u32) -> Vec<VgaTick> {
    let (left, top) = params.letterbox();
    let fb_row = v
        .checked_sub(top)
        .filter(|&r| (r as usize) < FB_HEIGHT)
        .map(|r| fb.row(r as usize));
    (0..params.h_total())
        .map(|h| {
            let mut t = VgaTick::at(h, v, params);
            if t.active {
                let col = h.checked_sub(left).filter(|&c| (c as usize) < FB_WIDTH);
                if let (Some(row), Some(c)) = (fb_row, col) {
                    t.pixel = Some(row[c as usize]);
                }
            }
            t
        })
        .collect()
}

/// Every tick of one frame in scan order, lines composed in parallel when
/// `exec` allows.
pub fn compose_frame(
    fb: &Framebuffer,
    params: &VgaTimingParams,
    exec: Execution,
) -> Result<Vec<VgaTick>, VideoError> {
    if fb.width() != FB_WIDTH || fb.height() != FB_HEIGHT {
        return Err(VideoError::DimensionMismatch {
            got_w: fb.width(),
            got_h: fb.height(),
        });
    }
    params.validate()?;
    let lines = map_indexed(exec, params.v_total() as usize, |v| {
        line_ticks(fb, params, v as u32)
    });
    Ok(lines.into_iter().flatten().collect())
}

/// Tick and pulse counts over a run of the timing generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TimingCounts {
    pub ticks: u64,
    pub hsync_pulses: u64,
    pub vsync_pulses: u64,
    pub active_pixels: u64,
}

/// Steps the generator from the origin for `frames` whole frames, counting
/// sync pulses by their rising edges.
pub fn count_frames(params: &VgaTimingParams, frames: u64) -> TimingCounts {
    let mut counts = TimingCounts::default();
    let mut t = VgaTick::origin(params);
    // the tick before the origin is the last tick of the previous frame
    let last = VgaTick::at(params.h_total() - 1, params.v_total() - 1, params);
    let (mut prev_h, mut prev_v) = (last.hsync, last.vsync);
    for _ in 0..frames * params.ticks_per_frame() {
        counts.ticks += 1;
        counts.hsync_pulses += (t.hsync && !prev_h) as u64;
        counts.vsync_pulses += (t.vsync && !prev_v) as u64;
        counts.active_pixels += t.pixel.is_some() as u64;
        prev_h = t.hsync;
        prev_v = t.vsync;
        t = advance(&t, params);
    }
    counts
}

/// Plain-text timing report.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    pub frames: u64,
    pub counts: TimingCounts,
    pub params: VgaTimingParams,
}

impl TimingReport {
    pub fn run(params: &VgaTimingParams, frames: u64) -> Self {
        TimingReport {
            frames,
            counts: count_frames(params, frames),
            params: *params,
        }
    }
}

impl fmt::Display for TimingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        writeln!(
            f,
            "mode {}x{} total {}x{} pixel_clock_hz {}",
            p.horizontal.active,
            p.vertical.active,
            p.h_total(),
            p.v_total(),
            p.pixel_clock_hz
        )?;
        writeln!(f, "frames {}", self.frames)?;
        writeln!(f, "ticks {}", self.counts.ticks)?;
        writeln!(f, "hsync_pulses {}", self.counts.hsync_pulses)?;
        writeln!(f, "vsync_pulses {}", self.counts.vsync_pulses)?;
        writeln!(f, "active_pixels {}", self.counts.active_pixels)?;
        writeln!(f, "refresh_hz {:.2}", p.refresh_hz())
    }
}

pub const PPM_HEADER: &[u8] = b"P6\n800 400\n255\n";

/// Binary PPM (P6) of the framebuffer, rows top to bottom.
pub fn export_ppm(fb: &Framebuffer) -> Vec<u8> {
    let mut out = Vec::with_capacity(PPM_HEADER.len() + FB_WIDTH * FB_HEIGHT * 3);
    out.extend_from_slice(PPM_HEADER);
    out.extend_from_slice(&fb.to_rgb_bytes());
    out
}

pub fn write_ppm<W: Write>(fb: &Framebuffer, mut w: W) -> std::io::Result<()> {
    w.write_all(&export_ppm(fb))
}

/// Reads back a P6 image produced by [`export_ppm`] as packed RGB bytes.
pub fn decode_ppm(bytes: &[u8]) -> Result<Vec<u8>, VideoError> {
    let body = bytes
        .strip_prefix(PPM_HEADER)
        .ok_or(VideoError::MalformedPpm(
            "expected an 800x400 maxval-255 P6 header",
        ))?;
    if body.len() != FB_WIDTH * FB_HEIGHT * 3 {
        return Err(VideoError::MalformedPpm(
            "pixel payload has the wrong length",
        ));
    }
    Ok(body.to_vec())
}
