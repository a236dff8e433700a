//! GLCD control: code-to-pixel mapping, pen modes and stroke rasterization.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::touch_path::TouchSample;

pub const FB_WIDTH: usize = 800;
pub const FB_HEIGHT: usize = 400;
const ADC_SPAN: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("sample has the pen up")]
    PenUp,
    #[error("pixel ({col}, {row}) outside the {FB_WIDTH}x{FB_HEIGHT} surface")]
    OutOfBounds { col: u32, row: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rgb24 {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb24 {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb24 { r, g, b }
    }
}

pub const BACKGROUND: Rgb24 = Rgb24::new(255, 255, 255);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pixel {
    col: u16,
    row: u16,
}

impl Pixel {
    pub fn new(col: u32, row: u32) -> Result<Self, RenderError> {
        if col as usize >= FB_WIDTH || row as usize >= FB_HEIGHT {
            return Err(RenderError::OutOfBounds { col, row });
        }
        Ok(Pixel {
            col: col as u16,
            row: row as u16,
        })
    }

    pub fn col(self) -> u32 {
        self.col as u32
    }

    pub fn row(self) -> u32 {
        self.row as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenMode {
    #[default]
    Draw,
    Erase,
    DrawBold,
    EraseBold,
}

impl PenMode {
    /// Half-width of the square stamp kernel (3×3 or 7×7).
    pub fn kernel_radius(self) -> i32 {
        match self {
            PenMode::Draw | PenMode::Erase => 1,
            PenMode::DrawBold | PenMode::EraseBold => 3,
        }
    }

    pub fn is_erase(self) -> bool {
        matches!(self, PenMode::Erase | PenMode::EraseBold)
    }

    pub fn name(self) -> &'static str {
        match self {
            PenMode::Draw => "draw",
            PenMode::Erase => "erase",
            PenMode::DrawBold => "draw-bold",
            PenMode::EraseBold => "erase-bold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenColor {
    #[default]
    Red,
    Blue,
}

impl PenColor {
    pub fn rgb(self) -> Rgb24 {
        match self {
            PenColor::Red => Rgb24::new(255, 0, 0),
            PenColor::Blue => Rgb24::new(0, 0, 255),
        }
    }

    pub fn toggled(self) -> Self {
        match self {
            PenColor::Red => PenColor::Blue,
            PenColor::Blue => PenColor::Red,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PenColor::Red => "red",
            PenColor::Blue => "blue",
        }
    }
}

/// SHA-256 of the framebuffer's row-major RGB bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FbHash(pub [u8; 32]);

impl fmt::Display for FbHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// The 800×400 24-bit image surface.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Framebuffer {
    cells: Vec<Rgb24>,
}

impl fmt::Debug for Framebuffer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Framebuffer")
            .field("width", &FB_WIDTH)
            .field("height", &FB_HEIGHT)
            .field("hash", &self.content_hash().to_string())
            .finish()
    }
}

impl Default for Framebuffer {
    fn default() -> Self {
        Self::new()
    }
}

impl Framebuffer {
    /// A cleared framebuffer.
    pub fn new() -> Self {
        Framebuffer {
            cells: vec![BACKGROUND; FB_WIDTH * FB_HEIGHT],
        }
    }

    pub fn width(&self) -> usize {
        FB_WIDTH
    }

    pub fn height(&self) -> usize {
        FB_HEIGHT
    }

    pub fn get(&self, p: Pixel) -> Rgb24 {
        self.cells[p.row as usize * FB_WIDTH + p.col as usize]
    }

    pub fn set(&mut self, p: Pixel, c: Rgb24) {
        self.cells[p.row as usize * FB_WIDTH + p.col as usize] = c;
    }

    /// One row, left to right.
    pub fn row(&self, row: usize) -> &[Rgb24] {
        &self.cells[row * FB_WIDTH..(row + 1) * FB_WIDTH]
    }

    pub fn cells(&self) -> &[Rgb24] {
        &self.cells
    }

    pub fn clear(&mut self) {
        self.cells.fill(BACKGROUND);
    }

    pub fn non_background_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != BACKGROUND).count()
    }

    /// Row-major packed RGB bytes.
    pub fn to_rgb_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.cells.len() * 3);
        for c in &self.cells {
            out.extend_from_slice(&[c.r, c.g, c.b]);
        }
        out
    }

    pub fn content_hash(&self) -> FbHash {
        let mut h = Sha256::new();
        for c in &self.cells {
            h.update([c.r, c.g, c.b]);
        }
        FbHash(h.finalize().into())
    }
}

/// Scales a committed sample's codes onto the framebuffer grid.
pub fn map_to_pixel(s: &TouchSample) -> Result<Pixel, RenderError> {
    if !s.pen_down {
        return Err(RenderError::PenUp);
    }
    let col = s.x.code() as u32 * FB_WIDTH as u32 / ADC_SPAN;
    let row = s.y.code() as u32 * FB_HEIGHT as u32 / ADC_SPAN;
    Pixel::new(col, row)
}

/// Bresenham line from `a` to `b`, both inclusive, 8-connected.
pub fn line_pixels(a: Pixel, b: Pixel) -> Vec<Pixel> {
    let (mut x, mut y) = (a.col as i32, a.row as i32);
    let (x1, y1) = (b.col as i32, b.row as i32);
    let dx = (x1 - x).abs();
    let dy = -(y1 - y).abs();
    let sx = if x < x1 { 1 } else { -1 };
    let sy = if y < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let mut out = Vec::with_capacity(dx.max(-dy) as usize + 1);
    loop {
        out.push(Pixel {
            col: x as u16,
            row: y as u16,
        });
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    out
}

/// Writes the mode's square kernel centered at `p`, clipped to the surface.
pub fn stamp(fb: &mut Framebuffer, p: Pixel, mode: PenMode, color: PenColor) {
    let r = mode.kernel_radius();
    let ink = if mode.is_erase() {
        BACKGROUND
    } else {
        color.rgb()
    };
    let (cx, cy) = (p.col as i32, p.row as i32);
    let cols = (cx - r).max(0) as usize..=((cx + r).min(FB_WIDTH as i32 - 1)) as usize;
    let rows = (cy - r).max(0) as usize..=((cy + r).min(FB_HEIGHT as i32 - 1)) as usize;
    for row in rows {
        fb.cells[row * FB_WIDTH + *cols.start()..=row * FB_WIDTH + *cols.end()].fill(ink);
    }
}

/// Renders one committed sample, joining it to the previous one when the
/// pen stayed down.
pub fn apply_stroke_step(
    fb: &mut Framebuffer,
    prev: Option<&TouchSample>,
    cur: &TouchSample,
    mode: PenMode,
    color: PenColor,
) -> Result<(), RenderError> {
    let to = map_to_pixel(cur)?;
    match prev.filter(|p| p.pen_down) {
        Some(p) => {
            let from = map_to_pixel(p)?;
            for px in line_pixels(from, to) {
                stamp(fb, px, mode, color);
            }
        }
        None => stamp(fb, to, mode, color),
    }
    Ok(())
}
