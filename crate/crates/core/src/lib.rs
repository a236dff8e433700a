//! Behavioral model of an FPGA touchscreen writing/drawing board.
//!
//! The datapath mirrors the hardware blocks one to one:
//!
//! * [`touch_path`]: resistive panel + ADC and the serial-port controller that
//!   reads 12-bit X/Y conversions out of it.
//! * [`coord_store`]: the register RAM holding committed samples.
//! * [`render`]: the GLCD control block, pen modes and stroke rasterization
//!   into an 800×400 framebuffer.
//! * [`video_out`]: VGA timing and frame composition for a projector.
//! * [`sevenseg`]: two three-digit seven-segment banks showing X and Y.
//! * [`device`]: main control, delay control, buttons and trace replay.
//!
//! [`evalstats`] carries the usability-evaluation statistics (task means,
//! survey frequency tables, the problem-discovery curve and subgroup
//! resampling).
//!
//! Data-parallel loops (frame composition, resampling trials) run on rayon
//! when the `parallel` feature is enabled and fall back to plain iterators
//! otherwise. [`Execution`] selects the path explicitly at call sites.

pub mod coord_store;
pub mod device;
pub mod evalstats;
pub mod fixtures;
pub mod render;
pub mod sevenseg;
pub mod touch_path;
pub mod trace;
pub mod video_out;

mod exec;

pub use exec::Execution;
