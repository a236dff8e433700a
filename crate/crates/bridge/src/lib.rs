//! Live bridge between the simulated board and browser clients.

pub mod hub;
pub mod protocol;
pub mod server;

pub use hub::{DeviceHub, Frame, Outbound, Snapshot};
pub use server::{router, serve, BridgeConfig};
