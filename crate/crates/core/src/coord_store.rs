//! Register RAM for committed coordinate samples.

use std::collections::VecDeque;

use thiserror::Error;

use crate::touch_path::TouchSample;

pub const DEFAULT_CAPACITY: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("stale sample: seq {got} is not after latest seq {latest}")]
    StaleSample { got: u64, latest: u64 },
    #[error("register file capacity must be positive")]
    ZeroCapacity,
}

/// Bounded ring of samples; the newest entry is the one fanned out to the
/// render, seven-segment and video consumers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordRegisterFile {
    capacity: usize,
    entries: VecDeque<TouchSample>,
}

impl Default for CoordRegisterFile {
    fn default() -> Self {
        Self::with_capacity(DEFAULT_CAPACITY).unwrap()
    }
}

impl CoordRegisterFile {
    pub fn with_capacity(capacity: usize) -> Result<Self, StoreError> {
        if capacity == 0 {
            return Err(StoreError::ZeroCapacity);
        }
        Ok(CoordRegisterFile {
            capacity,
            entries: VecDeque::with_capacity(capacity.min(DEFAULT_CAPACITY)),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn write_sample(&mut self, s: TouchSample) -> Result<(), StoreError> {
        if let Some(latest) = self.entries.back() {
            if s.seq <= latest.seq {
                return Err(StoreError::StaleSample {
                    got: s.seq,
                    latest: latest.seq,
                });
            }
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(s);
        Ok(())
    }

    pub fn read_latest(&self) -> Option<&TouchSample> {
        self.entries.back()
    }

    /// Entries oldest first.
    pub fn entries(&self) -> impl Iterator<Item = &TouchSample> {
        self.entries.iter()
    }

    pub fn reset(&mut self) {
        self.entries.clear();
    }
}
