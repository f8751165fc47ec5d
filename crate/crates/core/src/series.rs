//! Time grids and named observable channels.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::{Error, Result};

/// Uniform grid `t_k = t_max · k / (points - 1)`, `k = 0..points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_max: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, points: usize) -> Self {
        Self { t_max, points }
    }

    pub fn times(&self) -> Vec<f64> {
        if self.points == 1 {
            return alloc::vec![0.0];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| self.t_max * k as f64 / last)
            .collect()
    }
}

/// Rejects empty or non-increasing grids.
pub fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    match times
        .windows(2)
        .position(|w| w[1].partial_cmp(&w[0]) != Some(Ordering::Greater))
    {
        Some(i) => Err(Error::GridNotIncreasing { index: i + 1 }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub name: String,
    pub values: Vec<f64>,
}

/// Sampled observables on a shared time grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub grid: Vec<f64>,
    pub channels: Vec<Channel>,
    pub meta: BTreeMap<String, String>,
}

impl TimeSeries {
    pub fn new(grid: Vec<f64>) -> Self {
        Self {
            grid,
            ..Self::default()
        }
    }

    pub fn push_channel(&mut self, name: impl Into<String>, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.grid.len());
        self.channels.push(Channel {
            name: name.into(),
            values,
        });
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    /// Appends every channel of `other`; grids must match.
    pub fn merge(&mut self, other: TimeSeries) {
        debug_assert_eq!(self.grid, other.grid);
        self.channels.extend(other.channels);
        self.meta.extend(other.meta);
    }

    /// Grid strictly increasing and every channel the grid's length.
    pub fn is_well_formed(&self) -> bool {
        check_grid(&self.grid).is_ok()
            && self
                .channels
                .iter()
                .all(|c| c.values.len() == self.grid.len())
    }
}
