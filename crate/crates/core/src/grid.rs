use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid of `count` points spanning `[min, max]` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::Config(format!("grid needs finite min < max, got {min}:{max}")));
        }
        if count < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {count}")));
        }
        Ok(Self { min, max, count })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            self.max
        } else {
            self.min + self.step() * k as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.point(k)).collect()
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// Parses `MIN:MAX:N`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [min, max, count] = parts.as_slice() else {
            return Err(Error::Config(format!("grid `{s}` is not MIN:MAX:N")));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("grid bound `{t}` is not a number")))
        };
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("grid count `{count}` is not a positive integer")))?;
        Self::new(num(min)?, num(max)?, count)
    }
}

/// Parses a comma-separated list of `MIN:MAX:N` axes.
pub fn parse_axes(s: &str) -> Result<Vec<GridSpec>> {
    s.split(',').map(str::parse).collect()
}
