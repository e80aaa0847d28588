//! Reference signals `r(t)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::Vector;

pub trait ReferenceSignal: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, t: f64) -> Vector;

    fn describe(&self) -> String;
}

/// `r ≡ 0`, the regulation setting.
#[derive(Clone, Copy, Debug)]
pub struct ZeroReference {
    dim: usize,
}

impl ZeroReference {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl ReferenceSignal for ZeroReference {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _t: f64) -> Vector {
        Vector::zeros(self.dim)
    }

    fn describe(&self) -> String {
        String::from("zero")
    }
}

#[derive(Clone, Debug)]
pub struct ConstantReference(pub Vector);

impl ReferenceSignal for ConstantReference {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, _t: f64) -> Vector {
        self.0.clone()
    }

    fn describe(&self) -> String {
        format!("constant {:?}", &self.0[..])
    }
}

/// `rᵢ(t) = Aᵢ sin(ωᵢ t)` per channel.
#[derive(Clone, Debug)]
pub struct Sinusoid {
    amplitudes: Vec<f64>,
    frequencies: Vec<f64>,
}

impl Sinusoid {
    pub fn new(amplitudes: Vec<f64>, frequencies: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != frequencies.len() || amplitudes.is_empty() {
            return Err(Error::InvalidArgument(
                "sinusoid needs one frequency per amplitude",
            ));
        }
        if amplitudes.iter().chain(&frequencies).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            amplitudes,
            frequencies,
        })
    }
}

impl ReferenceSignal for Sinusoid {
    fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    fn eval(&self, t: f64) -> Vector {
        Vector(
            self.amplitudes
                .iter()
                .zip(&self.frequencies)
                .map(|(a, w)| a * (w * t).sin())
                .collect(),
        )
    }

    fn describe(&self) -> String {
        format!(
            "sin amplitudes={:?} frequencies={:?}",
            self.amplitudes, self.frequencies
        )
    }
}

/// Piecewise-linear interpolation of samples, held constant outside the table.
#[derive(Clone, Debug)]
pub struct Tabulated {
    times: Vec<f64>,
    values: Vec<Vector>,
}

impl Tabulated {
    pub fn new(times: Vec<f64>, values: Vec<Vector>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::InvalidArgument("table needs matching non-empty columns"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("table times must be strictly increasing"));
        }
        let dim = values[0].dim();
        if values.iter().any(|v| v.dim() != dim || !v.is_finite()) {
            return Err(Error::InvalidArgument("table rows must be finite with equal width"));
        }
        Ok(Self { times, values })
    }
}

impl ReferenceSignal for Tabulated {
    fn dim(&self) -> usize {
        self.values[0].dim()
    }

    fn eval(&self, t: f64) -> Vector {
        let last = self.times.len() - 1;
        if t <= self.times[0] {
            return self.values[0].clone();
        }
        if t >= self.times[last] {
            return self.values[last].clone();
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let w = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        Vector(
            self.values[k]
                .iter()
                .zip(self.values[k + 1].iter())
                .map(|(a, b)| a + w * (b - a))
                .collect(),
        )
    }

    fn describe(&self) -> String {
        format!("tabulated ({} samples)", self.times.len())
    }
}
