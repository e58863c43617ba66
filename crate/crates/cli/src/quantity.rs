// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Scenario numbers with unit suffixes.
//!
//! A quantity is either a bare number (`0.9`) or a string of the form
//! `"<number> <unit>"` (`"200 THz"`, `"2.4 um"`, `"60 D"`). Frequencies are
//! ordinary (cycle) frequencies and convert to angular internally. Two
//! relative units tie values to the qubit transition: `w0` (multiples of the
//! transition angular frequency) and `lam0` (multiples of its free-space
//! wavelength). What a bare number means depends on the field: rate-like
//! fields read it as multiples of Gamma11, times as multiples of 1/Gamma11.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Unit {
    Bare,
    /// Cycle frequency with a multiplier to Hz.
    Hertz(f64),
    Second(f64),
    Meter(f64),
    Debye,
    /// Multiples of the transition angular frequency.
    OmegaRef,
    /// Multiples of the transition wavelength.
    LambdaRef,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

/// Resolved reference scales every relative unit hangs off.
#[derive(Debug, Clone, Copy)]
pub struct Units {
    /// Transition angular frequency (rad/s).
    pub omega0: f64,
    /// Self decay rate (rad/s), the scale of bare rate-like numbers.
    pub gamma11: f64,
}

impl Units {
    pub fn lam0(&self) -> f64 {
        2.0 * std::f64::consts::PI * entsim::constants::C0 / self.omega0
    }
}

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

impl Quantity {
    pub fn bare(value: f64) -> Self {
        Quantity { value, unit: Unit::Bare }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut it = s.split_whitespace();
        let num = it
            .next()
            .ok_or_else(|| CliError::validation("quantity: empty string"))?;
        let value: f64 = num
            .parse()
            .map_err(|_| CliError::Validation(format!("quantity: bad number in '{s}'")))?;
        let unit = match it.next() {
            None => Unit::Bare,
            Some(u) => unit_from_str(u)
                .ok_or_else(|| CliError::Validation(format!("quantity: unknown unit '{u}'")))?,
        };
        if it.next().is_some() {
            return Err(CliError::Validation(format!(
                "quantity: expected '<number> <unit>', got '{s}'"
            )));
        }
        Ok(Quantity { value, unit })
    }

    /// Angular frequency in rad/s for the reference quantities themselves;
    /// only absolute cycle-frequency units qualify.
    pub fn absolute_angular(&self) -> Result<f64> {
        match self.unit {
            Unit::Hertz(m) => Ok(TWO_PI * (self.value * m)),
            _ => Err(CliError::Validation(format!(
                "quantity: '{self}' must be an absolute frequency (Hz..THz)"
            ))),
        }
    }

    /// Angular frequency in rad/s; bare numbers are rejected.
    pub fn angular(&self, u: &Units) -> Result<f64> {
        match self.unit {
            Unit::Hertz(m) => Ok(TWO_PI * (self.value * m)),
            Unit::OmegaRef => Ok(self.value * u.omega0),
            Unit::Bare if self.value == 0.0 => Ok(0.0),
            _ => Err(CliError::Validation(format!(
                "quantity: '{self}' needs a frequency unit (Hz..THz or w0)"
            ))),
        }
    }

    /// Angular frequency where a bare number means multiples of Gamma11.
    pub fn angular_or_rate(&self, u: &Units) -> Result<f64> {
        match self.unit {
            Unit::Bare => Ok(self.value * u.gamma11),
            _ => self.angular(u),
        }
    }

    /// Time in seconds where a bare number means multiples of 1/Gamma11.
    pub fn time(&self, u: &Units) -> Result<f64> {
        match self.unit {
            Unit::Second(m) => Ok(self.value * m),
            Unit::Bare => Ok(self.value / u.gamma11),
            _ => Err(CliError::Validation(format!(
                "quantity: '{self}' is not a time"
            ))),
        }
    }

    pub fn length(&self, u: &Units) -> Result<f64> {
        match self.unit {
            Unit::Meter(m) => Ok(self.value * m),
            Unit::LambdaRef => Ok(self.value * u.lam0()),
            _ => Err(CliError::Validation(format!(
                "quantity: '{self}' is not a length"
            ))),
        }
    }

    /// Dipole moment in C m.
    pub fn dipole(&self) -> Result<f64> {
        match self.unit {
            Unit::Debye => Ok(self.value * entsim::constants::DEBYE),
            _ => Err(CliError::Validation(format!(
                "quantity: '{self}' is not a dipole moment (use D)"
            ))),
        }
    }

    pub fn ratio(&self) -> Result<f64> {
        match self.unit {
            Unit::Bare => Ok(self.value),
            _ => Err(CliError::Validation(format!(
                "quantity: '{self}' must be a bare ratio"
            ))),
        }
    }
}

fn unit_from_str(u: &str) -> Option<Unit> {
    Some(match u {
        "Hz" => Unit::Hertz(1.0),
        "kHz" => Unit::Hertz(1e3),
        "MHz" => Unit::Hertz(1e6),
        "GHz" => Unit::Hertz(1e9),
        "THz" => Unit::Hertz(1e12),
        "s" => Unit::Second(1.0),
        "ms" => Unit::Second(1e-3),
        "us" => Unit::Second(1e-6),
        "ns" => Unit::Second(1e-9),
        "ps" => Unit::Second(1e-12),
        "fs" => Unit::Second(1e-15),
        "m" => Unit::Meter(1.0),
        "mm" => Unit::Meter(1e-3),
        "um" => Unit::Meter(1e-6),
        "nm" => Unit::Meter(1e-9),
        "D" => Unit::Debye,
        "w0" => Unit::OmegaRef,
        "lam0" => Unit::LambdaRef,
        _ => return None,
    })
}

fn unit_suffix(u: Unit) -> &'static str {
    match u {
        Unit::Bare => "",
        Unit::Hertz(m) if m == 1.0 => " Hz",
        Unit::Hertz(m) if m == 1e3 => " kHz",
        Unit::Hertz(m) if m == 1e6 => " MHz",
        Unit::Hertz(m) if m == 1e9 => " GHz",
        Unit::Hertz(_) => " THz",
        Unit::Second(m) if m == 1.0 => " s",
        Unit::Second(m) if m == 1e-3 => " ms",
        Unit::Second(m) if m == 1e-6 => " us",
        Unit::Second(m) if m == 1e-9 => " ns",
        Unit::Second(m) if m == 1e-12 => " ps",
        Unit::Second(_) => " fs",
        Unit::Meter(m) if m == 1.0 => " m",
        Unit::Meter(m) if m == 1e-3 => " mm",
        Unit::Meter(m) if m == 1e-6 => " um",
        Unit::Meter(_) => " nm",
        Unit::Debye => " D",
        Unit::OmegaRef => " w0",
        Unit::LambdaRef => " lam0",
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.value, unit_suffix(self.unit))
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: Deserializer<'de>,
    {
        struct QuantityVisitor;

        impl Visitor<'_> for QuantityVisitor {
            type Value = Quantity;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a '<number> <unit>' string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Quantity, E> {
                Ok(Quantity::bare(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Quantity, E> {
                Ok(Quantity::bare(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Quantity, E> {
                Ok(Quantity::bare(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Quantity, E> {
                Quantity::parse(v).map_err(|e| E::custom(e.to_string()))
            }
        }

        deserializer.deserialize_any(QuantityVisitor)
    }
}
