//! Experiment datasets and their CSV forms.
//!
//! Internals are SI (seconds, rad/s, joules); the CSV columns carry
//! human-scale units in their names (tau_us, detuning_hz, energy_nj) and
//! are converted at the boundary.

use crate::error::{Error, Result};
use crate::units::{angular_from_hz, hz_from_angular};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// One Ramsey fringe sample: P↑ measured at (wait time, detuning).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeRecord {
    /// Ramsey wait time (s)
    pub wait_time: f64,
    /// Qubit detuning δ (rad/s)
    pub detuning: f64,
    /// Measured upper-state probability
    pub p_up: f64,
    /// Number of repetitions behind the estimate
    pub repetitions: u32,
}

/// Fringe samples grouped by wait time on demand.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FringeDataset {
    pub records: Vec<FringeRecord>,
}

#[derive(Serialize, Deserialize)]
struct FringeRow {
    tau_us: f64,
    detuning_hz: f64,
    p_up: f64,
    repetitions: u32,
}

impl FringeDataset {
    pub fn validate(&self) -> Result<()> {
        if self.records.is_empty() {
            return Err(Error::domain("FringeDataset", "dataset is empty"));
        }
        for (i, r) in self.records.iter().enumerate() {
            if !(0.0..=1.0).contains(&r.p_up) {
                return Err(Error::domain("FringeDataset", format!("row {i}: p_up {} outside [0,1]", r.p_up)));
            }
            if r.repetitions < 1 {
                return Err(Error::domain("FringeDataset", format!("row {i}: repetitions must be >= 1")));
            }
            if !(r.wait_time >= 0.0) {
                return Err(Error::domain("FringeDataset", format!("row {i}: negative wait time")));
            }
        }
        Ok(())
    }

    /// Records grouped by wait time, preserving first-appearance order.
    pub fn groups(&self) -> Vec<(f64, Vec<FringeRecord>)> {
        let mut groups: Vec<(f64, Vec<FringeRecord>)> = Vec::new();
        for r in &self.records {
            match groups.iter_mut().find(|(tau, _)| *tau == r.wait_time) {
                Some((_, items)) => items.push(*r),
                None => groups.push((r.wait_time, vec![*r])),
            }
        }
        groups
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.records {
            w.serialize(FringeRow {
                tau_us: r.wait_time * 1e6,
                detuning_hz: hz_from_angular(r.detuning),
                p_up: r.p_up,
                repetitions: r.repetitions,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut records = Vec::new();
        for row in r.deserialize::<FringeRow>() {
            let row = row?;
            records.push(FringeRecord {
                wait_time: row.tau_us * 1e-6,
                detuning: angular_from_hz(row.detuning_hz),
                p_up: row.p_up,
                repetitions: row.repetitions,
            });
        }
        let dataset = FringeDataset { records };
        dataset.validate()?;
        Ok(dataset)
    }
}

/// One Rabi-curve sample: P↓ after a single pulse of the given energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiRecord {
    /// Pulse energy (J)
    pub energy: f64,
    /// Measured lower-state probability
    pub p_down: f64,
    pub repetitions: u32,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RabiDataset {
    pub records: Vec<RabiRecord>,
}

#[derive(Serialize, Deserialize)]
struct RabiRow {
    energy_nj: f64,
    p_down: f64,
    repetitions: u32,
}

impl RabiDataset {
    pub fn validate(&self) -> Result<()> {
        if self.records.is_empty() {
            return Err(Error::domain("RabiDataset", "dataset is empty"));
        }
        for (i, r) in self.records.iter().enumerate() {
            if !(0.0..=1.0).contains(&r.p_down) {
                return Err(Error::domain("RabiDataset", format!("row {i}: p_down {} outside [0,1]", r.p_down)));
            }
            if r.repetitions < 1 {
                return Err(Error::domain("RabiDataset", format!("row {i}: repetitions must be >= 1")));
            }
            if !(r.energy >= 0.0) {
                return Err(Error::domain("RabiDataset", format!("row {i}: negative energy")));
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.records {
            w.serialize(RabiRow { energy_nj: r.energy * 1e9, p_down: r.p_down, repetitions: r.repetitions })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(reader);
        let mut records = Vec::new();
        for row in rd.deserialize::<RabiRow>() {
            let row = row?;
            records.push(RabiRecord { energy: row.energy_nj * 1e-9, p_down: row.p_down, repetitions: row.repetitions });
        }
        let dataset = RabiDataset { records };
        dataset.validate()?;
        Ok(dataset)
    }
}
