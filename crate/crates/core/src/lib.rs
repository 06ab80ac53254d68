//! Simulation and parameter estimation for ultrafast trapped-ion qubit
//! control: single-pulse rotation fidelities, spin-dependent-kick Ramsey
//! dynamics with thermal motion, light-shift-limited fidelities, and
//! recovery of trap and pulse parameters from fringe data.

pub mod constants;
pub mod error;
pub mod hyp;
pub mod mc;
pub mod pulse;
pub mod species;
pub mod spinmotion;
pub mod thermal;
pub mod trap;
pub mod units;

pub use error::{Error, Result};
pub use mc::MonteCarloEstimate;
pub use pulse::{Envelope, FieldConfig, MagicPoint, PulseParams};
pub use species::{IonSpecies, SpeciesTable};
pub use spinmotion::{RamseyConfig, Spin, SpinMotionState};
pub use thermal::BeamThermalConfig;
pub use trap::TrapParams;
pub use units::UnitPolicy;

pub mod lightshift;
pub mod ode;

pub use lightshift::LightshiftSetup;
pub use ode::DriveProfile;

pub mod dataset;
pub mod estimation;

pub use dataset::{FringeDataset, FringeRecord, RabiDataset, RabiRecord};
pub use estimation::{FeldmanCousinsBelt, FitResult, RabiFitContext, RabiInit, RevivalInit};
