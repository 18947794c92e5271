//! Joint CPU DVFS and motor-speed energy optimization for a mobile robot
//! whose vision workload grows with scene entropy and travel speed.
//!
//! - [`plant`]: motor, sensor-event and CPU models.
//! - [`energy`]: trace integration and energy per meter.
//! - [`controller`]: the run-time hill-climbing controller.
//! - [`sim`]: closed-loop missions, grid sweeps and baseline comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controller;
pub mod defaults;
pub mod energy;
pub mod error;
pub mod plant;
pub mod sim;

pub use controller::{
    baseline_config, climb, initialize, neighbors, Baseline, ClimbOutcome, Controller, ControllerParams,
    ControllerState, Decision, DecisionEvent, EnergyThreshold, Evaluation, GridShape, Measurements,
    Neighborhood, OperatingPoint, Phase, Tick,
};
pub use energy::{integrate_energy, locomotion_cost, steady_state_mission_energy, EnergyReport, TraceSample};
pub use error::{Error, Result};
pub use plant::{
    AppProfile, CpuModelParams, DvfsLevel, DvfsTable, EnvironmentProfile, EventModelParams, MotorModelParams,
    PlantModels, PlantState, Segment, SpeedLadder,
};
pub use sim::{
    compare, frontier, frontier_argmin, run_mission, summarize, sweep, CompareMode, FrontierPoint,
    MissionOutput, Mode, ModeSummary, SegmentReport, SimConfig, Simulator, SweepCell, SweepGrid,
};
