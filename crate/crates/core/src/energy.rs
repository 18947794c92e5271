//! Mission energy accounting and the energy-per-meter (locomotion cost) metric.

use serde::{Deserialize, Serialize};

use crate::controller::OperatingPoint;
use crate::error::{domain, Error, Result};
use crate::plant::{AppProfile, PlantModels, Segment};

/// One simulator tick as seen by the energy accounting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub time_s: f64,
    pub position_m: f64,
    pub speed_mps: f64,
    pub dvfs_index: usize,
    pub speed_index: usize,
    pub p_motor_w: f64,
    pub p_cpu_w: f64,
    pub throughput: f64,
    pub entropy: f64,
    pub event_rate_eps: f64,
}

impl TraceSample {
    pub fn operating_point(&self) -> OperatingPoint {
        OperatingPoint::new(self.dvfs_index, self.speed_index)
    }
}

/// Totals for one mission or mission slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub e_total_j: f64,
    pub e_motor_j: f64,
    pub e_cpu_j: f64,
    pub duration_s: f64,
    pub distance_m: f64,
    pub j_per_m: f64,
    pub min_throughput: f64,
}

impl EnergyReport {
    fn from_parts(
        e_motor_j: f64,
        e_cpu_j: f64,
        duration_s: f64,
        distance_m: f64,
        min_throughput: f64,
    ) -> Result<Self> {
        if !(duration_s > 0.0) {
            return Err(Error::MalformedTrace(format!(
                "duration {duration_s} must be > 0"
            )));
        }
        if !(distance_m > 0.0) {
            return Err(Error::MalformedTrace(format!(
                "distance {distance_m} must be > 0"
            )));
        }
        let e_total_j = e_motor_j + e_cpu_j;
        Ok(Self {
            e_total_j,
            e_motor_j,
            e_cpu_j,
            duration_s,
            distance_m,
            j_per_m: e_total_j / distance_m,
            min_throughput,
        })
    }

    /// Report for consecutive mission slices, summed in slice order.
    pub fn concat(parts: &[EnergyReport]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::MalformedTrace("no reports to concatenate".into()));
        }
        let mut motor = 0.0;
        let mut cpu = 0.0;
        let mut duration = 0.0;
        let mut distance = 0.0;
        let mut min_thr = f64::INFINITY;
        for p in parts {
            motor += p.e_motor_j;
            cpu += p.e_cpu_j;
            duration += p.duration_s;
            distance += p.distance_m;
            min_thr = min_thr.min(p.min_throughput);
        }
        Self::from_parts(motor, cpu, duration, distance, min_thr)
    }
}

/// Trapezoidal integral of motor and CPU power over the trace.
pub fn integrate_energy(trace: &[TraceSample]) -> Result<EnergyReport> {
    if trace.len() < 2 {
        return Err(Error::MalformedTrace(format!(
            "need at least 2 samples, got {}",
            trace.len()
        )));
    }
    let mut e_motor = 0.0;
    let mut e_cpu = 0.0;
    let mut min_thr = f64::INFINITY;
    for w in trace.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dt = b.time_s - a.time_s;
        if !(dt > 0.0) {
            return Err(Error::MalformedTrace(format!(
                "time not strictly increasing at t = {}",
                b.time_s
            )));
        }
        e_motor += 0.5 * (a.p_motor_w + b.p_motor_w) * dt;
        e_cpu += 0.5 * (a.p_cpu_w + b.p_cpu_w) * dt;
    }
    for s in trace {
        min_thr = min_thr.min(s.throughput);
    }
    let first = &trace[0];
    let last = &trace[trace.len() - 1];
    EnergyReport::from_parts(
        e_motor,
        e_cpu,
        last.time_s - first.time_s,
        last.position_m - first.position_m,
        min_thr,
    )
}

/// Energy per meter at constant speed.
pub fn locomotion_cost(p_total_w: f64, speed_mps: f64) -> Result<f64> {
    if !(speed_mps > 0.0) {
        return Err(domain(format!("locomotion cost undefined at speed {speed_mps}")));
    }
    Ok(p_total_w / speed_mps)
}

/// Closed-form energy for crossing one constant-entropy segment at a fixed
/// operating point: the plant is in steady state, so `E = P * length / v`.
pub fn steady_state_mission_energy(
    op: OperatingPoint,
    segment: Segment,
    models: &PlantModels,
    app: &AppProfile,
) -> Result<EnergyReport> {
    if !(segment.length_m > 0.0) {
        return Err(domain(format!("segment length {} must be > 0", segment.length_m)));
    }
    let st = models.evaluate(op, segment.entropy, app)?;
    let duration = segment.length_m / st.speed_mps;
    EnergyReport::from_parts(
        st.p_motor_w * duration,
        st.p_cpu_w * duration,
        duration,
        segment.length_m,
        st.throughput,
    )
}
