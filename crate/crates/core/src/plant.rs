//! Parametric plant: motor power, event generation, per-application
//! workload, CPU capacity, CPU power and throughput.
//!
//! Every function here is pure. Model forms:
//!
//! * motor: `p_idle + c_lin * v + c_cube * v^3`
//! * event camera: `min(cap, base + gain * entropy * v)`
//! * workload: `events/s * cycles_per_event`
//! * capacity: `frequency * effective_ipc`
//! * throughput: `min(1, capacity / workload)`, 1 when there is no work
//! * CPU power: `k_static * V + k_switch * V^2 * f * max(u, u_floor)`

use serde::{Deserialize, Serialize};

use crate::controller::OperatingPoint;
use crate::error::{domain, invalid, Error, Result};

/// Sensor event-rate ceiling used when a scenario does not override it.
pub const DEFAULT_SENSOR_CAP_EPS: f64 = 1.0e7;

/// One DVFS operating level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DvfsLevel {
    pub frequency_hz: f64,
    pub voltage_v: f64,
}

/// DVFS levels sorted by strictly increasing frequency, voltage non-decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DvfsLevel>", into = "Vec<DvfsLevel>")]
pub struct DvfsTable {
    levels: Vec<DvfsLevel>,
}

impl DvfsTable {
    pub fn new(levels: Vec<DvfsLevel>) -> Result<Self> {
        if levels.is_empty() {
            return Err(invalid("DVFS table is empty"));
        }
        for (i, l) in levels.iter().enumerate() {
            if !(l.frequency_hz.is_finite() && l.frequency_hz > 0.0) {
                return Err(invalid(format!("DVFS level {i}: frequency must be > 0")));
            }
            if !(l.voltage_v.is_finite() && l.voltage_v > 0.0) {
                return Err(invalid(format!("DVFS level {i}: voltage must be > 0")));
            }
        }
        for (i, w) in levels.windows(2).enumerate() {
            if w[1].frequency_hz <= w[0].frequency_hz {
                return Err(invalid(format!(
                    "DVFS levels {i} and {}: frequencies must strictly increase",
                    i + 1
                )));
            }
            if w[1].voltage_v < w[0].voltage_v {
                return Err(invalid(format!(
                    "DVFS levels {i} and {}: voltage must not decrease with frequency",
                    i + 1
                )));
            }
        }
        Ok(Self { levels })
    }

    /// `n` frequencies log-spaced over `[f_min, f_max]` with voltage affine in
    /// frequency from `v_min` to `v_max`.
    pub fn log_spaced(n: usize, f_min: f64, f_max: f64, v_min: f64, v_max: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("DVFS table needs at least one level"));
        }
        if n == 1 {
            return Self::new(vec![DvfsLevel {
                frequency_hz: f_max,
                voltage_v: v_max,
            }]);
        }
        let ratio = f_max / f_min;
        let levels = (0..n)
            .map(|i| {
                let f = if i == n - 1 {
                    f_max
                } else {
                    f_min * ratio.powf(i as f64 / (n - 1) as f64)
                };
                let v = v_min + (v_max - v_min) * (f - f_min) / (f_max - f_min);
                DvfsLevel {
                    frequency_hz: f,
                    voltage_v: v,
                }
            })
            .collect();
        Self::new(levels)
    }

    pub fn levels(&self) -> &[DvfsLevel] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&DvfsLevel> {
        self.levels.get(index)
    }
}

impl Default for DvfsTable {
    /// 12 levels, 0.3 to 2.0 GHz log-spaced, 0.6 V to 1.1 V.
    fn default() -> Self {
        Self::log_spaced(12, 0.3e9, 2.0e9, 0.6, 1.1).expect("default DVFS table is valid")
    }
}

impl TryFrom<Vec<DvfsLevel>> for DvfsTable {
    type Error = Error;
    fn try_from(levels: Vec<DvfsLevel>) -> Result<Self> {
        Self::new(levels)
    }
}

impl From<DvfsTable> for Vec<DvfsLevel> {
    fn from(t: DvfsTable) -> Self {
        t.levels
    }
}

/// Motor speed set-points in m/s, strictly increasing and positive.
///
/// Motor voltage maps one-to-one onto steady-state speed, so the speed ladder
/// is the mechanical actuator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpeedLadder {
    speeds: Vec<f64>,
}

impl SpeedLadder {
    pub fn new(speeds: Vec<f64>) -> Result<Self> {
        if speeds.is_empty() {
            return Err(invalid("speed ladder is empty"));
        }
        if let Some(i) = speeds.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(invalid(format!("speed {i} must be > 0")));
        }
        if let Some(i) = speeds.windows(2).position(|w| w[1] <= w[0]) {
            return Err(invalid(format!(
                "speeds {i} and {}: ladder must strictly increase",
                i + 1
            )));
        }
        Ok(Self { speeds })
    }

    /// `n` speeds evenly spaced over `[min, max]`.
    pub fn linear(n: usize, min: f64, max: f64) -> Result<Self> {
        if n == 1 {
            return Self::new(vec![max]);
        }
        Self::new(
            (0..n)
                .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
                .collect(),
        )
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn len(&self) -> usize {
        self.speeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speeds.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.speeds.get(index).copied()
    }
}

impl Default for SpeedLadder {
    /// 10 speeds, 0.5 to 5.0 m/s.
    fn default() -> Self {
        Self::linear(10, 0.5, 5.0).expect("default speed ladder is valid")
    }
}

impl TryFrom<Vec<f64>> for SpeedLadder {
    type Error = Error;
    fn try_from(speeds: Vec<f64>) -> Result<Self> {
        Self::new(speeds)
    }
}

impl From<SpeedLadder> for Vec<f64> {
    fn from(l: SpeedLadder) -> Self {
        l.speeds
    }
}

/// `p_idle + c_lin * v + c_cube * v^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotorModelParams {
    pub idle_w: f64,
    pub lin_w_per_mps: f64,
    pub cube_w_per_mps3: f64,
}

impl MotorModelParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.idle_w, self.lin_w_per_mps, self.cube_w_per_mps3];
        if all.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(invalid("motor parameters must be finite and >= 0"));
        }
        if self.lin_w_per_mps <= 0.0 && self.cube_w_per_mps3 <= 0.0 {
            return Err(invalid(
                "motor model needs a positive linear or cubic coefficient",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpuModelParams {
    /// Leakage power per volt of supply.
    pub static_w_per_v: f64,
    /// Switched energy per cycle per volt squared.
    pub switch_j_per_v2_cycle: f64,
    /// Utilization the dynamic term never drops below (OS background work).
    pub idle_utilization_floor: f64,
}

impl CpuModelParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.static_w_per_v,
            self.switch_j_per_v2_cycle,
            self.idle_utilization_floor,
        ];
        if all.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(invalid("CPU parameters must be finite and >= 0"));
        }
        if self.idle_utilization_floor >= 1.0 {
            return Err(invalid("idle utilization floor must be < 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventModelParams {
    pub base_rate_eps: f64,
    pub gain_eps_per_entropy_mps: f64,
    #[serde(default = "default_sensor_cap")]
    pub sensor_cap_eps: f64,
}

fn default_sensor_cap() -> f64 {
    DEFAULT_SENSOR_CAP_EPS
}

impl EventModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_rate_eps.is_finite() && self.base_rate_eps >= 0.0) {
            return Err(invalid("event base rate must be >= 0"));
        }
        if !(self.gain_eps_per_entropy_mps.is_finite() && self.gain_eps_per_entropy_mps > 0.0) {
            return Err(invalid("event gain must be > 0"));
        }
        if !(self.sensor_cap_eps > 0.0) {
            return Err(invalid("sensor cap must be > 0"));
        }
        Ok(())
    }
}

/// Workload intensity and throughput requirement of one vision application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppProfile {
    pub name: String,
    pub cycles_per_event: f64,
    pub required_throughput: f64,
}

impl AppProfile {
    pub fn new(name: impl Into<String>, cycles_per_event: f64, required_throughput: f64) -> Result<Self> {
        let app = Self {
            name: name.into(),
            cycles_per_event,
            required_throughput,
        };
        app.validate()?;
        Ok(app)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cycles_per_event.is_finite() && self.cycles_per_event > 0.0) {
            return Err(invalid(format!(
                "app {}: cycles_per_event must be > 0",
                self.name
            )));
        }
        if !(self.required_throughput > 0.0 && self.required_throughput <= 1.0) {
            return Err(invalid(format!(
                "app {}: required_throughput must lie in (0, 1]",
                self.name
            )));
        }
        Ok(())
    }

    /// Shortfall of `achieved` below the requirement, never negative.
    pub fn throughput_error(&self, achieved: f64) -> f64 {
        (self.required_throughput - achieved).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub length_m: f64,
    pub entropy: f64,
}

/// A route as consecutive constant-entropy segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentProfile {
    pub name: String,
    pub segments: Vec<Segment>,
}

impl EnvironmentProfile {
    pub fn new(name: impl Into<String>, segments: Vec<Segment>) -> Result<Self> {
        let env = Self {
            name: name.into(),
            segments,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn single(name: impl Into<String>, length_m: f64, entropy: f64) -> Result<Self> {
        Self::new(name, vec![Segment { length_m, entropy }])
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(invalid(format!("environment {}: no segments", self.name)));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.length_m.is_finite() && s.length_m > 0.0) {
                return Err(invalid(format!(
                    "environment {}: segment {i} length must be > 0",
                    self.name
                )));
            }
            if !(s.entropy.is_finite() && s.entropy >= 0.0) {
                return Err(invalid(format!(
                    "environment {}: segment {i} entropy must be >= 0",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length_m).sum()
    }

    /// Index of the segment containing `position`; positions past the end map
    /// to the last segment.
    pub fn segment_index_at(&self, position: f64) -> usize {
        let mut end = 0.0;
        for (i, s) in self.segments.iter().enumerate() {
            end += s.length_m;
            if position < end {
                return i;
            }
        }
        self.segments.len() - 1
    }

    pub fn entropy_at(&self, position: f64) -> f64 {
        self.segments[self.segment_index_at(position)].entropy
    }
}

/// All plant calibration constants plus the two actuator tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantModels {
    pub motor: MotorModelParams,
    pub cpu: CpuModelParams,
    pub events: EventModelParams,
    /// Cycles retired per clock across the allocated cluster.
    pub effective_ipc: f64,
    pub dvfs: DvfsTable,
    #[serde(rename = "speeds_mps")]
    pub speeds: SpeedLadder,
}

impl Default for PlantModels {
    /// Small wheeled robot with an embedded multicore CPU; see the README
    /// for how these constants were chosen.
    fn default() -> Self {
        Self {
            motor: MotorModelParams {
                idle_w: 1.6,
                lin_w_per_mps: 0.22,
                cube_w_per_mps3: 0.315,
            },
            cpu: CpuModelParams {
                static_w_per_v: 2.3,
                switch_j_per_v2_cycle: 2.25e-9,
                idle_utilization_floor: 0.1,
            },
            events: EventModelParams {
                base_rate_eps: 1.7e6,
                gain_eps_per_entropy_mps: 2.2e5,
                sensor_cap_eps: DEFAULT_SENSOR_CAP_EPS,
            },
            effective_ipc: 2.0,
            dvfs: DvfsTable::default(),
            speeds: SpeedLadder::default(),
        }
    }
}

/// Everything the plant produces at one operating point and entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState {
    pub speed_mps: f64,
    pub event_rate_eps: f64,
    pub workload_cps: f64,
    pub capacity_cps: f64,
    pub throughput: f64,
    pub utilization: f64,
    pub p_motor_w: f64,
    pub p_cpu_w: f64,
}

impl PlantState {
    pub fn p_total_w(&self) -> f64 {
        self.p_motor_w + self.p_cpu_w
    }
}

impl PlantModels {
    pub fn validate(&self) -> Result<()> {
        self.motor.validate()?;
        self.cpu.validate()?;
        self.events.validate()?;
        if !(self.effective_ipc.is_finite() && self.effective_ipc > 0.0) {
            return Err(invalid("effective_ipc must be > 0"));
        }
        Ok(())
    }

    pub fn grid_size(&self) -> usize {
        self.dvfs.len() * self.speeds.len()
    }

    pub fn contains(&self, op: OperatingPoint) -> bool {
        op.dvfs_index < self.dvfs.len() && op.speed_index < self.speeds.len()
    }

    pub fn speed_of(&self, op: OperatingPoint) -> Result<f64> {
        self.speeds
            .get(op.speed_index)
            .ok_or_else(|| domain(format!("speed index {} out of range", op.speed_index)))
    }

    pub fn level_of(&self, op: OperatingPoint) -> Result<&DvfsLevel> {
        self.dvfs
            .get(op.dvfs_index)
            .ok_or_else(|| domain(format!("DVFS index {} out of range", op.dvfs_index)))
    }

    /// Steady-state plant response at `op` in an environment of `entropy`.
    pub fn evaluate(&self, op: OperatingPoint, entropy: f64, app: &AppProfile) -> Result<PlantState> {
        let speed = self.speed_of(op)?;
        let level = self.level_of(op)?;
        let rate = event_rate(entropy, speed, &self.events)?;
        let work = workload(rate, app)?;
        let capacity = cpu_capacity(level, self.effective_ipc)?;
        let thr = throughput(work, capacity)?;
        let u = utilization(work, capacity)?;
        Ok(PlantState {
            speed_mps: speed,
            event_rate_eps: rate,
            workload_cps: work,
            capacity_cps: capacity,
            throughput: thr,
            utilization: u,
            p_motor_w: motor_power(speed, &self.motor)?,
            p_cpu_w: cpu_power(level, u, &self.cpu)?,
        })
    }
}

/// Electrical power drawn by the drive at steady speed.
pub fn motor_power(speed: f64, params: &MotorModelParams) -> Result<f64> {
    if !(speed >= 0.0) {
        return Err(domain(format!("motor speed {speed} must be >= 0")));
    }
    Ok(params.idle_w + params.lin_w_per_mps * speed + params.cube_w_per_mps3 * speed.powi(3))
}

/// Mean event rate of the camera, saturating at the sensor cap.
pub fn event_rate(entropy: f64, speed: f64, params: &EventModelParams) -> Result<f64> {
    if !(entropy >= 0.0) {
        return Err(domain(format!("entropy {entropy} must be >= 0")));
    }
    if !(speed >= 0.0) {
        return Err(domain(format!("speed {speed} must be >= 0")));
    }
    let rate = params.base_rate_eps + params.gain_eps_per_entropy_mps * entropy * speed;
    Ok(rate.min(params.sensor_cap_eps))
}

/// CPU demand in cycles per second.
pub fn workload(event_rate: f64, app: &AppProfile) -> Result<f64> {
    if !(event_rate >= 0.0) {
        return Err(domain(format!("event rate {event_rate} must be >= 0")));
    }
    Ok(event_rate * app.cycles_per_event)
}

pub fn cpu_capacity(level: &DvfsLevel, effective_ipc: f64) -> Result<f64> {
    if !(effective_ipc > 0.0) {
        return Err(domain(format!("effective IPC {effective_ipc} must be > 0")));
    }
    Ok(level.frequency_hz * effective_ipc)
}

/// Fraction of the demanded work that gets processed, saturating at 1.
pub fn throughput(workload: f64, capacity: f64) -> Result<f64> {
    if !(capacity > 0.0) {
        return Err(domain(format!("capacity {capacity} must be > 0")));
    }
    if !(workload >= 0.0) {
        return Err(domain(format!("workload {workload} must be >= 0")));
    }
    if workload <= capacity {
        Ok(1.0)
    } else {
        Ok(capacity / workload)
    }
}

/// Busy fraction of the CPU, `min(1, workload / capacity)`.
pub fn utilization(workload: f64, capacity: f64) -> Result<f64> {
    if !(capacity > 0.0) {
        return Err(domain(format!("capacity {capacity} must be > 0")));
    }
    if !(workload >= 0.0) {
        return Err(domain(format!("workload {workload} must be >= 0")));
    }
    Ok((workload / capacity).min(1.0))
}

pub fn cpu_power(level: &DvfsLevel, utilization: f64, params: &CpuModelParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&utilization) {
        return Err(domain(format!("utilization {utilization} outside [0, 1]")));
    }
    let v = level.voltage_v;
    let active = utilization.max(params.idle_utilization_floor);
    Ok(params.static_w_per_v * v + params.switch_j_per_v2_cycle * v * v * level.frequency_hz * active)
}
