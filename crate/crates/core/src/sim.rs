//! Discrete-time closed-loop simulation, configuration-space sweeps and
//! baseline comparison.

use serde::{Deserialize, Serialize};

use crate::controller::{
    baseline_config, initialize, Baseline, Controller, ControllerParams, Decision, GridShape, Measurements,
    OperatingPoint,
};
use crate::energy::{integrate_energy, steady_state_mission_energy, EnergyReport, TraceSample};
use crate::error::{invalid, Error, Result};
use crate::plant::{AppProfile, EnvironmentProfile, PlantModels, Segment};

/// Default simulation step.
pub const DEFAULT_DT_S: f64 = 1e-3;

// Slack on the end-of-mission test so that accumulated rounding in the
// position does not cost an extra tick.
const POSITION_EPS_M: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Controlled,
    Fixed(OperatingPoint),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt_s: f64,
    pub environment: EnvironmentProfile,
    pub app: AppProfile,
    pub models: PlantModels,
    pub controller: ControllerParams,
    pub mode: Mode,
    /// Tick budget; `None` derives one from the slowest speed.
    pub max_ticks: Option<u64>,
}

impl SimConfig {
    pub fn new(environment: EnvironmentProfile, app: AppProfile, models: PlantModels, mode: Mode) -> Self {
        Self {
            dt_s: DEFAULT_DT_S,
            environment,
            app,
            models,
            controller: ControllerParams::default(),
            mode,
            max_ticks: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.models.validate()?;
        self.app.validate()?;
        self.environment.validate()?;
        self.controller.validate()?;
        if !(self.dt_s.is_finite() && self.dt_s > 0.0) {
            return Err(invalid(format!("dt {} must be > 0", self.dt_s)));
        }
        if self.dt_s > self.controller.settle_time_s / 5.0 {
            return Err(invalid(format!(
                "dt {} exceeds a fifth of the settle time {}",
                self.dt_s, self.controller.settle_time_s
            )));
        }
        if let Mode::Fixed(op) = self.mode {
            if !self.models.contains(op) {
                return Err(invalid(format!("fixed operating point {op} is outside the grid")));
            }
        }
        Ok(())
    }

    /// Same mission at a different mode.
    pub fn with_mode(&self, mode: Mode) -> Self {
        Self { mode, ..self.clone() }
    }

    fn tick_budget(&self) -> u64 {
        self.max_ticks.unwrap_or_else(|| {
            let slowest = self.models.speeds.speeds()[0];
            let ticks = self.environment.total_length() / (slowest * self.dt_s);
            2 * ticks.ceil() as u64 + 1000
        })
    }
}

/// Energy of the part of the mission spent in one segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub segment_index: usize,
    pub report: EnergyReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionOutput {
    pub trace: Vec<TraceSample>,
    pub report: EnergyReport,
    pub decisions: Vec<Decision>,
    pub segments: Vec<SegmentReport>,
    /// Whether the controller ended in degraded mode.
    pub degraded: bool,
}

impl MissionOutput {
    /// Mean of the per-tick throughput.
    pub fn mean_throughput(&self) -> f64 {
        self.trace.iter().map(|s| s.throughput).sum::<f64>() / self.trace.len() as f64
    }

    /// Actuation in force at the end of the mission.
    pub fn final_point(&self) -> OperatingPoint {
        self.trace[self.trace.len() - 1].operating_point()
    }
}

/// Step-by-step mission runner. [`run_mission`] drives it to completion;
/// callers that need the partial trace after a timeout can drive it
/// themselves.
#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: SimConfig,
    controller: Option<Controller>,
    actuation: OperatingPoint,
    ticks: u64,
    position_m: f64,
    trace: Vec<TraceSample>,
    decisions: Vec<Decision>,
    finished: bool,
}

impl Simulator {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let (controller, actuation) = match cfg.mode {
            Mode::Controlled => {
                let c = Controller::new(cfg.controller, &cfg.models)?;
                let start = c.state().current;
                (Some(c), start)
            }
            Mode::Fixed(op) => (None, op),
        };
        Ok(Self {
            cfg,
            controller,
            actuation,
            ticks: 0,
            position_m: 0.0,
            trace: Vec::new(),
            decisions: Vec::new(),
            finished: false,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    pub fn trace(&self) -> &[TraceSample] {
        &self.trace
    }

    pub fn decisions(&self) -> &[Decision] {
        &self.decisions
    }

    pub fn controller(&self) -> Option<&Controller> {
        self.controller.as_ref()
    }

    /// Records one sample under the current actuation, lets the controller
    /// react, and advances the robot. Returns `false` once the mission is over.
    pub fn step(&mut self) -> Result<bool> {
        if self.finished {
            return Ok(false);
        }
        let cfg = &self.cfg;
        let time_s = self.ticks as f64 * cfg.dt_s;
        let entropy = cfg.environment.entropy_at(self.position_m);
        let op = self.actuation;
        let st = cfg.models.evaluate(op, entropy, &cfg.app)?;
        self.trace.push(TraceSample {
            time_s,
            position_m: self.position_m,
            speed_mps: st.speed_mps,
            dvfs_index: op.dvfs_index,
            speed_index: op.speed_index,
            p_motor_w: st.p_motor_w,
            p_cpu_w: st.p_cpu_w,
            throughput: st.throughput,
            entropy,
            event_rate_eps: st.event_rate_eps,
        });
        if let Some(c) = self.controller.as_mut() {
            let m = Measurements {
                p_cpu_w: st.p_cpu_w,
                p_motor_w: st.p_motor_w,
                throughput_error: cfg.app.throughput_error(st.throughput),
                entropy,
            };
            let tick = c.on_tick(&m, time_s)?;
            self.decisions.extend(tick.decisions);
            self.actuation = tick.actuation;
        }
        if self.position_m + POSITION_EPS_M >= cfg.environment.total_length() {
            self.finished = true;
            return Ok(false);
        }
        self.position_m += st.speed_mps * cfg.dt_s;
        self.ticks += 1;
        Ok(true)
    }

    /// Steps until the mission ends or the tick budget runs out.
    pub fn run(&mut self) -> Result<()> {
        let budget = self.cfg.tick_budget();
        while self.step()? {
            if self.ticks > budget {
                return Err(Error::Timeout {
                    ticks: self.ticks,
                    position_m: self.position_m,
                });
            }
        }
        Ok(())
    }

    /// Energy accounting of a finished mission.
    pub fn finish(self) -> Result<MissionOutput> {
        if !self.finished {
            return Err(Error::MalformedTrace("mission has not finished".into()));
        }
        let report = integrate_energy(&self.trace)?;
        let segments = segment_reports(&self.trace, &self.cfg.environment)?;
        let degraded = self.controller.as_ref().is_some_and(|c| c.state().degraded);
        Ok(MissionOutput {
            trace: self.trace,
            report,
            decisions: self.decisions,
            segments,
            degraded,
        })
    }
}

/// Runs one mission to completion.
pub fn run_mission(cfg: &SimConfig) -> Result<MissionOutput> {
    let mut sim = Simulator::new(cfg.clone())?;
    sim.run()?;
    sim.finish()
}

// Each segment owns the intervals starting at its samples, so the segment
// energies partition the mission total.
fn segment_reports(trace: &[TraceSample], env: &EnvironmentProfile) -> Result<Vec<SegmentReport>> {
    let mut starts: Vec<(usize, usize)> = Vec::new();
    for (i, s) in trace.iter().enumerate() {
        let seg = env.segment_index_at(s.position_m);
        if starts.last().is_none_or(|&(_, prev)| prev != seg) {
            starts.push((i, seg));
        }
    }
    let mut out = Vec::with_capacity(starts.len());
    for (k, &(begin, seg)) in starts.iter().enumerate() {
        let end = starts.get(k + 1).map_or(trace.len() - 1, |&(next, _)| next);
        if end > begin {
            out.push(SegmentReport {
                segment_index: seg,
                report: integrate_energy(&trace[begin..=end])?,
            });
        }
    }
    Ok(out)
}

/// One cell of a configuration-space sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub point: OperatingPoint,
    pub frequency_hz: f64,
    pub speed_mps: f64,
    pub throughput: f64,
    /// Trip energy, present only when the application's requirement is met.
    pub energy_j: Option<f64>,
}

impl SweepCell {
    pub fn feasible(&self) -> bool {
        self.energy_j.is_some()
    }
}

/// Steady-state throughput and trip energy over the whole actuation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub dvfs_levels: usize,
    pub speed_levels: usize,
    pub entropy: f64,
    pub distance_m: f64,
    /// Row-major in `(dvfs_index, speed_index)`.
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn shape(&self) -> GridShape {
        GridShape::new(self.dvfs_levels, self.speed_levels)
    }

    pub fn cell(&self, p: OperatingPoint) -> Option<&SweepCell> {
        if !self.shape().contains(p) {
            return None;
        }
        self.cells.get(p.dvfs_index * self.speed_levels + p.speed_index)
    }

    pub fn j_per_m(&self, p: OperatingPoint) -> Option<f64> {
        self.cell(p)?.energy_j.map(|e| e / self.distance_m)
    }

    pub fn feasible_points(&self) -> impl Iterator<Item = OperatingPoint> + '_ {
        self.cells.iter().filter(|c| c.feasible()).map(|c| c.point)
    }

    /// Feasible cell with the lowest energy; ties go to the lowest point.
    pub fn argmin(&self) -> Option<OperatingPoint> {
        self.cells
            .iter()
            .filter_map(|c| c.energy_j.map(|e| (e, c.point)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, p)| p)
    }
}

/// Exhaustive steady-state sweep of every grid cell.
pub fn sweep(entropy: f64, distance_m: f64, models: &PlantModels, app: &AppProfile) -> Result<SweepGrid> {
    models.validate()?;
    app.validate()?;
    let shape = GridShape::of(models);
    let segment = Segment {
        length_m: distance_m,
        entropy,
    };
    let cells = shape
        .points()
        .map(|p| sweep_cell(p, segment, models, app))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid {
        dvfs_levels: shape.dvfs_levels,
        speed_levels: shape.speed_levels,
        entropy,
        distance_m,
        cells,
    })
}

fn sweep_cell(
    p: OperatingPoint,
    segment: Segment,
    models: &PlantModels,
    app: &AppProfile,
) -> Result<SweepCell> {
    let st = models.evaluate(p, segment.entropy, app)?;
    let energy_j = if app.throughput_error(st.throughput) == 0.0 {
        Some(steady_state_mission_energy(p, segment, models, app)?.e_total_j)
    } else {
        None
    };
    Ok(SweepCell {
        point: p,
        frequency_hz: models.level_of(p)?.frequency_hz,
        speed_mps: st.speed_mps,
        throughput: st.throughput,
        energy_j,
    })
}

/// Lowest feasible DVFS level at one speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub speed_index: usize,
    pub speed_mps: f64,
    pub dvfs_index: usize,
    pub frequency_hz: f64,
    pub j_per_m: f64,
}

impl FrontierPoint {
    pub fn point(&self) -> OperatingPoint {
        OperatingPoint::new(self.dvfs_index, self.speed_index)
    }
}

/// Feasibility frontier, one point per speed that has any feasible cell.
pub fn frontier(grid: &SweepGrid) -> Vec<FrontierPoint> {
    (0..grid.speed_levels)
        .filter_map(|s| {
            (0..grid.dvfs_levels).find_map(|d| {
                let c = grid.cell(OperatingPoint::new(d, s))?;
                let e = c.energy_j?;
                Some(FrontierPoint {
                    speed_index: s,
                    speed_mps: c.speed_mps,
                    dvfs_index: d,
                    frequency_hz: c.frequency_hz,
                    j_per_m: e / grid.distance_m,
                })
            })
        })
        .collect()
}

/// Index of the cheapest frontier point.
pub fn frontier_argmin(points: &[FrontierPoint]) -> Option<usize> {
    (0..points.len()).min_by(|&a, &b| points[a].j_per_m.total_cmp(&points[b].j_per_m))
}

/// Run modes compared against each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CompareMode {
    Controlled,
    Baseline(Baseline),
}

impl CompareMode {
    pub const ALL: [CompareMode; 4] = [
        CompareMode::Controlled,
        CompareMode::Baseline(Baseline::Hs),
        CompareMode::Baseline(Baseline::As),
        CompareMode::Baseline(Baseline::AsStar),
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CompareMode::Controlled => "Controlled",
            CompareMode::Baseline(b) => b.label(),
        }
    }

    pub fn sim_mode(&self, shape: GridShape) -> Mode {
        match self {
            CompareMode::Controlled => Mode::Controlled,
            CompareMode::Baseline(b) => Mode::Fixed(baseline_config(*b, shape)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: CompareMode,
    pub final_point: OperatingPoint,
    pub report: EnergyReport,
    pub mean_throughput: f64,
    /// `1 - J/m(controlled) / J/m(this mode)`.
    pub savings: f64,
}

/// Runs the mission under every mode of [`CompareMode::ALL`].
pub fn compare(base: &SimConfig) -> Result<Vec<ModeSummary>> {
    let shape = GridShape::of(&base.models);
    let runs = CompareMode::ALL
        .iter()
        .map(|m| run_mission(&base.with_mode(m.sim_mode(shape))).map(|out| (*m, out)))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&runs))
}

/// Savings table from finished runs; the first run whose mode is
/// `Controlled` is the reference.
pub fn summarize(runs: &[(CompareMode, MissionOutput)]) -> Vec<ModeSummary> {
    let reference = runs
        .iter()
        .find(|(m, _)| *m == CompareMode::Controlled)
        .map(|(_, out)| out.report.j_per_m);
    runs.iter()
        .map(|(mode, out)| ModeSummary {
            mode: *mode,
            final_point: out.final_point(),
            report: out.report,
            mean_throughput: out.mean_throughput(),
            savings: reference.map_or(f64::NAN, |r| 1.0 - r / out.report.j_per_m),
        })
        .collect()
}

/// The starting corner of every controlled mission.
pub fn conservative_corner(models: &PlantModels) -> OperatingPoint {
    initialize(GridShape::of(models))
}
