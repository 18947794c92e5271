//! Performance management: run-time hill climbing over the joint
//! (DVFS level, motor speed) grid.
//!
//! The climb is triggered whenever the measured scene entropy drifts more
//! than `entropy_threshold` away from the value the last climb ran under.
//! Each climb is an iterated best-improvement search: every neighbor of the
//! current point is applied, left to settle, and scored by its energy per
//! meter; a neighbor is accepted when it beats the running best by more than
//! the energy threshold and loses no throughput. The climb ends when a full
//! neighbor sweep accepts nothing.
//!
//! [`climb`] is the same search as a pure function over an evaluation
//! callback; [`Controller::on_tick`] runs it as a resumable state machine
//! driven by the simulator clock.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::energy::locomotion_cost;
use crate::error::{invalid, Error, Result};
use crate::plant::{PlantModels, SpeedLadder};

/// Joint actuation: an index into the DVFS table and one into the speed ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub dvfs_index: usize,
    pub speed_index: usize,
}

impl OperatingPoint {
    pub const fn new(dvfs_index: usize, speed_index: usize) -> Self {
        Self {
            dvfs_index,
            speed_index,
        }
    }
}

impl fmt::Display for OperatingPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.dvfs_index, self.speed_index)
    }
}

/// Dimensions of the actuation grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridShape {
    pub dvfs_levels: usize,
    pub speed_levels: usize,
}

impl GridShape {
    pub fn new(dvfs_levels: usize, speed_levels: usize) -> Self {
        Self {
            dvfs_levels,
            speed_levels,
        }
    }

    pub fn of(models: &PlantModels) -> Self {
        Self::new(models.dvfs.len(), models.speeds.len())
    }

    pub fn size(&self) -> usize {
        self.dvfs_levels * self.speed_levels
    }

    pub fn contains(&self, p: OperatingPoint) -> bool {
        p.dvfs_index < self.dvfs_levels && p.speed_index < self.speed_levels
    }

    /// All points in ascending `(dvfs_index, speed_index)` order.
    pub fn points(&self) -> impl Iterator<Item = OperatingPoint> + '_ {
        (0..self.dvfs_levels)
            .flat_map(move |d| (0..self.speed_levels).map(move |s| OperatingPoint::new(d, s)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Neighborhood {
    /// Manhattan distance 1.
    VonNeumann4,
    /// Chebyshev distance 1.
    #[default]
    Moore8,
}

impl Neighborhood {
    pub fn max_size(&self) -> usize {
        match self {
            Neighborhood::VonNeumann4 => 4,
            Neighborhood::Moore8 => 8,
        }
    }
}

/// Acceptance margin: a candidate is accepted when `E_new - E < margin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyThreshold {
    /// Fraction of the running best cost.
    Relative(f64),
    /// Absolute margin in J/m.
    Absolute(f64),
}

impl EnergyThreshold {
    pub fn margin(&self, best_cost: f64) -> f64 {
        match *self {
            EnergyThreshold::Relative(r) => r * best_cost,
            EnergyThreshold::Absolute(a) => a,
        }
    }

    /// Whether `cost` replaces `best_cost`. An infinite best (nothing
    /// feasible seen yet) is beaten by any finite cost.
    pub fn accepts(&self, cost: f64, best_cost: f64) -> bool {
        if best_cost.is_infinite() {
            return cost.is_finite();
        }
        cost - best_cost < self.margin(best_cost)
    }
}

impl Default for EnergyThreshold {
    fn default() -> Self {
        EnergyThreshold::Relative(-0.01)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerParams {
    pub entropy_threshold: f64,
    #[serde(default)]
    pub energy_threshold: EnergyThreshold,
    pub settle_time_s: f64,
    #[serde(default)]
    pub neighborhood: Neighborhood,
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self {
            entropy_threshold: 0.25,
            energy_threshold: EnergyThreshold::default(),
            settle_time_s: 0.05,
            neighborhood: Neighborhood::Moore8,
        }
    }
}

impl ControllerParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.entropy_threshold.is_finite() && self.entropy_threshold >= 0.0) {
            return Err(invalid("entropy threshold must be >= 0"));
        }
        if !(self.settle_time_s.is_finite() && self.settle_time_s > 0.0) {
            return Err(invalid("settle time must be > 0"));
        }
        let e = match self.energy_threshold {
            EnergyThreshold::Relative(r) => r,
            EnergyThreshold::Absolute(a) => a,
        };
        if !e.is_finite() {
            return Err(invalid("energy threshold must be finite"));
        }
        Ok(())
    }
}

/// Conservative starting corner: highest DVFS level, lowest speed.
pub fn initialize(shape: GridShape) -> OperatingPoint {
    OperatingPoint::new(shape.dvfs_levels.saturating_sub(1), 0)
}

/// Grid neighbors of `p`, clipped to bounds, in ascending order.
pub fn neighbors(p: OperatingPoint, shape: GridShape, neighborhood: Neighborhood) -> Vec<OperatingPoint> {
    let mut out = Vec::with_capacity(neighborhood.max_size());
    for dd in -1i64..=1 {
        for ds in -1i64..=1 {
            if dd == 0 && ds == 0 {
                continue;
            }
            if neighborhood == Neighborhood::VonNeumann4 && dd != 0 && ds != 0 {
                continue;
            }
            let d = p.dvfs_index as i64 + dd;
            let s = p.speed_index as i64 + ds;
            if d < 0 || s < 0 {
                continue;
            }
            let q = OperatingPoint::new(d as usize, s as usize);
            if shape.contains(q) {
                out.push(q);
            }
        }
    }
    out
}

/// Fixed-configuration reference policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Baseline {
    /// Highest speed, highest DVFS level.
    Hs,
    /// Median speed, highest DVFS level.
    As,
    /// Median speed, median DVFS level.
    AsStar,
}

impl Baseline {
    pub const ALL: [Baseline; 3] = [Baseline::Hs, Baseline::As, Baseline::AsStar];

    pub fn label(&self) -> &'static str {
        match self {
            Baseline::Hs => "HS",
            Baseline::As => "AS",
            Baseline::AsStar => "AS_star",
        }
    }
}

/// Operating point of a baseline; "medium" is index `floor(n / 2)`.
pub fn baseline_config(kind: Baseline, shape: GridShape) -> OperatingPoint {
    let max_d = shape.dvfs_levels.saturating_sub(1);
    let max_s = shape.speed_levels.saturating_sub(1);
    let mid_d = shape.dvfs_levels / 2;
    let mid_s = shape.speed_levels / 2;
    match kind {
        Baseline::Hs => OperatingPoint::new(max_d, max_s),
        Baseline::As => OperatingPoint::new(max_d, mid_s),
        Baseline::AsStar => OperatingPoint::new(mid_d, mid_s),
    }
}

/// Score of one configuration under frozen conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// Energy per meter.
    pub cost: f64,
    /// No throughput error.
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClimbOutcome {
    pub point: OperatingPoint,
    pub cost: f64,
    pub feasible: bool,
    /// Neighbor evaluations, not counting the start point.
    pub evaluations: usize,
    /// Accepted moves, i.e. `path.len() - 1`.
    pub moves: usize,
    pub path: Vec<OperatingPoint>,
}

/// Iterated best-improvement search from `start`.
///
/// Each iteration evaluates every neighbor of the current point against the
/// running best and moves to the best accepted one; it stops when an
/// iteration accepts nothing. If neither the start nor any point reached is
/// feasible the start is returned with `feasible == false`.
pub fn climb<F>(
    start: OperatingPoint,
    shape: GridShape,
    neighborhood: Neighborhood,
    threshold: EnergyThreshold,
    mut evaluate: F,
) -> ClimbOutcome
where
    F: FnMut(OperatingPoint) -> Evaluation,
{
    let first = evaluate(start);
    let mut current = start;
    let mut best_cost = if first.feasible { first.cost } else { f64::INFINITY };
    let mut evaluations = 0;
    let mut path = vec![start];
    // A positive margin accepts worsening moves; cap iterations so it
    // cannot cycle forever.
    for _ in 0..shape.size() {
        let mut best = current;
        for n in neighbors(current, shape, neighborhood) {
            let e = evaluate(n);
            evaluations += 1;
            if e.feasible && threshold.accepts(e.cost, best_cost) {
                best = n;
                best_cost = e.cost;
            }
        }
        if best == current {
            break;
        }
        current = best;
        path.push(current);
    }
    ClimbOutcome {
        point: current,
        cost: best_cost,
        feasible: best_cost.is_finite(),
        evaluations,
        moves: path.len() - 1,
        path,
    }
}

/// One feedback sample for the controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurements {
    pub p_cpu_w: f64,
    pub p_motor_w: f64,
    /// `max(0, required - achieved)` throughput.
    pub throughput_error: f64,
    pub entropy: f64,
}

impl Measurements {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("p_cpu", self.p_cpu_w),
            ("p_motor", self.p_motor_w),
            ("throughput_error", self.throughput_error),
            ("entropy", self.entropy),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidMeasurement(format!("{name} = {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionEvent {
    /// Entropy moved past the threshold; a climb starts.
    Trigger,
    /// A candidate was scored after settling.
    Probe,
    /// The climb moved its center.
    Move,
    /// Nothing around the start was feasible; climbing again from the
    /// conservative corner.
    Restart,
    /// A sweep accepted nothing; the center is final.
    Converged,
    /// No feasible configuration exists; parked at the conservative corner.
    Degraded,
}

impl DecisionEvent {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecisionEvent::Trigger => "trigger",
            DecisionEvent::Probe => "probe",
            DecisionEvent::Move => "move",
            DecisionEvent::Restart => "restart",
            DecisionEvent::Converged => "converged",
            DecisionEvent::Degraded => "degraded",
        }
    }
}

/// One controller log record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub time_s: f64,
    pub event: DecisionEvent,
    pub from: OperatingPoint,
    pub to: OperatingPoint,
    pub cost: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
struct Probe {
    point: OperatingPoint,
    applied_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClimbProgress {
    pub center: OperatingPoint,
    pub best: OperatingPoint,
    pub best_cost: f64,
    pub pending: VecDeque<OperatingPoint>,
    pub evaluations: usize,
    pub moves: usize,
    probe: Option<Probe>,
    scoring_center: bool,
    restarted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Phase {
    Idle,
    Climbing(ClimbProgress),
    Done,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    /// Last settled actuation.
    pub current: OperatingPoint,
    /// Cost of `current` when the last climb finished.
    pub best_cost: f64,
    /// Entropy the last climb ran under.
    pub tracked_entropy: f64,
    pub phase: Phase,
    /// Set when no configuration could meet the throughput requirement.
    pub degraded: bool,
}

/// Output of one controller tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Tick {
    pub actuation: OperatingPoint,
    pub decisions: Vec<Decision>,
}

// Float slack when comparing elapsed settle time against the target.
const CLOCK_EPS: f64 = 1e-9;

/// Run-time controller bound to one plant's actuation grid.
#[derive(Debug, Clone)]
pub struct Controller {
    params: ControllerParams,
    shape: GridShape,
    speeds: SpeedLadder,
    state: ControllerState,
}

impl Controller {
    pub fn new(params: ControllerParams, models: &PlantModels) -> Result<Self> {
        params.validate()?;
        let shape = GridShape::of(models);
        Ok(Self {
            params,
            shape,
            speeds: models.speeds.clone(),
            state: ControllerState {
                current: initialize(shape),
                best_cost: f64::INFINITY,
                tracked_entropy: 0.0,
                phase: Phase::Idle,
                degraded: false,
            },
        })
    }

    pub fn params(&self) -> &ControllerParams {
        &self.params
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn state(&self) -> &ControllerState {
        &self.state
    }

    pub fn is_climbing(&self) -> bool {
        matches!(self.state.phase, Phase::Climbing(_))
    }

    fn cost_at(&self, p: OperatingPoint, m: &Measurements) -> f64 {
        let v = self.speeds.speeds()[p.speed_index];
        locomotion_cost(m.p_cpu_w + m.p_motor_w, v).unwrap_or(f64::INFINITY)
    }

    /// Advances the controller by one tick.
    ///
    /// `m` must describe the plant as it ran during this tick, i.e. under the
    /// actuation returned by the previous call. Invalid measurements are
    /// rejected without touching the state.
    pub fn on_tick(&mut self, m: &Measurements, clock: f64) -> Result<Tick> {
        m.validate()?;
        let mut log = Vec::new();
        let phase = std::mem::replace(&mut self.state.phase, Phase::Idle);
        let actuation = match phase {
            Phase::Idle => {
                if (self.state.tracked_entropy - m.entropy).abs() > self.params.entropy_threshold {
                    self.state.tracked_entropy = m.entropy;
                    let current = self.state.current;
                    let feasible = m.throughput_error == 0.0;
                    let cost = if feasible {
                        self.cost_at(current, m)
                    } else {
                        f64::INFINITY
                    };
                    log.push(Decision {
                        time_s: clock,
                        event: DecisionEvent::Trigger,
                        from: current,
                        to: current,
                        cost,
                        feasible,
                    });
                    let progress = ClimbProgress {
                        center: current,
                        best: current,
                        best_cost: cost,
                        pending: neighbors(current, self.shape, self.params.neighborhood).into(),
                        evaluations: 0,
                        moves: 0,
                        probe: None,
                        scoring_center: false,
                        restarted: false,
                    };
                    self.step_climb(progress, m, clock, &mut log)
                } else {
                    self.state.current
                }
            }
            Phase::Climbing(progress) => self.step_climb(progress, m, clock, &mut log),
            Phase::Done => self.state.current,
        };
        Ok(Tick {
            actuation,
            decisions: log,
        })
    }

    fn step_climb(
        &mut self,
        mut c: ClimbProgress,
        m: &Measurements,
        clock: f64,
        log: &mut Vec<Decision>,
    ) -> OperatingPoint {
        if let Some(probe) = c.probe.as_mut() {
            let applied_at = *probe.applied_at.get_or_insert(clock);
            if clock - applied_at + CLOCK_EPS < self.params.settle_time_s {
                let p = probe.point;
                self.state.phase = Phase::Climbing(c);
                return p;
            }
            let point = probe.point;
            c.probe = None;
            c.evaluations += 1;
            let feasible = m.throughput_error == 0.0;
            let cost = self.cost_at(point, m);
            log.push(Decision {
                time_s: clock,
                event: DecisionEvent::Probe,
                from: c.center,
                to: point,
                cost,
                feasible,
            });
            if c.scoring_center {
                c.scoring_center = false;
                c.best_cost = if feasible { cost } else { f64::INFINITY };
                c.pending = neighbors(c.center, self.shape, self.params.neighborhood).into();
            } else if feasible && self.params.energy_threshold.accepts(cost, c.best_cost) {
                c.best = point;
                c.best_cost = cost;
            }
        }

        loop {
            if let Some(next) = c.pending.pop_front() {
                c.probe = Some(Probe {
                    point: next,
                    applied_at: None,
                });
                self.state.phase = Phase::Climbing(c);
                return next;
            }
            // A full sweep is done.
            if c.best != c.center && c.moves < self.shape.size() {
                log.push(Decision {
                    time_s: clock,
                    event: DecisionEvent::Move,
                    from: c.center,
                    to: c.best,
                    cost: c.best_cost,
                    feasible: true,
                });
                c.center = c.best;
                c.moves += 1;
                c.pending = neighbors(c.center, self.shape, self.params.neighborhood).into();
                continue;
            }
            if c.best_cost.is_finite() {
                self.state.current = c.best;
                self.state.best_cost = c.best_cost;
                self.state.degraded = false;
                log.push(Decision {
                    time_s: clock,
                    event: DecisionEvent::Converged,
                    from: c.center,
                    to: c.best,
                    cost: c.best_cost,
                    feasible: true,
                });
                self.state.phase = Phase::Done;
                return c.best;
            }
            let corner = initialize(self.shape);
            if !c.restarted && c.center != corner {
                log.push(Decision {
                    time_s: clock,
                    event: DecisionEvent::Restart,
                    from: c.center,
                    to: corner,
                    cost: f64::INFINITY,
                    feasible: false,
                });
                c.restarted = true;
                c.center = corner;
                c.best = corner;
                c.best_cost = f64::INFINITY;
                c.scoring_center = true;
                c.probe = Some(Probe {
                    point: corner,
                    applied_at: None,
                });
                self.state.phase = Phase::Climbing(c);
                return corner;
            }
            self.state.current = corner;
            self.state.best_cost = f64::INFINITY;
            self.state.degraded = true;
            log.push(Decision {
                time_s: clock,
                event: DecisionEvent::Degraded,
                from: c.center,
                to: corner,
                cost: f64::INFINITY,
                feasible: false,
            });
            self.state.phase = Phase::Done;
            return corner;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    const GRID: GridShape = GridShape {
        dvfs_levels: 12,
        speed_levels: 10,
    };

    #[test]
    fn initialize_picks_conservative_corner() {
        assert_eq!(initialize(GRID), OperatingPoint::new(11, 0));
        assert_eq!(initialize(GridShape::new(1, 1)), OperatingPoint::new(0, 0));
    }

    #[test]
    fn neighbor_counts() {
        let inner = OperatingPoint::new(5, 5);
        assert_eq!(neighbors(inner, GRID, Neighborhood::Moore8).len(), 8);
        assert_eq!(neighbors(inner, GRID, Neighborhood::VonNeumann4).len(), 4);
        let corner = OperatingPoint::new(0, 0);
        assert_eq!(neighbors(corner, GRID, Neighborhood::VonNeumann4).len(), 2);
        assert_eq!(neighbors(corner, GRID, Neighborhood::Moore8).len(), 3);
        assert!(neighbors(corner, GridShape::new(1, 1), Neighborhood::Moore8).is_empty());
    }

    #[test]
    fn neighbors_are_in_bounds_distinct_and_sorted() {
        for nb in [Neighborhood::Moore8, Neighborhood::VonNeumann4] {
            for p in GRID.points() {
                let ns = neighbors(p, GRID, nb);
                let set: HashSet<_> = ns.iter().copied().collect();
                assert_eq!(set.len(), ns.len());
                assert!(!set.contains(&p));
                assert!(ns.windows(2).all(|w| w[0] < w[1]));
                // brute force over the whole grid
                let expected: Vec<_> = GRID
                    .points()
                    .filter(|q| {
                        let dd = q.dvfs_index.abs_diff(p.dvfs_index);
                        let ds = q.speed_index.abs_diff(p.speed_index);
                        match nb {
                            Neighborhood::Moore8 => dd.max(ds) == 1,
                            Neighborhood::VonNeumann4 => dd + ds == 1,
                        }
                    })
                    .collect();
                assert_eq!(ns, expected);
            }
        }
    }

    #[test]
    fn baselines_on_default_grid() {
        assert_eq!(baseline_config(Baseline::Hs, GRID), OperatingPoint::new(11, 9));
        assert_eq!(baseline_config(Baseline::As, GRID), OperatingPoint::new(11, 5));
        assert_eq!(baseline_config(Baseline::AsStar, GRID), OperatingPoint::new(6, 5));
    }

    #[test]
    fn threshold_semantics() {
        let t = EnergyThreshold::Relative(-0.01);
        assert!(t.accepts(9.8, 10.0));
        assert!(!t.accepts(9.95, 10.0));
        assert!(t.accepts(100.0, f64::INFINITY));
        let zero = EnergyThreshold::Absolute(0.0);
        assert!(zero.accepts(9.999, 10.0));
        assert!(!zero.accepts(10.0, 10.0));
    }

    fn bowl(center: OperatingPoint) -> impl Fn(OperatingPoint) -> Evaluation {
        move |p| {
            let dd = p.dvfs_index as f64 - center.dvfs_index as f64;
            let ds = p.speed_index as f64 - center.speed_index as f64;
            Evaluation {
                cost: 10.0 + dd * dd + ds * ds,
                feasible: true,
            }
        }
    }

    #[test]
    fn climb_stays_at_optimal_start() {
        let start = OperatingPoint::new(4, 4);
        let out = climb(
            start,
            GRID,
            Neighborhood::Moore8,
            EnergyThreshold::default(),
            bowl(start),
        );
        assert_eq!(out.point, start);
        assert_eq!(out.moves, 0);
        assert_eq!(out.evaluations, 8);
    }

    #[test]
    fn climb_descends_monotone_corridor() {
        let shape = GridShape::new(1, 10);
        let eval = |p: OperatingPoint| Evaluation {
            cost: 100.0 - 5.0 * p.speed_index as f64,
            feasible: true,
        };
        let out = climb(
            OperatingPoint::new(0, 0),
            shape,
            Neighborhood::Moore8,
            EnergyThreshold::default(),
            eval,
        );
        assert_eq!(out.point, OperatingPoint::new(0, 9));
        assert_eq!(out.moves, 9);
    }

    #[test]
    fn climb_reports_infeasible_start() {
        let eval = |p: OperatingPoint| Evaluation {
            cost: 1.0,
            feasible: p == OperatingPoint::new(0, 0),
        };
        let start = OperatingPoint::new(6, 6);
        let out = climb(
            start,
            GRID,
            Neighborhood::Moore8,
            EnergyThreshold::default(),
            eval,
        );
        assert_eq!(out.point, start);
        assert!(!out.feasible);
    }

    #[test]
    fn climb_never_accepts_infeasible_points() {
        let eval = |p: OperatingPoint| Evaluation {
            cost: 100.0 - p.speed_index as f64 * 10.0 + p.dvfs_index as f64,
            feasible: p.speed_index <= 4,
        };
        let out = climb(
            OperatingPoint::new(11, 0),
            GRID,
            Neighborhood::Moore8,
            EnergyThreshold::default(),
            eval,
        );
        assert_eq!(out.point, OperatingPoint::new(0, 4));
        assert!(out.path.iter().all(|p| p.speed_index <= 4));
    }

    #[test]
    fn positive_threshold_terminates() {
        let out = climb(
            OperatingPoint::new(0, 0),
            GRID,
            Neighborhood::Moore8,
            EnergyThreshold::Absolute(1.0),
            |_| Evaluation {
                cost: 1.0,
                feasible: true,
            },
        );
        assert!(out.moves <= GRID.size());
        assert!(out.evaluations <= GRID.size() * 8);
    }

    fn meas(p_cpu: f64, p_motor: f64, err: f64, entropy: f64) -> Measurements {
        Measurements {
            p_cpu_w: p_cpu,
            p_motor_w: p_motor,
            throughput_error: err,
            entropy,
        }
    }

    #[test]
    fn rejects_negative_measurements_without_state_change() {
        let m = PlantModels::default();
        let mut c = Controller::new(ControllerParams::default(), &m).unwrap();
        let before = c.state().clone();
        assert!(matches!(
            c.on_tick(&meas(-1.0, 1.0, 0.0, 3.0), 0.0),
            Err(Error::InvalidMeasurement(_))
        ));
        assert!(c.on_tick(&meas(1.0, 1.0, 0.0, f64::NAN), 0.0).is_err());
        assert_eq!(c.state(), &before);
    }

    #[test]
    fn no_trigger_below_entropy_threshold() {
        let m = PlantModels::default();
        let mut c = Controller::new(ControllerParams::default(), &m).unwrap();
        for k in 0..1000 {
            let t = c.on_tick(&meas(5.0, 5.0, 0.0, 0.2), k as f64 * 1e-3).unwrap();
            assert_eq!(t.actuation, OperatingPoint::new(11, 0));
            assert!(t.decisions.is_empty());
        }
    }

    #[test]
    fn probe_waits_for_settle_time() {
        let m = PlantModels::default();
        let mut c = Controller::new(ControllerParams::default(), &m).unwrap();
        let dt = 1e-3;
        let first = c.on_tick(&meas(5.0, 5.0, 0.0, 3.0), 0.0).unwrap();
        assert_eq!(first.decisions[0].event, DecisionEvent::Trigger);
        let candidate = first.actuation;
        assert_ne!(candidate, OperatingPoint::new(11, 0));
        // candidate takes effect at tick 1; scored 50 ms later, at tick 51
        for k in 1..51 {
            let t = c.on_tick(&meas(5.0, 5.0, 0.0, 3.0), k as f64 * dt).unwrap();
            assert_eq!(t.actuation, candidate);
            assert!(t.decisions.is_empty(), "tick {k}");
        }
        let t = c.on_tick(&meas(5.0, 5.0, 0.0, 3.0), 51.0 * dt).unwrap();
        assert_eq!(t.decisions[0].event, DecisionEvent::Probe);
        assert_eq!(t.decisions[0].to, candidate);
    }
}
