use proptest::prelude::*;

use pmu_core::plant::{event_rate, throughput};
use pmu_core::{
    climb, frontier, initialize, sweep, AppProfile, CpuModelParams, EnergyThreshold, Evaluation,
    EventModelParams, GridShape, MotorModelParams, Neighborhood, OperatingPoint, PlantModels, SweepGrid,
};

fn models() -> impl Strategy<Value = PlantModels> {
    (
        (0.5f64..20.0, 0.0f64..3.0, 0.01f64..1.0),
        (1.0f64..20.0, 1e-10f64..1e-8, 0.0f64..0.3),
        (0.0f64..2e6, 1e4f64..1e6),
        1.0f64..4.0,
    )
        .prop_map(
            |((idle, lin, cube), (k_static, sw, floor), (base, gain), ipc)| PlantModels {
                motor: MotorModelParams {
                    idle_w: idle,
                    lin_w_per_mps: lin,
                    cube_w_per_mps3: cube,
                },
                cpu: CpuModelParams {
                    static_w_per_v: k_static,
                    switch_j_per_v2_cycle: sw,
                    idle_utilization_floor: floor,
                },
                events: EventModelParams {
                    base_rate_eps: base,
                    gain_eps_per_entropy_mps: gain,
                    sensor_cap_eps: 1e7,
                },
                effective_ipc: ipc,
                ..PlantModels::default()
            },
        )
}

fn app() -> impl Strategy<Value = AppProfile> {
    (100.0f64..2000.0).prop_map(|cpe| AppProfile::new("p", cpe, 1.0).unwrap())
}

fn feasible(g: &SweepGrid, d: usize, s: usize) -> bool {
    g.cell(OperatingPoint::new(d, s)).unwrap().feasible()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn event_rate_is_monotone(m in models(), h in 0.0f64..8.0, dh in 0.0f64..2.0, v in 0.1f64..6.0, dv in 0.0f64..2.0) {
        let r = event_rate(h, v, &m.events).unwrap();
        prop_assert!(event_rate(h + dh, v, &m.events).unwrap() >= r);
        prop_assert!(event_rate(h, v + dv, &m.events).unwrap() >= r);
    }

    #[test]
    fn throughput_falls_with_speed_and_rises_with_level(m in models(), a in app(), h in 0.0f64..8.0) {
        for s in 0..m.speeds.len() {
            for d in 0..m.dvfs.len() {
                let t = m.evaluate(OperatingPoint::new(d, s), h, &a).unwrap().throughput;
                prop_assert!((0.0..=1.0).contains(&t));
                if d + 1 < m.dvfs.len() {
                    prop_assert!(m.evaluate(OperatingPoint::new(d + 1, s), h, &a).unwrap().throughput >= t);
                }
                if s + 1 < m.speeds.len() {
                    prop_assert!(m.evaluate(OperatingPoint::new(d, s + 1), h, &a).unwrap().throughput <= t);
                }
            }
        }
    }

    #[test]
    fn throughput_is_one_exactly_when_capacity_covers_work(w in 0.0f64..1e10, c in 1.0f64..1e10) {
        let t = throughput(w, c).unwrap();
        prop_assert_eq!(t == 1.0, w <= c);
    }

    #[test]
    fn feasibility_is_staircase_closed(m in models(), a in app(), h in 0.0f64..8.0) {
        let g = sweep(h, 100.0, &m, &a).unwrap();
        for d in 0..g.dvfs_levels {
            for s in 0..g.speed_levels {
                if feasible(&g, d, s) {
                    for d2 in d..g.dvfs_levels {
                        for s2 in 0..=s {
                            prop_assert!(feasible(&g, d2, s2), "({d},{s}) feasible but ({d2},{s2}) not");
                        }
                    }
                }
            }
        }
        let f = frontier(&g);
        prop_assert!(f.windows(2).all(|w| w[0].dvfs_index <= w[1].dvfs_index));
        prop_assert!(f.windows(2).all(|w| w[0].speed_index < w[1].speed_index));
    }

    #[test]
    fn plateau_shrinks_as_entropy_grows(m in models(), a in app(), h in 0.0f64..6.0, dh in 0.0f64..3.0) {
        let lo = sweep(h, 100.0, &m, &a).unwrap();
        let hi = sweep(h + dh, 100.0, &m, &a).unwrap();
        for p in hi.feasible_points() {
            prop_assert!(lo.cell(p).unwrap().feasible());
        }
    }

    #[test]
    fn sweep_energy_present_iff_full_throughput(m in models(), a in app(), h in 0.0f64..8.0) {
        let g = sweep(h, 50.0, &m, &a).unwrap();
        prop_assert_eq!(g.cells.len(), m.grid_size());
        for c in &g.cells {
            prop_assert_eq!(c.energy_j.is_some(), c.throughput == 1.0);
        }
    }
}

/// Random surface whose feasible frontier moves at most one DVFS level per
/// speed step and whose cost along the frontier falls by at least 2% per
/// step towards a single minimum; off the frontier the cost grows by at
/// least 2% per extra level.
#[derive(Debug, Clone)]
struct Surface {
    shape: GridShape,
    frontier: Vec<Option<usize>>,
    row_cost: Vec<f64>,
    level_step: f64,
}

impl Surface {
    fn eval(&self, p: OperatingPoint) -> Evaluation {
        match self.frontier[p.speed_index] {
            Some(f) if p.dvfs_index >= f => Evaluation {
                cost: self.row_cost[p.speed_index] * (1.0 + self.level_step * (p.dvfs_index - f) as f64),
                feasible: true,
            },
            _ => Evaluation {
                cost: 1e9,
                feasible: false,
            },
        }
    }

    fn brute_argmin(&self) -> OperatingPoint {
        self.shape
            .points()
            .filter(|&p| self.eval(p).feasible)
            .min_by(|&a, &b| self.eval(a).cost.total_cmp(&self.eval(b).cost))
            .unwrap()
    }
}

fn surface() -> impl Strategy<Value = Surface> {
    (2usize..14, 2usize..12)
        .prop_flat_map(|(levels, speeds)| {
            (
                Just(levels),
                Just(speeds),
                prop::collection::vec(any::<bool>(), speeds),
                1usize..=speeds,
                0..speeds,
                prop::collection::vec(0.02f64..0.5, speeds),
                0.02f64..0.3,
            )
        })
        .prop_map(
            |(levels, speeds, rises, feasible_speeds, min_at, drops, level_step)| {
                // staircase frontier starting at level 0, rising by 0 or 1
                let mut frontier = Vec::with_capacity(speeds);
                let mut level = 0usize;
                for (s, &rise) in rises.iter().enumerate() {
                    if s > 0 && rise {
                        level += 1;
                    }
                    frontier.push((s < feasible_speeds && level < levels).then_some(level));
                }
                let last = frontier.iter().rposition(Option::is_some).unwrap();
                let min_at = min_at.min(last);
                let mut row_cost = vec![10.0; speeds];
                for s in (0..min_at).rev() {
                    row_cost[s] = row_cost[s + 1] * (1.0 + drops[s]);
                }
                for s in min_at + 1..speeds {
                    row_cost[s] = row_cost[s - 1] * (1.0 + drops[s]);
                }
                Surface {
                    shape: GridShape::new(levels, speeds),
                    frontier,
                    row_cost,
                    level_step,
                }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn climb_finds_argmin_on_frontier_unimodal_surfaces(sf in surface()) {
        let out = climb(
            initialize(sf.shape),
            sf.shape,
            Neighborhood::Moore8,
            EnergyThreshold::default(),
            |p| sf.eval(p),
        );
        prop_assert!(out.feasible);
        prop_assert_eq!(out.point, sf.brute_argmin());
        prop_assert!(out.evaluations <= 8 * sf.shape.size());
    }

    #[test]
    fn climb_never_ends_on_infeasible_point_when_start_is_feasible(sf in surface()) {
        let start = initialize(sf.shape);
        prop_assume!(sf.eval(start).feasible);
        for nb in [Neighborhood::Moore8, Neighborhood::VonNeumann4] {
            let out = climb(start, sf.shape, nb, EnergyThreshold::Absolute(0.0), |p| sf.eval(p));
            prop_assert!(sf.eval(out.point).feasible);
            prop_assert!(out.path.iter().all(|&p| sf.eval(p).feasible));
            prop_assert!(out.cost <= sf.eval(start).cost);
        }
    }
}
