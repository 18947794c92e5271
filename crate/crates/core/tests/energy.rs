use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pmu_core::{integrate_energy, TraceSample};

/// Piecewise-constant power held over random-length intervals.
struct Steps {
    ends: Vec<f64>,
    motor: Vec<f64>,
    cpu: Vec<f64>,
}

impl Steps {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.gen_range(3..12);
        let mut t = 0.0;
        let (mut ends, mut motor, mut cpu) = (vec![], vec![], vec![]);
        for _ in 0..n {
            t += rng.gen_range(0.5..5.0);
            ends.push(t);
            motor.push(rng.gen_range(5.0..60.0));
            cpu.push(rng.gen_range(1.0..30.0));
        }
        Self { ends, motor, cpu }
    }

    fn at(&self, t: f64) -> (f64, f64) {
        let i = self
            .ends
            .iter()
            .position(|&e| t < e)
            .unwrap_or(self.ends.len() - 1);
        (self.motor[i], self.cpu[i])
    }

    fn duration(&self) -> f64 {
        *self.ends.last().unwrap()
    }

    /// Left Riemann sum at step `h`.
    fn riemann(&self, h: f64) -> f64 {
        let n = (self.duration() / h).round() as usize;
        (0..n)
            .map(|k| {
                let (m, c) = self.at(k as f64 * h);
                (m + c) * h
            })
            .sum()
    }
}

#[test]
fn trapezoid_agrees_with_fine_riemann_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let steps = Steps::random(&mut rng);
        let dt = 1e-3;
        let n = (steps.duration() / dt).round() as usize;
        let trace: Vec<_> = (0..=n)
            .map(|k| {
                let t = k as f64 * dt;
                let (m, c) = steps.at(t);
                TraceSample {
                    time_s: t,
                    position_m: t,
                    speed_mps: 1.0,
                    dvfs_index: 0,
                    speed_index: 0,
                    p_motor_w: m,
                    p_cpu_w: c,
                    throughput: 1.0,
                    entropy: 0.0,
                    event_rate_eps: 0.0,
                }
            })
            .collect();
        let r = integrate_energy(&trace).unwrap();
        let oracle = steps.riemann(dt / 10.0);
        assert!(
            (r.e_total_j - oracle).abs() / oracle < 5e-3,
            "{} vs {}",
            r.e_total_j,
            oracle
        );
        assert_eq!(r.e_total_j, r.e_motor_j + r.e_cpu_j);
    }
}
