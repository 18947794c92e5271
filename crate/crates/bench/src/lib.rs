//! Fixtures shared by the benchmarks.

use pmu_core::{AppProfile, EnvironmentProfile, Mode, PlantModels, SimConfig};

pub fn app() -> AppProfile {
    AppProfile::new("bench", 600.0, 1.0).expect("valid app")
}

pub fn mission(length_m: f64, entropy: f64, mode: Mode) -> SimConfig {
    let env = EnvironmentProfile::single("bench", length_m, entropy).expect("valid environment");
    SimConfig::new(env, app(), PlantModels::default(), mode)
}
