//! Default experiment fixtures: three application profiles and three
//! environment complexity classes.

use crate::plant::{AppProfile, EnvironmentProfile, Segment};

/// Length of each single-complexity mission.
pub const SEGMENT_LENGTH_M: f64 = 100.0;

/// Complexity classes and their scene entropy, in increasing order.
pub const COMPLEXITIES: [(&str, f64); 3] = [("low", 2.5), ("medium", 4.5), ("high", 6.0)];

/// Application names and their cycles per event.
pub const APPS: [(&str, f64); 3] = [("app1", 300.0), ("app2", 500.0), ("app3", 800.0)];

pub fn apps() -> Vec<AppProfile> {
    APPS.iter()
        .map(|&(name, cpe)| AppProfile::new(name, cpe, 1.0).expect("valid default app"))
        .collect()
}

/// Single-segment mission for each complexity class.
pub fn environments() -> Vec<EnvironmentProfile> {
    COMPLEXITIES
        .iter()
        .map(|&(name, h)| {
            EnvironmentProfile::single(name, SEGMENT_LENGTH_M, h).expect("valid default environment")
        })
        .collect()
}

/// One mission crossing low, high and then medium complexity.
pub fn mixed_environment() -> EnvironmentProfile {
    let [low, medium, high] = COMPLEXITIES.map(|(_, h)| h);
    EnvironmentProfile::new(
        "mixed",
        vec![
            Segment {
                length_m: SEGMENT_LENGTH_M,
                entropy: low,
            },
            Segment {
                length_m: SEGMENT_LENGTH_M,
                entropy: high,
            },
            Segment {
                length_m: SEGMENT_LENGTH_M,
                entropy: medium,
            },
        ],
    )
    .expect("valid mixed environment")
}
