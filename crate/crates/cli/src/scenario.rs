//! TOML scenario files.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use pmu_core::{
    baseline_config, AppProfile, Baseline, ControllerParams, EnvironmentProfile, GridShape, Mode,
    OperatingPoint, PlantModels, SimConfig,
};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// Run mode as written in scenario files and on the command line:
/// `controlled`, `hs`, `as`, `as-star` or `fixed:I,J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ModeSpec {
    Controlled,
    Baseline(Baseline),
    Fixed(OperatingPoint),
}

impl ModeSpec {
    pub fn resolve(&self, models: &PlantModels) -> Mode {
        match *self {
            ModeSpec::Controlled => Mode::Controlled,
            ModeSpec::Baseline(b) => Mode::Fixed(baseline_config(b, GridShape::of(models))),
            ModeSpec::Fixed(op) => Mode::Fixed(op),
        }
    }
}

impl fmt::Display for ModeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeSpec::Controlled => f.write_str("controlled"),
            ModeSpec::Baseline(Baseline::Hs) => f.write_str("hs"),
            ModeSpec::Baseline(Baseline::As) => f.write_str("as"),
            ModeSpec::Baseline(Baseline::AsStar) => f.write_str("as-star"),
            ModeSpec::Fixed(op) => write!(f, "fixed:{},{}", op.dvfs_index, op.speed_index),
        }
    }
}

impl FromStr for ModeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "controlled" => Ok(ModeSpec::Controlled),
            "hs" => Ok(ModeSpec::Baseline(Baseline::Hs)),
            "as" => Ok(ModeSpec::Baseline(Baseline::As)),
            "as-star" => Ok(ModeSpec::Baseline(Baseline::AsStar)),
            _ => {
                let bad = || format!("unknown mode {s:?}; expected controlled, hs, as, as-star or fixed:I,J");
                let rest = s.strip_prefix("fixed:").ok_or_else(bad)?;
                let (d, sp) = rest.split_once(',').ok_or_else(bad)?;
                let d = d.trim().parse().map_err(|_| bad())?;
                let sp = sp.trim().parse().map_err(|_| bad())?;
                Ok(ModeSpec::Fixed(OperatingPoint::new(d, sp)))
            }
        }
    }
}

impl TryFrom<String> for ModeSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ModeSpec> for String {
    fn from(m: ModeSpec) -> Self {
        m.to_string()
    }
}

fn default_dt() -> f64 {
    pmu_core::sim::DEFAULT_DT_S
}

fn default_mode() -> ModeSpec {
    ModeSpec::Controlled
}

/// Everything one experiment needs: plant, controller, applications and
/// environments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub format_version: u32,
    pub name: String,
    #[serde(default = "default_dt")]
    pub dt_s: f64,
    #[serde(default = "default_mode")]
    pub mode: ModeSpec,
    /// Simulation tick budget; derived from the slowest speed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ticks: Option<u64>,
    pub plant: PlantModels,
    pub controller: ControllerParams,
    pub apps: Vec<AppProfile>,
    pub environments: Vec<EnvironmentProfile>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let s: Scenario = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Runtime(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::Config(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.apps.is_empty() {
            return Err(CliError::Config("no [[apps]] declared".into()));
        }
        if self.environments.is_empty() {
            return Err(CliError::Config("no [[environments]] declared".into()));
        }
        self.plant.validate()?;
        self.controller.validate()?;
        for a in &self.apps {
            a.validate()?;
        }
        for e in &self.environments {
            e.validate()?;
        }
        Ok(())
    }

    pub fn app(&self, name: Option<&str>) -> Result<&AppProfile, CliError> {
        pick(&self.apps, name, |a| &a.name, "app")
    }

    pub fn environment(&self, name: Option<&str>) -> Result<&EnvironmentProfile, CliError> {
        pick(&self.environments, name, |e| &e.name, "environment")
    }

    pub fn sim_config(
        &self,
        environment: &EnvironmentProfile,
        app: &AppProfile,
        mode: ModeSpec,
        dt_s: Option<f64>,
    ) -> Result<SimConfig, CliError> {
        let mut cfg = SimConfig::new(
            environment.clone(),
            app.clone(),
            self.plant.clone(),
            mode.resolve(&self.plant),
        );
        cfg.controller = self.controller;
        cfg.dt_s = dt_s.unwrap_or(self.dt_s);
        cfg.max_ticks = self.max_ticks;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn pick<'a, T>(
    items: &'a [T],
    name: Option<&str>,
    key: impl Fn(&T) -> &String,
    what: &str,
) -> Result<&'a T, CliError> {
    match name {
        None => items
            .first()
            .ok_or_else(|| CliError::Config(format!("no {what} declared"))),
        Some(n) => items.iter().find(|i| key(i) == n).ok_or_else(|| {
            let known: Vec<_> = items.iter().map(|i| key(i).as_str()).collect();
            CliError::Config(format!("no {what} named {n:?}; known: {}", known.join(", ")))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pmu_core::Segment;

    pub(crate) fn sample() -> Scenario {
        Scenario {
            format_version: FORMAT_VERSION,
            name: "t".into(),
            dt_s: 1e-3,
            mode: ModeSpec::Controlled,
            max_ticks: None,
            plant: PlantModels::default(),
            controller: ControllerParams::default(),
            apps: vec![AppProfile::new("a", 600.0, 1.0).unwrap()],
            environments: vec![EnvironmentProfile::new(
                "e",
                vec![
                    Segment {
                        length_m: 10.0,
                        entropy: 2.0,
                    },
                    Segment {
                        length_m: 5.0,
                        entropy: 4.0,
                    },
                ],
            )
            .unwrap()],
        }
    }

    #[test]
    fn mode_strings_round_trip() {
        for s in ["controlled", "hs", "as", "as-star", "fixed:3,7"] {
            assert_eq!(s.parse::<ModeSpec>().unwrap().to_string(), s);
        }
        assert_eq!(
            "fixed: 2 , 1".parse::<ModeSpec>().unwrap(),
            ModeSpec::Fixed(OperatingPoint::new(2, 1))
        );
        for bad in ["", "HS", "fixed:", "fixed:1", "fixed:a,b", "fixed:-1,2"] {
            assert!(bad.parse::<ModeSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn baselines_resolve_to_grid_points() {
        let m = PlantModels::default();
        assert_eq!(
            ModeSpec::Baseline(Baseline::AsStar).resolve(&m),
            Mode::Fixed(OperatingPoint::new(6, 5))
        );
    }

    #[test]
    fn serialize_parse_round_trip() {
        let s = sample();
        let text = s.to_toml().unwrap();
        let back = Scenario::parse(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(Scenario::parse(&back.to_toml().unwrap()).unwrap(), s);
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let text = sample().to_toml().unwrap().replace("idle_w", "idle_watts");
        match Scenario::parse(&text) {
            Err(CliError::Config(msg)) => {
                assert!(msg.contains("idle_watts"), "{msg}");
                assert!(msg.contains("line"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_tables_are_rejected() {
        let mut s = sample();
        s.apps.clear();
        assert!(Scenario::parse(&s.to_toml().unwrap()).is_err());
        let text = sample()
            .to_toml()
            .unwrap()
            .replace("format_version = 1", "format_version = 9");
        assert!(Scenario::parse(&text).is_err());
    }

    #[test]
    fn selection_by_name() {
        let s = sample();
        assert_eq!(s.app(None).unwrap().name, "a");
        assert!(s.app(Some("zzz")).is_err());
        assert_eq!(s.environment(Some("e")).unwrap().segments.len(), 2);
    }
}
