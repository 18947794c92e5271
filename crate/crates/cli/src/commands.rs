use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use pmu_core::{compare, frontier, frontier_argmin, sweep, Error, Simulator, SweepGrid};

use crate::error::CliError;
use crate::output::{
    comparison_csv, decisions_csv, frontier_csv, grid_csv, heatmap_svg, parse_grid_csv, report_text,
    trace_csv, CompareRow,
};
use crate::scenario::{ModeSpec, Scenario};
use crate::{CompareArgs, FrontierArgs, RunArgs, Selection, SweepArgs};

/// Files a command wrote, in write order, plus any warnings.
#[derive(Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn write(out: &Path, name: &str, body: &str, outcome: &mut Outcome) -> Result<(), CliError> {
    fs::create_dir_all(out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out.display())))?;
    let path = out.join(name);
    fs::write(&path, body).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    outcome.written.push(path);
    Ok(())
}

fn check_entropy(entropy: Option<f64>) -> Result<(), CliError> {
    match entropy {
        Some(h) if !(h.is_finite() && h >= 0.0) => {
            Err(CliError::Config(format!("--entropy {h} must be finite and >= 0")))
        }
        _ => Ok(()),
    }
}

fn scenario_grid(scenario: &Scenario, sel: &Selection, entropy: Option<f64>) -> Result<SweepGrid, CliError> {
    check_entropy(entropy)?;
    let env = scenario.environment(sel.environment.as_deref())?;
    let app = scenario.app(sel.app.as_deref())?;
    let h = entropy.unwrap_or(env.segments[0].entropy);
    Ok(sweep(h, env.total_length(), &scenario.plant, app)?)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Outcome, CliError> {
    let scenario = Scenario::load(&args.scenario)?;
    let grid = scenario_grid(&scenario, &args.select, args.entropy)?;
    let env = scenario.environment(args.select.environment.as_deref())?;
    let app = scenario.app(args.select.app.as_deref())?;
    let title = format!(
        "{} / {} / {}: entropy {}",
        scenario.name, env.name, app.name, grid.entropy
    );
    let mut outcome = Outcome::default();
    write(&args.out, "grid.csv", &grid_csv(&grid)?, &mut outcome)?;
    write(
        &args.out,
        "heatmap.svg",
        &heatmap_svg(&grid, &title),
        &mut outcome,
    )?;
    Ok(outcome)
}

pub fn cmd_run(args: &RunArgs) -> Result<Outcome, CliError> {
    let scenario = Scenario::load(&args.scenario)?;
    let env = scenario.environment(args.select.environment.as_deref())?;
    let app = scenario.app(args.select.app.as_deref())?;
    let mode: ModeSpec = args.mode.unwrap_or(scenario.mode);
    let cfg = scenario.sim_config(env, app, mode, args.dt)?;
    let mut sim = Simulator::new(cfg)?;
    let mut outcome = Outcome::default();
    if let Err(e) = sim.run() {
        if matches!(e, Error::Timeout { .. }) {
            write(&args.out, "trace.csv", &trace_csv(sim.trace())?, &mut outcome)?;
            write(
                &args.out,
                "decisions.csv",
                &decisions_csv(sim.decisions())?,
                &mut outcome,
            )?;
        }
        return Err(e.into());
    }
    let result = sim.finish()?;
    write(&args.out, "trace.csv", &trace_csv(&result.trace)?, &mut outcome)?;
    write(
        &args.out,
        "decisions.csv",
        &decisions_csv(&result.decisions)?,
        &mut outcome,
    )?;
    write(&args.out, "report.txt", &report_text(&result), &mut outcome)?;
    if result.degraded {
        outcome
            .warnings
            .push("no configuration met the throughput requirement; ran degraded".into());
    }
    Ok(outcome)
}

/// Every environment × app × mode of the scenario, in declaration order.
pub fn comparison_rows(scenario: &Scenario, dt: Option<f64>) -> Result<Vec<CompareRow>, CliError> {
    let jobs: Vec<_> = scenario
        .environments
        .iter()
        .flat_map(|e| scenario.apps.iter().map(move |a| (e, a)))
        .collect();
    let tables = jobs
        .par_iter()
        .map(|(env, app)| {
            let cfg = scenario.sim_config(env, app, ModeSpec::Controlled, dt)?;
            let table = compare(&cfg)?;
            Ok(table
                .into_iter()
                .map(|summary| CompareRow {
                    environment: env.name.clone(),
                    app: app.name.clone(),
                    summary,
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(tables.into_iter().flatten().collect())
}

pub fn cmd_compare(args: &CompareArgs) -> Result<Outcome, CliError> {
    let scenario = Scenario::load(&args.scenario)?;
    let rows = comparison_rows(&scenario, args.dt)?;
    let mut outcome = Outcome::default();
    write(&args.out, "comparison.csv", &comparison_csv(&rows)?, &mut outcome)?;
    Ok(outcome)
}

pub fn cmd_frontier(args: &FrontierArgs) -> Result<Outcome, CliError> {
    let grid = match (&args.scenario, &args.grid) {
        (Some(path), None) => scenario_grid(&Scenario::load(path)?, &args.select, args.entropy)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_grid_csv(&text).map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
                other => other,
            })?
        }
        _ => {
            return Err(CliError::Config(
                "pass exactly one of --scenario or --grid".into(),
            ))
        }
    };
    let points = frontier(&grid);
    let mut outcome = Outcome::default();
    if points.is_empty() {
        outcome
            .warnings
            .push("no configuration meets the throughput requirement; frontier is empty".into());
    }
    write(
        &args.out,
        "frontier.csv",
        &frontier_csv(&points, frontier_argmin(&points))?,
        &mut outcome,
    )?;
    Ok(outcome)
}
