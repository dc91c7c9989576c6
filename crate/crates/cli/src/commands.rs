//! Subcommand implementations, independent of argument parsing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use quadgait::sim::{run_case_study, simulate, SimTrace, Violation};
use quadgait::spin::{plan_spin, spin_cycles_for, spin_geometry};
use quadgait::terrain::{StairProfile, Terrain};
use quadgait::timeline::{Phase, Timeline};
use quadgait::transition::{plan_spin_transition, plan_wave_transition, transition_timeline};
use quadgait::wave::{
    blend_kappa, footprint_spacing, plan_level_walk, plan_stair_ascent, plan_stair_descent,
};
use quadgait::{GaitError, Pose, RobotState, Vector2, Vector3};
use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::svg::{write_plots, PlotError};
use crate::trace_csv::{read_trace, rows_from_trace, write_rows};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATIONS: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Plan(#[from] GaitError),
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error("cannot create {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Plan(e) if e.is_infeasibility() => EXIT_INFEASIBLE,
            _ => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionGait {
    Wave,
    Spin,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Scenario,
    Walk,
    Climb,
    Descend,
    Spin,
    Transition(TransitionGait),
    Check,
    Plot { input: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Scenario => "scenario",
            Command::Walk => "walk",
            Command::Climb => "climb",
            Command::Descend => "descend",
            Command::Spin => "spin",
            Command::Transition(_) => "transition",
            Command::Check => "check",
            Command::Plot { .. } => "plot",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub violations: usize,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.violations > 0 {
            EXIT_VIOLATIONS
        } else {
            EXIT_OK
        }
    }
}

fn origin_state(cfg: &Config) -> RobotState {
    let model = cfg.model();
    let body = Pose::new(Vector3::new(0.0, 0.0, model.body_height), 0.0);
    RobotState::from_config(body, &model.initial_configuration())
}

fn flight_cycles(cfg: &Config) -> Result<usize, GaitError> {
    if cfg.stair_count % 2 != 0 {
        return Err(GaitError::InvalidParameter {
            name: "stair_count",
            reason: format!("must be even, got {}", cfg.stair_count),
        });
    }
    Ok(cfg.stair_count / 2)
}

fn violation_kind(v: &Violation) -> &'static str {
    match v {
        Violation::Stability { .. } => "stability",
        Violation::Workspace { .. } => "workspace",
        Violation::Clearance { .. } => "clearance",
        Violation::Contact { .. } => "contact",
        Violation::Slip { .. } => "slip",
        Violation::SupportCount { .. } => "support count",
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn export(
    cfg: &Config,
    name: &str,
    trace: &SimTrace,
    report: &mut String,
) -> Result<Outcome, CliError> {
    ensure_dir(&cfg.out_dir)?;
    let rows = rows_from_trace(trace);
    let csv_path = cfg.out_dir.join(format!("{name}.csv"));
    let file = std::fs::File::create(&csv_path).map_err(|source| CliError::Io {
        path: csv_path.clone(),
        source,
    })?;
    write_rows(&rows, std::io::BufWriter::new(file)).map_err(|source| CliError::Csv {
        path: csv_path.clone(),
        source,
    })?;
    let [traj, margin] = write_plots(&rows, &cfg.out_dir, name)?;

    let mut counts: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    for (t, v) in trace.violations() {
        counts.entry(violation_kind(v)).or_insert((0, t)).0 += 1;
    }
    let violations: usize = counts.values().map(|c| c.0).sum();
    let (t0, t1) = match (trace.samples.first(), trace.samples.last()) {
        (Some(a), Some(b)) => (a.t, b.t),
        _ => (0.0, 0.0),
    };
    let _ = writeln!(
        report,
        "samples: {} over [{t0}, {t1}] s",
        trace.samples.len()
    );
    let _ = writeln!(report, "min stability margin: {:.6} m", trace.min_margin());
    let _ = writeln!(report, "violations: {violations}");
    for (kind, (n, first)) in &counts {
        let _ = writeln!(report, "  {kind}: {n} (first at t = {first} s)");
    }
    Ok(Outcome {
        report: std::mem::take(report),
        violations,
        files: vec![csv_path, traj, margin],
    })
}

fn simulate_timeline(
    cfg: &Config,
    name: &str,
    tl: &Timeline,
    terrain: &Terrain,
) -> Result<Outcome, CliError> {
    let trace = simulate(tl, &cfg.model(), terrain, cfg.dt)?;
    let mut report = String::new();
    let _ = writeln!(report, "{name}: {} segments", tl.segments.len());
    export(cfg, name, &trace, &mut report)
}

pub fn run(cmd: &Command, cfg: &Config) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let model = cfg.model();
    let params = cfg.params();
    let name = cmd.name();
    match cmd {
        Command::Scenario => {
            let cs = run_case_study(&model, &params, &cfg.scenario())?;
            let mut report = String::new();
            for s in &cs.stages {
                let _ = writeln!(
                    report,
                    "{:<16} {:>9.3} .. {:>9.3} s",
                    s.name, s.t_start, s.t_end
                );
            }
            let end = cs.timeline.final_state().body;
            let _ = writeln!(
                report,
                "final body: x = {:.6}, y = {:.6}, z = {:.6}, yaw = {:.6} rad",
                end.position.x, end.position.y, end.position.z, end.yaw
            );
            export(cfg, name, &cs.trace, &mut report)
        }
        Command::Walk => {
            let tl = plan_level_walk(&model, &params, cfg.level_cycles.max(1))?;
            simulate_timeline(cfg, name, &tl, &Terrain::flat())
        }
        Command::Climb => {
            let stairs = StairProfile::ascending(
                Vector2::zeros(),
                0.0,
                cfg.stair_count,
                cfg.stair_width,
                cfg.stair_height,
            );
            let tl = plan_stair_ascent(&model, &params, &stairs, flight_cycles(cfg)?)?;
            simulate_timeline(cfg, name, &tl, &Terrain::single(stairs))
        }
        Command::Descend => {
            let top = cfg.stair_height * cfg.stair_count as f64;
            let stairs = StairProfile::descending(
                Vector2::zeros(),
                0.0,
                cfg.stair_count,
                cfg.stair_width,
                cfg.stair_height,
                top,
            );
            let tl = plan_stair_descent(&model, &params, &stairs, flight_cycles(cfg)?)?;
            simulate_timeline(cfg, name, &tl, &Terrain::single(stairs))
        }
        Command::Spin => {
            let tl = plan_spin(
                &model,
                &params,
                cfg.spin_target_deg.to_radians(),
                cfg.spin_direction,
            )?;
            simulate_timeline(cfg, name, &tl, &Terrain::flat())
        }
        Command::Transition(gait) => {
            let plan = match gait {
                TransitionGait::Wave => plan_wave_transition(&model, &params)?,
                TransitionGait::Spin => plan_spin_transition(&model, &params, cfg.spin_direction)?,
            };
            let tl = transition_timeline(
                &params,
                &origin_state(cfg),
                params.t_0,
                &plan,
                Phase::Transition,
            )?;
            let trace = simulate(&tl, &model, &Terrain::flat(), cfg.dt)?;
            let mut report = String::new();
            let legs: Vec<String> = plan.legs().iter().map(u8::to_string).collect();
            let _ = writeln!(report, "transition legs: {}", legs.join(" "));
            for (m, margin) in plan.moves.iter().zip(plan.step_margins()) {
                let _ = writeln!(
                    report,
                    "  leg {} -> ({:.4}, {:.4}, {:.4}), margin while lifted {:.6} m",
                    m.leg.id(),
                    m.target.x,
                    m.target.y,
                    m.target.z,
                    margin
                );
            }
            export(cfg, name, &trace, &mut report)
        }
        Command::Check => {
            params.validate_stairs(&model)?;
            let geo = spin_geometry(&model)?;
            let (cycles, phi) = spin_cycles_for(&model, &params, cfg.spin_target_deg.to_radians())?;
            let mut report = String::new();
            let _ = writeln!(report, "config ok");
            let _ = writeln!(report, "stroke R = {:.6} m", params.stroke);
            let _ = writeln!(
                report,
                "footprint spacing = {:.6} m",
                footprint_spacing(&params)
            );
            let _ = writeln!(
                report,
                "swing body profile weight = {:.6}",
                blend_kappa(&model, &params)
            );
            let _ = writeln!(
                report,
                "spin radius = {:.6} m, arc = {:.6} rad ({})",
                geo.rho,
                geo.phi,
                if geo.closed_form {
                    "closed form"
                } else {
                    "exact intersection"
                }
            );
            let _ = writeln!(report, "spin: {cycles} cycles of {phi:.6} rad");
            Ok(Outcome {
                report,
                violations: 0,
                files: Vec::new(),
            })
        }
        Command::Plot { input } => {
            let rows = read_trace(input).map_err(|source| CliError::Csv {
                path: input.clone(),
                source,
            })?;
            ensure_dir(&cfg.out_dir)?;
            let prefix = input
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("trace");
            let files = write_plots(&rows, &cfg.out_dir, prefix)?;
            Ok(Outcome {
                report: format!("plotted {} samples\n", rows.len()),
                violations: 0,
                files: files.to_vec(),
            })
        }
    }
}
