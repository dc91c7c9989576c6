//! Flat `key = value` configuration files.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. Every key
//! is optional and defaults to the reference robot and stair value; unknown keys
//! are rejected.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use quadgait::sim::Scenario;
use quadgait::spin::SpinDirection;
use quadgait::wave::GaitParams;
use quadgait::{GaitError, RobotModel};
use thiserror::Error;

pub const KEYS: [&str; 19] = [
    "p_x",
    "p_y",
    "r_x",
    "r_y",
    "r_z",
    "body_height",
    "beta",
    "cycle_time",
    "stroke",
    "delta_h",
    "stair_width",
    "stair_height",
    "stair_count",
    "t_0",
    "dt",
    "level_cycles",
    "spin_target_deg",
    "spin_direction",
    "out_dir",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub p_x: f64,
    pub p_y: f64,
    pub r_x: f64,
    pub r_y: f64,
    pub r_z: f64,
    pub body_height: f64,
    pub beta: f64,
    pub cycle_time: f64,
    /// `None` means the minimum stair stroke `2Wβ`, capped at `r_x`.
    pub stroke: Option<f64>,
    pub delta_h: f64,
    pub stair_width: f64,
    pub stair_height: f64,
    pub stair_count: usize,
    pub t_0: f64,
    pub dt: f64,
    pub level_cycles: usize,
    pub spin_target_deg: f64,
    pub spin_direction: SpinDirection,
    pub out_dir: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        let m = RobotModel::reference();
        let p = GaitParams::reference();
        let s = Scenario::default();
        Config {
            p_x: m.p_x,
            p_y: m.p_y,
            r_x: m.r_x,
            r_y: m.r_y,
            r_z: m.r_z,
            body_height: m.body_height,
            beta: p.beta,
            cycle_time: p.cycle_time,
            stroke: None,
            delta_h: p.delta_h,
            stair_width: p.stair_width,
            stair_height: p.stair_height,
            stair_count: s.stair_count,
            t_0: p.t_0,
            dt: s.dt,
            level_cycles: s.level_cycles,
            spin_target_deg: s.spin_target.to_degrees(),
            spin_direction: s.spin_direction,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: Display,
{
    value
        .parse::<T>()
        .map_err(|e| format!("cannot parse `{value}` for `{key}`: {e}"))
}

impl Config {
    /// Parses config text on top of the defaults. Text without any key is an error.
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut cfg = Config::default();
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("expected `key = value`, got `{body}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if seen.iter().any(|k| k == key) {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            seen.push(key.to_string());
            cfg.set(key, value)
                .map_err(|message| ConfigError::Parse { line, message })?;
        }
        if seen.is_empty() {
            return Err(ConfigError::Parse {
                line: 0,
                message: "config defines no keys".into(),
            });
        }
        Ok(cfg)
    }

    /// Reads and parses a config file. Call [`Config::validate`] once all
    /// overrides are applied.
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Config::parse(&text)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let Some((key, value)) = assignment.split_once('=') else {
            return Err(ConfigError::Parse {
                line: 0,
                message: format!("override `{assignment}` is not `key=value`"),
            });
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line: 0,
                key: key.to_string(),
            });
        }
        self.set(key, value.trim())
            .map_err(|message| ConfigError::Invalid {
                key: key.to_string(),
                message,
            })
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "p_x" => self.p_x = parse_value(key, value)?,
            "p_y" => self.p_y = parse_value(key, value)?,
            "r_x" => self.r_x = parse_value(key, value)?,
            "r_y" => self.r_y = parse_value(key, value)?,
            "r_z" => self.r_z = parse_value(key, value)?,
            "body_height" => self.body_height = parse_value(key, value)?,
            "beta" => self.beta = parse_value(key, value)?,
            "cycle_time" => self.cycle_time = parse_value(key, value)?,
            "stroke" => self.stroke = Some(parse_value(key, value)?),
            "delta_h" => self.delta_h = parse_value(key, value)?,
            "stair_width" => self.stair_width = parse_value(key, value)?,
            "stair_height" => self.stair_height = parse_value(key, value)?,
            "stair_count" => self.stair_count = parse_value(key, value)?,
            "t_0" => self.t_0 = parse_value(key, value)?,
            "dt" => self.dt = parse_value(key, value)?,
            "level_cycles" => self.level_cycles = parse_value(key, value)?,
            "spin_target_deg" => self.spin_target_deg = parse_value(key, value)?,
            "spin_direction" => {
                self.spin_direction = match value.to_ascii_lowercase().as_str() {
                    "ccw" => SpinDirection::Ccw,
                    "cw" => SpinDirection::Cw,
                    _ => return Err(format!("`spin_direction` must be ccw or cw, got `{value}`")),
                }
            }
            "out_dir" => self.out_dir = PathBuf::from(value),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn model(&self) -> RobotModel {
        RobotModel {
            p_x: self.p_x,
            p_y: self.p_y,
            r_x: self.r_x,
            r_y: self.r_y,
            r_z: self.r_z,
            body_height: self.body_height,
        }
    }

    pub fn params(&self) -> GaitParams {
        let stroke = self
            .stroke
            .unwrap_or_else(|| (2.0 * self.stair_width * self.beta).min(self.r_x));
        GaitParams {
            beta: self.beta,
            cycle_time: self.cycle_time,
            stroke,
            delta_h: self.delta_h,
            stair_width: self.stair_width,
            stair_height: self.stair_height,
            t_0: self.t_0,
        }
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            level_cycles: self.level_cycles,
            stair_count: self.stair_count,
            spin_target: self.spin_target_deg.to_radians(),
            spin_direction: self.spin_direction,
            dt: self.dt,
        }
    }

    /// Re-checks every model, gait and scenario invariant, naming the key at fault.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, message: String| ConfigError::Invalid {
            key: key.to_string(),
            message,
        };
        let from_gait = |e: GaitError, fallback: &str| match e {
            GaitError::InvalidParameter { name, reason } => invalid(name, reason),
            other => invalid(fallback, other.to_string()),
        };
        let model = self.model();
        model.validate().map_err(|e| from_gait(e, "p_x"))?;
        self.params()
            .validate(&model)
            .map_err(|e| from_gait(e, "stroke"))?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if self.stair_count == 0 {
            return Err(invalid("stair_count", "must be at least 1".into()));
        }
        if !(self.spin_target_deg > 0.0 && self.spin_target_deg.is_finite()) {
            return Err(invalid(
                "spin_target_deg",
                format!("must be positive, got {}", self.spin_target_deg),
            ));
        }
        Ok(())
    }
}
