use std::collections::HashMap;
use std::path::PathBuf;

use crate::CommonArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fully resolved run configuration: explicit CLI flags override the config
/// file, which overrides built-in defaults. All fields are validated here,
/// before dispatch.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub two_j: u32,
    pub omega0: f64,
    pub winding: u32,
    pub tmin: f64,
    pub tmax: f64,
    pub count: usize,
    pub spacing: Spacing,
    pub steps: usize,
    pub tolerance: f64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub raw_phase: bool,
    pub natural_units: bool,
}

/// Parses "0.5", "1", "1.5" ... into the doubled spin value.
fn parse_two_j(text: &str) -> Result<u32, String> {
    let value: f64 = text
        .parse()
        .map_err(|_| format!("invalid spin value '{text}'"))?;
    let doubled = (2.0 * value).round();
    if doubled < 0.0 || (2.0 * value - doubled).abs() > 1e-9 {
        return Err(format!(
            "spin must be a nonnegative integer or half-integer, got '{text}'"
        ));
    }
    Ok(doubled as u32)
}

fn read_config_file(path: &PathBuf) -> Result<HashMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {} is not key=value: '{line}'", lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn lookup<T: std::str::FromStr>(
    map: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, String> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| format!("config key '{key}' has invalid value '{raw}'")),
    }
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, String> {
        let file = match &args.config {
            Some(path) => read_config_file(path)?,
            None => HashMap::new(),
        };

        let two_j = match args.j.as_deref().map(String::from) {
            Some(s) => parse_two_j(&s)?,
            None => match file.get("j") {
                Some(s) => parse_two_j(s)?,
                None => 1,
            },
        };
        let omega0 = args
            .omega0
            .or(lookup(&file, "omega0")?)
            .unwrap_or(1.0);
        let winding = args
            .winding
            .or(lookup(&file, "winding")?)
            .unwrap_or(1);
        let tmin = args.tmin.or(lookup(&file, "tmin")?).unwrap_or(0.05);
        let tmax = args.tmax.or(lookup(&file, "tmax")?).unwrap_or(2.0);
        let count = args.count.or(lookup(&file, "count")?).unwrap_or(400);
        let spacing_raw = args
            .spacing
            .clone()
            .or(lookup(&file, "spacing")?)
            .unwrap_or_else(|| "log".to_string());
        let steps = args.steps.or(lookup(&file, "steps")?).unwrap_or(512);
        let tolerance = args
            .tolerance
            .or(lookup(&file, "tolerance")?)
            .unwrap_or(1e-8);
        let output = args
            .output
            .clone()
            .or(lookup::<PathBuf>(&file, "output")?);
        let format_raw = args
            .format
            .clone()
            .or(lookup(&file, "format")?)
            .unwrap_or_else(|| "csv".to_string());
        let raw_phase = args.raw_phase || lookup(&file, "raw-phase")?.unwrap_or(false);
        let natural_units =
            args.natural_units || lookup(&file, "natural-units")?.unwrap_or(false);

        let spacing = match spacing_raw.as_str() {
            "linear" => Spacing::Linear,
            "log" => Spacing::Log,
            other => return Err(format!("spacing must be linear or log, got '{other}'")),
        };
        let format = match format_raw.as_str() {
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            other => return Err(format!("format must be csv or json, got '{other}'")),
        };

        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(format!("omega0 must be positive, got {omega0}"));
        }
        if !(tmin > 0.0 && tmin.is_finite()) {
            return Err(format!("tmin must be positive, got {tmin}"));
        }
        if tmax <= tmin {
            return Err(format!("tmax must exceed tmin, got ({tmin}, {tmax})"));
        }
        if count < 1 {
            return Err("count must be at least 1".to_string());
        }
        if steps < 2 {
            return Err(format!("steps must be at least 2, got {steps}"));
        }
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(format!("tolerance must be positive, got {tolerance}"));
        }

        Ok(Self {
            two_j,
            omega0,
            winding,
            tmin,
            tmax,
            count,
            spacing,
            steps,
            tolerance,
            output,
            format,
            raw_phase,
            natural_units,
        })
    }

    /// j as a decimal for report headers.
    pub fn j_label(&self) -> String {
        if self.two_j.is_multiple_of(2) {
            format!("{}", self.two_j / 2)
        } else {
            format!("{}", self.two_j as f64 / 2.0)
        }
    }
}
