//! Line-oriented run configuration: `section.key = value`, `#` comments.

use calderon_core::geometry::{FamilyKind, MetricFamily, TrigPoly};

#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug)]
pub struct Tolerances {
    pub sum: f64,
    pub pos_floor: f64,
    pub idem: f64,
    pub purity: f64,
    pub oracle: f64,
    pub ccr: f64,
    pub herm: f64,
    pub green: f64,
    pub adjoint: f64,
    pub rqr: f64,
    pub reflection: f64,
    pub conjugation: f64,
    pub pair_consistency: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sum: 5e-3,
            pos_floor: 1e-6,
            idem: 1e-2,
            purity: 1e-2,
            oracle: 5e-3,
            ccr: 5e-3,
            herm: 5e-3,
            green: 1e-3,
            adjoint: 1e-13,
            rqr: 1e-13,
            reflection: 1e-12,
            conjugation: 1e-10,
            pair_consistency: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub kind: FamilyKind,
    pub h0_cos: Vec<f64>,
    pub h0_sin: Vec<f64>,
    pub v_cos: Vec<f64>,
    pub v_sin: Vec<f64>,
    pub msq: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub t_half: f64,
    pub m: usize,
    pub n: usize,
    pub tol: Tolerances,
    pub t_window: f64,
    pub dt: f64,
    pub probe: bool,
    pub out_dir: String,
    pub emit_matrices: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kind: FamilyKind::Ultrastatic,
            h0_cos: vec![1.0],
            h0_sin: vec![],
            v_cos: vec![],
            v_sin: vec![],
            msq: 1.0,
            kappa: 0.2,
            alpha: 0.25,
            t_half: 1.0,
            m: 200,
            n: 16,
            tol: Tolerances::default(),
            t_window: 2.0 * std::f64::consts::PI,
            dt: 0.0, // 0 = choose automatically from the stability bound
            probe: true,
            out_dir: "out".to_string(),
            emit_matrices: false,
        }
    }
}

impl RunConfig {
    pub fn family(&self) -> MetricFamily {
        let h0 = TrigPoly { cos: self.h0_cos.clone(), sin: self.h0_sin.clone() };
        let v = TrigPoly { cos: self.v_cos.clone(), sin: self.v_sin.clone() };
        MetricFamily {
            kind: self.kind,
            h0,
            v,
            msq: self.msq,
            kappa: self.kappa,
            alpha: self.alpha,
        }
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse::<f64>().map_err(|_| ConfigError {
        line,
        message: format!("{key}: cannot parse `{value}` as a number"),
    })
}

fn parse_f64_list(line: usize, key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split_whitespace()
        .map(|tok| parse_f64(line, key, tok))
        .collect()
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse::<usize>().map_err(|_| ConfigError {
        line,
        message: format!("{key}: cannot parse `{value}` as an integer"),
    })
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(ConfigError { line, message: format!("{key}: expected a boolean, got `{value}`") }),
    }
}

fn positive(line: usize, key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError { line, message: format!("{key} = {v} must be positive") })
    }
}

fn even_ge4(line: usize, key: &str, v: usize) -> Result<usize, ConfigError> {
    if v >= 4 && v % 2 == 0 {
        Ok(v)
    } else {
        Err(ConfigError { line, message: format!("{key} = {v} must be even and ≥ 4") })
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError {
            line,
            message: format!("expected `section.key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "family.kind" => {
                cfg.kind = match value {
                    "ultrastatic" => FamilyKind::Ultrastatic,
                    "exponential" => FamilyKind::Exponential,
                    "polynomial" => FamilyKind::Polynomial,
                    _ => {
                        return Err(ConfigError {
                            line,
                            message: format!("unknown family kind `{value}`"),
                        })
                    }
                };
            }
            "family.h0_cos" => cfg.h0_cos = parse_f64_list(line, key, value)?,
            "family.h0_sin" => cfg.h0_sin = parse_f64_list(line, key, value)?,
            "family.v_cos" => cfg.v_cos = parse_f64_list(line, key, value)?,
            "family.v_sin" => cfg.v_sin = parse_f64_list(line, key, value)?,
            "family.msq" => cfg.msq = positive(line, key, parse_f64(line, key, value)?)?,
            "family.kappa" => cfg.kappa = parse_f64(line, key, value)?,
            "family.alpha" => cfg.alpha = parse_f64(line, key, value)?,
            "disc.T" => cfg.t_half = positive(line, key, parse_f64(line, key, value)?)?,
            "disc.M" => cfg.m = even_ge4(line, key, parse_usize(line, key, value)?)?,
            "disc.N" => cfg.n = even_ge4(line, key, parse_usize(line, key, value)?)?,
            "tol.sum" => cfg.tol.sum = positive(line, key, parse_f64(line, key, value)?)?,
            "tol.pos_floor" => cfg.tol.pos_floor = positive(line, key, parse_f64(line, key, value)?)?,
            "tol.idem" => cfg.tol.idem = positive(line, key, parse_f64(line, key, value)?)?,
            "tol.purity" => cfg.tol.purity = positive(line, key, parse_f64(line, key, value)?)?,
            "tol.oracle" => cfg.tol.oracle = positive(line, key, parse_f64(line, key, value)?)?,
            "tol.ccr" => cfg.tol.ccr = positive(line, key, parse_f64(line, key, value)?)?,
            "tol.herm" => cfg.tol.herm = positive(line, key, parse_f64(line, key, value)?)?,
            "tol.green" => cfg.tol.green = positive(line, key, parse_f64(line, key, value)?)?,
            "tol.adjoint" => cfg.tol.adjoint = positive(line, key, parse_f64(line, key, value)?)?,
            "tol.rqr" => cfg.tol.rqr = positive(line, key, parse_f64(line, key, value)?)?,
            "tol.reflection" => {
                cfg.tol.reflection = positive(line, key, parse_f64(line, key, value)?)?
            }
            "tol.conjugation" => {
                cfg.tol.conjugation = positive(line, key, parse_f64(line, key, value)?)?
            }
            "tol.pair_consistency" => {
                cfg.tol.pair_consistency = positive(line, key, parse_f64(line, key, value)?)?
            }
            "evolve.T_w" => cfg.t_window = positive(line, key, parse_f64(line, key, value)?)?,
            "evolve.dt" => {
                let v = parse_f64(line, key, value)?;
                if v < 0.0 {
                    return Err(ConfigError {
                        line,
                        message: format!("evolve.dt = {v} must be ≥ 0 (0 = automatic)"),
                    });
                }
                cfg.dt = v;
            }
            "evolve.probe" => cfg.probe = parse_bool(line, key, value)?,
            "output.dir" => cfg.out_dir = value.to_string(),
            "output.emit_matrices" => cfg.emit_matrices = parse_bool(line, key, value)?,
            _ => {
                return Err(ConfigError { line, message: format!("unknown key `{key}`") });
            }
        }
    }
    Ok(cfg)
}
