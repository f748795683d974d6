//! Flat `key = value` experiment configuration.

use std::path::Path;
use std::str::FromStr;

use anisohit::heat::{HeatModel, HeatParams};
use anisohit::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub hurst: f64,
    pub alpha: f64,
    pub d: u32,
    pub state_dim: u32,
    pub t0: f64,
    pub t_max: f64,
    pub half_width: f64,
    /// Hurst indices swept by the variance, metric and rate pipelines; empty means `hurst` only.
    pub hurst_values: Vec<f64>,
    pub scale_factors: Vec<f64>,
    pub pairs: usize,
    pub grid_t: usize,
    pub grid_x: usize,
    /// Points per axis of the successive grids in the polarity pipeline.
    pub refinements: Vec<usize>,
    /// Small-ball radii; empty selects 2^k times the grid modulus, k = 0..3.
    pub radii: Vec<f64>,
    pub target_center: Vec<f64>,
    pub target_radius: f64,
    pub mean_offset: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub inflation_factor: f64,
    pub n_cells: usize,
    pub riesz_order: f64,
    pub cantor_level: u32,
    pub growth_grid: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            hurst: 0.75,
            alpha: 0.0,
            d: 1,
            state_dim: 4,
            t0: 0.1,
            t_max: 1.0,
            half_width: 1.0,
            hurst_values: vec![],
            scale_factors: vec![0.5, 2.0, 4.0],
            pairs: 1000,
            grid_t: 64,
            grid_x: 64,
            refinements: vec![16, 32, 64],
            radii: vec![],
            target_center: vec![],
            target_radius: 0.0,
            mean_offset: 0.0,
            n_samples: 10_000,
            seed: 0,
            inflation_factor: 3.0,
            n_cells: 256,
            riesz_order: 0.5,
            cantor_level: 10,
            growth_grid: 1024,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    if value.trim().is_empty() {
        return Ok(vec![]);
    }
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        text.parse()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "hurst" => self.hurst = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "d" => self.d = parse(key, value)?,
            "state_dim" => self.state_dim = parse(key, value)?,
            "t0" => self.t0 = parse(key, value)?,
            "t_max" => self.t_max = parse(key, value)?,
            "half_width" => self.half_width = parse(key, value)?,
            "hurst_values" => self.hurst_values = parse_list(key, value)?,
            "scale_factors" => self.scale_factors = parse_list(key, value)?,
            "pairs" => self.pairs = parse(key, value)?,
            "grid_t" => self.grid_t = parse(key, value)?,
            "grid_x" => self.grid_x = parse(key, value)?,
            "refinements" => self.refinements = parse_list(key, value)?,
            "radii" => self.radii = parse_list(key, value)?,
            "target_center" => self.target_center = parse_list(key, value)?,
            "target_radius" => self.target_radius = parse(key, value)?,
            "mean_offset" => self.mean_offset = parse(key, value)?,
            "n_samples" => self.n_samples = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "inflation_factor" => self.inflation_factor = parse(key, value)?,
            "n_cells" => self.n_cells = parse(key, value)?,
            "riesz_order" => self.riesz_order = parse(key, value)?,
            "cantor_level" => self.cantor_level = parse(key, value)?,
            "growth_grid" => self.growth_grid = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Hurst indices to sweep.
    pub fn hursts(&self) -> Vec<f64> {
        if self.hurst_values.is_empty() {
            vec![self.hurst]
        } else {
            self.hurst_values.clone()
        }
    }

    pub fn params(&self, hurst: f64) -> HeatParams {
        HeatParams {
            hurst,
            alpha: self.alpha,
            d: self.d,
            state_dim: self.state_dim,
            t0: self.t0,
            t_max: self.t_max,
            half_width: self.half_width,
        }
    }

    pub fn model(&self, hurst: f64) -> Result<HeatModel> {
        HeatModel::new(self.params(hurst))
    }

    /// Checks every swept model and the scalar settings.
    pub fn validate(&self) -> Result<()> {
        for h in self.hursts() {
            let reg = 4.0 * h - (self.d as f64 - self.alpha);
            if !(reg > 0.0 && reg < 4.0) {
                return Err(Error::Config(format!(
                    "4H - (d - alpha) = {reg} must lie in (0, 4)"
                )));
            }
            self.model(h)?;
        }
        if self
            .scale_factors
            .iter()
            .any(|&c| !(c > 0.0 && c.is_finite()))
        {
            return Err(Error::Config("scale factors must be positive".into()));
        }
        if !self.target_center.is_empty() && self.target_center.len() != self.state_dim as usize {
            return Err(Error::Config(format!(
                "target_center has {} coordinates, state_dim is {}",
                self.target_center.len(),
                self.state_dim
            )));
        }
        if !(self.target_radius >= 0.0 && self.target_radius.is_finite()) {
            return Err(Error::Config(
                "target_radius must be finite and >= 0".into(),
            ));
        }
        if self.refinements.iter().any(|&n| n == 0) || self.grid_t == 0 || self.grid_x == 0 {
            return Err(Error::Config("grid sizes must be positive".into()));
        }
        Ok(())
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected key = value, got `{line}`",
                    i + 1
                )));
            };
            cfg.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }
}
