//! Run configuration: defaults, then the `--config` file, then flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use bhk_core::experiments::Format;
use bhk_core::{Error, McConfig, RegimeConfig, Result, SeriesConfig};

/// Series settings; the dimension comes from the points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesSettings {
    pub tail_tol: f64,
    pub max_radial_modes: usize,
    pub max_angular_modes: usize,
}

impl Default for SeriesSettings {
    fn default() -> Self {
        let c = SeriesConfig::new(2).expect("dimension 2");
        Self { tail_tol: c.tail_tol, max_radial_modes: c.max_radial_modes, max_angular_modes: c.max_angular_modes }
    }
}

impl SeriesSettings {
    pub fn for_dim(&self, dim: usize) -> Result<SeriesConfig> {
        let c = SeriesConfig::new(dim)?
            .with_tail_tol(self.tail_tol)
            .with_caps(self.max_radial_modes, self.max_angular_modes);
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub regime: RegimeConfig,
    pub series: SeriesSettings,
    pub mc: McConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            regime: RegimeConfig::default(),
            series: SeriesSettings::default(),
            mc: McConfig::new(100_000, 0),
            out: None,
            format: Format::Json,
        }
    }
}

impl CliConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Usage(format!("bad config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.regime.validate()?;
        self.series.for_dim(2)?;
        if self.mc.n_paths == 0 {
            return Err(Error::Usage("mc.n_paths must be at least 1".into()));
        }
        Ok(())
    }
}
