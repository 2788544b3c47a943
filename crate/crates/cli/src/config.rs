//! Run configuration: JSON file, overridden by command-line flags.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tunnelgate::marketdata::{RangeOptions, ScanOptions};
use tunnelgate::model::DEFAULT_CRITICAL_TOLERANCE;
use tunnelgate::verify::quadrature::DEFAULT_QUAD_TOL;

use crate::output::Format;

pub const CONFIG_ENV: &str = "TUNNELGATE_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub r: f64,
    pub format: Format,
    pub critical_tolerance: f64,
    pub quad_tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub range_window: usize,
    pub sigma_window: usize,
    pub band_quantiles: (f64, f64),
    pub flatness_threshold: f64,
    pub long_window: usize,
    pub short_window: usize,
    pub drop_threshold: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let scan = ScanOptions::default();
        Self {
            r: scan.r,
            format: Format::Table,
            critical_tolerance: DEFAULT_CRITICAL_TOLERANCE,
            quad_tol: DEFAULT_QUAD_TOL,
            samples: 100,
            seed: 0x5eed,
            range_window: scan.range.window,
            sigma_window: scan.sigma_window,
            band_quantiles: scan.range.band_quantiles,
            flatness_threshold: scan.range.flatness_threshold,
            long_window: scan.long_window,
            short_window: scan.short_window,
            drop_threshold: scan.drop_threshold,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.validate()
            .map_err(|e| format!("{}: {e}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(format!("`{name}` must be finite and > 0, got {v}"))
            }
        };
        positive("r", self.r)?;
        positive("quad_tol", self.quad_tol)?;
        if self.critical_tolerance.is_nan() || self.critical_tolerance < 0.0 {
            return Err(format!(
                "`critical_tolerance` must be >= 0, got {}",
                self.critical_tolerance
            ));
        }
        if self.samples == 0 {
            return Err("`samples` must be >= 1".into());
        }
        if self.range_window < 5 {
            return Err(format!(
                "`range_window` must be >= 5, got {}",
                self.range_window
            ));
        }
        if self.sigma_window < 2 {
            return Err(format!(
                "`sigma_window` must be >= 2, got {}",
                self.sigma_window
            ));
        }
        if self.short_window < 2 || self.long_window <= self.short_window {
            return Err(format!(
                "need long_window > short_window >= 2, got {} and {}",
                self.long_window, self.short_window
            ));
        }
        let (lo, hi) = self.band_quantiles;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(format!(
                "`band_quantiles` need 0 <= low < high <= 1, got ({lo}, {hi})"
            ));
        }
        if !(0.0..=1.0).contains(&self.flatness_threshold) {
            return Err(format!(
                "`flatness_threshold` must lie in [0, 1], got {}",
                self.flatness_threshold
            ));
        }
        if !(self.drop_threshold > 0.0 && self.drop_threshold < 1.0) {
            return Err(format!(
                "`drop_threshold` must lie in (0, 1), got {}",
                self.drop_threshold
            ));
        }
        Ok(())
    }

    pub fn scan_options(&self, sigma: Option<f64>) -> ScanOptions {
        ScanOptions {
            r: self.r,
            sigma,
            sigma_window: self.sigma_window,
            range: RangeOptions {
                window: self.range_window,
                band_quantiles: self.band_quantiles,
                flatness_threshold: self.flatness_threshold,
            },
            long_window: self.long_window,
            short_window: self.short_window,
            drop_threshold: self.drop_threshold,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_file_fills_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"r": 0.05, "format": "csv"}"#).unwrap();
        assert_eq!(cfg.r, 0.05);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.range_window, RunConfig::default().range_window);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"rate": 0.05}"#).is_err());
        let cfg = RunConfig {
            short_window: 50,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            r: -0.01,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
