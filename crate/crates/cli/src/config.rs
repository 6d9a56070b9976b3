use std::ops::RangeInclusive;
use std::path::PathBuf;

use gzavg_core::brandt::BrandtConfig;
use gzavg_core::repnum::Orientation;

use crate::cache::CACHE_ENV;
use crate::error::CliError;
use crate::output::OutputFormat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub cache_dir: Option<PathBuf>,
    pub brandt: BrandtConfig,
    pub orientation: Orientation,
    pub output_format: OutputFormat,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cache_dir: std::env::var_os(CACHE_ENV).map(PathBuf::from),
            brandt: BrandtConfig::default(),
            orientation: Orientation::Standard,
            output_format: OutputFormat::Json,
            jobs: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.jobs == 0 || self.brandt.max_nodes == 0 || self.brandt.max_classes == 0 {
            return Err(CliError::Input("jobs and enumeration bounds must be positive".into()));
        }
        Ok(())
    }
}

/// Parses `a`, `a..b` or `a..=b`; both forms with dots are inclusive.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>, CliError> {
    let bad = || CliError::Input(format!("bad range '{s}', expected a or a..b"));
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
    match s.split_once("..") {
        None => {
            let a = num(s)?;
            Ok(a..=a)
        }
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?);
            if a > b {
                return Err(bad());
            }
            Ok(a..=b)
        }
    }
}
