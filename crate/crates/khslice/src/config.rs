use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

pub const DEFAULT_MAX_CROSSINGS: usize = 18;
pub const MIN_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}` (expected text, json or csv)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// Flags shared by every subcommand. `None` for `tol` or `samples` means
/// each battery uses its own default.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub max_crossings: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            format: Format::Text,
            out: None,
            seed: 1,
            tol: None,
            samples: None,
            max_crossings: DEFAULT_MAX_CROSSINGS,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("--tol must be positive, got {t}"));
            }
        }
        if let Some(n) = self.samples.filter(|&n| n < MIN_SAMPLES) {
            return Err(format!("--samples must be at least {MIN_SAMPLES}, got {n}"));
        }
        Ok(())
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }
}

/// Caps rayon's global pool at `KHSLICE_THREADS` when that is a positive
/// integer. Only the first call can take effect.
pub fn init_threads() -> Option<usize> {
    let n: usize = std::env::var("KHSLICE_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok().map(|_| n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        assert!(RunConfig { tol: Some(0.0), ..Default::default() }.validate().is_err());
        assert!(RunConfig { tol: Some(f64::NAN), ..Default::default() }.validate().is_err());
        assert!(RunConfig { samples: Some(7), ..Default::default() }.validate().is_err());
        assert!(RunConfig { samples: Some(8), tol: Some(1e-9), ..Default::default() }.validate().is_ok());
    }

    #[test]
    fn formats() {
        for f in [Format::Text, Format::Json, Format::Csv] {
            assert_eq!(f.to_string().parse::<Format>(), Ok(f));
        }
        assert!("yaml".parse::<Format>().is_err());
    }
}
