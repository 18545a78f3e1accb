//! Run configuration: `key = value` files overlaid by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub slope: Option<String>,
    pub mode: Option<Mode>,
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key = value", n + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || format!("line {}: bad value for {key}: {value:?}", n + 1);
            match key {
                "slope" => cfg.slope = Some(value.to_string()),
                "mode" => {
                    cfg.mode = Some(match value {
                        "exact" => Mode::Exact,
                        "float" => Mode::Float,
                        _ => bail!(bad()),
                    })
                }
                "depth" => cfg.depth = Some(value.parse().with_context(bad)?),
                "tol" => cfg.tol = Some(value.parse().with_context(bad)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "seed" => cfg.seed = Some(value.parse().with_context(bad)?),
                _ => bail!("line {}: unknown key {key:?}", n + 1),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        RunConfig::parse(&text)
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: RunConfig) -> RunConfig {
        RunConfig {
            slope: other.slope.or(self.slope),
            mode: other.mode.or(self.mode),
            depth: other.depth.or(self.depth),
            tol: other.tol.or(self.tol),
            out: other.out.or(self.out),
            seed: other.seed.or(self.seed),
        }
    }

    /// Decimal slopes force float mode; `p/q` and integers default to exact.
    pub fn resolved_mode(&self) -> Result<Mode> {
        let slope = self.slope.as_deref().context("missing --slope")?;
        let decimal = slope.contains(['.', 'e', 'E']);
        match self.mode {
            Some(Mode::Exact) if decimal => {
                bail!("slope {slope} is a decimal; exact mode needs p/q")
            }
            Some(mode) => Ok(mode),
            None if decimal => Ok(Mode::Float),
            None => Ok(Mode::Exact),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overlays() {
        let file =
            RunConfig::parse("# fixture\nslope = 3/2\nseed=7\n\ndepth = 40 # deep\n").unwrap();
        assert_eq!(file.slope.as_deref(), Some("3/2"));
        assert_eq!((file.seed, file.depth), (Some(7), Some(40)));
        let merged = file.overlay(RunConfig {
            seed: Some(9),
            ..Default::default()
        });
        assert_eq!(
            (merged.seed, merged.slope.as_deref()),
            (Some(9), Some("3/2"))
        );
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::parse("speed = 3").is_err());
        assert!(RunConfig::parse("depth = deep").is_err());
        assert!(RunConfig::parse("mode = fuzzy").is_err());
    }

    #[test]
    fn decimals_force_float_mode() {
        let cfg = |s: &str, m| RunConfig {
            slope: Some(s.into()),
            mode: m,
            ..Default::default()
        };
        assert_eq!(cfg("1.5", None).resolved_mode().unwrap(), Mode::Float);
        assert_eq!(cfg("3/2", None).resolved_mode().unwrap(), Mode::Exact);
        assert_eq!(
            cfg("3/2", Some(Mode::Float)).resolved_mode().unwrap(),
            Mode::Float
        );
        assert!(cfg("1.5", Some(Mode::Exact)).resolved_mode().is_err());
    }
}
