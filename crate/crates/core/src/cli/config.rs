//! Run configuration: built-in defaults, then a `key = value` file, then
//! `RYDMAGIC_*` environment variables, then command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use rydmagic::atomdata::{bundled_rb, DipoleSet, LevelKey, LevelSet, ModelConfig};
use rydmagic::units::OmegaUnit;

use super::GlobalArgs;

pub const ENV_PREFIX: &str = "RYDMAGIC_";

/// Keys accepted in config files and (upper-cased, prefixed) in the environment.
pub const KEYS: &[&str] = &[
    "levels",
    "dipoles",
    "format",
    "omega_unit",
    "ground",
    "rydberg",
    "n_max",
    "core_alpha",
    "core_unc",
    "ground_tail",
    "tail",
    "exclusion_halfwidth",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        <Self as ValueEnum>::from_str(s.trim(), true)
            .map_err(|_| anyhow!("unknown output format '{s}' (expected table, csv or json)"))
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Table => "table",
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub levels_path: Option<PathBuf>,
    pub dipoles_path: Option<PathBuf>,
    pub ground: Option<LevelKey>,
    pub rydberg: Option<LevelKey>,
    pub model: ModelConfig,
    pub output_format: OutputFormat,
    /// Unit of ω values given on the command line.
    pub omega_unit: OmegaUnit,
}

pub fn parse_label(s: &str) -> Result<LevelKey> {
    s.trim()
        .parse::<LevelKey>()
        .map_err(|_| anyhow!("'{s}' is not a level label such as 5s1/2 or 15p3/2"))
}

/// `LABEL=VALUE`, e.g. `15s1/2=-0.4`.
pub fn parse_tail(s: &str) -> Result<(LevelKey, f64)> {
    let (label, value) = s
        .split_once('=')
        .ok_or_else(|| anyhow!("tail '{s}' must look like LABEL=VALUE"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| anyhow!("tail '{s}': '{}' is not a number", value.trim()))?;
    Ok((parse_label(label)?, value))
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| anyhow!("{key}: cannot parse '{value}'"))
}

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let file = args
            .config
            .clone()
            .or_else(|| std::env::var_os(format!("{ENV_PREFIX}CONFIG")).map(PathBuf::from));
        if let Some(path) = file {
            cfg.apply_file(&path)?;
        }
        for key in KEYS {
            let var = format!("{ENV_PREFIX}{}", key.to_ascii_uppercase());
            if let Ok(value) = std::env::var(&var) {
                cfg.set(key, &value, None)
                    .with_context(|| format!("environment variable {var}"))?;
            }
        }
        cfg.apply_flags(args)?;
        Ok(cfg)
    }

    fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let base = path.parent();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = || format!("{}:{}", path.display(), i + 1);
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}: expected 'key = value'", at()))?;
            self.set(key.trim(), value.trim(), base).with_context(at)?;
        }
        Ok(())
    }

    /// Applies one key. Relative paths from a file are taken relative to it.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<()> {
        let path = |v: &str| match base {
            Some(b) if Path::new(v).is_relative() => b.join(v),
            _ => PathBuf::from(v),
        };
        match key {
            "levels" => self.levels_path = Some(path(value)),
            "dipoles" => self.dipoles_path = Some(path(value)),
            "format" => self.output_format = value.parse()?,
            "omega_unit" => self.omega_unit = value.parse()?,
            "ground" => self.ground = Some(parse_label(value)?),
            "rydberg" => self.rydberg = Some(parse_label(value)?),
            "n_max" => self.model.n_max = parse_num(key, value)?,
            "core_alpha" => self.model.core_alpha = parse_num(key, value)?,
            "core_unc" => self.model.core_alpha_rel_unc = parse_num(key, value)?,
            "ground_tail" => self.model.ground_tail_alpha = parse_num(key, value)?,
            "exclusion_halfwidth" => self.model.exclusion_halfwidth = parse_num(key, value)?,
            "tail" => {
                for item in value.split(',').filter(|s| !s.trim().is_empty()) {
                    let (k, v) = parse_tail(item)?;
                    self.model.tails.insert(k, v);
                }
            }
            _ => bail!(
                "unknown configuration key '{key}' (known: {})",
                KEYS.join(", ")
            ),
        }
        Ok(())
    }

    fn apply_flags(&mut self, args: &GlobalArgs) -> Result<()> {
        if let Some(p) = &args.levels {
            self.levels_path = Some(p.clone());
        }
        if let Some(p) = &args.dipoles {
            self.dipoles_path = Some(p.clone());
        }
        if let Some(f) = args.format {
            self.output_format = f;
        }
        if let Some(u) = &args.omega_unit {
            self.omega_unit = u.parse().context("--omega-unit")?;
        }
        if let Some(n) = args.n_max {
            self.model.n_max = n;
        }
        if let Some(c) = args.core_alpha {
            self.model.core_alpha = c;
        }
        if let Some(c) = args.core_unc {
            self.model.core_alpha_rel_unc = c;
        }
        if let Some(t) = args.ground_tail {
            self.model.ground_tail_alpha = t;
        }
        if let Some(h) = args.exclusion_halfwidth {
            self.model.exclusion_halfwidth = h;
        }
        for (k, v) in &args.tail {
            self.model.tails.insert(*k, *v);
        }
        Ok(())
    }

    /// Loads the configured dataset, falling back to the bundled Rb tables.
    pub fn load_data(&self) -> Result<(LevelSet, DipoleSet)> {
        let (levels, bundled_dipoles) = match &self.levels_path {
            Some(p) => (LevelSet::load(p)?, None),
            None => {
                let (l, d) = bundled_rb()?;
                (l, Some(d))
            }
        };
        let dipoles = match (&self.dipoles_path, bundled_dipoles) {
            (Some(p), _) => DipoleSet::load(p, &levels)?,
            (None, Some(d)) => d,
            (None, None) => DipoleSet::from_reader(
                rydmagic::atomdata::BUNDLED_RB_DIPOLES.as_bytes(),
                "<bundled rb_dipoles.csv>",
                &levels,
            )
            .context("--levels given without --dipoles; the bundled dipoles do not fit it")?,
        };
        Ok((levels, dipoles))
    }
}
