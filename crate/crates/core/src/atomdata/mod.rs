//! Atomic level and dipole tables, model assembly, and transition coincidences.

mod coincide;
mod dipole;
mod level;
mod model;

use std::io::{Read, Write};

use thiserror::Error;

pub use coincide::{
    find_coincidences, group_by_configuration, Coincidence, CoincidenceError, ConfigurationMatch,
};
pub use dipole::{dipole_allowed, DipoleSet, ReducedDipole, DIPOLE_HEADER};
pub use level::{Level, LevelKey, LevelSet, LEVEL_HEADER};
pub use model::{
    build_model, Channel, ModelConfig, ModelConstants, ModelError, PolarizabilityModel,
    DEFAULT_CORE_ALPHA, DEFAULT_CORE_REL_UNC, DEFAULT_EXCLUSION_HALFWIDTH, DEFAULT_N_MAX,
    GROUND_TAIL_HIGH_N, GROUND_TAIL_INNER_SHELL,
};

/// Bundled Rb level table (NIST energies for low n, quantum defects above).
pub const BUNDLED_RB_LEVELS: &str = include_str!("../../data/rb_levels.csv");
/// Bundled Rb reduced dipole matrix elements.
pub const BUNDLED_RB_DIPOLES: &str = include_str!("../../data/rb_dipoles.csv");

/// Loads the bundled Rb dataset.
pub fn bundled_rb() -> Result<(LevelSet, DipoleSet), DataError> {
    let levels = LevelSet::from_reader(BUNDLED_RB_LEVELS.as_bytes(), "bundled:rb_levels.csv")?;
    let dipoles = DipoleSet::from_reader(
        BUNDLED_RB_DIPOLES.as_bytes(),
        "bundled:rb_dipoles.csv",
        &levels,
    )?;
    Ok((levels, dipoles))
}

#[derive(Debug, Error)]
#[error("cannot parse level label '{0}' (expected e.g. 5s1/2, 15p3/2)")]
pub struct LabelError(pub String);

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{origin}: {source}")]
    Io {
        origin: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: u64,
        message: String,
    },
    #[error("{origin}: expected header '{expected}', found '{found}'")]
    Header {
        origin: String,
        expected: String,
        found: String,
    },
    #[error("{origin}:{line}: duplicate level {key} (first defined on line {first})")]
    DuplicateLevel {
        origin: String,
        line: u64,
        first: u64,
        key: LevelKey,
    },
    #[error("{origin}:{line}: invalid level '{label}': {reason}")]
    InvalidLevel {
        origin: String,
        line: u64,
        label: String,
        reason: String,
    },
    #[error("{origin}: no ground state (a level with energy 0)")]
    MissingGround { origin: String },
    #[error("{origin}:{line}: unresolved level label '{label}'")]
    UnresolvedLabel {
        origin: String,
        line: u64,
        label: String,
    },
    #[error(
        "{origin}:{line}: {a} - {b} violates electric-dipole selection rules (|Δl| = 1, |Δj| <= 1)"
    )]
    SelectionRule {
        origin: String,
        line: u64,
        a: LevelKey,
        b: LevelKey,
    },
    #[error("{origin}:{line}: duplicate dipole pair {a} - {b} (first on line {first})")]
    DuplicatePair {
        origin: String,
        line: u64,
        first: u64,
        a: LevelKey,
        b: LevelKey,
    },
    #[error("{origin}:{line}: {reason}")]
    InvalidDipole {
        origin: String,
        line: u64,
        reason: String,
    },
}

impl DataError {
    fn from_csv(origin: &str, e: csv::Error) -> Self {
        DataError::Parse {
            origin: origin.to_string(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        }
    }
}

fn csv_writer<W: Write>(writer: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer)
}

/// Reads a `#`-commented CSV table, checks its header and returns each data
/// record with its physical line number in the source.
fn read_records<R: Read>(
    mut reader: R,
    origin: &str,
    expected: &[&str],
) -> Result<Vec<(u64, csv::StringRecord)>, DataError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|source| DataError::Io {
            origin: origin.to_string(),
            source,
        })?;
    let mut kept = String::with_capacity(text.len());
    let mut physical = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        kept.push_str(line);
        kept.push('\n');
        physical.push(i as u64 + 1);
    }
    let to_physical = |line: u64| physical.get(line as usize - 1).copied().unwrap_or(line);

    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(kept.as_bytes());
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| to_physical(p.line()));
        DataError::Parse {
            origin: origin.to_string(),
            line,
            message: e.to_string(),
        }
    };
    let found = rdr.headers().map_err(csv_err)?.clone();
    if found.iter().ne(expected.iter().copied()) {
        return Err(DataError::Header {
            origin: origin.to_string(),
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| to_physical(p.line()));
        out.push((line, record));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_dataset_loads() {
        let (levels, dipoles) = bundled_rb().unwrap();
        assert_eq!(levels.ground().label, "5s1/2");
        assert!(levels.len() > 100);
        assert!(dipoles.len() > 600);
    }

    #[test]
    fn round_trip_is_identity() {
        let (levels, dipoles) = bundled_rb().unwrap();
        let mut buf = Vec::new();
        levels.write(&mut buf).unwrap();
        let levels2 = LevelSet::from_reader(buf.as_slice(), "rt").unwrap();
        assert_eq!(levels, levels2);
        let mut buf = Vec::new();
        dipoles.write(&mut buf).unwrap();
        let dipoles2 = DipoleSet::from_reader(buf.as_slice(), "rt", &levels2).unwrap();
        assert_eq!(dipoles, dipoles2);
    }
}
