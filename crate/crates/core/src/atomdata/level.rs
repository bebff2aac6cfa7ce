use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{csv_writer, read_records, DataError, LabelError};

const ORBITAL_LETTERS: &[u8] = b"spdfghiklmnoq";

pub const LEVEL_HEADER: [&str; 6] = ["label", "n", "l", "two_j", "energy_cm1", "source"];

/// Identity of a fine-structure level: n, l and 2j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelKey {
    pub n: u32,
    pub l: u32,
    pub two_j: u32,
}

impl LevelKey {
    pub const fn new(n: u32, l: u32, two_j: u32) -> Self {
        Self { n, l, two_j }
    }

    pub fn j(&self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    /// Checks n ≥ 1, l < n and j = l ± 1/2 with j > 0.
    pub fn check(&self) -> Result<(), String> {
        if self.n == 0 {
            return Err("principal quantum number must be >= 1".into());
        }
        if self.l >= self.n {
            return Err(format!("l = {} is not below n = {}", self.l, self.n));
        }
        if self.two_j == 0 {
            return Err("j must be positive".into());
        }
        let two_l = 2 * self.l;
        if self.two_j != two_l + 1 && self.two_j + 1 != two_l {
            return Err(format!(
                "j = {}/2 is not l ± 1/2 for l = {}",
                self.two_j, self.l
            ));
        }
        Ok(())
    }

    pub fn orbital_letter(&self) -> char {
        ORBITAL_LETTERS
            .get(self.l as usize)
            .map(|&b| b as char)
            .unwrap_or('?')
    }

    /// Configuration label without j, e.g. `15p`.
    pub fn configuration(&self) -> String {
        format!("{}{}", self.n, self.orbital_letter())
    }
}

impl fmt::Display for LevelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}/2", self.n, self.orbital_letter(), self.two_j)
    }
}

impl FromStr for LevelKey {
    type Err = LabelError;

    /// Parses labels such as `5s1/2`, `15p3/2`, `4d5/2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || LabelError(s.to_string());
        let s_trim = s.trim();
        let digits = s_trim.bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(err());
        }
        let n: u32 = s_trim[..digits].parse().map_err(|_| err())?;
        let rest = &s_trim[digits..];
        let letter = rest.bytes().next().ok_or_else(err)?.to_ascii_lowercase();
        let l = ORBITAL_LETTERS
            .iter()
            .position(|&b| b == letter)
            .ok_or_else(err)? as u32;
        let j_part = rest[1..].strip_suffix("/2").ok_or_else(err)?;
        let two_j: u32 = j_part.parse().map_err(|_| err())?;
        let key = LevelKey { n, l, two_j };
        key.check().map_err(|_| err())?;
        Ok(key)
    }
}

/// One fine-structure level. Energies are kept in cm⁻¹ above the ground state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub label: String,
    pub n: u32,
    pub l: u32,
    pub two_j: u32,
    pub energy_cm1: f64,
    pub source: String,
}

impl Level {
    pub fn new(key: LevelKey, energy_cm1: f64, source: impl Into<String>) -> Self {
        Self {
            label: key.to_string(),
            n: key.n,
            l: key.l,
            two_j: key.two_j,
            energy_cm1,
            source: source.into(),
        }
    }

    pub fn key(&self) -> LevelKey {
        LevelKey::new(self.n, self.l, self.two_j)
    }

    pub fn j(&self) -> f64 {
        self.key().j()
    }

    fn validate(&self) -> Result<(), String> {
        let key = self.key();
        key.check()?;
        if self.label != key.to_string() {
            return Err(format!(
                "label '{}' does not match quantum numbers (expected '{}')",
                self.label, key
            ));
        }
        if !self.energy_cm1.is_finite() {
            return Err("energy is not finite".into());
        }
        if self.energy_cm1 < 0.0 {
            return Err("energy lies below the ground state".into());
        }
        Ok(())
    }
}

/// A validated, indexed set of levels with an identified ground state.
#[derive(Clone, Debug)]
pub struct LevelSet {
    levels: Vec<Level>,
    index: HashMap<LevelKey, usize>,
    ground: usize,
}

impl PartialEq for LevelSet {
    fn eq(&self, other: &Self) -> bool {
        self.levels == other.levels
    }
}

impl LevelSet {
    pub fn new(levels: Vec<Level>) -> Result<Self, DataError> {
        let lines: Vec<u64> = (1..=levels.len() as u64).collect();
        Self::build("<memory>", levels, &lines)
    }

    fn build(origin: &str, levels: Vec<Level>, lines: &[u64]) -> Result<Self, DataError> {
        let mut index = HashMap::with_capacity(levels.len());
        let mut ground = None;
        for (i, level) in levels.iter().enumerate() {
            level.validate().map_err(|reason| DataError::InvalidLevel {
                origin: origin.to_string(),
                line: lines[i],
                label: level.label.clone(),
                reason,
            })?;
            if let Some(&first) = index.get(&level.key()) {
                return Err(DataError::DuplicateLevel {
                    origin: origin.to_string(),
                    line: lines[i],
                    first: lines[first],
                    key: level.key(),
                });
            }
            index.insert(level.key(), i);
            if level.energy_cm1 == 0.0 {
                if let Some(g) = ground {
                    return Err(DataError::InvalidLevel {
                        origin: origin.to_string(),
                        line: lines[i],
                        label: level.label.clone(),
                        reason: format!(
                            "second zero-energy level (ground already on line {})",
                            lines[g]
                        ),
                    });
                }
                ground = Some(i);
            }
        }
        let ground = ground.ok_or_else(|| DataError::MissingGround {
            origin: origin.to_string(),
        })?;
        Ok(Self {
            levels,
            index,
            ground,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| DataError::Io {
            origin: path.display().to_string(),
            source,
        })?;
        Self::from_reader(file, &path.display().to_string())
    }

    pub fn from_reader<R: Read>(reader: R, origin: &str) -> Result<Self, DataError> {
        let records = read_records(reader, origin, &LEVEL_HEADER)?;
        let mut levels = Vec::new();
        let mut lines = Vec::new();
        for (line, record) in records {
            let level: Level = record.deserialize(None).map_err(|e| DataError::Parse {
                origin: origin.to_string(),
                line,
                message: e.to_string(),
            })?;
            levels.push(level);
            lines.push(line);
        }
        Self::build(origin, levels, &lines)
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<(), DataError> {
        let mut wtr = csv_writer(writer);
        wtr.write_record(LEVEL_HEADER)
            .map_err(|e| DataError::from_csv("<output>", e))?;
        for level in &self.levels {
            wtr.serialize(level)
                .map_err(|e| DataError::from_csv("<output>", e))?;
        }
        wtr.flush().map_err(|source| DataError::Io {
            origin: "<output>".into(),
            source,
        })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn iter(&self) -> impl Iterator<Item = &Level> {
        self.levels.iter()
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn ground(&self) -> &Level {
        &self.levels[self.ground]
    }

    pub fn get(&self, key: &LevelKey) -> Option<&Level> {
        self.index.get(key).map(|&i| &self.levels[i])
    }

    /// Looks a level up by its text label.
    pub fn resolve(&self, label: &str) -> Option<&Level> {
        label.parse::<LevelKey>().ok().and_then(|k| self.get(&k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# comment line
label,n,l,two_j,energy_cm1,source
5s1/2,5,0,1,0.0,NIST
5p1/2,5,1,1,12578.950,NIST
# interleaved comment
5p3/2,5,1,3,12816.545,NIST
";

    #[test]
    fn parses_labels() {
        assert_eq!("5s1/2".parse::<LevelKey>().unwrap(), LevelKey::new(5, 0, 1));
        assert_eq!(
            "15p3/2".parse::<LevelKey>().unwrap(),
            LevelKey::new(15, 1, 3)
        );
        assert_eq!("4d5/2".parse::<LevelKey>().unwrap(), LevelKey::new(4, 2, 5));
        for bad in [
            "5s3/2", "s1/2", "5x1/2", "5p", "5p3", "0s1/2", "2d3/2", "5p5/2",
        ] {
            assert!(bad.parse::<LevelKey>().is_err(), "{bad}");
        }
        assert_eq!(LevelKey::new(12, 3, 7).to_string(), "12f7/2");
    }

    #[test]
    fn loads_small_file() {
        let set = LevelSet::from_reader(SMALL.as_bytes(), "small").unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set.ground().label, "5s1/2");
        assert_eq!(set.resolve("5p3/2").unwrap().energy_cm1, 12816.545);
    }

    #[test]
    fn duplicate_cites_both_lines() {
        let text = format!("{SMALL}5p3/2,5,1,3,12816.6,dup\n");
        let err = LevelSet::from_reader(text.as_bytes(), "dup.csv").unwrap_err();
        match err {
            DataError::DuplicateLevel { line, first, .. } => {
                assert_eq!(first, 6);
                assert_eq!(line, 7);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(LevelSet::from_reader(text.as_bytes(), "dup.csv")
            .unwrap_err()
            .to_string()
            .contains("dup.csv:7"));
    }

    #[test]
    fn rejects_bad_j() {
        let text = "label,n,l,two_j,energy_cm1,source\n5s3/2,5,0,3,0,x\n";
        assert!(matches!(
            LevelSet::from_reader(text.as_bytes(), "j").unwrap_err(),
            DataError::InvalidLevel { line: 2, .. }
        ));
    }

    #[test]
    fn rejects_missing_ground() {
        let text = "label,n,l,two_j,energy_cm1,source\n5p1/2,5,1,1,12578.95,x\n";
        assert!(matches!(
            LevelSet::from_reader(text.as_bytes(), "g").unwrap_err(),
            DataError::MissingGround { .. }
        ));
    }

    #[test]
    fn rejects_wrong_header() {
        let text = "label,n,l,j,energy,source\n5s1/2,5,0,1,0,x\n";
        assert!(matches!(
            LevelSet::from_reader(text.as_bytes(), "h").unwrap_err(),
            DataError::Header { .. }
        ));
    }

    #[test]
    fn rejects_label_mismatch() {
        let text = "label,n,l,two_j,energy_cm1,source\n5s1/2,6,0,1,0,x\n";
        assert!(LevelSet::from_reader(text.as_bytes(), "m").is_err());
    }
}
