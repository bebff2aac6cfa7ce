use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{csv_writer, read_records, DataError, LevelKey, LevelSet};

pub const DIPOLE_HEADER: [&str; 5] = [
    "state_a",
    "state_b",
    "reduced_me_au",
    "uncertainty_au",
    "source",
];

/// Electric-dipole selection rules on fine-structure levels: |Δl| = 1, |Δj| ≤ 1.
pub fn dipole_allowed(a: &LevelKey, b: &LevelKey) -> bool {
    a.l.abs_diff(b.l) == 1 && a.two_j.abs_diff(b.two_j) <= 2
}

/// Reduced matrix element ⟨a‖D‖b⟩ in e·a₀. The sign is kept as tabulated.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDipole {
    pub state_a: LevelKey,
    pub state_b: LevelKey,
    pub value: f64,
    pub uncertainty: f64,
    pub source: String,
}

impl ReducedDipole {
    pub fn new(state_a: LevelKey, state_b: LevelKey, value: f64, uncertainty: f64) -> Self {
        Self {
            state_a,
            state_b,
            value,
            uncertainty,
            source: String::new(),
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn connects(&self, a: &LevelKey, b: &LevelKey) -> bool {
        (self.state_a == *a && self.state_b == *b) || (self.state_a == *b && self.state_b == *a)
    }

    fn pair(&self) -> (LevelKey, LevelKey) {
        unordered(self.state_a, self.state_b)
    }
}

fn unordered(a: LevelKey, b: LevelKey) -> (LevelKey, LevelKey) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DipoleRow {
    state_a: String,
    state_b: String,
    reduced_me_au: f64,
    uncertainty_au: f64,
    source: String,
}

#[derive(Clone, Debug)]
pub struct DipoleSet {
    entries: Vec<ReducedDipole>,
    index: HashMap<(LevelKey, LevelKey), usize>,
}

impl PartialEq for DipoleSet {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl DipoleSet {
    pub fn new(entries: Vec<ReducedDipole>, levels: &LevelSet) -> Result<Self, DataError> {
        let lines: Vec<u64> = (1..=entries.len() as u64).collect();
        Self::build("<memory>", entries, &lines, levels)
    }

    fn build(
        origin: &str,
        entries: Vec<ReducedDipole>,
        lines: &[u64],
        levels: &LevelSet,
    ) -> Result<Self, DataError> {
        let mut index = HashMap::with_capacity(entries.len());
        for (i, d) in entries.iter().enumerate() {
            let line = lines[i];
            for key in [&d.state_a, &d.state_b] {
                if levels.get(key).is_none() {
                    return Err(DataError::UnresolvedLabel {
                        origin: origin.to_string(),
                        line,
                        label: key.to_string(),
                    });
                }
            }
            if !dipole_allowed(&d.state_a, &d.state_b) {
                return Err(DataError::SelectionRule {
                    origin: origin.to_string(),
                    line,
                    a: d.state_a,
                    b: d.state_b,
                });
            }
            if !d.value.is_finite() || !d.uncertainty.is_finite() || d.uncertainty < 0.0 {
                return Err(DataError::InvalidDipole {
                    origin: origin.to_string(),
                    line,
                    reason: "matrix element and uncertainty must be finite, uncertainty >= 0"
                        .into(),
                });
            }
            if let Some(&first) = index.get(&d.pair()) {
                return Err(DataError::DuplicatePair {
                    origin: origin.to_string(),
                    line,
                    first: lines[first],
                    a: d.state_a,
                    b: d.state_b,
                });
            }
            index.insert(d.pair(), i);
        }
        Ok(Self { entries, index })
    }

    pub fn load(path: impl AsRef<Path>, levels: &LevelSet) -> Result<Self, DataError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| DataError::Io {
            origin: path.display().to_string(),
            source,
        })?;
        Self::from_reader(file, &path.display().to_string(), levels)
    }

    pub fn from_reader<R: Read>(
        reader: R,
        origin: &str,
        levels: &LevelSet,
    ) -> Result<Self, DataError> {
        let records = read_records(reader, origin, &DIPOLE_HEADER)?;
        let mut entries = Vec::new();
        let mut lines = Vec::new();
        for (line, record) in records {
            let row: DipoleRow = record.deserialize(None).map_err(|e| DataError::Parse {
                origin: origin.to_string(),
                line,
                message: e.to_string(),
            })?;
            let resolve = |label: &str| {
                label
                    .parse::<LevelKey>()
                    .map_err(|_| DataError::UnresolvedLabel {
                        origin: origin.to_string(),
                        line,
                        label: label.to_string(),
                    })
            };
            entries.push(ReducedDipole {
                state_a: resolve(&row.state_a)?,
                state_b: resolve(&row.state_b)?,
                value: row.reduced_me_au,
                uncertainty: row.uncertainty_au,
                source: row.source,
            });
            lines.push(line);
        }
        Self::build(origin, entries, &lines, levels)
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<(), DataError> {
        let mut wtr = csv_writer(writer);
        wtr.write_record(DIPOLE_HEADER)
            .map_err(|e| DataError::from_csv("<output>", e))?;
        for d in &self.entries {
            wtr.serialize(DipoleRow {
                state_a: d.state_a.to_string(),
                state_b: d.state_b.to_string(),
                reduced_me_au: d.value,
                uncertainty_au: d.uncertainty,
                source: d.source.clone(),
            })
            .map_err(|e| DataError::from_csv("<output>", e))?;
        }
        wtr.flush().map_err(|source| DataError::Io {
            origin: "<output>".into(),
            source,
        })
    }

    pub fn get(&self, a: &LevelKey, b: &LevelKey) -> Option<&ReducedDipole> {
        self.index
            .get(&unordered(*a, *b))
            .map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[ReducedDipole] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levels() -> LevelSet {
        let text = "label,n,l,two_j,energy_cm1,source\n\
            5s1/2,5,0,1,0,x\n5p1/2,5,1,1,12578.95,x\n5p3/2,5,1,3,12816.545,x\n\
            4d5/2,4,2,5,19355.203,x\n";
        LevelSet::from_reader(text.as_bytes(), "levels").unwrap()
    }

    const HEADER: &str = "state_a,state_b,reduced_me_au,uncertainty_au,source\n";

    #[test]
    fn accepts_allowed_row() {
        let text = format!("{HEADER}5s1/2,5p3/2,5.977,0.005,exp\n");
        let set = DipoleSet::from_reader(text.as_bytes(), "d", &levels()).unwrap();
        let k = |s: &str| s.parse::<LevelKey>().unwrap();
        let d = set.get(&k("5p3/2"), &k("5s1/2")).unwrap();
        assert_eq!(d.value, 5.977);
        assert_eq!(d.uncertainty, 0.005);
    }

    #[test]
    fn rejects_s_s_pair() {
        let text = format!("{HEADER}5s1/2,5s1/2,1.0,0,x\n");
        assert!(matches!(
            DipoleSet::from_reader(text.as_bytes(), "d", &levels()).unwrap_err(),
            DataError::SelectionRule { line: 2, .. }
        ));
    }

    #[test]
    fn rejects_delta_j_two() {
        // p1/2 - d5/2 has |Δj| = 2
        let text = format!("{HEADER}5p1/2,4d5/2,1.0,0,x\n");
        assert!(DipoleSet::from_reader(text.as_bytes(), "d", &levels()).is_err());
    }

    #[test]
    fn rejects_unknown_label() {
        let text = format!("{HEADER}5s1/2,4f5/2,1.0,0,x\n");
        let err = DipoleSet::from_reader(text.as_bytes(), "d", &levels()).unwrap_err();
        assert!(matches!(err, DataError::UnresolvedLabel { .. }));
        assert!(err.to_string().contains("4f5/2"));
    }

    #[test]
    fn rejects_duplicate_unordered_pair() {
        let text = format!("{HEADER}5s1/2,5p1/2,4.2,0,x\n5p1/2,5s1/2,4.2,0,x\n");
        assert!(matches!(
            DipoleSet::from_reader(text.as_bytes(), "d", &levels()).unwrap_err(),
            DataError::DuplicatePair {
                line: 3,
                first: 2,
                ..
            }
        ));
    }

    #[test]
    fn rejects_negative_uncertainty() {
        let text = format!("{HEADER}5s1/2,5p1/2,4.2,-0.1,x\n");
        assert!(DipoleSet::from_reader(text.as_bytes(), "d", &levels()).is_err());
    }
}
