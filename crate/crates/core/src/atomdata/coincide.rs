use std::cmp::Ordering;

use thiserror::Error;

use super::{dipole_allowed, Level, LevelKey, LevelSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoincidenceError {
    #[error("level {0} is not in the level table")]
    UnknownLevel(LevelKey),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
}

/// A level pair whose transition energy nearly equals a reference transition.
#[derive(Clone, Debug, PartialEq)]
pub struct Coincidence {
    /// (lower, upper) in energy.
    pub pair: (Level, Level),
    pub delta_e: f64,
    pub target_delta_e: f64,
    pub mismatch: f64,
}

/// Coincidences that share the same (n, l) configurations, e.g. all 6s-15p lines.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigurationMatch {
    pub lower: String,
    pub upper: String,
    pub best_mismatch: f64,
    pub members: Vec<Coincidence>,
}

fn mismatch_of(lower: &Level, upper: &Level, target: f64) -> (f64, f64) {
    let de = upper.energy_cm1 - lower.energy_cm1;
    (de, (de - target).abs())
}

fn order(a: &Coincidence, b: &Coincidence) -> Ordering {
    a.mismatch
        .total_cmp(&b.mismatch)
        .then_with(|| a.pair.0.key().cmp(&b.pair.0.key()))
        .then_with(|| a.pair.1.key().cmp(&b.pair.1.key()))
}

/// All unordered level pairs whose energy gap is within `tolerance` (cm⁻¹) of
/// the gap of `target_pair`, sorted by mismatch. The target pair itself is
/// excluded. With `dipole_only`, only E1-allowed pairs are considered.
pub fn find_coincidences(
    levels: &LevelSet,
    target_pair: (LevelKey, LevelKey),
    tolerance: f64,
    dipole_only: bool,
) -> Result<Vec<Coincidence>, CoincidenceError> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(CoincidenceError::InvalidTolerance(tolerance));
    }
    let ta = levels
        .get(&target_pair.0)
        .ok_or(CoincidenceError::UnknownLevel(target_pair.0))?;
    let tb = levels
        .get(&target_pair.1)
        .ok_or(CoincidenceError::UnknownLevel(target_pair.1))?;
    let target = (ta.energy_cm1 - tb.energy_cm1).abs();
    let is_target = |a: &LevelKey, b: &LevelKey| {
        (*a == target_pair.0 && *b == target_pair.1) || (*a == target_pair.1 && *b == target_pair.0)
    };

    let mut sorted: Vec<&Level> = levels.iter().collect();
    sorted.sort_by(|a, b| {
        a.energy_cm1
            .total_cmp(&b.energy_cm1)
            .then_with(|| a.key().cmp(&b.key()))
    });
    // Window search over energy-sorted levels; the slack keeps rounding at the
    // window edges from dropping pairs that pass the exact test below.
    let slack = 1e-9 * (target + tolerance).max(1.0);
    let mut out = Vec::new();
    for (i, lower) in sorted.iter().enumerate() {
        let lo_e = lower.energy_cm1 + target - tolerance - slack;
        let hi_e = lower.energy_cm1 + target + tolerance + slack;
        let start = sorted.partition_point(|lv| lv.energy_cm1 < lo_e).max(i + 1);
        for upper in sorted[start..]
            .iter()
            .take_while(|lv| lv.energy_cm1 <= hi_e)
        {
            let (lk, uk) = (lower.key(), upper.key());
            if is_target(&lk, &uk) || (dipole_only && !dipole_allowed(&lk, &uk)) {
                continue;
            }
            let (delta_e, mismatch) = mismatch_of(lower, upper, target);
            if mismatch <= tolerance {
                out.push(Coincidence {
                    pair: ((*lower).clone(), (*upper).clone()),
                    delta_e,
                    target_delta_e: target,
                    mismatch,
                });
            }
        }
    }
    out.sort_by(order);
    Ok(out)
}

/// Groups fine-structure coincidences by configuration pair, ordered by the
/// best member mismatch.
pub fn group_by_configuration(coincidences: &[Coincidence]) -> Vec<ConfigurationMatch> {
    let mut groups: Vec<ConfigurationMatch> = Vec::new();
    for c in coincidences {
        let lower = c.pair.0.key().configuration();
        let upper = c.pair.1.key().configuration();
        match groups
            .iter_mut()
            .find(|g| g.lower == lower && g.upper == upper)
        {
            Some(g) => {
                g.best_mismatch = g.best_mismatch.min(c.mismatch);
                g.members.push(c.clone());
            }
            None => groups.push(ConfigurationMatch {
                lower,
                upper,
                best_mismatch: c.mismatch,
                members: vec![c.clone()],
            }),
        }
    }
    groups.sort_by(|a, b| a.best_mismatch.total_cmp(&b.best_mismatch));
    groups
}
