use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{dipole_allowed, DipoleSet, Level, LevelKey, LevelSet, ReducedDipole};

/// Sum over intermediate p states stops here unless configured otherwise.
pub const DEFAULT_N_MAX: u32 = 23;
/// Static Rb⁺ core polarizability (RPA), a₀³.
pub const DEFAULT_CORE_ALPHA: f64 = 9.1;
/// Relative uncertainty of the core term.
pub const DEFAULT_CORE_REL_UNC: f64 = 0.05;
/// Half-width, in a.u. of ω, of the window around each resonance in which
/// evaluation is refused.
pub const DEFAULT_EXCLUSION_HALFWIDTH: f64 = 1e-6;
/// Ground-state contribution of n' ≥ 9 p states and the continuum, a₀³.
pub const GROUND_TAIL_HIGH_N: f64 = 0.2;
/// Ground-state contribution of the n = 2, 3, 4 core-valence terms, a₀³.
pub const GROUND_TAIL_INNER_SHELL: f64 = -0.3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("level {0} is not in the level table")]
    UnknownLevel(String),
    #[error("target {0} is not an s state; only l = 0 targets are supported")]
    UnsupportedTarget(LevelKey),
    #[error("no p-state channels with dipole data found for target {0} (n_max = {1})")]
    EmptyModel(LevelKey, u32),
    #[error("channel {channel} is invalid for target {target}: {reason}")]
    InvalidChannel {
        target: LevelKey,
        channel: LevelKey,
        reason: String,
    },
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub n_max: u32,
    pub core_alpha: f64,
    pub core_alpha_rel_unc: f64,
    /// Tail used for the dataset's ground state when `tails` has no entry.
    pub ground_tail_alpha: f64,
    /// Explicit per-target tail constants, a₀³.
    pub tails: BTreeMap<LevelKey, f64>,
    pub exclusion_halfwidth: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
            core_alpha: DEFAULT_CORE_ALPHA,
            core_alpha_rel_unc: DEFAULT_CORE_REL_UNC,
            ground_tail_alpha: GROUND_TAIL_HIGH_N + GROUND_TAIL_INNER_SHELL,
            tails: BTreeMap::new(),
            exclusion_halfwidth: DEFAULT_EXCLUSION_HALFWIDTH,
        }
    }
}

/// Scalar constants attached to a model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelConstants {
    pub n_max: u32,
    pub core_alpha: f64,
    pub core_alpha_rel_unc: f64,
    pub tail_alpha: f64,
    pub exclusion_halfwidth: f64,
}

impl Default for ModelConstants {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_N_MAX,
            core_alpha: DEFAULT_CORE_ALPHA,
            core_alpha_rel_unc: DEFAULT_CORE_REL_UNC,
            tail_alpha: 0.0,
            exclusion_halfwidth: DEFAULT_EXCLUSION_HALFWIDTH,
        }
    }
}

/// An intermediate level together with its coupling to the target.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub level: Level,
    pub dipole: ReducedDipole,
}

/// Target state, its dipole channels and the constant offsets. Channels are
/// kept ordered by (n, j) of the intermediate level.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizabilityModel {
    target: Level,
    channels: Vec<Channel>,
    constants: ModelConstants,
}

impl PolarizabilityModel {
    pub fn new(
        target: Level,
        mut channels: Vec<Channel>,
        constants: ModelConstants,
    ) -> Result<Self, ModelError> {
        let c = &constants;
        if !(c.exclusion_halfwidth > 0.0 && c.exclusion_halfwidth.is_finite()) {
            return Err(ModelError::InvalidParameter(format!(
                "exclusion half-width must be positive, got {}",
                c.exclusion_halfwidth
            )));
        }
        if !(c.core_alpha_rel_unc >= 0.0 && c.core_alpha_rel_unc.is_finite()) {
            return Err(ModelError::InvalidParameter(format!(
                "core relative uncertainty must be >= 0, got {}",
                c.core_alpha_rel_unc
            )));
        }
        if !c.core_alpha.is_finite() || !c.tail_alpha.is_finite() {
            return Err(ModelError::InvalidParameter(
                "core and tail constants must be finite".into(),
            ));
        }
        let tk = target.key();
        let mut seen = BTreeSet::new();
        for ch in &channels {
            let k = ch.level.key();
            let invalid = |reason: &str| ModelError::InvalidChannel {
                target: tk,
                channel: k,
                reason: reason.to_string(),
            };
            if !dipole_allowed(&tk, &k) {
                return Err(invalid("violates |Δl| = 1, |Δj| <= 1"));
            }
            if !ch.dipole.connects(&tk, &k) {
                return Err(invalid("dipole entry does not connect target and channel"));
            }
            if k.n > c.n_max {
                return Err(invalid(&format!("n exceeds n_max = {}", c.n_max)));
            }
            if !seen.insert(k) {
                return Err(invalid("duplicate channel"));
            }
        }
        channels.sort_by_key(|ch| {
            let k = ch.level.key();
            (k.n, k.two_j, k.l)
        });
        Ok(Self {
            target,
            channels,
            constants,
        })
    }

    pub fn target(&self) -> &Level {
        &self.target
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn constants(&self) -> &ModelConstants {
        &self.constants
    }

    pub fn n_max(&self) -> u32 {
        self.constants.n_max
    }

    pub fn core_alpha(&self) -> f64 {
        self.constants.core_alpha
    }

    pub fn core_alpha_rel_unc(&self) -> f64 {
        self.constants.core_alpha_rel_unc
    }

    pub fn tail_alpha(&self) -> f64 {
        self.constants.tail_alpha
    }

    pub fn exclusion_halfwidth(&self) -> f64 {
        self.constants.exclusion_halfwidth
    }
}

/// Collects every np₁/₂ and np₃/₂ level with n ≤ n_max that has a dipole
/// entry with the s-state target.
pub fn build_model(
    target: &LevelKey,
    levels: &LevelSet,
    dipoles: &DipoleSet,
    config: &ModelConfig,
) -> Result<PolarizabilityModel, ModelError> {
    let target_level = levels
        .get(target)
        .ok_or_else(|| ModelError::UnknownLevel(target.to_string()))?;
    if target.l != 0 {
        return Err(ModelError::UnsupportedTarget(*target));
    }
    let channels: Vec<Channel> = levels
        .iter()
        .filter(|lv| lv.l == 1 && lv.n <= config.n_max)
        .filter_map(|lv| {
            dipoles.get(target, &lv.key()).map(|d| Channel {
                level: lv.clone(),
                dipole: d.clone(),
            })
        })
        .collect();
    if channels.is_empty() {
        return Err(ModelError::EmptyModel(*target, config.n_max));
    }

    let mut by_n: BTreeMap<u32, usize> = BTreeMap::new();
    for ch in &channels {
        *by_n.entry(ch.level.n).or_default() += 1;
    }
    for (n, count) in by_n {
        if count == 1 {
            log::warn!(
                "target {target}: {n}p has only one fine-structure component with dipole data"
            );
        }
    }

    let tail_alpha = match config.tails.get(target) {
        Some(&t) => t,
        None if levels.ground().key() == *target => config.ground_tail_alpha,
        None => 0.0,
    };
    PolarizabilityModel::new(
        target_level.clone(),
        channels,
        ModelConstants {
            n_max: config.n_max,
            core_alpha: config.core_alpha,
            core_alpha_rel_unc: config.core_alpha_rel_unc,
            tail_alpha,
            exclusion_halfwidth: config.exclusion_halfwidth,
        },
    )
}
