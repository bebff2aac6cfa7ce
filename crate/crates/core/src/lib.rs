//! Frequency-dependent polarizabilities of alkali s states, magic lattice
//! frequencies where ground and Rydberg polarizabilities agree, transition
//! coincidence search, and trap release heating.

pub mod atomdata;
pub mod heating;
pub mod matcher;
pub mod polarizability;
pub mod sum;
pub mod units;

pub use atomdata::{
    build_model, bundled_rb, find_coincidences, DipoleSet, Level, LevelKey, LevelSet, ModelConfig,
    PolarizabilityModel, ReducedDipole,
};
pub use matcher::{
    find_free_electron_match, find_magic_wavelength, find_zero_crossings, list_resonances,
    MagicPoint, MatchOptions, MatchPartner,
};
pub use polarizability::{
    free_electron_alpha, total_alpha, valence_alpha, PolarizabilityResult, TermContribution,
};
