//! Scalar dynamic polarizability of an s-state target by direct summation
//! over dipole channels, plus constant core and tail terms.
//!
//! For each channel with energy gap δE = E_i − E_target (a.u.) and reduced
//! matrix element D, the valence term is
//!
//! ```text
//! α_i(ω) = (1/3) · δE · D² / (δE² − ω²)
//! ```
//!
//! Both fine-structure components of each np level enter as separate channels.
//! Terms for Rydberg targets cancel heavily, so they are accumulated with
//! compensated summation.

use serde::Serialize;
use thiserror::Error;

use crate::atomdata::{Level, LevelKey, PolarizabilityModel, ReducedDipole};
use crate::sum::CompensatedSum;
use crate::units::cm1_to_au;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error(
        "omega = {omega} a.u. is within {halfwidth} a.u. of the {target} - {channel} resonance at {omega_res} a.u."
    )]
    ResonanceProximity {
        target: LevelKey,
        channel: LevelKey,
        omega_res: f64,
        omega: f64,
        halfwidth: f64,
    },
    #[error("omega = {omega} a.u. sits exactly on the {target} - {channel} pole")]
    Pole {
        target: LevelKey,
        channel: LevelKey,
        omega: f64,
    },
    #[error("the free-electron polarizability diverges at omega = 0")]
    ZeroFrequency,
    #[error("omega must be finite, got {0}")]
    NonFinite(f64),
}

/// Whether evaluation inside a resonance exclusion window is refused.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WindowPolicy {
    #[default]
    Enforce,
    /// Evaluate anyway and flag the result as excluded.
    Allow,
}

/// One row of a term breakdown.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermContribution {
    pub level: Level,
    #[serde(skip)]
    pub dipole: ReducedDipole,
    pub d_value: f64,
    /// E_intermediate − E_target, a.u.
    pub delta_e: f64,
    /// δE² − ω², a.u.
    pub denominator: f64,
    pub contribution: f64,
    /// Running compensated sum of `contribution` in channel order.
    pub accumulated: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolarizabilityResult {
    pub omega: f64,
    pub valence: f64,
    pub core: f64,
    pub tail: f64,
    pub total: f64,
    pub uncertainty: f64,
    pub terms: Vec<TermContribution>,
    pub excluded: bool,
}

/// α_free(ω) = −1/ω² in atomic units.
pub fn free_electron_alpha(omega: f64) -> Result<f64, EvalError> {
    if !omega.is_finite() {
        return Err(EvalError::NonFinite(omega));
    }
    if omega == 0.0 {
        return Err(EvalError::ZeroFrequency);
    }
    Ok(-1.0 / (omega * omega))
}

/// Single-channel term (1/3)·δE·D²/(δE² − ω²).
#[inline]
pub fn channel_term(delta_e: f64, d_value: f64, omega: f64) -> (f64, f64) {
    let denominator = delta_e * delta_e - omega * omega;
    (denominator, delta_e * d_value * d_value / denominator / 3.0)
}

/// Channel gap δE in a.u. for a model channel.
pub fn channel_delta_e(model: &PolarizabilityModel, level: &Level) -> f64 {
    cm1_to_au(level.energy_cm1 - model.target().energy_cm1)
}

struct Valence {
    value: f64,
    variance: f64,
    excluded: bool,
}

fn evaluate(
    model: &PolarizabilityModel,
    omega: f64,
    policy: WindowPolicy,
    mut on_term: impl FnMut(TermContribution),
) -> Result<Valence, EvalError> {
    if !omega.is_finite() {
        return Err(EvalError::NonFinite(omega));
    }
    let target = model.target().key();
    let halfwidth = model.exclusion_halfwidth();
    let mut acc = CompensatedSum::new();
    let mut variance = CompensatedSum::new();
    let mut excluded = false;
    for ch in model.channels() {
        let delta_e = channel_delta_e(model, &ch.level);
        let omega_res = delta_e.abs();
        if (omega.abs() - omega_res).abs() < halfwidth {
            match policy {
                WindowPolicy::Enforce => {
                    return Err(EvalError::ResonanceProximity {
                        target,
                        channel: ch.level.key(),
                        omega_res,
                        omega,
                        halfwidth,
                    })
                }
                WindowPolicy::Allow => excluded = true,
            }
        }
        let d = ch.dipole.value;
        let (denominator, contribution) = channel_term(delta_e, d, omega);
        if denominator == 0.0 {
            return Err(EvalError::Pole {
                target,
                channel: ch.level.key(),
                omega,
            });
        }
        acc.add(contribution);
        let d_alpha_d_d = 2.0 * delta_e * d / denominator / 3.0;
        let s = d_alpha_d_d * ch.dipole.uncertainty;
        variance.add(s * s);
        on_term(TermContribution {
            level: ch.level.clone(),
            dipole: ch.dipole.clone(),
            d_value: d,
            delta_e,
            denominator,
            contribution,
            accumulated: acc.value(),
        });
    }
    Ok(Valence {
        value: acc.value(),
        variance: variance.value(),
        excluded,
    })
}

pub fn valence_alpha(
    model: &PolarizabilityModel,
    omega: f64,
) -> Result<(f64, Vec<TermContribution>), EvalError> {
    valence_alpha_with(model, omega, WindowPolicy::Enforce)
}

pub fn valence_alpha_with(
    model: &PolarizabilityModel,
    omega: f64,
    policy: WindowPolicy,
) -> Result<(f64, Vec<TermContribution>), EvalError> {
    let mut terms = Vec::with_capacity(model.channels().len());
    let v = evaluate(model, omega, policy, |t| terms.push(t))?;
    Ok((v.value, terms))
}

pub fn total_alpha(
    model: &PolarizabilityModel,
    omega: f64,
) -> Result<PolarizabilityResult, EvalError> {
    total_alpha_with(model, omega, WindowPolicy::Enforce)
}

/// Valence + core + tail, with first-order propagation of the dipole and
/// core uncertainties.
pub fn total_alpha_with(
    model: &PolarizabilityModel,
    omega: f64,
    policy: WindowPolicy,
) -> Result<PolarizabilityResult, EvalError> {
    let mut terms = Vec::with_capacity(model.channels().len());
    let v = evaluate(model, omega, policy, |t| terms.push(t))?;
    let core = model.core_alpha();
    let tail = model.tail_alpha();
    let core_sigma = core * model.core_alpha_rel_unc();
    Ok(PolarizabilityResult {
        omega,
        valence: v.value,
        core,
        tail,
        total: v.value + core + tail,
        uncertainty: (v.variance + core_sigma * core_sigma).sqrt(),
        terms,
        excluded: v.excluded,
    })
}

/// Total polarizability value only, without building the term list.
pub fn total_alpha_value(model: &PolarizabilityModel, omega: f64) -> Result<f64, EvalError> {
    let v = evaluate(model, omega, WindowPolicy::Enforce, |_| {})?;
    Ok(v.value + model.core_alpha() + model.tail_alpha())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomdata::{Channel, LevelKey, ModelConstants};
    use crate::units::CONSTANTS;
    use proptest::prelude::*;

    fn key(s: &str) -> LevelKey {
        s.parse().unwrap()
    }

    /// Target at 0 and p channels at the given (n, 2j, δE a.u., D, σ_D).
    fn model(
        channels: &[(u32, u32, f64, f64, f64)],
        constants: ModelConstants,
    ) -> PolarizabilityModel {
        let target = Level::new(key("1s1/2"), 0.0, "t");
        let chans = channels
            .iter()
            .map(|&(n, two_j, de, d, s)| {
                let lv = Level::new(
                    LevelKey::new(n, 1, two_j),
                    de * CONSTANTS.hartree_wavenumber,
                    "c",
                );
                Channel {
                    dipole: ReducedDipole::new(target.key(), lv.key(), d, s),
                    level: lv,
                }
            })
            .collect();
        PolarizabilityModel::new(target, chans, constants).unwrap()
    }

    fn bare() -> ModelConstants {
        ModelConstants {
            core_alpha: 0.0,
            core_alpha_rel_unc: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn free_electron_values() {
        assert!((free_electron_alpha(0.0576645).unwrap() + 300.7).abs() < 0.05);
        assert!((free_electron_alpha(0.1).unwrap() + 100.0).abs() < 1e-12);
        assert!((free_electron_alpha(1e3).unwrap() + 1e-6).abs() < 1e-18);
        assert_eq!(free_electron_alpha(0.0), Err(EvalError::ZeroFrequency));
    }

    #[test]
    fn single_channel_static() {
        let m = model(&[(2, 1, 0.1, 1.0, 0.0)], bare());
        let (v, terms) = valence_alpha(&m, 0.0).unwrap();
        assert!((v - 10.0 / 3.0).abs() < 1e-12);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].accumulated, terms[0].contribution);
    }

    #[test]
    fn zero_channels_is_core_plus_tail() {
        let c = ModelConstants {
            tail_alpha: -0.1,
            ..Default::default()
        };
        let m = model(&[], c);
        let r = total_alpha(&m, 0.3).unwrap();
        assert_eq!(r.total, 9.1 - 0.1);
        assert!((r.uncertainty - 9.1 * 0.05).abs() < 1e-15);
        assert!(r.terms.is_empty());
    }

    #[test]
    fn window_and_pole() {
        let m = model(&[(2, 1, 0.1, 1.0, 0.0)], bare());
        assert!(matches!(
            valence_alpha(&m, 0.1 + 5e-7),
            Err(EvalError::ResonanceProximity { .. })
        ));
        let (_, terms) = valence_alpha_with(&m, 0.1 + 5e-7, WindowPolicy::Allow).unwrap();
        assert_eq!(terms.len(), 1);
        assert!(
            total_alpha_with(&m, 0.1 + 5e-7, WindowPolicy::Allow)
                .unwrap()
                .excluded
        );
        let de = m.channels()[0].level.energy_cm1 / CONSTANTS.hartree_wavenumber;
        assert!(matches!(
            valence_alpha_with(&m, de, WindowPolicy::Allow),
            Err(EvalError::Pole { .. })
        ));
        assert!(valence_alpha(&m, f64::NAN).is_err());
    }

    #[test]
    fn terms_sorted_by_n_then_j() {
        let m = model(
            &[
                (3, 3, 0.2, 1.0, 0.0),
                (2, 3, 0.1, 1.0, 0.0),
                (3, 1, 0.19, 1.0, 0.0),
                (2, 1, 0.09, 1.0, 0.0),
            ],
            bare(),
        );
        let (_, terms) = valence_alpha(&m, 0.0).unwrap();
        let labels: Vec<_> = terms.iter().map(|t| t.level.label.as_str()).collect();
        assert_eq!(labels, ["2p1/2", "2p3/2", "3p1/2", "3p3/2"]);
    }

    #[test]
    fn monotone_divergence_below_resonance() {
        let m = model(&[(2, 1, 0.1, 2.0, 0.0), (3, 1, 0.3, 1.0, 0.0)], bare());
        let mut last = 0.0;
        for k in 1..200 {
            let w = 0.1 - 0.02 / k as f64;
            let v = total_alpha_value(&m, w).unwrap().abs();
            assert!(v > last);
            last = v;
        }
    }

    fn channels_strategy() -> impl Strategy<Value = Vec<(u32, u32, f64, f64, f64)>> {
        prop::collection::vec((0.01f64..1.0, -10.0f64..10.0, 0.0f64..0.1), 1..8).prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (de, d, s))| (2 + i as u32 / 2, 1 + 2 * (i as u32 % 2), de, d, s))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn even_in_omega(chans in channels_strategy(), w in 0.0f64..2.0) {
            let m = model(&chans, ModelConstants::default());
            match (total_alpha(&m, w), total_alpha(&m, -w)) {
                (Ok(a), Ok(b)) => {
                    prop_assert_eq!(a.total, b.total);
                    prop_assert_eq!(a.uncertainty, b.uncertainty);
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "asymmetric domain"),
            }
        }

        #[test]
        fn breakdown_and_term_oracle(chans in channels_strategy(), w in 0.0f64..2.0) {
            let m = model(&chans, ModelConstants::default());
            if let Ok(r) = total_alpha(&m, w) {
                prop_assert_eq!(r.total, r.valence + r.core + r.tail);
                prop_assert!(r.uncertainty >= 0.0);
                prop_assert_eq!(r.terms.last().unwrap().accumulated, r.valence);
                for t in &r.terms {
                    let direct = (1.0 / 3.0) * t.delta_e * t.d_value.powi(2)
                        / (t.delta_e.powi(2) - w.powi(2));
                    prop_assert!((t.contribution - direct).abs() <= 1e-12 * direct.abs().max(1.0));
                }
            }
        }

        #[test]
        fn static_positive_for_ground_like(chans in channels_strategy()) {
            let m = model(&chans, bare());
            prop_assert!(m.channels().iter().all(|c| c.level.energy_cm1 > 0.0));
            prop_assert!(total_alpha(&m, 0.0).unwrap().total > 0.0);
        }
    }
}
