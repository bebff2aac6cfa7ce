//! Heating of a trapped atom when the trap is switched off for a time τ and
//! switched back on.
//!
//! The atom starts in the ground state of an isotropic oscillator of angular
//! frequency ω₀. During free flight the Gaussian wavepacket spreads as
//!
//! ```text
//! Ψ(r, t) = exp(−r² / (2 d₀² (1 + iω₀t))) / (π^¾ d₀^{3/2} (1 + iω₀t)^{3/2}),  d₀ = √(ħ/Mω₀)
//! ⟨r²(t)⟩ = (3/2) d₀² (1 + ω₀²t²),   ⟨T⟩ = E₀/2,   E₀ = (3/2)ħω₀
//! ```
//!
//! Restoring the trap at τ leaves the atom with E = E₀(1 + ω₀²τ²/2), i.e. a
//! heating of k_BT = ħω₀(ω₀τ)²/4 per cycle.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::units::{BOLTZMANN, HBAR};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeatingError {
    #[error("trap frequency must be positive and finite, got {0}")]
    Frequency(f64),
    #[error("mass must be positive and finite, got {0}")]
    Mass(f64),
    #[error("time must be >= 0 and finite, got {0}")]
    Time(f64),
    #[error("unknown trap frequency unit '{0}' (expected hz or rad/s)")]
    Unit(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrapFrequencyUnit {
    /// ν₀; ω₀ = 2πν₀.
    Hz,
    #[default]
    RadPerSec,
}

impl FromStr for TrapFrequencyUnit {
    type Err = HeatingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hz" => Ok(Self::Hz),
            "rad/s" | "rads" => Ok(Self::RadPerSec),
            _ => Err(HeatingError::Unit(s.to_string())),
        }
    }
}

/// Isotropic harmonic trap. `d0` and `e0` are derived from ω₀ and M.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrapSpec {
    omega0: f64,
    mass: f64,
    d0: f64,
    e0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WavepacketMoments {
    /// ⟨r²⟩, m².
    pub mean_square_radius: f64,
    /// ⟨T⟩, J.
    pub mean_kinetic_energy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeatingEstimate {
    /// T such that k_BT = ħω₀(ω₀τ)²/4, K.
    pub temperature_k: f64,
    /// k_BT / ħω₀.
    pub in_trap_quanta: f64,
    /// ω₀τ.
    pub omega_tau: f64,
}

fn check_time(t: f64) -> Result<(), HeatingError> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(HeatingError::Time(t))
    }
}

impl TrapSpec {
    /// `omega0` in rad/s, `mass` in kg.
    pub fn new(omega0: f64, mass: f64) -> Result<Self, HeatingError> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(HeatingError::Frequency(omega0));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(HeatingError::Mass(mass));
        }
        Ok(Self {
            omega0,
            mass,
            d0: (HBAR / (mass * omega0)).sqrt(),
            e0: 1.5 * HBAR * omega0,
        })
    }

    pub fn from_frequency(
        value: f64,
        unit: TrapFrequencyUnit,
        mass: f64,
    ) -> Result<Self, HeatingError> {
        let omega0 = match unit {
            TrapFrequencyUnit::Hz => 2.0 * PI * value,
            TrapFrequencyUnit::RadPerSec => value,
        };
        Self::new(omega0, mass)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Ground-state length √(ħ/Mω₀), m.
    pub fn d0(&self) -> f64 {
        self.d0
    }

    /// Ground-state energy (3/2)ħω₀, J.
    pub fn e0(&self) -> f64 {
        self.e0
    }

    /// Free-flight amplitude Ψ(r, t) in m^{-3/2}.
    pub fn amplitude(&self, r: f64, t: f64) -> Complex64 {
        let s = Complex64::new(1.0, self.omega0 * t);
        let d0 = self.d0;
        (-(r * r) / (2.0 * d0 * d0 * s)).exp() / (PI.powf(0.75) * d0.powf(1.5) * s.powf(1.5))
    }

    /// |Ψ(r, t)|² in m⁻³.
    pub fn density(&self, r: f64, t: f64) -> f64 {
        let spread = 1.0 + (self.omega0 * t).powi(2);
        let d2 = self.d0 * self.d0;
        (-(r * r) / (d2 * spread)).exp() / (PI.powf(1.5) * d2 * self.d0 * spread.powf(1.5))
    }

    pub fn wavepacket_moments(&self, t: f64) -> Result<WavepacketMoments, HeatingError> {
        check_time(t)?;
        Ok(WavepacketMoments {
            mean_square_radius: 1.5 * self.d0 * self.d0 * (1.0 + (self.omega0 * t).powi(2)),
            mean_kinetic_energy: 0.5 * self.e0,
        })
    }

    /// Energy after restoring the trap at τ: E₀(1 + ω₀²τ²/2).
    pub fn restored_energy(&self, tau: f64) -> Result<f64, HeatingError> {
        check_time(tau)?;
        Ok(self.e0 * (1.0 + 0.5 * (self.omega0 * tau).powi(2)))
    }

    /// The same energy via E₀/2 + Mω₀²⟨r²(τ)⟩/2.
    pub fn restored_energy_from_moments(&self, tau: f64) -> Result<f64, HeatingError> {
        let m = self.wavepacket_moments(tau)?;
        Ok(m.mean_kinetic_energy
            + 0.5 * self.mass * self.omega0 * self.omega0 * m.mean_square_radius)
    }

    pub fn heating_per_cycle(&self, tau: f64) -> Result<HeatingEstimate, HeatingError> {
        check_time(tau)?;
        let omega_tau = self.omega0 * tau;
        let quanta = 0.25 * omega_tau * omega_tau;
        Ok(HeatingEstimate {
            temperature_k: quanta * HBAR * self.omega0 / BOLTZMANN,
            in_trap_quanta: quanta,
            omega_tau,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{ATOMIC_MASS_UNIT, RB87_MASS_AMU};
    use proptest::prelude::*;

    fn rb_trap(omega0: f64) -> TrapSpec {
        TrapSpec::new(omega0, RB87_MASS_AMU * ATOMIC_MASS_UNIT).unwrap()
    }

    #[test]
    fn moments_examples() {
        let trap = rb_trap(1e5);
        let d2 = trap.d0().powi(2);
        let m0 = trap.wavepacket_moments(0.0).unwrap();
        assert!((m0.mean_square_radius / d2 - 1.5).abs() < 1e-14);
        assert!((m0.mean_kinetic_energy / trap.e0() - 0.5).abs() < 1e-15);
        let m1 = trap.wavepacket_moments(1.0 / trap.omega0()).unwrap();
        assert!((m1.mean_square_radius / d2 - 3.0).abs() < 1e-14);
        let m2 = trap.wavepacket_moments(2.0 / trap.omega0()).unwrap();
        assert!((m2.mean_square_radius / d2 - 7.5).abs() < 1e-14);
        assert!(trap.wavepacket_moments(-1.0).is_err());
    }

    #[test]
    fn restored_energy_examples() {
        let trap = rb_trap(1e5);
        assert_eq!(trap.restored_energy(0.0).unwrap(), trap.e0());
        let e = trap.restored_energy(1.0 / trap.omega0()).unwrap();
        assert!((e / trap.e0() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn heating_examples() {
        let trap = rb_trap(1e5);
        assert_eq!(trap.heating_per_cycle(0.0).unwrap().in_trap_quanta, 0.0);
        let h = trap.heating_per_cycle(1.0 / trap.omega0()).unwrap();
        assert!((h.in_trap_quanta - 0.25).abs() < 1e-14);
        let mhz = TrapSpec::from_frequency(1e6, TrapFrequencyUnit::Hz, 1.0e-25).unwrap();
        let h = mhz.heating_per_cycle(1e-6).unwrap();
        assert!((h.in_trap_quanta - (2.0 * PI).powi(2) / 4.0).abs() < 1e-12);
        assert!((h.in_trap_quanta - 9.87).abs() < 0.005);
    }

    #[test]
    fn amplitude_matches_density() {
        let trap = rb_trap(2e5);
        for &(r, t) in &[(0.0, 0.0), (1e-8, 3e-6), (5e-8, 1e-5)] {
            let a = trap.amplitude(r, t).norm_sqr();
            let d = trap.density(r, t);
            assert!((a - d).abs() <= 1e-12 * d, "{a} {d}");
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(TrapSpec::new(0.0, 1.0).is_err());
        assert!(TrapSpec::new(1.0, -1.0).is_err());
        assert!("khz".parse::<TrapFrequencyUnit>().is_err());
    }

    proptest! {
        #[test]
        fn doubling_omega_at_fixed_omega_tau(w in 1e3f64..1e7, wt in 0.0f64..5.0) {
            let a = rb_trap(w);
            let b = rb_trap(2.0 * w);
            let ha = a.heating_per_cycle(wt / w).unwrap();
            let hb = b.heating_per_cycle(wt / (2.0 * w)).unwrap();
            prop_assert!((ha.in_trap_quanta - hb.in_trap_quanta).abs() <= 1e-12 * ha.in_trap_quanta.max(1e-300));
            prop_assert!((hb.temperature_k - 2.0 * ha.temperature_k).abs() <= 1e-12 * hb.temperature_k.max(1e-300));
        }
    }
}
