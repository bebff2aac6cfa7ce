//! Conversions between atomic units, SI, wavenumbers and vacuum wavelength.
//!
//! All constants are CODATA 2018 values. Angular frequencies in atomic units
//! are measured in E_h/ħ; polarizabilities in a₀³; energies in hartree.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Speed of light in vacuum (m s⁻¹), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant (J s), exact.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Boltzmann constant (J K⁻¹), exact.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Vacuum electric permittivity (F m⁻¹).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Bohr radius (m).
pub const BOHR_RADIUS_M: f64 = 5.291_772_109_03e-11;
/// Atomic unit of time ħ/E_h (s).
pub const ATOMIC_UNIT_OF_TIME: f64 = 2.418_884_326_585_7e-17;
/// Hartree energy expressed as a wavenumber, E_h/(hc) (cm⁻¹).
pub const HARTREE_WAVENUMBER: f64 = 219_474.631_363_20;
/// Unified atomic mass unit (kg).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of ⁸⁷Rb in atomic mass units.
pub const RB87_MASS_AMU: f64 = 86.909_180_531;

/// The four conversion factors every other module works through.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    /// E_h/ħ: rad s⁻¹ per atomic unit of angular frequency.
    pub hartree_frequency: f64,
    /// a₀ in nm.
    pub bohr_radius: f64,
    /// 4πε₀a₀³/h: Hz/(V/m)² per a₀³.
    pub alpha_au_to_si: f64,
    /// cm⁻¹ per hartree.
    pub hartree_wavenumber: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hartree_frequency: 1.0 / ATOMIC_UNIT_OF_TIME,
    bohr_radius: BOHR_RADIUS_M * 1e9,
    alpha_au_to_si: 4.0 * PI * VACUUM_PERMITTIVITY * BOHR_RADIUS_M * BOHR_RADIUS_M * BOHR_RADIUS_M
        / PLANCK,
    hartree_wavenumber: HARTREE_WAVENUMBER,
};

/// 2πc in nm s⁻¹: λ[nm] = TWO_PI_C_NM / ω[rad s⁻¹].
const TWO_PI_C_NM: f64 = 2.0 * PI * SPEED_OF_LIGHT * 1e9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitError {
    #[error("unknown {kind} unit '{tag}' (expected one of: {expected})")]
    UnknownUnit {
        kind: &'static str,
        tag: String,
        expected: &'static str,
    },
    #[error(
        "{value} {unit} cannot be converted: wavelength conversions need a positive finite value"
    )]
    Domain { value: f64, unit: OmegaUnit },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaUnit {
    /// E_h/ħ
    #[default]
    Au,
    /// Ordinary frequency ν = ω/2π.
    Hz,
    /// Angular frequency.
    RadPerSec,
    /// Vacuum wavelength.
    Nm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaUnit {
    /// a₀³
    Au,
    /// Å³
    Angstrom3,
    /// α/h in Hz/(V/m)²
    HzPerVm2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyUnit {
    /// Hartree
    Au,
    /// cm⁻¹
    Cm1,
}

impl FromStr for OmegaUnit {
    type Err = UnitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "au" | "a.u." => Ok(Self::Au),
            "hz" => Ok(Self::Hz),
            "rad/s" | "rads" | "radpersec" => Ok(Self::RadPerSec),
            "nm" => Ok(Self::Nm),
            _ => Err(UnitError::UnknownUnit {
                kind: "frequency",
                tag: s.to_string(),
                expected: "au, hz, rad/s, nm",
            }),
        }
    }
}

impl FromStr for AlphaUnit {
    type Err = UnitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "au" | "a.u." | "a03" => Ok(Self::Au),
            "a3" | "angstrom3" => Ok(Self::Angstrom3),
            "hz/(v/m)^2" | "hzpervm2" | "si" => Ok(Self::HzPerVm2),
            _ => Err(UnitError::UnknownUnit {
                kind: "polarizability",
                tag: s.to_string(),
                expected: "au, a3, hz/(v/m)^2",
            }),
        }
    }
}

impl FromStr for EnergyUnit {
    type Err = UnitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "au" | "a.u." | "hartree" => Ok(Self::Au),
            "cm1" | "cm-1" | "cm^-1" => Ok(Self::Cm1),
            _ => Err(UnitError::UnknownUnit {
                kind: "energy",
                tag: s.to_string(),
                expected: "au, cm1",
            }),
        }
    }
}

impl fmt::Display for OmegaUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Au => "au",
            Self::Hz => "hz",
            Self::RadPerSec => "rad/s",
            Self::Nm => "nm",
        })
    }
}

impl fmt::Display for AlphaUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Au => "au",
            Self::Angstrom3 => "a3",
            Self::HzPerVm2 => "hz/(v/m)^2",
        })
    }
}

impl fmt::Display for EnergyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Au => "au",
            Self::Cm1 => "cm1",
        })
    }
}

fn omega_to_rad_per_sec(value: f64, unit: OmegaUnit) -> Result<f64, UnitError> {
    match unit {
        OmegaUnit::Au => Ok(value * CONSTANTS.hartree_frequency),
        OmegaUnit::Hz => Ok(value * 2.0 * PI),
        OmegaUnit::RadPerSec => Ok(value),
        OmegaUnit::Nm => {
            if !(value > 0.0 && value.is_finite()) {
                return Err(UnitError::Domain { value, unit });
            }
            Ok(TWO_PI_C_NM / value)
        }
    }
}

fn omega_from_rad_per_sec(value: f64, unit: OmegaUnit) -> Result<f64, UnitError> {
    match unit {
        OmegaUnit::Au => Ok(value / CONSTANTS.hartree_frequency),
        OmegaUnit::Hz => Ok(value / (2.0 * PI)),
        OmegaUnit::RadPerSec => Ok(value),
        OmegaUnit::Nm => {
            if !(value > 0.0 && value.is_finite()) {
                return Err(UnitError::Domain { value, unit });
            }
            Ok(TWO_PI_C_NM / value)
        }
    }
}

pub fn convert_omega(value: f64, from: OmegaUnit, to: OmegaUnit) -> Result<f64, UnitError> {
    if from == to {
        if from == OmegaUnit::Nm && !(value > 0.0 && value.is_finite()) {
            return Err(UnitError::Domain { value, unit: from });
        }
        return Ok(value);
    }
    // a.u. <-> nm is the hot path; one division keeps the round trip tight.
    match (from, to) {
        (OmegaUnit::Au, OmegaUnit::Nm) | (OmegaUnit::Nm, OmegaUnit::Au) => {
            if !(value > 0.0 && value.is_finite()) {
                let unit = if from == OmegaUnit::Nm { from } else { to };
                return Err(UnitError::Domain { value, unit });
            }
            Ok(TWO_PI_C_NM / CONSTANTS.hartree_frequency / value)
        }
        _ => omega_from_rad_per_sec(omega_to_rad_per_sec(value, from)?, to),
    }
}

/// Vacuum wavelength in nm of an angular frequency in atomic units.
pub fn au_to_nm(omega_au: f64) -> Result<f64, UnitError> {
    convert_omega(omega_au, OmegaUnit::Au, OmegaUnit::Nm)
}

/// Numerical value of 1 a₀³ in `unit`.
fn alpha_per_au(unit: AlphaUnit) -> f64 {
    let a0_angstrom = CONSTANTS.bohr_radius * 10.0;
    match unit {
        AlphaUnit::Au => 1.0,
        AlphaUnit::Angstrom3 => a0_angstrom * a0_angstrom * a0_angstrom,
        AlphaUnit::HzPerVm2 => CONSTANTS.alpha_au_to_si,
    }
}

pub fn convert_alpha(value: f64, from: AlphaUnit, to: AlphaUnit) -> f64 {
    if from == to {
        return value;
    }
    value / alpha_per_au(from) * alpha_per_au(to)
}

pub fn convert_energy(value: f64, from: EnergyUnit, to: EnergyUnit) -> f64 {
    match (from, to) {
        (EnergyUnit::Cm1, EnergyUnit::Au) => value / CONSTANTS.hartree_wavenumber,
        (EnergyUnit::Au, EnergyUnit::Cm1) => value * CONSTANTS.hartree_wavenumber,
        _ => value,
    }
}

/// Shorthand for the level-file to evaluation conversion.
#[inline]
pub fn cm1_to_au(value: f64) -> f64 {
    value / CONSTANTS.hartree_wavenumber
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn display_precision_constants() {
        assert!(rel(CONSTANTS.hartree_frequency, 4.1341e16) < 1e-4);
        assert!(rel(CONSTANTS.alpha_au_to_si, 2.48832e-8) < 1e-5);
        assert!(rel(CONSTANTS.bohr_radius, 0.052918) < 1e-5);
    }

    #[test]
    fn wavenumber_consistent_with_frequency() {
        // E_h/(hc) = (E_h/ħ) / (2πc), c in cm/s
        let derived = CONSTANTS.hartree_frequency / (2.0 * PI * SPEED_OF_LIGHT * 100.0);
        assert!(rel(derived, HARTREE_WAVENUMBER) < 1e-10);
    }

    #[test]
    fn omega_examples() {
        let nm = convert_omega(0.0576728, OmegaUnit::Au, OmegaUnit::Nm).unwrap();
        assert!((nm - 790.03).abs() < 0.01, "{nm}");
        let nm = convert_omega(0.04298, OmegaUnit::Au, OmegaUnit::Nm).unwrap();
        assert!((nm / 1000.0 - 1.06).abs() < 0.005, "{nm}");
        let w = convert_omega(1.0, OmegaUnit::Au, OmegaUnit::RadPerSec).unwrap();
        assert!(rel(w, 4.1341e16) < 1e-4);
        let nu = convert_omega(1.0, OmegaUnit::Au, OmegaUnit::Hz).unwrap();
        assert!(rel(nu, 4.1341e16 / (2.0 * PI)) < 1e-4);
    }

    #[test]
    fn wavelength_domain_errors() {
        assert!(matches!(
            convert_omega(0.0, OmegaUnit::Au, OmegaUnit::Nm),
            Err(UnitError::Domain { .. })
        ));
        assert!(convert_omega(-3.0, OmegaUnit::Nm, OmegaUnit::Hz).is_err());
        assert!(convert_omega(-3.0, OmegaUnit::Hz, OmegaUnit::Nm).is_err());
        assert_eq!(
            convert_omega(0.0, OmegaUnit::Au, OmegaUnit::Hz).unwrap(),
            0.0
        );
    }

    #[test]
    fn alpha_examples() {
        let si = convert_alpha(1.0, AlphaUnit::Au, AlphaUnit::HzPerVm2);
        assert!(rel(si, 2.48832e-8) < 1e-5);
        let au = convert_alpha(47.3, AlphaUnit::Angstrom3, AlphaUnit::Au);
        assert!((au - 319.0).abs() < 0.5, "{au}");
        assert_eq!(
            convert_alpha(0.0, AlphaUnit::Angstrom3, AlphaUnit::HzPerVm2),
            0.0
        );
    }

    #[test]
    fn energy_examples() {
        assert!(
            rel(
                convert_energy(219474.6313632, EnergyUnit::Cm1, EnergyUnit::Au),
                1.0
            ) < 1e-12
        );
        assert_eq!(convert_energy(0.0, EnergyUnit::Cm1, EnergyUnit::Au), 0.0);
        // 12816.55 / 219474.6313632 = 0.05839650
        let e = convert_energy(12816.55, EnergyUnit::Cm1, EnergyUnit::Au);
        assert!((e - 0.0583965).abs() < 5e-8, "{e}");
        assert!(e > 0.058 && e < 0.059);
    }

    #[test]
    fn unknown_tags() {
        assert!("furlongs".parse::<OmegaUnit>().is_err());
        assert!("bohr".parse::<AlphaUnit>().is_err());
        assert!("ev".parse::<EnergyUnit>().is_err());
        assert_eq!("rad/s".parse::<OmegaUnit>().unwrap(), OmegaUnit::RadPerSec);
    }

    const OMEGA_UNITS: [OmegaUnit; 4] = [
        OmegaUnit::Au,
        OmegaUnit::Hz,
        OmegaUnit::RadPerSec,
        OmegaUnit::Nm,
    ];
    const ALPHA_UNITS: [AlphaUnit; 3] = [AlphaUnit::Au, AlphaUnit::Angstrom3, AlphaUnit::HzPerVm2];

    proptest! {
        #[test]
        fn omega_round_trip(x in 1e-6f64..1e3, i in 0usize..4, j in 0usize..4) {
            let (a, b) = (OMEGA_UNITS[i], OMEGA_UNITS[j]);
            let there = convert_omega(x, a, b).unwrap();
            let back = convert_omega(there, b, a).unwrap();
            prop_assert!(rel(back, x) < 1e-12);
        }

        #[test]
        fn alpha_round_trip(x in -1e6f64..1e6, i in 0usize..3, j in 0usize..3) {
            prop_assume!(x != 0.0);
            let (a, b) = (ALPHA_UNITS[i], ALPHA_UNITS[j]);
            let back = convert_alpha(convert_alpha(x, a, b), b, a);
            prop_assert!(rel(back, x) < 1e-12);
        }

        #[test]
        fn energy_round_trip(x in 1e-3f64..1e6) {
            let back = convert_energy(convert_energy(x, EnergyUnit::Cm1, EnergyUnit::Au),
                EnergyUnit::Au, EnergyUnit::Cm1);
            prop_assert!(rel(back, x) < 1e-12);
        }

        #[test]
        fn wavelength_is_hyperbolic(x in 1e-4f64..10.0, y in 1e-4f64..10.0) {
            let kx = convert_omega(x, OmegaUnit::Au, OmegaUnit::Nm).unwrap() * x;
            let ky = convert_omega(y, OmegaUnit::Au, OmegaUnit::Nm).unwrap() * y;
            prop_assert!(rel(kx, ky) < 1e-12);
        }

        #[test]
        fn chained_matches_direct(x in 1e-4f64..10.0) {
            let hz = convert_omega(x, OmegaUnit::Au, OmegaUnit::Hz).unwrap();
            let chained = convert_omega(hz, OmegaUnit::Hz, OmegaUnit::Nm).unwrap();
            let direct = convert_omega(x, OmegaUnit::Au, OmegaUnit::Nm).unwrap();
            prop_assert!(rel(chained, direct) < 1e-12);
        }
    }
}
