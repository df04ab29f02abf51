use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{c, StateVector};

/// Probe input states: |H⟩, |V⟩ and the diagonal/circular superpositions
/// D = (H+V)/√2, A = (H−V)/√2, R = (H+iV)/√2, L = (H−iV)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Probe {
    H,
    V,
    D,
    A,
    R,
    L,
}

impl Probe {
    pub const ALL: [Probe; 6] = [Probe::H, Probe::V, Probe::D, Probe::A, Probe::R, Probe::L];

    pub fn state(self) -> StateVector {
        let h = FRAC_1_SQRT_2;
        let amps = match self {
            Probe::H => [c(1.0, 0.0), c(0.0, 0.0)],
            Probe::V => [c(0.0, 0.0), c(1.0, 0.0)],
            Probe::D => [c(h, 0.0), c(h, 0.0)],
            Probe::A => [c(h, 0.0), c(-h, 0.0)],
            Probe::R => [c(h, 0.0), c(0.0, h)],
            Probe::L => [c(h, 0.0), c(0.0, -h)],
        };
        StateVector::new(amps.to_vec()).expect("probe states are normalized")
    }

    pub fn label(self) -> &'static str {
        match self {
            Probe::H => "H",
            Probe::V => "V",
            Probe::D => "D",
            Probe::A => "A",
            Probe::R => "R",
            Probe::L => "L",
        }
    }
}

/// Two-outcome projective measurement in one of three mutually unbiased bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    HV,
    DA,
    RL,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::HV, Basis::DA, Basis::RL];

    /// Projector state of the "plus" outcome (H, D or R).
    pub fn plus(self) -> StateVector {
        match self {
            Basis::HV => Probe::H.state(),
            Basis::DA => Probe::D.state(),
            Basis::RL => Probe::R.state(),
        }
    }

    /// Projector state of the "minus" outcome (V, A or L).
    pub fn minus(self) -> StateVector {
        match self {
            Basis::HV => Probe::V.state(),
            Basis::DA => Probe::A.state(),
            Basis::RL => Probe::L.state(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Basis::HV => "HV",
            Basis::DA => "DA",
            Basis::RL => "RL",
        }
    }
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Probe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Probe::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::Parse(format!("unknown probe `{s}`")))
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Basis::ALL
            .into_iter()
            .find(|b| b.label() == s)
            .ok_or_else(|| Error::Parse(format!("unknown basis `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub probe: Probe,
    pub basis: Basis,
}

impl MeasurementSetting {
    /// The 18 settings, probe-major.
    pub fn all() -> Vec<MeasurementSetting> {
        Probe::ALL
            .iter()
            .flat_map(|&probe| Basis::ALL.iter().map(move |&basis| MeasurementSetting { probe, basis }))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eighteen_settings() {
        let all = MeasurementSetting::all();
        assert_eq!(all.len(), 18);
        let unique: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(unique.len(), 18);
    }

    #[test]
    fn bases_are_mutually_unbiased() {
        for a in Basis::ALL {
            assert!(a.plus().overlap(&a.minus()) < 1e-30);
            for b in Basis::ALL.into_iter().filter(|&b| b != a) {
                for s in [a.plus(), a.minus()] {
                    for t in [b.plus(), b.minus()] {
                        assert!((s.overlap(&t) - 0.5).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn right_circular_has_plus_i() {
        assert_eq!(Probe::R.state().amplitudes()[1], c(0.0, FRAC_1_SQRT_2));
    }

    #[test]
    fn parse_labels() {
        assert_eq!("D".parse::<Probe>().unwrap(), Probe::D);
        assert_eq!("RL".parse::<Basis>().unwrap(), Basis::RL);
        assert!("X".parse::<Probe>().is_err());
    }
}
