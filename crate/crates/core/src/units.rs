//! Physical constants, laboratory-unit configuration and the bridge to
//! natural units (ħ = k_B = 1, energies as angular frequencies in rad/s).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 exact values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Boltzmann constant (J/K).
    pub k_boltzmann: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    k_boltzmann: 1.380_649e-23,
};

fn default_samples_per_stroke() -> usize {
    1000
}

fn default_gap_floor() -> f64 {
    1e-9
}

/// Engine parameters in laboratory units. Frequencies are ordinary
/// frequencies (Hz, i.e. ω/2π), temperatures in Kelvin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    pub n_qubits: usize,
    pub freq_qubit_hot: f64,
    pub freq_qubit_cold: f64,
    pub freq_interaction: f64,
    pub coupling: f64,
    pub cavity_linewidth: f64,
    pub temp_hot: f64,
    pub temp_cold: f64,
    pub epsilon: f64,
    #[serde(default = "default_samples_per_stroke")]
    pub samples_per_stroke: usize,
    /// Smallest admissible |Δ_M|, relative to the hot qubit frequency.
    #[serde(default = "default_gap_floor")]
    pub gap_floor: f64,
}

impl EngineConfig {
    /// Benchmark operating point: 31 qubits, 1 GHz hot qubit frequency,
    /// 31 MHz all-to-all interaction, 10 kHz cavity coupling, 1 MHz cavity
    /// linewidth, 20 mK / 10 mK baths, ε = 0.001. Only the cold qubit
    /// frequency varies.
    pub fn benchmark(freq_qubit_cold: f64) -> Self {
        Self {
            n_qubits: 31,
            freq_qubit_hot: 1.0e9,
            freq_qubit_cold,
            freq_interaction: 31.0e6,
            coupling: 10.0e3,
            cavity_linewidth: 1.0e6,
            temp_hot: 0.020,
            temp_cold: 0.010,
            epsilon: 1e-3,
            samples_per_stroke: default_samples_per_stroke(),
            gap_floor: default_gap_floor(),
        }
    }

    /// Checks every constraint except the engine-only ones on `n_qubits`.
    pub fn validate_physical(&self) -> Result<()> {
        fn positive(key: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    key,
                    reason: format!("must be a positive finite number, got {v}"),
                })
            }
        }
        if self.n_qubits == 0 {
            return Err(Error::InvalidParameter {
                key: "n_qubits",
                reason: "must be at least 1".into(),
            });
        }
        positive("freq_qubit_hot", self.freq_qubit_hot)?;
        positive("freq_qubit_cold", self.freq_qubit_cold)?;
        positive("freq_interaction", self.freq_interaction)?;
        positive("coupling", self.coupling)?;
        positive("cavity_linewidth", self.cavity_linewidth)?;
        positive("temp_hot", self.temp_hot)?;
        positive("temp_cold", self.temp_cold)?;
        positive("epsilon", self.epsilon)?;
        positive("gap_floor", self.gap_floor)?;
        if self.temp_hot <= self.temp_cold {
            return Err(Error::InvalidParameter {
                key: "temp_hot",
                reason: "temp_hot must exceed temp_cold".into(),
            });
        }
        if self.freq_qubit_hot <= self.freq_qubit_cold {
            return Err(Error::InvalidParameter {
                key: "freq_qubit_hot",
                reason: "freq_qubit_hot must exceed freq_qubit_cold".into(),
            });
        }
        if self.samples_per_stroke < 2 {
            return Err(Error::InvalidParameter {
                key: "samples_per_stroke",
                reason: "must be at least 2".into(),
            });
        }
        Ok(())
    }

    /// Full validation for engine use: physical constraints plus odd N ≥ 3.
    pub fn validate(&self) -> Result<()> {
        self.validate_physical()?;
        check_engine_qubits(self.n_qubits)
    }
}

pub(crate) fn check_engine_qubits(n: usize) -> Result<()> {
    if n % 2 == 0 {
        return Err(Error::InvalidParameter {
            key: "n_qubits",
            reason: format!("n_qubits must be odd, got {n}"),
        });
    }
    if n < 3 {
        return Err(Error::InvalidParameter {
            key: "n_qubits",
            reason: format!("n_qubits must be at least 3 for engine use, got {n}"),
        });
    }
    Ok(())
}

/// Parses and validates a JSON config document.
pub fn load_config(source: &str) -> Result<EngineConfig> {
    let cfg: EngineConfig =
        serde_json::from_str(source).map_err(|e| Error::ConfigParse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Engine parameters in natural units: angular frequencies in rad/s and
/// inverse temperatures β = ħ/(k_B T) in s/rad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturalParams {
    pub n_qubits: usize,
    pub omega_a_hot: f64,
    pub omega_a_cold: f64,
    pub omega_interaction: f64,
    pub coupling: f64,
    pub linewidth: f64,
    pub beta_hot: f64,
    pub beta_cold: f64,
    pub epsilon: f64,
    pub samples_per_stroke: usize,
    pub gap_floor: f64,
}

fn inverse_temperature(t: f64) -> f64 {
    CONSTANTS.hbar / (CONSTANTS.k_boltzmann * t)
}

pub fn to_natural(cfg: &EngineConfig) -> NaturalParams {
    let w = |f: f64| 2.0 * PI * f;
    NaturalParams {
        n_qubits: cfg.n_qubits,
        omega_a_hot: w(cfg.freq_qubit_hot),
        omega_a_cold: w(cfg.freq_qubit_cold),
        omega_interaction: w(cfg.freq_interaction),
        coupling: w(cfg.coupling),
        linewidth: w(cfg.cavity_linewidth),
        beta_hot: inverse_temperature(cfg.temp_hot),
        beta_cold: inverse_temperature(cfg.temp_cold),
        epsilon: cfg.epsilon,
        samples_per_stroke: cfg.samples_per_stroke,
        gap_floor: cfg.gap_floor,
    }
}

impl NaturalParams {
    /// Inverse of [`to_natural`].
    pub fn to_lab(&self) -> EngineConfig {
        let f = |w: f64| w / (2.0 * PI);
        EngineConfig {
            n_qubits: self.n_qubits,
            freq_qubit_hot: f(self.omega_a_hot),
            freq_qubit_cold: f(self.omega_a_cold),
            freq_interaction: f(self.omega_interaction),
            coupling: f(self.coupling),
            cavity_linewidth: f(self.linewidth),
            temp_hot: inverse_temperature(self.beta_hot),
            temp_cold: inverse_temperature(self.beta_cold),
            epsilon: self.epsilon,
            samples_per_stroke: self.samples_per_stroke,
            gap_floor: self.gap_floor,
        }
    }

    pub fn with_n_qubits(mut self, n: usize) -> Self {
        self.n_qubits = n;
        self
    }

    pub fn carnot_efficiency(&self) -> f64 {
        1.0 - self.beta_hot / self.beta_cold
    }

    /// Absolute gap floor in rad/s.
    pub fn gap_floor_abs(&self) -> f64 {
        self.gap_floor * self.omega_a_hot
    }
}

/// (β_H ω_A^H, β_C ω_A^C).
pub fn dimensionless_exponents(p: &NaturalParams) -> (f64, f64) {
    (p.beta_hot * p.omega_a_hot, p.beta_cold * p.omega_a_cold)
}

/// Converts a power in natural units (rad/s²) to Watts.
pub fn power_to_watts(power_natural: f64) -> f64 {
    power_natural * CONSTANTS.hbar
}
