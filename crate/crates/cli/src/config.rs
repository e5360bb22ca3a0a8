//! Strict JSON configuration schemas.
//!
//! Every physical quantity carries its unit in the key name
//! (`Vstar_erg`, `E_MeV`, `r_end_cm`, …); unknown keys are rejected so a
//! typo cannot silently fall back to a default. Angles are given in
//! degrees and converted to radians at the boundary.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use stimrwa_core::linalg::CMatrix;
use stimrwa_core::neutrino::{units, SelfIntParams, TransparencyParams};

use crate::error::CliError;

/// Which scenario a config file describes. Each subcommand checks the
/// file it was handed against the scenarios it can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Transparency,
    TransparencyScan,
    Selfint,
    SelfintRwa,
    RwaGeneric,
}

impl ScenarioKind {
    /// The name as written in config files.
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Transparency => "transparency",
            ScenarioKind::TransparencyScan => "transparency-scan",
            ScenarioKind::Selfint => "selfint",
            ScenarioKind::SelfintRwa => "selfint-rwa",
            ScenarioKind::RwaGeneric => "rwa-generic",
        }
    }
}

/// Read and parse a JSON config file; all failures are config errors.
pub fn load_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Reject a config whose declared scenario is not one this subcommand
/// runs.
pub fn check_scenario(found: ScenarioKind, accepted: &[ScenarioKind]) -> Result<(), CliError> {
    if accepted.contains(&found) {
        return Ok(());
    }
    let names: Vec<&str> = accepted.iter().map(|k| k.as_str()).collect();
    Err(CliError::Config(format!(
        "config declares scenario \"{}\" but this subcommand runs {}",
        found.as_str(),
        names.join(" or ")
    )))
}

fn require_positive(value: f64, name: &str) -> Result<(), CliError> {
    if value <= 0.0 || !value.is_finite() {
        return Err(CliError::Config(format!(
            "{name} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}

fn require_min_samples(samples: usize, name: &str, min: usize) -> Result<(), CliError> {
    if samples < min {
        return Err(CliError::Config(format!(
            "{name} must be at least {min}, got {samples}"
        )));
    }
    Ok(())
}

/// Three-flavor oscillation inputs.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeFlavorConfig {
    /// Neutrino energy (MeV).
    #[serde(rename = "E_MeV")]
    pub e_mev: f64,
    /// `m₁² − m₂²` (eV²).
    #[serde(rename = "dm2_12_eV2")]
    pub dm2_12_ev2: f64,
    /// `m₃² − m₂²` (eV²).
    #[serde(rename = "dm2_32_eV2")]
    pub dm2_32_ev2: f64,
    pub theta12_deg: f64,
    pub theta13_deg: f64,
    pub theta23_deg: f64,
}

/// The oscillating matter potential: a static part `V*` on the electron
/// flavor plus two relative mode amplitudes.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    #[serde(rename = "Vstar_erg")]
    pub vstar_erg: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
}

/// Integration controls for a single transparency run.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransparencyNumerics {
    pub r_end_cm: f64,
    pub samples: usize,
    pub rtol: f64,
}

/// Config for the `transparency` subcommand.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransparencyConfig {
    pub scenario: ScenarioKind,
    pub oscillation: ThreeFlavorConfig,
    pub potential: PotentialConfig,
    pub numerics: TransparencyNumerics,
}

impl TransparencyConfig {
    /// Convert to core parameters (degrees → radians).
    pub fn params(&self) -> TransparencyParams {
        TransparencyParams {
            e_mev: self.oscillation.e_mev,
            dm2_12_ev2: self.oscillation.dm2_12_ev2,
            dm2_32_ev2: self.oscillation.dm2_32_ev2,
            theta12: units::deg_to_rad(self.oscillation.theta12_deg),
            theta13: units::deg_to_rad(self.oscillation.theta13_deg),
            theta23: units::deg_to_rad(self.oscillation.theta23_deg),
            v_star_erg: self.potential.vstar_erg,
            a1: self.potential.a1,
            a2: self.potential.a2,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        require_positive(self.oscillation.e_mev, "oscillation.E_MeV")?;
        require_positive(self.potential.vstar_erg, "potential.Vstar_erg")?;
        if self.potential.a1 < 0.0 || self.potential.a2 < 0.0 {
            return Err(CliError::Config(
                "potential amplitudes A1, A2 must be non-negative".into(),
            ));
        }
        require_positive(self.numerics.r_end_cm, "numerics.r_end_cm")?;
        require_positive(self.numerics.rtol, "numerics.rtol")?;
        require_min_samples(self.numerics.samples, "numerics.samples", 2)
    }
}

/// Grid and integration controls for the detuning scan.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanNumerics {
    /// Half-width of the scanned window around the 1↔3 resonance (cm⁻¹).
    pub window_half_width_cm_inv: f64,
    /// Number of scan points (odd counts place one point exactly on
    /// resonance).
    pub steps: usize,
    pub r_end_cm: f64,
    pub samples: usize,
    pub rtol: f64,
}

/// Config for the `transparency-scan` subcommand.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransparencyScanConfig {
    pub scenario: ScenarioKind,
    pub oscillation: ThreeFlavorConfig,
    pub potential: PotentialConfig,
    pub scan: ScanNumerics,
}

impl TransparencyScanConfig {
    pub fn params(&self) -> TransparencyParams {
        TransparencyParams {
            e_mev: self.oscillation.e_mev,
            dm2_12_ev2: self.oscillation.dm2_12_ev2,
            dm2_32_ev2: self.oscillation.dm2_32_ev2,
            theta12: units::deg_to_rad(self.oscillation.theta12_deg),
            theta13: units::deg_to_rad(self.oscillation.theta13_deg),
            theta23: units::deg_to_rad(self.oscillation.theta23_deg),
            v_star_erg: self.potential.vstar_erg,
            a1: self.potential.a1,
            a2: self.potential.a2,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        require_positive(self.oscillation.e_mev, "oscillation.E_MeV")?;
        require_positive(self.potential.vstar_erg, "potential.Vstar_erg")?;
        require_positive(self.scan.window_half_width_cm_inv, "scan.window_half_width_cm_inv")?;
        require_positive(self.scan.r_end_cm, "scan.r_end_cm")?;
        require_positive(self.scan.rtol, "scan.rtol")?;
        require_min_samples(self.scan.steps, "scan.steps", 3)?;
        require_min_samples(self.scan.samples, "scan.samples", 2)
    }
}

/// Two-flavor oscillation inputs.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoFlavorConfig {
    /// Neutrino energy (MeV).
    #[serde(rename = "E_MeV")]
    pub e_mev: f64,
    /// Mass-squared splitting (eV²).
    #[serde(rename = "dm2_eV2")]
    pub dm2_ev2: f64,
    pub theta_deg: f64,
}

/// Collective self-coupling inputs.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionConfig {
    pub mu_erg: f64,
    /// Antineutrino weight in the coupling.
    pub alpha: f64,
}

/// Pipeline controls for the self-interaction scenario.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfIntNumerics {
    /// Span of the exploratory run used to detect the fundamental (cm).
    pub pilot_span_cm: f64,
    pub pilot_samples: usize,
    /// Number of fundamental periods in the production run.
    pub periods: usize,
    pub samples_per_period: usize,
    /// Highest harmonic retained by the decomposition.
    pub max_harmonic: usize,
    /// Number of spectral lines turned into perturbation modes.
    pub mode_count: usize,
    /// Integer-grid radius for selection and degeneracy enumeration.
    pub radius: u32,
    pub rtol: f64,
}

/// Config for the `selfint` and `selfint-rwa` subcommands.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfIntConfig {
    pub scenario: ScenarioKind,
    pub oscillation: TwoFlavorConfig,
    pub interaction: InteractionConfig,
    pub numerics: SelfIntNumerics,
}

impl SelfIntConfig {
    pub fn params(&self) -> SelfIntParams {
        SelfIntParams {
            e_mev: self.oscillation.e_mev,
            dm2_ev2: self.oscillation.dm2_ev2,
            theta: units::deg_to_rad(self.oscillation.theta_deg),
            mu_erg: self.interaction.mu_erg,
            alpha: self.interaction.alpha,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        require_positive(self.oscillation.e_mev, "oscillation.E_MeV")?;
        require_positive(self.interaction.mu_erg, "interaction.mu_erg")?;
        if !self.interaction.alpha.is_finite() || self.interaction.alpha < 0.0 {
            return Err(CliError::Config(format!(
                "interaction.alpha must be non-negative, got {}",
                self.interaction.alpha
            )));
        }
        require_positive(self.numerics.pilot_span_cm, "numerics.pilot_span_cm")?;
        require_min_samples(self.numerics.pilot_samples, "numerics.pilot_samples", 64)?;
        require_min_samples(self.numerics.periods, "numerics.periods", 2)?;
        require_min_samples(
            self.numerics.samples_per_period,
            "numerics.samples_per_period",
            16,
        )?;
        require_min_samples(self.numerics.max_harmonic, "numerics.max_harmonic", 1)?;
        require_min_samples(self.numerics.mode_count, "numerics.mode_count", 1)?;
        if self.numerics.mode_count > self.numerics.max_harmonic {
            return Err(CliError::Config(format!(
                "numerics.mode_count ({}) cannot exceed numerics.max_harmonic ({})",
                self.numerics.mode_count, self.numerics.max_harmonic
            )));
        }
        require_positive(self.numerics.rtol, "numerics.rtol")
    }
}

/// A complex matrix in JSON: rows of `[re, im]` pairs.
pub type ComplexMatrixJson = Vec<Vec<[f64; 2]>>;

/// Parse a JSON complex matrix, requiring it to be square.
pub fn parse_matrix(m: &ComplexMatrixJson, what: &str) -> Result<CMatrix, CliError> {
    let n = m.len();
    if n == 0 {
        return Err(CliError::Config(format!("{what} is empty")));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::Config(format!(
                "{what} row {i} has {} entries, expected {n} (square matrix)",
                row.len()
            )));
        }
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        num_complex::Complex64::new(m[i][j][0], m[i][j][1])
    }))
}

/// One perturbation mode of a generic system.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenericModeConfig {
    /// Mode frequency, in the same reciprocal units as the Hamiltonian.
    pub q: f64,
    /// Complex coefficient matrix `C` (the full term is
    /// `C e^{iqt} + C† e^{−iqt}`).
    pub c: ComplexMatrixJson,
}

/// How the integer selection is chosen for a generic run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Manual,
    NearestResonance,
    ExhaustiveScan,
}

/// Selection controls for a generic run.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    pub strategy: StrategyKind,
    /// Manual strategy only: per-mode rows of adjacent-pair integers
    /// `n_a;i,i+1`.
    #[serde(default)]
    pub integers: Option<Vec<Vec<i32>>>,
    /// Grid radius for the search strategies (default 2).
    #[serde(default)]
    pub radius: Option<u32>,
}

/// Sampling controls for a generic run (units follow the Hamiltonian's:
/// if `H` is in cm⁻¹, `t_end` is in cm).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenericNumerics {
    pub t_end: f64,
    pub samples: usize,
    pub rtol: f64,
}

/// Config for the `rwa-generic` subcommand: an explicit constant
/// Hamiltonian plus a list of Fourier modes, in any consistent units.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RwaGenericConfig {
    pub scenario: ScenarioKind,
    pub hamiltonian: ComplexMatrixJson,
    pub modes: Vec<GenericModeConfig>,
    pub selection: SelectionConfig,
    pub numerics: GenericNumerics,
}

impl RwaGenericConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.modes.is_empty() {
            return Err(CliError::Config("at least one mode is required".into()));
        }
        for (a, mode) in self.modes.iter().enumerate() {
            require_positive(mode.q, &format!("modes[{a}].q"))?;
        }
        if self.selection.strategy == StrategyKind::Manual && self.selection.integers.is_none() {
            return Err(CliError::Config(
                "selection.integers is required for the manual strategy".into(),
            ));
        }
        require_positive(self.numerics.t_end, "numerics.t_end")?;
        require_positive(self.numerics.rtol, "numerics.rtol")?;
        require_min_samples(self.numerics.samples, "numerics.samples", 2)
    }
}
