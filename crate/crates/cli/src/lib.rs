//! Command-line front end: scenario configs in, CSV + JSON reports out.
//!
//! Each subcommand reads one JSON config, runs the corresponding
//! pipeline from the core crate, and writes its artifacts into the
//! `--out` directory. Exit codes: 0 success, 2 configuration problems,
//! 3 numerical or I/O failures.

pub mod config;
pub mod error;
pub mod generic;
pub mod report;
pub mod selfint;
pub mod transparency;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{
    check_scenario, load_config, RwaGenericConfig, ScenarioKind, SelfIntConfig,
    TransparencyConfig, TransparencyScanConfig,
};
pub use error::CliError;

/// Stimulated transitions between oscillation eigenstates: rotating-wave
/// solutions for multi-mode periodic Hamiltonians, with direct-integration
/// cross checks.
#[derive(Debug, Parser)]
#[command(name = "stimrwa", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Three-level induced-transparency run: double-resonant evolution
    /// with numeric, rotating-wave, and closed-form transition curves.
    Transparency(RunArgs),
    /// Sweep the first drive frequency around resonance and record the
    /// transition amplitude from both methods at each grid point.
    TransparencyScan(RunArgs),
    /// Nonlinear two-species self-coupled evolution plus harmonic
    /// analysis of the recorded coupling term.
    Selfint(RunArgs),
    /// Everything `selfint` does, then model the coupling as a Fourier
    /// series, solve the rotating-wave problem per species, and replay
    /// the linearized dynamics against the recorded solution.
    SelfintRwa(RunArgs),
    /// User-supplied constant matrix and drive modes in arbitrary units.
    RwaGeneric(RunArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Path to the scenario's JSON configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for CSV and JSON outputs (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Also run the direct integrator and include its columns.
    #[arg(long)]
    pub compare_oracle: bool,
    /// Sum contributions from all integer sets with identical detuning.
    #[arg(long)]
    pub degenerate: bool,
    /// Override the integer-scan radius from the config.
    #[arg(long)]
    pub radius: Option<u32>,
    /// Override the number of retained harmonic modes from the config.
    #[arg(long)]
    pub modes: Option<usize>,
}

/// Dispatch a parsed command line. Returns `Ok(())` on success; the
/// caller maps errors to exit codes.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Transparency(args) => {
            let cfg: TransparencyConfig = load_config(&args.config)?;
            check_scenario(cfg.scenario, &[ScenarioKind::Transparency])?;
            let out = transparency::run_transparency(&cfg)?;
            transparency::write_transparency(&out, &args.out)
        }
        Command::TransparencyScan(args) => {
            let cfg: TransparencyScanConfig = load_config(&args.config)?;
            check_scenario(cfg.scenario, &[ScenarioKind::TransparencyScan])?;
            let out = transparency::run_transparency_scan(&cfg)?;
            transparency::write_scan(&out, &cfg, &args.out)
        }
        Command::Selfint(args) => {
            let cfg = selfint_config(args)?;
            check_scenario(cfg.scenario, &[ScenarioKind::Selfint, ScenarioKind::SelfintRwa])?;
            let out = selfint::run_selfint(&cfg)?;
            selfint::write_selfint(&out, &args.out)
        }
        Command::SelfintRwa(args) => {
            let cfg = selfint_config(args)?;
            check_scenario(cfg.scenario, &[ScenarioKind::Selfint, ScenarioKind::SelfintRwa])?;
            let out = selfint::run_selfint(&cfg)?;
            selfint::write_selfint(&out, &args.out)?;
            let replay = selfint::run_replay(&out, cfg.numerics.rtol)?;
            selfint::write_replay(&replay, &out, &args.out)
        }
        Command::RwaGeneric(args) => {
            let cfg: RwaGenericConfig = load_config(&args.config)?;
            check_scenario(cfg.scenario, &[ScenarioKind::RwaGeneric])?;
            let out =
                generic::run_generic(&cfg, args.degenerate, args.compare_oracle, args.radius)?;
            generic::write_generic(&out, &args.out)
        }
    }
}

/// Load a self-interaction config and apply command-line overrides.
fn selfint_config(args: &RunArgs) -> Result<SelfIntConfig, CliError> {
    let mut cfg: SelfIntConfig = load_config(&args.config)?;
    if let Some(radius) = args.radius {
        cfg.numerics.radius = radius;
    }
    if let Some(modes) = args.modes {
        cfg.numerics.mode_count = modes;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_line_parses_flags() {
        let cli = Cli::try_parse_from([
            "stimrwa",
            "selfint-rwa",
            "--config",
            "cfg.json",
            "--out",
            "outdir",
            "--degenerate",
            "--radius",
            "3",
            "--modes",
            "7",
        ])
        .unwrap();
        match cli.command {
            Command::SelfintRwa(args) => {
                assert_eq!(args.config, PathBuf::from("cfg.json"));
                assert_eq!(args.out, PathBuf::from("outdir"));
                assert!(args.degenerate);
                assert!(!args.compare_oracle);
                assert_eq!(args.radius, Some(3));
                assert_eq!(args.modes, Some(7));
            }
            other => panic!("wrong command: {other:?}"),
        }
    }

    #[test]
    fn missing_config_flag_is_a_parse_error() {
        assert!(Cli::try_parse_from(["stimrwa", "transparency", "--out", "x"]).is_err());
    }

    #[test]
    fn unknown_subcommand_is_rejected() {
        assert!(Cli::try_parse_from(["stimrwa", "frobnicate"]).is_err());
    }
}
