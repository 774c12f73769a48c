//! Command-line front end: deterministic CSV/JSON emissions for
//! thresholds, spectra, potential profiles, verification suites, and
//! counterexample searches.
//!
//! Exit codes: 0 success, 1 invalid parameters, 2 numerical
//! non-convergence, 3 verification failure.

use ballstab::report::{
    render_counterexample, render_fuglede, render_mass_report, render_potential,
    render_spectrum, render_thresholds, render_verify, Coupling, OutputFormat, VerifyOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ballstab",
    about = "Stability thresholds, spectra, and perturbation energies of the ball \
             for attractive-repulsive power-law interaction energies",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the emission to a file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Ambient dimension.
    #[arg(long, default_value_t = 3)]
    d: u32,
    /// Repulsion exponent, in (0, d-1).
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Attraction exponent, positive.
    #[arg(long, default_value_t = 4.0)]
    beta: f64,
}

#[derive(Args)]
struct CouplingArgs {
    /// Coupling of the attractive term (unit-volume formulation).
    #[arg(long, conflicts_with = "mass")]
    gamma: Option<f64>,
    /// Mass of the coupling-1 formulation; converted to gamma by scaling.
    #[arg(long)]
    mass: Option<f64>,
}

impl CouplingArgs {
    fn resolve(&self, default_gamma: f64) -> Coupling {
        match (self.gamma, self.mass) {
            (Some(g), _) => Coupling::Gamma(g),
            (None, Some(m)) => Coupling::Mass(m),
            (None, None) => Coupling::Gamma(default_gamma),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form stability thresholds for (d, alpha, beta).
    Thresholds {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Eigenvalue, ratio, and X_k table over harmonic degrees.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Largest degree in the table.
        #[arg(long, default_value_t = 64)]
        kmax: u64,
    },
    /// Radial profile of the ball potential.
    Potential {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        coupling: CouplingArgs,
        /// Absolute quadrature tolerance per point.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Full verification suite; exits 3 when any check fails.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Degree cutoff for the brute-force ratio scan.
        #[arg(long, default_value_t = 10_000)]
        kmax: u64,
        /// Base tolerance for the expansion checks.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Monte Carlo sample count for the cross-check.
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        /// Monte Carlo seed.
        #[arg(long, default_value_t = 12_345)]
        seed: u64,
    },
    /// Quadratic-expansion check of the energy around the ball.
    Fuglede {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        coupling: CouplingArgs,
        /// Harmonic degree of the perturbation mode.
        #[arg(long, default_value_t = 2)]
        degree: usize,
        /// Comma-separated perturbation amplitudes.
        #[arg(long, default_value = "0.04,0.02,0.01", value_delimiter = ',')]
        amplitudes: Vec<f64>,
        /// Absolute tolerance for each energy difference.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Search for a lower-energy competitor by moving a small ball of mass.
    Counterexample {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        coupling: CouplingArgs,
        /// Comma-separated bump radii to try.
        #[arg(long, default_value = "0.02,0.04,0.06,0.08,0.1", value_delimiter = ',')]
        deltas: Vec<f64>,
        /// Tolerance for the potential scan and interaction integrals.
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Mass-based stability classification.
    #[command(name = "mass-report")]
    MassReport {
        #[command(flatten)]
        model: ModelArgs,
        /// Mass of the set in the coupling-1 formulation.
        #[arg(long)]
        mass: f64,
    },
}

fn run(cli: &Cli) -> ballstab::Result<(String, bool)> {
    let format = OutputFormat::from(cli.format);
    match &cli.command {
        Command::Thresholds { model } => {
            render_thresholds(model.d, model.alpha, model.beta, format).map(|s| (s, true))
        }
        Command::Spectrum { model, kmax } => {
            render_spectrum(model.d, model.alpha, model.beta, *kmax, format).map(|s| (s, true))
        }
        Command::Potential { model, coupling, tol } => render_potential(
            model.d,
            model.alpha,
            model.beta,
            coupling.resolve(1.0),
            *tol,
            format,
        )
        .map(|s| (s, true)),
        Command::Verify { model, kmax, tol, samples, seed } => {
            let opts = VerifyOptions {
                d: model.d,
                alpha: model.alpha,
                beta: model.beta,
                k_max: *kmax,
                tol: *tol,
                samples: *samples,
                seed: *seed,
            };
            render_verify(&opts, format)
        }
        Command::Fuglede { model, coupling, degree, amplitudes, tol } => render_fuglede(
            model.d,
            model.alpha,
            model.beta,
            coupling.resolve(1.0),
            *degree,
            amplitudes,
            *tol,
            format,
        )
        .map(|s| (s, true)),
        Command::Counterexample { model, coupling, deltas, tol } => render_counterexample(
            model.d,
            model.alpha,
            model.beta,
            coupling.resolve(1.0 / 7.0),
            deltas,
            *tol,
            format,
        )
        .map(|s| (s, true)),
        Command::MassReport { model, mass } => {
            render_mass_report(*mass, model.d, model.alpha, model.beta, format)
                .map(|s| (s, true))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, passed)) => {
            let io_result = match &cli.out {
                Some(path) => std::fs::write(path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = io_result {
                eprintln!("error: failed to write output: {e}");
                return ExitCode::from(1);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
