//! Deterministic CSV/JSON emissions behind the command-line front end.
//!
//! Every function renders a complete emission as a string: identical
//! inputs (including seeds) produce byte-identical output, so runs can
//! be diffed and gated in CI. JSON uses shortest-round-trip float
//! formatting; CSV uses 17 significant digits, which round-trips f64.

use crate::energy::{
    delta_f, mc_energy_star, psi_prime_at_one, psi_prime_root_in_gamma, radial_profile,
    ConstraintMode, StarPerturbation,
};
use crate::error::{Error, Result};
use crate::harmonics::{basis_dim, build_grid, HarmonicCoefficients};
use crate::scenarios::{
    find_counterexample, mass_report, verify_appendix, verify_fuglede, AppendixReport, Check,
    CounterexampleReport, FugledeReport, MassReport,
};
use crate::special::Dimension;
use crate::spectral::{
    compute_thresholds, kappa, mass_gamma_scaling, mu_k, mu_k_funk_hecke, spectral_rows,
    ModelParams, Regime,
};
use serde::Serialize;

/// Output encoding selected by `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// 17 significant digits: enough to reconstruct the exact f64.
fn csv_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Computation(format!("JSON encoding failed: {e}")))
}

/// Either a coupling or a mass on the command line; exactly one.
#[derive(Debug, Clone, Copy)]
pub enum Coupling {
    Gamma(f64),
    Mass(f64),
}

impl Coupling {
    /// Resolve to (γ, m): whichever was given determines the other.
    pub fn resolve(&self, d: Dimension, alpha: f64, beta: f64) -> Result<(f64, f64)> {
        match *self {
            Coupling::Gamma(g) => {
                if !(g > 0.0) {
                    return Err(Error::Domain(format!("gamma must be positive, got {g}")));
                }
                let omega = crate::special::unit_ball_volume(d.get());
                Ok((g, omega * g.powf(d.as_f64() / (alpha + beta))))
            }
            Coupling::Mass(m) => {
                let (g, _) = mass_gamma_scaling(m, d, alpha, beta)?;
                Ok((g, m))
            }
        }
    }
}

#[derive(Serialize)]
struct ThresholdsEmission {
    d: u32,
    alpha: f64,
    beta: f64,
    beta_star: f64,
    kappa: f64,
    gamma_star: f64,
    gamma_star_star: f64,
    m_star: f64,
    m_star_star: f64,
    regime: Regime,
}

fn regime_label(r: Regime) -> &'static str {
    match r {
        Regime::BetaBelowStar => "beta_below_star",
        Regime::BetaAtOrAboveStar => "beta_at_or_above_star",
    }
}

/// The `thresholds` emission.
pub fn render_thresholds(d: u32, alpha: f64, beta: f64, format: OutputFormat) -> Result<String> {
    let d = Dimension::new(d)?;
    let t = compute_thresholds(d, alpha, beta)?;
    let params = ModelParams::new(d, alpha, beta, 1.0)?;
    let emission = ThresholdsEmission {
        d: d.get(),
        alpha,
        beta,
        beta_star: t.beta_star,
        kappa: kappa(&params)?,
        gamma_star: t.gamma_star,
        gamma_star_star: t.gamma_star_star,
        m_star: t.m_star,
        m_star_star: t.m_star_star,
        regime: t.regime,
    };
    match format {
        OutputFormat::Json => to_json(&emission),
        OutputFormat::Csv => {
            let mut out = String::from(
                "d,alpha,beta,beta_star,kappa,gamma_star,gamma_star_star,m_star,m_star_star,regime\n",
            );
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                emission.d,
                csv_num(emission.alpha),
                csv_num(emission.beta),
                csv_num(emission.beta_star),
                csv_num(emission.kappa),
                csv_num(emission.gamma_star),
                csv_num(emission.gamma_star_star),
                csv_num(emission.m_star),
                csv_num(emission.m_star_star),
                regime_label(emission.regime),
            ));
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct SpectrumEmission {
    d: u32,
    alpha: f64,
    beta: f64,
    k_max: u64,
    rows: Vec<crate::spectral::SpectralRow>,
}

/// The `spectrum` emission: the table reproducing the ratio and X_k
/// sequences degree by degree.
pub fn render_spectrum(
    d: u32,
    alpha: f64,
    beta: f64,
    k_max: u64,
    format: OutputFormat,
) -> Result<String> {
    let d = Dimension::new(d)?;
    let params = ModelParams::new(d, alpha, beta, 1.0)?;
    let rows = spectral_rows(&params, k_max)?;
    match format {
        OutputFormat::Json => to_json(&SpectrumEmission {
            d: d.get(),
            alpha,
            beta,
            k_max,
            rows,
        }),
        OutputFormat::Csv => {
            let mut out = String::from("k,mu_rep,mu_att,ratio,x_k\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.k,
                    csv_num(r.mu_rep),
                    csv_num(r.mu_att),
                    r.ratio.map(csv_num).unwrap_or_default(),
                    r.x_k.map(csv_num).unwrap_or_default(),
                ));
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct PotentialRow {
    r: f64,
    psi: f64,
    err: f64,
}

#[derive(Serialize)]
struct PotentialEmission {
    d: u32,
    alpha: f64,
    beta: f64,
    gamma: f64,
    mass: f64,
    tol: f64,
    rows: Vec<PotentialRow>,
}

/// The `potential` emission: ψ on the default scan grid.
pub fn render_potential(
    d: u32,
    alpha: f64,
    beta: f64,
    coupling: Coupling,
    tol: f64,
    format: OutputFormat,
) -> Result<String> {
    let d = Dimension::new(d)?;
    let (gamma, mass) = coupling.resolve(d, alpha, beta)?;
    let params = ModelParams::new(d, alpha, beta, gamma)?;
    // the center row r = 0 leads the default scan grid
    let mut radii = vec![0.0];
    radii.extend(crate::energy::default_scan_radii());
    let profile = radial_profile(&params, &radii, tol)?;
    let rows: Vec<PotentialRow> = profile
        .radii
        .iter()
        .zip(profile.values.iter().zip(&profile.errors))
        .map(|(r, (v, e))| PotentialRow { r: *r, psi: *v, err: *e })
        .collect();
    match format {
        OutputFormat::Json => to_json(&PotentialEmission {
            d: d.get(),
            alpha,
            beta,
            gamma,
            mass,
            tol,
            rows,
        }),
        OutputFormat::Csv => {
            let mut out = String::from("r,psi,err\n");
            for row in rows {
                out.push_str(&format!(
                    "{},{},{}\n",
                    csv_num(row.r),
                    csv_num(row.psi),
                    csv_num(row.err)
                ));
            }
            Ok(out)
        }
    }
}

/// Everything the `verify` subcommand needs to know.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub d: u32,
    pub alpha: f64,
    pub beta: f64,
    pub k_max: u64,
    pub tol: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            d: 3,
            alpha: 1.0,
            beta: 4.0,
            k_max: 10_000,
            tol: 1e-6,
            samples: 200_000,
            seed: 12345,
        }
    }
}

#[derive(Serialize)]
struct VerifyEmission {
    d: u32,
    alpha: f64,
    beta: f64,
    k_max: u64,
    tol: f64,
    samples: u64,
    seed: u64,
    passed: bool,
    checks: Vec<Check>,
    appendix: AppendixReport,
    expansion_above: FugledeReport,
    expansion_below: FugledeReport,
}

/// The `verify` suite: appendix extremizers, the quadratic expansion on
/// both sides of the stability window, the potential-derivative sign
/// identity, the spectral-vs-quadrature eigenvalue oracle, and a seeded
/// Monte Carlo cross-check. Returns the emission and whether every
/// check passed.
pub fn render_verify(opts: &VerifyOptions, format: OutputFormat) -> Result<(String, bool)> {
    let d = Dimension::new(opts.d)?;
    if d.get() != 2 && d.get() != 3 {
        return Err(Error::Unsupported(format!(
            "the verification suite needs numerical sphere support (d = 2 or 3), got d = {d}"
        )));
    }
    let base = ModelParams::new(d, opts.alpha, opts.beta, 1.0)?;
    let mut checks: Vec<Check> = Vec::new();

    let appendix = verify_appendix(&base, opts.k_max)?;
    checks.push(Check {
        name: "appendix_extremizers".into(),
        passed: appendix.passed,
        deviation: appendix
            .checks
            .iter()
            .map(|c| c.deviation)
            .fold(0.0, f64::max),
    });

    let gs = crate::spectral::gamma_star(&base)?;
    let gss = crate::spectral::gamma_star_star(&base)?;
    let above = base.with_gamma(2.0 * gs)?;
    let below = base.with_gamma(0.5 * gss)?;
    let amplitudes = [0.04, 0.02];
    let expansion_above = verify_fuglede(&above, 2, &amplitudes, 20, opts.tol * 1e-2)?;
    checks.push(Check {
        name: "expansion_positive_above_gamma_star".into(),
        passed: expansion_above.passed,
        deviation: expansion_above.rows.last().map_or(f64::NAN, |r| r.defect),
    });
    let expansion_below = verify_fuglede(&below, 2, &amplitudes, 20, opts.tol * 1e-2)?;
    checks.push(Check {
        name: "expansion_negative_below_gamma_star_star".into(),
        passed: expansion_below.passed,
        deviation: expansion_below.rows.last().map_or(f64::NAN, |r| r.defect),
    });

    // potential derivative: sign on both sides and the coupling root
    let prime_tol = 1e-7;
    let plus = psi_prime_at_one(&base.with_gamma(1.01 * gs)?, prime_tol)?;
    let minus = psi_prime_at_one(&base.with_gamma(0.99 * gss)?, prime_tol)?;
    checks.push(Check {
        name: "potential_derivative_signs".into(),
        passed: plus > 0.0 && minus < 0.0,
        deviation: 0.0,
    });
    let root = psi_prime_root_in_gamma(d, opts.alpha, opts.beta, prime_tol)?;
    let kap = kappa(&base)?;
    let root_dev = ((root - kap) / kap).abs();
    checks.push(Check {
        name: "potential_derivative_root_is_kappa".into(),
        passed: root_dev <= 1e-6,
        deviation: root_dev,
    });

    // eigenvalue oracle: quadrature route against the closed form
    let mut worst = 0.0_f64;
    for sigma in [-opts.alpha, opts.beta] {
        for k in 0..=8u64 {
            let fh = mu_k_funk_hecke(d, sigma, k, 1e-9)?;
            let cf = mu_k(d, sigma, k)?;
            worst = worst.max((fh - cf).abs() / cf.abs().max(1.0));
        }
    }
    checks.push(Check {
        name: "funk_hecke_oracle".into(),
        passed: worst <= 1e-8,
        deviation: worst,
    });

    // seeded Monte Carlo cross-check of the exact energy difference
    let grid = build_grid(d, 12)?;
    let mut coeffs = HarmonicCoefficients::zeros(d, 4);
    let mut state = opts.seed as f64 / u64::MAX as f64 + 0.123;
    for k in 2..=4 {
        for i in 1..=basis_dim(d, k) {
            state = (state * 977.0 + 0.3).sin();
            coeffs.set(k, i, 0.3 * state)?;
        }
    }
    let pert = StarPerturbation::new(coeffs, ConstraintMode::Raw);
    let t = 0.05;
    let exact = delta_f(&pert, t, &base, &grid, 1e-4)?;
    let mc = mc_energy_star(&pert, t, &base, &grid, opts.samples.max(10_000), opts.seed)?;
    let combined = (exact.error * exact.error + mc.error * mc.error).sqrt();
    let gap = (exact.value - mc.value).abs();
    checks.push(Check {
        name: "monte_carlo_cross_check".into(),
        passed: gap <= 3.0 * combined,
        deviation: gap / combined.max(1e-300),
    });

    let passed = checks.iter().all(|c| c.passed);
    let emission = VerifyEmission {
        d: d.get(),
        alpha: opts.alpha,
        beta: opts.beta,
        k_max: opts.k_max,
        tol: opts.tol,
        samples: opts.samples,
        seed: opts.seed,
        passed,
        checks,
        appendix,
        expansion_above,
        expansion_below,
    };
    let text = match format {
        OutputFormat::Json => to_json(&emission)?,
        OutputFormat::Csv => {
            let mut out = String::from("check,passed,deviation\n");
            for c in &emission.checks {
                out.push_str(&format!("{},{},{}\n", c.name, c.passed, csv_num(c.deviation)));
            }
            for c in &emission.appendix.checks {
                out.push_str(&format!(
                    "appendix/{},{},{}\n",
                    c.name,
                    c.passed,
                    csv_num(c.deviation)
                ));
            }
            out
        }
    };
    Ok((text, passed))
}

#[derive(Serialize)]
struct FugledeEmission {
    d: u32,
    alpha: f64,
    beta: f64,
    gamma: f64,
    mass: f64,
    report: FugledeReport,
}

/// The `fuglede` emission: the quadratic-expansion report for one
/// coupling and mode degree.
pub fn render_fuglede(
    d: u32,
    alpha: f64,
    beta: f64,
    coupling: Coupling,
    degree: usize,
    amplitudes: &[f64],
    tol: f64,
    format: OutputFormat,
) -> Result<String> {
    let d = Dimension::new(d)?;
    let (gamma, mass) = coupling.resolve(d, alpha, beta)?;
    let params = ModelParams::new(d, alpha, beta, gamma)?;
    let report = verify_fuglede(&params, degree, amplitudes, 20, tol)?;
    match format {
        OutputFormat::Json => to_json(&FugledeEmission {
            d: d.get(),
            alpha,
            beta,
            gamma,
            mass,
            report,
        }),
        OutputFormat::Csv => {
            let mut out = String::from("t,delta_f,error,defect\n");
            for r in &report.rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    csv_num(r.t),
                    csv_num(r.delta_f),
                    csv_num(r.error),
                    csv_num(r.defect)
                ));
            }
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct CounterexampleEmission {
    report: CounterexampleReport,
}

/// The `counterexample` emission.
pub fn render_counterexample(
    d: u32,
    alpha: f64,
    beta: f64,
    coupling: Coupling,
    deltas: &[f64],
    tol: f64,
    format: OutputFormat,
) -> Result<String> {
    let d = Dimension::new(d)?;
    let (gamma, _) = coupling.resolve(d, alpha, beta)?;
    let params = ModelParams::new(d, alpha, beta, gamma)?;
    let report = find_counterexample(&params, deltas, tol)?;
    match format {
        OutputFormat::Json => to_json(&CounterexampleEmission { report }),
        OutputFormat::Csv => {
            let mut out = String::from("delta,delta_f,error,leading_term\n");
            for a in &report.attempts {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    csv_num(a.delta),
                    csv_num(a.delta_f),
                    csv_num(a.error),
                    csv_num(a.leading_term)
                ));
            }
            out.push_str(&format!("# status,{}\n", report.status));
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct MassReportEmission {
    report: MassReport,
}

/// The `mass-report` emission.
pub fn render_mass_report(
    mass: f64,
    d: u32,
    alpha: f64,
    beta: f64,
    format: OutputFormat,
) -> Result<String> {
    let d = Dimension::new(d)?;
    let report = mass_report(mass, d, alpha, beta)?;
    match format {
        OutputFormat::Json => to_json(&MassReportEmission { report }),
        OutputFormat::Csv => {
            let mut out = String::from(
                "mass,radius,gamma,m_star,m_star_star,gamma_star,gamma_star_star,verdict,margin\n",
            );
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{:?},{}\n",
                csv_num(report.mass),
                csv_num(report.radius),
                csv_num(report.gamma),
                csv_num(report.m_star),
                csv_num(report.m_star_star),
                csv_num(report.gamma_star),
                csv_num(report.gamma_star_star),
                report.classification.verdict,
                csv_num(report.classification.margin),
            ));
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_emission_values() {
        let json = render_thresholds(3, 1.0, 4.0, OutputFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["d"], 3);
        assert!((v["gamma_star"].as_f64().unwrap() - 0.125).abs() < 1e-13);
        assert!((v["beta_star"].as_f64().unwrap() - 22.0).abs() < 1e-12);
        assert!((v["gamma_star_star"].as_f64().unwrap() - 1.0 / 24.0).abs() < 1e-14);
        assert_eq!(v["regime"], "beta_below_star");
        // all required keys present
        for key in [
            "d", "alpha", "beta", "beta_star", "kappa", "gamma_star", "gamma_star_star",
            "m_star", "m_star_star", "regime",
        ] {
            assert!(v.get(key).is_some(), "missing key {key}");
        }
        // round trip: re-deriving gamma_star from the emitted inputs
        let d = Dimension::new(v["d"].as_u64().unwrap() as u32).unwrap();
        let params = ModelParams::new(
            d,
            v["alpha"].as_f64().unwrap(),
            v["beta"].as_f64().unwrap(),
            1.0,
        )
        .unwrap();
        let again = crate::spectral::gamma_star(&params).unwrap();
        assert!((again - v["gamma_star"].as_f64().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn thresholds_rejects_bad_alpha() {
        assert!(render_thresholds(3, 2.5, 1.0, OutputFormat::Json).is_err());
    }

    #[test]
    fn spectrum_csv_shape() {
        let csv = render_spectrum(3, 1.0, 4.0, 6, OutputFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,mu_rep,mu_att,ratio,x_k");
        assert_eq!(lines.len(), 8);
        // k = 0 row has zero eigenvalues and blank ratio columns
        assert!(lines[1].starts_with("0,0"));
        assert!(lines[1].ends_with(",,"));
        // numbers round-trip through 17 significant digits
        let field = lines[3].split(',').nth(1).unwrap();
        let parsed: f64 = field.parse().unwrap();
        let mu2 = mu_k(Dimension::new(3).unwrap(), -1.0, 2).unwrap();
        assert_eq!(parsed.to_bits(), mu2.to_bits());
    }

    #[test]
    fn emissions_are_deterministic() {
        let a = render_spectrum(3, 1.0, 5.0, 32, OutputFormat::Csv).unwrap();
        let b = render_spectrum(3, 1.0, 5.0, 32, OutputFormat::Csv).unwrap();
        assert_eq!(a, b);
        let a = render_mass_report(2.0, 3, 1.0, 4.0, OutputFormat::Json).unwrap();
        let b = render_mass_report(2.0, 3, 1.0, 4.0, OutputFormat::Json).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coupling_resolution() {
        let d = Dimension::new(3).unwrap();
        let omega = crate::special::unit_ball_volume(3);
        let (g, m) = Coupling::Gamma(1.0).resolve(d, 1.0, 4.0).unwrap();
        assert_eq!(g, 1.0);
        assert!((m - omega).abs() < 1e-13);
        let (g2, m2) = Coupling::Mass(m).resolve(d, 1.0, 4.0).unwrap();
        assert!((g2 - 1.0).abs() < 1e-13);
        assert_eq!(m2, m);
        assert!(Coupling::Gamma(-1.0).resolve(d, 1.0, 4.0).is_err());
    }
}
