//! End-to-end verification drivers.
//!
//! Each driver assembles one self-contained claim about the model out
//! of the lower layers and reports pass/fail with the measured
//! deviations: the extremizer structure of the ratio sequence, the
//! quadratic expansion of the energy around the ball, the sign of the
//! boundary potential derivative, and the mass-transfer construction
//! showing that a stable ball need not minimize locally in L¹.

use crate::energy::{
    ball_ball_interaction, default_scan_radii, delta_f, psi, ConstraintMode, EnergyEstimate,
    StarPerturbation,
};
use crate::error::{Error, Result};
use crate::harmonics::{build_grid, HarmonicCoefficients};
use crate::special::unit_ball_volume;
use crate::spectral::{
    beta_star, classify_stability, gamma_star, gamma_star_star, kappa, mass_gamma_scaling,
    mass_thresholds, quad_form, ratio_k, thresholds_bruteforce, ModelParams, Regime, StabilityClass,
    SupLocation, x_k,
};
use serde::Serialize;

/// One named check with its measured deviation.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub deviation: f64,
}

impl Check {
    fn new(name: &str, passed: bool, deviation: f64) -> Self {
        Check { name: name.into(), passed, deviation }
    }
}

/// Report of the ratio-sequence extremizer verification.
#[derive(Debug, Clone, Serialize)]
pub struct AppendixReport {
    pub d: u32,
    pub alpha: f64,
    pub beta: f64,
    pub checks: Vec<Check>,
    /// The displayed simple closed form for X₂ does not reproduce the
    /// defining product; the product is normative and the discrepancy
    /// is reported here rather than failing the run.
    pub x2_display_note: String,
    pub passed: bool,
}

/// Verify the extremizer structure of the stability ratio sequence:
/// infimum at degree 2, supremum at degree 3 or in the limit depending
/// on the regime, the κ·X_k factorization, and closed-form versus
/// brute-force agreement of both thresholds.
pub fn verify_appendix(params: &ModelParams, k_max: u64) -> Result<AppendixReport> {
    if k_max < 100 {
        return Err(Error::Domain(format!(
            "appendix verification needs k_max >= 100, got {k_max}"
        )));
    }
    let mut checks = Vec::new();
    let ext = thresholds_bruteforce(params, k_max)?;
    let gs = gamma_star(params)?;
    let gss = gamma_star_star(params)?;
    let kap = kappa(params)?;
    let bs = beta_star(params.d(), params.alpha())?;

    checks.push(Check::new(
        "ratio_infimum_at_degree_2",
        ext.argmin == 2,
        (ext.inf - ratio_k(params, 2)?).abs() / ext.inf.abs(),
    ));
    let sup_expected = if params.beta() >= bs {
        SupLocation::Degree(3)
    } else {
        SupLocation::Limit
    };
    checks.push(Check::new(
        "ratio_supremum_location",
        ext.argmax == sup_expected,
        0.0,
    ));
    let mut worst_fact = 0.0_f64;
    for k in 2..=k_max.min(1000) {
        let lhs = ratio_k(params, k)?;
        let rhs = kap * x_k(params, k)?;
        worst_fact = worst_fact.max(((lhs - rhs) / rhs).abs());
    }
    checks.push(Check::new(
        "kappa_x_factorization",
        worst_fact <= 1e-10,
        worst_fact,
    ));
    let dev_star = ((ext.sup - gs) / gs).abs();
    checks.push(Check::new(
        "gamma_star_closed_vs_bruteforce",
        dev_star <= 1e-9,
        dev_star,
    ));
    let dev_ss = ((ext.inf - gss) / gss).abs();
    checks.push(Check::new(
        "gamma_star_star_closed_vs_bruteforce",
        dev_ss <= 1e-9,
        dev_ss,
    ));
    let (df, alpha, beta) = (params.d().as_f64(), params.alpha(), params.beta());
    let x3_closed = (df - 1.0 - alpha) * (2.0 * df + beta) * (2.0 * df + 2.0 + beta)
        / ((df - 1.0 + beta) * (2.0 * df - alpha) * (2.0 * df + 2.0 - alpha));
    let x3 = x_k(params, 3)?;
    let dev_x3 = ((x3 - x3_closed) / x3).abs();
    checks.push(Check::new("x3_closed_form", dev_x3 <= 1e-9, dev_x3));
    checks.push(Check::new("threshold_ordering", gss < gs, 0.0));

    let x2 = x_k(params, 2)?;
    let x2_displayed = (df - 1.0 - alpha) / (df - 1.0 + beta);
    let x2_display_note = format!(
        "displayed simple form (d-1-alpha)/(d-1+beta) = {x2_displayed:.12} vs defining \
         product X_2 = {x2:.12} (relative gap {:.3e}); the product is normative and \
         consistent with gamma_star_star = kappa * X_2",
        ((x2_displayed - x2) / x2).abs()
    );

    let passed = checks.iter().all(|c| c.passed);
    Ok(AppendixReport {
        d: params.d().get(),
        alpha: params.alpha(),
        beta: params.beta(),
        checks,
        x2_display_note,
        passed,
    })
}

/// One amplitude row of the quadratic-expansion check.
#[derive(Debug, Clone, Serialize)]
pub struct FugledeRow {
    pub t: f64,
    pub delta_f: f64,
    pub error: f64,
    /// |2 ΔF / t² - QF(u)|
    pub defect: f64,
}

/// Report of the quadratic energy expansion around the ball.
#[derive(Debug, Clone, Serialize)]
pub struct FugledeReport {
    pub gamma: f64,
    pub mode_degree: usize,
    pub quad_form_value: f64,
    /// +1 above γ₊, -1 below γ₊₊, 0 inside the indefinite window.
    pub expected_sign: i32,
    pub rows: Vec<FugledeRow>,
    /// defect(t_i) / defect(t_{i+1}) for consecutive amplitudes.
    pub defect_ratios: Vec<f64>,
    pub signs_ok: bool,
    pub defects_decreasing: bool,
    pub passed: bool,
}

/// Check the exact energy difference of a volume- and
/// barycenter-corrected single-mode perturbation against the
/// second-variation quadratic form, across a list of amplitudes.
pub fn verify_fuglede(
    params: &ModelParams,
    mode_degree: usize,
    t_list: &[f64],
    resolution: usize,
    tol: f64,
) -> Result<FugledeReport> {
    if mode_degree < 2 {
        return Err(Error::Domain(format!(
            "the expansion check needs a mode degree >= 2, got {mode_degree}"
        )));
    }
    if t_list.is_empty() {
        return Err(Error::Domain("amplitude list must not be empty".into()));
    }
    let grid = build_grid(params.d(), resolution)?;
    let u = HarmonicCoefficients::single(params.d(), mode_degree, 1)?;
    let pert = StarPerturbation::new(u.clone(), ConstraintMode::VolumeAndBarycenterCorrected);
    let qf = quad_form(params, &u)?;
    let gs = gamma_star(params)?;
    let gss = gamma_star_star(params)?;
    let expected_sign = if params.gamma() > gs {
        1
    } else if params.gamma() < gss {
        -1
    } else {
        0
    };
    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let df = delta_f(&pert, t, params, &grid, tol)?;
        rows.push(FugledeRow {
            t,
            delta_f: df.value,
            error: df.error,
            defect: (2.0 * df.value / (t * t) - qf).abs(),
        });
    }
    let defect_ratios: Vec<f64> =
        rows.windows(2).map(|w| w[0].defect / w[1].defect).collect();
    let signs_ok = match expected_sign {
        1 => rows.iter().all(|r| r.delta_f > 3.0 * r.error),
        -1 => rows.iter().all(|r| r.delta_f < -3.0 * r.error),
        _ => true,
    };
    let defects_decreasing = defect_ratios.iter().all(|r| *r > 1.0);
    Ok(FugledeReport {
        gamma: params.gamma(),
        mode_degree,
        quad_form_value: qf,
        rows,
        defect_ratios,
        signs_ok,
        defects_decreasing,
        passed: signs_ok && defects_decreasing,
        expected_sign,
    })
}

/// Scan of the ball potential against the value on the boundary.
///
/// The ball can only be an L¹-local minimizer if ψ(r) ≤ ψ(1) inside and
/// ψ(R) ≥ ψ(1) outside: moving a drop of mass from a higher-potential
/// spot to a lower one lowers the energy at leading order.
#[derive(Debug, Clone, Serialize)]
pub struct NecessaryConditionScan {
    pub d: u32,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub radii: Vec<f64>,
    pub psi_values: Vec<f64>,
    pub psi_errors: Vec<f64>,
    pub psi_at_one: f64,
    /// max over r < 1 of ψ(r) - ψ(1)
    pub max_interior_excess: f64,
    pub interior_argmax: f64,
    /// min over R > 1 of ψ(R) - ψ(1)
    pub min_exterior_excess: f64,
    pub exterior_argmin: f64,
    /// Confirmed interior violation: ψ(r) > ψ(1) beyond 3 combined errors.
    pub interior_violation: bool,
    /// Confirmed exterior violation: ψ(R) < ψ(1) beyond 3 combined errors.
    pub exterior_violation: bool,
    /// No confirmed violation on the grid.
    pub holds: bool,
}

/// Evaluate the necessary condition on a radius grid (the default grid
/// when `radii` is empty).
pub fn scan_necessary_condition(
    params: &ModelParams,
    radii: &[f64],
    tol: f64,
) -> Result<NecessaryConditionScan> {
    let grid: Vec<f64> = if radii.is_empty() { default_scan_radii() } else { radii.to_vec() };
    let at_one = psi(1.0, params, tol)?;
    let mut values = Vec::with_capacity(grid.len());
    let mut errors = Vec::with_capacity(grid.len());
    let mut max_in = f64::NEG_INFINITY;
    let mut arg_in = f64::NAN;
    let mut min_out = f64::INFINITY;
    let mut arg_out = f64::NAN;
    let mut interior_violation = false;
    let mut exterior_violation = false;
    for &r in &grid {
        let e = psi(r, params, tol)?;
        values.push(e.value);
        errors.push(e.error);
        let excess = e.value - at_one.value;
        let band = 3.0 * (e.error + at_one.error);
        if r < 1.0 {
            if excess > max_in {
                max_in = excess;
                arg_in = r;
            }
            if excess > band {
                interior_violation = true;
            }
        } else if r > 1.0 {
            if excess < min_out {
                min_out = excess;
                arg_out = r;
            }
            if excess < -band {
                exterior_violation = true;
            }
        }
    }
    Ok(NecessaryConditionScan {
        d: params.d().get(),
        alpha: params.alpha(),
        beta: params.beta(),
        gamma: params.gamma(),
        radii: grid,
        psi_values: values,
        psi_errors: errors,
        psi_at_one: at_one.value,
        max_interior_excess: max_in,
        interior_argmax: arg_in,
        min_exterior_excess: min_out,
        exterior_argmin: arg_out,
        interior_violation,
        exterior_violation,
        holds: !(interior_violation || exterior_violation),
    })
}

/// Where the donor bump sits relative to the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpMode {
    /// Donor inside at the interior potential maximizer, receiver
    /// tangent outside.
    InnerBump,
    /// Donor just inside the boundary, receiver at the exterior
    /// potential minimizer.
    OuterBump,
}

/// One attempted bump radius.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleAttempt {
    pub delta: f64,
    pub delta_f: f64,
    pub error: f64,
    /// Leading-order prediction 2 (ψ(receiver) - ψ(donor)) |B_δ|.
    pub leading_term: f64,
}

/// Result of the mass-transfer competitor search.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub d: u32,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mode: Option<BumpMode>,
    /// True when some competitor had ΔF < 0 beyond 3 combined errors.
    pub verdict: bool,
    pub status: String,
    pub bump_radius: Option<f64>,
    pub donor_center: Option<[f64; 3]>,
    pub receiver_center: Option<[f64; 3]>,
    pub delta_f: Option<EnergyEstimate>,
    /// |E Δ B₁| = 2 |B_δ| for the successful competitor.
    pub asymmetry: Option<f64>,
    pub attempts: Vec<CounterexampleAttempt>,
}

/// Search for a competitor E = (B₁ \ D₁) ∪ D₂ with lower energy than
/// the ball, moving a δ-ball of mass along the first axis from the
/// potential maximizer to the minimizer. Inconclusive outcomes are a
/// first-class result, not an error: the potential scan gives only a
/// sufficient condition for non-minimality.
pub fn find_counterexample(
    params: &ModelParams,
    deltas: &[f64],
    tol: f64,
) -> Result<CounterexampleReport> {
    let scan = scan_necessary_condition(params, &[], tol)?;
    let inconclusive = |attempts: Vec<CounterexampleAttempt>, mode| CounterexampleReport {
        d: params.d().get(),
        alpha: params.alpha(),
        beta: params.beta(),
        gamma: params.gamma(),
        mode,
        verdict: false,
        status: "inconclusive".into(),
        bump_radius: None,
        donor_center: None,
        receiver_center: None,
        delta_f: None,
        asymmetry: None,
        attempts,
    };
    let mode = if scan.interior_violation {
        BumpMode::InnerBump
    } else if scan.exterior_violation {
        BumpMode::OuterBump
    } else {
        return Ok(inconclusive(Vec::new(), None));
    };
    let omega = unit_ball_volume(params.d().get());
    let mut attempts = Vec::new();
    for &delta in deltas {
        if !(delta > 0.0) {
            return Err(Error::Domain(format!("bump radius must be positive, got {delta}")));
        }
        let (donor_r, receiver_r) = match mode {
            // donor at the interior maximizer (kept inside the ball),
            // receiver tangent outside along the same axis
            BumpMode::InnerBump => (
                scan.interior_argmax.min(1.0 - delta - 1e-9).max(0.0),
                1.0 + delta,
            ),
            // donor just inside the boundary, receiver at the exterior
            // minimizer (kept disjoint from the ball)
            BumpMode::OuterBump => (1.0 - delta, scan.exterior_argmin.max(1.0 + delta)),
        };
        let donor = [donor_r, 0.0, 0.0];
        let receiver = [receiver_r, 0.0, 0.0];
        let origin = [0.0_f64; 3];
        let i_tol = (tol * 1e-2).min(1e-7);
        let i_b_receiver = ball_ball_interaction(&origin, 1.0, &receiver, delta, params, i_tol, 200_000, 17)?;
        let i_b_donor = ball_ball_interaction(&origin, 1.0, &donor, delta, params, i_tol, 200_000, 18)?;
        let i_pair = ball_ball_interaction(&donor, delta, &receiver, delta, params, i_tol, 200_000, 19)?;
        let i_self = ball_ball_interaction(&donor, delta, &donor, delta, params, i_tol, 200_000, 20)?;
        let value = 2.0 * i_b_receiver.value - 2.0 * i_b_donor.value - 2.0 * i_pair.value
            + 2.0 * i_self.value;
        let error =
            2.0 * (i_b_receiver.error + i_b_donor.error + i_pair.error + i_self.error);
        let bump_volume = omega * delta.powi(params.d().get() as i32);
        let psi_donor = psi(donor_r, params, i_tol)?;
        let psi_receiver = psi(receiver_r, params, i_tol)?;
        let leading = 2.0 * (psi_receiver.value - psi_donor.value) * bump_volume;
        attempts.push(CounterexampleAttempt { delta, delta_f: value, error, leading_term: leading });
        if value < -3.0 * error {
            let est = EnergyEstimate {
                value,
                error,
                method: crate::energy::Method::Quadrature,
                count: i_b_receiver.count + i_b_donor.count + i_pair.count + i_self.count,
                seed: None,
            };
            return Ok(CounterexampleReport {
                d: params.d().get(),
                alpha: params.alpha(),
                beta: params.beta(),
                gamma: params.gamma(),
                mode: Some(mode),
                verdict: true,
                status: "confirmed".into(),
                bump_radius: Some(delta),
                donor_center: Some(donor),
                receiver_center: Some(receiver),
                delta_f: Some(est),
                asymmetry: Some(2.0 * bump_volume),
                attempts,
            });
        }
    }
    Ok(inconclusive(attempts, Some(mode)))
}

/// Mass-based stability report for the coupling-1 energy.
#[derive(Debug, Clone, Serialize)]
pub struct MassReport {
    pub d: u32,
    pub alpha: f64,
    pub beta: f64,
    pub mass: f64,
    /// Radius of the ball with this volume.
    pub radius: f64,
    /// Equivalent coupling of the unit-volume problem.
    pub gamma: f64,
    /// Energy ratio between the two formulations.
    pub energy_scale: f64,
    pub m_star: f64,
    pub m_star_star: f64,
    pub gamma_star: f64,
    pub gamma_star_star: f64,
    pub classification: StabilityClass,
    pub regime: Regime,
}

/// Convert a mass to the equivalent coupling and classify the ball.
pub fn mass_report(
    m: f64,
    d: crate::special::Dimension,
    alpha: f64,
    beta: f64,
) -> Result<MassReport> {
    let (gamma, scale) = mass_gamma_scaling(m, d, alpha, beta)?;
    let params = ModelParams::new(d, alpha, beta, gamma)?;
    let (m_star, m_star_star) = mass_thresholds(d, alpha, beta)?;
    let thresholds = crate::spectral::compute_thresholds(d, alpha, beta)?;
    Ok(MassReport {
        d: d.get(),
        alpha,
        beta,
        mass: m,
        radius: (m / unit_ball_volume(d.get())).powf(1.0 / d.as_f64()),
        gamma,
        energy_scale: scale,
        m_star,
        m_star_star,
        gamma_star: thresholds.gamma_star,
        gamma_star_star: thresholds.gamma_star_star,
        classification: classify_stability(&params)?,
        regime: thresholds.regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::Dimension;
    use crate::spectral::Verdict;

    fn d3() -> Dimension {
        Dimension::new(3).unwrap()
    }

    fn p314(gamma: f64) -> ModelParams {
        ModelParams::new(d3(), 1.0, 4.0, gamma).unwrap()
    }

    #[test]
    fn appendix_report_both_regimes() {
        // β = 5 < β₊ = 22: supremum only in the limit
        let r = verify_appendix(&ModelParams::new(d3(), 1.0, 5.0, 1.0).unwrap(), 2000).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
        // β = 155 > β₊: supremum at degree 3
        let r = verify_appendix(&ModelParams::new(d3(), 1.0, 155.0, 1.0).unwrap(), 2000).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
        // at β = β₊ the two branches coincide
        let r = verify_appendix(&ModelParams::new(d3(), 1.0, 22.0, 1.0).unwrap(), 2000).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
        assert!(verify_appendix(&p314(1.0), 50).is_err());
        // the X₂ display note records a genuine mismatch at (3, 1, 4)
        let r = verify_appendix(&p314(1.0), 200).unwrap();
        assert!(r.x2_display_note.contains("normative"));
    }

    #[test]
    fn fuglede_signs_above_and_below() {
        // γ = 1 ≫ γ₊: energy differences positive, defect shrinking
        let r = verify_fuglede(&p314(1.0), 2, &[0.04, 0.02], 20, 1e-8).unwrap();
        assert_eq!(r.expected_sign, 1);
        assert!(r.passed, "{r:#?}");
        // γ = 1/48 < γ₊₊: energy differences negative
        let r = verify_fuglede(&p314(1.0 / 48.0), 2, &[0.04, 0.02], 20, 1e-8).unwrap();
        assert_eq!(r.expected_sign, -1);
        assert!(r.passed, "{r:#?}");
        assert!(verify_fuglede(&p314(1.0), 1, &[0.02], 20, 1e-8).is_err());
    }

    #[test]
    fn scan_violated_at_one_seventh_and_holds_at_large_gamma() {
        // γ = 1/7 ∈ (γ₊, γ_ball): stable but the interior potential
        // exceeds the boundary value
        let scan = scan_necessary_condition(&p314(1.0 / 7.0), &[], 1e-6).unwrap();
        assert!(scan.interior_violation);
        assert!(!scan.holds);
        assert!(scan.max_interior_excess > 0.0);
        // at γ = 0.5 the condition holds on the grid, and the attractive
        // term dominates outside: the exterior excess is strictly positive
        let scan = scan_necessary_condition(&p314(0.5), &[], 1e-6).unwrap();
        assert!(scan.holds, "excesses: {} / {}", scan.max_interior_excess, scan.min_exterior_excess);
        assert!(scan.min_exterior_excess > 0.0);
        // quadratic attraction at coupling 1: monotone potential as well
        let quad = ModelParams::new(d3(), 1.0, 2.0, 1.0).unwrap();
        let scan = scan_necessary_condition(&quad, &[], 1e-6).unwrap();
        assert!(scan.holds);
    }

    #[test]
    fn counterexample_found_at_one_seventh() {
        let report = find_counterexample(&p314(1.0 / 7.0), &[0.05, 0.08], 1e-5).unwrap();
        assert!(report.verdict, "{report:#?}");
        assert_eq!(report.mode, Some(BumpMode::InnerBump));
        let est = report.delta_f.unwrap();
        assert!(est.value < -3.0 * est.error);
        let delta = report.bump_radius.unwrap();
        let expected_asym = 2.0 * unit_ball_volume(3) * delta.powi(3);
        assert!((report.asymmetry.unwrap() - expected_asym).abs() < 1e-14);
        // the leading term predicts the energy drop within a factor
        let attempt = &report.attempts[0];
        assert!(
            (attempt.delta_f - attempt.leading_term).abs() < 0.25 * attempt.leading_term.abs(),
            "{attempt:?}"
        );
    }

    #[test]
    fn counterexample_inconclusive_at_large_gamma() {
        let report = find_counterexample(&p314(1.0), &[0.05], 1e-5).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.status, "inconclusive");
        assert!(report.mode.is_none());
        assert!(report.attempts.is_empty());
    }

    #[test]
    fn mass_report_round_trip() {
        let omega = unit_ball_volume(3);
        let (m_star, m_star_star) = mass_thresholds(d3(), 1.0, 4.0).unwrap();
        let r = mass_report(m_star, d3(), 1.0, 4.0).unwrap();
        assert_eq!(r.classification.verdict, Verdict::StableMinimum);
        assert!((r.gamma - 0.125).abs() < 1e-12);
        let r = mass_report(0.5 * m_star_star, d3(), 1.0, 4.0).unwrap();
        assert_eq!(r.classification.verdict, Verdict::StableMaximum);
        let r = mass_report(omega, d3(), 1.0, 4.0).unwrap();
        assert_eq!(r.classification.verdict, Verdict::StableMinimum);
        assert!((r.gamma - 1.0).abs() < 1e-13 && (r.energy_scale - 1.0).abs() < 1e-13);
        // Coulomb-quadratic boundary case: m = (d-2) ω_d / 2
        for d in [3u32, 5] {
            let dim = Dimension::new(d).unwrap();
            let m_ball = (f64::from(d) - 2.0) / 2.0 * unit_ball_volume(d);
            let r = mass_report(m_ball, dim, f64::from(d) - 2.0, 2.0).unwrap();
            assert_eq!(r.classification.verdict, Verdict::StableMinimum);
            assert!((r.mass - r.m_star).abs() < 1e-10 * r.m_star);
        }
    }
}
