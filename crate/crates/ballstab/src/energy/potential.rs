//! The potential of the unit ball and its radial derivative.
//!
//! ψ_σ(r) = ∫_{B₁} |r e₁ - y|^σ dy reduces to a 2-dimensional integral
//! over the radius s and the polar angle θ of y,
//!
//! ```text
//! ψ_σ(r) = (d-1) ω_{d-1} ∫₀¹ s^{d-1} ∫₀^π (r² + s² - 2 r s cos θ)^{σ/2} sin^{d-2}θ dθ ds,
//! ```
//!
//! with an integrable singularity at (s, θ) = (r, 0) when σ < 0. The
//! inner integral is tamed near the corner by the substitution θ = φ²
//! and both levels are integrated adaptively, so the returned error is
//! a genuine bound rather than a guess.

use super::{EnergyEstimate, Method};
use crate::error::{Error, Result};
use crate::quad::adaptive;
use crate::special::{unit_ball_volume, Dimension};
use crate::spectral::{mu_k, mu_limit, KernelExponent, ModelParams};

fn convergence_context(e: Error, what: &str) -> Error {
    match e {
        Error::Convergence { message, best, achieved } => Error::Convergence {
            message: format!("{what}: {message}"),
            best,
            achieved,
        },
        other => other,
    }
}

/// Single-kernel potential of the unit ball at distance r from the
/// center, for σ ∈ (-d, ∞).
pub fn psi_sigma(
    r: f64,
    sigma: impl Into<KernelExponent>,
    d: Dimension,
    tol: f64,
) -> Result<EnergyEstimate> {
    let sigma = sigma.into().sigma;
    let df = d.as_f64();
    if !(sigma > -df) {
        return Err(Error::Domain(format!(
            "psi_sigma needs sigma > -d = {}, got {sigma}",
            -df
        )));
    }
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let prefactor = (df - 1.0) * unit_ball_volume(d.get() - 1);
    // budgets: the inner tolerance pollutes the outer integrand pointwise
    let inner_tol = 0.04 * tol / prefactor;
    let outer_tol = 0.5 * tol / prefactor;
    let evals = std::cell::Cell::new(0u64);

    let inner = |s: f64| -> f64 {
        // ∫₀^π (r² + s² - 2 r s cos θ)^{σ/2} sin^{d-2}θ dθ.
        // An inner error δ enters the outer integrand as s^{d-1} δ, so
        // the budget here scales with s^{1-d}.
        let tol_here = 0.5 * inner_tol / s.powf(df - 1.0).max(1e-300);
        let dist_sq = |theta: f64| {
            let diff = r - s;
            diff * diff + 4.0 * r * s * (0.5 * theta).sin().powi(2)
        };
        let weight = |theta: f64| -> f64 {
            let w = dist_sq(theta).powf(0.5 * sigma);
            match d.get() {
                2 => w,
                3 => w * theta.sin(),
                _ => w * theta.sin().powf(df - 2.0),
            }
        };
        // θ = φ² on the first stretch absorbs the corner at θ = 0
        let split = 1.0_f64;
        let mut near = |phi: f64| {
            let theta = phi * phi;
            2.0 * phi * weight(theta)
        };
        let a = adaptive(&mut near, 0.0, split.sqrt(), tol_here)
            .map(|q| {
                evals.set(evals.get() + q.evals);
                q.value
            })
            .unwrap_or(f64::NAN);
        let mut far = |theta: f64| weight(theta);
        let b = adaptive(&mut far, split, std::f64::consts::PI, tol_here)
            .map(|q| {
                evals.set(evals.get() + q.evals);
                q.value
            })
            .unwrap_or(f64::NAN);
        a + b
    };

    let mut outer_fn = |s: f64| s.powf(df - 1.0) * inner(s);
    // split the outer integral where the singular corner sits
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    if r > 0.0 && r < 1.0 {
        pieces.push((0.0, r));
        pieces.push((r, 1.0));
    } else {
        pieces.push((0.0, 1.0));
    }
    let mut value = 0.0;
    let mut error = 0.0;
    for (a, b) in pieces {
        let q = adaptive(&mut outer_fn, a, b, outer_tol * (b - a))
            .map_err(|e| convergence_context(e, &format!("psi_sigma(r = {r}, sigma = {sigma})")))?;
        value += q.value;
        error += q.error;
        evals.set(evals.get() + q.evals);
    }
    if !value.is_finite() {
        return Err(Error::Convergence {
            message: format!("psi_sigma(r = {r}, sigma = {sigma}): inner quadrature failed"),
            best: f64::NAN,
            achieved: f64::INFINITY,
        });
    }
    Ok(EnergyEstimate {
        value: prefactor * value,
        error: prefactor * (error + inner_tol),
        method: Method::Quadrature,
        count: evals.get(),
        seed: None,
    })
}

/// Full potential ψ(r) = ψ_{-α}(r) + γ ψ_β(r) of the unit ball.
pub fn psi(r: f64, params: &ModelParams, tol: f64) -> Result<EnergyEstimate> {
    let rep = psi_sigma(r, params.repulsive(), params.d(), 0.5 * tol)?;
    let att = psi_sigma(r, params.attractive(), params.d(), 0.5 * tol / params.gamma())?;
    Ok(EnergyEstimate {
        value: rep.value + params.gamma() * att.value,
        error: rep.error + params.gamma() * att.error,
        method: Method::Quadrature,
        count: rep.count + att.count,
        seed: None,
    })
}

/// Sampled radial profile of the potential with per-point error bounds.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub params: ModelParams,
}

/// Evaluate ψ on a radius grid.
pub fn radial_profile(params: &ModelParams, radii: &[f64], tol: f64) -> Result<RadialProfile> {
    let mut values = Vec::with_capacity(radii.len());
    let mut errors = Vec::with_capacity(radii.len());
    for &r in radii {
        let e = psi(r, params, tol)?;
        values.push(e.value);
        errors.push(e.error);
    }
    Ok(RadialProfile { radii: radii.to_vec(), values, errors, params: *params })
}

/// Default scan grid: 64 log-spaced radii in (0.02, 1) and 64 in (1, 2.5].
pub fn default_scan_radii() -> Vec<f64> {
    let mut radii = Vec::with_capacity(128);
    let (lo, hi) = (0.02_f64.ln(), 1.0_f64.ln());
    for i in 0..64 {
        radii.push((lo + (hi - lo) * i as f64 / 64.0).exp());
    }
    let (lo, hi) = (1.0_f64.ln(), 2.5_f64.ln());
    for i in 1..=64 {
        radii.push((lo + (hi - lo) * i as f64 / 64.0).exp());
    }
    radii
}

/// Radial derivative of the single-kernel potential at r = 1 by central
/// differences with Richardson extrapolation.
///
/// ψ_σ is C¹ across the boundary but carries a one-sided singular term
/// |r - 1|^{σ+d} on top of the piecewise-smooth part, so the difference
/// quotient expands in the mixed exponent ladder {1, 2, 3, ...} ∪
/// {σ+d-1, σ+d, ...}. The extrapolation removes the ladder term by
/// term; with the step halving, exponent e drops out through division
/// by 2^e - 1.
pub fn psi_sigma_prime_at_one(
    sigma: impl Into<KernelExponent>,
    d: Dimension,
    tol: f64,
) -> Result<f64> {
    let sigma = sigma.into();
    let s = sigma.sigma + d.as_f64();
    let mut exponents: Vec<f64> = vec![1.0, 2.0, 3.0, 4.0, s - 1.0, s, s + 1.0];
    exponents.retain(|e| *e > 1e-9);
    exponents.sort_by(|a, b| a.partial_cmp(b).unwrap());
    exponents.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    exponents.truncate(5);
    let levels = exponents.len() + 1;
    let h0 = 0.1;
    let psi_tol = (tol * 1e-4).min(1e-11);
    let mut table = vec![vec![0.0_f64; levels]; levels];
    for j in 0..levels {
        let h = h0 / (1 << j) as f64;
        let plus = psi_sigma(1.0 + h, sigma, d, psi_tol)?.value;
        let minus = psi_sigma(1.0 - h, sigma, d, psi_tol)?.value;
        table[j][0] = (plus - minus) / (2.0 * h);
        for m in 1..=j {
            let f = 2.0_f64.powf(exponents[m - 1]);
            table[j][m] = (f * table[j][m - 1] - table[j - 1][m - 1]) / (f - 1.0);
        }
    }
    Ok(table[levels - 1][levels - 1])
}

/// ψ'(1) for the full potential.
///
/// The finite-difference value is cross-checked against the spectral
/// identity ψ'(1) = (1/2)[(μ₁(-α) - lim μ(-α)) + γ (μ₁(β) - lim μ(β))];
/// the two routes must agree to 1e-6 or the call reports a bug.
pub fn psi_prime_at_one(params: &ModelParams, tol: f64) -> Result<f64> {
    let d = params.d();
    let rep = psi_sigma_prime_at_one(params.repulsive(), d, tol)?;
    let att = psi_sigma_prime_at_one(params.attractive(), d, tol)?;
    let fd = rep + params.gamma() * att;
    let spectral = 0.5
        * ((mu_k(d, params.repulsive(), 1)? - mu_limit(d, params.repulsive())?)
            + params.gamma() * (mu_k(d, params.attractive(), 1)? - mu_limit(d, params.attractive())?));
    let scale = fd.abs().max(spectral.abs()).max(1.0);
    if (fd - spectral).abs() > 1e-6 * scale {
        return Err(Error::Computation(format!(
            "psi'(1) routes disagree: finite differences give {fd}, the spectral \
             identity gives {spectral}"
        )));
    }
    Ok(fd)
}

/// The coupling at which ψ'(1) changes sign. ψ'(1) is affine in γ with
/// positive slope, so the root is -A/B with A, B the per-kernel
/// derivative components.
pub fn psi_prime_root_in_gamma(d: Dimension, alpha: f64, beta: f64, tol: f64) -> Result<f64> {
    let a = psi_sigma_prime_at_one(-alpha, d, tol)?;
    let b = psi_sigma_prime_at_one(beta, d, tol)?;
    if !(b > 0.0) {
        return Err(Error::Computation(format!(
            "attractive derivative component must be positive, got {b}"
        )));
    }
    Ok(-a / b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn d3() -> Dimension {
        Dimension::new(3).unwrap()
    }

    /// Closed forms for d = 3: Newtonian interior/exterior and the
    /// quartic attraction polynomial.
    fn newtonian(r: f64) -> f64 {
        if r <= 1.0 {
            2.0 * PI * (1.0 - r * r / 3.0)
        } else {
            4.0 * PI / (3.0 * r)
        }
    }

    fn quartic(r: f64) -> f64 {
        4.0 * PI * (r.powi(4) / 3.0 + 2.0 * r * r / 3.0 + 1.0 / 7.0)
    }

    #[test]
    fn center_value_is_closed_form() {
        // ψ_σ(0) = d ω_d / (d + σ)
        for &sigma in &[-1.0, -0.5, 2.0, 4.0] {
            let e = psi_sigma(0.0, sigma, d3(), 1e-9).unwrap();
            let want = 4.0 * PI / (3.0 + sigma);
            assert!(
                (e.value - want).abs() < 1e-8,
                "sigma = {sigma}: {} vs {want}",
                e.value
            );
            assert!(e.error <= 1e-9);
        }
    }

    #[test]
    fn newtonian_profile() {
        for &r in &[0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.5] {
            let e = psi_sigma(r, -1.0, d3(), 1e-8).unwrap();
            assert!(
                (e.value - newtonian(r)).abs() < 1e-7,
                "r = {r}: {} vs {}",
                e.value,
                newtonian(r)
            );
        }
        // the specific interior value 11π/6 at r = 1/2
        let e = psi_sigma(0.5, -1.0, d3(), 1e-9).unwrap();
        assert_abs_diff_eq!(e.value, 11.0 * PI / 6.0, epsilon = 1e-8);
    }

    #[test]
    fn quartic_profile() {
        for &r in &[0.0, 0.5, 1.0, 2.0] {
            let e = psi_sigma(r, 4.0, d3(), 1e-8).unwrap();
            assert!(
                (e.value - quartic(r)).abs() < 1e-7 * quartic(r),
                "r = {r}: {} vs {}",
                e.value,
                quartic(r)
            );
        }
    }

    #[test]
    fn circle_potential_center() {
        let d2 = Dimension::new(2).unwrap();
        // ψ_σ(0) = 2π/(2+σ) in the plane
        let e = psi_sigma(0.0, -0.5, d2, 1e-9).unwrap();
        assert_abs_diff_eq!(e.value, 2.0 * PI / 1.5, epsilon = 1e-8);
        // quadratic kernel: ∫_{B₁}(r² + |y|²) dy = π r² + π/2 at any r
        let e = psi_sigma(1.3, 2.0, d2, 1e-9).unwrap();
        assert_abs_diff_eq!(e.value, PI * 1.3 * 1.3 + PI / 2.0, epsilon = 1e-8);
    }

    #[test]
    fn full_potential_and_far_field() {
        let params = ModelParams::new(d3(), 1.0, 4.0, 1.0 / 7.0).unwrap();
        let e = psi(1.0, &params, 1e-8).unwrap();
        let want = newtonian(1.0) + quartic(1.0) / 7.0;
        assert!((e.value - want).abs() < 1e-7);
        // far field is dominated by the attractive term: ψ ~ γ ω_d r^β
        let r = 10.0;
        let e = psi(r, &params, 1e-6).unwrap();
        let leading = params.gamma() * (4.0 * PI / 3.0) * r.powi(4);
        assert!((e.value - leading).abs() / leading < 0.05);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(psi_sigma(0.5, -3.0, d3(), 1e-8).is_err());
        assert!(psi_sigma(-0.5, -1.0, d3(), 1e-8).is_err());
        assert!(psi_sigma(0.5, -1.0, d3(), 0.0).is_err());
    }

    #[test]
    fn derivative_components_at_one() {
        // Newtonian component: d/dr [2π(1 - r²/3)] at 1 is -4π/3
        let rep = psi_sigma_prime_at_one(-1.0, d3(), 1e-7).unwrap();
        assert!((rep + 4.0 * PI / 3.0).abs() < 1e-6, "{rep}");
        // quartic component: 4π(4/3 + 4/3) = 32π/3
        let att = psi_sigma_prime_at_one(4.0, d3(), 1e-7).unwrap();
        assert!((att - 32.0 * PI / 3.0).abs() < 1e-5, "{att}");
    }

    #[test]
    fn derivative_consistency_and_root() {
        let params = ModelParams::new(d3(), 1.0, 4.0, 0.125 * 1.01).unwrap();
        let p = psi_prime_at_one(&params, 1e-7).unwrap();
        assert!(p > 0.0);
        let params = ModelParams::new(d3(), 1.0, 4.0, (1.0 / 24.0) * 0.99).unwrap();
        let p = psi_prime_at_one(&params, 1e-7).unwrap();
        assert!(p < 0.0);
        let root = psi_prime_root_in_gamma(d3(), 1.0, 4.0, 1e-7).unwrap();
        assert!((root - 0.125).abs() < 1e-6, "root {root}");
    }

    #[test]
    fn one_sided_quotients_agree_across_boundary() {
        let params = ModelParams::new(d3(), 1.0, 4.0, 1.0 / 7.0).unwrap();
        let h = 1e-4;
        let tol = 1e-10;
        let at = psi(1.0, &params, tol).unwrap().value;
        let plus = (psi(1.0 + h, &params, tol).unwrap().value - at) / h;
        let minus = (at - psi(1.0 - h, &params, tol).unwrap().value) / h;
        assert!((plus - minus).abs() < 1e-2, "one-sided: {plus} vs {minus}");
        // extrapolated one-sided quotients agree much more tightly
        let h2 = h / 2.0;
        let plus2 = (psi(1.0 + h2, &params, tol).unwrap().value - at) / h2;
        let minus2 = (at - psi(1.0 - h2, &params, tol).unwrap().value) / h2;
        let plus_x = 2.0 * plus2 - plus;
        let minus_x = 2.0 * minus2 - minus;
        assert!(
            (plus_x - minus_x).abs() < 1e-5,
            "extrapolated one-sided: {plus_x} vs {minus_x}"
        );
    }

    #[test]
    fn scan_radii_cover_both_sides() {
        let radii = default_scan_radii();
        assert_eq!(radii.len(), 128);
        assert!((radii[0] - 0.02).abs() < 1e-12);
        assert!(radii[63] < 1.0);
        assert!(radii[64] > 1.0);
        assert!((radii[127] - 2.5).abs() < 1e-12);
        assert!(radii.windows(2).all(|w| w[0] < w[1]));
    }
}
