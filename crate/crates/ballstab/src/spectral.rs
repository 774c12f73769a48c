//! Stability spectrum and thresholds of the unit ball.
//!
//! For a power-law kernel r^σ with σ > -(d-1), the boundary seminorm
//! ∫∫ |x-y|^σ |u(x)-u(y)|² over ∂B₁ × ∂B₁ acts diagonally on spherical
//! harmonics of degree k with eigenvalue μ_k(σ). The whole stability
//! analysis of the ball under the energy J_{-α} + γ J_β reduces to the
//! sequence k ↦ (μ_k(-α) - μ₁(-α)) / (μ₁(β) - μ_k(β)), whose infimum
//! and supremum over k ≥ 2 are the coupling thresholds γ₊₊ < γ₊ that
//! separate the definite regimes of the second-variation quadratic form.
//!
//! Everything here is closed-form; Gamma-function prefactors are kept in
//! log space until the final exponentiation so that large attraction
//! exponents stay inside f64 range.

use crate::error::{Error, Result};
use crate::harmonics::HarmonicCoefficients;
use crate::special::{lgamma, unit_ball_volume, Dimension};
use crate::{quad, special};
use serde::Serialize;
use std::f64::consts::LN_2;

/// A power-law kernel exponent σ, with its qualitative class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelExponent {
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    Repulsive,
    Neutral,
    Attractive,
}

impl KernelExponent {
    pub fn new(sigma: f64) -> Self {
        KernelExponent { sigma }
    }

    /// σ = -α for the singular repulsive part.
    pub fn repulsive(alpha: f64) -> Self {
        KernelExponent { sigma: -alpha }
    }

    /// σ = β for the growing attractive part.
    pub fn attractive(beta: f64) -> Self {
        KernelExponent { sigma: beta }
    }

    pub fn sign_class(&self) -> SignClass {
        if self.sigma < 0.0 {
            SignClass::Repulsive
        } else if self.sigma == 0.0 {
            SignClass::Neutral
        } else {
            SignClass::Attractive
        }
    }
}

impl From<f64> for KernelExponent {
    fn from(sigma: f64) -> Self {
        KernelExponent { sigma }
    }
}

fn validate_sigma(d: Dimension, sigma: f64) -> Result<()> {
    let bound = -(d.as_f64() - 1.0);
    if !(sigma > bound) {
        return Err(Error::Domain(format!(
            "kernel exponent sigma = {sigma} must exceed -(d-1) = {bound}; below that \
             the boundary seminorm eigenvalues take a different form (and the ball is \
             never stable), which this library does not cover"
        )));
    }
    Ok(())
}

/// Problem instance: dimension, repulsion exponent α ∈ (0, d-1),
/// attraction exponent β > 0, and coupling γ > 0 in J_{-α} + γ J_β.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    d: Dimension,
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl ModelParams {
    pub fn new(d: Dimension, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let df = d.as_f64();
        if !(alpha > 0.0 && alpha < df - 1.0) {
            return Err(Error::Domain(format!(
                "alpha = {alpha} must lie in (0, d-1) = (0, {}); for alpha >= d-1 the \
                 ball is never stable for the functional",
                df - 1.0
            )));
        }
        if !(beta > 0.0) {
            return Err(Error::Domain(format!("beta = {beta} must be positive")));
        }
        if !(gamma > 0.0) {
            return Err(Error::Domain(format!("gamma = {gamma} must be positive")));
        }
        Ok(ModelParams { d, alpha, beta, gamma })
    }

    /// Same instance specified by mass instead of coupling: the mass-m
    /// problem for J_{-α} + J_β rescales to the unit-volume problem with
    /// γ = (m/ω_d)^{(α+β)/d}.
    pub fn from_mass(d: Dimension, alpha: f64, beta: f64, mass: f64) -> Result<Self> {
        let (gamma, _) = mass_gamma_scaling(mass, d, alpha, beta)?;
        ModelParams::new(d, alpha, beta, gamma)
    }

    pub fn d(&self) -> Dimension {
        self.d
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Copy of this instance with a different coupling.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        ModelParams::new(self.d, self.alpha, self.beta, gamma)
    }

    pub fn repulsive(&self) -> KernelExponent {
        KernelExponent::repulsive(self.alpha)
    }
    pub fn attractive(&self) -> KernelExponent {
        KernelExponent::attractive(self.beta)
    }
}

/// ln of the eigenvalue prefactor
/// M(σ) = (d-1) ω_{d-1} 2^{d-1+σ} Γ((d-1+σ)/2) Γ((d-1)/2) / Γ((2d-2+σ)/2),
/// which is also the k → ∞ limit of μ_k(σ).
fn ln_mu_prefactor(d: Dimension, sigma: f64) -> f64 {
    let df = d.as_f64();
    let lower = unit_ball_volume(d.get() - 1);
    ((df - 1.0) * lower).ln()
        + (df - 1.0 + sigma) * LN_2
        + lgamma(0.5 * (df - 1.0 + sigma))
        + lgamma(0.5 * (df - 1.0))
        - lgamma(0.5 * (2.0 * df - 2.0 + sigma))
}

/// Running product ∏_{j=0}^{k-1} (j - σ/2) / (j + d - 1 + σ/2).
///
/// Every factor has magnitude < 1, so the value is evaluated term by
/// term in plain floating point; once it drops below 1e-30 the
/// remaining factors cannot bring it back and the loop stops early.
fn eigen_product(d: f64, sigma: f64, k: u64) -> f64 {
    let mut p = 1.0;
    for j in 0..k {
        let jf = j as f64;
        p *= (jf - 0.5 * sigma) / (jf + d - 1.0 + 0.5 * sigma);
        if p.abs() < 1e-30 {
            return p;
        }
    }
    p
}

/// Tail threshold past which μ_k is indistinguishable from its limit.
const PRODUCT_TAIL_CUTOFF: u64 = 100_000;

/// Eigenvalue μ_k(σ) of the boundary interaction seminorm on degree-k
/// spherical harmonics; μ₀ = 0.
pub fn mu_k(d: Dimension, sigma: impl Into<KernelExponent>, k: u64) -> Result<f64> {
    let sigma = sigma.into().sigma;
    validate_sigma(d, sigma)?;
    if k == 0 {
        return Ok(0.0);
    }
    let m = ln_mu_prefactor(d, sigma).exp();
    if k > PRODUCT_TAIL_CUTOFF {
        // beyond the cutoff the product is below resolvable size
        return Ok(m);
    }
    let p = eigen_product(d.as_f64(), sigma, k);
    Ok(m * (1.0 - p))
}

/// k → ∞ limit of μ_k(σ), i.e. the bare prefactor.
pub fn mu_limit(d: Dimension, sigma: impl Into<KernelExponent>) -> Result<f64> {
    let sigma = sigma.into().sigma;
    validate_sigma(d, sigma)?;
    Ok(ln_mu_prefactor(d, sigma).exp())
}

/// Independent quadrature route to μ_k(σ) for d ∈ {2, 3}.
///
/// Writes μ_k = 2 S_σ - 2 λ_k, where S_σ is the single-layer constant
/// ∫_{∂B₁} |x-y|^σ dH_y and λ_k the zonal convolution eigenvalue of the
/// kernel on degree-k harmonics. Both are one-dimensional integrals in
/// the polar angle; after t = cos θ the endpoint singularity of the
/// kernel |x-y|^σ = (2 sin(θ/2))^σ sits at θ = 0 and is tamed by the
/// substitution θ = φ² on the first panel.
pub fn mu_k_funk_hecke(
    d: Dimension,
    sigma: impl Into<KernelExponent>,
    k: u64,
    tol: f64,
) -> Result<f64> {
    let sigma = sigma.into().sigma;
    validate_sigma(d, sigma)?;
    if d.get() != 2 && d.get() != 3 {
        return Err(Error::Unsupported(format!(
            "quadrature route for mu_k supports d in {{2, 3}}, got d = {d}"
        )));
    }
    if k > 50 {
        return Err(Error::Domain(format!(
            "quadrature route for mu_k supports k <= 50, got k = {k}"
        )));
    }
    if k == 0 {
        return Ok(0.0);
    }
    let df = d.as_f64();
    let lambda = 0.5 * (df - 2.0);
    let area = (df - 1.0) * unit_ball_volume(d.get() - 1);
    // weight of the polar-angle measure: (2 sin(θ/2))^σ sin^{d-2} θ
    let weight = move |theta: f64| -> f64 {
        let kern = (2.0 * (0.5 * theta).sin()).powf(sigma);
        if d.get() == 3 {
            kern * theta.sin()
        } else {
            kern
        }
    };
    let budget = tol / (8.0 * area);
    // θ = φ^p on [0, 1/2] turns the θ^{σ+d-2} endpoint behavior into a
    // C¹ integrand: the transformed exponent p(σ+d-1) - 1 is at least 1
    let power = (2.0 / (sigma + df - 1.0)).max(2.0);
    let integrate = |f: &dyn Fn(f64) -> f64| -> Result<quad::QuadResult> {
        let split = 0.5_f64;
        let mut g = |phi: f64| {
            let theta = phi.powf(power);
            if theta == 0.0 {
                0.0
            } else {
                power * phi.powf(power - 1.0) * f(theta)
            }
        };
        let near = quad::adaptive(&mut g, 0.0, split.powf(1.0 / power), budget)?;
        let mut h = |theta: f64| f(theta);
        let far = quad::adaptive(&mut h, split, std::f64::consts::PI, budget)?;
        Ok(quad::QuadResult {
            value: near.value + far.value,
            error: near.error + far.error,
            evals: near.evals + far.evals,
        })
    };
    let s_fn = |theta: f64| weight(theta);
    let lam_fn = |theta: f64| weight(theta) * special::gegenbauer_eval(k as usize, lambda, theta.cos());
    let s = integrate(&s_fn)?;
    let lam = integrate(&lam_fn)?;
    let value = 2.0 * area * (s.value - lam.value);
    let achieved = 2.0 * area * (s.error + lam.error);
    if achieved > tol {
        return Err(Error::Convergence {
            message: format!("funk-hecke quadrature for mu_{k}(sigma = {sigma}, d = {d})"),
            best: value,
            achieved,
        });
    }
    Ok(value)
}

/// ln of the unit-ball self-energy J_σ(B₁) = ∫∫_{B₁×B₁} |x-y|^σ.
pub(crate) fn ln_j_ball(d: Dimension, sigma: f64) -> f64 {
    let df = d.as_f64();
    let omega = unit_ball_volume(d.get());
    let lower = unit_ball_volume(d.get() - 1);
    let rational =
        df * (df - 1.0) * (df - 1.0 + sigma) * omega * lower
            / ((df + sigma) * (2.0 * df + sigma) * (2.0 * df - 2.0 + sigma));
    (df + sigma) * LN_2 + rational.ln() + lgamma(0.5 * (df - 1.0 + sigma))
        + lgamma(0.5 * (df - 1.0))
        - lgamma(0.5 * (2.0 * df - 2.0 + sigma))
}

/// Self-energy of the unit ball, J_σ(B₁).
///
/// Evaluated from the explicit Gamma expression and cross-checked
/// against d ω_d μ₁(σ) / ((d+σ)(2d+σ)); the two routes must agree to
/// 1e-12 relative or the call reports a formula bug.
pub fn j_ball(d: Dimension, sigma: impl Into<KernelExponent>) -> Result<f64> {
    let sigma = sigma.into().sigma;
    validate_sigma(d, sigma)?;
    let gamma_form = ln_j_ball(d, sigma).exp();
    let df = d.as_f64();
    let via_mu = df * unit_ball_volume(d.get()) * mu_k(d, sigma, 1)?
        / ((df + sigma) * (2.0 * df + sigma));
    if (gamma_form - via_mu).abs() > 1e-12 * gamma_form.abs() {
        return Err(Error::Computation(format!(
            "j_ball routes disagree at d = {d}, sigma = {sigma}: {gamma_form} vs {via_mu}"
        )));
    }
    Ok(gamma_form)
}

/// Second-variation curvature constant c²_σ of the unit ball,
/// (d+σ)(2d+σ) J_σ(B₁) / (d ω_d). Identical to μ₁(σ).
pub fn c_squared(d: Dimension, sigma: impl Into<KernelExponent>) -> Result<f64> {
    let sigma = sigma.into().sigma;
    validate_sigma(d, sigma)?;
    let df = d.as_f64();
    let value = (df + sigma) * (2.0 * df + sigma) * ln_j_ball(d, sigma).exp()
        / (df * unit_ball_volume(d.get()));
    let mu1 = mu_k(d, sigma, 1)?;
    if (value - mu1).abs() > 1e-12 * mu1.abs() {
        return Err(Error::Computation(format!(
            "c_squared disagrees with mu_1 at d = {d}, sigma = {sigma}: {value} vs {mu1}"
        )));
    }
    Ok(value)
}

/// The stability ratio (μ_k(-α) - μ₁(-α)) / (μ₁(β) - μ_k(β)) for k ≥ 2.
pub fn ratio_k(params: &ModelParams, k: u64) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("ratio_k needs k >= 2, got {k}")));
    }
    let d = params.d;
    let num = mu_k(d, params.repulsive(), k)? - mu_k(d, params.repulsive(), 1)?;
    let den = mu_k(d, params.attractive(), 1)? - mu_k(d, params.attractive(), k)?;
    Ok(num / den)
}

/// The normalized ratio factor X_k, as the direct quotient of the two
/// degree products; X_k → 1 as k → ∞.
pub fn x_k(params: &ModelParams, k: u64) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("x_k needs k >= 2, got {k}")));
    }
    let d = params.d.as_f64();
    let (mut pn, mut pd) = (1.0_f64, 1.0_f64);
    for j in 1..k.min(PRODUCT_TAIL_CUTOFF) {
        let jf = j as f64;
        pn *= (jf + 0.5 * params.alpha) / (jf + 0.5 * (2.0 * d - 2.0 - params.alpha));
        pd *= (jf - 0.5 * params.beta) / (jf + 0.5 * (2.0 * d - 2.0 + params.beta));
        if pn.abs() < 1e-30 && pd.abs() < 1e-30 {
            break;
        }
    }
    Ok((1.0 - pn) / (1.0 - pd))
}

/// ln of the limit ratio κ(d, α, β), from its Gamma form.
fn ln_kappa_gamma_form(d: Dimension, alpha: f64, beta: f64) -> f64 {
    let df = d.as_f64();
    -(alpha + beta) * LN_2
        + (alpha * (2.0 * df - 2.0 + beta) / (beta * (2.0 * df - 2.0 - alpha))).ln()
        + lgamma(0.5 * (df - 1.0 - alpha))
        + lgamma(0.5 * (2.0 * df - 2.0 + beta))
        - lgamma(0.5 * (df - 1.0 + beta))
        - lgamma(0.5 * (2.0 * df - 2.0 - alpha))
}

/// Limit of the stability ratio as k → ∞.
///
/// Both the Gamma form and the ball-energy form are evaluated and must
/// agree to 1e-11 relative; disagreement signals a formula bug.
pub fn kappa(params: &ModelParams) -> Result<f64> {
    let d = params.d;
    let df = d.as_f64();
    let (alpha, beta) = (params.alpha, params.beta);
    let gamma_form = ln_kappa_gamma_form(d, alpha, beta).exp();
    let j_ratio = (ln_j_ball(d, -alpha) - ln_j_ball(d, beta)).exp();
    let j_form = alpha * (df - alpha) * (2.0 * df - alpha) * (df - 1.0 + beta)
        / (beta * (df + beta) * (2.0 * df + beta) * (df - 1.0 - alpha))
        * j_ratio;
    if (gamma_form - j_form).abs() > 1e-11 * gamma_form.abs() {
        return Err(Error::Computation(format!(
            "kappa routes disagree at (d, alpha, beta) = ({d}, {alpha}, {beta}): \
             {gamma_form} vs {j_form}"
        )));
    }
    Ok(gamma_form)
}

/// Critical attraction exponent β₊(d, α) = (6d + 2 + α(d-1)) / (d-1-α)
/// separating where the ratio supremum is attained.
pub fn beta_star(d: Dimension, alpha: f64) -> Result<f64> {
    let df = d.as_f64();
    if !(alpha > 0.0 && alpha < df - 1.0) {
        return Err(Error::Domain(format!(
            "beta_star needs alpha in (0, d-1) = (0, {}), got {alpha}",
            df - 1.0
        )));
    }
    Ok((6.0 * df + 2.0 + alpha * (df - 1.0)) / (df - 1.0 - alpha))
}

/// Upper stability threshold γ₊: the ball is stable for the energy iff
/// γ ≥ γ₊. Supremum of the ratio sequence, with the closed form chosen
/// by the regime β ≷ β₊ and cross-checked against κ (or κ X₃).
pub fn gamma_star(params: &ModelParams) -> Result<f64> {
    let d = params.d;
    let df = d.as_f64();
    let (alpha, beta) = (params.alpha, params.beta);
    let bs = beta_star(d, alpha)?;
    let j_ratio = (ln_j_ball(d, -alpha) - ln_j_ball(d, beta)).exp();
    let (value, cross) = if beta >= bs {
        let v = alpha * (df - alpha) * (2.0 * df + 2.0 + beta)
            / (beta * (df + beta) * (2.0 * df + 2.0 - alpha))
            * j_ratio;
        (v, kappa(params)? * x_k(params, 3)?)
    } else {
        let v = alpha * (df - alpha) * (2.0 * df - alpha) * (df - 1.0 + beta)
            / (beta * (df + beta) * (2.0 * df + beta) * (df - 1.0 - alpha))
            * j_ratio;
        (v, kappa(params)?)
    };
    if (value - cross).abs() > 1e-10 * value.abs() {
        return Err(Error::Computation(format!(
            "gamma_star routes disagree at (d, alpha, beta) = ({d}, {alpha}, {beta}): \
             {value} vs {cross}"
        )));
    }
    Ok(value)
}

/// Lower stability threshold γ₊₊: the ball is stable for the negated
/// energy iff γ ≤ γ₊₊. Infimum of the ratio sequence, attained at k = 2.
pub fn gamma_star_star(params: &ModelParams) -> Result<f64> {
    let d = params.d;
    let df = d.as_f64();
    let (alpha, beta) = (params.alpha, params.beta);
    let j_ratio = (ln_j_ball(d, -alpha) - ln_j_ball(d, beta)).exp();
    let value = alpha * (df - alpha) / (beta * (df + beta)) * j_ratio;
    let cross = ratio_k(params, 2)?;
    if (value - cross).abs() > 1e-10 * value.abs() {
        return Err(Error::Computation(format!(
            "gamma_star_star routes disagree at (d, alpha, beta) = ({d}, {alpha}, {beta}): \
             {value} vs {cross}"
        )));
    }
    Ok(value)
}

/// Where the brute-force supremum of the ratio sequence was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupLocation {
    /// At a finite degree.
    Degree(u64),
    /// Only in the k → ∞ limit (value κ).
    Limit,
}

impl std::fmt::Display for SupLocation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SupLocation::Degree(k) => write!(f, "{k}"),
            SupLocation::Limit => write!(f, "limit"),
        }
    }
}

/// Extrema of the ratio sequence scanned over 2 ≤ k ≤ k_max, with the
/// limit value κ considered as an explicit supremum candidate (for
/// β < β₊ the supremum is not attained at finite k).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioExtrema {
    pub sup: f64,
    pub inf: f64,
    pub argmax: SupLocation,
    pub argmin: u64,
}

/// Brute-force scan of the ratio sequence. Runs in O(k_max) by keeping
/// the two degree products incrementally.
pub fn thresholds_bruteforce(params: &ModelParams, k_max: u64) -> Result<RatioExtrema> {
    if k_max < 3 {
        return Err(Error::Domain(format!(
            "brute-force scan needs k_max >= 3, got {k_max}"
        )));
    }
    let d = params.d;
    let df = d.as_f64();
    let (alpha, beta) = (params.alpha, params.beta);
    let m_rep = mu_limit(d, -alpha)?;
    let m_att = mu_limit(d, beta)?;
    // running products for μ_k, starting at k = 1
    let mut p_rep = eigen_product(df, -alpha, 1);
    let mut p_att = eigen_product(df, beta, 1);
    let mu1_rep = m_rep * (1.0 - p_rep);
    let mu1_att = m_att * (1.0 - p_att);
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    let mut argmax = 0u64;
    let mut argmin = 0u64;
    for k in 2..=k_max {
        let jf = (k - 1) as f64;
        p_rep *= (jf + 0.5 * alpha) / (jf + df - 1.0 - 0.5 * alpha);
        p_att *= (jf - 0.5 * beta) / (jf + df - 1.0 + 0.5 * beta);
        let mu_rep = m_rep * (1.0 - p_rep);
        let mu_att = m_att * (1.0 - p_att);
        let ratio = (mu_rep - mu1_rep) / (mu1_att - mu_att);
        if ratio > sup {
            sup = ratio;
            argmax = k;
        }
        if ratio < inf {
            inf = ratio;
            argmin = k;
        }
    }
    let limit = kappa(params)?;
    let (sup, argmax) = if limit > sup * (1.0 + 1e-12) {
        (limit, SupLocation::Limit)
    } else {
        (sup, SupLocation::Degree(argmax))
    };
    Ok(RatioExtrema { sup, inf, argmax, argmin })
}

/// Mass thresholds (m₊, m₊₊) = ω_d (γ₊, γ₊₊)^{d/(α+β)} for the
/// unnormalized problem at coupling 1.
pub fn mass_thresholds(d: Dimension, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    let params = ModelParams::new(d, alpha, beta, 1.0)?;
    let omega = unit_ball_volume(d.get());
    let expo = d.as_f64() / (alpha + beta);
    Ok((
        omega * gamma_star(&params)?.powf(expo),
        omega * gamma_star_star(&params)?.powf(expo),
    ))
}

/// Mass ↔ coupling scaling: a set of volume m for the coupling-1 energy
/// rescales to unit volume with γ = (m/ω_d)^{(α+β)/d}, and the energies
/// differ by the factor (m/ω_d)^{2-α/d}.
pub fn mass_gamma_scaling(m: f64, d: Dimension, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if !(m > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    if !(alpha > 0.0 && alpha < d.as_f64() - 1.0) || !(beta > 0.0) {
        return Err(Error::Domain(format!(
            "invalid exponents (alpha, beta) = ({alpha}, {beta}) for d = {d}"
        )));
    }
    let ratio = m / unit_ball_volume(d.get());
    let gamma = ratio.powf((alpha + beta) / d.as_f64());
    let scale = ratio.powf(2.0 - alpha / d.as_f64());
    Ok((gamma, scale))
}

/// Second-variation quadratic form of the energy at the unit ball,
/// evaluated on a finite harmonic expansion:
/// Σ_k Σ_i [(μ₁(-α) - μ_k(-α)) + γ (μ₁(β) - μ_k(β))] (a_k^i)².
pub fn quad_form(params: &ModelParams, coeffs: &HarmonicCoefficients) -> Result<f64> {
    let d = params.d;
    let mu1_rep = mu_k(d, params.repulsive(), 1)?;
    let mu1_att = mu_k(d, params.attractive(), 1)?;
    let mut acc = 0.0;
    for k in 0..=coeffs.degree_max() {
        let s: f64 = coeffs.degree_slice(k).iter().map(|a| a * a).sum();
        if s == 0.0 {
            continue;
        }
        let bracket = (mu1_rep - mu_k(d, params.repulsive(), k as u64)?)
            + params.gamma * (mu1_att - mu_k(d, params.attractive(), k as u64)?);
        acc += bracket * s;
    }
    Ok(acc)
}

/// Regime of the attraction exponent relative to β₊.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    BetaBelowStar,
    BetaAtOrAboveStar,
}

/// All closed-form thresholds of an instance in one bundle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thresholds {
    pub beta_star: f64,
    pub kappa: f64,
    pub gamma_star: f64,
    pub gamma_star_star: f64,
    pub m_star: f64,
    pub m_star_star: f64,
    pub regime: Regime,
}

/// Assemble every threshold for (d, α, β); γ plays no role here.
pub fn compute_thresholds(d: Dimension, alpha: f64, beta: f64) -> Result<Thresholds> {
    let params = ModelParams::new(d, alpha, beta, 1.0)?;
    let bs = beta_star(d, alpha)?;
    let gs = gamma_star(&params)?;
    let gss = gamma_star_star(&params)?;
    if !(gss > 0.0 && gss < gs && gs.is_finite()) {
        return Err(Error::Computation(format!(
            "threshold ordering 0 < gamma_star_star < gamma_star failed: {gss} vs {gs}"
        )));
    }
    let (m_star, m_star_star) = mass_thresholds(d, alpha, beta)?;
    Ok(Thresholds {
        beta_star: bs,
        kappa: kappa(&params)?,
        gamma_star: gs,
        gamma_star_star: gss,
        m_star,
        m_star_star,
        regime: if beta < bs {
            Regime::BetaBelowStar
        } else {
            Regime::BetaAtOrAboveStar
        },
    })
}

/// Definiteness class of the second variation at the given coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// γ ≥ γ₊ (boundary inclusive): nonnegative form, stable minimum.
    StableMinimum,
    /// γ₊₊ < γ < γ₊: the form takes both signs.
    Indefinite,
    /// γ ≤ γ₊₊ (boundary inclusive): nonpositive form, stable maximum.
    StableMaximum,
}

/// Stability classification with the distance to the nearest threshold.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StabilityClass {
    pub verdict: Verdict,
    pub margin: f64,
}

/// Boundary couplings count as stable. The comparison carries a 1e-12
/// relative slack, matching the rounding of the closed-form thresholds.
pub fn classify_stability(params: &ModelParams) -> Result<StabilityClass> {
    let gs = gamma_star(params)?;
    let gss = gamma_star_star(params)?;
    let g = params.gamma;
    let verdict = if g >= gs * (1.0 - 1e-12) {
        Verdict::StableMinimum
    } else if g <= gss * (1.0 + 1e-12) {
        Verdict::StableMaximum
    } else {
        Verdict::Indefinite
    };
    Ok(StabilityClass {
        verdict,
        margin: (g - gs).abs().min((g - gss).abs()),
    })
}

/// Spectral gap μ₂(-α) - μ₁(-α) = α μ₁(-α) / (2d - α), the constant in
/// the coercivity bound of the quadratic form above the threshold.
pub fn quad_bound_constant(d: Dimension, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < d.as_f64() - 1.0) {
        return Err(Error::Domain(format!(
            "quad_bound_constant needs alpha in (0, d-1), got {alpha}"
        )));
    }
    Ok(alpha * mu_k(d, -alpha, 1)? / (2.0 * d.as_f64() - alpha))
}

/// One row of the stability spectrum table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralRow {
    pub k: u64,
    pub mu_rep: f64,
    pub mu_att: f64,
    pub ratio: Option<f64>,
    pub x_k: Option<f64>,
}

/// The spectrum table for 0 ≤ k ≤ k_max (ratio and X_k blank for k < 2),
/// computed incrementally.
pub fn spectral_rows(params: &ModelParams, k_max: u64) -> Result<Vec<SpectralRow>> {
    let d = params.d;
    let df = d.as_f64();
    let (alpha, beta) = (params.alpha, params.beta);
    let m_rep = mu_limit(d, -alpha)?;
    let m_att = mu_limit(d, beta)?;
    let mut rows = Vec::with_capacity((k_max + 1) as usize);
    rows.push(SpectralRow { k: 0, mu_rep: 0.0, mu_att: 0.0, ratio: None, x_k: None });
    let mut p_rep = eigen_product(df, -alpha, 1);
    let mut p_att = eigen_product(df, beta, 1);
    let (mu1_rep, mu1_att) = (m_rep * (1.0 - p_rep), m_att * (1.0 - p_att));
    if k_max >= 1 {
        rows.push(SpectralRow { k: 1, mu_rep: mu1_rep, mu_att: mu1_att, ratio: None, x_k: None });
    }
    let (mut xn, mut xd) = (1.0_f64, 1.0_f64);
    for k in 2..=k_max {
        let jf = (k - 1) as f64;
        p_rep *= (jf + 0.5 * alpha) / (jf + df - 1.0 - 0.5 * alpha);
        p_att *= (jf - 0.5 * beta) / (jf + df - 1.0 + 0.5 * beta);
        xn *= (jf + 0.5 * alpha) / (jf + df - 1.0 - 0.5 * alpha);
        xd *= (jf - 0.5 * beta) / (jf + df - 1.0 + 0.5 * beta);
        let mu_rep = m_rep * (1.0 - p_rep);
        let mu_att = m_att * (1.0 - p_att);
        rows.push(SpectralRow {
            k,
            mu_rep,
            mu_att,
            ratio: Some((mu_rep - mu1_rep) / (mu1_att - mu_att)),
            x_k: Some((1.0 - xn) / (1.0 - xd)),
        });
    }
    Ok(rows)
}
