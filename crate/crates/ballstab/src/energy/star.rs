//! Exact energy differences for star-shaped perturbations of the ball.
//!
//! For a set E with boundary {(1 + w(x)) x : x ∈ ∂B₁} the single-kernel
//! energy difference splits exactly, with no expansion in the amplitude:
//!
//! ```text
//! J_σ(E) - J_σ(B₁) = (J_σ(B₁) / (d ω_d)) (h_σ - d ω_d) - (1/2) G_σ,
//! h_σ = ∫ (1 + w)^{2d+σ} dH,
//! G_σ = ∫∫ dH_x dH_y ∫∫_{[w(y), w(x)]²} F_σ(1+p, 1+q, |x-y|) dp dq,
//! F_σ(r, ρ, c) = r^{d-1} ρ^{d-1} (|r-ρ|² + r ρ c²)^{σ/2}.
//! ```
//!
//! h_σ is a smooth surface integral and lands on the product grid at
//! spectral accuracy. G_σ is a double surface integral whose kernel is
//! singular on the diagonal; around each outer node it is evaluated in
//! a rotated frame with geometrically graded panels in the polar angle,
//! a trapezoid rule in azimuth, and a fixed Gauss product rule over the
//! small (p, q) square. A geodesic cap below the last panel is excluded
//! and its analytically bounded contribution is added to the error.

use super::{EnergyEstimate, Method};
use crate::error::{Error, Result};
use crate::harmonics::{synthesize, HarmonicCoefficients, SphereGrid};
use crate::quad::gauss_legendre;
use crate::special::unit_ball_volume;
use crate::spectral::{j_ball, ModelParams};

/// How the raw perturbation is adjusted before it defines a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    /// Use t·u as is.
    Raw,
    /// Shift by a constant so the enclosed volume equals ω_d exactly.
    VolumeCorrected,
    /// Volume correction, degree-1 projection removed, volume
    /// re-corrected once.
    VolumeAndBarycenterCorrected,
}

/// A boundary perturbation profile u together with its constraint
/// handling; the amplitude t is supplied per evaluation.
#[derive(Debug, Clone)]
pub struct StarPerturbation {
    coeffs: HarmonicCoefficients,
    constraint: ConstraintMode,
}

impl StarPerturbation {
    pub fn new(coeffs: HarmonicCoefficients, constraint: ConstraintMode) -> Self {
        StarPerturbation { coeffs, constraint }
    }

    pub fn coeffs(&self) -> &HarmonicCoefficients {
        &self.coeffs
    }

    pub fn constraint(&self) -> ConstraintMode {
        self.constraint
    }

    /// The boundary offset w with ∂E = {(1 + w(x)) x}: t·u plus the
    /// requested corrections, as a harmonic expansion. Rejects profiles
    /// outside the star-shaped working range sup |w| < 1/2.
    pub fn profile(&self, t: f64, grid: &SphereGrid) -> Result<HarmonicCoefficients> {
        let mut w = scale_coeffs(&self.coeffs, t);
        match self.constraint {
            ConstraintMode::Raw => {}
            ConstraintMode::VolumeCorrected => {
                volume_correct(&mut w, grid)?;
            }
            ConstraintMode::VolumeAndBarycenterCorrected => {
                volume_correct(&mut w, grid)?;
                w.clear_degree_one();
                volume_correct(&mut w, grid)?;
            }
        }
        let vals = synthesize(&w, grid);
        let sup = vals.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if sup >= 0.5 {
            return Err(Error::Domain(format!(
                "perturbation leaves the working range: sup |offset| = {sup} >= 1/2 \
                 (the boundary graph must stay star-shaped with margin)"
            )));
        }
        Ok(w)
    }
}

fn scale_coeffs(coeffs: &HarmonicCoefficients, t: f64) -> HarmonicCoefficients {
    let mut out = HarmonicCoefficients::zeros(coeffs.d(), coeffs.degree_max());
    for k in 0..=coeffs.degree_max() {
        for (i, a) in coeffs.degree_slice(k).iter().enumerate() {
            out.set(k, i + 1, t * a).unwrap();
        }
    }
    out
}

/// Newton solve for the constant shift making the grid volume of the
/// star-shaped set equal to the ball volume exactly.
fn volume_correct(w: &mut HarmonicCoefficients, grid: &SphereGrid) -> Result<()> {
    let d = grid.d().as_f64() as i32;
    let vals = synthesize(w, grid);
    let target: f64 = grid.weights().iter().sum();
    let mut c = 0.0_f64;
    let mut converged = false;
    for _ in 0..60 {
        let mut g = 0.0;
        let mut dg = 0.0;
        for (v, wt) in vals.values.iter().zip(grid.weights()) {
            let base = 1.0 + v + c;
            g += wt * (base.powi(d) - 1.0);
            dg += wt * f64::from(d) * base.powi(d - 1);
        }
        c -= g / dg;
        if g.abs() <= 1e-13 * target {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            message: "volume correction Newton iteration".into(),
            best: c,
            achieved: f64::NAN,
        });
    }
    // a constant shift c is c·sqrt(d ω_d) in the constant mode
    let area = grid.d().as_f64() * unit_ball_volume(grid.d().get());
    w.shift_constant(c * area.sqrt());
    Ok(())
}

/// Surface integral h_σ = ∫ (1 + w)^{2d+σ} dH for the boundary offset
/// defined by the perturbation at amplitude t.
pub fn h_sigma(pert: &StarPerturbation, t: f64, sigma: f64, grid: &SphereGrid) -> Result<f64> {
    let w = pert.profile(t, grid)?;
    Ok(h_sigma_profile(&w, sigma, grid))
}

fn h_sigma_profile(w: &HarmonicCoefficients, sigma: f64, grid: &SphereGrid) -> f64 {
    let expo = 2.0 * grid.d().as_f64() + sigma;
    let vals = synthesize(w, grid);
    vals.values
        .iter()
        .zip(grid.weights())
        .map(|(v, wt)| wt * (1.0 + v).powf(expo))
        .sum()
}

/// Which inner rule the pair quadrature applies on the (p, q) square.
enum InnerRule<'a> {
    /// ∫∫ F_σ(1+p, 1+q, c) dp dq over [w(y), w(x)]² — the exact term.
    StarSquare(&'a HarmonicCoefficients),
    /// (u(x) - u(y))² c^σ — the t → 0 limit, i.e. the kernel seminorm.
    SeminormLimit(&'a HarmonicCoefficients),
}

struct PairResult {
    values: Vec<f64>,
    errors: Vec<f64>,
    evals: u64,
}

/// Double surface integral of the inner rule, one value per kernel
/// exponent. `budgets` are absolute error targets per exponent.
fn pair_integral(
    rule: &InnerRule<'_>,
    grid: &SphereGrid,
    sigmas: &[f64],
    budgets: &[f64],
) -> Result<PairResult> {
    let field = match rule {
        InnerRule::StarSquare(w) => *w,
        InnerRule::SeminormLimit(u) => *u,
    };
    let d = grid.d();
    let vals = synthesize(field, grid);
    let (min, max) = vals
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let osc = max - min;
    let nsig = sigmas.len();
    if osc == 0.0 {
        return Ok(PairResult { values: vec![0.0; nsig], errors: vec![0.0; nsig], evals: 0 });
    }
    let df = d.as_f64();
    let surface = df * unit_ball_volume(d.get());
    let ring = if d.get() == 3 { 2.0 * std::f64::consts::PI } else { 2.0 };
    // The field is band-limited, so |w(x) - w(y)| ≤ L θ with L measured
    // on the grid (safety factor applied). The excluded cap around each
    // node is then bounded by ∫_{θ<θ_min} θ^σ (Lθ)² θ^{d-2} ring dθ.
    let lip = 4.0 * grid_lipschitz(grid, &vals.values) + 1e-9 * osc;
    let cap_bound = |sigma: f64, theta_min: f64| -> f64 {
        let p = df + 1.0 + sigma;
        20.0 * surface * ring * lip * lip * theta_min.powf(p) / p
    };
    let mut theta_min = 0.05_f64;
    for (sigma, budget) in sigmas.iter().zip(budgets) {
        let p = df + 1.0 + sigma;
        let target = 0.05 * budget;
        let tm = (target * p / (20.0 * surface * ring * lip * lip)).powf(1.0 / p);
        theta_min = theta_min.min(tm);
    }
    theta_min = theta_min.clamp(1e-12, 0.05);
    // uniform panels of width π/8 down to π/8, geometric grading below
    let mut panels: Vec<(f64, f64)> = Vec::new();
    let width = std::f64::consts::PI / 8.0;
    for j in 1..8 {
        panels.push((j as f64 * width, (j + 1) as f64 * width));
    }
    let mut hi = width;
    while hi > 2.0 * theta_min {
        panels.push((hi / 2.0, hi));
        hi /= 2.0;
    }
    panels.push((theta_min, hi));

    let (gl_lo_n, gl_lo_w) = gauss_legendre(6);
    let (gl_hi_n, gl_hi_w) = gauss_legendre(12);
    let (sq_n, sq_w) = gauss_legendre(6);

    let mut values = vec![0.0_f64; nsig];
    let mut errors = vec![0.0_f64; nsig];
    let mut evals: u64 = 0;

    let mut out = vec![0.0_f64; nsig];
    let inner = |a: f64, b: f64, c: f64, out: &mut [f64]| match rule {
        InnerRule::StarSquare(_) => {
            square_rule(a, b, c, d.get(), sigmas, &sq_n, &sq_w, out);
        }
        InnerRule::SeminormLimit(_) => {
            let diff = (a - b) * (a - b);
            for (o, sigma) in out.iter_mut().zip(sigmas) {
                *o = diff * c.powf(*sigma);
            }
        }
    };

    match d.get() {
        3 => {
            let m = 2 * grid.resolution();
            let zonal = field.is_zonal();
            let degree = field.degree_max();
            let n_phi = (4 * degree + 8).max(24);
            let mut phi_acc = vec![0.0_f64; nsig];
            let outer: Vec<(usize, f64)> = if zonal {
                (0..grid.resolution())
                    .map(|ring| (ring * m, grid.weights()[ring * m] * m as f64))
                    .collect()
            } else {
                (0..grid.len()).map(|i| (i, grid.weights()[i])).collect()
            };
            let mut tmp = vec![0.0_f64; nsig];
            let mut acc_hi = vec![0.0_f64; nsig];
            let mut acc_lo = vec![0.0_f64; nsig];
            for (idx, wx) in outer {
                let x = grid.nodes()[idx];
                let a = vals.values[idx];
                let (e1, e2) = orthonormal_frame(&x);
                // θ-line integrand: azimuth average of the inner factor
                // times the polar measure sin θ
                let mut theta_line = |theta: f64, acc: &mut [f64]| {
                    let (st, ct) = theta.sin_cos();
                    let c = 2.0 * (0.5 * theta).sin();
                    for p in phi_acc.iter_mut() {
                        *p = 0.0;
                    }
                    for jp in 0..n_phi {
                        let phi = 2.0 * std::f64::consts::PI * jp as f64 / n_phi as f64;
                        let (sp, cp) = phi.sin_cos();
                        let y = [
                            ct * x[0] + st * (cp * e1[0] + sp * e2[0]),
                            ct * x[1] + st * (cp * e1[1] + sp * e2[1]),
                            ct * x[2] + st * (cp * e1[2] + sp * e2[2]),
                        ];
                        let b = field.eval(&y);
                        inner(a, b, c, &mut out);
                        for (p, o) in phi_acc.iter_mut().zip(&out) {
                            *p += o;
                        }
                    }
                    let scale = st * 2.0 * std::f64::consts::PI / n_phi as f64;
                    for (dst, p) in acc.iter_mut().zip(&phi_acc) {
                        *dst += scale * p;
                    }
                };
                for &(lo, hi) in &panels {
                    let half = 0.5 * (hi - lo);
                    let mid = 0.5 * (lo + hi);
                    for v in acc_hi.iter_mut() {
                        *v = 0.0;
                    }
                    for v in acc_lo.iter_mut() {
                        *v = 0.0;
                    }
                    for (gn, gw) in gl_hi_n.iter().zip(&gl_hi_w) {
                        for v in tmp.iter_mut() {
                            *v = 0.0;
                        }
                        theta_line(mid + half * gn, &mut tmp);
                        for (dst, t) in acc_hi.iter_mut().zip(&tmp) {
                            *dst += gw * half * t;
                        }
                        evals += n_phi as u64;
                    }
                    for (gn, gw) in gl_lo_n.iter().zip(&gl_lo_w) {
                        for v in tmp.iter_mut() {
                            *v = 0.0;
                        }
                        theta_line(mid + half * gn, &mut tmp);
                        for (dst, t) in acc_lo.iter_mut().zip(&tmp) {
                            *dst += gw * half * t;
                        }
                        evals += n_phi as u64;
                    }
                    for s in 0..nsig {
                        values[s] += wx * acc_hi[s];
                        errors[s] += wx * (acc_hi[s] - acc_lo[s]).abs();
                    }
                }
            }
        }
        2 => {
            let mut tmp = vec![0.0_f64; nsig];
            let mut acc_hi = vec![0.0_f64; nsig];
            let mut acc_lo = vec![0.0_f64; nsig];
            for idx in 0..grid.len() {
                let x = grid.nodes()[idx];
                let tau = x[1].atan2(x[0]);
                let a = vals.values[idx];
                let wx = grid.weights()[idx];
                let mut theta_line = |theta: f64, acc: &mut [f64]| {
                    for sign in [-1.0_f64, 1.0] {
                        let ang = tau + sign * theta;
                        let y = [ang.cos(), ang.sin(), 0.0];
                        let b = field.eval(&y);
                        let c = 2.0 * (0.5 * theta).sin();
                        inner(a, b, c, &mut out);
                        for (dst, o) in acc.iter_mut().zip(&out) {
                            *dst += o;
                        }
                    }
                };
                for &(lo, hi) in &panels {
                    let half = 0.5 * (hi - lo);
                    let mid = 0.5 * (lo + hi);
                    for v in acc_hi.iter_mut() {
                        *v = 0.0;
                    }
                    for v in acc_lo.iter_mut() {
                        *v = 0.0;
                    }
                    for (gn, gw) in gl_hi_n.iter().zip(&gl_hi_w) {
                        for v in tmp.iter_mut() {
                            *v = 0.0;
                        }
                        theta_line(mid + half * gn, &mut tmp);
                        for (dst, t) in acc_hi.iter_mut().zip(&tmp) {
                            *dst += gw * half * t;
                        }
                        evals += 2;
                    }
                    for (gn, gw) in gl_lo_n.iter().zip(&gl_lo_w) {
                        for v in tmp.iter_mut() {
                            *v = 0.0;
                        }
                        theta_line(mid + half * gn, &mut tmp);
                        for (dst, t) in acc_lo.iter_mut().zip(&tmp) {
                            *dst += gw * half * t;
                        }
                        evals += 2;
                    }
                    for s in 0..nsig {
                        values[s] += wx * acc_hi[s];
                        errors[s] += wx * (acc_hi[s] - acc_lo[s]).abs();
                    }
                }
            }
        }
        other => {
            return Err(Error::Unsupported(format!(
                "pair quadrature supports d in {{2, 3}}, got d = {other}"
            )))
        }
    }

    for s in 0..nsig {
        errors[s] += cap_bound(sigmas[s], theta_min);
        if errors[s] > budgets[s] && errors[s] > 1e-11 * values[s].abs() {
            return Err(Error::Convergence {
                message: format!(
                    "pair quadrature for sigma = {} (budget {:e})",
                    sigmas[s], budgets[s]
                ),
                best: values[s],
                achieved: errors[s],
            });
        }
    }
    Ok(PairResult { values, errors, evals })
}

/// Fixed 6×6 Gauss rule for ∫∫ F_σ(1+p, 1+q, c) over [min(a,b), max(a,b)]².
///
/// The square has side |a - b| ≲ Lip(w)·c, so the kernel argument stays
/// comparable to c over the whole square and the integrand is smooth
/// there; a fixed rule is accurate uniformly in the node pair.
#[allow(clippy::too_many_arguments)]
fn square_rule(
    a: f64,
    b: f64,
    c: f64,
    d: u32,
    sigmas: &[f64],
    nodes: &[f64],
    weights: &[f64],
    out: &mut [f64],
) {
    for o in out.iter_mut() {
        *o = 0.0;
    }
    if a == b {
        return;
    }
    let lo = a.min(b);
    let hi = a.max(b);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (lo + hi);
    let c_sq = c * c;
    for (pi, pw) in nodes.iter().zip(weights) {
        let p = mid + half * pi;
        let rp = 1.0 + p;
        for (qi, qw) in nodes.iter().zip(weights) {
            let q = mid + half * qi;
            let rq = 1.0 + q;
            let prod = rp * rq;
            let poly = match d {
                2 => prod,
                3 => prod * prod,
                _ => prod.powi(d as i32 - 1),
            };
            let arg = (p - q) * (p - q) + prod * c_sq;
            let wt = pw * qw * half * half * poly;
            for (o, sigma) in out.iter_mut().zip(sigmas) {
                *o += wt * arg.powf(0.5 * sigma);
            }
        }
    }
}

/// Largest |Δ field| / chord over neighboring grid nodes, a practical
/// stand-in for the Lipschitz constant of a band-limited field.
fn grid_lipschitz(grid: &SphereGrid, values: &[f64]) -> f64 {
    let nodes = grid.nodes();
    let chord = |a: &[f64; 3], b: &[f64; 3]| -> f64 {
        ((a[0] - b[0]) * (a[0] - b[0])
            + (a[1] - b[1]) * (a[1] - b[1])
            + (a[2] - b[2]) * (a[2] - b[2]))
            .sqrt()
    };
    let mut lip = 0.0_f64;
    match grid.d().get() {
        2 => {
            let n = nodes.len();
            for i in 0..n {
                let j = (i + 1) % n;
                lip = lip.max((values[i] - values[j]).abs() / chord(&nodes[i], &nodes[j]));
            }
        }
        _ => {
            let m = 2 * grid.resolution();
            let rings = grid.resolution();
            for ring in 0..rings {
                for j in 0..m {
                    let a = ring * m + j;
                    let b = ring * m + (j + 1) % m;
                    lip = lip.max((values[a] - values[b]).abs() / chord(&nodes[a], &nodes[b]));
                    if ring + 1 < rings {
                        let c = (ring + 1) * m + j;
                        lip = lip.max((values[a] - values[c]).abs() / chord(&nodes[a], &nodes[c]));
                    }
                }
            }
        }
    }
    lip
}

fn orthonormal_frame(x: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let pick = if x[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let dot = pick[0] * x[0] + pick[1] * x[1] + pick[2] * x[2];
    let mut e1 = [pick[0] - dot * x[0], pick[1] - dot * x[1], pick[2] - dot * x[2]];
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1 = [e1[0] / n, e1[1] / n, e1[2] / n];
    let e2 = [
        x[1] * e1[2] - x[2] * e1[1],
        x[2] * e1[0] - x[0] * e1[2],
        x[0] * e1[1] - x[1] * e1[0],
    ];
    (e1, e2)
}

/// The correction functional g_σ(t) = G_σ / t², with the t = 0 value
/// taken as the kernel seminorm ∫∫ |x-y|^σ (u(x) - u(y))² of the raw
/// profile.
pub fn g_sigma(
    pert: &StarPerturbation,
    t: f64,
    sigma: f64,
    grid: &SphereGrid,
    tol: f64,
) -> Result<EnergyEstimate> {
    let df = grid.d().as_f64();
    if !(sigma > -(df - 1.0)) {
        return Err(Error::Domain(format!(
            "surface pair integrals need sigma > -(d-1), got {sigma}"
        )));
    }
    if t == 0.0 {
        let rule = InnerRule::SeminormLimit(pert.coeffs());
        let r = pair_integral(&rule, grid, &[sigma], &[tol])?;
        return Ok(EnergyEstimate {
            value: r.values[0],
            error: r.errors[0],
            method: Method::Quadrature,
            count: r.evals,
            seed: None,
        });
    }
    let w = pert.profile(t, grid)?;
    let rule = InnerRule::StarSquare(&w);
    let r = pair_integral(&rule, grid, &[sigma], &[tol * t * t])?;
    Ok(EnergyEstimate {
        value: r.values[0] / (t * t),
        error: r.errors[0] / (t * t),
        method: Method::Quadrature,
        count: r.evals,
        seed: None,
    })
}

/// Exact single-kernel energy difference J_σ(E_t) - J_σ(B₁) for the
/// star-shaped set with boundary offset t·u (plus corrections).
pub fn delta_j_star(
    pert: &StarPerturbation,
    t: f64,
    sigma: f64,
    grid: &SphereGrid,
    tol: f64,
) -> Result<EnergyEstimate> {
    let d = grid.d();
    let df = d.as_f64();
    if !(sigma > -(df - 1.0)) {
        return Err(Error::Domain(format!(
            "star energy differences need sigma > -(d-1), got {sigma}"
        )));
    }
    let j = j_ball(d, sigma)?;
    let w = pert.profile(t, grid)?;
    let h_t = h_sigma_profile(&w, sigma, grid);
    let h_0: f64 = grid.weights().iter().sum();
    let rule = InnerRule::StarSquare(&w);
    let r = pair_integral(&rule, grid, &[sigma], &[2.0 * tol])?;
    let surface = df * unit_ball_volume(d.get());
    let value = j / surface * (h_t - h_0) - 0.5 * r.values[0];
    Ok(EnergyEstimate {
        value,
        error: 0.5 * r.errors[0] + 1e-14 * j,
        method: Method::Quadrature,
        count: r.evals,
        seed: None,
    })
}

/// Exact full energy difference F_γ(E_t) - F_γ(B₁): the repulsive and
/// attractive components share one pair quadrature sweep.
pub fn delta_f(
    pert: &StarPerturbation,
    t: f64,
    params: &ModelParams,
    grid: &SphereGrid,
    tol: f64,
) -> Result<EnergyEstimate> {
    let d = grid.d();
    let df = d.as_f64();
    let gamma = params.gamma();
    let sigmas = [-params.alpha(), params.beta()];
    let j_rep = j_ball(d, sigmas[0])?;
    let j_att = j_ball(d, sigmas[1])?;
    let w = pert.profile(t, grid)?;
    let h_rep = h_sigma_profile(&w, sigmas[0], grid);
    let h_att = h_sigma_profile(&w, sigmas[1], grid);
    let h_0: f64 = grid.weights().iter().sum();
    let rule = InnerRule::StarSquare(&w);
    let budgets = [tol, tol / gamma];
    let r = pair_integral(&rule, grid, &sigmas, &budgets)?;
    let surface = df * unit_ball_volume(d.get());
    let delta_rep = j_rep / surface * (h_rep - h_0) - 0.5 * r.values[0];
    let delta_att = j_att / surface * (h_att - h_0) - 0.5 * r.values[1];
    Ok(EnergyEstimate {
        value: delta_rep + gamma * delta_att,
        error: 0.5 * (r.errors[0] + gamma * r.errors[1]) + 1e-14 * (j_rep + gamma * j_att),
        method: Method::Quadrature,
        count: r.evals,
        seed: None,
    })
}

/// Symmetric-difference volume |E_t Δ B₁| = ∫ |(1 + w)^d - 1| / d dH
/// against the centered unit ball.
pub fn asymmetry_star(pert: &StarPerturbation, t: f64, grid: &SphereGrid) -> Result<f64> {
    let w = pert.profile(t, grid)?;
    let vals = synthesize(&w, grid);
    let d = grid.d().as_f64() as i32;
    Ok(vals
        .values
        .iter()
        .zip(grid.weights())
        .map(|(v, wt)| wt * ((1.0 + v).powi(d) - 1.0).abs())
        .sum::<f64>()
        / f64::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{build_grid, seminorm_spectral};
    use crate::special::Dimension;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn d3() -> Dimension {
        Dimension::new(3).unwrap()
    }

    fn grid24() -> SphereGrid {
        build_grid(d3(), 24).unwrap()
    }

    fn mode_y2() -> HarmonicCoefficients {
        HarmonicCoefficients::single(d3(), 2, 1).unwrap()
    }

    #[test]
    fn h_sigma_trivial_cases() {
        let grid = grid24();
        let zero = StarPerturbation::new(
            HarmonicCoefficients::zeros(d3(), 2),
            ConstraintMode::Raw,
        );
        let h = h_sigma(&zero, 0.3, -1.0, &grid).unwrap();
        assert_abs_diff_eq!(h, 4.0 * PI, epsilon = 1e-12);
        // constant profile: dilation factor (1 + t c)^{2d+σ}
        let dilation = StarPerturbation::new(
            HarmonicCoefficients::single(d3(), 0, 1).unwrap(),
            ConstraintMode::Raw,
        );
        // coefficient 1 in the constant mode is the constant 1/sqrt(4π)
        let c = 1.0 / (4.0 * PI).sqrt();
        let t = 0.2;
        let h = h_sigma(&dilation, t, 4.0, &grid).unwrap();
        assert_abs_diff_eq!(h, 4.0 * PI * (1.0 + t * c).powi(10), epsilon = 1e-10);
        // t = 0 always gives the surface area
        let h = h_sigma(&dilation, 0.0, 4.0, &grid).unwrap();
        assert_abs_diff_eq!(h, 4.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn volume_correction_fixes_enclosed_volume() {
        let grid = grid24();
        let pert = StarPerturbation::new(mode_y2(), ConstraintMode::VolumeCorrected);
        let t = 0.1;
        let w = pert.profile(t, &grid).unwrap();
        let vals = synthesize(&w, &grid);
        let vol: f64 = vals
            .values
            .iter()
            .zip(grid.weights())
            .map(|(v, wt)| wt * (1.0 + v).powi(3))
            .sum::<f64>()
            / 3.0;
        assert!(
            (vol - 4.0 * PI / 3.0).abs() < 1e-12,
            "volume after correction: {vol}"
        );
        // the correction is a pure constant shift: degree-2 block intact
        assert_abs_diff_eq!(w.get(2, 1), t, epsilon = 1e-15);
    }

    #[test]
    fn profile_rejects_large_amplitudes() {
        let grid = grid24();
        let pert = StarPerturbation::new(mode_y2(), ConstraintMode::Raw);
        // |Y_2| peaks at sqrt(5/4π) ≈ 0.63, so t = 1 exceeds the range
        assert!(pert.profile(1.0, &grid).is_err());
        assert!(pert.profile(0.05, &grid).is_ok());
    }

    #[test]
    fn g_at_zero_matches_spectral_seminorm() {
        let grid = grid24();
        // a mixed, non-zonal perturbation
        let mut coeffs = HarmonicCoefficients::zeros(d3(), 3);
        coeffs.set(2, 1, 0.8).unwrap();
        coeffs.set(2, 3, -0.4).unwrap();
        coeffs.set(3, 2, 0.3).unwrap();
        let pert = StarPerturbation::new(coeffs.clone(), ConstraintMode::Raw);
        for &sigma in &[-1.0_f64, 4.0] {
            let g = g_sigma(&pert, 0.0, sigma, &grid, 1e-4).unwrap();
            let want = seminorm_spectral(&coeffs, sigma).unwrap();
            assert!(
                (g.value - want).abs() < 5e-5 * want.abs().max(1.0),
                "sigma = {sigma}: {} vs {want} (err bound {})",
                g.value,
                g.error
            );
        }
    }

    #[test]
    fn constant_profiles_have_no_pair_term() {
        let grid = grid24();
        let dilation = StarPerturbation::new(
            HarmonicCoefficients::single(d3(), 0, 1).unwrap(),
            ConstraintMode::Raw,
        );
        for &sigma in &[-1.0_f64, 4.0] {
            let g = g_sigma(&dilation, 0.1, sigma, &grid, 1e-12).unwrap();
            assert_eq!(g.value, 0.0);
            assert_eq!(g.error, 0.0);
        }
    }

    #[test]
    fn dilation_energy_matches_scaling_law() {
        // u ≡ const: g vanishes and ΔJ = J_σ(B₁)((1+tc)^{2d+σ} - 1)
        let grid = grid24();
        let dilation = StarPerturbation::new(
            HarmonicCoefficients::single(d3(), 0, 1).unwrap(),
            ConstraintMode::Raw,
        );
        let c = 1.0 / (4.0 * PI).sqrt();
        let t = 0.15;
        for &sigma in &[-1.0_f64, 4.0] {
            let dj = delta_j_star(&dilation, t, sigma, &grid, 1e-9).unwrap();
            let j = j_ball(d3(), sigma).unwrap();
            let want = j * ((1.0 + t * c).powf(6.0 + sigma) - 1.0);
            assert!(
                (dj.value - want).abs() < 1e-9 * want.abs(),
                "sigma = {sigma}: {} vs {want}",
                dj.value
            );
        }
        // and ΔJ at t = 0 is exactly zero
        let dj = delta_j_star(&dilation, 0.0, -1.0, &grid, 1e-9).unwrap();
        assert_eq!(dj.value, 0.0);
    }

    #[test]
    fn quadratic_form_is_the_small_t_limit() {
        // 2 ΔF / t² → QF(u) for the corrected degree-2 mode
        let grid = grid24();
        let params = ModelParams::new(d3(), 1.0, 4.0, 1.0).unwrap();
        let pert = StarPerturbation::new(mode_y2(), ConstraintMode::VolumeAndBarycenterCorrected);
        let qf = crate::spectral::quad_form(&params, &mode_y2()).unwrap();
        let mut defects = Vec::new();
        for &t in &[0.04_f64, 0.02] {
            let df = delta_f(&pert, t, &params, &grid, 1e-8).unwrap();
            defects.push((2.0 * df.value / (t * t) - qf).abs());
        }
        assert!(
            defects[1] < 0.7 * defects[0],
            "defects not shrinking: {defects:?}"
        );
        assert!(defects[1] < 0.1 * qf.abs());
    }

    #[test]
    fn asymmetry_values() {
        let grid = grid24();
        let zero = StarPerturbation::new(
            HarmonicCoefficients::zeros(d3(), 1),
            ConstraintMode::Raw,
        );
        assert_eq!(asymmetry_star(&zero, 0.1, &grid).unwrap(), 0.0);
        // dilation to radius ρ: |E Δ B₁| = (ρ³ - 1) ω_d
        let dilation = StarPerturbation::new(
            HarmonicCoefficients::single(d3(), 0, 1).unwrap(),
            ConstraintMode::Raw,
        );
        let c = 1.0 / (4.0 * PI).sqrt();
        let t = 0.3;
        let rho = 1.0 + t * c;
        let want = (rho.powi(3) - 1.0) * 4.0 * PI / 3.0;
        assert_abs_diff_eq!(
            asymmetry_star(&dilation, t, &grid).unwrap(),
            want,
            epsilon = 1e-12
        );
        // sign-symmetric profile still gives a positive volume
        let pert = StarPerturbation::new(mode_y2(), ConstraintMode::Raw);
        assert!(asymmetry_star(&pert, 0.05, &grid).unwrap() > 0.0);
    }
}
