//! Pairwise interaction energies between balls.
//!
//! I(F, G) = ∫_F ∫_G (|x-y|^{-α} + γ |x-y|^β) dx dy is the quantity the
//! mass-transfer competitors are built from. Three routes, picked by
//! geometry:
//!
//! * F = G: the scaling closed form r^{2d-α} J_{-α}(B₁) + γ r^{2d+β} J_β(B₁);
//! * small, well-separated balls: midpoint expansion of the kernel with
//!   a second-order Laplacian correction;
//! * everything else: reduce to the ball potential, I(F, G) = ∫_G Ψ_F,
//!   and slice G into spheres around the center of F, so only a 1D
//!   integral of ψ against an intersection-area weight remains.
//!
//! A seeded Monte Carlo fallback covers the (unused in practice) case
//! where the potential route fails to converge.

use super::{EnergyEstimate, Method};
use crate::error::{Error, Result};
use crate::quad::adaptive;
use crate::special::unit_ball_volume;
use crate::spectral::{j_ball, ModelParams};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]) * (a[0] - b[0])
        + (a[1] - b[1]) * (a[1] - b[1])
        + (a[2] - b[2]) * (a[2] - b[2]))
        .sqrt()
}

/// Interaction energy of two balls, with automatic method choice.
///
/// `tol` is the absolute error target for the deterministic routes;
/// `mc_samples` and `seed` drive the Monte Carlo fallback.
pub fn ball_ball_interaction(
    c1: &[f64; 3],
    r1: f64,
    c2: &[f64; 3],
    r2: f64,
    params: &ModelParams,
    tol: f64,
    mc_samples: u64,
    seed: u64,
) -> Result<EnergyEstimate> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(Error::Domain(format!(
            "ball radii must be positive, got {r1} and {r2}"
        )));
    }
    let d = params.d();
    let df = d.as_f64();
    let s = dist(c1, c2);
    if s == 0.0 && r1 == r2 {
        // same ball: I(B_r) = r^{2d-α} J_{-α}(B₁) + γ r^{2d+β} J_β(B₁)
        let value = r1.powf(2.0 * df - params.alpha()) * j_ball(d, -params.alpha())?
            + params.gamma() * r1.powf(2.0 * df + params.beta()) * j_ball(d, params.beta())?;
        return Ok(EnergyEstimate::closed_form(value));
    }
    // midpoint expansion for small well-separated balls
    if s >= r1 + r2 && r1.max(r2) <= 0.2 * s {
        if let Some(est) = midpoint_expansion(r1, r2, s, params, tol) {
            return Ok(est);
        }
    }
    match potential_route(c1, r1, c2, r2, params, tol) {
        Ok(est) => Ok(est),
        Err(Error::Convergence { .. }) => mc_route(c1, r1, c2, r2, params, mc_samples, seed),
        Err(e) => Err(e),
    }
}

/// k(s) |F||G| plus the second-order ball-average correction; None when
/// the correction's own error estimate exceeds the tolerance.
fn midpoint_expansion(
    r1: f64,
    r2: f64,
    s: f64,
    params: &ModelParams,
    tol: f64,
) -> Option<EnergyEstimate> {
    let d = params.d();
    let df = d.as_f64();
    let (alpha, beta, gamma) = (params.alpha(), params.beta(), params.gamma());
    let vol = |r: f64| unit_ball_volume(d.get()) * r.powi(d.get() as i32);
    let vv = vol(r1) * vol(r2);
    let k = s.powf(-alpha) + gamma * s.powf(beta);
    // radial Laplacian of ρ^m is m(m+d-2) ρ^{m-2}
    let lap = alpha * (alpha + 2.0 - df) * s.powf(-alpha - 2.0)
        + gamma * beta * (beta + df - 2.0) * s.powf(beta - 2.0);
    let rr = r1 * r1 + r2 * r2;
    let correction = rr / (2.0 * (df + 2.0)) * lap;
    // fourth-order magnitude as the error proxy
    let kd4 = alpha * (alpha + 1.0) * (alpha + 2.0) * (alpha + 3.0) * s.powf(-alpha - 4.0)
        + gamma * (beta * (beta - 1.0) * (beta - 2.0) * (beta - 3.0)).abs() * s.powf(beta - 4.0);
    let error = vv * rr * rr * kd4 / (4.0 * (df + 2.0) * (df + 2.0));
    if error > tol {
        return None;
    }
    Some(EnergyEstimate {
        value: vv * (k + correction),
        error,
        method: Method::Quadrature,
        count: 1,
        seed: None,
    })
}

/// (d-1)-measure of the sphere {|x - c_F| = ρ} inside the ball of
/// radius r_g centered at distance s from c_F.
fn shell_area(d: u32, rho: f64, s: f64, rg: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    let full = f64::from(d) * unit_ball_volume(d) * rho.powi(d as i32 - 1);
    if s == 0.0 {
        return if rho <= rg { full } else { 0.0 };
    }
    let cos_cap = (rho * rho + s * s - rg * rg) / (2.0 * rho * s);
    if cos_cap >= 1.0 {
        return 0.0;
    }
    if cos_cap <= -1.0 {
        return full;
    }
    match d {
        2 => 2.0 * rho * cos_cap.acos(),
        3 => std::f64::consts::PI * rho / s * (rg * rg - (s - rho) * (s - rho)),
        _ => unreachable!("potential route restricted to d = 2 or 3"),
    }
}

/// I(F, G) = ∫_G Ψ_F by spherical slicing around the center of F, with
/// the larger ball acting as the potential source.
fn potential_route(
    c1: &[f64; 3],
    r1: f64,
    c2: &[f64; 3],
    r2: f64,
    params: &ModelParams,
    tol: f64,
) -> Result<EnergyEstimate> {
    let d = params.d();
    if d.get() != 2 && d.get() != 3 {
        return Err(Error::Unsupported(format!(
            "ball interactions by the potential route support d in {{2, 3}}, got {d}"
        )));
    }
    let df = d.as_f64();
    // source = larger ball
    let (rf, rg, s) = if r1 >= r2 {
        (r1, r2, dist(c1, c2))
    } else {
        (r2, r1, dist(c1, c2))
    };
    let (alpha, beta, gamma) = (params.alpha(), params.beta(), params.gamma());
    let vol_g = unit_ball_volume(d.get()) * rg.powi(d.get() as i32);
    // per-point potential budget: its integral over G must stay small
    let psi_tol = 0.2 * tol / vol_g;
    let psi_err = std::cell::Cell::new(0.0_f64);
    let psi_evals = std::cell::Cell::new(0u64);
    let potential = |rho: f64| -> f64 {
        let scaled = rho / rf;
        let rep = super::psi_sigma(scaled, -alpha, d, 0.5 * psi_tol / rf.powf(df - alpha));
        let att = super::psi_sigma(
            scaled,
            beta,
            d,
            0.5 * psi_tol / (gamma * rf.powf(df + beta)),
        );
        match (rep, att) {
            (Ok(r), Ok(a)) => {
                psi_err.set(psi_err.get() + rf.powf(df - alpha) * r.error
                    + gamma * rf.powf(df + beta) * a.error);
                psi_evals.set(psi_evals.get() + r.count + a.count);
                rf.powf(df - alpha) * r.value + gamma * rf.powf(df + beta) * a.value
            }
            _ => f64::NAN,
        }
    };
    let lo = (s - rg).max(0.0);
    let hi = s + rg;
    // split where the weight or the potential loses smoothness
    let mut cuts = vec![lo, hi];
    if s < rg {
        cuts.push(rg - s);
    }
    if rf > lo && rf < hi {
        cuts.push(rf);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evals = 0u64;
    for pair in cuts.windows(2) {
        let mut f = |rho: f64| potential(rho) * shell_area(d.get(), rho, s, rg);
        let q = adaptive(&mut f, pair[0], pair[1], 0.4 * tol * (pair[1] - pair[0]) / (hi - lo))?;
        value += q.value;
        error += q.error;
        evals += q.evals;
    }
    if !value.is_finite() {
        return Err(Error::Convergence {
            message: "ball interaction potential route".into(),
            best: value,
            achieved: f64::INFINITY,
        });
    }
    Ok(EnergyEstimate {
        value,
        error: error + 0.2 * tol,
        method: Method::Quadrature,
        count: evals + psi_evals.get(),
        seed: None,
    })
}

/// Plain pair sampling inside the two balls.
fn mc_route(
    c1: &[f64; 3],
    r1: f64,
    c2: &[f64; 3],
    r2: f64,
    params: &ModelParams,
    n_samples: u64,
    seed: u64,
) -> Result<EnergyEstimate> {
    if n_samples < 10_000 {
        return Err(Error::Domain(format!(
            "Monte Carlo fallback needs at least 10^4 samples, got {n_samples}"
        )));
    }
    let d = params.d().get();
    let (alpha, beta, gamma) = (params.alpha(), params.beta(), params.gamma());
    let vv = unit_ball_volume(d) * r1.powi(d as i32) * unit_ball_volume(d) * r2.powi(d as i32);
    let mut sum = 0.0_f64;
    let mut sq = 0.0_f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0xba11);
    let point = |rng: &mut ChaCha8Rng, c: &[f64; 3], r: f64| -> [f64; 3] {
        let mut v = [0.0_f64; 3];
        let mut norm_sq = 0.0;
        for coord in v.iter_mut().take(d as usize) {
            let g: f64 = rng.sample(StandardNormal);
            *coord = g;
            norm_sq += g * g;
        }
        let u: f64 = rng.gen::<f64>();
        let scale = r * u.powf(1.0 / f64::from(d)) / norm_sq.sqrt();
        [c[0] + v[0] * scale, c[1] + v[1] * scale, c[2] + v[2] * scale]
    };
    for _ in 0..n_samples {
        let x = point(&mut rng, c1, r1);
        let y = point(&mut rng, c2, r2);
        let r = dist(&x, &y);
        if r > 0.0 {
            let v = r.powf(-alpha) + gamma * r.powf(beta);
            sum += v;
            sq += v * v;
        }
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sq / n) - mean * mean).max(0.0) / (n - 1.0);
    Ok(EnergyEstimate {
        value: vv * mean,
        error: vv * var.sqrt(),
        method: Method::MonteCarlo,
        count: n_samples,
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::Dimension;
    use std::f64::consts::PI;

    fn d3() -> Dimension {
        Dimension::new(3).unwrap()
    }

    fn params314(gamma: f64) -> ModelParams {
        ModelParams::new(d3(), 1.0, 4.0, gamma).unwrap()
    }

    #[test]
    fn same_ball_scaling() {
        let params = params314(1.0 / 7.0);
        let delta = 0.05_f64;
        let e = ball_ball_interaction(
            &[0.3, 0.0, 0.0],
            delta,
            &[0.3, 0.0, 0.0],
            delta,
            &params,
            1e-9,
            0,
            0,
        )
        .unwrap();
        let want = delta.powf(5.0) * j_ball(d3(), -1.0).unwrap()
            + delta.powf(10.0) / 7.0 * j_ball(d3(), 4.0).unwrap();
        assert!((e.value - want).abs() < 1e-12 * want);
        assert_eq!(e.method, Method::ClosedForm);
    }

    #[test]
    fn unit_ball_against_small_ball_is_potential_average() {
        // I(B₁, D) ≈ ψ(center) |D| for a small ball D
        let params = params314(1.0 / 7.0);
        let delta = 0.02;
        let center = [0.6, 0.0, 0.0];
        let e = ball_ball_interaction(&[0.0; 3], 1.0, &center, delta, &params, 1e-8, 0, 0)
            .unwrap();
        let psi_c = super::super::psi(0.6, &params, 1e-10).unwrap().value;
        let vol = 4.0 * PI / 3.0 * delta * delta * delta;
        assert!(
            (e.value - psi_c * vol).abs() < 2e-3 * psi_c * vol,
            "{} vs {}",
            e.value,
            psi_c * vol
        );
        // symmetric in the arguments
        let e2 = ball_ball_interaction(&center, delta, &[0.0; 3], 1.0, &params, 1e-8, 0, 0)
            .unwrap();
        assert!((e.value - e2.value).abs() <= e.error + e2.error + 1e-12);
    }

    #[test]
    fn small_pair_midpoint_vs_potential_route() {
        let params = params314(0.2);
        let (c1, c2) = ([0.5, 0.0, 0.0], [1.1, 0.0, 0.0]);
        let (r1, r2) = (0.03, 0.05);
        // loose tolerance lets the midpoint expansion answer
        let fast = ball_ball_interaction(&c1, r1, &c2, r2, &params, 1e-8, 0, 0).unwrap();
        // unbalanced radii force the slicing route
        let slow = potential_route(&c1, r1, &c2, r2, &params, 1e-9).unwrap();
        assert!(
            (fast.value - slow.value).abs() < 1e-8 + fast.error + slow.error,
            "midpoint {} vs slicing {}",
            fast.value,
            slow.value
        );
    }

    #[test]
    fn mc_route_agrees() {
        let params = params314(0.2);
        let (c1, c2) = ([0.4, 0.0, 0.0], [1.05, 0.0, 0.0]);
        let (r1, r2) = (0.1, 0.05);
        let det = ball_ball_interaction(&c1, r1, &c2, r2, &params, 1e-9, 0, 0).unwrap();
        let mc = mc_route(&c1, r1, &c2, r2, &params, 200_000, 3).unwrap();
        assert!(
            (det.value - mc.value).abs() < 3.0 * mc.error + det.error,
            "det {} vs mc {} ± {}",
            det.value,
            mc.value,
            mc.error
        );
    }
}
