//! Seeded Monte Carlo oracle for energy differences.
//!
//! Pairs of points are drawn uniformly in a bounding ball and the
//! difference of pair-energy indicators between the perturbed set and
//! the unit ball is averaged. The estimator is unbiased for any
//! measurable competitor and completely independent of the quadrature
//! path, which is what makes it useful as an oracle. Samples are drawn
//! in fixed-size chunks, each chunk on its own deterministic RNG stream
//! derived from (seed, chunk index), and reduced in chunk order, so a
//! given (seed, sample count) always reproduces the same estimate.

use super::{EnergyEstimate, Method};
use crate::error::{Error, Result};
use crate::harmonics::SphereGrid;
use crate::special::unit_ball_volume;
use crate::spectral::ModelParams;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const CHUNK: u64 = 1 << 16;

fn sample_in_ball(rng: &mut ChaCha8Rng, d: u32, radius: f64) -> [f64; 3] {
    let mut v = [0.0_f64; 3];
    loop {
        let mut norm_sq = 0.0;
        for coord in v.iter_mut().take(d as usize) {
            let g: f64 = rng.sample(StandardNormal);
            *coord = g;
            norm_sq += g * g;
        }
        if norm_sq > 0.0 {
            let u: f64 = rng.gen::<f64>();
            let r = radius * u.powf(1.0 / f64::from(d));
            let scale = r / norm_sq.sqrt();
            for coord in v.iter_mut().take(d as usize) {
                *coord *= scale;
            }
            return v;
        }
    }
}

/// Monte Carlo estimate of F_γ(E) - F_γ(B₁) for an arbitrary set E
/// described by a membership test, sampled inside the ball of
/// `bounding_radius` (which must contain E ∪ B₁).
pub fn mc_energy_set_vs_ball(
    params: &ModelParams,
    membership: impl Fn(&[f64; 3]) -> bool,
    bounding_radius: f64,
    n_samples: u64,
    seed: u64,
) -> Result<EnergyEstimate> {
    if n_samples < 10_000 {
        return Err(Error::Domain(format!(
            "Monte Carlo oracle needs at least 10^4 samples, got {n_samples}"
        )));
    }
    if !(bounding_radius >= 1.0) {
        return Err(Error::Domain(format!(
            "bounding radius must cover the unit ball, got {bounding_radius}"
        )));
    }
    let d = params.d().get();
    let (alpha, beta, gamma) = (params.alpha(), params.beta(), params.gamma());
    let volume = unit_ball_volume(d) * bounding_radius.powi(d as i32);
    let vv = volume * volume;
    let mut total_sum = 0.0_f64;
    let mut total_sq = 0.0_f64;
    let n_chunks = n_samples.div_ceil(CHUNK);
    for chunk in 0..n_chunks {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk + 1);
        let in_chunk = CHUNK.min(n_samples - chunk * CHUNK);
        let mut sum = 0.0_f64;
        let mut sq = 0.0_f64;
        for _ in 0..in_chunk {
            let x = sample_in_ball(&mut rng, d, bounding_radius);
            let y = sample_in_ball(&mut rng, d, bounding_radius);
            let in_e = (membership(&x) as i32 * membership(&y) as i32) as f64;
            let rx = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            let ry = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            let in_b = f64::from(u8::from(rx <= 1.0 && ry <= 1.0));
            let diff = in_e - in_b;
            if diff != 0.0 {
                let dist = ((x[0] - y[0]) * (x[0] - y[0])
                    + (x[1] - y[1]) * (x[1] - y[1])
                    + (x[2] - y[2]) * (x[2] - y[2]))
                    .sqrt();
                if dist > 0.0 {
                    let k = dist.powf(-alpha) + gamma * dist.powf(beta);
                    let v = diff * k;
                    sum += v;
                    sq += v * v;
                }
            }
        }
        total_sum += sum;
        total_sq += sq;
    }
    let n = n_samples as f64;
    let mean = total_sum / n;
    let var = ((total_sq / n) - mean * mean).max(0.0) / (n - 1.0);
    Ok(EnergyEstimate {
        value: vv * mean,
        error: vv * var.sqrt(),
        method: Method::MonteCarlo,
        count: n_samples,
        seed: Some(seed),
    })
}

/// Monte Carlo estimate of F_γ(E_t) - F_γ(B₁) for the star-shaped set
/// of a perturbation, with radial acceptance against 1 + w.
pub fn mc_energy_star(
    pert: &super::StarPerturbation,
    t: f64,
    params: &ModelParams,
    grid: &SphereGrid,
    n_samples: u64,
    seed: u64,
) -> Result<EnergyEstimate> {
    let w = pert.profile(t, grid)?;
    // rigorous bounding radius from the coefficient sup bound
    let radius = 1.0 + w.sup_bound().max(0.0) + 1e-12;
    let membership = |p: &[f64; 3]| -> bool {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if r == 0.0 {
            return true;
        }
        let unit = [p[0] / r, p[1] / r, p[2] / r];
        r <= 1.0 + w.eval(&unit)
    };
    mc_energy_set_vs_ball(params, membership, radius, n_samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{delta_f, ConstraintMode, StarPerturbation};
    use crate::harmonics::{build_grid, HarmonicCoefficients};
    use crate::special::Dimension;

    fn d3() -> Dimension {
        Dimension::new(3).unwrap()
    }

    #[test]
    fn zero_perturbation_estimates_zero() {
        let params = ModelParams::new(d3(), 1.0, 4.0, 1.0).unwrap();
        let grid = build_grid(d3(), 16).unwrap();
        let pert = StarPerturbation::new(
            HarmonicCoefficients::zeros(d3(), 1),
            ConstraintMode::Raw,
        );
        let e = mc_energy_star(&pert, 0.0, &params, &grid, 20_000, 7).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.error, 0.0);
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let params = ModelParams::new(d3(), 1.0, 4.0, 0.5).unwrap();
        let grid = build_grid(d3(), 16).unwrap();
        let pert = StarPerturbation::new(
            HarmonicCoefficients::single(d3(), 2, 2).unwrap(),
            ConstraintMode::Raw,
        );
        let a = mc_energy_star(&pert, 0.05, &params, &grid, 50_000, 42).unwrap();
        let b = mc_energy_star(&pert, 0.05, &params, &grid, 50_000, 42).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error.to_bits(), b.error.to_bits());
        let c = mc_energy_star(&pert, 0.05, &params, &grid, 50_000, 43).unwrap();
        assert_ne!(a.value.to_bits(), c.value.to_bits());
        assert!(mc_energy_star(&pert, 0.05, &params, &grid, 100, 1).is_err());
    }

    #[test]
    fn dilation_matches_closed_form() {
        // dilation to radius ρ: ΔF = (ρ^{2d-α} - 1) J_{-α} + γ (ρ^{2d+β} - 1) J_β
        let params = ModelParams::new(d3(), 1.0, 4.0, 0.2).unwrap();
        let grid = build_grid(d3(), 16).unwrap();
        let dilation = StarPerturbation::new(
            HarmonicCoefficients::single(d3(), 0, 1).unwrap(),
            ConstraintMode::Raw,
        );
        let c = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
        let t = 0.2;
        let rho: f64 = 1.0 + t * c;
        let j_rep = crate::spectral::j_ball(d3(), -1.0).unwrap();
        let j_att = crate::spectral::j_ball(d3(), 4.0).unwrap();
        let want = (rho.powf(5.0) - 1.0) * j_rep + 0.2 * (rho.powf(10.0) - 1.0) * j_att;
        let e = mc_energy_star(&dilation, t, &params, &grid, 400_000, 11).unwrap();
        assert!(
            (e.value - want).abs() < 3.0 * e.error,
            "{} vs {want} (stderr {})",
            e.value,
            e.error
        );
    }

    #[test]
    fn agrees_with_exact_difference_on_a_mode() {
        let params = ModelParams::new(d3(), 1.0, 4.0, 1.0).unwrap();
        let grid = build_grid(d3(), 16).unwrap();
        let pert = StarPerturbation::new(
            HarmonicCoefficients::single(d3(), 2, 4).unwrap(),
            ConstraintMode::Raw,
        );
        let t = 0.1;
        let exact = delta_f(&pert, t, &params, &grid, 1e-5).unwrap();
        let mc = mc_energy_star(&pert, t, &params, &grid, 600_000, 5).unwrap();
        let combined = (exact.error * exact.error + mc.error * mc.error).sqrt();
        assert!(
            (exact.value - mc.value).abs() < 3.0 * combined,
            "exact {} vs mc {} ± {}",
            exact.value,
            mc.value,
            combined
        );
    }
}
