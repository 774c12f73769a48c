//! Quadrature grids, real spherical harmonics, and the transform
//! between point values on the sphere and harmonic coefficients.
//!
//! Numerical sphere support is limited to d ∈ {2, 3}: the circle gets a
//! uniform angle rule, the 2-sphere a Gauss-Legendre × uniform-azimuth
//! product rule that is exact for spherical polynomials up to degree
//! 2·resolution - 1. All closed-form spectral operations remain valid
//! for any d ≥ 2; only the grids are dimension-restricted.

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::special::{unit_ball_volume, Dimension};
use crate::spectral::{mu_k, KernelExponent};
use std::f64::consts::PI;

/// Quadrature rule on the unit sphere ∂B₁ ⊂ R^d, d ∈ {2, 3}.
///
/// Weights sum to the surface area d ω_d. For d = 2 nodes live in the
/// plane (third coordinate zero).
#[derive(Debug, Clone)]
pub struct SphereGrid {
    d: Dimension,
    resolution: usize,
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl SphereGrid {
    pub fn d(&self) -> Dimension {
        self.d
    }
    pub fn resolution(&self) -> usize {
        self.resolution
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Surface integral of a node-sampled function.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Build the quadrature grid: uniform angles (d = 2) or Gauss-Legendre
/// polar cosine × uniform azimuth with 2·resolution azimuth nodes (d = 3).
pub fn build_grid(d: Dimension, resolution: usize) -> Result<SphereGrid> {
    if resolution < 4 {
        return Err(Error::Domain(format!(
            "grid resolution must be >= 4, got {resolution}"
        )));
    }
    match d.get() {
        2 => {
            let n = resolution;
            let w = 2.0 * PI / n as f64;
            let mut nodes = Vec::with_capacity(n);
            for j in 0..n {
                let t = 2.0 * PI * j as f64 / n as f64;
                nodes.push([t.cos(), t.sin(), 0.0]);
            }
            Ok(SphereGrid { d, resolution, nodes, weights: vec![w; n] })
        }
        3 => {
            let n = resolution;
            let (gl_nodes, gl_weights) = gauss_legendre(n);
            let m = 2 * n;
            let wphi = 2.0 * PI / m as f64;
            let mut nodes = Vec::with_capacity(n * m);
            let mut weights = Vec::with_capacity(n * m);
            for (t, wt) in gl_nodes.iter().zip(&gl_weights) {
                let sin_theta = (1.0 - t * t).sqrt();
                for jm in 0..m {
                    let phi = 2.0 * PI * jm as f64 / m as f64;
                    nodes.push([sin_theta * phi.cos(), sin_theta * phi.sin(), *t]);
                    weights.push(wt * wphi);
                }
            }
            Ok(SphereGrid { d, resolution, nodes, weights })
        }
        other => Err(Error::Unsupported(format!(
            "sphere grids exist for d in {{2, 3}}, got d = {other}"
        ))),
    }
}

/// Number of real harmonics of degree k in dimension d.
pub fn basis_dim(d: Dimension, k: usize) -> usize {
    if k == 0 {
        1
    } else if d.get() == 2 {
        2
    } else {
        2 * k + 1
    }
}

/// Associated Legendre values P_k^m(x) (no Condon-Shortley phase) for
/// all 0 ≤ m ≤ k ≤ l_max, written into `out[k][m]`.
fn assoc_legendre_table(l_max: usize, x: f64, out: &mut Vec<Vec<f64>>) {
    out.clear();
    out.resize(l_max + 1, Vec::new());
    for (k, row) in out.iter_mut().enumerate() {
        row.resize(k + 1, 0.0);
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    // diagonal P_m^m = (2m-1)!! s^m, then one step up, then the
    // three-term recurrence in degree
    let mut pmm = 1.0;
    for m in 0..=l_max {
        out[m][m] = pmm;
        if m + 1 <= l_max {
            out[m + 1][m] = x * (2 * m + 1) as f64 * pmm;
            for k in (m + 2)..=l_max {
                out[k][m] = ((2 * k - 1) as f64 * x * out[k - 1][m]
                    - (k - 1 + m) as f64 * out[k - 2][m])
                    / (k - m) as f64;
            }
        }
        pmm *= (2 * m + 1) as f64 * s;
    }
}

/// Orthonormalization constant for the real harmonic (k, m) on S².
fn sh_norm(k: usize, m: usize) -> f64 {
    // sqrt((2k+1)/(4π) · (k-m)!/(k+m)!)
    let mut ratio = 1.0;
    for j in (k - m + 1)..=(k + m) {
        ratio /= j as f64;
    }
    ((2 * k + 1) as f64 / (4.0 * PI) * ratio).sqrt()
}

/// Evaluate all real basis functions of degree ≤ l_max at a unit vector,
/// flattened degree-major: (0,1), (1,1), (1,2), ..., (k,1), ..., (k,d(k)).
///
/// Index i within degree k ≥ 1 for d = 3: i = 1 is the zonal (m = 0)
/// harmonic; i = 2m, 2m+1 are the cos(mφ), sin(mφ) pair. For d = 2,
/// i = 1, 2 are cos(kθ)/√π, sin(kθ)/√π.
pub fn eval_basis_flat(d: Dimension, l_max: usize, x: &[f64; 3], out: &mut Vec<f64>) {
    out.clear();
    match d.get() {
        2 => {
            let theta = x[1].atan2(x[0]);
            out.push(1.0 / (2.0 * PI).sqrt());
            let norm = 1.0 / PI.sqrt();
            for k in 1..=l_max {
                let a = k as f64 * theta;
                out.push(a.cos() * norm);
                out.push(a.sin() * norm);
            }
        }
        3 => {
            let ct = x[2].clamp(-1.0, 1.0);
            let phi = x[1].atan2(x[0]);
            let mut table = Vec::new();
            assoc_legendre_table(l_max, ct, &mut table);
            let sqrt2 = std::f64::consts::SQRT_2;
            for (k, row) in table.iter().enumerate() {
                out.push(sh_norm(k, 0) * row[0]);
                for m in 1..=k {
                    let base = sqrt2 * sh_norm(k, m) * row[m];
                    let a = m as f64 * phi;
                    out.push(base * a.cos());
                    out.push(base * a.sin());
                }
            }
        }
        _ => unreachable!("grids restrict d to 2 or 3"),
    }
}

/// Value of the real orthonormal harmonic Y_k^i at a unit vector
/// (1-based index i within the degree).
pub fn basis_eval(d: Dimension, k: usize, i: usize, x: &[f64; 3]) -> Result<f64> {
    if d.get() != 2 && d.get() != 3 {
        return Err(Error::Unsupported(format!(
            "harmonic bases exist for d in {{2, 3}}, got d = {d}"
        )));
    }
    let dim = basis_dim(d, k);
    if i == 0 || i > dim {
        return Err(Error::Domain(format!(
            "basis index i = {i} out of range 1..={dim} for degree k = {k}"
        )));
    }
    let mut flat = Vec::new();
    eval_basis_flat(d, k, x, &mut flat);
    let offset: usize = (0..k).map(|j| basis_dim(d, j)).sum();
    Ok(flat[offset + i - 1])
}

/// Finite expansion {a_k^i} of a function on ∂B₁ in the real
/// orthonormal basis; the L² norm is the plain coefficient square sum.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoefficients {
    d: Dimension,
    entries: Vec<Vec<f64>>,
}

impl HarmonicCoefficients {
    pub fn zeros(d: Dimension, degree_max: usize) -> Self {
        let entries = (0..=degree_max).map(|k| vec![0.0; basis_dim(d, k)]).collect();
        HarmonicCoefficients { d, entries }
    }

    /// A single unit coefficient at (k, i).
    pub fn single(d: Dimension, k: usize, i: usize) -> Result<Self> {
        let mut c = Self::zeros(d, k);
        c.set(k, i, 1.0)?;
        Ok(c)
    }

    pub fn d(&self) -> Dimension {
        self.d
    }

    pub fn degree_max(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn get(&self, k: usize, i: usize) -> f64 {
        if k >= self.entries.len() || i == 0 || i > self.entries[k].len() {
            return 0.0;
        }
        self.entries[k][i - 1]
    }

    pub fn set(&mut self, k: usize, i: usize, value: f64) -> Result<()> {
        if k >= self.entries.len() {
            return Err(Error::Domain(format!(
                "degree {k} beyond expansion maximum {}",
                self.degree_max()
            )));
        }
        let dim = self.entries[k].len();
        if i == 0 || i > dim {
            return Err(Error::Domain(format!(
                "basis index i = {i} out of range 1..={dim} for degree k = {k}"
            )));
        }
        self.entries[k][i - 1] = value;
        Ok(())
    }

    /// Coefficients of one degree (empty past the expansion maximum).
    pub fn degree_slice(&self, k: usize) -> &[f64] {
        static EMPTY: [f64; 0] = [];
        self.entries.get(k).map_or(&EMPTY[..], |v| v.as_slice())
    }

    /// Σ (a_k^i)², the squared L² norm of the expansion.
    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().flatten().map(|a| a * a).sum()
    }

    /// Pointwise value Σ a_k^i Y_k^i(x) at an arbitrary unit vector.
    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        let mut flat = Vec::new();
        eval_basis_flat(self.d, self.degree_max(), x, &mut flat);
        flat.iter()
            .zip(self.entries.iter().flatten())
            .map(|(y, a)| y * a)
            .sum()
    }

    /// Zero out the degree-1 block (used by barycenter corrections).
    pub fn clear_degree_one(&mut self) {
        if self.entries.len() > 1 {
            for a in &mut self.entries[1] {
                *a = 0.0;
            }
        }
    }

    /// Add `delta` to the constant mode (shifts the function by
    /// delta / sqrt(d ω_d) pointwise... no: by delta · Y_0).
    pub fn shift_constant(&mut self, delta_a0: f64) {
        self.entries[0][0] += delta_a0;
    }

    /// True when only zonal (i = 1) coefficients are populated, so the
    /// function depends on the polar angle alone.
    pub fn is_zonal(&self) -> bool {
        self.entries
            .iter()
            .all(|row| row.iter().skip(1).all(|a| *a == 0.0))
    }

    /// Crude but safe sup-norm bound: Σ |a_k^i| · max|Y_k^i|.
    pub fn sup_bound(&self) -> f64 {
        let mut bound = 0.0;
        for (k, row) in self.entries.iter().enumerate() {
            // max over the sphere of an orthonormal degree-k harmonic is
            // at most sqrt(d(k) / surface area)
            let peak = (basis_dim(self.d, k) as f64
                / (self.d.as_f64() * unit_ball_volume(self.d.get())))
            .sqrt();
            bound += row.iter().map(|a| a.abs()).sum::<f64>() * peak;
        }
        bound
    }
}

/// Point values of a function at the nodes of a [`SphereGrid`].
#[derive(Debug, Clone)]
pub struct SphereFunction {
    pub values: Vec<f64>,
}

impl SphereFunction {
    pub fn from_fn(grid: &SphereGrid, mut f: impl FnMut(&[f64; 3]) -> f64) -> Self {
        SphereFunction { values: grid.nodes().iter().map(&mut f).collect() }
    }
}

/// Fourier coefficients a_k^i = ∫ u Y_k^i dH for 0 ≤ k ≤ l_max.
///
/// The grid must resolve the products: resolution ≥ l_max + 1 for d = 3
/// and ≥ 2·l_max + 1 nodes for d = 2; analysis is then exact on
/// band-limited inputs up to rounding.
pub fn analyze(u: &SphereFunction, grid: &SphereGrid, l_max: usize) -> Result<HarmonicCoefficients> {
    if u.values.len() != grid.len() {
        return Err(Error::Domain(format!(
            "function sampled on {} nodes, grid has {}",
            u.values.len(),
            grid.len()
        )));
    }
    let enough = match grid.d().get() {
        2 => grid.resolution() >= 2 * l_max + 1,
        _ => grid.resolution() >= l_max + 1,
    };
    if !enough {
        return Err(Error::Domain(format!(
            "grid resolution {} cannot resolve degree {l_max} analysis",
            grid.resolution()
        )));
    }
    let d = grid.d();
    let mut coeffs = HarmonicCoefficients::zeros(d, l_max);
    let mut flat = Vec::new();
    for ((x, w), v) in grid.nodes().iter().zip(grid.weights()).zip(&u.values) {
        eval_basis_flat(d, l_max, x, &mut flat);
        let wv = w * v;
        let mut idx = 0;
        for k in 0..=l_max {
            for i in 0..basis_dim(d, k) {
                coeffs.entries[k][i] += wv * flat[idx];
                idx += 1;
            }
        }
    }
    Ok(coeffs)
}

/// Pointwise synthesis Σ a_k^i Y_k^i at the grid nodes.
pub fn synthesize(coeffs: &HarmonicCoefficients, grid: &SphereGrid) -> SphereFunction {
    SphereFunction { values: grid.nodes().iter().map(|x| coeffs.eval(x)).collect() }
}

/// Kernel seminorm ∫∫ |x-y|^σ |u(x)-u(y)|² dH dH of a band-limited u,
/// through its diagonalization: Σ_k μ_k(σ) Σ_i (a_k^i)².
pub fn seminorm_spectral(
    coeffs: &HarmonicCoefficients,
    sigma: impl Into<KernelExponent>,
) -> Result<f64> {
    let sigma = sigma.into();
    let mut acc = 0.0;
    for k in 0..=coeffs.degree_max() {
        let s: f64 = coeffs.degree_slice(k).iter().map(|a| a * a).sum();
        if s != 0.0 {
            acc += mu_k(coeffs.d(), sigma, k as u64)? * s;
        }
    }
    Ok(acc)
}
