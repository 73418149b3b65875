//! Mode-by-mode closed forms for the ultra-static slab: the Dirichlet inverse
//! on (−T, T), the boundary projector ½[[1, ε⁻¹tanh(Tε)],[ε·coth(Tε), 1]],
//! and its T → ∞ ground-state limit. Everything here is independent of the
//! finite-difference solve path and serves as its ground truth.

use crate::discretize::{assemble_spatial, CircleGrid};
use crate::error::{CoreError, Result};
use crate::geometry::{MetricFamily, TrigPoly};
use crate::linalg::{eigh, C64, CMat};
use crate::quad::integrate;

/// Spectrum of a = −Δ_{h₀} + V on the circle with W_y-orthonormal modes.
pub struct ModeSpectrum {
    /// ε_k > 0 ascending, ε_k² the eigenvalues of a.
    pub eps: Vec<f64>,
    /// Columns are the modes, orthonormal in the wy-weighted inner product.
    pub modes: CMat,
    pub wy: Vec<f64>,
    /// The spatial matrix the spectrum was computed from.
    pub a: CMat,
}

pub fn mode_spectrum(h0: &TrigPoly, v: &TrigPoly, msq: f64, n: usize) -> Result<ModeSpectrum> {
    if !(msq > 0.0) {
        return Err(CoreError::OracleDomain(format!("m² = {msq} must be strictly positive")));
    }
    let family = MetricFamily::ultrastatic(h0.clone(), v.clone(), msq);
    let circle = CircleGrid::new(n, &family)?;
    let a = assemble_spatial(&circle, &family, C64::new(0.0, 0.0))?.a;
    let wsqrt: Vec<C64> = circle.wy.iter().map(|&w| C64::new(w.sqrt(), 0.0)).collect();
    let winv_sqrt: Vec<C64> = circle.wy.iter().map(|&w| C64::new(1.0 / w.sqrt(), 0.0)).collect();
    let sym = a.scale_rows(&wsqrt).scale_cols(&winv_sqrt);
    let herm = sym.add(&sym.adjoint()).scale(C64::new(0.5, 0.0));
    let (lam, vecs) = eigh(&herm);
    if lam[0] <= 0.0 {
        return Err(CoreError::OracleDomain(format!(
            "nonpositive spatial eigenvalue {}",
            lam[0]
        )));
    }
    let eps = lam.iter().map(|&l| l.sqrt()).collect();
    let modes = vecs.scale_rows(&winv_sqrt);
    Ok(ModeSpectrum { eps, modes, wy: circle.wy, a })
}

impl ModeSpectrum {
    pub fn n(&self) -> usize {
        self.eps.len()
    }

    /// Φ† W_y, the inverse of the mode matrix under W_y-orthonormality.
    pub fn modes_inv(&self) -> CMat {
        let w: Vec<C64> = self.wy.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.modes.adjoint().scale_cols(&w)
    }

    /// Coefficients of a grid function in the mode basis.
    pub fn project(&self, u: &[C64]) -> Vec<C64> {
        self.modes_inv().matvec(u)
    }
}

/// Evaluates K_Ω⁻¹v = u − r for a single mode: u is the whole-line
/// convolution with (2ε)⁻¹e^{−|s−σ|ε}, r the boundary correction restoring
/// Dirichlet values at s = ±T. Quadrature is adaptive to relative 1e−10.
pub fn kinv_closed_form(
    eps: f64,
    t_half: f64,
    v: &dyn Fn(f64) -> C64,
    s_eval: &[f64],
) -> Vec<C64> {
    let tol = 1e-10;
    let vplus = integrate(&|s: f64| v(s) * (s * eps).exp(), -t_half, t_half, tol);
    let vminus = integrate(&|s: f64| v(s) * (-s * eps).exp(), -t_half, t_half, tol);
    // r(s) = α e^{sε} + β e^{−sε} with r(±T) = u(±T); written in the
    // overflow-free form with every exponent nonpositive on the slab.
    let denom = 1.0 - (-4.0 * t_half * eps).exp();
    let half_inv = 1.0 / (2.0 * eps);
    s_eval
        .iter()
        .map(|&s| {
            let left = integrate(&|sig: f64| v(sig) * (-(s - sig) * eps).exp(), -t_half, s, tol);
            let right = integrate(&|sig: f64| v(sig) * ((s - sig) * eps).exp(), s, t_half, tol);
            let u = (left + right) * half_inv;
            let r = ((vplus - vminus * (-2.0 * t_half * eps).exp()) * ((s - 2.0 * t_half) * eps).exp()
                + (vminus - vplus * (-2.0 * t_half * eps).exp())
                    * (-(s + 2.0 * t_half) * eps).exp())
                * (half_inv / denom);
            u - r
        })
        .collect()
}

/// ½[[1, ε⁻¹tanh(Tε)],[ε·coth(Tε), 1]] as a 2×2 matrix on (value, −∂_s) data.
pub fn calderon_closed_form(eps: f64, t_half: f64) -> CMat {
    let th = (t_half * eps).tanh();
    let mut c = CMat::zeros(2, 2);
    c[(0, 0)] = C64::new(0.5, 0.0);
    c[(0, 1)] = C64::new(0.5 * th / eps, 0.0);
    c[(1, 0)] = C64::new(0.5 * eps / th, 0.0);
    c[(1, 1)] = C64::new(0.5, 0.0);
    c
}

/// ½[[1, ε⁻¹],[ε, 1]], the T → ∞ limit.
pub fn ground_state_projector(eps: f64) -> CMat {
    let mut c = CMat::zeros(2, 2);
    c[(0, 0)] = C64::new(0.5, 0.0);
    c[(0, 1)] = C64::new(0.5 / eps, 0.0);
    c[(1, 0)] = C64::new(0.5 * eps, 0.0);
    c[(1, 1)] = C64::new(0.5, 0.0);
    c
}

/// Rotates per-mode 2×2 blocks into the grid basis: the result acts on
/// stacked Cauchy data (f₀; f₁) exactly like the numerically computed pair.
pub fn assemble_pair_on_grid(spectrum: &ModeSpectrum, blocks: &[CMat]) -> CMat {
    let n = spectrum.n();
    assert_eq!(blocks.len(), n);
    let pinv = spectrum.modes_inv();
    let mut out = CMat::zeros(2 * n, 2 * n);
    for (bi, bj) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let d: Vec<C64> = blocks.iter().map(|b| b[(bi, bj)]).collect();
        let m = spectrum.modes.scale_cols(&d).matmul(&pinv);
        for i in 0..n {
            for j in 0..n {
                out[(bi * n + i, bj * n + j)] = m[(i, j)];
            }
        }
    }
    out
}

/// The exact projector pair (C⁺, C⁻ = 1 − C⁺) in the grid basis.
pub fn oracle_pair(spectrum: &ModeSpectrum, t_half: f64) -> (CMat, CMat) {
    let blocks: Vec<CMat> =
        spectrum.eps.iter().map(|&e| calderon_closed_form(e, t_half)).collect();
    let cplus = assemble_pair_on_grid(spectrum, &blocks);
    let cminus = CMat::identity(2 * spectrum.n()).sub(&cplus);
    (cplus, cminus)
}
