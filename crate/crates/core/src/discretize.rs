//! Grids, quadrature weights and the assembled spatial operators.
//!
//! The circle direction uses Fourier spectral differentiation (exact on every
//! resolved harmonic), the slab direction a uniform grid with s = 0 forced to
//! be a node. Trapezoid weights in s enter diagnostics only, never the solve.

use crate::error::{CoreError, Result};
use crate::geometry::{check_wick_domain, MetricFamily};
use crate::linalg::{C64, CMat};

/// Equispaced circle grid with spectral differentiation matrices and the
/// √h₀-weighted quadrature.
#[derive(Clone)]
pub struct CircleGrid {
    pub n: usize,
    pub y: Vec<f64>,
    /// (2π/N)·h₀(y_k)^{1/2}
    pub wy: Vec<f64>,
    /// First-derivative matrix with symbol ik, k = −N/2 … N/2−1.
    pub dy: CMat,
    /// Second-derivative matrix with symbol −k²; real by symbol symmetry.
    pub dy2: CMat,
}

impl CircleGrid {
    pub fn new(n: usize, family: &MetricFamily) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(CoreError::BadDiscretization(format!("N = {n} must be even and ≥ 2")));
        }
        let y: Vec<f64> = (0..n).map(|k| 2.0 * std::f64::consts::PI * k as f64 / n as f64).collect();
        family.validate(&y)?;
        let wy = y
            .iter()
            .map(|&yk| 2.0 * std::f64::consts::PI / n as f64 * family.h0.eval(yk).sqrt())
            .collect();
        let (dy, dy2) = fourier_diff(n);
        Ok(CircleGrid { n, y, wy, dy, dy2 })
    }
}

/// Spectral differentiation matrices from the DFT symbol, wavenumbers
/// −N/2 … N/2−1 (the unpaired Nyquist mode carries −N/2, which makes the
/// second-derivative symbol −k² correct on the sawtooth as well).
fn fourier_diff(n: usize) -> (CMat, CMat) {
    let nf = n as f64;
    let mut d = CMat::zeros(n, n);
    let mut d2 = CMat::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            let mut s1 = C64::new(0.0, 0.0);
            let mut s2 = C64::new(0.0, 0.0);
            for kk in 0..n {
                let k = if kk < n / 2 { kk as f64 } else { kk as f64 - nf };
                let phase = C64::new(0.0, k * 2.0 * std::f64::consts::PI * (j as f64 - l as f64) / nf).exp();
                s1 += C64::new(0.0, k) * phase;
                s2 += C64::new(-k * k, 0.0) * phase;
            }
            d[(j, l)] = s1 / nf;
            d2[(j, l)] = s2 / nf;
        }
    }
    (d, d2)
}

/// The (s, y) product grid for the slab Ω = (−T, T) × S¹.
#[derive(Clone)]
pub struct DiscreteDomain {
    pub t_half: f64,
    pub m: usize,
    pub circle: CircleGrid,
    /// M+1 nodes, s_j = −T + jΔs; symmetric, contains 0.
    pub s: Vec<f64>,
    /// Trapezoid weights on the s-grid (endpoints halved).
    pub ws: Vec<f64>,
    pub ds: f64,
}

impl DiscreteDomain {
    pub fn n(&self) -> usize {
        self.circle.n
    }

    /// Interior s-node count (Dirichlet rows eliminated).
    pub fn interior_slices(&self) -> usize {
        self.m - 1
    }

    pub fn interior_dim(&self) -> usize {
        (self.m - 1) * self.circle.n
    }

    /// Interior s-grid values, s_j for j = 1..M−1.
    pub fn s_interior(&self) -> &[f64] {
        &self.s[1..self.m]
    }

    /// Index of s = 0 within the interior ordering.
    pub fn s0_interior(&self) -> usize {
        self.m / 2 - 1
    }

    /// W_H norm of an interior slab function.
    pub fn wh_norm(&self, u: &[C64]) -> f64 {
        let n = self.circle.n;
        let mut acc = 0.0;
        for j in 0..self.interior_slices() {
            for k in 0..n {
                acc += self.ds * self.circle.wy[k] * u[j * n + k].norm_sqr();
            }
        }
        acc.sqrt()
    }
}

/// Builds grids and weights; rejects slabs outside the admissible range.
pub fn build_domain(t_half: f64, m: usize, n: usize, family: &MetricFamily) -> Result<DiscreteDomain> {
    if m < 4 || m % 2 != 0 {
        return Err(CoreError::BadDiscretization(format!("M = {m} must be even and ≥ 4")));
    }
    if n < 4 {
        return Err(CoreError::BadDiscretization(format!("N = {n} must be even and ≥ 4")));
    }
    if !(t_half > 0.0) {
        return Err(CoreError::BadDiscretization(format!("T = {t_half} must be positive")));
    }
    let circle = CircleGrid::new(n, family)?;
    let report = check_wick_domain(family, t_half, &circle.y)?;
    if !report.ok {
        return Err(CoreError::InadmissibleDomain {
            requested: t_half,
            max_admissible: report.max_admissible_t,
        });
    }
    let ds = 2.0 * t_half / m as f64;
    let s: Vec<f64> = (0..=m).map(|j| -t_half + j as f64 * ds).collect();
    let ws: Vec<f64> = (0..=m).map(|j| if j == 0 || j == m { 0.5 * ds } else { ds }).collect();
    Ok(DiscreteDomain { t_half, m, circle, s, ws, ds })
}

/// The spatial operator a(t) = −Δ_{h_t} + V and its reduction
/// a₀(t) = d a(t) d⁻¹ − r²/4 − ½∂_t r at one complex time.
#[derive(Clone)]
pub struct SpatialOperator {
    pub t: C64,
    pub a: CMat,
    pub a0: CMat,
}

/// Assembles a(t)u = −h_t^{-1/2} D_y (h_t^{-1/2} D_y u) + V u on the circle
/// grid, plus the reduced a₀(t).
pub fn assemble_spatial(circle: &CircleGrid, family: &MetricFamily, t: C64) -> Result<SpatialOperator> {
    let sample = family.coeffs_at(t, &circle.y)?;
    let hinv_sqrt: Vec<C64> = sample.h.iter().map(|h| 1.0 / h.sqrt()).collect();
    let n = circle.n;
    let inner = circle.dy.scale_rows(&hinv_sqrt); // h^{-1/2} D_y
    let mut a = inner.matmul(&inner).scale(C64::new(-1.0, 0.0));
    for k in 0..n {
        a[(k, k)] += C64::new(family.potential(circle.y[k]), 0.0);
    }
    // d(t) is spatially constant for these families, so the conjugation
    // d a d⁻¹ reduces to a itself and only the shift survives.
    let mut a0 = a.clone();
    a0.add_diag(sample.a0_shift);
    Ok(SpatialOperator { t, a, a0 })
}

/// Diagonal weight operators for the slab (interior nodes) and for Cauchy
/// data pairs.
#[derive(Clone)]
pub struct InnerProducts {
    /// ws_j · wy_k over interior nodes, s-major.
    pub w_h: Vec<f64>,
    /// wy duplicated over the two Cauchy components.
    pub w_s: Vec<f64>,
}

pub fn inner_products(domain: &DiscreteDomain) -> InnerProducts {
    let n = domain.circle.n;
    let mut w_h = Vec::with_capacity(domain.interior_dim());
    for j in 1..domain.m {
        for k in 0..n {
            w_h.push(domain.ws[j] * domain.circle.wy[k]);
        }
    }
    let mut w_s = Vec::with_capacity(2 * n);
    w_s.extend_from_slice(&domain.circle.wy);
    w_s.extend_from_slice(&domain.circle.wy);
    InnerProducts { w_h, w_s }
}
