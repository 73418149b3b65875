//! Dirichlet realization of the Wick-rotated operator on the slab.
//!
//! K₀ = −∂_s² + a₀(is, y, ∂_y) with homogeneous Dirichlet rows at s = ±T
//! eliminated, stored block-tridiagonally in s and factorized once. The
//! unreduced operator K = −∂_s² − i r(is)∂_s + a(is) is carried as a
//! cross-check: its s-part is realized through the exact rewriting
//! −∂_s² − i r̂ ∂_s = −d̂⁻¹ ∂_s² d̂ + (i r̂′/2 − r̂²/4), which is how the
//! conjugation d̂ K d̂⁻¹ = K₀ survives discretization at roundoff level.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::discretize::{assemble_spatial, DiscreteDomain, InnerProducts};
use crate::error::{CoreError, Result};
use crate::geometry::MetricFamily;
use crate::linalg::{BlockTridiag, BtdFactorization, C64, CMat};

pub struct EllipticRealization {
    pub k0: BlockTridiag,
    pub factorization: BtdFactorization,
    pub m: usize,
    pub n: usize,
    pub ds: f64,
    pub s_interior: Vec<f64>,
    /// d̂(s_j) on interior slices.
    pub dhat: Vec<C64>,
    pub wy: Vec<f64>,
}

fn interior_blocks(
    domain: &DiscreteDomain,
    family: &MetricFamily,
    sample_shift: f64,
) -> Result<(Vec<CMat>, Vec<CMat>, Vec<CMat>)> {
    let n = domain.n();
    let ds2 = domain.ds * domain.ds;
    let slices = domain.interior_slices();
    let mut diag = Vec::with_capacity(slices);
    for &sj in domain.s_interior() {
        let op = assemble_spatial(&domain.circle, family, C64::new(0.0, sj + sample_shift))?;
        let mut blk = op.a0;
        blk.add_diag(C64::new(2.0 / ds2, 0.0));
        diag.push(blk);
    }
    let off = CMat::identity(n).scale(C64::new(-1.0 / ds2, 0.0));
    let lower = vec![off.clone(); slices - 1];
    let upper = vec![off; slices - 1];
    Ok((diag, lower, upper))
}

/// Assembles and factorizes K₀ on an admissible domain.
pub fn assemble_k0(domain: &DiscreteDomain, family: &MetricFamily) -> Result<EllipticRealization> {
    let (diag, lower, upper) = interior_blocks(domain, family, 0.0)?;
    let k0 = BlockTridiag::new(diag, lower, upper);
    let factorization = k0.factor().ok_or(CoreError::SingularFactorization)?;
    let dhat = domain
        .s_interior()
        .iter()
        .map(|&sj| family.d_coeff(C64::new(0.0, sj)))
        .collect();
    Ok(EllipticRealization {
        k0,
        factorization,
        m: domain.m,
        n: domain.n(),
        ds: domain.ds,
        s_interior: domain.s_interior().to_vec(),
        dhat,
        wy: domain.circle.wy.clone(),
    })
}

/// Same assembly with the coefficient samples displaced in s; breaks the
/// reflection symmetry on purpose (negative control for `reflection_defect`).
pub fn assemble_k0_desymmetrized(
    domain: &DiscreteDomain,
    family: &MetricFamily,
    sample_shift: f64,
) -> Result<EllipticRealization> {
    let (diag, lower, upper) = interior_blocks(domain, family, sample_shift)?;
    let k0 = BlockTridiag::new(diag, lower, upper);
    let factorization = k0.factor().ok_or(CoreError::SingularFactorization)?;
    let dhat = domain
        .s_interior()
        .iter()
        .map(|&sj| family.d_coeff(C64::new(0.0, sj + sample_shift)))
        .collect();
    Ok(EllipticRealization {
        k0,
        factorization,
        m: domain.m,
        n: domain.n(),
        ds: domain.ds,
        s_interior: domain.s_interior().to_vec(),
        dhat,
        wy: domain.circle.wy.clone(),
    })
}

impl EllipticRealization {
    pub fn interior_dim(&self) -> usize {
        (self.m - 1) * self.n
    }

    /// Solves K₀ u = rhs on interior nodes.
    pub fn solve_k0(&self, rhs: &[C64]) -> Result<Vec<C64>> {
        if rhs.len() != self.interior_dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.interior_dim(),
                got: rhs.len(),
            });
        }
        Ok(self.factorization.solve(rhs))
    }

    /// ‖W_H⁻¹ K₀† W_H − Π K₀ Π‖ / ‖K₀‖ with Π the s-reflection. The pure
    /// second-difference part is reflection-invariant and cancels exactly, so
    /// the defect is computed slice-wise on the spatial blocks.
    pub fn reflection_defect(&self) -> f64 {
        let slices = self.m - 1;
        let w: Vec<C64> = self.wy.iter().map(|&x| C64::new(x, 0.0)).collect();
        let winv: Vec<C64> = self.wy.iter().map(|&x| C64::new(1.0 / x, 0.0)).collect();
        let mut worst: f64 = 0.0;
        for j in 0..slices {
            let adj = self.k0.diag[j].adjoint().scale_rows(&winv).scale_cols(&w);
            let refl = &self.k0.diag[slices - 1 - j];
            worst = worst.max(adj.sub(refl).norm2());
        }
        worst / self.k0.norm2_est()
    }

    /// Hermitian-part certificate for the weighted realization W_H K₀ and the
    /// sampled numerical-range angle max |Im q|/Re q.
    pub fn sectoriality_defect(&self, inner: &InnerProducts, seed: u64) -> SectorialityReport {
        let n = self.n;
        let slices = self.m - 1;
        let wh_block: Vec<C64> = (0..n).map(|k| C64::new(self.ds * self.wy[k], 0.0)).collect();
        let wh_full: Vec<C64> = (0..slices).flat_map(|_| wh_block.clone()).collect();
        debug_assert_eq!(inner.w_h.len(), wh_full.len());
        let ones = vec![C64::new(1.0, 0.0); wh_full.len()];
        let weighted = self.k0.diag_conjugate(&wh_full, &ones);
        let herm = weighted.herm_part();
        let min_herm_eig = herm.herm_min_eig();

        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let dim = self.interior_dim();
        let mut angle: f64 = 0.0;
        for _ in 0..1000 {
            let mut v: Vec<C64> = (0..dim)
                .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in v.iter_mut() {
                *z /= nv;
            }
            let kv = weighted.matvec(&v);
            let q: C64 = v.iter().zip(&kv).map(|(a, b)| a.conj() * b).sum();
            if q.re <= 0.0 {
                angle = f64::INFINITY;
            } else {
                angle = angle.max(q.im.abs() / q.re);
            }
        }
        SectorialityReport { min_herm_eig, numerical_range_angle: angle }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SectorialityReport {
    pub min_herm_eig: f64,
    pub numerical_range_angle: f64,
}

/// The unreduced Wick-rotated operator, assembled from the raw spatial
/// operator a(is) and the coefficients r̂, d̂ — with ∂_s r̂ taken by finite
/// differences rather than from the closed-form shift, so the conjugation
/// check against K₀ is not a tautology.
pub struct UnreducedRealization {
    pub k: BlockTridiag,
    pub factorization: BtdFactorization,
    pub dhat: Vec<C64>,
}

pub fn assemble_k(domain: &DiscreteDomain, family: &MetricFamily) -> Result<UnreducedRealization> {
    let n = domain.n();
    let ds2 = domain.ds * domain.ds;
    let slices = domain.interior_slices();
    let rhat = |s: f64| family.r_coeff(C64::new(0.0, s));
    let mut diag = Vec::with_capacity(slices);
    let mut dhat = Vec::with_capacity(slices);
    for &sj in domain.s_interior() {
        let op = assemble_spatial(&domain.circle, family, C64::new(0.0, sj))?;
        let mut blk = op.a;
        // five-point derivative of r̂ along s
        let h = 1e-3;
        let dr = (rhat(sj - 2.0 * h) - rhat(sj - h) * 8.0 + rhat(sj + h) * 8.0
            - rhat(sj + 2.0 * h))
            / (12.0 * h);
        let rj = rhat(sj);
        blk.add_diag(C64::new(2.0 / ds2, 0.0) + C64::new(0.0, 0.5) * dr - rj * rj * 0.25);
        diag.push(blk);
        dhat.push(family.d_coeff(C64::new(0.0, sj)));
    }
    let mut lower = Vec::with_capacity(slices - 1);
    let mut upper = Vec::with_capacity(slices - 1);
    for j in 0..slices - 1 {
        // couplings of −d̂⁻¹ D_s² d̂
        lower.push(CMat::identity(n).scale(-(dhat[j] / dhat[j + 1]) / ds2));
        upper.push(CMat::identity(n).scale(-(dhat[j + 1] / dhat[j]) / ds2));
    }
    let k = BlockTridiag::new(diag, lower, upper);
    let factorization = k.factor().ok_or(CoreError::SingularFactorization)?;
    Ok(UnreducedRealization { k, factorization, dhat })
}

/// ‖d̂ K d̂⁻¹ − K₀‖ / ‖K₀‖ computed block-wise.
pub fn dhat_conjugation_defect(unreduced: &UnreducedRealization, reduced: &EllipticRealization) -> f64 {
    let n = reduced.n;
    let full: Vec<C64> = unreduced.dhat.iter().flat_map(|&d| vec![d; n]).collect();
    let full_inv: Vec<C64> = full.iter().map(|d| 1.0 / d).collect();
    let conj = unreduced.k.diag_conjugate(&full, &full_inv);
    let slices = reduced.m - 1;
    let mut worst: f64 = 0.0;
    for j in 0..slices {
        worst = worst.max(conj.diag[j].sub(&reduced.k0.diag[j]).norm2());
        if j + 1 < slices {
            worst = worst.max(conj.lower[j].sub(&reduced.k0.lower[j]).norm2());
            worst = worst.max(conj.upper[j].sub(&reduced.k0.upper[j]).norm2());
        }
    }
    worst / reduced.k0.norm2_est()
}
