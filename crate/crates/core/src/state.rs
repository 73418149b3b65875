//! Cauchy-surface covariances λ± = ±q∘C± and the quasi-free state
//! certificates: the commutator identity λ⁺ − λ⁻ = q, positivity of the
//! weighted Hermitian forms, and purity through G = Λ^{−1/2} q Λ^{−1/2}.

use crate::calderon::{weighted_norm2, BoundaryMatrices, CalderonPair};
use crate::error::{CoreError, Result};
use crate::linalg::{eigh, C64, CMat};

pub struct StateCovariances {
    /// λ⁺ = qC⁺ and λ⁻ = −qC⁻ as operators on Cauchy data.
    pub lambda_plus: CMat,
    pub lambda_minus: CMat,
    pub q: CMat,
    pub w_s: Vec<f64>,
}

pub fn covariances(pair: &CalderonPair, mats: &BoundaryMatrices, w_s: &[f64]) -> StateCovariances {
    let q = mats.q();
    StateCovariances {
        lambda_plus: q.matmul(&pair.c_plus),
        lambda_minus: q.matmul(&pair.c_minus).scale(C64::new(-1.0, 0.0)),
        q,
        w_s: w_s.to_vec(),
    }
}

impl StateCovariances {
    /// ‖λ⁺ − λ⁻ − q‖ / ‖q‖ in the weighted operator norm.
    pub fn ccr_defect(&self) -> f64 {
        let diff = self.lambda_plus.sub(&self.lambda_minus).sub(&self.q);
        weighted_norm2(&diff, &self.w_s) / weighted_norm2(&self.q, &self.w_s)
    }

    /// c± = ±q⁻¹λ±; with q² = 1 this is q·λ±.
    pub fn c_plus(&self) -> CMat {
        self.q.matmul(&self.lambda_plus)
    }

    pub fn c_minus(&self) -> CMat {
        self.q.matmul(&self.lambda_minus).scale(C64::new(-1.0, 0.0))
    }

    /// Real covariance η = ½ Re(λ⁺ + λ⁻).
    pub fn eta(&self) -> CMat {
        let sum = self.lambda_plus.add(&self.lambda_minus);
        CMat::from_fn(sum.nrows(), sum.ncols(), |i, j| C64::new(0.5 * sum[(i, j)].re, 0.0))
    }

    /// Hermitian form matrices W_S λ± and W_S q.
    fn forms(&self) -> (CMat, CMat, CMat) {
        let w: Vec<C64> = self.w_s.iter().map(|&x| C64::new(x, 0.0)).collect();
        (
            self.lambda_plus.scale_rows(&w),
            self.lambda_minus.scale_rows(&w),
            self.q.scale_rows(&w),
        )
    }

    /// Smallest eigenvalues of Herm(W_S λ±), with the norms for flooring.
    pub fn positivity_floor(&self) -> (f64, f64, f64, f64) {
        let (lp, lm, _) = self.forms();
        let hp = lp.add(&lp.adjoint()).scale(C64::new(0.5, 0.0));
        let hm = lm.add(&lm.adjoint()).scale(C64::new(0.5, 0.0));
        let (ep, _) = eigh(&hp);
        let (em, _) = eigh(&hm);
        (ep[0], em[0], lp.norm2(), lm.norm2())
    }

    /// ‖G² − 1‖ for G = Λ^{−1/2} q Λ^{−1/2}, Λ = Herm(λ⁺ + λ⁻) as forms.
    /// Zero iff the supremum characterization of purity is attained.
    pub fn purity_defect(&self) -> Result<f64> {
        let (lp, lm, qf) = self.forms();
        let sum = lp.add(&lm);
        let lam = sum.add(&sum.adjoint()).scale(C64::new(0.5, 0.0));
        let (ev, vecs) = eigh(&lam);
        let scale = ev[ev.len() - 1].abs().max(f64::MIN_POSITIVE);
        if ev[0] <= 1e-12 * scale {
            return Err(CoreError::DegenerateState(format!(
                "Herm(λ⁺+λ⁻) has eigenvalue {} (scale {})",
                ev[0], scale
            )));
        }
        let inv_sqrt: Vec<C64> = ev.iter().map(|&l| C64::new(1.0 / l.sqrt(), 0.0)).collect();
        let lam_inv_sqrt = vecs
            .scale_cols(&inv_sqrt)
            .matmul(&vecs.adjoint());
        let g = lam_inv_sqrt.matmul(&qf).matmul(&lam_inv_sqrt);
        let n = g.nrows();
        Ok(g.matmul(&g).sub(&CMat::identity(n)).norm2())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calderon::{boundary_matrices, calderon_pair, identity_report, trace_maps};
    use crate::discretize::{build_domain, inner_products};
    use crate::elliptic::assemble_k0;
    use crate::geometry::{MetricFamily, TrigPoly};
    use crate::oracle;

    fn exact_pair(n: usize, t: f64) -> (StateCovariances, crate::oracle::ModeSpectrum) {
        let sp = oracle::mode_spectrum(&TrigPoly::constant(1.0), &TrigPoly::zero(), 1.0, n).unwrap();
        let (cp, cm) = oracle::oracle_pair(&sp, t);
        let mats = BoundaryMatrices {
            n,
            dt_d0: 0.0,
            rho: C64::new(0.0, 0.0),
            sign_resolution: 1.0,
        };
        let pair = CalderonPair {
            c_plus: cp,
            c_minus: cm,
            c0_plus: CMat::zeros(2 * n, 2 * n),
            c0_minus: CMat::zeros(2 * n, 2 * n),
            ds: 0.0,
            sign_resolution: 1.0,
        };
        let w_s = vec![2.0 * std::f64::consts::PI / n as f64; 2 * n];
        (covariances(&pair, &mats, &w_s), sp)
    }

    #[test]
    fn exact_covariance_blocks() {
        let (cov, sp) = exact_pair(8, 1.0);
        // λ⁺ per mode = ½[[ε coth, 1],[1, ε⁻¹ tanh]]
        let pinv = sp.modes_inv();
        for (k, &eps) in sp.eps.iter().enumerate() {
            let mode = sp.modes.col(k);
            let mut f = vec![C64::new(0.0, 0.0); 16];
            f[..8].copy_from_slice(&mode);
            let out = cov.lambda_plus.matvec(&f);
            let l00 = pinv.matvec(&out[..8])[k];
            let l10 = pinv.matvec(&out[8..])[k];
            let th = (eps as f64).tanh();
            assert!((l00 - C64::new(0.5 * eps / th, 0.0)).norm() < 1e-12);
            assert!((l10 - C64::new(0.5, 0.0)).norm() < 1e-12);
        }
        assert!(cov.ccr_defect() < 1e-13);
        let (ep, em, _, _) = cov.positivity_floor();
        assert!(ep > -1e-13 && em > -1e-13);
        // c⁺ + c⁻ = 1
        let sum = cov.c_plus().add(&cov.c_minus()).sub(&CMat::identity(16));
        assert!(sum.norm2() < 1e-13);
        // per mode η = ½ diag(ε coth(Tε), ε⁻¹ tanh(Tε)) in the mode basis
        let eta = cov.eta();
        let mode0 = sp.modes.col(0);
        let mut f = vec![C64::new(0.0, 0.0); 16];
        f[..8].copy_from_slice(&mode0);
        let out = eta.matvec(&f);
        let e00 = pinv.matvec(&out[..8])[0];
        assert!((e00 - C64::new(0.5 / 1.0f64.tanh(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ground_state_eigenvalues() {
        // λ⁺ for the ground-state block at mode ε: eigenvalues {0, (ε+ε⁻¹)/2}
        let eps = 2.0;
        let gs = oracle::ground_state_projector(eps);
        let q2 = CMat::from_fn(2, 2, |i, j| {
            if i != j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let lp = q2.matmul(&gs);
        let h = lp.add(&lp.adjoint()).scale(C64::new(0.5, 0.0));
        let (ev, _) = eigh(&h);
        assert!(ev[0].abs() < 1e-14);
        assert!((ev[1] - 0.5 * (eps + 1.0 / eps)).abs() < 1e-14);
    }

    #[test]
    fn exact_pair_is_pure_and_thermal_control() {
        let (cov, _) = exact_pair(8, 1.3);
        assert!(cov.purity_defect().unwrap() < 1e-12);
        // thermal scaling Λ → (1+2n)Λ with n = ½ gives defect 1 − (1+2n)⁻² = ¾
        let nocc = 0.5;
        let scale = C64::new(1.0 + 2.0 * nocc, 0.0);
        let thermal = StateCovariances {
            lambda_plus: cov.lambda_plus.scale(scale),
            lambda_minus: cov.lambda_minus.scale(scale),
            q: cov.q.clone(),
            w_s: cov.w_s.clone(),
        };
        let defect = thermal.purity_defect().unwrap();
        assert!((defect - 0.75).abs() < 1e-6, "thermal defect {defect}");
        // c = 2 scaling: defect = 1 − c⁻² = ¾ as well
        let doubled = StateCovariances {
            lambda_plus: cov.lambda_plus.scale(C64::new(2.0, 0.0)),
            lambda_minus: cov.lambda_minus.scale(C64::new(2.0, 0.0)),
            q: cov.q.clone(),
            w_s: cov.w_s.clone(),
        };
        assert!((doubled.purity_defect().unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn degenerate_covariance_is_an_error() {
        let (cov, _) = exact_pair(4, 1.0);
        let zeroed = StateCovariances {
            lambda_plus: CMat::zeros(8, 8),
            lambda_minus: CMat::zeros(8, 8),
            q: cov.q.clone(),
            w_s: cov.w_s.clone(),
        };
        assert!(matches!(zeroed.purity_defect(), Err(CoreError::DegenerateState(_))));
    }

    #[test]
    fn corrupted_lambda_fails_ccr() {
        let (cov, _) = exact_pair(8, 1.0);
        let bad = StateCovariances {
            lambda_plus: cov.lambda_plus.clone(),
            lambda_minus: cov.lambda_minus.scale(C64::new(1.1, 0.0)),
            q: cov.q.clone(),
            w_s: cov.w_s.clone(),
        };
        assert!(bad.ccr_defect() >= 0.05);
    }

    #[test]
    fn numerical_baseline_covariances() {
        let fam = MetricFamily::ultrastatic(TrigPoly::constant(1.0), TrigPoly::zero(), 1.0);
        let d = build_domain(1.0, 200, 8, &fam).unwrap();
        let inner = inner_products(&d);
        let tr = trace_maps(&d, &inner);
        let mats = boundary_matrices(&fam, &d).unwrap();
        let real = assemble_k0(&d, &fam).unwrap();
        let pair = calderon_pair(&real, &tr, &mats).unwrap();
        let cov = covariances(&pair, &mats, &inner.w_s);
        let rep = identity_report(&pair, &mats, &inner.w_s);
        // ccr defect equals the sum defect by construction
        assert!((cov.ccr_defect() - rep.sum_defect).abs() < 1e-10);
        assert!(cov.ccr_defect() <= 5e-3);
        assert!(cov.purity_defect().unwrap() <= 1e-2);
    }

    #[test]
    fn purity_defect_converges_at_order_2() {
        let fam = MetricFamily::ultrastatic(TrigPoly::constant(1.0), TrigPoly::zero(), 1.0);
        let defects: Vec<f64> = [100usize, 200]
            .iter()
            .map(|&m| {
                let d = build_domain(1.0, m, 8, &fam).unwrap();
                let inner = inner_products(&d);
                let tr = trace_maps(&d, &inner);
                let mats = boundary_matrices(&fam, &d).unwrap();
                let real = assemble_k0(&d, &fam).unwrap();
                let pair = calderon_pair(&real, &tr, &mats).unwrap();
                covariances(&pair, &mats, &inner.w_s).purity_defect().unwrap()
            })
            .collect();
        let ratio = defects[0] / defects[1];
        assert!((3.0..5.0).contains(&ratio), "purity order-2 ratio {ratio}");
    }
}
