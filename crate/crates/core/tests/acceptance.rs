//! Acceptance suite: each test checks one release criterion at its stated
//! tolerance and prints a single pass/fail line (run with `-- --nocapture`
//! to see them all).

use calderon_core::calderon::{
    boundary_matrices, calderon_pair, green_identity_defect, identity_report, trace_maps,
    CalderonPair,
};
use calderon_core::discretize::{build_domain, inner_products, DiscreteDomain};
use calderon_core::elliptic::{assemble_k, assemble_k0, dhat_conjugation_defect};
use calderon_core::error::CoreError;
use calderon_core::evolve::{auto_dt, cauchy_solve, frequency_probe, CauchyDatum};
use calderon_core::geometry::{MetricFamily, TrigPoly};
use calderon_core::linalg::{C64, CMat};
use calderon_core::oracle::{
    calderon_closed_form, ground_state_projector, mode_spectrum, oracle_pair, ModeSpectrum,
};
use calderon_core::state::{covariances, StateCovariances};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;

fn unit_family() -> MetricFamily {
    MetricFamily::ultrastatic(TrigPoly::constant(1.0), TrigPoly::zero(), 1.0)
}

fn exp_family() -> MetricFamily {
    MetricFamily::exponential(TrigPoly::constant(1.0), TrigPoly::zero(), 1.0, 0.2)
}

struct Pipeline {
    domain: DiscreteDomain,
    w_s: Vec<f64>,
    pair: CalderonPair,
    report: calderon_core::calderon::IdentityReport,
}

fn pipeline(family: &MetricFamily, t_half: f64, m: usize, n: usize) -> Pipeline {
    let domain = build_domain(t_half, m, n, family).expect("admissible domain");
    let inner = inner_products(&domain);
    let traces = trace_maps(&domain, &inner);
    let mats = boundary_matrices(family, &domain).expect("boundary matrices");
    let real = assemble_k0(&domain, family).expect("realization");
    let pair = calderon_pair(&real, &traces, &mats).expect("pair");
    let report = identity_report(&pair, &mats, &inner.w_s);
    Pipeline { domain, w_s: inner.w_s, pair, report }
}

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!("[{}] {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

/// Worst relative entry error of the per-mode 2×2 blocks of C⁺ against the
/// closed form.
fn mode_block_error(pair: &CalderonPair, spectrum: &ModeSpectrum, t_half: f64) -> f64 {
    let n = spectrum.n();
    let pinv = spectrum.modes_inv();
    let mut worst: f64 = 0.0;
    for (k, &eps) in spectrum.eps.iter().enumerate() {
        let mode = spectrum.modes.col(k);
        let exact = calderon_closed_form(eps, t_half);
        for comp in 0..2 {
            let mut f = vec![C64::new(0.0, 0.0); 2 * n];
            f[comp * n..(comp + 1) * n].copy_from_slice(&mode);
            let out = pair.c_plus.matvec(&f);
            let b0 = pinv.matvec(&out[..n])[k];
            let b1 = pinv.matvec(&out[n..])[k];
            worst = worst.max((b0 - exact[(0, comp)]).norm() / exact[(0, comp)].norm());
            worst = worst.max((b1 - exact[(1, comp)]).norm() / exact[(1, comp)].norm());
        }
    }
    worst
}

#[test]
fn criterion_1_oracle_match() {
    let start = std::time::Instant::now();
    let fam = unit_family();
    let sp = mode_spectrum(&fam.h0, &fam.v, fam.msq, 16).unwrap();
    let coarse = pipeline(&fam, 1.0, 200, 16);
    let fine = pipeline(&fam, 1.0, 400, 16);
    let e200 = mode_block_error(&coarse.pair, &sp, 1.0);
    let e400 = mode_block_error(&fine.pair, &sp, 1.0);
    let ratio = e200 / e400;
    let elapsed = start.elapsed().as_secs_f64();
    let pass = e200 <= 5e-3 && (3.0..=5.0).contains(&ratio) && elapsed <= 60.0;
    verdict(
        "criterion 1 oracle match",
        pass,
        &format!("max rel entry error {e200:.3e} (tol 5e-3), refinement ratio {ratio:.2} in [3,5], runtime {elapsed:.1}s"),
    );
}

#[test]
fn criterion_2_sum_identity() {
    let mut all = true;
    let mut detail = String::new();
    for (name, fam, t_half) in
        [("ultrastatic", unit_family(), 1.0), ("exponential", exp_family(), 2.0)]
    {
        let base = pipeline(&fam, t_half, 200, 16);
        let fine = pipeline(&fam, t_half, 400, 16);
        let ratio = base.report.sum_defect / fine.report.sum_defect;
        let ok = base.report.sum_defect <= 5e-3 && (3.0..=5.0).contains(&ratio);
        all &= ok;
        detail.push_str(&format!(
            "{name}: defect {:.3e} (tol 5e-3) ratio {ratio:.2}; ",
            base.report.sum_defect
        ));
    }
    verdict("criterion 2 sum identity", all, &detail);
}

#[test]
fn criterion_3_positivity() {
    let mut all = true;
    let mut detail = String::new();
    for (name, fam, t_half) in
        [("ultrastatic", unit_family(), 1.0), ("exponential", exp_family(), 2.0)]
    {
        let p = pipeline(&fam, t_half, 200, 16);
        let floor_p = -1e-6 * p.report.pos_norm_plus;
        let floor_m = -1e-6 * p.report.pos_norm_minus;
        let ok = p.report.pos_min_eig_plus >= floor_p && p.report.pos_min_eig_minus >= floor_m;
        all &= ok;
        detail.push_str(&format!(
            "{name}: min eig ± = {:.2e}/{:.2e} ≥ {:.2e}; ",
            p.report.pos_min_eig_plus, p.report.pos_min_eig_minus, floor_p
        ));
    }
    verdict("criterion 3 positivity", all, &detail);
}

#[test]
fn criterion_4_purity() {
    let fam = unit_family();
    let base = pipeline(&fam, 1.0, 200, 16);
    let fine = pipeline(&fam, 1.0, 400, 16);
    let mats = boundary_matrices(&fam, &base.domain).unwrap();
    let cov_base = covariances(&base.pair, &mats, &base.w_s);
    let cov_fine = covariances(&fine.pair, &mats, &fine.w_s);
    let pd_base = cov_base.purity_defect().unwrap();
    let pd_fine = cov_fine.purity_defect().unwrap();
    let idem_ratio = base.report.idem_defect / fine.report.idem_defect;
    let pd_ratio = pd_base / pd_fine;

    let sp = mode_spectrum(&fam.h0, &fam.v, fam.msq, 16).unwrap();
    let (cp, cm) = oracle_pair(&sp, 1.0);
    let exact_pair = CalderonPair {
        c_plus: cp,
        c_minus: cm,
        c0_plus: CMat::zeros(32, 32),
        c0_minus: CMat::zeros(32, 32),
        ds: 0.0,
        sign_resolution: 1.0,
    };
    let exact_rep = identity_report(&exact_pair, &mats, &base.w_s);
    let exact_cov = covariances(&exact_pair, &mats, &base.w_s);
    let exact_pd = exact_cov.purity_defect().unwrap();
    let thermal = StateCovariances {
        lambda_plus: exact_cov.lambda_plus.scale(C64::new(2.0, 0.0)),
        lambda_minus: exact_cov.lambda_minus.scale(C64::new(2.0, 0.0)),
        q: exact_cov.q.clone(),
        w_s: exact_cov.w_s.clone(),
    };
    let thermal_pd = thermal.purity_defect().unwrap();

    let pass = base.report.idem_defect <= 1e-2
        && pd_base <= 1e-2
        && (3.0..=5.0).contains(&idem_ratio)
        && (3.0..=5.0).contains(&pd_ratio)
        && exact_rep.idem_defect <= 1e-12
        && exact_pd <= 1e-12
        && (thermal_pd - 0.75).abs() <= 1e-6;
    verdict(
        "criterion 4 purity",
        pass,
        &format!(
            "idem {:.3e} purity {pd_base:.3e} (tol 1e-2), ratios {idem_ratio:.2}/{pd_ratio:.2}, exact pair {:.1e}/{exact_pd:.1e} (tol 1e-12), thermal {thermal_pd:.8} = 0.75±1e-6",
            base.report.idem_defect, exact_rep.idem_defect
        ),
    );
}

#[test]
fn criterion_5_ground_state_limit() {
    let fam = unit_family();
    let sp = mode_spectrum(&fam.h0, &fam.v, fam.msq, 16).unwrap();
    let mut worst_margin = f64::INFINITY;
    let mut all = true;
    for t_half in [2.0, 3.0] {
        for &eps in &sp.eps {
            let bound = 2.0 * (1.0 + eps + 1.0 / eps) * (-2.0_f64 * t_half * eps).exp();
            let dev = calderon_closed_form(eps, t_half).sub(&ground_state_projector(eps)).norm2();
            all &= dev <= bound;
            if bound > 0.0 {
                worst_margin = worst_margin.min(bound / dev.max(f64::MIN_POSITIVE));
            }
        }
    }
    verdict(
        "criterion 5 ground-state limit",
        all,
        &format!("‖C⁺(T) − C_gs‖ ≤ 2(1+ε+ε⁻¹)e^(-2Tε) at T=2,3 for all 16 modes (worst margin ×{worst_margin:.2})"),
    );
}

#[test]
fn criterion_6_frequency_law() {
    let fam = unit_family();
    let circle = calderon_core::discretize::CircleGrid::new(16, &fam).unwrap();
    let sp = mode_spectrum(&fam.h0, &fam.v, fam.msq, 16).unwrap();
    let t_slab = 1.0;
    let dt = auto_dt(&circle, &fam).unwrap();
    let window = 2.0 * std::f64::consts::PI;
    let mut all = true;
    let mut worst_rel: f64 = 0.0;
    let mut worst_floor: f64 = 0.0;
    let mut worst_gs: f64 = 0.0;
    for (k, &eps) in sp.eps.iter().enumerate() {
        let mode = sp.modes.col(k);
        let coth = 1.0 / (t_slab * eps).tanh();
        let range = CauchyDatum {
            f0: mode.clone(),
            f1: mode.iter().map(|&m| m * (eps * coth)).collect(),
        };
        let traj = cauchy_solve(&fam, &circle, &range, window, dt).unwrap();
        let r = frequency_probe(&traj, &sp).unwrap()[k];
        let expect = (-2.0_f64 * t_slab * eps).exp();
        if eps <= 4.0 {
            let rel = (r - expect).abs() / expect;
            worst_rel = worst_rel.max(rel);
            all &= rel <= 0.1;
        } else {
            worst_floor = worst_floor.max(r);
            all &= r <= 1e-3;
        }
        let gs = CauchyDatum {
            f0: mode.clone(),
            f1: mode.iter().map(|&m| m * eps).collect(),
        };
        let gtraj = cauchy_solve(&fam, &circle, &gs, window, dt).unwrap();
        let g = frequency_probe(&gtraj, &sp).unwrap()[k];
        worst_gs = worst_gs.max(g);
        all &= g <= 1e-8;
    }
    verdict(
        "criterion 6 frequency law",
        all,
        &format!("e^(-2ε) law rel err {worst_rel:.2e} ≤ 0.1 (ε ≤ 4), floor {worst_floor:.1e} ≤ 1e-3, ground-state leak {worst_gs:.1e} ≤ 1e-8"),
    );
}

#[test]
fn criterion_7_structural_identities() {
    // γ*-adjointness on seeded random pairs
    let fam = exp_family();
    let d = build_domain(2.0, 100, 16, &fam).unwrap();
    let inner = inner_products(&d);
    let tr = trace_maps(&d, &inner);
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0x5EED);
    let mut adjoint_defect: f64 = 0.0;
    for _ in 0..100 {
        let f: Vec<C64> =
            (0..32).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let u: Vec<C64> = (0..tr.interior_dim)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let gsf = tr.gamma_star.matvec(&f);
        let lhs: C64 =
            gsf.iter().zip(&u).zip(&inner.w_h).map(|((a, b), &w)| a.conj() * b * w).sum();
        let gu = tr.gamma.matvec(&u);
        let rhs: C64 =
            f.iter().zip(&gu).zip(&inner.w_s).map(|((a, b), &w)| a.conj() * b * w).sum();
        adjoint_defect = adjoint_defect.max((lhs - rhs).norm() / (lhs.norm() + 1.0));
    }
    // R†qR = q
    let mats = boundary_matrices(&fam, &d).unwrap();
    let r = mats.r();
    let q = mats.q();
    let rqr_defect = r.adjoint().matmul(&q).matmul(&r).sub(&q).norm2();
    // reflection identity on symmetric grids
    let refl_exp = assemble_k0(&d, &fam).unwrap().reflection_defect();
    let du = build_domain(1.0, 200, 16, &unit_family()).unwrap();
    let refl_ultra = assemble_k0(&du, &unit_family()).unwrap().reflection_defect();
    // d̂-conjugation of K against K₀
    let mut conj_defect: f64 = 0.0;
    for family in [
        exp_family(),
        MetricFamily::polynomial(TrigPoly::constant(1.0), TrigPoly::zero(), 1.0, 0.25),
    ] {
        let dd = build_domain(1.0, 100, 8, &family).unwrap();
        let real = assemble_k0(&dd, &family).unwrap();
        let unred = assemble_k(&dd, &family).unwrap();
        conj_defect = conj_defect.max(dhat_conjugation_defect(&unred, &real));
    }
    let pass = adjoint_defect <= 1e-13
        && rqr_defect <= 1e-13
        && refl_exp <= 1e-12
        && refl_ultra <= 1e-12
        && conj_defect <= 1e-10;
    verdict(
        "criterion 7 structural identities",
        pass,
        &format!("adjointness {adjoint_defect:.1e} ≤ 1e-13, R†qR−q {rqr_defect:.1e} ≤ 1e-13, reflection {refl_exp:.1e}/{refl_ultra:.1e} ≤ 1e-12, conjugation {conj_defect:.1e} ≤ 1e-10"),
    );
}

#[test]
fn criterion_8_green_identity() {
    let fam = unit_family();
    let bump = |c: f64, w: f64, s: f64| {
        let z: f64 = (s - c) / w;
        if z.abs() < 1.0 {
            (-1.0 / (1.0 - z * z)).exp()
        } else {
            0.0
        }
    };
    let mut defects = Vec::new();
    let mut norm_at_200 = 0.0;
    for m in [200usize, 400] {
        let d = build_domain(1.0, m, 16, &fam).unwrap();
        let inner = inner_products(&d);
        let tr = trace_maps(&d, &inner);
        let real = assemble_k0(&d, &fam).unwrap();
        let n = d.n();
        let mut u = vec![C64::new(0.0, 0.0); d.interior_dim()];
        let mut v = vec![C64::new(0.0, 0.0); d.interior_dim()];
        for (j, &sj) in d.s_interior().iter().enumerate() {
            for (k, &y) in d.circle.y.iter().enumerate() {
                u[j * n + k] = C64::new(bump(0.1, 0.7, sj) * y.cos(), 0.2 * bump(0.1, 0.7, sj));
                v[j * n + k] =
                    C64::new(bump(-0.15, 0.6, sj) * (2.0 * y).sin(), 0.3 * bump(-0.15, 0.6, sj));
            }
        }
        let defect = green_identity_defect(&real, &tr, &inner, &u, &v);
        if m == 200 {
            norm_at_200 = d.wh_norm(&u) * d.wh_norm(&v);
        }
        defects.push(defect);
    }
    let ratio = defects[0] / defects[1];
    let pass = defects[0] <= 1e-3 * norm_at_200 && (3.0..=5.0).contains(&ratio);
    verdict(
        "criterion 8 green identity",
        pass,
        &format!(
            "defect {:.3e} ≤ 1e-3·‖u‖‖v‖ = {:.3e}, refinement ratio {ratio:.2} in [3,5]",
            defects[0],
            1e-3 * norm_at_200
        ),
    );
}

#[test]
fn criterion_9_sectoriality() {
    let configs: [(&str, MetricFamily, f64, usize, usize); 3] = [
        ("ultrastatic T=1", unit_family(), 1.0, 200, 16),
        ("exponential T=2", exp_family(), 2.0, 200, 16),
        (
            "polynomial T=1",
            MetricFamily::polynomial(TrigPoly::constant(1.0), TrigPoly::zero(), 1.0, 0.25),
            1.0,
            100,
            8,
        ),
    ];
    let mut all = true;
    let mut detail = String::new();
    for (name, fam, t_half, m, n) in configs {
        let d = build_domain(t_half, m, n, &fam).unwrap();
        let inner = inner_products(&d);
        let real = assemble_k0(&d, &fam).unwrap();
        let rep = real.sectoriality_defect(&inner, 0x5EED);
        all &= rep.min_herm_eig > 0.0 && rep.numerical_range_angle <= 1.0;
        detail.push_str(&format!("{name}: min eig {:.3e} > 0; ", rep.min_herm_eig));
    }
    // the inadmissible run is rejected before assembly
    let rejected = matches!(
        build_domain(3.0, 200, 16, &exp_family()),
        Err(CoreError::InadmissibleDomain { .. })
    );
    all &= rejected;
    detail.push_str(&format!("T=3 exponential rejected before assembly: {rejected}"));
    verdict("criterion 9 sectoriality", all, &detail);
}
