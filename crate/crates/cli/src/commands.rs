//! The build / verify / oracle / evolve / converge pipelines.

use std::fs;
use std::path::Path;

use calderon_core::calderon::{
    boundary_matrices, calderon_pair, green_identity_defect, identity_report, trace_maps,
    unreduced_pair, BoundaryMatrices, CalderonPair, IdentityReport, TraceMaps,
};
use calderon_core::discretize::{build_domain, inner_products, DiscreteDomain, InnerProducts};
use calderon_core::elliptic::{
    assemble_k, assemble_k0, dhat_conjugation_defect, EllipticRealization,
};
use calderon_core::error::CoreError;
use calderon_core::evolve::{auto_dt, cauchy_solve, cfl_bound, energy, frequency_probe, CauchyDatum};
use calderon_core::geometry::{check_wick_domain, MetricFamily};
use calderon_core::linalg::{C64, CMat};
use calderon_core::oracle::{calderon_closed_form, mode_spectrum, ModeSpectrum};
use calderon_core::state::covariances;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::config::RunConfig;
use crate::csvout::matrix_to_csv;
use crate::report::{fmt_g17, Check, VerificationReport};

pub enum CliError {
    Io(String),
    Domain(String),
    Solver(String),
    ChecksFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Domain(_) => 3,
            CliError::Solver(_) => 4,
            CliError::ChecksFailed => 5,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Io(m) | CliError::Domain(m) | CliError::Solver(m) => m.clone(),
            CliError::ChecksFailed => "one or more checks failed".to_string(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidFamily(_)
            | CoreError::InadmissibleDomain { .. }
            | CoreError::BadDiscretization(_) => CliError::Domain(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

struct Pipeline {
    family: MetricFamily,
    domain: DiscreteDomain,
    inner: InnerProducts,
    traces: TraceMaps,
    mats: BoundaryMatrices,
    real: EllipticRealization,
    pair: CalderonPair,
    report: IdentityReport,
}

fn run_pipeline(cfg: &RunConfig, m_override: Option<usize>) -> Result<Pipeline, CliError> {
    let family = cfg.family();
    let m = m_override.unwrap_or(cfg.m);
    let domain = build_domain(cfg.t_half, m, cfg.n, &family)?;
    let inner = inner_products(&domain);
    let traces = trace_maps(&domain, &inner);
    let mats = boundary_matrices(&family, &domain)?;
    let real = assemble_k0(&domain, &family)?;
    let pair = calderon_pair(&real, &traces, &mats)?;
    let report = identity_report(&pair, &mats, &inner.w_s);
    Ok(Pipeline { family, domain, inner, traces, mats, real, pair, report })
}

fn write_out(out_dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join(name), content)?;
    Ok(())
}

pub fn run_build(cfg: &RunConfig, out_dir: &Path, seed: u64) -> Result<(), CliError> {
    let p = run_pipeline(cfg, None)?;
    write_out(out_dir, "c_plus.csv", &matrix_to_csv(&p.pair.c_plus))?;
    write_out(out_dir, "c_minus.csv", &matrix_to_csv(&p.pair.c_minus))?;
    write_out(out_dir, "c0_plus.csv", &matrix_to_csv(&p.pair.c0_plus))?;
    write_out(out_dir, "c0_minus.csv", &matrix_to_csv(&p.pair.c0_minus))?;
    let summary = format!(
        "# seed = {seed:#x}\nsize = {}\nsign_resolution = {}\nsum_defect = {}\n",
        p.pair.c_plus.nrows(),
        p.pair.sign_resolution,
        fmt_g17(p.report.sum_defect),
    );
    write_out(out_dir, "build.txt", &summary)?;
    print!("{summary}");
    Ok(())
}

/// Generic compactly supported test pair for the Green identity, scaled to
/// the slab half-width.
fn green_pair(domain: &DiscreteDomain) -> (Vec<C64>, Vec<C64>) {
    let bump = |c: f64, w: f64, s: f64| {
        let z: f64 = (s - c) / w;
        if z.abs() < 1.0 {
            (-1.0 / (1.0 - z * z)).exp()
        } else {
            0.0
        }
    };
    let t = domain.t_half;
    let n = domain.n();
    let mut u = vec![C64::new(0.0, 0.0); domain.interior_dim()];
    let mut v = vec![C64::new(0.0, 0.0); domain.interior_dim()];
    for (j, &sj) in domain.s_interior().iter().enumerate() {
        for (k, &y) in domain.circle.y.iter().enumerate() {
            u[j * n + k] = C64::new(
                bump(0.1 * t, 0.7 * t, sj) * y.cos(),
                0.2 * bump(0.1 * t, 0.7 * t, sj),
            );
            v[j * n + k] = C64::new(
                bump(-0.15 * t, 0.6 * t, sj) * (2.0 * y).sin(),
                0.3 * bump(-0.15 * t, 0.6 * t, sj),
            );
        }
    }
    (u, v)
}

fn oracle_block_errors(pair: &CalderonPair, spectrum: &ModeSpectrum, t_half: f64) -> Vec<(f64, CMat, CMat)> {
    let n = spectrum.n();
    let pinv = spectrum.modes_inv();
    let mut rows = Vec::with_capacity(n);
    for (k, &eps) in spectrum.eps.iter().enumerate() {
        let mode = spectrum.modes.col(k);
        let mut numeric = CMat::zeros(2, 2);
        for comp in 0..2 {
            let mut f = vec![C64::new(0.0, 0.0); 2 * n];
            f[comp * n..(comp + 1) * n].copy_from_slice(&mode);
            let out = pair.c_plus.matvec(&f);
            numeric[(0, comp)] = pinv.matvec(&out[..n])[k];
            numeric[(1, comp)] = pinv.matvec(&out[n..])[k];
        }
        rows.push((eps, numeric, calderon_closed_form(eps, t_half)));
    }
    rows
}

pub fn run_verify(cfg: &RunConfig, out_dir: &Path, seed: u64) -> Result<(), CliError> {
    let family = cfg.family();
    let ygrid: Vec<f64> =
        (0..cfg.n).map(|k| 2.0 * std::f64::consts::PI * k as f64 / cfg.n as f64).collect();
    let wick = check_wick_domain(&family, cfg.t_half, &ygrid)?;
    let mut rep = VerificationReport::new(seed);
    rep.push(Check::at_most(
        "wick_domain",
        cfg.t_half,
        wick.max_admissible_t,
        "slab within the admissibility bounds",
    ));
    if !wick.ok {
        let text = rep.render();
        write_out(out_dir, "report.txt", &text)?;
        print!("{text}");
        return Err(CliError::Domain(format!(
            "T = {} exceeds the admissible bound {}",
            cfg.t_half, wick.max_admissible_t
        )));
    }

    let p = run_pipeline(cfg, None)?;
    rep.push(Check::at_most("sum_identity", p.report.sum_defect, cfg.tol.sum, "C+ + C- = 1"));
    rep.push(Check::at_most(
        "hermiticity",
        p.report.herm_defect,
        cfg.tol.herm,
        "W q C+ is hermitian",
    ));
    let viol_p = (-p.report.pos_min_eig_plus).max(0.0) / p.report.pos_norm_plus;
    let viol_m = (-p.report.pos_min_eig_minus).max(0.0) / p.report.pos_norm_minus;
    rep.push(Check::at_most("positivity_plus", viol_p, cfg.tol.pos_floor, "q C+ >= 0"));
    rep.push(Check::at_most("positivity_minus", viol_m, cfg.tol.pos_floor, "-q C- >= 0"));
    rep.push(Check::at_most("idempotence", p.report.idem_defect, cfg.tol.idem, "C+ C+ = C+"));

    let cov = covariances(&p.pair, &p.mats, &p.inner.w_s);
    rep.push(Check::at_most("ccr", cov.ccr_defect(), cfg.tol.ccr, "lambda+ - lambda- = q"));
    let purity = cov.purity_defect()?;
    rep.push(Check::at_most(
        "purity",
        purity,
        cfg.tol.purity,
        "(Lambda^-1/2 q Lambda^-1/2)^2 = 1",
    ));

    rep.push(Check::at_most(
        "reflection",
        p.real.reflection_defect(),
        cfg.tol.reflection,
        "K0(adjoint) = reflection conjugate of K0",
    ));
    let sect = p.real.sectoriality_defect(&p.inner, seed);
    rep.push(Check::above(
        "sectoriality",
        sect.min_herm_eig,
        0.0,
        "Herm(W_H K0) positive definite",
    ));
    rep.push(Check::at_most(
        "numerical_range",
        sect.numerical_range_angle,
        1.0,
        "|Im q| <= Re q on the numerical range",
    ));

    // trace adjointness on seeded random pairs
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let mut adjoint_defect: f64 = 0.0;
    for _ in 0..100 {
        let f: Vec<C64> = (0..2 * cfg.n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let u: Vec<C64> = (0..p.traces.interior_dim)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let gsf = p.traces.gamma_star.matvec(&f);
        let lhs: C64 =
            gsf.iter().zip(&u).zip(&p.inner.w_h).map(|((a, b), &w)| a.conj() * b * w).sum();
        let gu = p.traces.gamma.matvec(&u);
        let rhs: C64 =
            f.iter().zip(&gu).zip(&p.inner.w_s).map(|((a, b), &w)| a.conj() * b * w).sum();
        adjoint_defect = adjoint_defect.max((lhs - rhs).norm() / (lhs.norm() + 1.0));
    }
    rep.push(Check::at_most(
        "trace_adjoint",
        adjoint_defect,
        cfg.tol.adjoint,
        "(gamma* f | u) = (f | gamma u)",
    ));

    let r = p.mats.r();
    let q = p.mats.q();
    rep.push(Check::at_most(
        "rqr",
        r.adjoint().matmul(&q).matmul(&r).sub(&q).norm2(),
        cfg.tol.rqr,
        "R* q R = q",
    ));
    rep.push(Check::at_most(
        "rs0r",
        r.adjoint().matmul(&p.mats.s0()).matmul(&r).sub(&p.mats.s()).norm2(),
        cfg.tol.rqr,
        "R* S0 R = S",
    ));

    let unred = assemble_k(&p.domain, &p.family)?;
    rep.push(Check::at_most(
        "dhat_conjugation",
        dhat_conjugation_defect(&unred, &p.real),
        cfg.tol.conjugation,
        "dhat K dhat^-1 = K0",
    ));
    let (up, um) = unreduced_pair(&unred, &p.real, &p.traces, &p.mats, &p.inner);
    let pcons = up.sub(&p.pair.c_plus).norm2().max(um.sub(&p.pair.c_minus).norm2())
        / p.pair.c_plus.norm2();
    rep.push(Check::at_most(
        "pair_consistency",
        pcons,
        cfg.tol.pair_consistency,
        "C(unreduced K, S) = R^-1 C0 R",
    ));

    let (gu, gv) = green_pair(&p.domain);
    let green =
        green_identity_defect(&p.real, &p.traces, &p.inner, &gu, &gv)
            / (p.domain.wh_norm(&gu) * p.domain.wh_norm(&gv));
    rep.push(Check::at_most(
        "green_identity",
        green,
        cfg.tol.green,
        "(v|K0 u) - (K0* v|u) = (gamma+ v|S0 gamma+ u)",
    ));

    if p.family.is_ultrastatic() {
        let sp = mode_spectrum(&p.family.h0, &p.family.v, p.family.msq, cfg.n)?;
        let mut worst: f64 = 0.0;
        for (_, numeric, exact) in oracle_block_errors(&p.pair, &sp, cfg.t_half) {
            for i in 0..2 {
                for j in 0..2 {
                    worst = worst.max((numeric[(i, j)] - exact[(i, j)]).norm() / exact[(i, j)].norm());
                }
            }
        }
        rep.push(Check::at_most(
            "oracle_match",
            worst,
            cfg.tol.oracle,
            "per-mode C+ = (1/2)[[1, tanh(Te)/e],[e coth(Te), 1]]",
        ));
    }

    if cfg.emit_matrices {
        write_out(out_dir, "c_plus.csv", &matrix_to_csv(&p.pair.c_plus))?;
        write_out(out_dir, "c_minus.csv", &matrix_to_csv(&p.pair.c_minus))?;
    }
    let text = rep.render();
    write_out(out_dir, "report.txt", &text)?;
    print!("{text}");
    if rep.all_pass() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}

pub fn run_oracle(cfg: &RunConfig, out_dir: &Path, seed: u64) -> Result<(), CliError> {
    let family = cfg.family();
    if !family.is_ultrastatic() {
        return Err(CliError::Domain(
            "the oracle command needs an ultrastatic family".to_string(),
        ));
    }
    let p = run_pipeline(cfg, None)?;
    let sp = mode_spectrum(&family.h0, &family.v, family.msq, cfg.n)?;
    let mut table = String::from("mode,eps,i,j,num_re,num_im,exact_re,exact_im,rel_err\n");
    let mut worst: f64 = 0.0;
    for (k, (eps, numeric, exact)) in oracle_block_errors(&p.pair, &sp, cfg.t_half).iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                let rel = (numeric[(i, j)] - exact[(i, j)]).norm() / exact[(i, j)].norm();
                worst = worst.max(rel);
                table.push_str(&format!(
                    "{k},{},{i},{j},{},{},{},{},{}\n",
                    fmt_g17(*eps),
                    fmt_g17(numeric[(i, j)].re),
                    fmt_g17(numeric[(i, j)].im),
                    fmt_g17(exact[(i, j)].re),
                    fmt_g17(exact[(i, j)].im),
                    fmt_g17(rel)
                ));
            }
        }
    }
    write_out(out_dir, "oracle.csv", &table)?;
    let mut rep = VerificationReport::new(seed);
    rep.push(Check::at_most(
        "oracle_match",
        worst,
        cfg.tol.oracle,
        "per-mode C+ = (1/2)[[1, tanh(Te)/e],[e coth(Te), 1]]",
    ));
    let text = rep.render();
    write_out(out_dir, "oracle_report.txt", &text)?;
    print!("{text}");
    if rep.all_pass() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}

pub fn run_evolve(cfg: &RunConfig, out_dir: &Path, seed: u64) -> Result<(), CliError> {
    let family = cfg.family();
    if !family.is_ultrastatic() {
        return Err(CliError::Domain(
            "the frequency probe needs an ultrastatic family".to_string(),
        ));
    }
    let p = run_pipeline(cfg, None)?;
    let circle = &p.domain.circle;
    let sp = mode_spectrum(&family.h0, &family.v, family.msq, cfg.n)?;
    let dt = if cfg.dt > 0.0 { cfg.dt } else { auto_dt(circle, &family)? };
    if dt > cfl_bound(circle, &family) {
        return Err(CliError::Solver(
            CoreError::CflViolation { dt, bound: cfl_bound(circle, &family) }.to_string(),
        ));
    }
    let mut rep = VerificationReport::new(seed);
    let mut table = String::from("mode,eps,ratio,expected,criterion,pass\n");
    if cfg.probe {
        for (k, &eps) in sp.eps.iter().enumerate() {
            let mode = sp.modes.col(k);
            let coth = 1.0 / (cfg.t_half * eps).tanh();
            let datum = CauchyDatum {
                f0: mode.clone(),
                f1: mode.iter().map(|&m| m * (eps * coth)).collect(),
            };
            let traj = cauchy_solve(&family, circle, &datum, cfg.t_window, dt)?;
            let ratio = frequency_probe(&traj, &sp)?[k];
            let expected = (-2.0_f64 * cfg.t_half * eps).exp();
            let (crit, pass) = if eps * cfg.t_half <= 4.0 {
                ("rel<=0.1", (ratio - expected).abs() <= 0.1 * expected)
            } else {
                ("floor<=1e-3", ratio <= 1e-3)
            };
            table.push_str(&format!(
                "{k},{},{},{},{crit},{}\n",
                fmt_g17(eps),
                fmt_g17(ratio),
                fmt_g17(expected),
                if pass { "pass" } else { "FAIL" }
            ));
            rep.push(Check::at_most(
                &format!("frequency_mode_{k}"),
                if eps * cfg.t_half <= 4.0 { (ratio - expected).abs() / expected } else { ratio },
                if eps * cfg.t_half <= 4.0 { 0.1 } else { 1e-3 },
                "negative-frequency ratio = exp(-2 T eps)",
            ));
        }
    } else {
        // probe disabled: integrate a mixed datum and certify energy drift
        let mut f0 = vec![C64::new(0.0, 0.0); cfg.n];
        let mut f1 = vec![C64::new(0.0, 0.0); cfg.n];
        for k in 0..cfg.n {
            let mode = sp.modes.col(k);
            for j in 0..cfg.n {
                f0[j] += mode[j];
                f1[j] += mode[j] * sp.eps[k];
            }
        }
        let traj = cauchy_solve(&family, circle, &CauchyDatum { f0, f1 }, cfg.t_window, dt)?;
        let e = energy(&traj, &sp);
        let drift = e
            .iter()
            .map(|&x| (x - e[0]).abs() / e[0].abs())
            .fold(0.0, f64::max);
        rep.push(Check::at_most("energy_drift", drift, 1e-6, "ultrastatic energy conserved"));
    }
    write_out(out_dir, "evolve.csv", &table)?;
    let text = rep.render();
    write_out(out_dir, "evolve_report.txt", &text)?;
    print!("{text}");
    if rep.all_pass() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}

pub fn run_converge(cfg: &RunConfig, out_dir: &Path, seed: u64) -> Result<(), CliError> {
    let coarse = run_pipeline(cfg, None)?;
    let fine = run_pipeline(cfg, Some(2 * cfg.m))?;
    let cov_c = covariances(&coarse.pair, &coarse.mats, &coarse.inner.w_s);
    let cov_f = covariances(&fine.pair, &fine.mats, &fine.inner.w_s);
    let (guc, gvc) = green_pair(&coarse.domain);
    let (guf, gvf) = green_pair(&fine.domain);
    let green_c = green_identity_defect(&coarse.real, &coarse.traces, &coarse.inner, &guc, &gvc)
        / (coarse.domain.wh_norm(&guc) * coarse.domain.wh_norm(&gvc));
    let green_f = green_identity_defect(&fine.real, &fine.traces, &fine.inner, &guf, &gvf)
        / (fine.domain.wh_norm(&guf) * fine.domain.wh_norm(&gvf));
    let rows = [
        ("sum_identity", coarse.report.sum_defect, fine.report.sum_defect),
        ("idempotence", coarse.report.idem_defect, fine.report.idem_defect),
        ("purity", cov_c.purity_defect()?, cov_f.purity_defect()?),
        ("green_identity", green_c, green_f),
    ];
    let mut table = String::from("quantity,defect_M,defect_2M,order\n");
    let mut rep = VerificationReport::new(seed);
    for (name, c, f) in rows {
        let order = (c / f).log2();
        table.push_str(&format!("{name},{},{},{}\n", fmt_g17(c), fmt_g17(f), fmt_g17(order)));
        rep.push(Check::at_most(
            &format!("order_{name}"),
            (order - 2.0).abs(),
            0.3,
            "defect order 2 +- 0.3 in ds",
        ));
    }
    write_out(out_dir, "converge.csv", &table)?;
    let text = rep.render();
    write_out(out_dir, "converge_report.txt", &text)?;
    print!("{text}");
    if rep.all_pass() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}
