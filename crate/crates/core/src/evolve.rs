//! Real-time Cauchy evolution ∂_t²u + r(t)∂_t u + a(t)u = 0 and the
//! frequency-sign probe.
//!
//! Data in the range of C⁺(T) evolve with an exponentially small
//! negative-frequency branch: per mode the exact amplitude ratio is
//! |B/A| = e^{−2Tε}. The probe fits each modal trace against
//! {e^{iεt}, e^{−iεt}} over the window and reports that ratio, which is the
//! quantitatively checkable shadow of the positive-frequency property.

use crate::discretize::{assemble_spatial, CircleGrid};
use crate::error::{CoreError, Result};
use crate::geometry::MetricFamily;
use crate::linalg::{C64, CMat};
use crate::oracle::ModeSpectrum;

/// Cauchy datum (u|_Σ, i⁻¹∂_t u|_Σ); Calderón data feed in unchanged since
/// t = is turns −∂_s into i⁻¹∂_t.
#[derive(Clone)]
pub struct CauchyDatum {
    pub f0: Vec<C64>,
    pub f1: Vec<C64>,
}

impl CauchyDatum {
    /// Splits a stacked Cauchy data vector (f₀; f₁).
    pub fn from_stacked(f: &[C64]) -> Self {
        let n = f.len() / 2;
        CauchyDatum { f0: f[..n].to_vec(), f1: f[n..].to_vec() }
    }
}

pub struct Trajectory {
    pub times: Vec<f64>,
    /// u(t_i, ·) on the circle grid.
    pub values: Vec<Vec<C64>>,
    /// ∂_t u(t_i, ·).
    pub dvalues: Vec<Vec<C64>>,
    pub ultrastatic: bool,
}

/// Stability bound for the explicit stepper: the largest admissible dt.
pub fn cfl_bound(circle: &CircleGrid, family: &MetricFamily) -> f64 {
    let h0_min = circle.y.iter().map(|&y| family.h0.eval(y)).fold(f64::INFINITY, f64::min);
    let dy = 2.0 * std::f64::consts::PI / circle.n as f64;
    0.5 * dy * h0_min.sqrt()
}

/// Automatic step: the CFL bound capped so the fastest resolved mode is
/// integrated with εdt ≤ 0.03 (keeps branch leakage of the classical
/// fourth-order step far below the probe floors).
pub fn auto_dt(circle: &CircleGrid, family: &MetricFamily) -> Result<f64> {
    let a0 = assemble_spatial(circle, family, C64::new(0.0, 0.0))?.a;
    let eps_max = a0.norm2().sqrt();
    Ok(cfl_bound(circle, family).min(0.03 / eps_max))
}

/// Integrates the Cauchy problem with the classical fourth-order one-step
/// method as the first-order system ∂_t(u, w) = (w, −a(t)u − r(t)w), with
/// u(0) = f₀ and ∂_t u(0) = i f₁.
pub fn cauchy_solve(
    family: &MetricFamily,
    circle: &CircleGrid,
    datum: &CauchyDatum,
    t_window: f64,
    dt: f64,
) -> Result<Trajectory> {
    let n = circle.n;
    if datum.f0.len() != n || datum.f1.len() != n {
        return Err(CoreError::DimensionMismatch { expected: n, got: datum.f0.len() });
    }
    let bound = cfl_bound(circle, family);
    if dt > bound {
        return Err(CoreError::CflViolation { dt, bound });
    }
    let steps = (t_window / dt).ceil() as usize;
    let dt = t_window / steps as f64;
    let ultra = family.is_ultrastatic();
    let a_static = assemble_spatial(circle, family, C64::new(0.0, 0.0))?.a;
    // operator and damping coefficient at a given real time
    let a_of = |t: f64| -> Result<CMat> {
        if ultra {
            Ok(a_static.clone())
        } else {
            Ok(assemble_spatial(circle, family, C64::new(t, 0.0))?.a)
        }
    };
    let rhs = |a: &CMat, r: C64, u: &[C64], w: &[C64]| -> (Vec<C64>, Vec<C64>) {
        let au = a.matvec(u);
        let dw: Vec<C64> = au.iter().zip(w).map(|(x, wk)| -x - r * wk).collect();
        (w.to_vec(), dw)
    };
    let mut u: Vec<C64> = datum.f0.clone();
    let mut w: Vec<C64> = datum.f1.iter().map(|&f| C64::new(0.0, 1.0) * f).collect();
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut dvalues = Vec::with_capacity(steps + 1);
    times.push(0.0);
    values.push(u.clone());
    dvalues.push(w.clone());
    let axpy = |x: &[C64], d: &[C64], h: f64| -> Vec<C64> {
        x.iter().zip(d).map(|(a, b)| a + b * h).collect()
    };
    for step in 0..steps {
        let t = step as f64 * dt;
        let (a1, a2, a3) = if ultra {
            (a_static.clone(), a_static.clone(), a_static.clone())
        } else {
            (a_of(t)?, a_of(t + 0.5 * dt)?, a_of(t + dt)?)
        };
        let r1 = family.r_coeff(C64::new(t, 0.0));
        let r2 = family.r_coeff(C64::new(t + 0.5 * dt, 0.0));
        let r3 = family.r_coeff(C64::new(t + dt, 0.0));
        let (k1u, k1w) = rhs(&a1, r1, &u, &w);
        let (k2u, k2w) = rhs(&a2, r2, &axpy(&u, &k1u, 0.5 * dt), &axpy(&w, &k1w, 0.5 * dt));
        let (k3u, k3w) = rhs(&a2, r2, &axpy(&u, &k2u, 0.5 * dt), &axpy(&w, &k2w, 0.5 * dt));
        let (k4u, k4w) = rhs(&a3, r3, &axpy(&u, &k3u, dt), &axpy(&w, &k3w, dt));
        for k in 0..n {
            u[k] += (k1u[k] + k2u[k] * 2.0 + k3u[k] * 2.0 + k4u[k]) * (dt / 6.0);
            w[k] += (k1w[k] + k2w[k] * 2.0 + k3w[k] * 2.0 + k4w[k]) * (dt / 6.0);
        }
        times.push((step + 1) as f64 * dt);
        values.push(u.clone());
        dvalues.push(w.clone());
    }
    Ok(Trajectory { times, values, dvalues, ultrastatic: ultra })
}

/// Discrete energy Σ wy(|∂_t u|² + ū·a·u) of an ultrastatic trajectory.
pub fn energy(traj: &Trajectory, spectrum: &ModeSpectrum) -> Vec<f64> {
    traj.values
        .iter()
        .zip(&traj.dvalues)
        .map(|(u, w)| {
            let au = spectrum.a.matvec(u);
            let mut e = 0.0;
            for k in 0..u.len() {
                e += spectrum.wy[k] * (w[k].norm_sqr() + (u[k].conj() * au[k]).re);
            }
            e
        })
        .collect()
}

/// Per-mode negative-to-positive amplitude ratios |B_k/A_k| from a least
/// squares fit of the modal traces onto {e^{iε_k t}, e^{−iε_k t}}.
pub fn frequency_probe(traj: &Trajectory, spectrum: &ModeSpectrum) -> Result<Vec<f64>> {
    if !traj.ultrastatic {
        return Err(CoreError::UnsupportedProbe);
    }
    let nt = traj.times.len();
    let nmodes = spectrum.n();
    let pinv = spectrum.modes_inv();
    // modal traces u_k(t_i)
    let mut traces = vec![vec![C64::new(0.0, 0.0); nt]; nmodes];
    for (i, u) in traj.values.iter().enumerate() {
        let coeffs = pinv.matvec(u);
        for (k, c) in coeffs.into_iter().enumerate() {
            traces[k][i] = c;
        }
    }
    let mut ratios = Vec::with_capacity(nmodes);
    for (k, &eps) in spectrum.eps.iter().enumerate() {
        // normal equations for the 2-column basis
        let mut g00 = C64::new(0.0, 0.0);
        let mut g01 = C64::new(0.0, 0.0);
        let mut g11 = C64::new(0.0, 0.0);
        let mut b0 = C64::new(0.0, 0.0);
        let mut b1 = C64::new(0.0, 0.0);
        for (i, &t) in traj.times.iter().enumerate() {
            let ep = C64::new(0.0, eps * t).exp();
            let em = ep.conj();
            g00 += ep.conj() * ep;
            g01 += ep.conj() * em;
            g11 += em.conj() * em;
            b0 += ep.conj() * traces[k][i];
            b1 += em.conj() * traces[k][i];
        }
        let det = g00 * g11 - g01 * g01.conj();
        let a = (g11 * b0 - g01 * b1) / det;
        let b = (g00 * b1 - g01.conj() * b0) / det;
        ratios.push(if a.norm() == 0.0 { f64::INFINITY } else { b.norm() / a.norm() });
    }
    Ok(ratios)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TrigPoly;
    use crate::oracle::mode_spectrum;

    fn unit_family() -> MetricFamily {
        MetricFamily::ultrastatic(TrigPoly::constant(1.0), TrigPoly::zero(), 1.0)
    }

    fn mode_datum(spectrum: &ModeSpectrum, k: usize, f1_over_f0: f64) -> CauchyDatum {
        let mode = spectrum.modes.col(k);
        CauchyDatum {
            f0: mode.clone(),
            f1: mode.iter().map(|&m| m * f1_over_f0).collect(),
        }
    }

    #[test]
    fn single_mode_positive_branch() {
        let fam = unit_family();
        let circle = CircleGrid::new(8, &fam).unwrap();
        let sp = mode_spectrum(&fam.h0, &fam.v, fam.msq, 8).unwrap();
        let k = 3; // eps = sqrt(5)
        let eps = sp.eps[k];
        let datum = mode_datum(&sp, k, eps);
        let dt = auto_dt(&circle, &fam).unwrap();
        let traj = cauchy_solve(&fam, &circle, &datum, 2.0 * std::f64::consts::PI / eps, dt).unwrap();
        // u(t) = mode · e^{iεt}
        let mode = sp.modes.col(k);
        let mut worst: f64 = 0.0;
        for (i, &t) in traj.times.iter().enumerate() {
            let phase = C64::new(0.0, eps * t).exp();
            for (uk, mk) in traj.values[i].iter().zip(&mode) {
                worst = worst.max((uk - mk * phase).norm());
            }
        }
        assert!(worst < 1e-8, "branch error {worst}");
        // conjugate branch
        let datum_m = mode_datum(&sp, k, -eps);
        let traj_m = cauchy_solve(&fam, &circle, &datum_m, 2.0 * std::f64::consts::PI / eps, dt).unwrap();
        let mut worst_m: f64 = 0.0;
        for (i, &t) in traj_m.times.iter().enumerate() {
            let phase = C64::new(0.0, -eps * t).exp();
            for (uk, mk) in traj_m.values[i].iter().zip(&mode) {
                worst_m = worst_m.max((uk - mk * phase).norm());
            }
        }
        assert!(worst_m < 1e-8);
    }

    #[test]
    fn energy_conservation() {
        let fam = unit_family();
        let circle = CircleGrid::new(16, &fam).unwrap();
        let sp = mode_spectrum(&fam.h0, &fam.v, fam.msq, 16).unwrap();
        // mixed datum across all modes
        let f0: Vec<C64> = circle.y.iter().map(|&y| C64::new(y.cos() + 0.3, 0.2 * (3.0 * y).sin())).collect();
        let f1: Vec<C64> = circle.y.iter().map(|&y| C64::new(0.1 * (2.0 * y).sin(), -0.4)).collect();
        let dt = auto_dt(&circle, &fam).unwrap();
        let traj = cauchy_solve(&fam, &circle, &CauchyDatum { f0, f1 }, 2.0 * std::f64::consts::PI, dt).unwrap();
        let e = energy(&traj, &sp);
        let e0 = e[0];
        for ei in &e {
            assert!((ei - e0).abs() <= 1e-6 * e0.abs(), "energy drift {}", (ei - e0) / e0);
        }
    }

    #[test]
    fn cfl_violation_rejected_and_probe_needs_ultrastatic() {
        let fam = unit_family();
        let circle = CircleGrid::new(8, &fam).unwrap();
        let sp = mode_spectrum(&fam.h0, &fam.v, fam.msq, 8).unwrap();
        let datum = mode_datum(&sp, 0, 1.0);
        assert!(matches!(
            cauchy_solve(&fam, &circle, &datum, 1.0, 10.0),
            Err(CoreError::CflViolation { .. })
        ));
        let expfam = MetricFamily::exponential(TrigPoly::constant(1.0), TrigPoly::zero(), 1.0, 0.2);
        let traj = cauchy_solve(&expfam, &circle, &datum, 0.5, 0.01).unwrap();
        assert!(matches!(frequency_probe(&traj, &sp), Err(CoreError::UnsupportedProbe)));
    }

    #[test]
    fn ground_state_datum_single_branch() {
        let fam = unit_family();
        let circle = CircleGrid::new(16, &fam).unwrap();
        let sp = mode_spectrum(&fam.h0, &fam.v, fam.msq, 16).unwrap();
        // superpose ground-state data over every mode at once
        let n = 16;
        let mut f0 = vec![C64::new(0.0, 0.0); n];
        let mut f1 = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let mode = sp.modes.col(k);
            for j in 0..n {
                f0[j] += mode[j];
                f1[j] += mode[j] * sp.eps[k];
            }
        }
        let dt = auto_dt(&circle, &fam).unwrap();
        let traj = cauchy_solve(&fam, &circle, &CauchyDatum { f0, f1 }, 2.0 * std::f64::consts::PI, dt).unwrap();
        let ratios = frequency_probe(&traj, &sp).unwrap();
        for (k, r) in ratios.iter().enumerate() {
            assert!(*r <= 1e-8, "mode {k} leaked {r}");
        }
    }

    #[test]
    fn calderon_range_data_follow_exponential_law() {
        let fam = unit_family();
        let circle = CircleGrid::new(16, &fam).unwrap();
        let sp = mode_spectrum(&fam.h0, &fam.v, fam.msq, 16).unwrap();
        let t_slab = 1.0;
        let dt = auto_dt(&circle, &fam).unwrap();
        for (k, &eps) in sp.eps.iter().enumerate() {
            let coth = 1.0 / (t_slab * eps).tanh();
            let datum = mode_datum(&sp, k, eps * coth);
            let traj = cauchy_solve(&fam, &circle, &datum, 2.0 * std::f64::consts::PI, dt).unwrap();
            let r = frequency_probe(&traj, &sp).unwrap()[k];
            let expect = (-2.0 * t_slab * eps).exp();
            if eps * t_slab <= 4.0 {
                assert!((r - expect).abs() <= 0.1 * expect, "mode {k}: {r} vs {expect}");
            } else {
                assert!(r <= 1e-3, "mode {k}: floor {r}");
            }
        }
    }

    #[test]
    fn exponential_law_at_wider_slab() {
        let fam = unit_family();
        let circle = CircleGrid::new(8, &fam).unwrap();
        let sp = mode_spectrum(&fam.h0, &fam.v, fam.msq, 8).unwrap();
        let t_slab = 2.0;
        let dt = auto_dt(&circle, &fam).unwrap();
        for k in [0usize, 2] {
            let eps = sp.eps[k];
            let coth = 1.0 / (t_slab * eps).tanh();
            let datum = mode_datum(&sp, k, eps * coth);
            let traj =
                cauchy_solve(&fam, &circle, &datum, 2.0 * std::f64::consts::PI, dt).unwrap();
            let r = frequency_probe(&traj, &sp).unwrap()[k];
            let expect = (-2.0_f64 * t_slab * eps).exp();
            if eps * t_slab <= 4.0 {
                assert!((r - expect).abs() <= 0.1 * expect, "mode {k}: {r} vs {expect}");
            } else {
                assert!(r <= 1e-3, "mode {k}: {r}");
            }
        }
    }

    #[test]
    fn scaling_invariance_and_time_reversal() {
        let fam = unit_family();
        let circle = CircleGrid::new(8, &fam).unwrap();
        let sp = mode_spectrum(&fam.h0, &fam.v, fam.msq, 8).unwrap();
        let k = 2;
        let eps = sp.eps[k];
        let coth = 1.0 / eps.tanh();
        let dt = auto_dt(&circle, &fam).unwrap();
        let datum = mode_datum(&sp, k, eps * coth);
        let scaled = CauchyDatum {
            f0: datum.f0.iter().map(|&z| z * C64::new(0.0, 3.7)).collect(),
            f1: datum.f1.iter().map(|&z| z * C64::new(0.0, 3.7)).collect(),
        };
        let w = 2.0 * std::f64::consts::PI;
        let r1 = frequency_probe(&cauchy_solve(&fam, &circle, &datum, w, dt).unwrap(), &sp).unwrap()[k];
        let r2 = frequency_probe(&cauchy_solve(&fam, &circle, &scaled, w, dt).unwrap(), &sp).unwrap()[k];
        assert!((r1 - r2).abs() < 1e-10 * r1.max(1e-30));
        // time reversal (conjugate data, flip f1) swaps the branches
        let reversed = CauchyDatum {
            f0: datum.f0.iter().map(|z| z.conj()).collect(),
            f1: datum.f1.iter().map(|z| -z.conj()).collect(),
        };
        let r3 = frequency_probe(&cauchy_solve(&fam, &circle, &reversed, w, dt).unwrap(), &sp).unwrap()[k];
        assert!((r3 * r1 - 1.0).abs() < 0.02, "swap: {r1} vs {r3}");
    }
}
