//! Analytic metric families h_t(y)dy² on the circle and their scalar
//! coefficient reductions.
//!
//! All supported families are separable, h_t(y) = f(t)·h₀(y), so the
//! reduction coefficients r(t) = ½∂_t ln h_t, d(t) = (h_t/h₀)^{1/4} and the
//! zeroth-order shift −r²/4 − ½∂_t r are functions of time alone and the
//! evaluation at complex time is exact closed-form substitution. The Wick
//! rotation t → is therefore never leaves the family's holomorphic envelope.

use crate::error::{CoreError, Result};
use crate::linalg::C64;

/// Real trigonometric polynomial c₀ + Σ_k c_k cos(ky) + Σ_k s_k sin(ky).
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    /// cos coefficients; index k multiplies cos(ky), index 0 is the constant.
    pub cos: Vec<f64>,
    /// sin coefficients; index k multiplies sin((k+1)y).
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn constant(c: f64) -> Self {
        TrigPoly { cos: vec![c], sin: vec![] }
    }

    pub fn zero() -> Self {
        TrigPoly { cos: vec![], sin: vec![] }
    }

    pub fn eval(&self, y: f64) -> f64 {
        let mut v = 0.0;
        for (k, c) in self.cos.iter().enumerate() {
            v += c * (k as f64 * y).cos();
        }
        for (k, s) in self.sin.iter().enumerate() {
            v += s * ((k + 1) as f64 * y).sin();
        }
        v
    }

    /// Largest harmonic present.
    pub fn degree(&self) -> usize {
        self.cos.len().saturating_sub(1).max(self.sin.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// h_t ≡ h₀
    Ultrastatic,
    /// h_t = e^{2κt} h₀
    Exponential,
    /// h_t = (1 + αt²) h₀
    Polynomial,
}

/// A t-dependent metric family on the circle together with the potential.
#[derive(Clone, Debug)]
pub struct MetricFamily {
    pub kind: FamilyKind,
    pub h0: TrigPoly,
    /// Spatially varying part of the potential.
    pub v: TrigPoly,
    /// Constant mass-squared term added to the potential.
    pub msq: f64,
    pub kappa: f64,
    pub alpha: f64,
}

impl MetricFamily {
    pub fn ultrastatic(h0: TrigPoly, v: TrigPoly, msq: f64) -> Self {
        MetricFamily { kind: FamilyKind::Ultrastatic, h0, v, msq, kappa: 0.0, alpha: 0.0 }
    }

    pub fn exponential(h0: TrigPoly, v: TrigPoly, msq: f64, kappa: f64) -> Self {
        MetricFamily { kind: FamilyKind::Exponential, h0, v, msq, kappa, alpha: 0.0 }
    }

    pub fn polynomial(h0: TrigPoly, v: TrigPoly, msq: f64, alpha: f64) -> Self {
        MetricFamily { kind: FamilyKind::Polynomial, h0, v, msq, kappa: 0.0, alpha }
    }

    pub fn potential(&self, y: f64) -> f64 {
        self.msq + self.v.eval(y)
    }

    pub fn is_ultrastatic(&self) -> bool {
        self.kind == FamilyKind::Ultrastatic
    }

    pub fn validate(&self, ygrid: &[f64]) -> Result<()> {
        for &y in ygrid {
            let h = self.h0.eval(y);
            if !(h > 0.0) {
                return Err(CoreError::InvalidFamily(format!(
                    "h0({y}) = {h} is not strictly positive"
                )));
            }
        }
        Ok(())
    }

    /// Scalar profile f(t) with h_t = f(t)·h₀, holomorphic in t.
    pub fn profile(&self, t: C64) -> C64 {
        match self.kind {
            FamilyKind::Ultrastatic => C64::new(1.0, 0.0),
            FamilyKind::Exponential => (t * 2.0 * self.kappa).exp(),
            FamilyKind::Polynomial => C64::new(1.0, 0.0) + t * t * self.alpha,
        }
    }

    /// r(t) = ½ ∂_t ln h_t.
    pub fn r_coeff(&self, t: C64) -> C64 {
        match self.kind {
            FamilyKind::Ultrastatic => C64::new(0.0, 0.0),
            FamilyKind::Exponential => C64::new(self.kappa, 0.0),
            FamilyKind::Polynomial => t * self.alpha / self.profile(t),
        }
    }

    /// ∂_t r(t).
    pub fn r_coeff_dt(&self, t: C64) -> C64 {
        match self.kind {
            FamilyKind::Ultrastatic | FamilyKind::Exponential => C64::new(0.0, 0.0),
            FamilyKind::Polynomial => {
                let f = self.profile(t);
                (f - t * t * 2.0 * self.alpha) * self.alpha / (f * f)
            }
        }
    }

    /// d(t) = (h_t/h₀)^{1/4} = f(t)^{1/4}, principal branch.
    pub fn d_coeff(&self, t: C64) -> C64 {
        match self.kind {
            FamilyKind::Ultrastatic => C64::new(1.0, 0.0),
            FamilyKind::Exponential => (t * 0.5 * self.kappa).exp(),
            FamilyKind::Polynomial => self.profile(t).powf(0.25),
        }
    }

    /// ∂_t d at t = 0; real for every real-analytic family.
    pub fn d_coeff_dt0(&self) -> f64 {
        match self.kind {
            FamilyKind::Ultrastatic | FamilyKind::Polynomial => 0.0,
            FamilyKind::Exponential => 0.5 * self.kappa,
        }
    }

    /// Samples every reduction coefficient of the family at complex time t on
    /// the given circle grid. The Wick-rotated coefficients are obtained by
    /// passing t = is.
    pub fn coeffs_at(&self, t: C64, ygrid: &[f64]) -> Result<CoefficientSample> {
        self.validate(ygrid)?;
        let f = self.profile(t);
        let h = ygrid.iter().map(|&y| f * self.h0.eval(y)).collect();
        let r = self.r_coeff(t);
        let a0_shift = -r * r * 0.25 - self.r_coeff_dt(t) * 0.5;
        Ok(CoefficientSample {
            t,
            h,
            r,
            d: self.d_coeff(t),
            dt_d0: self.d_coeff_dt0(),
            a0_shift,
        })
    }
}

/// All scalar coefficients of the reduced operator at one complex time.
#[derive(Clone, Debug)]
pub struct CoefficientSample {
    pub t: C64,
    /// h_t at each grid point.
    pub h: Vec<C64>,
    /// r(t) = ½ ∂_t ln h_t (spatially constant for separable families).
    pub r: C64,
    /// d(t) = |h_t|^{1/4}|h₀|^{-1/4}.
    pub d: C64,
    /// ∂_t d at t = 0.
    pub dt_d0: f64,
    /// −r²/4 − ½ ∂_t r, the zeroth-order term of the reduction.
    pub a0_shift: C64,
}

/// Outcome of the slab admissibility check.
#[derive(Clone, Copy, Debug)]
pub struct WickDomainReport {
    pub ok: bool,
    /// Largest half-width for which the pointwise bounds hold; infinite when
    /// they hold everywhere scanned.
    pub max_admissible_t: f64,
}

const SCAN_CAP: f64 = 64.0;

/// Pointwise bounds on the Wick-rotated metric that keep the rotated operator
/// uniformly elliptic and the reduction multiplier controlled:
///   ½ h₀ ≤ Re h_{is} ≤ 3/2 h₀,   |h_{is}| ≤ 2 h₀,
///   ½ ≤ |d̂(s)| ≤ 1,             |∂_y d̂|²/h₀ ≤ 1.
/// The gradient bound is trivial for separable families (d̂ is spatially
/// constant) and is kept for the report's completeness.
fn admissible_at(family: &MetricFamily, s: f64) -> bool {
    let tol = 1e-12;
    let f = family.profile(C64::new(0.0, s));
    let dhat_abs = family.d_coeff(C64::new(0.0, s)).norm();
    f.re >= 0.5 - tol
        && f.re <= 1.5 + tol
        && f.norm() <= 2.0 + tol
        && dhat_abs >= 0.5 - tol
        && dhat_abs <= 1.0 + tol
}

/// Evaluates the admissibility bounds for all |s| ≤ T and locates the largest
/// admissible half-width by scan plus bisection (1e−6 absolute).
pub fn check_wick_domain(family: &MetricFamily, t_half: f64, ygrid: &[f64]) -> Result<WickDomainReport> {
    if !(t_half > 0.0) {
        return Err(CoreError::BadDiscretization(format!("T = {t_half} must be positive")));
    }
    family.validate(ygrid)?;
    // conjugation symmetry f(-is) = conj(f(is)) makes s ≥ 0 sufficient
    let steps = 4096;
    let cap = SCAN_CAP.max(2.0 * t_half);
    let mut first_bad: Option<f64> = None;
    for k in 0..=steps {
        let s = cap * k as f64 / steps as f64;
        if !admissible_at(family, s) {
            first_bad = Some(s);
            break;
        }
    }
    let max_admissible_t = match first_bad {
        None => f64::INFINITY,
        Some(bad) => {
            let mut lo = (bad - cap / steps as f64).max(0.0);
            let mut hi = bad;
            while hi - lo > 1e-6 {
                let mid = 0.5 * (lo + hi);
                if admissible_at(family, mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
    };
    Ok(WickDomainReport { ok: t_half <= max_admissible_t, max_admissible_t })
}
