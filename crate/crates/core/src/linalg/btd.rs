use super::{eigh, C64, CMat, LuFactors};

/// Block-tridiagonal complex matrix with square blocks of a fixed size.
///
/// `lower[j]` is the block in row j+1, column j; `upper[j]` the block in
/// row j, column j+1.
#[derive(Clone)]
pub struct BlockTridiag {
    pub block: usize,
    pub diag: Vec<CMat>,
    pub lower: Vec<CMat>,
    pub upper: Vec<CMat>,
}

impl BlockTridiag {
    pub fn new(diag: Vec<CMat>, lower: Vec<CMat>, upper: Vec<CMat>) -> Self {
        let m = diag.len();
        assert!(m >= 1);
        assert_eq!(lower.len(), m - 1);
        assert_eq!(upper.len(), m - 1);
        let block = diag[0].nrows();
        BlockTridiag { block, diag, lower, upper }
    }

    pub fn nblocks(&self) -> usize {
        self.diag.len()
    }

    pub fn dim(&self) -> usize {
        self.block * self.diag.len()
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        let (b, m) = (self.block, self.nblocks());
        assert_eq!(v.len(), b * m);
        let mut out = vec![C64::new(0.0, 0.0); b * m];
        for j in 0..m {
            let seg = &v[j * b..(j + 1) * b];
            let dj = self.diag[j].matvec(seg);
            for (o, x) in out[j * b..(j + 1) * b].iter_mut().zip(dj) {
                *o += x;
            }
            if j + 1 < m {
                let up = self.upper[j].matvec(&v[(j + 1) * b..(j + 2) * b]);
                for (o, x) in out[j * b..(j + 1) * b].iter_mut().zip(up) {
                    *o += x;
                }
                let lo = self.lower[j].matvec(seg);
                for (o, x) in out[(j + 1) * b..(j + 2) * b].iter_mut().zip(lo) {
                    *o += x;
                }
            }
        }
        out
    }

    /// Conjugate-transpose of the whole operator, still block-tridiagonal.
    pub fn adjoint(&self) -> BlockTridiag {
        let m = self.nblocks();
        let diag = self.diag.iter().map(|d| d.adjoint()).collect();
        let lower = (0..m - 1).map(|j| self.upper[j].adjoint()).collect();
        let upper = (0..m - 1).map(|j| self.lower[j].adjoint()).collect();
        BlockTridiag::new(diag, lower, upper)
    }

    /// Hermitian part ½(A + A†).
    pub fn herm_part(&self) -> BlockTridiag {
        let half = C64::new(0.5, 0.0);
        let m = self.nblocks();
        let diag = self.diag.iter().map(|d| d.add(&d.adjoint()).scale(half)).collect();
        let lower: Vec<CMat> =
            (0..m - 1).map(|j| self.lower[j].add(&self.upper[j].adjoint()).scale(half)).collect();
        let upper = lower.iter().map(|l| l.adjoint()).collect();
        BlockTridiag::new(diag, lower, upper)
    }

    /// Left- and right-multiply by a (full-dimension) diagonal matrix:
    /// diag(l) · A · diag(r).
    pub fn diag_conjugate(&self, l: &[C64], r: &[C64]) -> BlockTridiag {
        let b = self.block;
        assert_eq!(l.len(), self.dim());
        assert_eq!(r.len(), self.dim());
        let seg = |v: &[C64], j: usize| v[j * b..(j + 1) * b].to_vec();
        let m = self.nblocks();
        let diag =
            (0..m).map(|j| self.diag[j].scale_rows(&seg(l, j)).scale_cols(&seg(r, j))).collect();
        let lower = (0..m - 1)
            .map(|j| self.lower[j].scale_rows(&seg(l, j + 1)).scale_cols(&seg(r, j)))
            .collect();
        let upper = (0..m - 1)
            .map(|j| self.upper[j].scale_rows(&seg(l, j)).scale_cols(&seg(r, j + 1)))
            .collect();
        BlockTridiag::new(diag, lower, upper)
    }

    /// 2-norm estimate by power iteration on A†A through matvecs.
    pub fn norm2_est(&self) -> f64 {
        let n = self.dim();
        let at = self.adjoint();
        let mut v: Vec<C64> =
            (0..n).map(|k| C64::new(1.0 + (k as f64 * 0.61).sin(), (k as f64 * 1.7).cos())).collect();
        let mut sigma = 0.0;
        for _ in 0..120 {
            let w = at.matvec(&self.matvec(&v));
            let nw = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nw == 0.0 {
                return 0.0;
            }
            let next = nw.sqrt();
            let done = (next - sigma).abs() <= 1e-10 * next.max(1.0);
            sigma = next;
            v = w.into_iter().map(|z| z / nw).collect();
            if done {
                break;
            }
        }
        sigma
    }

    /// Block Thomas factorization; fails on a singular Schur complement.
    pub fn factor(&self) -> Option<BtdFactorization> {
        let m = self.nblocks();
        let mut pivots: Vec<LuFactors> = Vec::with_capacity(m);
        let mut mults: Vec<CMat> = Vec::with_capacity(m.saturating_sub(1));
        let b = self.block;
        let mut schur = self.diag[0].clone();
        pivots.push(schur.lu()?);
        for j in 1..m {
            // L_j = lower[j-1] · S_{j-1}⁻¹
            let sinv = pivots[j - 1].solve_mat(&CMat::identity(b));
            let lj = self.lower[j - 1].matmul(&sinv);
            schur = self.diag[j].sub(&lj.matmul(&self.upper[j - 1]));
            pivots.push(schur.lu()?);
            mults.push(lj);
        }
        Some(BtdFactorization {
            block: self.block,
            pivots,
            mults,
            uppers: self.upper.clone(),
        })
    }

    /// Number of eigenvalues of a Hermitian block-tridiagonal matrix below
    /// `sigma`, by Sylvester inertia of the shifted block LDL† recursion.
    /// Returns None when a Schur complement is numerically singular at this
    /// shift; the caller should nudge sigma.
    pub fn herm_count_below(&self, sigma: f64) -> Option<usize> {
        let m = self.nblocks();
        let b = self.block;
        let mut count = 0usize;
        let mut prev_inv: Option<CMat> = None;
        let scale = self.norm2_est().max(1.0);
        for j in 0..m {
            let mut s = self.diag[j].clone();
            s.add_diag(C64::new(-sigma, 0.0));
            if let Some(pinv) = &prev_inv {
                let a = &self.lower[j - 1]; // = (upper[j-1])† for Hermitian input
                s = s.sub(&a.matmul(pinv).matmul(&a.adjoint()));
            }
            let hs = s.add(&s.adjoint()).scale(C64::new(0.5, 0.0));
            let (lam, v) = eigh(&hs);
            let mut inv = CMat::zeros(b, b);
            for (k, &l) in lam.iter().enumerate() {
                if l.abs() < 1e-13 * scale {
                    return None;
                }
                if l < 0.0 {
                    count += 1;
                }
                let col = v.col(k);
                for p in 0..b {
                    for q in 0..b {
                        inv[(p, q)] += col[p] * col[q].conj() / l;
                    }
                }
            }
            prev_inv = Some(inv);
        }
        Some(count)
    }

    /// Smallest eigenvalue of a Hermitian block-tridiagonal matrix by inertia
    /// bisection, to absolute tolerance ~1e-9·scale.
    pub fn herm_min_eig(&self) -> f64 {
        let scale = self.norm2_est().max(1e-30);
        let mut lo = -1.01 * scale;
        let mut hi = 1.01 * scale;
        let count = |s: f64| -> usize {
            let mut shift = s;
            for k in 0..8 {
                if let Some(c) = self.herm_count_below(shift) {
                    return c;
                }
                shift = s + scale * 1e-12 * ((k + 1) as f64);
            }
            // fall back to treating the shift as an eigenvalue from below
            self.herm_count_below(s - scale * 1e-9).unwrap_or(0)
        };
        debug_assert!(count(hi) >= 1, "upper bisection bound misses the spectrum");
        let tol = 1e-9 * scale;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if count(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Reusable factorization handle for repeated solves.
pub struct BtdFactorization {
    block: usize,
    pivots: Vec<LuFactors>,
    mults: Vec<CMat>,
    uppers: Vec<CMat>,
}

impl BtdFactorization {
    pub fn dim(&self) -> usize {
        self.block * self.pivots.len()
    }

    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let (b, m) = (self.block, self.pivots.len());
        assert_eq!(rhs.len(), b * m, "rhs dimension mismatch");
        let mut y: Vec<Vec<C64>> = Vec::with_capacity(m);
        y.push(rhs[0..b].to_vec());
        for j in 1..m {
            let mut seg = rhs[j * b..(j + 1) * b].to_vec();
            let corr = self.mults[j - 1].matvec(&y[j - 1]);
            for (s, c) in seg.iter_mut().zip(corr) {
                *s -= c;
            }
            y.push(seg);
        }
        let mut x = vec![C64::new(0.0, 0.0); b * m];
        let mut xj = self.pivots[m - 1].solve_vec(&y[m - 1]);
        x[(m - 1) * b..m * b].copy_from_slice(&xj);
        for j in (0..m - 1).rev() {
            let corr = self.uppers[j].matvec(&xj);
            let mut seg = y[j].clone();
            for (s, c) in seg.iter_mut().zip(corr) {
                *s -= c;
            }
            xj = self.pivots[j].solve_vec(&seg);
            x[j * b..(j + 1) * b].copy_from_slice(&xj);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample_btd(m: usize, b: usize) -> BlockTridiag {
        let diag = (0..m)
            .map(|j| {
                CMat::from_fn(b, b, |p, q| {
                    let t = (j * 5 + p * 3 + q) as f64;
                    c(t.sin() + if p == q { 6.0 } else { 0.0 }, 0.3 * t.cos())
                })
            })
            .collect();
        let lower = (0..m - 1)
            .map(|j| CMat::from_fn(b, b, |p, q| c(-0.5 - (j + p + q) as f64 * 0.01, 0.1)))
            .collect();
        let upper = (0..m - 1)
            .map(|j| CMat::from_fn(b, b, |p, q| c(-0.4 + (j + p) as f64 * 0.01, -0.2 * q as f64)))
            .collect();
        BlockTridiag::new(diag, lower, upper)
    }

    #[test]
    fn factor_solve_roundtrip() {
        let a = sample_btd(12, 4);
        let n = a.dim();
        let x: Vec<C64> = (0..n).map(|i| c((i as f64 * 0.3).sin(), (i as f64 * 0.7).cos())).collect();
        let bvec = a.matvec(&x);
        let f = a.factor().unwrap();
        let got = f.solve(&bvec);
        let err: f64 = got.iter().zip(&x).map(|(g, e)| (g - e).norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-10, "err = {err}");
    }

    #[test]
    fn herm_min_eig_matches_dense() {
        // small Hermitian case cross-checked against full Jacobi
        let m = 6;
        let b = 3;
        let base = sample_btd(m, b);
        let h = base.herm_part();
        let n = h.dim();
        let mut dense = CMat::zeros(n, n);
        for j in 0..m {
            for p in 0..b {
                for q in 0..b {
                    dense[(j * b + p, j * b + q)] = h.diag[j][(p, q)];
                    if j + 1 < m {
                        dense[((j + 1) * b + p, j * b + q)] = h.lower[j][(p, q)];
                        dense[(j * b + p, (j + 1) * b + q)] = h.upper[j][(p, q)];
                    }
                }
            }
        }
        let (lam, _) = eigh(&dense);
        let got = h.herm_min_eig();
        assert!((got - lam[0]).abs() < 1e-7 * lam[0].abs().max(1.0), "{got} vs {}", lam[0]);
    }

    #[test]
    fn norm2_est_agrees_with_dense_power() {
        let a = sample_btd(5, 2);
        let n = a.dim();
        let dense = CMat::from_fn(n, n, |i, j| {
            let e: Vec<C64> = (0..n).map(|k| if k == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect();
            a.matvec(&e)[i]
        });
        assert!((a.norm2_est() - dense.norm2()).abs() < 1e-6 * dense.norm2());
    }
}
