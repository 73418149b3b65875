use super::C64;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMat {
    nrows: usize,
    ncols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for CMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMat {}x{}", self.nrows, self.ncols)?;
        for i in 0..self.nrows.min(8) {
            for j in 0..self.ncols.min(8) {
                write!(f, " {:+.3e}{:+.3e}i", self[(i, j)].re, self[(i, j)].im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.ncols + j]
    }
}

impl CMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMat { nrows, ncols, data: vec![C64::new(0.0, 0.0); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.nrows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.nrows);
        for i in 0..self.nrows {
            self[(i, j)] = v[i];
        }
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.ncols, other.nrows, "matmul shape mismatch");
        let mut out = CMat::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.ncols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.ncols, v.len(), "matvec shape mismatch");
        (0..self.nrows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: C64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn add_diag(&mut self, c: C64) {
        let n = self.nrows.min(self.ncols);
        for i in 0..n {
            self[(i, i)] += c;
        }
    }

    /// Scale row i by r[i] (left multiplication by diag(r)).
    pub fn scale_rows(&self, r: &[C64]) -> CMat {
        assert_eq!(r.len(), self.nrows);
        CMat::from_fn(self.nrows, self.ncols, |i, j| r[i] * self[(i, j)])
    }

    /// Scale column j by c[j] (right multiplication by diag(c)).
    pub fn scale_cols(&self, c: &[C64]) -> CMat {
        assert_eq!(c.len(), self.ncols);
        CMat::from_fn(self.nrows, self.ncols, |i, j| self[(i, j)] * c[j])
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operator 2-norm via power iteration on A†A, deterministic start vector.
    pub fn norm2(&self) -> f64 {
        if self.nrows == 0 || self.ncols == 0 {
            return 0.0;
        }
        let fro = self.norm_fro();
        if fro == 0.0 {
            return 0.0;
        }
        let at = self.adjoint();
        let mut v: Vec<C64> = (0..self.ncols)
            .map(|k| C64::new(1.0 + (k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
            .collect();
        let mut sigma = 0.0;
        for _ in 0..300 {
            let w = at.matvec(&self.matvec(&v));
            let nw = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nw == 0.0 {
                return 0.0;
            }
            let next = nw.sqrt();
            let converged = (next - sigma).abs() <= 1e-12 * next.max(1.0);
            sigma = next;
            v = w.into_iter().map(|z| z / nw).collect();
            if converged {
                break;
            }
        }
        sigma
    }

    pub fn lu(&self) -> Option<LuFactors> {
        LuFactors::new(self)
    }

    pub fn solve(&self, rhs: &[C64]) -> Option<Vec<C64>> {
        self.lu().map(|f| f.solve_vec(rhs))
    }
}

/// Dense LU with partial pivoting.
#[derive(Clone)]
pub struct LuFactors {
    lu: CMat,
    piv: Vec<usize>,
}

impl LuFactors {
    pub fn new(a: &CMat) -> Option<Self> {
        assert_eq!(a.nrows, a.ncols, "LU needs a square matrix");
        let n = a.nrows;
        let mut lu = a.clone();
        let mut piv = vec![0usize; n];
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let m = lu[(i, k)].norm();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best <= 1e-300 || best < 1e-16 * scale {
                return None;
            }
            piv[k] = p;
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let m = lu[(i, k)] / d;
                lu[(i, k)] = m;
                for j in k + 1..n {
                    let s = lu[(k, j)];
                    lu[(i, j)] -= m * s;
                }
            }
        }
        Some(LuFactors { lu, piv })
    }

    pub fn solve_vec(&self, rhs: &[C64]) -> Vec<C64> {
        let n = self.lu.nrows;
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        // rows were swapped in full during factorization, so the whole
        // permutation must hit the rhs before the triangular sweeps
        for k in 0..n {
            x.swap(k, self.piv[k]);
        }
        for k in 0..n {
            for i in k + 1..n {
                let m = self.lu[(i, k)];
                let s = x[k];
                x[i] -= m * s;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let s = x[j];
                x[i] -= self.lu[(i, j)] * s;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn solve_mat(&self, rhs: &CMat) -> CMat {
        let mut out = CMat::zeros(rhs.nrows(), rhs.ncols());
        for j in 0..rhs.ncols() {
            out.set_col(j, &self.solve_vec(&rhs.col(j)));
        }
        out
    }
}
