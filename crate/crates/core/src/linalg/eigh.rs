use super::{C64, CMat};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues sorted ascending and the unitary matrix of eigenvectors
/// as columns, so `a ≈ v · diag(λ) · v†`. Input asymmetry beyond roundoff is
/// not detected; the caller is responsible for passing a Hermitian matrix.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigh needs a square matrix");
    let mut h = a.clone();
    let mut v = CMat::identity(n);
    let scale = h.norm_fro().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += h[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = h[(p, q)];
                let babs = b.norm();
                if babs <= 1e-300 {
                    continue;
                }
                let w = b / babs; // phase of the pivot entry
                let app = h[(p, p)].re;
                let aqq = h[(q, q)].re;
                let tau = (aqq - app) / (2.0 * babs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = [[c, s·w],[−s·w̄, c]] zeroes the (p,q) entry of U†HU.
                let (cw, csw) = (C64::new(c, 0.0), w * s);
                for k in 0..n {
                    let hkp = h[(k, p)];
                    let hkq = h[(k, q)];
                    h[(k, p)] = hkp * cw - hkq * csw.conj();
                    h[(k, q)] = hkp * csw + hkq * cw;
                }
                for k in 0..n {
                    let hpk = h[(p, k)];
                    let hqk = h[(q, k)];
                    h[(p, k)] = cw * hpk - csw * hqk;
                    h[(q, k)] = csw.conj() * hpk + cw * hqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cw - vkq * csw.conj();
                    v[(k, q)] = vkp * csw + vkq * cw;
                }
                h[(p, q)] = C64::new(0.0, 0.0);
                h[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let lam: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    order.sort_by(|&i, &j| lam[i].partial_cmp(&lam[j]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| lam[i]).collect();
    let mut vs = CMat::zeros(n, n);
    for (jnew, &jold) in order.iter().enumerate() {
        vs.set_col(jnew, &v.col(jold));
    }
    (sorted, vs)
}
