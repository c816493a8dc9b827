//! Dense symmetric eigen machinery for the Gram and overlap matrices.
//! Cyclic Jacobi is plenty at the sizes used here (n <= 500) and is
//! bitwise deterministic.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use crate::fp::F64Ext;

/// Eigendecomposition of a symmetric matrix given row-major. Returns
/// eigenvalues ascending and eigenvectors as columns (v[i + k * n] is
/// component i of the k-th eigenvector).
pub(crate) fn jacobi_eigh(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i + i * n] = 1.0;
    }
    if n <= 1 {
        return (m, v);
    }
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let stop = (1e-15 * frob).max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() * core::f64::consts::SQRT_2 <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = m[i * n + p];
                        let aiq = m[i * n + q];
                        let new_ip = aip - s * (aiq + tau * aip);
                        let new_iq = aiq + s * (aip - tau * aiq);
                        m[i * n + p] = new_ip;
                        m[p * n + i] = new_ip;
                        m[i * n + q] = new_iq;
                        m[q * n + i] = new_iq;
                    }
                }
                for i in 0..n {
                    let vip = v[i + p * n];
                    let viq = v[i + q * n];
                    v[i + p * n] = vip - s * (viq + tau * vip);
                    v[i + q * n] = viq + s * (vip - tau * viq);
                }
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig[i].partial_cmp(&eig[j]).unwrap());
    let sorted_eig: Vec<f64> = order.iter().map(|&i| eig[i]).collect();
    let mut sorted_v = vec![0.0; n * n];
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            sorted_v[i + k * n] = v[i + src * n];
        }
    }
    eig = sorted_eig;
    (eig, sorted_v)
}

/// Largest generalized eigenvalue of (A, G) with G symmetric positive
/// semi-definite; directions of G below `1/cond_cap` of its largest
/// eigenvalue are pruned before whitening. Returns the eigenvalue and the
/// number of retained directions.
pub(crate) fn gen_eig_max(a: &[f64], g: &[f64], n: usize, cond_cap: f64) -> (f64, usize) {
    let (ge, gv) = jacobi_eigh(g, n);
    let gmax = ge.iter().cloned().fold(0.0_f64, f64::max);
    if gmax <= 0.0 {
        return (0.0, 0);
    }
    let keep: Vec<usize> = (0..n).filter(|&k| ge[k] > gmax / cond_cap).collect();
    let m = keep.len();
    if m == 0 {
        return (0.0, 0);
    }
    // B = W^T A W with W columns g_k / sqrt(lambda_k).
    let mut w = vec![0.0; n * m];
    for (col, &k) in keep.iter().enumerate() {
        let s = 1.0 / ge[k].sqrt();
        for i in 0..n {
            w[i + col * n] = gv[i + k * n] * s;
        }
    }
    let mut aw = vec![0.0; n * m];
    for col in 0..m {
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += a[i * n + j] * w[j + col * n];
            }
            aw[i + col * n] = acc;
        }
    }
    let mut b = vec![0.0; m * m];
    for r in 0..m {
        for col in 0..m {
            let mut acc = 0.0;
            for i in 0..n {
                acc += w[i + r * n] * aw[i + col * n];
            }
            b[r * m + col] = acc;
        }
    }
    // Symmetrize against rounding.
    for r in 0..m {
        for col in (r + 1)..m {
            let s = 0.5 * (b[r * m + col] + b[col * m + r]);
            b[r * m + col] = s;
            b[col * m + r] = s;
        }
    }
    let (be, _) = jacobi_eigh(&b, m);
    (be[m - 1], m)
}
