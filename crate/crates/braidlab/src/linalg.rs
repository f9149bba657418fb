//! Dense complex linear algebra shared by every module.
//!
//! Matrices are `nalgebra::DMatrix<Complex<f64>>` in column-major storage.
//! The decompositions are implemented here rather than taken from a BLAS
//! backend so results are bit-identical across platforms: a cyclic Jacobi
//! eigensolver for Hermitian matrices (it also produces the quadrature
//! nodes elsewhere), a deterministic power iteration for large spectral
//! norms, and a scaled Taylor series for matrix exponentials.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const IM: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn ident(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Column-major axpy matrix product. Faster than the generic operator for
/// the complex scalar type and keeps a fixed summation order.
pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    let (m, ka) = a.shape();
    let (kb, n) = b.shape();
    assert_eq!(ka, kb, "matmul: inner dimensions {ka} vs {kb}");
    let mut c = CMat::zeros(m, n);
    let asl = a.as_slice();
    let bsl = b.as_slice();
    let csl = c.as_mut_slice();
    for j in 0..n {
        let cj = &mut csl[j * m..(j + 1) * m];
        for k in 0..ka {
            let f = bsl[j * kb + k];
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            let ak = &asl[k * m..(k + 1) * m];
            for i in 0..m {
                cj[i] += f * ak[i];
            }
        }
    }
    c
}

pub fn matvec(a: &CMat, v: &CVec) -> CVec {
    let (m, n) = a.shape();
    assert_eq!(n, v.len(), "matvec: dimensions {n} vs {}", v.len());
    let mut out = CVec::zeros(m);
    let asl = a.as_slice();
    for k in 0..n {
        let f = v[k];
        if f.re == 0.0 && f.im == 0.0 {
            continue;
        }
        let ak = &asl[k * m..(k + 1) * m];
        for i in 0..m {
            out[i] += f * ak[i];
        }
    }
    out
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues (ascending) and a unitary of eigenvectors for a Hermitian
/// matrix, via cyclic Jacobi rotations. The Hermitian requirement is the
/// caller's invariant; the routine reads only one triangle's phases.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "hermitian_eigen: square input required");
    let mut m = a.clone();
    let mut v = ident(n);
    if n <= 1 {
        let vals = (0..n).map(|i| m[(i, i)].re).collect();
        return (vals, v);
    }
    let scale = frobenius(&m).max(f64::MIN_POSITIVE);
    let tol = 1e-30 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let z = m[(p, q)];
                let az = z.norm();
                if az <= tol {
                    continue;
                }
                let phase = z / az;
                let x = m[(p, p)].re;
                let y = m[(q, q)].re;
                let tau = (x - y) / (2.0 * az);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = s * phase;
                let spc = s * phase.conj();
                // columns p,q of both m and v transform by the rotation
                for i in 0..n {
                    let mp = m[(i, p)];
                    let mq = m[(i, q)];
                    m[(i, p)] = c * mp + spc * mq;
                    m[(i, q)] = -sp * mp + c * mq;
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp + spc * vq;
                    v[(i, q)] = -sp * vp + c * vq;
                }
                // rows p,q by the adjoint rotation
                for jj in 0..n {
                    let mp = m[(p, jj)];
                    let mq = m[(q, jj)];
                    m[(p, jj)] = c * mp + sp * mq;
                    m[(q, jj)] = -spc * mp + c * mq;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_v = CMat::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        sorted_v.set_column(new, &v.column(old));
    }
    (sorted_vals, sorted_v)
}

fn spectral_norm_eig(a: &CMat) -> f64 {
    let (m, n) = a.shape();
    let gram = if m <= n {
        matmul(a, &a.adjoint())
    } else {
        matmul(&a.adjoint(), a)
    };
    let (vals, _) = hermitian_eigen(&gram);
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

fn spectral_norm_power(a: &CMat) -> f64 {
    let (m, n) = a.shape();
    let dim = n.min(m);
    // deterministic dense start vector, spread over all directions
    let mut v = CVec::from_fn(n.max(m), |i, _| {
        let th = 0.7 * i as f64 + 0.013 * (i * i) as f64;
        c64(th.cos(), th.sin())
    });
    v = v.rows(0, n).into_owned();
    let mut nv = v.norm();
    if nv == 0.0 {
        return 0.0;
    }
    v /= c64(nv, 0.0);
    let _ = dim;
    let mut sigma2 = 0.0f64;
    let mut stable = 0;
    for _ in 0..500 {
        let w = matvec(&a.adjoint(), &matvec(a, &v));
        let new_sigma2 = v.dotc(&w).re.max(0.0);
        nv = w.norm();
        if nv <= 1e-300 {
            return 0.0;
        }
        v = w / c64(nv, 0.0);
        let rel = (new_sigma2 - sigma2).abs() / new_sigma2.max(f64::MIN_POSITIVE);
        sigma2 = new_sigma2;
        if rel <= 1e-13 {
            stable += 1;
            if stable >= 3 {
                break;
            }
        } else {
            stable = 0;
        }
    }
    sigma2.sqrt()
}

/// Largest singular value. Exact dense eigensolve below a size cutoff,
/// deterministic power iteration above it.
pub fn spectral_norm(a: &CMat) -> f64 {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return 0.0;
    }
    if m.min(n) <= 160 {
        spectral_norm_eig(a)
    } else {
        spectral_norm_power(a)
    }
}

/// exp(M) by scaling and squaring with a Taylor series on the scaled block.
pub fn matrix_exp(m: &CMat) -> CMat {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix_exp: square input required");
    // 1-norm controls the scaling depth
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm1 > 0.25 {
        (norm1 / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.map(|z| z / c64(2f64.powi(s as i32), 0.0));
    let mut result = ident(n);
    let mut term = ident(n);
    for k in 1..=30 {
        term = matmul(&term, &scaled).map(|z| z / c64(k as f64, 0.0));
        result += &term;
        if max_abs(&term) < 1e-19 {
            break;
        }
    }
    for _ in 0..s {
        result = matmul(&result, &result);
    }
    result
}

/// exp(i t H) for Hermitian H and complex time t. Unitary for real t.
pub fn unitary_exp(h: &CMat, t: C64) -> CMat {
    matrix_exp(&h.map(|z| IM * t * z))
}

/// Result of orthonormalizing a family of vectors.
pub struct GramSchmidt {
    pub basis: Vec<CVec>,
    /// coeff[k] expands input k in the basis: v_k = sum_i coeff[k][i] e_i
    pub coeff: Vec<Vec<C64>>,
    /// indices of inputs that produced a new basis vector
    pub pivots: Vec<usize>,
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Inputs whose
/// residual falls below `tol` (relative to their norm) are recorded as
/// dependent and add no basis vector.
pub fn gram_schmidt(vectors: &[CVec], tol: f64) -> GramSchmidt {
    let mut basis: Vec<CVec> = Vec::new();
    let mut coeff: Vec<Vec<C64>> = Vec::new();
    let mut pivots = Vec::new();
    for (k, vin) in vectors.iter().enumerate() {
        let mut w = vin.clone();
        let mut r = vec![ZERO; basis.len()];
        for _pass in 0..2 {
            for (i, e) in basis.iter().enumerate() {
                let c = e.dotc(&w);
                w -= e * c;
                r[i] += c;
            }
        }
        let rem = w.norm();
        if rem > tol * vin.norm().max(f64::MIN_POSITIVE) {
            basis.push(w / c64(rem, 0.0));
            r.push(c64(rem, 0.0));
            pivots.push(k);
        }
        coeff.push(r);
    }
    let dim = basis.len();
    for r in &mut coeff {
        r.resize(dim, ZERO);
    }
    GramSchmidt {
        basis,
        coeff,
        pivots,
    }
}

/// Largest principal angle (radians) between the spans of two families.
/// Returns pi/2 immediately when the spans have different dimensions.
pub fn subspace_max_angle(fam_a: &[CVec], fam_b: &[CVec]) -> f64 {
    let ga = gram_schmidt(fam_a, 1e-10);
    let gb = gram_schmidt(fam_b, 1e-10);
    let (da, db) = (ga.basis.len(), gb.basis.len());
    if da != db {
        return std::f64::consts::FRAC_PI_2;
    }
    if da == 0 {
        return 0.0;
    }
    let mut m = CMat::zeros(da, db);
    for (i, e) in ga.basis.iter().enumerate() {
        for (j, f) in gb.basis.iter().enumerate() {
            m[(i, j)] = e.dotc(f);
        }
    }
    let gram = matmul(&m.adjoint(), &m);
    let (vals, _) = hermitian_eigen(&gram);
    let sigma_min = vals.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    sigma_min.clamp(0.0, 1.0).acos()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sigma_y() -> CMat {
        CMat::from_row_slice(2, 2, &[ZERO, c64(0.0, -1.0), c64(0.0, 1.0), ZERO])
    }

    fn test_hermitian(n: usize) -> CMat {
        // fixed pseudo-random Hermitian matrix, no RNG dependency
        let b = CMat::from_fn(n, n, |i, j| {
            let t = (i * n + j) as f64;
            c64((1.3 * t).sin(), (0.7 * t + 0.2).cos())
        });
        &b + b.adjoint()
    }

    #[test]
    fn jacobi_diagonalizes_sigma_y() {
        let (vals, v) = hermitian_eigen(&sigma_y());
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-14);
        let vhv = matmul(&v.adjoint(), &v);
        assert!(max_abs(&(&vhv - ident(2))) < 1e-14);
    }

    #[test]
    fn jacobi_reconstructs_input() {
        let a = test_hermitian(7);
        let (vals, v) = hermitian_eigen(&a);
        let d = CMat::from_fn(7, 7, |i, j| {
            if i == j {
                c64(vals[i], 0.0)
            } else {
                ZERO
            }
        });
        let rebuilt = matmul(&matmul(&v, &d), &v.adjoint());
        assert!(max_abs(&(&rebuilt - &a)) < 1e-12 * frobenius(&a).max(1.0));
        let vhv = matmul(&v.adjoint(), &v);
        assert!(max_abs(&(&vhv - ident(7))) < 1e-13);
    }

    #[test]
    fn spectral_norm_matches_eigenvalues() {
        let d = CMat::from_fn(3, 3, |i, j| {
            if i == j {
                c64([3.0, -5.0, 1.0][i], 0.0)
            } else {
                ZERO
            }
        });
        assert_abs_diff_eq!(spectral_norm(&d), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_norm_paths_agree() {
        let a = test_hermitian(60);
        let via_eig = spectral_norm_eig(&a);
        let via_power = spectral_norm_power(&a);
        assert_abs_diff_eq!(via_eig, via_power, epsilon = 1e-9 * via_eig);
    }

    #[test]
    fn matmul_matches_operator() {
        let a = test_hermitian(5);
        let b = CMat::from_fn(5, 4, |i, j| c64(i as f64 - j as f64, 0.5 * j as f64));
        let fast = matmul(&a, &b);
        let reference = &a * &b;
        assert!(max_abs(&(&fast - &reference)) < 1e-13);
        let v = CVec::from_fn(4, |i, _| c64(1.0 + i as f64, -0.3));
        let fastv = matvec(&b, &v);
        let refv = &b * &v;
        assert!((&fastv - &refv).norm() < 1e-13);
    }

    #[test]
    fn exponential_of_pauli_z_rotation() {
        let sz = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        let u = unitary_exp(&sz, c64(std::f64::consts::FRAC_PI_2, 0.0));
        assert!((u[(0, 0)] - IM).norm() < 1e-14);
        assert!((u[(1, 1)] + IM).norm() < 1e-14);
        assert!(u[(0, 1)].norm() < 1e-15);
        // imaginary time gives the positive operator diag(e^-1, e^1)
        let g = unitary_exp(&sz, IM);
        assert_abs_diff_eq!(g[(0, 0)].re, (-1.0f64).exp(), epsilon = 1e-13);
        assert_abs_diff_eq!(g[(1, 1)].re, 1.0f64.exp(), epsilon = 1e-12);
    }

    #[test]
    fn exponential_is_unitary_for_real_time() {
        let h = test_hermitian(6);
        let u = unitary_exp(&h, c64(0.83, 0.0));
        let uhu = matmul(&u.adjoint(), &u);
        assert!(max_abs(&(&uhu - ident(6))) < 1e-12);
    }

    #[test]
    fn gram_schmidt_reconstructs_inputs() {
        let vecs: Vec<CVec> = (0..3)
            .map(|k| {
                CVec::from_fn(5, |i, _| {
                    c64(
                        ((i + 1) as f64).powi(k as i32 + 1),
                        (i as f64 * (k as f64 + 0.5)).sin(),
                    )
                })
            })
            .collect();
        let gs = gram_schmidt(&vecs, 1e-10);
        assert_eq!(gs.basis.len(), 3);
        for (k, v) in vecs.iter().enumerate() {
            let mut rebuilt = CVec::zeros(5);
            for (i, e) in gs.basis.iter().enumerate() {
                rebuilt += e * gs.coeff[k][i];
            }
            assert!((&rebuilt - v).norm() < 1e-12);
        }
        // orthonormality
        for i in 0..3 {
            for j in 0..3 {
                let d = gs.basis[i].dotc(&gs.basis[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - c64(want, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn gram_schmidt_detects_dependence() {
        let v0 = CVec::from_fn(4, |i, _| c64(i as f64 + 1.0, 0.0));
        let v1 = &v0 * c64(2.0, 1.0);
        let gs = gram_schmidt(&[v0, v1], 1e-10);
        assert_eq!(gs.basis.len(), 1);
        assert_eq!(gs.pivots, vec![0]);
    }

    #[test]
    fn subspace_angle_detects_rotation() {
        let e0 = CVec::from_fn(3, |i, _| if i == 0 { ONE } else { ZERO });
        let e1 = CVec::from_fn(3, |i, _| if i == 1 { ONE } else { ZERO });
        let same = subspace_max_angle(&[e0.clone()], &[e0.clone() * c64(0.0, 2.0)]);
        assert!(same < 1e-8);
        let orth = subspace_max_angle(&[e0], &[e1]);
        assert_abs_diff_eq!(orth, std::f64::consts::FRAC_PI_2, epsilon = 1e-10);
    }
}
