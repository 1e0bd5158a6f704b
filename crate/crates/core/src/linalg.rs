//! Dense complex linear-algebra helpers on top of nalgebra.
//!
//! Everything here works on `DMatrix<Complex<f64>>`. Eigenvectors come from the complex
//! Schur form by triangular back-substitution; generalized pencils `(A, E)` are reduced to
//! a standard problem by a shift-and-invert transformation.

use nalgebra::{Complex, DMatrix, DVector, Schur, SVD};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

pub const I: C64 = Complex { re: 0.0, im: 1.0 };

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn real(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

/// 1x1 matrix.
pub fn scalar(x: C64) -> CMat {
    CMat::from_element(1, 1, x)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let svd = SVD::new(m.clone(), false, false);
    svd.singular_values.iter().copied().collect()
}

/// Spectral norm.
pub fn norm2(m: &CMat) -> f64 {
    if m.nrows() == 1 || m.ncols() == 1 {
        return m.norm();
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// 2-norm condition number; `inf` for singular matrices.
pub fn cond2(m: &CMat) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Solves `a x = b` with partial-pivoted LU.
pub fn solve(a: &CMat, b: &CMat) -> Option<CMat> {
    let lu = a.clone().lu();
    let x = lu.solve(b)?;
    if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Solves `a x = b`, refusing when the 2-norm condition of `a` exceeds `max_cond`.
/// The error carries the condition number.
pub fn solve_checked(a: &CMat, b: &CMat, max_cond: f64) -> std::result::Result<CMat, f64> {
    let cond = cond2(a);
    if !(cond <= max_cond) {
        return Err(cond);
    }
    solve(a, b).ok_or(cond)
}

#[derive(Debug, Clone)]
pub struct Lstsq {
    pub x: CMat,
    pub rank: usize,
    pub rank_deficient: bool,
    pub singular_values: Vec<f64>,
}

/// Minimum-norm least-squares solution of `a x ≈ b` through the SVD.
pub fn lstsq(a: &CMat, b: &CMat) -> Lstsq {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Lstsq {
            x: CMat::zeros(cols, b.ncols()),
            rank: 0,
            rank_deficient: cols > 0,
            singular_values: Vec::new(),
        };
    }
    let svd = SVD::new(a.clone(), true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let tol = smax * f64::EPSILON * rows.max(cols) as f64;
    let rank = sv.iter().filter(|&&s| s > tol).count();
    let mut x = CMat::zeros(cols, b.ncols());
    for (i, &s) in sv.iter().enumerate().take(rank) {
        // x += v_i (u_i^H b) / s_i
        let coeff = u.column(i).adjoint() * b / real(s);
        let vi = v_t.row(i).adjoint();
        x += vi * coeff;
    }
    Lstsq { x, rank, rank_deficient: rank < cols, singular_values: sv }
}

/// Leading `r` left and right singular vectors together with all singular values.
pub fn svd_bases(m: &CMat, r: usize) -> (CMat, CMat, Vec<f64>) {
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v requested");
    let r = r.min(u.ncols());
    let left = u.columns(0, r).into_owned();
    let right = v_t.rows(0, r).adjoint();
    (left, right, svd.singular_values.iter().copied().collect())
}

/// Right singular vector belonging to the smallest singular value (a least-squares null
/// vector). Short matrices are padded with zero rows so the full right basis exists.
pub fn smallest_right_singular_vector(m: &CMat) -> DVector<C64> {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = CMat::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("v requested");
    v_t.row(cols - 1).adjoint()
}

/// `a ⊗ I_n`.
pub fn kron_identity(a: &CMat, n: usize) -> CMat {
    let mut out = CMat::zeros(a.nrows() * n, a.ncols() * n);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            for d in 0..n {
                out[(i * n + d, j * n + d)] = a[(i, j)];
            }
        }
    }
    out
}

/// Eigenvalues and unit-norm right eigenvectors of a square complex matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMat,
}

pub fn eig(a: &CMat) -> Result<Eigen> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Eigen { values: Vec::new(), vectors: CMat::zeros(0, 0) });
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let scale = t.norm().max(f64::MIN_POSITIVE);
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut v = CMat::zeros(n, n);
    for k in 0..n {
        v[(k, k)] = real(1.0);
        for i in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                acc += t[(i, j)] * v[(j, k)];
            }
            let mut denom = t[(i, i)] - t[(k, k)];
            if denom.norm() < f64::EPSILON * scale {
                denom = real(f64::EPSILON * scale);
            }
            v[(i, k)] = -acc / denom;
        }
    }
    let mut vectors = q * v;
    for mut col in vectors.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= real(nrm);
        }
    }
    Ok(Eigen { values, vectors })
}

/// Finite spectrum of a pencil `(A, E)` with right eigenvectors `X` and left eigenvectors
/// stored as rows of `left_h` (that is `Y^H`), normalized so that `Y^H E X = I`.
#[derive(Debug, Clone)]
pub struct PencilEigen {
    pub values: Vec<C64>,
    pub right: CMat,
    pub left_h: CMat,
    pub infinite: usize,
}

/// Eigen-decomposition of `A x = α E x`; `e = None` means `E = I`.
pub fn pencil_eigen(a: &CMat, e: Option<&CMat>) -> Result<PencilEigen> {
    let n = a.nrows();
    let Some(e) = e else {
        let eg = eig(a)?;
        let left_h = solve(&eg.vectors, &CMat::identity(n, n))
            .ok_or_else(|| Error::Numerical("eigenvector matrix is singular".into()))?;
        return Ok(PencilEigen { values: eg.values, right: eg.vectors, left_h, infinite: 0 });
    };
    if n == 0 {
        return Ok(PencilEigen {
            values: Vec::new(),
            right: CMat::zeros(0, 0),
            left_h: CMat::zeros(0, 0),
            infinite: 0,
        });
    }
    let e_norm = e.norm();
    if e_norm == 0.0 {
        return Ok(PencilEigen {
            values: Vec::new(),
            right: CMat::zeros(n, 0),
            left_h: CMat::zeros(0, n),
            infinite: n,
        });
    }
    let scale = (a.norm() / e_norm).max(1e-300);
    const SHIFTS: [(f64, f64); 4] = [(0.5377, 0.1843), (-0.3121, 0.7134), (0.9138, -0.4412), (0.0713, -1.3321)];
    let mut shifted = None;
    for (re, im) in SHIFTS {
        let sigma = c64(re, im) * scale;
        let m = a - e * sigma;
        if cond2(&m) < 1e12 {
            shifted = Some((sigma, m));
            break;
        }
    }
    let (sigma, m) = shifted.ok_or_else(|| Error::Numerical("no regular shift found for pencil".into()))?;
    let k = solve(&m, e).ok_or_else(|| Error::Numerical("shifted pencil is singular".into()))?;
    let eg = eig(&k)?;
    let k_norm = norm2(&k);
    let inv_x = solve(&eg.vectors, &CMat::identity(n, n))
        .ok_or_else(|| Error::Numerical("eigenvector matrix is singular".into()))?;
    // Y^H = Θ^{-1} X^{-1} (A - σE)^{-1}
    let raw_left = solve(&m.transpose(), &inv_x.transpose())
        .ok_or_else(|| Error::Numerical("shifted pencil is singular".into()))?
        .transpose();

    let finite: Vec<usize> = (0..n).filter(|&i| eg.values[i].norm() > 1e-7 * k_norm).collect();
    let values = finite.iter().map(|&i| sigma + eg.values[i].inv()).collect();
    let mut right = CMat::zeros(n, finite.len());
    let mut left_h = CMat::zeros(finite.len(), n);
    for (col, &i) in finite.iter().enumerate() {
        right.set_column(col, &eg.vectors.column(i));
        let row = raw_left.row(i) / eg.values[i];
        left_h.set_row(col, &row);
    }
    Ok(PencilEigen { values, right, left_h, infinite: n - finite.len() })
}

/// Maximum absolute imaginary part over all entries.
pub fn max_imag(m: &CMat) -> f64 {
    m.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
}

/// Relative Frobenius distance `‖a - b‖ / max(‖a‖, ‖b‖, tiny)`.
pub fn rel_diff(a: &CMat, b: &CMat) -> f64 {
    let d = (a - b).norm();
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize, seed: u64) -> CMat {
        // small LCG, enough for deterministic fixtures
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CMat::from_fn(n, n, |_, _| c64(next(), next()))
    }

    #[test]
    fn eig_reconstructs() {
        for seed in 0..5 {
            let a = test_matrix(7, seed);
            let eg = eig(&a).unwrap();
            for k in 0..7 {
                let x = eg.vectors.column(k);
                let r = &a * x - x * eg.values[k];
                assert!(r.norm() < 1e-12 * a.norm(), "residual {}", r.norm());
            }
        }
    }

    #[test]
    fn pencil_left_right_normalization() {
        let a = test_matrix(5, 11);
        let e = test_matrix(5, 12);
        let pe = pencil_eigen(&a, Some(&e)).unwrap();
        assert_eq!(pe.infinite, 0);
        let g = &pe.left_h * &e * &pe.right;
        assert!((g - CMat::identity(5, 5)).norm() < 1e-9);
        for k in 0..5 {
            let x = pe.right.column(k);
            let r = &a * x - (&e * x) * pe.values[k];
            assert!(r.norm() < 1e-10 * a.norm());
        }
    }

    #[test]
    fn pencil_detects_infinite_eigenvalues() {
        let mut e = CMat::identity(3, 3);
        e[(2, 2)] = real(0.0);
        let a = CMat::from_diagonal(&DVector::from_vec(vec![real(-1.0), real(-2.0), real(1.0)]));
        let pe = pencil_eigen(&a, Some(&e)).unwrap();
        assert_eq!(pe.infinite, 1);
        let mut vals: Vec<f64> = pe.values.iter().map(|v| v.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] + 2.0).abs() < 1e-12 && (vals[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn lstsq_min_norm() {
        // underdetermined: x1 + x2 = 2 -> min-norm (1, 1)
        let a = CMat::from_row_slice(1, 2, &[real(1.0), real(1.0)]);
        let b = scalar(real(2.0));
        let sol = lstsq(&a, &b);
        assert!((sol.x[(0, 0)] - real(1.0)).norm() < 1e-14);
        assert!((sol.x[(1, 0)] - real(1.0)).norm() < 1e-14);
        assert!(sol.rank_deficient);
    }

    #[test]
    fn null_vector_of_short_matrix() {
        let a = CMat::from_row_slice(1, 2, &[real(1.0), real(-1.0)]);
        let v = smallest_right_singular_vector(&a);
        assert!((&a * &v).norm() < 1e-14);
        assert!((v.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cond_of_singular_is_infinite() {
        let a = CMat::from_row_slice(2, 2, &[real(1.0), real(2.0), real(2.0), real(4.0)]);
        assert!(cond2(&a) > 1e15);
    }
}
