//! Dense complex linear algebra: Hermitian eigenvalues by cyclic Jacobi and
//! determinants by LU with partial pivoting.

use num_complex::Complex64;

use crate::{Error, Result};

pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix (row-major, `n × n`), unsorted.
///
/// Cyclic Jacobi with complex plane rotations. Each rotation is the real
/// symmetric rotation conjugated by the phase of the pivot, so the
/// annihilated pair stays real and the diagonal stays real. Iterates until
/// the off-diagonal Frobenius norm drops below `1e-12 · n`.
pub fn hermitian_jacobi(mut a: Vec<Complex64>, n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::invalid(format!(
            "matrix has {} entries, expected {}",
            a.len(),
            n * n
        )));
    }
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let tol = 1e-12 * n as f64;
    let mut diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();

    for sweep in 0..=MAX_SWEEPS {
        let off = off_diagonal_norm(&a, n);
        if off < tol {
            return Ok(diag);
        }
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps: MAX_SWEEPS,
                off_norm: off,
            });
        }
        // rotations below this scale cannot move the norm meaningfully
        let skip = off * 1e-3 / n as f64;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r == 0.0 || (r < skip && sweep > 2) {
                    continue;
                }
                let phase = apq / r;
                let theta = (diag[q] - diag[p]) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]] acting on (p, q)
                let sp = phase * s;
                let spc = sp.conj();
                // Rows p, q of Jᴴ A J off the (p, q) block; the matrix stays
                // Hermitian, so the columns are their conjugates.
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    let new_p = apk * c - aqk * sp;
                    let new_q = apk * spc + aqk * c;
                    a[p * n + k] = new_p;
                    a[q * n + k] = new_q;
                    a[k * n + p] = new_p.conj();
                    a[k * n + q] = new_q.conj();
                }
                diag[p] -= t * r;
                diag[q] += t * r;
                a[p * n + p] = Complex64::new(diag[p], 0.0);
                a[q * n + q] = Complex64::new(diag[q], 0.0);
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
            }
        }
    }
    unreachable!("loop returns on its final iteration")
}

/// Eigenvalues of a real symmetric matrix (row-major, `n × n`), unsorted.
///
/// Cyclic Jacobi; only the upper triangle is read and updated. Same stopping
/// rule as [`hermitian_jacobi`].
pub fn symmetric_jacobi(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::invalid(format!(
            "matrix has {} entries, expected {}",
            a.len(),
            n * n
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let tol = 1e-12 * n as f64;
    let mut diag: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();

    for sweep in 0..=MAX_SWEEPS {
        let mut upper = 0.0;
        for j in 0..n {
            for k in j + 1..n {
                upper += a[j * n + k] * a[j * n + k];
            }
        }
        let off = (2.0 * upper).sqrt();
        if off < tol {
            return Ok(diag);
        }
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps: MAX_SWEEPS,
                off_norm: off,
            });
        }
        let skip = off * 1e-3 / n as f64;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 || (apq.abs() < skip && sweep > 2) {
                    continue;
                }
                let theta = (diag[q] - diag[p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                diag[p] -= t * apq;
                diag[q] += t * apq;
                a[p * n + q] = 0.0;
                let mut rotate = |i: usize, j: usize, k: usize, l: usize| {
                    let g = a[i * n + j];
                    let h = a[k * n + l];
                    a[i * n + j] = g - s * (h + g * tau);
                    a[k * n + l] = h + s * (g - h * tau);
                };
                for j in 0..p {
                    rotate(j, p, j, q);
                }
                for j in p + 1..q {
                    rotate(p, j, j, q);
                }
                for j in q + 1..n {
                    rotate(p, j, q, j);
                }
            }
        }
    }
    unreachable!("loop returns on its final iteration")
}

fn off_diagonal_norm(a: &[Complex64], n: usize) -> f64 {
    let mut sum = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                sum += a[j * n + k].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Determinant of a square complex matrix by LU with partial pivoting.
///
/// A zero pivot column yields a determinant of exactly zero.
pub fn determinant(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    debug_assert_eq!(a.len(), n * n);
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let (pivot_row, pivot_abs) =
            (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_abs == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            det = -det;
        }
        let pivot = a[col * n + col];
        det *= pivot;
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in col + 1..n {
                let v = a[col * n + k];
                a[r * n + k] -= factor * v;
            }
        }
    }
    det
}
