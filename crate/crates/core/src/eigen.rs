//! Eigenvalues of dense complex Hermitian matrices.
//!
//! Householder reflections bring the matrix to Hermitian tridiagonal form.
//! A diagonal unitary similarity then makes the off-diagonal real and
//! non-negative, so only the moduli are kept, and the real symmetric
//! tridiagonal problem is solved with implicitly shifted QL iterations.

use num_complex::Complex64;

use crate::entropy::EntropyError;
use crate::lattice::CorrelationMatrix;

/// Largest tolerated `|A_ij - conj(A_ji)|`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

const MAX_QL_SWEEPS: usize = 64;

/// Ascending eigenvalues of a correlation matrix.
pub fn hermitian_eigenvalues(matrix: &CorrelationMatrix) -> Result<Vec<f64>, EntropyError> {
    eigenvalues_dense(matrix.dim(), matrix.entries())
}

/// Ascending eigenvalues of a row-major `dim × dim` Hermitian matrix.
pub fn eigenvalues_dense(dim: usize, entries: &[Complex64]) -> Result<Vec<f64>, EntropyError> {
    assert_eq!(entries.len(), dim * dim, "entries must be dim × dim");
    let mut worst: f64 = 0.0;
    for r in 0..dim {
        for c in r..dim {
            worst = worst.max((entries[r * dim + c] - entries[c * dim + r].conj()).norm());
        }
    }
    if worst > HERMITIAN_TOLERANCE {
        return Err(EntropyError::NotHermitian { asymmetry: worst });
    }
    if dim == 0 {
        return Ok(Vec::new());
    }

    // Work on the symmetrized matrix so tiny asymmetries cannot bias the result.
    let mut a = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            a[r * dim + c] = 0.5 * (entries[r * dim + c] + entries[c * dim + r].conj());
        }
    }
    let (mut d, mut e) = tridiagonalize(dim, &mut a);
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Reduces `a` in place and returns the real diagonal and the moduli of the
/// sub-diagonal (`e[i]` couples `i` and `i + 1`, `e[dim - 1] = 0`).
fn tridiagonalize(n: usize, a: &mut [Complex64]) -> (Vec<f64>, Vec<f64>) {
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        let norm_x = (k + 1..n)
            .map(|i| a[i * n + k].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let unit = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -unit * norm_x;

        // v = x - alpha e₁, normalized; zero outside k+1..n.
        v.iter_mut().for_each(|z| *z = zero);
        for i in k + 1..n {
            v[i] = a[i * n + k];
        }
        v[k + 1] -= alpha;
        let v_norm = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if v_norm == 0.0 {
            continue;
        }
        for z in &mut v[k + 1..] {
            *z /= v_norm;
        }

        // A ← (I - 2vv†) A (I - 2vv†) on the trailing block, via
        // p = Av, K = v†p, w = p - Kv, A ← A - 2vw† - 2wv†.
        for i in k..n {
            p[i] = (k + 1..n).map(|j| a[i * n + j] * v[j]).sum();
        }
        let kappa: Complex64 = (k + 1..n).map(|i| v[i].conj() * p[i]).sum();
        for i in k..n {
            p[i] -= kappa * v[i];
        }
        for i in k..n {
            for j in k..n {
                a[i * n + j] -= 2.0 * (v[i] * p[j].conj() + p[i] * v[j].conj());
            }
        }
        // Column k below the sub-diagonal is annihilated up to rounding.
        for i in k + 2..n {
            a[i * n + k] = zero;
            a[k * n + i] = zero;
        }
    }
    let d = (0..n).map(|i| a[i * n + i].re).collect();
    let mut e: Vec<f64> = (0..n - 1).map(|i| a[(i + 1) * n + i].norm()).collect();
    e.push(0.0);
    (d, e)
}

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal matrix.
/// Eigenvalues replace `d`; `e` is destroyed.
fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<(), EntropyError> {
    let n = d.len();
    // Off-diagonals below this are negligible in absolute terms; without the
    // floor a cluster of eigenvalues near zero never deflates.
    let floor = f64::EPSILON
        * d.iter()
            .zip(e.iter())
            .fold(0.0f64, |acc, (x, y)| acc.max(x.abs() + y.abs()));
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(EntropyError::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reference(dim: usize, entries: &[Complex64]) -> Vec<f64> {
        let m = DMatrix::from_row_slice(dim, dim, entries);
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn identity_and_diagonal() {
        let mut id = vec![c(0.0, 0.0); 16];
        for i in 0..4 {
            id[i * 5] = c(1.0, 0.0);
        }
        assert_eq!(eigenvalues_dense(4, &id).unwrap(), vec![1.0; 4]);
        let mut diag = vec![c(0.0, 0.0); 16];
        diag[10] = c(1.0, 0.0);
        diag[0] = c(1.0, 0.0);
        assert_eq!(
            eigenvalues_dense(4, &diag).unwrap(),
            vec![0.0, 0.0, 1.0, 1.0]
        );
    }

    #[test]
    fn quarter_three_quarter_pairs() {
        let h = 0.5;
        let q = 0.25;
        #[rustfmt::skip]
        let m = vec![
            c(h, 0.0), c(0.0, 0.0), c(0.0, -q), c(0.0, 0.0),
            c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0), c(0.0, q),
            c(0.0, q), c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(0.0, -q), c(0.0, 0.0), c(h, 0.0),
        ];
        let ev = eigenvalues_dense(4, &m).unwrap();
        for (x, e) in ev.iter().zip([0.25, 0.25, 0.75, 0.75]) {
            assert!((x - e).abs() < 1e-15, "{ev:?}");
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)];
        assert!(matches!(
            eigenvalues_dense(2, &m),
            Err(EntropyError::NotHermitian { .. })
        ));
        let almost = vec![c(1.0, 0.0), c(0.3, 1e-10), c(0.3, 0.0), c(2.0, 0.0)];
        assert!(eigenvalues_dense(2, &almost).is_ok());
    }

    #[test]
    fn empty_and_scalar() {
        assert!(eigenvalues_dense(0, &[]).unwrap().is_empty());
        assert_eq!(eigenvalues_dense(1, &[c(-3.5, 0.0)]).unwrap(), vec![-3.5]);
    }

    #[test]
    fn large_circulant_matches_reference() {
        let n = 300;
        let mut m = vec![c(0.0, 0.0); n * n];
        for r in 0..n {
            for col in 0..n {
                let d = (col as i64 - r as i64) as f64;
                m[r * n + col] = if r == col {
                    c(0.5, 0.0)
                } else {
                    c(0.1 / d, 0.3 * (0.7 * d).sin() / d)
                };
            }
        }
        // Make it exactly Hermitian.
        for r in 0..n {
            for col in 0..r {
                m[r * n + col] = m[col * n + r].conj();
            }
        }
        let ours = eigenvalues_dense(n, &m).unwrap();
        let theirs = reference(n, &m);
        let scale = theirs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-12 * scale.max(1.0), "{a} vs {b}");
        }
    }

    fn hermitian_strategy() -> impl Strategy<Value = (usize, Vec<Complex64>)> {
        (1usize..12).prop_flat_map(|n| {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |raw| {
                let mut m = vec![Complex64::new(0.0, 0.0); n * n];
                for r in 0..n {
                    for col in 0..n {
                        let (a, b) = raw[r * n + col];
                        let (x, y) = raw[col * n + r];
                        m[r * n + col] = 0.5 * (Complex64::new(a, b) + Complex64::new(x, -y));
                    }
                }
                (n, m)
            })
        })
    }

    proptest! {
        #[test]
        fn agrees_with_reference_solver((n, m) in hermitian_strategy()) {
            let ours = eigenvalues_dense(n, &m).unwrap();
            let theirs = reference(n, &m);
            for (a, b) in ours.iter().zip(&theirs) {
                prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
            }
        }

        #[test]
        fn trace_is_preserved((n, m) in hermitian_strategy()) {
            let trace: f64 = (0..n).map(|i| m[i * n + i].re).sum();
            let sum: f64 = eigenvalues_dense(n, &m).unwrap().iter().sum();
            prop_assert!((trace - sum).abs() < 1e-12);
        }
    }
}
