//! Symmetric eigensolvers and the sorted spectrum type shared by the one-
//! and many-body layers.
//!
//! Dense matrices go through nalgebra's symmetric QR; every eigenpair is
//! checked against the residual bound `‖Hv − Ev‖ ≤ 1e-9 (1 + |E|) ‖v‖`.
//! Tridiagonal matrices (one-body operators on a line) use implicit QL
//! without eigenvectors, and the result is certified instead by Sturm
//! counts around every eigenvalue cluster.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tolerance of the residual bound.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Absolute slack used when counting eigenvalues below an energy.
pub const COUNT_TOL: f64 = 1e-9;

/// Sorted eigenvalues (with multiplicity) and the worst normalized residual
/// `max_k ‖Hv_k − E_k v_k‖ / (1 + |E_k|)` certified by the solver.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    residual: f64,
}

impl Spectrum {
    /// Wraps an already known list of eigenvalues (sorted here).
    pub fn from_values(mut values: Vec<f64>, residual: f64) -> Self {
        values.sort_by(f64::total_cmp);
        Spectrum { values, residual }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// `E_k`, 1-based.
    pub fn level(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }

    /// 𝒩(E) = #{k : E_k ≤ E + 1e-9}.
    pub fn count_below(&self, energy: f64) -> usize {
        self.values.partition_point(|&e| e <= energy + COUNT_TOL)
    }
}

/// Eigenvalues and orthonormal eigenvectors (as columns) in ascending order.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub spectrum: Spectrum,
    pub vectors: DMatrix<f64>,
}

/// Full dense decomposition with residual verification.
pub fn dense_eigen(matrix: &DMatrix<f64>) -> Result<EigenPairs> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::config("eigensolver needs a square matrix"));
    }
    if n == 0 {
        return Ok(EigenPairs {
            spectrum: Spectrum::from_values(Vec::new(), 0.0),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(matrix.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let hv = matrix * &vectors;
    let mut worst = 0.0f64;
    for (c, &e) in values.iter().enumerate() {
        let v = vectors.column(c);
        let r = (hv.column(c) - v * e).norm() / v.norm();
        let scaled = r / (1.0 + e.abs());
        worst = worst.max(scaled);
        if !(scaled <= RESIDUAL_TOL) {
            return Err(Error::Solver {
                residual: r,
                allowed: RESIDUAL_TOL * (1.0 + e.abs()),
            });
        }
    }
    Ok(EigenPairs {
        spectrum: Spectrum { values, residual: worst },
        vectors,
    })
}

/// Eigenvalues of a dense symmetric matrix.
pub fn dense_spectrum(matrix: &DMatrix<f64>) -> Result<Spectrum> {
    dense_eigen(matrix).map(|p| p.spectrum)
}

/// Number of eigenvalues strictly below `x` of the symmetric tridiagonal
/// matrix with diagonal `diag` and off-diagonal `off` (`off[i]` couples `i`
/// and `i + 1`), from the signs of the LDLᵀ pivots of `T − x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = 1.0f64;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { coupling / q };
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Implicit QL with Wilkinson shifts, eigenvalues only.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::Solver {
                    residual: e[l].abs(),
                    allowed: f64::EPSILON * (d[l].abs() + d[l + 1].abs()),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
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

/// Spectrum of a symmetric tridiagonal matrix, certified by Sturm counts.
///
/// Eigenvalues closer than twice their tolerance form a cluster; each
/// cluster `[lo, hi]` holding indices `a..b` must satisfy
/// `count(lo − τ) = a` and `count(hi + τ) = b` with `τ = 1e-9 (1 + |E|)`.
pub fn tridiagonal_spectrum(diag: &[f64], off: &[f64]) -> Result<Spectrum> {
    let n = diag.len();
    if off.len() + 1 != n.max(1) {
        return Err(Error::config("tridiagonal off-diagonal must have length n - 1"));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);

    let tol = |x: f64| RESIDUAL_TOL * (1.0 + x.abs());
    let mut start = 0;
    let mut worst = 0.0f64;
    while start < n {
        let mut end = start + 1;
        while end < n && d[end] - d[end - 1] <= tol(d[end - 1]) + tol(d[end]) {
            end += 1;
        }
        let (lo, hi) = (d[start], d[end - 1]);
        let below = sturm_count(diag, off, lo - tol(lo));
        let upto = sturm_count(diag, off, hi + tol(hi));
        if below != start || upto != end {
            return Err(Error::Solver {
                residual: (hi - lo).max(tol(hi)),
                allowed: tol(hi),
            });
        }
        worst = worst.max(RESIDUAL_TOL);
        start = end;
    }
    Ok(Spectrum { values: d, residual: worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize, potential: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let diag = (0..n).map(|i| 2.0 + potential.get(i).copied().unwrap_or(0.0)).collect();
        (diag, vec![-1.0; n.saturating_sub(1)])
    }

    #[test]
    fn diagonal_matrix() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 5.0, 3.0]));
        assert_eq!(dense_spectrum(&m).unwrap().values(), &[1.0, 3.0, 5.0]);
    }

    #[test]
    fn two_by_two() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        let s = dense_spectrum(&m).unwrap();
        assert!((s.values()[0] - 1.0).abs() < 1e-14);
        assert!((s.values()[1] - 3.0).abs() < 1e-14);
        let (d, e) = path(2, &[]);
        let t = tridiagonal_spectrum(&d, &e).unwrap();
        assert!((t.values()[0] - 1.0).abs() < 1e-14);
        assert!((t.values()[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn free_path_closed_form() {
        for n in [1usize, 3, 17, 200] {
            let (d, e) = path(n, &[]);
            let s = tridiagonal_spectrum(&d, &e).unwrap();
            for (k, &ev) in s.values().iter().enumerate() {
                let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
                assert!((ev - exact).abs() < 1e-12, "n={n} k={k} {ev} vs {exact}");
            }
        }
    }

    #[test]
    fn tridiagonal_matches_dense_with_potential() {
        let v: Vec<f64> = (0..40).map(|i| ((i * 37 % 11) as f64) / 7.0).collect();
        let (d, e) = path(40, &v);
        let t = tridiagonal_spectrum(&d, &e).unwrap();
        let m = DMatrix::from_fn(40, 40, |r, c| {
            if r == c {
                d[r]
            } else if r.abs_diff(c) == 1 {
                -1.0
            } else {
                0.0
            }
        });
        let s = dense_spectrum(&m).unwrap();
        for (a, b) in t.values().iter().zip(s.values()) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn sturm_counts_split_blocks() {
        // zero couplings: eigenvalues are the diagonal, with a repeated value
        let d = [3.0, 1.0, 3.0, 2.0];
        let e = [0.0, 0.0, 0.0];
        let s = tridiagonal_spectrum(&d, &e).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0, 3.0]);
        assert_eq!(sturm_count(&d, &e, 2.5), 2);
        assert_eq!(s.count_below(3.0), 4);
    }

    #[test]
    fn counting_convention() {
        let s = Spectrum::from_values(vec![5.0, 2.0, 1.0, 2.0], 0.0);
        assert_eq!(s.count_below(2.0), 3);
        assert_eq!(s.count_below(0.5), 0);
        assert_eq!(s.count_below(5.0), 4);
        assert_eq!(s.count_below(1e9), 4);
        assert_eq!(s.level(2), Some(2.0));
        assert_eq!(s.level(0), None);
    }
}
