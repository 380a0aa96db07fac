//! Column-pivoted modified Gram-Schmidt for small dense complex systems.

use num_complex::Complex64;

/// Thin pivoted QR of a column list. Columns whose residual after
/// orthogonalisation falls to `tol * sqrt(ncols) * max column norm` or below
/// are treated as dependent and dropped.
pub(crate) struct PivotedQr {
    /// Orthonormal columns, one per independent input column.
    q: Vec<Vec<Complex64>>,
    /// Upper-triangular factor, `r[i][j]` for `i <= j < rank`.
    r: Vec<Vec<Complex64>>,
    /// `perm[k]` is the input column chosen at step `k`.
    perm: Vec<usize>,
    ncols: usize,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

impl PivotedQr {
    pub(crate) fn new(columns: &[Vec<Complex64>], tol: f64) -> Self {
        let ncols = columns.len();
        let mut work: Vec<Vec<Complex64>> = columns.to_vec();
        let mut order: Vec<usize> = (0..ncols).collect();
        let max_norm = work.iter().map(|c| norm(c)).fold(0.0, f64::max);
        let threshold = tol * (ncols as f64).sqrt() * max_norm;

        let mut q: Vec<Vec<Complex64>> = Vec::new();
        let mut r: Vec<Vec<Complex64>> = Vec::new();
        for k in 0..ncols {
            let (best, best_norm) = (k..ncols)
                .map(|j| (j, norm(&work[j])))
                .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if best_norm <= threshold || max_norm == 0.0 {
                break;
            }
            work.swap(k, best);
            order.swap(k, best);
            for row in r.iter_mut() {
                row.swap(k, best);
            }
            let qk: Vec<Complex64> = work[k].iter().map(|v| v / best_norm).collect();
            let mut rk = vec![Complex64::new(0.0, 0.0); ncols];
            rk[k] = Complex64::new(best_norm, 0.0);
            for j in (k + 1)..ncols {
                // two passes of projection for orthogonality
                for _ in 0..2 {
                    let c = dot(&qk, &work[j]);
                    rk[j] += c;
                    for (w, qv) in work[j].iter_mut().zip(&qk) {
                        *w -= c * qv;
                    }
                }
            }
            q.push(qk);
            r.push(rk);
        }
        let rank = q.len();
        order.truncate(rank);
        PivotedQr {
            q,
            r,
            perm: order,
            ncols,
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.q.len()
    }

    pub(crate) fn full_column_rank(&self) -> bool {
        self.rank() == self.ncols
    }

    /// Least-squares coefficients (zero on dropped columns) and the residual
    /// norm `||y - A c||`.
    pub(crate) fn solve(&self, y: &[Complex64]) -> (Vec<Complex64>, f64) {
        let rank = self.rank();
        let mut rhs = y.to_vec();
        let mut proj = vec![Complex64::new(0.0, 0.0); rank];
        for (k, qk) in self.q.iter().enumerate() {
            for _ in 0..2 {
                let c = dot(qk, &rhs);
                proj[k] += c;
                for (w, qv) in rhs.iter_mut().zip(qk) {
                    *w -= c * qv;
                }
            }
        }
        let residual = norm(&rhs);
        let mut x = vec![Complex64::new(0.0, 0.0); rank];
        for i in (0..rank).rev() {
            let mut acc = proj[i];
            for j in (i + 1)..rank {
                acc -= self.r[i][j] * x[j];
            }
            x[i] = acc / self.r[i][i];
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.ncols];
        for (k, &col) in self.perm.iter().enumerate() {
            coeffs[col] = x[k];
        }
        (coeffs, residual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn detects_dependence() {
        let a = vec![c(1.0), c(2.0), c(3.0)];
        let b = vec![c(2.0), c(4.0), c(6.0)];
        let e = vec![c(0.0), c(1.0), c(0.0)];
        assert_eq!(PivotedQr::new(&[a.clone(), b.clone()], 1e-8).rank(), 1);
        assert!(PivotedQr::new(&[a.clone(), e.clone()], 1e-8).full_column_rank());
        assert_eq!(PivotedQr::new(&[a, b, e], 1e-8).rank(), 2);
        assert_eq!(PivotedQr::new(&[vec![c(0.0); 3]], 1e-8).rank(), 0);
    }

    #[test]
    fn solves_least_squares() {
        let a = vec![c(1.0), c(0.0), c(1.0)];
        let b = vec![c(0.0), Complex64::new(0.0, 1.0), c(1.0)];
        let y: Vec<Complex64> = a
            .iter()
            .zip(&b)
            .map(|(x, z)| x * c(2.0) + z * Complex64::new(-1.0, 0.5))
            .collect();
        let qr = PivotedQr::new(&[a, b], 1e-10);
        let (coef, res) = qr.solve(&y);
        assert!(res < 1e-12);
        assert!((coef[0] - c(2.0)).norm() < 1e-12);
        assert!((coef[1] - Complex64::new(-1.0, 0.5)).norm() < 1e-12);

        let (_, res) = qr.solve(&[c(0.0), c(0.0), c(1.0)]);
        assert!(res > 0.1);
    }
}
