//! Dense symmetric factorization for small networks.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Dense<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    pub fn zeros(n: usize) -> Self {
        Dense {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.n + j]
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        assert_eq!(rows.len(), cols.len());
        let mut out = Dense::zeros(rows.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                *out.at_mut(a, b) = self.at(i, j);
            }
        }
        out
    }
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub(crate) struct Cholesky<T> {
    l: Dense<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn factor(a: &Dense<T>) -> Result<Self> {
        let n = a.n;
        let mut l = Dense::zeros(n);
        for j in 0..n {
            let mut d = a.at(j, j);
            for k in 0..j {
                d -= l.at(j, k) * l.at(j, k);
            }
            if d.is_nan() || d <= T::zero() {
                return Err(Error::ZeroPivot(format!("dense row {j}")));
            }
            let d = d.sqrt();
            *l.at_mut(j, j) = d;
            for i in j + 1..n {
                let mut s = a.at(i, j);
                for k in 0..j {
                    s -= l.at(i, k) * l.at(j, k);
                }
                *l.at_mut(i, j) = s / d;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.n;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] = y[i] - self.l.at(i, k) * y[k];
            }
            y[i] /= self.l.at(i, i);
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] = y[i] - self.l.at(k, i) * y[k];
            }
            y[i] /= self.l.at(i, i);
        }
        y
    }

    pub fn inverse(&self) -> Dense<T> {
        let n = self.l.n;
        let mut out = Dense::zeros(n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            let col = self.solve(&e);
            e[j] = T::zero();
            for (i, &v) in col.iter().enumerate() {
                *out.at_mut(i, j) = v;
            }
        }
        out
    }
}

/// `A_BB - A_BI A_II^{-1} A_IB`.
pub(crate) fn schur_complement<T: Scalar>(a: &Dense<T>, boundary: &[usize]) -> Result<Dense<T>> {
    let mut is_b = vec![false; a.n];
    for &b in boundary {
        is_b[b] = true;
    }
    let interior: Vec<usize> = (0..a.n).filter(|&i| !is_b[i]).collect();
    let mut out = a.submatrix(boundary, boundary);
    if interior.is_empty() {
        return Ok(out);
    }
    let chol = Cholesky::factor(&a.submatrix(&interior, &interior))?;
    for (bj, &j) in boundary.iter().enumerate() {
        let col: Vec<T> = interior.iter().map(|&i| a.at(i, j)).collect();
        let x = chol.solve(&col);
        for (bi, &i) in boundary.iter().enumerate() {
            let s: T = interior.iter().zip(&x).map(|(&k, &xk)| a.at(i, k) * xk).sum();
            *out.at_mut(bi, bj) -= s;
        }
    }
    Ok(out)
}
