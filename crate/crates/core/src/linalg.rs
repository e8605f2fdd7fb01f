//! Small dense linear algebra over jets and reals.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{GeomError, Result};
use crate::jets::Jet;

/// Inverse of a square jet matrix by Gauss-Jordan elimination with partial
/// pivoting on the constant terms.
pub fn jet_inverse(m: &[Vec<Jet>]) -> Result<Vec<Vec<Jet>>> {
    let n = m.len();
    let shape = m
        .first()
        .and_then(|r| r.first())
        .map(Jet::shape)
        .ok_or_else(|| GeomError::Degenerate("empty matrix".into()))?;
    let mut a: Vec<Vec<Jet>> = m.to_vec();
    let mut inv: Vec<Vec<Jet>> =
        (0..n).map(|i| (0..n).map(|j| shape.constant(if i == j { 1.0 } else { 0.0 })).collect()).collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].value().abs().total_cmp(&a[q][col].value().abs()))
            .expect("nonempty range");
        if a[pivot][col].value().abs() < 1e-300 {
            return Err(GeomError::Degenerate("singular jet matrix".into()));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let r = a[col][col].recip()?;
        for j in 0..n {
            a[col][j] = &a[col][j] * &r;
            inv[col][j] = &inv[col][j] * &r;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row][col].clone();
            if f.coeffs().iter().all(|c| *c == 0.0) {
                continue;
            }
            for j in 0..n {
                let da = &f * &a[col][j];
                a[row][j] = &a[row][j] - &da;
                let di = &f * &inv[col][j];
                inv[row][j] = &inv[row][j] - &di;
            }
        }
    }
    Ok(inv)
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn trace(m: &DMatrix<f64>) -> f64 {
    m.trace()
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(&b.transpose()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::JetShape;

    #[test]
    fn inverse_of_jet_matrix() {
        let shape = JetShape::new(2, 3).unwrap();
        let u = shape.seed(0, 0.3).unwrap();
        let v = shape.seed(1, -0.2).unwrap();
        let m = vec![vec![u.add_scalar(2.0), &u * &v], vec![v.sin(), v.exp()]];
        let inv = jet_inverse(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = shape.zero();
                for k in 0..2 {
                    s = &s + &(&m[i][k] * &inv[k][j]);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((s.value() - target).abs() < 1e-14);
                assert!(s.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let shape = JetShape::new(1, 2).unwrap();
        let m = vec![vec![shape.zero(), shape.constant(1.0)], vec![shape.constant(2.0), shape.zero()]];
        let inv = jet_inverse(&m).unwrap();
        assert_eq!(inv[0][1].value(), 0.5);
        assert_eq!(inv[1][0].value(), 1.0);
        let singular =
            vec![vec![shape.constant(1.0), shape.constant(2.0)], vec![shape.constant(2.0), shape.constant(4.0)]];
        assert!(jet_inverse(&singular).is_err());
    }

    #[test]
    fn traces() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = DMatrix::from_row_slice(2, 2, &[0.5, -1.0, 2.0, 1.0]);
        assert_eq!(trace_product(&a, &b), (&a * &b).trace());
        assert_eq!(symmetric_eigenvalues(&DMatrix::from_diagonal_element(3, 3, 2.0)), vec![2.0; 3]);
    }
}
