//! Brute-force total unimodularity verification.
//!
//! The boundary matrices of planar 2-complexes are totally unimodular by
//! construction; this checker exists to catch assembly bugs. The scan is
//! exponential in the order, so callers cap it (default 6).

use itertools::Itertools;

use super::BoundaryMatrix;

/// Default submatrix order cap.
pub const DEFAULT_TU_ORDER: usize = 6;

/// Outcome of a TU scan.
#[derive(Clone, Debug)]
pub struct TuVerdict {
    /// Largest order actually scanned.
    pub checked_order: usize,
    /// A violating square submatrix, if one was found.
    pub violation: Option<TuViolation>,
}

#[derive(Clone, Debug)]
pub struct TuViolation {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub det: i64,
}

impl TuVerdict {
    pub fn is_tu(&self) -> bool {
        self.violation.is_none()
    }
}

/// Check every square submatrix up to `max_order` for determinant in
/// {-1, 0, 1}. Reports the first violation found.
pub fn tu_verify(matrix: &BoundaryMatrix, max_order: usize) -> TuVerdict {
    assert!(max_order >= 1, "max_order must be at least 1");
    let dense = matrix.to_dense();
    let order_cap = max_order.min(matrix.rows).min(matrix.cols);
    for k in 1..=order_cap {
        for rows in (0..matrix.rows).combinations(k) {
            for cols in (0..matrix.cols).combinations(k) {
                let mut sub = vec![vec![0i128; k]; k];
                for (i, &r) in rows.iter().enumerate() {
                    for (j, &c) in cols.iter().enumerate() {
                        sub[i][j] = dense[r][c] as i128;
                    }
                }
                let det = det_bareiss(&mut sub);
                if det.abs() > 1 {
                    return TuVerdict {
                        checked_order: k,
                        violation: Some(TuViolation { rows, cols, det: det as i64 }),
                    };
                }
            }
        }
    }
    TuVerdict { checked_order: order_cap, violation: None }
}

/// Fraction-free determinant (Bareiss), exact for entries that keep
/// intermediate values within i128. Submatrices here are tiny and ±1-valued.
fn det_bareiss(m: &mut [Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// TU scan for an arbitrary dense integer matrix (used in tests and by the
/// LP formulation audit).
pub fn tu_verify_dense(dense: &[Vec<i64>], max_order: usize) -> TuVerdict {
    let rows = dense.len();
    let cols = dense.first().map_or(0, |r| r.len());
    let matrix = BoundaryMatrix {
        rows,
        cols,
        col_entries: (0..cols)
            .map(|c| {
                (0..rows)
                    .filter(|&r| dense[r][c] != 0)
                    .map(|r| (r, dense[r][c].clamp(-127, 127) as i8))
                    .collect()
            })
            .collect(),
    };
    tu_verify(&matrix, max_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex2;
    use crate::geom::point::Point;

    #[test]
    fn all_ones_column_is_tu() {
        let v = tu_verify_dense(&[vec![1], vec![1], vec![1]], 3);
        assert!(v.is_tu());
    }

    #[test]
    fn det_two_matrix_is_not_tu() {
        let v = tu_verify_dense(&[vec![1, 1], vec![-1, 1]], 2);
        assert!(!v.is_tu());
        let viol = v.violation.unwrap();
        assert_eq!(viol.det.abs(), 2);
    }

    #[test]
    fn boundary_matrices_of_small_complex_are_tu() {
        let pt = Point::from_i64;
        let k = Complex2::build(
            vec![pt(0, 0), pt(2, 0), pt(1, 2), pt(3, 2), pt(4, 0)],
            vec![[0, 1, 2], [1, 3, 2], [1, 4, 3]],
        )
        .unwrap();
        assert!(tu_verify(k.boundary_matrix(2), 4).is_tu());
        assert!(tu_verify(k.boundary_matrix(1), 4).is_tu());
    }
}
