//! Thin helpers over nalgebra for the dense, tiny systems used here.

use nalgebra::{DMatrix, DVector};

/// Matrix whose rows are the given points.
pub fn rows_matrix<P: AsRef<[f64]>>(points: &[P]) -> DMatrix<f64> {
    let r = points.len();
    let c = points.first().map_or(0, |p| p.as_ref().len());
    DMatrix::from_fn(r, c, |i, j| points[i].as_ref()[j])
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Dimension of the affine hull of `points` (`None` for an empty set).
pub fn affine_rank<P: AsRef<[f64]>>(points: &[P], tol: f64) -> Option<usize> {
    let first = points.first()?.as_ref();
    if points.len() == 1 {
        return Some(0);
    }
    let diffs: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.as_ref().iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    Some(singular_values(&rows_matrix(&diffs)).iter().filter(|&&s| s > tol).count())
}

/// Solves the square system `A x = b`, refusing near-singular matrices.
pub fn solve_square(a: &DMatrix<f64>, b: &[f64], min_sv: f64) -> Option<Vec<f64>> {
    let sv = singular_values(a);
    if sv.is_empty() || *sv.last().unwrap() <= min_sv * sv[0].max(1.0) {
        return None;
    }
    let x = a.clone().lu().solve(&DVector::from_column_slice(b))?;
    Some(x.iter().copied().collect())
}

/// A unit vector spanning the null space of a matrix with nullity one (the
/// right singular vector of the smallest singular value).
pub fn null_vector(m: &DMatrix<f64>) -> Vec<f64> {
    let cols = m.ncols();
    // pad to square so the thin SVD returns a full V
    let mut sq = DMatrix::zeros(cols.max(m.nrows()), cols);
    sq.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    v_t.row(idx).iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        let pts = [[1.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.0, 1.0, 0.0]];
        assert_eq!(affine_rank(&pts, 1e-9), Some(1));
        let tri = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(affine_rank(&tri, 1e-9), Some(2));
        assert_eq!(affine_rank::<[f64; 3]>(&[], 1e-9), None);
    }

    #[test]
    fn null_vector_of_dependent_columns() {
        // columns: (1,0), (0,1), (1,1) -> null vector proportional to (1,1,-1)
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        let v = null_vector(&m);
        let r = &m * DVector::from_vec(v.clone());
        assert!(r.norm() < 1e-12);
        assert!((v[0] - v[1]).abs() < 1e-12 && (v[0] + v[2]).abs() < 1e-12);
    }

    #[test]
    fn singular_system_refused() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(solve_square(&a, &[1.0, 2.0], 1e-12).is_none());
        let b = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        assert_eq!(solve_square(&b, &[2.0, 2.0], 1e-12), Some(vec![1.0, 0.5]));
    }
}
