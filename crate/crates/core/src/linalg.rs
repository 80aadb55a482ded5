use crate::error::{Error, Result};

/// Solves `A x = b` for square `A` (row-major) by Gaussian elimination with
/// partial pivoting. A pivot below `rel_tol · max|A|` is reported as singular.
pub(crate) fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, rel_tol: f64) -> Result<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let (piv_row, piv) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if piv <= rel_tol * scale || piv == 0.0 {
            return Err(Error::SingularSystem { column: col, pivot: piv });
        }
        a.swap(col, piv_row);
        b.swap(col, piv_row);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Ok(x)
}
