//! Tiny dense solves shared by the closed-form estimators.

/// Solve a 3x3 linear system by Gaussian elimination with partial pivoting.
///
/// Returns `None` when the best available pivot falls below `pivot_tol`.
pub fn solve3(mut a: [[f64; 3]; 3], mut rhs: [f64; 3], pivot_tol: f64) -> Option<[f64; 3]> {
    for col in 0..3 {
        let mut pivot = col;
        for row in col + 1..3 {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if !(a[pivot][col].abs() >= pivot_tol) {
            return None;
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= factor * a[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = [0.0; 3];
    for col in (0..3).rev() {
        let mut sum = rhs[col];
        for k in col + 1..3 {
            sum -= a[col][k] * x[k];
        }
        x[col] = sum / a[col][col];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_known_system() {
        // x = 1, y = -2, z = 3
        let a = [[2.0, 1.0, -1.0], [1.0, 3.0, 2.0], [4.0, -1.0, 1.0]];
        let rhs = [
            2.0 * 1.0 + 1.0 * -2.0 + -1.0 * 3.0,
            1.0 * 1.0 + 3.0 * -2.0 + 2.0 * 3.0,
            4.0 * 1.0 + -1.0 * -2.0 + 1.0 * 3.0,
        ];
        let x = solve3(a, rhs, 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] + 2.0).abs() < 1e-12);
        assert!((x[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_singular_system() {
        // Second row is twice the first.
        let a = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]];
        assert!(solve3(a, [1.0, 2.0, 0.5], 1e-12).is_none());
    }

    #[test]
    fn rejects_nan_pivot() {
        let a = [[f64::NAN, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(solve3(a, [0.0, 0.0, 0.0], 1e-12).is_none());
    }
}
