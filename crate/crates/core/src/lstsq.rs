//! Small dense least-squares solves (Householder QR).

/// Minimizes `||A x - b||_2` for a tall `rows x cols` matrix given as
/// columns. Returns the coefficients and the residual 2-norm, or `None`
/// when `A` is numerically rank deficient.
pub fn solve_columns(columns: &[Vec<f64>], b: &[f64]) -> Option<(Vec<f64>, f64)> {
    let k = columns.len();
    let m = b.len();
    if k == 0 || m < k || columns.iter().any(|c| c.len() != m) {
        return None;
    }
    // column-major copy
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut rhs = b.to_vec();
    let mut diag = vec![0.0; k];
    for j in 0..k {
        let norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = a[j].iter().map(|v| v.abs()).fold(0.0, f64::max);
        if norm <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        diag[j] = alpha;
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(j + 1) {
                let dot: f64 = v.iter().zip(&col[j..]).map(|(x, y)| x * y).sum();
                let f = 2.0 * dot / vnorm2;
                for (c, vi) in col[j..].iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            }
            let dot: f64 = v.iter().zip(&rhs[j..]).map(|(x, y)| x * y).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in rhs[j..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
    }
    let mut x = vec![0.0; k];
    for j in (0..k).rev() {
        let mut s = rhs[j];
        for i in j + 1..k {
            s -= a[i][j] * x[i];
        }
        x[j] = s / diag[j];
    }
    let resid = rhs[k..].iter().map(|v| v * v).sum::<f64>().sqrt();
    Some((x, resid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let t: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let ones = vec![1.0; t.len()];
        let b: Vec<f64> = t.iter().map(|x| 1.5 - 2.0 * x).collect();
        let (x, res) = solve_columns(&[ones, t], &b).unwrap();
        assert!((x[0] - 1.5).abs() < 1e-13);
        assert!((x[1] + 2.0).abs() < 1e-13);
        assert!(res < 1e-12);
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let c = vec![1.0, 2.0, 3.0];
        assert!(solve_columns(&[c.clone(), c], &[1.0, 1.0, 1.0]).is_none());
    }

    #[test]
    fn residual_of_inconsistent_system() {
        // fit constant to (0, 2): best 1, residual sqrt(2)
        let (x, res) = solve_columns(&[vec![1.0, 1.0]], &[0.0, 2.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15);
        assert!((res - 2f64.sqrt()).abs() < 1e-15);
    }
}
