use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<S> {
    pub slope: S,
    pub intercept: S,
    /// Largest absolute residual over the fitted points.
    pub max_residual: S,
    /// `max(y) - min(y)`.
    pub range: S,
}

impl<S: Scalar> LineFit<S> {
    pub fn relative_residual(&self) -> S {
        if self.range > S::zero() {
            self.max_residual / self.range
        } else {
            S::zero()
        }
    }
}

/// Ordinary least-squares line through `(x, y)`; needs two distinct abscissae.
pub fn fit_line<S: Scalar>(xs: &[S], ys: &[S]) -> Option<LineFit<S>> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = S::from_usize_lossy(n);
    let mx = xs.iter().copied().sum::<S>() / nf;
    let my = ys.iter().copied().sum::<S>() / nf;
    let mut sxx = S::zero();
    let mut sxy = S::zero();
    for (x, y) in xs.iter().zip(ys) {
        let dx = *x - mx;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * (*y - my);
    }
    if sxx == S::zero() {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut max_residual = S::zero();
    let mut lo = S::infinity();
    let mut hi = S::neg_infinity();
    for (x, y) in xs.iter().zip(ys) {
        max_residual = max_residual.max((*y - (intercept + slope * *x)).abs());
        lo = lo.min(*y);
        hi = hi.max(*y);
    }
    Some(LineFit {
        slope,
        intercept,
        max_residual,
        range: hi - lo,
    })
}

/// Least squares for a small dense design matrix (rows = observations) via
/// the normal equations and Gaussian elimination with partial pivoting.
pub fn least_squares<S: Scalar>(rows: &[Vec<S>], ys: &[S]) -> Option<Vec<S>> {
    let p = rows.first()?.len();
    let mut a = vec![vec![S::zero(); p + 1]; p];
    for (row, y) in rows.iter().zip(ys) {
        for i in 0..p {
            for j in 0..p {
                a[i][j] = a[i][j] + row[i] * row[j];
            }
            a[i][p] = a[i][p] + row[i] * *y;
        }
    }
    for col in 0..p {
        let pivot = (col..p).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col] == S::zero() {
            return None;
        }
        a.swap(col, pivot);
        for r in 0..p {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=p {
                    a[r][c] = a[r][c] - f * a[col][c];
                }
            }
        }
    }
    Some((0..p).map(|i| a[i][p] / a[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 - 0.75 * x).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope + 0.75).abs() < 1e-14);
        assert!((fit.intercept - 2.5).abs() < 1e-13);
        assert!(fit.max_residual < 1e-13);
        assert!((fit.range - 6.75).abs() < 1e-13);
    }

    #[test]
    fn degenerate_abscissae() {
        assert!(fit_line(&[1.0, 1.0], &[0.0, 1.0]).is_none());
        assert!(fit_line(&[1.0], &[0.0]).is_none());
    }

    #[test]
    fn three_parameter_model() {
        let ns: Vec<f64> = (10..27).map(f64::from).collect();
        let rows: Vec<Vec<f64>> = ns.iter().map(|n| vec![1.0, *n, n.ln()]).collect();
        let ys: Vec<f64> = ns.iter().map(|n| 0.3 - 0.9 * n + 1.0 * n.ln()).collect();
        let c = least_squares(&rows, &ys).unwrap();
        assert!((c[0] - 0.3).abs() < 1e-8);
        assert!((c[1] + 0.9).abs() < 1e-9);
        assert!((c[2] - 1.0).abs() < 1e-8);
    }
}
