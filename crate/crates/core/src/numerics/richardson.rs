use crate::scalar::Scalar;

/// Richardson extrapolation for an estimate whose error expands in even powers
/// of the step: `D(h) = D + c2 h^2 + c4 h^4 + ...`.
///
/// `values[j]` must be `D(h0 / ratio^j)`. Each sweep eliminates one more even
/// power; with three values the result is accurate to `O(h^6)`.
pub fn richardson_even<S: Scalar>(values: &[S], ratio: S) -> S {
    assert!(!values.is_empty());
    let mut table = values.to_vec();
    let r2 = ratio * ratio;
    let mut factor = r2;
    for level in 1..values.len() {
        for j in (level..values.len()).rev() {
            table[j] = (factor * table[j] - table[j - 1]) / (factor - S::one());
        }
        factor = factor * r2;
    }
    table[values.len() - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removes_h2_and_h4_terms_exactly() {
        let d = |h: f64| 3.0 + 0.7 * h * h - 2.0 * h.powi(4);
        let h0 = 0.1;
        let vals = [d(h0), d(h0 / 2.0), d(h0 / 4.0)];
        assert!((richardson_even(&vals, 2.0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn central_second_difference_of_exp() {
        // d2/dx2 exp at 0 via central differences, three levels
        let d2 = |h: f64| ((h).exp() - 2.0 + (-h).exp()) / (h * h);
        let vals = [d2(0.1), d2(0.05), d2(0.025)];
        let err = (richardson_even(&vals, 2.0) - 1.0).abs();
        assert!(err < 1e-9, "{err}");
        assert!(err < (d2(0.025) - 1.0).abs() / 1e3);
    }
}
