use crate::scalar::Scalar;

/// Gauss–Legendre rule on `[-1, 1]`; `n` nodes integrate polynomials of
/// degree `2n - 1` exactly.
#[derive(Debug, Clone)]
pub struct GaussLegendre<S> {
    nodes: Vec<S>,
    weights: Vec<S>,
}

/// Legendre `P_n(x)` and `P_n'(x)` via the three-term recurrence.
fn legendre<S: Scalar>(n: usize, x: S) -> (S, S) {
    let mut p0 = S::one();
    let mut p1 = x;
    if n == 0 {
        return (S::one(), S::zero());
    }
    for k in 2..=n {
        let kf = S::from_usize_lossy(k);
        let p2 = ((S::lit(2.0) * kf - S::one()) * x * p1 - (kf - S::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = S::from_usize_lossy(n);
    let dp = nf * (x * p1 - p0) / (x * x - S::one());
    (p1, dp)
}

impl<S: Scalar> GaussLegendre<S> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "at least one node");
        let mut nodes = vec![S::zero(); n];
        let mut weights = vec![S::zero(); n];
        let nf = S::from_usize_lossy(n);
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton
            let theta =
                S::PI() * (S::from_usize_lossy(i) + S::lit(0.75)) / (nf + S::lit(0.5));
            let mut x = theta.cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x = x - dx;
                if dx.abs() <= S::epsilon() {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = S::lit(2.0) / ((S::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = S::zero();
        }
        Self { nodes, weights }
    }

    /// Smallest rule that is exact for polynomials of the given degree.
    pub fn exact_for_degree(degree: usize) -> Self {
        Self::new((degree + 1).div_ceil(2).max(1))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate<F: FnMut(S) -> S>(&self, a: S, b: S, mut f: F) -> S {
        let half = (b - a) * S::lit(0.5);
        let mid = (b + a) * S::lit(0.5);
        let mut acc = super::CompensatedSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(*w * f(mid + half * *x));
        }
        acc.value() * half
    }
}
