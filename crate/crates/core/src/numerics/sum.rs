use crate::scalar::Scalar;

/// Neumaier's variant of Kahan summation; the running error term also
/// captures the case where the incoming value dominates the partial sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<S> {
    sum: S,
    compensation: S,
}

impl<S: Scalar> CompensatedSum<S> {
    pub fn new() -> Self {
        Self {
            sum: S::zero(),
            compensation: S::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: S) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation = self.compensation + ((self.sum - t) + value);
        } else {
            self.compensation = self.compensation + ((value - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    /// Multiplies the accumulated total by `factor`.
    pub fn rescale(&mut self, factor: S) {
        self.sum = self.sum * factor;
        self.compensation = self.compensation * factor;
    }

    #[inline]
    pub fn value(&self) -> S {
        self.sum + self.compensation
    }
}

impl<S: Scalar> FromIterator<S> for CompensatedSum<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

pub fn compensated_sum<S: Scalar, I: IntoIterator<Item = S>>(iter: I) -> S {
    iter.into_iter().collect::<CompensatedSum<S>>().value()
}

/// Pairwise (cascade) summation with compensated leaves. The reduction tree
/// depends only on the slice length, so results are reproducible regardless
/// of how the inputs were produced.
pub fn pairwise_sum<S: Scalar>(values: &[S]) -> S {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return compensated_sum(values.iter().copied());
    }
    let mid = values.len() / 2;
    let (a, b) = values.split_at(mid);
    let mut acc = CompensatedSum::new();
    acc.add(pairwise_sum(a));
    acc.add(pairwise_sum(b));
    acc.value()
}
