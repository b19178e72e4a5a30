//! Compensated summation.

/// Neumaier's variant of Kahan summation.
///
/// The result depends on the order in which terms are added, so callers that
/// need reproducible totals must feed terms in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum in, keeping its compensation term.
    #[inline]
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        // naive summation returns 0 here
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn merge_matches_flat() {
        let xs: [f64; 6] = [0.1, 0.2, 0.3, 1e16, -1e16, 0.4];
        let mut a = CompensatedSum::new();
        let mut b = CompensatedSum::new();
        for x in &xs[..3] {
            a.add(*x);
        }
        for x in &xs[3..] {
            b.add(*x);
        }
        a.merge(&b);
        assert!((a.value() - 1.0).abs() < 1e-15);
    }
}
