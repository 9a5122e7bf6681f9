//! Compensated summation built on the error-free TwoSum transformation.

/// Error-free transformation: `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Running sum carrying an explicit error term (Ogita–Rump–Oishi Sum2).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    err: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        self.err += e;
    }

    /// Merge another partial sum. Merging is order-sensitive in the last
    /// bits, so callers must merge partials in a fixed order.
    #[inline]
    pub fn merge(&mut self, other: &CompensatedSum) {
        let (s, e) = two_sum(self.sum, other.sum);
        self.sum = s;
        self.err += e + other.err;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.err
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Combine partial sums pairwise in a fixed binary-tree order.
pub fn tree_merge(mut parts: Vec<CompensatedSum>) -> CompensatedSum {
    if parts.is_empty() {
        return CompensatedSum::new();
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        for pair in parts.chunks(2) {
            let mut acc = pair[0];
            if let Some(rhs) = pair.get(1) {
                acc.merge(rhs);
            }
            next.push(acc);
        }
        parts = next;
    }
    parts[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_is_exact() {
        let (s, e) = two_sum(1.0, 1e-20);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-20);
    }

    #[test]
    fn compensated_beats_naive_on_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        let naive: f64 = xs.iter().sum();
        let comp: CompensatedSum = xs.iter().copied().collect();
        assert_eq!(comp.value(), 2.0);
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn tree_merge_matches_sequential_on_benign_data() {
        let xs: Vec<f64> = (1..=10_000).map(|k| 1.0 / (k as f64).powi(2)).collect();
        let seq: CompensatedSum = xs.iter().copied().collect();
        let parts: Vec<CompensatedSum> = xs
            .chunks(333)
            .map(|c| c.iter().copied().collect())
            .collect();
        let tree = tree_merge(parts);
        assert!((seq.value() - tree.value()).abs() <= 1e-16);
    }
}
