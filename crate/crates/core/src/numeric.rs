//! Deterministic reductions.
//!
//! Every sum that feeds a reported number goes through [`NeumaierSum`] in a
//! fixed (lexicographic) order, so results do not depend on thread count.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// `x^e` for `x >= 0` that maps `0^e` to 0 for every positive `e`.
#[inline]
pub fn pow_nonneg(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else {
        x.powf(e)
    }
}

/// Aggregates nonnegative terms with an l^q quasinorm; `q = inf` takes the max.
pub fn lq_aggregate<I: IntoIterator<Item = f64>>(terms: I, q: f64) -> f64 {
    if q.is_infinite() {
        terms.into_iter().fold(0.0, f64::max)
    } else {
        pow_nonneg(compensated_sum(terms.into_iter().map(|t| pow_nonneg(t, q))), 1.0 / q)
    }
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxy = compensated_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let sxx = compensated_sum(x.iter().map(|a| (a - mx) * (a - mx)));
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn lq_aggregate_limits() {
        assert!((lq_aggregate([3.0, 4.0], 2.0) - 5.0).abs() < 1e-15);
        assert_eq!(lq_aggregate([3.0, 4.0], f64::INFINITY), 4.0);
        assert_eq!(lq_aggregate([0.0, 0.0], 0.5), 0.0);
    }

    #[test]
    fn linear_fit_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| -2.5 * v + 1.0).collect();
        let (m, b) = linear_fit(&x, &y);
        assert!((m + 2.5).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
    }
}
