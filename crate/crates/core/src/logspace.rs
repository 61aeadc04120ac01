//! Log-domain accumulation.
//!
//! `NEG_INF` (`f64::NEG_INFINITY`) is the log of zero weight. It is absorbing
//! for `+` and neutral for [`logsumexp`].

use crate::math;

pub const NEG_INF: f64 = f64::NEG_INFINITY;

/// `ln(e^a + e^b)` with max subtraction.
#[inline]
pub fn logaddexp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == NEG_INF {
        return hi;
    }
    hi + math::ln_1p(math::exp(lo - hi))
}

/// `ln(sum_i e^{v_i})`; `NEG_INF` for an empty or all-`NEG_INF` slice.
pub fn logsumexp(values: &[f64]) -> f64 {
    let mut m = NEG_INF;
    for &v in values {
        if v > m {
            m = v;
        }
    }
    if m == NEG_INF || m == f64::INFINITY {
        return m;
    }
    let mut rest = 0.0;
    let mut seen_max = false;
    for &v in values {
        if v == m && !seen_max {
            seen_max = true;
            continue;
        }
        rest += math::exp(v - m);
    }
    m + math::ln_1p(rest)
}

/// Running `logsumexp` with compensated summation of the rescaled terms.
///
/// Holds `ln(sum) = max + ln(sum_scaled)`; used where terms arrive one at a
/// time and must not be stored.
#[derive(Clone, Copy, Debug)]
pub struct LogAccumulator {
    max: f64,
    sum: f64,
    comp: f64,
}

impl Default for LogAccumulator {
    fn default() -> Self {
        LogAccumulator {
            max: NEG_INF,
            sum: 0.0,
            comp: 0.0,
        }
    }
}

impl LogAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        if v == NEG_INF {
            return;
        }
        if v > self.max {
            let scale = if self.max == NEG_INF {
                0.0
            } else {
                math::exp(self.max - v)
            };
            self.sum *= scale;
            self.comp *= scale;
            self.max = v;
            self.push(1.0);
        } else {
            self.push(math::exp(v - self.max));
        }
    }

    // Neumaier summation
    fn push(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        if self.max == NEG_INF {
            return NEG_INF;
        }
        self.max + math::ln(self.sum + self.comp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_arguments_do_not_overflow() {
        let v = logaddexp(1234.0, 1232.0);
        assert!((v - 1234.126928011042972496444).abs() < 1e-12);
        let v = logsumexp(&[1230.0, 1235.0]);
        assert!((v - 1235.006715348489118068616).abs() < 1e-12);
    }

    #[test]
    fn neg_inf_is_neutral() {
        assert_eq!(logaddexp(NEG_INF, 2.5), 2.5);
        assert_eq!(logaddexp(NEG_INF, NEG_INF), NEG_INF);
        assert_eq!(logsumexp(&[]), NEG_INF);
        assert_eq!(logsumexp(&[NEG_INF, NEG_INF]), NEG_INF);
        assert_eq!(logsumexp(&[NEG_INF, 0.0]), 0.0);
    }

    #[test]
    fn accumulator_matches_batch() {
        let vals = [3.0, -1.0, 7.5, 7.5, NEG_INF, 0.25, -400.0, 12.0];
        let mut acc = LogAccumulator::new();
        for &v in &vals {
            acc.add(v);
        }
        assert!((acc.value() - logsumexp(&vals)).abs() < 1e-13);
        assert_eq!(LogAccumulator::new().value(), NEG_INF);
    }

    #[test]
    fn equal_terms() {
        let v = logsumexp(&[0.0; 3]);
        assert!((v - 3f64.ln()).abs() < 1e-15);
    }
}
