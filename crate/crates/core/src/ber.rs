//! Bit-error counting and binomial confidence intervals.

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Errors observed over a number of simulated bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorCount {
    pub errors: u64,
    pub bits: u64,
}

impl ErrorCount {
    pub fn new(errors: u64, bits: u64) -> Self {
        debug_assert!(errors <= bits);
        Self { errors, bits }
    }

    pub fn record(&mut self, error: bool) {
        self.bits += 1;
        self.errors += u64::from(error);
    }

    pub fn merge(&mut self, other: ErrorCount) {
        self.errors += other.errors;
        self.bits += other.bits;
    }

    pub fn merged(mut self, other: ErrorCount) -> Self {
        self.merge(other);
        self
    }

    /// Empirical bit-error rate; 0 when nothing was counted.
    pub fn rate(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }

    /// Half-width of the normal-approximation 99% interval. Zero-error
    /// counts use the rule-of-three bound `3/bits` instead of zero.
    pub fn ci99(&self) -> f64 {
        if self.bits == 0 {
            return 1.0;
        }
        let n = self.bits as f64;
        if self.errors == 0 {
            return 3.0 / n;
        }
        let p = self.rate();
        Z99 * (p * (1.0 - p) / n).sqrt()
    }
}
