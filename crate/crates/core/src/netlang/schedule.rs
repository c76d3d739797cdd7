//! Geometric sampling schedules `ε_k = ε₀·r^k`.

use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use super::expr::qr;
use crate::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplingSchedule {
    pub eps0: Q,
    pub ratio: Q,
    pub count: usize,
    /// Working precision in decimal digits.
    pub digits: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleError {
    Start,
    Ratio,
    Count,
    Digits,
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleError::Start => "schedule start must lie in (0, 1]",
            ScheduleError::Ratio => "schedule ratio must lie in (0, 1)",
            ScheduleError::Count => "schedule needs at least 8 points",
            ScheduleError::Digits => "precision must be between 10 and 10000 digits",
        })
    }
}

impl Default for SamplingSchedule {
    /// `ε_k = 10^{-k}`, `k = 1..12`, 50 digits.
    fn default() -> Self {
        SamplingSchedule { eps0: qr(1, 10), ratio: qr(1, 10), count: 12, digits: 50 }
    }
}

impl SamplingSchedule {
    pub fn new(eps0: Q, ratio: Q, count: usize, digits: u32) -> Result<Self, ScheduleError> {
        if !(eps0 > Q::zero() && eps0 <= Q::one()) {
            return Err(ScheduleError::Start);
        }
        if !(ratio > Q::zero() && ratio < Q::one()) {
            return Err(ScheduleError::Ratio);
        }
        if count < 8 {
            return Err(ScheduleError::Count);
        }
        if !(10..=10000).contains(&digits) {
            return Err(ScheduleError::Digits);
        }
        Ok(SamplingSchedule { eps0, ratio, count, digits })
    }

    pub fn with_digits(mut self, digits: u32) -> Self {
        self.digits = digits;
        self
    }

    /// The points `ε₀ > ε₁ > … > ε_{K−1}`.
    pub fn points(&self) -> Vec<Q> {
        let mut out = Vec::with_capacity(self.count);
        let mut e = self.eps0.clone();
        for _ in 0..self.count {
            out.push(e.clone());
            e *= &self.ratio;
        }
        out
    }

    /// The points together with every `extra` inside `[ε_{K−1}, ε₀]`, decreasing and deduplicated.
    pub fn points_with(&self, extra: &[Q]) -> Vec<Q> {
        let mut out = self.points();
        let last = out.last().cloned().unwrap_or_else(Q::zero);
        out.extend(extra.iter().filter(|e| **e <= self.eps0 && **e >= last).cloned());
        out.sort_by(|a, b| b.cmp(a));
        out.dedup();
        out
    }

    pub fn last(&self) -> Q {
        self.points().pop().unwrap_or_else(|| self.eps0.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_points() {
        let s = SamplingSchedule::default();
        let p = s.points();
        assert_eq!(p.len(), 12);
        assert_eq!(p[0], qr(1, 10));
        assert_eq!(p[11], Q::new(1.into(), num_bigint::BigInt::from(10u64.pow(12))));
        assert!(SamplingSchedule::new(qr(1, 2), qr(1, 1), 12, 50).is_err());
        assert!(SamplingSchedule::new(qr(1, 2), qr(1, 2), 7, 50).is_err());
        let w = s.points_with(&[qr(1, 20), qr(1, 10), qr(2, 1)]);
        assert_eq!(w.len(), 13);
        assert_eq!(w[1], qr(1, 20));
    }
}
