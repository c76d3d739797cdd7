//! Fast wide-range reals: a binary64 significand with a separate `i64` exponent.
//!
//! Accuracy is that of binary64 but magnitudes like `exp(1/ε)` at `ε = 1e-12`
//! stay representable. Used for dense sampling (sup over grids, quadrature
//! weights) where big-float cost would dominate.

use core::cmp::Ordering;
use core::f64::consts::LN_2;

/// `m * 2^e` with `m == 0` or `0.5 <= |m| < 1`.
#[derive(Clone, Copy, Debug)]
pub struct Wide {
    m: f64,
    e: i64,
}

// ln 2 split so that k * LN2_HI is exact for |k| < 2^42
const LN2_HI: f64 = 0.693_145_751_953_125;
const LN2_LO: f64 = 1.428_606_820_309_417_3e-6;

impl Wide {
    pub const ZERO: Wide = Wide { m: 0.0, e: 0 };

    pub fn from_f64(v: f64) -> Wide {
        if v == 0.0 || !v.is_finite() {
            return Wide { m: if v.is_finite() { 0.0 } else { v }, e: 0 };
        }
        let (m, e) = libm::frexp(v);
        Wide { m, e: e as i64 }
    }

    fn norm(m: f64, e: i64) -> Wide {
        if m == 0.0 || !m.is_finite() {
            return Wide { m, e: 0 };
        }
        let (f, k) = libm::frexp(m);
        Wide { m: f, e: e + k as i64 }
    }

    /// `self * 2^k`, exact.
    pub fn mul_pow2(self, k: i64) -> Wide {
        if self.m == 0.0 || !self.m.is_finite() {
            return self;
        }
        Wide { m: self.m, e: self.e + k }
    }

    pub fn is_finite(&self) -> bool {
        self.m.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0.0
    }

    pub fn signum(&self) -> f64 {
        if self.m > 0.0 {
            1.0
        } else if self.m < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    /// Saturating conversion.
    pub fn to_f64(&self) -> f64 {
        if self.m == 0.0 || !self.m.is_finite() {
            return self.m;
        }
        if self.e > 1100 {
            return self.m.signum() * f64::INFINITY;
        }
        if self.e < -1200 {
            return 0.0;
        }
        libm::ldexp(self.m, self.e as i32)
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.m == 0.0 {
            return f64::NEG_INFINITY;
        }
        if !self.m.is_finite() {
            return f64::INFINITY;
        }
        libm::log(self.m.abs()) + self.e as f64 * LN_2
    }

    /// Builds `sign * exp(l)` from a log-magnitude.
    pub fn from_ln(l: f64, sign: f64) -> Wide {
        if l == f64::NEG_INFINITY || sign == 0.0 {
            return Wide::ZERO;
        }
        if !l.is_finite() {
            return Wide { m: sign * f64::INFINITY, e: 0 };
        }
        let k = libm::floor(l / LN_2);
        if k.abs() >= 9.0e15 {
            return Wide { m: if l > 0.0 { sign * f64::INFINITY } else { 0.0 }, e: 0 };
        }
        let r = (l - k * LN2_HI) - k * LN2_LO;
        Wide::norm(sign * libm::exp(r), k as i64)
    }

    pub fn neg(self) -> Wide {
        Wide { m: -self.m, e: self.e }
    }

    pub fn abs(self) -> Wide {
        Wide { m: self.m.abs(), e: self.e }
    }

    pub fn add(self, o: Wide) -> Wide {
        if self.m == 0.0 {
            return o;
        }
        if o.m == 0.0 {
            return self;
        }
        if !self.m.is_finite() || !o.m.is_finite() {
            return Wide { m: self.m + o.m, e: 0 };
        }
        let (big, small) = if self.e >= o.e { (self, o) } else { (o, self) };
        let d = big.e - small.e;
        if d > 60 {
            return big;
        }
        Wide::norm(big.m + libm::ldexp(small.m, -(d as i32)), big.e)
    }

    pub fn sub(self, o: Wide) -> Wide {
        self.add(o.neg())
    }

    pub fn mul(self, o: Wide) -> Wide {
        if self.m == 0.0 || o.m == 0.0 {
            return Wide::ZERO;
        }
        Wide::norm(self.m * o.m, self.e + o.e)
    }

    pub fn div(self, o: Wide) -> Option<Wide> {
        if o.m == 0.0 {
            return None;
        }
        if self.m == 0.0 {
            return Some(Wide::ZERO);
        }
        Some(Wide::norm(self.m / o.m, self.e - o.e))
    }

    pub fn recip(self) -> Option<Wide> {
        Wide::from_f64(1.0).div(self)
    }

    pub fn exp(self) -> Wide {
        if self.e <= 0 || self.e < 1000 {
            let x = self.to_f64();
            if x.is_finite() {
                return Wide::from_ln(x, 1.0);
            }
        }
        if self.m > 0.0 {
            Wide { m: f64::INFINITY, e: 0 }
        } else {
            Wide::ZERO
        }
    }

    pub fn ln(self) -> Option<Wide> {
        if self.m <= 0.0 {
            return None;
        }
        Some(Wide::from_f64(self.ln_abs()))
    }

    pub fn powf(self, p: f64) -> Option<Wide> {
        if self.m == 0.0 {
            return if p > 0.0 { Some(Wide::ZERO) } else { None };
        }
        if self.m < 0.0 {
            return None;
        }
        Some(Wide::from_ln(self.ln_abs() * p, 1.0))
    }

    pub fn powi(self, n: i64) -> Option<Wide> {
        if self.m == 0.0 {
            return if n > 0 { Some(Wide::ZERO) } else if n == 0 { Some(Wide::from_f64(1.0)) } else { None };
        }
        let sign = if self.m < 0.0 && n % 2 != 0 { -1.0 } else { 1.0 };
        Some(Wide::from_ln(self.ln_abs() * n as f64, sign))
    }

    pub fn floor(self) -> Wide {
        if self.e > 60 {
            return self;
        }
        Wide::from_f64(libm::floor(self.to_f64()))
    }

    pub fn cmp_total(&self, o: &Wide) -> Ordering {
        let (sa, sb) = (self.signum(), o.signum());
        if sa != sb || sa == 0.0 {
            return sa.partial_cmp(&sb).unwrap_or(Ordering::Equal);
        }
        let mag = if self.e != o.e {
            self.e.cmp(&o.e)
        } else {
            self.m.abs().partial_cmp(&o.m.abs()).unwrap_or(Ordering::Equal)
        };
        if sa < 0.0 {
            mag.reverse()
        } else {
            mag
        }
    }

    pub fn max(self, o: Wide) -> Wide {
        if self.cmp_total(&o) == Ordering::Less {
            o
        } else {
            self
        }
    }

    pub fn min(self, o: Wide) -> Wide {
        if self.cmp_total(&o) == Ordering::Greater {
            o
        } else {
            self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_beyond_binary64() {
        let v = Wide::from_f64(1e6).exp();
        assert!(v.is_finite());
        assert!((v.ln_abs() - 1e6).abs() < 1e-6);
        let w = v.mul(v).div(v).unwrap();
        assert!((w.ln_abs() - 1e6).abs() < 1e-6);
    }

    #[test]
    fn arithmetic_matches_f64_in_range() {
        let a = Wide::from_f64(3.5);
        let b = Wide::from_f64(-1.25);
        assert_eq!(a.add(b).to_f64(), 2.25);
        assert_eq!(a.mul(b).to_f64(), -4.375);
        assert_eq!(a.div(b).unwrap().to_f64(), -2.8);
        assert_eq!(b.abs().to_f64(), 1.25);
        assert_eq!(a.cmp_total(&b), Ordering::Greater);
        assert!((Wide::from_f64(2.0).powf(0.5).unwrap().to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }
}
