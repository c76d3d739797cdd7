//! Binary floating point with an arbitrary-length mantissa and a 64-bit exponent.
//!
//! Values are `(-1)^neg * mant * 2^exp` with `mant` odd (or zero), so the
//! representation is canonical and independent of the precision it was
//! computed at. The exponent range is wide enough for `exp(1/eps)` at any
//! schedule depth the toolkit uses; binary64 overflows long before that.
//!
//! Every operation takes a [`Ctx`] carrying the target precision in bits and
//! a rounding direction. Elementary operations round correctly in the
//! requested direction. Transcendental functions are evaluated with guard
//! bits and then widened by a relative `2^-(prec+16)` before directed
//! rounding, which keeps `Down`/`Up` results valid enclosures.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Q;

/// Largest working precision (bits) supported by the built-in constants.
pub const MAX_PREC: u32 = 2000;

const LN2_HEX: &str = "b17217f7d1cf79abc9e3b39803f2f6af40f343267298b62d8a0d175b8baafa2be7b876206debac98559552fb4afa1b10ed2eae35c138214427573b291169b8253e96ca16224ae8c51acbda11317c387eb9ea9bc3b136603b256fa0ec7657f74b72ce87b19d6548caf5dfa6bd38303248655fa1872f20e3a2da2d97c50f3fd5c607f4ca11fb5bfb90610d30f88fe551a2ee569d6dfc1efa157d2e23de1400b39617460775db8990e5c943e732b479cd33cccc4e659393514c4c1a1e0bd1d6095d25669b333564a3376a9c7f8a5e148e82074db6015cfe7aa30c480a5417350d2c955d5179b1e17b9dae313cdb6c606cb1078f735d1b2db31b5f50b5185064c18b4d162db3b365853d";
const LN2_FRAC_BITS: i64 = 2112;
const PI_HEX: &str = "c90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f14374fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7edee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf0598da48361c55d39a69163fa8fd24cf5f83655d23dca3ad961c62f356208552bb9ed529077096966d670c354e4abc9804f1746c08ca18217c32905e462e36ce3be39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf6955817183995497cea956ae515d2261898fa051015728e5a8aaac42dad33170d04507a33a85521abdf1cba64ecfb850458dbef0a";
const PI_FRAC_BITS: i64 = 2110;
const LN10_HEX: &str = "24d763776aaa2b05ba95b58ae0b4c28a38a3fb3e76977e43a0f187a0807c0b5ca58bc0b5ec6a0417331c32f00b17c35a0b1889061042f8b6bee3de2100b945b59e0b3e28a2a324479d96a9b0ec360c7efbd9b3ac12acf1be94586ed2748671eef299ecd6c8d8142163a4cda3511e2713d6c22c15f57b7883d1a7a963a4c17a607891e3f2ab4ebba627356d0b9a89c586691fb2c9a5e31753f6c74a3a95f53f703902fcf30785049a915d973789a0ce76fd1fea5b7ac9c4182be2121baa6dd0078f7f4f145d239b5b8e12323497ebc6f2ba2011fc5ec366d42a527aaab7da7a297ddf8dd813a50e5838e295c03ff78b6c6b5afefff6086e82932c119b586e9923bbe672397da5d3cd";
const LN10_FRAC_BITS: i64 = 2108;

const GUARD: u32 = 32;

/// Rounding direction. `Down` and `Up` round toward minus and plus infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Nearest,
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Nearest => Round::Nearest,
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// Precision (mantissa bits) and rounding direction for one operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ctx {
    pub prec: u32,
    pub round: Round,
}

impl Ctx {
    pub fn new(prec: u32) -> Self {
        Ctx { prec, round: Round::Nearest }
    }

    /// Precision sufficient for `digits` significant decimal digits.
    pub fn from_digits(digits: u32) -> Self {
        Ctx::new(bits_for_digits(digits))
    }

    pub fn with_round(self, round: Round) -> Self {
        Ctx { round, ..self }
    }

    pub fn with_prec(self, prec: u32) -> Self {
        Ctx { prec, ..self }
    }
}

pub fn bits_for_digits(digits: u32) -> u32 {
    // log2(10) < 3.3220
    (digits as u64 * 33220 / 10000) as u32 + 8
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FloatError {
    #[error("argument outside the function's domain")]
    Domain,
    #[error("division by zero")]
    DivByZero,
    #[error("exponent range exceeded")]
    Overflow,
    #[error("requested precision exceeds the supported maximum")]
    Precision,
}

#[derive(Clone)]
pub struct BigFloat {
    neg: bool,
    mant: BigUint,
    exp: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat { neg: false, mant: BigUint::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        BigFloat::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        let neg = v.sign() == Sign::Minus;
        Self::canonical(neg, v.magnitude().clone(), 0)
    }

    /// Exact conversion from binary64. Non-finite input maps to `None`.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Self::zero());
        }
        let (frac, e) = libm::frexp(v);
        // frac in [0.5, 1): scale to a 53-bit integer
        let m = libm::ldexp(frac.abs(), 53) as u64;
        Some(Self::canonical(v < 0.0, BigUint::from(m), e as i64 - 53))
    }

    pub fn from_q(q: &Q, ctx: Ctx) -> Self {
        let num = Self::from_bigint(q.numer());
        let den = Self::from_bigint(q.denom());
        if den.is_one_exact() {
            return num.round_to(ctx);
        }
        num.div(&den, ctx).expect("rational with nonzero denominator")
    }

    fn is_one_exact(&self) -> bool {
        !self.neg && self.exp == 0 && self.mant.is_one()
    }

    fn canonical(neg: bool, mant: BigUint, exp: i64) -> Self {
        if mant.is_zero() {
            return Self::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        BigFloat { neg, mant: mant >> tz, exp: exp + tz as i64 }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg && !self.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.neg && !self.is_zero()
    }

    /// Number of mantissa bits currently stored.
    pub fn mant_bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `t` with `|self|` in `[2^(t-1), 2^t)`; `i64::MIN` for zero.
    pub fn top(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.mant.bits() as i64
        }
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat { neg: !self.neg, ..self.clone() }
    }

    pub fn abs(&self) -> Self {
        BigFloat { neg: false, ..self.clone() }
    }

    /// Multiply by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat { exp: self.exp + k, ..self.clone() }
    }

    pub fn round_to(&self, ctx: Ctx) -> Self {
        finish(self.neg, self.mant.clone(), self.exp, false, ctx)
    }

    pub fn add(&self, other: &Self, ctx: Ctx) -> Self {
        add_signed(self, other, false, ctx)
    }

    pub fn sub(&self, other: &Self, ctx: Ctx) -> Self {
        add_signed(self, other, true, ctx)
    }

    pub fn mul(&self, other: &Self, ctx: Ctx) -> Self {
        finish(self.neg ^ other.neg, &self.mant * &other.mant, self.exp + other.exp, false, ctx)
    }

    pub fn div(&self, other: &Self, ctx: Ctx) -> Result<Self, FloatError> {
        if other.is_zero() {
            return Err(FloatError::DivByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let need = ctx.prec as i64 + 3 + other.mant.bits() as i64 - self.mant.bits() as i64;
        let shift = need.max(0) as u64;
        let (q, r) = (&self.mant << shift).div_rem(&other.mant);
        Ok(finish(
            self.neg ^ other.neg,
            q,
            self.exp - shift as i64 - other.exp,
            !r.is_zero(),
            ctx,
        ))
    }

    pub fn cmp_total(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => {
                return if other.neg { Ordering::Greater } else { Ordering::Less };
            }
            (false, true) => {
                return if self.neg { Ordering::Less } else { Ordering::Greater };
            }
            _ => {}
        }
        if self.neg != other.neg {
            return if self.neg { Ordering::Less } else { Ordering::Greater };
        }
        let mag = self.cmp_abs(other);
        if self.neg {
            mag.reverse()
        } else {
            mag
        }
    }

    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (ta, tb) = (self.top(), other.top());
        if ta != tb {
            return ta.cmp(&tb);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }

    /// Nearest binary64 value; saturates to infinity or zero outside range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let shift = bits.saturating_sub(64);
        let top: u64 = (&self.mant >> shift).to_u64().unwrap_or(u64::MAX);
        let e = self.exp + shift as i64;
        let mag = if e > 1100 {
            f64::INFINITY
        } else if e < -1200 {
            0.0
        } else {
            libm::ldexp(top as f64, e as i32)
        };
        if self.neg {
            -mag
        } else {
            mag
        }
    }

    /// `ln|self|` as binary64, finite for every nonzero value.
    pub fn ln_abs_f64(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mant.bits();
        let shift = bits.saturating_sub(53);
        let top = (&self.mant >> shift).to_u64().unwrap_or(u64::MAX) as f64;
        let e = self.exp + shift as i64;
        libm::log(top) + e as f64 * core::f64::consts::LN_2
    }

    pub fn to_q(&self) -> Q {
        let m = BigInt::from_biguint(if self.neg { Sign::Minus } else { Sign::Plus }, self.mant.clone());
        if self.exp >= 0 {
            Q::from_integer(m << self.exp as u64)
        } else {
            Q::new(m, BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn floor(&self) -> Self {
        if self.is_zero() || self.exp >= 0 {
            return self.clone();
        }
        let sh = (-self.exp) as u64;
        let ip = &self.mant >> sh;
        let frac_nonzero = !(&self.mant & ((BigUint::one() << sh) - BigUint::one())).is_zero();
        if self.neg {
            let v = if frac_nonzero { ip + BigUint::one() } else { ip };
            Self::canonical(true, v, 0)
        } else {
            Self::canonical(false, ip, 0)
        }
    }

    pub fn is_integer(&self) -> bool {
        self.is_zero() || self.exp >= 0
    }

    pub fn ln2(ctx: Ctx) -> Result<Self, FloatError> {
        constant(LN2_HEX, LN2_FRAC_BITS, ctx)
    }

    pub fn pi(ctx: Ctx) -> Result<Self, FloatError> {
        constant(PI_HEX, PI_FRAC_BITS, ctx)
    }

    pub fn ln10(ctx: Ctx) -> Result<Self, FloatError> {
        constant(LN10_HEX, LN10_FRAC_BITS, ctx)
    }

    pub fn exp(&self, ctx: Ctx) -> Result<Self, FloatError> {
        if self.is_zero() {
            return Ok(Self::one());
        }
        let w = ctx.prec + GUARD;
        if self.top() > 62 {
            return Err(FloatError::Overflow);
        }
        let xf = self.to_f64();
        let k = libm::round(xf / core::f64::consts::LN_2) as i64;
        let kbits = 64 - k.unsigned_abs().leading_zeros();
        let wide = Ctx::new(w + kbits + 8);
        let ln2 = Self::ln2(wide)?;
        let r = self.sub(&ln2.mul(&Self::from_i64(k), wide), wide).round_to(Ctx::new(w + 8));
        let halvings = 8;
        let r = r.mul_pow2(-halvings);
        let inner = Ctx::new(w + 8);
        let mut sum = Self::one();
        let mut term = Self::one();
        let mut i = 1i64;
        loop {
            term = term.mul(&r, inner).div(&Self::from_i64(i), inner)?;
            if term.is_zero() || term.top() < sum.top() - (w as i64 + 8) {
                break;
            }
            sum = sum.add(&term, inner);
            i += 1;
        }
        for _ in 0..halvings {
            sum = sum.mul(&sum, inner);
        }
        let approx = sum.mul_pow2(k);
        Ok(widen_rel(&approx, ctx))
    }

    pub fn ln(&self, ctx: Ctx) -> Result<Self, FloatError> {
        if !self.is_positive() {
            return Err(FloatError::Domain);
        }
        let w = ctx.prec + GUARD;
        let inner = Ctx::new(w + 8);
        // self = m * 2^e with m in [0.75, 1.5)
        let mut e = self.top() - 1;
        let mut m = self.mul_pow2(-e);
        let threshold = BigFloat::canonical(false, BigUint::from(3u32), -1);
        if m.cmp_abs(&threshold) != Ordering::Less {
            e += 1;
            m = m.mul_pow2(-1);
        }
        let one = Self::one();
        let num = m.sub(&one, Ctx::new(w + 16));
        let den = m.add(&one, Ctx::new(w + 16));
        let t = num.div(&den, inner)?;
        let t2 = t.mul(&t, inner);
        let mut sum = t.clone();
        let mut power = t.clone();
        let mut k = 3i64;
        while !power.is_zero() {
            power = power.mul(&t2, inner);
            let term = power.div(&Self::from_i64(k), inner)?;
            if term.is_zero() || term.top() < sum.top() - (w as i64 + 8) {
                break;
            }
            sum = sum.add(&term, inner);
            k += 2;
        }
        let ln_m = sum.mul_pow2(1);
        let approx = if e == 0 {
            ln_m
        } else {
            let ebits = 64 - e.unsigned_abs().leading_zeros();
            let wide = Ctx::new(w + ebits + 8);
            let ln2 = Self::ln2(wide)?;
            ln2.mul(&Self::from_i64(e), wide).add(&ln_m, wide)
        };
        Ok(widen_rel(&approx, ctx))
    }

    /// Returns `(sin x, cos x)`.
    pub fn sin_cos(&self, ctx: Ctx) -> Result<(Self, Self), FloatError> {
        if self.is_zero() {
            return Ok((Self::zero(), Self::one()));
        }
        let w = ctx.prec + GUARD;
        let top = self.top().max(0);
        if top as u64 + w as u64 + 16 > MAX_PREC as u64 + 64 {
            return Err(FloatError::Precision);
        }
        let wide = Ctx::new(w + top as u32 + 16);
        let half_pi = Self::pi(wide)?.mul_pow2(-1);
        let q = self.div(&half_pi, Ctx::new(top as u32 + 16))?;
        let k = q.add(&BigFloat::canonical(false, BigUint::one(), -1), Ctx::new(top as u32 + 16)).floor();
        let k_int = k.to_q().to_integer();
        let r = self.sub(&half_pi.mul(&k, wide), wide).round_to(Ctx::new(w + 8));
        let inner = Ctx::new(w + 8);
        let r2 = r.mul(&r, inner);
        // sin
        let mut s_sum = r.clone();
        let mut term = r.clone();
        let mut i = 1i64;
        loop {
            term = term.mul(&r2, inner).div(&Self::from_i64((2 * i) * (2 * i + 1)), inner)?.neg();
            if term.is_zero() || term.top() < s_sum.top().max(-(w as i64)) - (w as i64 + 8) {
                break;
            }
            s_sum = s_sum.add(&term, inner);
            i += 1;
        }
        let mut c_sum = Self::one();
        let mut term = Self::one();
        let mut i = 1i64;
        loop {
            term = term.mul(&r2, inner).div(&Self::from_i64((2 * i - 1) * (2 * i)), inner)?.neg();
            if term.is_zero() || term.top() < c_sum.top() - (w as i64 + 8) {
                break;
            }
            c_sum = c_sum.add(&term, inner);
            i += 1;
        }
        let quadrant = k_int.mod_floor(&BigInt::from(4)).to_u8().unwrap_or(0);
        let (s, c) = match quadrant {
            0 => (s_sum, c_sum),
            1 => (c_sum, s_sum.neg()),
            2 => (s_sum.neg(), c_sum.neg()),
            _ => (c_sum.neg(), s_sum),
        };
        Ok((widen_abs(&s, ctx), widen_abs(&c, ctx)))
    }

    pub fn sin(&self, ctx: Ctx) -> Result<Self, FloatError> {
        Ok(self.sin_cos(ctx)?.0)
    }

    pub fn cos(&self, ctx: Ctx) -> Result<Self, FloatError> {
        Ok(self.sin_cos(ctx)?.1)
    }

    /// Integer power with directed rounding respected for every sign case.
    pub fn powi(&self, n: &BigInt, ctx: Ctx) -> Result<Self, FloatError> {
        if n.is_zero() {
            return Ok(Self::one());
        }
        if self.is_zero() {
            return if n.is_negative() { Err(FloatError::DivByZero) } else { Ok(Self::zero()) };
        }
        let odd = n.is_odd();
        let result_neg = self.neg && odd;
        // round magnitude toward the direction that matches the signed request
        let mag_round = if result_neg { ctx.round.flip() } else { ctx.round };
        let base = self.abs();
        let mag = if n.is_negative() {
            let p = pow_abs(&base, n.magnitude(), ctx.with_round(mag_round.flip()).with_prec(ctx.prec + 8));
            Self::one().div(&p, ctx.with_round(mag_round))?
        } else {
            pow_abs(&base, n.magnitude(), ctx.with_round(mag_round))
        };
        Ok(if result_neg { mag.neg() } else { mag })
    }

    /// Rational power. Negative bases need an odd denominator.
    pub fn pow_q(&self, q: &Q, ctx: Ctx) -> Result<Self, FloatError> {
        if q.is_integer() {
            return self.powi(q.numer(), ctx);
        }
        if self.is_zero() {
            return if q.is_negative() { Err(FloatError::DivByZero) } else { Ok(Self::zero()) };
        }
        if self.neg {
            if q.denom().is_even() {
                return Err(FloatError::Domain);
            }
            let mag = self.abs().pow_q(q, ctx.with_round(if q.numer().is_odd() { ctx.round.flip() } else { ctx.round }))?;
            return Ok(if q.numer().is_odd() { mag.neg() } else { mag });
        }
        let w = ctx.prec + GUARD;
        let inner = Ctx::new(w + 64);
        let l = self.ln(inner)?;
        let qf = Self::from_q(q, inner);
        let arg = l.mul(&qf, inner);
        let approx = arg.exp(Ctx::new(w))?;
        Ok(widen_rel(&approx, ctx))
    }

    /// General power `self^y` for positive bases.
    pub fn pow(&self, y: &Self, ctx: Ctx) -> Result<Self, FloatError> {
        if y.is_integer() && y.top() < 62 {
            return self.powi(&y.to_q().to_integer(), ctx);
        }
        if self.is_zero() {
            return if y.is_negative() { Err(FloatError::DivByZero) } else { Ok(Self::zero()) };
        }
        if self.neg {
            return Err(FloatError::Domain);
        }
        let w = ctx.prec + GUARD;
        let inner = Ctx::new(w + 64);
        let arg = self.ln(inner)?.mul(y, inner);
        let approx = arg.exp(Ctx::new(w))?;
        Ok(widen_rel(&approx, ctx))
    }

    pub fn min<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self.cmp_total(other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn max<'a>(&'a self, other: &'a Self) -> &'a Self {
        if self.cmp_total(other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    /// Scientific notation with `digits` significant digits, e.g. `1.9700711140170469e434`.
    pub fn to_sci_string(&self, digits: u32) -> String {
        use core::fmt::Write;
        let digits = digits.max(1);
        if self.is_zero() {
            return String::from("0");
        }
        let prec = bits_for_digits(digits) + 64;
        let ctx = Ctx::new(prec);
        let l10 = self.ln_abs_f64() / core::f64::consts::LN_10;
        let mut e10 = libm::floor(l10) as i64;
        let mut out = String::new();
        for _ in 0..3 {
            let scaled = match scale_pow10(&self.abs(), digits as i64 - 1 - e10, ctx) {
                Ok(v) => v,
                Err(_) => break,
            };
            let r = scaled.add(&BigFloat::canonical(false, BigUint::one(), -1), ctx).floor();
            let int = r.to_q().to_integer();
            let s = int.to_str_radix(10);
            if s.len() as u32 > digits {
                e10 += 1;
                continue;
            }
            if (s.len() as u32) < digits {
                e10 -= 1;
                continue;
            }
            if self.neg {
                out.push('-');
            }
            out.push_str(&s[..1]);
            if s.len() > 1 {
                out.push('.');
                out.push_str(&s[1..]);
            }
            let _ = write!(out, "e{}", e10);
            return out;
        }
        let _ = write!(out, "{:e}", self.to_f64());
        out
    }

    /// Parses decimal scientific notation such as `-1.25e-3` exactly, then rounds.
    pub fn parse_decimal(s: &str, ctx: Ctx) -> Option<Self> {
        let s = s.trim();
        let (mant, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
            None => (s, 0),
        };
        let neg = mant.starts_with('-');
        let mant = mant.trim_start_matches(['-', '+']);
        let (ip, fp) = match mant.find('.') {
            Some(i) => (&mant[..i], &mant[i + 1..]),
            None => (mant, ""),
        };
        let mut digits = String::from(ip);
        digits.push_str(fp);
        let int = BigInt::parse_bytes(digits.as_bytes(), 10)?;
        let e10 = exp - fp.len() as i64;
        let ten = BigInt::from(10);
        let q = if e10 >= 0 {
            Q::from_integer(int * num_traits::pow(ten, e10 as usize))
        } else {
            Q::new(int, num_traits::pow(ten, (-e10) as usize))
        };
        let v = Self::from_q(&q, ctx);
        Some(if neg { v.neg() } else { v })
    }
}

fn scale_pow10(x: &BigFloat, k: i64, ctx: Ctx) -> Result<BigFloat, FloatError> {
    if k.unsigned_abs() <= 4000 {
        let p = BigFloat::from_bigint(&num_traits::pow(BigInt::from(10), k.unsigned_abs() as usize));
        return if k >= 0 { Ok(x.mul(&p, ctx)) } else { x.div(&p, ctx) };
    }
    let kbits = 64 - k.unsigned_abs().leading_zeros();
    let wide = Ctx::new(ctx.prec + kbits + 16);
    let arg = BigFloat::ln10(wide)?.mul(&BigFloat::from_i64(k), wide);
    let f = arg.exp(wide)?;
    Ok(x.mul(&f, ctx))
}

fn pow_abs(base: &BigFloat, n: &BigUint, ctx: Ctx) -> BigFloat {
    let mut result = BigFloat::one();
    let nbits = n.bits();
    for i in (0..nbits).rev() {
        result = result.mul(&result, ctx);
        if n.bit(i) {
            result = result.mul(base, ctx);
        }
    }
    result
}

fn constant(hex: &str, frac_bits: i64, ctx: Ctx) -> Result<BigFloat, FloatError> {
    if ctx.prec > MAX_PREC + 64 {
        return Err(FloatError::Precision);
    }
    let m = BigUint::parse_bytes(hex.as_bytes(), 16).expect("valid constant");
    // the stored digits are truncated, so the true value lies slightly above
    Ok(finish(false, m, -frac_bits, true, ctx))
}

/// Enlarges a guard-bit approximation by a relative `2^-(prec+16)` before directed rounding.
fn widen_rel(approx: &BigFloat, ctx: Ctx) -> BigFloat {
    match ctx.round {
        Round::Nearest => approx.round_to(ctx),
        dir => {
            if approx.is_zero() {
                return approx.clone();
            }
            let slack = approx.abs().mul_pow2(-(ctx.prec as i64 + 16));
            let wide = Ctx::new(approx.mant_bits() as u32 + ctx.prec + 40).with_round(dir);
            let moved = if dir == Round::Up { approx.add(&slack, wide) } else { approx.sub(&slack, wide) };
            moved.round_to(ctx)
        }
    }
}

fn widen_abs(approx: &BigFloat, ctx: Ctx) -> BigFloat {
    match ctx.round {
        Round::Nearest => approx.round_to(ctx),
        dir => {
            let slack = BigFloat::canonical(false, BigUint::one(), -(ctx.prec as i64 + 16));
            let wide = Ctx::new(ctx.prec + 64).with_round(dir);
            let moved = if dir == Round::Up { approx.add(&slack, wide) } else { approx.sub(&slack, wide) };
            moved.round_to(ctx)
        }
    }
}

fn add_signed(a: &BigFloat, b: &BigFloat, negate_b: bool, ctx: Ctx) -> BigFloat {
    let b_neg = b.neg ^ negate_b;
    if b.is_zero() {
        return a.round_to(ctx);
    }
    if a.is_zero() {
        return finish(b_neg, b.mant.clone(), b.exp, false, ctx);
    }
    // one operand lies entirely below the other's last bit
    if b.top() <= a.exp - far_pad(&a.mant, ctx) {
        return far_sum(a.neg, &a.mant, a.exp, a.neg != b_neg, ctx);
    }
    if a.top() <= b.exp - far_pad(&b.mant, ctx) {
        return far_sum(b_neg, &b.mant, b.exp, a.neg != b_neg, ctx);
    }
    let e = a.exp.min(b.exp);
    let ma = &a.mant << (a.exp - e) as u64;
    let mb = &b.mant << (b.exp - e) as u64;
    if a.neg == b_neg {
        finish(a.neg, ma + mb, e, false, ctx)
    } else {
        match ma.cmp(&mb) {
            Ordering::Equal => BigFloat::zero(),
            Ordering::Greater => finish(a.neg, ma - mb, e, false, ctx),
            Ordering::Less => finish(b_neg, mb - ma, e, false, ctx),
        }
    }
}

fn far_pad(mant: &BigUint, ctx: Ctx) -> i64 {
    (ctx.prec as i64 + 4 - mant.bits() as i64).max(0) + 2
}

// the other operand is nonzero and smaller than one unit of the padded mantissa
fn far_sum(neg: bool, mant: &BigUint, exp: i64, subtract: bool, ctx: Ctx) -> BigFloat {
    let pad = far_pad(mant, ctx);
    let m = mant << pad as u64;
    let m = if subtract { m - BigUint::one() } else { m };
    finish(neg, m, exp - pad, true, ctx)
}

/// Rounds `(-1)^neg * mant * 2^exp` (plus a nonzero remainder below the last
/// bit when `sticky`) to `ctx.prec` bits.
fn finish(neg: bool, mant: BigUint, exp: i64, sticky: bool, ctx: Ctx) -> BigFloat {
    if mant.is_zero() {
        return BigFloat::zero();
    }
    let p = ctx.prec.max(2) as u64;
    let (mut mant, mut exp) = (mant, exp);
    if sticky && mant.bits() < p + 2 {
        let pad = p + 2 - mant.bits();
        mant <<= pad;
        exp -= pad as i64;
    }
    let bits = mant.bits();
    if bits <= p && !sticky {
        return BigFloat::canonical(neg, mant, exp);
    }
    let shift = bits.saturating_sub(p);
    let (mut kept, up) = if shift == 0 {
        let up = match ctx.round {
            Round::Nearest => false,
            Round::Down => neg,
            Round::Up => !neg,
        };
        (mant, up)
    } else {
        let mask = (BigUint::one() << shift) - BigUint::one();
        let tail = &mant & &mask;
        let kept = mant >> shift;
        let inexact = sticky || !tail.is_zero();
        let up = match ctx.round {
            Round::Nearest => {
                let half = BigUint::one() << (shift - 1);
                match tail.cmp(&half) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => sticky || kept.bit(0),
                }
            }
            Round::Down => neg && inexact,
            Round::Up => !neg && inexact,
        };
        exp += shift as i64;
        (kept, up)
    };
    if up {
        kept += BigUint::one();
    }
    BigFloat::canonical(neg, kept, exp)
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_total(other) == Ordering::Equal
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({})", self.to_sci_string(20))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci_string(17))
    }
}

/// Closed interval with outward-rounded endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: BigFloat,
    pub hi: BigFloat,
}

impl Interval {
    pub fn point(v: BigFloat) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn from_q(q: &Q, prec: u32) -> Self {
        let c = Ctx::new(prec);
        Interval {
            lo: BigFloat::from_q(q, c.with_round(Round::Down)),
            hi: BigFloat::from_q(q, c.with_round(Round::Up)),
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `Some(Less)` when every point of `self` is below every point of `other`.
    pub fn certainly_cmp(&self, other: &Interval) -> Option<Ordering> {
        if self.hi.cmp_total(&other.lo) == Ordering::Less {
            Some(Ordering::Less)
        } else if self.lo.cmp_total(&other.hi) == Ordering::Greater {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(&other.lo).clone(), hi: self.hi.max(&other.hi).clone() }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn add(&self, o: &Interval, prec: u32) -> Interval {
        let c = Ctx::new(prec);
        Interval { lo: self.lo.add(&o.lo, c.with_round(Round::Down)), hi: self.hi.add(&o.hi, c.with_round(Round::Up)) }
    }

    pub fn sub(&self, o: &Interval, prec: u32) -> Interval {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Interval, prec: u32) -> Interval {
        let c = Ctx::new(prec);
        let cands = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let lows: Vec<BigFloat> = cands.iter().map(|(a, b)| a.mul(b, c.with_round(Round::Down))).collect();
        let highs: Vec<BigFloat> = cands.iter().map(|(a, b)| a.mul(b, c.with_round(Round::Up))).collect();
        Interval { lo: min_of(&lows), hi: max_of(&highs) }
    }

    pub fn recip(&self, prec: u32) -> Result<Interval, FloatError> {
        if self.contains_zero() {
            return Err(FloatError::DivByZero);
        }
        let c = Ctx::new(prec);
        let one = BigFloat::one();
        Ok(Interval { lo: one.div(&self.hi, c.with_round(Round::Down))?, hi: one.div(&self.lo, c.with_round(Round::Up))? })
    }

    pub fn div(&self, o: &Interval, prec: u32) -> Result<Interval, FloatError> {
        Ok(self.mul(&o.recip(prec + 8)?, prec))
    }

    pub fn exp(&self, prec: u32) -> Result<Interval, FloatError> {
        let c = Ctx::new(prec);
        Ok(Interval { lo: self.lo.exp(c.with_round(Round::Down))?, hi: self.hi.exp(c.with_round(Round::Up))? })
    }

    pub fn ln(&self, prec: u32) -> Result<Interval, FloatError> {
        if !self.lo.is_positive() {
            return Err(FloatError::Domain);
        }
        let c = Ctx::new(prec);
        Ok(Interval { lo: self.lo.ln(c.with_round(Round::Down))?, hi: self.hi.ln(c.with_round(Round::Up))? })
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let m = self.lo.abs();
            let hi = m.max(&self.hi).clone();
            Interval { lo: BigFloat::zero(), hi }
        }
    }

    pub fn floor(&self) -> Interval {
        Interval { lo: self.lo.floor(), hi: self.hi.floor() }
    }

    pub fn powi(&self, n: &BigInt, prec: u32) -> Result<Interval, FloatError> {
        let c = Ctx::new(prec);
        if n.is_zero() {
            return Ok(Interval::point(BigFloat::one()));
        }
        if n.is_negative() {
            let pos = self.powi(&-n, prec + 8)?;
            return pos.recip(prec);
        }
        let even = n.is_even();
        if even {
            let a = self.abs();
            Ok(Interval { lo: a.lo.powi(n, c.with_round(Round::Down))?, hi: a.hi.powi(n, c.with_round(Round::Up))? })
        } else {
            Ok(Interval { lo: self.lo.powi(n, c.with_round(Round::Down))?, hi: self.hi.powi(n, c.with_round(Round::Up))? })
        }
    }

    pub fn pow_q(&self, q: &Q, prec: u32) -> Result<Interval, FloatError> {
        if q.is_integer() {
            return self.powi(q.numer(), prec);
        }
        if self.lo.is_negative() {
            return Err(FloatError::Domain);
        }
        let c = Ctx::new(prec);
        if q.is_positive() {
            Ok(Interval { lo: self.lo.pow_q(q, c.with_round(Round::Down))?, hi: self.hi.pow_q(q, c.with_round(Round::Up))? })
        } else {
            Ok(Interval { lo: self.hi.pow_q(q, c.with_round(Round::Down))?, hi: self.lo.pow_q(q, c.with_round(Round::Up))? })
        }
    }

    pub fn sin_cos(&self, prec: u32) -> Result<(Interval, Interval), FloatError> {
        // only point intervals get tight enclosures; wider inputs fall back to [-1, 1]
        let unit = Interval { lo: BigFloat::from_i64(-1), hi: BigFloat::one() };
        if self.lo != self.hi {
            return Ok((unit.clone(), unit));
        }
        let c = Ctx::new(prec);
        let (s_lo, c_lo) = self.lo.sin_cos(c.with_round(Round::Down))?;
        let (s_hi, c_hi) = self.lo.sin_cos(c.with_round(Round::Up))?;
        Ok((Interval { lo: s_lo, hi: s_hi }, Interval { lo: c_lo, hi: c_hi }))
    }

    pub fn min(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.min(&o.lo).clone(), hi: self.hi.min(&o.hi).clone() }
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.max(&o.lo).clone(), hi: self.hi.max(&o.hi).clone() }
    }
}

fn min_of(v: &[BigFloat]) -> BigFloat {
    v.iter().fold(v[0].clone(), |acc, x| acc.min(x).clone())
}

fn max_of(v: &[BigFloat]) -> BigFloat {
    v.iter().fold(v[0].clone(), |acc, x| acc.max(x).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn c(bits: u32) -> Ctx {
        Ctx::new(bits)
    }

    fn rel_err(a: &BigFloat, b: &BigFloat) -> f64 {
        let d = a.sub(b, c(400));
        if d.is_zero() {
            return 0.0;
        }
        (d.ln_abs_f64() - b.ln_abs_f64()).exp()
    }

    // Reference values below were produced with mpmath at 80 digits.
    const E_1000: &str = "1.9700711140170469938888793522433231253169379853238457899528029913850638507824411934749780765630268899e434";
    const E_10: &str = "22026.465794806716516957900645284244366353512618556781074235426";
    const LN_3: &str = "1.098612288668109691395245236922525704647490557822749451734694333637494293218609";
    const SIN_1E12: &str = "-0.61123870237688949819202041532463056649624170559341590319397035010399468026520796";
    const COS_1E12: &str = "0.79144630185289027005376621411433230398676030743718665943909867712240495472166286";
    const EXP_1E12_LOG10: f64 = 434294481903.25183;

    #[test]
    fn exp_1000_matches_reference_at_50_digits() {
        let ctx = Ctx::from_digits(50);
        let v = BigFloat::from_i64(1000).exp(ctx).unwrap();
        let r = BigFloat::parse_decimal(E_1000, c(400)).unwrap();
        assert!(rel_err(&v, &r) < 1e-49, "{} vs {}", v.to_sci_string(55), r.to_sci_string(55));
    }

    #[test]
    fn exp_ln_sin_cos_reference_values() {
        let ctx = Ctx::from_digits(50);
        let e10 = BigFloat::from_i64(10).exp(ctx).unwrap();
        assert!(rel_err(&e10, &BigFloat::parse_decimal(E_10, c(400)).unwrap()) < 1e-49);
        let l3 = BigFloat::from_i64(3).ln(ctx).unwrap();
        assert!(rel_err(&l3, &BigFloat::parse_decimal(LN_3, c(400)).unwrap()) < 1e-49);
        let x = BigFloat::from_i64(1_000_000_000_000);
        let (s, co) = x.sin_cos(ctx).unwrap();
        assert!(rel_err(&s, &BigFloat::parse_decimal(SIN_1E12, c(400)).unwrap()) < 1e-45);
        assert!(rel_err(&co, &BigFloat::parse_decimal(COS_1E12, c(400)).unwrap()) < 1e-45);
    }

    #[test]
    fn exp_of_huge_argument_keeps_exponent() {
        let ctx = Ctx::from_digits(20);
        let v = BigFloat::from_i64(1_000_000_000_000).exp(ctx).unwrap();
        let log10 = v.ln_abs_f64() / core::f64::consts::LN_10;
        assert!((log10 - EXP_1E12_LOG10).abs() < 1e-3);
        let back = v.ln(ctx).unwrap();
        assert!((back.to_f64() - 1e12).abs() < 1e-3);
    }

    #[test]
    fn directed_rounding_brackets_nearest() {
        for digits in [10u32, 30, 50] {
            let ctx = Ctx::from_digits(digits);
            for v in [1i64, 7, 100, -3] {
                let x = BigFloat::from_i64(v);
                let n = x.exp(ctx).unwrap();
                let lo = x.exp(ctx.with_round(Round::Down)).unwrap();
                let hi = x.exp(ctx.with_round(Round::Up)).unwrap();
                assert!(lo.cmp_total(&n) != Ordering::Greater);
                assert!(hi.cmp_total(&n) != Ordering::Less);
                assert!(lo.cmp_total(&hi) == Ordering::Less);
            }
        }
        let third = Q::new(1.into(), 3.into());
        let lo = BigFloat::from_q(&third, c(64).with_round(Round::Down));
        let hi = BigFloat::from_q(&third, c(64).with_round(Round::Up));
        assert!(lo.to_q() < third && third < hi.to_q());
    }

    #[test]
    fn addition_with_far_apart_operands_respects_direction() {
        let big = BigFloat::from_i64(1);
        let tiny = BigFloat::one().mul_pow2(-10_000);
        let up = big.add(&tiny, c(64).with_round(Round::Up));
        let down = big.add(&tiny, c(64).with_round(Round::Down));
        assert!(up.cmp_total(&big) == Ordering::Greater);
        assert!(down == big);
        let down2 = big.sub(&tiny, c(64).with_round(Round::Down));
        assert!(down2.cmp_total(&big) == Ordering::Less);
        assert!(big.sub(&tiny, c(64)) == big);
    }

    #[test]
    fn floor_and_rationals() {
        let v = BigFloat::from_q(&Q::new((-7).into(), 2.into()), c(64));
        assert_eq!(v.floor().to_f64(), -4.0);
        assert_eq!(BigFloat::from_f64(2.75).unwrap().floor().to_f64(), 2.0);
        assert_eq!(BigFloat::from_i64(5).to_sci_string(3), "5.00e0");
        assert_eq!(BigFloat::from_f64(0.25).unwrap().to_string(), "2.5000000000000000e-1");
    }

    #[test]
    fn rational_powers() {
        let ctx = Ctx::from_digits(30);
        let v = BigFloat::from_i64(8).pow_q(&Q::new(1.into(), 3.into()), ctx).unwrap();
        assert!(rel_err(&v, &BigFloat::from_i64(2)) < 1e-29);
        let v = BigFloat::from_i64(-8).pow_q(&Q::new(2.into(), 3.into()), ctx).unwrap();
        assert!(rel_err(&v, &BigFloat::from_i64(4)) < 1e-29);
        assert!(BigFloat::from_i64(-8).pow_q(&Q::new(1.into(), 2.into()), ctx).is_err());
    }
}
