//! Extended precision evaluation of candidate-set elements.
//!
//! Everything is carried as binary fixed point: an integer `m` standing for
//! `m / 2^B`. π comes from Machin's formula at the working precision; `sin` and
//! `cos` use Taylor series on the argument halved `HALVINGS` times, then the
//! double-angle identities to undo the reduction. The result is rounded to the
//! requested significant digits only when both ends of the error interval
//! round to the same string.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::coupling::{CqElement, PolygonIndex};
use crate::error::{Error, Result};

pub const MAX_DIGITS: u32 = 50;

const GUARD_BITS: u64 = 64;
const HALVINGS: u32 = 8;
/// Accumulated error of one evaluation, in units of `2^-B`, before scaling by `n₂`.
const BASE_ERROR_ULPS: u64 = 1 << 24;

/// Decimal string of the element's value, correctly rounded (half-even) to
/// `digits` significant digits.
pub fn alpha_oracle(e: CqElement, digits: u32) -> Result<String> {
    if digits == 0 || digits > MAX_DIGITS {
        return Err(Error::Precision(format!(
            "requested {digits} significant digits; supported range is 1..={MAX_DIGITS}"
        )));
    }
    let idx = e.index();
    let top = match e {
        CqElement::Pure(_) => idx,
        CqElement::Mean(_) => PolygonIndex::new(idx.n1() + 1, idx.n2())?,
    };
    let bits = working_bits(digits, top);
    let ctx = FixedPoint::new(bits);
    let pi = ctx.pi();

    let (m, err) = match e {
        CqElement::Pure(_) => ctx.alpha(&pi, idx),
        CqElement::Mean(_) => {
            let (a, ea) = ctx.alpha(&pi, idx);
            let (b, eb) = ctx.alpha(&pi, top);
            ((a + b) >> 1usize, (ea + eb) / 2 + 1)
        }
    };
    let err = BigInt::from(err);
    let lo = ctx.round_significant(&(&m - &err), digits);
    let hi = ctx.round_significant(&(&m + &err), digits);
    if lo != hi {
        return Err(Error::Precision(format!(
            "{e} cannot be certified to {digits} digits: bracket rounds to {lo} and {hi}"
        )));
    }
    Ok(lo)
}

/// π to `digits` significant digits, using the same internal constant.
pub fn pi_digits(digits: u32) -> Result<String> {
    if digits == 0 || digits > MAX_DIGITS {
        return Err(Error::Precision(format!("unsupported digit count {digits}")));
    }
    let ctx = FixedPoint::new(working_bits(digits, PolygonIndex::new(2, 1)?));
    let pi = ctx.pi();
    let err = BigInt::from(BASE_ERROR_ULPS);
    let lo = ctx.round_significant(&(&pi - &err), digits);
    let hi = ctx.round_significant(&(&pi + &err), digits);
    if lo != hi {
        return Err(Error::Precision("pi bracket straddles a rounding boundary".into()));
    }
    Ok(lo)
}

fn working_bits(digits: u32, idx: PolygonIndex) -> u64 {
    // Values can be as small as 1/(2 n1) and the n2 multiplier scales the
    // absolute error, so both get extra room on top of the +10 digit margin.
    let decimal_bits = (f64::from(digits + 10) * std::f64::consts::LOG2_10).ceil() as u64;
    let n1_bits = u64::from(32 - idx.n1().leading_zeros()) + 1;
    let n2_bits = u64::from(32 - idx.n2().leading_zeros());
    decimal_bits + n1_bits + n2_bits + GUARD_BITS
}

struct FixedPoint {
    bits: u64,
    one: BigInt,
}

impl FixedPoint {
    fn new(bits: u64) -> Self {
        Self {
            bits,
            one: BigInt::one() << bits,
        }
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }

    fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.bits).div_floor(b)
    }

    /// `atan(1/k)` by its alternating series.
    fn atan_inv(&self, k: u64) -> BigInt {
        let k = BigInt::from(k);
        let k2 = &k * &k;
        let mut power = &self.one / &k;
        let mut sum = power.clone();
        let mut n = 1u64;
        while !power.is_zero() {
            power /= &k2;
            let term = &power / BigInt::from(2 * n + 1);
            if n % 2 == 1 {
                sum -= term;
            } else {
                sum += term;
            }
            n += 1;
        }
        sum
    }

    fn pi(&self) -> BigInt {
        (self.atan_inv(5) << 4usize) - (self.atan_inv(239) << 2usize)
    }

    /// `(sin θ, cos θ)` for `0 ≤ θ ≤ π/2`.
    fn sin_cos(&self, theta: &BigInt) -> (BigInt, BigInt) {
        let reduced = theta >> HALVINGS as usize;
        let sq = self.mul(&reduced, &reduced);

        let mut sin = reduced.clone();
        let mut term = reduced;
        let mut k = 1u64;
        loop {
            term = -self.mul(&term, &sq) / BigInt::from((k + 1) * (k + 2));
            if term.is_zero() {
                break;
            }
            sin += &term;
            k += 2;
        }

        let mut cos = self.one.clone();
        let mut term = self.one.clone();
        let mut k = 0u64;
        loop {
            term = -self.mul(&term, &sq) / BigInt::from((k + 1) * (k + 2));
            if term.is_zero() {
                break;
            }
            cos += &term;
            k += 2;
        }

        for _ in 0..HALVINGS {
            let s2 = self.mul(&sin, &cos) << 1usize;
            let c2 = &self.one - (self.mul(&sin, &sin) << 1usize);
            sin = s2;
            cos = c2;
        }
        (sin, cos)
    }

    /// Fixed point `α(n₁, n₂)` and its error bound in ulps.
    fn alpha(&self, pi: &BigInt, idx: PolygonIndex) -> (BigInt, u64) {
        let n1 = BigInt::from(idx.n1());
        let n2 = BigInt::from(idx.n2());
        let theta = pi / &n1;
        let value = if idx.n2() == 1 {
            let (sin, _) = self.sin_cos(&theta);
            self.div(&sin, pi)
        } else {
            let (_, cos_theta) = self.sin_cos(&theta);
            let phi = pi / (&n1 * &n2);
            let (sin_phi, cos_phi) = self.sin_cos(&phi);
            let tan_phi = self.div(&sin_phi, &cos_phi);
            let prod = self.mul(&cos_theta, &tan_phi) * &n2;
            self.div(&prod, pi)
        };
        (value, BASE_ERROR_ULPS * (u64::from(idx.n2()) + 1))
    }

    /// Rounds the positive fixed point value `m / 2^B` to `digits` significant
    /// decimal digits, ties to even, and renders it in plain notation.
    fn round_significant(&self, m: &BigInt, digits: u32) -> String {
        assert!(m.is_positive(), "oracle values are positive");
        let ten = BigInt::from(10u32);

        // Decimal exponent k with 10^(k-1) <= v < 10^k.
        let mut k: i32 = 0;
        while self.cmp_pow10(m, k) != std::cmp::Ordering::Less {
            k += 1;
        }
        while self.cmp_pow10(m, k - 1) == std::cmp::Ordering::Less {
            k -= 1;
        }

        let shift = digits as i32 - k;
        if shift < 0 {
            return self.round_large(m, digits, k);
        }
        let scaled = m * ten.pow(shift as u32);
        let (mut q, r) = scaled.div_mod_floor(&self.one);
        let twice = r << 1usize;
        match twice.cmp(&self.one) {
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal if q.is_odd() => q += 1,
            _ => {}
        }
        if q == ten.pow(digits) {
            q = ten.pow(digits - 1);
            k += 1;
        }
        render(&q.to_string(), k)
    }

    fn round_large(&self, m: &BigInt, digits: u32, k: i32) -> String {
        let ten = BigInt::from(10u32);
        let denom = &self.one * ten.pow((k - digits as i32) as u32);
        let (mut q, r) = m.div_mod_floor(&denom);
        let twice = r << 1usize;
        match twice.cmp(&denom) {
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal if q.is_odd() => q += 1,
            _ => {}
        }
        let mut k = k;
        if q == ten.pow(digits) {
            q = ten.pow(digits - 1);
            k += 1;
        }
        render(&q.to_string(), k)
    }

    /// Compares `m / 2^B` with `10^k`.
    fn cmp_pow10(&self, m: &BigInt, k: i32) -> std::cmp::Ordering {
        let ten = BigInt::from(10u32);
        if k >= 0 {
            m.cmp(&(&self.one * ten.pow(k as u32)))
        } else {
            (m * ten.pow((-k) as u32)).cmp(&self.one)
        }
    }
}

/// Places the decimal point in the significand `q` (value `0.q × 10^k`).
fn render(q: &str, k: i32) -> String {
    if k <= 0 {
        format!("0.{}{}", "0".repeat((-k) as usize), q)
    } else if (k as usize) >= q.len() {
        format!("{}{}", q, "0".repeat(k as usize - q.len()))
    } else {
        let (int, frac) = q.split_at(k as usize);
        format!("{int}.{frac}")
    }
}
