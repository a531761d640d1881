//! Arbitrary-precision real numbers and the numeric context they live in.
//!
//! Every quantity in this crate is a [`Real`] evaluated under a [`Ctx`] that
//! fixes the working mantissa size, the equality tolerance and the default
//! orbit horizon. Identical context and inputs give identical digit strings
//! on serialization.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, WORD_BIT_SIZE};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("constants cache allocation"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Numeric context: working precision, equality tolerance, default horizon.
#[derive(Clone, Debug)]
pub struct Ctx {
    precision_bits: usize,
    eq_tol: Real,
    horizon_default: usize,
}

impl Ctx {
    /// Context with `precision_bits` of mantissa, the default tolerance
    /// `2^-(precision_bits/2)` and a default horizon of 1000 iterates.
    pub fn new(precision_bits: usize) -> Result<Self> {
        Self::with_params(precision_bits, -((precision_bits / 2) as i32), 1000)
    }

    /// Context with an explicit tolerance `2^tol_exp` and orbit horizon.
    pub fn with_params(
        precision_bits: usize,
        tol_exp: i32,
        horizon_default: usize,
    ) -> Result<Self> {
        if precision_bits < 64 {
            return Err(Error::Domain(format!(
                "precision_bits must be >= 64, got {precision_bits}"
            )));
        }
        // tolerance may never be finer than arithmetic noise
        if (tol_exp as i64) < -(precision_bits as i64) + 16 {
            return Err(Error::Domain(format!(
                "eq_tolerance 2^{tol_exp} finer than noise floor 2^{}",
                -(precision_bits as i64) + 16
            )));
        }
        if horizon_default == 0 {
            return Err(Error::Domain("horizon_default must be positive".into()));
        }
        let eq_tol = Real(pow2(tol_exp, precision_bits));
        Ok(Ctx {
            precision_bits,
            eq_tol,
            horizon_default,
        })
    }

    pub fn precision_bits(&self) -> usize {
        self.precision_bits
    }

    pub fn eq_tol(&self) -> &Real {
        &self.eq_tol
    }

    pub fn horizon_default(&self) -> usize {
        self.horizon_default
    }

    /// Significant decimal digits representable at this precision.
    pub fn decimal_digits(&self) -> usize {
        // ceil(bits * log10(2)) + 1
        (self.precision_bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
    }
}

fn pow2(exp: i32, p: usize) -> BigFloat {
    let mut one = BigFloat::from_f64(1.0, p);
    // 1.0 is stored as 0.5 * 2^1
    one.set_exponent(1 + exp);
    one
}

/// An arbitrary-precision real value. Construction and arithmetic go through
/// a [`Ctx`]; NaN and infinities are never produced by in-range operations.
#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    pub fn zero(ctx: &Ctx) -> Self {
        Real(BigFloat::from_f64(0.0, ctx.precision_bits))
    }

    pub fn one(ctx: &Ctx) -> Self {
        Real(BigFloat::from_f64(1.0, ctx.precision_bits))
    }

    pub fn from_f64(v: f64, ctx: &Ctx) -> Self {
        debug_assert!(v.is_finite());
        Real(BigFloat::from_f64(v, ctx.precision_bits))
    }

    pub fn from_u64(v: u64, ctx: &Ctx) -> Self {
        Real(BigFloat::from_u64(v, ctx.precision_bits))
    }

    /// `2^exp` at context precision.
    pub fn pow2(exp: i32, ctx: &Ctx) -> Self {
        Real(pow2(exp, ctx.precision_bits))
    }

    /// Parse a decimal string ("0.975", "1e-8", ...) at context precision.
    pub fn parse(s: &str, ctx: &Ctx) -> Result<Self> {
        let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, ctx.precision_bits, RM, cc));
        if v.is_nan() {
            return Err(Error::Domain(format!("cannot parse number {s:?}")));
        }
        Ok(Real(v))
    }

    pub fn add(&self, o: &Real, ctx: &Ctx) -> Real {
        Real(self.0.add(&o.0, ctx.precision_bits, RM))
    }

    pub fn sub(&self, o: &Real, ctx: &Ctx) -> Real {
        Real(self.0.sub(&o.0, ctx.precision_bits, RM))
    }

    pub fn mul(&self, o: &Real, ctx: &Ctx) -> Real {
        Real(self.0.mul(&o.0, ctx.precision_bits, RM))
    }

    pub fn div(&self, o: &Real, ctx: &Ctx) -> Real {
        Real(self.0.div(&o.0, ctx.precision_bits, RM))
    }

    pub fn neg(&self) -> Real {
        Real(self.0.neg())
    }

    pub fn abs(&self) -> Real {
        Real(self.0.abs())
    }

    pub fn sqrt(&self, ctx: &Ctx) -> Real {
        Real(self.0.sqrt(ctx.precision_bits, RM))
    }

    /// Integer power by binary exponentiation.
    pub fn powi(&self, n: u64, ctx: &Ctx) -> Real {
        let mut acc = Real::one(ctx);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, ctx);
            }
            base = base.mul(&base, ctx);
            k >>= 1;
        }
        acc
    }

    /// Real power `self^e` for `self >= 0`.
    pub fn pow(&self, e: &Real, ctx: &Ctx) -> Real {
        Real(with_consts(|cc| self.0.pow(&e.0, ctx.precision_bits, RM, cc)))
    }

    pub fn sin(&self, ctx: &Ctx) -> Real {
        Real(with_consts(|cc| self.0.sin(ctx.precision_bits, RM, cc)))
    }

    pub fn pi(ctx: &Ctx) -> Real {
        Real(with_consts(|cc| cc.pi(ctx.precision_bits, RM)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive() && !self.0.is_zero()
    }

    /// Sign as -1, 0 or 1.
    pub fn signum_i(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.is_negative() {
            -1
        } else {
            1
        }
    }

    /// `|self - o| <= tol`.
    pub fn close_to(&self, o: &Real, tol: &Real, ctx: &Ctx) -> bool {
        self.sub(o, ctx).abs() <= *tol
    }

    /// Nearest f64, rounding toward zero. Values with huge exponents saturate.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        let Some((words, _n, sign, exp, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        let w = WORD_BIT_SIZE as i32;
        let len = words.len() as i32;
        let mut v = 0.0f64;
        // top three words carry more than an f64 mantissa
        for (i, &word) in words.iter().enumerate().rev().take(3) {
            let sh = exp - (len - i as i32) * w;
            v += (word as f64) * (2.0f64).powi(sh);
        }
        if sign.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Canonical decimal form, enough digits to round-trip at context precision.
    pub fn to_decimal(&self, _ctx: &Ctx) -> String {
        if self.0.is_zero() {
            return "0.0".into();
        }
        with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
    }

    /// Binary exponent of the value (`value = 0.m * 2^exp`), or None for zero.
    pub fn exponent(&self) -> Option<i32> {
        if self.0.is_zero() {
            None
        } else {
            self.0.exponent()
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).expect("NaN in comparison")
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_f64())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            return write!(f, "0.0");
        }
        let s = with_consts(|cc| self.0.format(Radix::Dec, RM, cc))
            .unwrap_or_else(|_| "NaN".into());
        write!(f, "{s}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_validation() {
        assert!(Ctx::new(256).is_ok());
        assert!(Ctx::new(32).is_err());
        // tolerance finer than noise floor rejected
        assert!(Ctx::with_params(64, -60, 100).is_err());
        assert!(Ctx::with_params(64, -40, 100).is_ok());
    }

    #[test]
    fn arithmetic_round_trip() {
        let ctx = Ctx::new(256).unwrap();
        let a = Real::parse("0.975", &ctx).unwrap();
        let s = a.to_decimal(&ctx);
        let b = Real::parse(&s, &ctx).unwrap();
        assert_eq!(a, b, "decimal serialization must round-trip");
        assert!((a.to_f64() - 0.975).abs() < 1e-15);
    }

    #[test]
    fn pow2_and_tolerance() {
        let ctx = Ctx::new(256).unwrap();
        let t = Real::pow2(-128, &ctx);
        assert_eq!(t.to_f64(), (2.0f64).powi(-128));
        assert_eq!(ctx.eq_tol().to_f64(), (2.0f64).powi(-128));
    }

    #[test]
    fn to_f64_negative_and_small() {
        let ctx = Ctx::new(192).unwrap();
        let x = Real::from_f64(-0.4, &ctx);
        assert_eq!(x.to_f64(), -0.4);
        let y = Real::parse("1e-40", &ctx).unwrap();
        assert!((y.to_f64() - 1e-40).abs() < 1e-52);
    }

    #[test]
    fn powi_matches_repeated_mul() {
        let ctx = Ctx::new(128).unwrap();
        let x = Real::parse("0.3", &ctx).unwrap();
        let cube = x.mul(&x, &ctx).mul(&x, &ctx);
        assert_eq!(x.powi(3, &ctx), cube);
        assert_eq!(x.powi(0, &ctx), Real::one(&ctx));
    }

    #[test]
    fn sin_and_pi() {
        let ctx = Ctx::new(256).unwrap();
        let pi = Real::pi(&ctx);
        let six = Real::from_u64(6, &ctx);
        let s = pi.div(&six, &ctx).sin(&ctx);
        let half = Real::parse("0.5", &ctx).unwrap();
        let err = s.sub(&half, &ctx).abs();
        assert!(err <= Real::pow2(-250, &ctx), "sin(pi/6) = 1/2, err {err:?}");
    }
}
