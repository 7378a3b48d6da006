//! Arbitrary-precision binary float, a thin wrapper over `dashu_float`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};
use std::str::FromStr;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::ops::{BitTest, UnsignedAbs};
use dashu_int::IBig;
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Num, One, Zero};

use super::quad::F128;

type Inner = FBig<HalfEven, 2>;

/// Binary float whose precision travels with the value. Binary operations
/// round to the larger precision of the two operands; `zero()` and `one()`
/// are exact and adopt the precision of whatever they meet.
#[derive(Clone)]
pub struct BigFloat(Inner);

impl BigFloat {
    pub fn from_f64(x: f64, bits: u32) -> BigFloat {
        assert!(x.is_finite(), "non-finite f64 {x}");
        let v = Inner::try_from(x).expect("finite");
        BigFloat(v.with_precision(bits as usize).value())
    }

    pub fn from_i64(x: i64, bits: u32) -> BigFloat {
        BigFloat(Inner::from(x).with_precision(bits as usize).value())
    }

    /// `sig · 2^exp` rounded to `bits`.
    pub fn from_int_exp(neg: bool, sig: u128, exp: i64, bits: u32) -> BigFloat {
        let s = if neg { -IBig::from(sig) } else { IBig::from(sig) };
        BigFloat(Inner::from_parts(s, exp as isize).with_precision(bits as usize).value())
    }

    pub fn from_quad(q: F128) -> BigFloat {
        let (neg, m, e) = q.parts();
        BigFloat::from_int_exp(neg, m, e as i64, 128)
    }

    pub fn to_quad(&self) -> F128 {
        let v = self.0.clone().with_precision(126).value();
        let repr = v.repr();
        let sig = repr.significand();
        if sig.is_zero() {
            return F128::ZERO;
        }
        let neg = *sig < IBig::ZERO;
        let mag: u128 = u128::try_from(sig.clone().unsigned_abs()).expect("126-bit significand");
        F128::from_parts(neg, mag, repr.exponent() as i32)
    }

    pub fn from_rational(q: &BigRational, bits: u32) -> BigFloat {
        let n = BigFloat::from_bigint(q.numer(), bits + 8);
        let d = BigFloat::from_bigint(q.denom(), bits + 8);
        BigFloat((n.0 / d.0).with_precision(bits as usize).value())
    }

    fn from_bigint(b: &BigInt, bits: u32) -> BigFloat {
        let (sign, bytes) = b.to_bytes_le();
        let mag = dashu_int::UBig::from_le_bytes(&bytes);
        let v = if sign == Sign::Minus { -IBig::from(mag) } else { IBig::from(mag) };
        BigFloat(Inner::from(v).with_precision(bits as usize).value())
    }

    /// Exact value as a rational.
    pub fn to_rational(&self) -> BigRational {
        let (sig, exp) = self.int_exp();
        let (sign, bytes) = if sig < IBig::ZERO {
            (Sign::Minus, (-sig.clone()).unsigned_abs().to_le_bytes())
        } else {
            (Sign::Plus, sig.unsigned_abs().to_le_bytes())
        };
        let n = BigInt::from_bytes_le(sign, &bytes);
        if exp >= 0 {
            BigRational::from_integer(n << exp as usize)
        } else {
            BigRational::new(n, BigInt::one() << (-exp) as usize)
        }
    }

    /// Parse a decimal literal (`"-1.25e-3"`), rounding once to `bits`.
    pub fn parse_decimal(s: &str, bits: u32) -> Result<BigFloat, String> {
        let t = s.trim().replace('\u{2212}', "-");
        let dec = dashu_float::DBig::from_str(&t).map_err(|e| format!("invalid decimal {s:?}: {e:?}"))?;
        let bin = dec.with_rounding::<HalfEven>().with_base_and_precision::<2>(bits as usize).value();
        Ok(BigFloat(bin))
    }

    fn int_exp(&self) -> (IBig, i64) {
        let r = self.0.repr();
        (r.significand().clone(), r.exponent() as i64)
    }

    /// Exact decimal expansion of the binary value.
    pub fn to_exact_decimal(&self) -> String {
        let (sig, exp) = self.int_exp();
        exact_decimal(&sig, exp)
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        if *self.0.repr().significand() == IBig::ZERO {
            return "0".into();
        }
        let d = self.0.clone().with_base_and_precision::<10>(digits).value();
        d.to_string()
    }

    pub fn precision(&self) -> u32 {
        self.0.precision() as u32
    }

    pub fn with_precision(&self, bits: u32) -> BigFloat {
        BigFloat(self.0.clone().with_precision(bits as usize).value())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    pub fn abs(&self) -> BigFloat {
        if self.0.repr().significand() < &IBig::ZERO {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn sqrt(&self) -> BigFloat {
        if *self.0.repr().significand() == IBig::ZERO {
            return self.clone();
        }
        let v = if self.0.precision() == 0 { self.with_precision(128).0 } else { self.0.clone() };
        BigFloat(v.sqrt())
    }

    pub fn mul_pow2(&self, k: i32) -> BigFloat {
        let (sig, exp) = self.int_exp();
        let p = self.0.precision();
        let v = Inner::from_parts(sig, (exp + k as i64) as isize);
        BigFloat(if p == 0 { v } else { v.with_precision(p).value() })
    }

    /// `floor(log2|x|)` for nonzero `x`.
    pub fn ilog2(&self) -> i64 {
        let (sig, exp) = self.int_exp();
        let bits = sig.unsigned_abs().bit_len() as i64;
        exp + bits - 1
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.repr().significand() < &IBig::ZERO
    }

    pub fn trunc(&self) -> BigFloat {
        BigFloat(self.0.trunc())
    }
}

/// `sig · 2^exp` written out exactly in base ten.
pub(crate) fn exact_decimal(sig: &IBig, exp: i64) -> String {
    if *sig == IBig::ZERO {
        return "0".into();
    }
    let neg = *sig < IBig::ZERO;
    let mag = sig.clone().unsigned_abs();
    let body = if exp >= 0 {
        (mag << exp as usize).to_string()
    } else {
        // m / 2^k = m·5^k / 10^k
        let k = (-exp) as usize;
        let digits = (mag * dashu_int::UBig::from(5u8).pow(k)).to_string();
        let (int, frac) = if digits.len() > k {
            let (a, b) = digits.split_at(digits.len() - k);
            (a.to_string(), b.to_string())
        } else {
            ("0".to_string(), format!("{}{}", "0".repeat(k - digits.len()), digits))
        };
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            int
        } else {
            format!("{int}.{frac}")
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

macro_rules! bin_op {
    ($tr:ident $f:ident $atr:ident $af:ident $op:tt) => {
        impl $tr for BigFloat {
            type Output = BigFloat;
            #[inline]
            fn $f(self, o: BigFloat) -> BigFloat { BigFloat(self.0 $op o.0) }
        }
        impl<'a> $tr<&'a BigFloat> for &'a BigFloat {
            type Output = BigFloat;
            #[inline]
            fn $f(self, o: &BigFloat) -> BigFloat { BigFloat(&self.0 $op &o.0) }
        }
        impl $atr for BigFloat {
            #[inline]
            fn $af(&mut self, o: BigFloat) { self.0 = &self.0 $op &o.0; }
        }
    };
}
bin_op!(Add add AddAssign add_assign +);
bin_op!(Sub sub SubAssign sub_assign -);
bin_op!(Mul mul MulAssign mul_assign *);

impl Div for BigFloat {
    type Output = BigFloat;
    fn div(self, o: BigFloat) -> BigFloat {
        // exact / exact would be an unbounded expansion
        if self.0.precision() == 0 && o.0.precision() == 0 {
            return BigFloat(self.with_precision(128).0 / o.0);
        }
        BigFloat(self.0 / o.0)
    }
}

impl DivAssign for BigFloat {
    fn div_assign(&mut self, o: BigFloat) {
        *self = self.clone() / o;
    }
}

impl Rem for BigFloat {
    type Output = BigFloat;
    fn rem(self, o: BigFloat) -> BigFloat {
        let q = (self.clone() / o.clone()).trunc();
        self - q * o
    }
}

impl RemAssign for BigFloat {
    fn rem_assign(&mut self, o: BigFloat) {
        *self = self.clone() % o;
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(-self.0)
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, o: &BigFloat) -> bool {
        self.0.repr() == o.0.repr()
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, o: &BigFloat) -> Option<Ordering> {
        self.0.partial_cmp(&o.0)
    }
}

impl Zero for BigFloat {
    fn zero() -> BigFloat {
        BigFloat(Inner::ZERO)
    }
    fn is_zero(&self) -> bool {
        *self.0.repr().significand() == IBig::ZERO
    }
}

impl One for BigFloat {
    fn one() -> BigFloat {
        BigFloat(Inner::ONE)
    }
}

impl Num for BigFloat {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<BigFloat, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        BigFloat::parse_decimal(s, 256)
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({}, {} bits)", self.to_decimal_string(30), self.precision())
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(30))
    }
}
