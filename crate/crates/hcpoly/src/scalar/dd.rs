//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! with `|lo| <= ulp(hi)/2`, about 106 significant bits.
//!
//! Products use Dekker's splitting rather than a fused multiply-add so the
//! code stays fast on targets without hardware FMA.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Num, One, Zero};

use super::{BigFloat, F128};

#[derive(Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134217729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };

    /// Relative rounding error per operation is below `2^-UNIT_BITS`.
    pub const UNIT_BITS: u32 = 100;

    pub fn from_f64(x: f64) -> DoubleDouble {
        assert!(x.is_finite(), "non-finite f64 {x}");
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn parts(self) -> (f64, f64) {
        (self.hi, self.lo)
    }

    pub fn to_f64(self) -> f64 {
        self.hi
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    pub fn abs(self) -> DoubleDouble {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_pow2(self, k: i32) -> DoubleDouble {
        let s = super::quad::ldexp(1.0, k);
        if s.is_finite() && s != 0.0 {
            DoubleDouble { hi: self.hi * s, lo: self.lo * s }
        } else {
            DoubleDouble { hi: super::quad::ldexp(self.hi, k), lo: super::quad::ldexp(self.lo, k) }
        }
    }

    /// `floor(log2|x|)` for nonzero `x`.
    pub fn ilog2(self) -> i64 {
        let h = self.hi.abs();
        let e = <f64 as super::Real>::ilog2(&h);
        // hi an exact power of two and lo pulling toward zero
        let pow2 = h == super::quad::ldexp(1.0, e as i32);
        if pow2 && self.lo != 0.0 && (self.lo < 0.0) != (self.hi < 0.0) {
            e - 1
        } else {
            e
        }
    }

    pub fn sqrt(self) -> DoubleDouble {
        assert!(self.hi >= 0.0, "sqrt of negative DoubleDouble");
        if self.hi == 0.0 {
            return self;
        }
        let s = self.hi.sqrt();
        let (p, e) = two_prod(s, s);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * s);
        let (hi, lo) = fast_two_sum(s, r);
        DoubleDouble { hi, lo }
    }

    pub fn trunc(self) -> DoubleDouble {
        let h = self.hi.trunc();
        if h != self.hi {
            return DoubleDouble { hi: h, lo: 0.0 };
        }
        let (hi, lo) = fast_two_sum(h, self.lo.trunc());
        DoubleDouble { hi, lo }
    }

    pub fn from_big(x: &BigFloat) -> DoubleDouble {
        let hi = x.to_f64();
        if hi == 0.0 || !hi.is_finite() {
            return DoubleDouble { hi, lo: 0.0 };
        }
        let rest = x.with_precision(x.precision().max(128) + 64) - BigFloat::from_f64(hi, 64);
        let (hi, lo) = fast_two_sum(hi, rest.to_f64());
        DoubleDouble { hi, lo }
    }

    pub fn from_quad(q: F128) -> DoubleDouble {
        let hi = q.to_f64();
        // q − hi is exact in F128: both share q's leading bits
        let lo = (q - F128::from_f64(hi)).to_f64();
        let (hi, lo) = fast_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub fn to_big(self) -> BigFloat {
        // |lo| <= ulp(hi)/2, so 128 bits hold the sum exactly
        BigFloat::from_f64(self.hi, 128) + BigFloat::from_f64(self.lo, 128)
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;
    #[inline]
    fn add(self, o: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = fast_two_sum(s, e + t);
        let (hi, lo) = fast_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = DoubleDouble;
    #[inline]
    fn sub(self, o: DoubleDouble) -> DoubleDouble {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = DoubleDouble;
    #[inline]
    fn mul(self, o: DoubleDouble) -> DoubleDouble {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = fast_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = DoubleDouble;
    fn div(self, o: DoubleDouble) -> DoubleDouble {
        assert!(o.hi != 0.0, "DoubleDouble division by zero");
        let q1 = self.hi / o.hi;
        let r = self - o * DoubleDouble::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DoubleDouble::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = fast_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = DoubleDouble;
    fn rem(self, o: DoubleDouble) -> DoubleDouble {
        self - (self / o).trunc() * o
    }
}

impl Neg for DoubleDouble {
    type Output = DoubleDouble;
    #[inline]
    fn neg(self) -> DoubleDouble {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

macro_rules! assign_ops {
    ($($tr:ident $f:ident $op:tt),*) => {$(
        impl $tr for DoubleDouble {
            #[inline]
            fn $f(&mut self, o: DoubleDouble) { *self = *self $op o; }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl PartialEq for DoubleDouble {
    fn eq(&self, o: &DoubleDouble) -> bool {
        self.hi == o.hi && self.lo == o.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, o: &DoubleDouble) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&o.lo),
            c => Some(c),
        }
    }
}

impl Zero for DoubleDouble {
    fn zero() -> DoubleDouble {
        DoubleDouble::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> DoubleDouble {
        DoubleDouble::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<DoubleDouble, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        BigFloat::parse_decimal(s, 160).map(|b| DoubleDouble::from_big(&b))
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DD({})", self.to_big().to_decimal_string(33))
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_big().to_decimal_string(32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: DoubleDouble, b: &BigFloat, bits: i64) -> bool {
        let d = (a.to_big() - b.clone()).abs();
        num_traits::Zero::is_zero(&d) || d.ilog2() - b.ilog2() < -bits
    }

    #[test]
    fn arithmetic_against_bigfloat() {
        let x = DoubleDouble::ONE / DoubleDouble::from_f64(3.0);
        let bx = BigFloat::from_f64(1.0, 300) / BigFloat::from_f64(3.0, 300);
        assert!(close(x, &bx, 104));
        let y = x * x + DoubleDouble::from_f64(0.1);
        let by = bx.clone() * bx.clone() + BigFloat::from_f64(0.1, 300);
        assert!(close(y, &by, 103));
        let s = DoubleDouble::from_f64(2.0).sqrt();
        assert!(close(s, &BigFloat::from_f64(2.0, 300).sqrt(), 104));
    }

    #[test]
    fn cancellation_is_exact() {
        let a = DoubleDouble::from_f64(1.0) + DoubleDouble::from_f64(1e-20);
        let b = a - DoubleDouble::ONE;
        assert_eq!(b.to_f64(), 1e-20);
    }

    #[test]
    fn big_roundtrip_and_ilog2() {
        let x = DoubleDouble::ONE / DoubleDouble::from_f64(7.0);
        assert!(DoubleDouble::from_big(&x.to_big()) == x);
        assert!(DoubleDouble::from_quad(x.to_big().to_quad()) == x);
        let just_below = DoubleDouble::ONE - DoubleDouble::from_f64(1e-30);
        assert_eq!(just_below.ilog2(), -1);
        assert_eq!(DoubleDouble::from_f64(4.0).ilog2(), 2);
        assert_eq!(DoubleDouble::from_f64(7.5).trunc().to_f64(), 7.0);
    }
}
