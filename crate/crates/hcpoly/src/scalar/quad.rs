//! Fixed 126-bit binary floating point on a `u128` mantissa.
//!
//! Sits between `f64` and the heap-allocated [`BigFloat`](super::BigFloat):
//! precise enough for the working precisions that show up in practice
//! (roughly 60 to 120 bits) and an order of magnitude faster than a
//! general multi-limb float.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_traits::{Num, One, Zero};

/// Mantissa width. Normalized mantissas satisfy `2^125 <= m < 2^126`,
/// leaving two spare bits so short-distance subtraction stays exact.
const MBITS: u32 = 126;
const TOP: u128 = 1u128 << (MBITS - 1);

/// `±m · 2^e`, zero when `m == 0`.
#[derive(Clone, Copy)]
pub struct F128 {
    m: u128,
    e: i32,
    neg: bool,
}

impl F128 {
    pub const ZERO: F128 = F128 { m: 0, e: 0, neg: false };
    pub const ONE: F128 = F128 { m: TOP, e: -(MBITS as i32 - 1), neg: false };

    /// Relative rounding error per operation is below `2^-UNIT_BITS`.
    pub const UNIT_BITS: u32 = 124;

    #[inline]
    fn norm(mut m: u128, mut e: i32, neg: bool) -> F128 {
        if m == 0 {
            return F128::ZERO;
        }
        let lz = m.leading_zeros();
        let want = 128 - MBITS;
        if lz > want {
            let s = lz - want;
            m <<= s;
            e -= s as i32;
        } else if lz < want {
            let s = want - lz;
            m = shr_round(m, s);
            e += s as i32;
            if m >> MBITS != 0 {
                m >>= 1;
                e += 1;
            }
        }
        F128 { m, e, neg }
    }

    pub fn from_f64(x: f64) -> F128 {
        assert!(x.is_finite(), "non-finite f64 {x}");
        if x == 0.0 {
            return F128::ZERO;
        }
        let bits = x.to_bits();
        let neg = bits >> 63 == 1;
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 {
            (frac as u128, -1074)
        } else {
            ((frac | (1u64 << 52)) as u128, exp - 1075)
        };
        F128::norm(m, e, neg)
    }

    pub fn from_i128(x: i128) -> F128 {
        F128::norm(x.unsigned_abs(), 0, x < 0)
    }

    pub fn to_f64(self) -> f64 {
        if self.m == 0 {
            return 0.0;
        }
        // u128 -> f64 rounds to nearest, then scale by a power of two.
        let v = ldexp(self.m as f64, self.e);
        if self.neg {
            -v
        } else {
            v
        }
    }

    pub fn is_zero(self) -> bool {
        self.m == 0
    }

    pub fn is_sign_negative(self) -> bool {
        self.neg && self.m != 0
    }

    pub fn abs(self) -> F128 {
        F128 { neg: false, ..self }
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(self, k: i32) -> F128 {
        if self.m == 0 {
            self
        } else {
            F128 { e: self.e + k, ..self }
        }
    }

    /// `floor(log2|x|)` for nonzero `x`.
    pub fn ilog2(self) -> i32 {
        self.e + MBITS as i32 - 1
    }

    pub(crate) fn parts(self) -> (bool, u128, i32) {
        (self.neg, self.m, self.e)
    }

    pub(crate) fn from_parts(neg: bool, m: u128, e: i32) -> F128 {
        F128::norm(m, e, neg)
    }

    fn cmp_abs(&self, o: &F128) -> Ordering {
        match (self.m == 0, o.m == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self.e.cmp(&o.e).then(self.m.cmp(&o.m)),
        }
    }

    #[inline]
    fn add_impl(a: F128, b: F128) -> F128 {
        if a.m == 0 {
            return b;
        }
        if b.m == 0 {
            return a;
        }
        // normalized mantissas order by (exponent, mantissa)
        let (x, y) = if (a.e, a.m) < (b.e, b.m) { (b, a) } else { (a, b) };
        let diff = (x.e - y.e) as u32;
        if diff > MBITS + 1 {
            return x;
        }
        if x.neg == y.neg {
            let s = x.m + shr_round(y.m, diff);
            if s >> MBITS == 0 {
                return F128 { m: s, e: x.e, neg: x.neg };
            }
            let mut m = (s >> 1) + (s & 1);
            let mut e = x.e + 1;
            if m >> MBITS != 0 {
                m >>= 1;
                e += 1;
            }
            F128 { m, e, neg: x.neg }
        } else if diff <= 2 {
            // exact: (x.m << diff) fits in 128 bits
            let r = (x.m << diff) - y.m;
            F128::norm(r, y.e, x.neg)
        } else {
            // r >= 2^124, so at most one bit of renormalization
            let r = x.m - shr_round(y.m, diff);
            if r >> (MBITS - 1) != 0 {
                F128 { m: r, e: x.e, neg: x.neg }
            } else {
                F128 { m: r << 1, e: x.e - 1, neg: x.neg }
            }
        }
    }

    #[inline]
    fn mul_impl(a: F128, b: F128) -> F128 {
        if a.m == 0 || b.m == 0 {
            return F128::ZERO;
        }
        let (hi, lo) = mul_wide(a.m, b.m);
        // product in [2^250, 2^252)
        let s = if hi >> (251 - 128) != 0 { 126 } else { 125 };
        let mut m = (hi << (128 - s)) | (lo >> s);
        m += (lo >> (s - 1)) & 1;
        let mut e = a.e + b.e + s as i32;
        if m >> MBITS != 0 {
            // rounding carried into 2^126
            m >>= 1;
            e += 1;
        }
        F128 { m, e, neg: a.neg != b.neg }
    }

    /// Reciprocal by Newton iteration seeded from `f64`.
    fn recip(self) -> F128 {
        assert!(self.m != 0, "F128 division by zero");
        // scale into [1, 2)
        let shift = self.e + MBITS as i32 - 1;
        let b = F128 { m: self.m, e: -(MBITS as i32 - 1), neg: false };
        let one = F128::ONE;
        let mut y = F128::from_f64(1.0 / b.to_f64());
        for _ in 0..2 {
            let r = one - b * y;
            y = y + y * r;
        }
        let y = y.mul_pow2(-shift);
        if self.neg {
            -y
        } else {
            y
        }
    }

    pub fn sqrt(self) -> F128 {
        assert!(!self.is_sign_negative(), "sqrt of negative F128");
        if self.m == 0 {
            return self;
        }
        // make the exponent even so the scaling is exact
        let k = self.ilog2() & !1;
        let x = self.mul_pow2(-k);
        let mut s = F128::from_f64(x.to_f64().sqrt());
        for _ in 0..2 {
            s = (s + x / s).mul_pow2(-1);
        }
        s.mul_pow2(k / 2)
    }

    /// Round toward zero to an integer.
    pub fn trunc(self) -> F128 {
        if self.m == 0 || self.e >= 0 {
            return self;
        }
        if self.e <= -(MBITS as i32) {
            return F128::ZERO;
        }
        let drop = (-self.e) as u32;
        let m = (self.m >> drop) << drop;
        F128::norm(m, self.e, self.neg)
    }
}

#[inline]
fn shr_round(v: u128, s: u32) -> u128 {
    if s == 0 {
        v
    } else if s >= 128 {
        0
    } else {
        // v < 2^127 on every call path, so adding the half-ulp cannot overflow
        (v >> s) + ((v >> (s - 1)) & 1)
    }
}

#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a1, a0) = (a >> 64, a & u64::MAX as u128);
    let (b1, b0) = (b >> 64, b & u64::MAX as u128);
    let p00 = a0 * b0;
    let mid = a0 * b1 + a1 * b0; // < 2^127 since a1, b1 < 2^62
    let p11 = a1 * b1;
    let (lo, c) = p00.overflowing_add(mid << 64);
    let hi = p11 + (mid >> 64) + c as u128;
    (hi, lo)
}

pub(crate) fn ldexp(mut x: f64, mut e: i32) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e)
}

impl Add for F128 {
    type Output = F128;
    #[inline]
    fn add(self, o: F128) -> F128 {
        F128::add_impl(self, o)
    }
}

impl Sub for F128 {
    type Output = F128;
    #[inline]
    fn sub(self, o: F128) -> F128 {
        F128::add_impl(self, -o)
    }
}

impl Mul for F128 {
    type Output = F128;
    #[inline]
    fn mul(self, o: F128) -> F128 {
        F128::mul_impl(self, o)
    }
}

impl Div for F128 {
    type Output = F128;
    fn div(self, o: F128) -> F128 {
        if self.m == 0 {
            return F128::ZERO;
        }
        let y = o.recip();
        let q = self * y;
        // one residual correction brings the quotient to full precision
        q + (self - o * q) * y
    }
}

impl Rem for F128 {
    type Output = F128;
    fn rem(self, o: F128) -> F128 {
        self - (self / o).trunc() * o
    }
}

impl Neg for F128 {
    type Output = F128;
    #[inline]
    fn neg(self) -> F128 {
        if self.m == 0 {
            self
        } else {
            F128 { neg: !self.neg, ..self }
        }
    }
}

macro_rules! assign_ops {
    ($($tr:ident $f:ident $op:tt),*) => {$(
        impl $tr for F128 {
            #[inline]
            fn $f(&mut self, o: F128) { *self = *self $op o; }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl PartialEq for F128 {
    fn eq(&self, o: &F128) -> bool {
        self.partial_cmp(o) == Some(Ordering::Equal)
    }
}

impl PartialOrd for F128 {
    fn partial_cmp(&self, o: &F128) -> Option<Ordering> {
        let sa = self.is_sign_negative();
        let sb = o.is_sign_negative();
        Some(match (sa, sb) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => self.cmp_abs(o),
            (true, true) => o.cmp_abs(self),
        })
    }
}

impl Zero for F128 {
    fn zero() -> F128 {
        F128::ZERO
    }
    fn is_zero(&self) -> bool {
        self.m == 0
    }
}

impl One for F128 {
    fn one() -> F128 {
        F128::ONE
    }
}

impl Num for F128 {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<F128, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        super::BigFloat::parse_decimal(s, 160).map(|b| b.to_quad())
    }
}

impl Default for F128 {
    fn default() -> F128 {
        F128::ZERO
    }
}

impl fmt::Debug for F128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F128({})", super::BigFloat::from_quad(*self).to_decimal_string(40))
    }
}

impl fmt::Display for F128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::BigFloat::from_quad(*self).to_decimal_string(38))
    }
}
