//! Real scalar types the numerical core is generic over.
//!
//! Four backends cover the precision range: hardware `f64`, the
//! double-double [`DoubleDouble`], the fixed 126-bit [`F128`], and the
//! arbitrary-precision [`BigFloat`].
//! [`Backend::for_bits`] picks the cheapest one that meets a requested
//! working precision and [`with_real!`](crate::with_real) instantiates
//! generic code for it.

mod dd;
mod multi;
mod quad;

use std::fmt::Debug;
use std::ops::Neg;

use num_rational::BigRational;
use num_traits::Num;

pub use dd::DoubleDouble;
pub use multi::BigFloat;
pub use quad::F128;

/// Field operations plus the handful of extras the algorithms need.
///
/// Values created through `from_f64_prec` carry at least `bits` of
/// precision; `unit_bits` is the per-operation relative error exponent
/// the error analysis may assume.
pub trait Real: Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static {
    const NAME: &'static str;

    fn from_f64_prec(x: f64, bits: u32) -> Self;
    fn from_big(x: &BigFloat) -> Self;
    /// Exact conversion.
    fn to_big(&self) -> BigFloat;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    /// Exact scaling by `2^k`.
    fn mul_pow2(&self, k: i32) -> Self;
    /// `floor(log2|x|)`; `i64::MIN` for zero.
    fn ilog2(&self) -> i64;
    fn unit_bits(&self) -> u32;

    /// Raise a value to at least `bits` of precision where the backend
    /// supports it; fixed-width backends return the value unchanged.
    fn at_precision(&self, _bits: u32) -> Self {
        self.clone()
    }

    fn from_i64_prec(x: i64, bits: u32) -> Self {
        if x.unsigned_abs() < (1u64 << 53) {
            Self::from_f64_prec(x as f64, bits)
        } else {
            Self::from_big(&BigFloat::from_i64(x, 64).with_precision(bits.max(64)))
        }
    }

    fn from_rational(q: &BigRational, bits: u32) -> Self {
        Self::from_big(&BigFloat::from_rational(q, bits.max(64)))
    }

    fn pi(bits: u32) -> Self {
        machin_pi(bits)
    }

    /// `(cos, sin)` of `2πk/n`.
    fn cis_frac(k: u64, n: u64, bits: u32) -> (Self, Self) {
        cis_frac_generic(k, n, bits, |a, den| {
            let theta = Self::pi(bits) * Self::from_i64_prec(a as i64, bits) / Self::from_i64_prec(den as i64, bits);
            taylor_cos_sin(theta, bits)
        })
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
}

/// Concrete arithmetic backend for a working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Hardware,
    Double,
    Quad,
    Multi(u32),
}

impl Backend {
    /// Largest request served by [`DoubleDouble`].
    pub const DOUBLE_MAX_BITS: u32 = 96;
    /// Largest request served by [`F128`].
    pub const QUAD_MAX_BITS: u32 = 120;

    pub fn for_bits(bits: u32) -> Backend {
        if bits <= 53 {
            Backend::Hardware
        } else if bits <= Self::DOUBLE_MAX_BITS {
            Backend::Double
        } else if bits <= Self::QUAD_MAX_BITS {
            Backend::Quad
        } else {
            // never fewer bits than the quad tier, so raising the request
            // cannot lower the delivered precision
            Backend::Multi(bits.max(128))
        }
    }

    /// Per-operation precision actually delivered.
    pub fn delivered_bits(self) -> u32 {
        match self {
            Backend::Hardware => 53,
            Backend::Double => DoubleDouble::UNIT_BITS,
            Backend::Quad => F128::UNIT_BITS,
            Backend::Multi(b) => b,
        }
    }
}

/// Run `$body` with `$t` bound to the scalar type of `$backend`.
#[macro_export]
macro_rules! with_real {
    ($backend:expr, $t:ident => $body:expr) => {
        match $backend {
            $crate::scalar::Backend::Hardware => {
                type $t = f64;
                $body
            }
            $crate::scalar::Backend::Double => {
                type $t = $crate::scalar::DoubleDouble;
                $body
            }
            $crate::scalar::Backend::Quad => {
                type $t = $crate::scalar::F128;
                $body
            }
            $crate::scalar::Backend::Multi(_) => {
                type $t = $crate::scalar::BigFloat;
                $body
            }
        }
    };
}

impl Real for f64 {
    const NAME: &'static str = "f64";

    fn from_f64_prec(x: f64, _bits: u32) -> f64 {
        x
    }
    fn from_big(x: &BigFloat) -> f64 {
        x.to_f64()
    }
    fn to_big(&self) -> BigFloat {
        BigFloat::from_f64(*self, 53)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> f64 {
        f64::abs(*self)
    }
    fn sqrt(&self) -> f64 {
        f64::sqrt(*self)
    }
    fn mul_pow2(&self, k: i32) -> f64 {
        quad::ldexp(*self, k)
    }
    fn ilog2(&self) -> i64 {
        if *self == 0.0 {
            return i64::MIN;
        }
        let b = self.to_bits();
        let e = ((b >> 52) & 0x7ff) as i64;
        if e == 0 {
            // subnormal
            let frac = b & ((1u64 << 52) - 1);
            -1075 + (64 - frac.leading_zeros() as i64)
        } else {
            e - 1023
        }
    }
    fn unit_bits(&self) -> u32 {
        53
    }
    fn pi(_bits: u32) -> f64 {
        std::f64::consts::PI
    }
    fn cis_frac(k: u64, n: u64, bits: u32) -> (f64, f64) {
        cis_frac_generic(k, n, bits, |a, den| {
            let (s, c) = (std::f64::consts::PI * a as f64 / den as f64).sin_cos();
            (c, s)
        })
    }
}

impl Real for F128 {
    const NAME: &'static str = "F128";

    fn from_f64_prec(x: f64, _bits: u32) -> F128 {
        F128::from_f64(x)
    }
    fn from_big(x: &BigFloat) -> F128 {
        x.to_quad()
    }
    fn to_big(&self) -> BigFloat {
        BigFloat::from_quad(*self)
    }
    fn to_f64(&self) -> f64 {
        F128::to_f64(*self)
    }
    fn abs(&self) -> F128 {
        F128::abs(*self)
    }
    fn sqrt(&self) -> F128 {
        F128::sqrt(*self)
    }
    fn mul_pow2(&self, k: i32) -> F128 {
        F128::mul_pow2(*self, k)
    }
    fn ilog2(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            F128::ilog2(*self) as i64
        }
    }
    fn unit_bits(&self) -> u32 {
        F128::UNIT_BITS
    }
    fn pi(_bits: u32) -> F128 {
        static PI: std::sync::OnceLock<F128> = std::sync::OnceLock::new();
        *PI.get_or_init(|| machin_pi::<BigFloat>(160).to_quad())
    }
    fn cis_frac(k: u64, n: u64, _bits: u32) -> (F128, F128) {
        // full width costs little here and keeps tables exact to the last bit
        let bits = F128::UNIT_BITS;
        cis_frac_generic(k, n, bits, |a, den| {
            let theta = Self::pi(bits) * Self::from_i64_prec(a as i64, bits) / Self::from_i64_prec(den as i64, bits);
            taylor_cos_sin(theta, bits)
        })
    }
}

impl Real for DoubleDouble {
    const NAME: &'static str = "DoubleDouble";

    fn from_f64_prec(x: f64, _bits: u32) -> DoubleDouble {
        DoubleDouble::from_f64(x)
    }
    fn from_big(x: &BigFloat) -> DoubleDouble {
        DoubleDouble::from_big(x)
    }
    fn to_big(&self) -> BigFloat {
        DoubleDouble::to_big(*self)
    }
    fn to_f64(&self) -> f64 {
        DoubleDouble::to_f64(*self)
    }
    fn abs(&self) -> DoubleDouble {
        DoubleDouble::abs(*self)
    }
    fn sqrt(&self) -> DoubleDouble {
        DoubleDouble::sqrt(*self)
    }
    fn mul_pow2(&self, k: i32) -> DoubleDouble {
        DoubleDouble::mul_pow2(*self, k)
    }
    fn ilog2(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            DoubleDouble::ilog2(*self)
        }
    }
    fn unit_bits(&self) -> u32 {
        DoubleDouble::UNIT_BITS
    }
    fn pi(_bits: u32) -> DoubleDouble {
        static PI: std::sync::OnceLock<DoubleDouble> = std::sync::OnceLock::new();
        *PI.get_or_init(|| DoubleDouble::from_big(&machin_pi::<BigFloat>(160)))
    }
    fn cis_frac(k: u64, n: u64, _bits: u32) -> (DoubleDouble, DoubleDouble) {
        // evaluated in F128 and rounded, so tables are correct to the last bit
        let (c, s) = <F128 as Real>::cis_frac(k, n, F128::UNIT_BITS);
        (DoubleDouble::from_quad(c), DoubleDouble::from_quad(s))
    }
}

impl Real for BigFloat {
    const NAME: &'static str = "BigFloat";

    fn from_f64_prec(x: f64, bits: u32) -> BigFloat {
        BigFloat::from_f64(x, bits)
    }
    fn from_big(x: &BigFloat) -> BigFloat {
        x.clone()
    }
    fn to_big(&self) -> BigFloat {
        self.clone()
    }
    fn to_f64(&self) -> f64 {
        BigFloat::to_f64(self)
    }
    fn abs(&self) -> BigFloat {
        BigFloat::abs(self)
    }
    fn sqrt(&self) -> BigFloat {
        BigFloat::sqrt(self)
    }
    fn mul_pow2(&self, k: i32) -> BigFloat {
        BigFloat::mul_pow2(self, k)
    }
    fn ilog2(&self) -> i64 {
        if num_traits::Zero::is_zero(self) {
            i64::MIN
        } else {
            BigFloat::ilog2(self)
        }
    }
    fn unit_bits(&self) -> u32 {
        match self.precision() {
            0 => u32::MAX,
            p => p,
        }
    }
    fn at_precision(&self, bits: u32) -> BigFloat {
        if self.precision() != 0 && self.precision() >= bits {
            self.clone()
        } else {
            self.with_precision(bits)
        }
    }
    fn pi(bits: u32) -> BigFloat {
        use std::collections::HashMap;
        use std::sync::{Mutex, OnceLock};
        static CACHE: OnceLock<Mutex<HashMap<u32, BigFloat>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(v) = cache.lock().expect("pi cache").get(&bits) {
            return v.clone();
        }
        let v = machin_pi::<BigFloat>(bits).with_precision(bits.max(64));
        cache.lock().expect("pi cache").insert(bits, v.clone());
        v
    }
}

/// π = 16·atan(1/5) − 4·atan(1/239).
fn machin_pi<T: Real>(bits: u32) -> T {
    let b = bits + 16;
    let atan_inv = |x: i64| -> T {
        let xv = T::from_i64_prec(x, b);
        let x2 = xv.clone() * xv.clone();
        let mut power = T::one() / xv;
        let mut sum = T::zero();
        let mut k = 0i64;
        loop {
            let term = power.clone() / T::from_i64_prec(2 * k + 1, b);
            if term.ilog2() < -(b as i64) - 4 {
                break;
            }
            if k % 2 == 0 {
                sum = sum + term;
            } else {
                sum = sum - term;
            }
            power = power / x2.clone();
            k += 1;
        }
        sum
    };
    T::from_i64_prec(16, b) * atan_inv(5) - T::from_i64_prec(4, b) * atan_inv(239)
}

/// Taylor series for `|θ| <= π/4`.
fn taylor_cos_sin<T: Real>(theta: T, bits: u32) -> (T, T) {
    let b = bits as i64 + 8;
    let t2 = theta.clone() * theta.clone();
    let mut cos = T::one();
    let mut sin = theta.clone();
    let mut ct = T::one();
    let mut st = theta;
    let mut n = 1i64;
    loop {
        ct = -(ct * t2.clone()) / T::from_i64_prec((2 * n - 1) * (2 * n), bits + 8);
        st = -(st * t2.clone()) / T::from_i64_prec((2 * n) * (2 * n + 1), bits + 8);
        cos = cos + ct.clone();
        sin = sin + st.clone();
        if num_traits::Zero::is_zero(&ct) || ct.ilog2() < -b - 4 {
            break;
        }
        n += 1;
    }
    (cos, sin)
}

/// Exact octant reduction of `2πk/n`; `base(a, den)` must return
/// `(cos, sin)` of `πa/den`, always called with `a/den <= 1/4`.
fn cis_frac_generic<T: Real>(k: u64, n: u64, bits: u32, base: impl Fn(u64, u64) -> (T, T)) -> (T, T) {
    assert!(n > 0, "root of unity of order 0");
    let u = (k % n) as u128;
    let n128 = n as u128;
    let quadrant = (4 * u) / n128;
    let r = 4 * u - quadrant * n128; // angle = quadrant·π/2 + π·r/(2n)
    let zero = T::from_f64_prec(0.0, bits);
    let one = T::from_f64_prec(1.0, bits);
    let (c, s) = if r == 0 {
        (one, zero)
    } else if 2 * r <= n128 {
        base(r as u64, 2 * n)
    } else {
        let (c, s) = base((n128 - r) as u64, 2 * n);
        (s, c)
    };
    match quadrant {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    }
}
