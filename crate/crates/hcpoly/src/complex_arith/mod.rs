//! Dense complex polynomials and precision-managed arithmetic on them.
//!
//! Exact operations (`mul_exact`, `compose_exact`, `eval_exact`) only need
//! a numeric field and are what the rational oracles use. The approximate
//! operations take an error target in bits and guarantee it whenever the
//! backend precision allows, returning [`Error::Precision`] otherwise.

mod fft;

use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::{Num, Zero};

pub use fft::Dft;

use crate::error::{invalid, Error, Result};
use crate::scalar::{Backend, Real};

/// Mantissa bits of the working arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    bits: u32,
}

impl PrecisionContext {
    pub fn new(bits: u32) -> Result<Self> {
        if bits < 53 {
            return invalid(format!("precision {bits} below the 53-bit floor"));
        }
        Ok(PrecisionContext { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn backend(&self) -> Backend {
        Backend::for_bits(self.bits)
    }

    /// Relative error allowed per operation: `2^{-bits+4}`.
    pub fn op_error(&self) -> f64 {
        2f64.powi(4 - self.bits as i32)
    }
}

/// `ceil(log2(n))` for `n >= 1`.
pub fn ceil_log2(n: u64) -> u32 {
    assert!(n >= 1);
    64 - (n - 1).leading_zeros()
}

/// Mantissa bits needed for target precision `m` on a degree-`d`
/// polynomial with `‖f‖₁ <= 2^tau`.
pub fn working_precision(d: u64, tau: u32, m: u32) -> u32 {
    (m + tau + ceil_log2(d + 1) + 32).max(53)
}

/// `max(1, ceil(log2 ‖f‖₁))`.
pub fn tau_of<T: Real>(f: &Poly<T>) -> u32 {
    let n = f.norm1();
    if n.is_zero() {
        return 1;
    }
    let lg = n.ilog2();
    // exact powers of two have ceil(log2) = ilog2
    let exact = n == T::one().mul_pow2(lg as i32);
    let c = if exact { lg } else { lg + 1 };
    c.max(1) as u32
}

#[inline]
pub fn czero<T: Num + Clone>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cabs<T: Real>(z: &Complex<T>) -> T {
    (z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()).sqrt()
}

#[inline]
pub fn cscale2<T: Real>(z: &Complex<T>, k: i32) -> Complex<T> {
    Complex::new(z.re.mul_pow2(k), z.im.mul_pow2(k))
}

pub fn c_from_f64<T: Real>(z: Complex<f64>, bits: u32) -> Complex<T> {
    Complex::new(T::from_f64_prec(z.re, bits), T::from_f64_prec(z.im, bits))
}

pub fn c_to_f64<T: Real>(z: &Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

/// Convert between backends through the exact `BigFloat` representation.
pub fn c_convert<S: Real, T: Real>(z: &Complex<S>) -> Complex<T> {
    Complex::new(T::from_big(&z.re.to_big()), T::from_big(&z.im.to_big()))
}

pub fn c_at_precision<T: Real>(z: &Complex<T>, bits: u32) -> Complex<T> {
    Complex::new(z.re.at_precision(bits), z.im.at_precision(bits))
}

/// Dense polynomial `Σ c_k X^k`. Trailing zero coefficients are removed on
/// construction, so the zero polynomial has no coefficients and degree −1.
#[derive(Clone, Debug)]
pub struct Poly<T> {
    coeffs: Vec<Complex<T>>,
    norm1: OnceLock<T>,
}

impl<T: Num + Clone> PartialEq for Poly<T> {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs == o.coeffs
    }
}

impl<T: Num + Clone> Poly<T> {
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs, norm1: OnceLock::new() }
    }

    pub fn zero() -> Self {
        Poly::new(Vec::new())
    }

    pub fn constant(c: Complex<T>) -> Self {
        Poly::new(vec![c])
    }

    pub fn from_real(cs: Vec<T>) -> Self {
        Poly::new(cs.into_iter().map(|c| Complex::new(c, T::zero())).collect())
    }

    /// `c · X^k`.
    pub fn monomial(c: Complex<T>, k: usize) -> Self {
        let mut v = vec![czero(); k];
        v.push(c);
        Poly::new(v)
    }

    /// `∏ (X − z_k)`.
    pub fn from_roots(roots: &[Complex<T>]) -> Self {
        let mut p = vec![Complex::new(T::one(), T::zero())];
        for z in roots {
            let mut next = vec![czero(); p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                next[i + 1] = next[i + 1].clone() + c.clone();
                next[i] = next[i].clone() - c.clone() * z.clone();
            }
            p = next;
        }
        Poly::new(p)
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    /// Degree, −1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> Complex<T> {
        self.coeffs.get(k).cloned().unwrap_or_else(czero)
    }

    pub fn leading(&self) -> Complex<T> {
        self.coeffs.last().cloned().unwrap_or_else(czero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn scale(&self, c: &Complex<T>) -> Self {
        Poly::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    /// First `n` coefficients (`f mod X^n`).
    pub fn truncate(&self, n: usize) -> Self {
        Poly::new(self.coeffs.iter().take(n).cloned().collect())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * int_as::<T>(k as u64))
                .collect(),
        )
    }

    /// `X^d f(1/X)` for `d = deg f`.
    pub fn reverse(&self) -> Self {
        Poly::new(self.coeffs.iter().rev().cloned().collect())
    }

    /// Schoolbook product, exact for exact `T`.
    pub fn mul_exact(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![czero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    /// `f(g(X))` by Horner, exact for exact `T`.
    pub fn compose_exact(&self, g: &Self) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_exact(g).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Horner evaluation in the arithmetic of `T`.
    pub fn eval_exact(&self, x: &Complex<T>) -> Complex<T> {
        let mut acc = czero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }
}

fn int_as<T: Num + Clone>(k: u64) -> T {
    // binary expansion keeps this generic over any numeric field
    let mut out = T::zero();
    let mut base = T::one();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            out = out + base.clone();
        }
        base = base.clone() + base;
        k >>= 1;
    }
    out
}

impl<T: Real> Poly<T> {
    /// `‖f‖₁ = Σ|c_k|`, computed once and cached.
    pub fn norm1(&self) -> T {
        self.norm1
            .get_or_init(|| self.coeffs.iter().fold(T::zero(), |acc, c| acc + cabs(c)))
            .clone()
    }

    pub fn norm2(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc + c.re.clone() * c.re.clone() + c.im.clone() * c.im.clone())
            .sqrt()
    }

    pub fn norm_inf(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| T::max_of(acc, cabs(c)))
    }

    /// Coefficientwise conversion to another backend.
    pub fn convert<S: Real>(&self) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(c_convert).collect())
    }

    pub fn to_f64(&self) -> Poly<f64> {
        Poly::new(self.coeffs.iter().map(c_to_f64).collect())
    }

    /// Multiply by `2^k` exactly.
    pub fn scale_pow2(&self, k: i32) -> Self {
        Poly::new(self.coeffs.iter().map(|c| cscale2(c, k)).collect())
    }

    /// Coefficients raised to at least `bits` of precision.
    pub fn at_precision(&self, bits: u32) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c_at_precision(c, bits)).collect())
    }

    /// Stable digest of the exact coefficient values.
    pub fn digest(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for c in &self.coeffs {
            c.re.to_big().to_exact_decimal().hash(&mut h);
            c.im.to_big().to_exact_decimal().hash(&mut h);
        }
        h.finish()
    }
}

/// `f(x)` by Horner's rule at `ctx` precision; the error is at most
/// `(deg+1)·‖f‖₁·max(1,|x|)^deg·2^{-bits+4}` when the backend delivers
/// `ctx.bits()`.
pub fn horner_eval<T: Real>(f: &Poly<T>, x: &Complex<T>, ctx: &PrecisionContext) -> Complex<T> {
    let x = c_at_precision(x, ctx.bits());
    let mut acc: Complex<T> = czero();
    for c in f.coeffs.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

/// `(f(x), f'(x))` in one Horner pass.
pub fn horner_eval_d<T: Real>(f: &Poly<T>, x: &Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p: Complex<T> = czero();
    let mut dp: Complex<T> = czero();
    for c in f.coeffs.iter().rev() {
        dp = dp * x.clone() + p.clone();
        p = p * x.clone() + c.clone();
    }
    (p, dp)
}

/// A-priori bound of [`horner_eval`].
pub fn horner_error_bound(deg: usize, norm1: f64, xabs: f64, bits: u32) -> f64 {
    (deg as f64 + 1.0) * norm1 * xabs.max(1.0).powi(deg as i32) * 2f64.powi(4 - bits as i32)
}

fn unit<T: Real>(p: &Poly<T>) -> u32 {
    p.coeffs.iter().map(|c| c.re.unit_bits()).min().unwrap_or(u32::MAX)
}

fn ulp(bits: u32) -> f64 {
    2f64.powi(-(bits.min(1000) as i32))
}

fn check_bound(bound: f64, err_bits: u32, available: u32) -> Result<()> {
    if bound <= 2f64.powi(-(err_bits as i32)) {
        Ok(())
    } else {
        let needed = available + (bound.log2() + err_bits as f64).ceil().max(1.0) as u32;
        Err(Error::Precision { needed, available })
    }
}

/// Schoolbook multiplication keeping only the first `n` coefficients.
pub(crate) fn mul_trunc_school<T: Real>(a: &[Complex<T>], b: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let len = (a.len() + b.len()).saturating_sub(1).min(n);
    let mut out = vec![czero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Product through a zero-padded power-of-two transform, inputs scaled to
/// unit 1-norm by powers of two and rescaled afterward.
fn mul_fft<T: Real>(f: &Poly<T>, g: &Poly<T>, bits: u32) -> Vec<Complex<T>> {
    let out_len = f.coeffs.len() + g.coeffs.len() - 1;
    let l = out_len.next_power_of_two();
    let sf = f.norm1().ilog2() as i32 + 1;
    let sg = g.norm1().ilog2() as i32 + 1;
    let plan = Dft::<T>::new(l, bits);
    let pad = |p: &Poly<T>, s: i32| {
        let mut v: Vec<Complex<T>> = p.coeffs.iter().map(|c| cscale2(c, -s)).collect();
        v.resize(l, czero());
        v
    };
    let fa = plan.forward(&pad(f, sf));
    let ga = plan.forward(&pad(g, sg));
    let prod: Vec<Complex<T>> = fa.into_iter().zip(ga).map(|(x, y)| x * y).collect();
    let mut c = plan.inverse(&prod);
    c.truncate(out_len);
    c.iter().map(|v| cscale2(v, sf + sg)).collect()
}

const SCHOOLBOOK_LIMIT: usize = 48;

/// `h` with `‖h − fg‖₁ <= 2^{-err_bits}` and `deg h = deg f + deg g`.
pub fn poly_mul_truncated<T: Real>(f: &Poly<T>, g: &Poly<T>, err_bits: u32) -> Result<Poly<T>> {
    if err_bits < 1 {
        return invalid("err_bits must be at least 1");
    }
    if f.is_zero() || g.is_zero() {
        return Ok(Poly::zero());
    }
    let u = unit(f).min(unit(g));
    let scale = f.norm1().to_f64() * g.norm1().to_f64();
    let short = f.coeffs.len().min(g.coeffs.len());
    let school_bound = (short as f64 + 2.0) * 4.0 * ulp(u) * scale;
    if short <= SCHOOLBOOK_LIMIT {
        check_bound(school_bound, err_bits, u)?;
        let n = f.coeffs.len() + g.coeffs.len() - 1;
        return Ok(Poly::new(mul_trunc_school(&f.coeffs, &g.coeffs, n)));
    }
    let l = (f.coeffs.len() + g.coeffs.len() - 1).next_power_of_two() as f64;
    let fft_bound = 3.0 * l * (l.log2() + 2.0) * 8.0 * ulp(u) * scale * 4.0;
    if fft_bound > 2f64.powi(-(err_bits as i32)) && school_bound <= 2f64.powi(-(err_bits as i32)) {
        let n = f.coeffs.len() + g.coeffs.len() - 1;
        return Ok(Poly::new(mul_trunc_school(&f.coeffs, &g.coeffs, n)));
    }
    check_bound(fft_bound, err_bits, u)?;
    Ok(Poly::new(mul_fft(f, g, u.min(4096))))
}

/// `f(ω^k)` for `k < K`, `ω = e^{2πi/K}`, with aggregate error at most
/// `2^{-err_bits}`. `f` is folded modulo `X^K − 1` first.
pub fn fft_roots_of_unity<T: Real>(f: &Poly<T>, k: usize, err_bits: u32) -> Result<Vec<Complex<T>>> {
    if k == 0 {
        return invalid("number of roots of unity must be positive");
    }
    if f.is_zero() {
        return Ok(vec![czero(); k]);
    }
    let u = unit(f);
    let folded = fold_mod(f.coeffs(), k);
    let plan = Dft::<T>::new(k, u.min(4096));
    let norm: f64 = folded.iter().map(|c| cabs(c).to_f64()).sum();
    check_bound(plan.aggregate_error_bound(norm, u), err_bits, u)?;
    Ok(plan.forward(&folded))
}

/// Coefficients of `f mod X^k − 1`.
pub fn fold_mod<T: Real>(c: &[Complex<T>], k: usize) -> Vec<Complex<T>> {
    let mut out = vec![czero(); k];
    for (j, v) in c.iter().enumerate() {
        out[j % k] = out[j % k].clone() + v.clone();
    }
    out
}

/// Bound on the 1-norm error of [`compose_mod_unchecked`].
fn compose_bound(deg: usize, trunc: usize, fnorm: f64, gnorm: f64, u: u32) -> f64 {
    let g = gnorm.max(1.0);
    (deg as f64 + 1.0) * (trunc as f64 + 3.0) * 4.0 * ulp(u) * fnorm * g.powi(deg as i32)
}

/// Horner composition modulo `X^trunc` without precision checks.
pub(crate) fn compose_mod_unchecked<T: Real>(f: &[Complex<T>], g: &[Complex<T>], trunc: usize) -> Vec<Complex<T>> {
    let mut acc: Vec<Complex<T>> = Vec::with_capacity(trunc);
    for c in f.iter().rev() {
        acc = if acc.is_empty() { Vec::new() } else { mul_trunc_school(&acc, g, trunc) };
        if acc.is_empty() {
            acc.push(czero());
        }
        acc[0] = acc[0].clone() + c.clone();
    }
    acc.truncate(trunc);
    acc
}

/// `h` with `‖h − (f∘g mod X^trunc)‖₁ <= 2^{-err_bits}`.
pub fn poly_compose_mod<T: Real>(f: &Poly<T>, g: &Poly<T>, trunc: usize, err_bits: u32) -> Result<Poly<T>> {
    if trunc == 0 {
        return invalid("truncation order must be positive");
    }
    if f.is_zero() {
        return Ok(Poly::zero());
    }
    let u = unit(f).min(unit(g));
    let bound = compose_bound(f.deg(), trunc, f.norm1().to_f64(), g.norm1().to_f64(), u);
    check_bound(bound, err_bits, u)?;
    let gt: Vec<Complex<T>> = g.coeffs.iter().take(trunc).cloned().collect();
    Ok(Poly::new(compose_mod_unchecked(&f.coeffs, &gt, trunc)))
}
