//! Discrete Fourier transforms at roots of unity of arbitrary order.
//!
//! Power-of-two lengths use an iterative radix-2 transform; other lengths
//! go through Bluestein's chirp-z reduction to a power-of-two convolution.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;

use crate::scalar::Real;

type TableKey = (TypeId, u64, u64, u32);

/// `e^{2πij/n}` for `j < count`, shared across plans of the same backend.
/// Only `BigFloat` depends on `bits`; the fixed-width backends always
/// compute tables at full width.
fn roots_table<T: Real>(n: u64, count: u64, bits: u32) -> Arc<Vec<Complex<T>>> {
    static CACHE: OnceLock<Mutex<HashMap<TableKey, Arc<dyn Any + Send + Sync>>>> = OnceLock::new();
    let key_bits = if T::from_i64_prec(1, bits).unit_bits() == T::from_i64_prec(1, 2 * bits + 64).unit_bits() { 0 } else { bits };
    let key = (TypeId::of::<T>(), n, count, key_bits);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("twiddle cache").get(&key) {
        return t.clone().downcast::<Vec<Complex<T>>>().expect("keyed by type");
    }
    let t: Vec<Complex<T>> = (0..count)
        .map(|j| {
            let (c, s) = T::cis_frac(j, n, bits);
            Complex::new(c, s)
        })
        .collect();
    let t = Arc::new(t);
    cache.lock().expect("twiddle cache").insert(key, t.clone());
    t
}

/// Plan for `y_k = Σ_j x_j ω^{jk}` with `ω = e^{2πi/n}`.
#[derive(Clone, Debug)]
pub struct Dft<T> {
    n: usize,
    bits: u32,
    kind: Kind<T>,
}

#[derive(Clone, Debug)]
enum Kind<T> {
    Trivial,
    Pow2(Radix2<T>),
    Bluestein {
        inner: Radix2<T>,
        /// `e^{iπ j²/n}` for `j < n`
        chirp: Vec<Complex<T>>,
        /// transform of the conjugate chirp laid out cyclically
        kernel: Vec<Complex<T>>,
    },
}

#[derive(Clone, Debug)]
struct Radix2<T> {
    n: usize,
    /// `e^{2πij/n}` for `j < n/2`
    tw: Arc<Vec<Complex<T>>>,
}

impl<T: Real> Radix2<T> {
    fn new(n: usize, bits: u32) -> Self {
        debug_assert!(n.is_power_of_two());
        Radix2 { n, tw: roots_table(n as u64, n as u64 / 2, bits) }
    }

    /// In place, positive exponent unless `conj`, unnormalized.
    fn run(&self, a: &mut [Complex<T>], conj: bool) {
        let n = self.n;
        debug_assert_eq!(a.len(), n);
        if n == 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                a.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for start in (0..n).step_by(len) {
                for j in 0..half {
                    let w = &self.tw[j * step];
                    let w = if conj { w.conj() } else { w.clone() };
                    let u = a[start + j].clone();
                    let v = a[start + j + half].clone() * w;
                    a[start + j] = u.clone() + v.clone();
                    a[start + j + half] = u - v;
                }
            }
            len <<= 1;
        }
    }
}

impl<T: Real> Dft<T> {
    pub fn new(n: usize, bits: u32) -> Self {
        assert!(n >= 1, "transform length must be positive");
        let kind = if n == 1 {
            Kind::Trivial
        } else if n.is_power_of_two() {
            Kind::Pow2(Radix2::new(n, bits))
        } else {
            let l = (2 * n - 1).next_power_of_two();
            let inner = Radix2::new(l, bits);
            let two_n = 2 * n as u64;
            let circle = roots_table::<T>(two_n, two_n, bits);
            let chirp: Vec<Complex<T>> = (0..n as u64).map(|j| circle[((j * j) % two_n) as usize].clone()).collect();
            let zero = Complex::new(T::zero(), T::zero());
            let mut kernel = vec![zero; l];
            kernel[0] = chirp[0].conj();
            for t in 1..n {
                kernel[t] = chirp[t].conj();
                kernel[l - t] = chirp[t].conj();
            }
            inner.run(&mut kernel, false);
            Kind::Bluestein { inner, chirp, kernel }
        };
        Dft { n, bits, kind }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Evaluate `Σ x_j X^j` at every `n`-th root of unity `ω^k`.
    pub fn forward(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.transform(x, false)
    }

    /// Inverse of [`forward`](Self::forward), including the `1/n` factor.
    pub fn inverse(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let inv_n = T::one() / T::from_i64_prec(self.n as i64, self.bits);
        self.transform(y, true).into_iter().map(|v| v * inv_n.clone()).collect()
    }

    fn transform(&self, x: &[Complex<T>], conj: bool) -> Vec<Complex<T>> {
        assert_eq!(x.len(), self.n, "input length must equal the plan length");
        match &self.kind {
            Kind::Trivial => x.to_vec(),
            Kind::Pow2(r) => {
                let mut a = x.to_vec();
                r.run(&mut a, conj);
                a
            }
            Kind::Bluestein { inner, chirp, kernel } => {
                // conjugating input and output turns the forward plan into the inverse
                let l = inner.n;
                let zero = Complex::new(T::zero(), T::zero());
                let mut a = vec![zero; l];
                for j in 0..self.n {
                    let xj = if conj { x[j].conj() } else { x[j].clone() };
                    a[j] = xj * chirp[j].clone();
                }
                inner.run(&mut a, false);
                for (v, k) in a.iter_mut().zip(kernel) {
                    *v = v.clone() * k.clone();
                }
                inner.run(&mut a, true);
                let shift = -(l.trailing_zeros() as i32);
                (0..self.n)
                    .map(|k| {
                        let y = a[k].clone() * chirp[k].clone();
                        let y = Complex::new(y.re.mul_pow2(shift), y.im.mul_pow2(shift));
                        if conj {
                            y.conj()
                        } else {
                            y
                        }
                    })
                    .collect()
            }
        }
    }

    /// Bound on `Σ_k |ŷ_k − y_k|` for an input of 1-norm `norm1`, at a
    /// per-operation relative error of `2^-unit_bits`.
    pub fn aggregate_error_bound(&self, norm1: f64, unit_bits: u32) -> f64 {
        let u = 2f64.powi(-(unit_bits as i32));
        let n = self.n as f64;
        match &self.kind {
            Kind::Trivial => 2.0 * u * norm1,
            Kind::Pow2(_) => {
                let lg = n.log2();
                n * (lg + 1.0) * 8.0 * u * norm1
            }
            Kind::Bluestein { inner, .. } => {
                let l = inner.n as f64;
                let lg = l.log2();
                3.0 * n * l.sqrt() * (lg + 2.0) * 8.0 * u * norm1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::F128;

    fn naive(x: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex::new(0.0, 0.0), |acc, (j, v)| {
                    let th = 2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
                    acc + v * Complex::new(th.cos(), th.sin())
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_for_all_small_lengths() {
        for n in 1..40 {
            let x: Vec<Complex<f64>> = (0..n).map(|j| Complex::new((j as f64 * 0.37).sin(), (j as f64).cos() * 0.5)).collect();
            let plan = Dft::<f64>::new(n, 53);
            let y = plan.forward(&x);
            let z = naive(&x);
            for (a, b) in y.iter().zip(&z) {
                assert!((a - b).norm() < 1e-12, "n={n}");
            }
            let back = plan.inverse(&y);
            for (a, b) in back.iter().zip(&x) {
                assert!((a - b).norm() < 1e-13, "inverse n={n}");
            }
        }
    }

    #[test]
    fn quad_bluestein_is_accurate() {
        let n = 17;
        let x: Vec<Complex<F128>> = (0..n).map(|j| Complex::new(F128::from_f64(1.0 / (j + 1) as f64), F128::ZERO)).collect();
        let plan = Dft::<F128>::new(n, 120);
        let y = plan.forward(&x);
        let back = plan.inverse(&y);
        for (a, b) in back.iter().zip(&x) {
            let d = (a.re - b.re).abs() + (a.im - b.im).abs();
            assert!(d.is_zero() || d.ilog2() < -112);
        }
    }
}
