//! Oracles and generators shared by the integration tests. Nothing here
//! calls into the library's evaluation or root-finding code.

#![allow(dead_code)]

use hcpoly::{BigFloat, Complex, Poly, Poly64, Real, C64};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent complex Gaussian coefficients.
pub fn gaussian_poly(d: usize, rng: &mut ChaCha8Rng) -> Poly64 {
    Poly::new((0..=d).map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect())
}

/// Gaussian direction with `‖f‖₁` uniform in `[1/2, 2]`.
pub fn random_poly(d: usize, rng: &mut ChaCha8Rng) -> Poly64 {
    let f = gaussian_poly(d, rng);
    let s = rng.gen_range(0.5..2.0) / f.norm1();
    Poly::new(f.coeffs().iter().map(|c| c * s).collect())
}

pub fn disk_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let z = C64::from_polar(rng.gen::<f64>().sqrt(), rng.gen::<f64>() * std::f64::consts::TAU);
            if z.norm() > 1.0 {
                z / z.norm()
            } else {
                z
            }
        })
        .collect()
}

pub fn to_big(f: &Poly64, bits: u32) -> Poly<BigFloat> {
    Poly::new(f.coeffs().iter().map(|c| cbig(*c, bits)).collect())
}

pub fn cbig(z: C64, bits: u32) -> Complex<BigFloat> {
    Complex::new(BigFloat::from_f64(z.re, bits), BigFloat::from_f64(z.im, bits))
}

/// Plain Horner in any backend.
pub fn horner<T: Real>(c: &[Complex<T>], x: &Complex<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for a in c.iter().rev() {
        acc = acc * x.clone() + a.clone();
    }
    acc
}

pub fn dist<T: Real>(a: &Complex<T>, b: &Complex<T>) -> f64 {
    let (x, y) = (a.re.clone() - b.re.clone(), a.im.clone() - b.im.clone());
    (x.clone() * x + y.clone() * y).sqrt().to_f64()
}

/// `f(x)` by Horner in f64 with a running bound on its rounding error.
pub fn horner_f64_bounded(c: &[C64], x: C64) -> (C64, f64) {
    let mut acc = C64::new(0.0, 0.0);
    let mut mag = 0.0;
    let xa = x.norm();
    for a in c.iter().rev() {
        acc = acc * x + a;
        mag = mag * xa + a.norm();
    }
    // each step loses at most a few ulps of the running magnitude
    let u = f64::EPSILON / 2.0;
    (acc, 8.0 * (c.len() as f64 + 1.0) * u * mag)
}

pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

pub fn int_poly(cs: &[BigInt]) -> Poly<BigRational> {
    Poly::new(cs.iter().map(|c| Complex::new(BigRational::from_integer(c.clone()), BigRational::from_integer(0.into()))).collect())
}

/// `∏(X − k)` for `k = 1..=n` with integer coefficients, constant first.
pub fn wilkinson_coeffs(n: i64) -> Vec<BigInt> {
    let mut c: Vec<BigInt> = vec![BigInt::from(1)];
    for k in 1..=n {
        let mut next = vec![BigInt::from(0); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * BigInt::from(k);
        }
        c = next;
    }
    c
}

/// Newton step `f(z)/f′(z)`; beyond the unit circle through the reverse
/// polynomial so that powers stay bounded.
pub fn newton_step<T: Real>(c: &[Complex<T>], z: &Complex<T>) -> Option<Complex<T>> {
    let n = c.len() - 1;
    let zero = Complex::new(T::zero(), T::zero());
    let outside = z.norm_sqr().to_f64() > 1.0;
    if !outside {
        let (mut p, mut dp) = (zero.clone(), zero.clone());
        for a in c.iter().rev() {
            dp = dp * z.clone() + p.clone();
            p = p * z.clone() + a.clone();
        }
        if dp.re.is_zero() && dp.im.is_zero() {
            return None;
        }
        return Some(p / dp);
    }
    // f/f′ = z / (n − w·r′(w)/r(w)) with r the reverse and w = 1/z
    let one = Complex::new(T::one(), T::zero());
    let w = one / z.clone();
    let (mut p, mut dp) = (zero.clone(), zero);
    for a in c.iter() {
        dp = dp * w.clone() + p.clone();
        p = p * w.clone() + a.clone();
    }
    if p.re.is_zero() && p.im.is_zero() {
        return Some(Complex::new(T::zero(), T::zero()));
    }
    let nn = Complex::new(T::from_f64_prec(n as f64, 128), T::zero());
    let den = nn - w * dp / p;
    if den.re.is_zero() && den.im.is_zero() {
        return None;
    }
    Some(z.clone() / den)
}

/// Aberth iteration in f64 with Jacobi (all-at-once) updates, started on
/// one circle of radius `|f_0/f_d|^{1/d}`. Exact zero roots are split off.
pub fn jacobi_aberth_roots(f: &Poly64) -> Vec<C64> {
    let zeros = f.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let c: Vec<C64> = f.coeffs()[zeros..].to_vec();
    let n = c.len() - 1;
    let mut out = vec![C64::new(0.0, 0.0); zeros];
    if n == 0 {
        return out;
    }
    let lead = c[n];
    let monic: Vec<C64> = c.iter().map(|a| a / lead).collect();
    let r0 = (monic[0].norm().ln() / n as f64).exp();
    let mut z: Vec<C64> = (0..n).map(|k| C64::from_polar(r0, std::f64::consts::TAU * k as f64 / n as f64 + 0.4)).collect();
    for _ in 0..2000 {
        let mut moved = 0f64;
        let old = z.clone();
        for k in 0..n {
            let step = match newton_step(&monic, &old[k]) {
                Some(s) => s,
                None => continue,
            };
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += 1.0 / (old[k] - old[j]);
                }
            }
            let w = step / (C64::new(1.0, 0.0) - step * s);
            if w.is_finite() {
                z[k] = old[k] - w;
                moved = moved.max(w.norm() / old[k].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    out.extend(z);
    out
}

/// Newton steps in `T` from each estimate.
pub fn polish<T: Real>(f: &Poly64, roots: &[C64], bits: u32, steps: usize) -> Vec<Complex<T>> {
    let c: Vec<Complex<T>> = f.coeffs().iter().map(|a| Complex::new(T::from_f64_prec(a.re, bits), T::from_f64_prec(a.im, bits))).collect();
    roots
        .iter()
        .map(|r| {
            let mut z = Complex::new(T::from_f64_prec(r.re, bits), T::from_f64_prec(r.im, bits));
            if r.norm() == 0.0 {
                return z;
            }
            for _ in 0..steps {
                match newton_step(&c, &z) {
                    Some(s) => z = z - s,
                    None => break,
                }
            }
            z
        })
        .collect()
}

/// Oracle roots: Jacobi–Aberth in f64, then Newton in double-double.
pub fn oracle_roots(f: &Poly64) -> Vec<C64> {
    let est = jacobi_aberth_roots(f);
    polish::<hcpoly::DoubleDouble>(f, &est, 106, 3).iter().map(|z| C64::new(z.re.to_f64(), z.im.to_f64())).collect()
}

/// Distance in the chart where both points have modulus at most about 1.
pub fn projective_dist(a: C64, b: C64) -> f64 {
    if a.norm() <= 1.0 || b.norm() <= 1.0 {
        (a - b).norm()
    } else {
        (1.0 / a - 1.0 / b).norm()
    }
}

/// Greedy nearest matching; `None` unless every `ours` root gets a
/// distinct oracle root within `tol`.
pub fn match_roots(ours: &[C64], oracle: &[C64], tol: f64) -> Option<f64> {
    if ours.len() != oracle.len() {
        return None;
    }
    let mut used = vec![false; oracle.len()];
    let mut worst = 0f64;
    for z in ours {
        let (j, d) = oracle
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, w)| (j, projective_dist(*z, *w)))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        if d > tol {
            return None;
        }
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

/// Whether two projective disks are disjoint, decided in a chart where
/// both are ordinary disks, or through the exterior image when one holds 0
/// and the other holds ∞.
pub fn projective_disjoint(a: &hcpoly::roots::ProjectiveDisk, b: &hcpoly::roots::ProjectiveDisk) -> bool {
    let apart = |c1: C64, r1: f64, c2: C64, r2: f64| (c1 - c2).norm() > (r1 + r2) * (1.0 + 1e-12);
    if a.inverted == b.inverted {
        return apart(a.center, a.radius, b.center, b.radius);
    }
    let (direct, inv) = if a.inverted { (b, a) } else { (a, b) };
    if let Some((c, r)) = hcpoly::roots::inverse_disk(direct.center, direct.radius) {
        return apart(c, r, inv.center, inv.radius);
    }
    if let Some((c, r)) = inv.plane_disk() {
        return apart(c, r, direct.center, direct.radius);
    }
    // 1/D(c, r) with |c| < r is the exterior of D(−c̄/q, r/q), q = r² − |c|²
    let (c, r) = (direct.center, direct.radius);
    let q = r * r - c.norm_sqr();
    (inv.center + c.conj() / q).norm() + inv.radius < (r / q) * (1.0 - 1e-12)
}

pub fn pairwise_disjoint(disks: &[hcpoly::roots::ProjectiveDisk]) -> bool {
    (0..disks.len()).all(|i| (i + 1..disks.len()).all(|j| projective_disjoint(&disks[i], &disks[j])))
}

/// Membership up to `tol` in the disk's own chart. Certified radii can be
/// below the f64 resolution of an oracle root, so exact membership is not
/// decidable here.
pub fn nearly_contains(disk: &hcpoly::roots::ProjectiveDisk, z: C64, tol: f64) -> bool {
    let x = if disk.inverted { 1.0 / z } else { z };
    (x - disk.center).norm() <= disk.radius + tol
}
