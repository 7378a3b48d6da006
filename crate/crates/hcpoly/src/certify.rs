//! Newton and Kantorovich certificates.
//!
//! Numbers feeding a pass/fail decision are carried as 64-bit [`BigFloat`]s
//! and widened after every operation so that rounding can only turn a
//! pass into a fail, never the reverse.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::complex_arith::{c_to_f64, horner_eval_d, Poly};
use crate::error::{invalid, Error, Result};
use crate::scalar::{BigFloat, Real};

const PREC: u32 = 64;

fn slack_up(x: BigFloat) -> BigFloat {
    let s = x.mul_pow2(-60).abs();
    x + s
}

fn slack_down(x: BigFloat) -> BigFloat {
    let s = x.mul_pow2(-60).abs();
    x - s
}

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

/// `|z|` rounded up.
fn abs_up<T: Real>(z: &Complex<T>) -> BigFloat {
    let (re, im) = (z.re.to_big().with_precision(PREC), z.im.to_big().with_precision(PREC));
    slack_up(slack_up(slack_up(re.clone() * re + im.clone() * im).sqrt()))
}

/// `|z|` rounded down.
fn abs_down<T: Real>(z: &Complex<T>) -> BigFloat {
    let (re, im) = (z.re.to_big().with_precision(PREC), z.im.to_big().with_precision(PREC));
    slack_down(slack_down(slack_down(re.clone() * re + im.clone() * im).sqrt()))
}

/// Upper bound on the Horner rounding error for a polynomial of degree
/// `deg` and 1-norm `norm1` at a point of modulus `xabs`.
fn eval_error<T: Real>(deg: usize, norm1: &T, xabs: f64, unit: u32) -> BigFloat {
    let base = (deg as f64 + 1.0) * xabs.max(1.0).powi(deg as i32) * 2.0;
    slack_up(big(base) * norm1.to_big().with_precision(PREC)).mul_pow2(4 - unit as i32)
}

/// Round up to an `f64`, never to zero for a positive value.
fn f64_up(x: &BigFloat) -> f64 {
    let v = x.to_f64();
    if v <= 0.0 && *x > BigFloat::zero() {
        return f64::from_bits(1);
    }
    v.next_up()
}

fn unit_of<T: Real>(f: &Poly<T>) -> u32 {
    f.coeffs().iter().map(|c| c.re.unit_bits().min(c.im.unit_bits())).min().unwrap_or(53)
}

/// Outcome of the model-level uniqueness test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    /// Upper bound on the Newton step length at `z`.
    pub beta: f64,
    /// Curvature ratio bound.
    #[serde(rename = "K")]
    pub k: f64,
    /// Bound on `|f∘a − g|` and `|(f∘a)′ − g′|` over the unit disk.
    pub eps: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Guarantee {
    ContainsARoot,
    ContainsUniqueRoot,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InclusionDisk<T> {
    pub center: Complex<T>,
    pub radius: f64,
    pub guarantee: Guarantee,
}

/// `D(x, r_k)` with `r_k = (k!·C(d,k)·|f(x)/f^{(k)}(x)|)^{1/k}`, which
/// always contains a root of `f`.
pub fn henrici_radius<T: Real>(f: &Poly<T>, x: &Complex<T>, k: usize) -> Result<InclusionDisk<T>> {
    let d = f.deg();
    if f.degree() < 1 {
        return invalid("henrici_radius needs degree at least 1");
    }
    if k < 1 || k > d {
        return invalid(format!("order k = {k} outside [1, {d}]"));
    }
    let unit = unit_of(f);
    let xabs = c_to_f64(x).norm();
    let fx = f.eval_exact(x);
    let num = slack_up(abs_up(&fx) + eval_error(d, &f.norm1(), xabs, unit));
    let mut dk = f.clone();
    for _ in 0..k {
        dk = dk.derivative();
    }
    let dkx = dk.eval_exact(x);
    let den = slack_down(abs_down(&dkx) - eval_error(dk.deg(), &dk.norm1(), xabs, unit));
    if den <= BigFloat::zero() {
        return invalid(format!("derivative of order {k} vanishes at the point"));
    }
    // k!·C(d,k) = d(d−1)…(d−k+1)
    let mut falling = BigFloat::one().with_precision(PREC);
    for i in 0..k {
        falling = slack_up(falling * big((d - i) as f64));
    }
    let ratio = slack_up(slack_up(num / den) * falling);
    let radius = if k == 1 {
        f64_up(&ratio)
    } else {
        let r = ratio.to_f64();
        if r == 0.0 {
            0.0
        } else {
            // the k-th root of an f64 is within a few ulps
            (r.next_up().powf(1.0 / k as f64) * (1.0 + 1e-14)).next_up()
        }
    };
    Ok(InclusionDisk { center: x.clone(), radius, guarantee: Guarantee::ContainsARoot })
}

/// Kantorovich test at `x`: with `β = |f(x)/f′(x)|` and `K` bounding
/// `|f″/f′(x)|` on `D(x, 2β)`, `2βK ≤ 1` gives a root in `D(x, 2β)`.
///
/// Returns `Ok(None)` when the test is inconclusive.
pub fn kantorovich_existence<T: Real>(f: &Poly<T>, x: &Complex<T>) -> Result<Option<InclusionDisk<T>>> {
    if f.degree() < 1 {
        return invalid("kantorovich_existence needs degree at least 1");
    }
    let unit = unit_of(f);
    let xabs = c_to_f64(x).norm();
    let (fx, dfx) = horner_eval_d(f, x);
    let d = f.deg();
    let err = eval_error(d, &f.norm1(), xabs, unit);
    let derr = slack_up(eval_error(d, &f.norm1(), xabs, unit) * big(2.0 * d as f64));
    let den = slack_down(abs_down(&dfx) - derr);
    if den <= BigFloat::zero() {
        return invalid("derivative vanishes at the point");
    }
    let fx_abs = abs_up(&fx);
    let num = if fx_abs.is_zero() { BigFloat::zero() } else { slack_up(fx_abs + err) };
    let beta = slack_up(num / den.clone());
    // |f″| on D(x, 2β) is at most Σ k(k−1)|f_k|(|x| + 2β)^{k−2}
    let reach = slack_up(abs_up(x) + beta.mul_pow2(1));
    let mut curv = BigFloat::zero().with_precision(PREC);
    for k in (2..=d).rev() {
        let c = slack_up(abs_up(f.coeffs().get(k).expect("k <= degree")) * big((k * (k - 1)) as f64));
        curv = slack_up(slack_up(curv * reach.clone()) + c);
    }
    let big_k = slack_up(curv / den);
    let test = slack_up(beta.mul_pow2(1) * big_k);
    if test > BigFloat::one() {
        return Ok(None);
    }
    Ok(Some(InclusionDisk {
        center: x.clone(),
        radius: if beta.is_zero() { 0.0 } else { f64_up(&beta.mul_pow2(1)) },
        guarantee: Guarantee::ContainsARoot,
    }))
}

/// Uniqueness test for a root `z` of a local model `g` of `f`.
///
/// A pass means `f∘a` has exactly one root in `D(z, 2β)`, and
/// `D(z, 8β)` lies inside the unit disk.
pub fn basin_certificate<T: Real>(g: &Poly<T>, z: &Complex<T>, f_norm1: &T, m: u32, m_tilde: usize) -> Result<Certificate> {
    let zabs_up = abs_up(z);
    if zabs_up > BigFloat::one() && abs_down(z) > BigFloat::one() {
        return invalid("basin_certificate needs |z| <= 1");
    }
    let fn1 = f_norm1.to_big().with_precision(PREC);
    // ε = 3‖f‖₁(m+2)/2^m
    let eps = slack_up(fn1.clone() * big(3.0 * (m as f64 + 2.0))).mul_pow2(-(m as i32));
    let eps_f = f64_up(&eps);
    let fail = |beta: f64, k: f64| Certificate { beta, k, eps: eps_f, pass: false };
    if g.is_zero() {
        return Ok(fail(f64::INFINITY, f64::INFINITY));
    }
    let unit = unit_of(g);
    let (gz, dgz) = horner_eval_d(g, z);
    let deg = g.deg();
    let xabs = c_to_f64(z).norm();
    let err = eval_error(deg, &g.norm1(), xabs, unit);
    let derr = slack_up(err.clone() * big(2.0 * deg.max(1) as f64));
    let dg_lo = slack_down(abs_down(&dgz) - derr);
    let den = slack_down(dg_lo - eps.clone());
    if den <= BigFloat::zero() {
        return Ok(fail(f64::INFINITY, f64::INFINITY));
    }
    let num = slack_up(slack_up(abs_up(&gz) + err) + eps);
    let beta = slack_up(num / den.clone());
    // ‖f‖₁ m̃² 2^{m̃/11}, with the power split into exact and fractional parts
    let mt = m_tilde as f64;
    let whole = (m_tilde / 11) as i32;
    let frac = slack_up(big(2f64.powf((m_tilde % 11) as f64 / 11.0)));
    let curv = slack_up(slack_up(fn1 * big(mt * mt)) * frac).mul_pow2(whole);
    let big_k = slack_up(curv / den);
    let test = slack_up(slack_up(beta.clone() * big_k.clone()) * big(10.0));
    let reach = slack_up(zabs_up + slack_up(beta.mul_pow2(3)));
    let pass = test <= BigFloat::one() && reach <= BigFloat::one();
    Ok(Certificate { beta: f64_up(&beta), k: f64_up(&big_k), eps: eps_f, pass })
}

/// Newton iteration from `x0` until the step `|f(x)/f′(x)|` is at most
/// `2^-target_bits`.
pub fn newton_refine<T: Real>(f: &Poly<T>, x0: &Complex<T>, target_bits: u32, max_iters: usize) -> Result<Complex<T>> {
    if f.degree() < 1 {
        return invalid("newton_refine needs degree at least 1");
    }
    let target = BigFloat::one().with_precision(PREC).mul_pow2(-(target_bits as i32));
    let mut x = x0.clone();
    let mut last = f64::INFINITY;
    for it in 0..=max_iters {
        let (p, dp) = horner_eval_d(f, &x);
        if p.re.is_zero() && p.im.is_zero() {
            return Ok(x);
        }
        let den = dp.re.clone() * dp.re.clone() + dp.im.clone() * dp.im.clone();
        if den.is_zero() {
            return Err(Error::NonConvergence { iterations: it, last_step: last });
        }
        let step = p * dp.conj();
        let step = Complex::new(step.re / den.clone(), step.im / den);
        let len = abs_up(&step);
        last = len.to_f64();
        if len <= target {
            return Ok(x);
        }
        if it == max_iters {
            break;
        }
        x = x - step;
    }
    Err(Error::NonConvergence { iterations: max_iters, last_step: last })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[f64]) -> Poly<f64> {
        Poly::new(cs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn henrici_examples() {
        let f = p(&[-1.0, 0.0, 1.0]);
        let r = henrici_radius(&f, &c(1.1, 0.0), 1).unwrap();
        assert!((r.radius - 0.21 / 1.1).abs() < 1e-12);
        assert!(r.radius >= 0.1);
        let lin = p(&[-0.3, 1.0]);
        let r = henrici_radius(&lin, &c(0.8, 0.2), 1).unwrap();
        assert!((r.radius - c(0.5, 0.2).norm()).abs() < 1e-13);
        let sq = p(&[0.0, 0.0, 1.0]);
        let r = henrici_radius(&sq, &c(1.0, 0.0), 2).unwrap();
        assert!((r.radius - 1.0).abs() < 1e-12 && r.radius >= 1.0);
        assert!(henrici_radius(&sq, &c(0.0, 0.0), 1).is_err());
    }

    #[test]
    fn kantorovich_examples() {
        let f = p(&[-2.0, 0.0, 1.0]);
        let d = kantorovich_existence(&f, &c(1.5, 0.0)).unwrap().unwrap();
        assert!((d.radius - 1.0 / 6.0).abs() < 1e-12);
        assert!((1.5 - 2f64.sqrt()) <= d.radius);
        let x = p(&[0.0, 1.0]);
        let d = kantorovich_existence(&x, &c(0.0, 0.0)).unwrap().unwrap();
        assert_eq!(d.radius, 0.0);
        assert!(kantorovich_existence(&p(&[1.0, 0.0, 1.0]), &c(0.0, 0.0)).is_err());
        // far from any root the test is inconclusive
        assert!(kantorovich_existence(&p(&[1.0, 0.0, 1.0]), &c(0.1, 0.05)).unwrap().is_none());
    }

    #[test]
    fn basin_examples() {
        let g = p(&[-0.01, 1.0]);
        let cert = basin_certificate(&g, &c(0.01, 0.0), &1.0, 60, 1).unwrap();
        assert!(cert.pass);
        assert!(cert.beta < 1e-12);
        assert!(basin_certificate(&g, &c(1.0, 0.5), &1.0, 60, 1).is_err());
        let flat = p(&[0.5, 0.0, 1.0]);
        let cert = basin_certificate(&flat, &c(0.0, 0.0), &1.0, 60, 2).unwrap();
        assert!(!cert.pass);
        assert!(cert.beta.is_infinite());
    }

    #[test]
    fn basin_monotone_in_m() {
        let g = p(&[-0.25, 0.0, 1.0]);
        let z = c(0.5, 0.0);
        let mut passed = false;
        for m in 8..60 {
            let cert = basin_certificate(&g, &z, &1.25, m, 2).unwrap();
            assert!(!passed || cert.pass, "m = {m}");
            passed |= cert.pass;
        }
        assert!(passed);
    }

    #[test]
    fn newton_examples() {
        let f = p(&[-2.0, 0.0, 1.0]);
        let one = newton_refine(&f, &c(1.5, 0.0), 0, 1);
        // a 2^0 target accepts the start point; one step from 1.5 lands on 17/12
        assert_eq!(one.unwrap(), c(1.5, 0.0));
        match newton_refine(&f, &c(1.5, 0.0), 60, 1) {
            Err(Error::NonConvergence { .. }) => {}
            other => panic!("{other:?}"),
        }
        let r = newton_refine(&f, &c(1.5, 0.0), 50, 6).unwrap();
        assert!((r.re - 2f64.sqrt()).abs() < 1e-15);
        let lin = p(&[-0.3, 1.0]);
        let r = newton_refine(&lin, &c(5.0, 1.0), 40, 2).unwrap();
        assert!((r - c(0.3, 0.0)).norm() < 1e-15);
        let sq = p(&[0.0, 0.0, 1.0]);
        match newton_refine(&sq, &c(1.0, 0.0), 50, 20) {
            Err(Error::NonConvergence { iterations, .. }) => assert_eq!(iterations, 20),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn newton_first_iterate() {
        let f = p(&[-2.0, 0.0, 1.0]);
        let (v, dv) = horner_eval_d(&f, &c(1.5, 0.0));
        let x1 = c(1.5, 0.0) - v / dv;
        assert!((x1.re - 17.0 / 12.0).abs() < 1e-15);
    }
}
