//! Root condition numbers and a lower bound on them read off the root
//! distribution.
//!
//! Values are carried as base-2 logarithms so that Wilkinson-type
//! polynomials stay representable; the linear values saturate to infinity.

use std::f64::consts::E;

use num_complex::Complex;
use serde::{Serialize, Serializer};

use crate::complex_arith::{c_to_f64, ceil_log2, horner_error_bound, horner_eval_d, Poly};
use crate::covering::{build_covering, PointIndex};
use crate::error::{invalid, Result};
use crate::scalar::Real;

/// `4d(τ + ⌈log₂(d+1)⌉)`, the precision cap for root isolation.
///
/// The constant 4 is a safety factor on an asymptotic bound; hitting the
/// cap signals a probably non-squarefree input.
pub fn termination_cap(d: u64, tau: u32) -> u64 {
    if d == 0 {
        return 0;
    }
    4 * d * (tau as u64 + ceil_log2(d + 1) as u64)
}

/// Infinity is written as the string `"inf"`, which JSON cannot express.
fn ext_real<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
    }
}

fn complex_pair<S: Serializer>(z: &Complex<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootCondition {
    #[serde(serialize_with = "complex_pair")]
    pub root: Complex<f64>,
    #[serde(serialize_with = "ext_real")]
    pub log2_kappa1: f64,
    #[serde(serialize_with = "ext_real")]
    pub log2_kappa2: f64,
    /// `‖f‖₁κ₁/|ζ|`; infinite at `ζ = 0`.
    #[serde(serialize_with = "ext_real")]
    pub log2_kappa1_rel: f64,
    /// `‖f‖₂κ₂/|ζ|`.
    #[serde(serialize_with = "ext_real")]
    pub log2_kappa2_rel: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    #[serde(serialize_with = "ext_real")]
    pub kappa1_abs: f64,
    #[serde(serialize_with = "ext_real")]
    pub kappa2_abs: f64,
    #[serde(serialize_with = "ext_real")]
    pub kappa1_rel: f64,
    #[serde(serialize_with = "ext_real")]
    pub kappa2_rel: f64,
    #[serde(serialize_with = "ext_real")]
    pub log2_kappa1_abs: f64,
    #[serde(serialize_with = "ext_real")]
    pub log2_kappa2_abs: f64,
    #[serde(serialize_with = "ext_real")]
    pub log2_kappa1_rel: f64,
    #[serde(serialize_with = "ext_real")]
    pub log2_kappa2_rel: f64,
    pub per_root: Vec<RootCondition>,
}

fn log2_of<T: Real>(x: &T) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let e = x.ilog2();
    e as f64 + x.mul_pow2(-(e as i32)).abs().to_f64().log2()
}

fn log2_cabs<T: Real>(z: &Complex<T>) -> f64 {
    let n = z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone();
    log2_of(&n) / 2.0
}

/// `log₂ Σ_{k=0}^d |ζ|^{2k}` without overflow.
fn log2_power_sum(lz: f64, d: usize) -> f64 {
    if lz == f64::NEG_INFINITY {
        return 0.0;
    }
    if lz <= 0.0 {
        let q = (2.0 * lz).exp2();
        let s: f64 = (0..=d).scan(1.0, |p, _| {
            let v = *p;
            *p *= q;
            Some(v)
        }).sum();
        return s.log2();
    }
    let q = (-2.0 * lz).exp2();
    let s: f64 = (0..=d).scan(1.0, |p, _| {
        let v = *p;
        *p *= q;
        Some(v)
    }).sum();
    2.0 * d as f64 * lz + s.log2()
}

/// `log₂|f′(ζ)|`, or `-∞` when it is below the evaluation error.
fn log2_derivative<T: Real>(f: &Poly<T>, z: &Complex<T>) -> f64 {
    let (_, dp) = horner_eval_d(f, z);
    let unit = f.coeffs().iter().map(|c| c.re.unit_bits()).min().unwrap_or(53);
    let d = f.deg();
    let floor = horner_error_bound(d, d as f64 * f.norm1().to_f64(), c_to_f64(z).norm(), unit);
    if c_to_f64(&dp).norm() <= floor {
        return f64::NEG_INFINITY;
    }
    log2_cabs(&dp)
}

fn root_condition<T: Real>(f: &Poly<T>, z: &Complex<T>, lnorm1: f64, lnorm2: f64) -> RootCondition {
    let d = f.deg();
    let lz = log2_cabs(z);
    let ld = log2_derivative(f, z);
    let (k1, k2) = if ld == f64::NEG_INFINITY {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (d as f64 * lz.max(0.0) - ld, log2_power_sum(lz, d) / 2.0 - ld)
    };
    let (r1, r2) = if lz == f64::NEG_INFINITY { (f64::INFINITY, f64::INFINITY) } else { (lnorm1 + k1 - lz, lnorm2 + k2 - lz) };
    RootCondition { root: c_to_f64(z), log2_kappa1: k1, log2_kappa2: k2, log2_kappa1_rel: r1, log2_kappa2_rel: r2 }
}

/// Local and global condition numbers of `f` at the given roots.
pub fn condition_numbers<T: Real>(f: &Poly<T>, roots: &[Complex<T>]) -> Result<ConditionReport> {
    if f.degree() < 1 {
        return invalid("condition numbers need degree at least 1");
    }
    let lnorm1 = log2_of(&f.norm1());
    let lnorm2 = log2_of(&f.norm2());
    let per_root: Vec<RootCondition> = roots.iter().map(|z| root_condition(f, z, lnorm1, lnorm2)).collect();
    let max = |sel: fn(&RootCondition) -> f64| per_root.iter().map(sel).fold(f64::NEG_INFINITY, f64::max);
    let (l1, l2) = (max(|r| r.log2_kappa1), max(|r| r.log2_kappa2));
    let (lr1, lr2) = (max(|r| r.log2_kappa1_rel), max(|r| r.log2_kappa2_rel));
    Ok(ConditionReport {
        kappa1_abs: l1.exp2(),
        kappa2_abs: l2.exp2(),
        kappa1_rel: lr1.exp2(),
        kappa2_rel: lr2.exp2(),
        log2_kappa1_abs: l1,
        log2_kappa2_abs: l2,
        log2_kappa1_rel: lr1,
        log2_kappa2_rel: lr2,
        per_root,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransposeReport {
    /// `log₂ κ₁ʳ(f, ζ)`.
    pub log2_rel_f: f64,
    /// `log₂ κ₁ʳ(X^d f(1/X), 1/ζ)`.
    pub log2_rel_reversed: f64,
    /// `|log₂` ratio`|` between the two relative values.
    pub log2_gap: f64,
    /// `κ₁(g, 1/ζ) ≤ κ₁(f, ζ)`, only checked for `|ζ| ≥ 1`.
    pub absolute_decreases: Option<bool>,
}

/// Compare the relative condition number at `ζ` with the one of the
/// reverse polynomial at `1/ζ`; the two agree for every nonzero root.
pub fn transpose_check<T: Real>(f: &Poly<T>, zeta: &Complex<T>) -> Result<TransposeReport> {
    if zeta.re.is_zero() && zeta.im.is_zero() {
        return invalid("transpose_check needs a nonzero root");
    }
    if f.degree() < 1 {
        return invalid("transpose_check needs degree at least 1");
    }
    // X^d f(1/X) keeps degree d as a polynomial map only with f(0) ≠ 0;
    // the coefficient vector is reversed in full either way
    let g = Poly::new(f.coeffs().iter().rev().cloned().collect());
    let d = f.deg();
    let mu = crate::eval::invert(zeta);
    let lnorm1 = log2_of(&f.norm1());
    let a = root_condition(f, zeta, lnorm1, 0.0);
    let b = if g.deg() == d {
        root_condition(&g, &mu, lnorm1, 0.0)
    } else {
        // f(0) = 0 drops the degree of the reverse; use the degree-d formula
        let lm = log2_cabs(&mu);
        let ld = log2_derivative(&g, &mu);
        let k1 = d as f64 * lm.max(0.0) - ld;
        RootCondition { root: c_to_f64(&mu), log2_kappa1: k1, log2_kappa2: f64::NAN, log2_kappa1_rel: lnorm1 + k1 - lm, log2_kappa2_rel: f64::NAN }
    };
    let outside = log2_cabs(zeta) >= 0.0;
    Ok(TransposeReport {
        log2_rel_f: a.log2_kappa1_rel,
        log2_rel_reversed: b.log2_kappa1_rel,
        log2_gap: (a.log2_kappa1_rel - b.log2_kappa1_rel).abs(),
        absolute_decreases: outside.then(|| b.log2_kappa1 <= a.log2_kappa1 + 1e-9),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometricBound {
    #[serde(rename = "N")]
    pub n: u32,
    /// Most roots of `f`, or of its reverse, in one covering disk.
    pub m_max: usize,
    #[serde(serialize_with = "ext_real")]
    pub bound: f64,
    pub log2_bound: f64,
    /// The bound's proof covers `m_max ≥ 3` only.
    pub proven: bool,
    /// Roots with `|ζ| < 1/2` or `|ζ| > 2`.
    pub half_disk_m: usize,
    #[serde(serialize_with = "ext_real")]
    pub half_disk_variant: f64,
}

/// `log₂(2^{5m/11}/(4ed√m))`.
fn log2_geometric_bound(d: usize, m: usize) -> f64 {
    let (d, m) = (d as f64, m as f64);
    5.0 * m / 11.0 - (4.0 * E * d * m.sqrt()).log2()
}

/// Lower bound on `κ₁ʳ(f)` from the largest number of roots sharing a
/// disk of the `⌈log₂(3ed)⌉`-ring covering.
pub fn geometric_lower_bound(d: usize, roots: &[Complex<f64>]) -> Result<GeometricBound> {
    if d < 1 {
        return invalid("geometric_lower_bound needs degree at least 1");
    }
    let n = (3.0 * E * d as f64).log2().ceil() as u32;
    let cov = build_covering(n)?;
    let inner: Vec<Complex<f64>> = roots.iter().copied().filter(|z| z.norm() <= 1.0).collect();
    let outer: Vec<Complex<f64>> = roots.iter().filter(|z| z.norm() >= 1.0).map(|z| z.inv()).collect();
    let mut m_max = 0;
    for family in [inner, outer] {
        if family.is_empty() {
            continue;
        }
        let idx = PointIndex::new(&family);
        for disk in cov.disks() {
            m_max = m_max.max(idx.query_disk(disk.center, disk.radius).len());
        }
    }
    let half_disk_m = roots.iter().filter(|z| z.norm() < 0.5 || z.norm() > 2.0).count();
    let log2_bound = if m_max == 0 { f64::NEG_INFINITY } else { log2_geometric_bound(d, m_max) };
    let half = if half_disk_m == 0 {
        0.0
    } else {
        let (df, mf) = (d as f64, half_disk_m as f64);
        (5.0 * mf / 88.0 - (8.0 * E * df * (2.0 * mf).sqrt()).log2()).exp2()
    };
    Ok(GeometricBound {
        n,
        m_max,
        bound: log2_bound.exp2(),
        log2_bound,
        proven: m_max >= 3,
        half_disk_m,
        half_disk_variant: half,
    })
}
