//! Hyperbolic approximations: one low-degree model `g ≈ f∘a` per disk of a
//! hyperbolic covering, where `a(X) = (γ + ρX)e^{2πik/K}` maps the unit
//! disk onto the covering disk.
//!
//! A ring is processed in one batch. Writing `f(YZ)` modulo `Z^K − 1`
//! splits `f` into residue polynomials `p_s` with `f(YZ) ≡ Σ_s p_s(Y^K) Y^s Z^s`,
//! so after substituting `Y = γ + ρX` every model of the ring is the value
//! at `Z = ω^k` of one polynomial in `Z` whose coefficients are series in
//! `X`. That last step is a length-`K` DFT per coefficient.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex_arith::{
    c_at_precision, ceil_log2, cscale2, czero, tau_of, working_precision, Dft, Poly,
};
use crate::covering::{build_covering, HyperbolicCovering};
use crate::error::{invalid, Error, Result};
use crate::scalar::{BigFloat, Real};

/// `a(X) = (γ + ρX)·e^{2πi·index/k_count}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub ring: u32,
    pub index: u64,
    #[serde(rename = "K")]
    pub k_count: u64,
    pub gamma: f64,
    pub rho: f64,
}

impl AffineMap {
    pub fn rotation<T: Real>(&self, bits: u32) -> Complex<T> {
        let (c, s) = T::cis_frac(self.index, self.k_count, bits);
        Complex::new(c, s)
    }

    pub fn apply<T: Real>(&self, x: &Complex<T>, bits: u32) -> Complex<T> {
        let g = T::from_f64_prec(self.gamma, bits);
        let r = T::from_f64_prec(self.rho, bits);
        let y = Complex::new(g + r.clone() * x.re.clone(), r * x.im.clone());
        y * self.rotation::<T>(bits)
    }

    /// `a⁻¹(y) = (y·e^{-2πik/K} − γ)/ρ`.
    pub fn inverse<T: Real>(&self, y: &Complex<T>, bits: u32) -> Complex<T> {
        let z = c_at_precision(y, bits) * self.rotation::<T>(bits).conj();
        let g = T::from_f64_prec(self.gamma, bits);
        let r = T::from_f64_prec(self.rho, bits);
        Complex::new((z.re - g) / r.clone(), z.im / r)
    }

    /// `a` as a degree-one polynomial.
    pub fn as_poly<T: Real>(&self, bits: u32) -> Poly<T> {
        let w = self.rotation::<T>(bits);
        let g = T::from_f64_prec(self.gamma, bits);
        let r = T::from_f64_prec(self.rho, bits);
        Poly::new(vec![w.clone() * g, w * r])
    }
}

#[derive(Clone, Debug)]
pub struct LocalModel<T> {
    pub g: Poly<T>,
    pub a: AffineMap,
}

impl<T: Real> PartialEq for LocalModel<T> {
    fn eq(&self, o: &Self) -> bool {
        self.g == o.g && self.a == o.a
    }
}

#[derive(Clone, Debug)]
pub struct HyperbolicApproximation<T> {
    pub models: Vec<LocalModel<T>>,
    pub m: u32,
    pub m_tilde: u32,
    pub degree: usize,
    pub bits: u32,
    pub source_norm1: f64,
    covering: HyperbolicCovering,
    offsets: Vec<usize>,
}

impl<T: Real> HyperbolicApproximation<T> {
    #[allow(non_snake_case)]
    pub fn N(&self) -> u32 {
        self.covering.N()
    }

    pub fn covering(&self) -> &HyperbolicCovering {
        &self.covering
    }

    pub fn model(&self, ring: u32, index: u64) -> &LocalModel<T> {
        &self.models[self.offsets[ring as usize] + index as usize]
    }

    pub fn model_id(&self, ring: u32, index: u64) -> usize {
        self.offsets[ring as usize] + index as usize
    }
}

/// `⌈log₂(3ed/m̃)⌉`; a constant polynomial uses the ratio `d/m̃ = 1`.
pub fn ring_count(d: usize, m_tilde: u32) -> u32 {
    let ratio = if d == 0 { 1.0 } else { d as f64 / m_tilde as f64 };
    (3.0 * std::f64::consts::E * ratio).log2().ceil() as u32
}

/// Degree at which ring `n` truncates `f`.
pub fn truncation_degree(n: u32, m: u32, rings: u32, d: usize) -> usize {
    if n + 1 >= rings {
        return d;
    }
    // ln 2 · 8/3 is irrational, so the ceiling is never at a tie
    let x = 8.0 / 3.0 * std::f64::consts::LN_2 * (m as f64 + 1.0) * 2f64.powi(n as i32);
    if x > d as f64 + 1.0 {
        return d;
    }
    d.min(x.ceil() as usize - 1)
}

fn delivered_bits<T: Real>(bits: u32) -> u32 {
    T::from_i64_prec(1, bits).unit_bits()
}

/// Mantissa bits [`hyperbolic_approximation`] needs for `f` and `m`.
pub fn required_bits<T: Real>(f: &Poly<T>, m: u32) -> u32 {
    working_precision(f.deg() as u64, tau_of(f), m)
}

/// The `m`-hyperbolic approximation `H_{d,m}(f)`, computed in `T`.
pub fn hyperbolic_approximation<T: Real>(f: &Poly<T>, m: u32) -> Result<HyperbolicApproximation<T>> {
    if m < 2 {
        return invalid(format!("precision parameter m = {m} must be at least 2"));
    }
    if f.is_zero() {
        return invalid("zero polynomial has no hyperbolic approximation");
    }
    let d = f.deg();
    let bits = required_bits(f, m);
    let available = delivered_bits::<T>(bits);
    if available < bits {
        return Err(Error::Precision { needed: bits, available });
    }
    let m_tilde = (m - 1).min(d as u32);
    let rings = ring_count(d, m_tilde);
    let covering = build_covering(rings)?;

    // scale so that ‖f‖₁ ∈ [1, 2); powers of two keep this exact
    let shift = f.norm1().ilog2() as i32;
    let fs: Vec<Complex<T>> = f.coeffs().iter().map(|c| cscale2(&c_at_precision(c, bits), -shift)).collect();
    let l = m_tilde as usize + 1;

    let per_ring: Vec<Result<Vec<Poly<T>>>> = covering
        .rings()
        .par_iter()
        .map(|ring| {
            let dn = truncation_degree(ring.n, m, rings, d);
            ring_models(&fs[..=dn], ring.gamma, ring.rho, ring.k as usize, l, bits)
        })
        .collect();

    let mut models = Vec::with_capacity(covering.total_disks() as usize);
    let mut offsets = Vec::with_capacity(rings as usize);
    for (ring, gs) in covering.rings().iter().zip(per_ring) {
        offsets.push(models.len());
        for (k, g) in gs?.into_iter().enumerate() {
            let a = AffineMap { ring: ring.n, index: k as u64, k_count: ring.k, gamma: ring.gamma, rho: ring.rho };
            models.push(LocalModel { g: g.scale_pow2(shift), a });
        }
    }
    Ok(HyperbolicApproximation {
        models,
        m,
        m_tilde,
        degree: d,
        bits,
        source_norm1: f.norm1().to_f64(),
        covering,
        offsets,
    })
}

/// Coefficients `j` handled by one parallel task. Fixed so that the
/// summation order, and hence every output bit, is independent of the
/// thread count.
const CHUNK: usize = 1024;

/// The `K` models of one ring, for truncated coefficients `p`.
fn ring_models<T: Real>(p: &[Complex<T>], gamma: f64, rho: f64, kk: usize, l: usize, bits: u32) -> Result<Vec<Poly<T>>> {
    let g = T::from_f64_prec(gamma, bits);
    let r = T::from_f64_prec(rho, bits);
    let used = kk.min(p.len());

    // r_s = p_s((γ+ρX)^K)·(γ+ρX)^s = Σ_i f_{s+iK} (γ+ρX)^{s+iK} mod X^l. The
    // powers have positive real coefficients, so stepping them one degree at
    // a time costs O(l) per coefficient of f and loses no accuracy to
    // cancellation.
    let chunks: Vec<Vec<Vec<Complex<T>>>> = (0..p.len().div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(p.len());
            let mut pw = real_pow(&g, &r, lo, l);
            let mut out = Vec::with_capacity(hi - lo);
            for fj in &p[lo..hi] {
                out.push(pw.iter().map(|v| Complex::new(fj.re.clone() * v.clone(), fj.im.clone() * v.clone())).collect());
                step_linear(&mut pw, &g, &r);
            }
            out
        })
        .collect();
    let zero = czero::<T>();
    let mut rs: Vec<Vec<Complex<T>>> = vec![vec![zero.clone(); l]; used];
    for (j, term) in chunks.into_iter().flatten().enumerate() {
        let acc = &mut rs[j % kk];
        for (a, t) in acc.iter_mut().zip(term) {
            *a = a.clone() + t;
        }
    }

    if used == 1 {
        // only r_0 survives and every model equals it
        return Ok(vec![Poly::new(rs.swap_remove(0)); kk]);
    }
    // g_{k,ℓ} = Σ_s r_{s,ℓ} ω^{sk}
    let plan = Dft::<T>::new(kk, bits);
    let cols: Vec<Vec<Complex<T>>> = (0..l)
        .into_par_iter()
        .map(|ell| {
            let mut col = vec![zero.clone(); kk];
            for (s, r) in rs.iter().enumerate() {
                col[s] = r[ell].clone();
            }
            plan.forward(&col)
        })
        .collect();
    Ok((0..kk).map(|k| Poly::new(cols.iter().map(|c| c[k].clone()).collect())).collect())
}

/// `P ← P·(γ + ρX) mod X^l` in place.
fn step_linear<T: Real>(pw: &mut [T], g: &T, r: &T) {
    for i in (1..pw.len()).rev() {
        pw[i] = g.clone() * pw[i].clone() + r.clone() * pw[i - 1].clone();
    }
    pw[0] = g.clone() * pw[0].clone();
}

/// `(γ + ρX)^e mod X^l` by binary powering.
fn real_pow<T: Real>(g: &T, r: &T, mut e: usize, l: usize) -> Vec<T> {
    let mul = |a: &[T], b: &[T]| -> Vec<T> {
        let mut out = vec![T::zero(); l];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate().take(l - i) {
                out[i + j] = out[i + j].clone() + x.clone() * y.clone();
            }
        }
        out
    };
    let mut acc = vec![T::zero(); l];
    acc[0] = T::one();
    let mut base = vec![T::zero(); l];
    base[0] = g.clone();
    if l > 1 {
        base[1] = r.clone();
    }
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
        }
    }
    acc
}

/// Worst relative slack of the local coefficient bounds
/// `|c_k| ≤ ‖f‖₁(m̃/2k)^k` for `k ≤ m̃` and `‖f‖₁/2^k` beyond, where
/// `f∘a = Σ c_k X^k` is formed in full.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientReport {
    pub worst_margin: f64,
    pub worst_k: usize,
    pub holds: bool,
}

pub fn local_coefficient_bounds<T: Real>(f: &Poly<T>, model: &LocalModel<T>, m_tilde: u32, bits: u32) -> CoefficientReport {
    let a = model.a.as_poly::<T>(bits);
    let full = f.at_precision(bits).compose_exact(&a);
    let norm = f.norm1().to_f64();
    let mt = m_tilde as f64;
    // rounding in the composition is far below the margins checked here
    let slack = norm * 2f64.powi(-(bits as i32) + 2 * ceil_log2(f.deg() as u64 + 2) as i32);
    let mut worst = (f64::INFINITY, 0usize);
    for (k, c) in full.coeffs().iter().enumerate() {
        let bound = if k == 0 {
            norm
        } else if k as f64 <= mt {
            norm * (mt / (2.0 * k as f64)).powi(k as i32)
        } else {
            norm * 2f64.powi(-(k as i32))
        };
        let v = c.norm_sqr().to_f64().sqrt();
        let margin = (bound + slack - v) / bound;
        if margin < worst.0 {
            worst = (margin, k);
        }
    }
    CoefficientReport { worst_margin: worst.0, worst_k: worst.1, holds: worst.0 >= 0.0 }
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    #[serde(flatten)]
    a: AffineMap,
    g: Vec<[String; 2]>,
}

#[derive(Serialize, Deserialize)]
struct ApproxRecord {
    schema_version: u32,
    m: u32,
    m_tilde: u32,
    degree: usize,
    bits: u32,
    #[serde(rename = "N")]
    n: u32,
    source_norm1: f64,
    models: Vec<ModelRecord>,
}

impl<T: Real> HyperbolicApproximation<T> {
    /// JSON with exact decimal coefficients.
    pub fn to_json(&self) -> serde_json::Value {
        let rec = ApproxRecord {
            schema_version: SCHEMA_VERSION,
            m: self.m,
            m_tilde: self.m_tilde,
            degree: self.degree,
            bits: self.bits,
            n: self.N(),
            source_norm1: self.source_norm1,
            models: self
                .models
                .iter()
                .map(|md| ModelRecord {
                    a: md.a.clone(),
                    g: md
                        .g
                        .coeffs()
                        .iter()
                        .map(|c| [c.re.to_big().to_exact_decimal(), c.im.to_big().to_exact_decimal()])
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_value(rec).expect("plain data serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let rec: ApproxRecord = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        if rec.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema_version {}", rec.schema_version)));
        }
        let covering = build_covering(rec.n)?;
        if rec.models.len() as u64 != covering.total_disks() {
            return Err(Error::Parse(format!(
                "{} models for a covering of {} disks",
                rec.models.len(),
                covering.total_disks()
            )));
        }
        let parse = |s: &str| -> Result<T> {
            let b = BigFloat::parse_decimal(s, rec.bits.max(64) + 64).map_err(Error::Parse)?;
            Ok(T::from_big(&b))
        };
        let mut models = Vec::with_capacity(rec.models.len());
        for mr in rec.models {
            let mut cs = Vec::with_capacity(mr.g.len());
            for [re, im] in &mr.g {
                cs.push(Complex::new(parse(re)?, parse(im)?));
            }
            models.push(LocalModel { g: Poly::new(cs), a: mr.a });
        }
        let mut offsets = Vec::new();
        let mut acc = 0;
        for r in covering.rings() {
            offsets.push(acc);
            acc += r.k as usize;
        }
        Ok(HyperbolicApproximation {
            models,
            m: rec.m,
            m_tilde: rec.m_tilde,
            degree: rec.degree,
            bits: rec.bits,
            source_norm1: rec.source_norm1,
            covering,
            offsets,
        })
    }
}
