//! Approximate multipoint evaluation through a hyperbolic approximation.
//!
//! Each point `x` is sent to the local model of its covering disk and
//! evaluated there as `g(a⁻¹(x))`. With `H_{d,m+2}(f)` the result is within
//! `‖f‖₁2^{-m}` of `f(x)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::complex_arith::{c_to_f64, czero, horner_error_bound, Poly};
use crate::error::{Error, Result};
use crate::happrox::{hyperbolic_approximation, HyperbolicApproximation, LocalModel};
use crate::scalar::Real;

/// Which local model produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelRef {
    /// Evaluated through the reverse polynomial at `1/x`.
    pub reversed: bool,
    pub ring: u32,
    pub index: u64,
}

#[derive(Clone, Debug)]
pub struct EvalResult<T> {
    pub values: Vec<Complex<T>>,
    pub model_of: Vec<ModelRef>,
}

/// Approximations keyed by `(digest of f, m)`.
#[derive(Default)]
pub struct EvalCache<T> {
    map: HashMap<(u64, usize, u32), Arc<HyperbolicApproximation<T>>>,
}

impl<T: Real> EvalCache<T> {
    pub fn new() -> Self {
        EvalCache { map: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `H_{d,m}(f)`, built on first use.
    pub fn get(&mut self, f: &Poly<T>, m: u32) -> Result<Arc<HyperbolicApproximation<T>>> {
        let key = (f.digest(), f.coeffs().len(), m);
        if let Some(h) = self.map.get(&key) {
            return Ok(h.clone());
        }
        let h = Arc::new(hyperbolic_approximation(f, m)?);
        self.map.insert(key, h.clone());
        Ok(h)
    }
}

fn modulus_sq<T: Real>(x: &Complex<T>) -> T {
    x.re.clone() * x.re.clone() + x.im.clone() * x.im.clone()
}

/// `g(z_j)` for every `z_j`, each within `2^{-err_bits}` when the backend
/// precision allows it.
pub fn batch_local_eval<T: Real>(model: &LocalModel<T>, locals: &[Complex<T>], err_bits: u32) -> Result<Vec<Complex<T>>> {
    let g = &model.g;
    if g.is_zero() {
        return Ok(vec![czero(); locals.len()]);
    }
    if g.deg() == 0 {
        return Ok(vec![g.coeff(0); locals.len()]);
    }
    let unit = g.coeffs().iter().map(|c| c.re.unit_bits()).min().unwrap_or(53);
    let norm = g.norm1().to_f64();
    let target = 2f64.powi(-(err_bits as i32));
    let chunk = g.deg().max(1);
    let mut out = Vec::with_capacity(locals.len());
    for part in locals.chunks(chunk) {
        for z in part {
            let zabs = c_to_f64(z).norm();
            let bound = horner_error_bound(g.deg(), norm, zabs, unit + 4);
            if bound > target {
                let needed = unit + (bound / target).log2().ceil() as u32;
                return Err(Error::Precision { needed, available: unit });
            }
            out.push(g.eval_exact(z));
        }
    }
    Ok(out)
}

/// Inner error target `‖g‖₁2^{-12m/11-2}` expressed in bits.
fn inner_bits<T: Real>(g: &Poly<T>, m: u32) -> u32 {
    let lg = if g.is_zero() { 0.0 } else { g.norm1().to_f64().log2() };
    (12.0 * m as f64 / 11.0 + 2.0 - lg).ceil().max(1.0) as u32
}

/// `f(x_i)` for points in the closed unit disk, each within `‖f‖₁2^{-m}`.
pub fn multipoint_eval<T: Real>(f: &Poly<T>, points: &[Complex<T>], m: u32) -> Result<EvalResult<T>> {
    let mut cache = EvalCache::new();
    multipoint_eval_cached(&mut cache, f, points, m)
}

pub fn multipoint_eval_cached<T: Real>(
    cache: &mut EvalCache<T>,
    f: &Poly<T>,
    points: &[Complex<T>],
    m: u32,
) -> Result<EvalResult<T>> {
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let one = T::one();
    for (i, x) in points.iter().enumerate() {
        if modulus_sq(x) > one {
            return Err(Error::OutOfDomain { index: i, modulus: c_to_f64(x).norm() });
        }
    }
    if f.is_zero() {
        return Ok(EvalResult {
            values: vec![czero(); points.len()],
            model_of: vec![ModelRef { reversed: false, ring: 0, index: 0 }; points.len()],
        });
    }
    let h = cache.get(f, m + 2)?;
    eval_with(&h, points, m, false)
}

/// Evaluate through an existing approximation `h` built with `m + 2`.
pub fn eval_with<T: Real>(h: &HyperbolicApproximation<T>, points: &[Complex<T>], m: u32, reversed: bool) -> Result<EvalResult<T>> {
    let cov = h.covering();
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut model_of = Vec::with_capacity(points.len());
    for (i, x) in points.iter().enumerate() {
        let mut xf = c_to_f64(x);
        let r = xf.norm();
        if r > 1.0 {
            // inside in exact arithmetic, outside only after rounding to f64
            xf /= r;
        }
        let d = cov.owner(xf).map_err(|_| Error::OutOfDomain { index: i, modulus: r })?;
        groups.entry(h.model_id(d.ring, d.index)).or_default().push(i);
        model_of.push(ModelRef { reversed, ring: d.ring, index: d.index });
    }
    let bits = h.bits;
    let parts: Vec<Result<(Vec<usize>, Vec<Complex<T>>)>> = groups
        .into_par_iter()
        .map(|(id, idx)| {
            let md = &h.models[id];
            let locals: Vec<Complex<T>> = idx.iter().map(|&i| md.a.inverse(&points[i], bits)).collect();
            let vals = batch_local_eval(md, &locals, inner_bits(&md.g, m))?;
            Ok((idx, vals))
        })
        .collect();
    let mut values = vec![czero(); points.len()];
    for p in parts {
        let (idx, vals) = p?;
        for (i, v) in idx.into_iter().zip(vals) {
            values[i] = v;
        }
    }
    Ok(EvalResult { values, model_of })
}

/// `f(x)` for `|x| <= 1` and `f(x)/x^d` beyond, each within `‖f‖₁2^{-m}`.
pub fn eval_extended<T: Real>(f: &Poly<T>, points: &[Complex<T>], m: u32) -> Result<EvalResult<T>> {
    let one = T::one();
    let (mut inside, mut outside) = (Vec::new(), Vec::new());
    for (i, x) in points.iter().enumerate() {
        if modulus_sq(x) > one {
            outside.push(i);
        } else {
            inside.push(i);
        }
    }
    let mut values = vec![czero(); points.len()];
    let mut model_of = vec![ModelRef { reversed: false, ring: 0, index: 0 }; points.len()];
    let mut scatter = |idx: &[usize], r: EvalResult<T>| {
        for (k, &i) in idx.iter().enumerate() {
            values[i] = r.values[k].clone();
            model_of[i] = r.model_of[k];
        }
    };
    if !inside.is_empty() {
        let pts: Vec<Complex<T>> = inside.iter().map(|&i| points[i].clone()).collect();
        scatter(&inside, multipoint_eval(f, &pts, m)?);
    }
    if !outside.is_empty() {
        let rev = f.reverse();
        let pts: Vec<Complex<T>> = outside.iter().map(|&i| invert(&points[i])).collect();
        let mut r = multipoint_eval(&rev, &pts, m)?;
        for mr in &mut r.model_of {
            mr.reversed = true;
        }
        scatter(&outside, r);
    }
    Ok(EvalResult { values, model_of })
}

pub(crate) fn invert<T: Real>(x: &Complex<T>) -> Complex<T> {
    let n = modulus_sq(x);
    Complex::new(x.re.clone() / n.clone(), -(x.im.clone() / n))
}
