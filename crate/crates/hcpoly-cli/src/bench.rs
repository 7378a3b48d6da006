//! Seeded timing runs: random Gaussian polynomial, random points in the
//! unit disk, fast evaluation against Horner in f64 and a high-precision
//! Horner oracle on a sample.

use std::path::Path;
use std::time::Instant;

use hcpoly::complex_arith::{c_convert, horner_eval, tau_of, working_precision, PrecisionContext};
use hcpoly::eval::{multipoint_eval_cached, EvalCache};
use hcpoly::{with_real, Backend, BigFloat, Complex, Poly, Poly64, Real, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::CliError;

/// Points checked against the oracle per degree.
const ORACLE_SAMPLE: usize = 64;
const ORACLE_BITS: u32 = 200;

/// Complex Gaussian coefficients scaled to `‖f‖₁ ≈ 1`.
pub fn gaussian_poly(d: usize, rng: &mut ChaCha8Rng) -> Poly64 {
    let cs: Vec<C64> = (0..=d).map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let s: f64 = cs.iter().map(|c| c.norm()).sum();
    Poly::new(cs.into_iter().map(|c| c / s).collect())
}

/// Uniform in the closed unit disk.
pub fn disk_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..n)
        .map(|_| {
            let r: f64 = rng.gen::<f64>().sqrt();
            let t: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            let z = C64::from_polar(r, t);
            if z.norm() > 1.0 { z / z.norm() } else { z }
        })
        .collect()
}

fn one_degree(d: usize, m: u32, seed: u64, rng: &mut ChaCha8Rng, dump: Option<&Path>) -> Result<Value, CliError> {
    let f = gaussian_poly(d, rng);
    if let Some(dir) = dump {
        let path = dir.join(format!("gaussian_d{d}_seed{seed}.json"));
        let text = crate::io::polynomial_to_json(&f.convert()).to_string();
        std::fs::write(&path, text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    }
    let pts = disk_points(d.max(1), rng);
    let bits = working_precision(d as u64, tau_of(&f), m + 2);

    let t = Instant::now();
    let ctx = PrecisionContext::new(53)?;
    let naive: Vec<C64> = pts.iter().map(|x| horner_eval(&f, x, &ctx)).collect();
    let horner_s = t.elapsed().as_secs_f64();

    let (build_s, eval_s, fast) = with_real!(Backend::for_bits(bits), T => {
        let ft: Poly<T> = f.convert();
        let pt: Vec<Complex<T>> = pts.iter().map(|z| c_convert::<f64, T>(z)).collect();
        let mut cache = EvalCache::new();
        let t = Instant::now();
        cache.get(&ft, m + 2)?;
        let build_s = t.elapsed().as_secs_f64();
        let t = Instant::now();
        let r = multipoint_eval_cached(&mut cache, &ft, &pt, m)?;
        let eval_s = t.elapsed().as_secs_f64();
        (build_s, eval_s, r.values.iter().map(|v| Complex::new(v.re.to_big(), v.im.to_big())).collect::<Vec<_>>())
    });

    let fb: Poly<BigFloat> = Poly::new(f.coeffs().iter().map(|c| Complex::new(BigFloat::from_f64_prec(c.re, ORACLE_BITS), BigFloat::from_f64_prec(c.im, ORACLE_BITS))).collect());
    let octx = PrecisionContext::new(ORACLE_BITS)?;
    let (mut fast_err, mut naive_err) = (0f64, 0f64);
    let step = (pts.len() / ORACLE_SAMPLE).max(1);
    for i in (0..pts.len()).step_by(step) {
        let x = Complex::new(BigFloat::from_f64_prec(pts[i].re, ORACLE_BITS), BigFloat::from_f64_prec(pts[i].im, ORACLE_BITS));
        let y = horner_eval(&fb, &x, &octx);
        let e = |v: &Complex<BigFloat>| {
            let (a, b) = (v.re.clone() - y.re.clone(), v.im.clone() - y.im.clone());
            (a.clone() * a + b.clone() * b).sqrt().to_f64()
        };
        fast_err = fast_err.max(e(&fast[i]));
        let n = Complex::new(BigFloat::from_f64_prec(naive[i].re, 64), BigFloat::from_f64_prec(naive[i].im, 64));
        naive_err = naive_err.max(e(&n));
    }
    let norm1 = f.norm1();
    Ok(json!({
        "degree": d,
        "points": pts.len(),
        "bits": bits,
        "build_seconds": build_s,
        "eval_seconds": eval_s,
        "horner_f64_seconds": horner_s,
        "oracle_points": pts.len().div_ceil(step),
        "max_error": fast_err,
        "error_bound": norm1 * 2f64.powi(-(m as i32)),
        "horner_f64_max_error": naive_err,
    }))
}

pub fn run(degrees: &[usize], m: u32, seed: u64, dump: Option<&Path>) -> Result<Value, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let runs = degrees.iter().map(|&d| one_degree(d, m, seed, &mut rng, dump)).collect::<Result<Vec<_>, _>>()?;
    Ok(json!({ "m": m, "seed": seed, "runs": runs }))
}
