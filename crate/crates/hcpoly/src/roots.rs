//! Certified root isolation over the projective line.
//!
//! Every local model of `f` and of its reverse `X^d f(1/X)` is perturbed
//! so its roots stay in a bounded disk, factored numerically, and each
//! root inside the unit disk is put through
//! [`basin_certificate`](crate::certify::basin_certificate). Certified
//! disks are mapped back to the plane, duplicates from overlapping
//! covering disks are merged, and `m` doubles until `d` disks survive.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{basin_certificate, newton_refine};
use crate::complex_arith::{c_at_precision, c_to_f64, cabs, ceil_log2, czero, tau_of, Dft, Poly};
use crate::condition::termination_cap;
use crate::covering::{Rect, RectIndex};
use crate::error::{invalid, Error, Result};
use crate::happrox::{hyperbolic_approximation, required_bits, AffineMap, HyperbolicApproximation};
use crate::scalar::{Backend, Real};
use crate::with_real;

/// A disk, or the image of a disk under `x ↦ 1/x` when `inverted`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectiveDisk {
    pub center: Complex<f64>,
    pub radius: f64,
    pub inverted: bool,
}

impl Serialize for ProjectiveDisk {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ProjectiveDisk", 3)?;
        st.serialize_field("center", &[self.center.re, self.center.im])?;
        st.serialize_field("radius", &self.radius)?;
        st.serialize_field("inverted", &self.inverted)?;
        st.end()
    }
}

impl ProjectiveDisk {
    pub fn contains(&self, z: Complex<f64>) -> bool {
        if self.inverted {
            z != Complex::new(0.0, 0.0) && (z.inv() - self.center).norm() <= self.radius
        } else {
            (z - self.center).norm() <= self.radius
        }
    }

    /// The region as an ordinary plane disk, when it is bounded.
    pub fn plane_disk(&self) -> Option<(Complex<f64>, f64)> {
        if !self.inverted {
            return Some((self.center, self.radius));
        }
        inverse_disk(self.center, self.radius)
    }

    fn plane_rect(&self) -> Rect {
        match self.plane_disk() {
            Some((c, r)) if (c.norm() + r).is_finite() => {
                // the inversion is computed in f64; pad by its rounding error
                let r = r + 8.0 * f64::EPSILON * (c.norm() + r);
                Rect::new(c.re - r, c.im - r, c.re + r, c.im + r)
            }
            _ => Rect::new(-f64::MAX, -f64::MAX, f64::MAX, f64::MAX),
        }
    }
}

/// `{1/x : x ∈ D(c, r)}` for `|c| > r`, which is again a disk.
pub fn inverse_disk(c: Complex<f64>, r: f64) -> Option<(Complex<f64>, f64)> {
    let q = c.norm_sqr() - r * r;
    if q <= 0.0 || !q.is_finite() {
        return None;
    }
    Some((c.conj() / q, r / q))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsolationResult {
    pub disks: Vec<ProjectiveDisk>,
    pub m_final: u32,
    pub iterations: usize,
    /// Newton-refined root in each disk, in plane coordinates.
    #[serde(skip)]
    pub roots: Vec<Complex<f64>>,
}

#[derive(Clone, Copy, Debug)]
pub struct IsolateOptions {
    pub m0: u32,
    /// Defaults to [`termination_cap`].
    pub m_cap: Option<u32>,
}

impl Default for IsolateOptions {
    fn default() -> Self {
        IsolateOptions { m0: 4, m_cap: None }
    }
}

#[derive(Clone, Debug)]
pub struct FactorizationOutput<T> {
    pub roots: Vec<Complex<T>>,
    /// `‖h − c_d∏(X−z_k)‖₁/‖h‖₁`, including a bound on its own rounding.
    pub residual: f64,
}

fn log2_abs<T: Real>(x: &T) -> f64 {
    let e = x.ilog2();
    e as f64 + x.mul_pow2(-(e as i32)).abs().to_f64().log2()
}

fn log2_cabs<T: Real>(z: &Complex<T>) -> f64 {
    let a = cabs(z);
    if a.is_zero() {
        f64::NEG_INFINITY
    } else {
        log2_abs(&a)
    }
}

/// `2·max_k |f_{d−k}/f_d|^{1/k}`, an upper bound on every root modulus.
pub fn fujiwara_bound<T: Real>(f: &Poly<T>) -> Result<f64> {
    if f.degree() < 1 {
        return invalid("fujiwara_bound needs degree at least 1");
    }
    let d = f.deg();
    let lead = log2_cabs(&f.leading());
    let best = (1..=d)
        .map(|k| (log2_cabs(&f.coeff(d - k)) - lead) / k as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(if best == f64::NEG_INFINITY { 0.0 } else { 2.0 * best.exp2() })
}

/// `g + (‖f‖₁/2^m)X^{2m̃}`, whose roots all lie in `D(0, e·2^{m/m̃})`.
pub fn perturb_for_compact_roots<T: Real>(g: &Poly<T>, f_norm1: &T, m: u32, m_tilde: usize) -> Poly<T> {
    let mut cs = g.coeffs().to_vec();
    let k = 2 * m_tilde;
    if cs.len() <= k {
        cs.resize(k + 1, czero());
    }
    cs[k] = cs[k].clone() + Complex::new(f_norm1.mul_pow2(-(m as i32)), T::zero());
    Poly::new(cs)
}

/// Newton correction `p(z)/p′(z)` and whether `p(z)` is at rounding level.
/// Outside the unit circle the reverse polynomial keeps the powers bounded.
fn newton_ratio<T: Real>(c: &[Complex<T>], mags: &[f64], z: &Complex<T>, unit: f64) -> Option<(Complex<T>, bool)> {
    let n = c.len() - 1;
    let zf = c_to_f64(z).norm();
    let inside = zf <= 1.0;
    let (x, order): (Complex<T>, Box<dyn Iterator<Item = usize>>) =
        if inside { (z.clone(), Box::new((0..=n).rev())) } else { (crate::eval::invert(z), Box::new(0..=n)) };
    let xa = if inside { zf } else { 1.0 / zf };
    let (mut p, mut dp): (Complex<T>, Complex<T>) = (czero(), czero());
    let mut mu = 0.0;
    for i in order {
        dp = dp * x.clone() + p.clone();
        p = p * x.clone() + c[i].clone();
        mu = mu * xa + mags[i];
    }
    let small = c_to_f64(&p).norm() <= 8.0 * (n as f64 + 1.0) * unit * mu;
    if inside {
        if dp.re.is_zero() && dp.im.is_zero() {
            return None;
        }
        return Some((p / dp, small));
    }
    let nn = Complex::new(T::from_i64_prec(n as i64, 64), T::zero());
    let den = nn * p.clone() - x * dp;
    if den.re.is_zero() && den.im.is_zero() {
        return None;
    }
    Some((z.clone() * p / den, small))
}

/// One Gauss–Seidel pass of the Aberth–Ehrlich iteration; returns the
/// largest relative correction.
fn aberth_pass<T: Real>(c: &[Complex<T>], mags: &[f64], z: &mut [Complex<T>], done: &mut [bool], unit: f64) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..z.len() {
        if done[k] {
            continue;
        }
        let Some((ratio, small)) = newton_ratio(c, mags, &z[k], unit) else {
            // stationary point: nudge off it
            let bump = T::from_f64_prec(1e-3, 64);
            z[k] = z[k].clone() + Complex::new(bump.clone(), bump);
            worst = f64::INFINITY;
            continue;
        };
        if small {
            done[k] = true;
            continue;
        }
        let mut s: Complex<T> = czero();
        for j in 0..z.len() {
            if j != k {
                let diff = z[k].clone() - z[j].clone();
                if !(diff.re.is_zero() && diff.im.is_zero()) {
                    s = s + diff.inv();
                }
            }
        }
        let one = Complex::new(T::one(), T::zero());
        let den = one - ratio.clone() * s;
        let w = if den.re.is_zero() && den.im.is_zero() { ratio } else { ratio / den };
        let rel = c_to_f64(&w).norm() / c_to_f64(&z[k]).norm().max(1.0);
        worst = worst.max(rel);
        z[k] = z[k].clone() - w;
        if rel <= 4.0 * unit {
            done[k] = true;
        }
    }
    worst
}

/// Initial guesses on circles read off the Newton polygon of `c`.
fn initial_guesses(c: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let n = c.len() - 1;
    let lg: Vec<f64> = c.iter().map(|x| if x.norm() > 0.0 { x.norm().log2() } else { f64::NEG_INFINITY }).collect();
    // upper convex hull of (k, log|c_k|)
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..=n {
        if lg[k] == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b - a) as f64 * (lg[k] - lg[a]) - (k - a) as f64 * (lg[b] - lg[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut z = Vec::with_capacity(n);
    let tau = std::f64::consts::TAU;
    for w in hull.windows(2) {
        let (i, j) = (w[0], w[1]);
        let cnt = j - i;
        let r = ((lg[i] - lg[j]) / cnt as f64).exp2();
        for t in 0..cnt {
            let th = tau * t as f64 / cnt as f64 + tau * (z.len() as f64 + 0.5) / (n as f64 + 1.0) + 0.4;
            z.push(Complex::from_polar(r, th));
        }
    }
    z
}

/// Roots of `h` with `‖h − c_d∏(X−z_k)‖₁ ≤ 2^{-rel_err_bits}‖h‖₁`.
///
/// Aberth–Ehrlich runs in `f64` first and is then polished in `T`; a
/// [`BigFloat`](crate::BigFloat) backend doubles its precision on a failed
/// residual check before giving up.
pub fn approximate_factorization<T: Real>(h: &Poly<T>, rel_err_bits: u32) -> Result<FactorizationOutput<T>> {
    factor_where(h, rel_err_bits, |_| true).expect("unconditional")
}

/// Aberth–Ehrlich in `f64` on a copy of `c` scaled to unit 1-norm; `c`
/// must not vanish at 0.
fn aberth_f64<T: Real>(c: &[Complex<T>]) -> Vec<Complex<f64>> {
    let norm = c.iter().fold(T::zero(), |acc, x| acc + cabs(x));
    let lnorm = log2_abs(&norm).floor() as i32;
    let c64: Vec<Complex<f64>> = c.iter().map(|x| c_to_f64(&Complex::new(x.re.mul_pow2(-lnorm), x.im.mul_pow2(-lnorm)))).collect();
    let mags64: Vec<f64> = c64.iter().map(|x| x.norm()).collect();
    let mut z64 = initial_guesses(&c64);
    let mut done = vec![false; z64.len()];
    for _ in 0..400 {
        aberth_pass(&c64, &mags64, &mut z64, &mut done, f64::EPSILON);
        if done.iter().all(|&d| d) {
            break;
        }
    }
    z64
}

/// [`approximate_factorization`], skipped (`None`) when `wanted` rejects
/// the `f64` root estimates.
pub(crate) fn factor_where<T: Real>(
    h: &Poly<T>,
    rel_err_bits: u32,
    wanted: impl Fn(&[Complex<f64>]) -> bool,
) -> Option<Result<FactorizationOutput<T>>> {
    if h.degree() < 1 {
        return Some(invalid("approximate_factorization needs degree at least 1"));
    }
    let n = h.deg();
    let need = rel_err_bits + 2 * ceil_log2(n as u64 + 1) + 16;
    let mut bits = need;
    let mut hp = h.at_precision(bits);
    let unit_bits = hp.coeffs().iter().map(|c| c.re.unit_bits()).min().unwrap_or(53);
    if unit_bits < need {
        return Some(Err(Error::Precision { needed: need, available: unit_bits }));
    }
    // exact zero roots split off
    let zeros = hp.coeffs().iter().take_while(|c| c.re.is_zero() && c.im.is_zero()).count();
    let mut roots: Vec<Complex<T>> = vec![czero(); zeros];
    if zeros == n {
        return wanted(&vec![Complex::new(0.0, 0.0); n]).then_some(Ok(FactorizationOutput { roots, residual: 0.0 }));
    }

    let z64 = aberth_f64(&hp.coeffs()[zeros..]);
    let estimates: Vec<Complex<f64>> = std::iter::repeat(Complex::new(0.0, 0.0)).take(zeros).chain(z64.iter().copied()).collect();
    if !wanted(&estimates) {
        return None;
    }

    let mut best = f64::INFINITY;
    let mut z: Vec<Complex<T>> = z64.iter().map(|w| Complex::new(T::from_f64_prec(w.re, bits), T::from_f64_prec(w.im, bits))).collect();
    for attempt in 0..3 {
        let c: Vec<Complex<T>> = hp.coeffs()[zeros..].to_vec();
        let mags: Vec<f64> = c.iter().map(|x| c_to_f64(x).norm()).collect();
        let unit = 2f64.powi(-(unit_bits.max(bits) as i32).min(1000));
        let mut done = vec![false; z.len()];
        for _ in 0..60 {
            polish_pass(&c, &mags, &mut z, &mut done, unit);
            if done.iter().all(|&d| d) {
                break;
            }
        }
        let all: Vec<Complex<T>> = roots.iter().cloned().chain(z.iter().cloned()).collect();
        let res = factorization_residual(&hp, &all, bits);
        best = best.min(res);
        if res <= 2f64.powi(-(rel_err_bits as i32)) {
            roots = all;
            return Some(Ok(FactorizationOutput { roots, residual: res }));
        }
        let raised = hp.at_precision(2 * bits);
        let gained = raised.coeffs().iter().map(|c| c.re.unit_bits()).min().unwrap_or(53);
        if attempt == 2 || gained <= unit_bits.max(bits) {
            break;
        }
        bits *= 2;
        hp = raised;
        z = z.iter().map(|w| c_at_precision(w, bits)).collect();
    }
    Some(Err(Error::Factorization { best_residual: best, target_bits: rel_err_bits }))
}

/// [`aberth_pass`] for roots already accurate to `f64` precision: the
/// Newton ratio is tiny, so the interaction sum only needs `f64` accuracy
/// except for pairs too close for `f64` to separate.
fn polish_pass<T: Real>(c: &[Complex<T>], mags: &[f64], z: &mut [Complex<T>], done: &mut [bool], unit: f64) {
    let mut zf: Vec<Complex<f64>> = z.iter().map(c_to_f64).collect();
    for k in 0..z.len() {
        if done[k] {
            continue;
        }
        let Some((ratio, small)) = newton_ratio(c, mags, &z[k], unit) else {
            done[k] = true;
            continue;
        };
        if small {
            done[k] = true;
            continue;
        }
        let near = 1e-6 * zf[k].norm().max(1.0);
        let mut s64 = Complex::new(0.0, 0.0);
        let mut s: Complex<T> = czero();
        for j in 0..z.len() {
            if j == k {
                continue;
            }
            let d64 = zf[k] - zf[j];
            if d64.norm() > near {
                s64 += d64.inv();
            } else {
                let diff = z[k].clone() - z[j].clone();
                if !(diff.re.is_zero() && diff.im.is_zero()) {
                    s = s + diff.inv();
                }
            }
        }
        let s = s + Complex::new(T::from_f64_prec(s64.re, 64), T::from_f64_prec(s64.im, 64));
        let one = Complex::new(T::one(), T::zero());
        let den = one - ratio.clone() * s;
        let w = if den.re.is_zero() && den.im.is_zero() { ratio } else { ratio / den };
        let rel = c_to_f64(&w).norm() / zf[k].norm().max(1.0);
        z[k] = z[k].clone() - w;
        zf[k] = c_to_f64(&z[k]);
        if rel <= 4.0 * unit {
            done[k] = true;
        }
    }
}

/// `‖h − c_d∏(X−z_k)‖₁/‖h‖₁` by interpolating the difference at roots of
/// unity, which avoids expanding the product.
fn factorization_residual<T: Real>(h: &Poly<T>, roots: &[Complex<T>], bits: u32) -> f64 {
    let n = h.deg();
    let len = (n + 1).next_power_of_two();
    let dft = Dft::<T>::new(len, bits);
    let lead = h.leading();
    let unit = 2f64.powi(-(h.coeffs()[n].re.unit_bits() as i32).min(1000));
    let hn = h.norm1().to_f64();
    let zabs: Vec<f64> = roots.iter().map(|z| c_to_f64(z).norm()).collect();
    let points = dft.forward(&{
        let mut e = vec![czero(); len];
        e[1 % len] = Complex::new(T::one(), T::zero());
        e
    });
    // each value with a first-order bound on its rounding error
    let vals: Vec<(Complex<T>, f64)> = points
        .par_iter()
        .map(|w| {
            let wf = c_to_f64(w);
            let hv = h.eval_exact(w);
            let mut pv = lead.clone();
            let mut sens = 2.0 * n as f64 + 2.0;
            for (z, za) in roots.iter().zip(&zabs) {
                pv = pv * (w.clone() - z.clone());
                sens += (1.0 + za) / (wf - c_to_f64(z)).norm().max(f64::MIN_POSITIVE);
            }
            let err = 4.0 * unit * (c_to_f64(&pv).norm() * sens + (n as f64 + 1.0) * hn);
            (hv - pv, err)
        })
        .collect();
    let err: f64 = vals.iter().map(|v| v.1).sum();
    let diff = dft.inverse(&vals.into_iter().map(|v| v.0).collect::<Vec<_>>());
    let num: f64 = diff.iter().map(|c| c_to_f64(c).norm()).sum();
    let transform = dft.aggregate_error_bound(num.max(hn), h.coeffs()[n].re.unit_bits());
    (num + err + transform) / hn
}

/// A certified disk plus what dedupe needs to compare it with others.
#[derive(Clone, Debug)]
pub struct Candidate<T> {
    pub disk: ProjectiveDisk,
    /// Newton-refined root in the disk's own coordinates.
    pub root: Complex<T>,
    /// Canonical order key: family (direct first), ring, index, root.
    pub key: (bool, u32, u64, usize),
}

impl<T: Real> Candidate<T> {
    fn plane_root(&self) -> Option<Complex<f64>> {
        let r = c_to_f64(&self.root);
        if !self.disk.inverted {
            return Some(r);
        }
        if r.norm() == 0.0 {
            return None;
        }
        Some(c_to_f64(&crate::eval::invert(&self.root)))
    }
}

fn same_root<T: Real>(a: &Candidate<T>, b: &Candidate<T>) -> bool {
    if a.disk.inverted == b.disk.inverted {
        let d = c_to_f64(&(a.root.clone() - b.root.clone())).norm();
        return d <= a.disk.radius.max(b.disk.radius);
    }
    let (direct, inv) = if a.disk.inverted { (b, a) } else { (a, b) };
    if inv.root.re.is_zero() && inv.root.im.is_zero() {
        return false;
    }
    match (a.disk.plane_disk(), b.disk.plane_disk()) {
        (Some((_, ra)), Some((_, rb))) => {
            let d = c_to_f64(&(direct.root.clone() - crate::eval::invert(&inv.root))).norm();
            d <= ra.max(rb)
        }
        _ => false,
    }
}

/// Indices of the candidates kept, one per root, in canonical order.
///
/// Candidates are compared only when their plane bounding boxes meet; two
/// certify the same root when their refined roots agree to within the
/// larger radius, since distinct roots are at least twice that apart.
pub fn dedupe_disks<T: Real>(cands: &[Candidate<T>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by_key(|&i| cands[i].key);
    let rects: Vec<Rect> = cands.iter().map(|c| c.disk.plane_rect()).collect();
    let index = RectIndex::new(&rects);
    let mut kept = vec![false; cands.len()];
    let mut out = Vec::new();
    for &i in &order {
        let dup = index
            .query_intersecting(&rects[i])
            .into_iter()
            .any(|j| kept[j] && same_root(&cands[i], &cands[j]));
        if !dup {
            kept[i] = true;
            out.push(i);
        }
    }
    out
}

/// Bits the backend needs at precision parameter `m`.
fn isolation_bits<T: Real>(f: &Poly<T>, m: u32) -> u32 {
    let m_tilde = (m - 1).min(f.deg() as u32) as u64;
    let factor = (1.1 * m as f64).ceil() as u32 + 2 * ceil_log2(2 * m_tilde + 1) + 16;
    required_bits(f, m).max(factor)
}

/// Isolating projective disks for every root of a squarefree `f`.
pub fn isolate_roots<S: Real>(f: &Poly<S>, opts: IsolateOptions) -> Result<IsolationResult> {
    if f.is_zero() {
        return invalid("the zero polynomial has no isolated roots");
    }
    let d = f.deg();
    if d == 0 {
        return Ok(IsolationResult { disks: vec![], m_final: opts.m0, iterations: 0, roots: vec![] });
    }
    if opts.m0 < 2 {
        return invalid("m0 must be at least 2");
    }
    let cap = opts.m_cap.map(u64::from).unwrap_or_else(|| termination_cap(d as u64, tau_of(f)));
    let mut m = opts.m0;
    let mut iterations = 0;
    let mut certified = 0;
    loop {
        // doubling may step over the cap once: the pass at the first m
        // beyond it still runs
        if m as u64 > cap && (m / 2) as u64 >= cap.max(opts.m0 as u64) {
            return Err(Error::NonTermination { m, cap, certified, degree: d });
        }
        iterations += 1;
        let bits = isolation_bits(f, m);
        let (disks, roots) = with_real!(Backend::for_bits(bits), T => isolation_pass::<S, T>(f, m, bits)?);
        certified = disks.len();
        if certified >= d {
            return Ok(IsolationResult { disks, m_final: m, iterations, roots });
        }
        m = m.saturating_mul(2);
    }
}

type Pass = (Vec<ProjectiveDisk>, Vec<Complex<f64>>);

fn isolation_pass<S: Real, T: Real>(f: &Poly<S>, m: u32, bits: u32) -> Result<Pass> {
    let ft: Poly<T> = f.convert::<T>().at_precision(bits);
    let rt = ft.reverse();
    let g = hyperbolic_approximation(&ft, m)?;
    let gs = hyperbolic_approximation(&rt, m)?;
    let fnorm = ft.norm1();
    let mut cands: Vec<Candidate<T>> = Vec::new();
    for (inverted, h, src) in [(false, &g, &ft), (true, &gs, &rt)] {
        let found: Vec<Vec<Candidate<T>>> =
            h.models.par_iter().map(|md| certify_model(h, &md.g, &md.a, src, &fnorm, inverted, bits)).collect();
        cands.extend(found.into_iter().flatten());
    }
    let keep = dedupe_disks(&cands);
    // dedupe only needed radius/16; the reported roots go to near working
    // precision, staying in the certified basin. An incomplete pass is
    // discarded by the caller, so it is not refined.
    let target = bits.saturating_sub(16).max(40);
    for &i in keep.iter().filter(|_| keep.len() >= f.deg()) {
        let src = if cands[i].disk.inverted { &rt } else { &ft };
        if let Ok(z) = newton_refine(src, &cands[i].root, target, 8) {
            cands[i].root = z;
        }
    }
    let disks = keep.iter().map(|&i| cands[i].disk).collect();
    let roots = keep.iter().map(|&i| cands[i].plane_root().unwrap_or(Complex::new(f64::INFINITY, 0.0))).collect();
    Ok((disks, roots))
}

/// `ε` and `‖f‖₁m̃²2^{m̃/11}` of the basin certificate, in `f64`.
fn certificate_constants<T: Real>(fnorm: &T, m: u32, mt: usize) -> (f64, f64) {
    let fl = fnorm.to_f64();
    let eps = 3.0 * fl * (m as f64 + 2.0) * 2f64.powi(-(m as i32));
    let curv = fl * (mt * mt) as f64 * 2f64.powf(mt as f64 / 11.0);
    (eps, curv)
}

/// A certificate needs `10βK ≤ 1` with `β ≥ ε/|g′|` and `K ≥ curv/|g′|`,
/// so `|g′|² ≥ 10·ε·curv`. `Σk|g_k|` bounds `|g′|` on the unit disk; a
/// model failing this cannot certify any root. The factor 1/2 absorbs
/// the `f64` rounding here.
fn model_can_certify<T: Real>(g: &Poly<T>, fnorm: &T, m: u32, mt: usize) -> bool {
    let (eps, curv) = certificate_constants(fnorm, m, mt);
    let dmax: f64 = g.coeffs().iter().enumerate().map(|(k, c)| k as f64 * c_to_f64(c).norm()).sum();
    dmax * dmax >= 0.5 * 10.0 * eps * curv
}

/// [`model_can_certify`] with `|g′(z)|` in place of its unit-disk bound.
fn root_can_certify<T: Real>(g: &Poly<T>, z: &Complex<T>, fnorm: &T, m: u32, mt: usize) -> bool {
    let (eps, curv) = certificate_constants(fnorm, m, mt);
    let zf = c_to_f64(z);
    let gf = g.to_f64();
    let (_, dg) = crate::complex_arith::horner_eval_d(&gf, &zf);
    let err = 4.0 * (g.deg() as f64 + 1.0).powi(2) * gf.norm1() * f64::EPSILON;
    let hi = dg.norm() + err;
    hi * hi >= 0.5 * 10.0 * eps * curv
}

fn certify_model<T: Real>(
    h: &HyperbolicApproximation<T>,
    g: &Poly<T>,
    a: &AffineMap,
    src: &Poly<T>,
    fnorm: &T,
    inverted: bool,
    bits: u32,
) -> Vec<Candidate<T>> {
    let m = h.m;
    let mt = h.m_tilde as usize;
    if g.degree() < 1 {
        return vec![];
    }
    if !model_can_certify(g, fnorm, m, mt) {
        return vec![];
    }
    let hp = perturb_for_compact_roots(g, fnorm, m, mt);
    // only roots inside the unit disk can certify; their f64 estimates
    // are polished one at a time, the certificate making up for the
    // unchecked factorization residual
    let zeros = hp.coeffs().iter().take_while(|c| c.re.is_zero() && c.im.is_zero()).count();
    let mut starts: Vec<Complex<f64>> = if zeros > 0 { vec![Complex::new(0.0, 0.0)] } else { vec![] };
    starts.extend(aberth_f64(&hp.coeffs()[zeros..]).into_iter().filter(|z| z.norm() <= 1.0 + 1e-6));
    let polish_bits = m + 8;
    let roots: Vec<Complex<T>> = starts
        .iter()
        .filter_map(|w| {
            let x0 = Complex::new(T::from_f64_prec(w.re, bits), T::from_f64_prec(w.im, bits));
            if w.re == 0.0 && w.im == 0.0 && zeros > 0 {
                return Some(x0);
            }
            newton_refine(&hp, &x0, polish_bits, 16).ok()
        })
        .collect();
    let unit = 2f64.powi(-(g.coeffs()[0].re.unit_bits() as i32).min(1000));
    let mut out = Vec::new();
    for (j, z) in roots.iter().enumerate() {
        let zf = c_to_f64(z).norm();
        if zf > 1.0 || !root_can_certify(g, z, fnorm, m, mt) {
            continue;
        }
        let Ok(cert) = basin_certificate(g, z, fnorm, m, mt) else { continue };
        if !cert.pass {
            continue;
        }
        // the certificate holds around the exact image a(z); widen it so
        // the f64 center still works and re-test at the widened size
        let ct = a.apply(z, bits);
        let cf = c_to_f64(&ct);
        let round = c_to_f64(&(ct.clone() - Complex::new(T::from_f64_prec(cf.re, bits), T::from_f64_prec(cf.im, bits)))).norm();
        let delta = ((round + 8.0 * unit * (1.0 + cf.norm())) / a.rho).next_up();
        let beta = (cert.beta + 2.0 * delta).next_up();
        let test = (10.0 * beta).next_up() * cert.k;
        if test.next_up() > 1.0 || (zf + 8.0 * beta).next_up() * (1.0 + 4.0 * f64::EPSILON) > 1.0 {
            continue;
        }
        let radius = ((2.0 * cert.beta + 2.0 * delta).next_up() * a.rho).next_up();
        let target = (-(radius / 16.0).log2()).ceil().max(1.0) as u32;
        let root = newton_refine(src, &ct, target, 64).unwrap_or(ct);
        out.push(Candidate {
            disk: ProjectiveDisk { center: cf, radius, inverted },
            root,
            key: (inverted, a.ring, a.index, j),
        });
    }
    out
}

/// Real interval `[lo, hi]` holding exactly one real root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealInterval {
    pub lo: f64,
    pub hi: f64,
}

/// Isolating intervals for the real roots of a real squarefree `f`.
pub fn real_roots<S: Real>(f: &Poly<S>, opts: IsolateOptions) -> Result<Vec<RealInterval>> {
    if f.coeffs().iter().any(|c| !c.im.is_zero()) {
        return invalid("real_roots needs real coefficients");
    }
    let iso = isolate_roots(f, opts)?;
    Ok(real_intervals(&iso))
}

/// The intervals `disk ∩ ℝ` of the disks in `iso` holding a real root.
///
/// For real `f` the conjugate of an isolated root is isolated by the
/// conjugate disk, and two distinct roots are at least two radii apart,
/// so a root is real exactly when its refined value is within half a
/// radius of the axis.
pub fn real_intervals(iso: &IsolationResult) -> Vec<RealInterval> {
    let mut out = Vec::new();
    for (disk, root) in iso.disks.iter().zip(&iso.roots) {
        let (c, r) = match disk.plane_disk() {
            Some(p) => p,
            None => {
                // inverse of a disk around 0: two rays; the refined root picks one
                let s = (disk.radius * disk.radius - disk.center.im * disk.center.im).max(0.0).sqrt();
                let (a, b) = (disk.center.re - s, disk.center.re + s);
                if root.im.abs() > disk.radius {
                    continue;
                }
                out.push(if root.re > 0.0 { RealInterval { lo: 1.0 / b, hi: f64::INFINITY } } else { RealInterval { lo: f64::NEG_INFINITY, hi: 1.0 / a } });
                continue;
            }
        };
        if c.im.abs() > r || root.im.abs() > r / 2.0 {
            continue;
        }
        let s = (r * r - c.im * c.im).max(0.0).sqrt();
        out.push(RealInterval { lo: c.re - s, hi: c.re + s });
    }
    out.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DoubleDouble;

    fn p(cs: &[f64]) -> Poly<f64> {
        Poly::new(cs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    fn pd(cs: &[f64]) -> Poly<DoubleDouble> {
        Poly::new(cs.iter().map(|&c| Complex::new(DoubleDouble::from_f64(c), DoubleDouble::ZERO)).collect())
    }

    #[test]
    fn fujiwara_examples() {
        assert_eq!(fujiwara_bound(&p(&[-3.0, -2.0, 1.0])).unwrap(), 4.0);
        assert_eq!(fujiwara_bound(&p(&[0.0, 0.0, 0.0, 1.0])).unwrap(), 0.0);
        let b = fujiwara_bound(&p(&[0.36, 0.0, 1.0])).unwrap();
        assert!((b - 1.2).abs() < 1e-12);
        assert!(fujiwara_bound(&p(&[2.0])).is_err());
    }

    #[test]
    fn perturb_examples() {
        let h = perturb_for_compact_roots(&Poly::<f64>::zero(), &1.0, 4, 2);
        assert_eq!(h, Poly::monomial(Complex::new(1.0 / 16.0, 0.0), 4));
        let h = perturb_for_compact_roots(&p(&[1.0]), &1.0, 8, 4);
        assert_eq!(h.deg(), 8);
        assert_eq!(h.coeff(8).re, 1.0 / 256.0);
        assert!(fujiwara_bound(&h).unwrap() <= std::f64::consts::E * 4.0);
    }

    #[test]
    fn factorization_examples() {
        let out = approximate_factorization(&pd(&[-1.0, 0.0, 1.0]), 60).unwrap();
        let mut re: Vec<f64> = out.roots.iter().map(|z| z.re.to_f64()).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-15 && (re[1] - 1.0).abs() < 1e-15);
        assert!(out.residual <= 2f64.powi(-60));

        let ks: Vec<Complex<DoubleDouble>> = (1..=10).map(|k| Complex::new(DoubleDouble::from_f64(k as f64) / DoubleDouble::from_f64(10.0), DoubleDouble::ZERO)).collect();
        let h = Poly::from_roots(&ks);
        let out = approximate_factorization(&h, 60).unwrap();
        let mut re: Vec<f64> = out.roots.iter().map(|z| z.re.to_f64()).collect();
        re.sort_by(f64::total_cmp);
        for (k, r) in re.iter().enumerate() {
            assert!((r - (k + 1) as f64 / 10.0).abs() < 1e-10, "{re:?}");
        }

        let cube = approximate_factorization(&pd(&[0.0, 0.0, 0.0, 1.0]), 60).unwrap();
        assert_eq!(cube.residual, 0.0);
        assert!(cube.roots.iter().all(|z| z.re.is_zero() && z.im.is_zero()));

        assert!(matches!(approximate_factorization(&p(&[-1.0, 0.0, 1.0]), 60), Err(Error::Precision { .. })));
    }

    #[test]
    fn isolate_pair() {
        let r = isolate_roots(&p(&[-1.0, 0.0, 1.0]), IsolateOptions::default()).unwrap();
        assert_eq!(r.disks.len(), 2);
        assert!(r.disks.iter().any(|d| d.contains(Complex::new(1.0, 0.0))));
        assert!(r.disks.iter().any(|d| d.contains(Complex::new(-1.0, 0.0))));
        let iv = real_intervals(&r);
        assert_eq!(iv.len(), 2);
        assert!(iv[0].lo <= -1.0 && -1.0 <= iv[0].hi && iv[1].lo <= 1.0 && 1.0 <= iv[1].hi);
    }

    #[test]
    fn no_real_roots() {
        assert!(real_roots(&p(&[1.0, 0.0, 1.0]), IsolateOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn inverse_disk_formula() {
        let (c, r) = inverse_disk(Complex::new(2.0, 0.0), 1.0).unwrap();
        assert!((c - Complex::new(2.0 / 3.0, 0.0)).norm() < 1e-15 && (r - 1.0 / 3.0).abs() < 1e-15);
        assert!(inverse_disk(Complex::new(0.5, 0.0), 1.0).is_none());
    }

    #[test]
    fn dedupe_examples() {
        let mk = |c: f64, r: f64, ring: u32| Candidate {
            disk: ProjectiveDisk { center: Complex::new(c, 0.0), radius: r, inverted: false },
            root: Complex::new(c, 0.0),
            key: (false, ring, 0, 0),
        };
        assert_eq!(dedupe_disks(&[mk(0.5, 0.01, 0), mk(0.5, 0.01, 1)]), vec![0]);
        assert_eq!(dedupe_disks(&[mk(0.5, 0.01, 0), mk(0.7, 0.01, 1)]), vec![0, 1]);
        // nested disks around one root: the canonical first survives
        assert_eq!(dedupe_disks(&[mk(0.5001, 0.001, 2), mk(0.5, 0.01, 1)]), vec![1]);
    }
}
