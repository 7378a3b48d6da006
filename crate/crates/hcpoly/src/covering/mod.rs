//! Hyperbolic coverings of the closed unit disk.
//!
//! Ring `n` spans radii `[1 − 2^{-n}, 1 − 2^{-(n+1)}]` (the last ring reaches
//! the unit circle) and holds `K_n` equal disks centred on the circle of
//! radius `γ_n`, each of radius `ρ_n = 3/4` of the ring width.

mod index;

use std::f64::consts::PI;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::{BigFloat, Real};

pub use index::{PointIndex, Rect, RectIndex};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ring {
    pub n: u32,
    pub r_lo: f64,
    pub r_hi: f64,
    pub gamma: f64,
    pub rho: f64,
    #[serde(rename = "K")]
    pub k: u64,
}

impl Ring {
    fn build(n: u32, last: bool) -> Ring {
        let r_lo = 1.0 - 2f64.powi(-(n as i32));
        let r_hi = if last { 1.0 } else { 1.0 - 2f64.powi(-(n as i32) - 1) };
        let k = if n == 0 { 4 } else { ring_count(n, last) };
        // all four values are dyadic and exact in f64 for n < 50
        Ring { n, r_lo, r_hi, gamma: (r_lo + r_hi) / 2.0, rho: 0.75 * (r_hi - r_lo), k }
    }

    pub fn center(&self, k: u64) -> Complex<f64> {
        let (c, s) = f64::cis_frac(k, self.k, 53);
        Complex::new(self.gamma * c, self.gamma * s)
    }

    /// Centre at an arbitrary backend precision.
    pub fn center_at<T: Real>(&self, k: u64, bits: u32) -> Complex<T> {
        let (c, s) = T::cis_frac(k, self.k, bits);
        let g = T::from_f64_prec(self.gamma, bits);
        Complex::new(g.clone() * c, g * s)
    }

    pub fn disk(&self, k: u64) -> CoveringDisk {
        CoveringDisk { ring: self.n, index: k, center: self.center(k), radius: self.rho }
    }
}

/// `K_n = ⌈3π/√5 · r_{n+1}/ρ_n⌉`, which simplifies to
/// `⌈π(2^{n+3} − 4)/√5⌉` inside and `⌈π 2^{n+2}/√5⌉` on the last ring.
fn ring_count(n: u32, last: bool) -> u64 {
    let a = if last { 2f64.powi(n as i32 + 2) } else { 2f64.powi(n as i32 + 3) - 4.0 };
    let x = PI * a / 5f64.sqrt();
    if (x - x.round()).abs() > 1e-6 * x.max(1.0) {
        return x.ceil() as u64;
    }
    let bits = 256;
    let big = BigFloat::pi(bits) * BigFloat::from_f64(a, bits) / BigFloat::from_f64(5.0, bits).sqrt();
    let t = big.trunc();
    let t64 = t.to_f64() as u64;
    if t == big {
        t64
    } else {
        t64 + 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoveringDisk {
    pub ring: u32,
    pub index: u64,
    pub center: Complex<f64>,
    pub radius: f64,
}

impl CoveringDisk {
    pub fn contains(&self, x: Complex<f64>) -> bool {
        (x - self.center).norm() <= self.radius
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicCovering {
    n: u32,
    rings: Vec<Ring>,
    total: u64,
}

pub fn build_covering(n: u32) -> Result<HyperbolicCovering> {
    if n == 0 {
        return invalid("covering needs at least one ring");
    }
    if n > 48 {
        return invalid(format!("covering with {n} rings exceeds f64 ring geometry"));
    }
    let rings: Vec<Ring> = (0..n).map(|i| Ring::build(i, i + 1 == n)).collect();
    let total = rings.iter().map(|r| r.k).sum();
    Ok(HyperbolicCovering { n, rings, total })
}

/// Signed angular gap between `theta` and the centre angle of disk `k`.
fn angle_gap(theta: f64, k: u64, kk: u64) -> f64 {
    let c = 2.0 * PI * k as f64 / kk as f64;
    let mut g = (theta - c).rem_euclid(2.0 * PI);
    if g > PI {
        g -= 2.0 * PI;
    }
    g.abs()
}

impl HyperbolicCovering {
    #[allow(non_snake_case)]
    pub fn N(&self) -> u32 {
        self.n
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn ring(&self, n: u32) -> &Ring {
        &self.rings[n as usize]
    }

    pub fn total_disks(&self) -> u64 {
        self.total
    }

    /// Every disk in ring-major, index-minor order.
    pub fn disks(&self) -> impl Iterator<Item = CoveringDisk> + '_ {
        self.rings.iter().flat_map(|r| (0..r.k).map(move |k| r.disk(k)))
    }

    /// Indices of ring `r` whose angle lies within `half` of `theta`, padded
    /// by one index on each side.
    fn window(r: &Ring, theta: f64, half: f64) -> Vec<u64> {
        let kk = r.k;
        let step = 2.0 * PI / kk as f64;
        let w = (half / step).ceil() as i64 + 1;
        if 2 * w + 1 >= kk as i64 {
            return (0..kk).collect();
        }
        let mid = (theta / step).round() as i64;
        let mut v: Vec<u64> = (mid - w..=mid + w).map(|j| j.rem_euclid(kk as i64) as u64).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// All disks containing `x`, canonical owner first: lowest ring, then
    /// smallest angular gap, then smallest index.
    pub fn locate_disks(&self, x: Complex<f64>) -> Result<Vec<CoveringDisk>> {
        let m = x.norm();
        if !(m <= 1.0) {
            return Err(Error::OutOfDomain { index: 0, modulus: m });
        }
        let theta = x.im.atan2(x.re);
        let mut out = Vec::new();
        for r in &self.rings {
            if m < r.gamma - r.rho || m > r.gamma + r.rho {
                continue;
            }
            let half = (r.rho / r.gamma).min(1.0).asin();
            let mut hit: Vec<(f64, u64)> = Self::window(r, theta, half)
                .into_iter()
                .map(|k| (k, r.disk(k)))
                .filter(|(_, d)| d.contains(x))
                .map(|(k, _)| (angle_gap(theta, k, r.k), k))
                .collect();
            hit.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            out.extend(hit.into_iter().map(|(_, k)| r.disk(k)));
        }
        if out.is_empty() {
            // unreachable for |x| <= 1 since the rings cover the disk
            return Err(Error::OutOfDomain { index: 0, modulus: m });
        }
        Ok(out)
    }

    /// The first disk returned by [`locate_disks`](Self::locate_disks).
    pub fn owner(&self, x: Complex<f64>) -> Result<CoveringDisk> {
        Ok(self.locate_disks(x)?.swap_remove(0))
    }

    /// Disks whose open interiors meet the interior of `disk`.
    pub fn neighbors(&self, disk: &CoveringDisk) -> Vec<CoveringDisk> {
        let me = self.ring(disk.ring);
        let theta = 2.0 * PI * disk.index as f64 / me.k as f64;
        let lo = disk.ring.saturating_sub(1);
        let hi = (disk.ring + 1).min(self.n - 1);
        let mut out = Vec::new();
        for r in &self.rings[lo as usize..=hi as usize] {
            let reach = me.rho + r.rho;
            if (me.gamma - r.gamma).abs() >= reach {
                continue;
            }
            let c = (me.gamma * me.gamma + r.gamma * r.gamma - reach * reach) / (2.0 * me.gamma * r.gamma);
            let half = c.clamp(-1.0, 1.0).acos();
            for k in Self::window(r, theta, half) {
                if r.n == disk.ring && k == disk.index {
                    continue;
                }
                let d = r.disk(k);
                if (d.center - disk.center).norm() < reach {
                    out.push(d);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "N": self.n,
            "rings": self.rings.iter().map(|r| serde_json::json!({
                "n": r.n, "gamma": r.gamma, "rho": r.rho, "K": r.k,
            })).collect::<Vec<_>>(),
        })
    }

    /// Unit circle plus every disk, in a 512-pixel square.
    pub fn to_svg(&self) -> String {
        let s = 512.0;
        let tx = |v: f64| 256.0 + 200.0 * v;
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n\
             <circle cx=\"256\" cy=\"256\" r=\"200\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n"
        );
        for d in self.disks() {
            out.push_str(&format!(
                "<circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"{:.4}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"0.4\"/>\n",
                tx(d.center.re),
                tx(-d.center.im),
                200.0 * d.radius
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}
