mod common;

use hcpoly::condition::{condition_numbers, geometric_lower_bound, termination_cap, transpose_check};
use hcpoly::{BigFloat, Complex, DoubleDouble, Poly, Real, C64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;

const SLACK: f64 = 1e-9;

fn dd_roots(f: &hcpoly::Poly64) -> Vec<Complex<DoubleDouble>> {
    common::polish::<DoubleDouble>(f, &common::jacobi_aberth_roots(f), 106, 3)
}

#[test]
fn sandwich_and_geometric_bound_on_random_polynomials() {
    let mut rng = common::rng(51);
    let mut proven = 0;
    for _ in 0..500 {
        let d = rng.gen_range(1..=30);
        let f = common::random_poly(d, &mut rng);
        let roots = dd_roots(&f);
        let rep = condition_numbers(&f.convert::<DoubleDouble>(), &roots).unwrap();
        let (k1, k2) = (rep.log2_kappa1_abs, rep.log2_kappa2_abs);
        assert!(k1 <= k2 + SLACK, "d={d}");
        assert!(k2 <= k1 + 0.5 * ((d + 1) as f64).log2() + SLACK, "d={d}");
        for r in &rep.per_root {
            assert!(r.log2_kappa1 <= r.log2_kappa2 + SLACK);
        }
        let plain: Vec<C64> = roots.iter().map(|z| C64::new(z.re.to_f64(), z.im.to_f64())).collect();
        let g = geometric_lower_bound(d, &plain).unwrap();
        if g.proven {
            proven += 1;
            assert!(g.log2_bound <= rep.log2_kappa1_rel + SLACK, "d={d}: {} > {}", g.log2_bound, rep.log2_kappa1_rel);
        }
        if g.half_disk_m > 0 {
            assert!(g.half_disk_variant.log2() <= rep.log2_kappa1_rel + SLACK);
        }
    }
    assert!(proven > 0);
}

fn wilkinson(n: i64, scale_log2: i32) -> Poly<BigFloat> {
    let cs = common::wilkinson_coeffs(n);
    let s = BigRational::from_integer(BigInt::from(2).pow(scale_log2 as u32));
    Poly::new(
        cs.iter()
            .map(|c| Complex::new(BigFloat::from_rational(&(BigRational::from_integer(c.clone()) / s.clone()), 512), BigFloat::from_f64_prec(0.0, 512)))
            .collect(),
    )
}

fn int_roots(n: i64) -> Vec<Complex<BigFloat>> {
    (1..=n).map(|k| Complex::new(BigFloat::from_i64_prec(k, 512), BigFloat::from_f64_prec(0.0, 512))).collect()
}

/// `max_k k^n/((k−1)!(n−k)!)` exactly; `|f′(k)| = (k−1)!(n−k)!` for `∏(X−j)`.
fn wilkinson_log2_kappa1(n: i64) -> f64 {
    let fact = |m: i64| (1..=m).fold(BigInt::from(1), |a, j| a * j);
    (1..=n)
        .map(|k| {
            let q = BigRational::new(BigInt::from(k).pow(n as u32), fact(k - 1) * fact(n - k));
            q.abs().to_f64().unwrap().log2()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn wilkinson_20_matches_the_rational_oracle() {
    let want = wilkinson_log2_kappa1(20);
    assert!((want - 35.2).abs() < 0.05, "{want}");
    let rep = condition_numbers(&wilkinson(20, 0), &int_roots(20)).unwrap();
    assert!((rep.log2_kappa1_abs - want).abs() < 1e-9, "{} vs {want}", rep.log2_kappa1_abs);
    assert!(rep.log2_kappa1_rel > 40.0);
    let plain: Vec<C64> = (1..=20).map(|k| C64::new(k as f64, 0.0)).collect();
    let g = geometric_lower_bound(20, &plain).unwrap();
    assert!(g.log2_bound <= rep.log2_kappa1_rel);
}

#[test]
fn scaling_leaves_relative_condition_unchanged() {
    let a = condition_numbers(&wilkinson(30, 0), &int_roots(30)).unwrap();
    let b = condition_numbers(&wilkinson(30, 100), &int_roots(30)).unwrap();
    assert!((a.log2_kappa1_rel - b.log2_kappa1_rel).abs() < 1e-9);
    assert!((b.log2_kappa1_abs - a.log2_kappa1_abs - 100.0).abs() < 1e-9);
}

#[test]
fn transpose_symmetry() {
    let mut rng = common::rng(52);
    for _ in 0..50 {
        let d = rng.gen_range(2..=25);
        let f = common::random_poly(d, &mut rng);
        let fd = f.convert::<DoubleDouble>();
        for z in dd_roots(&f) {
            let t = transpose_check(&fd, &z).unwrap();
            assert!(t.log2_gap.abs() <= 2f64.powi(-30), "d={d}: {}", t.log2_gap);
        }
    }
}

#[test]
fn termination_cap_formula() {
    assert_eq!(termination_cap(0, 5), 0);
    assert_eq!(termination_cap(1, 1), 4 * (1 + 1));
    assert_eq!(termination_cap(100, 3), 4 * 100 * (3 + 7));
}
