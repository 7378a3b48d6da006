mod common;

use hcpoly::complex_arith::{fft_roots_of_unity, horner_eval, poly_compose_mod, poly_mul_truncated, working_precision};
use hcpoly::{BigFloat, Complex, DoubleDouble, Error, Poly, Poly64, PolyQ, PrecisionContext, Real, C64};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn to_q(f: &Poly64) -> PolyQ {
    Poly::new(f.coeffs().iter().map(|c| Complex::new(common::rational(c.re), common::rational(c.im))).collect())
}

fn qnorm1_diff(a: &Poly64, b: &PolyQ) -> f64 {
    let n = a.coeffs().len().max(b.coeffs().len());
    let zero = Complex::new(BigRational::from_integer(0.into()), BigRational::from_integer(0.into()));
    (0..n)
        .map(|k| {
            let x = a.coeffs().get(k).copied().unwrap_or_default();
            let y = b.coeffs().get(k).cloned().unwrap_or_else(|| zero.clone());
            let re = (common::rational(x.re) - y.re).to_f64().unwrap();
            let im = (common::rational(x.im) - y.im).to_f64().unwrap();
            re.hypot(im)
        })
        .sum()
}

#[test]
fn truncated_product_meets_its_bound() {
    let mut rng = common::rng(3);
    for &(df, dg, bits) in &[(3, 5, 40), (40, 30, 36), (100, 150, 30), (300, 7, 30)] {
        let f = common::random_poly(df, &mut rng);
        let g = common::random_poly(dg, &mut rng);
        let h = poly_mul_truncated(&f, &g, bits).unwrap();
        assert_eq!(h.deg(), df + dg);
        let exact = to_q(&f).mul_exact(&to_q(&g));
        let e = qnorm1_diff(&h, &exact);
        assert!(e <= 2f64.powi(-(bits as i32)), "deg {df}x{dg}: {e:e}");
    }
}

#[test]
fn truncated_product_in_double_double() {
    let mut rng = common::rng(4);
    let f = common::random_poly(120, &mut rng);
    let g = common::random_poly(90, &mut rng);
    let (fd, gd): (Poly<DoubleDouble>, Poly<DoubleDouble>) = (f.convert(), g.convert());
    let h = poly_mul_truncated(&fd, &gd, 80).unwrap();
    let exact = common::to_big(&f, 512).mul_exact(&common::to_big(&g, 512));
    let e: f64 = h.coeffs().iter().zip(exact.coeffs()).map(|(a, b)| common::dist(&Complex::new(a.re.to_big(), a.im.to_big()), b)).sum();
    assert!(e <= 2f64.powi(-80), "{e:e}");
}

#[test]
fn unreachable_error_is_a_precision_error() {
    let f = Poly64::new(vec![C64::new(1.0, 0.0); 200]);
    assert!(matches!(poly_mul_truncated(&f, &f, 60), Err(Error::Precision { .. })));
    assert!(matches!(fft_roots_of_unity(&f, 64, 60), Err(Error::Precision { .. })));
}

#[test]
fn roots_of_unity_match_horner() {
    let mut rng = common::rng(5);
    let f = common::random_poly(37, &mut rng);
    let fd: Poly<DoubleDouble> = f.convert();
    let fb = common::to_big(&f, 256);
    let ctx = PrecisionContext::new(256).unwrap();
    for k in 1..=256usize {
        let vals = fft_roots_of_unity(&fd, k, 80).unwrap();
        assert_eq!(vals.len(), k);
        for (j, v) in vals.iter().enumerate() {
            let (c, s) = BigFloat::cis_frac(j as u64, k as u64, 256);
            let y = horner_eval(&fb, &Complex::new(c, s), &ctx);
            let e = common::dist(&Complex::new(v.re.to_big(), v.im.to_big()), &y);
            assert!(e <= 2f64.powi(-80), "K={k} j={j}: {e:e}");
        }
    }
}

#[test]
fn composition_matches_exact_truncation() {
    let mut rng = common::rng(6);
    for &(df, dg, trunc) in &[(10, 1, 11), (25, 3, 9), (40, 1, 16)] {
        let f = common::random_poly(df, &mut rng);
        // keep ‖g‖₁ ≤ 1 so the powers stay bounded
        let g0 = common::gaussian_poly(dg, &mut rng);
        let g = g0.scale(&C64::new(0.9 / g0.norm1(), 0.0));
        let h = poly_compose_mod(&f, &g, trunc, 36).unwrap();
        let mut exact = to_q(&f).compose_exact(&to_q(&g));
        exact = exact.truncate(trunc);
        assert!(h.coeffs().len() <= trunc);
        let e = qnorm1_diff(&h, &exact);
        assert!(e <= 2f64.powi(-36), "{df}∘{dg} mod X^{trunc}: {e:e}");
    }
}

#[test]
fn working_precision_examples() {
    assert_eq!(working_precision(1, 1, 1), 53);
    assert_eq!(working_precision(1000, 1, 30), 30 + 1 + 10 + 32);
    assert!(working_precision(4096, 1, 30) <= working_precision(4096, 1, 31));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_linear_in_f(seed in 0u64..1000, df in 1usize..20, trunc in 1usize..12) {
        let mut rng = common::rng(seed);
        let f1 = common::random_poly(df, &mut rng);
        let f2 = common::random_poly(df, &mut rng);
        let g = Poly64::new(vec![C64::new(0.3, 0.1), C64::new(0.5, -0.2)]);
        let a = poly_compose_mod(&f1.add(&f2), &g, trunc, 40).unwrap();
        let b = poly_compose_mod(&f1, &g, trunc, 40).unwrap().add(&poly_compose_mod(&f2, &g, trunc, 40).unwrap());
        let diff: f64 = a.sub(&b).coeffs().iter().map(|c| c.norm()).sum();
        prop_assert!(diff <= 3.0 * 2f64.powi(-40));
    }

    #[test]
    fn higher_precision_is_never_worse(seed in 0u64..1000, d in 1usize..60) {
        let mut rng = common::rng(seed);
        let f = common::random_poly(d, &mut rng);
        let g = common::random_poly(d, &mut rng);
        let exact = common::to_big(&f, 512).mul_exact(&common::to_big(&g, 512));
        let err = |h: Vec<Complex<BigFloat>>| -> f64 { h.iter().zip(exact.coeffs()).map(|(a, b)| common::dist(a, b)).sum() };
        let h64 = poly_mul_truncated(&f, &g, 30).unwrap();
        let hdd = poly_mul_truncated(&f.convert::<DoubleDouble>(), &g.convert(), 80).unwrap();
        let e64 = err(h64.coeffs().iter().map(|c| Complex::new(c.re.to_big(), c.im.to_big())).collect());
        let edd = err(hdd.coeffs().iter().map(|c| Complex::new(c.re.to_big(), c.im.to_big())).collect());
        prop_assert!(edd <= e64 + 1e-300);
    }
}
