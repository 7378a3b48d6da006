mod common;

use hcpoly::roots::{isolate_roots, real_roots, IsolateOptions, IsolationResult};
use hcpoly::{Error, Poly64, C64};

fn isolate(f: &Poly64) -> IsolationResult {
    isolate_roots(f, IsolateOptions::default()).unwrap()
}

#[test]
fn gaussian_roots_are_isolated_and_accurate() {
    for &(d, seed) in &[(10, 1), (10, 2), (40, 3), (40, 4), (100, 5)] {
        let f = common::gaussian_poly(d, &mut common::rng(seed));
        let iso = isolate(&f);
        assert_eq!(iso.disks.len(), d, "d={d} seed={seed}");
        assert!(common::pairwise_disjoint(&iso.disks), "d={d} seed={seed}");
        let oracle = common::oracle_roots(&f);
        for z in &oracle {
            let res = common::horner_f64_bounded(f.coeffs(), *z).0.norm();
            assert_eq!(iso.disks.iter().filter(|k| common::nearly_contains(k, *z, 1e-12)).count(), 1, "d={d} seed={seed} oracle root {z} |f|={res:e}");
        }
        for (disk, r) in iso.disks.iter().zip(&iso.roots) {
            assert!(common::nearly_contains(disk, *r, 1e-14));
        }
        let worst = common::match_roots(&iso.roots, &oracle, 2f64.powi(-25));
        assert!(worst.is_some(), "d={d} seed={seed}");
    }
}

#[test]
fn roots_of_very_different_moduli() {
    let roots = [C64::new(1e-3, 0.0), C64::new(0.0, -0.7), C64::new(5.0, 1.0), C64::new(-100.0, 0.0), C64::new(0.9, 0.4)];
    let f = Poly64::from_roots(&roots);
    let iso = isolate(&f);
    assert_eq!(iso.disks.len(), roots.len());
    for z in &roots {
        assert_eq!(iso.disks.iter().filter(|k| common::nearly_contains(k, *z, 1e-12)).count(), 1, "{z}");
    }
    assert!(iso.disks.iter().any(|k| k.inverted));
}

#[test]
fn reversal_inverts_the_roots() {
    let f = common::gaussian_poly(30, &mut common::rng(7));
    let a = isolate(&f);
    let b = isolate(&f.reverse());
    let inv: Vec<C64> = a.roots.iter().map(|z| 1.0 / z).collect();
    assert!(common::match_roots(&b.roots, &inv, 1e-10).is_some());
}

#[test]
fn precision_doubles_each_pass() {
    let f = common::gaussian_poly(20, &mut common::rng(8));
    let iso = isolate(&f);
    let m0 = IsolateOptions::default().m0;
    assert!(iso.m_final >= m0 && (iso.m_final / m0).is_power_of_two() && iso.m_final % m0 == 0);
    assert_eq!(iso.iterations as u32, (iso.m_final / m0).trailing_zeros() + 1);
}

#[test]
fn same_disks_across_runs_and_threads() {
    let f = common::gaussian_poly(150, &mut common::rng(9));
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let iso = pool.install(|| isolate(&f));
        (serde_json::to_string(&iso).unwrap(), iso.roots)
    };
    let one = run(1);
    assert_eq!(one, run(1));
    assert_eq!(one, run(4));
}

#[test]
fn cap_and_degenerate_inputs() {
    let double = Poly64::from_roots(&[C64::new(0.5, 0.0), C64::new(0.5, 0.0)]);
    let r = isolate_roots(&double, IsolateOptions { m0: 4, m_cap: Some(16) });
    assert!(matches!(r, Err(Error::NonTermination { .. })), "{r:?}");
    let line = Poly64::from_real(vec![-3.0, 1.0]);
    let iso = isolate(&line);
    assert_eq!(iso.disks.len(), 1);
    assert!((iso.roots[0] - C64::new(3.0, 0.0)).norm() < 1e-12);
}

#[test]
fn real_root_intervals() {
    let f = Poly64::from_real(vec![0.0, -4.0, 0.0, 1.0]);
    let iv = real_roots(&f, IsolateOptions::default()).unwrap();
    assert_eq!(iv.len(), 3);
    for (i, want) in [-2.0, 0.0, 2.0].iter().enumerate() {
        assert!(iv[i].lo <= *want && *want <= iv[i].hi, "{:?}", iv[i]);
    }
    // T₅ has five real roots cos((2k+1)π/10)
    let t5 = Poly64::from_real(vec![0.0, 5.0, 0.0, -20.0, 0.0, 16.0]);
    let iv = real_roots(&t5, IsolateOptions::default()).unwrap();
    assert_eq!(iv.len(), 5);
    for k in 0..5 {
        let x = ((2 * k + 1) as f64 * std::f64::consts::PI / 10.0).cos();
        assert_eq!(iv.iter().filter(|i| i.lo <= x && x <= i.hi).count(), 1);
    }
    // X² + 1 has none
    assert!(real_roots(&Poly64::from_real(vec![1.0, 0.0, 1.0]), IsolateOptions::default()).unwrap().is_empty());
    let complex = Poly64::new(vec![C64::new(0.0, 1.0), C64::new(1.0, 0.0)]);
    assert!(real_roots(&complex, IsolateOptions::default()).is_err());
}
