//! Library results checked against small independent re-derivations.

use approx::assert_relative_eq;
use num_complex::Complex64;
use scma::codebook::build_from_design;
use scma::link::{transmit, ChannelSample};
use scma::metrics::{self, MonteCarloOptions};
use scma::mother_constellation::{dimension_energy, mpd_closed_form, MotherConstellation};
use scma::signature::SignatureTemplate;
use scma::{reference_codebooks, CodebookSet, DesignPoint};

/// Plain O(N^2) scan over all superimposed points.
fn naive_med(set: &CodebookSet) -> f64 {
    let d = set.dims();
    let n = (d.order as u64).pow(d.users as u32);
    let points: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            let mut rest = i;
            let mut x = vec![Complex64::new(0.0, 0.0); d.resources];
            for j in (0..d.users).rev() {
                let m = (rest % d.order as u64) as usize;
                rest /= d.order as u64;
                let cb = set.codebook(j);
                for (k, xk) in x.iter_mut().enumerate() {
                    *xk += cb.entry(k, m);
                }
            }
            x
        })
        .collect();
    let mut best = f64::INFINITY;
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            let d2: f64 = points[a].iter().zip(&points[b]).map(|(p, q)| (p - q).norm_sqr()).sum();
            best = best.min(d2);
        }
    }
    best.sqrt()
}

fn small_set() -> CodebookSet {
    let t = SignatureTemplate::builtin("S4x6").unwrap();
    let point = DesignPoint {
        energies: vec![2.4, 1.5, 2.1],
        phases: vec![0.7, 2.0, 0.2],
        omega: 2.6,
    };
    build_from_design(&t, 4, &point).unwrap()
}

#[test]
fn dimension_energy_matches_row_sums() {
    assert_relative_eq!(dimension_energy(4, 2.0).unwrap(), 10.0);
    assert_relative_eq!(dimension_energy(16, 2.0).unwrap(), 408.0);
    assert!((dimension_energy(4, 3.4756).unwrap() - 26.158).abs() < 0.01);
    for (m, w) in [(4, 1.3), (8, 2.7), (16, 5.5)] {
        let mc = MotherConstellation::new(m, w).unwrap();
        for r in 0..2 {
            let sum: f64 = mc.row(r).iter().map(|x| x * x).sum();
            assert_relative_eq!(sum, dimension_energy(m, w).unwrap(), max_relative = 1e-12);
        }
    }
}

#[test]
fn closed_form_examples() {
    assert!((mpd_closed_form(4, 3.4756).unwrap() - 11.080).abs() < 0.01);
    assert_relative_eq!(mpd_closed_form(4, 5.0).unwrap(), 20.0);
    assert_relative_eq!(mpd_closed_form(16, 1.5).unwrap(), 1.0);
    assert_relative_eq!(MotherConstellation::new(4, 2.0).unwrap().mpd_brute_force(), 3.0);
}

#[test]
fn mother_constellation_rows() {
    let mc = MotherConstellation::new(4, 2.0).unwrap();
    assert_eq!(mc.row(0), &[2.0, 1.0, -1.0, -2.0]);
    assert_eq!(mc.row(1), &[-1.0, 2.0, -2.0, 1.0]);
    let mc = MotherConstellation::new(8, 2.0).unwrap();
    assert_eq!(mc.row(0), &[4.0, 3.0, 2.0, 1.0, -1.0, -2.0, -3.0, -4.0]);
}

#[test]
fn exact_med_agrees_with_naive_scan() {
    let set = small_set();
    let naive = naive_med(&set);
    let fast = metrics::med_exact(&set).unwrap().value;
    assert_relative_eq!(fast, naive, max_relative = 1e-12);

    let a = reference_codebooks("A_4x6_M4").unwrap();
    assert_relative_eq!(metrics::med_exact(&a).unwrap().value, naive_med(&a), max_relative = 1e-12);
}

#[test]
fn med_scales_linearly() {
    let set = small_set();
    let base = metrics::med_exact(&set).unwrap().value;
    for s in [0.5, 3.0] {
        let v = metrics::med_exact(&set.scaled(s)).unwrap().value;
        assert_relative_eq!(v, s * base, max_relative = 1e-12);
    }
}

#[test]
fn monte_carlo_never_below_exact() {
    let a = reference_codebooks("A_4x6_M4").unwrap();
    let exact = metrics::med_exact(&a).unwrap().value;
    for seed in 0..5 {
        let mc = metrics::med_monte_carlo(&a, MonteCarloOptions::new(500, 3, seed)).unwrap().value;
        assert!(mc >= exact - 1e-12, "seed {seed}: {mc} < {exact}");
    }
    // 4096 points fit in one batch of 5000, so the estimate is exact.
    let mc = metrics::med_monte_carlo(&a, MonteCarloOptions::new(5000, 20, 1)).unwrap().value;
    assert_relative_eq!(mc, exact, max_relative = 1e-12);
}

#[test]
fn weakest_users_carry_the_middle_weight() {
    let a = reference_codebooks("A_4x6_M4").unwrap();
    let report = metrics::system_mpd(&a).unwrap();
    let weakest = report.per_user[2].min(report.per_user[3]);
    for j in [0, 1, 4, 5] {
        assert!(report.per_user[j] > weakest, "user {}", j + 1);
    }
    assert_relative_eq!(report.system, weakest);
}

#[test]
fn built_mpd_follows_scaling_identity() {
    let t = SignatureTemplate::builtin("S4x6").unwrap();
    let set = small_set();
    let dp = set.design_point().unwrap().clone();
    let mc = MotherConstellation::new(4, dp.omega).unwrap();
    for j in 0..t.users() {
        let [a, b] = t.user_weight_indices(j);
        let expect = (dp.energies[a - 1] * dp.energies[b - 1]).sqrt() / mc.dimension_energy() * mc.mpd_brute_force();
        let got = metrics::codebook_mpd(set.codebook(j)).unwrap();
        assert_relative_eq!(got, expect, max_relative = 1e-9);
    }
}

#[test]
fn transmit_matches_superposition() {
    let a = reference_codebooks("A_4x6_M4").unwrap();
    let tx = vec![0; 6];
    let ch = ChannelSample::awgn(4, 1.0);
    let zero = vec![Complex64::new(0.0, 0.0); 4];
    let y = transmit(&a, &tx, &ch, &zero).unwrap();
    assert_eq!(y, a.superimpose(&tx).unwrap().vector);

    let h = ChannelSample {
        h: vec![Complex64::new(0.5, -1.0), Complex64::new(0.0, 2.0), Complex64::new(1.0, 0.0), Complex64::new(-0.3, 0.1)],
        noise_variance: 1.0,
    };
    let y = transmit(&a, &tx, &h, &zero).unwrap();
    let x = a.superimpose(&tx).unwrap().vector;
    for k in 0..4 {
        assert_eq!(y[k], h.h[k] * x[k]);
    }
}
