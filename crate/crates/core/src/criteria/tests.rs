use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::profiles::DensitySpec;
use crate::testutil::{exp_profile, profile};

/// Unit density and gravity with a uniform field `m0` imposed on top.
fn constant_coefficients(m0: f64, n: usize) -> EquilibriumProfile {
    let mut p = profile(DensitySpec::Constant { rho0: 1.0 }, 1.0, 1.0, 1.0, n, Some(1.0));
    for s in [&mut p.nodes, &mut p.mids] {
        s.m.iter_mut().for_each(|m| *m = m0);
        s.dm.iter_mut().for_each(|d| *d = 0.0);
        s.m2prime.iter_mut().for_each(|d| *d = 0.0);
    }
    p
}

fn sine_mode(p: &EquilibriumProfile, k: usize) -> Vec<f64> {
    let (lo, len) = (p.grid.lo, p.grid.hi - p.grid.lo);
    p.grid.nodes.iter().map(|x| (k as f64 * PI * (x - lo) / len).sin()).collect()
}

#[test]
fn poincare_constant_and_order() {
    let r = poincare_ratio(0.0, PI, 512).unwrap();
    assert!((r - 1.0).abs() < 5e-3);
    let r2 = poincare_ratio(0.0, 2.0 * PI, 512).unwrap();
    assert!((r2 - 2.0).abs() < 1e-2);
    // n + 1 cells: 64, 128, 256
    let errs: Vec<f64> =
        [63, 127, 255].iter().map(|&n| (poincare_ratio(0.0, PI, n).unwrap() - 1.0).abs()).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn pointwise_flags_on_simple_profiles() {
    let p = profile(DensitySpec::Constant { rho0: 1.0 }, 1.0, 1.0, 1.0, 32, None);
    let (s, flag) = schwarzschild_margin(&p);
    assert!(flag && s.iter().all(|&v| v > 0.0));
    let (b, bflag) = buoyancy_margin(&p);
    assert!(bflag && b.iter().all(|&v| (v + 2.0).abs() < 1e-12));
    let (t, tflag) = tserkovnikov_margin(&p);
    assert!(tflag && t.iter().all(|&v| v > 0.0));
    assert!(!rt_margin(&p).1);

    let dec = profile(DensitySpec::Exponential { rho0: 1.0, scale_height: 0.5, x_ref: 0.0 }, 0.0, 1.0, 1.4, 32, None);
    assert!(!schwarzschild_margin(&dec).1);
    assert!(!rt_margin(&dec).1);
    assert!(!buoyancy_margin(&dec).1);
    let (t, tflag) = tserkovnikov_margin(&dec);
    assert!(!tflag && t.iter().all(|&v| v == 0.0));

    let heavy_top = profile(DensitySpec::TanhLayer { rho0: 1.0, jump: 0.3, center: 0.0, width: 0.2 }, 1.0, 1.0, 1.4, 64, None);
    let (rt, rtflag) = rt_margin(&heavy_top);
    assert!(rtflag);
    let (s, sflag) = schwarzschild_margin(&heavy_top);
    assert!(sflag);
    for (r, s) in rt.iter().zip(&s) {
        assert!(s >= r);
    }
}

#[test]
fn schwarzschild_flag_flips_with_scale_height() {
    // S = rho (g rho / (gamma P) - 1/H) with P = rho^gamma: sign set by
    // g rho^(1-gamma) / gamma against 1/H
    let (g, gamma) = (1.0, 1.0);
    for (h_scale, expect) in [(0.5, false), (2.0, true)] {
        let p = profile(DensitySpec::Exponential { rho0: 1.0, scale_height: h_scale, x_ref: 0.0 }, g, 1.0, gamma, 32, None);
        let (s, flag) = schwarzschild_margin(&p);
        assert_eq!(flag, expect);
        for (j, x) in p.nodes.x.iter().enumerate() {
            let rho = (-x / h_scale).exp();
            let exact = g * rho / gamma - rho / h_scale;
            assert!((s[j] - exact).abs() < 1e-12);
        }
    }
}

#[test]
fn varpi_example_and_field_scaling() {
    let p = profile(DensitySpec::Constant { rho0: 1.0 }, 1.0, 1.0, 1.0, 32, None);
    let sb = varpi_and_strip_bound(&p, 0.0, 3.0).unwrap();
    assert!((sb.varpi - 1.0).abs() < 1e-14);
    assert!((sb.bound - 3.0 / PI).abs() < 1e-14);
    let min_m = p.nodes.m.iter().copied().fold(f64::INFINITY, f64::min);
    let s_star = sb.bound / min_m;
    for s in [0.5 * s_star, 2.0 * s_star] {
        let q = varpi_and_strip_bound(&p.with_field_scale(s), 0.0, 3.0).unwrap();
        assert_eq!(q.varpi, sb.varpi);
        assert_eq!(q.sufficient, s > s_star);
    }
    let g0 = profile(DensitySpec::Constant { rho0: 1.0 }, 0.0, 1.0, 1.0, 32, None);
    let sb0 = varpi_and_strip_bound(&g0, -1.0, 1.0).unwrap();
    assert_eq!((sb0.varpi, sb0.bound, sb0.sufficient), (0.0, 0.0, true));
    assert!(varpi_and_strip_bound(&g0, 1.0, 1.0).is_err());
}

#[test]
fn kappa_and_xi2d_closed_forms() {
    let l = 1.0;
    let lambda1 = (PI / (2.0 * l)).powi(2);
    for m0 in [0.3, 0.6, 2.0] {
        let p = constant_coefficients(m0, 511);
        let k = kappa(&p).unwrap();
        let exact = 2.0 * l / (PI * m0);
        assert!((k - exact).abs() < 5e-3 * exact, "kappa {k} vs {exact}");
        let xi = xi_2d(&p).unwrap();
        let exact_xi = ((1.0 - m0 * m0 * lambda1) / (m0 * m0)).max(0.0).sqrt();
        assert!((xi - exact_xi).abs() < 5e-3 * exact_xi.max(1e-2), "xi2d {xi} vs {exact_xi}");
        assert_eq!(xi > 0.0, k > 1.0);
    }
}

#[test]
fn thresholds_vanish_without_gravity() {
    let p = profile(DensitySpec::Exponential { rho0: 1.0, scale_height: 0.7, x_ref: 0.0 }, 0.0, 1.0, 1.4, 64, None);
    assert_eq!(kappa(&p).unwrap(), 0.0);
    assert_eq!(xi_2d(&p).unwrap(), 0.0);
    assert_eq!(xi_3d(&p, 1.0).unwrap(), 0.0);
}

#[test]
fn degenerate_field_rejected() {
    let p = exp_profile(32).with_field_scale(0.0);
    assert!(matches!(kappa(&p), Err(Error::DegenerateField { .. })));
    assert!(matches!(xi_2d(&p), Err(Error::DegenerateField { .. })));
    assert!(matches!(xi_3d(&p, 1.0), Err(Error::DegenerateField { .. })));
}

#[test]
fn thresholds_positive_and_monotone_in_field() {
    let p = exp_profile(128);
    assert!(schwarzschild_margin(&p).1);
    let mut prev = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for s in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let q = p.with_field_scale(s);
        let cur = (kappa(&q).unwrap(), xi_2d(&q).unwrap(), xi_3d(&q, 1.0).unwrap());
        assert!(cur.0 > 0.0 && cur.2 > 0.0);
        assert!(cur.0 <= prev.0 && cur.1 <= prev.1 && cur.2 <= prev.2);
        assert_eq!(cur.1 > 0.0, cur.0 > 1.0);
        prev = cur;
    }
}

#[test]
fn thresholds_invariant_under_flip_and_reflection() {
    let p = exp_profile(96);
    let base = (kappa(&p).unwrap(), xi_2d(&p).unwrap(), xi_3d(&p, 0.7).unwrap());
    for q in [p.with_flipped_field(), p.reflected()] {
        let other = (kappa(&q).unwrap(), xi_2d(&q).unwrap(), xi_3d(&q, 0.7).unwrap());
        assert!((other.0 - base.0).abs() <= 1e-10 * base.0);
        assert!((other.1 - base.1).abs() <= 1e-10 * base.1.max(1.0));
        assert!((other.2 - base.2).abs() <= 1e-7 * base.2);
    }
}

/// Positive root in `t = xi1^2` of `(b - t a)(t + 1/L2^2) - t c = 0`.
fn hand_root(a: f64, b: f64, c: f64, l2: f64) -> f64 {
    let e = 1.0 / (l2 * l2);
    // -a t^2 + (b - a e - c) t + b e = 0
    let (qa, qb, qc) = (-a, b - a * e - c, b * e);
    let disc = qb * qb - 4.0 * qa * qc;
    let roots = [(-qb + disc.sqrt()) / (2.0 * qa), (-qb - disc.sqrt()) / (2.0 * qa)];
    roots.into_iter().fold(f64::NEG_INFINITY, f64::max).sqrt()
}

#[test]
fn per_psi_formula_matches_hand_root() {
    let m0 = 0.4;
    let p = constant_coefficients(m0, 255);
    let psi = sine_mode(&p, 1);
    let h = p.grid.h;
    let (avg, dif) = (node_avg(&psi), node_diff(&psi, h));
    let a = m0 * m0 * dot(&avg, &avg, h);
    let b = dot(&avg, &avg, h);
    let c = m0 * m0 * dot(&dif, &dif, h);
    let l2 = 0.8;
    let got = xi_3d_of_psi(&p, &psi, l2).unwrap();
    assert!((got - hand_root(a, b, c, l2)).abs() < 1e-12);
    // the reduced form vanishes at that wavenumber
    let q = reduced_form(&p, got, l2).quad(&psi);
    assert!(q.abs() < 1e-10 * b);
}

#[test]
fn per_psi_formula_degenerate_cases() {
    let g0 = profile(DensitySpec::Constant { rho0: 1.0 }, 0.0, 1.0, 1.0, 32, None);
    let psi = sine_mode(&g0, 2);
    assert_eq!(xi_3d_of_psi(&g0, &psi, 1.0).unwrap(), 0.0);
    let zero = vec![0.0; g0.grid.n];
    assert!(matches!(xi_3d_of_psi(&g0, &zero, 1.0), Err(Error::ZeroDenominator(_))));
}

#[test]
fn per_psi_values_bounded_by_threshold() {
    let p = exp_profile(128);
    let l2 = 1.0;
    let xi = xi_3d(&p, l2).unwrap();
    for k in 1..12 {
        let v = xi_3d_of_psi(&p, &sine_mode(&p, k), l2).unwrap();
        assert!(v <= xi * (1.0 + 1e-7), "mode {k}: {v} > {xi}");
    }
    // the maximiser just below the threshold attains it
    let xi1 = xi * (1.0 - 1e-6);
    let (top, psi) = reduced_form_maximizer(&p, xi1, l2).unwrap();
    assert!(top > 0.0);
    let v = xi_3d_of_psi(&p, &psi, l2).unwrap();
    assert!(v >= xi1 * (1.0 - 1e-9));
    assert!(v <= xi * (1.0 + 1e-7));
}

#[test]
fn report_assembles() {
    let p = exp_profile(64);
    let r = evaluate_criteria(&p, (-1.0, 1.0), 1.0).unwrap();
    assert_eq!(r.schwarzschild_margin.len(), 64);
    assert!(r.schwarzschild && r.buoyancy_flag);
    assert!(r.kappa > 0.0 && r.xi3d > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schwarzschild_equivalent_to_buoyancy(
        scale in 0.2f64..4.0,
        g in 0.0f64..3.0,
        gamma in 1.0f64..2.0,
        lambda in 0.2f64..3.0,
        jump in -0.4f64..0.4,
    ) {
        let dens = DensitySpec::TanhLayer { rho0: 1.0, jump, center: 0.1, width: 0.3 * scale };
        let p = profile(dens, g, lambda, gamma, 48, None);
        let (s, _) = schwarzschild_margin(&p);
        let (b, _) = buoyancy_margin(&p);
        let (t, _) = tserkovnikov_margin(&p);
        for j in 0..s.len() {
            let scale = 1e-8 * (p.nodes.g[j] * p.nodes.rho[j] + p.nodes.drho[j].abs() + 1.0);
            if s[j].abs() > scale {
                prop_assert_eq!(s[j] > 0.0, b[j] < 0.0);
            }
            if t[j] > 0.0 {
                prop_assert!(s[j] > 0.0);
            }
        }
    }
}
