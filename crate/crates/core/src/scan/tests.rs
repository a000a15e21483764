use super::*;
use crate::criteria::xi_3d;
use crate::profiles::DensitySpec;
use crate::testutil::{exp_profile, profile};

fn small_spec(n: usize, method: ScanMethod) -> ScanSpec {
    ScanSpec::harmonics(2.0, 1.0, 6, n, method)
}

#[test]
fn field_free_uniform_layer_has_no_growth() {
    let p = profile(DensitySpec::Constant { rho0: 1.0 }, 0.0, 1.0, 1.4, 24, None);
    let t = dispersion_scan(&p, &small_spec(24, ScanMethod::Both)).unwrap();
    assert!(t.rows.iter().all(|r| r.re_lambda <= 1e-10 && !r.flagged));
    assert!(t.summary.max_growth <= 1e-10);
    assert!(t.summary.bands.iter().all(|b| b.lo.is_none()));
    let v = stability_verdict(&p, &small_spec(24, ScanMethod::Qep), Domain::Slab3d).unwrap();
    assert!(!v.schwarzschild_branch && !v.tserkovnikov_branch && !v.planar_branch && v.consistent);
}

#[test]
fn single_mode_matches_direct_solve() {
    let p = exp_profile(24);
    let spec = ScanSpec { xi1_values: vec![0.5], xi2_values: vec![1.0], ..small_spec(24, ScanMethod::Both) };
    let t = dispersion_scan(&p, &spec).unwrap();
    assert_eq!(t.rows.len(), 2);
    let ops = assemble_operators(&p, ModeSpec { xi1: 0.5, xi2: 1.0 });
    let direct = solve_qep(&ops, 1e-8).unwrap().top().unwrap().lam.re;
    let q = t.rows.iter().find(|r| r.method == "qep").unwrap();
    assert_eq!(q.re_lambda, direct);
    let f = t.rows.iter().find(|r| r.method == "fixed_point").unwrap();
    assert!((f.re_lambda - direct).abs() < 1e-8 * direct);
}

#[test]
fn band_lies_below_threshold_and_shrinks_with_field() {
    let p = exp_profile(48);
    let xi = xi_3d(&p, 1.0).unwrap();
    let spec = ScanSpec { xi1_values: (0..=12).map(|k| k as f64 * 0.25).collect(), xi2_values: vec![1.0], ..small_spec(48, ScanMethod::Qep) };
    let band = |p: &EquilibriumProfile| -> Vec<f64> {
        let t = dispersion_scan(p, &spec).unwrap();
        t.at_xi2(1.0).filter(|r| r.re_lambda > UNSTABLE_FLOOR).map(|r| r.xi1).collect()
    };
    let b1 = band(&p);
    assert!(!b1.is_empty());
    assert!(b1.iter().all(|&x| x > 0.0 && x < xi + 2.0 * p.grid.h), "{b1:?} vs {xi}");
    let mut prev = b1;
    for s in [1.5, 2.0, 3.0] {
        let b = band(&p.with_field_scale(s));
        assert!(b.iter().all(|x| prev.contains(x)));
        prev = b;
    }
}

#[test]
fn scan_is_deterministic() {
    let p = exp_profile(16);
    let spec = small_spec(16, ScanMethod::Both);
    let mut a = Vec::new();
    let mut b = Vec::new();
    dispersion_scan(&p, &spec).unwrap().write_csv(&mut a).unwrap();
    dispersion_scan(&p, &spec).unwrap().write_csv(&mut b).unwrap();
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().starts_with(DispersionTable::HEADER));
}

#[test]
fn invalid_specs_are_rejected() {
    let p = exp_profile(16);
    let empty = ScanSpec { xi1_values: vec![], ..small_spec(16, ScanMethod::Qep) };
    assert!(matches!(dispersion_scan(&p, &empty), Err(Error::InvalidSpec(_))));
    assert!(matches!(dispersion_scan(&p, &small_spec(32, ScanMethod::Qep)), Err(Error::InvalidSpec(_))));
    let neg = ScanSpec { xi2_values: vec![-1.0], ..small_spec(16, ScanMethod::Qep) };
    assert!(dispersion_scan(&p, &neg).is_err());
}

#[test]
fn zero_mode_is_excluded_from_summary() {
    let p = exp_profile(16);
    let spec = ScanSpec { xi1_values: vec![0.0], xi2_values: vec![0.0], ..small_spec(16, ScanMethod::Qep) };
    let t = dispersion_scan(&p, &spec).unwrap();
    assert_eq!(t.rows.len(), 1);
    assert_eq!(t.summary.argmax, None);
    assert_eq!(t.summary.max_growth, 0.0);
}

#[test]
fn strip_verdict_uses_sufficient_bound() {
    let p = exp_profile(32).with_field_scale(20.0);
    let spec = small_spec(32, ScanMethod::Qep);
    let v = stability_verdict(&p, &spec, Domain::Strip { a: 0.0, b: 0.5 }).unwrap();
    assert!(v.criteria.strip_stable_sufficient);
    assert_eq!(v.status, "stable (sufficient bound)");
    assert!(v.table.is_none() && v.consistent);
    let weak = stability_verdict(&exp_profile(32), &spec, Domain::Strip { a: 0.0, b: 50.0 }).unwrap();
    assert!(!weak.criteria.strip_stable_sufficient);
}

#[test]
fn unstable_slab_verdict_is_consistent() {
    let p = exp_profile(32);
    let xi = xi_3d(&p, 1.0).unwrap();
    let l1 = 2.0 / xi;
    let spec = ScanSpec::harmonics(l1, 1.0, 4, 32, ScanMethod::Qep);
    let v = stability_verdict(&p, &spec, Domain::Slab3d).unwrap();
    assert!(v.schwarzschild_branch);
    assert!(v.max_growth > 0.0 && v.consistent, "{:?}", v.diagnostics);
    let v2 = stability_verdict(&p, &spec, Domain::Slab2d).unwrap();
    assert!(v2.table.unwrap().rows.iter().all(|r| r.xi2 == 0.0));
}
