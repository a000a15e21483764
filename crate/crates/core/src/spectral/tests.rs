use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::*;
use crate::criteria::xi_3d;
use crate::energy::{dissipation, energy_ec, energy_tilde, mass, ModeSpec};
use crate::profiles::DensitySpec;
use crate::testutil::{exp_profile, profile, random_vec, rng};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn quad(a: &DMatrix<f64>, x: &[f64]) -> f64 {
    let v = DVector::from_column_slice(x);
    v.dot(&(a * &v))
}

/// Two decoupled copies of a scalar problem (the smallest operator size).
fn scalar_ops(m: f64, d: f64, k: f64) -> ModalOperators {
    let diag = |v: f64| DMatrix::from_diagonal_element(2, 2, v);
    ModalOperators { n: 0, mode: ModeSpec { xi1: 1.0, xi2: 0.0 }, mass: diag(m), damping: diag(d), stiffness: diag(k) }
}

#[test]
fn scalar_quadratic() {
    let ops = scalar_ops(1.0, 3.0, -2.0);
    let sol = solve_qep(&ops, 1e-8).unwrap();
    let mut re: Vec<f64> = sol.pairs.iter().map(|p| p.lam.re).collect();
    re.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    assert_eq!(re.len(), 2);
    assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] + 2.0).abs() < 1e-12);
    for p in &sol.pairs {
        assert!(p.lam.im.abs() < 1e-12);
        let x: Vec<Complex64> = p.field.stacked().iter().map(|&v| v.into()).collect();
        assert!(qep_residual(p.lam, &x, &ops).unwrap() < 1e-13);
    }
    let fp = growth_rate_fixed_point(&scalar_ops(1.0, 0.0, 4.0), 1e-10).unwrap();
    assert!((fp.rate() - 2.0).abs() < 1e-12);
    assert!(matches!(growth_rate_fixed_point(&ops, 1e-8).unwrap(), FixedPointOutcome::Stable { .. }));
}

#[test]
fn operators_are_the_functionals() {
    let p = exp_profile(24);
    let mode = ModeSpec { xi1: 0.9, xi2: 1.4 };
    let ops = assemble_operators(&p, mode);
    assert_eq!(ops.dim(), 3 * 24 + 2);
    assert_eq!(ops.stiffness, ops.stiffness.transpose());
    assert_eq!(ops.damping, ops.damping.transpose());
    let mut r = rng(2);
    for _ in 0..20 {
        let x = random_vec(&mut r, ops.dim());
        let f = ops.field(&x);
        assert!(rel(quad(&ops.stiffness, &x), energy_tilde(&f, &p)) < 1e-10);
        assert!(rel(quad(&ops.damping, &x), dissipation(&f, &p)) < 1e-10);
        assert!(rel(quad(&ops.mass, &x), mass(&f, &p)) < 1e-12);
    }
}

#[test]
fn zero_mode_has_no_horizontal_coupling() {
    let p = exp_profile(16);
    let ops = assemble_operators(&p, ModeSpec { xi1: 0.0, xi2: 0.0 });
    let nm = 17;
    for i in 0..2 * nm {
        for j in 0..ops.dim() {
            assert_eq!(ops.stiffness[(i, j)], 0.0);
            if (i < nm) != (j < nm) || j >= 2 * nm {
                assert_eq!(ops.damping[(i, j)], 0.0);
            }
        }
    }
    // the remaining damping block is positive definite
    assert!(ops.damping.clone().cholesky().is_some());
}

#[test]
fn no_growth_without_gravity() {
    let p = profile(DensitySpec::Constant { rho0: 1.0 }, 0.0, 1.0, 1.4, 32, None);
    for mode in [ModeSpec { xi1: 1.0, xi2: 0.0 }, ModeSpec { xi1: 0.5, xi2: 2.0 }, ModeSpec { xi1: 0.0, xi2: 1.0 }] {
        let ops = assemble_operators(&p, mode);
        let sol = solve_qep(&ops, 1e-8).unwrap();
        assert!(sol.top().unwrap().lam.re <= 1e-10);
        let (a0, _) = alpha_of_s(&ops, 0.0).unwrap();
        assert!(a0 <= 1e-10);
        assert!(matches!(growth_rate_fixed_point(&ops, 1e-8).unwrap(), FixedPointOutcome::Stable { .. }));
    }
}

#[test]
fn spectrum_is_conjugate_symmetric() {
    let p = exp_profile(16);
    let ops = assemble_operators(&p, ModeSpec { xi1: 2.0, xi2: 1.0 });
    let sol = solve_qep(&ops, 1e-8).unwrap();
    for pair in &sol.pairs {
        if pair.lam.im.abs() > 1e-8 {
            assert!(sol.pairs.iter().any(|q| (q.lam - pair.lam.conj()).norm() < 1e-8 * pair.lam.norm()));
        }
        assert!(pair.accepted, "residual {}", pair.residual);
    }
}

#[test]
fn unstable_mode_methods_agree() {
    let p = exp_profile(64);
    let l2 = 1.0;
    let xi = xi_3d(&p, l2).unwrap();
    let mode = ModeSpec { xi1: 0.5 * xi, xi2: 1.0 / l2 };
    let ops = assemble_operators(&p, mode);
    let sol = solve_qep(&ops, 1e-8).unwrap();
    let top = sol.top().unwrap();
    assert!(top.lam.re > 0.0 && top.lam.im.abs() < 1e-10 * top.lam.re);
    assert!(top.accepted);
    let fp = growth_rate_fixed_point(&ops, 1e-10).unwrap();
    let g = fp.growth().unwrap();
    assert!(rel(g.lam.re, top.lam.re) < 1e-8);
    let lam = g.lam.re;
    assert!((energy_ec(&g.field, lam, &p) - lam * lam).abs() <= 1e-6 * lam * lam);
    assert!((mass(&g.field, &p) - 1.0).abs() < 1e-10);
    let psi2: f64 = g.field.psi.iter().map(|v| v * v).sum();
    assert!(psi2.sqrt() > 1e-8 * g.field.stacked().iter().map(|v| v * v).sum::<f64>().sqrt());
    // every positive eigenvalue is real
    for pair in sol.pairs.iter().filter(|q| q.lam.re > 0.0) {
        assert!(pair.lam.im.abs() < 1e-8 * pair.lam.re.max(1.0));
    }
    let si = solve_shift_invert(&ops, 1e-8).unwrap();
    assert!(rel(si.top().unwrap().lam.re, top.lam.re) < 1e-10);
}

#[test]
fn alpha_is_a_decreasing_supremum() {
    let p = exp_profile(24);
    let ops = assemble_operators(&p, ModeSpec { xi1: 0.7, xi2: 1.0 });
    let mut r = rng(8);
    let mut prev = f64::INFINITY;
    for s in [0.0, 0.1, 0.5, 1.0, 3.0] {
        let (a, f) = alpha_of_s(&ops, s).unwrap();
        assert!(a < prev);
        prev = a;
        assert!((mass(&f, &p) - 1.0).abs() < 1e-10);
        assert!((energy_ec(&f, s, &p) - a).abs() < 1e-9 * a.abs().max(1.0));
        for _ in 0..10 {
            let mut x = random_vec(&mut r, ops.dim());
            let nrm = quad(&ops.mass, &x).sqrt();
            x.iter_mut().for_each(|v| *v /= nrm);
            assert!(energy_ec(&ops.field(&x), s, &p) <= a + 1e-12);
        }
    }
}

#[test]
fn residual_grows_linearly_with_perturbation() {
    let p = exp_profile(24);
    let ops = assemble_operators(&p, ModeSpec { xi1: 0.7, xi2: 1.0 });
    let top = solve_qep(&ops, 1e-8).unwrap().pairs[0].clone();
    let x = top.field.stacked();
    let mut r = rng(4);
    let e = random_vec(&mut r, ops.dim());
    let res = |eps: f64| {
        let v: Vec<Complex64> = x.iter().zip(&e).map(|(a, b)| (a + eps * b).into()).collect();
        qep_residual(top.lam, &v, &ops).unwrap()
    };
    let (r1, r2) = (res(1e-4), res(2e-4));
    assert!(res(0.0) < 1e-3 * r1);
    assert!((r2 / r1 - 2.0).abs() < 1e-3);
    let zero = vec![Complex64::new(0.0, 0.0); ops.dim()];
    assert!(matches!(qep_residual(top.lam, &zero, &ops), Err(crate::Error::ZeroVector)));
}

proptest::proptest! {
    #[test]
    fn scalar_roots_match_quadratic_formula(m in 0.1f64..10.0, d in 0.0f64..5.0, k in -10.0f64..10.0) {
        let sol = solve_qep(&scalar_ops(m, d, k), 1e-8).unwrap();
        let disc = d * d + 4.0 * m * k;
        let top = if disc >= 0.0 { (-d + disc.sqrt()) / (2.0 * m) } else { -d / (2.0 * m) };
        let got = sol.top().unwrap().lam.re;
        proptest::prop_assert!((got - top).abs() < 1e-7 * (1.0 + top.abs()), "{} vs {}", got, top);
        let fp = growth_rate_fixed_point(&scalar_ops(m, d, k), 1e-12).unwrap().rate();
        proptest::prop_assert!((fp - top.max(0.0)).abs() < 1e-7 * (1.0 + top.abs()));
    }
}
