use spectra_core::golden::{self, Method};
use spectra_core::hdm::{
    eigenvalues, hamiltonian, hdm_spectrum, overlap_matrix, plateau_scan, quadrature, u_matrix, u_matrix_with, Coulomb,
    HdmConfig,
};
use spectra_core::linalg::cholesky;
use spectra_core::PotentialParams;

fn cfg(n: usize, mu: f64, ell: u32) -> HdmConfig {
    HdmConfig::new(n, mu, ell).unwrap()
}

/// Generalized Laguerre polynomial by the three-term recurrence.
fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 + alpha - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn ln_gamma_int(n: usize) -> f64 {
    (1..n).map(|k| (k as f64).ln()).sum()
}

/// Basis function without the μ scaling: x^{ℓ+1} e^{-x/2} L̂_n(x).
fn chi(n: usize, ell: u32, x: f64) -> f64 {
    let a = 2 * ell as usize + 1;
    let norm = (0.5 * (ln_gamma_int(n + 1) - ln_gamma_int(n + a + 1))).exp();
    norm * x.powi(ell as i32 + 1) * (-x / 2.0).exp() * laguerre(n, a as f64, x)
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson on [0, 200], split into unit panels.
fn integrate(f: impl Fn(f64) -> f64) -> f64 {
    let mut total = 0.0;
    for i in 0..200 {
        let (a, b) = (i as f64, i as f64 + 1.0);
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson(&f, a, b, fa, fm, fb, whole, 1e-15, 40);
    }
    total
}

/// μ ∫ χ_n U χ_m dr in the dimensionless variable x = μr.
fn u_oracle(n: usize, m: usize, ell: u32, mu: f64, u: impl Fn(f64) -> f64) -> f64 {
    integrate(|x| chi(n, ell, x) * chi(m, ell, x) * u(x / mu))
}

#[test]
fn nodes_are_laguerre_zeros() {
    let q = quadrature(&cfg(5, 1.0, 0)).unwrap();
    // Bracket the zeros of L_5^1 on a fine grid, then bisect.
    let f = |x: f64| laguerre(5, 1.0, x);
    let mut zeros = Vec::new();
    let h = 1e-3;
    let mut x = h;
    while x < 20.0 {
        if f(x) * f(x + h) < 0.0 {
            let (mut a, mut b) = (x, x + h);
            for _ in 0..80 {
                let c = 0.5 * (a + b);
                if f(a) * f(c) <= 0.0 {
                    b = c;
                } else {
                    a = c;
                }
            }
            zeros.push(0.5 * (a + b));
        }
        x += h;
    }
    assert_eq!(zeros.len(), 5);
    for (node, zero) in q.nodes.iter().zip(&zeros) {
        assert!((node - zero).abs() < 1e-10, "{node} vs {zero}");
    }
}

#[test]
fn rule_reconstructs_the_overlap() {
    for &(n, ell) in &[(1, 0), (7, 0), (30, 2), (100, 0)] {
        let c = cfg(n, 1.3, ell);
        let q = quadrature(&c).unwrap();
        let s = overlap_matrix(&c).unwrap();
        let rebuilt = q.matrix(n, |_| 1.0);
        for i in 0..n {
            for j in 0..n {
                assert!(
                    (rebuilt.get(i, j) - s.get(i, j)).abs() < 1e-12 * (1.0 + n as f64),
                    "N={n} ({i},{j})"
                );
            }
        }
        let cst = u_matrix_with(&c, |_| -2.5).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!((cst.get(i, j) + 2.5 * s.get(i, j)).abs() < 1e-12 * (1.0 + n as f64));
            }
        }
    }
}

#[test]
fn richer_quadrature_keeps_the_constant_identity() {
    let c = HdmConfig {
        quadrature_n: Some(40),
        ..cfg(10, 0.7, 1)
    };
    let s = overlap_matrix(&c).unwrap();
    let u = u_matrix_with(&c, |_| 3.0).unwrap();
    for i in 0..10 {
        for j in 0..10 {
            assert!((u.get(i, j) - 3.0 * s.get(i, j)).abs() < 1e-11);
        }
    }
}

#[test]
fn oracle_reproduces_overlap() {
    assert!((u_oracle(0, 0, 0, 1.0, |_| 1.0) - 2.0).abs() < 1e-12);
    assert!((u_oracle(0, 1, 0, 1.0, |_| 1.0) + 2f64.sqrt()).abs() < 1e-12);
    assert!((u_oracle(1, 1, 1, 1.0, |_| 1.0) - 6.0).abs() < 1e-12);
}

#[test]
fn potential_element_matches_direct_integral() {
    let p = PotentialParams::s_wave(5.0, 0.2, 0.8).unwrap();
    let c = cfg(8, 1.0, 0);
    let u = u_matrix(&p, &c).unwrap();
    let want = u_oracle(0, 0, 0, 1.0, |r| p.eval_u(r));
    assert!(((u.get(0, 0) - want) / want).abs() < 1e-8, "{} vs {want}", u.get(0, 0));
}

#[test]
fn exponential_elements_match_direct_integral() {
    for &ell in &[0, 1] {
        let mu = 0.9;
        let c = cfg(60, mu, ell);
        let u = u_matrix_with(&c, |r| (-mu * r).exp()).unwrap();
        for n in 0..=5 {
            for m in n..=5 {
                let want = u_oracle(n, m, ell, mu, |r| (-mu * r).exp());
                assert!(
                    (u.get(n, m) - want).abs() < 1e-8,
                    "ell={ell} ({n},{m}): {} vs {want}",
                    u.get(n, m)
                );
            }
        }
    }
}

#[test]
fn overlap_is_positive_definite() {
    for ell in 0..=3 {
        for n in [1, 2, 50, 200] {
            let s = overlap_matrix(&cfg(n, 1.0, ell)).unwrap();
            assert!(cholesky(&s.to_dense()).is_ok(), "N={n} ell={ell}");
        }
    }
}

#[test]
fn hamiltonian_is_symmetric() {
    let p = PotentialParams::s_wave(40.0, 0.5, 0.6).unwrap();
    let h = hamiltonian(&p, &cfg(100, 2.2, 0)).unwrap();
    assert!(h.max_asymmetry() <= 1e-12 * h.frobenius_norm());
}

/// With the quadrature held fixed the smaller basis spans a subspace of the
/// larger one, so every eigenvalue can only go down.
#[test]
fn rayleigh_ritz_ordering() {
    let p = PotentialParams::s_wave(5.0, 0.2, 0.6).unwrap();
    let small = HdmConfig {
        quadrature_n: Some(200),
        ..cfg(80, 0.8, 0)
    };
    let large = HdmConfig { n: 100, ..small };
    let a = eigenvalues(&p, &small).unwrap();
    let b = eigenvalues(&p, &large).unwrap();
    for (k, (x, y)) in a.iter().zip(&b).enumerate() {
        assert!(y <= &(x + 1e-12 * x.abs().max(1.0)), "level {k}: {y} > {x}");
    }
}

fn plateau_mu(p: &PotentialParams) -> f64 {
    let (lo, hi) = (p.lambda / 2.0, 20.0 * p.lambda);
    plateau_scan(p, &cfg(100, 1.0, 0), lo, hi, 40).unwrap().best_mu()
}

#[test]
fn basis_size_convergence_and_state_counts() {
    let counts: Vec<usize> = golden::columns()
        .iter()
        .map(|col| {
            let p = col.params();
            let mu = plateau_mu(&p);
            let s80 = eigenvalues(&p, &cfg(80, mu, 0)).unwrap();
            let spec = hdm_spectrum(&p, &cfg(100, mu, 0)).unwrap();
            for (k, e) in spec.bound.iter().enumerate() {
                assert!(
                    (e - s80[k]).abs() < 1e-9,
                    "{} level {k}: {e} vs {}",
                    col.label(),
                    s80[k]
                );
            }
            assert!(spec.spurious.is_empty());
            spec.bound.len()
        })
        .collect();
    assert_eq!(counts, vec![2, 3, 5, 4, 6, 7]);
}

#[test]
fn coulomb_levels_on_the_plateau() {
    let model = Coulomb { z: -1.0 };
    let report = plateau_scan(&model, &cfg(100, 1.0, 0), 0.1, 4.0, 30).unwrap();
    assert!(!report.no_plateau());
    let e = eigenvalues(&model, &cfg(100, report.best_mu(), 0)).unwrap();
    for (k, want) in [-0.5, -0.125, -1.0 / 18.0].iter().enumerate() {
        assert!((e[k] - want).abs() < 1e-8, "{} vs {want}", e[k]);
    }
}

#[test]
fn coulomb_ground_state_is_exact_at_mu_two() {
    for n in [1, 2, 10, 100] {
        let e = eigenvalues(&Coulomb { z: -1.0 }, &cfg(n, 2.0, 0)).unwrap();
        assert!((e[0] + 0.5).abs() < 1e-12, "N={n}: {}", e[0]);
    }
}

#[test]
fn plateau_window_reproduces_the_published_column() {
    let p = PotentialParams::s_wave(20.0, 0.5, 0.6).unwrap();
    let report = plateau_scan(&p, &cfg(100, 1.0, 0), 0.5, 8.0, 30).unwrap();
    let (a, b) = report.window.expect("plateau found");
    assert!(b - a + 1 >= 3);
    assert!(report.best >= a && report.best <= b);
    let col = &golden::columns()[3];
    assert_eq!(col.v0, 20.0);
    let spec = hdm_spectrum(&p, &cfg(100, report.best_mu(), 0)).unwrap();
    for (k, want) in col.values(Method::Hdm).iter().enumerate() {
        assert!(
            (spec.bound[k] - want).abs() < 1e-9,
            "level {k}: {} vs {want}",
            spec.bound[k]
        );
    }
    assert!(report.window_digits(0).unwrap() > 9.0);
}

#[test]
fn small_basis_has_a_narrower_plateau() {
    let p = PotentialParams::s_wave(20.0, 0.5, 0.6).unwrap();
    let big = plateau_scan(&p, &cfg(100, 1.0, 0), 0.5, 8.0, 30).unwrap();
    let small = plateau_scan(&p, &cfg(5, 1.0, 0), 0.5, 8.0, 30).unwrap();
    assert!(small.no_plateau() || small.window_len() < big.window_len());
    assert!(small.ground_digits_total() < big.ground_digits_total());
}
