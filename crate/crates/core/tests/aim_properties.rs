use spectra_core::aim::{aim_spectrum, delta_scan_grid, linear_energy_grid, AimConfig, HermiteSeeds};
use spectra_core::{PotentialParams, Precision};

fn prec() -> Precision {
    Precision::new(64).unwrap()
}

fn hermite_roots(n: usize, x0: f64) -> Vec<f64> {
    // Offset grid so that no integer is a grid point.
    let grid = linear_energy_grid(-0.37, n as f64 + 0.41, 8 * (n + 1) + 3);
    delta_scan_grid(&HermiteSeeds, &grid, n, x0, prec())
        .unwrap()
        .iter()
        .map(|r| r.energy)
        .collect()
}

#[test]
fn hermite_roots_do_not_depend_on_the_center() {
    for n in 1..=4 {
        for &x0 in &[0.0, 0.3, -0.6] {
            let roots = hermite_roots(n, x0);
            assert_eq!(roots.len(), n + 1, "n = {n}, x0 = {x0}: {roots:?}");
            for (k, e) in roots.iter().enumerate() {
                assert!((e - k as f64).abs() < 1e-10, "n = {n}, x0 = {x0}: root {e}");
            }
        }
    }
}

fn quick(x0: f64) -> AimConfig {
    AimConfig {
        x0,
        n_max: 70,
        e_grid: 300,
        ..AimConfig::default()
    }
}

fn ground_state_at(p: &PotentialParams, x0: f64, n: usize) -> f64 {
    let grid = linear_energy_grid(-2.12, -1.92, 21);
    let roots = delta_scan_grid(p, &grid, n, x0, prec()).unwrap();
    assert_eq!(roots.len(), 1, "x0 = {x0}, n = {n}");
    roots[0].energy
}

#[test]
fn ground_state_is_stable_on_the_left_of_the_middle() {
    let p = PotentialParams::s_wave(20.0, 0.5, 0.6).unwrap();
    let mid = ground_state_at(&p, 0.0, 120);
    let left = ground_state_at(&p, -0.1, 120);
    assert!(((left - mid) / mid).abs() < 1e-6, "{left} vs {mid}");
    assert!((mid + 2.0179675071).abs() < 1e-9);
}

/// Right of the middle the same depth is not enough: the root walks away
/// from the eigenvalue as n grows.
#[test]
fn ground_state_degrades_right_of_the_middle() {
    let p = PotentialParams::s_wave(20.0, 0.5, 0.6).unwrap();
    let exact = -2.0179675071;
    let e70 = ground_state_at(&p, 0.1, 70);
    let e120 = ground_state_at(&p, 0.1, 120);
    assert!((e120 - exact).abs() > (e70 - exact).abs());
    assert!(((e120 - exact) / exact).abs() > 1e-3, "{e120}");
}

#[test]
fn ground_state_drift_shrinks_monotonically() {
    let p = PotentialParams::s_wave(20.0, 0.5, 0.6).unwrap();
    let tol = AimConfig::default().stability_tol;
    let grid = linear_energy_grid(-2.12, -1.92, 21);
    let mut energies = Vec::new();
    for n in (20..=80).step_by(2) {
        let roots = delta_scan_grid(&p, &grid, n, 0.0, prec()).unwrap();
        assert_eq!(roots.len(), 1, "n = {n}");
        energies.push(roots[0].energy);
    }
    let drift: Vec<f64> = energies.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let below = drift
        .iter()
        .position(|&d| d < tol)
        .expect("drift reaches the tolerance");
    assert!(drift[..=below].windows(2).all(|w| w[1] < w[0]), "{drift:?}");
    assert!(drift[below..].iter().all(|&d| d < tol), "{drift:?}");
}

#[test]
fn levels_lie_inside_the_well() {
    for &(v0, l, g) in &[(5.0, 0.2, 0.6), (60.0, 0.5, 0.6)] {
        let p = PotentialParams::s_wave(v0, l, g).unwrap();
        let (_, vmin) = p.v_min().unwrap();
        let res = aim_spectrum(&p, &quick(0.0)).unwrap();
        assert!(!res.levels.is_empty());
        for lvl in &res.levels {
            assert!(
                lvl.energy > vmin && lvl.energy < 0.0,
                "{} outside ({vmin}, 0)",
                lvl.energy
            );
        }
        assert!(res.levels.windows(2).all(|w| w[0].energy < w[1].energy));
    }
}

#[test]
fn excited_levels_need_more_iterations() {
    let p = PotentialParams::s_wave(60.0, 0.5, 0.6).unwrap();
    let res = aim_spectrum(&p, &quick(0.0)).unwrap();
    let conv: Vec<bool> = res.levels.iter().map(|l| l.converged).collect();
    assert!(conv[0]);
    // Once a level fails the stability test, no shallower one passes it.
    let first_bad = conv.iter().position(|c| !c).unwrap_or(conv.len());
    assert!(conv[first_bad..].iter().all(|c| !c), "{conv:?}");
    assert!(res.levels[0].drift < res.levels[res.levels.len() - 1].drift);
}
