//! Asymptotic iteration method.
//!
//! For `y'' = k0 y' + z0 y` the sequences
//!
//! ```text
//! k_n = k_{n-1}' + z_{n-1} + k0 k_{n-1}
//! z_n = z_{n-1}' + z0 k_{n-1}
//! ```
//!
//! are carried as Taylor series about `x0`; eigenvalues are the energies at
//! which `Δ_n = k_{n-1} z_n - z_{n-1} k_n` vanishes at `x0`, followed across
//! `n` until they stop moving.
//!
//! The seeds are kept as quotients of low-degree polynomials, so each step is
//! linear in the series length. [`aim_step`] is the plain series form of the
//! same recursion.

use crate::error::{Error, Result};
use crate::potential::PotentialParams;
use crate::series::{to_f64, Precision, RationalSeries, Real, TaylorSeries};

#[derive(Debug, Clone)]
pub struct AimSeeds {
    pub k0: RationalSeries,
    pub z0: RationalSeries,
}

/// Anything that can produce AIM seeds at a trial energy.
pub trait SeedModel {
    fn seeds(&self, energy: &Real, x0: f64, len: usize, prec: Precision) -> Result<AimSeeds>;
}

impl SeedModel for PotentialParams {
    fn seeds(&self, energy: &Real, x0: f64, len: usize, prec: Precision) -> Result<AimSeeds> {
        let (k0, z0) = self.seed_rationals(energy, x0, len, prec)?;
        Ok(AimSeeds { k0, z0 })
    }
}

/// `k0 = 2x`, `z0 = -2E`: the Hermite equation, exactly solvable with
/// eigenvalues `E = 0, 1, 2, …` at every `x0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HermiteSeeds;

impl SeedModel for HermiteSeeds {
    fn seeds(&self, energy: &Real, x0: f64, len: usize, prec: Precision) -> Result<AimSeeds> {
        let poly = |c: Vec<Real>| TaylorSeries::polynomial(x0, c, len, prec);
        let one = || poly(vec![prec.real(1.0)]);
        let k0 = RationalSeries::new(poly(vec![prec.real(2.0 * x0), prec.real(2.0)]), one())?;
        let z0 = RationalSeries::new(poly(vec![prec.mul_f64(energy, -2.0)]), one())?;
        Ok(AimSeeds { k0, z0 })
    }
}

/// One step of the recursion on expanded series.
pub fn aim_step(
    k_prev: &TaylorSeries,
    z_prev: &TaylorSeries,
    k0: &TaylorSeries,
    z0: &TaylorSeries,
) -> Result<(TaylorSeries, TaylorSeries)> {
    check_depth(k_prev)?;
    let k = k_prev.derivative()?.add(z_prev)?.add(&k0.mul(k_prev)?)?;
    let z = z_prev.derivative()?.add(&z0.mul(k_prev)?)?;
    Ok((k, z))
}

fn check_depth(k_prev: &TaylorSeries) -> Result<()> {
    if k_prev.valid_len() < 2 {
        return Err(Error::SeriesExhausted(
            "AIM iteration ran out of Taylor coefficients; increase the initial series length".into(),
        ));
    }
    Ok(())
}

fn aim_step_rational(
    k_prev: &TaylorSeries,
    z_prev: &TaylorSeries,
    seeds: &AimSeeds,
) -> Result<(TaylorSeries, TaylorSeries)> {
    check_depth(k_prev)?;
    let k = k_prev.derivative()?.add(z_prev)?.add(&seeds.k0.times(k_prev)?)?;
    let z = z_prev.derivative()?.add(&seeds.z0.times(k_prev)?)?;
    Ok((k, z))
}

/// `Δ_n` at the common center.
pub fn delta_n(k_nm1: &TaylorSeries, z_nm1: &TaylorSeries, k_n: &TaylorSeries, z_n: &TaylorSeries) -> Result<Real> {
    let p = k_nm1.precision();
    let a = p.mul(&k_nm1.value_at_center()?, &z_n.value_at_center()?);
    let b = p.mul(&z_nm1.value_at_center()?, &k_n.value_at_center()?);
    Ok(p.sub(&a, &b))
}

/// `Δ_1 … Δ_{n_max}` at `x0` for one trial energy.
pub fn delta_sequence<M: SeedModel + ?Sized>(
    model: &M,
    energy: &Real,
    x0: f64,
    n_max: usize,
    prec: Precision,
) -> Result<Vec<Real>> {
    let seeds = model.seeds(energy, x0, n_max + 2, prec)?;
    deltas_with_seeds(&seeds, n_max)
}

fn delta_at<M: SeedModel + ?Sized>(model: &M, energy: &Real, x0: f64, n: usize, prec: Precision) -> Result<Real> {
    Ok(delta_sequence(model, energy, x0, n, prec)?.pop().expect("n >= 1"))
}

/// Trial energies: `count` values with `|E|` log-spaced between `|hi|` and
/// `|lo|` (both negative), ascending. Points crowd towards zero, where the
/// shallow levels sit.
pub fn log_energy_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = ((-hi).ln(), (-lo).ln());
    let mut g: Vec<f64> = (0..count)
        .map(|i| -(a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect();
    g.reverse();
    g
}

pub fn linear_energy_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// A refined root of `Δ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRoot {
    pub energy: f64,
    pub bracket: (f64, f64),
}

/// Bracketing false position with the Illinois modification; falls back to
/// bisection whenever the bracket stops halving.
fn refine<F: FnMut(&Real) -> Result<Real>>(mut f: F, lo: f64, hi: f64, prec: Precision, rel_tol: f64) -> Result<Real> {
    let mut a = prec.real(lo);
    let mut b = prec.real(hi);
    let mut fa = f(&a)?;
    let mut fb = f(&b)?;
    if fa.is_zero() {
        return Ok(a);
    }
    if fb.is_zero() {
        return Ok(b);
    }
    let tol = prec.real(rel_tol);
    let half = prec.real(0.5);
    let mut width_before = prec.sub(&b, &a).abs();
    for iter in 0..600 {
        let width = prec.sub(&b, &a).abs();
        let scale = a.abs().max(&b.abs());
        if width.cmp(&prec.mul(&tol, &scale)).is_some_and(|c| c <= 0) {
            break;
        }
        let bisect = iter % 4 == 3 && width.cmp(&prec.mul(&half, &width_before)).is_some_and(|c| c > 0);
        if iter % 4 == 3 {
            width_before = width.clone();
        }
        let c = if bisect {
            prec.mul(&half, &prec.add(&a, &b))
        } else {
            // c = b - fb (b - a) / (fb - fa)
            let den = prec.sub(&fb, &fa);
            let step = prec.div(&prec.mul(&fb, &prec.sub(&b, &a)), &den);
            let c = prec.sub(&b, &step);
            let inside = c.cmp(&a.min(&b)).is_some_and(|o| o > 0) && c.cmp(&a.max(&b)).is_some_and(|o| o < 0);
            if inside {
                c
            } else {
                prec.mul(&half, &prec.add(&a, &b))
            }
        };
        let fc = f(&c)?;
        if fc.is_zero() {
            return Ok(c);
        }
        if fc.is_negative() != fb.is_negative() {
            a = b;
            fa = fb;
        } else {
            fa = prec.mul(&half, &fa);
        }
        b = c;
        fb = fc;
    }
    Ok(prec.mul(&half, &prec.add(&a, &b)))
}

fn refine_delta_root<M: SeedModel + ?Sized>(
    model: &M,
    x0: f64,
    n: usize,
    lo: f64,
    hi: f64,
    prec: Precision,
) -> Result<f64> {
    let rel_tol = 10f64.powi(-(prec.digits() as i32 - 10));
    let root = refine(|e| delta_at(model, e, x0, n, prec), lo, hi, prec, rel_tol)?;
    Ok(to_f64(&root))
}

/// Sign-change brackets of `Δ_n` on `grid`, each refined to relative
/// `10^-(digits - 10)`.
pub fn delta_scan_grid<M: SeedModel + ?Sized>(
    model: &M,
    grid: &[f64],
    n: usize,
    x0: f64,
    prec: Precision,
) -> Result<Vec<DeltaRoot>> {
    if n == 0 {
        return Err(Error::InvalidConfig("iteration depth n must be at least 1".into()));
    }
    let negs: Vec<bool> = grid
        .iter()
        .map(|&e| delta_at(model, &prec.real(e), x0, n, prec).map(|d| d.is_negative()))
        .collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for i in 1..grid.len() {
        if negs[i - 1] != negs[i] {
            let energy = refine_delta_root(model, x0, n, grid[i - 1], grid[i], prec)?;
            roots.push(DeltaRoot {
                energy,
                bracket: (grid[i - 1], grid[i]),
            });
        }
    }
    Ok(roots)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AimConfig {
    pub x0: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub e_grid: usize,
    /// Lower end of the energy bracket; `None` means `1.02 * V_min`.
    pub e_lo: Option<f64>,
    pub e_hi: f64,
    pub stability_tol: f64,
    pub stability_runs: usize,
    pub precision: Precision,
    /// Initial Taylor length; `None` means `n_max + 4`.
    pub series_len: Option<usize>,
}

impl Default for AimConfig {
    fn default() -> Self {
        Self {
            x0: 0.0,
            n_min: 2,
            n_max: 120,
            e_grid: 2000,
            e_lo: None,
            e_hi: -1e-10,
            stability_tol: 1e-10,
            stability_runs: 3,
            precision: Precision::default(),
            series_len: None,
        }
    }
}

impl AimConfig {
    pub fn series_len(&self) -> usize {
        self.series_len.unwrap_or(self.n_max + 4)
    }

    /// Checks the invariants and resolves the energy bracket.
    pub fn resolve_bracket(&self, p: &PotentialParams) -> Result<(f64, f64)> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_min < 2 {
            return bad(format!("n_min must be at least 2 (got {})", self.n_min));
        }
        if self.n_max < self.n_min {
            return bad(format!(
                "n_max ({}) must not be below n_min ({})",
                self.n_max, self.n_min
            ));
        }
        if self.stability_runs < 2 {
            return bad("stability_runs must be at least 2".into());
        }
        if self.stability_runs > self.n_max {
            return bad("stability_runs cannot exceed n_max".into());
        }
        if self.e_grid < 2 {
            return bad("e_grid needs at least 2 points".into());
        }
        if !(self.stability_tol > 0.0) {
            return bad("stability_tol must be positive".into());
        }
        if !(self.x0.abs() < 1.0) {
            return Err(Error::Pole(self.x0));
        }
        if self.series_len() < self.n_max + 2 {
            return Err(Error::SeriesExhausted(format!(
                "{} iterations need an initial series length of at least {} (got {})",
                self.n_max,
                self.n_max + 2,
                self.series_len()
            )));
        }
        let lo = match self.e_lo {
            Some(lo) => lo,
            None => {
                let (_, vmin) = p.v_min().map_err(|e| {
                    Error::InvalidConfig(format!("cannot default the energy bracket ({e}); pass e_lo explicitly"))
                })?;
                1.02 * vmin
            }
        };
        if !(lo < self.e_hi && self.e_hi < 0.0) {
            return bad(format!(
                "energy bracket must satisfy e_lo < e_hi < 0 (got {lo} .. {})",
                self.e_hi
            ));
        }
        Ok((lo, self.e_hi))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AimLevel {
    pub energy: f64,
    pub converged: bool,
    /// Depth at which `energy` was computed.
    pub iterations: usize,
    /// `|E(n_max) - E(n_max - 1)|`.
    pub drift: f64,
    /// Grid cell holding the root at the deepest iteration.
    pub bracket: (f64, f64),
    /// Refined roots at the last `stability_runs` depths, deepest last.
    pub history: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AimResult {
    /// Every root alive at `n_max`, ascending in energy.
    pub levels: Vec<AimLevel>,
    pub n_max: usize,
    pub x0: f64,
    pub bracket: (f64, f64),
}

impl AimResult {
    /// Energies that passed the stability test, most bound first.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.levels.iter().filter(|l| l.converged).map(|l| l.energy).collect()
    }

    pub fn unconverged(&self) -> impl Iterator<Item = &AimLevel> {
        self.levels.iter().filter(|l| !l.converged)
    }
}

/// Root track across iteration depths: grid-cell index per depth.
#[derive(Debug, Clone)]
struct Track {
    first_n: usize,
    cells: Vec<usize>,
}

impl Track {
    fn last_n(&self) -> usize {
        self.first_n + self.cells.len() - 1
    }

    fn cell_at(&self, n: usize) -> Option<usize> {
        n.checked_sub(self.first_n).and_then(|i| self.cells.get(i).copied())
    }
}

/// Follows sign-change cells from `n_min` to `n_max`; a cell continues a
/// track when it sits within one grid cell of where the track was.
fn track_roots(signs: &[Vec<bool>], n_min: usize, n_max: usize) -> Vec<Track> {
    let mut tracks: Vec<Track> = Vec::new();
    for n in n_min..=n_max {
        let cells: Vec<usize> = (1..signs.len())
            .filter(|&i| signs[i - 1][n - 1] != signs[i][n - 1])
            .map(|i| i - 1)
            .collect();
        let mut taken = vec![false; cells.len()];
        let active: Vec<usize> = (0..tracks.len()).filter(|&t| tracks[t].last_n() + 1 == n).collect();
        for t in active {
            let prev = *tracks[t].cells.last().expect("tracks are never empty");
            let best = cells
                .iter()
                .enumerate()
                .filter(|(j, &c)| !taken[*j] && c.abs_diff(prev) <= 1)
                .min_by_key(|(_, &c)| c.abs_diff(prev));
            if let Some((j, &c)) = best {
                taken[j] = true;
                tracks[t].cells.push(c);
            }
        }
        for (j, &c) in cells.iter().enumerate() {
            if !taken[j] {
                tracks.push(Track {
                    first_n: n,
                    cells: vec![c],
                });
            }
        }
    }
    tracks.retain(|t| t.last_n() == n_max);
    tracks
}

/// Bound-state spectrum from the AIM.
///
/// One pass per grid energy yields the signs of every `Δ_n`, `n ≤ n_max`.
/// Roots are tracked across `n`; each root alive at `n_max` is refined at the
/// last `stability_runs` depths and accepted when successive values differ by
/// less than `stability_tol`.
pub fn aim_spectrum(p: &PotentialParams, cfg: &AimConfig) -> Result<AimResult> {
    if p.ell != 0 {
        return Err(Error::UnsupportedAngularMomentum(p.ell));
    }
    let (lo, hi) = cfg.resolve_bracket(p)?;
    let prec = cfg.precision;
    let grid = log_energy_grid(lo, hi, cfg.e_grid);
    let len = cfg.series_len();

    let signs: Vec<Vec<bool>> = grid
        .iter()
        .map(|&e| {
            let seeds = p.seeds(&prec.real(e), cfg.x0, len, prec)?;
            deltas_with_seeds(&seeds, cfg.n_max).map(|d| d.iter().map(|v| v.is_negative()).collect())
        })
        .collect::<Result<_>>()?;

    let tracks = track_roots(&signs, cfg.n_min, cfg.n_max);
    let mut levels = Vec::with_capacity(tracks.len());
    for t in &tracks {
        let first = cfg.n_max + 1 - cfg.stability_runs;
        let mut history = Vec::with_capacity(cfg.stability_runs);
        for n in first.max(t.first_n)..=cfg.n_max {
            let c = t.cell_at(n).expect("track spans n");
            history.push((n, refine_delta_root(p, cfg.x0, n, grid[c], grid[c + 1], prec)?));
        }
        let drifts: Vec<f64> = history.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
        let converged = history.len() == cfg.stability_runs && drifts.iter().all(|&d| d < cfg.stability_tol);
        let c = t.cell_at(cfg.n_max).expect("track alive at n_max");
        levels.push(AimLevel {
            energy: history.last().expect("at least one depth").1,
            converged,
            iterations: cfg.n_max,
            drift: drifts.last().copied().unwrap_or(f64::INFINITY),
            bracket: (grid[c], grid[c + 1]),
            history,
        });
    }
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(AimResult {
        levels,
        n_max: cfg.n_max,
        x0: cfg.x0,
        bracket: (lo, hi),
    })
}

fn deltas_with_seeds(seeds: &AimSeeds, n_max: usize) -> Result<Vec<Real>> {
    let mut k = seeds.k0.expand()?;
    let mut z = seeds.z0.expand()?;
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let (kn, zn) = aim_step_rational(&k, &z, seeds)?;
        out.push(delta_n(&k, &z, &kn, &zn)?);
        k = kn;
        z = zn;
    }
    Ok(out)
}
