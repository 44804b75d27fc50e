//! Hamiltonian diagonalization in the Laguerre (J-matrix) basis
//!
//! `χ_n(r) = (μr)^{ℓ+1} e^{-μr/2} L_n^{2ℓ+1}(μr)` (normalized Laguerre
//! polynomials). The Coulomb part `Z/r` plus the kinetic and centrifugal terms
//! form a tridiagonal reference Hamiltonian, the regular remainder `U(r)` is
//! evaluated by Gauss quadrature on the zeros of `L_N^{2ℓ+1}`, and the
//! generalized problem `H c = E S c` is solved against the tridiagonal overlap.

use crate::error::{Error, Result};
use crate::linalg::{generalized_eigen, tridiag_eigen, SymDense, SymTridiag};
use crate::potential::PotentialParams;

/// Something the HDM can diagonalize: `V(r) = Z/r + U(r)` with `U` regular.
pub trait HdmModel {
    fn coulomb(&self) -> f64;
    fn regular(&self, r: f64) -> f64;
}

impl HdmModel for PotentialParams {
    fn coulomb(&self) -> f64 {
        self.coulomb_strength()
    }
    fn regular(&self, r: f64) -> f64 {
        self.eval_u(r)
    }
}

/// Pure Coulomb potential `Z/r` (U ≡ 0).
#[derive(Debug, Clone, Copy)]
pub struct Coulomb {
    pub z: f64,
}

impl HdmModel for Coulomb {
    fn coulomb(&self) -> f64 {
        self.z
    }
    fn regular(&self, _r: f64) -> f64 {
        0.0
    }
}

/// Arbitrary `Z` and `U`, mostly for tests.
pub struct Custom<F: Fn(f64) -> f64> {
    pub z: f64,
    pub u: F,
}

impl<F: Fn(f64) -> f64> HdmModel for Custom<F> {
    fn coulomb(&self) -> f64 {
        self.z
    }
    fn regular(&self, r: f64) -> f64 {
        (self.u)(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HdmConfig {
    /// Basis size.
    pub n: usize,
    pub mu: f64,
    pub ell: u32,
    /// Quadrature order; `None` uses `n`.
    pub quadrature_n: Option<usize>,
}

impl Default for HdmConfig {
    fn default() -> Self {
        HdmConfig {
            n: 100,
            mu: 1.0,
            ell: 0,
            quadrature_n: None,
        }
    }
}

impl HdmConfig {
    pub fn new(n: usize, mu: f64, ell: u32) -> Result<Self> {
        let cfg = HdmConfig {
            n,
            mu,
            ell,
            quadrature_n: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        HdmConfig { mu, ..*self }
    }

    pub fn quadrature_order(&self) -> usize {
        self.quadrature_n.unwrap_or(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("basis size N must be at least 1".into()));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::InvalidConfig(format!("mu must be positive (got {})", self.mu)));
        }
        if self.quadrature_order() < self.n {
            return Err(Error::InvalidConfig(format!(
                "quadrature order {} is smaller than the basis size {}",
                self.quadrature_order(),
                self.n
            )));
        }
        Ok(())
    }
}

fn offdiag_factor(n: usize, ell: u32) -> f64 {
    let n = n as f64;
    let l = ell as f64;
    ((n + 1.0) * (n + 2.0 * l + 2.0)).sqrt()
}

fn overlap_of_size(size: usize, ell: u32) -> SymTridiag {
    let l = ell as f64;
    SymTridiag {
        diag: (0..size).map(|n| 2.0 * (n as f64 + l + 1.0)).collect(),
        offdiag: (0..size.saturating_sub(1)).map(|n| -offdiag_factor(n, ell)).collect(),
    }
}

/// Kinetic + centrifugal + `Z/r` in the basis.
pub fn h0_matrix(cfg: &HdmConfig, z: f64) -> Result<SymTridiag> {
    cfg.validate()?;
    let mu = cfg.mu;
    let l = cfg.ell as f64;
    let a = mu * mu / 4.0;
    Ok(SymTridiag {
        diag: (0..cfg.n).map(|n| a * (n as f64 + l + 1.0 + 4.0 * z / mu)).collect(),
        offdiag: (0..cfg.n - 1).map(|n| a / 2.0 * offdiag_factor(n, cfg.ell)).collect(),
    })
}

pub fn overlap_matrix(cfg: &HdmConfig) -> Result<SymTridiag> {
    cfg.validate()?;
    Ok(overlap_of_size(cfg.n, cfg.ell))
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Ascending, positive.
    pub nodes: Vec<f64>,
    /// Row-major `order × order`; column k is the normalized eigenvector of node k.
    vectors: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn lambda(&self, n: usize, k: usize) -> f64 {
        self.vectors[n * self.order() + k]
    }

    /// `Σ_k Λ_nk Λ_mk ω_k f(ω_k)` for `n, m < dim`.
    pub fn matrix(&self, dim: usize, f: impl Fn(f64) -> f64) -> SymDense {
        let q = self.order();
        let w: Vec<f64> = self.nodes.iter().map(|&x| x * f(x)).collect();
        let mut out = SymDense::zeros(dim);
        for n in 0..dim {
            let rn = &self.vectors[n * q..(n + 1) * q];
            for m in n..dim {
                let rm = &self.vectors[m * q..(m + 1) * q];
                let s: f64 = (0..q).map(|k| rn[k] * rm[k] * w[k]).sum();
                out.set(n, m, s);
            }
        }
        out
    }
}

/// Nodes and vectors from the eigen-decomposition of the overlap matrix of
/// size `quadrature_order()`.
pub fn quadrature(cfg: &HdmConfig) -> Result<QuadratureRule> {
    cfg.validate()?;
    let e = tridiag_eigen(&overlap_of_size(cfg.quadrature_order(), cfg.ell));
    let q = e.dim();
    let mut vectors = vec![0.0; q * q];
    for n in 0..q {
        for k in 0..q {
            vectors[n * q + k] = e.component(n, k);
        }
    }
    Ok(QuadratureRule {
        nodes: e.values,
        vectors,
    })
}

/// Potential matrix of an arbitrary regular `u(r)`.
pub fn u_matrix_with(cfg: &HdmConfig, u: impl Fn(f64) -> f64) -> Result<SymDense> {
    let rule = quadrature(cfg)?;
    let mu = cfg.mu;
    Ok(rule.matrix(cfg.n, |x| u(x / mu)))
}

pub fn u_matrix(p: &PotentialParams, cfg: &HdmConfig) -> Result<SymDense> {
    u_matrix_with(cfg, |r| p.eval_u(r))
}

pub fn hamiltonian<M: HdmModel + ?Sized>(model: &M, cfg: &HdmConfig) -> Result<SymDense> {
    let h0 = h0_matrix(cfg, model.coulomb())?;
    let u = u_matrix_with(cfg, |r| model.regular(r))?;
    h0.to_dense().add(&u)
}

/// All generalized eigenvalues of `H c = E S c`, ascending.
pub fn eigenvalues<M: HdmModel + ?Sized>(model: &M, cfg: &HdmConfig) -> Result<Vec<f64>> {
    let h = hamiltonian(model, cfg)?;
    let s = overlap_matrix(cfg)?;
    Ok(generalized_eigen(&h, &s)?.values)
}

/// Basis growth used to separate bound states from discretized continuum.
pub const CONFIRM_EXTRA: usize = 20;
pub const CONFIRM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct HdmSpectrum {
    pub mu: f64,
    pub n: usize,
    /// Negative eigenvalues stable under `N -> N + 20`, ascending.
    pub bound: Vec<f64>,
    /// Negative eigenvalues that moved by more than the tolerance.
    pub spurious: Vec<f64>,
    pub all: Vec<f64>,
}

pub fn spectrum<M: HdmModel + ?Sized>(model: &M, cfg: &HdmConfig) -> Result<HdmSpectrum> {
    let all = eigenvalues(model, cfg)?;
    let bigger = HdmConfig {
        n: cfg.n + CONFIRM_EXTRA,
        quadrature_n: cfg.quadrature_n.map(|q| q + CONFIRM_EXTRA),
        ..*cfg
    };
    let check = eigenvalues(model, &bigger)?;
    let mut bound = Vec::new();
    let mut spurious = Vec::new();
    for (k, &e) in all.iter().enumerate().take_while(|(_, e)| **e < 0.0) {
        if (e - check[k]).abs() < CONFIRM_TOL {
            bound.push(e);
        } else {
            spurious.push(e);
        }
    }
    Ok(HdmSpectrum {
        mu: cfg.mu,
        n: cfg.n,
        bound,
        spurious,
        all,
    })
}

pub fn hdm_spectrum(p: &PotentialParams, cfg: &HdmConfig) -> Result<HdmSpectrum> {
    if p.ell != cfg.ell {
        return Err(Error::InvalidConfig(format!(
            "angular momentum mismatch: potential has ell = {}, basis has ell = {}",
            p.ell, cfg.ell
        )));
    }
    spectrum(p, cfg)
}

/// Number of leading significant digits shared by `a` and `b`, in [0, 16].
pub fn shared_digits(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 || a == b {
        return 16.0;
    }
    (-((a - b).abs() / scale).log10()).clamp(0.0, 16.0)
}

/// Ground state must agree to this many digits between neighbouring μ.
pub const PLATEAU_DIGITS: f64 = 10.0;
pub const PLATEAU_MIN_POINTS: usize = 3;

#[derive(Debug, Clone)]
pub struct PlateauReport {
    pub mu: Vec<f64>,
    /// Negative eigenvalues at each μ, ascending.
    pub levels: Vec<Vec<f64>>,
    /// `digits[i][k]`: digits state k shares between `mu[i]` and `mu[i+1]`.
    pub digits: Vec<Vec<f64>>,
    /// Inclusive index range of the recommended window.
    pub window: Option<(usize, usize)>,
    /// Index of the chosen μ, inside the window when there is one.
    pub best: usize,
}

impl PlateauReport {
    pub fn no_plateau(&self) -> bool {
        self.window.is_none()
    }

    pub fn best_mu(&self) -> f64 {
        self.mu[self.best]
    }

    pub fn window_mu(&self) -> Option<(f64, f64)> {
        self.window.map(|(a, b)| (self.mu[a], self.mu[b]))
    }

    pub fn window_len(&self) -> usize {
        self.window.map_or(0, |(a, b)| b - a + 1)
    }

    /// Ground-state digits summed over all neighbouring pairs.
    pub fn ground_digits_total(&self) -> f64 {
        self.digits.iter().filter_map(|d| d.first()).sum()
    }

    /// Digits state k keeps over the whole window (spread relative to magnitude).
    pub fn window_digits(&self, k: usize) -> Option<f64> {
        let (a, b) = self.window?;
        let vals: Option<Vec<f64>> = (a..=b).map(|i| self.levels[i].get(k).copied()).collect();
        let vals = vals?;
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(shared_digits(lo, hi))
    }
}

fn log_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![(lo * hi).sqrt()];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..steps)
        .map(|i| (a + (b - a) * i as f64 / (steps - 1) as f64).exp())
        .collect()
}

fn pair_digits(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| shared_digits(x, y)).collect()
}

/// Scan μ on a log grid and locate the plateau of stability.
pub fn plateau_scan<M: HdmModel + ?Sized>(
    model: &M,
    cfg: &HdmConfig,
    mu_lo: f64,
    mu_hi: f64,
    steps: usize,
) -> Result<PlateauReport> {
    if !(mu_lo > 0.0 && mu_hi > mu_lo && mu_hi.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "need 0 < mu_lo < mu_hi (got {mu_lo}, {mu_hi})"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidConfig("plateau scan needs at least 2 steps".into()));
    }
    let mu = log_grid(mu_lo, mu_hi, steps);
    let mut levels = Vec::with_capacity(steps);
    for &m in &mu {
        let all = eigenvalues(model, &cfg.with_mu(m))?;
        levels.push(all.into_iter().take_while(|e| *e < 0.0).collect::<Vec<_>>());
    }
    let digits: Vec<Vec<f64>> = levels.windows(2).map(|w| pair_digits(&w[0], &w[1])).collect();

    // Longest run of consecutive stable pairs; first one wins ties.
    let mut window = None;
    let mut start = None;
    let mut best_len = 0;
    for i in 0..=digits.len() {
        let stable = digits
            .get(i)
            .and_then(|d| d.first())
            .is_some_and(|&d| d >= PLATEAU_DIGITS);
        match (stable, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                let points = i - s + 1;
                if points > best_len {
                    best_len = points;
                    window = Some((s, i));
                }
                start = None;
            }
            _ => {}
        }
    }
    if best_len < PLATEAU_MIN_POINTS {
        window = None;
    }

    let (a, b) = window.unwrap_or((0, steps - 1));
    let score = |i: usize| -> f64 {
        let left = if i > a { digits.get(i - 1) } else { None };
        let right = if i < b { digits.get(i) } else { None };
        let count = levels[i].len();
        (0..count)
            .map(|k| {
                let l = left.and_then(|d| d.get(k)).copied();
                let r = right.and_then(|d| d.get(k)).copied();
                match (l, r) {
                    (Some(l), Some(r)) => l.min(r),
                    (Some(x), None) | (None, Some(x)) => x,
                    (None, None) => 0.0,
                }
            })
            .sum()
    };
    let mut best = a;
    let mut best_score = f64::NEG_INFINITY;
    for i in a..=b {
        let s = score(i);
        if s > best_score {
            best_score = s;
            best = i;
        }
    }
    Ok(PlateauReport {
        mu,
        levels,
        digits,
        window,
        best,
    })
}

pub const DEFAULT_PLATEAU_STEPS: usize = 40;

/// Default μ search range `[λ/2, 20λ]`.
pub fn default_mu_range(p: &PotentialParams) -> (f64, f64) {
    (p.lambda / 2.0, 20.0 * p.lambda)
}

/// Spectrum at the plateau μ picked from the default scan.
pub fn hdm_spectrum_auto(p: &PotentialParams, n: usize) -> Result<(HdmSpectrum, PlateauReport)> {
    let cfg = HdmConfig::new(n, 1.0, p.ell)?;
    let (lo, hi) = default_mu_range(p);
    let plateau = plateau_scan(p, &cfg, lo, hi, DEFAULT_PLATEAU_STEPS)?;
    let spec = hdm_spectrum(p, &cfg.with_mu(plateau.best_mu()))?;
    Ok((spec, plateau))
}
