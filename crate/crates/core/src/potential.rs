//! The three-parameter potential `V(r) = V0 (exp(-λr) - γ) / (exp(λr) - 1)`.
//!
//! Near the origin `V ~ Z/r` with `Z = V0 (1 - γ) / λ`; the remainder
//! `U = V - Z/r` is regular on `[0, ∞)`. The AIM works in `x = 1 - 2 exp(-λr)`.

use crate::error::{Error, Result};
use crate::series::{Precision, RationalSeries, Real, TaylorSeries};

/// Below `SERIES_SWITCH / λ` the regular part is taken from its expansion.
const SERIES_SWITCH: f64 = 0.1;

/// `1/(e^t - 1) - 1/t`, the Bernoulli generating function without its pole.
fn bernoulli_tail(t: f64) -> f64 {
    if t < SERIES_SWITCH {
        // Σ B_k t^(k-1) / k!, k = 1..10
        const C: [f64; 6] = [
            -0.5,
            1.0 / 12.0,
            -1.0 / 720.0,
            1.0 / 30240.0,
            -1.0 / 1209600.0,
            1.0 / 47900160.0,
        ];
        let t2 = t * t;
        let odd = C[1] + t2 * (C[2] + t2 * (C[3] + t2 * (C[4] + t2 * C[5])));
        return C[0] + t * odd;
    }
    1.0 / t.exp_m1() - 1.0 / t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    pub v0: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub ell: u32,
}

/// Outcome of the necessary (not sufficient) bound-state conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Precheck {
    Ok,
    Warning(String),
}

impl Precheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, Precheck::Ok)
    }
}

impl PotentialParams {
    pub fn new(v0: f64, lambda: f64, gamma: f64, ell: u32) -> Result<Self> {
        if !v0.is_finite() {
            return Err(Error::NonFinite("V0"));
        }
        if !gamma.is_finite() {
            return Err(Error::NonFinite("gamma"));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonPositiveLambda(lambda));
        }
        Ok(Self { v0, lambda, gamma, ell })
    }

    /// S-wave parameters.
    pub fn s_wave(v0: f64, lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(v0, lambda, gamma, 0)
    }

    /// True for `0 < γ < 1`, where the potential has both a barrier and a valley.
    pub fn interesting_regime(&self) -> bool {
        self.gamma > 0.0 && self.gamma < 1.0
    }

    pub fn eval_v(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::SingularPoint(r));
        }
        let t = self.lambda * r;
        Ok(self.v0 * ((-t).exp() - self.gamma) / t.exp_m1())
    }

    /// Residue `Z` of the `1/r` singularity.
    pub fn coulomb_strength(&self) -> f64 {
        self.v0 * (1.0 - self.gamma) / self.lambda
    }

    /// `U(0) = -V0 (3 - γ) / 2`.
    pub fn u_at_origin(&self) -> f64 {
        -0.5 * self.v0 * (3.0 - self.gamma)
    }

    /// Regular part `U(r) = V(r) - Z/r`, finite at the origin.
    pub fn eval_u(&self, r: f64) -> f64 {
        // (e^-t - γ)/(e^t - 1) = (1 - γ)/(e^t - 1) - e^-t, and Z/r takes the pole.
        let t = self.lambda * r.max(0.0);
        self.v0 * ((1.0 - self.gamma) * bernoulli_tail(t) - (-t).exp())
    }

    /// Necessary conditions for bound states: any `V0` when `0 < γ < 1`,
    /// otherwise `V0` must carry the sign of `γ`. The boundary values are
    /// grouped with the outer regimes (`γ ≥ 1` needs `V0 > 0`, `γ ≤ 0` needs
    /// `V0 < 0`).
    pub fn bound_state_precheck(&self) -> Precheck {
        if self.interesting_regime() {
            return Precheck::Ok;
        }
        let same_sign = if self.gamma >= 1.0 {
            self.v0 > 0.0
        } else {
            self.v0 < 0.0
        };
        if same_sign {
            Precheck::Ok
        } else {
            Precheck::Warning(format!(
                "gamma = {} lies outside (0, 1) and V0 = {} does not share its sign; \
                 bound states cannot exist",
                self.gamma, self.v0
            ))
        }
    }

    /// Location and depth of the potential valley.
    ///
    /// A log-spaced scan brackets the minimum, then golden-section search
    /// polishes it to relative `1e-12` in `r`.
    pub fn v_min(&self) -> Result<(f64, f64)> {
        if !self.interesting_regime() || !(self.v0 > 0.0) {
            return Err(Error::NoValley(format!(
                "a valley needs 0 < gamma < 1 and V0 > 0 (gamma = {}, V0 = {})",
                self.gamma, self.v0
            )));
        }
        const SCAN: usize = 10_000;
        let (lo, hi) = ((1e-6 / self.lambda).ln(), (400.0 / self.lambda).ln());
        let rs: Vec<f64> = (0..SCAN)
            .map(|i| (lo + (hi - lo) * i as f64 / (SCAN - 1) as f64).exp())
            .collect();
        let mut best = 0;
        let mut best_v = f64::INFINITY;
        for (i, &r) in rs.iter().enumerate() {
            let v = self.eval_v(r)?;
            if v < best_v {
                best_v = v;
                best = i;
            }
        }
        if best == 0 || best == SCAN - 1 || !(best_v < 0.0) {
            return Err(Error::NoValley("potential is monotone on the scan range".into()));
        }
        let r = golden_section(
            |r| self.eval_v(r).unwrap_or(f64::INFINITY),
            rs[best - 1],
            rs[best + 1],
            1e-12,
        );
        Ok((r, self.eval_v(r)?))
    }

    pub fn map_x(&self, r: f64) -> f64 {
        -2.0 * (-self.lambda * r).exp_m1() - 1.0
    }

    pub fn map_r(&self, x: f64) -> f64 {
        -((1.0 - x) / 2.0).ln() / self.lambda
    }

    /// The AIM seeds `k0 = 1/(1-x)` and
    /// `z0 = (2/λ²) [ (V0/2)/(1+x) - V0 γ/(1-x²) - E/(1-x)² ]`
    /// as unexpanded quotients of polynomials in `(x - x0)`.
    pub fn seed_rationals(
        &self,
        energy: &Real,
        x0: f64,
        len: usize,
        prec: Precision,
    ) -> Result<(RationalSeries, RationalSeries)> {
        if self.ell != 0 {
            return Err(Error::UnsupportedAngularMomentum(self.ell));
        }
        if !(x0.abs() < 1.0) {
            return Err(Error::Pole(x0));
        }
        let poly = |c: Vec<Real>| TaylorSeries::polynomial(x0, c, len, prec);
        let one_plus = poly(vec![prec.real(1.0 + x0), prec.real(1.0)]);
        let one_minus = poly(vec![prec.real(1.0 - x0), prec.real(-1.0)]);

        let k0 = RationalSeries::new(poly(vec![prec.real(1.0)]), one_minus.clone())?;

        let one_minus_sq = one_minus.mul(&one_minus)?;
        let den = one_plus.mul(&one_minus_sq)?;
        let half_v0 = prec.real(0.5 * self.v0);
        let v0_gamma = prec.mul(&prec.real(self.v0), &prec.real(self.gamma));
        let num = one_minus_sq
            .scale(&half_v0)
            .sub(&one_minus.scale(&v0_gamma))?
            .sub(&one_plus.scale(energy))?;
        let two_over_l2 = prec.div(
            &prec.real(2.0),
            &prec.mul(&prec.real(self.lambda), &prec.real(self.lambda)),
        );
        let z0 = RationalSeries::new(num.scale(&two_over_l2), den)?;
        Ok((k0, z0))
    }

    /// The seeds expanded as length-`len` Taylor series about `x0`.
    pub fn seed_functions(
        &self,
        energy: &Real,
        x0: f64,
        len: usize,
        prec: Precision,
    ) -> Result<(TaylorSeries, TaylorSeries)> {
        if len == 0 {
            return Err(Error::InvalidConfig("seed series length must be at least 1".into()));
        }
        let (k0, z0) = self.seed_rationals(energy, x0, len, prec)?;
        Ok((k0.expand()?, z0.expand()?))
    }
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
pub(crate) fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * (a.abs() + b.abs()) * 0.5 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
