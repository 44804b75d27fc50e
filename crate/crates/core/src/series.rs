//! Truncated Taylor series over extended-precision reals.
//!
//! A [`TaylorSeries`] stores `coeffs[j] = f^(j)(x0) / j!` about a center `x0`
//! together with `valid_len`, the number of leading coefficients that are
//! trustworthy. Every binary operation truncates to the shorter operand and
//! every derivative consumes one order, so stale coefficients are never read.
//!
//! Products and quotients skip the zero tail of a short operand: multiplying
//! or dividing by a polynomial of degree `d` costs `O(len * d)`.

use astro_float::{BigFloat, RoundingMode, Sign};

use crate::error::{Error, Result};

pub type Real = BigFloat;

const RM: RoundingMode = RoundingMode::ToEven;

/// Decimal significant digits carried by the extended-precision arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    digits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Self {
            digits: Self::DEFAULT_DIGITS,
        }
    }
}

impl Precision {
    pub const DEFAULT_DIGITS: u32 = 64;
    pub const MIN_DIGITS: u32 = 16;

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::PrecisionTooLow(digits));
        }
        Ok(Self { digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Mantissa width in bits (astro-float rounds this up to whole words).
    pub fn bits(&self) -> usize {
        (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as usize
    }

    pub fn real(&self, v: f64) -> Real {
        BigFloat::from_f64(v, self.bits())
    }

    pub fn zero(&self) -> Real {
        self.real(0.0)
    }

    pub fn add(&self, a: &Real, b: &Real) -> Real {
        a.add(b, self.bits(), RM)
    }

    pub fn sub(&self, a: &Real, b: &Real) -> Real {
        a.sub(b, self.bits(), RM)
    }

    pub fn mul(&self, a: &Real, b: &Real) -> Real {
        a.mul(b, self.bits(), RM)
    }

    pub fn div(&self, a: &Real, b: &Real) -> Real {
        a.div(b, self.bits(), RM)
    }

    pub fn mul_f64(&self, a: &Real, b: f64) -> Real {
        self.mul(a, &self.real(b))
    }
}

/// Nearest `f64` to an extended-precision value.
pub fn to_f64(x: &Real) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let top = *words.last().unwrap_or(&0);
    // value = 0.mantissa * 2^exp, the top word holding the leading 64 bits
    let e = exp as i64 - 64;
    let mag = if e > 1100 {
        f64::INFINITY
    } else if e < -1200 {
        0.0
    } else {
        // split the scaling so neither factor over- or underflows on its own
        let half = (e / 2) as i32;
        (top as f64) * 2f64.powi(half) * 2f64.powi(e as i32 - half)
    };
    match sign {
        Sign::Neg => -mag,
        Sign::Pos => mag,
    }
}

/// Index one past the last nonzero coefficient among the first `len`.
fn support(coeffs: &[Real], len: usize) -> usize {
    coeffs[..len].iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1)
}

#[derive(Debug, Clone)]
pub struct TaylorSeries {
    center: f64,
    coeffs: Vec<Real>,
    valid_len: usize,
    prec: Precision,
}

impl TaylorSeries {
    /// Series from coefficients; all of them are taken as valid.
    pub fn from_reals(center: f64, coeffs: Vec<Real>, prec: Precision) -> Self {
        let valid_len = coeffs.len();
        Self {
            center,
            coeffs,
            valid_len,
            prec,
        }
    }

    pub fn from_f64s(center: f64, coeffs: &[f64], prec: Precision) -> Self {
        Self::from_reals(center, coeffs.iter().map(|&c| prec.real(c)).collect(), prec)
    }

    /// A polynomial in `(x - center)`, zero-padded so that `len` orders are valid.
    pub fn polynomial(center: f64, coeffs: Vec<Real>, len: usize, prec: Precision) -> Self {
        let mut coeffs = coeffs;
        coeffs.truncate(len);
        coeffs.resize_with(len, || prec.zero());
        Self::from_reals(center, coeffs, prec)
    }

    pub fn constant(center: f64, value: Real, len: usize, prec: Precision) -> Self {
        Self::polynomial(center, vec![value], len, prec)
    }

    pub fn zeros(center: f64, len: usize, prec: Precision) -> Self {
        Self::polynomial(center, Vec::new(), len, prec)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn valid_len(&self) -> usize {
        self.valid_len
    }

    /// The trustworthy coefficients.
    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs[..self.valid_len]
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coeffs().iter().map(to_f64).collect()
    }

    fn check_center(&self, other: &Self) -> Result<()> {
        if self.center != other.center {
            return Err(Error::CenterMismatch(self.center, other.center));
        }
        Ok(())
    }

    fn with_coeffs(&self, coeffs: Vec<Real>, prec: Precision) -> Self {
        Self::from_reals(self.center, coeffs, prec)
    }

    fn joint_precision(&self, other: &Self) -> Precision {
        if self.prec.digits >= other.prec.digits {
            self.prec
        } else {
            other.prec
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let p = self.joint_precision(other);
        let len = self.valid_len.min(other.valid_len);
        let coeffs = (0..len).map(|j| p.add(&self.coeffs[j], &other.coeffs[j])).collect();
        Ok(self.with_coeffs(coeffs, p))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let p = self.joint_precision(other);
        let len = self.valid_len.min(other.valid_len);
        let coeffs = (0..len).map(|j| p.sub(&self.coeffs[j], &other.coeffs[j])).collect();
        Ok(self.with_coeffs(coeffs, p))
    }

    pub fn scale(&self, factor: &Real) -> Self {
        let coeffs = self.coeffs().iter().map(|c| self.prec.mul(c, factor)).collect();
        self.with_coeffs(coeffs, self.prec)
    }

    /// Cauchy product truncated to the shorter valid length.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let p = self.joint_precision(other);
        let len = self.valid_len.min(other.valid_len);
        let sa = support(&self.coeffs, len);
        let sb = support(&other.coeffs, len);
        let mut out = Vec::with_capacity(len);
        for j in 0..len {
            let mut acc = p.zero();
            if sa > 0 && sb > 0 {
                let lo = (j + 1).saturating_sub(sb);
                let hi = j.min(sa - 1);
                for i in lo..=hi {
                    acc = p.add(&acc, &p.mul(&self.coeffs[i], &other.coeffs[j - i]));
                }
            }
            out.push(acc);
        }
        Ok(self.with_coeffs(out, p))
    }

    /// Long division `self / other`; the divisor's constant term must not vanish.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_center(other)?;
        let p = self.joint_precision(other);
        let len = self.valid_len.min(other.valid_len);
        if len == 0 {
            return Ok(self.with_coeffs(Vec::new(), p));
        }
        if other.coeffs[0].is_zero() {
            return Err(Error::PoleAtCenter);
        }
        let inv0 = p.div(&p.real(1.0), &other.coeffs[0]);
        let sb = support(&other.coeffs, len);
        let mut q: Vec<Real> = Vec::with_capacity(len);
        for j in 0..len {
            let mut acc = self.coeffs[j].clone();
            for i in 1..sb.min(j + 1) {
                acc = p.sub(&acc, &p.mul(&other.coeffs[i], &q[j - i]));
            }
            q.push(p.mul(&acc, &inv0));
        }
        Ok(self.with_coeffs(q, p))
    }

    pub fn derivative(&self) -> Result<Self> {
        if self.valid_len == 0 {
            return Err(Error::SeriesExhausted(
                "cannot differentiate a series with no valid coefficients".into(),
            ));
        }
        let coeffs = (1..self.valid_len)
            .map(|j| self.prec.mul_f64(&self.coeffs[j], j as f64))
            .collect();
        Ok(self.with_coeffs(coeffs, self.prec))
    }

    pub fn value_at_center(&self) -> Result<Real> {
        if self.valid_len == 0 {
            return Err(Error::SeriesExhausted("series has no valid coefficients".into()));
        }
        Ok(self.coeffs[0].clone())
    }
}

/// Quotient of two polynomial series, kept unexpanded so that multiplying
/// another series by it costs `O(len * degree)` rather than a full product.
#[derive(Debug, Clone)]
pub struct RationalSeries {
    pub num: TaylorSeries,
    pub den: TaylorSeries,
}

impl RationalSeries {
    pub fn new(num: TaylorSeries, den: TaylorSeries) -> Result<Self> {
        num.check_center(&den)?;
        if den.valid_len > 0 && den.coeffs[0].is_zero() {
            return Err(Error::PoleAtCenter);
        }
        Ok(Self { num, den })
    }

    pub fn expand(&self) -> Result<TaylorSeries> {
        self.num.div(&self.den)
    }

    /// `self * f`, truncated to `f`'s valid length.
    pub fn times(&self, f: &TaylorSeries) -> Result<TaylorSeries> {
        self.num.mul(f)?.div(&self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn s(c: &[f64]) -> TaylorSeries {
        TaylorSeries::from_f64s(0.0, c, p())
    }

    #[test]
    fn precision_floor() {
        assert!(Precision::new(15).is_err());
        assert_eq!(Precision::new(16).unwrap().digits(), 16);
        assert_eq!(Precision::default().digits(), 64);
    }

    #[test]
    fn to_f64_round_trips_doubles() {
        for v in [1.0, -3.0, 0.75, 1e-300, -2.5e280, 0.1, 0.0, 123456.789] {
            assert_eq!(to_f64(&p().real(v)), v);
        }
    }

    #[test]
    fn add_examples() {
        assert_eq!(
            s(&[1., 2., 3.]).add(&s(&[0., 0., 0.])).unwrap().to_f64_vec(),
            [1., 2., 3.]
        );
        assert_eq!(s(&[1., 1.]).add(&s(&[-1., -1.])).unwrap().to_f64_vec(), [0., 0.]);
        let geo = s(&[1., 1., 1., 1.]);
        let alt = s(&[1., -1., 1., -1.]);
        assert_eq!(geo.add(&alt).unwrap().to_f64_vec(), [2., 0., 2., 0.]);
    }

    #[test]
    fn add_truncates_to_shorter() {
        let r = s(&[1., 2., 3., 4.]).add(&s(&[1., 1.])).unwrap();
        assert_eq!(r.valid_len(), 2);
    }

    #[test]
    fn center_mismatch_is_an_error() {
        let a = TaylorSeries::from_f64s(0.0, &[1.0], p());
        let b = TaylorSeries::from_f64s(0.3, &[1.0], p());
        assert!(matches!(a.add(&b), Err(Error::CenterMismatch(..))));
        assert!(matches!(a.mul(&b), Err(Error::CenterMismatch(..))));
        assert!(matches!(a.div(&b), Err(Error::CenterMismatch(..))));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(
            s(&[1., 1., 0.]).mul(&s(&[1., -1., 0.])).unwrap().to_f64_vec(),
            [1., 0., -1.]
        );
        let a = s(&[3., -2., 5., 7.]);
        assert_eq!(a.mul(&s(&[1., 0., 0., 0.])).unwrap().to_f64_vec(), [3., -2., 5., 7.]);
        let geo = s(&[1., 1., 1., 1.]);
        assert_eq!(geo.mul(&geo).unwrap().to_f64_vec(), [1., 2., 3., 4.]);
    }

    #[test]
    fn mul_by_zero_series() {
        let z = TaylorSeries::zeros(0.0, 3, p());
        assert_eq!(s(&[1., 2., 3.]).mul(&z).unwrap().to_f64_vec(), [0., 0., 0.]);
    }

    #[test]
    fn div_examples() {
        let r = s(&[1., 0., 0., 0.]).div(&s(&[1., 1., 0., 0.])).unwrap();
        assert_eq!(r.to_f64_vec(), [1., -1., 1., -1.]);
        let a = s(&[2., -1., 0.5, 3.]);
        assert_eq!(a.div(&a).unwrap().to_f64_vec(), [1., 0., 0., 0.]);
    }

    #[test]
    fn div_consistency_square_of_quotient() {
        // (1/(1-x))^2 two ways
        let one = s(&[1., 0., 0., 0.]);
        let lin = s(&[1., -1., 0., 0.]);
        let q = one.div(&lin).unwrap();
        let sq = q.mul(&q).unwrap();
        let direct = one.div(&lin.mul(&lin).unwrap()).unwrap();
        assert_eq!(sq.to_f64_vec(), direct.to_f64_vec());
        assert_eq!(sq.to_f64_vec(), [1., 2., 3., 4.]);
    }

    #[test]
    fn div_by_pole_is_an_error() {
        assert!(matches!(s(&[1., 2.]).div(&s(&[0., 1.])), Err(Error::PoleAtCenter)));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(s(&[4., 3., 2., 1.]).derivative().unwrap().to_f64_vec(), [3., 4., 3.]);
        assert_eq!(
            s(&[1., 1., 1., 1., 1.]).derivative().unwrap().to_f64_vec(),
            [1., 2., 3., 4.]
        );
        let d = s(&[5., 0., 0.]).derivative().unwrap();
        assert_eq!(d.to_f64_vec(), [0., 0.]);
        assert_eq!(d.valid_len(), 2);
    }

    #[test]
    fn derivative_exhaustion() {
        let one = s(&[1.]);
        let d = one.derivative().unwrap();
        assert_eq!(d.valid_len(), 0);
        assert!(matches!(d.derivative(), Err(Error::SeriesExhausted(_))));
        assert!(matches!(d.value_at_center(), Err(Error::SeriesExhausted(_))));
    }

    #[test]
    fn value_at_center_examples() {
        assert_eq!(to_f64(&s(&[7., 1., 2.]).value_at_center().unwrap()), 7.0);
        assert_eq!(
            to_f64(&TaylorSeries::zeros(0.0, 3, p()).value_at_center().unwrap()),
            0.0
        );
    }

    #[test]
    fn polynomial_padding_keeps_products_cheap_and_exact() {
        let lin = TaylorSeries::polynomial(0.0, vec![p().real(1.0), p().real(-1.0)], 50, p());
        let one = TaylorSeries::constant(0.0, p().real(1.0), 50, p());
        let geo = one.div(&lin).unwrap();
        assert_eq!(geo.valid_len(), 50);
        assert!(geo.to_f64_vec().iter().all(|&c| c == 1.0));
    }

    #[test]
    fn off_center_geometric() {
        // 1/(1-x) about x0 = 0.5: coefficients 2^(j+1)
        let x0 = 0.5;
        let lin = TaylorSeries::from_f64s(x0, &[1.0 - x0, -1.0, 0.0, 0.0], p());
        let one = TaylorSeries::from_f64s(x0, &[1.0, 0.0, 0.0, 0.0], p());
        assert_eq!(one.div(&lin).unwrap().to_f64_vec(), [2., 4., 8., 16.]);
    }
}
