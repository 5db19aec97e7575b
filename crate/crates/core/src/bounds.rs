//! Closed-form bounds: the Singleton-type distance bound, the length bound
//! for codes with information locality, and optimality classification.
//!
//! The length bound involves `q` raised to rational exponents. Those powers
//! are enclosed in a rational interval of width `2^-128` times the
//! coefficient, so the reported floor is certified whenever both interval
//! ends share it.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// `n - k + 1 - (⌈k/r⌉ - 1)(δ - 1)`.
pub fn singleton_bound(n: usize, k: usize, r: usize, delta: usize) -> Result<i64, BoundsError> {
    if k == 0 || r == 0 || delta == 0 {
        return Err(BoundsError::InvalidParameter("need k >= 1, r >= 1, delta >= 1".into()));
    }
    let (n, k, r, delta) = (n as i64, k as i64, r as i64, delta as i64);
    Ok(n - k + 1 - ((k + r - 1) / r - 1) * (delta - 1))
}

/// Precision (bits) of the enclosure of irrational powers.
const PRECISION_BITS: u32 = 128;

/// A certified enclosure `[lower, upper]` of the length bound for one `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthBound {
    pub a: usize,
    /// `T(a) = ⌊(h+δ-a-1)/δ⌋`.
    pub t: usize,
    /// Exponent of `q`, reduced: `(numerator, denominator)`.
    pub exponent: (u64, u64),
    pub lower: BigRational,
    pub upper: BigRational,
}

impl LengthBound {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    /// `⌊value⌋` when the enclosure determines it.
    pub fn certified_floor(&self) -> Option<BigInt> {
        let lo = self.lower.floor().to_integer();
        let hi_floor = self.upper.floor().to_integer();
        // An upper end sitting exactly on an integer is excluded unless exact.
        let hi = if !self.is_exact() && self.upper.is_integer() { hi_floor - 1 } else { hi_floor };
        (lo == hi).then_some(lo)
    }

    pub fn value_f64(&self) -> f64 {
        let mid = (&self.lower + &self.upper) / BigRational::from_integer(2.into());
        ratio_to_f64(&mid)
    }

    pub fn summary(&self) -> LengthBoundSummary {
        LengthBoundSummary {
            a: self.a,
            t: self.t,
            exponent: format!("{}/{}", self.exponent.0, self.exponent.1),
            value: self.value_f64(),
            lower: decimal(&self.lower, 12),
            upper: decimal(&self.upper, 12),
            exact: self.is_exact(),
            floor: self.certified_floor().and_then(|f| f.to_u64()),
        }
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering truncated toward negative infinity.
fn decimal(r: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (r * BigRational::from_integer(scale.clone())).floor().to_integer();
    let (int, frac) = scaled.div_mod_floor(&scale);
    format!("{}.{:0width$}", int, frac, width = digits as usize)
}

/// JSON-friendly view of a [`LengthBound`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthBoundSummary {
    pub a: usize,
    pub t: usize,
    pub exponent: String,
    pub value: f64,
    pub lower: String,
    pub upper: String,
    pub exact: bool,
    pub floor: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LengthBoundResult {
    Bound(LengthBound),
    /// The hypothesis `T(a) >= 2` fails.
    Inapplicable { a: usize, t: usize },
}

/// Interval `[lo, hi]` containing `q^(num/den)`, with `hi - lo <= 2^-128`.
fn rational_power(q: u64, num: u64, den: u64) -> (BigRational, BigRational) {
    let base = BigUint::from(q).pow(num as u32);
    if den == 1 {
        let x = BigRational::from_integer(base.into());
        return (x.clone(), x);
    }
    let scaled = base << (PRECISION_BITS as usize * den as usize);
    let root = scaled.nth_root(den as u32);
    let denom = BigInt::one() << PRECISION_BITS as usize;
    let lo = BigRational::new(BigInt::from(root.clone()), denom.clone());
    if root.pow(den as u32) == scaled {
        return (lo.clone(), lo);
    }
    let hi = BigRational::new(BigInt::from(root + 1u32), denom);
    (lo, hi)
}

/// The length bound for codes with `(r,δ)` information locality and
/// `d = h + δ` over `F_q`, at a given `0 <= a <= h`.
pub fn length_bound(q: u64, r: usize, delta: usize, h: usize, a: usize) -> Result<LengthBoundResult, BoundsError> {
    if q < 2 || r == 0 || delta < 2 {
        return Err(BoundsError::InvalidParameter("need q >= 2, r >= 1, delta >= 2".into()));
    }
    if a > h {
        return Err(BoundsError::InvalidParameter(format!("a = {a} exceeds h = {h}")));
    }
    let t = (h + delta - a - 1) / delta;
    if t < 2 {
        return Ok(LengthBoundResult::Inapplicable { a, t });
    }
    let int = |x: usize| BigRational::from_integer(BigInt::from(x));
    let ratio = |n: usize, d: usize| BigRational::new(BigInt::from(n), BigInt::from(d));
    let (count, exp_num, exp_den, shift) = if t % 2 == 1 {
        (t - 1, 2 * (h - a - 1) as u64, (t - 1) as u64, a + 1)
    } else {
        (t, 2 * (h - a) as u64, t as u64, a)
    };
    let g = exp_num.gcd(&exp_den).max(1);
    let (exp_num, exp_den) = (exp_num / g, exp_den / g);
    let (plo, phi) = rational_power(q, exp_num, exp_den);
    let lead = ratio(r + delta - 1, r);
    let coeff = ratio(count, 2 * (q as usize - 1));
    let tail = ratio(h * (delta - 1), r);
    let eval = |p: &BigRational| &lead * (&coeff * p + int(shift)) - &tail;
    Ok(LengthBoundResult::Bound(LengthBound {
        a,
        t,
        exponent: (exp_num, exp_den),
        lower: eval(&plo),
        upper: eval(&phi),
    }))
}

/// Parameters of a code to classify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub delta: usize,
    /// Measured or claimed minimum distance.
    pub d: usize,
    /// Number of global parities, if declared; must equal `d - δ`.
    #[serde(default)]
    pub h: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PerA {
    Bound(LengthBoundSummary),
    Inapplicable { a: usize, t: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub d_singleton: i64,
    pub d: usize,
    pub optimal: bool,
    pub n_max_by_a: Vec<PerA>,
    /// Floor of the smallest applicable bound.
    pub best_n_max: Option<u64>,
    /// `n <= best_n_max`, when some `a` applies.
    pub within_length_bound: Option<bool>,
    /// `k` is not a multiple of `r`: the length bound is then advisory.
    pub advisory: bool,
    /// `2(h-a)/T(a) - 1` at the minimizing `a`: codes of length `Θ(q^e)` are order optimal.
    pub order_exponent: Option<String>,
    pub notes: Vec<String>,
}

/// Singleton optimality and the length bound over every applicable `a`.
pub fn classify(code: &CodeParams, q: u64) -> Result<BoundReport, BoundsError> {
    let d_singleton = singleton_bound(code.n, code.k, code.r, code.delta)?;
    let optimal = d_singleton == code.d as i64;
    let mut notes = Vec::new();
    let advisory = !code.k.is_multiple_of(code.r);
    if advisory {
        notes.push(format!("k = {} is not a multiple of r = {}; length bound is advisory", code.k, code.r));
    }
    let h = match (code.d.checked_sub(code.delta), code.h) {
        (Some(h), None) => Some(h),
        (Some(h), Some(given)) if h == given => Some(h),
        (_, Some(given)) => {
            notes.push(format!("d = {} differs from h + delta = {}; length bound inapplicable", code.d, given + code.delta));
            None
        }
        (None, None) => {
            notes.push("d < delta; length bound inapplicable".into());
            None
        }
    };
    let mut n_max_by_a = Vec::new();
    let mut best: Option<LengthBound> = None;
    if let Some(h) = h {
        for a in 0..=h {
            match length_bound(q, code.r, code.delta, h, a)? {
                LengthBoundResult::Inapplicable { a, t } => n_max_by_a.push(PerA::Inapplicable { a, t }),
                LengthBoundResult::Bound(b) => {
                    n_max_by_a.push(PerA::Bound(b.summary()));
                    if best.as_ref().is_none_or(|x| b.upper < x.lower) {
                        best = Some(b);
                    }
                }
            }
        }
    }
    let best_n_max = best.as_ref().and_then(|b| b.certified_floor()).and_then(|f| f.to_u64());
    if best.is_some() && best_n_max.is_none() {
        notes.push("minimum bound is not certified to a single integer floor".into());
    }
    let within_length_bound = best_n_max.map(|m| code.n as u64 <= m);
    let order_exponent = best.as_ref().map(|b| {
        let e = BigRational::new(BigInt::from(b.exponent.0), BigInt::from(b.exponent.1)) - BigRational::one();
        if e.is_negative() || e.is_zero() || e.is_integer() {
            e.to_integer().to_string()
        } else {
            format!("{}/{}", e.numer(), e.denom())
        }
    });
    Ok(BoundReport {
        d_singleton,
        d: code.d,
        optimal,
        n_max_by_a,
        best_n_max,
        within_length_bound,
        advisory,
        order_exponent,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bound(q: u64, r: usize, delta: usize, h: usize, a: usize) -> LengthBound {
        match length_bound(q, r, delta, h, a).unwrap() {
            LengthBoundResult::Bound(b) => b,
            other => panic!("expected a bound, got {other:?}"),
        }
    }

    #[test]
    fn singleton_values() {
        assert_eq!(singleton_bound(24, 14, 2, 2).unwrap(), 5);
        assert_eq!(singleton_bound(657, 505, 7, 3).unwrap(), 9);
        assert_eq!(singleton_bound(15, 5, 9, 4).unwrap(), 11);
        assert_eq!(singleton_bound(40, 24, 2, 2).unwrap(), 6);
        assert!(singleton_bound(10, 0, 2, 2).is_err());
    }

    #[test]
    fn even_case_small_field() {
        let b = bound(11, 2, 2, 3, 0);
        assert_eq!(b.t, 2);
        assert!(b.is_exact());
        // 1.5 * (11^3 / 10) - 1.5
        assert_eq!(b.lower, BigRational::new(BigInt::from(39_930 - 300), BigInt::from(200)));
        assert_eq!(b.certified_floor(), Some(BigInt::from(198)));
        assert_eq!(b.summary().lower, "198.150000000000");
    }

    #[test]
    fn inapplicable_when_t_small() {
        assert_eq!(length_bound(11, 2, 2, 3, 1).unwrap(), LengthBoundResult::Inapplicable { a: 1, t: 1 });
        assert!(length_bound(11, 2, 2, 3, 4).is_err());
    }

    #[test]
    fn odd_case_and_irrational_exponent() {
        // δ = 2, h = 6, a = 0: T = 3 (odd), exponent 10/2 = 5.
        let b = bound(7, 3, 2, 6, 0);
        assert_eq!((b.t, b.exponent), (3, (5, 1)));
        assert!(b.is_exact());
        // δ = 2, h = 7, a = 0: T = 4, exponent 14/4 = 7/2.
        let b = bound(11, 2, 2, 7, 0);
        assert_eq!((b.t, b.exponent), (4, (7, 2)));
        assert!(!b.is_exact());
        let w = b.width();
        assert!(w > BigRational::zero());
        assert!(w * BigRational::from_integer(BigInt::from(1_000_000)) < b.lower);
        let expected = 1.5 * (4.0 / 20.0 * 11f64.powf(3.5)) - 3.5;
        assert!((b.value_f64() - expected).abs() < 1e-6);
        assert_eq!(b.certified_floor().and_then(|f| f.to_i64()), Some(expected.floor() as i64));
    }

    #[test]
    fn monotone_in_q() {
        for (r, delta, h) in [(2, 2, 3), (3, 2, 5), (7, 3, 6), (2, 3, 9)] {
            for a in 0..=h {
                let mut prev: Option<BigRational> = None;
                for q in [4u64, 5, 7, 8, 9, 11, 13, 16, 79] {
                    if let LengthBoundResult::Bound(b) = length_bound(q, r, delta, h, a).unwrap() {
                        if let Some(p) = &prev {
                            assert!(b.upper >= *p, "q={q} r={r} delta={delta} h={h} a={a}");
                        }
                        prev = Some(b.lower);
                    }
                }
            }
        }
    }

    #[test]
    fn classify_example_codes() {
        let rep = classify(&CodeParams { n: 24, k: 14, r: 2, delta: 2, d: 5, h: None }, 11).unwrap();
        assert!(rep.optimal);
        assert_eq!(rep.best_n_max, Some(198));
        assert_eq!(rep.within_length_bound, Some(true));
        assert!(!rep.advisory);

        let rep = classify(&CodeParams { n: 657, k: 505, r: 7, delta: 3, d: 9, h: Some(6) }, 79).unwrap();
        assert!(rep.optimal && rep.advisory);
        assert_eq!(rep.within_length_bound, Some(true));

        // Fabricated parameters exceeding the bound.
        let rep = classify(&CodeParams { n: 500, k: 300, r: 2, delta: 2, d: 5, h: None }, 11).unwrap();
        assert_eq!(rep.within_length_bound, Some(false));

        let rep = classify(&CodeParams { n: 24, k: 14, r: 2, delta: 2, d: 5, h: Some(2) }, 11).unwrap();
        assert_eq!(rep.best_n_max, None);
        assert!(rep.n_max_by_a.is_empty());
    }
}
