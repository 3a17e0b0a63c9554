//! Rational enclosures of logarithms.
//!
//! `ln 2 = 2 atanh(1/3)` and `ln m = 2 atanh((m-1)/(m+1))` for `m ∈ [1, 2]`,
//! each summed to a fixed number of terms with the geometric tail bound
//! added to the upper end. Endpoints are rounded outward to multiples of
//! `2^-PRECISION_BITS` to keep the rationals small.

use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use serde::Serialize;

pub const PRECISION_BITS: u32 = 96;

/// A closed interval `[lo, hi]` of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn scale() -> BigInt {
    BigInt::one() << PRECISION_BITS
}

fn floor_dyadic(x: &BigRational) -> BigRational {
    let s = scale();
    let n = (x * BigRational::from_integer(s.clone())).floor().to_integer();
    BigRational::new(n, s)
}

fn ceil_dyadic(x: &BigRational) -> BigRational {
    let s = scale();
    let n = (x * BigRational::from_integer(s.clone())).ceil().to_integer();
    BigRational::new(n, s)
}

impl Interval {
    pub fn point(x: BigRational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    fn rounded(lo: BigRational, hi: BigRational) -> Self {
        Interval {
            lo: floor_dyadic(&lo),
            hi: ceil_dyadic(&hi),
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn scale_by(&self, c: &BigRational) -> Interval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c.is_negative() {
            Interval::rounded(b, a)
        } else {
            Interval::rounded(a, b)
        }
    }

    /// Division by an interval of strictly positive numbers.
    pub fn div_positive(&self, d: &Interval) -> Interval {
        assert!(d.lo.is_positive(), "divisor must be positive");
        let cands = [
            &self.lo / &d.lo,
            &self.lo / &d.hi,
            &self.hi / &d.lo,
            &self.hi / &d.hi,
        ];
        let lo = cands.iter().min().expect("nonempty").clone();
        let hi = cands.iter().max().expect("nonempty").clone();
        Interval::rounded(lo, hi)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / BigRational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, o: &Interval) -> Interval {
        Interval::rounded(&self.lo + &o.lo, &self.hi + &o.hi)
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, o: &Interval) -> Interval {
        Interval::rounded(&self.lo - &o.hi, &self.hi - &o.lo)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.15}, {:.15}]",
            self.lo.to_f64().unwrap_or(f64::NAN),
            self.hi.to_f64().unwrap_or(f64::NAN)
        )
    }
}

/// Enclosure of `2 atanh(z)` for rational `0 ≤ z ≤ 1/3`.
fn two_atanh(z: &BigRational) -> Interval {
    assert!(!z.is_negative() && *z <= BigRational::new(1.into(), 3.into()));
    const TERMS: u32 = 34;
    let z2 = z * z;
    let mut power = z.clone();
    let mut sum = BigRational::zero();
    for k in 0..TERMS {
        sum += &power / BigRational::from_integer((2 * k + 1).into());
        // flooring keeps the partial sum a lower bound
        power = floor_dyadic(&(&power * &z2));
    }
    // remaining terms: Σ_{k ≥ TERMS} z^{2k+1}/(2k+1) ≤ z^{2T+1} / (1 - z²)
    let mut exact_power = z.clone();
    for _ in 0..TERMS {
        exact_power = ceil_dyadic(&(&exact_power * &z2));
    }
    let tail = &exact_power / (BigRational::one() - &z2);
    // the floored powers lose fewer than TERMS ulps in total
    let slack = BigRational::new(BigInt::from(TERMS), scale());
    let two = BigRational::from_integer(2.into());
    Interval::rounded(&sum * &two, (&sum + &tail + &slack) * &two)
}

static LN2: Lazy<Interval> = Lazy::new(|| two_atanh(&BigRational::new(1.into(), 3.into())));

pub fn ln2() -> Interval {
    LN2.clone()
}

/// Enclosure of `ln x` for rational `x ∈ [1, 2]`.
fn ln_unit(x: &BigRational) -> Interval {
    let one = BigRational::one();
    assert!(*x >= one && *x <= BigRational::from_integer(2.into()));
    two_atanh(&((x - &one) / (x + &one)))
}

/// Enclosure of `ln n` for a positive integer.
pub fn ln_biguint(n: &BigUint) -> Interval {
    assert!(!n.is_zero(), "ln 0");
    let e = n.bits() - 1;
    // n = 2^e · m with m ∈ [1, 2); bracket m by dyadics with 64 fractional bits
    let (m_lo, m_hi) = if e <= 64 {
        let m = BigRational::new(BigInt::from(n.clone()), BigInt::one() << e);
        (m.clone(), m)
    } else {
        let shift = e - 64;
        let top = n >> shift;
        let exact = (&top << shift) == *n;
        let den = BigInt::one() << 64u32;
        let lo = BigRational::new(BigInt::from(top.clone()), den.clone());
        let hi = if exact {
            lo.clone()
        } else {
            BigRational::new(BigInt::from(top + 1u32), den)
        };
        (lo, hi)
    };
    let l = ln2().scale_by(&BigRational::from_integer(BigInt::from(e)));
    let lo = &l.lo + &ln_unit(&m_lo).lo;
    let hi = &l.hi + &ln_unit(&m_hi).hi;
    Interval::rounded(lo, hi)
}

pub fn ln_u64(n: u64) -> Interval {
    ln_biguint(&BigUint::from(n))
}

/// A value `rational + coeff · ln 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LnExpr {
    #[serde(serialize_with = "ser_rational")]
    pub rational: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub ln2_coeff: BigRational,
}

pub fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(r))
}

pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl LnExpr {
    pub fn zero() -> Self {
        LnExpr {
            rational: BigRational::zero(),
            ln2_coeff: BigRational::zero(),
        }
    }

    pub fn ln2_multiple(c: BigRational) -> Self {
        LnExpr {
            rational: BigRational::zero(),
            ln2_coeff: c,
        }
    }

    pub fn interval(&self) -> Interval {
        let l = ln2().scale_by(&self.ln2_coeff);
        &l + &Interval::point(self.rational.clone())
    }

    pub fn to_f64(&self) -> f64 {
        self.interval().midpoint_f64()
    }

    pub fn div_rational(&self, d: &BigRational) -> LnExpr {
        LnExpr {
            rational: &self.rational / d,
            ln2_coeff: &self.ln2_coeff / d,
        }
    }
}

impl fmt::Display for LnExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.ln2_coeff.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", rational_string(&self.rational)),
            (true, false) => write!(f, "({})·ln2", rational_string(&self.ln2_coeff)),
            (false, false) => write!(
                f,
                "{} + ({})·ln2",
                rational_string(&self.rational),
                rational_string(&self.ln2_coeff)
            ),
        }
    }
}

/// `⌈x⌉` for a rational.
pub fn ceil_rational(x: &BigRational) -> BigInt {
    let (q, r) = x.numer().div_mod_floor(x.denom());
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ln2_is_tight_and_correct() {
        let l = ln2();
        assert!(l.width() < r(1, 1_000_000_000_000));
        assert!(l.lo.to_f64().unwrap() <= std::f64::consts::LN_2);
        assert!(l.hi.to_f64().unwrap() >= std::f64::consts::LN_2);
        let digits: BigInt = "693147180559945309417232121458".parse().unwrap();
        let ten30 = num_traits::pow(BigInt::from(10), 30);
        let ulp = BigRational::new(1.into(), ten30.clone());
        let known = BigRational::new(digits, ten30);
        assert!(l.lo <= &known + &ulp && known <= l.hi);
    }

    #[test]
    fn ln_integers() {
        for n in [1u64, 2, 3, 10, 1000, 123456789, u64::MAX] {
            let i = ln_u64(n);
            let f = (n as f64).ln();
            assert!(i.lo.to_f64().unwrap() <= f + 1e-12, "{n}");
            assert!(i.hi.to_f64().unwrap() >= f - 1e-12, "{n}");
            assert!(i.width() < r(1, 1_000_000_000_000), "{n}");
        }
        let big = BigUint::one() << 300u32;
        let i = ln_biguint(&big);
        assert!((i.midpoint_f64() - 300.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!(ln_u64(1).contains(&BigRational::zero()));
    }

    #[test]
    fn ln_expr_display() {
        let e = LnExpr::ln2_multiple(r(1, 9));
        assert_eq!(e.to_string(), "(1/9)·ln2");
        assert!((e.to_f64() - std::f64::consts::LN_2 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn ceiling() {
        assert_eq!(ceil_rational(&r(7, 2)), 4.into());
        assert_eq!(ceil_rational(&r(6, 2)), 3.into());
        assert_eq!(ceil_rational(&r(-7, 2)), (-3).into());
    }
}
