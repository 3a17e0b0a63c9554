//! Formal wedges of mod `p^r` Moore spaces `P^n(p^r)` (top cell in
//! dimension `n`, reduced homology `Z/p^r` in dimension `n - 1`).
//!
//! A wedge is stored as its dimension polynomial `Σ c_n x^n`. When `p` is odd,
//! or `p = 2` and `r ≥ 2`, smashing follows `P^n ∧ P^m ≃ P^{n+m} ∨ P^{n+m-1}`,
//! i.e. polynomial multiplication with `x^n · x^m ↦ x^{n+m} + x^{n+m-1}`.
//! For `p = 2`, `r = 1` no such rule holds and smashing is refused.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::is_prime;
use crate::free_lie::{binomial, multidegree_count, LieError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MooreError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("the torsion exponent r must be at least 1")]
    ZeroExponent,
    #[error("Moore spaces P^n need n >= 2 (got {0})")]
    DimensionTooSmall(u32),
    #[error("mod 2 Moore spaces with r = 1 have no wedge decomposition of smash products")]
    UnsupportedRegime,
    #[error("wedges over different coefficients: {0} vs {1}")]
    CoefficientMismatch(String, String),
    #[error("summand {0} is opaque and cannot be smashed")]
    Opaque(String),
    #[error("smash powers need k >= 1")]
    ZeroPower,
    #[error("Hilton-Milnor factors need dim1 <= dim2 and weight >= 1")]
    BadFactorQuery,
    #[error("iterated smash disagrees with x^n(x^n + x^(n-1))^(k-1) at dimension {0}")]
    PolynomialMismatch(u32),
    #[error(transparent)]
    Lie(#[from] LieError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    OddP,
    TwoRGeq2,
    TwoR1,
}

impl Regime {
    pub fn of(p: u64, r: u32) -> Result<Regime, MooreError> {
        if !is_prime(p) {
            return Err(MooreError::NotPrime(p));
        }
        if r == 0 {
            return Err(MooreError::ZeroExponent);
        }
        Ok(match (p, r) {
            (2, 1) => Regime::TwoR1,
            (2, _) => Regime::TwoRGeq2,
            _ => Regime::OddP,
        })
    }
}

/// A summand carried by label only, with its recorded total reduced
/// homology dimension.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ExoticSummand {
    pub label: String,
    pub homology_dim: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MooreWedge {
    p: u64,
    r: u32,
    regime: Regime,
    #[serde(serialize_with = "serialize_coefficients")]
    coefficients: BTreeMap<u32, BigUint>,
    exotic: Vec<(ExoticSummand, u64)>,
}

fn serialize_coefficients<S: serde::Serializer>(
    c: &BTreeMap<u32, BigUint>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(c.len()))?;
    for (k, v) in c {
        map.serialize_entry(&k.to_string(), &v.to_string())?;
    }
    map.end()
}

impl MooreWedge {
    pub fn empty(p: u64, r: u32) -> Result<Self, MooreError> {
        Ok(MooreWedge {
            p,
            r,
            regime: Regime::of(p, r)?,
            coefficients: BTreeMap::new(),
            exotic: Vec::new(),
        })
    }

    /// A single `P^n(p^r)`.
    pub fn moore(n: u32, p: u64, r: u32) -> Result<Self, MooreError> {
        Self::from_multiplicities(p, r, &[(n, 1)])
    }

    pub fn from_multiplicities(p: u64, r: u32, entries: &[(u32, u64)]) -> Result<Self, MooreError> {
        let mut w = Self::empty(p, r)?;
        for &(n, c) in entries {
            w.add_summand(n, BigUint::from(c))?;
        }
        Ok(w)
    }

    pub fn add_summand(&mut self, n: u32, count: BigUint) -> Result<(), MooreError> {
        if n < 2 {
            return Err(MooreError::DimensionTooSmall(n));
        }
        if !count.is_zero() {
            *self.coefficients.entry(n).or_default() += count;
        }
        Ok(())
    }

    pub fn add_exotic(&mut self, summand: ExoticSummand, count: u64) {
        self.exotic.push((summand, count));
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, BigUint> {
        &self.coefficients
    }

    pub fn exotic(&self) -> &[(ExoticSummand, u64)] {
        &self.exotic
    }

    pub fn multiplicity(&self, n: u32) -> BigUint {
        self.coefficients.get(&n).cloned().unwrap_or_default()
    }

    pub fn moore_count(&self) -> BigUint {
        self.coefficients.values().sum()
    }

    /// Total reduced `F_p` homology dimension: 2 per Moore summand plus the
    /// recorded dimension of each opaque summand.
    pub fn homology_dim(&self) -> BigUint {
        let moore = self.moore_count() * 2u32;
        let exotic: BigUint = self
            .exotic
            .iter()
            .map(|(e, c)| BigUint::from(e.homology_dim) * *c)
            .sum();
        moore + exotic
    }

    pub fn smash(&self, other: &MooreWedge) -> Result<MooreWedge, MooreError> {
        if (self.p, self.r) != (other.p, other.r) {
            return Err(MooreError::CoefficientMismatch(
                format!("{}^{}", self.p, self.r),
                format!("{}^{}", other.p, other.r),
            ));
        }
        if self.regime == Regime::TwoR1 {
            return Err(MooreError::UnsupportedRegime);
        }
        if let Some((e, _)) = self.exotic.iter().chain(&other.exotic).next() {
            return Err(MooreError::Opaque(e.label.clone()));
        }
        let mut out = MooreWedge::empty(self.p, self.r)?;
        for (&n, a) in &self.coefficients {
            for (&m, b) in &other.coefficients {
                let c = a * b;
                out.add_summand(n + m, c.clone())?;
                out.add_summand(n + m - 1, c)?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for MooreWedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .exotic
            .iter()
            .map(|(e, c)| {
                if *c == 1 {
                    e.label.clone()
                } else {
                    format!("{c}·{}", e.label)
                }
            })
            .collect();
        for (n, c) in self.coefficients.iter().rev() {
            let term = format!("P^{n}({}^{})", self.p, self.r);
            parts.push(if c.is_one() { term } else { format!("{c}·{term}") });
        }
        if parts.is_empty() {
            return write!(f, "*");
        }
        write!(f, "{}", parts.join(" ∨ "))
    }
}

/// `(P^n(p^r))^{∧k}`, computed by iterated smashing and checked against
/// the closed form `x^n (x^n + x^{n-1})^{k-1}`, whose coefficient at
/// `x^{kn-j}` is `C(k-1, j)`.
pub fn smash_power(n: u32, k: u32, p: u64, r: u32) -> Result<MooreWedge, MooreError> {
    if k == 0 {
        return Err(MooreError::ZeroPower);
    }
    let base = MooreWedge::moore(n, p, r)?;
    let mut acc = base.clone();
    for _ in 1..k {
        acc = acc.smash(&base)?;
    }
    for j in 0..k {
        let dim = k * n - j;
        if acc.multiplicity(dim) != binomial((k - 1) as u64, j as u64) {
            return Err(MooreError::PolynomialMismatch(dim));
        }
    }
    if acc.moore_count() != BigUint::one() << (k - 1) {
        return Err(MooreError::PolynomialMismatch(0));
    }
    Ok(acc)
}

/// The recorded decomposition `(ℝP²)^{∧3} ≃ ℝP² ∧ ℂP² ∨ P⁵(2) ∨ P⁵(2)`.
/// Stored data, not derived here.
pub fn mod2_cube() -> MooreWedge {
    let mut w = MooreWedge::from_multiplicities(2, 1, &[(5, 2)]).expect("valid record");
    w.add_exotic(
        ExoticSummand {
            label: "RP2∧CP2".into(),
            homology_dim: 4,
        },
        1,
    );
    w
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddingStep {
    pub s: u32,
    pub dimension: u32,
    #[serde(serialize_with = "as_string")]
    pub count: BigUint,
}

/// Moore summands `P^d(2)` found inside `(ℝP²)^{∧(2s+1)}`: start from
/// `ℝP² = P²(2)`; smashing a `P^d(2)` with `(ℝP²)^{∧2}` gives
/// `Σ^{d-2}(ℝP²)^{∧3}`, whose Moore part (read off the cube record) has the
/// recorded multiplicity in dimension `d - 2 + 5`.
pub fn mod2_embedding_trace(s: u32) -> Vec<EmbeddingStep> {
    let cube = mod2_cube();
    let (&top, mult) = cube
        .coefficients()
        .iter()
        .next()
        .expect("cube record has a Moore part");
    let shift = top - 2;
    let mut out = vec![EmbeddingStep {
        s: 0,
        dimension: 2,
        count: BigUint::one(),
    }];
    for step in 1..=s {
        let prev = out.last().expect("nonempty");
        let next = EmbeddingStep {
            s: step,
            dimension: prev.dimension + shift,
            count: &prev.count * mult,
        };
        out.push(next);
    }
    out
}

pub fn mod2_embedding_count(s: u32) -> (u32, BigUint) {
    let last = mod2_embedding_trace(s).pop().expect("nonempty");
    (last.dimension, last.count)
}

/// One Hilton–Milnor factor `ΩΣ Σ^{(d₂-d₁)a₂} (P^{d₁})^{∧w}` for the wedge
/// `P^{d₁} ∨ P^{d₂}`, with the number of basic products of multidegree
/// `(a₁, a₂)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HmFactor {
    pub a1: u32,
    pub a2: u32,
    pub suspension: u32,
    pub base_dim: u32,
    pub smash_power: u32,
    #[serde(serialize_with = "crate::moore::as_string")]
    pub multiplicity: BigUint,
}

pub(crate) fn as_string<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn hilton_milnor_factors(dim1: u32, dim2: u32, weight: u32) -> Result<Vec<HmFactor>, MooreError> {
    if dim1 > dim2 || weight == 0 {
        return Err(MooreError::BadFactorQuery);
    }
    let mut out = Vec::new();
    for a2 in 0..=weight {
        let a1 = weight - a2;
        let multiplicity = multidegree_count(a1 as u64, a2 as u64)?;
        if multiplicity.is_zero() {
            continue;
        }
        out.push(HmFactor {
            a1,
            a2,
            suspension: (dim2 - dim1) * a2,
            base_dim: dim1,
            smash_power: weight,
            multiplicity,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(w: &MooreWedge) -> Vec<(u32, u64)> {
        w.coefficients()
            .iter()
            .map(|(&n, c)| (n, c.try_into().unwrap()))
            .collect()
    }

    #[test]
    fn smash_examples() {
        let a = MooreWedge::moore(3, 5, 1).unwrap();
        assert_eq!(coeffs(&a.smash(&a).unwrap()), vec![(5, 1), (6, 1)]);
        let b = MooreWedge::moore(3, 2, 2).unwrap();
        let c = MooreWedge::moore(4, 2, 2).unwrap();
        assert_eq!(coeffs(&b.smash(&c).unwrap()), vec![(6, 1), (7, 1)]);
        let cube = a.smash(&a).unwrap().smash(&a).unwrap();
        assert_eq!(coeffs(&cube), vec![(7, 1), (8, 2), (9, 1)]);
    }

    #[test]
    fn smash_refusals() {
        let m2 = MooreWedge::moore(3, 2, 1).unwrap();
        assert_eq!(m2.smash(&m2), Err(MooreError::UnsupportedRegime));
        let a = MooreWedge::moore(3, 5, 1).unwrap();
        let b = MooreWedge::moore(3, 5, 2).unwrap();
        assert!(matches!(a.smash(&b), Err(MooreError::CoefficientMismatch(..))));
        assert!(MooreWedge::moore(1, 3, 1).is_err());
        assert!(Regime::of(4, 1).is_err());
    }

    #[test]
    fn smash_power_examples() {
        assert_eq!(coeffs(&smash_power(4, 1, 3, 1).unwrap()), vec![(4, 1)]);
        assert_eq!(coeffs(&smash_power(4, 2, 3, 1).unwrap()), vec![(7, 1), (8, 1)]);
        assert_eq!(
            coeffs(&smash_power(3, 3, 5, 1).unwrap()),
            vec![(7, 1), (8, 2), (9, 1)]
        );
        assert_eq!(smash_power(3, 0, 5, 1), Err(MooreError::ZeroPower));
    }

    #[test]
    fn cube_record() {
        let cube = mod2_cube();
        assert_eq!(coeffs(&cube), vec![(5, 2)]);
        assert_eq!(cube.exotic().len(), 1);
        assert_eq!(cube.homology_dim(), BigUint::from(8u32));
        let p = MooreWedge::moore(3, 2, 1).unwrap();
        assert!(cube.smash(&p).is_err());
    }

    #[test]
    fn embedding_counts() {
        assert_eq!(mod2_embedding_count(0), (2, BigUint::from(1u32)));
        assert_eq!(mod2_embedding_count(1), (5, BigUint::from(2u32)));
        assert_eq!(mod2_embedding_count(3), (11, BigUint::from(8u32)));
    }

    #[test]
    fn hilton_milnor_examples() {
        let w1 = hilton_milnor_factors(4, 6, 1).unwrap();
        assert_eq!(w1.len(), 2);
        assert!(w1.iter().all(|f| f.multiplicity == BigUint::one()));
        let w2 = hilton_milnor_factors(4, 6, 2).unwrap();
        assert_eq!(w2.len(), 1);
        assert_eq!((w2[0].a1, w2[0].a2, w2[0].suspension), (1, 1, 2));
        let total: BigUint = hilton_milnor_factors(4, 6, 3)
            .unwrap()
            .iter()
            .map(|f| f.multiplicity.clone())
            .sum();
        assert_eq!(total, BigUint::from(2u32));
        assert!(hilton_milnor_factors(6, 4, 2).is_err());
    }

    #[test]
    fn display() {
        let a = MooreWedge::from_multiplicities(3, 1, &[(5, 2), (6, 1)]).unwrap();
        assert_eq!(a.to_string(), "P^6(3^1) ∨ 2·P^5(3^1)");
        assert_eq!(
            mod2_cube().to_string(),
            "RP2∧CP2 ∨ 2·P^5(2^1)"
        );
    }
}
