//! Degree/count schedules for torsion summands and certified lower bounds on
//! their exponential growth rate `liminf ln(count) / degree`.
//!
//! Every schedule here has counts of the form `2^{us+u₀} · W(vs+v₀)` with
//! `W` the two-letter Witt dimension, and degrees within a bounded distance
//! of `δ s`. Since `m W(m) ≥ 2^m - Σ_{j ≤ m/2} 2^j ≥ 2^{m-1}` for `m ≥ 1`,
//!
//! ```text
//! ln count(s) ≥ (us + u₀ + vs + v₀ - 1) ln 2 - ln(vs + v₀)
//! ```
//!
//! so the liminf of the rate is at least `(u + v) ln 2 / δ`, which is also
//! its limit. The bound `m W(m) ≥ 2^{m-1}` is rechecked on every entry.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::is_prime;
use crate::free_lie::{tensor_dim_upto, witt_dim, LieError};
use crate::lambda::tilde_dim_upto;
use crate::logbounds::{
    ln_biguint, ln_u64, rational_string, ser_rational, Interval, LnExpr,
};
use crate::moore::Regime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrowthError {
    #[error("gcd(M + l·i, A) = {gcd} ≠ 1 at i = {i}")]
    GcdCondition { i: u64, gcd: u64 },
    #[error("the residue congruence has no unique solution at i = {0}")]
    NoSolution(u64),
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("schedule is empty")]
    EmptySchedule,
    #[error("arithmetic overflow in degree computation")]
    Overflow,
    #[error("the cover misses index {0}")]
    CoverIncomplete(u64),
    #[error("limits {0} and {1} are too close to order")]
    Undecided(String, String),
    #[error(transparent)]
    Lie(#[from] LieError),
}

fn range(msg: impl Into<String>) -> GrowthError {
    GrowthError::Range(msg.into())
}

pub fn check_gcd_condition(m: u64, l: u64, modulus: u64) -> bool {
    first_gcd_failure(m, l, modulus).is_none()
}

/// First `i` in `0..A` with `gcd(M + l i, A) ≠ 1`.
pub fn first_gcd_failure(m: u64, l: u64, modulus: u64) -> Option<(u64, u64)> {
    (0..modulus).find_map(|i| {
        let g = (m + l * i).gcd(&modulus);
        (g != 1).then_some((i, g))
    })
}

/// The unique `n mod A` with `coeff · n ≡ rhs (mod A)`, if `coeff` is a unit.
pub fn solve_linear_congruence(coeff: u64, rhs: i64, modulus: u64) -> Option<u64> {
    assert!(modulus >= 1);
    let a = modulus as i128;
    let c = (coeff as i128).rem_euclid(a);
    let ext = c.extended_gcd(&a);
    if ext.gcd != 1 {
        return None;
    }
    let inv = ext.x.rem_euclid(a);
    Some(((rhs as i128).rem_euclid(a) * inv).rem_euclid(a) as u64)
}

/// Which suspension pattern the residue argument uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Mod 2 homology: any suspension `Σ^t` is available,
    /// `A(nl+1)n' + (M+li)n + i + 1 ≡ a (mod A)`.
    Mod2,
    /// Odd primes: only even suspensions,
    /// `2A(nl+1)n' + 2(M+li)n + 2i + 1 ≡ 2a + 1 (mod 2A)`.
    OddPrime,
}

/// Solves the residue congruence for `n mod A`; the `A(nl+1)n'` term
/// vanishes mod `A`, leaving `(M + l i) n ≡ a - i - 1`.
pub fn solve_step1_congruence(m: u64, l: u64, modulus: u64, a: i64, i: u64) -> Option<u64> {
    solve_residue_congruence(Variant::Mod2, m, l, modulus, a, i)
}

pub fn solve_residue_congruence(
    variant: Variant,
    m: u64,
    l: u64,
    modulus: u64,
    a: i64,
    i: u64,
) -> Option<u64> {
    let rhs = match variant {
        Variant::Mod2 => a - i as i64 - 1,
        Variant::OddPrime => a - i as i64,
    };
    solve_linear_congruence(m + l * i, rhs, modulus)
}

/// All residues `n mod A` satisfying the full residue congruence, found by
/// evaluating it directly (including the `n'` term, at several `n'`).
pub fn congruence_residues_brute_force(
    variant: Variant,
    m: u64,
    l: u64,
    modulus: u64,
    a: i64,
    i: u64,
) -> Vec<u64> {
    let a_mod = modulus as i128;
    (0..modulus)
        .filter(|&n| {
            (0..3i128).all(|np| {
                let n = n as i128;
                let (lhs, target, md) = match variant {
                    Variant::Mod2 => (
                        a_mod * (n * l as i128 + 1) * np + (m + l * i) as i128 * n + i as i128 + 1,
                        a as i128,
                        a_mod,
                    ),
                    Variant::OddPrime => (
                        2 * a_mod * (n * l as i128 + 1) * np
                            + 2 * (m + l * i) as i128 * n
                            + 2 * i as i128
                            + 1,
                        2 * a as i128 + 1,
                        2 * a_mod,
                    ),
                };
                (lhs - target).rem_euclid(md) == 0
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoublingStep {
    pub iteration: u32,
    #[serde(serialize_with = "crate::moore::as_string")]
    pub multiplicity: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Doubling {
    #[serde(serialize_with = "crate::moore::as_string")]
    pub multiplicity: BigUint,
    pub trace: Vec<DoublingStep>,
}

/// Copies of `Σ^{snM+1}X` inside `ΣX^{∧(snl+1)}` when each smash with
/// `X^{∧nl}` followed by the `base`-fold splitting multiplies the count by
/// `base`.
pub fn doubling_multiplicity(base: u64, s: u32) -> Doubling {
    let mut trace = vec![DoublingStep {
        iteration: 0,
        multiplicity: BigUint::one(),
    }];
    for it in 1..=s {
        let prev = &trace.last().expect("nonempty").multiplicity;
        trace.push(DoublingStep {
            iteration: it,
            multiplicity: prev * base,
        });
    }
    Doubling {
        multiplicity: trace.last().expect("nonempty").multiplicity.clone(),
        trace,
    }
}

/// Inputs of the general hyperbolicity criterion. The homotopy-theoretic
/// hypotheses (retract, multiplicity ≥ 2, torsion summands) are assumed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HyperbolicityParams {
    pub p: u64,
    pub r: u32,
    /// `M`: suspension slope of the retract `Σ^{nM+1}X`.
    pub m: u64,
    /// `l`: smash slope, the retract lives in weight `nl + 1`.
    pub l: u64,
    /// `A`: suspension slope of the torsion hypothesis.
    pub modulus: u64,
    /// `a`: suspension offset of the torsion hypothesis.
    pub a: i64,
    /// `K`: degree slope of the torsion hypothesis.
    pub k_slope: u64,
    /// `k`: degree offset of the torsion hypothesis.
    pub k_offset: i64,
    /// `n₀`: the index at which the multiplicity hypothesis holds.
    pub n0: u64,
    /// Smallest `n` for which the retract and torsion hypotheses hold.
    pub n_min: u64,
    pub variant: Variant,
}

impl HyperbolicityParams {
    pub fn validate(&self) -> Result<(), GrowthError> {
        if !is_prime(self.p) {
            return Err(range(format!("{} is not prime", self.p)));
        }
        match self.variant {
            Variant::Mod2 if self.p != 2 => return Err(range("the mod 2 variant needs p = 2")),
            Variant::OddPrime if self.p == 2 => {
                return Err(range("the odd variant needs an odd prime"))
            }
            _ => {}
        }
        for (name, v) in [
            ("r", self.r as u64),
            ("M", self.m),
            ("l", self.l),
            ("A", self.modulus),
            ("K", self.k_slope),
            ("n0", self.n0),
        ] {
            if v == 0 {
                return Err(range(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// `D = (n₀l+1)(n₀ + n₀l/2) = (n₀l+1)n₀ + n₀l(n₀l+1)/2`, always an
    /// integer: the total suspension of `Σ^{n₀M}X ∧ .. ∧ Σ^{(n₀+n₀l)M}X`
    /// divided by `M`.
    pub fn d(&self) -> Result<u128, GrowthError> {
        let w = (self.n0 as u128)
            .checked_mul(self.l as u128)
            .ok_or(GrowthError::Overflow)?;
        let a = (w + 1).checked_mul(self.n0 as u128).ok_or(GrowthError::Overflow)?;
        let b = w.checked_mul(w + 1).ok_or(GrowthError::Overflow)? / 2;
        a.checked_add(b).ok_or(GrowthError::Overflow)
    }

    /// `(D + n₀) n₀ l M + n₀ M`, the growth of the degree expression per step.
    pub fn slope(&self) -> Result<u128, GrowthError> {
        let (n0, l, m) = (self.n0 as u128, self.l as u128, self.m as u128);
        let t = (self.d()? + n0)
            .checked_mul(n0 * l * m)
            .ok_or(GrowthError::Overflow)?;
        t.checked_add(n0 * m).ok_or(GrowthError::Overflow)
    }

    /// `c = ⌈slope / A⌉ + 1`, so that `N(s+1) - N(s) < c`.
    pub fn gap_bound(&self) -> Result<u128, GrowthError> {
        Ok(self.slope()?.div_ceil(self.modulus as u128) + 1)
    }

    /// The suspension degree reached at step `s`:
    /// `(sn₀l+1)(D+n₀)M + sn₀M + 1` (mod 2 variant) or the same without the
    /// `+1` (odd variant, where the actual suspension is twice this plus 1).
    pub fn degree_expression(&self, s: u64) -> Result<u128, GrowthError> {
        let (n0, l, m) = (self.n0 as u128, self.l as u128, self.m as u128);
        let s = s as u128;
        let head = (s * n0 * l + 1)
            .checked_mul(self.d()? + n0)
            .and_then(|x| x.checked_mul(m))
            .ok_or(GrowthError::Overflow)?;
        let total = head
            .checked_add(s * n0 * m)
            .ok_or(GrowthError::Overflow)?;
        Ok(match self.variant {
            Variant::Mod2 => total + 1,
            Variant::OddPrime => total,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EuclidStep {
    pub s: u64,
    #[serde(serialize_with = "ser_u128")]
    pub expression: u128,
    #[serde(serialize_with = "ser_u128")]
    pub n: u128,
    pub i: u64,
    #[serde(serialize_with = "ser_u128")]
    pub gap_bound: u128,
}

fn ser_u128<S: serde::Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
    match u64::try_from(*v) {
        Ok(x) => s.serialize_u64(x),
        Err(_) => s.serialize_str(&v.to_string()),
    }
}

/// Euclidean division of the degree expression by `A`.
pub fn euclid_schedule(params: &HyperbolicityParams, s: u64) -> Result<EuclidStep, GrowthError> {
    params.validate()?;
    let e = params.degree_expression(s)?;
    let a = params.modulus as u128;
    Ok(EuclidStep {
        s,
        expression: e,
        n: e / a,
        i: (e % a) as u64,
        gap_bound: params.gap_bound()?,
    })
}

/// Per-residue data from the first step: the residue class of admissible
/// `n`, the least such `n ≥ n_min`, and the resulting degree slope
/// `K^{(i)} = K (n_i l + 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueEntry {
    pub i: u64,
    pub residue: u64,
    pub n_i: u64,
    pub k_i: u64,
}

pub fn residue_table(params: &HyperbolicityParams) -> Result<Vec<ResidueEntry>, GrowthError> {
    params.validate()?;
    if let Some((i, gcd)) = first_gcd_failure(params.m, params.l, params.modulus) {
        return Err(GrowthError::GcdCondition { i, gcd });
    }
    (0..params.modulus)
        .map(|i| {
            let residue = solve_residue_congruence(
                params.variant,
                params.m,
                params.l,
                params.modulus,
                params.a,
                i,
            )
            .ok_or(GrowthError::NoSolution(i))?;
            let a = params.modulus;
            let base = params.n_min.max(1);
            let n_i = base + (residue + a - base % a) % a;
            let k_i = params
                .k_slope
                .checked_mul(n_i * params.l + 1)
                .ok_or(GrowthError::Overflow)?;
            Ok(ResidueEntry {
                i,
                residue,
                n_i,
                k_i,
            })
        })
        .collect()
}

/// `2^{us + u₀} · W(vs + v₀)` (the Witt factor is omitted when `witt` is
/// `None`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountModel {
    pub pow2_slope: u64,
    pub pow2_offset: u64,
    pub witt: Option<(u64, u64)>,
}

impl CountModel {
    pub fn constant_one() -> Self {
        CountModel {
            pow2_slope: 0,
            pow2_offset: 0,
            witt: None,
        }
    }

    pub fn count(&self, s: u64) -> Result<BigUint, GrowthError> {
        let mut c = BigUint::one() << (self.pow2_slope * s + self.pow2_offset);
        if let Some((v, v0)) = self.witt {
            c *= witt_dim(2, v * s + v0)?;
        }
        Ok(c)
    }

    /// Asymptotic `ln count / s`, as a multiple of `ln 2`.
    pub fn ln2_rate(&self) -> u64 {
        self.pow2_slope + self.witt.map_or(0, |(v, _)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleEntry {
    pub s: u64,
    #[serde(serialize_with = "ser_u128")]
    pub degree: u128,
    #[serde(serialize_with = "crate::moore::as_string")]
    pub count: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthSchedule {
    pub provenance: String,
    pub entries: Vec<ScheduleEntry>,
    pub count_model: CountModel,
    /// Degrees satisfy `|degree(s) - δ s| ≤ offset_bound`.
    #[serde(serialize_with = "ser_rational")]
    pub degree_slope: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub offset_bound: BigRational,
}

impl GrowthSchedule {
    pub fn max_entry(&self) -> Option<&ScheduleEntry> {
        self.entries.last()
    }

    fn check_degree_model(&self) -> bool {
        self.entries.iter().all(|e| {
            let d = BigRational::from_integer(BigInt::from(e.degree));
            let lin = &self.degree_slope * BigRational::from_integer(BigInt::from(e.s));
            (d - lin).abs() <= self.offset_bound
        })
    }
}

/// A schedule with constant count 1 and degree `slope · s + offset`.
pub fn constant_schedule(slope: u64, offset: u64, s_max: u64) -> GrowthSchedule {
    GrowthSchedule {
        provenance: "constant count".into(),
        entries: (1..=s_max)
            .map(|s| ScheduleEntry {
                s,
                degree: (slope * s + offset) as u128,
                count: BigUint::one(),
            })
            .collect(),
        count_model: CountModel::constant_one(),
        degree_slope: BigRational::from_integer(slope.into()),
        offset_bound: BigRational::from_integer(offset.into()),
    }
}

/// Moore summands `P^{d(s)}(2)` in `ΩP^{n+1}(2)`, built from the two-letter
/// free Lie algebra on the bottom classes and the `2^s`-fold Moore part of
/// `(ℝP²)^{∧(2s+1)}`, with an auxiliary odd prime `p`:
/// `d(s) = (p²n - (p²+3)/2)(2s+1) + 3s + 2`, count `2^s W(2s+1)`.
pub fn schedule_mod2_moore(p_aux: u64, n: u64, s_max: u64) -> Result<GrowthSchedule, GrowthError> {
    if p_aux == 2 || !is_prime(p_aux) {
        return Err(range(format!("auxiliary prime must be odd, got {p_aux}")));
    }
    if n < 2 {
        return Err(range(format!("n must be at least 2, got {n}")));
    }
    let p2 = (p_aux as u128).checked_mul(p_aux as u128).ok_or(GrowthError::Overflow)?;
    let base = p2
        .checked_mul(n as u128)
        .ok_or(GrowthError::Overflow)?
        - (p2 + 3) / 2;
    let model = CountModel {
        pow2_slope: 1,
        pow2_offset: 0,
        witt: Some((2, 1)),
    };
    let entries = (0..=s_max)
        .map(|s| {
            let s128 = s as u128;
            Ok(ScheduleEntry {
                s,
                degree: base * (2 * s128 + 1) + 3 * s128 + 2,
                count: model.count(s)?,
            })
        })
        .collect::<Result<Vec<_>, GrowthError>>()?;
    let slope = 2 * base + 3;
    Ok(GrowthSchedule {
        provenance: format!(
            "mod 2 Moore space P^{}(2), auxiliary prime {p_aux}: degree ({}·(2s+1) + 3s + 2), count 2^s·W(2s+1)",
            n + 1,
            base
        ),
        entries,
        count_model: model,
        degree_slope: BigRational::from_integer(BigInt::from(slope)),
        offset_bound: BigRational::from_integer(BigInt::from(base + 2)),
    })
}

/// The smallest `s ≥ 0` with `(2p+1) n_β s ≥ 2p (n_β s + n_α + 1)`, i.e.
/// `⌈2p(n_α+1)/n_β⌉`.
pub fn odd_moore_threshold(p: u64, n_alpha: u64, n_beta: u64) -> u64 {
    (2 * p * (n_alpha + 1)).div_ceil(n_beta)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OddMooreSchedule {
    pub schedule: GrowthSchedule,
    pub regime: Regime,
    pub threshold: u64,
    /// Number of arithmetic progressions `(2p+1) n_β s + λ` in the cover.
    pub cover_parts: u64,
}

/// Torsion summands `Z/p^{r+1}` in `P^{2n+1}(p^r)` from the weight-`s`
/// Hilton–Milnor factors of `P^{n_α} ∨ P^{n_β}`: degree `(2p+1) n_β s`
/// (plus `λ` in the cover) and count `W(s) · 2^s`.
pub fn schedule_odd_moore(
    p: u64,
    r: u32,
    n_alpha: u64,
    n_beta: u64,
    s_max: u64,
) -> Result<OddMooreSchedule, GrowthError> {
    let regime = Regime::of(p, r).map_err(|e| range(e.to_string()))?;
    let min_alpha = match regime {
        Regime::OddP => 8,
        Regime::TwoRGeq2 => 3,
        Regime::TwoR1 => return Err(range("p = 2 needs r >= 2")),
    };
    if n_alpha < min_alpha || n_alpha > n_beta {
        return Err(range(format!(
            "need {min_alpha} <= n_alpha <= n_beta, got n_alpha={n_alpha}, n_beta={n_beta}"
        )));
    }
    let slope = (2 * p + 1) as u128 * n_beta as u128;
    let model = CountModel {
        pow2_slope: 1,
        pow2_offset: 0,
        witt: Some((1, 0)),
    };
    let entries = (1..=s_max)
        .map(|s| {
            Ok(ScheduleEntry {
                s,
                degree: slope * s as u128,
                count: model.count(s)?,
            })
        })
        .collect::<Result<Vec<_>, GrowthError>>()?;
    Ok(OddMooreSchedule {
        schedule: GrowthSchedule {
            provenance: format!(
                "Moore space mod {p}^{r}, n_alpha={n_alpha}, n_beta={n_beta}: degree {slope}·s, count W(s)·2^s, summands Z/{p}^{}",
                r + 1
            ),
            entries,
            count_model: model,
            degree_slope: BigRational::from_integer(BigInt::from(slope)),
            offset_bound: BigRational::from_integer(BigInt::from(slope)),
        },
        regime,
        threshold: odd_moore_threshold(p, n_alpha, n_beta),
        cover_parts: slope as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Positive,
    Nonpositive,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateCertificate {
    pub provenance: String,
    pub assumptions: Vec<String>,
    pub s_max: u64,
    #[serde(serialize_with = "ser_u128")]
    pub degree_at_max: u128,
    #[serde(serialize_with = "crate::moore::as_string")]
    pub count_at_max: BigUint,
    pub empirical_rate: f64,
    pub empirical_interval: [String; 2],
    pub analytic_limit: String,
    pub analytic_limit_value: f64,
    pub lower_bound: String,
    pub lower_bound_interval: [String; 2],
    pub relative_gap: f64,
    pub witt_bound_checked: bool,
    pub degree_model_checked: bool,
    pub verdict: Verdict,
    #[serde(skip)]
    pub analytic_limit_expr: LnExpr,
    #[serde(skip)]
    pub empirical: Interval,
}

fn interval_strings(i: &Interval) -> [String; 2] {
    [
        format!("{:.15}", i.lo.to_f64().unwrap_or(f64::NAN)),
        format!("{:.15}", i.hi.to_f64().unwrap_or(f64::NAN)),
    ]
}

/// `ln count / degree` with a certified enclosure.
pub fn rate_interval(count: &BigUint, degree: u128) -> Interval {
    let d = BigRational::from_integer(BigInt::from(degree));
    ln_biguint(count).div_positive(&Interval::point(d))
}

/// `m W(m) ≥ 2^{m-1}` for the Witt argument of every entry.
fn witt_lower_bound_holds(model: &CountModel, entries: &[ScheduleEntry]) -> Result<bool, GrowthError> {
    let Some((v, v0)) = model.witt else {
        return Ok(true);
    };
    for e in entries {
        let m = v * e.s + v0;
        if m == 0 {
            continue;
        }
        if witt_dim(2, m)? * m < BigUint::one() << (m - 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn certify(schedule: &GrowthSchedule, assumptions: &[&str]) -> Result<RateCertificate, GrowthError> {
    let last = schedule.max_entry().ok_or(GrowthError::EmptySchedule)?;
    if !schedule.degree_slope.is_positive() {
        return Err(range("degree slope must be positive"));
    }
    let limit = LnExpr::ln2_multiple(BigRational::from_integer(
        schedule.count_model.ln2_rate().into(),
    ))
    .div_rational(&schedule.degree_slope);
    let witt_ok = witt_lower_bound_holds(&schedule.count_model, &schedule.entries)?;
    let degree_ok = schedule.check_degree_model();
    let lower = if witt_ok && degree_ok {
        limit.clone()
    } else {
        LnExpr::zero()
    };
    let lower_iv = lower.interval();
    let verdict = if lower_iv.lo.is_positive() {
        Verdict::Positive
    } else {
        Verdict::Nonpositive
    };
    let empirical = if last.degree == 0 {
        Interval::point(BigRational::zero())
    } else {
        rate_interval(&last.count, last.degree)
    };
    let limit_value = limit.to_f64();
    let relative_gap = if limit_value == 0.0 {
        empirical.midpoint_f64().abs()
    } else {
        ((empirical.midpoint_f64() - limit_value) / limit_value).abs()
    };
    Ok(RateCertificate {
        provenance: schedule.provenance.clone(),
        assumptions: assumptions.iter().map(|s| s.to_string()).collect(),
        s_max: last.s,
        degree_at_max: last.degree,
        count_at_max: last.count.clone(),
        empirical_rate: empirical.midpoint_f64(),
        empirical_interval: interval_strings(&empirical),
        analytic_limit: limit.to_string(),
        analytic_limit_value: limit_value,
        lower_bound: lower.to_string(),
        lower_bound_interval: interval_strings(&lower_iv),
        relative_gap,
        witt_bound_checked: witt_ok,
        degree_model_checked: degree_ok,
        verdict,
        analytic_limit_expr: limit,
        empirical,
    })
}

pub const TORSION_ASSUMPTIONS: [&str; 3] = [
    "a suspension of X of slope M is a retract of the weight nl+1 functorial piece",
    "that retract occurs with multiplicity at least 2 in the smash power at n0",
    "Z/p^r summands exist in pi_{Kn+k} of the (An+a)-fold suspension",
];

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub params: HyperbolicityParams,
    #[serde(serialize_with = "ser_u128")]
    pub d: u128,
    #[serde(serialize_with = "ser_u128")]
    pub slope: u128,
    #[serde(serialize_with = "ser_u128")]
    pub gap_bound: u128,
    pub residues: Vec<ResidueEntry>,
    pub k_tilde: u64,
    pub cover_parts: u64,
    pub cover_checked: bool,
    pub schedule: GrowthSchedule,
    pub certificate: RateCertificate,
}

/// Runs the full arithmetic of the general criterion: gcd check, residue
/// residues, Euclidean schedule, the `λ`-cover of all large degrees and the
/// rate certificate for the degrees `K̃ N(s)`.
pub fn certify_criterion(params: &HyperbolicityParams, s_max: u64) -> Result<CriterionReport, GrowthError> {
    params.validate()?;
    if s_max == 0 {
        return Err(GrowthError::EmptySchedule);
    }
    let residues = residue_table(params)?;
    let k_tilde = residues.iter().map(|e| e.k_i).max().expect("A >= 1") + 1;
    let c = params.gap_bound()?;
    let mut ns = Vec::with_capacity(s_max as usize);
    for s in 1..=s_max {
        let e = euclid_schedule(params, s)?;
        ns.push(e.n);
    }
    let kt = k_tilde as u128;
    let starts: Vec<u128> = ns.iter().map(|n| kt * n).collect();
    let cover_len = c.checked_mul(kt).ok_or(GrowthError::Overflow)?;
    let cover_checked = progression_cover_holds(&starts, cover_len);
    let model = CountModel {
        pow2_slope: 1,
        pow2_offset: 0,
        witt: Some((params.n0 * params.l, 1)),
    };
    let entries = (1..=s_max)
        .zip(&starts)
        .map(|(s, &degree)| {
            Ok(ScheduleEntry {
                s,
                degree,
                count: model.count(s)?,
            })
        })
        .collect::<Result<Vec<_>, GrowthError>>()?;
    // K̃ N(s) = K̃ (E(s) - i(s)) / A with E(s) = slope·s + E(0)
    let a = BigRational::from_integer(BigInt::from(params.modulus));
    let degree_slope = BigRational::from_integer(BigInt::from(kt * params.slope()?)) / &a;
    let e0 = BigRational::from_integer(BigInt::from(params.degree_expression(0)?));
    let offset_bound = BigRational::from_integer(BigInt::from(kt)) * (e0 + &a) / &a;
    let schedule = GrowthSchedule {
        provenance: format!(
            "general criterion: degree K~·N(s) with K~={k_tilde}, count 2^s·W(s·{}+1)",
            params.n0 * params.l
        ),
        entries,
        count_model: model,
        degree_slope,
        offset_bound,
    };
    let certificate = certify(&schedule, &TORSION_ASSUMPTIONS)?;
    Ok(CriterionReport {
        params: params.clone(),
        d: params.d()?,
        slope: params.slope()?,
        gap_bound: c,
        residues,
        k_tilde,
        cover_parts: cover_len as u64,
        cover_checked,
        schedule,
        certificate,
    })
}

/// Every integer in `[starts[0], starts[last])` lies in some window
/// `[starts[s], starts[s] + len)`.
pub fn progression_cover_holds(starts: &[u128], len: u128) -> bool {
    starts
        .windows(2)
        .all(|w| w[1] >= w[0] && w[1] - w[0] <= len)
}

/// Index sets for subsequences of a sequence indexed by `0, 1, 2, ..`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum IndexSet {
    All,
    ResidueClass { modulus: u64, residue: u64 },
}

impl IndexSet {
    fn contains(&self, i: u64) -> bool {
        match *self {
            IndexSet::All => true,
            IndexSet::ResidueClass { modulus, residue } => i % modulus == residue % modulus,
        }
    }

    fn period(&self) -> u64 {
        match *self {
            IndexSet::All => 1,
            IndexSet::ResidueClass { modulus, .. } => modulus,
        }
    }
}

/// `a_i = prefix[i]` for `i < |prefix|`, then `period` repeated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    pub prefix: Vec<BigRational>,
    pub period: Vec<BigRational>,
}

impl EventuallyPeriodic {
    pub fn new(prefix: Vec<BigRational>, period: Vec<BigRational>) -> Result<Self, GrowthError> {
        if period.is_empty() {
            return Err(range("period must be nonempty"));
        }
        Ok(EventuallyPeriodic { prefix, period })
    }

    pub fn value(&self, i: u64) -> &BigRational {
        let p = self.prefix.len() as u64;
        if i < p {
            &self.prefix[i as usize]
        } else {
            &self.period[((i - p) % self.period.len() as u64) as usize]
        }
    }

    pub fn liminf(&self) -> BigRational {
        self.period.iter().min().expect("nonempty period").clone()
    }
}

/// `min` over the parts of the liminf of each subsequence. Fails if the
/// parts do not eventually cover every index.
pub fn liminf_min_of_cover(
    seq: &EventuallyPeriodic,
    cover: &[IndexSet],
) -> Result<BigRational, GrowthError> {
    if cover.is_empty() {
        return Err(GrowthError::CoverIncomplete(0));
    }
    if cover.iter().any(|c| c.period() == 0) {
        return Err(range("residue classes need a positive modulus"));
    }
    let start = seq.prefix.len() as u64;
    let full = cover
        .iter()
        .fold(seq.period.len() as u64, |acc, c| acc.lcm(&c.period()));
    if let Some(i) = (start..start + full).find(|&i| !cover.iter().any(|c| c.contains(i))) {
        return Err(GrowthError::CoverIncomplete(i));
    }
    let mut best: Option<BigRational> = None;
    for part in cover {
        let w = (seq.period.len() as u64).lcm(&part.period());
        let part_min = (start..start + w)
            .filter(|&i| part.contains(i))
            .map(|i| seq.value(i))
            .min()
            .expect("every residue class meets a full window");
        if best.as_ref().is_none_or(|b| part_min < b) {
            best = Some(part_min.clone());
        }
    }
    Ok(best.expect("cover nonempty"))
}

/// `f(s) = (α ln s + β s + γ) / (δ s + ε)` with `β, γ` of the form
/// `q + c·ln 2`; the limit is `β / δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogAffineRate {
    pub alpha: BigRational,
    pub beta: LnExpr,
    pub gamma: LnExpr,
    pub delta: BigRational,
    pub epsilon: BigRational,
}

impl LogAffineRate {
    pub fn limit(&self) -> LnExpr {
        self.beta.div_rational(&self.delta)
    }

    pub fn value(&self, s: u64) -> Interval {
        assert!(s >= 1);
        let sr = BigRational::from_integer(s.into());
        let num = &(&ln_u64(s).scale_by(&self.alpha) + &self.beta.interval().scale_by(&sr))
            + &self.gamma.interval();
        let den = &self.delta * &sr + &self.epsilon;
        num.div_positive(&Interval::point(den))
    }

    /// An upper bound for `|f(s) - β/δ|`:
    /// `(|α| ln s + |γ - βε/δ|) / (δ s + ε)`.
    pub fn tail_bound(&self, s: u64) -> BigRational {
        let sr = BigRational::from_integer(s.into());
        let shift = LnExpr {
            rational: &self.gamma.rational - &self.beta.rational * &self.epsilon / &self.delta,
            ln2_coeff: &self.gamma.ln2_coeff - &self.beta.ln2_coeff * &self.epsilon / &self.delta,
        }
        .interval();
        let c = shift.lo.abs().max(shift.hi.abs());
        let num = self.alpha.abs() * ln_u64(s).hi + c;
        num / (&self.delta * sr + &self.epsilon)
    }
}

/// Minimum of the limits of several log-affine subsequences.
pub fn liminf_min_of_log_affine(parts: &[LogAffineRate]) -> Result<LnExpr, GrowthError> {
    let mut best: Option<LnExpr> = None;
    for p in parts {
        let l = p.limit();
        best = Some(match best {
            None => l,
            Some(b) => {
                if b == l {
                    b
                } else {
                    let (bi, li) = (b.interval(), l.interval());
                    if li.hi < bi.lo {
                        l
                    } else if bi.hi < li.lo {
                        b
                    } else {
                        return Err(GrowthError::Undecided(b.to_string(), l.to_string()));
                    }
                }
            }
        });
    }
    best.ok_or(GrowthError::EmptySchedule)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AppendixReport {
    pub a: u64,
    pub q: u32,
    pub tilde_count: String,
    pub binomial_bound: String,
    pub binomial_holds: bool,
    /// `4^q`, a geometric bound for the binomial.
    pub geometric_bound: String,
    pub tensor_count: String,
    /// `C₁ a^q` with `C₁ = a/(a-1)`, absent for `a = 1`.
    pub tensor_bound: Option<String>,
    pub tensor_holds: bool,
    pub product_count: String,
    pub product_bound: Option<String>,
    pub product_holds: bool,
    pub growth_rate_bound: String,
}

/// Exact counts against the bounds `dim Λ̃_{≤q} ≤ C(2q, q-1) ≤ 4^q` and
/// `dim T_{≤q} ≤ C₁ a^q`, and their product.
pub fn appendix_upper_bound(a: u64, q: u32) -> Result<AppendixReport, GrowthError> {
    if a == 0 {
        return Err(range("a must be positive"));
    }
    if q > 40 {
        return Err(range("q must be at most 40"));
    }
    let tilde = tilde_dim_upto(q);
    let tensor = tensor_dim_upto(a, q as u64);
    let tilde_big = BigUint::from(tilde.count);
    let bound_big = BigUint::from(tilde.bound);
    let geometric = BigUint::one() << (2 * q);
    let product = &tilde_big * &tensor.count;
    let tensor_bound = tensor.bound.clone();
    let product_bound = tensor_bound
        .as_ref()
        .map(|b| b * BigRational::from_integer(BigInt::from(bound_big.clone())));
    let as_rat = |x: &BigUint| BigRational::from_integer(BigInt::from(x.clone()));
    let tensor_holds = tensor_bound.as_ref().is_none_or(|b| as_rat(&tensor.count) <= *b);
    let product_holds = product_bound.as_ref().is_none_or(|b| as_rat(&product) <= *b);
    Ok(AppendixReport {
        a,
        q,
        tilde_count: tilde_big.to_string(),
        binomial_bound: bound_big.to_string(),
        binomial_holds: tilde.count <= tilde.bound,
        geometric_bound: geometric.to_string(),
        tensor_count: tensor.count.to_string(),
        tensor_bound: tensor_bound.as_ref().map(rational_string),
        tensor_holds,
        product_count: product.to_string(),
        product_bound: product_bound.as_ref().map(rational_string),
        product_holds,
        growth_rate_bound: format!("ln({})", 4 * a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn params(m: u64, l: u64, modulus: u64, a: i64, n0: u64) -> HyperbolicityParams {
        HyperbolicityParams {
            p: 2,
            r: 1,
            m,
            l,
            modulus,
            a,
            k_slope: 1,
            k_offset: 0,
            n0,
            n_min: 1,
            variant: Variant::Mod2,
        }
    }

    #[test]
    fn gcd_examples() {
        assert!(check_gcd_condition(1, 1, 1));
        assert!(!check_gcd_condition(2, 2, 2));
        assert_eq!(first_gcd_failure(1, 2, 3), Some((1, 3)));
        assert!(check_gcd_condition(1, 2, 4));
    }

    #[test]
    fn congruence_examples() {
        assert_eq!(solve_step1_congruence(1, 1, 2, 0, 0), Some(1));
        assert_eq!(solve_step1_congruence(5, 3, 1, 7, 0), Some(0));
        assert_eq!(solve_step1_congruence(2, 2, 4, 0, 0), None);
        assert_eq!(
            congruence_residues_brute_force(Variant::Mod2, 1, 1, 2, 0, 0),
            vec![1]
        );
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(doubling_multiplicity(2, 3).multiplicity, BigUint::from(8u32));
        assert_eq!(doubling_multiplicity(1, 5).multiplicity, BigUint::one());
        assert_eq!(doubling_multiplicity(2, 0).multiplicity, BigUint::one());
        assert_eq!(doubling_multiplicity(3, 4).trace.len(), 5);
    }

    #[test]
    fn d_is_integral_and_matches_sum() {
        for n0 in 1..6u64 {
            for l in 1..6u64 {
                let p = params(1, l, 1, 0, n0);
                // Σ_{j=0}^{n0 l} (n0 + j)
                let direct: u128 = (0..=n0 * l).map(|j| (n0 + j) as u128).sum();
                assert_eq!(p.d().unwrap(), direct, "n0={n0} l={l}");
            }
        }
    }

    #[test]
    fn euclid_examples() {
        let p = params(1, 1, 3, 0, 2);
        assert_eq!(p.d().unwrap(), 9);
        assert_eq!(p.slope().unwrap(), 24);
        for s in 0..20 {
            let e = euclid_schedule(&p, s).unwrap();
            let closed = (2 * s as u128 + 1) * 11 + 2 * s as u128 + 1;
            assert_eq!(e.expression, closed);
            assert_eq!((e.n, e.i as u128), (closed / 3, closed % 3));
        }
        let one = params(2, 1, 1, 0, 1);
        assert!((0..10).all(|s| euclid_schedule(&one, s).unwrap().i == 0));
    }

    #[test]
    fn gap_bound_is_strict_when_a_does_not_divide_slope() {
        // slope = 24, A = 5: N can jump by 5 = ⌈24/5⌉
        let p = params(1, 1, 5, 0, 2);
        let c = p.gap_bound().unwrap();
        assert_eq!(c, 6);
        let ns: Vec<u128> = (0..200).map(|s| euclid_schedule(&p, s).unwrap().n).collect();
        assert!(ns.windows(2).all(|w| w[1] - w[0] < c));
        assert!(ns.windows(2).any(|w| w[1] - w[0] == 5));
    }

    #[test]
    fn mod2_schedule_examples() {
        let s = schedule_mod2_moore(3, 2, 10).unwrap();
        assert_eq!(s.entries[0].degree, 14);
        assert_eq!(s.entries[0].count, BigUint::from(2u32));
        assert_eq!(s.entries[10].degree, 284);
        assert_eq!(s.entries[10].count, BigUint::from(1024u32 * 99858));
        assert_eq!(s.degree_slope, q(27, 1));
        assert!(schedule_mod2_moore(2, 2, 3).is_err());
        assert!(schedule_mod2_moore(3, 1, 3).is_err());
    }

    #[test]
    fn odd_schedule_examples() {
        let o = schedule_odd_moore(3, 1, 8, 8, 5).unwrap();
        assert_eq!(o.schedule.entries[0].count, BigUint::from(4u32));
        assert_eq!(o.schedule.degree_slope, q(56, 1));
        assert_eq!(o.threshold, 7);
        assert!(schedule_odd_moore(3, 1, 9, 8, 5).is_err());
        assert!(schedule_odd_moore(2, 1, 8, 8, 5).is_err());
        assert_eq!(schedule_odd_moore(2, 2, 8, 8, 5).unwrap().regime, Regime::TwoRGeq2);
    }

    #[test]
    fn threshold_is_smallest() {
        for p in [3u64, 5, 7] {
            for na in 8..14u64 {
                for nb in na..16u64 {
                    let t = odd_moore_threshold(p, na, nb);
                    let ok = |s: u64| (2 * p + 1) * nb * s >= 2 * p * (nb * s + na + 1);
                    assert!(ok(t));
                    assert!(t == 0 || !ok(t - 1));
                }
            }
        }
    }

    #[test]
    fn certificates() {
        let c = certify(&schedule_mod2_moore(3, 2, 100).unwrap(), &[]).unwrap();
        assert_eq!(c.verdict, Verdict::Positive);
        assert_eq!(c.analytic_limit_expr, LnExpr::ln2_multiple(q(1, 9)));
        assert!(c.relative_gap < 0.05, "{}", c.relative_gap);
        let flat = certify(&constant_schedule(3, 1, 50), &[]).unwrap();
        assert_eq!(flat.verdict, Verdict::Nonpositive);
        let odd = certify(&schedule_odd_moore(3, 1, 8, 8, 100).unwrap().schedule, &[]).unwrap();
        assert_eq!(odd.verdict, Verdict::Positive);
        assert_eq!(odd.analytic_limit_expr, LnExpr::ln2_multiple(q(1, 28)));
    }

    #[test]
    fn criterion_certificate() {
        let p = params(1, 2, 2, 0, 1);
        let rep = certify_criterion(&p, 60).unwrap();
        assert!(rep.cover_checked);
        assert_eq!(rep.certificate.verdict, Verdict::Positive);
        assert!(rep.certificate.degree_model_checked);
        let bad = params(2, 2, 2, 0, 1);
        assert_eq!(
            certify_criterion(&bad, 10).unwrap_err(),
            GrowthError::GcdCondition { i: 0, gcd: 2 }
        );
    }

    #[test]
    fn periodic_cover_examples() {
        let seq = EventuallyPeriodic::new(vec![], vec![q(1, 1), q(2, 1)]).unwrap();
        let halves = [
            IndexSet::ResidueClass { modulus: 2, residue: 0 },
            IndexSet::ResidueClass { modulus: 2, residue: 1 },
        ];
        assert_eq!(liminf_min_of_cover(&seq, &halves).unwrap(), q(1, 1));
        assert_eq!(liminf_min_of_cover(&seq, &[IndexSet::All]).unwrap(), q(1, 1));
        assert!(matches!(
            liminf_min_of_cover(&seq, &halves[..1]),
            Err(GrowthError::CoverIncomplete(1))
        ));
    }

    #[test]
    fn log_affine() {
        let f = LogAffineRate {
            alpha: q(-1, 1),
            beta: LnExpr::ln2_multiple(q(3, 1)),
            gamma: LnExpr::zero(),
            delta: q(27, 1),
            epsilon: q(14, 1),
        };
        assert_eq!(f.limit(), LnExpr::ln2_multiple(q(1, 9)));
        for s in [10u64, 100, 1000] {
            let v = f.value(s).midpoint_f64();
            let lim = f.limit().to_f64();
            assert!((v - lim).abs() <= f.tail_bound(s).to_f64().unwrap() + 1e-12);
        }
        let g = LogAffineRate {
            delta: q(28, 1),
            ..f.clone()
        };
        assert_eq!(liminf_min_of_log_affine(&[f, g.clone()]).unwrap(), g.limit());
    }

    #[test]
    fn doubling_recurrence() {
        for b in 1..5u64 {
            for s in 0..10u32 {
                let next = doubling_multiplicity(b, s + 1).multiplicity;
                assert_eq!(next, doubling_multiplicity(b, s).multiplicity * b);
            }
        }
    }

    #[test]
    fn moore_schedules_grow() {
        // W(1) = 2 > W(2) = 1, so the odd schedule only doubles from s = 2 on
        let mut schedules = vec![(schedule_odd_moore(5, 2, 9, 11, 40).unwrap().schedule, 2)];
        for n in 2..=6 {
            let s = schedule_mod2_moore(3, n, 60).unwrap();
            assert_eq!(certify(&s, &[]).unwrap().verdict, Verdict::Positive, "n={n}");
            schedules.push((s, 0));
        }
        for (s, from) in &schedules {
            for w in s.entries.windows(2) {
                assert!(w[1].degree > w[0].degree);
                if w[0].s >= *from {
                    assert!(w[1].count >= &w[0].count * 2u32, "s={}", w[0].s);
                }
            }
        }
    }

    #[test]
    fn appendix_examples() {
        let r = appendix_upper_bound(1, 1).unwrap();
        assert_eq!((r.tilde_count.as_str(), r.binomial_bound.as_str()), ("1", "1"));
        assert_eq!(r.tensor_count, "2");
        let r = appendix_upper_bound(2, 2).unwrap();
        assert_eq!((r.tilde_count.as_str(), r.binomial_bound.as_str()), ("3", "4"));
        assert_eq!(r.tensor_count, "7");
        assert!(r.binomial_holds && r.tensor_holds && r.product_holds);
    }
}
