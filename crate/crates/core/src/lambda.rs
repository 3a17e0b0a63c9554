//! The mod 2 lambda algebra.
//!
//! Generators `λ_i` (`i ≥ 0`, degree `i`), relations for `j > 2i`
//!
//! ```text
//! λ_i λ_{2i+1+k} = Σ_{j ≥ 0} C(k-1-j, j) λ_{i+k-j} λ_{2i+1+j}
//! ```
//!
//! and differential `∂λ_i = Σ_{j ≥ 1} C(i-j, j) λ_{i-j} λ_{j-1}`, extended by
//! the Leibniz rule. Binomials are taken mod 2 with `C(a, b) = 0` whenever
//! `a < 0`, `b < 0` or `b > a`; in particular `λ_i λ_{2i+1} = 0`.
//!
//! A monomial `λ_{i₁} .. λ_{i_s}` is admissible when `2 i_j ≥ i_{j+1}`; these
//! form a basis. Since `2·0 ≥ i` forces `i = 0`, a `λ₀` can only be followed
//! by more `λ₀`s, so every admissible monomial is a positive-index part times
//! a `λ₀` tail.
//!
//! Each rewrite replaces `λ_a λ_b` (`b > 2a`) by terms whose first index is
//! strictly larger than `a` and whose total degree is unchanged, so repeated
//! rewriting of leftmost pairs terminates: the index vectors increase
//! lexicographically inside a finite set of fixed degree and length.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use once_cell::sync::Lazy;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FpMatrix, PrimeField};

/// Rewrite budget for `straighten`; running out indicates a bug.
pub const STEP_BUDGET: usize = 1_000_000;

/// Upper limit on the number of monomials a single basis query may return.
pub const BASIS_LIMIT: usize = 5_000_000;

const DEFAULT_MAX_DEGREE: u32 = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LambdaError {
    #[error("straightening exceeded {0} rewrite steps")]
    StepBudget(usize),
    #[error("degree {degree} exceeds the guard {guard} (raise TGL_MAX_DEGREE)")]
    DegreeGuard { degree: u32, guard: u32 },
    #[error("basis query produces more than {0} monomials")]
    TooLarge(usize),
    #[error("the sphere parameter n must be at least 1")]
    ZeroSphere,
}

/// Degree cap for enumerations, read from `TGL_MAX_DEGREE` (default 30).
pub fn max_degree_guard() -> u32 {
    std::env::var("TGL_MAX_DEGREE")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_DEGREE)
}

fn check_degree(t: u32) -> Result<(), LambdaError> {
    let guard = max_degree_guard();
    if t > guard {
        return Err(LambdaError::DegreeGuard { degree: t, guard });
    }
    Ok(())
}

pub type Monomial = Vec<u32>;

pub fn degree(m: &[u32]) -> u32 {
    m.iter().sum()
}

pub fn is_admissible(m: &[u32]) -> bool {
    m.windows(2).all(|w| 2 * w[0] >= w[1])
}

/// `C(a, b) mod 2` with the vanishing convention for out-of-range entries.
pub fn binomial_mod2(a: i64, b: i64) -> bool {
    if a < 0 || b < 0 || b > a {
        return false;
    }
    b & a == b
}

/// Right-hand side of the relation for the inadmissible pair `λ_a λ_b`.
pub fn pair_rewrite(a: u32, b: u32) -> Vec<(u32, u32)> {
    debug_assert!(b > 2 * a);
    let k = (b - 2 * a - 1) as i64;
    let mut out = Vec::new();
    let mut j = 0i64;
    while 2 * j < k {
        if binomial_mod2(k - 1 - j, j) {
            out.push(((a as i64 + k - j) as u32, (2 * a as i64 + 1 + j) as u32));
        }
        j += 1;
    }
    out
}

/// `∂λ_i` as a list of (admissible) pairs.
pub fn generator_differential(i: u32) -> Vec<(u32, u32)> {
    let i = i as i64;
    (1..=i / 2)
        .filter(|&j| binomial_mod2(i - j, j))
        .map(|j| ((i - j) as u32, (j - 1) as u32))
        .collect()
}

/// An element of `Λ`: a set of admissible monomials (coefficients in `F₂`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct LambdaElement {
    terms: BTreeSet<Monomial>,
}

impl LambdaElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self::from_admissible(Vec::new())
    }

    pub fn generator(i: u32) -> Self {
        Self::from_admissible(vec![i])
    }

    fn from_admissible(m: Monomial) -> Self {
        debug_assert!(is_admissible(&m));
        let mut terms = BTreeSet::new();
        terms.insert(m);
        LambdaElement { terms }
    }

    /// The class of an arbitrary monomial.
    pub fn monomial(m: &[u32]) -> Self {
        normal_form(m)
    }

    pub fn terms(&self) -> &BTreeSet<Monomial> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add(&self, other: &LambdaElement) -> LambdaElement {
        LambdaElement {
            terms: self
                .terms
                .symmetric_difference(&other.terms)
                .cloned()
                .collect(),
        }
    }

    pub fn multiply(&self, other: &LambdaElement) -> LambdaElement {
        let mut out = Parity::default();
        for a in &self.terms {
            for b in &other.terms {
                for m in mul_admissible(a, b).iter() {
                    out.toggle(m);
                }
            }
        }
        out.into_element()
    }

    pub fn differential(&self) -> LambdaElement {
        let mut out = Parity::default();
        for m in &self.terms {
            for t in differential_monomial(m).iter() {
                out.toggle(t);
            }
        }
        out.into_element()
    }

    /// `(length, degree)` if all terms share one bidegree.
    pub fn bidegree(&self) -> Option<(usize, u32)> {
        let mut it = self.terms.iter().map(|m| (m.len(), degree(m)));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }
}

impl fmt::Display for LambdaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|m| render_monomial(m)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn render_monomial(m: &[u32]) -> String {
    if m.is_empty() {
        return "1".into();
    }
    m.iter()
        .map(|i| format!("λ{i}"))
        .collect::<Vec<_>>()
        .join("")
}

/// Accumulates monomials mod 2.
#[derive(Default)]
struct Parity(HashSet<Monomial>);

impl Parity {
    fn toggle(&mut self, m: &Monomial) {
        if !self.0.remove(m) {
            self.0.insert(m.clone());
        }
    }

    fn into_sorted(self) -> Vec<Monomial> {
        let mut v: Vec<Monomial> = self.0.into_iter().collect();
        v.sort();
        v
    }

    fn into_element(self) -> LambdaElement {
        LambdaElement {
            terms: self.0.into_iter().collect(),
        }
    }
}

type Terms = Arc<Vec<Monomial>>;

static LEFT_MUL: Lazy<DashMap<(u32, Monomial), Terms>> = Lazy::new(DashMap::new);

/// `λ_a · J` in the admissible basis, for admissible `J`.
fn left_mul(a: u32, j: &[u32]) -> Terms {
    if j.is_empty() || 2 * a >= j[0] {
        let mut m = Vec::with_capacity(j.len() + 1);
        m.push(a);
        m.extend_from_slice(j);
        return Arc::new(vec![m]);
    }
    let key = (a, j.to_vec());
    if let Some(hit) = LEFT_MUL.get(&key) {
        return hit.clone();
    }
    let mut acc = Parity::default();
    for (c, d) in pair_rewrite(a, j[0]) {
        for x in left_mul(d, &j[1..]).iter() {
            for y in left_mul(c, x).iter() {
                acc.toggle(y);
            }
        }
    }
    let out = Arc::new(acc.into_sorted());
    LEFT_MUL.insert(key, out.clone());
    out
}

/// `λ_I · X` for an arbitrary word `I` and a set `X` of admissible monomials.
fn left_mul_word(word: &[u32], x: Vec<Monomial>) -> Vec<Monomial> {
    let mut current = x;
    for &a in word.iter().rev() {
        let mut acc = Parity::default();
        for m in &current {
            for y in left_mul(a, m).iter() {
                acc.toggle(y);
            }
        }
        current = acc.into_sorted();
    }
    current
}

fn mul_admissible(a: &[u32], b: &[u32]) -> Vec<Monomial> {
    left_mul_word(a, vec![b.to_vec()])
}

fn normal_form(m: &[u32]) -> LambdaElement {
    LambdaElement {
        terms: left_mul_word(m, vec![Vec::new()]).into_iter().collect(),
    }
}

/// `∂` of an admissible monomial via the Leibniz rule.
fn differential_monomial(m: &[u32]) -> Vec<Monomial> {
    let mut acc = Parity::default();
    for pos in 0..m.len() {
        let suffix = &m[pos + 1..];
        for (c, d) in generator_differential(m[pos]) {
            let tail = left_mul_word(&[c, d], vec![suffix.to_vec()]);
            for t in left_mul_word(&m[..pos], tail) {
                acc.toggle(&t);
            }
        }
    }
    acc.into_sorted()
}

/// Straightens by repeatedly rewriting the leftmost inadmissible pair of
/// some inadmissible term. Independent of the memoized engine behind
/// `multiply` and `differential`.
pub fn straighten(m: &[u32]) -> Result<LambdaElement, LambdaError> {
    let mut terms: BTreeSet<Monomial> = BTreeSet::new();
    terms.insert(m.to_vec());
    let mut pending: Vec<Monomial> = vec![m.to_vec()];
    let mut rewrites: BTreeMap<(u32, u32), Vec<(u32, u32)>> = BTreeMap::new();
    let mut steps = 0usize;
    while let Some(w) = pending.pop() {
        if !terms.contains(&w) {
            continue;
        }
        let Some(pos) = w.windows(2).position(|p| 2 * p[0] < p[1]) else {
            continue;
        };
        steps += 1;
        if steps > STEP_BUDGET {
            return Err(LambdaError::StepBudget(STEP_BUDGET));
        }
        terms.remove(&w);
        let rhs = rewrites
            .entry((w[pos], w[pos + 1]))
            .or_insert_with(|| pair_rewrite(w[pos], w[pos + 1]));
        for &(c, d) in rhs.iter() {
            let mut v = w.clone();
            v[pos] = c;
            v[pos + 1] = d;
            if !terms.remove(&v) {
                terms.insert(v.clone());
                pending.push(v);
            }
        }
    }
    Ok(LambdaElement { terms })
}

/// `∂` applied term by term to an unstraightened word, each resulting word
/// straightened by `straighten`. Used to check that the differential
/// respects the relations.
pub fn leibniz_then_straighten(m: &[u32]) -> Result<LambdaElement, LambdaError> {
    let mut out = LambdaElement::zero();
    for pos in 0..m.len() {
        for (c, d) in generator_differential(m[pos]) {
            let mut w = Vec::with_capacity(m.len() + 1);
            w.extend_from_slice(&m[..pos]);
            w.push(c);
            w.push(d);
            w.extend_from_slice(&m[pos + 1..]);
            out = out.add(&straighten(&w)?);
        }
    }
    Ok(out)
}

/// Admissible monomials of length `s` and degree `t` whose first index is
/// below `first_below`, lexicographically ordered.
fn enumerate(s: usize, t: u32, first_below: u32) -> Result<Vec<Monomial>, LambdaError> {
    fn rec(
        s: usize,
        t: u32,
        max_first: u32,
        cur: &mut Monomial,
        out: &mut Vec<Monomial>,
    ) -> Result<(), LambdaError> {
        if s == 0 {
            if t == 0 {
                if out.len() >= BASIS_LIMIT {
                    return Err(LambdaError::TooLarge(BASIS_LIMIT));
                }
                out.push(cur.clone());
            }
            return Ok(());
        }
        for i in 0..=max_first.min(t) {
            // a λ₀ forces every later letter to be λ₀
            if s > 1 && i == 0 && t > 0 {
                continue;
            }
            cur.push(i);
            rec(s - 1, t - i, 2 * i, cur, out)?;
            cur.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    if first_below == 0 {
        return Ok(out);
    }
    rec(s, t, first_below - 1, &mut Vec::with_capacity(s), &mut out)?;
    Ok(out)
}

/// All admissible monomials of length `s` and degree `t`.
pub fn basis(s: usize, t: u32) -> Result<Vec<Monomial>, LambdaError> {
    check_degree(t)?;
    enumerate(s, t, u32::MAX)
}

/// Basis of `Λ(n)` in bidegree `(s, t)`: admissible monomials with first
/// index below `n` (the unit included).
pub fn lambda_n_basis(n: u32, s: usize, t: u32) -> Result<Vec<Monomial>, LambdaError> {
    if n == 0 {
        return Err(LambdaError::ZeroSphere);
    }
    check_degree(t)?;
    enumerate(s, t, n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyEntry {
    pub s: usize,
    pub t: u32,
    pub chain_dim: usize,
    pub cycles: usize,
    pub boundaries: usize,
    pub homology: usize,
}

fn differential_matrix(
    source: &[Monomial],
    target: &[Monomial],
) -> Result<FpMatrix, LambdaError> {
    let f2 = PrimeField::new(2).expect("2 is prime");
    let index: BTreeMap<&Monomial, usize> = target.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut m = FpMatrix::zeros(f2, target.len(), source.len());
    for (col, src) in source.iter().enumerate() {
        for t in differential_monomial(src) {
            let row = *index
                .get(&t)
                .expect("differential leaves the target basis: Λ(n) not closed");
            m.set(row, col, 1);
        }
    }
    Ok(m)
}

fn homology_table(
    n: u32,
    max_degree: u32,
    max_length: usize,
    order: &mut dyn FnMut(&mut Vec<Monomial>),
) -> Result<Vec<HomologyEntry>, LambdaError> {
    if n == 0 {
        return Err(LambdaError::ZeroSphere);
    }
    check_degree(max_degree + 1)?;
    let mut cache: BTreeMap<(usize, u32), Vec<Monomial>> = BTreeMap::new();
    let mut chains = |s: usize, t: u32| -> Result<Vec<Monomial>, LambdaError> {
        if let Some(v) = cache.get(&(s, t)) {
            return Ok(v.clone());
        }
        let mut v = enumerate(s, t, n)?;
        order(&mut v);
        cache.insert((s, t), v.clone());
        Ok(v)
    };
    let mut out = Vec::new();
    for s in 0..=max_length {
        for t in 0..=max_degree {
            let here = chains(s, t)?;
            let rank_out = if t == 0 {
                0
            } else {
                differential_matrix(&here, &chains(s + 1, t - 1)?)?.rank()
            };
            let rank_in = if s == 0 {
                0
            } else {
                differential_matrix(&chains(s - 1, t + 1)?, &here)?.rank()
            };
            let cycles = here.len() - rank_out;
            out.push(HomologyEntry {
                s,
                t,
                chain_dim: here.len(),
                cycles,
                boundaries: rank_in,
                homology: cycles - rank_in,
            });
        }
    }
    Ok(out)
}

/// Dimensions of `H(Λ(n), ∂)` in every bidegree with `s ≤ max_length`,
/// `t ≤ max_degree`. `∂` lowers `t` by one and raises `s` by one.
pub fn homology_dims(
    n: u32,
    max_degree: u32,
    max_length: usize,
) -> Result<Vec<HomologyEntry>, LambdaError> {
    homology_table(n, max_degree, max_length, &mut |_| {})
}

/// As `homology_dims`, with each chain basis shuffled by a seeded RNG.
pub fn homology_dims_shuffled(
    n: u32,
    max_degree: u32,
    max_length: usize,
    seed: u64,
) -> Result<Vec<HomologyEntry>, LambdaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    homology_table(n, max_degree, max_length, &mut |v| v.shuffle(&mut rng))
}

/// Number of nonempty admissible monomials of degree at most `q` with all
/// indices positive (equivalently, ending in some `λ_i`, `i > 0`), together
/// with the bound `C(2q, q-1)` (taken as 0 for `q = 0`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TildeCount {
    pub q: u32,
    pub count: u128,
    pub bound: u128,
}

pub fn tilde_dim_upto(q: u32) -> TildeCount {
    // g[i][b]: monomials starting with λ_i, all indices positive, degree ≤ b
    let qs = q as usize;
    let mut g = vec![vec![0u128; qs + 1]; qs + 1];
    for b in 1..=qs {
        for i in 1..=b {
            let rest = b - i;
            let c: u128 = 1 + (1..=(2 * i).min(rest)).map(|j| g[j][rest]).sum::<u128>();
            g[i][b] = c;
        }
    }
    let count = (1..=qs).map(|i| g[i][qs]).sum();
    let bound = if q == 0 {
        0
    } else {
        crate::free_lie::binomial(2 * q as u64, q as u64 - 1)
            .try_into()
            .expect("binomial fits in u128 at desk scale")
    };
    TildeCount { q, count, bound }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(ms: &[&[u32]]) -> LambdaElement {
        let mut e = LambdaElement::zero();
        for m in ms {
            e.toggle(m.to_vec());
        }
        e
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&[2, 2]));
        assert!(!is_admissible(&[0, 2]));
        assert!(is_admissible(&[1, 2, 4]));
        assert!(!is_admissible(&[1, 3]));
        assert!(is_admissible(&[]));
    }

    #[test]
    fn binomial_convention() {
        assert!(binomial_mod2(0, 0));
        assert!(!binomial_mod2(-1, 0));
        assert!(!binomial_mod2(2, 3));
        assert!(binomial_mod2(5, 1));
        assert!(!binomial_mod2(4, 1));
        assert!(binomial_mod2(6, 2));
    }

    #[test]
    fn straighten_examples() {
        assert_eq!(straighten(&[2, 2]).unwrap(), el(&[&[2, 2]]));
        assert_eq!(straighten(&[0, 2]).unwrap(), el(&[&[1, 1]]));
        for i in 0..=6 {
            assert!(straighten(&[i, 2 * i + 1]).unwrap().is_zero(), "i={i}");
        }
    }

    #[test]
    fn multiply_examples() {
        let l1 = LambdaElement::generator(1);
        assert_eq!(LambdaElement::unit().multiply(&l1), l1);
        assert_eq!(l1.multiply(&l1), el(&[&[1, 1]]));
        let prod = LambdaElement::generator(0).multiply(&LambdaElement::generator(2));
        assert_eq!(prod, el(&[&[1, 1]]));
    }

    #[test]
    fn differential_examples() {
        assert!(LambdaElement::generator(0).differential().is_zero());
        assert!(LambdaElement::generator(1).differential().is_zero());
        assert_eq!(LambdaElement::generator(2).differential(), el(&[&[1, 0]]));
    }

    #[test]
    fn engines_agree_on_short_words() {
        for a in 0..8 {
            for b in 0..14 {
                for c in 0..6 {
                    let w = [a, b, c];
                    assert_eq!(straighten(&w).unwrap(), LambdaElement::monomial(&w), "{w:?}");
                }
            }
        }
    }

    #[test]
    fn basis_examples() {
        assert_eq!(basis(1, 5).unwrap(), vec![vec![5]]);
        assert_eq!(basis(2, 2).unwrap(), vec![vec![1, 1], vec![2, 0]]);
        assert_eq!(basis(0, 0).unwrap(), vec![Vec::<u32>::new()]);
        assert!(basis(0, 3).unwrap().is_empty());
        assert_eq!(lambda_n_basis(1, 1, 0).unwrap(), vec![vec![0]]);
        assert!(lambda_n_basis(1, 1, 3).unwrap().is_empty());
        assert_eq!(lambda_n_basis(50, 3, 7).unwrap(), basis(3, 7).unwrap());
    }

    #[test]
    fn basis_matches_brute_force() {
        fn all_words(s: usize, t: u32) -> Vec<Monomial> {
            if s == 0 {
                return vec![Vec::new()];
            }
            let mut out = Vec::new();
            for w in all_words(s - 1, t) {
                for i in 0..=t {
                    let mut v = w.clone();
                    v.push(i);
                    out.push(v);
                }
            }
            out
        }
        for s in 0..4usize {
            for t in 0..10u32 {
                let mut brute: Vec<Monomial> = all_words(s, t)
                    .into_iter()
                    .filter(|w| degree(w) == t && is_admissible(w))
                    .collect();
                brute.sort();
                assert_eq!(basis(s, t).unwrap(), brute, "s={s} t={t}");
            }
        }
    }

    #[test]
    fn degree_guard() {
        assert!(matches!(
            basis(1, 10_000),
            Err(LambdaError::DegreeGuard { .. })
        ));
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(tilde_dim_upto(0), TildeCount { q: 0, count: 0, bound: 0 });
        assert_eq!(tilde_dim_upto(1), TildeCount { q: 1, count: 1, bound: 1 });
        assert_eq!(tilde_dim_upto(2), TildeCount { q: 2, count: 3, bound: 4 });
    }

    #[test]
    fn tilde_matches_enumeration() {
        for q in 0..=12u32 {
            let mut count = 0u128;
            for t in 1..=q {
                for s in 1..=t as usize {
                    count += basis(s, t)
                        .unwrap()
                        .iter()
                        .filter(|m| m.iter().all(|&i| i > 0))
                        .count() as u128;
                }
            }
            assert_eq!(tilde_dim_upto(q).count, count, "q={q}");
        }
    }

    #[test]
    fn first_row_of_homology_is_at_two_powers_minus_one() {
        let table = homology_dims(64, 20, 1).unwrap();
        for e in table.iter().filter(|e| e.s == 1) {
            let expected = usize::from((e.t + 1).is_power_of_two());
            assert_eq!(e.homology, expected, "t={}", e.t);
        }
        let unit = table.iter().find(|e| e.s == 0 && e.t == 0).unwrap();
        assert_eq!(unit.homology, 1);
    }

    #[test]
    fn homology_ignores_basis_order() {
        let a = homology_dims(3, 10, 4).unwrap();
        for seed in 0..3 {
            assert_eq!(homology_dims_shuffled(3, 10, 4, seed).unwrap(), a);
        }
        assert!(a.iter().all(|e| e.homology <= e.chain_dim));
    }
}
