//! Dimensions of free Lie algebras and their Hilton–Milnor bookkeeping.
//!
//! The weight-`n` part of the free Lie algebra on `m` generators has
//! dimension given by the necklace (Witt) formula
//! `W(m, n) = (1/n) Σ_{d | n} μ(d) m^{n/d}`, which also counts Lyndon words
//! of length `n`. Counts are `BigUint` throughout: `2^{p^2}` already overflows
//! `u64` at `p = 11`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("alphabet size and weight must be at least 1 (got m={m}, n={n})")]
    Degenerate { m: u64, n: u64 },
    #[error("multidegree must have positive total weight")]
    EmptyMultidegree,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("enumeration of {m}^{n} words exceeds the size guard")]
    TooLarge { m: u64, n: u64 },
}

/// Maximum number of Lyndon words `lyndon_words` will materialize.
pub const LYNDON_LIMIT: u64 = 1 << 22;

/// Möbius function by trial division.
pub fn mobius(n: u64) -> i8 {
    assert!(n >= 1);
    let mut n = n;
    let mut result = 1i8;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Divides a signed Möbius sum by `n`, insisting on exact divisibility.
fn exact_quotient(positive: BigUint, negative: BigUint, n: u64) -> BigUint {
    assert!(positive >= negative, "Möbius sum went negative");
    let total = positive - negative;
    let (q, r) = total.div_rem(&BigUint::from(n));
    assert!(r.is_zero(), "Möbius sum not divisible by {n}");
    q
}

/// Dimension of the weight-`n` component of the free Lie algebra on `m`
/// generators.
pub fn witt_dim(m: u64, n: u64) -> Result<BigUint, LieError> {
    if m == 0 || n == 0 {
        return Err(LieError::Degenerate { m, n });
    }
    let base = BigUint::from(m);
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for d in divisors(n) {
        let term: BigUint = Pow::pow(&base, n / d);
        match mobius(d) {
            1 => pos += term,
            -1 => neg += term,
            _ => {}
        }
    }
    Ok(exact_quotient(pos, neg, n))
}

/// Number of free generators in weight `n` of the free restricted Lie
/// algebra on `m` generators: every ordinary basis element of weight `u`
/// contributes its iterated `p`-th powers in weights `u p^j`.
pub fn restricted_witt_dim(m: u64, n: u64, p: u64) -> Result<BigUint, LieError> {
    if !crate::field::is_prime(p) {
        return Err(LieError::NotPrime(p));
    }
    let mut total = witt_dim(m, n)?;
    let mut u = n;
    while u.is_multiple_of(p) {
        u /= p;
        total += witt_dim(m, u)?;
    }
    Ok(total)
}

/// Lyndon words with exactly `a1` copies of the first letter and `a2` of the
/// second, i.e. the Hall basis elements of bidegree `(a1, a2)` in the free
/// Lie algebra on two generators.
pub fn multidegree_count(a1: u64, a2: u64) -> Result<BigUint, LieError> {
    let w = a1 + a2;
    if w == 0 {
        return Err(LieError::EmptyMultidegree);
    }
    let g = a1.gcd(&a2);
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for d in divisors(g) {
        let term = binomial(w / d, a1 / d);
        match mobius(d) {
            1 => pos += term,
            -1 => neg += term,
            _ => {}
        }
    }
    Ok(exact_quotient(pos, neg, w))
}

/// `Σ_{j ≤ l} m^j`, the dimension of the tensor algebra on `m` generators
/// truncated at length `l`, with the constant `C₁ = m/(m-1)` that makes
/// `count ≤ C₁ m^l` (absent for `m ≤ 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorCount {
    pub count: BigUint,
    pub constant: Option<BigRational>,
    pub bound: Option<BigRational>,
}

pub fn tensor_dim_upto(m: u64, l: u64) -> TensorCount {
    let base = BigUint::from(m);
    let mut count = BigUint::zero();
    let mut power = BigUint::one();
    for _ in 0..=l {
        count += &power;
        power *= &base;
    }
    let (constant, bound) = if m >= 2 {
        let c = BigRational::new(m.into(), (m - 1).into());
        let top: BigUint = Pow::pow(&base, l);
        let b = &c * BigRational::from_integer(top.into());
        (Some(c), Some(b))
    } else {
        (None, None)
    };
    TensorCount {
        count,
        constant,
        bound,
    }
}

/// Generates all Lyndon words of length at most `n` over `{0, .., m-1}` in
/// lexicographic order (Duval's algorithm).
#[derive(Debug, Clone)]
pub struct LyndonWords {
    m: u8,
    n: usize,
    word: Vec<u8>,
    started: bool,
}

impl LyndonWords {
    pub fn new(m: u8, n: usize) -> Self {
        LyndonWords {
            m,
            n,
            word: Vec::with_capacity(n),
            started: false,
        }
    }
}

impl Iterator for LyndonWords {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        if self.m == 0 || self.n == 0 {
            return None;
        }
        if !self.started {
            self.started = true;
            self.word.push(0);
            return Some(self.word.clone());
        }
        let period = self.word.len();
        while self.word.len() < self.n {
            let c = self.word[self.word.len() - period];
            self.word.push(c);
        }
        while self.word.last() == Some(&(self.m - 1)) {
            self.word.pop();
        }
        let last = self.word.last_mut()?;
        *last += 1;
        Some(self.word.clone())
    }
}

/// Counts length-`n` Lyndon words without storing them.
pub fn count_lyndon_words(m: u8, n: usize) -> u64 {
    LyndonWords::new(m, n).filter(|w| w.len() == n).count() as u64
}

/// All length-`n` Lyndon words over an `m`-letter alphabet, sorted.
pub fn lyndon_words(m: u64, n: u64) -> Result<Vec<Vec<u8>>, LieError> {
    if m == 0 || n == 0 {
        return Err(LieError::Degenerate { m, n });
    }
    let expected = witt_dim(m, n)?;
    if m > u8::MAX as u64 || expected > BigUint::from(LYNDON_LIMIT) {
        return Err(LieError::TooLarge { m, n });
    }
    Ok(LyndonWords::new(m as u8, n as usize)
        .filter(|w| w.len() == n as usize)
        .collect())
}

/// Renders a word over `{0, 1, ..}` as letters `a, b, ..`.
pub fn word_to_string(word: &[u8]) -> String {
    word.iter().map(|&c| (b'a' + c) as char).collect()
}
