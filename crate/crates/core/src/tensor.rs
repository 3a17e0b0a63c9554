//! Tensor powers of graded `F_p` vector spaces with the symmetric group
//! acting by permuting factors.
//!
//! Conventions:
//!
//! * A permutation `σ` of `{0, .., k-1}` acts on the right of words:
//!   `(w·σ)_i = w_{σ(i)}`. With the group product `στ = σ ∘ τ` this gives
//!   `(w·σ)·τ = w·(στ)`, so `act(δ₁δ₂, v) = act(δ₂, act(δ₁, v))`.
//! * In Koszul mode the permuted word picks up `(-1)^N`, `N` the number of
//!   pairs of odd-degree letters whose relative order is reversed.
//! * The basis of `V^{⊗k}` is ordered lexicographically in generator indices.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::field::{FpMatrix, LinalgError, PrimeField};

/// Largest `dim(V)^k` for which `operator_matrix` builds a dense matrix.
pub const MAX_OPERATOR_COLUMNS: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("permutation acts on {expected} letters but the word has {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("generator names must be distinct (repeated {0:?})")]
    DuplicateGenerator(String),
    #[error("generator {0:?} has degree 0")]
    ZeroDegree(String),
    #[error("unknown generator index {0}")]
    UnknownGenerator(usize),
    #[error("Koszul signs are only supported on spaces concentrated in one parity")]
    MixedParity,
    #[error("the Dynkin–Specht–Wever element needs k >= 2 (got {0})")]
    DswOrder(usize),
    #[error("{k} is not invertible mod {p}")]
    NotInvertible { k: usize, p: u32 },
    #[error("dim^k = {0} columns exceeds the operator size guard")]
    TooLarge(usize),
    #[error("parameters violate 1 < l < p - 1 (l={l}, p={p})")]
    InsertionRange { l: usize, p: u32 },
    #[error("elements live over different fields or spaces")]
    Incompatible,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignMode {
    Unsigned,
    Koszul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    AllEven,
    AllOdd,
    Mixed,
}

/// A permutation of `{0, .., k-1}`, stored as its list of images.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation((0..k).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, TensorError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(TensorError::NotAPermutation(images));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// Builds a permutation from 1-based images, as written in two-line
    /// notation.
    pub fn from_one_based(images: &[usize]) -> Result<Self, TensorError> {
        if images.contains(&0) {
            return Err(TensorError::NotAPermutation(images.to_vec()));
        }
        Self::from_images(images.iter().map(|&i| i - 1).collect())
    }

    /// The transposition swapping 0-based positions `a` and `b`.
    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<usize> = (0..k).collect();
        v.swap(a, b);
        Permutation(v)
    }

    /// The cycle `(1, 2, .., k)`: `i ↦ i + 1 mod k`.
    pub fn long_cycle(k: usize) -> Self {
        Permutation((0..k).map(|i| (i + 1) % k).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn is_odd(&self) -> bool {
        let mut inversions = 0usize;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        inversions % 2 == 1
    }

    /// `1 ⊗ self`: the same permutation shifted to act on positions `1..`.
    pub fn shift_right(&self) -> Permutation {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(0);
        v.extend(self.0.iter().map(|&i| i + 1));
        Permutation(v)
    }

    /// All permutations of `k` letters in lexicographic order of images.
    pub fn all(k: usize) -> Vec<Permutation> {
        fn rec(k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == k {
                out.push(Permutation(cur.clone()));
                return;
            }
            for i in 0..k {
                if !used[i] {
                    used[i] = true;
                    cur.push(i);
                    rec(k, cur, used, out);
                    cur.pop();
                    used[i] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(k, &mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", imgs.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

/// A finite-dimensional graded vector space over `F_p`, given by a list of
/// homogeneous generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedSpace {
    field: PrimeField,
    generators: Vec<Generator>,
}

impl GradedSpace {
    pub fn new(field: PrimeField, generators: Vec<(String, u32)>) -> Result<Self, TensorError> {
        let mut out: Vec<Generator> = Vec::with_capacity(generators.len());
        for (name, degree) in generators {
            if degree == 0 {
                return Err(TensorError::ZeroDegree(name));
            }
            if out.iter().any(|g| g.name == name) {
                return Err(TensorError::DuplicateGenerator(name));
            }
            out.push(Generator { name, degree });
        }
        Ok(GradedSpace {
            field,
            generators: out,
        })
    }

    /// `m` generators `x1, .., xm`, all in the given degree.
    pub fn uniform(field: PrimeField, m: usize, degree: u32) -> Result<Self, TensorError> {
        Self::new(field, (1..=m).map(|i| (format!("x{i}"), degree)).collect())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn is_odd(&self, index: usize) -> bool {
        self.generators[index].degree % 2 == 1
    }

    pub fn parity(&self) -> Parity {
        let odd = self.generators.iter().filter(|g| g.degree % 2 == 1).count();
        if odd == 0 {
            Parity::AllEven
        } else if odd == self.generators.len() {
            Parity::AllOdd
        } else {
            Parity::Mixed
        }
    }

    fn check_mode(&self, mode: SignMode) -> Result<(), TensorError> {
        if mode == SignMode::Koszul && self.parity() == Parity::Mixed {
            return Err(TensorError::MixedParity);
        }
        Ok(())
    }

    /// Number of basis words of `V^{⊗k}`, refusing sizes beyond `limit`.
    fn tensor_dim(&self, k: usize, limit: usize) -> Result<usize, TensorError> {
        let mut n: usize = 1;
        for _ in 0..k {
            n = n.checked_mul(self.dim()).ok_or(TensorError::TooLarge(usize::MAX))?;
            if n > limit {
                return Err(TensorError::TooLarge(n));
            }
        }
        Ok(n)
    }

    /// The `idx`-th basis word of `V^{⊗k}` in lexicographic order.
    pub fn word_at(&self, k: usize, mut idx: usize) -> TensorWord {
        let d = self.dim();
        let mut letters = vec![0; k];
        for slot in letters.iter_mut().rev() {
            *slot = idx % d;
            idx /= d;
        }
        TensorWord(letters)
    }

    pub fn word_index(&self, word: &TensorWord) -> usize {
        word.0.iter().fold(0, |acc, &l| acc * self.dim() + l)
    }

    pub fn render(&self, word: &TensorWord) -> String {
        word.0
            .iter()
            .map(|&l| self.generators[l].name.as_str())
            .collect::<Vec<_>>()
            .join("⊗")
    }
}

/// A word `x_{i₁} ⊗ .. ⊗ x_{i_k}`, stored as generator indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TensorWord(pub Vec<usize>);

impl TensorWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &TensorWord) -> TensorWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        TensorWord(v)
    }
}

/// `w·σ` together with its sign as a residue mod `p`.
pub fn apply_permutation(
    space: &GradedSpace,
    word: &TensorWord,
    sigma: &Permutation,
    mode: SignMode,
) -> Result<(TensorWord, u32), TensorError> {
    if word.len() != sigma.len() {
        return Err(TensorError::LengthMismatch {
            expected: sigma.len(),
            found: word.len(),
        });
    }
    if let Some(&bad) = word.0.iter().find(|&&l| l >= space.dim()) {
        return Err(TensorError::UnknownGenerator(bad));
    }
    space.check_mode(mode)?;
    let out = TensorWord(sigma.images().iter().map(|&i| word.0[i]).collect());
    let mut negative = false;
    if mode == SignMode::Koszul {
        let k = sigma.len();
        for a in 0..k {
            for b in a + 1..k {
                let (sa, sb) = (sigma.image(a), sigma.image(b));
                if sa > sb && space.is_odd(word.0[sa]) && space.is_odd(word.0[sb]) {
                    negative = !negative;
                }
            }
        }
    }
    Ok((out, space.field().sign(negative)))
}

/// An element of `V^{⊗k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorElement {
    space: Arc<GradedSpace>,
    length: usize,
    terms: BTreeMap<TensorWord, u32>,
}

impl TensorElement {
    pub fn zero(space: Arc<GradedSpace>, length: usize) -> Self {
        TensorElement {
            space,
            length,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_word(space: Arc<GradedSpace>, word: TensorWord) -> Result<Self, TensorError> {
        if let Some(&bad) = word.0.iter().find(|&&l| l >= space.dim()) {
            return Err(TensorError::UnknownGenerator(bad));
        }
        let length = word.len();
        let mut e = TensorElement::zero(space, length);
        e.add_term(word, 1);
        Ok(e)
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn terms(&self) -> &BTreeMap<TensorWord, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &TensorWord) -> u32 {
        self.terms.get(word).copied().unwrap_or(0)
    }

    fn add_term(&mut self, word: TensorWord, coeff: u32) {
        let f = self.space.field();
        let c = f.add(self.coefficient(&word), coeff % f.p());
        if c == 0 {
            self.terms.remove(&word);
        } else {
            self.terms.insert(word, c);
        }
    }

    pub fn add(&self, other: &TensorElement) -> Result<TensorElement, TensorError> {
        if self.space != other.space || self.length != other.length {
            return Err(TensorError::Incompatible);
        }
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u32) -> TensorElement {
        let f = self.space.field();
        let mut out = TensorElement::zero(self.space.clone(), self.length);
        for (w, &a) in &self.terms {
            let v = f.mul(a, c % f.p());
            if v != 0 {
                out.terms.insert(w.clone(), v);
            }
        }
        out
    }

    /// `self ⊗ other` with no reordering (and so no sign).
    pub fn tensor(&self, other: &TensorElement) -> Result<TensorElement, TensorError> {
        if self.space != other.space {
            return Err(TensorError::Incompatible);
        }
        let f = self.space.field();
        let mut out = TensorElement::zero(self.space.clone(), self.length + other.length);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                out.add_term(a.concat(b), f.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// Coordinates in the lexicographic word basis.
    pub fn to_vector(&self) -> Vec<u32> {
        let n = self.space.dim().pow(self.length as u32);
        let mut v = vec![0; n];
        for (w, &c) in &self.terms {
            v[self.space.word_index(w)] = c;
        }
        v
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| format!("{c}·{}", self.space.render(w)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// An element of the group algebra `F_p[S_k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    field: PrimeField,
    k: usize,
    terms: BTreeMap<Permutation, u32>,
}

impl GroupAlgebraElement {
    pub fn zero(field: PrimeField, k: usize) -> Self {
        GroupAlgebraElement {
            field,
            k,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(field: PrimeField, k: usize) -> Self {
        Self::from_permutation(field, Permutation::identity(k))
    }

    pub fn from_permutation(field: PrimeField, sigma: Permutation) -> Self {
        let mut e = Self::zero(field, sigma.len());
        e.add_term(sigma, 1);
        e
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &BTreeMap<Permutation, u32> {
        &self.terms
    }

    pub fn coefficient(&self, sigma: &Permutation) -> u32 {
        self.terms.get(sigma).copied().unwrap_or(0)
    }

    fn add_term(&mut self, sigma: Permutation, coeff: u32) {
        let f = self.field;
        let c = coeff % f.p();
        if c == 0 {
            return;
        }
        match self.terms.get_mut(&sigma) {
            Some(entry) => {
                *entry = f.add(*entry, c);
                if *entry == 0 {
                    self.terms.remove(&sigma);
                }
            }
            None => {
                self.terms.insert(sigma, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), TensorError> {
        if self.field != other.field || self.k != other.k {
            return Err(TensorError::Incompatible);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.check(other)?;
        let mut out = self.clone();
        for (s, &c) in &other.terms {
            out.add_term(s.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: u32) -> Self {
        let mut out = Self::zero(self.field, self.k);
        for (s, &a) in &self.terms {
            out.add_term(s.clone(), self.field.mul(a, c % self.field.p()));
        }
        out
    }

    /// Group-algebra product, extending `σ·τ = σ ∘ τ` bilinearly.
    pub fn mul(&self, other: &Self) -> Result<Self, TensorError> {
        self.check(other)?;
        let mut out = Self::zero(self.field, self.k);
        for (s, &a) in &self.terms {
            for (t, &b) in &other.terms {
                out.add_term(s.compose(t), self.field.mul(a, b));
            }
        }
        Ok(out)
    }

    /// `1 ⊗ self` in `F_p[S_{k+1}]`.
    pub fn shift_right(&self) -> Self {
        let mut out = Self::zero(self.field, self.k + 1);
        for (s, &c) in &self.terms {
            out.add_term(s.shift_right(), c);
        }
        out
    }
}

/// `Σ_σ σ` (unsigned) or `Σ_σ sgn(σ) σ` (signed).
pub fn symmetrizer(field: PrimeField, k: usize, signed: bool) -> GroupAlgebraElement {
    let mut out = GroupAlgebraElement::zero(field, k);
    for sigma in Permutation::all(k) {
        let c = field.sign(signed && sigma.is_odd());
        out.add_term(sigma, c);
    }
    out
}

/// The Dynkin–Specht–Wever element: `β₂ = 1 - (1,2)` and
/// `β_k = (1 ⊗ β_{k-1}) · (1 - (1, 2, .., k))`. On words it produces the
/// bracket `[x₁, [x₂, .. [x_{k-1}, x_k] ..]]`.
pub fn dsw(field: PrimeField, k: usize) -> Result<GroupAlgebraElement, TensorError> {
    if k < 2 {
        return Err(TensorError::DswOrder(k));
    }
    let one_minus = |sigma: Permutation| {
        let id = GroupAlgebraElement::identity(field, sigma.len());
        id.sub(&GroupAlgebraElement::from_permutation(field, sigma))
            .expect("same degree")
    };
    let mut beta = one_minus(Permutation::transposition(2, 0, 1));
    for j in 3..=k {
        beta = beta
            .shift_right()
            .mul(&one_minus(Permutation::long_cycle(j)))?;
    }
    Ok(beta)
}

/// `(1/k) β_k`, defined when `p ∤ k`.
pub fn lie_idempotent(field: PrimeField, k: usize) -> Result<GroupAlgebraElement, TensorError> {
    let inv = field
        .inv((k % field.p() as usize) as u32)
        .map_err(|_| TensorError::NotInvertible { k, p: field.p() })?;
    Ok(dsw(field, k)?.scale(inv))
}

/// Right action of a group-algebra element on a tensor, extended linearly.
pub fn act(
    delta: &GroupAlgebraElement,
    v: &TensorElement,
    mode: SignMode,
) -> Result<TensorElement, TensorError> {
    if delta.k() != v.length() {
        return Err(TensorError::LengthMismatch {
            expected: delta.k(),
            found: v.length(),
        });
    }
    let space = v.space();
    if delta.field() != space.field() {
        return Err(TensorError::Incompatible);
    }
    let f = space.field();
    let mut out = TensorElement::zero(space.clone(), v.length());
    for (word, &cw) in v.terms() {
        for (sigma, &cs) in delta.terms() {
            let (image, sign) = apply_permutation(space, word, sigma, mode)?;
            let c = f.mul(f.mul(cw, cs), sign);
            let entry = out.terms.entry(image).or_insert(0);
            *entry = f.add(*entry, c);
        }
    }
    out.terms.retain(|_, c| *c != 0);
    Ok(out)
}

/// Matrix of `v ↦ v·δ` on `V^{⊗k}` in the lexicographic word basis
/// (column `j` is the image of the `j`-th basis word).
pub fn operator_matrix(
    delta: &GroupAlgebraElement,
    space: &GradedSpace,
    mode: SignMode,
) -> Result<FpMatrix, TensorError> {
    let k = delta.k();
    if delta.field() != space.field() {
        return Err(TensorError::Incompatible);
    }
    space.check_mode(mode)?;
    let n = space.tensor_dim(k, MAX_OPERATOR_COLUMNS)?;
    let f = space.field();
    let mut m = FpMatrix::zeros(f, n, n);
    for col in 0..n {
        let word = space.word_at(k, col);
        for (sigma, &cs) in delta.terms() {
            let (image, sign) = apply_permutation(space, &word, sigma, mode)?;
            let row = space.word_index(&image);
            let v = f.add(m.get(row, col), f.mul(cs, sign));
            m.set(row, col, v);
        }
    }
    Ok(m)
}

/// Which symmetrizer the relation computation applies to the first `l`
/// factors; the choice is tied to the parity of the space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InsertionParity {
    /// Generators in even degree, alternating symmetrizer, no Koszul signs.
    Even,
    /// Generators in odd degree, plain symmetrizer, Koszul signs.
    Odd,
}

/// The permutation of `l + 1` letters that moves the last factor to
/// position `j` (1-based) and shifts the factors in between one step right.
pub fn insertion_cycle(l: usize, j: usize) -> Permutation {
    let images: Vec<usize> = (1..=l + 1)
        .map(|m| {
            if m < j {
                m
            } else if m == j {
                l + 1
            } else {
                m - 1
            }
        })
        .collect();
    Permutation::from_one_based(&images).expect("insertion cycle is a bijection")
}

#[derive(Debug, Clone, Serialize)]
pub struct MonomialCensus {
    pub total_terms: usize,
    pub distinct: usize,
    pub expected_distinct: usize,
    pub each_exactly_twice: bool,
}

/// Result of the relation-space computation for the `l(l+1)` vectors
/// `(s_l(x₁ ⊗ .. ⊗ x_l) ⊗ x_i)·σ_j`.
#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub l: usize,
    pub p: u32,
    pub parity: InsertionParity,
    /// Insertion positions `j` that were included.
    pub families: Vec<usize>,
    pub ambient_dim: usize,
    pub kernel_dimension: usize,
    /// Kernel basis; coordinate `(i-1)·|families| + idx(j)` holds `c_{i,j}`.
    pub relation_basis: Vec<Vec<u32>>,
    /// Every kernel vector satisfies `c_{i,j} = (-1)^{j-1} c_{i,1}` (even
    /// generators) or `c_{i,j} = c_{i,1}` (odd generators, where moving the
    /// last letter to slot `j` costs an extra `(-1)^{l+1-j}`).
    pub sign_pattern: bool,
    /// Ranks of the individual families `{v_{i,j}}_i`.
    pub family_ranks: Vec<usize>,
    pub census: MonomialCensus,
}

pub struct RelationFamilies {
    pub space: Arc<GradedSpace>,
    /// `vectors[i][j]` is `(s_l(x₁ ⊗ .. ⊗ x_l) ⊗ x_{i+1})·σ_{j+1}`.
    pub vectors: Vec<Vec<TensorElement>>,
    pub mode: SignMode,
}

/// Builds the `l × (l+1)` array of image vectors for the multiplicity
/// argument on `V^{⊗(l+1)}`, `dim V = l`.
pub fn relation_families(
    l: usize,
    p: u32,
    parity: InsertionParity,
) -> Result<RelationFamilies, TensorError> {
    if !(1 < l && l + 1 < p as usize) {
        return Err(TensorError::InsertionRange { l, p });
    }
    let field = PrimeField::new(p)?;
    let (degree, signed) = match parity {
        InsertionParity::Even => (2, true),
        InsertionParity::Odd => (1, false),
    };
    let space = Arc::new(GradedSpace::uniform(field, l, degree)?);
    let mode = SignMode::Koszul;
    let base = TensorElement::from_word(space.clone(), TensorWord((0..l).collect()))?;
    let sym = act(&symmetrizer(field, l, signed), &base, mode)?;
    let mut vectors = Vec::with_capacity(l);
    for i in 0..l {
        let xi = TensorElement::from_word(space.clone(), TensorWord(vec![i]))?;
        let head = sym.tensor(&xi)?;
        let row = (1..=l + 1)
            .map(|j| {
                let sigma = GroupAlgebraElement::from_permutation(field, insertion_cycle(l, j));
                act(&sigma, &head, mode)
            })
            .collect::<Result<Vec<_>, _>>()?;
        vectors.push(row);
    }
    Ok(RelationFamilies {
        space,
        vectors,
        mode,
    })
}

/// Counts the monomials produced by expanding every `v_{i,j}` term by term,
/// before any cancellation.
fn monomial_census(l: usize) -> MonomialCensus {
    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut total = 0;
    let perms = Permutation::all(l);
    for i in 0..l {
        for j in 1..=l + 1 {
            let sigma = insertion_cycle(l, j);
            for tau in &perms {
                let mut head: Vec<usize> = tau.images().to_vec();
                head.push(i);
                let word: Vec<usize> = sigma.images().iter().map(|&q| head[q]).collect();
                *counts.entry(word).or_insert(0) += 1;
                total += 1;
            }
        }
    }
    let fact: usize = (1..=l + 1).product();
    MonomialCensus {
        total_terms: total,
        distinct: counts.len(),
        expected_distinct: l * fact / 2,
        each_exactly_twice: counts.values().all(|&c| c == 2),
    }
}

/// Computes the space of coefficient vectors `(c_{i,j})` with
/// `Σ c_{i,j} v_{i,j} = 0`, optionally leaving out the last family
/// (`j = l + 1`).
pub fn insertion_relations(
    l: usize,
    p: u32,
    parity: InsertionParity,
    drop_last: bool,
) -> Result<RelationReport, TensorError> {
    let fam = relation_families(l, p, parity)?;
    let field = fam.space.field();
    let families: Vec<usize> = if drop_last {
        (1..=l).collect()
    } else {
        (1..=l + 1).collect()
    };
    let ambient_dim = l.pow(l as u32 + 1);
    let mut columns = Vec::with_capacity(l * families.len());
    for i in 0..l {
        for &j in &families {
            columns.push(fam.vectors[i][j - 1].to_vector());
        }
    }
    let m = FpMatrix::from_columns(field, ambient_dim, &columns)?;
    let kernel = m.kernel_basis();
    let width = families.len();
    let sign_pattern = kernel.iter().all(|c| {
        (0..l).all(|i| {
            let first = c[i * width];
            families.iter().enumerate().all(|(idx, &j)| {
                let flip = parity == InsertionParity::Even && (j - 1) % 2 == 1;
                let expected = if !flip {
                    first
                } else {
                    field.neg(first)
                };
                c[i * width + idx] == expected
            })
        })
    });
    let family_ranks = families
        .iter()
        .map(|&j| {
            let vecs: Vec<Vec<u32>> = (0..l).map(|i| fam.vectors[i][j - 1].to_vector()).collect();
            crate::field::rank_of_vectors(field, ambient_dim, &vecs)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RelationReport {
        l,
        p,
        parity,
        families,
        ambient_dim,
        kernel_dimension: kernel.len(),
        relation_basis: kernel,
        sign_pattern,
        family_ranks,
        census: monomial_census(l),
    })
}

/// The image families `{v_{i,j}}_i` for the given `j`s as coordinate
/// vectors, ready for a direct-sum check.
pub fn image_families(
    l: usize,
    p: u32,
    parity: InsertionParity,
    js: &[usize],
) -> Result<Vec<Vec<Vec<u32>>>, TensorError> {
    let fam = relation_families(l, p, parity)?;
    Ok(js
        .iter()
        .map(|&j| (0..l).map(|i| fam.vectors[i][j - 1].to_vector()).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn xy_space(p: u32, dx: u32, dy: u32) -> Arc<GradedSpace> {
        Arc::new(GradedSpace::new(f(p), vec![("x".into(), dx), ("y".into(), dy)]).unwrap())
    }

    #[test]
    fn permutation_basics() {
        let c = Permutation::long_cycle(3);
        assert_eq!(c.images(), &[1, 2, 0]);
        assert_eq!(c.compose(&c.inverse()), Permutation::identity(3));
        assert!(!c.is_odd());
        assert!(Permutation::transposition(3, 0, 2).is_odd());
        assert_eq!(Permutation::all(4).len(), 24);
        assert!(Permutation::from_images(vec![0, 0]).is_err());
    }

    #[test]
    fn apply_permutation_examples() {
        let s = xy_space(5, 2, 2);
        let xy = TensorWord(vec![0, 1]);
        let swap = Permutation::transposition(2, 0, 1);
        let (w, sign) = apply_permutation(&s, &xy, &swap, SignMode::Unsigned).unwrap();
        assert_eq!((w, sign), (TensorWord(vec![1, 0]), 1));

        let odd = xy_space(5, 1, 3);
        let id = Permutation::identity(2);
        assert_eq!(
            apply_permutation(&odd, &xy, &id, SignMode::Koszul).unwrap(),
            (xy.clone(), 1)
        );
        assert_eq!(
            apply_permutation(&odd, &xy, &swap, SignMode::Koszul).unwrap(),
            (TensorWord(vec![1, 0]), 4)
        );
        assert!(matches!(
            apply_permutation(&odd, &TensorWord(vec![0]), &swap, SignMode::Koszul),
            Err(TensorError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn koszul_refuses_mixed_parity() {
        let mixed = xy_space(3, 1, 2);
        let xy = TensorWord(vec![0, 1]);
        let swap = Permutation::transposition(2, 0, 1);
        assert_eq!(
            apply_permutation(&mixed, &xy, &swap, SignMode::Koszul),
            Err(TensorError::MixedParity)
        );
        assert!(apply_permutation(&mixed, &xy, &swap, SignMode::Unsigned).is_ok());
    }

    #[test]
    fn symmetrizer_examples() {
        let f2 = f(3);
        let s1 = symmetrizer(f2, 1, false);
        assert_eq!(s1, GroupAlgebraElement::identity(f2, 1));
        let swap = Permutation::transposition(2, 0, 1);
        let s2 = symmetrizer(f2, 2, false);
        assert_eq!(s2.coefficient(&swap), 1);
        let a2 = symmetrizer(f2, 2, true);
        assert_eq!(a2.coefficient(&swap), 2);
        assert_eq!(a2, dsw(f2, 2).unwrap());
        assert_eq!(symmetrizer(f2, 4, true).terms().len(), 24);
    }

    #[test]
    fn dsw_three_letters_mod_two() {
        let space = Arc::new(
            GradedSpace::new(
                f(2),
                vec![("x".into(), 2), ("y".into(), 2), ("z".into(), 2)],
            )
            .unwrap(),
        );
        let v = TensorElement::from_word(space.clone(), TensorWord(vec![0, 1, 2])).unwrap();
        let out = act(&dsw(f(2), 3).unwrap(), &v, SignMode::Unsigned).unwrap();
        let words: Vec<Vec<usize>> = out.terms().keys().map(|w| w.0.clone()).collect();
        assert_eq!(
            words,
            vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 2, 0], vec![2, 1, 0]]
        );
        assert!(out.terms().values().all(|&c| c == 1));
        assert!(dsw(f(2), 1).is_err());
    }

    #[test]
    fn dsw_is_nested_bracket_over_integers_mod_7() {
        // [x,[y,z]] = xyz - xzy - yzx + zyx
        let space = Arc::new(GradedSpace::uniform(f(7), 3, 2).unwrap());
        let v = TensorElement::from_word(space.clone(), TensorWord(vec![0, 1, 2])).unwrap();
        let out = act(&dsw(f(7), 3).unwrap(), &v, SignMode::Koszul).unwrap();
        assert_eq!(out.coefficient(&TensorWord(vec![0, 1, 2])), 1);
        assert_eq!(out.coefficient(&TensorWord(vec![0, 2, 1])), 6);
        assert_eq!(out.coefficient(&TensorWord(vec![1, 2, 0])), 6);
        assert_eq!(out.coefficient(&TensorWord(vec![2, 1, 0])), 1);
        assert_eq!(out.terms().len(), 4);
    }

    #[test]
    fn act_examples() {
        let s = xy_space(5, 2, 2);
        let v = TensorElement::from_word(s.clone(), TensorWord(vec![0, 1])).unwrap();
        let id = GroupAlgebraElement::identity(f(5), 2);
        assert_eq!(act(&id, &v, SignMode::Unsigned).unwrap(), v);
        let sym = act(&symmetrizer(f(5), 2, false), &v, SignMode::Unsigned).unwrap();
        assert_eq!(sym.terms().len(), 2);
        assert_eq!(sym.coefficient(&TensorWord(vec![1, 0])), 1);

        let one = Arc::new(GradedSpace::uniform(f(2), 1, 2).unwrap());
        let xxx = TensorElement::from_word(one, TensorWord(vec![0, 0, 0])).unwrap();
        assert!(act(&dsw(f(2), 3).unwrap(), &xxx, SignMode::Unsigned)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn operator_matrix_examples() {
        let s = GradedSpace::uniform(f(3), 2, 2).unwrap();
        let id = GroupAlgebraElement::identity(f(3), 3);
        assert_eq!(
            operator_matrix(&id, &s, SignMode::Unsigned).unwrap(),
            FpMatrix::identity(f(3), 8)
        );
        let one = GradedSpace::uniform(f(2), 1, 2).unwrap();
        assert!(operator_matrix(&dsw(f(2), 2).unwrap(), &one, SignMode::Unsigned)
            .unwrap()
            .is_zero());
        let e = lie_idempotent(f(5), 3).unwrap();
        let m = operator_matrix(&e, &s_at(5), SignMode::Koszul).unwrap();
        assert_eq!(m.mul(&m).unwrap(), m);
        assert!(matches!(
            lie_idempotent(f(3), 3),
            Err(TensorError::NotInvertible { .. })
        ));
        let big = GradedSpace::uniform(f(3), 5, 2).unwrap();
        assert!(matches!(
            operator_matrix(&GroupAlgebraElement::identity(f(3), 6), &big, SignMode::Unsigned),
            Err(TensorError::TooLarge(_))
        ));
    }

    fn s_at(p: u32) -> GradedSpace {
        GradedSpace::uniform(f(p), 2, 1).unwrap()
    }

    #[test]
    fn insertion_cycles() {
        // σ_{l+1} is the identity; σ_1 moves the last letter to the front
        assert_eq!(insertion_cycle(2, 3), Permutation::identity(3));
        assert_eq!(insertion_cycle(2, 1).images(), &[2, 0, 1]);
        assert_eq!(insertion_cycle(3, 2).images(), &[0, 3, 1, 2]);
    }

    #[test]
    fn insertion_range_guard() {
        assert!(matches!(
            insertion_relations(2, 3, InsertionParity::Even, false),
            Err(TensorError::InsertionRange { .. })
        ));
        assert!(matches!(
            insertion_relations(1, 5, InsertionParity::Even, false),
            Err(TensorError::InsertionRange { .. })
        ));
    }

    #[test]
    fn insertion_l2_p5() {
        for parity in [InsertionParity::Even, InsertionParity::Odd] {
            let r = insertion_relations(2, 5, parity, false).unwrap();
            assert_eq!(r.ambient_dim, 8);
            assert_eq!(r.kernel_dimension, 2, "{parity:?}");
            assert!(r.sign_pattern, "{parity:?}: {:?}", r.relation_basis);
            let expected = match parity {
                InsertionParity::Even => vec![1, 4, 1, 0, 0, 0],
                InsertionParity::Odd => vec![1, 1, 1, 0, 0, 0],
            };
            assert_eq!(r.relation_basis[0], expected);
            assert_eq!(r.census.distinct, 6);
            assert!(r.census.each_exactly_twice);
            let dropped = insertion_relations(2, 5, parity, true).unwrap();
            assert_eq!(dropped.kernel_dimension, 0);
        }
    }
}
