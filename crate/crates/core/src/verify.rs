//! The acceptance checks, as library functions so the command-line tool and
//! the integration tests run the same code.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::field::{FpMatrix, PrimeField};
use crate::free_lie::{binomial, count_lyndon_words, lyndon_words, multidegree_count, witt_dim};
use crate::growth::{
    certify, euclid_schedule, liminf_min_of_cover, schedule_mod2_moore, solve_residue_congruence,
    congruence_residues_brute_force, EventuallyPeriodic, HyperbolicityParams, IndexSet, Variant,
    Verdict,
};
use crate::lambda::{
    basis, degree, leibniz_then_straighten, straighten, tilde_dim_upto, LambdaElement, Monomial,
};
use crate::logbounds::LnExpr;
use crate::moore::{mod2_embedding_count, mod2_embedding_trace, smash_power, MooreWedge};
use crate::tensor::{
    dsw, insertion_relations, lie_idempotent, operator_matrix, GradedSpace, GroupAlgebraElement,
    InsertionParity, SignMode,
};

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub time_limit_ms: u128,
}

impl CheckReport {
    pub fn within_time(&self) -> bool {
        self.elapsed_ms < self.time_limit_ms
    }
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(id: u32, name: &'static str, limit: Duration, f: impl FnOnce() -> Outcome) -> CheckReport {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let (passed, detail) = match out {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckReport {
        id,
        name,
        passed,
        detail,
        elapsed_ms: elapsed.as_millis(),
        time_limit_ms: limit.as_millis(),
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub const CHECK_COUNT: u32 = 12;

pub fn run_check(id: u32) -> Option<CheckReport> {
    Some(match id {
        1 => run(1, "witt dimension equals Lyndon word count", secs(5), witt_vs_lyndon),
        2 => run(2, "W(2, p^2) divisible by 4", secs(1), witt_square_mod4),
        3 => run(3, "DSW square and idempotent identities", secs(30), dsw_identities),
        4 => run(4, "symmetrizer insertion relations", secs(60), insertion_checks),
        5 => run(5, "lambda algebra soundness", secs(120), lambda_soundness),
        6 => run(6, "positive-index lambda count bound", secs(60), tilde_bound),
        7 => run(7, "Moore smash calculus", secs(1), moore_calculus),
        8 => run(8, "Hilton-Milnor multidegree counts", secs(1), hilton_milnor_counts),
        9 => run(9, "mod 2 Moore schedule certificate", secs(5), mod2_schedule),
        10 => run(10, "residue congruence and Euclidean schedule", secs(30), criterion_arithmetic),
        11 => run(11, "liminf over a cover of subsequences", secs(10), periodic_liminf),
        12 => run(12, "rank of the DSW operator", secs(30), dsw_rank),
        _ => return None,
    })
}

pub fn run_all() -> Vec<CheckReport> {
    (1..=CHECK_COUNT).filter_map(run_check).collect()
}

fn witt_vs_lyndon() -> Outcome {
    let mut checked = 0;
    for m in 1..=3u64 {
        for n in 1..=16u64 {
            let w = witt_dim(m, n).map_err(|e| e.to_string())?;
            let words = lyndon_words(m, n).map_err(|e| e.to_string())?;
            let streamed = count_lyndon_words(m as u8, n as usize);
            ensure(
                w == BigUint::from(words.len()) && w == BigUint::from(streamed),
                || format!("m={m} n={n}: W={w}, words={}, streamed={streamed}", words.len()),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (m, n) pairs agree"))
}

fn witt_square_mod4() -> Outcome {
    let mut parts = Vec::new();
    for p in [3u64, 5, 7, 11, 13] {
        let w = witt_dim(2, p * p).map_err(|e| e.to_string())?;
        let r = (&w % 4u32).to_u32().expect("small");
        ensure(r == 0, || format!("W(2,{}) = {w} ≡ {r} mod 4", p * p))?;
        parts.push(format!("W(2,{})≡0", p * p));
    }
    Ok(parts.join(", "))
}

fn dsw_spaces(field: PrimeField) -> Vec<(GradedSpace, SignMode)> {
    let mut out = Vec::new();
    for dim in 1..=3 {
        for degree in [2u32, 1] {
            let space = GradedSpace::uniform(field, dim, degree).expect("valid space");
            for mode in [SignMode::Unsigned, SignMode::Koszul] {
                out.push((space.clone(), mode));
            }
        }
    }
    out
}

fn dsw_identities() -> Outcome {
    let mut checked = 0;
    for p in [2u32, 3, 5, 7] {
        let field = PrimeField::new(p).map_err(|e| e.to_string())?;
        for k in 2..=5usize {
            if (k as u32).gcd(&p) != 1 {
                continue;
            }
            let beta = dsw(field, k).map_err(|e| e.to_string())?;
            let idem = lie_idempotent(field, k).map_err(|e| e.to_string())?;
            let square = beta.mul(&beta).map_err(|e| e.to_string())?;
            let kbeta = beta.scale((k % p as usize) as u32);
            ensure(square == kbeta, || format!("β_{k}² ≠ {k}β_{k} in F_{p}[S_{k}]"))?;
            for (space, mode) in dsw_spaces(field) {
                let b = operator_matrix(&beta, &space, mode).map_err(|e| e.to_string())?;
                let e = operator_matrix(&idem, &space, mode).map_err(|e| e.to_string())?;
                let bb = b.mul(&b).map_err(|e| e.to_string())?;
                let ee = e.mul(&e).map_err(|e| e.to_string())?;
                let tag = || format!("p={p} k={k} dim={} {:?} {:?}", space.dim(), space.parity(), mode);
                ensure(bb == b.scale((k % p as usize) as u32), || format!("β∘β ≠ kβ at {}", tag()))?;
                ensure(ee == e, || format!("(1/k)β not idempotent at {}", tag()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} operator pairs checked"))
}

fn insertion_checks() -> Outcome {
    let mut details = Vec::new();
    for (l, p) in [(2usize, 5u32), (3, 7)] {
        let even = insertion_relations(l, p, InsertionParity::Even, false).map_err(|e| e.to_string())?;
        let census = &even.census;
        ensure(even.kernel_dimension == l, || {
            format!("l={l}: kernel dimension {} ≠ {l}", even.kernel_dimension)
        })?;
        ensure(even.sign_pattern, || {
            format!("l={l}: kernel vectors break c_(i,j) = (-1)^(j-1) c_(i,1)")
        })?;
        ensure(
            census.distinct == census.expected_distinct && census.each_exactly_twice,
            || {
                format!(
                    "l={l}: {} distinct monomials (expected {}), each twice: {}",
                    census.distinct, census.expected_distinct, census.each_exactly_twice
                )
            },
        )?;
        for parity in [InsertionParity::Even, InsertionParity::Odd] {
            let dropped = insertion_relations(l, p, parity, true).map_err(|e| e.to_string())?;
            ensure(dropped.kernel_dimension == 0, || {
                format!("l={l} {parity:?}: kernel {} after dropping the last family", dropped.kernel_dimension)
            })?;
        }
        let odd = insertion_relations(l, p, InsertionParity::Odd, false).map_err(|e| e.to_string())?;
        ensure(odd.kernel_dimension == l && odd.sign_pattern, || {
            format!("l={l} odd generators: kernel {} constant pattern {}", odd.kernel_dimension, odd.sign_pattern)
        })?;
        details.push(format!(
            "(l={l},p={p}) kernel {l}, alternating; odd generators kernel {l}, constant; {} monomials each twice",
            census.distinct
        ));
    }
    Ok(details.join("; "))
}

/// All admissible monomials of degree `≤ max` with every index positive.
pub fn positive_admissible_upto(max: u32) -> Result<Vec<Monomial>, String> {
    let mut out = Vec::new();
    for t in 1..=max {
        for s in 1..=t as usize {
            out.extend(
                basis(s, t)
                    .map_err(|e| e.to_string())?
                    .into_iter()
                    .filter(|m| m.iter().all(|&i| i > 0)),
            );
        }
    }
    Ok(out)
}

fn lambda_soundness() -> Outcome {
    const MAX: u32 = 20;
    // Every admissible monomial is m·λ₀^k with m positive-indexed; λ₀ has
    // zero differential and a trailing λ₀ never takes part in a rewrite, so
    // ∂∂(m λ₀^k) = ∂∂(m)·λ₀^k.
    let positive = positive_admissible_upto(MAX)?;
    for m in &positive {
        let dd = LambdaElement::monomial(m).differential().differential();
        ensure(dd.is_zero(), || format!("∂∂{m:?} = {dd}"))?;
    }
    let mut tails = 0;
    for m in positive.iter().filter(|m| degree(m) <= 12) {
        for k in 1..=2 {
            let mut w = m.clone();
            w.extend(std::iter::repeat_n(0, k));
            let d = LambdaElement::monomial(&w).differential();
            let mut expected = LambdaElement::zero();
            for t in LambdaElement::monomial(m).differential().terms() {
                let mut v = t.clone();
                v.extend(std::iter::repeat_n(0, k));
                expected.toggle(v);
            }
            ensure(d == expected && d.differential().is_zero(), || {
                format!("λ₀-tail mismatch at {w:?}")
            })?;
            tails += 1;
        }
    }
    let mut pairs = 0;
    for a in 0..MAX {
        for b in (2 * a + 1)..=(MAX - a) {
            let w = [a, b];
            let lhs = straighten(&w).map_err(|e| e.to_string())?.differential();
            let rhs = leibniz_then_straighten(&w).map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || format!("∂ and straightening disagree on λ{a}λ{b}"))?;
            pairs += 1;
        }
    }
    for i in 0..=6 {
        let s = straighten(&[i, 2 * i + 1]).map_err(|e| e.to_string())?;
        ensure(s.is_zero(), || format!("λ{i}λ{} = {s}", 2 * i + 1))?;
    }
    Ok(format!(
        "∂∂=0 on {} positive-index admissibles (+{tails} λ₀-tail checks); {pairs} inadmissible pairs confluent; λ_iλ_(2i+1)=0 for i≤6",
        positive.len()
    ))
}

fn tilde_bound() -> Outcome {
    let mut counts = Vec::new();
    let enumerated = positive_admissible_upto(14)?;
    for q in 1..=14u32 {
        let t = tilde_dim_upto(q);
        let direct = enumerated.iter().filter(|m| degree(m) <= q).count() as u128;
        let bound = binomial(2 * q as u64, q as u64 - 1);
        ensure(t.count == direct, || format!("q={q}: recursion {} vs enumeration {direct}", t.count))?;
        ensure(BigUint::from(t.bound) == bound, || format!("q={q}: bound {} vs C(2q,q-1) {bound}", t.bound))?;
        ensure(t.count <= t.bound, || format!("q={q}: {} > {}", t.count, t.bound))?;
        counts.push(format!("{}≤{}", t.count, t.bound));
    }
    ensure(tilde_dim_upto(2).count == 3, || "q=2 count is not 3".into())?;
    Ok(format!("q=1..14: {}", counts.join(" ")))
}

fn moore_calculus() -> Outcome {
    for (n, p, r) in [(3u32, 3u64, 1u32), (4, 5, 2), (3, 2, 2)] {
        let single = MooreWedge::moore(n, p, r).map_err(|e| e.to_string())?;
        let mut acc = single.clone();
        for k in 1..=10u32 {
            if k > 1 {
                acc = acc.smash(&single).map_err(|e| e.to_string())?;
            }
            for j in 0..k {
                let got = acc.multiplicity(k * n - j);
                let want = binomial((k - 1) as u64, j as u64);
                ensure(got == want, || {
                    format!("P^{n}({p}^{r})^{k}: multiplicity of P^{} is {got}, not C({},{j})", k * n - j, k - 1)
                })?;
            }
            ensure(acc.moore_count() == BigUint::one() << (k - 1), || format!("k={k}: total count"))?;
            let closed = smash_power(n, k, p, r).map_err(|e| e.to_string())?;
            ensure(closed == acc, || format!("smash_power({n},{k}) differs from iteration"))?;
        }
    }
    let trace = mod2_embedding_trace(20);
    for s in 0..=20u32 {
        let (d, c) = mod2_embedding_count(s);
        ensure(d == 3 * s + 2 && c == BigUint::one() << s, || {
            format!("s={s}: ({d}, {c}) ≠ ({}, 2^{s})", 3 * s + 2)
        })?;
        ensure(trace[s as usize].dimension == d && trace[s as usize].count == c, || {
            format!("s={s}: trace disagrees")
        })?;
    }
    Ok("C(k-1,j) for k≤10 at three regimes; (3s+2, 2^s) for s≤20".into())
}

fn hilton_milnor_counts() -> Outcome {
    for w in 1..=16u64 {
        let mut total = BigUint::zero();
        for a1 in 0..=w {
            total += multidegree_count(a1, w - a1).map_err(|e| e.to_string())?;
        }
        let wd = witt_dim(2, w).map_err(|e| e.to_string())?;
        ensure(total == wd, || format!("w={w}: Σ multidegree = {total}, W = {wd}"))?;
    }
    let w21 = witt_dim(2, 21).map_err(|e| e.to_string())?;
    ensure(w21 == BigUint::from(99858u32), || format!("W(2,21) = {w21}"))?;
    Ok("Σ multidegree counts = W(2,w) for w≤16; W(2,21) = 99858".into())
}

fn mod2_schedule() -> Outcome {
    let schedule = schedule_mod2_moore(3, 2, 100).map_err(|e| e.to_string())?;
    for e in &schedule.entries {
        let w = witt_dim(2, 2 * e.s + 1).map_err(|e| e.to_string())?;
        ensure(e.degree == 27 * e.s as u128 + 14, || format!("s={}: degree {}", e.s, e.degree))?;
        ensure(e.count == (w << e.s), || format!("s={}: count {}", e.s, e.count))?;
    }
    ensure(schedule.entries.len() == 101, || "expected s = 0..=100".into())?;
    let cert = certify(&schedule, &[]).map_err(|e| e.to_string())?;
    let ninth = LnExpr::ln2_multiple(BigRational::new(1.into(), 9.into()));
    ensure(cert.verdict == Verdict::Positive, || "verdict is not positive".into())?;
    ensure(cert.analytic_limit_expr == ninth, || format!("limit {}", cert.analytic_limit))?;
    ensure(cert.relative_gap < 0.05, || format!("relative gap {}", cert.relative_gap))?;
    Ok(format!(
        "limit {} ≈ {:.6}, rate at s=100 {:.6} (gap {:.2}%)",
        cert.analytic_limit,
        cert.analytic_limit_value,
        cert.empirical_rate,
        100.0 * cert.relative_gap
    ))
}

fn criterion_arithmetic() -> Outcome {
    let mut solved = 0;
    for variant in [Variant::Mod2, Variant::OddPrime] {
        for modulus in 1..=12u64 {
            for m in 1..=6u64 {
                for l in 1..=6u64 {
                    for a in 0..modulus as i64 {
                        for i in 0..modulus {
                            let fast = solve_residue_congruence(variant, m, l, modulus, a, i);
                            let brute = congruence_residues_brute_force(variant, m, l, modulus, a, i);
                            let expected = (brute.len() == 1).then(|| brute[0]);
                            ensure(fast == expected, || {
                                format!("{variant:?} M={m} l={l} A={modulus} a={a} i={i}: {fast:?} vs {brute:?}")
                            })?;
                            solved += 1;
                        }
                    }
                }
            }
        }
    }
    let mut grid = 0;
    for variant in [Variant::Mod2, Variant::OddPrime] {
        for m in 1..=3u64 {
            for l in 1..=3u64 {
                for modulus in 1..=7u64 {
                    for n0 in 1..=3u64 {
                        let params = HyperbolicityParams {
                            p: if variant == Variant::Mod2 { 2 } else { 3 },
                            r: 1,
                            m,
                            l,
                            modulus,
                            a: 0,
                            k_slope: 1,
                            k_offset: 0,
                            n0,
                            n_min: 1,
                            variant,
                        };
                        euclid_grid_point(&params)?;
                        grid += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{solved} congruences match brute force; {grid} grid points × s≤1000 pass"))
}

/// Checks the schedule against a recurrence built from an explicit sum for
/// the total suspension.
fn euclid_grid_point(params: &HyperbolicityParams) -> Result<(), String> {
    let (n0, l, m) = (params.n0 as u128, params.l as u128, params.m as u128);
    let total: u128 = (0..=n0 * l).map(|j| n0 + j).sum();
    let step = (total + n0) * n0 * l * m + n0 * m;
    let mut expr = (total + n0) * m + u128::from(params.variant == Variant::Mod2);
    let a = params.modulus as u128;
    let mut prev_n: Option<u128> = None;
    for s in 0..=1000u64 {
        let e = euclid_schedule(params, s).map_err(|e| e.to_string())?;
        let tag = || format!("{params:?} s={s}");
        ensure(e.expression == expr, || format!("expression {} ≠ {expr} at {}", e.expression, tag()))?;
        ensure(a * e.n + e.i as u128 == expr && (e.i as u128) < a, || format!("division fails at {}", tag()))?;
        if let Some(pn) = prev_n {
            ensure(e.n >= pn && e.n - pn < e.gap_bound, || format!("gap bound fails at {}", tag()))?;
        }
        prev_n = Some(e.n);
        expr += step;
    }
    Ok(())
}

fn all_words(alphabet: i64, len: usize) -> Vec<Vec<i64>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for w in all_words(alphabet, len - 1) {
        for c in 0..alphabet {
            let mut v = w.clone();
            v.push(c);
            out.push(v);
        }
    }
    out
}

fn periodic_liminf() -> Outcome {
    let covers: Vec<Vec<IndexSet>> = vec![
        vec![IndexSet::All],
        (0..2).map(|r| IndexSet::ResidueClass { modulus: 2, residue: r }).collect(),
        (0..3).map(|r| IndexSet::ResidueClass { modulus: 3, residue: r }).collect(),
        vec![
            IndexSet::ResidueClass { modulus: 2, residue: 0 },
            IndexSet::ResidueClass { modulus: 4, residue: 1 },
            IndexSet::ResidueClass { modulus: 4, residue: 3 },
        ],
    ];
    let gap = [IndexSet::ResidueClass { modulus: 2, residue: 0 }];
    let int = |v: i64| BigRational::from_integer(v.into());
    let mut checked = 0;
    for len in 1..=6 {
        for word in all_words(5, len) {
            let period: Vec<BigRational> = word.iter().map(|&v| int(v)).collect();
            // a prefix value below the alphabet must not affect the liminf
            for prefix in [vec![], vec![int(-1)], vec![int(-1), int(7)]] {
                let seq = EventuallyPeriodic::new(prefix, period.clone()).map_err(|e| e.to_string())?;
                let direct = int(*word.iter().min().expect("nonempty"));
                for cover in &covers {
                    let got = liminf_min_of_cover(&seq, cover).map_err(|e| e.to_string())?;
                    ensure(got == direct, || format!("{word:?} cover {cover:?}: {got} ≠ {direct}"))?;
                    checked += 1;
                }
                ensure(liminf_min_of_cover(&seq, &gap).is_err(), || {
                    format!("{word:?}: incomplete cover accepted")
                })?;
            }
        }
    }
    Ok(format!("{checked} sequence/cover pairs agree; incomplete covers rejected"))
}

fn dsw_rank() -> Outcome {
    let mut checked = 0;
    for p in [2u32, 3, 5, 7] {
        let field = PrimeField::new(p).map_err(|e| e.to_string())?;
        for k in 1..=4usize {
            if (k as u32).gcd(&p) != 1 {
                continue;
            }
            let beta = if k == 1 {
                GroupAlgebraElement::identity(field, 1)
            } else {
                dsw(field, k).map_err(|e| e.to_string())?
            };
            for m in 1..=3usize {
                let space = GradedSpace::uniform(field, m, 2).map_err(|e| e.to_string())?;
                let mat: FpMatrix =
                    operator_matrix(&beta, &space, SignMode::Unsigned).map_err(|e| e.to_string())?;
                let w = witt_dim(m as u64, k as u64).map_err(|e| e.to_string())?;
                ensure(BigUint::from(mat.rank()) == w, || {
                    format!("p={p} k={k} m={m}: rank {} ≠ W = {w}", mat.rank())
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (p, k, m) triples: rank β_k = W(m, k)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_checks_pass() {
        for id in [1, 2, 7, 8, 12] {
            let r = run_check(id).unwrap();
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
        assert!(run_check(0).is_none());
    }
}
