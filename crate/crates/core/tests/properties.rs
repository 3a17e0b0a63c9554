use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;

use tgl_core::field::{FpMatrix, PrimeField};
use tgl_core::free_lie::{divisors, witt_dim};
use tgl_core::growth::{
    liminf_min_of_cover, solve_step1_congruence, EventuallyPeriodic, IndexSet,
};
use tgl_core::lambda::{basis, homology_dims, is_admissible, lambda_n_basis, LambdaElement, Monomial};
use tgl_core::moore::MooreWedge;
use tgl_core::tensor::{
    act, dsw, GradedSpace, GroupAlgebraElement, Permutation, SignMode, TensorElement, TensorWord,
};

const PRIMES: [u32; 4] = [2, 3, 5, 7];

fn det_mod(field: PrimeField, m: &[Vec<u32>]) -> u32 {
    let k = m.len();
    let mut total = 0;
    for sigma in Permutation::all(k) {
        let mut term = field.sign(sigma.is_odd());
        for (i, row) in m.iter().enumerate() {
            term = field.mul(term, row[sigma.image(i)]);
        }
        total = field.add(total, term);
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Largest `k` with a nonzero `k × k` minor.
fn rank_by_minors(field: PrimeField, rows: &[Vec<u32>]) -> usize {
    let (r, c) = (rows.len(), rows[0].len());
    for k in (1..=r.min(c)).rev() {
        for rs in subsets(r, k) {
            for cs in subsets(c, k) {
                let minor: Vec<Vec<u32>> =
                    rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j]).collect()).collect();
                if det_mod(field, &minor) != 0 {
                    return k;
                }
            }
        }
    }
    0
}

fn matrix_strategy() -> impl Strategy<Value = (u32, Vec<Vec<i64>>)> {
    (0..4usize, 1..=4usize, 1..=4usize).prop_flat_map(|(pi, r, c)| {
        (
            Just(PRIMES[pi]),
            prop::collection::vec(prop::collection::vec(-3i64..8, c), r),
        )
    })
}

fn wedge_strategy() -> impl Strategy<Value = Vec<(u32, u64)>> {
    prop::collection::vec((2u32..12, 1u64..4), 1..4)
}

fn lambda_word(max_len: usize) -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0u32..7, 0..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_matches_minors((p, rows) in matrix_strategy()) {
        let field = PrimeField::new(p).unwrap();
        let m = FpMatrix::from_rows(field, &rows).unwrap();
        let reduced: Vec<Vec<u32>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        prop_assert_eq!(m.rank(), rank_by_minors(field, &reduced));
        let kernel = m.kernel_basis();
        prop_assert_eq!(kernel.len(), m.cols() - m.rank());
        for v in &kernel {
            prop_assert!(m.apply(v).unwrap().iter().all(|&x| x == 0));
        }
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn action_is_a_right_action(
        pi in 0..4usize,
        k in 2..=4usize,
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
        word in prop::collection::vec(0..3usize, 4),
        odd in any::<bool>(),
    ) {
        let field = PrimeField::new(PRIMES[pi]).unwrap();
        let space = std::sync::Arc::new(GradedSpace::uniform(field, 3, if odd { 1 } else { 2 }).unwrap());
        let perms = Permutation::all(k);
        let s = GroupAlgebraElement::from_permutation(field, a.get(&perms).clone());
        let t = GroupAlgebraElement::from_permutation(field, b.get(&perms).clone());
        let v = TensorElement::from_word(space, TensorWord(word[..k].to_vec())).unwrap();
        for mode in [SignMode::Unsigned, SignMode::Koszul] {
            let lhs = act(&s.mul(&t).unwrap(), &v, mode).unwrap();
            let rhs = act(&t, &act(&s, &v, mode).unwrap(), mode).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn dsw_squares_to_k_beta(pi in 0..4usize, k in 2..=5usize) {
        let field = PrimeField::new(PRIMES[pi]).unwrap();
        let beta = dsw(field, k).unwrap();
        let kk = (k % PRIMES[pi] as usize) as u32;
        prop_assert_eq!(beta.mul(&beta).unwrap(), beta.scale(kk));
    }

    #[test]
    fn smash_is_commutative_and_associative(
        a in wedge_strategy(), b in wedge_strategy(), c in wedge_strategy(),
        pr in prop::sample::select(vec![(3u64, 1u32), (5, 2), (2, 2), (2, 3)]),
    ) {
        let (p, r) = pr;
        let wa = MooreWedge::from_multiplicities(p, r, &a).unwrap();
        let wb = MooreWedge::from_multiplicities(p, r, &b).unwrap();
        let wc = MooreWedge::from_multiplicities(p, r, &c).unwrap();
        let ab = wa.smash(&wb).unwrap();
        prop_assert_eq!(&ab, &wb.smash(&wa).unwrap());
        prop_assert_eq!(ab.smash(&wc).unwrap(), wa.smash(&wb.smash(&wc).unwrap()).unwrap());
        prop_assert_eq!(ab.homology_dim(), wa.homology_dim() * wb.homology_dim());
    }

    #[test]
    fn lambda_product_is_associative_and_leibniz(
        x in lambda_word(3), y in lambda_word(3), z in lambda_word(2),
    ) {
        let (ex, ey, ez) = (
            LambdaElement::monomial(&x),
            LambdaElement::monomial(&y),
            LambdaElement::monomial(&z),
        );
        prop_assert_eq!(ex.multiply(&ey).multiply(&ez), ex.multiply(&ey.multiply(&ez)));
        let lhs = ex.multiply(&ey).differential();
        let rhs = ex.differential().multiply(&ey).add(&ex.multiply(&ey.differential()));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(ex.terms().iter().all(|m| is_admissible(m)));
    }

    #[test]
    fn residue_solution_solves(m in 1u64..10, l in 1u64..10, modulus in 1u64..20, a in -20i64..20, i in 0u64..20) {
        let i = i % modulus;
        match solve_step1_congruence(m, l, modulus, a, i) {
            Some(n) => {
                let lhs = ((m + l * i) as i64 * n as i64 + i as i64 + 1 - a).rem_euclid(modulus as i64);
                prop_assert_eq!(lhs, 0);
            }
            None => prop_assert!(num_integer::gcd(m + l * i, modulus) != 1),
        }
    }

    #[test]
    fn liminf_of_random_cover(
        prefix in prop::collection::vec(-5i64..5, 0..4),
        period in prop::collection::vec(0i64..9, 1..7),
        modulus in 1u64..6,
    ) {
        let q = |v: i64| BigRational::from_integer(v.into());
        let seq = EventuallyPeriodic::new(
            prefix.into_iter().map(q).collect(),
            period.iter().map(|&v| q(v)).collect(),
        ).unwrap();
        let cover: Vec<IndexSet> = (0..modulus)
            .map(|residue| IndexSet::ResidueClass { modulus, residue })
            .collect();
        prop_assert_eq!(liminf_min_of_cover(&seq, &cover).unwrap(), q(*period.iter().min().unwrap()));
    }
}

#[test]
fn necklace_identity() {
    for m in 1..=5u64 {
        for n in 1..=20u64 {
            let total: BigUint = divisors(n)
                .into_iter()
                .map(|d| witt_dim(m, d).unwrap() * d)
                .sum();
            assert_eq!(total, BigUint::from(m).pow(n as u32), "m={m} n={n}");
        }
    }
}

#[test]
fn lambda_n_is_a_subcomplex() {
    // homology_dims refuses to build a differential that leaves Λ(n)
    for n in 1..=4 {
        let table = homology_dims(n, 14, 6).unwrap();
        assert!(table.iter().all(|e| e.cycles >= e.boundaries));
    }
}

#[test]
fn basis_partitions_by_first_index() {
    for s in 1..=4usize {
        for t in 0..=14u32 {
            let all = basis(s, t).unwrap();
            let mut total = 0;
            for first in 0..=t {
                let below = lambda_n_basis(first + 1, s, t).unwrap().len();
                let lower = if first == 0 { 0 } else { lambda_n_basis(first, s, t).unwrap().len() };
                let exact = all.iter().filter(|m| m[0] == first).count();
                assert_eq!(below - lower, exact, "s={s} t={t} first={first}");
                total += exact;
            }
            assert_eq!(total, all.len());
        }
    }
}
