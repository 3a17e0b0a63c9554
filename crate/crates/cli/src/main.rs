mod report;

use std::io;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use report::{big, object, to_value, Format, Report};
use tgl_core::field::{is_direct_sum, is_prime, PrimeField};
use tgl_core::free_lie::{
    count_lyndon_words, lyndon_words, multidegree_count, restricted_witt_dim, witt_dim,
    word_to_string, LyndonWords, LYNDON_LIMIT,
};
use tgl_core::growth::{
    appendix_upper_bound, certify, certify_criterion, schedule_mod2_moore, schedule_odd_moore,
    GrowthError, GrowthSchedule, HyperbolicityParams, RateCertificate, Variant, Verdict,
};
use tgl_core::lambda::{
    self, degree, homology_dims, homology_dims_shuffled, is_admissible, lambda_n_basis,
    leibniz_then_straighten, render_monomial, straighten, tilde_dim_upto, LambdaElement,
};
use tgl_core::moore::{
    hilton_milnor_factors, mod2_embedding_trace, smash_power, MooreWedge,
};
use tgl_core::tensor::{
    dsw, image_families, insertion_relations, lie_idempotent, operator_matrix, GradedSpace,
    InsertionParity, Parity, SignMode,
};
use tgl_core::logbounds::rational_string;
use tgl_core::verify::{positive_admissible_upto, run_all, run_check, CHECK_COUNT};

#[derive(Parser)]
#[command(name = "tgl", version, about = "Exact algebra and growth certificates for torsion in homotopy groups")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized checks (basis shuffles).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension of the weight-n part of the free Lie algebra on m generators.
    Witt(WittArgs),
    /// Lyndon words of length n over m letters.
    Lyndon(LyndonArgs),
    /// Two-letter multidegree counts summing to the Witt dimension.
    HiltonMilnor(HmCountArgs),
    /// Dynkin-Specht-Wever element on tensor powers.
    Dsw {
        #[command(subcommand)]
        command: DswCommand,
    },
    /// Relations among symmetrized tensors with one letter inserted.
    #[command(name = "lemma51")]
    Insertion(InsertionArgs),
    /// The mod 2 lambda algebra.
    Lambda {
        #[command(subcommand)]
        command: LambdaCommand,
    },
    /// Wedges and smash products of Moore spaces.
    Moore {
        #[command(subcommand)]
        command: MooreCommand,
    },
    /// Certified growth-rate lower bounds.
    Certify {
        #[command(subcommand)]
        command: CertifyCommand,
    },
    /// Upper bounds on counts.
    Bound {
        #[command(subcommand)]
        command: BoundCommand,
    },
    /// Run the full acceptance suite.
    VerifyAll(VerifyArgs),
}

#[derive(Args)]
struct WittArgs {
    #[arg(long)]
    m: u64,
    #[arg(long)]
    n: u64,
    /// Also report the free restricted Lie algebra count at this prime.
    #[arg(long)]
    restricted: Option<u64>,
}

#[derive(Args)]
struct LyndonArgs {
    #[arg(long)]
    m: u64,
    #[arg(long)]
    n: u64,
    /// Maximum number of words to list.
    #[arg(long, default_value_t = 1000)]
    limit: usize,
}

#[derive(Args)]
struct HmCountArgs {
    #[arg(long)]
    weight: u64,
    /// Recount by enumerating Lyndon words.
    #[arg(long)]
    oracle: bool,
}

#[derive(Subcommand)]
enum DswCommand {
    /// Check β_k∘β_k = kβ_k and idempotency of β_k/k as operator matrices.
    Verify(DswArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Unsigned,
    Koszul,
}

#[derive(Args)]
struct DswArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    k: usize,
    /// Generator degrees, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,2")]
    degrees: Vec<u32>,
    #[arg(long, value_enum, default_value_t = ModeArg::Unsigned)]
    mode: ModeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

#[derive(Args)]
struct InsertionArgs {
    #[arg(long)]
    l: usize,
    #[arg(long)]
    p: u32,
    #[arg(long, value_enum, default_value_t = ParityArg::Even)]
    parity: ParityArg,
    /// Leave out the family with the letter inserted last.
    #[arg(long)]
    drop_last: bool,
    /// Also check that the first l families span a direct sum.
    #[arg(long)]
    oracle: bool,
}

#[derive(Subcommand)]
enum LambdaCommand {
    /// Admissible monomials of length s and degree t.
    Basis(BasisArgs),
    /// Rewrite a monomial into admissible form.
    Straighten(WordArgs),
    /// Differential of a monomial.
    Diff(WordArgs),
    /// Homology dimensions of Λ(n).
    Homology(HomologyArgs),
    /// Count of positive-index admissible monomials up to a degree.
    Count(CountArgs),
}

#[derive(Args)]
struct BasisArgs {
    #[arg(long)]
    s: usize,
    #[arg(long)]
    t: u32,
    /// Restrict to Λ(n): first index below n.
    #[arg(long)]
    n: Option<u32>,
    /// Recount by brute-force enumeration of all words.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct WordArgs {
    /// Indices, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    indices: Vec<u32>,
    /// Recompute with an independent engine.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct HomologyArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    max_degree: u32,
    #[arg(long, default_value_t = 4)]
    max_length: usize,
    /// Shuffle the bases with the global seed.
    #[arg(long)]
    shuffle: bool,
    /// Recompute with shuffled bases and compare.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    q: u32,
    #[arg(long)]
    oracle: bool,
}

#[derive(Subcommand)]
enum MooreCommand {
    /// Smash two wedges of Moore spaces.
    Smash(SmashArgs),
    /// k-fold smash power of one Moore space.
    Power(PowerArgs),
    /// Hilton-Milnor factors of a two-fold wedge.
    HiltonMilnor(MooreHmArgs),
    /// Moore summands inside odd smash powers of RP^2.
    Cube(CubeArgs),
}

#[derive(Args)]
struct SmashArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    r: u32,
    /// Summands as dim[:multiplicity], comma separated.
    #[arg(long, value_delimiter = ',')]
    left: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    right: Vec<String>,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    r: u32,
}

#[derive(Args)]
struct MooreHmArgs {
    #[arg(long)]
    dim1: u32,
    #[arg(long)]
    dim2: u32,
    #[arg(long)]
    weight: u32,
}

#[derive(Args)]
struct CubeArgs {
    #[arg(long)]
    s: u32,
}

#[derive(Subcommand)]
enum CertifyCommand {
    /// The general criterion from retract, multiplicity and torsion data.
    #[command(name = "thm22")]
    General(CriterionArgs),
    /// Moore summands in the loop space of a mod 2 Moore space.
    Mod2Moore(Mod2Args),
    /// Higher torsion in Moore spaces through Hilton-Milnor factors.
    OddMoore(OddArgs),
}

#[derive(Args)]
struct CriterionArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Suspension slope of the retract.
    #[arg(long)]
    m: u64,
    /// Smash slope of the retract.
    #[arg(long)]
    l: u64,
    /// Suspension slope A of the torsion hypothesis.
    #[arg(long)]
    modulus: u64,
    /// Suspension offset a of the torsion hypothesis.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    a: i64,
    /// Degree slope K of the torsion hypothesis.
    #[arg(long)]
    k: u64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    k_offset: i64,
    #[arg(long, default_value_t = 1)]
    n0: u64,
    #[arg(long, default_value_t = 1)]
    n_min: u64,
    #[arg(long, default_value_t = 100)]
    s_max: u64,
    /// Include the schedule entries.
    #[arg(long)]
    entries: bool,
}

#[derive(Args)]
struct Mod2Args {
    #[arg(long, default_value_t = 3)]
    p_aux: u64,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 100)]
    s_max: u64,
    #[arg(long)]
    entries: bool,
}

#[derive(Args)]
struct OddArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long)]
    n_alpha: u64,
    #[arg(long)]
    n_beta: u64,
    #[arg(long, default_value_t = 100)]
    s_max: u64,
    #[arg(long)]
    entries: bool,
}

#[derive(Subcommand)]
enum BoundCommand {
    /// Exact counts against the binomial and geometric bounds.
    Appendix(AppendixArgs),
}

#[derive(Args)]
struct AppendixArgs {
    #[arg(long)]
    a: u64,
    #[arg(long)]
    q: u32,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only these checks.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u32>,
    /// Include wall-clock timings (makes output nondeterministic).
    #[arg(long)]
    timings: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult = Result<Report, CliError>;

fn usage(flag: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid value for {flag}: {msg}"))
}

fn need(cond: bool, flag: &str, msg: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(usage(flag, msg))
    }
}

fn fail(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(report) => {
            let mut out = io::stdout().lock();
            if let Err(e) = report.write(cli.format, &mut out) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if report.pass == Some(false) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Witt(a) => witt(a),
        Command::Lyndon(a) => lyndon(a),
        Command::HiltonMilnor(a) => hm_counts(a),
        Command::Dsw {
            command: DswCommand::Verify(a),
        } => dsw_verify(a),
        Command::Insertion(a) => insertion(a),
        Command::Lambda { command } => match command {
            LambdaCommand::Basis(a) => lambda_basis(a),
            LambdaCommand::Straighten(a) => lambda_straighten(a),
            LambdaCommand::Diff(a) => lambda_diff(a),
            LambdaCommand::Homology(a) => lambda_homology(a, cli.seed),
            LambdaCommand::Count(a) => lambda_count(a),
        },
        Command::Moore { command } => match command {
            MooreCommand::Smash(a) => moore_smash(a),
            MooreCommand::Power(a) => moore_power(a),
            MooreCommand::HiltonMilnor(a) => moore_hm(a),
            MooreCommand::Cube(a) => moore_cube(a),
        },
        Command::Certify { command } => match command {
            CertifyCommand::General(a) => certify_general(a),
            CertifyCommand::Mod2Moore(a) => certify_mod2(a),
            CertifyCommand::OddMoore(a) => certify_odd(a),
        },
        Command::Bound {
            command: BoundCommand::Appendix(a),
        } => bound_appendix(a),
        Command::VerifyAll(a) => verify_all(a),
    }
}

fn row(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Lyndon enumeration is used as an oracle only when it stays small.
fn lyndon_feasible(m: u64, n: u64) -> bool {
    m <= u8::MAX as u64
        && witt_dim(m, n).is_ok_and(|w| w <= BigUint::from(LYNDON_LIMIT))
        && (n as f64) * (m as f64).log2() <= 26.0
}

fn witt(a: &WittArgs) -> CliResult {
    need(a.m >= 1, "--m", "must be at least 1")?;
    need(a.n >= 1, "--n", "must be at least 1")?;
    let value = witt_dim(a.m, a.n).map_err(fail)?;
    let mut r = Report::new("witt", "necklace formula (1/n)Σ μ(d) m^(n/d); oracle: Lyndon words")
        .field("m", a.m)
        .field("n", a.n)
        .field("value", big(&value));
    if let Some(p) = a.restricted {
        need(is_prime(p), "--restricted", "must be prime")?;
        r = r.field("restricted", big(&restricted_witt_dim(a.m, a.n, p).map_err(fail)?));
    }
    if lyndon_feasible(a.m, a.n) {
        let oracle = BigUint::from(count_lyndon_words(a.m as u8, a.n as usize));
        let ok = oracle == value;
        Ok(r.field("oracle", big(&oracle)).pass(ok))
    } else {
        Ok(r.field("oracle", Value::Null))
    }
}

fn lyndon(a: &LyndonArgs) -> CliResult {
    need(a.m >= 1, "--m", "must be at least 1")?;
    need(a.n >= 1, "--n", "must be at least 1")?;
    let words = lyndon_words(a.m, a.n).map_err(|e| usage("--n", e))?;
    let w = witt_dim(a.m, a.n).map_err(fail)?;
    let ok = BigUint::from(words.len()) == w;
    let rows = words
        .iter()
        .take(a.limit)
        .map(|x| row(vec![("word", word_to_string(x).into())]))
        .collect();
    Ok(Report::new("lyndon", "Duval's algorithm; oracle: necklace formula")
        .field("count", words.len())
        .field("oracle", big(&w))
        .table("words", rows)
        .pass(ok))
}

fn hm_counts(a: &HmCountArgs) -> CliResult {
    need(a.weight >= 1, "--weight", "must be at least 1")?;
    let mut total = BigUint::from(0u32);
    let mut rows = Vec::new();
    let mut by_enumeration: Option<Vec<u64>> = None;
    if a.oracle {
        need(lyndon_feasible(2, a.weight), "--weight", "too large for enumeration")?;
        let mut counts = vec![0u64; a.weight as usize + 1];
        for w in LyndonWords::new(2, a.weight as usize).filter(|w| w.len() == a.weight as usize) {
            counts[w.iter().filter(|&&c| c == 1).count()] += 1;
        }
        by_enumeration = Some(counts);
    }
    let mut ok = true;
    for a2 in 0..=a.weight {
        let a1 = a.weight - a2;
        let c = multidegree_count(a1, a2).map_err(fail)?;
        let mut fields = vec![("a1", a1.into()), ("a2", a2.into()), ("count", big(&c))];
        if let Some(counts) = &by_enumeration {
            let e = counts[a2 as usize];
            ok &= BigUint::from(e) == c;
            fields.push(("oracle", e.into()));
        }
        total += c;
        rows.push(row(fields));
    }
    let w = witt_dim(2, a.weight).map_err(fail)?;
    ok &= total == w;
    Ok(Report::new("hilton-milnor", "Möbius inversion over gcd(a1,a2); Σ over multidegrees = W(2,w)")
        .field("weight", a.weight)
        .field("total", big(&total))
        .field("witt", big(&w))
        .table("multidegrees", rows)
        .pass(ok))
}

fn sign_mode(m: ModeArg) -> SignMode {
    match m {
        ModeArg::Unsigned => SignMode::Unsigned,
        ModeArg::Koszul => SignMode::Koszul,
    }
}

fn dsw_verify(a: &DswArgs) -> CliResult {
    need(is_prime(a.p as u64), "--p", "must be prime")?;
    need((2..=8).contains(&a.k), "--k", "must lie in 2..=8")?;
    need(!a.degrees.is_empty(), "--degrees", "needs at least one generator")?;
    need(a.degrees.iter().all(|&d| d > 0), "--degrees", "degrees must be positive")?;
    let field = PrimeField::new(a.p).map_err(fail)?;
    let gens = a.degrees.iter().enumerate().map(|(i, &d)| (format!("x{}", i + 1), d)).collect();
    let space = GradedSpace::new(field, gens).map_err(|e| usage("--degrees", e))?;
    let mode = sign_mode(a.mode);
    let beta = dsw(field, a.k).map_err(fail)?;
    let b = operator_matrix(&beta, &space, mode).map_err(|e| usage("--degrees", e))?;
    let k_mod = (a.k % a.p as usize) as u32;
    let square = b.mul(&b).map_err(fail)? == b.scale(k_mod);
    let idempotent = match lie_idempotent(field, a.k) {
        Ok(e) => {
            let m = operator_matrix(&e, &space, mode).map_err(fail)?;
            Some(m.mul(&m).map_err(fail)? == m)
        }
        Err(_) => None,
    };
    let rank = b.rank();
    let mut r = Report::new("dsw verify", "β_2 = 1-(1 2), β_k = (1⊗β_(k-1))(1-(1 2 .. k)) acting on the right")
        .field("p", a.p)
        .field("k", a.k)
        .field("dim", space.dim())
        .field("tensor_dim", b.rows())
        .field("square_identity", square)
        .field("idempotent", idempotent.map_or(Value::Null, Value::from))
        .field("rank", rank);
    let mut ok = square && idempotent.unwrap_or(true);
    let ungraded = space.parity() == Parity::AllEven || mode == SignMode::Unsigned;
    if ungraded && !(a.k as u32).is_multiple_of(a.p) {
        let w = witt_dim(space.dim() as u64, a.k as u64).map_err(fail)?;
        ok &= BigUint::from(rank) == w;
        r = r.field("witt", big(&w));
    }
    Ok(r.pass(ok))
}

fn insertion(a: &InsertionArgs) -> CliResult {
    need(a.l >= 2, "--l", "must be at least 2")?;
    need(is_prime(a.p as u64) && a.p as usize > a.l + 1, "--p", "must be a prime above l+1")?;
    need(a.l <= 5, "--l", "must be at most 5")?;
    let parity = match a.parity {
        ParityArg::Even => InsertionParity::Even,
        ParityArg::Odd => InsertionParity::Odd,
    };
    let rep = insertion_relations(a.l, a.p, parity, a.drop_last).map_err(fail)?;
    let expected = if a.drop_last { 0 } else { a.l };
    let census_ok = rep.census.distinct == rep.census.expected_distinct && rep.census.each_exactly_twice;
    let mut ok = rep.kernel_dimension == expected && rep.sign_pattern && census_ok;
    let mut r = Report::new(
        "lemma51",
        "kernel of (c_ij) ↦ Σ c_ij (s_l(x_1..x_l)⊗x_i)σ_j on V^⊗(l+1), dim V = l",
    )
    .field("l", a.l)
    .field("p", a.p)
    .field("parity", to_value(&rep.parity))
    .field("families", to_value(&rep.families))
    .field("kernel_dimension", rep.kernel_dimension)
    .field("expected_dimension", expected)
    .field("sign_pattern", rep.sign_pattern)
    .field("family_ranks", to_value(&rep.family_ranks))
    .field("census", to_value(&rep.census));
    if a.oracle {
        let js: Vec<usize> = (1..=a.l).collect();
        let fams = image_families(a.l, a.p, parity, &js).map_err(fail)?;
        let field = PrimeField::new(a.p).map_err(fail)?;
        let direct = is_direct_sum(field, &fams, rep.ambient_dim).map_err(fail)?;
        ok &= direct;
        r = r.field("direct_sum", direct);
    }
    let rows = rep
        .relation_basis
        .iter()
        .map(|v| row(vec![("coefficients", to_value(v))]))
        .collect();
    Ok(r.table("relations", rows).pass(ok))
}

fn monomial_values(e: &LambdaElement) -> Value {
    to_value(e.terms())
}

fn guard_degree(flag: &str, t: u32) -> Result<(), CliError> {
    let guard = lambda::max_degree_guard();
    need(t <= guard, flag, &format!("exceeds the degree guard {guard} (TGL_MAX_DEGREE)"))
}

fn lambda_basis(a: &BasisArgs) -> CliResult {
    guard_degree("--t", a.t)?;
    let n = a.n.unwrap_or(u32::MAX);
    need(n >= 1, "--n", "must be at least 1")?;
    let b = lambda_n_basis(n, a.s, a.t).map_err(fail)?;
    let mut r = Report::new("lambda basis", "admissible monomials: 2·i_j ≥ i_(j+1)")
        .field("s", a.s)
        .field("t", a.t)
        .field("count", b.len());
    if let Some(n) = a.n {
        r = r.field("n", n);
    }
    if a.oracle {
        need(a.s <= 8 && a.t <= 24, "--t", "too large for brute force (s ≤ 8, t ≤ 24)")?;
        let brute = words_of_degree(a.s, a.t)
            .into_iter()
            .filter(|w| is_admissible(w) && w.first().is_none_or(|&i| i < n))
            .count();
        r = r.field("oracle", brute).pass(brute == b.len());
    }
    let rows = b
        .iter()
        .map(|m| row(vec![("monomial", to_value(m)), ("rendered", render_monomial(m).into())]))
        .collect();
    Ok(r.table("basis", rows))
}

fn words_of_degree(s: usize, t: u32) -> Vec<Vec<u32>> {
    if s == 0 {
        return if t == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=t {
        for mut rest in words_of_degree(s - 1, t - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn check_word(w: &[u32]) -> Result<(), CliError> {
    guard_degree("--indices", degree(w))?;
    need(w.len() <= 16, "--indices", "at most 16 indices")
}

fn lambda_straighten(a: &WordArgs) -> CliResult {
    check_word(&a.indices)?;
    let s = straighten(&a.indices).map_err(fail)?;
    let mut r = Report::new("lambda straighten", "leftmost-pair rewriting with the mod 2 relations")
        .field("terms", monomial_values(&s))
        .field("rendered", s.to_string());
    if a.oracle {
        let other = LambdaElement::monomial(&a.indices);
        r = r.field("oracle", monomial_values(&other)).pass(other == s);
    }
    Ok(r)
}

fn lambda_diff(a: &WordArgs) -> CliResult {
    check_word(&a.indices)?;
    let d = LambdaElement::monomial(&a.indices).differential();
    let mut r = Report::new(
        "lambda diff",
        "∂λ_i = Σ C(i-j,j) λ_(i-j)λ_(j-1), Leibniz rule, result straightened",
    )
    .field("terms", monomial_values(&d))
    .field("rendered", d.to_string());
    if a.oracle {
        let other = leibniz_then_straighten(&a.indices).map_err(fail)?;
        r = r.field("oracle", monomial_values(&other)).pass(other == d);
    }
    Ok(r)
}

fn lambda_homology(a: &HomologyArgs, seed: u64) -> CliResult {
    need(a.n >= 1, "--n", "must be at least 1")?;
    guard_degree("--max-degree", a.max_degree + 1)?;
    need(a.max_length <= 12, "--max-length", "must be at most 12")?;
    let table = if a.shuffle {
        homology_dims_shuffled(a.n, a.max_degree, a.max_length, seed)
    } else {
        homology_dims(a.n, a.max_degree, a.max_length)
    }
    .map_err(fail)?;
    let mut r = Report::new("lambda homology", "ranks of ∂ on the admissible basis of Λ(n) over F_2")
        .field("n", a.n)
        .field("max_degree", a.max_degree)
        .field("max_length", a.max_length);
    if a.oracle {
        let other = homology_dims_shuffled(a.n, a.max_degree, a.max_length, seed ^ 0x5eed)
            .map_err(fail)?;
        r = r.pass(other == table);
    }
    Ok(r.table("entries", table.iter().map(object).collect()))
}

fn lambda_count(a: &CountArgs) -> CliResult {
    need((1..=60).contains(&a.q), "--q", "must lie in 1..=60")?;
    let c = tilde_dim_upto(a.q);
    let mut ok = c.count <= c.bound;
    let mut r = Report::new("lambda count", "positive-index admissible monomials of degree ≤ q against C(2q, q-1)")
        .field("q", a.q)
        .field("count", c.count.to_string())
        .field("bound", c.bound.to_string());
    if a.oracle {
        guard_degree("--q", a.q)?;
        need(a.q <= 22, "--q", "at most 22 with --oracle")?;
        let direct = positive_admissible_upto(a.q).map_err(CliError::Usage)?.len() as u128;
        ok &= direct == c.count;
        r = r.field("oracle", direct.to_string());
    }
    Ok(r.pass(ok))
}

fn parse_summands(flag: &str, items: &[String]) -> Result<Vec<(u32, u64)>, CliError> {
    items
        .iter()
        .map(|s| {
            let (d, m) = s.split_once(':').unwrap_or((s.as_str(), "1"));
            let d = d.trim().parse::<u32>().map_err(|e| usage(flag, format!("{s}: {e}")))?;
            let m = m.trim().parse::<u64>().map_err(|e| usage(flag, format!("{s}: {e}")))?;
            Ok((d, m))
        })
        .collect()
}

fn wedge_report(command: &str, provenance: &str, w: &MooreWedge) -> Report {
    let rows = w
        .coefficients()
        .iter()
        .rev()
        .map(|(d, c)| row(vec![("dim", (*d).into()), ("multiplicity", big(c))]))
        .collect();
    Report::new(command, provenance)
        .field("result", w.to_string())
        .field("moore_count", big(&w.moore_count()))
        .field("homology_dim", big(&w.homology_dim()))
        .table("summands", rows)
}

fn moore_smash(a: &SmashArgs) -> CliResult {
    let left = parse_summands("--left", &a.left)?;
    let right = parse_summands("--right", &a.right)?;
    let l = MooreWedge::from_multiplicities(a.p, a.r, &left).map_err(|e| usage("--p", e))?;
    let rt = MooreWedge::from_multiplicities(a.p, a.r, &right).map_err(|e| usage("--p", e))?;
    let s = l.smash(&rt).map_err(fail)?;
    let ok = s.homology_dim() == l.homology_dim() * rt.homology_dim();
    Ok(wedge_report("moore smash", "P^n ∧ P^m ≃ P^(n+m) ∨ P^(n+m-1), extended bilinearly", &s).pass(ok))
}

fn moore_power(a: &PowerArgs) -> CliResult {
    need(a.k >= 1 && a.k <= 64, "--k", "must lie in 1..=64")?;
    need(a.n >= 2, "--n", "must be at least 2")?;
    let w = smash_power(a.n, a.k, a.p, a.r).map_err(|e| usage("--p", e))?;
    Ok(wedge_report(
        "moore power",
        "iterated pairwise smash, checked against C(k-1, j) copies of P^(kn-j)",
        &w,
    )
    .pass(true))
}

fn moore_hm(a: &MooreHmArgs) -> CliResult {
    need(a.dim1 <= a.dim2, "--dim1", "must not exceed --dim2")?;
    need((1..=64).contains(&a.weight), "--weight", "must lie in 1..=64")?;
    let factors = hilton_milnor_factors(a.dim1, a.dim2, a.weight).map_err(fail)?;
    let total: BigUint = factors.iter().map(|f| f.multiplicity.clone()).sum();
    let w = witt_dim(2, a.weight as u64).map_err(fail)?;
    Ok(Report::new("moore hilton-milnor", "basic products of multidegree (a1, a2) in the free Lie algebra on two letters")
        .field("dim1", a.dim1)
        .field("dim2", a.dim2)
        .field("weight", a.weight)
        .field("total", big(&total))
        .field("witt", big(&w))
        .table("factors", factors.iter().map(object).collect())
        .pass(total == w))
}

fn moore_cube(a: &CubeArgs) -> CliResult {
    need(a.s <= 1000, "--s", "must be at most 1000")?;
    let trace = mod2_embedding_trace(a.s);
    let last = trace.last().expect("nonempty");
    let ok = last.dimension == 3 * a.s + 2 && last.count == BigUint::from(1u32) << a.s;
    Ok(Report::new(
        "moore cube",
        "(RP^2)^∧3 ≃ RP^2∧CP^2 ∨ 2·P^5(2) iterated; closed form (3s+2, 2^s)",
    )
    .field("s", a.s)
    .field("dimension", last.dimension)
    .field("count", big(&last.count))
    .table("trace", trace.iter().map(object).collect())
    .pass(ok))
}

fn certificate_report(command: &str, cert: &RateCertificate, schedule: &GrowthSchedule, entries: bool) -> Report {
    let mut r = Report::new(command, cert.provenance.clone())
        .field("certificate", to_value(cert))
        .field("degree_slope", rational_string(&schedule.degree_slope));
    if entries {
        r = r.table("entries", schedule.entries.iter().map(object).collect());
    }
    r.pass(cert.verdict == Verdict::Positive)
}

fn growth_error(e: GrowthError) -> CliError {
    match e {
        GrowthError::Range(msg) => CliError::Usage(format!("invalid parameters: {msg}")),
        other => fail(other),
    }
}

fn certify_general(a: &CriterionArgs) -> CliResult {
    need(a.s_max >= 1 && a.s_max <= 2000, "--s-max", "must lie in 1..=2000")?;
    need(a.modulus <= 10_000, "--modulus", "must be at most 10000")?;
    let params = HyperbolicityParams {
        p: a.p,
        r: a.r,
        m: a.m,
        l: a.l,
        modulus: a.modulus,
        a: a.a,
        k_slope: a.k,
        k_offset: a.k_offset,
        n0: a.n0,
        n_min: a.n_min,
        variant: if a.p == 2 { Variant::Mod2 } else { Variant::OddPrime },
    };
    match certify_criterion(&params, a.s_max) {
        Ok(rep) => {
            let ok = rep.cover_checked && rep.certificate.verdict == Verdict::Positive;
            let mut r = Report::new("certify thm22", rep.schedule.provenance.clone())
                .field("params", to_value(&rep.params))
                .field("d", to_value(&rep.d))
                .field("slope", to_value(&rep.slope))
                .field("gap_bound", to_value(&rep.gap_bound))
                .field("k_tilde", rep.k_tilde)
                .field("cover_parts", rep.cover_parts)
                .field("cover_checked", rep.cover_checked)
                .field("certificate", to_value(&rep.certificate));
            r = if a.entries {
                r.table("entries", rep.schedule.entries.iter().map(object).collect())
            } else {
                r.table("residues", rep.residues.iter().map(object).collect())
            };
            Ok(r.pass(ok))
        }
        Err(GrowthError::GcdCondition { i, gcd }) => Ok(Report::new(
            "certify thm22",
            "refused: gcd(M + l·i, A) = 1 fails",
        )
        .field("params", to_value(&params))
        .field("refused", true)
        .field("failing_i", i)
        .field("gcd", gcd)
        .pass(false)),
        Err(e) => Err(growth_error(e)),
    }
}

fn certify_mod2(a: &Mod2Args) -> CliResult {
    need(a.s_max <= 5000, "--s-max", "must be at most 5000")?;
    let schedule = schedule_mod2_moore(a.p_aux, a.n, a.s_max).map_err(growth_error)?;
    let cert = certify(&schedule, &[]).map_err(growth_error)?;
    Ok(certificate_report("certify mod2-moore", &cert, &schedule, a.entries))
}

fn certify_odd(a: &OddArgs) -> CliResult {
    need(a.s_max >= 1 && a.s_max <= 5000, "--s-max", "must lie in 1..=5000")?;
    let odd = schedule_odd_moore(a.p, a.r, a.n_alpha, a.n_beta, a.s_max).map_err(growth_error)?;
    let cert = certify(&odd.schedule, &[]).map_err(growth_error)?;
    Ok(certificate_report("certify odd-moore", &cert, &odd.schedule, a.entries)
        .field("regime", to_value(&odd.regime))
        .field("threshold", odd.threshold)
        .field("cover_parts", odd.cover_parts))
}

fn bound_appendix(a: &AppendixArgs) -> CliResult {
    need(a.a >= 1, "--a", "must be at least 1")?;
    need((1..=40).contains(&a.q), "--q", "must lie in 1..=40")?;
    let rep = appendix_upper_bound(a.a, a.q).map_err(growth_error)?;
    let ok = rep.binomial_holds && rep.tensor_holds && rep.product_holds;
    let mut r = Report::new(
        "bound appendix",
        "dim Λ̃_≤q ≤ C(2q,q-1) ≤ 4^q and dim T_≤q ≤ a/(a-1)·a^q",
    );
    for (k, v) in object(&rep) {
        r = r.field(&k, v);
    }
    Ok(r.pass(ok))
}

fn verify_all(a: &VerifyArgs) -> CliResult {
    for &id in &a.only {
        need((1..=CHECK_COUNT).contains(&id), "--only", &format!("checks are numbered 1..={CHECK_COUNT}"))?;
    }
    let reports = if a.only.is_empty() {
        run_all()
    } else {
        a.only.iter().filter_map(|&id| run_check(id)).collect()
    };
    let ok = reports.iter().all(|r| r.passed && r.within_time());
    let rows = reports
        .iter()
        .map(|r| {
            let mut fields = vec![
                ("id", r.id.into()),
                ("name", r.name.into()),
                ("passed", r.passed.into()),
                ("detail", r.detail.clone().into()),
                ("time_limit_ms", json!(r.time_limit_ms as u64)),
            ];
            if a.timings {
                fields.push(("elapsed_ms", json!(r.elapsed_ms as u64)));
            }
            row(fields)
        })
        .collect();
    Ok(Report::new("verify-all", "acceptance suite")
        .field("checks", reports.len())
        .field("passed", reports.iter().filter(|r| r.passed).count())
        .table("results", rows)
        .pass(ok))
}
