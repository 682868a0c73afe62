use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use principal_core::envelope::{pbw_generator, Envelope};
use principal_core::fermionic::{
    andrews_gordon_product, andrews_gordon_sum, char_pform, dynkin_flip_check, georgiev_char, verify_level1_sequence_dims,
    verify_recursion, Display, Enumeration,
};
use principal_core::lattice::principal_subspace_dims;
use principal_core::quasiparticle::{char_from_basis, AdmissibilityContext};
use principal_core::{DominantAffineWeight, PositiveRoot, TruncatedSeries};

#[derive(Parser)]
#[command(name = "principal", version, about = "Characters of principal subspaces of standard sl(n+1)-hat modules")]
struct Cli {
    /// Worker threads for sector evaluation (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a character.
    Char(CharArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Compare a character across methods.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Fermionic,
    Basis,
    Oracle,
    Pform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Recursion,
    Pform,
    Level1Seq,
    Appendix,
    Oracle,
    Ag,
    Dynkin,
}

#[derive(Args)]
struct CharArgs {
    #[arg(long)]
    n: usize,
    /// Level; inferred from the weights when omitted.
    #[arg(long)]
    k: Option<u32>,
    /// `k0,k1,...,kn` or a shorthand such as `1*L0+2*L3`.
    #[arg(long)]
    weights: String,
    #[arg(long)]
    cutoff: i64,
    #[arg(long, value_enum, default_value = "fermionic")]
    method: Method,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Rank; the suite's default grid when omitted.
    #[arg(long)]
    n: Option<usize>,
    /// Level; the suite's default grid when omitted.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    cutoff: Option<i64>,
    /// Window for the appendix suite; all of 0..=2 when omitted.
    #[arg(long)]
    window: Option<i64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    weights: String,
    #[arg(long)]
    cutoff: i64,
    /// Methods to compare pairwise.
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["fermionic", "basis"])]
    methods: Vec<Method>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure modes mapped to exit codes.
enum Failure {
    Usage(String),
    Verification(String),
}

impl From<principal_core::Error> for Failure {
    fn from(e: principal_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run<T> = Result<T, Failure>;

#[derive(Serialize)]
struct Check {
    suite: &'static str,
    params: String,
    order: i64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

fn parse_weights(n: usize, k: Option<u32>, text: &str) -> Run<DominantAffineWeight> {
    let mut coeffs = vec![0u32; n + 1];
    let bad = |why: &str| Failure::Usage(format!("weights {text:?}: {why}"));
    if text.contains('L') {
        for part in text.split('+') {
            let part = part.trim();
            let (c, l) = match part.split_once('*') {
                Some((c, l)) => (c.trim().parse::<u32>().map_err(|_| bad("bad coefficient"))?, l.trim()),
                None => (1, part),
            };
            let idx: usize = l.strip_prefix('L').and_then(|v| v.parse().ok()).ok_or_else(|| bad("expected terms like 2*L1"))?;
            if idx > n {
                return Err(bad(&format!("L{idx} outside L0..L{n}")));
            }
            coeffs[idx] += c;
        }
    } else {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != n + 1 {
            return Err(bad(&format!("expected {} comma-separated values", n + 1)));
        }
        for (slot, p) in coeffs.iter_mut().zip(parts) {
            *slot = p.parse().map_err(|_| bad("values must be nonnegative integers"))?;
        }
    }
    let weight = DominantAffineWeight::new(coeffs)?;
    if let Some(k) = k {
        if weight.level() != k {
            return Err(bad(&format!("level is {} but --k is {k}", weight.level())));
        }
    }
    if weight.level() == 0 {
        return Err(bad("level must be positive"));
    }
    Ok(weight)
}

/// `k_1Λ_1 + k_2Λ_2` (first display) or `k_{n−1}Λ_{n−1} + k_nΛ_n` (second display).
fn corner_family(w: &DominantAffineWeight) -> Option<(Display, usize)> {
    let c = w.coeffs();
    let n = c.len() - 1;
    if n < 2 || c[0] != 0 {
        return None;
    }
    let support = |a: usize, b: usize| c.iter().enumerate().all(|(i, &v)| v == 0 || i == a || i == b);
    if support(1, 2) && c[1] >= 1 {
        return Some((Display::First, c[1] as usize));
    }
    if support(n - 1, n) && c[n] >= 1 {
        return Some((Display::Second, c[n] as usize));
    }
    None
}

fn two_term(w: &DominantAffineWeight) -> Option<(usize, usize)> {
    w.as_two_term().map(|(k0, j)| (k0 as usize, j))
}

fn character(method: Method, w: &DominantAffineWeight, cutoff: i64) -> Run<TruncatedSeries> {
    let n = w.rank();
    let k = w.level() as usize;
    let unsupported = |what: &str| Failure::Usage(format!("weight {w} is outside the {what} family"));
    let series = match method {
        Method::Fermionic => match (two_term(w), corner_family(w)) {
            (Some((k0, j)), _) => georgiev_char(n, k, k0, j, cutoff)?,
            (None, Some((which, kk))) => Enumeration::default().gdim(which, n, k, kk, cutoff)?,
            _ => return Err(unsupported("k0*L0+kj*Lj or corner two-term")),
        },
        Method::Basis => {
            let (k0, j) = two_term(w).ok_or_else(|| unsupported("k0*L0+kj*Lj"))?;
            char_from_basis(&AdmissibilityContext::new(n, k, k0, j)?, cutoff)?
        }
        Method::Oracle => {
            if k != 1 {
                return Err(Failure::Usage("the lattice oracle needs level 1".into()));
            }
            let i = w.coeffs().iter().position(|&c| c == 1).expect("level one has one nonzero coefficient");
            principal_subspace_dims(n, i, cutoff)?
        }
        Method::Pform => {
            let (which, kk) = corner_family(w).ok_or_else(|| unsupported("k1*L1+k2*L2 or k(n-1)*L(n-1)+kn*Ln"))?;
            char_pform(which, n, k, kk, cutoff)?
        }
    };
    Ok(series.truncate(cutoff))
}

fn render_series(s: &TruncatedSeries, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", s.to_json()),
        Format::Csv => s.to_csv(),
        Format::Text => format!("{s}\n"),
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> Run<()> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn render_checks(checks: &[Check], format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(checks).expect("report serializes")),
        Format::Csv => {
            let mut s = String::from("suite,params,order,pass,witness\n");
            for c in checks {
                let _ = writeln!(s, "{},\"{}\",{},{},\"{}\"", c.suite, c.params, c.order, c.pass, c.witness.clone().unwrap_or_default());
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for c in checks {
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                let _ = write!(s, "{verdict} {} {} order={}", c.suite, c.params, c.order);
                if let Some(w) = &c.witness {
                    let _ = write!(s, " {w}");
                }
                s.push('\n');
            }
            s
        }
    }
}

fn grid<T: Copy>(given: Option<T>, default: &[T]) -> Vec<T> {
    given.map_or_else(|| default.to_vec(), |v| vec![v])
}

fn comparison_check(suite: &'static str, params: String, cmp: &principal_core::Comparison) -> Check {
    Check { suite, params, order: cmp.order, pass: cmp.equal, witness: cmp.witness.as_ref().map(|_| cmp.to_string()) }
}

fn verify(args: &VerifyArgs) -> Run<Vec<Check>> {
    let mut checks = Vec::new();
    let mut note = |c: Check| {
        eprintln!("{} {} {}", c.suite, c.params, if c.pass { "ok" } else { "FAILED" });
        checks.push(c);
    };
    match args.suite {
        Suite::Recursion | Suite::Pform => {
            let cutoff = args.cutoff.unwrap_or(10);
            for n in grid(args.n, &[2, 3, 4]) {
                for k in grid(args.k, &[1, 2, 3]) {
                    for kk in 1..=k {
                        for which in [Display::First, Display::Second] {
                            let params = format!("display={which:?} n={n} k={k} kk={kk}").to_lowercase();
                            if args.suite == Suite::Recursion {
                                let r = verify_recursion(which, n, k, kk, cutoff)?;
                                note(comparison_check("recursion", params, &r.comparison));
                            } else {
                                let a = Enumeration::default().gdim(which, n, k, kk, cutoff)?;
                                let b = char_pform(which, n, k, kk, cutoff)?;
                                let cmp = a.equal_upto(&b, cutoff)?;
                                let pass = cmp.equal && a.is_nonneg_integral() && b.is_nonneg_integral();
                                let mut c = comparison_check("pform", params, &cmp);
                                c.pass = pass;
                                note(c);
                            }
                        }
                    }
                }
            }
        }
        Suite::Level1Seq => {
            let cutoff = args.cutoff.unwrap_or(10);
            for n in grid(args.n, &[2, 3]) {
                for i in 1..=n {
                    let r = verify_level1_sequence_dims(n, i, cutoff)?;
                    note(comparison_check("level1-seq", format!("n={n} i={i}"), &r.comparison));
                }
            }
        }
        Suite::Oracle => {
            let cutoff = args.cutoff.unwrap_or(8);
            for n in grid(args.n, &[2, 3]) {
                for i in 0..=n {
                    let (k0, j) = if i == 0 { (1, 0) } else { (0, i) };
                    let ferm = georgiev_char(n, 1, k0, j, cutoff)?;
                    let basis = char_from_basis(&AdmissibilityContext::new(n, 1, k0, j)?, cutoff)?;
                    let lattice = principal_subspace_dims(n, i, cutoff)?;
                    note(comparison_check("oracle", format!("n={n} i={i} fermionic/basis"), &ferm.equal_upto(&basis, cutoff)?));
                    note(comparison_check("oracle", format!("n={n} i={i} fermionic/lattice"), &ferm.equal_upto(&lattice, cutoff)?));
                }
            }
        }
        Suite::Ag => {
            let cutoff = args.cutoff.unwrap_or(30);
            for k in grid(args.k, &[1, 2, 3]) {
                let cmp = andrews_gordon_sum(k, cutoff)?.equal_upto(&andrews_gordon_product(k, cutoff)?, cutoff)?;
                note(comparison_check("ag", format!("k={k}"), &cmp));
            }
        }
        Suite::Dynkin => {
            let cutoff = args.cutoff.unwrap_or(8);
            for n in grid(args.n, &[2, 3]) {
                for k in grid(args.k, &[1, 2]) {
                    for k0 in 0..k {
                        for j in 1..=n {
                            let cmp = dynkin_flip_check(n, k, k0, j, cutoff)?;
                            note(comparison_check("dynkin", format!("n={n} k={k} k0={k0} j={j}"), &cmp));
                        }
                    }
                }
            }
        }
        Suite::Appendix => {
            let windows = grid(args.window, &[0, 1, 2]);
            for n in grid(args.n, &[2, 3]) {
                let env = Envelope::new(n as i64)?;
                let alphas: Vec<PositiveRoot> = env.root_system().positive_roots().iter().copied().filter(|r| r.height() <= 2).collect();
                for k in grid(args.k, &[1, 2]) {
                    for i in 1..=n {
                        for t in k as i64 + 1..=k as i64 + 3 {
                            for &w in &windows {
                                let mut lemma_ok = true;
                                let mut corollary_ok = true;
                                let mut used = w;
                                for &alpha in &alphas {
                                    for m in 1..=3 {
                                        let l = env.lemma_commutator_check(i, t, alpha, m, w, k)?;
                                        lemma_ok &= l.holds;
                                        used = used.max(l.window_used);
                                        let a = pbw_generator(env.generator(alpha, -m)?);
                                        let c = env.corollary_ideal_check(i, t, &a, w, k)?;
                                        corollary_ok &= c.holds;
                                    }
                                }
                                let params = format!("n={n} k={k} i={i} t={t} window={w}");
                                note(Check { suite: "appendix-lemma", params: params.clone(), order: used, pass: lemma_ok, witness: None });
                                note(Check { suite: "appendix-corollary", params, order: used, pass: corollary_ok, witness: None });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(checks)
}

fn method_name(m: Method) -> String {
    m.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn compare(args: &CompareArgs) -> Run<Vec<Check>> {
    let w = parse_weights(args.n, args.k, &args.weights)?;
    let mut results = Vec::new();
    for &m in &args.methods {
        eprintln!("computing {}", method_name(m));
        results.push((m, character(m, &w, args.cutoff)?));
    }
    let mut checks = Vec::new();
    for a in 0..results.len() {
        for b in a + 1..results.len() {
            let cmp = results[a].1.equal_upto(&results[b].1, args.cutoff)?;
            let params = format!("weights={w} {}/{}", method_name(results[a].0), method_name(results[b].0));
            checks.push(comparison_check("compare", params, &cmp));
        }
    }
    Ok(checks)
}

fn run(cli: Cli) -> Run<()> {
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(Failure::Usage("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start worker pool: {e}")))?;
    }
    match cli.command {
        Command::Char(args) => {
            let w = parse_weights(args.n, args.k, &args.weights)?;
            if args.cutoff < 0 {
                return Err(Failure::Usage("--cutoff must be nonnegative".into()));
            }
            let s = character(args.method, &w, args.cutoff)?;
            emit(&args.out, &render_series(&s, args.format))
        }
        Command::Verify(args) => {
            let checks = verify(&args)?;
            emit(&args.out, &render_checks(&checks, args.format))?;
            let failed = checks.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                return Err(Failure::Verification(format!("{failed} of {} checks failed", checks.len())));
            }
            Ok(())
        }
        Command::Compare(args) => {
            if args.methods.len() < 2 {
                return Err(Failure::Usage("--methods needs at least two entries".into()));
            }
            let checks = compare(&args)?;
            emit(&args.out, &render_checks(&checks, args.format))?;
            if let Some(bad) = checks.iter().find(|c| !c.pass) {
                return Err(Failure::Verification(format!("{} {}", bad.params, bad.witness.clone().unwrap_or_default())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
