//! Batch front end: builds complexes, computes homology and amplitudes, and
//! writes line-keyed text artifacts.
//!
//! Every command computes its artifacts in memory first; files are written
//! to temporaries and renamed into the output directory only after all of
//! them were produced. Rank computations are cached per complex in the
//! directory named by `MODGRAPH_CACHE` unless `--no-cache` is given.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::Signed;

use crate::amplitude;
use crate::complexes::{self, ComplexSpec, Family, GradedComplex, Params};
use crate::error::{Error, Result};
use crate::frobenius::{self, FrobeniusData};
use crate::linalg::{self, SparseIntMatrix};
use crate::pool;
use crate::ribbon::AssFamily;

pub const CACHE_ENV: &str = "MODGRAPH_CACHE";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

/// Subcommand names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Enumerate,
    Complex,
    Homology,
    Amplitude,
    ValidateAlgebra,
    BvCheck,
    Selftest,
}

#[derive(Args, Debug, Clone, Default)]
struct Flags {
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 0)]
    twist: u8,
    #[arg(long)]
    genus: Option<u32>,
    #[arg(long)]
    gamma: Option<u32>,
    #[arg(long)]
    nu: Option<u32>,
    #[arg(long)]
    legs: Option<usize>,
    /// Highest edge count built; defaults to the full complex
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    algebra: Option<PathBuf>,
    #[arg(long, default_value = "modgraph-out")]
    out: PathBuf,
    #[arg(long)]
    no_cache: bool,
    /// Comma-separated primes for the modular rank path
    #[arg(long)]
    primes: Option<String>,
    /// Worker threads; defaults to the available parallelism
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Parser, Debug)]
#[command(name = "modgraph", version, about = "Graph complexes, exact homology and Frobenius amplitudes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the basis graphs of a complex
    Enumerate(Flags),
    /// Write bases and differential matrices
    Complex(Flags),
    /// Betti numbers, Euler characteristic and the hat regrading
    Homology(Flags),
    /// Amplitude cochain of an algebra and its cocycle verdict
    Amplitude(Flags),
    /// Check the axioms and relations of an algebra file
    ValidateAlgebra(Flags),
    /// Homology of the BV and legged commutative complexes
    BvCheck(Flags),
    /// d^2 = 0 on every family plus the rank oracle matrix
    Selftest(Flags),
}

/// Validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    pub spec: Option<ComplexSpec>,
    pub algebra: Option<PathBuf>,
    pub out: PathBuf,
    pub use_cache: bool,
    pub primes: Vec<u64>,
    pub threads: usize,
}

/// Result of a run before anything touches the disk.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    /// `(file name, contents)` in write order
    pub artifacts: Vec<(String, String)>,
    pub summary: String,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

impl RunConfig {
    /// Parses and validates command-line arguments (including the program
    /// name). Help and version requests come back as `Ok(Err(text))`.
    pub fn from_args<I, T>(args: I) -> Result<std::result::Result<Self, String>>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = match Cli::try_parse_from(args) {
            Ok(c) => c,
            Err(e) => {
                use clap::error::ErrorKind;
                return match e.kind() {
                    ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                        Ok(Err(e.to_string()))
                    }
                    _ => Err(invalid(first_line(&e.to_string()).trim_start_matches("error: ").to_string())),
                };
            }
        };
        let (command, f) = match cli.command {
            Command::Enumerate(f) => (CommandKind::Enumerate, f),
            Command::Complex(f) => (CommandKind::Complex, f),
            Command::Homology(f) => (CommandKind::Homology, f),
            Command::Amplitude(f) => (CommandKind::Amplitude, f),
            Command::ValidateAlgebra(f) => (CommandKind::ValidateAlgebra, f),
            Command::BvCheck(f) => (CommandKind::BvCheck, f),
            Command::Selftest(f) => (CommandKind::Selftest, f),
        };
        Self::from_flags(command, f).map(Ok)
    }

    fn from_flags(command: CommandKind, f: Flags) -> Result<Self> {
        let needs_spec = matches!(command, CommandKind::Enumerate | CommandKind::Complex | CommandKind::Homology | CommandKind::Amplitude);
        let spec = if needs_spec {
            let name = f.family.as_deref().ok_or_else(|| invalid("--family is required"))?;
            Some(spec_from_flags(Family::parse(name)?, f.twist, f.genus, f.gamma, f.nu, f.legs, f.cutoff)?)
        } else {
            None
        };
        if matches!(command, CommandKind::Amplitude | CommandKind::ValidateAlgebra) && f.algebra.is_none() {
            return Err(invalid("--algebra is required"));
        }
        if command == CommandKind::Amplitude && !matches!(spec.map(|s| s.family), Some(Family::Ass(_))) {
            return Err(invalid("amplitudes need a ribbon family"));
        }
        let primes = match &f.primes {
            None => linalg::DEFAULT_PRIMES.to_vec(),
            Some(s) => parse_primes(s)?,
        };
        let threads = match f.threads {
            Some(0) => return Err(invalid("--threads must be positive")),
            Some(n) => n,
            None => pool::default_width(),
        };
        Ok(RunConfig { command, spec, algebra: f.algebra, out: f.out, use_cache: !f.no_cache, primes, threads })
    }
}

fn first_line(s: &str) -> &str {
    s.lines().find(|l| !l.trim().is_empty()).unwrap_or("")
}

/// Builds a spec from loose flag values; the parameter set must match the family.
pub fn spec_from_flags(
    family: Family,
    twist: u8,
    genus: Option<u32>,
    gamma: Option<u32>,
    nu: Option<u32>,
    legs: Option<usize>,
    cutoff: Option<usize>,
) -> Result<ComplexSpec> {
    let reject = |flag: &str| invalid(format!("--{flag} does not apply to family {}", family.name()));
    let params = match family {
        Family::Ass(_) => {
            if genus.is_some() {
                return Err(reject("genus"));
            }
            if legs.is_some() {
                return Err(reject("legs"));
            }
            Params::Surface {
                gamma: gamma.ok_or_else(|| invalid("--gamma is required"))?,
                nu: nu.ok_or_else(|| invalid("--nu is required"))?,
            }
        }
        Family::Dft => {
            if gamma.is_some() || nu.is_some() {
                return Err(reject("gamma/--nu"));
            }
            Params::Legged {
                genus: genus.ok_or_else(|| invalid("--genus is required"))?,
                legs: legs.ok_or_else(|| invalid("--legs is required"))?,
            }
        }
        _ => {
            if gamma.is_some() || nu.is_some() {
                return Err(reject("gamma/--nu"));
            }
            if legs.is_some() {
                return Err(reject("legs"));
            }
            Params::Genus(genus.ok_or_else(|| invalid("--genus is required"))?)
        }
    };
    let mut spec = ComplexSpec { family, twist_d: twist, params, edge_cutoff: 0 };
    spec.edge_cutoff = cutoff.unwrap_or_else(|| spec.max_edges());
    spec.validate()?;
    Ok(spec)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        r
    };
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn parse_primes(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let p: u64 = tok.parse().map_err(|_| invalid(format!("bad prime {tok:?}")))?;
        if !is_prime(p) {
            return Err(invalid(format!("{p} is not prime")));
        }
        out.push(p);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// commands

/// Runs a command without touching the output directory.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        CommandKind::Enumerate => cmd_enumerate(cfg),
        CommandKind::Complex => cmd_complex(cfg),
        CommandKind::Homology => cmd_homology(cfg),
        CommandKind::Amplitude => cmd_amplitude(cfg),
        CommandKind::ValidateAlgebra => cmd_validate(cfg),
        CommandKind::BvCheck => cmd_bv_check(cfg),
        CommandKind::Selftest => cmd_selftest(cfg),
    }
}

fn spec_of(cfg: &RunConfig) -> Result<ComplexSpec> {
    cfg.spec.ok_or_else(|| invalid("command needs a complex"))
}

fn header(spec: &ComplexSpec) -> String {
    format!("# {spec}\n")
}

fn full(family: Family, params: Params) -> ComplexSpec {
    let mut s = ComplexSpec { family, twist_d: 0, params, edge_cutoff: 0 };
    s.edge_cutoff = s.max_edges();
    s
}

fn built(spec: &ComplexSpec) -> Result<GradedComplex> {
    let c = complexes::build_complex(spec)?;
    if let Err(w) = complexes::check_d_squared(&c) {
        return Err(Error::Internal(format!("d^2 != 0 on {spec}: degree {} column {} ({})", w.degree, w.column, w.source)));
    }
    Ok(c)
}

fn cmd_enumerate(cfg: &RunConfig) -> Result<Outcome> {
    let spec = spec_of(cfg)?;
    let c = complexes::build_complex(&spec)?;
    let mut text = header(&spec);
    for (deg, basis) in c.bases.iter().enumerate() {
        for (i, b) in basis.iter().enumerate() {
            let _ = writeln!(text, "{deg}\t{i}\t{}", b.to_text());
        }
    }
    let summary = format!("graphs per degree: {}\n", join(&c.dims()));
    Ok(Outcome { code: EXIT_OK, artifacts: vec![("graphs.txt".into(), text)], summary })
}

fn cmd_complex(cfg: &RunConfig) -> Result<Outcome> {
    let spec = spec_of(cfg)?;
    let c = built(&spec)?;
    let mut artifacts = vec![("complex.txt".to_string(), format!("{}dims: {}\ncomplete: {}\n", header(&spec), join(&c.dims()), c.complete))];
    artifacts.extend(complexes::export_text(&c));
    Ok(Outcome { code: EXIT_OK, artifacts, summary: format!("dims: {}\n", join(&c.dims())) })
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn cache_file(spec: &ComplexSpec) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    let key: String = spec.to_string().chars().map(|ch| if ch.is_ascii_alphanumeric() || ch == '-' { ch } else { '_' }).collect();
    Some(Path::new(&dir).join(format!("{key}.ranks")))
}

fn load_ranks(path: &Path, spec: &ComplexSpec, dims: &[usize]) -> Option<Vec<usize>> {
    let text = fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    if lines.next()? != format!("# {spec}") || lines.next()? != format!("dims: {}", join(dims)) {
        return None;
    }
    let ranks: Vec<usize> = lines.next()?.strip_prefix("ranks:")?.split_whitespace().map(str::parse).collect::<std::result::Result<_, _>>().ok()?;
    (ranks.len() == dims.len()).then_some(ranks)
}

/// Ranks of all differentials, read from or stored in the cache.
fn complex_ranks(cfg: &RunConfig, c: &GradedComplex) -> Vec<usize> {
    let path = if cfg.use_cache { cache_file(&c.spec) } else { None };
    let dims = c.dims();
    if let Some(r) = path.as_deref().and_then(|p| load_ranks(p, &c.spec, &dims)) {
        return r;
    }
    let ranks = linalg::ranks_par(&c.chain_data(), &cfg.primes, cfg.threads);
    if let Some(p) = path {
        let body = format!("{}dims: {}\nranks: {}\n", header(&c.spec), join(&dims), join(&ranks));
        // a failed cache write only costs a recomputation
        let _ = p.parent().map(fs::create_dir_all).transpose().and_then(|_| atomic_write(&p, &body));
    }
    ranks
}

/// Homology report text for a built complex.
pub fn homology_report(c: &GradedComplex, ranks: &[usize]) -> String {
    let rep = linalg::betti_from_ranks(&c.dims(), ranks, c.complete);
    let mut s = header(&c.spec);
    s.push_str(&rep.to_text());
    let _ = writeln!(s, "euler_betti: {}", linalg::euler_of_betti(&rep.betti));
    if !c.complete {
        let _ = writeln!(s, "note: truncated window, top degree is an upper bound");
    }
    if c.spec.family != Family::Dft {
        let _ = writeln!(s, "hat_betti: {}", join(&linalg::hat_betti(&rep.betti)));
    }
    s
}

fn cmd_homology(cfg: &RunConfig) -> Result<Outcome> {
    let spec = spec_of(cfg)?;
    let c = built(&spec)?;
    let ranks = complex_ranks(cfg, &c);
    let text = homology_report(&c, &ranks);
    Ok(Outcome { code: EXIT_OK, artifacts: vec![("homology.txt".into(), text.clone())], summary: text })
}

fn load_algebra(cfg: &RunConfig) -> Result<FrobeniusData> {
    let path = cfg.algebra.as_ref().ok_or_else(|| invalid("--algebra is required"))?;
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    FrobeniusData::from_text(&text)
}

fn cmd_amplitude(cfg: &RunConfig) -> Result<Outcome> {
    let spec = spec_of(cfg)?;
    let alg = load_algebra(cfg)?;
    let c = built(&spec)?;
    let z = amplitude::partition_cochain_par(&alg, &c, cfg.threads)?;
    let (ok, obs) = amplitude::verify_cocycle_of(&z, &c)?;
    let mut verdict = header(&spec);
    let _ = writeln!(verdict, "cocycle: {ok}");
    let _ = writeln!(verdict, "obstructions: {}", obs.len());
    for o in &obs {
        let _ = writeln!(verdict, "{}\t{}\t{}\t{}", o.degree, o.index, o.value, o.graph);
    }
    let max = obs.iter().map(|o| o.value.abs()).max();
    let summary = match max {
        Some(m) => format!("cocycle: false ({} obstructions, max |value| {m})\n", obs.len()),
        None => "cocycle: true\n".to_string(),
    };
    let cochain = format!("{}{}", header(&spec), z.to_text(&c));
    Ok(Outcome { code: EXIT_OK, artifacts: vec![("cochain.txt".into(), cochain), ("obstructions.txt".into(), verdict)], summary })
}

/// Validation and relation report of an algebra.
pub fn algebra_report(alg: &FrobeniusData) -> Result<String> {
    let mut s = frobenius::validate(alg).to_text();
    for (name, r) in [("rel1", frobenius::check_rel1(alg)?), ("rel2", frobenius::check_rel2(alg)?), ("rel3", frobenius::check_rel3(alg)?)] {
        match r.witness {
            None => {
                let _ = writeln!(s, "{name}\tpass");
            }
            Some((x, v)) => {
                let _ = writeln!(s, "{name}\tFAIL\t{x}\t{}", join(&v));
            }
        }
    }
    Ok(s)
}

fn cmd_validate(cfg: &RunConfig) -> Result<Outcome> {
    let alg = load_algebra(cfg)?;
    let text = algebra_report(&alg)?;
    Ok(Outcome { code: EXIT_OK, artifacts: vec![("validation.txt".into(), text.clone())], summary: text })
}

fn cmd_bv_check(cfg: &RunConfig) -> Result<Outcome> {
    let mut text = String::new();
    let mut all = true;
    let bv = built(&full(Family::Bv, Params::Genus(2)))?;
    let r = linalg::betti_from_ranks(&bv.dims(), &complex_ranks(cfg, &bv), bv.complete);
    let pass = r.betti.first() == Some(&1) && r.betti.iter().skip(1).all(|&b| b == 0);
    all &= pass;
    let _ = writeln!(text, "bv g=2\t{}\tbetti {}", verdict(pass), join(&r.betti));
    for (g, n) in [(0u32, 3usize), (1, 1)] {
        let c = built(&full(Family::Dft, Params::Legged { genus: g, legs: n }))?;
        let r = linalg::betti_from_ranks(&c.dims(), &complex_ranks(cfg, &c), c.complete);
        let pass = r.betti.iter().all(|&b| b == 0);
        all &= pass;
        let _ = writeln!(text, "dft g={g} n={n}\t{}\tbetti {}", verdict(pass), join(&r.betti));
    }
    Ok(Outcome { code: if all { EXIT_OK } else { EXIT_MISMATCH }, artifacts: vec![("bv_check.txt".into(), text.clone())], summary: text })
}

fn verdict(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

/// Complexes covered by the selftest.
pub fn selftest_specs() -> Vec<ComplexSpec> {
    let mut v = Vec::new();
    for d in 0..2u8 {
        for fam in [Family::ComUnder, Family::ComBar] {
            for g in 2..=3 {
                v.push(ComplexSpec { family: fam, twist_d: d, params: Params::Genus(g), edge_cutoff: 4 });
            }
        }
        for af in [AssFamily::Under, AssFamily::K, AssFamily::Bar, AssFamily::R, AssFamily::KR] {
            for (gamma, nu) in [(0, 3), (1, 1), (1, 2)] {
                v.push(ComplexSpec::ass(af, d, gamma, nu, 4));
            }
        }
    }
    v.push(ComplexSpec { family: Family::Bv, twist_d: 0, params: Params::Genus(2), edge_cutoff: 4 });
    v.push(ComplexSpec { family: Family::Dft, twist_d: 0, params: Params::Legged { genus: 1, legs: 1 }, edge_cutoff: 4 });
    v
}

fn dense_rank(m: &SparseIntMatrix) -> usize {
    let dense: frobenius::Mat = m.to_dense().into_iter().map(|r| r.into_iter().map(frobenius::q).collect()).collect();
    frobenius::rank(&dense)
}

fn cmd_selftest(cfg: &RunConfig) -> Result<Outcome> {
    let specs = selftest_specs();
    let mut text = String::new();
    let mut d2_ok = true;
    let mut oracle_ok = true;
    let results = pool::par_map(&specs, cfg.threads, |spec| -> Result<(bool, Vec<(usize, usize, usize, usize)>)> {
        let c = complexes::build_complex(spec)?;
        let d2 = complexes::check_d_squared(&c).is_ok();
        let mut rows = Vec::new();
        for (i, m) in c.diffs.iter().enumerate().skip(1) {
            if m.rows() <= 200 && m.cols() <= 200 {
                rows.push((i, linalg::rank_exact_with_primes(m, &cfg.primes), linalg::rank_fraction_free(m), dense_rank(m)));
            }
        }
        Ok((d2, rows))
    });
    for (spec, r) in specs.iter().zip(results) {
        let (d2, rows) = r?;
        d2_ok &= d2;
        let _ = writeln!(text, "d2\t{spec}\t{}", verdict(d2));
        for (i, fast, ff, dense) in rows {
            let ok = fast == dense && ff == dense;
            oracle_ok &= ok;
            let _ = writeln!(text, "rank\t{spec}\td_{i}\t{}\t{fast} {ff} {dense}", verdict(ok));
        }
    }
    let golden = golden_checks()?;
    let golden_ok = golden.iter().all(|(_, ok)| *ok);
    for (name, ok) in &golden {
        let _ = writeln!(text, "{name}\t{}", verdict(*ok));
    }
    let code = if !d2_ok {
        EXIT_INTERNAL
    } else if !oracle_ok || !golden_ok {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    };
    let summary = format!("d2: {}\noracles: {}\ngolden: {}\n", verdict(d2_ok), verdict(oracle_ok), verdict(golden_ok));
    Ok(Outcome { code, artifacts: vec![("selftest.txt".into(), text)], summary })
}

/// Known amplitude values of the two-dimensional algebras.
pub fn golden_checks() -> Result<Vec<(&'static str, bool)>> {
    let k1 = frobenius::k1();
    let k0 = frobenius::k0();
    let g = amplitude::golden_graph();
    let under = complexes::build_complex(&ComplexSpec::ass(AssFamily::Under, 1, 1, 2, 5))?;
    let kass = complexes::build_complex(&ComplexSpec::ass(AssFamily::K, 1, 1, 2, 5))?;
    let two = frobenius::q(2);
    Ok(vec![
        ("golden ass-underline |Z(dG)| = 2", amplitude::boundary_amplitude(&k1, &under, &g)?.abs() == two),
        ("golden kass Z(dG) = 0", amplitude::boundary_amplitude(&k1, &kass, &g)? == frobenius::q(0)),
        ("k1 rel1", frobenius::check_rel1(&k1)?.holds),
        ("k1 rel2 fails", !frobenius::check_rel2(&k1)?.holds),
        ("k0 rel1 rel2", frobenius::check_rel1(&k0)?.holds && frobenius::check_rel2(&k0)?.holds),
    ])
}

// ---------------------------------------------------------------------------
// process boundary

/// Writes `contents` to `path` through a sibling temporary and a rename.
pub fn atomic_write(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = tmp_name(path);
    fs::write(&tmp, contents).and_then(|_| fs::rename(&tmp, path)).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

fn tmp_name(path: &Path) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!(".{name}.tmp{}", std::process::id()))
}

/// Writes all artifacts or none.
pub fn write_artifacts(dir: &Path, artifacts: &[(String, String)]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut staged = Vec::new();
    for (name, body) in artifacts {
        let dest = dir.join(name);
        let tmp = tmp_name(&dest);
        if let Err(e) = fs::write(&tmp, body) {
            let _ = fs::remove_file(&tmp);
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(e);
        }
        staged.push((tmp, dest));
    }
    for (tmp, dest) in &staged {
        fs::rename(tmp, dest)?;
    }
    Ok(())
}

/// Single-line, tab-separated error record.
pub fn error_line(e: &Error) -> String {
    let (kind, msg) = match e {
        Error::InvalidInput(m) => ("invalid-input", m),
        Error::Internal(m) => ("internal", m),
    };
    format!("error\t{kind}\t{}", msg.replace(['\n', '\r', '\t'], " "))
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) => EXIT_INVALID,
        Error::Internal(_) => EXIT_INTERNAL,
    }
}

/// Executes and writes artifacts; returns the exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    match execute(cfg) {
        Ok(out) => {
            if let Err(e) = write_artifacts(&cfg.out, &out.artifacts) {
                eprintln!("{}", error_line(&invalid(format!("cannot write to {}: {e}", cfg.out.display()))));
                return EXIT_INVALID;
            }
            print!("{}", out.summary);
            out.code
        }
        Err(e) => {
            eprintln!("{}", error_line(&e));
            exit_code(&e)
        }
    }
}

/// Entry point for the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::from_args(args) {
        Ok(Ok(cfg)) => run(&cfg),
        Ok(Err(help)) => {
            print!("{help}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{}", error_line(&e));
            exit_code(&e)
        }
    }
}
