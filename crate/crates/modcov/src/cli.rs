//! Command-line driver.
//!
//! Exit codes are a stable contract: 0 = verified, 1 = mathematical failure,
//! 2 = usage error.  Human-readable tables go to stdout; machine-readable
//! JSON goes to the path given by `--json`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cases::{lead_term_lemma_check, CaseData, CaseKind, CaseSpec, LemmaId};
use crate::certify::{certify_kernel_module, secondary_certify, Certificate, CertifyOptions};
use crate::hilbert;
use crate::poly::{MonomialOrder, Polynomial};
use crate::slices::{kernel_slice, monomial_basis};
use crate::suite::{run_suite, Section};

#[derive(Parser)]
#[command(name = "modcov", version)]
#[command(
    about = "Exact certification of generating sets for modules of covariants of cyclic p-groups"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    /// C_p acting on the 2-dimensional indecomposable.
    V2,
    /// C_p (p odd) acting on the 3-dimensional indecomposable.
    V3,
    /// C_p acting on the sum of two 2-dimensional indecomposables.
    V2v2,
    /// C_4 acting on the 3-dimensional indecomposable over F_2.
    V3c4,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Gradedlex,
    Gradedrevlex,
}

impl From<OrderArg> for MonomialOrder {
    fn from(o: OrderArg) -> MonomialOrder {
        match o {
            OrderArg::Gradedlex => MonomialOrder::GrLex,
            OrderArg::Gradedrevlex => MonomialOrder::GrevLex,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LemmaArg {
    DeltaPowersX1,
    DeltaPowersX1x2,
    BlockLeadTerms,
    AlgebraLeadShape,
}

impl From<LemmaArg> for LemmaId {
    fn from(l: LemmaArg) -> LemmaId {
        match l {
            LemmaArg::DeltaPowersX1 => LemmaId::DeltaPowersOfX1,
            LemmaArg::DeltaPowersX1x2 => LemmaId::DeltaPowersOfX1X2,
            LemmaArg::BlockLeadTerms => LemmaId::BlockLeadTerms,
            LemmaArg::AlgebraLeadShape => LemmaId::AlgebraLeadShape,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a case and certify its candidate generating set.
    Verify {
        #[arg(long, value_enum)]
        case: CaseArg,
        /// Coefficient prime (fixed to 2 for v3c4).
        #[arg(long)]
        p: Option<u64>,
        /// Dimension of the indecomposable module V_n.
        #[arg(long)]
        n: u32,
        /// Write the JSON certificate here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also certify the secondary invariants (implied when n = 1).
        #[arg(long)]
        with_secondary: bool,
        /// Print the full per-degree table.
        #[arg(long)]
        print_degrees: bool,
        /// Self-test hook: mutate the candidate set first (drop:IDX or scale:IDX).
        #[arg(long, value_name = "KIND:INDEX")]
        mutate: Option<String>,
    },
    /// Run every certified instance plus the property and lemma suites.
    Suite {
        #[arg(long, default_value_t = 7)]
        max_p: u64,
        /// Restrict to the named sections (default: all).
        #[arg(long = "only", value_enum)]
        only: Vec<Section>,
        /// Random samples per operator property.
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the reduced basis of ker(Δ^n) in one degree.
    Kernel {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        degree: u32,
        /// Monomial order for the slice coordinates.
        #[arg(long, value_enum, default_value = "gradedrevlex")]
        order: OrderArg,
    },
    /// Print the truncated Hilbert series, numerator and (r, s) of K_n.
    Series {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        n: u32,
        /// Truncation bound (default: generator top degree + max hsop degree).
        #[arg(long)]
        max_degree: Option<u32>,
    },
    /// Verify the lead-term lemmas and print their reports.
    Lemmas {
        /// Restrict to one prime (default: every applicable prime <= 7).
        #[arg(long)]
        p: Option<u64>,
        /// Restrict to one lemma (default: all four).
        #[arg(long, value_enum)]
        lemma: Option<LemmaArg>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_MATH_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(dispatch(cli))
}

fn dispatch(cli: Cli) -> u8 {
    let degree_cap = match read_degree_cap() {
        Ok(cap) => cap,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    match cli.command {
        Command::Verify {
            case,
            p,
            n,
            json,
            with_secondary,
            print_degrees,
            mutate,
        } => cmd_verify(
            case,
            p,
            n,
            json,
            with_secondary,
            print_degrees,
            mutate,
            degree_cap,
        ),
        Command::Suite {
            max_p,
            only,
            samples,
            seed,
            json,
        } => cmd_suite(max_p, only, samples, seed, json),
        Command::Kernel {
            case,
            p,
            n,
            degree,
            order,
        } => cmd_kernel(case, p, n, degree, order),
        Command::Series {
            case,
            p,
            n,
            max_degree,
        } => cmd_series(case, p, n, max_degree, degree_cap),
        Command::Lemmas { p, lemma, seed } => cmd_lemmas(p, lemma, seed),
    }
}

/// MODCOV_MAX_DEGREE caps every Hilbert truncation bound.
fn read_degree_cap() -> Result<Option<u32>, String> {
    match std::env::var("MODCOV_MAX_DEGREE") {
        Ok(raw) => raw
            .parse::<u32>()
            .map(Some)
            .map_err(|_| format!("MODCOV_MAX_DEGREE must be a nonnegative integer, got `{raw}`")),
        Err(_) => Ok(None),
    }
}

fn build_spec(case: CaseArg, p: Option<u64>, n: u32) -> Result<CaseSpec, String> {
    let kind = match case {
        CaseArg::V2 => CaseKind::V2 {
            p: p.ok_or("--p is required for case v2")?,
        },
        CaseArg::V3 => CaseKind::V3Odd {
            p: p.ok_or("--p is required for case v3")?,
        },
        CaseArg::V2v2 => CaseKind::V2V2 {
            p: p.ok_or("--p is required for case v2v2")?,
        },
        CaseArg::V3c4 => {
            if let Some(p) = p {
                if p != 2 {
                    return Err(format!("case v3c4 is the p = 2 case, got --p {p}"));
                }
            }
            CaseKind::V3C4
        }
    };
    CaseSpec::new(kind, n).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CaseJson {
    kind: String,
    p: u64,
    k: u32,
    q: u64,
    n: u32,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct DegreeJson {
    d: u32,
    dim_Md: usize,
    dim_AplusMd: usize,
    n_cands: usize,
    ok: bool,
}

#[derive(Serialize)]
struct FreeTestJson {
    r: u64,
    count: u64,
    s: u64,
    degree_sum: u64,
}

#[derive(Serialize)]
struct CertificateJson {
    version: String,
    case: CaseJson,
    hsop: Vec<String>,
    secondary: Vec<String>,
    candidates: Vec<String>,
    per_degree: Vec<DegreeJson>,
    freetest: FreeTestJson,
    verdict: String,
    elapsed_ms: u64,
}

fn certificate_json(
    case: &CaseData,
    candidates: &[Polynomial],
    cert: &Certificate,
    verdict: String,
    elapsed_ms: u64,
) -> CertificateJson {
    let spec = case.spec();
    let prime = case.prime();
    CertificateJson {
        version: env!("CARGO_PKG_VERSION").to_string(),
        case: CaseJson {
            kind: spec.kind().name().to_string(),
            p: prime.p(),
            k: prime.k(),
            q: prime.q(),
            n: spec.n(),
        },
        hsop: case.hsop().iter().map(|f| f.to_string()).collect(),
        secondary: case.secondary().iter().map(|f| f.to_string()).collect(),
        candidates: candidates.iter().map(|f| f.to_string()).collect(),
        per_degree: cert
            .per_degree
            .iter()
            .map(|r| DegreeJson {
                d: r.d,
                dim_Md: r.dim_m,
                dim_AplusMd: r.dim_aplus_m,
                n_cands: r.candidates_at_d,
                ok: r.ok,
            })
            .collect(),
        freetest: FreeTestJson {
            r: cert.freetest.expected_r,
            count: cert.freetest.count,
            s: cert.freetest.expected_s,
            degree_sum: cert.freetest.degree_sum,
        },
        verdict,
        elapsed_ms,
    }
}

fn parse_mutation(raw: &str, count: usize) -> Result<(bool, usize), String> {
    let (kind, idx) = raw
        .split_once(':')
        .ok_or_else(|| format!("--mutate takes drop:IDX or scale:IDX, got `{raw}`"))?;
    let idx: usize = idx
        .parse()
        .map_err(|_| format!("--mutate index `{idx}` is not a number"))?;
    if idx >= count {
        return Err(format!(
            "--mutate index {idx} out of range (have {count} candidates)"
        ));
    }
    match kind {
        "drop" => Ok((true, idx)),
        "scale" => Ok((false, idx)),
        other => Err(format!(
            "--mutate kind must be drop or scale, got `{other}`"
        )),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    case_arg: CaseArg,
    p: Option<u64>,
    n: u32,
    json: Option<PathBuf>,
    with_secondary: bool,
    print_degrees: bool,
    mutate: Option<String>,
    degree_cap: Option<u32>,
) -> u8 {
    let started = Instant::now();
    let spec = match build_spec(case_arg, p, n) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let case = match CaseData::build(spec) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut candidates: Vec<Polynomial> = case.candidates().to_vec();
    if let Some(raw) = &mutate {
        match parse_mutation(raw, candidates.len()) {
            Ok((drop, idx)) => {
                if drop {
                    candidates.remove(idx);
                } else {
                    candidates[idx] = candidates[idx].try_mul(&case.hsop()[0]).expect("same ring");
                }
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                return EXIT_USAGE;
            }
        }
    }
    let opts = CertifyOptions { degree_cap };
    let cert = certify_kernel_module(&case, spec.n(), &candidates, opts);

    let prime = case.prime();
    println!(
        "case {} p={} (q = {}) n={}",
        spec.kind().name(),
        prime.p(),
        prime.q(),
        spec.n()
    );
    println!("hsop degrees {:?}", case.hsop_degrees());
    println!(
        "candidates: {} of degree sum {}",
        cert.freetest.count, cert.freetest.degree_sum
    );
    if print_degrees {
        println!("  d  dim M_d  dim (A+M)_d  #cands  ok");
        for r in &cert.per_degree {
            println!(
                "{:>3}  {:>7}  {:>11}  {:>6}  {}",
                r.d, r.dim_m, r.dim_aplus_m, r.candidates_at_d, r.ok
            );
        }
    }
    println!("kernel certificate: {}", cert.verdict);

    let mut all_verified = cert.verdict.is_verified();
    if with_secondary || spec.n() == 1 {
        let sec = secondary_certify(&case);
        println!("secondary certificate: {}", sec.verdict);
        all_verified &= sec.verdict.is_verified();
    }

    let elapsed_ms = started.elapsed().as_millis() as u64;
    println!("elapsed: {elapsed_ms} ms");
    if let Some(path) = json {
        let verdict_text = if all_verified {
            "verified".to_string()
        } else {
            cert.verdict.to_string()
        };
        let doc = certificate_json(&case, &candidates, &cert, verdict_text, elapsed_ms);
        match serde_json::to_string_pretty(&doc) {
            Ok(text) => {
                if let Err(e) = std::fs::write(&path, text + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
            Err(e) => {
                eprintln!("error: cannot serialize certificate: {e}");
                return EXIT_USAGE;
            }
        }
    }
    if all_verified {
        EXIT_OK
    } else {
        EXIT_MATH_FAILURE
    }
}

#[derive(Serialize)]
struct SuiteEntryJson {
    section: String,
    name: String,
    ok: bool,
    detail: String,
}

#[derive(Serialize)]
struct SuiteJson {
    version: String,
    max_p: u64,
    sections: Vec<String>,
    entries: Vec<SuiteEntryJson>,
    passed: usize,
    failed: usize,
    elapsed_ms: u64,
}

fn cmd_suite(
    max_p: u64,
    only: Vec<Section>,
    samples: usize,
    seed: u64,
    json: Option<PathBuf>,
) -> u8 {
    let started = Instant::now();
    let sections = if only.is_empty() {
        Section::all()
    } else {
        only
    };
    let report = match run_suite(max_p, &sections, samples, seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if report.entries.is_empty() {
        eprintln!(
            "error: empty selection (no instances at max_p = {max_p} for the chosen sections)"
        );
        return EXIT_USAGE;
    }
    for entry in &report.entries {
        println!(
            "[{}] {:<9} {} — {}",
            if entry.ok { " ok " } else { "FAIL" },
            entry.section.name(),
            entry.name,
            entry.detail
        );
    }
    let elapsed_ms = started.elapsed().as_millis() as u64;
    println!(
        "suite: {} passed, {} failed ({elapsed_ms} ms)",
        report.passed(),
        report.failed()
    );
    if let Some(path) = json {
        let doc = SuiteJson {
            version: env!("CARGO_PKG_VERSION").to_string(),
            max_p,
            sections: sections.iter().map(|s| s.name().to_string()).collect(),
            entries: report
                .entries
                .iter()
                .map(|e| SuiteEntryJson {
                    section: e.section.name().to_string(),
                    name: e.name.clone(),
                    ok: e.ok,
                    detail: e.detail.clone(),
                })
                .collect(),
            passed: report.passed(),
            failed: report.failed(),
            elapsed_ms,
        };
        match serde_json::to_string_pretty(&doc) {
            Ok(text) => {
                if let Err(e) = std::fs::write(&path, text + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
            Err(e) => {
                eprintln!("error: cannot serialize suite report: {e}");
                return EXIT_USAGE;
            }
        }
    }
    if report.all_ok() {
        EXIT_OK
    } else {
        EXIT_MATH_FAILURE
    }
}

fn cmd_kernel(case_arg: CaseArg, p: Option<u64>, n: u32, degree: u32, order: OrderArg) -> u8 {
    let spec = match build_spec(case_arg, p, n) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let case = match CaseData::build(spec) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let order = MonomialOrder::from(order);
    let slice = match kernel_slice(case.action(), spec.n(), degree, order) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_MATH_FAILURE;
        }
    };
    let basis = monomial_basis(case.num_vars(), degree, order);
    match slice.basis_polynomials(&basis) {
        Ok(polys) => {
            for f in polys {
                println!("{f}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_MATH_FAILURE
        }
    }
}

fn cmd_series(
    case_arg: CaseArg,
    p: Option<u64>,
    n: u32,
    max_degree: Option<u32>,
    degree_cap: Option<u32>,
) -> u8 {
    let spec = match build_spec(case_arg, p, n) {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let case = match CaseData::build(spec) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let max_hsop = case.max_hsop_degree();
    let mut bound = max_degree.unwrap_or(case.max_candidate_degree() + max_hsop);
    if let Some(cap) = degree_cap {
        bound = bound.min(cap);
    }
    if bound < max_hsop {
        eprintln!("error: truncation bound {bound} is below the largest hsop degree {max_hsop}");
        return EXIT_USAGE;
    }
    let series = match case.kernel_series(spec.n(), bound) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_MATH_FAILURE;
        }
    };
    let dims: Vec<String> = series.coeffs().iter().map(|c| c.to_string()).collect();
    println!(
        "H(K_{}, t) coefficients up to degree {bound}: [{}]",
        spec.n(),
        dims.join(", ")
    );
    let expected_top = (bound - max_hsop) as usize;
    match hilbert::numerator(&series, &case.hsop_degrees(), expected_top) {
        Ok(f) => {
            println!(
                "numerator over hsop degrees {:?}: {}",
                case.hsop_degrees(),
                f.display()
            );
            match hilbert::rank_s(&f, None) {
                Ok(rs) => {
                    println!("r = {}, s = {}", rs.r, rs.s);
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_MATH_FAILURE
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_MATH_FAILURE
        }
    }
}

fn cmd_lemmas(p: Option<u64>, lemma: Option<LemmaArg>, seed: u64) -> u8 {
    let lemmas: Vec<LemmaId> = match lemma {
        Some(l) => vec![l.into()],
        None => LemmaId::all().to_vec(),
    };
    let mut any_failed = false;
    let mut any_ran = false;
    for lemma in lemmas {
        let primes: Vec<u64> = match lemma {
            LemmaId::BlockLeadTerms => vec![2, 3, 5],
            _ => vec![3, 5, 7],
        };
        let primes: Vec<u64> = match p {
            Some(p) => primes.into_iter().filter(|&q| q == p).collect(),
            None => primes,
        };
        for p in primes {
            let report = match lead_term_lemma_check(lemma, p, seed) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            };
            any_ran = true;
            println!(
                "[{}] {} p={} ({}): {} entries",
                if report.ok() { " ok " } else { "FAIL" },
                report.lemma.name(),
                report.p,
                report.order.name(),
                report.checked
            );
            for note in &report.notes {
                println!("      note: {note}");
            }
            for failure in &report.failures {
                println!("      failure: {failure}");
                any_failed = true;
            }
        }
    }
    if !any_ran {
        eprintln!("error: empty selection (no lemma applies to the requested prime)");
        return EXIT_USAGE;
    }
    if any_failed {
        EXIT_MATH_FAILURE
    } else {
        EXIT_OK
    }
}
