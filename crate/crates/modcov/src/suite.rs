//! Batch verification: operator property suites over random samples, the
//! kernel/covariant dimension comparison, lemma reports, mutation checks and
//! the full certification matrix the CLI `suite` command runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::CyclicAction;
use crate::arith::binom_mod;
use crate::cases::{lead_term_lemma_check, CaseData, CaseError, CaseKind, CaseSpec, LemmaId};
use crate::certify::{mutation_check, nakayama_certify, secondary_certify};
use crate::hilbert;
use crate::poly::{Monomial, Polynomial};
use crate::slices::{transfer_kernel_slice, FpMatrix};

/// Result of one named check over a number of random samples.
#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub samples: usize,
    pub failures: usize,
}

impl PropertyCheck {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

/// A random sparse polynomial with exponents bounded per variable.
pub fn random_polynomial(
    rng: &mut ChaCha8Rng,
    action: &CyclicAction,
    max_exp: u32,
    max_terms: usize,
) -> Polynomial {
    let prime = action.prime();
    let m = action.num_vars();
    let nterms = rng.gen_range(0..=max_terms);
    let terms = (0..nterms).map(|_| {
        let exps: Vec<u32> = (0..m).map(|_| rng.gen_range(0..=max_exp)).collect();
        (
            Monomial::new(&exps).expect("valid var count"),
            rng.gen_range(0..prime.p()),
        )
    });
    Polynomial::from_terms(prime, m, terms).expect("valid ring")
}

fn random_nonzero_monomial(
    rng: &mut ChaCha8Rng,
    action: &CyclicAction,
    max_exp: u32,
) -> Polynomial {
    let m = action.num_vars();
    let exps: Vec<u32> = (0..m).map(|_| rng.gen_range(0..=max_exp)).collect();
    Polynomial::monomial_term(
        action.prime(),
        Monomial::new(&exps).expect("valid var count"),
        1,
    )
}

/// Runs the seven operator identities on `samples` random inputs each.
pub fn operator_property_suite(
    action: &CyclicAction,
    samples: usize,
    seed: u64,
) -> Result<Vec<PropertyCheck>, CaseError> {
    let prime = action.prime();
    let q = prime.q() as u32;
    let m = action.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let check = |name| PropertyCheck {
        name,
        samples,
        failures: 0,
    };
    let mut checks = vec![
        check("twisted-derivation"),
        check("leibniz"),
        check("power-rule"),
        check("sigma-delta-commute"),
        check("delta-q-vanishes"),
        check("top-delta-is-transfer"),
        check("weight-product"),
    ];
    for _ in 0..samples {
        let f = random_polynomial(&mut rng, action, 2, 4);
        let g = random_polynomial(&mut rng, action, 2, 4);
        // Twisted derivation: Δ(fg) = fΔ(g) + Δ(f)σ(g).
        let lhs = action.delta(&(&f * &g))?;
        let rhs = (&f * &action.delta(&g)?).try_add(&(&action.delta(&f)? * &action.act(1, &g)?))?;
        if lhs != rhs {
            checks[0].failures += 1;
        }
        // Leibniz: Δ^k(fg) = Σ_i C(k,i) Δ^i(f) σ^i(Δ^(k−i)(g)).
        let k = rng.gen_range(0..=q);
        let lhs = action.delta_pow(k, &(&f * &g))?;
        let mut rhs = Polynomial::zero(prime, m)?;
        for i in 0..=k {
            let c = binom_mod(u64::from(k), u64::from(i), prime);
            let left = action.delta_pow(i, &f)?;
            let right = action.act(i64::from(i), &action.delta_pow(k - i, &g)?)?;
            rhs = rhs.try_add(&(&left * &right).scalar_mul(c))?;
        }
        if lhs != rhs {
            checks[1].failures += 1;
        }
        // Power rule: Δ(f^k) = Δ(f)·Σ f^i σ(f)^(k−1−i).
        let k = rng.gen_range(1..=q);
        let lhs = action.delta(&f.pow(k))?;
        let sigma_f = action.act(1, &f)?;
        let mut geom = Polynomial::zero(prime, m)?;
        for i in 0..k {
            geom = geom.try_add(&(&f.pow(i) * &sigma_f.pow(k - 1 - i)))?;
        }
        if lhs != &action.delta(&f)? * &geom {
            checks[2].failures += 1;
        }
        // σΔ = Δσ.
        if action.act(1, &action.delta(&f)?)? != action.delta(&action.act(1, &f)?)? {
            checks[3].failures += 1;
        }
        // Δ^q = 0.
        if !action.delta_pow(q, &f)?.is_zero() {
            checks[4].failures += 1;
        }
        // Δ^(q−1) = Tr^G.
        let tr = action.transfer(action.trivial_subgroup(), &f)?;
        if action.delta_pow(q - 1, &f)? != tr {
            checks[5].failures += 1;
        }
        // Weight product under its hypothesis, on monomial pairs.
        let mf = random_nonzero_monomial(&mut rng, action, 2);
        let mg = random_nonzero_monomial(&mut rng, action, 2);
        let wf = action.weight(&mf)?;
        let wg = action.weight(&mg)?;
        if wf + wg - 1 <= prime.p() && action.weight(&(&mf * &mg))? != wf + wg - 1 {
            checks[6].failures += 1;
        }
    }
    Ok(checks)
}

/// Per-degree comparison of the kernel and covariant slices, with a rank
/// check on the Ξ images.
#[derive(Debug, Clone)]
pub struct XiCheck {
    pub degree: u32,
    pub kernel_dim: usize,
    pub covariant_dim: usize,
    pub xi_rank: usize,
    pub images_covariant: bool,
}

impl XiCheck {
    pub fn ok(&self) -> bool {
        self.kernel_dim == self.covariant_dim
            && self.xi_rank == self.kernel_dim
            && self.images_covariant
    }
}

/// Checks dim covariant_slice(d) = dim kernel_slice(n, d) for d up to the
/// bound, that Ξ maps a kernel basis to honest covariants, and that the
/// stacked Ξ image matrix has full rank.
pub fn xi_isomorphism_check(case: &CaseData, bound: u32) -> Result<Vec<XiCheck>, CaseError> {
    let n = case.spec().n();
    let mut out = Vec::with_capacity(bound as usize + 1);
    for d in 0..=bound {
        let kernel = case.slices().kernel(n, d)?;
        let covariant = case.covariant_slice(d)?;
        let basis =
            crate::slices::monomial_basis(case.num_vars(), d, crate::poly::MonomialOrder::GrevLex);
        let mut image_rows = Vec::with_capacity(kernel.rank());
        let mut images_covariant = true;
        for row in kernel.rows() {
            let f = basis.poly_from_coords(case.prime(), row)?;
            let phi = case.xi(&f)?;
            if !case.is_covariant(&phi)? {
                images_covariant = false;
            }
            let coords = case.xi_coords(&f, d)?;
            if !covariant.contains(&coords)? {
                images_covariant = false;
            }
            image_rows.push(coords);
        }
        let xi_rank = if image_rows.is_empty() {
            0
        } else {
            FpMatrix::from_rows(case.prime(), image_rows).rank()
        };
        out.push(XiCheck {
            degree: d,
            kernel_dim: kernel.rank(),
            covariant_dim: covariant.rank(),
            xi_rank,
            images_covariant,
        });
    }
    Ok(out)
}

/// The acceptance matrix: every certified instance at primes up to `max_p`.
pub fn acceptance_instances(max_p: u64) -> Vec<CaseSpec> {
    let mut specs = Vec::new();
    for p in [2u64, 3, 5, 7].into_iter().filter(|&p| p <= max_p) {
        for n in 1..=p as u32 {
            specs.push(CaseSpec::new(CaseKind::V2 { p }, n).expect("valid"));
        }
    }
    for p in [3u64, 5, 7].into_iter().filter(|&p| p <= max_p) {
        for n in 1..=p as u32 {
            specs.push(CaseSpec::new(CaseKind::V3Odd { p }, n).expect("valid"));
        }
    }
    for p in [2u64, 3, 5].into_iter().filter(|&p| p <= max_p) {
        for n in 1..=p as u32 {
            specs.push(CaseSpec::new(CaseKind::V2V2 { p }, n).expect("valid"));
        }
    }
    if max_p >= 2 {
        for n in 1..=4 {
            specs.push(CaseSpec::new(CaseKind::V3C4, n).expect("valid"));
        }
    }
    specs
}

/// Sections of the full suite, selectable from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Section {
    /// Kernel-module certificates for every instance.
    Verify,
    /// Secondary-invariant certificates.
    Secondary,
    /// Closed-form rank/s values and the change-of-base identities.
    Ranks,
    /// Operator property suites on random samples.
    Props,
    /// Lead-term lemma reports.
    Lemmas,
    /// Kernel/covariant dimension comparison and Ξ rank checks.
    Xi,
    /// Transfer-kernel identification for the order-four case.
    Transfer,
    /// Candidate mutations must all be rejected.
    Mutation,
}

impl Section {
    pub fn all() -> Vec<Section> {
        vec![
            Section::Verify,
            Section::Secondary,
            Section::Ranks,
            Section::Props,
            Section::Lemmas,
            Section::Xi,
            Section::Transfer,
            Section::Mutation,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            Section::Verify => "verify",
            Section::Secondary => "secondary",
            Section::Ranks => "ranks",
            Section::Props => "props",
            Section::Lemmas => "lemmas",
            Section::Xi => "xi",
            Section::Transfer => "transfer",
            Section::Mutation => "mutation",
        }
    }
}

/// One line of the suite matrix.
#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub section: Section,
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub entries: Vec<SuiteEntry>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.ok).count()
    }

    pub fn failed(&self) -> usize {
        self.entries.len() - self.passed()
    }

    pub fn all_ok(&self) -> bool {
        self.failed() == 0
    }

    fn push(
        &mut self,
        section: Section,
        name: impl Into<String>,
        ok: bool,
        detail: impl Into<String>,
    ) {
        self.entries.push(SuiteEntry {
            section,
            name: name.into(),
            ok,
            detail: detail.into(),
        });
    }
}

fn spec_label(spec: &CaseSpec) -> String {
    format!(
        "{} p={} n={}",
        spec.kind().name(),
        spec.prime().p(),
        spec.n()
    )
}

/// Runs the selected sections over every instance up to `max_p`.
pub fn run_suite(
    max_p: u64,
    sections: &[Section],
    samples: usize,
    seed: u64,
) -> Result<SuiteReport, CaseError> {
    let mut report = SuiteReport::default();
    let specs = acceptance_instances(max_p);

    let wants = |s: Section| sections.contains(&s);

    // Certification sections share built case data per spec.
    if wants(Section::Verify)
        || wants(Section::Secondary)
        || wants(Section::Ranks)
        || wants(Section::Xi)
        || wants(Section::Mutation)
    {
        for spec in &specs {
            let case = CaseData::build(*spec)?;
            let label = spec_label(spec);
            if wants(Section::Verify) {
                let cert = nakayama_certify(&case, case.candidates());
                report.push(
                    Section::Verify,
                    label.clone(),
                    cert.verdict.is_verified(),
                    format!(
                        "count {} (rank {}), degree sum {} (s {})",
                        cert.freetest.count,
                        cert.freetest.expected_r,
                        cert.freetest.degree_sum,
                        cert.freetest.expected_s
                    ),
                );
            }
            if wants(Section::Secondary) && spec.n() == 1 {
                let cert = secondary_certify(&case);
                report.push(
                    Section::Secondary,
                    label.clone(),
                    cert.verdict.is_verified(),
                    format!(
                        "{} secondary generators, s = {}",
                        case.secondary().len(),
                        cert.freetest.expected_s
                    ),
                );
            }
            if wants(Section::Ranks) {
                let expected = spec.expected_rank_s();
                let top = case.max_candidate_degree();
                let entry = case
                    .kernel_numerator(spec.n(), top, None)
                    .and_then(|f| Ok(hilbert::rank_s(&f, None)?))
                    .map(|rs| (rs.r == expected.r && rs.s == expected.s, rs));
                match entry {
                    Ok((ok, rs)) => {
                        let ssub = case.ssubalg_report()?;
                        let needs_zero_s =
                            matches!(spec.kind(), CaseKind::V3Odd { .. } | CaseKind::V2V2 { .. });
                        let zero_ok = !needs_zero_s || ssub.s_m_a == 0;
                        report.push(
                            Section::Ranks,
                            label.clone(),
                            ok && ssub.ok() && zero_ok,
                            format!(
                                "(r, s) = ({}, {}), expected ({}, {}); s(M, invariants) = {}",
                                rs.r, rs.s, expected.r, expected.s, ssub.s_m_a
                            ),
                        );
                    }
                    Err(e) => {
                        report.push(Section::Ranks, label.clone(), false, e.to_string());
                    }
                }
            }
            if wants(Section::Xi) {
                let bound = case.max_candidate_degree();
                let checks = xi_isomorphism_check(&case, bound)?;
                let ok = checks.iter().all(XiCheck::ok);
                let detail = checks
                    .iter()
                    .map(|c| format!("d{}:{}", c.degree, c.kernel_dim))
                    .collect::<Vec<_>>()
                    .join(" ");
                report.push(Section::Xi, label.clone(), ok, format!("dims {detail}"));
            }
            if wants(Section::Mutation) {
                let outcomes = mutation_check(&case);
                let survivors: Vec<&str> = outcomes
                    .iter()
                    .filter(|o| !o.flipped)
                    .map(|o| o.description.as_str())
                    .collect();
                report.push(
                    Section::Mutation,
                    label.clone(),
                    survivors.is_empty(),
                    format!("{} mutants rejected", outcomes.len()),
                );
            }
        }
    }

    if wants(Section::Props) {
        // One action per (kind, p); n plays no role in the operator rules.
        let mut seen: Vec<String> = Vec::new();
        for spec in &specs {
            let key = format!("{} p={}", spec.kind().name(), spec.prime().p());
            if seen.contains(&key) {
                continue;
            }
            seen.push(key.clone());
            let case = CaseData::build(CaseSpec::new(spec.kind(), 1)?)?;
            let checks = operator_property_suite(case.action(), samples, seed)?;
            for check in checks {
                report.push(
                    Section::Props,
                    format!("{key} {}", check.name),
                    check.ok(),
                    format!("{} samples, {} failures", check.samples, check.failures),
                );
            }
        }
    }

    if wants(Section::Lemmas) {
        for p in [3u64, 5, 7].into_iter().filter(|&p| p <= max_p) {
            for lemma in [
                LemmaId::DeltaPowersOfX1,
                LemmaId::DeltaPowersOfX1X2,
                LemmaId::AlgebraLeadShape,
            ] {
                let rep = lead_term_lemma_check(lemma, p, seed)?;
                report.push(
                    Section::Lemmas,
                    format!("{} p={p}", lemma.name()),
                    rep.ok(),
                    format!("{} entries checked", rep.checked),
                );
            }
        }
        for p in [3u64, 5].into_iter().filter(|&p| p <= max_p) {
            let rep = lead_term_lemma_check(LemmaId::BlockLeadTerms, p, seed)?;
            let notes = rep.notes.join("; ");
            report.push(
                Section::Lemmas,
                format!("{} p={p}", LemmaId::BlockLeadTerms.name()),
                rep.ok(),
                format!("{} entries checked; {notes}", rep.checked),
            );
        }
    }

    if wants(Section::Transfer) && max_p >= 2 {
        let case = CaseData::build(CaseSpec::new(CaseKind::V3C4, 1)?)?;
        let h = case.intermediate_subgroup().expect("order-four case");
        let mut ok = true;
        let mut dims = Vec::new();
        for d in 0..=12 {
            let tk = transfer_kernel_slice(case.action(), h, d)?;
            let inv = case.slices().kernel(1, d)?;
            dims.push(tk.rank());
            if tk.rank() != inv.rank() {
                ok = false;
            }
        }
        report.push(
            Section::Transfer,
            "v3c4 transfer kernel vs invariants, d <= 12".to_string(),
            ok,
            format!("ranks {dims:?}"),
        );
    }

    Ok(report)
}
