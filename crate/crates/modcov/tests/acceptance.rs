//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use modcov::cases::{lead_term_lemma_check, CaseData, CaseKind, CaseSpec, LemmaId};
use modcov::certify::{mutation_check, nakayama_certify, secondary_certify};
use modcov::hilbert;
use modcov::slices::transfer_kernel_slice;
use modcov::suite::{acceptance_instances, operator_property_suite, xi_isomorphism_check, XiCheck};

fn case_for(spec: CaseSpec) -> Arc<CaseData> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<CaseData>>>> = OnceLock::new();
    let key = format!("{}:{}:{}", spec.kind().name(), spec.prime().p(), spec.n());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Arc::clone(hit);
    }
    let built = Arc::new(CaseData::build(spec).expect("case builds"));
    cache
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::clone(&built))
        .clone()
}

fn report(criterion: &str, ok: bool, detail: &str) {
    println!(
        "[{}] criterion {criterion}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_01_v3_kernel_certificates() {
    let started = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for p in [3u64, 5, 7] {
        for n in 1..=p as u32 {
            let run = Instant::now();
            let case = case_for(CaseSpec::new(CaseKind::V3Odd { p }, n).unwrap());
            let cert = nakayama_certify(&case, case.candidates());
            let elapsed = run.elapsed();
            let good = cert.verdict.is_verified()
                && cert.freetest.count == 2 * u64::from(n)
                && cert.freetest.degree_sum == u64::from(n) * p
                && elapsed < Duration::from_secs(30);
            if !good {
                ok = false;
                detail = format!("p={p} n={n}: {} ({elapsed:?})", cert.verdict);
            }
        }
    }
    let total = started.elapsed();
    if ok && total >= Duration::from_secs(300) {
        ok = false;
        detail = format!("full set took {total:?}");
    }
    if ok {
        detail = format!(
            "15 instances verified with count 2n and degree sum np ({} ms total)",
            total.as_millis()
        );
    }
    report("1 (V3 certificates)", ok, &detail);
}

#[test]
fn criterion_02_block_case_certificates() {
    let mut ok = true;
    let mut detail = String::new();
    for p in [2u64, 3, 5] {
        for n in 1..=p as u32 {
            let run = Instant::now();
            let case = case_for(CaseSpec::new(CaseKind::V2V2 { p }, n).unwrap());
            let cert = nakayama_certify(&case, case.candidates());
            let elapsed = run.elapsed();
            let good = cert.verdict.is_verified()
                && cert.freetest.count == u64::from(n) * p
                && cert.freetest.degree_sum == u64::from(n) * p * (p - 1)
                && (!(p == 5 && n == 5) || elapsed < Duration::from_secs(60));
            if !good {
                ok = false;
                detail = format!("p={p} n={n}: {} ({elapsed:?})", cert.verdict);
            }
        }
    }
    if ok {
        detail = "10 instances verified with |S| = np and degree sum np(p-1)".to_string();
    }
    report("2 (V2+V2 certificates)", ok, &detail);
}

#[test]
fn criterion_03_c4_certificates() {
    let mut ok = true;
    let mut detail = String::new();
    for (n, s) in [(2u32, 6u64), (3, 11), (4, 16)] {
        let case = case_for(CaseSpec::new(CaseKind::V3C4, n).unwrap());
        let cert = nakayama_certify(&case, case.candidates());
        if !(cert.verdict.is_verified()
            && cert.freetest.expected_s == s
            && cert.freetest.degree_sum == s)
        {
            ok = false;
            detail = format!("n={n}: {} (s = {})", cert.verdict, cert.freetest.expected_s);
        }
    }
    let case = case_for(CaseSpec::new(CaseKind::V3C4, 1).unwrap());
    let degree_two_invariants = case.slices().kernel(1, 2).unwrap().rank();
    if degree_two_invariants != 2 {
        ok = false;
        detail = format!("invariant slice at degree 2 has rank {degree_two_invariants}");
    }
    if ok {
        detail =
            "n = 2, 3, 4 verified with s = 6, 11, 16; two invariants of degree two".to_string();
    }
    report("3 (C4 certificates)", ok, &detail);
}

#[test]
fn criterion_04_v2_certificates() {
    let mut ok = true;
    let mut detail = String::new();
    let mut count = 0;
    for p in [2u64, 3, 5, 7] {
        for n in 1..=p as u32 {
            let case = case_for(CaseSpec::new(CaseKind::V2 { p }, n).unwrap());
            let cert = nakayama_certify(&case, case.candidates());
            if !cert.verdict.is_verified() {
                ok = false;
                detail = format!("p={p} n={n}: {}", cert.verdict);
            }
            count += 1;
        }
    }
    if ok {
        detail = format!("{count} instances of powers-of-x1 generators verified");
    }
    report("4 (V2 certificates)", ok, &detail);
}

#[test]
fn criterion_05_secondary_certificates() {
    let mut ok = true;
    let mut detail = String::new();
    for p in [3u64, 5, 7] {
        let case = case_for(CaseSpec::new(CaseKind::V3Odd { p }, 1).unwrap());
        let cert = secondary_certify(&case);
        if !(cert.verdict.is_verified() && cert.freetest.expected_s == p) {
            ok = false;
            detail = format!("v3 p={p}: {}", cert.verdict);
        }
    }
    for p in [2u64, 3, 5] {
        let case = case_for(CaseSpec::new(CaseKind::V2V2 { p }, 1).unwrap());
        let cert = secondary_certify(&case);
        if !(cert.verdict.is_verified() && cert.freetest.expected_s == p * (p - 1)) {
            ok = false;
            detail = format!(
                "v2v2 p={p}: {} (s = {})",
                cert.verdict, cert.freetest.expected_s
            );
        }
    }
    let case = case_for(CaseSpec::new(CaseKind::V3C4, 1).unwrap());
    let cert = secondary_certify(&case);
    if !(cert.verdict.is_verified() && cert.freetest.expected_s == 3) {
        ok = false;
        detail = format!("v3c4: {} (s = {})", cert.verdict, cert.freetest.expected_s);
    }
    if ok {
        detail = "secondary generators verified with exact s-invariants".to_string();
    }
    report("5 (secondary certificates)", ok, &detail);
}

#[test]
fn criterion_06_rank_s_closed_forms_and_change_of_base() {
    let mut ok = true;
    let mut detail = String::new();
    for spec in acceptance_instances(7) {
        let case = case_for(spec);
        let expected = spec.expected_rank_s();
        let top = case.max_candidate_degree();
        let rs = case
            .kernel_numerator(spec.n(), top, None)
            .and_then(|f| Ok(hilbert::rank_s(&f, None)?))
            .unwrap();
        let ssub = case.ssubalg_report().unwrap();
        let needs_zero = matches!(spec.kind(), CaseKind::V3Odd { .. } | CaseKind::V2V2 { .. });
        let good = rs.r == expected.r
            && rs.s == expected.s
            && ssub.ok()
            && (!needs_zero || ssub.s_m_a == 0);
        if !good {
            ok = false;
            detail = format!(
                "{} p={} n={}: (r, s) = ({}, {}), expected ({}, {}), identities {}, s(M, invariants) = {}",
                spec.kind().name(),
                spec.prime().p(),
                spec.n(),
                rs.r,
                rs.s,
                expected.r,
                expected.s,
                ssub.ok(),
                ssub.s_m_a
            );
        }
    }
    if ok {
        detail =
            "closed forms and both change-of-base identities hold in all 46 instances".to_string();
    }
    report("6 (rank/s closed forms)", ok, &detail);
}

#[test]
fn criterion_07_operator_property_suites() {
    let mut ok = true;
    let mut detail = String::new();
    let mut suites = 0;
    let mut actions = vec![];
    for p in [2u64, 3, 5, 7] {
        actions.push((
            "v2",
            case_for(CaseSpec::new(CaseKind::V2 { p }, 1).unwrap()),
        ));
    }
    for p in [3u64, 5, 7] {
        actions.push((
            "v3",
            case_for(CaseSpec::new(CaseKind::V3Odd { p }, 1).unwrap()),
        ));
    }
    for p in [2u64, 3, 5] {
        actions.push((
            "v2v2",
            case_for(CaseSpec::new(CaseKind::V2V2 { p }, 1).unwrap()),
        ));
    }
    actions.push(("v3c4", case_for(CaseSpec::new(CaseKind::V3C4, 1).unwrap())));
    for (name, case) in actions {
        let checks = operator_property_suite(case.action(), 500, 20240 + case.prime().q()).unwrap();
        for check in checks {
            suites += 1;
            if !check.ok() {
                ok = false;
                detail = format!(
                    "{name} p={}: {} failed {} of {} samples",
                    case.prime().p(),
                    check.name,
                    check.failures,
                    check.samples
                );
            }
        }
    }
    if ok {
        detail = format!("{suites} property checks, 500 samples each, zero failures");
    }
    report("7 (operator properties)", ok, &detail);
}

#[test]
fn criterion_08_xi_isomorphism() {
    let mut ok = true;
    let mut detail = String::new();
    let mut slices = 0;
    for spec in acceptance_instances(7) {
        let case = case_for(spec);
        let bound = case.max_candidate_degree();
        let checks = xi_isomorphism_check(&case, bound).unwrap();
        slices += checks.len();
        if !checks.iter().all(XiCheck::ok) {
            ok = false;
            let bad = checks.iter().find(|c| !c.ok()).unwrap();
            detail = format!(
                "{} p={} n={} d={}: kernel {}, covariant {}, xi rank {}",
                spec.kind().name(),
                spec.prime().p(),
                spec.n(),
                bad.degree,
                bad.kernel_dim,
                bad.covariant_dim,
                bad.xi_rank
            );
        }
    }
    if ok {
        detail = format!(
            "kernel and covariant dimensions agree and the xi image has full rank in {slices} slices"
        );
    }
    report("8 (xi isomorphism)", ok, &detail);
}

#[test]
fn criterion_09_lead_term_lemmas() {
    let mut ok = true;
    let mut detail = String::new();
    for p in [3u64, 5, 7] {
        for lemma in [
            LemmaId::DeltaPowersOfX1,
            LemmaId::DeltaPowersOfX1X2,
            LemmaId::AlgebraLeadShape,
        ] {
            let rep = lead_term_lemma_check(lemma, p, 99).unwrap();
            if !rep.ok() {
                ok = false;
                detail = format!("{} p={p}: {:?}", lemma.name(), rep.failures.first());
            }
        }
    }
    for p in [3u64, 5] {
        let rep = lead_term_lemma_check(LemmaId::BlockLeadTerms, p, 99).unwrap();
        if !rep.ok() {
            ok = false;
            detail = format!("block-lead-terms p={p}: {:?}", rep.failures.first());
        }
    }
    if ok {
        detail = "delta-power lemmas exhaustive (gradedrevlex), block lemma monomials exhaustive \
                  (gradedlex), algebra lead shape on 200 random elements per prime"
            .to_string();
    }
    report("9 (lead-term lemmas)", ok, &detail);
}

#[test]
fn criterion_10_mutation_suite() {
    let mut ok = true;
    let mut detail = String::new();
    let mut mutants = 0;
    for spec in acceptance_instances(7) {
        let case = case_for(spec);
        for outcome in mutation_check(&case) {
            mutants += 1;
            if !outcome.flipped {
                ok = false;
                detail = format!(
                    "{} p={} n={}: mutant survived: {}",
                    spec.kind().name(),
                    spec.prime().p(),
                    spec.n(),
                    outcome.description
                );
            }
        }
    }
    if ok {
        detail = format!("{mutants} mutants (drop or hsop-scale each candidate) all rejected");
    }
    report("10 (mutation suite)", ok, &detail);
}

#[test]
fn criterion_11_transfer_kernel_identification() {
    let case = case_for(CaseSpec::new(CaseKind::V3C4, 1).unwrap());
    let h = case.intermediate_subgroup().unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for d in 0..=12u32 {
        let tk = transfer_kernel_slice(case.action(), h, d).unwrap();
        let inv = case.slices().kernel(1, d).unwrap();
        if tk.rank() != inv.rank() {
            ok = false;
            detail = format!(
                "d={d}: transfer kernel {} vs invariants {}",
                tk.rank(),
                inv.rank()
            );
        }
    }
    if ok {
        detail = "transfer-kernel and invariant slice ranks agree for all d <= 12".to_string();
    }
    report("11 (transfer kernel)", ok, &detail);
}
