//! Acceptance run: one PASS/FAIL line per criterion, then a single assertion
//! over all of them.
//!
//! Run with `cargo test -p ggslab --test acceptance -- --nocapture` to see the
//! lines.

use std::time::{Duration, Instant};

use num_bigint::BigUint;

use ggslab::certificate::{certify, serialize};
use ggslab::harness::{run_suite, SuiteReport};
use ggslab::quotient::{quotient_group, DEFAULT_MAX_POINTS};
use ggslab::subgroup::SubgroupPresentation;
use ggslab::GgsGroup;

const SEED: u64 = 42;

fn groups() -> Vec<(&'static str, GgsGroup)> {
    vec![
        ("GS-3", GgsGroup::new(3, &[1, 2]).unwrap()),
        ("GS-5", GgsGroup::new(5, &[1, 4, 0, 0]).unwrap()),
        ("GS-7", GgsGroup::new(7, &[1, 6, 0, 0, 0, 0]).unwrap()),
    ]
}

struct Ledger {
    lines: Vec<(bool, String)>,
}

impl Ledger {
    fn record(&mut self, id: u32, title: &str, ok: bool, detail: String) {
        let line = format!(
            "{} criterion {id:>2}: {title} ({detail})",
            if ok { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        self.lines.push((ok, line));
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn suites(name: &str, samples: usize, seed: u64) -> Vec<(&'static str, SuiteReport)> {
    groups()
        .into_iter()
        .map(|(label, g)| (label, run_suite(name, &g, samples, seed).unwrap()))
        .collect()
}

fn summary(reports: &[(&str, SuiteReport)]) -> (bool, String) {
    let ok = reports.iter().all(|(_, r)| r.is_success());
    let parts: Vec<String> = reports
        .iter()
        .map(|(label, r)| format!("{label} {}/{}", r.passed, r.samples))
        .collect();
    let mut detail = parts.join(", ");
    if let Some((label, f)) = reports
        .iter()
        .flat_map(|(l, r)| r.failures.iter().map(move |f| (l, f)))
        .next()
    {
        detail.push_str(&format!(
            "; first failure {label}: {} {}",
            f.input, f.reason
        ));
    }
    (ok, detail)
}

fn torsion_sweep(l: &mut Ledger) {
    let ((r3, r5), t) = timed(|| {
        let g3 = GgsGroup::gupta_sidki(3).unwrap();
        let g5 = GgsGroup::gupta_sidki(5).unwrap();
        (
            run_suite("torsion-criterion", &g3, 100, SEED).unwrap(),
            run_suite("torsion-criterion", &g5, 100, SEED).unwrap(),
        )
    });
    let torsion: Vec<&str> = r3
        .failures
        .iter()
        .map(|f| f.input.as_str())
        .collect::<Vec<_>>();
    let exact = r3.samples == 8 && r3.stats.get("torsion") == Some(&2);
    let ok = exact
        && r3.is_success()
        && r5.is_success()
        && r5.samples == 100
        && t < Duration::from_secs(1);
    l.record(
        1,
        "torsion criterion sweep",
        ok,
        format!(
            "p=3: {} torsion of {} vectors, p=5: {}/{} agree, {:?}{}",
            r3.stats.get("torsion").unwrap_or(&0),
            r3.samples,
            r5.passed,
            r5.samples,
            t,
            if torsion.is_empty() {
                String::new()
            } else {
                format!(", failing {torsion:?}")
            }
        ),
    );
}

fn gupta_sidki_structure(l: &mut Ledger) {
    let ((report, q1, ab2, ab3), t) = timed(|| {
        let g = GgsGroup::gupta_sidki(3).unwrap();
        let report = run_suite("quotient-structure", &g, 0, SEED).unwrap();
        let gens = [g.a(), g.b()];
        let q1 = quotient_group(&g, &gens, 1, DEFAULT_MAX_POINTS)
            .unwrap()
            .order();
        let ab = |n| {
            let q = quotient_group(&g, &gens, n, DEFAULT_MAX_POINTS).unwrap();
            q.order() / q.derived_subgroup().order()
        };
        (report, q1, ab(2), ab(3))
    });
    let ok = report.is_success()
        && q1 == BigUint::from(3u32)
        && ab2 == BigUint::from(9u32)
        && ab3 == BigUint::from(9u32)
        && t < Duration::from_secs(10);
    l.record(
        2,
        "Gupta-Sidki 3-group quotient structure",
        ok,
        format!(
            "|Q1| = {q1}, |G/G'| = {ab2} at level 2 and {ab3} at level 3, {}/{} checks, {t:?}",
            report.passed, report.samples
        ),
    );
}

fn length_inequalities(l: &mut Ledger) {
    let (reports, t) = timed(|| suites("length-inequalities", 1000, SEED));
    let (ok, detail) = summary(&reports);
    l.record(
        3,
        "length inequalities",
        ok && t < Duration::from_secs(10),
        format!("{detail}, {t:?}"),
    );
}

fn word_problem(l: &mut Ledger) {
    let (reports, t) = timed(|| suites("word-problem", 1000, SEED));
    let (ok, detail) = summary(&reports);
    let trivial: u64 = reports
        .iter()
        .map(|(_, r)| r.stats.get("trivial").copied().unwrap_or(0))
        .sum();
    l.record(
        4,
        "word problem agrees with level permutations",
        ok && trivial > 0 && t < Duration::from_secs(60),
        format!("{detail}, {trivial} trivial words, {t:?}"),
    );
}

fn torsion_witness(l: &mut Ledger) {
    let (reports, t) = timed(|| suites("order", 300, SEED));
    let (ok, detail) = summary(&reports);
    l.record(
        5,
        "orders are finite powers of p at cap 64",
        ok,
        format!("{detail}, {t:?}"),
    );
}

fn index_p(l: &mut Ledger) {
    let (reports, t) = timed(|| suites("index-p", 200, SEED));
    let (ok, detail) = summary(&reports);
    l.record(
        6,
        "stabilizer has index p in levels 2 and 3",
        ok,
        format!("{detail}, {t:?}"),
    );
}

fn dichotomy(l: &mut Ledger) {
    let (reports, t) = timed(|| suites("dichotomy", 500, SEED));
    let (ok, detail) = summary(&reports);
    l.record(7, "section dichotomy", ok, format!("{detail}, {t:?}"));
}

fn pipeline_bounds(l: &mut Ledger) {
    let (reports, t) = timed(|| suites("pipeline-bounds", 300, SEED));
    let (ok, detail) = summary(&reports);
    let steps: u64 = reports
        .iter()
        .map(|(_, r)| r.stats.get("steps").copied().unwrap_or(0))
        .sum();
    l.record(
        8,
        "reduction steps within their bounds",
        ok,
        format!("{detail}, {steps} steps, {t:?}"),
    );
}

fn certificates(l: &mut Ledger) {
    let (reports, t) = timed(|| suites("certify", 200, SEED));
    let (ok, detail) = summary(&reports);
    let total = |key: &str| -> u64 {
        reports
            .iter()
            .map(|(_, r)| r.stats.get(key).copied().unwrap_or(0))
            .sum()
    };
    let (accepted, mutations, rejected) = (
        total("accepted"),
        total("mutations"),
        total("mutations_rejected"),
    );
    l.record(
        9,
        "certify, check and mutation rejection",
        ok && accepted >= 500
            && mutations >= 1000
            && rejected == mutations
            && t < Duration::from_secs(600),
        format!("{detail}, {accepted} accepted, {rejected}/{mutations} mutations rejected, {t:?}"),
    );
}

fn reproducibility(l: &mut Ledger) {
    let mut same = true;
    let mut compared = 0;
    for (_, g) in groups().into_iter().take(2) {
        for name in ggslab::harness::SUITES {
            let once = run_suite(name, &g, 25, 7).unwrap().to_json();
            let twice = run_suite(name, &g, 25, 7).unwrap().to_json();
            same &= once == twice;
            compared += 1;
        }
    }
    let g = GgsGroup::gupta_sidki(3).unwrap();
    for words in [vec!["a b^2 a b", "b a"], vec!["b a b^2 a^2 b"]] {
        let h = SubgroupPresentation::parse(g.clone(), words.iter().copied()).unwrap();
        same &= serialize(&certify(&h).unwrap()) == serialize(&certify(&h).unwrap());
        compared += 1;
    }
    l.record(
        10,
        "reruns are byte-identical",
        same,
        format!("{compared} reports and certificates compared"),
    );
}

#[test]
fn acceptance() {
    let mut l = Ledger { lines: Vec::new() };
    torsion_sweep(&mut l);
    gupta_sidki_structure(&mut l);
    length_inequalities(&mut l);
    word_problem(&mut l);
    torsion_witness(&mut l);
    index_p(&mut l);
    dichotomy(&mut l);
    pipeline_bounds(&mut l);
    certificates(&mut l);
    reproducibility(&mut l);
    let failed: Vec<&String> = l
        .lines
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, s)| s)
        .collect();
    assert!(failed.is_empty(), "failing criteria:\n{failed:#?}");
}
