//! Seeded batch suites over random words and subgroups.
//!
//! Each suite draws its samples from per-sample ChaCha streams derived from
//! one seed, runs them in parallel, and merges the outcomes in sample order,
//! so a report depends only on `(suite, group, samples, seed)`.

pub mod random;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::{self, apply_mutation, check, mutation_sites};
use crate::error::{Error, Result};
use crate::group::GgsGroup;
use crate::quotient::{acts_trivially_on_level, quotient_group, TreeDomain, DEFAULT_MAX_POINTS};
use crate::reduction::{descend, project_to_length1, Target, DEFAULT_MAX_DEPTH};
use crate::subgroup::{classify, dichotomy_check, stab1_generators, Dichotomy, SubgroupType};
use crate::tree::Vertex;
use crate::word::Word;
use crate::word_problem::{order_exponent, WordProblem, DEFAULT_DEPTH_CAP};

use random::{any_presentation, bounded_word, presentation, sample_rng, stratified_word, Shape};

pub const SUITES: [&str; 9] = [
    "torsion-criterion",
    "quotient-structure",
    "length-inequalities",
    "word-problem",
    "order",
    "dichotomy",
    "index-p",
    "pipeline-bounds",
    "certify",
];

/// Failure exemplars kept per report.
pub const MAX_EXEMPLARS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub sample: usize,
    pub input: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub group: String,
    pub seed: u64,
    pub samples: usize,
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<Failure>,
    /// Suite-specific counters.
    pub stats: BTreeMap<String, u64>,
    #[serde(skip)]
    pub duration: Duration,
}

impl SuiteReport {
    pub fn is_success(&self) -> bool {
        self.failed == 0
    }

    /// Canonical JSON: sorted keys, two-space indentation, trailing newline.
    /// The wall-clock duration is left out so reruns are byte-identical.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("reports serialize");
        let mut text = serde_json::to_string_pretty(&value).expect("values serialize");
        text.push('\n');
        text
    }
}

/// One sample's result: the input it was drawn from, an error if a property
/// failed, and counters.
struct Sample {
    input: String,
    outcome: std::result::Result<(), String>,
    counts: Vec<(&'static str, u64)>,
}

impl Sample {
    fn new(input: impl Into<String>) -> Self {
        Sample {
            input: input.into(),
            outcome: Ok(()),
            counts: Vec::new(),
        }
    }

    fn count(&mut self, key: &'static str, n: u64) {
        self.counts.push((key, n));
    }

    fn require(&mut self, ok: bool, reason: impl FnOnce() -> String) {
        if ok || self.outcome.is_err() {
            return;
        }
        self.outcome = Err(reason());
    }

    fn fail(&mut self, reason: String) {
        self.require(false, || reason);
    }
}

/// Runs a named suite.
pub fn run_suite(name: &str, group: &GgsGroup, samples: usize, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let results: Vec<Sample> = match name {
        "torsion-criterion" => torsion_criterion(group.p(), samples, seed),
        "quotient-structure" => quotient_structure(group)?,
        "length-inequalities" => parallel(samples, seed, |rng, _| length_sample(group, rng)),
        "word-problem" => parallel(samples, seed, |rng, i| word_problem_sample(group, rng, i)),
        "order" => torsion_only(group, || {
            parallel(samples, seed, |rng, _| order_sample(group, rng))
        })?,
        "dichotomy" => torsion_only(group, || {
            parallel(samples, seed, |rng, _| dichotomy_sample(group, rng))
        })?,
        "index-p" => parallel(samples, seed, |rng, _| index_sample(group, rng)),
        "pipeline-bounds" => torsion_only(group, || {
            parallel(samples, seed, |rng, _| pipeline_sample(group, rng))
        })?,
        "certify" => torsion_only(group, || {
            parallel(samples, seed, |rng, _| certify_sample(group, rng))
        })?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    let mut report = SuiteReport {
        suite: name.to_string(),
        group: group.spec_string(),
        seed,
        samples: results.len(),
        passed: 0,
        failed: 0,
        failures: Vec::new(),
        stats: BTreeMap::new(),
        duration: Duration::ZERO,
    };
    for (i, s) in results.into_iter().enumerate() {
        for (key, n) in s.counts {
            *report.stats.entry(key.to_string()).or_default() += n;
        }
        match s.outcome {
            Ok(()) => report.passed += 1,
            Err(reason) => {
                report.failed += 1;
                if report.failures.len() < MAX_EXEMPLARS {
                    report.failures.push(Failure {
                        sample: i,
                        input: s.input,
                        reason,
                    });
                }
            }
        }
    }
    report.duration = start.elapsed();
    Ok(report)
}

fn torsion_only<F>(group: &GgsGroup, run: F) -> Result<Vec<Sample>>
where
    F: FnOnce() -> Vec<Sample>,
{
    if !group.is_torsion() {
        let p = group.p();
        return Err(Error::NotTorsion {
            p,
            sum: group.defining_vector().iter().sum::<u32>() % p,
        });
    }
    Ok(run())
}

fn parallel<F>(samples: usize, seed: u64, f: F) -> Vec<Sample>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, usize) -> Sample + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|i| f(&mut sample_rng(seed, i), i))
        .collect()
}

fn spell(words: &[Word]) -> String {
    let parts: Vec<String> = words
        .iter()
        .map(|w| format!("{:?}", w.to_string()))
        .collect();
    parts.join(", ")
}

fn is_power_of(mut n: BigUint, p: u32) -> bool {
    let p = BigUint::from(p);
    let zero = BigUint::from(0u32);
    while n > BigUint::from(1u32) {
        if &n % &p != zero {
            return false;
        }
        n /= &p;
    }
    n == BigUint::from(1u32)
}

// Every nonzero defining vector is classified by the criterion, then probed:
// random elements of a torsion group must have finite p-power order, and `ab`
// in a non-torsion group must not.
fn torsion_criterion(p: u32, samples: usize, seed: u64) -> Vec<Sample> {
    let total = (p as u64).pow(p - 1) - 1;
    let vectors: Vec<u64> = if total <= samples as u64 {
        (1..=total).collect()
    } else {
        (0..samples)
            .map(|i| sample_rng(seed, i).gen_range(1..=total))
            .collect()
    };
    vectors
        .into_par_iter()
        .enumerate()
        .map(|(i, code)| {
            let mut e = Vec::with_capacity(p as usize - 1);
            let mut c = code;
            for _ in 0..p - 1 {
                e.push((c % p as u64) as i64);
                c /= p as u64;
            }
            let group = GgsGroup::new(p as i64, &e).expect("nonzero vector");
            let mut s = Sample::new(group.spec_string());
            let torsion = group.is_torsion();
            s.count(if torsion { "torsion" } else { "non_torsion" }, 1);
            s.count("vectors", 1);
            if torsion {
                let mut rng = sample_rng(seed ^ 0x7015, i);
                for _ in 0..5 {
                    let g = stratified_word(&mut rng, p, 3);
                    if let Err(err) = order_exponent(&group, &g, DEFAULT_DEPTH_CAP) {
                        s.fail(format!("{g:?} has no finite order: {err}"));
                    }
                }
            } else {
                let ab = &group.a() * &group.b();
                let found = order_exponent(&group, &ab, DEFAULT_DEPTH_CAP);
                s.require(found.is_err(), || {
                    "a b has finite order in a group flagged non-torsion".to_string()
                });
            }
            s
        })
        .collect()
}

fn quotient_structure(group: &GgsGroup) -> Result<Vec<Sample>> {
    let p = group.p();
    let gens = [group.a(), group.b()];
    let mut out = Vec::new();
    let q1 = quotient_group(group, &gens, 1, DEFAULT_MAX_POINTS)?;
    let mut s = Sample::new("level 1: |G/Stab(L1)| = p");
    s.require(q1.order() == BigUint::from(p), || {
        format!("quotient order {}", q1.order())
    });
    out.push(s);
    let depth = (1..=3)
        .take_while(|&n| (p as u64).pow(n as u32) <= DEFAULT_MAX_POINTS)
        .last()
        .unwrap_or(1);
    for n in 1..=depth {
        let domain = TreeDomain::new(group, n, DEFAULT_MAX_POINTS)?;
        let level1 = domain.level_points(1);
        let mut level12 = level1.clone();
        if n >= 2 {
            level12.extend(domain.level_points(2));
        }
        let q = domain.group(&gens, &level12);
        let stab1 = q.pointwise_stabilizer(&level1);
        let b_closure = q.normal_closure(&[domain.permutation(&group.b())]);
        let mut s = Sample::new(format!("level {n}: normal closure of b = Stab(L1)"));
        s.require(
            b_closure.order() == stab1.order() && b_closure.is_subgroup_of(&stab1),
            || {
                format!(
                    "closure order {} vs stabilizer {}",
                    b_closure.order(),
                    stab1.order()
                )
            },
        );
        out.push(s);
        if n < 2 {
            continue;
        }
        let derived = q.derived_subgroup();
        let mut s = Sample::new(format!("level {n}: |G/G'| = p^2"));
        let quotient = q.order() / derived.order();
        s.require(quotient == BigUint::from(p * p), || {
            format!("abelianization order {quotient}")
        });
        out.push(s);
        let stab2 = q.pointwise_stabilizer(&level12);
        let mut s = Sample::new(format!("level {n}: Stab(L2) <= G' <= Stab(L1)"));
        s.require(stab2.is_subgroup_of(&derived), || {
            "level-2 stabilizer not inside the derived subgroup".to_string()
        });
        s.require(derived.is_subgroup_of(&stab1), || {
            "derived subgroup not inside the level-1 stabilizer".to_string()
        });
        out.push(s);
    }
    Ok(out)
}

fn length_sample(group: &GgsGroup, rng: &mut impl Rng) -> Sample {
    let p = group.p();
    let g = stratified_word(rng, p, 6);
    let mut s = Sample::new(format!("{:?}", g.to_string()));
    let (lambda, k) = (g.total_length(), g.b_length());
    s.count(
        if g.exponent_sums().0 == 0 {
            "alpha_zero"
        } else {
            "alpha_nonzero"
        },
        1,
    );
    if !g.is_identity() {
        s.require((2 * k).max(2) - 1 <= lambda && lambda <= 2 * k + 1, || {
            format!("total length {lambda} outside [2k-1, 2k+1] for k = {k}")
        });
    }
    let mut sum = 0;
    for u in 1..=p {
        let sec = group.first_level_section(&g, u);
        s.require(2 * sec.total_length() <= lambda + 1, || {
            format!(
                "section at {u} has total length {} > (λ+1)/2",
                sec.total_length()
            )
        });
        s.require(2 * sec.b_length() <= k + 1, || {
            format!("section at {u} has b-length {} > (|g|+1)/2", sec.b_length())
        });
        s.require(sec.total_length() <= k, || {
            format!(
                "section at {u} has total length {} > |g|",
                sec.total_length()
            )
        });
        sum += sec.b_length();
    }
    s.require(sum <= k, || format!("section b-lengths sum to {sum} > {k}"));
    s
}

// Random words for the nontrivial side; powers `x^ord(x)` and their cyclic
// rotations for the trivial side. The oracle depth follows the halving of
// total length under sections.
fn word_problem_sample(group: &GgsGroup, rng: &mut impl Rng, index: usize) -> Sample {
    let p = group.p();
    let g = if index % 4 == 3 && group.is_torsion() {
        relator(group, rng).unwrap_or_else(|| bounded_word(rng, p, 20))
    } else {
        bounded_word(rng, p, 20)
    };
    let mut s = Sample::new(format!("{:?}", g.to_string()));
    let lambda = g.total_length().max(2);
    let depth = (usize::BITS - (lambda - 1).leading_zeros()) as usize + 2;
    let trivial = WordProblem::new(group).is_trivial(&g);
    let oracle = acts_trivially_on_level(group, &g, depth);
    s.count(if trivial { "trivial" } else { "nontrivial" }, 1);
    s.require(trivial == oracle, || {
        format!("solver says {trivial}, level-{depth} action says {oracle}")
    });
    s
}

fn relator(group: &GgsGroup, rng: &mut impl Rng) -> Option<Word> {
    let p = group.p();
    for _ in 0..16 {
        let x = stratified_word(rng, p, 2);
        if x.is_identity() {
            continue;
        }
        let k = order_exponent(group, &x, DEFAULT_DEPTH_CAP).ok()?;
        let w = x.pow((p as i64).pow(k));
        if w.is_identity() || w.total_length() > 20 {
            continue;
        }
        let cut = rng.gen_range(0..=w.syllables().len());
        let (head, tail) = w.syllables().split_at(cut);
        let rotated = Word::from_powers(
            p,
            tail.iter().chain(head).map(|syl| (syl.gen, syl.exp as i64)),
        );
        if !rotated.is_identity() && rotated.total_length() <= 20 {
            return Some(rotated);
        }
    }
    None
}

fn order_sample(group: &GgsGroup, rng: &mut impl Rng) -> Sample {
    let p = group.p();
    let g = stratified_word(rng, p, 4);
    let mut s = Sample::new(format!("{:?}", g.to_string()));
    match order_exponent(group, &g, DEFAULT_DEPTH_CAP) {
        Ok(k) => {
            let mut solver = WordProblem::new(group);
            let n = (p as i64).pow(k);
            s.require(solver.is_trivial(&g.pow(n)), || {
                format!("g^{n} is not trivial")
            });
            if k > 0 {
                s.require(!solver.is_trivial(&g.pow(n / p as i64)), || {
                    format!("g^{} is already trivial", n / p as i64)
                });
            }
            s.require(is_power_of(BigUint::from(n as u64), p), || {
                format!("order {n} is not a power of {p}")
            });
            s.count("exponent_total", k as u64);
        }
        Err(err) => s.fail(format!("order failed: {err}")),
    }
    s
}

fn dichotomy_sample(group: &GgsGroup, rng: &mut impl Rng) -> Sample {
    let shape = if rng.gen_bool(0.5) {
        Shape::Full
    } else {
        Shape::TypeIII
    };
    let h = presentation(rng, group, 3, 4, shape);
    let mut s = Sample::new(spell(h.gens()));
    match dichotomy_check(&h) {
        Ok(Dichotomy::AllSectionsFull) => s.count("all_full", 1),
        Ok(Dichotomy::AllSectionsStabilize) => s.count("all_stabilize", 1),
        Ok(Dichotomy::Violation { first, second }) => {
            s.fail(format!("sections at {first} and {second} disagree"))
        }
        Err(err) => s.fail(err.to_string()),
    }
    s
}

fn index_sample(group: &GgsGroup, rng: &mut impl Rng) -> Sample {
    let p = group.p();
    let h = presentation(rng, group, 3, 4, Shape::TypeIII);
    let mut s = Sample::new(spell(h.gens()));
    let stab = stab1_generators(&h);
    s.require(matches!(classify(&h), SubgroupType::TypeIII(_)), || {
        "presentation is not of type III".to_string()
    });
    s.require(stab.presentation.stabilizes_first_level(), || {
        "a stabilizer generator moves the first level".to_string()
    });
    for n in 2..=3 {
        if (p as u64).pow(n as u32) > DEFAULT_MAX_POINTS {
            continue;
        }
        let image = |gens: &[Word]| quotient_group(group, gens, n, DEFAULT_MAX_POINTS);
        match (image(h.gens()), image(stab.presentation.gens())) {
            (Ok(big), Ok(small)) => {
                let index = small.index_in(&big);
                s.require(index == Some(BigUint::from(p)), || {
                    format!("index at level {n} is {index:?}, expected {p}")
                });
                s.count("levels_checked", 1);
            }
            (Err(err), _) | (_, Err(err)) => s.fail(err.to_string()),
        }
    }
    s
}

/// `2 ceil(log2(M + 1)) + 4`.
pub fn depth_allowance(m: usize) -> usize {
    2 * (usize::BITS - m.leading_zeros()) as usize + 4
}

fn pipeline_sample(group: &GgsGroup, rng: &mut impl Rng) -> Sample {
    let h = any_presentation(rng, group, 3, 4);
    let mut s = Sample::new(spell(h.gens()));
    match project_to_length1(&h) {
        Ok(projection) => {
            s.count("steps", projection.trace.steps.len() as u64);
            for step in &projection.trace.steps {
                s.require(step.within_bound(), || {
                    format!(
                        "{} at {:?}: {} > {}",
                        step.tag, step.vertex, step.output_max, step.allowed
                    )
                });
            }
            let allowance = depth_allowance(h.max_b_length());
            s.require(projection.level <= allowance, || {
                format!(
                    "reached b-length 1 at level {} > {allowance}",
                    projection.level
                )
            });
            let leaves: Vec<Vertex> = projection.transversal_report();
            s.require(crate::tree::is_transversal(group.p(), &leaves), || {
                "leaves do not form a transversal".to_string()
            });
            s.count("level_total", projection.level as u64);
        }
        Err(err) => s.fail(err.to_string()),
    }
    if let Err(err) = descend(&h, Target::TotalLength1, DEFAULT_MAX_DEPTH) {
        s.fail(format!("total-length descent: {err}"));
    }
    s
}

/// Mutations tried per certificate.
pub const MUTATIONS_PER_CERTIFICATE: usize = 2;

fn certify_sample(group: &GgsGroup, rng: &mut impl Rng) -> Sample {
    let h = any_presentation(rng, group, 3, 4);
    let mut s = Sample::new(spell(h.gens()));
    let cert = match certificate::certify(&h) {
        Ok(c) => c,
        Err(err) => {
            s.fail(format!("certify: {err}"));
            return s;
        }
    };
    let text = certificate::serialize(&cert);
    match certificate::deserialize(text.as_bytes()) {
        Ok(back) => s.require(back == cert, || "round trip changed the certificate".into()),
        Err(err) => s.fail(format!("round trip: {err}")),
    }
    let verdict = check(&cert);
    s.require(verdict.is_accept(), || {
        format!("honest certificate: {verdict}")
    });
    s.count("accepted", verdict.is_accept() as u64);
    let sites = mutation_sites(&cert);
    for _ in 0..MUTATIONS_PER_CERTIFICATE.min(sites.len()) {
        let m = &sites[rng.gen_range(0..sites.len())];
        s.count("mutations", 1);
        match apply_mutation(&cert, m) {
            Some(bad) if !check(&bad).is_accept() => s.count("mutations_rejected", 1),
            Some(_) => s.fail(format!("mutation {:?} at {} accepted", m.kind, m.pointer)),
            None => s.fail(format!(
                "mutation {:?} at {} not applicable",
                m.kind, m.pointer
            )),
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        let g = GgsGroup::gupta_sidki(3).unwrap();
        assert!(matches!(
            run_suite("nope", &g, 1, 0),
            Err(Error::UnknownSuite(_))
        ));
    }

    #[test]
    fn depth_allowance_values() {
        assert_eq!(depth_allowance(1), 6);
        assert_eq!(depth_allowance(3), 8);
        assert_eq!(depth_allowance(4), 10);
    }

    #[test]
    fn small_runs_pass() {
        let g = GgsGroup::gupta_sidki(3).unwrap();
        for name in SUITES {
            let r = run_suite(name, &g, 12, 1).unwrap();
            assert!(r.is_success(), "{}", r.to_json());
            assert_eq!(r.failures.is_empty(), r.failed == 0);
        }
    }
}
