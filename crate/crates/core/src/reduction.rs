//! Length reduction for finitely generated subgroups of torsion GGS groups.
//!
//! The driver walks down the tree. At each vertex it keeps a generating list
//! for `phi_v(Stab_H(v))` and picks one of the steps below by type and by the
//! largest b-length `M` of the list:
//!
//! | situation                          | step                                   | bound on the new lists   |
//! |------------------------------------|----------------------------------------|--------------------------|
//! | type II                            | sections of the generators             | `(M + 1) / 2`            |
//! | type III                           | shifted stabilizer generators          | `3M / 2`, or `(3M - 1) / 2` if the pivot is shorter than `M` |
//! | type III, two levels               | type III step then type II step        | `(3M + 2) / 4`           |
//! | type III, `M <= 2`, lengths `<= 3` | unshifted stabilizer generators        | `1` two levels down      |
//! | `M <= 1`                           | any of the above                       | `1`                      |
//!
//! Every bound is checked when the step is taken; a violation is an error,
//! never a silent fallback.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GgsGroup;
use crate::subgroup::{
    classify, inverse_mod, pivot_index, schreier_generators, Factorization, SubgroupPresentation,
    SubgroupType,
};
use crate::tree::{is_transversal, Vertex};
use crate::word::Word;

/// Deepest vertex the driver will visit before giving up.
pub const DEFAULT_MAX_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum StepTag {
    #[serde(rename = "TypeII-project")]
    TypeIIProject,
    #[serde(rename = "TypeIII-stab")]
    TypeIIIStab,
    #[serde(rename = "TypeIII-two-level")]
    TypeIIITwoLevel,
    #[serde(rename = "CaseIII-len2")]
    CaseIIILen2,
    #[serde(rename = "Length1-forever")]
    Length1Forever,
}

impl fmt::Display for StepTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepTag::TypeIIProject => "TypeII-project",
            StepTag::TypeIIIStab => "TypeIII-stab",
            StepTag::TypeIIITwoLevel => "TypeIII-two-level",
            StepTag::CaseIIILen2 => "CaseIII-len2",
            StepTag::Length1Forever => "Length1-forever",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub level: usize,
    pub vertex: String,
    pub tag: StepTag,
    /// Levels between the input lists and the output lists (1 or 2).
    pub span: usize,
    pub input_max: usize,
    pub output_max: usize,
    pub allowed: usize,
    pub input_gens: usize,
    pub output_gens: usize,
}

impl TraceStep {
    pub fn within_bound(&self) -> bool {
        self.output_max <= self.allowed
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub steps: Vec<TraceStep>,
}

impl ReductionTrace {
    fn record(&mut self, step: TraceStep) -> Result<()> {
        if !step.within_bound() {
            return Err(Error::BoundViolation {
                step: format!("{} at vertex {:?}", step.tag, step.vertex),
                found: step.output_max,
                allowed: step.allowed,
            });
        }
        self.steps.push(step);
        Ok(())
    }

    /// Sorts steps by level, then vertex, then tag.
    fn normalize(&mut self) {
        self.steps
            .sort_by(|x, y| (x.level, &x.vertex, x.span).cmp(&(y.level, &y.vertex, y.span)));
    }
}

/// Result of [`choose_power_shifts`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerShift {
    pub l1: i64,
    pub l2: i64,
    /// `x^{l1} y x^{l2}`.
    pub word: Word,
    /// Its section at the requested vertex.
    pub witness: Word,
}

/// Picks `l1 in {k1, k1 - p}`, `l2 in {k2, k2 - p}` minimizing the b-length
/// of `phi_v(x^{l1} y x^{l2})`, and checks it is at most
/// `(|y| + 1) / 2 + |x|`, strictly when `|x|` is odd.
pub fn choose_power_shifts(
    group: &GgsGroup,
    x: &Word,
    y: &Word,
    k1: u32,
    k2: u32,
    v: &Vertex,
) -> Result<PowerShift> {
    let p = group.p();
    let ax = group.root_permutation(x);
    if ax == 0 {
        return Err(Error::Precondition(format!(
            "x = {x} fixes the first level"
        )));
    }
    if k1 >= p || k2 >= p {
        return Err(Error::Precondition(format!(
            "exponents {k1}, {k2} outside 0..{p}"
        )));
    }
    if !((k1 + k2) * ax + group.root_permutation(y)).is_multiple_of(p) {
        return Err(Error::Precondition(format!(
            "x^{k1} y x^{k2} does not fix the first level"
        )));
    }
    if v.level() != 1 {
        return Err(Error::Precondition(format!(
            "vertex {v:?} is not on the first level"
        )));
    }
    let u = v.letters()[0];
    let (k1, k2, p) = (k1 as i64, k2 as i64, p as i64);
    let candidates = [(k1, k2), (k1, k2 - p), (k1 - p, k2), (k1 - p, k2 - p)];
    let best = candidates
        .iter()
        .map(|&(l1, l2)| {
            let word = &(&x.pow(l1) * y) * &x.pow(l2);
            let witness = group.first_level_section(&word, u);
            PowerShift {
                l1,
                l2,
                word,
                witness,
            }
        })
        .min_by_key(|s| s.witness.b_length())
        .expect("four candidates");
    let (bx, by, bw) = (x.b_length(), y.b_length(), best.witness.b_length());
    let ok = if bx % 2 == 1 {
        2 * bw < by + 1 + 2 * bx
    } else {
        2 * bw <= by + 1 + 2 * bx
    };
    if !ok {
        return Err(Error::BoundViolation {
            step: format!("power shifts for x = {x}, y = {y}"),
            found: bw,
            allowed: by.div_ceil(2) + bx,
        });
    }
    Ok(best)
}

/// Generators of `Stab_H(L1)` from the Reidemeister-Schreier set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizer {
    pub pivot: usize,
    pub gens: Vec<Word>,
    /// Each generator over the parent's generators.
    pub factorizations: Vec<Factorization>,
    /// The coset representatives `x^k`, `k = 0..p`, over the parent's
    /// generators.
    pub transversal: Vec<Factorization>,
}

/// One child of a descent: the level-one vertex `letter` below the parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub letter: u32,
    /// Stabilizing words whose sections at `letter` generate the child.
    pub witnesses: Vec<Word>,
    /// Each witness over the stabilizer generators (or over the parent's
    /// generators when there is no stabilizer step).
    pub witness_factors: Vec<Factorization>,
    /// Each stabilizer generator over the witnesses.
    pub cover: Vec<Factorization>,
    /// `sources[i]`: the witness whose section is child generator `i`.
    pub sources: Vec<usize>,
    pub node: ReductionNode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descent {
    pub stabilizer: Option<Stabilizer>,
    pub branches: Vec<Branch>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafKind {
    /// No generators.
    Trivial,
    Full,
    /// Generators all powers of `a`, or all powers of `b`.
    Finite,
    /// Generators of b-length at most one.
    Short,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Leaf(LeafKind),
    Descend(Descent),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionNode {
    pub vertex: Vertex,
    pub subgroup: SubgroupPresentation,
    pub kind: SubgroupType,
    pub outcome: Outcome,
}

impl ReductionNode {
    pub fn depth(&self) -> usize {
        match &self.outcome {
            Outcome::Leaf(_) => 0,
            Outcome::Descend(d) => 1 + d.branches.iter().map(|b| b.node.depth()).max().unwrap_or(0),
        }
    }

    /// Leaves in depth-first order, left to right.
    pub fn leaves(&self) -> Vec<&ReductionNode> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a ReductionNode>) {
        match &self.outcome {
            Outcome::Leaf(_) => out.push(self),
            Outcome::Descend(d) => d.branches.iter().for_each(|b| b.node.collect_leaves(out)),
        }
    }

    /// For every node, words in the root generators whose sections at that
    /// node's vertex are the node's generators (equal in the group), in
    /// depth-first order. Words grow quickly with depth.
    pub fn lifts(&self) -> Vec<(&ReductionNode, Vec<Word>)> {
        let mut out = Vec::new();
        self.collect_lifts(self.subgroup.gens().to_vec(), &mut out);
        out
    }

    fn collect_lifts<'a>(
        &'a self,
        lifts: Vec<Word>,
        out: &mut Vec<(&'a ReductionNode, Vec<Word>)>,
    ) {
        let p = self.subgroup.group().p();
        if let Outcome::Descend(d) = &self.outcome {
            let stab_lifts: Vec<Word> = match &d.stabilizer {
                Some(s) => s
                    .factorizations
                    .iter()
                    .map(|f| f.evaluate(&lifts, p).expect("factor indices in range"))
                    .collect(),
                None => lifts.clone(),
            };
            for b in &d.branches {
                let witness_lifts: Vec<Word> = b
                    .witness_factors
                    .iter()
                    .map(|f| f.evaluate(&stab_lifts, p).expect("factor indices in range"))
                    .collect();
                let child: Vec<Word> = b
                    .sources
                    .iter()
                    .map(|&i| witness_lifts[i].clone())
                    .collect();
                b.node.collect_lifts(child, out);
            }
        }
        out.push((self, lifts));
    }
}

/// How far the driver descends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// Stop once every generator has b-length at most one.
    BLength1,
    /// Continue until leaves are trivial, full, or generated by powers of a
    /// single generator.
    TotalLength1,
}

struct Driver {
    target: Target,
    max_depth: usize,
    trace: ReductionTrace,
}

/// The data of one first-level step, before the children are reduced.
struct StepData {
    stabilizer: Option<Stabilizer>,
    branches: Vec<(
        u32,
        Vec<Word>,
        Vec<Factorization>,
        Vec<Factorization>,
        Vec<usize>,
        SubgroupPresentation,
    )>,
}

impl StepData {
    fn output_max(&self) -> usize {
        self.branches
            .iter()
            .map(|b| b.5.max_b_length())
            .max()
            .unwrap_or(0)
    }

    fn output_gens(&self) -> usize {
        self.branches.iter().map(|b| b.5.gens().len()).sum()
    }
}

/// Sections of stabilizing witnesses at each first-level vertex.
fn branches_from_witnesses(
    group: &GgsGroup,
    per_vertex: Vec<(Vec<Word>, Vec<Factorization>, Vec<Factorization>)>,
) -> StepData {
    let branches = per_vertex
        .into_iter()
        .zip(1..=group.p())
        .map(|((witnesses, factors, cover), u)| {
            let mut gens: Vec<Word> = Vec::new();
            let mut sources = Vec::new();
            for (i, w) in witnesses.iter().enumerate() {
                let s = group.first_level_section(w, u);
                if !s.is_identity() && !gens.contains(&s) {
                    gens.push(s);
                    sources.push(i);
                }
            }
            let child = SubgroupPresentation::new(group.clone(), gens);
            (u, witnesses, factors, cover, sources, child)
        })
        .collect();
    StepData {
        stabilizer: None,
        branches,
    }
}

fn type2_step(h: &SubgroupPresentation) -> StepData {
    let n = h.gens().len();
    let ids: Vec<Factorization> = (0..n).map(Factorization::single).collect();
    let per_vertex = (0..h.group().p())
        .map(|_| (h.gens().to_vec(), ids.clone(), ids.clone()))
        .collect();
    branches_from_witnesses(h.group(), per_vertex)
}

/// The stabilizer step for a type III list. With `shifted`, each element
/// `x^{k1} y x^{k2}` is replaced per vertex by the shift chosen by
/// [`choose_power_shifts`]; otherwise the unshifted elements are used.
fn type3_step(h: &SubgroupPresentation, shifted: bool) -> Result<StepData> {
    let group = h.group();
    let p = group.p();
    let pivot = pivot_index(p, h.gens())
        .ok_or_else(|| Error::Precondition("no generator moves the first level".to_string()))?;
    let x = &h.gens()[pivot];
    let ax = group.root_permutation(x);
    let ax_inv = inverse_mod(ax, p);
    let (k_gens, k_factors) = schreier_generators(h, pivot)?;
    let index_of: HashMap<&Word, usize> = k_gens.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let xp = x.pow(p as i64);
    let xp_index = index_of.get(&xp).copied();
    if !xp.is_identity() && xp_index.is_none() {
        return Err(Error::Precondition(format!(
            "{xp} missing from the Schreier set"
        )));
    }
    let transversal = (0..p as i64)
        .map(|k| {
            let mut f = Factorization::default();
            f.push(pivot, k);
            f
        })
        .collect();

    // The tuples (y, k1) with y != x, their S' exponent k2 and the
    // Reidemeister-Schreier generator they come from.
    struct Tuple {
        y: usize,
        k1: u32,
        k2: u32,
        schreier: Option<usize>,
    }
    let mut tuples = Vec::new();
    for (iy, y) in h.gens().iter().enumerate() {
        if iy == pivot {
            continue;
        }
        let ay = group.root_permutation(y);
        for k1 in 0..p {
            let s = (k1 * ax + ay) % p;
            let k2 = (p - s) % p * ax_inv % p;
            let k2_rs = s * ax_inv % p;
            let rs = &(&x.pow(k1 as i64) * y) * &x.pow(-(k2_rs as i64));
            tuples.push(Tuple {
                y: iy,
                k1,
                k2,
                schreier: index_of.get(&rs).copied(),
            });
        }
    }

    let mut per_vertex = Vec::new();
    for u in 1..=p {
        let v = Vertex::child_of_root(p, u);
        let mut witnesses: Vec<Word> = Vec::new();
        let mut factors: Vec<Factorization> = Vec::new();
        let mut cover: Vec<Option<Factorization>> = vec![None; k_gens.len()];
        if let Some(i) = xp_index {
            witnesses.push(xp.clone());
            factors.push(Factorization::single(i));
            cover[i] = Some(Factorization::single(0));
        }
        for t in &tuples {
            let y = &h.gens()[t.y];
            let (l1, l2, word) = if shifted {
                let s = choose_power_shifts(group, x, y, t.k1, t.k2, &v)?;
                (s.l1, s.l2, s.word)
            } else {
                let (l1, l2) = (t.k1 as i64, t.k2 as i64);
                (l1, l2, &(&x.pow(l1) * y) * &x.pow(l2))
            };
            // word = x^{l1 - k1} . rs . x^{e p}, with rs = x^{k1} y x^{-k2_rs}.
            let prefix = if l1 != t.k1 as i64 { -1 } else { 0 };
            let k2_rs = (p - t.k2) % p;
            let suffix = (l2 + k2_rs as i64) / p as i64;
            let mut f = Factorization::default();
            if let Some(i) = xp_index {
                f.push(i, prefix);
            }
            if let Some(j) = t.schreier {
                f.push(j, 1);
            }
            if let Some(i) = xp_index {
                f.push(i, suffix);
            }
            let w_index = match witnesses.iter().position(|w| *w == word) {
                Some(i) => Some(i),
                None if word.is_identity() => None,
                None => {
                    witnesses.push(word);
                    factors.push(f);
                    Some(witnesses.len() - 1)
                }
            };
            if let Some(j) = t.schreier {
                if cover[j].is_none() {
                    // rs = x^{-(l1 - k1)} word x^{-e p}; x^p is witness 0.
                    // When x^p is the empty word the shifts vanish.
                    let shift = if xp_index.is_some() { 1 } else { 0 };
                    let mut c = Factorization::default();
                    c.push(0, -prefix * shift);
                    if let Some(w) = w_index {
                        c.push(w, 1);
                    }
                    c.push(0, -suffix * shift);
                    cover[j] = Some(c);
                }
            }
        }
        let cover = cover
            .into_iter()
            .enumerate()
            .map(|(j, c)| {
                c.ok_or_else(|| {
                    Error::Precondition(format!("Schreier generator {} has no source", k_gens[j]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        per_vertex.push((witnesses, factors, cover));
    }
    let mut data = branches_from_witnesses(group, per_vertex);
    data.stabilizer = Some(Stabilizer {
        pivot,
        gens: k_gens,
        factorizations: k_factors,
        transversal,
    });
    Ok(data)
}

/// Offsets `0, a_x, .., k1 a_x, k1 a_x + a_y, .., k1 a_x + a_y + k2 a_x`
/// repeat each residue at most twice.
fn check_offset_counts(p: u32, ax: u32, ay: u32, k1: u32, k2: u32) -> Result<()> {
    let mut counts = vec![0usize; p as usize];
    for i in 0..=k1 {
        counts[(i * ax % p) as usize] += 1;
    }
    let base = k1 * ax + ay;
    for i in 0..=k2 {
        counts[((base + i * ax) % p) as usize] += 1;
    }
    let worst = counts.into_iter().max().unwrap_or(0);
    if worst > 2 {
        return Err(Error::BoundViolation {
            step: "CaseIII-len2 offset count".to_string(),
            found: worst,
            allowed: 2,
        });
    }
    Ok(())
}

fn type3_allowed(m: usize, pivot_len: usize) -> usize {
    if pivot_len < m {
        (3 * m).saturating_sub(1) / 2
    } else {
        3 * m / 2
    }
}

fn case3_eligible(h: &SubgroupPresentation) -> bool {
    h.gens()
        .iter()
        .all(|g| g.b_length() <= 2 && g.total_length() <= 3)
}

impl Driver {
    fn leaf(&self, h: &SubgroupPresentation, kind: SubgroupType) -> Option<LeafKind> {
        if h.is_empty() {
            return Some(LeafKind::Trivial);
        }
        if kind == SubgroupType::FullGroup {
            return Some(LeafKind::Full);
        }
        match self.target {
            Target::BLength1 if h.max_b_length() <= 1 => Some(LeafKind::Short),
            Target::TotalLength1 if h.max_total_length() <= 1 => Some(LeafKind::Finite),
            _ => None,
        }
    }

    fn step(
        &self,
        vertex: &Vertex,
        tag: StepTag,
        span: usize,
        h: &SubgroupPresentation,
        out_max: usize,
        allowed: usize,
        out_gens: usize,
    ) -> TraceStep {
        TraceStep {
            level: vertex.level(),
            vertex: vertex.to_string(),
            tag,
            span,
            input_max: h.max_b_length(),
            output_max: out_max,
            allowed,
            input_gens: h.gens().len(),
            output_gens: out_gens,
        }
    }

    fn node(&mut self, h: SubgroupPresentation, vertex: Vertex) -> Result<ReductionNode> {
        let kind = classify(&h);
        if let Some(leaf) = self.leaf(&h, kind) {
            return Ok(ReductionNode {
                vertex,
                subgroup: h,
                kind,
                outcome: Outcome::Leaf(leaf),
            });
        }
        if vertex.level() >= self.max_depth {
            return Err(Error::DepthCapExceeded {
                cap: self.max_depth,
            });
        }
        let m = h.max_b_length();
        let descent = match kind {
            SubgroupType::FullGroup => unreachable!("full subgroups are leaves"),
            SubgroupType::TypeII(_) => {
                let data = type2_step(&h);
                let (tag, allowed) = if m <= 1 {
                    (StepTag::Length1Forever, 1)
                } else {
                    (StepTag::TypeIIProject, m.div_ceil(2))
                };
                let step = self.step(
                    &vertex,
                    tag,
                    1,
                    &h,
                    data.output_max(),
                    allowed,
                    data.output_gens(),
                );
                self.trace.record(step)?;
                self.children(data, &vertex)?
            }
            SubgroupType::TypeIII(_) => {
                let pivot_len =
                    h.gens()[pivot_index(h.group().p(), h.gens()).expect("type III")].b_length();
                if m <= 1 {
                    let data = type3_step(&h, true)?;
                    let step = self.step(
                        &vertex,
                        StepTag::Length1Forever,
                        1,
                        &h,
                        data.output_max(),
                        1,
                        data.output_gens(),
                    );
                    self.trace.record(step)?;
                    self.children(data, &vertex)?
                } else if m == 2 && case3_eligible(&h) {
                    let shifted = pivot_len < 2;
                    let data = if shifted {
                        type3_step(&h, true)?
                    } else {
                        check_case3_offsets(&h)?;
                        type3_step(&h, false)?
                    };
                    let tag = if shifted {
                        StepTag::TypeIIIStab
                    } else {
                        StepTag::CaseIIILen2
                    };
                    let step = self.step(
                        &vertex,
                        tag,
                        1,
                        &h,
                        data.output_max(),
                        2,
                        data.output_gens(),
                    );
                    self.trace.record(step)?;
                    let descent = self.children(data, &vertex)?;
                    let reached = self.second_level_max(&descent)?;
                    let step = self.step(&vertex, StepTag::CaseIIILen2, 2, &h, reached, 1, 0);
                    self.trace.record(step)?;
                    descent
                } else {
                    let data = type3_step(&h, true)?;
                    let step = self.step(
                        &vertex,
                        StepTag::TypeIIIStab,
                        1,
                        &h,
                        data.output_max(),
                        type3_allowed(m, pivot_len),
                        data.output_gens(),
                    );
                    self.trace.record(step)?;
                    let descent = self.children(data, &vertex)?;
                    let reached = self.second_level_max(&descent)?;
                    let step = self.step(
                        &vertex,
                        StepTag::TypeIIITwoLevel,
                        2,
                        &h,
                        reached,
                        (3 * m + 2) / 4,
                        0,
                    );
                    self.trace.record(step)?;
                    descent
                }
            }
        };
        Ok(ReductionNode {
            vertex,
            subgroup: h,
            kind,
            outcome: Outcome::Descend(descent),
        })
    }

    /// Largest b-length among generators two levels below a type III step.
    /// Children must be full or stabilize the first level.
    fn second_level_max(&self, descent: &Descent) -> Result<usize> {
        let mut worst = 0;
        for b in &descent.branches {
            let node = &b.node;
            match (&node.outcome, node.kind) {
                (Outcome::Leaf(_), SubgroupType::FullGroup) => worst = worst.max(1),
                (_, SubgroupType::TypeIII(_)) => {
                    return Err(Error::Precondition(format!(
                        "section at {:?} is neither full nor inside the first-level stabilizer",
                        node.vertex.to_string()
                    )))
                }
                (Outcome::Leaf(_), _) => {
                    worst = worst.max(node.subgroup.max_b_length().div_ceil(2))
                }
                (Outcome::Descend(d), _) => {
                    for c in &d.branches {
                        worst = worst.max(c.node.subgroup.max_b_length());
                    }
                }
            }
        }
        Ok(worst)
    }

    fn children(&mut self, data: StepData, vertex: &Vertex) -> Result<Descent> {
        let mut branches = Vec::with_capacity(data.branches.len());
        for (letter, witnesses, witness_factors, cover, sources, child) in data.branches {
            let node = self.node(child, vertex.child(letter))?;
            branches.push(Branch {
                letter,
                witnesses,
                witness_factors,
                cover,
                sources,
                node,
            });
        }
        Ok(Descent {
            stabilizer: data.stabilizer,
            branches,
        })
    }
}

fn check_case3_offsets(h: &SubgroupPresentation) -> Result<()> {
    let p = h.group().p();
    let x = &h.gens()[pivot_index(p, h.gens()).expect("type III")];
    let ax = x.exponent_sums().0;
    for y in h.gens() {
        let ay = y.exponent_sums().0;
        for k1 in 0..p {
            let k2 = (p - (k1 * ax + ay) % p) % p * inverse_mod(ax, p) % p;
            check_offset_counts(p, ax, ay, k1, k2)?;
        }
    }
    Ok(())
}

/// Runs the driver from the root. Requires a torsion group.
pub fn descend(
    h: &SubgroupPresentation,
    target: Target,
    max_depth: usize,
) -> Result<(ReductionNode, ReductionTrace)> {
    let group = h.group();
    if !group.is_torsion() {
        let p = group.p();
        return Err(Error::NotTorsion {
            p,
            sum: group.defining_vector().iter().sum::<u32>() % p,
        });
    }
    let mut driver = Driver {
        target,
        max_depth,
        trace: ReductionTrace::default(),
    };
    let root = driver.node(h.clone(), Vertex::root(group.p()))?;
    let mut trace = driver.trace;
    trace.normalize();
    Ok((root, trace))
}

/// Outcome of [`project_to_length1`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    /// Depth of the deepest leaf.
    pub level: usize,
    pub tree: ReductionNode,
    pub trace: ReductionTrace,
}

impl Projection {
    /// The leaf vertices; they form a transversal of the tree.
    pub fn transversal_report(&self) -> Vec<Vertex> {
        self.tree
            .leaves()
            .iter()
            .map(|n| n.vertex.clone())
            .collect()
    }

    pub fn leaves(&self) -> Vec<(Vertex, SubgroupPresentation)> {
        self.tree
            .leaves()
            .into_iter()
            .map(|n| (n.vertex.clone(), n.subgroup.clone()))
            .collect()
    }

    /// Generating lists for every vertex of level [`Projection::level`],
    /// pushing shallower leaves down with b-length-one steps. Leaves whose
    /// image spans the abelianization are listed as `<a, b>`.
    pub fn level_sections(&self) -> Result<Vec<(Vertex, SubgroupPresentation)>> {
        let mut out = Vec::new();
        for (v, h) in self.leaves() {
            push_down(v, h, self.level, &mut out)?;
        }
        Ok(out)
    }
}

fn push_down(
    v: Vertex,
    h: SubgroupPresentation,
    level: usize,
    out: &mut Vec<(Vertex, SubgroupPresentation)>,
) -> Result<()> {
    let kind = classify(&h);
    if v.level() >= level {
        let h = match kind {
            SubgroupType::FullGroup => SubgroupPresentation::whole_group(h.group().clone()),
            _ => h,
        };
        out.push((v, h));
        return Ok(());
    }
    let children: Vec<SubgroupPresentation> = match kind {
        SubgroupType::FullGroup => (0..h.group().p())
            .map(|_| SubgroupPresentation::whole_group(h.group().clone()))
            .collect(),
        _ if h.is_empty() => (0..h.group().p()).map(|_| h.clone()).collect(),
        SubgroupType::TypeII(_) => type2_step(&h).branches.into_iter().map(|b| b.5).collect(),
        SubgroupType::TypeIII(_) => type3_step(&h, true)?
            .branches
            .into_iter()
            .map(|b| b.5)
            .collect(),
    };
    for (u, child) in (1..=h.group().p()).zip(children) {
        if child.max_b_length() > 1 {
            return Err(Error::BoundViolation {
                step: format!("{} at vertex {:?}", StepTag::Length1Forever, v.to_string()),
                found: child.max_b_length(),
                allowed: 1,
            });
        }
        push_down(v.child(u), child, level, out)?;
    }
    Ok(())
}

/// Descends until every section subgroup is generated by words of b-length
/// at most one.
pub fn project_to_length1(h: &SubgroupPresentation) -> Result<Projection> {
    let (tree, trace) = descend(h, Target::BLength1, DEFAULT_MAX_DEPTH)?;
    let level = tree.depth();
    let projection = Projection { level, tree, trace };
    debug_assert!(is_transversal(
        h.group().p(),
        &projection.transversal_report()
    ));
    Ok(projection)
}

fn require_kind(
    h: &SubgroupPresentation,
    want: fn(SubgroupType) -> bool,
    name: &str,
) -> Result<()> {
    let kind = classify(h);
    if want(kind) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "expected a {name} subgroup, found {kind}"
        )))
    }
}

fn as_map(h: &SubgroupPresentation, data: StepData) -> Vec<(Vertex, SubgroupPresentation)> {
    let p = h.group().p();
    data.branches
        .into_iter()
        .map(|b| (Vertex::child_of_root(p, b.0), b.5))
        .collect()
}

/// Sections of a type II list at each first-level vertex.
pub fn reduce_type2(h: &SubgroupPresentation) -> Result<Vec<(Vertex, SubgroupPresentation)>> {
    require_kind(h, |k| matches!(k, SubgroupType::TypeII(_)), "type II")?;
    let data = type2_step(h);
    let m = h.max_b_length();
    if data.output_max() > m.div_ceil(2) {
        return Err(Error::BoundViolation {
            step: StepTag::TypeIIProject.to_string(),
            found: data.output_max(),
            allowed: m.div_ceil(2),
        });
    }
    Ok(as_map(h, data))
}

/// Generators of `phi_v(Stab_H(v))` for a type III list, from shifted
/// stabilizer generators.
pub fn reduce_type3(h: &SubgroupPresentation) -> Result<Vec<(Vertex, SubgroupPresentation)>> {
    require_kind(h, |k| matches!(k, SubgroupType::TypeIII(_)), "type III")?;
    let data = type3_step(h, true)?;
    let m = h.max_b_length();
    let pivot = &h.gens()[pivot_index(h.group().p(), h.gens()).expect("type III")];
    let allowed = type3_allowed(m, pivot.b_length());
    if data.output_max() > allowed {
        return Err(Error::BoundViolation {
            step: StepTag::TypeIIIStab.to_string(),
            found: data.output_max(),
            allowed,
        });
    }
    Ok(as_map(h, data))
}

/// Generators of `phi_w(Stab_H(w))` for every second-level `w`, for a type
/// III list of words with b-length at most two and total length at most
/// three. All outputs have b-length at most one.
pub fn reduce_case3_len2(h: &SubgroupPresentation) -> Result<Vec<(Vertex, SubgroupPresentation)>> {
    require_kind(h, |k| matches!(k, SubgroupType::TypeIII(_)), "type III")?;
    if !case3_eligible(h) {
        return Err(Error::Precondition(
            "generators must have b-length at most 2 and total length at most 3".to_string(),
        ));
    }
    if !h.group().is_torsion() {
        return Err(Error::Precondition(format!("{} is not torsion", h.group())));
    }
    let p = h.group().p();
    let pivot = &h.gens()[pivot_index(p, h.gens()).expect("type III")];
    let data = if pivot.b_length() < 2 {
        type3_step(h, true)?
    } else {
        check_case3_offsets(h)?;
        type3_step(h, false)?
    };
    if data.output_max() > 2 {
        return Err(Error::BoundViolation {
            step: StepTag::CaseIIILen2.to_string(),
            found: data.output_max(),
            allowed: 2,
        });
    }
    let mut out = Vec::new();
    for (v, child) in as_map(h, data) {
        let kind = classify(&child);
        let grand: Vec<(Vertex, SubgroupPresentation)> = match kind {
            SubgroupType::FullGroup => (1..=p)
                .map(|u| {
                    (
                        v.child(u),
                        SubgroupPresentation::whole_group(h.group().clone()),
                    )
                })
                .collect(),
            SubgroupType::TypeII(_) => as_map(&child, type2_step(&child))
                .into_iter()
                .map(|(u, s)| (v.concat(&u), s))
                .collect(),
            SubgroupType::TypeIII(_) => {
                return Err(Error::Precondition(format!(
                    "section at {:?} is neither full nor inside the first-level stabilizer",
                    v.to_string()
                )))
            }
        };
        for (w, s) in grand {
            if s.max_b_length() > 1 {
                return Err(Error::BoundViolation {
                    step: StepTag::CaseIIILen2.to_string(),
                    found: s.max_b_length(),
                    allowed: 1,
                });
            }
            out.push((w, s));
        }
    }
    Ok(out)
}
