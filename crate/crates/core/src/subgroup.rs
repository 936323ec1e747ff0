//! Finitely generated subgroups given by generating words.
//!
//! Classification uses the abelianization `G/G' = C_p x C_p`, where a word
//! maps to its exponent sums `(alpha, beta)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::group::GgsGroup;
use crate::tree::Vertex;
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubgroupPresentation {
    group: GgsGroup,
    gens: Vec<Word>,
}

impl SubgroupPresentation {
    /// Identity words are dropped and duplicates collapsed.
    pub fn new(group: GgsGroup, gens: impl IntoIterator<Item = Word>) -> Self {
        let gens = Word::prune(gens);
        SubgroupPresentation { group, gens }
    }

    /// Parses one word per entry.
    pub fn parse<'a>(group: GgsGroup, words: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let gens = words
            .into_iter()
            .map(|w| group.parse_word(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(SubgroupPresentation::new(group, gens))
    }

    pub fn whole_group(group: GgsGroup) -> Self {
        let gens = vec![group.a(), group.b()];
        SubgroupPresentation::new(group, gens)
    }

    pub fn group(&self) -> &GgsGroup {
        &self.group
    }

    pub fn gens(&self) -> &[Word] {
        &self.gens
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Largest b-length among the generators, 0 for the empty list.
    pub fn max_b_length(&self) -> usize {
        self.gens.iter().map(Word::b_length).max().unwrap_or(0)
    }

    pub fn max_total_length(&self) -> usize {
        self.gens.iter().map(Word::total_length).max().unwrap_or(0)
    }

    pub fn stabilizes_first_level(&self) -> bool {
        self.gens
            .iter()
            .all(|g| self.group.root_permutation(g) == 0)
    }
}

impl fmt::Display for SubgroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.gens.iter().map(|g| format!("{g}")).collect();
        write!(f, "<{}>", gens.join(", "))
    }
}

/// A word written as a product `gens[i_1]^{e_1} .. gens[i_k]^{e_k}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Factorization(pub Vec<(usize, i64)>);

impl Factorization {
    pub fn single(index: usize) -> Self {
        Factorization(vec![(index, 1)])
    }

    /// Appends a factor, skipping zero exponents.
    pub fn push(&mut self, index: usize, exp: i64) {
        if exp != 0 {
            self.0.push((index, exp));
        }
    }

    pub fn factors(&self) -> &[(usize, i64)] {
        &self.0
    }

    /// Multiplies out the factors; `None` if an index is out of range.
    pub fn evaluate(&self, gens: &[Word], p: u32) -> Option<Word> {
        let mut out = Word::identity(p);
        for &(i, e) in &self.0 {
            let g = gens.get(i)?;
            if g.modulus() != p {
                return None;
            }
            out = &out * &g.pow(e);
        }
        Some(out)
    }

    /// Substitutes a factorization for each generator.
    pub fn compose(&self, inner: &[Factorization]) -> Factorization {
        let mut out = Factorization::default();
        for &(i, e) in &self.0 {
            let f = &inner[i];
            for _ in 0..e.unsigned_abs() {
                if e > 0 {
                    out.0.extend(f.0.iter().copied());
                } else {
                    out.0.extend(f.0.iter().rev().map(|&(j, d)| (j, -d)));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubgroupType {
    FullGroup,
    TypeII(u32),
    TypeIII(u32),
}

impl fmt::Display for SubgroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupType::FullGroup => f.write_str("full"),
            SubgroupType::TypeII(j) => write!(f, "type II (j = {j})"),
            SubgroupType::TypeIII(j) => write!(f, "type III (j = {j})"),
        }
    }
}

pub(crate) fn inverse_mod(x: u32, p: u32) -> u32 {
    let (mut result, mut base, mut e) = (1u64, x as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Image of `H G'` in `C_p x C_p`.
pub fn classify(h: &SubgroupPresentation) -> SubgroupType {
    classify_words(h.group.p(), &h.gens)
}

pub fn classify_words(p: u32, gens: &[Word]) -> SubgroupType {
    let images: Vec<(u32, u32)> = gens
        .iter()
        .map(Word::exponent_sums)
        .filter(|&v| v != (0, 0))
        .collect();
    let Some(&(a0, b0)) = images.first() else {
        return SubgroupType::TypeII(0);
    };
    let independent = images
        .iter()
        .any(|&(a, b)| (a as i64 * b0 as i64 - b as i64 * a0 as i64).rem_euclid(p as i64) != 0);
    if independent {
        return SubgroupType::FullGroup;
    }
    if a0 == 0 {
        SubgroupType::TypeII(1)
    } else {
        SubgroupType::TypeIII(b0 * inverse_mod(a0, p) % p)
    }
}

/// Index of the pivot `x` for a type III list: among generators with
/// `alpha != 0`, the one of least b-length, ties broken by normal form.
pub fn pivot_index(p: u32, gens: &[Word]) -> Option<usize> {
    gens.iter()
        .enumerate()
        .filter(|(_, g)| g.exponent_sums().0 % p != 0)
        .min_by(|(_, x), (_, y)| x.b_length().cmp(&y.b_length()).then_with(|| x.cmp(y)))
        .map(|(i, _)| i)
}

/// Generators of `Stab_H(L1)` with their factorizations over `H`'s list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGenerators {
    pub presentation: SubgroupPresentation,
    /// `None` only for the full group, whose stabilizer is listed as the
    /// conjugates of `b`.
    pub factorizations: Option<Vec<Factorization>>,
    pub pivot: Option<usize>,
}

/// `x^{k1} y x^{k2}` with `k1 alpha_x + alpha_y + k2 alpha_x = 0`, one entry
/// per `(y, k1)`, together with the factorization.
fn pivot_products(
    h: &SubgroupPresentation,
    x_index: usize,
    sign: i64,
) -> Vec<(Word, Factorization)> {
    let p = h.group.p();
    let x = &h.gens[x_index];
    let ax = x.exponent_sums().0;
    let ax_inv = inverse_mod(ax, p) as u64;
    let mut out = Vec::new();
    for (iy, y) in h.gens.iter().enumerate() {
        let ay = y.exponent_sums().0 as u64;
        for k1 in 0..p as u64 {
            let s = (k1 * ax as u64 + ay) % p as u64;
            // sign = 1: k2 alpha_x = -s; sign = -1: k2 alpha_x = s.
            let k2 = if sign > 0 {
                (p as u64 - s) % p as u64 * ax_inv % p as u64
            } else {
                s * ax_inv % p as u64
            };
            let word = &(&x.pow(k1 as i64) * y) * &x.pow(sign * k2 as i64);
            let mut f = Factorization::default();
            f.push(x_index, k1 as i64);
            f.push(iy, 1);
            f.push(x_index, sign * k2 as i64);
            out.push((word, f));
        }
    }
    out
}

fn dedupe(items: Vec<(Word, Factorization)>) -> (Vec<Word>, Vec<Factorization>) {
    let mut words = Vec::new();
    let mut facts = Vec::new();
    for (w, f) in items {
        if !w.is_identity() && !words.contains(&w) {
            words.push(w);
            facts.push(f);
        }
    }
    (words, facts)
}

/// Generators of the first-level stabilizer of `H`.
pub fn stab1_generators(h: &SubgroupPresentation) -> StabilizerGenerators {
    let p = h.group.p();
    match classify(h) {
        SubgroupType::FullGroup => {
            let gens = (0..p as i64).map(|i| {
                let c = Word::a(p, i);
                &(&c * &h.group.b()) * &c.inverse()
            });
            StabilizerGenerators {
                presentation: SubgroupPresentation::new(h.group.clone(), gens),
                factorizations: None,
                pivot: None,
            }
        }
        SubgroupType::TypeII(_) => StabilizerGenerators {
            presentation: h.clone(),
            factorizations: Some((0..h.gens.len()).map(Factorization::single).collect()),
            pivot: None,
        },
        SubgroupType::TypeIII(_) => {
            let x = pivot_index(p, &h.gens).expect("type III has a generator off the stabilizer");
            let (words, facts) = dedupe(pivot_products(h, x, 1));
            StabilizerGenerators {
                presentation: SubgroupPresentation {
                    group: h.group.clone(),
                    gens: words,
                },
                factorizations: Some(facts),
                pivot: Some(x),
            }
        }
    }
}

/// The Reidemeister-Schreier set `{x^{k1} y x^{-k2}}` for the transversal
/// `{x^k : 0 <= k < p}`, deduplicated, with factorizations.
pub fn schreier_generators(
    h: &SubgroupPresentation,
    x_index: usize,
) -> Result<(Vec<Word>, Vec<Factorization>)> {
    let x = h
        .gens
        .get(x_index)
        .ok_or_else(|| Error::Precondition(format!("no generator at index {x_index}")))?;
    if x.exponent_sums().0 == 0 {
        return Err(Error::Precondition(format!(
            "pivot {x} fixes the first level"
        )));
    }
    Ok(dedupe(pivot_products(h, x_index, -1)))
}

/// `phi_v(Stab_H(v))` for a level-one vertex `v`, from the stabilizer
/// generators.
pub fn section_subgroup(h: &SubgroupPresentation, v: &Vertex) -> Result<SubgroupPresentation> {
    if v.level() != 1 {
        return Err(Error::Precondition(format!(
            "vertex {v:?} is not on the first level"
        )));
    }
    let stab = stab1_generators(h);
    Ok(sections_of(&stab.presentation, v.letters()[0]))
}

/// Sections at `u` of a list of stabilizing words.
pub fn sections_of(k: &SubgroupPresentation, u: u32) -> SubgroupPresentation {
    let gens = k.gens.iter().map(|g| k.group.first_level_section(g, u));
    SubgroupPresentation::new(k.group.clone(), gens)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dichotomy {
    AllSectionsFull,
    AllSectionsStabilize,
    /// Two level-one vertices whose sections fall on different sides, or the
    /// same vertex twice when its section is neither full nor stabilizing.
    Violation {
        first: Vertex,
        second: Vertex,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Full,
    Stabilizes,
    Neither,
}

/// Checks that the first-level sections of `H` are all `G` or all inside
/// `Stab_G(L1)`.
pub fn dichotomy_check(h: &SubgroupPresentation) -> Result<Dichotomy> {
    let group = &h.group;
    if !group.is_torsion() {
        return Err(Error::Precondition(format!("{group} is not torsion")));
    }
    if h.stabilizes_first_level() {
        return Err(Error::Precondition(
            "subgroup fixes the first level".to_string(),
        ));
    }
    let stab = stab1_generators(h);
    let sides: Vec<Side> = (1..=group.p())
        .map(|u| {
            let s = sections_of(&stab.presentation, u);
            if classify(&s) == SubgroupType::FullGroup {
                Side::Full
            } else if s.stabilizes_first_level() {
                Side::Stabilizes
            } else {
                Side::Neither
            }
        })
        .collect();
    let vertex = |i: usize| Vertex::child_of_root(group.p(), i as u32 + 1);
    if sides[0] == Side::Neither {
        return Ok(Dichotomy::Violation {
            first: vertex(0),
            second: vertex(0),
        });
    }
    if let Some(i) = sides.iter().position(|&s| s != sides[0]) {
        return Ok(Dichotomy::Violation {
            first: vertex(0),
            second: vertex(i),
        });
    }
    Ok(match sides[0] {
        Side::Full => Dichotomy::AllSectionsFull,
        _ => Dichotomy::AllSectionsStabilize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs3() -> GgsGroup {
        GgsGroup::gupta_sidki(3).unwrap()
    }

    fn sub(words: &[&str]) -> SubgroupPresentation {
        SubgroupPresentation::parse(gs3(), words.iter().copied()).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&sub(&["a", "b"])), SubgroupType::FullGroup);
        assert_eq!(classify(&sub(&["b"])), SubgroupType::TypeII(1));
        assert_eq!(classify(&sub(&["a b"])), SubgroupType::TypeIII(1));
        assert_eq!(classify(&sub(&[])), SubgroupType::TypeII(0));
        assert_eq!(classify(&sub(&["a^2 b^2 a b"])), SubgroupType::TypeII(0));
        // (2, 1) spans the line of (1, 2).
        assert_eq!(classify(&sub(&["a^2 b"])), SubgroupType::TypeIII(2));
    }

    #[test]
    fn stab1_examples() {
        let s = stab1_generators(&sub(&["a b"]));
        assert_eq!(
            s.presentation.gens(),
            &[gs3().parse_word("a b a b a b").unwrap()]
        );
        let s = stab1_generators(&sub(&["b", "a b a^2"]));
        assert_eq!(s.presentation, sub(&["b", "a b a^2"]));
        let s = stab1_generators(&sub(&["a", "b"]));
        assert_eq!(s.presentation, sub(&["b", "a b a^2", "a^2 b a"]));
    }

    #[test]
    fn stab1_factorizations_multiply_out() {
        let h = sub(&["a b^2", "b a b", "b a^2 b^2 a^2 b^2"]);
        let s = stab1_generators(&h);
        let x = s.pivot.unwrap();
        let xp = h.gens()[x].pow(3);
        assert!(s.presentation.gens().contains(&xp));
        for (w, f) in s.presentation.gens().iter().zip(s.factorizations.unwrap()) {
            assert_eq!(&f.evaluate(h.gens(), 3).unwrap(), w);
            assert_eq!(w.exponent_sums().0, 0);
        }
    }

    #[test]
    fn schreier_set_contains_pivot_power() {
        let h = sub(&["a b", "b^2"]);
        let (words, facts) = schreier_generators(&h, 0).unwrap();
        assert!(words.contains(&h.gens()[0].pow(3)));
        for (w, f) in words.iter().zip(&facts) {
            assert_eq!(&f.evaluate(h.gens(), 3).unwrap(), w);
        }
        assert!(schreier_generators(&h, 1).is_err());
    }

    #[test]
    fn section_subgroup_examples() {
        let g = gs3();
        let v = |s| g.parse_vertex(s).unwrap();
        assert_eq!(
            section_subgroup(&sub(&["b"]), &v("3")).unwrap(),
            sub(&["b"])
        );
        assert_eq!(
            section_subgroup(&sub(&["b"]), &v("1")).unwrap(),
            sub(&["a"])
        );
        assert!(section_subgroup(&sub(&["a"]), &v("2")).unwrap().is_empty());
    }

    #[test]
    fn dichotomy_examples() {
        assert_eq!(
            dichotomy_check(&sub(&["a", "b"])).unwrap(),
            Dichotomy::AllSectionsFull
        );
        let verdict = dichotomy_check(&sub(&["a b"])).unwrap();
        assert!(!matches!(verdict, Dichotomy::Violation { .. }));
        assert!(dichotomy_check(&sub(&["b"])).is_err());
    }

    #[test]
    fn factorization_compose() {
        let g = gs3();
        let inner = vec![
            Factorization(vec![(0, 1), (1, 1)]),
            Factorization(vec![(1, 2)]),
        ];
        let outer = Factorization(vec![(0, -1), (1, 1)]);
        let base = vec![g.a(), g.b()];
        let mid: Vec<Word> = inner
            .iter()
            .map(|f| f.evaluate(&base, 3).unwrap())
            .collect();
        assert_eq!(
            outer.compose(&inner).evaluate(&base, 3),
            outer.evaluate(&mid, 3)
        );
    }
}
